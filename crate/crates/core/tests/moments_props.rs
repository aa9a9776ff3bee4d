use framebound::frames::fp_from_matrix;
use framebound::linalg::{schatten, SchattenMethod};
use framebound::moments::{moment, moment_report, transformed_moment, Shape};
use framebound::Matrix;
use proptest::prelude::*;

fn planar() -> impl Strategy<Value = Matrix> {
    prop::collection::vec(-2.0f64..2.0, 4)
        .prop_map(|v| Matrix::new(2, 2, v).unwrap())
        .prop_filter("invertible", |m| m.determinant().unwrap().abs() > 0.1)
}

proptest! {
    #[test]
    fn ratio_is_dilation_invariant(p in 1u32..=4, which in 0usize..4) {
        let shape = [
            Shape::centered_square(1.0).unwrap(),
            Shape::regular(7, 1.3).unwrap(),
            Shape::ellipse(2.0, 0.5).unwrap(),
            Shape::polygon(vec![[-1.0, -0.5], [2.0, 0.0], [0.3, 1.1]]).unwrap(),
        ][which].clone();
        let base = moment_report(&shape, p).unwrap().ratio;
        for c in [1.0 / 3.0, 2.0, 10.0] {
            let scaled = shape.transformed(&Matrix::identity(2).scale(c)).unwrap();
            let r = moment_report(&scaled, p).unwrap().ratio;
            prop_assert!((r - base).abs() <= 1e-10 * base);
        }
    }

    #[test]
    fn ellipse_closed_form_follows_frame_law(t in planar(), p in 1u32..=6) {
        let disk = Shape::disk(1.0).unwrap();
        let law = t.determinant().unwrap().abs() * fp_from_matrix(&t, p).unwrap().value * moment(&disk, p).unwrap();
        let direct = moment(&disk.transformed(&t).unwrap(), p).unwrap();
        prop_assert!((law - direct).abs() <= 1e-10 * direct);
        prop_assert!((transformed_moment(&disk, &t, p).unwrap() - law).abs() <= 1e-12 * law);
    }

    #[test]
    fn square_sits_inside_moment_sandwich(t in planar()) {
        let p = 2;
        let square = Shape::centered_square(1.0).unwrap();
        let det = t.determinant().unwrap().abs();
        let base = moment(&square, p).unwrap();
        let image = moment(&square.transformed(&t).unwrap(), p).unwrap();
        let hs = schatten(&t, 2, SchattenMethod::TracePower).unwrap();
        let s4 = schatten(&t, 4, SchattenMethod::TracePower).unwrap();
        let lower = det * (hs / 2.0).powi(p as i32) * base;
        let upper = det * s4 / 2.0 * base;
        prop_assert!(lower <= image * (1.0 + 1e-12), "{lower} > {image}");
        prop_assert!(image <= upper * (1.0 + 1e-12), "{image} > {upper}");
    }
}

#[test]
fn stretched_square_example() {
    let square = Shape::centered_square(1.0).unwrap();
    let t = Matrix::diag(&[2.0, 1.0]).unwrap();
    let image = moment(&square.transformed(&t).unwrap(), 2).unwrap();
    // ∫∫ (x² + y²)² over [-1,1]×[-1/2,1/2].
    assert!((image - 0.5361111111111111).abs() < 1e-13);
    let base = 7.0 / 180.0;
    assert!(image > 2.0 * 6.25 * base && image < 2.0 * 8.5 * base);
}

#[test]
fn square_rejected_for_order_two_law() {
    let square = Shape::regular(4, 1.0).unwrap();
    let err = transformed_moment(&square, &Matrix::diag(&[2.0, 1.0]).unwrap(), 2).unwrap_err();
    assert!(err.to_string().contains("order 1"), "{err}");
}
