use framebound::groups::{build_group, closure, DEFAULT_ELEMENT_CAP};
use framebound::{FiniteGroup, GroupKind, Matrix};

fn builtins() -> Vec<GroupKind> {
    let mut kinds: Vec<GroupKind> = (3..=8).map(GroupKind::Dihedral).collect();
    kinds.extend((2..=4).map(GroupKind::Hyperoctahedral));
    kinds.extend((2..=4).map(GroupKind::Simplex));
    kinds.push(GroupKind::IcosahedralFull);
    kinds.push(GroupKind::IcosahedralRotation);
    kinds
}

fn trivial(d: usize) -> FiniteGroup {
    closure(&[Matrix::identity(d)], DEFAULT_ELEMENT_CAP).unwrap()
}

#[test]
fn closure_is_idempotent() {
    for kind in builtins() {
        let g = build_group(kind).unwrap();
        let again = closure(g.elements(), DEFAULT_ELEMENT_CAP).unwrap();
        assert_eq!(again.order(), g.order(), "{kind}");
        again.check_invariants().unwrap();
    }
}

#[test]
fn molien_bounded_by_trivial_group() {
    for kind in builtins() {
        let g = build_group(kind).unwrap();
        let ours = g.molien_series(8).unwrap();
        let all = trivial(g.dimension()).molien_series(8).unwrap();
        assert_eq!(ours.coefficients[0], 1);
        assert!(ours.coefficients[2] >= 1, "{kind}");
        for (k, (a, b)) in ours.coefficients.iter().zip(&all.coefficients).enumerate() {
            assert!(a <= b, "{kind} degree {k}: {a} > {b}");
        }
    }
}

#[test]
fn dihedral_frame_orders() {
    for n in 3usize..=10 {
        let want = if n % 2 == 1 { n as u32 - 1 } else { (n as u32).div_ceil(2) - 1 };
        let got = build_group(GroupKind::Dihedral(n)).unwrap().max_frame_order(12).unwrap();
        assert_eq!(got, want, "dihedral:{n}");
    }
}

#[test]
fn dihedral_five_series() {
    let s = build_group(GroupKind::Dihedral(5)).unwrap().molien_series(10).unwrap();
    assert_eq!(s.coefficients, [1, 0, 1, 0, 1, 1, 1, 1, 1, 1, 2]);
}

// The chiral tetrahedral group, generated by a 3-cycle of axes and a
// half-turn, has invariants in degrees 2, 3, 4, 4, ...
#[test]
fn tetrahedral_rotation_series() {
    let cycle = Matrix::from_rows(vec![vec![0.0, 0.0, 1.0], vec![1.0, 0.0, 0.0], vec![0.0, 1.0, 0.0]]).unwrap();
    let half_turn = Matrix::diag(&[-1.0, -1.0, 1.0]).unwrap();
    let g = closure(&[cycle, half_turn], DEFAULT_ELEMENT_CAP).unwrap();
    assert_eq!(g.order(), 12);
    assert_eq!(g.molien_series(4).unwrap().coefficients, [1, 0, 1, 1, 2]);
    assert_eq!(g.max_frame_order(6).unwrap(), 1);

    let from_simplex = build_group(GroupKind::Simplex(3)).unwrap().rotation_subgroup();
    assert_eq!(from_simplex.order(), 12);
    assert_eq!(from_simplex.molien_series(4).unwrap().coefficients, [1, 0, 1, 1, 2]);
}

#[test]
fn icosahedral_rotation_series() {
    let g = build_group(GroupKind::IcosahedralRotation).unwrap();
    assert_eq!(g.order(), 60);
    assert_eq!(g.molien_series(10).unwrap().coefficients, [1, 0, 1, 0, 1, 0, 2, 0, 2, 0, 3]);
}
