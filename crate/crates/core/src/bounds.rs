//! Eigenvalue upper bounds on linearly transformed domains.
//!
//! Each bound takes a transformation `T` mapping a symmetric domain `Ω` onto
//! `T(Ω)` and a reference eigenvalue (or eigenvalue sum) on `Ω`, and returns
//! the factor relating the two together with any rescaled operator
//! parameter. Reference values are inputs; nothing here solves a PDE.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::frames::fp_sphere_2d;
use crate::linalg::{outer_gram, sym_eigenvalues, Matrix, DEFAULT_JACOBI_TOL};
use crate::numeric::pairwise_sum;
use crate::special::ellipse_perimeter;

/// Relative tolerance for the equality case `T = c U`.
pub const EQUALITY_TOL: f64 = 1e-10;
pub const DET_ONE_TOL: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RescaledParameter {
    pub name: String,
    pub original: f64,
    pub rescaled: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub operator: String,
    /// `factor * reference`, when a reference value was supplied.
    pub value: Option<f64>,
    pub factor: f64,
    pub frame_order: Option<f64>,
    pub rescaled: Option<RescaledParameter>,
    /// `T` is a scalar multiple of an orthogonal matrix.
    pub equality_case: bool,
    /// Named intermediate quantities, e.g. `C` and `D` for the plate.
    pub quantities: BTreeMap<String, f64>,
    pub notes: Vec<String>,
}

impl BoundReport {
    fn new(operator: &str, factor: f64, reference: Option<f64>, equality_case: bool) -> Self {
        Self {
            operator: operator.to_string(),
            value: reference.map(|r| r * factor),
            factor,
            frame_order: None,
            rescaled: None,
            equality_case,
            quantities: BTreeMap::new(),
            notes: Vec::new(),
        }
    }
}

/// `‖T⁻¹‖₂²` and `‖T⁻¹‖₄⁴` for a square invertible `T`.
#[derive(Clone, Copy, Debug)]
struct InverseNorms {
    d: f64,
    hs2: f64,
    s4: f64,
}

impl InverseNorms {
    fn of(t: &Matrix) -> Result<Self> {
        let inv = t.inverse()?;
        let g = outer_gram(&inv);
        let hs2 = g.trace();
        let s4 = g.mul_unchecked(&g).trace();
        Ok(Self { d: t.cols() as f64, hs2, s4 })
    }

    // d Σ s⁴ - (Σ s²)² vanishes exactly when all squared singular values agree.
    fn equality_case(&self) -> bool {
        (self.d * self.s4 - self.hs2 * self.hs2) <= EQUALITY_TOL * self.hs2 * self.hs2
    }

    fn c_mean(&self) -> f64 {
        self.hs2 / self.d
    }

    fn plate_c(&self) -> f64 {
        self.s4
    }

    fn plate_d(&self) -> f64 {
        (self.hs2 * self.hs2 + 2.0 * self.s4) / (self.d + 2.0)
    }
}

fn check_positive(name: &str, v: f64) -> Result<()> {
    if !(v.is_finite() && v > 0.0) {
        return Err(domain(format!("{name} must be finite and > 0, got {v}")));
    }
    Ok(())
}

fn check_order(order: u32) -> Result<()> {
    if order != 1 && order != 2 {
        return Err(domain(format!("frame order must be 1 or 2, got {order}")));
    }
    Ok(())
}

/// Clamped plate with tension `τ`.
///
/// Order 1 uses `C = ‖T⁻¹‖₄⁴` and needs only an irreducible symmetry group;
/// order 2 uses `D = (‖T⁻¹‖₂⁴ + 2‖T⁻¹‖₄⁴)/(d+2)` and needs 2-frames. The
/// factor is `C/d` (resp. `D/d`) and the tension on `T(Ω)` is
/// `τ C/‖T⁻¹‖₂²` (resp. `D`).
pub fn plate_bound(t: &Matrix, lambda_ref: f64, tau: f64, order: u32) -> Result<BoundReport> {
    check_order(order)?;
    if !tau.is_finite() {
        return Err(domain("tension must be finite"));
    }
    if tau >= 0.0 {
        check_positive("reference eigenvalue", lambda_ref)?;
    } else if !lambda_ref.is_finite() {
        return Err(domain("reference eigenvalue must be finite"));
    }
    let n = InverseNorms::of(t)?;
    let (c, d) = (n.plate_c(), n.plate_d());
    let used = if order == 1 { c } else { d };
    let mut r = BoundReport::new("plate", used / n.d, Some(lambda_ref), n.equality_case());
    r.frame_order = Some(order as f64);
    r.rescaled = Some(RescaledParameter {
        name: "tau".into(),
        original: tau,
        rescaled: tau * used / n.hs2,
    });
    r.quantities.insert("C".into(), c);
    r.quantities.insert("D".into(), d);
    if d > c * (1.0 + 1e-12) {
        r.notes.push(format!("unexpected: D = {d} exceeds C = {c}"));
    }
    if tau < 0.0 {
        r.notes.push("negative tension (compression): the bounds are not comparable in this regime".into());
    }
    Ok(r)
}

/// Buckling eigenvalue. Order 2 factor
/// `(‖T⁻¹‖₂⁴ + 2‖T⁻¹‖₄⁴)/((d+2)‖T⁻¹‖₂²)`; order 1 factor `‖T⁻¹‖₄⁴/‖T⁻¹‖₂²`.
pub fn buckling_bound(t: &Matrix, lambda_ref: f64, order: u32) -> Result<BoundReport> {
    check_order(order)?;
    check_positive("reference eigenvalue", lambda_ref)?;
    let n = InverseNorms::of(t)?;
    let factor = if order == 1 { n.s4 / n.hs2 } else { n.plate_d() / n.hs2 };
    let mut r = BoundReport::new("buckling", factor, Some(lambda_ref), n.equality_case());
    r.frame_order = Some(order as f64);
    r.quantities.insert("C".into(), n.plate_c());
    r.quantities.insert("D".into(), n.plate_d());
    Ok(r)
}

/// Fractional Laplacian `(-Δ)^{α/2}`: factor `c^{α/2}`, `c = ‖T⁻¹‖₂²/d`.
pub fn fractional_bound(t: &Matrix, alpha: f64, sum_ref: Option<f64>) -> Result<BoundReport> {
    if !(alpha > 0.0 && alpha <= 2.0) {
        return Err(domain(format!("alpha must lie in (0, 2], got {alpha}")));
    }
    let n = InverseNorms::of(t)?;
    let mut r = BoundReport::new("fractional", n.c_mean().powf(alpha / 2.0), sum_ref, n.equality_case());
    r.frame_order = Some(1.0);
    r.quantities.insert("c".into(), n.c_mean());
    r.quantities.insert("alpha".into(), alpha);
    Ok(r)
}

/// Fractional Laplacian on the ellipse with semiaxes `a`, `b`, compared
/// with the unit disk.
///
/// The exact factor averages `(cos²θ/a² + sin²θ/b²)^{α/2}` over the circle;
/// for `α ≤ 1` Jensen's inequality relaxes it to `(L(1/a, 1/b)/2π)^α` with `L`
/// the ellipse perimeter.
pub fn fractional_ellipse_perimeter_bound(a: f64, b: f64, alpha: f64, sum_ref: Option<f64>) -> Result<BoundReport> {
    check_positive("semiaxis a", a)?;
    check_positive("semiaxis b", b)?;
    if !(alpha > 0.0 && alpha <= 1.0) {
        return Err(domain(format!(
            "alpha must lie in (0, 1] for the perimeter relaxation, got {alpha}"
        )));
    }
    let exact = fp_sphere_2d([1.0 / (a * a), 1.0 / (b * b)], alpha / 2.0)?;
    let relaxed = (ellipse_perimeter(1.0 / a, 1.0 / b)? / (2.0 * PI)).powf(alpha);
    if exact > relaxed * (1.0 + 1e-12) {
        return Err(Error::Consistency(format!(
            "exact factor {exact} exceeds the relaxed factor {relaxed}"
        )));
    }
    let mut r = BoundReport::new("fractional-ellipse", exact, sum_ref, (a - b).abs() <= EQUALITY_TOL * a.max(b));
    r.frame_order = Some(alpha / 2.0);
    r.quantities.insert("relaxed_factor".into(), relaxed);
    if let Some(s) = sum_ref {
        r.quantities.insert("relaxed_value".into(), relaxed * s);
    }
    Ok(r)
}

/// Klein–Gordon operator `√(m² - Δ) - m`: factor `‖T⁻¹‖₂/√d`.
///
/// The mass on `T(Ω)` is `m ‖T⁻¹‖₂/√d`, which makes dilations `T = cI`
/// exact: `T(Ω)` with mass `m/c` has eigenvalues `1/c` times those of `Ω`
/// with mass `m`.
pub fn klein_gordon_bound(t: &Matrix, mass: f64, sum_ref: Option<f64>) -> Result<BoundReport> {
    if !(mass.is_finite() && mass >= 0.0) {
        return Err(domain(format!("mass must be finite and >= 0, got {mass}")));
    }
    let n = InverseNorms::of(t)?;
    let factor = n.c_mean().sqrt();
    let mut r = BoundReport::new("klein-gordon", factor, sum_ref, n.equality_case());
    r.frame_order = Some(1.0);
    r.rescaled = Some(RescaledParameter {
        name: "m".into(),
        original: mass,
        rescaled: mass * factor,
    });
    Ok(r)
}

/// Subordinate Brownian motion `Ψ(-Δ)` with scaling exponent `β`:
/// factor `(‖T⁻¹‖₂²/d)^β`. Requires `|det T| = 1`.
pub fn subordinator_bound(t: &Matrix, beta: f64, sum_ref: Option<f64>) -> Result<BoundReport> {
    if !(beta > 0.0 && beta <= 1.0) {
        return Err(domain(format!("beta must lie in (0, 1], got {beta}")));
    }
    if !t.is_square() {
        return Err(domain("transformation must be square"));
    }
    let det = t.determinant()?;
    if (det.abs() - 1.0).abs() > DET_ONE_TOL {
        return Err(Error::Precondition(format!("|det T| must be 1, got {}", det.abs())));
    }
    let n = InverseNorms::of(t)?;
    let mut r = BoundReport::new("subordinator", n.c_mean().powf(beta), sum_ref, n.equality_case());
    r.frame_order = Some(1.0);
    r.quantities.insert("beta".into(), beta);
    Ok(r)
}

/// `t ↦ (1/d) tr φ₁(t T⁻¹T⁻ᵀ) - φ₂((t/d) tr T⁻¹T⁻ᵀ)` with the Gram
/// eigenvalues computed once.
pub struct TransformedMultiplier<F1, F2> {
    phi1: F1,
    phi2: F2,
    gram_eigenvalues: Vec<f64>,
    gram_trace: f64,
}

impl<F1: Fn(f64) -> f64, F2: Fn(f64) -> f64> TransformedMultiplier<F1, F2> {
    pub fn new(phi1: F1, phi2: F2, t: &Matrix) -> Result<Self> {
        let g = outer_gram(&t.inverse()?);
        let gram_eigenvalues = sym_eigenvalues(&g, DEFAULT_JACOBI_TOL)?
            .into_iter()
            .map(|e| e.max(0.0))
            .collect();
        Ok(Self { phi1, phi2, gram_eigenvalues, gram_trace: g.trace() })
    }

    pub fn eval(&self, t: f64) -> Result<f64> {
        if !(t.is_finite() && t >= 0.0) {
            return Err(domain(format!("multiplier argument must be finite and >= 0, got {t}")));
        }
        let d = self.gram_eigenvalues.len() as f64;
        let first: Vec<f64> = self.gram_eigenvalues.iter().map(|e| (self.phi1)(t * e)).collect();
        let v = pairwise_sum(&first) / d - (self.phi2)(t * self.gram_trace / d);
        if !v.is_finite() {
            return Err(domain(format!("transformed multiplier is undefined at {t}")));
        }
        Ok(v)
    }

    pub fn gram_eigenvalues(&self) -> &[f64] {
        &self.gram_eigenvalues
    }
}

// Midpoint convexity on a geometric grid of [0, 1e3].
fn spot_check_convex(name: &str, f: &impl Fn(f64) -> f64) -> Result<()> {
    let mut grid = vec![0.0];
    grid.extend((0..40).map(|k| 1e-3 * 1.35f64.powi(k)));
    for w in grid.windows(2) {
        for &x in w {
            if !f(x).is_finite() {
                return Err(domain(format!("{name} is undefined at {x}")));
            }
        }
    }
    for i in 0..grid.len() {
        for j in i + 1..grid.len() {
            let (x, y) = (grid[i], grid[j]);
            let mid = f(0.5 * (x + y));
            let chord = 0.5 * (f(x) + f(y));
            if mid > chord + 1e-12 * chord.abs().max(1.0) {
                return Err(domain(format!("{name} is not convex on [{x}, {y}]")));
            }
        }
    }
    Ok(())
}

/// Caller-supplied eigenvalue sum for a transformed multiplier on `Ω`.
pub type ReferenceSum<'a, F1, F2> = &'a dyn Fn(&TransformedMultiplier<F1, F2>) -> Result<f64>;

/// General convex multipliers `φ₁`, `φ₂`.
///
/// Returns the transformed multiplier. When `reference_sum` is given it is
/// the eigenvalue sum of that transformed multiplier on `Ω` (supplied by the
/// caller's solver), and it bounds the sum for `φ₁ - φ₂` on `T(Ω)`.
pub fn general_multiplier_bound<F1, F2>(
    phi1: F1,
    phi2: F2,
    t: &Matrix,
    reference_sum: Option<ReferenceSum<'_, F1, F2>>,
) -> Result<(TransformedMultiplier<F1, F2>, BoundReport)>
where
    F1: Fn(f64) -> f64,
    F2: Fn(f64) -> f64,
{
    spot_check_convex("phi1", &phi1)?;
    spot_check_convex("phi2", &phi2)?;
    let n = InverseNorms::of(t)?;
    let multiplier = TransformedMultiplier::new(phi1, phi2, t)?;
    let value = reference_sum.map(|hook| hook(&multiplier)).transpose()?;
    let mut r = BoundReport::new("general-multiplier", 1.0, value, n.equality_case());
    r.frame_order = Some(1.0);
    r.notes.push("the bound is the reference sum for the transformed multiplier on the symmetric domain".into());
    if value.is_none() {
        r.notes.push("no reference eigenvalues supplied; only the transformed multiplier is reported".into());
    }
    Ok((multiplier, r))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct JohnBound {
    pub a: f64,
    pub alpha: f64,
    pub symmetric: bool,
    /// `((1 + 1/a²)/2)^{α/2} λ_disk`.
    pub upper: f64,
    /// `upper · c^{-α/2}` with containment constant `c = 2` (or `√2`).
    pub lower: f64,
    /// `λ_disk / r^α` for a caller-supplied inradius `r`.
    pub inradius_bound: Option<f64>,
    pub notes: Vec<String>,
}

/// Planar domain whose John ellipse has semiaxes `1` and `a ≥ 1`.
pub fn john_domain_bound(
    a: f64,
    alpha: f64,
    lambda_disk: f64,
    symmetric: bool,
    inradius: Option<f64>,
) -> Result<JohnBound> {
    if !(a.is_finite() && a >= 1.0) {
        return Err(domain(format!("John ellipse semiaxis must be >= 1, got {a}")));
    }
    if !(alpha > 0.0 && alpha <= 2.0) {
        return Err(domain(format!("alpha must lie in (0, 2], got {alpha}")));
    }
    check_positive("disk eigenvalue", lambda_disk)?;
    let upper = ((1.0 + 1.0 / (a * a)) / 2.0).powf(alpha / 2.0) * lambda_disk;
    let c: f64 = if symmetric { 2f64.sqrt() } else { 2.0 };
    let mut notes = Vec::new();
    let inradius_bound = match inradius {
        Some(r) => {
            check_positive("inradius", r)?;
            if r * r < 1.0 - 1e-12 || r * r > a + 1e-12 {
                notes.push(format!("inradius {r} lies outside [1, sqrt(a)], inconsistent with the John ellipse"));
            }
            Some(lambda_disk / r.powf(alpha))
        }
        None => None,
    };
    Ok(JohnBound {
        a,
        alpha,
        symmetric,
        upper,
        lower: upper * c.powf(-alpha / 2.0),
        inradius_bound,
        notes,
    })
}

/// The ellipse comparison tables: ellipses with `ab = 1` and ratio `r = a/b`
/// obtained from the unit disk by `diag(√r, 1/√r)`.
pub mod tables {
    use super::*;

    /// First clamped-plate eigenvalue of the unit disk.
    pub const PLATE_DISK_EIGENVALUE: f64 = 104.36;
    /// First buckling eigenvalue of the unit disk, `j_{1,1}²`.
    pub const BUCKLING_DISK_EIGENVALUE: f64 = 14.682;
    pub const PLATE_RATIOS: [f64; 4] = [1.1, 1.2, 2.0, 4.0];
    /// Decimal places shown per plate column.
    pub const PLATE_DIGITS: [usize; 4] = [3, 3, 3, 1];
    pub const BUCKLING_RATIOS: [f64; 5] = [1.2, 1.4, 1.6, 2.0, 4.0];
    pub const BUCKLING_DIGITS: [usize; 5] = [2, 2, 2, 2, 2];

    /// Collocation values from the literature, shown as annotations only.
    pub const PLATE_COLLOCATION_UPPER: [f64; 4] = [105.741, 109.440, 187.382, 603.2];
    pub const PLATE_COLLOCATION_LOWER: [f64; 4] = [105.741, 109.440, 187.380, 587.2];
    pub const BUCKLING_COLLOCATION_LOWER: [f64; 5] = [15.1, 16.1, 17.5, 20.8, 39.0];

    #[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
    #[serde(rename_all = "lowercase")]
    pub enum TableKind {
        Plate,
        Buckling,
    }

    #[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
    pub struct AnnotationRow {
        pub label: String,
        pub values: Vec<f64>,
    }

    #[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
    pub struct Table {
        pub kind: TableKind,
        pub reference: f64,
        pub ratios: Vec<f64>,
        pub digits: Vec<usize>,
        pub one_frame: Vec<f64>,
        pub two_frame: Vec<f64>,
        pub annotations: Vec<AnnotationRow>,
    }

    pub fn ellipse_transform(ratio: f64) -> Result<Matrix> {
        check_positive("ratio", ratio)?;
        Matrix::diag(&[ratio.sqrt(), 1.0 / ratio.sqrt()])
    }

    pub fn plate_table() -> Result<Table> {
        let mut one = Vec::new();
        let mut two = Vec::new();
        for &r in &PLATE_RATIOS {
            let t = ellipse_transform(r)?;
            one.push(plate_bound(&t, PLATE_DISK_EIGENVALUE, 0.0, 1)?.value.unwrap());
            two.push(plate_bound(&t, PLATE_DISK_EIGENVALUE, 0.0, 2)?.value.unwrap());
        }
        Ok(Table {
            kind: TableKind::Plate,
            reference: PLATE_DISK_EIGENVALUE,
            ratios: PLATE_RATIOS.to_vec(),
            digits: PLATE_DIGITS.to_vec(),
            one_frame: one,
            two_frame: two,
            annotations: vec![
                AnnotationRow { label: "McLaurin (upper)".into(), values: PLATE_COLLOCATION_UPPER.to_vec() },
                AnnotationRow { label: "McLaurin (lower)".into(), values: PLATE_COLLOCATION_LOWER.to_vec() },
            ],
        })
    }

    pub fn buckling_table() -> Result<Table> {
        let mut one = Vec::new();
        let mut two = Vec::new();
        for &r in &BUCKLING_RATIOS {
            let t = ellipse_transform(r)?;
            one.push(buckling_bound(&t, BUCKLING_DISK_EIGENVALUE, 1)?.value.unwrap());
            two.push(buckling_bound(&t, BUCKLING_DISK_EIGENVALUE, 2)?.value.unwrap());
        }
        Ok(Table {
            kind: TableKind::Buckling,
            reference: BUCKLING_DISK_EIGENVALUE,
            ratios: BUCKLING_RATIOS.to_vec(),
            digits: BUCKLING_DIGITS.to_vec(),
            one_frame: one,
            two_frame: two,
            annotations: vec![AnnotationRow {
                label: "McLaurin (lower)".into(),
                values: BUCKLING_COLLOCATION_LOWER.to_vec(),
            }],
        })
    }

    impl Table {
        /// Aligned text with each column rounded to its printed precision.
        pub fn to_text(&self) -> String {
            let mut rows: Vec<(String, Vec<String>)> = Vec::new();
            let fmt_row = |values: &[f64]| -> Vec<String> {
                values.iter().zip(&self.digits).map(|(v, &k)| format!("{v:.k$}")).collect()
            };
            rows.push(("a/b".into(), self.ratios.iter().map(|r| format!("{r}")).collect()));
            rows.push(("1-frames".into(), fmt_row(&self.one_frame)));
            rows.push(("2-frames".into(), fmt_row(&self.two_frame)));
            for a in &self.annotations {
                rows.push((a.label.clone(), fmt_row(&a.values)));
            }
            let label_w = rows.iter().map(|(l, _)| l.len()).max().unwrap_or(0);
            let col_w: Vec<usize> = (0..self.ratios.len())
                .map(|j| rows.iter().map(|(_, c)| c[j].len()).max().unwrap_or(0))
                .collect();
            let mut out = String::new();
            for (label, cells) in rows {
                out.push_str(&format!("{label:<label_w$}"));
                for (cell, w) in cells.iter().zip(&col_w) {
                    out.push_str(&format!("  {cell:>w$}"));
                }
                out.push('\n');
            }
            out
        }
    }
}
