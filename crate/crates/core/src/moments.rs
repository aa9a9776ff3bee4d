//! Polar moments of mass `I_2p(Ω) = ∫_Ω |x|^{2p} dx` about the origin.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::frames::fp_from_matrix;
use crate::groups::{build_group, GroupKind};
use crate::linalg::{squared_singular_values, Matrix};
use crate::numeric::{gamma_half_integer, gauss_legendre_unit, pairwise_sum, rel_diff};

pub const MAX_MOMENT_P: u32 = 8;
/// Relative tolerance between the frame law and direct integration.
pub const LAW_AGREEMENT_TOL: f64 = 1e-8;

/// A region centered at the origin.
///
/// JSON forms: `{"ellipse":[a,b]}`, `{"ellipsoid":[a,b,c]}`,
/// `{"polygon":[[x,y],...]}`, `{"regular":{"n":5,"circumradius":1}}`,
/// `{"ball":{"radius":1,"dim":3}}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Shape {
    #[serde(alias = "ellipse")]
    Ellipsoid(Vec<f64>),
    Polygon(Vec<[f64; 2]>),
    Regular { n: usize, circumradius: f64 },
    Ball { radius: f64, dim: usize },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MomentReport {
    pub p: u32,
    pub volume: f64,
    pub moment: f64,
    /// `V^{1+2p/d} / I_2p`, invariant under dilation.
    pub ratio: f64,
}

fn signed_area(v: &[[f64; 2]]) -> f64 {
    let n = v.len();
    0.5 * (0..n)
        .map(|i| {
            let (a, b) = (v[i], v[(i + 1) % n]);
            a[0] * b[1] - a[1] * b[0]
        })
        .sum::<f64>()
}

fn orient(a: [f64; 2], b: [f64; 2], c: [f64; 2]) -> f64 {
    (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])
}

fn on_segment(a: [f64; 2], b: [f64; 2], c: [f64; 2]) -> bool {
    c[0] >= a[0].min(b[0]) && c[0] <= a[0].max(b[0]) && c[1] >= a[1].min(b[1]) && c[1] <= a[1].max(b[1])
}

fn segments_intersect(p1: [f64; 2], p2: [f64; 2], q1: [f64; 2], q2: [f64; 2]) -> bool {
    let d1 = orient(q1, q2, p1);
    let d2 = orient(q1, q2, p2);
    let d3 = orient(p1, p2, q1);
    let d4 = orient(p1, p2, q2);
    if ((d1 > 0.0 && d2 < 0.0) || (d1 < 0.0 && d2 > 0.0)) && ((d3 > 0.0 && d4 < 0.0) || (d3 < 0.0 && d4 > 0.0)) {
        return true;
    }
    (d1 == 0.0 && on_segment(q1, q2, p1))
        || (d2 == 0.0 && on_segment(q1, q2, p2))
        || (d3 == 0.0 && on_segment(p1, p2, q1))
        || (d4 == 0.0 && on_segment(p1, p2, q2))
}

fn check_polygon(v: &[[f64; 2]]) -> Result<()> {
    let n = v.len();
    if n < 3 {
        return Err(domain(format!("polygon needs at least 3 vertices, got {n}")));
    }
    if v.iter().flatten().any(|c| !c.is_finite()) {
        return Err(domain("polygon vertices must be finite"));
    }
    let scale = v.iter().flatten().fold(0.0f64, |m, c| m.max(c.abs()));
    if signed_area(v).abs() <= 1e-14 * scale * scale {
        return Err(domain("polygon is degenerate (zero area)"));
    }
    for i in 0..n {
        for j in i + 1..n {
            let adjacent = j == i + 1 || (i == 0 && j == n - 1);
            if adjacent {
                continue;
            }
            if segments_intersect(v[i], v[(i + 1) % n], v[j], v[(j + 1) % n]) {
                return Err(domain(format!("polygon is not simple: edges {i} and {j} intersect")));
            }
        }
    }
    Ok(())
}

/// Vertices of the regular `n`-gon with one vertex on the positive x-axis.
pub fn regular_polygon_vertices(n: usize, circumradius: f64) -> Vec<[f64; 2]> {
    (0..n)
        .map(|k| {
            let (s, c) = (2.0 * PI * k as f64 / n as f64).sin_cos();
            [circumradius * c, circumradius * s]
        })
        .collect()
}

impl Shape {
    pub fn ellipse(a: f64, b: f64) -> Result<Self> {
        let s = Shape::Ellipsoid(vec![a, b]);
        s.validate()?;
        Ok(s)
    }

    pub fn disk(radius: f64) -> Result<Self> {
        let s = Shape::Ball { radius, dim: 2 };
        s.validate()?;
        Ok(s)
    }

    /// A simple polygon; clockwise input is reversed to counterclockwise.
    pub fn polygon(mut vertices: Vec<[f64; 2]>) -> Result<Self> {
        check_polygon(&vertices)?;
        if signed_area(&vertices) < 0.0 {
            vertices.reverse();
        }
        Ok(Shape::Polygon(vertices))
    }

    pub fn regular(n: usize, circumradius: f64) -> Result<Self> {
        let s = Shape::Regular { n, circumradius };
        s.validate()?;
        Ok(s)
    }

    /// Square `[-s/2, s/2]²`.
    pub fn centered_square(side: f64) -> Result<Self> {
        let h = 0.5 * side;
        Shape::polygon(vec![[-h, -h], [h, -h], [h, h], [-h, h]])
    }

    pub fn from_json_str(text: &str, source_name: &str) -> Result<Self> {
        let shape: Shape = serde_json::from_str(text).map_err(|e| Error::Parse {
            source_name: source_name.to_string(),
            line: e.line(),
            message: e.to_string(),
        })?;
        shape.normalized()
    }

    fn normalized(self) -> Result<Self> {
        match self {
            Shape::Polygon(v) => Shape::polygon(v),
            other => {
                other.validate()?;
                Ok(other)
            }
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            Shape::Ellipsoid(axes) => {
                if axes.is_empty() {
                    return Err(domain("ellipsoid needs at least one semiaxis"));
                }
                if axes.iter().any(|a| !(a.is_finite() && *a > 0.0)) {
                    return Err(domain(format!("semiaxes must be finite and > 0, got {axes:?}")));
                }
                Ok(())
            }
            Shape::Polygon(v) => {
                check_polygon(v)?;
                if signed_area(v) < 0.0 {
                    return Err(domain("polygon vertices must be counterclockwise"));
                }
                Ok(())
            }
            Shape::Regular { n, circumradius } => {
                if *n < 3 {
                    return Err(domain(format!("regular polygon needs n >= 3, got {n}")));
                }
                if !(circumradius.is_finite() && *circumradius > 0.0) {
                    return Err(domain("circumradius must be finite and > 0"));
                }
                Ok(())
            }
            Shape::Ball { radius, dim } => {
                if *dim == 0 {
                    return Err(domain("ball dimension must be >= 1"));
                }
                if !(radius.is_finite() && *radius > 0.0) {
                    return Err(domain("ball radius must be finite and > 0"));
                }
                Ok(())
            }
        }
    }

    pub fn dimension(&self) -> usize {
        match self {
            Shape::Ellipsoid(axes) => axes.len(),
            Shape::Polygon(_) | Shape::Regular { .. } => 2,
            Shape::Ball { dim, .. } => *dim,
        }
    }

    /// Vertices for polygonal shapes.
    pub fn vertices(&self) -> Option<Vec<[f64; 2]>> {
        match self {
            Shape::Polygon(v) => Some(v.clone()),
            Shape::Regular { n, circumradius } => Some(regular_polygon_vertices(*n, *circumradius)),
            _ => None,
        }
    }

    /// The image `T(Ω)`, up to a rotation for ellipsoids (which does not
    /// change moments about the origin).
    pub fn transformed(&self, t: &Matrix) -> Result<Shape> {
        let d = self.dimension();
        if !t.is_square() || t.rows() != d {
            return Err(domain(format!(
                "transformation must be {d}x{d}, got {}x{}",
                t.rows(),
                t.cols()
            )));
        }
        if let Some(v) = self.vertices() {
            let image = v
                .iter()
                .map(|x| {
                    let y = t.apply(x)?;
                    Ok([y[0], y[1]])
                })
                .collect::<Result<Vec<_>>>()?;
            return Shape::polygon(image);
        }
        let axes = match self {
            Shape::Ellipsoid(axes) => axes.clone(),
            Shape::Ball { radius, dim } => vec![*radius; *dim],
            _ => unreachable!(),
        };
        let stretched = t.matmul(&Matrix::diag(&axes)?)?;
        let s2 = squared_singular_values(&stretched)?;
        if s2.iter().any(|v| *v <= 0.0) {
            return Err(domain("transformation is singular"));
        }
        Ok(Shape::Ellipsoid(s2.iter().map(|v| v.sqrt()).collect()))
    }

    pub fn volume(&self) -> Result<f64> {
        moment(self, 0)
    }
}

fn unit_sphere_area(d: usize) -> f64 {
    2.0 * PI.powf(d as f64 / 2.0) / gamma_half_integer(d as u32)
}

// ∫_{unit ball} Π u_i^{2k_i} du = 2 Π Γ(k_i + 1/2) / (Γ(|k| + d/2) (2|k| + d)).
fn ball_monomial_integral(k: &[u32]) -> f64 {
    let d = k.len() as u32;
    let total: u32 = k.iter().sum();
    let num: f64 = k.iter().map(|&ki| gamma_half_integer(2 * ki + 1)).product();
    2.0 * num / (gamma_half_integer(2 * total + d) * (2 * total + d) as f64)
}

// All compositions of `p` into `d` nonnegative parts.
fn compositions(p: u32, d: usize) -> Vec<Vec<u32>> {
    if d == 1 {
        return vec![vec![p]];
    }
    let mut out = Vec::new();
    for first in 0..=p {
        for mut rest in compositions(p - first, d - 1) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

fn ellipsoid_moment(axes: &[f64], p: u32) -> f64 {
    // x = diag(a) u: |x|^{2p} = (Σ a_i² u_i²)^p, expanded multinomially.
    let jac: f64 = axes.iter().product();
    let fact = |n: u32| (1..=n).map(f64::from).product::<f64>();
    let terms: Vec<f64> = compositions(p, axes.len())
        .into_iter()
        .map(|k| {
            let multinomial = fact(p) / k.iter().map(|&ki| fact(ki)).product::<f64>();
            let weight: f64 = axes.iter().zip(&k).map(|(a, &ki)| a.powi(2 * ki as i32)).product();
            multinomial * weight * ball_monomial_integral(&k)
        })
        .collect();
    jac * pairwise_sum(&terms)
}

fn polygon_moment(v: &[[f64; 2]], p: u32) -> f64 {
    // Signed fan from the origin; the edge integrand is a polynomial of
    // degree 2p in t, so p+1 Gauss nodes are exact.
    let rule = gauss_legendre_unit(p as usize + 1);
    let n = v.len();
    let terms: Vec<f64> = (0..n)
        .map(|i| {
            let (a, b) = (v[i], v[(i + 1) % n]);
            let det = a[0] * b[1] - a[1] * b[0];
            let edge: f64 = rule
                .iter()
                .map(|&(t, w)| {
                    let x = a[0] + t * (b[0] - a[0]);
                    let y = a[1] + t * (b[1] - a[1]);
                    w * (x * x + y * y).powi(p as i32)
                })
                .sum();
            det * edge / (2 * p + 2) as f64
        })
        .collect();
    pairwise_sum(&terms)
}

/// `I_2p(Ω)`; `p = 0` gives the volume.
pub fn moment(shape: &Shape, p: u32) -> Result<f64> {
    if p > MAX_MOMENT_P {
        return Err(domain(format!("moment order must be <= {MAX_MOMENT_P}, got {p}")));
    }
    shape.validate()?;
    Ok(match shape {
        Shape::Ball { radius, dim } => {
            let e = (*dim as u32 + 2 * p) as i32;
            unit_sphere_area(*dim) * radius.powi(e) / e as f64
        }
        Shape::Ellipsoid(axes) => ellipsoid_moment(axes, p),
        Shape::Polygon(v) => polygon_moment(v, p),
        Shape::Regular { n, circumradius } => polygon_moment(&regular_polygon_vertices(*n, *circumradius), p),
    })
}

pub fn moment_report(shape: &Shape, p: u32) -> Result<MomentReport> {
    let volume = moment(shape, 0)?;
    let m = moment(shape, p)?;
    let d = shape.dimension() as f64;
    Ok(MomentReport {
        p,
        volume,
        moment: m,
        ratio: volume.powf(1.0 + 2.0 * p as f64 / d) / m,
    })
}

/// Checks that `shape` admits tight `p`-frames.
pub fn check_frame_admissible(shape: &Shape, p: u32) -> Result<()> {
    match shape {
        Shape::Ball { .. } => Ok(()),
        Shape::Ellipsoid(axes) if axes.iter().all(|a| *a == axes[0]) => Ok(()),
        Shape::Regular { n, .. } => {
            let group = build_group(GroupKind::Dihedral(*n))?;
            let available = group.max_frame_order(p.min(16))?;
            if available < p {
                return Err(domain(format!(
                    "regular {n}-gon admits frames only up to order {available}, order {p} requested (short by {})",
                    p - available
                )));
            }
            Ok(())
        }
        _ => Err(domain(
            "only balls and regular polygons carry the symmetry needed for the frame law",
        )),
    }
}

/// `I_2p(T(Ω)) = |det T| F_p(s²(T)) I_2p(Ω)`, checked against direct
/// integration of the image shape.
pub fn transformed_moment(shape: &Shape, t: &Matrix, p: u32) -> Result<f64> {
    check_frame_admissible(shape, p)?;
    let image = shape.transformed(t)?;
    let law = if p == 0 {
        t.determinant()?.abs() * moment(shape, 0)?
    } else {
        t.determinant()?.abs() * fp_from_matrix(t, p)?.value * moment(shape, p)?
    };
    let direct = moment(&image, p)?;
    let gap = rel_diff(law, direct);
    if gap > LAW_AGREEMENT_TOL {
        return Err(Error::Consistency(format!(
            "frame law gives {law} but direct integration gives {direct} (relative gap {gap:.3e})"
        )));
    }
    Ok(law)
}

/// Scale-free ratios `A^{1+p}/I_2p` at `T(Ω)` and `T⁻¹(Ω)`, which coincide
/// in the plane.
pub fn two_dim_reciprocity(shape: &Shape, t: &Matrix, p: u32) -> Result<(f64, f64)> {
    if shape.dimension() != 2 {
        return Err(domain("reciprocity is a planar identity"));
    }
    check_frame_admissible(shape, p)?;
    let forward = moment_report(&shape.transformed(t)?, p)?.ratio;
    let backward = moment_report(&shape.transformed(&t.inverse()?)?, p)?.ratio;
    let gap = rel_diff(forward, backward);
    if gap > LAW_AGREEMENT_TOL {
        return Err(Error::Consistency(format!(
            "reciprocity fails: {forward} vs {backward} (relative gap {gap:.3e})"
        )));
    }
    Ok((forward, backward))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn closed_form_examples() {
        let disk = Shape::disk(1.0).unwrap();
        assert!((moment(&disk, 1).unwrap() - PI / 2.0).abs() < 1e-15);
        for p in 0..=8 {
            let want = PI / (p as f64 + 1.0);
            assert!((moment(&disk, p).unwrap() - want).abs() < 1e-14);
            let as_ellipse = moment(&Shape::ellipse(1.0, 1.0).unwrap(), p).unwrap();
            assert!((as_ellipse - want).abs() < 1e-14);
        }
        let e = moment(&Shape::ellipse(2.0, 1.0).unwrap(), 1).unwrap();
        assert!((e - 2.5 * PI).abs() < 1e-13);
        let ball3 = Shape::Ball { radius: 1.0, dim: 3 };
        assert!((moment(&ball3, 0).unwrap() - 4.0 * PI / 3.0).abs() < 1e-14);
        assert!((moment(&ball3, 1).unwrap() - 4.0 * PI / 5.0).abs() < 1e-14);
        assert!(moment(&disk, 9).is_err());
    }

    #[test]
    fn unit_square() {
        let sq = Shape::centered_square(1.0).unwrap();
        assert!((moment(&sq, 0).unwrap() - 1.0).abs() < 1e-15);
        assert!((moment(&sq, 1).unwrap() - 1.0 / 6.0).abs() < 1e-15);
        assert!((moment(&sq, 2).unwrap() - 7.0 / 180.0).abs() < 1e-15);
    }

    // Moment of a polygon by a fine midpoint grid, for shapes with the
    // origin outside.
    #[test]
    fn origin_outside_polygon() {
        let tri = Shape::polygon(vec![[1.0, 1.0], [3.0, 1.0], [1.0, 2.0]]).unwrap();
        let n = 2000;
        let mut acc = 0.0;
        for i in 0..n {
            for j in 0..n {
                let x = 1.0 + 2.0 * (i as f64 + 0.5) / n as f64;
                let y = 1.0 + (j as f64 + 0.5) / n as f64;
                if (x - 1.0) / 2.0 + (y - 1.0) <= 1.0 {
                    acc += (x * x + y * y).powi(2);
                }
            }
        }
        acc *= 2.0 / (n * n) as f64;
        assert!((moment(&tri, 2).unwrap() - acc).abs() < 1e-2 * acc);
        assert!((moment(&tri, 0).unwrap() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn clockwise_is_reoriented() {
        let cw = Shape::polygon(vec![[-0.5, -0.5], [-0.5, 0.5], [0.5, 0.5], [0.5, -0.5]]).unwrap();
        assert!((moment(&cw, 2).unwrap() - 7.0 / 180.0).abs() < 1e-15);
        assert!(Shape::Polygon(vec![[0.0, 0.0], [0.0, 1.0], [1.0, 0.0]]).validate().is_err());
    }

    #[test]
    fn rejects_bad_polygons() {
        assert!(Shape::polygon(vec![[0.0, 0.0], [1.0, 0.0]]).is_err());
        assert!(Shape::polygon(vec![[0.0, 0.0], [1.0, 0.0], [2.0, 0.0]]).is_err());
        let bowtie = vec![[0.0, 0.0], [1.0, 1.0], [1.0, 0.0], [0.0, 1.0]];
        assert!(Shape::polygon(bowtie).is_err());
    }

    #[test]
    fn transformed_examples() {
        let disk = Shape::disk(1.0).unwrap();
        let t = Matrix::diag(&[2.0, 1.0]).unwrap();
        assert!((transformed_moment(&disk, &t, 1).unwrap() - 2.5 * PI).abs() < 1e-12);
        let pent = Shape::regular(5, 1.0).unwrap();
        let r = Matrix::rotation2(0.9);
        let before = moment(&pent, 2).unwrap();
        assert!((transformed_moment(&pent, &r, 2).unwrap() - before).abs() < 1e-12);
        let skew = Matrix::from_rows(vec![vec![1.3, 0.4], vec![-0.2, 0.8]]).unwrap();
        transformed_moment(&pent, &skew, 2).unwrap();
        let sq = Shape::regular(4, 1.0).unwrap();
        let err = transformed_moment(&sq, &t, 2).unwrap_err();
        assert!(err.to_string().contains("up to order 1"), "{err}");
        assert!(transformed_moment(&Shape::ellipse(2.0, 1.0).unwrap(), &t, 1).is_err());
    }

    #[test]
    fn reciprocity_examples() {
        let disk = Shape::disk(1.0).unwrap();
        let base = moment_report(&disk, 2).unwrap().ratio;
        let (a, b) = two_dim_reciprocity(&disk, &Matrix::rotation2(0.3), 2).unwrap();
        assert!((a - base).abs() < 1e-12 * base && (b - base).abs() < 1e-12 * base);
        let (a, b) = two_dim_reciprocity(&disk, &Matrix::diag(&[2.0, 1.0]).unwrap(), 2).unwrap();
        assert!((a - b).abs() < 1e-10 * a);
    }

    #[test]
    fn scale_invariant_ratio() {
        let pent = Shape::regular(5, 1.0).unwrap();
        let base = moment_report(&pent, 3).unwrap().ratio;
        for c in [1.0 / 3.0, 2.0, 10.0] {
            let scaled = pent.transformed(&Matrix::identity(2).scale(c)).unwrap();
            let r = moment_report(&scaled, 3).unwrap().ratio;
            assert!((r - base).abs() < 1e-10 * base);
        }
    }

    #[test]
    fn json_forms() {
        let e = Shape::from_json_str(r#"{"ellipse":[2,1]}"#, "s.json").unwrap();
        assert_eq!(e, Shape::Ellipsoid(vec![2.0, 1.0]));
        let r = Shape::from_json_str(r#"{"regular":{"n":5,"circumradius":1}}"#, "s.json").unwrap();
        assert_eq!(r, Shape::Regular { n: 5, circumradius: 1.0 });
        let p = Shape::from_json_str(r#"{"polygon":[[0,0],[0,1],[1,0]]}"#, "s.json").unwrap();
        assert_eq!(p.vertices().unwrap()[0], [1.0, 0.0]);
        let err = Shape::from_json_str("{\"ellipse\":\n[2,-1]}", "bad.json").unwrap_err();
        assert!(matches!(err, Error::Domain(_)));
        let err = Shape::from_json_str("{\n\"cube\": 1}", "bad.json").unwrap_err();
        assert!(err.to_string().starts_with("bad.json:2:"), "{err}");
    }
}
