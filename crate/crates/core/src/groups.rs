//! Finite orthogonal groups: closure from generators, a small catalog,
//! Molien series and the largest admissible frame order.

use std::collections::{HashMap, VecDeque};
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::linalg::Matrix;
use crate::numeric::pairwise_sum;

pub const DEFAULT_ELEMENT_CAP: usize = 100_000;
pub const ORTHOGONALITY_TOL: f64 = 1e-9;
const DEDUP_GRID: f64 = 1e-9;
pub const MAX_MOLIEN_DEGREE: usize = 64;
pub const MOLIEN_RESIDUAL_TOL: f64 = 1e-6;
pub const MAX_FRAME_ORDER_P: u32 = 16;

/// Where a group came from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GroupKind {
    Dihedral(usize),
    Hyperoctahedral(usize),
    Simplex(usize),
    IcosahedralFull,
    IcosahedralRotation,
    Custom,
}

impl fmt::Display for GroupKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GroupKind::Dihedral(n) => write!(f, "dihedral:{n}"),
            GroupKind::Hyperoctahedral(d) => write!(f, "hyperoctahedral:{d}"),
            GroupKind::Simplex(d) => write!(f, "simplex:{d}"),
            GroupKind::IcosahedralFull => f.write_str("icosahedral:full"),
            GroupKind::IcosahedralRotation => f.write_str("icosahedral:rot"),
            GroupKind::Custom => f.write_str("custom"),
        }
    }
}

impl FromStr for GroupKind {
    type Err = Error;

    /// Parses `dihedral:5`, `hyperoctahedral:3`, `simplex:3`,
    /// `icosahedral:full` (or bare `icosahedral`) and `icosahedral:rot`.
    fn from_str(s: &str) -> Result<Self> {
        let (name, param) = match s.split_once(':') {
            Some((n, p)) => (n.trim(), Some(p.trim())),
            None => (s.trim(), None),
        };
        let int_param = || -> Result<usize> {
            let p = param.ok_or_else(|| domain(format!("group {name:?} needs a parameter, e.g. {name}:3")))?;
            p.parse().map_err(|_| domain(format!("bad group parameter {p:?}")))
        };
        match name.to_ascii_lowercase().as_str() {
            "dihedral" => Ok(GroupKind::Dihedral(int_param()?)),
            "hyperoctahedral" => Ok(GroupKind::Hyperoctahedral(int_param()?)),
            "simplex" => Ok(GroupKind::Simplex(int_param()?)),
            "icosahedral" => match param {
                None | Some("full") => Ok(GroupKind::IcosahedralFull),
                Some("rot") | Some("rotation") => Ok(GroupKind::IcosahedralRotation),
                Some(other) => Err(domain(format!("unknown icosahedral variant {other:?}"))),
            },
            _ => Err(domain(format!("unknown group {s:?}"))),
        }
    }
}

/// A finite subgroup of `O(d)`, stored as its full element list.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FiniteGroup {
    dimension: usize,
    elements: Vec<Matrix>,
    kind: GroupKind,
}

/// Coefficients `c_0..c_K` of the Molien series.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MolienSeries {
    pub coefficients: Vec<u64>,
}

impl MolienSeries {
    pub fn coefficient(&self, k: usize) -> Option<u64> {
        self.coefficients.get(k).copied()
    }

    /// Polynomial display in decreasing degree, e.g. `2*t^4 + t^3 + t^2 + 1`.
    pub fn to_polynomial_string(&self) -> String {
        let mut terms = Vec::new();
        for (k, &c) in self.coefficients.iter().enumerate().rev() {
            if c == 0 {
                continue;
            }
            let mono = match k {
                0 => String::new(),
                1 => "t".to_string(),
                _ => format!("t^{k}"),
            };
            terms.push(match (c, k) {
                (_, 0) => c.to_string(),
                (1, _) => mono,
                _ => format!("{c}*{mono}"),
            });
        }
        if terms.is_empty() {
            "0".into()
        } else {
            terms.join(" + ")
        }
    }
}

fn dedup_key(m: &Matrix) -> Vec<i64> {
    m.as_slice().iter().map(|v| (v / DEDUP_GRID).round() as i64).collect()
}

/// BFS closure of `generators` under multiplication.
///
/// Fails with a resource error once more than `cap` elements are found.
pub fn closure(generators: &[Matrix], cap: usize) -> Result<FiniteGroup> {
    let first = generators
        .first()
        .ok_or_else(|| domain("closure needs at least one generator"))?;
    let d = first.rows();
    for (i, g) in generators.iter().enumerate() {
        if !g.is_square() || g.rows() != d {
            return Err(domain(format!("generator {i} is not {d}x{d}")));
        }
        let defect = g.orthogonality_defect();
        if defect >= ORTHOGONALITY_TOL {
            return Err(domain(format!("generator {i} is not orthogonal (defect {defect:.3e})")));
        }
    }

    let identity = Matrix::identity(d);
    let mut seen: HashMap<Vec<i64>, usize> = HashMap::new();
    seen.insert(dedup_key(&identity), 0);
    let mut elements = vec![identity];
    let mut queue = VecDeque::from([0usize]);
    while let Some(idx) = queue.pop_front() {
        for g in generators {
            let next = g.mul_unchecked(&elements[idx]);
            let key = dedup_key(&next);
            if seen.contains_key(&key) {
                continue;
            }
            if elements.len() >= cap {
                return Err(Error::Resource(format!(
                    "group closure exceeded {cap} elements; generators likely span an infinite group"
                )));
            }
            seen.insert(key, elements.len());
            queue.push_back(elements.len());
            elements.push(next);
        }
    }
    Ok(FiniteGroup { dimension: d, elements, kind: GroupKind::Custom })
}

fn transposition(n: usize, i: usize, j: usize) -> Matrix {
    let mut m = Matrix::identity(n);
    m[(i, i)] = 0.0;
    m[(j, j)] = 0.0;
    m[(i, j)] = 1.0;
    m[(j, i)] = 1.0;
    m
}

// Orthonormal basis of the sum-zero hyperplane in R^(d+1), as the rows of a
// d x (d+1) matrix.
fn helmert_basis(d: usize) -> Matrix {
    let mut q = Matrix::zeros(d, d + 1);
    for k in 1..=d {
        let norm = ((k * (k + 1)) as f64).sqrt();
        for j in 0..k {
            q[(k - 1, j)] = 1.0 / norm;
        }
        q[(k - 1, k)] = -(k as f64) / norm;
    }
    q
}

fn generators_for(kind: GroupKind) -> Result<Vec<Matrix>> {
    Ok(match kind {
        GroupKind::Dihedral(n) => {
            if n < 3 {
                return Err(domain(format!("dihedral groups need n >= 3, got {n}")));
            }
            let angle = 2.0 * std::f64::consts::PI / n as f64;
            vec![Matrix::rotation2(angle), Matrix::diag(&[1.0, -1.0])?]
        }
        GroupKind::Hyperoctahedral(d) => {
            if d < 2 {
                return Err(domain(format!("hyperoctahedral groups need d >= 2, got {d}")));
            }
            let mut gens: Vec<Matrix> = (0..d - 1).map(|i| transposition(d, i, i + 1)).collect();
            let mut flip = Matrix::identity(d);
            flip[(0, 0)] = -1.0;
            gens.push(flip);
            gens
        }
        GroupKind::Simplex(d) => {
            if d < 2 {
                return Err(domain(format!("simplex groups need d >= 2, got {d}")));
            }
            let q = helmert_basis(d);
            let qt = q.transpose();
            (0..d)
                .map(|i| q.mul_unchecked(&transposition(d + 1, i, i + 1)).mul_unchecked(&qt))
                .collect()
        }
        GroupKind::IcosahedralRotation => icosahedral_rotation_generators(),
        GroupKind::IcosahedralFull => {
            let mut gens = icosahedral_rotation_generators();
            gens.push(Matrix::identity(3).scale(-1.0));
            gens
        }
        GroupKind::Custom => {
            return Err(domain("custom groups are built from explicit generators"));
        }
    })
}

fn icosahedral_rotation_generators() -> Vec<Matrix> {
    let phi = 0.5 * (1.0 + 5f64.sqrt());
    let cycle = Matrix::new(3, 3, vec![0.0, 1.0, 0.0, 0.0, 0.0, 1.0, 1.0, 0.0, 0.0]).unwrap();
    let half_turn = Matrix::diag(&[-1.0, -1.0, 1.0]).unwrap();
    let fivefold = Matrix::new(
        3,
        3,
        vec![phi - 1.0, -phi, 1.0, phi, 1.0, phi - 1.0, -1.0, phi - 1.0, phi],
    )
    .unwrap()
    .scale(0.5);
    vec![cycle, half_turn, fivefold]
}

/// Builds a catalog group.
pub fn build_group(kind: GroupKind) -> Result<FiniteGroup> {
    let mut g = closure(&generators_for(kind)?, DEFAULT_ELEMENT_CAP)?;
    g.kind = kind;
    if kind == GroupKind::IcosahedralRotation {
        debug_assert!(g.elements.iter().all(|u| u.determinant().unwrap() > 0.0));
    }
    Ok(g)
}

impl FiniteGroup {
    /// Closure of a JSON list of generator matrices.
    pub fn from_generators_json(text: &str, source_name: &str) -> Result<Self> {
        let gens: Vec<Matrix> = serde_json::from_str(text).map_err(|e| Error::Parse {
            source_name: source_name.to_string(),
            line: e.line(),
            message: e.to_string(),
        })?;
        closure(&gens, DEFAULT_ELEMENT_CAP)
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn elements(&self) -> &[Matrix] {
        &self.elements
    }

    pub fn kind(&self) -> GroupKind {
        self.kind
    }

    /// Elements of determinant `+1`.
    pub fn rotation_subgroup(&self) -> FiniteGroup {
        let elements: Vec<Matrix> = self
            .elements
            .iter()
            .filter(|u| u.determinant().is_ok_and(|det| det > 0.0))
            .cloned()
            .collect();
        let kind = match self.kind {
            GroupKind::IcosahedralFull | GroupKind::IcosahedralRotation => GroupKind::IcosahedralRotation,
            _ => GroupKind::Custom,
        };
        FiniteGroup { dimension: self.dimension, elements, kind }
    }

    /// Checks identity membership, orthogonality, uniqueness and closure of
    /// products among the first few elements against the whole group.
    pub fn check_invariants(&self) -> Result<()> {
        let mut index: HashMap<Vec<i64>, usize> = HashMap::new();
        for (i, u) in self.elements.iter().enumerate() {
            if u.orthogonality_defect() >= ORTHOGONALITY_TOL {
                return Err(Error::Consistency(format!("element {i} is not orthogonal")));
            }
            if index.insert(dedup_key(u), i).is_some() {
                return Err(Error::Consistency(format!("element {i} is a duplicate")));
            }
        }
        if !index.contains_key(&dedup_key(&Matrix::identity(self.dimension))) {
            return Err(Error::Consistency("group does not contain the identity".into()));
        }
        let probe = self.elements.len().min(16);
        for a in &self.elements[..probe] {
            for b in &self.elements {
                if !index.contains_key(&dedup_key(&a.mul_unchecked(b))) {
                    return Err(Error::Consistency("group is not closed under products".into()));
                }
            }
        }
        Ok(())
    }

    /// Molien coefficients `c_0..c_{max_degree}`.
    pub fn molien_series(&self, max_degree: usize) -> Result<MolienSeries> {
        molien_series(self, max_degree)
    }

    pub fn max_frame_order(&self, p_max: u32) -> Result<u32> {
        max_frame_order(self, p_max)
    }
}

// Coefficients of 1/det(I - tU) up to t^max_degree.
fn inverse_char_series(u: &Matrix, max_degree: usize) -> Vec<f64> {
    let d = u.rows();
    // Power sums of the eigenvalues: tr(U^k).
    let mut traces = Vec::with_capacity(d);
    let mut power = u.clone();
    traces.push(power.trace());
    for _ in 1..d {
        power = power.mul_unchecked(u);
        traces.push(power.trace());
    }
    // Newton's identities: k e_k = Σ_{i=1..k} (-1)^(i-1) e_{k-i} p_i.
    let mut e = vec![1.0; d + 1];
    for k in 1..=d {
        let mut s = 0.0;
        for i in 1..=k {
            let sign = if i % 2 == 1 { 1.0 } else { -1.0 };
            s += sign * e[k - i] * traces[i - 1];
        }
        e[k] = s / k as f64;
    }
    // det(I - tU) = Σ (-1)^k e_k t^k; invert the series.
    let a: Vec<f64> = (0..=d).map(|k| if k % 2 == 0 { e[k] } else { -e[k] }).collect();
    let mut b = vec![0.0; max_degree + 1];
    b[0] = 1.0;
    for n in 1..=max_degree {
        let mut s = 0.0;
        for k in 1..=n.min(d) {
            s += a[k] * b[n - k];
        }
        b[n] = -s;
    }
    b
}

/// Molien series `(1/|G|) Σ_U 1/det(I - tU)` through degree `max_degree`,
/// rounded to integers with a residual check.
pub fn molien_series(group: &FiniteGroup, max_degree: usize) -> Result<MolienSeries> {
    if max_degree > MAX_MOLIEN_DEGREE {
        return Err(domain(format!("Molien degree must be <= {MAX_MOLIEN_DEGREE}, got {max_degree}")));
    }
    let per_element: Vec<Vec<f64>> = group
        .elements
        .par_iter()
        .map(|u| inverse_char_series(u, max_degree))
        .collect();
    let n = group.order() as f64;
    let mut coefficients = Vec::with_capacity(max_degree + 1);
    for k in 0..=max_degree {
        let column: Vec<f64> = per_element.iter().map(|s| s[k]).collect();
        let avg = pairwise_sum(&column) / n;
        let rounded = avg.round();
        let residual = (avg - rounded).abs();
        if residual >= MOLIEN_RESIDUAL_TOL || rounded < 0.0 {
            return Err(Error::Numerical(format!(
                "Molien coefficient {k} is {avg}, not a nonnegative integer (residual {residual:.3e}); input is probably not a group"
            )));
        }
        coefficients.push(rounded as u64);
    }
    Ok(MolienSeries { coefficients })
}

/// Largest `p <= p_max` such that the only invariants of degree `2q`,
/// `q <= p`, are multiples of `|x|^{2q}`. Zero for reducible groups.
pub fn max_frame_order(group: &FiniteGroup, p_max: u32) -> Result<u32> {
    if p_max > MAX_FRAME_ORDER_P {
        return Err(domain(format!("p_max must be <= {MAX_FRAME_ORDER_P}, got {p_max}")));
    }
    let series = molien_series(group, 2 * p_max.max(1) as usize)?;
    let mut p = 0;
    for q in 1..=p_max {
        if series.coefficients[2 * q as usize] != 1 {
            break;
        }
        p = q;
    }
    Ok(p)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn series(kind: GroupKind, k: usize) -> Vec<u64> {
        build_group(kind).unwrap().molien_series(k).unwrap().coefficients
    }

    #[test]
    fn catalog_orders() {
        assert_eq!(build_group(GroupKind::Dihedral(5)).unwrap().order(), 10);
        assert_eq!(build_group(GroupKind::Dihedral(12)).unwrap().order(), 24);
        assert_eq!(build_group(GroupKind::Hyperoctahedral(3)).unwrap().order(), 48);
        assert_eq!(build_group(GroupKind::Hyperoctahedral(4)).unwrap().order(), 384);
        assert_eq!(build_group(GroupKind::Simplex(3)).unwrap().order(), 24);
        assert_eq!(build_group(GroupKind::Simplex(4)).unwrap().order(), 120);
        assert_eq!(build_group(GroupKind::IcosahedralFull).unwrap().order(), 120);
        let rot = build_group(GroupKind::IcosahedralRotation).unwrap();
        assert_eq!(rot.order(), 60);
        assert!(rot.elements().iter().all(|u| (u.determinant().unwrap() - 1.0).abs() < 1e-12));
        let sub = build_group(GroupKind::IcosahedralFull).unwrap().rotation_subgroup();
        assert_eq!(sub.order(), 60);
    }

    #[test]
    fn catalog_invariants_and_idempotence() {
        for kind in [
            GroupKind::Dihedral(7),
            GroupKind::Hyperoctahedral(3),
            GroupKind::Simplex(3),
            GroupKind::IcosahedralFull,
            GroupKind::IcosahedralRotation,
        ] {
            let g = build_group(kind).unwrap();
            g.check_invariants().unwrap();
            assert_eq!(closure(g.elements(), DEFAULT_ELEMENT_CAP).unwrap().order(), g.order(), "{kind}");
        }
    }

    #[test]
    fn closure_examples() {
        assert_eq!(closure(&[Matrix::identity(2)], 10).unwrap().order(), 1);
        let r7 = Matrix::rotation2(2.0 * std::f64::consts::PI / 7.0);
        assert_eq!(closure(&[r7], 10).unwrap().order(), 7);
        let err = closure(&[Matrix::rotation2(1.0)], 10_000).unwrap_err();
        assert!(matches!(err, Error::Resource(_)));
        assert!(closure(&[Matrix::diag(&[2.0, 1.0]).unwrap()], 10).is_err());
    }

    #[test]
    fn bad_catalog_parameters() {
        assert!(build_group(GroupKind::Dihedral(2)).is_err());
        assert!(build_group(GroupKind::Hyperoctahedral(1)).is_err());
        assert!(build_group(GroupKind::Simplex(1)).is_err());
    }

    #[test]
    fn molien_examples() {
        assert_eq!(series(GroupKind::Dihedral(4), 4), vec![1, 0, 1, 0, 2]);
        assert_eq!(series(GroupKind::Dihedral(5), 10), vec![1, 0, 1, 0, 1, 1, 1, 1, 1, 1, 2]);
        let trivial = closure(&[Matrix::identity(2)], 10).unwrap();
        assert_eq!(trivial.molien_series(2).unwrap().coefficients, vec![1, 2, 3]);
        // Degrees 2, 6, 10 generate the icosahedral rotation invariants.
        assert_eq!(series(GroupKind::IcosahedralRotation, 8), vec![1, 0, 1, 0, 1, 0, 2, 0, 2]);
        assert_eq!(series(GroupKind::Hyperoctahedral(3), 6), vec![1, 0, 1, 0, 2, 0, 3]);
        assert!(build_group(GroupKind::Dihedral(3)).unwrap().molien_series(65).is_err());
    }

    // Brute force: dimension of invariant polynomials of degree k in two
    // variables, as the rank of the group-averaged monomial basis.
    fn invariant_dim_2d(g: &FiniteGroup, k: usize) -> u64 {
        let pts: Vec<(f64, f64)> = (0..=2 * k + 3)
            .map(|i| {
                let t = 0.37 + 1.1 * i as f64;
                (t.cos() * (1.0 + 0.1 * i as f64), t.sin())
            })
            .collect();
        // Row j: averaged monomial x^j y^(k-j) evaluated at the sample points.
        let mut rows: Vec<Vec<f64>> = (0..=k)
            .map(|j| {
                pts.iter()
                    .map(|&(x, y)| {
                        g.elements()
                            .iter()
                            .map(|u| {
                                let ux = u[(0, 0)] * x + u[(0, 1)] * y;
                                let uy = u[(1, 0)] * x + u[(1, 1)] * y;
                                ux.powi(j as i32) * uy.powi((k - j) as i32)
                            })
                            .sum::<f64>()
                            / g.order() as f64
                    })
                    .collect()
            })
            .collect();
        let cols = rows[0].len();
        let mut rank = 0;
        for c in 0..cols {
            let pivot = (rank..rows.len()).max_by(|&a, &b| rows[a][c].abs().total_cmp(&rows[b][c].abs()));
            let Some(pivot) = pivot else { break };
            if rows[pivot][c].abs() < 1e-8 {
                continue;
            }
            rows.swap(rank, pivot);
            for r in 0..rows.len() {
                if r != rank {
                    let f = rows[r][c] / rows[rank][c];
                    for cc in 0..cols {
                        rows[r][cc] -= f * rows[rank][cc];
                    }
                }
            }
            rank += 1;
        }
        rank as u64
    }

    #[test]
    fn molien_matches_brute_force_invariants() {
        for n in [3, 4, 5, 6] {
            let g = build_group(GroupKind::Dihedral(n)).unwrap();
            let s = g.molien_series(8).unwrap();
            for k in 0..=8 {
                assert_eq!(s.coefficients[k], invariant_dim_2d(&g, k), "dihedral {n} degree {k}");
            }
        }
    }

    #[test]
    fn max_frame_order_examples() {
        let mfo = |k| build_group(k).unwrap().max_frame_order(8).unwrap();
        assert_eq!(mfo(GroupKind::Dihedral(4)), 1);
        assert_eq!(mfo(GroupKind::Dihedral(5)), 4);
        assert_eq!(mfo(GroupKind::IcosahedralFull), 2);
        assert_eq!(mfo(GroupKind::Hyperoctahedral(3)), 1);
        let reducible = closure(&[Matrix::diag(&[1.0, -1.0]).unwrap()], 10).unwrap();
        assert_eq!(reducible.max_frame_order(4).unwrap(), 0);
        assert!(build_group(GroupKind::Dihedral(3)).unwrap().max_frame_order(17).is_err());
    }

    #[test]
    fn dihedral_frame_orders() {
        for n in 3usize..=10 {
            let expected = if n % 2 == 1 { n - 1 } else { n.div_ceil(2) - 1 };
            let got = build_group(GroupKind::Dihedral(n)).unwrap().max_frame_order(16).unwrap();
            assert_eq!(got as usize, expected, "dihedral {n}");
        }
    }

    #[test]
    fn molien_bounded_by_trivial_group() {
        let trivial3 = closure(&[Matrix::identity(3)], 10).unwrap().molien_series(8).unwrap();
        for kind in [GroupKind::Hyperoctahedral(3), GroupKind::Simplex(3), GroupKind::IcosahedralFull] {
            let s = build_group(kind).unwrap().molien_series(8).unwrap();
            for (a, b) in s.coefficients.iter().zip(&trivial3.coefficients) {
                assert!(a <= b);
            }
        }
    }

    #[test]
    fn parses_names() {
        assert_eq!("dihedral:7".parse::<GroupKind>().unwrap(), GroupKind::Dihedral(7));
        assert_eq!("icosahedral:rot".parse::<GroupKind>().unwrap(), GroupKind::IcosahedralRotation);
        assert_eq!("icosahedral".parse::<GroupKind>().unwrap(), GroupKind::IcosahedralFull);
        assert_eq!(GroupKind::Simplex(3).to_string().parse::<GroupKind>().unwrap(), GroupKind::Simplex(3));
        assert!("dihedral".parse::<GroupKind>().is_err());
        assert!("cube:3".parse::<GroupKind>().is_err());
    }

    #[test]
    fn polynomial_string() {
        let s = MolienSeries { coefficients: vec![1, 0, 1, 1, 2] };
        assert_eq!(s.to_polynomial_string(), "2*t^4 + t^3 + t^2 + 1");
    }

    #[test]
    fn custom_json_group() {
        let g = FiniteGroup::from_generators_json("[[[0,1],[1,0]]]", "g.json").unwrap();
        assert_eq!(g.order(), 2);
        assert_eq!(g.kind(), GroupKind::Custom);
        assert!(FiniteGroup::from_generators_json("[[[0,1],[1]]]", "g.json").is_err());
    }
}
