//! The frame constant `F_p(s²(T))` and tight-frame checks.
//!
//! For a finite group `G` admitting `p`-frames, every unit vector `x`
//! satisfies `(1/|G|) Σ_U |TUx|^{2p} = F_p(s²(T))`. The constant has two
//! exact expressions, one in the monomial basis and one through the cycle
//! index of `S_p`; [`fp_exact`] evaluates both and insists they agree.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::groups::{FiniteGroup, GroupKind};
use crate::linalg::{
    outer_gram, squared_singular_values, trace_matrix_function, Matrix, SchattenMethod,
    SchattenProfile,
};
use crate::numeric::{factorial, pairwise_sum, rel_diff, rising_factorial, rising_factorial_half_dim};
use crate::symfunc::{gaussian_moment_cycle, gaussian_moment_monomial, halved_cycle_index, Scalar};

pub const MAX_EXACT_P: u32 = 16;
pub const MC_MIN_SAMPLES: usize = 10_000;
pub const MC_BATCH: usize = 10_000;
pub const SPHERE_NODES: usize = 4096;
pub const DEFAULT_VERIFY_TOL: f64 = 1e-9;
/// Largest relative gap tolerated between the exact and trace-power routes.
pub const ROUTE_AGREEMENT_TOL: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FrameMethod {
    Monomial,
    Cycle,
    MonteCarlo,
    Sphere2d,
    Orbit,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FrameConstant {
    pub p: f64,
    pub d: usize,
    pub value: f64,
    pub method: FrameMethod,
    /// Standard error for Monte-Carlo estimates.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub std_error: Option<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Tight,
    NotTight,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FrameVerification {
    pub group: GroupKind,
    pub transform: Matrix,
    pub p: u32,
    pub trials: usize,
    pub seed: u64,
    pub tolerance: f64,
    /// `F_p(s²(T))`, the value every orbit average must hit.
    pub reference: f64,
    pub orbit_min: f64,
    pub orbit_max: f64,
    pub max_deviation: f64,
    pub verdict: Verdict,
}

fn check_order(p: u32) -> Result<()> {
    if !(1..=MAX_EXACT_P).contains(&p) {
        return Err(domain(format!("frame order must be in 1..={MAX_EXACT_P}, got {p}")));
    }
    Ok(())
}

// 2^p (d/2)_p, the Gaussian normalization of the frame constant.
fn gaussian_normalizer(d: usize, p: u32) -> BigRational {
    let half_d = BigRational::new(BigInt::from(d), BigInt::from(2));
    rising_factorial(&half_d, p) * BigRational::from_integer(num_traits::pow(BigInt::from(2), p as usize))
}

/// `p!/(4^p (d/2)_p) Σ_λ Π_k C(2k,k) m_λ(s²)`.
pub fn fp_monomial<S: Scalar>(s2: &[S], p: u32) -> Result<S> {
    let norm = gaussian_normalizer(s2.len(), p);
    let inv = S::from_rational(&(BigRational::from_integer(BigInt::from(1)) / norm));
    Ok(gaussian_moment_monomial(s2, p)? * inv)
}

/// `p!/(d/2)_p Z(S_p; p_1(s²)/2, p_2(s²)/2, ...)`.
pub fn fp_cycle<S: Scalar>(s2: &[S], p: u32) -> Result<S> {
    let norm = gaussian_normalizer(s2.len(), p);
    let inv = S::from_rational(&(BigRational::from_integer(BigInt::from(1)) / norm));
    Ok(gaussian_moment_cycle(s2, p)? * inv)
}

/// Exact `F_p(s²)` for rational `s²`, checked across both bases.
pub fn fp_exact(s2: &[BigRational], p: u32) -> Result<BigRational> {
    check_order(p)?;
    if s2.is_empty() {
        return Err(domain("frame constant needs at least one squared singular value"));
    }
    if s2.iter().any(|v| v < &BigRational::zero()) {
        return Err(domain("squared singular values must be nonnegative"));
    }
    let mono = fp_monomial(s2, p)?;
    let cycle = fp_cycle(s2, p)?;
    if mono != cycle {
        return Err(Error::Consistency(format!(
            "F_{p}: monomial route {mono} differs from cycle-index route {cycle}"
        )));
    }
    Ok(cycle)
}

/// [`fp_exact`] on floats, each converted to the rational it represents.
pub fn fp_exact_from_floats(s2: &[f64], p: u32) -> Result<BigRational> {
    let exact = s2
        .iter()
        .map(|&v| BigRational::from_float(v).ok_or_else(|| domain(format!("non-finite value {v}"))))
        .collect::<Result<Vec<_>>>()?;
    fp_exact(&exact, p)
}

/// `F_p` from the trace powers `tr((TᵀT)^k)` alone, with no eigenvalues.
pub fn fp_trace_power(t: &Matrix, p: u32) -> Result<f64> {
    check_order(p)?;
    let profile = SchattenProfile::compute(t, p, SchattenMethod::TracePower)?;
    let z = halved_cycle_index(p)?.eval_with_power_sums(&profile.power_sums())?;
    let scale = BigRational::from_integer(factorial(p)) / rising_factorial(
        &BigRational::new(BigInt::from(t.cols()), BigInt::from(2)),
        p,
    );
    Ok(z * scale.to_f64().unwrap_or(f64::NAN))
}

/// `F_p(s²(T))` for a matrix with `d` columns, possibly rectangular.
///
/// The exact route on the computed squared singular values is compared with
/// the trace-power route; they must agree to [`ROUTE_AGREEMENT_TOL`].
pub fn fp_from_matrix(t: &Matrix, p: u32) -> Result<FrameConstant> {
    check_order(p)?;
    let s2 = squared_singular_values(t)?;
    let exact = fp_exact_from_floats(&s2, p)?.to_f64().unwrap_or(f64::NAN);
    let traced = fp_trace_power(t, p)?;
    let gap = rel_diff(exact, traced);
    if gap > ROUTE_AGREEMENT_TOL && (exact - traced).abs() > f64::MIN_POSITIVE {
        return Err(Error::Consistency(format!(
            "F_{p}: spectral value {exact} and trace-power value {traced} differ by {gap:.3e} relative"
        )));
    }
    Ok(FrameConstant {
        p: p as f64,
        d: t.cols(),
        value: exact,
        method: FrameMethod::Cycle,
        std_error: None,
    })
}

/// Monte-Carlo estimates of `E|TX|^{2p} / (2^p (d/2)_p)` for several `p`
/// sharing one Gaussian sample. Returns `(estimate, standard error)` per `p`.
///
/// Samples are drawn in batches of [`MC_BATCH`]; batch `b` uses stream `b` of
/// a ChaCha8 generator seeded with `seed`, and batch sums are combined in a
/// fixed pairwise order, so the result does not depend on thread count.
pub fn fp_montecarlo_multi(t: &Matrix, ps: &[f64], samples: usize, seed: u64) -> Result<Vec<(f64, f64)>> {
    if samples < MC_MIN_SAMPLES {
        return Err(domain(format!("Monte-Carlo needs at least {MC_MIN_SAMPLES} samples, got {samples}")));
    }
    if let Some(p) = ps.iter().find(|p| !(p.is_finite() && **p > 0.0)) {
        return Err(domain(format!("frame order must be a positive real, got {p}")));
    }
    let d = t.cols();
    let n_batches = samples.div_ceil(MC_BATCH);
    // Per batch and per p: (Σ v, Σ v²).
    let batch_sums: Vec<Vec<(f64, f64)>> = (0..n_batches)
        .into_par_iter()
        .map(|b| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(b as u64);
            let count = MC_BATCH.min(samples - b * MC_BATCH);
            let mut x = vec![0.0; d];
            let mut values: Vec<Vec<f64>> = vec![Vec::with_capacity(count); ps.len()];
            for _ in 0..count {
                for xi in x.iter_mut() {
                    *xi = StandardNormal.sample(&mut rng);
                }
                let r2: f64 = (0..t.rows())
                    .map(|i| {
                        let yi: f64 = t.row(i).iter().zip(&x).map(|(a, b)| a * b).sum();
                        yi * yi
                    })
                    .sum();
                for (slot, &p) in values.iter_mut().zip(ps) {
                    slot.push(r2.powf(p));
                }
            }
            values
                .iter()
                .map(|v| {
                    let sq: Vec<f64> = v.iter().map(|a| a * a).collect();
                    (pairwise_sum(v), pairwise_sum(&sq))
                })
                .collect()
        })
        .collect();

    let n = samples as f64;
    Ok(ps
        .iter()
        .enumerate()
        .map(|(j, &p)| {
            let s1: Vec<f64> = batch_sums.iter().map(|b| b[j].0).collect();
            let s2: Vec<f64> = batch_sums.iter().map(|b| b[j].1).collect();
            let mean = pairwise_sum(&s1) / n;
            let var = ((pairwise_sum(&s2) / n - mean * mean) * n / (n - 1.0)).max(0.0);
            let norm = 2f64.powf(p) * rising_factorial_half_dim(d, p);
            (mean / norm, (var / n).sqrt() / norm)
        })
        .collect())
}

/// Single-order form of [`fp_montecarlo_multi`].
pub fn fp_montecarlo(t: &Matrix, p: f64, samples: usize, seed: u64) -> Result<(f64, f64)> {
    Ok(fp_montecarlo_multi(t, &[p], samples, seed)?[0])
}

/// `(1/2π) ∫ (s₁ cos²θ + s₂ sin²θ)^p dθ` by the trapezoid rule on
/// [`SPHERE_NODES`] nodes. Any real `p > 0`.
pub fn fp_sphere_2d(s2: [f64; 2], p: f64) -> Result<f64> {
    if s2.iter().any(|v| !v.is_finite() || *v < 0.0) {
        return Err(domain(format!("squared singular values must be finite and >= 0, got {s2:?}")));
    }
    if !(p.is_finite() && p > 0.0) {
        return Err(domain(format!("frame order must be a positive real, got {p}")));
    }
    let step = 2.0 * std::f64::consts::PI / SPHERE_NODES as f64;
    let values: Vec<f64> = (0..SPHERE_NODES)
        .map(|k| {
            let (s, c) = (k as f64 * step).sin_cos();
            (s2[0] * c * c + s2[1] * s * s).powf(p)
        })
        .collect();
    Ok(pairwise_sum(&values) / SPHERE_NODES as f64)
}

/// `(1/|G|) Σ_U |TUx|^{2p}` for a unit vector `x`.
pub fn orbit_average(group: &FiniteGroup, t: &Matrix, x: &[f64], p: u32) -> Result<f64> {
    let d = group.dimension();
    if t.cols() != d || x.len() != d {
        return Err(domain(format!(
            "dimension mismatch: group acts on R^{d}, T has {} columns, x has length {}",
            t.cols(),
            x.len()
        )));
    }
    let norm2: f64 = x.iter().map(|v| v * v).sum();
    if (norm2.sqrt() - 1.0).abs() > 1e-12 {
        return Err(domain(format!("x must be a unit vector, |x| = {}", norm2.sqrt())));
    }
    let terms: Vec<f64> = group
        .elements()
        .par_iter()
        .map(|u| {
            let ux = u.apply(x).expect("dimensions checked");
            let y = t.apply(&ux).expect("dimensions checked");
            y.iter().map(|v| v * v).sum::<f64>().powi(p as i32)
        })
        .collect();
    Ok(pairwise_sum(&terms) / group.order() as f64)
}

/// Seeded Gaussian directions normalized to the unit sphere.
pub fn random_unit_vectors(d: usize, count: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| loop {
            let v: Vec<f64> = (0..d).map(|_| StandardNormal.sample(&mut rng)).collect();
            let n = v.iter().map(|a| a * a).sum::<f64>().sqrt();
            if n > 1e-8 {
                break v.into_iter().map(|a| a / n).collect();
            }
        })
        .collect()
}

/// Compares orbit averages at `trials` random unit vectors with
/// `F_p(s²(T))`; tight iff the largest relative deviation is below `tol`.
pub fn verify_tight_frame(
    group: &FiniteGroup,
    t: &Matrix,
    p: u32,
    trials: usize,
    tol: f64,
    seed: u64,
) -> Result<FrameVerification> {
    if trials < 10 {
        return Err(domain(format!("verification needs at least 10 trials, got {trials}")));
    }
    let reference = fp_from_matrix(t, p)?.value;
    let mut orbit_min = f64::INFINITY;
    let mut orbit_max = f64::NEG_INFINITY;
    let mut max_deviation: f64 = 0.0;
    for x in random_unit_vectors(group.dimension(), trials, seed) {
        let avg = orbit_average(group, t, &x, p)?;
        orbit_min = orbit_min.min(avg);
        orbit_max = orbit_max.max(avg);
        max_deviation = max_deviation.max(rel_diff(avg, reference));
    }
    Ok(FrameVerification {
        group: group.kind(),
        transform: t.clone(),
        p,
        trials,
        seed,
        tolerance: tol,
        reference,
        orbit_min,
        orbit_max,
        max_deviation,
        verdict: if max_deviation < tol { Verdict::Tight } else { Verdict::NotTight },
    })
}

/// `(‖T‖₂^{2p}/d^p, ‖T‖_{2p}^{2p}/d)`, which bracket `F_p(s²(T))`.
pub fn nontight_sandwich(t: &Matrix, p: u32) -> Result<(f64, f64)> {
    if p == 0 {
        return Err(domain("sandwich needs p >= 1"));
    }
    let d = t.cols() as f64;
    let sums = SchattenProfile::compute(t, p, SchattenMethod::TracePower)?.power_sums();
    Ok(((sums[0] / d).powi(p as i32), sums[p as usize - 1] / d))
}

/// `(1/d) tr φ₁(t T⁻¹T⁻ᵀ) - φ₂((t/d) tr T⁻¹T⁻ᵀ)`.
pub fn multiplier_transform(
    phi1: impl Fn(f64) -> f64,
    phi2: impl Fn(f64) -> f64,
    t_matrix: &Matrix,
    t: f64,
) -> Result<f64> {
    if !(t.is_finite() && t >= 0.0) {
        return Err(domain(format!("multiplier argument must be finite and >= 0, got {t}")));
    }
    let inv = t_matrix.inverse()?;
    let g = outer_gram(&inv);
    let d = g.rows() as f64;
    let first = trace_matrix_function(&g.scale(t), phi1)? / d;
    let second = phi2(t * g.trace() / d);
    if !second.is_finite() {
        return Err(domain("second multiplier is undefined at the requested point"));
    }
    Ok(first - second)
}
