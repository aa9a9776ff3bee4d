//! Small numerical helpers shared across modules.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

/// Sum with pairwise (cascade) reduction. The result depends only on the
/// order of `values`, never on how work was scheduled.
pub fn pairwise_sum(values: &[f64]) -> f64 {
    const LEAF: usize = 16;
    if values.len() <= LEAF {
        return values.iter().sum();
    }
    let mid = values.len() / 2;
    pairwise_sum(&values[..mid]) + pairwise_sum(&values[mid..])
}

pub fn factorial(n: u32) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, k| acc * BigInt::from(k))
}

pub fn binomial(n: u32, k: u32) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    num_integer::binomial(BigInt::from(n), BigInt::from(k))
}

/// Rising factorial `(x)_n = x (x+1) ... (x+n-1)` in exact arithmetic.
pub fn rising_factorial(x: &BigRational, n: u32) -> BigRational {
    let mut acc = BigRational::one();
    let mut term = x.clone();
    for _ in 0..n {
        acc *= &term;
        term += BigRational::one();
    }
    acc
}

/// `(d/2)_p` for real `p`, via log-gamma. Exact product when `p` is integral.
pub fn rising_factorial_half_dim(d: usize, p: f64) -> f64 {
    let x = d as f64 / 2.0;
    if p.fract() == 0.0 && (0.0..=170.0).contains(&p) {
        let mut acc = 1.0;
        for k in 0..p as u32 {
            acc *= x + k as f64;
        }
        return acc;
    }
    (statrs::function::gamma::ln_gamma(x + p) - statrs::function::gamma::ln_gamma(x)).exp()
}

/// `Γ(n/2)` for a positive integer `n`, exactly up to the final rounding.
pub fn gamma_half_integer(n: u32) -> f64 {
    assert!(n > 0, "gamma_half_integer needs n > 0");
    if n.is_multiple_of(2) {
        // Γ(m) = (m-1)!
        (1..n / 2).map(|k| k as f64).product()
    } else {
        // Γ(m + 1/2) = (2m)! √π / (4^m m!)
        let m = (n - 1) / 2;
        let mut acc = std::f64::consts::PI.sqrt();
        for k in 0..m {
            acc *= k as f64 + 0.5;
        }
        acc
    }
}

/// Gauss–Legendre nodes and weights on `[0, 1]`, exact for polynomials of
/// degree `2n - 1`.
pub fn gauss_legendre_unit(n: usize) -> Vec<(f64, f64)> {
    assert!(n >= 1);
    let mut rule = Vec::with_capacity(n);
    for i in 0..n {
        // Tricomi initial guess, then Newton on P_n.
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, x);
        if d != 0.0 {
            dp = d;
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        rule.push(((1.0 - x) / 2.0, w / 2.0));
    }
    rule
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    let p = if n == 0 { 1.0 } else { p1 };
    let d = n as f64 * (x * p - p0) / (x * x - 1.0);
    (p, d)
}

/// Relative difference `|a - b| / max(|a|, |b|, floor)`.
pub fn rel_diff(a: f64, b: f64) -> f64 {
    let scale = a.abs().max(b.abs()).max(f64::MIN_POSITIVE);
    (a - b).abs() / scale
}
