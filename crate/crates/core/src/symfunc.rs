//! Partitions and symmetric functions in the power-sum basis.
//!
//! Coefficients are exact rationals. Evaluation is generic over [`Scalar`], so
//! the same expansion can be evaluated exactly at rational points or in
//! floating point.
//!
//! The text form of a [`SymFuncExpansion`] follows the usual computer-algebra
//! layout, e.g. the cycle index of `S_4` after halving every power sum prints
//! as
//!
//! ```text
//! 1/384*p[1,1,1,1] + 1/32*p[2,1,1] + 1/32*p[2,2] + 1/12*p[3,1] + 1/8*p[4]
//! ```

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{domain, Error, Result};
use crate::numeric::{binomial, factorial};

/// Largest degree accepted by the partition-indexed operations.
pub const MAX_DEGREE: u32 = 64;

/// Field elements the expansions can be evaluated in.
pub trait Scalar:
    Clone + Zero + One + PartialOrd + Add<Output = Self> + Sub<Output = Self> + Mul<Output = Self>
{
    fn from_rational(r: &BigRational) -> Self;

    /// Equality used by the cross-route checks: exact for rationals, a tight
    /// relative tolerance for floats.
    fn agrees_with(&self, other: &Self) -> bool;
}

impl Scalar for f64 {
    fn from_rational(r: &BigRational) -> Self {
        r.to_f64().unwrap_or(f64::NAN)
    }

    fn agrees_with(&self, other: &Self) -> bool {
        let scale = self.abs().max(other.abs());
        (self - other).abs() <= 1e-12 * scale
    }
}

impl Scalar for BigRational {
    fn from_rational(r: &BigRational) -> Self {
        r.clone()
    }

    fn agrees_with(&self, other: &Self) -> bool {
        self == other
    }
}

/// A weakly decreasing sequence of positive integers.
///
/// The derived ordering is ascending lexicographic on the parts, which is the
/// order terms are printed in.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Partition {
    parts: Vec<u32>,
}

impl Partition {
    /// Builds a partition from parts in any order; zero parts are rejected.
    pub fn new(mut parts: Vec<u32>) -> Result<Self> {
        if parts.is_empty() {
            return Err(domain("a partition needs at least one part"));
        }
        if parts.contains(&0) {
            return Err(domain("partition parts must be >= 1"));
        }
        parts.sort_unstable_by(|a, b| b.cmp(a));
        Ok(Self { parts })
    }

    pub fn parts(&self) -> &[u32] {
        &self.parts
    }

    /// The integer being partitioned.
    pub fn degree(&self) -> u32 {
        self.parts.iter().sum()
    }

    /// Number of parts.
    pub fn len(&self) -> usize {
        self.parts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }

    /// Distinct part values (decreasing) with their multiplicities.
    pub fn multiplicities(&self) -> Vec<(u32, u32)> {
        let mut out: Vec<(u32, u32)> = Vec::new();
        for &k in &self.parts {
            match out.last_mut() {
                Some((v, c)) if *v == k => *c += 1,
                _ => out.push((k, 1)),
            }
        }
        out
    }

    /// Number of permutations of `S_p` with this cycle type,
    /// `p! / Π k^{j_k} j_k!`.
    pub fn class_size(&self) -> BigInt {
        factorial(self.degree()) / self.centralizer_order()
    }

    /// `Π k^{j_k} j_k!`.
    pub fn centralizer_order(&self) -> BigInt {
        self.multiplicities()
            .into_iter()
            .fold(BigInt::one(), |acc, (k, j)| {
                acc * num_traits::pow(BigInt::from(k), j as usize) * factorial(j)
            })
    }
}

impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, k) in self.parts.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{k}")?;
        }
        write!(f, "]")
    }
}

fn check_degree(p: u32) -> Result<()> {
    if p == 0 || p > MAX_DEGREE {
        return Err(domain(format!("degree must lie in 1..={MAX_DEGREE}, got {p}")));
    }
    Ok(())
}

/// All partitions of `p` in decreasing lexicographic order.
pub fn enumerate_partitions(p: u32) -> Result<Vec<Partition>> {
    check_degree(p)?;
    let mut out = Vec::new();
    let mut current = Vec::with_capacity(p as usize);
    fill_partitions(p, p, &mut current, &mut out);
    Ok(out)
}

fn fill_partitions(remaining: u32, max_part: u32, current: &mut Vec<u32>, out: &mut Vec<Partition>) {
    if remaining == 0 {
        out.push(Partition { parts: current.clone() });
        return;
    }
    for k in (1..=max_part.min(remaining)).rev() {
        current.push(k);
        fill_partitions(remaining - k, k, current, out);
        current.pop();
    }
}

/// A homogeneous symmetric function of fixed degree, expanded in the
/// power-sum basis `p_λ` with exact rational coefficients.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SymFuncExpansion {
    degree: u32,
    terms: BTreeMap<Partition, BigRational>,
}

impl SymFuncExpansion {
    pub fn zero(degree: u32) -> Self {
        Self { degree, terms: BTreeMap::new() }
    }

    /// Builds an expansion, merging repeated keys and dropping zero terms.
    pub fn from_terms(
        degree: u32,
        terms: impl IntoIterator<Item = (Partition, BigRational)>,
    ) -> Result<Self> {
        let mut out = Self::zero(degree);
        for (lambda, c) in terms {
            out.add_term(lambda, c)?;
        }
        Ok(out)
    }

    fn add_term(&mut self, lambda: Partition, c: BigRational) -> Result<()> {
        if lambda.degree() != self.degree {
            return Err(domain(format!(
                "term {lambda} has degree {}, expansion has degree {}",
                lambda.degree(),
                self.degree
            )));
        }
        let entry = self.terms.entry(lambda).or_insert_with(BigRational::zero);
        *entry += c;
        if entry.is_zero() {
            self.terms.retain(|_, v| !v.is_zero());
        }
        Ok(())
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn coefficient(&self, lambda: &Partition) -> BigRational {
        self.terms.get(lambda).cloned().unwrap_or_else(BigRational::zero)
    }

    /// Terms in ascending lexicographic order of the partition.
    pub fn terms(&self) -> impl Iterator<Item = (&Partition, &BigRational)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Sum of all coefficients, i.e. the value at a single variable equal to 1.
    pub fn coefficient_sum(&self) -> BigRational {
        self.terms.values().fold(BigRational::zero(), |acc, c| acc + c)
    }

    /// Evaluates with the power sums supplied directly: `power_sums[k-1] = p_k`.
    pub fn eval_with_power_sums<S: Scalar>(&self, power_sums: &[S]) -> Result<S> {
        if power_sums.len() < self.max_part() as usize {
            return Err(domain(format!(
                "need power sums up to order {}, got {}",
                self.max_part(),
                power_sums.len()
            )));
        }
        let mut acc = S::zero();
        for (lambda, c) in &self.terms {
            let term = lambda
                .parts()
                .iter()
                .fold(S::from_rational(c), |t, &k| t * power_sums[k as usize - 1].clone());
            acc = acc + term;
        }
        Ok(acc)
    }

    fn max_part(&self) -> u32 {
        self.terms.keys().map(|l| l.parts()[0]).max().unwrap_or(0)
    }
}

impl fmt::Display for SymFuncExpansion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (lambda, c)) in self.terms.iter().enumerate() {
            let magnitude = c.abs();
            match (i, c.is_negative()) {
                (0, true) => write!(f, "-")?,
                (0, false) => {}
                (_, true) => write!(f, " - ")?,
                (_, false) => write!(f, " + ")?,
            }
            if magnitude.is_one() {
                write!(f, "p{lambda}")?;
            } else {
                write!(f, "{magnitude}*p{lambda}")?;
            }
        }
        Ok(())
    }
}

impl FromStr for SymFuncExpansion {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let compact: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        let bad = |msg: &str| Error::Parse {
            source_name: "expansion".into(),
            line: 1,
            message: format!("{msg} in {s:?}"),
        };
        if compact == "0" {
            return Err(bad("the zero expansion has no degree"));
        }
        // Split into signed terms at '+'/'-' outside brackets.
        let mut pieces: Vec<(bool, String)> = Vec::new();
        let mut depth = 0i32;
        let mut negative = false;
        let mut current = String::new();
        for ch in compact.chars() {
            match ch {
                '[' => {
                    depth += 1;
                    current.push(ch);
                }
                ']' => {
                    depth -= 1;
                    current.push(ch);
                }
                '+' | '-' if depth == 0 => {
                    if !current.is_empty() {
                        pieces.push((negative, std::mem::take(&mut current)));
                    } else if !pieces.is_empty() {
                        return Err(bad("dangling sign"));
                    }
                    negative = ch == '-';
                }
                _ => current.push(ch),
            }
        }
        if current.is_empty() {
            return Err(bad("trailing sign"));
        }
        pieces.push((negative, current));

        let mut terms = Vec::with_capacity(pieces.len());
        for (negative, piece) in pieces {
            let (coeff, basis) = match piece.split_once('*') {
                Some((c, b)) => (
                    c.parse::<BigRational>().map_err(|_| bad("bad coefficient"))?,
                    b,
                ),
                None => (BigRational::one(), piece.as_str()),
            };
            let inner = basis
                .strip_prefix("p[")
                .and_then(|r| r.strip_suffix(']'))
                .ok_or_else(|| bad("expected p[...]"))?;
            let parts = inner
                .split(',')
                .map(|t| t.parse::<u32>())
                .collect::<std::result::Result<Vec<_>, _>>()
                .map_err(|_| bad("bad partition"))?;
            let lambda = Partition::new(parts)?;
            terms.push((lambda, if negative { -coeff } else { coeff }));
        }
        let degree = terms[0].0.degree();
        Self::from_terms(degree, terms)
    }
}

/// Cycle index `Z(S_p)` in the power-sum basis: the coefficient of `p_λ` is
/// the fraction of permutations with cycle type `λ`.
pub fn cycle_index_terms(p: u32) -> Result<SymFuncExpansion> {
    let partitions = enumerate_partitions(p)?;
    let terms = partitions.into_iter().map(|lambda| {
        let c = BigRational::new(BigInt::one(), lambda.centralizer_order());
        (lambda, c)
    });
    SymFuncExpansion::from_terms(p, terms)
}

/// Alphabet scaling `S(A) -> S(qA)`: each `p_k` is multiplied by `q`, so a
/// term `p_λ` picks up `q^len(λ)`.
pub fn theta_scale(f: &SymFuncExpansion, q: &BigRational) -> Result<SymFuncExpansion> {
    if q.is_zero() {
        return Err(domain("theta scaling by zero is not invertible"));
    }
    let terms = f
        .terms()
        .map(|(lambda, c)| (lambda.clone(), c * num_traits::pow(q.clone(), lambda.len())));
    SymFuncExpansion::from_terms(f.degree(), terms)
}

/// Power sums `p_1, ..., p_max_order` of `values`.
pub fn power_sums<S: Scalar>(values: &[S], max_order: u32) -> Vec<S> {
    let mut sums = vec![S::zero(); max_order as usize];
    for v in values {
        let mut power = v.clone();
        for slot in sums.iter_mut() {
            *slot = slot.clone() + power.clone();
            power = power * v.clone();
        }
    }
    sums
}

/// Evaluates `Σ_λ c_λ p_λ(values)`.
pub fn eval_powersum<S: Scalar>(f: &SymFuncExpansion, values: &[S]) -> Result<S> {
    if values.is_empty() {
        return Err(domain("evaluation needs at least one variable"));
    }
    let sums = power_sums(values, f.degree());
    f.eval_with_power_sums(&sums)
}

/// Monomial symmetric polynomial `m_λ(values)`: the sum of all distinct
/// monomials whose exponent multiset is `λ`.
///
/// Runs a dynamic programme over the variables whose state is the multiset of
/// parts not yet assigned; each distinct monomial is one path.
pub fn eval_monomial<S: Scalar>(lambda: &Partition, values: &[S]) -> S {
    let mult = lambda.multiplicities();
    if lambda.len() > values.len() {
        return S::zero();
    }
    // Mixed-radix index over remaining multiplicities.
    let radices: Vec<usize> = mult.iter().map(|&(_, c)| c as usize + 1).collect();
    let strides: Vec<usize> = radices
        .iter()
        .scan(1usize, |acc, &r| {
            let s = *acc;
            *acc *= r;
            Some(s)
        })
        .collect();
    let n_states: usize = radices.iter().product();
    let full: usize = mult.iter().zip(&strides).map(|(&(_, c), s)| c as usize * s).sum();

    let mut dp = vec![S::zero(); n_states];
    dp[full] = S::one();
    for v in values {
        let powers: Vec<S> = mult
            .iter()
            .map(|&(k, _)| num_traits::pow(v.clone(), k as usize))
            .collect();
        let mut next = dp.clone();
        for state in 0..n_states {
            if dp[state].is_zero() {
                continue;
            }
            for (i, stride) in strides.iter().enumerate() {
                let remaining = (state / stride) % radices[i];
                if remaining > 0 {
                    let target = state - stride;
                    next[target] = next[target].clone() + dp[state].clone() * powers[i].clone();
                }
            }
        }
        dp = next;
    }
    dp.swap_remove(0)
}

/// `E(Σ a_i X_i²)^p` for independent standard normals via the monomial basis:
/// `(p!/2^p) Σ_λ (Π_k C(2k,k)) m_λ(a)`.
pub fn gaussian_moment_monomial<S: Scalar>(a: &[S], p: u32) -> Result<S> {
    let partitions = enumerate_partitions(p)?;
    let scale = BigRational::new(factorial(p), num_traits::pow(BigInt::from(2), p as usize));
    let mut acc = S::zero();
    for lambda in &partitions {
        let weight = lambda
            .parts()
            .iter()
            .fold(BigInt::one(), |w, &k| w * binomial(2 * k, k));
        let c = S::from_rational(&(&scale * BigRational::from_integer(weight)));
        acc = acc + c * eval_monomial(lambda, a);
    }
    Ok(acc)
}

/// `E(Σ a_i X_i²)^p` via the cycle index: `2^p p! Z(S_p; p_1(a)/2, p_2(a)/2, ...)`.
pub fn gaussian_moment_cycle<S: Scalar>(a: &[S], p: u32) -> Result<S> {
    let halved = halved_cycle_index(p)?;
    let scale = S::from_rational(&BigRational::from_integer(
        num_traits::pow(BigInt::from(2), p as usize) * factorial(p),
    ));
    Ok(scale * eval_powersum(&halved, a)?)
}

/// `Z(S_p)` with every power sum halved.
pub fn halved_cycle_index(p: u32) -> Result<SymFuncExpansion> {
    theta_scale(&cycle_index_terms(p)?, &BigRational::new(BigInt::one(), BigInt::from(2)))
}

/// Moment `E(Σ a_i X_i²)^p` of a generalized χ² variable.
///
/// With `doubled`, every weight carries two independent squared normals,
/// `E(Σ a_i (X_i² + Y_i²))^p`. The cycle-index route is returned after
/// checking it against the monomial-basis route.
pub fn chi2_moment<S: Scalar>(a: &[S], p: u32, doubled: bool) -> Result<S> {
    check_degree(p)?;
    if a.is_empty() {
        return Err(domain("chi2_moment needs at least one weight"));
    }
    if a.iter().any(|w| *w < S::zero()) {
        return Err(domain("chi2_moment weights must be nonnegative"));
    }
    let alphabet: Vec<S> = if doubled {
        a.iter().chain(a.iter()).cloned().collect()
    } else {
        a.to_vec()
    };
    let cycle = gaussian_moment_cycle(&alphabet, p)?;
    let monomial = gaussian_moment_monomial(&alphabet, p)?;
    if !cycle.agrees_with(&monomial) {
        return Err(Error::Consistency(format!(
            "chi2 moment of order {p}: cycle-index and monomial routes disagree"
        )));
    }
    Ok(cycle)
}
