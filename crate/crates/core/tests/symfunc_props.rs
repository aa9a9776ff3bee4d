use framebound::numeric::{binomial, factorial};
use framebound::symfunc::{
    chi2_moment, cycle_index_terms, enumerate_partitions, eval_monomial, eval_powersum, theta_scale,
};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

fn weights() -> impl Strategy<Value = Vec<BigRational>> {
    prop::collection::vec((0i64..30, 1i64..7).prop_map(|(n, d)| rat(n, d)), 1..5)
}

#[test]
fn cycle_index_coefficients_sum_to_one() {
    for p in 1..=20 {
        assert!(cycle_index_terms(p).unwrap().coefficient_sum().is_one(), "p={p}");
    }
}

#[test]
fn central_binomial_convolution() {
    for p in 0..=20u32 {
        let s: BigInt = (0..=p).map(|k| binomial(2 * k, k) * binomial(2 * (p - k), p - k)).sum();
        assert_eq!(s, num_traits::pow(BigInt::from(4), p as usize));
    }
}

proptest! {
    #[test]
    fn powersum_and_monomial_bases_agree(a in weights(), p in 1u32..=8) {
        let halved = theta_scale(&cycle_index_terms(p).unwrap(), &rat(1, 2)).unwrap();
        let two_p = BigRational::from_integer(num_traits::pow(BigInt::from(2), p as usize));
        let lhs = two_p.clone() * BigRational::from_integer(factorial(p)) * eval_powersum(&halved, &a).unwrap();
        let mut rhs = BigRational::from_integer(0.into());
        for lambda in enumerate_partitions(p).unwrap() {
            let w = lambda.parts().iter().fold(BigInt::one(), |w, &k| w * binomial(2 * k, k));
            rhs += BigRational::from_integer(w) * eval_monomial(&lambda, &a);
        }
        rhs = rhs * BigRational::from_integer(factorial(p)) / two_p;
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn theta_scaling_round_trips(p in 1u32..=10, n in 1i64..9, d in 1i64..9) {
        let z = cycle_index_terms(p).unwrap();
        let q = rat(n, d);
        let back = theta_scale(&theta_scale(&z, &q).unwrap(), &(BigRational::one() / q)).unwrap();
        prop_assert_eq!(back, z);
    }
}

#[test]
fn chi2_moment_matches_sampling() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let samples = 1_000_000;
    for (a, p) in [(vec![1.0, 2.0], 2u32), (vec![0.5, 1.5, 3.0], 3), (vec![0.2, 0.4, 0.6, 0.8, 1.0], 4), (vec![2.5], 1)] {
        let exact = chi2_moment(&a, p, false).unwrap();
        let mut sum = 0.0;
        let mut sum_sq = 0.0;
        for _ in 0..samples {
            let q: f64 = a.iter().map(|w| {
                let g: f64 = StandardNormal.sample(&mut rng);
                w * g * g
            }).sum();
            let v = q.powi(p as i32);
            sum += v;
            sum_sq += v * v;
        }
        let mean = sum / samples as f64;
        let se = ((sum_sq / samples as f64 - mean * mean) / samples as f64).sqrt();
        assert!((mean - exact).abs() <= 4.0 * se, "a={a:?} p={p}: {mean} ± {se} vs {exact}");
    }
}

#[test]
fn doubled_weights_match_repeated_alphabet() {
    let a = vec![rat(1, 1), rat(3, 2)];
    let twice: Vec<_> = a.iter().chain(a.iter()).cloned().collect();
    for p in 1..=6 {
        assert_eq!(chi2_moment(&a, p, true).unwrap(), chi2_moment(&twice, p, false).unwrap());
    }
    assert_eq!(chi2_moment(&[rat(1, 1), rat(2, 1)], 2, false).unwrap().to_f64(), Some(19.0));
}
