//! Closed-form expectations and concentration bounds for cut capacities.
//!
//! Failure probabilities use the explicit constants read off the
//! high-probability arguments: `2 tau / n^2` for the lower bound and
//! `2 n^(-4/3)` for the upper bound ("proof-explicit constants"). Bounds
//! with `epsilon >= 1` are reported with a vacuity flag rather than as
//! errors.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{estimate_connection_probability, p_prime_bounds, ConnectionModel, Kernel};
use crate::rng::Seed;
use crate::scalar::Real;

/// Monte Carlo pair count used for the p' point value by default.
pub const DEFAULT_P_PRIME_SAMPLES: usize = 1_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct TailBound<T> {
    pub epsilon: T,
    pub bound: T,
    pub fail_prob: T,
    pub vacuous: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct BoundReport<T> {
    pub n: usize,
    pub tau: usize,
    pub p_prime: T,
    pub p_prime_interval: (T, T),
    pub expected_c0: T,
    pub epsilon_lower: T,
    pub lower_bound: T,
    pub lower_fail_prob: T,
    pub epsilon_upper: T,
    pub upper_bound: T,
    pub upper_fail_prob: T,
    pub vacuous_lower: bool,
    pub vacuous_upper: bool,
}

/// Where the point value of p' comes from.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PPrimeSource<T> {
    /// Border-corrected Monte Carlo estimate over uniform point pairs.
    Estimate {
        samples: usize,
        seed: Seed,
    },
    Fixed(T),
}

impl<T> PPrimeSource<T> {
    pub fn estimate(seed: Seed) -> Self {
        PPrimeSource::Estimate { samples: DEFAULT_P_PRIME_SAMPLES, seed }
    }
}

fn check_probability<T: Real>(p: T, what: &str) -> Result<()> {
    if (T::zero()..=T::one()).contains(&p) {
        Ok(())
    } else {
        Err(Error::param(format!("{what} must lie in [0,1], got {p}")))
    }
}

fn check_epsilon<T: Real>(epsilon: T) -> Result<()> {
    if epsilon > T::zero() && epsilon < T::one() {
        Ok(())
    } else {
        Err(Error::param(format!("epsilon must lie in (0,1), got {epsilon}")))
    }
}

fn check_k(n: usize, k: usize) -> Result<()> {
    if k <= n {
        Ok(())
    } else {
        Err(Error::param(format!("cut size k={k} exceeds n={n}")))
    }
}

fn clamp_unit<T: Real>(x: T) -> T {
    x.max(T::zero()).min(T::one())
}

/// `E[C_k] = p' (n + k (n - k))`.
pub fn expected_cut_capacity<T: Real>(n: usize, k: usize, p_prime: T) -> Result<T> {
    check_k(n, k)?;
    check_probability(p_prime, "p'")?;
    Ok(p_prime * T::from_count(n + k * (n - k)))
}

/// Lower-tail Chernoff bound `exp(-mean eps^2 / 2)`, capped at 1.
pub fn chernoff_lower_tail<T: Real>(mean: T, epsilon: T) -> Result<T> {
    check_epsilon(epsilon)?;
    if !(mean >= T::zero()) {
        return Err(Error::param(format!("mean must be non-negative, got {mean}")));
    }
    Ok(clamp_unit((-(mean * epsilon * epsilon) / T::lit(2.0)).exp()))
}

/// Bound on `Pr[C_k <= (1 - eps) E[C_k]]` for a size-`k` cut:
/// `exp(-(eps^2 (n - k) p' / 2 - ln(k + 1)))`, capped at 1.
pub fn cut_tail_bound<T: Real>(n: usize, k: usize, p_prime: T, epsilon: T) -> Result<T> {
    check_k(n, k)?;
    check_probability(p_prime, "p'")?;
    check_epsilon(epsilon)?;
    let exponent = epsilon * epsilon * T::from_count(n - k) * p_prime / T::lit(2.0) - T::from_count(k + 1).ln();
    Ok(clamp_unit((-exponent).exp()))
}

/// Lower bound `(1 - eps) n p'` with `eps = sqrt(4 ln n / (p' (n - k)))`.
/// A vacuous bound (`eps >= 1`) is reported as 0.
pub fn lower_bound_report<T: Real>(n: usize, tau: usize, p_prime: T, k: usize) -> Result<TailBound<T>> {
    if n <= 1 {
        return Err(Error::param(format!("need n >= 2 relays, got {n}")));
    }
    if k >= n {
        return Err(Error::param(format!("cut size k={k} must be below n={n}")));
    }
    check_probability(p_prime, "p'")?;
    let nf = T::from_count(n);
    let epsilon = (T::lit(4.0) * nf.ln() / (p_prime * T::from_count(n - k))).sqrt();
    let vacuous = !(epsilon < T::one());
    let bound = if vacuous { T::zero() } else { (T::one() - epsilon) * nf * p_prime };
    let fail_prob = clamp_unit(T::lit(2.0) * T::from_count(tau) / (nf * nf));
    Ok(TailBound { epsilon, bound, fail_prob, vacuous })
}

/// Upper bound `(1 + eps) n p'` with `eps = sqrt(4 ln n / (n p'))`. The
/// bound stays valid when `eps >= 1`; the flag only marks it as weak.
pub fn upper_bound_report<T: Real>(n: usize, p_prime: T) -> Result<TailBound<T>> {
    if n <= 1 {
        return Err(Error::param(format!("need n >= 2 relays, got {n}")));
    }
    check_probability(p_prime, "p'")?;
    if !(p_prime > T::zero()) {
        return Err(Error::param("upper bound needs p' > 0"));
    }
    let nf = T::from_count(n);
    let expected = nf * p_prime;
    let epsilon = (T::lit(4.0) * nf.ln() / expected).sqrt();
    Ok(TailBound {
        epsilon,
        bound: (T::one() + epsilon) * expected,
        fail_prob: upper_fail_prob(n),
        vacuous: epsilon >= T::one(),
    })
}

fn upper_fail_prob<T: Real>(n: usize) -> T {
    clamp_unit(T::lit(2.0) * T::from_count(n).powf(T::lit(-4.0 / 3.0)))
}

/// The lower-bound epsilon as a function of the cut size, `k = 0..n-1`.
pub fn epsilon_curve<T: Real>(n: usize, p_prime: T) -> Result<Vec<(usize, T)>> {
    (0..n).map(|k| lower_bound_report(n, 1, p_prime, k).map(|b| (k, b.epsilon))).collect()
}

pub fn resolve_p_prime<T: Real>(model: &ConnectionModel<T>, source: PPrimeSource<T>) -> Result<T> {
    match source {
        PPrimeSource::Fixed(p) => {
            check_probability(p, "p'")?;
            Ok(p)
        }
        PPrimeSource::Estimate { samples, seed } => estimate_connection_probability(model, samples, &mut seed.rng()),
    }
}

/// The closed-form p' bracket; linear-decay kernels substitute the
/// annulus-averaged probability.
pub fn p_prime_interval<T: Real>(model: &ConnectionModel<T>) -> Result<(T, T)> {
    let effective = match model.kernel() {
        Kernel::Fixed { .. } => None,
        Kernel::LinearDecay { .. } => Some(model.annulus_mean_probability()),
    };
    p_prime_bounds(model, effective)
}

pub fn full_report<T: Real>(
    n: usize,
    tau: usize,
    model: &ConnectionModel<T>,
    k: usize,
    source: PPrimeSource<T>,
) -> Result<BoundReport<T>> {
    let p_prime = resolve_p_prime(model, source)?;
    report_for(n, tau, p_prime, p_prime_interval(model)?, k)
}

/// Report from an already known p' point value.
pub fn report_for<T: Real>(n: usize, tau: usize, p_prime: T, interval: (T, T), k: usize) -> Result<BoundReport<T>> {
    let lower = lower_bound_report(n, tau, p_prime, k)?;
    let upper = if p_prime > T::zero() {
        upper_bound_report(n, p_prime)?
    } else {
        TailBound { epsilon: T::infinity(), bound: T::zero(), fail_prob: upper_fail_prob(n), vacuous: true }
    };
    Ok(BoundReport {
        n,
        tau,
        p_prime,
        p_prime_interval: interval,
        expected_c0: expected_cut_capacity(n, 0, p_prime)?,
        epsilon_lower: lower.epsilon,
        lower_bound: lower.bound,
        lower_fail_prob: lower.fail_prob,
        epsilon_upper: upper.epsilon,
        upper_bound: upper.bound,
        upper_fail_prob: upper.fail_prob,
        vacuous_lower: lower.vacuous,
        vacuous_upper: upper.vacuous,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::Rng;

    const P_UPPER: f64 = 0.0785398;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn expected_cut_examples() {
        assert!(close(expected_cut_capacity(200, 0, P_UPPER).unwrap(), 15.708, 1e-3));
        assert!(close(expected_cut_capacity(200, 100, P_UPPER).unwrap(), 801.11, 1e-2));
        assert_eq!(expected_cut_capacity(200, 37, P_UPPER).unwrap(), expected_cut_capacity(200, 163, P_UPPER).unwrap());
        assert!(expected_cut_capacity(5, 6, 0.1).is_err());
    }

    #[test]
    fn chernoff_examples() {
        assert!(close(chernoff_lower_tail(10.0, 0.5).unwrap(), (-1.25f64).exp(), 1e-15));
        assert!(close(chernoff_lower_tail(10.0, 0.5).unwrap(), 0.28650, 1e-5));
        assert_eq!(chernoff_lower_tail(0.0, 0.3).unwrap(), 1.0);
        assert!(chernoff_lower_tail(1.0, 1.0).is_err());
        assert!(chernoff_lower_tail(1.0, 0.0).is_err());
    }

    #[test]
    fn chernoff_dominates_binomial_tail() {
        let mut rng = crate::rng::Seed(21).rng();
        let draws = 100_000;
        let low = (0..draws).filter(|_| (0..100).filter(|_| rng.gen::<f64>() < 0.3).count() <= 21).count();
        let freq = low as f64 / draws as f64;
        let bound = chernoff_lower_tail(30.0, 0.3).unwrap();
        assert!(close(bound, 0.2592, 1e-4));
        assert!(freq <= bound, "{freq} > {bound}");
    }

    #[test]
    fn cut_tail_examples() {
        assert!(close(cut_tail_bound(200, 0, P_UPPER, 0.5).unwrap(), 0.14037, 1e-5));
        assert_eq!(cut_tail_bound(200, 199, P_UPPER, 0.5).unwrap(), 1.0);
        assert!(cut_tail_bound(200, 0, P_UPPER, 1.0).is_err());
        assert!(cut_tail_bound(200, 201, P_UPPER, 0.5).is_err());
    }

    #[test]
    fn lower_bound_examples() {
        let small = lower_bound_report(200, 5, P_UPPER, 0).unwrap();
        assert!(close(small.epsilon, 1.1616, 1e-4));
        assert!(small.vacuous);
        assert_eq!(small.bound, 0.0);
        assert!(close(small.fail_prob, 0.00025, 1e-15));

        let big = lower_bound_report(100_000, 1, P_UPPER, 0).unwrap();
        assert!(close(big.epsilon, 0.076574, 1e-6));
        assert!(close(big.bound, 7252.6, 0.05));
        assert!(!big.vacuous);

        assert!(lower_bound_report(1, 1, 0.5, 0).is_err());
        assert!(lower_bound_report(10, 1, 0.5, 10).is_err());
    }

    #[test]
    fn upper_bound_examples() {
        let big = upper_bound_report(100_000, P_UPPER).unwrap();
        assert!(close(big.epsilon, 0.076574, 1e-6));
        assert!(close(big.bound, 8455.4, 0.05));
        let small = upper_bound_report(200, P_UPPER).unwrap();
        assert!(close(small.epsilon, 1.1616, 1e-4));
        assert!(small.vacuous);
        assert!(close(small.bound, 33.95, 5e-3));
        assert!(close(small.fail_prob, 0.00171, 1e-6));
        assert!(upper_bound_report(1, 0.5).is_err());
        assert!(upper_bound_report(10, 0.0).is_err());
    }

    #[test]
    fn full_report_fig3_parameters() {
        let model = ConnectionModel::fixed(0.1, 0.2, 0.5).unwrap();
        let report = full_report(200, 5, &model, 0, PPrimeSource::estimate(crate::rng::Seed(3))).unwrap();
        assert!(close(report.expected_c0, 13.39, 0.2), "{}", report.expected_c0);
        let (lo, hi) = report.p_prime_interval;
        assert!(close(lo, 0.0196350, 1e-7) && close(hi, 0.0785398, 1e-7));
        assert!(lo <= report.p_prime && report.p_prime <= hi);
        assert!(report.vacuous_lower && report.vacuous_upper);
    }

    #[test]
    fn full_report_empty_model() {
        let model = ConnectionModel::fixed(0.0, 0.0, 0.0).unwrap();
        let report = full_report(200, 1, &model, 0, PPrimeSource::estimate(crate::rng::Seed(1))).unwrap();
        assert_eq!(report.p_prime, 0.0);
        assert_eq!(report.expected_c0, 0.0);
        assert_eq!(report.lower_bound, 0.0);
        assert_eq!(report.upper_bound, 0.0);
        assert!(report.vacuous_lower && report.vacuous_upper);
    }

    #[test]
    fn linear_decay_report_uses_annulus_mean() {
        let model = ConnectionModel::linear_decay(0.1, 0.18, 0.9).unwrap();
        let report = full_report(100, 1, &model, 0, PPrimeSource::estimate(crate::rng::Seed(2))).unwrap();
        let (lo, hi) = report.p_prime_interval;
        assert!(lo <= report.p_prime && report.p_prime <= hi);
    }

    #[test]
    fn report_in_f32() {
        let report = report_for::<f32>(100_000, 1, 0.0785398, (0.0196, 0.0785), 0).unwrap();
        assert!((report.lower_bound - 7252.6).abs() < 1.0);
        assert!((report.upper_bound - 8455.4).abs() < 1.0);
    }

    proptest! {
        #[test]
        fn expectation_symmetry_and_chain(n in 1usize..300, p in 0.0f64..=1.0) {
            for k in 0..=n {
                prop_assert_eq!(expected_cut_capacity(n, k, p).unwrap(), expected_cut_capacity(n, n - k, p).unwrap());
            }
            for k in 0..n.div_ceil(2) {
                prop_assert!(expected_cut_capacity(n, k, p).unwrap() <= expected_cut_capacity(n, k + 1, p).unwrap());
            }
        }

        #[test]
        fn cut_tail_monotone(n in 2usize..500, k in 0usize..500, p in 0.0f64..=1.0, e1 in 0.01f64..0.99, e2 in 0.01f64..0.99) {
            prop_assume!(k < n);
            let (lo, hi) = if e1 <= e2 { (e1, e2) } else { (e2, e1) };
            let at = |k, e| cut_tail_bound(n, k, p, e).unwrap();
            prop_assert!(at(k, hi) <= at(k, lo));
            prop_assert!(at(k, lo) <= at(k + 1, lo));
            prop_assert!((0.0..=1.0).contains(&at(k, lo)));
            let bigger_p = (p + 0.1).min(1.0);
            prop_assert!(cut_tail_bound(n, k, bigger_p, lo).unwrap() <= at(k, lo));
        }

        #[test]
        fn epsilon_recovers_log_n(n in 2usize..1_000_000, k_frac in 0.0f64..1.0, p in 0.001f64..=1.0) {
            let k = ((n as f64 - 1.0) * k_frac) as usize;
            let lower = lower_bound_report(n, 1, p, k).unwrap();
            let ln_n = (n as f64).ln();
            let back = lower.epsilon.powi(2) * p * (n - k) as f64 / 4.0;
            prop_assert!(((back - ln_n) / ln_n).abs() < 1e-12);
            let upper = upper_bound_report(n, p).unwrap();
            let back = upper.epsilon.powi(2) * (n as f64 * p) / 4.0;
            prop_assert!(((back - ln_n) / ln_n).abs() < 1e-12);
            prop_assert_eq!(lower.vacuous, lower.epsilon >= 1.0);
            prop_assert_eq!(upper.vacuous, upper.epsilon >= 1.0);
            if !lower.vacuous && !upper.vacuous && k == 0 {
                prop_assert!(lower.bound <= n as f64 * p && n as f64 * p <= upper.bound);
            }
        }
    }
}
