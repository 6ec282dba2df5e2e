//! Node placement and the quasi random geometric graph connection rule.
//!
//! Pairs closer than `r` always connect, pairs farther than `r_prime` never
//! connect, and pairs in the annulus between them connect with a probability
//! given by the [`Kernel`].

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Real;

/// A location in the unit square.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(from = "[T; 2]", into = "[T; 2]")]
#[serde(bound = "T: Real")]
pub struct Point<T> {
    pub x: T,
    pub y: T,
}

impl<T: Real> Point<T> {
    pub fn new(x: T, y: T) -> Self {
        Point { x, y }
    }

    /// Euclidean distance; no wrap-around at the borders.
    pub fn distance(&self, other: &Point<T>) -> T {
        (self.x - other.x).hypot(self.y - other.y)
    }

    pub fn in_unit_square(&self) -> bool {
        let unit = T::zero()..=T::one();
        unit.contains(&self.x) && unit.contains(&self.y)
    }
}

impl<T> From<[T; 2]> for Point<T> {
    fn from([x, y]: [T; 2]) -> Self {
        Point { x, y }
    }
}

impl<T> From<Point<T>> for [T; 2] {
    fn from(p: Point<T>) -> Self {
        [p.x, p.y]
    }
}

/// Connection probability inside the annulus `r < d <= r_prime`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Kernel<T> {
    /// Constant probability `p`.
    Fixed { p: T },
    /// `(1 - sqrt((d^2 - r^2) / (r'^2 - r^2))) * p_connection`, falling to
    /// zero at the outer radius.
    LinearDecay { p_connection: T },
}

impl<T: Real> Kernel<T> {
    fn parameter(&self) -> T {
        match *self {
            Kernel::Fixed { p } => p,
            Kernel::LinearDecay { p_connection } => p_connection,
        }
    }
}

/// Radii and kernel governing pairwise connectivity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ModelRepr<T>", into = "ModelRepr<T>")]
#[serde(bound = "T: Real")]
pub struct ConnectionModel<T> {
    r: T,
    r_prime: T,
    kernel: Kernel<T>,
}

impl<T: Real> ConnectionModel<T> {
    pub fn new(r: T, r_prime: T, kernel: Kernel<T>) -> Result<Self> {
        let finite = r.is_finite() && r_prime.is_finite() && kernel.parameter().is_finite();
        if !finite {
            return Err(Error::param("radii and probability must be finite"));
        }
        if r < T::zero() {
            return Err(Error::param(format!("r must be non-negative, got {r}")));
        }
        if r_prime > T::one() {
            return Err(Error::param(format!("r' must be at most 1, got {r_prime}")));
        }
        if r > r_prime {
            return Err(Error::param(format!("r ({r}) must not exceed r' ({r_prime})")));
        }
        if r == r_prime && matches!(kernel, Kernel::LinearDecay { .. }) {
            return Err(Error::param("linear-decay kernel needs r < r'"));
        }
        let q = kernel.parameter();
        if q < T::zero() || q > T::one() {
            return Err(Error::param(format!("probability must lie in [0,1], got {q}")));
        }
        Ok(ConnectionModel { r, r_prime, kernel })
    }

    pub fn fixed(r: T, r_prime: T, p: T) -> Result<Self> {
        Self::new(r, r_prime, Kernel::Fixed { p })
    }

    pub fn linear_decay(r: T, r_prime: T, p_connection: T) -> Result<Self> {
        Self::new(r, r_prime, Kernel::LinearDecay { p_connection })
    }

    pub fn r(&self) -> T {
        self.r
    }

    pub fn r_prime(&self) -> T {
        self.r_prime
    }

    pub fn kernel(&self) -> Kernel<T> {
        self.kernel
    }

    /// Mean connection probability over the annulus, weighted by area.
    ///
    /// Under the area element, `u = (d^2 - r^2) / (r'^2 - r^2)` is uniform on
    /// `[0,1]`, so the linear-decay factor `1 - sqrt(u)` averages to `1/3`.
    pub fn annulus_mean_probability(&self) -> T {
        match self.kernel {
            Kernel::Fixed { p } => p,
            Kernel::LinearDecay { p_connection } => p_connection / T::lit(3.0),
        }
    }

    pub fn convert<U: Real>(&self) -> ConnectionModel<U> {
        let kernel = match self.kernel {
            Kernel::Fixed { p } => Kernel::Fixed { p: U::lit(p.as_f64()) },
            Kernel::LinearDecay { p_connection } => Kernel::LinearDecay { p_connection: U::lit(p_connection.as_f64()) },
        };
        ConnectionModel { r: U::lit(self.r.as_f64()), r_prime: U::lit(self.r_prime.as_f64()), kernel }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
enum KernelKind {
    Fixed,
    LinearDecay,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ModelRepr<T> {
    r: T,
    r_prime: T,
    kernel: KernelKind,
    p: T,
}

impl<T: Real> TryFrom<ModelRepr<T>> for ConnectionModel<T> {
    type Error = Error;

    fn try_from(repr: ModelRepr<T>) -> Result<Self> {
        let kernel = match repr.kernel {
            KernelKind::Fixed => Kernel::Fixed { p: repr.p },
            KernelKind::LinearDecay => Kernel::LinearDecay { p_connection: repr.p },
        };
        ConnectionModel::new(repr.r, repr.r_prime, kernel)
    }
}

impl<T: Real> From<ConnectionModel<T>> for ModelRepr<T> {
    fn from(model: ConnectionModel<T>) -> Self {
        let (kernel, p) = match model.kernel {
            Kernel::Fixed { p } => (KernelKind::Fixed, p),
            Kernel::LinearDecay { p_connection } => (KernelKind::LinearDecay, p_connection),
        };
        ModelRepr { r: model.r, r_prime: model.r_prime, kernel, p }
    }
}

/// Uniform sample in `[0,1]` converted to `T`.
fn unit<T: Real, R: Rng + ?Sized>(rng: &mut R) -> T {
    T::lit(rng.gen::<f64>())
}

/// `n` points drawn independently and uniformly from the unit square, `x`
/// then `y` for each point.
pub fn sample_points<T: Real, R: Rng + ?Sized>(n: usize, rng: &mut R) -> Vec<Point<T>> {
    (0..n)
        .map(|_| {
            let x = unit(rng);
            let y = unit(rng);
            Point::new(x, y)
        })
        .collect()
}

pub fn kernel_probability<T: Real>(d: T, model: &ConnectionModel<T>) -> T {
    if d <= model.r {
        return T::one();
    }
    if d > model.r_prime {
        return T::zero();
    }
    match model.kernel {
        Kernel::Fixed { p } => p,
        Kernel::LinearDecay { p_connection } => {
            let r2 = model.r * model.r;
            let span = model.r_prime * model.r_prime - r2;
            let u = ((d * d - r2) / span).max(T::zero()).min(T::one());
            (T::one() - u.sqrt()) * p_connection
        }
    }
}

/// Bernoulli draw with the kernel probability of the pair.
///
/// Consumes exactly one value from `rng` when the probability is strictly
/// between 0 and 1 and none otherwise, so deterministic pairs never shift
/// the stream.
pub fn connect_decision<T: Real, R: Rng + ?Sized>(
    u: &Point<T>,
    v: &Point<T>,
    model: &ConnectionModel<T>,
    rng: &mut R,
) -> bool {
    decide(kernel_probability(u.distance(v), model), rng)
}

pub(crate) fn decide<T: Real, R: Rng + ?Sized>(probability: T, rng: &mut R) -> bool {
    if probability >= T::one() {
        true
    } else if probability <= T::zero() {
        false
    } else {
        rng.gen::<f64>() < probability.as_f64()
    }
}

/// The closed-form bracket on the marginal connection probability p'.
///
/// `lower = (pi r^2 + pi (r'^2 - r^2) p) / 4` accounts for a node sitting in
/// a corner; `upper` drops the factor 1/4. Both are clamped to `[0,1]`.
/// A linear-decay kernel is rejected unless `effective_p` is given; for a
/// fixed kernel `effective_p` replaces `p` when present.
pub fn p_prime_bounds<T: Real>(model: &ConnectionModel<T>, effective_p: Option<T>) -> Result<(T, T)> {
    let p = match (model.kernel, effective_p) {
        (_, Some(p)) => p,
        (Kernel::Fixed { p }, None) => p,
        (Kernel::LinearDecay { .. }, None) => return Err(Error::KernelUnsupported),
    };
    if !(T::zero()..=T::one()).contains(&p) {
        return Err(Error::param(format!("effective p must lie in [0,1], got {p}")));
    }
    let pi = T::PI();
    let r2 = model.r * model.r;
    let upper = pi * r2 + pi * (model.r_prime * model.r_prime - r2) * p;
    let lower = upper / T::lit(4.0);
    let clamp = |x: T| x.max(T::zero()).min(T::one());
    Ok((clamp(lower), clamp(upper)))
}

/// Monte Carlo estimate of p' including border effects: the mean kernel
/// probability over `samples` independent uniform point pairs.
pub fn estimate_connection_probability<T: Real, R: Rng + ?Sized>(
    model: &ConnectionModel<T>,
    samples: usize,
    rng: &mut R,
) -> Result<T> {
    if samples == 0 {
        return Err(Error::param("at least one sample is required"));
    }
    let mut total = 0.0f64;
    for _ in 0..samples {
        let u: Point<T> = Point::new(unit(rng), unit(rng));
        let v: Point<T> = Point::new(unit(rng), unit(rng));
        total += kernel_probability(u.distance(&v), model).as_f64();
    }
    let mean = total / samples as f64;
    Ok(T::lit(mean.clamp(0.0, 1.0)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::Seed;
    use proptest::prelude::*;
    use rand::Rng;

    fn fixed(r: f64, rp: f64, p: f64) -> ConnectionModel<f64> {
        ConnectionModel::fixed(r, rp, p).unwrap()
    }

    #[test]
    fn sample_points_empty_and_deterministic() {
        let pts: Vec<Point<f64>> = sample_points(0, &mut Seed(3).rng());
        assert!(pts.is_empty());
        let a: Vec<Point<f64>> = sample_points(5, &mut Seed(42).rng());
        let b: Vec<Point<f64>> = sample_points(5, &mut Seed(42).rng());
        assert_eq!(a, b);
        assert!(a.iter().all(Point::in_unit_square));
    }

    #[test]
    fn sample_points_uniform_moments() {
        let pts: Vec<Point<f64>> = sample_points(1_000_000, &mut Seed(11).rng());
        let n = pts.len() as f64;
        let mean = pts.iter().map(|p| p.x).sum::<f64>() / n;
        let var = pts.iter().map(|p| (p.x - mean).powi(2)).sum::<f64>() / n;
        assert!((mean - 0.5).abs() < 0.002, "mean {mean}");
        assert!((var - 1.0 / 12.0).abs() < 0.001, "var {var}");
    }

    #[test]
    fn kernel_examples() {
        let decay = ConnectionModel::linear_decay(0.1, 0.2, 0.9).unwrap();
        assert_eq!(kernel_probability(0.1, &decay), 1.0);
        let just_outside: f64 = kernel_probability(0.1 + 1e-12, &decay);
        assert!((just_outside - 0.9).abs() < 1e-5, "{just_outside}");
        assert_eq!(kernel_probability(0.2, &decay), 0.0);

        let full = ConnectionModel::linear_decay(0.1, 0.2, 1.0).unwrap();
        let mid = kernel_probability(0.025f64.sqrt(), &full);
        assert!((mid - (1.0 - 0.5f64.sqrt())).abs() < 1e-12);
        assert!((mid - 0.29289).abs() < 1e-5);

        assert_eq!(kernel_probability(0.15, &fixed(0.1, 0.2, 0.5)), 0.5);
        assert_eq!(kernel_probability(0.2, &fixed(0.1, 0.2, 0.5)), 0.5);
        assert_eq!(kernel_probability(0.2000001, &fixed(0.1, 0.2, 0.5)), 0.0);
    }

    #[test]
    fn model_validation() {
        assert!(ConnectionModel::fixed(0.1, 1.5, 1.0).is_err());
        assert!(ConnectionModel::fixed(0.3, 0.2, 0.5).is_err());
        assert!(ConnectionModel::fixed(-0.1, 0.2, 0.5).is_err());
        assert!(ConnectionModel::fixed(0.1, 0.2, 1.5).is_err());
        assert!(ConnectionModel::fixed(0.1, 0.1, 0.5).is_ok());
        assert!(ConnectionModel::linear_decay(0.1, 0.1, 0.5).is_err());
        assert!(ConnectionModel::fixed(f64::NAN, 0.1, 0.5).is_err());
    }

    #[test]
    fn connect_decision_deterministic_cases_draw_nothing() {
        let m = fixed(0.1, 0.2, 0.5);
        let origin = Point::new(0.0, 0.0);
        let mut rng = Seed(5).rng();
        let mut reference = Seed(5).rng();
        assert!(connect_decision(&origin, &Point::new(0.0, 0.05), &m, &mut rng));
        assert!(!connect_decision(&origin, &Point::new(0.9, 0.9), &m, &mut rng));
        assert_eq!(rng.gen::<u64>(), reference.gen::<u64>());
    }

    #[test]
    fn connect_decision_annulus_frequency() {
        let m = fixed(0.1, 0.2, 0.5);
        let (u, v) = (Point::new(0.0, 0.0), Point::new(0.0, 0.15));
        let mut rng = Seed(9).rng();
        let trials = 100_000;
        let hits = (0..trials).filter(|_| connect_decision(&u, &v, &m, &mut rng)).count();
        let freq = hits as f64 / trials as f64;
        assert!((freq - 0.5).abs() < 0.01, "{freq}");
    }

    #[test]
    fn p_prime_bounds_examples() {
        let (lo, hi) = p_prime_bounds(&fixed(0.1, 0.2, 0.5), None).unwrap();
        assert!((lo - 0.0196350).abs() < 1e-7);
        assert!((hi - 0.0785398).abs() < 1e-7);
        let (lo, hi) = p_prime_bounds(&fixed(0.1, 0.1, 0.3), None).unwrap();
        assert!((lo - 0.00785398).abs() < 1e-8);
        assert!((hi - 0.0314159).abs() < 1e-7);
        assert_eq!(p_prime_bounds(&fixed(0.0, 0.0, 0.7), None).unwrap(), (0.0, 0.0));
        let (lo, hi) = p_prime_bounds(&fixed(0.9, 1.0, 1.0), None).unwrap();
        assert!(hi == 1.0 && lo <= hi);
    }

    #[test]
    fn p_prime_bounds_linear_decay_needs_override() {
        let m = ConnectionModel::linear_decay(0.1, 0.2, 0.9).unwrap();
        assert!(matches!(p_prime_bounds(&m, None), Err(Error::KernelUnsupported)));
        let (_, hi) = p_prime_bounds(&m, Some(m.annulus_mean_probability())).unwrap();
        let expected = std::f64::consts::PI * (0.01 + 0.03 * 0.3);
        assert!((hi - expected).abs() < 1e-12);
    }

    #[test]
    fn annulus_mean_matches_quadrature() {
        // Midpoint rule in d with the annulus area element 2*pi*d.
        let m = ConnectionModel::linear_decay(0.1, 0.2, 1.0).unwrap();
        let steps = 200_000;
        let (mut num, mut den) = (0.0, 0.0);
        for i in 0..steps {
            let d = 0.1 + (i as f64 + 0.5) * 0.1 / steps as f64;
            num += kernel_probability(d, &m) * d;
            den += d;
        }
        assert!((num / den - m.annulus_mean_probability()).abs() < 1e-6);
    }

    #[test]
    fn estimate_zero_model_is_zero() {
        let m = fixed(0.0, 0.0, 0.0);
        assert_eq!(estimate_connection_probability(&m, 1000, &mut Seed(1).rng()).unwrap(), 0.0);
        assert!(estimate_connection_probability(&m, 0, &mut Seed(1).rng()).is_err());
    }

    #[test]
    fn model_json_shape() {
        let m = fixed(0.1, 0.2, 0.5);
        let json = serde_json::to_string(&m).unwrap();
        assert_eq!(json, r#"{"r":0.1,"r_prime":0.2,"kernel":"fixed","p":0.5}"#);
        let d = ConnectionModel::linear_decay(0.1, 0.18, 0.9).unwrap();
        let back: ConnectionModel<f64> = serde_json::from_str(&serde_json::to_string(&d).unwrap()).unwrap();
        assert_eq!(back, d);
        let bad = r#"{"r":0.3,"r_prime":0.2,"kernel":"fixed","p":0.5}"#;
        assert!(serde_json::from_str::<ConnectionModel<f64>>(bad).is_err());
    }

    #[test]
    fn works_with_f32() {
        let m = ConnectionModel::<f32>::fixed(0.1, 0.2, 0.5).unwrap();
        let pts: Vec<Point<f32>> = sample_points(10, &mut Seed(1).rng());
        assert!(pts.iter().all(Point::in_unit_square));
        assert_eq!(kernel_probability(0.15f32, &m), 0.5);
    }

    proptest! {
        #[test]
        fn kernel_monotone_and_piecewise(
            r in 0.0f64..0.5, gap in 0.01f64..0.5, q in 0.0f64..=1.0,
            d1 in 0.0f64..1.5, d2 in 0.0f64..1.5, decay in any::<bool>(),
        ) {
            let rp = (r + gap).min(1.0);
            let m = if decay {
                ConnectionModel::linear_decay(r, rp, q).unwrap()
            } else {
                ConnectionModel::fixed(r, rp, q).unwrap()
            };
            let (lo, hi) = if d1 <= d2 { (d1, d2) } else { (d2, d1) };
            prop_assert!(kernel_probability(lo, &m) >= kernel_probability(hi, &m));
            let p = kernel_probability(d1, &m);
            prop_assert!((0.0..=1.0).contains(&p));
            if d1 <= r { prop_assert_eq!(p, 1.0); }
            if d1 > rp { prop_assert_eq!(p, 0.0); }
        }
    }
}
