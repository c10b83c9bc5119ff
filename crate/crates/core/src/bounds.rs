//! Shannon entropy from power sums of probabilities.
//!
//! Given the indices `I^(s) = Σ_j p_j^s` for `s = 2..=n`, the largest
//! probability is bounded by the root `Υ` of an algebraic equation. Rescaling
//! every probability by `Υ` moves the points of approximation into `[0, 1]`,
//! where the polynomial envelopes of `-x ln x` apply termwise and sum to a
//! two-sided estimate of `H_1`.

use std::fmt;
use std::str::FromStr;
use std::sync::OnceLock;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::ToPrimitive;

use crate::coefficients::{
    cheb_lower_coeffs, cheb_shifted_coeffs, cheb_upper_coeffs, taylor_lower_coeffs,
    taylor_upper_coeffs, CoefficientTable, MAX_CHEBYSHEV_DEGREE,
};
use crate::dd::DoubleDouble;
use crate::error::{check_degree, Error, Result};

/// Relative window around the extreme feasible index values inside which an
/// index is treated as sitting exactly on the boundary. Power sums of a
/// uniform distribution carry rounding of order `L·n·ε`, and `Υ` depends on
/// the index through a square root at the minimum.
pub const INDEX_SNAP: f64 = 1e-12;

const NORMALIZATION_TOLERANCE: f64 = 1e-12;

/// Finite discrete distribution.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbabilityVector {
    probs: Vec<f64>,
}

impl ProbabilityVector {
    pub fn new(probs: Vec<f64>) -> Result<Self> {
        if probs.is_empty() {
            return Err(Error::InvalidDistribution("no outcomes".into()));
        }
        if let Some(p) = probs.iter().find(|p| !(p.is_finite() && **p >= 0.0)) {
            return Err(Error::InvalidDistribution(format!(
                "probability {p} is not a nonnegative number"
            )));
        }
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > NORMALIZATION_TOLERANCE {
            return Err(Error::InvalidDistribution(format!(
                "probabilities sum to {total}"
            )));
        }
        Ok(Self { probs })
    }

    pub fn uniform(outcomes: usize) -> Self {
        Self {
            probs: vec![1.0 / outcomes as f64; outcomes.max(1)],
        }
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    pub fn max(&self) -> f64 {
        self.probs.iter().copied().fold(0.0, f64::max)
    }

    fn power_sum(&self, s: usize) -> f64 {
        self.probs.iter().map(|p| p.powi(s as i32)).sum()
    }
}

/// `-Σ p ln p` in nats.
pub fn shannon_entropy(p: &ProbabilityVector) -> f64 {
    -p.probs
        .iter()
        .map(|&x| crate::estimators::x_ln_x(x))
        .sum::<f64>()
}

/// Index of coincidence of order `s`, `Σ p^s`.
pub fn index_coincidence(p: &ProbabilityVector, s: usize) -> Result<f64> {
    check_degree(s, 2, usize::MAX)?;
    Ok(p.power_sum(s))
}

/// Tsallis entropy `(I^(s) - 1)/(1 - s)`.
pub fn tsallis_entropy(p: &ProbabilityVector, s: usize) -> Result<f64> {
    let index = index_coincidence(p, s)?;
    Ok((index - 1.0) / (1.0 - s as f64))
}

/// The indices `I^(2), ..., I^(n)`.
#[derive(Debug, Clone, PartialEq)]
pub struct IndexVector {
    values: Vec<f64>,
}

impl IndexVector {
    /// `values[k]` is `I^(k+2)`.
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::DegreeOutOfRange {
                degree: 1,
                min: 2,
                max: usize::MAX,
            });
        }
        for (k, &v) in values.iter().enumerate() {
            if !(v.is_finite() && v > 0.0 && v <= 1.0 + INDEX_SNAP) {
                return Err(Error::InfeasibleIndex {
                    value: v,
                    outcomes: 0,
                    order: k + 2,
                });
            }
            if k > 0 && v > values[k - 1] * (1.0 + INDEX_SNAP) {
                return Err(Error::InfeasibleIndex {
                    value: v,
                    outcomes: 0,
                    order: k + 2,
                });
            }
        }
        Ok(Self { values })
    }

    pub fn from_distribution(p: &ProbabilityVector, n: usize) -> Result<Self> {
        check_degree(n, 2, usize::MAX)?;
        Ok(Self {
            values: (2..=n).map(|s| p.power_sum(s)).collect(),
        })
    }

    /// Highest order `n` present.
    pub fn degree(&self) -> usize {
        self.values.len() + 1
    }

    /// `I^(s)`, with `I^(1) = 1`.
    pub fn get(&self, s: usize) -> f64 {
        match s {
            1 => 1.0,
            _ => self.values[s - 2],
        }
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    Taylor,
    Chebyshev,
}

impl Method {
    pub const ALL: [Method; 2] = [Method::Taylor, Method::Chebyshev];

    pub fn tag(self) -> &'static str {
        match self {
            Method::Taylor => "taylor",
            Method::Chebyshev => "cheb",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "taylor" => Ok(Method::Taylor),
            "cheb" | "chebyshev" => Ok(Method::Chebyshev),
            other => Err(Error::InvalidTag(other.to_string())),
        }
    }
}

/// Lower and upper estimates of an entropy, in nats.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoSidedBound {
    pub lower: f64,
    pub upper: f64,
    /// `Υ` (or `Λ` for spectra) used to rescale the probabilities.
    pub upsilon: f64,
    pub method: Method,
    /// Degree of the polynomials actually used.
    pub degree: usize,
}

impl TwoSidedBound {
    pub fn contains(&self, value: f64, slack: f64) -> bool {
        self.lower <= value + slack && value <= self.upper + slack
    }
}

/// Largest `Υ ∈ [1/L, 1]` solving `(1-Υ)^n + (L-1)^{n-1} Υ^n = (L-1)^{n-1} I`.
///
/// It bounds the largest of `L` probabilities whose `n`-th power sum is `I`.
/// The left side increases strictly on `[1/L, 1]`, so the root is bracketed
/// and found by bisection to full double precision. The upper end of the
/// final bracket is returned.
pub fn upsilon_root(outcomes: usize, n: usize, index: f64) -> Result<f64> {
    check_degree(n, 2, usize::MAX)?;
    if outcomes < 2 {
        return Err(Error::DomainError {
            value: outcomes as f64,
            domain: "outcome count >= 2",
        });
    }
    let l = outcomes as f64;
    let minimum = l.powi(1 - n as i32);
    let infeasible = || Error::InfeasibleIndex {
        value: index,
        outcomes,
        order: n,
    };
    if !index.is_finite() || index < minimum * (1.0 - INDEX_SNAP) || index > 1.0 + INDEX_SNAP {
        return Err(infeasible());
    }
    if index <= minimum * (1.0 + INDEX_SNAP) {
        return Ok(1.0 / l);
    }
    if index >= 1.0 {
        return Ok(1.0);
    }

    // Divided through by (L-1)^{n-1} to stay in range for large L and n.
    let others = l - 1.0;
    let excess = |u: f64| {
        let v = 1.0 - u;
        v * (v / others).powi(n as i32 - 1) + u.powi(n as i32) - index
    };
    let (mut lo, mut hi) = (1.0 / l, 1.0);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            return Ok(hi);
        }
        if excess(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    if hi - lo <= 1e-13 {
        Ok(hi)
    } else {
        Err(Error::ConvergenceFailure(format!(
            "bisection bracket [{lo}, {hi}] after 200 steps"
        )))
    }
}

/// Closed form of [`upsilon_root`] for `n = 2`.
pub fn upsilon_closed_form_n2(outcomes: usize, index: f64) -> f64 {
    let l = outcomes as f64;
    (1.0 + (l - 1.0).sqrt() * (l * index - 1.0).max(0.0).sqrt()) / l
}

/// Float coefficients of one lower/upper polynomial pair.
///
/// `lower[s]` multiplies `x^s` in the lower bound on `-x ln x` (no constant
/// term); `upper[0]` is the constant term of the upper bound.
#[derive(Debug, Clone, PartialEq)]
pub struct Estimator {
    method: Method,
    degree: usize,
    lower: Vec<f64>,
    upper: Vec<f64>,
}

const MAX_CACHED_TAYLOR: usize = 64;

impl Estimator {
    /// Estimator of nominal degree `n`; the Chebyshev family is capped at 15.
    pub fn new(method: Method, n: usize) -> Result<Self> {
        check_degree(n, 2, usize::MAX)?;
        let (lower, upper) = match method {
            Method::Taylor => (taylor_lower_coeffs(n)?, taylor_upper_coeffs(n)?),
            Method::Chebyshev => {
                let m = n.min(MAX_CHEBYSHEV_DEGREE);
                (cheb_lower_coeffs(m)?, cheb_upper_coeffs(m)?)
            }
        };
        Ok(Self::from_tables(method, &lower, &upper))
    }

    fn from_tables(method: Method, lower: &CoefficientTable, upper: &CoefficientTable) -> Self {
        let dense = |t: &CoefficientTable| (0..=t.degree()).map(|s| t.value(s)).collect();
        Self {
            method,
            degree: lower.degree(),
            lower: dense(lower),
            upper: dense(upper),
        }
    }

    /// Shared instance for the common degrees.
    pub fn cached(method: Method, n: usize) -> Result<&'static Estimator> {
        static TAYLOR: OnceLock<Vec<Estimator>> = OnceLock::new();
        static CHEB: OnceLock<Vec<Estimator>> = OnceLock::new();
        check_degree(n, 2, MAX_CACHED_TAYLOR)?;
        let build = |method: Method, max: usize| {
            (2..=max)
                .map(|k| Estimator::new(method, k).expect("valid degree"))
                .collect::<Vec<_>>()
        };
        Ok(match method {
            Method::Taylor => &TAYLOR.get_or_init(|| build(Method::Taylor, MAX_CACHED_TAYLOR))[n - 2],
            Method::Chebyshev => {
                &CHEB.get_or_init(|| build(Method::Chebyshev, MAX_CHEBYSHEV_DEGREE))
                    [n.min(MAX_CHEBYSHEV_DEGREE) - 2]
            }
        })
    }

    pub fn method(&self) -> Method {
        self.method
    }

    /// Effective polynomial degree.
    pub fn degree(&self) -> usize {
        self.degree
    }

    /// Two-sided estimate of `-Σ_j p_j ln p_j` over `outcomes` probabilities
    /// bounded by `upsilon`, given their power sums `index(s)` for
    /// `s = 1..=degree` (with `index(1) = 1`).
    pub fn evaluate(&self, index: impl Fn(usize) -> f64, upsilon: f64, outcomes: f64) -> (f64, f64) {
        let log_u = upsilon.ln();
        let mut lower = -log_u;
        let mut upper = self.upper[0] * upsilon * outcomes - log_u;
        let mut scale = 1.0;
        for s in 1..=self.degree {
            let term = index(s) * scale;
            lower += self.lower[s] * term;
            upper += self.upper[s] * term;
            scale /= upsilon;
        }
        (lower, upper)
    }
}

fn prop1(idx: &IndexVector, outcomes: usize, method: Method) -> Result<TwoSidedBound> {
    let n = idx.degree();
    for s in 2..=n {
        let minimum = (outcomes as f64).powi(1 - s as i32);
        if idx.get(s) < minimum * (1.0 - INDEX_SNAP) {
            return Err(Error::InfeasibleIndex {
                value: idx.get(s),
                outcomes,
                order: s,
            });
        }
    }
    let upsilon = upsilon_root(outcomes, n, idx.get(n))?;
    let estimator = if n <= MAX_CACHED_TAYLOR {
        Estimator::cached(method, n)?.clone()
    } else {
        Estimator::new(method, n)?
    };
    let (lower, upper) = estimator.evaluate(|s| idx.get(s), upsilon, outcomes as f64);
    Ok(TwoSidedBound {
        lower,
        upper,
        upsilon,
        method,
        degree: estimator.degree(),
    })
}

/// Two-sided estimate of `H_1` from Taylor polynomials of degree `n`.
pub fn prop1_taylor(idx: &IndexVector, outcomes: usize) -> Result<TwoSidedBound> {
    prop1(idx, outcomes, Method::Taylor)
}

/// Two-sided estimate of `H_1` from the Chebyshev-derived polynomials of
/// degree `min(n, 15)`; `Υ` still uses the full-order index.
pub fn prop1_chebyshev(idx: &IndexVector, outcomes: usize) -> Result<TwoSidedBound> {
    prop1(idx, outcomes, Method::Chebyshev)
}

pub fn prop1_bound(idx: &IndexVector, outcomes: usize, method: Method) -> Result<TwoSidedBound> {
    prop1(idx, outcomes, method)
}

/// Lower bound on `H_1` from the index of coincidence, maximised over the
/// integer parameter `k ∈ 1..K`; ties go to the smaller `k`.
pub fn id_estimate(index2: f64, outcomes: usize) -> Result<f64> {
    if outcomes < 2 {
        return Err(Error::DomainError {
            value: outcomes as f64,
            domain: "outcome count >= 2",
        });
    }
    let minimum = 1.0 / outcomes as f64;
    if !index2.is_finite()
        || index2 < minimum * (1.0 - INDEX_SNAP)
        || index2 > 1.0 + INDEX_SNAP
    {
        return Err(Error::InfeasibleIndex {
            value: index2,
            outcomes,
            order: 2,
        });
    }
    let mut best = f64::NEG_INFINITY;
    for k in 1..outcomes {
        let k = k as f64;
        let log_ratio = ((k + 1.0) / k).ln();
        let value = (k + 1.0).ln() + k * log_ratio - k * (k + 1.0) * log_ratio * index2;
        if value > best {
            best = value;
        }
    }
    Ok(best)
}

/// Lower bound on the average entropy of the three qubit Pauli bases in
/// terms of the purity `tr ρ²`.
pub fn mub_bound(purity: f64) -> Result<f64> {
    if !(0.5 - 1e-12..=1.0 + 1e-12).contains(&purity) {
        return Err(Error::DomainError {
            value: purity,
            domain: "[1/2, 1]",
        });
    }
    Ok((2.0 - purity) / 3.0 * 4f64.ln())
}

/// Both sides of the conjectured inequality
/// `H_1(p) ≥ ((-1)^n / 2n²) Σ_{s=2}^n c_n^(s) H_s(p)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConjectureCheck {
    pub lhs: f64,
    pub rhs: f64,
    pub holds: bool,
}

impl ConjectureCheck {
    pub fn margin(&self) -> f64 {
        self.lhs - self.rhs
    }
}

fn conjecture_weights(n: usize) -> &'static [DoubleDouble] {
    static CACHE: OnceLock<Vec<Vec<DoubleDouble>>> = OnceLock::new();
    let all = CACHE.get_or_init(|| {
        (2..=MAX_CHEBYSHEV_DEGREE)
            .map(|n| {
                let c = cheb_shifted_coeffs(n).expect("degree in range");
                let sign = if n % 2 == 0 { 1 } else { -1 };
                // weight of (I^(s) - 1) once H_s = (I^(s) - 1)/(1 - s) is substituted
                (0..=n)
                    .map(|s| {
                        if s < 2 {
                            return DoubleDouble::ZERO;
                        }
                        let w = c.get(s).unwrap()
                            * BigRational::new(
                                BigInt::from(sign),
                                BigInt::from(2 * n * n) * BigInt::from(1 - s as i64),
                            );
                        DoubleDouble::from_rational(&w)
                    })
                    .collect()
            })
            .collect()
    });
    &all[n - 2]
}

/// Checks the conjectured Shannon–Tsallis inequality at degree `n`.
///
/// The right side mixes coefficients up to 4e10 with Tsallis entropies of
/// order one, so the power sums and the weighted sum are carried in
/// double-double arithmetic.
pub fn tsan1_check(p: &ProbabilityVector, n: usize) -> Result<ConjectureCheck> {
    check_degree(n, 2, MAX_CHEBYSHEV_DEGREE)?;
    let weights = conjecture_weights(n);
    let mut sums = vec![DoubleDouble::ZERO; n + 1];
    for &x in p.probs() {
        let mut power = DoubleDouble::from_f64(x);
        for sum in sums.iter_mut().skip(2) {
            power = power.mul_f64(x);
            *sum = sum.add(power);
        }
    }
    let rhs = (2..=n)
        .fold(DoubleDouble::ZERO, |acc, s| {
            acc.add(weights[s].mul(sums[s].add_f64(-1.0)))
        })
        .to_f64();
    let lhs = shannon_entropy(p);
    Ok(ConjectureCheck {
        lhs,
        rhs,
        holds: lhs >= rhs - 1e-12,
    })
}

/// Right side of the conjecture in plain binary64, straight from the Tsallis
/// entropies; kept for cross-checking [`tsan1_check`].
pub fn tsan1_rhs_plain(p: &ProbabilityVector, n: usize) -> Result<f64> {
    let c = cheb_shifted_coeffs(n)?;
    let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
    let mut total = 0.0;
    for s in 2..=n {
        total += c.get(s).unwrap().to_f64().unwrap() * tsallis_entropy(p, s)?;
    }
    Ok(sign / (2.0 * (n * n) as f64) * total)
}
