//! Pointwise polynomial estimators of `x ln x` on `[0, 1]` and their envelopes.
//!
//! * `f_n(x) ≤ -x ln x ≤ h_n(x)` are truncations of Taylor series about `x = 1`.
//! * `x ln x ≤ g_n(x)` is the Chebyshev-derived family, built from the
//!   coefficients of `T*_n`; its integrated companion bounds `-x ln x` from above.
//!
//! The Chebyshev family is only known to hold numerically in the interior of
//! the interval, so [`verify_envelope`] measures the worst margin over a dense
//! grid and, for `g_n`, additionally over the analytic validity ranges near
//! each endpoint.

use std::fmt;
use std::str::FromStr;
use std::sync::OnceLock;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use rayon::prelude::*;

use crate::coefficients::{cheb_lower_coeffs, cheb_upper_coeffs, MAX_CHEBYSHEV_DEGREE};
use crate::dd::{horner, DoubleDouble};
use crate::error::{check_degree, check_unit_interval, Error, Result};
use crate::poly::RatPoly;

/// Margin below which a sampled inequality counts as violated.
pub const SLACK_TOLERANCE: f64 = -1e-13;

/// `x ln x` with the removable singularity at zero filled in.
pub fn x_ln_x(x: f64) -> f64 {
    if x == 0.0 {
        0.0
    } else {
        x * x.ln()
    }
}

/// `f_n(x) = x Σ_{r=1}^{n-1} (1-x)^r / r`.
pub fn eval_f(n: usize, x: f64) -> Result<f64> {
    check_degree(n, 2, usize::MAX)?;
    check_unit_interval(x)?;
    Ok(taylor_lower_value(n, x))
}

fn taylor_lower_value(n: usize, x: f64) -> f64 {
    let z = 1.0 - x;
    let mut zr = 1.0;
    let mut sum = 0.0;
    for r in 1..n {
        zr *= z;
        sum += zr / r as f64;
    }
    x * sum
}

/// `h_n(x) = (1-x)(1 - Σ_{r=1}^{n-1} (1-x)^r / (r(r+1)))`.
pub fn eval_h(n: usize, x: f64) -> Result<f64> {
    check_degree(n, 2, usize::MAX)?;
    check_unit_interval(x)?;
    Ok(taylor_upper_value(n, x))
}

fn taylor_upper_value(n: usize, x: f64) -> f64 {
    let z = 1.0 - x;
    let mut zr = 1.0;
    let mut sum = 0.0;
    for r in 1..n {
        zr *= z;
        sum += zr / (r * (r + 1)) as f64;
    }
    z * (1.0 - sum)
}

struct ChebPolys {
    g: Vec<DoubleDouble>,
    upper: Vec<DoubleDouble>,
}

fn cheb_polys(n: usize) -> &'static ChebPolys {
    static CACHE: OnceLock<Vec<ChebPolys>> = OnceLock::new();
    let all = CACHE.get_or_init(|| {
        (2..=MAX_CHEBYSHEV_DEGREE)
            .map(|n| {
                let lower = cheb_lower_coeffs(n).expect("degree in range");
                let upper = cheb_upper_coeffs(n).expect("degree in range");
                ChebPolys {
                    g: lower
                        .dense()
                        .iter()
                        .map(|c| DoubleDouble::from_rational(&-c))
                        .collect(),
                    upper: upper.dense_dd(),
                }
            })
            .collect()
    });
    &all[n - 2]
}

/// `g_n(x) = ((-1)^n / (2n^2)) Σ_{s=2}^n c_n^(s) (x^s - x)/(s - 1)`.
pub fn eval_g(n: usize, x: f64) -> Result<f64> {
    check_degree(n, 2, MAX_CHEBYSHEV_DEGREE)?;
    check_unit_interval(x)?;
    Ok(horner(&cheb_polys(n).g, x))
}

/// The Chebyshev-derived upper polynomial `ŵb_n^(0) + Σ ŵb_n^(s) x^s ≥ -x ln x`.
pub fn eval_cheb_upper(n: usize, x: f64) -> Result<f64> {
    check_degree(n, 2, MAX_CHEBYSHEV_DEGREE)?;
    check_unit_interval(x)?;
    Ok(horner(&cheb_polys(n).upper, x))
}

/// Exact `g_n` as a polynomial in `x`.
pub fn g_polynomial(n: usize) -> Result<RatPoly> {
    let lower = cheb_lower_coeffs(n)?;
    Ok(-&RatPoly::new(lower.dense()))
}

/// First derivatives of `g_n` at both ends of the unit interval.
#[derive(Debug, Clone, PartialEq)]
pub struct EndpointDerivatives {
    pub at_zero: BigRational,
    pub at_one: BigRational,
}

/// Closed-form `g_n'(0)` and `g_n'(1)`.
///
/// `g_n'(1)` is `1` for even `n` and `1 - 1/n^2` for odd `n`; `g_n'(0)` is a
/// finite positive-term sum, so its sign is manifest.
pub fn g_endpoint_derivatives(n: usize) -> Result<EndpointDerivatives> {
    check_degree(n, 2, MAX_CHEBYSHEV_DEGREE)?;
    let q = |a: i64, b: i64| BigRational::new(BigInt::from(a), BigInt::from(b));
    let nn = (n * n) as i64;
    let n = n as i64;
    let sum = (1..=n / 2).fold(BigRational::zero(), |acc, r| {
        if n % 2 == 1 {
            acc + q(4 * r * r, n - 2 * r)
        } else {
            acc + q((2 * r - 1) * (2 * r - 1), n - 2 * r + 1)
        }
    });
    let at_zero = -q(4, nn) * sum;
    let at_one = if n % 2 == 0 {
        BigRational::one()
    } else {
        BigRational::one() - q(1, nn)
    };
    Ok(EndpointDerivatives { at_zero, at_one })
}

/// Exact coefficients (in `x`) of `g_n''`, from termwise differentiation.
pub fn g_second_derivative_coeffs(n: usize) -> Result<RatPoly> {
    Ok(g_polynomial(n)?.derivative().derivative())
}

/// Gegenbauer polynomial `C_n^(2)(ξ)` by the three-term recurrence
/// `n C_n = 2(n+1) ξ C_{n-1} - (n+2) C_{n-2}`.
pub fn gegenbauer_c2(n: usize, xi: f64) -> f64 {
    let mut prev = 1.0;
    if n == 0 {
        return prev;
    }
    let mut cur = 4.0 * xi;
    for k in 2..=n {
        let k = k as f64;
        let next = (2.0 * (k + 1.0) * xi * cur - (k + 2.0) * prev) / k;
        prev = cur;
        cur = next;
    }
    cur
}

/// `g_n''(x)` through its Gegenbauer representation with `ξ = 2x - 1`.
///
/// Singular (0/0) at `x = 0`; callers sample `(0, 1]`.
pub fn g_second_derivative_gegenbauer(n: usize, x: f64) -> Result<f64> {
    check_degree(n, 2, MAX_CHEBYSHEV_DEGREE)?;
    let xi = 2.0 * x - 1.0;
    let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
    let nn = (n * n) as f64;
    let lower = if n >= 3 { gegenbauer_c2(n - 3, xi) } else { 0.0 };
    let numerator = gegenbauer_c2(n - 1, xi) - lower + sign * nn;
    Ok(2.0 * sign / nn * numerator / (xi + 1.0))
}

/// Right end of the range `[0, exp(g_n'(0))]` on which `x ln x ≤ g_n(x)` follows
/// from convexity of `g_n`.
pub fn near_zero_validity(n: usize) -> Result<f64> {
    let d = g_endpoint_derivatives(n)?;
    Ok(d.at_zero.to_f64().unwrap_or(f64::NAN).exp())
}

/// Left end of the range next to `x = 1` on which `x ln x ≤ g_n(x)` follows
/// from Taylor's theorem with Lagrange remainder.
pub fn near_one_validity(n: usize) -> Result<f64> {
    check_degree(n, 2, MAX_CHEBYSHEV_DEGREE)?;
    let nn = (n * n) as f64;
    Ok(match n {
        2 => 0.0,
        _ if n % 2 == 1 => 1.0 - 2.0 / (nn + 2.0),
        _ => 1.0 - 9.0 / (2.0 * nn),
    })
}

/// Which pointwise inequality is being checked.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Inequality {
    /// `f_n(x) ≤ -x ln x`
    TaylorLower,
    /// `-x ln x ≤ h_n(x)`
    TaylorUpper,
    /// `x ln x ≤ g_n(x)`
    ChebLower,
    /// `-x ln x ≤ ŵb_n^(0) + Σ ŵb_n^(s) x^s`
    ChebUpper,
}

impl Inequality {
    pub const ALL: [Inequality; 4] = [
        Inequality::TaylorLower,
        Inequality::TaylorUpper,
        Inequality::ChebLower,
        Inequality::ChebUpper,
    ];

    pub fn tag(self) -> &'static str {
        match self {
            Inequality::TaylorLower => "taylor-lower",
            Inequality::TaylorUpper => "taylor-upper",
            Inequality::ChebLower => "cheb-lower",
            Inequality::ChebUpper => "cheb-upper",
        }
    }

    fn check_degree(self, n: usize) -> Result<()> {
        match self {
            Inequality::TaylorLower | Inequality::TaylorUpper => check_degree(n, 2, usize::MAX),
            Inequality::ChebLower | Inequality::ChebUpper => {
                check_degree(n, 2, MAX_CHEBYSHEV_DEGREE)
            }
        }
    }

    /// Margin of the inequality at `x`; nonnegative where it holds.
    /// Assumes the degree was validated.
    fn slack_unchecked(self, n: usize, x: f64) -> f64 {
        let y = x_ln_x(x);
        match self {
            Inequality::TaylorLower => -y - taylor_lower_value(n, x),
            Inequality::TaylorUpper => taylor_upper_value(n, x) + y,
            Inequality::ChebLower => horner(&cheb_polys(n).g, x) - y,
            Inequality::ChebUpper => horner(&cheb_polys(n).upper, x) + y,
        }
    }

    pub fn slack(self, n: usize, x: f64) -> Result<f64> {
        self.check_degree(n)?;
        check_unit_interval(x)?;
        Ok(self.slack_unchecked(n, x))
    }
}

impl fmt::Display for Inequality {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for Inequality {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Inequality::ALL
            .into_iter()
            .find(|i| i.tag() == s)
            .ok_or_else(|| Error::InvalidTag(s.to_string()))
    }
}

/// Sampling grid on `[0, 1]`: a uniform part including both endpoints plus
/// Chebyshev-clustered points within `cluster_width` of each endpoint.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub uniform: usize,
    pub clustered: usize,
    pub cluster_width: f64,
}

impl Default for GridSpec {
    fn default() -> Self {
        Self {
            uniform: 1_000_000,
            clustered: 10_000,
            cluster_width: 1e-2,
        }
    }
}

impl GridSpec {
    pub fn with_uniform(uniform: usize) -> Self {
        Self {
            uniform,
            ..Self::default()
        }
    }

    pub fn len(&self) -> usize {
        self.uniform.max(2) + 2 * self.clustered
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn points(&self) -> Vec<f64> {
        let m = self.uniform.max(2);
        let mut pts: Vec<f64> = (0..m).map(|i| i as f64 / (m - 1) as f64).collect();
        let c = self.clustered;
        for k in 1..=c {
            let t = self.cluster_width
                * (1.0 - (std::f64::consts::FRAC_PI_2 * k as f64 / c as f64).cos());
            pts.push(t);
            pts.push(1.0 - t);
        }
        pts
    }
}

/// Worst margin of one inequality over the dense ranges where it is proved
/// near the endpoints.
#[derive(Debug, Clone, PartialEq)]
pub struct EndpointCheck {
    pub near_zero: (f64, f64),
    pub near_one: (f64, f64),
    pub min_slack: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EnvelopeReport {
    pub degree: usize,
    pub tag: Inequality,
    pub grid_size: usize,
    pub min_slack: f64,
    pub argmin_x: f64,
    /// Largest margin over the grid, i.e. the worst approximation error.
    pub max_slack: f64,
    pub endpoint_check: Option<EndpointCheck>,
}

impl EnvelopeReport {
    pub fn holds(&self) -> bool {
        self.min_slack >= SLACK_TOLERANCE
            && self
                .endpoint_check
                .as_ref()
                .map_or(true, |c| c.min_slack >= SLACK_TOLERANCE)
    }

    pub fn csv_header() -> &'static str {
        "n,tag,grid,min_slack,argmin_x"
    }

    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{:.16e},{:.16e}",
            self.degree, self.tag, self.grid_size, self.min_slack, self.argmin_x
        )
    }
}

fn scan(tag: Inequality, n: usize, points: &[f64]) -> (f64, f64, f64) {
    points
        .par_iter()
        .map(|&x| {
            let s = tag.slack_unchecked(n, x);
            (s, x, s)
        })
        .reduce(
            || (f64::INFINITY, f64::NAN, f64::NEG_INFINITY),
            |a, b| {
                let (min, arg) = if b.0 < a.0 || (b.0 == a.0 && b.1 < a.1) {
                    (b.0, b.1)
                } else {
                    (a.0, a.1)
                };
                (min, arg, a.2.max(b.2))
            },
        )
}

fn dense_range(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    (0..count)
        .map(|i| lo + (hi - lo) * i as f64 / (count - 1) as f64)
        .collect()
}

/// Worst margin of `tag` at degree `n` over `grid`.
pub fn verify_envelope(n: usize, tag: Inequality, grid: &GridSpec) -> Result<EnvelopeReport> {
    tag.check_degree(n)?;
    let points = grid.points();
    let (min_slack, argmin_x, max_slack) = scan(tag, n, &points);

    let endpoint_check = if tag == Inequality::ChebLower {
        let near_zero = (0.0, near_zero_validity(n)?);
        let near_one = (near_one_validity(n)?, 1.0);
        let count = grid.clustered.max(1000);
        let mut pts = dense_range(near_zero.0, near_zero.1, count);
        pts.extend(dense_range(near_one.0, near_one.1, count));
        let (min, _, _) = scan(tag, n, &pts);
        Some(EndpointCheck {
            near_zero,
            near_one,
            min_slack: min,
        })
    } else {
        None
    };

    Ok(EnvelopeReport {
        degree: n,
        tag,
        grid_size: points.len(),
        min_slack,
        argmin_x,
        max_slack,
        endpoint_check,
    })
}
