//! Exact coefficient tables for the polynomial entropy estimators.
//!
//! Five families are generated, all as exact rationals:
//!
//! | family | polynomial |
//! |---|---|
//! | [`Family::ChebyshevC`] | shifted Chebyshev `T*_n(x) = T_n(2x - 1) = Σ c_s x^s` |
//! | [`Family::TaylorLower`] | `f_n(x) = x Σ_{r<n} (1-x)^r / r`, a lower bound on `-x ln x` |
//! | [`Family::TaylorUpper`] | `h_n(x)`, an upper bound on `-x ln x` with constant term `1/n` |
//! | [`Family::ChebLower`] | `-g_n(x)`, the Chebyshev-derived lower bound on `-x ln x` |
//! | [`Family::ChebUpper`] | the upper bound on `-x ln x` obtained by integrating `ln x ≤ g_n(x)/x` |
//!
//! Floats are produced only at the evaluation boundary ([`CoefficientTable::float_entries`]).

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::dd::DoubleDouble;
use crate::error::{check_degree, Error, Result};

/// Largest degree for which the Chebyshev-derived families are exposed.
pub const MAX_CHEBYSHEV_DEGREE: usize = 15;

/// Published integer coefficients `c_n^(s)` of the shifted Chebyshev
/// polynomials for `2 ≤ s ≤ n ≤ 15`; row `n - 2` lists `s = 2..=n`.
pub const SHIFTED_CHEBYSHEV_TABLE: [&[i64]; 14] = [
    &[8],
    &[-48, 32],
    &[160, -256, 128],
    &[-400, 1120, -1280, 512],
    &[840, -3584, 6912, -6144, 2048],
    &[-1568, 9408, -26880, 39424, -28672, 8192],
    &[2688, -21504, 84480, -180224, 212992, -131072, 32768],
    &[-4320, 44352, -228096, 658944, -1118208, 1105920, -589824, 131072],
    &[6600, -84480, 549120, -2050048, 4659200, -6553600, 5570560, -2621440, 524288],
    &[
        -9680, 151008, -1208064, 5637632, -16400384, 30638080, -36765696, 27394048, -11534336,
        2097152,
    ],
    &[
        13728, -256256, 2471040, -14057472, 50692096, -120324096, 190513152, -199229440,
        132120576, -50331648, 8388608,
    ],
    &[
        -18928, 416416, -4759040, 32361472, -141213696, 412778496, -825556992, 1133117440,
        -1049624576, 627048448, -218103808, 33554432,
    ],
    &[
        25480, -652288, 8712704, -69701632, 361181184, -1270087680, 3111714816, -5369233408,
        6499598336, -5402263552, 2936012800, -939524096, 134217728,
    ],
    &[
        -33600, 990080, -15275520, 141892608, -859955200, 3572121600, -10478223360, 22052208640,
        -33426505728, 36175872000, -27262976000, 13589544960, -4026531840, 536870912,
    ],
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Family {
    ChebyshevC,
    TaylorLower,
    TaylorUpper,
    ChebLower,
    ChebUpper,
}

impl Family {
    pub const ALL: [Family; 5] = [
        Family::ChebyshevC,
        Family::TaylorLower,
        Family::TaylorUpper,
        Family::ChebLower,
        Family::ChebUpper,
    ];

    /// Short command-line name.
    pub fn tag(self) -> &'static str {
        match self {
            Family::ChebyshevC => "c",
            Family::TaylorLower => "a",
            Family::TaylorUpper => "b",
            Family::ChebLower => "wa",
            Family::ChebUpper => "wb",
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Family::ALL
            .into_iter()
            .find(|fam| fam.tag() == s)
            .ok_or_else(|| Error::InvalidTag(s.to_string()))
    }
}

/// Coefficients of one estimator family at a fixed degree, keyed by power.
#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientTable {
    family: Family,
    degree: usize,
    entries: BTreeMap<usize, BigRational>,
    float_entries: BTreeMap<usize, f64>,
}

impl CoefficientTable {
    fn new(family: Family, degree: usize, entries: BTreeMap<usize, BigRational>) -> Self {
        let float_entries = entries
            .iter()
            .map(|(&s, r)| (s, r.to_f64().unwrap_or(f64::NAN)))
            .collect();
        Self {
            family,
            degree,
            entries,
            float_entries,
        }
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn entries(&self) -> &BTreeMap<usize, BigRational> {
        &self.entries
    }

    pub fn float_entries(&self) -> &BTreeMap<usize, f64> {
        &self.float_entries
    }

    pub fn get(&self, s: usize) -> Option<&BigRational> {
        self.entries.get(&s)
    }

    /// Float value of the coefficient of `x^s`, zero when absent.
    pub fn value(&self, s: usize) -> f64 {
        self.float_entries.get(&s).copied().unwrap_or(0.0)
    }

    /// Exact sum of all stored coefficients, i.e. the polynomial at `x = 1`.
    pub fn sum(&self) -> BigRational {
        self.entries.values().fold(BigRational::zero(), |acc, r| acc + r)
    }

    /// Dense exact coefficient vector for powers `0..=degree`.
    pub fn dense(&self) -> Vec<BigRational> {
        (0..=self.degree)
            .map(|s| self.entries.get(&s).cloned().unwrap_or_else(BigRational::zero))
            .collect()
    }

    /// Dense double-double coefficients for powers `0..=degree`.
    pub fn dense_dd(&self) -> Vec<DoubleDouble> {
        self.dense().iter().map(DoubleDouble::from_rational).collect()
    }

    /// Exact polynomial value at a rational point.
    pub fn eval_exact(&self, x: &BigRational) -> BigRational {
        self.dense()
            .iter()
            .rev()
            .fold(BigRational::zero(), |acc, c| acc * x + c)
    }
}

fn ratio(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

fn int(n: impl Into<BigInt>) -> BigRational {
    BigRational::from_integer(n.into())
}

/// Rows `0..=max_row` of Pascal's triangle in exact integers.
pub(crate) fn pascal(max_row: usize) -> Vec<Vec<BigInt>> {
    let mut rows: Vec<Vec<BigInt>> = Vec::with_capacity(max_row + 1);
    rows.push(vec![BigInt::one()]);
    for r in 1..=max_row {
        let prev = &rows[r - 1];
        let mut row = Vec::with_capacity(r + 1);
        row.push(BigInt::one());
        for k in 1..r {
            row.push(&prev[k - 1] + &prev[k]);
        }
        row.push(BigInt::one());
        rows.push(row);
    }
    rows
}

fn binom(rows: &[Vec<BigInt>], n: usize, k: usize) -> BigInt {
    if k > n {
        BigInt::zero()
    } else {
        rows[n][k].clone()
    }
}

fn sign(exp: usize) -> BigInt {
    if exp % 2 == 0 {
        BigInt::one()
    } else {
        -BigInt::one()
    }
}

fn harmonic(from: usize, to: usize) -> BigRational {
    (from..=to).fold(BigRational::zero(), |acc, r| acc + ratio(1, r as i64))
}

/// Coefficients `c_n^(s)`, `s = 0..=n`, of the shifted Chebyshev polynomial `T*_n`.
pub fn cheb_shifted_coeffs(n: usize) -> Result<CoefficientTable> {
    check_degree(n, 0, MAX_CHEBYSHEV_DEGREE)?;
    let mut entries = BTreeMap::new();
    if n == 0 {
        entries.insert(0, BigRational::one());
        return Ok(CoefficientTable::new(Family::ChebyshevC, 0, entries));
    }
    let rows = pascal(2 * n);
    for s in 0..=n {
        // (-1)^(n+s) 2^(2s-1) [2 C(n+s, n-s) - C(n+s-1, n-s)]
        let bracket = BigInt::from(2) * binom(&rows, n + s, n - s) - binom(&rows, n + s - 1, n - s);
        let value = sign(n + s) * (BigInt::from(4).pow(s as u32) * bracket) / BigInt::from(2);
        entries.insert(s, BigRational::from_integer(value));
    }
    Ok(CoefficientTable::new(Family::ChebyshevC, n, entries))
}

/// Coefficients `a_n^(s)`, `s = 1..=n`, of the Taylor lower polynomial `f_n`.
pub fn taylor_lower_coeffs(n: usize) -> Result<CoefficientTable> {
    check_degree(n, 2, usize::MAX)?;
    let rows = pascal(n);
    let mut entries = BTreeMap::new();
    entries.insert(1, harmonic(1, n - 1));
    for s in 2..=n {
        let sum = (s - 1..n).fold(BigRational::zero(), |acc, r| {
            acc + BigRational::new(binom(&rows, r, s - 1), BigInt::from(r))
        });
        entries.insert(s, sum * int(sign(s - 1)));
    }
    Ok(CoefficientTable::new(Family::TaylorLower, n, entries))
}

/// Constant term `1/n` and coefficients `b_n^(s)`, `s = 1..=n`, of the
/// Taylor upper polynomial `h_n`.
pub fn taylor_upper_coeffs(n: usize) -> Result<CoefficientTable> {
    check_degree(n, 2, usize::MAX)?;
    let rows = pascal(n);
    let mut entries = BTreeMap::new();
    entries.insert(0, ratio(1, n as i64));
    entries.insert(1, harmonic(2, n - 1));
    for s in 2..=n {
        let sum = (s - 1..n).fold(BigRational::zero(), |acc, r| {
            acc + BigRational::new(binom(&rows, r, s - 1), BigInt::from(r))
        });
        entries.insert(s, sum * int(sign(s - 1)) / int(s as i64));
    }
    Ok(CoefficientTable::new(Family::TaylorUpper, n, entries))
}

/// Coefficients of the Chebyshev-derived lower polynomial `Σ ŵa_n^(s) x^s = -g_n(x)`.
pub fn cheb_lower_coeffs(n: usize) -> Result<CoefficientTable> {
    check_degree(n, 2, MAX_CHEBYSHEV_DEGREE)?;
    let c = cheb_shifted_coeffs(n)?;
    let prefactor = BigRational::new(sign(n + 1), BigInt::from(2 * n * n));
    let mut entries = BTreeMap::new();
    let mut linear = BigRational::zero();
    for s in 2..=n {
        let term = &prefactor * &c.entries[&s] / int(s as i64 - 1);
        linear -= &term;
        entries.insert(s, term);
    }
    entries.insert(1, linear);
    Ok(CoefficientTable::new(Family::ChebLower, n, entries))
}

/// Constant term `ŵb_n^(0)` and coefficients `ŵb_n^(s)` of the
/// Chebyshev-derived upper polynomial.
pub fn cheb_upper_coeffs(n: usize) -> Result<CoefficientTable> {
    let lower = cheb_lower_coeffs(n)?;
    let mut entries = BTreeMap::new();
    let mut constant = BigRational::one();
    for (&s, a) in &lower.entries {
        constant -= a / int(s as i64);
    }
    entries.insert(0, constant);
    entries.insert(1, &lower.entries[&1] - BigRational::one());
    for s in 2..=n {
        entries.insert(s, &lower.entries[&s] / int(s as i64));
    }
    Ok(CoefficientTable::new(Family::ChebUpper, n, entries))
}

/// Dispatch by family.
pub fn coefficients(family: Family, n: usize) -> Result<CoefficientTable> {
    match family {
        Family::ChebyshevC => cheb_shifted_coeffs(n),
        Family::TaylorLower => taylor_lower_coeffs(n),
        Family::TaylorUpper => taylor_upper_coeffs(n),
        Family::ChebLower => cheb_lower_coeffs(n),
        Family::ChebUpper => cheb_upper_coeffs(n),
    }
}

/// Largest absolute numerator over all entries, used by magnitude checks.
pub fn max_abs_numerator(table: &CoefficientTable) -> BigInt {
    table
        .entries
        .values()
        .map(|r| r.numer().abs())
        .max()
        .unwrap_or_else(BigInt::zero)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> BigRational {
        ratio(n, d)
    }

    /// `T*_{n+1} = 2(2x - 1) T*_n - T*_{n-1}`, independent of the closed form.
    fn chebyshev_by_recurrence(max_n: usize) -> Vec<Vec<BigInt>> {
        let mut polys: Vec<Vec<BigInt>> = vec![vec![BigInt::one()], vec![BigInt::from(-1), BigInt::from(2)]];
        for n in 1..max_n {
            let mut next = vec![BigInt::zero(); n + 2];
            for (k, c) in polys[n].iter().enumerate() {
                next[k + 1] += BigInt::from(4) * c;
                next[k] -= BigInt::from(2) * c;
            }
            for (k, c) in polys[n - 1].iter().enumerate() {
                next[k] -= c;
            }
            polys.push(next);
        }
        polys
    }

    #[test]
    fn closed_form_matches_recurrence() {
        let reference = chebyshev_by_recurrence(MAX_CHEBYSHEV_DEGREE);
        for n in 0..=MAX_CHEBYSHEV_DEGREE {
            let table = cheb_shifted_coeffs(n).unwrap();
            for s in 0..=n {
                assert_eq!(table.get(s).unwrap(), &int(reference[n][s].clone()), "n={n} s={s}");
            }
        }
    }

    #[test]
    fn published_table_matches() {
        for (row, values) in SHIFTED_CHEBYSHEV_TABLE.iter().enumerate() {
            let n = row + 2;
            let table = cheb_shifted_coeffs(n).unwrap();
            assert_eq!(values.len(), n - 1);
            for (offset, &v) in values.iter().enumerate() {
                assert_eq!(table.get(offset + 2).unwrap(), &int(v), "n={n} s={}", offset + 2);
            }
        }
    }

    #[test]
    fn chebyshev_examples() {
        let c3 = cheb_shifted_coeffs(3).unwrap();
        let expect = [-1, 18, -48, 32];
        for (s, &v) in expect.iter().enumerate() {
            assert_eq!(c3.get(s).unwrap(), &int(v));
        }
        assert_eq!(cheb_shifted_coeffs(15).unwrap().get(15).unwrap(), &int(536870912));
        let c0 = cheb_shifted_coeffs(0).unwrap();
        assert_eq!(c0.entries().len(), 1);
        assert_eq!(c0.get(0).unwrap(), &int(1));
        for n in 1..=MAX_CHEBYSHEV_DEGREE {
            let c = cheb_shifted_coeffs(n).unwrap();
            let nn = (n * n) as i64;
            let expected = if n % 2 == 0 { -2 * nn } else { 2 * nn };
            assert_eq!(c.get(1).unwrap(), &int(expected));
            assert_eq!(c.sum(), int(1), "T*_n(1) = 1");
        }
    }

    #[test]
    fn chebyshev_degree_out_of_range() {
        assert!(matches!(
            cheb_shifted_coeffs(16),
            Err(Error::DegreeOutOfRange { degree: 16, .. })
        ));
        assert!(cheb_lower_coeffs(1).is_err());
        assert!(cheb_upper_coeffs(16).is_err());
        assert!(taylor_lower_coeffs(1).is_err());
        assert!(taylor_upper_coeffs(0).is_err());
    }

    #[test]
    fn chebyshev_matches_cosine_on_grid() {
        for n in 0..=MAX_CHEBYSHEV_DEGREE {
            let coeffs = cheb_shifted_coeffs(n).unwrap().dense_dd();
            for i in 0..=100 {
                let x = i as f64 / 100.0;
                let expected = (n as f64 * (2.0 * x - 1.0).clamp(-1.0, 1.0).acos()).cos();
                let got = crate::dd::horner(&coeffs, x);
                assert!((got - expected).abs() < 1e-9, "n={n} x={x}: {got} vs {expected}");
            }
        }
    }

    #[test]
    fn chebyshev_magnitudes_fit_in_i64() {
        let limit = BigInt::from(i64::MAX);
        for n in 0..=MAX_CHEBYSHEV_DEGREE {
            assert!(max_abs_numerator(&cheb_shifted_coeffs(n).unwrap()) < limit);
        }
    }

    #[test]
    fn taylor_examples() {
        let a2 = taylor_lower_coeffs(2).unwrap();
        assert_eq!(a2.get(1).unwrap(), &q(1, 1));
        assert_eq!(a2.get(2).unwrap(), &q(-1, 1));
        assert!(a2.get(0).is_none());

        let a3 = taylor_lower_coeffs(3).unwrap();
        assert_eq!(a3.get(1).unwrap(), &q(3, 2));
        assert_eq!(a3.get(2).unwrap(), &q(-2, 1));
        assert_eq!(a3.get(3).unwrap(), &q(1, 2));

        let b2 = taylor_upper_coeffs(2).unwrap();
        assert_eq!(b2.get(0).unwrap(), &q(1, 2));
        assert_eq!(b2.get(1).unwrap(), &q(0, 1));
        assert_eq!(b2.get(2).unwrap(), &q(-1, 2));

        assert_eq!(taylor_upper_coeffs(3).unwrap().get(2).unwrap(), &q(-1, 1));
    }

    #[test]
    fn taylor_sum_rules() {
        for n in 2..=40 {
            let a = taylor_lower_coeffs(n).unwrap();
            assert!(a.sum().is_zero(), "n={n}");
            let b = taylor_upper_coeffs(n).unwrap();
            assert_eq!(b.get(0).unwrap(), &q(1, n as i64));
            assert!(b.sum().is_zero(), "h_n(1) = 0 for n={n}");
        }
    }

    #[test]
    fn taylor_large_degree_stays_exact() {
        // C(63, 31)/63 alone exceeds 2^53; the table must not lose it.
        let a = taylor_lower_coeffs(64).unwrap();
        assert!(a.sum().is_zero());
        assert!(max_abs_numerator(&a) > BigInt::from(1u64 << 53));
    }

    #[test]
    fn taylor_matches_product_form_exactly() {
        for n in 2..=12 {
            let a = taylor_lower_coeffs(n).unwrap();
            let b = taylor_upper_coeffs(n).unwrap();
            for k in 0..=8 {
                let x = q(k, 8);
                let z = BigRational::one() - &x;
                let mut series = BigRational::zero();
                let mut zr = BigRational::one();
                let mut upper_series = BigRational::zero();
                for r in 1..n {
                    zr *= &z;
                    series += &zr / int(r as i64);
                    upper_series += &zr / int((r * (r + 1)) as i64);
                }
                assert_eq!(a.eval_exact(&x), &x * &series);
                assert_eq!(b.eval_exact(&x), &z * (BigRational::one() - upper_series));
            }
        }
    }

    #[test]
    fn chebyshev_lower_examples() {
        let w2 = cheb_lower_coeffs(2).unwrap();
        assert_eq!(w2.get(1).unwrap(), &q(1, 1));
        assert_eq!(w2.get(2).unwrap(), &q(-1, 1));
        assert_eq!(w2, CoefficientTable { family: Family::ChebLower, ..taylor_lower_coeffs(2).unwrap() });

        let w3 = cheb_lower_coeffs(3).unwrap();
        assert_eq!(w3.get(1).unwrap(), &q(16, 9));
        assert_eq!(w3.get(2).unwrap(), &q(-8, 3));
        assert_eq!(w3.get(3).unwrap(), &q(8, 9));
    }

    #[test]
    fn chebyshev_upper_examples() {
        let wb2 = cheb_upper_coeffs(2).unwrap();
        assert_eq!(wb2.get(0).unwrap(), &q(1, 2));
        assert_eq!(wb2.get(1).unwrap(), &q(0, 1));
        assert_eq!(wb2.get(2).unwrap(), &q(-1, 2));
        assert_eq!(cheb_upper_coeffs(3).unwrap().get(2).unwrap(), &q(-4, 3));
    }

    #[test]
    fn chebyshev_sum_rules() {
        for n in 2..=MAX_CHEBYSHEV_DEGREE {
            assert!(cheb_lower_coeffs(n).unwrap().sum().is_zero(), "n={n}");
            assert!(cheb_upper_coeffs(n).unwrap().sum().is_zero(), "n={n}");
        }
    }

    #[test]
    fn family_tags_round_trip() {
        for fam in Family::ALL {
            assert_eq!(fam.tag().parse::<Family>().unwrap(), fam);
        }
        assert!(matches!("d".parse::<Family>(), Err(Error::InvalidTag(_))));
    }
}
