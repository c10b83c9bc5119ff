//! The full verification run behind `shannon-bounds suite`.

use std::fmt::Write as _;
use std::time::Instant;

use num_bigint::BigInt;

use crate::bounds::{
    prop1_bound, shannon_entropy, tsan1_check, upsilon_closed_form_n2, upsilon_root, IndexVector, Method,
    ProbabilityVector,
};
use crate::coefficients::{cheb_shifted_coeffs, MAX_CHEBYSHEV_DEGREE, SHIFTED_CHEBYSHEV_TABLE};
use crate::designs::{builtin_design, verify_design, verify_design_at, BuiltinDesign, MomentVector};
use crate::error::Result;
use crate::estimators::{verify_envelope, GridSpec, Inequality, SLACK_TOLERANCE};
use crate::relations::{prop2_bounds, random_state, state_independent_check, von_neumann_bounds};
use crate::sampling::{dirichlet, min_over_samples, random_distribution};

#[derive(Debug, Clone, PartialEq)]
pub struct SuiteConfig {
    pub seed: u64,
    pub grid: GridSpec,
    /// Random distributions for the entropy sandwich and the conjecture.
    pub distributions: usize,
    /// Random states per design and method.
    pub states: usize,
    /// Reference rows compared against the generated coefficients; replaced
    /// only to exercise the failure path.
    pub table1_reference: Vec<Vec<i64>>,
}

impl SuiteConfig {
    pub fn full(seed: u64) -> Self {
        Self {
            seed,
            grid: GridSpec::default(),
            distributions: 100_000,
            states: 10_000,
            table1_reference: SHIFTED_CHEBYSHEV_TABLE.iter().map(|r| r.to_vec()).collect(),
        }
    }

    pub fn quick(seed: u64) -> Self {
        Self {
            grid: GridSpec {
                uniform: 10_000,
                clustered: 1_000,
                ..GridSpec::default()
            },
            distributions: 5_000,
            states: 1_000,
            ..Self::full(seed)
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CheckResult {
    pub name: &'static str,
    pub passed: bool,
    /// Smallest margin by which the checked inequalities held (negative on
    /// failure); zero for exact checks.
    pub worst_margin: f64,
    pub detail: String,
    pub seconds: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SuiteReport {
    pub checks: Vec<CheckResult>,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> Vec<&'static str> {
        self.checks.iter().filter(|c| !c.passed).map(|c| c.name).collect()
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        for c in &self.checks {
            let _ = writeln!(
                out,
                "{:<24} {} worst_margin={:.6e} time={:.2}s {}",
                c.name,
                if c.passed { "PASS" } else { "FAIL" },
                c.worst_margin,
                c.seconds,
                c.detail
            );
        }
        let _ = writeln!(
            out,
            "{} of {} checks passed",
            self.checks.iter().filter(|c| c.passed).count(),
            self.checks.len()
        );
        out
    }
}

struct Outcome {
    passed: bool,
    worst_margin: f64,
    detail: String,
}

fn run(name: &'static str, f: impl FnOnce() -> Result<Outcome>) -> CheckResult {
    let start = Instant::now();
    let outcome = f().unwrap_or_else(|e| Outcome {
        passed: false,
        worst_margin: f64::NEG_INFINITY,
        detail: format!("error: {e}"),
    });
    CheckResult {
        name,
        passed: outcome.passed,
        worst_margin: outcome.worst_margin,
        detail: outcome.detail,
        seconds: start.elapsed().as_secs_f64(),
    }
}

fn table1_equality(reference: &[Vec<i64>]) -> Result<Outcome> {
    let mut mismatches = Vec::new();
    let mut compared = 0;
    for n in 2..=MAX_CHEBYSHEV_DEGREE {
        let table = cheb_shifted_coeffs(n)?;
        let row = reference.get(n - 2).cloned().unwrap_or_default();
        if row.len() != n - 1 {
            mismatches.push(format!("row n={n} has {} entries", row.len()));
            continue;
        }
        for (s, want) in (2..=n).zip(row) {
            compared += 1;
            let got = table.get(s).cloned().unwrap_or_default();
            if !(got.is_integer() && *got.numer() == BigInt::from(want)) {
                mismatches.push(format!("c_{n}^({s}) = {got}, table has {want}"));
            }
        }
    }
    Ok(Outcome {
        passed: mismatches.is_empty(),
        worst_margin: 0.0,
        detail: if mismatches.is_empty() {
            format!("{compared} entries equal")
        } else {
            mismatches.join("; ")
        },
    })
}

fn envelopes(grid: &GridSpec) -> Result<Outcome> {
    let mut worst = f64::INFINITY;
    let mut at = String::new();
    for n in 2..=MAX_CHEBYSHEV_DEGREE {
        for tag in Inequality::ALL {
            let report = verify_envelope(n, tag, grid)?;
            if report.min_slack < worst {
                worst = report.min_slack;
                at = format!("n={n} {tag} x={:.3e}", report.argmin_x);
            }
        }
    }
    Ok(Outcome {
        passed: worst >= SLACK_TOLERANCE,
        worst_margin: worst,
        detail: format!("{} points per curve, tightest at {at}", grid.len()),
    })
}

fn upsilon_oracle(config: &SuiteConfig) -> Result<Outcome> {
    let mut worst_gap: f64 = 0.0;
    for l in 2..52 {
        let lo = 1.0 / l as f64;
        for k in 0..50 {
            let index = lo + (1.0 - lo) * k as f64 / 49.0;
            worst_gap = worst_gap.max((upsilon_root(l, 2, index)? - upsilon_closed_form_n2(l, index)).abs());
        }
    }
    let dominance = min_over_samples(config.distributions / 10, config.seed, |rng| {
        let p = random_distribution(rng, 2, 64);
        let mut worst = f64::INFINITY;
        for n in 2..=7 {
            let idx = IndexVector::from_distribution(&p, n)?;
            worst = worst.min(upsilon_root(p.len(), n, idx.get(n))? - p.max());
        }
        Ok(worst)
    })?;
    Ok(Outcome {
        passed: worst_gap <= 1e-12 && dominance >= -1e-12,
        worst_margin: dominance.min(-worst_gap),
        detail: format!("closed form gap {worst_gap:.2e}, max-probability margin {dominance:.2e}"),
    })
}

fn designs_check() -> Result<Outcome> {
    let mut worst = f64::INFINITY;
    let mut problems = Vec::new();
    for which in BuiltinDesign::ALL {
        let d = builtin_design(which)?;
        let at = verify_design(&d);
        let above = verify_design_at(&d, d.strength() + 1);
        worst = worst.min(at.tolerance - at.defect.abs());
        if !at.is_design {
            problems.push(format!("{which} defect {:.2e}", at.defect));
        }
        if above.is_design {
            problems.push(format!("{which} is also a {}-design", d.strength() + 1));
        }
    }
    Ok(Outcome {
        passed: problems.is_empty(),
        worst_margin: worst,
        detail: problems.join("; "),
    })
}

fn distribution_sandwich(config: &SuiteConfig) -> Result<Outcome> {
    let worst = min_over_samples(config.distributions, config.seed ^ 0x51, |rng| {
        let p = random_distribution(rng, 2, 64);
        let n = rand::Rng::gen_range(rng, 2..=7);
        let h = shannon_entropy(&p);
        let idx = IndexVector::from_distribution(&p, n)?;
        let mut worst = f64::INFINITY;
        for method in Method::ALL {
            let b = prop1_bound(&idx, p.len(), method)?;
            worst = worst.min(h - b.lower).min(b.upper - h);
        }
        Ok(worst)
    })?;
    let mut uniform_gap: f64 = 0.0;
    for l in 2..=64 {
        let p = ProbabilityVector::uniform(l);
        for n in 2..=7 {
            let idx = IndexVector::from_distribution(&p, n)?;
            for method in Method::ALL {
                let b = prop1_bound(&idx, l, method)?;
                let ln_l = (l as f64).ln();
                uniform_gap = uniform_gap.max((b.lower - ln_l).abs()).max((b.upper - ln_l).abs());
            }
        }
    }
    Ok(Outcome {
        passed: worst >= -1e-10 && uniform_gap <= 1e-10,
        worst_margin: worst,
        detail: format!("{} distributions, uniform gap {uniform_gap:.2e}", config.distributions),
    })
}

fn design_sandwich(config: &SuiteConfig) -> Result<Outcome> {
    let mut worst = f64::INFINITY;
    for (i, which) in BuiltinDesign::ALL.into_iter().enumerate() {
        let d = builtin_design(which)?;
        let m = min_over_samples(config.states / 10, config.seed ^ (0x100 + i as u64), |rng| {
            let rho = random_state(rng, 2);
            let mut worst = f64::INFINITY;
            for method in Method::ALL {
                let r = prop2_bounds(&d, &rho, method)?;
                worst = worst.min(r.average_entropy - r.lower).min(r.upper - r.average_entropy);
            }
            Ok(worst)
        })?;
        worst = worst.min(m);
    }
    Ok(Outcome {
        passed: worst >= -1e-10,
        worst_margin: worst,
        detail: format!("{} states per design", config.states / 10),
    })
}

fn conjecture(config: &SuiteConfig) -> Result<Outcome> {
    let worst = min_over_samples(config.distributions, config.seed ^ 0xC0, |rng| {
        let p = random_distribution(rng, 2, 64);
        let mut worst = f64::INFINITY;
        for n in 2..=MAX_CHEBYSHEV_DEGREE {
            worst = worst.min(tsan1_check(&p, n)?.margin());
        }
        Ok(worst)
    })?;
    Ok(Outcome {
        passed: worst >= -1e-12,
        worst_margin: worst,
        detail: format!("{} distributions, n = 2..15", config.distributions),
    })
}

fn state_independence(config: &SuiteConfig) -> Result<Outcome> {
    let mut worst = f64::INFINITY;
    let mut failed = Vec::new();
    for which in BuiltinDesign::ALL {
        let d = builtin_design(which)?;
        for method in Method::ALL {
            let r = state_independent_check(&d, method, config.states, config.seed)?;
            worst = worst.min(r.worst_margin);
            if !r.holds {
                failed.push(format!("{which}/{method}"));
            }
        }
    }
    Ok(Outcome {
        passed: failed.is_empty(),
        worst_margin: worst,
        detail: failed.join("; "),
    })
}

fn von_neumann(config: &SuiteConfig) -> Result<Outcome> {
    let worst = min_over_samples(config.states, config.seed ^ 0x7E, |rng| {
        let d = rand::Rng::gen_range(rng, 2..=6);
        let t = rand::Rng::gen_range(rng, 2..=7);
        let alpha = [0.1, 1.0, 10.0][rand::Rng::gen_range(rng, 0..3)];
        let eig = dirichlet(rng, d, alpha);
        let h = shannon_entropy(&eig);
        let m = MomentVector::from_eigenvalues(eig.probs(), t);
        let mut worst = f64::INFINITY;
        for method in Method::ALL {
            let b = von_neumann_bounds(&m, method)?;
            worst = worst.min(h - b.lower).min(b.upper - h);
        }
        Ok(worst)
    })?;
    Ok(Outcome {
        passed: worst >= -1e-10,
        worst_margin: worst,
        detail: format!("{} spectra", config.states),
    })
}

pub fn run_suite(config: &SuiteConfig) -> SuiteReport {
    let checks = vec![
        run("table1_equality", || table1_equality(&config.table1_reference)),
        run("envelopes", || envelopes(&config.grid)),
        run("upsilon_oracle", || upsilon_oracle(config)),
        run("design_verification", designs_check),
        run("distribution_sandwich", || distribution_sandwich(config)),
        run("design_sandwich", || design_sandwich(config)),
        run("conjecture", || conjecture(config)),
        run("state_independence", || state_independence(config)),
        run("von_neumann_sandwich", || von_neumann(config)),
    ];
    SuiteReport { checks }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tiny(seed: u64) -> SuiteConfig {
        SuiteConfig {
            grid: GridSpec {
                uniform: 2_000,
                clustered: 200,
                ..GridSpec::default()
            },
            distributions: 500,
            states: 200,
            ..SuiteConfig::full(seed)
        }
    }

    #[test]
    fn small_suite_passes() {
        let report = run_suite(&tiny(1));
        assert!(report.passed(), "{}", report.render());
        assert_eq!(report.checks.len(), 9);
    }

    #[test]
    fn corrupted_table_is_named() {
        let mut config = tiny(1);
        config.table1_reference[5][2] += 1;
        let report = run_suite(&config);
        assert_eq!(report.failures(), vec!["table1_equality"]);
        assert!(report.render().contains("table1_equality          FAIL"));
    }
}
