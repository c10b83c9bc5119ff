//! Uncertainty and certainty relations for measurements assigned to quantum
//! designs, and two-sided bounds on the von Neumann entropy from moments.

use std::collections::HashSet;
use std::sync::{Mutex, OnceLock};

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::bounds::{shannon_entropy, upsilon_root, Estimator, Method, TwoSidedBound};
use crate::designs::{beta_bar_from_moments, povm_probabilities, MomentVector, QuantumDesign, QuantumState};
use crate::error::{Error, Result};
use crate::sampling::{min_over_samples, random_bloch_ball};

/// Two-sided bound on the average entropy of the design POVMs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RelationResult {
    pub method: Method,
    pub lower: f64,
    pub upper: f64,
    pub upsilon: f64,
    /// Whether `M·Υ` exceeded 1 and was cut back.
    pub clipped: bool,
    /// `(1/M) Σ_m H_1` for the state supplied.
    pub average_entropy: f64,
}

struct Core {
    lower: f64,
    upper: f64,
    upsilon: f64,
    clipped: bool,
}

fn relation_core(design: &QuantumDesign, m: &MomentVector, method: Method) -> Result<Core> {
    let t = design.strength();
    if t < 2 {
        return Err(Error::DegreeOutOfRange {
            degree: t,
            min: 2,
            max: usize::MAX,
        });
    }
    let full = beta_bar_from_moments(design, m, t, false)?;
    let scaled = design.group_count() as f64 * upsilon_root(design.len(), t, full)?;
    let (upsilon, clipped) = if scaled > 1.0 { (1.0, true) } else { (scaled, false) };
    let estimator = Estimator::cached(method, t)?;
    let mut per_group = vec![1.0; estimator.degree() + 1];
    for (s, slot) in per_group.iter_mut().enumerate().skip(2) {
        *slot = beta_bar_from_moments(design, m, s, true)?;
    }
    let (lower, upper) = estimator.evaluate(|s| per_group[s], upsilon, design.outcomes_per_group() as f64);
    Ok(Core {
        lower,
        upper,
        upsilon,
        clipped,
    })
}

fn average_entropy(design: &QuantumDesign, rho: &QuantumState) -> Result<f64> {
    let groups = povm_probabilities(design, rho)?;
    Ok(groups.iter().map(shannon_entropy).sum::<f64>() / groups.len() as f64)
}

/// Bounds on `(1/M) Σ_m H_1(E^(m); ρ)` with
/// `Υ = min{M·Υ_{K-1}^(t)(β̄^(t)(ρ)), 1}`.
pub fn prop2_bounds(design: &QuantumDesign, rho: &QuantumState, method: Method) -> Result<RelationResult> {
    if design.dim() != rho.dim() {
        return Err(Error::DimensionError(format!(
            "design in dimension {} and state in dimension {}",
            design.dim(),
            rho.dim()
        )));
    }
    let core = relation_core(design, &rho.moments(design.strength()), method)?;
    Ok(RelationResult {
        method,
        lower: core.lower,
        upper: core.upper,
        upsilon: core.upsilon,
        clipped: core.clipped,
        average_entropy: average_entropy(design, rho)?,
    })
}

/// Lower bound of [`prop2_bounds`] evaluated for pure states, where
/// `tr(ρ^{⊗s} P_sym) = 1`.
pub fn pure_state_lower_bound(design: &QuantumDesign, method: Method) -> Result<f64> {
    let m = MomentVector::pure(design.dim(), design.strength());
    Ok(relation_core(design, &m, method)?.lower)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StateIndependence {
    pub holds: bool,
    /// Smallest `(1/M) Σ H_1 − bound` seen.
    pub worst_margin: f64,
    pub samples: usize,
}

fn certified() -> &'static Mutex<HashSet<(String, Method)>> {
    static SET: OnceLock<Mutex<HashSet<(String, Method)>>> = OnceLock::new();
    SET.get_or_init(|| Mutex::new(HashSet::new()))
}

/// Random state of the Hilbert–Schmidt ensemble; uniform in the Bloch ball
/// for a qubit.
pub fn random_state<R: Rng + ?Sized>(rng: &mut R, d: usize) -> QuantumState {
    if d == 2 {
        return QuantumState::Bloch(random_bloch_ball(rng));
    }
    let g = DMatrix::<Complex64>::from_fn(d, d, |_, _| {
        Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
    });
    let w = &g * g.adjoint();
    let trace = w.trace();
    let rho = w / trace;
    QuantumState::from_matrix((&rho + rho.adjoint()) / Complex64::new(2.0, 0.0))
        .expect("Ginibre product is a state")
}

/// Checks numerically that the pure-state lower bound holds for random mixed
/// states drawn with [`random_state`].
/// A passing check certifies the pair for [`steering_bound`].
pub fn state_independent_check(
    design: &QuantumDesign,
    method: Method,
    samples: usize,
    seed: u64,
) -> Result<StateIndependence> {
    let bound = pure_state_lower_bound(design, method)?;
    let worst = min_over_samples(samples, seed, |rng| {
        let rho = random_state(rng, design.dim());
        Ok(average_entropy(design, &rho)? - bound)
    })?;
    let holds = worst >= -1e-10;
    if holds {
        certified()
            .lock()
            .expect("certification registry")
            .insert((design.name().to_string(), method));
    }
    Ok(StateIndependence {
        holds,
        worst_margin: worst,
        samples,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SteeringBound {
    pub value: f64,
    /// False until [`state_independent_check`] has passed for this design
    /// and method in the current process.
    pub certified: bool,
}

/// Right-hand side of the steering inequality: the pure-state bound, valid
/// once it is known to hold for all states.
pub fn steering_bound(design: &QuantumDesign, method: Method) -> Result<SteeringBound> {
    let value = pure_state_lower_bound(design, method)?;
    let certified = certified()
        .lock()
        .expect("certification registry")
        .contains(&(design.name().to_string(), method));
    Ok(SteeringBound { value, certified })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MaxProbBound {
    pub bound: f64,
    /// `(1/M) Σ_m max_j p_j(m)`.
    pub measured: f64,
}

/// Bound `Υ_{ℓ-1}^(t)(β̄_ℓ^(t)(ρ))` on the average largest outcome probability.
pub fn average_maxprob_bound(design: &QuantumDesign, rho: &QuantumState) -> Result<MaxProbBound> {
    let t = design.strength();
    let beta = beta_bar_from_moments(design, &rho.moments(t), t, true)?;
    let bound = upsilon_root(design.outcomes_per_group(), t, beta)?;
    let groups = povm_probabilities(design, rho)?;
    let measured = groups.iter().map(|p| p.max()).sum::<f64>() / groups.len() as f64;
    if measured > bound + 1e-10 {
        return Err(Error::SandwichViolation {
            at: measured,
            detail: format!("average max probability exceeds bound {bound}"),
        });
    }
    Ok(MaxProbBound { bound, measured })
}

/// Two-sided bound on `-tr(ρ ln ρ)` from `tr ρ^s`, `s = 2..=t`; the largest
/// eigenvalue is bounded by `Λ = Υ_{d-1}^(t)(tr ρ^t)`.
pub fn von_neumann_bounds(m: &MomentVector, method: Method) -> Result<TwoSidedBound> {
    let t = m.order();
    if t < 2 {
        return Err(Error::InsufficientMoments {
            requested: 2,
            available: t,
        });
    }
    let lambda = upsilon_root(m.dim(), t, m.get(t))?;
    let estimator = Estimator::cached(method, t)?;
    let (lower, upper) = estimator.evaluate(|s| m.get(s), lambda, m.dim() as f64);
    Ok(TwoSidedBound {
        lower,
        upper,
        upsilon: lambda,
        method,
        degree: estimator.degree(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::designs::{builtin_design, BuiltinDesign};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn design(w: BuiltinDesign) -> QuantumDesign {
        builtin_design(w).unwrap()
    }

    #[test]
    fn maximally_mixed_collapses_to_ln_ell() {
        for w in BuiltinDesign::ALL {
            let d = design(w);
            let rho = QuantumState::maximally_mixed(2);
            let ln_ell = (d.outcomes_per_group() as f64).ln();
            for method in Method::ALL {
                let r = prop2_bounds(&d, &rho, method).unwrap();
                assert!((r.lower - ln_ell).abs() < 1e-9, "{w} {method}: {r:?}");
                assert!((r.upper - ln_ell).abs() < 1e-9, "{w} {method}: {r:?}");
                assert!((r.average_entropy - ln_ell).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn octahedron_pure_brackets_entropy() {
        let d = design(BuiltinDesign::Octahedron);
        let rho = QuantumState::from_bloch([0.0, 0.0, 1.0]).unwrap();
        let h = 2.0 / 3.0 * 6f64.ln() + 3f64.ln() / 3.0;
        for method in Method::ALL {
            let r = prop2_bounds(&d, &rho, method).unwrap();
            assert!(r.lower <= h && h <= r.upper, "{r:?}");
            assert!((r.average_entropy - h).abs() < 1e-14);
            assert!(!r.clipped);
            assert!((r.upsilon - 0.355_253_425_759_190).abs() < 1e-12);
        }
    }

    #[test]
    fn mub3_pure_is_clipped() {
        let d = design(BuiltinDesign::Mub3);
        let rho = QuantumState::from_bloch([0.0, 0.0, 1.0]).unwrap();
        let r = prop2_bounds(&d, &rho, Method::Taylor).unwrap();
        assert!(r.clipped);
        assert_eq!(r.upsilon, 1.0);
        assert!(3.0 * upsilon_root(6, 3, 1.0 / 18.0).unwrap() > 1.0);
    }

    #[test]
    fn mub3_taylor_pure_bound() {
        let d = design(BuiltinDesign::Mub3);
        let v = pure_state_lower_bound(&d, Method::Taylor).unwrap();
        assert!((v - 5.0 / 12.0).abs() < 1e-12, "{v}");
        let s = steering_bound(&d, Method::Taylor).unwrap();
        assert_eq!(s.value, v);
    }

    #[test]
    fn pure_bounds_below_ceiling() {
        for w in BuiltinDesign::ALL {
            let d = design(w);
            for method in Method::ALL {
                let v = pure_state_lower_bound(&d, method).unwrap();
                assert!(v < (d.outcomes_per_group() as f64).ln(), "{w} {method}");
            }
        }
    }

    #[test]
    fn state_independence_and_certification() {
        let d = design(BuiltinDesign::Octahedron);
        assert!(!steering_bound(&d, Method::Chebyshev).unwrap().certified);
        let a = state_independent_check(&d, Method::Chebyshev, 2000, 9).unwrap();
        assert!(a.holds, "{a:?}");
        assert!(steering_bound(&d, Method::Chebyshev).unwrap().certified);
        let b = state_independent_check(&d, Method::Chebyshev, 2000, 9).unwrap();
        assert_eq!(a.worst_margin, b.worst_margin);
    }

    #[test]
    fn maxprob_examples() {
        let mub = design(BuiltinDesign::Mub3);
        let up = QuantumState::from_bloch([0.0, 0.0, 1.0]).unwrap();
        let r = average_maxprob_bound(&mub, &up).unwrap();
        // β̄_2^(3) = 1/2 for a pure state; Υ solves (1-Υ)^3 + Υ^3 = 1/2 with L = 2.
        let want = 0.5 + (1.0f64 / 12.0).sqrt();
        assert!((r.bound - want).abs() < 1e-12, "{r:?}");
        assert!((r.measured - 2.0 / 3.0).abs() < 1e-15);
        let oct = design(BuiltinDesign::Octahedron);
        assert!((average_maxprob_bound(&oct, &up).unwrap().measured - 1.0 / 3.0).abs() < 1e-15);
        let mixed = QuantumState::maximally_mixed(2);
        let m = average_maxprob_bound(&mub, &mixed).unwrap();
        assert!((m.measured - 0.5).abs() < 1e-15 && m.measured <= m.bound + 1e-12);
    }

    #[test]
    fn von_neumann_examples() {
        let pure = von_neumann_bounds(&MomentVector::pure(2, 3), Method::Taylor).unwrap();
        assert!(pure.lower.abs() < 1e-12 && (pure.upper - 1.0 / 3.0).abs() < 1e-12, "{pure:?}");
        let mixed = MomentVector::from_eigenvalues(&[0.5, 0.5], 3);
        for method in Method::ALL {
            let b = von_neumann_bounds(&mixed, method).unwrap();
            assert!((b.upsilon - 0.5).abs() < 1e-15);
            assert!((b.lower - 2f64.ln()).abs() < 1e-10 && (b.upper - 2f64.ln()).abs() < 1e-10);
        }
        assert!(von_neumann_bounds(&MomentVector::pure(2, 1), Method::Taylor).is_err());
    }

    #[test]
    fn random_qutrit_states_are_valid() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..50 {
            let rho = random_state(&mut rng, 3);
            let e = rho.eigenvalues();
            assert!(e[0] >= -1e-12 && (e.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        }
    }
}
