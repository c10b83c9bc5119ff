use proptest::prelude::*;

use shannon_bounds::bounds::{
    index_coincidence, prop1_bound, tsan1_check, upsilon_root, IndexVector, Method,
    ProbabilityVector,
};
use shannon_bounds::designs::{
    beta_bar, builtin_design, moments_to_hsym, povm_probabilities, BuiltinDesign, MomentVector,
    QuantumState,
};
use shannon_bounds::estimators::{eval_f, eval_g, eval_h, x_ln_x};
use shannon_bounds::relations::{average_maxprob_bound, prop2_bounds, von_neumann_bounds};

fn distribution() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(1e-6f64..1.0, 2..40).prop_map(|w| {
        let total: f64 = w.iter().sum();
        w.into_iter().map(|v| v / total).collect()
    })
}

fn bloch() -> impl Strategy<Value = [f64; 3]> {
    (-1.0f64..1.0, -1.0f64..1.0, -1.0f64..1.0).prop_filter_map("inside ball", |(x, y, z)| {
        (x * x + y * y + z * z <= 1.0).then_some([x, y, z])
    })
}

fn entropy(p: &[f64]) -> f64 {
    -p.iter().map(|&v| x_ln_x(v)).sum::<f64>()
}

/// Complete homogeneous symmetric polynomial by enumerating non-decreasing
/// index tuples.
fn hsym_oracle(lambda: &[f64], s: usize) -> f64 {
    fn go(lambda: &[f64], from: usize, left: usize) -> f64 {
        if left == 0 {
            return 1.0;
        }
        (from..lambda.len())
            .map(|i| lambda[i] * go(lambda, i, left - 1))
            .sum()
    }
    go(lambda, 0, s)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn upsilon_dominates_largest_probability(p in distribution(), n in 2usize..8) {
        let pv = ProbabilityVector::new(p).unwrap();
        let index = index_coincidence(&pv, n).unwrap();
        let u = upsilon_root(pv.len(), n, index).unwrap();
        prop_assert!(u >= pv.max() - 1e-12, "upsilon {u} < max {}", pv.max());
        prop_assert!(u <= 1.0);
    }

    #[test]
    fn upsilon_is_monotone(l in 2usize..50, n in 2usize..8, a in 0.0f64..1.0, b in 0.0f64..1.0) {
        let lo = (l as f64).powi(1 - n as i32);
        let (a, b) = if a <= b { (a, b) } else { (b, a) };
        let ua = upsilon_root(l, n, lo + (1.0 - lo) * a).unwrap();
        let ub = upsilon_root(l, n, lo + (1.0 - lo) * b).unwrap();
        prop_assert!(ua <= ub + 1e-15);
    }

    #[test]
    fn single_distribution_sandwich(p in distribution(), n in 2usize..8) {
        let h = entropy(&p);
        let pv = ProbabilityVector::new(p).unwrap();
        let idx = IndexVector::from_distribution(&pv, n).unwrap();
        for method in Method::ALL {
            let b = prop1_bound(&idx, pv.len(), method).unwrap();
            prop_assert!(b.lower <= h + 1e-10, "{method}: {} > {h}", b.lower);
            prop_assert!(b.upper >= h - 1e-10, "{method}: {} < {h}", b.upper);
        }
    }

    #[test]
    fn polynomial_envelopes(x in 0.0f64..=1.0, n in 2usize..16) {
        let y = x_ln_x(x);
        prop_assert!(eval_f(n, x).unwrap() <= -y + 1e-13);
        prop_assert!(eval_h(n, x).unwrap() >= -y - 1e-13);
        prop_assert!(eval_g(n, x).unwrap() >= y - 1e-13);
    }

    #[test]
    fn conjecture_margin_nonnegative(p in distribution(), n in 2usize..16) {
        let pv = ProbabilityVector::new(p).unwrap();
        prop_assert!(tsan1_check(&pv, n).unwrap().margin() >= -1e-12);
    }

    #[test]
    fn hsym_matches_eigenvalue_enumeration(
        w in prop::collection::vec(1e-3f64..1.0, 2..5),
        s in 1usize..8,
    ) {
        let total: f64 = w.iter().sum();
        let lambda: Vec<f64> = w.iter().map(|v| v / total).collect();
        let m = MomentVector::from_eigenvalues(&lambda, 7);
        let got = moments_to_hsym(&m, s).unwrap();
        let want = hsym_oracle(&lambda, s);
        prop_assert!((got - want).abs() <= 1e-12 * want.max(1.0), "{got} vs {want}");
    }

    #[test]
    fn design_power_sums_match_moment_formula(r in bloch()) {
        let rho = QuantumState::from_bloch(r).unwrap();
        for which in BuiltinDesign::ALL {
            let design = builtin_design(which).unwrap();
            let groups = povm_probabilities(&design, &rho).unwrap();
            for s in 2..=design.strength() {
                let direct = groups
                    .iter()
                    .map(|p| p.probs().iter().map(|v| v.powi(s as i32)).sum::<f64>())
                    .sum::<f64>() / groups.len() as f64;
                let formula = beta_bar(&design, &rho, s, true).unwrap();
                prop_assert!((direct - formula).abs() < 1e-9, "{which} s={s}: {direct} vs {formula}");
            }
        }
    }

    #[test]
    fn design_entropy_sandwich(r in bloch()) {
        let rho = QuantumState::from_bloch(r).unwrap();
        for which in BuiltinDesign::ALL {
            let design = builtin_design(which).unwrap();
            for method in Method::ALL {
                let b = prop2_bounds(&design, &rho, method).unwrap();
                prop_assert!(b.lower <= b.average_entropy + 1e-10);
                prop_assert!(b.upper >= b.average_entropy - 1e-10);
            }
            average_maxprob_bound(&design, &rho).unwrap();
        }
    }

    #[test]
    fn von_neumann_sandwich(w in prop::collection::vec(1e-4f64..1.0, 2..7), t in 2usize..8) {
        let total: f64 = w.iter().sum();
        let lambda: Vec<f64> = w.iter().map(|v| v / total).collect();
        let h = entropy(&lambda);
        let m = MomentVector::from_eigenvalues(&lambda, t);
        for method in Method::ALL {
            let b = von_neumann_bounds(&m, method).unwrap();
            prop_assert!(b.contains(h, 1e-10), "{method}: [{}, {}] vs {h}", b.lower, b.upper);
        }
    }
}

#[test]
fn mub3_pure_bound_matches_hand_value() {
    let design = builtin_design(BuiltinDesign::Mub3).unwrap();
    let pure = QuantumState::from_bloch([0.0, 0.0, 1.0]).unwrap();
    let b = prop2_bounds(&design, &pure, Method::Taylor).unwrap();
    assert!(b.clipped);
    assert!((b.lower - 5.0 / 12.0).abs() < 1e-12);
}
