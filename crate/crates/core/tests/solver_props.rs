mod common;

use std::time::Duration;

use proptest::prelude::*;
use roofgraph::solver::{brute_force, check_feasible, solve, SolveStatus};

use common::random_program;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn matches_exhaustive_search(seed in any::<u64>()) {
        let p = random_program(seed, 10);
        let fast = solve(&p, Duration::from_secs(10)).unwrap();
        let slow = brute_force(&p).unwrap();
        prop_assert_eq!(fast.status, slow.status);
        if slow.status == SolveStatus::Optimal {
            prop_assert!((fast.objective - slow.objective).abs() <= 1e-9, "{} vs {}", fast.objective, slow.objective);
            prop_assert!(check_feasible(&p, &fast.assignment).unwrap().is_empty());
        }
    }

    #[test]
    fn repeated_solves_agree(seed in any::<u64>()) {
        let p = random_program(seed, 12);
        let a = solve(&p, Duration::from_secs(10)).unwrap();
        let b = solve(&p, Duration::from_secs(10)).unwrap();
        prop_assert_eq!(a.status, b.status);
        prop_assert_eq!(a.assignment, b.assignment);
        prop_assert_eq!(a.objective.to_bits(), b.objective.to_bits());
    }

    #[test]
    fn bound_brackets_the_optimum(seed in any::<u64>(), budget_us in prop::sample::select(vec![0u64, 50, 500])) {
        let p = random_program(seed, 12);
        let opt = brute_force(&p).unwrap();
        let r = solve(&p, Duration::from_micros(budget_us)).unwrap();
        if r.status == SolveStatus::Infeasible {
            prop_assert_eq!(opt.status, SolveStatus::Infeasible);
        } else {
            prop_assert!(r.bound >= r.objective);
            if opt.status == SolveStatus::Optimal {
                prop_assert!(r.objective <= opt.objective + 1e-9);
                prop_assert!(r.bound >= opt.objective - 1e-9, "bound {} below optimum {}", r.bound, opt.objective);
            }
            if !r.assignment.is_empty() {
                prop_assert!(check_feasible(&p, &r.assignment).unwrap().is_empty());
            }
        }
    }
}
