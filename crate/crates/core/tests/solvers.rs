mod common;

use proptest::prelude::*;
use vmk2::clp::{self, IterationBudget, TAU_LP};
use vmk2::mk::{self, FirstFitOrder};
use vmk2::model::{check_solution, Item};
use vmk2::solvers::{self, HybridParams, MkMode};
use vmk2::Vmk2Instance;

fn instance_strategy(max_n: usize, max_m: usize) -> impl Strategy<Value = Vmk2Instance> {
    (1..=max_m, prop::collection::vec((0.0f64..=1.0, 0.0f64..=1.0, 0.0f64..=1.0), 0..=max_n)).prop_map(|(m, items)| {
        Vmk2Instance::new(
            items.into_iter().enumerate().map(|(k, (a, b, p))| Item::new(format!("q{k:02}"), a, b, p)).collect(),
            m,
        )
        .unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn every_solver_is_feasible_and_below_lp(inst in instance_strategy(9, 3), seed in any::<u64>()) {
        let fs = clp::solve_clp(&inst, 0.01, IterationBudget::default()).unwrap();
        let opt = common::naive_opt(&inst);
        prop_assert!(fs.value >= opt - TAU_LP);
        let params = HybridParams { seed, ..Default::default() };
        let sols = vec![
            solvers::solve_hybrid(&inst, &params).unwrap().0,
            solvers::solve_sampling_baseline(&inst, 0.01, seed).unwrap().0,
            solvers::solve_reduction(&inst, MkMode::Exact).unwrap().0,
            solvers::solve_reduction(&inst, MkMode::Heuristic).unwrap().0,
            solvers::solve_exact(&inst, 10_000_000).unwrap().solution,
            solvers::solve_via_mck(&inst, 10_000_000).unwrap().0,
            solvers::eps_nice_wrap(&inst, 0.1, None, |r| Ok(solvers::solve_reduction(r, MkMode::Exact)?.0)).unwrap().0,
        ];
        for sol in &sols {
            let report = check_solution(&inst, sol).unwrap();
            prop_assert!(report.is_feasible(), "{:?}", report.violations);
            prop_assert!(report.profit <= fs.value + TAU_LP);
            prop_assert!(report.profit <= opt + 1e-9);
        }
        let reduction = sols[2].profit(&inst);
        prop_assert!(reduction >= 0.5 * opt - 1e-9);
    }

    #[test]
    fn first_fit_consecutive_bins_are_heavy(inst in instance_strategy(30, 1)) {
        let all: Vec<usize> = (0..inst.len()).collect();
        for order in [FirstFitOrder::Given, FirstFitOrder::ByDensityDesc] {
            let bins = mk::first_fit_2d(&inst, &all, order);
            let packed: usize = bins.iter().map(|b| b.len()).sum();
            prop_assert_eq!(packed, inst.len());
            for b in &bins {
                prop_assert!(b.is_feasible(&inst));
            }
            for w in bins.windows(2) {
                let (a1, a2) = w[0].load(&inst);
                let (b1, b2) = w[1].load(&inst);
                prop_assert!(a1 + a2 + b1 + b2 > 1.0);
            }
        }
    }
}

#[test]
fn mck_matches_exact_on_eight_items_two_bins() {
    for seed in 0..25 {
        let inst = vmk2::bench::generate(&vmk2::bench::GeneratorSpec::new(vmk2::bench::Family::Uniform, 8, 2, seed)).unwrap();
        let (mck, _) = solvers::solve_via_mck(&inst, 10_000_000).unwrap();
        let naive = common::naive_opt(&inst);
        assert!((mck.profit(&inst) - naive).abs() < 1e-9, "seed {seed}");
        assert!((solvers::solve_exact(&inst, 10_000_000).unwrap().profit - naive).abs() < 1e-9);
    }
}

#[test]
fn max_configuration_bound_matches_enumeration() {
    for seed in 0..10 {
        let inst = vmk2::bench::generate(&vmk2::bench::GeneratorSpec::new(vmk2::bench::Family::Clustered, 11, 5, seed)).unwrap();
        let r = solvers::is_eps_nice(&inst, 0.1, inst.total_profit().max(1.0)).unwrap();
        assert!((r.max_config_profit_bound - common::naive_max_configuration(&inst)).abs() < 1e-9);
        assert!(!r.nice);
    }
}

#[test]
fn hybrid_with_no_samples_is_the_reduction() {
    for (k, inst) in common::exact_suite().iter().enumerate().take(15) {
        let params = HybridParams {
            seed: k as u64,
            ell_override: Some(0),
            mk_mode: MkMode::Exact,
            ..Default::default()
        };
        let h = solvers::solve_hybrid(inst, &params).unwrap().1.profit;
        let r = solvers::solve_reduction(inst, MkMode::Exact).unwrap().1.profit;
        assert!((h - r).abs() < 1e-9);
    }
}

#[test]
fn wrapper_keeps_the_m_best_bins() {
    let inst = vmk2::bench::generate(&vmk2::bench::GeneratorSpec::new(vmk2::bench::Family::Uniform, 40, 5, 3)).unwrap();
    let (sol, _) = solvers::eps_nice_wrap(&inst, 0.1, Some(4.0), |r| {
        Ok(solvers::solve_hybrid(r, &HybridParams::default())?.0)
    })
    .unwrap();
    assert_eq!(sol.bins.len(), 5);
    assert!(check_solution(&inst, &sol).unwrap().is_feasible());
    let profits: Vec<f64> = sol.bins.iter().map(|b| b.profit(&inst)).collect();
    assert!(profits.windows(2).all(|w| w[0] >= w[1]));
}
