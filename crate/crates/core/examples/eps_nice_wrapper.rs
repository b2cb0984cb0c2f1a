//! Dense-prefix wrapper: the densest items by w1 + w2 are packed by
//! First-Fit, the rest go to an inner solver, and the m best bins are kept.
//! Also reports why no desk-scale instance is ε-nice.

use vmk2::bench::{generate, Family, GeneratorSpec};
use vmk2::solvers::{self, HybridParams};

fn main() -> vmk2::Result<()> {
    let inst = generate(&GeneratorSpec::new(Family::ZipfProfit, 80, 8, 4))?;
    let params = HybridParams::default();
    let (plain, _) = solvers::solve_hybrid(&inst, &params)?;
    println!("hybrid alone: {:.4}", plain.profit(&inst));

    for budget in [None, Some(2.0), Some(8.0)] {
        let (sol, _) = solvers::eps_nice_wrap(&inst, 0.1, budget, |residual| Ok(solvers::solve_hybrid(residual, &params)?.0))?;
        let label = budget.map_or("default".to_string(), |b| format!("{b}"));
        let prefix = solvers::dense_prefix(&inst, budget.unwrap_or_else(|| solvers::default_prefix_budget(&inst, 0.1)));
        println!("prefix budget {label:>7}: {:>2} prefix items, profit {:.4}", prefix.len(), sol.profit(&inst));
    }

    let nice = solvers::is_eps_nice(&inst, 0.1, plain.profit(&inst))?;
    println!(
        "eps-nice: {} (ln ln ln m = {:.3} vs {:.3e} needed; largest bin profit {:.3})",
        nice.nice, nice.m_log3, nice.m_threshold_log3, nice.max_config_profit_bound
    );
    Ok(())
}
