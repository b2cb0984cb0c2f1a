//! Solve one generated instance with the hybrid algorithm and compare it
//! with the pure sampling baseline and the reduction.
//!
//! cargo run --release --example hybrid_solve -- [n] [m] [seed]

use vmk2::bench::{generate, Family, GeneratorSpec};
use vmk2::model::check_solution;
use vmk2::solvers::{self, HybridParams, MkMode};

fn main() -> vmk2::Result<()> {
    let args: Vec<u64> = std::env::args().skip(1).map(|a| a.parse().expect("numeric argument")).collect();
    let n = args.first().copied().unwrap_or(60) as usize;
    let m = args.get(1).copied().unwrap_or(10) as usize;
    let seed = args.get(2).copied().unwrap_or(7);

    let inst = generate(&GeneratorSpec::new(Family::Uniform, n, m, seed))?;
    let params = HybridParams {
        seed,
        ..Default::default()
    };
    let (sol, report) = solvers::solve_hybrid(&inst, &params)?;
    assert!(check_solution(&inst, &sol)?.is_feasible());
    let x_star = report.lp_bound.unwrap_or(f64::NAN);

    println!("n = {n}, m = {m}, sampled bins = {}", solvers::default_ell(m));
    println!("LP bound x* = {x_star:.4}");
    for (b, bin) in sol.bins.iter().enumerate() {
        let (l1, l2) = bin.load(&inst);
        println!("  bin {b:>2}: {:>2} items, load ({l1:.2}, {l2:.2}), profit {:.3}", bin.len(), bin.profit(&inst));
    }
    let (_, base) = solvers::solve_sampling_baseline(&inst, params.eps, seed)?;
    let (_, red) = solvers::solve_reduction(&inst, MkMode::Auto)?;
    for r in [&report, &base, &red] {
        println!("{:<10} profit {:.4}  ({:.1}% of x*)", r.algorithm.as_str(), r.profit, 100.0 * r.profit / x_star);
    }
    Ok(())
}
