//! Two exact solvers that must agree: branch and bound over bin
//! assignments, and the multiple-choice knapsack reduction with 2m
//! dimensions.

use std::time::Instant;

use vmk2::bench::{generate, Family, GeneratorSpec};
use vmk2::solvers::{self, reduce_to_mck, solve_mck_exact, DEFAULT_EXACT_NODE_CAP};

fn main() -> vmk2::Result<()> {
    for (n, m) in [(8, 1), (10, 2), (12, 3)] {
        let inst = generate(&GeneratorSpec::new(Family::Correlated, n, m, 11))?;

        let t = Instant::now();
        let bb = solvers::solve_exact(&inst, DEFAULT_EXACT_NODE_CAP)?;
        let bb_time = t.elapsed();

        let t = Instant::now();
        let mck = reduce_to_mck(&inst);
        let chosen = solve_mck_exact(&mck, DEFAULT_EXACT_NODE_CAP)?;
        let mck_time = t.elapsed();
        let sol = chosen.to_solution(&mck, m);

        println!(
            "n={n:>2} m={m}: branch and bound {:.4} ({} nodes, {:?}), {}-dim MCK {:.4} ({:?})",
            bb.profit,
            bb.nodes,
            bb_time,
            mck.dims,
            sol.profit(&inst),
            mck_time
        );
        assert!(bb.complete);
        assert!((bb.profit - sol.profit(&inst)).abs() < 1e-9);
    }
    Ok(())
}
