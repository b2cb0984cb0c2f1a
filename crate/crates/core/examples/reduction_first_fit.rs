//! The one-dimensional view of a 2-D instance: associated weights, the
//! split of a configuration into two 1-D bins, the reduction algorithm,
//! and 2-D First-Fit.

use vmk2::bench::{generate, Family, GeneratorSpec};
use vmk2::mk::{self, FirstFitOrder};
use vmk2::pricing::{price_exact, ValueAssignment};
use vmk2::solvers::{self, MkMode};

fn main() -> vmk2::Result<()> {
    let inst = generate(&GeneratorSpec::new(Family::Clustered, 12, 2, 3))?;

    let best = price_exact(&inst, &ValueAssignment::profits(&inst))?.config;
    let (wide, tall) = mk::split_configuration(&inst, &best)?;
    println!("best single bin {best}: profit {:.3}", best.profit(&inst));
    println!("  w1 >= w2 part {wide}: max-weight load {:.3}", mk::associated_weight(&inst, &wide));
    println!("  w1 <  w2 part {tall}: max-weight load {:.3}", mk::associated_weight(&inst, &tall));

    let mk_inst = mk::associate(&inst, 1)?;
    let exact = mk::solve_mk_exact(&mk_inst, mk::DEFAULT_MK_NODE_CAP)?;
    let heuristic = mk::solve_mk_heuristic(&mk_inst);
    println!("1-D instance: exact {:.3}, heuristic {:.3}", exact.profit(&mk_inst), heuristic.profit(&mk_inst));

    let (_, red) = solvers::solve_reduction(&inst, MkMode::Exact)?;
    let opt = solvers::solve_exact(&inst, solvers::DEFAULT_EXACT_NODE_CAP)?.profit;
    println!("reduction {:.3} vs optimum {opt:.3} (ratio {:.3})", red.profit, red.profit / opt);

    let all: Vec<usize> = (0..inst.len()).collect();
    let bins = mk::first_fit_2d(&inst, &all, FirstFitOrder::ByDensityDesc);
    println!("First-Fit uses {} bins", bins.len());
    for w in bins.windows(2) {
        let (a1, a2) = w[0].load(&inst);
        let (b1, b2) = w[1].load(&inst);
        println!("  consecutive pair total weight {:.3} > 1", a1 + a2 + b1 + b2);
    }
    Ok(())
}
