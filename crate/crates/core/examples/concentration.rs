//! Lower tail of the sampled profit p(T) against
//! exp(-t² / (2·E[p(T)]/η)), with η the largest configuration profit.

use vmk2::bench::{generate, run_concentration, t_for_bound, Family, GeneratorSpec};
use vmk2::clp::{solve_clp, IterationBudget};
use vmk2::solvers::default_ell;

fn main() -> vmk2::Result<()> {
    let inst = generate(&GeneratorSpec::new(Family::Uniform, 200, 100, 92))?;
    let fs = solve_clp(&inst, 0.01, IterationBudget::default())?;
    let ell = default_ell(inst.m());
    let pilot = run_concentration(&inst, &fs, ell, 1000, &[0.0], 1)?;
    let ts: Vec<f64> = [0.5, 0.1, 0.01].iter().map(|&b| t_for_bound(b, pilot.mean, pilot.eta)).collect();
    let rep = run_concentration(&inst, &fs, ell, 10_000, &ts, 2)?;
    println!("ell = {ell}, eta = {:.3}, mean p(T) = {:.3}, x* = {:.3}", rep.eta, rep.mean, fs.value);
    for p in &rep.points {
        println!(
            "t = {:>6.3}: Pr[p(T) <= {:.3}] = {:.4}, bound {:.4} {}",
            p.t,
            p.threshold,
            p.empirical,
            p.bound,
            if p.ok { "ok" } else { "VIOLATED" }
        );
    }
    Ok(())
}
