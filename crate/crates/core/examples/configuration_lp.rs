//! Column generation for the configuration LP, with exact and
//! approximate pricing, and sampling from the fractional solution.

use vmk2::clp::{solve_clp, IterationBudget, PricingMode, Sampler};
use vmk2::model::Item;
use vmk2::rng::RngHandle;
use vmk2::Vmk2Instance;

fn main() -> vmk2::Result<()> {
    // any two items share a bin, no three do
    let inst = Vmk2Instance::new(
        vec![
            Item::new("a", 0.5, 0.4, 1.0),
            Item::new("b", 0.5, 0.4, 1.0),
            Item::new("c", 0.5, 0.4, 1.0),
            Item::new("d", 0.2, 0.7, 0.8),
        ],
        2,
    )?;
    let fs = solve_clp(&inst, 0.01, IterationBudget::default())?;
    println!("x* = {:.4} after {} rounds, certified gap {:.2e}", fs.value, fs.rounds, fs.certified_gap);
    println!("bin price {:.4}", fs.dual_bin_price);
    for (it, mu) in inst.items().iter().zip(&fs.dual_item_prices) {
        println!("  item {} price {mu:.4}", it.id);
    }
    for (c, x) in fs.support() {
        println!("  x = {x:.3} on {{{}}}", c.ids(&inst).collect::<Vec<_>>().join(", "));
    }

    let approx = IterationBudget {
        pricing: PricingMode::Approx,
        early_stop: true,
        ..Default::default()
    };
    let fa = solve_clp(&inst, 0.1, approx)?;
    println!("approximate pricing: {:.4} <= x* <= {:.4}", fa.value, fa.upper_bound);

    let sampler = Sampler::new(&fs);
    let mut rng = RngHandle::new(1);
    let draws = 10_000;
    let coverage = fs.item_coverage(inst.len());
    let mut hits = vec![0; inst.len()];
    for _ in 0..draws {
        for i in sampler.sample(&mut rng).iter() {
            hits[i] += 1;
        }
    }
    for (i, it) in inst.items().iter().enumerate() {
        println!(
            "  Pr[{} in R]: empirical {:.3}, expected {:.3}",
            it.id,
            hits[i] as f64 / draws as f64,
            coverage[i] / inst.m() as f64
        );
    }
    Ok(())
}
