//! Marginal profit of the j-th configuration drawn from the LP, against
//! the (x*/m)·e^{-j/m} overlay.

use vmk2::bench::{generate, run_marginal_curve, Family, GeneratorSpec};

fn main() -> vmk2::Result<()> {
    let inst = generate(&GeneratorSpec::new(Family::Uniform, 300, 200, 5))?;
    let curve = run_marginal_curve(&inst, 400, 1, 0.01)?;
    println!("x* = {:.3}, m = {}", curve.x_star, curve.m);
    println!("{:>5} {:>10} {:>10} {:>10}", "j", "q_hat", "overlay", "E p(T_j)");
    for p in curve.points.iter().filter(|p| p.j == 1 || p.j % 20 == 0) {
        println!("{:>5} {:>10.5} {:>10.5} {:>10.3}", p.j, p.q_hat, p.analytic, p.cumulative);
    }
    let first = curve.points.first().map_or(f64::NAN, |p| p.q_hat);
    let last = curve.points.last().map_or(f64::NAN, |p| p.q_hat);
    println!("q_m / q_1 = {:.3} (e^-1 = {:.3})", last / first, (-1f64).exp());
    Ok(())
}
