//! Ratio benchmark: hybrid, sampling baseline and reduction on a
//! generated suite, against the exact optimum where it is cheap and the
//! LP bound otherwise. Writes CSV and JSON to the given directory.
//!
//! cargo run --release --example ratio_bench -- [out-dir]

use std::path::PathBuf;

use vmk2::bench::{run_ratio_bench, BenchConfig, Family, GeneratorSpec};
use vmk2::solvers::Algorithm;

fn main() -> vmk2::Result<()> {
    let out = std::env::args().nth(1).map(PathBuf::from).unwrap_or_else(|| std::env::temp_dir().join("vmk-ratio"));

    let small = GeneratorSpec::suite(Family::Uniform, 12, 3, 1, 10);
    let config = BenchConfig {
        algos: vec![Algorithm::Hybrid, Algorithm::Baseline, Algorithm::Reduction],
        trials: 50,
        exact: true,
        ..Default::default()
    };
    let res = run_ratio_bench(&small, &config)?;
    println!("n=12, m=3, against the optimum:");
    for a in &res.aggregates {
        println!("  {:<10} {:.4} ± {:.4}", a.algo.as_str(), a.mean_ratio_opt.unwrap_or(f64::NAN), a.sd_ratio_opt.unwrap_or(f64::NAN));
    }

    let large = GeneratorSpec::suite(Family::Uniform, 60, 10, 2, 20);
    let config = BenchConfig {
        trials: 20,
        exact: false,
        ..config
    };
    let res = run_ratio_bench(&large, &config)?;
    println!("n=60, m=10, against x*:");
    for a in &res.aggregates {
        println!("  {:<10} {:.4} ± {:.4}", a.algo.as_str(), a.mean_ratio_lp, a.sd_ratio_lp);
    }
    if let Some(d) = &res.paired {
        println!("  hybrid - baseline {:+.4}, 95% CI [{:+.4}, {:+.4}]", d.mean, d.mean - 1.96 * d.se, d.mean + 1.96 * d.se);
    }
    let failures = res.check();
    println!("checks: {}", if failures.is_empty() { "ok".to_string() } else { failures.join("; ") });
    res.write(&out)?;
    res.write_solutions(&out, &large)?;
    println!("wrote {}", out.display());
    Ok(())
}
