use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use vmk2::bench::{self, BenchConfig, Family, GeneratorSpec};
use vmk2::clp::{self, IterationBudget};
use vmk2::model::{load_instance, save_instance, save_solution, InstanceFormat};
use vmk2::solvers::{self, Algorithm, HybridParams, MkMode, SolveReport};
use vmk2::{Error, Result, Vmk2Instance};

#[derive(Parser)]
#[command(name = "vmk", version, about = "Two-dimensional vector multiple knapsack solvers and experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum FamilyArg {
    Uniform,
    Correlated,
    ZipfProfit,
    Clustered,
}

impl From<FamilyArg> for Family {
    fn from(f: FamilyArg) -> Self {
        match f {
            FamilyArg::Uniform => Family::Uniform,
            FamilyArg::Correlated => Family::Correlated,
            FamilyArg::ZipfProfit => Family::ZipfProfit,
            FamilyArg::Clustered => Family::Clustered,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum AlgoArg {
    Hybrid,
    Baseline,
    Reduction,
    Exact,
    Mck,
    EpsNice,
}

impl From<AlgoArg> for Algorithm {
    fn from(a: AlgoArg) -> Self {
        match a {
            AlgoArg::Hybrid => Algorithm::Hybrid,
            AlgoArg::Baseline => Algorithm::Baseline,
            AlgoArg::Reduction => Algorithm::Reduction,
            AlgoArg::Exact => Algorithm::Exact,
            AlgoArg::Mck => Algorithm::Mck,
            AlgoArg::EpsNice => Algorithm::EpsNice,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum MkModeArg {
    Exact,
    Heuristic,
    Auto,
}

impl From<MkModeArg> for MkMode {
    fn from(m: MkModeArg) -> Self {
        match m {
            MkModeArg::Exact => MkMode::Exact,
            MkModeArg::Heuristic => MkMode::Heuristic,
            MkModeArg::Auto => MkMode::Auto,
        }
    }
}

#[derive(clap::Args)]
struct InstanceArgs {
    /// Instance file (.json, or .csv with --m).
    instance: PathBuf,
    /// Bin count for CSV instances.
    #[arg(long)]
    m: Option<usize>,
}

impl InstanceArgs {
    fn load(&self) -> Result<Vmk2Instance> {
        let format = InstanceFormat::from_path(&self.instance)
            .ok_or_else(|| Error::InvalidParameter(format!("cannot tell the format of {}", self.instance.display())))?;
        load_instance(&self.instance, format, self.m)
    }
}

#[derive(Subcommand)]
enum Command {
    /// Generate a random instance.
    Gen {
        #[arg(long, value_enum, default_value = "uniform")]
        family: FamilyArg,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        m: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Solve one instance.
    Solve {
        #[command(flatten)]
        input: InstanceArgs,
        #[arg(long, value_enum, default_value = "hybrid")]
        algo: AlgoArg,
        #[arg(long, default_value_t = 0.01)]
        eps: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum, default_value = "auto")]
        mk_mode: MkModeArg,
        /// Number of sampled bins for the hybrid (default ⌈m ln 2⌉).
        #[arg(long)]
        ell: Option<usize>,
        /// Write the final LP pool and masses to this file.
        #[arg(long)]
        dump_lp: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Ratio benchmark over a generated suite.
    Bench {
        #[arg(long, value_enum, default_value = "uniform")]
        family: FamilyArg,
        #[arg(long, default_value_t = 60)]
        n: usize,
        #[arg(long, default_value_t = 10)]
        m: usize,
        #[arg(long, default_value_t = 20)]
        instances: usize,
        #[arg(long, default_value_t = 10)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum, value_delimiter = ',', default_value = "hybrid,baseline,reduction")]
        algos: Vec<AlgoArg>,
        #[arg(long, default_value_t = 0.01)]
        eps: f64,
        #[arg(long, value_enum, default_value = "auto")]
        mk_mode: MkModeArg,
        /// Compute exact optima (small instances only).
        #[arg(long)]
        exact: bool,
        /// Exit with status 2 if any check fails.
        #[arg(long)]
        check: bool,
        #[arg(long)]
        out: PathBuf,
    },
    /// Marginal profit of successive LP samples.
    Marginal {
        #[command(flatten)]
        input: InstanceArgs,
        #[arg(long, default_value_t = 1000)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 0.01)]
        eps: f64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Lower-tail frequency of the sampled profit against its bound.
    Concentration {
        #[command(flatten)]
        input: InstanceArgs,
        #[arg(long)]
        ell: Option<usize>,
        #[arg(long, default_value_t = 10_000)]
        trials: usize,
        /// Deviation in units of the largest configuration profit; repeatable.
        #[arg(long = "t", default_values_t = [0.5, 1.0, 2.0])]
        t: Vec<f64>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 0.01)]
        eps: f64,
        #[arg(long)]
        out: PathBuf,
    },
}

fn write_json(path: &Path, value: &impl Serialize) -> Result<()> {
    fs::write(path, serde_json::to_string_pretty(value)? + "\n")?;
    Ok(())
}

fn write_report_csv(path: &Path, r: &SolveReport) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    let opt = |x: Option<f64>| x.map(|v| v.to_string()).unwrap_or_default();
    w.write_record(["algo", "seed", "profit", "x_star", "exact_opt", "wall_ms", "bins_used", "converged", "rng"])?;
    w.write_record([
        r.algorithm.to_string(),
        r.seed.to_string(),
        r.profit.to_string(),
        opt(r.lp_bound),
        opt(r.exact_opt),
        format!("{:.3}", r.wall_time_ms),
        r.bins_used.to_string(),
        r.lp_converged.map(|c| c.to_string()).unwrap_or_default(),
        r.rng.to_string(),
    ])?;
    w.flush()?;
    Ok(())
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Gen { family, n, m, seed, out } => {
            fs::create_dir_all(&out)?;
            let inst = bench::generate(&GeneratorSpec::new(family.into(), n, m, seed))?;
            save_instance(out.join("instance.json"), &inst)?;
            let mut w = csv::Writer::from_path(out.join("instance.csv"))?;
            w.write_record(["id", "w1", "w2", "p"])?;
            for it in inst.items() {
                w.write_record([it.id.clone(), it.w1.to_string(), it.w2.to_string(), it.profit.to_string()])?;
            }
            w.flush()?;
            println!("{}", inst.canonical_hash());
        }
        Command::Solve { input, algo, eps, seed, mk_mode, ell, dump_lp, out } => {
            fs::create_dir_all(&out)?;
            let inst = input.load()?;
            let mk_mode = MkMode::from(mk_mode);
            let params = HybridParams {
                eps,
                seed,
                ell_override: ell,
                clp_budget: IterationBudget::default(),
                mk_mode,
            };
            let (sol, report) = match Algorithm::from(algo) {
                Algorithm::Hybrid => solvers::solve_hybrid(&inst, &params)?,
                Algorithm::Baseline => solvers::solve_sampling_baseline(&inst, eps, seed)?,
                Algorithm::Reduction => solvers::solve_reduction(&inst, mk_mode)?,
                Algorithm::Exact => {
                    let (sol, report, complete) = solvers::solve_exact_report(&inst, solvers::DEFAULT_EXACT_NODE_CAP)?;
                    if !complete {
                        eprintln!("search budget exceeded; solution may be suboptimal");
                    }
                    (sol, report)
                }
                Algorithm::Mck => solvers::solve_via_mck(&inst, solvers::DEFAULT_EXACT_NODE_CAP)?,
                Algorithm::EpsNice => {
                    solvers::eps_nice_wrap(&inst, eps, None, |res| Ok(solvers::solve_hybrid(res, &params)?.0))?
                }
            };
            if let Some(path) = dump_lp {
                let fs = solvers::solve_lp(&inst, eps, IterationBudget::default())?;
                write_json(&path, &fs.to_audit_json(&inst))?;
            }
            save_solution(out.join("solution.json"), &inst, &sol)?;
            write_json(&out.join("report.json"), &report)?;
            write_report_csv(&out.join("report.csv"), &report)?;
            println!("{} profit {:.6} bins {}", report.algorithm, report.profit, report.bins_used);
        }
        Command::Bench { family, n, m, instances, trials, seed, algos, eps, mk_mode, exact, check, out } => {
            let suite = GeneratorSpec::suite(family.into(), n, m, seed, instances);
            let config = BenchConfig {
                algos: algos.into_iter().map(Algorithm::from).collect(),
                trials,
                eps,
                mk_mode: mk_mode.into(),
                exact,
                ..Default::default()
            };
            let res = bench::run_ratio_bench(&suite, &config)?;
            res.write(&out)?;
            res.write_solutions(&out, &suite)?;
            for a in &res.aggregates {
                println!("{:<10} runs {:>5}  ratio/x* {:.4} ± {:.4}", a.algo.as_str(), a.runs, a.mean_ratio_lp, a.sd_ratio_lp);
            }
            if let Some(d) = &res.paired {
                println!("hybrid - baseline: {:+.4} (se {:.4}, {} pairs)", d.mean, d.se, d.pairs);
            }
            if check {
                let failures = res.check();
                for f in &failures {
                    eprintln!("check failed: {f}");
                }
                if !failures.is_empty() {
                    return Ok(ExitCode::from(2));
                }
            }
        }
        Command::Marginal { input, trials, seed, eps, out } => {
            fs::create_dir_all(&out)?;
            let inst = input.load()?;
            let curve = bench::run_marginal_curve(&inst, trials, seed, eps)?;
            write_json(&out.join("marginal.json"), &curve)?;
            fs::write(out.join("marginal.csv"), curve.to_csv()?)?;
            for p in &curve.points {
                println!("{:>4} {:.6} {:.6}", p.j, p.q_hat, p.analytic);
            }
        }
        Command::Concentration { input, ell, trials, t, seed, eps, out } => {
            fs::create_dir_all(&out)?;
            let inst = input.load()?;
            let fs_lp = clp::solve_clp(&inst, eps, IterationBudget::default())?;
            let ell = ell.unwrap_or_else(|| solvers::default_ell(inst.m()));
            let rep = bench::run_concentration(&inst, &fs_lp, ell, trials, &t, seed)?;
            write_json(&out.join("concentration.json"), &rep)?;
            let mut w = csv::Writer::from_path(out.join("concentration.csv"))?;
            w.write_record(["t", "threshold", "empirical", "bound", "se", "ok"])?;
            for p in &rep.points {
                w.write_record([p.t.to_string(), p.threshold.to_string(), p.empirical.to_string(), p.bound.to_string(), p.se.to_string(), p.ok.to_string()])?;
                println!("t {:.3}  empirical {:.4}  bound {:.4}  {}", p.t, p.empirical, p.bound, if p.ok { "ok" } else { "VIOLATED" });
            }
            w.flush()?;
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
