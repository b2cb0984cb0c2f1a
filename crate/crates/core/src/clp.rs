//! The configuration LP
//!
//! ```text
//!   max  Σ_C x_C · p(C)
//!   s.t. Σ_C x_C          <= m      (dual λ)
//!        Σ_{C ∋ i} x_C    <= 1      (dual μ_i, one row per item)
//!        x >= 0
//! ```
//!
//! solved by column generation over a restricted pool of configurations,
//! and sampling of configurations distributed by the solution.
//!
//! Every round prices `v(i) = p(i) - μ_i`. With `P` the pricing value (or
//! an upper bound on it), `(max(λ, P), μ)` is feasible for the dual of the
//! full LP, so `m·max(λ, P) + Σ μ_i` bounds the LP optimum from above.
//! That bound certifies the gap reported in [`FractionalSolution`].

use std::collections::HashSet;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{Configuration, Vmk2Instance};
use crate::pricing::{self, PricedColumn, ValueAssignment, DEFAULT_NODE_CAP};
use crate::rng::RngHandle;
use crate::simplex::{Column, DenseSimplex, LpStatus};

pub const TAU_LP: f64 = 1e-7;

const MAX_PIVOTS_PER_ROUND: usize = 200_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum PricingMode {
    Exact,
    /// Profit-scaling pricing with the LP's `eps`.
    Approx,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IterationBudget {
    pub max_rounds: usize,
    /// Stop as soon as the certified gap drops below `eps` instead of
    /// running until no column has positive reduced cost.
    pub early_stop: bool,
    pub pricing: PricingMode,
    pub pricing_node_cap: u64,
}

impl Default for IterationBudget {
    fn default() -> Self {
        IterationBudget {
            max_rounds: 500,
            early_stop: false,
            pricing: PricingMode::Exact,
            pricing_node_cap: DEFAULT_NODE_CAP,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FractionalSolution {
    pub m: usize,
    pub pool: Vec<Configuration>,
    /// `x_C` for every pool column.
    pub mass: Vec<f64>,
    /// LP objective `x*`.
    pub value: f64,
    pub dual_bin_price: f64,
    pub dual_item_prices: Vec<f64>,
    pub converged: bool,
    /// `(upper_bound - value) / upper_bound`.
    pub certified_gap: f64,
    pub upper_bound: f64,
    pub rounds: usize,
}

impl FractionalSolution {
    pub fn total_mass(&self) -> f64 {
        self.mass.iter().sum()
    }

    /// Pool columns with positive mass.
    pub fn support(&self) -> impl Iterator<Item = (&Configuration, f64)> + '_ {
        self.pool.iter().zip(self.mass.iter().copied()).filter(|&(_, x)| x > 0.0)
    }

    /// `s_i = Σ_{C ∋ i} x_C` for each of the `n` items.
    pub fn item_coverage(&self, n: usize) -> Vec<f64> {
        let mut s = vec![0.0; n];
        for (c, x) in self.support() {
            for i in c.iter() {
                s[i] += x;
            }
        }
        s
    }

    /// Largest violation of the two constraint families.
    pub fn max_violation(&self, n: usize) -> f64 {
        let bin = self.total_mass() - self.m as f64;
        self.item_coverage(n).into_iter().map(|s| s - 1.0).fold(bin, f64::max).max(0.0)
    }

    /// `p(C) - λ - μ(C)` of a configuration under the final duals.
    pub fn reduced_cost(&self, inst: &Vmk2Instance, c: &Configuration) -> f64 {
        c.iter().map(|i| inst.item(i).profit - self.dual_item_prices[i]).sum::<f64>() - self.dual_bin_price
    }

    /// Pool and masses keyed by item ids, for auditing.
    pub fn to_audit_json(&self, inst: &Vmk2Instance) -> serde_json::Value {
        let columns: Vec<_> = self
            .pool
            .iter()
            .zip(&self.mass)
            .map(|(c, &x)| serde_json::json!({ "items": c.ids(inst).collect::<Vec<_>>(), "mass": x }))
            .collect();
        serde_json::json!({
            "m": self.m,
            "value": self.value,
            "upper_bound": self.upper_bound,
            "certified_gap": self.certified_gap,
            "converged": self.converged,
            "rounds": self.rounds,
            "dual_bin_price": self.dual_bin_price,
            "dual_item_prices": inst.items().iter().zip(&self.dual_item_prices)
                .map(|(it, &mu)| (it.id.clone(), serde_json::json!(mu)))
                .collect::<serde_json::Map<_, _>>(),
            "columns": columns,
        })
    }
}

pub fn solve_clp(inst: &Vmk2Instance, eps: f64, budget: IterationBudget) -> Result<FractionalSolution> {
    solve_clp_warm(inst, eps, budget, &[])
}

/// Column generation starting from the singletons, a greedy packing and
/// the given extra columns.
pub fn solve_clp_warm(
    inst: &Vmk2Instance,
    eps: f64,
    budget: IterationBudget,
    warm: &[Configuration],
) -> Result<FractionalSolution> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::InvalidParameter(format!("eps must lie in (0, 1), got {eps}")));
    }
    let n = inst.len();
    let m = inst.m();
    let mut rhs = vec![1.0; n + 1];
    rhs[0] = m as f64;
    let mut lp = DenseSimplex::new(rhs);
    let mut pool: Vec<Configuration> = Vec::new();
    let mut seen: HashSet<Configuration> = HashSet::new();

    let greedy = pricing::greedy_by_density(inst, &ValueAssignment::profits(inst));
    let initial = (0..n)
        .map(|i| Configuration::new([i]))
        .chain(std::iter::once(greedy))
        .chain(warm.iter().cloned());
    for c in initial {
        if !c.is_empty() && c.is_feasible(inst) && seen.insert(c.clone()) {
            lp.add_column(column_of(inst, &c));
            pool.push(c);
        }
    }

    let mut best_upper = f64::INFINITY;
    let mut rounds = 0;
    let mut no_improving_column = false;
    loop {
        match lp.solve(MAX_PIVOTS_PER_ROUND) {
            LpStatus::Optimal => {}
            LpStatus::Unbounded => return Err(Error::DegenerateInstance("restricted master LP is unbounded".into())),
            LpStatus::IterationLimit => {
                lp.refactor();
                if lp.solve(MAX_PIVOTS_PER_ROUND) != LpStatus::Optimal {
                    return Err(Error::DegenerateInstance("restricted master LP did not converge".into()));
                }
            }
        }
        let y = lp.duals();
        let lambda = y[0].max(0.0);
        let mu: Vec<f64> = y[1..].iter().map(|&v| v.max(0.0)).collect();
        let z = lp.objective();

        let values = inst.items().iter().zip(&mu).map(|(it, &mu)| it.profit - mu).collect();
        let v = ValueAssignment::new(inst, values)?;
        let (column, pricing_upper) = price(inst, &v, eps, &budget)?;
        let upper = m as f64 * lambda.max(pricing_upper) + mu.iter().sum::<f64>();
        best_upper = best_upper.min(upper.max(z));
        let gap = relative_gap(z, best_upper);

        if pricing_upper - lambda <= TAU_LP {
            no_improving_column = true;
        }
        let stop = no_improving_column
            || (budget.early_stop && gap <= eps)
            || rounds >= budget.max_rounds
            || column.value - lambda <= TAU_LP
            || !seen.insert(column.config.clone());
        if stop {
            let x = lp.primal();
            let fs = FractionalSolution {
                m,
                pool,
                mass: x,
                value: z,
                dual_bin_price: lambda,
                dual_item_prices: mu,
                converged: gap <= eps,
                certified_gap: gap,
                upper_bound: best_upper,
                rounds,
            };
            return if fs.converged {
                Ok(fs)
            } else {
                Err(Error::BudgetExhausted(Box::new(fs)))
            };
        }
        lp.add_column(column_of(inst, &column.config));
        pool.push(column.config);
        rounds += 1;
    }
}

fn relative_gap(value: f64, upper: f64) -> f64 {
    if upper <= 0.0 {
        0.0
    } else {
        ((upper - value) / upper).max(0.0)
    }
}

/// Best column found and an upper bound on the pricing optimum.
fn price(inst: &Vmk2Instance, v: &ValueAssignment, eps: f64, budget: &IterationBudget) -> Result<(PricedColumn, f64)> {
    match budget.pricing {
        PricingMode::Exact => match pricing::price_exact_with_cap(inst, v, budget.pricing_node_cap) {
            Ok(c) => {
                let ub = c.value;
                Ok((c, ub))
            }
            Err(Error::PricingBudgetExceeded { best, upper_bound, .. }) => Ok((*best, upper_bound)),
            Err(e) => Err(e),
        },
        PricingMode::Approx => {
            let c = pricing::price_approx(inst, v, eps)?;
            let ub = c.value + c.optimality_gap;
            Ok((c, ub))
        }
    }
}

fn column_of(inst: &Vmk2Instance, c: &Configuration) -> Column {
    let mut entries = Vec::with_capacity(c.len() + 1);
    entries.push((0, 1.0));
    entries.extend(c.iter().map(|i| (i + 1, 1.0)));
    Column {
        cost: c.profit(inst),
        entries,
    }
}

/// Draws configurations distributed by a fractional solution: column `C`
/// with probability `x_C / m`, the empty configuration with the remaining
/// probability `1 - Σ x_C / m`.
#[derive(Debug, Clone)]
pub struct Sampler<'a> {
    fs: &'a FractionalSolution,
    support: Vec<usize>,
    /// Prefix sums of the support probabilities followed by a final 1.0
    /// for the empty configuration.
    cumulative: Vec<f64>,
    empty: Configuration,
}

impl<'a> Sampler<'a> {
    pub fn new(fs: &'a FractionalSolution) -> Self {
        let norm = fs.total_mass().max(fs.m as f64);
        let mut support = Vec::new();
        let mut cumulative = Vec::new();
        let mut acc = 0.0;
        for (k, &x) in fs.mass.iter().enumerate() {
            if x > 0.0 {
                acc += x / norm;
                support.push(k);
                cumulative.push(acc.min(1.0));
            }
        }
        cumulative.push(1.0);
        Sampler {
            fs,
            support,
            cumulative,
            empty: Configuration::empty(),
        }
    }

    pub fn cumulative(&self) -> &[f64] {
        &self.cumulative
    }

    pub fn solution(&self) -> &FractionalSolution {
        self.fs
    }

    pub fn sample(&self, rng: &mut RngHandle) -> &Configuration {
        let u = rng.unit();
        let k = self.cumulative.partition_point(|&c| c <= u);
        match self.support.get(k) {
            Some(&pool_index) => &self.fs.pool[pool_index],
            None => &self.empty,
        }
    }

    /// `ell` independent draws and the union `T` of their items (sorted).
    pub fn sample_t(&self, ell: usize, rng: &mut RngHandle) -> (Vec<Configuration>, Vec<usize>) {
        let configs: Vec<Configuration> = (0..ell).map(|_| self.sample(rng).clone()).collect();
        let mut t: Vec<usize> = configs.iter().flat_map(|c| c.iter()).collect();
        t.sort_unstable();
        t.dedup();
        (configs, t)
    }
}

pub fn sample_configuration(fs: &FractionalSolution, rng: &mut RngHandle) -> Configuration {
    Sampler::new(fs).sample(rng).clone()
}

pub fn sample_t(fs: &FractionalSolution, ell: usize, rng: &mut RngHandle) -> (Vec<Configuration>, Vec<usize>) {
    Sampler::new(fs).sample_t(ell, rng)
}
