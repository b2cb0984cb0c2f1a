//! Two-dimensional knapsack oracle: find a configuration of maximum total
//! value for a per-item value function. Nonpositive values are clamped to
//! zero and their items left out, which is safe because subsets of
//! configurations are configurations.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{density, Configuration, Vmk2Instance};

pub const DEFAULT_NODE_CAP: u64 = 10_000_000;

const TIE_TOL: f64 = 1e-12;

/// Value of every item of an instance, indexed like the instance.
#[derive(Debug, Clone, PartialEq)]
pub struct ValueAssignment(Vec<f64>);

impl ValueAssignment {
    pub fn new(inst: &Vmk2Instance, values: Vec<f64>) -> Result<Self> {
        if values.len() != inst.len() {
            return Err(Error::InvalidParameter(format!(
                "value assignment has {} entries for {} items",
                values.len(),
                inst.len()
            )));
        }
        Ok(ValueAssignment(values))
    }

    /// Values equal to the item profits.
    pub fn profits(inst: &Vmk2Instance) -> Self {
        ValueAssignment(inst.items().iter().map(|i| i.profit).collect())
    }

    pub fn get(&self, index: usize) -> f64 {
        self.0[index]
    }

    pub fn clamped(&self, index: usize) -> f64 {
        self.0[index].max(0.0)
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn total(&self, c: &Configuration) -> f64 {
        c.iter().map(|i| self.clamped(i)).sum()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PricedColumn {
    pub config: Configuration,
    pub value: f64,
    /// Upper bound on the optimal value minus `value`; zero when exact.
    pub optimality_gap: f64,
}

/// Maximum-value configuration, with the default node cap.
pub fn price_exact(inst: &Vmk2Instance, v: &ValueAssignment) -> Result<PricedColumn> {
    price_exact_with_cap(inst, v, DEFAULT_NODE_CAP)
}

/// Branch and bound over items in value density order. Equal-value optima
/// are resolved towards the lexicographically smallest id set.
pub fn price_exact_with_cap(inst: &Vmk2Instance, v: &ValueAssignment, node_cap: u64) -> Result<PricedColumn> {
    let values: Vec<f64> = (0..inst.len()).map(|i| v.clamped(i)).collect();
    let mut search = Search::new(inst, &values, SearchMode::Exact, node_cap);
    let complete = search.run();
    let config = search.best_configuration();
    let value = v.total(&config);
    if complete {
        Ok(PricedColumn {
            config,
            value,
            optimality_gap: 0.0,
        })
    } else {
        let upper_bound = search.root_bound.max(value);
        Err(Error::PricingBudgetExceeded {
            nodes: search.nodes,
            best: Box::new(PricedColumn {
                config,
                value,
                optimality_gap: upper_bound - value,
            }),
            upper_bound,
        })
    }
}

/// `(1 - eps)`-approximate pricing by profit scaling: values are rounded
/// down to multiples of `eps * v_max / n` and the scaled problem is solved
/// by the same branch and bound. Never fails; if the scaled search runs out
/// of nodes the better of its incumbent and a greedy packing is returned
/// with an honest gap.
pub fn price_approx(inst: &Vmk2Instance, v: &ValueAssignment, eps: f64) -> Result<PricedColumn> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::InvalidParameter(format!("eps must lie in (0, 1), got {eps}")));
    }
    let positive = (0..inst.len()).filter(|&i| v.get(i) > 0.0).count();
    let vmax = (0..inst.len()).map(|i| v.clamped(i)).fold(0.0, f64::max);
    if positive == 0 || vmax <= 0.0 {
        return Ok(PricedColumn {
            config: Configuration::empty(),
            value: 0.0,
            optimality_gap: 0.0,
        });
    }
    let step = eps * vmax / positive as f64;
    let scaled: Vec<f64> = (0..inst.len()).map(|i| (v.clamped(i) / step).floor()).collect();
    let mut search = Search::new(inst, &scaled, SearchMode::Scaled, DEFAULT_NODE_CAP);
    let complete = search.run();
    let scaled_best = search.best_value;
    let scaled_ub = if complete { scaled_best } else { search.root_bound.floor().max(scaled_best) };

    // items whose scaled value rounded to zero may still fit
    let mut config = search.best_configuration();
    let (mut l1, mut l2) = config.load(inst);
    let mut extra = Vec::new();
    for i in by_density(inst, v.values()) {
        let it = inst.item(i);
        if v.get(i) > 0.0 && !config.contains(i) && l1 + it.w1 <= 1.0 && l2 + it.w2 <= 1.0 {
            l1 += it.w1;
            l2 += it.w2;
            extra.push(i);
        }
    }
    if !extra.is_empty() {
        config = Configuration::new(config.iter().chain(extra));
    }
    let greedy = greedy_by_density(inst, v);
    if v.total(&greedy) > v.total(&config) {
        config = greedy;
    }
    let value = v.total(&config);
    let upper = step * (scaled_ub + positive as f64);
    Ok(PricedColumn {
        config,
        value,
        optimality_gap: (upper - value).max(0.0),
    })
}

/// Items with positive value in decreasing `v / (w1 + w2)` order.
fn by_density(inst: &Vmk2Instance, values: &[f64]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..inst.len()).filter(|&i| values[i] > 0.0).collect();
    order.sort_by(|&a, &b| {
        let da = density(values[a], inst.item(a).total_weight());
        let db = density(values[b], inst.item(b).total_weight());
        db.total_cmp(&da).then(values[b].total_cmp(&values[a])).then(a.cmp(&b))
    });
    order
}

/// First-fit in value density order into a single bin.
pub fn greedy_by_density(inst: &Vmk2Instance, v: &ValueAssignment) -> Configuration {
    let (mut l1, mut l2) = (0.0, 0.0);
    let mut picked = Vec::new();
    for i in by_density(inst, v.values()) {
        let it = inst.item(i);
        if l1 + it.w1 <= 1.0 && l2 + it.w2 <= 1.0 {
            l1 += it.w1;
            l2 += it.w2;
            picked.push(i);
        }
    }
    Configuration::new(picked)
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum SearchMode {
    /// Real values; ties broken lexicographically.
    Exact,
    /// Integer-valued; only strict improvements by at least one unit count.
    Scaled,
}

struct Search {
    mode: SearchMode,
    // candidates in aggregated density order
    order: Vec<usize>,
    val: Vec<f64>,
    w1: Vec<f64>,
    w2: Vec<f64>,
    // candidate positions sorted by density in each single dimension
    order_d1: Vec<usize>,
    order_d2: Vec<usize>,
    free: Vec<usize>,
    free_value: f64,
    current: Vec<usize>,
    best_value: f64,
    best_set: Vec<usize>,
    best_sorted: Vec<usize>,
    nodes: u64,
    node_cap: u64,
    aborted: bool,
    root_bound: f64,
}

impl Search {
    fn new(inst: &Vmk2Instance, values: &[f64], mode: SearchMode, node_cap: u64) -> Self {
        let mut free = Vec::new();
        let mut cand = Vec::new();
        for i in by_density(inst, values) {
            let it = inst.item(i);
            if it.w1 == 0.0 && it.w2 == 0.0 {
                free.push(i);
            } else {
                cand.push(i);
            }
        }
        let val: Vec<f64> = cand.iter().map(|&i| values[i]).collect();
        let w1: Vec<f64> = cand.iter().map(|&i| inst.item(i).w1).collect();
        let w2: Vec<f64> = cand.iter().map(|&i| inst.item(i).w2).collect();
        let dim_order = |w: &[f64]| {
            let mut o: Vec<usize> = (0..cand.len()).collect();
            o.sort_by(|&a, &b| density(val[b], w[b]).total_cmp(&density(val[a], w[a])).then(a.cmp(&b)));
            o
        };
        let order_d1 = dim_order(&w1);
        let order_d2 = dim_order(&w2);
        let free_value = free.iter().map(|&i| values[i]).sum();
        Search {
            mode,
            order: cand,
            val,
            w1,
            w2,
            order_d1,
            order_d2,
            free,
            free_value,
            current: Vec::new(),
            best_value: f64::NEG_INFINITY,
            best_set: Vec::new(),
            best_sorted: Vec::new(),
            nodes: 0,
            node_cap,
            aborted: false,
            root_bound: 0.0,
        }
    }

    /// Returns `true` if the search completed within the node cap.
    fn run(&mut self) -> bool {
        self.root_bound = self.free_value + self.bound(0, 1.0, 1.0);
        self.best_value = self.free_value;
        self.best_set.clear();
        self.best_sorted.clear();
        self.dfs(0, 1.0, 1.0, self.free_value);
        !self.aborted
    }

    fn best_configuration(&self) -> Configuration {
        Configuration::new(self.best_set.iter().map(|&k| self.order[k]).chain(self.free.iter().copied()))
    }

    /// Fractional upper bound on the value obtainable from candidates `k..`
    /// with residual capacity `(r1, r2)`: the minimum of three fractional
    /// knapsack relaxations (dimension 1, dimension 2, and their sum).
    fn bound(&self, k: usize, r1: f64, r2: f64) -> f64 {
        let fits = |j: usize| self.w1[j] <= r1 + 1e-12 && self.w2[j] <= r2 + 1e-12;
        let frac = |order: &mut dyn Iterator<Item = usize>, weight: &dyn Fn(usize) -> f64, cap: f64| {
            let mut cap = cap;
            let mut total = 0.0;
            for j in order {
                if j < k || !fits(j) {
                    continue;
                }
                let w = weight(j);
                if w <= cap {
                    cap -= w;
                    total += self.val[j];
                } else {
                    total += self.val[j] * cap / w;
                    break;
                }
            }
            total
        };
        let agg = frac(&mut (k..self.order.len()), &|j| self.w1[j] + self.w2[j], r1 + r2);
        let d1 = frac(&mut self.order_d1.iter().copied(), &|j| self.w1[j], r1);
        let d2 = frac(&mut self.order_d2.iter().copied(), &|j| self.w2[j], r2);
        agg.min(d1).min(d2)
    }

    fn consider(&mut self, value: f64) {
        let improves = match self.mode {
            SearchMode::Exact => value > self.best_value + TIE_TOL,
            SearchMode::Scaled => value > self.best_value + 0.5,
        };
        if improves {
            self.best_value = value;
            self.best_set = self.current.clone();
            self.best_sorted = self.sorted_current();
        } else if self.mode == SearchMode::Exact && (value - self.best_value).abs() <= TIE_TOL {
            let cand = self.sorted_current();
            if cand < self.best_sorted {
                self.best_value = value;
                self.best_set = self.current.clone();
                self.best_sorted = cand;
            }
        }
    }

    fn sorted_current(&self) -> Vec<usize> {
        let mut s: Vec<usize> = self.current.iter().map(|&k| self.order[k]).collect();
        s.sort_unstable();
        s
    }

    fn pruned(&self, bound: f64) -> bool {
        match self.mode {
            SearchMode::Exact => bound < self.best_value - TIE_TOL,
            SearchMode::Scaled => bound < self.best_value + 1.0 - 1e-9,
        }
    }

    fn dfs(&mut self, k: usize, r1: f64, r2: f64, value: f64) {
        self.nodes += 1;
        if self.nodes > self.node_cap {
            self.aborted = true;
            return;
        }
        self.consider(value);
        // skip candidates that cannot fit any more
        let mut k = k;
        while k < self.order.len() && (self.w1[k] > r1 + 1e-12 || self.w2[k] > r2 + 1e-12) {
            k += 1;
        }
        if k == self.order.len() {
            return;
        }
        if self.pruned(value + self.bound(k, r1, r2)) {
            return;
        }
        self.current.push(k);
        self.dfs(k + 1, r1 - self.w1[k], r2 - self.w2[k], value + self.val[k]);
        self.current.pop();
        if self.aborted {
            return;
        }
        self.dfs(k + 1, r1, r2, value);
    }
}
