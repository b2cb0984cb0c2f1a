//! Independent oracles shared by the integration and acceptance tests.
#![allow(dead_code)]

use vmk2::bench::{generate, Family, GeneratorSpec};
use vmk2::Vmk2Instance;

/// Optimum by exhaustive enumeration: the fewest bins covering each item
/// subset is computed over all partitions into single-bin feasible parts,
/// and the best subset needing at most `m` bins wins.
pub fn naive_opt(inst: &Vmk2Instance) -> f64 {
    let n = inst.len();
    assert!(n <= 16, "enumeration oracle is for tiny instances");
    let full = 1usize << n;
    let mut w1 = vec![0.0; full];
    let mut w2 = vec![0.0; full];
    let mut p = vec![0.0; full];
    for mask in 1..full {
        let low = mask.trailing_zeros() as usize;
        let rest = mask & (mask - 1);
        w1[mask] = w1[rest] + inst.item(low).w1;
        w2[mask] = w2[rest] + inst.item(low).w2;
        p[mask] = p[rest] + inst.item(low).profit;
    }
    let fits = |mask: usize| w1[mask] <= 1.0 + 1e-9 && w2[mask] <= 1.0 + 1e-9;
    let mut bins = vec![usize::MAX; full];
    bins[0] = 0;
    for mask in 1..full {
        let low = mask & mask.wrapping_neg();
        let rest = mask ^ low;
        // every part containing the lowest item
        let mut sub = rest;
        loop {
            let part = sub | low;
            if fits(part) && bins[mask ^ part] != usize::MAX {
                bins[mask] = bins[mask].min(bins[mask ^ part] + 1);
            }
            if sub == 0 {
                break;
            }
            sub = (sub - 1) & rest;
        }
    }
    (0..full).filter(|&mask| bins[mask] <= inst.m()).map(|mask| p[mask]).fold(0.0, f64::max)
}

/// Best single-bin profit by enumeration.
pub fn naive_max_configuration(inst: &Vmk2Instance) -> f64 {
    let n = inst.len();
    (0usize..1 << n)
        .filter_map(|mask| {
            let set: Vec<usize> = (0..n).filter(|&i| mask >> i & 1 == 1).collect();
            let a: f64 = set.iter().map(|&i| inst.item(i).w1).sum();
            let b: f64 = set.iter().map(|&i| inst.item(i).w2).sum();
            (a <= 1.0 && b <= 1.0).then(|| set.iter().map(|&i| inst.item(i).profit).sum::<f64>())
        })
        .fold(0.0, f64::max)
}

/// Fifty seeded instances with `6 <= n <= 12` and `1 <= m <= 3`, cycling
/// through the generator families.
pub fn exact_suite() -> Vec<Vmk2Instance> {
    let families = [Family::Uniform, Family::Correlated, Family::Clustered, Family::ZipfProfit];
    (0..50u64)
        .map(|k| {
            let n = 6 + (k as usize * 5) % 7;
            let m = 1 + k as usize % 3;
            generate(&GeneratorSpec::new(families[k as usize % 4], n, m, 1000 + k)).unwrap()
        })
        .collect()
}
