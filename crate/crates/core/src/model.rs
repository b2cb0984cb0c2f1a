//! Instances, configurations and solutions, plus the on-disk formats.
//!
//! Items inside a [`Vmk2Instance`] are kept sorted by id, so an item is
//! addressed by its position in that order. [`Configuration`] stores those
//! positions, and comparing two configurations lexicographically compares
//! their id sets.

use std::collections::HashSet;
use std::fmt;
use std::fs;
use std::io::Read;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

/// Absolute per-dimension slack allowed when checking bin capacity.
pub const TAU_FEAS: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Item {
    pub id: String,
    pub w1: f64,
    pub w2: f64,
    #[serde(rename = "p")]
    pub profit: f64,
}

impl Item {
    pub fn new(id: impl Into<String>, w1: f64, w2: f64, profit: f64) -> Self {
        Item {
            id: id.into(),
            w1,
            w2,
            profit,
        }
    }

    /// Larger of the two weight coordinates.
    #[inline]
    pub fn max_weight(&self) -> f64 {
        self.w1.max(self.w2)
    }

    #[inline]
    pub fn total_weight(&self) -> f64 {
        self.w1 + self.w2
    }

    /// Profit per unit of `w1 + w2`; `+inf` for weightless items with profit.
    pub fn density(&self) -> f64 {
        density(self.profit, self.total_weight())
    }
}

pub(crate) fn density(profit: f64, weight: f64) -> f64 {
    if weight > 0.0 {
        profit / weight
    } else if profit > 0.0 {
        f64::INFINITY
    } else {
        0.0
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Vmk2Instance {
    items: Vec<Item>,
    m: usize,
}

impl Vmk2Instance {
    /// Validates and builds an instance. Items are reordered by id.
    pub fn new(mut items: Vec<Item>, m: usize) -> Result<Self> {
        if m < 1 {
            return Err(Error::validation(None, "m", "bin count must be at least 1"));
        }
        for item in &items {
            validate_item(item)?;
        }
        items.sort_by(|a, b| a.id.cmp(&b.id));
        if let Some(w) = items.windows(2).find(|w| w[0].id == w[1].id) {
            return Err(Error::validation(Some(&w[0].id), "id", "duplicate item id"));
        }
        Ok(Vmk2Instance { items, m })
    }

    pub fn items(&self) -> &[Item] {
        &self.items
    }

    pub fn item(&self, index: usize) -> &Item {
        &self.items[index]
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn index_of(&self, id: &str) -> Option<usize> {
        self.items.binary_search_by(|it| it.id.as_str().cmp(id)).ok()
    }

    pub fn total_profit(&self) -> f64 {
        self.items.iter().map(|i| i.profit).fold(0.0, |a, p| a + p)
    }

    pub fn profit_of<'a>(&self, indices: impl IntoIterator<Item = &'a usize>) -> f64 {
        indices.into_iter().map(|&i| self.items[i].profit).fold(0.0, |a, p| a + p)
    }

    /// Same items, different bin count.
    pub fn with_bins(&self, m: usize) -> Result<Self> {
        if m < 1 {
            return Err(Error::validation(None, "m", "bin count must be at least 1"));
        }
        Ok(Vmk2Instance {
            items: self.items.clone(),
            m,
        })
    }

    /// The sub-instance on `indices` (any order, no duplicates) with `m` bins.
    /// Returns the instance and, for each of its items, the index in `self`.
    pub fn restrict(&self, indices: &[usize], m: usize) -> Result<(Self, Vec<usize>)> {
        if m < 1 {
            return Err(Error::validation(None, "m", "bin count must be at least 1"));
        }
        let mut sorted = indices.to_vec();
        sorted.sort_unstable();
        sorted.dedup();
        let items = sorted.iter().map(|&i| self.items[i].clone()).collect();
        Ok((Vmk2Instance { items, m }, sorted))
    }

    /// Canonical JSON: items sorted by id, fixed field order, every float
    /// printed with 17 significant digits.
    pub fn to_canonical_json(&self) -> String {
        let mut out = String::with_capacity(64 + 96 * self.items.len());
        out.push_str(&format!("{{\"m\":{},\"items\":[", self.m));
        for (k, item) in self.items.iter().enumerate() {
            if k > 0 {
                out.push(',');
            }
            out.push_str(&format!(
                "{{\"id\":{},\"w1\":{},\"w2\":{},\"p\":{}}}",
                serde_json::to_string(&item.id).expect("string serialization"),
                fmt_f64(item.w1),
                fmt_f64(item.w2),
                fmt_f64(item.profit)
            ));
        }
        out.push_str("]}\n");
        out
    }

    /// Hex SHA-256 of [`Self::to_canonical_json`].
    pub fn canonical_hash(&self) -> String {
        hex::encode(Sha256::digest(self.to_canonical_json().as_bytes()))
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        let raw: RawInstance = serde_json::from_str(s)?;
        if raw.m < 1 {
            return Err(Error::validation(None, "m", format!("bin count must be at least 1, got {}", raw.m)));
        }
        Vmk2Instance::new(raw.items, raw.m as usize)
    }

    /// Reads `id,w1,w2,p` rows; the bin count comes from the caller.
    pub fn from_csv_reader<R: Read>(reader: R, m: usize) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
        let headers = rdr.headers()?.clone();
        let expected = ["id", "w1", "w2", "p"];
        if headers.len() != 4 || headers.iter().zip(expected).any(|(h, e)| h != e) {
            return Err(Error::Parse(format!(
                "expected csv header `id,w1,w2,p`, found `{}`",
                headers.iter().collect::<Vec<_>>().join(",")
            )));
        }
        let mut items = Vec::new();
        for row in rdr.deserialize() {
            let item: Item = row?;
            items.push(item);
        }
        Vmk2Instance::new(items, m)
    }
}

fn validate_item(item: &Item) -> Result<()> {
    if item.id.is_empty() {
        return Err(Error::validation(None, "id", "empty item id"));
    }
    for (field, w) in [("w1", item.w1), ("w2", item.w2)] {
        if !(0.0..=1.0).contains(&w) {
            return Err(Error::validation(
                Some(&item.id),
                field,
                format!("weight {w} outside [0, 1]"),
            ));
        }
    }
    if !(item.profit.is_finite() && item.profit >= 0.0) {
        return Err(Error::validation(
            Some(&item.id),
            "p",
            format!("profit {} must be finite and nonnegative", item.profit),
        ));
    }
    Ok(())
}

fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

#[derive(Deserialize)]
struct RawInstance {
    m: i64,
    items: Vec<Item>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InstanceFormat {
    Json,
    Csv,
}

impl InstanceFormat {
    pub fn from_path(path: &Path) -> Option<Self> {
        match path.extension()?.to_str()?.to_ascii_lowercase().as_str() {
            "json" => Some(InstanceFormat::Json),
            "csv" => Some(InstanceFormat::Csv),
            _ => None,
        }
    }
}

impl FromStr for InstanceFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "json" => Ok(InstanceFormat::Json),
            "csv" => Ok(InstanceFormat::Csv),
            other => Err(Error::InvalidParameter(format!("unknown instance format `{other}`"))),
        }
    }
}

/// Loads and validates an instance. CSV files carry no bin count, so `m`
/// must be supplied for them; for JSON it is ignored.
pub fn load_instance(path: impl AsRef<Path>, format: InstanceFormat, m: Option<usize>) -> Result<Vmk2Instance> {
    let path = path.as_ref();
    match format {
        InstanceFormat::Json => Vmk2Instance::from_json_str(&fs::read_to_string(path)?),
        InstanceFormat::Csv => {
            let m = m.ok_or_else(|| Error::InvalidParameter("csv instances need an explicit bin count".into()))?;
            Vmk2Instance::from_csv_reader(fs::File::open(path)?, m)
        }
    }
}

pub fn save_instance(path: impl AsRef<Path>, inst: &Vmk2Instance) -> Result<()> {
    fs::write(path, inst.to_canonical_json())?;
    Ok(())
}

/// A set of items packed together into one bin, stored as sorted, distinct
/// instance indices.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Configuration(Vec<usize>);

impl Configuration {
    pub fn new(items: impl IntoIterator<Item = usize>) -> Self {
        let mut v: Vec<usize> = items.into_iter().collect();
        v.sort_unstable();
        v.dedup();
        Configuration(v)
    }

    pub fn empty() -> Self {
        Configuration(Vec::new())
    }

    pub fn items(&self) -> &[usize] {
        &self.0
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().copied()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, index: usize) -> bool {
        self.0.binary_search(&index).is_ok()
    }

    /// Total weight `(w1, w2)`.
    pub fn load(&self, inst: &Vmk2Instance) -> (f64, f64) {
        self.0.iter().fold((0.0, 0.0), |(a, b), &i| {
            let it = inst.item(i);
            (a + it.w1, b + it.w2)
        })
    }

    pub fn is_feasible(&self, inst: &Vmk2Instance) -> bool {
        let (a, b) = self.load(inst);
        a <= 1.0 + TAU_FEAS && b <= 1.0 + TAU_FEAS
    }

    pub fn profit(&self, inst: &Vmk2Instance) -> f64 {
        inst.profit_of(&self.0)
    }

    /// Ids of the contained items, in id order.
    pub fn ids<'a>(&'a self, inst: &'a Vmk2Instance) -> impl Iterator<Item = &'a str> + 'a {
        self.0.iter().map(|&i| inst.item(i).id.as_str())
    }

    pub(crate) fn retain(&mut self, f: impl FnMut(&usize) -> bool) {
        self.0.retain(f);
    }
}

impl FromIterator<usize> for Configuration {
    fn from_iter<T: IntoIterator<Item = usize>>(iter: T) -> Self {
        Configuration::new(iter)
    }
}

impl fmt::Display for Configuration {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (k, i) in self.0.iter().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "{i}")?;
        }
        write!(f, "}}")
    }
}

/// One configuration per bin. An item may appear in several bins; its
/// profit is still counted once.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct Vmk2Solution {
    pub bins: Vec<Configuration>,
}

impl Vmk2Solution {
    pub fn empty(m: usize) -> Self {
        Vmk2Solution {
            bins: vec![Configuration::empty(); m],
        }
    }

    pub fn new(bins: Vec<Configuration>) -> Self {
        Vmk2Solution { bins }
    }

    /// Distinct packed items, sorted.
    pub fn packed_items(&self) -> Vec<usize> {
        let mut all: Vec<usize> = self.bins.iter().flat_map(|b| b.iter()).collect();
        all.sort_unstable();
        all.dedup();
        all
    }

    pub fn profit(&self, inst: &Vmk2Instance) -> f64 {
        inst.profit_of(&self.packed_items())
    }

    pub fn bins_used(&self) -> usize {
        self.bins.iter().filter(|b| !b.is_empty()).count()
    }

    pub fn to_file(&self, inst: &Vmk2Instance) -> SolutionFile {
        SolutionFile {
            bins: self
                .bins
                .iter()
                .map(|b| b.ids(inst).map(str::to_owned).collect())
                .collect(),
        }
    }

    pub fn from_file(inst: &Vmk2Instance, file: &SolutionFile) -> Result<Self> {
        let bins = file
            .bins
            .iter()
            .map(|ids| {
                ids.iter()
                    .map(|id| inst.index_of(id).ok_or_else(|| Error::UnknownItem(id.clone())))
                    .collect::<Result<Configuration>>()
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Vmk2Solution { bins })
    }
}

/// On-disk solution: `{"bins": [[id, ...], ...]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolutionFile {
    pub bins: Vec<Vec<String>>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum Violation {
    /// Bin `bin` exceeds capacity in `dimension` (1 or 2).
    Capacity { bin: usize, dimension: usize, load: f64 },
    BinCount { expected: usize, found: usize },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProfitReport {
    pub profit: f64,
    pub violations: Vec<Violation>,
}

impl ProfitReport {
    pub fn is_feasible(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Profit of the union of all bins and every capacity or bin-count violation.
pub fn check_solution(inst: &Vmk2Instance, sol: &Vmk2Solution) -> Result<ProfitReport> {
    if let Some(bad) = sol.bins.iter().flat_map(|b| b.iter()).find(|&i| i >= inst.len()) {
        return Err(Error::UnknownItem(format!("#{bad}")));
    }
    let mut violations = Vec::new();
    if sol.bins.len() != inst.m() {
        violations.push(Violation::BinCount {
            expected: inst.m(),
            found: sol.bins.len(),
        });
    }
    for (b, bin) in sol.bins.iter().enumerate() {
        let (l1, l2) = bin.load(inst);
        for (dimension, load) in [(1, l1), (2, l2)] {
            if load > 1.0 + TAU_FEAS {
                violations.push(Violation::Capacity { bin: b, dimension, load });
            }
        }
    }
    Ok(ProfitReport {
        profit: sol.profit(inst),
        violations,
    })
}

/// Keeps each item only in the lowest-index bin that holds it.
pub fn dedup_solution(sol: &Vmk2Solution) -> Vmk2Solution {
    let mut seen = HashSet::new();
    let bins = sol
        .bins
        .iter()
        .map(|bin| {
            let mut b = bin.clone();
            b.retain(|&i| seen.insert(i));
            b
        })
        .collect();
    Vmk2Solution { bins }
}

pub fn save_solution(path: impl AsRef<Path>, inst: &Vmk2Instance, sol: &Vmk2Solution) -> Result<()> {
    fs::write(path, serde_json::to_string_pretty(&sol.to_file(inst))?)?;
    Ok(())
}

pub fn load_solution(path: impl AsRef<Path>, inst: &Vmk2Instance) -> Result<Vmk2Solution> {
    let file: SolutionFile = serde_json::from_str(&fs::read_to_string(path)?)?;
    Vmk2Solution::from_file(inst, &file)
}
