//! Shattering checks, dimension searches and the list Sauer bound.

use std::collections::{HashMap, HashSet};
use std::fmt;

use itertools::Itertools;
use num_bigint::BigUint;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::hclass::{CoordSequence, HypothesisClass, Label};

/// Which dimension a report describes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum DimensionKind {
    Ds,
    KDs,
    Natarajan,
    KNatarajan,
    Exponential,
    KExponential,
}

impl DimensionKind {
    fn for_family(family: Family, k: usize) -> Self {
        match (family, k == 1) {
            (Family::Ds, true) => Self::Ds,
            (Family::Ds, false) => Self::KDs,
            (Family::Natarajan, true) => Self::Natarajan,
            (Family::Natarajan, false) => Self::KNatarajan,
            (Family::Exponential, true) => Self::Exponential,
            (Family::Exponential, false) => Self::KExponential,
        }
    }
}

impl fmt::Display for DimensionKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            Self::Ds => "DS",
            Self::KDs => "kDS",
            Self::Natarajan => "Natarajan",
            Self::KNatarajan => "kNatarajan",
            Self::Exponential => "Exponential",
            Self::KExponential => "kExponential",
        };
        f.write_str(name)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DimensionReport {
    pub kind: DimensionKind,
    pub k: usize,
    pub value: usize,
    pub witness: Option<CoordSequence>,
    /// True when every candidate sequence that could beat `value` was checked.
    pub exhaustive: bool,
}

impl DimensionReport {
    /// `kind,k,value,exhaustive,witness` with a 1-based, space separated witness.
    pub fn to_csv_row(&self) -> String {
        let witness = self.witness.as_ref().map(|w| w.to_one_based_string()).unwrap_or_default();
        format!("{},{},{},{},{}", self.kind, self.k, self.value, self.exhaustive, witness)
    }
}

fn check_k(k: usize) -> Result<()> {
    if k == 0 {
        Err(Error::InvalidArgument("k must be positive".into()))
    } else {
        Ok(())
    }
}

/// All rows of `class` that are `i`-neighbors of `f`.
pub fn i_neighbors(class: &HypothesisClass, f: &[Label], i: usize) -> Result<Vec<Vec<Label>>> {
    if i >= class.num_coords() {
        return Err(Error::CoordOutOfRange { coord: i, num_coords: class.num_coords() });
    }
    if !class.contains(f) {
        return Err(Error::NotInClass);
    }
    Ok(class
        .rows()
        .iter()
        .filter(|g| {
            g[i] != f[i] && g.iter().zip(f).enumerate().all(|(j, (a, b))| j == i || a == b)
        })
        .cloned()
        .collect())
}

/// Alive flags after peeling every row with at most `k` alive members in some
/// direction group (i.e. fewer than `k` neighbors in that direction).
///
/// The surviving set is the unique maximal subfamily in which every row has at
/// least `k` `i`-neighbors for every coordinate `i`.
pub fn peel_core(class: &HypothesisClass, k: usize) -> Vec<bool> {
    let n = class.len();
    let m = class.num_coords();
    // group_of[v * m + i] = group id of row v in direction i
    let mut group_of = vec![0usize; n * m];
    let mut members: Vec<Vec<usize>> = Vec::new();
    for i in 0..m {
        let mut index: HashMap<Vec<Label>, usize> = HashMap::new();
        for (v, row) in class.rows().iter().enumerate() {
            let key: Vec<Label> =
                row.iter().enumerate().filter(|&(j, _)| j != i).map(|(_, &x)| x).collect();
            let id = *index.entry(key).or_insert_with(|| {
                members.push(Vec::new());
                members.len() - 1
            });
            members[id].push(v);
            group_of[v * m + i] = id;
        }
    }
    let mut count: Vec<usize> = members.iter().map(Vec::len).collect();
    let mut alive = vec![true; n];
    let mut queued = vec![false; n];
    let mut queue = Vec::new();
    for v in 0..n {
        if (0..m).any(|i| count[group_of[v * m + i]] <= k) {
            queued[v] = true;
            queue.push(v);
        }
    }
    while let Some(v) = queue.pop() {
        alive[v] = false;
        for i in 0..m {
            let g = group_of[v * m + i];
            count[g] -= 1;
            if count[g] == k {
                for &u in &members[g] {
                    if alive[u] && !queued[u] {
                        queued[u] = true;
                        queue.push(u);
                    }
                }
            }
        }
    }
    alive
}

/// The surviving core of `H|_S`, or `None` when `S` is not k-DS shattered.
pub fn kds_core(class: &HypothesisClass, seq: &CoordSequence, k: usize) -> Result<Option<HypothesisClass>> {
    check_k(k)?;
    let restricted = class.restrict(seq)?;
    let alive = peel_core(&restricted, k);
    let keep: Vec<usize> = (0..alive.len()).filter(|&v| alive[v]).collect();
    Ok(restricted.subset(&keep))
}

pub fn kds_shatters(class: &HypothesisClass, seq: &CoordSequence, k: usize) -> Result<bool> {
    Ok(kds_core(class, seq, k)?.is_some())
}

/// Witness lists `y_1..y_d` (each of size `k+1`, ascending) whose product is
/// contained in `H|_S`, or `None`.
pub fn knat_witness(class: &HypothesisClass, seq: &CoordSequence, k: usize) -> Result<Option<Vec<Vec<Label>>>> {
    check_k(k)?;
    let restricted = class.restrict(seq)?;
    let rows: HashSet<Vec<Label>> = restricted.rows().iter().cloned().collect();
    let mut lists = Vec::new();
    Ok(if product_search(rows, k, &mut lists) { Some(lists) } else { None })
}

pub fn knat_shatters(class: &HypothesisClass, seq: &CoordSequence, k: usize) -> Result<bool> {
    Ok(knat_witness(class, seq, k)?.is_some())
}

// `rows` are label vectors of a common length; decide whether some product of
// (k+1)-lists is contained in them, choosing lists front to back.
fn product_search(rows: HashSet<Vec<Label>>, k: usize, lists: &mut Vec<Vec<Label>>) -> bool {
    let Some(len) = rows.iter().next().map(Vec::len) else {
        return false;
    };
    if len == 0 {
        return true;
    }
    let mut tails: HashMap<Label, HashSet<Vec<Label>>> = HashMap::new();
    for row in &rows {
        tails.entry(row[0]).or_default().insert(row[1..].to_vec());
    }
    let mut labels: Vec<Label> = tails.keys().copied().collect();
    labels.sort_unstable();
    if labels.len() < k + 1 {
        return false;
    }
    for choice in labels.iter().copied().combinations(k + 1) {
        let mut common: HashSet<Vec<Label>> = tails[&choice[0]].clone();
        for a in &choice[1..] {
            let other = &tails[a];
            common.retain(|t| other.contains(t));
            if common.is_empty() {
                break;
            }
        }
        if common.is_empty() {
            continue;
        }
        lists.push(choice);
        if product_search(common, k, lists) {
            return true;
        }
        lists.pop();
    }
    false
}

/// `|H|_S| >= (k+1)^|S|`.
pub fn kexp_shatters(class: &HypothesisClass, seq: &CoordSequence, k: usize) -> Result<bool> {
    check_k(k)?;
    let size = class.restrict(seq)?.len() as u128;
    Ok(match (k as u128 + 1).checked_pow(seq.len() as u32) {
        Some(need) => size >= need,
        None => false,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Family {
    Ds,
    Natarajan,
    Exponential,
}

fn shatters(family: Family, class: &HypothesisClass, seq: &CoordSequence, k: usize) -> Result<bool> {
    match family {
        Family::Ds => kds_shatters(class, seq, k),
        Family::Natarajan => knat_shatters(class, seq, k),
        Family::Exponential => kexp_shatters(class, seq, k),
    }
}

/// Largest `d` with `(k+1)^d <= n`.
fn log_floor(n: usize, k: usize) -> usize {
    let base = k as u128 + 1;
    let mut d = 0;
    let mut pow: u128 = base;
    while pow <= n as u128 {
        d += 1;
        pow = pow.saturating_mul(base);
    }
    d
}

fn dimension(family: Family, class: &HypothesisClass, k: usize, cap: u64) -> Result<DimensionReport> {
    check_k(k)?;
    if cap == 0 {
        return Err(Error::InvalidArgument("cap must be at least 1".into()));
    }
    let kind = DimensionKind::for_family(family, k);
    // A coordinate with at most k realized labels can host neither k neighbors
    // nor a (k+1)-list.
    let candidates: Vec<usize> = match family {
        Family::Exponential => (0..class.num_coords()).collect(),
        _ => (0..class.num_coords()).filter(|&c| class.labels_at(c).len() > k).collect(),
    };
    let top = match family {
        Family::Ds => candidates.len(),
        _ => candidates.len().min(log_floor(class.len(), k)),
    };
    let mut checks: u64 = 0;
    for size in (1..=top).rev() {
        for combo in candidates.iter().copied().combinations(size) {
            if checks >= cap {
                return greedy_report(family, class, k, &candidates, kind);
            }
            checks += 1;
            let seq = CoordSequence::new(combo)?;
            if shatters(family, class, &seq, k)? {
                return Ok(DimensionReport { kind, k, value: size, witness: Some(seq), exhaustive: true });
            }
        }
    }
    Ok(DimensionReport { kind, k, value: 0, witness: None, exhaustive: true })
}

// Budget fallback: extend a sequence coordinate by coordinate while it stays
// shattered. Any sequence found is a valid lower bound.
fn greedy_report(
    family: Family,
    class: &HypothesisClass,
    k: usize,
    candidates: &[usize],
    kind: DimensionKind,
) -> Result<DimensionReport> {
    let mut chosen: Vec<usize> = Vec::new();
    for &c in candidates {
        let mut trial = chosen.clone();
        trial.push(c);
        if shatters(family, class, &CoordSequence::new(trial.clone())?, k)? {
            chosen = trial;
        }
    }
    let value = chosen.len();
    let witness = if chosen.is_empty() { None } else { Some(CoordSequence::new(chosen)?) };
    Ok(DimensionReport { kind, k, value, witness, exhaustive: false })
}

/// k-DS dimension (DS dimension for `k = 1`). `cap` bounds the number of
/// shattering checks.
pub fn kds_dimension(class: &HypothesisClass, k: usize, cap: u64) -> Result<DimensionReport> {
    dimension(Family::Ds, class, k, cap)
}

/// k-Natarajan dimension (Natarajan dimension for `k = 1`).
pub fn knat_dimension(class: &HypothesisClass, k: usize, cap: u64) -> Result<DimensionReport> {
    dimension(Family::Natarajan, class, k, cap)
}

/// k-exponential dimension.
pub fn kexp_dimension(class: &HypothesisClass, k: usize, cap: u64) -> Result<DimensionReport> {
    dimension(Family::Exponential, class, k, cap)
}

/// Elementary symmetric sums `e_0..e_d` of `values`.
fn elementary_symmetric(values: &[BigUint], d: usize) -> Vec<BigUint> {
    let mut e = vec![BigUint::zero(); d + 1];
    e[0] = BigUint::one();
    for v in values {
        for i in (1..=d).rev() {
            let add = &e[i - 1] * v;
            e[i] += add;
        }
    }
    e
}

fn binomial(n: u64, r: u64) -> BigUint {
    num_integer::binomial(BigUint::from(n), BigUint::from(r))
}

/// `k^(m-d) · Σ_{i<=d} Σ_{|S|=i} Π_{j∈S} C(N_j, k+1)` with `m = counts.len()`.
pub fn sauer_bound(d: usize, k: u64, label_counts: &[u64]) -> Result<BigUint> {
    let m = label_counts.len();
    if d > m {
        return Err(Error::InvalidArgument(format!("d = {d} exceeds m = {m}")));
    }
    if k < 2 {
        return Err(Error::InvalidArgument("the list Sauer bound needs k >= 2".into()));
    }
    if let Some(&n) = label_counts.iter().find(|&&n| n <= k + 1) {
        return Err(Error::InvalidArgument(format!("label count {n} must exceed k + 1 = {}", k + 1)));
    }
    let terms: Vec<BigUint> = label_counts.iter().map(|&n| binomial(n, k + 1)).collect();
    let sum: BigUint = elementary_symmetric(&terms, d).into_iter().sum();
    Ok(num_traits::pow(BigUint::from(k), m - d) * sum)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SauerReport {
    pub holds: bool,
    pub size: usize,
    pub bound: BigUint,
    pub knat: DimensionReport,
}

/// Checks `|H| <= k^(m-d) Σ_i C(m,i) C(p,k+1)^i` with `d` the exact k-Natarajan
/// dimension.
pub fn sauer_check(class: &HypothesisClass, k: usize) -> Result<SauerReport> {
    let p = class.label_bound() as usize;
    if k < 2 || p <= k + 1 {
        return Err(Error::InvalidArgument(format!(
            "list Sauer check needs k >= 2 and p > k + 1 (k = {k}, p = {p})"
        )));
    }
    let knat = knat_dimension(class, k, u64::MAX)?;
    let counts = vec![p as u64; class.num_coords()];
    let bound = sauer_bound(knat.value, k as u64, &counts)?;
    let holds = BigUint::from(class.len()) <= bound;
    Ok(SauerReport { holds, size: class.len(), bound, knat })
}
