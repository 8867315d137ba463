//! One-inclusion list learners, the two-stage list compression scheme and the
//! agnostic wrapper.
//!
//! Predictions restrict the class to the sorted distinct points of the sample
//! plus the query point. A query point already present in the sample gets the
//! sample's label. Leave-one-out predictions on a sample with distinct points
//! therefore all read off one orientation of one graph.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt::Write as _;
use std::rc::Rc;

use itertools::Itertools;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::dims::{kds_dimension, knat_dimension};
use crate::error::{Error, Result};
use crate::hclass::{CoordSequence, HypothesisClass, Label, LabeledSample};
use crate::oig::OneInclusionGraph;
use crate::orient::{greedy_orientation, DegreeBound, ListOrientation};

/// Added to a seed once per round to derive the round's sub-seed.
pub const SEED_STRIDE: u64 = 0x9E37_79B9_7F4A_7C15;

pub(crate) fn sub_seed(seed: u64, round: u64) -> u64 {
    seed.wrapping_add(SEED_STRIDE.wrapping_mul(round))
}

/// A map from domain points to label lists; unmapped points get the empty list.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ListHypothesis {
    pub list_size_bound: usize,
    table: BTreeMap<usize, Vec<Label>>,
}

impl ListHypothesis {
    pub fn new(list_size_bound: usize) -> Self {
        Self { list_size_bound, table: BTreeMap::new() }
    }

    /// A hypothesis listing every label in `1..=label_bound` at each point.
    pub fn full(num_points: usize, label_bound: Label) -> Self {
        let all: Vec<Label> = (1..=label_bound).collect();
        let mut h = Self::new(label_bound as usize);
        for x in 0..num_points {
            h.table.insert(x, all.clone());
        }
        h
    }

    /// Stores `labels` (sorted and deduplicated) at `x`.
    pub fn set(&mut self, x: usize, labels: impl IntoIterator<Item = Label>) -> Result<()> {
        let list: Vec<Label> = labels.into_iter().collect::<BTreeSet<_>>().into_iter().collect();
        if list.len() > self.list_size_bound {
            return Err(Error::InvalidArgument(format!(
                "list of size {} exceeds bound {}",
                list.len(),
                self.list_size_bound
            )));
        }
        self.table.insert(x, list);
        Ok(())
    }

    pub fn get(&self, x: usize) -> &[Label] {
        self.table.get(&x).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn contains(&self, x: usize, y: Label) -> bool {
        self.get(x).binary_search(&y).is_ok()
    }

    pub fn table(&self) -> &BTreeMap<usize, Vec<Label>> {
        &self.table
    }

    /// Largest stored list.
    pub fn max_list_len(&self) -> usize {
        self.table.values().map(Vec::len).max().unwrap_or(0)
    }

    /// Number of pairs of `sample` whose label is missing from the list.
    pub fn misses(&self, sample: &LabeledSample) -> usize {
        sample.pairs().iter().filter(|&&(x, y)| !self.contains(x, y)).count()
    }

    /// True if every pair of `sample` is covered.
    pub fn covers(&self, sample: &LabeledSample) -> bool {
        self.misses(sample) == 0
    }

    /// CSV `point,labels` with 1-based points and space separated labels.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("point,labels\n");
        for (x, list) in &self.table {
            let labels = list.iter().map(|l| l.to_string()).join(" ");
            writeln!(out, "{},{}", x + 1, labels).unwrap();
        }
        out
    }
}

struct Oriented {
    points: Vec<usize>,
    graph: OneInclusionGraph,
    orientation: ListOrientation,
}

/// The one-inclusion list learner, with orientations cached per point set.
/// With `filter = Some(μ')` the restricted class keeps only rows whose labels
/// lie in `μ'` at every point.
pub struct OneInclusionLearner<'a> {
    class: &'a HypothesisClass,
    k: usize,
    filter: Option<ListHypothesis>,
    cache: HashMap<Vec<usize>, Rc<Oriented>>,
}

impl<'a> OneInclusionLearner<'a> {
    pub fn new(class: &'a HypothesisClass, k: usize) -> Result<Self> {
        if k == 0 {
            return Err(Error::InvalidArgument("k must be positive".into()));
        }
        Ok(Self { class, k, filter: None, cache: HashMap::new() })
    }

    pub fn with_list(class: &'a HypothesisClass, k: usize, filter: ListHypothesis) -> Result<Self> {
        let mut learner = Self::new(class, k)?;
        learner.filter = Some(filter);
        Ok(learner)
    }

    pub fn k(&self) -> usize {
        self.k
    }

    fn oriented(&mut self, points: Vec<usize>) -> Result<Rc<Oriented>> {
        if let Some(o) = self.cache.get(&points) {
            return Ok(Rc::clone(o));
        }
        let mut restricted = self.class.restrict(&CoordSequence::new(points.clone())?)?;
        if let Some(mu) = &self.filter {
            restricted = restricted
                .filter(|row| row.iter().zip(&points).all(|(&y, &x)| mu.contains(x, y)))
                .ok_or_else(|| {
                    Error::NotRealizable("no hypothesis is consistent with the given list".into())
                })?;
        }
        let graph = OneInclusionGraph::build(&restricted);
        let orientation = greedy_orientation(&graph, self.k, DegreeBound::None)?.orientation;
        let o = Rc::new(Oriented { points: points.clone(), graph, orientation });
        self.cache.insert(points, Rc::clone(&o));
        Ok(o)
    }

    /// The `k`-list predicted at `x` after seeing `sample`.
    pub fn predict(&mut self, sample: &LabeledSample, x: usize) -> Result<Vec<Label>> {
        if x >= self.class.num_coords() {
            return Err(Error::CoordOutOfRange { coord: x, num_coords: self.class.num_coords() });
        }
        let mut seen: BTreeMap<usize, Label> = BTreeMap::new();
        for &(p, y) in sample.pairs() {
            if p >= self.class.num_coords() {
                return Err(Error::CoordOutOfRange { coord: p, num_coords: self.class.num_coords() });
            }
            if let Some(mu) = &self.filter {
                if !mu.contains(p, y) {
                    return Err(Error::NotRealizable(format!(
                        "label {y} at point {} lies outside the given list",
                        p + 1
                    )));
                }
            }
            if *seen.entry(p).or_insert(y) != y {
                return Err(Error::NotRealizable(format!("point {} carries two labels", p + 1)));
            }
        }
        let mut points: Vec<usize> = seen.keys().copied().collect();
        let key: Vec<Label> = seen.values().copied().collect();
        if let Some(&y) = seen.get(&x) {
            if !self.oriented(points)?.graph.class().contains(&key) {
                return Err(Error::NotRealizable("no hypothesis agrees with the sample".into()));
            }
            return Ok(vec![y]);
        }
        let direction = points.partition_point(|&p| p < x);
        points.insert(direction, x);
        let o = self.oriented(points)?;
        let edge = o
            .graph
            .find_edge(direction, &key)
            .ok_or_else(|| Error::NotRealizable("no hypothesis agrees with the sample".into()))?;
        debug_assert_eq!(o.points[direction], x);
        let class = o.graph.class();
        let labels: BTreeSet<Label> =
            o.orientation.list(edge).iter().map(|&v| class.row(v)[direction]).collect();
        Ok(labels.into_iter().collect())
    }

    /// Predictions at every domain point.
    pub fn hypothesis(&mut self, sample: &LabeledSample) -> Result<ListHypothesis> {
        let mut mu = ListHypothesis::new(self.k);
        for x in 0..self.class.num_coords() {
            let list = self.predict(sample, x)?;
            mu.set(x, list)?;
        }
        Ok(mu)
    }
}

/// One-inclusion k-list at a single point.
pub fn one_inclusion_predict(class: &HypothesisClass, sample: &LabeledSample, x: usize, k: usize) -> Result<Vec<Label>> {
    OneInclusionLearner::new(class, k)?.predict(sample, x)
}

/// One-inclusion k-list at a single point, restricted to rows inside `list`.
pub fn one_inclusion_predict_with_list(
    class: &HypothesisClass,
    list: &ListHypothesis,
    sample: &LabeledSample,
    x: usize,
    k: usize,
) -> Result<Vec<Label>> {
    OneInclusionLearner::with_list(class, k, list.clone())?.predict(sample, x)
}

fn binomial_usize(n: usize, r: usize) -> usize {
    if r > n {
        return 0;
    }
    (0..r).fold(1usize, |acc, i| acc * (n - i) / (i + 1))
}

/// Weak list learner: the union of one-inclusion lists over all size-`|S| - t`
/// subsamples, at every domain point. Requires `|S| = dim + t` where `dim` is
/// the k-DS dimension used by the caller.
pub fn weak_list_learn_with(
    learner: &mut OneInclusionLearner<'_>,
    sample: &LabeledSample,
    t: usize,
    dim: usize,
) -> Result<ListHypothesis> {
    if sample.len() != dim + t {
        return Err(Error::InvalidArgument(format!(
            "weak learner needs {} examples, got {}",
            dim + t,
            sample.len()
        )));
    }
    let num_points = learner.class.num_coords();
    let bound = learner.k() * binomial_usize(sample.len(), t);
    let mut union: Vec<BTreeSet<Label>> = vec![BTreeSet::new(); num_points];
    for positions in (0..sample.len()).combinations(dim) {
        let sub = sample.pick(&positions);
        for (x, set) in union.iter_mut().enumerate() {
            set.extend(learner.predict(&sub, x)?);
        }
    }
    let mut mu = ListHypothesis::new(bound);
    for (x, set) in union.into_iter().enumerate() {
        mu.set(x, set)?;
    }
    Ok(mu)
}

pub fn weak_list_learn(class: &HypothesisClass, sample: &LabeledSample, t: usize, k: usize, dim: usize) -> Result<ListHypothesis> {
    let mut learner = OneInclusionLearner::new(class, k)?;
    weak_list_learn_with(&mut learner, sample, t, dim)
}

/// The `k` labels occurring in the most lists (each list counted as a set),
/// ties to the smaller label; returned ascending.
pub fn topk_merge(lists: &[Vec<Label>], k: usize) -> Vec<Label> {
    let mut counts: BTreeMap<Label, usize> = BTreeMap::new();
    for list in lists {
        for y in list.iter().copied().collect::<BTreeSet<_>>() {
            *counts.entry(y).or_default() += 1;
        }
    }
    let mut ranked: Vec<(Label, usize)> = counts.into_iter().collect();
    ranked.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(&b.0)));
    let mut top: Vec<Label> = ranked.into_iter().take(k).map(|(y, _)| y).collect();
    top.sort_unstable();
    top
}

/// Dimensions used by the compression scheme.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SchemeDims {
    pub kds: usize,
    pub knat: usize,
    /// Both values come from exhaustive searches.
    pub exhaustive: bool,
}

impl SchemeDims {
    pub fn compute(class: &HypothesisClass, k: usize, cap: u64) -> Result<Self> {
        let kds = kds_dimension(class, k, cap)?;
        let knat = knat_dimension(class, k, cap)?;
        Ok(Self { kds: kds.value, knat: knat.value, exhaustive: kds.exhaustive && knat.exhaustive })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CompressConfig {
    pub k: usize,
    pub t: usize,
    pub seed: u64,
    /// Stage-2 sequence length; `None` for `ceil(960 k^5 d_N ln k')`.
    pub n: Option<usize>,
    /// Stage-2 sequence count; `None` for `ceil(12 k ln(2m))`.
    pub l: Option<usize>,
}

impl CompressConfig {
    pub fn new(k: usize, t: usize, seed: u64) -> Self {
        Self { k, t, seed, n: None, l: None }
    }
}

/// Everything the reconstruction needs besides the selected examples.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReconstructionParams {
    pub k: usize,
    pub t: usize,
    pub kds: usize,
    pub knat: usize,
    /// Number of stage-1 blocks, each of `kds + t` examples.
    pub l1: usize,
    /// Number of stage-2 blocks, each of `n` examples.
    pub l2: usize,
    pub n: usize,
    /// Largest list of the stage-1 hypothesis.
    pub kprime: usize,
}

impl ReconstructionParams {
    pub fn block1(&self) -> usize {
        self.kds + self.t
    }

    pub fn stage1_len(&self) -> usize {
        self.l1 * self.block1()
    }

    pub fn stage2_len(&self) -> usize {
        self.l2 * self.n
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CompressionResult {
    /// Stage-1 blocks followed by stage-2 blocks.
    pub selected: LabeledSample,
    pub params: ReconstructionParams,
    pub hypothesis: ListHypothesis,
    pub certified: bool,
    pub dims_exhaustive: bool,
}

impl CompressionResult {
    pub fn size(&self) -> usize {
        self.selected.len()
    }

    pub fn stage1(&self) -> LabeledSample {
        self.selected.pick(&(0..self.params.stage1_len()).collect::<Vec<_>>())
    }

    pub fn stage2(&self) -> LabeledSample {
        let start = self.params.stage1_len();
        self.selected.pick(&(start..self.selected.len()).collect::<Vec<_>>())
    }

    /// Text form: a `#` header line, `key value` parameter lines, then
    /// `selected N` and `N` lines of `point label` (1-based points).
    pub fn to_text(&self) -> String {
        let p = &self.params;
        let mut out = String::from("# listpac compression v1\n");
        for (key, value) in [
            ("k", p.k),
            ("t", p.t),
            ("kds", p.kds),
            ("knat", p.knat),
            ("l1", p.l1),
            ("l2", p.l2),
            ("n", p.n),
            ("kprime", p.kprime),
        ] {
            writeln!(out, "{key} {value}").unwrap();
        }
        writeln!(out, "selected {}", self.selected.len()).unwrap();
        out.push_str(&self.selected.to_text());
        out
    }
}

/// Parses [`CompressionResult::to_text`] output into the selected examples and
/// the reconstruction parameters.
pub fn parse_compression(text: &str) -> Result<(LabeledSample, ReconstructionParams)> {
    let mut values: HashMap<&str, usize> = HashMap::new();
    let mut pairs = Vec::new();
    let mut expected: Option<usize> = None;
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let parts: Vec<&str> = line.split_whitespace().collect();
        let bad = |message: &str| Error::Parse { line: line_no, message: message.into() };
        if parts.len() != 2 {
            return Err(bad("expected two fields"));
        }
        if expected.is_none() {
            let value: usize = parts[1].parse().map_err(|_| bad("value is not an integer"))?;
            if parts[0] == "selected" {
                expected = Some(value);
            } else {
                values.insert(parts[0], value);
            }
        } else {
            let x: usize = parts[0].parse().map_err(|_| bad("point is not an integer"))?;
            let y: Label = parts[1].parse().map_err(|_| bad("label is not an integer"))?;
            if x == 0 {
                return Err(bad("points are 1-based"));
            }
            pairs.push((x - 1, y));
        }
    }
    let get = |key: &str| {
        values.get(key).copied().ok_or(Error::Parse { line: 0, message: format!("missing parameter {key}") })
    };
    let params = ReconstructionParams {
        k: get("k")?,
        t: get("t")?,
        kds: get("kds")?,
        knat: get("knat")?,
        l1: get("l1")?,
        l2: get("l2")?,
        n: get("n")?,
        kprime: get("kprime")?,
    };
    let expected = expected.ok_or(Error::Parse { line: 0, message: "missing `selected` line".into() })?;
    if pairs.len() != expected || params.stage1_len() + params.stage2_len() != expected {
        return Err(Error::Parse { line: 0, message: "selected count disagrees with parameters".into() });
    }
    Ok((LabeledSample::new(pairs), params))
}

/// `ρ_1`: union of weak-learner lists over consecutive blocks.
pub fn reconstruct_stage1(class: &HypothesisClass, blocks: &LabeledSample, k: usize, t: usize, kds: usize) -> Result<ListHypothesis> {
    let block = kds + t;
    if (block == 0 && !blocks.is_empty()) || (block > 0 && !blocks.len().is_multiple_of(block)) {
        return Err(Error::InvalidArgument("stage-1 examples do not split into blocks".into()));
    }
    let mut learner = OneInclusionLearner::new(class, k)?;
    let mut union: Vec<BTreeSet<Label>> = vec![BTreeSet::new(); class.num_coords()];
    // Zero-size blocks: every round runs the weak learner on the empty sample.
    let starts: Vec<usize> = if block == 0 { vec![0] } else { (0..blocks.len()).step_by(block).collect() };
    for start in starts {
        let part = blocks.pick(&(start..start + block).collect::<Vec<_>>());
        let mu = weak_list_learn_with(&mut learner, &part, t, kds)?;
        for (x, set) in union.iter_mut().enumerate() {
            set.extend(mu.get(x).iter().copied());
        }
    }
    let bound = union.iter().map(BTreeSet::len).max().unwrap_or(0);
    let mut mu = ListHypothesis::new(bound);
    for (x, set) in union.into_iter().enumerate() {
        mu.set(x, set)?;
    }
    Ok(mu)
}

/// `ρ_2`: top-k merge of list-filtered one-inclusion predictions over consecutive blocks of `n`.
///
/// `list` need not contain the target's label at points outside the
/// compressed sample; where the filtered class is empty the plain
/// one-inclusion list is used instead.
pub fn reconstruct_stage2(
    class: &HypothesisClass,
    list: &ListHypothesis,
    blocks: &LabeledSample,
    k: usize,
    n: usize,
    l2: usize,
) -> Result<ListHypothesis> {
    if blocks.len() != n * l2 {
        return Err(Error::InvalidArgument("stage-2 examples do not split into blocks".into()));
    }
    let mut learner = OneInclusionLearner::with_list(class, k, list.clone())?;
    let mut plain = OneInclusionLearner::new(class, k)?;
    let mut per_point: Vec<Vec<Vec<Label>>> = vec![Vec::new(); class.num_coords()];
    for j in 0..l2 {
        let part = blocks.pick(&(j * n..(j + 1) * n).collect::<Vec<_>>());
        for (x, lists) in per_point.iter_mut().enumerate() {
            let predicted = match learner.predict(&part, x) {
                Err(Error::NotRealizable(_)) if class.realizes(&part) => plain.predict(&part, x)?,
                other => other?,
            };
            lists.push(predicted);
        }
    }
    let mut mu = ListHypothesis::new(k);
    for (x, lists) in per_point.iter().enumerate() {
        mu.set(x, topk_merge(lists, k))?;
    }
    Ok(mu)
}

/// `ρ = ρ_2 ∘ ρ_1`, re-run from the selected examples alone.
pub fn reconstruct(class: &HypothesisClass, selected: &LabeledSample, params: &ReconstructionParams) -> Result<ListHypothesis> {
    let split = params.stage1_len();
    if selected.len() != split + params.stage2_len() {
        return Err(Error::InvalidArgument("selected examples disagree with parameters".into()));
    }
    let first = selected.pick(&(0..split).collect::<Vec<_>>());
    let second = selected.pick(&(split..selected.len()).collect::<Vec<_>>());
    let mu1 = reconstruct_stage1(class, &first, params.k, params.t, params.kds)?;
    reconstruct_stage2(class, &mu1, &second, params.k, params.n, params.l2)
}

/// Stage-1 round budget `ceil(ln(2m) / -ln(1 - α))`, `α = (t+1)/(d+t+1)`.
pub fn stage1_round_budget(m: usize, kds: usize, t: usize) -> usize {
    if kds == 0 {
        return 1;
    }
    let alpha = (t + 1) as f64 / (kds + t + 1) as f64;
    ((2.0 * m as f64).ln() / -(1.0 - alpha).ln()).ceil().max(1.0) as usize
}

/// Budget on exhaustive stage-1 candidates before giving up.
const STAGE1_EXHAUSTIVE_CAP: usize = 200_000;
const STAGE1_RETRIES: usize = 200;

/// Stage 1: repeatedly pick `kds + t` residual examples whose weak-learner
/// list covers at least an `α` fraction of the residual, until nothing is
/// left. Returns the concatenated blocks, the union list and the round count.
pub fn compress_stage1(
    class: &HypothesisClass,
    sample: &LabeledSample,
    k: usize,
    t: usize,
    kds: usize,
    seed: u64,
) -> Result<(LabeledSample, ListHypothesis, usize)> {
    if sample.is_empty() {
        return Err(Error::InvalidArgument("cannot compress an empty sample".into()));
    }
    if !class.realizes(sample) {
        return Err(Error::NotRealizable("no hypothesis agrees with the sample".into()));
    }
    let block = kds + t;
    let budget = stage1_round_budget(sample.len(), kds, t);
    let mut learner = OneInclusionLearner::new(class, k)?;
    let mut residual: Vec<usize> = (0..sample.len()).collect();
    let mut selected: Vec<(usize, Label)> = Vec::new();
    let mut union: Vec<BTreeSet<Label>> = vec![BTreeSet::new(); class.num_coords()];
    let mut rounds = 0;
    while !residual.is_empty() {
        if rounds == budget {
            return Err(Error::Compression(format!("stage 1 used its budget of {budget} rounds")));
        }
        let need = ((t + 1) * residual.len()).div_ceil(kds + t + 1);
        let coverage = |mu: &ListHypothesis| {
            residual.iter().filter(|&&i| {
                let (x, y) = sample.pairs()[i];
                mu.contains(x, y)
            }).count()
        };
        let mut rng = ChaCha8Rng::seed_from_u64(sub_seed(seed, rounds as u64));
        let mut found: Option<(LabeledSample, ListHypothesis)> = None;
        for _ in 0..STAGE1_RETRIES {
            let picks: Vec<usize> = (0..block).map(|_| residual[rng.random_range(0..residual.len())]).collect();
            let part = sample.pick(&picks);
            let mu = weak_list_learn_with(&mut learner, &part, t, kds)?;
            if coverage(&mu) >= need {
                found = Some((part, mu));
                break;
            }
        }
        if found.is_none() {
            let distinct: Vec<usize> = residual
                .iter()
                .copied()
                .unique_by(|&i| sample.pairs()[i])
                .collect();
            for (tried, picks) in distinct.iter().copied().combinations_with_replacement(block).enumerate() {
                if tried >= STAGE1_EXHAUSTIVE_CAP {
                    break;
                }
                let part = sample.pick(&picks);
                let mu = weak_list_learn_with(&mut learner, &part, t, kds)?;
                if coverage(&mu) >= need {
                    found = Some((part, mu));
                    break;
                }
            }
        }
        let (part, mu) = found.ok_or_else(|| {
            Error::Compression(format!("stage 1 found no block covering {need} of {} examples", residual.len()))
        })?;
        residual.retain(|&i| {
            let (x, y) = sample.pairs()[i];
            !mu.contains(x, y)
        });
        for (x, set) in union.iter_mut().enumerate() {
            set.extend(mu.get(x).iter().copied());
        }
        selected.extend_from_slice(part.pairs());
        rounds += 1;
    }
    let bound = union.iter().map(BTreeSet::len).max().unwrap_or(0);
    let mut mu = ListHypothesis::new(bound);
    for (x, set) in union.into_iter().enumerate() {
        mu.set(x, set)?;
    }
    Ok((LabeledSample::new(selected), mu, rounds))
}

/// Default stage-2 sequence length `ceil(960 k^5 d_N ln k')`.
pub fn default_stage2_n(k: usize, knat: usize, kprime: usize) -> usize {
    let v = 960.0 * (k as f64).powi(5) * knat as f64 * (kprime.max(1) as f64).ln();
    v.ceil() as usize
}

/// Default stage-2 sequence count `ceil(12 k ln(2m))`.
pub fn default_stage2_l(k: usize, m: usize) -> usize {
    ((12 * k) as f64 * (2.0 * m as f64).ln()).ceil().max(1.0) as usize
}

/// Multiplicative-weights round cap `max(1, ceil(64 k ln(2m) ln m))`.
pub fn stage2_round_cap(k: usize, m: usize) -> usize {
    let v = 64.0 * k as f64 * (2.0 * m as f64).ln() * (m as f64).ln();
    (v.ceil() as usize).max(1)
}

const STAGE2_BATCH: usize = 8;
const STAGE2_SEED_RETRIES: u64 = 3;
const STAGE2_SELECTION_TRIES: usize = 4;
const MW_ETA: f64 = 0.5;

/// Stage 2 output: the `l` blocks concatenated and their top-k hypothesis.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Stage2Outcome {
    pub selected: LabeledSample,
    pub hypothesis: ListHypothesis,
    pub n: usize,
    pub l: usize,
    pub mw_rounds: usize,
}

/// Stage 2: find `l` sequences of `n` examples whose top-k merged
/// list-filtered predictions cover `sample`. Multiplicative weights over the
/// examples drive the choice of candidate sequences; acceptance rests only on
/// the explicit coverage check.
pub fn compress_stage2(
    class: &HypothesisClass,
    list: &ListHypothesis,
    sample: &LabeledSample,
    k: usize,
    n: usize,
    l: usize,
    seed: u64,
) -> Result<Stage2Outcome> {
    if sample.is_empty() || l == 0 {
        return Err(Error::InvalidArgument("stage 2 needs a non-empty sample and l >= 1".into()));
    }
    let examples: Vec<(usize, Label)> = sample.pairs().iter().copied().unique().collect();
    let mut multiplicity: HashMap<(usize, Label), f64> = HashMap::new();
    for &pair in sample.pairs() {
        *multiplicity.entry(pair).or_default() += 1.0;
    }
    let cap = stage2_round_cap(k, sample.len());
    let mut learner = OneInclusionLearner::with_list(class, k, list.clone())?;
    let mut best_rate = f64::INFINITY;
    for retry in 0..STAGE2_SEED_RETRIES {
        let mut rng = ChaCha8Rng::seed_from_u64(sub_seed(seed, retry));
        let mut weights: Vec<f64> = examples.iter().map(|p| multiplicity[p]).collect();
        let mut pool: Vec<(LabeledSample, Vec<Vec<Label>>)> = Vec::new();
        for round in 0..cap {
            let total: f64 = weights.iter().sum();
            let mut best: Option<(f64, LabeledSample, Vec<Vec<Label>>)> = None;
            for _ in 0..STAGE2_BATCH {
                let seq: LabeledSample = (0..n).map(|_| examples[draw(&weights, total, &mut rng)]).collect();
                let lists: Vec<Vec<Label>> =
                    examples.iter().map(|&(x, _)| learner.predict(&seq, x)).collect::<Result<_>>()?;
                let loss: f64 = examples
                    .iter()
                    .zip(&lists)
                    .zip(&weights)
                    .filter(|((&(_, y), list), _)| list.binary_search(&y).is_err())
                    .map(|(_, w)| w / total)
                    .sum();
                if best.as_ref().is_none_or(|b| loss < b.0) {
                    best = Some((loss, seq, lists));
                }
            }
            let (_, seq, lists) = best.expect("non-empty batch");
            for ((w, &(_, y)), list) in weights.iter_mut().zip(&examples).zip(&lists) {
                if list.binary_search(&y).is_err() {
                    *w *= MW_ETA.exp();
                }
            }
            let max_w = weights.iter().cloned().fold(0.0, f64::max);
            weights.iter_mut().for_each(|w| *w /= max_w);
            pool.push((seq, lists));
            for attempt in 0..STAGE2_SELECTION_TRIES {
                let chosen: Vec<usize> = if attempt == 0 {
                    (0..l).map(|j| j % pool.len()).collect()
                } else {
                    (0..l).map(|_| rng.random_range(0..pool.len())).collect()
                };
                let mut missed = 0usize;
                for (e, &(_, y)) in examples.iter().enumerate() {
                    let lists: Vec<Vec<Label>> = chosen.iter().map(|&c| pool[c].1[e].clone()).collect();
                    if !topk_merge(&lists, k).contains(&y) {
                        missed += 1;
                    }
                }
                best_rate = best_rate.min(missed as f64 / examples.len() as f64);
                if missed == 0 {
                    let selected: LabeledSample =
                        chosen.iter().flat_map(|&c| pool[c].0.pairs().to_vec()).collect();
                    let hypothesis = reconstruct_stage2(class, list, &selected, k, n, l)?;
                    if hypothesis.covers(sample) {
                        return Ok(Stage2Outcome { selected, hypothesis, n, l, mw_rounds: round + 1 });
                    }
                }
            }
        }
    }
    Err(Error::Compression(format!(
        "stage 2 exhausted its round budget; best miss rate {best_rate:.4}"
    )))
}

fn draw(weights: &[f64], total: f64, rng: &mut ChaCha8Rng) -> usize {
    let mut u = rng.random::<f64>() * total;
    for (i, w) in weights.iter().enumerate() {
        if u < *w {
            return i;
        }
        u -= w;
    }
    weights.len() - 1
}

/// Both stages. `dims` defaults to an exhaustive computation.
pub fn compress(
    class: &HypothesisClass,
    sample: &LabeledSample,
    config: &CompressConfig,
    dims: Option<SchemeDims>,
) -> Result<CompressionResult> {
    let dims = match dims {
        Some(d) => d,
        None => SchemeDims::compute(class, config.k, u64::MAX)?,
    };
    let (k, t) = (config.k, config.t);
    let (first, mu1, l1) = compress_stage1(class, sample, k, t, dims.kds, config.seed)?;
    let kprime = mu1.max_list_len();
    let n = config.n.unwrap_or_else(|| default_stage2_n(k, dims.knat, kprime));
    let l = config.l.unwrap_or_else(|| default_stage2_l(k, sample.len()));
    let stage2 = compress_stage2(class, &mu1, sample, k, n, l, sub_seed(config.seed, 1 << 32))?;
    let mut pairs = first.pairs().to_vec();
    pairs.extend_from_slice(stage2.selected.pairs());
    let selected = LabeledSample::new(pairs);
    let params = ReconstructionParams { k, t, kds: dims.kds, knat: dims.knat, l1, l2: l, n, kprime };
    let hypothesis = stage2.hypothesis;
    let certified = hypothesis.covers(sample)
        && selected.pairs().iter().all(|p| sample.pairs().contains(p));
    Ok(CompressionResult { selected, params, hypothesis, certified, dims_exhaustive: dims.exhaustive })
}

/// Stage-1 size bound `((d+t+1)/(t+1)) (d+t) ln(2m)`.
pub fn stage1_size_bound(kds: usize, t: usize, m: usize) -> f64 {
    (kds + t + 1) as f64 / (t + 1) as f64 * (kds + t) as f64 * (2.0 * m as f64).ln()
}

/// Stage-2 size bound `11520 k^6 d_N ln(k') ln(2m)`.
pub fn stage2_size_bound(k: usize, knat: usize, kprime: usize, m: usize) -> f64 {
    11520.0 * (k as f64).powi(6) * knat as f64 * (kprime.max(1) as f64).ln() * (2.0 * m as f64).ln()
}

/// Total size bound
/// `(((d+t+1)/(t+1))(d+t) + 11520 k^6 d_N ln(k C(d+t+1, t+1) ln(2m))) ln(2m)`.
pub fn compression_size_bound(kds: usize, knat: usize, k: usize, t: usize, m: usize) -> f64 {
    let log2m = (2.0 * m as f64).ln();
    let inner = k as f64 * binomial_usize(kds + t + 1, t + 1) as f64 * log2m;
    let stage2 = if knat == 0 { 0.0 } else { 11520.0 * (k as f64).powi(6) * knat as f64 * inner.ln() };
    ((kds + t + 1) as f64 / (t + 1) as f64 * (kds + t) as f64 + stage2) * log2m
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AgnosticResult {
    pub hypothesis: ListHypothesis,
    /// Index of the empirical risk minimizer.
    pub erm_row: usize,
    pub erm_errors: usize,
    pub compression: Option<CompressionResult>,
}

/// Empirical risk minimizer (ties: smallest row index) and its error count.
pub fn erm(class: &HypothesisClass, sample: &LabeledSample) -> (usize, usize) {
    class
        .rows()
        .iter()
        .enumerate()
        .map(|(i, row)| (i, sample.pairs().iter().filter(|&&(x, y)| row[x] != y).count()))
        .min_by_key(|&(i, e)| (e, i))
        .expect("classes are non-empty")
}

/// Compresses the part of `sample` on which the empirical risk minimizer is
/// correct; the result misses at most as many examples as that minimizer.
pub fn agnostic_learn(
    class: &HypothesisClass,
    sample: &LabeledSample,
    config: &CompressConfig,
    dims: Option<SchemeDims>,
) -> Result<AgnosticResult> {
    let (erm_row, erm_errors) = erm(class, sample);
    let row = class.row(erm_row);
    let agreeing: LabeledSample = sample.pairs().iter().copied().filter(|&(x, y)| row[x] == y).collect();
    if agreeing.is_empty() {
        return Ok(AgnosticResult {
            hypothesis: ListHypothesis::new(config.k),
            erm_row,
            erm_errors,
            compression: None,
        });
    }
    let result = compress(class, &agreeing, config, dims)?;
    Ok(AgnosticResult { hypothesis: result.hypothesis.clone(), erm_row, erm_errors, compression: Some(result) })
}
