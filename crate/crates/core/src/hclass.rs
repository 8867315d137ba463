//! Finite hypothesis classes stored as sets of label vectors.
//!
//! Coordinates (domain points) are 0-based in the library API and 1-based in
//! every text format. Labels are 1-based integers in `[1..label_bound]`.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// A label value. Labels live in `[1..label_bound]`.
pub type Label = u32;

/// Default row cap for generated grids.
pub const DEFAULT_GRID_CAP: u128 = 10_000_000;

/// A finite hypothesis class over `num_coords` coordinates.
///
/// Rows are distinct and kept in lexicographic order, so row indices double as
/// the deterministic tie-breaking order used everywhere downstream.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct HypothesisClass {
    num_coords: usize,
    label_bound: Label,
    rows: Vec<Vec<Label>>,
}

impl HypothesisClass {
    /// Validates, sorts and deduplicates `rows`.
    pub fn new<I>(num_coords: usize, label_bound: Label, rows: I) -> Result<Self>
    where
        I: IntoIterator<Item = Vec<Label>>,
    {
        if num_coords == 0 {
            return Err(Error::InvalidArgument("num_coords must be positive".into()));
        }
        if label_bound == 0 {
            return Err(Error::InvalidArgument("label_bound must be positive".into()));
        }
        let mut collected = Vec::new();
        for row in rows {
            check_row(&row, num_coords, label_bound)?;
            collected.push(row);
        }
        if collected.is_empty() {
            return Err(Error::EmptyClass);
        }
        collected.sort_unstable();
        collected.dedup();
        Ok(Self { num_coords, label_bound, rows: collected })
    }

    /// Builds a class from rows over an arbitrary ordered alphabet. Symbols are
    /// mapped to `1..=p` in ascending order (one global mapping for all
    /// coordinates); the mapping is returned alongside the class.
    pub fn from_symbols<T: Ord + Clone>(rows: &[Vec<T>]) -> Result<(Self, Vec<T>)> {
        let num_coords = rows.first().map(Vec::len).ok_or(Error::EmptyClass)?;
        let alphabet: BTreeSet<T> = rows.iter().flatten().cloned().collect();
        let alphabet: Vec<T> = alphabet.into_iter().collect();
        let index: BTreeMap<&T, Label> =
            alphabet.iter().enumerate().map(|(i, s)| (s, i as Label + 1)).collect();
        let mapped = rows
            .iter()
            .map(|r| {
                if r.len() != num_coords {
                    return Err(Error::RowLength { expected: num_coords, found: r.len() });
                }
                Ok(r.iter().map(|s| index[s]).collect())
            })
            .collect::<Result<Vec<Vec<Label>>>>()?;
        let class = Self::new(num_coords, alphabet.len() as Label, mapped)?;
        Ok((class, alphabet))
    }

    pub(crate) fn from_sorted_unique(num_coords: usize, label_bound: Label, rows: Vec<Vec<Label>>) -> Self {
        debug_assert!(rows.windows(2).all(|w| w[0] < w[1]));
        debug_assert!(!rows.is_empty());
        Self { num_coords, label_bound, rows }
    }

    pub fn num_coords(&self) -> usize {
        self.num_coords
    }

    pub fn label_bound(&self) -> Label {
        self.label_bound
    }

    pub fn rows(&self) -> &[Vec<Label>] {
        &self.rows
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn row(&self, index: usize) -> &[Label] {
        &self.rows[index]
    }

    /// Index of `row` in canonical order.
    pub fn index_of(&self, row: &[Label]) -> Option<usize> {
        self.rows.binary_search_by(|r| r.as_slice().cmp(row)).ok()
    }

    pub fn contains(&self, row: &[Label]) -> bool {
        self.index_of(row).is_some()
    }

    /// Distinct labels realized at `coord`, ascending.
    pub fn labels_at(&self, coord: usize) -> Vec<Label> {
        let set: BTreeSet<Label> = self.rows.iter().map(|r| r[coord]).collect();
        set.into_iter().collect()
    }

    /// `H|_S`: distinct projections onto the coordinates of `seq`, in `seq`'s order.
    pub fn restrict(&self, seq: &CoordSequence) -> Result<HypothesisClass> {
        self.project(seq.coords())
    }

    /// Projection onto an arbitrary list of coordinates. Repeats are permitted
    /// here (they give duplicated columns).
    pub fn project(&self, coords: &[usize]) -> Result<HypothesisClass> {
        if coords.is_empty() {
            return Err(Error::EmptySequence);
        }
        for &c in coords {
            if c >= self.num_coords {
                return Err(Error::CoordOutOfRange { coord: c, num_coords: self.num_coords });
            }
        }
        let mut rows: Vec<Vec<Label>> =
            self.rows.iter().map(|r| coords.iter().map(|&c| r[c]).collect()).collect();
        rows.sort_unstable();
        rows.dedup();
        Ok(Self::from_sorted_unique(coords.len(), self.label_bound, rows))
    }

    /// `Some` sub-class of rows satisfying `keep`, `None` if nothing survives.
    pub fn filter<F>(&self, mut keep: F) -> Option<HypothesisClass>
    where
        F: FnMut(&[Label]) -> bool,
    {
        let rows: Vec<Vec<Label>> = self.rows.iter().filter(|r| keep(r)).cloned().collect();
        if rows.is_empty() {
            None
        } else {
            Some(Self::from_sorted_unique(self.num_coords, self.label_bound, rows))
        }
    }

    /// Sub-class made of the rows at `indices` (any order, duplicates ignored).
    pub fn subset(&self, indices: &[usize]) -> Option<HypothesisClass> {
        let picked: BTreeSet<usize> = indices.iter().copied().collect();
        let rows: Vec<Vec<Label>> = picked.into_iter().map(|i| self.rows[i].clone()).collect();
        if rows.is_empty() {
            None
        } else {
            Some(Self::from_sorted_unique(self.num_coords, self.label_bound, rows))
        }
    }

    /// Rows that agree with every labeled pair in `sample`.
    pub fn consistent_rows<'a>(&'a self, sample: &'a LabeledSample) -> impl Iterator<Item = usize> + 'a {
        self.rows
            .iter()
            .enumerate()
            .filter(move |(_, r)| sample.pairs().iter().all(|&(x, y)| r[x] == y))
            .map(|(i, _)| i)
    }

    /// True if some row agrees with all of `sample`.
    pub fn realizes(&self, sample: &LabeledSample) -> bool {
        self.consistent_rows(sample).next().is_some()
    }

    /// Canonical HCF serialization.
    pub fn to_hcf(&self) -> String {
        let mut out = String::new();
        writeln!(out, "{} {}", self.num_coords, self.label_bound).unwrap();
        for row in &self.rows {
            let line: Vec<String> = row.iter().map(|v| v.to_string()).collect();
            writeln!(out, "{}", line.join(" ")).unwrap();
        }
        out
    }
}

fn check_row(row: &[Label], num_coords: usize, label_bound: Label) -> Result<()> {
    if row.len() != num_coords {
        return Err(Error::RowLength { expected: num_coords, found: row.len() });
    }
    for &label in row {
        if label == 0 || label > label_bound {
            return Err(Error::LabelOutOfRange { label, label_bound });
        }
    }
    Ok(())
}

/// Ordered list of distinct coordinates.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CoordSequence(Vec<usize>);

impl CoordSequence {
    pub fn new(coords: Vec<usize>) -> Result<Self> {
        if coords.is_empty() {
            return Err(Error::EmptySequence);
        }
        let mut seen = BTreeSet::new();
        for &c in &coords {
            if !seen.insert(c) {
                return Err(Error::RepeatedCoord(c));
            }
        }
        Ok(Self(coords))
    }

    /// `[0, 1, .., n-1]`.
    pub fn prefix(n: usize) -> Result<Self> {
        Self::new((0..n).collect())
    }

    pub fn coords(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// `S ∘ T`: the sequence `(S[T[0]], S[T[1]], ..)`, with `T` indexing into `S`.
    pub fn compose(&self, inner: &CoordSequence) -> Result<CoordSequence> {
        let coords = inner
            .coords()
            .iter()
            .map(|&j| {
                self.0
                    .get(j)
                    .copied()
                    .ok_or(Error::CoordOutOfRange { coord: j, num_coords: self.0.len() })
            })
            .collect::<Result<Vec<_>>>()?;
        CoordSequence::new(coords)
    }

    /// 1-based, space separated.
    pub fn to_one_based_string(&self) -> String {
        self.0.iter().map(|c| (c + 1).to_string()).collect::<Vec<_>>().join(" ")
    }
}

/// Ordered `(point, label)` pairs; repeated points are allowed.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct LabeledSample(Vec<(usize, Label)>);

impl LabeledSample {
    pub fn new(pairs: Vec<(usize, Label)>) -> Self {
        Self(pairs)
    }

    /// Validates points and labels against `class`.
    pub fn checked(pairs: Vec<(usize, Label)>, class: &HypothesisClass) -> Result<Self> {
        for &(x, y) in &pairs {
            if x >= class.num_coords() {
                return Err(Error::CoordOutOfRange { coord: x, num_coords: class.num_coords() });
            }
            if y == 0 || y > class.label_bound() {
                return Err(Error::LabelOutOfRange { label: y, label_bound: class.label_bound() });
            }
        }
        Ok(Self(pairs))
    }

    /// Sample labeled by `row` at the given points.
    pub fn labeled_by(row: &[Label], points: &[usize]) -> Self {
        Self(points.iter().map(|&x| (x, row[x])).collect())
    }

    pub fn pairs(&self) -> &[(usize, Label)] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Distinct points, ascending.
    pub fn points(&self) -> Vec<usize> {
        let set: BTreeSet<usize> = self.0.iter().map(|&(x, _)| x).collect();
        set.into_iter().collect()
    }

    /// The sample without position `index`.
    pub fn without(&self, index: usize) -> Self {
        let mut pairs = self.0.clone();
        pairs.remove(index);
        Self(pairs)
    }

    /// Elements at the given positions, in that order.
    pub fn pick(&self, positions: &[usize]) -> Self {
        Self(positions.iter().map(|&i| self.0[i]).collect())
    }

    /// One `point label` line per pair, 1-based points.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for &(x, y) in &self.0 {
            writeln!(out, "{} {}", x + 1, y).unwrap();
        }
        out
    }
}

impl FromIterator<(usize, Label)> for LabeledSample {
    fn from_iter<I: IntoIterator<Item = (usize, Label)>>(iter: I) -> Self {
        Self(iter.into_iter().collect())
    }
}

fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
}

fn parse_numbers(line: &str, line_no: usize) -> Result<Vec<u64>> {
    line.split_whitespace()
        .map(|tok| {
            tok.parse::<u64>().map_err(|_| Error::Parse {
                line: line_no,
                message: format!("not a non-negative integer: {tok:?}"),
            })
        })
        .collect()
}

/// Parses an HCF document: header `m p`, then one row of `m` labels per line.
/// `#` lines are comments.
pub fn parse_class(text: &str) -> Result<HypothesisClass> {
    let mut lines = content_lines(text);
    let (header_no, header) =
        lines.next().ok_or(Error::Parse { line: 1, message: "missing header `m p`".into() })?;
    let header_vals = parse_numbers(header, header_no)?;
    if header_vals.len() != 2 || header_vals[0] == 0 || header_vals[1] == 0 {
        return Err(Error::Parse {
            line: header_no,
            message: "header must be two positive integers `m p`".into(),
        });
    }
    let m = header_vals[0] as usize;
    let p = Label::try_from(header_vals[1])
        .map_err(|_| Error::Parse { line: header_no, message: "label bound too large".into() })?;
    let mut rows = Vec::new();
    for (line_no, line) in lines {
        let vals = parse_numbers(line, line_no)?;
        if vals.len() != m {
            return Err(Error::Parse {
                line: line_no,
                message: format!("row has {} entries, expected {m}", vals.len()),
            });
        }
        let mut row = Vec::with_capacity(m);
        for v in vals {
            if v == 0 || v > p as u64 {
                return Err(Error::Parse {
                    line: line_no,
                    message: format!("label {v} outside [1..{p}]"),
                });
            }
            row.push(v as Label);
        }
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(Error::Parse { line: header_no, message: "class has no rows".into() });
    }
    HypothesisClass::new(m, p, rows)
}

/// Parses `point label` lines (1-based points) into a sample.
pub fn parse_sample(text: &str) -> Result<LabeledSample> {
    let mut pairs = Vec::new();
    for (line_no, line) in content_lines(text) {
        let vals = parse_numbers(line, line_no)?;
        if vals.len() != 2 || vals[0] == 0 || vals[1] == 0 {
            return Err(Error::Parse {
                line: line_no,
                message: "expected `point label` with both positive".into(),
            });
        }
        pairs.push((vals[0] as usize - 1, vals[1] as Label));
    }
    Ok(LabeledSample(pairs))
}

/// All `labels^d` vectors, with the default row cap.
pub fn generate_grid(d: usize, labels: Label) -> Result<HypothesisClass> {
    generate_grid_capped(d, labels, DEFAULT_GRID_CAP)
}

pub fn generate_grid_capped(d: usize, labels: Label, cap: u128) -> Result<HypothesisClass> {
    if d == 0 || labels == 0 {
        return Err(Error::InvalidArgument("grid needs d >= 1 and labels >= 1".into()));
    }
    let requested = (labels as u128).checked_pow(d as u32).unwrap_or(u128::MAX);
    if requested > cap {
        return Err(Error::SizeCap { requested, cap });
    }
    let choices: Vec<Vec<Label>> = vec![(1..=labels).collect(); d];
    let rows = product(&choices);
    Ok(HypothesisClass::from_sorted_unique(d, labels, rows))
}

/// Lexicographically ordered cartesian product of per-coordinate choices.
pub(crate) fn product(choices: &[Vec<Label>]) -> Vec<Vec<Label>> {
    let mut out: Vec<Vec<Label>> = vec![Vec::new()];
    for options in choices {
        let mut next = Vec::with_capacity(out.len() * options.len());
        for prefix in &out {
            for &v in options {
                let mut row = prefix.clone();
                row.push(v);
                next.push(row);
            }
        }
        out = next;
    }
    out
}

/// Finite truncation of the class with finite 2-DS dimension but large DS
/// dimension: the union over blocks `b` of `{3b-2, 3b-1, 3b}^3 × {2b-1, 2b}^(m-3)`.
pub fn generate_example1(m: usize, num_blocks: usize) -> Result<HypothesisClass> {
    if m < 4 || num_blocks == 0 {
        return Err(Error::InvalidArgument("example class needs m >= 4 and num_blocks >= 1".into()));
    }
    let mut rows = Vec::new();
    for b in 1..=num_blocks as Label {
        let head: Vec<Label> = vec![3 * b - 2, 3 * b - 1, 3 * b];
        let tail: Vec<Label> = vec![2 * b - 1, 2 * b];
        let mut choices = vec![head; 3];
        choices.extend(std::iter::repeat_n(tail, m - 3));
        rows.extend(product(&choices));
    }
    HypothesisClass::new(m, 3 * num_blocks as Label, rows)
}

/// `size` rows drawn uniformly (with possible collisions, then deduplicated)
/// from `[p]^m`, seeded.
pub fn random_class(m: usize, p: Label, size: usize, seed: u64) -> Result<HypothesisClass> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let rows: Vec<Vec<Label>> =
        (0..size.max(1)).map(|_| (0..m).map(|_| rng.random_range(1..=p)).collect()).collect();
    HypothesisClass::new(m, p, rows)
}
