//! One-inclusion hypergraphs and their degree statistics.

use std::collections::HashMap;

use itertools::Itertools;

use crate::dims::peel_core;
use crate::error::{Error, Result};
use crate::hclass::{CoordSequence, HypothesisClass, Label};
use crate::scalar::{ratio, Scalar};

/// A hyperedge: all rows agreeing off `direction`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Edge {
    pub direction: usize,
    /// Vertex ids, ascending.
    pub members: Vec<usize>,
}

impl Edge {
    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }
}

/// Vertices are the rows of the class (vertex id = row index); edges are
/// ordered by direction, then by their off-direction key.
#[derive(Clone, Debug)]
pub struct OneInclusionGraph {
    class: HypothesisClass,
    edges: Vec<Edge>,
    // vertex_edges[v * m + i]: the direction-i edge containing v
    vertex_edges: Vec<usize>,
    lookup: Vec<HashMap<Vec<Label>, usize>>,
}

fn off_key(row: &[Label], i: usize) -> Vec<Label> {
    row.iter().enumerate().filter(|&(j, _)| j != i).map(|(_, &x)| x).collect()
}

impl OneInclusionGraph {
    pub fn build(class: &HypothesisClass) -> Self {
        let m = class.num_coords();
        let n = class.len();
        let mut edges = Vec::new();
        let mut vertex_edges = vec![0usize; n * m];
        let mut lookup = Vec::with_capacity(m);
        for i in 0..m {
            let mut keyed: Vec<(Vec<Label>, usize)> =
                class.rows().iter().enumerate().map(|(v, r)| (off_key(r, i), v)).collect();
            keyed.sort();
            let mut table = HashMap::new();
            for (key, group) in &keyed.into_iter().chunk_by(|(key, _)| key.clone()) {
                let members: Vec<usize> = group.map(|(_, v)| v).collect();
                let id = edges.len();
                for &v in &members {
                    vertex_edges[v * m + i] = id;
                }
                table.insert(key, id);
                edges.push(Edge { direction: i, members });
            }
            lookup.push(table);
        }
        Self { class: class.clone(), edges, vertex_edges, lookup }
    }

    pub fn class(&self) -> &HypothesisClass {
        &self.class
    }

    pub fn num_vertices(&self) -> usize {
        self.class.len()
    }

    pub fn num_coords(&self) -> usize {
        self.class.num_coords()
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge(&self, id: usize) -> &Edge {
        &self.edges[id]
    }

    /// The direction-`i` edge containing vertex `v`.
    pub fn edge_of(&self, v: usize, i: usize) -> usize {
        self.vertex_edges[v * self.num_coords() + i]
    }

    /// Edges incident to `v`, one per direction.
    pub fn incident(&self, v: usize) -> &[usize] {
        let m = self.num_coords();
        &self.vertex_edges[v * m..(v + 1) * m]
    }

    /// The direction-`i` edge whose members agree with `key` off `i`.
    pub fn find_edge(&self, i: usize, key: &[Label]) -> Option<usize> {
        self.lookup.get(i)?.get(key).copied()
    }

    /// Off-direction key of an edge.
    pub fn edge_key(&self, id: usize) -> Vec<Label> {
        let e = &self.edges[id];
        off_key(self.class.row(e.members[0]), e.direction)
    }
}

/// Per-vertex k-degrees and the two average degrees.
#[derive(Clone, Debug, PartialEq)]
pub struct DegreeStats<T> {
    pub k: usize,
    pub degrees: Vec<usize>,
    /// `Σ_{|e|>k} |e| / |V|`
    pub avd: T,
    /// `Σ_e (|e|-k)_+ / |V|`
    pub savd: T,
}

/// Integer numerators of the average degrees: `(Σ_{|e|>k}|e|, Σ_e (|e|-k)_+)`.
pub fn degree_sums(graph: &OneInclusionGraph, k: usize) -> (u64, u64) {
    let mut large = 0u64;
    let mut excess = 0u64;
    for e in graph.edges() {
        if e.len() > k {
            large += e.len() as u64;
            excess += (e.len() - k) as u64;
        }
    }
    (large, excess)
}

pub fn degree_stats<T: Scalar>(graph: &OneInclusionGraph, k: usize) -> DegreeStats<T> {
    let n = graph.num_vertices();
    let degrees = (0..n)
        .map(|v| graph.incident(v).iter().filter(|&&e| graph.edge(e).len() > k).count())
        .collect();
    let (large, excess) = degree_sums(graph, k);
    DegreeStats { k, degrees, avd: ratio(large, n as u64), savd: ratio(excess, n as u64) }
}

/// Default subset-enumeration budget for [`maximal_avd`].
pub const DEFAULT_AVD_CAP: u64 = 1 << 16;

#[derive(Clone, Debug, PartialEq)]
pub struct MaxAvdReport<T> {
    pub value: T,
    /// `value = numer / denom`, where `denom` is the witness size.
    pub numer: u64,
    pub denom: u64,
    /// Row indices of the maximizing subfamily.
    pub witness: Vec<usize>,
    pub exhaustive: bool,
}

// Incremental avd numerator over a subfamily given by per-edge member counts.
struct SubfamilyCounter<'a> {
    graph: &'a OneInclusionGraph,
    k: usize,
    count: Vec<u64>,
    inside: Vec<bool>,
    size: u64,
    numer: u64,
}

impl<'a> SubfamilyCounter<'a> {
    fn new(graph: &'a OneInclusionGraph, k: usize) -> Self {
        Self {
            graph,
            k,
            count: vec![0; graph.edges().len()],
            inside: vec![false; graph.num_vertices()],
            size: 0,
            numer: 0,
        }
    }

    fn term(&self, c: u64) -> u64 {
        if c > self.k as u64 {
            c
        } else {
            0
        }
    }

    fn numer_after_toggle(&self, v: usize) -> u64 {
        let mut numer = self.numer;
        for &e in self.graph.incident(v) {
            let c = self.count[e];
            let next = if self.inside[v] { c - 1 } else { c + 1 };
            numer = numer - self.term(c) + self.term(next);
        }
        numer
    }

    fn toggle(&mut self, v: usize) {
        self.numer = self.numer_after_toggle(v);
        let add = !self.inside[v];
        for &e in self.graph.incident(v) {
            if add {
                self.count[e] += 1;
            } else {
                self.count[e] -= 1;
            }
        }
        self.inside[v] = add;
        if add {
            self.size += 1;
        } else {
            self.size -= 1;
        }
    }

    fn members(&self) -> Vec<usize> {
        (0..self.inside.len()).filter(|&v| self.inside[v]).collect()
    }
}

// a/b > c/d for positive denominators
fn greater(a: u64, b: u64, c: u64, d: u64) -> bool {
    (a as u128) * (d as u128) > (c as u128) * (b as u128)
}

/// `max_F avd^k(F)` over non-empty subfamilies of `H`.
///
/// Exact when `2^|H| <= cap`; otherwise a lower bound from the k-DS peeling
/// core and first-improvement local search, flagged non-exhaustive unless it
/// attains the trivial upper bound `m`.
pub fn maximal_avd<T: Scalar>(class: &HypothesisClass, k: usize, cap: u64) -> MaxAvdReport<T> {
    let graph = OneInclusionGraph::build(class);
    let n = class.len();
    let m = class.num_coords() as u64;
    let exact = n < 64 && (1u64 << n) <= cap;
    let (numer, denom, witness, exhaustive) = if exact {
        let (nu, de, w) = exhaustive_max(&graph, k);
        (nu, de, w, true)
    } else {
        let (nu, de, w) = local_max(&graph, class, k);
        (nu, de, w, nu == m * de)
    };
    MaxAvdReport { value: ratio(numer, denom), numer, denom, witness, exhaustive }
}

fn exhaustive_max(graph: &OneInclusionGraph, k: usize) -> (u64, u64, Vec<usize>) {
    let n = graph.num_vertices();
    let masks: Vec<u64> = graph
        .edges()
        .iter()
        .map(|e| e.members.iter().fold(0u64, |acc, &v| acc | (1 << v)))
        .collect();
    let mut best = (0u64, 1u64, 1u64);
    for subset in 1u64..(1u64 << n) {
        let size = subset.count_ones() as u64;
        let numer: u64 = masks
            .iter()
            .map(|&mask| {
                let c = (mask & subset).count_ones() as u64;
                if c > k as u64 {
                    c
                } else {
                    0
                }
            })
            .sum();
        if greater(numer, size, best.0, best.1) {
            best = (numer, size, subset);
        }
    }
    let witness = (0..n).filter(|&v| best.2 & (1 << v) != 0).collect();
    (best.0, best.1, witness)
}

fn local_max(graph: &OneInclusionGraph, class: &HypothesisClass, k: usize) -> (u64, u64, Vec<usize>) {
    let n = graph.num_vertices();
    let core = peel_core(class, k);
    let mut starts: Vec<Vec<usize>> = vec![(0..n).collect()];
    if core.iter().any(|&a| a) {
        starts.push((0..n).filter(|&v| core[v]).collect());
    }
    let mut best: Option<(u64, u64, Vec<usize>)> = None;
    for start in starts {
        let mut counter = SubfamilyCounter::new(graph, k);
        for v in start {
            counter.toggle(v);
        }
        loop {
            let mut improved = false;
            for v in 0..n {
                if counter.inside[v] && counter.size == 1 {
                    continue;
                }
                let size = if counter.inside[v] { counter.size - 1 } else { counter.size + 1 };
                let numer = counter.numer_after_toggle(v);
                if greater(numer, size, counter.numer, counter.size) {
                    counter.toggle(v);
                    improved = true;
                }
            }
            if !improved {
                break;
            }
        }
        let candidate = (counter.numer, counter.size, counter.members());
        if best.as_ref().is_none_or(|b| greater(candidate.0, candidate.1, b.0, b.1)) {
            best = Some(candidate);
        }
    }
    best.expect("at least one start")
}

#[derive(Clone, Debug, PartialEq)]
pub struct DensityReport<T> {
    pub value: T,
    pub numer: u64,
    pub denom: u64,
    /// Coordinates achieving the maximum.
    pub coords: CoordSequence,
    /// Witness rows, as indices into the restriction to `coords`.
    pub witness: Vec<usize>,
    pub exhaustive: bool,
}

/// `μ_H(m_target)`: the largest maximal average k-degree over restrictions to
/// `m_target` coordinates.
pub fn density_mu<T: Scalar>(class: &HypothesisClass, m_target: usize, k: usize, cap: u64) -> Result<DensityReport<T>> {
    if m_target == 0 || m_target > class.num_coords() {
        return Err(Error::InvalidArgument(format!(
            "m_target must lie in [1..{}], got {m_target}",
            class.num_coords()
        )));
    }
    let mut best: Option<DensityReport<T>> = None;
    let mut exhaustive = true;
    for combo in (0..class.num_coords()).combinations(m_target) {
        let coords = CoordSequence::new(combo)?;
        let restricted = class.restrict(&coords)?;
        let r: MaxAvdReport<T> = maximal_avd(&restricted, k, cap);
        exhaustive &= r.exhaustive;
        let better = best.as_ref().is_none_or(|b| greater(r.numer, r.denom, b.numer, b.denom));
        if better {
            best = Some(DensityReport {
                value: r.value,
                numer: r.numer,
                denom: r.denom,
                coords,
                witness: r.witness,
                exhaustive: false,
            });
        }
        let b = best.as_ref().unwrap();
        if b.numer == m_target as u64 * b.denom {
            // the maximum possible value; nothing can beat it
            exhaustive = true;
            break;
        }
    }
    let mut report = best.expect("at least one coordinate subset");
    report.exhaustive = exhaustive;
    Ok(report)
}
