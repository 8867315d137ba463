//! k-list orientations of one-inclusion graphs.

use std::collections::BTreeSet;

use itertools::Itertools;

use crate::error::{Error, Result};
use crate::oig::OneInclusionGraph;

/// `σ(e)` for every edge, each list sorted by vertex id.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ListOrientation {
    pub k: usize,
    pub assignment: Vec<Vec<usize>>,
}

impl ListOrientation {
    pub fn list(&self, edge: usize) -> &[usize] {
        &self.assignment[edge]
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OutdegreeReport {
    pub outdegrees: Vec<usize>,
    pub max_outdegree: usize,
    /// Edges whose list is empty (allowed, but never produced by our builders).
    pub empty_edges: Vec<usize>,
}

/// Recomputes outdegrees from scratch, failing on `σ(e) ⊄ e`, `|σ(e)| > k`,
/// duplicates or a size mismatch with the graph.
pub fn validate(graph: &OneInclusionGraph, sigma: &ListOrientation) -> Result<OutdegreeReport> {
    if sigma.assignment.len() != graph.edges().len() {
        return Err(Error::InvalidOrientation(format!(
            "{} lists for {} edges",
            sigma.assignment.len(),
            graph.edges().len()
        )));
    }
    let mut empty_edges = Vec::new();
    for (id, (edge, list)) in graph.edges().iter().zip(&sigma.assignment).enumerate() {
        if list.len() > sigma.k {
            return Err(Error::InvalidOrientation(format!(
                "edge {id} oriented to {} vertices, more than k = {}",
                list.len(),
                sigma.k
            )));
        }
        if list.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidOrientation(format!("edge {id} list is not strictly increasing")));
        }
        if let Some(v) = list.iter().find(|v| edge.members.binary_search(v).is_err()) {
            return Err(Error::InvalidOrientation(format!("edge {id} oriented to non-member vertex {v}")));
        }
        if list.is_empty() {
            empty_edges.push(id);
        }
    }
    let outdegrees: Vec<usize> = (0..graph.num_vertices())
        .map(|v| {
            graph
                .incident(v)
                .iter()
                .filter(|&&e| sigma.assignment[e].binary_search(&v).is_err())
                .count()
        })
        .collect();
    let max_outdegree = outdegrees.iter().copied().max().unwrap_or(0);
    Ok(OutdegreeReport { outdegrees, max_outdegree, empty_edges })
}

/// A-priori bound on the k-degree of the vertex peeled at each step.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DegreeBound {
    /// No premise; the outcome's bound is read off the peeling trace.
    None,
    /// The class lives on `d + 1` coordinates and has k-DS dimension at most `d`.
    DsDimension(usize),
    /// The class has k-exponential dimension `d_E`; bound `4 k^2 d_E`.
    ExpDimension(usize),
}

impl DegreeBound {
    pub fn value(self, k: usize) -> Option<usize> {
        match self {
            Self::None => None,
            Self::DsDimension(d) => Some(d),
            Self::ExpDimension(d) => Some(4 * k * k * d),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GreedyOutcome {
    pub orientation: ListOrientation,
    /// Vertices in the order they were removed.
    pub peel_order: Vec<usize>,
    /// Largest k-degree of a vertex at the moment it was removed. The max
    /// outdegree of the orientation never exceeds it.
    pub max_peel_degree: usize,
    pub max_outdegree: usize,
}

/// Peels a minimum-k-degree vertex (ties: smallest vertex id) until nothing
/// is left, then re-inserts vertices in reverse. An edge that has reached `k`
/// oriented members keeps its list, charging the newcomer; otherwise the
/// newcomer joins the list.
///
/// With a `bound` premise, fails if some peeled vertex exceeds it (the premise
/// does not hold for this class).
pub fn greedy_orientation(graph: &OneInclusionGraph, k: usize, bound: DegreeBound) -> Result<GreedyOutcome> {
    if k == 0 {
        return Err(Error::InvalidArgument("k must be positive".into()));
    }
    let n = graph.num_vertices();
    let limit = bound.value(k);
    let mut count: Vec<usize> = graph.edges().iter().map(|e| e.len()).collect();
    let mut degree: Vec<usize> =
        (0..n).map(|v| graph.incident(v).iter().filter(|&&e| count[e] > k).count()).collect();
    let mut alive = vec![true; n];
    let mut queue: BTreeSet<(usize, usize)> = (0..n).map(|v| (degree[v], v)).collect();
    let mut peel_order = Vec::with_capacity(n);
    let mut max_peel_degree = 0;
    while let Some((deg, v)) = queue.pop_first() {
        if let Some(b) = limit {
            if deg > b {
                return Err(Error::InvalidArgument(format!(
                    "every remaining vertex has k-degree above the premised bound {b}"
                )));
            }
        }
        max_peel_degree = max_peel_degree.max(deg);
        alive[v] = false;
        peel_order.push(v);
        for &e in graph.incident(v) {
            count[e] -= 1;
            if count[e] == k {
                for &u in &graph.edge(e).members {
                    if alive[u] {
                        queue.remove(&(degree[u], u));
                        degree[u] -= 1;
                        queue.insert((degree[u], u));
                    }
                }
            }
        }
    }
    let mut assignment: Vec<Vec<usize>> = vec![Vec::new(); graph.edges().len()];
    let mut filled = vec![0usize; graph.edges().len()];
    let mut outdeg = vec![0usize; n];
    for &h in peel_order.iter().rev() {
        for &e in graph.incident(h) {
            if filled[e] < k {
                let list = &mut assignment[e];
                let pos = list.partition_point(|&u| u < h);
                list.insert(pos, h);
            } else {
                outdeg[h] += 1;
            }
            filled[e] += 1;
        }
    }
    let max_outdegree = outdeg.iter().copied().max().unwrap_or(0);
    Ok(GreedyOutcome {
        orientation: ListOrientation { k, assignment },
        peel_order,
        max_peel_degree,
        max_outdegree,
    })
}

/// Default node budget for [`exact_min_max_outdegree`].
pub const DEFAULT_EXACT_CAP: u64 = 5_000_000;

/// Orientation minimizing the maximum k-outdegree, by branch and bound over
/// which `|e| - k` members each large edge leaves out. Only for tiny graphs:
/// fails with [`Error::CapExceeded`] after `cap` search nodes.
pub fn exact_min_max_outdegree(graph: &OneInclusionGraph, k: usize, cap: u64) -> Result<(ListOrientation, usize)> {
    let greedy = greedy_orientation(graph, k, DegreeBound::None)?;
    let mut assignment: Vec<Vec<usize>> =
        graph.edges().iter().map(|e| if e.len() <= k { e.members.clone() } else { Vec::new() }).collect();
    let mut large: Vec<usize> = (0..graph.edges().len()).filter(|&e| graph.edge(e).len() > k).collect();
    large.sort_by_key(|&e| (std::cmp::Reverse(graph.edge(e).len()), e));
    let mut search = Search {
        graph,
        k,
        large,
        outdeg: vec![0; graph.num_vertices()],
        excluded: vec![Vec::new(); graph.edges().len()],
        best: greedy.max_outdegree,
        best_excluded: None,
        nodes: 0,
        cap,
    };
    search.run(0)?;
    match search.best_excluded {
        None => Ok((greedy.orientation, greedy.max_outdegree)),
        Some(excluded) => {
            for &e in &search.large {
                let out = &excluded[e];
                assignment[e] = graph.edge(e).members.iter().copied().filter(|v| !out.contains(v)).collect();
            }
            Ok((ListOrientation { k, assignment }, search.best))
        }
    }
}

struct Search<'a> {
    graph: &'a OneInclusionGraph,
    k: usize,
    large: Vec<usize>,
    outdeg: Vec<usize>,
    excluded: Vec<Vec<usize>>,
    best: usize,
    best_excluded: Option<Vec<Vec<usize>>>,
    nodes: u64,
    cap: u64,
}

impl Search<'_> {
    fn run(&mut self, depth: usize) -> Result<()> {
        self.nodes += 1;
        if self.nodes > self.cap {
            return Err(Error::CapExceeded { cap: self.cap });
        }
        if self.best == 0 {
            return Ok(());
        }
        if depth == self.large.len() {
            let value = self.outdeg.iter().copied().max().unwrap_or(0);
            if value < self.best {
                self.best = value;
                self.best_excluded = Some(self.excluded.clone());
            }
            return Ok(());
        }
        let e = self.large[depth];
        let mut members = self.graph.edge(e).members.clone();
        members.sort_by_key(|&v| (self.outdeg[v], v));
        let drop = members.len() - self.k;
        for out in members.into_iter().combinations(drop) {
            if out.iter().any(|&v| self.outdeg[v] + 1 >= self.best) {
                continue;
            }
            for &v in &out {
                self.outdeg[v] += 1;
            }
            self.excluded[e] = out.clone();
            self.run(depth + 1)?;
            for &v in &out {
                self.outdeg[v] -= 1;
            }
            self.excluded[e].clear();
            if self.best == 0 {
                break;
            }
        }
        Ok(())
    }
}
