//! Partitions, the canonical 2-coloring and the end-to-end decoder.

use std::collections::VecDeque;
use std::fmt;

use serde::Serialize;

use crate::channel::{FeedbackVector, StatusVector};
use crate::codebook::{ExperimentConfig, TransmissionMatrix};
use crate::error::{Error, Result};

use super::bipartize::min_edge_bipartize;
use super::graph::{build_candidate_graph, CandidateBuild, CandidateGraph, Edge};
use super::odd_cycle::lies_on_odd_cycle;

/// Group label per user, each in `1..=k`, every label used.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Partition {
    labels: Vec<u8>,
}

impl Partition {
    pub fn new(labels: Vec<u8>, k: u8) -> Result<Self> {
        if let Some(&l) = labels.iter().find(|&&l| l == 0 || l > k) {
            return Err(Error::InvalidParameter(format!(
                "label {l} outside 1..={k}"
            )));
        }
        for want in 1..=k {
            if !labels.contains(&want) {
                return Err(Error::InvalidParameter(format!("label {want} unused")));
            }
        }
        Ok(Partition { labels })
    }

    pub fn labels(&self) -> &[u8] {
        &self.labels
    }

    pub fn label(&self, i: usize) -> u8 {
        self.labels[i]
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    /// Swaps labels 1 and 2.
    pub fn swapped(&self) -> Self {
        Partition {
            labels: self.labels.iter().map(|&l| 3 - l).collect(),
        }
    }
}

impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, l) in self.labels.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{l}")?;
        }
        write!(f, ")")
    }
}

/// BFS 2-coloring: components in order of their lowest vertex, each root
/// gets label 1, neighbours visited in ascending order. If that leaves only
/// label 1 (no edges at all), vertex 0 keeps 1 and everyone else gets 2.
pub fn two_coloring(g: &CandidateGraph) -> Result<Partition> {
    let n = g.n_vertices();
    if n < 2 {
        return Err(Error::InvalidParameter("need at least two vertices".into()));
    }
    let adj = g.adjacency();
    let mut labels = vec![0u8; n];
    let mut q = VecDeque::new();
    for s in 0..n {
        if labels[s] != 0 {
            continue;
        }
        labels[s] = 1;
        q.push_back(s);
        while let Some(v) = q.pop_front() {
            for &w in &adj[v] {
                if labels[w] == 0 {
                    labels[w] = 3 - labels[v];
                    q.push_back(w);
                } else if labels[w] == labels[v] {
                    return Err(Error::NotBipartite);
                }
            }
        }
    }
    if labels.iter().all(|&l| l == 1) {
        labels[1..].iter_mut().for_each(|l| *l = 2);
    }
    Partition::new(labels, 2)
}

/// 0 when all active users carry distinct labels, 1 otherwise.
pub fn distortion(s: &StatusVector, z: &Partition) -> Result<u8> {
    if s.n_users() != z.len() {
        return Err(Error::DimensionMismatch {
            expected: s.n_users(),
            actual: z.len(),
        });
    }
    let mut seen = Vec::new();
    for i in s.actives() {
        let l = z.label(i);
        if seen.contains(&l) {
            return Ok(1);
        }
        seen.push(l);
    }
    Ok(0)
}

/// Intermediate results of [`decode`].
#[derive(Debug, Clone)]
pub struct DecodeReport {
    pub candidates: CandidateBuild,
    pub deleted: Vec<Edge>,
    pub search_nodes: u64,
    pub partition: Partition,
}

pub fn decode_detailed(
    x: &TransmissionMatrix,
    y: &FeedbackVector,
    cfg: &ExperimentConfig,
) -> Result<DecodeReport> {
    if cfg.k_active != 2 {
        return Err(Error::InvalidParameter(
            "decoder supports k_active = 2 only".into(),
        ));
    }
    let kernel = cfg.kernel()?;
    let candidates = build_candidate_graph(x, y, &kernel, cfg.epsilon, cfg.strictness)?;
    let b = min_edge_bipartize(&candidates.graph, cfg.search_budget)?;
    let partition = two_coloring(&b.kept)?;
    Ok(DecodeReport {
        candidates,
        deleted: b.deleted,
        search_nodes: b.nodes,
        partition,
    })
}

/// Candidate graph, then minimum bipartization, then the canonical coloring.
pub fn decode(
    x: &TransmissionMatrix,
    y: &FeedbackVector,
    cfg: &ExperimentConfig,
) -> Result<Partition> {
    decode_detailed(x, y, cfg).map(|r| r.partition)
}

/// The true edge is a candidate and lies on no odd cycle.
pub fn suboptimal_success(
    x: &TransmissionMatrix,
    y: &FeedbackVector,
    s0: &StatusVector,
    cfg: &ExperimentConfig,
) -> Result<bool> {
    let act = s0.actives();
    if act.len() != 2 {
        return Err(Error::InvalidParameter(format!(
            "expected 2 actives, got {}",
            act.len()
        )));
    }
    let kernel = cfg.kernel()?;
    let b = build_candidate_graph(x, y, &kernel, cfg.epsilon, cfg.strictness)?;
    if !b.graph.has_edge(act[0], act[1]) {
        return Ok(false);
    }
    Ok(!lies_on_odd_cycle(&b.graph, (act[0], act[1]))?)
}
