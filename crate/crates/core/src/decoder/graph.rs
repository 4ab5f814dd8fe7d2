//! The candidate graph of typical active-pair hypotheses.

use std::fmt::Write as _;

use crate::channel::{FeedbackVector, JointKernel};
use crate::codebook::TransmissionMatrix;
use crate::error::{Error, Result};

use super::typical::{marginal_typical, simplified_edge_test, BlockSplit, Strictness};

/// Unordered vertex pair stored as `(i, j)` with `i < j`, 0-based.
pub type Edge = (usize, usize);

/// Simple undirected graph on `0..n` with a sorted edge list.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CandidateGraph {
    n: usize,
    edges: Vec<Edge>,
}

fn normalize(a: usize, b: usize) -> Edge {
    if a < b {
        (a, b)
    } else {
        (b, a)
    }
}

impl CandidateGraph {
    pub fn empty(n: usize) -> Self {
        CandidateGraph {
            n,
            edges: Vec::new(),
        }
    }

    pub fn complete(n: usize) -> Self {
        let edges = (0..n)
            .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
            .collect();
        CandidateGraph { n, edges }
    }

    /// Builds a graph from arbitrary pairs; duplicates are merged.
    pub fn from_edges<I: IntoIterator<Item = Edge>>(n: usize, edges: I) -> Result<Self> {
        let mut out = Vec::new();
        for (a, b) in edges {
            if a == b {
                return Err(Error::InvalidParameter(format!("self-loop at vertex {a}")));
            }
            if a >= n || b >= n {
                return Err(Error::InvalidParameter(format!(
                    "edge ({a}, {b}) outside 0..{n}"
                )));
            }
            out.push(normalize(a, b));
        }
        out.sort_unstable();
        out.dedup();
        Ok(CandidateGraph { n, edges: out })
    }

    pub fn n_vertices(&self) -> usize {
        self.n
    }

    pub fn n_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        a != b && self.edges.binary_search(&normalize(a, b)).is_ok()
    }

    /// Position of the edge in [`edges`](Self::edges).
    pub fn edge_index(&self, a: usize, b: usize) -> Option<usize> {
        if a == b {
            return None;
        }
        self.edges.binary_search(&normalize(a, b)).ok()
    }

    /// Sorted neighbour lists.
    pub fn adjacency(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.n];
        for &(a, b) in &self.edges {
            adj[a].push(b);
            adj[b].push(a);
        }
        for l in &mut adj {
            l.sort_unstable();
        }
        adj
    }

    pub fn without(&self, removed: &[Edge]) -> Self {
        let mut r: Vec<Edge> = removed.iter().map(|&(a, b)| normalize(a, b)).collect();
        r.sort_unstable();
        let edges = self
            .edges
            .iter()
            .copied()
            .filter(|e| r.binary_search(e).is_err())
            .collect();
        CandidateGraph { n: self.n, edges }
    }

    pub fn is_bipartite(&self) -> bool {
        let adj = self.adjacency();
        let mut side = vec![u8::MAX; self.n];
        let mut queue = std::collections::VecDeque::new();
        for s in 0..self.n {
            if side[s] != u8::MAX {
                continue;
            }
            side[s] = 0;
            queue.push_back(s);
            while let Some(v) = queue.pop_front() {
                for &w in &adj[v] {
                    if side[w] == u8::MAX {
                        side[w] = 1 - side[v];
                        queue.push_back(w);
                    } else if side[w] == side[v] {
                        return false;
                    }
                }
            }
        }
        true
    }

    /// Text dump: `"N M"` then one `"i j"` line per edge, 1-based.
    pub fn to_edge_list(&self) -> String {
        let mut s = format!("{} {}\n", self.n, self.edges.len());
        for &(a, b) in &self.edges {
            writeln!(s, "{} {}", a + 1, b + 1).unwrap();
        }
        s
    }

    pub fn parse_edge_list(text: &str) -> Result<Self> {
        let bad = |m: &str| Error::InvalidParameter(format!("edge list: {m}"));
        let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty());
        let header = lines.next().ok_or_else(|| bad("missing header"))?;
        let nums: Vec<usize> = header
            .split_whitespace()
            .map(|t| t.parse())
            .collect::<std::result::Result<_, _>>()
            .map_err(|_| bad("header"))?;
        let [n, m] = nums[..] else {
            return Err(bad("header needs two fields"));
        };
        let mut edges = Vec::with_capacity(m);
        for l in lines {
            let v: Vec<usize> = l
                .split_whitespace()
                .map(|t| t.parse())
                .collect::<std::result::Result<_, _>>()
                .map_err(|_| bad(l))?;
            let [a, b] = v[..] else { return Err(bad(l)) };
            if a == 0 || b == 0 {
                return Err(bad("vertices are 1-based"));
            }
            edges.push((a - 1, b - 1));
        }
        if edges.len() != m {
            return Err(Error::DimensionMismatch {
                expected: m,
                actual: edges.len(),
            });
        }
        Self::from_edges(n, edges)
    }
}

/// Result of the edge construction: `marginal_ok = false` means `y` failed
/// the marginal test and the graph was left empty.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CandidateBuild {
    pub graph: CandidateGraph,
    pub marginal_ok: bool,
}

/// Examines all `N(N-1)/2` pairs with the per-block test.
pub fn build_candidate_graph(
    x: &TransmissionMatrix,
    y: &FeedbackVector,
    kernel: &JointKernel,
    eps: f64,
    strictness: Strictness,
) -> Result<CandidateBuild> {
    if y.len() != x.n_rounds() {
        return Err(Error::DimensionMismatch {
            expected: x.n_rounds(),
            actual: y.len(),
        });
    }
    let n = x.n_users();
    if !marginal_typical(y, kernel, eps, strictness) {
        return Ok(CandidateBuild {
            graph: CandidateGraph::empty(n),
            marginal_ok: false,
        });
    }
    let split = BlockSplit::new(y);
    let mut edges = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            if simplified_edge_test(&split, x.row(i), x.row(j), kernel, eps, strictness) {
                edges.push((i, j));
            }
        }
    }
    Ok(CandidateBuild {
        graph: CandidateGraph { n, edges },
        marginal_ok: true,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bits::BitRow;
    use crate::channel::{apply_noise, or_superpose, ChannelParams, StatusVector};
    use crate::rng::{stream, Role};

    #[test]
    fn edge_list_round_trip() {
        let g = CandidateGraph::from_edges(5, [(3, 1), (0, 4), (1, 3)]).unwrap();
        assert_eq!(g.edges(), &[(0, 4), (1, 3)]);
        let text = g.to_edge_list();
        assert_eq!(text, "5 2\n1 5\n2 4\n");
        assert_eq!(CandidateGraph::parse_edge_list(&text).unwrap(), g);
        assert!(CandidateGraph::from_edges(3, [(1, 1)]).is_err());
        assert!(CandidateGraph::from_edges(3, [(1, 3)]).is_err());
    }

    #[test]
    fn equal_rows_give_true_edge() {
        let rows = vec![
            BitRow::from_str01("1010"),
            BitRow::from_str01("1010"),
            BitRow::from_str01("0101"),
        ];
        let x = TransmissionMatrix::from_rows(rows, 0.5).unwrap();
        let s = StatusVector::first_pair(3);
        let y = or_superpose(&x, &s).unwrap();
        let k = JointKernel::pair(0.5, ChannelParams::noiseless()).unwrap();
        let b = build_candidate_graph(&x, &y, &k, 2.0, Strictness::Sufficient).unwrap();
        assert!(b.marginal_ok);
        assert!(b.graph.has_edge(0, 1));
    }

    #[test]
    fn huge_slack_gives_complete_graph() {
        let mut rng = stream(2, Role::Codebook);
        let x = TransmissionMatrix::random(7, 30, 0.4, &mut rng);
        let y = FeedbackVector::from_str01(&"10".repeat(15));
        let k = JointKernel::pair(0.4, ChannelParams::new(0.2, 0.2).unwrap()).unwrap();
        let b = build_candidate_graph(&x, &y, &k, 100.0, Strictness::Necessary).unwrap();
        assert_eq!(b.graph, CandidateGraph::complete(7));
    }

    #[test]
    fn marginal_failure_is_flagged() {
        let x = TransmissionMatrix::random(4, 20, 0.5, &mut stream(1, Role::Codebook));
        let y = FeedbackVector::new(BitRow::zeros(20));
        let k = JointKernel::pair(0.5, ChannelParams::new(0.1, 0.1).unwrap()).unwrap();
        let b = build_candidate_graph(&x, &y, &k, 0.05, Strictness::Sufficient).unwrap();
        assert!(!b.marginal_ok);
        assert_eq!(b.graph.n_edges(), 0);
    }

    #[test]
    fn matches_naive_pair_oracle() {
        let (n, t, p) = (6, 60, 0.3);
        let ch = ChannelParams::new(0.05, 0.1).unwrap();
        let k = JointKernel::pair(p, ch).unwrap();
        let x = TransmissionMatrix::random(n, t, p, &mut stream(8, Role::Codebook));
        let y0 = or_superpose(&x, &StatusVector::first_pair(n)).unwrap();
        let y = apply_noise(&y0, &ch, &mut stream(8, Role::Noise));
        let eps = 0.4;
        let b = build_candidate_graph(&x, &y, &k, eps, Strictness::Sufficient).unwrap();
        assert!(b.marginal_ok);
        let slack = 2.0 * eps / 4.0;
        let mut oracle = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                let ok = [true, false].iter().all(|&w| {
                    let c = (0..t)
                        .filter(|&r| y.bits().get(r) == w && !x.get(i, r) && !x.get(j, r))
                        .count();
                    (c as f64 / t as f64 - k.p_y_y0(w, false)).abs() <= slack
                });
                if ok {
                    oracle.push((i, j));
                }
            }
        }
        assert_eq!(b.graph.edges(), &oracle[..]);
    }
}
