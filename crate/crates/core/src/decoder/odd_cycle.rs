//! Biconnected blocks and the "edge lies on an odd cycle" predicate.

use std::collections::VecDeque;

use crate::error::{Error, Result};

use super::graph::CandidateGraph;

/// Block decomposition of a graph. An edge lies on an odd simple cycle iff
/// its block is not bipartite.
#[derive(Debug, Clone)]
pub struct OddCycleIndex {
    /// Block id of each edge, aligned with `graph.edges()`.
    block_of: Vec<usize>,
    /// Edge indices of each block, ascending.
    blocks: Vec<Vec<usize>>,
    bipartite: Vec<bool>,
}

struct Frame {
    v: usize,
    parent_edge: usize,
    pos: usize,
}

impl OddCycleIndex {
    pub fn new(g: &CandidateGraph) -> Self {
        let n = g.n_vertices();
        let edges = g.edges();
        let mut adj: Vec<Vec<(usize, usize)>> = vec![Vec::new(); n];
        for (e, &(a, b)) in edges.iter().enumerate() {
            adj[a].push((b, e));
            adj[b].push((a, e));
        }
        const NONE: usize = usize::MAX;
        let mut disc = vec![NONE; n];
        let mut low = vec![0usize; n];
        let mut time = 0usize;
        let mut estack: Vec<usize> = Vec::new();
        let mut block_of = vec![NONE; edges.len()];
        let mut blocks: Vec<Vec<usize>> = Vec::new();
        let mut stack: Vec<Frame> = Vec::new();

        for root in 0..n {
            if disc[root] != NONE {
                continue;
            }
            disc[root] = time;
            low[root] = time;
            time += 1;
            stack.push(Frame {
                v: root,
                parent_edge: NONE,
                pos: 0,
            });
            while let Some(top) = stack.last_mut() {
                let v = top.v;
                if top.pos < adj[v].len() {
                    let (w, e) = adj[v][top.pos];
                    top.pos += 1;
                    if e == top.parent_edge {
                        continue;
                    }
                    if disc[w] == NONE {
                        estack.push(e);
                        disc[w] = time;
                        low[w] = time;
                        time += 1;
                        stack.push(Frame {
                            v: w,
                            parent_edge: e,
                            pos: 0,
                        });
                    } else if disc[w] < disc[v] {
                        estack.push(e);
                        low[v] = low[v].min(disc[w]);
                    }
                } else {
                    let done = stack.pop().unwrap();
                    if let Some(parent) = stack.last() {
                        let u = parent.v;
                        low[u] = low[u].min(low[v]);
                        if low[v] >= disc[u] {
                            let id = blocks.len();
                            let mut block = Vec::new();
                            while let Some(e) = estack.pop() {
                                block_of[e] = id;
                                block.push(e);
                                if e == done.parent_edge {
                                    break;
                                }
                            }
                            block.sort_unstable();
                            blocks.push(block);
                        }
                    }
                }
            }
        }

        let bipartite = blocks.iter().map(|b| block_is_bipartite(g, b)).collect();
        OddCycleIndex {
            block_of,
            blocks,
            bipartite,
        }
    }

    pub fn n_blocks(&self) -> usize {
        self.blocks.len()
    }

    /// Edge indices (into `graph.edges()`) of block `b`.
    pub fn block(&self, b: usize) -> &[usize] {
        &self.blocks[b]
    }

    pub fn block_is_bipartite(&self, b: usize) -> bool {
        self.bipartite[b]
    }

    pub fn block_of_edge(&self, e: usize) -> usize {
        self.block_of[e]
    }

    pub fn edge_on_odd_cycle(&self, e: usize) -> bool {
        !self.bipartite[self.block_of[e]]
    }
}

fn block_is_bipartite(g: &CandidateGraph, block: &[usize]) -> bool {
    let edges = g.edges();
    let mut adj: std::collections::HashMap<usize, Vec<usize>> = std::collections::HashMap::new();
    for &e in block {
        let (a, b) = edges[e];
        adj.entry(a).or_default().push(b);
        adj.entry(b).or_default().push(a);
    }
    let mut side: std::collections::HashMap<usize, bool> = std::collections::HashMap::new();
    let start = edges[block[0]].0;
    side.insert(start, false);
    let mut q = VecDeque::from([start]);
    while let Some(v) = q.pop_front() {
        let sv = side[&v];
        for &w in &adj[&v] {
            match side.get(&w) {
                None => {
                    side.insert(w, !sv);
                    q.push_back(w);
                }
                Some(&sw) if sw == sv => return false,
                _ => {}
            }
        }
    }
    true
}

/// Whether `edge` lies on some odd-length simple cycle of `g`.
pub fn lies_on_odd_cycle(g: &CandidateGraph, edge: (usize, usize)) -> Result<bool> {
    let e = g
        .edge_index(edge.0, edge.1)
        .ok_or(Error::EdgeAbsent(edge.0, edge.1))?;
    Ok(OddCycleIndex::new(g).edge_on_odd_cycle(e))
}
