//! Exact minimum edge deletion to a bipartite graph.

use std::collections::{HashMap, VecDeque};

use crate::error::{Error, Result};

use super::graph::{CandidateGraph, Edge};
use super::odd_cycle::OddCycleIndex;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Bipartization {
    pub kept: CandidateGraph,
    /// Lexicographically smallest minimum deletion set, sorted.
    pub deleted: Vec<Edge>,
    /// Search nodes used.
    pub nodes: u64,
}

/// Deletes a minimum number of edges so the rest is bipartite.
///
/// Works block by block (an odd cycle never leaves its biconnected block).
/// Each non-bipartite block is solved by depth-first branching on the
/// edges of a short odd cycle, with iterative deepening on the deletion
/// count. More than `budget` search nodes in total is an error.
pub fn min_edge_bipartize(g: &CandidateGraph, budget: u64) -> Result<Bipartization> {
    let index = OddCycleIndex::new(g);
    let mut nodes = 0u64;
    let mut deleted = Vec::new();
    for b in 0..index.n_blocks() {
        if index.block_is_bipartite(b) {
            continue;
        }
        let ids = index.block(b);
        let mut solver = BlockSolver::new(g, ids, budget);
        solver.nodes = nodes;
        let local = solver.lex_min_deletion()?;
        nodes = solver.nodes;
        deleted.extend(local.into_iter().map(|l| g.edges()[ids[l]]));
    }
    deleted.sort_unstable();
    let kept = g.without(&deleted);
    debug_assert!(kept.is_bipartite());
    Ok(Bipartization {
        kept,
        deleted,
        nodes,
    })
}

struct BlockSolver {
    n: usize,
    ends: Vec<(usize, usize)>,
    adj: Vec<Vec<(usize, usize)>>,
    deleted: Vec<bool>,
    forbidden: Vec<bool>,
    nodes: u64,
    budget: u64,
}

impl BlockSolver {
    fn new(g: &CandidateGraph, ids: &[usize], budget: u64) -> Self {
        let mut local: HashMap<usize, usize> = HashMap::new();
        let mut ends = Vec::with_capacity(ids.len());
        for &e in ids {
            let (a, b) = g.edges()[e];
            let next = local.len();
            let la = *local.entry(a).or_insert(next);
            let next = local.len();
            let lb = *local.entry(b).or_insert(next);
            ends.push((la, lb));
        }
        let n = local.len();
        let mut adj = vec![Vec::new(); n];
        for (e, &(a, b)) in ends.iter().enumerate() {
            adj[a].push((b, e));
            adj[b].push((a, e));
        }
        let m = ends.len();
        BlockSolver {
            n,
            ends,
            adj,
            deleted: vec![false; m],
            forbidden: vec![false; m],
            nodes: 0,
            budget,
        }
    }

    /// A shortest-found odd cycle among live edges, ignoring edges flagged
    /// in `extra`.
    fn odd_cycle(&self, extra: Option<&[bool]>) -> Option<Vec<usize>> {
        const NONE: usize = usize::MAX;
        let live = |e: usize| !self.deleted[e] && extra.is_none_or(|x| !x[e]);
        let mut depth = vec![NONE; self.n];
        let mut parent = vec![(NONE, NONE); self.n];
        let mut best: Option<(usize, usize)> = None;
        let mut best_len = usize::MAX;
        let mut q = VecDeque::new();
        for s in 0..self.n {
            if depth[s] != NONE {
                continue;
            }
            depth[s] = 0;
            q.push_back(s);
            while let Some(v) = q.pop_front() {
                for &(w, e) in &self.adj[v] {
                    if !live(e) {
                        continue;
                    }
                    if depth[w] == NONE {
                        depth[w] = depth[v] + 1;
                        parent[w] = (v, e);
                        q.push_back(w);
                    } else if depth[w] == depth[v] && v < w && 2 * depth[v] + 1 < best_len {
                        best_len = 2 * depth[v] + 1;
                        best = Some((v, e));
                    }
                }
            }
        }
        let (v, e) = best?;
        let w = if self.ends[e].0 == v {
            self.ends[e].1
        } else {
            self.ends[e].0
        };
        let mut cycle = vec![e];
        let (mut a, mut b) = (v, w);
        while a != b {
            let (pa, ea) = parent[a];
            let (pb, eb) = parent[b];
            cycle.push(ea);
            cycle.push(eb);
            a = pa;
            b = pb;
        }
        Some(cycle)
    }

    /// Size of a greedy packing of edge-disjoint odd cycles, capped at `cap`.
    fn packing_bound(&self, cap: usize) -> usize {
        let mut used = vec![false; self.ends.len()];
        let mut count = 0;
        while count < cap {
            match self.odd_cycle(Some(&used)) {
                Some(c) => {
                    for e in c {
                        used[e] = true;
                    }
                    count += 1;
                }
                None => break,
            }
        }
        count
    }

    /// Can at most `k` more non-forbidden edges be deleted to reach a
    /// bipartite graph?
    fn feasible(&mut self, k: usize) -> Result<bool> {
        self.nodes += 1;
        if self.nodes > self.budget {
            return Err(Error::BudgetExceeded {
                budget: self.budget,
            });
        }
        let Some(cycle) = self.odd_cycle(None) else {
            return Ok(true);
        };
        if k == 0 {
            return Ok(false);
        }
        if k >= 2 && self.packing_bound(k + 1) > k {
            return Ok(false);
        }
        let mut cand: Vec<usize> = cycle.into_iter().filter(|&e| !self.forbidden[e]).collect();
        cand.sort_unstable();
        let mut pinned = Vec::new();
        let mut found = false;
        for e in cand {
            self.deleted[e] = true;
            let r = self.feasible(k - 1);
            self.deleted[e] = false;
            match r {
                Ok(true) => {
                    found = true;
                    break;
                }
                Ok(false) => {
                    // Later branches keep `e`; solutions deleting it were covered.
                    self.forbidden[e] = true;
                    pinned.push(e);
                }
                Err(err) => {
                    for &p in &pinned {
                        self.forbidden[p] = false;
                    }
                    return Err(err);
                }
            }
        }
        for p in pinned {
            self.forbidden[p] = false;
        }
        Ok(found)
    }

    fn lex_min_deletion(&mut self) -> Result<Vec<usize>> {
        let m = self.ends.len();
        let mut k = self.packing_bound(m).max(1);
        while !self.feasible(k)? {
            k += 1;
        }
        let mut chosen: Vec<usize> = Vec::with_capacity(k);
        for pos in 0..k {
            let start = chosen.last().map_or(0, |&c| c + 1);
            let mut picked = None;
            for e in start..m {
                self.deleted.iter_mut().for_each(|d| *d = false);
                self.forbidden.iter_mut().for_each(|f| *f = false);
                for &c in &chosen {
                    self.deleted[c] = true;
                }
                self.deleted[e] = true;
                for f in 0..e {
                    if !self.deleted[f] {
                        self.forbidden[f] = true;
                    }
                }
                if self.feasible(k - pos - 1)? {
                    picked = Some(e);
                    break;
                }
            }
            chosen.push(picked.expect("a minimum solution exists"));
        }
        Ok(chosen)
    }
}
