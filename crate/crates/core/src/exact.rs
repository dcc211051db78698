//! Exact maximum-independent-set computation at desk scale.
//!
//! `exact_alpha` decomposes into connected components and runs branch and
//! bound on each: degree-0/1 vertices are taken greedily (which is always
//! safe for MIS), branching happens on a maximum-degree vertex, and subtrees
//! are pruned with `|current| + alive - matching` where the greedy matching
//! lower-bounds any vertex cover of the residual graph. `brute_alpha` is the
//! independent oracle: plain subset enumeration, kept for `n <= 25`.
//!
//! Multigraphs are reduced first: self-looped vertices can never join an
//! independent set and are deleted; parallel edges collapse to one.

use thiserror::Error;

use crate::graphgen::MultiGraph;

#[derive(Debug, Error, PartialEq)]
pub enum ExactError {
    #[error("graph too large for brute force (n = {0} > 25)")]
    TooLarge(usize),
    #[error("search budget exhausted after {nodes} nodes (best lower bound {best})")]
    BudgetExceeded { best: usize, nodes: u64 },
}

/// Exact result with a witness set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExactResult {
    pub alpha: usize,
    pub nodes_explored: u64,
    /// An independent set attaining `alpha`, in original vertex ids.
    pub witness: Vec<u32>,
}

/// Reduction to a simple graph: drops self-looped vertices, collapses
/// parallel edges. Returns per-kept-vertex sorted neighbour lists plus the
/// map back to original ids.
fn reduce_simple(g: &MultiGraph) -> (Vec<Vec<u32>>, Vec<u32>) {
    let n = g.n();
    let mut keep = vec![true; n];
    for v in 0..n as u32 {
        if g.has_self_loop(v) {
            keep[v as usize] = false;
        }
    }
    let mut new_id = vec![u32::MAX; n];
    let mut back = Vec::new();
    for v in 0..n {
        if keep[v] {
            new_id[v] = back.len() as u32;
            back.push(v as u32);
        }
    }
    let mut adj: Vec<Vec<u32>> = vec![Vec::new(); back.len()];
    for &(u, v) in g.edges() {
        if u != v && keep[u as usize] && keep[v as usize] {
            adj[new_id[u as usize] as usize].push(new_id[v as usize]);
            adj[new_id[v as usize] as usize].push(new_id[u as usize]);
        }
    }
    for list in &mut adj {
        list.sort_unstable();
        list.dedup();
    }
    (adj, back)
}

/// Exhaustive independence number by subset enumeration (`n <= 25`).
pub fn brute_alpha(g: &MultiGraph) -> Result<usize, ExactError> {
    if g.n() > 25 {
        return Err(ExactError::TooLarge(g.n()));
    }
    let (adj, _) = reduce_simple(g);
    let n = adj.len();
    if n == 0 {
        return Ok(0);
    }
    let masks: Vec<u32> = adj
        .iter()
        .map(|list| list.iter().fold(0u32, |m, &u| m | (1 << u)))
        .collect();
    let total = 1usize << n;
    let mut independent = vec![0u64; total.div_ceil(64)];
    independent[0] |= 1; // empty set
    let mut alpha = 0usize;
    for m in 1..total {
        let v = m.trailing_zeros() as usize;
        let rest = m & (m - 1);
        let ok = (independent[rest >> 6] >> (rest & 63)) & 1 == 1 && masks[v] & rest as u32 == 0;
        if ok {
            independent[m >> 6] |= 1 << (m & 63);
            alpha = alpha.max(m.count_ones() as usize);
        }
    }
    Ok(alpha)
}

struct BranchBound<'a> {
    adj: &'a [Vec<u32>],
    alive: Vec<bool>,
    deg: Vec<u32>,
    n_alive: usize,
    cur: Vec<u32>,
    best: usize,
    best_set: Vec<u32>,
    nodes: u64,
    budget: u64,
    exceeded: bool,
    matched: Vec<bool>,
}

impl<'a> BranchBound<'a> {
    fn new(adj: &'a [Vec<u32>], members: &[u32], budget: u64) -> Self {
        let mut alive = vec![false; adj.len()];
        for &v in members {
            alive[v as usize] = true;
        }
        let deg: Vec<u32> = (0..adj.len())
            .map(|v| {
                if alive[v] {
                    adj[v].iter().filter(|&&u| alive[u as usize]).count() as u32
                } else {
                    0
                }
            })
            .collect();
        Self {
            adj,
            n_alive: members.len(),
            alive,
            deg,
            cur: Vec::new(),
            best: 0,
            best_set: Vec::new(),
            nodes: 0,
            budget,
            exceeded: false,
            matched: vec![false; adj.len()],
        }
    }

    fn remove(&mut self, v: u32, trail: &mut Vec<u32>) {
        self.alive[v as usize] = false;
        self.n_alive -= 1;
        for &u in &self.adj[v as usize] {
            if self.alive[u as usize] {
                self.deg[u as usize] -= 1;
            }
        }
        trail.push(v);
    }

    fn restore(&mut self, trail: &mut Vec<u32>, mark: usize) {
        while trail.len() > mark {
            let v = trail.pop().unwrap();
            self.alive[v as usize] = true;
            self.n_alive += 1;
            for &u in &self.adj[v as usize] {
                if self.alive[u as usize] {
                    self.deg[u as usize] += 1;
                }
            }
        }
    }

    /// Greedy maximal matching on the residual graph; any vertex cover has at
    /// least this many vertices, so `alpha <= alive - matching`.
    fn matching_bound(&mut self) -> usize {
        for v in 0..self.adj.len() {
            self.matched[v] = false;
        }
        let mut m = 0usize;
        for v in 0..self.adj.len() as u32 {
            if !self.alive[v as usize] || self.matched[v as usize] {
                continue;
            }
            for &u in &self.adj[v as usize] {
                if self.alive[u as usize] && !self.matched[u as usize] && u != v {
                    self.matched[v as usize] = true;
                    self.matched[u as usize] = true;
                    m += 1;
                    break;
                }
            }
        }
        m
    }

    fn search(&mut self, trail: &mut Vec<u32>) {
        self.nodes += 1;
        if self.nodes > self.budget {
            self.exceeded = true;
            return;
        }
        let mark = trail.len();
        let cur_mark = self.cur.len();

        // Degree-0/1 reductions are exact: an isolated vertex always joins,
        // and a pendant vertex can be chosen over its neighbour.
        loop {
            let mut acted = false;
            for v in 0..self.adj.len() as u32 {
                if !self.alive[v as usize] {
                    continue;
                }
                match self.deg[v as usize] {
                    0 => {
                        self.cur.push(v);
                        self.remove(v, trail);
                        acted = true;
                    }
                    1 => {
                        let u = *self.adj[v as usize]
                            .iter()
                            .find(|&&u| self.alive[u as usize])
                            .unwrap();
                        self.cur.push(v);
                        self.remove(v, trail);
                        self.remove(u, trail);
                        acted = true;
                    }
                    _ => {}
                }
            }
            if !acted {
                break;
            }
        }

        if self.n_alive == 0 {
            if self.cur.len() > self.best {
                self.best = self.cur.len();
                self.best_set = self.cur.clone();
            }
        } else {
            let upper = self.cur.len() + self.n_alive - self.matching_bound();
            if upper > self.best && !self.exceeded {
                let v = (0..self.adj.len() as u32)
                    .filter(|&v| self.alive[v as usize])
                    .max_by_key(|&v| self.deg[v as usize])
                    .unwrap();

                // Branch: v in the set.
                let m2 = trail.len();
                let c2 = self.cur.len();
                self.cur.push(v);
                self.remove(v, trail);
                let neigh: Vec<u32> = self.adj[v as usize]
                    .iter()
                    .copied()
                    .filter(|&u| self.alive[u as usize])
                    .collect();
                for u in neigh {
                    self.remove(u, trail);
                }
                self.search(trail);
                self.restore(trail, m2);
                self.cur.truncate(c2);

                // Branch: v out.
                if !self.exceeded {
                    self.remove(v, trail);
                    self.search(trail);
                    self.restore(trail, m2);
                }
            }
        }

        self.restore(trail, mark);
        self.cur.truncate(cur_mark);
    }
}

/// Exact independence number by component-wise branch and bound.
///
/// `budget` caps the total number of search nodes across components; on
/// exhaustion the error carries the best lower bound assembled so far.
pub fn exact_alpha(g: &MultiGraph, budget: u64) -> Result<ExactResult, ExactError> {
    let (adj, back) = reduce_simple(g);
    let n = adj.len();

    // Connected components of the reduced graph.
    let mut comp = vec![u32::MAX; n];
    let mut comps: Vec<Vec<u32>> = Vec::new();
    for s in 0..n as u32 {
        if comp[s as usize] != u32::MAX {
            continue;
        }
        let id = comps.len() as u32;
        let mut stack = vec![s];
        comp[s as usize] = id;
        let mut members = Vec::new();
        while let Some(v) = stack.pop() {
            members.push(v);
            for &u in &adj[v as usize] {
                if comp[u as usize] == u32::MAX {
                    comp[u as usize] = id;
                    stack.push(u);
                }
            }
        }
        comps.push(members);
    }

    let mut alpha = 0usize;
    let mut witness = Vec::new();
    let mut nodes = 0u64;
    for members in &comps {
        let mut bb = BranchBound::new(&adj, members, budget.saturating_sub(nodes));
        let mut trail = Vec::new();
        bb.search(&mut trail);
        nodes += bb.nodes;
        alpha += bb.best;
        witness.extend(bb.best_set.iter().map(|&v| back[v as usize]));
        if bb.exceeded {
            return Err(ExactError::BudgetExceeded { best: alpha, nodes });
        }
    }
    witness.sort_unstable();
    Ok(ExactResult {
        alpha,
        nodes_explored: nodes,
        witness,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graphgen::MultiGraph;

    fn cycle(n: usize) -> MultiGraph {
        let edges = (0..n).map(|i| (i as u32, ((i + 1) % n) as u32)).collect();
        MultiGraph::from_edges(n, edges)
    }

    fn petersen() -> MultiGraph {
        let mut edges = Vec::new();
        for i in 0..5u32 {
            edges.push((i, (i + 1) % 5));
            edges.push((i, i + 5));
            edges.push((5 + i, 5 + (i + 2) % 5));
        }
        MultiGraph::from_edges(10, edges)
    }

    #[test]
    fn odd_cycle_and_empty() {
        let r = exact_alpha(&cycle(5), 1 << 20).unwrap();
        assert_eq!(r.alpha, 2);
        let empty = MultiGraph::from_edges(7, vec![]);
        let r = exact_alpha(&empty, 1 << 20).unwrap();
        assert_eq!(r.alpha, 7);
        assert_eq!(r.witness.len(), 7);
    }

    #[test]
    fn petersen_alpha_four() {
        let g = petersen();
        let r = exact_alpha(&g, 1 << 20).unwrap();
        assert_eq!(r.alpha, 4);
        assert_eq!(brute_alpha(&g).unwrap(), 4);
        // Witness must be independent and of the right size.
        let in_set: std::collections::HashSet<u32> = r.witness.iter().copied().collect();
        assert_eq!(in_set.len(), 4);
        for &(u, v) in g.edges() {
            assert!(!(in_set.contains(&u) && in_set.contains(&v)));
        }
    }

    #[test]
    fn brute_examples() {
        let k4 = MultiGraph::from_edges(4, vec![(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]);
        assert_eq!(brute_alpha(&k4).unwrap(), 1);
        let p4 = MultiGraph::from_edges(4, vec![(0, 1), (1, 2), (2, 3)]);
        assert_eq!(brute_alpha(&p4).unwrap(), 2);
        let big = MultiGraph::from_edges(26, vec![]);
        assert_eq!(brute_alpha(&big).unwrap_err(), ExactError::TooLarge(26));
    }

    #[test]
    fn multigraph_reduction() {
        // Self-looped vertex is excluded; parallel edges act once.
        let g = MultiGraph::from_edges(3, vec![(0, 0), (1, 2), (1, 2)]);
        let r = exact_alpha(&g, 1 << 20).unwrap();
        assert_eq!(r.alpha, 1);
        assert_eq!(brute_alpha(&g).unwrap(), 1);
    }

    #[test]
    fn budget_exhaustion_reports() {
        let g = petersen();
        match exact_alpha(&g, 1) {
            Err(ExactError::BudgetExceeded { nodes, .. }) => assert!(nodes >= 1),
            other => panic!("expected budget exhaustion, got {other:?}"),
        }
    }
}
