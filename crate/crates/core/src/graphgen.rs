//! Configuration-model sampling and component statistics.
//!
//! Graphs are multigraphs: the half-edge matching can produce self-loops and
//! parallel edges, and degrees always count half-edges (a self-loop
//! contributes 2 to its endpoint). `condition_simple` rejection-samples until
//! the matching happens to be simple.

use std::collections::VecDeque;
use std::fmt::Write as _;

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::dist::DegreeDistribution;

#[derive(Debug, Error, PartialEq)]
pub enum GraphError {
    #[error("degree sum is odd ({0})")]
    OddDegreeSum(u64),
    #[error("no simple realization found in {0} attempts")]
    AttemptsExhausted(usize),
    #[error("bad edge list line {line}: {reason}")]
    BadEdgeList { line: usize, reason: String },
}

/// A degree sequence with even sum.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DegreeSequence {
    pub degrees: Vec<u32>,
}

impl DegreeSequence {
    /// Wrap a raw sequence, requiring an even degree sum.
    pub fn new(degrees: Vec<u32>) -> Result<Self, GraphError> {
        let sum: u64 = degrees.iter().map(|&d| u64::from(d)).sum();
        if sum % 2 == 1 {
            return Err(GraphError::OddDegreeSum(sum));
        }
        Ok(Self { degrees })
    }

    pub fn n(&self) -> usize {
        self.degrees.len()
    }

    /// Parse whitespace-separated non-negative integers.
    pub fn parse(text: &str) -> Result<Self, GraphError> {
        let mut degrees = Vec::new();
        for (i, tok) in text.split_whitespace().enumerate() {
            let d: u32 = tok.parse().map_err(|e| GraphError::BadEdgeList {
                line: i,
                reason: format!("{tok:?}: {e}"),
            })?;
            degrees.push(d);
        }
        Self::new(degrees)
    }
}

/// A configuration-model realization: a multigraph with explicit edge list
/// and CSR adjacency (one entry per half-edge, tagged with its edge id).
#[derive(Debug, Clone)]
pub struct MultiGraph {
    n: usize,
    edges: Vec<(u32, u32)>,
    degree: Vec<u32>,
    adj_off: Vec<usize>,
    adj: Vec<u32>,
    adj_edge: Vec<u32>,
}

impl MultiGraph {
    /// Build from an edge multiset; self-pairs allowed.
    pub fn from_edges(n: usize, edges: Vec<(u32, u32)>) -> Self {
        let mut degree = vec![0u32; n];
        for &(u, v) in &edges {
            degree[u as usize] += 1;
            degree[v as usize] += 1;
        }
        let mut adj_off = vec![0usize; n + 1];
        for v in 0..n {
            adj_off[v + 1] = adj_off[v] + degree[v] as usize;
        }
        let mut cursor = adj_off.clone();
        let mut adj = vec![0u32; adj_off[n]];
        let mut adj_edge = vec![0u32; adj_off[n]];
        for (eid, &(u, v)) in edges.iter().enumerate() {
            adj[cursor[u as usize]] = v;
            adj_edge[cursor[u as usize]] = eid as u32;
            cursor[u as usize] += 1;
            adj[cursor[v as usize]] = u;
            adj_edge[cursor[v as usize]] = eid as u32;
            cursor[v as usize] += 1;
        }
        Self {
            n,
            edges,
            degree,
            adj_off,
            adj,
            adj_edge,
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Total edge count `l_n` (self-loops count once).
    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[(u32, u32)] {
        &self.edges
    }

    /// Half-edge degree of `v` (a self-loop contributes 2).
    pub fn degree(&self, v: u32) -> u32 {
        self.degree[v as usize]
    }

    pub fn degrees(&self) -> &[u32] {
        &self.degree
    }

    /// Adjacency entries of `v`: one `(neighbor, edge id)` per half-edge.
    pub fn incident(&self, v: u32) -> impl Iterator<Item = (u32, u32)> + '_ {
        let r = self.adj_off[v as usize]..self.adj_off[v as usize + 1];
        r.map(move |i| (self.adj[i], self.adj_edge[i]))
    }

    /// Neighbor list of `v` (with multiplicity; contains `v` twice per loop).
    pub fn neighbors(&self, v: u32) -> &[u32] {
        &self.adj[self.adj_off[v as usize]..self.adj_off[v as usize + 1]]
    }

    pub fn has_self_loop(&self, v: u32) -> bool {
        self.neighbors(v).contains(&v)
    }

    pub fn is_simple(&self) -> bool {
        let mut seen = std::collections::HashSet::with_capacity(self.edges.len());
        for &(u, v) in &self.edges {
            if u == v || !seen.insert((u.min(v), u.max(v))) {
                return false;
            }
        }
        true
    }

    /// Edge-list text: one `u v` pair per line, 0-indexed, loops as `u u`.
    pub fn to_edge_list(&self) -> String {
        let mut out = String::with_capacity(self.edges.len() * 8);
        for &(u, v) in &self.edges {
            let _ = writeln!(out, "{u} {v}");
        }
        out
    }

    /// Parse the edge-list text format. The vertex count is one past the
    /// largest mentioned id, or `min_n` if larger.
    pub fn parse_edge_list(text: &str, min_n: usize) -> Result<Self, GraphError> {
        let mut edges = Vec::new();
        let mut n = min_n;
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let mut it = line.split_whitespace();
            let parse = |tok: Option<&str>| -> Result<u32, GraphError> {
                tok.ok_or_else(|| GraphError::BadEdgeList {
                    line: lineno + 1,
                    reason: "expected two vertex ids".into(),
                })?
                .parse()
                .map_err(|e| GraphError::BadEdgeList {
                    line: lineno + 1,
                    reason: format!("{e}"),
                })
            };
            let u = parse(it.next())?;
            let v = parse(it.next())?;
            n = n.max(u as usize + 1).max(v as usize + 1);
            edges.push((u, v));
        }
        Ok(Self::from_edges(n, edges))
    }
}

/// Draw `n` i.i.d. degrees from `dist` by inverse CDF. An odd sum is fixed by
/// incrementing the degree of one uniformly chosen vertex.
pub fn sample_degrees(dist: &DegreeDistribution, n: usize, rng: &mut ChaCha8Rng) -> DegreeSequence {
    let cdf = dist.cdf();
    let total = *cdf.last().expect("nonempty distribution");
    let mut degrees = Vec::with_capacity(n);
    let mut sum = 0u64;
    for _ in 0..n {
        let u: f64 = rng.gen::<f64>() * total;
        let k = cdf.partition_point(|&c| c < u).min(cdf.len() - 1);
        degrees.push(k as u32);
        sum += k as u64;
    }
    if sum % 2 == 1 {
        let i = rng.gen_range(0..n);
        degrees[i] += 1;
    }
    DegreeSequence { degrees }
}

/// Uniform half-edge matching: assign `d_v` stubs per vertex, shuffle the
/// stub list, and pair consecutive entries.
pub fn sample_cm(degrees: &DegreeSequence, rng: &mut ChaCha8Rng) -> Result<MultiGraph, GraphError> {
    let sum: u64 = degrees.degrees.iter().map(|&d| u64::from(d)).sum();
    if sum % 2 == 1 {
        return Err(GraphError::OddDegreeSum(sum));
    }
    let mut stubs: Vec<u32> = Vec::with_capacity(sum as usize);
    for (v, &d) in degrees.degrees.iter().enumerate() {
        for _ in 0..d {
            stubs.push(v as u32);
        }
    }
    stubs.shuffle(rng);
    let edges: Vec<(u32, u32)> = stubs
        .chunks_exact(2)
        .map(|pair| (pair[0], pair[1]))
        .collect();
    Ok(MultiGraph::from_edges(degrees.n(), edges))
}

/// Rejection-sample `sample_cm` until the realization is simple.
pub fn condition_simple(
    degrees: &DegreeSequence,
    rng: &mut ChaCha8Rng,
    max_attempts: usize,
) -> Result<MultiGraph, GraphError> {
    for _ in 0..max_attempts {
        let g = sample_cm(degrees, rng)?;
        if g.is_simple() {
            return Ok(g);
        }
    }
    Err(GraphError::AttemptsExhausted(max_attempts))
}

/// Per-component exploration statistics.
#[derive(Debug, Clone, PartialEq)]
pub struct ComponentStats {
    pub component_sizes: Vec<usize>,
    pub component_edges: Vec<usize>,
    /// Number of times the breadth-first exploration of each component landed
    /// on an already-visited vertex (self-loops and parallel edges count).
    pub revisit_counts: Vec<usize>,
    /// Total vertices living in components that are not trees.
    pub bad_vertices: usize,
    pub largest_component: usize,
}

/// Breadth-first exploration of every component, counting the edges whose
/// traversal rejoins the already-explored set.
pub fn component_stats(g: &MultiGraph) -> ComponentStats {
    let n = g.n();
    let mut visited = vec![false; n];
    let mut edge_seen = vec![false; g.num_edges()];
    let mut queue = VecDeque::new();

    let mut component_sizes = Vec::new();
    let mut component_edges = Vec::new();
    let mut revisit_counts = Vec::new();
    let mut bad_vertices = 0usize;
    let mut largest = 0usize;

    for start in 0..n as u32 {
        if visited[start as usize] {
            continue;
        }
        visited[start as usize] = true;
        queue.push_back(start);
        let mut size = 0usize;
        let mut edges = 0usize;
        let mut revisits = 0usize;
        while let Some(u) = queue.pop_front() {
            size += 1;
            for (x, eid) in g.incident(u) {
                if edge_seen[eid as usize] {
                    continue;
                }
                edge_seen[eid as usize] = true;
                edges += 1;
                if visited[x as usize] {
                    revisits += 1;
                } else {
                    visited[x as usize] = true;
                    queue.push_back(x);
                }
            }
        }
        debug_assert_eq!(revisits, edges + 1 - size, "cycle space dimension mismatch");
        if revisits > 0 {
            bad_vertices += size;
        }
        largest = largest.max(size);
        component_sizes.push(size);
        component_edges.push(edges);
        revisit_counts.push(revisits);
    }

    ComponentStats {
        component_sizes,
        component_edges,
        revisit_counts,
        bad_vertices,
        largest_component: largest,
    }
}

/// Uniform random labeled tree on `n` vertices via a Pruefer sequence.
/// Used by verification sweeps that need exact tree instances.
pub fn random_tree(n: usize, rng: &mut ChaCha8Rng) -> MultiGraph {
    if n == 0 {
        return MultiGraph::from_edges(0, vec![]);
    }
    if n == 1 {
        return MultiGraph::from_edges(1, vec![]);
    }
    let code: Vec<u32> = (0..n.saturating_sub(2))
        .map(|_| rng.gen_range(0..n as u32))
        .collect();
    let mut deg = vec![1u32; n];
    for &c in &code {
        deg[c as usize] += 1;
    }
    let mut edges = Vec::with_capacity(n - 1);
    // Min-heap of current leaves.
    let mut heap: std::collections::BinaryHeap<std::cmp::Reverse<u32>> = (0..n as u32)
        .filter(|&v| deg[v as usize] == 1)
        .map(std::cmp::Reverse)
        .collect();
    for &c in &code {
        let std::cmp::Reverse(leaf) = heap.pop().expect("pruefer decode invariant");
        edges.push((leaf, c));
        deg[leaf as usize] -= 1;
        deg[c as usize] -= 1;
        if deg[c as usize] == 1 {
            heap.push(std::cmp::Reverse(c));
        }
    }
    let std::cmp::Reverse(a) = heap.pop().unwrap();
    let std::cmp::Reverse(b) = heap.pop().unwrap();
    edges.push((a, b));
    MultiGraph::from_edges(n, edges)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::stream;

    #[test]
    fn point_mass_degrees() {
        let d = DegreeDistribution::point(3);
        let seq = sample_degrees(&d, 4, &mut stream(1, "deg", 0));
        assert_eq!(seq.degrees, vec![3, 3, 3, 3]);
    }

    #[test]
    fn parity_fix_bumps_one_vertex() {
        let d = DegreeDistribution::point(1);
        let seq = sample_degrees(&d, 5, &mut stream(1, "deg", 1));
        let sum: u32 = seq.degrees.iter().sum();
        assert_eq!(sum, 6);
        assert_eq!(seq.degrees.iter().filter(|&&x| x == 2).count(), 1);
    }

    #[test]
    fn single_edge_and_self_loop() {
        let mut rng = stream(1, "cm", 0);
        let g = sample_cm(&DegreeSequence::new(vec![1, 1]).unwrap(), &mut rng).unwrap();
        assert_eq!(g.num_edges(), 1);
        let (u, v) = g.edges()[0];
        assert_eq!((u.min(v), u.max(v)), (0, 1));

        let g = sample_cm(&DegreeSequence::new(vec![2]).unwrap(), &mut rng).unwrap();
        assert_eq!(g.edges(), &[(0, 0)]);
        assert_eq!(g.degree(0), 2);
        assert!(g.has_self_loop(0));
    }

    #[test]
    fn degrees_are_realized_exactly() {
        let d = DegreeDistribution::poisson(1.0).unwrap();
        let mut rng = stream(1, "cm", 7);
        let seq = sample_degrees(&d, 500, &mut rng);
        let g = sample_cm(&seq, &mut rng).unwrap();
        assert_eq!(g.degrees(), &seq.degrees[..]);
        let sum: u64 = g.degrees().iter().map(|&x| u64::from(x)).sum();
        assert_eq!(sum, 2 * g.num_edges() as u64);
    }

    #[test]
    fn simple_conditioning() {
        let mut rng = stream(1, "simple", 0);
        let g = condition_simple(&DegreeSequence::new(vec![1, 1]).unwrap(), &mut rng, 10).unwrap();
        assert!(g.is_simple());

        // A lone degree-2 vertex can only realize as a self-loop.
        let err = condition_simple(&DegreeSequence::new(vec![2]).unwrap(), &mut rng, 25);
        assert_eq!(err.unwrap_err(), GraphError::AttemptsExhausted(25));
    }

    #[test]
    fn component_stats_triangle_and_path() {
        let triangle = MultiGraph::from_edges(3, vec![(0, 1), (1, 2), (2, 0)]);
        let s = component_stats(&triangle);
        assert_eq!(s.revisit_counts, vec![1]);
        assert_eq!(s.bad_vertices, 3);
        assert_eq!(s.largest_component, 3);

        let path = MultiGraph::from_edges(3, vec![(0, 1), (1, 2)]);
        let s = component_stats(&path);
        assert_eq!(s.revisit_counts, vec![0]);
        assert_eq!(s.bad_vertices, 0);
    }

    #[test]
    fn component_stats_counts_loops_and_multi_edges() {
        // Self-loop plus a parallel pair: both revisit once.
        let g = MultiGraph::from_edges(3, vec![(0, 0), (1, 2), (1, 2)]);
        let s = component_stats(&g);
        assert_eq!(s.component_sizes.len(), 2);
        assert_eq!(s.bad_vertices, 3);
        let total_revisits: usize = s.revisit_counts.iter().sum();
        assert_eq!(total_revisits, 2);
    }

    #[test]
    fn pruefer_trees_are_trees() {
        let mut rng = stream(1, "tree", 0);
        for n in [1usize, 2, 3, 17, 100] {
            let t = random_tree(n, &mut rng);
            assert_eq!(t.num_edges(), n.saturating_sub(1));
            let s = component_stats(&t);
            assert_eq!(s.component_sizes.len(), 1.min(n));
            assert_eq!(s.bad_vertices, 0);
        }
    }

    #[test]
    fn edge_list_round_trip() {
        let g = MultiGraph::from_edges(4, vec![(0, 1), (2, 2), (1, 3)]);
        let text = g.to_edge_list();
        assert_eq!(text, "0 1\n2 2\n1 3\n");
        let h = MultiGraph::parse_edge_list(&text, 0).unwrap();
        assert_eq!(h.edges(), g.edges());
        assert_eq!(h.n(), 4);
    }
}
