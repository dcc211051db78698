//! Sequential exploration engines.
//!
//! Both policies run the same loop: pick an unexplored vertex, activate it,
//! block its unexplored neighbours, drop all of them from the remaining
//! graph. The active set is a maximal independent set once no unexplored
//! vertex is left. `degree_greedy` picks uniformly among the current
//! minimum-degree vertices (bucketed by remaining degree, with lazy entries);
//! `uniform_greedy` picks uniformly among all remaining vertices.
//!
//! Multigraph conventions: remaining degrees count half-edges, parallel edges
//! block as a single adjacency, and self-looped vertices are never selected —
//! they are blocked when a neighbour activates, or swept up at the end.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graphgen::MultiGraph;

#[derive(Debug, Error, PartialEq)]
pub enum ExploreError {
    #[error("vertex {vertex} out of range (n = {n})")]
    VertexOutOfRange { vertex: u32, n: usize },
    #[error("step {step}: vertex {vertex} was already explored when selected")]
    InvalidSequence { step: usize, vertex: u32 },
}

/// The ordered activated vertices, with each one's remaining degree at
/// selection time.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SelectionSequence {
    pub vertices: Vec<u32>,
    pub selected_degrees: Vec<u32>,
}

/// Outcome of one exploration run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExplorationResult {
    pub sequence: SelectionSequence,
    /// Independent-set size (= sequence length).
    pub sigma: usize,
    /// Steps whose selected vertex still had remaining degree >= 2.
    pub t1_violations: usize,
    pub first_violation_step: Option<usize>,
    /// Empirical branching parameter of the remaining graph at the first
    /// degree->=2 selection.
    pub remaining_nu_at_first_violation: Option<f64>,
}

/// Replay verdict for a selection sequence.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SequenceCheck {
    pub independent: bool,
    pub maximal: bool,
    pub t1: bool,
}

const UNEXPLORED: u8 = 0;
const ACTIVE: u8 = 1;
const BLOCKED: u8 = 2;

/// Shared removal step: activate `v`, block its unexplored neighbours, and
/// decrement surviving degrees. `touched` collects survivors whose degree
/// changed (deduplicated via `stamp`), `blocked` the newly blocked vertices.
struct Remover {
    status: Vec<u8>,
    cur_deg: Vec<u32>,
    s1: u64,
    s2: u64,
    stamp: Vec<u32>,
    old_deg: Vec<u32>,
    step: u32,
    blocked: Vec<u32>,
    touched: Vec<u32>,
}

impl Remover {
    fn new(g: &MultiGraph) -> Self {
        let cur_deg = g.degrees().to_vec();
        let mut s1 = 0u64;
        let mut s2 = 0u64;
        for &d in &cur_deg {
            s1 += u64::from(d);
            s2 += u64::from(d) * u64::from(d);
        }
        Self {
            status: vec![UNEXPLORED; g.n()],
            cur_deg,
            s1,
            s2,
            stamp: vec![u32::MAX; g.n()],
            old_deg: vec![0; g.n()],
            step: 0,
            blocked: Vec::new(),
            touched: Vec::new(),
        }
    }

    /// Branching parameter of the remaining graph, `(S2 - S1) / S1`.
    fn remaining_nu(&self) -> f64 {
        if self.s1 == 0 {
            0.0
        } else {
            (self.s2 - self.s1) as f64 / self.s1 as f64
        }
    }

    fn drop_from_sums(&mut self, v: u32) {
        let d = u64::from(self.cur_deg[v as usize]);
        self.s1 -= d;
        self.s2 -= d * d;
    }

    fn select(&mut self, g: &MultiGraph, v: u32) {
        self.step += 1;
        self.blocked.clear();
        self.touched.clear();

        self.status[v as usize] = ACTIVE;
        self.drop_from_sums(v);
        for &u in g.neighbors(v) {
            if self.status[u as usize] == UNEXPLORED {
                self.status[u as usize] = BLOCKED;
                self.drop_from_sums(u);
                self.blocked.push(u);
            }
        }
        for i in 0..=self.blocked.len() {
            let w = if i == 0 { v } else { self.blocked[i - 1] };
            for &x in g.neighbors(w) {
                if self.status[x as usize] != UNEXPLORED {
                    continue;
                }
                if self.stamp[x as usize] != self.step {
                    self.stamp[x as usize] = self.step;
                    self.old_deg[x as usize] = self.cur_deg[x as usize];
                    self.touched.push(x);
                }
                self.cur_deg[x as usize] -= 1;
            }
        }
        for &x in &self.touched {
            let old = u64::from(self.old_deg[x as usize]);
            let new = u64::from(self.cur_deg[x as usize]);
            self.s1 -= old - new;
            self.s2 -= old * old - new * new;
        }
    }
}

fn finish(
    sequence: SelectionSequence,
    t1_violations: usize,
    first_violation_step: Option<usize>,
    remaining_nu: Option<f64>,
) -> ExplorationResult {
    ExplorationResult {
        sigma: sequence.vertices.len(),
        sequence,
        t1_violations,
        first_violation_step,
        remaining_nu_at_first_violation: remaining_nu,
    }
}

/// Degree-greedy exploration: activate a uniform minimum-remaining-degree
/// vertex each step.
pub fn degree_greedy(g: &MultiGraph, rng: &mut ChaCha8Rng) -> ExplorationResult {
    let n = g.n();
    let mut rem = Remover::new(g);
    let eligible: Vec<bool> = (0..n as u32).map(|v| !g.has_self_loop(v)).collect();

    let max_deg = g.degrees().iter().copied().max().unwrap_or(0) as usize;
    let mut buckets: Vec<Vec<u32>> = vec![Vec::new(); max_deg + 1];
    for v in 0..n as u32 {
        if eligible[v as usize] {
            buckets[g.degree(v) as usize].push(v);
        }
    }
    let mut min_d = 0usize;

    let mut vertices = Vec::new();
    let mut degrees = Vec::new();
    let mut t1_violations = 0usize;
    let mut first_violation = None;
    let mut nu_at_violation = None;

    loop {
        let mut picked = None;
        while min_d < buckets.len() {
            if buckets[min_d].is_empty() {
                min_d += 1;
                continue;
            }
            let i = rng.gen_range(0..buckets[min_d].len());
            let cand = buckets[min_d][i];
            if rem.status[cand as usize] != UNEXPLORED
                || rem.cur_deg[cand as usize] as usize != min_d
            {
                buckets[min_d].swap_remove(i);
                continue;
            }
            buckets[min_d].swap_remove(i);
            picked = Some(cand);
            break;
        }
        let Some(v) = picked else { break };

        let d = rem.cur_deg[v as usize];
        if d >= 2 {
            if first_violation.is_none() {
                first_violation = Some(vertices.len());
                nu_at_violation = Some(rem.remaining_nu());
            }
            t1_violations += 1;
        }
        vertices.push(v);
        degrees.push(d);
        rem.select(g, v);
        for i in 0..rem.touched.len() {
            let x = rem.touched[i];
            if eligible[x as usize] {
                let nd = rem.cur_deg[x as usize] as usize;
                buckets[nd].push(x);
                if nd < min_d {
                    min_d = nd;
                }
            }
        }
    }

    // Only ineligible (self-looped) vertices can remain; they can never join
    // an independent set, so sweep them into the blocked side.
    for v in 0..n {
        if rem.status[v] == UNEXPLORED {
            rem.status[v] = BLOCKED;
        }
    }

    finish(
        SelectionSequence {
            vertices,
            selected_degrees: degrees,
        },
        t1_violations,
        first_violation,
        nu_at_violation,
    )
}

/// Uniform greedy exploration: activate a uniform unexplored vertex each step.
pub fn uniform_greedy(g: &MultiGraph, rng: &mut ChaCha8Rng) -> ExplorationResult {
    let n = g.n();
    let mut rem = Remover::new(g);

    let mut remaining: Vec<u32> = Vec::with_capacity(n);
    let mut pos: Vec<u32> = vec![u32::MAX; n];
    for v in 0..n as u32 {
        if !g.has_self_loop(v) {
            pos[v as usize] = remaining.len() as u32;
            remaining.push(v);
        }
    }
    let drop = |list: &mut Vec<u32>, pos: &mut Vec<u32>, x: u32| {
        let p = pos[x as usize];
        if p == u32::MAX {
            return;
        }
        let last = *list.last().unwrap();
        list[p as usize] = last;
        pos[last as usize] = p;
        list.pop();
        pos[x as usize] = u32::MAX;
    };

    let mut vertices = Vec::new();
    let mut degrees = Vec::new();
    let mut t1_violations = 0usize;
    let mut first_violation = None;
    let mut nu_at_violation = None;

    while !remaining.is_empty() {
        let v = remaining[rng.gen_range(0..remaining.len())];
        let d = rem.cur_deg[v as usize];
        if d >= 2 {
            if first_violation.is_none() {
                first_violation = Some(vertices.len());
                nu_at_violation = Some(rem.remaining_nu());
            }
            t1_violations += 1;
        }
        vertices.push(v);
        degrees.push(d);
        rem.select(g, v);
        drop(&mut remaining, &mut pos, v);
        for i in 0..rem.blocked.len() {
            let b = rem.blocked[i];
            drop(&mut remaining, &mut pos, b);
        }
    }

    finish(
        SelectionSequence {
            vertices,
            selected_degrees: degrees,
        },
        t1_violations,
        first_violation,
        nu_at_violation,
    )
}

/// Replay a selection sequence against `g`, checking independence, maximality
/// and the T1 property from recomputed remaining-graph degrees.
///
/// Errors if a listed vertex is out of range or was already explored when
/// selected. Self-looped vertices count as covered for maximality (they are
/// adjacent to themselves and can never extend an independent set).
pub fn verify_selection_sequence(
    g: &MultiGraph,
    w: &SelectionSequence,
) -> Result<SequenceCheck, ExploreError> {
    let n = g.n();
    for &v in &w.vertices {
        if v as usize >= n {
            return Err(ExploreError::VertexOutOfRange { vertex: v, n });
        }
    }

    let mut rem = Remover::new(g);
    let mut t1 = true;
    for (step, &v) in w.vertices.iter().enumerate() {
        if rem.status[v as usize] != UNEXPLORED {
            return Err(ExploreError::InvalidSequence { step, vertex: v });
        }
        if rem.cur_deg[v as usize] >= 2 {
            t1 = false;
        }
        rem.select(g, v);
    }

    let mut in_set = vec![false; n];
    for &v in &w.vertices {
        in_set[v as usize] = true;
    }
    let mut independent = true;
    'outer: for &v in &w.vertices {
        for &u in g.neighbors(v) {
            if in_set[u as usize] {
                independent = false;
                break 'outer;
            }
        }
    }
    let maximal = (0..n as u32).all(|v| rem.status[v as usize] != UNEXPLORED || g.has_self_loop(v));

    Ok(SequenceCheck {
        independent,
        maximal,
        t1,
    })
}
