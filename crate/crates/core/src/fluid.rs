//! Two-phase matching dynamics and their hydrodynamic limits.
//!
//! Phase 1 matches the half-edges of the initial degree-1 cohort: each of the
//! `A_t` pending leaves carries an exponential clock of rate `U_t / A_t`
//! (so events arrive at total rate `U_t`, the number of unpaired
//! half-edges); the ringing leaf is activated and its half-edge pairs with a
//! uniform free half-edge, blocking the vertex it lands on. Phase 2 then
//! resolves the `B` free half-edges left on blocked vertices the same way,
//! which only strips degrees off unexplored vertices.
//!
//! Scaled by `n`, the processes converge to the closed forms
//!
//! ```text
//! phase 1:  u_t = lambda e^{-2t},   a_t = lambda e^{-2t} - (lambda - p1) e^{-t}
//! phase 2:  u_t = Q^2 lambda e^{-2t},  b_t = Q^2 lambda e^{-2t} - e^{-t} sum_{i>=2} i Q^i p_i
//! ```
//!
//! with stopping times `T1 = -ln Q` (the root of `a`, so `e^{-T1} = Q` and
//! `u_{T1} = Q^2 lambda`) and `T2 = -ln Q~`. Phase-2 degree counts follow the
//! pure-death system `mu'(k) = -k mu(k) + (k+1) mu(k+1)` whose solution is
//! binomial thinning with retention `e^{-t}`; [`ode_oracle`] integrates that
//! system directly with RK4 as an independent check.

use std::collections::BTreeMap;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dist::DegreeDistribution;
use crate::graphgen::{DegreeSequence, MultiGraph};
use crate::spectra::thin_masses;

#[derive(Debug, Error, PartialEq)]
pub enum FluidError {
    #[error("invalid inputs: {0}")]
    InvalidInputs(String),
}

/// Closed-form hydrodynamic curves for both phases.
#[derive(Debug, Clone)]
pub struct FluidCurves {
    pub lambda: f64,
    pub p1: f64,
    pub q: f64,
    pub q_tilde: f64,
    /// Phase-1 stopping time `-ln Q` (infinite when Q = 0).
    pub t1: f64,
    /// Phase-2 stopping time `-ln Q~` (infinite when Q~ = 0).
    pub t2: f64,
    /// `sum_{i>=2} i Q^i p_i`, the initial sized survivor mass.
    lam_tilde: f64,
    /// Phase-2 initial masses `Q^k p_k 1{k>=2}`.
    survivors: Vec<f64>,
}

impl FluidCurves {
    /// Phase-1 unpaired half-edges per vertex.
    pub fn u_phase1(&self, t: f64) -> f64 {
        self.lambda * (-2.0 * t).exp()
    }

    /// Phase-1 pending leaves per vertex.
    pub fn a(&self, t: f64) -> f64 {
        self.lambda * (-2.0 * t).exp() - (self.lambda - self.p1) * (-t).exp()
    }

    /// Phase-2 unpaired half-edges per vertex (phase-2 clock starts at 0).
    pub fn u_phase2(&self, t: f64) -> f64 {
        self.q * self.q * self.lambda * (-2.0 * t).exp()
    }

    /// Phase-2 free blocked half-edges per vertex.
    pub fn b(&self, t: f64) -> f64 {
        self.q * self.q * self.lambda * (-2.0 * t).exp() - self.lam_tilde * (-t).exp()
    }

    /// Phase-2 unexplored degree-k masses at time `t` (binomial thinning of
    /// the survivors with retention `e^{-t}`).
    pub fn mu_all(&self, t: f64) -> Vec<f64> {
        thin_masses(&self.survivors, (-t).exp())
    }

    pub fn mu(&self, t: f64, k: usize) -> f64 {
        self.mu_all(t).get(k).copied().unwrap_or(0.0)
    }

    /// Phase-2 initial masses `Q^k p_k` for `k >= 2`.
    pub fn survivors(&self) -> &[f64] {
        &self.survivors
    }
}

/// Build the closed-form curve bundle for a distribution with the given
/// mean degree and degree-1 mass.
pub fn fluid_curves(
    lambda: f64,
    p1: f64,
    dist: &DegreeDistribution,
) -> Result<FluidCurves, FluidError> {
    if lambda.is_nan() || lambda <= 0.0 || !lambda.is_finite() {
        return Err(FluidError::InvalidInputs(format!("lambda = {lambda}")));
    }
    if p1.is_nan() || p1 <= 0.0 || p1 > lambda {
        return Err(FluidError::InvalidInputs(format!(
            "p1 = {p1} must satisfy 0 < p1 <= lambda = {lambda}"
        )));
    }
    let q = (1.0 - p1 / lambda).max(0.0);
    let mut survivors = vec![0.0; dist.truncation() + 1];
    let mut lam_tilde = 0.0;
    let mut qpow = q * q;
    for (k, slot) in survivors.iter_mut().enumerate().skip(2) {
        *slot = qpow * dist.mass(k);
        lam_tilde += k as f64 * *slot;
        qpow *= q;
    }
    let q_tilde = if q > 0.0 {
        lam_tilde / (q * q * lambda)
    } else {
        0.0
    };
    let t1 = if q > 0.0 { -q.ln() } else { f64::INFINITY };
    let t2 = if q_tilde > 0.0 {
        -q_tilde.ln()
    } else {
        f64::INFINITY
    };
    Ok(FluidCurves {
        lambda,
        p1,
        q,
        q_tilde,
        t1,
        t2,
        lam_tilde,
        survivors,
    })
}

/// Time-stamped samples of one simulated phase, scaled by the population `n`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PhaseTrajectory {
    pub times: Vec<f64>,
    /// Unpaired half-edges / n.
    pub u: Vec<f64>,
    /// A_t / n in phase 1, B_t / n in phase 2.
    pub secondary: Vec<f64>,
    /// Phase 2 only: per-degree unexplored masses mu_t(k)/n per sample.
    pub mu: Vec<Vec<f64>>,
    pub n: usize,
    pub seed: u64,
}

impl PhaseTrajectory {
    fn empty(n: usize) -> Self {
        Self {
            times: vec![],
            u: vec![],
            secondary: vec![],
            mu: vec![],
            n,
            seed: 0,
        }
    }
}

const ST_UNEXPLORED: u8 = 0;
const ST_ACTIVE: u8 = 1;
const ST_BLOCKED: u8 = 2;

/// O(1) sampled set over a fixed universe of ids.
#[derive(Debug, Clone)]
struct IndexedSet {
    items: Vec<u32>,
    pos: Vec<u32>,
}

impl IndexedSet {
    fn new(universe: usize) -> Self {
        Self {
            items: Vec::new(),
            pos: vec![u32::MAX; universe],
        }
    }

    fn insert(&mut self, id: u32) {
        debug_assert_eq!(self.pos[id as usize], u32::MAX);
        self.pos[id as usize] = self.items.len() as u32;
        self.items.push(id);
    }

    fn remove(&mut self, id: u32) {
        let p = self.pos[id as usize];
        debug_assert_ne!(p, u32::MAX);
        let last = *self.items.last().unwrap();
        self.items[p as usize] = last;
        self.pos[last as usize] = p;
        self.items.pop();
        self.pos[id as usize] = u32::MAX;
    }

    fn contains(&self, id: u32) -> bool {
        self.pos[id as usize] != u32::MAX
    }

    fn len(&self) -> usize {
        self.items.len()
    }

    fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    fn sample(&self, rng: &mut ChaCha8Rng) -> u32 {
        self.items[rng.gen_range(0..self.items.len())]
    }
}

/// End-of-phase-1 population handed to [`simulate_phase2`].
#[derive(Debug, Clone)]
pub struct PhaseTwoState {
    owner: Vec<u32>,
    status: Vec<u8>,
    free_all: IndexedSet,
    free_blocked: IndexedSet,
    /// Current free-half-edge count per unexplored vertex.
    cur_deg: Vec<u32>,
    /// Unexplored vertex counts by current degree.
    mu: Vec<usize>,
    n: usize,
}

impl PhaseTwoState {
    /// Free blocked half-edges (`B`).
    pub fn blocked_half_edges(&self) -> usize {
        self.free_blocked.len()
    }

    /// Unpaired half-edges (`U`).
    pub fn unpaired_half_edges(&self) -> usize {
        self.free_all.len()
    }

    /// Unexplored vertex counts by current degree.
    pub fn mu_counts(&self) -> &[usize] {
        &self.mu
    }
}

/// Result of a phase-1 run.
#[derive(Debug, Clone)]
pub struct Phase1Run {
    pub trajectory: PhaseTrajectory,
    /// Empirical stopping time: the event that emptied A.
    pub t1: f64,
    /// Set when the free pool ran dry before A did (tiny populations).
    pub flagged: bool,
    /// Leaves activated during the phase.
    pub selected: usize,
    /// Degree-0 vertices set aside (and selected) at t = 0.
    pub degree_zero: usize,
    pub state: PhaseTwoState,
}

/// Result of a phase-2 run.
#[derive(Debug, Clone)]
pub struct Phase2Run {
    pub trajectory: PhaseTrajectory,
    pub t2: f64,
    pub flagged: bool,
    /// Final unexplored vertex counts by degree.
    pub final_mu: Vec<usize>,
}

fn exp_holding(rate: f64, rng: &mut ChaCha8Rng) -> f64 {
    -(1.0 - rng.gen::<f64>()).ln() / rate
}

/// Event-driven simulation of phase 1 on a sampled degree sequence.
///
/// The matching is built on the fly (the configuration model is insensitive
/// to pairing order), so the input is a degree sequence, not a graph.
pub fn simulate_phase1(
    degrees: &DegreeSequence,
    rng: &mut ChaCha8Rng,
    sample_dt: f64,
) -> Result<Phase1Run, FluidError> {
    let n = degrees.n();
    let total: u64 = degrees.degrees.iter().map(|&d| u64::from(d)).sum();
    if total % 2 == 1 {
        return Err(FluidError::InvalidInputs(format!("odd degree sum {total}")));
    }
    if sample_dt.is_nan() || sample_dt <= 0.0 {
        return Err(FluidError::InvalidInputs(format!(
            "sample_dt = {sample_dt}"
        )));
    }
    let p1_count = degrees.degrees.iter().filter(|&&d| d == 1).count();
    if p1_count == 0 {
        return Err(FluidError::InvalidInputs(
            "no degree-1 vertices to match".into(),
        ));
    }

    // Half-edge ids are contiguous per vertex.
    let mut hid_start = vec![0usize; n + 1];
    for v in 0..n {
        hid_start[v + 1] = hid_start[v] + degrees.degrees[v] as usize;
    }
    let mut owner = vec![0u32; total as usize];
    let mut free_all = IndexedSet::new(total as usize);
    for v in 0..n {
        for (h, slot) in owner
            .iter_mut()
            .enumerate()
            .take(hid_start[v + 1])
            .skip(hid_start[v])
        {
            *slot = v as u32;
            free_all.insert(h as u32);
        }
    }
    let free_blocked = IndexedSet::new(total as usize);
    let mut status = vec![ST_UNEXPLORED; n];
    let mut a_set = IndexedSet::new(n);
    let max_deg = degrees.degrees.iter().copied().max().unwrap_or(0) as usize;
    let mut mu = vec![0usize; max_deg + 1];
    let mut degree_zero = 0usize;
    for (v, (&d, st)) in degrees.degrees.iter().zip(status.iter_mut()).enumerate() {
        match d {
            0 => {
                // Selected immediately; no half-edges to resolve.
                *st = ST_ACTIVE;
                degree_zero += 1;
            }
            1 => a_set.insert(v as u32),
            d => mu[d as usize] += 1,
        }
    }

    let mut state = PhaseTwoState {
        owner,
        status,
        free_all,
        free_blocked,
        cur_deg: degrees.degrees.clone(),
        mu,
        n,
    };

    let nf = n as f64;
    let mut traj = PhaseTrajectory::empty(n);
    let mut t = 0.0f64;
    let mut next_sample = 0.0f64;
    let mut selected = 0usize;
    let mut flagged = false;

    while !a_set.is_empty() {
        let u_count = state.free_all.len();
        let a_count = a_set.len();
        if u_count < 2 {
            flagged = true;
            break;
        }
        let t_next = t + exp_holding(u_count as f64, rng);
        while next_sample < t_next {
            traj.times.push(next_sample);
            traj.u.push(u_count as f64 / nf);
            traj.secondary.push(a_set.len() as f64 / nf);
            next_sample += sample_dt;
        }
        t = t_next;

        // The ringing leaf is activated; its single half-edge pairs off.
        let v1 = a_set.sample(rng);
        a_set.remove(v1);
        state.status[v1 as usize] = ST_ACTIVE;
        selected += 1;
        let hid1 = hid_start[v1 as usize] as u32;
        debug_assert!(state.free_all.contains(hid1));
        state.free_all.remove(hid1);
        state.cur_deg[v1 as usize] = 0;

        let hid2 = state.free_all.sample(rng);
        state.free_all.remove(hid2);
        let v2 = state.owner[hid2 as usize];
        if state.free_blocked.contains(hid2) {
            // Landed on a half-edge of an already blocked vertex.
            state.free_blocked.remove(hid2);
        } else {
            debug_assert_eq!(state.status[v2 as usize], ST_UNEXPLORED);
            state.status[v2 as usize] = ST_BLOCKED;
            let d = state.cur_deg[v2 as usize] as usize;
            if d == 1 {
                a_set.remove(v2);
            } else {
                state.mu[d] -= 1;
                // Its remaining free half-edges become blocked half-edges.
                for h in hid_start[v2 as usize]..hid_start[v2 as usize + 1] {
                    if h as u32 != hid2 && state.free_all.contains(h as u32) {
                        state.free_blocked.insert(h as u32);
                    }
                }
            }
        }
        debug_assert!(
            state.free_all.len() + 2 == u_count,
            "each event must consume exactly two half-edges"
        );
        let a_drop = a_count - a_set.len();
        debug_assert!(
            a_drop == 1 || a_drop == 2,
            "pending leaves drop by 1 or 2 per event"
        );
    }

    Ok(Phase1Run {
        trajectory: traj,
        t1: t,
        flagged,
        selected,
        degree_zero,
        state,
    })
}

/// Event-driven simulation of phase 2 from an end-of-phase-1 population.
/// Stops when no free blocked half-edge remains; the phase-2 clock restarts
/// at 0.
pub fn simulate_phase2(
    mut state: PhaseTwoState,
    rng: &mut ChaCha8Rng,
    sample_dt: f64,
) -> Phase2Run {
    let n = state.n;
    let nf = n as f64;
    let mut traj = PhaseTrajectory::empty(n);
    let mut t = 0.0f64;
    let mut next_sample = 0.0f64;
    let mut flagged = false;

    while !state.free_blocked.is_empty() {
        let u_count = state.free_all.len();
        if u_count < 2 {
            flagged = true;
            break;
        }
        let t_next = t + exp_holding(u_count as f64, rng);
        while next_sample < t_next {
            traj.times.push(next_sample);
            traj.u.push(u_count as f64 / nf);
            traj.secondary.push(state.free_blocked.len() as f64 / nf);
            traj.mu
                .push(state.mu.iter().map(|&c| c as f64 / nf).collect());
            next_sample += sample_dt;
        }
        t = t_next;

        let hid1 = state.free_blocked.sample(rng);
        state.free_blocked.remove(hid1);
        state.free_all.remove(hid1);

        let hid2 = state.free_all.sample(rng);
        state.free_all.remove(hid2);
        if state.free_blocked.contains(hid2) {
            state.free_blocked.remove(hid2);
        } else {
            // The formed edge is stripped off an unexplored vertex.
            let v2 = state.owner[hid2 as usize];
            debug_assert_eq!(state.status[v2 as usize], ST_UNEXPLORED);
            let d = state.cur_deg[v2 as usize] as usize;
            state.mu[d] -= 1;
            state.mu[d - 1] += 1;
            state.cur_deg[v2 as usize] -= 1;
        }
    }

    Phase2Run {
        trajectory: traj,
        t2: t,
        flagged,
        final_mu: state.mu,
    }
}

/// Fraction of degree-i vertices (i >= 2) with no degree-1 neighbour,
/// measured directly on a sampled graph.
pub fn untouched_fractions(g: &MultiGraph) -> BTreeMap<u32, f64> {
    let mut counts: BTreeMap<u32, (usize, usize)> = BTreeMap::new();
    for v in 0..g.n() as u32 {
        let d = g.degree(v);
        if d < 2 {
            continue;
        }
        let touched = g.neighbors(v).iter().any(|&x| g.degree(x) == 1);
        let entry = counts.entry(d).or_insert((0, 0));
        entry.0 += 1;
        if !touched {
            entry.1 += 1;
        }
    }
    counts
        .into_iter()
        .map(|(d, (total, untouched))| (d, untouched as f64 / total as f64))
        .collect()
}

/// Fourth-order Runge-Kutta integration of the pure-death system
/// `mu'(k) = -k mu(k) + (k+1) mu(k+1)` on the truncated support, with an
/// absorbing top class. Steps are clamped to at most 1e-3.
pub fn ode_oracle(initial_mu: &[f64], t_end: f64, step: f64) -> Vec<f64> {
    let m = initial_mu.len();
    let mut y = initial_mu.to_vec();
    if t_end <= 0.0 || m == 0 {
        return y;
    }
    let h_max = step.min(1e-3);
    let steps = (t_end / h_max).ceil() as usize;
    let h = t_end / steps as f64;

    let deriv = |y: &[f64], out: &mut [f64]| {
        for k in 0..m {
            let inflow = if k + 1 < m {
                (k + 1) as f64 * y[k + 1]
            } else {
                0.0
            };
            out[k] = -(k as f64) * y[k] + inflow;
        }
    };

    let mut k1 = vec![0.0; m];
    let mut k2 = vec![0.0; m];
    let mut k3 = vec![0.0; m];
    let mut k4 = vec![0.0; m];
    let mut tmp = vec![0.0; m];
    for _ in 0..steps {
        deriv(&y, &mut k1);
        for i in 0..m {
            tmp[i] = y[i] + 0.5 * h * k1[i];
        }
        deriv(&tmp, &mut k2);
        for i in 0..m {
            tmp[i] = y[i] + 0.5 * h * k2[i];
        }
        deriv(&tmp, &mut k3);
        for i in 0..m {
            tmp[i] = y[i] + h * k3[i];
        }
        deriv(&tmp, &mut k4);
        for i in 0..m {
            y[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
    }
    y
}

/// One run of the pairing urn: start with `k` red among `n` balls; each step
/// removes one red ball and then one uniform ball, until no red remains.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UrnRun {
    pub n: usize,
    pub k: usize,
    /// Cumulative red balls removed after each step.
    pub removed_red: Vec<usize>,
    /// First step index at which the red fraction drops below 1/2.
    pub t_half: Option<usize>,
}

/// Exact discrete simulation of the pairing urn.
pub fn urn_simulate(n: usize, k: usize, rng: &mut ChaCha8Rng) -> UrnRun {
    assert!(k <= n, "red count {k} exceeds urn size {n}");
    let mut red = k;
    let mut total = n;
    let mut removed_red = Vec::new();
    let mut t_half = None;

    let dropped = |red: usize, total: usize| red == 0 || 2 * red < total;
    if dropped(red, total) {
        t_half = Some(0);
    }

    let mut step = 0usize;
    while red > 0 {
        red -= 1;
        total -= 1;
        if total > 0 && rng.gen_range(0..total) < red {
            red -= 1;
        }
        total = total.saturating_sub(1);
        step += 1;
        removed_red.push(k - red);
        if t_half.is_none() && dropped(red, total) {
            t_half = Some(step);
        }
    }
    UrnRun {
        n,
        k,
        removed_red,
        t_half,
    }
}
