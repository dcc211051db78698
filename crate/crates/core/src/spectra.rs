//! Analytic engine on degree distributions.
//!
//! The central object is the one-round leaf-removal map `M1`: the degree
//! distribution of the unexplored graph after the degree-greedy exploration
//! has consumed the current cohort of degree-1 (and degree-0) vertices. The
//! map factors into three closed-form steps:
//!
//! 1. discard the degree-0 mass `p_0`;
//! 2. keep each degree-k vertex untouched by the leaf matching with
//!    probability `Q^k`, where `Q = 1 - p_1 / lambda`;
//! 3. binomially thin the survivors' degrees with retention
//!    `Q~ = sum_{k>=2} k Q^k p_k / (Q^2 lambda)`, the closed-form endpoint of
//!    the pure-death system `mu'(k) = -k mu(k) + (k+1) mu(k+1)` at
//!    `t = -ln Q~`.
//!
//! Survivors keep a share `sum_{k>=2} Q^k p_k` of the population; every stage
//! adds `p_0 + lambda (1 - Q^2) / 2` of the current population to the
//! independent set. Iterating the map until the residual graph is subcritical
//! yields the asymptotic independence ratio.
//!
//! Criticality diagnostics: `nu = E[D(D-1)]/E[D]` decides whether a giant
//! component exists; `nu~ = G_D''(Q)/lambda` decides whether a single round of
//! `M1` already leaves a subcritical graph (one-step quasi-optimality of the
//! degree-greedy exploration).

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dist::{DegreeDistribution, DistError};
use crate::zeta::zeta;

/// Strictness margin for sub/supercritical verdicts, to avoid boundary flap.
pub const STRICT_EPS: f64 = 1e-12;

/// Survivor masses below this are treated as an exhausted population.
const MIN_SURVIVOR: f64 = 1e-300;

/// Cumulative-weight floor at which iteration stops: the unaccounted part of
/// the ratio is bounded by this value.
const WEIGHT_FLOOR: f64 = 1e-12;

/// Cap on extra stages once the residual distribution is subcritical.
const TERMINAL_STAGES: usize = 200;

#[derive(Debug, Error)]
pub enum SpectraError {
    #[error("degree distribution has zero mean degree")]
    ZeroMeanDegree,
    #[error("stage left no surviving population (survivor fraction {0:e})")]
    DegenerateStage(f64),
    #[error("poisson mixture turned invalid: mass({k}) = {mass:e}")]
    NegativeMass { k: usize, mass: f64 },
    #[error("distribution is already one-step quasi-optimal (nu~ = {nu_tilde})")]
    AlreadyQuasiOptimal { nu_tilde: f64 },
    #[error(transparent)]
    Dist(#[from] DistError),
}

/// Criticality parameters of a degree distribution.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct CriticalityReport {
    /// Mean degree.
    pub lambda: f64,
    /// Branching parameter `E[D(D-1)] / E[D]`.
    pub nu: f64,
    /// Per-half-edge survival of the leaf-matching round, `1 - p_1 / lambda`.
    pub q: f64,
    /// Phase-2 retention `sum_{k>=2} k Q^k p_k / (Q^2 lambda)` (0 when Q = 0).
    pub q_tilde: f64,
    /// Post-round branching parameter `G_D''(Q) / lambda`.
    pub nu_tilde: f64,
    /// `nu < 1`: no giant component.
    pub subcritical: bool,
    /// `nu~ < 1`: one round of M1 leaves a subcritical graph.
    pub one_step_quasi_optimal: bool,
}

/// Snapshot of one application of the M1 map.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct M1StageRecord {
    /// 1-based stage index within an iteration.
    pub stage: usize,
    /// Mean degree of the stage input.
    pub lambda_i: f64,
    pub q_i: f64,
    pub q_tilde_i: f64,
    /// Degree-0 mass consumed at the start of the stage.
    pub r_i: f64,
    /// Half-edges matched during the stage per input vertex,
    /// `lambda_i (1 - Q_i^2)`.
    pub removed_fraction: f64,
    /// Fraction of the stage population that remains unexplored,
    /// `sum_{k>=2} Q_i^k p_k`.
    pub survivor_fraction: f64,
    /// Vertices added to the independent set per input vertex,
    /// `r_i + lambda_i (1 - Q_i^2) / 2`.
    pub ratio_increment: f64,
}

/// Result of one M1 application: the stage record plus the renormalized
/// surviving distribution (`None` when the stage consumed everything).
#[derive(Debug, Clone)]
pub struct M1Stage {
    pub output: Option<DegreeDistribution>,
    pub record: M1StageRecord,
}

/// Accumulated independence ratio from iterating M1.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RatioResult {
    /// Asymptotic independence ratio `alpha(G)/n`.
    pub ratio: f64,
    pub stages: Vec<M1StageRecord>,
    /// Whether the iteration reached a subcritical residual distribution.
    pub terminated_subcritical: bool,
    /// Number of M1 applications performed.
    pub stages_used: usize,
}

/// State of the Poisson + delta_1 mixture closed under M1: unnormalized
/// masses `m(k) = a_i Poisson(lambda_i)(k) + b_i 1{k=1}` for `k >= 1`.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct PoissonMixtureState {
    pub lambda_i: f64,
    pub a_i: f64,
    pub b_i: f64,
}

/// Mean degree, branching parameters and quasi-optimality verdicts.
pub fn criticality(dist: &DegreeDistribution) -> Result<CriticalityReport, SpectraError> {
    let (lambda, second) = dist.moments();
    if lambda <= 0.0 {
        return Err(SpectraError::ZeroMeanDegree);
    }
    let nu = (second - lambda) / lambda;
    let q = (1.0 - dist.mass(1) / lambda).max(0.0);

    // sum_{k>=2} k(k-1) Q^{k-2} p_k  and  sum_{k>=2} k Q^k p_k
    let mut gpp_q = 0.0;
    let mut sized_survivors = 0.0;
    let mut qpow = 1.0; // Q^{k-2}
    for k in 2..=dist.truncation() {
        let kf = k as f64;
        let pk = dist.mass(k);
        gpp_q += kf * (kf - 1.0) * qpow * pk;
        sized_survivors += kf * qpow * q * q * pk;
        qpow *= q;
    }
    let nu_tilde = gpp_q / lambda;
    let q_tilde = if q > 0.0 {
        sized_survivors / (q * q * lambda)
    } else {
        0.0
    };

    Ok(CriticalityReport {
        lambda,
        nu,
        q,
        q_tilde,
        nu_tilde,
        subcritical: nu < 1.0 - STRICT_EPS,
        one_step_quasi_optimal: nu_tilde < 1.0 - STRICT_EPS,
    })
}

/// `nu~` of a Poisson(lambda) distribution in closed form:
/// `lambda * exp(-lambda * exp(-lambda))`.
pub fn poisson_nu_tilde(lambda: f64) -> f64 {
    lambda * (-lambda * (-lambda).exp()).exp()
}

/// The mean degree below which a Poisson distribution is one-step
/// quasi-optimal: the root of `lambda e^{-lambda e^{-lambda}} = 1` on (1, 2),
/// located by bisection to 1e-10.
pub fn poisson_lambda0() -> f64 {
    let f = |lam: f64| poisson_nu_tilde(lam) - 1.0;
    let (mut lo, mut hi) = (1.0_f64, 2.0_f64);
    let (flo, fhi) = (f(lo), f(hi));
    assert!(
        flo < 0.0 && fhi > 0.0,
        "poisson_lambda0: no sign change on (1, 2): f(1) = {flo}, f(2) = {fhi}"
    );
    while hi - lo > 1e-10 {
        let mid = 0.5 * (lo + hi);
        if f(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// The power-law exponent at which `zeta(alpha-2) = 2 zeta(alpha-1)`: the
/// supercriticality boundary for power-law degree distributions. Bisection
/// on (3, 4) to 1e-8.
pub fn powerlaw_threshold() -> f64 {
    let g = |alpha: f64| zeta(alpha - 2.0) - 2.0 * zeta(alpha - 1.0);
    let (mut lo, mut hi) = (3.0 + 1e-9_f64, 4.0_f64);
    assert!(
        g(lo) > 0.0 && g(hi) < 0.0,
        "powerlaw_threshold: no sign change on (3, 4)"
    );
    while hi - lo > 1e-8 {
        let mid = 0.5 * (lo + hi);
        if g(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Binomial thinning of a mass vector: a unit at degree `j` lands on degree
/// `k` with probability `C(j,k) retain^k (1-retain)^{j-k}`. This is the exact
/// time `-ln(retain)` solution of the pure-death system
/// `mu'(k) = -k mu(k) + (k+1) mu(k+1)`.
pub(crate) fn thin_masses(masses: &[f64], retain: f64) -> Vec<f64> {
    let hi = match masses.iter().rposition(|&m| m > MIN_SURVIVOR) {
        Some(j) => j,
        None => return vec![0.0; masses.len()],
    };
    let lose = 1.0 - retain;
    let mut out = vec![0.0; masses.len()];
    for (k, slot) in out.iter_mut().enumerate().take(hi + 1) {
        // w_j = C(j,k) retain^k lose^{j-k}, advanced by
        // w_{j+1} = w_j * lose * (j+1) / (j+1-k).
        let mut w = retain.powi(k as i32);
        let mut acc = masses[k] * w;
        for (j, &mass_j) in masses.iter().enumerate().take(hi + 1).skip(k + 1) {
            w *= lose * j as f64 / (j - k) as f64;
            acc += mass_j * w;
        }
        *slot = acc;
    }
    out
}

/// One application of the M1 map.
///
/// Returns the stage record and the renormalized surviving degree
/// distribution. When `Q = 0` (all mass on degrees 0 and 1) the stage is
/// terminal: the record is returned with `output = None` and survivor
/// fraction 0. `DegenerateStage` only fires if a numerically positive `Q`
/// still leaves no representable survivor mass.
pub fn apply_m1(dist: &DegreeDistribution) -> Result<M1Stage, SpectraError> {
    let (lambda, _) = dist.moments();
    if lambda <= 0.0 {
        return Err(SpectraError::ZeroMeanDegree);
    }
    let p0 = dist.mass(0);
    let p1 = dist.mass(1);
    let q = (1.0 - p1 / lambda).max(0.0);
    let removed_fraction = lambda * (1.0 - q * q);
    let ratio_increment = p0 + removed_fraction / 2.0;

    if q <= 0.0 {
        return Ok(M1Stage {
            output: None,
            record: M1StageRecord {
                stage: 1,
                lambda_i: lambda,
                q_i: 0.0,
                q_tilde_i: 0.0,
                r_i: p0,
                removed_fraction,
                survivor_fraction: 0.0,
                ratio_increment,
            },
        });
    }

    // Phase-1 survivors: degree-k vertices untouched by the leaf matching.
    let mut survivors = vec![0.0; dist.truncation() + 1];
    let mut surv_frac = 0.0;
    let mut sized = 0.0;
    let mut qpow = q * q;
    for (k, slot) in survivors.iter_mut().enumerate().skip(2) {
        let s = qpow * dist.mass(k);
        *slot = s;
        surv_frac += s;
        sized += k as f64 * s;
        qpow *= q;
    }
    let q_tilde = sized / (q * q * lambda);

    if surv_frac <= MIN_SURVIVOR {
        return Err(SpectraError::DegenerateStage(surv_frac));
    }

    // Phase-2 thinning of survivor degrees with retention Q~.
    let thinned = thin_masses(&survivors, q_tilde);
    let total: f64 = thinned.iter().sum();
    let mut out: Vec<f64> = thinned.iter().map(|&m| (m / total).min(1.0)).collect();
    while out.len() > 1 && *out.last().unwrap() == 0.0 {
        out.pop();
    }
    let output = DegreeDistribution::from_mass(out, dist.tail_tol().max(1e-9))?;

    Ok(M1Stage {
        output: Some(output),
        record: M1StageRecord {
            stage: 1,
            lambda_i: lambda,
            q_i: q,
            q_tilde_i: q_tilde,
            r_i: p0,
            removed_fraction,
            survivor_fraction: surv_frac,
            ratio_increment,
        },
    })
}

/// Iterate M1, accumulating the independence ratio
/// `sum_i (r_i + lambda_i (1 - Q_i^2)/2) * prod_{j<i} s_j`
/// where `s_j` is the stage-j survivor fraction.
///
/// Supercritical stages are capped at `max_stages`; once the residual
/// distribution is subcritical the iteration keeps running (the residual
/// population is tree-like and the same map stays exact on it) until the
/// cumulative weight drops below 1e-12 or 200 further stages have run.
/// `terminated_subcritical = false` flags an iteration that hit `max_stages`
/// or stalled while still supercritical.
pub fn iterate_m1(dist: &DegreeDistribution, max_stages: usize) -> RatioResult {
    let mut current = dist.clone();
    let mut weight = 1.0;
    let mut ratio = 0.0;
    let mut stages: Vec<M1StageRecord> = Vec::new();
    let mut subcritical_reached = false;
    let mut terminal_stages = 0usize;
    let mut supercritical_stages = 0usize;

    loop {
        let (lambda, second) = current.moments();
        if lambda <= 0.0 {
            // Only isolated vertices remain; all of them join the set.
            ratio += weight * current.mass(0);
            subcritical_reached = true;
            break;
        }
        let nu = (second - lambda) / lambda;
        if nu < 1.0 - STRICT_EPS {
            subcritical_reached = true;
        }
        if subcritical_reached {
            if terminal_stages >= TERMINAL_STAGES {
                break;
            }
        } else {
            if supercritical_stages >= max_stages {
                break;
            }
            if current.mass(0) <= 0.0 && current.mass(1) <= 0.0 {
                // M1 is the identity on such distributions; no progress.
                break;
            }
        }

        let stage = match apply_m1(&current) {
            Ok(s) => s,
            Err(_) => break,
        };
        let mut record = stage.record;
        record.stage = stages.len() + 1;
        ratio += weight * record.ratio_increment;
        weight *= record.survivor_fraction;
        if subcritical_reached {
            terminal_stages += 1;
        } else {
            supercritical_stages += 1;
        }
        stages.push(record);

        match stage.output {
            Some(next) if weight > WEIGHT_FLOOR => current = next,
            _ => break,
        }
    }

    RatioResult {
        ratio,
        stages_used: stages.len(),
        stages,
        terminated_subcritical: subcritical_reached,
    }
}

/// One step of the Poisson-mixture recursion
/// `lambda' = Q~ Q lambda`, `a' = e^{-(1-Q) lambda} a`,
/// `b' = -a Q~ Q lambda e^{-lambda}`, with `Q`, `Q~` read off the current
/// mixture masses on degrees `k >= 1` (degree 0 plays no role).
pub fn poisson_m1_step(state: &PoissonMixtureState) -> Result<PoissonMixtureState, SpectraError> {
    let PoissonMixtureState {
        lambda_i: lam,
        a_i: a,
        b_i: b,
    } = *state;
    if a < 0.0 {
        return Err(SpectraError::NegativeMass { k: 2, mass: a });
    }
    let m1 = a * lam * (-lam).exp() + b;
    if m1 < -1e-12 {
        return Err(SpectraError::NegativeMass { k: 1, mass: m1 });
    }
    let mean = a * lam + b;
    if mean <= 0.0 {
        return Ok(PoissonMixtureState {
            lambda_i: 0.0,
            a_i: a,
            b_i: 0.0,
        });
    }
    let q = (1.0 - m1.max(0.0) / mean).max(0.0);
    // sum_{k>=2} k Q^k m(k) = a Q lambda (e^{-(1-Q) lambda} - e^{-lambda})
    let sized = a * q * lam * ((-(1.0 - q) * lam).exp() - (-lam).exp());
    let q_tilde = if q > 0.0 { sized / (q * q * mean) } else { 0.0 };

    let lambda_next = q_tilde * q * lam;
    let a_next = (-(1.0 - q) * lam).exp() * a;
    let b_next = -a * q_tilde * q * lam * (-lam).exp();

    let m1_next = a_next * lambda_next * (-lambda_next).exp() + b_next;
    if m1_next < -1e-9 {
        return Err(SpectraError::NegativeMass {
            k: 1,
            mass: m1_next,
        });
    }
    Ok(PoissonMixtureState {
        lambda_i: lambda_next,
        a_i: a_next,
        b_i: b_next,
    })
}

/// Upper bound on the independence ratio of a supercritical distribution.
///
/// Mass is moved to degree 1 from the highest degree class downward —
/// removing edges, which can only grow the independence number — until
/// `nu~ < 1`; the boundary class is split by bisection so the capped
/// distribution lands at `nu~ = 1 - 1e-6`. The returned bound is the
/// iterated-M1 ratio of the capped distribution.
pub fn degree_cap_upper_bound(
    dist: &DegreeDistribution,
) -> Result<(DegreeDistribution, f64), SpectraError> {
    let report = criticality(dist)?;
    if report.one_step_quasi_optimal {
        return Err(SpectraError::AlreadyQuasiOptimal {
            nu_tilde: report.nu_tilde,
        });
    }
    let target = 1.0 - 1e-6;

    let capped = |boundary: usize, fraction: f64| -> DegreeDistribution {
        // Move all classes above `boundary`, plus `fraction` of `boundary`
        // itself, down to degree 1.
        let mut mass = vec![0.0; (boundary + 1).min(dist.truncation() + 1)];
        let mut moved = 0.0;
        for (k, &pk) in dist.masses().iter().enumerate() {
            if k > boundary {
                moved += pk;
            } else if k == boundary && k >= 2 {
                moved += fraction * pk;
                mass[k] = (1.0 - fraction) * pk;
            } else {
                mass[k] = pk;
            }
        }
        if mass.len() > 1 {
            mass[1] += moved;
        }
        DegreeDistribution::from_mass(mass, dist.tail_tol()).expect("capping preserves total mass")
    };
    let nu_tilde_of = |d: &DegreeDistribution| criticality(d).map(|r| r.nu_tilde).unwrap_or(0.0);

    // Walk the boundary class down until fully capping above it crosses the
    // target; g(boundary) is nonincreasing as the boundary drops.
    let mut boundary = dist.truncation();
    while boundary > 1 && nu_tilde_of(&capped(boundary - 1, 0.0)) >= target {
        boundary -= 1;
    }
    // Classes above `boundary - 1`... i.e. splitting class `boundary`:
    // fraction 0 leaves nu~ >= target, fraction 1 brings it under.
    let (mut lo, mut hi) = (0.0_f64, 1.0_f64);
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if nu_tilde_of(&capped(boundary, mid)) >= target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let final_dist = capped(boundary, hi);
    let bound = iterate_m1(&final_dist, 400).ratio;
    Ok((final_dist, bound))
}
