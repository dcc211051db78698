//! Browser bindings for the interactive demo page.
//!
//! Every export takes and returns JSON strings, so the same functions are
//! directly testable on native targets. Errors come back as
//! `{"error": "..."}` objects rather than thrown exceptions.

use serde::Serialize;
use wasm_bindgen::prelude::*;

use degreedy::dist::{DegreeDistribution, DistSpec};
use degreedy::rng::stream;
use degreedy::spectra::poisson_nu_tilde;
use degreedy::{
    criticality, degree_greedy, fluid_curves, iterate_m1, poisson_lambda0, sample_cm,
    sample_degrees,
};

fn err_json(msg: impl std::fmt::Display) -> String {
    serde_json::json!({ "error": msg.to_string() }).to_string()
}

fn parse_dist(spec_json: &str) -> Result<DegreeDistribution, String> {
    let spec = DistSpec::parse(spec_json).map_err(|e| format!("bad spec: {e}"))?;
    DegreeDistribution::from_spec(&spec).map_err(|e| format!("bad distribution: {e}"))
}

/// Criticality report for a distribution spec.
#[wasm_bindgen]
pub fn analyze(spec_json: &str) -> String {
    match parse_dist(spec_json).and_then(|d| criticality(&d).map_err(|e| e.to_string())) {
        Ok(report) => serde_json::to_string(&report).unwrap_or_else(err_json),
        Err(e) => err_json(e),
    }
}

/// Iterated-M1 ratio with the full per-stage table.
#[wasm_bindgen]
pub fn m1_stages(spec_json: &str, max_stages: u32) -> String {
    match parse_dist(spec_json) {
        Ok(d) => {
            let result = iterate_m1(&d, max_stages as usize);
            serde_json::to_string(&result).unwrap_or_else(err_json)
        }
        Err(e) => err_json(e),
    }
}

#[derive(Serialize)]
struct CurveSamples {
    t1: f64,
    t2: f64,
    q: f64,
    q_tilde: f64,
    phase1_t: Vec<f64>,
    phase1_u: Vec<f64>,
    phase1_a: Vec<f64>,
    phase2_t: Vec<f64>,
    phase2_u: Vec<f64>,
    phase2_b: Vec<f64>,
}

/// Closed-form fluid curves sampled on a uniform grid over each phase.
#[wasm_bindgen]
pub fn fluid_curve_samples(spec_json: &str, points: u32) -> String {
    let points = points.clamp(2, 4096) as usize;
    let d = match parse_dist(spec_json) {
        Ok(d) => d,
        Err(e) => return err_json(e),
    };
    let (lambda, _) = d.moments();
    let curves = match fluid_curves(lambda, d.mass(1), &d) {
        Ok(c) => c,
        Err(e) => return err_json(e),
    };
    let span1 = if curves.t1.is_finite() {
        curves.t1
    } else {
        3.0
    };
    let span2 = if curves.t2.is_finite() {
        curves.t2
    } else {
        3.0
    };
    let mut s = CurveSamples {
        t1: curves.t1,
        t2: curves.t2,
        q: curves.q,
        q_tilde: curves.q_tilde,
        phase1_t: vec![],
        phase1_u: vec![],
        phase1_a: vec![],
        phase2_t: vec![],
        phase2_u: vec![],
        phase2_b: vec![],
    };
    for i in 0..points {
        let t1 = span1 * i as f64 / (points - 1) as f64;
        s.phase1_t.push(t1);
        s.phase1_u.push(curves.u_phase1(t1));
        s.phase1_a.push(curves.a(t1));
        let t2 = span2 * i as f64 / (points - 1) as f64;
        s.phase2_t.push(t2);
        s.phase2_u.push(curves.u_phase2(t2));
        s.phase2_b.push(curves.b(t2));
    }
    serde_json::to_string(&s).unwrap_or_else(err_json)
}

#[derive(Serialize)]
struct NuTildeCurve {
    lambdas: Vec<f64>,
    nu_tildes: Vec<f64>,
    lambda0: f64,
}

/// The Poisson one-round criterion curve `nu~(lambda)` and its unit root.
#[wasm_bindgen]
pub fn poisson_criterion_curve(lambda_max: f64, points: u32) -> String {
    let points = points.clamp(2, 4096) as usize;
    let lambda_max = if lambda_max.is_finite() && lambda_max > 0.1 {
        lambda_max
    } else {
        3.0
    };
    let mut lambdas = Vec::with_capacity(points);
    let mut nu_tildes = Vec::with_capacity(points);
    for i in 0..points {
        let lam = 0.01 + (lambda_max - 0.01) * i as f64 / (points - 1) as f64;
        lambdas.push(lam);
        nu_tildes.push(poisson_nu_tilde(lam));
    }
    let curve = NuTildeCurve {
        lambdas,
        nu_tildes,
        lambda0: poisson_lambda0(),
    };
    serde_json::to_string(&curve).unwrap_or_else(err_json)
}

#[derive(Serialize)]
struct ExploreDemo {
    n: usize,
    sigma: usize,
    ratio: f64,
    t1_violations: usize,
    predicted_ratio: f64,
    selected_degree_hist: Vec<usize>,
}

/// Sample one CM graph, run degree-greedy on it, and report the realized
/// ratio next to the analytic prediction.
#[wasm_bindgen]
pub fn explore_demo(spec_json: &str, n: u32, seed: u64) -> String {
    let n = n.clamp(2, 200_000) as usize;
    let d = match parse_dist(spec_json) {
        Ok(d) => d,
        Err(e) => return err_json(e),
    };
    let mut rng = stream(seed, "wasm/demo", 0);
    let degrees = sample_degrees(&d, n, &mut rng);
    let g = match sample_cm(&degrees, &mut rng) {
        Ok(g) => g,
        Err(e) => return err_json(e),
    };
    let run = degree_greedy(&g, &mut rng);
    let max_deg = run
        .sequence
        .selected_degrees
        .iter()
        .copied()
        .max()
        .unwrap_or(0) as usize;
    let mut hist = vec![0usize; max_deg + 1];
    for &d in &run.sequence.selected_degrees {
        hist[d as usize] += 1;
    }
    let demo = ExploreDemo {
        n,
        sigma: run.sigma,
        ratio: run.sigma as f64 / n as f64,
        t1_violations: run.t1_violations,
        predicted_ratio: iterate_m1(&d, 400).ratio,
        selected_degree_hist: hist,
    };
    serde_json::to_string(&demo).unwrap_or_else(err_json)
}
