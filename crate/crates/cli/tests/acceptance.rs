//! Acceptance suite: one test per criterion, each asserting its stated
//! tolerance and runtime budget. `cargo test --test acceptance` prints one
//! pass/fail line per criterion; run with `-- --nocapture` for the measured
//! numbers.

use std::time::Instant;

use degreedy::dist::DegreeDistribution;
use degreedy::exact::{brute_alpha, exact_alpha};
use degreedy::explore::{degree_greedy, verify_selection_sequence};
use degreedy::fluid::{
    fluid_curves, ode_oracle, simulate_phase1, untouched_fractions, urn_simulate,
};
use degreedy::graphgen::{component_stats, random_tree, sample_cm, sample_degrees};
use degreedy::rng::stream;
use degreedy::spectra::{
    apply_m1, criticality, iterate_m1, poisson_lambda0, poisson_m1_step, poisson_nu_tilde,
    powerlaw_threshold, PoissonMixtureState,
};

const SEED: u64 = 20_26;

fn budget(start: Instant, label: &str, limit_s: f64) {
    let elapsed = start.elapsed().as_secs_f64();
    eprintln!("{label}: PASS in {elapsed:.2}s (limit {limit_s}s)");
    assert!(
        elapsed < limit_s,
        "{label} exceeded its {limit_s}s budget ({elapsed:.2}s)"
    );
}

fn median(values: &mut [f64]) -> f64 {
    values.sort_by(|a, b| a.partial_cmp(b).unwrap());
    values[values.len() / 2]
}

fn mean_sigma_ratio(lambda: f64, n: usize, seeds: u64, domain: &str) -> f64 {
    let d = DegreeDistribution::poisson(lambda).unwrap();
    let mut total = 0.0;
    for i in 0..seeds {
        let mut rng = stream(SEED, domain, i);
        let seq = sample_degrees(&d, n, &mut rng);
        let g = sample_cm(&seq, &mut rng).unwrap();
        let run = degree_greedy(&g, &mut rng);
        total += run.sigma as f64 / n as f64;
    }
    total / seeds as f64
}

#[test]
fn criterion_01_poisson_threshold() {
    let start = Instant::now();
    let root = poisson_lambda0();
    assert!((1.40..=1.42).contains(&root), "lambda0 = {root}");
    assert!(
        (poisson_nu_tilde(root) - 1.0).abs() <= 1e-9,
        "nu~(lambda0) != 1"
    );
    // The truncated-distribution route agrees.
    let d = DegreeDistribution::poisson_with_tol(root, 1e-14).unwrap();
    let r = criticality(&d).unwrap();
    assert!(
        (r.nu_tilde - 1.0).abs() <= 1e-8,
        "truncated nu~ = {}",
        r.nu_tilde
    );
    budget(start, "criterion 01 (poisson threshold)", 1.0);
}

#[test]
fn criterion_02_powerlaw_criterion() {
    let start = Instant::now();
    for i in 0..=29 {
        let alpha = 3.1 + 0.1 * i as f64;
        let d = DegreeDistribution::powerlaw(alpha).unwrap();
        let r = criticality(&d).unwrap();
        assert!(r.nu_tilde < 1.0, "alpha = {alpha}: nu~ = {}", r.nu_tilde);
    }
    let threshold = powerlaw_threshold();
    assert!(
        threshold > 3.40 && threshold < 3.55,
        "supercriticality boundary = {threshold}"
    );
    budget(start, "criterion 02 (power-law criterion)", 5.0);
}

#[test]
fn criterion_03_tree_exactness() {
    let start = Instant::now();
    let mut rng = stream(SEED, "acc3/trees", 0);
    for i in 0..200u64 {
        let n = 2 + (i as usize * 37) % 199;
        let tree = random_tree(n, &mut rng);
        let run = degree_greedy(&tree, &mut stream(SEED, "acc3/run", i));
        let exact = exact_alpha(&tree, 1 << 24).unwrap();
        assert_eq!(run.sigma, exact.alpha, "tree {i} (n = {n})");
    }
    budget(start, "criterion 03 (tree exactness)", 30.0);
}

#[test]
fn criterion_04_t1_replay_certifies_optimality() {
    let start = Instant::now();
    let mut rng = stream(SEED, "acc4/graphs", 0);
    let mut certified = 0usize;
    for i in 0..500u64 {
        let lambda = 0.4 + (i % 18) as f64 * 0.1;
        let n = 4 + (i as usize * 7) % 17;
        let d = DegreeDistribution::poisson(lambda).unwrap();
        let seq = sample_degrees(&d, n, &mut rng);
        let g = sample_cm(&seq, &mut rng).unwrap();
        let run = degree_greedy(&g, &mut stream(SEED, "acc4/run", i));
        let check = verify_selection_sequence(&g, &run.sequence).unwrap();
        assert!(check.independent && check.maximal);
        if check.t1 {
            certified += 1;
            assert_eq!(
                run.sigma,
                brute_alpha(&g).unwrap(),
                "T1 run {i} not optimal"
            );
        }
    }
    assert!(
        certified >= 200,
        "too few T1 runs to be meaningful ({certified})"
    );
    budget(start, "criterion 04 (T1 replay vs brute force)", 60.0);
}

#[test]
fn criterion_05_fluid_phase1() {
    let start = Instant::now();
    let d = DegreeDistribution::poisson(1.0).unwrap();
    let (lambda, _) = d.moments();
    let curves = fluid_curves(lambda, d.mass(1), &d).unwrap();
    let n = 100_000;
    let mut sup_devs = Vec::new();
    let mut t1_devs = Vec::new();
    for i in 0..20u64 {
        let degrees = sample_degrees(&d, n, &mut stream(SEED, "acc5/deg", i));
        let run = simulate_phase1(&degrees, &mut stream(SEED, "acc5/run", i), 0.01).unwrap();
        let traj = &run.trajectory;
        let du = traj
            .times
            .iter()
            .zip(&traj.u)
            .map(|(&t, &u)| (u - curves.u_phase1(t)).abs())
            .fold(0.0, f64::max);
        sup_devs.push(du);
        t1_devs.push((run.t1 - curves.t1).abs());
    }
    let med_u = median(&mut sup_devs);
    let med_t1 = median(&mut t1_devs);
    eprintln!("  median sup |U/n - u_t| = {med_u:.4}, median |T1 - t1| = {med_t1:.4}");
    assert!(med_u <= 0.02, "median sup deviation {med_u}");
    assert!(med_t1 <= 0.02, "median stopping-time deviation {med_t1}");
    budget(start, "criterion 05 (fluid phase 1)", 60.0);
}

#[test]
fn criterion_06_untouched_concentration() {
    let start = Instant::now();
    let d = DegreeDistribution::poisson(1.0).unwrap();
    let (lambda, _) = d.moments();
    let q = 1.0 - d.mass(1) / lambda;
    let n = 100_000;
    let mut per_class: Vec<Vec<f64>> = vec![Vec::new(); 7];
    for i in 0..20u64 {
        let mut rng = stream(SEED, "acc6", i);
        let seq = sample_degrees(&d, n, &mut rng);
        let g = sample_cm(&seq, &mut rng).unwrap();
        let fractions = untouched_fractions(&g);
        for cls in 2..=6u32 {
            if let Some(&f) = fractions.get(&cls) {
                per_class[cls as usize].push(f);
            }
        }
    }
    for (cls, samples) in per_class.iter_mut().enumerate().skip(2) {
        assert_eq!(samples.len(), 20, "class {cls} missing in some seed");
        let med = median(samples);
        let predicted = q.powi(cls as i32);
        eprintln!("  degree {cls}: median untouched {med:.4} vs Q^{cls} = {predicted:.4}");
        assert!(
            (med - predicted).abs() <= 0.01,
            "degree {cls}: median {med} vs {predicted}"
        );
    }
    budget(start, "criterion 06 (Z_i concentration)", 60.0);
}

#[test]
fn criterion_07_m1_vs_ode_oracle() {
    let start = Instant::now();
    for dist in [
        DegreeDistribution::poisson(1.0).unwrap(),
        DegreeDistribution::poisson(1.3).unwrap(),
        DegreeDistribution::powerlaw(3.5).unwrap(),
    ] {
        let (lambda, _) = dist.moments();
        let q = 1.0 - dist.mass(1) / lambda;
        let mut mu0 = vec![0.0; dist.truncation() + 1];
        for (k, slot) in mu0.iter_mut().enumerate().skip(2) {
            *slot = q.powi(k as i32) * dist.mass(k);
        }
        let stage = apply_m1(&dist).unwrap();
        let out = stage.output.unwrap();
        let surv = stage.record.survivor_fraction;
        let integrated = ode_oracle(&mu0, -stage.record.q_tilde_i.ln(), 1e-4);
        let sup = (0..mu0.len())
            .map(|k| (out.mass(k) * surv - integrated[k]).abs())
            .fold(0.0, f64::max);
        eprintln!("  sup |closed - RK4| = {sup:.2e}");
        assert!(sup <= 1e-8, "sup-norm {sup:e}");
    }
    budget(start, "criterion 07 (M1 vs RK4 oracle)", 10.0);
}

#[test]
fn criterion_08_poisson_recursion() {
    let start = Instant::now();
    let poi = |lam: f64, k: usize| {
        (-lam).exp() * lam.powi(k as i32) / (1..=k).map(|i| i as f64).product::<f64>()
    };
    let mut dist = DegreeDistribution::poisson_truncated(1.0, 60).unwrap();
    let mut state = PoissonMixtureState {
        lambda_i: 1.0,
        a_i: 1.0,
        b_i: 0.0,
    };
    let mut weight = 1.0;
    for stage_idx in 1..=3 {
        let stage = apply_m1(&dist).unwrap();
        let out = stage.output.unwrap();
        weight *= stage.record.survivor_fraction;
        let m = |k: usize| out.mass(k) * weight;
        let lambda_fit = 3.0 * m(3) / m(2);
        let a_fit = m(2) / poi(lambda_fit, 2);
        let b_fit = m(1) - a_fit * poi(lambda_fit, 1);
        state = poisson_m1_step(&state).unwrap();
        for (name, got, fitted) in [
            ("lambda", state.lambda_i, lambda_fit),
            ("A", state.a_i, a_fit),
            ("B", state.b_i, b_fit),
        ] {
            assert!(
                (got - fitted).abs() <= 1e-6,
                "stage {stage_idx} {name}: recursion {got} vs fit {fitted}"
            );
        }
        dist = out;
    }
    budget(start, "criterion 08 (poisson recursion)", 5.0);
}

#[test]
fn criterion_09_end_to_end_ratio() {
    let start = Instant::now();
    let d = DegreeDistribution::poisson(1.2).unwrap();
    let predicted = iterate_m1(&d, 64);
    assert!(predicted.terminated_subcritical);
    let mc = mean_sigma_ratio(1.2, 100_000, 30, "acc9");
    eprintln!(
        "  analytic ratio {:.5} vs Monte Carlo {mc:.5}",
        predicted.ratio
    );
    assert!(
        (predicted.ratio - mc).abs() <= 0.01,
        "ratio {} vs MC {mc}",
        predicted.ratio
    );
    budget(start, "criterion 09 (end-to-end ratio)", 300.0);
}

#[test]
fn criterion_10_near_optimality_desk_scale() {
    let start = Instant::now();
    let d = DegreeDistribution::poisson(1.2).unwrap();
    let mut rel_gap_sum = 0.0;
    let graphs = 100u64;
    for i in 0..graphs {
        let n = 20 + (i as usize * 13) % 41; // sizes in 20..=60
        let mut rng = stream(SEED, "acc10/graph", i);
        let seq = sample_degrees(&d, n, &mut rng);
        let g = sample_cm(&seq, &mut rng).unwrap();
        let run = degree_greedy(&g, &mut stream(SEED, "acc10/run", i));
        let alpha = exact_alpha(&g, 1 << 26).unwrap().alpha;
        assert!(alpha >= run.sigma, "graph {i}: heuristic exceeded alpha");
        if alpha > 0 {
            rel_gap_sum += (alpha - run.sigma) as f64 / alpha as f64;
        }
    }
    let mean_gap = rel_gap_sum / graphs as f64;
    eprintln!("  mean relative optimality gap = {mean_gap:.4}");
    assert!(mean_gap <= 0.05, "mean relative gap {mean_gap}");
    budget(start, "criterion 10 (near-optimality desk scale)", 300.0);
}

#[test]
fn criterion_11_bad_vertex_scaling() {
    let start = Instant::now();
    let d = DegreeDistribution::poisson(0.8).unwrap();
    let mut fractions = Vec::new();
    for (idx, &n) in [1_000usize, 10_000, 100_000].iter().enumerate() {
        let mut bad: Vec<f64> = (0..50u64)
            .map(|i| {
                let mut rng = stream(SEED, "acc11", idx as u64 * 1000 + i);
                let seq = sample_degrees(&d, n, &mut rng);
                let g = sample_cm(&seq, &mut rng).unwrap();
                component_stats(&g).bad_vertices as f64
            })
            .collect();
        let med = median(&mut bad);
        fractions.push(med / n as f64);
        eprintln!(
            "  n = {n}: median bad vertices {med}, fraction {:.2e}",
            med / n as f64
        );
    }
    assert!(
        fractions[2] < fractions[1] && fractions[1] < fractions[0],
        "fractions not strictly decreasing: {fractions:?}"
    );
    budget(start, "criterion 11 (bad-vertex scaling)", 300.0);
}

#[test]
fn criterion_12_pairing_urn() {
    let start = Instant::now();
    let n = 10_000;
    let k = 9_000;
    let runs = 1_000u64;
    let mut hits = 0u64;
    for i in 0..runs {
        let run = urn_simulate(n, k, &mut stream(SEED, "acc12", i));
        if run.t_half.map(|t| t < n / 2).unwrap_or(false) {
            hits += 1;
        }
    }
    eprintln!("  t_half < n/2 in {hits}/{runs} runs");
    assert!(hits * 100 >= runs * 99, "{hits}/{runs}");
    budget(start, "criterion 12 (pairing urn)", 30.0);
}

#[test]
fn criterion_13_upper_bound_dominates_simulation() {
    let start = Instant::now();
    // The bound comes from the actual CLI surface.
    let out = std::process::Command::new(env!("CARGO_BIN_EXE_degreedy"))
        .args(["bound", "--dist", r#"{"kind":"poisson","lambda":2.0}"#])
        .output()
        .expect("binary should launch");
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&String::from_utf8_lossy(&out.stdout)).unwrap();
    assert_eq!(v["kind"].as_str().unwrap(), "upper_bound");
    let bound = v["value"].as_f64().unwrap();

    let mc = mean_sigma_ratio(2.0, 100_000, 30, "acc13");
    eprintln!("  capped upper bound {bound:.5} vs Monte Carlo sigma/n {mc:.5}");
    assert!(
        bound >= mc - 0.01,
        "bound {bound} below simulated ratio {mc}"
    );
    budget(start, "criterion 13 (upper-bound sanity)", 300.0);
}
