//! Sampling correctness, exploration optimality at desk scale, and the
//! exact-solver oracle chain.

use degreedy::dist::DegreeDistribution;
use degreedy::exact::{brute_alpha, exact_alpha};
use degreedy::explore::{degree_greedy, uniform_greedy, verify_selection_sequence};
use degreedy::graphgen::{
    component_stats, condition_simple, random_tree, sample_cm, sample_degrees, DegreeSequence,
    MultiGraph,
};
use degreedy::rng::stream;
use proptest::prelude::*;

const SEED: u64 = 0xD15EA5E;

#[test]
fn pairing_distribution_is_uniform_over_matchings() {
    // Degrees [1,1,1,1]: three perfect matchings, each with probability 1/3.
    let degrees = DegreeSequence::new(vec![1, 1, 1, 1]).unwrap();
    let mut rng = stream(SEED, "pairing", 0);
    let mut counts = [0usize; 3];
    let trials = 10_000;
    for _ in 0..trials {
        let g = sample_cm(&degrees, &mut rng).unwrap();
        let partner_of_0 = g
            .edges()
            .iter()
            .find_map(|&(u, v)| match (u, v) {
                (0, x) | (x, 0) => Some(x),
                _ => None,
            })
            .unwrap();
        counts[(partner_of_0 - 1) as usize] += 1;
    }
    let expected = trials as f64 / 3.0;
    let chi2: f64 = counts
        .iter()
        .map(|&c| (c as f64 - expected).powi(2) / expected)
        .sum();
    // df = 2, p > 0.01 <=> chi2 < 9.21.
    assert!(chi2 < 9.21, "chi2 = {chi2}, counts = {counts:?}");
    for &c in &counts {
        let freq = c as f64 / trials as f64;
        assert!((freq - 1.0 / 3.0).abs() < 0.02, "matching frequency {freq}");
    }
}

#[test]
fn sampled_degrees_obey_the_law_of_large_numbers() {
    let d = DegreeDistribution::poisson(1.0).unwrap();
    let seq = sample_degrees(&d, 100_000, &mut stream(SEED, "lln", 0));
    let mean = seq.degrees.iter().map(|&x| f64::from(x)).sum::<f64>() / seq.n() as f64;
    assert!((mean - 1.0).abs() < 0.02, "empirical mean {mean}");
}

#[test]
fn simple_conditioning_acceptance_rate() {
    // Poisson(1) at n = 1000: the asymptotic acceptance rate e^{-nu/2 - nu^2/4}
    // is about 0.47, so 0.2 is a safe floor.
    let d = DegreeDistribution::poisson(1.0).unwrap();
    let mut rng = stream(SEED, "accept", 0);
    let trials = 200;
    let mut simple = 0usize;
    for _ in 0..trials {
        let seq = sample_degrees(&d, 1000, &mut rng);
        let g = sample_cm(&seq, &mut rng).unwrap();
        if g.is_simple() {
            simple += 1;
        }
    }
    let rate = simple as f64 / trials as f64;
    assert!(rate >= 0.2, "acceptance rate {rate}");
    // And conditioning terminates comfortably within a generous budget.
    let seq = sample_degrees(&d, 1000, &mut rng);
    assert!(condition_simple(&seq, &mut rng, 200).is_ok());
}

#[test]
fn degree_greedy_is_exact_on_trees() {
    let mut rng = stream(SEED, "trees", 0);
    for i in 0..60 {
        let n = 2 + (i * 7) % 199;
        let t = random_tree(n, &mut rng);
        let run = degree_greedy(&t, &mut stream(SEED, "trees/run", i as u64));
        let exact = exact_alpha(&t, 1 << 24).unwrap();
        assert_eq!(run.sigma, exact.alpha, "tree n = {n}");
        let check = verify_selection_sequence(&t, &run.sequence).unwrap();
        assert!(check.independent && check.maximal && check.t1);
    }
}

#[test]
fn t1_property_certifies_optimality_at_desk_scale() {
    // Lemma-1 check: whenever the replay reports T1, sigma equals alpha.
    let mut rng = stream(SEED, "lemma1", 0);
    let mut t1_hits = 0usize;
    for i in 0..300 {
        let lambda = 0.5 + (i % 16) as f64 * 0.1;
        let n = 8 + (i * 13) % 53;
        let d = DegreeDistribution::poisson(lambda).unwrap();
        let seq = sample_degrees(&d, n, &mut rng);
        let g = sample_cm(&seq, &mut rng).unwrap();
        let run = degree_greedy(&g, &mut stream(SEED, "lemma1/run", i as u64));
        let check = verify_selection_sequence(&g, &run.sequence).unwrap();
        assert!(check.independent && check.maximal);
        let exact = exact_alpha(&g, 1 << 24).unwrap();
        assert!(run.sigma <= exact.alpha, "heuristic exceeded alpha");
        if check.t1 {
            t1_hits += 1;
            assert_eq!(run.sigma, exact.alpha, "T1 run must be optimal (n = {n})");
        }
    }
    assert!(t1_hits > 50, "corpus produced too few T1 runs ({t1_hits})");
}

#[test]
fn exact_agrees_with_brute_force_sweep() {
    let mut rng = stream(SEED, "sweep", 0);
    for i in 0..500 {
        let lambda = 0.4 + (i % 20) as f64 * 0.12;
        let n = 4 + (i * 11) % 17;
        let d = DegreeDistribution::poisson(lambda).unwrap();
        let seq = sample_degrees(&d, n, &mut rng);
        let g = sample_cm(&seq, &mut rng).unwrap();
        let exact = exact_alpha(&g, 1 << 24).unwrap();
        let brute = brute_alpha(&g).unwrap();
        assert_eq!(exact.alpha, brute, "instance {i} (n = {n})");
    }
}

#[test]
fn pendant_reduction_preserves_alpha() {
    // Taking a degree-<=1 vertex into the set and deleting its closed
    // neighbourhood never changes the independence number.
    let mut rng = stream(SEED, "reduce", 0);
    let mut exercised = 0usize;
    for i in 0..200 {
        let n = 5 + (i * 7) % 14;
        let d = DegreeDistribution::poisson(1.0).unwrap();
        let seq = sample_degrees(&d, n, &mut rng);
        let g = sample_cm(&seq, &mut rng).unwrap();
        let Some(v) = (0..g.n() as u32).find(|&v| g.degree(v) <= 1 && !g.has_self_loop(v)) else {
            continue;
        };
        exercised += 1;
        let keep: Vec<u32> = (0..g.n() as u32)
            .filter(|&u| u != v && !g.neighbors(v).contains(&u))
            .collect();
        let relabel: std::collections::HashMap<u32, u32> = keep
            .iter()
            .enumerate()
            .map(|(new, &old)| (old, new as u32))
            .collect();
        let edges: Vec<(u32, u32)> = g
            .edges()
            .iter()
            .filter_map(|&(a, b)| Some((*relabel.get(&a)?, *relabel.get(&b)?)))
            .collect();
        let reduced = MultiGraph::from_edges(keep.len(), edges);
        assert_eq!(
            brute_alpha(&g).unwrap(),
            1 + brute_alpha(&reduced).unwrap(),
            "instance {i}"
        );
    }
    assert!(exercised > 100);
}

#[test]
fn subcritical_bad_vertices_stay_rare() {
    let d = DegreeDistribution::poisson(0.8).unwrap();
    let n = 10_000;
    let seeds = 100u64;
    let mut good = 0usize;
    for i in 0..seeds {
        let mut rng = stream(SEED, "badv", i);
        let seq = sample_degrees(&d, n, &mut rng);
        let g = sample_cm(&seq, &mut rng).unwrap();
        let stats = component_stats(&g);
        if (stats.bad_vertices as f64) <= 0.02 * n as f64 {
            good += 1;
        }
    }
    assert!(
        good as u64 * 100 >= seeds * 95,
        "bad vertices exceeded 2% in {good}/{seeds}"
    );
}

#[test]
fn replay_accepts_the_canonical_path_cover() {
    let g = MultiGraph::from_edges(3, vec![(0, 1), (1, 2)]);
    let seq = degreedy::explore::SelectionSequence {
        vertices: vec![0, 2],
        selected_degrees: vec![1, 0],
    };
    let check = verify_selection_sequence(&g, &seq).unwrap();
    assert!(check.independent && check.maximal && check.t1);
}

#[test]
fn degree_greedy_beats_uniform_greedy_on_matched_seeds() {
    let d = DegreeDistribution::poisson(1.0).unwrap();
    let n = 100_000;
    let mut wins = 0usize;
    let trials = 50u64;
    for i in 0..trials {
        let mut graph_rng = stream(SEED, "paired/graph", i);
        let seq = sample_degrees(&d, n, &mut graph_rng);
        let g = sample_cm(&seq, &mut graph_rng).unwrap();
        let dg = degree_greedy(&g, &mut stream(SEED, "paired/dg", i));
        let gr = uniform_greedy(&g, &mut stream(SEED, "paired/gr", i));
        if gr.sigma < dg.sigma {
            wins += 1;
        }
    }
    assert!(
        wins as u64 * 100 >= trials * 95,
        "degree-greedy won only {wins}/{trials}"
    );
}

#[test]
fn subcritical_explorations_rarely_violate_t1() {
    // Poisson(0.8) at n = 10^4: the violating steps live in the rare cyclic
    // components.
    let d = DegreeDistribution::poisson(0.8).unwrap();
    let n = 10_000;
    let mut good = 0usize;
    let seeds = 100u64;
    for i in 0..seeds {
        let mut graph_rng = stream(SEED, "prop1/graph", i);
        let seq = sample_degrees(&d, n, &mut graph_rng);
        let g = sample_cm(&seq, &mut graph_rng).unwrap();
        let run = degree_greedy(&g, &mut stream(SEED, "prop1/run", i));
        if (run.t1_violations as f64) <= 0.01 * n as f64 {
            good += 1;
        }
    }
    assert!(
        good as u64 * 100 >= seeds * 95,
        "only {good}/{seeds} runs stayed near-T1"
    );
}

#[test]
fn analytic_ratio_matches_simulation_on_power_laws() {
    // Second-family check of the iterated map: power law alpha = 3.3 is
    // supercritical (nu > 1) yet one-round quasi-optimal.
    let d = DegreeDistribution::powerlaw(3.3).unwrap();
    let predicted = degreedy::spectra::iterate_m1(&d, 64);
    assert!(predicted.terminated_subcritical);
    let n = 100_000;
    let mut total = 0.0;
    let seeds = 3u64;
    for i in 0..seeds {
        let mut rng = stream(SEED, "plmc", i);
        let seq = sample_degrees(&d, n, &mut rng);
        let g = sample_cm(&seq, &mut rng).unwrap();
        total += degree_greedy(&g, &mut rng).sigma as f64 / n as f64;
    }
    let mc = total / seeds as f64;
    assert!(
        (predicted.ratio - mc).abs() <= 0.01,
        "analytic {} vs Monte Carlo {mc}",
        predicted.ratio
    );
}

#[test]
fn first_violation_happens_after_supercriticality_is_gone() {
    // Poisson(1.2) is supercritical with nu~ < 1: degree-greedy needs no
    // degree->=2 selection while the remaining graph is supercritical. The
    // residue that does force one is a handful of leftover cycles, whose
    // empirical nu is exactly 1 — so the check is nu <= 1, and the violation
    // must sit in the final sliver of the run.
    let d = DegreeDistribution::poisson(1.2).unwrap();
    let n = 10_000;
    let mut good = 0usize;
    let seeds = 100u64;
    for i in 0..seeds {
        let mut graph_rng = stream(SEED, "prop1b/graph", i);
        let seq = sample_degrees(&d, n, &mut graph_rng);
        let g = sample_cm(&seq, &mut graph_rng).unwrap();
        let run = degree_greedy(&g, &mut stream(SEED, "prop1b/run", i));
        match run.remaining_nu_at_first_violation {
            Some(nu) if nu <= 1.0 + 1e-9 => {
                let step = run.first_violation_step.unwrap();
                assert!(
                    step as f64 >= 0.9 * run.sigma as f64,
                    "early violation at {step}"
                );
                good += 1;
            }
            None => good += 1,
            _ => {}
        }
    }
    assert!(
        good as u64 * 100 >= seeds * 90,
        "only {good}/{seeds} violations were subcritical"
    );
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    /// Handshake + exact degree realization + tree detection consistency on
    /// arbitrary degree sequences.
    #[test]
    fn sampler_and_component_invariants(raw in proptest::collection::vec(0u32..6, 2..60), salt in 0u64..1000) {
        let mut degrees = raw;
        let sum: u64 = degrees.iter().map(|&d| u64::from(d)).sum();
        if sum % 2 == 1 {
            degrees[0] += 1;
        }
        let seq = DegreeSequence::new(degrees.clone()).unwrap();
        let g = sample_cm(&seq, &mut stream(SEED, "prop/cm", salt)).unwrap();

        prop_assert_eq!(g.degrees(), &degrees[..]);
        let total: u64 = g.degrees().iter().map(|&d| u64::from(d)).sum();
        prop_assert_eq!(total, 2 * g.num_edges() as u64);

        let stats = component_stats(&g);
        let mut bad = 0usize;
        for c in 0..stats.component_sizes.len() {
            let is_tree_by_edges = stats.component_edges[c] == stats.component_sizes[c] - 1;
            let is_tree_by_revisits = stats.revisit_counts[c] == 0;
            prop_assert_eq!(is_tree_by_edges, is_tree_by_revisits);
            if !is_tree_by_revisits {
                bad += stats.component_sizes[c];
            }
        }
        prop_assert_eq!(bad, stats.bad_vertices);
        prop_assert_eq!(
            stats.component_sizes.iter().copied().max().unwrap_or(0),
            stats.largest_component
        );
    }

    /// Every exploration output replays as an independent, maximal set.
    #[test]
    fn explorations_always_verify(raw in proptest::collection::vec(0u32..5, 2..40), salt in 0u64..1000) {
        let mut degrees = raw;
        let sum: u64 = degrees.iter().map(|&d| u64::from(d)).sum();
        if sum % 2 == 1 {
            degrees[0] += 1;
        }
        let seq = DegreeSequence::new(degrees).unwrap();
        let g = sample_cm(&seq, &mut stream(SEED, "prop/verify", salt)).unwrap();
        for run in [
            degree_greedy(&g, &mut stream(SEED, "prop/verify-dg", salt)),
            uniform_greedy(&g, &mut stream(SEED, "prop/verify-gr", salt)),
        ] {
            let check = verify_selection_sequence(&g, &run.sequence).unwrap();
            prop_assert!(check.independent);
            prop_assert!(check.maximal);
            prop_assert_eq!(run.sigma, run.sequence.vertices.len());
            let violations =
                run.sequence.selected_degrees.iter().filter(|&&d| d >= 2).count();
            prop_assert_eq!(violations, run.t1_violations);
        }
    }
}
