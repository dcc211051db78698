//! `degreedy` — reproducible command-line experiments tying the analytic
//! maps, samplers, explorations, exact solver and fluid-limit simulators
//! together.
//!
//! Every run is fully determined by the configuration plus `--seed`: random
//! streams derive as `stream(seed, domain, index)` with one index per trial,
//! and output rows are written in seed order regardless of thread count.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use degreedy::dist::{DegreeDistribution, DistSpec};
use degreedy::explore::ExplorationResult;
use degreedy::fluid::{FluidCurves, PhaseTrajectory};
use degreedy::graphgen::MultiGraph;
use degreedy::rng::stream;
use degreedy::{
    component_stats, condition_simple, criticality, degree_cap_upper_bound, degree_greedy,
    exact_alpha, fluid_curves, iterate_m1, sample_cm, sample_degrees, simulate_phase1,
    simulate_phase2, uniform_greedy, ExactError,
};

#[derive(Parser)]
#[command(
    name = "degreedy",
    version,
    about = "Degree-greedy independent-set experiments on configuration-model graphs"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Master seed; every stream in a run derives from it.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,

    /// Output file (or file prefix for multi-file commands). Stdout if absent.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Worker threads for seed-parallel commands.
    #[arg(long, global = true, default_value_t = 1)]
    threads: usize,

    /// Emit JSON records where the command supports both formats.
    #[arg(long, global = true)]
    json: bool,

    /// Emit CSV where the command supports both formats.
    #[arg(long, global = true)]
    csv: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Criticality report. Exit code 0 when nu~ < 1, 2 when nu~ >= 1.
    Analyze {
        /// Distribution spec: inline JSON or @path to a JSON file.
        #[arg(long)]
        dist: String,
    },
    /// Iterated-M1 independence ratio with the per-stage table.
    Ratio {
        #[arg(long)]
        dist: String,
        #[arg(long, default_value_t = 64)]
        max_stages: usize,
    },
    /// Sample CM graphs and run an exploration policy per seed.
    Simulate {
        #[arg(long)]
        dist: String,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 1)]
        seeds: usize,
        #[arg(long, value_enum, default_value_t = Policy::DegreeGreedy)]
        policy: Policy,
        /// Node budget for the exact solver.
        #[arg(long, default_value_t = 10_000_000)]
        budget: u64,
        /// Condition each sample on being a simple graph.
        #[arg(long)]
        simple: bool,
        /// Write a per-step trace CSV (requires --seeds 1).
        #[arg(long)]
        trace: Option<PathBuf>,
    },
    /// Simulate the matching phases and compare against the closed forms.
    Fluid {
        #[arg(long)]
        dist: String,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 1)]
        seeds: usize,
        #[arg(long, value_enum, default_value_t = PhaseArg::Both)]
        phase: PhaseArg,
        #[arg(long, default_value_t = 0.01)]
        sample_dt: f64,
    },
    /// Independence-ratio value: exact asymptotic when nu~ < 1, otherwise a
    /// degree-capping upper bound.
    Bound {
        #[arg(long)]
        dist: String,
    },
    /// Exact independence number of an edge-list file.
    Alpha {
        /// Path to an edge-list file (one "u v" pair per line, 0-indexed).
        #[arg(long)]
        graph: PathBuf,
        #[arg(long, default_value_t = 10_000_000)]
        budget: u64,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Policy {
    Greedy,
    DegreeGreedy,
    Exact,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum PhaseArg {
    #[value(name = "1")]
    One,
    #[value(name = "2")]
    Two,
    Both,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}

fn run(cli: &Cli) -> Result<u8, String> {
    match &cli.command {
        Command::Analyze { dist } => cmd_analyze(cli, dist),
        Command::Ratio { dist, max_stages } => cmd_ratio(cli, dist, *max_stages),
        Command::Simulate {
            dist,
            n,
            seeds,
            policy,
            budget,
            simple,
            trace,
        } => cmd_simulate(
            cli,
            dist,
            *n,
            *seeds,
            *policy,
            *budget,
            *simple,
            trace.as_deref(),
        ),
        Command::Fluid {
            dist,
            n,
            seeds,
            phase,
            sample_dt,
        } => cmd_fluid(cli, dist, *n, *seeds, *phase, *sample_dt),
        Command::Bound { dist } => cmd_bound(cli, dist),
        Command::Alpha { graph, budget } => cmd_alpha(cli, graph, *budget),
    }
}

fn load_dist(arg: &str) -> Result<DegreeDistribution, String> {
    let json = if let Some(path) = arg.strip_prefix('@') {
        fs::read_to_string(path).map_err(|e| format!("reading {path}: {e}"))?
    } else {
        arg.to_string()
    };
    let spec = DistSpec::parse(&json).map_err(|e| format!("bad distribution spec: {e}"))?;
    DegreeDistribution::from_spec(&spec).map_err(|e| format!("bad distribution: {e}"))
}

fn write_output(out: &Option<PathBuf>, content: &str) -> Result<(), String> {
    match out {
        Some(path) => fs::write(path, content).map_err(|e| format!("writing {path:?}: {e}")),
        None => {
            print!("{content}");
            std::io::stdout().flush().map_err(|e| e.to_string())
        }
    }
}

fn write_file(path: &Path, content: &str) -> Result<(), String> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            fs::create_dir_all(parent).map_err(|e| format!("creating {parent:?}: {e}"))?;
        }
    }
    fs::write(path, content).map_err(|e| format!("writing {path:?}: {e}"))
}

fn fmt_opt<T: std::fmt::Display>(v: &Option<T>) -> String {
    v.as_ref().map(|x| x.to_string()).unwrap_or_default()
}

fn cmd_analyze(cli: &Cli, dist: &str) -> Result<u8, String> {
    let d = load_dist(dist)?;
    let report = criticality(&d).map_err(|e| e.to_string())?;
    let mut text = serde_json::to_string_pretty(&report).map_err(|e| e.to_string())?;
    text.push('\n');
    write_output(&cli.out, &text)?;
    Ok(if report.one_step_quasi_optimal { 0 } else { 2 })
}

fn cmd_ratio(cli: &Cli, dist: &str, max_stages: usize) -> Result<u8, String> {
    let d = load_dist(dist)?;
    let result = iterate_m1(&d, max_stages);
    if cli.csv {
        let mut table = String::from(
            "stage,lambda_i,q_i,q_tilde_i,r_i,removed_fraction,survivor_fraction,ratio_increment\n",
        );
        for s in &result.stages {
            table.push_str(&format!(
                "{},{},{},{},{},{},{},{}\n",
                s.stage,
                s.lambda_i,
                s.q_i,
                s.q_tilde_i,
                s.r_i,
                s.removed_fraction,
                s.survivor_fraction,
                s.ratio_increment
            ));
        }
        write_output(&cli.out, &table)?;
    } else {
        let mut text = serde_json::to_string_pretty(&result).map_err(|e| e.to_string())?;
        text.push('\n');
        write_output(&cli.out, &text)?;
    }
    Ok(if result.terminated_subcritical { 0 } else { 3 })
}

/// Stable JSON record for one exploration run.
#[derive(Serialize)]
struct RunRecord {
    sigma: usize,
    n: usize,
    t1_violations: usize,
    first_violation_step: Option<usize>,
    remaining_nu_at_first_violation: Option<f64>,
    seed: u64,
}

struct SimRow {
    seed: u64,
    n: usize,
    exploration: ExplorationResult,
    bad_vertices: usize,
    alpha: Option<usize>,
    budget_exhausted: bool,
}

fn simulate_one(
    master: u64,
    index: u64,
    dist: &DegreeDistribution,
    n: usize,
    policy: Policy,
    budget: u64,
    simple: bool,
) -> Result<SimRow, String> {
    let mut graph_rng = stream(master, "simulate/graph", index);
    let degrees = sample_degrees(dist, n, &mut graph_rng);
    let g = if simple {
        condition_simple(&degrees, &mut graph_rng, 10_000)
            .map_err(|e| format!("seed {index}: {e}"))?
    } else {
        sample_cm(&degrees, &mut graph_rng).expect("parity-fixed sequence")
    };
    let stats = component_stats(&g);
    let mut run_rng = stream(master, "simulate/run", index);
    let exploration = match policy {
        Policy::Greedy => uniform_greedy(&g, &mut run_rng),
        Policy::DegreeGreedy | Policy::Exact => degree_greedy(&g, &mut run_rng),
    };
    let (alpha, budget_exhausted) = if policy == Policy::Exact {
        match exact_alpha(&g, budget) {
            Ok(r) => (Some(r.alpha), false),
            Err(ExactError::BudgetExceeded { best, .. }) => (Some(best), true),
            Err(_) => (None, true),
        }
    } else {
        (None, false)
    };
    Ok(SimRow {
        seed: index,
        n,
        exploration,
        bad_vertices: stats.bad_vertices,
        alpha,
        budget_exhausted,
    })
}

#[allow(clippy::too_many_arguments)]
fn cmd_simulate(
    cli: &Cli,
    dist: &str,
    n: usize,
    seeds: usize,
    policy: Policy,
    budget: u64,
    simple: bool,
    trace: Option<&Path>,
) -> Result<u8, String> {
    let d = load_dist(dist)?;
    if trace.is_some() && seeds != 1 {
        return Err("--trace requires --seeds 1".into());
    }

    let mut rows: Vec<SimRow> = Vec::with_capacity(seeds);
    if n == 0 {
        // Header-only output is valid.
    } else if cli.threads <= 1 || seeds <= 1 {
        for i in 0..seeds {
            let row = simulate_one(cli.seed, i as u64, &d, n, policy, budget, simple)?;
            if let Some(path) = trace {
                write_trace(path, &row.exploration)?;
            }
            rows.push(row);
        }
    } else {
        let threads = cli.threads.min(seeds);
        let master = cli.seed;
        let mut indexed: Vec<(usize, SimRow)> = std::thread::scope(|scope| {
            let mut handles = Vec::new();
            for t in 0..threads {
                let d = &d;
                handles.push(scope.spawn(move || {
                    let mut part = Vec::new();
                    let mut i = t;
                    while i < seeds {
                        let item = simulate_one(master, i as u64, d, n, policy, budget, simple)
                            .map(|row| (i, row));
                        part.push(item);
                        i += threads;
                    }
                    part
                }));
            }
            handles
                .into_iter()
                .flat_map(|h| h.join().expect("worker panicked"))
                .collect::<Result<Vec<_>, String>>()
        })?;
        indexed.sort_by_key(|(i, _)| *i);
        rows = indexed.into_iter().map(|(_, r)| r).collect();
    }

    let text = if cli.json {
        let mut out = String::new();
        for row in &rows {
            let record = RunRecord {
                sigma: row.exploration.sigma,
                n: row.n,
                t1_violations: row.exploration.t1_violations,
                first_violation_step: row.exploration.first_violation_step,
                remaining_nu_at_first_violation: row.exploration.remaining_nu_at_first_violation,
                seed: row.seed,
            };
            out.push_str(&serde_json::to_string(&record).map_err(|e| e.to_string())?);
            out.push('\n');
        }
        out
    } else {
        let mut out = String::from(
            "seed,sigma,n,t1_violations,first_violation_step,remaining_nu_at_first_violation,bad_vertices,alpha,budget_exhausted\n",
        );
        for row in &rows {
            out.push_str(&format!(
                "{},{},{},{},{},{},{},{},{}\n",
                row.seed,
                row.exploration.sigma,
                row.n,
                row.exploration.t1_violations,
                fmt_opt(&row.exploration.first_violation_step),
                fmt_opt(&row.exploration.remaining_nu_at_first_violation),
                row.bad_vertices,
                fmt_opt(&row.alpha),
                row.budget_exhausted
            ));
        }
        out
    };
    write_output(&cli.out, &text)?;
    Ok(0)
}

fn write_trace(path: &Path, result: &ExplorationResult) -> Result<(), String> {
    let mut out = String::from("step,vertex,degree_at_selection\n");
    for (i, (&v, &d)) in result
        .sequence
        .vertices
        .iter()
        .zip(&result.sequence.selected_degrees)
        .enumerate()
    {
        out.push_str(&format!("{i},{v},{d}\n"));
    }
    write_file(path, &out)
}

fn trajectory_csv(traj: &PhaseTrajectory) -> String {
    let mu_cols = traj.mu.first().map(|row| row.len()).unwrap_or(0);
    let mut header = String::from("t,u,a_or_b");
    for k in 0..mu_cols {
        header.push_str(&format!(",mu_{k}"));
    }
    header.push('\n');
    let mut out = header;
    for i in 0..traj.times.len() {
        out.push_str(&format!(
            "{},{},{}",
            traj.times[i], traj.u[i], traj.secondary[i]
        ));
        if mu_cols > 0 {
            for v in &traj.mu[i] {
                out.push_str(&format!(",{v}"));
            }
        }
        out.push('\n');
    }
    out
}

#[derive(Serialize)]
struct FluidMeta {
    n: usize,
    seed: u64,
    lambda: f64,
    p1: f64,
    #[serde(rename = "T1_or_T2_empirical")]
    t_empirical: f64,
    #[serde(rename = "T1_or_T2_closed_form")]
    t_closed_form: f64,
}

fn sup_dev(traj: &PhaseTrajectory, f: impl Fn(f64) -> f64, which: Which) -> f64 {
    let series = match which {
        Which::U => &traj.u,
        Which::Secondary => &traj.secondary,
    };
    traj.times
        .iter()
        .zip(series)
        .map(|(&t, &v)| (v - f(t)).abs())
        .fold(0.0, f64::max)
}

enum Which {
    U,
    Secondary,
}

fn cmd_fluid(
    cli: &Cli,
    dist: &str,
    n: usize,
    seeds: usize,
    phase: PhaseArg,
    sample_dt: f64,
) -> Result<u8, String> {
    let d = load_dist(dist)?;
    let (lambda, _) = d.moments();
    let p1 = d.mass(1);
    let curves: FluidCurves = fluid_curves(lambda, p1, &d).map_err(|e| e.to_string())?;

    let mut summary = String::from(
        "seed,phase,n,sup_u_dev,sup_secondary_dev,t_empirical,t_closed_form,flagged\n",
    );
    for i in 0..seeds {
        let mut deg_rng = stream(cli.seed, "fluid/degrees", i as u64);
        let degrees = sample_degrees(&d, n, &mut deg_rng);
        let mut p1_rng = stream(cli.seed, "fluid/phase1", i as u64);
        let run1 = simulate_phase1(&degrees, &mut p1_rng, sample_dt).map_err(|e| e.to_string())?;

        if matches!(phase, PhaseArg::One | PhaseArg::Both) {
            let mut traj = run1.trajectory.clone();
            traj.seed = i as u64;
            let sup_u = sup_dev(&traj, |t| curves.u_phase1(t), Which::U);
            let sup_a = sup_dev(&traj, |t| curves.a(t), Which::Secondary);
            summary.push_str(&format!(
                "{i},1,{n},{},{},{},{},{}\n",
                sup_u, sup_a, run1.t1, curves.t1, run1.flagged
            ));
            if let Some(prefix) = &cli.out {
                let base = prefix.display();
                write_file(
                    Path::new(&format!("{base}phase1_seed{i}.csv")),
                    &trajectory_csv(&traj),
                )?;
                let meta = FluidMeta {
                    n,
                    seed: i as u64,
                    lambda,
                    p1,
                    t_empirical: run1.t1,
                    t_closed_form: curves.t1,
                };
                write_file(
                    Path::new(&format!("{base}phase1_seed{i}.meta.json")),
                    &format!(
                        "{}\n",
                        serde_json::to_string_pretty(&meta).map_err(|e| e.to_string())?
                    ),
                )?;
            }
        }

        if matches!(phase, PhaseArg::Two | PhaseArg::Both) {
            let mut p2_rng = stream(cli.seed, "fluid/phase2", i as u64);
            let run2 = simulate_phase2(run1.state, &mut p2_rng, sample_dt);
            let mut traj = run2.trajectory;
            traj.seed = i as u64;
            let sup_u = sup_dev(&traj, |t| curves.u_phase2(t), Which::U);
            let sup_b = sup_dev(&traj, |t| curves.b(t), Which::Secondary);
            summary.push_str(&format!(
                "{i},2,{n},{},{},{},{},{}\n",
                sup_u, sup_b, run2.t2, curves.t2, run2.flagged
            ));
            if let Some(prefix) = &cli.out {
                let base = prefix.display();
                write_file(
                    Path::new(&format!("{base}phase2_seed{i}.csv")),
                    &trajectory_csv(&traj),
                )?;
                let meta = FluidMeta {
                    n,
                    seed: i as u64,
                    lambda,
                    p1,
                    t_empirical: run2.t2,
                    t_closed_form: curves.t2,
                };
                write_file(
                    Path::new(&format!("{base}phase2_seed{i}.meta.json")),
                    &format!(
                        "{}\n",
                        serde_json::to_string_pretty(&meta).map_err(|e| e.to_string())?
                    ),
                )?;
            }
        }
    }

    print!("{summary}");
    std::io::stdout().flush().map_err(|e| e.to_string())?;
    if let Some(prefix) = &cli.out {
        let base = prefix.display();
        write_file(Path::new(&format!("{base}summary.csv")), &summary)?;
    }
    Ok(0)
}

#[derive(Serialize)]
struct BoundReport {
    kind: &'static str,
    value: f64,
    nu_tilde: Option<f64>,
    stages_used: usize,
}

fn cmd_bound(cli: &Cli, dist: &str) -> Result<u8, String> {
    let d = load_dist(dist)?;
    let report = match criticality(&d) {
        Ok(r) => Some(r),
        Err(degreedy::SpectraError::ZeroMeanDegree) => None,
        Err(e) => return Err(e.to_string()),
    };
    let bound = match report {
        Some(r) if r.nu_tilde >= 1.0 => {
            let (_, value) = degree_cap_upper_bound(&d).map_err(|e| e.to_string())?;
            BoundReport {
                kind: "upper_bound",
                value,
                nu_tilde: Some(r.nu_tilde),
                stages_used: 0,
            }
        }
        Some(r) => {
            let ratio = iterate_m1(&d, 400);
            BoundReport {
                kind: "exact-asymptotic",
                value: ratio.ratio,
                nu_tilde: Some(r.nu_tilde),
                stages_used: ratio.stages_used,
            }
        }
        None => {
            let ratio = iterate_m1(&d, 400);
            BoundReport {
                kind: "exact-asymptotic",
                value: ratio.ratio,
                nu_tilde: None,
                stages_used: ratio.stages_used,
            }
        }
    };
    let mut text = serde_json::to_string_pretty(&bound).map_err(|e| e.to_string())?;
    text.push('\n');
    write_output(&cli.out, &text)?;
    Ok(0)
}

#[derive(Serialize)]
struct AlphaReport {
    alpha: usize,
    nodes_explored: u64,
}

fn cmd_alpha(cli: &Cli, graph: &Path, budget: u64) -> Result<u8, String> {
    let text = fs::read_to_string(graph).map_err(|e| format!("reading {graph:?}: {e}"))?;
    let g = MultiGraph::parse_edge_list(&text, 0).map_err(|e| e.to_string())?;
    let result = exact_alpha(&g, budget).map_err(|e| e.to_string())?;
    let report = AlphaReport {
        alpha: result.alpha,
        nodes_explored: result.nodes_explored,
    };
    let mut out = serde_json::to_string_pretty(&report).map_err(|e| e.to_string())?;
    out.push('\n');
    write_output(&cli.out, &out)?;
    Ok(0)
}
