//! Degree-greedy exploration of configuration-model random graphs.
//!
//! The crate is a small laboratory built around one question: when does the
//! degree-greedy heuristic (repeatedly activate a uniform minimum-degree
//! vertex, block its neighbours) find an independent set of asymptotically
//! maximum size in a sparse random graph with prescribed degrees?
//!
//! It is organised as six cooperating modules:
//!
//! * [`dist`] — truncated degree distributions (Poisson, power-law, explicit)
//!   with moment and generating-function queries.
//! * [`spectra`] — the analytic engine: criticality parameters, the one-round
//!   leaf-removal map `M1` in closed form, its iteration to an independence
//!   ratio, Poisson-mixture recursions and degree-capping upper bounds.
//! * [`graphgen`] — half-edge configuration-model sampling plus component and
//!   cycle statistics.
//! * [`explore`] — the degree-greedy and uniform-greedy exploration engines
//!   and a replay verifier for selection sequences.
//! * [`exact`] — exact maximum-independent-set solvers (branch and bound, and
//!   a brute-force oracle) for desk-scale cross-validation.
//! * [`fluid`] — event-driven simulation of the two matching phases behind
//!   `M1`, their closed-form hydrodynamic curves, an RK4 oracle for the
//!   pure-death degree system, and the pairing urn process.
//!
//! All randomness flows through [`rng::stream`], so every experiment is
//! reproducible from a `(master seed, domain, index)` triple.

pub mod dist;
pub mod exact;
pub mod explore;
pub mod fluid;
pub mod graphgen;
pub mod rng;
pub mod spectra;
pub mod zeta;

pub use dist::{DegreeDistribution, DistError, DistSpec};
pub use exact::{brute_alpha, exact_alpha, ExactError, ExactResult};
pub use explore::{
    degree_greedy, uniform_greedy, verify_selection_sequence, ExplorationResult, ExploreError,
    SelectionSequence, SequenceCheck,
};
pub use fluid::{
    fluid_curves, ode_oracle, simulate_phase1, simulate_phase2, untouched_fractions, urn_simulate,
    FluidCurves, FluidError, Phase1Run, Phase2Run, PhaseTrajectory, PhaseTwoState, UrnRun,
};
pub use graphgen::{
    component_stats, condition_simple, random_tree, sample_cm, sample_degrees, ComponentStats,
    DegreeSequence, GraphError, MultiGraph,
};
pub use spectra::{
    apply_m1, criticality, degree_cap_upper_bound, iterate_m1, poisson_lambda0, poisson_m1_step,
    powerlaw_threshold, CriticalityReport, M1Stage, M1StageRecord, PoissonMixtureState,
    RatioResult, SpectraError,
};
