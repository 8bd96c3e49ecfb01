//! SIR epidemics on networks.
//!
//! The crate covers the full loop from graph to verdict:
//!
//! * [`graph`] — immutable undirected graphs with degree, component and
//!   edge-list primitives;
//! * [`generators`] — star / ring / complete graphs, Erdős-Rényi and
//!   expected-degree (Chung-Lu) sampling, and kernel graphs with uniform
//!   node marks, all reproducible from a seed;
//! * [`spectral`] — the largest adjacency eigenvalue by power iteration,
//!   closed forms for the special families, and kernel operator norms;
//! * [`epidemic`] — the discrete-time (Reed-Frost) engine, the equivalent
//!   bond-percolation construction, and a continuous-time variant with
//!   deterministic or exponential infectious periods;
//! * [`theory`] — outbreak bounds, the giant-component fixed point,
//!   power-law core formulas and the kernel outbreak fraction;
//! * [`harness`] — reproducible Monte Carlo experiments, sweeps, and
//!   theory-versus-simulation comparison tables.

pub mod epidemic;
pub mod generators;
pub mod graph;
pub mod harness;
pub mod rng;
pub mod spectral;
pub mod theory;

pub use epidemic::{
    effective_transmissibility, final_set_via_percolation, percolate, run_ct_sir, run_reed_frost,
    EpidemicConfig, EpidemicOutcome, InfectiousPeriodLaw, PeriodKind,
};
pub use generators::{
    chung_lu, complete, erdos_renyi, kernel_graph, power_law_weights, ring, star, KernelSpec,
    WeightSequence,
};
pub use graph::{ComponentLabeling, DegreeStats, Graph};
pub use harness::{
    compare_theory, emit_plot_data, run_experiment, EngineSpec, ExperimentSpec, FamilySpec,
    InitialSpec, SweepAxis, SweepParameter, SweepResult,
};
pub use spectral::{
    clv_radius_estimate, closed_form_radius, kernel_operator_norm, spectral_radius,
    ClosedFormFamily, SpectralOptions, SpectralReport,
};
pub use theory::{
    core_size, epidemic_lower_bound_complete, giant_fraction, kernel_outbreak_fraction,
    pareto_threshold, subgraph_mean_degree, upper_bound_general, upper_bound_regular,
    upper_bound_theorem2, Applicability, TheoryReport,
};
