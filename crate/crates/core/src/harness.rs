//! Experiment orchestration: seeded Monte Carlo batches over graph families
//! and epidemic engines, optional parameter sweeps, theory-versus-simulation
//! comparison, and CSV emission for plotting.
//!
//! Per-trial seeds derive from `(master_seed, grid_index, trial_index)` with
//! a fixed mixing function, trials run in parallel over a work queue, and
//! aggregation folds in trial-index order, so results are identical for any
//! worker count and reproduce byte-for-byte from the embedded spec.

use std::collections::BTreeMap;
use std::sync::Arc;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::epidemic::{
    final_set_via_percolation, run_ct_sir, run_reed_frost, EpidemicConfig, EpidemicError,
    InfectiousPeriodLaw,
};
use crate::generators::{self, GeneratorError, KernelSpec};
use crate::graph::Graph;
use crate::rng::{derive_seed, seeded_rng};
use crate::spectral::{clv_radius_estimate, SpectralError};
use crate::theory::{
    epidemic_lower_bound_complete, kernel_outbreak_fraction, upper_bound_general,
    upper_bound_regular, Applicability, BoundEntry, TheoryError,
};

const GRAPH_SALT: u64 = 0x6772_6170;
const INIT_SALT: u64 = 0x696e_6974;
const EPI_SALT: u64 = 0x6570_6964;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("invalid spec field `{field}`: {msg}")]
    Invalid { field: &'static str, msg: String },
    #[error("no theory bound is applicable at any grid point")]
    NoApplicableBounds,
    #[error(transparent)]
    Generator(#[from] GeneratorError),
    #[error(transparent)]
    Epidemic(#[from] EpidemicError),
    #[error(transparent)]
    Theory(#[from] TheoryError),
    #[error(transparent)]
    Spectral(#[from] SpectralError),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

/// Graph family and its parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "snake_case")]
pub enum FamilySpec {
    Star { n: usize },
    Ring { n: usize },
    Complete { n: usize },
    ErdosRenyi { n: usize, p: f64 },
    ChungLu { n: usize, d: f64, max_degree: f64, gamma: f64 },
    ParetoKernel { n: usize, gamma: f64 },
}

impl FamilySpec {
    pub fn node_count(&self) -> usize {
        match *self {
            FamilySpec::Star { n }
            | FamilySpec::Ring { n }
            | FamilySpec::Complete { n }
            | FamilySpec::ErdosRenyi { n, .. }
            | FamilySpec::ChungLu { n, .. }
            | FamilySpec::ParetoKernel { n, .. } => n,
        }
    }

    /// Whether fresh randomness enters the graph itself.
    pub fn is_random(&self) -> bool {
        matches!(
            self,
            FamilySpec::ErdosRenyi { .. }
                | FamilySpec::ChungLu { .. }
                | FamilySpec::ParetoKernel { .. }
        )
    }

    pub fn generate(&self, seed: u64) -> Result<Graph, HarnessError> {
        Ok(match *self {
            FamilySpec::Star { n } => generators::star(n)?,
            FamilySpec::Ring { n } => generators::ring(n)?,
            FamilySpec::Complete { n } => generators::complete(n)?,
            FamilySpec::ErdosRenyi { n, p } => generators::erdos_renyi(n, p, seed)?,
            FamilySpec::ChungLu {
                n,
                d,
                max_degree,
                gamma,
            } => {
                let weights = generators::power_law_weights(n, d, max_degree, gamma)?;
                generators::chung_lu(&weights, seed)
            }
            FamilySpec::ParetoKernel { n, gamma } => {
                let kernel = KernelSpec::pareto(gamma, n)?;
                generators::kernel_graph(n, &kernel, seed)?.graph
            }
        })
    }
}

/// Which epidemic engine runs each trial.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "snake_case")]
pub enum EngineSpec {
    ReedFrost,
    Percolation,
    ContinuousTime { law: InfectiousPeriodLaw },
}

/// How the initial infective set is chosen.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum InitialSpec {
    Explicit { nodes: Vec<usize> },
    /// The maximum-degree node, ties to the smallest id.
    Hub,
    /// `k` distinct uniform picks from the trial's stream.
    Random { k: usize },
}

impl InitialSpec {
    fn count(&self) -> usize {
        match self {
            InitialSpec::Explicit { nodes } => nodes.len(),
            InitialSpec::Hub => 1,
            InitialSpec::Random { k } => *k,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepParameter {
    Beta,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepAxis {
    pub parameter: SweepParameter,
    pub values: Vec<f64>,
}

/// Full description of a reproducible experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentSpec {
    pub family: FamilySpec,
    pub engine: EngineSpec,
    /// Transmissibility for the discrete engines; ignored (and optional)
    /// for the continuous-time engine and when a sweep supplies it.
    #[serde(default)]
    pub beta: Option<f64>,
    pub initial: InitialSpec,
    pub trials: usize,
    pub master_seed: u64,
    #[serde(default)]
    pub sweep: Option<SweepAxis>,
    /// Condition on one graph realisation instead of resampling per trial.
    #[serde(default)]
    pub fixed_graph: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<String>,
}

impl ExperimentSpec {
    pub fn validate(&self) -> Result<(), HarnessError> {
        let n = self.family.node_count();
        if self.trials == 0 {
            return Err(HarnessError::Invalid {
                field: "trials",
                msg: "must be at least 1".into(),
            });
        }
        match &self.family {
            FamilySpec::ErdosRenyi { p, .. } => {
                if !(0.0..=1.0).contains(p) {
                    return Err(HarnessError::Invalid {
                        field: "family.p",
                        msg: format!("edge probability {p} outside [0, 1]"),
                    });
                }
            }
            FamilySpec::ChungLu { d, max_degree, gamma, .. } => {
                if gamma.is_nan() || *gamma <= 2.0 {
                    return Err(HarnessError::Invalid {
                        field: "family.gamma",
                        msg: format!("power-law exponent {gamma} must exceed 2"),
                    });
                }
                if d.is_nan() || *d <= 0.0 || d > max_degree {
                    return Err(HarnessError::Invalid {
                        field: "family.d",
                        msg: format!("need 0 < d <= max_degree, got d={d}, max={max_degree}"),
                    });
                }
            }
            FamilySpec::ParetoKernel { gamma, .. } if gamma.is_nan() || *gamma <= 2.0 => {
                return Err(HarnessError::Invalid {
                    field: "family.gamma",
                    msg: format!("power-law exponent {gamma} must exceed 2"),
                });
            }
            _ => {}
        }
        match &self.initial {
            InitialSpec::Explicit { nodes } => {
                if nodes.is_empty() {
                    return Err(HarnessError::Invalid {
                        field: "initial.nodes",
                        msg: "must be non-empty".into(),
                    });
                }
                if let Some(&bad) = nodes.iter().find(|&&u| u >= n) {
                    return Err(HarnessError::Invalid {
                        field: "initial.nodes",
                        msg: format!("node {bad} out of range for {n} nodes"),
                    });
                }
            }
            InitialSpec::Random { k } => {
                if *k == 0 || *k > n {
                    return Err(HarnessError::Invalid {
                        field: "initial.k",
                        msg: format!("need 1 <= k <= {n}, got {k}"),
                    });
                }
            }
            InitialSpec::Hub => {}
        }
        if let Some(sweep) = &self.sweep {
            if sweep.values.is_empty() {
                return Err(HarnessError::Invalid {
                    field: "sweep.values",
                    msg: "grid must be non-empty".into(),
                });
            }
            if !sweep.values.windows(2).all(|w| w[0] < w[1]) {
                return Err(HarnessError::Invalid {
                    field: "sweep.values",
                    msg: "grid must be strictly increasing".into(),
                });
            }
            if matches!(self.engine, EngineSpec::ContinuousTime { .. }) {
                return Err(HarnessError::Invalid {
                    field: "sweep.parameter",
                    msg: "beta sweeps do not apply to the continuous-time engine".into(),
                });
            }
            if sweep.values.iter().any(|b| !(0.0..=1.0).contains(b)) {
                return Err(HarnessError::Invalid {
                    field: "sweep.values",
                    msg: "beta grid values must lie in [0, 1]".into(),
                });
            }
        } else if !matches!(self.engine, EngineSpec::ContinuousTime { .. }) {
            match self.beta {
                Some(b) if (0.0..=1.0).contains(&b) => {}
                Some(b) => {
                    return Err(HarnessError::Invalid {
                        field: "beta",
                        msg: format!("{b} outside [0, 1]"),
                    });
                }
                None => {
                    return Err(HarnessError::Invalid {
                        field: "beta",
                        msg: "required for the reed-frost and percolation engines".into(),
                    });
                }
            }
        }
        Ok(())
    }

    pub fn canonical_json(&self) -> String {
        serde_json::to_string(self).expect("spec serialises")
    }

    pub fn hash(&self) -> String {
        let digest = Sha256::digest(self.canonical_json().as_bytes());
        digest.iter().map(|b| format!("{b:02x}")).collect()
    }
}

/// One trial's outcome, as persisted.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub final_removed: u64,
    pub extinction_time: u32,
    pub trial_seed: u64,
}

/// Aggregates for one grid point, with the applicable theory bounds.
#[derive(Debug, Clone, Serialize)]
pub struct GridPointSummary {
    pub sweep_value: f64,
    pub trials: usize,
    pub mean_final_size: f64,
    /// Sample variance (zero for a single trial).
    pub variance: f64,
    /// Sample standard deviation / sqrt(trials).
    pub std_error: f64,
    /// Fraction of trials whose final size exceeded n/10.
    pub exceed_tenth_fraction: f64,
    pub bounds: BTreeMap<String, BoundEntry>,
    pub records: Vec<TrialRecord>,
}

/// Result of a full experiment, embedding its spec and provenance.
#[derive(Debug, Clone, Serialize)]
pub struct SweepResult {
    pub spec: ExperimentSpec,
    pub spec_hash: String,
    pub master_seed: u64,
    pub toolkit_version: String,
    pub points: Vec<GridPointSummary>,
}

fn resolve_initial(g: &Graph, spec: &InitialSpec, seed: u64) -> Vec<usize> {
    match spec {
        InitialSpec::Explicit { nodes } => nodes.clone(),
        InitialSpec::Hub => {
            let mut hub = 0usize;
            for u in 1..g.node_count() {
                if g.degree(u) > g.degree(hub) {
                    hub = u;
                }
            }
            vec![hub]
        }
        InitialSpec::Random { k } => {
            // Floyd's sampling: k distinct uniform picks.
            let n = g.node_count();
            let mut rng = seeded_rng(seed);
            let mut chosen: Vec<usize> = Vec::with_capacity(*k);
            for i in (n - k)..n {
                let t = rng.random_range(0..=i);
                if chosen.contains(&t) {
                    chosen.push(i);
                } else {
                    chosen.push(t);
                }
            }
            chosen.sort_unstable();
            chosen
        }
    }
}

#[allow(clippy::too_many_arguments)]
fn run_trial(
    engine: &EngineSpec,
    family: Option<&FamilySpec>,
    shared_graph: Option<&Arc<Graph>>,
    initial_spec: &InitialSpec,
    master_seed: u64,
    beta: f64,
    grid_index: u64,
    trial_index: u64,
) -> Result<TrialRecord, HarnessError> {
    let trial_seed = derive_seed(master_seed, &[grid_index, trial_index]);
    let local;
    let graph: &Graph = match shared_graph {
        Some(g) => g,
        None => {
            let family = family.expect("either a shared graph or a family");
            local = family.generate(derive_seed(trial_seed, &[GRAPH_SALT]))?;
            &local
        }
    };
    let initial = resolve_initial(graph, initial_spec, derive_seed(trial_seed, &[INIT_SALT]));
    let epi_seed = derive_seed(trial_seed, &[EPI_SALT]);
    let outcome = match engine {
        EngineSpec::ReedFrost => {
            run_reed_frost(graph, &EpidemicConfig::new(beta, initial, epi_seed)?)?
        }
        EngineSpec::Percolation => {
            final_set_via_percolation(graph, &EpidemicConfig::new(beta, initial, epi_seed)?)?
        }
        EngineSpec::ContinuousTime { law } => run_ct_sir(graph, law, &initial, epi_seed)?,
    };
    Ok(TrialRecord {
        final_removed: outcome.final_removed as u64,
        extinction_time: outcome.extinction_time,
        trial_seed,
    })
}

fn summarize_records(
    records: Vec<TrialRecord>,
    n: usize,
    sweep_value: f64,
    bounds: BTreeMap<String, BoundEntry>,
) -> GridPointSummary {
    let trials = records.len();
    let mut sum = 0u128;
    let mut sum_sq = 0u128;
    let mut exceed = 0usize;
    for r in &records {
        sum += r.final_removed as u128;
        sum_sq += (r.final_removed as u128) * (r.final_removed as u128);
        if r.final_removed as f64 > n as f64 / 10.0 {
            exceed += 1;
        }
    }
    let t = trials as f64;
    let mean = sum as f64 / t;
    let variance = if trials > 1 {
        ((sum_sq as f64 - (sum as f64) * (sum as f64) / t) / (t - 1.0)).max(0.0)
    } else {
        0.0
    };
    GridPointSummary {
        sweep_value,
        trials,
        mean_final_size: mean,
        variance,
        std_error: (variance / t).sqrt(),
        exceed_tenth_fraction: exceed as f64 / t,
        bounds,
        records,
    }
}

/// Monte Carlo over a fixed, already-loaded graph (the `--graph FILE` path
/// of the CLI). Same seed derivation and fold order as [`run_experiment`].
pub fn simulate_graph(
    graph: &Arc<Graph>,
    engine: &EngineSpec,
    beta: Option<f64>,
    initial: &InitialSpec,
    trials: usize,
    master_seed: u64,
) -> Result<GridPointSummary, HarnessError> {
    if trials == 0 {
        return Err(HarnessError::Invalid {
            field: "trials",
            msg: "must be at least 1".into(),
        });
    }
    let beta_point = match engine {
        EngineSpec::ContinuousTime { .. } => 0.0,
        _ => beta.ok_or(HarnessError::Invalid {
            field: "beta",
            msg: "required for the reed-frost and percolation engines".into(),
        })?,
    };
    let records: Result<Vec<TrialRecord>, HarnessError> = (0..trials as u64)
        .into_par_iter()
        .map(|ti| {
            run_trial(
                engine,
                None,
                Some(graph),
                initial,
                master_seed,
                beta_point,
                0,
                ti,
            )
        })
        .collect();
    let sweep_value = match engine {
        EngineSpec::ContinuousTime { law } => law.contact_rate,
        _ => beta_point,
    };
    Ok(summarize_records(
        records?,
        graph.node_count(),
        sweep_value,
        BTreeMap::new(),
    ))
}

/// Theory bounds attached to a grid point, keyed `upper_*` / `lower_*` so
/// comparisons know their direction. `trans` is the per-edge
/// transmissibility (`beta`, or `p_J` for the continuous-time engine).
fn theory_bounds(
    family: &FamilySpec,
    x0: usize,
    trans: f64,
) -> Result<BTreeMap<String, BoundEntry>, HarnessError> {
    let mut bounds = BTreeMap::new();
    let n = family.node_count();
    match family {
        FamilySpec::Star { n } => {
            let lambda1 = ((n - 1) as f64).sqrt();
            bounds.insert(
                "upper_general".into(),
                upper_bound_general(*n, lambda1, trans, x0).into(),
            );
        }
        FamilySpec::Ring { .. } => {
            bounds.insert(
                "upper_regular".into(),
                upper_bound_regular(2.0, trans, x0).into(),
            );
        }
        FamilySpec::Complete { n } => {
            let degree = (n - 1) as f64;
            bounds.insert(
                "upper_regular".into(),
                upper_bound_regular(degree, trans, x0).into(),
            );
            let c = trans * degree;
            if c > 0.0 {
                bounds.insert(
                    "lower_complete".into(),
                    epidemic_lower_bound_complete(*n, c)?.into(),
                );
            }
        }
        FamilySpec::ErdosRenyi { n, p } => {
            let c = trans * (*n as f64 - 1.0) * p;
            // Branching-process domination: mean total progeny x0 / (1 - c).
            let upper = if c < 1.0 {
                Applicability::Applicable(x0 as f64 / (1.0 - c))
            } else {
                Applicability::Inapplicable {
                    reason: format!("c = {c} >= 1: branching bound void"),
                }
            };
            bounds.insert("upper_branching".into(), upper.into());
            if c > 0.0 {
                bounds.insert(
                    "lower_giant".into(),
                    epidemic_lower_bound_complete(*n, c)?.into(),
                );
            }
        }
        FamilySpec::ChungLu {
            d,
            max_degree,
            gamma,
            ..
        } => {
            if *gamma != 2.5 {
                let estimate = clv_radius_estimate(*d, *max_degree, *gamma)?;
                bounds.insert(
                    "clv_lambda1_estimate".into(),
                    BoundEntry {
                        value: Some(estimate),
                        applicable: true,
                        note: Some("asymptotic spectral-radius estimate, not a bound".into()),
                    },
                );
            }
        }
        FamilySpec::ParetoKernel { n, gamma } => {
            let kernel = KernelSpec::pareto(*gamma, *n)?;
            let sol = kernel_outbreak_fraction(&kernel, trans, 512)?;
            let lower = if sol.criticality > 1.0 {
                Applicability::Applicable(sol.tau * sol.tau * *n as f64)
            } else {
                Applicability::Inapplicable {
                    reason: format!("beta ||T_W|| = {} <= 1", sol.criticality),
                }
            };
            bounds.insert("lower_kernel_outbreak".into(), lower.into());
        }
    }
    let _ = n;
    Ok(bounds)
}

/// Runs every grid point of the spec. Deterministic given the master seed,
/// independent of worker count.
pub fn run_experiment(spec: &ExperimentSpec) -> Result<SweepResult, HarnessError> {
    spec.validate()?;
    let grid: Vec<f64> = match &spec.sweep {
        Some(axis) => axis.values.clone(),
        None => match &spec.engine {
            EngineSpec::ContinuousTime { law } => vec![law.contact_rate],
            _ => vec![spec.beta.expect("validated")],
        },
    };
    let n = spec.family.node_count();
    let mut points = Vec::with_capacity(grid.len());
    for (gi, &value) in grid.iter().enumerate() {
        let beta = match &spec.engine {
            EngineSpec::ContinuousTime { .. } => 0.0,
            _ => value,
        };
        let shared: Option<Arc<Graph>> = if !spec.family.is_random() {
            Some(Arc::new(spec.family.generate(0)?))
        } else if spec.fixed_graph {
            let seed = derive_seed(spec.master_seed, &[GRAPH_SALT, gi as u64]);
            Some(Arc::new(spec.family.generate(seed)?))
        } else {
            None
        };
        let records: Result<Vec<TrialRecord>, HarnessError> = (0..spec.trials as u64)
            .into_par_iter()
            .map(|ti| {
                run_trial(
                    &spec.engine,
                    Some(&spec.family),
                    shared.as_ref(),
                    &spec.initial,
                    spec.master_seed,
                    beta,
                    gi as u64,
                    ti,
                )
            })
            .collect();

        let trans = match &spec.engine {
            EngineSpec::ContinuousTime { law } => crate::epidemic::effective_transmissibility(law),
            _ => beta,
        };
        let bounds = theory_bounds(&spec.family, spec.initial.count(), trans)?;
        // Deterministic fold in trial-index order over exact integer sums.
        points.push(summarize_records(records?, n, value, bounds));
    }
    Ok(SweepResult {
        spec: spec.clone(),
        spec_hash: spec.hash(),
        master_seed: spec.master_seed,
        toolkit_version: env!("CARGO_PKG_VERSION").to_string(),
        points,
    })
}

/// One row of a theory-versus-simulation comparison.
#[derive(Debug, Clone, Serialize)]
pub struct ComparisonRow {
    pub sweep_value: f64,
    pub mean: f64,
    pub std_error: f64,
    /// Tightest applicable upper bound, if any.
    pub upper_bound: Option<f64>,
    /// Largest applicable lower bound, if any.
    pub lower_bound: Option<f64>,
    /// `mean - 3 SE <= upper` (one-sided statistical check).
    pub upper_ok: Option<bool>,
    /// `mean + 3 SE >= 0.9 * lower` (asymptotic lower bounds get a 0.9
    /// policy factor, labeled as such).
    pub lower_ok: Option<bool>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ComparisonTable {
    pub result: SweepResult,
    pub rows: Vec<ComparisonRow>,
    pub all_passed: bool,
}

/// Runs the experiment and checks each grid point against its applicable
/// bounds. Errors if no bound applies anywhere.
pub fn compare_theory(spec: &ExperimentSpec) -> Result<ComparisonTable, HarnessError> {
    let result = run_experiment(spec)?;
    let mut rows = Vec::with_capacity(result.points.len());
    let mut any_applicable = false;
    let mut all_passed = true;
    for point in &result.points {
        let upper = point
            .bounds
            .iter()
            .filter(|(name, entry)| name.starts_with("upper") && entry.applicable)
            .filter_map(|(_, entry)| entry.value)
            .fold(None, |acc: Option<f64>, v| {
                Some(acc.map_or(v, |a| a.min(v)))
            });
        let lower = point
            .bounds
            .iter()
            .filter(|(name, entry)| name.starts_with("lower") && entry.applicable)
            .filter_map(|(_, entry)| entry.value)
            .fold(None, |acc: Option<f64>, v| {
                Some(acc.map_or(v, |a| a.max(v)))
            });
        let upper_ok =
            upper.map(|u| point.mean_final_size - 3.0 * point.std_error <= u);
        let lower_ok =
            lower.map(|l| point.mean_final_size + 3.0 * point.std_error >= 0.9 * l);
        if upper.is_some() || lower.is_some() {
            any_applicable = true;
        }
        if upper_ok == Some(false) || lower_ok == Some(false) {
            all_passed = false;
        }
        rows.push(ComparisonRow {
            sweep_value: point.sweep_value,
            mean: point.mean_final_size,
            std_error: point.std_error,
            upper_bound: upper,
            lower_bound: lower,
            upper_ok,
            lower_ok,
        });
    }
    if !any_applicable {
        return Err(HarnessError::NoApplicableBounds);
    }
    Ok(ComparisonTable {
        result,
        rows,
        all_passed,
    })
}

fn fmt17(v: f64) -> String {
    format!("{v:.16e}")
}

/// Writes one CSV row per grid point with 17-significant-digit numbers.
/// Inapplicable bounds leave their cells empty.
pub fn emit_plot_data(result: &SweepResult, path: &std::path::Path) -> Result<(), HarnessError> {
    let mut out = String::new();
    out.push_str("sweep_value,mean,se,bound_upper,bound_lower,upper_applicable,lower_applicable\n");
    for point in &result.points {
        let upper = point
            .bounds
            .iter()
            .filter(|(name, e)| name.starts_with("upper") && e.applicable)
            .filter_map(|(_, e)| e.value)
            .fold(None, |acc: Option<f64>, v| Some(acc.map_or(v, |a| a.min(v))));
        let lower = point
            .bounds
            .iter()
            .filter(|(name, e)| name.starts_with("lower") && e.applicable)
            .filter_map(|(_, e)| e.value)
            .fold(None, |acc: Option<f64>, v| Some(acc.map_or(v, |a| a.max(v))));
        out.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            fmt17(point.sweep_value),
            fmt17(point.mean_final_size),
            fmt17(point.std_error),
            upper.map(fmt17).unwrap_or_default(),
            lower.map(fmt17).unwrap_or_default(),
            upper.is_some(),
            lower.is_some(),
        ));
    }
    std::fs::write(path, out)?;
    Ok(())
}
