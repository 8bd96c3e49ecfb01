//! Command-line driver: generate graphs, run epidemic simulations, compute
//! spectral quantities and theory bounds, and drive reproducible sweeps.
//!
//! Exit codes: 0 on success, 1 on execution errors, 2 when `compare` or
//! `bounds --check` finds a failed theory check.

use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::Arc;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use epinet::epidemic::{effective_transmissibility, InfectiousPeriodLaw};
use epinet::generators::{self, KernelSpec};
use epinet::graph::Graph;
use epinet::harness::{
    compare_theory, emit_plot_data, run_experiment, simulate_graph, EngineSpec, ExperimentSpec,
    FamilySpec, InitialSpec, SweepAxis, SweepParameter,
};
use epinet::spectral::{
    clv_radius_estimate, closed_form_radius, kernel_operator_norm, spectral_radius,
    ClosedFormFamily, SpectralOptions,
};
use epinet::theory::{
    self, core_size, epidemic_lower_bound_complete, giant_fraction, kernel_outbreak_fraction,
    pareto_threshold, subgraph_mean_degree, upper_bound_general, upper_bound_regular,
    upper_bound_theorem2, Applicability, TheoryReport,
};

#[derive(Parser)]
#[command(
    name = "epinet",
    version,
    about = "SIR epidemics on networks: graph ensembles, simulation engines, spectral thresholds and outbreak bounds"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a graph and write it as an edge list with a JSON sidecar.
    Generate(GenerateArgs),
    /// Run epidemic trials; one JSON record per trial plus a summary.
    Simulate(SimulateArgs),
    /// Spectral radius and degree summary of an edge-list file.
    Spectral(SpectralArgs),
    /// Closed-form bounds and thresholds for a family, optionally checked
    /// against a paired Monte Carlo run.
    Bounds(BoundsArgs),
    /// Run a (swept) experiment and persist the full result.
    Sweep(SweepArgs),
    /// Run an experiment and check simulated means against theory bounds.
    Compare(SweepArgs),
}

#[derive(Args, Clone)]
struct FamilyArgs {
    /// star | ring | complete | er | chung-lu | pareto-kernel
    #[arg(long)]
    family: Option<String>,
    /// Node count.
    #[arg(long)]
    n: Option<usize>,
    /// Edge probability (er).
    #[arg(long)]
    p: Option<f64>,
    /// Target average degree (chung-lu).
    #[arg(long)]
    d: Option<f64>,
    /// Target maximum degree (chung-lu).
    #[arg(long)]
    max_degree: Option<f64>,
    /// Power-law exponent (chung-lu, pareto-kernel).
    #[arg(long)]
    gamma: Option<f64>,
}

impl FamilyArgs {
    fn to_spec(&self) -> Result<FamilySpec> {
        let name = self
            .family
            .as_deref()
            .ok_or_else(|| anyhow!("--family is required (or supply --graph / --config)"))?;
        let n = self.n.ok_or_else(|| anyhow!("--n is required"))?;
        Ok(match name {
            "star" => FamilySpec::Star { n },
            "ring" => FamilySpec::Ring { n },
            "complete" => FamilySpec::Complete { n },
            "er" | "erdos-renyi" => FamilySpec::ErdosRenyi {
                n,
                p: self.p.ok_or_else(|| anyhow!("--p is required for er"))?,
            },
            "chung-lu" | "power-law" => FamilySpec::ChungLu {
                n,
                d: self.d.ok_or_else(|| anyhow!("--d is required for chung-lu"))?,
                max_degree: self
                    .max_degree
                    .ok_or_else(|| anyhow!("--max-degree is required for chung-lu"))?,
                gamma: self
                    .gamma
                    .ok_or_else(|| anyhow!("--gamma is required for chung-lu"))?,
            },
            "pareto-kernel" | "kernel" => FamilySpec::ParetoKernel {
                n,
                gamma: self
                    .gamma
                    .ok_or_else(|| anyhow!("--gamma is required for pareto-kernel"))?,
            },
            other => bail!("unknown family `{other}`"),
        })
    }
}

#[derive(Args)]
struct GenerateArgs {
    #[command(flatten)]
    family: FamilyArgs,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Edge-list output path.
    #[arg(long)]
    out: PathBuf,
    /// Sidecar path; defaults to `<out>.meta.json`.
    #[arg(long)]
    meta: Option<PathBuf>,
}

#[derive(Args)]
struct EngineArgs {
    /// reed-frost | percolation | ct
    #[arg(long, default_value = "percolation")]
    engine: String,
    /// Infectious period for ct: `det:<tau>` or `exp:<mu>`.
    #[arg(long)]
    law: Option<String>,
    /// Contact rate for ct.
    #[arg(long)]
    lambda: Option<f64>,
}

impl EngineArgs {
    fn to_spec(&self) -> Result<EngineSpec> {
        Ok(match self.engine.as_str() {
            "reed-frost" => EngineSpec::ReedFrost,
            "percolation" => EngineSpec::Percolation,
            "ct" | "continuous-time" => EngineSpec::ContinuousTime {
                law: parse_law(
                    self.law
                        .as_deref()
                        .ok_or_else(|| anyhow!("--law is required for the ct engine"))?,
                    self.lambda
                        .ok_or_else(|| anyhow!("--lambda is required for the ct engine"))?,
                )?,
            },
            other => bail!("unknown engine `{other}`"),
        })
    }
}

fn parse_law(text: &str, lambda: f64) -> Result<InfectiousPeriodLaw> {
    let (kind, value) = text
        .split_once(':')
        .ok_or_else(|| anyhow!("law must look like det:<tau> or exp:<mu>, got `{text}`"))?;
    let value: f64 = value.parse().context("law parameter")?;
    Ok(match kind {
        "det" | "deterministic" => InfectiousPeriodLaw::deterministic(lambda, value)?,
        "exp" | "exponential" => InfectiousPeriodLaw::exponential(lambda, value)?,
        other => bail!("unknown law `{other}`"),
    })
}

fn parse_initial(text: &str) -> Result<InitialSpec> {
    if text == "hub" {
        return Ok(InitialSpec::Hub);
    }
    if let Some(k) = text.strip_prefix("random:") {
        return Ok(InitialSpec::Random {
            k: k.parse().context("random:<k>")?,
        });
    }
    let nodes: Vec<usize> = text
        .split(',')
        .map(|s| s.trim().parse().context("initial node list"))
        .collect::<Result<_>>()?;
    Ok(InitialSpec::Explicit { nodes })
}

#[derive(Args)]
struct SimulateArgs {
    /// Edge-list file to simulate on (alternative to --family).
    #[arg(long)]
    graph: Option<PathBuf>,
    #[command(flatten)]
    family: FamilyArgs,
    #[arg(long)]
    beta: Option<f64>,
    /// hub | random:<k> | comma-separated node list
    #[arg(long, default_value = "random:1")]
    initial: String,
    #[arg(long, default_value_t = 100)]
    trials: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[command(flatten)]
    engine: EngineArgs,
}

#[derive(Args)]
struct SpectralArgs {
    /// Edge-list file.
    #[arg(long)]
    graph: PathBuf,
    #[arg(long, default_value_t = 1e-10)]
    tol: f64,
    #[arg(long)]
    max_iter: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args)]
struct BoundsArgs {
    #[command(flatten)]
    family: FamilyArgs,
    #[arg(long)]
    beta: Option<f64>,
    /// Initial infective count entering the bounds.
    #[arg(long, default_value_t = 1)]
    x0: usize,
    /// Core margin delta for the power-law core size.
    #[arg(long)]
    delta: Option<f64>,
    /// Giant-component weight constant for core estimates.
    #[arg(long)]
    c_delta: Option<f64>,
    /// Grid resolution for kernel operator numerics.
    #[arg(long, default_value_t = 1024)]
    resolution: usize,
    /// Also run the paired Monte Carlo experiment and check the bounds.
    #[arg(long)]
    check: bool,
    #[arg(long, default_value_t = 1000)]
    trials: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Engine for the --check run; its `--law`/`--lambda` also feed the
    /// p_J bounds.
    #[command(flatten)]
    engine: EngineArgs,
    /// Initial infectives for the --check run.
    #[arg(long, default_value = "random:1")]
    initial: String,
}

#[derive(Args)]
struct SweepArgs {
    /// JSON file with the full experiment spec; flags override its fields.
    #[arg(long)]
    config: Option<PathBuf>,
    #[command(flatten)]
    family: FamilyArgs,
    #[command(flatten)]
    engine: EngineArgs,
    #[arg(long)]
    beta: Option<f64>,
    /// Comma-separated strictly increasing beta grid.
    #[arg(long)]
    beta_grid: Option<String>,
    #[arg(long)]
    initial: Option<String>,
    #[arg(long)]
    trials: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    fixed_graph: bool,
    /// Result JSON path (defaults to the spec's `output`, else stdout).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also emit per-grid-point CSV plot data.
    #[arg(long)]
    csv: Option<PathBuf>,
}

impl SweepArgs {
    fn to_spec(&self) -> Result<ExperimentSpec> {
        let mut spec: ExperimentSpec = match &self.config {
            Some(path) => {
                let text = std::fs::read_to_string(path)
                    .with_context(|| format!("reading {}", path.display()))?;
                serde_json::from_str(&text).context("parsing experiment spec")?
            }
            None => ExperimentSpec {
                family: self.family.to_spec()?,
                engine: self.engine.to_spec()?,
                beta: None,
                initial: InitialSpec::Random { k: 1 },
                trials: 100,
                master_seed: 0,
                sweep: None,
                fixed_graph: false,
                output: None,
            },
        };
        if self.config.is_some() {
            if self.family.family.is_some() {
                spec.family = self.family.to_spec()?;
            }
            if self.engine.engine != "percolation" || self.engine.law.is_some() {
                spec.engine = self.engine.to_spec()?;
            }
        }
        if let Some(beta) = self.beta {
            spec.beta = Some(beta);
        }
        if let Some(grid) = &self.beta_grid {
            let values: Vec<f64> = grid
                .split(',')
                .map(|s| s.trim().parse().context("beta grid"))
                .collect::<Result<_>>()?;
            spec.sweep = Some(SweepAxis {
                parameter: SweepParameter::Beta,
                values,
            });
        }
        if let Some(initial) = &self.initial {
            spec.initial = parse_initial(initial)?;
        }
        if let Some(trials) = self.trials {
            spec.trials = trials;
        }
        if let Some(seed) = self.seed {
            spec.master_seed = seed;
        }
        if self.fixed_graph {
            spec.fixed_graph = true;
        }
        if let Some(out) = &self.out {
            spec.output = Some(out.display().to_string());
        }
        Ok(spec)
    }
}

fn cmd_generate(args: &GenerateArgs) -> Result<()> {
    let family = args.family.to_spec()?;
    let (graph, clamp_activations) = match &family {
        FamilySpec::ParetoKernel { n, gamma } => {
            let kernel = KernelSpec::pareto(*gamma, *n)?;
            let sample = generators::kernel_graph(*n, &kernel, args.seed)?;
            (sample.graph, Some(sample.clamp_activations))
        }
        other => (other.generate(args.seed)?, None),
    };
    graph.write_edge_list(&args.out)?;
    let meta_path = args
        .meta
        .clone()
        .unwrap_or_else(|| args.out.with_extension("meta.json"));
    let meta = serde_json::json!({
        "family": family,
        "seed": args.seed,
        "nodes": graph.node_count(),
        "edges": graph.edge_count(),
        "dropped_self_loops": graph.dropped_self_loops(),
        "clamp_activations": clamp_activations,
    });
    std::fs::write(&meta_path, serde_json::to_string_pretty(&meta)?)?;
    eprintln!(
        "wrote {} ({} nodes, {} edges) and {}",
        args.out.display(),
        graph.node_count(),
        graph.edge_count(),
        meta_path.display()
    );
    Ok(())
}

fn cmd_simulate(args: &SimulateArgs) -> Result<()> {
    let engine = args.engine.to_spec()?;
    let initial = parse_initial(&args.initial)?;
    let point = match &args.graph {
        Some(path) => {
            let graph = Arc::new(Graph::read_edge_list(path)?);
            simulate_graph(&graph, &engine, args.beta, &initial, args.trials, args.seed)?
        }
        None => {
            let spec = ExperimentSpec {
                family: args.family.to_spec()?,
                engine,
                beta: args.beta,
                initial,
                trials: args.trials,
                master_seed: args.seed,
                sweep: None,
                fixed_graph: false,
                output: None,
            };
            let mut result = run_experiment(&spec)?;
            result.points.remove(0)
        }
    };
    for record in &point.records {
        println!("{}", serde_json::to_string(record)?);
    }
    let summary = serde_json::json!({
        "summary": {
            "trials": point.trials,
            "mean_final_size": point.mean_final_size,
            "variance": point.variance,
            "std_error": point.std_error,
            "exceed_tenth_fraction": point.exceed_tenth_fraction,
        }
    });
    println!("{summary}");
    Ok(())
}

fn cmd_spectral(args: &SpectralArgs) -> Result<()> {
    let graph = Graph::read_edge_list(&args.graph)?;
    let report = spectral_radius(
        &graph,
        &SpectralOptions {
            tol: args.tol,
            max_iter: args.max_iter,
            seed: args.seed,
        },
    )?;
    let stats = graph.degree_extremes();
    let out = serde_json::json!({
        "lambda1": report.lambda1,
        "residual": report.residual,
        "iterations": report.iterations,
        "method": report.method,
        "min_degree": stats.min,
        "mean_degree": stats.mean,
        "max_degree": stats.max,
    });
    println!("{}", serde_json::to_string_pretty(&out)?);
    Ok(())
}

fn build_theory_report(args: &BoundsArgs, family: &FamilySpec) -> Result<TheoryReport> {
    let mut report = TheoryReport::default();
    let n = family.node_count();
    report.inputs.n = Some(n);
    report.inputs.x0 = Some(args.x0);
    report.inputs.beta = args.beta;
    let law = match (&args.engine.law, args.engine.lambda) {
        (Some(text), Some(lambda)) => Some(parse_law(text, lambda)?),
        (Some(_), None) => bail!("--lambda is required with --law"),
        _ => None,
    };
    if let Some(law) = &law {
        report.inputs.p_j = Some(effective_transmissibility(law));
    }
    match family {
        FamilySpec::Star { n } => {
            let lambda1 = closed_form_radius(ClosedFormFamily::Star, *n)?;
            report.inputs.lambda1 = Some(lambda1);
            if let Some(beta) = args.beta {
                report.add_bound(
                    "upper_general",
                    upper_bound_general(*n, lambda1, beta, args.x0),
                );
                report.add_value("star_hub_mean", theory::star_hub_mean(*n, beta));
            }
            if let Some(law) = &law {
                report.add_bound(
                    "upper_general_pj",
                    upper_bound_theorem2(*n, lambda1, law, args.x0, false),
                );
            }
        }
        FamilySpec::Ring { n } => {
            report.inputs.lambda1 = Some(2.0);
            if let Some(beta) = args.beta {
                report.add_bound("upper_regular", upper_bound_regular(2.0, beta, args.x0));
                if beta < 1.0 {
                    report.add_value("ring_mean", theory::ring_mean(beta));
                }
            }
            if let Some(law) = &law {
                report.add_bound(
                    "upper_regular_pj",
                    upper_bound_theorem2(*n, 2.0, law, args.x0, true),
                );
            }
        }
        FamilySpec::Complete { n } => {
            let degree = (*n - 1) as f64;
            report.inputs.lambda1 = Some(degree);
            if let Some(beta) = args.beta {
                let c = beta * degree;
                report.inputs.c = Some(c);
                report.add_bound("upper_regular", upper_bound_regular(degree, beta, args.x0));
                report.add_bound("lower_complete", epidemic_lower_bound_complete(*n, c)?);
                if c > 1.0 {
                    let gamma = giant_fraction(c)?;
                    report.add_diagnostic("giant_fraction", gamma);
                    report.add_diagnostic(
                        "giant_fraction_residual",
                        (gamma + (-c * gamma).exp() - 1.0).abs(),
                    );
                }
            }
            if let Some(law) = &law {
                report.add_bound(
                    "upper_regular_pj",
                    upper_bound_theorem2(*n, degree, law, args.x0, true),
                );
            }
        }
        FamilySpec::ErdosRenyi { n, p } => {
            let d = (*n as f64 - 1.0) * p;
            report.inputs.d = Some(d);
            if let Some(beta) = args.beta {
                let c = beta * d;
                report.inputs.c = Some(c);
                let upper = if c < 1.0 {
                    Applicability::Applicable(args.x0 as f64 / (1.0 - c))
                } else {
                    Applicability::Inapplicable {
                        reason: format!("c = {c} >= 1"),
                    }
                };
                report.add_bound("upper_branching", upper);
                report.add_bound("lower_giant", epidemic_lower_bound_complete(*n, c)?);
            }
        }
        FamilySpec::ChungLu {
            n,
            d,
            max_degree,
            gamma,
        } => {
            report.inputs.d = Some(*d);
            report.inputs.max_degree = Some(*max_degree);
            report.inputs.gamma = Some(*gamma);
            if *gamma != 2.5 {
                report.add_value(
                    "clv_lambda1_estimate",
                    clv_radius_estimate(*d, *max_degree, *gamma)?,
                );
            }
            if let Some(beta) = args.beta {
                let dk = subgraph_mean_degree(*n, *n, beta, *d, *gamma, None)?;
                report.add_value("subgraph_degree_at_n", dk.asymptotic);
                if let Some(delta) = args.delta {
                    report.inputs.delta = Some(delta);
                    match core_size(*n, beta, *d, *gamma, delta)? {
                        Applicability::Applicable(core) => {
                            report.add_value("core_size", core.size as f64);
                            report.add_diagnostic(
                                "core_vacuous",
                                if core.vacuous { 1.0 } else { 0.0 },
                            );
                            if let Some(c_delta) = args.c_delta {
                                report.inputs.c_delta = Some(c_delta);
                                let est = theory::giant_core_estimates(
                                    *n, beta, *d, *gamma, delta, c_delta,
                                )?;
                                report.add_value("giant_core_weight", est.weight_lower_bound);
                                report.add_value("giant_core_size", est.size_estimate);
                            }
                        }
                        Applicability::Inapplicable { reason } => {
                            report.add_bound(
                                "core_size",
                                Applicability::Inapplicable { reason },
                            );
                        }
                    }
                }
            }
        }
        FamilySpec::ParetoKernel { n, gamma } => {
            report.inputs.gamma = Some(*gamma);
            let threshold = pareto_threshold(*gamma)?;
            report.add_value("pareto_threshold", threshold.beta_star);
            let kernel = KernelSpec::pareto(*gamma, *n)?;
            let norm = kernel_operator_norm(&kernel, args.resolution.max(64))?;
            report.add_value("operator_norm", norm.value);
            if let Some(analytic) = norm.analytic {
                report.add_value("operator_norm_analytic", analytic);
            }
            report.add_diagnostic("operator_norm_residual", norm.residual);
            report.add_diagnostic("operator_norm_iterations", norm.iterations as f64);
            if let Some(beta) = args.beta {
                let sol = kernel_outbreak_fraction(&kernel, beta, args.resolution.max(256))?;
                report.add_value("outbreak_fraction", sol.tau);
                report.add_diagnostic("outbreak_criticality", sol.criticality);
                report.add_diagnostic("outbreak_residual", sol.residual);
                report.add_diagnostic("outbreak_iterations", sol.iterations as f64);
                let lower = if sol.criticality > 1.0 {
                    Applicability::Applicable(sol.tau * sol.tau * *n as f64)
                } else {
                    Applicability::Inapplicable {
                        reason: format!("beta ||T_W|| = {} <= 1", sol.criticality),
                    }
                };
                report.add_bound("lower_kernel_outbreak", lower);
            }
        }
    }
    Ok(report)
}

fn cmd_bounds(args: &BoundsArgs) -> Result<ExitCode> {
    let family = args.family.to_spec()?;
    let report = build_theory_report(args, &family)?;
    println!("{}", serde_json::to_string_pretty(&report)?);
    if args.check {
        let spec = ExperimentSpec {
            family,
            engine: args.engine.to_spec()?,
            beta: args.beta,
            initial: parse_initial(&args.initial)?,
            trials: args.trials,
            master_seed: args.seed,
            sweep: None,
            fixed_graph: false,
            output: None,
        };
        let table = compare_theory(&spec)?;
        for row in &table.rows {
            println!("{}", serde_json::to_string(row)?);
        }
        if !table.all_passed {
            eprintln!("some theory checks failed");
            return Ok(ExitCode::from(2));
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_sweep(args: &SweepArgs) -> Result<()> {
    let spec = args.to_spec()?;
    let result = run_experiment(&spec)?;
    let json = serde_json::to_string_pretty(&result)?;
    match result.spec.output.as_deref() {
        Some(path) => {
            std::fs::write(path, &json)?;
            eprintln!("wrote {path}");
        }
        None => println!("{json}"),
    }
    if let Some(csv) = &args.csv {
        emit_plot_data(&result, csv)?;
        eprintln!("wrote {}", csv.display());
    }
    Ok(())
}

fn cmd_compare(args: &SweepArgs) -> Result<ExitCode> {
    let spec = args.to_spec()?;
    let table = compare_theory(&spec)?;
    for row in &table.rows {
        println!("{}", serde_json::to_string(row)?);
    }
    if let Some(csv) = &args.csv {
        emit_plot_data(&table.result, csv)?;
        eprintln!("wrote {}", csv.display());
    }
    if let Some(out) = &args.out {
        std::fs::write(out, serde_json::to_string_pretty(&table)?)?;
        eprintln!("wrote {}", out.display());
    }
    if table.all_passed {
        eprintln!("all theory checks passed");
        Ok(ExitCode::SUCCESS)
    } else {
        eprintln!("some theory checks failed");
        Ok(ExitCode::from(2))
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome: Result<ExitCode> = match &cli.command {
        Command::Generate(args) => cmd_generate(args).map(|()| ExitCode::SUCCESS),
        Command::Simulate(args) => cmd_simulate(args).map(|()| ExitCode::SUCCESS),
        Command::Spectral(args) => cmd_spectral(args).map(|()| ExitCode::SUCCESS),
        Command::Bounds(args) => cmd_bounds(args),
        Command::Sweep(args) => cmd_sweep(args).map(|()| ExitCode::SUCCESS),
        Command::Compare(args) => cmd_compare(args),
    };
    match outcome {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::FAILURE
        }
    }
}
