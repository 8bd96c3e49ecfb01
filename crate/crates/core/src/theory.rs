//! Closed-form bounds and thresholds: outbreak upper bounds from the
//! spectral condition, the giant-component fixed point and the matching
//! lower bound on complete / Erdős-Rényi graphs, power-law core estimates,
//! and the outbreak fraction of kernel graphs.
//!
//! Bound evaluators whose hypothesis fails return
//! [`Applicability::Inapplicable`] rather than an error or a number, so
//! parameter sweeps can chart applicability regions.

use std::collections::BTreeMap;

use serde::Serialize;
use thiserror::Error;

use crate::epidemic::{effective_transmissibility, InfectiousPeriodLaw};
use crate::generators::{KernelSpec, WeightSequence};
use crate::spectral::{
    kernel_operator_norm, DiscreteOperator, OperatorNormReport, QuadratureGrid, SpectralError,
};

#[derive(Debug, Error)]
pub enum TheoryError {
    #[error("mean offspring parameter c must be positive and finite, got {0}")]
    BadMeanParameter(f64),
    #[error("power-law exponent out of range ({need}), got {gamma}")]
    GammaOutOfRange { gamma: f64, need: &'static str },
    #[error("delta must be positive, got {0}")]
    BadDelta(f64),
    #[error("c_delta must lie in [0, 1), got {0}")]
    BadCDelta(f64),
    #[error("transmissibility {0} outside [0, 1]")]
    BadBeta(f64),
    #[error("subgraph size k must satisfy 1 <= k <= n, got k={k}, n={n}")]
    BadSubgraphSize { k: usize, n: usize },
    #[error("degree parameters must be positive, got d={0}")]
    BadDegree(f64),
    #[error("outbreak solver needs resolution >= 256, got {0}")]
    ResolutionTooSmall(usize),
    #[error("root solver stalled: residual {residual:e}")]
    RootSolver { residual: f64 },
    #[error("fixed-point iteration did not converge after {iterations} steps (residual {residual:e})")]
    NonConvergence { iterations: usize, residual: f64 },
    #[error(transparent)]
    Spectral(#[from] SpectralError),
}

/// Outcome of a bound whose theorem has a hypothesis: either the value, or
/// an explicit statement of why the bound does not apply.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum Applicability<T = f64> {
    Applicable(T),
    Inapplicable { reason: String },
}

impl<T> Applicability<T> {
    pub fn value(&self) -> Option<&T> {
        match self {
            Applicability::Applicable(v) => Some(v),
            Applicability::Inapplicable { .. } => None,
        }
    }

    pub fn is_applicable(&self) -> bool {
        matches!(self, Applicability::Applicable(_))
    }

    pub fn expect_value(&self) -> &T {
        match self {
            Applicability::Applicable(v) => v,
            Applicability::Inapplicable { reason } => {
                panic!("bound inapplicable: {reason}")
            }
        }
    }
}

/// Expected-final-size upper bound for a general graph when
/// `beta * lambda1 < 1`: `sqrt(n x0) / (1 - beta lambda1)`.
pub fn upper_bound_general(n: usize, lambda1: f64, beta: f64, x0: usize) -> Applicability {
    let product = beta * lambda1;
    if product >= 1.0 {
        return Applicability::Inapplicable {
            reason: format!("beta * lambda1 = {product} >= 1"),
        };
    }
    Applicability::Applicable(((n * x0) as f64).sqrt() / (1.0 - product))
}

/// Sharper bound for regular graphs (`lambda1` equals the common degree):
/// `x0 / (1 - beta d)`.
pub fn upper_bound_regular(degree: f64, beta: f64, x0: usize) -> Applicability {
    let product = beta * degree;
    if product >= 1.0 {
        return Applicability::Inapplicable {
            reason: format!("beta * d = {product} >= 1"),
        };
    }
    Applicability::Applicable(x0 as f64 / (1.0 - product))
}

/// The same bounds with `beta` replaced by the effective transmissibility
/// `p_J` of a continuous-time infectious period.
pub fn upper_bound_theorem2(
    n: usize,
    lambda1: f64,
    law: &InfectiousPeriodLaw,
    x0: usize,
    regular: bool,
) -> Applicability {
    let p_j = effective_transmissibility(law);
    if regular {
        upper_bound_regular(lambda1, p_j, x0)
    } else {
        upper_bound_general(n, lambda1, p_j, x0)
    }
}

/// Asymptotic giant-component fraction of a mean-degree-`c` random graph:
/// zero for `c <= 1`, otherwise the unique positive root of
/// `gamma + exp(-gamma c) = 1`, solved to residual `<= 1e-12` by bracketed
/// bisection plus a Newton polish.
pub fn giant_fraction(c: f64) -> Result<f64, TheoryError> {
    if c.is_nan() || !c.is_finite() || c <= 0.0 {
        return Err(TheoryError::BadMeanParameter(c));
    }
    if c <= 1.0 {
        return Ok(0.0);
    }
    let f = |x: f64| x + (-c * x).exp() - 1.0;
    let fp = |x: f64| 1.0 - c * (-c * x).exp();
    let mut lo = 1e-12;
    let mut hi = 1.0;
    // f(lo) < 0 for c > 1, f(hi) = exp(-c) > 0 (or exactly 0 when it
    // underflows, in which case 1 is the answer to full precision).
    if f(hi) <= 0.0 {
        return Ok(1.0);
    }
    while hi - lo > 1e-6 {
        let mid = 0.5 * (lo + hi);
        if f(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let mut x = 0.5 * (lo + hi);
    for _ in 0..200 {
        let fx = f(x);
        if fx.abs() <= 1e-13 {
            return Ok(x);
        }
        if fx < 0.0 {
            lo = x;
        } else {
            hi = x;
        }
        let slope = fp(x);
        let mut next = x - fx / slope;
        if !next.is_finite() || next <= lo || next >= hi {
            next = 0.5 * (lo + hi);
        }
        if (next - x).abs() < f64::EPSILON * x.abs() {
            break;
        }
        x = next;
    }
    let residual = f(x).abs();
    if residual <= 1e-12 {
        Ok(x)
    } else {
        Err(TheoryError::RootSolver { residual })
    }
}

/// Lower bound on the expected final size on the complete graph with
/// `c = beta (n-1) > 1`: `giant_fraction(c)^2 n`.
pub fn epidemic_lower_bound_complete(n: usize, c: f64) -> Result<Applicability, TheoryError> {
    if c.is_nan() || !c.is_finite() || c <= 0.0 {
        return Err(TheoryError::BadMeanParameter(c));
    }
    if c <= 1.0 {
        return Ok(Applicability::Inapplicable {
            reason: format!("c = {c} <= 1: subcritical, no giant component"),
        });
    }
    let gamma = giant_fraction(c)?;
    Ok(Applicability::Applicable(gamma * gamma * n as f64))
}

/// Mean expected degree of the top-`k` subgraph of the transmissible
/// power-law graph.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SubgraphDegree {
    /// `beta d n^((3-gamma)/(gamma-1)) k^((gamma-3)/(gamma-1))`, valid in
    /// the regime `k >> i0` (reported, not enforced).
    pub asymptotic: f64,
    /// Finite-n value `beta (sum_{i<=k} w_i)^2 / (k sum w)` when a weight
    /// sequence is supplied.
    pub exact: Option<f64>,
}

pub fn subgraph_mean_degree(
    k: usize,
    n: usize,
    beta: f64,
    d: f64,
    gamma: f64,
    weights: Option<&WeightSequence>,
) -> Result<SubgraphDegree, TheoryError> {
    if gamma.is_nan() || gamma <= 2.0 {
        return Err(TheoryError::GammaOutOfRange {
            gamma,
            need: "gamma > 2",
        });
    }
    if k == 0 || k > n {
        return Err(TheoryError::BadSubgraphSize { k, n });
    }
    if !(0.0..=1.0).contains(&beta) {
        return Err(TheoryError::BadBeta(beta));
    }
    if d.is_nan() || d <= 0.0 {
        return Err(TheoryError::BadDegree(d));
    }
    let nf = n as f64;
    let kf = k as f64;
    let asymptotic =
        beta * d * nf.powf((3.0 - gamma) / (gamma - 1.0)) * kf.powf((gamma - 3.0) / (gamma - 1.0));
    let exact = weights.map(|w| {
        let prefix: f64 = w.weights()[..k].iter().sum();
        beta * prefix * prefix / (kf * w.total())
    });
    Ok(SubgraphDegree { asymptotic, exact })
}

/// Size of the supercritical core of a power-law graph with `2 < gamma < 3`:
/// `floor((beta d / (1+delta))^((gamma-1)/(3-gamma)) n) + 1`, flagged
/// vacuous when it exceeds `n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct CoreSize {
    pub size: u64,
    pub vacuous: bool,
}

pub fn core_size(
    n: usize,
    beta: f64,
    d: f64,
    gamma: f64,
    delta: f64,
) -> Result<Applicability<CoreSize>, TheoryError> {
    if gamma.is_nan() || gamma <= 2.0 {
        return Err(TheoryError::GammaOutOfRange {
            gamma,
            need: "gamma > 2",
        });
    }
    if delta.is_nan() || delta <= 0.0 {
        return Err(TheoryError::BadDelta(delta));
    }
    if !(0.0..=1.0).contains(&beta) {
        return Err(TheoryError::BadBeta(beta));
    }
    if d.is_nan() || d <= 0.0 {
        return Err(TheoryError::BadDegree(d));
    }
    if gamma >= 3.0 {
        return Ok(Applicability::Inapplicable {
            reason: format!(
                "gamma = {gamma} >= 3: subgraph degree is non-decreasing in k, core formula void"
            ),
        });
    }
    let base = beta * d / (1.0 + delta);
    let raw = base.powf((gamma - 1.0) / (3.0 - gamma)) * n as f64;
    let size = if raw >= u64::MAX as f64 {
        u64::MAX
    } else {
        raw.floor() as u64 + 1
    };
    Ok(Applicability::Applicable(CoreSize {
        size,
        vacuous: size > n as u64,
    }))
}

/// Giant-component estimates inside the core: a lower bound on its total
/// weight and the matching node-count scale.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GiantCoreEstimate {
    /// `d n (1 - c_delta) (beta d / (1+delta))^((gamma-2)/(3-gamma))`.
    pub weight_lower_bound: f64,
    /// `n (1 - c_delta)^((gamma-1)/(gamma-2)) (beta d / (1+delta))^((gamma-1)/(3-gamma))`.
    pub size_estimate: f64,
}

pub fn giant_core_estimates(
    n: usize,
    beta: f64,
    d: f64,
    gamma: f64,
    delta: f64,
    c_delta: f64,
) -> Result<GiantCoreEstimate, TheoryError> {
    if gamma.is_nan() || gamma <= 2.0 || gamma >= 3.0 {
        return Err(TheoryError::GammaOutOfRange {
            gamma,
            need: "2 < gamma < 3",
        });
    }
    if delta.is_nan() || delta <= 0.0 {
        return Err(TheoryError::BadDelta(delta));
    }
    if !(0.0..1.0).contains(&c_delta) {
        return Err(TheoryError::BadCDelta(c_delta));
    }
    if !(0.0..=1.0).contains(&beta) {
        return Err(TheoryError::BadBeta(beta));
    }
    if d.is_nan() || d <= 0.0 {
        return Err(TheoryError::BadDegree(d));
    }
    let nf = n as f64;
    let base = beta * d / (1.0 + delta);
    Ok(GiantCoreEstimate {
        weight_lower_bound: d * nf * (1.0 - c_delta) * base.powf((gamma - 2.0) / (3.0 - gamma)),
        size_estimate: nf
            * (1.0 - c_delta).powf((gamma - 1.0) / (gamma - 2.0))
            * base.powf((gamma - 1.0) / (3.0 - gamma)),
    })
}

/// Outbreak threshold of the Pareto kernel graph: `beta* = (gamma-2)/2`,
/// the reciprocal of the operator norm `2/(gamma-2)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ParetoThreshold {
    pub beta_star: f64,
    /// `beta <= 1` can cross the threshold only when `beta_star < 1`
    /// (`gamma < 4`); otherwise no admissible transmissibility is
    /// supercritical by this criterion.
    pub attainable: bool,
}

pub fn pareto_threshold(gamma: f64) -> Result<ParetoThreshold, TheoryError> {
    if gamma.is_nan() || gamma <= 2.0 {
        return Err(TheoryError::GammaOutOfRange {
            gamma,
            need: "gamma > 2",
        });
    }
    let beta_star = (gamma - 2.0) / 2.0;
    Ok(ParetoThreshold {
        beta_star,
        attainable: beta_star < 1.0,
    })
}

/// Solution of the kernel outbreak equation.
#[derive(Debug, Clone, Serialize)]
pub struct OutbreakSolution {
    /// Asymptotic outbreak fraction `tau = int f`; zero when subcritical.
    pub tau: f64,
    /// `beta * ||T_W||`; an outbreak needs this to exceed 1.
    pub criticality: f64,
    pub operator_norm: OperatorNormReport,
    pub iterations: usize,
    pub residual: f64,
}

/// Solves the survival functional equation `f = 1 - exp(-T_{beta W} f)` on
/// the quadrature grid by damped fixed-point iteration from `f = 1` (the
/// iteration descends monotonically to the maximal fixed point) and reports
/// `tau = int f`. Returns `tau = 0` outright when `beta ||T_W|| <= 1`.
pub fn kernel_outbreak_fraction(
    kernel: &KernelSpec,
    beta: f64,
    resolution: usize,
) -> Result<OutbreakSolution, TheoryError> {
    if !(0.0..=1.0).contains(&beta) {
        return Err(TheoryError::BadBeta(beta));
    }
    if resolution < 256 {
        return Err(TheoryError::ResolutionTooSmall(resolution));
    }
    let norm = kernel_operator_norm(kernel, resolution)?;
    let criticality = beta * norm.value;
    if criticality <= 1.0 {
        return Ok(OutbreakSolution {
            tau: 0.0,
            criticality,
            operator_norm: norm,
            iterations: 0,
            residual: 0.0,
        });
    }
    let grid = QuadratureGrid::for_kernel(kernel, resolution);
    let op = DiscreteOperator::new(kernel, grid);
    let size = op.grid().len();
    let damping = 0.7;
    let mut f = vec![1.0; size];
    let mut tf = vec![0.0; size];
    let mut iterations = 0usize;
    let mut residual = f64::INFINITY;
    for iter in 1..=200_000 {
        iterations = iter;
        op.apply(&f, &mut tf);
        let mut delta: f64 = 0.0;
        for i in 0..size {
            let target = 1.0 - (-beta * tf[i]).exp();
            let next = (1.0 - damping) * f[i] + damping * target;
            delta = delta.max((next - f[i]).abs());
            f[i] = next;
        }
        residual = delta;
        if delta <= 1e-13 {
            break;
        }
    }
    if residual > 1e-10 {
        return Err(TheoryError::NonConvergence {
            iterations,
            residual,
        });
    }
    let tau = op
        .grid()
        .weights
        .iter()
        .zip(f.iter())
        .map(|(&w, &fi)| w * fi)
        .sum();
    Ok(OutbreakSolution {
        tau,
        criticality,
        operator_norm: norm,
        iterations,
        residual,
    })
}

/// Exact expected final size on the star with the hub initially infected:
/// `1 + beta (n-1)`.
pub fn star_hub_mean(n: usize, beta: f64) -> f64 {
    1.0 + beta * (n as f64 - 1.0)
}

/// Exact expected final size on the star with `k` leaves initially infected
/// and the hub susceptible: `k + (1 - (1-beta)^k)(1 + beta (n-1-k))`.
pub fn star_leaf_mean(n: usize, k: usize, beta: f64) -> f64 {
    let kf = k as f64;
    kf + (1.0 - (1.0 - beta).powi(k as i32)) * (1.0 + beta * (n as f64 - 1.0 - kf))
}

/// Expected final size on a long ring from one infective: the head plus two
/// independent geometric runs, `1 + 2 beta / (1 - beta)`.
pub fn ring_mean(beta: f64) -> f64 {
    1.0 + 2.0 * beta / (1.0 - beta)
}

/// One named bound inside a [`TheoryReport`].
#[derive(Debug, Clone, Serialize)]
pub struct BoundEntry {
    pub value: Option<f64>,
    pub applicable: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl From<Applicability> for BoundEntry {
    fn from(a: Applicability) -> BoundEntry {
        match a {
            Applicability::Applicable(v) => BoundEntry {
                value: Some(v),
                applicable: true,
                note: None,
            },
            Applicability::Inapplicable { reason } => BoundEntry {
                value: None,
                applicable: false,
                note: Some(reason),
            },
        }
    }
}

/// Inputs echoed into a [`TheoryReport`].
#[derive(Debug, Clone, Default, Serialize)]
pub struct ReportInputs {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub beta: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lambda1: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub x0: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub c: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gamma: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub d: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_degree: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub delta: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub c_delta: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p_j: Option<f64>,
}

/// Named bound values plus echoed inputs and solver diagnostics.
#[derive(Debug, Clone, Default, Serialize)]
pub struct TheoryReport {
    pub inputs: ReportInputs,
    pub bounds: BTreeMap<String, BoundEntry>,
    pub diagnostics: BTreeMap<String, f64>,
}

impl TheoryReport {
    pub fn add_bound(&mut self, name: &str, bound: Applicability) {
        self.bounds.insert(name.to_string(), bound.into());
    }

    pub fn add_value(&mut self, name: &str, value: f64) {
        self.bounds.insert(
            name.to_string(),
            BoundEntry {
                value: Some(value),
                applicable: true,
                note: None,
            },
        );
    }

    pub fn add_diagnostic(&mut self, name: &str, value: f64) {
        self.diagnostics.insert(name.to_string(), value);
    }
}
