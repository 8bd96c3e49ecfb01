//! Largest adjacency eigenvalue: power iteration for arbitrary graphs,
//! closed forms for the special families, the Chung-Lu-Vu asymptotic
//! estimate for power-law graphs, and the norm of the kernel integral
//! operator for inhomogeneous graphs.

use serde::Serialize;
use thiserror::Error;

use crate::generators::{KernelForm, KernelSpec};
use crate::graph::Graph;
use crate::rng::{next_unit, seeded_rng};

#[derive(Debug, Error)]
pub enum SpectralError {
    #[error("spectral radius of an empty graph is undefined")]
    EmptyGraph,
    #[error("tolerance must be positive, got {0}")]
    BadTolerance(f64),
    #[error(
        "power iteration did not converge after {iterations} iterations (residual {residual:e}, estimate {estimate})"
    )]
    NonConvergence {
        iterations: usize,
        residual: f64,
        estimate: f64,
    },
    #[error("closed-form spectral radius needs n >= {min} for this family, got {n}")]
    FamilyTooSmall { min: usize, n: usize },
    #[error("estimate is undefined at gamma = 2.5 and for gamma <= 2, got {0}")]
    GammaOutOfRange(f64),
    #[error("degree parameters must be positive, got d={d}, m={m}")]
    BadDegrees { d: f64, m: f64 },
    #[error("operator quadrature needs at least 64 grid points, got {0}")]
    ResolutionTooSmall(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum SpectralMethod {
    PowerIteration,
    ClosedForm,
    ClvEstimate,
}

/// Converged estimate of the largest adjacency eigenvalue and its
/// (entrywise non-negative, unit-norm) eigenvector.
#[derive(Debug, Clone)]
pub struct SpectralReport {
    pub lambda1: f64,
    pub eigenvector: Vec<f64>,
    pub iterations: usize,
    pub residual: f64,
    pub method: SpectralMethod,
}

#[derive(Debug, Clone, Copy)]
pub struct SpectralOptions {
    /// Convergence threshold on the Rayleigh-quotient residual `||Av - lv||`.
    pub tol: f64,
    /// Iteration cap; defaults to `100 n` when `None`.
    pub max_iter: Option<usize>,
    /// Optional seed for a randomised strictly-positive start vector.
    /// The default start is the all-ones vector.
    pub seed: Option<u64>,
}

impl Default for SpectralOptions {
    fn default() -> Self {
        SpectralOptions {
            tol: 1e-10,
            max_iter: None,
            seed: None,
        }
    }
}

/// Power iteration for the largest adjacency eigenvalue.
///
/// Iterates on `A + I` to break the period-2 oscillation of bipartite
/// graphs (the shift preserves eigenvectors and their order for symmetric
/// non-negative matrices) and reports `lambda1(A + I) - 1`. Disconnected
/// graphs are handled per component, keeping the component with the largest
/// eigenvalue.
pub fn spectral_radius(g: &Graph, opts: &SpectralOptions) -> Result<SpectralReport, SpectralError> {
    let n = g.node_count();
    if n == 0 {
        return Err(SpectralError::EmptyGraph);
    }
    if opts.tol.is_nan() || opts.tol <= 0.0 {
        return Err(SpectralError::BadTolerance(opts.tol));
    }
    let max_iter = opts.max_iter.unwrap_or(100 * n);
    let labeling = g.components();
    let mut members: Vec<Vec<u32>> = vec![Vec::new(); labeling.component_count()];
    for u in 0..n {
        members[labeling.label(u) as usize].push(u as u32);
    }

    let mut best: Option<(f64, Vec<u32>, Vec<f64>, f64)> = None;
    let mut total_iterations = 0usize;
    for comp in &members {
        let (shifted, vec, residual, iters) = component_power_iteration(
            g,
            comp,
            opts.tol,
            max_iter,
            opts.seed,
        )?;
        total_iterations += iters;
        if best.as_ref().is_none_or(|(b, ..)| shifted > *b) {
            best = Some((shifted, comp.clone(), vec, residual));
        }
    }
    let (shifted, comp, local_vec, residual) = best.expect("graph has at least one component");
    let mut eigenvector = vec![0.0; n];
    for (slot, &u) in comp.iter().enumerate() {
        eigenvector[u as usize] = local_vec[slot];
    }
    Ok(SpectralReport {
        lambda1: shifted - 1.0,
        eigenvector,
        iterations: total_iterations,
        residual,
        method: SpectralMethod::PowerIteration,
    })
}

/// Power iteration on `A + I` restricted to one component. Returns the
/// shifted eigenvalue, local eigenvector, residual and iteration count.
fn component_power_iteration(
    g: &Graph,
    comp: &[u32],
    tol: f64,
    max_iter: usize,
    seed: Option<u64>,
) -> Result<(f64, Vec<f64>, f64, usize), SpectralError> {
    let size = comp.len();
    if size == 1 {
        // Isolated node: A restricted is the 1x1 zero matrix.
        return Ok((1.0, vec![1.0], 0.0, 0));
    }
    let mut slot_of = std::collections::HashMap::with_capacity(size);
    for (slot, &u) in comp.iter().enumerate() {
        slot_of.insert(u, slot as u32);
    }
    // Local CSR restricted to the component.
    let mut local_adj: Vec<u32> = Vec::new();
    let mut local_offsets: Vec<usize> = Vec::with_capacity(size + 1);
    local_offsets.push(0);
    for &u in comp {
        for &v in g.neighbors(u as usize) {
            local_adj.push(slot_of[&v]);
        }
        local_offsets.push(local_adj.len());
    }

    let mut v: Vec<f64> = match seed {
        // Strictly positive randomised start.
        Some(s) => {
            let mut rng = seeded_rng(s);
            (0..size).map(|_| 0.5 + next_unit(&mut rng)).collect()
        }
        None => vec![1.0; size],
    };
    normalize(&mut v);
    let mut w = vec![0.0; size];
    let mut estimate = 0.0;
    let mut residual = f64::INFINITY;
    for iter in 1..=max_iter {
        for slot in 0..size {
            let mut acc = v[slot]; // the +I shift
            for &nb in &local_adj[local_offsets[slot]..local_offsets[slot + 1]] {
                acc += v[nb as usize];
            }
            w[slot] = acc;
        }
        // Rayleigh quotient with ||v|| = 1.
        estimate = dot(&v, &w);
        residual = w
            .iter()
            .zip(v.iter())
            .map(|(&wi, &vi)| {
                let r = wi - estimate * vi;
                r * r
            })
            .sum::<f64>()
            .sqrt();
        if residual <= tol {
            normalize(&mut w);
            return Ok((estimate, w, residual, iter));
        }
        normalize(&mut w);
        std::mem::swap(&mut v, &mut w);
    }
    Err(SpectralError::NonConvergence {
        iterations: max_iter,
        residual,
        estimate: estimate - 1.0,
    })
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| x * y).sum()
}

fn normalize(v: &mut [f64]) {
    let norm = dot(v, v).sqrt();
    for x in v.iter_mut() {
        *x /= norm;
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ClosedFormFamily {
    Star,
    Ring,
    Complete,
}

/// Exact spectral radius for the three special families:
/// star `sqrt(n-1)`, ring `2`, complete `n-1`.
pub fn closed_form_radius(family: ClosedFormFamily, n: usize) -> Result<f64, SpectralError> {
    match family {
        ClosedFormFamily::Star => {
            if n < 2 {
                Err(SpectralError::FamilyTooSmall { min: 2, n })
            } else {
                Ok(((n - 1) as f64).sqrt())
            }
        }
        ClosedFormFamily::Ring => {
            if n < 3 {
                Err(SpectralError::FamilyTooSmall { min: 3, n })
            } else {
                Ok(2.0)
            }
        }
        ClosedFormFamily::Complete => {
            if n < 2 {
                Err(SpectralError::FamilyTooSmall { min: 2, n })
            } else {
                Ok((n - 1) as f64)
            }
        }
    }
}

/// Asymptotic spectral-radius estimate for the explicit power-law
/// expected-degree model: `sqrt(m)` for `gamma > 2.5`, and
/// `d (gamma-2)^2 / ((gamma-1)(3-gamma)) ((gamma-1) m / ((gamma-2) d))^(3-gamma)`
/// for `2 < gamma < 2.5`. The boundary `gamma = 2.5` is rejected.
pub fn clv_radius_estimate(d: f64, m: f64, gamma: f64) -> Result<f64, SpectralError> {
    if d.is_nan() || m.is_nan() || d <= 0.0 || m <= 0.0 {
        return Err(SpectralError::BadDegrees { d, m });
    }
    if gamma.is_nan() || gamma <= 2.0 || gamma == 2.5 {
        return Err(SpectralError::GammaOutOfRange(gamma));
    }
    if gamma > 2.5 {
        Ok(m.sqrt())
    } else {
        let a = d * (gamma - 2.0) * (gamma - 2.0) / ((gamma - 1.0) * (3.0 - gamma));
        let b = ((gamma - 1.0) * m / ((gamma - 2.0) * d)).powf(3.0 - gamma);
        Ok(a * b)
    }
}

/// Quadrature mesh on `[0, 1]` for kernel-operator work: midpoint panels in
/// a graded variable `x = 1 - (1 - s)^q`. Grading (`q > 1`) concentrates
/// nodes near the endpoint `x = 1` where the Pareto marginal blows up;
/// `q = 1` is the plain midpoint rule. The last node sits strictly inside
/// the interval, so integrable endpoint singularities are never evaluated.
#[derive(Debug, Clone)]
pub struct QuadratureGrid {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl QuadratureGrid {
    pub fn uniform(resolution: usize) -> QuadratureGrid {
        QuadratureGrid::graded(resolution, 1)
    }

    pub fn graded(resolution: usize, q: u32) -> QuadratureGrid {
        let r = resolution as f64;
        let qf = q as f64;
        let mut nodes = Vec::with_capacity(resolution);
        let mut weights = Vec::with_capacity(resolution);
        for j in 0..resolution {
            let s = (j as f64 + 0.5) / r;
            let tail = (1.0 - s).powi(q as i32);
            nodes.push(1.0 - tail);
            weights.push(qf * tail / (1.0 - s) / r);
        }
        QuadratureGrid { nodes, weights }
    }

    /// Grid matched to a kernel: uniform for constant kernels (the midpoint
    /// rule is then exact), cubic grading otherwise.
    pub fn for_kernel(kernel: &KernelSpec, resolution: usize) -> QuadratureGrid {
        match kernel.form() {
            KernelForm::Constant { .. } => QuadratureGrid::uniform(resolution),
            _ => QuadratureGrid::graded(resolution, 3),
        }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn integrate<F: FnMut(f64) -> f64>(&self, mut f: F) -> f64 {
        self.nodes
            .iter()
            .zip(self.weights.iter())
            .map(|(&x, &w)| w * f(x))
            .sum()
    }
}

/// Discretisation of the integral operator with kernel `n W(x, y)` on a
/// quadrature grid. Mat-vecs run against the symmetrised Nystrom matrix
/// `B_ij = sqrt(w_i) n W(x_i, x_j) sqrt(w_j)`, which shares eigenvalues with
/// the weighted operator.
pub struct DiscreteOperator {
    grid: QuadratureGrid,
    sqrt_w: Vec<f64>,
    kind: DiscreteKind,
}

enum DiscreteKind {
    /// `n W = s g(x) g(y)`; stores `u_i = sqrt(w_i) g(x_i)`.
    RankOne { factor: Vec<f64>, scale: f64 },
    /// Dense row evaluation of `n W(x_i, x_j)`.
    Dense { values: Vec<f64>, size: usize },
}

impl DiscreteOperator {
    pub fn new(kernel: &KernelSpec, grid: QuadratureGrid) -> DiscreteOperator {
        let sqrt_w: Vec<f64> = grid.weights.iter().map(|&w| w.sqrt()).collect();
        let n = kernel.node_count() as f64;
        let kind = match kernel.form() {
            KernelForm::Constant { p } => DiscreteKind::RankOne {
                factor: sqrt_w.clone(),
                scale: n * p,
            },
            KernelForm::ParetoRankOne { gamma } => {
                let factor = grid
                    .nodes
                    .iter()
                    .zip(sqrt_w.iter())
                    .map(|(&x, &sw)| sw * KernelSpec::pareto_marginal(*gamma, x))
                    .collect();
                DiscreteKind::RankOne {
                    factor,
                    scale: gamma - 1.0,
                }
            }
            KernelForm::Custom(_) => {
                let size = grid.len();
                let mut values = vec![0.0; size * size];
                for i in 0..size {
                    for j in 0..size {
                        values[i * size + j] = n * kernel.raw(grid.nodes[i], grid.nodes[j]);
                    }
                }
                DiscreteKind::Dense { values, size }
            }
        };
        DiscreteOperator {
            grid,
            sqrt_w,
            kind,
        }
    }

    pub fn grid(&self) -> &QuadratureGrid {
        &self.grid
    }

    /// `out = B v` for the symmetrised matrix.
    fn matvec(&self, v: &[f64], out: &mut [f64]) {
        match &self.kind {
            DiscreteKind::RankOne { factor, scale } => {
                let inner: f64 = factor.iter().zip(v.iter()).map(|(f, x)| f * x).sum();
                for (o, f) in out.iter_mut().zip(factor.iter()) {
                    *o = scale * f * inner;
                }
            }
            DiscreteKind::Dense { values, size } => {
                for i in 0..*size {
                    let mut acc = 0.0;
                    let row = &values[i * size..(i + 1) * size];
                    for j in 0..*size {
                        acc += row[j] * self.sqrt_w[j] * v[j];
                    }
                    out[i] = self.sqrt_w[i] * acc;
                }
            }
        }
    }

    /// Applies the plain (unsymmetrised) discretised operator to a function
    /// sampled on the grid: `(T f)(x_i) = sum_j n W(x_i, x_j) f(x_j) w_j`.
    pub fn apply(&self, f: &[f64], out: &mut [f64]) {
        match &self.kind {
            DiscreteKind::RankOne { factor, scale } => {
                // factor_i = sqrt(w_i) g_i, so sum_j g_j f_j w_j
                // = sum_j factor_j sqrt(w_j) f_j.
                let inner: f64 = factor
                    .iter()
                    .zip(self.sqrt_w.iter())
                    .zip(f.iter())
                    .map(|((fa, sw), x)| fa * sw * x)
                    .sum();
                for ((o, fa), sw) in out.iter_mut().zip(factor.iter()).zip(self.sqrt_w.iter()) {
                    *o = scale * fa / sw.max(f64::MIN_POSITIVE) * inner;
                }
            }
            DiscreteKind::Dense { values, size } => {
                for i in 0..*size {
                    let row = &values[i * size..(i + 1) * size];
                    let mut acc = 0.0;
                    for j in 0..*size {
                        acc += row[j] * f[j] * self.grid.weights[j];
                    }
                    out[i] = acc;
                }
            }
        }
    }

    /// Largest eigenvalue by power iteration from the all-ones start.
    pub fn largest_eigenvalue(
        &self,
        tol: f64,
        max_iter: usize,
    ) -> Result<(f64, usize, f64), SpectralError> {
        let size = self.grid.len();
        let mut v = vec![1.0 / (size as f64).sqrt(); size];
        let mut w = vec![0.0; size];
        let mut estimate = 0.0;
        let mut residual = f64::INFINITY;
        for iter in 1..=max_iter {
            self.matvec(&v, &mut w);
            estimate = dot(&v, &w);
            residual = w
                .iter()
                .zip(v.iter())
                .map(|(&wi, &vi)| {
                    let r = wi - estimate * vi;
                    r * r
                })
                .sum::<f64>()
                .sqrt();
            if residual <= tol {
                return Ok((estimate, iter, residual));
            }
            normalize(&mut w);
            std::mem::swap(&mut v, &mut w);
        }
        Err(SpectralError::NonConvergence {
            iterations: max_iter,
            residual,
            estimate,
        })
    }
}

/// Quadrature estimate of the kernel operator norm, with the closed-form
/// value alongside when the kernel has one.
#[derive(Debug, Clone, Serialize)]
pub struct OperatorNormReport {
    pub value: f64,
    /// `(gamma - 1) int W(y)^2 dy = 2 / (gamma - 2)` for the Pareto kernel;
    /// `n p` for a constant kernel.
    pub analytic: Option<f64>,
    pub iterations: usize,
    pub residual: f64,
    pub resolution: usize,
}

/// Norm of the integral operator with kernel `n W`: the largest eigenvalue
/// of its Nystrom discretisation on a graded midpoint grid.
pub fn kernel_operator_norm(
    kernel: &KernelSpec,
    resolution: usize,
) -> Result<OperatorNormReport, SpectralError> {
    if resolution < 64 {
        return Err(SpectralError::ResolutionTooSmall(resolution));
    }
    let grid = QuadratureGrid::for_kernel(kernel, resolution);
    let op = DiscreteOperator::new(kernel, grid);
    let (value, iterations, residual) = op.largest_eigenvalue(1e-12, 50_000)?;
    let analytic = match kernel.form() {
        KernelForm::Constant { p } => Some(kernel.node_count() as f64 * p),
        KernelForm::ParetoRankOne { gamma } => Some(2.0 / (gamma - 2.0)),
        KernelForm::Custom(_) => None,
    };
    Ok(OperatorNormReport {
        value,
        analytic,
        iterations,
        residual,
        resolution,
    })
}
