//! Graph families: deterministic star / ring / complete graphs, seeded
//! Erdős-Rényi sampling, the expected-degree (Chung-Lu) model with power-law
//! weights, and inhomogeneous kernel graphs with uniform node marks.
//!
//! Sampling is reproducible: a given `(params, seed)` always yields the same
//! edge set. Pairs consume randomness in lexicographic order (Erdős-Rényi
//! uses geometric skipping over that order, which has the same law but costs
//! `O(m)` instead of `O(n^2)`).

use std::sync::Arc;

use rand_distr::{Distribution, Geometric};
use thiserror::Error;

use crate::graph::Graph;
use crate::rng::{next_unit, seeded_rng};

#[derive(Debug, Error)]
pub enum GeneratorError {
    #[error("star graphs need at least 2 nodes, got {0}")]
    StarTooSmall(usize),
    #[error("ring graphs need at least 3 nodes, got {0}")]
    RingTooSmall(usize),
    #[error("complete graphs need at least 2 nodes, got {0}")]
    CompleteTooSmall(usize),
    #[error("edge probability {0} outside [0, 1]")]
    ProbabilityOutOfRange(f64),
    #[error("power-law exponent must exceed 2, got {0}")]
    GammaOutOfRange(f64),
    #[error("degree targets must satisfy 0 < d <= m, got d={d}, m={m}")]
    DegreeTargets { d: f64, m: f64 },
    #[error("inadmissible weights: w_1^2 = {w1_sq} exceeds the total weight {total}")]
    InadmissibleWeights { w1_sq: f64, total: f64 },
    #[error("weights must be positive, finite and non-increasing")]
    MalformedWeights,
    #[error("kernel graphs need at least 1 node")]
    EmptyKernelGraph,
}

/// Star on `n` nodes: node 0 is the hub, nodes `1..n` are leaves.
pub fn star(n: usize) -> Result<Graph, GeneratorError> {
    if n < 2 {
        return Err(GeneratorError::StarTooSmall(n));
    }
    let edges: Vec<(u32, u32)> = (1..n as u32).map(|v| (0, v)).collect();
    Ok(Graph::from_canonical_edges(n, &edges))
}

/// Cycle on `n >= 3` nodes.
pub fn ring(n: usize) -> Result<Graph, GeneratorError> {
    if n < 3 {
        return Err(GeneratorError::RingTooSmall(n));
    }
    let mut edges: Vec<(u32, u32)> = Vec::with_capacity(n);
    edges.push((0, 1));
    edges.push((0, (n - 1) as u32));
    for u in 1..n - 1 {
        edges.push((u as u32, (u + 1) as u32));
    }
    edges.sort_unstable();
    Ok(Graph::from_canonical_edges(n, &edges))
}

/// Complete graph on `n >= 2` nodes, built straight into adjacency form.
pub fn complete(n: usize) -> Result<Graph, GeneratorError> {
    if n < 2 {
        return Err(GeneratorError::CompleteTooSmall(n));
    }
    let mut offsets = Vec::with_capacity(n + 1);
    for u in 0..=n {
        offsets.push(u * (n - 1));
    }
    let mut adj = Vec::with_capacity(n * (n - 1));
    for u in 0..n as u32 {
        for v in 0..n as u32 {
            if v != u {
                adj.push(v);
            }
        }
    }
    Ok(Graph::from_csr_parts(offsets, adj, n * (n - 1) / 2))
}

/// Number of lexicographic pairs `(u, v)`, `u < v`, before row `u`.
fn pair_row_offset(n: u64, u: u64) -> u64 {
    u * (2 * n - u - 1) / 2
}

/// Inverts a linear index into the lexicographic pair order.
fn pair_from_index(n: u64, idx: u64) -> (u32, u32) {
    // Float guess for the row, corrected by at most a couple of steps.
    let nf = n as f64;
    let disc = (2.0 * nf - 1.0) * (2.0 * nf - 1.0) - 8.0 * idx as f64;
    let mut u = (((2.0 * nf - 1.0) - disc.max(0.0).sqrt()) / 2.0) as u64;
    u = u.min(n - 2);
    while pair_row_offset(n, u) > idx {
        u -= 1;
    }
    while u < n - 1 && pair_row_offset(n, u + 1) <= idx {
        u += 1;
    }
    let v = u + 1 + (idx - pair_row_offset(n, u));
    (u as u32, v as u32)
}

/// Erdős-Rényi `G(n, p)`: every unordered pair is an independent
/// Bernoulli(`p`) edge.
pub fn erdos_renyi(n: usize, p: f64, seed: u64) -> Result<Graph, GeneratorError> {
    if !(0.0..=1.0).contains(&p) || p.is_nan() {
        return Err(GeneratorError::ProbabilityOutOfRange(p));
    }
    if n == 0 {
        return Err(GeneratorError::EmptyKernelGraph);
    }
    if p == 0.0 || n == 1 {
        return Ok(Graph::from_canonical_edges(n, &[]));
    }
    if p == 1.0 {
        return complete(n.max(2));
    }
    let total = n as u64 * (n as u64 - 1) / 2;
    let mut rng = seeded_rng(seed);
    let skip = Geometric::new(p).expect("p validated");
    let mut edges: Vec<(u32, u32)> = Vec::new();
    let mut idx = 0u64;
    loop {
        match idx.checked_add(skip.sample(&mut rng)) {
            Some(next) if next < total => idx = next,
            _ => break,
        }
        edges.push(pair_from_index(n as u64, idx));
        idx += 1;
        if idx >= total {
            break;
        }
    }
    Ok(Graph::from_canonical_edges(n, &edges))
}

/// Parameters of the explicit power-law weight sequence
/// `w_i = c (i0 + i)^(-1/(gamma-1))`.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct PowerLawParams {
    pub n: usize,
    /// Target average expected degree `d`.
    pub avg_degree: f64,
    /// Target maximum expected degree `m`.
    pub max_degree: f64,
    /// Power-law exponent, `gamma > 2`.
    pub gamma: f64,
    /// Scale constant `c`.
    pub scale: f64,
    /// Shift constant `i0`.
    pub shift: f64,
}

/// Non-increasing positive expected-degree weights with `w_1^2 <= sum(w)`.
#[derive(Debug, Clone)]
pub struct WeightSequence {
    weights: Vec<f64>,
    total: f64,
    params: Option<PowerLawParams>,
}

impl WeightSequence {
    /// Validates and wraps an arbitrary weight vector.
    pub fn from_weights(weights: Vec<f64>) -> Result<WeightSequence, GeneratorError> {
        if weights.is_empty()
            || weights.iter().any(|w| !w.is_finite() || *w <= 0.0)
            || weights.windows(2).any(|w| w[0] < w[1])
        {
            return Err(GeneratorError::MalformedWeights);
        }
        let total: f64 = weights.iter().sum();
        let w1_sq = weights[0] * weights[0];
        if w1_sq > total {
            return Err(GeneratorError::InadmissibleWeights { w1_sq, total });
        }
        Ok(WeightSequence {
            weights,
            total,
            params: None,
        })
    }

    /// All weights equal; `w = n p` recovers Erdős-Rényi `G(n, p)`.
    pub fn uniform(n: usize, w: f64) -> Result<WeightSequence, GeneratorError> {
        WeightSequence::from_weights(vec![w; n])
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    /// `w_i` with the 1-based indexing of the model (`weight(1)` is `w_1`).
    pub fn weight(&self, i: usize) -> f64 {
        self.weights[i - 1]
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn total(&self) -> f64 {
        self.total
    }

    pub fn max_weight(&self) -> f64 {
        self.weights[0]
    }

    pub fn mean_weight(&self) -> f64 {
        self.total / self.weights.len() as f64
    }

    pub fn params(&self) -> Option<&PowerLawParams> {
        self.params.as_ref()
    }

    /// Edge probability `w_i w_j / sum(w)` (1-based indices, `i != j`).
    pub fn edge_probability(&self, i: usize, j: usize) -> f64 {
        self.weight(i) * self.weight(j) / self.total
    }

    /// Expected degree of node `i` in the sampled graph (self-pair mass is
    /// never sampled): `w_i (1 - w_i / sum(w))`.
    pub fn expected_degree(&self, i: usize) -> f64 {
        let w = self.weight(i);
        w * (1.0 - w / self.total)
    }
}

/// Power-law weights with average `d`, maximum `m` and exponent `gamma`:
/// `w_i = c (i0 + i)^(-1/(gamma-1))` with
/// `c = (gamma-2)/(gamma-1) d n^(1/(gamma-1))` and
/// `i0 = n (d (gamma-2) / (m (gamma-1)))^(gamma-1)`.
pub fn power_law_weights(
    n: usize,
    d: f64,
    m: f64,
    gamma: f64,
) -> Result<WeightSequence, GeneratorError> {
    if gamma.is_nan() || gamma <= 2.0 {
        return Err(GeneratorError::GammaOutOfRange(gamma));
    }
    if d.is_nan() || m.is_nan() || d <= 0.0 || d > m {
        return Err(GeneratorError::DegreeTargets { d, m });
    }
    if n == 0 {
        return Err(GeneratorError::MalformedWeights);
    }
    let nf = n as f64;
    let exponent = 1.0 / (gamma - 1.0);
    let scale = (gamma - 2.0) / (gamma - 1.0) * d * nf.powf(exponent);
    let shift = nf * (d * (gamma - 2.0) / (m * (gamma - 1.0))).powf(gamma - 1.0);
    let mut weights = Vec::with_capacity(n);
    let mut total = 0.0;
    for i in 1..=n {
        let w = scale * (shift + i as f64).powf(-exponent);
        total += w;
        weights.push(w);
    }
    let w1_sq = weights[0] * weights[0];
    if w1_sq > total {
        return Err(GeneratorError::InadmissibleWeights { w1_sq, total });
    }
    Ok(WeightSequence {
        weights,
        total,
        params: Some(PowerLawParams {
            n,
            avg_degree: d,
            max_degree: m,
            gamma,
            scale,
            shift,
        }),
    })
}

/// Expected-degree random graph: pair `(i, j)`, `i < j`, is an edge with
/// probability `w_i w_j / sum(w)`, independently. Self-pairs are not sampled.
pub fn chung_lu(weights: &WeightSequence, seed: u64) -> Graph {
    let n = weights.len();
    let mut rng = seeded_rng(seed);
    let inv_total = 1.0 / weights.total();
    let w = weights.weights();
    let mut edges: Vec<(u32, u32)> = Vec::new();
    for i in 0..n {
        let row = w[i] * inv_total;
        for (j, &wj) in w.iter().enumerate().skip(i + 1) {
            if next_unit(&mut rng) < row * wj {
                edges.push((i as u32, j as u32));
            }
        }
    }
    Graph::from_canonical_edges(n, &edges)
}

/// Symmetric edge-probability kernel on `[0, 1]^2`. Values are clamped to
/// `[0, 1]` when used as probabilities; activations of the clamp are counted
/// by [`kernel_graph`].
#[derive(Clone)]
pub enum KernelForm {
    /// `W(x, y) = p`.
    Constant { p: f64 },
    /// `W(x, y) = (gamma - 1)/n * g(x) g(y)` with the Pareto marginal
    /// `g(x) = (1 - x)^(-1/gamma) - 1`.
    ParetoRankOne { gamma: f64 },
    /// Arbitrary symmetric kernel.
    Custom(Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>),
}

#[derive(Clone)]
pub struct KernelSpec {
    form: KernelForm,
    n: usize,
}

impl std::fmt::Debug for KernelSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match &self.form {
            KernelForm::Constant { p } => write!(f, "KernelSpec::constant(p={}, n={})", p, self.n),
            KernelForm::ParetoRankOne { gamma } => {
                write!(f, "KernelSpec::pareto(gamma={}, n={})", gamma, self.n)
            }
            KernelForm::Custom(_) => write!(f, "KernelSpec::custom(n={})", self.n),
        }
    }
}

impl KernelSpec {
    pub fn constant(p: f64, n: usize) -> Result<KernelSpec, GeneratorError> {
        if !(0.0..=1.0).contains(&p) || p.is_nan() {
            return Err(GeneratorError::ProbabilityOutOfRange(p));
        }
        Ok(KernelSpec {
            form: KernelForm::Constant { p },
            n,
        })
    }

    /// Rank-one kernel whose marginal law under a uniform mark is Pareto:
    /// for uniform `X`, `P(g(X) > t) = (1 + t)^(-gamma)`.
    pub fn pareto(gamma: f64, n: usize) -> Result<KernelSpec, GeneratorError> {
        if gamma.is_nan() || gamma <= 2.0 {
            return Err(GeneratorError::GammaOutOfRange(gamma));
        }
        Ok(KernelSpec {
            form: KernelForm::ParetoRankOne { gamma },
            n,
        })
    }

    pub fn custom<F>(f: F, n: usize) -> KernelSpec
    where
        F: Fn(f64, f64) -> f64 + Send + Sync + 'static,
    {
        KernelSpec {
            form: KernelForm::Custom(Arc::new(f)),
            n,
        }
    }

    pub fn node_count(&self) -> usize {
        self.n
    }

    pub fn gamma(&self) -> Option<f64> {
        match self.form {
            KernelForm::ParetoRankOne { gamma } => Some(gamma),
            _ => None,
        }
    }

    pub fn form(&self) -> &KernelForm {
        &self.form
    }

    /// Pareto marginal `g(x) = (1 - x)^(-1/gamma) - 1`.
    pub fn pareto_marginal(gamma: f64, x: f64) -> f64 {
        (1.0 - x).powf(-1.0 / gamma) - 1.0
    }

    /// Raw kernel value before any clamping.
    pub fn raw(&self, x: f64, y: f64) -> f64 {
        match &self.form {
            KernelForm::Constant { p } => *p,
            KernelForm::ParetoRankOne { gamma } => {
                (gamma - 1.0) / self.n as f64
                    * Self::pareto_marginal(*gamma, x)
                    * Self::pareto_marginal(*gamma, y)
            }
            KernelForm::Custom(f) => f(x, y),
        }
    }

    /// Kernel value clamped to `[0, 1]`, plus whether the clamp fired.
    pub fn edge_probability(&self, x: f64, y: f64) -> (f64, bool) {
        let raw = self.raw(x, y);
        if raw > 1.0 {
            (1.0, true)
        } else if raw < 0.0 {
            (0.0, true)
        } else {
            (raw, false)
        }
    }
}

/// A sampled kernel graph together with its node marks and the number of
/// pairs whose raw kernel value had to be clamped into `[0, 1]`.
#[derive(Debug)]
pub struct KernelGraphSample {
    pub graph: Graph,
    pub marks: Vec<f64>,
    pub clamp_activations: usize,
}

/// Samples marks `X_1..X_n` iid uniform on `[0, 1]`, then connects each pair
/// independently with probability `clamp(W(X_i, X_j))`.
pub fn kernel_graph(
    n: usize,
    kernel: &KernelSpec,
    seed: u64,
) -> Result<KernelGraphSample, GeneratorError> {
    if n == 0 {
        return Err(GeneratorError::EmptyKernelGraph);
    }
    let mut rng = seeded_rng(seed);
    let marks: Vec<f64> = (0..n).map(|_| next_unit(&mut rng)).collect();
    let mut clamps = 0usize;
    let mut edges: Vec<(u32, u32)> = Vec::new();
    match &kernel.form {
        KernelForm::ParetoRankOne { gamma } => {
            let scale = (gamma - 1.0) / kernel.n as f64;
            let g: Vec<f64> = marks
                .iter()
                .map(|&x| KernelSpec::pareto_marginal(*gamma, x))
                .collect();
            for i in 0..n {
                let gi = scale * g[i];
                for (j, &gj) in g.iter().enumerate().skip(i + 1) {
                    let mut p = gi * gj;
                    if p > 1.0 {
                        p = 1.0;
                        clamps += 1;
                    }
                    if next_unit(&mut rng) < p {
                        edges.push((i as u32, j as u32));
                    }
                }
            }
        }
        _ => {
            for i in 0..n {
                for j in (i + 1)..n {
                    let (p, clamped) = kernel.edge_probability(marks[i], marks[j]);
                    if clamped {
                        clamps += 1;
                    }
                    if let KernelForm::Custom(f) = &kernel.form {
                        let back = f(marks[j], marks[i]);
                        debug_assert!(
                            (kernel.raw(marks[i], marks[j]) - back).abs() <= 1e-9,
                            "custom kernel is not symmetric"
                        );
                    }
                    if next_unit(&mut rng) < p {
                        edges.push((i as u32, j as u32));
                    }
                }
            }
        }
    }
    Ok(KernelGraphSample {
        graph: Graph::from_canonical_edges(n, &edges),
        marks,
        clamp_activations: clamps,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn star_examples() {
        let g = star(2).unwrap();
        assert_eq!(g.edge_count(), 1);
        let g = star(5).unwrap();
        let degs: Vec<usize> = (0..5).map(|u| g.degree(u)).collect();
        assert_eq!(degs, vec![4, 1, 1, 1, 1]);
        assert!(star(1).is_err());
    }

    #[test]
    fn ring_and_complete_examples() {
        let g = ring(5).unwrap();
        assert!((0..5).all(|u| g.degree(u) == 2));
        assert_eq!(g.components().component_count(), 1);
        let g = complete(4).unwrap();
        assert_eq!(g.edge_count(), 6);
        assert!(ring(2).is_err());
        assert!(complete(1).is_err());
    }

    #[test]
    fn er_degenerate_probabilities() {
        let g = erdos_renyi(8, 0.0, 1).unwrap();
        assert_eq!(g.edge_count(), 0);
        let g = erdos_renyi(8, 1.0, 1).unwrap();
        assert_eq!(g.edge_count(), 28);
        assert!(erdos_renyi(8, 1.5, 1).is_err());
        assert!(erdos_renyi(8, -0.1, 1).is_err());
    }

    #[test]
    fn er_is_deterministic_per_seed() {
        let a = erdos_renyi(50, 0.1, 42).unwrap();
        let b = erdos_renyi(50, 0.1, 42).unwrap();
        let c = erdos_renyi(50, 0.1, 43).unwrap();
        assert_eq!(a.format_edge_list(), b.format_edge_list());
        assert_ne!(a.format_edge_list(), c.format_edge_list());
    }

    #[test]
    fn pair_index_inversion_is_total() {
        for n in [2u64, 3, 5, 17] {
            let total = n * (n - 1) / 2;
            let mut seen = Vec::new();
            for idx in 0..total {
                seen.push(pair_from_index(n, idx));
            }
            let expect: Vec<(u32, u32)> = (0..n as u32)
                .flat_map(|u| ((u + 1)..n as u32).map(move |v| (u, v)))
                .collect();
            assert_eq!(seen, expect);
        }
    }

    #[test]
    fn power_law_w1_is_below_max_degree() {
        let w = power_law_weights(1000, 3.0, 20.0, 2.5).unwrap();
        let p = w.params().unwrap();
        // c * i0^(-1/(gamma-1)) is exactly m, so w_1 < m and w_1 -> m as
        // i0 grows.
        let limit = p.scale * p.shift.powf(-1.0 / (p.gamma - 1.0));
        assert!((limit - 20.0).abs() < 1e-9);
        assert!(w.max_weight() <= 20.0);
        assert!(w.max_weight() > 20.0 * (p.shift / (p.shift + 1.0)).powf(1.0 / (p.gamma - 1.0)) - 1e-12);
    }

    #[test]
    fn power_law_rejects_bad_params() {
        assert!(power_law_weights(100, 4.0, 50.0, 2.0).is_err());
        assert!(power_law_weights(100, 4.0, 2.0, 2.5).is_err());
        // Inadmissible: heavy tail with w_1^2 above the total weight.
        let err = power_law_weights(100, 6.0, 30.0, 2.2).unwrap_err();
        match err {
            GeneratorError::InadmissibleWeights { w1_sq, total } => assert!(w1_sq > total),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn weights_are_non_increasing() {
        let w = power_law_weights(500, 2.0, 12.0, 2.7).unwrap();
        assert!(w.weights().windows(2).all(|p| p[0] >= p[1]));
        assert!(w.weights().iter().all(|&x| x > 0.0));
    }

    #[test]
    fn uniform_weights_recover_er_probability() {
        // w_i = n p makes every pair probability exactly p.
        let n = 10;
        let p = 0.137;
        let w = WeightSequence::uniform(n, n as f64 * p).unwrap();
        assert!((w.edge_probability(1, 2) - p).abs() < 1e-15);
        let two = WeightSequence::uniform(2, 1.0).unwrap();
        assert!((two.edge_probability(1, 2) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn chung_lu_is_deterministic() {
        let w = power_law_weights(80, 3.0, 10.0, 2.6).unwrap();
        let a = chung_lu(&w, 9);
        let b = chung_lu(&w, 9);
        assert_eq!(a.format_edge_list(), b.format_edge_list());
    }

    #[test]
    fn pareto_kernel_point_values() {
        let k = KernelSpec::pareto(3.0, 10).unwrap();
        for y in [0.0, 0.3, 0.9] {
            assert_eq!(k.raw(0.0, y), 0.0);
        }
        // x = y = 1 - 2^(-gamma) gives g = 1, so W = (gamma-1)/n.
        let x = 1.0 - 2f64.powi(-3);
        assert!((k.raw(x, x) - 0.2).abs() < 1e-12);
        assert!(KernelSpec::pareto(2.0, 10).is_err());
    }

    #[test]
    fn constant_kernel_is_er_like() {
        let k = KernelSpec::constant(0.0, 5).unwrap();
        let sample = kernel_graph(5, &k, 3).unwrap();
        assert_eq!(sample.graph.edge_count(), 0);
        assert_eq!(sample.clamp_activations, 0);
        let k = KernelSpec::constant(1.0, 5).unwrap();
        let sample = kernel_graph(5, &k, 3).unwrap();
        assert_eq!(sample.graph.edge_count(), 10);
    }

    #[test]
    fn kernel_clamp_is_counted() {
        // Oversized constant via custom form: always clamps.
        let k = KernelSpec::custom(|_, _| 2.0, 4);
        let sample = kernel_graph(4, &k, 1).unwrap();
        assert_eq!(sample.clamp_activations, 6);
        assert_eq!(sample.graph.edge_count(), 6);
    }
}
