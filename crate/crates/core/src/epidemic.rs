//! SIR epidemic engines on a fixed graph.
//!
//! Three routes to the final removed set:
//! - [`run_reed_frost`]: the discrete-time chain itself, one slot at a time;
//! - [`final_set_via_percolation`]: keep each edge with probability `beta`
//!   and take the components of the initial infectives (same law for the
//!   final set, near-linear time);
//! - [`run_ct_sir`]: continuous time with exponential contact clocks and a
//!   deterministic or exponential infectious period.
//!
//! Every infection attempt owns one uniform draw addressed by the directed
//! pair, so a trial replays exactly from its seed and raising `beta` can
//! only enlarge the removed set under a shared seed.

use rand_distr::{Distribution, Geometric};
use thiserror::Error;

use crate::graph::Graph;
use crate::rng::{seeded_rng, PairStreams};

#[derive(Debug, Error)]
pub enum EpidemicError {
    #[error("transmissibility {0} outside [0, 1]")]
    BetaOutOfRange(f64),
    #[error("initial infective set is empty")]
    EmptyInitialSet,
    #[error("initial infective {node} out of range for {n} nodes")]
    InitialOutOfRange { node: usize, n: usize },
    #[error("infectious-period parameters must be strictly positive")]
    NonPositiveLawParameter,
}

/// Per-trial epidemic parameters.
#[derive(Debug, Clone)]
pub struct EpidemicConfig {
    pub beta: f64,
    pub initial: Vec<usize>,
    pub seed: u64,
}

impl EpidemicConfig {
    pub fn new(beta: f64, initial: Vec<usize>, seed: u64) -> Result<Self, EpidemicError> {
        if !(0.0..=1.0).contains(&beta) || beta.is_nan() {
            return Err(EpidemicError::BetaOutOfRange(beta));
        }
        if initial.is_empty() {
            return Err(EpidemicError::EmptyInitialSet);
        }
        let mut initial = initial;
        initial.sort_unstable();
        initial.dedup();
        Ok(EpidemicConfig {
            beta,
            initial,
            seed,
        })
    }

    fn check_range(&self, g: &Graph) -> Result<(), EpidemicError> {
        let n = g.node_count();
        for &u in &self.initial {
            if u >= n {
                return Err(EpidemicError::InitialOutOfRange { node: u, n });
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Susceptible,
    Infective,
    Removed,
}

/// Mutable state of one discrete-time trial.
#[derive(Debug, Clone)]
pub struct SimState {
    status: Vec<Status>,
    infectives: Vec<u32>,
    slot: u32,
}

impl SimState {
    pub fn new(g: &Graph, initial: &[usize]) -> SimState {
        let mut status = vec![Status::Susceptible; g.node_count()];
        let mut infectives: Vec<u32> = initial.iter().map(|&u| u as u32).collect();
        infectives.sort_unstable();
        infectives.dedup();
        for &u in &infectives {
            status[u as usize] = Status::Infective;
        }
        SimState {
            status,
            infectives,
            slot: 0,
        }
    }

    pub fn status(&self, u: usize) -> Status {
        self.status[u]
    }

    pub fn infective_count(&self) -> usize {
        self.infectives.len()
    }

    pub fn slot(&self) -> u32 {
        self.slot
    }

    pub fn removed_nodes(&self) -> Vec<usize> {
        self.status
            .iter()
            .enumerate()
            .filter(|(_, &s)| s == Status::Removed)
            .map(|(u, _)| u)
            .collect()
    }
}

/// Advances one Reed-Frost slot: every infective attempts each susceptible
/// neighbour once, independently with probability `beta`, then is removed.
/// Attempts run in sorted `(infective, neighbour)` order and each directed
/// pair consumes its own stream draw.
pub fn reed_frost_step(g: &Graph, state: &mut SimState, beta: f64, draws: &PairStreams) {
    let mut newly: Vec<u32> = Vec::new();
    for &v in &state.infectives {
        for &u in g.neighbors(v as usize) {
            if state.status[u as usize] == Status::Susceptible
                && draws.uniform(v as usize, u as usize) < beta
            {
                state.status[u as usize] = Status::Infective;
                newly.push(u);
            }
        }
    }
    for &v in &state.infectives {
        state.status[v as usize] = Status::Removed;
    }
    newly.sort_unstable();
    state.infectives = newly;
    state.slot += 1;
}

/// Final outcome of one trial, whichever engine produced it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EpidemicOutcome {
    pub final_removed: usize,
    pub removed: Vec<usize>,
    /// Reed-Frost: last slot that still had an infective. Percolation: the
    /// eccentricity bound (max BFS distance from the initial set inside the
    /// removed set). Continuous time: infection generation depth.
    pub extinction_time: u32,
    pub trial_seed: u64,
}

/// Runs the Reed-Frost chain to extinction.
pub fn run_reed_frost(g: &Graph, cfg: &EpidemicConfig) -> Result<EpidemicOutcome, EpidemicError> {
    cfg.check_range(g)?;
    let draws = PairStreams::new(cfg.seed, g.node_count());
    let mut state = SimState::new(g, &cfg.initial);
    let mut last_active = 0u32;
    while state.infective_count() > 0 {
        last_active = state.slot;
        reed_frost_step(g, &mut state, cfg.beta, &draws);
    }
    let removed = state.removed_nodes();
    Ok(EpidemicOutcome {
        final_removed: removed.len(),
        removed,
        extinction_time: last_active,
        trial_seed: cfg.seed,
    })
}

/// Bond percolation: a spanning subgraph keeping each edge independently
/// with probability `beta`. Skips over the canonical edge order
/// geometrically, so the cost is `O(kept)` plus one lazy index per graph.
pub fn percolate(g: &Graph, beta: f64, seed: u64) -> Result<Graph, EpidemicError> {
    if !(0.0..=1.0).contains(&beta) || beta.is_nan() {
        return Err(EpidemicError::BetaOutOfRange(beta));
    }
    let n = g.node_count();
    let m = g.edge_count() as u64;
    if beta == 1.0 {
        return Ok(g.clone());
    }
    if beta == 0.0 || m == 0 {
        return Ok(Graph::from_canonical_edges(n, &[]));
    }
    let mut rng = seeded_rng(seed);
    let skip = Geometric::new(beta).expect("beta validated");
    let mut kept: Vec<(u32, u32)> = Vec::new();
    let mut idx = 0u64;
    loop {
        match idx.checked_add(skip.sample(&mut rng)) {
            Some(next) if next < m => idx = next,
            _ => break,
        }
        kept.push(g.canonical_edge(idx));
        idx += 1;
        if idx >= m {
            break;
        }
    }
    Ok(Graph::from_canonical_edges(n, &kept))
}

/// Final set via the percolation construction: percolate, then take the
/// union of the percolated components containing the initial infectives.
/// `extinction_time` is the eccentricity bound, not a simulated slot count.
pub fn final_set_via_percolation(
    g: &Graph,
    cfg: &EpidemicConfig,
) -> Result<EpidemicOutcome, EpidemicError> {
    cfg.check_range(g)?;
    let sub = percolate(g, cfg.beta, cfg.seed)?;
    let labeling = sub.components();
    let mut wanted = vec![false; labeling.component_count()];
    for &u in &cfg.initial {
        wanted[labeling.label(u) as usize] = true;
    }
    let n = g.node_count();
    let mut removed = Vec::new();
    for u in 0..n {
        if wanted[labeling.label(u) as usize] {
            removed.push(u);
        }
    }
    // Max BFS distance from the initial set within the kept subgraph.
    let mut dist = vec![u32::MAX; n];
    let mut queue = std::collections::VecDeque::new();
    for &u in &cfg.initial {
        dist[u] = 0;
        queue.push_back(u as u32);
    }
    let mut ecc = 0u32;
    while let Some(u) = queue.pop_front() {
        let d = dist[u as usize];
        ecc = ecc.max(d);
        for &v in sub.neighbors(u as usize) {
            if dist[v as usize] == u32::MAX {
                dist[v as usize] = d + 1;
                queue.push_back(v);
            }
        }
    }
    Ok(EpidemicOutcome {
        final_removed: removed.len(),
        removed,
        extinction_time: ecc,
        trial_seed: cfg.seed,
    })
}

/// Infectious-period law of the continuous-time model: a node infected at
/// time `t` contacts each neighbour once after an exponential(`contact_rate`)
/// delay and transmits if the delay lands inside its infectious period `J`.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct InfectiousPeriodLaw {
    /// Contact rate `lambda`.
    pub contact_rate: f64,
    pub period: PeriodKind,
}

#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PeriodKind {
    Deterministic { tau: f64 },
    Exponential { mu: f64 },
}

impl InfectiousPeriodLaw {
    pub fn deterministic(contact_rate: f64, tau: f64) -> Result<Self, EpidemicError> {
        if contact_rate.is_nan() || tau.is_nan() || contact_rate <= 0.0 || tau <= 0.0 {
            return Err(EpidemicError::NonPositiveLawParameter);
        }
        Ok(InfectiousPeriodLaw {
            contact_rate,
            period: PeriodKind::Deterministic { tau },
        })
    }

    pub fn exponential(contact_rate: f64, mu: f64) -> Result<Self, EpidemicError> {
        if contact_rate.is_nan() || mu.is_nan() || contact_rate <= 0.0 || mu <= 0.0 {
            return Err(EpidemicError::NonPositiveLawParameter);
        }
        Ok(InfectiousPeriodLaw {
            contact_rate,
            period: PeriodKind::Exponential { mu },
        })
    }
}

/// Effective per-edge transmissibility `p_J = 1 - E[exp(-lambda J)]`:
/// `1 - exp(-lambda tau)` for a deterministic period,
/// `lambda / (lambda + mu)` for an exponential one.
pub fn effective_transmissibility(law: &InfectiousPeriodLaw) -> f64 {
    match law.period {
        PeriodKind::Deterministic { tau } => 1.0 - (-law.contact_rate * tau).exp(),
        PeriodKind::Exponential { mu } => law.contact_rate / (law.contact_rate + mu),
    }
}

/// Event-driven continuous-time SIR. On infection of `u`, draw its period
/// `J_u`, then an exponential contact time per neighbour; transmission
/// happens along edges whose contact time beats `J_u`. The final size is
/// the guaranteed-correct statistic; `extinction_time` reports the
/// infection generation depth.
pub fn run_ct_sir(
    g: &Graph,
    law: &InfectiousPeriodLaw,
    initial: &[usize],
    seed: u64,
) -> Result<EpidemicOutcome, EpidemicError> {
    if initial.is_empty() {
        return Err(EpidemicError::EmptyInitialSet);
    }
    let n = g.node_count();
    for &u in initial {
        if u >= n {
            return Err(EpidemicError::InitialOutOfRange { node: u, n });
        }
    }
    let draws = PairStreams::new(seed, n);
    let lambda = law.contact_rate;
    let mut infected = vec![false; n];
    let mut queue = std::collections::VecDeque::new();
    let mut sorted_initial: Vec<usize> = initial.to_vec();
    sorted_initial.sort_unstable();
    sorted_initial.dedup();
    for &u in &sorted_initial {
        infected[u] = true;
        queue.push_back((u as u32, 0u32));
    }
    let mut depth = 0u32;
    while let Some((u, gen)) = queue.pop_front() {
        depth = depth.max(gen);
        let period = match law.period {
            PeriodKind::Deterministic { tau } => tau,
            PeriodKind::Exponential { mu } => {
                -(1.0 - draws.node_uniform(u as usize)).ln() / mu
            }
        };
        for &v in g.neighbors(u as usize) {
            if infected[v as usize] {
                continue;
            }
            let contact = -(1.0 - draws.uniform(u as usize, v as usize)).ln() / lambda;
            if contact < period {
                infected[v as usize] = true;
                queue.push_back((v, gen + 1));
            }
        }
    }
    let removed: Vec<usize> = (0..n).filter(|&u| infected[u]).collect();
    Ok(EpidemicOutcome {
        final_removed: removed.len(),
        removed,
        extinction_time: depth,
        trial_seed: seed,
    })
}
