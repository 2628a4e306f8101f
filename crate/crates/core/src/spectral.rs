//! Exact analysis of the full transition matrix on small graphs: spectrum,
//! relaxation time, total-variation mixing times and the rapid-mixing bounds.

use std::collections::{HashMap, VecDeque};

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::chain::{ChainParams, WormChain};
use crate::exact::{Caps, OracleError, SubgraphClassTable};
use crate::graph::Graph;
use crate::state::{EdgeSubset, WormState};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SpectralError {
    #[error("state space has {size} states, above the cap {cap}")]
    TooLarge { size: usize, cap: usize },
    #[error(transparent)]
    Oracle(#[from] OracleError),
    #[error("eigenvalue 1 has multiplicity {0}")]
    NotIrreducible(usize),
    #[error("total variation above {delta} after {cap} iterations")]
    IterationCap { delta: f64, cap: usize },
    #[error("delta = {0} must lie in (0, 1)")]
    BadDelta(f64),
    #[error("mixing bound violated: {0:?}")]
    BoundViolation(Box<MixingBoundReport>),
}

/// Limits for dense analysis.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SpectralCaps {
    pub max_states: usize,
    pub max_tv_iterations: usize,
    pub enumeration: Caps,
}

impl Default for SpectralCaps {
    fn default() -> Self {
        SpectralCaps {
            max_states: 50_000,
            max_tv_iterations: 10_000_000,
            enumeration: Caps::default(),
        }
    }
}

/// The dense kernel on all of `W` together with `π_x`.
///
/// States are ordered `C0` first then `C2`, each by `(|A|, subgraph order)`;
/// index 0 is always the empty state.
#[derive(Debug, Clone)]
pub struct ChainMatrix {
    states: Vec<WormState>,
    index: HashMap<EdgeSubset, usize>,
    p: DMatrix<f64>,
    pi: DVector<f64>,
    params: ChainParams,
}

impl ChainMatrix {
    pub fn build(
        g: &Graph,
        params: ChainParams,
        caps: SpectralCaps,
    ) -> Result<Self, SpectralError> {
        let table = SubgraphClassTable::enumerate(g, false, caps.enumeration)?;
        let size = table.c0().len() + table.c2().len();
        if size > caps.max_states {
            return Err(SpectralError::TooLarge {
                size,
                cap: caps.max_states,
            });
        }
        let states = table.states(g);
        let index: HashMap<EdgeSubset, usize> = states
            .iter()
            .enumerate()
            .map(|(i, s)| (s.edges().clone(), i))
            .collect();
        let chain = WormChain::new(g, params);
        let rows: Vec<Vec<(usize, f64)>> = states
            .par_iter()
            .map(|s| {
                let mut row = Vec::new();
                let mut off = 0.0;
                for e in 0..g.m() {
                    let p = chain.toggle_prob(s, e);
                    if p > 0.0 {
                        let mut next = s.edges().clone();
                        next.flip(e);
                        row.push((index[&next], p));
                        off += p;
                    }
                }
                row.push((index[s.edges()], 1.0 - off));
                row
            })
            .collect();
        let mut p = DMatrix::zeros(size, size);
        for (i, row) in rows.into_iter().enumerate() {
            for (j, v) in row {
                p[(i, j)] += v;
            }
        }
        let ps = table.measure(params.x());
        let pi = DVector::from_iterator(size, states.iter().map(|s| ps.prob(s)));
        Ok(ChainMatrix {
            states,
            index,
            p,
            pi,
            params,
        })
    }

    pub fn states(&self) -> &[WormState] {
        &self.states
    }

    pub fn index_of(&self, edges: &EdgeSubset) -> Option<usize> {
        self.index.get(edges).copied()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.p
    }

    pub fn stationary(&self) -> &DVector<f64> {
        &self.pi
    }

    pub fn params(&self) -> ChainParams {
        self.params
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    /// Whether every state reaches the empty state in the transition graph.
    /// Reversibility makes this equivalent to strong connectivity.
    pub fn is_irreducible(&self) -> bool {
        let n = self.len();
        let mut seen = vec![false; n];
        let mut queue = VecDeque::from([0usize]);
        seen[0] = true;
        while let Some(i) = queue.pop_front() {
            for (j, s) in seen.iter_mut().enumerate() {
                if !*s && self.p[(j, i)] > 0.0 {
                    *s = true;
                    queue.push_back(j);
                }
            }
        }
        seen.into_iter().all(|s| s)
    }

    /// Total variation distance of a row distribution from `π`.
    pub fn tv_distance(&self, dist: &DVector<f64>) -> f64 {
        0.5 * dist
            .iter()
            .zip(self.pi.iter())
            .map(|(a, b)| (a - b).abs())
            .sum::<f64>()
    }

    /// `‖P^t(start, ·) - π‖` for `t = 0..=steps`.
    pub fn tv_profile(&self, start: usize, steps: usize) -> Vec<f64> {
        let mut row = DVector::zeros(self.len());
        row[start] = 1.0;
        let mut out = Vec::with_capacity(steps + 1);
        out.push(self.tv_distance(&row));
        for _ in 0..steps {
            row = self.p.tr_mul(&row);
            out.push(self.tv_distance(&row));
        }
        out
    }
}

/// Builds the dense chain matrix.
pub fn build_chain_matrix(
    g: &Graph,
    params: ChainParams,
    caps: SpectralCaps,
) -> Result<ChainMatrix, SpectralError> {
    ChainMatrix::build(g, params, caps)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpectralSummary {
    /// Eigenvalues in decreasing order.
    pub eigenvalues: Vec<f64>,
    pub lambda_star: f64,
    pub t_rel: f64,
}

/// Spectrum of `D^{1/2} P D^{-1/2}`, `D = diag(π)`, and the relaxation time
/// `1 / (1 - λ⋆)`.
pub fn relaxation_time(cm: &ChainMatrix) -> Result<SpectralSummary, SpectralError> {
    let n = cm.len();
    let sqrt_pi: Vec<f64> = cm.pi.iter().map(|p| p.sqrt()).collect();
    let mut s = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            s[(i, j)] = sqrt_pi[i] * cm.p[(i, j)] / sqrt_pi[j];
        }
    }
    let s = (&s + s.transpose()) * 0.5;
    let mut eigenvalues: Vec<f64> = SymmetricEigen::new(s).eigenvalues.iter().copied().collect();
    eigenvalues.sort_by(|a, b| b.total_cmp(a));
    let unit = eigenvalues.iter().filter(|&&l| l > 1.0 - 1e-9).count();
    if unit != 1 {
        return Err(SpectralError::NotIrreducible(unit));
    }
    let lambda_star = eigenvalues[1..].iter().map(|l| l.abs()).fold(0.0, f64::max);
    Ok(SpectralSummary {
        t_rel: 1.0 / (1.0 - lambda_star),
        lambda_star,
        eigenvalues,
    })
}

fn check_delta(delta: f64) -> Result<(), SpectralError> {
    if delta > 0.0 && delta < 1.0 {
        Ok(())
    } else {
        Err(SpectralError::BadDelta(delta))
    }
}

/// Smallest `t` with `‖P^t(start, ·) - π‖ <= δ`.
pub fn tv_mixing_time(
    cm: &ChainMatrix,
    start: usize,
    delta: f64,
    max_iterations: usize,
) -> Result<usize, SpectralError> {
    check_delta(delta)?;
    let mut row = DVector::zeros(cm.len());
    row[start] = 1.0;
    for t in 0..=max_iterations {
        if cm.tv_distance(&row) <= delta {
            return Ok(t);
        }
        row = cm.p.tr_mul(&row);
    }
    Err(SpectralError::IterationCap {
        delta,
        cap: max_iterations,
    })
}

/// `max_ω mix(ω, δ)`, iterating the full matrix power.
pub fn worst_mixing_time(
    cm: &ChainMatrix,
    delta: f64,
    max_iterations: usize,
) -> Result<usize, SpectralError> {
    check_delta(delta)?;
    let n = cm.len();
    let mut power = DMatrix::<f64>::identity(n, n);
    for t in 0..=max_iterations {
        let worst = (0..n)
            .map(|i| {
                0.5 * (0..n)
                    .map(|j| (power[(i, j)] - cm.pi[j]).abs())
                    .sum::<f64>()
            })
            .fold(0.0, f64::max);
        if worst <= delta {
            return Ok(t);
        }
        power = &power * &cm.p;
    }
    Err(SpectralError::IterationCap {
        delta,
        cap: max_iterations,
    })
}

/// Relaxation-time upper bound `4 Δ m n^4`.
pub fn t_rel_bound(g: &Graph) -> f64 {
    let (n, m, d) = (g.n() as f64, g.m() as f64, g.max_degree() as f64);
    4.0 * d * m * n.powi(4)
}

/// Bound on `mix(0, δ)`: `4 [log 2 + log(1/δ)/m] Δ m^2 n^4`.
pub fn mix_zero_bound(g: &Graph, delta: f64) -> f64 {
    let (n, m, d) = (g.n() as f64, g.m() as f64, g.max_degree() as f64);
    4.0 * (2f64.ln() + (1.0 / delta).ln() / m) * d * m * m * n.powi(4)
}

/// Bound on `mix(δ)`: `4 [log(2/x) + log(2/δ)/m] Δ m^2 n^4`.
pub fn mix_worst_bound(g: &Graph, x: f64, delta: f64) -> f64 {
    let (n, m, d) = (g.n() as f64, g.m() as f64, g.max_degree() as f64);
    4.0 * ((2.0 / x).ln() + (2.0 / delta).ln() / m) * d * m * m * n.powi(4)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MixingRow {
    pub delta: f64,
    pub mix_zero: usize,
    pub mix_zero_bound: f64,
    pub mix_worst: usize,
    pub mix_worst_bound: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MixingBoundReport {
    pub lambda_star: f64,
    pub t_rel: f64,
    pub t_rel_bound: f64,
    pub mixing: Vec<MixingRow>,
    pub pass: bool,
}

/// Exact relaxation and mixing times against the rapid-mixing bounds.
pub fn theorem1(
    g: &Graph,
    cm: &ChainMatrix,
    deltas: &[f64],
    max_iterations: usize,
) -> Result<MixingBoundReport, SpectralError> {
    let spec = relaxation_time(cm)?;
    let x = cm.params().x();
    let t_rel_bound = t_rel_bound(g);
    let mut pass = spec.t_rel <= t_rel_bound;
    let mut mixing = Vec::new();
    for &delta in deltas {
        let row = MixingRow {
            delta,
            mix_zero: tv_mixing_time(cm, 0, delta, max_iterations)?,
            mix_zero_bound: mix_zero_bound(g, delta),
            mix_worst: worst_mixing_time(cm, delta, max_iterations)?,
            mix_worst_bound: mix_worst_bound(g, x, delta),
        };
        pass &= row.mix_zero as f64 <= row.mix_zero_bound;
        pass &= row.mix_worst as f64 <= row.mix_worst_bound;
        mixing.push(row);
    }
    Ok(MixingBoundReport {
        lambda_star: spec.lambda_star,
        t_rel: spec.t_rel,
        t_rel_bound,
        mixing,
        pass,
    })
}

/// Builds the matrix and asserts all three rapid-mixing bounds.
pub fn verify_theorem1(
    g: &Graph,
    params: ChainParams,
    deltas: &[f64],
    caps: SpectralCaps,
) -> Result<MixingBoundReport, SpectralError> {
    let cm = ChainMatrix::build(g, params, caps)?;
    let report = theorem1(g, &cm, deltas, caps.max_tv_iterations)?;
    if report.pass {
        Ok(report)
    } else {
        Err(SpectralError::BoundViolation(Box::new(report)))
    }
}
