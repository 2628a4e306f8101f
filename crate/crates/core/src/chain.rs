//! The lazy Metropolis worm kernel.
//!
//! A step keeps the state with probability 1/2. Otherwise it proposes a
//! single-edge toggle pivoted at a uniform vertex (in `C0`) or a uniform odd
//! vertex (in `C2`) and a uniform neighbor of the pivot, accepted with the
//! Metropolis factor for the PS measure. [`WormChain::transition_prob`]
//! evaluates the resulting kernel entry directly and is cross-tested against
//! the simulated step.

use rand::Rng;
use serde::Serialize;
use thiserror::Error;

use crate::graph::Graph;
use crate::state::{Class, StateError, WormState};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ParamError {
    #[error("x = {0} must lie in (0, 1)")]
    XOutOfRange(f64),
    #[error("beta = {0} must be positive and finite")]
    BetaOutOfRange(f64),
}

/// Chain temperature: `x = tanh(beta)` with `0 < x < 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ChainParams {
    x: f64,
    beta: f64,
}

impl ChainParams {
    pub fn from_beta(beta: f64) -> Result<Self, ParamError> {
        if !(beta > 0.0 && beta.is_finite()) {
            return Err(ParamError::BetaOutOfRange(beta));
        }
        let x = beta.tanh();
        if !(x > 0.0 && x < 1.0) {
            return Err(ParamError::BetaOutOfRange(beta));
        }
        Ok(ChainParams { x, beta })
    }

    pub fn from_x(x: f64) -> Result<Self, ParamError> {
        if !(x > 0.0 && x < 1.0) {
            return Err(ParamError::XOutOfRange(x));
        }
        Ok(ChainParams { x, beta: x.atanh() })
    }

    pub fn x(&self) -> f64 {
        self.x
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }
}

/// A proposed toggle of `edge = {pivot, neighbor}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Proposal {
    pub pivot: usize,
    pub neighbor: usize,
    pub edge: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StepOutcome {
    Lazy,
    Rejected,
    Accepted,
}

/// The worm process on a fixed graph at fixed `x`.
#[derive(Debug, Clone, Copy)]
pub struct WormChain<'g> {
    graph: &'g Graph,
    params: ChainParams,
}

impl<'g> WormChain<'g> {
    pub fn new(graph: &'g Graph, params: ChainParams) -> Self {
        WormChain { graph, params }
    }

    pub fn graph(&self) -> &'g Graph {
        self.graph
    }

    pub fn params(&self) -> ChainParams {
        self.params
    }

    pub fn x(&self) -> f64 {
        self.params.x
    }

    pub fn propose<R: Rng + ?Sized>(&self, s: &WormState, rng: &mut R) -> Proposal {
        let g = self.graph;
        let pivot = match s.class() {
            Class::C0 => rng.random_range(0..g.n()),
            Class::C2 => s.boundary().vertices()[rng.random_range(0..2)],
        };
        let nbs = g.neighbors(pivot);
        let nb = nbs[rng.random_range(0..nbs.len())];
        Proposal {
            pivot,
            neighbor: nb.vertex,
            edge: nb.edge,
        }
    }

    /// Metropolis acceptance probability of a proposal from `s`.
    pub fn acceptance(&self, s: &WormState, p: &Proposal) -> Result<f64, StateError> {
        let adding = !s.edges().contains(p.edge);
        let x = self.params.x;
        match s.class() {
            Class::C0 => Ok(if adding { x } else { 1.0 }),
            Class::C2 => {
                let b = s.boundary();
                if !b.contains(p.pivot) {
                    return Err(StateError::LeavesStateSpace {
                        edge: p.edge,
                        odd: 4,
                    });
                }
                if b.contains(p.neighbor) {
                    // C2 -> C0
                    Ok(if adding { x } else { 1.0 })
                } else {
                    // C2 -> C2; the pivot is the odd endpoint.
                    let ratio =
                        self.graph.degree(p.pivot) as f64 / self.graph.degree(p.neighbor) as f64;
                    let weight = if adding { x } else { 1.0 / x };
                    Ok((ratio * weight).min(1.0))
                }
            }
        }
    }

    /// One lazy Metropolis step, in place.
    pub fn step<R: Rng + ?Sized>(&self, s: &mut WormState, rng: &mut R) -> StepOutcome {
        if rng.random::<bool>() {
            return StepOutcome::Lazy;
        }
        let p = self.propose(s, rng);
        let a = self
            .acceptance(s, &p)
            .expect("worm proposals stay inside W");
        if a >= 1.0 || rng.random::<f64>() < a {
            s.toggle_in_place(self.graph, p.edge)
                .expect("worm proposals stay inside W");
            StepOutcome::Accepted
        } else {
            StepOutcome::Rejected
        }
    }

    /// Applies `steps` steps, calling `observer(t, state)` after step `t`
    /// (1-based).
    pub fn run<R, F>(&self, s0: WormState, steps: u64, rng: &mut R, mut observer: F) -> WormState
    where
        R: Rng + ?Sized,
        F: FnMut(u64, &WormState),
    {
        let mut s = s0;
        for t in 1..=steps {
            self.step(&mut s, rng);
            observer(t, &s);
        }
        s
    }

    /// Off-diagonal kernel entry `P(A, A △ e)`; zero when the toggle leaves `W`.
    pub fn toggle_prob(&self, a: &WormState, e: usize) -> f64 {
        let g = self.graph;
        let (u, v) = g.endpoints(e);
        let x = self.params.x;
        let weight = if a.edges().contains(e) { 1.0 } else { x };
        let du = g.degree(u) as f64;
        let dv = g.degree(v) as f64;
        match a.class() {
            Class::C0 => weight / (2.0 * g.n() as f64) * (1.0 / du + 1.0 / dv),
            Class::C2 => {
                let b = a.boundary();
                match (b.contains(u), b.contains(v)) {
                    (true, true) => weight / 4.0 * (1.0 / du + 1.0 / dv),
                    (false, false) => 0.0,
                    (u_odd, _) => {
                        let (dp, dq) = if u_odd { (du, dv) } else { (dv, du) };
                        let w = if a.edges().contains(e) { 1.0 / x } else { x };
                        (dp / dq * w).min(1.0) / (4.0 * dp)
                    }
                }
            }
        }
    }

    /// Exact kernel entry `P(A, B)`.
    pub fn transition_prob(&self, a: &WormState, b: &WormState) -> f64 {
        let diff = a.edges().symmetric_difference(b.edges());
        let mut edges = diff.iter();
        match (edges.next(), edges.next()) {
            (None, _) => self.holding_prob(a),
            (Some(e), None) => self.toggle_prob(a, e),
            _ => 0.0,
        }
    }

    /// Diagonal entry `P(A, A)`.
    pub fn holding_prob(&self, a: &WormState) -> f64 {
        1.0 - (0..self.graph.m())
            .map(|e| self.toggle_prob(a, e))
            .sum::<f64>()
    }
}
