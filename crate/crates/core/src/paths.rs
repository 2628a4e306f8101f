//! Canonical paths from every `I ∈ W` to every `F ∈ C0`, the injection
//! `η_T`, and the congestion `φ(Γ)`.
//!
//! A path unwinds `I △ F` one edge at a time. If `∂I = {u, v}`, the first
//! segment is the shortest `u`–`v` path inside `(V, I △ F)` that is least in
//! the subgraph order, traversed from the lower label. The remaining even
//! subgraph is split into simple cycles by a greedy walk (see
//! [`decompose_edges`]); cycles are taken in subgraph order, each starting at
//! its lowest vertex and moving first to the lower of that vertex's two cycle
//! neighbors.

use std::collections::{HashMap, HashSet, VecDeque};

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::chain::{ChainParams, WormChain};
use crate::exact::{Caps, OracleError, SubgraphClassTable};
use crate::graph::Graph;
use crate::state::{boundary, Class, EdgeSubset, WormState};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PathError {
    #[error("final state must lie in C0")]
    FinalNotInC0,
    #[error("internal invariant broken: {0}")]
    InternalInvariant(String),
    #[error("transition is not on the canonical path")]
    TransitionNotOnPath,
    #[error("value is not in the image of eta for this transition")]
    NotInImage,
    #[error("{pairs} (I, F) pairs exceed the budget {budget}")]
    TooLarge { pairs: usize, budget: usize },
    #[error(transparent)]
    Oracle(#[from] OracleError),
}

/// `I △ F` split into a shortest path `B0` and simple cycles `B1..Bk`, each
/// stored as an edge sequence in unwinding order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SymdiffDecomposition {
    pub path: Vec<usize>,
    pub cycles: Vec<Vec<usize>>,
}

impl SymdiffDecomposition {
    /// All edges in unwinding order.
    pub fn toggles(&self) -> Vec<usize> {
        self.path
            .iter()
            .chain(self.cycles.iter().flatten())
            .copied()
            .collect()
    }
}

fn bfs_within(g: &Graph, allowed: &EdgeSubset, source: usize) -> Vec<Option<usize>> {
    let mut dist = vec![None; g.n()];
    dist[source] = Some(0);
    let mut queue = VecDeque::from([source]);
    while let Some(a) = queue.pop_front() {
        let d = dist[a].unwrap();
        for nb in g.neighbors(a) {
            if allowed.contains(nb.edge) && dist[nb.vertex].is_none() {
                dist[nb.vertex] = Some(d + 1);
                queue.push_back(nb.vertex);
            }
        }
    }
    dist
}

/// Among all shortest `u`–`v` paths using only `allowed` edges, the one whose
/// edge set is least in the subgraph order, as an edge sequence from `u`.
/// `None` if `v` is unreachable.
pub fn least_shortest_path(
    g: &Graph,
    allowed: &EdgeSubset,
    u: usize,
    v: usize,
) -> Option<Vec<usize>> {
    let from_u = bfs_within(g, allowed, u);
    let from_v = bfs_within(g, allowed, v);
    let len = from_u[v]?;

    // Depth-first over the shortest-path DAG in neighbor order.
    let mut best: Option<(Vec<usize>, Vec<usize>)> = None;
    let mut stack: Vec<usize> = Vec::with_capacity(len);
    fn walk(
        g: &Graph,
        allowed: &EdgeSubset,
        from_v: &[Option<usize>],
        at: usize,
        remaining: usize,
        stack: &mut Vec<usize>,
        best: &mut Option<(Vec<usize>, Vec<usize>)>,
    ) {
        if remaining == 0 {
            let mut key = stack.clone();
            key.sort_unstable();
            if best.as_ref().is_none_or(|(k, _)| key < *k) {
                *best = Some((key, stack.clone()));
            }
            return;
        }
        for nb in g.neighbors(at) {
            if allowed.contains(nb.edge) && from_v[nb.vertex] == Some(remaining - 1) {
                stack.push(nb.edge);
                walk(g, allowed, from_v, nb.vertex, remaining - 1, stack, best);
                stack.pop();
            }
        }
    }
    walk(g, allowed, &from_v, u, len, &mut stack, &mut best);
    best.map(|(_, path)| path)
}

/// A least shortest path between `u` and `v` in the whole graph, as an edge
/// subset.
pub fn shortest_path_edges(g: &Graph, u: usize, v: usize) -> EdgeSubset {
    let all = EdgeSubset::from_indices(g.m(), 0..g.m());
    let path = least_shortest_path(g, &all, u, v).expect("graph is connected");
    EdgeSubset::from_indices(g.m(), path)
}

/// Greedy simple-cycle decomposition of an even subgraph.
///
/// Repeatedly: start at the lowest vertex with remaining edges and walk along
/// the lowest-labeled unused neighbor until some vertex of the current walk
/// recurs; the closed part is a simple cycle and is removed, the rest of the
/// walk is returned to the pool.
fn split_cycles(g: &Graph, even: &EdgeSubset) -> Result<Vec<Vec<usize>>, PathError> {
    let mut pool = even.clone();
    let mut degree = vec![0usize; g.n()];
    for e in pool.iter() {
        let (a, b) = g.endpoints(e);
        degree[a] += 1;
        degree[b] += 1;
    }
    let mut cycles = Vec::new();
    while let Some(start) = (0..g.n()).find(|&w| degree[w] > 0) {
        let mut walk_vertices = vec![start];
        let mut walk_edges: Vec<usize> = Vec::new();
        let mut used = EdgeSubset::empty(g.m());
        let mut at = start;
        let closing_at = loop {
            let nb = g
                .neighbors(at)
                .iter()
                .find(|nb| pool.contains(nb.edge) && !used.contains(nb.edge))
                .ok_or_else(|| PathError::InternalInvariant("odd vertex in cycle pool".into()))?;
            used.insert(nb.edge);
            walk_edges.push(nb.edge);
            if let Some(pos) = walk_vertices.iter().position(|&w| w == nb.vertex) {
                break pos;
            }
            walk_vertices.push(nb.vertex);
            at = nb.vertex;
        };
        let cycle_vertices = &walk_vertices[closing_at..];
        let cycle_edges = &walk_edges[closing_at..];
        for &e in cycle_edges {
            pool.remove(e);
            let (a, b) = g.endpoints(e);
            degree[a] -= 1;
            degree[b] -= 1;
        }
        cycles.push(orient_cycle(g, cycle_vertices));
    }
    cycles.sort_by(|a, b| {
        let mut ka = a.clone();
        let mut kb = b.clone();
        ka.sort_unstable();
        kb.sort_unstable();
        ka.cmp(&kb)
    });
    Ok(cycles)
}

/// Edge sequence of a cycle given by its vertex cycle, starting at the lowest
/// vertex and moving first to the lower of its two cycle neighbors.
fn orient_cycle(g: &Graph, vertices: &[usize]) -> Vec<usize> {
    let k = vertices.len();
    let low = (0..k).min_by_key(|&i| vertices[i]).unwrap();
    let next = vertices[(low + 1) % k];
    let prev = vertices[(low + k - 1) % k];
    let order: Vec<usize> = if next < prev {
        (0..=k).map(|i| vertices[(low + i) % k]).collect()
    } else {
        (0..=k).map(|i| vertices[(low + k - i) % k]).collect()
    };
    order
        .windows(2)
        .map(|w| g.edge_index(w[0], w[1]).expect("cycle edges exist"))
        .collect()
}

/// Decomposes an edge set `D` with `|∂D| ∈ {0, 2}` into the path `B0` and
/// cycles `B1..Bk`. This depends on `D` alone.
pub fn decompose_edges(g: &Graph, d: &EdgeSubset) -> Result<SymdiffDecomposition, PathError> {
    let odd = boundary(g, d);
    let path = match odd.as_slice() {
        [] => Vec::new(),
        &[u, v] => least_shortest_path(g, d, u, v).ok_or_else(|| {
            PathError::InternalInvariant("odd vertices in different components".into())
        })?,
        other => {
            return Err(PathError::Oracle(OracleError::NotInW(other.len())));
        }
    };
    let rest = d.difference(&EdgeSubset::from_indices(g.m(), path.iter().copied()));
    Ok(SymdiffDecomposition {
        cycles: split_cycles(g, &rest)?,
        path,
    })
}

/// The decomposition of `I △ F` for `F ∈ C0`.
pub fn decompose(
    g: &Graph,
    initial: &WormState,
    fin: &WormState,
) -> Result<SymdiffDecomposition, PathError> {
    if fin.class() != Class::C0 {
        return Err(PathError::FinalNotInC0);
    }
    decompose_edges(g, &initial.edges().symmetric_difference(fin.edges()))
}

/// A canonical path: `states[0] = I`, `states[L] = F`, and `states[i+1]` is
/// `states[i]` with edge `toggles[i]` flipped.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CanonicalPath {
    pub states: Vec<WormState>,
    pub toggles: Vec<usize>,
}

impl CanonicalPath {
    pub fn len(&self) -> usize {
        self.toggles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.toggles.is_empty()
    }

    /// Position of the transition `(A, A △ e)` on the path.
    pub fn position(&self, from: &EdgeSubset, edge: usize) -> Option<usize> {
        self.toggles
            .iter()
            .zip(&self.states)
            .position(|(&e, s)| e == edge && s.edges() == from)
    }
}

pub fn build_path(
    g: &Graph,
    initial: &WormState,
    fin: &WormState,
) -> Result<CanonicalPath, PathError> {
    let toggles = decompose(g, initial, fin)?.toggles();
    let mut states = Vec::with_capacity(toggles.len() + 1);
    let mut s = initial.clone();
    states.push(s.clone());
    for &e in &toggles {
        s.toggle_in_place(g, e)
            .map_err(|err| PathError::InternalInvariant(format!("path leaves W: {err}")))?;
        states.push(s.clone());
    }
    if s.edges() != fin.edges() {
        return Err(PathError::InternalInvariant(
            "path does not end at F".into(),
        ));
    }
    Ok(CanonicalPath { states, toggles })
}

/// A transition `T = (A, A △ e)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Transition {
    pub from: EdgeSubset,
    pub edge: usize,
}

impl Transition {
    fn union(&self) -> EdgeSubset {
        let mut u = self.from.clone();
        u.insert(self.edge);
        u
    }
}

/// `η_T(I, F) = I △ F △ (A ∪ e)`.
pub fn eta(
    g: &Graph,
    t: &Transition,
    initial: &WormState,
    fin: &WormState,
) -> Result<EdgeSubset, PathError> {
    let path = build_path(g, initial, fin)?;
    path.position(&t.from, t.edge)
        .ok_or(PathError::TransitionNotOnPath)?;
    Ok(eta_unchecked(t, initial, fin))
}

fn eta_unchecked(t: &Transition, initial: &WormState, fin: &WormState) -> EdgeSubset {
    initial
        .edges()
        .symmetric_difference(fin.edges())
        .symmetric_difference(&t.union())
}

/// Inverts `η_T`: recovers `(I, F)` from `T` and `η_T(I, F)`.
pub fn reconstruct(
    g: &Graph,
    t: &Transition,
    eta_value: &EdgeSubset,
) -> Result<(WormState, WormState), PathError> {
    let d = eta_value.symmetric_difference(&t.union());
    let toggles = decompose_edges(g, &d)
        .map_err(|_| PathError::NotInImage)?
        .toggles();
    let j = toggles
        .iter()
        .position(|&e| e == t.edge)
        .ok_or(PathError::NotInImage)?;
    let mut fin = t.from.clone();
    for &e in &toggles[j..] {
        fin.flip(e);
    }
    let initial = d.symmetric_difference(&fin);
    let fin = WormState::from_edges(g, fin).map_err(|_| PathError::NotInImage)?;
    let initial = WormState::from_edges(g, initial).map_err(|_| PathError::NotInImage)?;
    if fin.class() != Class::C0 {
        return Err(PathError::NotInImage);
    }
    let path = build_path(g, &initial, &fin).map_err(|_| PathError::NotInImage)?;
    if path.position(&t.from, t.edge) != Some(j) {
        return Err(PathError::NotInImage);
    }
    Ok((initial, fin))
}

/// Accumulated load on one transition.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TransitionLoad {
    /// Source state dump.
    pub from: String,
    /// Toggled edge as `u-v`.
    pub edge: String,
    pub prob: f64,
    pub load: f64,
    pub pairs: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CongestionReport {
    pub phi: f64,
    pub bound: f64,
    pub l_max: usize,
    pub m: usize,
    pub argmax: TransitionLoad,
    pub pairs: usize,
    pub transitions: usize,
    /// Pairs `(I, F) ≠ (I', F')` on a common transition with equal `η_T`.
    pub eta_collisions: usize,
    /// Pairs whose `η_T` image is outside the allowed class.
    pub eta_class_violations: usize,
    /// Summands exceeding `(2Δ/λ_x(C0)) ψ(I) x^|η_T(I,F)|`.
    pub eta_bound_violations: usize,
    /// Pairs where `|η_T| ≠ |I| + |F| - |A ∪ e|`.
    pub eta_size_violations: usize,
    pub min_transition_prob: f64,
    pub pass: bool,
    #[serde(skip)]
    pub table: Vec<TransitionLoad>,
}

struct Accumulator {
    load: f64,
    prob: f64,
    etas: Vec<EdgeSubset>,
}

/// Builds every canonical path `γ_{I,F}`, `(I, F) ∈ W × C0`, and evaluates
/// `φ(Γ) = max_T Σ π(I)π(F) / (π(C0) π(A) P(A, A'))` together with the
/// `η_T` injectivity and summand checks.
pub fn congestion(
    g: &Graph,
    params: ChainParams,
    budget: usize,
    caps: Caps,
) -> Result<CongestionReport, PathError> {
    let table = SubgraphClassTable::enumerate(g, false, caps)?;
    let states = table.states(g);
    let finals: Vec<&WormState> = states.iter().filter(|s| s.class() == Class::C0).collect();
    let pairs = states.len() * finals.len();
    if pairs > budget {
        return Err(PathError::TooLarge { pairs, budget });
    }
    let x = params.x();
    let ps = table.measure(x);
    let chain = WormChain::new(g, params);
    let pi_c0 = ps.pi_c0();
    let eta_scale = 2.0 * g.max_degree() as f64 / ps.lambda_c0();
    let n = g.n() as f64;

    struct Partial {
        map: HashMap<Transition, Accumulator>,
        l_max: usize,
        class_violations: usize,
        bound_violations: usize,
        size_violations: usize,
        min_prob: f64,
    }

    let partials: Vec<Result<Partial, PathError>> = states
        .par_iter()
        .map(|initial| {
            let mut part = Partial {
                map: HashMap::new(),
                l_max: 0,
                class_violations: 0,
                bound_violations: 0,
                size_violations: 0,
                min_prob: f64::INFINITY,
            };
            let pi_i = ps.prob(initial);
            let psi_i = if initial.class() == Class::C0 { n } else { 2.0 };
            for fin in &finals {
                let path = build_path(g, initial, fin)?;
                part.l_max = part.l_max.max(path.len());
                let weight = pi_i * ps.prob(fin) / pi_c0;
                for (a, &e) in path.states.iter().zip(&path.toggles) {
                    let p = chain.toggle_prob(a, e);
                    part.min_prob = part.min_prob.min(p);
                    let summand = weight / (ps.prob(a) * p);
                    let t = Transition {
                        from: a.edges().clone(),
                        edge: e,
                    };
                    let eta_value = eta_unchecked(&t, initial, fin);
                    let eta_odd = boundary(g, &eta_value).len();
                    let allowed = match initial.class() {
                        Class::C0 => eta_odd <= 2,
                        Class::C2 => eta_odd <= 4,
                    };
                    if !allowed {
                        part.class_violations += 1;
                    }
                    let expected = initial.edges().len() + fin.edges().len() - t.union().len();
                    if eta_value.len() != expected {
                        part.size_violations += 1;
                    }
                    let cap = eta_scale * psi_i * x.powi(eta_value.len() as i32);
                    if summand > cap * (1.0 + 1e-12) {
                        part.bound_violations += 1;
                    }
                    let acc = part.map.entry(t).or_insert(Accumulator {
                        load: 0.0,
                        prob: p,
                        etas: Vec::new(),
                    });
                    acc.load += summand;
                    acc.etas.push(eta_value);
                }
            }
            Ok(part)
        })
        .collect();

    let mut merged: HashMap<Transition, Accumulator> = HashMap::new();
    let mut l_max = 0;
    let (mut class_violations, mut bound_violations, mut size_violations) = (0, 0, 0);
    let mut min_prob = f64::INFINITY;
    for part in partials {
        let part = part?;
        l_max = l_max.max(part.l_max);
        class_violations += part.class_violations;
        bound_violations += part.bound_violations;
        size_violations += part.size_violations;
        min_prob = min_prob.min(part.min_prob);
        for (t, acc) in part.map {
            match merged.get_mut(&t) {
                Some(slot) => {
                    slot.load += acc.load;
                    slot.etas.extend(acc.etas);
                }
                None => {
                    merged.insert(t, acc);
                }
            }
        }
    }

    let mut eta_collisions = 0;
    let mut table_out: Vec<(Transition, TransitionLoad)> = merged
        .into_iter()
        .map(|(t, acc)| {
            let distinct: HashSet<&EdgeSubset> = acc.etas.iter().collect();
            eta_collisions += acc.etas.len() - distinct.len();
            let (u, v) = g.endpoints(t.edge);
            let from = WormState::from_edges(g, t.from.clone()).expect("path states lie in W");
            let load = TransitionLoad {
                from: from.dump(g),
                edge: format!("{}-{}", u + 1, v + 1),
                prob: acc.prob,
                load: acc.load,
                pairs: acc.etas.len(),
            };
            (t, load)
        })
        .collect();
    table_out.sort_by(|a, b| {
        a.0.from
            .len()
            .cmp(&b.0.from.len())
            .then_with(|| a.0.from.subgraph_cmp(&b.0.from))
            .then(a.0.edge.cmp(&b.0.edge))
    });
    let table: Vec<TransitionLoad> = table_out.into_iter().map(|(_, l)| l).collect();
    let argmax = table
        .iter()
        .max_by(|a, b| a.load.total_cmp(&b.load))
        .cloned()
        .ok_or_else(|| PathError::InternalInvariant("no transitions".into()))?;
    let phi = argmax.load;
    let bound = g.max_degree() as f64 * n.powi(4);
    let pass = phi <= bound
        && l_max <= g.m()
        && eta_collisions == 0
        && class_violations == 0
        && bound_violations == 0
        && size_violations == 0
        && min_prob > 0.0;
    Ok(CongestionReport {
        phi,
        bound,
        l_max,
        m: g.m(),
        argmax,
        pairs,
        transitions: table.len(),
        eta_collisions,
        eta_class_violations: class_violations,
        eta_bound_violations: bound_violations,
        eta_size_violations: size_violations,
        min_transition_prob: min_prob,
        pass,
        table,
    })
}

/// Checks `reconstruct(T, η_T(I, F)) = (I, F)` for every pair and every
/// transition on its path. Returns the number of mismatches.
pub fn reconstruction_failures(g: &Graph, budget: usize, caps: Caps) -> Result<usize, PathError> {
    let table = SubgraphClassTable::enumerate(g, false, caps)?;
    let states = table.states(g);
    let finals: Vec<&WormState> = states.iter().filter(|s| s.class() == Class::C0).collect();
    let pairs = states.len() * finals.len();
    if pairs > budget {
        return Err(PathError::TooLarge { pairs, budget });
    }
    states
        .par_iter()
        .map(|initial| {
            let mut failures = 0;
            for fin in &finals {
                let path = build_path(g, initial, fin)?;
                for (a, &e) in path.states.iter().zip(&path.toggles) {
                    let t = Transition {
                        from: a.edges().clone(),
                        edge: e,
                    };
                    let value = eta_unchecked(&t, initial, fin);
                    match reconstruct(g, &t, &value) {
                        Ok((i, f)) if &i == initial && &f == *fin => {}
                        _ => failures += 1,
                    }
                }
            }
            Ok(failures)
        })
        .sum::<Result<usize, PathError>>()
}
