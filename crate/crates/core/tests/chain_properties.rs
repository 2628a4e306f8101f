use std::collections::{HashMap, HashSet, VecDeque};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use statrs::distribution::{ChiSquared, ContinuousCDF};
use worm_core::catalog::connected_graphs_up_to;
use worm_core::exact::{Caps, SubgraphClassTable};
use worm_core::graph::{complete, cycle, grid, path, Graph};
use worm_core::paths::build_path;
use worm_core::{ChainParams, Class, WormChain, WormState};

const XS: [f64; 4] = [0.05, 0.3, 0.7, 0.95];

/// Connected graphs with at most ten edges.
fn small_graphs() -> Vec<Graph> {
    let mut gs = connected_graphs_up_to(5);
    for n in 6..=10 {
        gs.push(cycle(n).unwrap());
    }
    gs.push(path(8).unwrap());
    gs.push(grid(2, 3).unwrap());
    gs.push(grid(2, 4).unwrap());
    assert!(gs.iter().all(|g| g.m() <= 10));
    gs
}

fn rel_close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs())
}

#[test]
fn detailed_balance_and_stationarity_exhaustive() {
    for g in small_graphs() {
        let table = SubgraphClassTable::enumerate(&g, false, Caps::default()).unwrap();
        let states = table.states(&g);
        let index: HashMap<&WormState, usize> =
            states.iter().enumerate().map(|(i, s)| (s, i)).collect();
        for x in XS {
            let chain = WormChain::new(&g, ChainParams::from_x(x).unwrap());
            let ps = table.measure(x);
            let pi: Vec<f64> = states.iter().map(|s| ps.prob(s)).collect();
            let mut pi_p = vec![0.0; states.len()];
            for (i, a) in states.iter().enumerate() {
                pi_p[i] += pi[i] * chain.holding_prob(a);
                for e in 0..g.m() {
                    let p = chain.toggle_prob(a, e);
                    let Ok(b) = a.toggle(&g, e) else {
                        assert_eq!(p, 0.0);
                        continue;
                    };
                    let j = index[&b];
                    let back = chain.toggle_prob(&b, e);
                    assert_eq!(p > 0.0, back > 0.0);
                    assert!(
                        rel_close(pi[i] * p, pi[j] * back, 1e-12),
                        "{g} x={x} {} -> {}",
                        a.dump(&g),
                        b.dump(&g)
                    );
                    assert_eq!(chain.transition_prob(a, &b), p);
                    pi_p[j] += pi[i] * p;
                }
            }
            for (i, (&lhs, &rhs)) in pi_p.iter().zip(&pi).enumerate() {
                assert!(rel_close(lhs, rhs, 1e-12), "{g} x={x} state {i}");
            }
        }
    }
}

#[test]
fn kernel_vanishes_off_single_toggles() {
    for g in [complete(4).unwrap(), grid(2, 3).unwrap()] {
        let table = SubgraphClassTable::enumerate(&g, false, Caps::default()).unwrap();
        let states = table.states(&g);
        let chain = WormChain::new(&g, ChainParams::from_x(0.4).unwrap());
        for a in &states {
            let row: f64 = states.iter().map(|b| chain.transition_prob(a, b)).sum();
            assert!((row - 1.0).abs() < 1e-12);
            for b in &states {
                if a.edges().symmetric_difference(b.edges()).len() > 1 {
                    assert_eq!(chain.transition_prob(a, b), 0.0);
                }
            }
        }
    }
}

/// Kernel with the C2 -> C2 acceptance evaluated as if the neighbor were the
/// odd endpoint.
fn transposed_toggle_prob(g: &Graph, x: f64, a: &WormState, e: usize) -> f64 {
    let (u, v) = g.endpoints(e);
    let present = a.edges().contains(e);
    let weight = if present { 1.0 } else { x };
    let (du, dv) = (g.degree(u) as f64, g.degree(v) as f64);
    match a.class() {
        Class::C0 => weight / (2.0 * g.n() as f64) * (1.0 / du + 1.0 / dv),
        Class::C2 => {
            let b = a.boundary();
            match (b.contains(u), b.contains(v)) {
                (true, true) => weight / 4.0 * (1.0 / du + 1.0 / dv),
                (false, false) => 0.0,
                (u_odd, _) => {
                    let (dp, dq) = if u_odd { (du, dv) } else { (dv, du) };
                    let w = if present { 1.0 / x } else { x };
                    (dq / dp * w).min(1.0) / (4.0 * dp)
                }
            }
        }
    }
}

#[test]
fn transposed_acceptance_breaks_detailed_balance() {
    let g = path(4).unwrap();
    let x = 0.5;
    let table = SubgraphClassTable::enumerate(&g, false, Caps::default()).unwrap();
    let ps = table.measure(x);
    let mut worst: f64 = 0.0;
    for a in table.states(&g) {
        for e in 0..g.m() {
            if let Ok(b) = a.toggle(&g, e) {
                let lhs = ps.prob(&a) * transposed_toggle_prob(&g, x, &a, e);
                let rhs = ps.prob(&b) * transposed_toggle_prob(&g, x, &b, e);
                worst = worst.max((lhs - rhs).abs() / lhs.max(rhs));
            }
        }
    }
    assert!(worst > 0.1, "mutant kernel still reversible: {worst}");
}

#[test]
fn toggle_lower_bound_exhaustive() {
    for g in small_graphs() {
        let table = SubgraphClassTable::enumerate(&g, false, Caps::default()).unwrap();
        let delta = g.max_degree() as f64;
        for x in XS {
            let chain = WormChain::new(&g, ChainParams::from_x(x).unwrap());
            for a in table.states(&g) {
                let psi = if a.class() == Class::C0 {
                    g.n() as f64
                } else {
                    2.0
                };
                for e in 0..g.m() {
                    if a.toggle(&g, e).is_err() {
                        continue;
                    }
                    let mut union = a.edges().clone();
                    union.insert(e);
                    let lhs = psi * x.powi(a.edges().len() as i32) * chain.toggle_prob(&a, e);
                    let rhs = x.powi(union.len() as i32) / (2.0 * delta);
                    assert!(lhs >= rhs * (1.0 - 1e-12), "{g} x={x} {} e={e}", a.dump(&g));
                }
            }
        }
    }
}

fn min_path_transition_prob(g: &Graph, x: f64) -> f64 {
    let table = SubgraphClassTable::enumerate(g, false, Caps::default()).unwrap();
    let chain = WormChain::new(g, ChainParams::from_x(x).unwrap());
    let states = table.states(g);
    let mut min = f64::INFINITY;
    for i in &states {
        for f in table.c0() {
            let f = WormState::from_edges(g, f.clone()).unwrap();
            let p = build_path(g, i, &f).unwrap();
            for (a, &e) in p.states.iter().zip(&p.toggles) {
                min = min.min(chain.toggle_prob(a, e));
            }
        }
    }
    min
}

#[test]
fn path_transitions_are_bounded_below() {
    for g in connected_graphs_up_to(5) {
        let n = g.n() as f64;
        let delta = g.max_degree() as f64;
        for x in [0.1, 0.5, 0.9] {
            let min = min_path_transition_prob(&g, x);
            assert!(min >= x / (n.max(4.0) * delta) * (1.0 - 1e-12), "{g} x={x}");
            if g.n() >= 4 {
                assert!(min >= x / (n * delta) * (1.0 - 1e-12), "{g} x={x}");
            }
        }
    }
}

#[test]
fn triangle_c2_moves_fall_below_x_over_n_delta() {
    // On K3 a C2 -> C2 extension from an odd vertex has probability x/8,
    // below x/(n Δ) = x/6.
    let g = complete(3).unwrap();
    let x = 0.5;
    let min = min_path_transition_prob(&g, x);
    assert!((min - x / 8.0).abs() < 1e-15);
    assert!(min < x / 6.0);
}

#[test]
fn reachable_states_have_zero_or_two_odd_vertices() {
    for g in [complete(5).unwrap(), grid(3, 3).unwrap(), cycle(9).unwrap()] {
        let chain = WormChain::new(&g, ChainParams::from_x(0.5).unwrap());
        let mut seen = HashSet::new();
        let mut queue = VecDeque::from([WormState::zero(&g)]);
        seen.insert(WormState::zero(&g));
        while let Some(a) = queue.pop_front() {
            assert!(matches!(a.boundary().vertices().len(), 0 | 2));
            for e in 0..g.m() {
                if chain.toggle_prob(&a, e) > 0.0 {
                    let b = a.toggle(&g, e).unwrap();
                    if seen.insert(b.clone()) {
                        queue.push_back(b);
                    }
                }
            }
        }
        let table = SubgraphClassTable::enumerate(&g, false, Caps::default()).unwrap();
        assert_eq!(seen.len(), table.c0().len() + table.c2().len());
    }
}

/// Pearson χ² p-value of `observed` counts against `expected` probabilities.
fn chi_square_p(observed: &[u64], expected: &[f64]) -> f64 {
    let total: u64 = observed.iter().sum();
    let mut stat = 0.0;
    let mut cells = 0;
    for (&o, &p) in observed.iter().zip(expected) {
        if p == 0.0 {
            assert_eq!(o, 0, "observed an impossible outcome");
            continue;
        }
        let e = p * total as f64;
        stat += (o as f64 - e).powi(2) / e;
        cells += 1;
    }
    ChiSquared::new((cells - 1) as f64).unwrap().sf(stat)
}

#[test]
fn one_step_frequencies_match_kernel_rows() {
    let cases = [
        (path(4).unwrap(), 0.3),
        (complete(4).unwrap(), 0.6),
        (grid(2, 3).unwrap(), 0.8),
    ];
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for (g, x) in cases {
        let table = SubgraphClassTable::enumerate(&g, false, Caps::default()).unwrap();
        let states = table.states(&g);
        let index: HashMap<&WormState, usize> =
            states.iter().enumerate().map(|(i, s)| (s, i)).collect();
        let chain = WormChain::new(&g, ChainParams::from_x(x).unwrap());
        // A handful of start states from both classes.
        let starts: Vec<&WormState> = states.iter().step_by(states.len() / 5).collect();
        for a in starts {
            let mut counts = vec![0u64; states.len()];
            for _ in 0..100_000 {
                let mut s = a.clone();
                chain.step(&mut s, &mut rng);
                counts[index[&s]] += 1;
            }
            let row: Vec<f64> = states.iter().map(|b| chain.transition_prob(a, b)).collect();
            let p = chi_square_p(&counts, &row);
            assert!(p > 0.001, "{g} x={x} from {}: p={p}", a.dump(&g));
        }
    }
}
