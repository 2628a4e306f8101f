use std::collections::HashSet;

use worm_core::catalog::connected_graphs_up_to;
use worm_core::exact::{Caps, SubgraphClassTable};
use worm_core::graph::{cycle, grid, Graph};
use worm_core::paths::{build_path, congestion, decompose, reconstruction_failures};
use worm_core::spectral::{relaxation_time, ChainMatrix, SpectralCaps};
use worm_core::{ChainParams, Class, WormState};

const BUDGET: usize = 5_000_000;

fn graphs() -> Vec<Graph> {
    let mut gs = connected_graphs_up_to(4);
    gs.push(cycle(5).unwrap());
    gs.push(grid(2, 3).unwrap());
    gs
}

#[test]
fn every_pair_has_a_valid_path_partitioning_the_difference() {
    for g in graphs() {
        let table = SubgraphClassTable::enumerate(&g, false, Caps::default()).unwrap();
        let states = table.states(&g);
        for i in &states {
            for f in states.iter().filter(|s| s.class() == Class::C0) {
                let d = i.edges().symmetric_difference(f.edges());
                let dec = decompose(&g, i, f).unwrap();
                let toggles = dec.toggles();
                let distinct: HashSet<usize> = toggles.iter().copied().collect();
                assert_eq!(distinct.len(), toggles.len());
                assert_eq!(distinct, d.iter().collect::<HashSet<_>>());
                for c in &dec.cycles {
                    assert!(c.len() >= 3);
                }

                let path = build_path(&g, i, f).unwrap();
                assert_eq!(path.len(), d.len());
                assert!(path.len() <= g.m());
                assert_eq!(path.states.first(), Some(i));
                assert_eq!(path.states.last(), Some(f));
                for w in path.states.windows(2) {
                    assert_eq!(w[0].edges().symmetric_difference(w[1].edges()).len(), 1);
                }
            }
        }
    }
}

#[test]
fn eta_round_trips_exhaustively() {
    for g in graphs() {
        assert_eq!(
            reconstruction_failures(&g, BUDGET, Caps::default()).unwrap(),
            0,
            "{g}"
        );
    }
}

#[test]
fn congestion_bounds_and_comparison_with_relaxation() {
    for g in graphs() {
        for x in [0.3, 0.7] {
            let params = ChainParams::from_x(x).unwrap();
            let r = congestion(&g, params, BUDGET, Caps::default()).unwrap();
            assert!(r.pass, "{g} x={x}: {r:?}");
            assert_eq!(r.eta_collisions, 0);
            assert_eq!(r.eta_class_violations, 0);
            assert_eq!(r.eta_bound_violations, 0);
            assert!(r.phi <= r.bound);
            assert!(r.l_max <= r.m);
            let cm = ChainMatrix::build(&g, params, SpectralCaps::default()).unwrap();
            let t_rel = relaxation_time(&cm).unwrap().t_rel;
            assert!(4.0 * r.l_max as f64 * r.phi >= t_rel, "{g} x={x}");
        }
    }
}

#[test]
fn path_states_stay_in_w() {
    let g = grid(3, 3).unwrap();
    let table = SubgraphClassTable::enumerate(&g, false, Caps::default()).unwrap();
    let finals: Vec<WormState> = table
        .c0()
        .iter()
        .map(|a| WormState::from_edges(&g, a.clone()).unwrap())
        .collect();
    for i in table.states(&g).iter().step_by(37) {
        for f in &finals {
            let p = build_path(&g, i, f).unwrap();
            assert!(p.states.iter().all(|s| s.boundary().vertices().len() <= 2));
        }
    }
}
