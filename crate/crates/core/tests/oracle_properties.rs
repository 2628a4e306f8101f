use worm_core::catalog::{connected_graphs, connected_graphs_up_to};
use worm_core::exact::{verify_suite, Caps, ExactOracle, SubgraphClassTable};
use worm_core::graph::{complete, cycle, grid, path, Graph};
use worm_core::paths::shortest_path_edges;

fn graphs_up_to_twelve_edges() -> Vec<Graph> {
    let mut gs = connected_graphs_up_to(5);
    gs.extend(connected_graphs(6).into_iter().filter(|g| g.m() <= 12));
    gs.extend((6..=12).map(|n| cycle(n).unwrap()));
    gs.push(grid(3, 3).unwrap());
    gs.push(grid(2, 5).unwrap());
    gs.push(path(10).unwrap());
    gs
}

#[test]
fn identity_suite_on_catalog() {
    for g in connected_graphs_up_to(5) {
        for beta in [0.2, 0.5, 1.0, 2.0] {
            let report = verify_suite(&g, beta, Caps::default()).unwrap();
            assert!(
                report.pass(),
                "{g} beta={beta}: {:?}",
                report.first_failure()
            );
        }
    }
}

#[test]
fn dual_routes_on_larger_graphs() {
    for g in [
        grid(3, 3).unwrap(),
        complete(6).unwrap(),
        cycle(12).unwrap(),
    ] {
        let oracle = ExactOracle::new(&g, false, Caps::default()).unwrap();
        for beta in [0.1, 0.8] {
            let chi = oracle.susceptibility(beta).unwrap();
            assert!(chi > 1.0);
            for v in 1..g.n() {
                let c = oracle.two_point(beta, 0, v).unwrap();
                assert!(c > 0.0 && c < 1.0);
            }
        }
    }
}

#[test]
fn cycle_space_cardinality() {
    for g in graphs_up_to_twelve_edges() {
        let table = SubgraphClassTable::enumerate(&g, false, Caps::default()).unwrap();
        assert_eq!(table.c0().len() as u64, 1u64 << (g.m() + 1 - g.n()), "{g}");
    }
}

#[test]
fn measure_bounds_up_to_twelve_edges() {
    for g in graphs_up_to_twelve_edges() {
        let oracle = ExactOracle::new(&g, false, Caps::default()).unwrap();
        for x in [0.01, 0.25, 0.5, 0.99] {
            let report = oracle.measure_bound_checks(x);
            assert!(report.pass(), "{g} x={x}: {:?}", report.first_failure());
        }
    }
}

#[test]
fn bijections_along_shortest_paths() {
    for g in [grid(3, 3).unwrap(), complete(5).unwrap()] {
        let oracle = ExactOracle::new(&g, false, Caps::default()).unwrap();
        for u in 0..g.n() {
            for v in u + 1..g.n() {
                let f = shortest_path_edges(&g, u, v);
                assert!(oracle.bijection_check(&[u, v], &f).unwrap().pass);
            }
        }
    }
}
