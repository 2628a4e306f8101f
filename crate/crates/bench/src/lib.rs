//! Graph fixtures shared by the benchmarks.

use worm_core::graph::{complete, cycle, grid};
use worm_core::Graph;

/// Graphs small enough for exhaustive enumeration.
pub fn exhaustive_fixtures() -> Vec<(&'static str, Graph)> {
    vec![
        ("cycle_8", cycle(8).unwrap()),
        ("complete_5", complete(5).unwrap()),
        ("grid_3x3", grid(3, 3).unwrap()),
    ]
}

/// Graphs used for raw step throughput.
pub fn sampling_fixtures() -> Vec<(&'static str, Graph)> {
    vec![
        ("cycle_64", cycle(64).unwrap()),
        ("grid_16x16", grid(16, 16).unwrap()),
        ("complete_32", complete(32).unwrap()),
    ]
}
