//! Exhaustive catalogs of small connected graphs, one representative per
//! isomorphism class.

use std::collections::HashSet;

use crate::graph::Graph;

fn permutations(n: usize) -> Vec<Vec<usize>> {
    fn rec(prefix: &mut Vec<usize>, used: &mut [bool], out: &mut Vec<Vec<usize>>) {
        if prefix.len() == used.len() {
            out.push(prefix.clone());
            return;
        }
        for i in 0..used.len() {
            if !used[i] {
                used[i] = true;
                prefix.push(i);
                rec(prefix, used, out);
                prefix.pop();
                used[i] = false;
            }
        }
    }
    let mut out = Vec::new();
    rec(&mut Vec::new(), &mut vec![false; n], &mut out);
    out
}

/// Every connected graph on exactly `n` vertices up to isomorphism
/// (`2 <= n <= 7`). The representative of each class is the labeling whose
/// edge bitmask over the pairs of `K_n` is numerically smallest.
pub fn connected_graphs(n: usize) -> Vec<Graph> {
    assert!((2..=7).contains(&n), "catalog supports 2 <= n <= 7");
    let pairs: Vec<(usize, usize)> = (0..n)
        .flat_map(|u| (u + 1..n).map(move |v| (u, v)))
        .collect();
    let pair_index = |a: usize, b: usize| {
        let (u, v) = (a.min(b), a.max(b));
        pairs.iter().position(|&p| p == (u, v)).unwrap()
    };
    // For each permutation, where each pair bit goes.
    let maps: Vec<Vec<usize>> = permutations(n)
        .iter()
        .map(|p| pairs.iter().map(|&(u, v)| pair_index(p[u], p[v])).collect())
        .collect();

    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for mask in 1u64..(1u64 << pairs.len()) {
        if seen.contains(&mask) {
            continue;
        }
        for map in &maps {
            let mut image = 0u64;
            let mut rest = mask;
            while rest != 0 {
                let b = rest.trailing_zeros() as usize;
                image |= 1 << map[b];
                rest &= rest - 1;
            }
            seen.insert(image);
        }
        let edges: Vec<(usize, usize)> = (0..pairs.len())
            .filter(|&b| mask >> b & 1 == 1)
            .map(|b| pairs[b])
            .collect();
        if let Ok(g) = Graph::new(n, &edges) {
            out.push(g);
        }
    }
    out
}

/// All connected graphs with `2 <= n <= max_n` vertices, up to isomorphism.
pub fn connected_graphs_up_to(max_n: usize) -> Vec<Graph> {
    (2..=max_n).flat_map(connected_graphs).collect()
}
