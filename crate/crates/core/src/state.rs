//! Edge subsets, odd-vertex boundaries and the worm state space `W = C0 ∪ C2`.

use std::cmp::Ordering;
use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::graph::Graph;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum StateError {
    #[error("toggling edge {edge} leaves the state space: boundary would have {odd} odd vertices")]
    LeavesStateSpace { edge: usize, odd: usize },
    #[error("edge subset has {0} odd vertices; worm states need 0 or 2")]
    NotInW(usize),
}

/// A subset of the edge set as a fixed-width bit vector keyed by edge index.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct EdgeSubset {
    words: Vec<u64>,
    width: usize,
}

impl EdgeSubset {
    /// The empty subset `0` of a graph with `width` edges.
    pub fn empty(width: usize) -> Self {
        EdgeSubset {
            words: vec![0; width.div_ceil(64).max(1)],
            width,
        }
    }

    pub fn from_indices(width: usize, indices: impl IntoIterator<Item = usize>) -> Self {
        let mut s = Self::empty(width);
        for e in indices {
            s.insert(e);
        }
        s
    }

    /// Builds a subset from the low `width` bits of `mask` (`width <= 64`).
    pub fn from_mask(width: usize, mask: u64) -> Self {
        assert!(width <= 64, "mask form needs width <= 64");
        let mut s = Self::empty(width);
        s.words[0] = if width == 64 {
            mask
        } else {
            mask & ((1u64 << width) - 1)
        };
        s
    }

    /// Low 64 bits as a mask (exact when `width <= 64`).
    pub fn to_mask(&self) -> u64 {
        self.words[0]
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn contains(&self, e: usize) -> bool {
        debug_assert!(e < self.width);
        self.words[e / 64] >> (e % 64) & 1 == 1
    }

    pub fn insert(&mut self, e: usize) {
        assert!(e < self.width, "edge index {e} out of range");
        self.words[e / 64] |= 1 << (e % 64);
    }

    pub fn remove(&mut self, e: usize) {
        assert!(e < self.width, "edge index {e} out of range");
        self.words[e / 64] &= !(1 << (e % 64));
    }

    pub fn flip(&mut self, e: usize) {
        assert!(e < self.width, "edge index {e} out of range");
        self.words[e / 64] ^= 1 << (e % 64);
    }

    /// `|A|`.
    pub fn len(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn symmetric_difference(&self, other: &Self) -> Self {
        self.zip_with(other, |a, b| a ^ b)
    }

    pub fn union(&self, other: &Self) -> Self {
        self.zip_with(other, |a, b| a | b)
    }

    pub fn intersection(&self, other: &Self) -> Self {
        self.zip_with(other, |a, b| a & b)
    }

    pub fn difference(&self, other: &Self) -> Self {
        self.zip_with(other, |a, b| a & !b)
    }

    fn zip_with(&self, other: &Self, f: impl Fn(u64, u64) -> u64) -> Self {
        assert_eq!(self.width, other.width, "edge subsets of different graphs");
        EdgeSubset {
            words: self
                .words
                .iter()
                .zip(&other.words)
                .map(|(&a, &b)| f(a, b))
                .collect(),
            width: self.width,
        }
    }

    /// Edge indices in increasing order.
    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &w)| {
            let mut rest = w;
            std::iter::from_fn(move || {
                if rest == 0 {
                    return None;
                }
                let b = rest.trailing_zeros() as usize;
                rest &= rest - 1;
                Some(wi * 64 + b)
            })
        })
    }

    /// The global subgraph order: lexicographic comparison of the increasing
    /// edge-index sequences (a proper prefix sorts first).
    pub fn subgraph_cmp(&self, other: &Self) -> Ordering {
        self.iter().cmp(other.iter())
    }

    /// Edge tokens `u-v` (1-based labels) in edge order, space separated.
    pub fn dump(&self, g: &Graph) -> String {
        let tokens: Vec<String> = self
            .iter()
            .map(|e| {
                let (u, v) = g.endpoints(e);
                format!("{}-{}", u + 1, v + 1)
            })
            .collect();
        tokens.join(" ")
    }
}

impl fmt::Debug for EdgeSubset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

/// The odd vertices `∂A` of the spanning subgraph `(V, A)`, recomputed from
/// scratch. Sorted, 0-based.
pub fn boundary(g: &Graph, edges: &EdgeSubset) -> Vec<usize> {
    let mut odd = vec![false; g.n()];
    for e in edges.iter() {
        let (u, v) = g.endpoints(e);
        odd[u] ^= true;
        odd[v] ^= true;
    }
    (0..g.n()).filter(|&v| odd[v]).collect()
}

/// Which part of `W` a state lies in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Class {
    C0,
    C2,
}

impl fmt::Display for Class {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Class::C0 => "C0",
            Class::C2 => "C2",
        })
    }
}

/// A boundary of size 0 or 2, stored sorted.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Boundary {
    len: u8,
    ends: [usize; 2],
}

impl Boundary {
    pub const EMPTY: Boundary = Boundary {
        len: 0,
        ends: [0, 0],
    };

    fn pair(a: usize, b: usize) -> Self {
        Boundary {
            len: 2,
            ends: [a.min(b), a.max(b)],
        }
    }

    pub fn vertices(&self) -> &[usize] {
        &self.ends[..self.len as usize]
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn contains(&self, v: usize) -> bool {
        self.vertices().contains(&v)
    }

    /// `∂A △ {u, v}`, or the size of the resulting set if it is not 0 or 2.
    fn toggled(&self, u: usize, v: usize) -> Result<Boundary, usize> {
        let mut set: [usize; 4] = [0; 4];
        let mut len = 0;
        for &w in self.vertices() {
            if w != u && w != v {
                set[len] = w;
                len += 1;
            }
        }
        for w in [u, v] {
            if !self.contains(w) {
                set[len] = w;
                len += 1;
            }
        }
        match len {
            0 => Ok(Boundary::EMPTY),
            2 => Ok(Boundary::pair(set[0], set[1])),
            k => Err(k),
        }
    }
}

/// A member of `W`: an edge subset with 0 or 2 odd vertices, plus its cached
/// boundary.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct WormState {
    edges: EdgeSubset,
    boundary: Boundary,
}

impl WormState {
    /// The state `0`.
    pub fn zero(g: &Graph) -> Self {
        WormState {
            edges: EdgeSubset::empty(g.m()),
            boundary: Boundary::EMPTY,
        }
    }

    pub fn from_edges(g: &Graph, edges: EdgeSubset) -> Result<Self, StateError> {
        let odd = boundary(g, &edges);
        let boundary = match odd.as_slice() {
            [] => Boundary::EMPTY,
            &[a, b] => Boundary::pair(a, b),
            other => return Err(StateError::NotInW(other.len())),
        };
        Ok(WormState { edges, boundary })
    }

    pub fn edges(&self) -> &EdgeSubset {
        &self.edges
    }

    pub fn boundary(&self) -> &Boundary {
        &self.boundary
    }

    pub fn class(&self) -> Class {
        if self.boundary.is_empty() {
            Class::C0
        } else {
            Class::C2
        }
    }

    pub fn is_zero(&self) -> bool {
        self.edges.is_empty()
    }

    /// Symmetric difference with edge `e`, maintaining the boundary
    /// incrementally. On error the state is left unchanged.
    pub fn toggle_in_place(&mut self, g: &Graph, e: usize) -> Result<(), StateError> {
        let (u, v) = g.endpoints(e);
        let next = self
            .boundary
            .toggled(u, v)
            .map_err(|odd| StateError::LeavesStateSpace { edge: e, odd })?;
        self.edges.flip(e);
        self.boundary = next;
        Ok(())
    }

    pub fn toggle(&self, g: &Graph, e: usize) -> Result<Self, StateError> {
        let mut next = self.clone();
        next.toggle_in_place(g, e)?;
        Ok(next)
    }

    /// Textual dump: `[u-v ...] odd=[a b]` with 1-based labels.
    pub fn dump(&self, g: &Graph) -> String {
        let odd: Vec<String> = self
            .boundary
            .vertices()
            .iter()
            .map(|v| (v + 1).to_string())
            .collect();
        format!("[{}] odd=[{}]", self.edges.dump(g), odd.join(" "))
    }
}

/// Free-function form of [`WormState::toggle`].
pub fn toggle(g: &Graph, s: &WormState, e: usize) -> Result<WormState, StateError> {
    s.toggle(g, e)
}

pub fn classify(s: &WormState) -> Class {
    s.class()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{complete, cycle, grid};
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn tri() -> Graph {
        complete(3).unwrap()
    }

    #[test]
    fn boundary_examples() {
        let g = tri();
        assert!(boundary(&g, &EdgeSubset::empty(3)).is_empty());
        let e12 = g.edge_index(0, 1).unwrap();
        let e23 = g.edge_index(1, 2).unwrap();
        assert_eq!(
            boundary(&g, &EdgeSubset::from_indices(3, [e12])),
            vec![0, 1]
        );
        assert_eq!(
            boundary(&g, &EdgeSubset::from_indices(3, [e12, e23])),
            vec![0, 2]
        );
    }

    #[test]
    fn toggle_examples() {
        let g = tri();
        let e12 = g.edge_index(0, 1).unwrap();
        let e13 = g.edge_index(0, 2).unwrap();
        let e23 = g.edge_index(1, 2).unwrap();
        let zero = WormState::zero(&g);
        assert_eq!(zero.class(), Class::C0);

        let one = zero.toggle(&g, e12).unwrap();
        assert_eq!(one.boundary().vertices(), &[0, 1]);
        assert_eq!(one.class(), Class::C2);
        assert_eq!(one.toggle(&g, e12).unwrap(), zero);

        let path = one.toggle(&g, e23).unwrap();
        assert_eq!(path.boundary().vertices(), &[0, 2]);
        let full = path.toggle(&g, e13).unwrap();
        assert!(full.boundary().is_empty());
        assert_eq!(classify(&full), Class::C0);
        assert_eq!(full.edges().len(), 3);
    }

    #[test]
    fn toggle_leaving_w_is_rejected() {
        let g = cycle(4).unwrap();
        let e12 = g.edge_index(0, 1).unwrap();
        let e34 = g.edge_index(2, 3).unwrap();
        let s = WormState::zero(&g).toggle(&g, e12).unwrap();
        let before = s.clone();
        let mut t = s.clone();
        assert_eq!(
            t.toggle_in_place(&g, e34),
            Err(StateError::LeavesStateSpace { edge: e34, odd: 4 })
        );
        assert_eq!(t, before);
        assert_eq!(
            WormState::from_edges(&g, EdgeSubset::from_indices(4, [e12, e34])),
            Err(StateError::NotInW(4))
        );
    }

    #[test]
    fn dump_format() {
        let g = tri();
        let s = WormState::zero(&g)
            .toggle(&g, 0)
            .unwrap()
            .toggle(&g, 2)
            .unwrap();
        assert_eq!(s.dump(&g), "[1-2 2-3] odd=[1 3]");
        assert_eq!(WormState::zero(&g).dump(&g), "[] odd=[]");
    }

    #[test]
    fn boundary_of_symmetric_difference_exhaustive() {
        // ∂(A △ B) = ∂A △ ∂B for all pairs of subsets, m <= 12.
        for g in [grid(3, 3).unwrap(), complete(4).unwrap(), cycle(5).unwrap()] {
            let m = g.m();
            assert!(m <= 12);
            let odd_mask = |mask: u64| -> u64 {
                let mut acc = 0u64;
                for v in boundary(&g, &EdgeSubset::from_mask(m, mask)) {
                    acc |= 1 << v;
                }
                acc
            };
            let table: Vec<u64> = (0..1u64 << m).map(odd_mask).collect();
            for a in 0..1u64 << m {
                for b in 0..1u64 << m {
                    assert_eq!(
                        table[(a ^ b) as usize],
                        table[a as usize] ^ table[b as usize]
                    );
                }
            }
        }
    }

    #[test]
    fn incremental_boundary_fuzz() {
        // 1e5 random legal toggles; cached boundary must match recomputation.
        let g = grid(4, 5).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let mut s = WormState::zero(&g);
        let mut applied = 0;
        while applied < 100_000 {
            let e = rng.random_range(0..g.m());
            if s.toggle_in_place(&g, e).is_ok() {
                applied += 1;
                assert_eq!(s.boundary().vertices(), boundary(&g, s.edges()).as_slice());
            } else {
                assert!(![0, 2].contains(&s.toggle_unchecked_odd(&g, e)));
            }
        }
    }

    impl WormState {
        fn toggle_unchecked_odd(&self, g: &Graph, e: usize) -> usize {
            let mut edges = self.edges.clone();
            edges.flip(e);
            boundary(g, &edges).len()
        }
    }

    proptest! {
        #[test]
        fn symmetric_difference_is_an_involution(a in any::<u64>(), b in any::<u64>(), width in 1usize..=64) {
            let a = EdgeSubset::from_mask(width, a);
            let b = EdgeSubset::from_mask(width, b);
            prop_assert_eq!(a.symmetric_difference(&b).symmetric_difference(&b), a.clone());
            prop_assert!(a.len() <= width);
            prop_assert_eq!(a.union(&b).len() + a.intersection(&b).len(), a.len() + b.len());
        }

        #[test]
        fn wide_subsets_iterate_in_order(idx in proptest::collection::btree_set(0usize..200, 0..40)) {
            let s = EdgeSubset::from_indices(200, idx.iter().copied());
            prop_assert_eq!(s.iter().collect::<Vec<_>>(), idx.iter().copied().collect::<Vec<_>>());
            prop_assert_eq!(s.len(), idx.len());
        }
    }
}
