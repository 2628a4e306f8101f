//! Immutable simple connected graphs with a fixed labeling.
//!
//! Vertices are `0..n` internally and `1..=n` in every external format.
//! Edges are stored as `(u, v)` with `u < v`, sorted lexicographically; the
//! position of an edge in that list is its *edge index*, and every edge subset
//! in the crate is a bit vector keyed by it. The same order is the global
//! subgraph order used by the canonical paths.

use std::collections::VecDeque;
use std::fmt;

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GraphError {
    #[error("graph is disconnected: vertex {0} unreachable from vertex 1")]
    DisconnectedGraph(usize),
    #[error("self-loop at vertex {0}")]
    SelfLoop(usize),
    #[error("duplicate edge {0}-{1}")]
    DuplicateEdge(usize, usize),
    #[error("vertex label {label} outside 1..={n}")]
    BadLabel { label: i64, n: usize },
    #[error("graph has no edges")]
    EmptyEdgeSet,
    #[error("bad dimension: {0}")]
    BadDimension(String),
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

/// A neighbor entry in an adjacency list.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Neighbor {
    pub vertex: usize,
    pub edge: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    n: usize,
    edges: Vec<(usize, usize)>,
    adjacency: Vec<Vec<Neighbor>>,
    max_degree: usize,
}

impl Graph {
    /// Builds a graph from 0-based vertex pairs. Pair orientation and order
    /// are irrelevant; the canonical edge order is recomputed.
    pub fn new(n: usize, pairs: &[(usize, usize)]) -> Result<Self, GraphError> {
        if pairs.is_empty() {
            return Err(GraphError::EmptyEdgeSet);
        }
        let mut edges = Vec::with_capacity(pairs.len());
        for &(a, b) in pairs {
            for x in [a, b] {
                if x >= n {
                    return Err(GraphError::BadLabel {
                        label: x as i64 + 1,
                        n,
                    });
                }
            }
            if a == b {
                return Err(GraphError::SelfLoop(a + 1));
            }
            edges.push((a.min(b), a.max(b)));
        }
        edges.sort_unstable();
        if let Some(w) = edges.windows(2).find(|w| w[0] == w[1]) {
            return Err(GraphError::DuplicateEdge(w[0].0 + 1, w[0].1 + 1));
        }

        let mut adjacency = vec![Vec::new(); n];
        for (i, &(u, v)) in edges.iter().enumerate() {
            adjacency[u].push(Neighbor { vertex: v, edge: i });
            adjacency[v].push(Neighbor { vertex: u, edge: i });
        }
        for list in &mut adjacency {
            list.sort_unstable_by_key(|nb| nb.vertex);
        }
        let max_degree = adjacency.iter().map(Vec::len).max().unwrap_or(0);
        let g = Graph {
            n,
            edges,
            adjacency,
            max_degree,
        };
        let dist = g.distances_from(0);
        if let Some(v) = dist.iter().position(Option::is_none) {
            return Err(GraphError::DisconnectedGraph(v + 1));
        }
        Ok(g)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.edges.len()
    }

    /// Maximum degree Δ.
    pub fn max_degree(&self) -> usize {
        self.max_degree
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adjacency[v].len()
    }

    /// Neighbors of `v` sorted by label.
    pub fn neighbors(&self, v: usize) -> &[Neighbor] {
        &self.adjacency[v]
    }

    /// Edges in canonical order, 0-based endpoints with `u < v`.
    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn endpoints(&self, e: usize) -> (usize, usize) {
        self.edges[e]
    }

    pub fn edge_index(&self, u: usize, v: usize) -> Option<usize> {
        let key = (u.min(v), u.max(v));
        self.edges.binary_search(&key).ok()
    }

    /// Breadth-first distances from `source`; `None` marks unreachable
    /// vertices (only possible during construction).
    pub(crate) fn distances_from(&self, source: usize) -> Vec<Option<usize>> {
        let mut dist = vec![None; self.n];
        let mut queue = VecDeque::new();
        dist[source] = Some(0);
        queue.push_back(source);
        while let Some(w) = queue.pop_front() {
            let d = dist[w].unwrap();
            for nb in &self.adjacency[w] {
                if dist[nb.vertex].is_none() {
                    dist[nb.vertex] = Some(d + 1);
                    queue.push_back(nb.vertex);
                }
            }
        }
        dist
    }

    /// Graph distance between two 0-based vertices.
    pub fn distance(&self, u: usize, v: usize) -> Result<usize, GraphError> {
        for x in [u, v] {
            if x >= self.n {
                return Err(GraphError::BadLabel {
                    label: x as i64 + 1,
                    n: self.n,
                });
            }
        }
        Ok(self.distances_from(u)[v].expect("graph is connected"))
    }

    /// All-pairs distance matrix.
    pub fn distance_matrix(&self) -> Vec<Vec<usize>> {
        (0..self.n)
            .map(|u| {
                self.distances_from(u)
                    .into_iter()
                    .map(|d| d.expect("graph is connected"))
                    .collect()
            })
            .collect()
    }

    /// Serializes to the edge-list document format (1-based labels).
    pub fn to_edge_list(&self) -> String {
        let mut out = format!("{}\n", self.n);
        for &(u, v) in &self.edges {
            out.push_str(&format!("{} {}\n", u + 1, v + 1));
        }
        out
    }
}

impl fmt::Display for Graph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Graph(n={}, m={}, edges=[", self.n, self.m())?;
        for (i, &(u, v)) in self.edges.iter().enumerate() {
            if i > 0 {
                write!(f, " ")?;
            }
            write!(f, "{}-{}", u + 1, v + 1)?;
        }
        write!(f, "])")
    }
}

/// Parses an edge-list document.
///
/// The first significant line holds `n`; every following significant line
/// holds `u v` with `1 <= u, v <= n`. Blank lines are skipped and `#` starts
/// a comment that runs to the end of the line.
pub fn parse_graph(text: &str) -> Result<Graph, GraphError> {
    let mut n: Option<usize> = None;
    let mut pairs = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let line_err = |msg: String| GraphError::Parse {
            line: lineno + 1,
            msg,
        };
        let fields: Vec<&str> = line.split_whitespace().collect();
        match n {
            None => {
                if fields.len() != 1 {
                    return Err(line_err(format!("expected vertex count, got {line:?}")));
                }
                let count: usize = fields[0]
                    .parse()
                    .map_err(|_| line_err(format!("bad vertex count {:?}", fields[0])))?;
                if count == 0 {
                    return Err(line_err("vertex count must be positive".into()));
                }
                n = Some(count);
            }
            Some(count) => {
                if fields.len() != 2 {
                    return Err(line_err(format!("expected \"u v\", got {line:?}")));
                }
                let mut ends = [0usize; 2];
                for (slot, tok) in ends.iter_mut().zip(&fields) {
                    let label: i64 = tok
                        .parse()
                        .map_err(|_| line_err(format!("bad vertex label {tok:?}")))?;
                    if label < 1 || label as usize > count {
                        return Err(GraphError::BadLabel { label, n: count });
                    }
                    *slot = label as usize - 1;
                }
                pairs.push((ends[0], ends[1]));
            }
        }
    }
    let n = n.ok_or(GraphError::EmptyEdgeSet)?;
    Graph::new(n, &pairs)
}

/// Generator families.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GraphKind {
    Cycle,
    Path,
    Complete,
    Grid,
}

impl std::str::FromStr for GraphKind {
    type Err = GraphError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "cycle" => Ok(GraphKind::Cycle),
            "path" => Ok(GraphKind::Path),
            "complete" => Ok(GraphKind::Complete),
            "grid" => Ok(GraphKind::Grid),
            other => Err(GraphError::BadDimension(format!(
                "unknown graph kind {other:?} (expected cycle|path|complete|grid)"
            ))),
        }
    }
}

/// Generates a canonical labeled graph. `cycle`, `path` and `complete` take
/// one dimension; `grid` takes `rows cols` and labels vertices row-major.
pub fn generate(kind: GraphKind, dims: &[usize]) -> Result<Graph, GraphError> {
    let bad = |msg: &str| Err(GraphError::BadDimension(msg.to_string()));
    match kind {
        GraphKind::Cycle | GraphKind::Path | GraphKind::Complete => {
            let &[n] = dims else {
                return bad("expected exactly one dimension");
            };
            match kind {
                GraphKind::Cycle => {
                    if n < 3 {
                        return bad("cycle needs n >= 3");
                    }
                    let pairs: Vec<_> = (0..n).map(|i| (i, (i + 1) % n)).collect();
                    Graph::new(n, &pairs)
                }
                GraphKind::Path => {
                    if n < 2 {
                        return bad("path needs n >= 2");
                    }
                    let pairs: Vec<_> = (0..n - 1).map(|i| (i, i + 1)).collect();
                    Graph::new(n, &pairs)
                }
                _ => {
                    if n < 2 {
                        return bad("complete graph needs n >= 2");
                    }
                    let pairs: Vec<_> = (0..n)
                        .flat_map(|u| (u + 1..n).map(move |v| (u, v)))
                        .collect();
                    Graph::new(n, &pairs)
                }
            }
        }
        GraphKind::Grid => {
            let &[rows, cols] = dims else {
                return bad("grid expects two dimensions (rows cols)");
            };
            if rows == 0 || cols == 0 || rows * cols < 2 {
                return bad("grid needs rows, cols >= 1 and at least two vertices");
            }
            let id = |r: usize, c: usize| r * cols + c;
            let mut pairs = Vec::new();
            for r in 0..rows {
                for c in 0..cols {
                    if c + 1 < cols {
                        pairs.push((id(r, c), id(r, c + 1)));
                    }
                    if r + 1 < rows {
                        pairs.push((id(r, c), id(r + 1, c)));
                    }
                }
            }
            Graph::new(rows * cols, &pairs)
        }
    }
}

pub fn cycle(n: usize) -> Result<Graph, GraphError> {
    generate(GraphKind::Cycle, &[n])
}

pub fn path(n: usize) -> Result<Graph, GraphError> {
    generate(GraphKind::Path, &[n])
}

pub fn complete(n: usize) -> Result<Graph, GraphError> {
    generate(GraphKind::Complete, &[n])
}

pub fn grid(rows: usize, cols: usize) -> Result<Graph, GraphError> {
    generate(GraphKind::Grid, &[rows, cols])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_single_edge() {
        let g = parse_graph("2\n1 2").unwrap();
        assert_eq!((g.n(), g.m()), (2, 1));
        assert_eq!(g.edges(), &[(0, 1)]);
    }

    #[test]
    fn parses_triangle_with_comments() {
        let g = parse_graph("# triangle\n3\n\n1 2\n  2   3  # middle\n1 3\n").unwrap();
        assert_eq!(g.m(), 3);
        assert_eq!(g.max_degree(), 2);
        assert_eq!(g.edges(), &[(0, 1), (0, 2), (1, 2)]);
    }

    #[test]
    fn parse_rejections() {
        assert_eq!(
            parse_graph("3\n1 2\n1 2"),
            Err(GraphError::DuplicateEdge(1, 2))
        );
        assert_eq!(
            parse_graph("3\n1 2\n2 1\n2 3"),
            Err(GraphError::DuplicateEdge(1, 2))
        );
        assert_eq!(parse_graph("3\n1 1\n2 3"), Err(GraphError::SelfLoop(1)));
        assert_eq!(
            parse_graph("3\n1 4"),
            Err(GraphError::BadLabel { label: 4, n: 3 })
        );
        assert_eq!(
            parse_graph("3\n0 1"),
            Err(GraphError::BadLabel { label: 0, n: 3 })
        );
        assert_eq!(parse_graph("3\n"), Err(GraphError::EmptyEdgeSet));
        assert_eq!(parse_graph(""), Err(GraphError::EmptyEdgeSet));
        assert_eq!(
            parse_graph("4\n1 2\n3 4"),
            Err(GraphError::DisconnectedGraph(3))
        );
        assert!(matches!(
            parse_graph("3\n1 2 3"),
            Err(GraphError::Parse { line: 2, .. })
        ));
    }

    #[test]
    fn parse_is_deterministic_and_round_trips() {
        let text = "5\n4 5\n1 3\n2 1\n3 4\n5 1\n";
        let a = parse_graph(text).unwrap();
        let b = parse_graph(text).unwrap();
        assert_eq!(a.edges(), b.edges());
        assert_eq!(parse_graph(&a.to_edge_list()).unwrap(), a);
    }

    #[test]
    fn generators() {
        let c4 = cycle(4).unwrap();
        assert_eq!((c4.n(), c4.m(), c4.max_degree()), (4, 4, 2));
        let k4 = complete(4).unwrap();
        assert_eq!((k4.n(), k4.m(), k4.max_degree()), (4, 6, 3));
        let g22 = grid(2, 2).unwrap();
        assert_eq!((g22.n(), g22.m(), g22.max_degree()), (4, 4, 2));
        // grid(2,2) is the 4-cycle 1-2-4-3.
        assert!(g22.distance_matrix().iter().all(|row| {
            let mut r = row.clone();
            r.sort_unstable();
            r == vec![0, 1, 1, 2]
        }));
        let p = path(5).unwrap();
        assert_eq!((p.m(), p.max_degree()), (4, 2));
        assert!(cycle(2).is_err());
        assert!(path(1).is_err());
        assert!(grid(1, 1).is_err());
        assert!(generate(GraphKind::Grid, &[3]).is_err());
    }

    #[test]
    fn degrees_sum_to_twice_edges() {
        for g in [grid(3, 4).unwrap(), complete(5).unwrap(), cycle(7).unwrap()] {
            let total: usize = (0..g.n()).map(|v| g.degree(v)).sum();
            assert_eq!(total, 2 * g.m());
            assert_eq!(
                g.max_degree(),
                (0..g.n()).map(|v| g.degree(v)).max().unwrap()
            );
            for w in g.edges().windows(2) {
                assert!(w[0] < w[1]);
            }
        }
    }

    #[test]
    fn distances() {
        let c4 = cycle(4).unwrap();
        assert_eq!(c4.distance(0, 2).unwrap(), 2);
        assert_eq!(c4.distance(3, 3).unwrap(), 0);
        let g = grid(3, 3).unwrap();
        assert_eq!(g.distance(0, 8).unwrap(), 4);
        assert!(matches!(g.distance(0, 9), Err(GraphError::BadLabel { .. })));
    }

    #[test]
    fn edge_index_lookup() {
        let g = complete(4).unwrap();
        for (i, &(u, v)) in g.edges().iter().enumerate() {
            assert_eq!(g.edge_index(u, v), Some(i));
            assert_eq!(g.edge_index(v, u), Some(i));
        }
        assert_eq!(cycle(4).unwrap().edge_index(0, 2), None);
    }
}
