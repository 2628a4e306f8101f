//! Brute-force ground truth on small graphs.
//!
//! Two independent routes to every Ising quantity: sums over all `2^n` spin
//! configurations, and the high-temperature expansion over all `2^m` edge
//! subsets bucketed by boundary. The PS measure `π_x` on `W = C0 ∪ C2` is
//! built from the latter.

use std::collections::{HashMap, HashSet};

use rayon::prelude::*;
use thiserror::Error;

use crate::check::{Check, Relation, Report};
use crate::graph::Graph;
use crate::state::{boundary, EdgeSubset, WormState};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OracleError {
    #[error("{what} = {size} exceeds the enumeration cap {cap}")]
    TooLarge {
        what: &'static str,
        size: usize,
        cap: usize,
    },
    #[error("identity mismatch: {0:?}")]
    Mismatch(Box<Check>),
    #[error("cross-check mismatch: subgraph route {subgraph} vs spin route {spin}")]
    CrossCheckMismatch { subgraph: f64, spin: f64 },
    #[error("bound violated: {0:?}")]
    BoundViolation(Box<Check>),
    #[error("bijection violated: {0}")]
    BijectionViolation(String),
    #[error("edge subset with {0} odd vertices is not in W")]
    NotInW(usize),
    #[error("bad argument: {0}")]
    BadArgument(String),
}

/// Enumeration limits. Defaults: `m <= 22` edges for subset scans and
/// `n <= 20` vertices for spin sums.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Caps {
    pub max_edges: usize,
    pub max_vertices: usize,
}

impl Default for Caps {
    fn default() -> Self {
        Caps {
            max_edges: 22,
            max_vertices: 20,
        }
    }
}

impl Caps {
    fn check_edges(&self, g: &Graph) -> Result<(), OracleError> {
        if g.m() > self.max_edges {
            return Err(OracleError::TooLarge {
                what: "edge count",
                size: g.m(),
                cap: self.max_edges,
            });
        }
        Ok(())
    }

    fn check_vertices(&self, g: &Graph) -> Result<(), OracleError> {
        if g.n() > self.max_vertices {
            return Err(OracleError::TooLarge {
                what: "vertex count",
                size: g.n(),
                cap: self.max_vertices,
            });
        }
        Ok(())
    }
}

fn vertex_mask(vertices: &[usize]) -> u64 {
    vertices.iter().fold(0, |acc, &v| acc | 1 << v)
}

fn edge_masks(g: &Graph) -> Vec<u64> {
    g.edges().iter().map(|&(u, v)| 1 << u | 1 << v).collect()
}

/// All edge subsets bucketed by boundary.
///
/// For every boundary `W` that occurs, `counts(W)[k]` is the number of
/// `A ⊆ E` with `∂A = W` and `|A| = k`, so that `λ_x(C_W)` is a polynomial
/// in `x` evaluated from low degree to high.
#[derive(Debug, Clone)]
pub struct SubgraphClassTable {
    n: usize,
    m: usize,
    c0: Vec<EdgeSubset>,
    c2: Vec<EdgeSubset>,
    c4: Option<Vec<EdgeSubset>>,
    polys: HashMap<u64, Vec<u64>>,
}

#[derive(Default)]
struct Partial {
    c0: Vec<u64>,
    c2: Vec<u64>,
    c4: Vec<u64>,
    polys: HashMap<u64, Vec<u64>>,
}

impl Partial {
    fn merge(mut self, other: Partial) -> Partial {
        self.c0.extend(other.c0);
        self.c2.extend(other.c2);
        self.c4.extend(other.c4);
        for (w, counts) in other.polys {
            let slot = self.polys.entry(w).or_insert_with(|| vec![0; counts.len()]);
            for (a, b) in slot.iter_mut().zip(counts) {
                *a += b;
            }
        }
        self
    }
}

fn sort_subsets(list: Vec<u64>, m: usize) -> Vec<EdgeSubset> {
    let mut out: Vec<EdgeSubset> = list
        .into_iter()
        .map(|a| EdgeSubset::from_mask(m, a))
        .collect();
    out.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.subgraph_cmp(b)));
    out
}

impl SubgraphClassTable {
    /// Scans all `2^m` subsets of `E`. `with_c4` also lists `C4`.
    pub fn enumerate(g: &Graph, with_c4: bool, caps: Caps) -> Result<Self, OracleError> {
        caps.check_edges(g)?;
        if g.n() > 64 {
            return Err(OracleError::TooLarge {
                what: "vertex count",
                size: g.n(),
                cap: 64,
            });
        }
        let m = g.m();
        let masks = edge_masks(g);
        let low = m.min(14);
        let high = m - low;

        let partial = (0..1u64 << high)
            .into_par_iter()
            .map(|prefix| {
                let mut part = Partial::default();
                let mut subset = prefix << low;
                let mut odd = (0..m)
                    .filter(|&b| subset >> b & 1 == 1)
                    .fold(0u64, |acc, b| acc ^ masks[b]);
                let mut record = |subset: u64, odd: u64| {
                    let size = subset.count_ones() as usize;
                    part.polys.entry(odd).or_insert_with(|| vec![0; m + 1])[size] += 1;
                    match odd.count_ones() {
                        0 => part.c0.push(subset),
                        2 => part.c2.push(subset),
                        4 if with_c4 => part.c4.push(subset),
                        _ => {}
                    }
                };
                record(subset, odd);
                // Gray-code walk over the low bits.
                for i in 1u64..1 << low {
                    let b = i.trailing_zeros() as usize;
                    subset ^= 1 << b;
                    odd ^= masks[b];
                    record(subset, odd);
                }
                part
            })
            .reduce(Partial::default, Partial::merge);

        Ok(SubgraphClassTable {
            n: g.n(),
            m,
            c0: sort_subsets(partial.c0, m),
            c2: sort_subsets(partial.c2, m),
            c4: with_c4.then(|| sort_subsets(partial.c4, m)),
            polys: partial.polys,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.m
    }

    /// The cycle space `C0`, sorted by `(|A|, subgraph order)`.
    pub fn c0(&self) -> &[EdgeSubset] {
        &self.c0
    }

    pub fn c2(&self) -> &[EdgeSubset] {
        &self.c2
    }

    pub fn c4(&self) -> Option<&[EdgeSubset]> {
        self.c4.as_deref()
    }

    /// Size-resolved counts of `C_W` for the vertex set `w`.
    pub fn counts(&self, w: &[usize]) -> Vec<u64> {
        self.polys
            .get(&vertex_mask(w))
            .cloned()
            .unwrap_or_else(|| vec![0; self.m + 1])
    }

    /// `|C_W|`.
    pub fn class_size(&self, w: &[usize]) -> u64 {
        self.counts(w).iter().sum()
    }

    fn powers(&self, x: f64) -> Vec<f64> {
        let mut p = Vec::with_capacity(self.m + 1);
        let mut acc = 1.0;
        for _ in 0..=self.m {
            p.push(acc);
            acc *= x;
        }
        p
    }

    fn eval(counts: &[u64], powers: &[f64]) -> f64 {
        counts.iter().zip(powers).map(|(&c, &p)| c as f64 * p).sum()
    }

    /// `λ_x(C_W)`.
    pub fn lambda(&self, x: f64, w: &[usize]) -> f64 {
        Self::eval(&self.counts(w), &self.powers(x))
    }

    /// `λ_x(C_k)`, summed over all `W` with `|W| = k`.
    pub fn lambda_k(&self, x: f64, k: usize) -> f64 {
        let powers = self.powers(x);
        let mut per_w: Vec<(u64, f64)> = self
            .polys
            .iter()
            .filter(|(w, _)| w.count_ones() as usize == k)
            .map(|(&w, counts)| (w, Self::eval(counts, &powers)))
            .collect();
        per_w.sort_by_key(|&(w, _)| w);
        per_w.iter().map(|&(_, l)| l).sum()
    }

    /// `λ_x(C_W)` for every populated boundary `W` with `|W| = k`.
    pub fn lambda_by_boundary(&self, x: f64, k: usize) -> Vec<(Vec<usize>, f64)> {
        let powers = self.powers(x);
        let mut out: Vec<(u64, f64)> = self
            .polys
            .iter()
            .filter(|(w, _)| w.count_ones() as usize == k)
            .map(|(&w, counts)| (w, Self::eval(counts, &powers)))
            .collect();
        out.sort_by_key(|&(w, _)| w);
        out.into_iter()
            .map(|(w, l)| ((0..self.n).filter(|&v| w >> v & 1 == 1).collect(), l))
            .collect()
    }

    /// The PS measure at `x`.
    pub fn measure(&self, x: f64) -> PsMeasure<'_> {
        let lambda_c0 = self.lambda_k(x, 0);
        let lambda_c2 = self.lambda_k(x, 2);
        PsMeasure {
            table: self,
            x,
            lambda_c0,
            lambda_c2,
            z: self.n as f64 * lambda_c0 + 2.0 * lambda_c2,
        }
    }

    /// Every member of `W`, `C0` first then `C2`, each sorted by
    /// `(|A|, subgraph order)`.
    pub fn states(&self, g: &Graph) -> Vec<WormState> {
        self.c0
            .iter()
            .chain(&self.c2)
            .map(|a| WormState::from_edges(g, a.clone()).expect("table members lie in W"))
            .collect()
    }
}

/// Shorthand for [`SubgraphClassTable::enumerate`].
pub fn enumerate_classes(
    g: &Graph,
    with_c4: bool,
    caps: Caps,
) -> Result<SubgraphClassTable, OracleError> {
    SubgraphClassTable::enumerate(g, with_c4, caps)
}

/// The Prokof'ev–Svistunov measure `π_x(A) = x^|A| ψ(A) / Z_x` on `W`, with
/// `ψ = n` on `C0`, `ψ = 2` on `C2` and `Z_x = n λ_x(C0) + 2 λ_x(C2)`.
#[derive(Debug, Clone)]
pub struct PsMeasure<'t> {
    table: &'t SubgraphClassTable,
    x: f64,
    lambda_c0: f64,
    lambda_c2: f64,
    z: f64,
}

impl PsMeasure<'_> {
    pub fn x(&self) -> f64 {
        self.x
    }

    pub fn lambda_c0(&self) -> f64 {
        self.lambda_c0
    }

    pub fn lambda_c2(&self) -> f64 {
        self.lambda_c2
    }

    /// `Z_x`.
    pub fn partition_function(&self) -> f64 {
        self.z
    }

    /// `π_x(A)` for an edge subset given with its boundary size.
    pub fn prob_with_boundary(&self, size: usize, odd: usize) -> Result<f64, OracleError> {
        let psi = match odd {
            0 => self.table.n as f64,
            2 => 2.0,
            k => return Err(OracleError::NotInW(k)),
        };
        Ok(psi * self.x.powi(size as i32) / self.z)
    }

    pub fn prob_subset(&self, g: &Graph, a: &EdgeSubset) -> Result<f64, OracleError> {
        self.prob_with_boundary(a.len(), boundary(g, a).len())
    }

    pub fn prob(&self, s: &WormState) -> f64 {
        self.prob_with_boundary(s.edges().len(), s.boundary().vertices().len())
            .expect("worm states lie in W")
    }

    /// `π_x(C0)`.
    pub fn pi_c0(&self) -> f64 {
        self.table.n as f64 * self.lambda_c0 / self.z
    }

    /// `π_x(C2)`.
    pub fn pi_c2(&self) -> f64 {
        2.0 * self.lambda_c2 / self.z
    }

    /// `π_x(C_uv)` for distinct `u, v`.
    pub fn pi_pair(&self, u: usize, v: usize) -> f64 {
        2.0 * self.table.lambda(self.x, &[u, v]) / self.z
    }
}

/// Spin-space sums with weights `exp(-β H)`, `H = -Σ σ_i σ_j`.
fn spin_sum(g: &Graph, beta: f64, mut observe: impl FnMut(u64, f64)) -> f64 {
    let n = g.n();
    let edges = g.edges();
    let mut total = 0.0;
    for down in 0u64..1 << n {
        // exp(β(E - m)) = exp(-2β · #unsatisfied edges)
        let cut = edges
            .iter()
            .filter(|&&(u, v)| (down >> u ^ down >> v) & 1 == 1)
            .count();
        let w = (-2.0 * beta * cut as f64).exp();
        total += w;
        observe(down, w);
    }
    total
}

/// `E_β[∏_{i ∈ W} σ_i]` by summing over all `2^n` spin configurations.
pub fn ising_moment_bruteforce(
    g: &Graph,
    beta: f64,
    w: &[usize],
    caps: Caps,
) -> Result<f64, OracleError> {
    caps.check_vertices(g)?;
    if let Some(&v) = w.iter().find(|&&v| v >= g.n()) {
        return Err(OracleError::BadArgument(format!(
            "vertex {} out of range",
            v + 1
        )));
    }
    let wmask = vertex_mask(w);
    let mut signed = 0.0;
    let z = spin_sum(g, beta, |down, weight| {
        if (down & wmask).count_ones().is_multiple_of(2) {
            signed += weight;
        } else {
            signed -= weight;
        }
    });
    Ok(signed / z)
}

/// `var(M) / n = E[M^2] / n` by spin enumeration.
pub fn susceptibility_bruteforce(g: &Graph, beta: f64, caps: Caps) -> Result<f64, OracleError> {
    caps.check_vertices(g)?;
    let n = g.n() as f64;
    let mut m2 = 0.0;
    let z = spin_sum(g, beta, |down, weight| {
        let mag = n - 2.0 * down.count_ones() as f64;
        m2 += weight * mag * mag;
    });
    Ok(m2 / z / n)
}

/// Both exact routes for one graph.
#[derive(Debug, Clone)]
pub struct ExactOracle<'g> {
    graph: &'g Graph,
    table: SubgraphClassTable,
    caps: Caps,
}

impl<'g> ExactOracle<'g> {
    pub fn new(graph: &'g Graph, with_c4: bool, caps: Caps) -> Result<Self, OracleError> {
        Ok(ExactOracle {
            graph,
            table: SubgraphClassTable::enumerate(graph, with_c4, caps)?,
            caps,
        })
    }

    pub fn graph(&self) -> &'g Graph {
        self.graph
    }

    pub fn table(&self) -> &SubgraphClassTable {
        &self.table
    }

    /// Subgraph route: `λ_x(C_W) / λ_x(C0)`.
    pub fn moment_high_temp(&self, x: f64, w: &[usize]) -> f64 {
        self.table.lambda(x, w) / self.table.lambda(x, &[])
    }

    /// The high-temperature identity for `W` at `β`, as a check record.
    pub fn high_temp_check(&self, beta: f64, w: &[usize]) -> Result<Check, OracleError> {
        let spin = ising_moment_bruteforce(self.graph, beta, w, self.caps)?;
        let sub = self.moment_high_temp(beta.tanh(), w);
        let label: Vec<String> = w.iter().map(|v| (v + 1).to_string()).collect();
        Ok(Check::equal(
            format!("high_temp W={{{}}} beta={beta}", label.join(",")),
            spin,
            sub,
        ))
    }

    /// `χ = 1 / π_x(C0)`, cross-checked against `var(M)/n`.
    pub fn susceptibility(&self, beta: f64) -> Result<f64, OracleError> {
        let sub = 1.0 / self.table.measure(beta.tanh()).pi_c0();
        let spin = susceptibility_bruteforce(self.graph, beta, self.caps)?;
        if !Relation::equal().holds(sub, spin) {
            return Err(OracleError::CrossCheckMismatch {
                subgraph: sub,
                spin,
            });
        }
        Ok(sub)
    }

    /// `E σ_u σ_v = (n/2) π_x(C_uv) / π_x(C0)`, cross-checked against the
    /// spin sum.
    pub fn two_point(&self, beta: f64, u: usize, v: usize) -> Result<f64, OracleError> {
        if u == v || u >= self.graph.n() || v >= self.graph.n() {
            return Err(OracleError::BadArgument(format!(
                "need distinct vertices, got {} and {}",
                u + 1,
                v + 1
            )));
        }
        let ps = self.table.measure(beta.tanh());
        let sub = self.graph.n() as f64 / 2.0 * ps.pi_pair(u, v) / ps.pi_c0();
        let spin = ising_moment_bruteforce(self.graph, beta, &[u, v], self.caps)?;
        if !Relation::equal().holds(sub, spin) {
            return Err(OracleError::CrossCheckMismatch {
                subgraph: sub,
                spin,
            });
        }
        Ok(sub)
    }

    /// Lower bounds on the PS measure and the λ-ratio bounds, as checks.
    pub fn measure_bound_checks(&self, x: f64) -> Report {
        let g = self.graph;
        let (n, m) = (g.n(), g.m());
        let ps = self.table.measure(x);
        let mut report = Report::default();

        report.push(Check::at_least(
            "pi(0) >= 2^-m",
            ps.prob_with_boundary(0, 0).unwrap(),
            0.5f64.powi(m as i32),
        ));

        let floor = 0.5 * (x / 2.0).powi(m as i32);
        let (min_pi, argmin) = self
            .table
            .c0()
            .iter()
            .map(|a| (ps.prob_with_boundary(a.len(), 0).unwrap(), a))
            .chain(
                self.table
                    .c2()
                    .iter()
                    .map(|a| (ps.prob_with_boundary(a.len(), 2).unwrap(), a)),
            )
            .min_by(|a, b| a.0.total_cmp(&b.0))
            .expect("W is nonempty");
        report.push(
            Check::at_least("min_A pi(A) >= (1/2)(x/2)^m", min_pi, floor)
                .with_witness(argmin.dump(g)),
        );

        report.push(Check::at_least("pi(C0) >= 1/n", ps.pi_c0(), 1.0 / n as f64));
        report.push(Check::equal(
            "pi(C0) + pi(C2) = 1",
            ps.pi_c0() + ps.pi_c2(),
            1.0,
        ));

        let dist = g.distance_matrix();
        for (u, row) in dist.iter().enumerate() {
            for (v, &d) in row.iter().enumerate().skip(u + 1) {
                report.push(Check::at_least(
                    format!("pi(C_{}{}) >= (2/n^2) x^d", u + 1, v + 1),
                    ps.pi_pair(u, v),
                    2.0 / (n * n) as f64 * x.powi(d as i32),
                ));
            }
        }

        let l0 = ps.lambda_c0();
        let mut worst: Option<(f64, Vec<usize>)> = None;
        for k in (2..=n).step_by(2) {
            for (w, l) in self.table.lambda_by_boundary(x, k) {
                if worst.as_ref().is_none_or(|(r, _)| l / l0 > *r) {
                    worst = Some((l / l0, w));
                }
            }
            report.push(Check::at_most(
                format!("lambda(C_{k})/lambda(C0) <= binom(n,{k})"),
                self.table.lambda_k(x, k) / l0,
                binomial(n, k) as f64,
            ));
        }
        if let Some((ratio, w)) = worst {
            let label: Vec<String> = w.iter().map(|v| (v + 1).to_string()).collect();
            report.push(
                Check::at_most("max_W lambda(C_W)/lambda(C0) <= 1", ratio, 1.0)
                    .with_witness(format!("W={{{}}}", label.join(","))),
            );
        }
        report
    }

    /// `|C0| = 2^(m-n+1)`.
    pub fn cycle_space_check(&self) -> Check {
        let g = self.graph;
        let expected = 2f64.powi((g.m() + 1 - g.n()) as i32);
        Check::new(
            "|C0| = 2^(m-n+1)",
            self.table.c0().len() as f64,
            expected,
            Relation::Equal { rel: 0.0, abs: 0.0 },
        )
    }

    /// Checks that `A ↦ A △ F` maps `C_W` bijectively onto `C0`, where
    /// `W = ∂F`.
    pub fn bijection_check(&self, w: &[usize], f: &EdgeSubset) -> Result<Check, OracleError> {
        let g = self.graph;
        let mut w_sorted = w.to_vec();
        w_sorted.sort_unstable();
        if boundary(g, f) != w_sorted {
            return Err(OracleError::BadArgument("F is not in C_W".into()));
        }
        let members = self.class_members(&w_sorted);
        let c0: HashSet<&EdgeSubset> = self.table.c0().iter().collect();
        let mut images = HashSet::new();
        for a in &members {
            let img = a.symmetric_difference(f);
            if !c0.contains(&img) {
                return Ok(bijection_failure(w, "image outside C0", a.dump(g)));
            }
            if !images.insert(img) {
                return Ok(bijection_failure(w, "map not injective", a.dump(g)));
            }
        }
        let label: Vec<String> = w.iter().map(|v| (v + 1).to_string()).collect();
        Ok(Check::new(
            format!("|alpha(C_W)| = |C0| for W={{{}}}", label.join(",")),
            images.len() as f64,
            c0.len() as f64,
            Relation::Equal { rel: 0.0, abs: 0.0 },
        ))
    }

    /// Members of `C_W` in `(|A|, subgraph order)`.
    pub fn class_members(&self, w: &[usize]) -> Vec<EdgeSubset> {
        let m = self.graph.m();
        match w.len() {
            0 => self.table.c0().to_vec(),
            2 => self
                .table
                .c2()
                .iter()
                .filter(|a| boundary(self.graph, a) == w)
                .cloned()
                .collect(),
            _ => {
                let target = vertex_mask(w);
                let masks = edge_masks(self.graph);
                let mut out: Vec<u64> = (0u64..1 << m)
                    .filter(|&a| {
                        (0..m)
                            .filter(|&b| a >> b & 1 == 1)
                            .fold(0u64, |acc, b| acc ^ masks[b])
                            == target
                    })
                    .collect();
                out.sort_unstable();
                sort_subsets(out, m)
            }
        }
    }
}

fn bijection_failure(w: &[usize], what: &str, witness: String) -> Check {
    let label: Vec<String> = w.iter().map(|v| (v + 1).to_string()).collect();
    let mut c = Check::new(
        format!("alpha bijection W={{{}}}: {what}", label.join(",")),
        0.0,
        1.0,
        Relation::Equal { rel: 0.0, abs: 0.0 },
    );
    c.witness = Some(witness);
    c
}

pub(crate) fn binomial(n: usize, k: usize) -> u64 {
    if k > n {
        return 0;
    }
    (0..k).fold(1u64, |acc, i| acc * (n - i) as u64 / (i + 1) as u64)
}

/// Asserts the high-temperature identity for `W` at `β`.
pub fn verify_high_temp(
    g: &Graph,
    beta: f64,
    w: &[usize],
    caps: Caps,
) -> Result<Check, OracleError> {
    let check = ExactOracle::new(g, false, caps)?.high_temp_check(beta, w)?;
    if check.pass {
        Ok(check)
    } else {
        Err(OracleError::Mismatch(Box::new(check)))
    }
}

/// `χ_β` for `g` (subgraph route, spin cross-checked).
pub fn susceptibility_exact(g: &Graph, beta: f64, caps: Caps) -> Result<f64, OracleError> {
    ExactOracle::new(g, false, caps)?.susceptibility(beta)
}

/// `E_β σ_u σ_v` (subgraph route, spin cross-checked).
pub fn two_point_exact(
    g: &Graph,
    beta: f64,
    u: usize,
    v: usize,
    caps: Caps,
) -> Result<f64, OracleError> {
    ExactOracle::new(g, false, caps)?.two_point(beta, u, v)
}

/// Asserts every PS-measure lower bound and λ-ratio bound at `x`.
pub fn verify_measure_bounds(g: &Graph, x: f64, caps: Caps) -> Result<Report, OracleError> {
    let report = ExactOracle::new(g, false, caps)?.measure_bound_checks(x);
    match report.first_failure() {
        Some(c) => Err(OracleError::BoundViolation(Box::new(c.clone()))),
        None => Ok(report),
    }
}

/// Asserts `A ↦ A △ F` is a bijection `C_W → C0`.
pub fn verify_bijection(
    g: &Graph,
    w: &[usize],
    f: &EdgeSubset,
    caps: Caps,
) -> Result<Check, OracleError> {
    let check = ExactOracle::new(g, false, caps)?.bijection_check(w, f)?;
    if check.pass {
        Ok(check)
    } else {
        Err(OracleError::BijectionViolation(format!("{check:?}")))
    }
}

/// The full identity suite run by the `verify` subcommand: cycle-space
/// cardinality, the high-temperature identity for every pair and every
/// 4-subset, both susceptibility and two-point cross-checks, the measure
/// bounds, and the `α` bijection for every pair via a shortest path.
pub fn verify_suite(g: &Graph, beta: f64, caps: Caps) -> Result<Report, OracleError> {
    let oracle = ExactOracle::new(g, false, caps)?;
    let n = g.n();
    let x = beta.tanh();
    let mut report = Report::default();
    report.push(oracle.cycle_space_check());
    report.push(oracle.high_temp_check(beta, &[])?);
    for u in 0..n {
        for v in u + 1..n {
            report.push(oracle.high_temp_check(beta, &[u, v])?);
        }
    }
    for w in four_subsets(n) {
        report.push(oracle.high_temp_check(beta, &w)?);
    }
    let chi_sub = 1.0 / oracle.table().measure(x).pi_c0();
    let chi_spin = susceptibility_bruteforce(g, beta, caps)?;
    report.push(Check::equal("chi: 1/pi(C0) = var(M)/n", chi_sub, chi_spin));
    let ps = oracle.table().measure(x);
    for u in 0..n {
        for v in u + 1..n {
            let sub = n as f64 / 2.0 * ps.pi_pair(u, v) / ps.pi_c0();
            let spin = ising_moment_bruteforce(g, beta, &[u, v], caps)?;
            report.push(Check::equal(
                format!(
                    "two_point({},{}): (n/2) pi(C_uv)/pi(C0) = E s_u s_v",
                    u + 1,
                    v + 1
                ),
                sub,
                spin,
            ));
            let f = crate::paths::shortest_path_edges(g, u, v);
            report.push(oracle.bijection_check(&[u, v], &f)?);
        }
    }
    report.extend(oracle.measure_bound_checks(x));
    Ok(report)
}

fn four_subsets(n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    for a in 0..n {
        for b in a + 1..n {
            for c in b + 1..n {
                for d in c + 1..n {
                    out.push(vec![a, b, c, d]);
                }
            }
        }
    }
    out
}
