//! Sample-complexity plans and worm estimators for the susceptibility and
//! two-point correlations, with median-of-replicas amplification.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::chain::{ChainParams, WormChain};
use crate::graph::Graph;
use crate::state::{Class, WormState};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EstimatorError {
    #[error("tolerance {name} = {value} must lie in (0, 1)")]
    BadTolerance { name: &'static str, value: f64 },
    #[error("distance cap k must be at least 1")]
    BadDistanceCap,
    #[error("no visits to {0} in the sampling window; the sample count is far too small")]
    ZeroSampleFraction(&'static str),
    #[error("d({u},{v}) = {distance} exceeds k = {k}")]
    DistanceExceedsK {
        u: usize,
        v: usize,
        distance: usize,
        k: usize,
    },
    #[error("bad vertex pair: {0}")]
    BadPair(String),
}

/// Number of batches used for batch-means standard errors.
pub const BATCHES: u64 = 32;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Provenance {
    Analytic,
    Manual,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EstimatorPlan {
    pub epsilon: f64,
    pub delta: f64,
    pub tau: u64,
    pub samples: u64,
    pub k: Option<usize>,
    pub tau_provenance: Provenance,
    pub samples_provenance: Provenance,
}

impl EstimatorPlan {
    /// Replaces `τ` and/or `N`, flagging each replaced value as manual.
    pub fn with_overrides(mut self, tau: Option<u64>, samples: Option<u64>) -> Self {
        if let Some(t) = tau {
            self.tau = t;
            self.tau_provenance = Provenance::Manual;
        }
        if let Some(s) = samples {
            self.samples = s.max(1);
            self.samples_provenance = Provenance::Manual;
        }
        self
    }

    /// A fully manual plan.
    pub fn manual(epsilon: f64, delta: f64, tau: u64, samples: u64) -> Self {
        EstimatorPlan {
            epsilon,
            delta,
            tau,
            samples: samples.max(1),
            k: None,
            tau_provenance: Provenance::Manual,
            samples_provenance: Provenance::Manual,
        }
    }

    pub fn is_analytic(&self) -> bool {
        self.tau_provenance == Provenance::Analytic
            && self.samples_provenance == Provenance::Analytic
    }
}

fn check_tolerance(name: &'static str, value: f64) -> Result<(), EstimatorError> {
    if value > 0.0 && value < 1.0 {
        Ok(())
    } else {
        Err(EstimatorError::BadTolerance { name, value })
    }
}

/// `ceil` that treats values within a relative `1e-12` of an integer as that
/// integer, so exact products are not bumped up by rounding noise.
fn ceil_count(value: f64) -> u64 {
    let r = value.round();
    if (value - r).abs() <= 1e-12 * value.abs().max(1.0) {
        r as u64
    } else {
        value.ceil() as u64
    }
}

fn sizes(g: &Graph) -> (f64, f64, f64) {
    (g.n() as f64, g.m() as f64, g.max_degree() as f64)
}

/// Burn-in `τ = ⌈4 (log 2 + log(2/δ)/m) Δ m² n⁴⌉`.
pub fn burn_in(g: &Graph, delta: f64) -> u64 {
    let (n, m, d) = sizes(g);
    ceil_count(4.0 * (2f64.ln() + (2.0 / delta).ln() / m) * d * m * m * n.powi(4))
}

/// Plan for `χ`: `N = ⌈16 ε⁻² (1+ε)² δ⁻¹ Δ m n⁵⌉`.
pub fn plan_susceptibility(
    g: &Graph,
    epsilon: f64,
    delta: f64,
) -> Result<EstimatorPlan, EstimatorError> {
    check_tolerance("epsilon", epsilon)?;
    check_tolerance("delta", delta)?;
    let (n, m, d) = sizes(g);
    let samples = ceil_count(
        16.0 / (epsilon * epsilon) * (1.0 + epsilon).powi(2) / delta * d * m * n.powi(5),
    );
    Ok(EstimatorPlan {
        epsilon,
        delta,
        tau: burn_in(g, delta),
        samples,
        k: None,
        tau_provenance: Provenance::Analytic,
        samples_provenance: Provenance::Analytic,
    })
}

/// Plan for `k`-restricted correlations:
/// `N = ⌈16 ε⁻² (2+ε)² δ⁻¹ Δ m n⁶ x⁻ᵏ⌉`, burn-in at `δ/2`.
pub fn plan_correlation(
    g: &Graph,
    epsilon: f64,
    delta: f64,
    k: usize,
    x: f64,
) -> Result<EstimatorPlan, EstimatorError> {
    check_tolerance("epsilon", epsilon)?;
    check_tolerance("delta", delta)?;
    check_tolerance("x", x)?;
    if k == 0 {
        return Err(EstimatorError::BadDistanceCap);
    }
    let (n, m, d) = sizes(g);
    let samples = ceil_count(
        16.0 / (epsilon * epsilon) * (2.0 + epsilon).powi(2) / delta
            * d
            * m
            * n.powi(6)
            * x.powi(-(k as i32)),
    );
    Ok(EstimatorPlan {
        epsilon,
        delta,
        tau: burn_in(g, delta / 2.0),
        samples,
        k: Some(k),
        tau_provenance: Provenance::Analytic,
        samples_provenance: Provenance::Analytic,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Estimate {
    pub value: f64,
    /// Batch-means standard error (32 batches); `None` when `N < 32`.
    pub std_error: Option<f64>,
    pub plan: EstimatorPlan,
    /// Fraction of sampled states in `C0`.
    pub s0: f64,
    /// Fraction of sampled states in `C_uv`, for correlations.
    pub suv: Option<f64>,
    pub c0_visits: u64,
    pub cuv_visits: Option<u64>,
    /// Chain steps consumed (`τ + N`).
    pub steps: u64,
}

struct Counts {
    c0: Vec<u64>,
    cuv: Vec<u64>,
    batch_len: Vec<u64>,
}

/// Runs `τ` burn-in steps from `0`, then `N` recorded steps, counting visits
/// to `C0` and (optionally) to `C_uv` per batch.
fn sample_counts(
    chain: &WormChain<'_>,
    plan: &EstimatorPlan,
    pair: Option<(usize, usize)>,
    rng: &mut ChaCha8Rng,
) -> Counts {
    let g = chain.graph();
    let mut s = WormState::zero(g);
    for _ in 0..plan.tau {
        chain.step(&mut s, rng);
    }
    let n = plan.samples;
    let batches = BATCHES.min(n);
    let mut counts = Counts {
        c0: vec![0; batches as usize],
        cuv: vec![0; batches as usize],
        batch_len: vec![0; batches as usize],
    };
    let target = pair.map(|(u, v)| (u.min(v), u.max(v)));
    for b in 0..batches {
        let len = (b + 1) * n / batches - b * n / batches;
        let (mut c0, mut cuv) = (0u64, 0u64);
        for _ in 0..len {
            chain.step(&mut s, rng);
            match s.class() {
                Class::C0 => c0 += 1,
                Class::C2 => {
                    if let Some((u, v)) = target {
                        if s.boundary().vertices() == [u, v] {
                            cuv += 1;
                        }
                    }
                }
            }
        }
        counts.c0[b as usize] = c0;
        counts.cuv[b as usize] = cuv;
        counts.batch_len[b as usize] = len;
    }
    counts
}

fn batch_std_error(values: &[f64]) -> Option<f64> {
    if values.len() < BATCHES as usize || values.iter().any(|v| !v.is_finite()) {
        return None;
    }
    let k = values.len() as f64;
    let mean = values.iter().sum::<f64>() / k;
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (k - 1.0);
    Some((var / k).sqrt())
}

/// `1 / Ŝ0` from a cold start at `0`.
pub fn estimate_susceptibility(
    g: &Graph,
    params: ChainParams,
    plan: &EstimatorPlan,
    rng: &mut ChaCha8Rng,
) -> Result<Estimate, EstimatorError> {
    let chain = WormChain::new(g, params);
    let counts = sample_counts(&chain, plan, None, rng);
    let c0: u64 = counts.c0.iter().sum();
    if c0 == 0 {
        return Err(EstimatorError::ZeroSampleFraction("C0"));
    }
    let s0 = c0 as f64 / plan.samples as f64;
    let batch_values: Vec<f64> = counts
        .c0
        .iter()
        .zip(&counts.batch_len)
        .map(|(&c, &len)| len as f64 / c as f64)
        .collect();
    Ok(Estimate {
        value: 1.0 / s0,
        std_error: batch_std_error(&batch_values),
        plan: *plan,
        s0,
        suv: None,
        c0_visits: c0,
        cuv_visits: None,
        steps: plan.tau + plan.samples,
    })
}

/// `(n/2) Ŝuv / Ŝ0`, both fractions from the same trajectory.
pub fn estimate_correlation(
    g: &Graph,
    params: ChainParams,
    u: usize,
    v: usize,
    plan: &EstimatorPlan,
    rng: &mut ChaCha8Rng,
) -> Result<Estimate, EstimatorError> {
    if u == v || u >= g.n() || v >= g.n() {
        return Err(EstimatorError::BadPair(format!("({}, {})", u + 1, v + 1)));
    }
    if let Some(k) = plan.k {
        let distance = g.distance(u, v).expect("vertices checked");
        if distance > k {
            return Err(EstimatorError::DistanceExceedsK {
                u: u + 1,
                v: v + 1,
                distance,
                k,
            });
        }
    }
    let chain = WormChain::new(g, params);
    let counts = sample_counts(&chain, plan, Some((u, v)), rng);
    let c0: u64 = counts.c0.iter().sum();
    let cuv: u64 = counts.cuv.iter().sum();
    if c0 == 0 {
        return Err(EstimatorError::ZeroSampleFraction("C0"));
    }
    if cuv == 0 {
        return Err(EstimatorError::ZeroSampleFraction("C_uv"));
    }
    let half_n = g.n() as f64 / 2.0;
    let s0 = c0 as f64 / plan.samples as f64;
    let suv = cuv as f64 / plan.samples as f64;
    let batch_values: Vec<f64> = counts
        .c0
        .iter()
        .zip(&counts.cuv)
        .map(|(&a, &b)| half_n * b as f64 / a as f64)
        .collect();
    Ok(Estimate {
        value: half_n * suv / s0,
        std_error: batch_std_error(&batch_values),
        plan: *plan,
        s0,
        suv: Some(suv),
        c0_visits: c0,
        cuv_visits: Some(cuv),
        steps: plan.tau + plan.samples,
    })
}

/// Quantity to estimate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Target {
    Chi,
    Corr { u: usize, v: usize },
}

/// Replica count `6 ⌈log₂(1/η)⌉ + 1` for the median trick.
pub fn replica_count(eta: f64) -> Result<usize, EstimatorError> {
    check_tolerance("eta", eta)?;
    let lg = (1.0 / eta).log2();
    // Exact powers of two must not round up.
    let r = lg.round();
    let lg = if (lg - r).abs() < 1e-12 { r } else { lg.ceil() };
    Ok(6 * lg as usize + 1)
}

/// Generator for replica `index` under `master_seed`: a ChaCha8 stream keyed
/// by the master seed, with stream number `index + 1`. Stream 0 is the
/// single-run stream.
pub fn replica_rng(master_seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
    rng.set_stream(index + 1);
    rng
}

/// Generator for a single (non-replicated) run.
pub fn single_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MedianEstimate {
    pub value: f64,
    /// Target failure probability, when the replica count came from it.
    pub eta: Option<f64>,
    pub replicas: Vec<Estimate>,
    pub master_seed: u64,
}

/// Middle element of the sorted values (upper middle for even counts).
pub fn median(values: &[f64]) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    v[v.len() / 2]
}

/// Per-replica plan for the median trick: `δ = 1/4`, and for correlations
/// `k = d(u, v)` unless given.
pub fn replica_plan(
    g: &Graph,
    params: ChainParams,
    target: Target,
    epsilon: f64,
    k: Option<usize>,
) -> Result<EstimatorPlan, EstimatorError> {
    match target {
        Target::Chi => plan_susceptibility(g, epsilon, 0.25),
        Target::Corr { u, v } => {
            let k = match k {
                Some(k) => k,
                None => g
                    .distance(u, v)
                    .map_err(|e| EstimatorError::BadPair(e.to_string()))?,
            };
            plan_correlation(g, epsilon, 0.25, k, params.x())
        }
    }
}

/// Median of `count` independent replicas run with `plan`; replica `i`
/// draws from [`replica_rng`]`(master_seed, i)`.
pub fn median_of_replicas(
    g: &Graph,
    params: ChainParams,
    target: Target,
    plan: &EstimatorPlan,
    count: usize,
    master_seed: u64,
) -> Result<MedianEstimate, EstimatorError> {
    let replicas: Vec<Estimate> = (0..count.max(1) as u64)
        .into_par_iter()
        .map(|i| {
            let mut rng = replica_rng(master_seed, i);
            match target {
                Target::Chi => estimate_susceptibility(g, params, plan, &mut rng),
                Target::Corr { u, v } => estimate_correlation(g, params, u, v, plan, &mut rng),
            }
        })
        .collect::<Result<_, _>>()?;
    let values: Vec<f64> = replicas.iter().map(|e| e.value).collect();
    Ok(MedianEstimate {
        value: median(&values),
        eta: None,
        replicas,
        master_seed,
    })
}

/// Median of `6⌈log₂(1/η)⌉ + 1` independent replicas, each planned at
/// `δ = 1/4` (overrides apply to every replica).
#[allow(clippy::too_many_arguments)]
pub fn median_amplify(
    g: &Graph,
    params: ChainParams,
    target: Target,
    epsilon: f64,
    eta: f64,
    k: Option<usize>,
    overrides: (Option<u64>, Option<u64>),
    master_seed: u64,
) -> Result<MedianEstimate, EstimatorError> {
    let count = replica_count(eta)?;
    let plan =
        replica_plan(g, params, target, epsilon, k)?.with_overrides(overrides.0, overrides.1);
    let mut out = median_of_replicas(g, params, target, &plan, count, master_seed)?;
    out.eta = Some(eta);
    Ok(out)
}
