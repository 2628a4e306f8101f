use rayon::prelude::*;
use statrs::distribution::{Binomial, DiscreteCDF};
use worm_core::estimators::{
    estimate_susceptibility, plan_correlation, plan_susceptibility, replica_rng, single_rng,
    EstimatorPlan,
};
use worm_core::exact::{susceptibility_exact, Caps, SubgraphClassTable};
use worm_core::graph::{complete, cycle, grid, path, Graph};
use worm_core::spectral::{tv_mixing_time, ChainMatrix, SpectralCaps};
use worm_core::{ChainParams, Class, WormChain, WormState};

fn batch_mean_and_error(batches: &[f64]) -> (f64, f64) {
    let k = batches.len() as f64;
    let mean = batches.iter().sum::<f64>() / k;
    let var = batches.iter().map(|b| (b - mean).powi(2)).sum::<f64>() / (k - 1.0);
    (mean, (var / k).sqrt())
}

#[test]
fn long_run_fractions_match_exact_probabilities() {
    let graphs = [
        complete(2).unwrap(),
        complete(3).unwrap(),
        complete(4).unwrap(),
        path(5).unwrap(),
        cycle(6).unwrap(),
        grid(2, 3).unwrap(),
    ];
    for (seed, g) in graphs.iter().enumerate() {
        let x = 0.6;
        let table = SubgraphClassTable::enumerate(g, false, Caps::default()).unwrap();
        let ps = table.measure(x);
        let (u, v) = (0, g.n() - 1);
        let chain = WormChain::new(g, ChainParams::from_x(x).unwrap());
        // Independent chains serve as the batches.
        let len = 62_500;
        let (c0, cuv): (Vec<f64>, Vec<f64>) = (0..32u64)
            .into_par_iter()
            .map(|b| {
                let mut rng = replica_rng(seed as u64, b);
                let mut s = chain.run(WormState::zero(g), 10_000, &mut rng, |_, _| {});
                let (mut a, mut c) = (0u64, 0u64);
                for _ in 0..len {
                    chain.step(&mut s, &mut rng);
                    match s.class() {
                        Class::C0 => a += 1,
                        Class::C2 if s.boundary().vertices() == [u, v] => c += 1,
                        Class::C2 => {}
                    }
                }
                (a as f64 / len as f64, c as f64 / len as f64)
            })
            .unzip();
        for (name, samples, exact) in [("C0", &c0, ps.pi_c0()), ("Cuv", &cuv, ps.pi_pair(u, v))] {
            let (mean, se) = batch_mean_and_error(samples);
            assert!(
                (mean - exact).abs() <= 3.0 * se,
                "{g} {name}: {mean} vs {exact} (se {se})"
            );
        }
    }
}

fn small_graphs() -> Vec<Graph> {
    vec![
        complete(2).unwrap(),
        complete(3).unwrap(),
        complete(4).unwrap(),
        cycle(5).unwrap(),
        path(4).unwrap(),
        grid(2, 3).unwrap(),
    ]
}

#[test]
fn planned_burn_in_exceeds_exact_mixing_time() {
    for g in small_graphs() {
        for x in [0.1, 0.5, 0.9] {
            let params = ChainParams::from_x(x).unwrap();
            let cm = ChainMatrix::build(&g, params, SpectralCaps::default()).unwrap();
            for delta in [0.5, 0.1, 0.01] {
                let chi = plan_susceptibility(&g, 0.5, delta).unwrap();
                let mix = tv_mixing_time(&cm, 0, delta / 2.0, 10_000_000).unwrap();
                assert!(chi.tau as usize >= mix, "{g} x={x} delta={delta}");
                let corr = plan_correlation(&g, 0.5, delta, 1, x).unwrap();
                let mix = tv_mixing_time(&cm, 0, delta / 4.0, 10_000_000).unwrap();
                assert!(corr.tau as usize >= mix, "{g} x={x} delta={delta}");
            }
        }
    }
}

#[test]
fn planned_samples_exceed_bound_with_true_probabilities() {
    for g in small_graphs() {
        let (n, m, d) = (g.n() as f64, g.m() as f64, g.max_degree() as f64);
        let table = SubgraphClassTable::enumerate(&g, false, Caps::default()).unwrap();
        let dist = g.distance_matrix();
        for x in [0.1, 0.5, 0.9] {
            let ps = table.measure(x);
            for (eps, delta) in [(0.5, 0.5), (0.1, 0.25), (0.01, 0.01)] {
                let plan = plan_susceptibility(&g, eps, delta).unwrap();
                let e = eps / (1.0 + eps);
                let needed = 16.0 / (e * e) / delta * d * m * n.powi(4) / ps.pi_c0();
                assert!(plan.samples as f64 >= needed.ceil());

                for k in 1..g.n() {
                    let plan = plan_correlation(&g, eps, delta, k, x).unwrap();
                    let e = eps / (2.0 + eps);
                    for (u, row) in dist.iter().enumerate() {
                        for (v, &duv) in row.iter().enumerate().skip(u + 1) {
                            if duv > k {
                                continue;
                            }
                            let p = ps.pi_pair(u, v).min(ps.pi_c0());
                            let needed = 16.0 / (e * e) / (delta / 2.0) * d * m * n.powi(4) / p;
                            assert!(plan.samples as f64 >= needed.ceil(), "{g} k={k}");
                        }
                    }
                }
            }
        }
    }
}

/// Whether `failures` out of `runs` is consistent with a failure rate of at
/// most `rate` at 99% confidence.
fn binomial_consistent(failures: u64, runs: u64, rate: f64) -> bool {
    if failures == 0 {
        return true;
    }
    let b = Binomial::new(rate, runs).unwrap();
    1.0 - b.cdf(failures - 1) >= 0.01
}

#[test]
fn coverage_with_calibrated_plans() {
    let params = ChainParams::from_beta(0.5).unwrap();
    let (eps, delta) = (0.05, 0.05);
    for (seed, g) in [complete(2).unwrap(), cycle(3).unwrap()].iter().enumerate() {
        let chi = susceptibility_exact(g, params.beta(), Caps::default()).unwrap();
        // Size N so the standard error is about ε χ / 3.
        let pilot = EstimatorPlan::manual(eps, delta, 1_000, 100_000);
        let se = estimate_susceptibility(g, params, &pilot, &mut single_rng(99))
            .unwrap()
            .std_error
            .unwrap();
        let scale = (se / (eps * chi / 3.0)).powi(2);
        let plan = EstimatorPlan::manual(eps, delta, 1_000, (100_000.0 * scale).ceil() as u64);
        let failures = (0..200u64)
            .into_par_iter()
            .filter(|&i| {
                let mut rng = replica_rng(17 + seed as u64, i);
                let est = estimate_susceptibility(g, params, &plan, &mut rng).unwrap();
                (est.value - chi).abs() > eps * chi
            })
            .count() as u64;
        assert!(
            binomial_consistent(failures, 200, delta),
            "{g}: {failures} failures"
        );
    }
}
