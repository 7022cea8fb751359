//! Successive-conditional simulation: alternating y | θ with one Gibbs sweep
//! θ | y leaves the prior invariant, so long-run moments of θ must match it.

use ideal_core::data::{LegislatorMeta, MotionMeta};
use ideal_core::identify::ResolvedAnchors;
use ideal_core::model::default_hyperparameters;
use ideal_core::normal;
use ideal_core::sampler::{chain_rng, update_ideal_points, update_item_parameters, update_latents};
use ideal_core::{ModelParameters, RollCallMatrix, Vote};
use rand::Rng;
use rand_distr::StandardNormal;

/// Mean and batch-means standard error.
fn batch_mean(series: &[f64], batches: usize) -> (f64, f64) {
    let len = series.len() / batches;
    let means: Vec<f64> = series
        .chunks_exact(len)
        .map(|c| c.iter().sum::<f64>() / len as f64)
        .collect();
    let k = means.len() as f64;
    let mean = means.iter().sum::<f64>() / k;
    let var = means.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (k - 1.0);
    (mean, (var / k).sqrt())
}

#[test]
fn joint_simulation_recovers_prior_moments() {
    let (n, m, sweeps) = (12, 8, 60_000);
    let mut rng = chain_rng(31, 0);
    let hyper = default_hyperparameters(n, 1, 1.0).unwrap();
    let anchors = ResolvedAnchors::from_positions(vec![None; n]);
    let legislators: Vec<_> = (0..n).map(|i| LegislatorMeta::new(format!("L{i}"))).collect();
    let motions: Vec<_> = (0..m).map(|j| MotionMeta::new(format!("M{j}"))).collect();
    let mut draw = |k: usize| -> Vec<f64> { (0..k).map(|_| rng.sample(StandardNormal)).collect() };
    let (mut mu, mut alpha, mut beta) = (draw(m), draw(m), draw(n));
    let mut rng = chain_rng(31, 1);

    let mut stats: [Vec<f64>; 4] = Default::default();
    for _ in 0..sweeps {
        let rows: Vec<Vec<Vote>> = (0..n)
            .map(|i| {
                (0..m)
                    .map(|j| {
                        if rng.random::<f64>() < normal::cdf(mu[j] + alpha[j] * beta[i]) {
                            Vote::Yea
                        } else {
                            Vote::Nay
                        }
                    })
                    .collect()
            })
            .collect();
        let matrix = RollCallMatrix::from_rows(legislators.clone(), motions.clone(), rows).unwrap();
        let params = ModelParameters::new(1, mu.clone(), alpha.clone(), beta.clone()).unwrap();
        let z = update_latents(&matrix, &params, &mut rng).unwrap();
        (mu, alpha) = update_item_parameters(&z, &beta, &hyper, &mut rng).unwrap();
        beta = update_ideal_points(&z, &mu, &alpha, &hyper, &anchors, &mut rng).unwrap();

        let sq = |v: &[f64]| v.iter().map(|x| x * x).sum::<f64>() / v.len() as f64;
        stats[0].push(sq(&mu));
        stats[1].push(sq(&alpha));
        stats[2].push(sq(&beta));
        stats[3].push(mu.iter().sum::<f64>() / m as f64);
    }
    let targets = [("E[mu^2]", 1.0), ("E[alpha^2]", 1.0), ("E[beta^2]", 1.0), ("E[mu]", 0.0)];
    for ((name, want), series) in targets.iter().zip(&stats) {
        let (mean, se) = batch_mean(series, 30);
        assert!((mean - want).abs() < 4.0 * se + 1e-3, "{name}: {mean:.4} ± {se:.4}, want {want}");
    }
}
