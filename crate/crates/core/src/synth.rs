//! Simulation of roll-call data from the model itself.
//!
//! Ideal points are drawn from their standard-normal prior, discrimination
//! and approval parameters from scaled normals, and each vote from
//! `Bernoulli(Φ(η_ij))`. Columns that come out empty or unanimous (and rows
//! with no observed vote) are redrawn a bounded number of times so that the
//! result is usable by the sampler without further filtering.

use std::collections::HashMap;
use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::Path;

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::data::{LegislatorMeta, MotionMeta, RollCallMatrix, Vote};
use crate::error::{Error, Result};
use crate::identify::{Anchor, AnchorSpec};
use crate::model::ModelParameters;
use crate::normal;

const VOTE_RETRIES: usize = 20;
const PARAMETER_RETRIES: usize = 50;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SynthSpec {
    pub n: usize,
    pub m: usize,
    pub d: usize,
    pub alpha_scale: f64,
    pub mu_scale: f64,
    pub missing_rate: f64,
    pub zero_alpha_fraction: f64,
    pub seed: u64,
}

impl Default for SynthSpec {
    fn default() -> Self {
        SynthSpec {
            n: 100,
            m: 300,
            d: 1,
            alpha_scale: 1.0,
            mu_scale: 0.5,
            missing_rate: 0.0,
            zero_alpha_fraction: 0.0,
            seed: 1,
        }
    }
}

impl SynthSpec {
    pub fn validate(&self) -> Result<()> {
        if self.n < 2 || self.m < 1 || self.d < 1 {
            return Err(Error::validation(format!(
                "simulation needs n ≥ 2, m ≥ 1, d ≥ 1 (got n={}, m={}, d={})",
                self.n, self.m, self.d
            )));
        }
        if !(self.alpha_scale > 0.0 && self.mu_scale > 0.0) {
            return Err(Error::validation("alpha_scale and mu_scale must be positive"));
        }
        if !(0.0..1.0).contains(&self.missing_rate) {
            return Err(Error::validation("missing_rate must lie in [0, 1)"));
        }
        if !(0.0..=1.0).contains(&self.zero_alpha_fraction) {
            return Err(Error::validation("zero_alpha_fraction must lie in [0, 1]"));
        }
        Ok(())
    }
}

/// Simulated data together with the parameters that generated it.
#[derive(Debug, Clone)]
pub struct SyntheticData {
    pub matrix: RollCallMatrix,
    pub truth: ModelParameters,
    /// True δ_j for party simulations.
    pub delta: Option<Vec<f64>>,
    /// Motions whose α was forced to zero.
    pub zero_alpha: Vec<bool>,
    /// Columns or rows that had to be redrawn.
    pub regenerated: usize,
}

/// Draws votes cell-wise for the given linear predictor.
pub fn draw_votes<R: Rng + ?Sized>(
    n: usize,
    m: usize,
    eta: impl Fn(usize, usize) -> f64,
    missing_rate: f64,
    rng: &mut R,
) -> Vec<Vote> {
    let mut votes = Vec::with_capacity(n * m);
    for i in 0..n {
        for j in 0..m {
            votes.push(draw_cell(eta(i, j), missing_rate, rng));
        }
    }
    votes
}

fn draw_cell<R: Rng + ?Sized>(eta: f64, missing_rate: f64, rng: &mut R) -> Vote {
    if missing_rate > 0.0 && rng.random::<f64>() < missing_rate {
        return Vote::Missing;
    }
    if rng.random::<f64>() < normal::cdf(eta) {
        Vote::Yea
    } else {
        Vote::Nay
    }
}

pub fn simulate(spec: &SynthSpec) -> Result<SyntheticData> {
    generate(spec, None)
}

/// Simulates the party-incentive model `η_ij = μ_j + α_j β_i + δ_j D_i`.
pub fn simulate_party(spec: &SynthSpec, group: &[u8], delta: &[f64]) -> Result<SyntheticData> {
    if spec.d != 1 {
        return Err(Error::Unsupported("party simulation is one-dimensional".into()));
    }
    if group.len() != spec.n || delta.len() != spec.m {
        return Err(Error::validation("group must have n entries and delta m entries"));
    }
    if group.iter().any(|&g| g > 1) {
        return Err(Error::validation("group indicator must be 0 or 1"));
    }
    generate(spec, Some((group, delta)))
}

fn generate(spec: &SynthSpec, party: Option<(&[u8], &[f64])>) -> Result<SyntheticData> {
    spec.validate()?;
    let SynthSpec { n, m, d, .. } = *spec;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);

    let beta: Vec<f64> = (0..n * d).map(|_| rng.sample(StandardNormal)).collect();
    let zero_count = (spec.zero_alpha_fraction * m as f64).round() as usize;
    let mut zero_alpha = vec![false; m];
    for j in sample(&mut rng, m, zero_count) {
        zero_alpha[j] = true;
    }
    let mut alpha = vec![0.0; m * d];
    let mut mu = vec![0.0; m];
    for j in 0..m {
        draw_item(spec, zero_alpha[j], &mut rng, &mut mu[j], &mut alpha[j * d..(j + 1) * d]);
    }

    let eta = |mu: &[f64], alpha: &[f64], i: usize, j: usize| -> f64 {
        let mut e = mu[j]
            + alpha[j * d..(j + 1) * d]
                .iter()
                .zip(&beta[i * d..(i + 1) * d])
                .map(|(a, b)| a * b)
                .sum::<f64>();
        if let Some((g, dl)) = party {
            e += dl[j] * f64::from(g[i]);
        }
        e
    };
    let mut votes = draw_votes(n, m, |i, j| eta(&mu, &alpha, i, j), spec.missing_rate, &mut rng);

    let mut regenerated = 0;
    for j in 0..m {
        let mut attempts = 0;
        while !column_informative(&votes, n, m, j) {
            attempts += 1;
            if attempts > VOTE_RETRIES + PARAMETER_RETRIES {
                return Err(Error::DegenerateData(format!(
                    "motion {} stays unanimous after {attempts} redraws",
                    j + 1
                )));
            }
            if attempts > VOTE_RETRIES {
                draw_item(spec, zero_alpha[j], &mut rng, &mut mu[j], &mut alpha[j * d..(j + 1) * d]);
            }
            for i in 0..n {
                votes[i * m + j] = draw_cell(eta(&mu, &alpha, i, j), spec.missing_rate, &mut rng);
            }
            regenerated += 1;
        }
    }
    for i in 0..n {
        let mut attempts = 0;
        while votes[i * m..(i + 1) * m].iter().all(|v| !v.is_observed()) {
            attempts += 1;
            if attempts > VOTE_RETRIES {
                return Err(Error::DegenerateData(format!("legislator {} never votes", i + 1)));
            }
            // Reveal a single cell; this keeps the redrawn columns informative.
            let j = rng.random_range(0..m);
            votes[i * m + j] = draw_cell(eta(&mu, &alpha, i, j), 0.0, &mut rng);
            regenerated += 1;
        }
    }
    if regenerated > 0 {
        log::info!("simulation redrew {regenerated} degenerate row(s)/column(s)");
    }

    let width = (n.max(m) as f64).log10().floor() as usize + 1;
    let legislators = (0..n)
        .map(|i| {
            let mut meta = LegislatorMeta::new(format!("L{:0width$}", i + 1));
            if let Some((g, _)) = party {
                meta.group = Some(g[i].to_string());
            }
            meta
        })
        .collect();
    let motions = (0..m).map(|j| MotionMeta::new(format!("M{:0width$}", j + 1))).collect();
    let matrix = RollCallMatrix::new(legislators, motions, votes)?;
    Ok(SyntheticData {
        matrix,
        truth: ModelParameters::new(d, mu, alpha, beta)?,
        delta: party.map(|(_, dl)| dl.to_vec()),
        zero_alpha,
        regenerated,
    })
}

fn draw_item<R: Rng + ?Sized>(spec: &SynthSpec, zero: bool, rng: &mut R, mu: &mut f64, alpha: &mut [f64]) {
    for a in alpha.iter_mut() {
        let z: f64 = rng.sample(StandardNormal);
        *a = if zero { 0.0 } else { spec.alpha_scale * z };
    }
    let z: f64 = rng.sample(StandardNormal);
    *mu = spec.mu_scale * z;
}

fn column_informative(votes: &[Vote], n: usize, m: usize, j: usize) -> bool {
    let (mut yea, mut nay) = (false, false);
    for i in 0..n {
        match votes[i * m + j] {
            Vote::Yea => yea = true,
            Vote::Nay => nay = true,
            Vote::Missing => {}
        }
    }
    yea && nay
}

/// Default anchor targets: `-e₁`, `+e₁`, then `+e₂ … +e_d`.
pub fn default_anchor_targets(d: usize) -> Vec<Vec<f64>> {
    let unit = |k: usize, s: f64| {
        let mut v = vec![0.0; d];
        v[k] = s;
        v
    };
    let mut out = vec![unit(0, -1.0), unit(0, 1.0)];
    out.extend((1..d).map(|k| unit(k, 1.0)));
    out
}

/// Anchors each target on the not-yet-used legislator whose true ideal point
/// is closest to it.
pub fn anchors_near_truth(data: &SyntheticData, targets: &[Vec<f64>]) -> AnchorSpec {
    let d = data.truth.d();
    let mut used = vec![false; data.truth.n()];
    let mut anchors = Vec::with_capacity(targets.len());
    for target in targets {
        let best = (0..data.truth.n())
            .filter(|&i| !used[i])
            .min_by(|&a, &b| {
                let da = sq_dist(data.truth.beta_row(a), target);
                let db = sq_dist(data.truth.beta_row(b), target);
                da.total_cmp(&db)
            })
            .expect("more legislators than anchors");
        used[best] = true;
        debug_assert_eq!(target.len(), d);
        anchors.push(Anchor::new(
            data.matrix.legislators()[best].id.clone(),
            target.clone(),
        ));
    }
    AnchorSpec::new(anchors)
}

fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// Writes `truth_mu.csv`, `truth_alpha.csv`, `truth_beta.csv` (and
/// `truth_delta.csv` for party simulations) into `dir`.
pub fn write_truth(dir: &Path, data: &SyntheticData) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let d = data.truth.d();
    let motions = data.matrix.motions();
    let legislators = data.matrix.legislators();

    let mut mu = String::from("motion,value\n");
    let mut alpha = String::from("motion,dimension,value\n");
    for (j, mo) in motions.iter().enumerate() {
        mu.push_str(&format!("{},{}\n", mo.id, data.truth.mu[j]));
        for k in 0..d {
            alpha.push_str(&format!("{},{},{}\n", mo.id, k + 1, data.truth.alpha_row(j)[k]));
        }
    }
    let mut beta = String::from("legislator,dimension,value\n");
    for (i, leg) in legislators.iter().enumerate() {
        for k in 0..d {
            beta.push_str(&format!("{},{},{}\n", leg.id, k + 1, data.truth.beta_row(i)[k]));
        }
    }
    write_text(&dir.join("truth_mu.csv"), &mu)?;
    write_text(&dir.join("truth_alpha.csv"), &alpha)?;
    write_text(&dir.join("truth_beta.csv"), &beta)?;
    if let Some(delta) = &data.delta {
        let mut out = String::from("motion,value\n");
        for (mo, v) in motions.iter().zip(delta) {
            out.push_str(&format!("{},{}\n", mo.id, v));
        }
        write_text(&dir.join("truth_delta.csv"), &out)?;
    }
    Ok(())
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = BufWriter::new(file);
    w.write_all(text.as_bytes()).map_err(|e| Error::io(path, e))
}

/// Reads `truth_beta.csv` into legislator id → position.
pub fn read_truth_beta(path: &Path) -> Result<HashMap<String, Vec<f64>>> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut rdr = csv::Reader::from_reader(BufReader::new(file));
    let mut out: HashMap<String, Vec<f64>> = HashMap::new();
    for rec in rdr.records() {
        let rec = rec.map_err(|e| Error::Parse {
            line: e.position().map_or(0, |p| p.line()),
            column: 0,
            message: e.to_string(),
        })?;
        let bad = || Error::validation(format!("malformed row in {}", path.display()));
        let k: usize = rec.get(1).and_then(|s| s.parse().ok()).ok_or_else(bad)?;
        let v: f64 = rec.get(2).and_then(|s| s.parse().ok()).ok_or_else(bad)?;
        let entry = out.entry(rec[0].to_string()).or_default();
        if entry.len() < k {
            entry.resize(k, f64::NAN);
        }
        entry[k - 1] = v;
    }
    Ok(out)
}
