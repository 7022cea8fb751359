//! Retained posterior draws and their on-disk representation.
//!
//! Each parameter block is persisted as its own long-format CSV file:
//!
//! | file        | columns                                        |
//! |-------------|------------------------------------------------|
//! | `mu.csv`    | `chain,iteration,motion,value`                 |
//! | `alpha.csv` | `chain,iteration,motion,dimension,value`       |
//! | `beta.csv`  | `chain,iteration,legislator,dimension,value`   |
//! | `delta.csv` | `chain,iteration,motion,value` (party runs)    |
//!
//! `iteration` is the 1-based sweep number and `dimension` is 1-based.
//! Values are written in shortest round-trip form, so a write/read cycle is
//! lossless. The [`DrawsMeta`] record needed to read the blocks back is
//! stored by the caller (the CLI embeds it in the run manifest).

use std::collections::HashMap;
use std::fmt;
use std::fs::File;
use std::io::{BufReader, BufWriter};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::ModelParameters;
use crate::sampler::SamplerConfig;

/// Everything needed to interpret a set of draws.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DrawsMeta {
    pub n: usize,
    pub m: usize,
    pub d: usize,
    pub legislator_ids: Vec<String>,
    pub motion_ids: Vec<String>,
    pub anchored: Vec<bool>,
    pub config: SamplerConfig,
    /// 0/1 group indicator of a party-model run; `None` for the base model.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub group: Option<Vec<u8>>,
}

impl DrawsMeta {
    pub fn has_delta(&self) -> bool {
        self.group.is_some()
    }

    pub fn free_legislators(&self) -> usize {
        self.anchored.iter().filter(|a| !**a).count()
    }

    pub fn parameter_count(&self) -> usize {
        ModelParameters::parameter_count(self.free_legislators(), self.m, self.d)
            + if self.has_delta() { self.m } else { 0 }
    }
}

/// Retained draws of one chain, stored draw-major.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ChainDraws {
    /// Sweep number (1-based) of each retained draw.
    pub iterations: Vec<usize>,
    pub mu: Vec<f64>,
    pub alpha: Vec<f64>,
    pub beta: Vec<f64>,
    pub delta: Option<Vec<f64>>,
}

impl ChainDraws {
    pub fn len(&self) -> usize {
        self.iterations.len()
    }

    pub fn is_empty(&self) -> bool {
        self.iterations.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PosteriorDraws {
    pub meta: DrawsMeta,
    pub chains: Vec<ChainDraws>,
    pub wall_time_secs: f64,
    /// Number of times a diagonal jitter was needed to factor a precision matrix.
    pub jitter_events: usize,
    /// Free-form remarks (identification caveats and the like).
    pub notes: Vec<String>,
}

/// Identifies one scalar model parameter.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ParamIndex {
    Mu(usize),
    Alpha(usize, usize),
    Beta(usize, usize),
    Delta(usize),
}

impl ParamIndex {
    pub fn block(&self) -> &'static str {
        match self {
            ParamIndex::Mu(_) => "mu",
            ParamIndex::Alpha(..) => "alpha",
            ParamIndex::Beta(..) => "beta",
            ParamIndex::Delta(_) => "delta",
        }
    }

    /// Human-readable label such as `beta[L7,1]`.
    pub fn label(&self, meta: &DrawsMeta) -> String {
        match *self {
            ParamIndex::Mu(j) => format!("mu[{}]", meta.motion_ids[j]),
            ParamIndex::Alpha(j, k) => format!("alpha[{},{}]", meta.motion_ids[j], k + 1),
            ParamIndex::Beta(i, k) => format!("beta[{},{}]", meta.legislator_ids[i], k + 1),
            ParamIndex::Delta(j) => format!("delta[{}]", meta.motion_ids[j]),
        }
    }

    /// (entity id, 1-based dimension or 0 for scalars).
    pub fn entity(&self, meta: &DrawsMeta) -> (String, usize) {
        match *self {
            ParamIndex::Mu(j) | ParamIndex::Delta(j) => (meta.motion_ids[j].clone(), 0),
            ParamIndex::Alpha(j, k) => (meta.motion_ids[j].clone(), k + 1),
            ParamIndex::Beta(i, k) => (meta.legislator_ids[i].clone(), k + 1),
        }
    }
}

impl fmt::Display for ParamIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ParamIndex::Mu(j) => write!(f, "mu[{j}]"),
            ParamIndex::Alpha(j, k) => write!(f, "alpha[{j},{k}]"),
            ParamIndex::Beta(i, k) => write!(f, "beta[{i},{k}]"),
            ParamIndex::Delta(j) => write!(f, "delta[{j}]"),
        }
    }
}

impl PosteriorDraws {
    pub fn draws_per_chain(&self) -> usize {
        self.chains.iter().map(ChainDraws::len).min().unwrap_or(0)
    }

    pub fn total_draws(&self) -> usize {
        self.chains.iter().map(ChainDraws::len).sum()
    }

    pub fn value(&self, chain: usize, t: usize, p: ParamIndex) -> f64 {
        let c = &self.chains[chain];
        let (n, m, d) = (self.meta.n, self.meta.m, self.meta.d);
        match p {
            ParamIndex::Mu(j) => c.mu[t * m + j],
            ParamIndex::Alpha(j, k) => c.alpha[(t * m + j) * d + k],
            ParamIndex::Beta(i, k) => c.beta[(t * n + i) * d + k],
            ParamIndex::Delta(j) => c.delta.as_ref().expect("party draws carry delta")[t * m + j],
        }
    }

    /// Draws of one parameter, chain by chain.
    pub fn per_chain(&self, p: ParamIndex) -> Vec<Vec<f64>> {
        (0..self.chains.len())
            .map(|c| (0..self.chains[c].len()).map(|t| self.value(c, t, p)).collect())
            .collect()
    }

    /// Draws of one parameter with all chains concatenated.
    pub fn pooled(&self, p: ParamIndex) -> Vec<f64> {
        self.per_chain(p).concat()
    }

    /// The model state at retained draw `t` of `chain`.
    pub fn parameters(&self, chain: usize, t: usize) -> ModelParameters {
        let c = &self.chains[chain];
        let (n, m, d) = (self.meta.n, self.meta.m, self.meta.d);
        ModelParameters::new(
            d,
            c.mu[t * m..(t + 1) * m].to_vec(),
            c.alpha[t * m * d..(t + 1) * m * d].to_vec(),
            c.beta[t * n * d..(t + 1) * n * d].to_vec(),
        )
        .expect("retained draws are finite and well shaped")
    }

    pub fn delta_draw(&self, chain: usize, t: usize) -> Option<&[f64]> {
        let m = self.meta.m;
        self.chains[chain]
            .delta
            .as_ref()
            .map(|dl| &dl[t * m..(t + 1) * m])
    }

    /// Parameters of the requested blocks; anchored β are skipped unless asked.
    pub fn parameters_in(&self, blocks: &[&str], include_anchored: bool) -> Vec<ParamIndex> {
        let meta = &self.meta;
        let mut out = Vec::new();
        for block in blocks {
            match *block {
                "mu" => out.extend((0..meta.m).map(ParamIndex::Mu)),
                "alpha" => out.extend(
                    (0..meta.m).flat_map(|j| (0..meta.d).map(move |k| ParamIndex::Alpha(j, k))),
                ),
                "beta" => out.extend(
                    (0..meta.n)
                        .filter(|&i| include_anchored || !meta.anchored[i])
                        .flat_map(|i| (0..meta.d).map(move |k| ParamIndex::Beta(i, k))),
                ),
                "delta" if meta.has_delta() => out.extend((0..meta.m).map(ParamIndex::Delta)),
                _ => {}
            }
        }
        out
    }

    /// Every estimated parameter (anchors excluded).
    pub fn free_parameters(&self) -> Vec<ParamIndex> {
        self.parameters_in(&["mu", "alpha", "beta", "delta"], false)
    }

    /// Posterior mean of β (n × d, row-major) pooled over chains.
    pub fn beta_mean(&self) -> Vec<f64> {
        let (n, d) = (self.meta.n, self.meta.d);
        let mut acc = vec![0.0; n * d];
        let mut count = 0usize;
        for c in &self.chains {
            for t in 0..c.len() {
                for (a, b) in acc.iter_mut().zip(&c.beta[t * n * d..(t + 1) * n * d]) {
                    *a += b;
                }
                count += 1;
            }
        }
        if count > 0 {
            acc.iter_mut().for_each(|a| *a /= count as f64);
        }
        acc
    }

    pub fn write_blocks(&self, dir: &Path) -> Result<()> {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        let meta = &self.meta;
        let (n, m, d) = (meta.n, meta.m, meta.d);

        let mut mu = block_writer(dir, "mu.csv", &["chain", "iteration", "motion", "value"])?;
        let mut alpha = block_writer(
            dir,
            "alpha.csv",
            &["chain", "iteration", "motion", "dimension", "value"],
        )?;
        let mut beta = block_writer(
            dir,
            "beta.csv",
            &["chain", "iteration", "legislator", "dimension", "value"],
        )?;
        let mut delta = if meta.has_delta() {
            Some(block_writer(dir, "delta.csv", &["chain", "iteration", "motion", "value"])?)
        } else {
            None
        };

        for (c, chain) in self.chains.iter().enumerate() {
            let cs = (c + 1).to_string();
            for (t, &iter) in chain.iterations.iter().enumerate() {
                let it = iter.to_string();
                for j in 0..m {
                    let id = &meta.motion_ids[j];
                    write_row(&mut mu, &[&cs, &it, id, &chain.mu[t * m + j].to_string()])?;
                    for k in 0..d {
                        let v = chain.alpha[(t * m + j) * d + k].to_string();
                        write_row(&mut alpha, &[&cs, &it, id, &(k + 1).to_string(), &v])?;
                    }
                    if let (Some(w), Some(dl)) = (delta.as_mut(), chain.delta.as_ref()) {
                        write_row(w, &[&cs, &it, id, &dl[t * m + j].to_string()])?;
                    }
                }
                for i in 0..n {
                    let id = &meta.legislator_ids[i];
                    for k in 0..d {
                        let v = chain.beta[(t * n + i) * d + k].to_string();
                        write_row(&mut beta, &[&cs, &it, id, &(k + 1).to_string(), &v])?;
                    }
                }
            }
        }
        for w in [Some(mu), Some(alpha), Some(beta), delta].into_iter().flatten() {
            let mut w = w;
            w.flush().map_err(|e| Error::io(dir, e))?;
        }
        Ok(())
    }

    /// Reads blocks written by [`PosteriorDraws::write_blocks`].
    pub fn read_blocks(dir: &Path, meta: DrawsMeta) -> Result<Self> {
        let (n, m, d) = (meta.n, meta.m, meta.d);
        let cfg = &meta.config;
        let per_chain = cfg.retained_per_chain();
        let motion_index: HashMap<&str, usize> =
            meta.motion_ids.iter().enumerate().map(|(j, s)| (s.as_str(), j)).collect();
        let leg_index: HashMap<&str, usize> =
            meta.legislator_ids.iter().enumerate().map(|(i, s)| (s.as_str(), i)).collect();

        let mut chains: Vec<ChainDraws> = (0..cfg.chains)
            .map(|_| ChainDraws {
                iterations: (1..=per_chain).map(|t| cfg.burn_in + t * cfg.thin).collect(),
                mu: vec![f64::NAN; per_chain * m],
                alpha: vec![f64::NAN; per_chain * m * d],
                beta: vec![f64::NAN; per_chain * n * d],
                delta: meta.has_delta().then(|| vec![f64::NAN; per_chain * m]),
            })
            .collect();

        let locate = |chain: &str, iter: &str| -> Result<(usize, usize)> {
            let c: usize = parse_field(chain)?;
            let b: usize = parse_field(iter)?;
            if c == 0 || c > cfg.chains || b <= cfg.burn_in || (b - cfg.burn_in) % cfg.thin != 0 {
                return Err(Error::validation(format!("draw (chain {c}, iteration {b}) not in config")));
            }
            let t = (b - cfg.burn_in) / cfg.thin - 1;
            if t >= per_chain {
                return Err(Error::validation(format!("iteration {b} beyond the configured run")));
            }
            Ok((c - 1, t))
        };
        let lookup = |map: &HashMap<&str, usize>, id: &str| -> Result<usize> {
            map.get(id)
                .copied()
                .ok_or_else(|| Error::validation(format!("unknown id `{id}` in draws")))
        };
        let dim = |s: &str| -> Result<usize> {
            let k: usize = parse_field(s)?;
            if k == 0 || k > d {
                return Err(Error::validation(format!("dimension {k} out of range")));
            }
            Ok(k - 1)
        };

        for rec in block_records(&dir.join("mu.csv"))? {
            let (c, t) = locate(&rec[0], &rec[1])?;
            let j = lookup(&motion_index, &rec[2])?;
            chains[c].mu[t * m + j] = parse_field(&rec[3])?;
        }
        for rec in block_records(&dir.join("alpha.csv"))? {
            let (c, t) = locate(&rec[0], &rec[1])?;
            let j = lookup(&motion_index, &rec[2])?;
            chains[c].alpha[(t * m + j) * d + dim(&rec[3])?] = parse_field(&rec[4])?;
        }
        for rec in block_records(&dir.join("beta.csv"))? {
            let (c, t) = locate(&rec[0], &rec[1])?;
            let i = lookup(&leg_index, &rec[2])?;
            chains[c].beta[(t * n + i) * d + dim(&rec[3])?] = parse_field(&rec[4])?;
        }
        if meta.has_delta() {
            for rec in block_records(&dir.join("delta.csv"))? {
                let (c, t) = locate(&rec[0], &rec[1])?;
                let j = lookup(&motion_index, &rec[2])?;
                chains[c].delta.as_mut().expect("allocated above")[t * m + j] = parse_field(&rec[3])?;
            }
        }
        let complete = chains.iter().all(|c| {
            c.mu.iter()
                .chain(&c.alpha)
                .chain(&c.beta)
                .chain(c.delta.iter().flatten())
                .all(|v| !v.is_nan())
        });
        if !complete {
            return Err(Error::validation(format!(
                "draw files in {} are incomplete",
                dir.display()
            )));
        }
        Ok(PosteriorDraws {
            meta,
            chains,
            wall_time_secs: 0.0,
            jitter_events: 0,
            notes: Vec::new(),
        })
    }
}

fn block_writer(dir: &Path, name: &str, header: &[&str]) -> Result<csv::Writer<BufWriter<File>>> {
    let path = dir.join(name);
    let file = File::create(&path).map_err(|e| Error::io(&path, e))?;
    let mut w = csv::Writer::from_writer(BufWriter::new(file));
    write_row(&mut w, header)?;
    Ok(w)
}

fn write_row(w: &mut csv::Writer<BufWriter<File>>, fields: &[&str]) -> Result<()> {
    w.write_record(fields)
        .map_err(|e| Error::io("<draws>", std::io::Error::other(e.to_string())))
}

fn block_records(path: &Path) -> Result<Vec<csv::StringRecord>> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut rdr = csv::Reader::from_reader(BufReader::new(file));
    rdr.records()
        .map(|r| {
            r.map_err(|e| Error::Parse {
                line: e.position().map_or(0, |p| p.line()),
                column: 0,
                message: format!("{}: {e}", path.display()),
            })
        })
        .collect()
}

fn parse_field<T: std::str::FromStr>(s: &str) -> Result<T> {
    s.trim()
        .parse()
        .map_err(|_| Error::validation(format!("cannot parse `{s}` in draw file")))
}
