//! Posterior summaries and diagnostics.
//!
//! Conventions used throughout:
//!
//! * Credible intervals are equal-tailed, with endpoints taken from the
//!   pooled draws by linear interpolation between order statistics: for
//!   sorted draws `x[0..N]` and probability `p`, let `h = (N − 1)p`; the
//!   quantile is `x[⌊h⌋] + (h − ⌊h⌋)(x[⌊h⌋+1] − x[⌊h⌋])`.
//! * A parameter is *significant* when its interval excludes zero.
//! * Posterior predictive p-values are `mean(T(ỹ) ≥ T(y))`, so ties count
//!   towards the tail.
//! * Split-chain R̂ halves every chain (dropping the middle draw of odd
//!   chains) and compares between- and within-half variances; ESS uses the
//!   multi-chain autocorrelation estimate with Geyer's initial monotone
//!   sequence truncation. Both are reported as `None` when the within-chain
//!   variance is zero.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::data::{RollCallMatrix, Vote};
use crate::draws::{ParamIndex, PosteriorDraws};
use crate::error::{Error, Result};
use crate::normal;

pub const MIN_SUMMARY_DRAWS: usize = 100;
pub const MIN_PPC_REPLICATES: usize = 200;
/// Yea-share band of a "close" vote.
pub const CLOSE_MARGIN: (f64, f64) = (0.35, 0.65);

#[derive(Debug, Clone, PartialEq)]
pub struct ParameterSummary {
    pub param: ParamIndex,
    pub label: String,
    pub mean: f64,
    pub sd: f64,
    pub ci_lower: f64,
    pub ci_upper: f64,
    pub significant: bool,
}

/// Empirical quantile of sorted data (linear interpolation between order
/// statistics).
pub fn quantile(sorted: &[f64], p: f64) -> f64 {
    assert!(!sorted.is_empty(), "quantile of empty data");
    let h = (sorted.len() - 1) as f64 * p.clamp(0.0, 1.0);
    let lo = h.floor() as usize;
    let hi = (lo + 1).min(sorted.len() - 1);
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

/// Mean, sd and equal-tailed interval of a sample.
pub fn summarize_values(param: ParamIndex, label: String, values: &[f64], level: f64) -> ParameterSummary {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let sd = if values.len() > 1 {
        (values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1.0)).sqrt()
    } else {
        0.0
    };
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let tail = 0.5 * (1.0 - level);
    let ci_lower = quantile(&sorted, tail);
    let ci_upper = quantile(&sorted, 1.0 - tail);
    ParameterSummary {
        param,
        label,
        mean,
        sd,
        ci_lower,
        ci_upper,
        significant: ci_lower > 0.0 || ci_upper < 0.0,
    }
}

fn check_level(level: f64) -> Result<()> {
    if level > 0.0 && level < 1.0 {
        Ok(())
    } else {
        Err(Error::domain(format!("credible level must lie in (0, 1), got {level}")))
    }
}

/// Summaries of the given parameters from the pooled chains.
pub fn summarize_params(
    draws: &PosteriorDraws,
    params: &[ParamIndex],
    level: f64,
) -> Result<Vec<ParameterSummary>> {
    check_level(level)?;
    let total = draws.total_draws();
    if total < MIN_SUMMARY_DRAWS {
        return Err(Error::validation(format!(
            "{total} retained draws; at least {MIN_SUMMARY_DRAWS} are needed"
        )));
    }
    Ok(params
        .iter()
        .map(|&p| summarize_values(p, p.label(&draws.meta), &draws.pooled(p), level))
        .collect())
}

/// Summaries of every parameter (anchored ideal points included).
pub fn summarize(draws: &PosteriorDraws, level: f64) -> Result<Vec<ParameterSummary>> {
    let params = draws.parameters_in(&["mu", "alpha", "beta", "delta"], true);
    summarize_params(draws, &params, level)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiscriminationReport {
    pub motions: usize,
    /// Motions with at least one significant α coordinate.
    pub significant: usize,
    pub fraction: f64,
    /// Significant motions per dimension.
    pub per_dimension: Vec<usize>,
}

/// Counts motions whose discrimination interval excludes zero.
pub fn discrimination_significance(summaries: &[ParameterSummary]) -> DiscriminationReport {
    let mut by_motion: BTreeMap<usize, bool> = BTreeMap::new();
    let mut per_dimension: Vec<usize> = Vec::new();
    for s in summaries {
        if let ParamIndex::Alpha(j, k) = s.param {
            if per_dimension.len() <= k {
                per_dimension.resize(k + 1, 0);
            }
            if s.significant {
                per_dimension[k] += 1;
            }
            *by_motion.entry(j).or_default() |= s.significant;
        }
    }
    let motions = by_motion.len();
    let significant = by_motion.values().filter(|s| **s).count();
    DiscriminationReport {
        motions,
        significant,
        fraction: if motions == 0 { 0.0 } else { significant as f64 / motions as f64 },
        per_dimension,
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Occupant {
    pub id: String,
    pub count: usize,
    pub probability: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PivotReport {
    /// 1-based order statistic (1 = lowest ideal point).
    pub rank: usize,
    /// Legislators that ever occupied the rank, most frequent first.
    pub occupancy: Vec<Occupant>,
    pub draws_used: usize,
}

impl PivotReport {
    pub fn probability_of(&self, id: &str) -> f64 {
        self.occupancy
            .iter()
            .find(|o| o.id == id)
            .map_or(0.0, |o| o.probability)
    }
}

/// Sorts the ideal points of every retained draw and records who occupies
/// each requested rank. Ties are broken by legislator id.
pub fn pivot_analysis(draws: &PosteriorDraws, ranks: &[usize]) -> Result<Vec<PivotReport>> {
    let meta = &draws.meta;
    if meta.d != 1 {
        return Err(Error::Unsupported(format!(
            "pivot analysis needs a one-dimensional ordering (d={}); project the ideal points first",
            meta.d
        )));
    }
    let n = meta.n;
    if let Some(&bad) = ranks.iter().find(|&&r| r == 0 || r > n) {
        return Err(Error::validation(format!("rank {bad} outside 1..={n}")));
    }
    let total = draws.total_draws();
    if total == 0 {
        return Err(Error::validation("no draws to rank"));
    }

    let mut counts = vec![vec![0usize; n]; ranks.len()];
    let mut order: Vec<usize> = (0..n).collect();
    let mut ties = 0usize;
    for chain in &draws.chains {
        for t in 0..chain.len() {
            let row = &chain.beta[t * n..(t + 1) * n];
            order.sort_by(|&a, &b| match row[a].total_cmp(&row[b]) {
                Ordering::Equal => {
                    ties += 1;
                    meta.legislator_ids[a].cmp(&meta.legislator_ids[b])
                }
                o => o,
            });
            for (r, &rank) in ranks.iter().enumerate() {
                counts[r][order[rank - 1]] += 1;
            }
        }
    }
    if ties > 0 {
        log::debug!("pivot analysis broke {ties} tie comparison(s) by legislator id");
    }

    Ok(ranks
        .iter()
        .zip(counts)
        .map(|(&rank, row)| {
            let mut occupancy: Vec<Occupant> = row
                .into_iter()
                .enumerate()
                .filter(|(_, c)| *c > 0)
                .map(|(i, count)| Occupant {
                    id: meta.legislator_ids[i].clone(),
                    count,
                    probability: count as f64 / total as f64,
                })
                .collect();
            occupancy.sort_by(|a, b| b.count.cmp(&a.count).then_with(|| a.id.cmp(&b.id)));
            PivotReport {
                rank,
                occupancy,
                draws_used: total,
            }
        })
        .collect())
}

/// Test statistics available to [`posterior_predictive_check`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PpcStatistic {
    /// Yeas over observed votes.
    YeaRate,
    /// Sample standard deviation of the per-legislator yea rates.
    LegislatorYeaSd,
    /// Share of motions whose yea share lies in [0.35, 0.65].
    CloseMarginFraction,
}

impl PpcStatistic {
    pub const ALL: [PpcStatistic; 3] = [
        PpcStatistic::YeaRate,
        PpcStatistic::LegislatorYeaSd,
        PpcStatistic::CloseMarginFraction,
    ];

    pub fn name(self) -> &'static str {
        match self {
            PpcStatistic::YeaRate => "yea_rate",
            PpcStatistic::LegislatorYeaSd => "legislator_yea_sd",
            PpcStatistic::CloseMarginFraction => "close_margin_fraction",
        }
    }

    /// Evaluates the statistic on a row-major n × m vote grid.
    pub fn evaluate(self, votes: &[Vote], n: usize, m: usize) -> f64 {
        match self {
            PpcStatistic::YeaRate => {
                let (y, o) = votes.iter().fold((0usize, 0usize), |(y, o), v| match v {
                    Vote::Yea => (y + 1, o + 1),
                    Vote::Nay => (y, o + 1),
                    Vote::Missing => (y, o),
                });
                if o == 0 {
                    0.0
                } else {
                    y as f64 / o as f64
                }
            }
            PpcStatistic::LegislatorYeaSd => {
                let rates: Vec<f64> = (0..n)
                    .filter_map(|i| share(votes[i * m..(i + 1) * m].iter().copied()))
                    .collect();
                if rates.len() < 2 {
                    return 0.0;
                }
                let k = rates.len() as f64;
                let mean = rates.iter().sum::<f64>() / k;
                (rates.iter().map(|r| (r - mean) * (r - mean)).sum::<f64>() / (k - 1.0)).sqrt()
            }
            PpcStatistic::CloseMarginFraction => {
                let shares: Vec<f64> = (0..m)
                    .filter_map(|j| share((0..n).map(|i| votes[i * m + j])))
                    .collect();
                if shares.is_empty() {
                    return 0.0;
                }
                let close = shares
                    .iter()
                    .filter(|s| (CLOSE_MARGIN.0..=CLOSE_MARGIN.1).contains(*s))
                    .count();
                close as f64 / shares.len() as f64
            }
        }
    }
}

fn share(votes: impl Iterator<Item = Vote>) -> Option<f64> {
    let (y, o) = votes.fold((0usize, 0usize), |(y, o), v| match v {
        Vote::Yea => (y + 1, o + 1),
        Vote::Nay => (y, o + 1),
        Vote::Missing => (y, o),
    });
    (o > 0).then(|| y as f64 / o as f64)
}

impl FromStr for PpcStatistic {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        PpcStatistic::ALL
            .into_iter()
            .find(|st| st.name() == s)
            .ok_or_else(|| {
                Error::validation(format!(
                    "unknown PPC statistic `{s}` (known: yea_rate, legislator_yea_sd, close_margin_fraction)"
                ))
            })
    }
}

impl fmt::Display for PpcStatistic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

pub fn parse_statistics<S: AsRef<str>>(names: &[S]) -> Result<Vec<PpcStatistic>> {
    names.iter().map(|s| s.as_ref().parse()).collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct PpcReport {
    pub statistic: PpcStatistic,
    pub observed: f64,
    pub predictive_draws: Vec<f64>,
    pub p_value: f64,
}

impl PpcReport {
    pub fn is_extreme(&self) -> bool {
        self.p_value < 0.05 || self.p_value > 0.95
    }
}

/// Fraction of replicated statistics at or above the observed value.
pub fn ppc_p_value(observed: f64, replicated: &[f64]) -> f64 {
    if replicated.is_empty() {
        return f64::NAN;
    }
    replicated.iter().filter(|&&r| r >= observed).count() as f64 / replicated.len() as f64
}

/// Replicates the data from `replicates` retained draws (spread evenly over
/// the pooled chains) and compares each statistic with its observed value.
/// Missing cells stay missing in every replicate.
pub fn posterior_predictive_check<R: Rng + ?Sized>(
    draws: &PosteriorDraws,
    matrix: &RollCallMatrix,
    statistics: &[PpcStatistic],
    replicates: usize,
    rng: &mut R,
) -> Result<Vec<PpcReport>> {
    let meta = &draws.meta;
    let ids_match = meta.legislator_ids.len() == matrix.n()
        && meta.motion_ids.len() == matrix.m()
        && meta.legislator_ids.iter().zip(matrix.legislators()).all(|(a, b)| *a == b.id)
        && meta.motion_ids.iter().zip(matrix.motions()).all(|(a, b)| *a == b.id);
    if !ids_match {
        return Err(Error::validation("draws and roll-call matrix describe different data"));
    }
    let total = draws.total_draws();
    if total < MIN_PPC_REPLICATES {
        return Err(Error::validation(format!(
            "{total} retained draws; at least {MIN_PPC_REPLICATES} are needed"
        )));
    }
    if replicates < MIN_PPC_REPLICATES {
        return Err(Error::validation(format!(
            "{replicates} replicates requested; at least {MIN_PPC_REPLICATES} are needed"
        )));
    }

    let (n, m) = (matrix.n(), matrix.m());
    let observed: Vec<f64> = statistics.iter().map(|s| s.evaluate(matrix.votes(), n, m)).collect();
    let mut replicated = vec![Vec::with_capacity(replicates); statistics.len()];
    let offsets: Vec<usize> = draws
        .chains
        .iter()
        .scan(0, |acc, c| {
            let start = *acc;
            *acc += c.len();
            Some(start)
        })
        .collect();
    let group = meta.group.as_ref();
    let mut fake = vec![Vote::Missing; n * m];
    for r in 0..replicates {
        let pooled = r * total / replicates;
        let chain = offsets.iter().rposition(|&o| o <= pooled).expect("offsets start at 0");
        let t = pooled - offsets[chain];
        let params = draws.parameters(chain, t);
        let delta = draws.delta_draw(chain, t);
        for i in 0..n {
            for j in 0..m {
                let cell = i * m + j;
                if !matrix.votes()[cell].is_observed() {
                    fake[cell] = Vote::Missing;
                    continue;
                }
                let mut eta = params.linear_predictor(i, j);
                if let (Some(g), Some(dl)) = (group, delta) {
                    eta += dl[j] * f64::from(g[i]);
                }
                fake[cell] = if rng.random::<f64>() < normal::cdf(eta) {
                    Vote::Yea
                } else {
                    Vote::Nay
                };
            }
        }
        for (s, stat) in statistics.iter().enumerate() {
            replicated[s].push(stat.evaluate(&fake, n, m));
        }
    }

    Ok(statistics
        .iter()
        .zip(observed)
        .zip(replicated)
        .map(|((&statistic, observed), predictive_draws)| PpcReport {
            statistic,
            observed,
            p_value: ppc_p_value(observed, &predictive_draws),
            predictive_draws,
        })
        .collect())
}

#[derive(Debug, Clone, PartialEq)]
pub struct Convergence {
    pub param: ParamIndex,
    pub label: String,
    /// Split-chain potential scale reduction; `None` when not applicable.
    pub rhat: Option<f64>,
    pub ess: Option<f64>,
}

fn split_halves(chains: &[Vec<f64>]) -> Vec<&[f64]> {
    let mut out = Vec::with_capacity(chains.len() * 2);
    for c in chains {
        let half = c.len() / 2;
        out.push(&c[..half]);
        out.push(&c[c.len() - half..]);
    }
    out
}

fn mean_var(x: &[f64]) -> (f64, f64) {
    let n = x.len() as f64;
    let mean = x.iter().sum::<f64>() / n;
    let var = x.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1.0);
    (mean, var)
}

/// Split-chain R̂ over equal-length chains (at least 4 draws each).
pub fn split_rhat(chains: &[Vec<f64>]) -> Option<f64> {
    let len = chains.iter().map(Vec::len).min()?;
    if len < 4 {
        return None;
    }
    let trimmed: Vec<Vec<f64>> = chains.iter().map(|c| c[..len].to_vec()).collect();
    let halves = split_halves(&trimmed);
    let l = halves[0].len() as f64;
    let stats: Vec<(f64, f64)> = halves.iter().map(|h| mean_var(h)).collect();
    let within = stats.iter().map(|s| s.1).sum::<f64>() / stats.len() as f64;
    if !(within > 0.0) {
        return None;
    }
    let means: Vec<f64> = stats.iter().map(|s| s.0).collect();
    let between_over_l = mean_var(&means).1;
    let var_plus = (l - 1.0) / l * within + between_over_l;
    Some((var_plus / within).sqrt())
}

/// Multi-chain effective sample size (split chains, Geyer truncation).
pub fn effective_sample_size(chains: &[Vec<f64>]) -> Option<f64> {
    let len = chains.iter().map(Vec::len).min()?;
    if len < 4 {
        return None;
    }
    let trimmed: Vec<Vec<f64>> = chains.iter().map(|c| c[..len].to_vec()).collect();
    let halves = split_halves(&trimmed);
    let k = halves.len();
    let l = halves[0].len();
    let lf = l as f64;

    let centred: Vec<Vec<f64>> = halves
        .iter()
        .map(|h| {
            let mean = h.iter().sum::<f64>() / lf;
            h.iter().map(|v| v - mean).collect()
        })
        .collect();
    let acov = |lag: usize| -> f64 {
        centred
            .iter()
            .map(|c| c[..l - lag].iter().zip(&c[lag..]).map(|(a, b)| a * b).sum::<f64>() / lf)
            .sum::<f64>()
            / k as f64
    };
    let stats: Vec<(f64, f64)> = halves.iter().map(|h| mean_var(h)).collect();
    let within = stats.iter().map(|s| s.1).sum::<f64>() / k as f64;
    let means: Vec<f64> = stats.iter().map(|s| s.0).collect();
    let var_plus = within * (lf - 1.0) / lf + mean_var(&means).1;
    if !(within > 0.0 && var_plus > 0.0) {
        return None;
    }
    let rho = |lag: usize| 1.0 - (within - acov(lag)) / var_plus;

    let mut tau = -1.0;
    let mut prev_pair = f64::INFINITY;
    let mut lag = 0;
    while lag + 1 < l {
        let mut pair = rho(lag) + rho(lag + 1);
        if pair <= 0.0 {
            break;
        }
        pair = pair.min(prev_pair);
        tau += 2.0 * pair;
        prev_pair = pair;
        lag += 2;
    }
    let total = (k * l) as f64;
    let ess = total / tau.max(1.0 / total.log10().max(1.0));
    Some(ess.min(total * total.log10().max(1.0)))
}

/// R̂ and ESS for every free parameter.
pub fn convergence_diagnostics(draws: &PosteriorDraws) -> Result<Vec<Convergence>> {
    let chains = draws.chains.len();
    let per_chain = draws.draws_per_chain();
    if per_chain < 4 {
        return Err(Error::validation(format!(
            "{per_chain} draws per chain; at least 4 are needed for split diagnostics"
        )));
    }
    if chains < 2 && per_chain < 200 {
        return Err(Error::validation(
            "a single chain needs at least 200 draws for split-chain diagnostics",
        ));
    }
    Ok(draws
        .free_parameters()
        .into_iter()
        .map(|p| {
            let per = draws.per_chain(p);
            Convergence {
                param: p,
                label: p.label(&draws.meta),
                rhat: split_rhat(&per),
                ess: effective_sample_size(&per),
            }
        })
        .collect())
}
