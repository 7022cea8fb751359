//! Party-incentive extension: `η_ij = μ_j + α_j β_i + δ_j D_i` with a binary
//! group indicator `D` and a motion-specific net incentive `δ_j`.
//!
//! The sampler is the base sampler with the item regression widened to the
//! design row `(1, β_i, D_i)` and the ideal-point regression run on
//! `z_ij − μ_j − δ_j D_i`. Only `d = 1` is supported.
//!
//! Identification: shifting every `β_i` of the `D = 1` group by `c` and every
//! `δ_j` by `−α_j c` leaves all predictors unchanged. Anchors in both groups
//! pin the shift; the vague prior on `δ` does the rest.

use serde::{Deserialize, Serialize};

use crate::analytics::{summarize_values, ParameterSummary, CLOSE_MARGIN};
use crate::data::RollCallMatrix;
use crate::draws::{ParamIndex, PosteriorDraws};
use crate::error::{Error, Result};
use crate::identify::AnchorSpec;
use crate::model::{log_likelihood_with, Hyperparameters, ModelParameters};
use crate::sampler::{run_problem, Problem, SamplerConfig};

/// Correlation between posterior-mean β and D above which a caveat is noted.
pub const ALIGNMENT_WARNING: f64 = 0.9;

#[derive(Debug, Clone, PartialEq)]
pub struct PartyModelParameters {
    pub base: ModelParameters,
    pub delta: Vec<f64>,
    pub group: Vec<u8>,
}

impl PartyModelParameters {
    pub fn new(base: ModelParameters, delta: Vec<f64>, group: Vec<u8>) -> Result<Self> {
        if base.d() != 1 {
            return Err(Error::Unsupported("the party model is one-dimensional".into()));
        }
        if delta.len() != base.m() || group.len() != base.n() {
            return Err(Error::validation("delta needs m entries and the group indicator n"));
        }
        if delta.iter().any(|v| !v.is_finite()) {
            return Err(Error::domain("delta must be finite"));
        }
        if group.iter().any(|&g| g > 1) {
            return Err(Error::validation("group indicator must be 0 or 1"));
        }
        Ok(PartyModelParameters { base, delta, group })
    }

    pub fn linear_predictor(&self, i: usize, j: usize) -> f64 {
        self.base.linear_predictor(i, j) + self.delta[j] * f64::from(self.group[i])
    }
}

pub fn party_log_likelihood(matrix: &RollCallMatrix, params: &PartyModelParameters) -> Result<f64> {
    params.base.check_shape(matrix)?;
    Ok(log_likelihood_with(matrix, |i, j| params.linear_predictor(i, j)))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DeltaPrior {
    pub mean: f64,
    pub variance: f64,
}

impl Default for DeltaPrior {
    fn default() -> Self {
        DeltaPrior {
            mean: 0.0,
            variance: 25.0,
        }
    }
}

/// 0/1 indicator from the legislators' `group` labels: 1 for `positive`,
/// 0 for any other label. Every legislator needs a label.
pub fn group_indicator(matrix: &RollCallMatrix, positive: &str) -> Result<Vec<u8>> {
    matrix
        .legislators()
        .iter()
        .map(|l| match l.group.as_deref() {
            Some(g) => Ok(u8::from(g == positive)),
            None => Err(Error::validation(format!("legislator `{}` has no group label", l.id))),
        })
        .collect()
}

fn correlation(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        sxy += (a - mx) * (b - my);
        sxx += (a - mx) * (a - mx);
        syy += (b - my) * (b - my);
    }
    sxy / (sxx * syy).sqrt()
}

/// Gibbs sampler for the party-incentive model. Draws carry `delta`.
pub fn run_gibbs_party(
    matrix: &RollCallMatrix,
    hyper: &Hyperparameters,
    anchors: &AnchorSpec,
    group: &[u8],
    config: &SamplerConfig,
    delta_prior: DeltaPrior,
) -> Result<PosteriorDraws> {
    if config.d != 1 {
        return Err(Error::Unsupported(format!(
            "the party model is one-dimensional, config asks for d={}",
            config.d
        )));
    }
    if group.len() != matrix.n() {
        return Err(Error::validation(format!(
            "group indicator has {} entries for {} legislators",
            group.len(),
            matrix.n()
        )));
    }
    if group.iter().any(|&g| g > 1) {
        return Err(Error::validation("group indicator must be 0 or 1"));
    }
    if group.iter().all(|&g| g == group[0]) {
        return Err(Error::validation(
            "every legislator has the same group indicator; delta is not identified",
        ));
    }
    if !(delta_prior.variance > 0.0) || !delta_prior.mean.is_finite() {
        return Err(Error::domain("delta prior needs a finite mean and positive variance"));
    }
    let groups = anchors
        .anchors
        .iter()
        .filter_map(|a| matrix.legislator_index(&a.id))
        .map(|i| group[i])
        .collect::<std::collections::BTreeSet<_>>();
    let mut notes = Vec::new();
    if groups.len() < 2 {
        let msg = "anchors do not cover both groups; the group shift is identified by the delta prior only".to_string();
        log::warn!("{msg}");
        notes.push(msg);
    }

    let d_col: Vec<f64> = group.iter().map(|&g| f64::from(g)).collect();
    let problem = Problem::new(
        matrix,
        hyper,
        anchors,
        config,
        Some(d_col.clone()),
        Some((delta_prior.mean, delta_prior.variance)),
    )?;
    let mut draws = run_problem(&problem, config, None)?;

    let r = correlation(&draws.beta_mean(), &d_col);
    if r.abs() > ALIGNMENT_WARNING {
        let msg = format!(
            "posterior-mean ideal points are almost perfectly aligned with the group (|r| = {:.3}); \
             delta and the group shift of beta are weakly identified",
            r.abs()
        );
        log::warn!("{msg}");
        notes.push(msg);
    }
    draws.notes.extend(notes);
    Ok(draws)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Direction {
    FavorGroup,
    AgainstGroup,
    None,
}

impl Direction {
    pub fn label(self) -> &'static str {
        match self {
            Direction::FavorGroup => "favor-group",
            Direction::AgainstGroup => "against-group",
            Direction::None => "none",
        }
    }

    pub fn from_interval(lower: f64, upper: f64) -> Self {
        if lower > 0.0 {
            Direction::FavorGroup
        } else if upper < 0.0 {
            Direction::AgainstGroup
        } else {
            Direction::None
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MotionEffect {
    pub motion_id: String,
    pub summary: ParameterSummary,
    pub direction: Direction,
    pub yea_share: Option<f64>,
    pub closed: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PartyEffectReport {
    pub motions: Vec<MotionEffect>,
    pub significant: usize,
    pub closed_votes: usize,
    pub significant_closed: usize,
}

/// Per-motion δ summaries with direction labels.
pub fn party_effect_report(
    draws: &PosteriorDraws,
    matrix: &RollCallMatrix,
    level: f64,
) -> Result<PartyEffectReport> {
    if !draws.meta.has_delta() {
        return Err(Error::validation("draws do not come from the party model"));
    }
    if !(level > 0.0 && level < 1.0) {
        return Err(Error::domain(format!("credible level must lie in (0, 1), got {level}")));
    }
    if matrix.m() != draws.meta.m {
        return Err(Error::validation("draws and roll-call matrix describe different data"));
    }
    let motions: Vec<MotionEffect> = (0..draws.meta.m)
        .map(|j| {
            let p = ParamIndex::Delta(j);
            let summary = summarize_values(p, p.label(&draws.meta), &draws.pooled(p), level);
            let yea_share = matrix.yea_share(j);
            MotionEffect {
                motion_id: draws.meta.motion_ids[j].clone(),
                direction: Direction::from_interval(summary.ci_lower, summary.ci_upper),
                closed: yea_share.is_some_and(|s| (CLOSE_MARGIN.0..=CLOSE_MARGIN.1).contains(&s)),
                yea_share,
                summary,
            }
        })
        .collect();
    let significant = motions.iter().filter(|e| e.summary.significant).count();
    let closed_votes = motions.iter().filter(|e| e.closed).count();
    let significant_closed = motions.iter().filter(|e| e.closed && e.summary.significant).count();
    Ok(PartyEffectReport {
        motions,
        significant,
        closed_votes,
        significant_closed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::{LegislatorMeta, MotionMeta, Vote};
    use crate::identify::Anchor;
    use crate::model::default_hyperparameters;

    fn small_matrix() -> RollCallMatrix {
        use Vote::*;
        let legs: Vec<_> = (0..4)
            .map(|i| {
                let mut l = LegislatorMeta::new(format!("L{i}"));
                l.group = Some(if i < 2 { "0" } else { "1" }.into());
                l
            })
            .collect();
        let motions = (0..3).map(|j| MotionMeta::new(format!("M{j}"))).collect();
        RollCallMatrix::from_rows(
            legs,
            motions,
            vec![
                vec![Yea, Nay, Yea],
                vec![Yea, Yea, Nay],
                vec![Nay, Yea, Yea],
                vec![Nay, Nay, Yea],
            ],
        )
        .unwrap()
    }

    fn config() -> SamplerConfig {
        SamplerConfig {
            iterations: 300,
            burn_in: 100,
            thin: 1,
            chains: 1,
            seed: 3,
            d: 1,
        }
    }

    #[test]
    fn group_labels_to_indicator() {
        assert_eq!(group_indicator(&small_matrix(), "1").unwrap(), vec![0, 0, 1, 1]);
        let mut legs = small_matrix().legislators().to_vec();
        legs[0].group = None;
        let m = RollCallMatrix::from_rows(
            legs,
            small_matrix().motions().to_vec(),
            (0..4).map(|i| small_matrix().row(i).to_vec()).collect(),
        )
        .unwrap();
        assert!(group_indicator(&m, "1").is_err());
    }

    #[test]
    fn constant_group_is_rejected() {
        let m = small_matrix();
        let h = default_hyperparameters(4, 1, 25.0).unwrap();
        for g in [[0u8; 4], [1u8; 4]] {
            let r = run_gibbs_party(&m, &h, &AnchorSpec::none(), &g, &config(), DeltaPrior::default());
            assert!(matches!(r, Err(Error::Validation(_))), "{r:?}");
        }
    }

    #[test]
    fn multidimensional_is_unsupported() {
        let m = small_matrix();
        let h = default_hyperparameters(4, 2, 25.0).unwrap();
        let cfg = SamplerConfig { d: 2, ..config() };
        let r = run_gibbs_party(&m, &h, &AnchorSpec::none(), &[0, 0, 1, 1], &cfg, DeltaPrior::default());
        assert!(matches!(r, Err(Error::Unsupported(_))));
    }

    #[test]
    fn party_draws_have_delta() {
        let m = small_matrix();
        let h = default_hyperparameters(4, 1, 25.0).unwrap();
        let anchors = AnchorSpec::new(vec![Anchor::new("L0", vec![-1.0]), Anchor::new("L3", vec![1.0])]);
        let draws = run_gibbs_party(&m, &h, &anchors, &[0, 0, 1, 1], &config(), DeltaPrior::default()).unwrap();
        assert!(draws.meta.has_delta());
        assert_eq!(draws.meta.parameter_count(), 2 + 3 * 3);
        let report = party_effect_report(&draws, &m, 0.95).unwrap();
        assert_eq!(report.motions.len(), 3);
        // Yea shares 1/2, 1/2, 3/4.
        assert_eq!(report.closed_votes, 2);
    }

    #[test]
    fn direction_labels() {
        assert_eq!(Direction::from_interval(0.2, 1.0), Direction::FavorGroup);
        assert_eq!(Direction::from_interval(-1.0, -0.1), Direction::AgainstGroup);
        assert_eq!(Direction::from_interval(-0.5, 0.5), Direction::None);
        assert_eq!(Direction::FavorGroup.label(), "favor-group");
    }

    #[test]
    fn group_shift_leaves_predictors_unchanged() {
        let base = ModelParameters::new(1, vec![0.2, -0.4], vec![1.5, -0.7], vec![-1.0, 0.3, 0.8]).unwrap();
        let group = vec![0, 1, 1];
        let p = PartyModelParameters::new(base.clone(), vec![0.5, 1.1], group.clone()).unwrap();
        let c = 0.37;
        let mut shifted_beta = base.beta.clone();
        for (b, &g) in shifted_beta.iter_mut().zip(&group) {
            if g == 1 {
                *b += c;
            }
        }
        let delta: Vec<f64> = p.delta.iter().zip(&base.alpha).map(|(dl, a)| dl - a * c).collect();
        let q = PartyModelParameters::new(
            ModelParameters::new(1, base.mu.clone(), base.alpha.clone(), shifted_beta).unwrap(),
            delta,
            group,
        )
        .unwrap();
        for i in 0..3 {
            for j in 0..2 {
                assert!((p.linear_predictor(i, j) - q.linear_predictor(i, j)).abs() < 1e-12);
            }
        }
    }
}
