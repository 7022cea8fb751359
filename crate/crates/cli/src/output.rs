//! CSV artifacts written by the commands.

use std::path::Path;

use ideal_core::analytics::{Convergence, ParameterSummary, PivotReport, PpcReport};
use ideal_core::draws::DrawsMeta;
use ideal_core::party::PartyEffectReport;
use ideal_core::{ParamIndex, RollCallMatrix};
use serde::Serialize;

use crate::error::{CliError, Result};

fn write_rows<T: Serialize>(path: &Path, rows: impl IntoIterator<Item = T>) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(|e| csv_error(path, e))?;
    for row in rows {
        w.serialize(row).map_err(|e| csv_error(path, e))?;
    }
    w.flush().map_err(|e| CliError::io(path, e))
}

fn csv_error(path: &Path, e: csv::Error) -> CliError {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => CliError::io(path, io),
        other => CliError::io(path, std::io::Error::other(format!("{other:?}"))),
    }
}

#[derive(Serialize)]
struct SummaryRow<'a> {
    parameter: &'a str,
    block: &'static str,
    id: String,
    dimension: usize,
    mean: f64,
    sd: f64,
    ci_lower: f64,
    ci_upper: f64,
    significant: bool,
}

/// `summary.csv`: one row per parameter.
pub fn write_summary(path: &Path, meta: &DrawsMeta, summaries: &[ParameterSummary]) -> Result<()> {
    write_rows(
        path,
        summaries.iter().map(|s| {
            let (id, dimension) = s.param.entity(meta);
            SummaryRow {
                parameter: &s.label,
                block: s.param.block(),
                id,
                dimension,
                mean: s.mean,
                sd: s.sd,
                ci_lower: s.ci_lower,
                ci_upper: s.ci_upper,
                significant: s.significant,
            }
        }),
    )
}

#[derive(Serialize)]
struct PlotRow<'a> {
    order: usize,
    legislator: &'a str,
    party: &'a str,
    group: &'a str,
    dimension: usize,
    mean: f64,
    ci_lower: f64,
    ci_upper: f64,
    significant: bool,
    anchored: bool,
}

/// `ideal_points_plot.csv`: β summaries sorted by posterior mean within
/// each dimension, ready for a dot-and-whisker plot.
pub fn write_ideal_points_plot(
    path: &Path,
    meta: &DrawsMeta,
    matrix: Option<&RollCallMatrix>,
    summaries: &[ParameterSummary],
) -> Result<()> {
    let mut rows = Vec::new();
    for k in 0..meta.d {
        let mut betas: Vec<(usize, &ParameterSummary)> = summaries
            .iter()
            .filter_map(|s| match s.param {
                ParamIndex::Beta(i, kk) if kk == k => Some((i, s)),
                _ => None,
            })
            .collect();
        betas.sort_by(|a, b| a.1.mean.total_cmp(&b.1.mean).then(a.0.cmp(&b.0)));
        for (order, (i, s)) in betas.into_iter().enumerate() {
            let leg = matrix.map(|mat| &mat.legislators()[i]);
            rows.push(PlotRow {
                order: order + 1,
                legislator: &meta.legislator_ids[i],
                party: leg.map_or("", |l| l.party.as_str()),
                group: leg.and_then(|l| l.group.as_deref()).unwrap_or(""),
                dimension: k + 1,
                mean: s.mean,
                ci_lower: s.ci_lower,
                ci_upper: s.ci_upper,
                significant: s.significant,
                anchored: meta.anchored[i],
            });
        }
    }
    write_rows(path, rows)
}

#[derive(Serialize)]
struct DiagnosticRow<'a> {
    parameter: &'a str,
    rhat: Option<f64>,
    ess: Option<f64>,
}

/// `diagnostics.csv`: split-chain R̂ and effective sample size.
pub fn write_diagnostics(path: &Path, diagnostics: &[Convergence]) -> Result<()> {
    write_rows(
        path,
        diagnostics.iter().map(|c| DiagnosticRow {
            parameter: &c.label,
            rhat: c.rhat,
            ess: c.ess,
        }),
    )
}

#[derive(Serialize)]
struct PivotRow<'a> {
    rank: usize,
    legislator: &'a str,
    count: usize,
    probability: f64,
}

/// `pivots.csv`: rank-occupancy table, most frequent occupant first.
pub fn write_pivots(path: &Path, reports: &[PivotReport]) -> Result<()> {
    write_rows(
        path,
        reports.iter().flat_map(|r| {
            r.occupancy.iter().map(move |o| PivotRow {
                rank: r.rank,
                legislator: &o.id,
                count: o.count,
                probability: o.probability,
            })
        }),
    )
}

#[derive(Serialize)]
struct PpcRow {
    statistic: &'static str,
    observed: f64,
    replicate_mean: f64,
    p_value: f64,
    extreme: bool,
}

/// `ppc.csv`: one row per statistic.
pub fn write_ppc(path: &Path, reports: &[PpcReport]) -> Result<()> {
    write_rows(
        path,
        reports.iter().map(|r| PpcRow {
            statistic: r.statistic.name(),
            observed: r.observed,
            replicate_mean: r.predictive_draws.iter().sum::<f64>() / r.predictive_draws.len() as f64,
            p_value: r.p_value,
            extreme: r.is_extreme(),
        }),
    )
}

#[derive(Serialize)]
struct ReplicateRow {
    statistic: &'static str,
    replicate: usize,
    value: f64,
}

/// `ppc_draws.csv`: the replicated statistic values behind each p-value.
pub fn write_ppc_draws(path: &Path, reports: &[PpcReport]) -> Result<()> {
    write_rows(
        path,
        reports.iter().flat_map(|r| {
            r.predictive_draws.iter().enumerate().map(|(k, &value)| ReplicateRow {
                statistic: r.statistic.name(),
                replicate: k + 1,
                value,
            })
        }),
    )
}

#[derive(Serialize)]
struct PartyRow<'a> {
    motion: &'a str,
    mean: f64,
    sd: f64,
    ci_lower: f64,
    ci_upper: f64,
    significant: bool,
    direction: &'static str,
    yea_share: Option<f64>,
    closed: bool,
}

/// `party_effects.csv`: δ summaries with direction labels.
pub fn write_party_effects(path: &Path, report: &PartyEffectReport) -> Result<()> {
    write_rows(
        path,
        report.motions.iter().map(|e| PartyRow {
            motion: &e.motion_id,
            mean: e.summary.mean,
            sd: e.summary.sd,
            ci_lower: e.summary.ci_lower,
            ci_upper: e.summary.ci_upper,
            significant: e.summary.significant,
            direction: e.direction.label(),
            yea_share: e.yea_share,
            closed: e.closed,
        }),
    )
}

pub fn write_text(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|e| CliError::io(path, e))
}

pub fn write_toml<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let text = toml::to_string(value).map_err(|e| CliError::Config(e.to_string()))?;
    write_text(path, &text)
}
