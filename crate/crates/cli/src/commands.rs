//! Command implementations. Each returns a value whose `Display` is the
//! human-readable report printed on success.

use std::collections::HashMap;
use std::fmt;
use std::path::{Path, PathBuf};

use ideal_core::analytics::{
    self, convergence_diagnostics, discrimination_significance, pivot_analysis,
    posterior_predictive_check, Convergence, DiscriminationReport, ParameterSummary, PivotReport,
    PpcReport, PpcStatistic,
};
use ideal_core::data::{filter_matrix, load_roll_calls, FilterReport};
use ideal_core::identify::orient_draws;
use ideal_core::model::default_hyperparameters;
use ideal_core::party::{group_indicator, party_effect_report, run_gibbs_party, PartyEffectReport};
use ideal_core::sampler::{chain_rng, run_gibbs};
use ideal_core::synth::{
    anchors_near_truth, default_anchor_targets, read_truth_beta, simulate, simulate_party,
    write_truth, SynthSpec,
};
use ideal_core::{ParamIndex, PosteriorDraws, RollCallMatrix};
use serde::Serialize;

use crate::args::{FitArgs, GlobalArgs, PivotsArgs, PpcArgs, RunArgs, SimulateArgs, SummarizeArgs};
use crate::config::{AnchorEntry, RunConfig};
use crate::error::{CliError, Result};
use crate::manifest::{
    config_digest, draws_digest, file_sha256, run_digest, Manifest, RerunCheck, RunDir,
    DRAWS_DIR, FILTERED_DATA_FILE,
};
use crate::output;

/// Stream for posterior predictive replicates, disjoint from the chains.
const PPC_STREAM: usize = usize::MAX;

/// The configuration file (if any) with no flags applied.
pub fn base_config(global: &GlobalArgs) -> Result<RunConfig> {
    match &global.config {
        Some(path) => RunConfig::load(path),
        None => Ok(RunConfig::default()),
    }
}

/// File values overridden by flags.
pub fn effective_config(global: &GlobalArgs, fit: &FitArgs) -> Result<RunConfig> {
    let mut c = base_config(global)?;
    if let Some(v) = &fit.data {
        c.data.path = Some(v.clone());
    }
    if let Some(v) = &fit.format {
        c.data.format = Some(v.clone());
    }
    if let Some(v) = fit.iterations {
        c.sampler.iterations = v;
    }
    if let Some(v) = fit.burn_in {
        c.sampler.burn_in = v;
    }
    if let Some(v) = fit.thin {
        c.sampler.thin = v;
    }
    if let Some(v) = fit.chains {
        c.sampler.chains = v;
    }
    if let Some(v) = fit.dimensions {
        c.model.d = v;
    }
    if let Some(v) = fit.sigma2 {
        c.model.sigma2 = v;
    }
    if let Some(v) = fit.min_participation {
        c.filter.min_participation = v;
    }
    if fit.party {
        c.party.enabled = true;
    }
    if let Some(v) = fit.level {
        c.analysis.ci_level = v;
    }
    if let Some(v) = global.seed {
        c.sampler.seed = v;
    }
    if let Some(v) = &global.out {
        c.output.dir = v.clone();
    }
    Ok(c)
}

fn create_dir(dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))
}

fn median_rank(n: usize) -> usize {
    n.div_ceil(2)
}

/// Reads `legislator_id,group` with 0/1 groups.
fn read_group_file(path: &Path, matrix: &RollCallMatrix) -> Result<Vec<u8>> {
    let mut rdr = csv::Reader::from_path(path).map_err(|e| CliError::io(path, std::io::Error::other(e)))?;
    let mut by_id = HashMap::new();
    for (line, rec) in rdr.records().enumerate() {
        let rec = rec.map_err(|e| CliError::io(path, std::io::Error::other(e)))?;
        let bad = || CliError::Config(format!("{}: row {} must be `legislator_id,0|1`", path.display(), line + 2));
        if rec.len() != 2 {
            return Err(bad());
        }
        let g: u8 = rec[1].trim().parse().map_err(|_| bad())?;
        if g > 1 {
            return Err(bad());
        }
        by_id.insert(rec[0].trim().to_string(), g);
    }
    matrix
        .legislators()
        .iter()
        .map(|l| {
            by_id
                .get(&l.id)
                .copied()
                .ok_or_else(|| CliError::Config(format!("{} has no group for `{}`", path.display(), l.id)))
        })
        .collect()
}

fn group_vector(config: &RunConfig, matrix: &RollCallMatrix) -> Result<Vec<u8>> {
    match &config.party.group_file {
        Some(path) => read_group_file(path, matrix),
        None => Ok(group_indicator(matrix, &config.party.group_label)?),
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct DataSummary {
    pub n_before: usize,
    pub n_after: usize,
    pub m_before: usize,
    pub m_after: usize,
    pub dropped_legislators: usize,
    pub unanimous_motions: usize,
}

impl From<&FilterReport> for DataSummary {
    fn from(r: &FilterReport) -> Self {
        DataSummary {
            n_before: r.n_before,
            n_after: r.n_after,
            m_before: r.m_before,
            m_after: r.m_after,
            dropped_legislators: r.dropped_legislators.len(),
            unanimous_motions: r.unanimous_count(),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ConvergenceSummary {
    pub parameters: usize,
    pub rhat_below_1_1: usize,
    pub rhat_unavailable: usize,
    pub max_rhat: Option<f64>,
    pub min_ess: Option<f64>,
}

impl ConvergenceSummary {
    pub fn from_diagnostics(diag: &[Convergence]) -> Self {
        let rhats: Vec<f64> = diag.iter().filter_map(|c| c.rhat).collect();
        let ess: Vec<f64> = diag.iter().filter_map(|c| c.ess).collect();
        ConvergenceSummary {
            parameters: diag.len(),
            rhat_below_1_1: rhats.iter().filter(|r| **r < 1.1).count(),
            rhat_unavailable: diag.len() - rhats.len(),
            max_rhat: rhats.iter().copied().reduce(f64::max),
            min_ess: ess.iter().copied().reduce(f64::min),
        }
    }

    pub fn fraction_converged(&self) -> f64 {
        self.rhat_below_1_1 as f64 / self.parameters.max(1) as f64
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct PivotSummary {
    pub rank: usize,
    pub modal_legislator: String,
    pub probability: f64,
}

impl From<&PivotReport> for PivotSummary {
    fn from(r: &PivotReport) -> Self {
        let top = &r.occupancy[0];
        PivotSummary {
            rank: r.rank,
            modal_legislator: top.id.clone(),
            probability: top.probability,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct PpcSummary {
    pub statistic: String,
    pub observed: f64,
    pub p_value: f64,
    pub extreme: bool,
}

impl From<&PpcReport> for PpcSummary {
    fn from(r: &PpcReport) -> Self {
        PpcSummary {
            statistic: r.statistic.name().to_string(),
            observed: r.observed,
            p_value: r.p_value,
            extreme: r.is_extreme(),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct PartySummary {
    pub motions: usize,
    pub significant: usize,
    pub closed_votes: usize,
    pub significant_closed: usize,
}

impl From<&PartyEffectReport> for PartySummary {
    fn from(r: &PartyEffectReport) -> Self {
        PartySummary {
            motions: r.motions.len(),
            significant: r.significant,
            closed_votes: r.closed_votes,
            significant_closed: r.significant_closed,
        }
    }
}

/// Contents of `report.toml`.
#[derive(Debug, Clone, Serialize)]
pub struct FitReport {
    pub parameter_count: usize,
    pub retained_draws: usize,
    pub ci_level: f64,
    pub beta_mean_range: Vec<[f64; 2]>,
    pub data: DataSummary,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub discrimination: Option<DiscriminationReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub convergence: Option<ConvergenceSummary>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub pivots: Vec<PivotSummary>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub ppc: Vec<PpcSummary>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub party: Option<PartySummary>,
    pub notes: Vec<String>,
}

pub struct FitOutcome {
    pub out_dir: PathBuf,
    pub manifest: Manifest,
    pub report: FitReport,
}

fn beta_ranges(meta: &ideal_core::draws::DrawsMeta, summaries: &[ParameterSummary]) -> Vec<[f64; 2]> {
    (0..meta.d)
        .map(|k| {
            summaries
                .iter()
                .filter(|s| matches!(s.param, ParamIndex::Beta(_, kk) if kk == k))
                .fold([f64::INFINITY, f64::NEG_INFINITY], |[lo, hi], s| [lo.min(s.mean), hi.max(s.mean)])
        })
        .collect()
}

fn beta_ranges_from_means(draws: &PosteriorDraws) -> Vec<[f64; 2]> {
    let d = draws.meta.d;
    let means = draws.beta_mean();
    (0..d)
        .map(|k| {
            means
                .iter()
                .skip(k)
                .step_by(d)
                .fold([f64::INFINITY, f64::NEG_INFINITY], |[lo, hi], &v| [lo.min(v), hi.max(v)])
        })
        .collect()
}

/// Summaries, plot table and the discrimination count.
fn write_summaries(
    dir: &Path,
    draws: &PosteriorDraws,
    matrix: Option<&RollCallMatrix>,
    level: f64,
) -> Result<(Vec<ParameterSummary>, DiscriminationReport)> {
    let summaries = analytics::summarize(draws, level)?;
    output::write_summary(&dir.join("summary.csv"), &draws.meta, &summaries)?;
    output::write_ideal_points_plot(&dir.join("ideal_points_plot.csv"), &draws.meta, matrix, &summaries)?;
    let discrimination = discrimination_significance(&summaries);
    Ok((summaries, discrimination))
}

fn run_ppc(
    draws: &PosteriorDraws,
    matrix: &RollCallMatrix,
    statistics: &[PpcStatistic],
    replicates: usize,
    seed: u64,
) -> Result<Vec<PpcReport>> {
    let mut rng = chain_rng(seed, PPC_STREAM);
    Ok(posterior_predictive_check(draws, matrix, statistics, replicates, &mut rng)?)
}

/// load → filter → anchors → sampler → orient → summaries → diagnostics.
pub fn fit(global: &GlobalArgs, args: &FitArgs) -> Result<FitOutcome> {
    let config = effective_config(global, args)?;
    config.validate()?;
    let data_path = config.data_path()?.to_path_buf();
    let format = config.data_format()?;
    let out = config.output.dir.clone();

    let raw = load_roll_calls(&data_path, format)?;
    let (matrix, filter) = filter_matrix(&raw, config.filter.min_participation, config.filter.drop_unanimous)?;
    // Inputs are fingerprinted before anything is written so that a re-run
    // into the same directory can be compared with its predecessor.
    let data_sha = file_sha256(&data_path)?;
    let config_sha = config_digest(&config)?;
    let mut inputs = vec![data_sha.clone()];
    if let Some(g) = &config.party.group_file {
        inputs.push(file_sha256(g)?);
    }
    let run_sha = run_digest(&config_sha, &inputs.iter().map(String::as_str).collect::<Vec<_>>());
    let previous = Manifest::read(&out).ok();

    create_dir(&out)?;
    let file = std::fs::File::create(out.join(FILTERED_DATA_FILE)).map_err(|e| CliError::io(&out, e))?;
    matrix.write_csv(std::io::BufWriter::new(file))?;
    let filter_json = serde_json::to_string_pretty(&filter).map_err(|e| CliError::Config(e.to_string()))?;
    output::write_text(&out.join("filter_report.json"), &filter_json)?;

    let d = config.model.d;
    let hyper = default_hyperparameters(matrix.n(), d, config.model.sigma2)?;
    let anchors = config.anchor_spec();
    let sampler = config.sampler_config();
    let mut draws = if config.party.enabled {
        let group = group_vector(&config, &matrix)?;
        run_gibbs_party(&matrix, &hyper, &anchors, &group, &sampler, config.delta_prior())?
    } else {
        run_gibbs(&matrix, &hyper, &anchors, &sampler)?
    };
    if let Some(o) = &config.orientation {
        let notes = std::mem::take(&mut draws.notes);
        draws = orient_draws(&draws, &o.reference, &o.sign)?;
        draws.notes = notes;
    }
    for note in &draws.notes {
        log::warn!("{note}");
    }

    let draws_dir = out.join(DRAWS_DIR);
    draws.write_blocks(&draws_dir)?;
    let draws_sha = draws_digest(&draws_dir)?;

    let level = config.analysis.ci_level;
    let mut notes = draws.notes.clone();
    let (beta_mean_range, discrimination) = match write_summaries(&out, &draws, Some(&matrix), level) {
        Ok((summaries, discrimination)) => (beta_ranges(&draws.meta, &summaries), Some(discrimination)),
        Err(e) => {
            notes.push(format!("summaries skipped: {e}"));
            (beta_ranges_from_means(&draws), None)
        }
    };

    let convergence = match convergence_diagnostics(&draws) {
        Ok(diag) => {
            output::write_diagnostics(&out.join("diagnostics.csv"), &diag)?;
            Some(ConvergenceSummary::from_diagnostics(&diag))
        }
        Err(e) => {
            notes.push(format!("convergence diagnostics skipped: {e}"));
            None
        }
    };

    let mut pivots = Vec::new();
    if d == 1 {
        let ranks = if config.analysis.ranks.is_empty() {
            vec![median_rank(matrix.n())]
        } else {
            config.analysis.ranks.clone()
        };
        let reports = pivot_analysis(&draws, &ranks)?;
        output::write_pivots(&out.join("pivots.csv"), &reports)?;
        pivots = reports.iter().map(PivotSummary::from).collect();
    } else {
        notes.push("pivot analysis skipped: it needs a one-dimensional ordering".into());
    }

    let statistics = config.ppc_statistics()?;
    let ppc = match run_ppc(&draws, &matrix, &statistics, config.analysis.ppc_replicates, sampler.seed) {
        Ok(reports) => {
            output::write_ppc(&out.join("ppc.csv"), &reports)?;
            output::write_ppc_draws(&out.join("ppc_draws.csv"), &reports)?;
            reports.iter().map(PpcSummary::from).collect()
        }
        Err(e) => {
            notes.push(format!("posterior predictive check skipped: {e}"));
            Vec::new()
        }
    };

    let party = match config.party.enabled.then(|| party_effect_report(&draws, &matrix, level)) {
        Some(Ok(report)) => {
            output::write_party_effects(&out.join("party_effects.csv"), &report)?;
            Some(PartySummary::from(&report))
        }
        Some(Err(e)) => {
            notes.push(format!("party effects skipped: {e}"));
            None
        }
        None => None,
    };

    let previous_run = previous.map(|p| RerunCheck {
        identical_inputs: p.run_sha256 == run_sha,
        identical_draws: p.draws_sha256 == draws_sha,
    });
    if let Some(check) = previous_run {
        log::info!("{}", check.describe());
    }

    let report = FitReport {
        parameter_count: draws.meta.parameter_count(),
        retained_draws: draws.total_draws(),
        ci_level: level,
        beta_mean_range,
        data: DataSummary::from(&filter),
        discrimination,
        convergence,
        pivots,
        ppc,
        party,
        notes: notes.clone(),
    };
    output::write_toml(&out.join("report.toml"), &report)?;

    let manifest = Manifest {
        tool_version: env!("CARGO_PKG_VERSION").to_string(),
        seed: sampler.seed,
        data_path,
        data_sha256: data_sha,
        config_sha256: config_sha,
        run_sha256: run_sha,
        draws_sha256: draws_sha,
        parameter_count: draws.meta.parameter_count(),
        retained_draws_per_chain: draws.draws_per_chain(),
        wall_time_secs: draws.wall_time_secs,
        jitter_events: draws.jitter_events,
        notes,
        previous_run,
        config,
        draws: draws.meta.clone(),
    };
    manifest.write(&out)?;
    Ok(FitOutcome {
        out_dir: out,
        manifest,
        report,
    })
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map_or_else(|| "n/a".to_string(), |x| format!("{x:.3}"))
}

impl fmt::Display for FitOutcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let r = &self.report;
        let m = &self.manifest;
        writeln!(f, "wrote {}", self.out_dir.display())?;
        writeln!(
            f,
            "data: {}×{} after filtering (dropped legislators: {}, unanimous motions: {})",
            r.data.n_after, r.data.m_after, r.data.dropped_legislators, r.data.unanimous_motions
        )?;
        writeln!(
            f,
            "parameters: {}; retained draws: {} ({} per chain); {:.1}s",
            r.parameter_count, r.retained_draws, m.retained_draws_per_chain, m.wall_time_secs
        )?;
        for (k, [lo, hi]) in r.beta_mean_range.iter().enumerate() {
            writeln!(f, "ideal points, dimension {}: posterior means in [{lo:.3}, {hi:.3}]", k + 1)?;
        }
        if let Some(dr) = &r.discrimination {
            writeln!(
                f,
                "discriminating motions: {}/{} ({:.1}%)",
                dr.significant,
                dr.motions,
                100.0 * dr.fraction
            )?;
        }
        if let Some(c) = &r.convergence {
            writeln!(
                f,
                "convergence: R̂ < 1.1 for {}/{} parameters; max R̂ {}, min ESS {}",
                c.rhat_below_1_1,
                c.parameters,
                fmt_opt(c.max_rhat),
                fmt_opt(c.min_ess)
            )?;
        }
        for p in &r.pivots {
            writeln!(f, "pivot rank {}: {} (probability {:.3})", p.rank, p.modal_legislator, p.probability)?;
        }
        for p in &r.ppc {
            let flag = if p.extreme { " EXTREME" } else { "" };
            writeln!(f, "ppc {}: observed {:.4}, p = {:.3}{flag}", p.statistic, p.observed, p.p_value)?;
        }
        if let Some(p) = &r.party {
            writeln!(
                f,
                "party effects: {}/{} significant; {} of {} closed votes",
                p.significant, p.motions, p.significant_closed, p.closed_votes
            )?;
        }
        if let Some(check) = &m.previous_run {
            writeln!(f, "{}", check.describe())?;
        }
        for note in &r.notes {
            writeln!(f, "note: {note}")?;
        }
        Ok(())
    }
}

/// Where post-processing commands read from and write to.
fn locate(global: &GlobalArgs, run: &RunArgs) -> Result<(RunDir, PathBuf)> {
    let dir = match (&run.run, &global.out) {
        (Some(r), _) => r.clone(),
        (None, Some(o)) => o.clone(),
        (None, None) => base_config(global)?.output.dir,
    };
    let run_dir = RunDir::open(&dir)?;
    let out = global.out.clone().unwrap_or(dir);
    create_dir(&out)?;
    Ok((run_dir, out))
}

/// Analysis settings: the config file if given, else the run's own config.
fn analysis_config(global: &GlobalArgs, run: &RunDir) -> Result<RunConfig> {
    match &global.config {
        Some(_) => base_config(global),
        None => Ok(run.manifest.config.clone()),
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Recovery {
    /// Pearson correlation per dimension, over non-anchored legislators.
    pub correlation: Vec<f64>,
    /// The same after aligning each dimension's sign with the truth.
    pub sign_aligned_correlation: Vec<f64>,
    pub legislators: usize,
}

pub fn pearson(x: &[f64], y: &[f64]) -> f64 {
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

pub fn recovery(draws: &PosteriorDraws, truth: &HashMap<String, Vec<f64>>) -> Result<Recovery> {
    let meta = &draws.meta;
    let means = draws.beta_mean();
    let free: Vec<usize> = (0..meta.n)
        .filter(|&i| !meta.anchored[i] && truth.contains_key(&meta.legislator_ids[i]))
        .collect();
    if free.len() < 3 {
        return Err(CliError::Config(
            "the truth file shares fewer than 3 free legislators with the run".into(),
        ));
    }
    let mut correlation = Vec::with_capacity(meta.d);
    for k in 0..meta.d {
        let est: Vec<f64> = free.iter().map(|&i| means[i * meta.d + k]).collect();
        let tru = free
            .iter()
            .map(|&i| {
                let t = &truth[&meta.legislator_ids[i]];
                t.get(k).copied().ok_or_else(|| {
                    CliError::Config(format!("truth for `{}` lacks dimension {}", meta.legislator_ids[i], k + 1))
                })
            })
            .collect::<Result<Vec<f64>>>()?;
        correlation.push(pearson(&est, &tru));
    }
    Ok(Recovery {
        sign_aligned_correlation: correlation.iter().map(|r| r.abs()).collect(),
        correlation,
        legislators: free.len(),
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct SummaryOutcome {
    #[serde(skip)]
    pub out_dir: PathBuf,
    pub ci_level: f64,
    pub parameters: usize,
    pub beta_mean_range: Vec<[f64; 2]>,
    pub discrimination: DiscriminationReport,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub recovery: Option<Recovery>,
}

pub fn summarize(global: &GlobalArgs, args: &SummarizeArgs) -> Result<SummaryOutcome> {
    let (run, out) = locate(global, &args.run)?;
    let config = analysis_config(global, &run)?;
    let level = args.level.unwrap_or(config.analysis.ci_level);
    let draws = run.draws()?;
    let matrix = run.matrix().ok();
    let (summaries, discrimination) = write_summaries(&out, &draws, matrix.as_ref(), level)?;
    let recovery = match &args.truth {
        Some(path) => Some(recovery(&draws, &read_truth_beta(path)?)?),
        None => None,
    };
    let outcome = SummaryOutcome {
        out_dir: out.clone(),
        ci_level: level,
        parameters: summaries.len(),
        beta_mean_range: beta_ranges(&draws.meta, &summaries),
        discrimination,
        recovery,
    };
    output::write_toml(&out.join("summary_report.toml"), &outcome)?;
    if let Some(r) = &outcome.recovery {
        output::write_toml(&out.join("recovery.toml"), r)?;
    }
    Ok(outcome)
}

impl fmt::Display for SummaryOutcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "wrote summary.csv for {} parameters to {}", self.parameters, self.out_dir.display())?;
        for (k, [lo, hi]) in self.beta_mean_range.iter().enumerate() {
            writeln!(f, "ideal points, dimension {}: posterior means in [{lo:.3}, {hi:.3}]", k + 1)?;
        }
        writeln!(
            f,
            "discriminating motions at level {}: {}/{} ({:.1}%)",
            self.ci_level,
            self.discrimination.significant,
            self.discrimination.motions,
            100.0 * self.discrimination.fraction
        )?;
        if let Some(r) = &self.recovery {
            for (k, (raw, aligned)) in r.correlation.iter().zip(&r.sign_aligned_correlation).enumerate() {
                writeln!(
                    f,
                    "recovery correlation, dimension {}: {aligned:.4} (raw {raw:.4}, {} legislators)",
                    k + 1,
                    r.legislators
                )?;
            }
        }
        Ok(())
    }
}

pub struct PivotsOutcome {
    pub out_dir: PathBuf,
    pub reports: Vec<PivotReport>,
}

pub fn pivots(global: &GlobalArgs, args: &PivotsArgs) -> Result<PivotsOutcome> {
    let (run, out) = locate(global, &args.run)?;
    let config = analysis_config(global, &run)?;
    let draws = run.draws()?;
    let ranks = if !args.ranks.is_empty() {
        args.ranks.clone()
    } else if !config.analysis.ranks.is_empty() {
        config.analysis.ranks.clone()
    } else {
        vec![median_rank(draws.meta.n)]
    };
    let reports = pivot_analysis(&draws, &ranks)?;
    output::write_pivots(&out.join("pivots.csv"), &reports)?;
    Ok(PivotsOutcome { out_dir: out, reports })
}

impl fmt::Display for PivotsOutcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "wrote {}", self.out_dir.join("pivots.csv").display())?;
        for r in &self.reports {
            let top: Vec<String> = r
                .occupancy
                .iter()
                .take(3)
                .map(|o| format!("{} {:.3}", o.id, o.probability))
                .collect();
            writeln!(f, "rank {}: {}", r.rank, top.join(", "))?;
        }
        Ok(())
    }
}

pub struct PpcOutcome {
    pub out_dir: PathBuf,
    pub reports: Vec<PpcReport>,
}

pub fn ppc(global: &GlobalArgs, args: &PpcArgs) -> Result<PpcOutcome> {
    let (run, out) = locate(global, &args.run)?;
    let config = analysis_config(global, &run)?;
    let statistics = if args.statistics.is_empty() {
        config.ppc_statistics()?
    } else {
        analytics::parse_statistics(&args.statistics)?
    };
    let replicates = args.replicates.unwrap_or(config.analysis.ppc_replicates);
    let seed = global.seed.unwrap_or(run.manifest.seed);
    let matrix = match &args.data {
        Some(path) => load_roll_calls(path, ideal_core::data::DataFormat::from_path(path))?,
        None => run.matrix()?,
    };
    let draws = run.draws()?;
    let reports = run_ppc(&draws, &matrix, &statistics, replicates, seed)?;
    output::write_ppc(&out.join("ppc.csv"), &reports)?;
    output::write_ppc_draws(&out.join("ppc_draws.csv"), &reports)?;
    Ok(PpcOutcome { out_dir: out, reports })
}

impl fmt::Display for PpcOutcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "wrote {}", self.out_dir.join("ppc.csv").display())?;
        for r in &self.reports {
            let flag = if r.is_extreme() { " EXTREME" } else { "" };
            writeln!(f, "{}: observed {:.4}, p = {:.3}{flag}", r.statistic, r.observed, r.p_value)?;
        }
        Ok(())
    }
}

pub struct DiagnoseOutcome {
    pub out_dir: PathBuf,
    pub summary: ConvergenceSummary,
    pub worst: Vec<Convergence>,
}

pub fn diagnose(global: &GlobalArgs, args: &RunArgs) -> Result<DiagnoseOutcome> {
    let (run, out) = locate(global, args)?;
    let draws = run.draws()?;
    let diag = convergence_diagnostics(&draws)?;
    output::write_diagnostics(&out.join("diagnostics.csv"), &diag)?;
    let summary = ConvergenceSummary::from_diagnostics(&diag);
    let mut worst: Vec<Convergence> = diag.into_iter().filter(|c| c.rhat.is_some()).collect();
    worst.sort_by(|a, b| b.rhat.unwrap().total_cmp(&a.rhat.unwrap()));
    worst.truncate(5);
    Ok(DiagnoseOutcome {
        out_dir: out,
        summary,
        worst,
    })
}

impl fmt::Display for DiagnoseOutcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = &self.summary;
        writeln!(f, "wrote {}", self.out_dir.join("diagnostics.csv").display())?;
        writeln!(
            f,
            "R̂ < 1.1 for {}/{} parameters ({:.1}%); max R̂ {}, min ESS {}",
            s.rhat_below_1_1,
            s.parameters,
            100.0 * s.fraction_converged(),
            fmt_opt(s.max_rhat),
            fmt_opt(s.min_ess)
        )?;
        for c in &self.worst {
            writeln!(f, "  {}: R̂ {}, ESS {}", c.label, fmt_opt(c.rhat), fmt_opt(c.ess))?;
        }
        Ok(())
    }
}

/// Files written by `simulate`.
pub const SIM_VOTES: &str = "votes.csv";
pub const SIM_CONFIG: &str = "run.toml";

#[derive(Debug, Clone, Serialize)]
struct SimulationRecord<'a> {
    tool_version: &'static str,
    spec: &'a SynthSpec,
    party: bool,
    regenerated: usize,
    votes_sha256: String,
}

pub struct SimulateOutcome {
    pub out_dir: PathBuf,
    pub n: usize,
    pub m: usize,
    pub regenerated: usize,
}

/// Party simulations use alternating groups and δ cycling through -2, 0, 2.
pub fn party_pattern(n: usize, m: usize) -> (Vec<u8>, Vec<f64>) {
    let group = (0..n).map(|i| (i % 2) as u8).collect();
    let delta = (0..m).map(|j| [-2.0, 0.0, 2.0][j % 3]).collect();
    (group, delta)
}

pub fn simulate_cmd(global: &GlobalArgs, args: &SimulateArgs) -> Result<SimulateOutcome> {
    let spec = SynthSpec {
        n: args.n,
        m: args.m,
        d: args.dimensions,
        alpha_scale: args.alpha_scale,
        mu_scale: args.mu_scale,
        missing_rate: args.missing_rate,
        zero_alpha_fraction: args.zero_alpha_fraction,
        seed: global.seed.unwrap_or(1),
    };
    let out = match &global.out {
        Some(o) => o.clone(),
        None => base_config(global)?.output.dir,
    };
    let data = if args.party {
        let (group, delta) = party_pattern(spec.n, spec.m);
        simulate_party(&spec, &group, &delta)?
    } else {
        simulate(&spec)?
    };
    create_dir(&out)?;
    let votes = out.join(SIM_VOTES);
    let file = std::fs::File::create(&votes).map_err(|e| CliError::io(&votes, e))?;
    data.matrix.write_csv(std::io::BufWriter::new(file))?;
    write_truth(&out, &data)?;

    // A ready-to-run config: anchors at -1 and +1 (and +e_k) on the
    // legislators whose true positions are nearest.
    let mut config = RunConfig::default();
    config.data.path = Some(PathBuf::from(SIM_VOTES));
    config.model.d = spec.d;
    config.filter.min_participation = 0.0;
    config.anchors = anchors_near_truth(&data, &default_anchor_targets(spec.d))
        .anchors
        .into_iter()
        .map(|a| AnchorEntry {
            id: a.id,
            position: a.position,
        })
        .collect();
    config.party.enabled = args.party;
    config.output.dir = PathBuf::from("fit");
    output::write_text(&out.join(SIM_CONFIG), &config.to_toml()?)?;

    let record = SimulationRecord {
        tool_version: env!("CARGO_PKG_VERSION"),
        spec: &spec,
        party: args.party,
        regenerated: data.regenerated,
        votes_sha256: file_sha256(&votes)?,
    };
    output::write_toml(&out.join("simulation.toml"), &record)?;
    Ok(SimulateOutcome {
        out_dir: out,
        n: spec.n,
        m: spec.m,
        regenerated: data.regenerated,
    })
}

impl fmt::Display for SimulateOutcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "wrote a {}×{} matrix, true parameters and {} to {}",
            self.n,
            self.m,
            SIM_CONFIG,
            self.out_dir.display()
        )?;
        if self.regenerated > 0 {
            writeln!(f, "{} degenerate rows or columns were redrawn", self.regenerated)?;
        }
        writeln!(f, "next: ideal fit --config {}", self.out_dir.join(SIM_CONFIG).display())
    }
}
