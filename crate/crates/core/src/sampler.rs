//! Gibbs sampler with probit data augmentation.
//!
//! Every observed vote gets a latent utility difference `z_ij ~ N(η_ij, 1)`
//! constrained to be positive for a yea and non-positive for a nay, where
//! `η_ij = μ_j + α_j·β_i`. Given the latents, `(μ_j, α_j)` and `β_i` have
//! Gaussian full conditionals (Bayesian linear regressions with unit noise),
//! so one sweep is:
//!
//! 1. draw every observed `z_ij` from its truncated normal;
//! 2. for each motion, regress `z_·j` on rows `(1, β_i)` and draw
//!    `(μ_j, α_j) ~ N(c_j, C)`, `C = (A⁻¹ + EᵀE)⁻¹`,
//!    `c_j = C(A⁻¹a + Eᵀz_·j)`;
//! 3. for each free legislator, regress `z_i· − μ` on rows `α_j` and draw
//!    `β_i ~ N(d_i, D_i)`, `D_i = (B_i⁻¹ + FᵀF)⁻¹`,
//!    `d_i = D_i(B_i⁻¹b_i + Fᵀ(z_i· − μ))`.
//!
//! Missing votes are skipped throughout: they carry no latent and drop out of
//! both regressions. Anchored legislators keep their fixed position.
//!
//! Chains use independent ChaCha8 streams (`seed`, stream = chain index), so
//! results do not depend on how many threads run them.

use std::time::Instant;

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::data::{RollCallMatrix, Vote};
use crate::draws::{ChainDraws, DrawsMeta, PosteriorDraws};
use crate::error::{Error, Result};
use crate::identify::{validate_anchors, AnchorSpec, ResolvedAnchors};
use crate::model::{dot, Hyperparameters, ModelParameters};
use crate::truncnorm::{self, Side};

pub use crate::truncnorm::sample_truncated_normal;

/// Retained-draw count below which a warning is emitted.
pub const MIN_RECOMMENDED_DRAWS: usize = 100;

/// Scale of the noise added to the prior mean when initializing β.
const INIT_SCALE: f64 = 0.1;

const JITTER: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SamplerConfig {
    pub iterations: usize,
    pub burn_in: usize,
    pub thin: usize,
    pub chains: usize,
    pub seed: u64,
    pub d: usize,
}

impl Default for SamplerConfig {
    fn default() -> Self {
        SamplerConfig {
            iterations: 25_000,
            burn_in: 5_000,
            thin: 10,
            chains: 2,
            seed: 1,
            d: 1,
        }
    }
}

impl SamplerConfig {
    pub fn retained_per_chain(&self) -> usize {
        if self.thin == 0 {
            return 0;
        }
        self.iterations.saturating_sub(self.burn_in) / self.thin
    }

    /// Returns warnings; zero retained draws is an error.
    pub fn validate(&self) -> Result<Vec<String>> {
        if self.iterations == 0 || self.thin == 0 || self.chains == 0 || self.d == 0 {
            return Err(Error::validation(
                "iterations, thin, chains and d must all be positive",
            ));
        }
        let retained = self.retained_per_chain();
        if retained == 0 {
            return Err(Error::validation(format!(
                "no draws retained: iterations={}, burn_in={}, thin={}",
                self.iterations, self.burn_in, self.thin
            )));
        }
        let mut warnings = Vec::new();
        if retained < MIN_RECOMMENDED_DRAWS {
            let msg = format!("only {retained} retained draws per chain (recommended ≥ {MIN_RECOMMENDED_DRAWS})");
            log::warn!("{msg}");
            warnings.push(msg);
        }
        Ok(warnings)
    }
}

/// The random stream for one chain.
pub fn chain_rng(seed: u64, chain: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(chain as u64);
    rng
}

/// Latent utilities for the observed cells of an n × m matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct LatentGrid {
    n: usize,
    m: usize,
    // NaN marks a missing vote.
    values: Vec<f64>,
}

impl LatentGrid {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn get(&self, i: usize, j: usize) -> Option<f64> {
        let v = self.values[i * self.m + j];
        (!v.is_nan()).then_some(v)
    }

    /// Builds a grid from explicit values; `None` marks a missing cell.
    pub fn from_cells(n: usize, m: usize, cells: &[Option<f64>]) -> Result<Self> {
        if cells.len() != n * m {
            return Err(Error::validation("latent grid has the wrong number of cells"));
        }
        Ok(LatentGrid {
            n,
            m,
            values: cells.iter().map(|c| c.unwrap_or(f64::NAN)).collect(),
        })
    }

    fn empty(n: usize, m: usize) -> Self {
        LatentGrid {
            n,
            m,
            values: vec![f64::NAN; n * m],
        }
    }

    #[inline]
    fn raw(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.m + j]
    }
}

/// Step 2(a): fresh latents for every observed vote.
pub fn update_latents<R: Rng + ?Sized>(
    matrix: &RollCallMatrix,
    params: &ModelParameters,
    rng: &mut R,
) -> Result<LatentGrid> {
    params.check_shape(matrix)?;
    let mut grid = LatentGrid::empty(matrix.n(), matrix.m());
    fill_latents(&mut grid, matrix, |i, j| params.linear_predictor(i, j), rng);
    Ok(grid)
}

fn fill_latents<R: Rng + ?Sized>(
    grid: &mut LatentGrid,
    matrix: &RollCallMatrix,
    eta: impl Fn(usize, usize) -> f64,
    rng: &mut R,
) {
    let m = matrix.m();
    for i in 0..matrix.n() {
        for (j, vote) in matrix.row(i).iter().enumerate() {
            grid.values[i * m + j] = match vote {
                Vote::Yea => truncnorm::draw(eta(i, j), Side::Positive, rng),
                Vote::Nay => truncnorm::draw(eta(i, j), Side::NonPositive, rng),
                Vote::Missing => f64::NAN,
            };
        }
    }
}

/// Prior for the per-motion regression coefficients, in precision form.
#[derive(Debug, Clone)]
pub(crate) struct ItemPrior {
    precision: DMatrix<f64>,
    shift: DVector<f64>,
}

impl ItemPrior {
    /// `(μ_j, α_j) ~ N(a, A)`, optionally extended by an independent
    /// `δ_j ~ N(mean, variance)` coefficient.
    pub(crate) fn new(hyper: &Hyperparameters, delta_prior: Option<(f64, f64)>) -> Result<Self> {
        let base = hyper
            .item_cov
            .clone()
            .try_inverse()
            .ok_or_else(|| Error::LinearAlgebra("item prior covariance is singular".into()))?;
        let k = base.nrows() + usize::from(delta_prior.is_some());
        let mut precision = DMatrix::zeros(k, k);
        precision.view_mut((0, 0), base.shape()).copy_from(&base);
        let mut mean = DVector::zeros(k);
        mean.rows_mut(0, base.nrows()).copy_from(&hyper.item_mean);
        if let Some((dm, dv)) = delta_prior {
            precision[(k - 1, k - 1)] = 1.0 / dv;
            mean[k - 1] = dm;
        }
        let shift = &precision * mean;
        Ok(ItemPrior { precision, shift })
    }
}

#[derive(Debug, Clone)]
pub(crate) struct IdealPrior {
    precision: Vec<DMatrix<f64>>,
    shift: Vec<DVector<f64>>,
}

impl IdealPrior {
    pub(crate) fn new(hyper: &Hyperparameters) -> Result<Self> {
        let mut precision = Vec::with_capacity(hyper.n());
        let mut shift = Vec::with_capacity(hyper.n());
        for (b, cov) in hyper.ideal_means.iter().zip(&hyper.ideal_covs) {
            let p = cov
                .clone()
                .try_inverse()
                .ok_or_else(|| Error::LinearAlgebra("ideal-point prior covariance is singular".into()))?;
            shift.push(&p * b);
            precision.push(p);
        }
        Ok(IdealPrior { precision, shift })
    }
}

/// Draws from `N(P⁻¹s, P⁻¹)` via the Cholesky factor `P = LLᵀ`:
/// `x = P⁻¹s + L⁻ᵀw` with `w` standard normal.
fn draw_from_precision<R: Rng + ?Sized>(
    precision: DMatrix<f64>,
    shift: &DVector<f64>,
    rng: &mut R,
    jitter_events: &mut usize,
) -> Result<DVector<f64>> {
    let k = precision.nrows();
    let chol = match precision.clone().cholesky() {
        Some(c) => c,
        None => {
            *jitter_events += 1;
            log::warn!("precision matrix not positive definite; adding {JITTER:e} to the diagonal");
            (precision + DMatrix::identity(k, k) * JITTER)
                .cholesky()
                .ok_or_else(|| Error::LinearAlgebra("precision matrix is not positive definite".into()))?
        }
    };
    let mean = chol.solve(shift);
    let w = DVector::from_fn(k, |_, _| rng.sample::<f64, _>(StandardNormal));
    let noise = chol
        .l_dirty()
        .tr_solve_lower_triangular(&w)
        .ok_or_else(|| Error::LinearAlgebra("singular Cholesky factor".into()))?;
    Ok(mean + noise)
}

/// Regression coefficients drawn for every motion in one sweep.
pub(crate) struct ItemDraw {
    pub mu: Vec<f64>,
    pub alpha: Vec<f64>,
    pub delta: Option<Vec<f64>>,
}

pub(crate) fn item_step<R: Rng + ?Sized>(
    latents: &LatentGrid,
    beta: &[f64],
    d: usize,
    group: Option<&[f64]>,
    prior: &ItemPrior,
    rng: &mut R,
    jitter_events: &mut usize,
) -> Result<ItemDraw> {
    let (n, m) = (latents.n, latents.m);
    let k = prior.shift.len();
    let mut mu = vec![0.0; m];
    let mut alpha = vec![0.0; m * d];
    let mut delta = group.map(|_| vec![0.0; m]);
    let mut row = vec![0.0; k];
    for j in 0..m {
        let mut precision = prior.precision.clone();
        let mut shift = prior.shift.clone();
        for i in 0..n {
            let z = latents.raw(i, j);
            if z.is_nan() {
                continue;
            }
            row[0] = 1.0;
            row[1..=d].copy_from_slice(&beta[i * d..(i + 1) * d]);
            if let Some(g) = group {
                row[d + 1] = g[i];
            }
            for r in 0..k {
                shift[r] += row[r] * z;
                for c in 0..=r {
                    precision[(r, c)] += row[r] * row[c];
                }
            }
        }
        for r in 0..k {
            for c in 0..r {
                precision[(c, r)] = precision[(r, c)];
            }
        }
        let coef = draw_from_precision(precision, &shift, rng, jitter_events)?;
        mu[j] = coef[0];
        for c in 0..d {
            alpha[j * d + c] = coef[1 + c];
        }
        if let Some(dl) = delta.as_mut() {
            dl[j] = coef[d + 1];
        }
    }
    Ok(ItemDraw { mu, alpha, delta })
}

/// Step 2(b): draw `(μ_j, α_j)` for every motion.
pub fn update_item_parameters<R: Rng + ?Sized>(
    latents: &LatentGrid,
    beta: &[f64],
    hyper: &Hyperparameters,
    rng: &mut R,
) -> Result<(Vec<f64>, Vec<f64>)> {
    let d = hyper.d();
    if beta.len() != latents.n * d {
        return Err(Error::validation("beta does not match the latent grid"));
    }
    let prior = ItemPrior::new(hyper, None)?;
    let mut jitter = 0;
    let draw = item_step(latents, beta, d, None, &prior, rng, &mut jitter)?;
    Ok((draw.mu, draw.alpha))
}

/// Per-legislator offset subtracted from the latents before the β regression
/// (the `δ_j D_i` term of the party model).
pub(crate) struct Offset<'a> {
    pub delta: &'a [f64],
    pub group: &'a [f64],
}

#[allow(clippy::too_many_arguments)]
pub(crate) fn ideal_step<R: Rng + ?Sized>(
    latents: &LatentGrid,
    mu: &[f64],
    alpha: &[f64],
    d: usize,
    offset: Option<&Offset<'_>>,
    prior: &IdealPrior,
    anchors: &ResolvedAnchors,
    rng: &mut R,
    jitter_events: &mut usize,
) -> Result<Vec<f64>> {
    let (n, m) = (latents.n, latents.m);
    let mut beta = vec![0.0; n * d];
    for i in 0..n {
        if let Some(pos) = anchors.position(i) {
            beta[i * d..(i + 1) * d].copy_from_slice(pos);
            continue;
        }
        let mut precision = prior.precision[i].clone();
        let mut shift = prior.shift[i].clone();
        for j in 0..m {
            let z = latents.raw(i, j);
            if z.is_nan() {
                continue;
            }
            let mut resid = z - mu[j];
            if let Some(off) = offset {
                resid -= off.delta[j] * off.group[i];
            }
            let a = &alpha[j * d..(j + 1) * d];
            for r in 0..d {
                shift[r] += a[r] * resid;
                for c in 0..=r {
                    precision[(r, c)] += a[r] * a[c];
                }
            }
        }
        for r in 0..d {
            for c in 0..r {
                precision[(c, r)] = precision[(r, c)];
            }
        }
        let b = draw_from_precision(precision, &shift, rng, jitter_events)?;
        beta[i * d..(i + 1) * d].copy_from_slice(b.as_slice());
    }
    Ok(beta)
}

/// Step 2(c): draw `β_i` for every non-anchored legislator.
pub fn update_ideal_points<R: Rng + ?Sized>(
    latents: &LatentGrid,
    mu: &[f64],
    alpha: &[f64],
    hyper: &Hyperparameters,
    anchors: &ResolvedAnchors,
    rng: &mut R,
) -> Result<Vec<f64>> {
    let d = hyper.d();
    if mu.len() != latents.m || alpha.len() != latents.m * d {
        return Err(Error::validation("item parameters do not match the latent grid"));
    }
    if hyper.n() != latents.n || anchors.n() != latents.n {
        return Err(Error::validation("priors or anchors do not match the latent grid"));
    }
    let prior = IdealPrior::new(hyper)?;
    let mut jitter = 0;
    ideal_step(latents, mu, alpha, d, None, &prior, anchors, rng, &mut jitter)
}

/// A fully validated sampling problem.
pub(crate) struct Problem<'a> {
    pub matrix: &'a RollCallMatrix,
    pub d: usize,
    pub item_prior: ItemPrior,
    pub ideal_prior: IdealPrior,
    pub ideal_means: Vec<DVector<f64>>,
    pub anchors: ResolvedAnchors,
    /// Group indicator for the party model.
    pub group: Option<Vec<f64>>,
}

impl<'a> Problem<'a> {
    pub(crate) fn new(
        matrix: &'a RollCallMatrix,
        hyper: &Hyperparameters,
        anchors: &AnchorSpec,
        config: &SamplerConfig,
        group: Option<Vec<f64>>,
        delta_prior: Option<(f64, f64)>,
    ) -> Result<Self> {
        config.validate()?;
        hyper.validate()?;
        if hyper.d() != config.d {
            return Err(Error::validation(format!(
                "hyperparameters are {}-dimensional, config asks for d={}",
                hyper.d(),
                config.d
            )));
        }
        if hyper.n() != matrix.n() {
            return Err(Error::validation(format!(
                "hyperparameters cover {} legislators, matrix has {}",
                hyper.n(),
                matrix.n()
            )));
        }
        check_filtered(matrix)?;
        let validation = validate_anchors(matrix, anchors, config.d)?;
        Ok(Problem {
            matrix,
            d: config.d,
            item_prior: ItemPrior::new(hyper, delta_prior)?,
            ideal_prior: IdealPrior::new(hyper)?,
            ideal_means: hyper.ideal_means.clone(),
            anchors: validation.resolved,
            group,
        })
    }

    fn meta(&self, config: &SamplerConfig) -> DrawsMeta {
        DrawsMeta {
            n: self.matrix.n(),
            m: self.matrix.m(),
            d: self.d,
            legislator_ids: self.matrix.legislators().iter().map(|l| l.id.clone()).collect(),
            motion_ids: self.matrix.motions().iter().map(|mo| mo.id.clone()).collect(),
            anchored: self.anchors.anchored_flags(),
            config: config.clone(),
            group: self.group.as_ref().map(|g| g.iter().map(|&x| x as u8).collect()),
        }
    }
}

/// Rejects matrices with empty rows, empty columns or unanimous columns.
pub fn check_filtered(matrix: &RollCallMatrix) -> Result<()> {
    for i in 0..matrix.n() {
        if matrix.legislator_observed(i) == 0 {
            return Err(Error::validation(format!(
                "legislator `{}` has no observed votes; filter the matrix first",
                matrix.legislators()[i].id
            )));
        }
    }
    for j in 0..matrix.m() {
        let (yea, nay) = matrix.motion_tally(j);
        if yea == 0 || nay == 0 {
            return Err(Error::validation(format!(
                "motion `{}` is empty or unanimous; filter the matrix first",
                matrix.motions()[j].id
            )));
        }
    }
    Ok(())
}

struct ChainState {
    mu: Vec<f64>,
    alpha: Vec<f64>,
    beta: Vec<f64>,
    delta: Option<Vec<f64>>,
}

fn initial_state<R: Rng + ?Sized>(problem: &Problem<'_>, rng: &mut R) -> ChainState {
    let (n, m, d) = (problem.matrix.n(), problem.matrix.m(), problem.d);
    let mut beta = vec![0.0; n * d];
    for i in 0..n {
        for k in 0..d {
            let noise: f64 = rng.sample(StandardNormal);
            beta[i * d + k] = problem.ideal_means[i][k] + INIT_SCALE * noise;
        }
        if let Some(pos) = problem.anchors.position(i) {
            beta[i * d..(i + 1) * d].copy_from_slice(pos);
        }
    }
    ChainState {
        mu: vec![0.0; m],
        alpha: vec![0.0; m * d],
        beta,
        delta: problem.group.as_ref().map(|_| vec![0.0; m]),
    }
}

fn run_chain(
    problem: &Problem<'_>,
    config: &SamplerConfig,
    chain: usize,
    init: Option<&ModelParameters>,
) -> Result<(ChainDraws, usize)> {
    let mut rng = chain_rng(config.seed, chain);
    let mut state = initial_state(problem, &mut rng);
    if let Some(p) = init {
        p.check_shape(problem.matrix)?;
        state.mu.clone_from(&p.mu);
        state.alpha.clone_from(&p.alpha);
        state.beta.clone_from(&p.beta);
        for i in 0..problem.matrix.n() {
            if let Some(pos) = problem.anchors.position(i) {
                state.beta[i * problem.d..(i + 1) * problem.d].copy_from_slice(pos);
            }
        }
    }

    let (n, m, d) = (problem.matrix.n(), problem.matrix.m(), problem.d);
    let retained = config.retained_per_chain();
    let mut out = ChainDraws {
        iterations: Vec::with_capacity(retained),
        mu: Vec::with_capacity(retained * m),
        alpha: Vec::with_capacity(retained * m * d),
        beta: Vec::with_capacity(retained * n * d),
        delta: problem.group.as_ref().map(|_| Vec::with_capacity(retained * m)),
    };
    let mut latents = LatentGrid::empty(n, m);
    let mut jitter = 0usize;
    let group = problem.group.as_deref();

    for sweep in 1..=config.iterations {
        {
            let s = &state;
            fill_latents(
                &mut latents,
                problem.matrix,
                |i, j| {
                    let mut eta =
                        s.mu[j] + dot(&s.alpha[j * d..(j + 1) * d], &s.beta[i * d..(i + 1) * d]);
                    if let (Some(g), Some(dl)) = (group, s.delta.as_ref()) {
                        eta += dl[j] * g[i];
                    }
                    eta
                },
                &mut rng,
            );
        }
        let items = item_step(
            &latents,
            &state.beta,
            d,
            group,
            &problem.item_prior,
            &mut rng,
            &mut jitter,
        )?;
        state.mu = items.mu;
        state.alpha = items.alpha;
        state.delta = items.delta;
        let offset = match (group, state.delta.as_deref()) {
            (Some(g), Some(dl)) => Some(Offset { delta: dl, group: g }),
            _ => None,
        };
        state.beta = ideal_step(
            &latents,
            &state.mu,
            &state.alpha,
            d,
            offset.as_ref(),
            &problem.ideal_prior,
            &problem.anchors,
            &mut rng,
            &mut jitter,
        )?;

        if sweep > config.burn_in && (sweep - config.burn_in) % config.thin == 0 {
            out.iterations.push(sweep);
            out.mu.extend_from_slice(&state.mu);
            out.alpha.extend_from_slice(&state.alpha);
            out.beta.extend_from_slice(&state.beta);
            if let (Some(dst), Some(src)) = (out.delta.as_mut(), state.delta.as_ref()) {
                dst.extend_from_slice(src);
            }
        }
    }
    Ok((out, jitter))
}

pub(crate) fn run_problem(
    problem: &Problem<'_>,
    config: &SamplerConfig,
    inits: Option<&[ModelParameters]>,
) -> Result<PosteriorDraws> {
    if let Some(inits) = inits {
        if inits.len() != config.chains {
            return Err(Error::validation(format!(
                "{} initial states for {} chains",
                inits.len(),
                config.chains
            )));
        }
    }
    let start = Instant::now();
    let results: Vec<Result<(ChainDraws, usize)>> = (0..config.chains)
        .into_par_iter()
        .map(|c| run_chain(problem, config, c, inits.map(|s| &s[c])))
        .collect();
    let mut chains = Vec::with_capacity(config.chains);
    let mut jitter_events = 0;
    for r in results {
        let (chain, jitter) = r?;
        chains.push(chain);
        jitter_events += jitter;
    }
    let wall_time_secs = start.elapsed().as_secs_f64();
    log::info!(
        "sampled {} chain(s) × {} sweeps in {:.1}s",
        config.chains,
        config.iterations,
        wall_time_secs
    );
    let mut notes = Vec::new();
    if jitter_events > 0 {
        notes.push(format!("diagonal jitter applied {jitter_events} time(s)"));
    }
    Ok(PosteriorDraws {
        meta: problem.meta(config),
        chains,
        wall_time_secs,
        jitter_events,
        notes,
    })
}

/// Runs `config.chains` independent Gibbs chains.
pub fn run_gibbs(
    matrix: &RollCallMatrix,
    hyper: &Hyperparameters,
    anchors: &AnchorSpec,
    config: &SamplerConfig,
) -> Result<PosteriorDraws> {
    let problem = Problem::new(matrix, hyper, anchors, config, None, None)?;
    run_problem(&problem, config, None)
}

/// Like [`run_gibbs`] but starts chain `c` from `inits[c]` (anchors still
/// override the initial β of anchored legislators).
pub fn run_gibbs_from(
    matrix: &RollCallMatrix,
    hyper: &Hyperparameters,
    anchors: &AnchorSpec,
    config: &SamplerConfig,
    inits: &[ModelParameters],
) -> Result<PosteriorDraws> {
    let problem = Problem::new(matrix, hyper, anchors, config, None, None)?;
    run_problem(&problem, config, Some(inits))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::{LegislatorMeta, MotionMeta};
    use crate::identify::Anchor;
    use crate::model::default_hyperparameters;
    use crate::normal;

    fn matrix(rows: Vec<Vec<Vote>>) -> RollCallMatrix {
        let n = rows.len();
        let m = rows[0].len();
        RollCallMatrix::from_rows(
            (0..n).map(|i| LegislatorMeta::new(format!("L{i}"))).collect(),
            (0..m).map(|j| MotionMeta::new(format!("M{j}"))).collect(),
            rows,
        )
        .unwrap()
    }

    fn toy() -> RollCallMatrix {
        use Vote::*;
        matrix(vec![
            vec![Yea, Nay, Yea, Nay],
            vec![Nay, Yea, Yea, Missing],
            vec![Yea, Yea, Nay, Nay],
            vec![Nay, Nay, Nay, Yea],
        ])
    }

    fn config(chains: usize) -> SamplerConfig {
        SamplerConfig {
            iterations: 400,
            burn_in: 100,
            thin: 3,
            chains,
            seed: 99,
            d: 1,
        }
    }

    /// Gaussian elimination with partial pivoting.
    fn dense_solve(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Vec<f64> {
        let k = b.len();
        for c in 0..k {
            let p = (c..k).max_by(|&x, &y| a[x][c].abs().total_cmp(&a[y][c].abs())).unwrap();
            a.swap(c, p);
            b.swap(c, p);
            for r in c + 1..k {
                let f = a[r][c] / a[c][c];
                for cc in c..k {
                    a[r][cc] -= f * a[c][cc];
                }
                b[r] -= f * b[c];
            }
        }
        let mut x = vec![0.0; k];
        for r in (0..k).rev() {
            let s: f64 = (r + 1..k).map(|c| a[r][c] * x[c]).sum();
            x[r] = (b[r] - s) / a[r][r];
        }
        x
    }

    #[test]
    fn latents_respect_vote_signs() {
        use Vote::*;
        let m = matrix(vec![vec![Yea, Nay], vec![Missing, Missing], vec![Nay, Yea]]);
        let params = ModelParameters::new(1, vec![3.0, -3.0], vec![1.0, 2.0], vec![-2.0, 0.0, 2.0]).unwrap();
        let mut rng = chain_rng(1, 0);
        for _ in 0..200 {
            let z = update_latents(&m, &params, &mut rng).unwrap();
            assert!(z.get(0, 0).unwrap() > 0.0);
            assert!(z.get(0, 1).unwrap() <= 0.0);
            assert!(z.get(2, 0).unwrap() <= 0.0);
            assert!(z.get(2, 1).unwrap() > 0.0);
            assert_eq!((z.get(1, 0), z.get(1, 1)), (None, None));
        }
    }

    #[test]
    fn item_update_matches_ridge_solution() {
        let z = LatentGrid::from_cells(2, 1, &[Some(0.5), Some(1.5)]).unwrap();
        let beta = [1.0, -1.0];
        let hyper = default_hyperparameters(2, 1, 25.0).unwrap();
        // (A⁻¹ + EᵀE) c = Eᵀz with E = [[1, 1], [1, -1]].
        let want = dense_solve(
            vec![vec![0.04 + 2.0, 0.0], vec![0.0, 0.04 + 2.0]],
            vec![0.5 + 1.5, 0.5 - 1.5],
        );
        let mut rng = chain_rng(2, 0);
        let draws = 40_000;
        let (mut mu, mut alpha) = (0.0, 0.0);
        for _ in 0..draws {
            let (m, a) = update_item_parameters(&z, &beta, &hyper, &mut rng).unwrap();
            mu += m[0];
            alpha += a[0];
        }
        let se = (1.0 / 2.04f64 / draws as f64).sqrt();
        assert!((mu / draws as f64 - want[0]).abs() < 4.0 * se);
        assert!((alpha / draws as f64 - want[1]).abs() < 4.0 * se);
    }

    #[test]
    fn vague_item_prior_gives_least_squares() {
        let beta = [0.5, 1.5, -1.0];
        let hyper = default_hyperparameters(3, 1, 1e12).unwrap();
        let prior = ItemPrior::new(&hyper, None).unwrap();
        // Normal equations of the unpenalized fit.
        let sb: f64 = beta.iter().sum();
        let sbb: f64 = beta.iter().map(|b| b * b).sum();
        let sz = 0.2 + 1.1 - 0.4;
        let szb = 0.2 * 0.5 + 1.1 * 1.5 + 0.4;
        let ols = dense_solve(vec![vec![3.0, sb], vec![sb, sbb]], vec![sz, szb]);
        let mut precision = prior.precision.clone();
        precision[(0, 0)] += 3.0;
        precision[(0, 1)] += sb;
        precision[(1, 0)] += sb;
        precision[(1, 1)] += sbb;
        let mean = precision.cholesky().unwrap().solve(&(prior.shift + DVector::from_vec(vec![sz, szb])));
        assert!((mean[0] - ols[0]).abs() < 1e-9 && (mean[1] - ols[1]).abs() < 1e-9);
    }

    #[test]
    fn ideal_update_conjugate_mean() {
        let z = LatentGrid::from_cells(2, 2, &[Some(0.5), Some(1.5), Some(0.1), Some(-0.1)]).unwrap();
        let hyper = default_hyperparameters(2, 1, 25.0).unwrap();
        let anchors = ResolvedAnchors::from_positions(vec![None, Some(vec![-0.75])]);
        let mut rng = chain_rng(3, 0);
        let draws = 40_000;
        let mut sum = 0.0;
        for _ in 0..draws {
            let b = update_ideal_points(&z, &[0.0, 0.0], &[1.0, 1.0], &hyper, &anchors, &mut rng).unwrap();
            assert_eq!(b[1], -0.75);
            sum += b[0];
        }
        // (0 + 2.0) / (1 + 2)
        let se = (1.0 / 3.0 / draws as f64).sqrt();
        assert!((sum / draws as f64 - 2.0 / 3.0).abs() < 4.0 * se);
    }

    #[test]
    fn latent_sign_reproduces_bernoulli() {
        let mut rng = chain_rng(4, 0);
        let eta = 0.4;
        let trials = 100_000;
        let mut direct = 0usize;
        let mut latent = 0usize;
        for _ in 0..trials {
            if rng.random::<f64>() < normal::cdf(eta) {
                direct += 1;
            }
            if eta + rng.sample::<f64, _>(StandardNormal) > 0.0 {
                latent += 1;
            }
        }
        let p = normal::cdf(eta);
        let se = (2.0 * p * (1.0 - p) / trials as f64).sqrt();
        assert!(((direct as f64 - latent as f64) / trials as f64).abs() < 3.0 * se);
    }

    #[test]
    fn zero_retained_draws_is_an_error() {
        let cfg = SamplerConfig {
            iterations: 100,
            burn_in: 100,
            ..config(1)
        };
        let m = toy();
        let h = default_hyperparameters(4, 1, 25.0).unwrap();
        assert!(matches!(run_gibbs(&m, &h, &AnchorSpec::none(), &cfg), Err(Error::Validation(_))));
    }

    #[test]
    fn unfiltered_matrix_is_rejected() {
        use Vote::*;
        let m = matrix(vec![vec![Yea, Yea], vec![Yea, Nay]]);
        let h = default_hyperparameters(2, 1, 25.0).unwrap();
        assert!(matches!(run_gibbs(&m, &h, &AnchorSpec::none(), &config(1)), Err(Error::Validation(_))));
    }

    #[test]
    fn retained_draws_and_fixed_anchors() {
        let m = toy();
        let h = default_hyperparameters(4, 1, 25.0).unwrap();
        let anchors = AnchorSpec::new(vec![Anchor::new("L0", vec![-1.0]), Anchor::new("L3", vec![1.0])]);
        let draws = run_gibbs(&m, &h, &anchors, &config(2)).unwrap();
        assert_eq!(draws.chains.len(), 2);
        for c in &draws.chains {
            assert_eq!(c.len(), 100);
            assert_eq!(c.iterations[0], 103);
            for t in 0..c.len() {
                assert_eq!(c.beta[t * 4], -1.0);
                assert_eq!(c.beta[t * 4 + 3], 1.0);
            }
        }
        assert_eq!(draws.meta.parameter_count(), 2 + 4 * 2);
    }

    #[test]
    fn results_do_not_depend_on_thread_count() {
        let m = toy();
        let h = default_hyperparameters(4, 1, 25.0).unwrap();
        let run = |threads| {
            rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .unwrap()
                .install(|| run_gibbs(&m, &h, &AnchorSpec::none(), &config(3)).unwrap())
        };
        let a = run(1);
        let b = run(4);
        assert_eq!(a.chains, b.chains);
        assert_ne!(a.chains[0], a.chains[1]);
        let c = run_gibbs(&m, &h, &AnchorSpec::none(), &SamplerConfig { seed: 100, ..config(3) }).unwrap();
        assert_ne!(a.chains[0], c.chains[0]);
    }

    #[test]
    fn explicit_initial_states() {
        let m = toy();
        let h = default_hyperparameters(4, 1, 25.0).unwrap();
        let init = ModelParameters::new(1, vec![0.1; 4], vec![0.5; 4], vec![1.0, 0.0, -1.0, 0.5]).unwrap();
        let cfg = config(2);
        let draws = run_gibbs_from(&m, &h, &AnchorSpec::none(), &cfg, &[init.clone(), init.clone()]).unwrap();
        assert_eq!(draws.total_draws(), 200);
        assert!(run_gibbs_from(&m, &h, &AnchorSpec::none(), &cfg, &[init]).is_err());
    }
}
