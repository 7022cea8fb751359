//! The d-dimensional probit spatial voting model.
//!
//! Legislator `i` votes yea on motion `j` with probability
//! `Φ(μ_j + α_j·β_i)`, where `μ_j` is the motion's approval parameter,
//! `α_j` its discrimination vector and `β_i` the legislator's ideal point.

use nalgebra::{DMatrix, DVector};

use crate::data::{RollCallMatrix, Vote};
use crate::error::{Error, Result};
use crate::normal;

/// Item and ideal-point parameters for one state of the model.
///
/// `alpha` and `beta` are stored row-major (`m × d` and `n × d`).
#[derive(Debug, Clone, PartialEq)]
pub struct ModelParameters {
    d: usize,
    pub mu: Vec<f64>,
    pub alpha: Vec<f64>,
    pub beta: Vec<f64>,
}

impl ModelParameters {
    pub fn new(d: usize, mu: Vec<f64>, alpha: Vec<f64>, beta: Vec<f64>) -> Result<Self> {
        if d == 0 {
            return Err(Error::domain("dimension must be at least 1"));
        }
        let m = mu.len();
        if alpha.len() != m * d {
            return Err(Error::validation(format!(
                "alpha has {} entries, expected {m}×{d}",
                alpha.len()
            )));
        }
        if beta.len() % d != 0 {
            return Err(Error::validation(format!(
                "beta has {} entries, not a multiple of d={d}",
                beta.len()
            )));
        }
        if mu.iter().chain(&alpha).chain(&beta).any(|x| !x.is_finite()) {
            return Err(Error::domain("model parameters must be finite"));
        }
        Ok(ModelParameters { d, mu, alpha, beta })
    }

    pub fn zeros(n: usize, m: usize, d: usize) -> Self {
        ModelParameters {
            d,
            mu: vec![0.0; m],
            alpha: vec![0.0; m * d],
            beta: vec![0.0; n * d],
        }
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn n(&self) -> usize {
        self.beta.len() / self.d
    }

    pub fn m(&self) -> usize {
        self.mu.len()
    }

    #[inline]
    pub fn alpha_row(&self, j: usize) -> &[f64] {
        &self.alpha[j * self.d..(j + 1) * self.d]
    }

    #[inline]
    pub fn beta_row(&self, i: usize) -> &[f64] {
        &self.beta[i * self.d..(i + 1) * self.d]
    }

    /// μ_j + α_j·β_i.
    #[inline]
    pub fn linear_predictor(&self, i: usize, j: usize) -> f64 {
        self.mu[j] + dot(self.alpha_row(j), self.beta_row(i))
    }

    /// Checks that the shapes agree with `matrix`.
    pub fn check_shape(&self, matrix: &RollCallMatrix) -> Result<()> {
        if self.n() != matrix.n() || self.m() != matrix.m() {
            return Err(Error::validation(format!(
                "parameters are for {}×{}, matrix is {}×{}",
                self.n(),
                self.m(),
                matrix.n(),
                matrix.m()
            )));
        }
        Ok(())
    }

    /// Number of free parameters given how many legislators are anchored.
    pub fn parameter_count(n_free: usize, m: usize, d: usize) -> usize {
        n_free * d + m * (d + 1)
    }
}

#[inline]
pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Prior hyperparameters: `(μ_j, α_j) ~ N(a, A)` and `β_i ~ N(b_i, B_i)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Hyperparameters {
    pub item_mean: DVector<f64>,
    pub item_cov: DMatrix<f64>,
    pub ideal_means: Vec<DVector<f64>>,
    pub ideal_covs: Vec<DMatrix<f64>>,
}

impl Hyperparameters {
    pub fn d(&self) -> usize {
        self.item_mean.len() - 1
    }

    pub fn n(&self) -> usize {
        self.ideal_means.len()
    }

    pub fn validate(&self) -> Result<()> {
        let d = self.d();
        if d == 0 {
            return Err(Error::validation("item prior mean must have length d+1 ≥ 2"));
        }
        if self.item_cov.shape() != (d + 1, d + 1) {
            return Err(Error::validation("item prior covariance must be (d+1)×(d+1)"));
        }
        check_spd("item prior covariance", &self.item_cov)?;
        if self.ideal_covs.len() != self.ideal_means.len() {
            return Err(Error::validation("ideal-point prior means and covariances differ in count"));
        }
        for (i, (b, cov)) in self.ideal_means.iter().zip(&self.ideal_covs).enumerate() {
            if b.len() != d || cov.shape() != (d, d) {
                return Err(Error::validation(format!(
                    "ideal-point prior {i} does not have dimension {d}"
                )));
            }
            check_spd(&format!("ideal-point prior covariance {i}"), cov)?;
        }
        Ok(())
    }
}

/// True if `mat` is symmetric and admits a Cholesky factorization.
pub fn is_symmetric_positive_definite(mat: &DMatrix<f64>) -> bool {
    if !mat.is_square() || mat.iter().any(|x| !x.is_finite()) {
        return false;
    }
    let scale = mat.amax().max(1.0);
    if (mat - mat.transpose()).amax() > 1e-12 * scale {
        return false;
    }
    mat.clone().cholesky().is_some()
}

fn check_spd(what: &str, mat: &DMatrix<f64>) -> Result<()> {
    if is_symmetric_positive_definite(mat) {
        Ok(())
    } else {
        Err(Error::validation(format!("{what} is not symmetric positive definite")))
    }
}

/// Vague item prior `N(0, σ²I)` and unit ideal-point priors `N(0, I)`.
pub fn default_hyperparameters(n: usize, d: usize, sigma2: f64) -> Result<Hyperparameters> {
    if n == 0 || d == 0 {
        return Err(Error::domain("n and d must be at least 1"));
    }
    if !(sigma2 > 0.0 && sigma2.is_finite()) {
        return Err(Error::domain(format!("sigma2 must be positive, got {sigma2}")));
    }
    Ok(Hyperparameters {
        item_mean: DVector::zeros(d + 1),
        item_cov: DMatrix::identity(d + 1, d + 1) * sigma2,
        ideal_means: vec![DVector::zeros(d); n],
        ideal_covs: vec![DMatrix::identity(d, d); n],
    })
}

pub const DEFAULT_SIGMA2: f64 = 25.0;

/// Φ(μ_j + α_j·β_i).
pub fn vote_probability(mu: f64, alpha: &[f64], beta: &[f64]) -> Result<f64> {
    if alpha.len() != beta.len() {
        return Err(Error::validation("alpha and beta differ in dimension"));
    }
    if !mu.is_finite() || alpha.iter().chain(beta).any(|x| !x.is_finite()) {
        return Err(Error::domain("vote_probability needs finite inputs"));
    }
    Ok(normal::cdf(mu + dot(alpha, beta)))
}

/// Log-likelihood of a single observed vote given its linear predictor.
#[inline]
pub fn vote_log_likelihood(vote: Vote, eta: f64) -> f64 {
    match vote {
        Vote::Yea => normal::log_cdf(eta),
        Vote::Nay => normal::log_cdf(-eta),
        Vote::Missing => 0.0,
    }
}

/// Bernoulli-probit log-likelihood over the observed cells.
pub fn log_likelihood(matrix: &RollCallMatrix, params: &ModelParameters) -> Result<f64> {
    params.check_shape(matrix)?;
    Ok(log_likelihood_with(matrix, |i, j| params.linear_predictor(i, j)))
}

pub(crate) fn log_likelihood_with(
    matrix: &RollCallMatrix,
    eta: impl Fn(usize, usize) -> f64,
) -> f64 {
    let mut total = 0.0;
    for i in 0..matrix.n() {
        for (j, &v) in matrix.row(i).iter().enumerate() {
            if v.is_observed() {
                total += vote_log_likelihood(v, eta(i, j));
            }
        }
    }
    total
}
