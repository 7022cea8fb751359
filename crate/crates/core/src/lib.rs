//! Bayesian ideal-point estimation for binary roll-call data.
//!
//! Votes follow a probit spatial model, `P(yea) = Φ(μ_j + α_j·β_i)`, with
//! conjugate normal priors. Posterior draws come from a Gibbs sampler with
//! truncated-normal data augmentation; anchors fix the location, scale and
//! rotation of the ideal points.
//!
//! ```no_run
//! use ideal_core::{data, identify, model, sampler, analytics};
//!
//! let matrix = data::load_roll_calls("votes.csv".as_ref(), data::DataFormat::Csv)?;
//! let (matrix, _report) = data::filter_matrix(&matrix, 0.5, true)?;
//! let hyper = model::default_hyperparameters(matrix.n(), 1, model::DEFAULT_SIGMA2)?;
//! let anchors = identify::AnchorSpec::new(vec![
//!     identify::Anchor::new("L001", vec![-1.0]),
//!     identify::Anchor::new("L002", vec![1.0]),
//! ]);
//! let draws = sampler::run_gibbs(&matrix, &hyper, &anchors, &sampler::SamplerConfig::default())?;
//! let summaries = analytics::summarize(&draws, 0.95)?;
//! # Ok::<(), ideal_core::Error>(())
//! ```

pub mod analytics;
pub mod data;
pub mod draws;
pub mod error;
pub mod identify;
pub mod model;
pub mod normal;
pub mod party;
pub mod sampler;
pub mod synth;
mod truncnorm;

pub use data::{RollCallMatrix, Vote};
pub use draws::{ParamIndex, PosteriorDraws};
pub use error::{Error, Result};
pub use identify::{Anchor, AnchorSpec};
pub use model::{Hyperparameters, ModelParameters};
pub use sampler::SamplerConfig;
pub use truncnorm::Side;
