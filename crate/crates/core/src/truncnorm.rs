//! Unit-variance normal draws truncated at zero.
//!
//! A draw of `N(mean, 1)` restricted to `(0, ∞)` is `mean + t`, with `t` a
//! standard normal restricted to `(a, ∞)` and `a = -mean`. Three regimes:
//!
//! * `a < -5`: the region holds all but ~3e-7 of the mass, so plain
//!   rejection from the untruncated normal almost never rejects;
//! * `-5 ≤ a ≤ 5`: inverse CDF on the upper tail, `t = -Φ⁻¹(u·Φ(-a))`;
//! * `a > 5`: Robert's translated-exponential rejection sampler with the
//!   optimal rate `λ = (a + √(a² + 4)) / 2`.
//!
//! The `(-∞, 0]` side is the mirror image of the positive side.

use rand::Rng;
use rand_distr::{Exp1, Open01, StandardNormal};

use crate::error::{Error, Result};
use crate::normal;

const INVERSE_CDF_LIMIT: f64 = 5.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    /// `(0, +∞)`, the region for a yea vote.
    Positive,
    /// `(-∞, 0]`, the region for a nay vote.
    NonPositive,
}

pub fn sample_truncated_normal<R: Rng + ?Sized>(mean: f64, side: Side, rng: &mut R) -> Result<f64> {
    if !mean.is_finite() {
        return Err(Error::domain(format!("truncated normal mean must be finite, got {mean}")));
    }
    Ok(draw(mean, side, rng))
}

/// Unchecked variant for the sampler's inner loop; `mean` must be finite.
#[inline]
pub(crate) fn draw<R: Rng + ?Sized>(mean: f64, side: Side, rng: &mut R) -> f64 {
    match side {
        Side::Positive => draw_positive(mean, rng),
        Side::NonPositive => -draw_positive(-mean, rng),
    }
}

fn draw_positive<R: Rng + ?Sized>(mean: f64, rng: &mut R) -> f64 {
    let a = -mean;
    loop {
        let t = if a < -INVERSE_CDF_LIMIT {
            let t: f64 = rng.sample(StandardNormal);
            if t <= a {
                continue;
            }
            t
        } else if a <= INVERSE_CDF_LIMIT {
            let u: f64 = rng.sample(Open01);
            normal::upper_quantile(u * normal::sf(a))
        } else {
            exponential_tail(a, rng)
        };
        // Rounding in mean + t can land on the boundary; redraw in that case.
        let z = mean + t;
        if z > 0.0 {
            return z;
        }
    }
}

fn exponential_tail<R: Rng + ?Sized>(a: f64, rng: &mut R) -> f64 {
    let lambda = 0.5 * (a + (a * a + 4.0).sqrt());
    loop {
        let e: f64 = rng.sample(Exp1);
        let t = a + e / lambda;
        let u: f64 = rng.random();
        let diff = t - lambda;
        if u <= (-0.5 * diff * diff).exp() {
            return t;
        }
    }
}
