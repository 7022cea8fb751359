//! Identification constraints.
//!
//! The likelihood only sees `α_j·β_i`, so ideal points are determined up to
//! rotation, reflection and (through μ) translation. Fixing `d + 1`
//! affinely independent anchor legislators pins all three. Runs with fewer
//! anchors can still be oriented after the fact with [`orient_draws`],
//! which resolves reflections only.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::data::RollCallMatrix;
use crate::draws::PosteriorDraws;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Anchor {
    pub id: String,
    pub position: Vec<f64>,
}

impl Anchor {
    pub fn new(id: impl Into<String>, position: Vec<f64>) -> Self {
        Anchor {
            id: id.into(),
            position,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct AnchorSpec {
    pub anchors: Vec<Anchor>,
}

impl AnchorSpec {
    pub fn new(anchors: Vec<Anchor>) -> Self {
        AnchorSpec { anchors }
    }

    pub fn none() -> Self {
        AnchorSpec::default()
    }

    pub fn len(&self) -> usize {
        self.anchors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.anchors.is_empty()
    }
}

/// Anchor positions indexed by legislator row.
#[derive(Debug, Clone, PartialEq)]
pub struct ResolvedAnchors {
    positions: Vec<Option<Vec<f64>>>,
}

impl ResolvedAnchors {
    /// Per-legislator positions, `None` for free legislators. Unvalidated.
    pub fn from_positions(positions: Vec<Option<Vec<f64>>>) -> Self {
        ResolvedAnchors { positions }
    }

    pub fn none(n: usize) -> Self {
        ResolvedAnchors {
            positions: vec![None; n],
        }
    }

    pub fn position(&self, i: usize) -> Option<&[f64]> {
        self.positions[i].as_deref()
    }

    pub fn is_anchored(&self, i: usize) -> bool {
        self.positions[i].is_some()
    }

    pub fn anchored_flags(&self) -> Vec<bool> {
        self.positions.iter().map(Option::is_some).collect()
    }

    pub fn count(&self) -> usize {
        self.positions.iter().filter(|p| p.is_some()).count()
    }

    pub fn n(&self) -> usize {
        self.positions.len()
    }
}

#[derive(Debug, Clone)]
pub struct AnchorValidation {
    pub resolved: ResolvedAnchors,
    pub warnings: Vec<String>,
}

/// Checks anchor ids, dimensions and affine independence.
///
/// A count other than `d + 1` is allowed but produces a warning.
pub fn validate_anchors(
    matrix: &RollCallMatrix,
    spec: &AnchorSpec,
    d: usize,
) -> Result<AnchorValidation> {
    if d == 0 {
        return Err(Error::domain("dimension must be at least 1"));
    }
    let mut resolved = ResolvedAnchors::none(matrix.n());
    for anchor in &spec.anchors {
        let i = matrix
            .legislator_index(&anchor.id)
            .ok_or_else(|| Error::validation(format!("unknown anchor legislator `{}`", anchor.id)))?;
        if anchor.position.len() != d {
            return Err(Error::validation(format!(
                "anchor `{}` has a {}-dimensional position, expected {d}",
                anchor.id,
                anchor.position.len()
            )));
        }
        if anchor.position.iter().any(|x| !x.is_finite()) {
            return Err(Error::domain(format!("anchor `{}` position is not finite", anchor.id)));
        }
        if resolved.positions[i].is_some() {
            return Err(Error::validation(format!("legislator `{}` anchored twice", anchor.id)));
        }
        resolved.positions[i] = Some(anchor.position.clone());
    }

    let points: Vec<&[f64]> = spec.anchors.iter().map(|a| a.position.as_slice()).collect();
    for (p, a) in points.iter().enumerate() {
        for (q, b) in points.iter().enumerate().skip(p + 1) {
            if a == b {
                return Err(Error::validation(format!(
                    "anchors `{}` and `{}` share a position",
                    spec.anchors[p].id, spec.anchors[q].id
                )));
            }
        }
    }
    if points.len() > 1 {
        let rank = affine_rank(&points);
        let needed = (points.len() - 1).min(d);
        if rank < needed {
            return Err(Error::validation(format!(
                "anchor positions are not affinely independent (affine rank {rank}, need {needed})"
            )));
        }
    }

    let mut warnings = Vec::new();
    if spec.len() != d + 1 {
        let msg = if spec.len() < d + 1 {
            format!(
                "{} anchor(s) for d={d}; {} are needed to pin rotation, reflection and translation",
                spec.len(),
                d + 1
            )
        } else {
            format!("{} anchors for d={d}; more than the {} needed", spec.len(), d + 1)
        };
        log::warn!("{msg}");
        warnings.push(msg);
    }
    Ok(AnchorValidation { resolved, warnings })
}

fn affine_rank(points: &[&[f64]]) -> usize {
    let d = points[0].len();
    let k = points.len() - 1;
    let diffs = DMatrix::from_fn(k, d, |r, c| points[r + 1][c] - points[0][c]);
    let sv = diffs.singular_values();
    let top = sv.max();
    if top == 0.0 {
        return 0;
    }
    sv.iter().filter(|&&s| s > 1e-10 * top).count()
}

/// Flips `(β_{·k}, α_{·k})` per chain and dimension so the reference
/// legislator's chain-mean coordinate has the requested sign.
pub fn orient_draws(
    draws: &PosteriorDraws,
    reference: &str,
    desired_sign: &[f64],
) -> Result<PosteriorDraws> {
    let meta = &draws.meta;
    let d = meta.d;
    if desired_sign.len() != d || desired_sign.iter().any(|s| *s == 0.0 || !s.is_finite()) {
        return Err(Error::validation(format!(
            "desired_sign needs {d} nonzero entries"
        )));
    }
    let r = meta
        .legislator_ids
        .iter()
        .position(|id| id == reference)
        .ok_or_else(|| Error::validation(format!("unknown reference legislator `{reference}`")))?;
    if meta.anchored[r] {
        return Err(Error::validation(format!(
            "reference legislator `{reference}` is an anchor"
        )));
    }

    let mut out = draws.clone();
    let (n, m) = (meta.n, meta.m);
    for chain in &mut out.chains {
        let count = chain.len();
        if count == 0 {
            continue;
        }
        for k in 0..d {
            let mean = (0..count).map(|t| chain.beta[(t * n + r) * d + k]).sum::<f64>() / count as f64;
            if mean * desired_sign[k] >= 0.0 {
                continue;
            }
            for t in 0..count {
                for i in 0..n {
                    chain.beta[(t * n + i) * d + k] *= -1.0;
                }
                for j in 0..m {
                    chain.alpha[(t * m + j) * d + k] *= -1.0;
                }
            }
        }
    }
    Ok(out)
}
