//! Level sets of mean-zero bounded functions.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const MEAN_TOL: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PaleySet {
    pub p: f64,
    /// `σᵖ = E|Z|ᵖ`.
    pub sigma_p: f64,
    /// Positions `x` with `Z(x) > σᵖ/5`.
    pub set: Vec<usize>,
    /// `|set| / |X|`.
    pub measure: f64,
    /// `measure ≥ σᵖ/5`.
    pub bound_holds: bool,
}

/// `{x : Z(x) > σᵖ/5}` for `Z : X → [−1, 1]` with `E Z = 0`, `p ≥ 1`.
pub fn paley_set(z: &[f64], p: f64) -> Result<PaleySet> {
    if z.is_empty() {
        return Err(Error::InvalidParameter("empty domain".into()));
    }
    if !(p.is_finite() && p >= 1.0) {
        return Err(Error::InvalidParameter(format!("exponent must be at least 1, got {p}")));
    }
    if let Some((i, v)) = z.iter().enumerate().find(|(_, v)| !(v.abs() <= 1.0 + MEAN_TOL)) {
        return Err(Error::InvalidParameter(format!("Z({i}) = {v} outside [-1,1]")));
    }
    let n = z.len() as f64;
    let mean = z.iter().sum::<f64>() / n;
    if mean.abs() > MEAN_TOL {
        return Err(Error::Precondition(format!("mean of Z is {mean}, not zero")));
    }
    let sigma_p = z.iter().map(|v| v.abs().powf(p)).sum::<f64>() / n;
    let cut = sigma_p / 5.0;
    let set: Vec<usize> = (0..z.len()).filter(|&i| z[i] > cut).collect();
    let measure = set.len() as f64 / n;
    Ok(PaleySet { p, sigma_p, bound_holds: measure >= cut, set, measure })
}
