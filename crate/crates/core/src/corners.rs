//! Corner and L-pattern counting, and the shear relating them.
//!
//! A corner is `{(k,m), (k+d,m), (k,m+d)}`; in a group `d` ranges over the
//! nonzero elements, on the grid over positive (or nonzero) integers with
//! all three points inside the square.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sets::{Shape, Subset2D};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CornerMode {
    /// `G×G`, `d ≠ 0`.
    GroupNonZero,
    /// `{0..n-1}²`, `d > 0`.
    GridPositive,
    /// `{0..n-1}²`, `d ≠ 0`.
    GridNonZero,
}

impl CornerMode {
    pub fn default_for(shape: &Shape) -> CornerMode {
        match shape {
            Shape::Group(_) => CornerMode::GroupNonZero,
            Shape::Grid(_) => CornerMode::GridPositive,
        }
    }
}

fn check_mode(a: &Subset2D, mode: CornerMode) -> Result<()> {
    match (a.shape(), mode) {
        (Shape::Group(_), CornerMode::GroupNonZero) => Ok(()),
        (Shape::Grid(_), CornerMode::GridPositive | CornerMode::GridNonZero) => Ok(()),
        (s, m) => Err(Error::InvalidParameter(format!("corner mode {m:?} does not apply to {s:?}"))),
    }
}

/// Number of `(k, m, d)` with all three corner points in `A`.
pub fn count_corners(a: &Subset2D, mode: CornerMode) -> Result<u64> {
    check_mode(a, mode)?;
    let n = a.side();
    let pts: Vec<(usize, usize)> = a.points().collect();
    let per_point = |&(k, m): &(usize, usize)| -> u64 {
        match a.shape() {
            Shape::Group(g) => (1..n)
                .filter(|&d| a.contains(g.add_idx(k, d), m) && a.contains(k, g.add_idx(m, d)))
                .count() as u64,
            Shape::Grid(_) => {
                let up = (1..n - k.max(m)).filter(|&d| a.contains(k + d, m) && a.contains(k, m + d)).count();
                let down = if mode == CornerMode::GridNonZero {
                    (1..=k.min(m)).filter(|&d| a.contains(k - d, m) && a.contains(k, m - d)).count()
                } else {
                    0
                };
                (up + down) as u64
            }
        }
    };
    Ok(pts.par_iter().map(per_point).sum())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LPatternCount {
    /// All `(s₁, s₂, r)` including `r = 0`.
    pub total: u64,
    /// The `r = 0` terms, i.e. `|H ∩ W ∩ A|`.
    pub diagonal: u64,
    /// `total − diagonal`.
    pub off_diagonal: u64,
}

/// `Σ_{s₁,s₂,r} H(s₁,s₂) W(s₁+r, s₂+r) A(s₁, s₂+r)` over `G×G×G`.
pub fn count_l_pattern(h: &Subset2D, w: &Subset2D, a: &Subset2D) -> Result<LPatternCount> {
    if h.shape() != w.shape() || h.shape() != a.shape() {
        return Err(Error::ShapeMismatch("H, W and A must share one group".into()));
    }
    let g = h.shape().require_group()?;
    let n = g.order();
    let pts: Vec<(usize, usize)> = h.points().collect();
    let total: u64 = pts
        .par_iter()
        .map(|&(s1, s2)| {
            (0..n)
                .filter(|&r| {
                    let t = g.add_idx(s2, r);
                    w.contains(g.add_idx(s1, r), t) && a.contains(s1, t)
                })
                .count() as u64
        })
        .sum();
    let diagonal = h.points().filter(|&(x, y)| w.contains(x, y) && a.contains(x, y)).count() as u64;
    Ok(LPatternCount { total, diagonal, off_diagonal: total - diagonal })
}

/// `{(x, y) : (x + y, y) ∈ A}`.
///
/// Corners of `shear(A)` correspond to the `r ≠ 0` L-patterns of `Aᵀ`
/// (with `H = W = A`).
pub fn shear(a: &Subset2D) -> Result<Subset2D> {
    let g = a.shape().require_group()?;
    Ok(Subset2D::from_fn(a.shape().clone(), |x, y| a.contains(g.add_idx(x, y), y)))
}

/// Inverse of [`shear`].
pub fn unshear(a: &Subset2D) -> Result<Subset2D> {
    let g = a.shape().require_group()?;
    Ok(Subset2D::from_fn(a.shape().clone(), |x, y| a.contains(g.sub_idx(x, y), y)))
}
