//! Explicit sets: Behrend's progression-free sets, the diagonal lift of a
//! progression-free set to a corner-free set, Green's symmetrization, and
//! seeded random subsets.

use std::collections::{BTreeMap, HashSet};

use serde::{Deserialize, Serialize};

use crate::corners::{count_corners, CornerMode};
use crate::error::{Error, Result};
use crate::rng::SeededRng;
use crate::sets::{Shape, Subset, Subset2D};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BehrendCandidate {
    pub dim: u32,
    /// Digits range over `[0, base)`; numbers are written in radix `2·base − 1`.
    pub base: u64,
    /// `Σ aᵢ²` of the selected sphere.
    pub radius_sq: u64,
    pub size: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BehrendSet {
    pub n: u64,
    /// Elements of `{1..n}`, ascending.
    pub set: Vec<u64>,
    pub chosen: BehrendCandidate,
    /// Best sphere for every `(dim, base)` in the sweep.
    pub sweep: Vec<BehrendCandidate>,
}

/// Largest sphere class among numbers `x ≤ limit` with all digits `< base`
/// in radix `2·base − 1`, `dim` digits.
fn best_sphere(limit: u64, dim: u32, base: u64) -> (u64, Vec<u64>) {
    let radix = 2 * base - 1;
    let mut classes: BTreeMap<u64, Vec<u64>> = BTreeMap::new();
    let mut digits = vec![0u64; dim as usize];
    loop {
        let mut x = 0u64;
        let mut ok = true;
        for &a in digits.iter().rev() {
            match x.checked_mul(radix).and_then(|v| v.checked_add(a)) {
                Some(v) if v <= limit => x = v,
                _ => {
                    ok = false;
                    break;
                }
            }
        }
        if ok {
            let r: u64 = digits.iter().map(|a| a * a).sum();
            classes.entry(r).or_default().push(x);
        }
        // Odometer over digit vectors, most significant digit last.
        let mut i = 0;
        loop {
            if i == digits.len() {
                let (r, mut v) = classes.into_iter().max_by_key(|(r, v)| (v.len(), std::cmp::Reverse(*r))).unwrap_or((0, vec![]));
                v.sort_unstable();
                return (r, v);
            }
            digits[i] += 1;
            if digits[i] < base {
                break;
            }
            digits[i] = 0;
            i += 1;
        }
    }
}

/// Behrend's construction for `{1..n}`, best over a sweep of dimensions and
/// digit bases.
pub fn behrend_construction(n: u64) -> Result<BehrendSet> {
    if n == 0 {
        return Err(Error::InvalidParameter("N must be at least 1".into()));
    }
    let limit = n - 1;
    let mut sweep = Vec::new();
    let max_dim = (64 - n.leading_zeros()).max(1);
    for dim in 1..=max_dim {
        // One digit gives singleton spheres whatever the base.
        let top = if dim == 1 { 2 } else { ((n as f64).powf(1.0 / dim as f64) * 2.0).ceil() as u64 + 2 };
        for base in 2..=top {
            // Past this point the leading digit is always zero: a lower dimension.
            if dim > 1 && (2 * base - 1).checked_pow(dim - 1).is_none_or(|v| v > limit) {
                break;
            }
            let (r, v) = best_sphere(limit, dim, base);
            sweep.push(BehrendCandidate { dim, base, radius_sq: r, size: v.len() });
        }
    }
    let chosen = sweep
        .iter()
        .max_by_key(|c| (c.size, std::cmp::Reverse((c.dim, c.base))))
        .cloned()
        .expect("the sweep is never empty");
    let (_, v) = best_sphere(limit, chosen.dim, chosen.base);
    Ok(BehrendSet { n, set: v.into_iter().map(|x| x + 1).collect(), chosen, sweep })
}

pub fn behrend_set(n: u64) -> Result<Vec<u64>> {
    Ok(behrend_construction(n)?.set)
}

/// First three-term progression `(a, b, c)`, `a < b < c`, `a + c = 2b`, if any.
pub fn find_ap3(set: &[i64]) -> Option<[i64; 3]> {
    let mut v = set.to_vec();
    v.sort_unstable();
    v.dedup();
    let members: HashSet<i64> = v.iter().copied().collect();
    for (i, &a) in v.iter().enumerate() {
        for &c in &v[i + 1..] {
            if (a + c) % 2 == 0 && members.contains(&((a + c) / 2)) {
                return Some([a, (a + c) / 2, c]);
            }
        }
    }
    None
}

pub fn is_ap3_free(set: &[i64]) -> bool {
    find_ap3(set).is_none()
}

/// First `(b − d, b, b + d)` with `d ≢ 0` inside `B mod n`.
fn find_ap3_mod(set: &[i64], n: i64) -> Option<[i64; 3]> {
    let res: HashSet<i64> = set.iter().map(|x| x.rem_euclid(n)).collect();
    let mut v: Vec<i64> = res.iter().copied().collect();
    v.sort_unstable();
    for &b in &v {
        for d in 1..n {
            if res.contains(&(b + d).rem_euclid(n)) && res.contains(&(b - d).rem_euclid(n)) {
                return Some([(b - d).rem_euclid(n), b, (b + d).rem_euclid(n)]);
            }
        }
    }
    None
}

/// `{(x, y) : x − y ∈ B}` on the `n×n` grid or on `Z_n × Z_n`.
///
/// A corner `(k, m, d)` would put `k−m−d, k−m, k−m+d` in `B`, so the output
/// has no corners with `d ≠ 0` when `B` has no such progression.
pub fn cornerfree_from_ap3free(b: &[i64], n: usize, mode: CornerMode) -> Result<Subset2D> {
    let ni = n as i64;
    match mode {
        CornerMode::GroupNonZero => {
            if let Some(ap) = find_ap3_mod(b, ni) {
                return Err(Error::NotProgressionFree(ap));
            }
            let shape = Shape::Group(crate::group::GroupSpec::cyclic(n as u64)?);
            let res: HashSet<i64> = b.iter().map(|x| x.rem_euclid(ni)).collect();
            Ok(Subset2D::from_fn(shape, |x, y| res.contains(&(x as i64 - y as i64).rem_euclid(ni))))
        }
        CornerMode::GridPositive | CornerMode::GridNonZero => {
            if let Some(&bad) = b.iter().find(|x| x.abs() >= ni) {
                return Err(Error::InvalidParameter(format!("difference {bad} outside (-{n}, {n})")));
            }
            if let Some(ap) = find_ap3(b) {
                return Err(Error::NotProgressionFree(ap));
            }
            let set: HashSet<i64> = b.iter().copied().collect();
            Ok(Subset2D::from_fn(Shape::Grid(n), |x, y| set.contains(&(x as i64 - y as i64))))
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GreenResult {
    /// Side `2N+1` of the square `{−N..N}²`.
    pub side: usize,
    /// Reflection center `s⃗` in shifted coordinates (`0..2·side−1`).
    pub center: (usize, usize),
    pub input_size: usize,
    pub output_size: usize,
    /// `|A|²/(2·side − 1)²`.
    pub averaging_bound: f64,
    /// `δ²·side²/4`.
    pub density_bound: f64,
}

/// `A₁ = A ∩ (s⃗ − A)` for the `s⃗` maximizing `|A₁|`, on a grid of odd side
/// `2N+1` read as `{−N..N}²`. Ties go to the lexicographically smallest `s⃗`.
pub fn green_symmetrize(a: &Subset2D) -> Result<(Subset2D, GreenResult)> {
    let side = match a.shape() {
        Shape::Grid(m) => *m,
        Shape::Group(_) => return Err(Error::InvalidParameter("symmetrization works on the grid".into())),
    };
    if count_corners(a, CornerMode::GridPositive)? != 0 {
        return Err(Error::Precondition("input contains a corner with d > 0".into()));
    }
    if a.count() == 0 {
        return Err(Error::Precondition("input is empty".into()));
    }
    let span = 2 * side - 1;
    let pts: Vec<(usize, usize)> = a.points().collect();
    let mut hits = vec![0u32; span * span];
    for &(x1, y1) in &pts {
        for &(x2, y2) in &pts {
            hits[(x1 + x2) * span + (y1 + y2)] += 1;
        }
    }
    let (best, _) = hits.iter().enumerate().fold((0usize, 0u32), |acc, (i, &h)| if h > acc.1 { (i, h) } else { acc });
    let center = (best / span, best % span);
    let out = Subset2D::from_fn(a.shape().clone(), |x, y| {
        a.contains(x, y)
            && center.0 >= x
            && center.1 >= y
            && center.0 - x < side
            && center.1 - y < side
            && a.contains(center.0 - x, center.1 - y)
    });
    let delta = a.count() as f64 / (side * side) as f64;
    let info = GreenResult {
        side,
        center,
        input_size: a.count(),
        output_size: out.count(),
        averaging_bound: (a.count() as f64).powi(2) / (span * span) as f64,
        density_bound: delta * delta * (side * side) as f64 / 4.0,
    };
    Ok((out, info))
}

/// Each cell included independently with probability `δ`, row-major order.
pub fn random_subset(shape: Shape, delta: f64, seed: u64) -> Result<Subset2D> {
    if !(0.0..=1.0).contains(&delta) {
        return Err(Error::InvalidParameter(format!("density {delta} outside [0,1]")));
    }
    let mut rng = SeededRng::new(seed);
    Ok(Subset2D::from_fn(shape, |_, _| rng.bernoulli(delta)))
}

/// One-dimensional analogue of [`random_subset`].
pub fn random_subset1d(shape: Shape, delta: f64, seed: u64) -> Result<Subset> {
    if !(0.0..=1.0).contains(&delta) {
        return Err(Error::InvalidParameter(format!("density {delta} outside [0,1]")));
    }
    let mut rng = SeededRng::new(seed);
    Ok(Subset::from_fn(shape, |_| rng.bernoulli(delta)))
}
