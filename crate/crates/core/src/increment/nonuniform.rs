//! The density increment for sets that are not rectilinearly uniform.
//!
//! Candidates come from both branches of the argument: level sets of the
//! row and column sums of the balanced function, and the neighborhood pairs
//! `F₁ = N_{y₀} = {x : (x,y₀) ∈ A}`, `F₂ = N_{x₀} = {y : (x₀,y) ∈ A}` for
//! `(x₀, y₀) ∈ A`, whose intersection count is
//! `e(x₀,y₀) = |(N_{y₀}×N_{x₀}) ∩ A|`. Every acceptance test is carried out
//! on counted cardinalities in exact rational arithmetic.

use std::cmp::Ordering;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::paley::paley_set;
use crate::bits::BitSet;
use crate::error::{Error, Result};
use crate::sets::{Subset, Subset2D};
use crate::spectral::{balanced2d, DenseMap2D};
use crate::uniformity::box_norm4;

/// Exponents tried for the level sets of the marginals.
/// Relative tolerance on `α ≤ δ⁴/8`.
pub const ALPHA_SLACK: f64 = 1e-12;

pub const PALEY_EXPONENTS: [f64; 2] = [1.5, 2.0];

pub(crate) fn rat(x: f64) -> BigRational {
    BigRational::from_float(x).expect("finite float")
}

pub(crate) fn int(x: usize) -> BigRational {
    BigRational::from_integer(BigInt::from(x))
}

/// `(Σ_x |Σ_y f(x,y)|², Σ_y |Σ_x f(x,y)|²)` over `x ∈ E₁`, `y ∈ E₂`.
pub fn marginal_deviation(f: &DenseMap2D, e1: &Subset, e2: &Subset) -> Result<(f64, f64)> {
    if e1.shape() != &f.shape || e2.shape() != &f.shape {
        return Err(Error::ShapeMismatch("factor sets and function differ in shape".into()));
    }
    let n = f.side();
    for x in 0..n {
        for y in 0..n {
            if !(e1.contains(x) && e2.contains(y)) && f.at(x, y).norm() > 1e-12 {
                return Err(Error::Containment(format!("f is nonzero at ({x},{y}), outside E1xE2")));
            }
        }
    }
    let rows = e1.iter().map(|x| e2.iter().map(|y| f.at(x, y)).sum::<num_complex::Complex64>().norm_sqr()).sum();
    let cols = e2.iter().map(|y| e1.iter().map(|x| f.at(x, y)).sum::<num_complex::Complex64>().norm_sqr()).sum();
    Ok((rows, cols))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum IncrementRoute {
    /// Level set of the row sums; `F₂ = E₂`.
    RowPaley { p: f64 },
    /// Level set of the column sums; `F₁ = E₁`.
    ColumnPaley { p: f64 },
    /// `F₁ = N_{y₀}`, `F₂ = N_{x₀}`.
    Neighborhood { x0: usize, y0: usize },
}

impl IncrementRoute {
    /// Tie-break rank: marginal level sets before neighborhoods.
    pub fn rank(&self) -> u8 {
        match self {
            IncrementRoute::RowPaley { .. } | IncrementRoute::ColumnPaley { .. } => 0,
            IncrementRoute::Neighborhood { .. } => 1,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IncrementBounds {
    pub count: usize,
    pub f1_size: usize,
    pub f2_size: usize,
    /// `|A∩(F₁×F₂)| > (δ + g)|F₁||F₂|`.
    pub density_bound: bool,
    /// `|F_i| ≥ g|E_i|`.
    pub size_bound: bool,
}

/// `g = 2⁻¹⁵ · min(α²δ⁻⁵, αδ⁻²)` exactly, with `δ = a/(e₁e₂)`.
pub fn required_gain_exact(alpha: f64, a: usize, e1: usize, e2: usize) -> BigRational {
    let delta = int(a) / int(e1 * e2);
    let al = rat(alpha);
    let t1 = &al * &al / num_traits::pow(delta.clone(), 5);
    let t2 = &al / (&delta * &delta);
    t1.min(t2) / int(1 << 15)
}

/// Checks both output inequalities for `(F₁, F₂)` by counting.
pub fn check_increment_bounds(a: &Subset2D, e1: &Subset, e2: &Subset, alpha: f64, f1: &Subset, f2: &Subset) -> Result<IncrementBounds> {
    let a = a.restrict(e1, e2)?;
    if a.count() == 0 {
        return Err(Error::Precondition("A is empty inside E1xE2".into()));
    }
    if !f1.is_subset(e1) || !f2.is_subset(e2) {
        return Err(Error::Containment("F_i must lie in E_i".into()));
    }
    let (n1, n2) = (e1.count(), e2.count());
    let g = required_gain_exact(alpha, a.count(), n1, n2);
    let count = a.count_in(f1, f2)?;
    let (s1, s2) = (f1.count(), f2.count());
    let delta = int(a.count()) / int(n1 * n2);
    Ok(IncrementBounds {
        count,
        f1_size: s1,
        f2_size: s2,
        density_bound: int(count) > (delta + &g) * int(s1 * s2),
        size_bound: int(s1) >= &g * int(n1) && int(s2) >= &g * int(n2),
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NonuniformIncrement {
    pub route: IncrementRoute,
    pub f1: Subset,
    pub f2: Subset,
    pub count: usize,
    pub new_density: f64,
    pub gain: f64,
    pub delta: f64,
    pub alpha: f64,
    /// `box_norm4(f)/(|E₁|²|E₂|²)`.
    pub ratio: f64,
    pub required_gain: f64,
    pub row_dev: f64,
    pub col_dev: f64,
    /// Row sums exceed `αδ⁻²|E₁||E₂|²/16`.
    pub row_large: bool,
    /// Column sums exceed `αδ⁻²|E₁|²|E₂|/16`.
    pub col_large: bool,
    /// `|X̃|`, rows with `|Σ_y f(x,y)| ≤ α|E₂|/(32δ³)`.
    pub small_rows: usize,
    /// `|Ỹ|`, defined symmetrically.
    pub small_cols: usize,
    /// Points of `A∩(X̃×Ỹ)` with `e(x,y) ≥ (δ³ + α/(4δ))|E₁||E₂|`.
    pub proof_witnesses: usize,
    pub candidates: usize,
}

/// A candidate summarized by its counts; sets are materialized only for
/// the winner.
#[derive(Clone, Copy, Debug)]
struct Cand {
    route: IncrementRoute,
    count: usize,
    s1: usize,
    s2: usize,
}

impl Cand {
    /// Higher density first, then lower route rank, then earlier.
    fn better_than(&self, other: &Cand) -> bool {
        let l = self.count as u128 * (other.s1 * other.s2) as u128;
        let r = other.count as u128 * (self.s1 * self.s2) as u128;
        match l.cmp(&r) {
            Ordering::Greater => true,
            Ordering::Less => false,
            Ordering::Equal => self.route.rank() < other.route.rank(),
        }
    }
}

fn ceil_int(x: &BigRational) -> usize {
    x.ceil().to_integer().to_usize().unwrap_or(usize::MAX)
}

/// The increment step. `α` must satisfy `0 < α ≤ δ⁴/8` and `A` must fail
/// rectilinear `α`-uniformity on `E₁×E₂`; points of `A` outside `E₁×E₂`
/// are ignored.
pub fn nonuniform_increment(a: &Subset2D, e1: &Subset, e2: &Subset, alpha: f64) -> Result<NonuniformIncrement> {
    let a = a.restrict(e1, e2)?;
    let (n1, n2) = (e1.count(), e2.count());
    let m = a.count();
    if m == 0 {
        return Err(Error::Precondition("A is empty inside E1xE2".into()));
    }
    if !(alpha.is_finite() && alpha > 0.0) {
        return Err(Error::InvalidParameter(format!("alpha must be positive, got {alpha}")));
    }
    let size = n1 * n2;
    let delta_r = int(m) / int(size);
    let delta = m as f64 / size as f64;
    // Exact comparison with a relative slack of `ALPHA_SLACK`, so that `δ⁴/8`
    // evaluated in floating point is accepted.
    let al = rat(alpha);
    if &al * int(8) > num_traits::pow(delta_r.clone(), 4) * (BigRational::one() + rat(ALPHA_SLACK)) {
        return Err(Error::Precondition(format!("alpha = {alpha} exceeds delta^4/8 = {}", delta.powi(4) / 8.0)));
    }
    let f = balanced2d(&a, e1, e2)?;
    let ratio = box_norm4(&f) / (size as f64).powi(2);
    if ratio <= alpha {
        return Err(Error::Uniform { ratio, alpha });
    }

    let side = a.side();
    let rows: Vec<BitSet> = (0..side).map(|x| BitSet::from_fn(side, |y| a.contains(x, y))).collect();
    let cols: Vec<BitSet> = (0..side).map(|y| BitSet::from_fn(side, |x| a.contains(x, y))).collect();
    let rsum: Vec<usize> = rows.iter().map(|r| r.count()).collect();
    let csum: Vec<usize> = cols.iter().map(|c| c.count()).collect();

    // Exact marginals: Σ_y f(x,y) = r(x) − m/|E₁|, scaled by |E₁|.
    let sq = |v: i128| -> BigRational { BigRational::from_integer(BigInt::from(v) * BigInt::from(v)) };
    let row_num: BigRational = e1.iter().map(|x| sq(n1 as i128 * rsum[x] as i128 - m as i128)).fold(BigRational::zero(), |s, v| s + v);
    let col_num: BigRational = e2.iter().map(|y| sq(n2 as i128 * csum[y] as i128 - m as i128)).fold(BigRational::zero(), |s, v| s + v);
    let row_dev_r = row_num / int(n1 * n1);
    let col_dev_r = col_num / int(n2 * n2);
    let d2 = &delta_r * &delta_r;
    let row_large = row_dev_r > &al / &d2 * int(n1 * n2 * n2) / int(16);
    let col_large = col_dev_r > &al / &d2 * int(n1 * n1 * n2) / int(16);

    let g = required_gain_exact(alpha, m, n1, n2);
    let (min1, min2) = (ceil_int(&(&g * int(n1))).max(1), ceil_int(&(&g * int(n2))).max(1));

    let mut best: Option<Cand> = None;
    let consider = |c: Cand, best: &mut Option<Cand>| {
        if c.s1 >= min1 && c.s2 >= min2 && best.as_ref().is_none_or(|b| c.better_than(b)) {
            *best = Some(c);
        }
    };
    let mut candidates = 0usize;

    // Level sets of the normalized marginals Z(x) = r(x)/|E₂| − δ.
    let e1v: Vec<usize> = e1.iter().collect();
    let e2v: Vec<usize> = e2.iter().collect();
    for p in PALEY_EXPONENTS {
        let z: Vec<f64> = e1v.iter().map(|&x| rsum[x] as f64 / n2 as f64 - delta).collect();
        let ps = paley_set(&z, p)?;
        if !ps.set.is_empty() {
            let count = ps.set.iter().map(|&i| rsum[e1v[i]]).sum();
            consider(Cand { route: IncrementRoute::RowPaley { p }, count, s1: ps.set.len(), s2: n2 }, &mut best);
            candidates += 1;
        }
    }
    for p in PALEY_EXPONENTS {
        let z: Vec<f64> = e2v.iter().map(|&y| csum[y] as f64 / n1 as f64 - delta).collect();
        let ps = paley_set(&z, p)?;
        if !ps.set.is_empty() {
            let count = ps.set.iter().map(|&i| csum[e2v[i]]).sum();
            consider(Cand { route: IncrementRoute::ColumnPaley { p }, count, s1: n1, s2: ps.set.len() }, &mut best);
            candidates += 1;
        }
    }

    // Small-marginal rows and columns: |r(x)|E₁| − m| ≤ α|E₁||E₂|/(32δ³).
    let d3 = &d2 * &delta_r;
    let row_cut = &al * int(n1 * n2) / (int(32) * &d3);
    let col_cut = &al * int(n1 * n2) / (int(32) * &d3);
    let small_row: Vec<bool> = (0..side)
        .map(|x| e1.contains(x) && int((n1 as i64 * rsum[x] as i64 - m as i64).unsigned_abs() as usize) <= row_cut)
        .collect();
    let small_col: Vec<bool> = (0..side)
        .map(|y| e2.contains(y) && int((n2 as i64 * csum[y] as i64 - m as i64).unsigned_abs() as usize) <= col_cut)
        .collect();
    let e_cut = ceil_int(&((&d3 + &al / (int(4) * &delta_r)) * int(size)));

    // e(x₀,y₀) = Σ_{x ∈ N_{y₀}} |row(x) ∩ row(x₀)|, one task per row.
    let per_row: Vec<(Vec<Cand>, usize)> = (0..side)
        .into_par_iter()
        .map(|x0| {
            if rsum[x0] == 0 {
                return (Vec::new(), 0);
            }
            let overlap: Vec<usize> = rows.iter().map(|r| r.intersection_count(&rows[x0])).collect();
            let mut out = Vec::with_capacity(rsum[x0]);
            let mut witnesses = 0;
            for y0 in rows[x0].iter() {
                let e: usize = cols[y0].iter().map(|x| overlap[x]).sum();
                if small_row[x0] && small_col[y0] && e >= e_cut {
                    witnesses += 1;
                }
                out.push(Cand { route: IncrementRoute::Neighborhood { x0, y0 }, count: e, s1: csum[y0], s2: rsum[x0] });
            }
            (out, witnesses)
        })
        .collect();
    let mut proof_witnesses = 0;
    for (cs, w) in per_row {
        proof_witnesses += w;
        for c in cs {
            candidates += 1;
            consider(c, &mut best);
        }
    }

    let infeasible = |why: &str| {
        Error::ConstantsInfeasible(format!(
            "{why}; ratio {ratio:.3e}, row/col marginals large: {row_large}/{col_large}, proof witnesses: {proof_witnesses}"
        ))
    };
    let best = best.ok_or_else(|| infeasible("no candidate meets the size floor"))?;
    if int(best.count) <= (&delta_r + &g) * int(best.s1 * best.s2) {
        return Err(infeasible("best candidate misses the required density gain"));
    }

    let (f1, f2) = materialize(&best, &a, e1, e2, &e1v, &e2v, &rsum, &csum, delta)?;
    let count = a.count_in(&f1, &f2)?;
    if count != best.count || f1.count() != best.s1 || f2.count() != best.s2 {
        return Err(Error::Precondition(format!("internal recount mismatch for {:?}", best.route)));
    }
    let new_density = count as f64 / (best.s1 * best.s2) as f64;
    Ok(NonuniformIncrement {
        route: best.route,
        f1,
        f2,
        count,
        new_density,
        gain: new_density - delta,
        delta,
        alpha,
        ratio,
        required_gain: g.to_f64().unwrap_or(0.0),
        row_dev: row_dev_r.to_f64().unwrap_or(f64::NAN),
        col_dev: col_dev_r.to_f64().unwrap_or(f64::NAN),
        row_large,
        col_large,
        small_rows: small_row.iter().filter(|&&b| b).count(),
        small_cols: small_col.iter().filter(|&&b| b).count(),
        proof_witnesses,
        candidates,
    })
}

#[allow(clippy::too_many_arguments)]
fn materialize(
    c: &Cand,
    a: &Subset2D,
    e1: &Subset,
    e2: &Subset,
    e1v: &[usize],
    e2v: &[usize],
    rsum: &[usize],
    csum: &[usize],
    delta: f64,
) -> Result<(Subset, Subset)> {
    let shape = a.shape().clone();
    Ok(match c.route {
        IncrementRoute::RowPaley { p } => {
            let z: Vec<f64> = e1v.iter().map(|&x| rsum[x] as f64 / e2.count() as f64 - delta).collect();
            let ps = paley_set(&z, p)?;
            (Subset::from_indices(shape, ps.set.iter().map(|&i| e1v[i]))?, e2.clone())
        }
        IncrementRoute::ColumnPaley { p } => {
            let z: Vec<f64> = e2v.iter().map(|&y| csum[y] as f64 / e1.count() as f64 - delta).collect();
            let ps = paley_set(&z, p)?;
            (e1.clone(), Subset::from_indices(shape, ps.set.iter().map(|&i| e2v[i]))?)
        }
        IncrementRoute::Neighborhood { x0, y0 } => {
            let n = a.side();
            let f1 = Subset::from_fn(shape.clone(), |x| x < n && a.contains(x, y0));
            let f2 = Subset::from_fn(shape, |y| y < n && a.contains(x0, y));
            (f1, f2)
        }
    })
}
