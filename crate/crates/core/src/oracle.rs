//! Slow, definitional evaluations used as independent cross-checks of the
//! fast paths. They share no code with the routines they check beyond the
//! group law.

use std::f64::consts::TAU;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;

use crate::bohr::BohrSpec;
use crate::group::GroupSpec;
use crate::sets::{Shape, Subset, Subset2D};
use crate::spectral::{DenseMap, DenseMap2D};

fn pairing_f64(g: &GroupSpec, xi: usize, x: usize) -> f64 {
    let a = g.coords_of(xi);
    let b = g.coords_of(x);
    let mut t = 0.0;
    for ((p, q), n) in a.iter().zip(&b).zip(g.factors()) {
        t += ((p * q) % n) as f64 / *n as f64;
    }
    t - t.floor()
}

/// `Σ_x f(x) e(−ξ·x)` by direct summation.
pub fn dft_naive(f: &DenseMap) -> DenseMap {
    let g = &f.group;
    let n = g.order();
    DenseMap::from_fn(g.clone(), |xi| {
        (0..n).map(|x| f.values[x] * Complex64::from_polar(1.0, -TAU * pairing_f64(g, xi, x))).sum()
    })
}

/// `Σ_s f(s) g(n−s)` by direct summation.
pub fn convolve_naive(f: &DenseMap, h: &DenseMap) -> DenseMap {
    let g = &f.group;
    let n = g.order();
    DenseMap::from_fn(g.clone(), |k| (0..n).map(|s| f.values[s] * h.values[g.sub_idx(k, s)]).sum())
}

/// First index attaining the largest `|f̂|` (to a `1e-9` relative slack).
pub fn max_coeff_naive(f: &DenseMap) -> (usize, f64) {
    let mags: Vec<f64> = dft_naive(f).values.iter().map(|v| v.norm()).collect();
    let top = mags.iter().cloned().fold(0.0, f64::max);
    let i = mags.iter().position(|&m| m >= top - 1e-9 * top.max(1.0)).unwrap_or(0);
    (i, mags[i])
}

/// Membership decided with rational arithmetic on `Σ ξᵢxᵢ/nᵢ`.
pub fn bohr_members_naive(spec: &BohrSpec) -> Subset {
    let g = &spec.group;
    let eps = BigRational::from_float(spec.eps).unwrap();
    let half = BigRational::new(BigInt::from(1), BigInt::from(2));
    let t = spec.translate.as_ref().map_or(0, |t| g.index_of(&t.0).unwrap());
    let chars: Vec<Vec<u64>> = spec.chars.iter().map(|c| c.0.clone()).collect();
    Subset::from_fn(Shape::Group(g.clone()), |y| {
        let n = g.coords_of(g.sub_idx(y, t));
        chars.iter().all(|xi| {
            let mut v = BigRational::from_integer(BigInt::from(0));
            for ((a, b), m) in xi.iter().zip(&n).zip(g.factors()) {
                v += BigRational::new(BigInt::from(a * b), BigInt::from(*m));
            }
            let frac = &v - v.floor();
            let dist = if frac > half { BigRational::from_integer(BigInt::from(1)) - &frac } else { frac };
            dist < eps
        })
    })
}

fn conv_naive_counts(a: &Subset, b: &Subset) -> Vec<u64> {
    let g = a.shape().group().unwrap();
    let n = g.order();
    (0..n)
        .map(|k| (0..n).filter(|&s| a.contains(s) && b.contains(g.sub_idx(k, s))).count() as u64)
        .collect()
}

/// `(support, full, Σ|Λ*Λ′ − |Λ′|Λ|)` from the definitional convolution.
pub fn conv_stats_naive(lam: &Subset, lam2: &Subset) -> (usize, usize, u64) {
    let c = conv_naive_counts(lam, lam2);
    let m2 = lam2.count() as u64;
    let support = c.iter().filter(|&&v| v > 0).count();
    let full = c.iter().filter(|&&v| v == m2).count();
    let defect = c.iter().enumerate().map(|(n, &v)| v.abs_diff(if lam.contains(n) { m2 } else { 0 })).sum();
    (support, full, defect)
}

fn density_in_box(e: &Subset2D, rows: &[usize], cols: &[usize]) -> f64 {
    let mut hit = 0;
    for &r in rows {
        for &c in cols {
            hit += e.contains(r, c) as usize;
        }
    }
    hit as f64 / (rows.len() * cols.len()) as f64
}

/// Averages `δ_{Λ′+n⃗}(E)` over every `n⃗ ∈ Λ+x⃗` one by one.
pub fn smoothing_defect_naive(e: &Subset2D, lam: &BohrSpec, lam2: &BohrSpec, x: (usize, usize)) -> f64 {
    let g = lam.group.clone();
    let a: Vec<usize> = bohr_members_naive(lam).iter().collect();
    let b: Vec<usize> = bohr_members_naive(lam2).iter().collect();
    let shift = |s: &[usize], t: usize| s.iter().map(|&v| g.add_idx(v, t)).collect::<Vec<_>>();
    let direct = density_in_box(e, &shift(&a, x.0), &shift(&a, x.1));
    let mut acc = 0.0;
    for &n1 in &shift(&a, x.0) {
        for &n2 in &shift(&a, x.1) {
            acc += density_in_box(e, &shift(&b, n1), &shift(&b, n2));
        }
    }
    (direct - acc / (a.len() * a.len()) as f64).abs()
}

/// `|Λ|` through the naive membership.
pub fn bohr_size_naive(spec: &BohrSpec) -> usize {
    bohr_members_naive(spec).count()
}

/// Quadruple sum `Σ f(x,y) f̄(x′,y) f̄(x,y′) f(x′,y′)`.
pub fn box_norm4_naive(f: &DenseMap2D) -> f64 {
    let n = f.side();
    let mut acc = Complex64::new(0.0, 0.0);
    for x in 0..n {
        for x2 in 0..n {
            for y in 0..n {
                let a = f.at(x, y) * f.at(x2, y).conj();
                if a == Complex64::new(0.0, 0.0) {
                    continue;
                }
                for y2 in 0..n {
                    acc += a * f.at(x, y2).conj() * f.at(x2, y2);
                }
            }
        }
    }
    acc.re
}


/// Triple loop over `(k, m, d)` with explicit coordinates.
pub fn count_corners_naive(a: &Subset2D, mode: crate::corners::CornerMode) -> u64 {
    use crate::corners::CornerMode::*;
    let n = a.side() as i64;
    let inside = |x: i64, y: i64| -> bool {
        match mode {
            GroupNonZero => a.contains(x.rem_euclid(n) as usize, y.rem_euclid(n) as usize),
            _ => (0..n).contains(&x) && (0..n).contains(&y) && a.contains(x as usize, y as usize),
        }
    };
    let ds: Vec<i64> = match mode {
        GroupNonZero => (1..n).collect(),
        GridPositive => (1..n).collect(),
        GridNonZero => (1..n).flat_map(|d| [d, -d]).collect(),
    };
    let mut c = 0;
    for k in 0..n {
        for m in 0..n {
            for &d in &ds {
                if inside(k, m) && inside(k + d, m) && inside(k, m + d) {
                    c += 1;
                }
            }
        }
    }
    c
}

/// `Σ_{s₁,s₂,r} H(s₁,s₂) W(s₁+r, s₂+r) A(s₁, s₂+r)` over `Z_n` coordinates.
pub fn count_l_pattern_naive(h: &Subset2D, w: &Subset2D, a: &Subset2D) -> u64 {
    let g = h.shape().group().unwrap();
    let n = g.order();
    let mut c = 0;
    for s1 in 0..n {
        for s2 in 0..n {
            for r in 0..n {
                let (x, y) = (g.add_idx(s1, r), g.add_idx(s2, r));
                c += (h.contains(s1, s2) && w.contains(x, y) && a.contains(s1, y)) as u64;
            }
        }
    }
    c
}

/// Triple scan over all `(a, b, c)` with `a < b < c`.
pub fn ap3_free_naive(set: &[i64]) -> bool {
    let mut v = set.to_vec();
    v.sort_unstable();
    v.dedup();
    for i in 0..v.len() {
        for j in i + 1..v.len() {
            for k in j + 1..v.len() {
                if v[j] - v[i] == v[k] - v[j] {
                    return false;
                }
            }
        }
    }
    true
}
