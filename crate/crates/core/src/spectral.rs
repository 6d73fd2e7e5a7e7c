//! Fourier analysis on `G`: the unnormalized transform
//! `f̂(ξ) = Σ_x f(x) e(−ξ·x)`, its inverse, convolution and balanced functions.

use num_complex::Complex64;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::group::{Character, GroupSpec};
use crate::sets::{Shape, Subset, Subset2D};

/// Relative tolerance used by every spectral identity check.
pub const SPECTRAL_TOL: f64 = 1e-9;

/// `|l − r| ≤ rel·max(|l|, |r|)`, with an absolute floor of `rel / 1000`
/// so that identities between values near zero are not spuriously rejected.
pub fn close(l: f64, r: f64, rel: f64) -> bool {
    let d = (l - r).abs();
    d <= rel * l.abs().max(r.abs()) || d <= rel * 1e-3
}

pub fn close_c(l: Complex64, r: Complex64, rel: f64) -> bool {
    let d = (l - r).norm();
    d <= rel * l.norm().max(r.norm()) || d <= rel * 1e-3
}

/// A complex function on `G`, indexed by element index.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DenseMap {
    pub group: GroupSpec,
    pub values: Vec<Complex64>,
}

impl DenseMap {
    pub fn new(group: GroupSpec, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != group.order() {
            return Err(Error::ShapeMismatch(format!("{} values for |G| = {}", values.len(), group.order())));
        }
        if values.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
            return Err(Error::InvalidParameter("non-finite value".into()));
        }
        Ok(DenseMap { group, values })
    }

    pub fn zeros(group: GroupSpec) -> Self {
        let n = group.order();
        DenseMap { group, values: vec![Complex64::new(0.0, 0.0); n] }
    }

    pub fn from_fn(group: GroupSpec, f: impl FnMut(usize) -> Complex64) -> Self {
        let values = (0..group.order()).map(f).collect();
        DenseMap { group, values }
    }

    pub fn from_real(group: GroupSpec, f: impl Fn(usize) -> f64) -> Self {
        DenseMap::from_fn(group, |i| Complex64::new(f(i), 0.0))
    }

    pub fn indicator(set: &Subset) -> Result<Self> {
        let g = set.shape().require_group()?.clone();
        Ok(DenseMap::from_real(g, |i| if set.contains(i) { 1.0 } else { 0.0 }))
    }

    /// `Σ |f|²`.
    pub fn l2_sq(&self) -> f64 {
        self.values.iter().map(|v| v.norm_sqr()).sum()
    }

    pub fn sum(&self) -> Complex64 {
        self.values.iter().sum()
    }

    /// The `[re, im]` array form used on disk.
    pub fn values_json(&self) -> String {
        serde_json::to_string(&self.values).expect("complex values serialize")
    }

    pub fn from_values_json(group: GroupSpec, s: &str) -> Result<Self> {
        let values: Vec<Complex64> = serde_json::from_str(s).map_err(|e| Error::Decode(e.to_string()))?;
        DenseMap::new(group, values)
    }
}

/// A complex function on `G×G` (or the grid), row-major at `x·N + y`.
#[derive(Clone, Debug, PartialEq)]
pub struct DenseMap2D {
    pub shape: Shape,
    pub values: Vec<Complex64>,
}

impl DenseMap2D {
    pub fn new(shape: Shape, values: Vec<Complex64>) -> Result<Self> {
        let n = shape.side();
        if values.len() != n * n {
            return Err(Error::ShapeMismatch(format!("{} values for side {n}", values.len())));
        }
        Ok(DenseMap2D { shape, values })
    }

    pub fn zeros(shape: Shape) -> Self {
        let n = shape.side();
        DenseMap2D { shape, values: vec![Complex64::new(0.0, 0.0); n * n] }
    }

    pub fn from_fn(shape: Shape, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let n = shape.side();
        let values = (0..n * n).map(|i| f(i / n, i % n)).collect();
        DenseMap2D { shape, values }
    }

    #[inline]
    pub fn side(&self) -> usize {
        self.shape.side()
    }

    #[inline]
    pub fn at(&self, x: usize, y: usize) -> Complex64 {
        self.values[x * self.side() + y]
    }

    pub fn add(&self, other: &DenseMap2D) -> Result<DenseMap2D> {
        if self.shape != other.shape {
            return Err(Error::ShapeMismatch("planes differ".into()));
        }
        let values = self.values.iter().zip(&other.values).map(|(a, b)| a + b).collect();
        Ok(DenseMap2D { shape: self.shape.clone(), values })
    }

    pub fn scale(&self, c: Complex64) -> DenseMap2D {
        DenseMap2D { shape: self.shape.clone(), values: self.values.iter().map(|v| v * c).collect() }
    }

    pub fn sum(&self) -> Complex64 {
        self.values.iter().sum()
    }
}

/// In-place transform along every axis of a mixed-radix array.
fn transform_axes(values: &mut [Complex64], dims: &[usize], inverse: bool) {
    let total: usize = dims.iter().product();
    debug_assert_eq!(total, values.len());
    let mut planner = FftPlanner::<f64>::new();
    let mut stride = total;
    for &n in dims {
        stride /= n;
        if n == 1 {
            continue;
        }
        let fft = if inverse { planner.plan_fft_inverse(n) } else { planner.plan_fft_forward(n) };
        let mut line = vec![Complex64::new(0.0, 0.0); n];
        let mut scratch = vec![Complex64::new(0.0, 0.0); fft.get_inplace_scratch_len()];
        let block = n * stride;
        for base in (0..total).step_by(block) {
            for off in 0..stride {
                let start = base + off;
                for (k, slot) in line.iter_mut().enumerate() {
                    *slot = values[start + k * stride];
                }
                fft.process_with_scratch(&mut line, &mut scratch);
                for (k, v) in line.iter().enumerate() {
                    values[start + k * stride] = *v;
                }
            }
        }
    }
}

fn dims_of(g: &GroupSpec) -> Vec<usize> {
    g.factors().iter().map(|&n| n as usize).collect()
}

/// `f̂(ξ) = Σ_x f(x) e(−ξ·x)`, no normalization.
pub fn dft(f: &DenseMap) -> DenseMap {
    let mut values = f.values.clone();
    transform_axes(&mut values, &dims_of(&f.group), false);
    DenseMap { group: f.group.clone(), values }
}

/// `f(x) = (1/N) Σ_ξ f̂(ξ) e(ξ·x)`.
pub fn idft(fh: &DenseMap) -> DenseMap {
    let mut values = fh.values.clone();
    transform_axes(&mut values, &dims_of(&fh.group), true);
    let inv = 1.0 / fh.group.order() as f64;
    for v in values.iter_mut() {
        *v *= inv;
    }
    DenseMap { group: fh.group.clone(), values }
}

/// Transform of a function on `G×G`, indexed by `(ξ₁, ξ₂)` row-major.
pub fn dft2(f: &DenseMap2D) -> Result<DenseMap2D> {
    let g = f.shape.require_group()?;
    let mut dims = dims_of(g);
    dims.extend(dims_of(g));
    let mut values = f.values.clone();
    transform_axes(&mut values, &dims, false);
    Ok(DenseMap2D { shape: f.shape.clone(), values })
}

/// `(f*g)(n) = Σ_s f(s) g(n−s)`, evaluated through the transform.
pub fn convolve(f: &DenseMap, g: &DenseMap) -> Result<DenseMap> {
    if f.group != g.group {
        return Err(Error::ShapeMismatch(format!("{} vs {}", f.group, g.group)));
    }
    let (fh, gh) = (dft(f), dft(g));
    let prod = fh.values.iter().zip(&gh.values).map(|(a, b)| a * b).collect();
    Ok(idft(&DenseMap { group: f.group.clone(), values: prod }))
}

/// `f(s) = (A(s) − δ)Λ(s)` with `δ = |A|/|Λ|`.
pub fn balanced(a: &Subset, lambda: &Subset) -> Result<DenseMap> {
    a.same_shape(lambda)?;
    let g = lambda.shape().require_group()?.clone();
    if lambda.count() == 0 {
        return Err(Error::InvalidParameter("empty ambient set".into()));
    }
    if !a.is_subset(lambda) {
        return Err(Error::Containment("A is not contained in the ambient set".into()));
    }
    let delta = a.count() as f64 / lambda.count() as f64;
    Ok(DenseMap::from_real(g, |s| match (a.contains(s), lambda.contains(s)) {
        (true, _) => 1.0 - delta,
        (false, true) => -delta,
        (false, false) => 0.0,
    }))
}

/// `f(x,y) = (A(x,y) − δ)·(E₁×E₂)(x,y)` with `δ` the density of `A` in `E₁×E₂`.
pub fn balanced2d(a: &Subset2D, e1: &Subset, e2: &Subset) -> Result<DenseMap2D> {
    a.within_product(e1, e2)?;
    let size = e1.count() * e2.count();
    if size == 0 {
        return Err(Error::InvalidParameter("empty product set".into()));
    }
    let delta = a.count() as f64 / size as f64;
    Ok(DenseMap2D::from_fn(a.shape().clone(), |x, y| {
        let v = if !(e1.contains(x) && e2.contains(y)) {
            0.0
        } else if a.contains(x, y) {
            1.0 - delta
        } else {
            -delta
        };
        Complex64::new(v, 0.0)
    }))
}

/// `|f̂(ξ)|` for every character.
pub fn spectrum_magnitudes(f: &DenseMap) -> Vec<f64> {
    dft(f).values.iter().map(|v| v.norm()).collect()
}

/// Largest `|f̂(ξ)|` over characters with `allowed(ξ)`, ties to the smallest index.
pub fn max_fourier_coeff_where(f: &DenseMap, allowed: impl Fn(usize) -> bool) -> Option<(Character, f64)> {
    let mags = spectrum_magnitudes(f);
    let scale: f64 = f.values.iter().map(|v| v.norm()).sum::<f64>().max(1.0);
    let tol = 1e-12 * scale;
    let mut best: Option<(usize, f64)> = None;
    for (i, &m) in mags.iter().enumerate() {
        if !allowed(i) {
            continue;
        }
        match best {
            Some((_, b)) if m <= b + tol => {}
            _ => best = Some((i, m)),
        }
    }
    best.map(|(i, m)| (f.group.character_at(i), m))
}

/// `(ξ, |f̂(ξ)|)` maximizing the magnitude; ties go to the smallest index.
pub fn max_fourier_coeff(f: &DenseMap) -> (Character, f64) {
    max_fourier_coeff_where(f, |_| true).expect("a group has at least one character")
}
