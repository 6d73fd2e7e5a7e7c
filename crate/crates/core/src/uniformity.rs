//! Uniformity diagnostics: Fourier bias, the box norm in both Gram forms,
//! rectilinear uniformity, the localized box norm over Bohr windows, and the
//! `(α, ε)`-uniformity conditions of a subset of a Bohr set.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bohr::{is_attendant, BohrSet, BohrSpec};
use crate::error::{Error, Result};
use crate::group::GroupSpec;
use crate::sets::{Shape, Subset, Subset2D};
use crate::spectral::{self, balanced, balanced2d, dft, DenseMap, DenseMap2D};

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BiasVerdict {
    /// `‖f̂‖∞ / |Λ|`.
    pub bias: f64,
    pub uniform: bool,
}

/// `‖f̂‖∞ ≤ α|Λ|` for `f` supported on `Λ` with values in the unit disk.
pub fn is_alpha_uniform(f: &DenseMap, lam: &Subset, alpha: f64) -> Result<BiasVerdict> {
    if lam.shape().group() != Some(&f.group) {
        return Err(Error::ShapeMismatch("function and ambient set differ in group".into()));
    }
    for (i, v) in f.values.iter().enumerate() {
        if !lam.contains(i) && v.norm() > 1e-12 {
            return Err(Error::Containment(format!("f is nonzero at {i}, outside the ambient set")));
        }
        if v.norm() > 1.0 + 1e-12 {
            return Err(Error::InvalidParameter(format!("|f({i})| = {} exceeds 1", v.norm())));
        }
    }
    if lam.count() == 0 {
        return Err(Error::InvalidParameter("empty ambient set".into()));
    }
    let bias = spectral::max_fourier_coeff(f).1 / lam.count() as f64;
    Ok(BiasVerdict { bias, uniform: bias <= alpha })
}

/// Sum of `|Gram(a, b)|²` over all pairs of rows of `rows`, where each row
/// is a length-`n` slice; rows that vanish are skipped.
fn gram_energy(rows: &[Vec<Complex64>]) -> f64 {
    let live: Vec<&Vec<Complex64>> = rows.iter().filter(|r| r.iter().any(|v| *v != ZERO)).collect();
    let per_row: Vec<f64> = live
        .par_iter()
        .map(|a| {
            live.iter()
                .map(|b| a.iter().zip(b.iter()).map(|(x, y)| x * y.conj()).sum::<Complex64>().norm_sqr())
                .sum()
        })
        .collect();
    per_row.iter().sum()
}

/// `Σ_{x,x′,y,y′} f(x,y) f̄(x′,y) f̄(x,y′) f(x′,y′)`, evaluated as
/// `Σ_{x,x′} |Σ_y f(x,y) f̄(x′,y)|²` in `O(N³)`.
pub fn box_norm4(f: &DenseMap2D) -> f64 {
    let n = f.side();
    let rows: Vec<Vec<Complex64>> = (0..n).map(|x| f.values[x * n..(x + 1) * n].to_vec()).collect();
    gram_energy(&rows)
}

/// `Σ_{m,p} |Σ_k f(k,m) f̄(k,p)|²`: the same quantity through column pairs.
pub fn box_norm4_pairform(f: &DenseMap2D) -> f64 {
    let n = f.side();
    let cols: Vec<Vec<Complex64>> = (0..n).map(|m| (0..n).map(|k| f.at(k, m)).collect()).collect();
    gram_energy(&cols)
}

/// The norm itself, `(box_norm4)^{1/4}`.
pub fn box_norm(f: &DenseMap2D) -> f64 {
    box_norm4(f).max(0.0).powf(0.25)
}

fn indicator2d(a: &Subset2D) -> DenseMap2D {
    DenseMap2D::from_fn(a.shape().clone(), |x, y| Complex64::new(a.contains(x, y) as u8 as f64, 0.0))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct UniformityVerdicts {
    /// `ratio ≤ α` (threshold on the balanced function).
    pub rect_uniform: bool,
    /// Box norm of the indicator at most `(δ⁴ + α)|E₁|²|E₂|²`.
    pub indicator_form: bool,
    /// `‖f̂‖∞ ≤ α|E₁||E₂|` in group mode.
    pub fourier_uniform: Option<bool>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct UniformityReport {
    pub a_size: usize,
    pub e1_size: usize,
    pub e2_size: usize,
    pub density: f64,
    pub alpha: f64,
    /// `‖f̂‖∞/(|E₁||E₂|)` of the balanced function on `G×G`; `None` on a grid.
    pub alpha_bias: Option<f64>,
    pub box_norm4: f64,
    /// `box_norm4 / (|E₁|²|E₂|²)`.
    pub rect_ratio: f64,
    /// Box norm of the indicator of `A`, same normalization.
    pub indicator_ratio: f64,
    pub verdicts: UniformityVerdicts,
}

/// `(ratio ≤ α, ratio)` with `ratio = box_norm4(balanced)/(|E₁|²|E₂|²)`.
pub fn rect_alpha_uniform(a: &Subset2D, e1: &Subset, e2: &Subset, alpha: f64) -> Result<(bool, f64)> {
    let f = balanced2d(a, e1, e2)?;
    let ratio = box_norm4(&f) / ((e1.count() * e2.count()) as f64).powi(2);
    Ok((ratio <= alpha, ratio))
}

pub fn uniformity_report(a: &Subset2D, e1: &Subset, e2: &Subset, alpha: f64) -> Result<UniformityReport> {
    let f = balanced2d(a, e1, e2)?;
    let size = (e1.count() * e2.count()) as f64;
    let bn = box_norm4(&f);
    let rect_ratio = bn / (size * size);
    let indicator_ratio = box_norm4(&indicator2d(a)) / (size * size);
    let density = a.count() as f64 / size;
    let alpha_bias = match a.shape() {
        Shape::Group(_) => {
            let fh = spectral::dft2(&f)?;
            Some(fh.values.iter().map(|v| v.norm()).fold(0.0, f64::max) / size)
        }
        Shape::Grid(_) => None,
    };
    Ok(UniformityReport {
        a_size: a.count(),
        e1_size: e1.count(),
        e2_size: e2.count(),
        density,
        alpha,
        alpha_bias,
        box_norm4: bn,
        rect_ratio,
        indicator_ratio,
        verdicts: UniformityVerdicts {
            rect_uniform: rect_ratio <= alpha,
            indicator_form: indicator_ratio <= density.powi(4) + alpha,
            fourier_uniform: alpha_bias.map(|b| b <= alpha),
        },
    })
}

/// Evaluation strategy for [`localized_box_norm4`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum LocalizedMethod {
    /// Nested loops straight from the definition; refused for `N > 64`.
    Definitional,
    /// Factored through the shifted Gram tables `T_w(m, u)`.
    Factored,
}

pub const DEFINITIONAL_MAX_SIDE: usize = 64;

/// `Σ_{i∈I} Σ_{j∈J} Σ_k Σ_{m,u} K(m−k−i) K(u−k−i) |Σ_r K(k+r−j) f(r,m) f̄(r,u)|²`
/// for an arbitrary kernel set `K` (the attendant, centered at 0).
pub fn localized_box_norm4_sets(
    f: &DenseMap2D,
    g: &GroupSpec,
    i_set: &[usize],
    j_set: &[usize],
    kernel: &[usize],
    method: LocalizedMethod,
) -> Result<f64> {
    let n = f.side();
    if n != g.order() {
        return Err(Error::ShapeMismatch("function side differs from group order".into()));
    }
    match method {
        LocalizedMethod::Definitional => {
            if n > DEFINITIONAL_MAX_SIDE {
                return Err(Error::InvalidParameter(format!(
                    "definitional evaluation is limited to N <= {DEFINITIONAL_MAX_SIDE}"
                )));
            }
            Ok(localized_definitional(f, g, i_set, j_set, kernel))
        }
        LocalizedMethod::Factored => Ok(localized_factored(f, g, i_set, j_set, kernel)),
    }
}

fn localized_definitional(f: &DenseMap2D, g: &GroupSpec, i_set: &[usize], j_set: &[usize], kernel: &[usize]) -> f64 {
    let n = g.order();
    let mut inside = vec![false; n];
    for &t in kernel {
        inside[t] = true;
    }
    let partial: Vec<f64> = i_set
        .par_iter()
        .map(|&i| {
            let mut acc = 0.0;
            for &j in j_set {
                for k in 0..n {
                    let base = g.add_idx(k, i);
                    for m in 0..n {
                        if !inside[g.sub_idx(m, base)] {
                            continue;
                        }
                        for u in 0..n {
                            if !inside[g.sub_idx(u, base)] {
                                continue;
                            }
                            let mut s = ZERO;
                            for r in 0..n {
                                if inside[g.sub_idx(g.add_idx(k, r), j)] {
                                    s += f.at(r, m) * f.at(r, u).conj();
                                }
                            }
                            acc += s.norm_sqr();
                        }
                    }
                }
            }
            acc
        })
        .collect();
    partial.iter().sum()
}

fn localized_factored(f: &DenseMap2D, g: &GroupSpec, i_set: &[usize], j_set: &[usize], kernel: &[usize]) -> f64 {
    let n = g.order();
    // w[a * n + w] = Σ_{m,u ∈ K+a} |T_w(m,u)|², T_w(m,u) = Σ_{r ∈ K−w} f(r,m) f̄(r,u).
    let columns: Vec<Vec<Complex64>> = (0..n).map(|w| {
        let rows: Vec<usize> = kernel.iter().map(|&t| g.sub_idx(t, w)).collect();
        let mut tw = vec![ZERO; n * n];
        for &r in &rows {
            let row = &f.values[r * n..(r + 1) * n];
            for m in 0..n {
                let a = row[m];
                if a == ZERO {
                    continue;
                }
                for u in 0..n {
                    tw[m * n + u] += a * row[u].conj();
                }
            }
        }
        tw
    }).collect::<Vec<_>>();
    let table: Vec<Vec<f64>> = columns
        .par_iter()
        .map(|tw| {
            (0..n)
                .map(|a| {
                    let pts: Vec<usize> = kernel.iter().map(|&t| g.add_idx(t, a)).collect();
                    let mut s = 0.0;
                    for &m in &pts {
                        for &u in &pts {
                            s += tw[m * n + u].norm_sqr();
                        }
                    }
                    s
                })
                .collect()
        })
        .collect();
    let mut total = 0.0;
    for &i in i_set {
        for &j in j_set {
            for k in 0..n {
                total += table[g.sub_idx(k, j)][g.add_idx(k, i)];
            }
        }
    }
    total
}

/// The localized box norm `‖f‖⁴_{Λ₁×Λ₂, ε}` with `Λ′` an `ε`-attendant of `Λ₁`.
pub fn localized_box_norm4(
    f: &DenseMap2D,
    lam1: &BohrSpec,
    lam2: &BohrSpec,
    attendant: &BohrSpec,
    eps: f64,
    method: LocalizedMethod,
) -> Result<f64> {
    let g = f.shape.require_group()?.clone();
    if lam1.group != g || lam2.group != g {
        return Err(Error::ShapeMismatch("Bohr sets live in a different group".into()));
    }
    if !is_attendant(attendant, lam1, eps) {
        return Err(Error::NotAttendant(format!("radius {} vs parent {}", attendant.eps, lam1.eps)));
    }
    let i_set: Vec<usize> = BohrSet::new(lam1).members().iter().collect();
    let j_set: Vec<usize> = BohrSet::new(lam2).members().iter().collect();
    let kernel = BohrSet::new(attendant).centered_indices();
    localized_box_norm4_sets(f, &g, &i_set, &j_set, &kernel, method)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AeUniformityReport {
    pub density: f64,
    pub alpha: f64,
    /// `|B|`, `B = {m ∈ Λ : ‖(Q∩(Λ′+m) − δ(Λ′+m))^‖∞ ≥ α|Λ′|}`.
    pub bad_set_size: usize,
    /// `|Λ|⁻¹ Σ_{m∈Λ} |δ_{Λ′+m}(Q) − δ|²`.
    pub mean_square_dev: f64,
    /// `‖(Q∩Λ − δΛ)^‖∞`.
    pub global_bias: f64,
    pub lambda_size: usize,
    pub attendant_size: usize,
    pub attendant: BohrSpec,
    pub bad_set_ok: bool,
    pub mean_square_ok: bool,
    pub global_bias_ok: bool,
    pub uniform: bool,
}

/// `max_ξ |Σ_x (Q(x) − δ) K(x − m) e(−ξ·x)|` for each shift `m`.
fn local_biases(q: &Subset, kernel: &[usize], shifts: &[usize], delta: f64) -> Vec<f64> {
    let g = q.shape().group().expect("group mode").clone();
    shifts
        .par_iter()
        .map(|&m| {
            let mut h = DenseMap::zeros(g.clone());
            for &t in kernel {
                let x = g.add_idx(t, m);
                h.values[x] = Complex64::new(q.contains(x) as u8 as f64 - delta, 0.0);
            }
            dft(&h).values.iter().map(|v| v.norm()).fold(0.0, f64::max)
        })
        .collect()
}

fn local_densities(q: &Subset, kernel: &[usize], shifts: &[usize]) -> Vec<f64> {
    let g = q.shape().group().expect("group mode");
    shifts
        .iter()
        .map(|&m| kernel.iter().filter(|&&t| q.contains(g.add_idx(t, m))).count() as f64 / kernel.len() as f64)
        .collect()
}

fn members_of(spec: &BohrSpec) -> (Subset, Vec<usize>) {
    let set = BohrSet::new(spec);
    let m = set.members().clone();
    let v = m.iter().collect();
    (m, v)
}

/// The three `(α, ε)`-uniformity conditions of `Q ⊆ Λ` with respect to a
/// supplied `ε`-attendant `Λ′`.
pub fn ae_uniformity(q: &Subset, lam: &BohrSpec, attendant: &BohrSpec, eps: f64, alpha: f64) -> Result<AeUniformityReport> {
    if !is_attendant(attendant, lam, eps) {
        return Err(Error::NotAttendant(format!("radius {} is not an {eps}-attendant of {}", attendant.eps, lam.eps)));
    }
    let (lam_set, lam_pts) = members_of(lam);
    if !q.is_subset(&lam_set) {
        return Err(Error::Containment("Q is not contained in the Bohr set".into()));
    }
    let kernel = BohrSet::new(attendant).centered_indices();
    let delta = q.count() as f64 / lam_pts.len() as f64;
    let biases = local_biases(q, &kernel, &lam_pts, delta);
    let thr = alpha * kernel.len() as f64;
    let bad = biases.iter().filter(|&&b| b >= thr).count();
    let dens = local_densities(q, &kernel, &lam_pts);
    let msd = dens.iter().map(|d| (d - delta).powi(2)).sum::<f64>() / lam_pts.len() as f64;
    let global_bias = spectral::max_fourier_coeff(&balanced(q, &lam_set)?).1;
    let size = lam_pts.len() as f64;
    let bad_set_ok = bad as f64 <= alpha * size;
    let mean_square_ok = msd <= alpha * alpha;
    let global_bias_ok = global_bias <= alpha * size;
    Ok(AeUniformityReport {
        density: delta,
        alpha,
        bad_set_size: bad,
        mean_square_dev: msd,
        global_bias,
        lambda_size: lam_pts.len(),
        attendant_size: kernel.len(),
        attendant: attendant.clone(),
        bad_set_ok,
        mean_square_ok,
        global_bias_ok,
        uniform: bad_set_ok && mean_square_ok && global_bias_ok,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RectangleReport {
    /// Slices `l ∈ Λ₁` whose localized norm exceeds the threshold.
    pub bad: Vec<usize>,
    pub threshold: f64,
    pub norms: Vec<(usize, f64)>,
    pub lambda1_size: usize,
    pub uniform: bool,
}

/// Rectilinear `(α, α₁, ε)`-uniformity of `A ⊆ E₁×E₂`: the slices
/// `f_l(s) = f(s₁+l, s₂)Λ′(s₁)` are measured with `Λ″ = Λ′_ε` as kernel.
#[allow(clippy::too_many_arguments)]
pub fn rect_aae_uniform(
    a: &Subset2D,
    e1: &Subset,
    e2: &Subset,
    lam1: &BohrSpec,
    lam2: &BohrSpec,
    lam_p: &BohrSpec,
    lam_pp: &BohrSpec,
    eps: f64,
    alpha: f64,
    alpha1: f64,
) -> Result<RectangleReport> {
    if !is_attendant(lam_p, lam1, eps) || !is_attendant(lam_pp, lam_p, eps) {
        return Err(Error::NotAttendant("attendant chain Λ₁ → Λ′ → Λ″ is invalid".into()));
    }
    let g = a.shape().require_group()?.clone();
    let (l1_set, l1) = members_of(lam1);
    let (l2_set, l2) = members_of(lam2);
    if !e1.is_subset(&l1_set) || !e2.is_subset(&l2_set) {
        return Err(Error::Containment("E₁, E₂ must lie in Λ₁, Λ₂".into()));
    }
    let f = balanced2d(a, e1, e2)?;
    let beta1 = e1.count() as f64 / l1.len() as f64;
    let beta2 = e2.count() as f64 / l2.len() as f64;
    let kp = BohrSet::new(lam_p).centered_indices();
    let kpp = BohrSet::new(lam_pp).centered_indices();
    let threshold = alpha
        * (beta1 * beta2).powi(2)
        * (kpp.len() as f64).powi(4)
        * (kp.len() as f64).powi(2)
        * l2.len() as f64;
    let n = g.order();
    let mut in_kp = vec![false; n];
    for &t in &kp {
        in_kp[t] = true;
    }
    let mut norms = Vec::with_capacity(l1.len());
    for &l in &l1 {
        let fl = DenseMap2D::from_fn(a.shape().clone(), |s1, s2| if in_kp[s1] { f.at(g.add_idx(s1, l), s2) } else { ZERO });
        let v = localized_box_norm4_sets(&fl, &g, &kp, &l2, &kpp, LocalizedMethod::Factored)?;
        norms.push((l, v));
    }
    let bad: Vec<usize> = norms.iter().filter(|(_, v)| *v > threshold).map(|(l, _)| *l).collect();
    Ok(RectangleReport {
        uniform: bad.len() as f64 <= alpha1 * l1.len() as f64,
        bad,
        threshold,
        norms,
        lambda1_size: l1.len(),
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExceptionReport {
    pub exceptions: usize,
    /// `α^{2/3}|Λ′|`.
    pub deviation_threshold: f64,
    /// `α^{2/3}|S|`.
    pub bound: f64,
    pub within_bound: bool,
}

/// Number of `k` with `|(E*g)(k) − δ(Λ′*g)(k)| > α^{2/3}|Λ′|` for `E ⊆ Λ′`
/// α-uniform and `g : S → [−1, 1]`.
pub fn conv_deviation_exceptions(e: &Subset, lam: &Subset, s: &Subset, g: &DenseMap, alpha: f64) -> Result<ExceptionReport> {
    if !e.is_subset(lam) {
        return Err(Error::Containment("E must lie in the Bohr set".into()));
    }
    for (i, v) in g.values.iter().enumerate() {
        if v.im.abs() > 1e-12 || v.re.abs() > 1.0 + 1e-12 || (!s.contains(i) && v.re != 0.0) {
            return Err(Error::InvalidParameter(format!("g({i}) = {v} is not a function S -> [-1,1]")));
        }
    }
    let f = balanced(e, lam)?;
    let v = is_alpha_uniform(&f, lam, alpha)?;
    if !v.uniform {
        return Err(Error::Precondition(format!("E has bias {} above alpha = {alpha}", v.bias)));
    }
    let dev = spectral::convolve(&f, g)?;
    let thr = alpha.powf(2.0 / 3.0) * lam.count() as f64;
    let exceptions = dev.values.iter().filter(|z| z.norm() > thr).count();
    let bound = alpha.powf(2.0 / 3.0) * s.count() as f64;
    Ok(ExceptionReport { exceptions, deviation_threshold: thr, bound, within_bound: exceptions as f64 <= bound })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IntermediateReport {
    pub lambda_size: usize,
    pub omega1: usize,
    pub omega2: usize,
    /// Shifts `s` for which `(Q−s)∩Λ′` fails `(8α^{1/4}, ε)`-uniformity with
    /// `Λ″` as the witness attendant (a superset of the exact set).
    pub omega_tilde: usize,
    /// Hypothesis of part 1: `|Λ|⁻¹ Σ_n |δ_{Λ″+n}(Q) − δ|² ≤ α²`.
    pub t1: bool,
    /// Hypothesis of part 2: `|Ω*| ≤ α|Λ|`.
    pub t2: bool,
    /// Hypothesis of part 3: `Q` is `(α, ε²)`-uniform through `Λ″`.
    pub t3: bool,
    pub omega1_bound: f64,
    pub omega2_bound: f64,
    pub omega_tilde_bound: f64,
}

impl IntermediateReport {
    /// Each conclusion holds whenever its hypothesis does.
    pub fn consistent(&self) -> bool {
        (!self.t1 || self.omega1 as f64 <= self.omega1_bound)
            && (!self.t2 || self.omega2 as f64 <= self.omega2_bound)
            && (!self.t3 || self.omega_tilde as f64 <= self.omega_tilde_bound)
    }
}

/// `Λ′` an `ε`-attendant of `Λ` and `Λ″` simultaneously an `ε`-attendant
/// of `Λ′` and an `ε²`-attendant of `Λ`, with `ε = α²/(400d)`.
pub fn intermediate_attendants(lam: &BohrSpec, alpha: f64) -> Result<(BohrSpec, BohrSpec)> {
    let eps = alpha * alpha / (400.0 * lam.dim().max(1) as f64);
    let lp = crate::bohr::attendant(lam, eps, &[])?;
    let lo = (eps * eps * lam.eps / 2.0).max(eps * lp.eps / 2.0);
    let hi = eps * lp.eps;
    let r = crate::bohr::find_regular_in(&lam.group, &lam.chars, lo, hi, lam.kappa)?;
    let lpp = BohrSpec::new(lam.group.clone(), lam.chars.clone(), r, lam.kappa)?;
    Ok((lp, lpp))
}

/// Enumerates `Ω₁`, `Ω₂` and `Ω̃` for `Q ⊆ Λ` with attendants `Λ′`, `Λ″`.
pub fn intermediate_sets(q: &Subset, lam: &BohrSpec, lam_p: &BohrSpec, lam_pp: &BohrSpec, alpha: f64) -> Result<IntermediateReport> {
    let d = lam.dim().max(1) as f64;
    let eps = alpha * alpha / (400.0 * d);
    if !is_attendant(lam_p, lam, eps) || !is_attendant(lam_pp, lam_p, eps) || !is_attendant(lam_pp, lam, eps * eps) {
        return Err(Error::NotAttendant("Λ′, Λ″ do not form the required attendant chain".into()));
    }
    let g = q.shape().require_group()?.clone();
    let (lam_set, pts) = members_of(lam);
    if !q.is_subset(&lam_set) {
        return Err(Error::Containment("Q is not contained in the Bohr set".into()));
    }
    let size = pts.len() as f64;
    let delta = q.count() as f64 / size;
    let kp = BohrSet::new(lam_p).centered_indices();
    let kpp = BohrSet::new(lam_pp).centered_indices();
    let n = g.order();
    let all: Vec<usize> = (0..n).collect();
    let dpp = local_densities(q, &kpp, &all);
    let dp = local_densities(q, &kp, &pts);
    let sa = alpha.sqrt();

    let t1 = pts.iter().map(|&m| (dpp[m] - delta).powi(2)).sum::<f64>() / size <= alpha * alpha;
    let mut omega1 = 0;
    for (idx, &s) in pts.iter().enumerate() {
        let inner = kp.iter().map(|&t| (dpp[g.add_idx(t, s)] - delta).powi(2)).sum::<f64>() / kp.len() as f64;
        if (dp[idx] - delta).abs() >= 4.0 * sa || inner >= 4.0 * sa {
            omega1 += 1;
        }
    }

    let bpp = local_biases(q, &kpp, &pts, delta);
    let omega_star = bpp.iter().filter(|&&b| b >= alpha * kpp.len() as f64).count();
    let t2 = omega_star as f64 <= alpha * size;
    let bp = local_biases(q, &kp, &pts, delta);
    let omega2 = bp.iter().filter(|&&b| b >= 4.0 * alpha.powf(0.25) * kp.len() as f64).count();

    let lam_pp_eps2 = ae_uniformity(q, lam, lam_pp, eps * eps, alpha)?;
    let t3 = lam_pp_eps2.uniform;
    let a8 = 8.0 * alpha.powf(0.25);
    let centered_p = lam_p.clone();
    let mut p_no_translate = centered_p;
    p_no_translate.translate = None;
    let kp_set = BohrSet::new(&p_no_translate).members().clone();
    let omega_tilde = pts
        .par_iter()
        .filter(|&&s| {
            let shifted = Subset::from_fn(Shape::Group(g.clone()), |x| kp_set.contains(x) && q.contains(g.add_idx(x, s)));
            match ae_uniformity(&shifted, &p_no_translate, lam_pp, eps, a8) {
                Ok(r) => !r.uniform,
                Err(_) => true,
            }
        })
        .count();

    Ok(IntermediateReport {
        lambda_size: pts.len(),
        omega1,
        omega2,
        omega_tilde,
        t1,
        t2,
        t3,
        omega1_bound: 4.0 * sa * size,
        omega2_bound: 4.0 * sa * size,
        omega_tilde_bound: 8.0 * sa * size,
    })
}
