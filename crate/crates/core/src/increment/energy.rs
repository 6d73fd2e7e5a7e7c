//! L² machinery inside Bohr sets: the easy-case split, the
//! character-adjoining increment, and the energy lower bounds.

use num_rational::BigRational;
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

use super::nonuniform::{int, rat};
use crate::bohr::{attendant, is_attendant, BohrSet, BohrSpec};
use crate::error::{Error, Result};
use crate::group::{Character, GroupSpec};
use crate::sets::{Subset, Subset2D};
use crate::spectral::{balanced, max_fourier_coeff_where};

fn radius_factor(lam: &BohrSpec, kappa: f64) -> f64 {
    kappa / (100.0 * lam.dim().max(1) as f64)
}

fn require_attendant(child: &BohrSpec, parent: &BohrSpec, eps: f64) -> Result<()> {
    if !is_attendant(child, parent, eps) {
        return Err(Error::NotAttendant(format!(
            "radius {} is not a regular {eps:e}-attendant of radius {}",
            child.eps, parent.eps
        )));
    }
    Ok(())
}

/// `|E ∩ (K + n)| / |K|` for each `n` in `shifts`, `K` given centered.
pub(crate) fn local_densities(e: &Subset, g: &GroupSpec, kernel: &[usize], shifts: &[usize]) -> Vec<f64> {
    shifts
        .iter()
        .map(|&n| kernel.iter().filter(|&&t| e.contains(g.add_idx(t, n))).count() as f64 / kernel.len() as f64)
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EasyCaseReport {
    pub delta: f64,
    pub eta: f64,
    pub kappa: f64,
    /// `|B|`, shifts where `A` is `η`-sparse relative to `C`.
    pub bad_set_size: usize,
    /// `Σ_{s∉B} |A∩((Λ′+s)×Λ₂)|`.
    pub lhs: u64,
    /// `δΣ_{s∉B}|C∩…| + ηΣ_{s∈B}|C∩…| − 4κ|Λ′||Λ₁||Λ₂|`.
    pub rhs: f64,
    pub holds: bool,
}

/// Enumerates both sides of the easy-case inequality for `A ⊆ C ⊆ Λ₁×Λ₂`.
pub fn easy_case_split(
    a: &Subset2D,
    c: &Subset2D,
    lam1: &BohrSpec,
    lam2: &BohrSpec,
    lam_p: &BohrSpec,
    eta: f64,
) -> Result<EasyCaseReport> {
    if !(eta.is_finite() && eta > 0.0) {
        return Err(Error::InvalidParameter(format!("eta must be positive, got {eta}")));
    }
    let g = a.shape().require_group()?.clone();
    if lam1.group != g || lam2.group != g {
        return Err(Error::ShapeMismatch("Bohr sets live in a different group".into()));
    }
    require_attendant(lam_p, lam1, radius_factor(lam1, lam1.kappa))?;
    let s1 = BohrSet::new(lam1).members().clone();
    let s2 = BohrSet::new(lam2).members().clone();
    if !s1.is_subset(&s2) {
        return Err(Error::Containment("the first Bohr set must lie inside the second".into()));
    }
    let box_ = Subset2D::product(&s1, &s2)?;
    if !a.is_subset(c) || !c.is_subset(&box_) {
        return Err(Error::Containment("need A ⊆ C ⊆ Λ₁×Λ₂".into()));
    }
    if c.count() == 0 {
        return Err(Error::InvalidParameter("C is empty".into()));
    }
    let n = g.order();
    let row_a: Vec<u64> = (0..n).map(|x| (0..n).filter(|&y| a.contains(x, y)).count() as u64).collect();
    let row_c: Vec<u64> = (0..n).map(|x| (0..n).filter(|&y| c.contains(x, y)).count() as u64).collect();
    let kernel = BohrSet::new(lam_p).centered_indices();
    let delta = int(a.count()) / int(c.count());
    let eta_r = rat(eta);
    let mut lhs = 0u64;
    let mut good_c = 0u64;
    let mut bad_c = 0u64;
    let mut bad = 0usize;
    for s in s1.iter() {
        let sa: u64 = kernel.iter().map(|&t| row_a[g.add_idx(t, s)]).sum();
        let sc: u64 = kernel.iter().map(|&t| row_c[g.add_idx(t, s)]).sum();
        if int(sa as usize) < (&delta - &eta_r) * int(sc as usize) {
            bad += 1;
            bad_c += sc;
        } else {
            lhs += sa;
            good_c += sc;
        }
    }
    let kappa = lam1.kappa;
    let slack = int(4) * rat(kappa) * int(kernel.len()) * int(s1.count()) * int(s2.count());
    let rhs: BigRational = &delta * int(good_c as usize) + &eta_r * int(bad_c as usize) - slack;
    Ok(EasyCaseReport {
        delta: delta.to_f64().unwrap_or(f64::NAN),
        eta,
        kappa,
        bad_set_size: bad,
        lhs,
        rhs: rhs.to_f64().unwrap_or(f64::NAN),
        holds: int(lhs as usize) >= rhs,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FourierIncrement {
    /// The adjoined character `ξ₀`.
    pub xi0: Character,
    pub xi0_index: usize,
    /// `|(Q∩Λ − δΛ)^(ξ₀)| / |Λ|`.
    pub bias: f64,
    pub delta: f64,
    pub lambda_size: usize,
    pub attendant: BohrSpec,
    pub attendant_size: usize,
    pub dim_before: usize,
    pub dim_after: usize,
    /// `|Λ|⁻¹ Σ_{n∈Λ} |δ_{Λ′+n}(Q) − δ|²`.
    pub mean_square_dev: f64,
    /// `α²/4`.
    pub bound: f64,
    pub holds: bool,
}

/// Adjoins the character carrying the largest bias of `Q` inside `Λ`
/// (among those not already in `S`) and passes to a `κ/(100d)`-attendant.
pub fn fourier_increment(q: &Subset, lam: &BohrSpec, alpha: f64, kappa: f64) -> Result<FourierIncrement> {
    if !(alpha > 0.0 && alpha <= 1.0) {
        return Err(Error::InvalidParameter(format!("alpha must lie in (0,1], got {alpha}")));
    }
    if !(kappa > 0.0 && kappa <= alpha / 32.0) {
        return Err(Error::InvalidParameter(format!("kappa = {kappa} must lie in (0, alpha/32]")));
    }
    let g = q.shape().require_group()?.clone();
    if lam.group != g {
        return Err(Error::ShapeMismatch("Q and the Bohr set live in different groups".into()));
    }
    let lam_set = BohrSet::new(lam).members().clone();
    let size = lam_set.count();
    if size == 0 {
        return Err(Error::InvalidParameter("empty Bohr set".into()));
    }
    let q1 = q.intersection(&lam_set)?;
    let delta = q1.count() as f64 / size as f64;
    let s_idx = lam.char_indices();
    let f = balanced(&q1, &lam_set)?;
    let (xi0, mag) = max_fourier_coeff_where(&f, |i| s_idx.binary_search(&i).is_err())
        .ok_or(Error::BiasTooSmall { bias: 0.0, required: alpha })?;
    let bias = mag / size as f64;
    if bias < alpha {
        return Err(Error::BiasTooSmall { bias, required: alpha });
    }
    let xi0_index = g.index_of(&xi0.0)?;
    let lp = attendant(lam, radius_factor(lam, kappa), std::slice::from_ref(&xi0))?;
    let kernel = BohrSet::new(&lp).centered_indices();
    let pts: Vec<usize> = lam_set.iter().collect();
    let dens = local_densities(q, &g, &kernel, &pts);
    let msd = dens.iter().map(|d| (d - delta).powi(2)).sum::<f64>() / size as f64;
    let bound = alpha * alpha / 4.0;
    Ok(FourierIncrement {
        xi0,
        xi0_index,
        bias,
        delta,
        lambda_size: size,
        attendant_size: kernel.len(),
        dim_before: lam.dim(),
        dim_after: lp.dim(),
        attendant: lp,
        mean_square_dev: msd,
        bound,
        holds: msd >= bound,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnergyReport {
    pub delta: f64,
    pub alpha: f64,
    pub kappa: f64,
    pub mean_square_dev: f64,
    /// `|Λ|⁻¹ Σ_{n∈Λ} δ²_{Λ′+n}(Q)`.
    pub energy: f64,
    /// `msd ≥ α`.
    pub big_square: bool,
    /// `δ² + α − 4κ`, asserted when `big_square`.
    pub square_bound: f64,
    pub square_holds: bool,
    /// `δ² − 8κ`, always asserted.
    pub baseline_bound: f64,
    pub baseline_holds: bool,
    /// `‖(Q − δΛ)^‖∞ / |Λ|`.
    pub bias: f64,
    /// Large bias, `κ ≤ α/32`, and `Λ′` generated by a set containing the
    /// maximizing character.
    pub fourier_applicable: bool,
    /// `δ² + α²/4 − 4κ`, asserted when `fourier_applicable`.
    pub fourier_bound: f64,
    pub fourier_holds: bool,
}

impl EnergyReport {
    pub fn consistent(&self) -> bool {
        self.square_holds && self.baseline_holds && self.fourier_holds
    }
}

/// Energy of `Q ⊆ Λ` along translates of a `κ/(100d)`-attendant `Λ′`.
pub fn l2_to_energy(q: &Subset, lam: &BohrSpec, lam_p: &BohrSpec, alpha: f64, kappa: f64) -> Result<EnergyReport> {
    if !(alpha > 0.0 && kappa > 0.0) {
        return Err(Error::InvalidParameter("alpha and kappa must be positive".into()));
    }
    require_attendant(lam_p, lam, radius_factor(lam, kappa))?;
    let g = q.shape().require_group()?.clone();
    let lam_set = BohrSet::new(lam).members().clone();
    if !q.is_subset(&lam_set) {
        return Err(Error::Containment("Q is not contained in the Bohr set".into()));
    }
    let size = lam_set.count();
    let delta = q.count() as f64 / size as f64;
    let kernel = BohrSet::new(lam_p).centered_indices();
    let pts: Vec<usize> = lam_set.iter().collect();
    let dens = local_densities(q, &g, &kernel, &pts);
    let msd = dens.iter().map(|d| (d - delta).powi(2)).sum::<f64>() / size as f64;
    let energy = dens.iter().map(|d| d * d).sum::<f64>() / size as f64;
    let d2 = delta * delta;
    let big_square = msd >= alpha;
    let square_bound = d2 + alpha - 4.0 * kappa;
    let baseline_bound = d2 - 8.0 * kappa;
    let f = balanced(q, &lam_set)?;
    let (xi, mag) = max_fourier_coeff_where(&f, |_| true).expect("nonempty group");
    let bias = mag / size as f64;
    let xi_idx = g.index_of(&xi.0)?;
    let fourier_applicable =
        bias >= alpha && kappa <= alpha / 32.0 && lam_p.char_indices().binary_search(&xi_idx).is_ok();
    let fourier_bound = d2 + alpha * alpha / 4.0 - 4.0 * kappa;
    Ok(EnergyReport {
        delta,
        alpha,
        kappa,
        mean_square_dev: msd,
        energy,
        big_square,
        square_bound,
        square_holds: !big_square || energy >= square_bound,
        baseline_bound,
        baseline_holds: energy >= baseline_bound,
        bias,
        fourier_applicable,
        fourier_bound,
        fourier_holds: !fourier_applicable || energy >= fourier_bound,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProductEnergyReport {
    pub beta1: f64,
    pub beta2: f64,
    pub alpha: f64,
    /// `2⁻¹⁰α²β₁²β₂²`.
    pub kappa: f64,
    pub energy1: f64,
    pub energy2: f64,
    /// `|Λ|⁻² Σ_{n⃗∈Λ×Λ} δ²_{Λ′+n⃗}(E₁×E₂) = energy1 · energy2`.
    pub energy: f64,
    pub mean_square_devs: (f64, f64),
    pub biases: (f64, f64),
    /// Some factor has mean-square deviation above `α²`.
    pub square_case: bool,
    /// `β₁²β₂²(1 + α²/2)`.
    pub square_bound: f64,
    pub square_holds: bool,
    /// Some factor has bias `≥ α` at a character of `Λ′`'s generative set.
    pub fourier_case: bool,
    /// `β₁²β₂²(1 + α²/8)`.
    pub fourier_bound: f64,
    pub fourier_holds: bool,
}

/// The product energy of `E₁×E₂ ⊆ Λ×Λ` along a
/// `2⁻¹⁰α²β₁²β₂²/(100d)`-attendant `Λ′`.
pub fn product_energy(e1: &Subset, e2: &Subset, lam: &BohrSpec, lam_p: &BohrSpec, alpha: f64) -> Result<ProductEnergyReport> {
    if !(alpha > 0.0 && alpha <= 1.0) {
        return Err(Error::InvalidParameter(format!("alpha must lie in (0,1], got {alpha}")));
    }
    let g = e1.shape().require_group()?.clone();
    let lam_set = BohrSet::new(lam).members().clone();
    if !e1.is_subset(&lam_set) || !e2.is_subset(&lam_set) {
        return Err(Error::Containment("factor sets must lie in the Bohr set".into()));
    }
    let size = lam_set.count();
    let (b1, b2) = (e1.count() as f64 / size as f64, e2.count() as f64 / size as f64);
    let kappa = (alpha * b1 * b2).powi(2) / 1024.0;
    if kappa <= 0.0 {
        return Err(Error::InvalidParameter("a factor set is empty".into()));
    }
    require_attendant(lam_p, lam, radius_factor(lam, kappa))?;
    let kernel = BohrSet::new(lam_p).centered_indices();
    let pts: Vec<usize> = lam_set.iter().collect();
    let sp = lam_p.char_indices();
    let factor = |e: &Subset, beta: f64| -> Result<(f64, f64, f64, bool)> {
        let dens = local_densities(e, &g, &kernel, &pts);
        let energy = dens.iter().map(|d| d * d).sum::<f64>() / size as f64;
        let msd = dens.iter().map(|d| (d - beta).powi(2)).sum::<f64>() / size as f64;
        let f = balanced(e, &lam_set)?;
        let (xi, mag) = max_fourier_coeff_where(&f, |_| true).expect("nonempty group");
        let in_sp = sp.binary_search(&g.index_of(&xi.0)?).is_ok();
        Ok((energy, msd, mag / size as f64, in_sp))
    };
    let (en1, msd1, bias1, in1) = factor(e1, b1)?;
    let (en2, msd2, bias2, in2) = factor(e2, b2)?;
    let energy = en1 * en2;
    let base = (b1 * b2).powi(2);
    let square_case = msd1 > alpha * alpha || msd2 > alpha * alpha;
    let square_bound = base * (1.0 + alpha * alpha / 2.0);
    let fourier_case = (bias1 >= alpha && in1) || (bias2 >= alpha && in2);
    let fourier_bound = base * (1.0 + alpha * alpha / 8.0);
    Ok(ProductEnergyReport {
        beta1: b1,
        beta2: b2,
        alpha,
        kappa,
        energy1: en1,
        energy2: en2,
        energy,
        mean_square_devs: (msd1, msd2),
        biases: (bias1, bias2),
        square_case,
        square_bound,
        square_holds: !square_case || energy >= square_bound,
        fourier_case,
        fourier_bound,
        fourier_holds: !fourier_case || energy >= fourier_bound,
    })
}
