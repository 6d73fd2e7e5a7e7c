//! Nested averages over a dependency tree of Bohr sets.
//!
//! Level `k` of a [`BohrFamily`] holds a Bohr set `Λ_k` and a declared
//! attendant `Λ*_k`. The level-`k` window below a path `x⃗₀, …, x⃗_{k−1}` is
//! `Λ_k + x⃗_{k−1}` (a product translate in `G×G`); level 0 sits at
//! `origin`. Each `x⃗_{k−1}` ranges over the window above it, so the chain
//! condition holds by construction.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bohr::{attendant, is_attendant, BohrSet, BohrSpec};
use crate::error::{Error, Result};
use crate::group::{Character, GroupSpec};
use crate::sets::Subset2D;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FamilyLevel {
    /// Centered; any translate on the spec is ignored.
    pub lam: BohrSpec,
    pub star: BohrSpec,
    /// `Λ*` is declared an `eps`-attendant of `Λ`.
    pub eps: f64,
}

impl FamilyLevel {
    /// `κ` with `eps = κ/(100d)`.
    pub fn kappa(&self) -> f64 {
        self.eps * 100.0 * self.lam.dim().max(1) as f64
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BohrFamily {
    pub origin: (usize, usize),
    pub levels: Vec<FamilyLevel>,
}

/// Leaves visited by one evaluation are capped at this many.
pub const MAX_LEAVES: u128 = 1 << 32;

impl BohrFamily {
    /// `Λ₀ = lam0`, `Λ*_k` a `κ/(100d)`-attendant of `Λ_k` adjoining
    /// `extra[k]`, and `Λ_{k+1} = Λ*_k`.
    pub fn refining(lam0: &BohrSpec, depth: usize, kappa: f64, extra: &[Vec<Character>]) -> Result<Self> {
        let mut levels = Vec::with_capacity(depth + 1);
        let mut lam = BohrSpec { translate: None, ..lam0.clone() };
        for k in 0..=depth {
            let eps = kappa / (100.0 * lam.dim().max(1) as f64);
            let add = extra.get(k).map(Vec::as_slice).unwrap_or(&[]);
            let star = attendant(&lam, eps, add)?;
            levels.push(FamilyLevel { lam: lam.clone(), star: star.clone(), eps });
            lam = star;
        }
        Ok(BohrFamily { origin: (0, 0), levels })
    }

    pub fn depth(&self) -> usize {
        self.levels.len().saturating_sub(1)
    }

    pub fn group(&self) -> Result<&GroupSpec> {
        self.levels.first().map(|l| &l.lam.group).ok_or_else(|| Error::InvalidParameter("empty family".into()))
    }

    /// Group consistency and the declared attendant relation at every level.
    pub fn validate(&self) -> Result<()> {
        let g = self.group()?;
        if self.origin.0 >= g.order() || self.origin.1 >= g.order() {
            return Err(Error::InvalidParameter("origin outside the group".into()));
        }
        for (k, l) in self.levels.iter().enumerate() {
            if &l.lam.group != g || &l.star.group != g {
                return Err(Error::ShapeMismatch(format!("level {k} lives in a different group")));
            }
            if !is_attendant(&l.star, &l.lam, l.eps) {
                return Err(Error::NotAttendant(format!("level {k}: Λ* is not an {}-attendant of Λ", l.eps)));
            }
        }
        Ok(())
    }

    pub fn max_kappa(&self) -> f64 {
        self.levels.iter().map(FamilyLevel::kappa).fold(0.0, f64::max)
    }
}

/// `(Λ_k members centered, Λ*_k set)` for every level.
struct Prepared {
    g: GroupSpec,
    windows: Vec<Vec<usize>>,
    stars: Vec<BohrSet>,
}

fn prepare(family: &BohrFamily, k: usize) -> Result<Prepared> {
    family.validate()?;
    if k > family.depth() {
        return Err(Error::InvalidParameter(format!("level {k} exceeds family depth {}", family.depth())));
    }
    let g = family.group()?.clone();
    let windows: Vec<Vec<usize>> =
        family.levels[..=k].iter().map(|l| BohrSet::new(&BohrSpec { translate: None, ..l.lam.clone() }).centered_indices()).collect();
    let leaves = windows.iter().fold(1u128, |acc, w| acc.saturating_mul((w.len() * w.len()) as u128));
    if leaves > MAX_LEAVES {
        return Err(Error::InvalidParameter(format!("family has {leaves} leaves, above the cap")));
    }
    if windows.iter().any(Vec::is_empty) {
        return Err(Error::InvalidParameter("a level has an empty Bohr set".into()));
    }
    let stars = family.levels[..=k].iter().map(|l| BohrSet::new(&l.star)).collect();
    Ok(Prepared { g, windows, stars })
}

pub type Restriction<'a> = &'a (dyn Fn(&[(usize, usize)], (usize, usize)) -> bool + Sync);

fn nested<G>(p: &Prepared, g: &G, k: usize, path: &mut Vec<(usize, usize)>, at: (usize, usize), m: Option<Restriction>) -> f64
where
    G: Fn(&BohrSet, (usize, usize)) -> f64 + Sync,
{
    let level = path.len();
    let w = &p.windows[level];
    let norm = (w.len() * w.len()) as f64;
    let mut acc = 0.0;
    for &a in w {
        for &b in w {
            let x = (p.g.add_idx(at.0, a), p.g.add_idx(at.1, b));
            if level == k {
                if m.is_none_or(|m| m(path, x)) {
                    acc += g(&p.stars[k], x);
                }
            } else {
                path.push(x);
                acc += nested(p, g, k, path, x, m);
                path.pop();
            }
        }
    }
    acc / norm
}

/// `ind_k(Λ)(g)`, or its restricted form when `restriction` selects the
/// admissible last-level points `M_k(x⃗₀, …, x⃗_{k−1})`.
pub fn index<G>(family: &BohrFamily, g: G, k: usize, restriction: Option<Restriction>) -> Result<f64>
where
    G: Fn(&BohrSet, (usize, usize)) -> f64 + Sync,
{
    let p = prepare(family, k)?;
    let w0 = &p.windows[0];
    let origin = family.origin;
    let firsts: Vec<(usize, usize)> =
        w0.iter().flat_map(|&a| w0.iter().map(move |&b| (a, b))).map(|(a, b)| (p.g.add_idx(origin.0, a), p.g.add_idx(origin.1, b))).collect();
    let total: f64 = if k == 0 {
        firsts.iter().filter(|&&x| restriction.is_none_or(|m| m(&[], x))).map(|&x| g(&p.stars[0], x)).sum()
    } else {
        let parts: Vec<f64> = firsts
            .par_iter()
            .map(|&x| {
                let mut path = vec![x];
                nested(&p, &g, k, &mut path, x, restriction)
            })
            .collect();
        parts.iter().sum()
    };
    let v = total / (w0.len() * w0.len()) as f64;
    if !(v.abs() <= 1.0 + 1e-9) {
        return Err(Error::InvalidParameter(format!("g leaves the unit disk: index {v}")));
    }
    Ok(v)
}

/// `g(M, x⃗) = |Q ∩ ((M + x₁)×(M + x₂))| / |M|²`.
pub fn density_g(q: &Subset2D) -> Result<impl Fn(&BohrSet, (usize, usize)) -> f64 + Sync + '_> {
    let g = q.shape().require_group()?.clone();
    Ok(move |m: &BohrSet, x: (usize, usize)| {
        let idx = m.centered_indices();
        let cols: Vec<usize> = idx.iter().map(|&c| g.add_idx(c, x.1)).collect();
        let mut hit = 0usize;
        for &r in &idx {
            let row = g.add_idx(r, x.0);
            hit += cols.iter().filter(|&&c| q.contains(row, c)).count();
        }
        hit as f64 / (idx.len() * idx.len()) as f64
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KepsReport {
    pub delta: f64,
    pub kappa: f64,
    /// `ind_k` for `k = 0..=depth`.
    pub values: Vec<f64>,
    /// `4κ(k+1)`.
    pub bounds: Vec<f64>,
    pub holds: bool,
}

/// `|ind_k − δ| ≤ 4κ(k+1)` for `g = δ_{·+x⃗}(Q)` and `Q ⊆ Λ₀×Λ₀`, with `κ`
/// the largest declared level parameter.
pub fn keps_check(family: &BohrFamily, q: &Subset2D) -> Result<KepsReport> {
    family.validate()?;
    let g = family.group()?.clone();
    let l0 = &family.levels[0];
    let base = BohrSet::new(&BohrSpec { translate: None, ..l0.lam.clone() });
    let w: Vec<usize> = base.centered_indices();
    let o = family.origin;
    let inside = q.points().all(|(x, y)| {
        base.contains_centered(g.sub_idx(x, o.0)) && base.contains_centered(g.sub_idx(y, o.1))
    });
    if !inside {
        return Err(Error::Containment("Q must lie in Λ₀×Λ₀".into()));
    }
    let delta = q.count() as f64 / (w.len() * w.len()) as f64;
    let kappa = family.max_kappa();
    let gfun = density_g(q)?;
    let mut values = Vec::new();
    let mut bounds = Vec::new();
    for k in 0..=family.depth() {
        values.push(index(family, &gfun, k, None)?);
        bounds.push(4.0 * kappa * (k + 1) as f64);
    }
    let holds = values.iter().zip(&bounds).all(|(v, b)| (v - delta).abs() <= *b);
    Ok(KepsReport { delta, kappa, values, bounds, holds })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IndexGainReport {
    pub lower: f64,
    pub upper: f64,
    pub gain: f64,
    /// `2⁻²⁵τ⁴β⁴σ³`.
    pub required: f64,
    pub holds: bool,
}

/// Compares `ind_{k+1}` of a refined family against `ind_{k−1}` of the
/// coarser one, the per-step gain of the adaptive construction.
pub fn index_gain<G>(coarse: &BohrFamily, refined: &BohrFamily, g: G, k: usize, tau: f64, beta: f64, sigma: f64) -> Result<IndexGainReport>
where
    G: Fn(&BohrSet, (usize, usize)) -> f64 + Sync,
{
    if k == 0 {
        return Err(Error::InvalidParameter("the gain compares levels k−1 and k+1, so k ≥ 1".into()));
    }
    let lower = index(coarse, &g, k - 1, None)?;
    let upper = index(refined, &g, k + 1, None)?;
    let required = (tau * beta).powi(4) * sigma.powi(3) / (1u64 << 25) as f64;
    Ok(IndexGainReport { lower, upper, gain: upper - lower, required, holds: upper - lower >= required })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::SeededRng;
    use crate::sets::Shape;

    fn family(n: u64, depth: usize) -> BohrFamily {
        let g = GroupSpec::cyclic(n).unwrap();
        let lam = BohrSpec::from_indices(g, &[1], 0.3, 0.9).unwrap();
        BohrFamily::refining(&lam, depth, 0.9, &[]).unwrap()
    }

    #[test]
    fn constant_g_gives_constant() {
        let f = family(100, 1);
        for k in 0..=1 {
            assert!((index(&f, |_, _| 0.3, k, None).unwrap() - 0.3).abs() < 1e-12);
        }
        // Keep only the first coordinate's even points at the last level.
        let w = BohrSet::new(&f.levels[0].lam).centered_indices();
        let keep = |_: &[(usize, usize)], x: (usize, usize)| x.0.is_multiple_of(2);
        let frac = {
            let even = w.iter().filter(|&&a| a % 2 == 0).count() as f64;
            even / w.len() as f64
        };
        assert!((index(&f, |_, _| 0.3, 0, Some(&keep)).unwrap() - 0.3 * frac).abs() < 1e-12);
    }

    #[test]
    fn depth_zero_is_direct_average() {
        let f = family(100, 0);
        let g = GroupSpec::cyclic(100).unwrap();
        let mut r = SeededRng::new(2);
        let w = BohrSet::new(&f.levels[0].lam).centered_indices();
        let q = Subset2D::from_fn(Shape::Group(g.clone()), |x, y| {
            w.contains(&x) && w.contains(&y) && r.bernoulli(0.5)
        });
        let gf = density_g(&q).unwrap();
        let star = BohrSet::new(&f.levels[0].star);
        let mut direct = 0.0;
        for &a in &w {
            for &b in &w {
                direct += gf(&star, (a, b));
            }
        }
        direct /= (w.len() * w.len()) as f64;
        assert!((index(&f, &gf, 0, None).unwrap() - direct).abs() < 1e-12);
    }

    #[test]
    fn keps_bound_on_depth_two() {
        let f = family(100, 2);
        assert_eq!(f.depth(), 2);
        let g = GroupSpec::cyclic(100).unwrap();
        let w = BohrSet::new(&f.levels[0].lam).centered_indices();
        let mut r = SeededRng::new(8);
        let q = Subset2D::from_fn(Shape::Group(g), |x, y| w.contains(&x) && w.contains(&y) && r.bernoulli(0.4));
        let rep = keps_check(&f, &q).unwrap();
        assert_eq!(rep.values.len(), 3);
        assert!(rep.holds, "{rep:?}");
    }

    #[test]
    fn malformed_families_are_rejected() {
        let mut f = family(100, 1);
        f.levels[1].eps = 1e-9;
        assert!(f.validate().is_err());
        assert!(index(&family(100, 1), |_, _| 1.0, 3, None).is_err());
        assert!(index(&family(100, 0), |_, _| 2.0, 0, None).is_err());
    }
}
