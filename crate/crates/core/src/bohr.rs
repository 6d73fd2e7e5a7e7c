//! Bohr sets `Λ(S, ε) = {n : ‖ξ·n‖ < ε for all ξ ∈ S}`, their regularity,
//! attendants, `Λ⁺`/`Λ⁻`, and the smoothing estimates built on `Λ * Λ′`.
//!
//! Membership is decided in integers. With `L` the exponent of `G`, every
//! `ξ·n` is `r/L`, so `‖ξ·n‖ < ε` iff `min(r, L−r) < ⌈εL⌉`, where `ε` is
//! taken as the exact rational value of its `f64` representation. Each set
//! stores the profile `D(n) = max_ξ min(r, L−r)`; then
//! `|Λ(S, x)| = #{n : D(n) < ⌈xL⌉}` for every radius `x` at once.

use std::sync::{Arc, OnceLock};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::group::{Character, Element, GroupSpec};
use crate::sets::{Shape, Subset, Subset2D};

pub const DEFAULT_KAPPA: f64 = 0.125;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BohrSpec {
    pub group: GroupSpec,
    /// Generative set `S`, sorted by character index and deduplicated.
    pub chars: Vec<Character>,
    pub eps: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub translate: Option<Element>,
    pub kappa: f64,
}

fn rat(x: f64) -> BigRational {
    BigRational::from_float(x).expect("finite float")
}

fn int(x: usize) -> BigRational {
    BigRational::from_integer(BigInt::from(x))
}

impl BohrSpec {
    pub fn new(group: GroupSpec, chars: Vec<Character>, eps: f64, kappa: f64) -> Result<Self> {
        if !(eps.is_finite() && eps > 0.0) {
            return Err(Error::InvalidParameter(format!("radius must be positive, got {eps}")));
        }
        if !(kappa > 0.0 && kappa < 1.0) {
            return Err(Error::InvalidParameter(format!("kappa must lie in (0,1), got {kappa}")));
        }
        let mut idx = Vec::with_capacity(chars.len());
        for c in &chars {
            idx.push(group.index_of(&c.0)?);
        }
        idx.sort_unstable();
        idx.dedup();
        let chars = idx.into_iter().map(|i| group.character_at(i)).collect();
        Ok(BohrSpec { group, chars, eps, translate: None, kappa })
    }

    /// Convenience constructor from character indices.
    pub fn from_indices(group: GroupSpec, chars: &[usize], eps: f64, kappa: f64) -> Result<Self> {
        if let Some(&bad) = chars.iter().find(|&&i| i >= group.order()) {
            return Err(Error::ShapeMismatch(format!("character index {bad} out of range")));
        }
        let cs = chars.iter().map(|&i| group.character_at(i)).collect();
        BohrSpec::new(group, cs, eps, kappa)
    }

    pub fn with_translate(mut self, t: Element) -> Result<Self> {
        self.group.index_of(&t.0)?;
        self.translate = Some(t);
        Ok(self)
    }

    pub fn with_eps(&self, eps: f64) -> Result<Self> {
        let mut s = BohrSpec::new(self.group.clone(), self.chars.clone(), eps, self.kappa)?;
        s.translate = self.translate.clone();
        Ok(s)
    }

    /// `d = |S|`.
    pub fn dim(&self) -> usize {
        self.chars.len()
    }

    pub fn char_indices(&self) -> Vec<usize> {
        self.chars.iter().map(|c| self.group.index_of(&c.0).expect("validated")).collect()
    }

    pub fn translate_index(&self) -> usize {
        self.translate.as_ref().map_or(0, |t| self.group.index_of(&t.0).expect("validated"))
    }

    /// `κ/(100d)`, with `d` read as 1 for the trivial generative set.
    pub fn window_ratio(&self) -> f64 {
        self.kappa / (100.0 * self.dim().max(1) as f64)
    }
}

/// Sorted distance profile of a generative set.
#[derive(Debug)]
struct Profile {
    lcm: u64,
    dist: Vec<u64>,
    sorted: Vec<u64>,
}

impl Profile {
    fn new(group: &GroupSpec, chars: &[usize]) -> Profile {
        let lcm = group.lcm();
        let dist: Vec<u64> = (0..group.order())
            .map(|n| {
                chars
                    .iter()
                    .map(|&xi| {
                        let r = group.pairing_num_idx(xi, n);
                        r.min(lcm - r)
                    })
                    .max()
                    .unwrap_or(0)
            })
            .collect();
        let mut sorted = dist.clone();
        sorted.sort_unstable();
        Profile { lcm, dist, sorted }
    }

    /// `⌈xL⌉` clamped into `u64`; `x` may be non-positive.
    fn ceil_cut(&self, x: &BigRational) -> u64 {
        let v = (x * int(self.lcm as usize)).ceil().to_integer();
        if v.is_negative() {
            0
        } else {
            v.to_u64().unwrap_or(u64::MAX)
        }
    }

    /// `#{n : D(n)/L < x}`.
    fn count_lt(&self, x: &BigRational) -> usize {
        let c = self.ceil_cut(x);
        self.sorted.partition_point(|&d| d < c)
    }

    /// `#{n : D(n)/L ≤ x}`.
    fn count_le(&self, x: &BigRational) -> usize {
        if x.is_negative() {
            return 0;
        }
        let v = (x * int(self.lcm as usize)).floor().to_integer();
        let f = v.to_u64().unwrap_or(u64::MAX);
        self.sorted.partition_point(|&d| d <= f)
    }
}

/// A Bohr set with its membership profile materialized once.
#[derive(Debug)]
pub struct BohrSet {
    spec: BohrSpec,
    profile: Arc<Profile>,
    members: OnceLock<Subset>,
}

impl Clone for BohrSet {
    fn clone(&self) -> Self {
        BohrSet { spec: self.spec.clone(), profile: self.profile.clone(), members: self.members.clone() }
    }
}

impl BohrSet {
    pub fn new(spec: &BohrSpec) -> BohrSet {
        let profile = Arc::new(Profile::new(&spec.group, &spec.char_indices()));
        BohrSet { spec: spec.clone(), profile, members: OnceLock::new() }
    }

    /// Same generative set, different radius; shares the profile.
    pub fn at_radius(&self, eps: f64) -> Result<BohrSet> {
        Ok(BohrSet { spec: self.spec.with_eps(eps)?, profile: self.profile.clone(), members: OnceLock::new() })
    }

    pub fn spec(&self) -> &BohrSpec {
        &self.spec
    }

    fn cut(&self) -> u64 {
        self.profile.ceil_cut(&rat(self.spec.eps))
    }

    /// Membership of `n` in the untranslated set.
    #[inline]
    pub fn contains_centered(&self, n: usize) -> bool {
        self.profile.dist[n] < self.cut()
    }

    /// `|Λ|`.
    pub fn size(&self) -> usize {
        self.profile.count_lt(&rat(self.spec.eps))
    }

    /// `|Λ(S, x)|` for another radius `x`.
    pub fn size_at(&self, x: f64) -> usize {
        self.profile.count_lt(&rat(x))
    }

    /// Members including the translate.
    pub fn members(&self) -> &Subset {
        self.members.get_or_init(|| {
            let g = &self.spec.group;
            let t = self.spec.translate_index();
            let cut = self.cut();
            let mut s = Subset::empty(Shape::Group(g.clone()));
            for (n, &d) in self.profile.dist.iter().enumerate() {
                if d < cut {
                    s.insert(g.add_idx(n, t));
                }
            }
            s
        })
    }

    /// Members of the untranslated set as indices, ascending.
    pub fn centered_indices(&self) -> Vec<usize> {
        let cut = self.cut();
        self.profile.dist.iter().enumerate().filter(|(_, &d)| d < cut).map(|(n, _)| n).collect()
    }

    /// Extremal sizes over the open window `|ε′ − ε| < κε/(100d)`.
    pub fn window(&self) -> RegularityWindow {
        let eps = rat(self.spec.eps);
        let h = &eps * rat(self.spec.kappa) / int(100 * self.spec.dim().max(1));
        RegularityWindow {
            lower: self.profile.count_le(&(&eps - &h)),
            size: self.profile.count_lt(&eps),
            upper: self.profile.count_lt(&(&eps + &h)),
        }
    }

    pub fn is_regular(&self) -> bool {
        if self.spec.dim() == 0 {
            return true;
        }
        self.window().is_regular(self.spec.kappa)
    }
}

/// Sizes of `Λ(S, ε′)` at the two ends of the regularity window.
///
/// `|Λ(S, ·)|` is a nondecreasing step function, so over the open window its
/// infimum is `lower` and its supremum is `upper`, both attained.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RegularityWindow {
    pub lower: usize,
    pub size: usize,
    pub upper: usize,
}

impl RegularityWindow {
    pub fn is_regular(&self, kappa: f64) -> bool {
        let k = rat(kappa);
        let size = int(self.size);
        let one = BigRational::one();
        int(self.lower) > (&one - &k) * &size && int(self.upper) < (&one + &k) * &size
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BohrReport {
    pub group: GroupSpec,
    pub dim: usize,
    pub eps: f64,
    pub kappa: f64,
    pub size: usize,
    /// `εᵈN`.
    pub lower_bound: f64,
    /// `|Λ| ≥ εᵈN`, decided exactly.
    pub lower_bound_holds: bool,
    pub regular: bool,
    pub window: RegularityWindow,
    pub plus_size: usize,
    pub minus_size: usize,
}

pub fn bohr_members(spec: &BohrSpec) -> Subset {
    BohrSet::new(spec).members().clone()
}

pub fn check_regular(spec: &BohrSpec) -> bool {
    BohrSet::new(spec).is_regular()
}

/// `|Λ| ≥ εᵈ N` in exact arithmetic.
pub fn size_lower_bound_holds(set: &BohrSet) -> bool {
    let s = set.spec();
    let mut bound = int(s.group.order());
    let e = rat(s.eps);
    for _ in 0..s.dim() {
        bound *= &e;
    }
    int(set.size()) >= bound
}

pub fn report(spec: &BohrSpec) -> BohrReport {
    let set = BohrSet::new(spec);
    let (plus, minus) = plus_minus(spec);
    BohrReport {
        group: spec.group.clone(),
        dim: spec.dim(),
        eps: spec.eps,
        kappa: spec.kappa,
        size: set.size(),
        lower_bound: spec.eps.powi(spec.dim() as i32) * spec.group.order() as f64,
        lower_bound_holds: size_lower_bound_holds(&set),
        regular: set.is_regular(),
        window: set.window(),
        plus_size: set.size_at(plus.eps),
        minus_size: set.size_at(minus.eps),
    }
}

/// Candidate radii in `(lo, hi)`: one point per plateau of `|Λ(S, ·)|`,
/// largest first, then (if `fine`) eight interior points per plateau.
fn plateau_candidates(profile: &Profile, lo: &BigRational, hi: &BigRational, fine: bool) -> Vec<f64> {
    let l = int(profile.lcm as usize);
    let mut cuts: Vec<BigRational> = vec![lo.clone()];
    let mut prev = None;
    for &d in &profile.sorted {
        if prev == Some(d) {
            continue;
        }
        prev = Some(d);
        let b = int(d as usize) / &l;
        if &b > lo && &b < hi {
            cuts.push(b);
        }
    }
    cuts.push(hi.clone());
    let mut out = Vec::new();
    for w in cuts.windows(2).rev() {
        let (a, b) = (&w[0], &w[1]);
        if fine {
            for k in 1..=8 {
                out.push(a + (b - a) * BigRational::new(BigInt::from(k), BigInt::from(9)));
            }
        } else {
            out.push((a + b) / int(2));
        }
    }
    out.into_iter()
        .filter_map(|r| r.to_f64())
        .filter(|&x| &rat(x) > lo && &rat(x) < hi)
        .collect()
}

/// A radius `ε₁ ∈ (ε/2, ε)` at which `Λ(S, ε₁)` is regular.
///
/// Scans the plateaus of `|Λ(S, ·)|` between consecutive breakpoints
/// `D(n)/L`, testing each candidate with the exact endpoint check.
pub fn find_regular_epsilon(group: &GroupSpec, chars: &[Character], eps: f64, kappa: f64) -> Result<f64> {
    if !(eps > 0.0 && eps <= 1.0) {
        return Err(Error::InvalidParameter(format!("radius must lie in (0,1], got {eps}")));
    }
    find_regular_in(group, chars, eps / 2.0, eps, kappa)
}

/// A regular radius in the open interval `(lo, hi)`.
pub fn find_regular_in(group: &GroupSpec, chars: &[Character], lo: f64, hi: f64, kappa: f64) -> Result<f64> {
    if !(lo >= 0.0 && lo < hi) {
        return Err(Error::InvalidParameter(format!("empty radius interval ({lo}, {hi})")));
    }
    let spec = BohrSpec::new(group.clone(), chars.to_vec(), hi, kappa)?;
    let base = BohrSet::new(&spec);
    let (lo_r, hi_r) = (rat(lo), rat(hi));
    let mut tried = 0;
    for fine in [false, true] {
        for x in plateau_candidates(&base.profile, &lo_r, &hi_r, fine) {
            tried += 1;
            if base.at_radius(x)?.is_regular() {
                return Ok(x);
            }
        }
    }
    Err(Error::SearchExhausted { lo, hi, candidates: tried })
}

/// An `ε`-attendant of `parent`: regular, generative set `S ∪ extra`,
/// radius in `[εε₀/2, εε₀]`.
pub fn attendant(parent: &BohrSpec, eps: f64, extra: &[Character]) -> Result<BohrSpec> {
    if !check_regular(parent) {
        return Err(Error::NotRegular { eps: parent.eps, kappa: parent.kappa });
    }
    let mut chars = parent.chars.clone();
    chars.extend_from_slice(extra);
    let target = eps * parent.eps;
    let r = find_regular_epsilon(&parent.group, &chars, target.min(1.0), parent.kappa)?;
    BohrSpec::new(parent.group.clone(), chars, r, parent.kappa)
}

/// The `κ/(100d)`-attendant used for smoothing.
pub fn smoothing_attendant(parent: &BohrSpec) -> Result<BohrSpec> {
    attendant(parent, parent.window_ratio(), &[])
}

/// Checks the attendant definition: `S ⊆ S′`, radius sandwich, regularity.
pub fn is_attendant(child: &BohrSpec, parent: &BohrSpec, eps: f64) -> bool {
    if child.group != parent.group {
        return false;
    }
    let sc = child.char_indices();
    if !parent.char_indices().iter().all(|i| sc.binary_search(i).is_ok()) {
        return false;
    }
    let target = rat(eps) * rat(parent.eps);
    let r = rat(child.eps);
    r * int(2) >= target && rat(child.eps) <= target && check_regular(child)
}

fn require_attendant(child: &BohrSpec, parent: &BohrSpec, eps: f64) -> Result<()> {
    if !is_attendant(child, parent, eps) {
        return Err(Error::NotAttendant(format!(
            "radius {} is not a regular {eps}-attendant of radius {}",
            child.eps, parent.eps
        )));
    }
    Ok(())
}

/// `(Λ⁺, Λ⁻)` at radii `(1 ± κ/(100d))ε`.
pub fn plus_minus(spec: &BohrSpec) -> (BohrSpec, BohrSpec) {
    let h = spec.window_ratio();
    let mut plus = spec.clone();
    plus.eps = spec.eps * (1.0 + h);
    let mut minus = spec.clone();
    minus.eps = spec.eps * (1.0 - h);
    (plus, minus)
}

/// `(Λ * Λ′)(n)` as exact counts, untranslated.
pub fn conv_counts(lam: &BohrSet, lam2: &BohrSet) -> Vec<u64> {
    let g = &lam.spec().group;
    let mut out = vec![0u64; g.order()];
    let b = lam2.centered_indices();
    for a in lam.centered_indices() {
        for &s in &b {
            out[g.add_idx(a, s)] += 1;
        }
    }
    out
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConvStats {
    pub size: usize,
    pub attendant_size: usize,
    /// `#{n : (Λ*Λ′)(n) > 0}`.
    pub support: usize,
    /// `#{n : (Λ*Λ′)(n) = |Λ′|}`.
    pub full: usize,
    /// `Σ_n |(Λ*Λ′)(n) − |Λ′|Λ(n)|`, i.e. the defect times `|Λ′|`.
    pub defect_scaled: u64,
    /// `‖(Λ*Λ′)/|Λ′| − Λ‖₁`.
    pub l1_defect: f64,
    pub support_ok: bool,
    pub full_ok: bool,
    pub defect_ok: bool,
}

/// The three quantities bounded for `Λ * Λ′`, each checked exactly.
pub fn conv_support_stats(lam: &BohrSpec, lam2: &BohrSpec) -> Result<ConvStats> {
    require_attendant(lam2, lam, lam.window_ratio())?;
    let a = BohrSet::new(lam);
    let b = BohrSet::new(lam2);
    let conv = conv_counts(&a, &b);
    let (m, m2) = (a.size(), b.size() as u64);
    let mut support = 0;
    let mut full = 0;
    let mut defect = 0u64;
    for (n, &c) in conv.iter().enumerate() {
        support += (c > 0) as usize;
        full += (c == m2) as usize;
        let target = if a.contains_centered(n) { m2 } else { 0 };
        defect += c.abs_diff(target);
    }
    let k = rat(lam.kappa);
    let one = BigRational::one();
    Ok(ConvStats {
        size: m,
        attendant_size: m2 as usize,
        support,
        full,
        defect_scaled: defect,
        l1_defect: defect as f64 / m2 as f64,
        support_ok: int(support) <= (&one + &k) * int(m),
        full_ok: int(full) > (&one - &k) * int(m),
        defect_ok: int(defect as usize) < int(2) * &k * int(m) * int(m2 as usize),
    })
}

fn nonempty(set: &BohrSet) -> Result<usize> {
    match set.size() {
        0 => Err(Error::InvalidParameter("empty Bohr set".into())),
        m => Ok(m),
    }
}

/// `|E ∩ (Λ + x)| / |Λ|` (the translate of the spec is ignored; `x` is used).
pub fn local_density(e: &Subset, lam: &BohrSet, x: usize) -> Result<f64> {
    let g = e.shape().require_group()?;
    if *g != lam.spec().group {
        return Err(Error::ShapeMismatch("set and Bohr set live in different groups".into()));
    }
    let m = nonempty(lam)?;
    let hit = lam.centered_indices().into_iter().filter(|&n| e.contains(g.add_idx(n, x))).count();
    Ok(hit as f64 / m as f64)
}

/// `|E ∩ ((Λ+x₁)×(Λ+x₂))| / |Λ|²`.
pub fn local_density2d(e: &Subset2D, lam: &BohrSet, x: (usize, usize)) -> Result<f64> {
    let g = e.shape().require_group()?;
    if *g != lam.spec().group {
        return Err(Error::ShapeMismatch("set and Bohr set live in different groups".into()));
    }
    let m = nonempty(lam)?;
    let idx = lam.centered_indices();
    let rows: Vec<usize> = idx.iter().map(|&n| g.add_idx(n, x.0)).collect();
    let cols: Vec<usize> = idx.iter().map(|&n| g.add_idx(n, x.1)).collect();
    let mut hit = 0usize;
    for &r in &rows {
        hit += cols.iter().filter(|&&c| e.contains(r, c)).count();
    }
    Ok(hit as f64 / (m * m) as f64)
}

/// `|δ_{Λ+x⃗}(E) − |Λ|⁻² Σ_{n⃗ ∈ Λ+x⃗} δ_{Λ′+n⃗}(E)|`.
///
/// The average is `Σ_{s⃗∈E} c(s₁−x₁) c(s₂−x₂) / (|Λ|²|Λ′|²)` with
/// `c = Λ * Λ′`, which avoids the quadruple loop.
pub fn smoothing_defect(e: &Subset2D, lam: &BohrSpec, lam2: &BohrSpec, x: (usize, usize)) -> Result<f64> {
    require_attendant(lam2, lam, lam.window_ratio())?;
    let g = e.shape().require_group()?.clone();
    let a = BohrSet::new(lam);
    let b = BohrSet::new(lam2);
    let direct = local_density2d(e, &a, x)?;
    let c = conv_counts(&a, &b);
    let (m, m2) = (a.size() as f64, b.size() as f64);
    let mut acc = 0.0;
    for (s1, s2) in e.points() {
        let c1 = c[g.sub_idx(s1, x.0)];
        if c1 != 0 {
            acc += (c1 * c[g.sub_idx(s2, x.1)]) as f64;
        }
    }
    Ok((direct - acc / (m * m * m2 * m2)).abs())
}

/// One-dimensional analogue of [`smoothing_defect`].
pub fn smoothing_defect_1d(e: &Subset, lam: &BohrSpec, lam2: &BohrSpec, x: usize) -> Result<f64> {
    require_attendant(lam2, lam, lam.window_ratio())?;
    let g = e.shape().require_group()?.clone();
    let a = BohrSet::new(lam);
    let b = BohrSet::new(lam2);
    let direct = local_density(e, &a, x)?;
    let c = conv_counts(&a, &b);
    let acc: u64 = e.iter().map(|s| c[g.sub_idx(s, x)]).sum();
    Ok((direct - acc as f64 / (a.size() * b.size()) as f64).abs())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle;

    fn z(n: u64) -> GroupSpec {
        GroupSpec::cyclic(n).unwrap()
    }

    #[test]
    fn empty_generators_give_everything() {
        let s = BohrSpec::from_indices(z(10), &[], 0.1, DEFAULT_KAPPA).unwrap();
        assert_eq!(bohr_members(&s).count(), 10);
        assert!(check_regular(&s));
    }

    #[test]
    fn z10_example() {
        let s = BohrSpec::from_indices(z(10), &[1], 0.3, DEFAULT_KAPPA).unwrap();
        let m: Vec<usize> = bohr_members(&s).iter().collect();
        assert_eq!(m, vec![0, 1, 2, 8, 9]);
        assert_eq!(m, oracle::bohr_members_naive(&s).iter().collect::<Vec<_>>());
        assert!(report(&s).lower_bound_holds);
    }

    #[test]
    fn wide_radius_is_everything() {
        let g: GroupSpec = "Z6xZ5".parse().unwrap();
        let s = BohrSpec::from_indices(g, &[7, 13, 29], 0.51, DEFAULT_KAPPA).unwrap();
        assert_eq!(bohr_members(&s).count(), 30);
    }

    #[test]
    fn strict_boundary_is_exact() {
        // ‖3/10‖ = 0.3 is not < 0.3, even though 0.3 is not exactly representable.
        let s = BohrSpec::from_indices(z(10), &[1], 0.3, DEFAULT_KAPPA).unwrap();
        assert!(!bohr_members(&s).contains(3));
        let s = BohrSpec::from_indices(z(10), &[1], 0.30000000000000004, DEFAULT_KAPPA).unwrap();
        assert!(bohr_members(&s).contains(3));
    }

    #[test]
    fn translate_shifts_members() {
        let s = BohrSpec::from_indices(z(10), &[1], 0.3, DEFAULT_KAPPA)
            .unwrap()
            .with_translate(Element(vec![5]))
            .unwrap();
        let m: Vec<usize> = bohr_members(&s).iter().collect();
        assert_eq!(m, vec![3, 4, 5, 6, 7]);
    }

    #[test]
    fn regular_on_plateau_and_irregular_at_jump() {
        // Z_100, S = {1}: |Λ(ε)| = 2⌈100ε⌉ − 1, flat between multiples of 1/100.
        let s = BohrSpec::from_indices(z(100), &[1], 0.205, 0.1).unwrap();
        assert!(check_regular(&s));
        // Z_4, S = {1}, ε just above 1/4: the window reaches down past 1/4,
        // where the set drops from {0,1,3} to {0}.
        let s = BohrSpec::from_indices(z(4), &[1], 0.2501, 0.5).unwrap();
        let w = BohrSet::new(&s).window();
        assert_eq!((w.lower, w.size), (1, 3));
        assert!(!check_regular(&s));
        let s = BohrSpec::from_indices(z(100), &[1], 0.205, 0.999).unwrap();
        assert!(check_regular(&s));
    }

    #[test]
    fn regular_search_examples() {
        let e = find_regular_epsilon(&z(100), &[Character(vec![1])], 0.2, 0.1).unwrap();
        assert!(e > 0.1 && e < 0.2);
        let w = BohrSet::new(&BohrSpec::from_indices(z(100), &[1], e, 0.1).unwrap()).window();
        assert!(w.lower as f64 > 0.9 * w.size as f64 && (w.upper as f64) < 1.1 * w.size as f64);
        let g: GroupSpec = "Z7xZ11".parse().unwrap();
        let chars = vec![Character(vec![1, 3]), Character(vec![2, 5])];
        let e = find_regular_epsilon(&g, &chars, 0.3, DEFAULT_KAPPA).unwrap();
        assert!(e > 0.15 && e < 0.3);
        assert!(check_regular(&BohrSpec::new(g, chars, e, DEFAULT_KAPPA).unwrap()));
        assert!(find_regular_epsilon(&z(5), &[], 0.4, 0.1).is_ok());
    }

    #[test]
    fn attendant_examples() {
        let eps0 = find_regular_epsilon(&z(101), &[Character(vec![1])], 0.3, DEFAULT_KAPPA).unwrap();
        let parent = BohrSpec::from_indices(z(101), &[1], eps0, DEFAULT_KAPPA).unwrap();
        let child = attendant(&parent, 0.1, &[]).unwrap();
        assert!(child.eps >= 0.05 * eps0 && child.eps <= 0.1 * eps0);
        assert!(is_attendant(&child, &parent, 0.1));
        let grand = attendant(&child, 0.5, &[]).unwrap();
        assert!(grand.eps >= 0.25 * child.eps && grand.eps <= 0.5 * child.eps);
        assert!(grand.eps >= 0.0125 * eps0 && grand.eps <= 0.05 * eps0);
        let unit = attendant(&parent, 1.0, &[]).unwrap();
        assert!(unit.eps >= eps0 / 2.0 && unit.eps <= eps0);
        let bad = BohrSpec::from_indices(z(4), &[1], 0.2501, 0.5).unwrap();
        assert!(matches!(attendant(&bad, 0.5, &[]), Err(Error::NotRegular { .. })));
    }

    #[test]
    fn plus_minus_sandwich() {
        for (g, chars) in [(z(100), vec![1usize, 7]), ("Z5xZ5".parse().unwrap(), vec![6])] {
            let e = find_regular_epsilon(&g, &[g.character_at(chars[0])], 0.3, DEFAULT_KAPPA).unwrap();
            let s = BohrSpec::from_indices(g, &chars[..1], e, DEFAULT_KAPPA).unwrap();
            let (p, m) = plus_minus(&s);
            let (sp, ss, sm) = (bohr_members(&p), bohr_members(&s), bohr_members(&m));
            assert!(sm.is_subset(&ss) && ss.is_subset(&sp));
            assert!(sp.count() as f64 <= 1.125 * ss.count() as f64);
            assert!(sm.count() as f64 >= 0.875 * ss.count() as f64);
        }
        let s = BohrSpec::from_indices(z(9), &[], 0.3, DEFAULT_KAPPA).unwrap();
        let (p, m) = plus_minus(&s);
        assert_eq!((bohr_members(&p).count(), bohr_members(&m).count()), (9, 9));
    }

    #[test]
    fn conv_stats_against_definitional_convolution() {
        let g = z(2003);
        let e = find_regular_epsilon(&g, &[Character(vec![5])], 0.4, 0.5).unwrap();
        let lam = BohrSpec::from_indices(g.clone(), &[5], e, 0.5).unwrap();
        let lam2 = smoothing_attendant(&lam).unwrap();
        assert!(BohrSet::new(&lam2).size() > 1);
        let st = conv_support_stats(&lam, &lam2).unwrap();
        assert!(st.support_ok && st.full_ok && st.defect_ok);
        let (support, full, defect) = oracle::conv_stats_naive(&bohr_members(&lam), &bohr_members(&lam2));
        assert_eq!((st.support, st.full, st.defect_scaled), (support, full, defect));
        assert!(conv_support_stats(&lam, &lam).is_err());
    }

    #[test]
    fn local_density_examples() {
        let g = z(12);
        let lam = BohrSet::new(&BohrSpec::from_indices(g.clone(), &[1], 0.26, DEFAULT_KAPPA).unwrap());
        let full = Subset::full(g.clone().into());
        assert_eq!(local_density(&full, &lam, 3).unwrap(), 1.0);
        assert_eq!(local_density(&Subset::empty(g.clone().into()), &lam, 3).unwrap(), 0.0);
        let e = Subset::from_indices(g.clone().into(), [0, 2, 3, 5, 7, 11]).unwrap();
        let members = lam.members().clone();
        for x in 0..12 {
            let shifted = members.iter().filter(|&n| e.contains((n + x) % 12)).count();
            assert_eq!(local_density(&e, &lam, x).unwrap(), shifted as f64 / members.count() as f64);
        }
        let e2 = Subset2D::full(g.clone().into());
        assert_eq!(local_density2d(&e2, &lam, (1, 2)).unwrap(), 1.0);
    }

    #[test]
    fn smoothing_defect_matches_definition_and_bound() {
        let g = z(1009);
        let e = find_regular_epsilon(&g, &[Character(vec![1])], 0.5, 0.9).unwrap();
        let lam = BohrSpec::from_indices(g.clone(), &[1], e, 0.9).unwrap();
        let lam2 = smoothing_attendant(&lam).unwrap();
        assert!(BohrSet::new(&lam2).size() > 1);
        let mut seed = 9u64;
        let set = Subset2D::from_fn(g.clone().into(), |_, _| {
            seed = seed.wrapping_mul(6364136223846793005).wrapping_add(1);
            seed >> 63 == 1
        });
        for x in [(0, 0), (4, 17)] {
            let fast = smoothing_defect(&set, &lam, &lam2, x).unwrap();
            let slow = oracle::smoothing_defect_naive(&set, &lam, &lam2, x);
            assert!((fast - slow).abs() < 1e-12);
            assert!(fast <= 4.0 * 0.9);
        }
        let full = Subset2D::full(g.into());
        assert!(smoothing_defect(&full, &lam, &lam2, (3, 3)).unwrap() < 1e-12);
    }
}
