//! The density-increment iteration.
//!
//! Each step measures rectilinear uniformity of `A` on the current product
//! `E₁×E₂`. A uniform configuration ends the run with a corner count; a
//! non-uniform one is replaced by a denser sub-product found either by the
//! marginal or neighborhood increment, or (in group mode) by adjoining a
//! biased character of a factor set and localizing to a translate of the
//! resulting attendant. Every recorded gain is recounted before it is
//! appended.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::config::ConstantsConfig;
use super::energy::fourier_increment;
use super::nonuniform::{nonuniform_increment, IncrementRoute};
use crate::bohr::{BohrSet, BohrSpec};
use crate::corners::{count_corners, count_l_pattern, unshear, CornerMode};
use crate::error::{Error, Result};
use crate::rng::SeededRng;
use crate::sets::{Shape, Subset, Subset2D};
use crate::uniformity::rect_alpha_uniform;

pub const TRACE_SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Axis {
    Rows,
    Columns,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Termination {
    /// A factor has fewer than 4 points or `δ < 2/√(|E₁||E₂|)`.
    Sizing { detail: String },
    DensityCeiling,
    MaxSteps,
    /// No route produced a verified gain above the floor.
    NoIncrement { detail: String },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Verdict {
    /// Uniform: corners (`d ≠ 0`) of `A ∩ (E₁×E₂)` against `δ³|E₁||E₂|(N−1)`.
    CornerCount { corners: u64, heuristic: f64 },
    MarginalIncrement { axis: Axis, p: f64 },
    BoxNormIncrement { x0: usize, y0: usize },
    FourierIncrement { xi0: usize, factor: usize },
    Terminated { reason: Termination },
}

impl Verdict {
    pub fn is_increment(&self) -> bool {
        matches!(
            self,
            Verdict::MarginalIncrement { .. } | Verdict::BoxNormIncrement { .. } | Verdict::FourierIncrement { .. }
        )
    }

    fn rank(&self) -> u8 {
        match self {
            Verdict::MarginalIncrement { .. } => 0,
            Verdict::BoxNormIncrement { .. } => 1,
            _ => 2,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TraceStep {
    pub step: usize,
    pub a_size: usize,
    pub e1_size: usize,
    pub e2_size: usize,
    pub delta: f64,
    /// `|E_i| / |Λ|` (group) or `|E_i| / N` (grid).
    pub beta1: f64,
    pub beta2: f64,
    pub bohr_dim: usize,
    pub bohr_eps: f64,
    /// Center of the current Bohr window.
    pub translate: (usize, usize),
    pub alpha: f64,
    pub rect_ratio: Option<f64>,
    pub verdict: Verdict,
    /// For increments: the chosen `F₁`, `F₂`, their count and density.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub f1: Option<Subset>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub f2: Option<Subset>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub count: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub new_density: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub required_gain: Option<f64>,
    /// Why other routes did not fire.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IncrementTrace {
    pub schema_version: u32,
    pub seed: u64,
    pub shape: Shape,
    pub input_size: usize,
    pub config: ConstantsConfig,
    pub steps: Vec<TraceStep>,
}

impl IncrementTrace {
    pub fn final_verdict(&self) -> Option<&Verdict> {
        self.steps.last().map(|s| &s.verdict)
    }

    /// Densities at the start of each step.
    pub fn densities(&self) -> Vec<f64> {
        self.steps.iter().map(|s| s.delta).collect()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("trace serializes")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let t: IncrementTrace = serde_json::from_str(s).map_err(|e| Error::Decode(e.to_string()))?;
        if t.schema_version != TRACE_SCHEMA_VERSION {
            return Err(Error::Decode(format!("unsupported trace schema {}", t.schema_version)));
        }
        Ok(t)
    }

    /// Checks the recorded invariants against `a`: strict density growth by
    /// at least the recorded floor, dimension growth of at most one per
    /// step, and the claimed count of every recorded `F₁×F₂`.
    pub fn check(&self, a: &Subset2D) -> std::result::Result<(), String> {
        for w in self.steps.windows(2) {
            let (s, t) = (&w[0], &w[1]);
            if !s.verdict.is_increment() {
                return Err(format!("step {} continues after a final verdict", t.step));
            }
            let floor = s.required_gain.unwrap_or(0.0);
            if !(t.delta > s.delta && t.delta - s.delta >= floor) {
                return Err(format!("step {}: density {} does not exceed {} by {floor}", t.step, t.delta, s.delta));
            }
            if t.bohr_dim < s.bohr_dim || t.bohr_dim > s.bohr_dim + 1 {
                return Err(format!("step {}: dimension {} after {}", t.step, t.bohr_dim, s.bohr_dim));
            }
        }
        for s in &self.steps {
            if let (Some(f1), Some(f2), Some(c)) = (&s.f1, &s.f2, s.count) {
                let got = a.count_in(f1, f2).map_err(|e| e.to_string())?;
                if got != c {
                    return Err(format!("step {}: recorded count {c}, recounted {got}", s.step));
                }
                let d = c as f64 / (f1.count() * f2.count()) as f64;
                if Some(d) != s.new_density {
                    return Err(format!("step {}: recorded density differs from {d}", s.step));
                }
            }
        }
        Ok(())
    }
}

/// The current configuration of the iteration.
struct State {
    e1: Subset,
    e2: Subset,
    /// Group mode only: centered Bohr set and the center of its window.
    lam: Option<BohrSpec>,
    center: (usize, usize),
}

struct Candidate {
    verdict: Verdict,
    f1: Subset,
    f2: Subset,
    count: usize,
    lam: Option<BohrSpec>,
    center: (usize, usize),
}

impl Candidate {
    fn size(&self) -> usize {
        self.f1.count() * self.f2.count()
    }

    fn better_than(&self, other: &Candidate) -> bool {
        let l = self.count as u128 * other.size() as u128;
        let r = other.count as u128 * self.size() as u128;
        l > r || (l == r && self.verdict.rank() < other.verdict.rank())
    }
}

/// Corners with `d ≠ 0` of `a`: through the L-pattern count of the
/// transposed unsheared set in group mode, directly on the grid.
fn corner_total(a: &Subset2D) -> Result<u64> {
    match a.shape() {
        Shape::Group(_) => {
            let t = unshear(a)?.transpose();
            Ok(count_l_pattern(&t, &t, &t)?.off_diagonal)
        }
        Shape::Grid(_) => count_corners(a, CornerMode::GridNonZero),
    }
}

/// `E ∩ (K + c)` with `K` given by centered indices.
fn window(e: &Subset, g: &crate::group::GroupSpec, kernel: &[usize], c: usize) -> Subset {
    let mut out = Subset::empty(e.shape().clone());
    for &t in kernel {
        let x = g.add_idx(t, c);
        if e.contains(x) {
            out.insert(x);
        }
    }
    out
}

fn fourier_route(a: &Subset2D, st: &State, cfg: &ConstantsConfig, alpha0: f64, rng: &mut SeededRng, notes: &mut Vec<String>) -> Option<Candidate> {
    let lam = st.lam.as_ref()?;
    let g = lam.group.clone();
    let kappa = cfg.eps_rule.kappa(alpha0).min(alpha0 / 32.0);
    let window_pts = BohrSet::new(lam).centered_indices();
    let mut best: Option<Candidate> = None;
    for (factor, e, c) in [(1usize, &st.e1, st.center.0), (2, &st.e2, st.center.1)] {
        let q = Subset::from_fn(e.shape().clone(), |x| e.contains(g.add_idx(x, c)));
        let inc = match fourier_increment(&q, lam, alpha0, kappa) {
            Ok(i) => i,
            Err(err) => {
                notes.push(format!("fourier route, factor {factor}: {err}"));
                continue;
            }
        };
        let kernel = BohrSet::new(&inc.attendant).centered_indices();
        let m = window_pts.len();
        let pairs: Vec<(usize, usize)> = if m * m <= cfg.max_translates {
            window_pts.iter().flat_map(|&u| window_pts.iter().map(move |&v| (u, v))).collect()
        } else {
            (0..cfg.max_translates)
                .map(|_| (window_pts[rng.below(m as u64) as usize], window_pts[rng.below(m as u64) as usize]))
                .collect()
        };
        for (u, v) in pairs {
            let c1 = g.add_idx(st.center.0, u);
            let c2 = g.add_idx(st.center.1, v);
            let f1 = window(&st.e1, &g, &kernel, c1);
            let f2 = window(&st.e2, &g, &kernel, c2);
            if f1.count() < 4 || f2.count() < 4 {
                continue;
            }
            let count = a.count_in(&f1, &f2).expect("same shape");
            let cand = Candidate {
                verdict: Verdict::FourierIncrement { xi0: inc.xi0_index, factor },
                f1,
                f2,
                count,
                lam: Some(inc.attendant.clone()),
                center: (c1, c2),
            };
            if best.as_ref().is_none_or(|b| cand.better_than(b)) {
                best = Some(cand);
            }
        }
        if best.is_none() {
            notes.push(format!("fourier route, factor {factor}: attendant of size {} leaves no window of size 4", kernel.len()));
        }
    }
    best
}

/// Runs the iteration on `a` from `E₁ = E₂ = ` the whole side.
pub fn iteration_driver(a: &Subset2D, config: &ConstantsConfig, seed: u64) -> Result<IncrementTrace> {
    config.validate()?;
    if a.count() == 0 {
        return Err(Error::Precondition("A is empty".into()));
    }
    let shape = a.shape().clone();
    let side = shape.side();
    let mut rng = SeededRng::new(seed);
    let mut st = State {
        e1: Subset::full(shape.clone()),
        e2: Subset::full(shape.clone()),
        lam: match &shape {
            Shape::Group(g) => Some(BohrSpec::from_indices(g.clone(), &[0], 1.0, config.kappa)?),
            Shape::Grid(_) => None,
        },
        center: (0, 0),
    };
    let mut steps = Vec::new();
    for step in 0..=config.max_steps {
        let a_loc = a.restrict(&st.e1, &st.e2)?;
        let (n1, n2, m) = (st.e1.count(), st.e2.count(), a_loc.count());
        let size = (n1 * n2).max(1);
        let delta = m as f64 / size as f64;
        let lam_size = st.lam.as_ref().map_or(side, |l| BohrSet::new(l).size());
        let (beta1, beta2) = (n1 as f64 / lam_size as f64, n2 as f64 / lam_size as f64);
        let alpha = config.alpha_at(delta.max(f64::MIN_POSITIVE), beta1 * beta2);
        let mut rec = TraceStep {
            step,
            a_size: m,
            e1_size: n1,
            e2_size: n2,
            delta,
            beta1,
            beta2,
            bohr_dim: st.lam.as_ref().map_or(0, BohrSpec::dim),
            bohr_eps: st.lam.as_ref().map_or(1.0, |l| l.eps),
            translate: st.center,
            alpha,
            rect_ratio: None,
            verdict: Verdict::Terminated { reason: Termination::MaxSteps },
            f1: None,
            f2: None,
            count: None,
            new_density: None,
            required_gain: None,
            notes: Vec::new(),
        };
        if step == config.max_steps {
            steps.push(rec);
            break;
        }
        if n1 < 4 || n2 < 4 || m == 0 || delta < 2.0 / (size as f64).sqrt() {
            let detail = format!("|E1| = {n1}, |E2| = {n2}, |A| = {m}, delta = {delta}");
            rec.verdict = Verdict::Terminated { reason: Termination::Sizing { detail } };
            steps.push(rec);
            break;
        }
        let (uniform, ratio) = rect_alpha_uniform(&a_loc, &st.e1, &st.e2, alpha)?;
        rec.rect_ratio = Some(ratio);
        if uniform {
            let corners = corner_total(&a_loc)?;
            let heuristic = delta.powi(3) * size as f64 * (side as f64 - 1.0);
            rec.verdict = Verdict::CornerCount { corners, heuristic };
            steps.push(rec);
            break;
        }
        if delta >= config.density_ceiling {
            rec.verdict = Verdict::Terminated { reason: Termination::DensityCeiling };
            steps.push(rec);
            break;
        }
        let floor = config.gain_floor(alpha, delta, beta1 * beta2);
        rec.required_gain = Some(floor);

        let mut best: Option<Candidate> = None;
        let alpha_inc = alpha.min(delta.powi(4) / 8.0);
        match nonuniform_increment(&a_loc, &st.e1, &st.e2, alpha_inc) {
            Ok(inc) => {
                let verdict = match inc.route {
                    IncrementRoute::RowPaley { p } => Verdict::MarginalIncrement { axis: Axis::Rows, p },
                    IncrementRoute::ColumnPaley { p } => Verdict::MarginalIncrement { axis: Axis::Columns, p },
                    IncrementRoute::Neighborhood { x0, y0 } => Verdict::BoxNormIncrement { x0, y0 },
                };
                best = Some(Candidate { verdict, f1: inc.f1, f2: inc.f2, count: inc.count, lam: st.lam.clone(), center: st.center });
            }
            Err(e) => rec.notes.push(format!("nonuniform route: {e}")),
        }
        let alpha0 = config.alpha0_at(delta, beta1 * beta2);
        if let Some(c) = fourier_route(&a_loc, &st, config, alpha0, &mut rng, &mut rec.notes) {
            if best.as_ref().is_none_or(|b| c.better_than(b)) {
                best = Some(c);
            }
        }

        let Some(best) = best else {
            let detail = rec.notes.join("; ");
            rec.verdict = Verdict::Terminated { reason: Termination::NoIncrement { detail } };
            steps.push(rec);
            break;
        };
        // Recount before accepting.
        let count = a.count_in(&best.f1, &best.f2)?;
        let new_density = count as f64 / best.size() as f64;
        if count != best.count || !(new_density > delta && new_density - delta >= floor) {
            let detail = format!("best candidate density {new_density} against {delta} + {floor}");
            rec.verdict = Verdict::Terminated { reason: Termination::NoIncrement { detail } };
            steps.push(rec);
            break;
        }
        rec.verdict = best.verdict;
        rec.count = Some(count);
        rec.new_density = Some(new_density);
        rec.f1 = Some(best.f1.clone());
        rec.f2 = Some(best.f2.clone());
        steps.push(rec);
        st = State { e1: best.f1, e2: best.f2, lam: best.lam, center: best.center };
    }
    Ok(IncrementTrace {
        schema_version: TRACE_SCHEMA_VERSION,
        seed,
        shape,
        input_size: a.count(),
        config: config.clone(),
        steps,
    })
}

/// A static density-versus-step plot.
pub fn trajectory_svg(trace: &IncrementTrace) -> String {
    let (w, h, pad) = (480.0, 320.0, 40.0);
    let n = trace.steps.len().max(2) - 1;
    let x = |i: usize| pad + (w - 2.0 * pad) * i as f64 / n as f64;
    let y = |d: f64| h - pad - (h - 2.0 * pad) * d.clamp(0.0, 1.0);
    let mut s = String::new();
    let _ = writeln!(s, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}">"#);
    let _ = writeln!(s, r#"<rect width="{w}" height="{h}" fill="white"/>"#);
    let _ = writeln!(s, r#"<line x1="{pad}" y1="{}" x2="{}" y2="{}" stroke="black"/>"#, h - pad, w - pad, h - pad);
    let _ = writeln!(s, r#"<line x1="{pad}" y1="{pad}" x2="{pad}" y2="{}" stroke="black"/>"#, h - pad);
    let _ = writeln!(s, r#"<text x="{}" y="{}" font-size="12" text-anchor="middle">step</text>"#, w / 2.0, h - 8.0);
    let _ = writeln!(s, r#"<text x="12" y="{}" font-size="12" transform="rotate(-90 12 {})" text-anchor="middle">density</text>"#, h / 2.0, h / 2.0);
    for (v, label) in [(0.0, "0"), (0.5, "0.5"), (1.0, "1")] {
        let _ = writeln!(s, r#"<text x="{}" y="{}" font-size="10" text-anchor="end">{label}</text>"#, pad - 4.0, y(v) + 3.0);
    }
    let pts: Vec<String> = trace.steps.iter().enumerate().map(|(i, st)| format!("{:.2},{:.2}", x(i), y(st.delta))).collect();
    let _ = writeln!(s, r#"<polyline fill="none" stroke="steelblue" stroke-width="2" points="{}"/>"#, pts.join(" "));
    for (i, st) in trace.steps.iter().enumerate() {
        let _ = writeln!(s, r#"<circle cx="{:.2}" cy="{:.2}" r="3" fill="steelblue"/>"#, x(i), y(st.delta));
    }
    s.push_str("</svg>\n");
    s
}
