//! Batch runner for the brute-force oracles: each check compares a fast
//! path against its definition on seeded random inputs and reports the
//! worst discrepancy.

use clap::Args;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use corners_lab::bohr::{BohrSet, BohrSpec, DEFAULT_KAPPA};
use corners_lab::corners::{count_corners, count_l_pattern};
use corners_lab::oracle;
use corners_lab::spectral::{convolve, dft, DenseMap, DenseMap2D};
use corners_lab::uniformity::{box_norm4, box_norm4_pairform};
use corners_lab::{CornerMode, GroupSpec, SeededRng, Shape, Subset2D};

use crate::Failure;

pub const DEFAULT_GROUPS: &str = "Z8,Z12,Z5xZ5,Z101";

/// Above this order the quadratic direct transform is skipped.
const DIRECT_LIMIT: usize = 2048;
/// Above this order the planar checks are skipped.
const PLANAR_LIMIT: usize = 16;

#[derive(Clone, Debug, Args)]
pub struct SuiteArgs {
    /// Groups separated by commas; an empty list gives an empty report.
    #[arg(long, default_value = DEFAULT_GROUPS)]
    pub groups: String,
    /// Relative tolerance for floating-point identities.
    #[arg(long, default_value_t = 1e-9)]
    pub tolerance: f64,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Random inputs per check.
    #[arg(long, default_value_t = 20)]
    pub samples: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Measure {
    /// Largest relative error; passes at or below the tolerance.
    RelativeError,
    /// Number of disagreements between exact counts; passes at zero.
    Mismatches,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckResult {
    pub group: String,
    pub invariant: String,
    pub measure: Measure,
    pub measured: f64,
    pub threshold: f64,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub tolerance: f64,
    pub seed: u64,
    pub samples: usize,
    pub results: Vec<CheckResult>,
}

impl SuiteReport {
    pub fn all_pass(&self) -> bool {
        self.results.iter().all(|r| r.pass)
    }
}

fn rel(l: f64, r: f64) -> f64 {
    let d = (l - r).abs();
    if d == 0.0 {
        0.0
    } else {
        d / l.abs().max(r.abs())
    }
}

fn rel_c(l: Complex64, r: Complex64) -> f64 {
    let d = (l - r).norm();
    if d == 0.0 {
        0.0
    } else {
        d / l.norm().max(r.norm())
    }
}

fn sample(r: &mut SeededRng) -> Complex64 {
    Complex64::new(2.0 * r.next_f64() - 1.0, 2.0 * r.next_f64() - 1.0)
}

struct Checks<'a> {
    group: String,
    tol: f64,
    out: &'a mut Vec<CheckResult>,
}

impl Checks<'_> {
    fn relative(&mut self, invariant: &str, measured: f64) {
        let pass = measured <= self.tol;
        self.push(invariant, Measure::RelativeError, measured, self.tol, pass);
    }

    fn exact(&mut self, invariant: &str, mismatches: usize) {
        self.push(invariant, Measure::Mismatches, mismatches as f64, 0.0, mismatches == 0);
    }

    fn push(&mut self, invariant: &str, measure: Measure, measured: f64, threshold: f64, pass: bool) {
        self.out.push(CheckResult { group: self.group.clone(), invariant: invariant.into(), measure, measured, threshold, pass });
    }
}

fn group_checks(g: &GroupSpec, args: &SuiteArgs, r: &mut SeededRng, out: &mut Vec<CheckResult>) {
    let mut c = Checks { group: g.to_string(), tol: args.tolerance, out };
    let n = g.order();
    let nf = n as f64;
    let (mut parseval, mut inner, mut conv, mut direct) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
    for i in 0..args.samples {
        let f = DenseMap::from_fn(g.clone(), |_| sample(r));
        let h = DenseMap::from_fn(g.clone(), |_| sample(r));
        let (fh, hh) = (dft(&f), dft(&h));
        parseval = parseval.max(rel(f.l2_sq(), fh.l2_sq() / nf));
        let ip: Complex64 = f.values.iter().zip(&h.values).map(|(a, b)| a * b.conj()).sum();
        let iph: Complex64 = fh.values.iter().zip(&hh.values).map(|(a, b)| a * b.conj()).sum::<Complex64>() / nf;
        inner = inner.max(rel_c(ip, iph));
        let cv = convolve(&f, &h).expect("same group");
        let spec: f64 = fh.values.iter().zip(&hh.values).map(|(a, b)| a.norm_sqr() * b.norm_sqr()).sum::<f64>() / nf;
        conv = conv.max(rel(cv.l2_sq(), spec));
        if n <= DIRECT_LIMIT && i < 3 {
            let slow = oracle::dft_naive(&f);
            let scale: f64 = f.values.iter().map(|v| v.norm()).sum();
            let worst = fh.values.iter().zip(&slow.values).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
            direct = direct.max(worst / scale);
        }
    }
    c.relative("parseval", parseval);
    c.relative("inner-product", inner);
    c.relative("convolution-energy", conv);
    if n <= DIRECT_LIMIT {
        c.relative("transform-vs-direct", direct);
    }

    let mut bohr_bad = 0;
    for _ in 0..args.samples.min(10) {
        let d = 1 + r.below(3) as usize;
        let chars: Vec<_> = (0..d).map(|_| g.character_at(r.below(n as u64) as usize)).collect();
        let spec = BohrSpec::new(g.clone(), chars, 0.05 + 0.45 * r.next_f64(), DEFAULT_KAPPA).expect("valid radius");
        if BohrSet::new(&spec).members() != &oracle::bohr_members_naive(&spec) {
            bohr_bad += 1;
        }
    }
    c.exact("bohr-members", bohr_bad);

    if n <= PLANAR_LIMIT {
        let shape = Shape::Group(g.clone());
        let mut pair = 0.0f64;
        let (mut corners_bad, mut l_bad) = (0, 0);
        for _ in 0..args.samples {
            let f = DenseMap2D::from_fn(shape.clone(), |_, _| sample(r));
            pair = pair.max(rel(box_norm4(&f), box_norm4_pairform(&f)));
            pair = pair.max(rel(box_norm4(&f), oracle::box_norm4_naive(&f)));
            let p = r.next_f64();
            let a = Subset2D::from_fn(shape.clone(), |_, _| r.bernoulli(p));
            if count_corners(&a, CornerMode::GroupNonZero).expect("group mode") != oracle::count_corners_naive(&a, CornerMode::GroupNonZero) {
                corners_bad += 1;
            }
            let b = Subset2D::from_fn(shape.clone(), |_, _| r.bernoulli(p));
            if count_l_pattern(&a, &b, &a).expect("same shape").total != oracle::count_l_pattern_naive(&a, &b, &a) {
                l_bad += 1;
            }
        }
        c.relative("box-norm-pair-form", pair);
        c.exact("corner-count", corners_bad);
        c.exact("l-pattern-count", l_bad);
    }
}

pub fn run(args: &SuiteArgs) -> Result<SuiteReport, Failure> {
    if !(args.tolerance >= 0.0) {
        return Err(crate::fail(format!("tolerance must be nonnegative, got {}", args.tolerance)));
    }
    let groups = args
        .groups
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| s.parse::<GroupSpec>())
        .collect::<Result<Vec<_>, _>>()?;
    let mut rng = SeededRng::new(args.seed);
    let mut results = Vec::new();
    for g in &groups {
        group_checks(g, args, &mut rng, &mut results);
    }
    Ok(SuiteReport { tolerance: args.tolerance, seed: args.seed, samples: args.samples, results })
}
