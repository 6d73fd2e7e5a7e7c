//! Experiment harness for `corners-lab`: subcommand dispatch, input and
//! output files, seeding and thread control.

pub mod schema;
pub mod suite;

use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use corners_lab::bohr::{self, BohrReport, BohrSpec};
use corners_lab::constructions::{behrend_construction, is_ap3_free, BehrendCandidate};
use corners_lab::corners::count_corners;
use corners_lab::extremal::{extremal_search_with, ExtremalResult, SearchOptions};
use corners_lab::increment::{iteration_driver, trajectory_svg, ConstantsConfig, IncrementTrace};
use corners_lab::uniformity::{uniformity_report, UniformityReport};
use corners_lab::{CornerMode, Error, GroupSpec, Subset, Subset2D};

/// Exit status for a successful run.
pub const EXIT_OK: u8 = 0;
/// Exit status for invalid input, unmet preconditions or failed checks.
pub const EXIT_ERROR: u8 = 1;
/// Exit status when a search budget ran out before completion.
pub const EXIT_BUDGET: u8 = 2;

/// Environment variable capping the worker pool.
pub const THREADS_ENV: &str = "CORNERS_LAB_THREADS";

#[derive(Debug, Parser)]
#[command(name = "corners-lab", version, about = "Corners, Bohr sets and density increments over finite abelian groups")]
pub struct Cli {
    /// Print the JSON schemas of every input and output format and exit.
    #[arg(long)]
    pub schema: bool,

    /// Write the JSON result here instead of standard output.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Option<Command>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Count corners of a set read from a set file.
    CornerCount(CornerCountArgs),
    /// Box norm and uniformity report of a set on E1×E2.
    BoxNorm(BoxNormArgs),
    /// Size, regularity and ±-window of a Bohr set.
    BohrExplore(BohrExploreArgs),
    /// Largest corner-free subset by exhaustive branch and bound.
    LnameOracle(LnameArgs),
    /// Behrend's progression-free subset of {1..n}.
    Behrend(BehrendArgs),
    /// Run the density-increment iteration and write its trace.
    IncrementRun(IncrementArgs),
    /// Run the brute-force oracle checks and report each one.
    OracleSuite(suite::SuiteArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    /// `G×G`, `d ≠ 0`.
    Group,
    /// `{0..n-1}²`, `d > 0`.
    Grid,
    /// `{0..n-1}²`, `d ≠ 0`.
    GridNonzero,
}

impl From<ModeArg> for CornerMode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Group => CornerMode::GroupNonZero,
            ModeArg::Grid => CornerMode::GridPositive,
            ModeArg::GridNonzero => CornerMode::GridNonZero,
        }
    }
}

#[derive(Debug, Args)]
pub struct CornerCountArgs {
    #[arg(long)]
    pub input: PathBuf,
    /// Defaults to `group` for group sets and `grid` for grid sets.
    #[arg(long, value_enum)]
    pub mode: Option<ModeArg>,
}

#[derive(Debug, Args)]
pub struct BoxNormArgs {
    #[arg(long)]
    pub input: PathBuf,
    /// First factor; the whole side when absent.
    #[arg(long)]
    pub e1: Option<PathBuf>,
    /// Second factor; the whole side when absent.
    #[arg(long)]
    pub e2: Option<PathBuf>,
    /// Uniformity threshold; `δ⁴/8` when absent.
    #[arg(long)]
    pub alpha: Option<f64>,
}

#[derive(Debug, Args)]
pub struct BohrExploreArgs {
    /// Group such as `Z101` or `Z6xZ4`.
    #[arg(long)]
    pub group: String,
    /// Characters separated by commas; coordinates of one character by `:`.
    #[arg(long, value_delimiter = ',')]
    pub chars: Vec<String>,
    #[arg(long)]
    pub eps: f64,
    #[arg(long, default_value_t = bohr::DEFAULT_KAPPA)]
    pub kappa: f64,
    /// Replace the radius by a regular one in (eps/2, eps).
    #[arg(long)]
    pub regularize: bool,
}

#[derive(Debug, Args)]
pub struct LnameArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long, value_enum, default_value = "grid")]
    pub mode: ModeArg,
    /// Node budget; exit status 2 if it runs out.
    #[arg(long, default_value_t = SearchOptions::default().budget)]
    pub budget: u64,
    /// Decisions split off for parallel subtrees.
    #[arg(long, default_value_t = 0)]
    pub split_depth: usize,
}

#[derive(Debug, Args)]
pub struct BehrendArgs {
    #[arg(long)]
    pub n: u64,
    /// Scan the output for three-term progressions.
    #[arg(long)]
    pub verify: bool,
}

#[derive(Debug, Args)]
pub struct IncrementArgs {
    #[arg(long)]
    pub input: PathBuf,
    /// Constants file; the desk preset when absent.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Trace file; standard output when absent.
    #[arg(long)]
    pub trace: Option<PathBuf>,
    /// Density-versus-step plot.
    #[arg(long)]
    pub svg: Option<PathBuf>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CornerCountOutput {
    pub mode: CornerMode,
    pub side: usize,
    pub size: usize,
    pub corners: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BehrendOutput {
    pub n: u64,
    pub size: usize,
    pub set: Vec<u64>,
    pub chosen: BehrendCandidate,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ap3_free: Option<bool>,
}

/// A command-level failure and its exit status.
#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = if matches!(e, Error::BudgetExhausted { .. }) { EXIT_BUDGET } else { EXIT_ERROR };
        Failure { code, message: e.to_string() }
    }
}

fn fail(message: impl Into<String>) -> Failure {
    Failure { code: EXIT_ERROR, message: message.into() }
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| fail(format!("{}: {e}", path.display())))
}

fn write(path: &Path, text: &str) -> Result<(), Failure> {
    fs::write(path, text).map_err(|e| fail(format!("{}: {e}", path.display())))
}

pub fn read_set2d(path: &Path) -> Result<Subset2D, Failure> {
    Subset2D::from_json(&read(path)?).map_err(|e| fail(format!("{}: {e}", path.display())))
}

fn read_set(path: &Path) -> Result<Subset, Failure> {
    Subset::from_json(&read(path)?).map_err(|e| fail(format!("{}: {e}", path.display())))
}

fn json<T: Serialize>(v: &T) -> String {
    serde_json::to_string_pretty(v).expect("outputs serialize") + "\n"
}

/// Parses `1:2` as the coordinates of one character.
fn parse_char(g: &GroupSpec, s: &str) -> Result<corners_lab::Character, Failure> {
    let coords = s
        .split(':')
        .map(|c| c.trim().parse::<u64>().map_err(|e| fail(format!("character {s:?}: {e}"))))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(g.character(&coords)?)
}

/// The outcome of a command: text for the primary output and an exit status.
pub struct Outcome {
    pub text: String,
    pub code: u8,
}

impl Outcome {
    fn ok(text: String) -> Self {
        Outcome { text, code: EXIT_OK }
    }
}

pub fn corner_count(args: &CornerCountArgs) -> Result<CornerCountOutput, Failure> {
    let a = read_set2d(&args.input)?;
    let mode = args.mode.map(CornerMode::from).unwrap_or_else(|| CornerMode::default_for(a.shape()));
    Ok(CornerCountOutput { mode, side: a.side(), size: a.count(), corners: count_corners(&a, mode)? })
}

pub fn box_norm(args: &BoxNormArgs) -> Result<UniformityReport, Failure> {
    let a = read_set2d(&args.input)?;
    let factor = |p: &Option<PathBuf>| -> Result<Subset, Failure> {
        match p {
            Some(p) => read_set(p),
            None => Ok(Subset::full(a.shape().clone())),
        }
    };
    let (e1, e2) = (factor(&args.e1)?, factor(&args.e2)?);
    let size = (e1.count() * e2.count()).max(1) as f64;
    let alpha = args.alpha.unwrap_or_else(|| (a.restrict(&e1, &e2).map(|r| r.count()).unwrap_or(0) as f64 / size).powi(4) / 8.0);
    Ok(uniformity_report(&a, &e1, &e2, alpha)?)
}

pub fn bohr_explore(args: &BohrExploreArgs) -> Result<BohrReport, Failure> {
    let g: GroupSpec = args.group.parse()?;
    let chars = args.chars.iter().map(|c| parse_char(&g, c)).collect::<Result<Vec<_>, _>>()?;
    let eps = if args.regularize { bohr::find_regular_epsilon(&g, &chars, args.eps, args.kappa)? } else { args.eps };
    Ok(bohr::report(&BohrSpec::new(g, chars, eps, args.kappa)?))
}

pub fn lname_oracle(args: &LnameArgs) -> Result<ExtremalResult, Failure> {
    let opts = SearchOptions { budget: args.budget, split_depth: args.split_depth };
    Ok(extremal_search_with(args.n, args.mode.into(), opts)?)
}

pub fn behrend(args: &BehrendArgs) -> Result<BehrendOutput, Failure> {
    let b = behrend_construction(args.n)?;
    let ap3_free = args.verify.then(|| is_ap3_free(&b.set.iter().map(|&x| x as i64).collect::<Vec<_>>()));
    Ok(BehrendOutput { n: b.n, size: b.set.len(), set: b.set, chosen: b.chosen, ap3_free })
}

pub fn increment_run(args: &IncrementArgs) -> Result<IncrementTrace, Failure> {
    let a = read_set2d(&args.input)?;
    let config = match &args.config {
        Some(p) => ConstantsConfig::from_json(&read(p)?)?,
        None => ConstantsConfig::desk(),
    };
    Ok(iteration_driver(&a, &config, args.seed)?)
}

/// Caps the global worker pool from [`THREADS_ENV`]; ignored if unset.
pub fn configure_threads() -> Result<(), Failure> {
    let Ok(v) = std::env::var(THREADS_ENV) else { return Ok(()) };
    let n: usize = v.trim().parse().map_err(|_| fail(format!("{THREADS_ENV} must be a positive integer, got {v:?}")))?;
    if n == 0 {
        return Err(fail(format!("{THREADS_ENV} must be positive")));
    }
    // A second call in the same process keeps the first pool.
    let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    Ok(())
}

fn dispatch(cli: &Cli) -> Result<Outcome, Failure> {
    if cli.schema {
        return Ok(Outcome::ok(json(&schema::all())));
    }
    let Some(cmd) = &cli.command else {
        return Err(fail("no subcommand given; see --help"));
    };
    configure_threads()?;
    match cmd {
        Command::CornerCount(a) => Ok(Outcome::ok(json(&corner_count(a)?))),
        Command::BoxNorm(a) => Ok(Outcome::ok(json(&box_norm(a)?))),
        Command::BohrExplore(a) => Ok(Outcome::ok(json(&bohr_explore(a)?))),
        Command::LnameOracle(a) => {
            let r = lname_oracle(a)?;
            let code = if r.optimal { EXIT_OK } else { EXIT_BUDGET };
            Ok(Outcome { text: json(&r), code })
        }
        Command::Behrend(a) => {
            let r = behrend(a)?;
            let code = if r.ap3_free == Some(false) { EXIT_ERROR } else { EXIT_OK };
            Ok(Outcome { text: json(&r), code })
        }
        Command::IncrementRun(a) => {
            let t = increment_run(a)?;
            if let Some(p) = &a.svg {
                write(p, &trajectory_svg(&t))?;
            }
            let text = t.to_json() + "\n";
            match &a.trace {
                Some(p) => {
                    write(p, &text)?;
                    Ok(Outcome::ok(String::new()))
                }
                None => Ok(Outcome::ok(text)),
            }
        }
        Command::OracleSuite(a) => {
            let r = suite::run(a)?;
            let code = if r.all_pass() { EXIT_OK } else { EXIT_ERROR };
            Ok(Outcome { text: json(&r), code })
        }
    }
}

/// Parses `argv`, runs the command and returns the exit status. Results go
/// to standard output (or `--output`), diagnostics to standard error.
pub fn run<I, T>(argv: I) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_ERROR } else { EXIT_OK };
        }
    };
    let out = dispatch(&cli).and_then(|o| {
        if let (Some(p), false) = (&cli.output, o.text.is_empty()) {
            write(p, &o.text)?;
        } else {
            print!("{}", o.text);
        }
        Ok(o.code)
    });
    match out {
        Ok(code) => code,
        Err(f) => {
            eprintln!("error: {}", f.message);
            f.code
        }
    }
}
