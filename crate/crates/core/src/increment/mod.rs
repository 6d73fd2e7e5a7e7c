//! Density increments: level sets of marginals, the non-uniform step, the
//! character-adjoining step inside Bohr sets, the index functional over
//! families of Bohr sets, and the iteration that strings them together.

pub mod config;
pub mod driver;
pub mod energy;
pub mod index;
pub mod nonuniform;
pub mod paley;

pub use config::{increment_gain, ConstantsConfig, EpsRule, GainFloor, Monomial, Preset};
pub use driver::{iteration_driver, trajectory_svg, Axis, IncrementTrace, Termination, TraceStep, Verdict, TRACE_SCHEMA_VERSION};
pub use energy::{
    easy_case_split, fourier_increment, l2_to_energy, product_energy, EasyCaseReport, EnergyReport, FourierIncrement,
    ProductEnergyReport,
};
pub use index::{density_g, index, index_gain, keps_check, BohrFamily, FamilyLevel, IndexGainReport, KepsReport};
pub use nonuniform::{
    check_increment_bounds, marginal_deviation, nonuniform_increment, required_gain_exact, IncrementBounds, IncrementRoute, NonuniformIncrement,
};
pub use paley::{paley_set, PaleySet};
