//! Computational tools for the corners problem over finite abelian groups:
//! exact Bohr sets, Fourier and box-norm uniformity diagnostics, corner
//! counting and extremal search, and the density-increment iteration.

pub mod bits;
pub mod bohr;
pub mod constructions;
pub mod corners;
pub mod error;
pub mod extremal;
pub mod group;
pub mod increment;
pub mod oracle;
pub mod rng;
pub mod sets;
pub mod spectral;
pub mod uniformity;

pub use bits::BitSet;
pub use corners::CornerMode;
pub use extremal::ExtremalResult;
pub use rng::SeededRng;
pub use bohr::{BohrReport, BohrSet, BohrSpec};
pub use error::{Error, Result};
pub use group::{Character, Element, GroupSpec};
pub use sets::{Shape, Subset, Subset2D};
pub use spectral::{DenseMap, DenseMap2D};
