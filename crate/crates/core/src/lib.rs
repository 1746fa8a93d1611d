//! Certification and simulation toolkit for GHZ-type contextuality paradoxes.
//!
//! * [`graph`]: graphs, named fixtures, exact invariants.
//! * [`lovasz`]: Lovász theta with certificates, Gram matrices and ray extraction.
//! * [`contextuality`]: paradox certification and the noncontextuality inequality.
//! * [`srg`]: the strongly-regular-graph screen for three-context paradoxes.
//! * [`photonics`]: time-bin prepare-and-measure simulation.
//! * [`reference`]: experimental summary values for comparison.

pub mod contextuality;
pub mod error;
pub mod graph;
pub mod linalg;
pub mod lovasz;
pub mod photonics;
pub mod reference;
pub mod srg;

pub use error::{Error, Result};

/// Version tag written into every JSON document.
pub const SCHEMA_VERSION: u32 = 1;
