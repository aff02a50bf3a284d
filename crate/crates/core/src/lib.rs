//! Classical simulation of metrology with partial quantum error correction.
//!
//! Probe states are built from CSS codes ([`codes`]): one stabilizer sector is
//! summed into the phase imprinter, the other is measured to correct noise
//! parallel to the imprinter ([`decoder`]). [`metrology`] turns decoded sign
//! statistics and dual-channel counting into quantum Fisher information, and
//! [`adaptive`] holds the Bacon-Shor shape trade-off and weight schedule.
//!
//! Numerical routines are generic over the scalar type ([`Scalar`] / [`Real`]);
//! exhaustive oracles also run over exact rationals ([`Exact`]).

pub mod adaptive;
pub mod codes;
pub mod decoder;
pub mod error;
pub mod gf2;
pub mod metrology;
pub mod noise;
pub mod scalar;
pub mod support;

pub use codes::{build_code, build_stabilizers, CodeParams, CssCode, Family, Sector, StabilizerGroup};
pub use error::{Error, Result};
pub use scalar::{ratio, Real, Scalar};
pub use support::{overlap_parity, Support};

/// Exact rational scalar used by the exhaustive oracles.
pub type Exact = num_rational::BigRational;

pub type PauliChannel64 = noise::PauliChannel<f64>;
pub type ExactChannel = noise::PauliChannel<Exact>;
pub type DeltaFit64 = metrology::DeltaFit<f64>;
pub type ShapeResult64 = adaptive::ShapeResult<f64>;
pub type ScheduleEntry64 = adaptive::ScheduleEntry<f64>;
