//! Thin-film deposition models and their foreign-direct-investment
//! reading.
//!
//! * [`kinetics`]: residence time, accommodation, impingement and
//!   Langmuir evaporation rates, condensation thresholds.
//! * [`geometry`]: cosine-law mass flux and thickness profiles over plane
//!   supports, deposited mass by quadrature.
//! * [`transfer`]: the linear source-to-support coupling `m = K M`, its
//!   non-negative inverse and calibration.
//! * [`fdi`]: investment value, mass and transfer velocity, greenfield and
//!   joint-venture feasibility, site ranking.
//! * [`scenario`], [`table`], [`cli`]: JSON scenarios in, CSV out.
//!
//! The numerical core is generic over [`Scalar`] (`f32` or `f64`); the
//! aliases below fix it to one precision.

pub mod cli;
pub mod core_types;
pub mod error;
pub mod fdi;
pub mod geometry;
pub mod kinetics;
pub mod nnls;
pub mod scalar;
pub mod scenario;
pub mod table;
pub mod transfer;

pub use error::{Error, Result};
pub use scalar::Scalar;

pub type Substance = core_types::Substance<f64>;
pub type SourceSpec = core_types::SourceSpec<f64>;
pub type SupportSpec = core_types::SupportSpec<f64>;
pub type Constants = core_types::Constants<f64>;
pub type AccommodationInputs = core_types::AccommodationInputs<f64>;
pub type RateResult = kinetics::RateResult<f64>;
pub type EmissionGeometry = geometry::EmissionGeometry<f64>;
pub type ThicknessProfile = geometry::ThicknessProfile<f64>;
pub type TransferMatrix = transfer::TransferMatrix<f64>;
pub type Observation = transfer::Observation<f64>;
pub type FdiLocation = fdi::FdiLocation<f64>;
pub type FirmProfile = fdi::FirmProfile<f64>;
pub type RankedLocation = fdi::RankedLocation<f64>;

pub type SubstanceF32 = core_types::Substance<f32>;
pub type SourceSpecF32 = core_types::SourceSpec<f32>;
pub type SupportSpecF32 = core_types::SupportSpec<f32>;
pub type TransferMatrixF32 = transfer::TransferMatrix<f32>;
pub type FirmProfileF32 = fdi::FirmProfile<f32>;
