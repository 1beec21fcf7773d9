//! Core simulation library for the memrig crossbar rig: a stochastic 1T1R
//! cell model, the analog front end that drives and senses a 12×7 pseudo
//! crossbar, incremental program-and-verify algorithms, and the descriptive
//! statistics used by the reporting tools.
//!
//! Everything numeric is generic over [`scalar::Real`]; the aliases below
//! fix `f64` for ordinary use.

pub mod cell;
pub mod frontend;
pub mod profile;
pub mod program;
pub mod scalar;
pub mod stats;
pub mod svg;

pub use scalar::Real;

/// Default scalar for the exported aliases.
pub type F = f64;

pub type Cell = cell::Cell<F>;
pub type CellParams = cell::CellParams<F>;
pub type TransistorModel = cell::TransistorModel<F>;
pub type PulseSpec = cell::PulseSpec<F>;
pub type PulseOutcome = cell::PulseOutcome<F>;
pub type CrossbarFixture = frontend::CrossbarFixture<F>;
pub type TiaConfig = frontend::TiaConfig<F>;
pub type AdcReading = frontend::AdcReading<F>;
pub type CdfSeries = stats::CdfSeries<F>;
pub type BoxStats = stats::BoxStats<F>;
