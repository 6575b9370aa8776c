//! Reliability analysis for embedded devices whose failures arise from
//! hardware, software, and the interaction between the two.
//!
//! The crate is organised around the stages of an analysis:
//!
//! - [`fuzzy`]: triangular fuzzy failure/repair rates, alpha-cuts and the
//!   two-state availability band they induce.
//! - [`models`]: closed-form Weibull, Goel-Okumoto NHPP and hypoexponential
//!   reliability curves and their product.
//! - [`markov`]: the unified hardware-software CTMC and its transient
//!   solution by uniformization.
//! - [`monte_carlo`]: seeded failure/repair cycle simulation producing an
//!   [`ExposureTable`].
//! - [`fitting`]: least-squares estimation of the interaction rates from an
//!   exposure table.

pub mod error;
pub mod fitting;
pub mod fuzzy;
pub mod markov;
pub mod models;
pub mod monte_carlo;

pub use error::{Error, Result};
pub use fitting::{fit_lambda1, fit_scan, sse, FitResult};
pub use fuzzy::{
    defuzzify, fuzzy_availability, fuzzy_band, fuzzy_unavailability, AlphaCutInterval,
    Defuzzify, FuzzyIndex, Quantity, RepairRateUnit, TriangularFuzzyNumber,
};
pub use markov::{
    build_unified_model, interaction_reliability_markov, transient_distribution,
    GeneratorMatrix, StateDistribution, StateId, Transition, UnifiedModel,
};
pub use models::{
    composite_pmu_reliability, interaction_reliability_closed_form, nhpp_mean_value,
    software_reliability, weibull_reliability, HardwareParams, InteractionParams,
    InteractionSource, SoftwareParams,
};
pub use monte_carlo::{
    build_exposure_table, run_replication, run_simulation, run_simulation_with,
    sample_exponential, Execution, ExposureTable, ReplicationTrace, SimulationConfig,
    SimulationSummary,
};

/// Interaction rate UP -> HD3 reported for the reference study at G = 2.
///
/// The exposure data behind it was never published, so it is kept as a
/// documented constant rather than a regression target.
pub const REFERENCE_LAMBDA1: f64 = 8.92e-4;

/// Interaction rate HD3 -> failure as reported alongside [`REFERENCE_LAMBDA1`].
///
/// Note this is not `REFERENCE_G * REFERENCE_LAMBDA1` (= 1.784e-3); the
/// reported pair is internally inconsistent. The fitter always enforces
/// `lambda2 = G * lambda1`.
pub const REFERENCE_LAMBDA2: f64 = 3.92e-3;

/// Rate ratio `lambda2 / lambda1` used for [`REFERENCE_LAMBDA1`].
pub const REFERENCE_G: f64 = 2.0;

/// Crisp failure rate (per year) selected from the fuzzy failure-rate band.
pub const REFERENCE_FAILURE_RATE: f64 = 0.6566;

/// Crisp repair rate (per year) selected from the fuzzy repair-rate band.
pub const REFERENCE_REPAIR_RATE: f64 = 22.2898;
