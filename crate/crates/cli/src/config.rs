//! The JSON run configuration.
//!
//! Every section is optional and falls back to the reference setup; unknown
//! keys anywhere are rejected. A `fuzzy` section, when present, must state
//! `repair_rate_unit` explicitly.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use pmurel_core::fuzzy::{alpha_grid, RepairRateUnit};
use pmurel_core::markov::{build_unified_model, UnifiedModel};
use pmurel_core::{
    HardwareParams, InteractionParams, SimulationConfig, SoftwareParams, TriangularFuzzyNumber,
    REFERENCE_FAILURE_RATE, REFERENCE_G, REFERENCE_LAMBDA1, REFERENCE_REPAIR_RATE,
};

use crate::error::CliError;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub schema: u32,
    #[serde(default = "default_output_dir")]
    pub output_dir: PathBuf,
    #[serde(default)]
    pub fuzzy: FuzzySection,
    #[serde(default)]
    pub hardware: HardwareSection,
    #[serde(default)]
    pub software: SoftwareSection,
    #[serde(default)]
    pub interaction: InteractionSection,
    #[serde(default)]
    pub markov: MarkovSection,
    #[serde(default)]
    pub simulation: SimulationSection,
    #[serde(default)]
    pub fit: FitSection,
    #[serde(default)]
    pub curve: CurveSection,
}

fn default_output_dir() -> PathBuf {
    PathBuf::from("out")
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            schema: SCHEMA_VERSION,
            output_dir: default_output_dir(),
            fuzzy: FuzzySection::default(),
            hardware: HardwareSection::default(),
            software: SoftwareSection::default(),
            interaction: InteractionSection::default(),
            markov: MarkovSection::default(),
            simulation: SimulationSection::default(),
            fit: FitSection::default(),
            curve: CurveSection::default(),
        }
    }
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        Self::parse(&text).map_err(|e| match e {
            CliError::Config(msg) => CliError::Config(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    pub fn parse(text: &str) -> Result<Self, CliError> {
        let cfg: RunConfig =
            serde_json::from_str(text).map_err(|e| CliError::Config(e.to_string()))?;
        if cfg.schema != SCHEMA_VERSION {
            return Err(CliError::Config(format!(
                "unsupported schema {}, expected {SCHEMA_VERSION}",
                cfg.schema
            )));
        }
        Ok(cfg)
    }

    /// Validates every section.
    pub fn validate(&self) -> Result<(), CliError> {
        self.fuzzy.validate()?;
        self.hardware.params()?;
        self.software.params()?;
        self.interaction.params()?;
        self.markov.validate()?;
        self.simulation_config()?;
        self.fit.validate()?;
        self.curve.validate()?;
        Ok(())
    }

    /// Simulation parameters; unset rates come from the defuzzified fuzzy inputs.
    pub fn simulation_config(&self) -> Result<SimulationConfig, CliError> {
        let s = &self.simulation;
        let (failure, repair) = self.fuzzy.crisp_rates()?;
        let cfg = SimulationConfig {
            failure_rate: s.failure_rate.unwrap_or(failure),
            repair_rate: s.repair_rate.unwrap_or(repair),
            mission_time: s.mission_time,
            n_replications: s.replications,
            master_seed: s.seed,
            n_intervals: s.intervals,
        };
        cfg.validate().map_err(section("simulation"))?;
        Ok(cfg)
    }
}

fn section(name: &'static str) -> impl Fn(pmurel_core::Error) -> CliError {
    move |e| CliError::Config(format!("[{name}] {e}"))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FuzzySection {
    /// Center of the failure-rate membership, per year.
    pub failure_rate: f64,
    /// Center of the repair membership, read according to `repair_rate_unit`.
    pub repair_rate: f64,
    /// Required: how `repair_rate` is to be read.
    pub repair_rate_unit: RepairRateUnit,
    /// Half-width as a fraction of the center, for both inputs.
    #[serde(default = "default_relative_halfwidth")]
    pub relative_halfwidth: f64,
    /// Absolute half-width overrides (same unit as the center).
    #[serde(default)]
    pub failure_halfwidth: Option<f64>,
    #[serde(default)]
    pub repair_halfwidth: Option<f64>,
    #[serde(default = "default_alpha_levels")]
    pub alpha_levels: usize,
    /// Explicit alpha grid; overrides `alpha_levels`.
    #[serde(default)]
    pub alpha_grid: Option<Vec<f64>>,
}

fn default_relative_halfwidth() -> f64 {
    0.1
}

fn default_alpha_levels() -> usize {
    11
}

impl Default for FuzzySection {
    fn default() -> Self {
        Self {
            failure_rate: REFERENCE_FAILURE_RATE,
            repair_rate: REFERENCE_REPAIR_RATE,
            repair_rate_unit: RepairRateUnit::EventsPerYear,
            relative_halfwidth: default_relative_halfwidth(),
            failure_halfwidth: None,
            repair_halfwidth: None,
            alpha_levels: default_alpha_levels(),
            alpha_grid: None,
        }
    }
}

impl FuzzySection {
    pub fn failure(&self) -> Result<TriangularFuzzyNumber, CliError> {
        let h = self
            .failure_halfwidth
            .unwrap_or(self.relative_halfwidth * self.failure_rate);
        TriangularFuzzyNumber::new(self.failure_rate, h).map_err(section("fuzzy.failure"))
    }

    /// Repair membership converted to repairs per year.
    pub fn repair(&self) -> Result<TriangularFuzzyNumber, CliError> {
        let h = self
            .repair_halfwidth
            .unwrap_or(self.relative_halfwidth * self.repair_rate);
        let raw = TriangularFuzzyNumber::new(self.repair_rate, h).map_err(section("fuzzy.repair"))?;
        self.repair_rate_unit
            .convert(&raw)
            .map_err(section("fuzzy.repair"))
    }

    pub fn grid(&self) -> Result<Vec<f64>, CliError> {
        match &self.alpha_grid {
            Some(g) => Ok(g.clone()),
            None => alpha_grid(self.alpha_levels).map_err(section("fuzzy")),
        }
    }

    /// Defuzzified (failure, repair) rates, per year.
    pub fn crisp_rates(&self) -> Result<(f64, f64), CliError> {
        use pmurel_core::Defuzzify;
        let f = self.failure()?.defuzzify().map_err(section("fuzzy"))?;
        let r = self.repair()?.defuzzify().map_err(section("fuzzy"))?;
        Ok((f, r))
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let failure = self.failure()?;
        let repair = self.repair()?;
        let grid = self.grid()?;
        pmurel_core::fuzzy_availability(&failure, &repair, &grid).map_err(section("fuzzy"))?;
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HardwareSection {
    pub lambda: f64,
    pub beta: f64,
}

impl Default for HardwareSection {
    fn default() -> Self {
        Self {
            lambda: REFERENCE_FAILURE_RATE,
            beta: 1.0,
        }
    }
}

impl HardwareSection {
    pub fn params(&self) -> Result<HardwareParams, CliError> {
        HardwareParams::new(self.lambda, self.beta).map_err(section("hardware"))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SoftwareSection {
    pub a: f64,
    pub b: f64,
    pub test_time: f64,
}

impl Default for SoftwareSection {
    fn default() -> Self {
        Self {
            a: 10.0,
            b: 0.1,
            test_time: 5.0,
        }
    }
}

impl SoftwareSection {
    pub fn params(&self) -> Result<SoftwareParams, CliError> {
        SoftwareParams::new(self.a, self.b, self.test_time).map_err(section("software"))
    }
}

/// Interaction rates: `lambda1` plus exactly one of `lambda2` or `g`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InteractionSection {
    pub lambda1: f64,
    #[serde(default)]
    pub lambda2: Option<f64>,
    #[serde(default)]
    pub g: Option<f64>,
}

impl Default for InteractionSection {
    fn default() -> Self {
        Self {
            lambda1: REFERENCE_LAMBDA1,
            lambda2: None,
            g: Some(REFERENCE_G),
        }
    }
}

impl InteractionSection {
    pub fn params(&self) -> Result<InteractionParams, CliError> {
        match (self.lambda2, self.g) {
            (Some(l2), None) => InteractionParams::new(self.lambda1, l2),
            (None, Some(g)) => InteractionParams::from_ratio(self.lambda1, g),
            (None, None) => InteractionParams::from_ratio(self.lambda1, REFERENCE_G),
            (Some(_), Some(_)) => {
                return Err(CliError::Config(
                    "[interaction] give either `lambda2` or `g`, not both".into(),
                ))
            }
        }
        .map_err(section("interaction"))
    }
}

/// A list of times or an evenly spaced range.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum TimeGrid {
    List(Vec<f64>),
    Range { start: f64, stop: f64, points: usize },
}

impl TimeGrid {
    pub fn range(start: f64, stop: f64, points: usize) -> Self {
        TimeGrid::Range {
            start,
            stop,
            points,
        }
    }

    pub fn times(&self) -> Result<Vec<f64>, CliError> {
        let times = match self {
            TimeGrid::List(v) => v.clone(),
            TimeGrid::Range {
                start,
                stop,
                points,
            } => match points {
                0 => vec![],
                1 => vec![*start],
                n => (0..*n)
                    .map(|i| start + (stop - start) * i as f64 / (n - 1) as f64)
                    .collect(),
            },
        };
        if times.is_empty() {
            return Err(CliError::Config("time grid is empty".into()));
        }
        if times.iter().any(|t| !t.is_finite() || *t < 0.0) {
            return Err(CliError::Config("time grid values must be finite and >= 0".into()));
        }
        Ok(times)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MarkovSection {
    /// Transition name (`UP->HD3`, ...) to rate. Unlisted transitions are 0.
    pub rates: BTreeMap<String, f64>,
    pub times: TimeGrid,
}

impl Default for MarkovSection {
    fn default() -> Self {
        Self {
            rates: BTreeMap::from([
                ("UP->HD3".to_string(), REFERENCE_LAMBDA1),
                ("HD3->F_INT".to_string(), REFERENCE_G * REFERENCE_LAMBDA1),
            ]),
            times: TimeGrid::range(0.0, 5000.0, 51),
        }
    }
}

impl MarkovSection {
    pub fn model(&self) -> Result<UnifiedModel, CliError> {
        build_unified_model(self.rates.iter().map(|(k, v)| (k.as_str(), *v)))
            .map_err(section("markov"))
    }

    pub fn validate(&self) -> Result<(), CliError> {
        self.model()?;
        self.times.times()?;
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulationSection {
    /// Defaults to the defuzzified failure rate.
    #[serde(default)]
    pub failure_rate: Option<f64>,
    /// Defaults to the defuzzified repair rate.
    #[serde(default)]
    pub repair_rate: Option<f64>,
    pub mission_time: f64,
    pub replications: usize,
    pub seed: u64,
    pub intervals: usize,
}

impl Default for SimulationSection {
    fn default() -> Self {
        Self {
            failure_rate: None,
            repair_rate: None,
            mission_time: 10.0,
            replications: 10_000,
            seed: 42,
            intervals: 8,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FitSection {
    pub g: f64,
    #[serde(default)]
    pub g_grid: Option<Vec<f64>>,
    /// Exposure table to read; defaults to `<output_dir>/exposure.csv`.
    #[serde(default)]
    pub exposure: Option<PathBuf>,
}

impl Default for FitSection {
    fn default() -> Self {
        Self {
            g: REFERENCE_G,
            g_grid: None,
            exposure: None,
        }
    }
}

impl FitSection {
    /// The G values to fit, in the order given.
    pub fn grid(&self) -> Vec<f64> {
        self.g_grid.clone().unwrap_or_else(|| vec![self.g])
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let grid = self.grid();
        if grid.is_empty() {
            return Err(CliError::Config("[fit] G grid is empty".into()));
        }
        if std::iter::once(self.g).chain(grid).any(|g| !(g.is_finite() && g > 0.0)) {
            return Err(CliError::Config("[fit] G values must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum InteractionModel {
    /// Two-rate hypoexponential closed form from `interaction`.
    ClosedForm,
    /// Operational probability of the Markov model from `markov`.
    Markov,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CurveSection {
    pub times: TimeGrid,
    pub interaction: InteractionModel,
}

impl Default for CurveSection {
    fn default() -> Self {
        Self {
            times: TimeGrid::range(0.0, 10.0, 101),
            interaction: InteractionModel::ClosedForm,
        }
    }
}

impl CurveSection {
    pub fn validate(&self) -> Result<(), CliError> {
        self.times.times().map(|_| ())
    }
}
