//! One function per subcommand. Each writes its CSV files into `out` and
//! returns the headline numbers for reporting.

use std::fs;
use std::path::Path;

use pmurel_core::fuzzy::fuzzy_band;
use pmurel_core::markov::{transient_grid, StateId, UnifiedModel};
use pmurel_core::models::curve_point;
use pmurel_core::{
    defuzzify, fit_scan, fuzzy_availability, fuzzy_unavailability, run_simulation, ExposureTable,
    FitResult, FuzzyIndex, InteractionParams, InteractionSource, Quantity, SimulationSummary,
};

use crate::config::{InteractionModel, RunConfig};
use crate::error::CliError;
use crate::output::{format_g17, output_path, CsvTable};

pub const BAND_HEADER: [&str; 3] = ["alpha", "lo", "hi"];
pub const CRISP_HEADER: [&str; 2] = ["quantity", "value"];
pub const CURVE_HEADER: [&str; 5] = ["t", "R_hw", "R_sw", "R_int", "R_pmu"];
pub const MARKOV_HEADER: [&str; 10] = [
    "t", "Q_UP", "Q_HD1", "Q_HD2", "Q_HD3", "Q_SD", "Q_F_HW", "Q_F_INT", "Q_F_SW", "R_interaction",
];
pub const SUMMARY_HEADER: [&str; 5] = [
    "availability",
    "mean_failures",
    "availability_std_error",
    "mean_failures_std_error",
    "replications",
];
pub const EXPOSURE_HEADER: [&str; 3] = ["interval", "X_i", "T_i"];
pub const FIT_HEADER: [&str; 4] = ["G", "lambda1", "lambda2", "sse"];

fn write_band(index: &FuzzyIndex, out: &Path) -> Result<(), CliError> {
    let mut table = CsvTable::new(&BAND_HEADER);
    for c in index.cuts() {
        table.push_numbers(&[c.alpha, c.lo, c.hi]);
    }
    table.write(&output_path(out, &format!("{}.csv", index.quantity().as_str()))?)
}

#[derive(Debug, Clone)]
pub struct FuzzyOutcome {
    pub failure_rate: f64,
    pub repair_rate: f64,
    pub availability: f64,
    pub availability_band: FuzzyIndex,
}

/// Writes the four alpha-cut bands and `crisp.csv`.
pub fn cmd_fuzzy(cfg: &RunConfig, out: &Path) -> Result<FuzzyOutcome, CliError> {
    let stage = CliError::runtime("fuzzy");
    let failure = cfg.fuzzy.failure()?;
    let repair = cfg.fuzzy.repair()?;
    let grid = cfg.fuzzy.grid()?;

    let availability = fuzzy_availability(&failure, &repair, &grid).map_err(&stage)?;
    let unavailability = fuzzy_unavailability(&failure, &repair, &grid).map_err(&stage)?;
    let failure_band = fuzzy_band(&failure, &grid, Quantity::FailureRate).map_err(&stage)?;
    let repair_band = fuzzy_band(&repair, &grid, Quantity::RepairRate).map_err(&stage)?;
    for band in [&availability, &unavailability, &failure_band, &repair_band] {
        write_band(band, out)?;
    }

    let outcome = FuzzyOutcome {
        failure_rate: defuzzify(&failure).map_err(&stage)?,
        repair_rate: defuzzify(&repair).map_err(&stage)?,
        availability: defuzzify(&availability).map_err(&stage)?,
        availability_band: availability,
    };
    let mut crisp = CsvTable::new(&CRISP_HEADER);
    for (name, value) in [
        ("failure_rate", outcome.failure_rate),
        ("repair_rate", outcome.repair_rate),
        ("availability", outcome.availability),
        ("unavailability", defuzzify(&unavailability).map_err(&stage)?),
    ] {
        crisp.push(vec![name.to_string(), format_g17(value)]);
    }
    crisp.write(&output_path(out, "crisp.csv")?)?;
    Ok(outcome)
}

fn interaction_source(cfg: &RunConfig) -> Result<InteractionSource, CliError> {
    Ok(match cfg.curve.interaction {
        InteractionModel::ClosedForm => InteractionSource::ClosedForm(cfg.interaction.params()?),
        InteractionModel::Markov => InteractionSource::Markov(cfg.markov.model()?),
    })
}

/// Writes `curve.csv` using the configured interaction source.
pub fn cmd_curve(cfg: &RunConfig, out: &Path) -> Result<Vec<[f64; 5]>, CliError> {
    let inter = interaction_source(cfg)?;
    write_curve(cfg, out, &inter)
}

fn write_curve(
    cfg: &RunConfig,
    out: &Path,
    inter: &InteractionSource,
) -> Result<Vec<[f64; 5]>, CliError> {
    let hw = cfg.hardware.params()?;
    let sw = cfg.software.params()?;
    let times = cfg.curve.times.times()?;
    let rows = times
        .iter()
        .map(|&t| {
            let p = curve_point(&hw, &sw, inter, t).map_err(CliError::runtime("curve"))?;
            Ok([p.t, p.hardware, p.software, p.interaction, p.composite])
        })
        .collect::<Result<Vec<_>, CliError>>()?;
    let mut table = CsvTable::new(&CURVE_HEADER);
    rows.iter().for_each(|r| table.push_numbers(r));
    table.write(&output_path(out, "curve.csv")?)?;
    Ok(rows)
}

/// Writes `markov.csv`: state probabilities and interaction reliability.
pub fn cmd_markov(cfg: &RunConfig, out: &Path) -> Result<usize, CliError> {
    let model = cfg.markov.model()?;
    let times = cfg.markov.times.times()?;
    let dists = transient_grid(model.generator(), &UnifiedModel::initial(), &times)
        .map_err(CliError::runtime("markov"))?;
    let mut table = CsvTable::new(&MARKOV_HEADER);
    for (t, d) in times.iter().zip(&dists) {
        let mut row = vec![*t];
        row.extend(StateId::ALL.iter().map(|&s| d.of(s)));
        row.push(d.operational().clamp(0.0, 1.0));
        table.push_numbers(&row);
    }
    table.write(&output_path(out, "markov.csv")?)?;
    Ok(table.len())
}

/// Runs the Monte Carlo simulation; writes `summary.csv` and `exposure.csv`.
pub fn cmd_simulate(cfg: &RunConfig, out: &Path) -> Result<SimulationSummary, CliError> {
    let sim = cfg.simulation_config()?;
    let summary = run_simulation(&sim).map_err(CliError::runtime("simulate"))?;

    let mut table = CsvTable::new(&SUMMARY_HEADER);
    table.push_numbers(&[
        summary.availability,
        summary.mean_failures,
        summary.availability_std_error,
        summary.failures_std_error,
        summary.replications as f64,
    ]);
    table.write(&output_path(out, "summary.csv")?)?;
    write_exposure(&summary.exposure, &output_path(out, "exposure.csv")?)?;
    Ok(summary)
}

pub fn write_exposure(table: &ExposureTable, path: &Path) -> Result<(), CliError> {
    let mut csv = CsvTable::new(&EXPOSURE_HEADER);
    for (i, (x, t)) in table.rows().enumerate() {
        csv.push(vec![(i + 1).to_string(), format_g17(x), format_g17(t)]);
    }
    csv.write(path)
}

/// Reads an `interval,X_i,T_i` file. Rows are taken in file order.
pub fn read_exposure(path: &Path) -> Result<ExposureTable, CliError> {
    let file = fs::File::open(path).map_err(|e| CliError::io(path, e))?;
    let mut reader = csv::Reader::from_reader(file);
    let header = reader.headers().map_err(|e| CliError::io(path, e))?.clone();
    let expected: Vec<&str> = EXPOSURE_HEADER.to_vec();
    if header.iter().map(str::trim).collect::<Vec<_>>() != expected {
        return Err(CliError::Config(format!(
            "{}: expected header `{}`, found `{}`",
            path.display(),
            expected.join(","),
            header.iter().collect::<Vec<_>>().join(",")
        )));
    }
    let mut numbers = Vec::new();
    let mut times = Vec::new();
    for (line, record) in reader.records().enumerate() {
        let record = record.map_err(|e| CliError::io(path, e))?;
        let field = |i: usize| -> Result<f64, CliError> {
            record[i].trim().parse::<f64>().map_err(|e| {
                CliError::Config(format!(
                    "{}: row {}: column {}: {e}",
                    path.display(),
                    line + 1,
                    EXPOSURE_HEADER[i]
                ))
            })
        };
        numbers.push(field(1)?);
        times.push(field(2)?);
    }
    ExposureTable::new(numbers, times)
        .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
}

/// Fits the interaction rates for every configured G; writes `fit.csv`.
pub fn cmd_fit(cfg: &RunConfig, out: &Path, exposure: &Path) -> Result<Vec<FitResult>, CliError> {
    let table = read_exposure(exposure)?;
    fit_table(cfg, out, &table)
}

fn fit_table(cfg: &RunConfig, out: &Path, table: &ExposureTable) -> Result<Vec<FitResult>, CliError> {
    let fits = fit_scan(table, &cfg.fit.grid()).map_err(CliError::runtime("fit"))?;
    let mut csv = CsvTable::new(&FIT_HEADER);
    for f in &fits {
        csv.push_numbers(&[f.g, f.lambda1, f.lambda2, f.sse]);
    }
    csv.write(&output_path(out, "fit.csv")?)?;
    Ok(fits)
}

/// Runs fuzzy -> simulate -> fit -> curve -> markov and writes `report.txt`.
///
/// The simulation uses the defuzzified rates unless `simulation` overrides
/// them; the curve uses the interaction rates fitted at `fit.g`.
pub fn cmd_pipeline(cfg: &RunConfig, out: &Path) -> Result<String, CliError> {
    let mut report = String::new();
    let line = |r: &mut String, s: String| {
        r.push_str(&s);
        r.push('\n');
    };
    let sim_cfg = cfg.simulation_config()?;
    line(&mut report, "pmurel pipeline report".into());
    line(
        &mut report,
        format!("schema {}, seed {}", cfg.schema, sim_cfg.master_seed),
    );

    let fuzzy = cmd_fuzzy(cfg, out)?;
    let widest = fuzzy.availability_band.cuts()[0];
    line(&mut report, String::new());
    line(&mut report, "[fuzzy] availability A = mu / (lambda + mu) over alpha-cuts".into());
    line(&mut report, format!("  alpha levels             {}", fuzzy.availability_band.len()));
    line(&mut report, format!("  failure rate (crisp)     {:.6} per year", fuzzy.failure_rate));
    line(
        &mut report,
        format!(
            "  repair rate (crisp)      {:.6} per year (input read as {})",
            fuzzy.repair_rate,
            serde_json::to_value(cfg.fuzzy.repair_rate_unit)
                .ok()
                .and_then(|v| v.as_str().map(str::to_owned))
                .unwrap_or_default()
        ),
    );
    line(
        &mut report,
        format!(
            "  availability at alpha={}  [{:.6}, {:.6}]",
            widest.alpha, widest.lo, widest.hi
        ),
    );
    line(&mut report, format!("  availability (centroid)  {:.6}", fuzzy.availability));

    let summary = cmd_simulate(cfg, out)?;
    let oracle = sim_cfg.repair_rate / (sim_cfg.failure_rate + sim_cfg.repair_rate);
    let renewal = sim_cfg.mission_time / (1.0 / sim_cfg.failure_rate + 1.0 / sim_cfg.repair_rate);
    line(&mut report, String::new());
    line(&mut report, "[simulate] alternating exponential failure/repair cycles".into());
    line(
        &mut report,
        format!(
            "  replications {}, mission time {}, {} exposure intervals",
            summary.replications, sim_cfg.mission_time, sim_cfg.n_intervals
        ),
    );
    line(
        &mut report,
        format!(
            "  availability             {:.6} +/- {:.6} (mu/(lambda+mu) = {oracle:.6})",
            summary.availability, summary.availability_std_error
        ),
    );
    line(
        &mut report,
        format!(
            "  mean failures            {:.4} +/- {:.4} (TM/(1/lambda+1/mu) = {renewal:.4})",
            summary.mean_failures, summary.failures_std_error
        ),
    );

    let fits = fit_table(cfg, out, &summary.exposure)?;
    let headline = match fits.iter().find(|f| f.g == cfg.fit.g) {
        Some(f) => *f,
        None => pmurel_core::fit_lambda1(&summary.exposure, cfg.fit.g)
            .map_err(CliError::runtime("fit"))?,
    };
    line(&mut report, String::new());
    line(
        &mut report,
        "[fit] lambda1 = (1 + 1/G) sum(X_i T_i) / sum(T_i^2), lambda2 = G lambda1".into(),
    );
    for f in &fits {
        line(
            &mut report,
            format!(
                "  G={}  lambda1={:.6e}  lambda2={:.6e}  sse={:.6e}",
                f.g, f.lambda1, f.lambda2, f.sse
            ),
        );
    }
    line(
        &mut report,
        format!("  effective rate 1/(1/lambda1+1/lambda2) = {:.6e}", headline.effective_rate()),
    );

    let fitted = InteractionParams::new(headline.lambda1, headline.lambda2)
        .map_err(CliError::runtime("curve"))?;
    let rows = write_curve(cfg, out, &InteractionSource::ClosedForm(fitted))?;
    let last = rows.last().expect("time grid is nonempty");
    line(&mut report, String::new());
    line(&mut report, "[curve] R_pmu(t) = R_hw(t) R_sw(t) R_int(t), R_int from the fit at G".into());
    line(
        &mut report,
        format!(
            "  t={}: R_hw={:.6} R_sw={:.6} R_int={:.6} R_pmu={:.6}",
            last[0], last[1], last[2], last[3], last[4]
        ),
    );

    let n = cmd_markov(cfg, out)?;
    line(&mut report, String::new());
    line(&mut report, "[markov] R_int(t) = Q_UP + Q_HD1 + Q_HD2 + Q_HD3 (uniformization)".into());
    line(&mut report, format!("  {n} time points written to markov.csv"));

    let path = output_path(out, "report.txt")?;
    fs::write(&path, &report).map_err(|e| CliError::io(&path, e))?;
    Ok(report)
}
