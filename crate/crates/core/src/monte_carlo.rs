//! Sequential Monte Carlo simulation of failure/repair cycles.
//!
//! Each replication alternates exponential times to failure and to repair
//! until the mission clock runs out. Replication `i` draws from its own
//! random stream: a ChaCha8 generator keyed by `master_seed` with stream id
//! `i`. Replications therefore never share a source, and the result does not
//! depend on scheduling. Per-replication results are reduced in index order,
//! so floating-point sums are identical for serial and parallel runs.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{invalid, non_negative, positive, Error, Result};

/// Parameters of a simulation run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SimulationConfig {
    /// Failures per unit time while up.
    pub failure_rate: f64,
    /// Repairs per unit time while down.
    pub repair_rate: f64,
    pub mission_time: f64,
    pub n_replications: usize,
    pub master_seed: u64,
    /// Number of equal-width exposure intervals over the mission.
    pub n_intervals: usize,
}

impl SimulationConfig {
    /// Crisp reference rates, a 10-year mission, 10 000 replications and
    /// 8 exposure intervals.
    pub fn reference(master_seed: u64) -> Self {
        Self {
            failure_rate: crate::REFERENCE_FAILURE_RATE,
            repair_rate: crate::REFERENCE_REPAIR_RATE,
            mission_time: 10.0,
            n_replications: 10_000,
            master_seed,
            n_intervals: 8,
        }
    }

    pub fn validate(&self) -> Result<()> {
        positive("failure_rate", self.failure_rate)?;
        positive("repair_rate", self.repair_rate)?;
        positive("mission_time", self.mission_time)?;
        if self.n_replications == 0 {
            return Err(invalid("n_replications", "must be at least 1"));
        }
        if self.n_intervals == 0 {
            return Err(invalid("n_intervals", "must be at least 1"));
        }
        Ok(())
    }

    pub fn interval_width(&self) -> f64 {
        self.mission_time / self.n_intervals as f64
    }

    fn interval_bound(&self, i: usize) -> f64 {
        if i >= self.n_intervals {
            self.mission_time
        } else {
            i as f64 * self.mission_time / self.n_intervals as f64
        }
    }
}

/// Inverse-transform exponential variate for a uniform `u` in `(0, 1]`.
pub fn exponential_from_uniform(rate: f64, u: f64) -> f64 {
    -u.ln() / rate
}

/// Draws an exponential time with the given rate.
pub fn sample_exponential<R: Rng + ?Sized>(rate: f64, rng: &mut R) -> Result<f64> {
    let rate = positive("rate", rate)?;
    // random() is in [0, 1); flip it to (0, 1] so ln never sees 0.
    let u = 1.0 - rng.random::<f64>();
    Ok(exponential_from_uniform(rate, u))
}

/// The random stream owned by replication `index`.
pub fn replication_rng(master_seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
    rng.set_stream(index);
    rng
}

/// One up period followed by (possibly) a repair, clipped to the mission.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Cycle {
    /// Mission clock at the start of the up period.
    pub start: f64,
    /// Up time in this cycle (the time to failure, or what remained of the mission).
    pub time_to_failure: f64,
    /// Down time in this cycle, clipped at mission end; 0 if no failure.
    pub time_to_repair: f64,
    /// Whether the up period ended in a failure before mission end.
    pub failed: bool,
}

impl Cycle {
    pub fn failure_time(&self) -> Option<f64> {
        self.failed.then_some(self.start + self.time_to_failure)
    }
}

/// History of a single simulated mission.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReplicationTrace {
    pub cycles: Vec<Cycle>,
    pub failures: usize,
    pub up_time: f64,
    pub down_time: f64,
}

impl ReplicationTrace {
    pub fn failure_times(&self) -> impl Iterator<Item = f64> + '_ {
        self.cycles.iter().filter_map(Cycle::failure_time)
    }

    /// `(start, end)` of every up period.
    pub fn up_periods(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.cycles
            .iter()
            .map(|c| (c.start, c.start + c.time_to_failure))
    }

    pub fn availability(&self) -> f64 {
        let total = self.up_time + self.down_time;
        if total > 0.0 {
            self.up_time / total
        } else {
            1.0
        }
    }
}

fn simulate_mission<R: Rng + ?Sized>(cfg: &SimulationConfig, rng: &mut R) -> ReplicationTrace {
    let tm = cfg.mission_time;
    let mut clock = 0.0;
    let mut trace = ReplicationTrace {
        cycles: Vec::new(),
        failures: 0,
        up_time: 0.0,
        down_time: 0.0,
    };
    while clock < tm {
        let start = clock;
        let ttf = exponential_from_uniform(cfg.failure_rate, 1.0 - rng.random::<f64>());
        if clock + ttf >= tm {
            let up = tm - clock;
            trace.up_time += up;
            trace.cycles.push(Cycle {
                start,
                time_to_failure: up,
                time_to_repair: 0.0,
                failed: false,
            });
            break;
        }
        clock += ttf;
        trace.up_time += ttf;
        trace.failures += 1;
        let ttr = exponential_from_uniform(cfg.repair_rate, 1.0 - rng.random::<f64>());
        let down = ttr.min(tm - clock);
        trace.down_time += down;
        clock += ttr;
        trace.cycles.push(Cycle {
            start,
            time_to_failure: ttf,
            time_to_repair: down,
            failed: true,
        });
    }
    trace
}

/// Simulates replication `replication_index` of `cfg`.
pub fn run_replication(cfg: &SimulationConfig, replication_index: u64) -> Result<ReplicationTrace> {
    cfg.validate()?;
    let mut rng = replication_rng(cfg.master_seed, replication_index);
    Ok(simulate_mission(cfg, &mut rng))
}

/// Aggregate failure counts and up-time per mission interval.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExposureTable {
    exposure_numbers: Vec<f64>,
    exposure_times: Vec<f64>,
}

impl ExposureTable {
    /// `numbers[i]` failures observed over `times[i]` time at risk.
    pub fn new(numbers: Vec<f64>, times: Vec<f64>) -> Result<Self> {
        if numbers.is_empty() {
            return Err(Error::InvalidInput("exposure table is empty".into()));
        }
        if numbers.len() != times.len() {
            return Err(Error::InvalidInput(format!(
                "{} exposure numbers but {} exposure times",
                numbers.len(),
                times.len()
            )));
        }
        for &x in &numbers {
            non_negative("X_i", x)?;
        }
        for &t in &times {
            non_negative("T_i", t)?;
        }
        Ok(Self {
            exposure_numbers: numbers,
            exposure_times: times,
        })
    }

    pub fn len(&self) -> usize {
        self.exposure_numbers.len()
    }

    pub fn is_empty(&self) -> bool {
        self.exposure_numbers.is_empty()
    }

    pub fn exposure_numbers(&self) -> &[f64] {
        &self.exposure_numbers
    }

    pub fn exposure_times(&self) -> &[f64] {
        &self.exposure_times
    }

    /// `(X_i, T_i)` pairs in interval order.
    pub fn rows(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.exposure_numbers
            .iter()
            .copied()
            .zip(self.exposure_times.iter().copied())
    }

    pub fn total_failures(&self) -> f64 {
        self.exposure_numbers.iter().sum()
    }

    pub fn total_time(&self) -> f64 {
        self.exposure_times.iter().sum()
    }
}

/// Interval index of a failure at time `t`.
///
/// Intervals are `[0, w]`, `(w, 2w]`, ..., so a failure exactly on a
/// boundary is credited to the earlier interval.
fn failure_bucket(t: f64, width: f64, n: usize) -> usize {
    let k = (t / width).ceil() as usize;
    k.saturating_sub(1).min(n - 1)
}

/// Accumulates one trace into per-interval counts and up-times.
fn bucket_trace(trace: &ReplicationTrace, cfg: &SimulationConfig, x: &mut [f64], t: &mut [f64]) {
    let n = cfg.n_intervals;
    let width = cfg.interval_width();
    for ft in trace.failure_times() {
        x[failure_bucket(ft, width, n)] += 1.0;
    }
    for (s, e) in trace.up_periods() {
        if e <= s {
            continue;
        }
        let first = ((s / width).floor() as usize).min(n - 1);
        for (i, ti) in t.iter_mut().enumerate().skip(first) {
            let lo = cfg.interval_bound(i);
            if lo >= e {
                break;
            }
            let hi = cfg.interval_bound(i + 1);
            let overlap = e.min(hi) - s.max(lo);
            if overlap > 0.0 {
                *ti += overlap;
            }
        }
    }
}

/// Buckets the failures and up-time of `traces` into `cfg.n_intervals`
/// equal intervals over the mission.
pub fn build_exposure_table(traces: &[ReplicationTrace], cfg: &SimulationConfig) -> Result<ExposureTable> {
    cfg.validate()?;
    if traces.is_empty() {
        return Err(Error::InvalidInput("no replication traces".into()));
    }
    let mut x = vec![0.0; cfg.n_intervals];
    let mut t = vec![0.0; cfg.n_intervals];
    for trace in traces {
        bucket_trace(trace, cfg, &mut x, &mut t);
    }
    ExposureTable::new(x, t)
}

/// Reliability indices estimated from a simulation run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimulationSummary {
    pub replications: usize,
    pub total_failures: u64,
    pub mean_failures: f64,
    pub failures_std_error: f64,
    /// Total up-time over total simulated mission time.
    pub availability: f64,
    pub availability_std_error: f64,
    pub exposure: ExposureTable,
}

/// How replications are scheduled. Results are identical either way.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Execution {
    Serial,
    #[default]
    Parallel,
}

struct ReplicationStats {
    failures: usize,
    up_time: f64,
    x: Vec<f64>,
    t: Vec<f64>,
}

fn replicate(cfg: &SimulationConfig, index: usize) -> ReplicationStats {
    let mut rng = replication_rng(cfg.master_seed, index as u64);
    let trace = simulate_mission(cfg, &mut rng);
    let mut x = vec![0.0; cfg.n_intervals];
    let mut t = vec![0.0; cfg.n_intervals];
    bucket_trace(&trace, cfg, &mut x, &mut t);
    ReplicationStats {
        failures: trace.failures,
        up_time: trace.up_time,
        x,
        t,
    }
}

fn mean_and_std_error(values: impl Iterator<Item = f64> + Clone, n: usize) -> (f64, f64) {
    let nf = n as f64;
    let mean = values.clone().sum::<f64>() / nf;
    if n < 2 {
        return (mean, 0.0);
    }
    let ss: f64 = values.map(|v| (v - mean) * (v - mean)).sum();
    (mean, (ss / (nf - 1.0)).sqrt() / nf.sqrt())
}

/// Runs every replication of `cfg` in parallel.
pub fn run_simulation(cfg: &SimulationConfig) -> Result<SimulationSummary> {
    run_simulation_with(cfg, Execution::Parallel)
}

pub fn run_simulation_with(cfg: &SimulationConfig, execution: Execution) -> Result<SimulationSummary> {
    cfg.validate()?;
    let n = cfg.n_replications;
    let stats: Vec<ReplicationStats> = match execution {
        Execution::Serial => (0..n).map(|i| replicate(cfg, i)).collect(),
        Execution::Parallel => (0..n).into_par_iter().map(|i| replicate(cfg, i)).collect(),
    };

    let mut x = vec![0.0; cfg.n_intervals];
    let mut t = vec![0.0; cfg.n_intervals];
    let mut total_failures = 0u64;
    let mut total_up = 0.0;
    for s in &stats {
        total_failures += s.failures as u64;
        total_up += s.up_time;
        x.iter_mut().zip(&s.x).for_each(|(a, b)| *a += b);
        t.iter_mut().zip(&s.t).for_each(|(a, b)| *a += b);
    }

    let (mean_failures, failures_std_error) =
        mean_and_std_error(stats.iter().map(|s| s.failures as f64), n);
    let (_, availability_std_error) =
        mean_and_std_error(stats.iter().map(|s| s.up_time / cfg.mission_time), n);

    Ok(SimulationSummary {
        replications: n,
        total_failures,
        mean_failures,
        failures_std_error,
        availability: total_up / (n as f64 * cfg.mission_time),
        availability_std_error,
        exposure: ExposureTable::new(x, t)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small(seed: u64) -> SimulationConfig {
        SimulationConfig {
            n_replications: 200,
            ..SimulationConfig::reference(seed)
        }
    }

    #[test]
    fn inverse_transform_identity() {
        let rate = 0.6566;
        let x = exponential_from_uniform(rate, (-1.0f64).exp());
        assert!((x - 1.0 / rate).abs() < 1e-15);
        assert_eq!(exponential_from_uniform(2.0, 1.0), 0.0);
    }

    #[test]
    fn sampler_rejects_bad_rates() {
        let mut rng = replication_rng(1, 0);
        assert!(sample_exponential(0.0, &mut rng).is_err());
        assert!(sample_exponential(-1.0, &mut rng).is_err());
        assert!(sample_exponential(f64::NAN, &mut rng).is_err());
    }

    #[test]
    fn sampler_is_deterministic() {
        let draw = |seed| {
            let mut rng = replication_rng(seed, 3);
            (0..16)
                .map(|_| sample_exponential(0.6566, &mut rng).unwrap())
                .collect::<Vec<_>>()
        };
        assert_eq!(draw(9), draw(9));
        assert_ne!(draw(9), draw(10));
        assert!(draw(9).iter().all(|&x| x > 0.0));
    }

    #[test]
    fn streams_differ_by_index() {
        let mut a = replication_rng(42, 0);
        let mut b = replication_rng(42, 1);
        assert_ne!(a.random::<u64>(), b.random::<u64>());
    }

    #[test]
    fn config_validation() {
        let ok = SimulationConfig::reference(1);
        assert!(ok.validate().is_ok());
        for bad in [
            SimulationConfig { failure_rate: 0.0, ..ok },
            SimulationConfig { repair_rate: -1.0, ..ok },
            SimulationConfig { mission_time: 0.0, ..ok },
            SimulationConfig { n_replications: 0, ..ok },
            SimulationConfig { n_intervals: 0, ..ok },
        ] {
            assert!(bad.validate().is_err());
            assert!(run_replication(&bad, 0).is_err());
        }
    }

    #[test]
    fn short_mission_survives() {
        let cfg = SimulationConfig {
            failure_rate: 1e-9,
            mission_time: 1.0,
            ..SimulationConfig::reference(5)
        };
        let tr = run_replication(&cfg, 0).unwrap();
        assert_eq!(tr.failures, 0);
        assert_eq!(tr.up_time, 1.0);
        assert_eq!(tr.down_time, 0.0);
        assert_eq!(tr.cycles.len(), 1);
    }

    #[test]
    fn instant_repair_gives_full_availability() {
        let cfg = SimulationConfig {
            repair_rate: 1e9,
            ..SimulationConfig::reference(5)
        };
        for i in 0..20 {
            let tr = run_replication(&cfg, i).unwrap();
            assert!(tr.availability() > 1.0 - 1e-6);
        }
    }

    #[test]
    fn trace_bookkeeping() {
        let cfg = SimulationConfig::reference(77);
        for i in 0..50 {
            let tr = run_replication(&cfg, i).unwrap();
            assert!((tr.up_time + tr.down_time - cfg.mission_time).abs() < 1e-9);
            assert_eq!(tr.failure_times().count(), tr.failures);
            assert!(tr.failure_times().all(|t| t < cfg.mission_time));
            assert!(tr.cycles.iter().all(|c| c.time_to_failure > 0.0));
        }
    }

    #[test]
    fn hand_built_trace_bucketing() {
        let cfg = SimulationConfig {
            n_replications: 1,
            ..SimulationConfig::reference(0)
        };
        let trace = ReplicationTrace {
            cycles: vec![
                Cycle { start: 0.0, time_to_failure: 2.5, time_to_repair: 0.5, failed: true },
                Cycle { start: 3.0, time_to_failure: 7.0, time_to_repair: 0.0, failed: false },
            ],
            failures: 1,
            up_time: 9.5,
            down_time: 0.5,
        };
        let table = build_exposure_table(&[trace], &cfg).unwrap();
        assert_eq!(table.exposure_numbers(), &[0.0, 1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0]);
        // [0,1.25] [1.25,2.5] fully up, (2.5,3] down, rest up
        let expected_t = [1.25, 1.25, 0.75, 1.25, 1.25, 1.25, 1.25, 1.25];
        for (got, want) in table.exposure_times().iter().zip(expected_t) {
            assert!((got - want).abs() < 1e-12);
        }
        assert!((table.total_time() - 9.5).abs() < 1e-12);
    }

    #[test]
    fn boundary_failures_go_left() {
        assert_eq!(failure_bucket(0.0, 1.25, 8), 0);
        assert_eq!(failure_bucket(1.25, 1.25, 8), 0);
        assert_eq!(failure_bucket(1.2500001, 1.25, 8), 1);
        assert_eq!(failure_bucket(10.0, 1.25, 8), 7);
    }

    #[test]
    fn no_failures_means_full_exposure() {
        let cfg = SimulationConfig {
            failure_rate: 1e-12,
            n_replications: 30,
            ..SimulationConfig::reference(3)
        };
        let s = run_simulation(&cfg).unwrap();
        assert_eq!(s.total_failures, 0);
        assert!(s.exposure.exposure_numbers().iter().all(|&x| x == 0.0));
        assert!((s.exposure.total_time() - 300.0).abs() < 1e-9);
        assert_eq!(s.availability, 1.0);
    }

    #[test]
    fn empty_trace_list_rejected() {
        assert!(build_exposure_table(&[], &SimulationConfig::reference(0)).is_err());
    }

    #[test]
    fn single_replication_summary() {
        let cfg = SimulationConfig {
            n_replications: 1,
            ..SimulationConfig::reference(11)
        };
        let tr = run_replication(&cfg, 0).unwrap();
        let s = run_simulation(&cfg).unwrap();
        assert_eq!(s.total_failures, tr.failures as u64);
        assert_eq!(s.mean_failures, tr.failures as f64);
        assert_eq!(s.availability, tr.up_time / cfg.mission_time);
        assert_eq!(s.failures_std_error, 0.0);
        assert_eq!(s.exposure, build_exposure_table(&[tr], &cfg).unwrap());
    }

    #[test]
    fn partition_identities() {
        let cfg = small(21);
        let traces: Vec<_> = (0..cfg.n_replications as u64)
            .map(|i| run_replication(&cfg, i).unwrap())
            .collect();
        let table = build_exposure_table(&traces, &cfg).unwrap();
        let failures: usize = traces.iter().map(|t| t.failures).sum();
        let up: f64 = traces.iter().map(|t| t.up_time).sum();
        assert_eq!(table.total_failures(), failures as f64);
        assert!((table.total_time() - up).abs() < 1e-9);
        let s = run_simulation(&cfg).unwrap();
        assert_eq!(s.total_failures, failures as u64);
    }

    #[test]
    fn serial_equals_parallel() {
        let cfg = small(8);
        assert_eq!(
            run_simulation_with(&cfg, Execution::Serial).unwrap(),
            run_simulation_with(&cfg, Execution::Parallel).unwrap()
        );
    }

    #[test]
    fn exposure_table_validation() {
        assert!(ExposureTable::new(vec![], vec![]).is_err());
        assert!(ExposureTable::new(vec![1.0], vec![1.0, 2.0]).is_err());
        assert!(ExposureTable::new(vec![-1.0], vec![1.0]).is_err());
        assert!(ExposureTable::new(vec![1.0], vec![f64::NAN]).is_err());
    }
}
