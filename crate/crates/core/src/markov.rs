//! Continuous-time Markov model of hardware/software degradation and failure.
//!
//! The unified model has an UP state, three partial hardware-degradation
//! states, a software-degradation state and three absorbing failure
//! destinations:
//!
//! ```text
//!   UP -> HD1 -> F_HW        UP -> HD3 -> F_INT
//!   UP -> HD2 -> F_HW        UP -> SD  -> F_SW
//!         HD2 -> UP                 SD  -> UP
//!         HD1 -> UP
//! ```
//!
//! Transient probabilities are computed by uniformization. Long horizons are
//! split into sub-steps so that every Poisson weight stays representable.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{finite, invalid, non_negative, Error, Result};

/// Total truncation error allowed for one transient solve.
pub const UNIFORMIZATION_TOLERANCE: f64 = 1e-10;

/// Upper bound on `q * dt` for a single uniformization step.
const MAX_STEP_QT: f64 = 50.0;

const ROW_SUM_TOLERANCE: f64 = 1e-12;
const DISTRIBUTION_TOLERANCE: f64 = 1e-9;

/// States of the unified model.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum StateId {
    Up,
    Hd1,
    Hd2,
    Hd3,
    Sd,
    /// Hardware failure reached through HD1 or HD2.
    FailHw,
    /// Hardware-software interaction failure reached through HD3.
    FailInt,
    /// Software failure reached through SD.
    FailSw,
}

impl StateId {
    pub const ALL: [StateId; 8] = [
        StateId::Up,
        StateId::Hd1,
        StateId::Hd2,
        StateId::Hd3,
        StateId::Sd,
        StateId::FailHw,
        StateId::FailInt,
        StateId::FailSw,
    ];

    /// States whose probabilities sum to the interaction reliability.
    pub const OPERATIONAL: [StateId; 4] = [StateId::Up, StateId::Hd1, StateId::Hd2, StateId::Hd3];

    /// States aggregated as total failure.
    pub const FAILURE: [StateId; 3] = [StateId::FailHw, StateId::FailInt, StateId::FailSw];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn name(self) -> &'static str {
        match self {
            StateId::Up => "UP",
            StateId::Hd1 => "HD1",
            StateId::Hd2 => "HD2",
            StateId::Hd3 => "HD3",
            StateId::Sd => "SD",
            StateId::FailHw => "F_HW",
            StateId::FailInt => "F_INT",
            StateId::FailSw => "F_SW",
        }
    }

    pub fn is_operational(self) -> bool {
        Self::OPERATIONAL.contains(&self)
    }

    pub fn is_failure(self) -> bool {
        Self::FAILURE.contains(&self)
    }
}

impl fmt::Display for StateId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for StateId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        StateId::ALL
            .into_iter()
            .find(|st| st.name().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| Error::InvalidInput(format!("unknown state `{s}`")))
    }
}

/// The transitions a unified model may carry a rate on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Transition {
    UpToHd1,
    UpToHd2,
    UpToHd3,
    UpToSd,
    Hd1ToFailHw,
    Hd2ToFailHw,
    Hd3ToFailInt,
    SdToFailSw,
    /// Degradation detected and recovered by software.
    Hd2ToUp,
    /// Restart out of software degradation.
    SdToUp,
    /// Recovery out of HD1; not part of the reference structure, defaults to 0.
    Hd1ToUp,
}

impl Transition {
    pub const ALL: [Transition; 11] = [
        Transition::UpToHd1,
        Transition::UpToHd2,
        Transition::UpToHd3,
        Transition::UpToSd,
        Transition::Hd1ToFailHw,
        Transition::Hd2ToFailHw,
        Transition::Hd3ToFailInt,
        Transition::SdToFailSw,
        Transition::Hd2ToUp,
        Transition::SdToUp,
        Transition::Hd1ToUp,
    ];

    pub fn endpoints(self) -> (StateId, StateId) {
        use StateId::*;
        match self {
            Transition::UpToHd1 => (Up, Hd1),
            Transition::UpToHd2 => (Up, Hd2),
            Transition::UpToHd3 => (Up, Hd3),
            Transition::UpToSd => (Up, Sd),
            Transition::Hd1ToFailHw => (Hd1, FailHw),
            Transition::Hd2ToFailHw => (Hd2, FailHw),
            Transition::Hd3ToFailInt => (Hd3, FailInt),
            Transition::SdToFailSw => (Sd, FailSw),
            Transition::Hd2ToUp => (Hd2, Up),
            Transition::SdToUp => (Sd, Up),
            Transition::Hd1ToUp => (Hd1, Up),
        }
    }

    /// True for transitions that return to UP.
    pub fn is_recovery(self) -> bool {
        self.endpoints().1 == StateId::Up
    }

    /// Canonical name, e.g. `UP->HD3`.
    pub fn name(self) -> String {
        let (from, to) = self.endpoints();
        format!("{from}->{to}")
    }
}

impl fmt::Display for Transition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}

impl FromStr for Transition {
    type Err = Error;

    /// Accepts `FROM->TO` (case-insensitive, `→` also allowed).
    fn from_str(s: &str) -> Result<Self> {
        let normalized = s.replace('→', "->");
        let unknown = || Error::UnknownTransition(s.to_string());
        let (from, to) = normalized.split_once("->").ok_or_else(unknown)?;
        let from: StateId = from.parse().map_err(|_| unknown())?;
        let to: StateId = to.parse().map_err(|_| unknown())?;
        Transition::ALL
            .into_iter()
            .find(|t| t.endpoints() == (from, to))
            .ok_or_else(unknown)
    }
}

/// Square CTMC generator: nonnegative off-diagonal rates, zero row sums.
#[derive(Debug, Clone, PartialEq)]
pub struct GeneratorMatrix {
    dim: usize,
    // row-major
    entries: Vec<f64>,
}

impl GeneratorMatrix {
    /// The generator with no transitions.
    pub fn zero(dim: usize) -> Self {
        Self {
            dim,
            entries: vec![0.0; dim * dim],
        }
    }

    /// Builds a generator from `(from, to, rate)` triples; repeated pairs add.
    /// Diagonals are filled with the negative row sums.
    pub fn from_rates(dim: usize, rates: impl IntoIterator<Item = (usize, usize, f64)>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidInput("generator dimension must be positive".into()));
        }
        let mut g = Self::zero(dim);
        for (i, j, rate) in rates {
            if i >= dim || j >= dim {
                return Err(Error::InvalidInput(format!(
                    "transition {i}->{j} outside a {dim}-state generator"
                )));
            }
            if i == j {
                return Err(Error::InvalidInput(format!("self-loop on state {i}")));
            }
            let rate = non_negative("rate", rate)?;
            g.entries[i * dim + j] += rate;
        }
        for i in 0..dim {
            let exit: f64 = (0..dim).filter(|&j| j != i).map(|j| g.get(i, j)).sum();
            g.entries[i * dim + i] = -exit;
        }
        Ok(g)
    }

    /// Validates a full matrix given as rows.
    pub fn from_rows(rows: Vec<Vec<f64>>) -> Result<Self> {
        let dim = rows.len();
        if dim == 0 || rows.iter().any(|r| r.len() != dim) {
            return Err(Error::InvalidInput("generator must be a nonempty square matrix".into()));
        }
        let entries: Vec<f64> = rows.into_iter().flatten().collect();
        let g = Self { dim, entries };
        g.validate()?;
        Ok(g)
    }

    pub fn validate(&self) -> Result<()> {
        for i in 0..self.dim {
            let mut sum = 0.0;
            let mut scale: f64 = 1.0;
            for j in 0..self.dim {
                let v = finite("generator entry", self.get(i, j))?;
                if i != j && v < 0.0 {
                    return Err(invalid(
                        "generator entry",
                        format!("off-diagonal ({i},{j}) is negative: {v}"),
                    ));
                }
                sum += v;
                scale = scale.max(v.abs());
            }
            if sum.abs() > ROW_SUM_TOLERANCE * scale {
                return Err(invalid("generator", format!("row {i} sums to {sum}, not 0")));
            }
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[i * self.dim + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.entries[i * self.dim..(i + 1) * self.dim]
    }

    /// Largest total exit rate, the natural uniformization rate.
    pub fn max_exit_rate(&self) -> f64 {
        (0..self.dim).map(|i| -self.get(i, i)).fold(0.0, f64::max)
    }

    pub fn is_absorbing(&self, i: usize) -> bool {
        self.get(i, i) == 0.0
    }

    /// Row-vector product `p * G`.
    fn left_mul(&self, p: &[f64], out: &mut [f64]) {
        out.iter_mut().for_each(|o| *o = 0.0);
        for (i, &pi) in p.iter().enumerate() {
            if pi == 0.0 {
                continue;
            }
            for (o, &g) in out.iter_mut().zip(self.row(i)) {
                *o += pi * g;
            }
        }
    }
}

/// Probability vector over the states of a chain.
#[derive(Debug, Clone, PartialEq)]
pub struct StateDistribution(Vec<f64>);

impl StateDistribution {
    pub fn new(probabilities: Vec<f64>) -> Result<Self> {
        if probabilities.is_empty() {
            return Err(Error::InvalidInput("empty distribution".into()));
        }
        for &p in &probabilities {
            let p = finite("probability", p)?;
            if !(0.0..=1.0).contains(&p) {
                return Err(invalid("probability", format!("{p} outside [0, 1]")));
            }
        }
        let total: f64 = probabilities.iter().sum();
        if (total - 1.0).abs() > DISTRIBUTION_TOLERANCE {
            return Err(invalid("distribution", format!("sums to {total}, not 1")));
        }
        Ok(Self(probabilities))
    }

    pub fn point_mass(dim: usize, state: usize) -> Result<Self> {
        if state >= dim {
            return Err(Error::InvalidInput(format!("state {state} outside {dim} states")));
        }
        let mut p = vec![0.0; dim];
        p[state] = 1.0;
        Ok(Self(p))
    }

    pub fn probabilities(&self) -> &[f64] {
        &self.0
    }

    pub fn get(&self, i: usize) -> f64 {
        self.0[i]
    }

    pub fn of(&self, state: StateId) -> f64 {
        self.0[state.index()]
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn total(&self) -> f64 {
        self.0.iter().sum()
    }

    /// Sum of the operational states of the unified model.
    pub fn operational(&self) -> f64 {
        StateId::OPERATIONAL.iter().map(|&s| self.of(s)).sum()
    }

    /// Aggregate total-failure probability of the unified model.
    pub fn total_failure(&self) -> f64 {
        StateId::FAILURE.iter().map(|&s| self.of(s)).sum()
    }
}

/// Poisson-weighted sum for one step of length `dt` with `q * dt <= MAX_STEP_QT`.
fn uniformized_step(g: &GeneratorMatrix, q: f64, p: &[f64], dt: f64, tol: f64) -> Vec<f64> {
    let qt = q * dt;
    let n = p.len();
    let mut term = p.to_vec();
    let mut next = vec![0.0; n];
    let mut weight = (-qt).exp();
    let mut cumulative = weight;
    let mut acc: Vec<f64> = term.iter().map(|&x| weight * x).collect();
    // Poisson mass is essentially exhausted well before this.
    let max_terms = (qt + 20.0 * qt.sqrt() + 200.0) as usize;
    let mut k = 0usize;
    while 1.0 - cumulative > tol && k < max_terms {
        k += 1;
        // term <- term * (I + G / q)
        g.left_mul(&term, &mut next);
        for (t, &d) in term.iter_mut().zip(&next) {
            *t += d / q;
            if *t < 0.0 {
                *t = 0.0;
            }
        }
        weight *= qt / k as f64;
        cumulative += weight;
        for (a, &t) in acc.iter_mut().zip(&term) {
            *a += weight * t;
        }
    }
    acc
}

/// Transient distribution `initial * exp(G t)` by uniformization.
pub fn transient_distribution(
    g: &GeneratorMatrix,
    initial: &StateDistribution,
    t: f64,
) -> Result<StateDistribution> {
    let t = non_negative("t", t)?;
    g.validate()?;
    if initial.len() != g.dim() {
        return Err(Error::InvalidInput(format!(
            "distribution has {} states, generator has {}",
            initial.len(),
            g.dim()
        )));
    }
    let q = g.max_exit_rate();
    if t == 0.0 || q == 0.0 {
        return Ok(initial.clone());
    }
    let steps = (q * t / MAX_STEP_QT).ceil().max(1.0) as usize;
    let dt = t / steps as f64;
    let tol = UNIFORMIZATION_TOLERANCE / steps as f64;
    let mut p = initial.0.clone();
    for _ in 0..steps {
        p = uniformized_step(g, q, &p, dt, tol);
    }
    Ok(StateDistribution(p))
}

/// Solves at every time of `times`; results are in the order of `times`.
pub fn transient_grid(
    g: &GeneratorMatrix,
    initial: &StateDistribution,
    times: &[f64],
) -> Result<Vec<StateDistribution>> {
    times
        .par_iter()
        .map(|&t| transient_distribution(g, initial, t))
        .collect()
}

/// Transient distribution via the matrix exponential, computed by scaling
/// and squaring of a truncated Taylor series.
///
/// Slower than [`transient_distribution`] for sparse chains but shares no
/// code with it, which makes it a useful cross-check.
pub fn transient_distribution_expm(
    g: &GeneratorMatrix,
    initial: &StateDistribution,
    t: f64,
) -> Result<StateDistribution> {
    let t = non_negative("t", t)?;
    g.validate()?;
    let n = g.dim();
    if initial.len() != n {
        return Err(Error::InvalidInput("dimension mismatch".into()));
    }
    let a: Vec<f64> = g.entries.iter().map(|&x| x * t).collect();
    let norm = (0..n)
        .map(|i| (0..n).map(|j| a[i * n + j].abs()).sum::<f64>())
        .fold(0.0, f64::max);
    let mut squarings = 0u32;
    let mut scale = 1.0;
    while norm * scale > 0.5 {
        scale *= 0.5;
        squarings += 1;
    }
    let a: Vec<f64> = a.iter().map(|&x| x * scale).collect();
    let mut result = identity(n);
    let mut term = identity(n);
    for k in 1..=30 {
        term = matmul(&term, &a, n);
        let inv = 1.0 / k as f64;
        term.iter_mut().for_each(|x| *x *= inv);
        result.iter_mut().zip(&term).for_each(|(r, &x)| *r += x);
        if term.iter().all(|x| x.abs() < 1e-18) {
            break;
        }
    }
    for _ in 0..squarings {
        result = matmul(&result, &result, n);
    }
    let p0 = initial.probabilities();
    let p = (0..n)
        .map(|j| (0..n).map(|i| p0[i] * result[i * n + j]).sum::<f64>().max(0.0))
        .collect();
    Ok(StateDistribution(p))
}

fn identity(n: usize) -> Vec<f64> {
    let mut m = vec![0.0; n * n];
    (0..n).for_each(|i| m[i * n + i] = 1.0);
    m
}

fn matmul(a: &[f64], b: &[f64], n: usize) -> Vec<f64> {
    let mut c = vec![0.0; n * n];
    for i in 0..n {
        for k in 0..n {
            let aik = a[i * n + k];
            if aik == 0.0 {
                continue;
            }
            for j in 0..n {
                c[i * n + j] += aik * b[k * n + j];
            }
        }
    }
    c
}

/// The unified hardware-software model with its configured rates.
#[derive(Debug, Clone, PartialEq)]
pub struct UnifiedModel {
    rates: Vec<(Transition, f64)>,
    generator: GeneratorMatrix,
}

impl UnifiedModel {
    pub fn from_transitions(rates: impl IntoIterator<Item = (Transition, f64)>) -> Result<Self> {
        let mut table = [0.0; Transition::ALL.len()];
        for (tr, rate) in rates {
            let idx = Transition::ALL.iter().position(|&x| x == tr).expect("listed");
            table[idx] = non_negative("rate", rate)?;
        }
        let rates: Vec<(Transition, f64)> = Transition::ALL.into_iter().zip(table).collect();
        let generator = GeneratorMatrix::from_rates(
            StateId::ALL.len(),
            rates.iter().map(|&(tr, r)| {
                let (from, to) = tr.endpoints();
                (from.index(), to.index(), r)
            }),
        )?;
        Ok(Self { rates, generator })
    }

    /// The two-rate chain UP -> HD3 -> F_INT with every other rate zero.
    pub fn reduced(lambda1: f64, lambda2: f64) -> Result<Self> {
        Self::from_transitions([
            (Transition::UpToHd3, lambda1),
            (Transition::Hd3ToFailInt, lambda2),
        ])
    }

    pub fn generator(&self) -> &GeneratorMatrix {
        &self.generator
    }

    pub fn rate(&self, transition: Transition) -> f64 {
        self.rates
            .iter()
            .find(|(t, _)| *t == transition)
            .map(|&(_, r)| r)
            .unwrap_or(0.0)
    }

    /// All transitions with their rates (zeros included), in canonical order.
    pub fn rates(&self) -> &[(Transition, f64)] {
        &self.rates
    }

    pub fn has_recovery(&self) -> bool {
        self.rates.iter().any(|&(t, r)| t.is_recovery() && r > 0.0)
    }

    pub fn initial() -> StateDistribution {
        StateDistribution::point_mass(StateId::ALL.len(), StateId::Up.index())
            .expect("UP is a valid state")
    }

    /// Transient distribution starting from UP.
    pub fn distribution_at(&self, t: f64) -> Result<StateDistribution> {
        transient_distribution(&self.generator, &Self::initial(), t)
    }

    /// Probability of still being in an operational state at `t`.
    pub fn interaction_reliability(&self, t: f64) -> Result<f64> {
        Ok(self.distribution_at(t)?.operational().clamp(0.0, 1.0))
    }
}

/// Builds the unified model from a map of transition names to rates.
///
/// Names use the `FROM->TO` form (see [`Transition::name`]); unlisted
/// transitions default to 0 and unknown names are rejected.
pub fn build_unified_model<I, K>(rates: I) -> Result<UnifiedModel>
where
    I: IntoIterator<Item = (K, f64)>,
    K: AsRef<str>,
{
    let parsed = rates
        .into_iter()
        .map(|(name, rate)| Ok((name.as_ref().parse::<Transition>()?, rate)))
        .collect::<Result<Vec<_>>>()?;
    let mut seen = std::collections::BTreeSet::new();
    for (t, _) in &parsed {
        if !seen.insert(*t) {
            return Err(Error::InvalidInput(format!("transition {t} given twice")));
        }
    }
    UnifiedModel::from_transitions(parsed)
}

/// Sum of the operational-state probabilities at `t`, starting from UP.
pub fn interaction_reliability_markov(model: &UnifiedModel, t: f64) -> Result<f64> {
    model.interaction_reliability(t)
}
