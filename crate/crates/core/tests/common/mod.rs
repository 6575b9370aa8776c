//! Independent reference computations shared by the integration suites.
//!
//! Nothing here calls into the routine it is used to check.
#![allow(dead_code)]

use pmurel_core::markov::GeneratorMatrix;
use pmurel_core::ExposureTable;
use rand::Rng;

/// Steady-state availability of a two-state failure/repair model.
pub fn two_state_availability(lambda: f64, mu: f64) -> f64 {
    mu / (lambda + mu)
}

/// Hypoexponential survival in its textbook form.
pub fn hypoexponential_survival(l1: f64, l2: f64, t: f64) -> f64 {
    (l2 * (-l1 * t).exp() - l1 * (-l2 * t).exp()) / (l2 - l1)
}

/// Expected renewals of the failure/repair cycle: `TM / (1/lambda + 1/mu)`.
pub fn renewal_failures(lambda: f64, mu: f64, mission: f64) -> f64 {
    mission / (1.0 / lambda + 1.0 / mu)
}

/// Golden-section minimisation of a unimodal `f` on `[a, b]`.
pub fn golden_section_min(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64) -> f64 {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..400 {
        if (b - a).abs() <= 1e-15 * b.abs() {
            break;
        }
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    0.5 * (a + b)
}

/// Brute-force least-squares `lambda1` for fixed `g`, minimising the
/// squared residuals directly without the normal equations.
pub fn brute_force_lambda1(table: &ExposureTable, g: f64) -> f64 {
    let objective = |l1: f64| {
        let r = 1.0 / (1.0 / l1 + 1.0 / (g * l1));
        table
            .rows()
            .map(|(x, t)| (x - t * r).powi(2))
            .sum::<f64>()
    };
    let max_ratio = table
        .rows()
        .filter(|&(_, t)| t > 0.0)
        .map(|(x, t)| x / t)
        .fold(0.0, f64::max);
    let upper = 2.0 * (1.0 + 1.0 / g) * max_ratio;
    golden_section_min(objective, 0.0, upper)
}

/// Min and max of `mu / (lambda + mu)` over an `n x n` grid of the box.
pub fn availability_grid_range(l: (f64, f64), m: (f64, f64), n: usize) -> (f64, f64) {
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for i in 0..n {
        let lambda = l.0 + (l.1 - l.0) * i as f64 / (n - 1) as f64;
        for j in 0..n {
            let mu = m.0 + (m.1 - m.0) * j as f64 / (n - 1) as f64;
            let a = mu / (lambda + mu);
            lo = lo.min(a);
            hi = hi.max(a);
        }
    }
    (lo, hi)
}

/// A random generator on 2..=10 states with roughly half the edges present.
pub fn random_generator<R: Rng>(rng: &mut R) -> GeneratorMatrix {
    let dim = rng.random_range(2..=10);
    let mut rates = Vec::new();
    for i in 0..dim {
        for j in 0..dim {
            if i != j && rng.random_bool(0.5) {
                rates.push((i, j, rng.random_range(0.0..5.0)));
            }
        }
    }
    GeneratorMatrix::from_rates(dim, rates).unwrap()
}

/// A random exposure table: counts near `rate * T_i` with some noise.
pub fn random_table<R: Rng>(rng: &mut R, noise: f64) -> ExposureTable {
    let n = rng.random_range(3..=12);
    let rate = 10f64.powf(rng.random_range(-4.0..0.0));
    let times: Vec<f64> = (0..n).map(|_| rng.random_range(100.0..10_000.0)).collect();
    let counts = times
        .iter()
        .map(|t| (t * rate * (1.0 + noise * rng.random_range(-1.0..1.0))).max(0.0))
        .collect();
    ExposureTable::new(counts, times).unwrap()
}

pub fn is_nonincreasing(values: &[f64]) -> bool {
    values.windows(2).all(|w| w[1] <= w[0])
}
