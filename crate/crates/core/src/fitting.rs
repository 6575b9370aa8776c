//! Least-squares estimation of the interaction rates from exposure data.
//!
//! The model predicts `X_i = T_i * r` with the effective rate
//! `r = 1 / (1/lambda1 + 1/lambda2)`. Only `r` is identifiable, so the ratio
//! `G = lambda2 / lambda1` is fixed by the analyst. For fixed `G` the
//! minimiser of the squared residuals has the closed form
//!
//! ```text
//! lambda1 = (1 + 1/G) * sum(X_i T_i) / sum(T_i^2),   lambda2 = G lambda1
//! ```

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{positive, Error, Result};
use crate::monte_carlo::ExposureTable;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FitResult {
    pub lambda1: f64,
    pub lambda2: f64,
    /// `lambda2 / lambda1`.
    pub g: f64,
    pub sse: f64,
}

impl FitResult {
    /// `1 / (1/lambda1 + 1/lambda2)`, the only identified quantity.
    pub fn effective_rate(&self) -> f64 {
        effective_rate(self.lambda1, self.lambda2)
    }
}

fn effective_rate(lambda1: f64, lambda2: f64) -> f64 {
    1.0 / (1.0 / lambda1 + 1.0 / lambda2)
}

/// Sum of squared residuals `sum_i (X_i - T_i / (1/lambda1 + 1/lambda2))^2`.
pub fn sse(table: &ExposureTable, lambda1: f64, lambda2: f64) -> Result<f64> {
    let lambda1 = positive("lambda1", lambda1)?;
    let lambda2 = positive("lambda2", lambda2)?;
    if table.is_empty() {
        return Err(Error::InvalidInput("exposure table is empty".into()));
    }
    let r = effective_rate(lambda1, lambda2);
    Ok(table
        .rows()
        .map(|(x, t)| {
            let e = x - t * r;
            e * e
        })
        .sum())
}

/// Closed-form least-squares `lambda1` for a fixed ratio `g`.
pub fn fit_lambda1(table: &ExposureTable, g: f64) -> Result<FitResult> {
    let g = positive("G", g)?;
    let (sxt, stt) = table
        .rows()
        .fold((0.0, 0.0), |(sxt, stt), (x, t)| (sxt + x * t, stt + t * t));
    if stt <= 0.0 {
        return Err(Error::InvalidInput(
            "all exposure times are zero; rates are not estimable".into(),
        ));
    }
    let lambda1 = (1.0 + 1.0 / g) * sxt / stt;
    if lambda1 <= 0.0 {
        return Err(Error::Undefined(
            "no failures in the exposure table; fitted rate is zero".into(),
        ));
    }
    let lambda2 = g * lambda1;
    Ok(FitResult {
        lambda1,
        lambda2,
        g,
        sse: sse(table, lambda1, lambda2)?,
    })
}

/// Fits every ratio of `g_grid`; results are sorted by `G`.
pub fn fit_scan(table: &ExposureTable, g_grid: &[f64]) -> Result<Vec<FitResult>> {
    if g_grid.is_empty() {
        return Err(Error::InvalidInput("G grid is empty".into()));
    }
    let mut results = g_grid
        .par_iter()
        .map(|&g| fit_lambda1(table, g))
        .collect::<Result<Vec<_>>>()?;
    results.sort_by(|a, b| a.g.total_cmp(&b.g));
    Ok(results)
}
