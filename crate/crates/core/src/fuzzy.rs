//! Type-1 fuzzy reliability parameters.
//!
//! Failure and repair rates are symmetric triangular fuzzy numbers. Each is
//! sliced into alpha-cuts, and the cuts are pushed through the two-state
//! availability `A = mu / (lambda + mu)` with exact endpoint formulas: `A` is
//! increasing in `mu` and decreasing in `lambda`, so the image of an
//! alpha-cut box is attained at two of its corners.

use serde::{Deserialize, Serialize};

use crate::error::{finite, invalid, non_negative, Error, Result};

/// Hours in a (non-leap) year, used when repair is quoted as hours per repair.
pub const HOURS_PER_YEAR: f64 = 8760.0;

/// Symmetric triangular membership function over a nonnegative rate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TriangularFuzzyNumber {
    center: f64,
    halfwidth: f64,
}

impl TriangularFuzzyNumber {
    pub fn new(center: f64, halfwidth: f64) -> Result<Self> {
        let center = non_negative("center", center)?;
        let halfwidth = non_negative("halfwidth", halfwidth)?;
        if center - halfwidth < 0.0 {
            return Err(invalid(
                "halfwidth",
                format!("support would go negative: center {center} - halfwidth {halfwidth} < 0"),
            ));
        }
        Ok(Self { center, halfwidth })
    }

    /// A fuzzy number whose half-width is `fraction * center`.
    pub fn with_relative_spread(center: f64, fraction: f64) -> Result<Self> {
        let fraction = non_negative("fraction", fraction)?;
        if fraction > 1.0 {
            return Err(invalid("fraction", format!("must be <= 1, got {fraction}")));
        }
        Self::new(center, center * fraction)
    }

    /// Degenerate fuzzy number with zero spread.
    pub fn crisp(value: f64) -> Result<Self> {
        Self::new(value, 0.0)
    }

    pub fn center(&self) -> f64 {
        self.center
    }

    pub fn halfwidth(&self) -> f64 {
        self.halfwidth
    }

    pub fn membership(&self, x: f64) -> f64 {
        let d = (x - self.center).abs();
        if self.halfwidth == 0.0 {
            return if d == 0.0 { 1.0 } else { 0.0 };
        }
        (1.0 - d / self.halfwidth).max(0.0)
    }

    /// The crisp interval `{x : membership(x) >= alpha}`.
    pub fn alpha_cut(&self, alpha: f64) -> Result<AlphaCutInterval> {
        let alpha = check_alpha(alpha)?;
        let spread = (1.0 - alpha) * self.halfwidth;
        Ok(AlphaCutInterval {
            alpha,
            lo: self.center - spread,
            hi: self.center + spread,
        })
    }
}

fn check_alpha(alpha: f64) -> Result<f64> {
    let alpha = finite("alpha", alpha)?;
    if !(0.0..=1.0).contains(&alpha) {
        return Err(invalid("alpha", format!("must lie in [0, 1], got {alpha}")));
    }
    Ok(alpha)
}

/// Free-function form of [`TriangularFuzzyNumber::alpha_cut`].
pub fn alpha_cut(f: &TriangularFuzzyNumber, alpha: f64) -> Result<AlphaCutInterval> {
    f.alpha_cut(alpha)
}

/// Closed interval of a fuzzy quantity at membership level `alpha`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AlphaCutInterval {
    pub alpha: f64,
    pub lo: f64,
    pub hi: f64,
}

impl AlphaCutInterval {
    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn midpoint(&self) -> f64 {
        0.5 * (self.lo + self.hi)
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }

    pub fn is_subset_of(&self, other: &AlphaCutInterval) -> bool {
        other.lo <= self.lo && self.hi <= other.hi
    }
}

/// What a [`FuzzyIndex`] describes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Quantity {
    Availability,
    Unavailability,
    FailureRate,
    RepairRate,
}

impl Quantity {
    pub fn as_str(&self) -> &'static str {
        match self {
            Quantity::Availability => "availability",
            Quantity::Unavailability => "unavailability",
            Quantity::FailureRate => "failure_rate",
            Quantity::RepairRate => "repair_rate",
        }
    }
}

/// A fuzzy output sampled at a fixed grid of alpha levels (ascending).
#[derive(Debug, Clone, PartialEq)]
pub struct FuzzyIndex {
    quantity: Quantity,
    cuts: Vec<AlphaCutInterval>,
}

impl FuzzyIndex {
    pub fn quantity(&self) -> Quantity {
        self.quantity
    }

    pub fn cuts(&self) -> &[AlphaCutInterval] {
        &self.cuts
    }

    pub fn len(&self) -> usize {
        self.cuts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cuts.is_empty()
    }

    /// The interval at the highest alpha level in the grid.
    pub fn core(&self) -> Option<&AlphaCutInterval> {
        self.cuts.last()
    }

    /// True when every cut is contained in all cuts at lower alpha.
    pub fn is_nested(&self) -> bool {
        self.cuts.windows(2).all(|w| w[1].is_subset_of(&w[0]))
    }
}

/// `levels` equally spaced alpha values from 0 to 1 inclusive.
///
/// A single level yields `[1.0]`.
pub fn alpha_grid(levels: usize) -> Result<Vec<f64>> {
    match levels {
        0 => Err(Error::InvalidInput("alpha grid needs at least one level".into())),
        1 => Ok(vec![1.0]),
        n => {
            let last = (n - 1) as f64;
            Ok((0..n).map(|i| i as f64 / last).collect())
        }
    }
}

/// The default grid: alpha = 0.0, 0.1, ..., 1.0.
pub fn default_alpha_grid() -> Vec<f64> {
    alpha_grid(11).expect("11 levels is a valid grid")
}

fn check_grid(grid: &[f64]) -> Result<()> {
    if grid.is_empty() {
        return Err(Error::InvalidInput("alpha grid is empty".into()));
    }
    for &a in grid {
        check_alpha(a)?;
    }
    if grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidInput(
            "alpha grid must be strictly increasing".into(),
        ));
    }
    Ok(())
}

/// Samples a single fuzzy number on `grid`, e.g. the failure-rate band.
pub fn fuzzy_band(
    f: &TriangularFuzzyNumber,
    grid: &[f64],
    quantity: Quantity,
) -> Result<FuzzyIndex> {
    check_grid(grid)?;
    let cuts = grid
        .iter()
        .map(|&a| f.alpha_cut(a))
        .collect::<Result<Vec<_>>>()?;
    Ok(FuzzyIndex { quantity, cuts })
}

/// Exact image of `mu / (lambda + mu)` over the box `[l_lo, l_hi] x [m_lo, m_hi]`.
fn availability_image(l: &AlphaCutInterval, m: &AlphaCutInterval) -> Result<(f64, f64)> {
    if l.hi == 0.0 && m.hi == 0.0 {
        return Err(Error::Undefined(
            "availability with zero failure and zero repair rate".into(),
        ));
    }
    // Only mu = 0 is undefined when lambda vanishes; elsewhere A = 1.
    if l.hi == 0.0 {
        return Ok((1.0, 1.0));
    }
    if m.hi == 0.0 {
        return Ok((0.0, 0.0));
    }
    let lo = m.lo / (m.lo + l.hi);
    let hi = m.hi / (m.hi + l.lo);
    Ok((lo, hi))
}

/// Alpha-cut band of the steady-state availability of a two-state
/// failure/repair model.
pub fn fuzzy_availability(
    failure: &TriangularFuzzyNumber,
    repair: &TriangularFuzzyNumber,
    grid: &[f64],
) -> Result<FuzzyIndex> {
    check_grid(grid)?;
    let cuts = grid
        .iter()
        .map(|&alpha| {
            let (lo, hi) = availability_image(&failure.alpha_cut(alpha)?, &repair.alpha_cut(alpha)?)?;
            Ok(AlphaCutInterval { alpha, lo, hi })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(FuzzyIndex {
        quantity: Quantity::Availability,
        cuts,
    })
}

/// Complement of [`fuzzy_availability`]: `[1 - A_hi, 1 - A_lo]` at every level.
pub fn fuzzy_unavailability(
    failure: &TriangularFuzzyNumber,
    repair: &TriangularFuzzyNumber,
    grid: &[f64],
) -> Result<FuzzyIndex> {
    let availability = fuzzy_availability(failure, repair, grid)?;
    let cuts = availability
        .cuts
        .iter()
        .map(|c| AlphaCutInterval {
            alpha: c.alpha,
            lo: 1.0 - c.hi,
            hi: 1.0 - c.lo,
        })
        .collect();
    Ok(FuzzyIndex {
        quantity: Quantity::Unavailability,
        cuts,
    })
}

/// Maps a fuzzy quantity to a single crisp value by its centroid.
pub trait Defuzzify {
    fn defuzzify(&self) -> Result<f64>;
}

impl Defuzzify for TriangularFuzzyNumber {
    /// The centroid of a symmetric triangle is its center.
    fn defuzzify(&self) -> Result<f64> {
        Ok(self.center)
    }
}

impl Defuzzify for FuzzyIndex {
    /// Centroid reconstructed from horizontal slices.
    ///
    /// With `w(a)` the width and `c(a)` the midpoint of the cut at level `a`,
    /// the centroid of the membership function is `int w c da / int w da`.
    /// Both integrals use the trapezoid rule over the grid. When every cut
    /// has zero width (a crisp quantity) the midpoint of the top cut is
    /// returned.
    fn defuzzify(&self) -> Result<f64> {
        let top = self
            .core()
            .ok_or_else(|| Error::InvalidInput("cannot defuzzify an empty alpha grid".into()))?;
        let mut area = 0.0;
        let mut moment = 0.0;
        for w in self.cuts.windows(2) {
            let da = w[1].alpha - w[0].alpha;
            area += 0.5 * da * (w[0].width() + w[1].width());
            moment += 0.5 * da * (w[0].width() * w[0].midpoint() + w[1].width() * w[1].midpoint());
        }
        if area > 0.0 {
            Ok(moment / area)
        } else {
            Ok(top.midpoint())
        }
    }
}

/// Free-function form of [`Defuzzify::defuzzify`].
pub fn defuzzify<F: Defuzzify + ?Sized>(f: &F) -> Result<f64> {
    f.defuzzify()
}

/// How the configured repair figure is to be read.
///
/// The same number can be quoted as a repair rate in events per year or as
/// a mean repair duration in hours; there is no safe default inside the
/// library, so callers must choose.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RepairRateUnit {
    /// The value is already a rate in repairs per year.
    EventsPerYear,
    /// The value is a mean repair time in hours; rate = 8760 / value.
    HoursPerRepair,
}

impl RepairRateUnit {
    /// Converts a configured repair figure into repairs per year.
    pub fn to_rate_per_year(self, value: f64) -> Result<f64> {
        match self {
            RepairRateUnit::EventsPerYear => non_negative("repair", value),
            RepairRateUnit::HoursPerRepair => {
                let hours = crate::error::positive("repair", value)?;
                Ok(HOURS_PER_YEAR / hours)
            }
        }
    }

    /// Converts a fuzzy repair figure into a fuzzy rate per year.
    ///
    /// The center is converted exactly. The reciprocal map is not linear, so
    /// the relative spread is carried over to keep the result symmetric.
    pub fn convert(self, f: &TriangularFuzzyNumber) -> Result<TriangularFuzzyNumber> {
        match self {
            RepairRateUnit::EventsPerYear => Ok(*f),
            RepairRateUnit::HoursPerRepair => {
                let center = self.to_rate_per_year(f.center())?;
                TriangularFuzzyNumber::new(center, center * f.halfwidth() / f.center())
            }
        }
    }
}
