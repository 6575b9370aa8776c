//! Closed-form component reliability curves.
//!
//! All rates and times share one caller-chosen unit; nothing here converts
//! units.

use serde::Serialize;

use crate::error::{non_negative, positive, Result};
use crate::markov::UnifiedModel;

/// Relative gap below which the two interaction rates are treated as equal.
pub const EQUAL_RATE_THRESHOLD: f64 = 1e-9;

/// Weibull hardware parameters: `R(t) = exp(-lambda * t^beta)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HardwareParams {
    lambda: f64,
    beta: f64,
}

impl HardwareParams {
    pub fn new(lambda: f64, beta: f64) -> Result<Self> {
        Ok(Self {
            lambda: non_negative("lambda", lambda)?,
            beta: positive("beta", beta)?,
        })
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }
}

/// Goel-Okumoto NHPP software parameters.
///
/// `a` is the expected total number of faults, `b` the per-fault detection
/// rate, and `test_time` the testing/startup time already accumulated.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SoftwareParams {
    a: f64,
    b: f64,
    test_time: f64,
}

impl SoftwareParams {
    pub fn new(a: f64, b: f64, test_time: f64) -> Result<Self> {
        Ok(Self {
            a: non_negative("a", a)?,
            b: non_negative("b", b)?,
            test_time: non_negative("T", test_time)?,
        })
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn test_time(&self) -> f64 {
        self.test_time
    }
}

/// Rates of the two-stage interaction path UP -> HD3 -> failure.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct InteractionParams {
    lambda1: f64,
    lambda2: f64,
}

impl InteractionParams {
    pub fn new(lambda1: f64, lambda2: f64) -> Result<Self> {
        Ok(Self {
            lambda1: positive("lambda1", lambda1)?,
            lambda2: positive("lambda2", lambda2)?,
        })
    }

    /// `lambda2 = g * lambda1`.
    pub fn from_ratio(lambda1: f64, g: f64) -> Result<Self> {
        let g = positive("G", g)?;
        Self::new(lambda1, g * lambda1)
    }

    pub fn lambda1(&self) -> f64 {
        self.lambda1
    }

    pub fn lambda2(&self) -> f64 {
        self.lambda2
    }

    pub fn ratio(&self) -> f64 {
        self.lambda2 / self.lambda1
    }
}

pub fn weibull_reliability(p: &HardwareParams, t: f64) -> Result<f64> {
    let t = non_negative("t", t)?;
    Ok((-p.lambda * t.powf(p.beta)).exp())
}

/// Expected number of faults detected by time `t`: `a (1 - e^{-b t})`.
pub fn nhpp_mean_value(p: &SoftwareParams, t: f64) -> Result<f64> {
    let t = non_negative("t", t)?;
    Ok(p.a * -(-p.b * t).exp_m1())
}

/// Probability of no software failure in `(T, T + t]`.
///
/// `exp(-[m(t + T) - m(T)])`; the increment is evaluated as
/// `a e^{-bT} (1 - e^{-bt})` so it is exactly zero at `t = 0`.
pub fn software_reliability(p: &SoftwareParams, t: f64) -> Result<f64> {
    let t = non_negative("t", t)?;
    let increment = p.a * (-p.b * p.test_time).exp() * -(-p.b * t).exp_m1();
    Ok((-increment).exp())
}

/// Survival function of the hypoexponential sum `Exp(lambda1) + Exp(lambda2)`.
///
/// Algebraically `(l2 e^{-l1 t} - l1 e^{-l2 t}) / (l2 - l1)`. It is symmetric
/// in the two rates and is evaluated as `e^{-lo t} (1 + lo (1 - e^{-d t}) / d)`
/// with `lo = min`, `d = |l2 - l1|`, which has no cancellation and no
/// overflow. Nearly equal rates use the Erlang limit `(1 + l t) e^{-l t}`.
pub fn interaction_reliability_closed_form(p: &InteractionParams, t: f64) -> Result<f64> {
    let t = non_negative("t", t)?;
    let (lo, hi) = if p.lambda1 <= p.lambda2 {
        (p.lambda1, p.lambda2)
    } else {
        (p.lambda2, p.lambda1)
    };
    let d = hi - lo;
    if d / p.lambda1 < EQUAL_RATE_THRESHOLD {
        return Ok(erlang2_survival(p.lambda1, t));
    }
    let r = (-lo * t).exp() * (1.0 + lo * -(-d * t).exp_m1() / d);
    Ok(r.min(1.0))
}

/// `(1 + l t) e^{-l t}`, survival of a two-stage Erlang.
pub fn erlang2_survival(lambda: f64, t: f64) -> f64 {
    (1.0 + lambda * t) * (-lambda * t).exp()
}

/// Where the interaction factor of the composite reliability comes from.
#[derive(Debug, Clone, PartialEq)]
pub enum InteractionSource {
    /// Two-rate hypoexponential closed form.
    ClosedForm(InteractionParams),
    /// Operational-state probability of the full Markov model.
    Markov(UnifiedModel),
}

impl InteractionSource {
    pub fn reliability(&self, t: f64) -> Result<f64> {
        match self {
            InteractionSource::ClosedForm(p) => interaction_reliability_closed_form(p, t),
            InteractionSource::Markov(m) => m.interaction_reliability(t),
        }
    }
}

/// The three factors of the composite reliability at one time.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CurvePoint {
    pub t: f64,
    pub hardware: f64,
    pub software: f64,
    pub interaction: f64,
    pub composite: f64,
}

pub fn curve_point(
    hw: &HardwareParams,
    sw: &SoftwareParams,
    inter: &InteractionSource,
    t: f64,
) -> Result<CurvePoint> {
    let hardware = weibull_reliability(hw, t)?;
    let software = software_reliability(sw, t)?;
    let interaction = inter.reliability(t)?;
    Ok(CurvePoint {
        t,
        hardware,
        software,
        interaction,
        composite: hardware * software * interaction,
    })
}

/// `R_hw(t) * R_sw(t) * R_int(t)`.
pub fn composite_pmu_reliability(
    hw: &HardwareParams,
    sw: &SoftwareParams,
    inter: &InteractionSource,
    t: f64,
) -> Result<f64> {
    Ok(curve_point(hw, sw, inter, t)?.composite)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn weibull_examples() {
        let hw = HardwareParams::new(0.6566, 1.0).unwrap();
        assert_eq!(weibull_reliability(&hw, 0.0).unwrap(), 1.0);
        // e^{-0.6566}
        assert!((weibull_reliability(&hw, 1.0).unwrap() - 0.518_611_619_818_285).abs() < 1e-14);
        let hw2 = HardwareParams::new(0.6566, 2.0).unwrap();
        let r1 = weibull_reliability(&hw2, 1.0).unwrap();
        let r2 = weibull_reliability(&hw2, 2.0).unwrap();
        assert!((r2 - r1.powi(4)).abs() < 1e-15);
        assert!(weibull_reliability(&hw, -1.0).is_err());
        assert!(weibull_reliability(&hw, f64::NAN).is_err());
        assert!(HardwareParams::new(1.0, 0.0).is_err());
        assert!(HardwareParams::new(-1.0, 1.0).is_err());
    }

    #[test]
    fn nhpp_examples() {
        let p = SoftwareParams::new(100.0, 0.01, 0.0).unwrap();
        assert_eq!(nhpp_mean_value(&p, 0.0).unwrap(), 0.0);
        let p = SoftwareParams::new(10.0, 0.1, 0.0).unwrap();
        assert!((nhpp_mean_value(&p, 1000.0).unwrap() - 10.0).abs() < 1e-9);
        assert!((nhpp_mean_value(&p, 5.0).unwrap() - 3.934_693_402_873_666).abs() < 1e-13);
        assert!(nhpp_mean_value(&p, -1.0).is_err());
    }

    #[test]
    fn software_reliability_examples() {
        let p = SoftwareParams::new(10.0, 0.1, 5.0).unwrap();
        assert_eq!(software_reliability(&p, 0.0).unwrap(), 1.0);
        // exp(-(m(15) - m(5))) = exp(-3.834004995642036)
        assert!((software_reliability(&p, 10.0).unwrap() - 0.021_622_842_592_665_16).abs() < 1e-15);
        let late = SoftwareParams::new(10.0, 0.1, 1e4).unwrap();
        assert!((software_reliability(&late, 10.0).unwrap() - 1.0).abs() < 1e-12);
        assert!(software_reliability(&p, -0.5).is_err());
    }

    #[test]
    fn software_reliability_zero_test_time() {
        let p = SoftwareParams::new(7.0, 0.3, 0.0).unwrap();
        for t in [0.0, 0.5, 3.0, 40.0] {
            let m = nhpp_mean_value(&p, t).unwrap();
            assert_eq!(software_reliability(&p, t).unwrap(), (-m).exp());
        }
    }

    #[test]
    fn more_testing_means_higher_reliability() {
        let r = |tt: f64| software_reliability(&SoftwareParams::new(10.0, 0.1, tt).unwrap(), 10.0).unwrap();
        assert!(r(0.0) < r(5.0) && r(5.0) < r(20.0));
    }

    #[test]
    fn interaction_examples() {
        let p = InteractionParams::new(8.92e-4, 3.92e-3).unwrap();
        assert_eq!(interaction_reliability_closed_form(&p, 0.0).unwrap(), 1.0);
        let r100 = interaction_reliability_closed_form(&p, 100.0).unwrap();
        assert!((r100 - 0.985_055_948_331_705).abs() < 1e-14);
        let eq = InteractionParams::new(1e-3, 1e-3).unwrap();
        let r = interaction_reliability_closed_form(&eq, 1000.0).unwrap();
        assert!((r - 2.0 * (-1.0f64).exp()).abs() < 1e-15);
        assert!(InteractionParams::new(0.0, 1.0).is_err());
        assert!(InteractionParams::new(1.0, -1.0).is_err());
    }

    #[test]
    fn interaction_matches_printed_formula() {
        let (l1, l2) = (8.92e-4, 3.92e-3);
        let p = InteractionParams::new(l1, l2).unwrap();
        for t in [1.0, 10.0, 500.0, 5000.0] {
            let printed = (l2 * (-l1 * t).exp() - l1 * (-l2 * t).exp()) / (l2 - l1);
            let r = interaction_reliability_closed_form(&p, t).unwrap();
            assert!((r - printed).abs() < 1e-14, "t={t}");
        }
    }

    #[test]
    fn interaction_is_symmetric() {
        let a = InteractionParams::new(0.3, 0.05).unwrap();
        let b = InteractionParams::new(0.05, 0.3).unwrap();
        for t in [0.0, 1.0, 10.0, 100.0] {
            assert_eq!(
                interaction_reliability_closed_form(&a, t).unwrap(),
                interaction_reliability_closed_form(&b, t).unwrap()
            );
        }
    }

    #[test]
    fn continuity_near_equal_rates() {
        let l1 = 1e-3;
        let p = InteractionParams::new(l1, l1 * (1.0 + 1e-6)).unwrap();
        for t in [10.0, 100.0, 1000.0, 5000.0] {
            let generic = interaction_reliability_closed_form(&p, t).unwrap();
            assert!((generic - erlang2_survival(l1, t)).abs() < 1e-6);
        }
    }

    #[test]
    fn ratio_constructor() {
        let p = InteractionParams::from_ratio(8.92e-4, 2.0).unwrap();
        assert_eq!(p.lambda2(), 2.0 * 8.92e-4);
        assert_eq!(p.ratio(), 2.0);
        assert!(InteractionParams::from_ratio(1.0, 0.0).is_err());
    }

    #[test]
    fn composite_degenerate_cases() {
        let hw = HardwareParams::new(0.6566, 1.0).unwrap();
        let sw = SoftwareParams::new(0.0, 0.1, 5.0).unwrap();
        let inter = InteractionSource::Markov(UnifiedModel::from_transitions([]).unwrap());
        for t in [0.0, 0.3, 2.0, 9.0] {
            assert_eq!(
                composite_pmu_reliability(&hw, &sw, &inter, t).unwrap(),
                weibull_reliability(&hw, t).unwrap()
            );
        }
        let sw = SoftwareParams::new(10.0, 0.1, 5.0).unwrap();
        assert_eq!(composite_pmu_reliability(&hw, &sw, &inter, 0.0).unwrap(), 1.0);
    }

    #[test]
    fn composite_is_elementwise_product() {
        let hw = HardwareParams::new(0.6566, 1.0).unwrap();
        let sw = SoftwareParams::new(10.0, 0.1, 5.0).unwrap();
        let ip = InteractionParams::new(8.92e-4, 3.92e-3).unwrap();
        let inter = InteractionSource::ClosedForm(ip);
        for i in 0..=20 {
            let t = i as f64 * 0.5;
            let expected = weibull_reliability(&hw, t).unwrap()
                * software_reliability(&sw, t).unwrap()
                * interaction_reliability_closed_form(&ip, t).unwrap();
            assert_eq!(composite_pmu_reliability(&hw, &sw, &inter, t).unwrap(), expected);
        }
    }
}
