use serde::Serialize;

use super::{asymptotic_saddle, ray_growth, AsymptoticSaddle, SaddleConfig, SaddlePoint};
use crate::error::Result;
use crate::lattice::{critical_speed, group_velocity, threshold_and_gap, LatticeParams};
use crate::scalar::{cplx, Real};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Regime {
    Unbroken,
    Convective,
    Absolute,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    /// Dominant numeric saddle at `v = 0`.
    Numeric,
    /// `|v_g| > √(κσ)` test, valid close to threshold.
    Asymptotic,
}

/// Verdict on PT breaking with every intermediate quantity.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ClassificationReport<T> {
    pub g_th: T,
    pub epsilon: T,
    pub v_g: T,
    pub critical_speed: T,
    pub regime: Regime,
    /// Dominant `v = 0` saddle; absent in the unbroken phase.
    pub saddle_v0: Option<SaddlePoint<T>>,
    pub method: Method,
    /// Minimax contour level at `v = 0` (numeric method only).
    pub pinch_level: Option<T>,
    /// Small-`ε` roots, when `g > g_th` and `κσ > 0`.
    pub asymptotic: Option<AsymptoticSaddle<T>>,
    /// False when the dominant saddle disagrees with the contour bound, or
    /// when numeric and asymptotic verdicts differ inside the small-`ε`
    /// window.
    pub validated: bool,
}

/// Growth rates at or below this are treated as non-growing.
pub(crate) fn growth_tolerance<T: Real>() -> T {
    T::lit(1e-9)
}

/// Classifies with the default saddle configuration.
pub fn classify<T: Real>(params: &LatticeParams<T>, method: Method) -> Result<ClassificationReport<T>> {
    classify_with(params, method, &SaddleConfig::default())
}

pub fn classify_with<T: Real>(
    params: &LatticeParams<T>,
    method: Method,
    cfg: &SaddleConfig<T>,
) -> Result<ClassificationReport<T>> {
    let (g_th, _) = threshold_and_gap(params);
    let v_g = group_velocity(params);
    let c = critical_speed(params);
    let mut report = ClassificationReport {
        g_th,
        epsilon: params.epsilon(),
        v_g,
        critical_speed: c,
        regime: Regime::Unbroken,
        saddle_v0: None,
        method,
        pinch_level: None,
        asymptotic: None,
        validated: true,
    };
    if params.g() <= g_th {
        return Ok(report);
    }
    let asymptotic = if params.kappa_sigma() > T::zero() { Some(asymptotic_saddle(params)?) } else { None };
    let asymptotic_regime = if v_g.abs() > c { Regime::Convective } else { Regime::Absolute };

    match method {
        Method::Numeric => {
            let ray = ray_growth(params, T::zero(), cfg)?;
            report.regime = if ray.growth_rate <= growth_tolerance() { Regime::Convective } else { Regime::Absolute };
            report.pinch_level = Some(ray.pinch.level);
            report.saddle_v0 = Some(ray.dominant);
            let near_threshold = report.epsilon * report.epsilon <= T::lit(0.1) * params.kappa_sigma();
            let asymptotics_agree = asymptotic.is_none() || !near_threshold || asymptotic_regime == report.regime;
            report.validated = ray.validated && asymptotics_agree;
        }
        Method::Asymptotic => {
            report.regime = asymptotic_regime;
            if let Some(a) = &asymptotic {
                let (alpha, energy) = a
                    .alpha_roots
                    .iter()
                    .zip(&a.energies)
                    .max_by(|x, y| x.1.im.partial_cmp(&y.1.im).unwrap_or(std::cmp::Ordering::Equal))
                    .map(|(a, e)| (*a, *e))
                    .expect("at least one root");
                report.saddle_v0 = Some(SaddlePoint {
                    q_s: cplx(T::PI(), T::zero()) + alpha,
                    root: energy - params.advective_energy(cplx(T::PI(), T::zero()) + alpha),
                    energy,
                    order: 2,
                    growth_rate: energy.im,
                    velocity: T::zero(),
                });
            }
        }
    }
    report.asymptotic = asymptotic;
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_PI_2;

    fn p(kappa: f64, sigma: f64, rho: f64, g: f64) -> LatticeParams<f64> {
        LatticeParams::new(kappa, sigma, rho, FRAC_PI_2, g).unwrap()
    }

    #[test]
    fn verdicts_for_reference_parameter_sets() {
        for method in [Method::Numeric, Method::Asymptotic] {
            assert_eq!(classify(&p(1.0, 1.0, 0.7, 0.05), method).unwrap().regime, Regime::Convective);
            assert_eq!(classify(&p(1.0, 1.0, 0.3, 0.05), method).unwrap().regime, Regime::Absolute);
            assert_eq!(classify(&p(1.0, 0.8, 0.6, 0.1), method).unwrap().regime, Regime::Unbroken);
        }
    }

    #[test]
    fn numeric_report_is_validated() {
        let r = classify(&p(1.0, 1.0, 0.3, 0.05), Method::Numeric).unwrap();
        assert!(r.validated);
        let s = r.saddle_v0.unwrap();
        assert!((s.growth_rate - 0.04).abs() < 1e-3);
        assert!((r.critical_speed - 1.0).abs() < 1e-15);
        assert!((r.v_g + 0.6).abs() < 1e-15);
    }

    #[test]
    fn unbroken_report_has_no_saddle() {
        let r = classify(&p(1.0, 0.8, 0.6, 0.1), Method::Numeric).unwrap();
        assert!(r.saddle_v0.is_none());
        assert_eq!(r.epsilon, 0.0);
    }
}
