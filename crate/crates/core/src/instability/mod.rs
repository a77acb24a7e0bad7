//! Saddle-point analysis of the unstable band in the complex quasi-momentum
//! plane.
//!
//! Along a ray `n = v t` the band integral behaves like `e^{γ(v) t}` with
//! `γ(v) = Im E(q_s) − v Im q_s`, where the saddle `q_s` solves
//! `dE/dq = v`. Saddles are located on the two-sheeted Riemann surface of
//! `w = √R(q)`: Newton runs on the pair `(q, w)` with
//!
//! ```text
//! w² − R(q) = 0
//! 2ρ sin(q+φ) − κσ sin q / w − v = 0
//! ```
//!
//! so no branch cut is ever crossed. The dominant saddle is the one that
//! pinches the integration contour; see [`pinch`] for how admissible saddles
//! are separated from the rest.

mod asymptotic;
mod classify;
pub mod pinch;

pub use asymptotic::{asymptotic_saddle, AsymptoticCase, AsymptoticSaddle};
pub use classify::{classify, classify_with, ClassificationReport, Method, Regime};

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::lattice::{threshold_and_gap, LatticeParams};
use crate::scalar::{cplx, real, Cplx, Real};

use pinch::{pinch_level, PinchLevel};

/// Tunables of the saddle search and of the admissibility test.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SaddleConfig<T> {
    /// Saddles are sought with `|Im q| ≤ q_im_max`.
    pub q_im_max: T,
    /// Newton seeds along `Re q ∈ [0, 2π)`.
    pub seeds_re: usize,
    /// Newton seeds along `Im q ∈ [−q_im_max, q_im_max]`.
    pub seeds_im: usize,
    /// Roots closer than this (in `q` and in `w`) are merged.
    pub dedup_tol: T,
    pub max_iter: usize,
    /// Accepted `|dE/dq − v|` at a converged root.
    pub root_tol: T,
    /// Resolution of the contour-minimax grid.
    pub pinch_re: usize,
    pub pinch_im: usize,
    /// Slack between a saddle's growth rate and the minimax level.
    pub pinch_tol: T,
}

impl<T: Real> Default for SaddleConfig<T> {
    fn default() -> Self {
        Self {
            q_im_max: T::lit(2.0),
            seeds_re: 64,
            seeds_im: 17,
            dedup_tol: T::lit(1e-7),
            max_iter: 200,
            root_tol: T::lit(1e-9),
            pinch_re: 1024,
            pinch_im: 801,
            pinch_tol: T::lit(2e-3),
        }
    }
}

/// A root of `dE/dq = v` on the Riemann surface of the band.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SaddlePoint<T> {
    /// Complex quasi-momentum, `Re q_s ∈ [0, 2π)`.
    pub q_s: Cplx<T>,
    /// Sheet value `w = √R(q_s)`; `E = −2ρ cos(q_s+φ) + w`.
    pub root: Cplx<T>,
    pub energy: Cplx<T>,
    /// Lowest nonvanishing derivative order beyond the linear term.
    pub order: u32,
    /// `Im E(q_s) − v Im q_s`.
    pub growth_rate: T,
    /// Ray velocity the saddle was computed for.
    pub velocity: T,
}

/// `dE/dq` on the sheet selected by `w`.
pub(crate) fn slope<T: Real>(params: &LatticeParams<T>, q: Cplx<T>, w: Cplx<T>) -> Cplx<T> {
    let two_rho = T::lit(2.0) * params.rho();
    (q + real(params.phi())).sin() * two_rho - q.sin() * params.kappa_sigma() / w
}

/// Band energy on the sheet selected by `w`.
pub(crate) fn sheet_energy<T: Real>(params: &LatticeParams<T>, q: Cplx<T>, w: Cplx<T>) -> Cplx<T> {
    params.advective_energy(q) + w
}

enum Outcome<T> {
    Root(Cplx<T>, Cplx<T>),
    BranchPoint(Cplx<T>),
    Diverged,
}

fn newton<T: Real>(params: &LatticeParams<T>, v: T, q0: Cplx<T>, w0: Cplx<T>, cfg: &SaddleConfig<T>) -> Outcome<T> {
    let ks = params.kappa_sigma();
    let two_rho = T::lit(2.0) * params.rho();
    let phi = real(params.phi());
    let branch_eps = T::lit(1e-12);
    let max_step = T::lit(0.5);
    let (mut q, mut w) = (q0, w0);
    for _ in 0..cfg.max_iter {
        if w.norm() < branch_eps {
            return Outcome::BranchPoint(q);
        }
        let f1 = w * w - params.radicand_complex(q);
        let f2 = (q + phi).sin() * two_rho - q.sin() * ks / w - real(v);
        let j11 = q.sin() * (T::lit(2.0) * ks);
        let j12 = w * T::lit(2.0);
        let j21 = (q + phi).cos() * two_rho - q.cos() * ks / w;
        let j22 = q.sin() * ks / (w * w);
        let det = j11 * j22 - j12 * j21;
        if !(det.re.is_finite() && det.im.is_finite()) || det.norm() == T::zero() {
            return Outcome::Diverged;
        }
        let dq = (j22 * f1 - j12 * f2) / det;
        let dw = (j11 * f2 - j21 * f1) / det;
        let step = dq.norm().max(dw.norm());
        if !step.is_finite() {
            return Outcome::Diverged;
        }
        let damp = if step > max_step { max_step / step } else { T::one() };
        q = q - dq * damp;
        w = w - dw * damp;
        if q.im.abs() > T::lit(2.0) * cfg.q_im_max + T::one() {
            return Outcome::Diverged;
        }
        if step <= T::lit(64.0) * T::epsilon() * (T::one() + q.norm() + w.norm()) {
            return Outcome::Root(q, w);
        }
    }
    // Accept a stalled iterate only if it actually solves the system.
    let f2 = slope(params, q, w) - real(v);
    if f2.norm() <= cfg.root_tol && (w * w - params.radicand_complex(q)).norm() <= cfg.root_tol {
        Outcome::Root(q, w)
    } else {
        Outcome::Diverged
    }
}

fn wrap_q<T: Real>(q: Cplx<T>) -> Cplx<T> {
    cplx(crate::scalar::wrap_angle(q.re), q.im)
}

fn same_root<T: Real>(a: &SaddlePoint<T>, q: Cplx<T>, w: Cplx<T>, tol: T) -> bool {
    let mut dre = (a.q_s.re - q.re).abs();
    dre = dre.min(T::TAU() - dre);
    let dq = (dre * dre + (a.q_s.im - q.im).powi(2)).sqrt();
    dq <= tol && (a.root - w).norm() <= tol
}

/// Derivative orders of `E(q) − v q` at the saddle from a Cauchy contour
/// integral; returns the first order `n ≥ 2` whose derivative exceeds
/// `threshold` in magnitude.
fn saddle_order<T: Real>(params: &LatticeParams<T>, q_s: Cplx<T>, w_s: Cplx<T>, threshold: T) -> u32 {
    const NODES: usize = 64;
    const MAX_ORDER: u32 = 8;
    let r_s = params.radicand_complex(q_s);
    let dr = q_s.sin() * (-T::lit(2.0) * params.kappa_sigma());
    // Keep the contour well inside the disc where √(R/R_s) stays on one sheet.
    let mut radius = T::lit(0.5);
    if dr.norm() > T::zero() {
        radius = radius.min(T::lit(0.3) * r_s.norm() / dr.norm());
    }
    let eval = |radius: T| -> Option<Vec<Cplx<T>>> {
        (0..NODES)
            .map(|j| {
                let theta = T::TAU() * T::from_count(j) / T::from_count(NODES);
                let z = q_s + cplx(theta.cos(), theta.sin()) * radius;
                let ratio = params.radicand_complex(z) / r_s;
                if (ratio - real(T::one())).norm() >= T::lit(0.9) {
                    return None;
                }
                let w = w_s * ratio.sqrt();
                Some(sheet_energy(params, z, w))
            })
            .collect()
    };
    let values = loop {
        if let Some(v) = eval(radius) {
            break v;
        }
        radius = radius * T::lit(0.5);
        if radius < T::lit(1e-6) {
            return 2;
        }
    };
    let mut factorial = T::one();
    for k in 1..=MAX_ORDER {
        factorial = factorial * T::from_count(k as usize);
        if k < 2 {
            continue;
        }
        let mut acc = cplx(T::zero(), T::zero());
        for (j, f) in values.iter().enumerate() {
            let theta = T::TAU() * T::from_count(j * k as usize) / T::from_count(NODES);
            acc = acc + *f * cplx(theta.cos(), -theta.sin());
        }
        let derivative = acc * factorial / (T::from_count(NODES) * radius.powi(k as i32));
        if derivative.norm() > threshold {
            return k;
        }
    }
    MAX_ORDER
}

/// All distinct saddles of `E(q) − v q` with `|Im q| ≤ 2` and
/// `Re q ∈ [0, 2π)`, using the default search grid.
pub fn find_saddles<T: Real>(params: &LatticeParams<T>, v: T) -> Result<Vec<SaddlePoint<T>>> {
    find_saddles_with(params, v, &SaddleConfig::default())
}

/// [`find_saddles`] with an explicit configuration.
pub fn find_saddles_with<T: Real>(params: &LatticeParams<T>, v: T, cfg: &SaddleConfig<T>) -> Result<Vec<SaddlePoint<T>>> {
    if !v.is_finite() {
        return Err(Error::invalid("v", "ray velocity must be finite"));
    }
    if params.kappa_sigma() == T::zero() && params.rho() == T::zero() {
        return Err(Error::invalid("rho", "dispersionless band: every q is stationary"));
    }
    let nre = cfg.seeds_re.max(1);
    let nim = cfg.seeds_im.max(1);
    let seeds: Vec<(Cplx<T>, bool)> = (0..nre)
        .flat_map(|i| (0..nim).flat_map(move |k| [(i, k, true), (i, k, false)]))
        .map(|(i, k, plus)| {
            let re = T::TAU() * T::from_count(i) / T::from_count(nre);
            let im = if nim == 1 {
                T::zero()
            } else {
                -cfg.q_im_max + T::lit(2.0) * cfg.q_im_max * T::from_count(k) / T::from_count(nim - 1)
            };
            (cplx(re, im), plus)
        })
        .collect();

    let nudge = cplx(T::lit(1.3e-3), T::lit(0.7e-3));
    let outcomes: Vec<Outcome<T>> = seeds
        .par_iter()
        .map(|&(q0, plus)| {
            let seed_root = |q: Cplx<T>| {
                let w = params.radicand_complex(q).sqrt();
                if plus {
                    w
                } else {
                    -w
                }
            };
            match newton(params, v, q0, seed_root(q0), cfg) {
                Outcome::BranchPoint(_) => {
                    let q1 = q0 + nudge;
                    newton(params, v, q1, seed_root(q1), cfg)
                }
                other => other,
            }
        })
        .collect();

    let mut roots: Vec<SaddlePoint<T>> = Vec::new();
    let mut branch_hit = None;
    for outcome in outcomes {
        match outcome {
            Outcome::Root(q, w) => {
                let q = wrap_q(q);
                if q.im.abs() > cfg.q_im_max {
                    continue;
                }
                if (slope(params, q, w) - real(v)).norm() > cfg.root_tol {
                    continue;
                }
                if roots.iter().any(|r| same_root(r, q, w, cfg.dedup_tol)) {
                    continue;
                }
                let energy = sheet_energy(params, q, w);
                roots.push(SaddlePoint {
                    q_s: q,
                    root: w,
                    energy,
                    order: 0,
                    growth_rate: energy.im - v * q.im,
                    velocity: v,
                });
            }
            Outcome::BranchPoint(q) => branch_hit = Some(q),
            Outcome::Diverged => {}
        }
    }
    if roots.is_empty() {
        return Err(match branch_hit {
            Some(q) => Error::BranchCut { re: q.re.to_f64().unwrap_or(f64::NAN), im: q.im.to_f64().unwrap_or(f64::NAN) },
            None => Error::NoConvergence { seeds: seeds.len() },
        });
    }
    let threshold = T::lit(1e-6);
    for r in roots.iter_mut() {
        r.order = saddle_order(params, r.q_s, r.root, threshold);
    }
    roots.sort_by(|a, b| {
        let key = |s: &SaddlePoint<T>| [s.q_s.re, s.q_s.im, s.root.re, s.root.im];
        key(a).iter().zip(key(b).iter()).map(|(x, y)| x.partial_cmp(y).unwrap_or(std::cmp::Ordering::Equal)).find(|o| o.is_ne()).unwrap_or(std::cmp::Ordering::Equal)
    });
    Ok(roots)
}

/// Growth along one ray together with the evidence behind it.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RayGrowth<T> {
    /// Asymptotic amplitude growth rate along `n = v t`.
    pub growth_rate: T,
    /// The saddle that sets the rate.
    pub dominant: SaddlePoint<T>,
    /// Lowest level over closed contours (upper bound on the true rate).
    pub pinch: PinchLevel<T>,
    /// Whether the dominant saddle reproduces the minimax level within
    /// `pinch_tol`.
    pub validated: bool,
    pub saddles: Vec<SaddlePoint<T>>,
}

/// Dominant-saddle growth rate along the ray `n = v t`.
pub fn growth_rate<T: Real>(params: &LatticeParams<T>, v: T) -> Result<T> {
    ray_growth(params, v, &SaddleConfig::default()).map(|r| r.growth_rate)
}

/// Saddle search plus admissibility.
///
/// The full Bloch propagator `e^{−i h(q) t}` is entire in `q`, so any closed
/// contour winding once around the quasi-momentum cylinder bounds the growth
/// by its highest point of `max± Im E± − v Im q`. Saddles growing faster than
/// the lowest such contour cannot dominate; the dominant saddle is the fastest
/// one that stays at or below that level.
pub fn ray_growth<T: Real>(params: &LatticeParams<T>, v: T, cfg: &SaddleConfig<T>) -> Result<RayGrowth<T>> {
    let saddles = find_saddles_with(params, v, cfg)?;
    let pinch = pinch_level(params, v, cfg.q_im_max, cfg.pinch_re, cfg.pinch_im);
    let dominant = saddles
        .iter()
        .filter(|s| s.growth_rate <= pinch.level + cfg.pinch_tol)
        .max_by(|a, b| a.growth_rate.partial_cmp(&b.growth_rate).unwrap_or(std::cmp::Ordering::Equal))
        .copied()
        .ok_or(Error::NoConvergence { seeds: cfg.seeds_re * cfg.seeds_im * 2 })?;
    let validated = (dominant.growth_rate - pinch.level).abs() <= cfg.pinch_tol;
    let mut growth = dominant.growth_rate;
    let (g_th, _) = threshold_and_gap(params);
    if params.g() <= g_th {
        // Real bands: nothing grows.
        growth = growth.min(T::zero());
    }
    Ok(RayGrowth { growth_rate: growth, dominant, pinch, validated, saddles })
}
