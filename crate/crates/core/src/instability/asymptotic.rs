//! Small-`ε` saddle roots near `q = π`.
//!
//! Writing `q_s = π + α` and expanding `dE₊/dq = 0` for `ε² = g² − g_th² → 0`
//! gives, with `v_g = −2ρ sin φ`:
//!
//! * `|v_g| ≠ √(κσ)`: `α² = ε² v_g² / (κσ (v_g² − κσ))`, `α ~ ε`;
//! * `|v_g| = √(κσ)`, `cos φ ≠ 0`: `α³ = ε² sin φ / (2κσ cos φ)`, `α ~ ε^{2/3}`;
//! * `|v_g| = √(κσ)`, `cos φ = 0`: `α⁴ = −4ε² / (3κσ)`, `α ~ ε^{1/2}`.
//!
//! The energy at each root is estimated from
//! `E₊ ≈ 2ρ cos φ − 2ρ sin φ α + √(κσ α² − ε²)` with the square-root sign
//! that satisfies the leading-order saddle equation `v_g + κσ α / w = 0`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::lattice::{group_velocity, threshold_and_gap, LatticeParams};
use crate::scalar::{cplx, real, Cplx, Real};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum AsymptoticCase {
    Generic,
    Cubic,
    Quartic,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AsymptoticSaddle<T> {
    /// Offsets `α` of the saddles from `q = π`.
    pub alpha_roots: Vec<Cplx<T>>,
    pub case: AsymptoticCase,
    /// Leading-order energies `E₊(π + α)`, one per root.
    pub energies: Vec<Cplx<T>>,
    /// Largest `Im E₊` over the roots (the `v = 0` growth rate).
    pub growth_rate_v0: T,
    pub epsilon: T,
}

/// The `n` complex `n`-th roots of `z`.
fn nth_roots<T: Real>(z: Cplx<T>, n: u32) -> Vec<Cplx<T>> {
    let nf = T::from_count(n as usize);
    let modulus = z.norm().powf(T::one() / nf);
    let arg = z.im.atan2(z.re);
    (0..n)
        .map(|k| {
            let theta = (arg + T::TAU() * T::from_count(k as usize)) / nf;
            cplx(modulus * theta.cos(), modulus * theta.sin())
        })
        .collect()
}

/// Case selection, saddle offsets and the leading-order `v = 0` growth rate.
pub fn asymptotic_saddle<T: Real>(params: &LatticeParams<T>) -> Result<AsymptoticSaddle<T>> {
    let (g_th, _) = threshold_and_gap(params);
    if params.g() <= g_th {
        return Err(Error::OutOfRegime {
            g: params.g().to_f64().unwrap_or(f64::NAN),
            g_th: g_th.to_f64().unwrap_or(f64::NAN),
        });
    }
    let ks = params.kappa_sigma();
    if ks <= T::zero() {
        return Err(Error::invalid("kappa*sigma", "expansion about q = π needs κσ > 0"));
    }
    let eps = params.epsilon();
    let eps2 = eps * eps;
    if eps2 > T::lit(0.1) * ks {
        log::warn!(
            "ε² = {eps2} exceeds 0.1·κσ = {}; small-ε saddle estimates are unreliable",
            T::lit(0.1) * ks
        );
    }
    let v_g = group_velocity(params);
    let (sin_phi, cos_phi) = (params.phi().sin(), params.phi().cos());
    let degenerate_tol = T::lit(1e-9);

    let (case, alpha_roots) = if v_g == T::zero() {
        (AsymptoticCase::Generic, vec![cplx(T::zero(), T::zero())])
    } else if (v_g * v_g - ks).abs() > degenerate_tol * ks {
        let alpha2 = eps2 * v_g * v_g / (ks * (v_g * v_g - ks));
        let a = real(alpha2).sqrt();
        (AsymptoticCase::Generic, vec![a, -a])
    } else if cos_phi.abs() > degenerate_tol {
        let alpha3 = eps2 * sin_phi / (T::lit(2.0) * ks * cos_phi);
        (AsymptoticCase::Cubic, nth_roots(real(alpha3), 3))
    } else {
        let alpha4 = -T::lit(4.0) * eps2 / (T::lit(3.0) * ks);
        (AsymptoticCase::Quartic, nth_roots(real(alpha4), 4))
    };

    let constant = T::lit(2.0) * params.rho() * cos_phi;
    let energies: Vec<Cplx<T>> = alpha_roots
        .iter()
        .map(|&alpha| {
            let w = (alpha * alpha * ks - real(eps2)).sqrt();
            let centre = real(constant) + alpha * v_g;
            if alpha.norm() == T::zero() {
                // Both signs satisfy the saddle equation; take the growing one.
                let (a, b) = (centre + w, centre - w);
                return if a.im >= b.im { a } else { b };
            }
            let residual = |w: Cplx<T>| (real(v_g) + alpha * ks / w).norm();
            let w = if residual(w) <= residual(-w) { w } else { -w };
            centre + w
        })
        .collect();
    let growth_rate_v0 = energies.iter().map(|e| e.im).fold(T::neg_infinity(), T::max);
    Ok(AsymptoticSaddle { alpha_roots, case, energies, growth_rate_v0, epsilon: eps })
}
