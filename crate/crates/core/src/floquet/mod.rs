//! The ac-dc driven zig-zag lattice.
//!
//! With forces `F_x = Mω − Γω cos(ωt + φ)` and `F_y = −Mω − Γω cos(ωt − φ)`
//! the gauge transformation
//! `A_n = a_n e^{i n (φ_eff + Φ(t))}`, `B_n = b_n e^{i n (φ_eff + Φ(t)) + iβ + iΘ(t)}`
//! leaves a lattice with `T = 2π/ω`-periodic hopping phases `F`, `G`, `H`.
//! Its Bloch sector at quasi-momentum `q` is the 2×2 system
//! `i ψ̇ = M(q, t) ψ`, whose one-period propagator (the monodromy) yields the
//! quasi-energies. At high frequency the cycle averages of `F`, `G`, `H`
//! reduce the model to a static lattice with Bessel-renormalized hoppings.

mod bessel;

pub use bessel::{bessel_j, BESSEL_X_MAX};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{dispersion, LatticeParams};
use crate::ode::Rk4;
use crate::scalar::{cplx, expi, real, wrap_angle, Cplx, Real};

/// Parameters of the driven lattice. The dc force `U = Mω` is implied by the
/// resonance order and is not stored.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawDriveParams<T>", bound(deserialize = "T: Real + Deserialize<'de>"))]
pub struct DriveParams<T> {
    kappa1: T,
    kappa2: T,
    kappa3: T,
    g: T,
    m: u32,
    gamma: T,
    drive_phase: T,
    omega: T,
}

#[derive(Deserialize)]
struct RawDriveParams<T> {
    kappa1: T,
    kappa2: T,
    kappa3: T,
    g: T,
    m: u32,
    gamma: T,
    drive_phase: T,
    omega: T,
}

impl<T: Real> TryFrom<RawDriveParams<T>> for DriveParams<T> {
    type Error = Error;

    fn try_from(r: RawDriveParams<T>) -> Result<Self> {
        DriveParams::new(r.kappa1, r.kappa2, r.kappa3, r.g, r.m, r.gamma, r.drive_phase, r.omega)
    }
}

impl<T: Real> DriveParams<T> {
    #[allow(clippy::too_many_arguments)]
    pub fn new(kappa1: T, kappa2: T, kappa3: T, g: T, m: u32, gamma: T, drive_phase: T, omega: T) -> Result<Self> {
        for (name, x) in [("kappa1", kappa1), ("kappa2", kappa2), ("kappa3", kappa3), ("g", g), ("gamma", gamma)] {
            if !x.is_finite() || x < T::zero() {
                return Err(Error::invalid(name, format!("must be finite and >= 0, got {x}")));
            }
        }
        if !drive_phase.is_finite() {
            return Err(Error::invalid("drive_phase", "must be finite"));
        }
        if !(omega.is_finite() && omega > T::zero()) {
            return Err(Error::invalid("omega", format!("must be finite and > 0, got {omega}")));
        }
        Ok(Self { kappa1, kappa2, kappa3, g, m, gamma, drive_phase, omega })
    }

    pub fn kappa1(&self) -> T {
        self.kappa1
    }
    pub fn kappa2(&self) -> T {
        self.kappa2
    }
    pub fn kappa3(&self) -> T {
        self.kappa3
    }
    pub fn g(&self) -> T {
        self.g
    }
    pub fn m(&self) -> u32 {
        self.m
    }
    pub fn gamma(&self) -> T {
        self.gamma
    }
    pub fn drive_phase(&self) -> T {
        self.drive_phase
    }
    pub fn omega(&self) -> T {
        self.omega
    }

    pub fn with_kappa3(self, kappa3: T) -> Result<Self> {
        Self::new(self.kappa1, self.kappa2, kappa3, self.g, self.m, self.gamma, self.drive_phase, self.omega)
    }

    pub fn with_g(self, g: T) -> Result<Self> {
        Self::new(self.kappa1, self.kappa2, self.kappa3, g, self.m, self.gamma, self.drive_phase, self.omega)
    }

    pub fn with_omega(self, omega: T) -> Result<Self> {
        Self::new(self.kappa1, self.kappa2, self.kappa3, self.g, self.m, self.gamma, self.drive_phase, omega)
    }

    /// Drive period `2π/ω`.
    pub fn period(&self) -> T {
        T::TAU() / self.omega
    }

    fn m_real(&self) -> T {
        T::from_u32(self.m).expect("resonance order")
    }

    /// `(F_x(t), F_y(t))`.
    pub fn forces(&self, t: T) -> (T, T) {
        let u = self.m_real() * self.omega;
        let amp = self.gamma * self.omega;
        let wt = self.omega * t;
        (u - amp * (wt + self.drive_phase).cos(), -u - amp * (wt - self.drive_phase).cos())
    }

    /// `(Φ(t), Θ(t))`: time integrals from 0 of `F_x + F_y` and of `F_x`.
    pub fn gauge_phases(&self, t: T) -> (T, T) {
        let wt = self.omega * t;
        let (s, c) = (self.drive_phase.sin(), self.drive_phase.cos());
        let phi_cap = -T::lit(2.0) * self.gamma * c * wt.sin();
        let theta = self.m_real() * wt - self.gamma * ((wt + self.drive_phase).sin() - s);
        (phi_cap, theta)
    }

    /// `β = Mφ − Γ sin φ`.
    pub fn beta(&self) -> T {
        self.m_real() * self.drive_phase - self.gamma * self.drive_phase.sin()
    }

    /// `M(2φ + π)` before reduction.
    pub(crate) fn raw_effective_phase(&self) -> T {
        self.m_real() * (T::lit(2.0) * self.drive_phase + T::PI())
    }

    /// Effective next-nearest hopping phase `M(2φ + π)` in `[0, 2π)`.
    pub fn effective_phase(&self) -> T {
        wrap_angle(self.raw_effective_phase())
    }
}

/// `(F(t), G(t), H(t))` in closed form, assuming `U = Mω`:
///
/// ```text
/// F = exp[iMφ + iMωt − iΓ sin(ωt + φ)]
/// G = exp[−iM(φ + π) + iMωt + iΓ sin(ωt − φ)]
/// H = exp[iM(2φ + π) − 2iΓ cos φ sin ωt]
/// ```
pub fn gauge_coefficients<T: Real>(d: &DriveParams<T>, t: T) -> (Cplx<T>, Cplx<T>, Cplx<T>) {
    let m = d.m_real();
    let wt = d.omega * t;
    let ph = d.drive_phase;
    let f = m * ph + m * wt - d.gamma * (wt + ph).sin();
    let g = -m * (ph + T::PI()) + m * wt + d.gamma * (wt - ph).sin();
    let h = d.raw_effective_phase() - T::lit(2.0) * d.gamma * ph.cos() * wt.sin();
    (expi(f), expi(g), expi(h))
}

/// Bending direction for [`bending_to_force`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Axis {
    X,
    Y,
}

/// Force produced by axis curvature: `F_x = −(2π n_s d/λ) x₀''` and
/// `F_y = +(2π n_s d/λ) y₀''`.
pub fn bending_to_force<T: Real>(d: T, curvature: T, wavelength: T, n_s: T, axis: Axis) -> Result<T> {
    if !(wavelength > T::zero() && wavelength.is_finite()) {
        return Err(Error::invalid("wavelength", format!("must be positive, got {wavelength}")));
    }
    let magnitude = T::TAU() * n_s * d / wavelength * curvature;
    Ok(match axis {
        Axis::X => -magnitude,
        Axis::Y => magnitude,
    })
}

/// High-frequency effective static lattice:
/// `κ = κ₁ J_M(Γ)`, `σ = κ₂ J_M(Γ)`, `ρ = κ₃ J₀(2Γ cos φ)`, `φ_eff = M(2φ + π)`.
///
/// A negative Bessel factor is absorbed into the phases: a common sign of
/// `κ` and `σ` is removed by `b_n → −b_n`, and `ρ < 0` becomes `|ρ|` with
/// `φ_eff + π`.
pub fn rwa_params<T: Real>(d: &DriveParams<T>) -> Result<LatticeParams<T>> {
    let jm = bessel_j(d.m, d.gamma)?;
    let j0 = bessel_j(0, T::lit(2.0) * d.gamma * d.drive_phase.cos())?;
    let mut rho = d.kappa3 * j0;
    let mut phi = d.raw_effective_phase();
    if rho < T::zero() {
        rho = -rho;
        phi = phi + T::PI();
    }
    LatticeParams::new((d.kappa1 * jm).abs(), (d.kappa2 * jm).abs(), rho, phi, d.g)
}

/// `M(q, t)` of the Bloch sector: `i ψ̇ = M ψ`.
pub fn bloch_generator<T: Real>(d: &DriveParams<T>, q: T, t: T) -> [[Cplx<T>; 2]; 2] {
    let (f, g, h) = gauge_coefficients(d, t);
    let eq = expi(q);
    let diag = -(h * eq + h.conj() * eq.conj()) * d.kappa3;
    let ig = cplx(T::zero(), d.g);
    [
        [diag + ig, -(f * d.kappa1 + g * eq.conj() * d.kappa2)],
        [-(f.conj() * d.kappa1 + g.conj() * eq * d.kappa2), diag - ig],
    ]
}

/// Smallest accepted number of RK4 steps per drive period.
pub const MIN_STEPS: usize = 200;

/// One-period propagator `U(T)` of the Bloch sector at `q`, from `steps`
/// RK4 steps.
pub fn monodromy<T: Real>(d: &DriveParams<T>, q: T, steps: usize) -> Result<[[Cplx<T>; 2]; 2]> {
    if steps < MIN_STEPS {
        return Err(Error::invalid("steps", format!("need at least {MIN_STEPS} steps per period, got {steps}")));
    }
    let h = d.period() / T::from_count(steps);
    let mut y = [real(T::one()), real(T::zero()), real(T::zero()), real(T::one())];
    let mut rk = Rk4::new(4);
    let mi = cplx(T::zero(), -T::one());
    let mut rhs = |t: T, y: &[Cplx<T>], dy: &mut [Cplx<T>]| {
        let m = bloch_generator(d, q, t);
        // Columns (y0, y1) and (y2, y3).
        for c in 0..2 {
            let (u, v) = (y[2 * c], y[2 * c + 1]);
            dy[2 * c] = mi * (m[0][0] * u + m[0][1] * v);
            dy[2 * c + 1] = mi * (m[1][0] * u + m[1][1] * v);
        }
    };
    for k in 0..steps {
        rk.step(&mut rhs, h * T::from_count(k), h, &mut y);
    }
    if y.iter().any(|z| !(z.re.is_finite() && z.im.is_finite())) {
        return Err(Error::NonFinite { t: d.period().to_f64().unwrap_or(f64::NAN), cell: 0 });
    }
    Ok([[y[0], y[2]], [y[1], y[3]]])
}

/// Quasi-energy bands of the driven lattice on a quasi-momentum grid.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct QuasiEnergyBand<T> {
    pub q_grid: Vec<T>,
    pub e_plus: Vec<Cplx<T>>,
    pub e_minus: Vec<Cplx<T>>,
    pub omega: T,
    /// Grid indices where the monodromy eigenvalues coincide to 1e−12; the
    /// bands there are ordered by `Re E` alone.
    pub degenerate: Vec<usize>,
}

/// Distance between quasi-energies with the real parts compared modulo `ω`.
fn folded_distance<T: Real>(a: Cplx<T>, b: Cplx<T>, omega: T) -> T {
    let mut dre = (a.re - b.re) % omega;
    if dre < T::zero() {
        dre = dre + omega;
    }
    dre = dre.min(omega - dre);
    (dre * dre + (a.im - b.im) * (a.im - b.im)).sqrt()
}

/// Folds `Re E` into `[−ω/2, ω/2)`.
fn fold<T: Real>(e: Cplx<T>, omega: T) -> Cplx<T> {
    let half = omega * T::lit(0.5);
    let mut re = (e.re + half) % omega;
    if re < T::zero() {
        re = re + omega;
    }
    let mut re = re - half;
    if re >= half {
        re = re - omega;
    }
    cplx(re, e.im)
}

/// `E = (i/T) log λ` for both monodromy eigenvalues, plus a degeneracy flag.
fn floquet_exponents<T: Real>(u: &[[Cplx<T>; 2]; 2], period: T, omega: T) -> (Cplx<T>, Cplx<T>, bool) {
    let tr = u[0][0] + u[1][1];
    let det = u[0][0] * u[1][1] - u[0][1] * u[1][0];
    let half_tr = tr * T::lit(0.5);
    let disc = (half_tr * half_tr - det).sqrt();
    let (l1, l2) = (half_tr + disc, half_tr - disc);
    let i_over_t = cplx(T::zero(), T::one() / period);
    let e1 = fold(i_over_t * l1.ln(), omega);
    let e2 = fold(i_over_t * l2.ln(), omega);
    (e1, e2, (l1 - l2).norm() < T::lit(1e-12))
}

/// Quasi-energies on `q_grid` with `steps` RK4 steps per period.
///
/// Each pair is folded into `[−ω/2, ω/2)`. At the first grid point the band
/// with the larger `Im E` (then larger `Re E`) is labelled plus; further
/// points are matched greedily to their predecessor, with real parts
/// compared modulo `ω`.
pub fn quasi_energies<T: Real>(d: &DriveParams<T>, q_grid: &[T], steps: usize) -> Result<QuasiEnergyBand<T>> {
    if q_grid.iter().any(|q| !q.is_finite()) {
        return Err(Error::invalid("q_grid", "entries must be finite"));
    }
    if q_grid.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::invalid("q_grid", "must be sorted"));
    }
    let period = d.period();
    let raw: Vec<(Cplx<T>, Cplx<T>, bool)> = q_grid
        .par_iter()
        .map(|&q| monodromy(d, q, steps).map(|u| floquet_exponents(&u, period, d.omega)))
        .collect::<Result<_>>()?;

    let tie = T::lit(1e-12) * (T::one() + d.omega);
    let by_rank = |x: Cplx<T>, y: Cplx<T>| {
        if (x.im - y.im).abs() > tie {
            x.im > y.im
        } else {
            x.re >= y.re
        }
    };
    let mut e_plus = Vec::with_capacity(raw.len());
    let mut e_minus = Vec::with_capacity(raw.len());
    let mut degenerate = Vec::new();
    for (k, &(x, y, degen)) in raw.iter().enumerate() {
        let keep = if degen {
            degenerate.push(k);
            x.re >= y.re
        } else if k == 0 {
            by_rank(x, y)
        } else {
            let (pp, pm) = (e_plus[k - 1], e_minus[k - 1]);
            let straight = folded_distance(x, pp, d.omega) + folded_distance(y, pm, d.omega);
            let crossed = folded_distance(y, pp, d.omega) + folded_distance(x, pm, d.omega);
            straight <= crossed
        };
        let (p, m) = if keep { (x, y) } else { (y, x) };
        e_plus.push(p);
        e_minus.push(m);
    }
    if !degenerate.is_empty() {
        log::debug!("monodromy eigenvalues coincide at {} grid points", degenerate.len());
    }
    Ok(QuasiEnergyBand { q_grid: q_grid.to_vec(), e_plus, e_minus, omega: d.omega, degenerate })
}

impl<T: Real> QuasiEnergyBand<T> {
    /// Largest distance, over the grid, between the quasi-energy pair and the
    /// static bands of `params`, matching the pairs in whichever order is
    /// closer and comparing real parts modulo `ω`.
    pub fn max_deviation(&self, params: &LatticeParams<T>) -> T {
        self.q_grid
            .iter()
            .zip(self.e_plus.iter().zip(&self.e_minus))
            .map(|(&q, (&p, &m))| {
                let (sp, sm) = dispersion(params, q);
                let straight = folded_distance(p, sp, self.omega).max(folded_distance(m, sm, self.omega));
                let crossed = folded_distance(p, sm, self.omega).max(folded_distance(m, sp, self.omega));
                straight.min(crossed)
            })
            .fold(T::zero(), T::max)
    }

    /// Largest `|Im E|` over both bands.
    pub fn max_abs_imag(&self) -> T {
        self.e_plus.iter().chain(&self.e_minus).map(|e| e.im.abs()).fold(T::zero(), T::max)
    }

    /// Largest set distance between `{E₊, E₋}` and its complex conjugate.
    pub fn pairing_defect(&self) -> T {
        self.e_plus
            .iter()
            .zip(&self.e_minus)
            .map(|(&p, &m)| {
                let d = |x: Cplx<T>| folded_distance(x.conj(), p, self.omega).min(folded_distance(x.conj(), m, self.omega));
                d(p).max(d(m))
            })
            .fold(T::zero(), T::max)
    }

    /// Number of grid points with `Im E₊ > threshold`.
    pub fn unstable_count(&self, threshold: T) -> usize {
        self.e_plus.iter().filter(|e| e.im > threshold).count()
    }
}
