//! Static non-Hermitian Rice–Mele lattice: parameters, Bloch bands and
//! eigenvectors, PT threshold, gap and group velocity.
//!
//! The lattice is a dimer chain with intra-cell hopping `κ`, inter-cell
//! hopping `σ`, next-nearest hopping `ρ e^{iφ}` on both sublattices and
//! balanced gain `+ig` (a sites) / loss `−ig` (b sites). With the Bloch
//! ansatz `(a_n, b_n) = (A, B) e^{−iEt + iqn}` the amplitudes obey the 2×2
//! system
//!
//! ```text
//! [E + 2ρ cos(q+φ) − ig] A + [κ + σ e^{−iq}] B = 0
//! [κ + σ e^{iq}] A + [E + 2ρ cos(q+φ) + ig] B = 0
//! ```
//!
//! whose determinant gives the two minibands
//! `E±(q) = −2ρ cos(q+φ) ± √(−g² + κ² + σ² + 2κσ cos q)`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{cplx, expi, imag_unit, real, wrap_angle, Cplx, Real};

/// Static Rice–Mele parameters. All rates are in inverse time units.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawLatticeParams<T>", bound(deserialize = "T: Real + Deserialize<'de>"))]
pub struct LatticeParams<T> {
    kappa: T,
    sigma: T,
    rho: T,
    phi: T,
    g: T,
}

#[derive(Deserialize)]
struct RawLatticeParams<T> {
    kappa: T,
    sigma: T,
    rho: T,
    phi: T,
    g: T,
}

impl<T: Real> TryFrom<RawLatticeParams<T>> for LatticeParams<T> {
    type Error = Error;

    fn try_from(raw: RawLatticeParams<T>) -> Result<Self> {
        LatticeParams::new(raw.kappa, raw.sigma, raw.rho, raw.phi, raw.g)
    }
}

fn non_negative<T: Real>(name: &'static str, x: T) -> Result<T> {
    if !x.is_finite() {
        return Err(Error::invalid(name, format!("must be finite, got {x}")));
    }
    if x < T::zero() {
        return Err(Error::invalid(name, format!("must be >= 0, got {x}")));
    }
    Ok(x)
}

impl<T: Real> LatticeParams<T> {
    /// Validates and builds a parameter set. `phi` is reduced to `[0, 2π)`.
    pub fn new(kappa: T, sigma: T, rho: T, phi: T, g: T) -> Result<Self> {
        let kappa = non_negative("kappa", kappa)?;
        let sigma = non_negative("sigma", sigma)?;
        let rho = non_negative("rho", rho)?;
        let g = non_negative("g", g)?;
        if !phi.is_finite() {
            return Err(Error::invalid("phi", format!("must be finite, got {phi}")));
        }
        if kappa + sigma <= T::zero() {
            return Err(Error::invalid("kappa+sigma", "a fully disconnected dimer chain is not a lattice"));
        }
        Ok(Self { kappa, sigma, rho, phi: wrap_angle(phi), g })
    }

    pub fn kappa(&self) -> T {
        self.kappa
    }
    pub fn sigma(&self) -> T {
        self.sigma
    }
    pub fn rho(&self) -> T {
        self.rho
    }
    pub fn phi(&self) -> T {
        self.phi
    }
    pub fn g(&self) -> T {
        self.g
    }

    pub fn with_g(self, g: T) -> Result<Self> {
        Self::new(self.kappa, self.sigma, self.rho, self.phi, g)
    }

    pub fn with_rho(self, rho: T) -> Result<Self> {
        Self::new(self.kappa, self.sigma, rho, self.phi, self.g)
    }

    /// `−g² + κ² + σ² + 2κσ cos q`, the quantity under the band square root.
    pub fn radicand(&self, q: T) -> T {
        -self.g * self.g + self.kappa * self.kappa + self.sigma * self.sigma
            + T::lit(2.0) * self.kappa * self.sigma * q.cos()
    }

    /// Analytic continuation of [`radicand`](Self::radicand) to complex `q`.
    pub fn radicand_complex(&self, q: Cplx<T>) -> Cplx<T> {
        let two_ks = T::lit(2.0) * self.kappa * self.sigma;
        q.cos() * two_ks
            + real(-self.g * self.g + self.kappa * self.kappa + self.sigma * self.sigma)
    }

    /// The band-centre term `−2ρ cos(q + φ)` for complex `q`.
    pub fn advective_energy(&self, q: Cplx<T>) -> Cplx<T> {
        (q + real(self.phi)).cos() * (-T::lit(2.0) * self.rho)
    }

    /// `κσ`.
    pub fn kappa_sigma(&self) -> T {
        self.kappa * self.sigma
    }

    /// `ε = √(g² − g_th²)` above threshold, zero otherwise.
    pub fn epsilon(&self) -> T {
        let (g_th, _) = threshold_and_gap(self);
        if self.g > g_th {
            (self.g * self.g - g_th * g_th).sqrt()
        } else {
            T::zero()
        }
    }

    /// Bloch Hamiltonian `h(q)` such that `E (A, B)ᵀ = h(q) (A, B)ᵀ`.
    pub fn bloch_hamiltonian(&self, q: T) -> [[Cplx<T>; 2]; 2] {
        let diag = -T::lit(2.0) * self.rho * (q + self.phi).cos();
        let i = imag_unit::<T>();
        let off_ab = -(real(self.kappa) + expi(-q) * self.sigma);
        let off_ba = -(real(self.kappa) + expi(q) * self.sigma);
        [
            [real(diag) + i * self.g, off_ab],
            [off_ba, real(diag) - i * self.g],
        ]
    }

    /// Rough magnitude of the matrix entries, used to scale tolerances.
    pub(crate) fn energy_scale(&self) -> T {
        self.kappa + self.sigma + T::lit(2.0) * self.rho + self.g
    }
}

/// Miniband selector.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Branch {
    Plus,
    Minus,
}

/// Both Bloch modes at one quasi-momentum.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BlochMode<T> {
    pub q: T,
    pub energy_plus: Cplx<T>,
    pub energy_minus: Cplx<T>,
    pub vector_plus: [Cplx<T>; 2],
    pub vector_minus: [Cplx<T>; 2],
}

/// `√R` with the plus branch convention: a negative radicand maps to
/// `+i√|R|`, so `Im E₊ ≥ 0` on the real axis.
fn band_root<T: Real>(r: T) -> Cplx<T> {
    if r >= T::zero() {
        real(r.sqrt())
    } else {
        cplx(T::zero(), (-r).sqrt())
    }
}

/// Band energies `(E₊(q), E₋(q))`. `q` is reduced modulo 2π.
pub fn dispersion<T: Real>(params: &LatticeParams<T>, q: T) -> (Cplx<T>, Cplx<T>) {
    let q = wrap_angle(q);
    let centre = real(-T::lit(2.0) * params.rho * (q + params.phi).cos());
    let root = band_root(params.radicand(q));
    (centre + root, centre - root)
}

/// Energy of one branch.
pub fn band_energy<T: Real>(params: &LatticeParams<T>, q: T, branch: Branch) -> Cplx<T> {
    let (ep, em) = dispersion(params, q);
    match branch {
        Branch::Plus => ep,
        Branch::Minus => em,
    }
}

/// `h(q) − E·1`.
fn shifted_hamiltonian<T: Real>(params: &LatticeParams<T>, q: T, energy: Cplx<T>) -> [[Cplx<T>; 2]; 2] {
    let mut m = params.bloch_hamiltonian(q);
    m[0][0] = m[0][0] - energy;
    m[1][1] = m[1][1] - energy;
    m
}

/// Normalized null vector of a (numerically) singular 2×2 matrix, with the
/// first nonzero component made real and positive.
fn null_vector<T: Real>(m: &[[Cplx<T>; 2]; 2]) -> [Cplx<T>; 2] {
    let from_row0 = [-m[0][1], m[0][0]];
    let from_row1 = [-m[1][1], m[1][0]];
    let n0 = from_row0[0].norm_sqr() + from_row0[1].norm_sqr();
    let n1 = from_row1[0].norm_sqr() + from_row1[1].norm_sqr();
    let (v, n) = if n0 >= n1 { (from_row0, n0) } else { (from_row1, n1) };
    if n == T::zero() {
        // Scalar matrix: every vector is a null vector.
        return [real(T::one()), real(T::zero())];
    }
    let norm = n.sqrt();
    let v = [v[0] / norm, v[1] / norm];
    let lead = if v[0].norm() > T::lit(1e-12) { v[0] } else { v[1] };
    let phase = lead / lead.norm();
    [v[0] / phase, v[1] / phase]
}

/// Bloch amplitudes `(A, B) = (κ + σe^{−iq}, ig − E − 2ρ cos(q+φ))`,
/// unnormalized.
///
/// Where this closed form degenerates to (nearly) the zero vector, which
/// happens for `κ = σ` at `q = π` on the plus branch, the normalized null
/// vector of `h(q) − E` is returned instead, phased so that its first nonzero
/// component is real and positive.
pub fn bloch_eigenvector<T: Real>(params: &LatticeParams<T>, q: T, branch: Branch) -> [Cplx<T>; 2] {
    let q = wrap_angle(q);
    let energy = band_energy(params, q, branch);
    let i = imag_unit::<T>();
    let a = real(params.kappa) + expi(-q) * params.sigma;
    let b = i * params.g - energy - real(T::lit(2.0) * params.rho * (q + params.phi).cos());
    let norm = (a.norm_sqr() + b.norm_sqr()).sqrt();
    if norm > T::lit(1e-6) * params.energy_scale() {
        [a, b]
    } else {
        null_vector(&shifted_hamiltonian(params, q, energy))
    }
}

/// Energies and eigenvectors of both branches at `q`.
pub fn bloch_mode<T: Real>(params: &LatticeParams<T>, q: T) -> BlochMode<T> {
    let q = wrap_angle(q);
    let (energy_plus, energy_minus) = dispersion(params, q);
    BlochMode {
        q,
        energy_plus,
        energy_minus,
        vector_plus: bloch_eigenvector(params, q, Branch::Plus),
        vector_minus: bloch_eigenvector(params, q, Branch::Minus),
    }
}

/// `‖(h(q) − E) v‖ / ‖v‖`: how well `v` solves the homogeneous Bloch system.
pub fn eigen_residual<T: Real>(params: &LatticeParams<T>, q: T, energy: Cplx<T>, v: &[Cplx<T>; 2]) -> T {
    let m = shifted_hamiltonian(params, q, energy);
    let r0 = m[0][0] * v[0] + m[0][1] * v[1];
    let r1 = m[1][0] * v[0] + m[1][1] * v[1];
    let vn = (v[0].norm_sqr() + v[1].norm_sqr()).sqrt();
    (r0.norm_sqr() + r1.norm_sqr()).sqrt() / vn
}

/// Determinant of the Bloch system evaluated at energy `E`; vanishes on the
/// bands.
pub fn characteristic_determinant<T: Real>(params: &LatticeParams<T>, q: T, energy: Cplx<T>) -> Cplx<T> {
    let i = imag_unit::<T>();
    let centre = real(energy.re + T::lit(2.0) * params.rho * (q + params.phi).cos()) + i * energy.im;
    let d11 = centre - i * params.g;
    let d22 = centre + i * params.g;
    let off1 = real(params.kappa) + expi(-q) * params.sigma;
    let off2 = real(params.kappa) + expi(q) * params.sigma;
    d11 * d22 - off1 * off2
}

/// PT threshold `g_th = |σ − κ|` and the gap `2√(g_th² − g²)` at `q = π`
/// (zero at and above threshold).
pub fn threshold_and_gap<T: Real>(params: &LatticeParams<T>) -> (T, T) {
    let g_th = (params.sigma - params.kappa).abs();
    let gap = if params.g <= g_th {
        T::lit(2.0) * (g_th * g_th - params.g * params.g).max(T::zero()).sqrt()
    } else {
        T::zero()
    };
    (g_th, gap)
}

/// Group velocity `−2ρ sin φ` of the most unstable mode (`q = π`) at the
/// symmetry-breaking point.
pub fn group_velocity<T: Real>(params: &LatticeParams<T>) -> T {
    -T::lit(2.0) * params.rho * params.phi.sin()
}

/// `√(κσ)`, the advection speed separating convective from absolute
/// breaking near threshold.
pub fn critical_speed<T: Real>(params: &LatticeParams<T>) -> T {
    params.kappa_sigma().sqrt()
}
