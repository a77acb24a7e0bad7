//! Wave-packet dynamics on the static and on the driven lattice.
//!
//! Amplitudes live on `N + 1` cells indexed `n = −N/2 … N/2`. The static
//! lattice obeys
//!
//! ```text
//! i ȧ_n = −κ b_n − σ b_{n−1} − ρ e^{iφ} a_{n+1} − ρ e^{−iφ} a_{n−1} + i g a_n
//! i ḃ_n = −κ a_n − σ a_{n+1} − ρ e^{iφ} b_{n+1} − ρ e^{−iφ} b_{n−1} − i g b_n
//! ```
//!
//! and is advanced with fixed-step RK4. The driven lattice is integrated in
//! the co-moving gauge, where the dc force has been removed and the hoppings
//! carry the periodic phases `F(t)`, `G(t)`, `H(t)`; [`to_lab_frame`] maps a
//! gauge-frame field back to the waveguide amplitudes.

mod ray;
mod ring;

pub use ray::{fit_growth, sample_ray, RayTrace};
pub use ring::ring_oracle;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::floquet::{gauge_coefficients, DriveParams};
use crate::lattice::LatticeParams;
use crate::ode::Rk4;
use crate::scalar::{cplx, expi, real, Cplx, Real};

/// Amplitudes `(a_n, b_n)` at time `t` over cells `n = −N/2 … N/2`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WavePacketField<T> {
    a: Vec<Cplx<T>>,
    b: Vec<Cplx<T>>,
    t: T,
}

impl<T: Real> WavePacketField<T> {
    /// Wraps existing amplitude arrays. Both must have the same odd length
    /// `N + 1 ≥ 3` and contain only finite values.
    pub fn new(a: Vec<Cplx<T>>, b: Vec<Cplx<T>>, t: T) -> Result<Self> {
        if a.len() != b.len() {
            return Err(Error::DimensionMismatch { expected: a.len(), got: b.len() });
        }
        let cells = a.len();
        if cells < 3 || cells.is_multiple_of(2) {
            return Err(Error::BadSize { cells, reason: "need an odd number of cells, at least 3".into() });
        }
        let field = Self { a, b, t };
        if let Some(n) = field.first_non_finite() {
            return Err(Error::NonFinite { t: t.to_f64().unwrap_or(f64::NAN), cell: n });
        }
        Ok(field)
    }

    /// Builds a field from a function of the cell index `n`.
    pub fn from_fn(big_n: usize, t: T, mut f: impl FnMut(isize) -> (Cplx<T>, Cplx<T>)) -> Result<Self> {
        let half = (big_n / 2) as isize;
        let (a, b) = (-half..=half).map(&mut f).unzip();
        Self::new(a, b, t)
    }

    pub fn a(&self) -> &[Cplx<T>] {
        &self.a
    }
    pub fn b(&self) -> &[Cplx<T>] {
        &self.b
    }
    pub fn t(&self) -> T {
        self.t
    }

    /// Number of cells, `N + 1`.
    pub fn cells(&self) -> usize {
        self.a.len()
    }

    /// `N / 2`, the largest cell index.
    pub fn half(&self) -> isize {
        (self.a.len() / 2) as isize
    }

    /// Array position of cell `n`, if it exists.
    pub fn index(&self, n: isize) -> Option<usize> {
        let half = self.half();
        (-half..=half).contains(&n).then(|| (n + half) as usize)
    }

    /// `|a_n|² + |b_n|²`.
    pub fn intensity_at(&self, n: isize) -> Option<T> {
        self.index(n).map(|i| self.a[i].norm_sqr() + self.b[i].norm_sqr())
    }

    /// `Σ_n |a_n|² + |b_n|²`.
    pub fn total_intensity(&self) -> T {
        self.a.iter().chain(&self.b).map(|z| z.norm_sqr()).sum()
    }

    /// Largest amplitude difference against another field on the same cells.
    pub fn max_abs_diff(&self, other: &Self) -> T {
        self.a
            .iter()
            .zip(&other.a)
            .chain(self.b.iter().zip(&other.b))
            .map(|(x, y)| (*x - *y).norm())
            .fold(T::zero(), T::max)
    }

    /// Share of the total intensity in the outermost `width` cells on each side.
    pub fn edge_fraction(&self, width: usize) -> T {
        let total = self.total_intensity();
        if total == T::zero() {
            return T::zero();
        }
        let len = self.cells();
        let width = width.min(len / 2);
        let edge: T = (0..width)
            .chain(len - width..len)
            .map(|i| self.a[i].norm_sqr() + self.b[i].norm_sqr())
            .sum();
        edge / total
    }

    fn first_non_finite(&self) -> Option<isize> {
        let half = self.half();
        self.a
            .iter()
            .zip(&self.b)
            .position(|(x, y)| !(x.re.is_finite() && x.im.is_finite() && y.re.is_finite() && y.im.is_finite()))
            .map(|i| i as isize - half)
    }

    fn to_state(&self) -> Vec<Cplx<T>> {
        self.a.iter().chain(&self.b).copied().collect()
    }

    fn from_state(state: &[Cplx<T>], t: T) -> Self {
        let l = state.len() / 2;
        Self { a: state[..l].to_vec(), b: state[l..].to_vec(), t }
    }
}

/// Gaussian packet `a_n = exp(−2(n/w)² + i q₀ n)`, `b_n = 0`, on `N + 1`
/// cells. No normalization is applied.
pub fn gaussian_packet<T: Real>(big_n: usize, w: T, q0: T) -> Result<WavePacketField<T>> {
    if !(w > T::zero() && w.is_finite()) {
        return Err(Error::invalid("w", format!("packet width must be positive, got {w}")));
    }
    if !q0.is_finite() {
        return Err(Error::invalid("q0", "must be finite"));
    }
    if big_n % 2 == 1 {
        return Err(Error::BadSize { cells: big_n + 1, reason: "N must be even so that cells run from −N/2 to N/2".into() });
    }
    if T::from_count(big_n) < T::lit(4.0) * w || big_n < 2 {
        return Err(Error::BadSize { cells: big_n + 1, reason: format!("N must be at least 4w = {}", T::lit(4.0) * w) });
    }
    WavePacketField::from_fn(big_n, T::zero(), |n| {
        let x = T::from_isize(n).expect("cell index") / w;
        let phase = q0 * T::from_isize(n).expect("cell index");
        (expi(phase) * (-T::lit(2.0) * x * x).exp(), real(T::zero()))
    })
}

/// Treatment of hoppings that reach past the last cell.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Boundary {
    /// Hard walls: links leaving the array are dropped.
    #[default]
    Open,
    /// Ring: cell `N/2` couples back to cell `−N/2`.
    Periodic,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EvolveOptions<T> {
    /// Largest allowed time step; the actual step divides the interval evenly.
    pub dt: T,
    pub boundary: Boundary,
    /// Keep a snapshot every `snapshot_stride` steps (0 keeps only the
    /// initial and final fields).
    pub snapshot_stride: usize,
}

impl<T: Real> EvolveOptions<T> {
    pub fn new(dt: T) -> Self {
        Self { dt, boundary: Boundary::Open, snapshot_stride: 0 }
    }
}

/// Result of a time integration.
#[derive(Clone, Debug, PartialEq)]
pub struct Evolution<T> {
    pub field: WavePacketField<T>,
    /// Time-ordered snapshots, including the initial and final fields.
    pub snapshots: Vec<WavePacketField<T>>,
    pub steps: usize,
    /// Step actually used.
    pub dt: T,
    /// Set when more than `1e−6` of the intensity reached the outer five
    /// cells at any recorded time (open boundaries only).
    pub boundary_warning: bool,
}

/// Amplitudes above this magnitude abort the run.
pub const OVERFLOW_GUARD: f64 = 1e150;
const EDGE_CELLS: usize = 5;
const EDGE_FRACTION: f64 = 1e-6;

/// Coefficients of one lattice step of the coupled-mode equations:
/// `i ȧ_n = −intra_ab b_n − inter_ab b_{n−1} − fwd a_{n+1} − bwd a_{n−1} + (ig − tilt·n) a_n`
/// and the mirror equation for `b_n` (loss, extra `−b_offset` on-site term).
#[derive(Clone, Copy, Debug)]
struct Hopping<T> {
    intra_ab: Cplx<T>,
    inter_ab: Cplx<T>,
    intra_ba: Cplx<T>,
    inter_ba: Cplx<T>,
    fwd: Cplx<T>,
    bwd: Cplx<T>,
    g: T,
    tilt: T,
    b_offset: T,
}

impl<T: Real> Hopping<T> {
    fn stat(p: &LatticeParams<T>) -> Self {
        Self {
            intra_ab: real(p.kappa()),
            inter_ab: real(p.sigma()),
            intra_ba: real(p.kappa()),
            inter_ba: real(p.sigma()),
            fwd: expi(p.phi()) * p.rho(),
            bwd: expi(-p.phi()) * p.rho(),
            g: p.g(),
            tilt: T::zero(),
            b_offset: T::zero(),
        }
    }

    fn gauge(d: &DriveParams<T>, t: T) -> Self {
        let (f, g, h) = gauge_coefficients(d, t);
        Self {
            intra_ab: f * d.kappa1(),
            inter_ab: g * d.kappa2(),
            intra_ba: f.conj() * d.kappa1(),
            inter_ba: g.conj() * d.kappa2(),
            fwd: h * d.kappa3(),
            bwd: h.conj() * d.kappa3(),
            g: d.g(),
            tilt: T::zero(),
            b_offset: T::zero(),
        }
    }

    fn lab(d: &DriveParams<T>, t: T) -> Self {
        let (fx, fy) = d.forces(t);
        Self {
            intra_ab: real(d.kappa1()),
            inter_ab: real(d.kappa2()),
            intra_ba: real(d.kappa1()),
            inter_ba: real(d.kappa2()),
            fwd: real(d.kappa3()),
            bwd: real(d.kappa3()),
            g: d.g(),
            tilt: fx + fy,
            b_offset: fx,
        }
    }

    /// `dy = −i H y` for the stacked state `y = (a, b)`.
    fn apply(&self, boundary: Boundary, y: &[Cplx<T>], dy: &mut [Cplx<T>]) {
        let l = y.len() / 2;
        let (a, b) = y.split_at(l);
        let half = (l / 2) as isize;
        let zero = cplx(T::zero(), T::zero());
        let periodic = boundary == Boundary::Periodic;
        let prev = |i: usize| if i > 0 { Some(i - 1) } else if periodic { Some(l - 1) } else { None };
        let next = |i: usize| if i + 1 < l { Some(i + 1) } else if periodic { Some(0) } else { None };
        let minus_i = cplx(T::zero(), -T::one());
        let ig = cplx(T::zero(), self.g);
        for i in 0..l {
            let n = T::from_isize(i as isize - half).expect("cell index");
            let (p, q) = (prev(i), next(i));
            let a_next = q.map_or(zero, |j| a[j]);
            let a_prev = p.map_or(zero, |j| a[j]);
            let b_next = q.map_or(zero, |j| b[j]);
            let b_prev = p.map_or(zero, |j| b[j]);
            let ha = -(self.intra_ab * b[i] + self.inter_ab * b_prev + self.fwd * a_next + self.bwd * a_prev)
                + (ig - real(self.tilt * n)) * a[i];
            let hb = -(self.intra_ba * a[i] + self.inter_ba * a_next + self.fwd * b_next + self.bwd * b_prev)
                - (ig + real(self.tilt * n + self.b_offset)) * b[i];
            dy[i] = minus_i * ha;
            dy[l + i] = minus_i * hb;
        }
    }
}

fn check_times<T: Real>(field: &WavePacketField<T>, t_end: T, dt: T) -> Result<()> {
    if !(dt > T::zero() && dt.is_finite()) {
        return Err(Error::invalid("dt", format!("must be positive and finite, got {dt}")));
    }
    if !(t_end.is_finite() && t_end >= field.t) {
        return Err(Error::invalid("t_end", format!("must be finite and >= t = {}, got {t_end}", field.t)));
    }
    Ok(())
}

fn integrate<T: Real>(
    field: &WavePacketField<T>,
    t_end: T,
    opts: &EvolveOptions<T>,
    mut hopping_at: impl FnMut(T) -> Hopping<T>,
) -> Result<Evolution<T>> {
    check_times(field, t_end, opts.dt)?;
    let span = t_end - field.t;
    let steps = (span / opts.dt - T::lit(1e-9)).ceil().max(T::zero()).to_usize().unwrap_or(0);
    let h = if steps == 0 { T::zero() } else { span / T::from_count(steps) };
    let mut y = field.to_state();
    let mut rk = Rk4::new(y.len());
    let boundary = opts.boundary;
    let mut rhs = |t: T, y: &[Cplx<T>], dy: &mut [Cplx<T>]| hopping_at(t).apply(boundary, y, dy);
    let guard = T::lit(OVERFLOW_GUARD * OVERFLOW_GUARD);
    let half = field.half();
    let mut snapshots = vec![field.clone()];
    let mut warned = false;
    let edge_check = |f: &WavePacketField<T>, warned: &mut bool| {
        if boundary == Boundary::Open && !*warned && f.edge_fraction(EDGE_CELLS) > T::lit(EDGE_FRACTION) {
            log::warn!("wave packet reached the lattice edge by t = {}; enlarge N", f.t);
            *warned = true;
        }
    };
    edge_check(field, &mut warned);

    for k in 0..steps {
        let t = field.t + h * T::from_count(k);
        rk.step(&mut rhs, t, h, &mut y);
        let t_next = if k + 1 == steps { t_end } else { field.t + h * T::from_count(k + 1) };
        for (i, z) in y.iter().enumerate() {
            let m = z.norm_sqr();
            if !m.is_finite() {
                let cell = (i % (y.len() / 2)) as isize - half;
                return Err(Error::NonFinite { t: t_next.to_f64().unwrap_or(f64::NAN), cell });
            }
            if m > guard {
                return Err(Error::Overflow {
                    t: t_next.to_f64().unwrap_or(f64::NAN),
                    magnitude: m.sqrt().to_f64().unwrap_or(f64::INFINITY),
                });
            }
        }
        let keep = k + 1 == steps || (opts.snapshot_stride > 0 && (k + 1) % opts.snapshot_stride == 0);
        if keep {
            let snap = WavePacketField::from_state(&y, t_next);
            edge_check(&snap, &mut warned);
            snapshots.push(snap);
        }
    }
    let final_field = if steps == 0 { field.clone() } else { WavePacketField::from_state(&y, t_end) };
    Ok(Evolution { field: final_field, snapshots, steps, dt: h, boundary_warning: warned })
}

/// Advances `field` to `t_end` on the static lattice with open boundaries.
pub fn evolve_static<T: Real>(
    params: &LatticeParams<T>,
    field: &WavePacketField<T>,
    t_end: T,
    dt: T,
) -> Result<WavePacketField<T>> {
    evolve_static_with(params, field, t_end, &EvolveOptions::new(dt)).map(|e| e.field)
}

pub fn evolve_static_with<T: Real>(
    params: &LatticeParams<T>,
    field: &WavePacketField<T>,
    t_end: T,
    opts: &EvolveOptions<T>,
) -> Result<Evolution<T>> {
    let hop = Hopping::stat(params);
    integrate(field, t_end, opts, |_| hop)
}

fn check_drive_step<T: Real>(drive: &DriveParams<T>, dt: T) -> Result<()> {
    let limit = drive.period() / T::lit(200.0);
    if dt > limit * (T::one() + T::lit(1e-12)) {
        return Err(Error::invalid("dt", format!("must resolve the drive: dt <= T/200 = {limit}, got {dt}")));
    }
    Ok(())
}

/// Advances a gauge-frame field `(a_n, b_n)` of the driven lattice to
/// `t_end` with open boundaries. Intensities coincide with the lab frame.
pub fn evolve_driven<T: Real>(
    drive: &DriveParams<T>,
    field: &WavePacketField<T>,
    t_end: T,
    dt: T,
) -> Result<WavePacketField<T>> {
    evolve_driven_with(drive, field, t_end, &EvolveOptions::new(dt)).map(|e| e.field)
}

pub fn evolve_driven_with<T: Real>(
    drive: &DriveParams<T>,
    field: &WavePacketField<T>,
    t_end: T,
    opts: &EvolveOptions<T>,
) -> Result<Evolution<T>> {
    check_drive_step(drive, opts.dt)?;
    integrate(field, t_end, opts, |t| Hopping::gauge(drive, t))
}

/// Integrates the waveguide amplitudes `(A_n, B_n)` directly, with the
/// forces entering as the on-site ramp `−(F_x + F_y) n` and the extra
/// `−F_x` on `B_n`. Stiff for large `N Γ ω`; mainly a cross-check of
/// [`evolve_driven_with`].
pub fn evolve_driven_lab_with<T: Real>(
    drive: &DriveParams<T>,
    field: &WavePacketField<T>,
    t_end: T,
    opts: &EvolveOptions<T>,
) -> Result<Evolution<T>> {
    check_drive_step(drive, opts.dt)?;
    integrate(field, t_end, opts, |t| Hopping::lab(drive, t))
}

/// Maps gauge-frame amplitudes at time `field.t()` to the waveguide
/// amplitudes `A_n = a_n e^{i n (φ + Φ(t))}`, `B_n = b_n e^{i n (φ + Φ(t)) + iβ + iΘ(t)}`.
pub fn to_lab_frame<T: Real>(drive: &DriveParams<T>, field: &WavePacketField<T>) -> WavePacketField<T> {
    let t = field.t;
    let (phi_cap, theta) = drive.gauge_phases(t);
    let ramp = drive.raw_effective_phase() + phi_cap;
    let offset = drive.beta() + theta;
    let half = field.half();
    let mut out = field.clone();
    for i in 0..field.cells() {
        let n = T::from_isize(i as isize - half).expect("cell index");
        let pa = expi(ramp * n);
        out.a[i] = field.a[i] * pa;
        out.b[i] = field.b[i] * pa * expi(offset);
    }
    out
}
