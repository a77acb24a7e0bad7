use super::WavePacketField;
use crate::error::{Error, Result};
use crate::lattice::{bloch_eigenvector, dispersion, Branch, LatticeParams};
use crate::scalar::{cplx, expi, real, Cplx, Real};

/// `exp(−i h(q) t)` from `h = c·1 + K`, `K² = R·1`.
fn bloch_propagator<T: Real>(params: &LatticeParams<T>, q: T, t: T) -> [[Cplx<T>; 2]; 2] {
    let h = params.bloch_hamiltonian(q);
    let c = (h[0][0] + h[1][1]) * T::lit(0.5);
    let k = [[h[0][0] - c, h[0][1]], [h[1][0], h[1][1] - c]];
    let root = real(params.radicand(q)).sqrt();
    let x = root * t;
    let cos = x.cos();
    // sin(x)/root, with the series limit t(1 − x²/6) near the touching point.
    let sinc = if x.norm() < T::lit(1e-6) {
        (real(T::one()) - x * x / T::lit(6.0)) * t
    } else {
        x.sin() / root
    };
    let phase = (cplx(T::zero(), -T::one()) * c * t).exp();
    let mi = cplx(T::zero(), -T::one());
    [
        [phase * (cos + mi * sinc * k[0][0]), phase * mi * sinc * k[0][1]],
        [phase * mi * sinc * k[1][0], phase * (cos + mi * sinc * k[1][1])],
    ]
}

/// Exact evolution over time `t` on a ring of `N + 1` cells.
///
/// The field is Fourier transformed onto `q_m = 2πm/(N+1)`, each component
/// is expanded in the two Bloch eigenvectors, advanced by `e^{−iE±(q_m)t}`
/// and transformed back. Where the two eigenvectors are nearly parallel
/// (an exceptional point of the Bloch matrix) the 2×2 propagator is applied
/// in closed form instead.
pub fn ring_oracle<T: Real>(params: &LatticeParams<T>, field0: &WavePacketField<T>, t: T) -> Result<WavePacketField<T>> {
    if !t.is_finite() {
        return Err(Error::invalid("t", "must be finite"));
    }
    let l = field0.cells();
    let half = field0.half();
    let lf = T::from_count(l);
    let cells: Vec<T> = (0..l).map(|i| T::from_isize(i as isize - half).expect("cell index")).collect();

    let mut spectral = Vec::with_capacity(l);
    for m in 0..l {
        let q = T::TAU() * T::from_count(m) / lf;
        let mut ah = cplx(T::zero(), T::zero());
        let mut bh = ah;
        for (i, &n) in cells.iter().enumerate() {
            let w = expi(-q * n);
            ah = ah + field0.a()[i] * w;
            bh = bh + field0.b()[i] * w;
        }
        let unit = |v: [Cplx<T>; 2]| {
            let norm = (v[0].norm_sqr() + v[1].norm_sqr()).sqrt();
            [v[0] / norm, v[1] / norm]
        };
        let vp = unit(bloch_eigenvector(params, q, Branch::Plus));
        let vm = unit(bloch_eigenvector(params, q, Branch::Minus));
        let det = vp[0] * vm[1] - vm[0] * vp[1];
        let evolved = if det.norm() > T::lit(1e-8) {
            let cp = (ah * vm[1] - vm[0] * bh) / det;
            let cm = (vp[0] * bh - ah * vp[1]) / det;
            let (ep, em) = dispersion(params, q);
            let mi = cplx(T::zero(), -T::one());
            let cp = cp * (mi * ep * t).exp();
            let cm = cm * (mi * em * t).exp();
            [cp * vp[0] + cm * vm[0], cp * vp[1] + cm * vm[1]]
        } else {
            let u = bloch_propagator(params, q, t);
            [u[0][0] * ah + u[0][1] * bh, u[1][0] * ah + u[1][1] * bh]
        };
        spectral.push((q, evolved));
    }

    let mut a = Vec::with_capacity(l);
    let mut b = Vec::with_capacity(l);
    for &n in &cells {
        let mut sa = cplx(T::zero(), T::zero());
        let mut sb = sa;
        for (q, v) in &spectral {
            let w = expi(*q * n);
            sa = sa + v[0] * w;
            sb = sb + v[1] * w;
        }
        a.push(sa / lf);
        b.push(sb / lf);
    }
    WavePacketField::new(a, b, field0.t() + t)
}
