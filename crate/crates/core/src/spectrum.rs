//! Finite lattices with a spatially confined gain/loss region.
//!
//! The truncated Hamiltonian on `N + 1` cells is assembled densely in the
//! basis `(a_{−N/2}, b_{−N/2}, a_{−N/2+1}, …)` and diagonalized as a general
//! complex matrix. Every eigenpair is checked against its residual.

use faer::dyn_stack::{MemBuffer, MemStack};
use faer::linalg::evd::{self, ComputeEigenvectors};
use faer::diag::Diag;
use faer::{c64, Mat, Par};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::LatticeParams;
use crate::propagator::Boundary;
use crate::scalar::{cplx, expi, real, Cplx, Real};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ProfileKind {
    Square,
    Smooth,
    Custom,
}

/// Gain/loss rates `g_n` over cells `n = −N/2 … N/2`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GainProfile<T> {
    values: Vec<T>,
    kind: ProfileKind,
}

fn check_even(big_n: usize) -> Result<()> {
    if big_n % 2 == 1 {
        return Err(Error::BadSize { cells: big_n + 1, reason: "N must be even so that cells run from −N/2 to N/2".into() });
    }
    Ok(())
}

fn check_rate<T: Real>(g: T) -> Result<()> {
    if !g.is_finite() || g < T::zero() {
        return Err(Error::invalid("g", format!("must be finite and >= 0, got {g}")));
    }
    Ok(())
}

impl<T: Real> GainProfile<T> {
    /// `g_n = g` for `|n| ≤ N_g/2`, zero elsewhere.
    pub fn square(big_n: usize, n_g: usize, g: T) -> Result<Self> {
        check_even(big_n)?;
        check_rate(g)?;
        if n_g > big_n {
            return Err(Error::invalid("n_g", format!("gain region N_g = {n_g} exceeds N = {big_n}")));
        }
        let half = (big_n / 2) as isize;
        let reach = (n_g / 2) as isize;
        let values = (-half..=half).map(|n| if n.abs() <= reach { g } else { T::zero() }).collect();
        Ok(Self { values, kind: ProfileKind::Square })
    }

    /// Square core of half-width `N_g/2` followed by a raised-cosine ramp
    /// over `ramp` cells on each side.
    pub fn smooth(big_n: usize, n_g: usize, g: T, ramp: T) -> Result<Self> {
        check_even(big_n)?;
        check_rate(g)?;
        if !(ramp > T::zero() && ramp.is_finite()) {
            return Err(Error::invalid("ramp", format!("must be positive, got {ramp}")));
        }
        let half = (big_n / 2) as isize;
        let reach = T::from_count(n_g / 2);
        let values = (-half..=half)
            .map(|n| {
                let x = T::from_isize(n.abs()).expect("cell index") - reach;
                if x <= T::zero() {
                    g
                } else if x >= ramp {
                    T::zero()
                } else {
                    g * T::lit(0.5) * (T::one() + (T::PI() * x / ramp).cos())
                }
            })
            .collect();
        Ok(Self { values, kind: ProfileKind::Smooth })
    }

    /// Arbitrary finite rates, one per cell.
    pub fn custom(values: Vec<T>) -> Result<Self> {
        if let Some(bad) = values.iter().find(|v| !v.is_finite()) {
            return Err(Error::invalid("g_n", format!("entries must be finite, got {bad}")));
        }
        Ok(Self { values, kind: ProfileKind::Custom })
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }
    pub fn kind(&self) -> ProfileKind {
        self.kind
    }
}

/// Row-major dense complex matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct DenseMatrix<T> {
    dim: usize,
    data: Vec<Cplx<T>>,
}

impl<T: Real> DenseMatrix<T> {
    pub fn zeros(dim: usize) -> Self {
        Self { dim, data: vec![cplx(T::zero(), T::zero()); dim * dim] }
    }

    pub fn from_fn(dim: usize, f: impl Fn(usize, usize) -> Cplx<T>) -> Self {
        let data = (0..dim * dim).map(|k| f(k / dim, k % dim)).collect();
        Self { dim, data }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, i: usize, j: usize) -> Cplx<T> {
        self.data[i * self.dim + j]
    }

    fn add(&mut self, i: usize, j: usize, z: Cplx<T>) {
        self.data[i * self.dim + j] = self.data[i * self.dim + j] + z;
    }

    /// Frobenius norm.
    pub fn norm(&self) -> T {
        self.data.iter().map(|z| z.norm_sqr()).sum::<T>().sqrt()
    }

    /// `max |H_ij − conj(H_ji)|`.
    pub fn hermiticity_defect(&self) -> T {
        let mut worst = T::zero();
        for i in 0..self.dim {
            for j in 0..self.dim {
                worst = worst.max((self.get(i, j) - self.get(j, i).conj()).norm());
            }
        }
        worst
    }

    pub fn mul_vec(&self, v: &[Cplx<T>]) -> Vec<Cplx<T>> {
        self.data
            .chunks(self.dim)
            .map(|row| row.iter().zip(v).fold(cplx(T::zero(), T::zero()), |acc, (a, b)| acc + *a * *b))
            .collect()
    }
}

/// Truncated Hamiltonian with open ends.
pub fn build_hamiltonian<T: Real>(params: &LatticeParams<T>, big_n: usize, profile: &GainProfile<T>) -> Result<DenseMatrix<T>> {
    build_hamiltonian_with(params, big_n, profile, Boundary::Open)
}

/// Truncated Hamiltonian; `Boundary::Periodic` closes the chain into a ring.
pub fn build_hamiltonian_with<T: Real>(
    params: &LatticeParams<T>,
    big_n: usize,
    profile: &GainProfile<T>,
    boundary: Boundary,
) -> Result<DenseMatrix<T>> {
    check_even(big_n)?;
    let cells = big_n + 1;
    if profile.values.len() != cells {
        return Err(Error::DimensionMismatch { expected: cells, got: profile.values.len() });
    }
    let mut h = DenseMatrix::zeros(2 * cells);
    let (a, b) = (|i: usize| 2 * i, |i: usize| 2 * i + 1);
    let kappa = real(-params.kappa());
    let sigma = real(-params.sigma());
    let fwd = expi(params.phi()) * -params.rho();
    let ring = boundary == Boundary::Periodic && cells > 1;
    for i in 0..cells {
        let g = profile.values[i];
        h.add(a(i), a(i), cplx(T::zero(), g));
        h.add(b(i), b(i), cplx(T::zero(), -g));
        h.add(a(i), b(i), kappa);
        h.add(b(i), a(i), kappa);
        let next = if i + 1 < cells {
            Some(i + 1)
        } else if ring {
            Some(0)
        } else {
            None
        };
        if let Some(j) = next {
            // a_j couples to b_i (σ link from cell j back to cell i = j − 1).
            h.add(a(j), b(i), sigma);
            h.add(b(i), a(j), sigma);
            // ρe^{iφ} (a_i† a_j + b_i† b_j) + h.c.
            h.add(a(i), a(j), fwd);
            h.add(a(j), a(i), fwd.conj());
            h.add(b(i), b(j), fwd);
            h.add(b(j), b(i), fwd.conj());
        }
    }
    Ok(h)
}

/// Verified eigenvalues of a dense non-Hermitian matrix.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ComplexSpectrum {
    /// Sorted by real part, then imaginary part.
    pub eigenvalues: Vec<Cplx<f64>>,
    /// Largest `‖Hv − Ev‖ / ‖v‖` over all eigenpairs.
    pub max_residual: f64,
    /// Frobenius norm of the matrix.
    pub matrix_norm: f64,
    pub max_abs_imag: f64,
    /// Largest distance from an eigenvalue to the nearest conjugate of an
    /// eigenvalue.
    pub pairing_defect: f64,
}

/// Relative residual bound accepted by [`spectrum`].
pub const RESIDUAL_BOUND: f64 = 1e-8;

/// All eigenvalues of `matrix`, each checked to satisfy
/// `‖Hv − Ev‖ ≤ 1e−8 ‖H‖ ‖v‖`.
pub fn spectrum(matrix: &DenseMatrix<f64>) -> Result<ComplexSpectrum> {
    let n = matrix.dim();
    if n == 0 {
        return Err(Error::BadSize { cells: 0, reason: "empty matrix".into() });
    }
    let (s, u) = eigen_sequential(matrix)?;
    let norm = matrix.norm();
    let bound = RESIDUAL_BOUND * norm.max(f64::MIN_POSITIVE);
    let mut max_residual = 0.0_f64;
    let mut eigenvalues = Vec::with_capacity(n);
    for k in 0..n {
        let lambda = s[k];
        if !(lambda.re.is_finite() && lambda.im.is_finite()) {
            return Err(Error::EigenFailure(format!("eigenvalue {k} is not finite")));
        }
        let v: Vec<Cplx<f64>> = (0..n).map(|i| u[(i, k)]).collect();
        let hv = matrix.mul_vec(&v);
        let vn = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        let rn = hv.iter().zip(&v).map(|(x, y)| (x - y * lambda).norm_sqr()).sum::<f64>().sqrt();
        let residual = rn / vn;
        if residual.is_nan() || residual > bound {
            return Err(Error::ResidualTooLarge { index: k, residual, bound });
        }
        max_residual = max_residual.max(residual);
        eigenvalues.push(lambda);
    }
    eigenvalues.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    let max_abs_imag = eigenvalues.iter().map(|e| e.im.abs()).fold(0.0, f64::max);
    let pairing_defect = pairing_defect(&eigenvalues);
    Ok(ComplexSpectrum { eigenvalues, max_residual, matrix_norm: norm, max_abs_imag, pairing_defect })
}

/// Right eigenpairs from a single-threaded decomposition, so the result does
/// not depend on the thread pool.
fn eigen_sequential(matrix: &DenseMatrix<f64>) -> Result<(Diag<c64>, Mat<c64>)> {
    let n = matrix.dim();
    let a = Mat::<c64>::from_fn(n, n, |i, j| matrix.get(i, j));
    let mut s = Diag::<c64>::zeros(n);
    let mut u = Mat::<c64>::zeros(n, n);
    let params = Default::default();
    let req = evd::evd_scratch::<c64>(n, ComputeEigenvectors::No, ComputeEigenvectors::Yes, Par::Seq, params);
    let mut buf = MemBuffer::new(req);
    evd::evd_cplx(a.as_ref(), s.as_mut(), None, Some(u.as_mut()), Par::Seq, MemStack::new(&mut buf), params)
        .map_err(|e| Error::EigenFailure(format!("{e:?}")))?;
    Ok((s, u))
}

/// `max_k min_j |λ_k − conj(λ_j)|` for a list sorted by real part.
fn pairing_defect(sorted: &[Cplx<f64>]) -> f64 {
    let mut worst = 0.0_f64;
    for z in sorted {
        let target = z.conj();
        // Scan outwards from the insertion point until real parts alone
        // exceed the best distance found.
        let start = sorted.partition_point(|w| w.re < target.re);
        let mut best = f64::INFINITY;
        for w in sorted[start..].iter() {
            if w.re - target.re > best {
                break;
            }
            best = best.min((w - target).norm());
        }
        for w in sorted[..start].iter().rev() {
            if target.re - w.re > best {
                break;
            }
            best = best.min((w - target).norm());
        }
        worst = worst.max(best);
    }
    worst
}
