//! Dimerized PT-symmetric photonic lattices with complex next-nearest
//! hopping: Bloch bands, convective and absolute instability, wave-packet
//! propagation, Floquet analysis of the driven lattice and finite-lattice
//! spectra.
//!
//! Everything except the dense eigensolver is generic over `f32`/`f64`; the
//! aliases below fix the scalar to `f64` (or `f32`) for convenience.

pub mod error;
pub mod floquet;
pub mod instability;
pub mod lattice;
mod ode;
pub mod output;
pub mod propagator;
pub mod scalar;
pub mod spectrum;

pub use error::{Error, Result};
pub use floquet::{quasi_energies, rwa_params, DriveParams, QuasiEnergyBand};
pub use instability::{classify, ClassificationReport, Method, Regime};
pub use lattice::{dispersion, Branch, LatticeParams};
pub use propagator::{evolve_driven, evolve_static, gaussian_packet, ring_oracle, Boundary, WavePacketField};
pub use scalar::{Cplx, Real};
pub use spectrum::{build_hamiltonian, spectrum, ComplexSpectrum, GainProfile};

pub type LatticeParams64 = LatticeParams<f64>;
pub type LatticeParams32 = LatticeParams<f32>;
pub type DriveParams64 = DriveParams<f64>;
pub type DriveParams32 = DriveParams<f32>;
pub type WavePacketField64 = WavePacketField<f64>;
pub type WavePacketField32 = WavePacketField<f32>;
pub type QuasiEnergyBand64 = QuasiEnergyBand<f64>;
pub type ClassificationReport64 = ClassificationReport<f64>;
pub type Complex64 = Cplx<f64>;
