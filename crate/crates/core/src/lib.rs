//! Numerical core for a family of quantum amplifier models and their
//! classical counterparts.
//!
//! The crate is organised bottom-up:
//!
//! - [`fockspace`]: dense operators on truncated single- and two-mode Fock
//!   spaces (annihilation, quadratures, tensor embedding, expectation values).
//! - [`lindblad`]: GKSL master equations `d rho/dt = -i[H, rho] + sum_k
//!   kappa_k D[J_k](rho)`, their adjoint (Heisenberg) generators, fixed-step
//!   RK4 evolution, and direct steady-state solves.
//! - [`slle`]: the averaged spin-lattice amplifier model, expressed as a
//!   four-dissipator Lindblad realisation with linear gain/loss and
//!   two-photon gain/loss channels, plus its mean-amplitude equation.
//! - [`sde`]: classical counterparts — the Stuart-Landau oscillator and the
//!   quasilinear amplifier SDE with Ito/Stratonovich stepping and
//!   reproducible parallel ensembles.
//! - [`vdp`]: the van der Pol oscillator, the two-oscillator Hamiltonian
//!   that embeds it, and quantised commutator checks of that embedding.
//!
//! All matrices are dense (`nalgebra::DMatrix<Complex64>`); truncation
//! dimensions beyond ~60 for one mode or ~30 per mode for two are outside
//! the intended regime. hbar = 1 throughout.

pub mod fockspace;
pub mod lindblad;
pub mod sde;
pub mod slle;
pub mod vdp;

mod error;

pub use error::{Error, Result};
