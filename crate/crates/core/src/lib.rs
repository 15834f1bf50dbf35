//! Finite-mode truncations of the 2D incompressible Euler equations on the
//! torus and the spectra of their linearisation about the steady state
//! `Ω* = 2Γ cos(p·x)`.
//!
//! The linearisation decouples into independent *classes* of Fourier modes
//! `a + k p`. Each class is a small tridiagonal (Galerkin) or cyclic
//! tridiagonal (Zeitlin sine-bracket) system whose spectrum can be computed
//! densely, classified, and in the single-disc-point case certified with an
//! explicit lower bound on the real eigenvalue.
//!
//! Module map:
//!
//! - [`lattice`]: mode lattice, wrapping, the unstable disc, class enumeration.
//! - [`truncation`]: vector fields, Hamiltonian, Jacobians and class matrices.
//! - [`charpoly`]: characteristic-polynomial recurrences and sign certificates.
//! - [`spectra`]: dense spectra, classification, case taxonomy, eigenvector decay.
//! - [`density`]: circulant approximation and the large-N spectral density.
//! - [`ensemble`]: sweeps over all classes of one equilibrium.
//! - [`convergence`]: one class's real eigenvalue as the truncation grows.
//! - [`verify`]: the reproducible check suite used by the CLI and tests.

pub mod lattice;
pub mod truncation;
pub mod charpoly;
pub mod spectra;
pub mod density;
pub mod ensemble;
pub mod convergence;
pub mod verify;

pub use lattice::{ClassDescriptor, Domain, LatticeVector, TruncationKind};
pub use num_complex::Complex64;
