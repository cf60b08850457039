//! Small-amplitude periodic traveling waves of the Caudrey–Dodd–Gibbon–Sawada–Kotera
//! equation
//!
//! ```text
//! u_t + u_xxxxx + 15 (u u_xx + u^3)_x = 0
//! ```
//!
//! and their spectral stability under Bloch–Floquet perturbations.
//!
//! * [`fourier`]: truncated Fourier series on the 2π-torus.
//! * [`profile`]: traveling-wave profiles, closed-form asymptotics and a
//!   Fourier–Galerkin Newton solver.
//! * [`bloch`]: Hill's-method matrices of the Bloch-shifted linearization,
//!   their spectra and the stability verdict over a Floquet grid.
//! * [`reduced`]: the rank-three spectral projector near the origin, the
//!   transported basis, the reduced 3×3 matrix and its characteristic cubic.
//! * [`evolve`]: an integrating-factor Runge–Kutta solver for the PDE in the
//!   co-moving frame.
//!
//! The crate is `no_std` and only needs an allocator.

#![no_std]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod bloch;
pub mod evolve;
pub mod fourier;
pub mod linalg;
pub mod profile;
pub mod reduced;

pub use bloch::{BlochMatrix, SpectrumSlice, StabilityReport, Verdict, XiGrid};
pub use fourier::{FourierSeries, Parity, ProductMode};
pub use num_complex::Complex64;
pub use profile::WaveProfile;
pub use reduced::{ProjectorMethod, ProjectorPair, ReducedModel};
