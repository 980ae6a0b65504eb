//! Forward-Euler / midpoint-quadrature solver for linear nonlocal diffusion
//! `u_t = ∫ J(x−y)(u(y)−u(x)) dy` on the 1-periodic interval, with spectral
//! diagnostics and exact Fourier-series references.

pub mod analysis;
pub mod cli;
pub mod config;
pub mod error;
pub mod exact;
pub mod io;
pub mod kernels;
pub mod quadrature;
pub mod scheme;
pub mod spectral;

pub use analysis::{
    aliasing_exponent, convergence_sweep, critical_timestep, error_at, fit_rate, norm_monotonicity_probe, Axis,
    ConvergenceRecord, RateFit, StabilityReport,
};
pub use error::{Error, Result};
pub use exact::{exact_at, semidiscrete_exact, sobolev_norm, ExactSolution, InitialData, InitialFamily};
pub use kernels::{check_assumptions, periodize, AssumptionReport, CustomKernel, InfiniteKernel, PeriodicKernel};
pub use scheme::{amplification_factor, euler_step, run, spectral_evolve, EvolutionResult, RhsPath, SchemeConfig};
pub use spectral::{dft, discrete_norm, idft, GridFunction, SpectralField};
