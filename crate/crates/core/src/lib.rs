//! # sublab
//!
//! A desk-scale laboratory for subordinated diffusions and their empirical
//! measures.
//!
//! The library simulates a reversible diffusion on a built-in model space
//! (circle, torus, reflected interval, a line with a confining potential, or
//! an Ornstein–Uhlenbeck process), time-changes it by a Lévy subordinator
//! with a chosen Laplace exponent, and measures how fast the time-averaged
//! empirical measure of the time-changed process approaches the invariant
//! measure in Wasserstein-type distances.
//!
//! ## Modules
//!
//! | Module | Provides |
//! |--------|----------|
//! | [`bernstein`] | Laplace exponents (Bernstein functions), growth-class verdicts |
//! | [`subordinator`] | Exact samplers for subordinator paths, Laplace-transform audits |
//! | [`diffusion`] | Model spaces, Euler–Maruyama stepping, invariant-measure sampling |
//! | [`pathlab`] | Time-changed paths, empirical measures, eigenfunction averages |
//! | [`transport`] | Wasserstein and truncated-Wasserstein solvers with brute-force oracles |
//! | [`spectral`] | Eigendata, heat kernels, trace functionals, spectral limit sums |
//! | [`harness`] | Replicated experiments, rate fits, sandwich and lower-bound checks |
//!
//! All sampling is pure given an explicit seed: replicas use independent
//! counter-based streams, so results are reproducible bit for bit across
//! thread schedules.

use thiserror::Error;

pub mod bernstein;
pub mod diffusion;
pub mod harness;
pub mod numerics;
pub mod pathlab;
pub mod spectral;
pub mod subordinator;
pub mod transport;

pub use bernstein::BernsteinFunction;
pub use diffusion::{ModelSpace, Point};
pub use pathlab::{DiscreteMeasure, SubordinatedPath};
pub use spectral::SpectralData;
pub use subordinator::SubordinatorPath;

/// Error variants shared across the crate.
#[derive(Debug, Error)]
pub enum Error {
    /// Input outside the mathematical domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// A requested combination (family, method, cost, ...) is not supported.
    #[error("unsupported: {0}")]
    Unsupported(String),

    /// Adaptive quadrature or a series truncation failed to reach the target.
    #[error("numerical tolerance not reached: {0}")]
    Tolerance(String),

    /// A simulated state left the representable range (potential blow-up).
    #[error("non-finite state at clock {clock}: {detail}")]
    NonFinite { clock: f64, detail: String },

    /// Operation requires an explicit spectrum the model does not have.
    #[error("model has no explicit spectrum")]
    MissingSpectrum,

    /// Discretization grids disagree where they must align.
    #[error("grid misalignment: {0}")]
    GridMisaligned(String),

    /// A prerequisite verdict or certification is missing or negative.
    #[error("prerequisite not satisfied: {0}")]
    Prerequisite(String),

    /// Configuration rejected before any simulation ran.
    #[error("invalid configuration: {0}")]
    Config(String),
}

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;
