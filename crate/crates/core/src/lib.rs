//! Numerical checks that decide whether a phase-space function can be the
//! Wigner distribution of a density operator.
//!
//! The matrix-level machinery ([`symplectic`], [`uncertainty`], [`blobs`]) is
//! generic over the scalar type through [`Real`]; the grid-level machinery
//! (Wigner grids, KLM search, Gaussian domination, fixtures) works in `f64`
//! on one degree of freedom.
//!
//! The checks come in two flavours: necessary conditions that any density
//! operator satisfies (the Robertson–Schrödinger inequalities, the
//! `Σ + iħJ/2 ⪰ 0` condition, finite-order KLM matrices, the symplectic
//! invariant of a dominating Gaussian), and a brute-force ground truth that
//! rebuilds the operator kernel from the grid and diagonalises it.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod blobs;
mod error;
pub mod fixtures;
pub mod hardy;
mod json;
pub mod klm;
mod optim;
mod scalar;
pub mod states;
pub mod symplectic;
pub mod uncertainty;

pub use nalgebra;

pub use error::{Error, Result};
pub use scalar::Real;

pub use analysis::{AnalysisOptions, Classification, PositivityReport, StateSpec};
pub use blobs::{BlobSpec, EllipsoidSpec};
pub use hardy::{DominationCertificate, HardyFit, Theorem1Verdict};
pub use klm::{KlmMatrix, KlmPointSet, KlmReport};
pub use states::{AxisGrid, KernelMatrix, MixtureSpec, PureState, WaveFunctionGrid, WignerGrid};
pub use symplectic::{
    PhaseSpaceContext, PhaseSpacePoint, SymplecticMatrix, SymplecticSpectrum, WilliamsonFactorization,
};
pub use uncertainty::{CovarianceMatrix, UncertaintyReport, Verdict};

/// Double-precision phase-space context.
pub type Context = PhaseSpaceContext<f64>;
/// Double-precision phase-space point.
pub type Point = PhaseSpacePoint<f64>;
/// Double-precision covariance matrix.
pub type Covariance = CovarianceMatrix<f64>;
/// Double-precision symplectic matrix.
pub type Symplectic = SymplecticMatrix<f64>;
/// Double-precision symplectic spectrum.
pub type Spectrum = SymplecticSpectrum<f64>;
/// Double-precision Williamson factorization.
pub type Williamson = WilliamsonFactorization<f64>;
/// Double-precision ellipsoid.
pub type Ellipsoid = EllipsoidSpec<f64>;
/// Double-precision quantum blob.
pub type Blob = BlobSpec<f64>;

/// Single-precision covariance matrix.
pub type Covariance32 = CovarianceMatrix<f32>;
/// Single-precision symplectic spectrum.
pub type Spectrum32 = SymplecticSpectrum<f32>;
