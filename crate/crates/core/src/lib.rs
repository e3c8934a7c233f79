//! Shift-level model of measurement-based GKP quantum computing on quad-rail-lattice
//! macronode cluster states.
//!
//! Quadratures are ordered `(q₁..q_N, p₁..p_N)` with vacuum variance ½. A Gaussian
//! unitary `U` acts in the Heisenberg picture as `U† x̂ U = S x̂ + d`.

pub mod compiler;
pub mod error;
pub mod gadget;
pub mod gkp;
pub mod linalg;
pub mod montecarlo;
pub mod noise;
pub mod scalar;
pub mod symplectic;

pub use error::{Error, Result};
pub use gadget::{AngleSet, LogicalGate, OutcomePair};
pub use scalar::Scalar;
pub use symplectic::{GaussianOp, GaussianState};

pub type Matrix64 = linalg::Matrix<f64>;
pub type GaussianOp64 = GaussianOp<f64>;
pub type GaussianState64 = GaussianState<f64>;
pub type AngleSet64 = AngleSet<f64>;
pub type ErrorMatrix64 = noise::ErrorMatrix<f64>;
pub type Matrix32 = linalg::Matrix<f32>;
pub type GaussianOp32 = GaussianOp<f32>;
