//! Dense and sparse Hermitian linear algebra for signature computations.
//!
//! The factorization route (Bunch–Kaufman, block LDLᴴ) is hand written; LAPACK
//! serves as the independent eigenvalue route and for singular value decompositions.

extern crate openblas_src;

pub mod blocktri;
pub mod bunch_kaufman;
pub mod dense;
pub mod error;
pub mod inertia;
pub mod lanczos;
pub mod mm;
pub mod rcm;
pub mod scalar;
pub mod sparse;

pub use blocktri::BlockLdl;
pub use bunch_kaufman::BunchKaufman;
pub use dense::{congruence_diag, cre, gemm, gemm_new, DMat, Op};
pub use error::{LinalgError, Result};
pub use inertia::{eigenvalues, inertia_eigen, inertia_factor, Backend, HermOp, Inertia, InertiaReport};
pub use scalar::{Real, C};
pub use sparse::Csr;

pub type DMat64 = DMat<f64>;
pub type Csr64 = Csr<f64>;
pub type HermOp64 = HermOp<f64>;
pub type C64 = C<f64>;
