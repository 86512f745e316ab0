//! Two-qubit state analysis: entanglement tests, local filtering protocols,
//! constrained state reconstruction, and the accompanying no-go and
//! multi-copy constructions.
//!
//! Everything is generic over the real scalar `T: Real`; the `*F64`
//! aliases at the crate root cover the common case.

pub mod entanglement;
pub mod error;
pub mod extendibility;
pub mod families;
pub mod filter;
pub mod linalg;
pub mod metrics;
pub mod multicopy;
pub mod nogo;
pub mod optim;
pub mod random;
pub mod reconstruction;
pub mod scalar;
pub mod state;

pub use error::{Error, Result};
pub use linalg::{CMatrix, Subsystem};
pub use scalar::Real;
pub use state::{DensityMatrix, MatrixJson, Observable, PauliVector};

pub type DensityMatrixF64 = DensityMatrix<f64>;
pub type ObservableF64 = Observable<f64>;
pub type CMatrixF64 = CMatrix<f64>;
