//! Convergence analysis of matrix powers and its application to relaxed
//! alternating projections and Douglas-Rachford iterations on two subspaces.
//!
//! * [`spectral`] decides whether `A^k` converges, computes `A^∞`, the
//!   subdominant modulus `γ(A)` and whether it is the optimal linear rate.
//! * [`subspaces`] handles orthonormal bases, principal angles and the
//!   Friedrichs angle.
//! * [`methods`] builds the iteration operators, predicts their rates and runs
//!   them with a distance-to-intersection stopping rule.
//! * [`bench`] runs categorized random experiments and aggregates iteration counts.

pub mod bench;
pub mod error;
pub mod linalg;
pub mod matrix_io;
pub mod methods;
pub(crate) mod serde_matrix;
pub mod spectral;
pub mod subspaces;

pub use error::{Error, Result};
pub use linalg::{CMatrix, Matrix, Vector};
pub use bench::{BenchmarkTable, CategoryGrid, Cell};
pub use methods::{IterationTrace, LimitTarget, MethodSpec, RatePrediction, Relaxation};
pub use spectral::{ConvergenceReport, ConvergenceStatus, EigenCluster, EigenStructure, Tolerances};
pub use subspaces::{PairGeometry, Subspace};
