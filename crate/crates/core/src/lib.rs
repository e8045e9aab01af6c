//! Sparse linear algebra on host devices.
//!
//! Matrices, preconditioners and Krylov solvers all implement the
//! [`LinOp`] contract, so they compose freely: a solver takes any operator as
//! its system matrix and any operator as its preconditioner. Solvers can be
//! built directly or from a JSON configuration tree via [`config`].
//!
//! ```
//! use sparsekit::prelude::*;
//!
//! let dev = create_device("reference", 0, None).unwrap();
//! let a = sparsekit::gen::laplacian_2d::<f64, i32>(&dev, 8).unwrap();
//! let n = a.rows();
//! let b = dense_create(&dev, n, 1, 1.0);
//! let mut x = dense_create(&dev, n, 1, 0.0);
//!
//! let ilu = std::sync::Arc::new(Ilu::new(&a).unwrap());
//! let params = SolverParams::new(1000, 1e-6).krylov_dim(30).preconditioner(ilu);
//! let log = gmres_solve(std::sync::Arc::new(a), &b, &mut x, &params).unwrap();
//! assert!(log.converged);
//! ```

pub mod config;
pub mod dense;
pub mod device;
pub mod error;
pub mod gen;
pub mod linop;
pub mod mmio;
pub mod precond;
pub mod scalar;
pub mod solver;
pub mod sparse;
pub mod triangular;

pub use error::{Error, MatrixMarketError, Result};

pub mod prelude {
    pub use crate::config::{build_solver, config_solve, parse_config, SolverConfig};
    pub use crate::dense::{axpby, axpy, dense_create, dot, norm2, scal, DenseMatrix};
    pub use crate::device::{create_device, Device, DeviceKind};
    pub use crate::linop::{apply_advanced, Identity, LinOp};
    pub use crate::precond::{Ic, Ilu, Jacobi};
    pub use crate::scalar::{Index, IndexWidth, Precision, Scalar};
    pub use crate::solver::{
        cg_solve, cgs_solve, gmres_solve, Cg, Cgs, ConvergenceLog, Criterion, Gmres, Solver,
        SolverParams, StopReason,
    };
    pub use crate::sparse::{CooMatrix, CsrMatrix, Format, SparseMatrix};
    pub use crate::triangular::{solve_lower_tri, solve_upper_tri};
    pub use crate::{Error, Result};
}
