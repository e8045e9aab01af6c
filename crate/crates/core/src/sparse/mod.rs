//! Sparse storage formats.
//!
//! Both formats keep entries in canonical order (row-major, strictly
//! increasing columns within a row). Constructors establish this and kernels
//! rely on it. Explicitly stored zeros are kept.

mod coo;
mod csr;
mod validate;

use std::sync::Arc;

pub use coo::{coo_from_csr, coo_from_triplets, CooMatrix};
pub use csr::{csr_from_coo, CsrMatrix};
pub use validate::{validate_coo, validate_csr, Violation, ViolationKind};

use crate::dense::DenseMatrix;
use crate::device::Device;
use crate::linop::LinOp;
use crate::scalar::{Index, Scalar};
use crate::Result;

/// Storage format selector, as used by readers and the benchmark harness.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Format {
    Csr,
    Coo,
}

impl Format {
    pub fn as_str(self) -> &'static str {
        match self {
            Format::Csr => "csr",
            Format::Coo => "coo",
        }
    }
}

impl std::str::FromStr for Format {
    type Err = crate::Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "csr" => Ok(Format::Csr),
            "coo" => Ok(Format::Coo),
            other => Err(crate::Error::Unsupported(format!("matrix format `{other}`"))),
        }
    }
}

impl std::fmt::Display for Format {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A sparse matrix in either supported format.
#[derive(Debug, Clone, PartialEq)]
pub enum SparseMatrix<T, I = i32> {
    Csr(CsrMatrix<T, I>),
    Coo(CooMatrix<T, I>),
}

impl<T: Scalar, I: Index> SparseMatrix<T, I> {
    pub fn format(&self) -> Format {
        match self {
            SparseMatrix::Csr(_) => Format::Csr,
            SparseMatrix::Coo(_) => Format::Coo,
        }
    }

    pub fn nnz(&self) -> usize {
        match self {
            SparseMatrix::Csr(m) => m.nnz(),
            SparseMatrix::Coo(m) => m.nnz(),
        }
    }

    pub fn to_csr(&self) -> CsrMatrix<T, I> {
        match self {
            SparseMatrix::Csr(m) => m.clone(),
            SparseMatrix::Coo(m) => csr_from_coo(m),
        }
    }

    pub fn to_coo(&self) -> CooMatrix<T, I> {
        match self {
            SparseMatrix::Csr(m) => coo_from_csr(m),
            SparseMatrix::Coo(m) => m.clone(),
        }
    }

    pub fn to_device(&self, device: &Device) -> Self {
        match self {
            SparseMatrix::Csr(m) => SparseMatrix::Csr(m.to_device(device)),
            SparseMatrix::Coo(m) => SparseMatrix::Coo(m.to_device(device)),
        }
    }

    /// Shared handle usable wherever a `LinOp` is expected.
    pub fn into_linop(self) -> Arc<dyn LinOp<T>> {
        match self {
            SparseMatrix::Csr(m) => Arc::new(m),
            SparseMatrix::Coo(m) => Arc::new(m),
        }
    }
}

impl<T: Scalar, I: Index> LinOp<T> for SparseMatrix<T, I> {
    fn size(&self) -> (usize, usize) {
        match self {
            SparseMatrix::Csr(m) => m.size(),
            SparseMatrix::Coo(m) => m.size(),
        }
    }

    fn device(&self) -> &Device {
        match self {
            SparseMatrix::Csr(m) => m.device(),
            SparseMatrix::Coo(m) => m.device(),
        }
    }

    fn apply(&self, b: &DenseMatrix<T>, x: &mut DenseMatrix<T>) -> Result<()> {
        match self {
            SparseMatrix::Csr(m) => m.apply(b, x),
            SparseMatrix::Coo(m) => m.apply(b, x),
        }
    }

    fn apply_advanced(&self, alpha: T, b: &DenseMatrix<T>, beta: T, x: &mut DenseMatrix<T>) -> Result<()> {
        match self {
            SparseMatrix::Csr(m) => m.apply_advanced(alpha, b, beta, x),
            SparseMatrix::Coo(m) => m.apply_advanced(alpha, b, beta, x),
        }
    }
}

/// How a kernel combines a freshly computed row value with the old output.
#[derive(Clone, Copy)]
pub(crate) enum Combine<T> {
    Overwrite,
    Scaled { alpha: T, beta: T },
}

impl<T: Scalar> Combine<T> {
    #[inline(always)]
    pub(crate) fn apply(self, sum: T, old: T) -> T {
        match self {
            Combine::Overwrite => sum,
            Combine::Scaled { alpha, beta } => {
                if beta == T::zero() {
                    alpha * sum
                } else {
                    alpha * sum + beta * old
                }
            }
        }
    }
}
