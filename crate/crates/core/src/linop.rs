//! The linear operator contract shared by matrices, solvers and
//! preconditioners.

use std::sync::Arc;

use crate::dense::{axpby, DenseMatrix};
use crate::device::Device;
use crate::scalar::Scalar;
use crate::{Error, Result};

/// Anything that can be applied to a dense right-hand side.
///
/// For a matrix `apply` computes `x = A * b`; for a solver it solves
/// `A * x = b` using `x` as the initial guess; for a preconditioner it applies
/// an approximate inverse.
pub trait LinOp<T: Scalar>: Send + Sync {
    /// `(rows, cols)` of the operator.
    fn size(&self) -> (usize, usize);

    fn device(&self) -> &Device;

    fn apply(&self, b: &DenseMatrix<T>, x: &mut DenseMatrix<T>) -> Result<()>;

    /// `x := alpha * op(b) + beta * x`. With `beta == 0` the previous contents
    /// of `x` are ignored, even if they are not finite.
    fn apply_advanced(&self, alpha: T, b: &DenseMatrix<T>, beta: T, x: &mut DenseMatrix<T>) -> Result<()> {
        let mut tmp = x.clone();
        self.apply(b, &mut tmp)?;
        axpby(alpha, &tmp, beta, x)
    }
}

impl<T: Scalar, L: LinOp<T> + ?Sized> LinOp<T> for Arc<L> {
    fn size(&self) -> (usize, usize) {
        (**self).size()
    }

    fn device(&self) -> &Device {
        (**self).device()
    }

    fn apply(&self, b: &DenseMatrix<T>, x: &mut DenseMatrix<T>) -> Result<()> {
        (**self).apply(b, x)
    }

    fn apply_advanced(&self, alpha: T, b: &DenseMatrix<T>, beta: T, x: &mut DenseMatrix<T>) -> Result<()> {
        (**self).apply_advanced(alpha, b, beta, x)
    }
}

/// `x := alpha * op(b) + beta * x` for any operator.
pub fn apply_advanced<T: Scalar>(
    op: &dyn LinOp<T>,
    alpha: T,
    b: &DenseMatrix<T>,
    beta: T,
    x: &mut DenseMatrix<T>,
) -> Result<()> {
    op.apply_advanced(alpha, b, beta, x)
}

pub(crate) fn check_apply_dims<T: Scalar>(
    op: &'static str,
    (rows, cols): (usize, usize),
    b: &DenseMatrix<T>,
    x: &DenseMatrix<T>,
) -> Result<()> {
    if b.rows() != cols || x.rows() != rows || b.cols() != x.cols() {
        return Err(Error::dims(
            op,
            format!("b: {cols}x{k}, x: {rows}x{k}", k = b.cols()),
            format!(
                "b: {}x{}, x: {}x{}",
                b.rows(),
                b.cols(),
                x.rows(),
                x.cols()
            ),
        ));
    }
    Ok(())
}

/// The identity operator, used when no preconditioner is configured.
#[derive(Debug, Clone)]
pub struct Identity {
    device: Device,
    n: usize,
}

impl Identity {
    pub fn new(device: &Device, n: usize) -> Self {
        Identity {
            device: device.clone(),
            n,
        }
    }
}

impl<T: Scalar> LinOp<T> for Identity {
    fn size(&self) -> (usize, usize) {
        (self.n, self.n)
    }

    fn device(&self) -> &Device {
        &self.device
    }

    fn apply(&self, b: &DenseMatrix<T>, x: &mut DenseMatrix<T>) -> Result<()> {
        check_apply_dims("identity", (self.n, self.n), b, x)?;
        x.copy_from(b)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sparse::{CooMatrix, CsrMatrix};

    fn dev() -> Device {
        Device::reference()
    }

    #[test]
    fn advanced_apply_examples() {
        let id = CsrMatrix::<f64, i32>::identity(&dev(), 2).unwrap();
        let b = DenseMatrix::vector(&dev(), &[1.0, 1.0]);
        let mut x = DenseMatrix::vector(&dev(), &[1.0, 0.0]);
        apply_advanced(&id, 2.0, &b, 3.0, &mut x).unwrap();
        assert_eq!(x.to_vec(), vec![5.0, 2.0]);

        let mut x = DenseMatrix::vector(&dev(), &[f64::NAN, f64::INFINITY]);
        apply_advanced(&id, 1.0, &b, 0.0, &mut x).unwrap();
        assert_eq!(x.to_vec(), vec![1.0, 1.0]);

        let mut x = DenseMatrix::vector(&dev(), &[0.25, -4.0]);
        apply_advanced(&id, 0.0, &b, 1.0, &mut x).unwrap();
        assert_eq!(x.to_vec(), vec![0.25, -4.0]);
    }

    #[test]
    fn apply_equals_unit_advanced_apply() {
        let t = [(0, 0, 0.3), (0, 2, -1.7), (1, 1, 2.2), (2, 0, 0.9), (2, 2, 1.1)];
        let csr = CsrMatrix::<f64, i32>::from_triplets(&dev(), 3, 3, &t).unwrap();
        let coo = CooMatrix::<f64, i32>::from_triplets(&dev(), 3, 3, &t).unwrap();
        let b = DenseMatrix::vector(&dev(), &[0.1, 0.7, -0.2]);
        for op in [&csr as &dyn LinOp<f64>, &coo] {
            let mut x1 = DenseMatrix::zeros(&dev(), 3, 1);
            let mut x2 = DenseMatrix::filled(&dev(), 3, 1, f64::NAN);
            op.apply(&b, &mut x1).unwrap();
            op.apply_advanced(1.0, &b, 0.0, &mut x2).unwrap();
            assert!(x1.bitwise_eq(&x2));
        }
    }

    #[test]
    fn default_advanced_apply_through_identity() {
        let id = Identity::new(&dev(), 2);
        let b = DenseMatrix::vector(&dev(), &[1.0, 2.0]);
        let mut x = DenseMatrix::vector(&dev(), &[1.0, 1.0]);
        LinOp::<f64>::apply_advanced(&id, 2.0, &b, -1.0, &mut x).unwrap();
        assert_eq!(x.to_vec(), vec![1.0, 3.0]);
        let mut bad = DenseMatrix::<f64>::zeros(&dev(), 3, 1);
        assert!(id.apply(&b, &mut bad).is_err());
    }
}
