use crate::dense::DenseMatrix;
use crate::device::Device;
use crate::linop::{check_apply_dims, LinOp};
use crate::scalar::{Index, Scalar};
use crate::sparse::CsrMatrix;
use crate::{Error, Result};

/// Scalar Jacobi: `x := D^{-1} b` with `D = diag(A)`.
#[derive(Debug, Clone)]
pub struct Jacobi<T> {
    device: Device,
    inv_diag: Vec<T>,
}

impl<T: Scalar> Jacobi<T> {
    /// Only `max_block_size == 1` is supported.
    pub fn new<I: Index>(a: &CsrMatrix<T, I>, max_block_size: usize) -> Result<Self> {
        if max_block_size == 0 {
            return Err(Error::InvalidArgument("max_block_size must be positive".into()));
        }
        if max_block_size > 1 {
            return Err(Error::Unsupported(format!(
                "block Jacobi with max_block_size {max_block_size}"
            )));
        }
        if !a.is_square() {
            return Err(Error::dims(
                "jacobi",
                format!("{0}x{0}", a.rows()),
                format!("{}x{}", a.rows(), a.cols()),
            ));
        }
        let inv_diag = a
            .diagonal()
            .into_iter()
            .enumerate()
            .map(|(row, d)| match d {
                Some(d) if d != T::zero() && (T::one() / d).is_finite() => Ok(T::one() / d),
                _ => Err(Error::SingularDiagonal { row }),
            })
            .collect::<Result<_>>()?;
        Ok(Jacobi {
            device: a.device().clone(),
            inv_diag,
        })
    }

    pub fn inv_diag(&self) -> &[T] {
        &self.inv_diag
    }
}

impl<T: Scalar> LinOp<T> for Jacobi<T> {
    fn size(&self) -> (usize, usize) {
        (self.inv_diag.len(), self.inv_diag.len())
    }

    fn device(&self) -> &Device {
        &self.device
    }

    fn apply(&self, b: &DenseMatrix<T>, x: &mut DenseMatrix<T>) -> Result<()> {
        check_apply_dims("jacobi", self.size(), b, x)?;
        for (i, &d) in self.inv_diag.iter().enumerate() {
            for c in 0..b.cols() {
                x.set(i, c, b.get(i, c) * d);
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dev() -> Device {
        Device::reference()
    }

    #[test]
    fn scales_by_reciprocal_diagonal() {
        let a = CsrMatrix::<f64, i32>::from_dense(&dev(), &[vec![2.0, 1.0], vec![0.0, 4.0]]).unwrap();
        let j = Jacobi::new(&a, 1).unwrap();
        let mut x = DenseMatrix::zeros(&dev(), 2, 1);
        j.apply(&DenseMatrix::vector(&dev(), &[2.0, 4.0]), &mut x).unwrap();
        assert_eq!(x.to_vec(), vec![1.0, 1.0]);
    }

    #[test]
    fn identity_is_identity() {
        let a = CsrMatrix::<f64, i32>::identity(&dev(), 3).unwrap();
        let b = DenseMatrix::vector(&dev(), &[3.0, -1.0, 0.25]);
        let mut x = DenseMatrix::zeros(&dev(), 3, 1);
        Jacobi::new(&a, 1).unwrap().apply(&b, &mut x).unwrap();
        assert_eq!(x, b);
    }

    #[test]
    fn rejects_zero_missing_and_blocks() {
        let zero = CsrMatrix::<f64, i32>::from_triplets(&dev(), 2, 2, &[(0, 0, 1.0), (1, 1, 0.0)]).unwrap();
        assert!(matches!(Jacobi::new(&zero, 1), Err(Error::SingularDiagonal { row: 1 })));
        let missing = CsrMatrix::<f64, i32>::from_triplets(&dev(), 2, 2, &[(0, 0, 1.0), (1, 0, 2.0)]).unwrap();
        assert!(matches!(Jacobi::new(&missing, 1), Err(Error::SingularDiagonal { row: 1 })));
        let id = CsrMatrix::<f64, i32>::identity(&dev(), 2).unwrap();
        assert!(matches!(Jacobi::new(&id, 4), Err(Error::Unsupported(_))));
    }
}
