//! Sparse triangular solves by forward and backward substitution.
//!
//! These run sequentially on every device: each row depends on the rows
//! solved before it.

use crate::dense::DenseMatrix;
use crate::linop::check_apply_dims;
use crate::scalar::{Index, Scalar};
use crate::sparse::CsrMatrix;
use crate::{Error, Result};

/// Solves `L * x = b` for lower-triangular `L`.
///
/// With `unit_diag` the diagonal is taken to be one and any stored diagonal
/// entry is ignored.
pub fn solve_lower_tri<T: Scalar, I: Index>(
    lower: &CsrMatrix<T, I>,
    b: &DenseMatrix<T>,
    x: &mut DenseMatrix<T>,
    unit_diag: bool,
) -> Result<()> {
    check_square(lower)?;
    check_apply_dims("solve_lower_tri", (lower.rows(), lower.cols()), b, x)?;
    for i in 0..lower.rows() {
        let (cols, vals) = lower.row(i);
        for c in 0..x.cols() {
            let mut sum = b.get(i, c);
            let mut diag = None;
            for (j, &v) in cols.iter().zip(vals) {
                let j = j.idx();
                if j < i {
                    sum = sum - v * x.get(j, c);
                } else if j == i {
                    diag = Some(v);
                } else {
                    return Err(Error::NotTriangular {
                        expected: "lower",
                        row: i,
                        col: j,
                    });
                }
            }
            let value = if unit_diag {
                sum
            } else {
                match diag {
                    Some(d) if d != T::zero() => sum / d,
                    _ => return Err(Error::SingularTriangle { row: i }),
                }
            };
            x.set(i, c, value);
        }
    }
    Ok(())
}

/// Solves `U * x = b` for upper-triangular `U` with a stored, nonzero diagonal.
pub fn solve_upper_tri<T: Scalar, I: Index>(
    upper: &CsrMatrix<T, I>,
    b: &DenseMatrix<T>,
    x: &mut DenseMatrix<T>,
) -> Result<()> {
    check_square(upper)?;
    check_apply_dims("solve_upper_tri", (upper.rows(), upper.cols()), b, x)?;
    for i in (0..upper.rows()).rev() {
        let (cols, vals) = upper.row(i);
        for c in 0..x.cols() {
            let mut sum = b.get(i, c);
            let mut diag = None;
            for (j, &v) in cols.iter().zip(vals) {
                let j = j.idx();
                if j > i {
                    sum = sum - v * x.get(j, c);
                } else if j == i {
                    diag = Some(v);
                } else {
                    return Err(Error::NotTriangular {
                        expected: "upper",
                        row: i,
                        col: j,
                    });
                }
            }
            match diag {
                Some(d) if d != T::zero() => x.set(i, c, sum / d),
                _ => return Err(Error::SingularTriangle { row: i }),
            }
        }
    }
    Ok(())
}

fn check_square<T: Scalar, I: Index>(m: &CsrMatrix<T, I>) -> Result<()> {
    if !m.is_square() {
        return Err(Error::dims(
            "triangular solve",
            format!("{0}x{0}", m.rows()),
            format!("{}x{}", m.rows(), m.cols()),
        ));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::device::Device;
    use crate::linop::LinOp;
    use proptest::prelude::*;

    fn dev() -> Device {
        Device::reference()
    }

    fn csr(rows: &[Vec<f64>]) -> CsrMatrix<f64> {
        CsrMatrix::from_dense(&dev(), rows).unwrap()
    }

    #[test]
    fn identity_solve() {
        let id = CsrMatrix::<f64, i32>::identity(&dev(), 3).unwrap();
        let b = DenseMatrix::vector(&dev(), &[1.0, -2.0, 0.5]);
        let mut x = DenseMatrix::zeros(&dev(), 3, 1);
        solve_lower_tri(&id, &b, &mut x, false).unwrap();
        assert_eq!(x.to_vec(), b.to_vec());
        solve_upper_tri(&id, &b, &mut x).unwrap();
        assert_eq!(x.to_vec(), b.to_vec());
    }

    #[test]
    fn forward_substitution_by_hand() {
        let l = csr(&[vec![2.0, 0.0], vec![1.0, 1.0]]);
        let mut x = DenseMatrix::zeros(&dev(), 2, 1);
        solve_lower_tri(&l, &DenseMatrix::vector(&dev(), &[2.0, 3.0]), &mut x, false).unwrap();
        assert_eq!(x.to_vec(), vec![1.0, 2.0]);
        // unit diagonal ignores the stored 2.0
        solve_lower_tri(&l, &DenseMatrix::vector(&dev(), &[2.0, 3.0]), &mut x, true).unwrap();
        assert_eq!(x.to_vec(), vec![2.0, 1.0]);
    }

    #[test]
    fn backward_substitution_by_hand() {
        let u = csr(&[vec![2.0, -1.0], vec![0.0, 1.5]]);
        let mut x = DenseMatrix::zeros(&dev(), 2, 1);
        solve_upper_tri(&u, &DenseMatrix::vector(&dev(), &[1.0, 1.5]), &mut x).unwrap();
        assert_eq!(x.to_vec(), vec![1.0, 1.0]);
    }

    #[test]
    fn singular_and_shape_errors() {
        let dev = dev();
        let u = CsrMatrix::<f64, i32>::from_triplets(&dev, 2, 2, &[(0, 0, 1.0), (0, 1, 1.0), (1, 1, 0.0)]).unwrap();
        let b = DenseMatrix::vector(&dev, &[1.0, 1.0]);
        let mut x = DenseMatrix::zeros(&dev, 2, 1);
        assert!(matches!(
            solve_upper_tri(&u, &b, &mut x),
            Err(Error::SingularTriangle { row: 1 })
        ));
        let missing = CsrMatrix::<f64, i32>::from_triplets(&dev, 2, 2, &[(0, 0, 1.0), (1, 0, 1.0)]).unwrap();
        assert!(matches!(
            solve_lower_tri(&missing, &b, &mut x, false),
            Err(Error::SingularTriangle { row: 1 })
        ));
        let full = csr(&[vec![1.0, 1.0], vec![1.0, 1.0]]);
        assert!(matches!(
            solve_lower_tri(&full, &b, &mut x, false),
            Err(Error::NotTriangular { row: 0, col: 1, .. })
        ));
        assert!(matches!(
            solve_upper_tri(&full, &b, &mut x),
            Err(Error::NotTriangular { row: 1, col: 0, .. })
        ));
    }

    fn lower_triangles() -> impl Strategy<Value = (usize, Vec<(usize, usize, f64)>, Vec<f64>)> {
        (1usize..50).prop_flat_map(|n| {
            (
                Just(n),
                proptest::collection::vec((0..n, 0..n, -0.5..0.5f64), 0..(n * 3)),
                proptest::collection::vec(1.0..3.0f64, n),
            )
        })
    }

    proptest! {
        #[test]
        fn solve_then_multiply_reproduces_rhs((n, offdiag, diag) in lower_triangles()) {
            let mut t: Vec<_> = offdiag.into_iter().filter(|&(i, j, _)| j < i).collect();
            // keep at most one entry per position so |off-diagonal| <= 0.5 holds
            t.sort_by_key(|&(i, j, _)| (i, j));
            t.dedup_by_key(|e| (e.0, e.1));
            t.extend(diag.iter().enumerate().map(|(i, &d)| (i, i, d)));
            let l = CsrMatrix::<f64, i32>::from_triplets(&dev(), n, n, &t).unwrap();
            let b: Vec<f64> = (0..n).map(|i| ((i * 7 % 11) as f64) - 5.0).collect();
            let b = DenseMatrix::vector(&dev(), &b);
            let mut x = DenseMatrix::zeros(&dev(), n, 1);
            solve_lower_tri(&l, &b, &mut x, false).unwrap();
            let mut lx = DenseMatrix::zeros(&dev(), n, 1);
            l.apply(&x, &mut lx).unwrap();
            let scale = b.iter().fold(0.0f64, |m, v| m.max(v.abs())).max(1.0);
            for (got, want) in lx.iter().zip(b.iter()) {
                prop_assert!((got - want).abs() <= 1e-10 * scale);
            }
        }
    }
}
