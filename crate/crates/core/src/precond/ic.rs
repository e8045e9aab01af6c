use super::ilu::Triangle;
use crate::dense::DenseMatrix;
use crate::device::Device;
use crate::linop::{check_apply_dims, LinOp};
use crate::scalar::{Index, Scalar};
use crate::sparse::CsrMatrix;
use crate::triangular::{solve_lower_tri, solve_upper_tri};
use crate::{Error, Result};

/// Incomplete Cholesky factor `L` together with its transpose.
#[derive(Debug, Clone, PartialEq)]
pub struct IcFactor<T, I = i32> {
    pub l: CsrMatrix<T, I>,
    pub lt: CsrMatrix<T, I>,
}

/// IC(0) on the lower triangle of `a`. Only the lower triangle is read; `a`
/// is assumed symmetric.
pub fn ic0_factorize<T: Scalar, I: Index>(a: &CsrMatrix<T, I>) -> Result<IcFactor<T, I>> {
    if !a.is_square() {
        return Err(Error::dims(
            "ic0",
            format!("{0}x{0}", a.rows()),
            format!("{}x{}", a.rows(), a.cols()),
        ));
    }
    let n = a.rows();
    let mut l = Triangle::new(n);
    for i in 0..n {
        let row_start = l.col_idxs.len();
        let mut has_diag = false;
        for p in a.row_range(i) {
            let j = a.col_idxs()[p].idx();
            if j > i {
                break;
            }
            // sparse dot of the finished parts of rows i and j of L
            let mut s = a.values()[p];
            let (mut pi, mut pj) = (row_start, l.row_ptrs[j]);
            let end_j = if j == i { l.col_idxs.len() } else { l.row_ptrs[j + 1] };
            while pi < l.col_idxs.len() && pj < end_j {
                let (ci, cj) = (l.col_idxs[pi], l.col_idxs[pj]);
                if ci >= j || cj >= j {
                    break;
                }
                match ci.cmp(&cj) {
                    std::cmp::Ordering::Less => pi += 1,
                    std::cmp::Ordering::Greater => pj += 1,
                    std::cmp::Ordering::Equal => {
                        s = s - l.values[pi] * l.values[pj];
                        pi += 1;
                        pj += 1;
                    }
                }
            }
            if j < i {
                let d = l.values[l.row_ptrs[j + 1] - 1];
                l.push(j, s / d);
            } else {
                // also rejects NaN
                #[allow(clippy::neg_cmp_op_on_partial_ord)]
                if !(s > T::zero()) {
                    return Err(Error::IndefinitePivot { row: i });
                }
                has_diag = true;
                l.push(i, s.sqrt());
            }
        }
        if !has_diag {
            return Err(Error::IndefinitePivot { row: i });
        }
        l.end_row();
    }
    let l: CsrMatrix<T, I> = l.finish(a.device())?;
    let lt = l.transpose();
    Ok(IcFactor { l, lt })
}

/// `x := L^{-T} (L^{-1} b)`
pub fn ic_apply<T: Scalar, I: Index>(
    factor: &IcFactor<T, I>,
    b: &DenseMatrix<T>,
    x: &mut DenseMatrix<T>,
) -> Result<()> {
    let mut y = DenseMatrix::zeros(b.device(), b.rows(), b.cols());
    solve_lower_tri(&factor.l, b, &mut y, false)?;
    solve_upper_tri(&factor.lt, &y, x)
}

/// IC(0) preconditioner for symmetric positive definite systems.
#[derive(Debug, Clone)]
pub struct Ic<T, I = i32> {
    factor: IcFactor<T, I>,
}

impl<T: Scalar, I: Index> Ic<T, I> {
    pub fn new(a: &CsrMatrix<T, I>) -> Result<Self> {
        Ok(Ic {
            factor: ic0_factorize(a)?,
        })
    }

    pub fn factor(&self) -> &IcFactor<T, I> {
        &self.factor
    }
}

impl<T: Scalar, I: Index> LinOp<T> for Ic<T, I> {
    fn size(&self) -> (usize, usize) {
        (self.factor.l.rows(), self.factor.l.cols())
    }

    fn device(&self) -> &Device {
        self.factor.l.device()
    }

    fn apply(&self, b: &DenseMatrix<T>, x: &mut DenseMatrix<T>) -> Result<()> {
        check_apply_dims("ic", self.size(), b, x)?;
        ic_apply(&self.factor, b, x)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dev() -> Device {
        Device::reference()
    }

    fn csr(rows: &[Vec<f64>]) -> CsrMatrix<f64> {
        CsrMatrix::from_dense(&dev(), rows).unwrap()
    }

    #[test]
    fn diagonal_square_roots() {
        let f = ic0_factorize(&csr(&[vec![4.0, 0.0], vec![0.0, 9.0]])).unwrap();
        assert_eq!(f.l, csr(&[vec![2.0, 0.0], vec![0.0, 3.0]]));
    }

    #[test]
    fn full_pattern_is_cholesky() {
        let f = ic0_factorize(&csr(&[vec![4.0, 2.0], vec![2.0, 5.0]])).unwrap();
        assert_eq!(f.l, csr(&[vec![2.0, 0.0], vec![1.0, 2.0]]));
        assert_eq!(f.lt, csr(&[vec![2.0, 1.0], vec![0.0, 2.0]]));
    }

    #[test]
    fn apply_by_hand() {
        let f = ic0_factorize(&csr(&[vec![4.0]])).unwrap();
        let mut x = DenseMatrix::zeros(&dev(), 1, 1);
        ic_apply(&f, &DenseMatrix::vector(&dev(), &[4.0]), &mut x).unwrap();
        assert_eq!(x.to_vec(), vec![1.0]);
    }

    #[test]
    fn indefinite_pivots() {
        assert!(matches!(
            ic0_factorize(&csr(&[vec![-1.0]])),
            Err(Error::IndefinitePivot { row: 0 })
        ));
        assert!(matches!(
            ic0_factorize(&csr(&[vec![1.0, 2.0], vec![2.0, 1.0]])),
            Err(Error::IndefinitePivot { row: 1 })
        ));
        let missing = CsrMatrix::<f64, i32>::from_triplets(&dev(), 2, 2, &[(0, 0, 1.0)]).unwrap();
        assert!(matches!(ic0_factorize(&missing), Err(Error::IndefinitePivot { row: 1 })));
    }
}
