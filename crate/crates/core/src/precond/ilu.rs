use crate::dense::DenseMatrix;
use crate::device::Device;
use crate::linop::{check_apply_dims, LinOp};
use crate::scalar::{to_index, Index, Scalar};
use crate::sparse::CsrMatrix;
use crate::triangular::{solve_lower_tri, solve_upper_tri};
use crate::{Error, Result};

/// Factors of an incomplete LU decomposition.
///
/// `l` is unit lower triangular and stores its unit diagonal explicitly; `u`
/// is upper triangular including the diagonal.
#[derive(Debug, Clone, PartialEq)]
pub struct IluFactors<T, I = i32> {
    pub l: CsrMatrix<T, I>,
    pub u: CsrMatrix<T, I>,
}

/// ILU(0): IKJ Gaussian elimination restricted to the sparsity pattern of `a`,
/// without pivoting.
pub fn ilu0_factorize<T: Scalar, I: Index>(a: &CsrMatrix<T, I>) -> Result<IluFactors<T, I>> {
    if !a.is_square() {
        return Err(Error::dims(
            "ilu0",
            format!("{0}x{0}", a.rows()),
            format!("{}x{}", a.rows(), a.cols()),
        ));
    }
    let n = a.rows();
    let mut lu = a.values().to_vec();
    let diag_pos: Vec<Option<usize>> = (0..n).map(|r| a.find(r, r)).collect();
    // position of column j in the current row, if stored
    let mut pos: Vec<Option<usize>> = vec![None; n];

    for i in 0..n {
        let range = a.row_range(i);
        for p in range.clone() {
            pos[a.col_idxs()[p].idx()] = Some(p);
        }
        for p in range.clone() {
            let k = a.col_idxs()[p].idx();
            if k >= i {
                break;
            }
            let pivot = match diag_pos[k] {
                Some(d) if lu[d] != T::zero() => lu[d],
                _ => return Err(Error::ZeroPivot { row: k }),
            };
            let factor = lu[p] / pivot;
            lu[p] = factor;
            for q in a.row_range(k) {
                let j = a.col_idxs()[q].idx();
                if j <= k {
                    continue;
                }
                if let Some(t) = pos[j] {
                    lu[t] = lu[t] - factor * lu[q];
                }
            }
        }
        for p in range {
            pos[a.col_idxs()[p].idx()] = None;
        }
        match diag_pos[i] {
            Some(d) if lu[d] != T::zero() && lu[d].is_finite() => {}
            _ => return Err(Error::ZeroPivot { row: i }),
        }
    }

    let mut l = Triangle::new(n);
    let mut u = Triangle::new(n);
    for i in 0..n {
        for p in a.row_range(i) {
            let j = a.col_idxs()[p].idx();
            if j < i {
                l.push(j, lu[p]);
            } else {
                if j == i {
                    l.push(i, T::one());
                }
                u.push(j, lu[p]);
            }
        }
        l.end_row();
        u.end_row();
    }
    let device = a.device();
    Ok(IluFactors {
        l: l.finish(device)?,
        u: u.finish(device)?,
    })
}

/// `x := U^{-1} (L^{-1} b)`
pub fn ilu_apply<T: Scalar, I: Index>(
    factors: &IluFactors<T, I>,
    b: &DenseMatrix<T>,
    x: &mut DenseMatrix<T>,
) -> Result<()> {
    let mut y = DenseMatrix::zeros(b.device(), b.rows(), b.cols());
    solve_lower_tri(&factors.l, b, &mut y, true)?;
    solve_upper_tri(&factors.u, &y, x)
}

/// Row-by-row builder for a triangular CSR factor.
pub(super) struct Triangle<T> {
    n: usize,
    pub(super) row_ptrs: Vec<usize>,
    pub(super) col_idxs: Vec<usize>,
    pub(super) values: Vec<T>,
}

impl<T: Scalar> Triangle<T> {
    pub(super) fn new(n: usize) -> Self {
        Triangle {
            n,
            row_ptrs: vec![0],
            col_idxs: Vec::new(),
            values: Vec::new(),
        }
    }

    pub(super) fn push(&mut self, col: usize, value: T) {
        self.col_idxs.push(col);
        self.values.push(value);
    }

    pub(super) fn end_row(&mut self) {
        self.row_ptrs.push(self.col_idxs.len());
    }

    pub(super) fn finish<I: Index>(self, device: &Device) -> Result<CsrMatrix<T, I>> {
        let row_ptrs = self.row_ptrs.into_iter().map(to_index).collect::<Result<_>>()?;
        let col_idxs = self.col_idxs.into_iter().map(to_index).collect::<Result<_>>()?;
        CsrMatrix::from_parts(device, self.n, self.n, row_ptrs, col_idxs, self.values)
    }
}

/// ILU(0) preconditioner.
#[derive(Debug, Clone)]
pub struct Ilu<T, I = i32> {
    factors: IluFactors<T, I>,
}

impl<T: Scalar, I: Index> Ilu<T, I> {
    pub fn new(a: &CsrMatrix<T, I>) -> Result<Self> {
        Ok(Ilu {
            factors: ilu0_factorize(a)?,
        })
    }

    pub fn factors(&self) -> &IluFactors<T, I> {
        &self.factors
    }
}

impl<T: Scalar, I: Index> LinOp<T> for Ilu<T, I> {
    fn size(&self) -> (usize, usize) {
        (self.factors.u.rows(), self.factors.u.cols())
    }

    fn device(&self) -> &Device {
        self.factors.u.device()
    }

    fn apply(&self, b: &DenseMatrix<T>, x: &mut DenseMatrix<T>) -> Result<()> {
        check_apply_dims("ilu", self.size(), b, x)?;
        ilu_apply(&self.factors, b, x)
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
    fn diagonal_gives_identity_l() {
        let a = csr(&[vec![2.0, 0.0], vec![0.0, 5.0]]);
        let f = ilu0_factorize(&a).unwrap();
        assert_eq!(f.l, CsrMatrix::identity(&dev(), 2).unwrap());
        assert_eq!(f.u, a);
    }

    #[test]
    fn two_by_two_by_hand() {
        let a = csr(&[vec![2.0, -1.0], vec![-1.0, 2.0]]);
        let f = ilu0_factorize(&a).unwrap();
        assert_eq!(f.l, csr(&[vec![1.0, 0.0], vec![-0.5, 1.0]]));
        assert_eq!(f.u, csr(&[vec![2.0, -1.0], vec![0.0, 1.5]]));
        let mut x = DenseMatrix::zeros(&dev(), 2, 1);
        ilu_apply(&f, &DenseMatrix::vector(&dev(), &[1.0, 1.0]), &mut x).unwrap();
        for v in x.iter() {
            assert!((v - 1.0).abs() <= 1e-15);
        }
    }

    #[test]
    fn zero_pivot_is_reported() {
        let a = csr(&[vec![0.0, 1.0], vec![1.0, 0.0]]);
        assert!(matches!(ilu0_factorize(&a), Err(Error::ZeroPivot { row: 0 })));
        // pivot becomes zero during elimination
        let b = csr(&[vec![1.0, 1.0], vec![1.0, 1.0]]);
        assert!(matches!(ilu0_factorize(&b), Err(Error::ZeroPivot { row: 1 })));
    }

    #[test]
    fn fill_in_is_dropped() {
        // arrow matrix: full LU would fill (1,2) and (2,1)
        let a = csr(&[vec![4.0, 1.0, 1.0], vec![1.0, 4.0, 0.0], vec![1.0, 0.0, 4.0]]);
        let f = ilu0_factorize(&a).unwrap();
        assert_eq!(f.l.nnz() + f.u.nnz(), a.nnz() + 3);
        assert_eq!(f.u.find(1, 2), None);
        assert_eq!(f.l.find(2, 1), None);
    }

    #[test]
    fn identity_factors_apply_as_identity() {
        let id = CsrMatrix::<f64, i32>::identity(&dev(), 3).unwrap();
        let ilu = Ilu::new(&id).unwrap();
        let b = DenseMatrix::vector(&dev(), &[1.0, 2.0, 3.0]);
        let mut x = DenseMatrix::zeros(&dev(), 3, 1);
        ilu.apply(&b, &mut x).unwrap();
        assert_eq!(x, b);
    }
}
