use crate::dense::DenseMatrix;
use crate::device::{even_bound, Device};
use crate::linop::{check_apply_dims, LinOp};
use crate::scalar::{to_index, Index, IndexWidth, Precision, Scalar};
use crate::sparse::{validate_csr, Combine, CooMatrix, Violation};
use crate::{Error, Result};

/// Compressed sparse row matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct CsrMatrix<T, I = i32> {
    device: Device,
    rows: usize,
    cols: usize,
    row_ptrs: Vec<I>,
    col_idxs: Vec<I>,
    values: Vec<T>,
}

/// Compresses a canonical COO matrix into CSR with a prefix sum over rows.
pub fn csr_from_coo<T: Scalar, I: Index>(m: &CooMatrix<T, I>) -> CsrMatrix<T, I> {
    let mut counts = vec![0usize; m.rows() + 1];
    for r in m.row_idxs() {
        counts[r.idx() + 1] += 1;
    }
    for r in 0..m.rows() {
        counts[r + 1] += counts[r];
    }
    let row_ptrs = counts
        .into_iter()
        .map(|p| I::from_usize(p).expect("nnz fits the index type of its COO source"))
        .collect();
    CsrMatrix {
        device: m.device().clone(),
        rows: m.rows(),
        cols: m.cols(),
        row_ptrs,
        col_idxs: m.col_idxs().to_vec(),
        values: m.values().to_vec(),
    }
}

impl<T: Scalar, I: Index> CsrMatrix<T, I> {
    /// Wraps raw CSR arrays, rejecting anything that is not canonical.
    pub fn from_parts(
        device: &Device,
        rows: usize,
        cols: usize,
        row_ptrs: Vec<I>,
        col_idxs: Vec<I>,
        values: Vec<T>,
    ) -> Result<Self> {
        let violations = validate_csr(rows, cols, &row_ptrs, &col_idxs, values.len());
        if !violations.is_empty() {
            return Err(Error::InvalidFormat(violations));
        }
        Ok(CsrMatrix {
            device: device.clone(),
            rows,
            cols,
            row_ptrs,
            col_idxs,
            values,
        })
    }

    pub fn from_triplets(
        device: &Device,
        rows: usize,
        cols: usize,
        triplets: &[(usize, usize, T)],
    ) -> Result<Self> {
        Ok(csr_from_coo(&CooMatrix::from_triplets(device, rows, cols, triplets)?))
    }

    /// Converts a dense row-major array, keeping only nonzero entries.
    pub fn from_dense(device: &Device, rows: &[Vec<T>]) -> Result<Self> {
        let n_rows = rows.len();
        let n_cols = rows.first().map_or(0, |r| r.len());
        let mut triplets = Vec::new();
        for (i, row) in rows.iter().enumerate() {
            if row.len() != n_cols {
                return Err(Error::dims("from_dense", n_cols, row.len()));
            }
            for (j, &v) in row.iter().enumerate() {
                if v != T::zero() {
                    triplets.push((i, j, v));
                }
            }
        }
        Self::from_triplets(device, n_rows, n_cols, &triplets)
    }

    pub fn identity(device: &Device, n: usize) -> Result<Self> {
        to_index::<I>(n)?;
        Ok(CsrMatrix {
            device: device.clone(),
            rows: n,
            cols: n,
            row_ptrs: (0..=n).map(|i| to_index(i)).collect::<Result<_>>()?,
            col_idxs: (0..n).map(|i| to_index(i)).collect::<Result<_>>()?,
            values: vec![T::one(); n],
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn row_ptrs(&self) -> &[I] {
        &self.row_ptrs
    }

    pub fn col_idxs(&self) -> &[I] {
        &self.col_idxs
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn precision(&self) -> Precision {
        T::PRECISION
    }

    pub fn index_width(&self) -> IndexWidth {
        I::WIDTH
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn validate(&self) -> Vec<Violation> {
        validate_csr(self.rows, self.cols, &self.row_ptrs, &self.col_idxs, self.values.len())
    }

    pub fn to_coo(&self) -> CooMatrix<T, I> {
        crate::sparse::coo_from_csr(self)
    }

    pub fn to_device(&self, device: &Device) -> Self {
        let mut copy = self.clone();
        copy.device = device.clone();
        copy
    }

    /// Storage range of row `r` in `col_idxs` / `values`.
    #[inline]
    pub fn row_range(&self, r: usize) -> std::ops::Range<usize> {
        self.row_ptrs[r].idx()..self.row_ptrs[r + 1].idx()
    }

    /// Column indices and values of row `r`.
    pub fn row(&self, r: usize) -> (&[I], &[T]) {
        let range = self.row_range(r);
        (&self.col_idxs[range.clone()], &self.values[range])
    }

    /// Storage offset of entry `(r, c)` if it is part of the pattern.
    pub fn find(&self, r: usize, c: usize) -> Option<usize> {
        let range = self.row_range(r);
        let cols = &self.col_idxs[range.clone()];
        cols.binary_search_by(|probe| probe.idx().cmp(&c))
            .ok()
            .map(|k| range.start + k)
    }

    pub fn get(&self, r: usize, c: usize) -> T {
        self.find(r, c).map_or(T::zero(), |k| self.values[k])
    }

    /// Stored diagonal entries; `None` where the diagonal is not in the pattern.
    pub fn diagonal(&self) -> Vec<Option<T>> {
        (0..self.rows.min(self.cols))
            .map(|i| self.find(i, i).map(|k| self.values[k]))
            .collect()
    }

    pub fn transpose(&self) -> Self {
        let triplets: Vec<_> = self.triplets().map(|(r, c, v)| (c, r, v)).collect();
        Self::from_triplets(&self.device, self.cols, self.rows, &triplets)
            .expect("transpose of a valid matrix is valid")
    }

    pub fn triplets(&self) -> impl Iterator<Item = (usize, usize, T)> + '_ {
        (0..self.rows).flat_map(move |r| {
            self.row_range(r)
                .map(move |k| (r, self.col_idxs[k].idx(), self.values[k]))
        })
    }

    /// `max_i sum_j |a_ij|`
    pub fn norm_inf(&self) -> T {
        (0..self.rows)
            .map(|r| self.row(r).1.iter().fold(T::zero(), |acc, v| acc + v.abs()))
            .fold(T::zero(), T::max)
    }

    /// First row of block `k` when rows are grouped into `blocks` contiguous
    /// blocks holding roughly equal numbers of stored entries.
    fn row_bound(&self, blocks: usize, k: usize) -> usize {
        if k == 0 {
            return 0;
        }
        if k >= blocks {
            return self.rows;
        }
        let target = even_bound(self.nnz(), blocks, k);
        self.row_ptrs[..self.rows].partition_point(|p| p.idx() < target)
    }

    fn spmv(&self, b: &DenseMatrix<T>, x: &mut DenseMatrix<T>, combine: Combine<T>) -> Result<()> {
        check_apply_dims("spmv_csr", self.size(), b, x)?;
        let ncols = x.cols();
        let x_stride = x.stride();
        let blocks = self.device.blocks().min(self.rows.max(1));
        let b_vals = b.values();
        let b_stride = b.stride();
        self.device.for_each_block(
            x.values_mut(),
            x_stride,
            blocks,
            &|k| self.row_bound(blocks, k),
            &|_, first_row, out: &mut [T]| {
                let n_rows = out.len().checked_div(x_stride).unwrap_or(0);
                for i in 0..n_rows {
                    let range = self.row_range(first_row + i);
                    let out_row = &mut out[i * x_stride..];
                    for c in 0..ncols {
                        let mut sum = T::zero();
                        for k in range.clone() {
                            sum = sum + self.values[k] * b_vals[self.col_idxs[k].idx() * b_stride + c];
                        }
                        out_row[c] = combine.apply(sum, out_row[c]);
                    }
                }
            },
        );
        Ok(())
    }
}

impl<T: Scalar, I: Index> LinOp<T> for CsrMatrix<T, I> {
    fn size(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    fn device(&self) -> &Device {
        &self.device
    }

    fn apply(&self, b: &DenseMatrix<T>, x: &mut DenseMatrix<T>) -> Result<()> {
        self.spmv(b, x, Combine::Overwrite)
    }

    fn apply_advanced(&self, alpha: T, b: &DenseMatrix<T>, beta: T, x: &mut DenseMatrix<T>) -> Result<()> {
        self.spmv(b, x, Combine::Scaled { alpha, beta })
    }
}
