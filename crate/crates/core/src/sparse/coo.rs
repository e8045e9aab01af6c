use crate::dense::DenseMatrix;
use crate::device::{even_bound, Device};
use crate::linop::{check_apply_dims, LinOp};
use crate::scalar::{to_index, Index, IndexWidth, Precision, Scalar};
use crate::sparse::{validate_coo, Combine, CsrMatrix};
use crate::{Error, Result};

/// Coordinate-format sparse matrix with entries sorted by `(row, col)`.
#[derive(Debug, Clone, PartialEq)]
pub struct CooMatrix<T, I = i32> {
    device: Device,
    rows: usize,
    cols: usize,
    row_idxs: Vec<I>,
    col_idxs: Vec<I>,
    values: Vec<T>,
}

/// Builds a canonical COO matrix from unordered triplets.
///
/// Entries are sorted by `(row, col)`; duplicate positions are summed in
/// input order.
pub fn coo_from_triplets<T: Scalar, I: Index>(
    device: &Device,
    rows: usize,
    cols: usize,
    triplets: &[(usize, usize, T)],
) -> Result<CooMatrix<T, I>> {
    CooMatrix::from_triplets(device, rows, cols, triplets)
}

/// Expands CSR row pointers into explicit row indices.
pub fn coo_from_csr<T: Scalar, I: Index>(m: &CsrMatrix<T, I>) -> CooMatrix<T, I> {
    let mut row_idxs = Vec::with_capacity(m.nnz());
    let ptrs = m.row_ptrs();
    for r in 0..m.rows() {
        // rows < nnz-bound, so the index always fits
        let ri = I::from_usize(r).expect("row index fits index type");
        row_idxs.extend(std::iter::repeat_n(ri, ptrs[r + 1].idx() - ptrs[r].idx()));
    }
    CooMatrix {
        device: m.device().clone(),
        rows: m.rows(),
        cols: m.cols(),
        row_idxs,
        col_idxs: m.col_idxs().to_vec(),
        values: m.values().to_vec(),
    }
}

impl<T: Scalar, I: Index> CooMatrix<T, I> {
    pub fn from_triplets(
        device: &Device,
        rows: usize,
        cols: usize,
        triplets: &[(usize, usize, T)],
    ) -> Result<Self> {
        Self::assemble(device, rows, cols, triplets).map(|(m, _)| m)
    }

    /// Like [`CooMatrix::from_triplets`], also returning how many input
    /// triplets were merged into an earlier entry at the same position.
    pub fn assemble(
        device: &Device,
        rows: usize,
        cols: usize,
        triplets: &[(usize, usize, T)],
    ) -> Result<(Self, usize)> {
        for &(r, c, _) in triplets {
            if r >= rows || c >= cols {
                return Err(Error::IndexBounds {
                    row: r as i64,
                    col: c as i64,
                    rows,
                    cols,
                });
            }
        }
        to_index::<I>(rows)?;
        to_index::<I>(cols)?;
        let mut order: Vec<usize> = (0..triplets.len()).collect();
        order.sort_by_key(|&k| (triplets[k].0, triplets[k].1));

        let mut row_idxs = Vec::with_capacity(triplets.len());
        let mut col_idxs = Vec::with_capacity(triplets.len());
        let mut values: Vec<T> = Vec::with_capacity(triplets.len());
        let mut last: Option<(usize, usize)> = None;
        let mut merged = 0;
        for k in order {
            let (r, c, v) = triplets[k];
            if last == Some((r, c)) {
                let tail = values.last_mut().expect("previous entry exists");
                *tail = *tail + v;
                merged += 1;
            } else {
                row_idxs.push(to_index(r)?);
                col_idxs.push(to_index(c)?);
                values.push(v);
                last = Some((r, c));
            }
        }
        Ok((
            CooMatrix {
                device: device.clone(),
                rows,
                cols,
                row_idxs,
                col_idxs,
                values,
            },
            merged,
        ))
    }

    /// Wraps raw arrays, rejecting anything that is not canonical.
    pub fn from_parts(
        device: &Device,
        rows: usize,
        cols: usize,
        row_idxs: Vec<I>,
        col_idxs: Vec<I>,
        values: Vec<T>,
    ) -> Result<Self> {
        let violations = validate_coo(rows, cols, &row_idxs, &col_idxs, values.len());
        if !violations.is_empty() {
            return Err(Error::InvalidFormat(violations));
        }
        Ok(CooMatrix {
            device: device.clone(),
            rows,
            cols,
            row_idxs,
            col_idxs,
            values,
        })
    }

    pub fn identity(device: &Device, n: usize) -> Result<Self> {
        let triplets: Vec<_> = (0..n).map(|i| (i, i, T::one())).collect();
        Self::from_triplets(device, n, n, &triplets)
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

    pub fn row_idxs(&self) -> &[I] {
        &self.row_idxs
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

    pub fn validate(&self) -> Vec<crate::sparse::Violation> {
        validate_coo(self.rows, self.cols, &self.row_idxs, &self.col_idxs, self.values.len())
    }

    pub fn to_csr(&self) -> CsrMatrix<T, I> {
        crate::sparse::csr_from_coo(self)
    }

    /// `(row, col, value)` for every stored entry, in storage order.
    pub fn triplets(&self) -> impl Iterator<Item = (usize, usize, T)> + '_ {
        self.row_idxs
            .iter()
            .zip(&self.col_idxs)
            .zip(&self.values)
            .map(|((r, c), v)| (r.idx(), c.idx(), *v))
    }

    pub fn to_device(&self, device: &Device) -> Self {
        let mut copy = self.clone();
        copy.device = device.clone();
        copy
    }

    /// First entry of block `k` when stored entries are split into `blocks`
    /// chunks. Chunk starts are moved forward to the next row start so that
    /// a row cut by an even split is finished by the lower-index block.
    fn entry_bound(&self, blocks: usize, k: usize) -> usize {
        let nnz = self.nnz();
        let mut e = even_bound(nnz, blocks, k);
        if e == 0 || e >= nnz {
            return e.min(nnz);
        }
        let row = self.row_idxs[e - 1];
        // rows are sorted, so the first entry past `row` is a partition point
        e += self.row_idxs[e..].partition_point(|&r| r == row);
        e
    }

    fn row_bound(&self, blocks: usize, k: usize) -> usize {
        if k == 0 {
            return 0;
        }
        let e = self.entry_bound(blocks, k);
        if k == blocks || e >= self.nnz() {
            self.rows
        } else {
            self.row_idxs[e].idx()
        }
    }

    fn spmv(&self, b: &DenseMatrix<T>, x: &mut DenseMatrix<T>, combine: Combine<T>) -> Result<()> {
        check_apply_dims("spmv_coo", self.size(), b, x)?;
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
            &|k, first_row, out: &mut [T]| {
                let last_row = self.row_bound(blocks, k + 1);
                let mut e = self.entry_bound(blocks, k);
                for row in first_row..last_row {
                    let start = e;
                    let mut end = start;
                    while end < self.nnz() && self.row_idxs[end].idx() == row {
                        end += 1;
                    }
                    let out_row = &mut out[(row - first_row) * x_stride..];
                    for c in 0..ncols {
                        let mut sum = T::zero();
                        for j in start..end {
                            sum = sum + self.values[j] * b_vals[self.col_idxs[j].idx() * b_stride + c];
                        }
                        out_row[c] = combine.apply(sum, out_row[c]);
                    }
                    e = end;
                }
            },
        );
        Ok(())
    }
}

impl<T: Scalar, I: Index> LinOp<T> for CooMatrix<T, I> {
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
