use std::fmt;

use crate::scalar::Index;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ViolationKind {
    /// `row_ptrs` does not have `rows + 1` entries.
    RowPtrLength,
    /// `row_ptrs[0] != 0`.
    RowPtrStart,
    /// `row_ptrs[k] < row_ptrs[k - 1]`.
    RowPtrDecreasing,
    /// `row_ptrs[rows]` differs from the number of stored entries.
    RowPtrEnd,
    /// Index and value arrays have different lengths.
    LengthMismatch,
    RowOutOfBounds,
    ColOutOfBounds,
    /// Entries are not in row-major, column-increasing order.
    Unsorted,
    Duplicate,
}

/// One broken format invariant and the array offset where it was detected.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Violation {
    pub kind: ViolationKind,
    pub offset: usize,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let what = match self.kind {
            ViolationKind::RowPtrLength => "row_ptrs length must be rows+1",
            ViolationKind::RowPtrStart => "row_ptrs must start at 0",
            ViolationKind::RowPtrDecreasing => "non-decreasing row_ptrs",
            ViolationKind::RowPtrEnd => "row_ptrs must end at nnz",
            ViolationKind::LengthMismatch => "array length mismatch",
            ViolationKind::RowOutOfBounds => "row index out of bounds",
            ViolationKind::ColOutOfBounds => "column index out of bounds",
            ViolationKind::Unsorted => "entries out of canonical order",
            ViolationKind::Duplicate => "duplicate entry",
        };
        write!(f, "{what} at {}", self.offset)
    }
}

fn push(out: &mut Vec<Violation>, kind: ViolationKind, offset: usize) {
    out.push(Violation { kind, offset });
}

/// Checks every CSR invariant and returns all violations found.
pub fn validate_csr<I: Index>(
    rows: usize,
    cols: usize,
    row_ptrs: &[I],
    col_idxs: &[I],
    n_values: usize,
) -> Vec<Violation> {
    let mut out = Vec::new();
    let nnz = col_idxs.len();
    if n_values != nnz {
        push(&mut out, ViolationKind::LengthMismatch, nnz.min(n_values));
    }
    for (k, c) in col_idxs.iter().enumerate() {
        let c = c.as_i64();
        if c < 0 || c as u64 >= cols as u64 {
            push(&mut out, ViolationKind::ColOutOfBounds, k);
        }
    }
    if row_ptrs.len() != rows + 1 {
        push(&mut out, ViolationKind::RowPtrLength, row_ptrs.len());
        return out;
    }
    if row_ptrs[0].as_i64() != 0 {
        push(&mut out, ViolationKind::RowPtrStart, 0);
    }
    let mut monotone = true;
    for k in 1..row_ptrs.len() {
        if row_ptrs[k] < row_ptrs[k - 1] {
            push(&mut out, ViolationKind::RowPtrDecreasing, k);
            monotone = false;
        }
    }
    if row_ptrs[rows].as_i64() != nnz as i64 {
        push(&mut out, ViolationKind::RowPtrEnd, rows);
    }
    if !monotone || row_ptrs[0].as_i64() < 0 || row_ptrs[rows].as_i64() > nnz as i64 {
        return out;
    }
    for r in 0..rows {
        let (lo, hi) = (row_ptrs[r].idx(), row_ptrs[r + 1].idx());
        for k in lo + 1..hi {
            if col_idxs[k] == col_idxs[k - 1] {
                push(&mut out, ViolationKind::Duplicate, k);
            } else if col_idxs[k] < col_idxs[k - 1] {
                push(&mut out, ViolationKind::Unsorted, k);
            }
        }
    }
    out
}

/// Checks every COO invariant and returns all violations found.
pub fn validate_coo<I: Index>(
    rows: usize,
    cols: usize,
    row_idxs: &[I],
    col_idxs: &[I],
    n_values: usize,
) -> Vec<Violation> {
    let mut out = Vec::new();
    if row_idxs.len() != col_idxs.len() || row_idxs.len() != n_values {
        push(
            &mut out,
            ViolationKind::LengthMismatch,
            row_idxs.len().min(col_idxs.len()).min(n_values),
        );
    }
    let n = row_idxs.len().min(col_idxs.len());
    for k in 0..n {
        let (r, c) = (row_idxs[k].as_i64(), col_idxs[k].as_i64());
        if r < 0 || r as u64 >= rows as u64 {
            push(&mut out, ViolationKind::RowOutOfBounds, k);
        }
        if c < 0 || c as u64 >= cols as u64 {
            push(&mut out, ViolationKind::ColOutOfBounds, k);
        }
        if k > 0 {
            let prev = (row_idxs[k - 1], col_idxs[k - 1]);
            let cur = (row_idxs[k], col_idxs[k]);
            if cur == prev {
                push(&mut out, ViolationKind::Duplicate, k);
            } else if cur < prev {
                push(&mut out, ViolationKind::Unsorted, k);
            }
        }
    }
    out
}
