//! Deterministic test and benchmark matrices.
//!
//! Random generators take an explicit seed and use ChaCha8, so the same seed
//! gives the same matrix on every platform.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::device::Device;
use crate::scalar::{Index, Scalar};
use crate::sparse::CsrMatrix;
use crate::Result;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// 5-point Laplacian on a `grid_n x grid_n` grid (order `grid_n^2`).
pub fn laplacian_2d<T: Scalar, I: Index>(device: &Device, grid_n: usize) -> Result<CsrMatrix<T, I>> {
    let n = grid_n * grid_n;
    let mut t = Vec::with_capacity(5 * n);
    for gy in 0..grid_n {
        for gx in 0..grid_n {
            let i = gy * grid_n + gx;
            if gy > 0 {
                t.push((i, i - grid_n, -T::one()));
            }
            if gx > 0 {
                t.push((i, i - 1, -T::one()));
            }
            t.push((i, i, T::from_f64(4.0)));
            if gx + 1 < grid_n {
                t.push((i, i + 1, -T::one()));
            }
            if gy + 1 < grid_n {
                t.push((i, i + grid_n, -T::one()));
            }
        }
    }
    CsrMatrix::from_triplets(device, n, n, &t)
}

pub fn diagonal<T: Scalar, I: Index>(device: &Device, values: &[T]) -> Result<CsrMatrix<T, I>> {
    let t: Vec<_> = values.iter().enumerate().map(|(i, &v)| (i, i, v)).collect();
    CsrMatrix::from_triplets(device, values.len(), values.len(), &t)
}

/// Positions drawn independently with probability `density`, values uniform
/// in `[-1, 1)`.
pub fn random_sparse<T: Scalar, I: Index>(
    device: &Device,
    rows: usize,
    cols: usize,
    density: f64,
    seed: u64,
) -> Result<CsrMatrix<T, I>> {
    let mut rng = rng(seed);
    let mut t = Vec::new();
    for i in 0..rows {
        for j in 0..cols {
            if rng.gen::<f64>() < density {
                t.push((i, j, T::from_f64(rng.gen_range(-1.0..1.0))));
            }
        }
    }
    CsrMatrix::from_triplets(device, rows, cols, &t)
}

/// Like [`random_sparse`] but samples about `nnz_per_row` entries per row
/// directly, for matrices too large to scan densely.
pub fn random_rows<T: Scalar, I: Index>(
    device: &Device,
    rows: usize,
    cols: usize,
    nnz_per_row: usize,
    seed: u64,
) -> Result<CsrMatrix<T, I>> {
    let mut rng = rng(seed);
    let mut t = Vec::with_capacity(rows * nnz_per_row);
    for i in 0..rows {
        for _ in 0..nnz_per_row {
            t.push((i, rng.gen_range(0..cols), T::from_f64(rng.gen_range(-1.0..1.0))));
        }
    }
    CsrMatrix::from_triplets(device, rows, cols, &t)
}

/// Random square matrix with a strictly dominant positive diagonal.
pub fn random_diag_dominant<T: Scalar, I: Index>(
    device: &Device,
    n: usize,
    density: f64,
    seed: u64,
) -> Result<CsrMatrix<T, I>> {
    let off = random_sparse::<f64, I>(device, n, n, density, seed)?;
    let mut row_sums = vec![0.0; n];
    let mut t = Vec::with_capacity(off.nnz() + n);
    for (i, j, v) in off.triplets() {
        if i != j {
            row_sums[i] += v.abs();
            t.push((i, j, T::from_f64(v)));
        }
    }
    t.extend(row_sums.iter().enumerate().map(|(i, s)| (i, i, T::from_f64(s + 1.0))));
    CsrMatrix::from_triplets(device, n, n, &t)
}

/// Random symmetric positive definite matrix: a symmetric off-diagonal
/// pattern plus a dominant diagonal.
pub fn random_spd<T: Scalar, I: Index>(
    device: &Device,
    n: usize,
    density: f64,
    seed: u64,
) -> Result<CsrMatrix<T, I>> {
    let off = random_sparse::<f64, I>(device, n, n, density, seed)?;
    let mut row_sums = vec![0.0; n];
    let mut t = Vec::with_capacity(2 * off.nnz() + n);
    for (i, j, v) in off.triplets() {
        if j < i {
            row_sums[i] += v.abs();
            row_sums[j] += v.abs();
            t.push((i, j, T::from_f64(v)));
            t.push((j, i, T::from_f64(v)));
        }
    }
    t.extend(row_sums.iter().enumerate().map(|(i, s)| (i, i, T::from_f64(s + 1.0))));
    CsrMatrix::from_triplets(device, n, n, &t)
}

/// Vector with entries uniform in `[-1, 1)`.
pub fn random_vector<T: Scalar>(n: usize, seed: u64) -> Vec<T> {
    let mut rng = rng(seed);
    (0..n).map(|_| T::from_f64(rng.gen_range(-1.0..1.0))).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn laplacian_shape() {
        let a = laplacian_2d::<f64, i32>(&Device::reference(), 3).unwrap();
        assert_eq!(a.rows(), 9);
        assert_eq!(a.nnz(), 9 + 2 * 12);
        assert_eq!(a.get(4, 4), 4.0);
        assert_eq!(a.get(4, 1), -1.0);
        assert_eq!(a.transpose(), a);
    }

    #[test]
    fn generators_are_reproducible() {
        let d = Device::reference();
        let a = random_sparse::<f64, i32>(&d, 30, 20, 0.1, 7).unwrap();
        assert_eq!(a, random_sparse::<f64, i32>(&d, 30, 20, 0.1, 7).unwrap());
        assert_ne!(a, random_sparse::<f64, i32>(&d, 30, 20, 0.1, 8).unwrap());
    }

    #[test]
    fn spd_is_symmetric_and_dominant() {
        let a = random_spd::<f64, i32>(&Device::reference(), 40, 0.1, 3).unwrap();
        assert_eq!(a.transpose(), a);
        for i in 0..40 {
            let (cols, vals) = a.row(i);
            let off: f64 = cols.iter().zip(vals).filter(|(c, _)| c.idx() != i).map(|(_, v)| v.abs()).sum();
            assert!(a.get(i, i) > off);
        }
    }
}
