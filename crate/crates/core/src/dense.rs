//! Row-major dense storage and BLAS-1 style kernels.

use crate::device::{even_bound, Device};
use crate::scalar::{Precision, Scalar};
use crate::{Error, Result};

/// Row-major dense matrix. A vector is a matrix with one column.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix<T> {
    device: Device,
    rows: usize,
    cols: usize,
    stride: usize,
    values: Vec<T>,
}

/// Creates a `rows x cols` matrix with every entry equal to `fill`.
pub fn dense_create<T: Scalar>(device: &Device, rows: usize, cols: usize, fill: T) -> DenseMatrix<T> {
    DenseMatrix::filled(device, rows, cols, fill)
}

impl<T: Scalar> DenseMatrix<T> {
    pub fn filled(device: &Device, rows: usize, cols: usize, fill: T) -> Self {
        DenseMatrix {
            device: device.clone(),
            rows,
            cols,
            stride: cols,
            values: vec![fill; rows * cols],
        }
    }

    pub fn zeros(device: &Device, rows: usize, cols: usize) -> Self {
        Self::filled(device, rows, cols, T::zero())
    }

    /// Column vector holding a copy of `values`.
    pub fn vector(device: &Device, values: &[T]) -> Self {
        Self::column(device, values.to_vec())
    }

    /// Column vector taking ownership of `values`.
    pub fn column(device: &Device, values: Vec<T>) -> Self {
        DenseMatrix {
            device: device.clone(),
            rows: values.len(),
            cols: 1,
            stride: 1,
            values,
        }
    }

    /// Wraps a row-major buffer with an explicit row stride.
    pub fn from_parts(
        device: &Device,
        rows: usize,
        cols: usize,
        stride: usize,
        values: Vec<T>,
    ) -> Result<Self> {
        if stride < cols {
            return Err(Error::InvalidArgument(format!(
                "stride {stride} is smaller than the column count {cols}"
            )));
        }
        if values.len() != rows * stride {
            return Err(Error::dims("dense matrix", rows * stride, values.len()));
        }
        Ok(DenseMatrix {
            device: device.clone(),
            rows,
            cols,
            stride,
            values,
        })
    }

    pub fn device(&self) -> &Device {
        &self.device
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn stride(&self) -> usize {
        self.stride
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn precision(&self) -> Precision {
        T::PRECISION
    }

    /// Raw row-major buffer, including stride padding.
    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [T] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<T> {
        self.values
    }

    pub fn get(&self, row: usize, col: usize) -> T {
        assert!(col < self.cols, "column {col} out of range");
        self.values[row * self.stride + col]
    }

    pub fn set(&mut self, row: usize, col: usize, value: T) {
        assert!(col < self.cols, "column {col} out of range");
        self.values[row * self.stride + col] = value;
    }

    pub fn row(&self, row: usize) -> &[T] {
        &self.values[row * self.stride..row * self.stride + self.cols]
    }

    /// Logical entries in row-major order, skipping stride padding.
    pub fn iter(&self) -> impl Iterator<Item = T> + '_ {
        (0..self.rows).flat_map(move |r| self.row(r).iter().copied())
    }

    /// Copies the logical entries into a fresh contiguous vector.
    pub fn to_vec(&self) -> Vec<T> {
        self.iter().collect()
    }

    pub fn fill(&mut self, value: T) {
        let cols = self.cols;
        let stride = self.stride;
        self.for_rows(|_, row| row[..cols].fill(value), stride);
    }

    /// Overwrites `self` with the contents of `src`.
    pub fn copy_from(&mut self, src: &DenseMatrix<T>) -> Result<()> {
        check_same_shape("copy", src, self)?;
        if self.stride == src.stride {
            self.values.copy_from_slice(&src.values);
        } else {
            for r in 0..self.rows {
                let dst = r * self.stride;
                self.values[dst..dst + self.cols].copy_from_slice(src.row(r));
            }
        }
        Ok(())
    }

    /// Eager copy of this matrix onto `device`.
    pub fn to_device(&self, device: &Device) -> Self {
        let mut copy = self.clone();
        copy.device = device.clone();
        copy
    }

    /// Entries equal bit-for-bit (stride padding ignored).
    pub fn bitwise_eq(&self, other: &DenseMatrix<T>) -> bool {
        self.shape() == other.shape()
            && self
                .iter()
                .zip(other.iter())
                .all(|(a, b)| a.to_f64().to_bits() == b.to_f64().to_bits())
    }

    fn for_rows<F>(&mut self, f: F, stride: usize)
    where
        F: Fn(usize, &mut [T]) + Sync,
    {
        let rows = self.rows;
        let blocks = self.device.blocks().min(rows.max(1));
        let device = self.device.clone();
        device.for_each_block(
            &mut self.values,
            stride,
            blocks,
            &|k| even_bound(rows, blocks, k),
            &|_, first, chunk: &mut [T]| {
                for (i, row) in chunk.chunks_mut(stride.max(1)).enumerate() {
                    f(first + i, row);
                }
            },
        );
    }
}

fn check_same_shape<T: Scalar>(op: &'static str, x: &DenseMatrix<T>, y: &DenseMatrix<T>) -> Result<()> {
    if x.shape() != y.shape() {
        return Err(Error::dims(
            op,
            format!("{}x{}", x.rows, x.cols),
            format!("{}x{}", y.rows, y.cols),
        ));
    }
    Ok(())
}

/// Sum of `x[i] * y[i]` over all entries.
///
/// Sequential on the reference device. On a parallel device each thread sums
/// a contiguous row block and the partial sums are added in block order.
pub fn dot<T: Scalar>(x: &DenseMatrix<T>, y: &DenseMatrix<T>) -> Result<T> {
    check_same_shape("dot", x, y)?;
    let rows = x.rows;
    let blocks = x.device.blocks().min(rows.max(1));
    if blocks <= 1 {
        let mut sum = T::zero();
        for r in 0..rows {
            for (&a, &b) in x.row(r).iter().zip(y.row(r)) {
                sum = sum + a * b;
            }
        }
        return Ok(sum);
    }
    let mut partials = vec![T::zero(); blocks];
    x.device.for_each_block(
        &mut partials,
        1,
        blocks,
        &|k| k,
        &|k, _, slot: &mut [T]| {
            let mut sum = T::zero();
            for r in even_bound(rows, blocks, k)..even_bound(rows, blocks, k + 1) {
                if x.cols == 1 {
                    sum = sum + x.values[r * x.stride] * y.values[r * y.stride];
                } else {
                    for (&a, &b) in x.row(r).iter().zip(y.row(r)) {
                        sum = sum + a * b;
                    }
                }
            }
            slot[0] = sum;
        },
    );
    Ok(partials.into_iter().fold(T::zero(), |acc, p| acc + p))
}

/// Euclidean norm over all entries; zero for an empty matrix.
pub fn norm2<T: Scalar>(x: &DenseMatrix<T>) -> T {
    dot(x, x).expect("shape matches itself").sqrt()
}

/// `y := alpha * x + y`. A zero `alpha` leaves `y` untouched.
pub fn axpy<T: Scalar>(alpha: T, x: &DenseMatrix<T>, y: &mut DenseMatrix<T>) -> Result<()> {
    check_same_shape("axpy", x, y)?;
    if alpha == T::zero() {
        return Ok(());
    }
    let cols = y.cols;
    let stride = y.stride;
    y.for_rows(
        |r, row| {
            for (yv, &xv) in row[..cols].iter_mut().zip(x.row(r)) {
                *yv = alpha * xv + *yv;
            }
        },
        stride,
    );
    Ok(())
}

/// `y := alpha * x + beta * y`. With `beta == 0` the old contents of `y` are
/// never read.
pub fn axpby<T: Scalar>(alpha: T, x: &DenseMatrix<T>, beta: T, y: &mut DenseMatrix<T>) -> Result<()> {
    check_same_shape("axpby", x, y)?;
    let cols = y.cols;
    let stride = y.stride;
    y.for_rows(
        |r, row| {
            for (yv, &xv) in row[..cols].iter_mut().zip(x.row(r)) {
                *yv = if beta == T::zero() {
                    alpha * xv
                } else {
                    alpha * xv + beta * *yv
                };
            }
        },
        stride,
    );
    Ok(())
}

/// `x := alpha * x`.
pub fn scal<T: Scalar>(alpha: T, x: &mut DenseMatrix<T>) {
    let cols = x.cols;
    let stride = x.stride;
    x.for_rows(
        |_, row| {
            for v in &mut row[..cols] {
                *v = alpha * *v;
            }
        },
        stride,
    );
}
