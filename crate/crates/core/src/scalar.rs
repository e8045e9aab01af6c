//! Value and index type descriptors.
//!
//! Kernels are generic over [`Scalar`] and [`Index`] and get monomorphized
//! once per supported type, so every `(precision, index width)` combination
//! has its own instantiation. The runtime tags [`Precision`] and
//! [`IndexWidth`] describe a buffer's element type for reporting and for
//! dispatch at API boundaries.

use std::fmt::{Debug, Display};
use std::iter::Sum;
use std::str::FromStr;

use num_traits::Float;

/// Floating-point precision of a value buffer.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Precision {
    Single,
    Double,
}

impl Precision {
    pub fn size_bytes(self) -> usize {
        match self {
            Precision::Single => 4,
            Precision::Double => 8,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Precision::Single => "single",
            Precision::Double => "double",
        }
    }
}

impl Display for Precision {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Precision {
    type Err = crate::Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "single" | "float" | "f32" => Ok(Precision::Single),
            "double" | "f64" => Ok(Precision::Double),
            "half" => Err(crate::Error::Unsupported(
                "half precision is not available".into(),
            )),
            other => Err(crate::Error::Unsupported(format!("precision `{other}`"))),
        }
    }
}

/// Width of the integer index arrays of a sparse matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum IndexWidth {
    I32,
    I64,
}

impl IndexWidth {
    pub fn size_bytes(self) -> usize {
        match self {
            IndexWidth::I32 => 4,
            IndexWidth::I64 => 8,
        }
    }
}

/// Floating-point element type of dense and sparse buffers.
pub trait Scalar:
    Float + Sum + FromStr + Display + Debug + Default + Send + Sync + 'static
{
    const PRECISION: Precision;

    fn from_f64(v: f64) -> Self;
    fn to_f64(self) -> f64;
}

impl Scalar for f32 {
    const PRECISION: Precision = Precision::Single;

    #[inline]
    fn from_f64(v: f64) -> Self {
        v as f32
    }

    #[inline]
    fn to_f64(self) -> f64 {
        self as f64
    }
}

impl Scalar for f64 {
    const PRECISION: Precision = Precision::Double;

    #[inline]
    fn from_f64(v: f64) -> Self {
        v
    }

    #[inline]
    fn to_f64(self) -> f64 {
        self
    }
}

/// Signed integer type used for sparse index arrays.
pub trait Index: Copy + Ord + Debug + Display + Default + Send + Sync + 'static {
    const WIDTH: IndexWidth;

    /// Widening conversion, used when validating possibly negative input.
    fn as_i64(self) -> i64;

    /// Narrowing conversion; `None` when `v` does not fit.
    fn from_usize(v: usize) -> Option<Self>;

    /// Index into a buffer. Only meaningful for validated, non-negative indices.
    #[inline]
    fn idx(self) -> usize {
        self.as_i64() as usize
    }
}

impl Index for i32 {
    const WIDTH: IndexWidth = IndexWidth::I32;

    #[inline]
    fn as_i64(self) -> i64 {
        self as i64
    }

    #[inline]
    fn from_usize(v: usize) -> Option<Self> {
        i32::try_from(v).ok()
    }
}

impl Index for i64 {
    const WIDTH: IndexWidth = IndexWidth::I64;

    #[inline]
    fn as_i64(self) -> i64 {
        self
    }

    #[inline]
    fn from_usize(v: usize) -> Option<Self> {
        i64::try_from(v).ok()
    }
}

pub(crate) fn to_index<I: Index>(v: usize) -> crate::Result<I> {
    I::from_usize(v).ok_or(crate::Error::IndexOverflow(v))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn descriptor_sizes() {
        assert_eq!(<f32 as Scalar>::PRECISION.size_bytes(), 4);
        assert_eq!(<f64 as Scalar>::PRECISION.size_bytes(), 8);
        assert_eq!(<i32 as Index>::WIDTH.size_bytes(), 4);
        assert_eq!(<i64 as Index>::WIDTH.size_bytes(), 8);
    }

    #[test]
    fn precision_names() {
        assert_eq!("double".parse::<Precision>().unwrap(), Precision::Double);
        assert_eq!("Float".parse::<Precision>().unwrap(), Precision::Single);
        assert!("half".parse::<Precision>().is_err());
    }

    #[test]
    fn index_overflow() {
        assert!(to_index::<i32>(i32::MAX as usize + 1).is_err());
        assert_eq!(to_index::<i64>(i32::MAX as usize + 1).unwrap(), 1i64 << 31);
    }
}
