//! Matrix Market reader and writer.
//!
//! Reading supports `coordinate` and `array` storage with `real`, `integer`
//! or `pattern` fields and `general`, `symmetric` or `skew-symmetric`
//! symmetry. Symmetric storage is expanded to both triangles. Duplicate
//! coordinates are summed and reported as a warning.
//!
//! Writing always produces `coordinate real general` with values printed as
//! C's `%.17g`, so every `f64` survives a round trip bit for bit.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::device::Device;
use crate::scalar::{Index, Scalar};
use crate::sparse::{CooMatrix, Format, SparseMatrix};
use crate::{Error, MatrixMarketError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MmFormat {
    Coordinate,
    Array,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MmField {
    Real,
    Integer,
    Pattern,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MmSymmetry {
    General,
    Symmetric,
    SkewSymmetric,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MatrixMarketHeader {
    pub format: MmFormat,
    pub field: MmField,
    pub symmetry: MmSymmetry,
}

/// Everything recovered from a Matrix Market document.
#[derive(Debug, Clone)]
pub struct MatrixMarketFile<T, I = i32> {
    pub header: MatrixMarketHeader,
    pub matrix: CooMatrix<T, I>,
    pub warnings: Vec<String>,
}

/// Reads a Matrix Market file into the requested format.
pub fn read_matrix_market<T: Scalar, I: Index>(
    device: &Device,
    path: impl AsRef<Path>,
    format: Format,
) -> Result<SparseMatrix<T, I>> {
    let file = read_matrix_market_file(device, path)?;
    Ok(match format {
        Format::Coo => SparseMatrix::Coo(file.matrix),
        Format::Csr => SparseMatrix::Csr(file.matrix.to_csr()),
    })
}

/// Reads a Matrix Market file, keeping the header and any warnings.
pub fn read_matrix_market_file<T: Scalar, I: Index>(
    device: &Device,
    path: impl AsRef<Path>,
) -> Result<MatrixMarketFile<T, I>> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_matrix_market_at(device, &text, path)
}

/// Parses Matrix Market text held in memory.
pub fn parse_matrix_market<T: Scalar, I: Index>(
    device: &Device,
    text: &str,
) -> Result<MatrixMarketFile<T, I>> {
    parse_matrix_market_at(device, text, Path::new("<memory>"))
}

fn parse_matrix_market_at<T: Scalar, I: Index>(
    device: &Device,
    text: &str,
    path: &Path,
) -> Result<MatrixMarketFile<T, I>> {
    let fail = |line: usize, kind: MatrixMarketError| Error::MatrixMarket {
        path: path.to_path_buf(),
        line,
        kind,
    };
    let mut lines = text.lines().enumerate().map(|(k, l)| (k + 1, l));

    let (banner_line, banner) = lines.next().unwrap_or((1, ""));
    let header = parse_banner(banner).map_err(|kind| fail(banner_line, kind))?;

    let mut content = lines.filter(|(_, l)| {
        let t = l.trim();
        !t.is_empty() && !t.starts_with('%')
    });

    let last_line = text.lines().count().max(1);
    let (size_line, size_text) = content
        .next()
        .ok_or_else(|| fail(last_line, MatrixMarketError::MissingSizeLine))?;
    let sizes: Vec<usize> = size_text
        .split_whitespace()
        .map(usize::from_str)
        .collect::<std::result::Result<_, _>>()
        .map_err(|_| fail(size_line, MatrixMarketError::BadSizeLine(size_text.trim().into())))?;
    let expected_len = match header.format {
        MmFormat::Coordinate => 3,
        MmFormat::Array => 2,
    };
    if sizes.len() != expected_len {
        return Err(fail(size_line, MatrixMarketError::BadSizeLine(size_text.trim().into())));
    }
    let (rows, cols) = (sizes[0], sizes[1]);
    if header.symmetry != MmSymmetry::General && rows != cols {
        return Err(fail(size_line, MatrixMarketError::BadSizeLine(size_text.trim().into())));
    }

    let mut triplets: Vec<(usize, usize, T)> = Vec::new();
    let mut push = |r: usize, c: usize, v: T| {
        triplets.push((r, c, v));
        if r != c {
            match header.symmetry {
                MmSymmetry::General => {}
                MmSymmetry::Symmetric => triplets.push((c, r, v)),
                MmSymmetry::SkewSymmetric => triplets.push((c, r, -v)),
            }
        }
    };

    let declared;
    let mut found = 0usize;
    match header.format {
        MmFormat::Coordinate => {
            declared = sizes[2];
            let tokens_per_entry = if header.field == MmField::Pattern { 2 } else { 3 };
            for (line, entry) in content {
                found += 1;
                if found > declared {
                    return Err(fail(line, MatrixMarketError::CountMismatch { declared, found }));
                }
                let tok: Vec<&str> = entry.split_whitespace().collect();
                let bad = || fail(line, MatrixMarketError::BadEntry(entry.trim().into()));
                if tok.len() != tokens_per_entry {
                    return Err(bad());
                }
                let r = i64::from_str(tok[0]).map_err(|_| bad())?;
                let c = i64::from_str(tok[1]).map_err(|_| bad())?;
                if r < 1 || c < 1 || r as u64 > rows as u64 || c as u64 > cols as u64 {
                    return Err(fail(
                        line,
                        MatrixMarketError::IndexOutOfBounds {
                            row: r,
                            col: c,
                            rows,
                            cols,
                        },
                    ));
                }
                let v = match header.field {
                    MmField::Pattern => T::one(),
                    _ => parse_value::<T>(tok[2]).ok_or_else(bad)?,
                };
                push(r as usize - 1, c as usize - 1, v);
            }
        }
        MmFormat::Array => {
            // column-major; symmetric variants list the lower triangle only
            let mut positions = (0..cols).flat_map(|c| {
                let first = match header.symmetry {
                    MmSymmetry::General => 0,
                    MmSymmetry::Symmetric => c,
                    MmSymmetry::SkewSymmetric => c + 1,
                };
                (first..rows).map(move |r| (r, c))
            });
            declared = positions.clone().count();
            for (line, entry) in content {
                found += 1;
                let Some((r, c)) = positions.next() else {
                    return Err(fail(line, MatrixMarketError::CountMismatch { declared, found }));
                };
                let tok: Vec<&str> = entry.split_whitespace().collect();
                let bad = || fail(line, MatrixMarketError::BadEntry(entry.trim().into()));
                if tok.len() != 1 {
                    return Err(bad());
                }
                let v = parse_value::<T>(tok[0]).ok_or_else(bad)?;
                if v != T::zero() {
                    push(r, c, v);
                }
            }
        }
    }
    if found != declared {
        return Err(fail(last_line, MatrixMarketError::CountMismatch { declared, found }));
    }

    let (matrix, merged) = CooMatrix::assemble(device, rows, cols, &triplets)?;
    let mut warnings = Vec::new();
    if merged > 0 {
        warnings.push(format!(
            "{}: {merged} duplicate entries were summed",
            path.display()
        ));
    }
    Ok(MatrixMarketFile {
        header,
        matrix,
        warnings,
    })
}

fn parse_banner(line: &str) -> std::result::Result<MatrixMarketHeader, MatrixMarketError> {
    let malformed = || MatrixMarketError::MalformedBanner(line.trim().into());
    let tok: Vec<String> = line.split_whitespace().map(str::to_ascii_lowercase).collect();
    if tok.len() != 5 || tok[0] != "%%matrixmarket" || tok[1] != "matrix" {
        return Err(malformed());
    }
    let format = match tok[2].as_str() {
        "coordinate" => MmFormat::Coordinate,
        "array" => MmFormat::Array,
        _ => return Err(malformed()),
    };
    let field = match tok[3].as_str() {
        "real" | "double" => MmField::Real,
        "integer" => MmField::Integer,
        "pattern" if format == MmFormat::Coordinate => MmField::Pattern,
        other => return Err(MatrixMarketError::UnsupportedField(other.into())),
    };
    let symmetry = match tok[4].as_str() {
        "general" => MmSymmetry::General,
        "symmetric" => MmSymmetry::Symmetric,
        "skew-symmetric" => MmSymmetry::SkewSymmetric,
        other => return Err(MatrixMarketError::UnsupportedSymmetry(other.into())),
    };
    Ok(MatrixMarketHeader {
        format,
        field,
        symmetry,
    })
}

fn parse_value<T: Scalar>(tok: &str) -> Option<T> {
    tok.parse::<T>().ok()
}

/// Renders `m` as `coordinate real general` Matrix Market text.
pub fn format_matrix_market<T: Scalar, I: Index>(m: &SparseMatrix<T, I>) -> String {
    let coo = m.to_coo();
    let mut out = String::with_capacity(32 + coo.nnz() * 40);
    out.push_str("%%MatrixMarket matrix coordinate real general\n");
    let _ = writeln!(out, "{} {} {}", coo.rows(), coo.cols(), coo.nnz());
    for (r, c, v) in coo.triplets() {
        let _ = writeln!(out, "{} {} {}", r + 1, c + 1, format_g17(v.to_f64()));
    }
    out
}

pub fn write_matrix_market<T: Scalar, I: Index>(
    m: &SparseMatrix<T, I>,
    path: impl AsRef<Path>,
) -> Result<()> {
    let path = path.as_ref();
    fs::write(path, format_matrix_market(m)).map_err(|source| Error::Io {
        path: PathBuf::from(path),
        source,
    })
}

/// Formats `v` like C's `printf("%.17g", v)`.
pub fn format_g17(v: f64) -> String {
    const PRECISION: i32 = 17;
    if v.is_nan() {
        return if v.is_sign_negative() { "-nan" } else { "nan" }.into();
    }
    if v.is_infinite() {
        return if v < 0.0 { "-inf" } else { "inf" }.into();
    }
    let sci = format!("{:.*e}", (PRECISION - 1) as usize, v);
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if !(-4..PRECISION).contains(&exp) {
        let mantissa = strip_zeros(mantissa);
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{mantissa}e{sign}{:02}", exp.abs())
    } else {
        let decimals = (PRECISION - 1 - exp) as usize;
        strip_zeros(&format!("{v:.decimals$}")).to_string()
    }
}

fn strip_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}
