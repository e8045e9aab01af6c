//! Dense reference computations used as test oracles.
//!
//! Everything here works on plain `Vec<Vec<f64>>` row-major arrays and shares
//! no code with the library under test.

pub type Dense = Vec<Vec<f64>>;

pub fn zeros(rows: usize, cols: usize) -> Dense {
    vec![vec![0.0; cols]; rows]
}

/// Accumulates `(row, col, value)` entries; duplicates add up.
pub fn densify(rows: usize, cols: usize, entries: impl IntoIterator<Item = (usize, usize, f64)>) -> Dense {
    let mut a = zeros(rows, cols);
    for (i, j, v) in entries {
        a[i][j] += v;
    }
    a
}

/// Expands raw CSR arrays.
pub fn densify_csr(rows: usize, cols: usize, row_ptrs: &[usize], col_idxs: &[usize], values: &[f64]) -> Dense {
    let mut a = zeros(rows, cols);
    for i in 0..rows {
        for k in row_ptrs[i]..row_ptrs[i + 1] {
            a[i][col_idxs[k]] += values[k];
        }
    }
    a
}

pub fn matvec(a: &Dense, b: &[f64]) -> Vec<f64> {
    a.iter()
        .map(|row| row.iter().zip(b).map(|(x, y)| x * y).sum())
        .collect()
}

pub fn matmul(a: &Dense, b: &Dense) -> Dense {
    let inner = b.len();
    let cols = b.first().map_or(0, Vec::len);
    a.iter()
        .map(|row| {
            (0..cols)
                .map(|j| (0..inner).map(|k| row[k] * b[k][j]).sum())
                .collect()
        })
        .collect()
}

pub fn transpose(a: &Dense) -> Dense {
    let cols = a.first().map_or(0, Vec::len);
    (0..cols).map(|j| a.iter().map(|row| row[j]).collect()).collect()
}

/// Maximum absolute row sum.
pub fn norm_inf(a: &Dense) -> f64 {
    a.iter()
        .map(|row| row.iter().map(|v| v.abs()).sum::<f64>())
        .fold(0.0, f64::max)
}

pub fn vec_norm_inf(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

pub fn vec_norm2(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Solves `a x = b` by Gaussian elimination with partial pivoting.
/// Returns `None` for a numerically singular matrix.
pub fn solve(a: &Dense, b: &[f64]) -> Option<Vec<f64>> {
    let n = a.len();
    let mut m: Dense = a.iter().zip(b).map(|(row, &bi)| {
        let mut r = row.clone();
        r.push(bi);
        r
    }).collect();
    for k in 0..n {
        let p = (k..n).max_by(|&i, &j| m[i][k].abs().total_cmp(&m[j][k].abs()))?;
        if m[p][k] == 0.0 {
            return None;
        }
        m.swap(k, p);
        for i in k + 1..n {
            let f = m[i][k] / m[k][k];
            for j in k..=n {
                m[i][j] -= f * m[k][j];
            }
        }
    }
    let mut x = vec![0.0; n];
    for i in (0..n).rev() {
        let s: f64 = (i + 1..n).map(|j| m[i][j] * x[j]).sum();
        x[i] = (m[i][n] - s) / m[i][i];
    }
    Some(x)
}

/// Doolittle LU without pivoting: `a = l u` with unit lower `l`.
pub fn lu_nopivot(a: &Dense) -> Option<(Dense, Dense)> {
    let n = a.len();
    let mut l = zeros(n, n);
    let mut u = zeros(n, n);
    for i in 0..n {
        for j in i..n {
            u[i][j] = a[i][j] - (0..i).map(|k| l[i][k] * u[k][j]).sum::<f64>();
        }
        if u[i][i] == 0.0 {
            return None;
        }
        l[i][i] = 1.0;
        for j in i + 1..n {
            l[j][i] = (a[j][i] - (0..i).map(|k| l[j][k] * u[k][i]).sum::<f64>()) / u[i][i];
        }
    }
    Some((l, u))
}

/// Median of a non-empty sample, averaging the middle pair for even sizes.
pub fn median(samples: &[f64]) -> f64 {
    let mut s = samples.to_vec();
    s.sort_by(f64::total_cmp);
    let n = s.len();
    if n % 2 == 1 {
        s[n / 2]
    } else {
        (s[n / 2 - 1] + s[n / 2]) / 2.0
    }
}
