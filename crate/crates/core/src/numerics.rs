//! Small dense complex linear algebra for the precoders.
//!
//! Matrices are row-major. Channel matrices keep one receiver per row and one
//! transmit antenna per column, so the effective channel of a precoder `W`
//! is `H·W`.

use std::fmt;
use std::ops::{Index, IndexMut};

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Pivots at or below this value are treated as zero during factorization.
pub const SINGULAR_PIVOT: f64 = 1e-12;

/// Non-empty vector of finite complex entries.
#[derive(Clone, PartialEq)]
pub struct CVector(Vec<Complex64>);

impl CVector {
    pub fn new(entries: Vec<Complex64>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::DimensionMismatch("vector must have at least one entry".into()));
        }
        if !entries.iter().all(|z| z.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(CVector(entries))
    }

    pub fn from_real(entries: &[f64]) -> Result<Self> {
        Self::new(entries.iter().map(|&x| Complex64::new(x, 0.0)).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.0
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Complex64> {
        self.0.iter()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.0.iter().map(|z| z.norm_sqr()).sum()
    }

    /// Bilinear product `Σ self[n]·other[n]` (no conjugation): the received
    /// amplitude when `self` is a channel row and `other` a precoder column.
    pub fn dot(&self, other: &[Complex64]) -> Complex64 {
        debug_assert_eq!(self.0.len(), other.len());
        self.0.iter().zip(other).map(|(a, b)| a * b).sum()
    }

    pub fn into_inner(self) -> Vec<Complex64> {
        self.0
    }
}

impl Index<usize> for CVector {
    type Output = Complex64;
    fn index(&self, i: usize) -> &Complex64 {
        &self.0[i]
    }
}

impl fmt::Debug for CVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.0.iter()).finish()
    }
}

/// Dense complex matrix, row-major.
#[derive(Clone, PartialEq)]
pub struct CMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl CMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        CMatrix { rows, cols, data: vec![Complex64::new(0.0, 0.0); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Complex64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_row_major(rows: usize, cols: usize, data: Vec<Complex64>) -> Result<Self> {
        if rows * cols != data.len() {
            return Err(Error::DimensionMismatch(format!(
                "{rows}x{cols} matrix needs {} entries, got {}",
                rows * cols,
                data.len()
            )));
        }
        if !data.iter().all(|z| z.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(CMatrix { rows, cols, data })
    }

    /// Stacks vectors as matrix rows. All rows must share one length.
    pub fn from_rows<'a, I>(rows: I) -> Result<Self>
    where
        I: IntoIterator<Item = &'a CVector>,
    {
        let mut data = Vec::new();
        let mut n_rows = 0;
        let mut cols = None;
        for row in rows {
            match cols {
                None => cols = Some(row.len()),
                Some(c) if c != row.len() => {
                    return Err(Error::DimensionMismatch(format!(
                        "row {n_rows} has length {}, expected {c}",
                        row.len()
                    )))
                }
                _ => {}
            }
            data.extend_from_slice(row.as_slice());
            n_rows += 1;
        }
        let cols = cols.ok_or_else(|| Error::DimensionMismatch("no rows supplied".into()))?;
        Ok(CMatrix { rows: n_rows, cols, data })
    }

    pub fn from_real(rows: usize, cols: usize, data: &[f64]) -> Result<Self> {
        Self::from_row_major(rows, cols, data.iter().map(|&x| Complex64::new(x, 0.0)).collect())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[Complex64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<Complex64> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn frobenius_norm_sqr(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn column_norm_sqr(&self, j: usize) -> f64 {
        (0..self.rows).map(|i| self[(i, j)].norm_sqr()).sum()
    }

    pub fn scale(&self, factor: f64) -> CMatrix {
        CMatrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(|z| z * factor).collect() }
    }

    pub fn sub(&self, other: &CMatrix) -> Result<CMatrix> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::DimensionMismatch(format!(
                "cannot subtract {}x{} from {}x{}",
                other.rows, other.cols, self.rows, self.cols
            )));
        }
        let data = self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect();
        Ok(CMatrix { rows: self.rows, cols: self.cols, data })
    }

    /// Keeps the first `n` columns.
    pub fn leading_columns(&self, n: usize) -> CMatrix {
        let n = n.min(self.cols);
        let mut out = CMatrix::zeros(self.rows, n);
        for i in 0..self.rows {
            for j in 0..n {
                out[(i, j)] = self[(i, j)];
            }
        }
        out
    }
}

impl Index<(usize, usize)> for CMatrix {
    type Output = Complex64;
    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for CMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.data[i * self.cols + j]
    }
}

impl fmt::Debug for CMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "CMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            writeln!(f, "  {:?}", self.row(i))?;
        }
        write!(f, "]")
    }
}

/// Conjugate transpose.
pub fn hermitian(m: &CMatrix) -> CMatrix {
    let mut out = CMatrix::zeros(m.cols, m.rows);
    for i in 0..m.rows {
        for j in 0..m.cols {
            out[(j, i)] = m[(i, j)].conj();
        }
    }
    out
}

pub fn matmul(a: &CMatrix, b: &CMatrix) -> Result<CMatrix> {
    if a.cols != b.rows {
        return Err(Error::DimensionMismatch(format!(
            "cannot multiply {}x{} by {}x{}",
            a.rows, a.cols, b.rows, b.cols
        )));
    }
    let mut out = CMatrix::zeros(a.rows, b.cols);
    for i in 0..a.rows {
        for k in 0..a.cols {
            let aik = a[(i, k)];
            if aik == Complex64::new(0.0, 0.0) {
                continue;
            }
            for j in 0..b.cols {
                out[(i, j)] += aik * b[(k, j)];
            }
        }
    }
    Ok(out)
}

/// Solves `a·X = b` for Hermitian positive definite `a` via Cholesky
/// (`a = L·Lᴴ`), then forward and back substitution per right-hand column.
pub fn solve_hermitian(a: &CMatrix, b: &CMatrix) -> Result<CMatrix> {
    let n = a.rows;
    if a.cols != n {
        return Err(Error::DimensionMismatch(format!("{}x{} matrix is not square", a.rows, a.cols)));
    }
    if b.rows != n {
        return Err(Error::DimensionMismatch(format!("right-hand side has {} rows, system has {n}", b.rows)));
    }

    let mut l = CMatrix::zeros(n, n);
    for j in 0..n {
        let mut diag = a[(j, j)].re;
        for k in 0..j {
            diag -= l[(j, k)].norm_sqr();
        }
        if !(diag > SINGULAR_PIVOT) {
            return Err(Error::SingularMatrix { pivot: j, value: diag });
        }
        let ljj = diag.sqrt();
        l[(j, j)] = Complex64::new(ljj, 0.0);
        for i in (j + 1)..n {
            let mut s = a[(i, j)];
            for k in 0..j {
                s -= l[(i, k)] * l[(j, k)].conj();
            }
            l[(i, j)] = s / ljj;
        }
    }

    let mut x = CMatrix::zeros(n, b.cols);
    let mut y = vec![Complex64::new(0.0, 0.0); n];
    for c in 0..b.cols {
        // L·y = b
        for i in 0..n {
            let mut s = b[(i, c)];
            for k in 0..i {
                s -= l[(i, k)] * y[k];
            }
            y[i] = s / l[(i, i)].re;
        }
        // Lᴴ·x = y
        for i in (0..n).rev() {
            let mut s = y[i];
            for k in (i + 1)..n {
                s -= l[(k, i)].conj() * x[(k, c)];
            }
            x[(i, c)] = s / l[(i, i)].re;
        }
    }
    Ok(x)
}

/// Minimum-norm right inverse `W = Hᴴ(H·Hᴴ)⁻¹` of a wide, full-row-rank `h`,
/// so that `h·W = I`.
pub fn pinv_right(h: &CMatrix) -> Result<CMatrix> {
    if h.rows > h.cols {
        return Err(Error::InsufficientAntennas { receivers: h.rows, antennas: h.cols });
    }
    let hh = hermitian(h);
    let gram = matmul(h, &hh)?;
    let inv = solve_hermitian(&gram, &CMatrix::identity(h.rows))?;
    matmul(&hh, &inv)
}

/// `‖a − b‖_F`.
pub fn frobenius_distance(a: &CMatrix, b: &CMatrix) -> Result<f64> {
    Ok(a.sub(b)?.frobenius_norm_sqr().sqrt())
}
