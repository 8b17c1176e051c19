//! Dense matrices over a cyclotomic field.

use std::collections::HashMap;
use std::fmt;
use std::sync::{Mutex, OnceLock};

use nalgebra::DMatrix;
use num_complex::Complex64;
use num_integer::Integer;

use crate::abelian::{AbelianGroup, Cyclotomic, CyclotomicField, Field};
use crate::error::{Error, Result};

/// `Q(zeta_N)` with `N = lcm(exponent, 4)`, shared per order.
///
/// The factor 4 guarantees `i` is available for the Hermitian form.
pub fn field_for(group: &AbelianGroup) -> Field {
    field_of_order(group.exponent().lcm(&4) as u32)
}

pub fn field_of_order(order: u32) -> Field {
    static CACHE: OnceLock<Mutex<HashMap<u32, Field>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let mut map = cache.lock().unwrap_or_else(|p| p.into_inner());
    map.entry(order)
        .or_insert_with(|| CyclotomicField::new(order).expect("positive order"))
        .clone()
}

#[derive(Clone)]
pub struct Matrix {
    field: Field,
    rows: Vec<Vec<Cyclotomic>>,
    cols: usize,
}

impl Matrix {
    pub fn zeros(field: &Field, rows: usize, cols: usize) -> Self {
        Self {
            field: field.clone(),
            rows: vec![vec![Cyclotomic::zero(field); cols]; rows],
            cols,
        }
    }

    pub fn identity(field: &Field, n: usize) -> Self {
        let mut m = Self::zeros(field, n, n);
        for i in 0..n {
            m.rows[i][i] = Cyclotomic::one(field);
        }
        m
    }

    pub fn from_rows(field: &Field, rows: Vec<Vec<Cyclotomic>>) -> Self {
        let cols = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|r| r.len() == cols), "ragged matrix");
        Self {
            field: field.clone(),
            rows,
            cols,
        }
    }

    /// Matrix whose columns are the given vectors.
    pub fn from_columns(field: &Field, columns: &[Vec<Cyclotomic>]) -> Self {
        let n = columns.first().map_or(0, Vec::len);
        let rows = (0..n)
            .map(|i| columns.iter().map(|c| c[i].clone()).collect())
            .collect();
        Self {
            field: field.clone(),
            rows,
            cols: columns.len(),
        }
    }

    pub fn scalar(field: &Field, n: usize, s: &Cyclotomic) -> Self {
        let mut m = Self::zeros(field, n, n);
        for i in 0..n {
            m.rows[i][i] = s.clone();
        }
        m
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn nrows(&self) -> usize {
        self.rows.len()
    }

    pub fn ncols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> &Cyclotomic {
        &self.rows[r][c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: Cyclotomic) {
        self.rows[r][c] = v;
    }

    pub fn row(&self, r: usize) -> &[Cyclotomic] {
        &self.rows[r]
    }

    pub fn column(&self, c: usize) -> Vec<Cyclotomic> {
        self.rows.iter().map(|r| r[c].clone()).collect()
    }

    pub fn columns(&self) -> Vec<Vec<Cyclotomic>> {
        (0..self.cols).map(|c| self.column(c)).collect()
    }

    pub fn mul(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.cols, other.nrows(), "dimension mismatch");
        let mut out = Matrix::zeros(&self.field, self.nrows(), other.cols);
        for i in 0..self.nrows() {
            for k in 0..self.cols {
                let a = &self.rows[i][k];
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = &other.rows[k][j];
                    if !b.is_zero() {
                        out.rows[i][j] = &out.rows[i][j] + &(a * b);
                    }
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[Cyclotomic]) -> Vec<Cyclotomic> {
        assert_eq!(self.cols, v.len(), "dimension mismatch");
        self.rows
            .iter()
            .map(|row| {
                row.iter()
                    .zip(v)
                    .fold(Cyclotomic::zero(&self.field), |acc, (a, b)| &acc + &(a * b))
            })
            .collect()
    }

    pub fn transpose(&self) -> Matrix {
        Matrix::from_columns(&self.field, &self.rows)
    }

    pub fn conj_transpose(&self) -> Matrix {
        let cols: Vec<Vec<Cyclotomic>> = self
            .rows
            .iter()
            .map(|r| r.iter().map(Cyclotomic::conj).collect())
            .collect();
        let mut m = Matrix::from_columns(&self.field, &cols);
        if self.rows.is_empty() {
            m.rows = vec![Vec::new(); self.cols];
        }
        m
    }

    pub fn sub(&self, other: &Matrix) -> Matrix {
        let rows = self
            .rows
            .iter()
            .zip(&other.rows)
            .map(|(a, b)| a.iter().zip(b).map(|(x, y)| x - y).collect())
            .collect();
        Matrix::from_rows(&self.field, rows)
    }

    pub fn is_zero(&self) -> bool {
        self.rows.iter().flatten().all(Cyclotomic::is_zero)
    }

    pub fn is_hermitian(&self) -> bool {
        *self == self.conj_transpose()
    }

    /// Reduced row echelon form with first-nonzero pivoting; returns the pivot columns.
    pub fn rref(&self) -> (Matrix, Vec<usize>) {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..self.cols {
            let Some(p) = (r..m.nrows()).find(|&i| !m.rows[i][c].is_zero()) else {
                continue;
            };
            m.rows.swap(r, p);
            let inv = m.rows[r][c].inv().expect("nonzero pivot");
            m.rows[r] = m.rows[r].iter().map(|x| x * &inv).collect();
            for i in 0..m.nrows() {
                if i != r && !m.rows[i][c].is_zero() {
                    let f = m.rows[i][c].clone();
                    let pivot_row = m.rows[r].clone();
                    for (x, y) in m.rows[i].iter_mut().zip(&pivot_row) {
                        *x = &*x - &(&f * y);
                    }
                }
            }
            pivots.push(c);
            r += 1;
            if r == m.nrows() {
                break;
            }
        }
        (m, pivots)
    }

    pub fn rank(&self) -> usize {
        self.rref().1.len()
    }

    /// Basis of the right kernel, one vector per free column in column order.
    pub fn kernel(&self) -> Vec<Vec<Cyclotomic>> {
        let (rr, pivots) = self.rref();
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        free.iter()
            .map(|&f| {
                let mut v = vec![Cyclotomic::zero(&self.field); self.cols];
                v[f] = Cyclotomic::one(&self.field);
                for (i, &p) in pivots.iter().enumerate() {
                    v[p] = -rr.get(i, f);
                }
                v
            })
            .collect()
    }

    pub fn inverse(&self) -> Result<Matrix> {
        let n = self.nrows();
        if n != self.cols {
            return Err(Error::InvalidInput("inverse of a non-square matrix".into()));
        }
        let mut aug = Matrix::zeros(&self.field, n, 2 * n);
        for i in 0..n {
            for j in 0..n {
                aug.rows[i][j] = self.rows[i][j].clone();
            }
            aug.rows[i][n + i] = Cyclotomic::one(&self.field);
        }
        let (rr, pivots) = aug.rref();
        if pivots.len() < n || pivots[n - 1] >= n {
            return Err(Error::Domain("matrix is singular".into()));
        }
        let rows = rr
            .rows
            .iter()
            .map(|r| r[n..].to_vec())
            .collect();
        Ok(Matrix::from_rows(&self.field, rows))
    }

    /// Coefficients `x` with `self * x = v`, or `None` when `v` is outside the column span.
    pub fn solve(&self, v: &[Cyclotomic]) -> Option<Vec<Cyclotomic>> {
        let n = self.cols;
        let mut aug = Matrix::zeros(&self.field, self.nrows(), n + 1);
        for i in 0..self.nrows() {
            for j in 0..n {
                aug.rows[i][j] = self.rows[i][j].clone();
            }
            aug.rows[i][n] = v[i].clone();
        }
        let (rr, pivots) = aug.rref();
        if pivots.contains(&n) {
            return None;
        }
        let mut x = vec![Cyclotomic::zero(&self.field); n];
        for (i, &p) in pivots.iter().enumerate() {
            x[p] = rr.rows[i][n].clone();
        }
        Some(x)
    }

    pub fn to_complex(&self) -> DMatrix<Complex64> {
        DMatrix::from_fn(self.nrows(), self.cols, |i, j| self.rows[i][j].to_complex())
    }
}

impl PartialEq for Matrix {
    fn eq(&self, other: &Self) -> bool {
        self.field.order() == other.field.order() && self.cols == other.cols && self.rows == other.rows
    }
}

impl Eq for Matrix {}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "[")?;
        for r in &self.rows {
            let cells: Vec<String> = r.iter().map(|x| x.to_string()).collect();
            writeln!(f, "  [{}]", cells.join(", "))?;
        }
        write!(f, "]")
    }
}
