//! Exact dense linear algebra: vectors in K^m, m x m endomorphism matrices
//! and linear functionals, plus the algebra-theoretic predicates the rest of
//! the crate is built on.
//!
//! Convention: column q of an endomorphism matrix holds the image of the
//! basis vector f_q, so composition is a plain matrix product.

use std::fmt;

use thiserror::Error;

use crate::field::{FieldSpec, Scalar};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LinalgError {
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error("matrix is singular")]
    SingularMatrix,
}

/// An element of K^m in the canonical basis f_1..f_m.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Vector {
    pub field: FieldSpec,
    pub coords: Vec<Scalar>,
}

impl Vector {
    pub fn zero(field: FieldSpec, m: usize) -> Self {
        Vector {
            field,
            coords: vec![field.zero(); m],
        }
    }

    /// The basis vector f_{q+1} (0-based index q).
    pub fn basis(field: FieldSpec, m: usize, q: usize) -> Self {
        let mut v = Self::zero(field, m);
        v.coords[q] = field.one();
        v
    }

    /// The all-ones vector, the unit of K^m.
    pub fn ones(field: FieldSpec, m: usize) -> Self {
        Vector {
            field,
            coords: vec![field.one(); m],
        }
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(Scalar::is_zero)
    }

    pub fn add(&self, rhs: &Vector) -> Vector {
        assert_eq!(self.dim(), rhs.dim());
        Vector {
            field: self.field,
            coords: self
                .coords
                .iter()
                .zip(&rhs.coords)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    pub fn sub(&self, rhs: &Vector) -> Vector {
        assert_eq!(self.dim(), rhs.dim());
        Vector {
            field: self.field,
            coords: self
                .coords
                .iter()
                .zip(&rhs.coords)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }

    pub fn scale(&self, c: &Scalar) -> Vector {
        Vector {
            field: self.field,
            coords: self.coords.iter().map(|a| a * c).collect(),
        }
    }
}

/// Componentwise product realizing the multiplication of K^m.
pub fn hadamard(u: &Vector, v: &Vector) -> Result<Vector, LinalgError> {
    if u.dim() != v.dim() {
        return Err(LinalgError::DimensionMismatch(u.dim(), v.dim()));
    }
    Ok(Vector {
        field: u.field,
        coords: u.coords.iter().zip(&v.coords).map(|(a, b)| a * b).collect(),
    })
}

/// A dense matrix over an exact field, stored row-major.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Matrix {
    pub field: FieldSpec,
    pub rows: usize,
    pub cols: usize,
    data: Vec<Scalar>,
}

/// A K-linear endomorphism of K^m; column q is the image of f_q.
pub type EndoMap = Matrix;

impl Matrix {
    pub fn zero(field: FieldSpec, rows: usize, cols: usize) -> Self {
        Matrix {
            field,
            rows,
            cols,
            data: vec![field.zero(); rows * cols],
        }
    }

    pub fn identity(field: FieldSpec, n: usize) -> Self {
        let mut m = Self::zero(field, n, n);
        for i in 0..n {
            m.set(i, i, field.one());
        }
        m
    }

    pub fn from_rows(field: FieldSpec, rows: Vec<Vec<Scalar>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|row| row.len() == c));
        Matrix {
            field,
            rows: r,
            cols: c,
            data: rows.into_iter().flatten().collect(),
        }
    }

    pub fn from_fn(
        field: FieldSpec,
        rows: usize,
        cols: usize,
        mut f: impl FnMut(usize, usize) -> Scalar,
    ) -> Self {
        let mut m = Self::zero(field, rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                m.set(i, j, f(i, j));
            }
        }
        m
    }

    pub fn get(&self, i: usize, j: usize) -> &Scalar {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Scalar) {
        self.data[i * self.cols + j] = v;
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Scalar::is_zero)
    }

    pub fn is_identity(&self) -> bool {
        self.is_square() && *self == Matrix::identity(self.field, self.rows)
    }

    pub fn col(&self, j: usize) -> Vector {
        Vector {
            field: self.field,
            coords: (0..self.rows).map(|i| self.get(i, j).clone()).collect(),
        }
    }

    pub fn row(&self, i: usize) -> Vec<Scalar> {
        (0..self.cols).map(|j| self.get(i, j).clone()).collect()
    }

    pub fn transpose(&self) -> Matrix {
        Matrix::from_fn(self.field, self.cols, self.rows, |i, j| {
            self.get(j, i).clone()
        })
    }

    pub fn add(&self, rhs: &Matrix) -> Matrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        Matrix {
            field: self.field,
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    pub fn sub(&self, rhs: &Matrix) -> Matrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        Matrix {
            field: self.field,
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }

    pub fn mul(&self, rhs: &Matrix) -> Matrix {
        assert_eq!(self.cols, rhs.rows, "dimension mismatch in matrix product");
        let mut out = Matrix::zero(self.field, self.rows, rhs.cols);
        for i in 0..self.rows {
            for j in 0..rhs.cols {
                let mut acc = self.field.zero();
                for k in 0..self.cols {
                    acc = acc.add_ref(&self.get(i, k).mul_ref(rhs.get(k, j)));
                }
                out.set(i, j, acc);
            }
        }
        out
    }

    /// Applies the matrix to a coordinate vector: w = M v.
    pub fn apply(&self, v: &Vector) -> Vector {
        assert_eq!(self.cols, v.dim());
        let mut out = Vector::zero(self.field, self.rows);
        for i in 0..self.rows {
            let mut acc = self.field.zero();
            for k in 0..self.cols {
                acc = acc.add_ref(&self.get(i, k).mul_ref(&v.coords[k]));
            }
            out.coords[i] = acc;
        }
        out
    }

    /// In-place Gauss-Jordan; returns the pivot columns.
    pub fn rref(&mut self) -> Vec<usize> {
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..self.cols {
            if r == self.rows {
                break;
            }
            let Some(pr) = (r..self.rows).find(|&i| !self.get(i, c).is_zero()) else {
                continue;
            };
            if pr != r {
                for j in 0..self.cols {
                    let a = self.get(r, j).clone();
                    let b = self.get(pr, j).clone();
                    self.set(r, j, b);
                    self.set(pr, j, a);
                }
            }
            let inv = self.get(r, c).inv().expect("pivot is non-zero");
            for j in 0..self.cols {
                let v = self.get(r, j).mul_ref(&inv);
                self.set(r, j, v);
            }
            for i in 0..self.rows {
                if i != r && !self.get(i, c).is_zero() {
                    let factor = self.get(i, c).clone();
                    for j in 0..self.cols {
                        let v = self.get(i, j).sub_ref(&factor.mul_ref(self.get(r, j)));
                        self.set(i, j, v);
                    }
                }
            }
            pivots.push(c);
            r += 1;
        }
        pivots
    }

    pub fn rank(&self) -> usize {
        let mut m = self.clone();
        m.rref().len()
    }

    pub fn inverse(&self) -> Result<Matrix, LinalgError> {
        assert!(self.is_square());
        let n = self.rows;
        let mut aug = Matrix::zero(self.field, n, 2 * n);
        for i in 0..n {
            for j in 0..n {
                aug.set(i, j, self.get(i, j).clone());
            }
            aug.set(i, n + i, self.field.one());
        }
        let pivots = aug.rref();
        if pivots.len() < n || pivots.iter().enumerate().any(|(k, &c)| c != k) {
            return Err(LinalgError::SingularMatrix);
        }
        Ok(Matrix::from_fn(self.field, n, n, |i, j| {
            aug.get(i, n + j).clone()
        }))
    }

    pub fn reduce_mod(&self, p: u64) -> Result<Matrix, crate::field::FieldError> {
        let mut out = Matrix::zero(FieldSpec::Prime(p), self.rows, self.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.set(i, j, self.get(i, j).reduce_mod(p)?);
            }
        }
        Ok(out)
    }
}

impl fmt::Display for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.rows {
            let row: Vec<String> = (0..self.cols).map(|j| self.get(i, j).to_string()).collect();
            writeln!(f, "[{}]", row.join(" "))?;
        }
        Ok(())
    }
}

/// An element of the dual space, expressed in the dual basis f_1^*..f_m^*.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Functional {
    pub field: FieldSpec,
    pub coeffs: Vec<Scalar>,
}

impl Functional {
    pub fn zero(field: FieldSpec, m: usize) -> Self {
        Functional {
            field,
            coeffs: vec![field.zero(); m],
        }
    }

    /// The dual basis functional f_{p+1}^* (0-based index p).
    pub fn dual_basis(field: FieldSpec, m: usize, p: usize) -> Self {
        let mut f = Self::zero(field, m);
        f.coeffs[p] = field.one();
        f
    }

    pub fn dim(&self) -> usize {
        self.coeffs.len()
    }

    pub fn apply(&self, v: &Vector) -> Scalar {
        assert_eq!(self.dim(), v.dim());
        let mut acc = self.field.zero();
        for (c, x) in self.coeffs.iter().zip(&v.coords) {
            acc = acc.add_ref(&c.mul_ref(x));
        }
        acc
    }

    pub fn add(&self, rhs: &Functional) -> Functional {
        assert_eq!(self.dim(), rhs.dim());
        Functional {
            field: self.field,
            coeffs: self
                .coeffs
                .iter()
                .zip(&rhs.coeffs)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    pub fn sub(&self, rhs: &Functional) -> Functional {
        assert_eq!(self.dim(), rhs.dim());
        Functional {
            field: self.field,
            coeffs: self
                .coeffs
                .iter()
                .zip(&rhs.coeffs)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }

    pub fn scale(&self, c: &Scalar) -> Functional {
        Functional {
            field: self.field,
            coeffs: self.coeffs.iter().map(|a| a * c).collect(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Scalar::is_zero)
    }

    /// If this is exactly a dual basis functional f_p^*, returns p (0-based).
    pub fn as_dual_basis(&self) -> Option<usize> {
        let mut idx = None;
        for (p, c) in self.coeffs.iter().enumerate() {
            if c.is_one() {
                if idx.is_some() {
                    return None;
                }
                idx = Some(p);
            } else if !c.is_zero() {
                return None;
            }
        }
        idx
    }
}

/// Composition (f o g)(v) = f(g(v)) as a matrix product.
pub fn compose(f: &EndoMap, g: &EndoMap) -> Result<EndoMap, LinalgError> {
    if f.cols != g.rows {
        return Err(LinalgError::DimensionMismatch(f.cols, g.rows));
    }
    Ok(f.mul(g))
}

pub fn is_idempotent(f: &EndoMap) -> bool {
    f.is_square() && f.mul(f) == *f
}

/// The algebra endomorphism of K^m attached to a function u on {1..m}
/// (0-based here): theta(f_p) = sum_q [p = u(q)] f_q.
pub fn endo_from_function(field: FieldSpec, u: &[usize]) -> EndoMap {
    let m = u.len();
    Matrix::from_fn(field, m, m, |q, p| {
        if u[q] == p {
            field.one()
        } else {
            field.zero()
        }
    })
}

/// An exact basis of the null space.
pub fn kernel_basis(f: &Matrix) -> Vec<Vector> {
    let mut m = f.clone();
    let pivots = m.rref();
    let mut basis = Vec::new();
    let pivot_set: std::collections::HashSet<usize> = pivots.iter().copied().collect();
    for free in 0..f.cols {
        if pivot_set.contains(&free) {
            continue;
        }
        let mut v = Vector::zero(f.field, f.cols);
        v.coords[free] = f.field.one();
        for (r, &pc) in pivots.iter().enumerate() {
            v.coords[pc] = m.get(r, free).neg_ref();
        }
        basis.push(v);
    }
    basis
}

/// True iff every pairwise product of spanning vectors vanishes in K^m.
pub fn subspace_product_is_zero(span_u: &[Vector], span_v: &[Vector]) -> Result<bool, LinalgError> {
    for u in span_u {
        for v in span_v {
            if !hadamard(u, v)?.is_zero() {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// A basis of the column space.
pub fn image_basis(f: &Matrix) -> Vec<Vector> {
    let mut m = f.clone();
    let pivots = m.rref();
    pivots.into_iter().map(|c| f.col(c)).collect()
}
