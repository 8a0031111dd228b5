//! Column-major dense complex matrices.

use ndarray::linalg::general_mat_mul;
use ndarray::{ArrayView2, ArrayViewMut2, ShapeBuilder};
use num_complex::Complex;
use num_traits::{One, Zero};

use crate::error::{LinalgError, Result};
use crate::scalar::{c, czero, Real, C};

#[derive(Clone, Debug, PartialEq)]
pub struct DMat<T: Real> {
    rows: usize,
    cols: usize,
    data: Vec<C<T>>,
}

/// Transposition applied to an operand of [`gemm`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Op {
    N,
    H,
}

impl<T: Real> DMat<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        DMat { rows, cols, data: vec![czero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = C::one();
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> C<T>) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for j in 0..cols {
            for i in 0..rows {
                data.push(f(i, j));
            }
        }
        DMat { rows, cols, data }
    }

    pub fn from_col_major(rows: usize, cols: usize, data: Vec<C<T>>) -> Self {
        assert_eq!(data.len(), rows * cols);
        DMat { rows, cols, data }
    }

    pub fn from_diag(d: &[C<T>]) -> Self {
        let mut m = Self::zeros(d.len(), d.len());
        for (i, &x) in d.iter().enumerate() {
            m[(i, i)] = x;
        }
        m
    }

    pub fn from_real_diag(d: &[T]) -> Self {
        let mut m = Self::zeros(d.len(), d.len());
        for (i, &x) in d.iter().enumerate() {
            m[(i, i)] = c(x, T::zero());
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn as_slice(&self) -> &[C<T>] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [C<T>] {
        &mut self.data
    }

    pub fn into_vec(self) -> Vec<C<T>> {
        self.data
    }

    pub fn col(&self, j: usize) -> &[C<T>] {
        &self.data[j * self.rows..(j + 1) * self.rows]
    }

    pub fn col_mut(&mut self, j: usize) -> &mut [C<T>] {
        let r = self.rows;
        &mut self.data[j * r..(j + 1) * r]
    }

    pub fn view(&self) -> ArrayView2<'_, C<T>> {
        ArrayView2::from_shape((self.rows, self.cols).f(), &self.data).unwrap()
    }

    pub fn view_mut(&mut self) -> ArrayViewMut2<'_, C<T>> {
        ArrayViewMut2::from_shape((self.rows, self.cols).f(), &mut self.data).unwrap()
    }

    pub fn adjoint(&self) -> Self {
        DMat::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn scale(&mut self, s: C<T>) {
        for x in &mut self.data {
            *x = *x * s;
        }
    }

    pub fn scaled(&self, s: T) -> Self {
        let mut m = self.clone();
        for x in &mut m.data {
            *x = x.scale(s);
        }
        m
    }

    pub fn add_assign_scaled(&mut self, other: &Self, s: C<T>) {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        for (x, y) in self.data.iter_mut().zip(&other.data) {
            *x = *x + *y * s;
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        let mut m = self.clone();
        m.add_assign_scaled(other, c(-T::one(), T::zero()));
        m
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut m = self.clone();
        m.add_assign_scaled(other, C::one());
        m
    }

    pub fn add_diag(&mut self, s: T) {
        let n = self.rows.min(self.cols);
        for i in 0..n {
            self[(i, i)].re += s;
        }
    }

    /// Scales row i by `d[i]`.
    pub fn scale_rows(&mut self, d: &[C<T>]) {
        assert_eq!(d.len(), self.rows);
        for j in 0..self.cols {
            for (x, s) in self.col_mut(j).iter_mut().zip(d) {
                *x = *x * *s;
            }
        }
    }

    /// Scales column j by `d[j]`.
    pub fn scale_cols(&mut self, d: &[C<T>]) {
        assert_eq!(d.len(), self.cols);
        for (j, s) in d.iter().enumerate() {
            for x in self.col_mut(j) {
                *x = *x * *s;
            }
        }
    }

    pub fn submatrix(&self, rows: &[usize], cols: &[usize]) -> Self {
        DMat::from_fn(rows.len(), cols.len(), |i, j| self[(rows[i], cols[j])])
    }

    /// Restores exact Hermiticity from the lower triangle.
    pub fn hermitize_from_lower(&mut self) {
        let n = self.rows;
        for j in 0..n {
            self[(j, j)].im = T::zero();
            for i in j + 1..n {
                self[(j, i)] = self[(i, j)].conj();
            }
        }
    }

    /// Replaces A by (A + A^H)/2.
    pub fn symmetrize(&mut self) {
        let n = self.rows;
        let half = T::lit(0.5);
        for j in 0..n {
            self[(j, j)].im = T::zero();
            for i in j + 1..n {
                let v = (self[(i, j)] + self[(j, i)].conj()).scale(half);
                self[(i, j)] = v;
                self[(j, i)] = v.conj();
            }
        }
    }

    pub fn max_abs(&self) -> T {
        self.data.iter().fold(T::zero(), |m, x| m.max(x.norm()))
    }

    pub fn frobenius(&self) -> T {
        self.data.iter().map(|x| x.norm_sqr()).sum::<T>().sqrt()
    }

    /// max |A - A^H| over all entries.
    pub fn hermiticity_defect(&self) -> T {
        let n = self.rows;
        let mut m = T::zero();
        for j in 0..n {
            for i in j..n {
                m = m.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        m
    }

    pub fn matvec(&self, x: &[C<T>], y: &mut [C<T>]) {
        assert_eq!(x.len(), self.cols);
        assert_eq!(y.len(), self.rows);
        y.iter_mut().for_each(|v| *v = czero());
        for (j, &xj) in x.iter().enumerate() {
            if xj.is_zero() {
                continue;
            }
            for (v, a) in y.iter_mut().zip(self.col(j)) {
                *v = *v + *a * xj;
            }
        }
    }

    /// Spectral norm via singular values.
    pub fn norm2(&self) -> Result<T> {
        let s = self.singular_values()?;
        Ok(s.first().copied().unwrap_or(T::zero()))
    }

    /// Singular values in descending order.
    pub fn singular_values(&self) -> Result<Vec<T>> {
        let mut a = self.data.clone();
        let mut s = vec![T::zero(); self.rows.min(self.cols)];
        let mut u = [czero::<T>()];
        let mut vt = [czero::<T>()];
        let info = T::gesdd(false, self.rows, self.cols, &mut a, &mut s, &mut u, &mut vt);
        if info != 0 {
            return Err(LinalgError::Lapack { routine: "gesdd", info });
        }
        Ok(s)
    }

    /// Full SVD: returns (s, U, V) with A = U diag(s) V^H.
    pub fn svd(&self) -> Result<(Vec<T>, DMat<T>, DMat<T>)> {
        let (m, n) = (self.rows, self.cols);
        let mut a = self.data.clone();
        let mut s = vec![T::zero(); m.min(n)];
        let mut u = DMat::zeros(m, m);
        let mut vt = DMat::zeros(n, n);
        let info = T::gesdd(true, m, n, &mut a, &mut s, u.as_mut_slice(), vt.as_mut_slice());
        if info != 0 {
            return Err(LinalgError::Lapack { routine: "gesdd", info });
        }
        Ok((s, u, vt.adjoint()))
    }

    /// Eigenvalues of a Hermitian matrix (lower triangle referenced), ascending.
    pub fn eigvalsh(&self) -> Result<Vec<T>> {
        if !self.is_square() {
            return Err(LinalgError::Shape("eigvalsh needs a square matrix".into()));
        }
        let mut a = self.data.clone();
        let mut w = vec![T::zero(); self.rows];
        let info = T::heevd(false, self.rows, &mut a, &mut w);
        if info != 0 {
            return Err(LinalgError::Lapack { routine: "heevd", info });
        }
        Ok(w)
    }

    /// Eigen decomposition of a Hermitian matrix: (ascending eigenvalues, eigenvector columns).
    pub fn eigh(&self) -> Result<(Vec<T>, DMat<T>)> {
        if !self.is_square() {
            return Err(LinalgError::Shape("eigh needs a square matrix".into()));
        }
        let mut v = self.clone();
        let mut w = vec![T::zero(); self.rows];
        let info = T::heevd(true, self.rows, v.as_mut_slice(), &mut w);
        if info != 0 {
            return Err(LinalgError::Lapack { routine: "heevd", info });
        }
        Ok((w, v))
    }

    /// Spectral norm of a Hermitian matrix.
    pub fn norm2_hermitian(&self) -> Result<T> {
        let w = self.eigvalsh()?;
        Ok(w.iter().fold(T::zero(), |m, x| m.max(x.abs())))
    }

    pub fn matmul(&self, other: &Self) -> Self {
        gemm_new(Op::N, self, Op::N, other)
    }
}

/// C = alpha·op(A)·op(B) + beta·C.
pub fn gemm<T: Real>(alpha: C<T>, op_a: Op, a: &DMat<T>, op_b: Op, b: &DMat<T>, beta: C<T>, out: &mut DMat<T>) {
    let ah;
    let a_ref = match op_a {
        Op::N => a,
        Op::H => {
            ah = a.adjoint();
            &ah
        }
    };
    let bh;
    let b_ref = match op_b {
        Op::N => b,
        Op::H => {
            bh = b.adjoint();
            &bh
        }
    };
    assert_eq!(a_ref.cols, b_ref.rows, "gemm inner dimension");
    assert_eq!((out.rows, out.cols), (a_ref.rows, b_ref.cols), "gemm output shape");
    if a_ref.cols == 0 {
        out.scale(beta);
        return;
    }
    let (av, bv) = (a_ref.view(), b_ref.view());
    general_mat_mul(alpha, &av, &bv, beta, &mut out.view_mut());
}

pub fn gemm_new<T: Real>(op_a: Op, a: &DMat<T>, op_b: Op, b: &DMat<T>) -> DMat<T> {
    let r = if op_a == Op::N { a.rows } else { a.cols };
    let cc = if op_b == Op::N { b.cols } else { b.rows };
    let mut out = DMat::zeros(r, cc);
    gemm(C::one(), op_a, a, op_b, b, czero(), &mut out);
    out
}

/// V·diag(d)·V^H for a real diagonal, returned Hermitian.
pub fn congruence_diag<T: Real>(v: &DMat<T>, d: &[C<T>]) -> DMat<T> {
    let mut vd = v.clone();
    vd.scale_cols(d);
    gemm_new(Op::N, &vd, Op::H, v)
}

impl<T: Real> std::ops::Index<(usize, usize)> for DMat<T> {
    type Output = C<T>;
    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &C<T> {
        &self.data[i + j * self.rows]
    }
}

impl<T: Real> std::ops::IndexMut<(usize, usize)> for DMat<T> {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C<T> {
        &mut self.data[i + j * self.rows]
    }
}

pub fn cre<T: Real>(x: T) -> C<T> {
    Complex::new(x, T::zero())
}
