//! Blocked Bunch–Kaufman factorization P A Pᵀ = L D Lᴴ of a dense Hermitian matrix.
//!
//! Panels of `nb` columns are factored left-looking against a work matrix W = L·D;
//! the trailing matrix is updated once per panel with a single gemm per column block.

use ndarray::{s, Array2, Axis, ShapeBuilder};
use num_complex::Complex;
use num_traits::Zero;

use crate::dense::DMat;
use crate::error::{LinalgError, Result};
use crate::inertia::Inertia;
use crate::scalar::{c, czero, Real, C};

const DEFAULT_NB: usize = 64;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Pivot {
    One(usize),
    Two(usize),
}

#[derive(Clone, Debug)]
pub struct BunchKaufman<T: Real> {
    n: usize,
    /// L strictly below the pivot blocks, D on the block diagonal.
    f: DMat<T>,
    pivots: Vec<Pivot>,
    /// Position i of the factored matrix is row perm[i] of the input.
    perm: Vec<usize>,
}

impl<T: Real> BunchKaufman<T> {
    /// Factors the lower triangle of `a`.
    pub fn factor(a: DMat<T>) -> Result<Self> {
        Self::factor_with_block(a, DEFAULT_NB)
    }

    pub fn factor_with_block(mut a: DMat<T>, nb: usize) -> Result<Self> {
        if !a.is_square() {
            return Err(LinalgError::Shape("Bunch-Kaufman needs a square matrix".into()));
        }
        let n = a.rows();
        let nb = nb.max(2);
        let mut perm: Vec<usize> = (0..n).collect();
        let mut pivots = Vec::with_capacity(n);
        let mut k = 0;
        while k < n {
            let width = if n - k <= nb { n - k + 1 } else { nb };
            let (next, w, kw) = panel(&mut a, k, width, &mut perm, &mut pivots)?;
            if next < n {
                trailing_update(&mut a, k, next, kw, &w);
            }
            k = next;
        }
        let f = BunchKaufman { n, f: a, pivots, perm };
        f.check_finite()?;
        Ok(f)
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn pivots(&self) -> &[Pivot] {
        &self.pivots
    }

    pub fn permutation(&self) -> &[usize] {
        &self.perm
    }

    fn check_finite(&self) -> Result<()> {
        for p in &self.pivots {
            let k = match *p {
                Pivot::One(k) | Pivot::Two(k) => k,
            };
            let d = self.f[(k, k)];
            if !(d.re.is_finite() && d.im.is_finite()) {
                return Err(LinalgError::Breakdown(k));
            }
        }
        Ok(())
    }

    /// Sylvester inertia read off the block diagonal factor.
    pub fn inertia(&self) -> Inertia {
        let mut out = Inertia::default();
        for p in &self.pivots {
            match *p {
                Pivot::One(k) => out.push_value(self.f[(k, k)].re),
                Pivot::Two(k) => {
                    let (a, b, d) = (self.f[(k, k)].re, self.f[(k + 1, k)], self.f[(k + 1, k + 1)].re);
                    let tr = a + d;
                    let disc = ((a - d) * (a - d) + T::lit(4.0) * b.norm_sqr()).sqrt();
                    let half = T::lit(0.5);
                    let l1 = (tr + disc) * half;
                    let l2 = if l1 == T::zero() { (tr - disc) * half } else { (a * d - b.norm_sqr()) / l1 };
                    out.push_value(l1);
                    out.push_value(l2);
                }
            }
        }
        out
    }

    /// Solves A x = b in place.
    pub fn solve_in_place(&self, b: &mut [C<T>]) -> Result<()> {
        assert_eq!(b.len(), self.n);
        let mut z: Vec<C<T>> = self.perm.iter().map(|&p| b[p]).collect();
        self.solve_permuted(&mut z)?;
        for (i, &p) in self.perm.iter().enumerate() {
            b[p] = z[i];
        }
        Ok(())
    }

    /// Solves A X = B for every column of B.
    pub fn solve_many(&self, b: &mut DMat<T>) -> Result<()> {
        assert_eq!(b.rows(), self.n);
        let n = self.n;
        let m = b.cols();
        let mut z = DMat::zeros(n, m);
        for j in 0..m {
            let (src, dst) = (b.col(j), z.col_mut(j));
            for (i, &p) in self.perm.iter().enumerate() {
                dst[i] = src[p];
            }
        }
        self.forward(&mut z);
        self.diagonal(&mut z)?;
        self.backward(&mut z);
        for j in 0..m {
            let (src, dst) = (z.col(j).to_vec(), b.col_mut(j));
            for (i, &p) in self.perm.iter().enumerate() {
                dst[p] = src[i];
            }
        }
        Ok(())
    }

    fn solve_permuted(&self, z: &mut [C<T>]) -> Result<()> {
        let mut m = DMat::from_col_major(self.n, 1, z.to_vec());
        self.forward(&mut m);
        self.diagonal(&mut m)?;
        self.backward(&mut m);
        z.copy_from_slice(m.col(0));
        Ok(())
    }

    fn forward(&self, z: &mut DMat<T>) {
        let n = self.n;
        for p in &self.pivots {
            match *p {
                Pivot::One(k) => {
                    let l = &self.f.col(k)[k + 1..n];
                    for j in 0..z.cols() {
                        let col = z.col_mut(j);
                        let zk = col[k];
                        if zk.is_zero() {
                            continue;
                        }
                        for (x, li) in col[k + 1..n].iter_mut().zip(l) {
                            *x = *x - *li * zk;
                        }
                    }
                }
                Pivot::Two(k) => {
                    let l1 = &self.f.col(k)[k + 2..n];
                    let l2 = &self.f.col(k + 1)[k + 2..n];
                    for j in 0..z.cols() {
                        let col = z.col_mut(j);
                        let (z1, z2) = (col[k], col[k + 1]);
                        for ((x, a), b) in col[k + 2..n].iter_mut().zip(l1).zip(l2) {
                            *x = *x - *a * z1 - *b * z2;
                        }
                    }
                }
            }
        }
    }

    fn diagonal(&self, z: &mut DMat<T>) -> Result<()> {
        for p in &self.pivots {
            match *p {
                Pivot::One(k) => {
                    let d = self.f[(k, k)].re;
                    if d == T::zero() {
                        return Err(LinalgError::Singular);
                    }
                    for j in 0..z.cols() {
                        z[(k, j)] = z[(k, j)].unscale(d);
                    }
                }
                Pivot::Two(k) => {
                    let (a, b, d) = (self.f[(k, k)].re, self.f[(k + 1, k)], self.f[(k + 1, k + 1)].re);
                    let det = a * d - b.norm_sqr();
                    if det == T::zero() {
                        return Err(LinalgError::Singular);
                    }
                    for j in 0..z.cols() {
                        let (x1, x2) = (z[(k, j)], z[(k + 1, j)]);
                        z[(k, j)] = (x1.scale(d) - b.conj() * x2).unscale(det);
                        z[(k + 1, j)] = (x2.scale(a) - b * x1).unscale(det);
                    }
                }
            }
        }
        Ok(())
    }

    fn backward(&self, z: &mut DMat<T>) {
        let n = self.n;
        for p in self.pivots.iter().rev() {
            match *p {
                Pivot::One(k) => {
                    let l = &self.f.col(k)[k + 1..n];
                    for j in 0..z.cols() {
                        let col = z.col_mut(j);
                        let s = dotc(l, &col[k + 1..n]);
                        col[k] = col[k] - s;
                    }
                }
                Pivot::Two(k) => {
                    let l1 = &self.f.col(k)[k + 2..n];
                    let l2 = &self.f.col(k + 1)[k + 2..n];
                    for j in 0..z.cols() {
                        let col = z.col_mut(j);
                        let s1 = dotc(l1, &col[k + 2..n]);
                        let s2 = dotc(l2, &col[k + 2..n]);
                        col[k] = col[k] - s1;
                        col[k + 1] = col[k + 1] - s2;
                    }
                }
            }
        }
    }
}

fn dotc<T: Real>(a: &[C<T>], b: &[C<T>]) -> C<T> {
    let mut re = T::zero();
    let mut im = T::zero();
    for (x, y) in a.iter().zip(b) {
        re += x.re * y.re + x.im * y.im;
        im += x.re * y.im - x.im * y.re;
    }
    c(re, im)
}

fn alpha<T: Real>() -> T {
    (T::one() + T::lit(17.0).sqrt()) / T::lit(8.0)
}

/// Symmetric interchange of indices kk < kp in the not yet updated trailing matrix,
/// and of the corresponding rows of the factored columns.
fn interchange<T: Real>(a: &mut DMat<T>, kk: usize, kp: usize, first_trailing_col: usize) {
    let n = a.rows();
    let t = a[(kp, kp)];
    a[(kp, kp)] = a[(kk, kk)];
    a[(kk, kk)] = t;
    for j in kk + 1..kp {
        let t = a[(j, kk)];
        a[(j, kk)] = a[(kp, j)].conj();
        a[(kp, j)] = t.conj();
    }
    a[(kp, kk)] = a[(kp, kk)].conj();
    for i in kp + 1..n {
        let t = a[(i, kk)];
        a[(i, kk)] = a[(i, kp)];
        a[(i, kp)] = t;
    }
    for j in 0..first_trailing_col {
        let t = a[(kk, j)];
        a[(kk, j)] = a[(kp, j)];
        a[(kp, j)] = t;
    }
}

/// Factors columns starting at k0 until `width - 1` work columns are used.
/// Returns the next unfactored column, the work matrix and its used width.
fn panel<T: Real>(
    a: &mut DMat<T>,
    k0: usize,
    width: usize,
    perm: &mut [usize],
    pivots: &mut Vec<Pivot>,
) -> Result<(usize, DMat<T>, usize)> {
    let n = a.rows();
    let al = alpha::<T>();
    let mut w = DMat::<T>::zeros(n, width);
    let mut k = k0;
    let mut kw = 0;
    while k < n && kw + 1 < width {
        updated_column(a, &mut w, k0, kw, k, kw);
        let absakk = w[(k, kw)].re.abs();
        let (mut colmax, mut imax) = (T::zero(), k);
        for i in k + 1..n {
            let v = w[(i, kw)].norm();
            if v > colmax {
                colmax = v;
                imax = i;
            }
        }
        if !(absakk.is_finite() && colmax.is_finite()) {
            return Err(LinalgError::Breakdown(k));
        }
        let mut kstep = 1;
        let mut kp = k;
        if absakk.max(colmax) == T::zero() {
            for i in k..n {
                a[(i, k)] = czero();
            }
            pivots.push(Pivot::One(k));
            k += 1;
            kw += 1;
            continue;
        }
        if absakk < al * colmax {
            updated_row_column(a, &mut w, k0, kw, k, imax);
            let mut rowmax = T::zero();
            for i in k..n {
                if i != imax {
                    rowmax = rowmax.max(w[(i, kw + 1)].norm());
                }
            }
            if absakk >= al * colmax * (colmax / rowmax) {
                kp = k;
            } else if w[(imax, kw + 1)].re.abs() >= al * rowmax {
                kp = imax;
                for i in k..n {
                    w[(i, kw)] = w[(i, kw + 1)];
                }
            } else {
                kp = imax;
                kstep = 2;
            }
        }
        let kk = k + kstep - 1;
        if kp != kk {
            interchange(a, kk, kp, k);
            for p in 0..kw + kstep {
                let t = w[(kk, p)];
                w[(kk, p)] = w[(kp, p)];
                w[(kp, p)] = t;
            }
            perm.swap(kk, kp);
        }
        if kstep == 1 {
            let d = w[(k, kw)].re;
            a[(k, k)] = c(d, T::zero());
            for i in k + 1..n {
                a[(i, k)] = w[(i, kw)].unscale(d);
            }
            pivots.push(Pivot::One(k));
        } else {
            let d11 = w[(k, kw)].re;
            let d21 = w[(k + 1, kw)];
            let d22 = w[(k + 1, kw + 1)].re;
            let det = d11 * d22 - d21.norm_sqr();
            a[(k, k)] = c(d11, T::zero());
            a[(k + 1, k)] = d21;
            a[(k + 1, k + 1)] = c(d22, T::zero());
            a[(k, k + 1)] = czero();
            for i in k + 2..n {
                let (x1, x2) = (w[(i, kw)], w[(i, kw + 1)]);
                a[(i, k)] = (x1.scale(d22) - x2 * d21).unscale(det);
                a[(i, k + 1)] = (x2.scale(d11) - x1 * d21.conj()).unscale(det);
            }
            pivots.push(Pivot::Two(k));
        }
        k += kstep;
        kw += kstep;
    }
    Ok((k, w, kw))
}

/// W[k.., dst] = A[k.., k] − L_panel · conj(W[k, ..kw]).
fn updated_column<T: Real>(a: &DMat<T>, w: &mut DMat<T>, k0: usize, kw: usize, k: usize, dst: usize) {
    let n = a.rows();
    for i in k..n {
        w[(i, dst)] = a[(i, k)];
    }
    subtract_panel(a, w, k0, kw, k, k, dst);
    w[(k, dst)].im = T::zero();
}

/// W[k.., kw+1] = updated column `imax`, reading row imax of the lower triangle for rows < imax.
fn updated_row_column<T: Real>(a: &DMat<T>, w: &mut DMat<T>, k0: usize, kw: usize, k: usize, imax: usize) {
    let n = a.rows();
    for i in k..imax {
        w[(i, kw + 1)] = a[(imax, i)].conj();
    }
    for i in imax..n {
        w[(i, kw + 1)] = a[(i, imax)];
    }
    subtract_panel(a, w, k0, kw, k, imax, kw + 1);
    w[(imax, kw + 1)].im = T::zero();
}

fn subtract_panel<T: Real>(a: &DMat<T>, w: &mut DMat<T>, k0: usize, kw: usize, k: usize, row: usize, dst: usize) {
    let n = a.rows();
    let rows = w.rows();
    for p in 0..kw {
        let wp = w[(row, p)].conj();
        if wp.is_zero() {
            continue;
        }
        let l = &a.col(k0 + p)[k..n];
        let out = &mut w.as_mut_slice()[dst * rows + k..dst * rows + n];
        for (x, li) in out.iter_mut().zip(l) {
            *x = *x - *li * wp;
        }
    }
}

/// A[j.., j] -= L_panel[j..] · W[j, ..]ᴴ for all trailing columns j ≥ next.
fn trailing_update<T: Real>(a: &mut DMat<T>, k0: usize, next: usize, kw: usize, w: &DMat<T>) {
    let n = a.rows();
    let wc = Array2::from_shape_fn((n, kw).f(), |(i, p)| w[(i, p)].conj());
    let minus_one = c(-T::one(), T::zero());
    let one = Complex::new(T::one(), T::zero());
    let mut full = a.view_mut();
    let (left, mut right) = full.view_mut().split_at(Axis(1), next);
    let l = left.slice(s![.., k0..k0 + kw]);
    let bs = 128;
    let mut jb = next;
    while jb < n {
        let j1 = (jb + bs).min(n);
        let lblk = l.slice(s![jb.., ..]);
        let wblk = wc.slice(s![jb..j1, ..]);
        let mut cblk = right.slice_mut(s![jb.., jb - next..j1 - next]);
        ndarray::linalg::general_mat_mul(minus_one, &lblk, &wblk.t(), one, &mut cblk);
        jb = j1;
    }
}
