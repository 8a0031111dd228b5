//! Sylvester inertia of Hermitian operators by factorization and by eigenvalues.

use std::ops::Add;

use crate::blocktri::BlockLdl;
use crate::bunch_kaufman::BunchKaufman;
use crate::dense::DMat;
use crate::error::{LinalgError, Result};
use crate::lanczos::largest_modulus;
use crate::rcm::reverse_cuthill_mckee;
use crate::scalar::{czero, Real, C};
use crate::sparse::Csr;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub struct Inertia {
    pub n_plus: usize,
    pub n_minus: usize,
    pub n_zero: usize,
}

impl Inertia {
    pub fn push_value<T: Real>(&mut self, v: T) {
        if v > T::zero() {
            self.n_plus += 1;
        } else if v < T::zero() {
            self.n_minus += 1;
        } else {
            self.n_zero += 1;
        }
    }

    pub fn from_eigenvalues<T: Real>(w: &[T], zero_tol: T) -> Self {
        let mut out = Inertia::default();
        for &v in w {
            if v > zero_tol {
                out.n_plus += 1;
            } else if v < -zero_tol {
                out.n_minus += 1;
            } else {
                out.n_zero += 1;
            }
        }
        out
    }

    pub fn dim(&self) -> usize {
        self.n_plus + self.n_minus + self.n_zero
    }

    pub fn signature(&self) -> i64 {
        self.n_plus as i64 - self.n_minus as i64
    }

    /// Half the signature when it is even.
    pub fn half_signature(&self) -> Option<i64> {
        let s = self.signature();
        (s % 2 == 0).then_some(s / 2)
    }
}

impl Add for Inertia {
    type Output = Inertia;
    fn add(self, o: Inertia) -> Inertia {
        Inertia { n_plus: self.n_plus + o.n_plus, n_minus: self.n_minus + o.n_minus, n_zero: self.n_zero + o.n_zero }
    }
}

/// A Hermitian matrix in either storage.
#[derive(Clone, Debug)]
pub enum HermOp<T: Real> {
    Dense(DMat<T>),
    Sparse(Csr<T>),
}

impl<T: Real> HermOp<T> {
    pub fn dim(&self) -> usize {
        match self {
            HermOp::Dense(d) => d.rows(),
            HermOp::Sparse(s) => s.rows(),
        }
    }

    pub fn to_dense(&self) -> DMat<T> {
        match self {
            HermOp::Dense(d) => d.clone(),
            HermOp::Sparse(s) => s.to_dense(),
        }
    }

    pub fn to_csr(&self) -> Csr<T> {
        match self {
            HermOp::Dense(d) => Csr::from_dense(d, T::zero()),
            HermOp::Sparse(s) => s.clone(),
        }
    }

    pub fn matvec(&self, x: &[C<T>], y: &mut [C<T>]) {
        match self {
            HermOp::Dense(d) => d.matvec(x, y),
            HermOp::Sparse(s) => s.matvec(x, y),
        }
    }

    pub fn hermiticity_defect(&self) -> T {
        match self {
            HermOp::Dense(d) => d.hermiticity_defect(),
            HermOp::Sparse(s) => s.hermiticity_defect(),
        }
    }

    /// Largest entry modulus; a cheap scale for relative tolerances.
    pub fn max_abs(&self) -> T {
        match self {
            HermOp::Dense(d) => d.max_abs(),
            HermOp::Sparse(s) => s.max_abs(),
        }
    }

    /// Upper bound for the spectral norm (max absolute row sum).
    pub fn norm_bound(&self) -> T {
        let n = self.dim();
        let mut m = T::zero();
        match self {
            HermOp::Dense(d) => {
                for i in 0..n {
                    m = m.max((0..n).map(|j| d[(i, j)].norm()).sum());
                }
            }
            HermOp::Sparse(s) => {
                for i in 0..n {
                    m = m.max(s.row(i).map(|(_, v)| v.norm()).sum());
                }
            }
        }
        m
    }

    fn prefers_dense(&self) -> bool {
        match self {
            HermOp::Dense(_) => true,
            HermOp::Sparse(s) => s.density() > 0.15 || s.rows() <= 64,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Backend {
    BlockSparse,
    DenseBunchKaufman,
    Eigen,
}

#[derive(Clone, Copy, Debug)]
pub struct InertiaReport<T> {
    pub inertia: Inertia,
    pub min_abs_eig: T,
    pub backend: Backend,
    /// Set when the factorization route broke down and eigenvalues were used instead.
    pub fell_back: bool,
}

enum Factor<T: Real> {
    Block(BlockLdl<T>),
    Dense(BunchKaufman<T>),
}

impl<T: Real> Factor<T> {
    fn new(a: &HermOp<T>, shift: T) -> Result<Self> {
        if a.prefers_dense() {
            let mut d = a.to_dense();
            d.add_diag(-shift);
            Ok(Factor::Dense(BunchKaufman::factor(d)?))
        } else {
            let s = match a {
                HermOp::Sparse(s) => s,
                HermOp::Dense(_) => unreachable!(),
            };
            Ok(Factor::Block(BlockLdl::factor(s, shift)?))
        }
    }

    fn inertia(&self) -> Inertia {
        match self {
            Factor::Block(b) => b.inertia(),
            Factor::Dense(d) => d.inertia(),
        }
    }

    fn solve(&self, b: &mut [C<T>]) -> Result<()> {
        match self {
            Factor::Block(f) => f.solve_in_place(b),
            Factor::Dense(f) => f.solve_in_place(b),
        }
    }

    fn backend(&self) -> Backend {
        match self {
            Factor::Block(_) => Backend::BlockSparse,
            Factor::Dense(_) => Backend::DenseBunchKaufman,
        }
    }
}

/// Relative residual of one solve against a fixed right-hand side.
fn solve_residual<T: Real>(a: &HermOp<T>, shift: T, f: &Factor<T>) -> Result<T> {
    let n = a.dim();
    let b: Vec<C<T>> = (0..n)
        .map(|i| C::new(T::lit(((i * 7919) % 104729) as f64 / 104729.0 - 0.5), T::lit(((i * 4253) % 7907) as f64 / 7907.0 - 0.5)))
        .collect();
    let mut x = b.clone();
    f.solve(&mut x)?;
    let mut ax = vec![czero(); n];
    a.matvec(&x, &mut ax);
    let mut num = T::zero();
    let mut den = T::zero();
    for i in 0..n {
        num += (ax[i] - x[i].scale(shift) - b[i]).norm_sqr();
        den += b[i].norm_sqr();
    }
    let scale = a.norm_bound() * x.iter().map(|v| v.norm_sqr()).sum::<T>().sqrt() + den.sqrt();
    Ok(num.sqrt() / scale)
}

fn factor_checked<T: Real>(a: &HermOp<T>, shift: T) -> Result<Factor<T>> {
    let f = Factor::new(a, shift)?;
    let r = solve_residual(a, shift, &f)?;
    if !(r < T::lit(1e-7).max(T::EPS.sqrt())) {
        if let Factor::Block(_) = f {
            let mut d = a.to_dense();
            d.add_diag(-shift);
            let g = Factor::Dense(BunchKaufman::factor(d)?);
            if solve_residual(a, shift, &g)? < T::lit(1e-7).max(T::EPS.sqrt()) {
                return Ok(g);
            }
        }
        return Err(LinalgError::Breakdown(0));
    }
    Ok(f)
}

/// Smallest |eigenvalue| from shift-invert Lanczos on an existing factorization.
fn min_abs_from_factor<T: Real>(n: usize, f: &Factor<T>) -> Result<(T, bool)> {
    let tol = T::lit(1e-12).max(T::EPS * T::lit(100.0));
    let r = largest_modulus(n, |x, y| {
        y.copy_from_slice(x);
        f.solve(y)
    }, 400, tol, 0x5eed)?;
    if r.theta == T::zero() {
        return Ok((T::infinity(), r.converged));
    }
    Ok((T::one() / r.theta.abs(), r.converged))
}

/// Inertia through the factorization route.
///
/// Eigenvalues in [−zero_tol, zero_tol] are counted as zero. When the smallest
/// |eigenvalue| exceeds the tolerance one factorization of A suffices; otherwise
/// the counts come from A − tol·I and A + tol·I.
pub fn inertia_factor<T: Real>(a: &HermOp<T>, zero_tol: T) -> Result<InertiaReport<T>> {
    let n = a.dim();
    if n == 0 {
        return Ok(InertiaReport { inertia: Inertia::default(), min_abs_eig: T::infinity(), backend: Backend::DenseBunchKaufman, fell_back: false });
    }
    let attempt = || -> Result<InertiaReport<T>> {
        let mut min_abs = T::zero();
        let mut converged = false;
        let mut backend = Backend::DenseBunchKaufman;
        if let Ok(f) = factor_checked(a, T::zero()) {
            backend = f.backend();
            if let Ok((m, conv)) = min_abs_from_factor(n, &f) {
                min_abs = m;
                converged = conv;
                if conv && m > zero_tol * (T::one() + T::lit(1e-6)) {
                    let inertia = f.inertia();
                    if inertia.n_zero == 0 {
                        return Ok(InertiaReport { inertia, min_abs_eig: m, backend, fell_back: false });
                    }
                }
            }
        }
        let up = factor_checked(a, zero_tol)?;
        let down = factor_checked(a, -zero_tol)?;
        let (iu, id) = (up.inertia(), down.inertia());
        if iu.n_zero > 0 || id.n_zero > 0 {
            return Err(LinalgError::Singular);
        }
        let n_plus = iu.n_plus;
        let n_minus = id.n_minus;
        if n_plus + n_minus > n {
            return Err(LinalgError::Breakdown(0));
        }
        if !converged {
            min_abs = T::nan();
        }
        Ok(InertiaReport {
            inertia: Inertia { n_plus, n_minus, n_zero: n - n_plus - n_minus },
            min_abs_eig: min_abs,
            backend,
            fell_back: false,
        })
    };
    match attempt() {
        Ok(r) if !r.min_abs_eig.is_nan() => Ok(r),
        Ok(r) => {
            let e = inertia_eigen(a, zero_tol)?;
            Ok(InertiaReport { min_abs_eig: e.min_abs_eig, ..r })
        }
        Err(_) => {
            let e = inertia_eigen(a, zero_tol)?;
            Ok(InertiaReport { fell_back: true, ..e })
        }
    }
}

/// All eigenvalues, through banded reduction when the reordered bandwidth is small.
pub fn eigenvalues<T: Real>(a: &HermOp<T>) -> Result<Vec<T>> {
    let n = a.dim();
    match a {
        HermOp::Sparse(s) if n > 64 && s.density() < 0.15 => {
            let perm = reverse_cuthill_mckee(&s.pattern());
            let b = s.permute_sym(&perm);
            let kd = b.half_bandwidth();
            if (kd + 1) * 4 < n {
                return band_eigenvalues(&b, kd);
            }
            b.to_dense().eigvalsh()
        }
        _ => a.to_dense().eigvalsh(),
    }
}

fn band_eigenvalues<T: Real>(b: &Csr<T>, kd: usize) -> Result<Vec<T>> {
    let n = b.rows();
    let ld = kd + 1;
    let mut ab = vec![czero(); ld * n];
    for i in 0..n {
        for (j, v) in b.row(i) {
            if i >= j {
                ab[(i - j) + j * ld] = v;
            }
        }
    }
    let mut w = vec![T::zero(); n];
    let info = T::hbev(n, kd, &mut ab, &mut w);
    if info != 0 {
        return Err(LinalgError::Lapack { routine: "hbev", info });
    }
    Ok(w)
}

/// Inertia through a full eigenvalue computation.
pub fn inertia_eigen<T: Real>(a: &HermOp<T>, zero_tol: T) -> Result<InertiaReport<T>> {
    let w = eigenvalues(a)?;
    let min_abs = w.iter().fold(T::infinity(), |m, x| m.min(x.abs()));
    Ok(InertiaReport { inertia: Inertia::from_eigenvalues(&w, zero_tol), min_abs_eig: min_abs, backend: Backend::Eigen, fell_back: false })
}
