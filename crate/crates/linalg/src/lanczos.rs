//! Lanczos with full reorthogonalization for the extreme eigenvalue of a Hermitian operator.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{LinalgError, Result};
use crate::scalar::{c, czero, Real, C};

#[derive(Clone, Copy, Debug)]
pub struct LanczosResult<T> {
    /// Ritz value of largest modulus.
    pub theta: T,
    /// Residual bound |β_m s_m| for that Ritz pair.
    pub residual: T,
    pub iterations: usize,
    pub converged: bool,
}

fn dotc<T: Real>(a: &[C<T>], b: &[C<T>]) -> C<T> {
    a.iter().zip(b).fold(czero(), |s, (x, y)| s + x.conj() * *y)
}

fn norm<T: Real>(a: &[C<T>]) -> T {
    a.iter().map(|x| x.norm_sqr()).sum::<T>().sqrt()
}

/// The Ritz problem is solved every few steps only; it dominates the cost otherwise.
const CHECK_STRIDE: usize = 8;

/// Largest-modulus eigenvalue of the Hermitian operator `apply`.
pub fn largest_modulus<T: Real>(
    n: usize,
    mut apply: impl FnMut(&[C<T>], &mut [C<T>]) -> Result<()>,
    max_iter: usize,
    rel_tol: T,
    seed: u64,
) -> Result<LanczosResult<T>> {
    if n == 0 {
        return Ok(LanczosResult { theta: T::zero(), residual: T::zero(), iterations: 0, converged: true });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut q: Vec<C<T>> = (0..n).map(|_| c(T::lit(rng.random::<f64>() - 0.5), T::lit(rng.random::<f64>() - 0.5))).collect();
    let nq = norm(&q);
    q.iter_mut().for_each(|x| *x = x.unscale(nq));
    let mut basis: Vec<Vec<C<T>>> = vec![q];
    let mut alpha: Vec<T> = Vec::new();
    let mut beta: Vec<T> = Vec::new();
    let mut w = vec![czero(); n];
    let maxit = max_iter.min(n);
    let mut last = LanczosResult { theta: T::zero(), residual: T::infinity(), iterations: 0, converged: false };
    let mut prev = [T::infinity(); 2];
    for it in 0..maxit {
        apply(&basis[it], &mut w)?;
        let a = dotc(&basis[it], &w).re;
        alpha.push(a);
        for _ in 0..2 {
            for v in &basis {
                let h = dotc(v, &w);
                for (x, y) in w.iter_mut().zip(v) {
                    *x = *x - *y * h;
                }
            }
        }
        let b = norm(&w);
        let m = alpha.len();
        let breakdown = b <= T::EPS * alpha.iter().fold(T::one(), |acc, &x| acc.max(x.abs()));
        if m % CHECK_STRIDE != 0 && !breakdown && it + 1 != maxit {
            beta.push(b);
            basis.push(w.iter().map(|x| x.unscale(b)).collect());
            continue;
        }
        let mut d = alpha.clone();
        let mut e = beta.clone();
        e.push(T::zero());
        let mut z = vec![T::zero(); m * m];
        let info = T::stev(true, m, &mut d, &mut e, &mut z);
        if info != 0 {
            return Err(LinalgError::Lapack { routine: "stev", info });
        }
        let (idx, theta) = d.iter().enumerate().fold((0, T::zero()), |(bi, bv), (i, &v)| {
            if v.abs() > bv.abs() { (i, v) } else { (bi, bv) }
        });
        let resid = (b * z[idx * m + m - 1]).abs();
        // In a tight cluster the residual lags far behind the Ritz value; a value that holds
        // still to rel_tol over two consecutive checks is accepted as well.
        let settled = (theta - prev[0]).abs() <= rel_tol * theta.abs() && (prev[0] - prev[1]).abs() <= rel_tol * theta.abs();
        prev = [theta, prev[0]];
        last = LanczosResult { theta, residual: resid, iterations: m, converged: resid <= rel_tol * theta.abs() || settled };
        if last.converged || b <= T::EPS * theta.abs().max(T::one()) || it + 1 == maxit {
            if b <= T::EPS * theta.abs().max(T::one()) {
                last.converged = true;
            }
            break;
        }
        beta.push(b);
        basis.push(w.iter().map(|x| x.unscale(b)).collect());
    }
    Ok(last)
}
