//! Block LDLᴴ of a sparse Hermitian matrix after bandwidth-reducing reordering.
//!
//! The reordered matrix is partitioned so that it is block tridiagonal; the Schur
//! complements S_k = A_kk − C_k S_{k−1}⁻¹ C_kᴴ are factored densely and their
//! inertias add up to the inertia of A.

use num_traits::One;

use crate::bunch_kaufman::BunchKaufman;
use crate::dense::{gemm, DMat, Op};
use crate::error::{LinalgError, Result};
use crate::inertia::Inertia;
use crate::rcm::reverse_cuthill_mckee;
use crate::scalar::{c, Real, C};
use crate::sparse::Csr;

const MIN_BLOCK: usize = 48;

#[derive(Clone, Debug)]
pub struct BlockLdl<T: Real> {
    n: usize,
    /// perm[new] = old.
    perm: Vec<usize>,
    bounds: Vec<usize>,
    schur: Vec<BunchKaufman<T>>,
    /// x[k] = S_{k−1}⁻¹ C_kᴴ for k ≥ 1; x[0] is empty.
    x: Vec<DMat<T>>,
}

/// Block boundaries of a block tridiagonal partition of a matrix whose row i
/// reaches at most column `reach[i]`.
pub fn tridiagonal_partition(reach: &[usize], min_block: usize) -> Vec<usize> {
    let n = reach.len();
    let mut bounds = vec![0];
    if n == 0 {
        return bounds;
    }
    let mut s = 0;
    let mut e = min_block.min(n).max(1);
    loop {
        bounds.push(e);
        if e == n {
            break;
        }
        let r = reach[s..e].iter().copied().max().unwrap_or(0) + 1;
        let next = r.max(e + min_block).max(e + 1).min(n);
        s = e;
        e = next;
    }
    bounds
}

impl<T: Real> BlockLdl<T> {
    /// Factors A − shift·I.
    pub fn factor(a: &Csr<T>, shift: T) -> Result<Self> {
        if a.rows() != a.cols() {
            return Err(LinalgError::Shape("block LDL needs a square matrix".into()));
        }
        let n = a.rows();
        let perm = reverse_cuthill_mckee(&a.pattern());
        let b = a.permute_sym(&perm);
        let reach: Vec<usize> = (0..n).map(|i| b.row(i).map(|(j, _)| j).max().unwrap_or(i).max(i)).collect();
        let bounds = tridiagonal_partition(&reach, MIN_BLOCK);
        let nblocks = bounds.len() - 1;
        let mut schur: Vec<BunchKaufman<T>> = Vec::with_capacity(nblocks);
        let mut x = Vec::with_capacity(nblocks);
        for k in 0..nblocks {
            let (s, e) = (bounds[k], bounds[k + 1]);
            let mut akk = DMat::zeros(e - s, e - s);
            for i in s..e {
                for (j, v) in b.row(i) {
                    if j >= s && j < e {
                        akk[(i - s, j - s)] = v;
                    }
                }
                akk[(i - s, i - s)].re -= shift;
            }
            if k == 0 {
                x.push(DMat::zeros(0, 0));
            } else {
                let ps = bounds[k - 1];
                let mut ch = DMat::zeros(s - ps, e - s);
                for i in s..e {
                    for (j, v) in b.row(i) {
                        if j >= ps && j < s {
                            ch[(j - ps, i - s)] = v.conj();
                        }
                    }
                }
                let mut xk = ch.clone();
                schur[k - 1].solve_many(&mut xk).map_err(|_| LinalgError::Breakdown(s))?;
                gemm(c(-T::one(), T::zero()), Op::H, &ch, Op::N, &xk, C::one(), &mut akk);
                x.push(xk);
            }
            akk.hermitize_from_lower();
            schur.push(BunchKaufman::factor(akk).map_err(|_| LinalgError::Breakdown(s))?);
        }
        Ok(BlockLdl { n, perm, bounds, schur, x })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn block_sizes(&self) -> Vec<usize> {
        self.bounds.windows(2).map(|w| w[1] - w[0]).collect()
    }

    pub fn inertia(&self) -> Inertia {
        self.schur.iter().fold(Inertia::default(), |acc, f| acc + f.inertia())
    }

    /// Solves (A − shift·I) x = b in place.
    pub fn solve_in_place(&self, rhs: &mut [C<T>]) -> Result<()> {
        assert_eq!(rhs.len(), self.n);
        let nb = self.schur.len();
        let mut y: Vec<Vec<C<T>>> = (0..nb)
            .map(|k| (self.bounds[k]..self.bounds[k + 1]).map(|i| rhs[self.perm[i]]).collect())
            .collect();
        for k in 1..nb {
            let prev = y[k - 1].clone();
            let xk = &self.x[k];
            for (j, yj) in y[k].iter_mut().enumerate() {
                let col = xk.col(j);
                let mut s = c(T::zero(), T::zero());
                for (a, b) in col.iter().zip(&prev) {
                    s = s + a.conj() * *b;
                }
                *yj = *yj - s;
            }
        }
        for k in 0..nb {
            self.schur[k].solve_in_place(&mut y[k])?;
        }
        for k in (0..nb.saturating_sub(1)).rev() {
            let next = y[k + 1].clone();
            let mut t = vec![c(T::zero(), T::zero()); y[k].len()];
            self.x[k + 1].matvec(&next, &mut t);
            for (a, b) in y[k].iter_mut().zip(&t) {
                *a = *a - *b;
            }
        }
        for k in 0..nb {
            for (i, v) in (self.bounds[k]..self.bounds[k + 1]).zip(&y[k]) {
                rhs[self.perm[i]] = *v;
            }
        }
        Ok(())
    }
}
