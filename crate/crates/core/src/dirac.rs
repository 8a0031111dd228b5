//! Position operators and the two-dimensional Dirac operator on a truncation region.

use num_complex::Complex64;
use specloc_linalg::{Csr, HermOp};

use crate::error::{Error, Result};
use crate::region::TruncationRegion;

/// Diagonal data of D₀ = (X₁ + |0⟩⟨0|) + i X₂ on the sites of a region.
#[derive(Clone, Debug)]
pub struct DiracData {
    pub region: TruncationRegion,
    pub internal_dim: usize,
    pub d1: Vec<f64>,
    pub d2: Vec<f64>,
    /// |D₀| per site.
    pub r: Vec<f64>,
    /// D₀/|D₀| per site.
    pub phase: Vec<Complex64>,
}

impl DiracData {
    pub fn new(region: &TruncationRegion, internal_dim: usize) -> Self {
        let mut d1 = Vec::with_capacity(region.len());
        let mut d2 = Vec::with_capacity(region.len());
        for &(a, b) in region.sites() {
            d1.push(a as f64 + if (a, b) == (0, 0) { 1.0 } else { 0.0 });
            d2.push(b as f64);
        }
        let r: Vec<f64> = d1.iter().zip(&d2).map(|(x, y)| x.hypot(*y)).collect();
        let phase = d1.iter().zip(&d2).zip(&r).map(|((x, y), r)| Complex64::new(x / r, y / r)).collect();
        DiracData { region: region.clone(), internal_dim, d1, d2, r, phase }
    }

    pub fn sites(&self) -> usize {
        self.region.len()
    }

    /// Dimension of region × internal space.
    pub fn dim(&self) -> usize {
        self.sites() * self.internal_dim
    }

    pub fn d0(&self, site: usize) -> Complex64 {
        Complex64::new(self.d1[site], self.d2[site])
    }

    /// Expands a per-site diagonal to region × internal.
    pub fn expand<T: Copy>(&self, per_site: &[T]) -> Vec<T> {
        per_site.iter().flat_map(|&v| std::iter::repeat_n(v, self.internal_dim)).collect()
    }

    /// D = [[0, D₀*],[D₀, 0]] in the spinor ⊗ site ⊗ internal ordering.
    pub fn operator(&self) -> HermOp<f64> {
        let n = self.dim();
        let mut t = Vec::with_capacity(2 * n);
        for s in 0..self.sites() {
            let z = self.d0(s);
            for a in 0..self.internal_dim {
                let i = s * self.internal_dim + a;
                t.push((n + i, i, z));
                t.push((i, n + i, z.conj()));
            }
        }
        HermOp::Sparse(Csr::from_triplets(2 * n, 2 * n, t))
    }

    /// Γ = 1 ⊗ σ₃ in the same ordering.
    pub fn chirality(&self) -> HermOp<f64> {
        let n = self.dim();
        let t = (0..2 * n).map(|i| (i, i, Complex64::new(if i < n { 1.0 } else { -1.0 }, 0.0))).collect();
        HermOp::Sparse(Csr::from_triplets(2 * n, 2 * n, t))
    }

    pub fn r_operator(&self) -> Csr<f64> {
        diag_csr(&self.expand(&self.r).iter().map(|&x| Complex64::new(x, 0.0)).collect::<Vec<_>>())
    }

    pub fn phase_operator(&self) -> Csr<f64> {
        diag_csr(&self.expand(&self.phase))
    }
}

pub fn diag_csr(d: &[Complex64]) -> Csr<f64> {
    Csr::from_triplets(d.len(), d.len(), d.iter().enumerate().map(|(i, &v)| (i, i, v)).collect())
}

/// Dirichlet restriction π A π* of an operator on `from` × internal to the sites of `to`.
pub fn truncate(op: &Csr<f64>, from: &TruncationRegion, to: &TruncationRegion, internal_dim: usize) -> Result<Csr<f64>> {
    if op.rows() != from.len() * internal_dim {
        return Err(Error::Basis(format!("operator dim {} vs region dim {}", op.rows(), from.len() * internal_dim)));
    }
    let mut map = vec![usize::MAX; from.len()];
    for (j, &s) in to.sites().iter().enumerate() {
        match from.index_of(s) {
            Some(i) => map[i] = j,
            None => return Err(Error::Domain(format!("site {s:?} not in the operator's region"))),
        }
    }
    let n = internal_dim;
    let mut t = Vec::new();
    for (i, j, v) in op.triplets() {
        let (si, sj) = (map[i / n], map[j / n]);
        if si != usize::MAX && sj != usize::MAX {
            t.push((si * n + i % n, sj * n + j % n, v));
        }
    }
    Ok(Csr::from_triplets(to.len() * n, to.len() * n, t))
}
