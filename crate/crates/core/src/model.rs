//! Finite-range tight-binding Hamiltonians on ℤ² and their spectral data.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use num_complex::Complex64;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};
use specloc_linalg::lanczos::largest_modulus;
use specloc_linalg::{Csr, DMat};

use crate::error::{Error, Result};
use crate::region::{Shape, Site, TruncationRegion};

type Mat = DMat<f64>;

const HERMITICITY_TOL: f64 = 1e-12;

/// Hoppings t_δ with ⟨x+δ|H|x⟩ = t_δ, so that H(k) = Σ_δ t_δ e^{−ik·δ}.
#[derive(Clone, Debug, PartialEq)]
pub struct TightBindingModel {
    internal_dim: usize,
    hoppings: BTreeMap<Site, Mat>,
}

fn pauli(i: usize) -> Mat {
    let z = Complex64::new(0.0, 0.0);
    let one = Complex64::new(1.0, 0.0);
    let im = Complex64::new(0.0, 1.0);
    let e = match i {
        0 => [one, z, z, one],
        1 => [z, one, one, z],
        2 => [z, im, -im, z],
        _ => [one, z, z, -one],
    };
    // column-major: [a00, a10, a01, a11]
    Mat::from_col_major(2, 2, e.to_vec())
}

pub fn sigma(i: usize) -> Mat {
    pauli(i)
}

impl TightBindingModel {
    /// Validates t_{−δ} = t_δ†; a displacement given without its partner gets the adjoint.
    pub fn new(internal_dim: usize, hoppings: Vec<(Site, Mat)>) -> Result<Self> {
        if internal_dim == 0 {
            return Err(Error::Model("internal dimension must be positive".into()));
        }
        let mut map: BTreeMap<Site, Mat> = BTreeMap::new();
        for (d, m) in hoppings {
            if m.rows() != internal_dim || m.cols() != internal_dim {
                return Err(Error::Model(format!("hopping {d:?} is {}x{}, expected {internal_dim}x{internal_dim}", m.rows(), m.cols())));
            }
            if let Some(prev) = map.get_mut(&d) {
                *prev = prev.add(&m);
            } else {
                map.insert(d, m);
            }
        }
        let keys: Vec<Site> = map.keys().copied().collect();
        for d in keys {
            let neg = (-d.0, -d.1);
            let adj = map[&d].adjoint();
            match map.get(&neg) {
                Some(p) => {
                    let defect = p.sub(&adj).max_abs();
                    if defect > HERMITICITY_TOL * (1.0 + adj.max_abs()) {
                        return Err(Error::Model(format!("t{neg:?} differs from t{d:?}^† by {defect:.3e}")));
                    }
                }
                None => {
                    map.insert(neg, adj);
                }
            }
        }
        map.retain(|_, m| m.max_abs() > 0.0);
        Ok(TightBindingModel { internal_dim, hoppings: map })
    }

    /// Qi–Wu–Zhang model: t_(1,0) = (σ₃ + iσ₁)/2, t_(0,1) = (σ₃ + iσ₂)/2, t₀ = mσ₃.
    pub fn qwz(m: f64) -> Self {
        Self::qwz_scaled(m, 1.0)
    }

    /// QWZ with hoppings multiplied by `eps`: H(k) = mσ₃ + ε(sin kx σ₁ + sin ky σ₂ + (cos kx + cos ky)σ₃).
    pub fn qwz_scaled(m: f64, eps: f64) -> Self {
        let i = Complex64::new(0.0, 1.0);
        let mut tx = pauli(3);
        tx.add_assign_scaled(&pauli(1), i);
        let mut ty = pauli(3);
        ty.add_assign_scaled(&pauli(2), i);
        let h = vec![
            ((0, 0), pauli(3).scaled(m)),
            ((1, 0), tx.scaled(0.5 * eps)),
            ((0, 1), ty.scaled(0.5 * eps)),
        ];
        Self::new(2, h).expect("QWZ hoppings are Hermitian-consistent")
    }

    pub fn onsite(t0: Mat) -> Result<Self> {
        Self::new(t0.rows(), vec![((0, 0), t0)])
    }

    pub fn internal_dim(&self) -> usize {
        self.internal_dim
    }

    pub fn hoppings(&self) -> &BTreeMap<Site, Mat> {
        &self.hoppings
    }

    pub fn hopping(&self, d: Site) -> Option<&Mat> {
        self.hoppings.get(&d)
    }

    /// max ‖δ‖∞ over stored hoppings.
    pub fn range(&self) -> i64 {
        self.hoppings.keys().map(|d| d.0.abs().max(d.1.abs())).max().unwrap_or(0)
    }

    pub fn scaled(&self, s: f64) -> Self {
        TightBindingModel {
            internal_dim: self.internal_dim,
            hoppings: self.hoppings.iter().map(|(d, m)| (*d, m.scaled(s))).collect(),
        }
    }

    /// (1−λ)·self + λ·other, hopping by hopping.
    pub fn affine(&self, other: &Self, lambda: f64) -> Result<Self> {
        if self.internal_dim != other.internal_dim {
            return Err(Error::Model("internal dimensions differ".into()));
        }
        let mut out: BTreeMap<Site, Mat> = BTreeMap::new();
        for (d, m) in &self.hoppings {
            out.insert(*d, m.scaled(1.0 - lambda));
        }
        for (d, m) in &other.hoppings {
            let e = out.entry(*d).or_insert_with(|| Mat::zeros(self.internal_dim, self.internal_dim));
            e.add_assign_scaled(m, Complex64::new(lambda, 0.0));
        }
        Ok(TightBindingModel { internal_dim: self.internal_dim, hoppings: out })
    }

    /// e^{−ik·d} for every stored displacement, from per-axis powers.
    fn phases(&self, k: (f64, f64)) -> impl Iterator<Item = (&Site, &Mat, Complex64)> {
        let r = self.range();
        let axis = |kk: f64| -> Vec<Complex64> { (-r..=r).map(|d| Complex64::from_polar(1.0, -kk * d as f64)).collect() };
        let (ex, ey) = (axis(k.0), axis(k.1));
        self.hoppings.iter().map(move |(d, m)| (d, m, ex[(d.0 + r) as usize] * ey[(d.1 + r) as usize]))
    }

    /// H(k) = Σ_δ t_δ e^{−ik·δ}.
    pub fn bloch(&self, k: (f64, f64)) -> Mat {
        let mut h = Mat::zeros(self.internal_dim, self.internal_dim);
        for (_, m, ph) in self.phases(k) {
            h.add_assign_scaled(m, ph);
        }
        h.symmetrize();
        h
    }

    /// Symbol of [X₁ + iX₂, H]: Σ_δ (δ₁ + iδ₂) t_δ e^{−ik·δ}.
    pub fn commutator_symbol(&self, k: (f64, f64)) -> Mat {
        let mut h = Mat::zeros(self.internal_dim, self.internal_dim);
        for (d, m, ph) in self.phases(k) {
            h.add_assign_scaled(m, ph * Complex64::new(d.0 as f64, d.1 as f64));
        }
        h
    }

    pub fn from_document(doc: &ModelDocument) -> Result<Self> {
        let n = doc.internal_dim;
        let mut h = Vec::new();
        for e in &doc.hoppings {
            if e.matrix.len() != n * n {
                return Err(Error::Model(format!("hopping {:?} has {} entries, expected {}", e.displacement, e.matrix.len(), n * n)));
            }
            let m = Mat::from_fn(n, n, |i, j| {
                let p = e.matrix[i * n + j];
                Complex64::new(p[0], p[1])
            });
            h.push(((e.displacement[0], e.displacement[1]), m));
        }
        Self::new(n, h)
    }

    pub fn to_document(&self) -> ModelDocument {
        let n = self.internal_dim;
        ModelDocument {
            internal_dim: n,
            hoppings: self
                .hoppings
                .iter()
                .map(|(d, m)| HoppingEntry {
                    displacement: [d.0, d.1],
                    matrix: (0..n * n).map(|p| [m[(p / n, p % n)].re, m[(p / n, p % n)].im]).collect(),
                })
                .collect(),
        }
    }

    pub fn from_toml(s: &str) -> Result<Self> {
        let doc: ModelDocument = toml::from_str(s).map_err(|e| Error::Parse(e.to_string()))?;
        Self::from_document(&doc)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let doc: ModelDocument = serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))?;
        Self::from_document(&doc)
    }
}

/// Serialized model: row-major matrices of [re, im] pairs.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct ModelDocument {
    pub internal_dim: usize,
    pub hoppings: Vec<HoppingEntry>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct HoppingEntry {
    pub displacement: [i64; 2],
    pub matrix: Vec<[f64; 2]>,
}

/// Dirichlet restriction of H to region × ℂᴺ, site-major ordering.
pub fn build_hamiltonian(model: &TightBindingModel, region: &TruncationRegion) -> Result<Csr<f64>> {
    if region.is_empty() {
        return Err(Error::Domain("empty region".into()));
    }
    let n = model.internal_dim;
    let mut t = Vec::new();
    for (j, &(a, b)) in region.sites().iter().enumerate() {
        for (d, m) in &model.hoppings {
            if let Some(i) = region.index_of((a + d.0, b + d.1)) {
                for q in 0..n {
                    for p in 0..n {
                        let v = m[(p, q)];
                        if v.norm() > 0.0 {
                            t.push((i * n + p, j * n + q, v));
                        }
                    }
                }
            }
        }
    }
    Ok(Csr::from_triplets(region.len() * n, region.len() * n, t))
}

/// Extremum of a function on the Brillouin torus: grid scan followed by local zooming.
fn torus_extremum(nk: usize, maximize: bool, f: impl Fn((f64, f64)) -> f64) -> (f64, (f64, f64)) {
    let better = |a: f64, b: f64| if maximize { a > b } else { a < b };
    let h = 2.0 * PI / nk as f64;
    let mut cands: Vec<(f64, (f64, f64))> = Vec::with_capacity(nk * nk);
    for i in 0..nk {
        for j in 0..nk {
            let k = (i as f64 * h, j as f64 * h);
            cands.push((f(k), k));
        }
    }
    cands.sort_by(|a, b| if maximize { b.0.partial_cmp(&a.0).unwrap() } else { a.0.partial_cmp(&b.0).unwrap() });
    let mut best = cands[0];
    for &(v0, k0) in cands.iter().take(6) {
        let (mut v, mut k) = (v0, k0);
        let mut step = h;
        for _ in 0..24 {
            let mut moved = false;
            for di in -2..=2 {
                for dj in -2..=2 {
                    let kk = (k.0 + di as f64 * step / 2.0, k.1 + dj as f64 * step / 2.0);
                    let vv = f(kk);
                    if better(vv, v) {
                        v = vv;
                        k = kk;
                        moved = true;
                    }
                }
            }
            if !moved {
                step *= 0.5;
            }
        }
        if better(v, best.0) {
            best = (v, k);
        }
    }
    best
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SpectralData {
    /// ‖H⁻¹‖⁻¹.
    pub gap: f64,
    pub norm: f64,
    /// ‖[D, H⊕H]‖.
    pub commutator_norm: f64,
    /// Factor applied to the input model (1 unless normalization was needed).
    pub scale: f64,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum GapMethod {
    /// Bloch diagonalization on an nk×nk grid with local refinement.
    Bloch { nk: usize },
    /// Eigenvalues of a square patch, discarding states concentrated near its boundary.
    Region { radius: f64 },
}

impl Default for GapMethod {
    fn default() -> Self {
        GapMethod::Bloch { nk: 64 }
    }
}

pub const GAP_TOL: f64 = 1e-6;

fn min_abs_eig(h: &Mat) -> f64 {
    h.eigvalsh().unwrap().iter().fold(f64::INFINITY, |m, x| m.min(x.abs()))
}

fn max_abs_eig(h: &Mat) -> f64 {
    h.eigvalsh().unwrap().iter().fold(0.0, |m, x| m.max(x.abs()))
}

/// (gap, norm) of a translation-invariant model.
pub fn bloch_gap_norm(model: &TightBindingModel, nk: usize) -> (f64, f64) {
    let (g, _) = torus_extremum(nk, false, |k| min_abs_eig(&model.bloch(k)));
    let (n, _) = torus_extremum(nk, true, |k| max_abs_eig(&model.bloch(k)));
    (g, n)
}

/// (gap, norm) from a padded patch, dropping states with more than half their
/// weight within two sites of the boundary.
pub fn region_gap_norm(model: &TightBindingModel, radius: f64) -> Result<(f64, f64)> {
    let region = TruncationRegion::new(Shape::Square, radius)?;
    let h = build_hamiltonian(model, &region)?.to_dense();
    let (w, v) = h.eigh()?;
    let dist = region.boundary_distance();
    let n = model.internal_dim;
    let mut gap = f64::INFINITY;
    let mut norm: f64 = 0.0;
    for (c, &e) in w.iter().enumerate() {
        norm = norm.max(e.abs());
        let col = v.col(c);
        let edge: f64 = (0..col.len()).filter(|&i| dist[i / n] < 2).map(|i| col[i].norm_sqr()).sum();
        if edge <= 0.5 {
            gap = gap.min(e.abs());
        }
    }
    Ok((gap, norm))
}

/// sup_k ‖Σ_δ (δ₁ + iδ₂) t_δ e^{−ik·δ}‖, the infinite-volume value of ‖[D, H⊕H]‖ away from the origin.
pub fn commutator_norm_bloch(model: &TightBindingModel, nk: usize) -> f64 {
    torus_extremum(nk, true, |k| model.commutator_symbol(k).norm2().unwrap()).0
}

/// Largest singular value of π_I [D₀, H] π, where I are the sites of `estimation_region`
/// at distance more than `padding` from its boundary and π projects on the whole region.
///
/// Only the rows in I are assembled, directly from the hoppings: row x+δ, column x carries
/// (D₀(x+δ) − D₀(x)) t_δ.
pub fn compute_commutator_norm(model: &TightBindingModel, estimation_region: &TruncationRegion, padding: i64) -> Result<f64> {
    if padding < model.range() {
        return Err(Error::Precondition(format!("padding {padding} is smaller than the hopping range {}", model.range())));
    }
    let interior = estimation_region.interior(padding);
    if interior.is_empty() {
        return Err(Error::Precondition("estimation region has no interior sites".into()));
    }
    let n = model.internal_dim;
    let d = crate::dirac::DiracData::new(estimation_region, n);
    let mut rows = Vec::new();
    for (r, &s) in interior.iter().enumerate() {
        let (a, b) = estimation_region.sites()[s];
        for (delta, m) in &model.hoppings {
            let j = estimation_region.index_of((a - delta.0, b - delta.1)).expect("padding covers the hopping range");
            let w = d.d0(s) - d.d0(j);
            if w.norm() == 0.0 {
                continue;
            }
            for p in 0..n {
                for q in 0..n {
                    let z = w * m[(p, q)];
                    if z.norm() > 0.0 {
                        rows.push((r * n + p, j * n + q, z));
                    }
                }
            }
        }
    }
    let x = Csr::from_triplets(interior.len() * n, estimation_region.len() * n, rows);
    operator_norm(&x)
}

/// Spectral norm of a sparse rectangular matrix.
pub fn operator_norm(x: &Csr<f64>) -> Result<f64> {
    if x.nnz() == 0 {
        return Ok(0.0);
    }
    if x.rows().max(x.cols()) <= 600 {
        return Ok(x.to_dense().norm2()?);
    }
    let xa = x.adjoint();
    let mut tmp = vec![Complex64::new(0.0, 0.0); x.rows()];
    let r = largest_modulus(x.cols(), |v, y| {
        x.matvec(v, &mut tmp);
        xa.matvec(&tmp, y);
        Ok(())
    }, 500, 1e-14, 7)?;
    Ok(r.theta.abs().sqrt())
}

/// Options for [`spectral_data`].
#[derive(Clone, Copy, Debug)]
pub struct SpectralOptions {
    pub gap: GapMethod,
    /// nk for the commutator supremum.
    pub nk: usize,
    /// Half-width of the patch around the origin where the shifted D₀ is resolved.
    pub estimation_radius: f64,
}

impl Default for SpectralOptions {
    fn default() -> Self {
        SpectralOptions { gap: GapMethod::default(), nk: 64, estimation_radius: 6.0 }
    }
}

/// Gap, norm and ‖[D, H⊕H]‖, normalizing H by 1/g when ‖H‖ < 1.
pub fn spectral_data(model: &TightBindingModel, opts: &SpectralOptions) -> Result<(SpectralData, TightBindingModel)> {
    let (gap, norm) = match opts.gap {
        GapMethod::Bloch { nk } => bloch_gap_norm(model, nk),
        GapMethod::Region { radius } => region_gap_norm(model, radius)?,
    };
    if !(gap >= GAP_TOL) {
        return Err(Error::NotInsulator { gap, tol: GAP_TOL });
    }
    let scale = if norm < 1.0 { 1.0 / gap } else { 1.0 };
    let m = if scale != 1.0 { model.scaled(scale) } else { model.clone() };
    // The shift at the origin is a finite-rank change of [D₀, H]; it can raise the norm above
    // the translation-invariant supremum, so both are measured.
    let c_bulk = commutator_norm_bloch(&m, opts.nk);
    let pad = m.range().max(1);
    let est = TruncationRegion::new(Shape::Square, opts.estimation_radius + pad as f64)?;
    let commutator_norm = c_bulk.max(compute_commutator_norm(&m, &est, pad)?);
    Ok((SpectralData { gap: gap * scale, norm: norm * scale, commutator_norm, scale }, m))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FlattenMethod {
    Bloch,
    Dense,
}

/// 1 − 2P for P = χ(H < 0).
#[derive(Clone, Debug)]
pub struct FlatHamiltonian {
    pub method: FlattenMethod,
    /// Hopping range kept after truncating the tail (Bloch method).
    pub truncation_radius: i64,
    /// Sum of the Frobenius norms of the discarded hoppings.
    pub tail_norm: f64,
    /// Flattened translation-invariant model (Bloch method).
    pub model: Option<TightBindingModel>,
    /// Region-restricted sign function (dense method); boundary-inexact.
    pub dense: Option<(TruncationRegion, DMat<f64>)>,
}

pub const FLATTEN_TAIL_TOL: f64 = 1e-10;
const MAX_FLATTEN_GRID: usize = 512;

impl FlatHamiltonian {
    /// Matrix of 1 − 2P on a region.
    pub fn on_region(&self, region: &TruncationRegion) -> Result<Csr<f64>> {
        match (&self.model, &self.dense) {
            (Some(m), _) => build_hamiltonian(m, region),
            (None, Some((r, d))) => {
                if r.sites() != region.sites() {
                    return Err(Error::Basis("dense flattening was computed on a different region".into()));
                }
                Ok(Csr::from_dense(d, 0.0))
            }
            _ => Err(Error::Consistency("empty flat Hamiltonian".into())),
        }
    }

    pub fn internal_dim(&self) -> usize {
        match (&self.model, &self.dense) {
            (Some(m), _) => m.internal_dim(),
            (None, Some((r, d))) => d.rows() / r.len(),
            _ => 0,
        }
    }
}

fn sign_matrix(h: &Mat) -> Result<Mat> {
    let (w, v) = h.eigh()?;
    if let Some(&e) = w.iter().find(|e| e.abs() < GAP_TOL) {
        return Err(Error::NotInsulator { gap: e.abs(), tol: GAP_TOL });
    }
    let s: Vec<Complex64> = w.iter().map(|e| Complex64::new(e.signum(), 0.0)).collect();
    let mut out = specloc_linalg::congruence_diag(&v, &s);
    out.symmetrize();
    Ok(out)
}

/// Replaces H by 1 − 2P.
pub fn flatten(model: &TightBindingModel, method: FlattenMethod, region: Option<&TruncationRegion>) -> Result<FlatHamiltonian> {
    match method {
        FlattenMethod::Dense => {
            let region = region.ok_or_else(|| Error::Precondition("dense flattening needs a region".into()))?;
            let h = build_hamiltonian(model, region)?.to_dense();
            let s = sign_matrix(&h)?;
            Ok(FlatHamiltonian { method, truncation_radius: 0, tail_norm: 0.0, model: None, dense: Some((region.clone(), s)) })
        }
        FlattenMethod::Bloch => {
            let mut nk = 32;
            loop {
                let (m, rc, tail) = flatten_on_grid(model, nk)?;
                if rc <= (nk / 4) as i64 {
                    return Ok(FlatHamiltonian { method, truncation_radius: rc, tail_norm: tail, model: Some(m), dense: None });
                }
                if nk >= MAX_FLATTEN_GRID {
                    return Err(Error::Precondition(format!(
                        "flattened hopping range {rc} exceeds the supported maximum {}",
                        MAX_FLATTEN_GRID / 4
                    )));
                }
                nk *= 2;
            }
        }
    }
}

fn flatten_on_grid(model: &TightBindingModel, nk: usize) -> Result<(TightBindingModel, i64, f64)> {
    let n = model.internal_dim();
    let mut grids = vec![vec![Complex64::new(0.0, 0.0); nk * nk]; n * n];
    for i in 0..nk {
        for j in 0..nk {
            let k = (2.0 * PI * i as f64 / nk as f64, 2.0 * PI * j as f64 / nk as f64);
            let s = sign_matrix(&model.bloch(k))?;
            for p in 0..n {
                for q in 0..n {
                    grids[p * n + q][i * nk + j] = s[(p, q)];
                }
            }
        }
    }
    let mut planner = FftPlanner::<f64>::new();
    let fft = planner.plan_fft_inverse(nk);
    let norm = 1.0 / (nk * nk) as f64;
    for g in &mut grids {
        for row in g.chunks_mut(nk) {
            fft.process(row);
        }
        let mut col = vec![Complex64::new(0.0, 0.0); nk];
        for j in 0..nk {
            for i in 0..nk {
                col[i] = g[i * nk + j];
            }
            fft.process(&mut col);
            for i in 0..nk {
                g[i * nk + j] = col[i] * norm;
            }
        }
    }
    let wrap = |i: usize| if i < nk / 2 { i as i64 } else { i as i64 - nk as i64 };
    let mut hops: Vec<(Site, Mat, f64)> = Vec::with_capacity(nk * nk);
    for i in 0..nk {
        for j in 0..nk {
            let m = Mat::from_fn(n, n, |p, q| grids[p * n + q][i * nk + j]);
            let f = m.frobenius();
            hops.push(((wrap(i), wrap(j)), m, f));
        }
    }
    let mut by_shell: BTreeMap<i64, f64> = BTreeMap::new();
    for (d, _, f) in &hops {
        *by_shell.entry(d.0.abs().max(d.1.abs())).or_insert(0.0) += f;
    }
    let shells: Vec<(i64, f64)> = by_shell.into_iter().collect();
    let mut rc = shells.last().map(|s| s.0).unwrap_or(0);
    let mut tail = 0.0;
    for &(r, f) in shells.iter().rev() {
        if tail + f >= FLATTEN_TAIL_TOL {
            rc = r;
            break;
        }
        tail += f;
        rc = r - 1;
    }
    let kept: BTreeMap<Site, Mat> = hops.into_iter().filter(|(d, _, _)| d.0.abs().max(d.1.abs()) <= rc).map(|(d, m, _)| (d, m)).collect();
    let mut sym = Vec::with_capacity(kept.len());
    for (d, m) in &kept {
        let partner = kept.get(&(-d.0, -d.1)).map(|p| p.adjoint()).unwrap_or_else(|| m.clone());
        let mut s = m.add(&partner);
        s.scale(Complex64::new(0.5, 0.0));
        sym.push((*d, s));
    }
    Ok((TightBindingModel::new(n, sym)?, rc, tail))
}

/// max_k ‖S(k)² − 1‖ of a flattened model's symbol on a grid offset from the flattening grid.
pub fn flatness_defect(flat: &TightBindingModel, nk: usize) -> f64 {
    let h = 2.0 * PI / nk as f64;
    let mut worst: f64 = 0.0;
    for i in 0..nk {
        for j in 0..nk {
            let s = flat.bloch(((i as f64 + 0.37) * h, (j as f64 + 0.61) * h));
            let mut sq = s.matmul(&s);
            sq.add_diag(-1.0);
            worst = worst.max(sq.norm2_hermitian().unwrap());
        }
    }
    worst
}

/// H(λ) = (1−λ)H + λ(1−2P).
pub fn interpolate_flatten(model: &TightBindingModel, flat: &FlatHamiltonian, lambda: f64) -> Result<TightBindingModel> {
    if !(0.0..=1.0).contains(&lambda) {
        return Err(Error::Domain(format!("interpolation parameter {lambda} outside [0,1]")));
    }
    let f = flat.model.as_ref().ok_or_else(|| Error::Precondition("interpolation needs a Bloch-flattened model".into()))?;
    if lambda == 0.0 {
        return Ok(model.clone());
    }
    if lambda == 1.0 {
        return Ok(f.clone());
    }
    model.affine(f, lambda)
}
