//! Fuzzy spheres: the localizer sphere (X₁,X₂,X₃), its deformation from the localizer,
//! and its image (Z₁,Z₂,Z₃) under a sphere map.

use num_complex::Complex64;
use serde::Serialize;
use specloc_linalg::lanczos::largest_modulus;
use specloc_linalg::{gemm_new, inertia_factor, Csr, DMat, HermOp, Inertia, Op};

use crate::dirac::DiracData;
use crate::error::{Error, Result};
use crate::model::{operator_norm, FlatHamiltonian};
use crate::sphere_map::SphereMapFunctions;
use crate::taper::TaperPair;

type Mat = DMat<f64>;

const SPECTRUM_TOL: f64 = 1e-10;
const NORM_TOL: f64 = 1e-10;
const DENSE_NORM_MAX: usize = 4000;

/// A Hermitian component, kept diagonal when possible.
#[derive(Clone, Debug)]
pub enum Component {
    Diag(Vec<f64>),
    Dense(Mat),
}

impl Component {
    pub fn dim(&self) -> usize {
        match self {
            Component::Diag(d) => d.len(),
            Component::Dense(m) => m.rows(),
        }
    }

    pub fn matvec(&self, x: &[Complex64], y: &mut [Complex64]) {
        match self {
            Component::Diag(d) => {
                for ((yi, xi), di) in y.iter_mut().zip(x).zip(d) {
                    *yi = xi * di;
                }
            }
            Component::Dense(m) => m.matvec(x, y),
        }
    }

    pub fn to_dense(&self) -> Mat {
        match self {
            Component::Diag(d) => Mat::from_real_diag(d),
            Component::Dense(m) => m.clone(),
        }
    }

    pub fn is_diagonal(&self) -> bool {
        matches!(self, Component::Diag(_))
    }
}

/// Spectral norm of a Hermitian operator given by its action.
pub fn hermitian_norm(n: usize, apply: impl FnMut(&[Complex64], &mut [Complex64]) -> specloc_linalg::Result<()>) -> Result<f64> {
    let r = largest_modulus(n, apply, 600, 1e-11, 0xf022)?;
    Ok(r.theta.abs())
}

fn component_norm(c: &Component) -> Result<f64> {
    match c {
        Component::Diag(d) => Ok(d.iter().fold(0.0, |m, x| m.max(x.abs()))),
        // Spectra of these components cluster at ±1, where Lanczos needs nearly n steps.
        Component::Dense(m) if m.rows() <= DENSE_NORM_MAX => Ok(m.eigvalsh()?.iter().fold(0.0, |a, e| a.max(e.abs()))),
        Component::Dense(m) => hermitian_norm(m.rows(), |x, y| {
            m.matvec(x, y);
            Ok(())
        }),
    }
}

#[derive(Clone, Debug)]
pub struct FuzzySphere {
    pub x: [Component; 3],
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct Width {
    /// ‖1 − ΣXⱼ²‖.
    pub sphere_defect: f64,
    /// ‖[X₁,X₂]‖, ‖[X₁,X₃]‖, ‖[X₂,X₃]‖.
    pub commutators: [f64; 3],
    pub width: f64,
}

impl FuzzySphere {
    pub fn new(x1: Component, x2: Component, x3: Component) -> Result<Self> {
        let n = x1.dim();
        if x2.dim() != n || x3.dim() != n {
            return Err(Error::Basis(format!("component dimensions {}, {}, {}", n, x2.dim(), x3.dim())));
        }
        Ok(FuzzySphere { x: [x1, x2, x3] })
    }

    pub fn dim(&self) -> usize {
        self.x[0].dim()
    }

    /// Checks ‖Xⱼ‖ ≤ 1 + 1e-10.
    pub fn check_spectra(&self) -> Result<()> {
        for (j, c) in self.x.iter().enumerate() {
            let n = component_norm(c)?;
            if n > 1.0 + SPECTRUM_TOL {
                return Err(Error::Domain(format!("‖X{}‖ = {n} exceeds 1", j + 1)));
            }
        }
        Ok(())
    }

    /// δ = max(‖1 − ΣXⱼ²‖, ‖[Xᵢ,Xⱼ]‖).
    pub fn width(&self) -> Result<Width> {
        self.check_spectra()?;
        let n = self.dim();
        let mut t1 = vec![Complex64::new(0.0, 0.0); n];
        let mut t2 = vec![Complex64::new(0.0, 0.0); n];
        let sphere_defect = hermitian_norm(n, |v, y| {
            y.copy_from_slice(v);
            for c in &self.x {
                c.matvec(v, &mut t1);
                c.matvec(&t1, &mut t2);
                for (yi, ti) in y.iter_mut().zip(&t2) {
                    *yi -= ti;
                }
            }
            Ok(())
        })?;
        let mut commutators = [0.0; 3];
        for (slot, (i, j)) in [(0, 1), (0, 2), (1, 2)].into_iter().enumerate() {
            if self.x[i].is_diagonal() && self.x[j].is_diagonal() {
                continue;
            }
            let (a, b) = (&self.x[i], &self.x[j]);
            let mut s1 = vec![Complex64::new(0.0, 0.0); n];
            commutators[slot] = hermitian_norm(n, |v, y| {
                b.matvec(v, &mut t1);
                a.matvec(&t1, y);
                a.matvec(v, &mut t2);
                b.matvec(&t2, &mut s1);
                // i[A,B] is Hermitian
                for (yi, si) in y.iter_mut().zip(&s1) {
                    *yi = (*yi - si) * Complex64::new(0.0, 1.0);
                }
                Ok(())
            })?;
        }
        let width = commutators.iter().fold(sphere_defect, |m, &c| m.max(c));
        Ok(Width { sphere_defect, commutators, width })
    }

    /// L = Σ Xⱼ⊗σⱼ = [[X₃, X₁ − iX₂],[X₁ + iX₂, −X₃]].
    pub fn to_matrix(&self) -> Mat {
        let n = self.dim();
        let mut l = Mat::zeros(2 * n, 2 * n);
        let x1 = self.x[0].to_dense();
        let x2 = self.x[1].to_dense();
        let x3 = self.x[2].to_dense();
        let i = Complex64::new(0.0, 1.0);
        for c in 0..n {
            for r in 0..n {
                let (a, b, z) = (x1[(r, c)], x2[(r, c)], x3[(r, c)]);
                l[(r, c)] = z;
                l[(n + r, n + c)] = -z;
                l[(r, n + c)] = a - i * b;
                l[(n + r, c)] = a + i * b;
            }
        }
        l
    }
}

/// Matrix of a sphere with the check L² ≥ (1 − 4δ) when δ ≤ 1/4.
pub fn sphere_to_matrix(s: &FuzzySphere) -> Result<(Mat, Option<f64>)> {
    let l = s.to_matrix();
    let w = s.width()?;
    if w.width <= 0.25 {
        let ev = l.eigvalsh()?;
        let min_sq = ev.iter().fold(f64::INFINITY, |m, e| m.min(e * e));
        if min_sq < 1.0 - 4.0 * w.width - NORM_TOL {
            return Err(Error::Consistency(format!("min eig(L²) = {min_sq} below 1 − 4δ = {}", 1.0 - 4.0 * w.width)));
        }
        return Ok((l, Some(min_sq)));
    }
    Ok((l, None))
}

/// Flattened H as a dense matrix on the Dirac region, after checking flatness.
pub fn flat_matrix(flat: &FlatHamiltonian, dirac: &DiracData) -> Result<Mat> {
    match &flat.model {
        Some(m) => {
            let d = crate::model::flatness_defect(m, 16);
            if d > 1e-8 {
                return Err(Error::Precondition(format!("input is not flattened: ‖S(k)² − 1‖ = {d:.3e}")));
            }
        }
        None => {
            if flat.dense.is_none() {
                return Err(Error::Precondition("input is not flattened".into()));
            }
        }
    }
    if flat.internal_dim() != dirac.internal_dim {
        return Err(Error::Basis("internal dimension differs from the Dirac data".into()));
    }
    Ok(flat.on_region(&dirac.region)?.to_dense())
}

/// (X₁(λ), X₂(λ), X₃(λ)) interpolating from the localizer blocks (λ = 0, scaled by κ) to the
/// localizer sphere (λ = 1):
/// f(R,λ) = (1−λ)κ^{1/2}R^{1/2} + λf_ρ(R), F(R,λ) = (1−λ) + λF_ρ(R),
/// X_i(λ) = f(R,λ)²R⁻¹D_i, X₃(λ) = F(R,λ) H F(R,λ).
pub fn localizer_sphere_at(h: &Mat, dirac: &DiracData, kappa: f64, taper: &TaperPair, lambda: f64) -> Result<FuzzySphere> {
    if h.rows() != dirac.dim() {
        return Err(Error::Basis(format!("H has dim {}, region × internal is {}", h.rows(), dirac.dim())));
    }
    if !(0.0..=1.0).contains(&lambda) {
        return Err(Error::Domain(format!("λ = {lambda} outside [0,1]")));
    }
    let (x1, x2, big): (Vec<f64>, Vec<f64>, Vec<f64>) = if lambda == 0.0 {
        (
            dirac.d1.iter().map(|d| kappa * d).collect(),
            dirac.d2.iter().map(|d| kappa * d).collect(),
            vec![1.0; dirac.sites()],
        )
    } else {
        let mut a = Vec::with_capacity(dirac.sites());
        let mut b = Vec::with_capacity(dirac.sites());
        let mut t = Vec::with_capacity(dirac.sites());
        for s in 0..dirac.sites() {
            let r = dirac.r[s];
            let f = (1.0 - lambda) * (kappa * r).sqrt() + lambda * taper.f(r);
            let w = f * f / r;
            a.push(w * dirac.d1[s]);
            b.push(w * dirac.d2[s]);
            t.push((1.0 - lambda) + lambda * taper.F(r));
        }
        (a, b, t)
    };
    let tt: Vec<Complex64> = dirac.expand(&big).into_iter().map(|v| Complex64::new(v, 0.0)).collect();
    let mut x3 = h.clone();
    x3.scale_rows(&tt);
    x3.scale_cols(&tt);
    x3.symmetrize();
    FuzzySphere::new(Component::Diag(dirac.expand(&x1)), Component::Diag(dirac.expand(&x2)), Component::Dense(x3))
}

/// X₁ = f_ρ(R)²R⁻¹D₁, X₂ = f_ρ(R)²R⁻¹D₂, X₃ = F_ρ(R) H F_ρ(R).
pub fn build_fuzzy_sphere(flat: &FlatHamiltonian, dirac: &DiracData, taper: &TaperPair) -> Result<FuzzySphere> {
    let h = flat_matrix(flat, dirac)?;
    localizer_sphere_at(&h, dirac, 0.0, taper, 1.0)
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct HomotopyPoint {
    pub lambda: f64,
    pub min_abs_eig: f64,
    pub n_plus: usize,
    pub n_minus: usize,
    pub n_zero: usize,
    pub half_signature: Option<i64>,
    pub width: Option<f64>,
}

fn signature_point(lambda: f64, l: Mat, zero_tol: f64, width: Option<f64>) -> Result<HomotopyPoint> {
    let r = inertia_factor(&HermOp::Dense(l), zero_tol)?;
    let Inertia { n_plus, n_minus, n_zero } = r.inertia;
    Ok(HomotopyPoint { lambda, min_abs_eig: r.min_abs_eig, n_plus, n_minus, n_zero, half_signature: r.inertia.half_signature(), width })
}

/// min|eig| and signature of L_{κ,ρ}(λ) along a λ-grid.
pub fn localizer_sphere_homotopy(h: &Mat, dirac: &DiracData, kappa: f64, taper: &TaperPair, lambdas: &[f64]) -> Result<Vec<HomotopyPoint>> {
    lambdas
        .iter()
        .map(|&lam| {
            let s = localizer_sphere_at(h, dirac, kappa, taper, lam)?;
            signature_point(lam, s.to_matrix(), 1e-10, None)
        })
        .collect()
}

/// Functional calculus of X₃ shared by every map applied to one sphere.
pub struct MappedSphereBuilder {
    w: Vec<f64>,
    v: Mat,
    /// Vᴴ(X₁ + iX₂)V.
    plus: Mat,
}

impl MappedSphereBuilder {
    pub fn new(s: &FuzzySphere) -> Result<Self> {
        let x3 = s.x[2].to_dense();
        let (w, v) = x3.eigh()?;
        if let Some(e) = w.iter().find(|e| e.abs() > 1.0 + SPECTRUM_TOL) {
            return Err(Error::Domain(format!("X₃ has eigenvalue {e} outside [−1,1]")));
        }
        let n = s.dim();
        let plus = match (&s.x[0], &s.x[1]) {
            (Component::Diag(a), Component::Diag(b)) => {
                let d: Vec<Complex64> = a.iter().zip(b).map(|(x, y)| Complex64::new(*x, *y)).collect();
                let mut dv = v.clone();
                dv.scale_rows(&d);
                gemm_new(Op::H, &v, Op::N, &dv)
            }
            _ => {
                let mut p = s.x[0].to_dense();
                p.add_assign_scaled(&s.x[1].to_dense(), Complex64::new(0.0, 1.0));
                let pv = gemm_new(Op::N, &p, Op::N, &v);
                gemm_new(Op::H, &v, Op::N, &pv)
            }
        };
        debug_assert_eq!(plus.rows(), n);
        Ok(MappedSphereBuilder { w, v, plus })
    }

    fn back(&self, m: &Mat) -> Mat {
        let mv = gemm_new(Op::N, &self.v, Op::N, m);
        gemm_new(Op::N, &mv, Op::H, &self.v)
    }

    fn back_diag(&self, d: &[f64]) -> Mat {
        let dc: Vec<Complex64> = d.iter().map(|&x| Complex64::new(x, 0.0)).collect();
        let mut out = specloc_linalg::congruence_diag(&self.v, &dc);
        out.symmetrize();
        out
    }

    /// Z₁ = G₁′(X₃)X₁G₁′(X₃) + χ(X₃ < λ−1)(1 − G₂′(X₃)²)^{1/2}, Z₂ = −G₁′(X₃)X₂G₁′(X₃), Z₃ = G₂′(X₃).
    pub fn map(&self, fns: &SphereMapFunctions) -> Result<FuzzySphere> {
        let n = self.w.len();
        let g: Vec<f64> = self.w.iter().map(|&x| fns.g1p(x.clamp(-1.0, 1.0))).collect();
        let arch: Vec<f64> = self.w.iter().map(|&x| fns.south_arch(x.clamp(-1.0, 1.0))).collect();
        let z3: Vec<f64> = self.w.iter().map(|&x| fns.g2p(x.clamp(-1.0, 1.0))).collect();
        // G(X₁ + iX₂)G in the eigenbasis; its Hermitian part is GX₁G and its skew part i·GX₂G.
        let mut m = self.plus.clone();
        let gc: Vec<Complex64> = g.iter().map(|&x| Complex64::new(x, 0.0)).collect();
        m.scale_rows(&gc);
        m.scale_cols(&gc);
        let a = self.back(&m);
        let arch_m = self.back_diag(&arch);
        let mut z1 = Mat::zeros(n, n);
        let mut z2 = Mat::zeros(n, n);
        for c in 0..n {
            for r in 0..n {
                let (x, y) = (a[(r, c)], a[(c, r)].conj());
                z1[(r, c)] = (x + y) * 0.5 + arch_m[(r, c)];
                z2[(r, c)] = -(x - y) * Complex64::new(0.0, -0.5);
            }
        }
        FuzzySphere::new(Component::Dense(z1), Component::Dense(z2), Component::Dense(self.back_diag(&z3)))
    }
}

/// (Z₁,Z₂,Z₃) for one sphere map.
pub fn map_fuzzy_sphere(fns: &SphereMapFunctions, s: &FuzzySphere) -> Result<FuzzySphere> {
    MappedSphereBuilder::new(s)?.map(fns)
}

/// min|eig(Σ Z_j(λ)⊗σⱼ)|, signature and width along the homotopy F_λ.
pub fn fuzzy_homotopy(choice: crate::sphere_map::SphereMapChoice, s: &FuzzySphere, lambdas: &[f64]) -> Result<Vec<HomotopyPoint>> {
    let b = MappedSphereBuilder::new(s)?;
    lambdas
        .iter()
        .map(|&lam| {
            let fns = SphereMapFunctions::homotopy(choice, lam)?;
            let z = b.map(&fns)?;
            let w = z.width()?.width;
            signature_point(lam, z.to_matrix(), 1e-10, Some(w))
        })
        .collect()
}

/// ‖[F_ρ(R), A]‖ and the bound ρ⁻¹·(1/2π)‖F̂₁′‖₁·‖[D₀, A]‖ for A on region × internal.
pub fn taper_commutator_check(taper: &TaperPair, dirac: &DiracData, a: &Mat) -> Result<(f64, f64)> {
    if a.rows() != dirac.dim() {
        return Err(Error::Basis(format!("A has dim {}, region × internal is {}", a.rows(), dirac.dim())));
    }
    let tt: Vec<f64> = dirac.expand(&dirac.r.iter().map(|&r| taper.F(r)).collect::<Vec<_>>());
    let d0: Vec<Complex64> = dirac.expand(&(0..dirac.sites()).map(|s| dirac.d0(s)).collect::<Vec<_>>());
    let n = a.rows();
    let (mut lt, mut rt) = (Vec::new(), Vec::new());
    for j in 0..n {
        for i in 0..n {
            let v = a[(i, j)];
            if v.norm() > 0.0 {
                lt.push((i, j, v * (tt[i] - tt[j])));
                rt.push((i, j, v * (d0[i] - d0[j])));
            }
        }
    }
    let lhs = operator_norm(&Csr::from_triplets(n, n, lt))?;
    let rhs = taper.fourier_l1 / taper.rho * operator_norm(&Csr::from_triplets(n, n, rt))?;
    Ok((lhs, rhs))
}

/// Entry-wise ‖A_ρ^{1/γ} − B_ρ^{1/γ}‖ and ‖A − B‖^{1/γ} for commuting nonnegative diagonals.
pub fn root_difference(a: &[f64], b: &[f64], gamma: f64) -> (f64, f64) {
    let lhs = a.iter().zip(b).map(|(x, y)| (x.powf(1.0 / gamma) - y.powf(1.0 / gamma)).abs()).fold(0.0, f64::max);
    let eps = a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
    (lhs, eps.powf(1.0 / gamma))
}
