//! Independent routes to the index pairing: lattice Chern number, a truncated Fredholm
//! index, and the index-map fuzzy sphere (Y′₁,Y′₂,Y′₃).

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use specloc_linalg::{gemm_new, DMat, Op};

use crate::dirac::DiracData;
use crate::error::{Error, Result};
use crate::fuzzy::{flat_matrix, hermitian_norm, Component, FuzzySphere};
use crate::model::{FlatHamiltonian, TightBindingModel, GAP_TOL};
use crate::region::{Shape, TruncationRegion};
use crate::sphere_map::SphereMapFunctions;
use crate::taper::TaperPair;

type Mat = DMat<f64>;

/// Orientation of the plaquette sum. Frozen so that QWZ at m = 1 agrees with the localizer.
pub const CHERN_ORIENTATION: f64 = 1.0;

#[derive(Clone, Copy, Debug, Serialize)]
pub struct ChernResult {
    pub chern: i64,
    pub nk: usize,
    /// |Σ F/2π − chern|.
    pub residual: f64,
    pub occupied: usize,
}

fn det(mut a: Vec<Complex64>, n: usize) -> Complex64 {
    // column-major LU with partial pivoting
    let mut d = Complex64::new(1.0, 0.0);
    for k in 0..n {
        let p = (k..n).max_by(|&i, &j| a[i + k * n].norm().partial_cmp(&a[j + k * n].norm()).unwrap()).unwrap();
        if a[p + k * n].norm() == 0.0 {
            return Complex64::new(0.0, 0.0);
        }
        if p != k {
            for c in 0..n {
                a.swap(k + c * n, p + c * n);
            }
            d = -d;
        }
        let piv = a[k + k * n];
        d *= piv;
        for i in k + 1..n {
            let f = a[i + k * n] / piv;
            for c in k + 1..n {
                let v = a[k + c * n];
                a[i + c * n] -= f * v;
            }
        }
    }
    d
}

/// Occupied frame (eigenvectors with negative energy) at k.
fn occupied_frame(model: &TightBindingModel, k: (f64, f64)) -> Result<(Mat, usize)> {
    let (w, v) = model.bloch(k).eigh()?;
    if let Some(e) = w.iter().find(|e| e.abs() < GAP_TOL) {
        return Err(Error::NotInsulator { gap: e.abs(), tol: GAP_TOL });
    }
    let occ = w.iter().filter(|&&e| e < 0.0).count();
    let n = v.rows();
    Ok((v.submatrix(&(0..n).collect::<Vec<_>>(), &(0..occ).collect::<Vec<_>>()), occ))
}

/// Normalized link det(Ψ(k)ᴴΨ(k′)) / |det|.
fn link(a: &Mat, b: &Mat) -> Complex64 {
    let m = gemm_new(Op::H, a, Op::N, b);
    let d = det(m.as_slice().to_vec(), m.rows());
    d / d.norm()
}

/// Chern number of the Fermi projection from U(1) plaquette fluxes on an nk×nk grid.
pub fn chern_fhs(model: &TightBindingModel, nk: usize) -> Result<ChernResult> {
    chern_fhs_with_gauge(model, nk, |_, _| Complex64::new(1.0, 0.0))
}

/// Same, with the frame at grid point (i, j) multiplied by `gauge(i, j)`.
pub fn chern_fhs_with_gauge(model: &TightBindingModel, nk: usize, gauge: impl Fn(usize, usize) -> Complex64 + Sync) -> Result<ChernResult> {
    if nk < 3 {
        return Err(Error::Resolution(format!("nk = {nk} too small")));
    }
    let h = 2.0 * PI / nk as f64;
    let frames: Vec<Result<(Mat, usize)>> = (0..nk * nk)
        .into_par_iter()
        .map(|p| {
            let (i, j) = (p / nk, p % nk);
            let (mut f, occ) = occupied_frame(model, (i as f64 * h, j as f64 * h))?;
            f.scale(gauge(i, j));
            Ok((f, occ))
        })
        .collect();
    let frames = frames.into_iter().collect::<Result<Vec<_>>>()?;
    let occ = frames[0].1;
    if frames.iter().any(|f| f.1 != occ) {
        return Err(Error::NotInsulator { gap: 0.0, tol: GAP_TOL });
    }
    if occ == 0 {
        return Ok(ChernResult { chern: 0, nk, residual: 0.0, occupied: 0 });
    }
    let at = |i: usize, j: usize| &frames[(i % nk) * nk + (j % nk)].0;
    let total: f64 = (0..nk * nk)
        .into_par_iter()
        .map(|p| {
            let (i, j) = (p / nk, p % nk);
            let u1 = link(at(i, j), at(i + 1, j));
            let u2 = link(at(i + 1, j), at(i + 1, j + 1));
            let u3 = link(at(i + 1, j + 1), at(i, j + 1));
            let u4 = link(at(i, j + 1), at(i, j));
            (u1 * u2 * u3 * u4).arg()
        })
        .sum();
    let raw = CHERN_ORIENTATION * total / (2.0 * PI);
    let chern = raw.round();
    let residual = (raw - chern).abs();
    if residual > 1e-6 {
        return Err(Error::Resolution(format!("plaquette sum {raw:.6} is not an integer; refine nk")));
    }
    Ok(ChernResult { chern: chern as i64, nk, residual, occupied: occ })
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct FredholmEstimate {
    pub dim_ker_t: usize,
    pub dim_ker_tstar: usize,
    pub index: i64,
    pub threshold: f64,
    /// Largest singular value counted as zero.
    pub largest_counted: f64,
    /// Smallest singular value above the threshold.
    pub smallest_uncounted: f64,
    /// Set when smallest_uncounted ≥ 10·threshold.
    pub reliable: bool,
    pub box_radius: f64,
    pub projection: Projection,
}

/// Which spectral projection of the flattened H plays the role of P.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Projection {
    /// χ(H < 0).
    Fermi,
    /// χ(H > 0).
    Positive,
}

fn site_weights(v: &[Complex64], internal: usize) -> Vec<f64> {
    v.chunks(internal).map(|c| c.iter().map(|z| z.norm_sqr()).sum()).collect()
}

/// Index of T = PFP + (1−P) on a square box.
///
/// P is a spectral projection of the box-restricted flattened H. Near-zero singular
/// pairs are sorted by where their vectors live: a right vector concentrated in the inner half
/// of the box is a kernel state of T, a left vector there a kernel state of T*; the partners
/// sitting at the box edge are truncation artifacts.
pub fn fredholm_index_estimate(flat: &FlatHamiltonian, box_radius: f64, threshold: Option<f64>, projection: Projection) -> Result<FredholmEstimate> {
    let region = TruncationRegion::new(Shape::Square, box_radius)?;
    let dirac = DiracData::new(&region, flat.internal_dim());
    let h = flat_matrix(flat, &dirac)?;
    let (w, v) = h.eigh()?;
    let occ: Vec<usize> = match projection {
        Projection::Fermi => (0..w.len()).filter(|&i| w[i] < 0.0).collect(),
        Projection::Positive => (0..w.len()).filter(|&i| w[i] > 0.0).collect(),
    };
    let all: Vec<usize> = (0..v.rows()).collect();
    let q = v.submatrix(&all, &occ);
    let phase: Vec<Complex64> = dirac.expand(&dirac.phase);
    // On Ran P, T acts as P F P; on Ran(1−P) as the identity. Singular pairs of T with small
    // values are those of Qᴴ F Q.
    let mut fq = q.clone();
    fq.scale_rows(&phase);
    let m = gemm_new(Op::H, &q, Op::N, &fq);
    let (s, u, v) = m.svd()?;
    let tnorm = 1.0_f64.max(s.first().copied().unwrap_or(0.0));
    let thr = threshold.unwrap_or(1e-3 * tnorm);
    let inner = region.sites().iter().map(|&(a, b)| a.abs().max(b.abs()) as f64 <= box_radius / 2.0).collect::<Vec<_>>();
    let n_int = flat.internal_dim();
    let localized = |coeffs: &[Complex64]| -> bool {
        // lift from Ran Q to the box
        let mut x = vec![Complex64::new(0.0, 0.0); q.rows()];
        q.matvec(coeffs, &mut x);
        let wts = site_weights(&x, n_int);
        let inside: f64 = wts.iter().zip(&inner).filter(|(_, &i)| i).map(|(w, _)| w).sum();
        inside > 0.5
    };
    let mut ker = 0;
    let mut coker = 0;
    let mut largest_counted: f64 = 0.0;
    let mut smallest_uncounted = f64::INFINITY;
    let k = s.len();
    for idx in 0..k {
        let sv = s[idx];
        if sv < thr {
            largest_counted = largest_counted.max(sv);
            if localized(v.col(idx)) {
                ker += 1;
            }
            if localized(u.col(idx)) {
                coker += 1;
            }
        } else {
            smallest_uncounted = smallest_uncounted.min(sv);
        }
    }
    let reliable = smallest_uncounted >= 10.0 * thr;
    Ok(FredholmEstimate {
        dim_ker_t: ker,
        dim_ker_tstar: coker,
        index: ker as i64 - coker as i64,
        threshold: thr,
        largest_counted,
        smallest_uncounted,
        reliable,
        box_radius,
        projection,
    })
}

/// Y′₁ + iY′₂ = P W F̄ P + (1−P) W (1−P) with W = G₁(f_ρ(R)²)² f_ρ(R)², Y′₃ = G₂(f_ρ(R)²),
/// compressed to the Dirac region.
pub fn build_index_sphere(flat: &FlatHamiltonian, dirac: &DiracData, taper: &TaperPair, fns: &SphereMapFunctions, projection: Projection) -> Result<FuzzySphere> {
    let resid = fns.dual_identity_residual(1001);
    if resid > 1e-10 {
        return Err(Error::Precondition(format!("x²G₁⁴ + G₂² − 1 reaches {resid:.3e}")));
    }
    let h = flat_matrix(flat, dirac)?;
    let n = h.rows();
    let sign = match projection {
        Projection::Fermi => -1.0,
        Projection::Positive => 1.0,
    };
    let mut p = h.scaled(0.5 * sign);
    p.add_diag(0.5);
    let mut wq = Vec::with_capacity(dirac.sites());
    let mut y3 = Vec::with_capacity(dirac.sites());
    let mut wbar = Vec::with_capacity(dirac.sites());
    for s in 0..dirac.sites() {
        let f2 = taper.f(dirac.r[s]).powi(2);
        let w = fns.g1(f2).powi(2) * f2;
        wq.push(Complex64::new(w, 0.0));
        wbar.push(dirac.phase[s].conj() * w);
        y3.push(fns.g2(f2));
    }
    let wq = dirac.expand(&wq);
    let wbar = dirac.expand(&wbar);
    // P W F̄ P
    let mut a = p.clone();
    a.scale_cols(&wbar);
    let pwp = gemm_new(Op::N, &a, Op::N, &p);
    // (1−P) W (1−P) = W − PW − WP + PWP
    let mut b = p.clone();
    b.scale_cols(&wq);
    let pwq = gemm_new(Op::N, &b, Op::N, &p);
    let mut plus = pwp;
    for c in 0..n {
        for r in 0..n {
            let pw = p[(r, c)] * wq[c];
            let wp = wq[r] * p[(r, c)];
            let d = if r == c { wq[r] } else { Complex64::new(0.0, 0.0) };
            plus[(r, c)] += d - pw - wp + pwq[(r, c)];
        }
    }
    let mut y1 = Mat::zeros(n, n);
    let mut y2 = Mat::zeros(n, n);
    for c in 0..n {
        for r in 0..n {
            let (x, y) = (plus[(r, c)], plus[(c, r)].conj());
            y1[(r, c)] = (x + y) * 0.5;
            y2[(r, c)] = (x - y) * Complex64::new(0.0, -0.5);
        }
    }
    FuzzySphere::new(Component::Dense(y1), Component::Dense(y2), Component::Diag(dirac.expand(&y3)))
}

/// ‖Zᵢ − Y′ᵢ‖ for i = 1, 2, 3.
pub fn compare_spheres(z: &FuzzySphere, y: &FuzzySphere) -> Result<[f64; 3]> {
    if z.dim() != y.dim() {
        return Err(Error::Basis(format!("sphere dimensions {} and {}", z.dim(), y.dim())));
    }
    let n = z.dim();
    let mut out = [0.0; 3];
    for i in 0..3 {
        let (a, b) = (&z.x[i], &y.x[i]);
        let mut t = vec![Complex64::new(0.0, 0.0); n];
        out[i] = hermitian_norm(n, |v, r| {
            a.matvec(v, r);
            b.matvec(v, &mut t);
            for (ri, ti) in r.iter_mut().zip(&t) {
                *ri -= ti;
            }
            Ok(())
        })?;
    }
    Ok(out)
}

/// ‖[A₁, A₂]‖ for A₁ + iA₂ = P f²F̄ P + (1−P) f² (1−P): the lift commutator.
///
/// f² = 1 up to and beyond the edge of the Dirac disc, so the operators are built on a disc
/// padded by `padding` sites and the commutator is restricted to the inner disc.
pub fn lift_commutator(flat: &FlatHamiltonian, dirac: &DiracData, taper: &TaperPair, projection: Projection, padding: usize) -> Result<f64> {
    let outer = TruncationRegion::new(Shape::Disc, dirac.region.radius() + padding as f64)?;
    let big = DiracData::new(&outer, dirac.internal_dim);
    let h = flat_matrix(flat, &big)?;
    let sign = match projection {
        Projection::Fermi => -1.0,
        Projection::Positive => 1.0,
    };
    let mut p = h.scaled(0.5 * sign);
    p.add_diag(0.5);
    let mut q = p.scaled(-1.0);
    q.add_diag(1.0);
    let f2: Vec<f64> = big.r.iter().map(|&r| taper.f(r).powi(2)).collect();
    let d1: Vec<Complex64> = big.expand(&(0..big.sites()).map(|s| Complex64::new(f2[s] * big.phase[s].re, 0.0)).collect::<Vec<_>>());
    let d2: Vec<Complex64> = big.expand(&(0..big.sites()).map(|s| Complex64::new(f2[s] * big.phase[s].im, 0.0)).collect::<Vec<_>>());
    let ff: Vec<Complex64> = big.expand(&f2.iter().map(|&x| Complex64::new(x, 0.0)).collect::<Vec<_>>());
    let sandwich = |m: &Mat, d: &[Complex64]| {
        let mut a = m.clone();
        a.scale_cols(d);
        gemm_new(Op::N, &a, Op::N, m)
    };
    let a1 = sandwich(&p, &d1).add(&sandwich(&q, &ff));
    let a2 = sandwich(&p, &d2);
    let c = gemm_new(Op::N, &a1, Op::N, &a2).sub(&gemm_new(Op::N, &a2, Op::N, &a1));
    let n_int = dirac.internal_dim;
    let keep: Vec<usize> = dirac
        .region
        .sites()
        .iter()
        .flat_map(|&s| {
            let i = outer.index_of(s).expect("inner disc lies in the padded disc");
            (0..n_int).map(move |a| i * n_int + a)
        })
        .collect();
    Ok(c.submatrix(&keep, &keep).norm2()?)
}
