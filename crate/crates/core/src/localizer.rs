//! The finite-volume spectral localizer, its admissibility window and its half-signature.

use std::time::Instant;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;
use specloc_linalg::{inertia_eigen, inertia_factor, Backend, Csr, HermOp, InertiaReport};

use crate::dirac::DiracData;
use crate::error::{Error, Result};
use crate::model::{build_hamiltonian, flatten, spectral_data, FlattenMethod, SpectralData, SpectralOptions, TightBindingModel};
use crate::region::{Shape, TruncationRegion};

/// (κ, ρ) together with the spectral data they are checked against.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct LocalizerParams {
    pub kappa: f64,
    pub rho: f64,
    pub gap: f64,
    pub norm: f64,
    pub commutator_norm: f64,
    /// c ≤ g³/(12‖H‖κ).
    pub eq3: bool,
    /// 2g/κ < ρ.
    pub eq4: bool,
    pub valid: bool,
    /// Largest κ allowed by the commutator bound, g³/(12‖H‖c).
    pub kappa_max: f64,
    /// Smallest κ allowed at this ρ, 2g/ρ.
    pub kappa_min: f64,
    /// ρ > 24‖H‖c/g² opens a nonempty κ window.
    pub rho_min: f64,
    pub rho_window_open: bool,
    /// The printed upper bound 12‖H‖c/g³, reported only.
    pub printed_kappa_upper: f64,
    /// κ < g/ρ.
    pub sub_threshold: bool,
}

pub fn validate_params(spec: &SpectralData, kappa: f64, rho: f64) -> LocalizerParams {
    let (g, n, c) = (spec.gap, spec.norm, spec.commutator_norm);
    let eq3 = kappa > 0.0 && c <= g.powi(3) / (12.0 * n * kappa);
    let eq4 = kappa > 0.0 && 2.0 * g / kappa < rho;
    let rho_min = 24.0 * n * c / (g * g);
    LocalizerParams {
        kappa,
        rho,
        gap: g,
        norm: n,
        commutator_norm: c,
        eq3,
        eq4,
        valid: eq3 && eq4,
        kappa_max: if c > 0.0 { g.powi(3) / (12.0 * n * c) } else { f64::INFINITY },
        kappa_min: 2.0 * g / rho,
        rho_min,
        rho_window_open: rho > rho_min,
        printed_kappa_upper: 12.0 * n * c / g.powi(3),
        sub_threshold: kappa < g / rho,
    }
}

/// L = [[H, κD₀*],[κD₀, −H]] on region × internal, spinor-major.
pub fn assemble_localizer(h: &Csr<f64>, dirac: &DiracData, kappa: f64) -> Result<HermOp<f64>> {
    let n = dirac.dim();
    if h.rows() != n || h.cols() != n {
        return Err(Error::Basis(format!("H has dim {}x{}, region × internal is {n}", h.rows(), h.cols())));
    }
    let mut t = Vec::with_capacity(2 * h.nnz() + 2 * n);
    for (i, j, v) in h.triplets() {
        t.push((i, j, v));
        t.push((n + i, n + j, -v));
    }
    for s in 0..dirac.sites() {
        let z = dirac.d0(s) * kappa;
        for a in 0..dirac.internal_dim {
            let i = s * dirac.internal_dim + a;
            if z != Complex64::new(0.0, 0.0) {
                t.push((n + i, i, z));
                t.push((i, n + i, z.conj()));
            }
        }
    }
    let l = Csr::from_triplets(2 * n, 2 * n, t);
    if l.density() > 0.15 {
        Ok(HermOp::Dense(l.to_dense()))
    } else {
        Ok(HermOp::Sparse(l))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct InertiaResult {
    pub n_plus: usize,
    pub n_minus: usize,
    pub n_zero: usize,
    pub min_abs_eig: f64,
    pub half_signature: Option<i64>,
    #[serde(serialize_with = "ser_backend")]
    pub backend: Backend,
    pub fell_back: bool,
}

fn ser_backend<S: serde::Serializer>(b: &Backend, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(match b {
        Backend::BlockSparse => "block-sparse",
        Backend::DenseBunchKaufman => "dense-bunch-kaufman",
        Backend::Eigen => "eigen",
    })
}

impl From<InertiaReport<f64>> for InertiaResult {
    fn from(r: InertiaReport<f64>) -> Self {
        InertiaResult {
            n_plus: r.inertia.n_plus,
            n_minus: r.inertia.n_minus,
            n_zero: r.inertia.n_zero,
            min_abs_eig: r.min_abs_eig,
            half_signature: r.inertia.half_signature(),
            backend: r.backend,
            fell_back: r.fell_back,
        }
    }
}

/// Inertia through the factorization route (eigenvalues on breakdown).
pub fn inertia(a: &HermOp<f64>, zero_tol: f64) -> Result<InertiaResult> {
    Ok(inertia_factor(a, zero_tol)?.into())
}

/// Both inertia routes.
pub fn inertia_both(a: &HermOp<f64>, zero_tol: f64) -> Result<(InertiaResult, InertiaResult)> {
    Ok((inertia_factor(a, zero_tol)?.into(), inertia_eigen(a, zero_tol)?.into()))
}

/// g/4 in the valid window, 10⁻⁸·‖A‖ otherwise.
pub fn default_zero_tol(params: &LocalizerParams, a: &HermOp<f64>) -> f64 {
    if params.valid {
        params.gap / 4.0
    } else {
        1e-8 * a.norm_bound()
    }
}

#[derive(Clone, Copy, Debug)]
pub struct PairingOptions {
    pub shape: Shape,
    /// Replace H by 1 − 2P before assembling.
    pub flatten: Option<FlattenMethod>,
    pub spectral: SpectralOptions,
    /// Run outside the admissible window instead of failing.
    pub allow_invalid: bool,
    /// Also compute the eigenvalue inertia and require agreement.
    pub crosscheck: bool,
}

impl Default for PairingOptions {
    fn default() -> Self {
        PairingOptions { shape: Shape::Disc, flatten: Some(FlattenMethod::Bloch), spectral: SpectralOptions::default(), allow_invalid: false, crosscheck: false }
    }
}

/// A model prepared for localizer runs: normalized, optionally flattened, with its spectral data.
#[derive(Clone, Debug)]
pub struct PreparedModel {
    /// Spectral data of the input model after normalization.
    pub input: SpectralData,
    /// Spectral data of the Hamiltonian entering the localizer.
    pub spectral: SpectralData,
    pub hamiltonian: TightBindingModel,
    pub flatten: Option<FlattenMethod>,
    pub flatten_radius: Option<i64>,
}

pub fn prepare(model: &TightBindingModel, flatten_method: Option<FlattenMethod>, spectral: &SpectralOptions) -> Result<PreparedModel> {
    let (input, normalized) = spectral_data(model, spectral)?;
    match flatten_method {
        None => Ok(PreparedModel { input, spectral: input, hamiltonian: normalized, flatten: None, flatten_radius: None }),
        Some(FlattenMethod::Bloch) => {
            let flat = flatten(&normalized, FlattenMethod::Bloch, None)?;
            let fm = flat.model.clone().expect("bloch flattening yields a model");
            let (sd, _) = spectral_data(&fm, spectral)?;
            Ok(PreparedModel { input, spectral: sd, hamiltonian: fm, flatten: Some(FlattenMethod::Bloch), flatten_radius: Some(flat.truncation_radius) })
        }
        Some(FlattenMethod::Dense) => Err(Error::Precondition("dense flattening is region-specific; use flatten() directly".into())),
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct PairingResult {
    pub half_signature: Option<i64>,
    pub inertia: InertiaResult,
    pub eigen_inertia: Option<InertiaResult>,
    pub params: LocalizerParams,
    pub zero_tol: f64,
    pub dim: usize,
    pub shape: Shape,
    /// Set when the run was outside the admissible window.
    pub warning: Option<String>,
}

/// ½Sig(L_{κ,ρ}) on a prepared model.
pub fn pairing_prepared(p: &PreparedModel, kappa: f64, rho: f64, opts: &PairingOptions) -> Result<PairingResult> {
    if !(kappa > 0.0) || !(rho >= 1.0) {
        return Err(Error::Domain(format!("need κ > 0 and ρ ≥ 1, got κ = {kappa}, ρ = {rho}")));
    }
    let params = validate_params(&p.spectral, kappa, rho);
    let warning = if params.valid {
        None
    } else if opts.allow_invalid {
        Some(format!(
            "outside the admissible window (eq3 {}, eq4 {}; needs ρ > {:.1} and {:.3e} ≤ κ ≤ {:.3e})",
            params.eq3, params.eq4, params.rho_min, params.kappa_min, params.kappa_max
        ))
    } else {
        return Err(Error::Precondition(format!(
            "(κ, ρ) = ({kappa}, {rho}) is outside the admissible window (eq3 {}, eq4 {})",
            params.eq3, params.eq4
        )));
    };
    let region = TruncationRegion::new(opts.shape, rho)?;
    let dirac = DiracData::new(&region, p.hamiltonian.internal_dim());
    let h = build_hamiltonian(&p.hamiltonian, &region)?;
    let l = assemble_localizer(&h, &dirac, kappa)?;
    let zero_tol = default_zero_tol(&params, &l);
    let inertia: InertiaResult = inertia(&l, zero_tol)?;
    let eigen_inertia = if opts.crosscheck {
        let e: InertiaResult = inertia_eigen(&l, zero_tol)?.into();
        if (e.n_plus, e.n_minus, e.n_zero) != (inertia.n_plus, inertia.n_minus, inertia.n_zero) {
            return Err(Error::Consistency(format!(
                "inertia routes disagree: factorization ({}, {}, {}), eigenvalues ({}, {}, {})",
                inertia.n_plus, inertia.n_minus, inertia.n_zero, e.n_plus, e.n_minus, e.n_zero
            )));
        }
        Some(e)
    } else {
        None
    };
    if params.valid && inertia.n_zero > 0 {
        return Err(Error::Consistency(format!("{} eigenvalues within g/4 of zero inside the admissible window", inertia.n_zero)));
    }
    Ok(PairingResult { half_signature: inertia.half_signature, inertia, eigen_inertia, params, zero_tol, dim: l.dim(), shape: opts.shape, warning })
}

/// ½Sig(L_{κ,ρ}) for a model.
pub fn half_signature_pairing(model: &TightBindingModel, kappa: f64, rho: f64, opts: &PairingOptions) -> Result<PairingResult> {
    let p = prepare(model, opts.flatten, &opts.spectral)?;
    pairing_prepared(&p, kappa, rho, opts)
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct SweepRow {
    pub kappa: f64,
    pub rho: f64,
    pub valid: bool,
    pub sub_threshold: bool,
    pub n_plus: usize,
    pub n_minus: usize,
    pub n_zero: usize,
    pub half_signature: Option<i64>,
    pub min_abs_eig: f64,
    pub wall_ms: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct SweepSummary {
    pub rows: Vec<SweepRow>,
    pub valid_cells: usize,
    /// The common half-signature of the valid cells, if they agree.
    pub valid_signature: Option<i64>,
    pub valid_constant: bool,
    /// All sub-threshold cells have half-signature 0.
    pub sub_threshold_zero: bool,
}

/// One row per (κ, ρ) in grid order (ρ outer, κ inner), computed in parallel.
pub fn sweep(p: &PreparedModel, kappas: &[f64], rhos: &[f64], shape: Shape) -> Result<SweepSummary> {
    if kappas.is_empty() || rhos.is_empty() {
        return Err(Error::Domain("empty sweep grid".into()));
    }
    let cells: Vec<(usize, usize)> = (0..rhos.len()).flat_map(|r| (0..kappas.len()).map(move |k| (r, k))).collect();
    let rows: Vec<Result<SweepRow>> = cells
        .par_iter()
        .map(|&(ri, ki)| {
            let start = Instant::now();
            let (kappa, rho) = (kappas[ki], rhos[ri]);
            let opts = PairingOptions { shape, allow_invalid: true, ..PairingOptions::default() };
            let r = pairing_prepared(p, kappa, rho, &opts)?;
            Ok(SweepRow {
                kappa,
                rho,
                valid: r.params.valid,
                sub_threshold: r.params.sub_threshold,
                n_plus: r.inertia.n_plus,
                n_minus: r.inertia.n_minus,
                n_zero: r.inertia.n_zero,
                half_signature: r.half_signature,
                min_abs_eig: r.inertia.min_abs_eig,
                wall_ms: start.elapsed().as_secs_f64() * 1e3,
            })
        })
        .collect();
    let rows = rows.into_iter().collect::<Result<Vec<_>>>()?;
    let valid: Vec<&SweepRow> = rows.iter().filter(|r| r.valid).collect();
    let valid_signature = valid.first().and_then(|r| r.half_signature);
    let valid_constant = valid.iter().all(|r| r.half_signature.is_some() && r.half_signature == valid_signature);
    let sub_threshold_zero = rows.iter().filter(|r| r.sub_threshold).all(|r| r.half_signature == Some(0));
    Ok(SweepSummary { valid_cells: valid.len(), valid_signature, valid_constant, sub_threshold_zero, rows })
}
