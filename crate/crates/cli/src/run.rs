//! One function per pipeline. Each returns whether its assertions held.

use std::fs;
use std::io::BufWriter;
use std::time::Instant;

use anyhow::{bail, Context, Result};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use specloc::fuzzy::flat_matrix;
use specloc::linalg::{mm, HermOp};
use specloc::oracle::chern_fhs_with_gauge;
use specloc::*;

use crate::{opt_cell, ExperimentConfig, Sink};

/// Matrix dumps above this dimension need `--force`.
pub const DUMP_LIMIT: usize = 20000;

fn single(values: &[f64], name: &str) -> Result<f64> {
    match values {
        [v] => Ok(*v),
        _ => bail!("{name} must be a single value here, got {} values", values.len()),
    }
}

fn flat_model(cfg: &ExperimentConfig) -> Result<FlatHamiltonian> {
    let method = cfg.flatten.unwrap_or(FlattenMethod::Bloch);
    Ok(flatten(&cfg.model.model()?, method, None)?)
}

fn dirac_at(rho: f64, shape: Shape, internal: usize) -> Result<DiracData> {
    Ok(DiracData::new(&TruncationRegion::new(shape, rho)?, internal))
}

pub fn compute(cfg: &ExperimentConfig) -> Result<bool> {
    let (kappa, rho) = (single(&cfg.kappa, "--kappa")?, single(&cfg.rho, "--rho")?);
    let p = prepare(&cfg.model.model()?, cfg.flatten, &SpectralOptions::default())?;
    let opts = PairingOptions { shape: cfg.shape, flatten: cfg.flatten, allow_invalid: cfg.allow_invalid, crosscheck: cfg.crosscheck, ..PairingOptions::default() };
    let r = pairing_prepared(&p, kappa, rho, &opts)?;
    if let Some(w) = &r.warning {
        eprintln!("warning: {w}");
    }
    if let Some(path) = &cfg.dump_matrix {
        if r.dim > DUMP_LIMIT && !cfg.force {
            bail!("localizer dimension {} exceeds {DUMP_LIMIT}; pass --force to dump it anyway", r.dim);
        }
        let dirac = dirac_at(rho, cfg.shape, p.hamiltonian.internal_dim())?;
        let h = build_hamiltonian(&p.hamiltonian, &dirac.region)?;
        let l = assemble_localizer(&h, &dirac, kappa)?.to_csr();
        let mut f = BufWriter::new(fs::File::create(path).with_context(|| format!("creating {path}"))?);
        mm::write_hermitian(&mut f, &l, &[format!("spectral localizer, kappa = {kappa}, rho = {rho}"), format!("config_hash: {}", cfg.hash())])?;
    }
    Sink::open(cfg)?.json(cfg, &r)?;
    Ok(true)
}

pub fn sweep_grid(cfg: &ExperimentConfig) -> Result<bool> {
    let p = prepare(&cfg.model.model()?, cfg.flatten, &SpectralOptions::default())?;
    let mut s = specloc::sweep(&p, &cfg.kappa, &cfg.rho, cfg.shape)?;
    if !cfg.timing {
        s.rows.iter_mut().for_each(|r| r.wall_ms = 0.0);
    }
    eprintln!(
        "{} valid cells, constant: {}; sub-threshold cells all zero: {}",
        s.valid_cells, s.valid_constant, s.sub_threshold_zero
    );
    let columns = ["kappa", "rho", "valid", "n_plus", "n_minus", "n_zero", "half_signature", "min_abs_eig", "wall_ms"];
    Sink::open(cfg)?.csv(cfg, &columns, &s.rows, |r| {
        vec![
            r.kappa.to_string(),
            r.rho.to_string(),
            r.valid.to_string(),
            r.n_plus.to_string(),
            r.n_minus.to_string(),
            r.n_zero.to_string(),
            opt_cell(r.half_signature),
            format!("{:e}", r.min_abs_eig),
            format!("{:.3}", r.wall_ms),
        ]
    })?;
    Ok(s.valid_constant)
}

pub fn fuzzy_width(cfg: &ExperimentConfig) -> Result<bool> {
    let flat = flat_model(cfg)?;
    let mut rows = Vec::new();
    for &rho in &cfg.rho {
        let dirac = dirac_at(rho, cfg.shape, flat.internal_dim())?;
        let w = build_fuzzy_sphere(&flat, &dirac, &TaperPair::new(rho)?)?.width()?;
        rows.push((rho, w));
    }
    let columns = ["rho", "sphere_defect", "comm_12", "comm_13", "comm_23", "width"];
    Sink::open(cfg)?.csv(cfg, &columns, &rows, |(rho, w)| {
        let mut v = vec![rho.to_string(), format!("{:e}", w.sphere_defect)];
        v.extend(w.commutators.iter().map(|c| format!("{c:e}")));
        v.push(format!("{:e}", w.width));
        v
    })?;
    Ok(true)
}

pub fn fuzzy_map(cfg: &ExperimentConfig) -> Result<bool> {
    let flat = flat_model(cfg)?;
    let fns = SphereMapFunctions::new(cfg.sphere_map);
    let mut rows = Vec::new();
    for &rho in &cfg.rho {
        let dirac = dirac_at(rho, cfg.shape, flat.internal_dim())?;
        let x = build_fuzzy_sphere(&flat, &dirac, &TaperPair::new(rho)?)?;
        let z = map_fuzzy_sphere(&fns, &x)?;
        rows.push((rho, x.width()?.width, z.width()?.width));
    }
    Sink::open(cfg)?.csv(cfg, &["rho", "width_x", "width_z"], &rows, |(rho, wx, wz)| vec![rho.to_string(), format!("{wx:e}"), format!("{wz:e}")])?;
    Ok(true)
}

#[derive(Serialize)]
struct Degrees {
    identity: DegreeResult,
    antipode: DegreeResult,
    map: DegreeResult,
    grid: (usize, usize),
}

pub fn fuzzy_degree(cfg: &ExperimentConfig) -> Result<bool> {
    let (np, nt) = cfg.grid;
    let f = SphereMapFunctions::new(cfg.sphere_map);
    let d = Degrees {
        identity: mapping_degree(|x| x, np, nt)?,
        antipode: mapping_degree(|x| [-x[0], -x[1], -x[2]], np, nt)?,
        map: mapping_degree(|x| f.map_point(x).expect("grid points lie on the sphere"), np, nt)?,
        grid: cfg.grid,
    };
    let ok = d.identity.degree == 1 && d.antipode.degree == -1 && d.map.degree == 1;
    Sink::open(cfg)?.json(cfg, &d)?;
    Ok(ok)
}

pub fn fuzzy_homotopy(cfg: &ExperimentConfig) -> Result<bool> {
    let (kappa, rho) = (single(&cfg.kappa, "--kappa")?, single(&cfg.rho, "--rho")?);
    let flat = flat_model(cfg)?;
    let dirac = dirac_at(rho, cfg.shape, flat.internal_dim())?;
    let taper = TaperPair::new(rho)?;
    let h = flat_matrix(&flat, &dirac)?;
    let n = cfg.steps;
    let mut rows = Vec::new();
    for i in 0..n {
        let lambda = i as f64 / (n - 1) as f64;
        let s = localizer_sphere_at(&h, &dirac, kappa, &taper, lambda)?;
        // Away from λ = 1 the components need not be contractions, so the width may be undefined.
        let width = s.width().ok().map(|w| w.width);
        let r = inertia(&HermOp::Dense(s.to_matrix()), 1e-10)?;
        rows.push((lambda, r, width));
    }
    let ok = rows.iter().all(|(_, r, _)| r.n_zero == 0) && rows[0].1.half_signature == rows[n - 1].1.half_signature;
    let columns = ["lambda", "min_abs_eig", "n_plus", "n_minus", "n_zero", "half_signature", "width"];
    Sink::open(cfg)?.csv(cfg, &columns, &rows, |(l, r, w)| {
        vec![
            l.to_string(),
            format!("{:e}", r.min_abs_eig),
            r.n_plus.to_string(),
            r.n_minus.to_string(),
            r.n_zero.to_string(),
            opt_cell(r.half_signature),
            w.map(|x| format!("{x:e}")).unwrap_or_default(),
        ]
    })?;
    Ok(ok)
}

pub fn oracle_chern(cfg: &ExperimentConfig) -> Result<bool> {
    let r = chern_fhs(&cfg.model.model()?, cfg.nk)?;
    Sink::open(cfg)?.json(cfg, &r)?;
    Ok(true)
}

fn box_radius(cfg: &ExperimentConfig) -> Result<f64> {
    match cfg.box_radius {
        Some(b) => Ok(b),
        None => single(&cfg.rho, "--rho"),
    }
}

pub fn oracle_fredholm(cfg: &ExperimentConfig) -> Result<bool> {
    let e = fredholm_index_estimate(&flat_model(cfg)?, box_radius(cfg)?, None, cfg.projection)?;
    Sink::open(cfg)?.json(cfg, &e)?;
    Ok(e.reliable)
}

pub fn oracle_compare(cfg: &ExperimentConfig) -> Result<bool> {
    let flat = flat_model(cfg)?;
    let fns = SphereMapFunctions::new(cfg.sphere_map);
    let mut rows = Vec::new();
    for &rho in &cfg.rho {
        let dirac = dirac_at(rho, cfg.shape, flat.internal_dim())?;
        let taper = TaperPair::new(rho)?;
        let z = map_fuzzy_sphere(&fns, &build_fuzzy_sphere(&flat, &dirac, &taper)?)?;
        let y = build_index_sphere(&flat, &dirac, &taper, &fns, cfg.projection)?;
        rows.push((rho, compare_spheres(&z, &y)?));
    }
    let columns = ["rho", "dev_1", "dev_2", "dev_3", "max_dev"];
    Sink::open(cfg)?.csv(cfg, &columns, &rows, |(rho, d)| {
        let mut v = vec![rho.to_string()];
        v.extend(d.iter().map(|x| format!("{x:e}")));
        v.push(format!("{:e}", d.iter().cloned().fold(0.0, f64::max)));
        v
    })?;
    Ok(true)
}

#[derive(Serialize)]
struct Crosscheck {
    chern: ChernResult,
    chern_random_gauge: i64,
    fredholm: FredholmEstimate,
    localizer: PairingResult,
    agree: bool,
}

pub fn crosscheck(cfg: &ExperimentConfig) -> Result<bool> {
    let model = cfg.model.model()?;
    let (kappa, rho) = (single(&cfg.kappa, "--kappa")?, single(&cfg.rho, "--rho")?);
    let start = Instant::now();
    let chern = chern_fhs(&model, cfg.nk)?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let phases: Vec<f64> = (0..cfg.nk * cfg.nk).map(|_| rng.random_range(0.0..std::f64::consts::TAU)).collect();
    let gauged = chern_fhs_with_gauge(&model, cfg.nk, |i, j| Complex64::from_polar(1.0, phases[i * cfg.nk + j]))?;
    let opts = PairingOptions { shape: cfg.shape, flatten: cfg.flatten, allow_invalid: true, crosscheck: cfg.crosscheck, ..PairingOptions::default() };
    let localizer = half_signature_pairing(&model, kappa, rho, &opts)?;
    let fredholm = fredholm_index_estimate(&flat_model(cfg)?, cfg.box_radius.unwrap_or(2.0 * rho), None, cfg.projection)?;
    let sign = match cfg.projection {
        Projection::Positive => 1,
        Projection::Fermi => -1,
    };
    let agree = localizer.half_signature == Some(chern.chern) && sign * fredholm.index == chern.chern && gauged.chern == chern.chern && fredholm.reliable;
    eprintln!(
        "chern {} (random gauge {}), fredholm {} ({:?}), half-signature {:?}: {} in {:.1}s",
        chern.chern,
        gauged.chern,
        fredholm.index,
        cfg.projection,
        localizer.half_signature,
        if agree { "agree" } else { "DISAGREE" },
        start.elapsed().as_secs_f64()
    );
    let out = Crosscheck { chern, chern_random_gauge: gauged.chern, fredholm, localizer, agree };
    Sink::open(cfg)?.json(cfg, &out)?;
    Ok(agree)
}
