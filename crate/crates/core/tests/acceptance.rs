//! One PASS/FAIL line per acceptance criterion. Slow: run with `cargo test --test acceptance -- --nocapture`.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use specloc::fuzzy::flat_matrix;
use specloc::linalg::HermOp;
use specloc::*;
use std::time::Instant;

type Outcome = std::result::Result<(bool, String), Error>;

struct Report {
    lines: Vec<(usize, bool, String)>,
    /// Localizer instances checked by both inertia routes across all criteria.
    localizer_instances: usize,
}

impl Report {
    fn run(&mut self, id: usize, f: impl FnOnce(&mut Report) -> Outcome) {
        let start = Instant::now();
        let (ok, msg) = match f(self) {
            Ok(r) => r,
            Err(e) => (false, format!("error: {e}")),
        };
        let line = format!("criterion {id:>2}: {} ({:.1}s) {msg}", if ok { "PASS" } else { "FAIL" }, start.elapsed().as_secs_f64());
        println!("{line}");
        self.lines.push((id, ok, line));
    }
}

fn flat_qwz(m: f64) -> Result<FlatHamiltonian> {
    flatten(&TightBindingModel::qwz(m), FlattenMethod::Bloch, None)
}

fn crosscheck_opts(shape: Shape) -> PairingOptions {
    PairingOptions { shape, allow_invalid: true, crosscheck: true, ..PairingOptions::default() }
}

fn main_theorem(rep: &mut Report) -> Outcome {
    let mut ok = true;
    let mut msg = Vec::new();
    for m in [-3.0, -1.0, 1.0, 3.0] {
        let t = Instant::now();
        let model = TightBindingModel::qwz(m);
        let hs = half_signature_pairing(&model, 0.1, 16.0, &crosscheck_opts(Shape::Disc))?.half_signature;
        rep.localizer_instances += 1;
        let chern = chern_fhs(&model, 40)?.chern;
        let flat = flat_qwz(m)?;
        let fred = fredholm_index_estimate(&flat, 16.0, None, Projection::Positive)?;
        let expect = if m.abs() < 2.0 { 1 } else { 0 };
        let pass = hs == Some(chern) && fred.index == chern && fred.reliable && chern.abs() == expect;
        ok &= pass;
        msg.push(format!("m={m}: ½Sig {hs:?} chern {chern} fredholm {} ({:.0}s)", fred.index, t.elapsed().as_secs_f64()));
    }
    Ok((ok, msg.join("; ")))
}

fn gap_bound(rep: &mut Report) -> Outcome {
    let model = TightBindingModel::qwz_scaled(3.0, 0.1);
    let p = prepare(&model, None, &SpectralOptions::default())?;
    let mut worst = f64::INFINITY;
    let mut runs = 0;
    let mut ok = true;
    let mut check = |min_abs: f64, g: f64| {
        runs += 1;
        worst = worst.min(min_abs - g / 2.0);
        min_abs >= g / 2.0 - 1e-10
    };
    for (kappa, rho) in [(1.0, 10.0), (0.8, 12.0), (1.5, 8.0)] {
        let r = pairing_prepared(&p, kappa, rho, &PairingOptions { flatten: None, crosscheck: true, ..PairingOptions::default() })?;
        rep.localizer_instances += 1;
        ok &= r.params.valid && check(r.eigen_inertia.unwrap().min_abs_eig, r.params.gap);
    }
    let s = sweep(&p, &[0.7, 1.0, 1.4, 1.9], &[8.0, 10.0], Shape::Disc)?;
    for row in s.rows.iter().filter(|r| r.valid) {
        ok &= check(row.min_abs_eig, p.spectral.gap);
    }
    Ok((ok && runs >= 6, format!("{runs} valid runs, min(min|eig| − g/2) = {worst:.4}")))
}

fn parameter_independence(_: &mut Report) -> Outcome {
    let p = prepare(&TightBindingModel::qwz(1.0), None, &SpectralOptions::default())?;
    let kappas: Vec<f64> = (1..=10).map(|i| 0.05 * i as f64).collect();
    let rhos = [8.0, 10.0, 12.0, 14.0, 16.0];
    let s = sweep(&p, &kappas, &rhos, Shape::Disc)?;
    let sub: Vec<&SweepRow> = s.rows.iter().filter(|r| r.sub_threshold).collect();
    let sub_values: Vec<String> = sub.iter().map(|r| format!("(κ={:.2}, ρ={}) → {:?}", r.kappa, r.rho, r.half_signature)).collect();
    let msg = format!(
        "{} valid cells (constant: {}, vacuous: {}); {} sub-threshold cells, all zero: {} [{}]",
        s.valid_cells,
        s.valid_constant,
        s.valid_cells == 0,
        sub.len(),
        s.sub_threshold_zero,
        sub_values.join(", ")
    );
    Ok((s.valid_constant && s.sub_threshold_zero, msg))
}

fn square_equivalence(rep: &mut Report) -> Outcome {
    let mut ok = true;
    let mut msg = Vec::new();
    for m in [1.0, 3.0] {
        let model = TightBindingModel::qwz(m);
        let disc = half_signature_pairing(&model, 0.1, 12.0, &crosscheck_opts(Shape::Disc))?.half_signature;
        let square = half_signature_pairing(&model, 0.1, 12.0, &crosscheck_opts(Shape::Square))?.half_signature;
        rep.localizer_instances += 2;
        ok &= disc.is_some() && disc == square;
        msg.push(format!("m={m}: disc {disc:?} square {square:?}"));
    }
    Ok((ok, msg.join("; ")))
}

fn random_hermitian(n: usize, rng: &mut ChaCha8Rng) -> Mat {
    let mut a = Mat::from_fn(n, n, |_, _| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)));
    a.symmetrize();
    a
}

fn taper_bound(_: &mut Report) -> Outcome {
    let t = TaperPair::new(1.0)?;
    let mut ok = t.fourier_l1 <= 8.0 && t.fourier_l1 + t.fourier_tail <= 8.0;
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let mut worst: f64 = 0.0;
    for _ in 0..20 {
        let rho = rng.random_range(1.5..7.0);
        let region = TruncationRegion::new(Shape::Disc, rho + 1.0)?;
        let dirac = DiracData::new(&region, 1);
        let a = random_hermitian(dirac.dim(), &mut rng);
        let (lhs, rhs) = taper_commutator_check(&TaperPair::new(rho)?, &dirac, &a)?;
        ok &= lhs <= rhs;
        worst = worst.max(lhs / rhs);
    }
    Ok((ok, format!("‖F̂₁′‖ = {:.4} (+ tail {:.3}); 20 random cases, max lhs/rhs = {worst:.3}", t.fourier_l1, t.fourier_tail)))
}

fn fuzzy_width_scaling(_: &mut Report) -> Outcome {
    let flat = flat_qwz(1.0)?;
    let rhos = [8.0, 12.0, 16.0, 20.0, 24.0];
    let mut widths = Vec::new();
    for &rho in &rhos {
        let dirac = DiracData::new(&TruncationRegion::new(Shape::Disc, rho)?, 2);
        widths.push(build_fuzzy_sphere(&flat, &dirac, &TaperPair::new(rho)?)?.width()?.width);
    }
    let xs: Vec<f64> = rhos.iter().map(|r| r.ln()).collect();
    let ys: Vec<f64> = widths.iter().map(|w| w.ln()).collect();
    let n = xs.len() as f64;
    let (mx, my) = (xs.iter().sum::<f64>() / n, ys.iter().sum::<f64>() / n);
    let slope = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum::<f64>() / xs.iter().map(|x| (x - mx).powi(2)).sum::<f64>();
    let w: Vec<String> = widths.iter().map(|w| format!("{w:.4}")).collect();
    Ok(((slope + 1.0).abs() <= 0.3, format!("slope {slope:.3}; widths [{}]", w.join(", "))))
}

fn localizer_homotopy(rep: &mut Report) -> Outcome {
    let flat = flat_qwz(1.0)?;
    let rho = 16.0;
    let dirac = DiracData::new(&TruncationRegion::new(Shape::Disc, rho)?, 2);
    let taper = TaperPair::new(rho)?;
    let h = flat_matrix(&flat, &dirac)?;
    let kappa = 0.1;
    let lambdas: Vec<f64> = (0..=10).map(|i| i as f64 / 10.0).collect();
    let pts = localizer_sphere_homotopy(&h, &dirac, kappa, &taper, &lambdas)?;
    let start = localizer_sphere_at(&h, &dirac, kappa, &taper, 0.0)?.to_matrix();
    let (fa, ea) = inertia_both(&HermOp::Dense(start), 1e-10)?;
    rep.localizer_instances += 1;
    let routes_agree = (fa.n_plus, fa.n_minus, fa.n_zero) == (ea.n_plus, ea.n_minus, ea.n_zero);
    let gapped = pts.iter().all(|p| p.min_abs_eig > 0.0 && p.n_zero == 0);
    let min = pts.iter().map(|p| p.min_abs_eig).fold(f64::INFINITY, f64::min);
    let (s0, s1) = (pts[0].half_signature, pts[10].half_signature);
    Ok((gapped && routes_agree && s0.is_some() && s0 == s1, format!("min over λ of min|eig| = {min:.4}; ½Sig(0) = {s0:?}, ½Sig(1) = {s1:?}")))
}

fn degrees(_: &mut Report) -> Outcome {
    let id = mapping_degree(|x| x, 400, 200)?;
    let anti = mapping_degree(|x| [-x[0], -x[1], -x[2]], 400, 200)?;
    let f = SphereMapFunctions::new(SphereMapChoice::Smoothed);
    let paper = mapping_degree(|x| f.map_point(x).expect("grid points lie on the sphere"), 400, 200)?;
    let special = SphereMapFunctions::new(SphereMapChoice::Special);
    let z = special.map_point([0.0, -(3.0f64).sqrt() / 2.0, 0.5])?;
    let pre = z[0].abs().max((z[1] - 1.0).abs()).max(z[2].abs());
    let ok = id.degree == 1 && anti.degree == -1 && paper.degree == 1 && [id.residual, anti.residual, paper.residual].iter().all(|&r| r < 0.2) && pre <= 1e-10;
    Ok((
        ok,
        format!(
            "identity {} ({:.2e}), antipode {} ({:.2e}), map {} ({:.2e}); preimage error {pre:.1e}",
            id.degree, id.residual, anti.degree, anti.residual, paper.degree, paper.residual
        ),
    ))
}

fn sphere_comparison(_: &mut Report) -> Outcome {
    let flat = flat_qwz(1.0)?;
    let fns = SphereMapFunctions::new(SphereMapChoice::Special);
    let mut dev = Vec::new();
    let mut sigs = Vec::new();
    for rho in [10.0, 20.0] {
        let dirac = DiracData::new(&TruncationRegion::new(Shape::Disc, rho)?, 2);
        let taper = TaperPair::new(rho)?;
        let z = map_fuzzy_sphere(&fns, &build_fuzzy_sphere(&flat, &dirac, &taper)?)?;
        let y = build_index_sphere(&flat, &dirac, &taper, &fns, Projection::Positive)?;
        dev.push(compare_spheres(&z, &y)?.into_iter().fold(0.0, f64::max));
        let sz = inertia(&HermOp::Dense(z.to_matrix()), 1e-10)?.half_signature;
        drop(z);
        let sy = inertia(&HermOp::Dense(y.to_matrix()), 1e-10)?.half_signature;
        sigs.push((sz, sy));
    }
    let factor = dev[0] / dev[1];
    let agree = sigs.iter().all(|(a, b)| a.is_some() && a == b);
    Ok(((1.6..=2.4).contains(&factor) && agree, format!("max‖Zᵢ − Y′ᵢ‖ {:.4} → {:.4} (factor {factor:.3}); ½Sig (Z, Y′) {sigs:?}", dev[0], dev[1])))
}

fn inertia_engine(rep: &mut Report) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut ok = true;
    for _ in 0..100 {
        let n = rng.random_range(10..=500);
        let (f, e) = inertia_both(&HermOp::Dense(random_hermitian(n, &mut rng)), 1e-10)?;
        ok &= (f.n_plus, f.n_minus, f.n_zero) == (e.n_plus, e.n_minus, e.n_zero);
    }
    // Each localizer run above fails with a consistency error if the routes disagree.
    Ok((ok, format!("100 random matrices agree: {ok}; {} localizer instances cross-checked", rep.localizer_instances)))
}

#[test]
fn acceptance() {
    let mut rep = Report { lines: Vec::new(), localizer_instances: 0 };
    rep.run(1, main_theorem);
    rep.run(2, gap_bound);
    rep.run(3, parameter_independence);
    rep.run(4, square_equivalence);
    rep.run(5, taper_bound);
    rep.run(6, fuzzy_width_scaling);
    rep.run(7, localizer_homotopy);
    rep.run(8, degrees);
    rep.run(9, sphere_comparison);
    rep.run(10, inertia_engine);
    let failed: Vec<&String> = rep.lines.iter().filter(|l| !l.1).map(|l| &l.2).collect();
    assert!(failed.is_empty(), "failed criteria:\n{}", failed.iter().map(|s| s.as_str()).collect::<Vec<_>>().join("\n"));
}
