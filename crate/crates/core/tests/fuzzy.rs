use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use specloc::fuzzy::flat_matrix;
use specloc::model::sigma;
use specloc::*;

fn kron(a: &Mat, b: &Mat) -> Mat {
    let (p, q) = (b.rows(), b.cols());
    Mat::from_fn(a.rows() * p, a.cols() * q, |i, j| a[(i / p, j / q)] * b[(i % p, j % q)])
}

fn random_contraction(n: usize, rng: &mut ChaCha8Rng) -> Mat {
    let mut a = Mat::from_fn(n, n, |_, _| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)));
    a.symmetrize();
    let s = a.norm2().unwrap();
    a.scaled(0.99 / s)
}

fn flat_qwz(m: f64) -> FlatHamiltonian {
    flatten(&TightBindingModel::qwz(m), FlattenMethod::Bloch, None).unwrap()
}

fn sphere_at(flat: &FlatHamiltonian, rho: f64) -> (FuzzySphere, DiracData) {
    let region = TruncationRegion::new(Shape::Disc, rho).unwrap();
    let dirac = DiracData::new(&region, 2);
    let s = build_fuzzy_sphere(flat, &dirac, &TaperPair::new(rho).unwrap()).unwrap();
    (s, dirac)
}

#[test]
fn pauli_sphere_width() {
    let k = 1.0 / 3.0f64.sqrt();
    let s = FuzzySphere::new(Component::Dense(sigma(1).scaled(k)), Component::Dense(sigma(2).scaled(k)), Component::Dense(sigma(3).scaled(k))).unwrap();
    let w = s.width().unwrap();
    assert!(w.sphere_defect < 1e-14);
    assert!((w.width - 2.0 / 3.0).abs() < 1e-12, "{:?}", w);
}

#[test]
fn north_pole_sphere_is_exact() {
    let n = 5;
    let s = FuzzySphere::new(Component::Diag(vec![0.0; n]), Component::Diag(vec![0.0; n]), Component::Diag(vec![1.0; n])).unwrap();
    assert_eq!(s.width().unwrap().width, 0.0);
    let (l, min_sq) = sphere_to_matrix(&s).unwrap();
    assert_eq!(l.sub(&kron(&sigma(3), &Mat::identity(n))).max_abs(), 0.0);
    assert_eq!(min_sq, Some(1.0));
    let mut l2 = l.matmul(&l);
    l2.add_diag(-1.0);
    assert_eq!(l2.max_abs(), 0.0);
}

#[test]
fn oversized_component_is_rejected() {
    let s = FuzzySphere::new(Component::Diag(vec![1.5, 0.0]), Component::Diag(vec![0.0; 2]), Component::Diag(vec![0.0; 2])).unwrap();
    assert!(matches!(s.width(), Err(Error::Domain(_))));
    assert!(FuzzySphere::new(Component::Diag(vec![0.0; 2]), Component::Diag(vec![0.0; 3]), Component::Diag(vec![0.0; 2])).is_err());
}

#[test]
fn sphere_square_identity() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let x: Vec<Mat> = (0..3).map(|_| random_contraction(6, &mut rng)).collect();
    let s = FuzzySphere::new(Component::Dense(x[0].clone()), Component::Dense(x[1].clone()), Component::Dense(x[2].clone())).unwrap();
    let l = s.to_matrix();
    let expect = (1..=3).fold(Mat::zeros(12, 12), |acc, j| acc.add(&kron(&sigma(j), &x[j - 1])));
    assert!(l.sub(&expect).max_abs() < 1e-15);
    let sq = x.iter().fold(Mat::zeros(6, 6), |acc, m| acc.add(&m.matmul(m)));
    let mut rhs = kron(&Mat::identity(2), &sq);
    for (i, j) in [(0, 1), (0, 2), (1, 2)] {
        let c = x[i].matmul(&x[j]).sub(&x[j].matmul(&x[i]));
        rhs = rhs.add(&kron(&sigma(i + 1).matmul(&sigma(j + 1)), &c));
    }
    assert!(l.matmul(&l).sub(&rhs).max_abs() < 1e-13);
}

#[test]
fn localizer_sphere_structure() {
    let flat = flat_qwz(1.0);
    let rho = 12.0;
    let (s, dirac) = sphere_at(&flat, rho);
    let (x1, x2) = match (&s.x[0], &s.x[1]) {
        (Component::Diag(a), Component::Diag(b)) => (a.clone(), b.clone()),
        _ => panic!("position components should be diagonal"),
    };
    let taper = TaperPair::new(rho).unwrap();
    let f4 = dirac.expand(&dirac.r.iter().map(|&r| taper.f(r).powi(4)).collect::<Vec<_>>());
    for i in 0..x1.len() {
        assert!((x1[i] * x1[i] + x2[i] * x2[i] - f4[i]).abs() < 1e-14);
    }
    let w = s.width().unwrap();
    assert_eq!(w.commutators[0], 0.0);
    let (bulk, _) = spectral_data(flat.model.as_ref().unwrap(), &SpectralOptions::default()).unwrap();
    let bound = 16.0 * bulk.norm * bulk.commutator_norm / rho;
    assert!(w.width <= bound, "{} > {bound}", w.width);
    let (l, min_sq) = sphere_to_matrix(&s).unwrap();
    if w.width <= 0.25 {
        assert!(min_sq.unwrap() > 1.0 - 4.0 * w.width);
    }
    assert_eq!(l.rows(), 2 * dirac.dim());
}

#[test]
fn unflattened_input_is_rejected() {
    let raw = FlatHamiltonian {
        method: FlattenMethod::Bloch,
        truncation_radius: 1,
        tail_norm: 0.0,
        model: Some(TightBindingModel::qwz(1.0)),
        dense: None,
    };
    let region = TruncationRegion::new(Shape::Disc, 4.0).unwrap();
    let dirac = DiracData::new(&region, 2);
    assert!(matches!(build_fuzzy_sphere(&raw, &dirac, &TaperPair::new(4.0).unwrap()), Err(Error::Precondition(_))));
}

#[test]
fn homotopy_endpoints() {
    let flat = flat_qwz(1.0);
    let rho = 10.0;
    let region = TruncationRegion::new(Shape::Disc, rho).unwrap();
    let dirac = DiracData::new(&region, 2);
    let taper = TaperPair::new(rho).unwrap();
    let h = flat_matrix(&flat, &dirac).unwrap();
    let kappa = 0.1;
    let start = localizer_sphere_at(&h, &dirac, kappa, &taper, 0.0).unwrap().to_matrix();
    let hs = Sparse::from_dense(&h, 0.0);
    let l = assemble_localizer(&hs, &dirac, kappa).unwrap().to_dense();
    assert_eq!(start.sub(&l).max_abs(), 0.0);
    let end = localizer_sphere_at(&h, &dirac, kappa, &taper, 1.0).unwrap().to_matrix();
    let sphere = build_fuzzy_sphere(&flat, &dirac, &taper).unwrap();
    assert_eq!(end.sub(&sphere.to_matrix()).max_abs(), 0.0);
    assert!(localizer_sphere_at(&h, &dirac, kappa, &taper, 1.2).is_err());
    let pts = localizer_sphere_homotopy(&h, &dirac, kappa, &taper, &[0.0, 0.5, 1.0]).unwrap();
    assert_eq!(pts.len(), 3);
    assert!(pts.iter().all(|p| p.min_abs_eig > 0.0 && p.n_zero == 0));
    assert_eq!(pts[0].half_signature, pts[2].half_signature);
}

#[test]
fn map_of_north_pole() {
    let s = FuzzySphere::new(Component::Diag(vec![0.0; 3]), Component::Diag(vec![0.0; 3]), Component::Diag(vec![1.0; 3])).unwrap();
    for choice in [SphereMapChoice::Special, SphereMapChoice::Smoothed] {
        let z = map_fuzzy_sphere(&SphereMapFunctions::new(choice), &s).unwrap();
        assert!(z.x[0].to_dense().max_abs() < 1e-14);
        assert!(z.x[1].to_dense().max_abs() < 1e-14);
        let mut z3 = z.x[2].to_dense();
        z3.add_diag(1.0);
        assert!(z3.max_abs() < 1e-14);
    }
}

/// A commuting triple whose joint spectrum lies on S².
fn commuting_sphere(points: &[[f64; 3]], rng: &mut ChaCha8Rng) -> FuzzySphere {
    let n = points.len();
    let u = {
        let a = random_contraction(n, rng);
        a.eigh().unwrap().1
    };
    let conj = |j: usize| {
        let d: Vec<Complex64> = points.iter().map(|p| Complex64::new(p[j], 0.0)).collect();
        let mut m = specloc::linalg::congruence_diag(&u, &d);
        m.symmetrize();
        Component::Dense(m)
    };
    FuzzySphere::new(conj(0), conj(1), conj(2)).unwrap()
}

#[test]
fn exact_sphere_stays_exact_along_homotopy() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    let points: Vec<[f64; 3]> = (0..12)
        .map(|_| {
            let (u, v): (f64, f64) = (rng.random_range(-1.0..1.0), rng.random_range(0.0..6.28));
            let r = (1.0 - u * u).sqrt();
            [r * v.cos(), r * v.sin(), u]
        })
        .collect();
    let s = commuting_sphere(&points, &mut rng);
    assert!(s.width().unwrap().width < 1e-12);
    let lambdas: Vec<f64> = (0..=10).map(|i| i as f64 / 10.0).collect();
    let pts = fuzzy_homotopy(SphereMapChoice::Smoothed, &s, &lambdas).unwrap();
    for p in &pts {
        assert!(p.width.unwrap() < 1e-8, "λ={}: {:?}", p.lambda, p.width);
        assert!((p.min_abs_eig - 1.0).abs() < 1e-8);
    }
    let direct = map_fuzzy_sphere(&SphereMapFunctions::new(SphereMapChoice::Smoothed), &s).unwrap();
    let last = pts.last().unwrap();
    let r = specloc::inertia(&specloc::linalg::HermOp::Dense(direct.to_matrix()), 1e-10).unwrap();
    assert_eq!((r.n_plus, r.n_minus), (last.n_plus, last.n_minus));
}

#[test]
fn mapped_sphere_is_a_fuzzy_sphere() {
    let flat = flat_qwz(1.0);
    let fns = SphereMapFunctions::new(SphereMapChoice::Smoothed);
    let mut ratios = Vec::new();
    for rho in [8.0, 12.0, 16.0] {
        let (s, _) = sphere_at(&flat, rho);
        let wx = s.width().unwrap().width;
        let z = map_fuzzy_sphere(&fns, &s).unwrap();
        let x3 = z.x[2].to_dense().eigvalsh().unwrap();
        assert!(x3.iter().all(|e| e.abs() <= 1.0 + 1e-10));
        let wz = z.width().unwrap().width;
        ratios.push(wz / wx);
    }
    let (lo, hi) = ratios.iter().fold((f64::INFINITY, 0.0f64), |(a, b), &r| (a.min(r), b.max(r)));
    assert!(hi / lo < 3.0, "{ratios:?}");
}

#[test]
fn width_halves_when_radius_doubles() {
    let flat = flat_qwz(1.0);
    let (a, _) = sphere_at(&flat, 8.0);
    let (b, _) = sphere_at(&flat, 16.0);
    let ratio = b.width().unwrap().width / a.width().unwrap().width;
    assert!((ratio - 0.5).abs() <= 0.15, "{ratio}");
}
