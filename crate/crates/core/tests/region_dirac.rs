use num_complex::Complex64;
use specloc::linalg::HermOp;
use specloc::*;

fn dense(op: &HermOp<f64>) -> Mat {
    match op {
        HermOp::Dense(m) => m.clone(),
        HermOp::Sparse(s) => s.to_dense(),
    }
}

#[test]
fn disc_radius_one_has_five_sites() {
    let r = TruncationRegion::new(Shape::Disc, 1.0).unwrap();
    let mut s = r.sites().to_vec();
    s.sort();
    assert_eq!(s, vec![(-1, 0), (0, -1), (0, 0), (0, 1), (1, 0)]);
}

#[test]
fn disc_radius_1_9_matches_enumeration() {
    let r = TruncationRegion::new(Shape::Disc, 1.9).unwrap();
    let brute = (-3i64..=3).flat_map(|a| (-3i64..=3).map(move |b| (a, b))).filter(|(a, b)| ((a * a + b * b) as f64) <= 3.61).count();
    assert_eq!(brute, 9);
    assert_eq!(r.len(), 9);
}

#[test]
fn square_radius_two_has_25_sites() {
    assert_eq!(TruncationRegion::new(Shape::Square, 2.0).unwrap().len(), 25);
}

#[test]
fn radius_below_one_is_rejected() {
    assert!(matches!(TruncationRegion::new(Shape::Disc, 0.5), Err(Error::Domain(_))));
    assert!(TruncationRegion::new(Shape::Square, f64::NAN).is_err());
}

#[test]
fn region_contains_origin_and_is_symmetric() {
    for shape in [Shape::Disc, Shape::Square] {
        let r = TruncationRegion::new(shape, 4.7).unwrap();
        assert!(r.contains((0, 0)));
        for &(a, b) in r.sites() {
            assert!(r.contains((-a, -b)));
        }
        let mut sorted = r.sites().to_vec();
        sorted.sort();
        assert_eq!(sorted, r.sites());
    }
}

#[test]
fn region_csv_lists_sites() {
    let r = TruncationRegion::new(Shape::Disc, 1.0).unwrap();
    let mut out = Vec::new();
    r.write_csv(&mut out).unwrap();
    let text = String::from_utf8(out).unwrap();
    assert_eq!(text.lines().count(), 6);
    assert_eq!(text.lines().next(), Some("index,n1,n2"));
}

#[test]
fn origin_is_shifted() {
    let r = TruncationRegion::new(Shape::Disc, 2.0).unwrap();
    let d = DiracData::new(&r, 2);
    let o = r.index_of((0, 0)).unwrap();
    assert_eq!(d.d0(o), Complex64::new(1.0, 0.0));
    assert_eq!(d.r[o], 1.0);
    assert_eq!(d.phase[o], Complex64::new(1.0, 0.0));
}

#[test]
fn site_three_four() {
    let r = TruncationRegion::new(Shape::Disc, 5.0).unwrap();
    let d = DiracData::new(&r, 1);
    let i = r.index_of((3, 4)).unwrap();
    assert_eq!(d.r[i], 5.0);
    assert!((d.phase[i] - Complex64::new(0.6, 0.8)).norm() < 1e-15);
}

#[test]
fn phase_and_radius_invariants() {
    let r = TruncationRegion::new(Shape::Square, 6.0).unwrap();
    let d = DiracData::new(&r, 1);
    for s in 0..d.sites() {
        assert!(d.r[s] >= 1.0);
        assert!((d.phase[s].norm() - 1.0).abs() < 1e-15);
        assert!((d.phase[s] * d.r[s] - d.d0(s)).norm() < 1e-13);
    }
}

#[test]
fn chirality_anticommutes_exactly() {
    let r = TruncationRegion::new(Shape::Disc, 3.0).unwrap();
    let d = DiracData::new(&r, 2);
    let dm = dense(&d.operator());
    let g = dense(&d.chirality());
    let gdg = g.matmul(&dm).matmul(&g);
    assert_eq!(gdg.add(&dm).max_abs(), 0.0);
    assert_eq!(dm.hermiticity_defect(), 0.0);
}

#[test]
fn dirac_square_is_radius_square() {
    let r = TruncationRegion::new(Shape::Disc, 4.0).unwrap();
    let d = DiracData::new(&r, 2);
    let dm = dense(&d.operator());
    let d2 = dm.matmul(&dm);
    let r2: Vec<f64> = d.expand(&d.r).iter().map(|x| x * x).collect();
    let n = d.dim();
    let target = Mat::from_fn(2 * n, 2 * n, |i, j| if i == j { Complex64::new(r2[i % n], 0.0) } else { Complex64::new(0.0, 0.0) });
    assert!(d2.sub(&target).max_abs() < 1e-12);
}

#[test]
fn truncated_dirac_is_invertible() {
    let r = TruncationRegion::new(Shape::Disc, 5.0).unwrap();
    let d = DiracData::new(&r, 1);
    let ev = dense(&d.operator()).eigvalsh().unwrap();
    assert!(ev.iter().all(|e| e.abs() >= 1.0 - 1e-12));
}

#[test]
fn truncating_identity_gives_identity() {
    let big = TruncationRegion::new(Shape::Disc, 6.0).unwrap();
    let small = TruncationRegion::new(Shape::Disc, 3.0).unwrap();
    let id = Sparse::from_dense(&Mat::identity(big.len() * 2), 0.0);
    let t = truncate(&id, &big, &small, 2).unwrap();
    assert_eq!(t.to_dense().sub(&Mat::identity(small.len() * 2)).max_abs(), 0.0);
}

#[test]
fn truncating_hamiltonian_equals_direct_build() {
    let model = TightBindingModel::qwz(1.0);
    let big = TruncationRegion::new(Shape::Disc, 20.0).unwrap();
    let small = TruncationRegion::new(Shape::Disc, 10.0).unwrap();
    let h_big = build_hamiltonian(&model, &big).unwrap();
    let t = truncate(&h_big, &big, &small, 2).unwrap();
    let direct = build_hamiltonian(&model, &small).unwrap();
    assert_eq!(t.to_dense().sub(&direct.to_dense()).max_abs(), 0.0);
}

#[test]
fn truncating_outside_domain_is_an_error() {
    let big = TruncationRegion::new(Shape::Disc, 6.0).unwrap();
    let small = TruncationRegion::new(Shape::Disc, 3.0).unwrap();
    let id = Sparse::from_dense(&Mat::identity(small.len()), 0.0);
    assert!(truncate(&id, &small, &big, 1).is_err());
}
