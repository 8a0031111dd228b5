use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use specloc_linalg::{
    inertia_eigen, inertia_factor, BlockLdl, BunchKaufman, Csr, DMat, HermOp, Inertia, C,
};

type M = DMat<f64>;

fn random_hermitian(n: usize, rng: &mut ChaCha8Rng) -> M {
    let mut a = M::from_fn(n, n, |_, _| C::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5));
    a.symmetrize();
    a
}

fn random_banded(n: usize, bw: usize, rng: &mut ChaCha8Rng) -> Csr<f64> {
    let mut t = Vec::new();
    for i in 0..n {
        t.push((i, i, C::new(rng.random::<f64>() - 0.5, 0.0)));
        for j in i + 1..(i + bw + 1).min(n) {
            if rng.random::<f64>() < 0.6 {
                let v = C::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5);
                t.push((i, j, v));
                t.push((j, i, v.conj()));
            }
        }
    }
    Csr::from_triplets(n, n, t)
}

fn scatter(a: &Csr<f64>, seed: u64) -> Csr<f64> {
    let n = a.rows();
    let mut perm: Vec<usize> = (0..n).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for i in (1..n).rev() {
        perm.swap(i, rng.random_range(0..=i));
    }
    a.permute_sym(&perm)
}

fn residual(a: &M, x: &[C<f64>], b: &[C<f64>]) -> f64 {
    let mut ax = vec![C::new(0.0, 0.0); b.len()];
    a.matvec(x, &mut ax);
    ax.iter().zip(b).map(|(p, q)| (p - q).norm()).fold(0.0, f64::max)
}

#[test]
fn textbook_inertias() {
    let a = M::from_real_diag(&[2.0, 3.0, -1.0]);
    let f = BunchKaufman::factor(a).unwrap();
    assert_eq!(f.inertia(), Inertia { n_plus: 2, n_minus: 1, n_zero: 0 });

    let m = 7;
    let d: Vec<f64> = (0..2 * m).map(|i| if i < m { 1.0 } else { -1.0 }).collect();
    let f = BunchKaufman::factor(M::from_real_diag(&d)).unwrap();
    assert_eq!(f.inertia().half_signature(), Some(0));
    assert_eq!(f.inertia().n_plus, m);
}

#[test]
fn zero_diagonal_forces_two_by_two_pivots() {
    let mut a = M::zeros(4, 4);
    a[(1, 0)] = C::new(1.0, 2.0);
    a[(3, 2)] = C::new(-3.0, 0.5);
    a.hermitize_from_lower();
    let f = BunchKaufman::factor(a.clone()).unwrap();
    assert!(f.pivots().iter().any(|p| matches!(p, specloc_linalg::bunch_kaufman::Pivot::Two(_))));
    assert_eq!(f.inertia(), Inertia { n_plus: 2, n_minus: 2, n_zero: 0 });
    let b: Vec<C<f64>> = (0..4).map(|i| C::new(i as f64, 1.0)).collect();
    let mut x = b.clone();
    f.solve_in_place(&mut x).unwrap();
    assert!(residual(&a, &x, &b) < 1e-12);
}

#[test]
fn singular_matrix_reports_zero_pivot() {
    let a = M::from_real_diag(&[2.0, 0.0, -1.0]);
    let f = BunchKaufman::factor(a).unwrap();
    assert_eq!(f.inertia(), Inertia { n_plus: 1, n_minus: 1, n_zero: 1 });
}

#[test]
fn blocked_matches_eigenvalues_across_panel_widths() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for &n in &[1usize, 2, 3, 17, 64, 65, 130, 257] {
        let a = random_hermitian(n, &mut rng);
        let w = a.eigvalsh().unwrap();
        let expect = Inertia::from_eigenvalues(&w, 0.0);
        for &nb in &[2usize, 3, 8, 64] {
            let f = BunchKaufman::factor_with_block(a.clone(), nb).unwrap();
            assert_eq!(f.inertia(), expect, "n = {n}, nb = {nb}");
            let b: Vec<C<f64>> = (0..n).map(|i| C::new((i as f64).sin(), (i as f64).cos())).collect();
            let mut x = b.clone();
            f.solve_in_place(&mut x).unwrap();
            let xn = x.iter().map(|v| v.norm()).fold(0.0, f64::max);
            assert!(residual(&a, &x, &b) < 1e-10 * (1.0 + xn) * n as f64, "n = {n}, nb = {nb}");
        }
    }
}

#[test]
fn solve_many_matches_columnwise_solves() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let a = random_hermitian(90, &mut rng);
    let f = BunchKaufman::factor(a.clone()).unwrap();
    let mut b = M::from_fn(90, 4, |i, j| C::new((i * j) as f64 * 0.01, 1.0 - j as f64));
    let cols: Vec<Vec<C<f64>>> = (0..4).map(|j| b.col(j).to_vec()).collect();
    f.solve_many(&mut b).unwrap();
    for (j, col) in cols.iter().enumerate() {
        let mut x = col.clone();
        f.solve_in_place(&mut x).unwrap();
        for i in 0..90 {
            assert!((x[i] - b[(i, j)]).norm() < 1e-10);
        }
    }
}

#[test]
fn block_ldl_matches_eigenvalues_on_scattered_band_matrices() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for &(n, bw) in &[(300usize, 3usize), (500, 12), (800, 30)] {
        let a = scatter(&random_banded(n, bw, &mut rng), n as u64);
        let f = BlockLdl::factor(&a, 0.0).unwrap();
        let w = a.to_dense().eigvalsh().unwrap();
        assert_eq!(f.inertia(), Inertia::from_eigenvalues(&w, 0.0), "n = {n}");
        let b: Vec<C<f64>> = (0..n).map(|i| C::new(1.0, i as f64 / n as f64)).collect();
        let mut x = b.clone();
        f.solve_in_place(&mut x).unwrap();
        let xn = x.iter().map(|v| v.norm()).fold(0.0, f64::max);
        assert!(residual(&a.to_dense(), &x, &b) < 1e-9 * (1.0 + xn), "n = {n}");
    }
}

#[test]
fn shifted_counts_respect_zero_tolerance() {
    let a = HermOp::Dense(M::from_real_diag(&[1.0, 1e-9, -1e-9, -2.0, 0.5]));
    let r = inertia_factor(&a, 1e-6).unwrap();
    assert_eq!(r.inertia, Inertia { n_plus: 2, n_minus: 1, n_zero: 2 });
    let e = inertia_eigen(&a, 1e-6).unwrap();
    assert_eq!(e.inertia, r.inertia);
}

#[test]
fn min_abs_eig_from_lanczos_matches_eigenvalues() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    let a = random_hermitian(200, &mut rng);
    let w = a.eigvalsh().unwrap();
    let exact = w.iter().fold(f64::INFINITY, |m, x| m.min(x.abs()));
    let r = inertia_factor(&HermOp::Dense(a), 0.0).unwrap();
    assert!((r.min_abs_eig - exact).abs() < 1e-10 * (1.0 + exact), "{} vs {}", r.min_abs_eig, exact);
}

#[test]
fn band_eigen_route_matches_dense() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let a = scatter(&random_banded(400, 5, &mut rng), 1);
    let mut w1 = specloc_linalg::eigenvalues(&HermOp::Sparse(a.clone())).unwrap();
    let w2 = a.to_dense().eigvalsh().unwrap();
    w1.sort_by(|a, b| a.partial_cmp(b).unwrap());
    for (x, y) in w1.iter().zip(&w2) {
        assert!((x - y).abs() < 1e-10);
    }
}

#[test]
fn matrix_market_round_trip() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let a = random_banded(40, 3, &mut rng);
    let mut buf = Vec::new();
    specloc_linalg::mm::write_hermitian(&mut buf, &a, &["round trip".to_string()]).unwrap();
    let text = String::from_utf8(buf.clone()).unwrap();
    assert!(text.starts_with("%%MatrixMarket matrix coordinate complex hermitian"));
    let b: Csr<f64> = specloc_linalg::mm::read(std::io::Cursor::new(buf)).unwrap();
    assert_eq!(a.rows(), b.rows());
    for (i, j, v) in a.triplets() {
        assert!((b.get(i, j) - v).norm() <= 1e-15 * (1.0 + v.norm()));
    }
    assert_eq!(a.nnz(), b.nnz());
}

#[test]
fn generic_over_f32() {
    let a = DMat::<f32>::from_real_diag(&[3.0, -2.0, 1.0, -0.5]);
    let f = BunchKaufman::factor(a.clone()).unwrap();
    assert_eq!(f.inertia(), Inertia { n_plus: 2, n_minus: 2, n_zero: 0 });
    let w = a.eigvalsh().unwrap();
    assert_eq!(Inertia::from_eigenvalues(&w, 0.0f32), f.inertia());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn congruence_preserves_inertia(seed in 0u64..10_000, n in 2usize..40) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = random_hermitian(n, &mut rng);
        let s = M::from_fn(n, n, |i, j| if i == j { C::new(1.0, 0.0) } else if i > j { C::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5) } else { C::new(0.0, 0.0) });
        let b = s.matmul(&a).matmul(&s.adjoint());
        let fa = BunchKaufman::factor(a).unwrap().inertia();
        let fb = BunchKaufman::factor(b).unwrap().inertia();
        prop_assert_eq!(fa, fb);
    }

    #[test]
    fn factorization_and_eigen_agree(seed in 0u64..10_000, n in 1usize..80) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = HermOp::Dense(random_hermitian(n, &mut rng));
        let tol = 1e-8;
        let f = inertia_factor(&a, tol).unwrap();
        let e = inertia_eigen(&a, tol).unwrap();
        prop_assert_eq!(f.inertia, e.inertia);
    }
}
