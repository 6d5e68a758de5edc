use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64 as C64;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use usc_core::quantum::eigen::{eigs_hermitian_with, EigenMethod, EigenOptions};
use usc_core::quantum::{tensor_embed, Operator};

fn random_hermitian(n: usize, seed: u64) -> DMatrix<C64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let a = DMatrix::from_fn(n, n, |_, _| {
        C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
    });
    (&a + a.adjoint()).scale(0.5)
}

fn random_unitary(n: usize, seed: u64) -> DMatrix<C64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let a = DMatrix::from_fn(n, n, |_, _| {
        C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
    });
    a.qr().q()
}

fn oracle_values(m: &DMatrix<C64>) -> Vec<f64> {
    let mut v: Vec<f64> = SymmetricEigen::new(m.clone()).eigenvalues.iter().copied().collect();
    v.sort_by(f64::total_cmp);
    v
}

fn opts(method: EigenMethod) -> EigenOptions {
    EigenOptions {
        method,
        ..Default::default()
    }
}

#[test]
fn random_60_matches_dense_oracle_for_every_route() {
    let m = random_hermitian(60, 11);
    let want = oracle_values(&m);
    let h = Operator::from_dense(&m);
    for method in [EigenMethod::Dense, EigenMethod::RealEmbedding, EigenMethod::Lanczos] {
        let sys = eigs_hermitian_with(&h, 8, &opts(method)).unwrap();
        for (i, v) in sys.values.iter().enumerate() {
            assert!((v - want[i]).abs() < 1e-9, "{method:?} level {i}: {v} vs {}", want[i]);
        }
        for i in 0..8 {
            for j in 0..8 {
                let d: C64 = sys.vectors[i]
                    .iter()
                    .zip(&sys.vectors[j])
                    .map(|(a, b)| a.conj() * b)
                    .sum();
                let e = if i == j { 1.0 } else { 0.0 };
                assert!((d - C64::new(e, 0.0)).norm() < 1e-10, "{method:?} overlap ({i},{j})");
            }
        }
        assert!(sys.diagnostics.max_residual <= 1e-8 * h.max_abs());
    }
}

#[test]
fn real_embedding_reports_each_degenerate_level_once() {
    // U diag(λ) U† with repeated λ; the embedding doubles every level.
    let spectrum = [-2.0, -2.0, -2.0, 0.5, 0.5, 1.0, 3.0, 3.0, 4.0, 7.0];
    let u = random_unitary(10, 5);
    let d = DMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
        10,
        spectrum.iter().map(|&x| C64::new(x, 0.0)),
    ));
    let m = &u * d * u.adjoint();
    let m = (&m + m.adjoint()).scale(0.5);
    let h = Operator::from_dense(&m);
    let sys = eigs_hermitian_with(&h, 10, &opts(EigenMethod::RealEmbedding)).unwrap();
    let complex = eigs_hermitian_with(&h, 10, &opts(EigenMethod::Dense)).unwrap();
    assert_eq!(sys.values.len(), 10);
    for i in 0..10 {
        assert!((sys.values[i] - spectrum[i]).abs() < 1e-10, "{i}: {}", sys.values[i]);
        assert!((sys.values[i] - complex.values[i]).abs() < 1e-10);
    }
    // Degenerate eigenvectors must span independent directions.
    for i in 0..10 {
        for j in 0..10 {
            let d: C64 = sys.vectors[i]
                .iter()
                .zip(&sys.vectors[j])
                .map(|(a, b)| a.conj() * b)
                .sum();
            let e = if i == j { 1.0 } else { 0.0 };
            assert!((d - C64::new(e, 0.0)).norm() < 1e-9, "({i},{j}) {d}");
        }
    }
    // Partial request stops inside the degenerate block without doubling.
    let two = eigs_hermitian_with(&h, 4, &opts(EigenMethod::RealEmbedding)).unwrap();
    assert_eq!(two.values.len(), 4);
    assert!((two.values[2] + 2.0).abs() < 1e-10 && (two.values[3] - 0.5).abs() < 1e-10);
}

#[test]
fn lanczos_on_sparse_complex_chain_with_clustered_levels() {
    // Tight-binding ring threaded by flux: complex hoppings and near-degenerate pairs.
    let n = 600;
    let hop = C64::from_polar(1.0, 0.37);
    let mut trip = Vec::new();
    for i in 0..n {
        let j = (i + 1) % n;
        trip.push((i, j, -hop));
        trip.push((j, i, -hop.conj()));
        trip.push((i, i, C64::new(0.01 * ((i * 7919) % 13) as f64, 0.0)));
    }
    let h = Operator::from_triplets(n, trip);
    let sparse = eigs_hermitian_with(&h, 6, &opts(EigenMethod::Lanczos)).unwrap();
    let want = oracle_values(&h.to_dense());
    for i in 0..6 {
        assert!((sparse.values[i] - want[i]).abs() < 1e-8, "{i}");
    }
}

#[test]
fn repeated_calls_are_bit_identical() {
    let h = Operator::from_dense(&random_hermitian(500, 3));
    let a = eigs_hermitian_with(&h, 4, &opts(EigenMethod::Lanczos)).unwrap();
    let b = eigs_hermitian_with(&h, 4, &opts(EigenMethod::Lanczos)).unwrap();
    assert_eq!(a.values, b.values);
    assert_eq!(a.vectors, b.vectors);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn kronecker_sum_spectrum_is_pairwise_sums(
        a in prop::collection::vec(-5.0f64..5.0, 1..5),
        b in prop::collection::vec(-5.0f64..5.0, 1..5),
    ) {
        let (ia, ib) = (Operator::identity(a.len()), Operator::identity(b.len()));
        let (da, db) = (Operator::diagonal(&a), Operator::diagonal(&b));
        let sum = &tensor_embed(&[&da, &ib]).unwrap() + &tensor_embed(&[&ia, &db]).unwrap();
        prop_assert_eq!(sum.dim(), a.len() * b.len());
        let mut got: Vec<f64> = (0..sum.dim()).map(|i| sum.get(i, i).re).collect();
        let mut want: Vec<f64> = a.iter().flat_map(|x| b.iter().map(move |y| x + y)).collect();
        got.sort_by(f64::total_cmp);
        want.sort_by(f64::total_cmp);
        for (g, w) in got.iter().zip(&want) {
            prop_assert!((g - w).abs() < 1e-12);
        }
    }

    #[test]
    fn eigenvalues_ascending_and_within_spectrum(seed in 0u64..1000, n in 2usize..30) {
        let m = random_hermitian(n, seed);
        let want = oracle_values(&m);
        let h = Operator::from_dense(&m);
        let k = n.min(5);
        let sys = eigs_hermitian_with(&h, k, &EigenOptions::default()).unwrap();
        for w in sys.values.windows(2) {
            prop_assert!(w[0] <= w[1]);
        }
        for i in 0..k {
            prop_assert!((sys.values[i] - want[i]).abs() < 1e-9);
        }
    }
}
