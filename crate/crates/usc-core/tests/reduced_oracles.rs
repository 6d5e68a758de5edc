use nalgebra::{DMatrix, SymmetricEigen};
use proptest::prelude::*;
use usc_core::circuit::{CircuitParams, JunctionCharge, JunctionEnergy};
use usc_core::reduced::coupling::{coupling_estimate, coupling_estimate_with, g_simple_limit, XiMode};
use usc_core::reduced::rabi::{
    bs_shift_analytic, bs_shift_numeric, epsilon, levels, model_matrix, transitions, transitions_fixed,
    Model, QRMParams,
};
use usc_core::TransitionLabel;

/// Rabi model written out with Pauli matrices and ladder operators via Kronecker products.
fn brute_rabi(delta: f64, eps: f64, wr: f64, g: f64, nf: usize) -> Vec<f64> {
    let sz = DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, -1.0]);
    let sx = DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 1.0, 0.0]);
    let i2 = DMatrix::<f64>::identity(2, 2);
    let inf = DMatrix::<f64>::identity(nf, nf);
    let mut a = DMatrix::<f64>::zeros(nf, nf);
    for n in 1..nf {
        a[(n - 1, n)] = (n as f64).sqrt();
    }
    let ad = a.transpose();
    let num = &ad * &a + &inf * 0.5;
    let h = (sz.kronecker(&inf) * eps + sx.kronecker(&inf) * delta) * -0.5
        + i2.kronecker(&num) * wr
        + sz.kronecker(&(&a + &ad)) * g;
    let mut v: Vec<f64> = SymmetricEigen::new(h).eigenvalues.iter().copied().collect();
    v.sort_by(f64::total_cmp);
    v
}

fn sorted_eigs(m: DMatrix<f64>) -> Vec<f64> {
    let mut v: Vec<f64> = SymmetricEigen::new(m).eigenvalues.iter().copied().collect();
    v.sort_by(f64::total_cmp);
    v
}

#[test]
fn rabi_matches_brute_force_at_fit_parameters() {
    let p = QRMParams::device_fit();
    let conv = transitions(&p, 0.5, Model::Rabi).unwrap();
    let e = brute_rabi(p.delta_ghz, 0.0, p.omega_r_ghz, p.g_ghz, 60);
    assert!((conv.get(TransitionLabel::W01) - (e[1] - e[0])).abs() < 1e-6);
    assert!((conv.get(TransitionLabel::W02) - (e[2] - e[0])).abs() < 1e-6);
    let eps = epsilon(p.ip_na, 0.507);
    let fixed = levels(&p.with_nfock(30), 0.507, Model::Rabi);
    let brute = brute_rabi(p.delta_ghz, eps, p.omega_r_ghz, p.g_ghz, 30);
    for (a, b) in fixed.iter().zip(&brute) {
        assert!((a - b).abs() < 1e-9);
    }
}

#[test]
fn transitions_settle_under_fock_doubling() {
    let p = QRMParams::device_fit();
    for f in [0.5, 0.505, 0.52] {
        let a = transitions_fixed(&p, f, Model::Rabi);
        let b = transitions_fixed(&p.with_nfock(80), f, Model::Rabi);
        for i in 0..4 {
            assert!((a[i] - b[i]).abs() < 1e-6, "f={f} transition {i}: {} vs {}", a[i], b[i]);
        }
    }
}

#[test]
fn jc_sector_blocks_reproduce_full_spectrum() {
    let p = QRMParams::device_fit().with_nfock(20);
    let nf = p.nfock;
    let m = model_matrix(&p, 0.503, Model::JaynesCummings);
    let full = sorted_eigs(m.clone());
    // index (q, n) -> q*nf + n, excitation = n + [q == 0]
    let exc = |i: usize| i % nf + usize::from(i / nf == 0);
    let mut blocks = Vec::new();
    for sector in 0..=nf {
        let idx: Vec<usize> = (0..2 * nf).filter(|&i| exc(i) == sector).collect();
        if idx.is_empty() {
            continue;
        }
        let sub = DMatrix::from_fn(idx.len(), idx.len(), |r, c| m[(idx[r], idx[c])]);
        blocks.extend(sorted_eigs(sub));
    }
    blocks.sort_by(f64::total_cmp);
    for (a, b) in full.iter().zip(&blocks) {
        assert!((a - b).abs() < 1e-10);
    }
}

#[test]
fn fit_parameters_bloch_siegert_shift() {
    let p = QRMParams::device_fit();
    let s01 = bs_shift_numeric(&p, 0.5, TransitionLabel::W01).unwrap();
    let s02 = bs_shift_numeric(&p, 0.5, TransitionLabel::W02).unwrap();
    assert!((s01.abs() - 0.023).abs() < 0.005, "{s01}");
    assert!(s01 * s02 < 0.0, "{s01} {s02}");
    let analytic = bs_shift_analytic(&p, 0.5);
    assert!((analytic - 0.0329).abs() < 5e-4, "{analytic}");
}

#[test]
fn numeric_shift_approaches_analytic_for_weak_coupling() {
    let mut p = QRMParams::device_fit();
    p.g_ghz = 0.01 * p.omega_r_ghz;
    let num = bs_shift_numeric(&p, 0.5, TransitionLabel::W01).unwrap();
    let ana = bs_shift_analytic(&p, 0.5);
    let ratio = num.abs() / ana;
    assert!((ratio - 1.0).abs() < 0.05, "{ratio}");
}

fn device_with(lr_nh: f64, lc_nh: f64) -> CircuitParams {
    CircuitParams::new(
        JunctionEnergy::Frequency { ej_ghz: 93.46 },
        JunctionCharge::ChargingEnergyGhz(4.94),
        0.58,
        11.0,
        lr_nh,
        740.0,
        lc_nh,
    )
    .unwrap()
}

fn footnote_device(lc_nh: f64) -> CircuitParams {
    device_with(0.9, lc_nh)
}

#[test]
fn coupling_estimate_device_and_limits() {
    let est = coupling_estimate(&footnote_device(0.74), 19.6).unwrap();
    assert!((est.g_ghz - 0.61).abs() / 0.61 < 0.12, "{}", est.g_ghz);
    assert!(est.l_eff_nh < 0.74 && est.xi_r > 0.0);
    assert!((est.irms_na - 47.6).abs() < 0.5, "{}", est.irms_na);
    assert_eq!(coupling_estimate(&footnote_device(0.74), 0.0).unwrap().g_ghz, 0.0);

    let far = device_with(100.0, 0.1);
    let e = coupling_estimate_with(&far, 19.6, XiMode::Unity).unwrap();
    let simple = g_simple_limit(0.1, 19.6, e.irms_na);
    assert!((e.g_ghz / simple - 1.0).abs() < 2e-3);
}

#[test]
fn coupling_vanishes_monotonically_with_coupler() {
    let mut last = f64::INFINITY;
    for lc in [0.1, 0.03, 0.01, 3e-3, 1e-3, 1e-4] {
        let g = coupling_estimate(&footnote_device(lc), 19.6).unwrap().g_ghz;
        assert!(g < last, "lc={lc}: {g} !< {last}");
        last = g;
    }
    assert!(last < 1e-3);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn rabi_levels_even_in_bias(d in 0.001f64..0.05, delta in 1.0f64..8.0, g in 0.0f64..1.0) {
        let p = QRMParams::new(delta, 12.0, 4.5, g).unwrap().with_nfock(16);
        let a = levels(&p, 0.5 + d, Model::Rabi);
        let b = levels(&p, 0.5 - d, Model::Rabi);
        for (x, y) in a.iter().zip(&b) {
            prop_assert!((x - y).abs() < 1e-10);
        }
    }

    #[test]
    fn epsilon_is_odd(d in -0.5f64..0.5, ip in 0.0f64..200.0) {
        prop_assert!((epsilon(ip, 0.5 + d) + epsilon(ip, 0.5 - d)).abs() < 1e-12);
    }

    #[test]
    fn simple_limit_linear(l in 0.01f64..5.0, ip in 0.1f64..100.0, ir in 0.1f64..100.0, s in 0.1f64..10.0) {
        let g = g_simple_limit(l, ip, ir);
        prop_assert!((g_simple_limit(s * l, ip, ir) - s * g).abs() <= 1e-12 * s * g.max(1.0));
        prop_assert!((g_simple_limit(l, s * ip, ir) - s * g).abs() <= 1e-12 * s * g.max(1.0));
        prop_assert!((g_simple_limit(l, ip, s * ir) - s * g).abs() <= 1e-12 * s * g.max(1.0));
    }
}
