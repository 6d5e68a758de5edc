use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use usc_core::circuit::{
    qubit_gap_and_ip, spectrum_vs_flux_with, CircuitParams, FluxWindow, FullModel, JunctionCharge,
    JunctionEnergy, QubitModel, TruncationSpec, ASSUMED_CSH_FF,
};
use usc_core::quantum::{eigs_hermitian_with, EigenOptions};
use usc_core::reduced::renormalized_resonator;

fn design() -> CircuitParams {
    CircuitParams::design(ASSUMED_CSH_FF).unwrap()
}

fn tight() -> EigenOptions {
    EigenOptions {
        rel_tol: 1e-12,
        ..EigenOptions::default()
    }
}

/// Qubit-only Hamiltonian filled entry by entry in the two-junction charge basis.
fn dense_qubit_gap(p: &CircuitParams, ncut: i64, f: f64) -> f64 {
    let d = (2 * ncut + 1) as usize;
    let n = d * d;
    let at = p.alpha_tilde();
    let det = 1.0 + 2.0 * at;
    let (md, mo) = ((1.0 + at) / det, -at / det);
    let ec = p.ec_ghz();
    let corr = 0.5 * usc_core::constants::inductance_current_sq_ghz(p.l_eff_nh(), p.small_junction_ic_na());
    let mut h = DMatrix::<C64>::zeros(n, n);
    let idx = |a: i64, b: i64| ((a + ncut) as usize) * d + (b + ncut) as usize;
    let inb = |a: i64| a.abs() <= ncut;
    let ph = C64::from_polar(1.0, 2.0 * std::f64::consts::PI * f);
    for a in -ncut..=ncut {
        for b in -ncut..=ncut {
            let i = idx(a, b);
            let (x, y) = (a as f64, b as f64);
            h[(i, i)] += C64::from(4.0 * ec * (md * (x * x + y * y) + 2.0 * mo * x * y) - 0.5 * corr);
            for s in [-1i64, 1] {
                if inb(a + s) {
                    h[(idx(a + s, b), i)] -= C64::from(0.5 * p.ej_ghz);
                }
                if inb(b + s) {
                    h[(idx(a, b + s), i)] -= C64::from(0.5 * p.ej_ghz);
                }
            }
            // e^{-i(φ1+φ3)} lowers both charges
            if inb(a - 1) && inb(b - 1) {
                let j = idx(a - 1, b - 1);
                h[(j, i)] -= ph * (0.5 * p.alpha * p.ej_ghz);
                h[(i, j)] -= ph.conj() * (0.5 * p.alpha * p.ej_ghz);
            }
            // sin² = ½ − ¼(e^{2i·} + e^{−2i·})
            if inb(a - 2) && inb(b - 2) {
                let j = idx(a - 2, b - 2);
                h[(j, i)] += ph * ph * (0.25 * corr);
                h[(i, j)] += (ph * ph).conj() * (0.25 * corr);
            }
        }
    }
    let mut e: Vec<f64> = h.symmetric_eigenvalues().iter().copied().collect();
    e.sort_by(f64::total_cmp);
    e[1] - e[0]
}

#[test]
fn qubit_gap_agrees_with_dense_oracle() {
    for alpha in [0.58, 1.0] {
        let mut p = design();
        p.alpha = alpha;
        let m = QubitModel::new(&p, 8).unwrap();
        let tl = m.two_level(0.5).unwrap();
        let oracle = dense_qubit_gap(&p, 16, 0.5);
        assert!((tl.e1 - tl.e0 - oracle).abs() < 1e-4, "alpha={alpha}: {} vs {oracle}", tl.e1 - tl.e0);
    }
    let p = design();
    let tl = QubitModel::new(&p, 12).unwrap().two_level(0.497).unwrap();
    assert!((tl.e1 - tl.e0 - dense_qubit_gap(&p, 12, 0.497)).abs() < 1e-8);
}

#[test]
fn persistent_current_estimators_agree_where_bias_matches_gap() {
    let p = design();
    let q = qubit_gap_and_ip(&p, 8, FluxWindow::default()).unwrap();
    let rel = (q.ip_slope_na - q.ip_matrix_element_na).abs() / q.ip_slope_na;
    assert!(rel < 0.02, "{} vs {} ({rel})", q.ip_slope_na, q.ip_matrix_element_na);
}

#[test]
fn design_gap_near_3_57_ghz() {
    let q = qubit_gap_and_ip(&design(), 8, FluxWindow::default()).unwrap();
    assert!((q.delta_ghz - 3.57).abs() / 3.57 < 0.05, "{}", q.delta_ghz);
}

#[test]
fn full_spectrum_is_symmetric_about_half_flux() {
    let t = spectrum_vs_flux_with(&design(), &TruncationSpec::default(), &[0.47, 0.53], 6, &tight()).unwrap();
    for (a, b) in t.table.levels[0].iter().zip(&t.table.levels[1]) {
        assert!((a - b).abs() < 1e-8, "{a} vs {b}");
    }
}

#[test]
fn tiny_coupler_splits_into_qubit_and_resonator() {
    let mut p = design();
    p.lc_nh = 1e-6;
    let trunc = TruncationSpec::new(5, 5, 4, 6).unwrap();
    let run = spectrum_vs_flux_with(&p, &trunc, &[0.5], 6, &tight()).unwrap();
    let rel: Vec<f64> = run.table.levels[0].iter().map(|e| e - run.table.levels[0][0]).collect();

    let q = QubitModel::new(&p, 5).unwrap().two_level(0.5).unwrap();
    let qubit = q.e1 - q.e0;
    let (res, _) = renormalized_resonator(p.lr_nh, p.lc_nh, p.cr_ff).unwrap();
    let mut union = vec![qubit, res, qubit + res, 2.0 * res];
    union.sort_by(f64::total_cmp);
    for (i, u) in union.iter().take(3).enumerate() {
        assert!((rel[i + 1] - u).abs() < 1e-3, "level {}: {} vs {u}", i + 1, rel[i + 1]);
    }
}

#[test]
fn open_loop_resonator_matches_lumped_formula() {
    let p = design();
    let model = FullModel::new(&p, &TruncationSpec::default()).unwrap();
    let sys = eigs_hermitian_with(&model.hamiltonian_open_loop(), 2, &EigenOptions::default()).unwrap();
    let w = sys.values[1] - sys.values[0];
    let (res, _) = renormalized_resonator(p.lr_nh, p.lc_nh, p.cr_ff).unwrap();
    assert!((w - res).abs() / res < 0.01, "{w} vs {res}");
}

#[test]
fn current_density_route_matches_frequency_route() {
    let a = CircuitParams::estimated_device(ASSUMED_CSH_FF).unwrap();
    let b = CircuitParams::new(
        JunctionEnergy::Frequency { ej_ghz: 93.46 },
        JunctionCharge::ChargingEnergyGhz(4.94),
        0.53,
        ASSUMED_CSH_FF,
        0.9,
        740.0,
        0.74,
    )
    .unwrap();
    assert!((a.ej_ghz - b.ej_ghz).abs() < 1e-9);
}
