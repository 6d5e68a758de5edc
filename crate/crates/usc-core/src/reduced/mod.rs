//! Two-level effective models and closed-form coupling estimates.

pub mod coupling;
pub mod rabi;

pub use coupling::{
    coupling_estimate, coupling_estimate_with, g_simple_limit, renormalized_resonator,
    CouplingEstimate, XiMode,
};
pub use rabi::{
    bs_shift_analytic, bs_shift_numeric, epsilon, jc_hamiltonian, qrm_hamiltonian, Model,
    QRMParams,
};
