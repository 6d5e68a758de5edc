//! Full four-mode circuit model and the renormalized qubit.

pub mod full;
pub mod params;
pub mod qubit;
pub mod spectrum;

pub use full::{adiabatic_phi4, build_full_hamiltonian, FullModel};
pub use params::{CircuitParams, JunctionCharge, JunctionEnergy, TruncationSpec, ASSUMED_CSH_FF};
pub use qubit::{qubit_gap_and_ip, FluxWindow, QubitEstimate, QubitModel};
pub use spectrum::{spectrum_of_model, spectrum_vs_flux, spectrum_vs_flux_with, SpectrumRun, SpectrumTable};
