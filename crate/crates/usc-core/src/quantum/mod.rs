//! Operator algebra and Hermitian eigensolving.

pub mod basis;
pub mod eigen;
pub mod operator;

pub use basis::{charge_number, cos_phi, osc_ladder, sin_phi, ChargeBasis, OscillatorBasis};
pub use eigen::{eigs_hermitian, eigs_hermitian_with, EigenMethod, EigenOptions, Eigensystem};
pub use operator::{tensor_embed, tensor_embed_capped, Operator, DEFAULT_DIM_CAP};
