//! Spectroscopy maps: ingestion, row normalization, ridge tracing,
//! transition labeling and Rabi-model fits.

pub mod fit;
pub mod label;
pub mod map;
pub mod overlay;
pub mod points;
pub mod ridge;
pub mod synth;

pub use fit::{fit_qrm, FitOptions, FitResult, FOCK_TOL_GHZ, PARAM_NAMES};
pub use label::{label_transitions, label_transitions_among, BranchAssignment, LabelReport, DEFAULT_AMBIGUITY_TOL_GHZ};
pub use map::{normalize_map, MagnitudeScale, S21Map};
pub use overlay::{overlay_svg, OverlayCurves};
pub use points::{TransitionPoint, TransitionPoints};
pub use ridge::{branches_to_points, extract_ridges, Branch, RidgeOptions};
