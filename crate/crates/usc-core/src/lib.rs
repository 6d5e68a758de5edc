pub mod circuit;
pub mod constants;
pub mod error;
pub mod materials;
pub mod quantum;
pub mod reduced;
pub mod spectro;
pub mod transition;

pub use error::{Error, Result};
pub use transition::TransitionLabel;
