//! Change detectors: ADWIN (used inside the adaptive tree) and DDM (used to
//! wrap a learner so it restarts on drift).

mod adwin;
mod ddm;

pub use adwin::Adwin;
pub use ddm::{wrap_with_ddm, Ddm, DdmClassifier, DriftLevel};
