//! Streaming classification with similarity-based instance selection.
//!
//! The crate is organized around a single prequential (test-then-train)
//! loop. Every instance is scaled with running statistics, predicted,
//! scored, and then used for training. Training either goes straight to
//! the learner or through [`sis::SisEngine`], which resets the learner and
//! retrains it on the recent instances that are closest to the target in
//! a combined space/time distance, stopping at the smallest window whose
//! error on the most recent instances falls under a threshold.
//!
//! Modules:
//!
//! - [`stream`]: instances, label interning, CSV ingestion, synthetic
//!   drifting streams and scenario assembly.
//! - [`scaling`]: incremental standardization.
//! - [`distance`]: the spatio-temporal distance.
//! - [`sis`]: recent-instance buffer, similarity ranking and window search.
//! - [`hoeffding`]: the learner contract, Hoeffding tree and Hoeffding
//!   adaptive tree.
//! - [`drift`]: ADWIN and DDM detectors plus the DDM learner wrapper.
//! - [`evaluation`]: prequential runner, Kappa, windowed accuracy, cost.
//! - [`cli`]: run configuration, batteries and scenario construction used by
//!   the `sis-bench` binary.

pub mod cli;
pub mod distance;
pub mod drift;
pub mod error;
pub mod evaluation;
pub mod hoeffding;
pub mod scaling;
pub mod sis;
pub mod stream;

pub use error::{Error, Result};
pub use hoeffding::{ClassId, IncrementalClassifier};
pub use stream::{ClassSpace, Instance};
