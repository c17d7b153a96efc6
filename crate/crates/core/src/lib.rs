//! MAP estimation for Markov random fields.
//!
//! The core estimators are serial Highest Confidence First ([`hcf`]) and its
//! synchronous parallel form, Local HCF ([`local`]). Both start with every
//! site uncommitted and repeatedly change the sites whose stability says a
//! change lowers the energy most confidently. [`baselines`] holds the usual
//! comparison methods, [`oracle`] exact answers for small fields, and
//! [`edge`] the edge-labeling domain used for image experiments.

pub mod baselines;
pub mod cli;
pub mod edge;
pub mod error;
pub mod formats;
pub mod hcf;
pub mod heap;
pub mod local;
pub mod mrf;
pub mod oracle;
pub mod rng;
pub mod stability;
pub mod synth;
pub mod trace;

pub use error::{MrfError, Result};
pub use mrf::{
    augmented_energy, energy, local_energy, validate_field, Clique, Configuration, DataTerm, Field,
    Label, LabelSet, Violation, UNCOMMITTED,
};
pub use stability::{best_label, stability, StabilityRecord};
