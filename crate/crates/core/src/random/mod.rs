//! All randomness used by the crate.
//!
//! Every random draw flows from an [`RngStream`]. Runs derive child streams
//! with [`RngStream::split`], so the draws of one epoch never depend on how
//! many epochs came before or after it.

mod geometric;
mod stream;
mod subset;
mod tail;

pub use geometric::{geom_gamma, geom_sample, geometrization_identity_check, GeomIdentity};
pub use stream::RngStream;
pub use subset::{
    exact_subset_mean_variance, sample_without_replacement, subset_variance_bound, SubsetSampler,
};
pub use tail::{tail_end, tail_index, TailDistribution};
