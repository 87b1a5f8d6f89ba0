//! Skeletal time-series toolkit: data model, dataset I/O, temporal
//! degradation operators, and length-normalization pre-processing.
//!
//! The crate is the foundation of a benchmark that measures how action
//! classifiers behave when frames of a skeletal recording are deleted —
//! uniformly (lower capture rate), at random (transmission loss), or in a
//! contiguous block (occlusion) — and how much linear-interpolation
//! reconstruction recovers. Everything here is deterministic: stochastic
//! operators draw from a frozen, documented generator so results reproduce
//! bit-for-bit across machines.

pub mod canonical;
pub mod data;
pub mod degrade;
pub mod error;
pub mod ntu;
pub mod preproc;
pub mod rng;
pub mod split;
pub mod synth;

pub use data::{Frame, Joint, SkeletonSequence, CHANNELS, MAX_BODIES};
pub use error::{CoreError, Result};
