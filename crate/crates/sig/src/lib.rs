//! Truncated path signatures and log-signatures for piecewise-linear
//! paths.
//!
//! A path's signature is the collection of its iterated integrals up to a
//! truncation depth; its logarithm, expressed in the Lyndon basis of the
//! free Lie algebra, is the same information with all algebraic
//! redundancy removed. Signatures are invariant to reparametrization —
//! traversing the same curve at a different (monotone) speed leaves them
//! unchanged — which is precisely why features built on them tolerate
//! uniform frame deletion.
//!
//! Layout: [`path`] holds the geometric input type, [`tensor`] the dense
//! truncated tensor algebra (segment exponentials, Chen products, tensor
//! log/exp), [`lyndon`] the basis enumeration and bracket expansions,
//! [`logsig`] the triangular projection, [`window`] the per-window feature
//! matrices, and [`oracle`] a deliberately naive Riemann-sum implementation
//! used only to cross-check the rest.

pub mod error;
pub mod logsig;
pub mod lyndon;
pub mod oracle;
pub mod path;
pub mod tensor;
pub mod window;

pub use error::{Result, SigError};
pub use logsig::{log_signature, log_signature_of_path, LogSignature};
pub use lyndon::{logsig_dim, LyndonBasis};
pub use path::Path;
pub use tensor::{chen_product, segment_signature, signature, TruncatedSignature};
pub use window::{window_boundaries, windowed_log_signature};
