//! Capacity maximization for MIMO links assisted by a beyond-diagonal
//! reconfigurable intelligent surface (BD-RIS).
//!
//! The scattering matrix of a fully connected passive BD-RIS is unitary and
//! symmetric. This crate maximizes the link capacity by alternating
//!
//! * water-filling on the transmit covariance (for a fixed scattering matrix),
//! * majorization-minimization with Riemannian gradient ascent on the unitary
//!   group for the scattering matrix (for a fixed covariance),
//!
//! using the Takagi factorization `Θ = Q Qᵀ` to turn the symmetric-unitary
//! constraint into plain unitarity of `Q`.
//!
//! Modules:
//! * [`matkit`] — dense complex linear algebra (SVD, Hermitian eigen, skew
//!   exponential, Takagi, polar projection).
//! * [`channel`] — scenario geometry, path loss, Rayleigh/Rician fading draws.
//! * [`rate`] — equivalent channel, capacity, water-filling.
//! * [`bdris_opt`] — the MM surrogate and the manifold optimizer.
//! * [`baselines`] — optimized diagonal RIS, low-complexity projection,
//!   random phases, no-RIS reference.

pub mod baselines;
pub mod bdris_opt;
pub mod channel;
pub mod error;
pub mod matkit;
pub mod rate;

pub use error::{Error, Result};
pub use matkit::CMat;
