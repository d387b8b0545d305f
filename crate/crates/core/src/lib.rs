//! Numerics for qubit Pauli dynamical maps.
//!
//! The crate covers the full chain from a decoherence function `q(t)` to the
//! questions one asks about the resulting dynamics:
//!
//! - [`profile`], [`weights`], [`state`]: decoherence families, convex mixing
//!   weights of the three Pauli dephasing maps, and qubit states.
//! - [`dynamics`]: map eigenvalues, canonical decay rates, singular points and
//!   the Type I / Type II classification of noninvertibility.
//! - [`divisibility`]: CP / P divisibility verdicts and trace-distance series.
//! - [`measure`]: the invertible and non-Markovian regions of the Pauli simplex.
//! - [`kernel`]: memory kernels, their Volterra reconstruction and Laplace checks.
//! - [`entanglement`]: Choi states, concurrence and sudden death / revival.
//!
//! Everything is a pure function of its inputs; values are immutable after
//! construction.

pub mod divisibility;
pub mod dynamics;
pub mod entanglement;
mod error;
pub mod kernel;
pub mod measure;
pub mod numeric;
pub mod profile;
pub mod state;
pub mod weights;

pub use error::{Error, Result};
pub use profile::{DecoherenceProfile, Family, PinnedShape, Semantics};
pub use state::{BlochVector, DensityMatrix};
pub use weights::MixingWeights;
