//! Coherence dynamics of qubit registers under incoherent noise.
//!
//! The crate builds `N`-qubit density matrices, evolves them under local
//! Kraus channels, evaluates coherence quantifiers (l1-norm, relative
//! entropy, distance-based measures obtained by minimizing over the
//! incoherent set) and certifies when those quantifiers stay frozen.
//!
//! Module map:
//!
//! - [`densmat`]: dense complex matrices, Hermitian eigensolver, entropies and distances.
//! - [`channels`]: single-qubit incoherent channels, local lifting, global rephasing.
//! - [`coherence`]: coherence measures and the simplex-constrained minimizer.
//! - [`m3`]: states with maximally mixed marginals and their closed-form algebra.
//! - [`dynamics`]: noise-strength sweeps and freezing verdicts.
//! - [`verify`]: numerical certification of the structural lemmas behind freezing.
//! - [`cli`]: command-line front end used by the `cohlab` binary.
//!
//! Runnable walkthroughs live in the crate's `examples/` directory.

pub mod channels;
pub mod cli;
pub mod coherence;
pub mod densmat;
pub mod dynamics;
mod error;
pub mod m3;
pub mod optim;
pub mod verify;

pub use error::{Error, Result};
pub use num_complex::Complex64;
