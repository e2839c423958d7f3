//! Random matrices whose entries are a uniformly shuffled copy of a fixed
//! seed matrix, and Monte-Carlo labs for their spectra.
//!
//! * [`rng`]: counter-based streams and uniform permutations
//! * [`ensemble`]: seeds, shuffled samples, exact moment enumeration
//! * [`linalg`]: dense eigenvalue, singular value and subspace kernels
//! * [`spectral`]: empirical spectra, KS distances, log potentials
//! * [`combclt`]: permutation statistics and their Gaussian approximation
//! * [`concentration`]: tail and moment fits for Lipschitz functionals
//! * [`ssv`]: smallest and intermediate singular values
//! * [`runner`]: config-driven experiments with CSV/JSON output

pub mod combclt;
pub mod concentration;
pub mod ensemble;
pub mod error;
pub mod linalg;
pub mod rng;
pub mod runner;
pub mod spectral;
pub mod ssv;

pub use error::{Error, Result};
