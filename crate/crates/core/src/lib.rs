//! Exact Gaussian quench dynamics of translationally invariant harmonic
//! oscillator chains, and a chain of lower bounds on the bipartite
//! entanglement entropy of the evolved state:
//!
//! ```text
//! S  ≥  −ln tr ρ²  ≥  ½ ln det(P̃R̃)  →  Σ k c_k²  ≥  (1/M²) Σ k b_k²
//! ```
//!
//! The first three are evaluated on finite rings ([`reduction`]); the last two
//! are the large-system forms computed from Fourier coefficients ([`szego`]).

pub mod error;
pub mod evolution;
mod linalg;
pub mod reduction;
pub mod spectral;
pub mod szego;

pub use error::{Error, Result};
pub use evolution::{evolve, riccati_oracle, EvolutionSetup, GaussianPureState};
pub use reduction::{entropy_record, EntropyRecord};
pub use spectral::{CirculantMatrix, Positivity, TrigPolynomial};
pub use szego::{FourierSeries, GrowthFit};

pub use linalg::{CMatrix, RMatrix};
