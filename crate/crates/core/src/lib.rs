//! Quantum Birkhoff canonical forms of Hamiltonians at a nondegenerate
//! minimum, their "bottom of the well" spectra and wave traces, and the
//! inverse problem of reading the canonical form back off the eigenvalues.
//!
//! The crate is organised bottom-up:
//!
//! * [`symbol`] – graded phase-space polynomials with the Moyal star product.
//! * [`normal_form`] – resonance analysis and Birkhoff normalisation.
//! * [`spectral`] – forward models: lattice spectra, resonant blocks, an
//!   independent Hermite-basis diagonaliser, truncated traces.
//! * [`inverse`] – recovery of frequencies, stage polynomials and the
//!   canonical-form coefficients from spectra.
//! * [`io`] – JSON and CSV schemas.
//! * [`cli`] – the command driver behind the `bottomwell` binary.

pub mod cli;
pub mod error;
pub mod inverse;
pub mod io;
pub mod linalg;
pub mod normal_form;
pub mod spectral;
pub mod symbol;

pub use error::{Error, Result};

pub use symbol::{Basis, GradedPolynomial, Monomial, MultiIndex, PhasePoint, Poly};
pub use normal_form::{
    normalize, resonance_order, CanonicalForm, FrequencyVector, NormalizeOptions, ResonanceSpec,
    ResonantResidual,
};
