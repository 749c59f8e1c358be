//! Quantum Birkhoff normal form: resonance analysis, homological
//! equations, Lie transforms and extraction of the canonical coefficients.

mod canonical;
mod homological;
mod normalize;
mod resonance;

pub use canonical::{stage, CanonicalForm, CoeffKey, ResonantResidual};
pub use homological::{apply_lie_transform, homological_solve, resonant_projector};
pub use normalize::{
    diagonal_to_coeffs, frequencies_from_jet, max_stage_for_cap, normalize, replay_transforms,
    rotate_phases, NormalForm, NormalizeOptions,
};
pub use resonance::{
    integer_rank, relation_candidates, resonance_order, FrequencyVector, ResonanceSpec,
    DEFAULT_DETECTION_BOUND, DEFAULT_DETECTION_TOL,
};

#[cfg(test)]
mod tests;
