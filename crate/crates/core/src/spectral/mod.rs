//! Forward models: spectra of canonical forms, an independent Fock-basis
//! diagonaliser, truncated wave traces and the Weyl-law check.
//!
//! Traces use `e^{+itE/ħ}` with `Im t > 0`, the sign under which every sum
//! converges absolutely and the lattice sums match the generating function
//! `e^{itΣθ_j/2} / Π(1 − e^{itθ_j})`.

mod forward;
mod hermite;
mod lattice;
mod sample;
mod trace;
mod weyl;

pub use forward::{bnf_eigenvalues, cluster_block, resonant_eigenvalues};
pub use hermite::{fock_eigenvalues, fock_matrix, hermite_validate, HermiteOptions, MAX_DIM};
pub use lattice::{cluster_partition, group_points, injectivity_violation, lattice_points, nu, points_below, Cluster};
pub use sample::{Label, Source, SpectrumEntry, SpectrumSample, MERGE_TOL};
pub use trace::{truncated_trace, zelditch_expansion, zelditch_term, Bump, TraceProbe, TraceValue, ZELDITCH_CAP};
pub use weyl::{count_levels, weyl_count_check, WeylCount, WeylOptions};
