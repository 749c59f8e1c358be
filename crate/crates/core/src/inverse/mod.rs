//! Recovery of the canonical form from spectra: frequencies, lattice
//! labels, ħ-series fits, lattice interpolation and assembly.

mod assemble;
mod frequencies;
mod interpolate;
mod labeling;
mod recover;
mod series;
mod sieve;

pub use assemble::{assemble_canonical_form, AssembleOptions, Diagnostics, RecoverableCaps, RecoveredForm};
pub use frequencies::{frequencies_from_gaps, neville_at_zero, recover_frequencies, FrequencyEstimate, FrequencyOptions};
pub use interpolate::{interpolate_polynomial, Interpolation, LatticePolynomial};
pub use labeling::{label_lattice, LabeledGroup, LabeledSample, MATCHING_TOL};
pub use recover::{recover, RecoverOptions};
pub use series::{fit_hbar_series, geometric_grid, SeriesFit};
pub use sieve::{sieve_clusters, sieve_forward, sieve_values, SieveData, SieveSolution};
