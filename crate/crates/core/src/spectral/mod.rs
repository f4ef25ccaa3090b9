//! Periodic-box field representations and spectral operators.

mod checkpoint;
mod fft;
mod field;
mod grid;
mod ops;

pub use checkpoint::{read_field, write_field, FIELD_MAGIC, FIELD_VERSION};
pub use fft::{forward, inverse};
pub use field::{sym_index, sym_to_matrix, Layout, RealField, SpectralField};
pub use grid::GridSpec;
pub use ops::{
    add_trig_term, curl, dealias, dealias_in_place, derivative, divergence, gradient,
    inverse_laplacian, leray_project, leray_project_in_place, retained, Trig, TrigTerm,
    SOLVABILITY_TOL,
};
