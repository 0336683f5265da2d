//! Per-subspace dynamics: matrices, spectral decomposition and the closed-form
//! bound and continuum amplitudes.

mod amplitudes;
mod spectral;
mod subspace;

pub use amplitudes::{
    closed_form_state, continuum_amplitudes, evolve_bound, ionization_moment_matrix,
    sylvester_kernel, sylvester_residual, AmplitudeMode, AmplitudeState, OutgoingWave,
    SylvesterTerms,
};
pub use spectral::{spectral_decompose, DecompositionResiduals, SpectralData};
pub use subspace::{build_subspace, SubspaceSystem};
