//! Long-time photoelectron spectra and atom-atom entanglement for an
//! auto-ionizing atom coupled to a two-level atom through one quantized mode.

pub mod dynamics;
pub mod entanglement;
pub mod error;
pub mod field;
pub mod grid;
pub mod observables;
pub mod oracle;
pub mod params;
pub mod scalar;

pub use error::{Error, Result};
pub use field::PumpState;
pub use grid::EnergyGrid;
pub use observables::PairingMode;
pub use params::{Couplings, Energies, Model, Preset, ReducedParams};
pub use nalgebra::Complex;
pub use scalar::{CMatrix, CVector, Real};

/// Double-precision instantiations, the precision used by the CLI.
pub mod f64 {
    pub type Model = crate::params::Model<f64>;
    pub type Couplings = crate::params::Couplings<f64>;
    pub type Energies = crate::params::Energies<f64>;
    pub type ReducedParams = crate::params::ReducedParams<f64>;
    pub type EnergyGrid = crate::grid::EnergyGrid<f64>;
    pub type SubspaceSystem = crate::dynamics::SubspaceSystem<f64>;
    pub type SpectralData = crate::dynamics::SpectralData<f64>;
    pub type AmplitudeState = crate::dynamics::AmplitudeState<f64>;
    pub type OutgoingField = crate::observables::OutgoingField<f64>;
    pub type SpectrumSet = crate::observables::SpectrumSet<f64>;
    pub type JointMatrix = crate::observables::JointMatrix<f64>;
    pub type TwoQubitState = crate::entanglement::TwoQubitState<f64>;
    pub type NegativityMap = crate::entanglement::NegativityMap<f64>;
}
