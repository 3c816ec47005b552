//! Single-photon transport through a coupled transmission-line-resonator
//! array whose one tunable hopping bond is set by a flux-biased Cooper pair
//! box coupler.
//!
//! * [`lattice`]: defect tight-binding chain and its dispersion.
//! * [`scattering`]: closed-form reflection and transmission at the defect.
//! * [`dynamics`]: exact single-excitation propagation, the wavepacket
//!   transmission oracle, and the adiabatic-elimination check.
//! * [`circuit`]: device parameters and flux to effective coupling.
//! * [`sweep`]: parameter sweeps and table output behind the CLI.

pub mod circuit;
pub mod dynamics;
pub mod lattice;
pub mod scattering;
pub mod sweep;

pub use circuit::{CircuitParams, CouplerDerived, UnitSystem};
pub use dynamics::{PropagationResult, WavepacketSpec};
pub use lattice::{LatticeSpec, SingleExcitationState};
pub use scattering::ScatteringSolution;
