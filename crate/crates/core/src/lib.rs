//! Quantum Otto cycle of a two-level system coupled to bosonic reservoirs at
//! arbitrary strength, evaluated through the reaction-coordinate mapping.
//!
//! Layers, bottom up: [`linops`] (dense operators), [`model`] (Hamiltonians
//! and mapping parameters), [`thermo`] (Gibbs states), [`otto`] (the cycle
//! ledger) and [`sweep`] (config files, CSV output, sweeps).

pub mod error;
pub mod linops;
pub mod model;
pub mod otto;
pub mod sweep;
pub mod thermo;

pub use error::{Error, Result};
pub use model::{ReservoirSpec, RcMapping, TlsParams};
pub use otto::{
    CouplingModel, CycleConfig, CyclePointEnergies, CycleResult, DecouplingMode, OperatingMode,
    StrokeMode,
};
