//! Steady-state heat transport through two coupled qubits, each attached to
//! its own bosonic reservoir, with and without the environment-induced
//! (Lamb) shift of the transition frequencies.
//!
//! Units are natural (`ħ = k_B = 1`). Qubit and transition indices are
//! zero-based in the API: qubit `j ∈ {0, 1}`, transition `mu ∈ {0, 1}`.

pub mod config;
pub mod dynamics;
pub mod error;
pub mod lamb;
pub mod model;
pub mod presets;
pub mod quadrature;
pub mod spectral;
pub mod sweep;
pub mod transport;
pub mod validate;

pub use error::{Error, Result};
pub use model::{eigensystem, jump_operators, Eigensystem, JumpOperatorSet, SystemParams};
pub use spectral::{BathSpec, SpectralKind};

/// Sizes the global worker pool used by sweeps and presets. `0` leaves the
/// choice to rayon (one worker per core). Only the first call has an effect.
pub fn init_thread_pool(threads: usize) -> bool {
    rayon::ThreadPoolBuilder::new().num_threads(threads).build_global().is_ok()
}
