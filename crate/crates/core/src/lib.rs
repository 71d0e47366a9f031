//! Single-photon transport through three-level (Λ-type) emitters side-coupled
//! to a one-dimensional waveguide.
//!
//! The crate covers the single-emitter scattering amplitudes for a linear and
//! a cosine (tight-binding, quadratically truncated) waveguide dispersion, the
//! transfer-matrix treatment of periodic emitter chains, the Bloch band
//! structure of the infinite chain and the logarithmic law followed by the
//! band-gap difference between the two dispersions.
//!
//! All frequencies and rates are expressed in units of the emitter transition
//! frequency `ω₂` and the group velocity is `v_g = 1`, so the resonant
//! wavelength is `λ₀ = 2π`.

// `!(x > 0.0)` style guards also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bands;
pub mod chain;
pub mod config;
pub mod error;
pub mod features;
pub mod model;
pub mod oracle;
pub mod output;
pub mod par;
pub mod presets;
pub mod sweep;
pub mod validate;

pub use bands::{BandInterval, BandKind, BandPoint, GapFit, GapScanner};
pub use chain::{LatticeConfig, PhaseMode, TransferMatrix};
pub use config::RunConfig;
pub use error::{Error, Result};
pub use model::{CouplingConfig, DispersionModel, EmitterConfig, Model, ScatteringResult};
pub use oracle::OracleSolution;
