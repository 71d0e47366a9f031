//! Run configuration: a single JSON document.
//!
//! ```json
//! {
//!   "units": "omega2",
//!   "emitter": { "omega2": 1.0, "delta": 0.0, "gamma2": 0.1, "gamma3": 0.0, "omega_rabi": 0.2 },
//!   "coupling": { "gamma_l": 0.4, "gamma_r": 0.4, "v_g": 1.0 },
//!   "dispersion": { "kind": "nonlinear", "j": 2.5 },
//!   "lattice": { "n_emitters": 10, "spacing_lambda0": 0.5, "phase_mode": "frequency_dependent" },
//!   "sweep": { "omega_min": 0.05, "omega_max": 2.0, "n_points": 3901 },
//!   "outputs": { "format": "csv", "path": null },
//!   "derivative": false
//! }
//! ```
//!
//! With `"units": "omega2"` (the default) every frequency and rate is in
//! units of ω₂ and `emitter.omega2` must be 1. `"absolute"` lifts that
//! restriction. Unknown keys are rejected.

use serde::{Deserialize, Serialize};

use crate::chain::{LatticeConfig, PhaseMode};
use crate::error::{Error, Result};
use crate::model::{DispersionModel, Model};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Units {
    #[default]
    Omega2,
    Absolute,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LatticeSpec {
    pub n_emitters: u32,
    /// Emitter spacing in units of λ₀ = 2πv_g/ω₂.
    pub spacing_lambda0: f64,
    #[serde(default)]
    pub phase_mode: PhaseMode,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    pub omega_min: f64,
    pub omega_max: f64,
    pub n_points: usize,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    #[serde(default)]
    pub format: Format,
    #[serde(default)]
    pub path: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BandsSpec {
    /// Spacings (units of λ₀) emitted side by side in one band table.
    pub spacings_lambda0: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GapFitSpec {
    pub spacing_lambda0: f64,
    pub j_min: f64,
    pub j_max: f64,
    /// Number of log-spaced J samples.
    pub n_j: usize,
    /// Bracket searched for the sign change of Δω_B.
    #[serde(default = "default_crossing_bracket")]
    pub crossing_bracket: [f64; 2],
}

fn default_crossing_bracket() -> [f64; 2] {
    [1.0, 2.5]
}

impl Default for GapFitSpec {
    fn default() -> Self {
        GapFitSpec { spacing_lambda0: 0.045, j_min: 1.2, j_max: 5.0, n_j: 20, crossing_bracket: default_crossing_bracket() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default)]
    pub units: Units,
    pub emitter: crate::model::EmitterConfig,
    pub coupling: crate::model::CouplingConfig,
    pub dispersion: DispersionModel,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lattice: Option<LatticeSpec>,
    pub sweep: SweepSpec,
    #[serde(default)]
    pub outputs: OutputSpec,
    /// Adds a `dT_domega` column to single-emitter spectra.
    #[serde(default)]
    pub derivative: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bands: Option<BandsSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gapfit: Option<GapFitSpec>,
}

/// Parses and validates a JSON config document.
pub fn parse_config(text: &str) -> Result<RunConfig> {
    let de = &mut serde_json::Deserializer::from_str(text);
    let cfg: RunConfig = serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        Error::Parse(if path == "." { e.inner().to_string() } else { format!("at `{path}`: {}", e.inner()) })
    })?;
    cfg.validate()?;
    Ok(cfg)
}

fn prefixed(prefix: &'static str, e: Error) -> Error {
    match e {
        Error::InvalidParameter { name, reason } => Error::validation(format!("{prefix}.{name}"), reason),
        Error::InvalidHopping(j) => Error::validation(format!("{prefix}.j"), format!("must be positive, got {j}")),
        other => other,
    }
}

fn finite(path: &str, v: f64) -> Result<()> {
    if v.is_finite() {
        Ok(())
    } else {
        Err(Error::validation(path, "must be finite"))
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        self.emitter.validate().map_err(|e| prefixed("emitter", e))?;
        self.coupling.validate().map_err(|e| prefixed("coupling", e))?;
        self.dispersion.validate().map_err(|e| prefixed("dispersion", e))?;
        if self.units == Units::Omega2 && self.emitter.omega2 != 1.0 {
            return Err(Error::validation("emitter.omega2", "must be 1 when units = \"omega2\""));
        }
        match self.dispersion {
            DispersionModel::Linear { v_g } if v_g != self.coupling.v_g => {
                return Err(Error::validation("dispersion.v_g", "must equal coupling.v_g"));
            }
            DispersionModel::Nonlinear { .. } if self.coupling.v_g != 1.0 => {
                return Err(Error::validation("coupling.v_g", "the nonlinear amplitudes are dimensionless; v_g must be 1"));
            }
            _ => {}
        }

        let s = &self.sweep;
        finite("sweep.omega_min", s.omega_min)?;
        finite("sweep.omega_max", s.omega_max)?;
        if s.omega_min >= s.omega_max {
            return Err(Error::validation("sweep.omega_min", "must be smaller than sweep.omega_max"));
        }
        if s.n_points < 2 {
            return Err(Error::validation("sweep.n_points", "need at least 2 points"));
        }
        if matches!(self.dispersion, DispersionModel::Nonlinear { .. }) && s.omega_min <= 0.0 {
            return Err(Error::validation("sweep.omega_min", "nonlinear model requires omega > 0"));
        }

        if let Some(l) = &self.lattice {
            if l.n_emitters < 1 {
                return Err(Error::validation("lattice.n_emitters", "need at least one emitter"));
            }
            if !(l.spacing_lambda0.is_finite() && l.spacing_lambda0 > 0.0) {
                return Err(Error::validation("lattice.spacing_lambda0", "must be positive"));
            }
        }
        if let Some(b) = &self.bands {
            if b.spacings_lambda0.is_empty() {
                return Err(Error::validation("bands.spacings_lambda0", "need at least one spacing"));
            }
            for (k, &a) in b.spacings_lambda0.iter().enumerate() {
                if !(a.is_finite() && a > 0.0) {
                    return Err(Error::validation(format!("bands.spacings_lambda0[{k}]"), "must be positive"));
                }
            }
        }
        if let Some(g) = &self.gapfit {
            if !(g.spacing_lambda0.is_finite() && g.spacing_lambda0 > 0.0) {
                return Err(Error::validation("gapfit.spacing_lambda0", "must be positive"));
            }
            if !(g.j_min.is_finite() && g.j_min > 0.0) {
                return Err(Error::validation("gapfit.j_min", "must be positive"));
            }
            if !(g.j_max.is_finite() && g.j_max >= g.j_min) {
                return Err(Error::validation("gapfit.j_max", "must be at least gapfit.j_min"));
            }
            if g.n_j < 1 {
                return Err(Error::validation("gapfit.n_j", "need at least one sample"));
            }
            let [lo, hi] = g.crossing_bracket;
            if !(lo.is_finite() && hi.is_finite() && lo > 0.0 && lo < hi) {
                return Err(Error::validation("gapfit.crossing_bracket", "need 0 < lo < hi"));
            }
        }
        Ok(())
    }

    pub fn model(&self) -> Model {
        Model { emitter: self.emitter, coupling: self.coupling, dispersion: self.dispersion }
    }

    pub fn lattice_config(&self, spec: &LatticeSpec) -> Result<LatticeConfig> {
        LatticeConfig::in_wavelengths(spec.n_emitters, spec.spacing_lambda0, spec.phase_mode, &self.emitter, &self.coupling)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("RunConfig serializes")
    }

    /// Sets γ₂ = γ₃ = 0.
    pub fn make_lossless(&mut self) {
        self.emitter = self.emitter.lossless();
    }

    pub fn set_phase_mode(&mut self, mode: PhaseMode) {
        if let Some(l) = self.lattice.as_mut() {
            l.phase_mode = mode;
        }
    }

    /// Swaps the dispersion, keeping the linear group velocity tied to the coupling.
    pub fn set_dispersion(&mut self, dispersion: DispersionModel) {
        self.dispersion = match dispersion {
            DispersionModel::Linear { .. } => DispersionModel::Linear { v_g: self.coupling.v_g },
            d => d,
        };
    }
}
