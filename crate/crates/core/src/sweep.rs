//! Frequency and hopping-rate sweeps driven by a [`RunConfig`].

use serde::Serialize;

use crate::bands::{self, BandInterval, BandKind, GapFit, GapScanner};
use crate::chain::{self, LatticeConfig};
use crate::config::{GapFitSpec, RunConfig};
use crate::error::{Error, Result};
use crate::model::{self, DispersionModel, Model, DEFAULT_DERIVATIVE_STEP};
use crate::par::{self, Execution};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SpectrumRow {
    pub omega: f64,
    #[serde(rename = "T")]
    pub t: f64,
    #[serde(rename = "R")]
    pub r: f64,
    #[serde(rename = "dT_domega", skip_serializing_if = "Option::is_none")]
    pub dt_domega: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    SingleEmitter,
    MatrixPower,
    Chebyshev,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpectrumRun {
    pub dispersion: DispersionModel,
    pub n_emitters: u32,
    pub method: Method,
    pub notices: Vec<String>,
    pub rows: Vec<SpectrumRow>,
}

fn grid(cfg: &RunConfig) -> Vec<f64> {
    par::linspace(cfg.sweep.omega_min, cfg.sweep.omega_max, cfg.sweep.n_points)
}

/// Single emitter when the config has no lattice, chain otherwise.
pub fn run_spectrum(cfg: &RunConfig, exec: Execution) -> Result<SpectrumRun> {
    match &cfg.lattice {
        None => run_single(cfg, exec),
        Some(_) => run_chain(cfg, exec),
    }
}

/// Single-emitter spectrum; any lattice in the config is ignored.
pub fn run_single(cfg: &RunConfig, exec: Execution) -> Result<SpectrumRun> {
    let model = cfg.model();
    model.validate()?;
    let rows = par::try_map(exec, &grid(cfg), |&w| {
        let s = model.amplitudes(w).map_err(|e| e.at(w))?;
        let dt_domega = if cfg.derivative {
            Some(model::transmission_derivative(&model, w, DEFAULT_DERIVATIVE_STEP).map_err(|e| e.at(w))?)
        } else {
            None
        };
        Ok::<_, Error>(SpectrumRow { omega: w, t: s.transmittance(), r: s.reflectance(), dt_domega })
    })?;
    Ok(SpectrumRun { dispersion: model.dispersion, n_emitters: 1, method: Method::SingleEmitter, notices: Vec::new(), rows })
}

/// Chain spectrum. Lossy emitters use the composed matrix power; lossless
/// ones use the Chebyshev closed form with `R = 1 − T`.
pub fn run_chain(cfg: &RunConfig, exec: Execution) -> Result<SpectrumRun> {
    let spec = cfg
        .lattice
        .as_ref()
        .ok_or_else(|| Error::validation("lattice", "chain runs need a lattice section"))?;
    let model = cfg.model();
    model.validate()?;
    let lattice = cfg.lattice_config(spec)?;
    let lossless = model.emitter.is_lossless();
    let mut notices = Vec::new();
    if cfg.derivative {
        notices.push("dT_domega is only produced for single-emitter runs".to_string());
    }
    let method = if lossless {
        Method::Chebyshev
    } else {
        notices.push("lossy emitters: chain spectrum from the composed transfer matrix".to_string());
        Method::MatrixPower
    };

    let rows = par::try_map(exec, &grid(cfg), |&w| {
        let (t, r) = chain_point(w, &model, &lattice, lossless).map_err(|e| e.at(w))?;
        Ok::<_, Error>(SpectrumRow { omega: w, t, r, dt_domega: None })
    })?;
    Ok(SpectrumRun { dispersion: model.dispersion, n_emitters: lattice.n_emitters, method, notices, rows })
}

fn chain_point(w: f64, model: &Model, lattice: &LatticeConfig, lossless: bool) -> Result<(f64, f64)> {
    if lossless {
        match chain::chain_transmission_chebyshev(w, model, lattice) {
            Ok(c) => Ok((c.transmittance, 1.0 - c.transmittance)),
            // A perfectly reflecting emitter blocks the whole chain.
            Err(Error::ZeroTransmission) => Ok((0.0, 1.0)),
            Err(e) => Err(e),
        }
    } else {
        chain::chain_spectrum(w, model, lattice)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BandRow {
    pub omega: f64,
    /// Single-emitter transmittance and reflectance.
    #[serde(rename = "T")]
    pub t: f64,
    #[serde(rename = "R")]
    pub r: f64,
    #[serde(rename = "cos_KL")]
    pub cos_kl: f64,
    pub forbidden: bool,
    /// Lattice spacing in units of λ₀.
    pub spacing: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GapReport {
    pub spacing: f64,
    pub dispersion: DispersionModel,
    pub intervals: Vec<BandInterval>,
    /// First forbidden band reaching above ω₂.
    pub gap: Option<BandInterval>,
    /// The same gap for the linear dispersion at this spacing.
    pub linear_gap: Option<BandInterval>,
    /// `gap.width / linear_gap.width`.
    pub width_ratio: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BandRun {
    pub notices: Vec<String>,
    pub gaps: Vec<GapReport>,
    pub rows: Vec<BandRow>,
}

fn band_spacings(cfg: &RunConfig) -> Result<Vec<f64>> {
    if let Some(b) = &cfg.bands {
        return Ok(b.spacings_lambda0.clone());
    }
    match &cfg.lattice {
        Some(l) => Ok(vec![l.spacing_lambda0]),
        None => Err(Error::validation("bands", "band runs need a bands or lattice section")),
    }
}

fn find_gap(model: &Model, lattice: &LatticeConfig, exec: Execution, notices: &mut Vec<String>) -> Result<Option<BandInterval>> {
    match bands::gap_above_resonance(model, lattice, exec) {
        Ok(g) => Ok(Some(g)),
        Err(e @ Error::NoGapFound { .. }) => {
            notices.push(format!("{}, spacing {:.6}: {e}", model.dispersion.label(), lattice.spacing));
            Ok(None)
        }
        Err(e) => Err(e),
    }
}

/// Band table over the sweep grid plus the classified intervals and the gap
/// above ω₂, for every requested spacing.
pub fn run_bands(cfg: &RunConfig, exec: Execution) -> Result<BandRun> {
    let model = cfg.model();
    model.validate()?;
    if !model.emitter.is_lossless() {
        return Err(Error::validation("emitter", "band structure needs gamma2 = gamma3 = 0 (try --lossless)"));
    }
    if !model.coupling.is_symmetric() {
        return Err(Error::validation("coupling", "band structure needs gamma_l = gamma_r"));
    }
    let linear = model.with_dispersion(DispersionModel::Linear { v_g: model.coupling.v_g });
    let (lo, hi) = (cfg.sweep.omega_min, cfg.sweep.omega_max);
    let mut notices = Vec::new();
    let mut rows = Vec::new();
    let mut gaps = Vec::new();

    for spacing in band_spacings(cfg)? {
        let lattice = LatticeConfig::in_wavelengths(1, spacing, cfg.lattice.as_ref().map(|l| l.phase_mode).unwrap_or_default(), &cfg.emitter, &cfg.coupling)?;
        let points = bands::scan_bands(&model, &lattice, lo, hi, cfg.sweep.n_points, exec)?;
        let table = par::try_map(exec, &points, |p| {
            let s = model.amplitudes(p.omega).map_err(|e| e.at(p.omega))?;
            Ok::<_, Error>(BandRow {
                omega: p.omega,
                t: s.transmittance(),
                r: s.reflectance(),
                cos_kl: p.cos_kl,
                forbidden: p.forbidden,
                spacing,
            })
        })?;
        rows.extend(table);

        let intervals = bands::band_intervals(&model, &lattice, lo, hi, exec)?;
        let gap = find_gap(&model, &lattice, exec, &mut notices)?;
        let linear_gap = if model.dispersion == linear.dispersion {
            gap
        } else {
            find_gap(&linear, &lattice, exec, &mut notices)?
        };
        let width_ratio = match (gap, linear_gap) {
            (Some(g), Some(l)) if l.width() > 0.0 => Some(g.width() / l.width()),
            _ => None,
        };
        if !intervals.iter().any(|b| b.kind == BandKind::Forbidden) {
            notices.push(format!("no forbidden band in [{lo}, {hi}] at spacing {spacing}"));
        }
        gaps.push(GapReport { spacing, dispersion: model.dispersion, intervals, gap, linear_gap, width_ratio });
    }
    Ok(BandRun { notices, gaps, rows })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GapFitReport {
    pub spacing: f64,
    /// Upper edge of the linear gap above ω₂.
    pub linear_edge: f64,
    pub fit: GapFit,
    /// Root of Δω_B(J) inside the configured bracket.
    pub crossing: Option<f64>,
    pub notices: Vec<String>,
}

/// Bisection tolerance of the Δω_B sign change.
pub const CROSSING_TOLERANCE: f64 = 1e-6;

/// Δω_B over the configured J grid and its logarithmic fit.
pub fn run_gapfit(cfg: &RunConfig, exec: Execution) -> Result<GapFitReport> {
    let spec = cfg.gapfit.clone().unwrap_or_default();
    let emitter = cfg.emitter.lossless();
    if !cfg.emitter.is_lossless() {
        return Err(Error::validation("emitter", "gap fit needs gamma2 = gamma3 = 0 (try --lossless)"));
    }
    let lattice = LatticeConfig::in_wavelengths(1, spec.spacing_lambda0, cfg.lattice.as_ref().map(|l| l.phase_mode).unwrap_or_default(), &emitter, &cfg.coupling)?;
    let scanner = GapScanner::new(emitter, cfg.coupling, lattice)?;
    let samples = scanner.samples(&j_grid(&spec), exec)?;
    let fit = bands::fit_gap_law(&samples)?;

    let mut notices = Vec::new();
    let [a, b] = spec.crossing_bracket;
    let crossing = match scanner.crossing(a, b, CROSSING_TOLERANCE) {
        Ok(j) => Some(j),
        Err(e) if e.is_config() => {
            notices.push(e.to_string());
            None
        }
        Err(e) => return Err(e),
    };
    Ok(GapFitReport { spacing: spec.spacing_lambda0, linear_edge: scanner.linear_edge(), fit, crossing, notices })
}

pub fn j_grid(spec: &GapFitSpec) -> Vec<f64> {
    par::geomspace(spec.j_min, spec.j_max, spec.n_j)
}
