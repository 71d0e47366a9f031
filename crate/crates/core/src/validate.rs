//! The numerical check table behind `wqed validate`.
//!
//! Each check compares two independent routes (closed form vs linear solve,
//! Chebyshev vs matrix power, dispersion relation vs half trace) or a closed
//! form against a known analytic value.

use std::fmt;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::bands::{self, GapScanner};
use crate::chain::{self, LatticeConfig, PhaseMode};
use crate::error::{Error, Result};
use crate::features::{self, plateaus};
use crate::model::{CouplingConfig, DispersionModel, EmitterConfig, Model};
use crate::oracle;
use crate::output::Emit;
use crate::par::{self, Execution};
use crate::presets::{self, PRESETS};
use crate::sweep;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Pass,
    /// Passed only under the documented weaker alternative.
    Fallback,
    Fail,
}

impl Status {
    pub fn is_ok(self) -> bool {
        self != Status::Fail
    }

    fn from_bool(ok: bool) -> Self {
        if ok {
            Status::Pass
        } else {
            Status::Fail
        }
    }
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Pass => "PASS",
            Status::Fallback => "PASS (fallback)",
            Status::Fail => "FAIL",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub id: u8,
    pub name: &'static str,
    pub status: Status,
    /// Largest observed error, where the check has one.
    pub max_error: Option<f64>,
    pub tolerance: Option<f64>,
    pub detail: String,
}

impl Check {
    fn measured(id: u8, name: &'static str, max_error: f64, tolerance: f64, detail: String) -> Self {
        Check { id, name, status: Status::from_bool(max_error < tolerance), max_error: Some(max_error), tolerance: Some(tolerance), detail }
    }

    fn failed(id: u8, name: &'static str, err: Error) -> Self {
        Check { id, name, status: Status::Fail, max_error: None, tolerance: None, detail: format!("error: {err}") }
    }
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{:>2}] {:<28} {:<16}", self.id, self.name, self.status.to_string())?;
        if let (Some(e), Some(t)) = (self.max_error, self.tolerance) {
            write!(f, " max err {e:.3e} (tol {t:.0e})")?;
        }
        write!(f, "  {}", self.detail)
    }
}

const GAMMA2: f64 = 0.1;

fn reference(gamma: f64, dispersion: DispersionModel) -> Model {
    Model { emitter: EmitterConfig::eit_reference(), coupling: CouplingConfig::symmetric(gamma), dispersion }
}

fn both_models() -> [DispersionModel; 2] {
    [DispersionModel::linear(), DispersionModel::nonlinear(2.5)]
}

fn band_lattice(spacing_lambda0: f64) -> Result<LatticeConfig> {
    LatticeConfig::in_wavelengths(1, spacing_lambda0, PhaseMode::FrequencyDependent, &EmitterConfig::eit_reference(), &CouplingConfig::symmetric(1.0))
}

fn guard(id: u8, name: &'static str, f: impl FnOnce() -> Result<Check>) -> Check {
    f().unwrap_or_else(|e| Check::failed(id, name, e))
}

pub fn eit_exactness() -> Check {
    const NAME: &str = "EIT exactness";
    guard(1, NAME, || {
        let mut worst = 0.0_f64;
        let dispersions = [DispersionModel::linear(), DispersionModel::nonlinear(0.5), DispersionModel::nonlinear(1.0), DispersionModel::nonlinear(2.5)];
        for d in dispersions {
            let s = reference(4.0 * GAMMA2, d).amplitudes(1.0)?;
            worst = worst.max((s.transmittance() - 1.0).abs()).max(s.reflectance());
        }
        Ok(Check::measured(1, NAME, worst, 1e-12, "T(ω₂)=1, R(ω₂)=0; linear and J ∈ {0.5, 1, 2.5}".into()))
    })
}

pub fn dip_depth() -> Check {
    const NAME: &str = "dip depth";
    guard(2, NAME, || {
        let mut worst = 0.0_f64;
        for gamma in [0.5 * GAMMA2, GAMMA2, 4.0 * GAMMA2] {
            let model = reference(gamma, DispersionModel::linear());
            let expected = (GAMMA2 / (GAMMA2 + gamma)).powi(2);
            for w in [0.9, 1.1] {
                let closed = model.amplitudes(w)?.transmittance();
                let direct = oracle::solve_single_emitter(w, &model)?.t.norm_sqr();
                worst = worst.max((closed - expected).abs()).max((direct - expected).abs());
            }
        }
        Ok(Check::measured(2, NAME, worst, 1e-10, "T(ω₂±Ω/2)=(γ₂/(γ₂+Γ))², closed form and linear solve".into()))
    })
}

pub fn lossless_unitarity(exec: Execution) -> Check {
    const NAME: &str = "lossless unitarity";
    guard(3, NAME, || {
        let mut worst = 0.0_f64;
        for d in both_models() {
            let model = reference(4.0 * GAMMA2, d).lossless();
            worst = worst.max(oracle::unitarity_scan(&model, 0.01, 3.0, 10_000, exec)?);
        }
        Ok(Check::measured(3, NAME, worst, 1e-12, "max |T+R−1| over 10⁴ points of (0.01, 3)".into()))
    })
}

pub fn oracle_equivalence(exec: Execution) -> Check {
    const NAME: &str = "oracle equivalence";
    guard(4, NAME, || {
        let linear = oracle::closed_form_agreement(1000, oracle::DEFAULT_SEED, false, exec)?;
        let nonlinear = oracle::closed_form_agreement(1000, oracle::DEFAULT_SEED, true, exec)?;
        Ok(Check::measured(4, NAME, linear.max(nonlinear), 1e-10, format!("1000 draws per model (linear {linear:.1e}, nonlinear {nonlinear:.1e})")))
    })
}

pub fn chebyshev_vs_power(exec: Execution) -> Check {
    const NAME: &str = "Chebyshev vs matrix power";
    guard(5, NAME, || {
        let mut worst = 0.0_f64;
        for d in both_models() {
            let model = reference(4.0 * GAMMA2, d).lossless();
            for spacing in [0.045, 0.5] {
                let lattice = band_lattice(spacing)?;
                worst = worst.max(oracle::chebyshev_vs_power_scan(&model, &lattice, 50, 0.05, 2.0, 2000, exec)?);
            }
        }
        Ok(Check::measured(5, NAME, worst, 1e-9, "N ≤ 50, 2000 frequencies, L ∈ {0.045, 0.5}λ₀".into()))
    })
}

pub fn chain_eit(exec: Execution) -> Check {
    const NAME: &str = "chain EIT persistence";
    guard(6, NAME, || {
        let names = ["fig3-N2", "fig3-N5", "fig3-N10"];
        let errs = par::try_map(exec, &names, |name| {
            let cfg = presets::preset(name).expect("registered preset");
            let model = cfg.model();
            let lattice = cfg.lattice_config(cfg.lattice.as_ref().expect("chain preset"))?;
            let (t, _) = chain::chain_spectrum(1.0, &model, &lattice)?;
            let lossless = chain::chain_transmission_chebyshev(1.0, &model.lossless(), &lattice)?.transmittance;
            Ok::<_, Error>((t - 1.0).abs().max((lossless - 1.0).abs()))
        })?;
        Ok(Check::measured(6, NAME, errs.into_iter().fold(0.0, f64::max), 1e-10, "T_N(ω₂)=1 for N ∈ {2, 5, 10}, lossy and lossless".into()))
    })
}

pub fn intersection_count(exec: Execution) -> Check {
    const NAME: &str = "T/R intersection count";
    guard(7, NAME, || {
        let c = features::transmission_reflection_crossings(&reference(4.0 * GAMMA2, DispersionModel::linear()), 0.5, 1.5, 10_000, exec)?;
        let list = c.iter().map(|w| format!("{w:.4}")).collect::<Vec<_>>().join(", ");
        Ok(Check {
            id: 7,
            name: NAME,
            status: Status::from_bool(c.len() == 4),
            max_error: None,
            tolerance: None,
            detail: format!("{} crossing(s) in (0.5, 1.5): {list}", c.len()),
        })
    })
}

pub fn plateau_detection(exec: Execution) -> Check {
    const NAME: &str = "plateau detection";
    guard(8, NAME, || {
        let opts = features::FeatureOptions::default();
        let find = |d| features::find_spectral_features_with(&reference(4.0 * GAMMA2, d), 0.3, 0.7, 4000, &opts, exec);
        let nonlinear = find(DispersionModel::nonlinear(2.5))?;
        let linear = find(DispersionModel::linear())?;
        let found = plateaus(&nonlinear).find_map(|p| p.extent);
        let ok = found.is_some() && plateaus(&linear).next().is_none();
        let detail = match found {
            Some((a, b)) => format!("J=2.5 plateau [{a:.4}, {b:.4}]; linear plateaus: {}", plateaus(&linear).count()),
            None => "no plateau for J=2.5".into(),
        };
        Ok(Check { id: 8, name: NAME, status: Status::from_bool(ok), max_error: None, tolerance: None, detail })
    })
}

/// Largest `|closed − half trace| / max(1, |half trace|)` over the grid.
pub fn bloch_identity_error(model: &Model, lattice: &LatticeConfig, lo: f64, hi: f64, n: usize, exec: Execution) -> Result<f64> {
    let points = bands::scan_bands(model, lattice, lo, hi, n, exec)?;
    let errs = par::try_map(exec, &points, |p| {
        let s = model.amplitudes(p.omega)?;
        let phase = lattice.phase(p.omega, &model.emitter, &model.coupling);
        let trace = bands::bloch_cos_from_t(s.t(), phase)?;
        Ok::<_, Error>((p.cos_kl - trace).abs() / trace.abs().max(1.0))
    })?;
    Ok(errs.into_iter().fold(0.0, f64::max))
}

pub fn bloch_trace_identity(exec: Execution) -> Check {
    const NAME: &str = "Bloch trace identity";
    guard(9, NAME, || {
        let lattice = band_lattice(0.045)?;
        let mut parts = Vec::new();
        let mut worst = 0.0_f64;
        for d in both_models() {
            let e = bloch_identity_error(&reference(4.0 * GAMMA2, d).lossless(), &lattice, 0.5, 2.0, 5000, exec)?;
            parts.push(format!("{} {e:.2e}", d.label()));
            worst = worst.max(e);
        }
        Ok(Check::measured(9, NAME, worst, 1e-10, format!("5000 frequencies, L=0.045λ₀ ({})", parts.join(", "))))
    })
}

pub fn gap_narrowing(exec: Execution) -> Check {
    const NAME: &str = "gap narrowing";
    guard(10, NAME, || {
        let lattice = band_lattice(0.045)?;
        let lin = bands::gap_above_resonance(&reference(4.0 * GAMMA2, DispersionModel::linear()).lossless(), &lattice, exec)?;
        let nl = bands::gap_above_resonance(&reference(4.0 * GAMMA2, DispersionModel::nonlinear(2.5)).lossless(), &lattice, exec)?;
        let ratio = nl.width() / lin.width();
        Ok(Check {
            id: 10,
            name: NAME,
            status: Status::from_bool((0.35..=0.65).contains(&ratio)),
            max_error: None,
            tolerance: None,
            detail: format!(
                "width ratio {ratio:.4} in [0.35, 0.65]; linear [{:.4}, {:.4}], J=2.5 [{:.4}, {:.4}]",
                lin.start, lin.end, nl.start, nl.end
            ),
        })
    })
}

/// Reference gap-law constants.
pub const GAP_LAW_B: f64 = 16.751;
pub const GAP_LAW_XI: f64 = -0.047;
pub const GAP_LAW_CROSSING: f64 = 1.141;

/// Fits exact synthetic log-law data on `js` and returns the worst relative
/// recovery error of `(b, ξ)`.
pub fn synthetic_fit_recovery(js: &[f64], seed: u64) -> Result<f64> {
    use rand::Rng;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = 0.0_f64;
    for _ in 0..20 {
        let b: f64 = rng.random_range(2.0..100.0);
        let xi: f64 = rng.random_range(-0.5..0.5);
        let samples: Vec<(f64, f64)> = js.iter().map(|&j| (j, j.ln() / b.ln() + xi)).collect();
        let fit = bands::fit_gap_law(&samples)?;
        worst = worst.max(((fit.base_b - b) / b).abs()).max((fit.xi - xi).abs() / xi.abs().max(1.0));
    }
    Ok(worst)
}

pub fn gap_law_fit(exec: Execution) -> Check {
    const NAME: &str = "gap-law fit";
    guard(11, NAME, || {
        let emitter = EmitterConfig::eit_reference().lossless();
        let coupling = CouplingConfig::symmetric(4.0 * GAMMA2);
        let scanner = GapScanner::new(emitter, coupling, band_lattice(0.045)?)?;
        let js = bands::default_j_grid();
        let fit = bands::fit_gap_law(&scanner.samples(&js, exec)?)?;
        let crossing = scanner.crossing(1.0, 2.5, 1e-6)?;

        let b_ok = ((fit.base_b - GAP_LAW_B) / GAP_LAW_B).abs() <= 0.10;
        let xi_ok = (fit.xi - GAP_LAW_XI).abs() <= 0.01;
        let crossing_err = (crossing - GAP_LAW_CROSSING).abs();
        let summary = format!("b={:.3} ξ={:.4} crossing J={crossing:.4}", fit.base_b, fit.xi);
        if b_ok && xi_ok && crossing_err <= 0.05 {
            return Ok(Check { id: 11, name: NAME, status: Status::Pass, max_error: None, tolerance: None, detail: summary });
        }

        let recovery = synthetic_fit_recovery(&js, oracle::DEFAULT_SEED)?;
        let fallback_ok = fit.slope() > 0.0 && crossing_err <= 0.1 && recovery < 1e-6;
        let status = if fallback_ok { Status::Fallback } else { Status::Fail };
        Ok(Check {
            id: 11,
            name: NAME,
            status,
            max_error: None,
            tolerance: None,
            detail: format!(
                "{summary}; b/ξ outside 10%/±0.01 of {GAP_LAW_B}/{GAP_LAW_XI} on the default J grid, \
                 fallback: increasing fit {}, |crossing−{GAP_LAW_CROSSING}|={crossing_err:.3} ≤ 0.1, synthetic recovery {recovery:.1e} < 1e-6",
                fit.slope() > 0.0
            ),
        })
    })
}

/// CSV bytes of a preset run.
pub fn preset_csv(name: &str, exec: Execution) -> Result<Vec<u8>> {
    let cfg = presets::preset(name).ok_or_else(|| Error::validation("preset", format!("unknown preset `{name}`")))?;
    let mut out = Vec::new();
    if cfg.gapfit.is_some() {
        sweep::run_gapfit(&cfg, exec)?.write_csv(&mut out)?;
    } else if cfg.bands.is_some() {
        sweep::run_bands(&cfg, exec)?.write_csv(&mut out)?;
    } else {
        sweep::run_spectrum(&cfg, exec)?.write_csv(&mut out)?;
    }
    Ok(out)
}

pub fn determinism(exec: Execution) -> Check {
    const NAME: &str = "determinism";
    guard(12, NAME, || {
        let mut differing = Vec::new();
        for (name, _) in PRESETS {
            let a = preset_csv(name, exec)?;
            let b = preset_csv(name, exec)?;
            if a != b {
                differing.push(*name);
            }
        }
        let detail = if differing.is_empty() {
            format!("{} presets byte-identical across two runs", PRESETS.len())
        } else {
            format!("differing: {}", differing.join(", "))
        };
        Ok(Check { id: 12, name: NAME, status: Status::from_bool(differing.is_empty()), max_error: None, tolerance: None, detail })
    })
}

pub fn run_all(exec: Execution) -> Vec<Check> {
    vec![
        eit_exactness(),
        dip_depth(),
        lossless_unitarity(exec),
        oracle_equivalence(exec),
        chebyshev_vs_power(exec),
        chain_eit(exec),
        intersection_count(exec),
        plateau_detection(exec),
        bloch_trace_identity(exec),
        gap_narrowing(exec),
        gap_law_fit(exec),
        determinism(exec),
    ]
}
