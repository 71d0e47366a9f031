//! Bloch band structure of the infinite chain and the band-gap law.
//!
//! For a lossless cell the Bloch vector obeys `cos(KL) = ½ tr M_B =
//! Re[e^{−iqL}/t]`. With real detunings `δⱼ = ω − ωⱼ` the two dispersions give
//!
//! ```text
//! linear:     cos(KL) = cos(qL) + sin(qL) · Γδ₃ / (2Λ²),   Λ² = δ₂δ₃ − Ω²/4
//! nonlinear:  cos(KL) = cos(qL) + sin(qL) · Γδ₃ / (Λ̄³J),   Λ̄³ = ω(δ₂δ₃ − Ω²/4)
//! ```
//!
//! The nonlinear relation is kept in this form. It is not the trace of the
//! nonlinear `t`, whose correction term is `Γδ₃/(2JΛ̄³)`; see
//! [`bloch_cos_from_t`] for that route.

use num_complex::Complex64;
use serde::Serialize;

use crate::chain::{LatticeConfig, TRANSMISSION_FLOOR};
use crate::error::{Error, Result};
use crate::model::{CouplingConfig, DispersionModel, EmitterConfig, Model};
use crate::par::{self, Execution};

/// Below this modulus `Λ²` (or `Λ̄³`) is a pole.
pub const POLE_FLOOR: f64 = 1e-30;

/// Scan points closer than this to a polariton pole are skipped.
pub const POLE_EXCLUSION: f64 = 1e-6;

/// Band scans use this many points per unit of ω₂.
pub const SCAN_DENSITY: f64 = 1e4;

const MIN_RUN: usize = 3;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BandPoint {
    pub omega: f64,
    pub cos_kl: f64,
    /// Bloch vector in `[0, π/L]` inside an allowed band.
    pub k_real: Option<f64>,
    /// Decay constant `arccosh|cos KL| / L` inside a forbidden band.
    pub kappa: Option<f64>,
    pub forbidden: bool,
}

impl BandPoint {
    pub fn new(omega: f64, cos_kl: f64, spacing: f64) -> Self {
        let forbidden = cos_kl.abs() > 1.0;
        let (k_real, kappa) = if forbidden {
            (None, Some(cos_kl.abs().acosh() / spacing))
        } else {
            (Some(cos_kl.acos() / spacing), None)
        };
        BandPoint { omega, cos_kl, k_real, kappa, forbidden }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BandKind {
    Allowed,
    Forbidden,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BandInterval {
    pub kind: BandKind,
    pub start: f64,
    pub end: f64,
}

impl BandInterval {
    pub fn width(&self) -> f64 {
        self.end - self.start
    }
}

fn require_lossless_symmetric(model: &Model) -> Result<()> {
    if !model.emitter.is_lossless() {
        return Err(Error::invalid("gamma2/gamma3", "Bloch dispersion relations require a lossless emitter"));
    }
    if !model.coupling.is_symmetric() {
        return Err(Error::invalid("gamma_l/gamma_r", "Bloch dispersion relations require symmetric coupling"));
    }
    Ok(())
}

/// `cos(KL)` from the closed dispersion relations.
pub fn bloch_cos_closed(omega: f64, model: &Model, lattice: &LatticeConfig) -> Result<f64> {
    require_lossless_symmetric(model)?;
    let e = &model.emitter;
    let gamma = model.coupling.gamma_l;
    let d2 = omega - e.omega2;
    let d3 = omega - e.omega3();
    let lambda_sq = d2 * d3 - 0.25 * e.omega_rabi * e.omega_rabi;
    let correction = match model.dispersion {
        DispersionModel::Linear { .. } => {
            if lambda_sq.abs() < POLE_FLOOR {
                return Err(Error::PoleAtBandEdge { omega });
            }
            gamma * d3 / (2.0 * lambda_sq)
        }
        DispersionModel::Nonlinear { j } => {
            let lambda_cube = omega * lambda_sq;
            if lambda_cube.abs() < POLE_FLOOR {
                return Err(Error::PoleAtBandEdge { omega });
            }
            gamma * d3 / (lambda_cube * j)
        }
    };
    let phase = lattice.phase(omega, e, &model.coupling);
    Ok(phase.cos() + phase.sin() * correction)
}

/// `Re[e^{−iqL}/t]`, half the trace of a lossless cell matrix.
pub fn bloch_cos_from_t(t: Complex64, phase: f64) -> Result<f64> {
    if t.norm() < TRANSMISSION_FLOOR {
        return Err(Error::ZeroTransmission);
    }
    Ok((Complex64::from_polar(1.0, -phase) / t).re)
}

/// Real frequencies where `δ₂δ₃ = Ω²/4` (plus ω = 0 for the nonlinear model).
pub fn polariton_poles(model: &Model) -> Vec<f64> {
    let e = &model.emitter;
    let mid = 0.5 * (e.omega2 + e.omega3());
    let half = (0.25 * e.delta * e.delta + 0.25 * e.omega_rabi * e.omega_rabi).sqrt();
    let mut poles = vec![mid - half, mid + half];
    if let DispersionModel::Nonlinear { .. } = model.dispersion {
        poles.push(0.0);
    }
    poles.sort_by(f64::total_cmp);
    poles.dedup();
    poles
}

/// Band points on `n` evenly spaced frequencies of `[lo, hi]`, skipping the
/// [`POLE_EXCLUSION`] neighbourhood of each pole.
pub fn scan_bands(
    model: &Model,
    lattice: &LatticeConfig,
    lo: f64,
    hi: f64,
    n: usize,
    exec: Execution,
) -> Result<Vec<BandPoint>> {
    if !(lo.is_finite() && hi.is_finite() && lo < hi) {
        return Err(Error::InvalidWindow { lo, hi });
    }
    let poles = polariton_poles(model);
    let grid: Vec<f64> = par::linspace(lo, hi, n)
        .into_iter()
        .filter(|w| poles.iter().all(|p| (w - p).abs() > POLE_EXCLUSION))
        .collect();
    par::try_map(exec, &grid, |&w| {
        let c = bloch_cos_closed(w, model, lattice).map_err(|e| e.at(w))?;
        Ok(BandPoint::new(w, c, lattice.spacing))
    })
}

/// Splits ordered band points into maximal allowed/forbidden runs. Edges
/// between runs are refined by bisection on `|cos KL| − 1` using `cos_kl`.
pub fn classify_band<F>(points: &[BandPoint], cos_kl: F) -> Result<Vec<BandInterval>>
where
    F: Fn(f64) -> Result<f64>,
{
    let Some(first) = points.first() else {
        return Ok(Vec::new());
    };
    let kind_of = |forbidden: bool| if forbidden { BandKind::Forbidden } else { BandKind::Allowed };

    let mut runs: Vec<(usize, usize)> = Vec::new();
    let mut start = 0;
    for k in 1..=points.len() {
        if k == points.len() || points[k].forbidden != points[start].forbidden {
            runs.push((start, k - 1));
            start = k;
        }
    }
    // The outer runs are cut by the scan window and may be short.
    for (idx, &(a, b)) in runs.iter().enumerate() {
        let interior = idx > 0 && idx + 1 < runs.len();
        if interior && b - a + 1 < MIN_RUN {
            return Err(Error::GridTooCoarse { omega: points[a].omega, points: b - a + 1 });
        }
    }

    let mut edges = Vec::with_capacity(runs.len().saturating_sub(1));
    for w in runs.windows(2) {
        let (lo, hi) = (&points[w[0].1], &points[w[1].0]);
        edges.push(refine_edge(&cos_kl, lo.omega, hi.omega, lo.forbidden)?);
    }

    let last = points.last().map(|p| p.omega).unwrap_or(first.omega);
    Ok(runs
        .iter()
        .enumerate()
        .map(|(idx, &(a, _))| BandInterval {
            kind: kind_of(points[a].forbidden),
            start: if idx == 0 { first.omega } else { edges[idx - 1] },
            end: if idx + 1 == runs.len() { last } else { edges[idx] },
        })
        .collect())
}

fn refine_edge<F>(cos_kl: &F, mut a: f64, mut b: f64, a_forbidden: bool) -> Result<f64>
where
    F: Fn(f64) -> Result<f64>,
{
    loop {
        let m = 0.5 * (a + b);
        if m <= a || m >= b {
            return Ok(m);
        }
        if (cos_kl(m)?.abs() > 1.0) == a_forbidden {
            a = m;
        } else {
            b = m;
        }
    }
}

/// Band intervals of `[lo, hi]` at [`SCAN_DENSITY`].
pub fn band_intervals(model: &Model, lattice: &LatticeConfig, lo: f64, hi: f64, exec: Execution) -> Result<Vec<BandInterval>> {
    let n = ((hi - lo) / model.emitter.omega2 * SCAN_DENSITY).ceil() as usize + 1;
    let points = scan_bands(model, lattice, lo, hi, n, exec)?;
    classify_band(&points, |w| bloch_cos_closed(w, model, lattice))
}

/// The first forbidden band whose interior reaches above ω₂.
pub fn gap_above_resonance(model: &Model, lattice: &LatticeConfig, exec: Execution) -> Result<BandInterval> {
    let w2 = model.emitter.omega2;
    let lo = 0.9 * w2;
    let mut hi = 2.0 * w2;
    loop {
        let intervals = band_intervals(model, lattice, lo, hi, exec)?;
        let gap = intervals.iter().find(|b| b.kind == BandKind::Forbidden && b.end > w2 && b.start < 2.0 * w2);
        match gap {
            None => return Err(Error::NoGapFound { lo: w2, hi: 2.0 * w2 }),
            // Cut by the window: widen until the band closes.
            Some(g) if g.end >= hi && hi < 10.0 * w2 => hi += w2,
            Some(g) => return Ok(*g),
        }
    }
}

/// Upper edge `ω_B` of [`gap_above_resonance`].
pub fn gap_end_above_resonance(model: &Model, lattice: &LatticeConfig) -> Result<f64> {
    Ok(gap_above_resonance(model, lattice, Execution::Sequential)?.end)
}

/// Evaluates `Δω_B(J) = ω_lB − ω_nlB` with the linear edge computed once.
#[derive(Debug, Clone)]
pub struct GapScanner {
    emitter: EmitterConfig,
    coupling: CouplingConfig,
    lattice: LatticeConfig,
    linear_edge: f64,
}

impl GapScanner {
    pub fn new(emitter: EmitterConfig, coupling: CouplingConfig, lattice: LatticeConfig) -> Result<Self> {
        let linear = Model::new(emitter, coupling, DispersionModel::Linear { v_g: coupling.v_g })?;
        let linear_edge = gap_end_above_resonance(&linear, &lattice)?;
        Ok(GapScanner { emitter, coupling, lattice, linear_edge })
    }

    pub fn linear_edge(&self) -> f64 {
        self.linear_edge
    }

    pub fn nonlinear_edge(&self, j: f64) -> Result<f64> {
        let model = Model::new(self.emitter, self.coupling, DispersionModel::nonlinear(j))?;
        gap_end_above_resonance(&model, &self.lattice)
    }

    pub fn difference(&self, j: f64) -> Result<f64> {
        Ok(self.linear_edge - self.nonlinear_edge(j)?)
    }

    /// `(J, Δω_B)` pairs in the order of `js`.
    pub fn samples(&self, js: &[f64], exec: Execution) -> Result<Vec<(f64, f64)>> {
        par::try_map(exec, js, |&j| Ok((j, self.difference(j)?)))
    }

    /// Root of `Δω_B(J)` in `[lo, hi]` by bisection.
    pub fn crossing(&self, mut lo: f64, mut hi: f64, tol: f64) -> Result<f64> {
        let mut f_lo = self.difference(lo)?;
        let f_hi = self.difference(hi)?;
        if f_lo.signum() == f_hi.signum() {
            return Err(Error::invalid("bracket", format!("Δω_B has the same sign at J = {lo} and J = {hi}")));
        }
        while hi - lo > tol {
            let mid = 0.5 * (lo + hi);
            let f_mid = self.difference(mid)?;
            if f_mid.signum() == f_lo.signum() {
                lo = mid;
                f_lo = f_mid;
            } else {
                hi = mid;
            }
        }
        Ok(0.5 * (lo + hi))
    }
}

/// Least-squares fit of `Δω_B = ω₂ log_b(J/ω₂) + ξ`, i.e. `a·ln(J/ω₂) + ξ`
/// with `b = e^{ω₂/a}`. Samples are `(J, Δω_B)` in units of ω₂.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GapFit {
    pub base_b: f64,
    pub xi: f64,
    pub rms_residual: f64,
    pub j_samples: Vec<(f64, f64)>,
}

impl GapFit {
    /// Coefficient `a = 1/ln b` of `ln J`.
    pub fn slope(&self) -> f64 {
        1.0 / self.base_b.ln()
    }

    pub fn predict(&self, j: f64) -> f64 {
        self.slope() * j.ln() + self.xi
    }
}

pub fn fit_gap_law(samples: &[(f64, f64)]) -> Result<GapFit> {
    if samples.len() < 2 {
        return Err(Error::DegenerateFit(format!("{} sample(s)", samples.len())));
    }
    if samples.iter().any(|&(j, d)| !(j > 0.0 && j.is_finite() && d.is_finite())) {
        return Err(Error::DegenerateFit("samples need finite Δω_B and J > 0".into()));
    }
    let mut sorted = samples.to_vec();
    sorted.sort_by(|a, b| a.0.total_cmp(&b.0));

    let n = sorted.len() as f64;
    let x_mean = sorted.iter().map(|s| s.0.ln()).sum::<f64>() / n;
    let y_mean = sorted.iter().map(|s| s.1).sum::<f64>() / n;
    let (mut sxx, mut sxy) = (0.0, 0.0);
    for &(j, d) in &sorted {
        let dx = j.ln() - x_mean;
        sxx += dx * dx;
        sxy += dx * (d - y_mean);
    }
    if sxx <= 1e-24 * n {
        return Err(Error::DegenerateFit("all samples share the same J".into()));
    }
    let slope = sxy / sxx;
    if !(slope > 0.0) {
        return Err(Error::DegenerateFit(format!("non-increasing law (slope {slope:e}); base b undefined")));
    }
    let xi = y_mean - slope * x_mean;
    let rms = (sorted.iter().map(|&(j, d)| (d - slope * j.ln() - xi).powi(2)).sum::<f64>() / n).sqrt();
    Ok(GapFit { base_b: (1.0 / slope).exp(), xi, rms_residual: rms, j_samples: sorted })
}

/// Default J grid of the gap-law fit: 20 log-spaced points in `[1.2, 5]` ω₂.
pub fn default_j_grid() -> Vec<f64> {
    par::geomspace(1.2, 5.0, 20)
}
