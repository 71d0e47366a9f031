//! Peaks, dips and plateaus of a single-emitter transmission spectrum.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{transmission_derivative, Model, DEFAULT_DERIVATIVE_STEP};
use crate::par::{self, Execution};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FeatureKind {
    Peak,
    Dip,
    Plateau,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SpectralFeature {
    pub kind: FeatureKind,
    /// Extremum location, or the centre of a plateau.
    pub omega: f64,
    #[serde(rename = "T")]
    pub transmittance: f64,
    /// `(start, end)` of a plateau on the scan grid.
    pub extent: Option<(f64, f64)>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FeatureOptions {
    /// Plateau points satisfy `|dT/dω| < plateau_slope`.
    pub plateau_slope: f64,
    /// ...and `T > plateau_min_transmittance`.
    pub plateau_min_transmittance: f64,
    pub plateau_min_width: f64,
    /// Bisection tolerance on extremum locations.
    pub tolerance: f64,
    pub derivative_step: f64,
}

impl Default for FeatureOptions {
    fn default() -> Self {
        FeatureOptions {
            plateau_slope: 0.05,
            plateau_min_transmittance: 0.1,
            plateau_min_width: 0.02,
            tolerance: 1e-8,
            derivative_step: DEFAULT_DERIVATIVE_STEP,
        }
    }
}

pub fn find_spectral_features(model: &Model, lo: f64, hi: f64, grid_n: usize) -> Result<Vec<SpectralFeature>> {
    find_spectral_features_with(model, lo, hi, grid_n, &FeatureOptions::default(), Execution::available())
}

/// Scans `grid_n` points of `[lo, hi]`. Extrema come from sign changes of
/// `dT/dω` refined by bisection; plateaus are maximal low-slope runs at least
/// `plateau_min_width` wide. An empty result is a valid outcome.
pub fn find_spectral_features_with(
    model: &Model,
    lo: f64,
    hi: f64,
    grid_n: usize,
    opts: &FeatureOptions,
    exec: Execution,
) -> Result<Vec<SpectralFeature>> {
    if !(lo.is_finite() && hi.is_finite() && lo < hi) {
        return Err(Error::InvalidWindow { lo, hi });
    }
    if let Some(floor) = model.frequency_floor() {
        if lo - 2.0 * opts.derivative_step <= floor {
            return Err(Error::InvalidWindow { lo, hi });
        }
    }
    if grid_n < 100 {
        return Err(Error::invalid("grid_n", format!("need at least 100 points, got {grid_n}")));
    }

    let slope = |w: f64| transmission_derivative(model, w, opts.derivative_step).map_err(|e| e.at(w));
    let grid = par::linspace(lo, hi, grid_n);
    let samples: Vec<(f64, f64)> = par::try_map(exec, &grid, |&w| Ok::<_, Error>((slope(w)?, model.transmittance(w)?)))?;

    let mut features = Vec::new();
    for k in 0..grid_n - 1 {
        let (ga, gb) = (samples[k].0, samples[k + 1].0);
        let kind = match (ga >= 0.0, gb >= 0.0) {
            (true, false) => FeatureKind::Peak,
            (false, true) => FeatureKind::Dip,
            _ => continue,
        };
        let omega = bisect_sign_change(&slope, grid[k], grid[k + 1], ga >= 0.0, opts.tolerance)?;
        features.push(SpectralFeature { kind, omega, transmittance: model.transmittance(omega)?, extent: None });
    }

    let flat: Vec<bool> = samples
        .iter()
        .map(|&(g, t)| g.abs() < opts.plateau_slope && t > opts.plateau_min_transmittance)
        .collect();
    let mut k = 0;
    while k < grid_n {
        if !flat[k] {
            k += 1;
            continue;
        }
        let start = k;
        while k + 1 < grid_n && flat[k + 1] {
            k += 1;
        }
        let (a, b) = (grid[start], grid[k]);
        if b - a >= opts.plateau_min_width {
            let centre = 0.5 * (a + b);
            features.push(SpectralFeature {
                kind: FeatureKind::Plateau,
                omega: centre,
                transmittance: model.transmittance(centre)?,
                extent: Some((a, b)),
            });
        }
        k += 1;
    }

    features.sort_by(|x, y| x.omega.total_cmp(&y.omega));
    Ok(features)
}

fn bisect_sign_change<F>(f: &F, mut a: f64, mut b: f64, a_nonneg: bool, tol: f64) -> Result<f64>
where
    F: Fn(f64) -> Result<f64>,
{
    // Caps the loop for cells far wider than the tolerance.
    for _ in 0..200 {
        if b - a <= tol {
            break;
        }
        let m = 0.5 * (a + b);
        if (f(m)? >= 0.0) == a_nonneg {
            a = m;
        } else {
            b = m;
        }
    }
    Ok(0.5 * (a + b))
}

pub fn plateaus(features: &[SpectralFeature]) -> impl Iterator<Item = &SpectralFeature> {
    features.iter().filter(|f| f.kind == FeatureKind::Plateau)
}

/// Frequencies in `[lo, hi]` where the T and R curves intersect, located by
/// sign changes of `T − R` on `grid_n` points and refined by bisection.
pub fn transmission_reflection_crossings(model: &Model, lo: f64, hi: f64, grid_n: usize, exec: Execution) -> Result<Vec<f64>> {
    if !(lo.is_finite() && hi.is_finite() && lo < hi) {
        return Err(Error::InvalidWindow { lo, hi });
    }
    let balance = |w: f64| -> Result<f64> {
        let s = model.amplitudes(w)?;
        Ok(s.transmittance() - s.reflectance())
    };
    let grid = par::linspace(lo, hi, grid_n.max(2));
    let values = par::try_map(exec, &grid, |&w| balance(w).map_err(|e| e.at(w)))?;
    let mut crossings = Vec::new();
    for k in 1..grid.len() {
        let (a, b) = (values[k - 1], values[k]);
        if a == 0.0 {
            crossings.push(grid[k - 1]);
        } else if a * b < 0.0 {
            crossings.push(bisect_sign_change(&balance, grid[k - 1], grid[k], a >= 0.0, 1e-12)?);
        }
    }
    if values.last() == Some(&0.0) {
        crossings.push(hi);
    }
    Ok(crossings)
}
