//! Independent checks of the closed forms.
//!
//! [`solve_single_emitter`] solves the coupled amplitude equations for
//! `(t, r, e₂, e₃)` directly as a 4×4 complex linear system, without any of
//! the algebra behind the closed-form amplitudes. The scans compare whole
//! grids against unitarity and against the matrix-power chain path.

use std::f64::consts::PI;

use nalgebra::{Matrix4, Vector4};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::chain::{chebyshev_transmission, emitter_matrix, free_matrix, LatticeConfig, TransferMatrix};
use crate::error::{Error, Result};
use crate::model::{CouplingConfig, DispersionModel, EmitterConfig, Model};
use crate::par::{self, Execution};

/// Systems with a larger 2-norm condition number are rejected.
pub const MAX_CONDITION: f64 = 1e14;

/// Seed used by the randomized agreement checks.
pub const DEFAULT_SEED: u64 = 0x05ee_de17_u64;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleSolution {
    pub t: Complex64,
    pub r: Complex64,
    /// Amplitude of the excited state |2⟩.
    pub e2: Complex64,
    /// Amplitude of the metastable state |3⟩.
    pub e3: Complex64,
    /// `‖Ax − b‖ / ‖b‖` of the solved system.
    pub residual: f64,
    pub condition: f64,
}

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

/// Solves, for the unknowns `(t, r, e₂, e₃)`,
///
/// ```text
/// iv_g(1 − t) + V_R e₂ = 0
/// −iv_g r + V_L e₂ = 0
/// (V_R/2)(t + 1) + (V_L/2) r + (Ω/2) e₃ = (ω − ω̃₂) e₂
/// (Ω/2) e₂ = (ω − ω̃₃) e₃
/// ```
///
/// with `iv_g` replaced by `iJω/v_g` (and the sign of the first line flipped
/// accordingly) for the nonlinear dispersion. `V_d = √(Γ_d v_g / 2)`.
pub fn solve_single_emitter(omega: f64, model: &Model) -> Result<OracleSolution> {
    let v_g = model.coupling.v_g;
    let (v_l, v_r) = model.coupling.strengths();
    let half_rabi = 0.5 * model.emitter.omega_rabi;
    let d2 = omega - model.emitter.pole2();
    let d3 = omega - model.emitter.pole3();
    let i = Complex64::i();

    // Prefactor p of the waveguide equations: −p t + V_R e₂ = −p, −p r + V_L e₂ = 0.
    let p = match model.dispersion {
        DispersionModel::Linear { .. } => i * v_g,
        DispersionModel::Nonlinear { j } => {
            if !(j > 0.0) {
                return Err(Error::InvalidHopping(j));
            }
            if !(omega > 0.0) {
                return Err(Error::invalid("omega", "nonlinear model requires omega > 0"));
            }
            i * (j * omega / v_g)
        }
    };

    #[rustfmt::skip]
    let a = Matrix4::new(
        -p,             c(0.0),         c(v_r),         c(0.0),
        c(0.0),         -p,             c(v_l),         c(0.0),
        c(0.5 * v_r),   c(0.5 * v_l),   -d2,            c(half_rabi),
        c(0.0),         c(0.0),         c(half_rabi),   -d3,
    );
    let b = Vector4::new(-p, c(0.0), c(-0.5 * v_r), c(0.0));

    let sv = a.singular_values();
    let (smax, smin) = (sv.max(), sv.min());
    let condition = if smin > 0.0 { smax / smin } else { f64::INFINITY };
    if !(condition <= MAX_CONDITION) {
        return Err(Error::SingularSystem { condition });
    }
    let x = a.lu().solve(&b).ok_or(Error::SingularSystem { condition })?;
    let residual = (a * x - b).norm() / b.norm();
    Ok(OracleSolution { t: x[0], r: x[1], e2: x[2], e3: x[3], residual, condition })
}

/// Scale-aware disagreement `max(|Δt|, |Δr|) / max(|t|, |r|)`.
pub fn amplitude_error(model: &Model, omega: f64) -> Result<f64> {
    let closed = model.amplitudes(omega)?;
    let direct = solve_single_emitter(omega, model)?;
    let scale = closed.t().norm().max(closed.r().norm());
    Ok((closed.t() - direct.t).norm().max((closed.r() - direct.r).norm()) / scale)
}

/// Random parameter draw: ω, Δ (random sign), γ₂, γ₃, Ω, Γ_L, Γ_R and J
/// log-uniform in `[10⁻³, 10]`, ω₂ = v_g = 1.
pub fn random_draw(rng: &mut impl Rng, nonlinear: bool) -> (f64, Model) {
    let mut log_uniform = || 10f64.powf(rng.random_range(-3.0..1.0));
    let omega = log_uniform();
    let delta = log_uniform();
    let emitter = EmitterConfig { omega2: 1.0, delta, gamma2: log_uniform(), gamma3: log_uniform(), omega_rabi: log_uniform() };
    let coupling = CouplingConfig { gamma_l: log_uniform(), gamma_r: log_uniform(), v_g: 1.0 };
    let dispersion = if nonlinear { DispersionModel::nonlinear(log_uniform()) } else { DispersionModel::linear() };
    let emitter = if rng.random_bool(0.5) { EmitterConfig { delta: -emitter.delta, ..emitter } } else { emitter };
    (omega, Model { emitter, coupling, dispersion })
}

/// Worst [`amplitude_error`] over `draws` seeded random draws.
pub fn closed_form_agreement(draws: usize, seed: u64, nonlinear: bool, exec: Execution) -> Result<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let cases: Vec<(f64, Model)> = (0..draws).map(|_| random_draw(&mut rng, nonlinear)).collect();
    let errs = par::try_map(exec, &cases, |(w, m)| amplitude_error(m, *w).map_err(|e| e.at(*w)))?;
    Ok(errs.into_iter().fold(0.0, f64::max))
}

/// Largest `|T + R − 1|` over `n` evenly spaced frequencies of `[lo, hi]`.
pub fn unitarity_scan(model: &Model, lo: f64, hi: f64, n: usize, exec: Execution) -> Result<f64> {
    if n < 100 {
        return Err(Error::invalid("n", format!("need at least 100 points, got {n}")));
    }
    if !(lo < hi) {
        return Err(Error::InvalidWindow { lo, hi });
    }
    let grid = par::linspace(lo, hi, n);
    let vals = par::try_map(exec, &grid, |&w| {
        let s = model.amplitudes(w).map_err(|e| e.at(w))?;
        Ok::<_, Error>((s.transmittance() + s.reflectance() - 1.0).abs())
    })?;
    Ok(vals.into_iter().fold(0.0, f64::max))
}

/// Distance of `phase` from the nearest multiple of π.
pub fn distance_to_pi_multiple(phase: f64) -> f64 {
    let m = (phase / PI).round();
    (phase - m * PI).abs()
}

/// Largest relative difference `|T_cheb − T_pow| / max(T_cheb, T_pow)` over
/// the grid and every chain length `1..=n_max`, skipping frequencies whose
/// cell phase is within `10⁻⁴` of a multiple of π.
pub fn chebyshev_vs_power_scan(
    model: &Model,
    lattice: &LatticeConfig,
    n_max: u32,
    lo: f64,
    hi: f64,
    n: usize,
    exec: Execution,
) -> Result<f64> {
    let grid: Vec<f64> = par::linspace(lo, hi, n)
        .into_iter()
        .filter(|&w| distance_to_pi_multiple(lattice.phase(w, &model.emitter, &model.coupling)) > 1e-4)
        .collect();
    let errs = par::try_map(exec, &grid, |&w| chebyshev_vs_power_at(model, lattice, n_max, w).map_err(|e| e.at(w)))?;
    Ok(errs.into_iter().fold(0.0, f64::max))
}

fn chebyshev_vs_power_at(model: &Model, lattice: &LatticeConfig, n_max: u32, omega: f64) -> Result<f64> {
    let s = model.amplitudes(omega)?;
    let phase = lattice.phase(omega, &model.emitter, &model.coupling);
    let cell = emitter_matrix(s.t(), s.r())? * free_matrix(phase);
    let mut power = TransferMatrix::IDENTITY;
    let mut worst = 0.0_f64;
    for n in 1..=n_max {
        power = power * cell;
        let by_power = power.transmittance();
        let by_formula = chebyshev_transmission(n, s.t(), s.r(), phase)?.transmittance;
        let scale = by_power.max(by_formula);
        if scale > 0.0 {
            worst = worst.max((by_power - by_formula).abs() / scale);
        }
    }
    Ok(worst)
}
