//! Single-emitter scattering: parameter types, closed-form amplitudes for the
//! linear and quadratically truncated cosine dispersions, and numerical
//! spectral derivatives.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Below this modulus a scattering denominator is treated as zero.
pub const DENOMINATOR_FLOOR: f64 = 1e-30;

/// Default central-difference step for `dT/dω`, in units of ω₂.
pub const DEFAULT_DERIVATIVE_STEP: f64 = 1e-5;

/// Relative disagreement between the `h` and `h/2` difference quotients that
/// is tolerated before the step is rejected.
const DERIVATIVE_CONSISTENCY: f64 = 1e-2;

/// Difference quotients smaller than this are roundoff-dominated and exempt
/// from the consistency check.
const DERIVATIVE_ABS_FLOOR: f64 = 1e-4;

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Three-level Λ emitter. Level 2 is the excited state coupled to the
/// waveguide, level 3 the metastable state reached through the pump.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EmitterConfig {
    /// Transition frequency ω₂ of |1⟩ ↔ |2⟩.
    pub omega2: f64,
    /// Pump detuning Δ; level 3 sits at ω₃ = ω₂ − Δ.
    pub delta: f64,
    /// Decay rate of |2⟩.
    pub gamma2: f64,
    /// Decay rate of |3⟩.
    pub gamma3: f64,
    /// Pump Rabi frequency Ω.
    pub omega_rabi: f64,
}

impl EmitterConfig {
    pub fn new(omega2: f64, delta: f64, gamma2: f64, gamma3: f64, omega_rabi: f64) -> Result<Self> {
        let e = EmitterConfig { omega2, delta, gamma2, gamma3, omega_rabi };
        e.validate()?;
        Ok(e)
    }

    /// Emitter used throughout the single-emitter spectra: Ω = 0.2ω₂,
    /// γ₂ = 0.1ω₂, γ₃ = Δ = 0.
    pub fn eit_reference() -> Self {
        EmitterConfig { omega2: 1.0, delta: 0.0, gamma2: 0.1, gamma3: 0.0, omega_rabi: 0.2 }
    }

    pub fn lossless(self) -> Self {
        EmitterConfig { gamma2: 0.0, gamma3: 0.0, ..self }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.omega2.is_finite() && self.omega2 > 0.0) {
            return Err(Error::invalid("omega2", format!("must be positive, got {}", self.omega2)));
        }
        if !self.delta.is_finite() {
            return Err(Error::invalid("delta", "must be finite"));
        }
        for (name, v) in [("gamma2", self.gamma2), ("gamma3", self.gamma3), ("omega_rabi", self.omega_rabi)] {
            if !(v.is_finite() && v >= 0.0) {
                return Err(Error::invalid(name, format!("must be finite and non-negative, got {v}")));
            }
        }
        Ok(())
    }

    pub fn omega3(&self) -> f64 {
        self.omega2 - self.delta
    }

    /// Complex pole ω̃₂ = ω₂ − iγ₂/2.
    pub fn pole2(&self) -> Complex64 {
        Complex64::new(self.omega2, -0.5 * self.gamma2)
    }

    /// Complex pole ω̃₃ = ω₂ − Δ − iγ₃/2.
    pub fn pole3(&self) -> Complex64 {
        Complex64::new(self.omega3(), -0.5 * self.gamma3)
    }

    pub fn is_lossless(&self) -> bool {
        self.gamma2 == 0.0 && self.gamma3 == 0.0
    }
}

/// Returns `(ω − ω̃₂, ω − ω̃₃)`.
pub fn complex_detunings(omega: f64, emitter: &EmitterConfig) -> (Complex64, Complex64) {
    (omega - emitter.pole2(), omega - emitter.pole3())
}

/// Directional emitter-waveguide rates Γ_d = 2V_d²/v_g.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CouplingConfig {
    pub gamma_l: f64,
    pub gamma_r: f64,
    #[serde(default = "unit_velocity")]
    pub v_g: f64,
}

fn unit_velocity() -> f64 {
    1.0
}

impl CouplingConfig {
    pub fn new(gamma_l: f64, gamma_r: f64, v_g: f64) -> Result<Self> {
        let c = CouplingConfig { gamma_l, gamma_r, v_g };
        c.validate()?;
        Ok(c)
    }

    /// Γ_L = Γ_R = `gamma` at unit group velocity.
    pub fn symmetric(gamma: f64) -> Self {
        CouplingConfig { gamma_l: gamma, gamma_r: gamma, v_g: 1.0 }
    }

    /// Builds the rates from the real coupling strengths V_L, V_R.
    pub fn from_strengths(v_l: f64, v_r: f64, v_g: f64) -> Result<Self> {
        if !(v_g.is_finite() && v_g > 0.0) {
            return Err(Error::invalid("v_g", format!("must be positive, got {v_g}")));
        }
        Self::new(2.0 * v_l * v_l / v_g, 2.0 * v_r * v_r / v_g, v_g)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("gamma_l", self.gamma_l), ("gamma_r", self.gamma_r)] {
            if !(v.is_finite() && v >= 0.0) {
                return Err(Error::invalid(name, format!("must be finite and non-negative, got {v}")));
            }
        }
        if !(self.v_g.is_finite() && self.v_g > 0.0) {
            return Err(Error::invalid("v_g", format!("must be positive, got {}", self.v_g)));
        }
        Ok(())
    }

    pub fn is_symmetric(&self) -> bool {
        self.gamma_l == self.gamma_r
    }

    /// Positive roots `(V_L, V_R)` of Γ_d = 2V_d²/v_g.
    pub fn strengths(&self) -> (f64, f64) {
        ((0.5 * self.gamma_l * self.v_g).sqrt(), (0.5 * self.gamma_r * self.v_g).sqrt())
    }

    fn total(&self) -> f64 {
        self.gamma_l + self.gamma_r
    }

    fn imbalance(&self) -> f64 {
        self.gamma_l - self.gamma_r
    }

    fn geometric(&self) -> f64 {
        (self.gamma_l * self.gamma_r).sqrt()
    }
}

/// Waveguide dispersion. The cosine band ω(k) = ω_J − 2J cos(kL) always has
/// ω_J = 0 and is truncated at quadratic order.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum DispersionModel {
    Linear {
        #[serde(default = "unit_velocity")]
        v_g: f64,
    },
    Nonlinear {
        j: f64,
    },
}

impl DispersionModel {
    pub fn linear() -> Self {
        DispersionModel::Linear { v_g: 1.0 }
    }

    pub fn nonlinear(j: f64) -> Self {
        DispersionModel::Nonlinear { j }
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            DispersionModel::Linear { v_g } if !(v_g.is_finite() && v_g > 0.0) => {
                Err(Error::invalid("v_g", format!("must be positive, got {v_g}")))
            }
            DispersionModel::Nonlinear { j } if !(j.is_finite() && j > 0.0) => Err(Error::InvalidHopping(j)),
            _ => Ok(()),
        }
    }

    pub fn hopping(&self) -> Option<f64> {
        match *self {
            DispersionModel::Nonlinear { j } => Some(j),
            DispersionModel::Linear { .. } => None,
        }
    }

    pub fn label(&self) -> String {
        match *self {
            DispersionModel::Linear { .. } => "linear".to_string(),
            DispersionModel::Nonlinear { j } => format!("nonlinear(J={j})"),
        }
    }
}

/// Transmission and reflection amplitudes; the probabilities are always
/// derived from them.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScatteringResult {
    t: Complex64,
    r: Complex64,
}

impl ScatteringResult {
    pub fn new(t: Complex64, r: Complex64) -> Self {
        ScatteringResult { t, r }
    }

    pub fn t(&self) -> Complex64 {
        self.t
    }

    pub fn r(&self) -> Complex64 {
        self.r
    }

    /// T = |t|².
    pub fn transmittance(&self) -> f64 {
        self.t.norm_sqr()
    }

    /// R = |r|².
    pub fn reflectance(&self) -> f64 {
        self.r.norm_sqr()
    }
}

/// Linear dispersion:
///
/// ```text
/// t = [d₃(d₂ + i(Γ_L−Γ_R)/4) − Ω²/4] / D,   r = −i√(Γ_LΓ_R)/2 · d₃ / D
/// D = d₃(d₂ + i(Γ_L+Γ_R)/4) − Ω²/4
/// ```
pub fn amplitudes_linear(omega: f64, emitter: &EmitterConfig, coupling: &CouplingConfig) -> Result<ScatteringResult> {
    if !omega.is_finite() {
        return Err(Error::invalid("omega", "must be finite"));
    }
    let (d2, d3) = complex_detunings(omega, emitter);
    // Without the pump level 3 is decoupled and the common factor d₃ cancels.
    let d3 = if emitter.omega_rabi == 0.0 { Complex64::new(1.0, 0.0) } else { d3 };
    let pump = 0.25 * emitter.omega_rabi * emitter.omega_rabi;
    let den = d3 * (d2 + I * (0.25 * coupling.total())) - pump;
    if den.norm() < DENOMINATOR_FLOOR {
        return Err(Error::DegenerateDenominator { omega });
    }
    let num = d3 * (d2 + I * (0.25 * coupling.imbalance())) - pump;
    let r_num = -I * (0.5 * coupling.geometric()) * d3;
    Ok(ScatteringResult::new(num / den, r_num / den))
}

/// Quadratically truncated cosine dispersion with hopping rate `j`:
///
/// ```text
/// t = [d₃(ω d₂ + i(Γ_L−Γ_R)/(4J)) − ωΩ²/4] / D,   r = −2i√(Γ_LΓ_R) d₃/(4J) / D
/// D = d₃(ω d₂ + i(Γ_L+Γ_R)/(4J)) − ωΩ²/4
/// ```
///
/// The expression is dimensionless (ω₂ = v_g = 1) and only meaningful for ω > 0.
pub fn amplitudes_nonlinear(
    omega: f64,
    emitter: &EmitterConfig,
    coupling: &CouplingConfig,
    j: f64,
) -> Result<ScatteringResult> {
    if !(j.is_finite() && j > 0.0) {
        return Err(Error::InvalidHopping(j));
    }
    if !omega.is_finite() {
        return Err(Error::invalid("omega", "must be finite"));
    }
    let (d2, d3) = complex_detunings(omega, emitter);
    let d3 = if emitter.omega_rabi == 0.0 { Complex64::new(1.0, 0.0) } else { d3 };
    let pump = 0.25 * omega * emitter.omega_rabi * emitter.omega_rabi;
    let den = d3 * (omega * d2 + I * (coupling.total() / (4.0 * j))) - pump;
    if den.norm() < DENOMINATOR_FLOOR {
        return Err(Error::DegenerateDenominator { omega });
    }
    let num = d3 * (omega * d2 + I * (coupling.imbalance() / (4.0 * j))) - pump;
    let r_num = -2.0 * I * coupling.geometric() * d3 / (4.0 * j);
    Ok(ScatteringResult::new(num / den, r_num / den))
}

/// A complete single-emitter parameter bundle.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Model {
    pub emitter: EmitterConfig,
    pub coupling: CouplingConfig,
    pub dispersion: DispersionModel,
}

impl Model {
    pub fn new(emitter: EmitterConfig, coupling: CouplingConfig, dispersion: DispersionModel) -> Result<Self> {
        let m = Model { emitter, coupling, dispersion };
        m.validate()?;
        Ok(m)
    }

    pub fn validate(&self) -> Result<()> {
        self.emitter.validate()?;
        self.coupling.validate()?;
        self.dispersion.validate()
    }

    pub fn with_dispersion(self, dispersion: DispersionModel) -> Self {
        Model { dispersion, ..self }
    }

    pub fn lossless(self) -> Self {
        Model { emitter: self.emitter.lossless(), ..self }
    }

    /// Lowest frequency at which the model may be evaluated (exclusive).
    pub fn frequency_floor(&self) -> Option<f64> {
        match self.dispersion {
            DispersionModel::Nonlinear { .. } => Some(0.0),
            DispersionModel::Linear { .. } => None,
        }
    }

    pub fn amplitudes(&self, omega: f64) -> Result<ScatteringResult> {
        match self.dispersion {
            DispersionModel::Linear { .. } => amplitudes_linear(omega, &self.emitter, &self.coupling),
            DispersionModel::Nonlinear { j } => {
                if omega <= 0.0 {
                    return Err(Error::invalid("omega", format!("nonlinear model requires omega > 0, got {omega}")));
                }
                amplitudes_nonlinear(omega, &self.emitter, &self.coupling, j)
            }
        }
    }

    pub fn transmittance(&self, omega: f64) -> Result<f64> {
        Ok(self.amplitudes(omega)?.transmittance())
    }
}

/// `dT/dω` by a central difference with one Richardson step:
/// `D(h) = (T(ω+h) − T(ω−h))/2h`, result `(4D(h/2) − D(h))/3`.
pub fn transmission_derivative(model: &Model, omega: f64, h: f64) -> Result<f64> {
    if !(h.is_finite() && h > 0.0) {
        return Err(Error::invalid("h", format!("step must be positive, got {h}")));
    }
    if let Some(floor) = model.frequency_floor() {
        if omega - 2.0 * h <= floor {
            return Err(Error::invalid("omega", format!("omega - 2h = {} leaves the valid window", omega - 2.0 * h)));
        }
    }
    let quotient = |step: f64| -> Result<f64> {
        Ok((model.transmittance(omega + step)? - model.transmittance(omega - step)?) / (2.0 * step))
    };
    let coarse = quotient(h)?;
    let fine = quotient(0.5 * h)?;
    let scale = coarse.abs().max(fine.abs());
    if scale > DERIVATIVE_ABS_FLOOR && (coarse - fine).abs() > DERIVATIVE_CONSISTENCY * scale {
        return Err(Error::StepTooLarge { omega, coarse, fine });
    }
    Ok((4.0 * fine - coarse) / 3.0)
}
