//! Transfer matrices for periodic chains of identical emitters.
//!
//! An emitter with amplitudes `(t, r)` is represented by
//!
//! ```text
//! M_QE = [ 1/t*   −r*/t* ]      M_F = [ e^{iqL}     0     ]
//!        [ −r/t    1/t   ]            [   0      e^{−iqL} ]
//! ```
//!
//! and one unit cell by `M_B = M_QE · M_F`. For the composed chain `M_B^N`
//! the net transmission is `1/|m22|²` and the reflection `|m21/m22|²`.

use std::f64::consts::PI;
use std::ops::Mul;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{CouplingConfig, EmitterConfig, Model};

/// Below this modulus `t` is treated as a perfect mirror.
pub const TRANSMISSION_FLOOR: f64 = 1e-30;

/// Tolerated `| |t|² + |r|² − 1 |` before the Chebyshev path flags lossy input.
pub const LOSSLESS_TOLERANCE: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransferMatrix {
    pub m11: Complex64,
    pub m12: Complex64,
    pub m21: Complex64,
    pub m22: Complex64,
}

impl TransferMatrix {
    pub const IDENTITY: TransferMatrix = TransferMatrix {
        m11: Complex64::new(1.0, 0.0),
        m12: Complex64::new(0.0, 0.0),
        m21: Complex64::new(0.0, 0.0),
        m22: Complex64::new(1.0, 0.0),
    };

    pub fn det(&self) -> Complex64 {
        self.m11 * self.m22 - self.m12 * self.m21
    }

    pub fn trace(&self) -> Complex64 {
        self.m11 + self.m22
    }

    /// `self^n` by repeated squaring.
    pub fn pow(self, mut n: u32) -> TransferMatrix {
        let mut base = self;
        let mut acc = TransferMatrix::IDENTITY;
        while n > 0 {
            if n & 1 == 1 {
                acc = acc * base;
            }
            base = base * base;
            n >>= 1;
        }
        acc
    }

    /// Net transmission `1/|m22|²`.
    pub fn transmittance(&self) -> f64 {
        1.0 / self.m22.norm_sqr()
    }

    /// Net reflection `|m21/m22|²`.
    pub fn reflectance(&self) -> f64 {
        (self.m21 / self.m22).norm_sqr()
    }

    pub fn max_abs_diff(&self, other: &TransferMatrix) -> f64 {
        [self.m11 - other.m11, self.m12 - other.m12, self.m21 - other.m21, self.m22 - other.m22]
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max)
    }

    pub fn max_abs(&self) -> f64 {
        [self.m11, self.m12, self.m21, self.m22].iter().map(|z| z.norm()).fold(0.0, f64::max)
    }
}

impl Mul for TransferMatrix {
    type Output = TransferMatrix;

    fn mul(self, o: TransferMatrix) -> TransferMatrix {
        TransferMatrix {
            m11: self.m11 * o.m11 + self.m12 * o.m21,
            m12: self.m11 * o.m12 + self.m12 * o.m22,
            m21: self.m21 * o.m11 + self.m22 * o.m21,
            m22: self.m21 * o.m12 + self.m22 * o.m22,
        }
    }
}

/// How the free-propagation phase depends on frequency.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PhaseMode {
    /// `qL = ωL/v_g`.
    #[default]
    FrequencyDependent,
    /// `qL = ω₂L/v_g` at every frequency.
    Resonant,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LatticeConfig {
    pub n_emitters: u32,
    /// Spacing in absolute length units.
    pub spacing: f64,
    pub phase_mode: PhaseMode,
}

/// Resonant wavelength `λ₀ = 2π v_g / ω₂`.
pub fn resonant_wavelength(emitter: &EmitterConfig, coupling: &CouplingConfig) -> f64 {
    2.0 * PI * coupling.v_g / emitter.omega2
}

impl LatticeConfig {
    pub fn new(n_emitters: u32, spacing: f64, phase_mode: PhaseMode) -> Result<Self> {
        if n_emitters < 1 {
            return Err(Error::invalid("n_emitters", "chain needs at least one emitter"));
        }
        if !(spacing.is_finite() && spacing > 0.0) {
            return Err(Error::invalid("spacing", format!("must be positive, got {spacing}")));
        }
        Ok(LatticeConfig { n_emitters, spacing, phase_mode })
    }

    /// Spacing given as a fraction of `λ₀`.
    pub fn in_wavelengths(
        n_emitters: u32,
        spacing_lambda0: f64,
        phase_mode: PhaseMode,
        emitter: &EmitterConfig,
        coupling: &CouplingConfig,
    ) -> Result<Self> {
        Self::new(n_emitters, spacing_lambda0 * resonant_wavelength(emitter, coupling), phase_mode)
    }

    pub fn with_emitters(self, n_emitters: u32) -> Self {
        LatticeConfig { n_emitters, ..self }
    }

    /// Free-propagation phase `qL` across one cell.
    pub fn phase(&self, omega: f64, emitter: &EmitterConfig, coupling: &CouplingConfig) -> f64 {
        let frequency = match self.phase_mode {
            PhaseMode::FrequencyDependent => omega,
            PhaseMode::Resonant => emitter.omega2,
        };
        frequency / coupling.v_g * self.spacing
    }
}

pub fn emitter_matrix(t: Complex64, r: Complex64) -> Result<TransferMatrix> {
    if t.norm() < TRANSMISSION_FLOOR {
        return Err(Error::ZeroTransmission);
    }
    let tc = t.conj();
    Ok(TransferMatrix { m11: tc.inv(), m12: -r.conj() / tc, m21: -r / t, m22: t.inv() })
}

pub fn free_matrix(phase: f64) -> TransferMatrix {
    TransferMatrix {
        m11: Complex64::from_polar(1.0, phase),
        m12: Complex64::new(0.0, 0.0),
        m21: Complex64::new(0.0, 0.0),
        m22: Complex64::from_polar(1.0, -phase),
    }
}

/// One unit cell `M_QE · M_F` at frequency `omega`.
pub fn cell_matrix(omega: f64, model: &Model, lattice: &LatticeConfig) -> Result<TransferMatrix> {
    let s = model.amplitudes(omega)?;
    let phase = lattice.phase(omega, &model.emitter, &model.coupling);
    Ok(emitter_matrix(s.t(), s.r())? * free_matrix(phase))
}

/// `(M_QE · M_F)^N`.
pub fn chain_matrix(omega: f64, model: &Model, lattice: &LatticeConfig) -> Result<TransferMatrix> {
    Ok(cell_matrix(omega, model, lattice)?.pow(lattice.n_emitters))
}

/// Net `(T, R)` of the chain from the composed matrix. Valid with losses.
pub fn chain_spectrum(omega: f64, model: &Model, lattice: &LatticeConfig) -> Result<(f64, f64)> {
    let m = chain_matrix(omega, model, lattice)?;
    Ok((m.transmittance(), m.reflectance()))
}

/// Result of the closed-form chain transmission.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChebyshevTransmission {
    pub transmittance: f64,
    /// `|t|² + |r|²` differed from one by more than [`LOSSLESS_TOLERANCE`];
    /// the value is then not the chain transmission.
    pub lossy_input: bool,
}

/// Chebyshev polynomial of the second kind `U_n(x)` by its three-term
/// recurrence; valid for any real `x`.
pub fn chebyshev_u(n: u32, x: f64) -> f64 {
    let (mut prev, mut cur) = (1.0, 2.0 * x);
    if n == 0 {
        return prev;
    }
    for _ in 1..n {
        let next = 2.0 * x * cur - prev;
        prev = cur;
        cur = next;
    }
    cur
}

/// Lossless N-cell transmission from Chebyshev's identity for a unimodular
/// cell matrix:
///
/// ```text
/// T_N = [1 + (|r|²/|t|²) · U_{N−1}(cos θ)²]⁻¹,   cos θ = ½ tr M_B = Re[e^{−iqL}/t]
/// ```
///
/// `U_{N−1}(cos θ) = sin(Nθ)/sin θ` inside a band; the polynomial form has
/// no singularity at band edges.
pub fn chebyshev_transmission(n: u32, t: Complex64, r: Complex64, phase: f64) -> Result<ChebyshevTransmission> {
    if n < 1 {
        return Err(Error::invalid("n", "chain needs at least one emitter"));
    }
    if t.norm() < TRANSMISSION_FLOOR {
        return Err(Error::ZeroTransmission);
    }
    let bloch_cos = (Complex64::from_polar(1.0, -phase) / t).re;
    let u = chebyshev_u(n - 1, bloch_cos);
    let ratio = r.norm_sqr() / t.norm_sqr();
    Ok(ChebyshevTransmission {
        transmittance: 1.0 / (1.0 + ratio * u * u),
        lossy_input: (t.norm_sqr() + r.norm_sqr() - 1.0).abs() > LOSSLESS_TOLERANCE,
    })
}

/// Chain transmission through [`chebyshev_transmission`] at frequency `omega`.
pub fn chain_transmission_chebyshev(omega: f64, model: &Model, lattice: &LatticeConfig) -> Result<ChebyshevTransmission> {
    let s = model.amplitudes(omega)?;
    let phase = lattice.phase(omega, &model.emitter, &model.coupling);
    chebyshev_transmission(lattice.n_emitters, s.t(), s.r(), phase)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::DispersionModel;
    use std::f64::consts::FRAC_1_SQRT_2;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    /// Lossless symmetric-scatterer pair with `|t|² = cos²α`.
    fn lossless_pair(alpha: f64, phi: f64) -> (Complex64, Complex64) {
        let t = Complex64::from_polar(alpha.cos(), phi);
        let r = Complex64::from_polar(alpha.sin(), phi + 0.5 * PI);
        (t, r)
    }

    #[test]
    fn transparent_emitter_is_identity() {
        assert_eq!(emitter_matrix(c(1.0, 0.0), c(0.0, 0.0)).unwrap(), TransferMatrix::IDENTITY);
    }

    #[test]
    fn lossless_emitter_is_unimodular() {
        for k in 0..50 {
            let (t, r) = lossless_pair(0.03 * k as f64, 0.7 * k as f64);
            let m = emitter_matrix(t, r).unwrap();
            assert!((m.det() - c(1.0, 0.0)).norm() < 1e-12);
            assert!((m.m22.norm() - 1.0 / t.norm()).abs() < 1e-12);
        }
        let m = emitter_matrix(c(0.0, FRAC_1_SQRT_2), c(FRAC_1_SQRT_2, 0.0)).unwrap();
        assert!((m.m22.norm() - 2f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn mirror_has_no_transfer_matrix() {
        assert!(matches!(emitter_matrix(c(0.0, 0.0), c(1.0, 0.0)), Err(Error::ZeroTransmission)));
    }

    #[test]
    fn free_propagation() {
        assert_eq!(free_matrix(0.0), TransferMatrix::IDENTITY);
        let m = free_matrix(PI);
        assert!((m.m11 + 1.0).norm() < 1e-15 && (m.m22 + 1.0).norm() < 1e-15);
        for phase in [-3.0, 0.2, 1.0, 17.5] {
            let m = free_matrix(phase);
            assert!((m.det() - 1.0).norm() < 1e-15);
            assert!((m.m11.norm() - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn phase_modes() {
        let e = EmitterConfig::eit_reference();
        let cpl = CouplingConfig::symmetric(0.4);
        let res = LatticeConfig::in_wavelengths(1, 0.5, PhaseMode::Resonant, &e, &cpl).unwrap();
        let freq = LatticeConfig::in_wavelengths(1, 0.5, PhaseMode::FrequencyDependent, &e, &cpl).unwrap();
        for w in [0.2, 0.5, 1.0, 1.7] {
            assert!((res.phase(w, &e, &cpl) - PI).abs() < 1e-15);
        }
        assert!((freq.phase(1.0, &e, &cpl) - PI).abs() < 1e-15);
        assert!((freq.phase(0.5, &e, &cpl) - 0.5 * PI).abs() < 1e-15);
    }

    #[test]
    fn lattice_validation() {
        assert!(LatticeConfig::new(0, 1.0, PhaseMode::Resonant).is_err());
        assert!(LatticeConfig::new(3, 0.0, PhaseMode::Resonant).is_err());
        assert!(LatticeConfig::new(3, -1.0, PhaseMode::Resonant).is_err());
    }

    #[test]
    fn power_by_squaring_matches_repeated_product() {
        let (t, r) = lossless_pair(0.6, 0.3);
        let cell = emitter_matrix(t, r).unwrap() * free_matrix(0.9);
        let mut acc = TransferMatrix::IDENTITY;
        for n in 0..20 {
            assert!(cell.pow(n).max_abs_diff(&acc) < 1e-12 * (1.0 + acc.max_abs()));
            acc = acc * cell;
        }
    }

    #[test]
    fn single_transparent_cell() {
        let m = emitter_matrix(c(1.0, 0.0), c(0.0, 0.0)).unwrap() * free_matrix(0.0);
        assert_eq!(m.pow(1), TransferMatrix::IDENTITY);
        assert_eq!(m.transmittance(), 1.0);
    }

    #[test]
    fn chebyshev_single_cell_is_bare_emitter() {
        for k in 1..40 {
            let (t, r) = lossless_pair(0.037 * k as f64, 0.4 * k as f64);
            let res = chebyshev_transmission(1, t, r, 0.3 * k as f64).unwrap();
            assert!((res.transmittance - t.norm_sqr()).abs() < 1e-14);
            assert!(!res.lossy_input);
        }
    }

    #[test]
    fn chebyshev_band_edge_limit() {
        // cos θ = Re[e^{−iπ}/t] = −1 with |r/t| = 1: U₄(−1) = 5, T₅ = 1/26.
        let t = c(0.5, 0.5);
        let r = c(0.5, -0.5);
        let res = chebyshev_transmission(5, t, r, PI).unwrap();
        assert!((res.transmittance - 1.0 / 26.0).abs() < 1e-14, "{}", res.transmittance);
    }

    #[test]
    fn chebyshev_transparent_chain() {
        for n in [1, 2, 7, 50] {
            for phase in [0.0, 0.4, PI, 5.0] {
                let res = chebyshev_transmission(n, c(0.0, 1.0), c(0.0, 0.0), phase).unwrap();
                assert_eq!(res.transmittance, 1.0);
            }
        }
    }

    #[test]
    fn chebyshev_flags_lossy_input() {
        let res = chebyshev_transmission(3, c(0.5, 0.0), c(0.1, 0.0), 0.7).unwrap();
        assert!(res.lossy_input);
    }

    #[test]
    fn chebyshev_u_matches_trigonometric_form() {
        for n in 0..30 {
            for k in 1..20 {
                let theta = 0.15 * k as f64;
                let expect = ((n + 1) as f64 * theta).sin() / theta.sin();
                assert!((chebyshev_u(n, theta.cos()) - expect).abs() < 1e-10 * (1.0 + expect.abs()));
            }
        }
    }

    #[test]
    fn chain_is_transparent_at_eit_point() {
        let e = EmitterConfig::eit_reference();
        let cpl = CouplingConfig::symmetric(0.4);
        for dispersion in [DispersionModel::linear(), DispersionModel::nonlinear(2.5)] {
            let model = Model::new(e, cpl, dispersion).unwrap();
            for n in [1, 2, 5, 10, 33] {
                let lattice = LatticeConfig::in_wavelengths(n, 0.5, PhaseMode::FrequencyDependent, &e, &cpl).unwrap();
                let (t, r) = chain_spectrum(1.0, &model, &lattice).unwrap();
                assert!((t - 1.0).abs() < 1e-12 && r < 1e-24);
            }
        }
    }
}
