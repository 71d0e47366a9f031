use std::f64::consts::PI;

use proptest::prelude::*;

use wqed_core::chain::{chain_matrix, chain_transmission_chebyshev, emitter_matrix, free_matrix};
use wqed_core::{CouplingConfig, DispersionModel, EmitterConfig, LatticeConfig, Model, PhaseMode};

fn lossless(rabi: f64, gamma: f64, d: DispersionModel) -> Model {
    Model::new(EmitterConfig::new(1.0, 0.0, 0.0, 0.0, rabi).unwrap(), CouplingConfig::symmetric(gamma), d).unwrap()
}

fn dispersion() -> impl Strategy<Value = DispersionModel> {
    prop_oneof![Just(DispersionModel::linear()), (0.3f64..5.0).prop_map(DispersionModel::nonlinear)]
}

fn lattice(n: u32, spacing_lambda0: f64) -> LatticeConfig {
    LatticeConfig::new(n, spacing_lambda0 * 2.0 * PI, PhaseMode::FrequencyDependent).unwrap()
}

proptest! {
    #[test]
    fn free_segment_is_unimodular(phase in -20.0f64..20.0) {
        let det = free_matrix(phase).det();
        prop_assert!((det - 1.0).norm() <= 4.0 * f64::EPSILON, "{det}");
    }

    #[test]
    fn lossless_emitter_is_unimodular(w in 0.05f64..3.0, rabi in 0.01f64..1.0, gamma in 0.01f64..2.0, d in dispersion()) {
        let s = lossless(rabi, gamma, d).amplitudes(w).unwrap();
        if let Ok(m) = emitter_matrix(s.t(), s.r()) {
            prop_assert!((m.det() - 1.0).norm() < 1e-12 * m.max_abs().powi(2).max(1.0));
        }
    }

    #[test]
    fn composition_is_associative(
        w in 0.05f64..2.0, rabi in 0.01f64..1.0, gamma in 0.01f64..1.0, spacing in 0.02f64..0.6,
        a in 1u32..20, b in 1u32..20, d in dispersion(),
    ) {
        let m = lossless(rabi, gamma, d);
        let whole = chain_matrix(w, &m, &lattice(a + b, spacing));
        let parts = chain_matrix(w, &m, &lattice(a, spacing)).and_then(|x| Ok(x * chain_matrix(w, &m, &lattice(b, spacing))?));
        if let (Ok(whole), Ok(parts)) = (whole, parts) {
            prop_assert!(whole.max_abs_diff(&parts) <= 1e-10 * whole.max_abs());
        }
    }

    #[test]
    fn lossless_chain_transmission_is_bounded(
        w in 0.05f64..2.0, rabi in 0.01f64..1.0, gamma in 0.01f64..1.0, spacing in 0.02f64..0.6, n in 1u32..60, d in dispersion(),
    ) {
        if let Ok(c) = chain_transmission_chebyshev(w, &lossless(rabi, gamma, d), &lattice(n, spacing)) {
            prop_assert!(!c.lossy_input);
            prop_assert!((0.0..=1.0).contains(&c.transmittance));
        }
    }

    #[test]
    fn chain_is_transparent_at_resonance(gamma2 in 0.0f64..0.5, rabi in 0.01f64..1.0, gamma in 0.01f64..1.0, n in 1u32..40, spacing in 0.02f64..0.6) {
        let m = Model::new(EmitterConfig::new(1.0, 0.0, gamma2, 0.0, rabi).unwrap(), CouplingConfig::symmetric(gamma), DispersionModel::linear()).unwrap();
        let t = chain_matrix(1.0, &m, &lattice(n, spacing)).unwrap().transmittance();
        prop_assert!((t - 1.0).abs() < 1e-10);
    }

    /// Near qL = π (ω = 1.25 at L = 0.4λ₀) the two routes still agree to 10⁻⁶.
    #[test]
    fn chebyshev_near_phase_singularity(offset in -1e-4f64..1e-4, n in 1u32..=50, d in dispersion()) {
        let m = lossless(0.2, 0.4, d);
        let lat = lattice(n, 0.4);
        let w = 1.25 + offset / (0.4 * 2.0 * PI);
        let by_power = chain_matrix(w, &m, &lat).unwrap().transmittance();
        let by_formula = chain_transmission_chebyshev(w, &m, &lat).unwrap().transmittance;
        prop_assert!((by_power - by_formula).abs() / by_power.max(by_formula) < 1e-6);
    }
}
