//! Named configurations for the reference single-emitter spectra, chain
//! spectra, band diagrams and gap-law fit.

use crate::chain::PhaseMode;
use crate::config::{BandsSpec, GapFitSpec, LatticeSpec, OutputSpec, RunConfig, SweepSpec, Units};
use crate::model::{CouplingConfig, DispersionModel, EmitterConfig};

pub const PRESETS: &[(&str, &str)] = &[
    ("fig2a-oc", "single emitter, linear dispersion, over-coupled (Γ = 4γ₂)"),
    ("fig2a-uc", "single emitter, linear dispersion, under-coupled (Γ = γ₂/2)"),
    ("fig2a-cr", "single emitter, linear dispersion, critically coupled (Γ = γ₂)"),
    ("fig2b-J0.5", "single emitter, cosine dispersion J = 0.5ω₂, over-coupled"),
    ("fig2b-J1.0", "single emitter, cosine dispersion J = 1.0ω₂, over-coupled"),
    ("fig2b-J2.5", "single emitter, cosine dispersion J = 2.5ω₂, over-coupled"),
    ("fig2c", "dT/dω of the J = 2.5ω₂ single-emitter spectrum"),
    ("fig3-N2", "chain of 2 emitters, J = 2.5ω₂, L = 0.5λ₀"),
    ("fig3-N5", "chain of 5 emitters, J = 2.5ω₂, L = 0.5λ₀"),
    ("fig3-N10", "chain of 10 emitters, J = 2.5ω₂, L = 0.5λ₀"),
    ("fig4", "Bloch bands, lossless, J = 2.5ω₂, L ∈ {0.045, 0.05}λ₀"),
    ("fig4-inset", "Δω_B(J) over 20 log-spaced J in [1.2, 5]ω₂ at L = 0.045λ₀ and its log fit"),
];

const GAMMA2: f64 = 0.1;

fn base(gamma: f64, dispersion: DispersionModel, sweep: (f64, f64, usize)) -> RunConfig {
    RunConfig {
        units: Units::Omega2,
        emitter: EmitterConfig::eit_reference(),
        coupling: CouplingConfig::symmetric(gamma),
        dispersion,
        lattice: None,
        sweep: SweepSpec { omega_min: sweep.0, omega_max: sweep.1, n_points: sweep.2 },
        outputs: OutputSpec::default(),
        derivative: false,
        bands: None,
        gapfit: None,
    }
}

fn chain(n: u32) -> RunConfig {
    RunConfig {
        lattice: Some(LatticeSpec { n_emitters: n, spacing_lambda0: 0.5, phase_mode: PhaseMode::FrequencyDependent }),
        ..base(4.0 * GAMMA2, DispersionModel::nonlinear(2.5), (0.05, 2.0, 3901))
    }
}

fn bands() -> RunConfig {
    let mut cfg = base(4.0 * GAMMA2, DispersionModel::nonlinear(2.5), (0.5, 2.0, 15001));
    cfg.make_lossless();
    cfg.lattice = Some(LatticeSpec { n_emitters: 1, spacing_lambda0: 0.045, phase_mode: PhaseMode::FrequencyDependent });
    cfg.bands = Some(BandsSpec { spacings_lambda0: vec![0.045, 0.05] });
    cfg
}

pub fn preset(name: &str) -> Option<RunConfig> {
    let oc = 4.0 * GAMMA2;
    let single_nl = (0.05, 1.5, 2901);
    Some(match name {
        "fig2a-oc" => base(oc, DispersionModel::linear(), (0.5, 1.5, 2001)),
        "fig2a-uc" => base(0.5 * GAMMA2, DispersionModel::linear(), (0.5, 1.5, 2001)),
        "fig2a-cr" => base(GAMMA2, DispersionModel::linear(), (0.5, 1.5, 2001)),
        "fig2b-J0.5" => base(oc, DispersionModel::nonlinear(0.5), single_nl),
        "fig2b-J1.0" => base(oc, DispersionModel::nonlinear(1.0), single_nl),
        "fig2b-J2.5" => base(oc, DispersionModel::nonlinear(2.5), single_nl),
        "fig2c" => RunConfig { derivative: true, ..base(oc, DispersionModel::nonlinear(2.5), (0.1, 1.0, 1801)) },
        "fig3-N2" => chain(2),
        "fig3-N5" => chain(5),
        "fig3-N10" => chain(10),
        "fig4" => bands(),
        "fig4-inset" => RunConfig { gapfit: Some(GapFitSpec::default()), ..bands() },
        _ => return None,
    })
}
