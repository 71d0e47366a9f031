//! Acceptance gate: one line per criterion, nonzero exit if any fails.

use std::f64::consts::PI;
use std::process::ExitCode;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use wqed_core::bands::{self, GapScanner};
use wqed_core::chain::{self, chebyshev_transmission, emitter_matrix, free_matrix};
use wqed_core::features::{find_spectral_features_with, plateaus, FeatureOptions};
use wqed_core::oracle::{self, solve_single_emitter};
use wqed_core::output::Emit;
use wqed_core::par::{self, Execution};
use wqed_core::presets::{preset, PRESETS};
use wqed_core::sweep;
use wqed_core::{CouplingConfig, DispersionModel, EmitterConfig, LatticeConfig, Model, PhaseMode, TransferMatrix};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

const GAMMA2: f64 = 0.1;
const OMEGA_RABI: f64 = 0.2;

fn emitter() -> EmitterConfig {
    EmitterConfig { omega2: 1.0, delta: 0.0, gamma2: GAMMA2, gamma3: 0.0, omega_rabi: OMEGA_RABI }
}

fn model(gamma: f64, dispersion: DispersionModel) -> Model {
    Model::new(emitter(), CouplingConfig::symmetric(gamma), dispersion).unwrap()
}

fn oc(dispersion: DispersionModel) -> Model {
    model(4.0 * GAMMA2, dispersion)
}

fn lattice(spacing_lambda0: f64) -> LatticeConfig {
    LatticeConfig::new(1, spacing_lambda0 * 2.0 * PI, PhaseMode::FrequencyDependent).unwrap()
}

fn within(err: f64, tol: f64, what: &str) -> Outcome {
    if err < tol {
        Ok(format!("{what}: max err {err:.2e} < {tol:.0e}"))
    } else {
        Err(format!("{what}: max err {err:.2e} ≥ {tol:.0e}"))
    }
}

fn eit_exactness() -> Outcome {
    let mut worst = 0.0_f64;
    for d in [DispersionModel::linear(), DispersionModel::nonlinear(0.5), DispersionModel::nonlinear(1.0), DispersionModel::nonlinear(2.5)] {
        let s = oc(d).amplitudes(1.0).map_err(|e| e.to_string())?;
        worst = worst.max((s.transmittance() - 1.0).abs()).max(s.reflectance());
    }
    within(worst, 1e-12, "|T(ω₂)−1|, R(ω₂)")
}

fn dip_depth() -> Outcome {
    let mut worst = 0.0_f64;
    for gamma in [0.5 * GAMMA2, GAMMA2, 4.0 * GAMMA2] {
        let m = model(gamma, DispersionModel::linear());
        // At ω = ω₂ ± Ω/2 the bare detunings obey δ₂δ₃ = Ω²/4, leaving
        // t = γ₂ / (γ₂ + Γ) for symmetric coupling.
        let expected = (GAMMA2 / (GAMMA2 + gamma)).powi(2);
        for w in [1.0 - 0.5 * OMEGA_RABI, 1.0 + 0.5 * OMEGA_RABI] {
            let closed = m.amplitudes(w).map_err(|e| e.to_string())?.transmittance();
            let solved = solve_single_emitter(w, &m).map_err(|e| e.to_string())?.t.norm_sqr();
            worst = worst.max((closed - expected).abs()).max((solved - expected).abs());
        }
    }
    let oc_dip = model(4.0 * GAMMA2, DispersionModel::linear()).amplitudes(1.1).unwrap().transmittance();
    if (oc_dip - 0.04).abs() >= 1e-10 {
        return Err(format!("OC dip {oc_dip} ≠ 0.04"));
    }
    within(worst, 1e-10, "T(ω₂±Ω/2) vs (γ₂/(γ₂+Γ))²")
}

fn lossless_unitarity() -> Outcome {
    let grid = par::linspace(0.01, 3.0, 10_000);
    let mut worst = 0.0_f64;
    for d in [DispersionModel::linear(), DispersionModel::nonlinear(2.5)] {
        let m = oc(d).lossless();
        for &w in &grid {
            let s = m.amplitudes(w).map_err(|e| e.to_string())?;
            worst = worst.max((s.t().norm_sqr() + s.r().norm_sqr() - 1.0).abs());
        }
    }
    within(worst, 1e-12, "|T+R−1|, 10⁴ points, both models")
}

fn oracle_equivalence() -> Outcome {
    let mut worst = 0.0_f64;
    for nonlinear in [false, true] {
        let mut rng = ChaCha8Rng::seed_from_u64(20_240_917 + nonlinear as u64);
        for _ in 0..1000 {
            let (w, m) = oracle::random_draw(&mut rng, nonlinear);
            let closed = m.amplitudes(w).map_err(|e| e.to_string())?;
            let solved = solve_single_emitter(w, &m).map_err(|e| e.to_string())?;
            let scale = closed.t().norm().max(closed.r().norm());
            worst = worst.max((closed.t() - solved.t).norm().max((closed.r() - solved.r).norm()) / scale);
        }
    }
    within(worst, 1e-10, "closed form vs 4×4 solve, 2×1000 draws")
}

fn chebyshev_vs_power() -> Outcome {
    let mut worst = 0.0_f64;
    let mut compared = 0usize;
    for d in [DispersionModel::linear(), DispersionModel::nonlinear(2.5)] {
        let m = oc(d).lossless();
        for spacing in [0.045, 0.5] {
            let lat = lattice(spacing);
            for w in par::linspace(0.05, 2.0, 2000) {
                let phase = lat.phase(w, &m.emitter, &m.coupling);
                if (phase - (phase / PI).round() * PI).abs() < 1e-4 {
                    continue;
                }
                let s = m.amplitudes(w).map_err(|e| e.to_string())?;
                let cell = emitter_matrix(s.t(), s.r()).map_err(|e| e.to_string())? * free_matrix(phase);
                let mut power = TransferMatrix::IDENTITY;
                for n in 1..=50 {
                    power = power * cell;
                    let by_power = 1.0 / power.m22.norm_sqr();
                    let by_formula = chebyshev_transmission(n, s.t(), s.r(), phase).map_err(|e| e.to_string())?.transmittance;
                    worst = worst.max((by_power - by_formula).abs() / by_power.max(by_formula));
                    compared += 1;
                }
            }
        }
    }
    within(worst, 1e-9, &format!("T_N, N ≤ 50, {compared} comparisons"))
}

fn chain_eit() -> Outcome {
    let mut worst = 0.0_f64;
    for name in ["fig3-N2", "fig3-N5", "fig3-N10"] {
        let cfg = preset(name).unwrap();
        let lat = cfg.lattice_config(cfg.lattice.as_ref().unwrap()).unwrap();
        let (t, _) = chain::chain_spectrum(1.0, &cfg.model(), &lat).map_err(|e| e.to_string())?;
        worst = worst.max((t - 1.0).abs());
    }
    within(worst, 1e-10, "|T_N(ω₂)−1|, N ∈ {2, 5, 10}")
}

fn intersection_count() -> Outcome {
    let m = oc(DispersionModel::linear());
    let grid = par::linspace(0.5, 1.5, 20_001);
    let balance: Vec<f64> = grid.iter().map(|&w| m.amplitudes(w).map(|s| s.transmittance() - s.reflectance()).unwrap()).collect();
    let count = balance.windows(2).filter(|p| p[0] * p[1] < 0.0).count();
    if count == 4 {
        Ok("4 sign changes of T−R in (0.5, 1.5)".into())
    } else {
        Err(format!("{count} sign changes of T−R, expected 4"))
    }
}

fn plateau_detection() -> Outcome {
    let opts = FeatureOptions::default();
    let run = |d| find_spectral_features_with(&oc(d), 0.3, 0.7, 4000, &opts, Execution::available()).map_err(|e| e.to_string());
    let nonlinear = run(DispersionModel::nonlinear(2.5))?;
    let linear = run(DispersionModel::linear())?;
    let Some((a, b)) = plateaus(&nonlinear).find_map(|p| p.extent) else {
        return Err("no plateau for J = 2.5".into());
    };
    if !(0.3 < a && b < 0.7) {
        return Err(format!("plateau [{a}, {b}] leaves (0.3, 0.7)"));
    }
    // Independent slope check across the reported plateau.
    let m = oc(DispersionModel::nonlinear(2.5));
    for w in par::linspace(a, b, 50) {
        let h = 1e-6;
        let slope = (m.transmittance(w + h).unwrap() - m.transmittance(w - h).unwrap()) / (2.0 * h);
        if slope.abs() >= opts.plateau_slope {
            return Err(format!("|dT/dω| = {slope} at ω = {w} inside the plateau"));
        }
    }
    match plateaus(&linear).count() {
        0 => Ok(format!("J=2.5 plateau [{a:.4}, {b:.4}], none for the linear model")),
        n => Err(format!("{n} plateau(s) in the linear model")),
    }
}

fn bloch_trace_identity() -> Outcome {
    let lat = lattice(0.045);
    let mut report = Vec::new();
    let mut worst = 0.0_f64;
    for d in [DispersionModel::linear(), DispersionModel::nonlinear(2.5)] {
        let m = oc(d).lossless();
        let poles = bands::polariton_poles(&m);
        let mut err = 0.0_f64;
        for w in par::linspace(0.5, 2.0, 5000) {
            if poles.iter().any(|p| (w - p).abs() < 1e-6) {
                continue;
            }
            let closed = bands::bloch_cos_closed(w, &m, &lat).map_err(|e| e.to_string())?;
            let half_trace = 0.5 * chain::cell_matrix(w, &m, &lat).map_err(|e| e.to_string())?.trace().re;
            err = err.max((closed - half_trace).abs() / half_trace.abs().max(1.0));
        }
        report.push(format!("{} {err:.2e}", d.label()));
        worst = worst.max(err);
    }
    within(worst, 1e-10, &format!("cos KL vs ½ tr M_B ({})", report.join(", ")))
}

fn gap_narrowing() -> Outcome {
    let lat = lattice(0.045);
    let gap = |d| bands::gap_above_resonance(&oc(d).lossless(), &lat, Execution::available()).map_err(|e| e.to_string());
    let lin = gap(DispersionModel::linear())?;
    let nl = gap(DispersionModel::nonlinear(2.5))?;
    let ratio = nl.width() / lin.width();
    let msg = format!("width ratio {ratio:.4} (linear [{:.4}, {:.4}], J=2.5 [{:.4}, {:.4}])", lin.start, lin.end, nl.start, nl.end);
    if (0.35..=0.65).contains(&ratio) && nl.width() < lin.width() {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn gap_law_fit() -> Outcome {
    let scanner = GapScanner::new(emitter().lossless(), CouplingConfig::symmetric(4.0 * GAMMA2), lattice(0.045)).map_err(|e| e.to_string())?;
    let js = par::geomspace(1.2, 5.0, 20);
    let samples = scanner.samples(&js, Execution::available()).map_err(|e| e.to_string())?;
    let fit = bands::fit_gap_law(&samples).map_err(|e| e.to_string())?;
    let crossing = scanner.crossing(1.0, 2.5, 1e-7).map_err(|e| e.to_string())?;
    let summary = format!("b={:.3} ξ={:.4} crossing J={crossing:.4}", fit.base_b, fit.xi);

    let b_ok = ((fit.base_b - 16.751) / 16.751).abs() <= 0.10;
    let xi_ok = (fit.xi + 0.047).abs() <= 0.01;
    if b_ok && xi_ok && (crossing - 1.141).abs() <= 0.05 {
        return Ok(summary);
    }

    // Fallback: increasing law, crossing within ±0.1, exact synthetic recovery.
    let increasing = samples.windows(2).all(|p| p[1].1 > p[0].1) && fit.slope() > 0.0;
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut recovery = 0.0_f64;
    for _ in 0..20 {
        let (b, xi): (f64, f64) = (rng.random_range(2.0..100.0), rng.random_range(-0.5..0.5));
        let synthetic: Vec<(f64, f64)> = js.iter().map(|&j| (j, j.ln() / b.ln() + xi)).collect();
        let f = bands::fit_gap_law(&synthetic).map_err(|e| e.to_string())?;
        recovery = recovery.max(((f.base_b - b) / b).abs()).max((f.xi - xi).abs());
    }
    let detail = format!(
        "{summary}; primary tolerance missed, FALLBACK: increasing={increasing}, |crossing−1.141|={:.3}, synthetic recovery {recovery:.1e}",
        (crossing - 1.141).abs()
    );
    if increasing && (crossing - 1.141).abs() <= 0.1 && recovery < 1e-6 {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn preset_csv(name: &str, exec: Execution) -> Result<Vec<u8>, String> {
    let cfg = preset(name).unwrap();
    let mut out = Vec::new();
    let res = if cfg.gapfit.is_some() {
        sweep::run_gapfit(&cfg, exec).and_then(|r| r.write_csv(&mut out))
    } else if cfg.bands.is_some() {
        sweep::run_bands(&cfg, exec).and_then(|r| r.write_csv(&mut out))
    } else {
        sweep::run_spectrum(&cfg, exec).and_then(|r| r.write_csv(&mut out))
    };
    res.map_err(|e| format!("{name}: {e}"))?;
    Ok(out)
}

fn determinism() -> Outcome {
    for (name, _) in PRESETS {
        let first = preset_csv(name, Execution::available())?;
        let second = preset_csv(name, Execution::available())?;
        let sequential = preset_csv(name, Execution::Sequential)?;
        if first != second || first != sequential {
            return Err(format!("{name}: CSV differs between runs"));
        }
    }
    Ok(format!("{} presets byte-identical (twice parallel, once sequential)", PRESETS.len()))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 12] = [
        ("EIT exactness", eit_exactness),
        ("dip depth", dip_depth),
        ("lossless unitarity", lossless_unitarity),
        ("oracle equivalence", oracle_equivalence),
        ("Chebyshev vs matrix power", chebyshev_vs_power),
        ("chain EIT persistence", chain_eit),
        ("T/R intersection count", intersection_count),
        ("plateau detection", plateau_detection),
        ("Bloch trace identity", bloch_trace_identity),
        ("gap narrowing", gap_narrowing),
        ("gap-law fit", gap_law_fit),
        ("determinism", determinism),
    ];
    let mut failed = 0;
    for (k, (name, check)) in criteria.iter().enumerate() {
        let (status, detail) = match check() {
            Ok(d) => (if d.contains("FALLBACK") { "PASS (fallback)" } else { "PASS" }, d),
            Err(d) => {
                failed += 1;
                ("FAIL", d)
            }
        };
        println!("criterion {:>2} {name:<26} {status:<15} {detail}", k + 1);
    }
    println!("acceptance: {} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
