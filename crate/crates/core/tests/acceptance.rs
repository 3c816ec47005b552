//! Acceptance run: one line per criterion, nonzero exit if any fails.
//!
//! `cargo test --test acceptance` (or plain `cargo test`).

use std::f64::consts::PI;
use std::process::{Command, ExitCode};
use std::time::Instant;

use photon_switch::circuit::{self, CircuitParams, UnitSystem};
use photon_switch::dynamics;
use photon_switch::scattering::{self, scattering_amplitudes, transmission, verify_ansatz_residual};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        passed,
        detail: detail.into(),
    }
}

fn closed_form_special_cases() -> Outcome {
    let mut failures = Vec::new();
    for k in [PI / 8.0, PI / 4.0, PI / 2.0] {
        let t = transmission(0.0, k).unwrap();
        if t != 1.0 {
            failures.push(format!("T(0,{k:.4})={t:e}"));
        }
    }
    for k in [0.01, PI / 8.0, PI / 4.0, PI / 2.0, 3.0 * PI / 4.0, 3.1] {
        let t = transmission(-1.0, k).unwrap();
        if t != 0.0 {
            failures.push(format!("T(-1,{k:.4})={t:e}"));
        }
    }
    let strong = transmission(1e6, PI / 2.0).unwrap();
    if !(strong < 1e-10) {
        failures.push(format!("T(1e6,pi/2)={strong:e}"));
    }
    let edge = transmission(0.5, 1e-4).unwrap();
    if !(edge < 1e-6) {
        failures.push(format!("T(0.5,1e-4)={edge:e}"));
    }
    let detail = if failures.is_empty() {
        format!("T(1e6,pi/2)={strong:.2e}, T(0.5,1e-4)={edge:.2e}")
    } else {
        failures.join("; ")
    };
    outcome(failures.is_empty(), detail)
}

fn symmetry_suite() -> Outcome {
    const TOL: f64 = 1e-12;
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut worst = [0.0f64; 4];
    for _ in 0..1000 {
        let lambda = rng.gen_range(-0.95..8.0);
        let k = rng.gen_range(0.001..(PI - 0.001));
        let t = transmission(lambda, k).unwrap();
        worst[0] = worst[0].max((t - transmission(lambda, -k).unwrap()).abs());
        let q = k / 2.0;
        worst[1] = worst[1]
            .max((transmission(lambda, PI / 2.0 - q).unwrap() - transmission(lambda, PI / 2.0 + q).unwrap()).abs());
        let (r, s) = scattering_amplitudes(lambda, k, 7).unwrap();
        worst[2] = worst[2].max((r.norm_sqr() + s.norm_sqr() - 1.0).abs());
        let dual = -lambda / (1.0 + lambda);
        worst[3] = worst[3].max((t - transmission(dual, k).unwrap()).abs());
    }
    let passed = worst.iter().all(|&w| w <= TOL);
    outcome(
        passed,
        format!(
            "max |dT| k->-k {:.1e}, mirror {:.1e}, |r|^2+|s|^2-1 {:.1e}, duality {:.1e}",
            worst[0], worst[1], worst[2], worst[3]
        ),
    )
}

fn ansatz_residual() -> Outcome {
    let lambdas = [-1.0, -0.75, -0.5, 0.0, 0.5, 1.0, 3.0];
    let ks = [PI / 8.0, PI / 4.0, PI / 2.0, 2.0 * PI / 3.0, 7.0 * PI / 8.0];
    let mut worst = 0.0f64;
    for &lambda in &lambdas {
        for &k in &ks {
            match verify_ansatz_residual(lambda, k, 10, 30) {
                Ok(r) => worst = worst.max(r),
                Err(e) => return outcome(false, format!("({lambda},{k}): {e}")),
            }
        }
    }
    outcome(worst < 1e-10, format!("max residual {worst:.2e} over 7x5 grid"))
}

fn oracle_equivalence() -> Outcome {
    let lambdas = [-1.0, -0.75, -0.5, 0.0, 0.5, 1.0, 2.0];
    let ks = [PI / 8.0, PI / 4.0, PI / 2.0];
    let grid: Vec<(f64, f64)> = lambdas.iter().flat_map(|&l| ks.iter().map(move |&k| (l, k))).collect();
    let runs: Vec<_> = grid
        .par_iter()
        .map(|&(l, k)| dynamics::compare_with_closed_form(401, l, k, 20.0))
        .collect();
    let mut worst_error = 0.0f64;
    let mut worst_drift = 0.0f64;
    for (run, (l, k)) in runs.into_iter().zip(&grid) {
        match run {
            Ok(c) => {
                worst_error = worst_error.max(c.abs_error);
                worst_drift = worst_drift.max(c.norm_drift);
            }
            Err(e) => return outcome(false, format!("lambda={l}, k0={k:.4}: {e}")),
        }
    }
    outcome(
        worst_error <= 0.02 && worst_drift < 1e-10,
        format!("max |T_packet - T| {worst_error:.2e}, max norm drift {worst_drift:.1e} over 21 runs"),
    )
}

fn circuit_numbers() -> Outcome {
    let params = CircuitParams::reference(UnitSystem::Paper);
    let at_one = match circuit::derive(&params.with_cos_flux(1.0)) {
        Ok(d) => d,
        Err(e) => return outcome(false, e.to_string()),
    };
    let target = 2.0 * PI * 22.14e9;
    let omega_err = (at_one.omega_b - target).abs() / target;
    let mut gs = Vec::new();
    for i in 0..=98 {
        let c = 0.02 + (1.0 - 0.02) * i as f64 / 98.0;
        match circuit::derive(&params.with_cos_flux(c)) {
            Ok(d) => gs.push(d.g_eff.abs()),
            Err(e) => return outcome(false, format!("cos={c}: {e}")),
        }
    }
    let g_min = gs.iter().cloned().fold(f64::INFINITY, f64::min);
    let g_max = gs.iter().cloned().fold(0.0, f64::max);
    let within = |v: f64, r: f64| (v - r).abs() <= 0.5 * r;
    let passed = omega_err < 5e-3 && within(g_min, 1.1e6) && within(g_max, 23e6);
    outcome(
        passed,
        format!(
            "omega_b/2pi {:.4} GHz (err {:.2e}), g in [{:.3e}, {:.3e}]",
            at_one.omega_b / (2.0 * PI) / 1e9,
            omega_err,
            g_min,
            g_max
        ),
    )
}

fn adiabatic_elimination() -> Outcome {
    let g_prime = 1.0;
    let mut errors = Vec::new();
    let mut notes = Vec::new();
    for ratio in [10.0, 20.0, 40.0] {
        let delta = ratio * g_prime;
        let model = dynamics::symmetric_three_mode(0.0, g_prime, delta);
        let g = g_prime * g_prime / delta;
        let expected = PI / (2.0 * g);
        let duration = 1.5 * PI / g;
        let step = 2.0 * PI / delta / 20.0;
        let report = match dynamics::validate_adiabatic_elimination(&model, duration, step) {
            Ok(r) => r,
            Err(e) => return outcome(false, format!("ratio {ratio}: {e}")),
        };
        let Some(t_full) = report.transfer_time_full else {
            return outcome(false, format!("ratio {ratio}: no transfer observed"));
        };
        let err = (t_full - expected).abs() / expected;
        let bound = 1.5 * 4.0 * (g_prime / delta).powi(2);
        if report.max_coupler_population > bound {
            return outcome(
                false,
                format!("ratio {ratio}: coupler population {:.3e} > {bound:.3e}", report.max_coupler_population),
            );
        }
        notes.push(format!("{ratio}:{:.2}%", 100.0 * err));
        errors.push(err);
    }
    let within = errors.iter().all(|&e| e <= 0.05);
    let decreasing = errors.windows(2).all(|w| w[1] < w[0]);
    outcome(
        within && decreasing,
        format!("transfer-time error {} (decreasing: {decreasing})", notes.join(", ")),
    )
}

fn switch_map_end_to_end() -> Outcome {
    let params = CircuitParams::reference(UnitSystem::Paper);
    let k = PI / 4.0;
    let matched = params.with_cos_flux(0.5);
    let t_hop = circuit::derive(&matched).unwrap().g_eff.abs();
    let on = circuit::flux_to_lambda(&matched, t_hop).unwrap();
    let t_on = transmission(on.lambda, k).unwrap();
    let mut failures = Vec::new();
    if on.lambda != 0.0 || t_on != 1.0 {
        failures.push(format!("matched flux gives lambda={:e}, T={t_on:e}", on.lambda));
    }
    let mut worst_off = 0.0f64;
    let mut off_points = 0;
    for cos in [1e-3, 1e-4, 1e-5, 1e-6, 1e-7] {
        let s = circuit::flux_to_lambda(&params.with_cos_flux(cos), t_hop).unwrap();
        if s.g.abs() < 0.02 * t_hop {
            off_points += 1;
            worst_off = worst_off.max(scattering::transmission(s.lambda, k).unwrap());
        }
    }
    if off_points == 0 {
        failures.push("no flux point reached g < 0.02 t".into());
    } else if !(worst_off < 1e-3) {
        failures.push(format!("off-state T={worst_off:e}"));
    }

    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("switch.cfg");
    std::fs::write(&cfg, "switch.k = pi/8, pi/4, pi/2\nswitch.match_cos_flux = 0.5\n").unwrap();
    let run = || {
        Command::new(env!("CARGO_BIN_EXE_photon-switch"))
            .args(["switch-map", "--config"])
            .arg(&cfg)
            .output()
            .expect("binary runs")
    };
    let first = run();
    let second = run();
    if !first.status.success() {
        failures.push(format!("switch-map exited with {:?}", first.status.code()));
    }
    if first.stdout.is_empty() || first.stdout != second.stdout {
        failures.push("CSV differs between runs".into());
    }
    let detail = if failures.is_empty() {
        format!(
            "on: T={t_on}, off: max T {worst_off:.2e} over {off_points} points, CSV {} bytes identical",
            first.stdout.len()
        )
    } else {
        failures.join("; ")
    };
    outcome(failures.is_empty(), detail)
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 7] = [
        ("closed-form special cases", closed_form_special_cases),
        ("symmetry suite", symmetry_suite),
        ("ansatz residual", ansatz_residual),
        ("wavepacket oracle", oracle_equivalence),
        ("circuit numbers", circuit_numbers),
        ("adiabatic elimination", adiabatic_elimination),
        ("end-to-end switch map", switch_map_end_to_end),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let result = check();
        let status = if result.passed { "PASS" } else { "FAIL" };
        println!(
            "criterion {} [{status}] {name}: {} ({:.2?})",
            i + 1,
            result.detail,
            start.elapsed()
        );
        if !result.passed {
            failed += 1;
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
