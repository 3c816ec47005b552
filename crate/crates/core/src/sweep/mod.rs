//! Parameter sweeps behind the command-line front end.
//!
//! Every runner reads its parameters from a [`Config`], validates them before
//! doing any work, computes sweep points in parallel and returns a [`Table`]
//! whose rows are in sweep order, so the rendered output does not depend on
//! scheduling.

pub mod config;
pub mod table;

use std::f64::consts::PI;

use nalgebra::SymmetricEigen;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde_json::json;
use thiserror::Error;

use crate::circuit::{self, CircuitError, CircuitParams, CouplerDerived, UnitSystem};
use crate::dynamics::{self, AdiabaticRegime, DynamicsError};
use crate::lattice::{self, LatticeError};
use crate::scattering::{self, ScatteringError};

pub use config::{Config, ConfigError};
pub use table::{Cell, OutputFormat, Table};

/// Tolerance on `T + R = 1` for every emitted row.
pub const UNITARITY_TOLERANCE: f64 = 1e-12;
/// Oracle-versus-closed-form tolerance for `scatter-sim`.
pub const ORACLE_TOLERANCE: f64 = 0.02;
/// Periodic spectrum versus dispersion, as multisets.
pub const SPECTRUM_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::Subcommand)]
pub enum Command {
    /// Band energies of the periodic uniform chain, checked against diagonalisation
    Dispersion,
    /// Closed-form T and R over a (lambda, k) grid
    TransmissionSweep,
    /// Wavepacket oracle runs compared with the closed form
    ScatterSim,
    /// Derived coupler quantities over a flux sweep
    CouplerDesign,
    /// Flux -> effective coupling -> lambda -> transmission
    SwitchMap,
    /// Three-mode versus eliminated two-mode dynamics
    ValidateAdiabatic,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Dispersion => "dispersion",
            Command::TransmissionSweep => "transmission-sweep",
            Command::ScatterSim => "scatter-sim",
            Command::CouplerDesign => "coupler-design",
            Command::SwitchMap => "switch-map",
            Command::ValidateAdiabatic => "validate-adiabatic",
        }
    }
}

#[derive(Debug, Error)]
pub enum RunError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Lattice(#[from] LatticeError),
    #[error(transparent)]
    Scattering(#[from] ScatteringError),
    #[error(transparent)]
    Dynamics(#[from] DynamicsError),
    #[error(transparent)]
    Circuit(#[from] CircuitError),
    #[error("{message}")]
    Precondition { message: String },
    /// The run finished but a checked contract failed; the table is still emitted.
    #[error("contract violated: {message}")]
    Contract { message: String, table: Box<Table> },
    #[error("cannot write output: {0}")]
    Io(#[from] std::io::Error),
}

impl RunError {
    /// 2 config, 3 physics precondition, 4 contract violation.
    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::Config(_) | RunError::Io(_) => 2,
            RunError::Lattice(_)
            | RunError::Scattering(_)
            | RunError::Dynamics(_)
            | RunError::Circuit(_)
            | RunError::Precondition { .. } => 3,
            RunError::Contract { .. } => 4,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            RunError::Config(_) => "config",
            RunError::Io(_) => "io",
            RunError::Lattice(_) => "lattice",
            RunError::Scattering(_) => "scattering",
            RunError::Dynamics(_) => "dynamics",
            RunError::Circuit(_) => "circuit",
            RunError::Precondition { .. } => "precondition",
            RunError::Contract { .. } => "contract",
        }
    }

    /// Machine-readable error report.
    pub fn report(&self) -> String {
        json!({
            "error": {
                "kind": self.kind(),
                "message": self.to_string(),
                "exit_code": self.exit_code(),
            }
        })
        .to_string()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct RunOptions {
    pub units: UnitSystem,
    pub seed: u64,
}

/// Runs `command` and rejects config keys it did not read.
pub fn run(command: Command, cfg: &Config, opts: &RunOptions) -> Result<Table, RunError> {
    let table = match command {
        Command::Dispersion => run_dispersion(cfg)?,
        Command::TransmissionSweep => run_transmission_sweep(cfg, opts)?,
        Command::ScatterSim => run_scatter_sim(cfg)?,
        Command::CouplerDesign => run_coupler_design(cfg, opts)?,
        Command::SwitchMap => run_switch_map(cfg, opts)?,
        Command::ValidateAdiabatic => run_validate_adiabatic(cfg, opts)?,
    };
    Ok(table)
}

fn finish(cfg: &Config, table: Table, violation: Option<String>) -> Result<Table, RunError> {
    cfg.ensure_all_used()?;
    match violation {
        Some(message) => Err(RunError::Contract {
            message,
            table: Box::new(table),
        }),
        None => Ok(table),
    }
}

/// `start, start + step, ...` up to `stop` inclusive, computed by index.
pub fn linear_grid(start: f64, stop: f64, step: f64) -> Result<Vec<f64>, ConfigError> {
    if !(step.is_finite() && step > 0.0 && start.is_finite() && stop.is_finite() && stop >= start) {
        return Err(ConfigError::OutOfRange {
            key: "grid".into(),
            message: format!("need start <= stop and step > 0, got {start}..{stop} step {step}"),
        });
    }
    let count = ((stop - start) / step + 1e-9).floor() as usize;
    Ok((0..=count).map(|i| start + i as f64 * step).collect())
}

fn linspace(start: f64, stop: f64, points: usize) -> Vec<f64> {
    match points {
        0 => vec![],
        1 => vec![start],
        _ => (0..points)
            .map(|i| start + (stop - start) * i as f64 / (points - 1) as f64)
            .collect(),
    }
}

pub fn run_dispersion(cfg: &Config) -> Result<Table, RunError> {
    let n = cfg.usize_or("lattice.n_sites", 32)?;
    let omega = cfg.f64_or("lattice.omega", 0.0)?;
    let hopping = cfg.f64_or("lattice.hopping", 1.0)?;
    let band = lattice::diagonalize_periodic(n, omega, hopping)?;

    let mut numeric: Vec<f64> = SymmetricEigen::new(lattice::periodic_hamiltonian(n, omega, hopping))
        .eigenvalues
        .iter()
        .copied()
        .collect();
    numeric.sort_by(f64::total_cmp);
    let mut analytic: Vec<f64> = band.iter().map(|p| p.energy).collect();
    analytic.sort_by(f64::total_cmp);
    let mismatch = numeric
        .iter()
        .zip(&analytic)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);

    let mut table = Table::new("dispersion", &["m", "k", "omega_k", "group_velocity"]);
    for p in &band {
        table.push(vec![
            p.m.into(),
            p.k.into(),
            p.energy.into(),
            lattice::group_velocity(p.k, hopping).into(),
        ]);
    }
    table.summarize("n_sites", n);
    table.summarize("max_eigenvalue_mismatch", mismatch);
    let violation = (mismatch > SPECTRUM_TOLERANCE * (1.0 + omega.abs() + hopping.abs()))
        .then(|| format!("periodic spectrum differs from the dispersion by {mismatch:e}"));
    finish(cfg, table, violation)
}

pub fn run_transmission_sweep(cfg: &Config, opts: &RunOptions) -> Result<Table, RunError> {
    let ks = cfg
        .f64_list("sweep.k")?
        .unwrap_or_else(|| vec![0.01, PI / 8.0, PI / 4.0, PI / 2.0]);
    let lambda_min = cfg.f64_or("sweep.lambda_min", -1.0)?;
    let lambda_max = cfg.f64_or("sweep.lambda_max", 6.0)?;
    let samples = cfg.usize_or("sweep.random_samples", 0)?;

    let points: Vec<(f64, f64)> = if samples > 0 {
        // the grid keys do not apply to random sampling
        if cfg.contains("sweep.lambda") || cfg.contains("sweep.lambda_step") || cfg.contains("sweep.k") {
            return Err(ConfigError::OutOfRange {
                key: "sweep.random_samples".into(),
                message: "cannot be combined with sweep.lambda, sweep.lambda_step or sweep.k".into(),
            }
            .into());
        }
        let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
        (0..samples)
            .map(|_| (rng.gen_range(lambda_min..=lambda_max), rng.gen_range(-PI..PI)))
            .collect()
    } else {
        let lambdas = match cfg.f64_list("sweep.lambda")? {
            Some(l) => l,
            None => linear_grid(lambda_min, lambda_max, cfg.f64_or("sweep.lambda_step", 0.01)?)?,
        };
        ks.iter()
            .flat_map(|&k| lambdas.iter().map(move |&l| (l, k)))
            .collect()
    };

    let rows: Vec<(f64, f64, f64, f64)> = points
        .par_iter()
        .map(|&(lambda, k)| {
            let t = scattering::transmission(lambda, k)?;
            Ok((lambda, k, t, 1.0 - t))
        })
        .collect::<Result<_, ScatteringError>>()?;

    let mut table = Table::new("transmission-sweep", &["lambda", "k", "T", "R"]);
    let mut worst = 0.0f64;
    for &(lambda, k, t, r) in &rows {
        worst = worst.max((t + r - 1.0).abs());
        table.push(vec![lambda.into(), k.into(), t.into(), r.into()]);
    }
    table.summarize("rows", rows.len());
    table.summarize("max_unitarity_error", worst);
    if samples > 0 {
        table.summarize("seed", opts.seed as i64);
    }
    let violation = (worst > UNITARITY_TOLERANCE).then(|| format!("T + R deviates from 1 by {worst:e}"));
    finish(cfg, table, violation)
}

pub fn run_scatter_sim(cfg: &Config) -> Result<Table, RunError> {
    let n_sites = cfg.usize_or("lattice.n_sites", 401)?;
    let width = cfg.f64_or("wavepacket.sigma_x", 20.0)?;
    let lambdas = cfg
        .f64_list("scatter.lambda")?
        .unwrap_or_else(|| vec![-1.0, -0.75, -0.5, 0.0, 0.5, 1.0, 2.0]);
    let k0s = cfg
        .f64_list("scatter.k0")?
        .unwrap_or_else(|| vec![PI / 8.0, PI / 4.0, PI / 2.0]);
    let tolerance = cfg.f64_or("scatter.tolerance", ORACLE_TOLERANCE)?;
    cfg.ensure_all_used()?;

    let points: Vec<(f64, f64)> = lambdas
        .iter()
        .flat_map(|&l| k0s.iter().map(move |&k| (l, k)))
        .collect();
    let results: Vec<dynamics::OracleComparison> = points
        .par_iter()
        .map(|&(lambda, k0)| dynamics::compare_with_closed_form(n_sites, lambda, k0, width))
        .collect::<Result<_, _>>()?;

    let mut table = Table::new(
        "scatter-sim",
        &["lambda", "k0", "T_analytic", "T_measured", "abs_error", "N", "sigma_x", "norm_drift"],
    );
    let mut max_error = 0.0f64;
    let mut max_drift = 0.0f64;
    for r in &results {
        max_error = max_error.max(r.abs_error);
        max_drift = max_drift.max(r.norm_drift);
        table.push(vec![
            r.lambda.into(),
            r.k0.into(),
            r.analytic.into(),
            r.measured.into(),
            r.abs_error.into(),
            r.n_sites.into(),
            r.width.into(),
            r.norm_drift.into(),
        ]);
    }
    table.summarize("max_abs_error", max_error);
    table.summarize("max_norm_drift", max_drift);
    table.summarize("tolerance", tolerance);
    table.summarize("pass", max_error <= tolerance);
    let violation = (max_error > tolerance)
        .then(|| format!("oracle differs from the closed form by {max_error:.4} > {tolerance}"));
    finish(cfg, table, violation)
}

/// Circuit parameters from `circuit.*`; energies are read in `units`.
pub fn circuit_params(cfg: &Config, units: UnitSystem) -> Result<CircuitParams, ConfigError> {
    let mut p = CircuitParams::reference(units);
    p.tlr_frequency = cfg.f64_or("circuit.omega", p.tlr_frequency)?;
    p.tlr_capacitance = cfg.f64_or("circuit.c0d", p.tlr_capacitance)?;
    p.coupling_capacitance_left = cfg.f64_or("circuit.c_l", p.coupling_capacitance_left)?;
    p.coupling_capacitance_right = cfg.f64_or("circuit.c_r", p.coupling_capacitance_right)?;
    p.junction_capacitance = cfg.f64("circuit.c_j")?;
    p.charging_energy = match cfg.f64("circuit.e_c")? {
        Some(e_c) => Some(e_c),
        // a junction capacitance without an explicit E_C means "compute it"
        None if p.junction_capacitance.is_some() => None,
        None => p.charging_energy,
    };
    let e_j0 = cfg.f64("circuit.e_j0")?;
    let ratio = cfg.f64("circuit.e_j0_over_e_c")?;
    p.josephson_energy_scale = match (e_j0, ratio) {
        (Some(_), Some(_)) => {
            return Err(ConfigError::OutOfRange {
                key: "circuit.e_j0".into(),
                message: "give either circuit.e_j0 or circuit.e_j0_over_e_c, not both".into(),
            })
        }
        (Some(e), None) => e,
        (None, r) => {
            let e_c = p.charging_energy().map_err(|e| ConfigError::OutOfRange {
                key: "circuit".into(),
                message: e.to_string(),
            })?;
            r.unwrap_or(1.0e3) * e_c
        }
    };
    Ok(p)
}

/// Flux points from `flux.f`, `flux.cos`, or a linear `cos(pi f)` range.
fn flux_points(cfg: &Config, default_cos: Vec<f64>) -> Result<Vec<f64>, ConfigError> {
    let explicit_f = cfg.f64_list("flux.f")?;
    let explicit_cos = cfg.f64_list("flux.cos")?;
    let range = (
        cfg.f64("flux.cos_min")?,
        cfg.f64("flux.cos_max")?,
        cfg.usize("flux.points")?,
    );
    let to_f = |c: f64| -> Result<f64, ConfigError> {
        if !(-1.0..=1.0).contains(&c) {
            return Err(ConfigError::OutOfRange {
                key: "flux.cos".into(),
                message: format!("cos(pi f) = {c} outside [-1, 1]"),
            });
        }
        Ok(c.acos() / PI)
    };
    match (explicit_f, explicit_cos, range) {
        (Some(f), None, (None, None, None)) => Ok(f),
        (None, Some(c), (None, None, None)) => c.into_iter().map(to_f).collect(),
        (None, None, (None, None, None)) => default_cos.into_iter().map(to_f).collect(),
        (None, None, (lo, hi, n)) => linspace(lo.unwrap_or(0.02), hi.unwrap_or(1.0), n.unwrap_or(50))
            .into_iter()
            .map(to_f)
            .collect(),
        _ => Err(ConfigError::OutOfRange {
            key: "flux".into(),
            message: "use only one of flux.f, flux.cos, or flux.cos_min/cos_max/points".into(),
        }),
    }
}

const COUPLER_COLUMNS: &[&str] = &[
    "f",
    "cos_pi_f",
    "E_C",
    "E_J",
    "omega_b",
    "omega_l",
    "omega_r",
    "omega_b_prime",
    "g_l",
    "g_r",
    "delta_l",
    "delta_r",
    "omega_l_prime",
    "omega_r_prime",
    "g",
    "g_over_2pi",
    "omega_b_doubleprime",
    "harmonic_regime_ok",
    "dispersive_regime_ok",
    "negative_detuning",
];

fn coupler_row(d: &CouplerDerived) -> Vec<Cell> {
    vec![
        d.flux_ratio.into(),
        (PI * d.flux_ratio).cos().into(),
        d.charging_energy.into(),
        d.josephson_energy.into(),
        d.omega_b.into(),
        d.omega_l.into(),
        d.omega_r.into(),
        d.omega_b_prime.into(),
        d.g_l.into(),
        d.g_r.into(),
        d.delta_l.into(),
        d.delta_r.into(),
        d.omega_l_prime.into(),
        d.omega_r_prime.into(),
        d.g_eff.into(),
        (d.g_eff / (2.0 * PI)).into(),
        d.omega_b_doubleprime.into(),
        d.flags.harmonic_regime_ok.into(),
        d.flags.dispersive_regime_ok.into(),
        d.flags.negative_detuning.into(),
    ]
}

pub fn run_coupler_design(cfg: &Config, opts: &RunOptions) -> Result<Table, RunError> {
    let params = circuit_params(cfg, opts.units)?;
    params.validate()?;
    let fluxes = flux_points(cfg, linspace(0.02, 1.0, 50))?;
    cfg.ensure_all_used()?;
    let derived: Vec<CouplerDerived> = fluxes
        .par_iter()
        .map(|&f| circuit::derive(&params.with_flux_ratio(f)))
        .collect::<Result<_, _>>()?;

    let mut table = Table::new("coupler-design", COUPLER_COLUMNS);
    for d in &derived {
        table.push(coupler_row(d));
    }
    let g_abs = derived.iter().map(|d| d.g_eff.abs());
    let g_min = g_abs.clone().fold(f64::INFINITY, f64::min);
    let g_max = g_abs.fold(0.0, f64::max);
    table.summarize("g_min", g_min);
    table.summarize("g_max", g_max);
    table.summarize("g_min_over_2pi", g_min / (2.0 * PI));
    table.summarize("g_max_over_2pi", g_max / (2.0 * PI));
    table.summarize("direct_coupling_ratio", circuit::direct_coupling_ratio(&params));
    table.summarize(
        "units",
        match opts.units {
            UnitSystem::Paper => "paper",
            UnitSystem::Si => "si",
        },
    );
    finish(cfg, table, None)
}

pub fn run_switch_map(cfg: &Config, opts: &RunOptions) -> Result<Table, RunError> {
    let params = circuit_params(cfg, opts.units)?;
    params.validate()?;
    let ks = cfg.f64_list("switch.k")?.unwrap_or_else(|| vec![PI / 4.0, PI / 2.0]);
    let hopping = match (cfg.f64("switch.hopping")?, cfg.f64("switch.match_cos_flux")?) {
        (Some(_), Some(_)) => {
            return Err(ConfigError::OutOfRange {
                key: "switch.hopping".into(),
                message: "give either switch.hopping or switch.match_cos_flux".into(),
            }
            .into())
        }
        (Some(t), None) => t,
        (None, c) => circuit::derive(&params.with_cos_flux(c.unwrap_or(0.5)))?.g_eff.abs(),
    };
    let fluxes = flux_points(
        cfg,
        vec![1.0, 0.8, 0.6, 0.5, 0.4, 0.3, 0.2, 0.1, 0.05, 0.03, 0.02, 0.01, 1e-3, 1e-4, 1e-6],
    )?;
    cfg.ensure_all_used()?;

    let settings: Vec<circuit::SwitchSetting> = fluxes
        .par_iter()
        .map(|&f| circuit::flux_to_lambda(&params.with_flux_ratio(f), hopping))
        .collect::<Result<_, _>>()?;

    let mut table = Table::new(
        "switch-map",
        &[
            "f",
            "g",
            "lambda",
            "k",
            "T",
            "harmonic_regime_ok",
            "dispersive_regime_ok",
            "negative_detuning",
        ],
    );
    for s in &settings {
        for &k in &ks {
            let t = scattering::transmission(s.lambda, k)?;
            table.push(vec![
                s.flux_ratio.into(),
                s.g.into(),
                s.lambda.into(),
                k.into(),
                t.into(),
                s.flags.harmonic_regime_ok.into(),
                s.flags.dispersive_regime_ok.into(),
                s.flags.negative_detuning.into(),
            ]);
        }
    }
    table.summarize("hopping", hopping);
    finish(cfg, table, None)
}

pub fn run_validate_adiabatic(cfg: &Config, opts: &RunOptions) -> Result<Table, RunError> {
    let source = cfg.string("adiabatic.source").unwrap_or_else(|| "symmetric".into());
    struct Case {
        label: f64,
        model: circuit::ThreeModeModel,
    }
    let cases: Vec<Case> = match source.as_str() {
        "symmetric" => {
            let g_prime = cfg.f64_or("adiabatic.g_prime", 1.0)?;
            let omega = cfg.f64_or("adiabatic.omega", 0.0)?;
            let ratios = cfg
                .f64_list("adiabatic.ratios")?
                .unwrap_or_else(|| vec![10.0, 20.0, 40.0]);
            ratios
                .into_iter()
                .map(|r| Case {
                    label: r,
                    model: dynamics::symmetric_three_mode(omega, g_prime, r * g_prime),
                })
                .collect()
        }
        "circuit" => {
            let params = circuit_params(cfg, opts.units)?;
            params.validate()?;
            let fluxes = flux_points(cfg, vec![1.0])?;
            fluxes
                .into_iter()
                .map(|f| {
                    let d = circuit::derive(&params.with_flux_ratio(f))?;
                    // rotating frame at omega_l; populations are unchanged
                    let mut model = d.three_mode();
                    model.omega_r -= model.omega_l;
                    model.omega_b -= model.omega_l;
                    model.omega_l = 0.0;
                    Ok(Case { label: f, model })
                })
                .collect::<Result<_, CircuitError>>()?
        }
        other => {
            return Err(ConfigError::Invalid {
                key: "adiabatic.source".into(),
                value: other.into(),
                expected: "`symmetric` or `circuit`",
            }
            .into())
        }
    };
    let periods = cfg.f64_or("adiabatic.periods", 1.5)?;
    let samples_per_fast_period = cfg.f64_or("adiabatic.samples_per_fast_period", 20.0)?;
    let max_samples = cfg.usize_or("adiabatic.max_samples", 2_000_000)?;
    cfg.ensure_all_used()?;

    let reports: Vec<(f64, f64, dynamics::AdiabaticReport)> = cases
        .par_iter()
        .map(|case| {
            let m = &case.model;
            let (delta_l, delta_r) = m.detunings();
            let g = circuit::effective_coupling(m.g_l, m.g_r, delta_l, delta_r).unwrap_or(0.0);
            let fast = delta_l.abs().max(delta_r.abs()).max(m.g_l.abs()).max(m.g_r.abs());
            // enough time for `periods` full effective Rabi cycles
            let slow = if g != 0.0 { 2.0 * PI / (2.0 * g.abs()) } else { 2.0 * PI / fast };
            let duration = periods * slow;
            let step = (2.0 * PI / fast / samples_per_fast_period).max(duration / max_samples as f64);
            let report = dynamics::validate_adiabatic_elimination(m, duration, step)?;
            Ok((case.label, g, report))
        })
        .collect::<Result<_, DynamicsError>>()?;

    let label = if source == "circuit" { "f" } else { "ratio" };
    let columns = [
        label,
        "g_l",
        "g_r",
        "delta_l",
        "delta_r",
        "g_eff",
        "transfer_time_expected",
        "transfer_time_full",
        "transfer_time_effective",
        "relative_difference",
        "max_coupler_population",
        "coupler_population_bound",
        "regime",
        "contract_ok",
    ];
    let mut table = Table::new("validate-adiabatic", &columns);
    let mut violations = Vec::new();
    let mut invalid = Vec::new();
    for ((label, g, r), case) in reports.iter().zip(&cases) {
        let (delta_l, delta_r) = case.model.detunings();
        let regime = match r.regime {
            AdiabaticRegime::Valid => "valid",
            AdiabaticRegime::Marginal => "marginal",
            AdiabaticRegime::Invalid => "invalid",
        };
        if r.contract_ok == Some(false) {
            violations.push(format!("{label}"));
        }
        if r.regime == AdiabaticRegime::Invalid {
            invalid.push(format!("{label}"));
        }
        let expected = if *g != 0.0 { PI / (2.0 * g.abs()) } else { f64::INFINITY };
        table.push(vec![
            (*label).into(),
            case.model.g_l.into(),
            case.model.g_r.into(),
            delta_l.into(),
            delta_r.into(),
            (*g).into(),
            expected.into(),
            r.transfer_time_full.into(),
            r.transfer_time_effective.into(),
            r.transfer_time_relative_difference.into(),
            r.max_coupler_population.into(),
            r.coupler_population_bound.into(),
            regime.into(),
            match r.contract_ok {
                Some(ok) => Cell::Bool(ok),
                None => Cell::Text("n/a".into()),
            },
        ]);
    }
    if !invalid.is_empty() {
        return Err(RunError::Precondition {
            message: format!(
                "detuning does not exceed the coupling (Delta_j <= |g_j|) at {label} = {}",
                invalid.join(", ")
            ),
        });
    }
    let violation = (!violations.is_empty())
        .then(|| format!("adiabatic elimination contract failed at {label} = {}", violations.join(", ")));
    finish(cfg, table, violation)
}
