//! Circuit model of the tunable coupler: two transmission-line resonators
//! capacitively coupled to a flux-biased Cooper pair box operated as a
//! harmonic mode.
//!
//! Derived frequencies and couplings are always angular frequencies (rad/s).
//! Energies on input are read according to [`UnitSystem`]:
//!
//! * `Paper`: energies are angular frequencies with `hbar = 1`
//!   (e.g. `E_C = 2 pi * 0.35e9`). The flux quantum enters as
//!   `Phi_0 / 2 pi = hbar / 2e`, so only `e` and `hbar` appear.
//! * `Si`: energies are in joules. `Phi_0` is taken from CODATA and `hbar` is
//!   restored explicitly where an energy is turned into a frequency.
//!
//! The two evaluations share no code below [`derive`], so agreement between
//! them checks the placement of `hbar`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub mod constants {
    /// Elementary charge, C (exact).
    pub const ELEMENTARY_CHARGE: f64 = 1.602_176_634e-19;
    /// Planck constant, J s (exact).
    pub const PLANCK: f64 = 6.626_070_15e-34;
    /// Reduced Planck constant, J s.
    pub const HBAR: f64 = PLANCK / (2.0 * std::f64::consts::PI);
    /// Magnetic flux quantum `h / 2e`, Wb (CODATA, 10 digits).
    pub const FLUX_QUANTUM: f64 = 2.067_833_848e-15;
}

use constants::{ELEMENTARY_CHARGE as E_CHARGE, FLUX_QUANTUM, HBAR};

/// Energy ratio `E_J / E_C` at or above which the CPB is treated as harmonic.
pub const HARMONIC_RATIO_THRESHOLD: f64 = 100.0;
/// Required `Delta_j / |g_j|` for the dispersive regime.
pub const DISPERSIVE_RATIO_THRESHOLD: f64 = 5.0;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CircuitError {
    #[error("{name} must be positive and finite, got {value}")]
    NonPositive { name: &'static str, value: f64 },
    #[error("{name} must be finite, got {value}")]
    NonFinite { name: &'static str, value: f64 },
    #[error("either a charging energy or a junction capacitance is required")]
    MissingChargingEnergy,
    #[error("effective Josephson energy {0} is not positive; the CPB has no harmonic mode")]
    NonPositiveJosephson(f64),
    #[error("zero detuning between coupler and resonator {0}")]
    ZeroDetuning(&'static str),
}

fn positive(name: &'static str, value: f64) -> Result<f64, CircuitError> {
    if value.is_finite() && value > 0.0 {
        Ok(value)
    } else {
        Err(CircuitError::NonPositive { name, value })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum UnitSystem {
    /// Energies given as angular frequencies, `hbar = 1`.
    #[default]
    Paper,
    /// Energies given in joules.
    Si,
}

impl UnitSystem {
    /// Converts an energy in this unit system to an angular frequency.
    pub fn to_angular(self, energy: f64) -> f64 {
        match self {
            UnitSystem::Paper => energy,
            UnitSystem::Si => energy / HBAR,
        }
    }

    /// Converts an angular frequency to an energy in this unit system.
    pub fn from_angular(self, omega: f64) -> f64 {
        match self {
            UnitSystem::Paper => omega,
            UnitSystem::Si => omega * HBAR,
        }
    }
}

/// Raw device inputs. Capacitances are in farads in both unit systems.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CircuitParams {
    pub units: UnitSystem,
    /// Bare resonator frequency `omega`, rad/s.
    pub tlr_frequency: f64,
    /// Total resonator capacitance `C_0 d`.
    pub tlr_capacitance: f64,
    pub coupling_capacitance_left: f64,
    pub coupling_capacitance_right: f64,
    pub junction_capacitance: Option<f64>,
    /// `E_J^(0)` of each junction.
    pub josephson_energy_scale: f64,
    /// `Phi_x / Phi_0`.
    pub flux_ratio: f64,
    /// Overrides the charging energy computed from the capacitances.
    pub charging_energy: Option<f64>,
}

impl CircuitParams {
    /// Reference device: `omega = 2 pi 3 GHz`, `C_l = C_r = 6 fF`,
    /// `C_0 d = 1.6 pF`, `E_C = 2 pi 0.35 GHz`, `E_J^(0) = 1000 E_C`, zero flux.
    pub fn reference(units: UnitSystem) -> Self {
        let e_c = units.from_angular(2.0 * PI * 0.35e9);
        Self {
            units,
            tlr_frequency: 2.0 * PI * 3.0e9,
            tlr_capacitance: 1.6e-12,
            coupling_capacitance_left: 6.0e-15,
            coupling_capacitance_right: 6.0e-15,
            junction_capacitance: None,
            josephson_energy_scale: 1.0e3 * e_c,
            flux_ratio: 0.0,
            charging_energy: Some(e_c),
        }
    }

    pub fn with_flux_ratio(mut self, flux_ratio: f64) -> Self {
        self.flux_ratio = flux_ratio;
        self
    }

    /// Sets the flux so that `cos(pi Phi_x / Phi_0)` equals `cos_flux`.
    pub fn with_cos_flux(self, cos_flux: f64) -> Self {
        self.with_flux_ratio(cos_flux.clamp(-1.0, 1.0).acos() / PI)
    }

    pub fn cos_flux(&self) -> f64 {
        (PI * self.flux_ratio).cos()
    }

    pub fn validate(&self) -> Result<(), CircuitError> {
        positive("tlr_frequency", self.tlr_frequency)?;
        positive("tlr_capacitance", self.tlr_capacitance)?;
        positive("coupling_capacitance_left", self.coupling_capacitance_left)?;
        positive("coupling_capacitance_right", self.coupling_capacitance_right)?;
        positive("josephson_energy_scale", self.josephson_energy_scale)?;
        if let Some(c_j) = self.junction_capacitance {
            positive("junction_capacitance", c_j)?;
        }
        if let Some(e_c) = self.charging_energy {
            positive("charging_energy", e_c)?;
        }
        if self.charging_energy.is_none() && self.junction_capacitance.is_none() {
            return Err(CircuitError::MissingChargingEnergy);
        }
        if !self.flux_ratio.is_finite() {
            return Err(CircuitError::NonFinite {
                name: "flux_ratio",
                value: self.flux_ratio,
            });
        }
        Ok(())
    }

    /// Charging energy in this parameter set's unit system.
    pub fn charging_energy(&self) -> Result<f64, CircuitError> {
        match (self.charging_energy, self.junction_capacitance) {
            (Some(e_c), _) => positive("charging_energy", e_c),
            (None, Some(c_j)) => charging_energy(
                self.coupling_capacitance_left,
                self.coupling_capacitance_right,
                c_j,
                self.units,
            ),
            (None, None) => Err(CircuitError::MissingChargingEnergy),
        }
    }
}

/// `E_C = 2 e^2 / (C_l + C_r + 2 C_J)` in the requested unit system.
pub fn charging_energy(c_l: f64, c_r: f64, c_j: f64, units: UnitSystem) -> Result<f64, CircuitError> {
    positive("C_l", c_l)?;
    positive("C_r", c_r)?;
    positive("C_J", c_j)?;
    let joules = 2.0 * E_CHARGE * E_CHARGE / (c_l + c_r + 2.0 * c_j);
    Ok(match units {
        UnitSystem::Si => joules,
        UnitSystem::Paper => joules / HBAR,
    })
}

/// `E_J(Phi_x) = 2 E_J^(0) cos(pi Phi_x / Phi_0)`. Negative past half a flux quantum.
pub fn josephson_energy(josephson_energy_scale: f64, flux_ratio: f64) -> f64 {
    let c = (PI * flux_ratio).cos();
    // cos(pi/2) rounds to 6e-17; half flux must give exactly zero
    let c = if c.abs() < 4.0 * f64::EPSILON { 0.0 } else { c };
    2.0 * josephson_energy_scale * c
}

/// Harmonic CPB frequency `sqrt(2 E_C E_J) / hbar`, rad/s.
pub fn cpb_frequency(charging_energy: f64, josephson_energy: f64, units: UnitSystem) -> Result<f64, CircuitError> {
    positive("charging_energy", charging_energy)?;
    if !(josephson_energy.is_finite() && josephson_energy > 0.0) {
        return Err(CircuitError::NonPositiveJosephson(josephson_energy));
    }
    let root = (2.0 * charging_energy * josephson_energy).sqrt();
    Ok(units.to_angular(root))
}

/// Renormalised resonator frequencies `omega_j = omega (1 + C_j / (d C_0))`
/// and the shifted coupler frequency
/// `omega_b' = omega_b + (C_l + C_r) omega_b^2 (Phi_0/2pi)^2 sqrt(E_C / 2E_J) / hbar`.
///
/// `charging_energy` and `josephson_energy` are in `params.units`.
pub fn renormalized_frequencies(
    params: &CircuitParams,
    omega_b: f64,
    charging_energy: f64,
    josephson_energy: f64,
) -> (f64, f64, f64) {
    let omega = params.tlr_frequency;
    let c0d = params.tlr_capacitance;
    let (c_l, c_r) = (params.coupling_capacitance_left, params.coupling_capacitance_right);
    let omega_l = omega * (1.0 + c_l / c0d);
    let omega_r = omega * (1.0 + c_r / c0d);
    let phase_spread = (charging_energy / (2.0 * josephson_energy)).sqrt();
    let shift = match params.units {
        UnitSystem::Si => {
            let phi = FLUX_QUANTUM / (2.0 * PI);
            (c_l + c_r) * omega_b * omega_b * phi * phi * phase_spread / HBAR
        }
        // (Phi_0 / 2pi)^2 / hbar = hbar / 4e^2
        UnitSystem::Paper => (c_l + c_r) * omega_b * omega_b * HBAR / (4.0 * E_CHARGE * E_CHARGE) * phase_spread,
    };
    (omega_l, omega_r, omega_b + shift)
}

/// Resonator-coupler couplings
/// `g_j = -C_j omega_b (Phi_0/2pi) sqrt(hbar omega / d C_0) (E_C / 2E_J)^(1/4) / hbar`.
/// The sign is kept; observables only depend on `g_l g_r`.
pub fn coupling_strengths(
    params: &CircuitParams,
    omega_b: f64,
    charging_energy: f64,
    josephson_energy: f64,
) -> (f64, f64) {
    let zero_point_voltage = (HBAR * params.tlr_frequency / params.tlr_capacitance).sqrt();
    let quartic = (charging_energy / (2.0 * josephson_energy)).powf(0.25);
    let per_farad = match params.units {
        UnitSystem::Si => FLUX_QUANTUM / (2.0 * PI) * omega_b * zero_point_voltage * quartic / HBAR,
        // (Phi_0 / 2pi) / hbar = 1 / 2e
        UnitSystem::Paper => omega_b * zero_point_voltage * quartic / (2.0 * E_CHARGE),
    };
    (
        -params.coupling_capacitance_left * per_farad,
        -params.coupling_capacitance_right * per_farad,
    )
}

/// Effective resonator-resonator coupling `g_l g_r (Delta_l + Delta_r) / (2 Delta_l Delta_r)`.
pub fn effective_coupling(g_l: f64, g_r: f64, delta_l: f64, delta_r: f64) -> Result<f64, CircuitError> {
    if delta_l == 0.0 {
        return Err(CircuitError::ZeroDetuning("left"));
    }
    if delta_r == 0.0 {
        return Err(CircuitError::ZeroDetuning("right"));
    }
    Ok(g_l * g_r * (delta_l + delta_r) / (2.0 * delta_l * delta_r))
}

/// Single-excitation picture of two resonators coupled through the coupler
/// mode. Basis order is (left, right, coupler).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThreeModeModel {
    pub omega_l: f64,
    pub omega_r: f64,
    pub omega_b: f64,
    pub g_l: f64,
    pub g_r: f64,
}

impl ThreeModeModel {
    /// `Delta_j = omega_b' - omega_j`.
    pub fn detunings(&self) -> (f64, f64) {
        (self.omega_b - self.omega_l, self.omega_b - self.omega_r)
    }

    pub fn hamiltonian(&self) -> nalgebra::Matrix3<f64> {
        nalgebra::Matrix3::new(
            self.omega_l, 0.0, self.g_l, //
            0.0, self.omega_r, self.g_r, //
            self.g_l, self.g_r, self.omega_b,
        )
    }

    /// Eliminates the coupler to first order in `g_j / Delta_j`.
    pub fn eliminate(&self) -> Result<EffectiveModel, CircuitError> {
        let (delta_l, delta_r) = self.detunings();
        let g = effective_coupling(self.g_l, self.g_r, delta_l, delta_r)?;
        let stark_l = self.g_l * self.g_l / delta_l;
        let stark_r = self.g_r * self.g_r / delta_r;
        Ok(EffectiveModel {
            omega_l: self.omega_l + stark_l,
            omega_r: self.omega_r + stark_r,
            g,
            omega_b: self.omega_b - stark_l - stark_r,
        })
    }

    /// Largest `|g_j| / Delta_j`; infinite for a zero detuning.
    pub fn max_coupling_ratio(&self) -> f64 {
        let (delta_l, delta_r) = self.detunings();
        let ratio = |g: f64, d: f64| if d == 0.0 { f64::INFINITY } else { (g / d).abs() };
        ratio(self.g_l, delta_l).max(ratio(self.g_r, delta_r))
    }

    pub fn dispersive(&self) -> bool {
        let (delta_l, delta_r) = self.detunings();
        delta_l >= DISPERSIVE_RATIO_THRESHOLD * self.g_l.abs()
            && delta_r >= DISPERSIVE_RATIO_THRESHOLD * self.g_r.abs()
            && delta_l > 0.0
            && delta_r > 0.0
    }
}

/// Two-resonator model left after eliminating the coupler.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EffectiveModel {
    /// Stark-shifted `omega_l'`.
    pub omega_l: f64,
    /// Stark-shifted `omega_r'`.
    pub omega_r: f64,
    pub g: f64,
    /// `omega_b''`, dropped from the two-mode Hamiltonian.
    pub omega_b: f64,
}

impl EffectiveModel {
    pub fn hamiltonian(&self) -> nalgebra::Matrix2<f64> {
        nalgebra::Matrix2::new(self.omega_l, self.g, self.g, self.omega_r)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RegimeFlags {
    /// `E_J(Phi_x) >= 100 E_C`.
    pub harmonic_regime_ok: bool,
    /// `Delta_j >= 5 |g_j|` for both resonators.
    pub dispersive_regime_ok: bool,
    /// Coupler below a resonator (`Delta_j < 0`).
    pub negative_detuning: bool,
}

/// Every derived circuit quantity at one flux point. Frequencies in rad/s;
/// `charging_energy` and `josephson_energy` stay in the input unit system.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CouplerDerived {
    pub units: UnitSystem,
    pub flux_ratio: f64,
    pub charging_energy: f64,
    pub josephson_energy: f64,
    pub omega_b: f64,
    pub omega_l: f64,
    pub omega_r: f64,
    pub omega_b_prime: f64,
    pub g_l: f64,
    pub g_r: f64,
    pub delta_l: f64,
    pub delta_r: f64,
    pub omega_l_prime: f64,
    pub omega_r_prime: f64,
    pub g_eff: f64,
    pub omega_b_doubleprime: f64,
    pub flags: RegimeFlags,
}

impl CouplerDerived {
    pub fn three_mode(&self) -> ThreeModeModel {
        ThreeModeModel {
            omega_l: self.omega_l,
            omega_r: self.omega_r,
            omega_b: self.omega_b_prime,
            g_l: self.g_l,
            g_r: self.g_r,
        }
    }

    pub fn effective(&self) -> EffectiveModel {
        EffectiveModel {
            omega_l: self.omega_l_prime,
            omega_r: self.omega_r_prime,
            g: self.g_eff,
            omega_b: self.omega_b_doubleprime,
        }
    }

    /// `E_J / E_C`, unit independent.
    pub fn josephson_to_charging_ratio(&self) -> f64 {
        self.josephson_energy / self.charging_energy
    }
}

/// Runs the full derivation chain from raw parameters to the effective coupling.
pub fn derive(params: &CircuitParams) -> Result<CouplerDerived, CircuitError> {
    params.validate()?;
    let e_c = params.charging_energy()?;
    let e_j = josephson_energy(params.josephson_energy_scale, params.flux_ratio);
    let omega_b = cpb_frequency(e_c, e_j, params.units)?;
    let (omega_l, omega_r, omega_b_prime) = renormalized_frequencies(params, omega_b, e_c, e_j);
    let (g_l, g_r) = coupling_strengths(params, omega_b, e_c, e_j);
    let three = ThreeModeModel {
        omega_l,
        omega_r,
        omega_b: omega_b_prime,
        g_l,
        g_r,
    };
    let (delta_l, delta_r) = three.detunings();
    let eff = three.eliminate()?;
    Ok(CouplerDerived {
        units: params.units,
        flux_ratio: params.flux_ratio,
        charging_energy: e_c,
        josephson_energy: e_j,
        omega_b,
        omega_l,
        omega_r,
        omega_b_prime,
        g_l,
        g_r,
        delta_l,
        delta_r,
        omega_l_prime: eff.omega_l,
        omega_r_prime: eff.omega_r,
        g_eff: eff.g,
        omega_b_doubleprime: eff.omega_b,
        flags: RegimeFlags {
            harmonic_regime_ok: e_j >= HARMONIC_RATIO_THRESHOLD * e_c,
            dispersive_regime_ok: three.dispersive(),
            negative_detuning: delta_l < 0.0 || delta_r < 0.0,
        },
    })
}

/// Defect parameter produced by the coupler at one flux point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SwitchSetting {
    pub flux_ratio: f64,
    pub g: f64,
    pub lambda: f64,
    pub flags: RegimeFlags,
}

/// Maps the coupler's effective coupling onto the chain's defect parameter,
/// `lambda = (|g| - t) / t`.
pub fn flux_to_lambda(params: &CircuitParams, hopping: f64) -> Result<SwitchSetting, CircuitError> {
    positive("hopping", hopping)?;
    let derived = derive(params)?;
    Ok(SwitchSetting {
        flux_ratio: params.flux_ratio,
        g: derived.g_eff,
        lambda: lambda_from_coupling(derived.g_eff, hopping),
        flags: derived.flags,
    })
}

/// `(|g| - t) / t`.
pub fn lambda_from_coupling(g: f64, hopping: f64) -> f64 {
    (g.abs() - hopping) / hopping
}

/// `min(C_Sigma_l / C_l, C_Sigma_r / C_r)` with `C_Sigma_j = C_0 d / 2 + C_j`.
pub fn direct_coupling_ratio(params: &CircuitParams) -> f64 {
    let half = params.tlr_capacitance / 2.0;
    let ratio = |c: f64| (half + c) / c;
    ratio(params.coupling_capacitance_left).min(ratio(params.coupling_capacitance_right))
}
