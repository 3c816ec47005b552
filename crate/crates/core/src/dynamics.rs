//! Brute-force single-excitation dynamics.
//!
//! States are evolved exactly in the eigenbasis of the (Hermitian) matrix
//! Hamiltonian, `psi(t) = V exp(-i E t) V^dagger psi(0)`. This is used two
//! ways: as an independent check of the closed-form transmission through a
//! Gaussian wavepacket experiment, and to compare the three-mode coupler
//! dynamics against the eliminated two-mode model.

use std::f64::consts::PI;

use nalgebra::{ComplexField, DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;
use serde::Serialize;
use thiserror::Error;

use crate::circuit::ThreeModeModel;
use crate::lattice::{self, LatticeError, LatticeSpec, SingleExcitationState};
use crate::scattering::{self, ScatteringError};

/// Allowed squared-norm drift over one propagation.
pub const NORM_DRIFT_TOLERANCE: f64 = 1e-10;
/// Lower edge of the wavevector window accepted by the wavepacket oracle, in units of pi.
pub const MIN_WAVEVECTOR_FRACTION: f64 = 0.05;
pub const MIN_PACKET_WIDTH: f64 = 4.0;
/// Sites on either side of the defect bond that must be empty before measuring.
pub const SEPARATION_RADIUS: usize = 3;
pub const SEPARATION_TOLERANCE: f64 = 1e-3;
pub const DEFAULT_BUFFER: usize = 5;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DynamicsError {
    #[error("Hamiltonian is not Hermitian (max asymmetry {0:e})")]
    NotHermitian(f64),
    #[error("Hamiltonian is {rows}x{cols} but the state has {len} amplitudes")]
    DimensionMismatch { rows: usize, cols: usize, len: usize },
    #[error("initial state is not normalised (|psi|^2 = {0})")]
    NotNormalized(f64),
    #[error("time step must be positive and finite, got {0}")]
    InvalidStep(f64),
    #[error("squared norm drifted by {0:e}, above the 1e-10 contract")]
    NormDrift(f64),
    #[error(
        "wavevector {k0:.6} has near-zero group velocity; the oracle accepts k0 in [0.05 pi, 0.95 pi]"
    )]
    ZeroGroupVelocity { k0: f64 },
    #[error("packet width {0} below the minimum of 4 sites")]
    PacketTooNarrow(f64),
    #[error("initial packet does not fit left of the defect: {0}")]
    PacketPlacement(String),
    #[error("chain too short for the packet to separate before boundary echoes return; need N >= {required_sites}")]
    ChainTooShort { required_sites: usize },
    #[error("packet has not left the defect region (probability {0:e} within 3 sites)")]
    NotSeparated(f64),
    #[error(transparent)]
    Lattice(#[from] LatticeError),
    #[error(transparent)]
    Scattering(#[from] ScatteringError),
}

/// Spectral decomposition of a Hermitian matrix, reused for any number of
/// evolutions under the same Hamiltonian.
#[derive(Debug, Clone)]
pub struct Propagator {
    energies: DVector<f64>,
    modes: DMatrix<Complex64>,
}

impl Propagator {
    pub fn new<T>(h: &DMatrix<T>) -> Result<Self, DynamicsError>
    where
        T: ComplexField<RealField = f64> + Into<Complex64> + Copy,
    {
        if !h.is_square() {
            return Err(DynamicsError::DimensionMismatch {
                rows: h.nrows(),
                cols: h.ncols(),
                len: 0,
            });
        }
        let scale = h.iter().map(|x| x.modulus()).fold(1.0, f64::max);
        let mut asymmetry = 0.0f64;
        for i in 0..h.nrows() {
            for j in i..h.ncols() {
                let d = (h[(i, j)] - h[(j, i)].conjugate()).modulus();
                asymmetry = asymmetry.max(d);
            }
        }
        if !(asymmetry <= 1e-12 * scale) {
            return Err(DynamicsError::NotHermitian(asymmetry));
        }
        let eig = SymmetricEigen::new(h.clone());
        Ok(Self {
            energies: eig.eigenvalues,
            modes: eig.eigenvectors.map(Into::into),
        })
    }

    pub fn dim(&self) -> usize {
        self.energies.len()
    }

    pub fn energies(&self) -> &DVector<f64> {
        &self.energies
    }

    fn check_state(&self, psi: &DVector<Complex64>) -> Result<(), DynamicsError> {
        if psi.len() != self.dim() {
            return Err(DynamicsError::DimensionMismatch {
                rows: self.dim(),
                cols: self.dim(),
                len: psi.len(),
            });
        }
        Ok(())
    }

    fn to_eigenbasis(&self, psi: &DVector<Complex64>) -> DVector<Complex64> {
        self.modes.ad_mul(psi)
    }

    fn from_eigenbasis(&self, coeffs: &DVector<Complex64>, time: f64) -> DVector<Complex64> {
        let phased = DVector::from_iterator(
            coeffs.len(),
            coeffs
                .iter()
                .zip(self.energies.iter())
                .map(|(c, e)| c * Complex64::from_polar(1.0, -e * time)),
        );
        &self.modes * phased
    }

    /// State at time `time` (negative times run backwards).
    pub fn evolve(&self, psi: &DVector<Complex64>, time: f64) -> Result<DVector<Complex64>, DynamicsError> {
        self.check_state(psi)?;
        Ok(self.from_eigenbasis(&self.to_eigenbasis(psi), time))
    }

    /// Samples the trajectory every `step` up to and including `duration`.
    pub fn trajectory(
        &self,
        psi: &DVector<Complex64>,
        duration: f64,
        step: f64,
    ) -> Result<Trajectory<'_>, DynamicsError> {
        self.check_state(psi)?;
        if !(step.is_finite() && step > 0.0) {
            return Err(DynamicsError::InvalidStep(step));
        }
        let samples = (duration.abs() / step).ceil() as usize;
        Ok(Trajectory {
            propagator: self,
            coeffs: self.to_eigenbasis(psi),
            duration,
            samples,
            next: 0,
        })
    }

    /// Evolves for `duration`, checking the squared norm at every `step`.
    /// Returns the final state and the largest drift seen.
    pub fn run(
        &self,
        psi0: &DVector<Complex64>,
        duration: f64,
        step: f64,
    ) -> Result<(DVector<Complex64>, f64), DynamicsError> {
        let initial = psi0.norm_squared();
        let mut drift = 0.0f64;
        let mut last = psi0.clone();
        for (_, state) in self.trajectory(psi0, duration, step)? {
            drift = drift.max((state.norm_squared() - initial).abs());
            last = state;
        }
        if drift >= NORM_DRIFT_TOLERANCE {
            return Err(DynamicsError::NormDrift(drift));
        }
        Ok((last, drift))
    }
}

/// Iterator over `(time, state)` samples; the final sample lands exactly on `duration`.
pub struct Trajectory<'a> {
    propagator: &'a Propagator,
    coeffs: DVector<Complex64>,
    duration: f64,
    samples: usize,
    next: usize,
}

impl Iterator for Trajectory<'_> {
    type Item = (f64, DVector<Complex64>);

    fn next(&mut self) -> Option<Self::Item> {
        if self.next > self.samples {
            return None;
        }
        let time = if self.samples == 0 {
            self.duration
        } else {
            self.duration * self.next as f64 / self.samples as f64
        };
        self.next += 1;
        Some((time, self.propagator.from_eigenbasis(&self.coeffs, time)))
    }
}

/// Solves `i dpsi/dt = H psi` for `duration`, sampling the norm every `step`.
pub fn propagate<T>(
    h: &DMatrix<T>,
    psi0: &DVector<Complex64>,
    duration: f64,
    step: f64,
) -> Result<DVector<Complex64>, DynamicsError>
where
    T: ComplexField<RealField = f64> + Into<Complex64> + Copy,
{
    let norm = psi0.norm_squared();
    if (norm - 1.0).abs() > NORM_DRIFT_TOLERANCE {
        return Err(DynamicsError::NotNormalized(norm));
    }
    Propagator::new(h)?.run(psi0, duration, step).map(|(psi, _)| psi)
}

/// Gaussian single-photon packet incident from the left on the defect bond.
///
/// `|A_n| ~ exp(-(n - n0)^2 / (4 sigma^2))`, so `width` is the position
/// standard deviation and the wavevector spread is `1 / (2 width)`. The packet
/// is truncated to `n0 +- 4 width`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WavepacketSpec {
    pub center_site: usize,
    pub center_wavevector: f64,
    pub width: f64,
    pub measurement_boundary: usize,
    pub buffer: usize,
}

impl WavepacketSpec {
    /// Standard placement for `spec`: the packet's right tail sits `buffer`
    /// sites left of the defect and the measurement boundary is
    /// `l + 1 + ceil(3 width)`.
    pub fn for_lattice(spec: &LatticeSpec, k0: f64, width: f64) -> Self {
        let reach = (4.0 * width).ceil() as usize;
        let l = spec.defect_bond;
        Self {
            center_site: l.saturating_sub(reach + DEFAULT_BUFFER),
            center_wavevector: k0,
            width,
            measurement_boundary: l + 1 + (3.0 * width).ceil() as usize,
            buffer: DEFAULT_BUFFER,
        }
    }

    fn reach(&self) -> f64 {
        4.0 * self.width
    }

    pub fn validate(&self, spec: &LatticeSpec) -> Result<(), DynamicsError> {
        spec.validate()?;
        let k0 = self.center_wavevector;
        if !(k0.is_finite() && k0 >= MIN_WAVEVECTOR_FRACTION * PI && k0 <= (1.0 - MIN_WAVEVECTOR_FRACTION) * PI) {
            return Err(DynamicsError::ZeroGroupVelocity { k0 });
        }
        if !(self.width >= MIN_PACKET_WIDTH) {
            return Err(DynamicsError::PacketTooNarrow(self.width));
        }
        let n0 = self.center_site as f64;
        let l = spec.defect_bond as f64;
        if n0 - self.reach() < (1 + self.buffer) as f64 {
            return Err(DynamicsError::PacketPlacement(format!(
                "left tail n0 - 4 sigma = {:.1} is closer than {} sites to the chain end",
                n0 - self.reach(),
                self.buffer
            )));
        }
        if n0 + self.reach() + self.buffer as f64 > l {
            return Err(DynamicsError::PacketPlacement(format!(
                "right tail n0 + 4 sigma = {:.1} is within {} sites of the defect bond at {}",
                n0 + self.reach(),
                self.buffer,
                spec.defect_bond
            )));
        }
        if self.measurement_boundary <= spec.defect_bond + 1 || self.measurement_boundary > spec.n_sites {
            return Err(DynamicsError::PacketPlacement(format!(
                "measurement boundary {} must lie in ({}, {}]",
                self.measurement_boundary,
                spec.defect_bond + 1,
                spec.n_sites
            )));
        }
        Ok(())
    }

    /// Normalised, truncated Gaussian on an `n_sites` chain.
    pub fn initial_state(&self, n_sites: usize) -> SingleExcitationState {
        let n0 = self.center_site as f64;
        let two_var = 4.0 * self.width * self.width;
        let amplitudes = DVector::from_iterator(
            n_sites,
            (1..=n_sites).map(|n| {
                let x = n as f64 - n0;
                if x.abs() > self.reach() {
                    Complex64::new(0.0, 0.0)
                } else {
                    Complex64::from_polar((-x * x / two_var).exp(), self.center_wavevector * n as f64)
                }
            }),
        );
        let mut state = SingleExcitationState::new(amplitudes);
        state.normalize();
        state
    }

    /// `(b - n0 + 4 sigma) / v_g`: the packet's trailing edge has crossed the boundary.
    pub fn stop_time(&self, hopping: f64) -> f64 {
        let distance = self.measurement_boundary as f64 - self.center_site as f64 + self.reach();
        distance / lattice::group_velocity(self.center_wavevector, hopping)
    }
}

/// Outcome of one wavepacket scattering run.
#[derive(Debug, Clone, PartialEq)]
pub struct PropagationResult {
    pub final_state: SingleExcitationState,
    /// Probability on sites `n >= b`.
    pub transmitted_probability: f64,
    /// Probability on sites `n <= l`.
    pub reflected_probability: f64,
    /// Probability strictly between the defect and the boundary.
    pub residual_probability: f64,
    pub norm_drift: f64,
    pub elapsed_model_time: f64,
}

/// Whether both lobes stay clear of their echoes at the stop time, given the
/// worst-case outer edges including dispersive broadening.
fn lobes_separated(n_sites: usize, defect_bond: usize, wp: &WavepacketSpec, hopping: f64, stop: f64) -> bool {
    let k0 = wp.center_wavevector;
    let curvature = 2.0 * hopping * k0.cos().abs();
    let spread = curvature * stop / (2.0 * wp.width * wp.width);
    let width_at_stop = wp.width * (1.0 + spread * spread).sqrt();
    let travelled = lattice::group_velocity(k0, hopping) * stop;
    let l = defect_bond as f64;
    let b = wp.measurement_boundary as f64;
    // leading edge of the unscattered packet
    let front = wp.center_site as f64 + travelled + 4.0 * width_at_stop;
    // reflected lobe is the mirror image about l + 1/2; after bouncing off the
    // left end its right edge must stay clear of the defect region
    let margin = (SEPARATION_RADIUS + 1) as f64;
    let left_ok = front - 2.0 * l - 1.0 <= l - margin;
    // transmitted lobe bounces off site N + 1 and must not cross back over b
    let right_ok = 2.0 * (n_sites as f64 + 1.0) - front >= b;
    left_ok && right_ok
}

/// Fails with the smallest chain that works when the whole layout is shifted
/// right by half the added sites, which keeps a centred defect centred.
fn check_separation_geometry(spec: &LatticeSpec, wp: &WavepacketSpec, stop: f64) -> Result<(), DynamicsError> {
    if lobes_separated(spec.n_sites, spec.defect_bond, wp, spec.hopping, stop) {
        return Ok(());
    }
    let mut n = spec.n_sites + 1;
    loop {
        let shift = (n - spec.n_sites) / 2;
        let moved = WavepacketSpec {
            center_site: wp.center_site + shift,
            measurement_boundary: wp.measurement_boundary + shift,
            ..*wp
        };
        if lobes_separated(n, spec.defect_bond + shift, &moved, spec.hopping, stop) {
            return Err(DynamicsError::ChainTooShort { required_sites: n });
        }
        n += 1;
    }
}

/// Sends a Gaussian packet at the defect and measures how much of it ends up
/// beyond the measurement boundary.
pub fn measure_transmission(spec: &LatticeSpec, wp: &WavepacketSpec) -> Result<PropagationResult, DynamicsError> {
    wp.validate(spec)?;
    let stop = wp.stop_time(spec.hopping);
    check_separation_geometry(spec, wp, stop)?;

    let h = lattice::build_hamiltonian(spec)?;
    let propagator = Propagator::new(&h)?;
    let initial = wp.initial_state(spec.n_sites);
    // norm is sampled roughly once per site travelled
    let step = 1.0 / lattice::group_velocity(wp.center_wavevector, spec.hopping);
    let (amplitudes, norm_drift) = propagator.run(&initial.amplitudes, stop, step)?;
    let final_state = SingleExcitationState {
        amplitudes,
        time: stop,
    };

    let probs = final_state.probabilities();
    let l = spec.defect_bond;
    let lo = l.saturating_sub(SEPARATION_RADIUS).max(1);
    let hi = (l + 1 + SEPARATION_RADIUS).min(spec.n_sites);
    let near: f64 = probs[lo - 1..hi].iter().sum();
    if near >= SEPARATION_TOLERANCE {
        return Err(DynamicsError::NotSeparated(near));
    }
    let b = wp.measurement_boundary;
    let reflected: f64 = probs[..l].iter().sum();
    let residual: f64 = probs[l..b - 1].iter().sum();
    let transmitted: f64 = probs[b - 1..].iter().sum();

    Ok(PropagationResult {
        final_state,
        transmitted_probability: transmitted,
        reflected_probability: reflected,
        residual_probability: residual,
        norm_drift,
        elapsed_model_time: stop,
    })
}

/// Oracle run next to the closed-form value at the packet's central wavevector.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OracleComparison {
    pub lambda: f64,
    pub k0: f64,
    pub analytic: f64,
    pub measured: f64,
    pub abs_error: f64,
    pub n_sites: usize,
    pub width: f64,
    pub norm_drift: f64,
}

/// Runs the packet experiment on a chain with the defect mid-chain.
pub fn compare_with_closed_form(
    n_sites: usize,
    lambda: f64,
    k0: f64,
    width: f64,
) -> Result<OracleComparison, DynamicsError> {
    let spec = LatticeSpec::new(n_sites, 0.0, 1.0, n_sites / 2, lambda)?;
    let wp = WavepacketSpec::for_lattice(&spec, k0, width);
    let result = measure_transmission(&spec, &wp)?;
    let analytic = scattering::transmission(lambda, k0)?;
    Ok(OracleComparison {
        lambda,
        k0,
        analytic,
        measured: result.transmitted_probability,
        abs_error: (result.transmitted_probability - analytic).abs(),
        n_sites,
        width,
        norm_drift: result.norm_drift,
    })
}

/// How far the coupler sits from the resonators relative to its couplings.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum AdiabaticRegime {
    /// `Delta_j >= 10 |g_j|`: the timing and population contract applies.
    Valid,
    /// `|g_j| < Delta_j < 10 |g_j|`.
    Marginal,
    /// `Delta_j <= |g_j|` for some resonator.
    Invalid,
}

/// Ratio `Delta_j / |g_j|` from which the elimination contract is enforced.
pub const ADIABATIC_CONTRACT_RATIO: f64 = 10.0;
pub const TRANSFER_TIME_TOLERANCE: f64 = 0.05;
pub const COUPLER_POPULATION_MARGIN: f64 = 1.5;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AdiabaticReport {
    pub regime: AdiabaticRegime,
    pub max_coupler_population: f64,
    /// `4 max_j (g_j / Delta_j)^2`.
    pub coupler_population_bound: f64,
    pub times: Vec<f64>,
    /// Right-resonator population under the three-mode model.
    pub fidelity_full: Vec<f64>,
    /// Right-resonator population under the eliminated model.
    pub fidelity_effective: Vec<f64>,
    pub transfer_time_full: Option<f64>,
    pub transfer_time_effective: Option<f64>,
    pub transfer_time_relative_difference: Option<f64>,
    pub norm_drift: f64,
    /// Contract verdict; `None` outside the valid regime.
    pub contract_ok: Option<bool>,
}

fn population(propagator: &Propagator, psi0: &DVector<Complex64>, time: f64, mode: usize) -> f64 {
    // dimensions were checked when the trajectory was built
    propagator.evolve(psi0, time).map(|psi| psi[mode].norm_sqr()).unwrap_or(f64::NAN)
}

fn bisect_crossing<F: Fn(f64) -> f64>(f: F, mut lo: f64, mut hi: f64, level: f64) -> f64 {
    let below_at_lo = f(lo) < level;
    for _ in 0..80 {
        let mid = 0.5 * (lo + hi);
        if (f(mid) < level) == below_at_lo {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Time of the first complete transfer into `mode`: the midpoint of the
/// 1/2-population crossings that bracket the first excursion above 0.7.
/// Crossings are taken nearest the peak so fast wiggles bias both sides alike.
fn first_transfer_time(
    propagator: &Propagator,
    psi0: &DVector<Complex64>,
    mode: usize,
    times: &[f64],
    pops: &[f64],
) -> Option<f64> {
    const HALF: f64 = 0.5;
    const HIGH: f64 = 0.7;
    let peak_idx = pops.iter().position(|&p| p >= HIGH)?;
    let crossed = |i: usize| (pops[i] >= HALF) != (pops[i + 1] >= HALF);
    let up = (0..peak_idx).rev().find(|&i| crossed(i))?;
    let down = (peak_idx..pops.len() - 1).find(|&i| crossed(i))?;
    let f = |t: f64| population(propagator, psi0, t, mode);
    let t_up = bisect_crossing(f, times[up], times[up + 1], HALF);
    let t_down = bisect_crossing(f, times[down], times[down + 1], HALF);
    Some(0.5 * (t_up + t_down))
}

fn dense<const N: usize>(m: &nalgebra::SMatrix<f64, N, N>) -> DMatrix<f64> {
    DMatrix::from_fn(N, N, |i, j| m[(i, j)])
}

/// Starts a photon in the left resonator and evolves it under the
/// three-mode model and under its eliminated two-mode counterpart.
pub fn validate_adiabatic_elimination(
    model: &ThreeModeModel,
    duration: f64,
    step: f64,
) -> Result<AdiabaticReport, DynamicsError> {
    let (delta_l, delta_r) = model.detunings();
    let ratio = |g: f64, d: f64| if g == 0.0 { f64::INFINITY } else { d / g.abs() };
    let worst = ratio(model.g_l, delta_l).min(ratio(model.g_r, delta_r));
    let regime = if worst >= ADIABATIC_CONTRACT_RATIO {
        AdiabaticRegime::Valid
    } else if worst > 1.0 {
        AdiabaticRegime::Marginal
    } else {
        AdiabaticRegime::Invalid
    };

    let full = Propagator::new(&dense(&model.hamiltonian()))?;
    let psi_full = DVector::from_vec(vec![
        Complex64::new(1.0, 0.0),
        Complex64::new(0.0, 0.0),
        Complex64::new(0.0, 0.0),
    ]);
    // a zero detuning has no eliminated model; only the full dynamics is reported
    let effective = match model.eliminate() {
        Ok(m) => Some(Propagator::new(&dense(&m.hamiltonian()))?),
        Err(_) => None,
    };
    let psi_eff = DVector::from_vec(vec![Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)]);

    let mut times = Vec::new();
    let mut fidelity_full = Vec::new();
    let mut coupler = 0.0f64;
    let mut drift = 0.0f64;
    for (t, psi) in full.trajectory(&psi_full, duration, step)? {
        drift = drift.max((psi.norm_squared() - 1.0).abs());
        coupler = coupler.max(psi[2].norm_sqr());
        times.push(t);
        fidelity_full.push(psi[1].norm_sqr());
    }
    let mut fidelity_effective = Vec::with_capacity(times.len());
    if let Some(eff) = &effective {
        for (_, psi) in eff.trajectory(&psi_eff, duration, step)? {
            drift = drift.max((psi.norm_squared() - 1.0).abs());
            fidelity_effective.push(psi[1].norm_sqr());
        }
    }
    if drift >= NORM_DRIFT_TOLERANCE {
        return Err(DynamicsError::NormDrift(drift));
    }

    let transfer_time_full = first_transfer_time(&full, &psi_full, 1, &times, &fidelity_full);
    let transfer_time_effective = effective
        .as_ref()
        .and_then(|eff| first_transfer_time(eff, &psi_eff, 1, &times, &fidelity_effective));
    let transfer_time_relative_difference = match (transfer_time_full, transfer_time_effective) {
        (Some(a), Some(b)) => Some((a - b).abs() / b),
        _ => None,
    };
    let coupling_ratio = model.max_coupling_ratio();
    let coupler_population_bound = 4.0 * coupling_ratio * coupling_ratio;
    let contract_ok = (regime == AdiabaticRegime::Valid).then(|| {
        let timing_ok = match (transfer_time_full, transfer_time_effective) {
            (None, None) => true,
            (Some(_), Some(_)) => transfer_time_relative_difference.unwrap() <= TRANSFER_TIME_TOLERANCE,
            _ => false,
        };
        timing_ok && coupler <= COUPLER_POPULATION_MARGIN * coupler_population_bound
    });

    Ok(AdiabaticReport {
        regime,
        max_coupler_population: coupler,
        coupler_population_bound,
        times,
        fidelity_full,
        fidelity_effective,
        transfer_time_full,
        transfer_time_effective,
        transfer_time_relative_difference,
        norm_drift: drift,
        contract_ok,
    })
}

/// Symmetric three-mode model: identical resonators at `omega`, coupler at
/// `omega + detuning`, both couplings equal to `g_prime`.
pub fn symmetric_three_mode(omega: f64, g_prime: f64, detuning: f64) -> ThreeModeModel {
    ThreeModeModel {
        omega_l: omega,
        omega_r: omega,
        omega_b: omega + detuning,
        g_l: g_prime,
        g_r: g_prime,
    }
}
