//! Defect tight-binding chain: geometry, single-excitation Hamiltonian and
//! the band dispersion of the uniform lattice.
//!
//! Sites are numbered `1..=N` in the public API, matching the usual physics
//! convention; the defect bond `l` joins sites `l` and `l + 1`. Matrices and
//! amplitude vectors are zero-based, so site `n` lives at index `n - 1`.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LatticeError {
    #[error("chain needs at least 3 sites, got {0}")]
    TooFewSites(usize),
    #[error("defect bond index {index} outside [1, {max}]")]
    DefectOutOfRange { index: usize, max: usize },
    #[error("hopping must be positive and finite, got {0}")]
    InvalidHopping(f64),
    #[error("{name} must be finite, got {value}")]
    NonFinite { name: &'static str, value: f64 },
}

/// Geometry and couplings of an `N`-site chain with one modified bond.
///
/// The defect hopping is `t' = (1 + lambda) t`; it is derived, never stored.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LatticeSpec {
    pub n_sites: usize,
    pub cavity_frequency: f64,
    pub hopping: f64,
    pub defect_bond: usize,
    pub lambda: f64,
}

impl LatticeSpec {
    pub fn new(
        n_sites: usize,
        cavity_frequency: f64,
        hopping: f64,
        defect_bond: usize,
        lambda: f64,
    ) -> Result<Self, LatticeError> {
        let spec = Self {
            n_sites,
            cavity_frequency,
            hopping,
            defect_bond,
            lambda,
        };
        spec.validate()?;
        Ok(spec)
    }

    /// Uniform chain (`lambda = 0`) with the defect bond parked mid-chain.
    pub fn uniform(n_sites: usize, cavity_frequency: f64, hopping: f64) -> Result<Self, LatticeError> {
        Self::new(n_sites, cavity_frequency, hopping, (n_sites / 2).max(1), 0.0)
    }

    pub fn validate(&self) -> Result<(), LatticeError> {
        if self.n_sites < 3 {
            return Err(LatticeError::TooFewSites(self.n_sites));
        }
        if self.defect_bond < 1 || self.defect_bond > self.n_sites - 1 {
            return Err(LatticeError::DefectOutOfRange {
                index: self.defect_bond,
                max: self.n_sites - 1,
            });
        }
        if !(self.hopping.is_finite() && self.hopping > 0.0) {
            return Err(LatticeError::InvalidHopping(self.hopping));
        }
        if !self.cavity_frequency.is_finite() {
            return Err(LatticeError::NonFinite {
                name: "cavity_frequency",
                value: self.cavity_frequency,
            });
        }
        if !self.lambda.is_finite() {
            return Err(LatticeError::NonFinite {
                name: "lambda",
                value: self.lambda,
            });
        }
        Ok(())
    }

    /// Hopping across the defect bond, `(1 + lambda) t`.
    pub fn defect_hopping(&self) -> f64 {
        (1.0 + self.lambda) * self.hopping
    }

    /// `lambda < -1` flips the sign of the defect hopping. Transmission is
    /// still well defined there, but the regime is unusual enough to flag.
    pub fn negative_defect_hopping(&self) -> bool {
        self.lambda < -1.0
    }

    pub fn with_lambda(mut self, lambda: f64) -> Self {
        self.lambda = lambda;
        self
    }
}

/// Open-chain single-excitation Hamiltonian: `omega` on the diagonal, `-t` on
/// every nearest-neighbour bond except `-(1 + lambda) t` on the defect bond.
pub fn build_hamiltonian(spec: &LatticeSpec) -> Result<DMatrix<f64>, LatticeError> {
    spec.validate()?;
    let n = spec.n_sites;
    let mut h = DMatrix::zeros(n, n);
    for i in 0..n {
        h[(i, i)] = spec.cavity_frequency;
    }
    for i in 0..n - 1 {
        // bond (i+1, i+2) in site numbering
        let hop = if i + 1 == spec.defect_bond {
            spec.defect_hopping()
        } else {
            spec.hopping
        };
        h[(i, i + 1)] = -hop;
        h[(i + 1, i)] = -hop;
    }
    Ok(h)
}

/// Band energy `omega - 2 t cos k` of the uniform chain.
pub fn dispersion(k: f64, cavity_frequency: f64, hopping: f64) -> f64 {
    cavity_frequency - 2.0 * hopping * k.cos()
}

/// `dOmega/dk = 2 t sin k`.
pub fn group_velocity(k: f64, hopping: f64) -> f64 {
    2.0 * hopping * k.sin()
}

/// Allowed wavevector of a periodic `N`-site ring together with its band energy.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BandPoint {
    pub m: i64,
    pub k: f64,
    pub energy: f64,
}

/// Wavevectors `k_m = 2 pi m / N` with `-N/2 < m <= N/2` and their energies.
///
/// The hopping may be zero here (decoupled cavities), unlike in [`LatticeSpec`].
pub fn diagonalize_periodic(
    n_sites: usize,
    cavity_frequency: f64,
    hopping: f64,
) -> Result<Vec<BandPoint>, LatticeError> {
    if n_sites < 3 {
        return Err(LatticeError::TooFewSites(n_sites));
    }
    let n = n_sites as i64;
    // smallest m with 2m > -n
    let m_min = -n / 2 + if n % 2 == 0 { 1 } else { 0 };
    let m_max = n / 2;
    Ok((m_min..=m_max)
        .map(|m| {
            let k = 2.0 * PI * m as f64 / n as f64;
            BandPoint {
                m,
                k,
                energy: dispersion(k, cavity_frequency, hopping),
            }
        })
        .collect())
}

/// Ring Hamiltonian of the uniform chain (site `N` bonded back to site 1).
pub fn periodic_hamiltonian(n_sites: usize, cavity_frequency: f64, hopping: f64) -> DMatrix<f64> {
    let mut h = DMatrix::from_diagonal_element(n_sites, n_sites, cavity_frequency);
    for i in 0..n_sites {
        let j = (i + 1) % n_sites;
        h[(i, j)] -= hopping;
        h[(j, i)] -= hopping;
    }
    h
}

/// Single-excitation state `sum_n A_n |1_n>` at model time `time`.
#[derive(Debug, Clone, PartialEq)]
pub struct SingleExcitationState {
    pub amplitudes: DVector<Complex64>,
    pub time: f64,
}

impl SingleExcitationState {
    pub fn new(amplitudes: DVector<Complex64>) -> Self {
        Self {
            amplitudes,
            time: 0.0,
        }
    }

    /// Photon localised on a single site (one-based).
    pub fn localized(n_sites: usize, site: usize) -> Self {
        let mut amplitudes = DVector::zeros(n_sites);
        amplitudes[site - 1] = Complex64::new(1.0, 0.0);
        Self::new(amplitudes)
    }

    pub fn norm_squared(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn probabilities(&self) -> Vec<f64> {
        self.amplitudes.iter().map(|a| a.norm_sqr()).collect()
    }

    pub fn normalize(&mut self) {
        let norm = self.norm_squared().sqrt();
        if norm > 0.0 {
            self.amplitudes.unscale_mut(norm);
        }
    }

    /// Probability-weighted mean site, one-based.
    pub fn mean_site(&self) -> f64 {
        let total = self.norm_squared();
        self.amplitudes
            .iter()
            .enumerate()
            .map(|(i, a)| (i + 1) as f64 * a.norm_sqr())
            .sum::<f64>()
            / total
    }
}
