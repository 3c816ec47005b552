//! Closed-form scattering of a single photon off the defect bond.
//!
//! For an incident plane wave `e^{ikn}` the amplitudes left and right of the
//! bond `(l, l+1)` are
//!
//! ```text
//! A_n = e^{ikn} + r e^{-ikn}   (n <= l)
//! A_n = s e^{ikn}              (n >= l + 1)
//! ```
//!
//! and the transmission coefficient depends only on `lambda` and `k`:
//!
//! ```text
//! T = 4 (lambda+1)^2 sin^2 k / (lambda^2 (lambda+2)^2 + 4 (lambda+1)^2 sin^2 k)
//! ```
//!
//! The eigen-equation on the site right of the defect is taken as
//! `-t A_{l+2} - t' A_l = (Omega - omega) A_{l+1}`; the hopping `t` on
//! `A_{l+2}` is required for the formula above to follow.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ScatteringError {
    #[error("{name} must be finite, got {value}")]
    NonFinite { name: &'static str, value: f64 },
    #[error("wavevector {0} is a band edge (k = 0 mod pi); the plane wave does not propagate")]
    BandEdge(f64),
    #[error("defect bond {bond} must sit at least two sites from both ends of a {n_sites}-site window")]
    DefectTooCloseToEdge { bond: i64, n_sites: usize },
}

fn check_finite(name: &'static str, value: f64) -> Result<(), ScatteringError> {
    if value.is_finite() {
        Ok(())
    } else {
        Err(ScatteringError::NonFinite { name, value })
    }
}

/// Folds any real wavevector into `(-pi, pi]`.
pub fn fold_wavevector(k: f64) -> f64 {
    let two_pi = 2.0 * PI;
    let mut folded = k.rem_euclid(two_pi);
    if folded > PI {
        folded -= two_pi;
    }
    folded
}

/// Value of `T(lambda, k)` together with the indeterminacy flag.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TransmissionValue {
    pub value: f64,
    /// Set at `lambda = 0` on a band edge, where the closed form is `0/0`.
    pub degenerate: bool,
}

/// `T(lambda, k)` with the degeneracy flag exposed.
pub fn evaluate_transmission(lambda: f64, k: f64) -> Result<TransmissionValue, ScatteringError> {
    check_finite("lambda", lambda)?;
    check_finite("k", k)?;
    let k = fold_wavevector(k);
    if lambda == 0.0 && (k == 0.0 || k == PI) {
        return Ok(TransmissionValue {
            value: 0.0,
            degenerate: true,
        });
    }
    let beta = 1.0 + lambda;
    let sin2 = k.sin().powi(2);
    let numerator = 4.0 * beta * beta * sin2;
    let mismatch = lambda * (lambda + 2.0);
    let denominator = mismatch * mismatch + numerator;
    // both terms vanish only at lambda = -1 on a band edge, which is total reflection
    let value = if denominator == 0.0 {
        0.0
    } else {
        numerator / denominator
    };
    Ok(TransmissionValue {
        value,
        degenerate: false,
    })
}

/// Transmission coefficient `T(lambda, k)`; zero by convention at `(0, 0)`.
pub fn transmission(lambda: f64, k: f64) -> Result<f64, ScatteringError> {
    evaluate_transmission(lambda, k).map(|t| t.value)
}

/// Reflection coefficient `R = 1 - T`.
pub fn reflection(lambda: f64, k: f64) -> Result<f64, ScatteringError> {
    transmission(lambda, k).map(|t| 1.0 - t)
}

/// Reflection and transmission amplitudes `(r, s)` for the defect bond at `l`.
///
/// With `beta = 1 + lambda`:
/// `r = (1 - beta^2) e^{2ikl} / (beta^2 - e^{-2ik})`,
/// `s = beta (1 - e^{-2ik}) / (beta^2 - e^{-2ik})`.
pub fn scattering_amplitudes(
    lambda: f64,
    k: f64,
    bond: i64,
) -> Result<(Complex64, Complex64), ScatteringError> {
    check_finite("lambda", lambda)?;
    check_finite("k", k)?;
    let k = fold_wavevector(k);
    if k == 0.0 || k == PI || k.sin().abs() < 1e-300 {
        return Err(ScatteringError::BandEdge(k));
    }
    let beta = 1.0 + lambda;
    let beta2 = Complex64::new(beta * beta, 0.0);
    let back = Complex64::from_polar(1.0, -2.0 * k);
    let denom = beta2 - back;
    let phase = Complex64::from_polar(1.0, 2.0 * k * bond as f64);
    let r = (1.0 - beta * beta) * phase / denom;
    let s = beta * (1.0 - back) / denom;
    Ok((r, s))
}

/// Full stationary solution at `(lambda, k)` for the bond at `l`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScatteringSolution {
    pub k: f64,
    pub lambda: f64,
    pub bond: i64,
    pub r: Complex64,
    pub s: Complex64,
    pub transmission: f64,
    pub reflection: f64,
}

impl ScatteringSolution {
    pub fn solve(lambda: f64, k: f64, bond: i64) -> Result<Self, ScatteringError> {
        let (r, s) = scattering_amplitudes(lambda, k, bond)?;
        Ok(Self {
            k: fold_wavevector(k),
            lambda,
            bond,
            r,
            s,
            transmission: s.norm_sqr(),
            reflection: r.norm_sqr(),
        })
    }

    /// `Omega = omega - 2 t cos k`.
    pub fn energy(&self, cavity_frequency: f64, hopping: f64) -> f64 {
        crate::lattice::dispersion(self.k, cavity_frequency, hopping)
    }

    /// Ansatz amplitude on site `n`.
    pub fn amplitude(&self, n: i64) -> Complex64 {
        let forward = Complex64::from_polar(1.0, self.k * n as f64);
        if n <= self.bond {
            forward + self.r * forward.conj()
        } else {
            self.s * forward
        }
    }
}

/// Largest absolute residual of the discrete eigen-equations when the plane
/// wave ansatz is evaluated on sites `1..=n_sites` (interior sites only).
pub fn verify_ansatz_residual(
    lambda: f64,
    k: f64,
    bond: i64,
    n_sites: usize,
) -> Result<f64, ScatteringError> {
    if bond < 2 || bond > n_sites as i64 - 2 {
        return Err(ScatteringError::DefectTooCloseToEdge { bond, n_sites });
    }
    let solution = ScatteringSolution::solve(lambda, k, bond)?;
    let hop = 1.0;
    let defect_hop = (1.0 + lambda) * hop;
    // Omega - omega
    let shift = -2.0 * hop * solution.k.cos();
    let bond_hop = |left: i64| if left == bond { defect_hop } else { hop };

    let amps: Vec<Complex64> = (0..=n_sites as i64 + 1).map(|n| solution.amplitude(n)).collect();
    let residual = (2..n_sites as i64)
        .map(|n| {
            let i = n as usize;
            let lhs = -(bond_hop(n) * amps[i + 1] + bond_hop(n - 1) * amps[i - 1]);
            (lhs - shift * amps[i]).norm()
        })
        .fold(0.0, f64::max);
    Ok(residual)
}
