//! Invariants that must hold for arbitrary inputs.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use photon_switch::circuit::{self, CircuitParams, UnitSystem};
use photon_switch::dynamics::Propagator;
use photon_switch::lattice::{self, LatticeSpec};
use photon_switch::scattering::{evaluate_transmission, reflection, scattering_amplitudes, transmission};
use proptest::prelude::*;

// keeps away from lambda = -1 (duality pole) and from the band edges
fn lambda_strategy() -> impl Strategy<Value = f64> {
    prop_oneof![-0.98..-0.02f64, 0.02..20.0f64]
}

fn interior_k() -> impl Strategy<Value = f64> {
    0.001..(PI - 0.001)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(512))]

    #[test]
    fn transmission_even_in_k(lambda in -5.0..20.0f64, k in -10.0..10.0f64) {
        let a = transmission(lambda, k).unwrap();
        let b = transmission(lambda, -k).unwrap();
        prop_assert!((a - b).abs() <= 1e-12, "T({lambda},{k}) = {a}, T(.,-k) = {b}");
    }

    #[test]
    fn transmission_mirror_about_half_pi(lambda in -5.0..20.0f64, q in 0.0..(PI / 2.0)) {
        let a = transmission(lambda, PI / 2.0 - q).unwrap();
        let b = transmission(lambda, PI / 2.0 + q).unwrap();
        prop_assert!((a - b).abs() <= 1e-12);
    }

    #[test]
    fn transmission_is_a_probability(lambda in -50.0..50.0f64, k in -10.0..10.0f64) {
        let t = transmission(lambda, k).unwrap();
        prop_assert!((0.0..=1.0).contains(&t), "T = {t}");
        let r = reflection(lambda, k).unwrap();
        prop_assert!((t + r - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn only_origin_is_degenerate(lambda in -5.0..5.0f64, k in interior_k()) {
        prop_assert!(!evaluate_transmission(lambda, k).unwrap().degenerate);
    }

    #[test]
    fn uniform_chain_is_transparent(k in interior_k()) {
        prop_assert!((transmission(0.0, k).unwrap() - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn cut_bond_reflects_everything(k in interior_k()) {
        prop_assert_eq!(transmission(-1.0, k).unwrap(), 0.0);
    }

    #[test]
    fn beta_inverse_duality(lambda in lambda_strategy(), k in interior_k()) {
        let dual = -lambda / (1.0 + lambda);
        let a = transmission(lambda, k).unwrap();
        let b = transmission(dual, k).unwrap();
        prop_assert!((a - b).abs() <= 1e-12, "T({lambda}) = {a}, T({dual}) = {b}");
    }

    #[test]
    fn amplitudes_are_unitary(lambda in -5.0..20.0f64, k in interior_k(), bond in -50i64..50) {
        let (r, s) = scattering_amplitudes(lambda, k, bond).unwrap();
        prop_assert!((r.norm_sqr() + s.norm_sqr() - 1.0).abs() <= 1e-12);
        prop_assert!((s.norm_sqr() - transmission(lambda, k).unwrap()).abs() <= 1e-12);
    }

    #[test]
    fn moduli_do_not_depend_on_bond_position(lambda in -5.0..20.0f64, k in interior_k(), a in -40i64..40, b in -40i64..40) {
        let (ra, sa) = scattering_amplitudes(lambda, k, a).unwrap();
        let (rb, sb) = scattering_amplitudes(lambda, k, b).unwrap();
        prop_assert!((ra.norm() - rb.norm()).abs() <= 1e-12);
        prop_assert!((sa - sb).norm() <= 1e-12);
    }

    #[test]
    fn hamiltonian_is_symmetric_tridiagonal(n in 3usize..40, bond_frac in 0.0..1.0f64, lambda in -3.0..3.0f64, omega in -5.0..5.0f64, t in 0.1..3.0f64) {
        let bond = 1 + ((n - 2) as f64 * bond_frac) as usize;
        let spec = LatticeSpec::new(n, omega, t, bond, lambda).unwrap();
        let h = lattice::build_hamiltonian(&spec).unwrap();
        prop_assert_eq!(&h, &h.transpose());
        for i in 0..n {
            for j in 0..n {
                let expected = if i == j {
                    omega
                } else if i.abs_diff(j) == 1 {
                    if i.min(j) + 1 == bond { -(1.0 + lambda) * t } else { -t }
                } else {
                    0.0
                };
                prop_assert_eq!(h[(i, j)], expected);
            }
        }
    }

    #[test]
    fn zero_lambda_is_the_uniform_chain(n in 3usize..40, bond_frac in 0.0..1.0f64, t in 0.1..3.0f64) {
        let bond = 1 + ((n - 2) as f64 * bond_frac) as usize;
        let defect = lattice::build_hamiltonian(&LatticeSpec::new(n, 1.5, t, bond, 0.0).unwrap()).unwrap();
        let uniform = lattice::build_hamiltonian(&LatticeSpec::uniform(n, 1.5, t).unwrap()).unwrap();
        prop_assert_eq!(defect, uniform);
    }

    #[test]
    fn ring_spectrum_matches_dispersion(n in 3usize..60, omega in -5.0..5.0f64, t in 0.1..3.0f64) {
        let band = lattice::diagonalize_periodic(n, omega, t).unwrap();
        prop_assert_eq!(band.len(), n);
        let mut numeric: Vec<f64> = nalgebra::SymmetricEigen::new(lattice::periodic_hamiltonian(n, omega, t))
            .eigenvalues
            .iter()
            .copied()
            .collect();
        let mut analytic: Vec<f64> = (0..n)
            .map(|j| {
                let m = j as i64 - (n as i64 - 1) / 2;
                lattice::dispersion(2.0 * PI * m as f64 / n as f64, omega, t)
            })
            .collect();
        numeric.sort_by(f64::total_cmp);
        analytic.sort_by(f64::total_cmp);
        for (a, b) in numeric.iter().zip(&analytic) {
            prop_assert!((a - b).abs() <= 1e-9);
        }
        for p in &band {
            prop_assert!(p.k > -PI - 1e-12 && p.k <= PI + 1e-12);
            prop_assert!((p.energy - lattice::dispersion(p.k, omega, t)).abs() <= 1e-9);
        }
    }

    #[test]
    fn propagation_preserves_norm(n in 3usize..30, lambda in -2.0..2.0f64, time in -50.0..50.0f64, seed in any::<u64>()) {
        let spec = LatticeSpec::new(n, 0.3, 1.0, n / 2, lambda).unwrap();
        let p = Propagator::new(&lattice::build_hamiltonian(&spec).unwrap()).unwrap();
        let mut state = 0x9E37_79B9_7F4A_7C15u64 ^ seed;
        let mut next = || {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            (state >> 11) as f64 / (1u64 << 53) as f64 - 0.5
        };
        let psi = DVector::from_fn(n, |_, _| Complex64::new(next(), next())).normalize();
        let out = p.evolve(&psi, time).unwrap();
        prop_assert!((out.norm_squared() - 1.0).abs() < 1e-10);
        // evolving back recovers the start
        let back = p.evolve(&out, -time).unwrap();
        prop_assert!((back - psi).norm() < 1e-9);
    }

    #[test]
    fn josephson_energy_even_and_periodic(scale in 0.1..1e3f64, f in -3.0..3.0f64) {
        let e = circuit::josephson_energy(scale, f);
        prop_assert!((e - circuit::josephson_energy(scale, -f)).abs() <= 1e-9 * scale);
        prop_assert!((e - circuit::josephson_energy(scale, f + 2.0)).abs() <= 1e-9 * scale);
        prop_assert!(e.abs() <= 2.0 * scale * (1.0 + 1e-12));
    }

    #[test]
    fn cpb_frequency_squared(e_c in 1e6..1e10f64, e_j in 1e6..1e13f64) {
        let w = circuit::cpb_frequency(e_c, e_j, UnitSystem::Paper).unwrap();
        prop_assert!((w * w / (2.0 * e_c * e_j) - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn effective_coupling_symmetric_under_swap(c_l in 1e-15..50e-15f64, c_r in 1e-15..50e-15f64, cos in 0.02..1.0f64) {
        let mut p = CircuitParams::reference(UnitSystem::Paper).with_cos_flux(cos);
        p.coupling_capacitance_left = c_l;
        p.coupling_capacitance_right = c_r;
        let mut q = p;
        q.coupling_capacitance_left = c_r;
        q.coupling_capacitance_right = c_l;
        let a = circuit::derive(&p).unwrap();
        let b = circuit::derive(&q).unwrap();
        prop_assert!((a.g_eff - b.g_eff).abs() <= 1e-12 * a.g_eff.abs());
        prop_assert!((a.g_l - b.g_r).abs() <= 1e-12 * a.g_l.abs());
    }

    #[test]
    fn resonator_coupling_linear_in_capacitance(c in 1e-15..50e-15f64, factor in 0.1..10.0f64, cos in 0.02..1.0f64) {
        let base = CircuitParams::reference(UnitSystem::Paper).with_cos_flux(cos);
        let d = circuit::derive(&base).unwrap();
        let mut p = base;
        p.coupling_capacitance_left = c;
        let mut q = base;
        q.coupling_capacitance_left = c * factor;
        // omega_b and the junction terms do not depend on C_l once E_C is fixed
        let (gl_p, _) = circuit::coupling_strengths(&p, d.omega_b, d.charging_energy, d.josephson_energy);
        let (gl_q, _) = circuit::coupling_strengths(&q, d.omega_b, d.charging_energy, d.josephson_energy);
        prop_assert!((gl_q / gl_p - factor).abs() <= 1e-12 * factor);
    }

    #[test]
    fn unit_systems_agree(cos in 0.02..1.0f64, c_l in 2e-15..20e-15f64) {
        let mut paper = CircuitParams::reference(UnitSystem::Paper).with_cos_flux(cos);
        paper.coupling_capacitance_left = c_l;
        let mut si = CircuitParams::reference(UnitSystem::Si).with_cos_flux(cos);
        si.coupling_capacitance_left = c_l;
        let a = circuit::derive(&paper).unwrap();
        let b = circuit::derive(&si).unwrap();
        for (x, y) in [
            (a.omega_b, b.omega_b),
            (a.omega_b_prime, b.omega_b_prime),
            (a.g_l, b.g_l),
            (a.g_r, b.g_r),
            (a.g_eff, b.g_eff),
            (a.omega_l_prime, b.omega_l_prime),
        ] {
            prop_assert!((x - y).abs() <= 1e-9 * x.abs(), "{x} vs {y}");
        }
    }
}

#[test]
fn hermiticity_is_checked() {
    let mut h = DMatrix::<f64>::identity(3, 3);
    h[(0, 1)] = 1.0;
    assert!(Propagator::new(&h).is_err());
}
