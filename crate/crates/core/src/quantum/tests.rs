use super::*;
use std::f64::consts::PI;

fn same_mod_pi(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(PI);
    d.min(PI - d)
}

#[test]
fn principal_value_range() {
    assert_eq!(principal_atan(1.0, 0.0), PI / 2.0);
    assert_eq!(principal_atan(-1.0, -0.0), PI / 2.0);
    assert!((principal_atan(1.0, -1.0) + PI / 4.0).abs() < 1e-15);
    assert!((principal_atan(-1.0, -1.0) - PI / 4.0).abs() < 1e-15);
}

#[test]
fn high_orders_vanish() {
    let s = phase_shift(0.7, 5.0, 40).unwrap();
    assert!(s.delta.abs() < 1e-12);
    let s = phase_shift(0.7, 5.0, 400).unwrap();
    assert_eq!(s.delta, 0.0);
    assert_eq!(s.status, PhaseStatus::BesselOverflow);
}

#[test]
fn order_sign_is_irrelevant() {
    for &m in &[1, 3, 8] {
        let p = phase_shift(2.0, 9.0, m).unwrap();
        let n = phase_shift(2.0, 9.0, -m).unwrap();
        assert_eq!(p.delta, n.delta);
    }
}

#[test]
fn matches_full_domain_oracle() {
    let exact = phase_shift(0.6 * PI, 15.0, 4).unwrap();
    let oracle = phase_shift_ode_oracle(0.6 * PI, 15.0, 4, &OdeOptions::default()).unwrap();
    assert!(same_mod_pi(exact.delta, oracle.delta) < 1e-6, "{} vs {}", exact.delta, oracle.delta);
}

#[test]
fn interior_node_uses_pair_form() {
    // P_1(cos rho) vanishes at the equator
    let kr = 2f64.sqrt();
    let s = phase_shift(PI / 2.0, kr, 0).unwrap();
    assert_eq!(s.status, PhaseStatus::InteriorNode);
    let b = crate::specfun::bessel_jy(0, kr).unwrap();
    // a node leaves only the slope term: tan(delta) = J / Y
    assert!(same_mod_pi(s.delta, (b.j / b.y).atan()) < 1e-9);
    let oracle = phase_shift_ode_oracle(PI / 2.0, kr, 0, &OdeOptions::default()).unwrap();
    assert!(same_mod_pi(s.delta, oracle.delta) < 1e-6);
}

#[test]
fn table_is_converged_and_real() {
    let cfg = PhaseConfig::default();
    let t = phase_table(2.2, 25.0, &cfg).unwrap();
    assert!(t.m_max >= cfg.initial_m_max(2.2, 25.0));
    assert_eq!(t.delta.len(), t.m_max + 1);
    assert!(t.delta.iter().all(|d| d.is_finite() && *d > -PI / 2.0 && *d <= PI / 2.0));
    for m in t.m_max - 3..=t.m_max {
        assert!(t.sin2(m as i64) < 1e-12);
    }
    assert_eq!(t.delta(-7), t.delta(7));
    assert_eq!(t.delta(t.m_max as i64 + 5), 0.0);
}

#[test]
fn optical_theorem_identity() {
    for &(a, kr) in &[(0.4, 3.0), (2.5, 12.0), (1.6, 40.0)] {
        let t = phase_table(a, kr, &PhaseConfig::default()).unwrap();
        let g = amplitude(&t, &[0.0]).unwrap();
        let lhs = 4.0 / kr * g.f[0].im;
        let rhs = total_xsec(&t);
        assert!((lhs / rhs - 1.0).abs() < 1e-10);
        assert!(rhs >= 0.0);
    }
}

#[test]
fn truncation_is_stable() {
    let (a, kr) = (1.9, 17.3);
    let base = phase_table(a, kr, &PhaseConfig::default()).unwrap();
    let doubled = phase_table(
        a,
        kr,
        &PhaseConfig {
            min_m_max: 2 * base.m_max,
            ..Default::default()
        },
    )
    .unwrap();
    assert!((total_xsec(&base) - total_xsec(&doubled)).abs() < 1e-10);
    let grid = uniform_theta_grid(512);
    let x = amplitude(&base, &grid).unwrap();
    let y = amplitude(&doubled, &grid).unwrap();
    let worst = x.dsigma.iter().zip(&y.dsigma).map(|(p, q)| (p - q).abs()).fold(0.0, f64::max);
    assert!(worst < 1e-8, "{worst}");
}

#[test]
fn long_wavelength_is_nearly_isotropic() {
    let kr: f64 = 0.05;
    for &a in &[PI / 4.0, PI / 2.0, 0.75 * PI] {
        let t = phase_table(a, kr, &PhaseConfig::default()).unwrap();
        let grid = uniform_theta_grid(256);
        let g = amplitude(&t, &grid).unwrap();
        let f0 = partial_wave_sum(&t.delta, 0.0).norm();
        let worst = g.f.iter().map(|f| (f.norm() / f0 - 1.0).abs()).fold(0.0, f64::max);
        assert!(worst < 10.0 * kr * kr, "{a}: {worst}");
    }
}

#[test]
fn grids() {
    let g = uniform_theta_grid(8);
    assert_eq!(g.len(), 8);
    assert_eq!(*g.last().unwrap(), PI);
    assert!(g[0] > -PI);
    let r = forward_refined_grid(64, 41, 1.0, 50.0);
    assert!(r.windows(2).all(|w| w[1] > w[0]));
    assert!(r.contains(&0.0));
    assert!(check_grid(&[0.0, 0.0]).is_err());
}

#[test]
fn dsigma_definition() {
    let t = phase_table(1.0, 4.0, &PhaseConfig::default()).unwrap();
    let g = amplitude(&t, &[-1.0, 0.5]).unwrap();
    for (f, d) in g.f.iter().zip(&g.dsigma) {
        assert!((d - 2.0 * f.norm_sqr() / (PI * 4.0)).abs() < 1e-15);
    }
    assert_eq!(g.method, AmplitudeMethod::Exact);
}

#[test]
fn rejects_bad_input() {
    assert!(phase_shift(1.0, 0.0, 0).is_err());
    assert!(phase_shift(PI, 1.0, 0).is_err());
    let t = phase_table(1.0, 2.0, &PhaseConfig::default()).unwrap();
    assert!(amplitude(&t, &[1.0, 0.5]).is_err());
}
