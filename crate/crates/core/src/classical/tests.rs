use super::*;
use proptest::prelude::*;
use std::f64::consts::PI;

/// Azimuth swept on the cap, from the great-circle integrand
/// `dphi/drho = mu / (sin rho sqrt(sin^2 rho - mu^2))`, with `rho = rho0 + u^2`.
fn swept_azimuth(alpha: f64, mu: f64) -> f64 {
    let rho0 = mu.abs().asin();
    let f = |u: f64| {
        let rho = rho0 + u * u;
        if u == 0.0 {
            return 2.0 * mu / (rho0.sin() * (2.0 * rho0).sin().sqrt());
        }
        // sin^2(rho) - sin^2(rho0) = sin(rho - rho0) sin(rho + rho0)
        let rad = ((u * u).sin() * (2.0 * rho0 + u * u).sin()).sqrt();
        2.0 * u * mu / (rho.sin() * rad)
    };
    2.0 * quadrature::integrate(f, 0.0, (alpha - rho0).sqrt(), 1e-14, 1e-13).unwrap().value
}

fn exit_angle_oracle(alpha: f64, beta: f64) -> f64 {
    let mu = -alpha.sin() * beta.sin();
    wrap_angle(PI - beta + swept_azimuth(alpha, mu))
}

/// Inverts the deflection by bisection in `beta` on a monotone bracket.
fn bisect_beta(alpha: f64, theta: f64, mut lo: f64, mut hi: f64) -> f64 {
    let f = |b: f64| wrap_angle(ClassicalDeflection::from_beta(alpha, b).unwrap().theta - theta);
    let flo = f(lo);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if (f(mid) > 0.0) == (flo > 0.0) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

#[test]
fn deflection_examples() {
    for &a in &[0.3, PI / 2.0, 2.5] {
        assert_eq!(deflection_angle(a, 0.0).unwrap(), 0.0);
    }
    for &mu in &[-0.9, -0.2, 0.5, 0.99] {
        let t = deflection_angle(PI / 2.0, mu).unwrap();
        assert!((t - 2.0 * f64::asin(mu)).abs() < 1e-14);
    }
    let t = deflection_angle(PI / 4.0, 0.3).unwrap();
    assert!((t - 0.236_468_953_340_641_37).abs() < 1e-14);
    let oracle = wrap_angle(exit_angle_oracle(PI / 4.0, (-0.3 / (PI / 4.0).sin()).asin()) + (0.3 / (PI / 4.0).sin()).asin());
    assert!((t - oracle).abs() < 1e-10, "{t} vs {oracle}");
}

#[test]
fn deflection_rejects_missed_contact() {
    assert!(matches!(deflection_angle(PI / 4.0, 0.8), Err(Error::NoContact { .. })));
    assert!(deflection_angle(0.0, 0.0).is_err());
}

#[test]
fn exit_angle_examples() {
    assert_eq!(exit_angle(1.1, 0.0), 0.0);
    assert!((exit_angle(PI / 2.0, 0.7) + 0.7).abs() < 1e-15);
    let a = 0.75 * PI;
    let v = exit_angle(a, 0.4);
    assert!((v - (2.0 * (a.cos() * 0.4f64.tan()).atan() - 0.4)).abs() < 1e-14);
    assert!((v + 0.981_004_698_175_100_3).abs() < 1e-14);
    for &(a, b) in &[(0.75 * PI, 0.4), (0.3, -1.2), (2.9, 0.05), (PI / 2.0 - 0.01, 1.0)] {
        let o = exit_angle_oracle(a, b);
        assert!(wrap_angle(exit_angle(a, b) - o).abs() < 1e-9, "{a} {b}: {} vs {o}", exit_angle(a, b));
    }
}

#[test]
fn caustic_examples() {
    let c = caustic(PI / 4.0).unwrap();
    assert!((c.theta_c - 0.344_851_995_425_698_1).abs() < 1e-14);
    // deflection is stationary in beta at the caustic
    let h = 1e-5;
    let th = |b: f64| ClassicalDeflection::from_beta(PI / 4.0, b).unwrap().theta;
    let slope = (th(c.beta_c + h) - th(c.beta_c - h)) / (2.0 * h);
    assert!(slope.abs() < 1e-8, "{slope}");
    // positive beta means positive b, which deflects towards negative theta
    assert!((th(-c.beta_c) - c.theta_c).abs() < 1e-14);
    assert!((caustic(PI / 2.0 - 1e-9).unwrap().theta_c - PI).abs() < 1e-3);
    assert!(matches!(caustic(PI / 2.0), Err(Error::NoCaustic { .. })));
    assert!(caustic(2.0).is_err());
    let c = caustic(0.47 * PI).unwrap();
    assert!(c.theta_c > 1.9 && c.theta_c < 2.0);
}

#[test]
fn zero_angle_limits() {
    for &a in &[0.4, 1.3, 2.0, 2.8] {
        let p = impact_branches(a, 0.0).unwrap();
        let sc = a.cos().signum();
        assert_eq!(p.b_minus, 0.0);
        assert!((p.b_plus + sc * a.sin()).abs() < 1e-14);
        assert!((p.b_plus_from_below.unwrap() - sc * a.sin()).abs() < 1e-14);
        let below = impact_branches(a, -1e-9).unwrap();
        assert!(below.b_minus.abs() < 1e-8);
        assert!((below.b_plus - sc * a.sin()).abs() < 1e-8);
        assert!(below.b_plus_from_below.is_none());
    }
}

#[test]
fn branches_coincide_at_caustic() {
    for &a in &[0.2, PI / 4.0, 1.2, 0.47 * PI] {
        let c = caustic(a).unwrap();
        let p = impact_branches(a, c.theta_c).unwrap();
        assert!(p.valid);
        assert_eq!(p.b_plus, p.b_minus);
        assert!((p.b_plus + a.sin() * c.beta_c.sin()).abs() < 1e-12);
        assert!(!impact_branches(a, c.theta_c + 1e-6).unwrap().valid);
    }
}

#[test]
fn overhanging_branches_match_bisection() {
    let a = 0.75 * PI;
    let theta = -5.0 * PI / 8.0;
    let p = impact_branches(a, theta).unwrap();
    assert!(p.valid && (p.b_plus - p.b_minus).abs() > 0.1);
    // theta(beta) has one root on each side of the head-on path
    let roots = [bisect_beta(a, theta, -PI / 2.0 + 1e-12, 0.0), bisect_beta(a, theta, 0.0, PI / 2.0 - 1e-12)];
    let mut want: Vec<f64> = roots.iter().map(|b| a.sin() * b.sin()).collect();
    let mut got = vec![p.b_plus, p.b_minus];
    want.sort_by(f64::total_cmp);
    got.sort_by(f64::total_cmp);
    for (g, w) in got.iter().zip(&want) {
        assert!((g - w).abs() < 1e-10, "{got:?} vs {want:?}");
    }
    for b in [p.b_plus, p.b_minus] {
        let t = deflection_angle(a, -b).unwrap();
        assert!(wrap_angle(t - theta).abs() < 1e-10);
    }
}

#[test]
fn branches_join_across_backscatter() {
    for &a in &[0.6 * PI, 0.75 * PI, 0.95 * PI] {
        let up = impact_branches(a, PI).unwrap();
        let down = impact_branches(a, -PI + 1e-12).unwrap();
        assert!((up.b_plus - down.b_minus).abs() < 1e-10);
        assert!((up.b_minus - down.b_plus).abs() < 1e-10);
    }
}

#[test]
fn closed_form_slopes_match_differences() {
    for &(a, t) in &[(PI / 4.0, 0.2), (0.6 * PI, 1.4), (0.75 * PI, -2.0), (0.3, -0.01), (2.9, 3.0)] {
        let (dp, dm) = impact_branch_slopes(a, t).unwrap();
        let (fp, fm) = finite_difference_slopes(a, t).unwrap();
        assert!((dp - fp).abs() < 1e-7 * dp.abs().max(1.0), "{a} {t}: {dp} vs {fp}");
        assert!((dm - fm).abs() < 1e-7 * dm.abs().max(1.0), "{a} {t}: {dm} vs {fm}");
    }
    let (dp, dm) = impact_branch_slopes(1.0, 0.0).unwrap();
    assert!(dp.abs() < 1e-14);
    assert!((dm + 0.5 / (0.5f64).tan()).abs() < 1e-12);
}

#[test]
fn slopes_outside_support_fail() {
    assert!(matches!(impact_branch_slopes(PI / 4.0, 1.0), Err(Error::OutsideSupport { .. })));
}

#[test]
fn hemisphere_is_a_cardioid() {
    for i in 0..=400 {
        let t = -PI + 2.0 * PI * i as f64 / 400.0;
        let d = normalized_distribution(PI / 2.0, t);
        assert!(d.supported);
        assert!((d.value - 0.25 * (0.5 * t).cos()).abs() < 1e-14);
    }
    let x = classical_diff_xsec(PI / 2.0, 0.0).unwrap();
    assert!((x.value - 0.5).abs() < 1e-15);
}

#[test]
fn full_sphere_limit() {
    let alpha = PI * (1.0 - 1e-9);
    for &t in &[0.0, 0.5, -2.0, PI] {
        let d = normalized_distribution(alpha, t).value;
        let expected = (1.0 + (0.5 * f64::abs(t)).sin()).sqrt() / 8.0;
        assert!((d - expected).abs() < 1e-8, "{t}: {d}");
    }
}

#[test]
fn small_cap_limit() {
    let eps: f64 = 1e-2;
    for &t in &[1e-8, 1e-7, -1e-7] {
        let d = normalized_distribution(eps, t).value;
        let scaled = d * eps * (eps * eps - 2.0 * f64::abs(t)).sqrt();
        assert!((scaled - 0.5).abs() < 0.005, "{t}: {scaled}");
    }
}

#[test]
fn unsupported_angles_are_zero() {
    let x = classical_diff_xsec(PI / 4.0, 1.0).unwrap();
    assert!(!x.supported);
    assert_eq!(x.value, 0.0);
}

#[test]
fn hard_disk_baseline() {
    assert!((hard_disk_diff_xsec(3.0, PI) - 1.5).abs() < 1e-15);
    assert_eq!(hard_disk_diff_xsec(3.0, 0.0), 0.0);
    assert!(hard_disk_diff_xsec(3.0, 1e-9) < 1e-9);
    let total = quadrature::integrate(|t| hard_disk_diff_xsec(3.0, t), -PI, PI, 1e-13, 1e-13).unwrap();
    assert!((total.value - 6.0).abs() < 1e-12);
}

#[test]
fn total_cross_section_is_the_contact_diameter() {
    for &(a, tol) in &[(PI / 2.0, 1e-8), (PI / 4.0, 1e-6), (0.9 * PI, 1e-8), (PI / 8.0, 1e-6), (0.47 * PI, 1e-6)] {
        let s = classical_total_xsec(a).unwrap();
        assert!((s / (2.0 * a.sin()) - 1.0).abs() < tol, "{a}: {s}");
    }
}

#[test]
fn unit_area() {
    for &a in &[PI / 8.0, PI / 4.0, 0.47 * PI, PI / 2.0, 5.0 * PI / 8.0, 0.75 * PI, 7.0 * PI / 8.0] {
        assert!((distribution_area(a).unwrap() - 1.0).abs() < 1e-6, "{a}");
    }
}

#[test]
fn beta_constructor_invariants() {
    let d = ClassicalDeflection::from_beta(0.8, 0.3).unwrap();
    assert_eq!(d.b_over_r, 0.8f64.sin() * 0.3f64.sin());
    assert_eq!(d.mu, -d.b_over_r);
    assert!(ClassicalDeflection::from_beta(0.8, 1.6).is_err());
    let e = ClassicalDeflection::from_beta(0.8, PI / 2.0).unwrap();
    assert!(e.theta.is_finite());
}

fn alpha_strategy() -> impl Strategy<Value = f64> {
    (0.02f64..0.98).prop_map(|x| x * PI)
}

fn support_point(alpha: f64, frac: f64) -> f64 {
    max_deflection(alpha).unwrap() * frac
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(400))]

    #[test]
    fn deflection_is_odd(alpha in alpha_strategy(), x in -0.999f64..0.999) {
        let mu = x * alpha.sin();
        let a = deflection_angle(alpha, mu).unwrap();
        let b = deflection_angle(alpha, -mu).unwrap();
        prop_assert!(wrap_angle(a + b).abs() < 1e-14);
    }

    #[test]
    fn branches_are_odd(alpha in alpha_strategy(), frac in 0.001f64..0.999) {
        let t = support_point(alpha, frac);
        let p = impact_branches(alpha, t).unwrap();
        let m = impact_branches(alpha, -t).unwrap();
        prop_assert!(p.valid && m.valid);
        prop_assert!((p.b_plus + m.b_plus).abs() < 1e-14);
        prop_assert!((p.b_minus + m.b_minus).abs() < 1e-14);
        prop_assert_eq!(normalized_distribution(alpha, t), normalized_distribution(alpha, -t));
    }

    #[test]
    fn branches_round_trip(alpha in alpha_strategy(), frac in -0.999f64..0.999) {
        let t = support_point(alpha, frac);
        prop_assume!(t != 0.0);
        let p = impact_branches(alpha, t).unwrap();
        let (dp, dm) = impact_branch_slopes(alpha, t).unwrap();
        for (b, slope) in [(p.b_plus, dp), (p.b_minus, dm)] {
            // near grazing incidence dtheta/db blows up and rounding in b is amplified
            prop_assume!(slope.abs() > 1e-4);
            let back = deflection_angle(alpha, -b).unwrap();
            prop_assert!(wrap_angle(back - t).abs() < 1e-10, "{} vs {}", back, t);
        }
    }

    #[test]
    fn branch_slopes_sum_to_cross_section(alpha in alpha_strategy(), frac in 0.02f64..0.98) {
        let t = support_point(alpha, frac);
        let h = 1e-6;
        let hi = impact_branches(alpha, t + h).unwrap();
        let lo = impact_branches(alpha, t - h).unwrap();
        let sum = ((hi.b_plus - lo.b_plus) / (2.0 * h)).abs() + ((hi.b_minus - lo.b_minus) / (2.0 * h)).abs();
        let x = classical_diff_xsec(alpha, t).unwrap().value;
        prop_assert!((sum / x - 1.0).abs() < 1e-5, "{} vs {}", sum, x);
    }

    #[test]
    fn monotone_branches(alpha in alpha_strategy(), f1 in 0.01f64..0.99, f2 in 0.01f64..0.99) {
        prop_assume!((f1 - f2).abs() > 1e-3);
        let (lo, hi) = if f1 < f2 { (f1, f2) } else { (f2, f1) };
        let a = impact_branches(alpha, support_point(alpha, lo)).unwrap();
        let b = impact_branches(alpha, support_point(alpha, hi)).unwrap();
        prop_assert!(b.b_minus < a.b_minus);
        if alpha > PI / 2.0 {
            prop_assert!(b.b_plus < a.b_plus);
        } else if alpha < PI / 2.0 {
            prop_assert!(b.b_plus > a.b_plus);
        }
    }
}
