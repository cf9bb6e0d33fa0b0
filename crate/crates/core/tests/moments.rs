use std::f64::consts::{FRAC_PI_2, PI};

use sphtri::moments::*;
use sphtri::quadrature::{integrate_2d, InnerDomain, IntegrandSpec, Substitution};
use sphtri::sampling::{estimate, estimate_with, RngStream, SideName, TriangleSampler};
use sphtri::sphere::triangle_metrics;

const QUADRANTAL: f64 = 3.053_831_916_438_027_020_250_557_7;
const RIGHT_ANGLE: f64 = 2.870_878_761_423_354_258_374_234_0;

/// Direct average over the triangle law with `b` fixed:
/// `(1/2π) ∫₀^π ∫₋₁¹ θ arccos(uv + √(1−u²)√(1−v²) cos θ) dv dθ`.
fn direct_given_b(u: f64, tol: f64) -> f64 {
    let s = (1.0 - u * u).sqrt();
    integrate_2d(
        |t, v: f64| t * (u * v + s * (1.0 - v * v).sqrt() * t.cos()).clamp(-1.0, 1.0).acos(),
        (0.0, PI),
        &[],
        |_| InnerDomain::new(-1.0, 1.0).substitution(Substitution::SqrtEndpoint),
        tol,
    )
    .unwrap()
    .value
        / (2.0 * PI)
}

#[test]
fn quadrantal_routes() {
    let agm = exp_alpha_a_given_b_half(QuadrantalRoute::Agm, 1e-12).unwrap();
    assert!((agm - QUADRANTAL).abs() < 1e-10, "{agm}");
    let single = exp_alpha_a_given_b_half(QuadrantalRoute::SingleIntegral, 1e-10).unwrap();
    assert!((single - QUADRANTAL).abs() < 1e-7, "{single}");
    let glasser = exp_alpha_a_given_b_half(QuadrantalRoute::Glasser, 1e-14).unwrap();
    assert!((glasser - QUADRANTAL).abs() < 1e-8, "{glasser}");
    let double = exp_alpha_a_given_b_half(QuadrantalRoute::DoubleIntegral, 1e-9).unwrap();
    assert!((double - QUADRANTAL).abs() < 1e-6, "{double}");
    let all = [agm, single, glasser, double];
    for x in all {
        for y in all {
            assert!((x - y).abs() < 1e-6);
        }
    }
}

#[test]
fn raw_and_substituted_double_integrands_agree() {
    let raw = integrate_2d(
        quadrantal_raw_integrand,
        (0.0, FRAC_PI_2),
        &[],
        |t| InnerDomain::new(0.0, t.cos()).substitution(Substitution::SqrtEndpoint),
        1e-11,
    )
    .unwrap()
    .value;
    let sub = integrate_2d(
        quadrantal_substituted_integrand,
        (0.0, FRAC_PI_2),
        &[],
        |_| InnerDomain::new(0.0, FRAC_PI_2),
        1e-11,
    )
    .unwrap()
    .value;
    assert!((raw - sub).abs() < 1e-8, "{raw} vs {sub}");
}

#[test]
fn single_integrand_continuity_at_right_angle() {
    let f = |t| {
        let c: f64 = f64::cos(t);
        0.25 * (2.0 - sphtri::special::gauss_2f1_half(c * c, 1e-16).unwrap() * c) * t
    };
    let mid = quadrantal_single_integrand(FRAC_PI_2);
    assert!((mid - FRAC_PI_2 / 2.0).abs() < 1e-15);
    assert!((f(FRAC_PI_2 - 1e-8) - mid).abs() < 1e-7);
    assert!((f(FRAC_PI_2 + 1e-8) - mid).abs() < 1e-7);
}

#[test]
fn right_angle_routes() {
    let closed = exp_alpha_a_given_beta_half(RightAngleRoute::ClosedForm, 1e-15).unwrap();
    assert!((closed - RIGHT_ANGLE).abs() < 1e-12, "{closed}");
    let double = exp_alpha_a_given_beta_half(RightAngleRoute::DoubleIntegral, 1e-10).unwrap();
    assert!((double - closed).abs() < 1e-7, "{double}");
    let single = exp_alpha_a_given_beta_half(RightAngleRoute::SingleIntegral, 1e-12).unwrap();
    assert!((single - closed).abs() < 1e-8, "{single}");
}

#[test]
fn antiderivative_identities() {
    let (first, _) = antiderivative_checks(PI / 3.0).unwrap();
    assert!((first + PI / 4.0).abs() < 1e-9);
    let t = 2.0 * PI / 3.0;
    let (first, second) = antiderivative_checks(t).unwrap();
    assert!((second - FRAC_PI_2 * (1.0 - t.sin())).abs() < 1e-9);
    assert!((first + FRAC_PI_2 * t.cos()).abs() < 1e-9);
    let (_, at_right) = antiderivative_checks(FRAC_PI_2).unwrap();
    assert!(at_right.abs() < 1e-9);
    for i in 1..20 {
        let t = i as f64 * PI / 20.0 + 0.01;
        let (a, b) = antiderivative_checks(t).unwrap();
        assert!((a + FRAC_PI_2 * t.cos()).abs() < 1e-9, "{t}");
        assert!((b - FRAC_PI_2 * (1.0 - t.sin())).abs() < 1e-9, "{t}");
    }
}

#[test]
fn branch_jacobian_sum_at_u_zero() {
    for i in 1..40 {
        let t = i as f64 * PI / 40.0 + 0.003;
        let c = t.cos();
        for j in 1..10 {
            let w = c * (j as f64 / 10.0);
            let bp = branch_solutions(0.0, w, t).unwrap();
            let lhs = 1.0 / bp.delta_at_phi.abs() + 1.0 / bp.delta_at_psi.abs();
            let rhs = 2.0 * w.abs() / (c.abs() * (c * c - w * w).sqrt());
            assert!((lhs - rhs).abs() < 1e-9 * rhs.max(1.0), "{t} {w}: {lhs} {rhs}");
        }
    }
}

#[test]
fn general_formula_matches_direct_average() {
    assert!((direct_given_b(0.0, 1e-10) - QUADRANTAL).abs() < 1e-7);
    assert!((direct_given_b(1.0, 1e-10) - PI * PI / 4.0).abs() < 1e-8);
    for u in [0.0, 0.2, 0.5, 0.8, 0.95, 1.0] {
        let formula = exp_alpha_a_given_b(u, 1e-8).unwrap().value;
        let direct = direct_given_b(u, 1e-10);
        assert!((formula - direct).abs() < 1e-6, "u={u}: {formula} vs {direct}");
    }
    let at_zero = exp_alpha_a_given_b(0.0, 1e-9).unwrap().value;
    assert!((at_zero - QUADRANTAL).abs() < 1e-6);
}

#[test]
fn general_formula_matches_fixed_side_monte_carlo() {
    for b in [PI / 3.0, 0.05] {
        let formula = exp_alpha_a_given_b(b.cos(), 1e-8).unwrap().value;
        let e = estimate(
            TriangleSampler::FixedSide(SideName::B, b),
            |m| m.alpha * m.a,
            1_000_000,
            RngStream::new(31, 0),
        )
        .unwrap();
        assert!(e.within(formula, 4.0), "b={b}: {} ± {} vs {formula}", e.mean, e.stderr);
    }
}

#[test]
fn restricted_total_expectation() {
    // ∫₀^{π/2} E(αa | b) ½ sin b db = ½ ∫₀¹ E(αa | u) du
    let integral = 0.5
        * IntegrandSpec::new(|u: f64| exp_alpha_a_given_b(u, 1e-8).map_or(f64::NAN, |r| r.value), 0.0, 1.0)
            .integrate(1e-6)
            .unwrap()
            .value;
    let e = estimate_with(
        |rng| {
            let t = sphtri::sampling::random_triangle(rng);
            let m = triangle_metrics(&t).unwrap();
            Ok(if m.b < FRAC_PI_2 { m.alpha * m.a } else { 0.0 })
        },
        1_000_000,
        RngStream::new(32, 0),
    )
    .unwrap();
    assert!(e.within(integral, 4.0), "{} ± {} vs {integral}", e.mean, e.stderr);
}

#[test]
fn unconditional_routes() {
    let miles = exp_alpha_a_unconditional(UnconditionalRoute::MilesIdentity).unwrap();
    assert!((miles.value - 2.934_802_200_544_679).abs() < 1e-14);
    let stream = RngStream::new(33, 0);
    let mc = exp_alpha_a_unconditional(UnconditionalRoute::MonteCarlo { n: 1_000_000, stream }).unwrap();
    assert!((mc.value - miles.value).abs() <= 4.0 * mc.stderr.unwrap());
    let a2 = estimate(TriangleSampler::Uniform, |m| m.a * m.a, 1_000_000, RngStream::new(34, 0)).unwrap();
    let combined = (mc.stderr.unwrap().powi(2) + a2.stderr.powi(2)).sqrt();
    assert!((mc.value - a2.mean).abs() <= 4.0 * combined);
}
