//! Mixed moments `E(αa)` of a random spherical triangle: unconditionally,
//! given a side `b`, and given a right angle `β = π/2`.
//!
//! The law of cosines `w = uv + √(1−u²)√(1−v²) cos θ` with `u = cos b`,
//! `v = cos c`, `w = cos a`, `θ = α` is inverted for `v`; the two roots are
//! [`BranchPoint::phi_value`] and [`BranchPoint::psi_value`].

use std::f64::consts::{FRAC_PI_2, LN_2, PI};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::quadrature::{integrate_2d, InnerDomain, IntegrandSpec, QuadratureError, QuadratureResult, Substitution};
use crate::sampling::{estimate, RngStream, SamplingError, TriangleSampler};
use crate::special::{agm, catalan, f43_at_one, gauss_2f1_half, SpecialError, MIN_SERIES_TOL};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MomentsError {
    #[error("no real branch: discriminant {discriminant:e} at u={u}, w={w}, theta={theta}")]
    DomainError {
        u: f64,
        w: f64,
        theta: f64,
        discriminant: f64,
    },
    #[error("u = {0} outside [0, 1]")]
    InvalidCosine(f64),
    #[error(transparent)]
    Quadrature(#[from] QuadratureError),
    #[error(transparent)]
    Special(#[from] SpecialError),
    #[error(transparent)]
    Sampling(#[from] SamplingError),
}

/// The two roots `v = φ, ψ` of the law of cosines at `(u, w, θ)` together
/// with the Jacobian `δ` at each root and the bound `ξ(u, θ)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BranchPoint {
    pub u: f64,
    pub w: f64,
    pub theta: f64,
    pub phi_value: f64,
    pub psi_value: f64,
    pub delta_at_phi: f64,
    pub delta_at_psi: f64,
    pub xi_value: f64,
}

/// `δ(u, v, θ) = u − √(1−u²) v cos θ / √(1−v²)`.
pub fn jacobian(u: f64, v: f64, theta: f64) -> f64 {
    u - (1.0 - u * u).sqrt() * v * theta.cos() / (1.0 - v * v).sqrt()
}

/// `ξ(u, θ) = √(u² + (1−u²) cos²θ)`.
pub fn xi(u: f64, theta: f64) -> f64 {
    let c = theta.cos();
    (u * u + (1.0 - u * u) * c * c).sqrt()
}

pub fn branch_solutions(u: f64, w: f64, theta: f64) -> Result<BranchPoint, MomentsError> {
    let c = theta.cos();
    let s = 1.0 - u * u;
    let disc = u * u - w * w + s * c * c;
    let den = u * u + s * c * c;
    if disc < -1e-15 || den <= 0.0 {
        return Err(MomentsError::DomainError {
            u,
            w,
            theta,
            discriminant: disc,
        });
    }
    let root = c.abs() * (s * disc.max(0.0)).sqrt();
    let phi = ((u * w + root) / den).clamp(-1.0, 1.0);
    let psi = ((u * w - root) / den).clamp(-1.0, 1.0);
    Ok(BranchPoint {
        u,
        w,
        theta,
        phi_value: phi,
        psi_value: psi,
        delta_at_phi: jacobian(u, phi, theta),
        delta_at_psi: jacobian(u, psi, theta),
        xi_value: den.sqrt(),
    })
}

/// `Σ 1/|δ|` over the requested admissible roots, given the discriminant
/// `ξ² − w²`.
///
/// At an admissible root `w − uv = √(1−u²) cos θ √(1−v²)`, which turns the
/// Jacobian into `δ = (uw − vξ²)/(w − uv)`, i.e.
/// `|δ(φ, ψ)|⁻¹ = |w√(1−u²)|cos θ|/√disc ∓ u| / ξ²`. Unlike the direct form
/// this has no cancellation near the branch point `w = ±ξ`.
fn branch_weight(u: f64, w: f64, c: f64, disc: f64, use_phi: bool, use_psi: bool) -> f64 {
    let s = 1.0 - u * u;
    let xi2 = u * u + s * c * c;
    if disc <= 0.0 || xi2 <= 0.0 {
        return 0.0;
    }
    let a = w * s.sqrt() * c.abs() / disc.sqrt();
    let mut total = 0.0;
    if use_phi {
        total += (a - u).abs();
    }
    if use_psi {
        total += (a + u).abs();
    }
    total / xi2
}

/// Integrand over the strip `|w| ≤ u`.
fn strip_integrand(u: f64, theta: f64, w: f64) -> f64 {
    let c = theta.cos();
    let disc = u * u - w * w + (1.0 - u * u) * c * c;
    let (phi, psi) = if theta < FRAC_PI_2 { (false, true) } else { (true, false) };
    theta * w.clamp(-1.0, 1.0).acos() * branch_weight(u, w, c, disc, phi, psi)
}

/// Integrand over the two-to-one band in the variable `t ∈ [−π/2, π/2]`,
/// with `w = m + h sin t` spanning `[u, ξ]` for `θ < π/2` and `[−ξ, −u]`
/// otherwise; includes the factor `dw/dt`.
fn band_integrand(u: f64, theta: f64, t: f64) -> f64 {
    let c = theta.cos();
    let x = xi(u, theta);
    let h = 0.5 * (x - u);
    let (st, ct) = t.sin_cos();
    let (w, disc) = if theta < FRAC_PI_2 {
        // ξ − w = h(1 − sin t)
        let gap = h * ct * ct / (1.0 + st);
        let w = 0.5 * (x + u) + h * st;
        (w, gap * (2.0 * x - gap))
    } else {
        // ξ + w = h(1 + sin t)
        let gap = h * ct * ct / (1.0 - st);
        let w = -0.5 * (x + u) + h * st;
        (w, gap * (2.0 * x - gap))
    };
    if !disc.is_finite() {
        return 0.0;
    }
    theta * w.clamp(-1.0, 1.0).acos() * branch_weight(u, w, c, disc, true, true) * h * ct
}

fn sum_parts(parts: &[QuadratureResult], scale: f64) -> QuadratureResult {
    QuadratureResult {
        value: parts.iter().map(|p| p.value).sum::<f64>() * scale,
        error_estimate: parts.iter().map(|p| p.error_estimate).sum::<f64>() * scale,
        evaluations: parts.iter().map(|p| p.evaluations).sum(),
        converged: parts.iter().all(|p| p.converged),
    }
}

/// `E(αa | b)` with `u = cos b ∈ [0, 1]`, as four iterated integrals over
/// `(θ, w)`: the one-to-one strip `|w| ≤ u` and the two-to-one bands
/// `u ≤ w ≤ ξ` (θ < π/2) and `−ξ ≤ w ≤ −u` (θ > π/2).
///
/// In the one-to-one strip the admissible root is `ψ` for `θ < π/2` and `φ`
/// for `θ > π/2`; there `w − uv` must share the sign of `cos θ`.
pub fn exp_alpha_a_given_b(u: f64, tol: f64) -> Result<QuadratureResult, MomentsError> {
    if !(0.0..=1.0).contains(&u) {
        return Err(MomentsError::InvalidCosine(u));
    }
    let piece_tol = tol / 4.0 * 2.0 * PI;
    let mut parts = Vec::with_capacity(4);
    for outer in [(0.0, FRAC_PI_2), (FRAC_PI_2, PI)] {
        if u > 0.0 {
            parts.push(integrate_2d(
                |t, w| strip_integrand(u, t, w),
                outer,
                &[],
                |_| InnerDomain::new(-u, u),
                piece_tol,
            )?);
        }
        if u < 1.0 {
            parts.push(integrate_2d(
                |t, s| band_integrand(u, t, s),
                outer,
                &[],
                |_| InnerDomain::new(-FRAC_PI_2, FRAC_PI_2),
                piece_tol,
            )?);
        }
    }
    Ok(sum_parts(&parts, 1.0 / (2.0 * PI)))
}

/// Routes to `E(αa | b = π/2)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum QuadrantalRoute {
    /// `¼ ∫₀^π [2 − ₂F₁(½,½;2;cos²θ) cos θ] θ dθ`.
    SingleIntegral,
    /// `−∫_{π/2}^π (sin θ + θ cos θ) / agm(1, sin θ) dθ`.
    Agm,
    /// `π²/2 − 4G/π − (2/π) ₄F₃(1)`.
    Glasser,
    /// The iterated integral over `(θ, w)` with `w = cos θ sin φ`.
    DoubleIntegral,
}

impl QuadrantalRoute {
    pub const ALL: [QuadrantalRoute; 4] = [
        QuadrantalRoute::SingleIntegral,
        QuadrantalRoute::Agm,
        QuadrantalRoute::Glasser,
        QuadrantalRoute::DoubleIntegral,
    ];

    pub fn name(self) -> &'static str {
        match self {
            QuadrantalRoute::SingleIntegral => "single_integral",
            QuadrantalRoute::Agm => "agm",
            QuadrantalRoute::Glasser => "glasser",
            QuadrantalRoute::DoubleIntegral => "double_integral",
        }
    }
}

/// Integrand of the single-integral route.
pub fn quadrantal_single_integrand(theta: f64) -> f64 {
    let c = theta.cos();
    match gauss_2f1_half(c * c, 1e-16) {
        Ok(f) => 0.25 * (2.0 - f * c) * theta,
        Err(_) => f64::NAN,
    }
}

/// Inner integrand `θ w arccos w / (cos θ √(cos²θ − w²))` of the double
/// integral, before any substitution.
pub fn quadrantal_raw_integrand(theta: f64, w: f64) -> f64 {
    let c = theta.cos();
    let r = c * c - w * w;
    if r <= 0.0 {
        return 0.0;
    }
    theta * w * w.acos() / (c * r.sqrt())
}

/// The same integrand after `w = cos θ sin φ`, on `φ ∈ [0, π/2]`, for
/// either half of the θ range.
pub fn quadrantal_substituted_integrand(theta: f64, phi: f64) -> f64 {
    let s = phi.sin();
    theta * s * (theta.cos() * s).clamp(-1.0, 1.0).acos()
}

pub fn exp_alpha_a_given_b_half(route: QuadrantalRoute, tol: f64) -> Result<f64, MomentsError> {
    Ok(match route {
        QuadrantalRoute::SingleIntegral => {
            IntegrandSpec::new(quadrantal_single_integrand, 0.0, PI)
                .singular_at(&[FRAC_PI_2])
                .substitution(Substitution::LogEndpoint)
                .integrate(tol)?
                .value
        }
        QuadrantalRoute::Agm => {
            let f = |t: f64| match agm(1.0, t.sin(), 1e-16) {
                Ok(m) => -(t.sin() + t * t.cos()) / m,
                Err(_) => 0.0,
            };
            IntegrandSpec::new(f, FRAC_PI_2, PI)
                .substitution(Substitution::LogEndpoint)
                .integrate(tol)?
                .value
        }
        QuadrantalRoute::Glasser => {
            let g = catalan(tol.max(MIN_SERIES_TOL))?.value;
            let f = f43_at_one(tol.max(MIN_SERIES_TOL))?.value;
            PI * PI / 2.0 - 4.0 * g / PI - 2.0 / PI * f
        }
        QuadrantalRoute::DoubleIntegral => {
            integrate_2d(
                quadrantal_substituted_integrand,
                (0.0, PI),
                &[FRAC_PI_2],
                |_| InnerDomain::new(0.0, FRAC_PI_2),
                tol * PI,
            )?
            .value
                / PI
        }
    })
}

/// Routes to `E(αa | β = π/2)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum RightAngleRoute {
    /// `(π/4)[2 + (1 + ln 2)π − 4G]`.
    ClosedForm,
    /// The iterated integral over `(θ, w)` with `w = cos θ sin φ`.
    DoubleIntegral,
    /// `(π/4) ∫₀^π θ tan θ [cos θ + sin θ − 1] dθ`.
    SingleIntegral,
}

impl RightAngleRoute {
    pub const ALL: [RightAngleRoute; 3] = [
        RightAngleRoute::ClosedForm,
        RightAngleRoute::DoubleIntegral,
        RightAngleRoute::SingleIntegral,
    ];

    pub fn name(self) -> &'static str {
        match self {
            RightAngleRoute::ClosedForm => "closed_form",
            RightAngleRoute::DoubleIntegral => "double_integral",
            RightAngleRoute::SingleIntegral => "single_integral",
        }
    }
}

/// Width of the band around π/2 where the single integrand uses its
/// simplified form.
pub const REMOVABLE_BAND: f64 = 1e-4;

/// `θ tan θ (cos θ + sin θ − 1)`, continuous at π/2 with value π/2.
///
/// Inside the band the identity `tan θ (sin θ − 1) = −sin θ cos θ / (1 + sin θ)`
/// removes the cancellation.
pub fn right_angle_single_integrand(theta: f64) -> f64 {
    let (s, c) = theta.sin_cos();
    if (theta - FRAC_PI_2).abs() < REMOVABLE_BAND {
        theta * (s - s * c / (1.0 + s))
    } else {
        theta * (s / c) * (c + s - 1.0)
    }
}

/// Double integrand in `(θ, φ)` after `w = cos θ sin φ`.
pub fn right_angle_substituted_integrand(theta: f64, phi: f64) -> f64 {
    let (st, ct) = theta.sin_cos();
    let (sp, cp) = phi.sin_cos();
    let base = st * st + ct * ct * cp * cp;
    if base == 0.0 {
        return 0.0;
    }
    theta * sp * (ct * sp).clamp(-1.0, 1.0).acos() * st * st * st / (base * base.sqrt())
}

pub fn right_angle_closed_form(tol: f64) -> Result<f64, MomentsError> {
    let g = catalan(tol.max(MIN_SERIES_TOL))?.value;
    Ok(PI / 4.0 * (2.0 + (1.0 + LN_2) * PI - 4.0 * g))
}

pub fn exp_alpha_a_given_beta_half(route: RightAngleRoute, tol: f64) -> Result<f64, MomentsError> {
    Ok(match route {
        RightAngleRoute::ClosedForm => right_angle_closed_form(tol)?,
        RightAngleRoute::DoubleIntegral => {
            0.5 * integrate_2d(
                right_angle_substituted_integrand,
                (0.0, PI),
                &[FRAC_PI_2],
                |t| {
                    // the inner peak near φ = π/2 has width ≈ |sin θ|
                    let edge = FRAC_PI_2 - t.sin().abs();
                    let pts: Vec<f64> = [edge].into_iter().filter(|&p| p > 0.0).collect();
                    InnerDomain::new(0.0, FRAC_PI_2).singular_at(&pts)
                },
                2.0 * tol,
            )?
            .value
        }
        RightAngleRoute::SingleIntegral => {
            PI / 4.0
                * IntegrandSpec::new(right_angle_single_integrand, 0.0, PI)
                    .singular_at(&[FRAC_PI_2])
                    .integrate(tol * 4.0 / PI)?
                    .value
        }
    })
}

/// The two definite integrals behind the single-integral reduction at
/// `β = π/2`, oriented from 0 towards `cos θ`:
/// the bracket `arccos(w) √((cos²θ − w²)/(1 − w²))` (expected `−(π/2) cos θ`)
/// and `∫ √(cos²θ − w²)/(1 − w²) dw` (expected `(π/2)(1 − sin θ)`).
pub fn antiderivative_checks(theta: f64) -> Result<(f64, f64), MomentsError> {
    let c = theta.cos();
    let bracket = |w: f64| w.acos() * ((c * c - w * w).max(0.0) / (1.0 - w * w)).sqrt();
    let (lo, hi) = if c >= 0.0 { (0.0, c) } else { (c, 0.0) };
    let first = if c >= 0.0 {
        bracket(c) - bracket(0.0)
    } else {
        bracket(0.0) - bracket(c)
    };
    let second = if hi - lo <= 0.0 {
        0.0
    } else {
        IntegrandSpec::new(|w: f64| (c * c - w * w).max(0.0).sqrt() / (1.0 - w * w), lo, hi)
            .substitution(Substitution::SqrtEndpoint)
            .integrate(1e-13)?
            .value
    };
    Ok((first, second))
}

/// A value together with Monte Carlo uncertainty where applicable.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RouteValue {
    pub value: f64,
    pub stderr: Option<f64>,
    pub n_samples: Option<usize>,
}

impl RouteValue {
    pub fn exact(value: f64) -> Self {
        Self {
            value,
            stderr: None,
            n_samples: None,
        }
    }
}

/// Routes to the unconditional `E(αa)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum UnconditionalRoute {
    MilesIdentity,
    MonteCarlo { n: usize, stream: RngStream },
}

/// `E(VS) = 3π²/2 − 6` for a random triangle.
pub fn miles_vs() -> f64 {
    1.5 * PI * PI - 6.0
}

/// Solves `3E(αa) + 6E(αb) − 3πE(a) = E(VS)` for `E(αa)`, with `E(αb) =
/// E(α)E(b)` by independence and `E(a) = E(α) = E(b) = π/2`.
pub fn miles_alpha_a() -> f64 {
    let mean_side = FRAC_PI_2;
    let mean_angle = FRAC_PI_2;
    let alpha_b = mean_angle * mean_side;
    (miles_vs() - 6.0 * alpha_b + 3.0 * PI * mean_side) / 3.0
}

pub fn exp_alpha_a_unconditional(route: UnconditionalRoute) -> Result<RouteValue, MomentsError> {
    match route {
        UnconditionalRoute::MilesIdentity => Ok(RouteValue::exact(miles_alpha_a())),
        UnconditionalRoute::MonteCarlo { n, stream } => {
            let e = estimate(TriangleSampler::Uniform, |m| m.alpha * m.a, n, stream)?;
            Ok(RouteValue {
                value: e.mean,
                stderr: Some(e.stderr),
                n_samples: Some(e.n),
            })
        }
    }
}

impl fmt::Display for QuadrantalRoute {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl fmt::Display for RightAngleRoute {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for QuadrantalRoute {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::ALL
            .into_iter()
            .find(|r| r.name() == s)
            .ok_or_else(|| format!("unknown route '{s}'"))
    }
}

impl FromStr for RightAngleRoute {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::ALL
            .into_iter()
            .find(|r| r.name() == s)
            .ok_or_else(|| format!("unknown route '{s}'"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn branches_at_u_zero_are_opposite() {
        let bp = branch_solutions(0.0, 0.3, 0.7).unwrap();
        let c = 0.7f64.cos();
        let want = (c * c - 0.09).sqrt() / c.abs();
        assert!((bp.phi_value - want).abs() < 1e-14);
        assert!((bp.psi_value + want).abs() < 1e-14);
        assert!((bp.xi_value - c.abs()).abs() < 1e-15);
    }

    #[test]
    fn stable_weight_matches_direct_jacobian_at_admissible_roots() {
        for i in 0..30 {
            for j in 0..30 {
                for k in [0.13, 0.9, 1.7, 2.9] {
                    let u = 0.02 + 0.96 * i as f64 / 29.0;
                    let v = -0.98 + 1.96 * j as f64 / 29.0;
                    let t: f64 = k;
                    let c = t.cos();
                    let w = u * v + (1.0 - u * u).sqrt() * (1.0 - v * v).sqrt() * c;
                    let bp = branch_solutions(u, w, t).unwrap();
                    let is_phi = (bp.phi_value - v).abs() < (bp.psi_value - v).abs();
                    let disc = u * u - w * w + (1.0 - u * u) * c * c;
                    let stable = branch_weight(u, w, c, disc, is_phi, !is_phi);
                    let direct = 1.0 / jacobian(u, v, t).abs();
                    assert!((stable - direct).abs() < 1e-7 * direct.max(1.0), "{u} {v} {t}: {stable} {direct}");
                }
            }
        }
    }

    #[test]
    fn negative_discriminant_is_rejected() {
        assert!(matches!(
            branch_solutions(0.0, 0.9, 1.4),
            Err(MomentsError::DomainError { .. })
        ));
    }

    #[test]
    fn single_integrand_is_continuous_at_right_angle() {
        let mid = right_angle_single_integrand(FRAC_PI_2);
        assert!((mid - FRAC_PI_2).abs() < 1e-15);
        for h in [1e-3, 2e-4, 1.01e-4] {
            let l = right_angle_single_integrand(FRAC_PI_2 - h);
            let r = right_angle_single_integrand(FRAC_PI_2 + h);
            assert!((l - mid).abs() < 3.0 * h && (r - mid).abs() < 3.0 * h);
        }
        // both forms agree just outside the band
        let t = FRAC_PI_2 + 2e-4;
        let (s, c) = t.sin_cos();
        assert!((t * (s - s * c / (1.0 + s)) - right_angle_single_integrand(t)).abs() < 1e-10);
    }

    #[test]
    fn miles_arithmetic() {
        assert!((miles_alpha_a() - (PI * PI / 2.0 - 2.0)).abs() < 1e-14);
    }

    #[test]
    fn route_names_round_trip() {
        for r in QuadrantalRoute::ALL {
            assert_eq!(r.name().parse::<QuadrantalRoute>().unwrap(), r);
        }
        for r in RightAngleRoute::ALL {
            assert_eq!(r.name().parse::<RightAngleRoute>().unwrap(), r);
        }
    }
}
