//! Closed-form probability densities for the elements of a random
//! spherical triangle, unconditional and conditional on a side or angle
//! equal to π/2.
//!
//! Evaluators accept the closed support and return the continuous limit
//! where one exists. Points within [`SINGULAR_TOL`] of a logarithmic or
//! inverse-power singularity yield [`DensityError::SingularPoint`];
//! quadrature callers use the breakpoints from [`DensityId::breakpoints`]
//! and never evaluate there.

use std::f64::consts::{FRAC_PI_2, PI};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::quadrature::{integrate_2d, InnerDomain, IntegrandSpec, QuadratureError, QuadratureResult, Substitution};

/// Distance from a singular abscissa inside which evaluation is refused.
pub const SINGULAR_TOL: f64 = 1e-12;

/// Denominator bases below this are treated as singular.
pub const SINGULAR_BASE: f64 = 1e-14;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DensityError {
    #[error("{density} is singular at {point:?}")]
    SingularPoint { density: DensityId, point: Vec<f64> },
    #[error("{point:?} lies outside the support of {density}")]
    OutOfSupport { density: DensityId, point: Vec<f64> },
    #[error("{density} takes {expected} coordinates, got {got}")]
    Arity {
        density: DensityId,
        expected: usize,
        got: usize,
    },
    #[error(transparent)]
    Quadrature(#[from] QuadratureError),
}

/// `x − sin x cos x`, accurate for small `x`.
fn x_minus_sincos(x: f64) -> f64 {
    if x.abs() < 0.1 {
        // (2x − sin 2x)/2 = Σ_{k≥1} (−1)^{k+1} (2x)^{2k+1} / (2·(2k+1)!)
        let y = 2.0 * x;
        let y2 = y * y;
        let mut term = y * y2 / 6.0;
        let mut sum = 0.0f64;
        let mut k = 1.0;
        while term.abs() > 1e-18 * sum.abs().max(f64::MIN_POSITIVE) {
            sum += term;
            term *= -y2 / ((2.0 * k + 2.0) * (2.0 * k + 3.0));
            k += 1.0;
        }
        0.5 * sum
    } else {
        x - x.sin() * x.cos()
    }
}

/// `(x − sin x cos x) / sin²x`, with its limit 0 at `x = 0`.
fn excess_ratio(x: f64) -> f64 {
    if x == 0.0 {
        return 0.0;
    }
    let s = x.sin();
    x_minus_sincos(x) / (s * s)
}

/// `ln|cos x|` computed through `ln(1 − 2 sin²(x/2))` on the folded angle.
fn ln_abs_cos(x: f64) -> f64 {
    let y = x.min(PI - x);
    let h = (0.5 * y).sin();
    (-2.0 * h * h).ln_1p()
}

fn check_support(id: DensityId, point: &[f64]) -> Result<(), DensityError> {
    let ok = point
        .iter()
        .zip(id.support())
        .all(|(&x, (lo, hi))| x >= lo && x <= hi);
    if ok {
        Ok(())
    } else {
        Err(DensityError::OutOfSupport {
            density: id,
            point: point.to_vec(),
        })
    }
}

fn singular(id: DensityId, point: &[f64]) -> DensityError {
    DensityError::SingularPoint {
        density: id,
        point: point.to_vec(),
    }
}

/// Density of a side: `½ sin a` on `[0, π]`.
pub fn side_density(a: f64) -> Result<f64, DensityError> {
    check_support(DensityId::Side, &[a])?;
    Ok(0.5 * a.sin())
}

/// `1 − (cos β cos γ − sin β sin γ cos a)²` factored as `(1 − x)(1 + x)`.
fn joint_base(a: f64, beta: f64, gamma: f64) -> f64 {
    let sbg = beta.sin() * gamma.sin();
    let s_sum = (0.5 * (beta + gamma)).sin();
    let c_diff = (0.5 * (beta - gamma)).cos();
    let sa = (0.5 * a).sin();
    let ca = (0.5 * a).cos();
    let one_minus = 2.0 * (s_sum * s_sum - sbg * sa * sa);
    let one_plus = 2.0 * (c_diff * c_diff - sbg * ca * ca);
    one_minus.max(0.0) * one_plus.max(0.0)
}

fn joint_raw(a: f64, beta: f64, gamma: f64) -> f64 {
    let base = joint_base(a, beta, gamma);
    let num = beta.sin() * gamma.sin() * a.sin().powi(3);
    if num == 0.0 {
        return 0.0;
    }
    num / (4.0 * PI * base * base.sqrt())
}

/// Joint density of `(a, β, γ)`:
/// `(1/4π) sin β sin γ sin³a / (1 − (cos β cos γ − sin β sin γ cos a)²)^{3/2}`.
pub fn joint_density_a_beta_gamma(a: f64, beta: f64, gamma: f64) -> Result<f64, DensityError> {
    let id = DensityId::ABetaGamma;
    let p = [a, beta, gamma];
    check_support(id, &p)?;
    if joint_base(a, beta, gamma) < SINGULAR_BASE {
        return Err(singular(id, &p));
    }
    Ok(joint_raw(a, beta, gamma))
}

fn beta_gamma_given_a_half_raw(beta: f64, gamma: f64) -> f64 {
    let (sb, cb) = beta.sin_cos();
    let sg = gamma.sin();
    // 1 − cos²β cos²γ = sin²β + cos²β sin²γ
    let base = sb * sb + cb * cb * sg * sg;
    let num = sb * sg;
    if num == 0.0 {
        return 0.0;
    }
    num / (2.0 * PI * base * base.sqrt())
}

/// Conditional density of `(β, γ)` given `a = π/2`:
/// `(1/2π) sin β sin γ / (1 − cos²β cos²γ)^{3/2}`.
pub fn cond_density_beta_gamma_given_a_half(beta: f64, gamma: f64) -> Result<f64, DensityError> {
    let id = DensityId::BetaGammaGivenAHalf;
    let p = [beta, gamma];
    check_support(id, &p)?;
    let (sb, cb) = beta.sin_cos();
    let sg = gamma.sin();
    if sb * sb + cb * cb * sg * sg < SINGULAR_BASE {
        return Err(singular(id, &p));
    }
    Ok(beta_gamma_given_a_half_raw(beta, gamma))
}

fn a_gamma_given_beta_half_raw(a: f64, gamma: f64) -> f64 {
    let sa = a.sin();
    let (sg, cg) = gamma.sin_cos();
    // 1 − sin²γ cos²a = cos²γ + sin²γ sin²a
    let base = cg * cg + sg * sg * sa * sa;
    let num = sg * sa * sa * sa;
    if num == 0.0 {
        return 0.0;
    }
    num / (4.0 * base * base.sqrt())
}

/// Conditional density of `(a, γ)` given `β = π/2`:
/// `¼ sin γ sin³a / (1 − sin²γ cos²a)^{3/2}`. Bounded by ¼.
pub fn cond_density_a_gamma_given_beta_half(a: f64, gamma: f64) -> Result<f64, DensityError> {
    let id = DensityId::AGammaGivenBetaHalf;
    let p = [a, gamma];
    check_support(id, &p)?;
    let sa = a.sin();
    let (sg, cg) = gamma.sin_cos();
    if cg * cg + sg * sg * sa * sa < SINGULAR_BASE {
        return Err(singular(id, &p));
    }
    Ok(a_gamma_given_beta_half_raw(a, gamma))
}

/// One branch of the `(β, γ)` density: `(1/2π)·n(m) / (sin²β sin²γ)` with
/// `n(m) = m − sin m cos m`, written as `R(m)/sin²(other)`, `R = n/sin²`.
fn beta_gamma_branch(sign_diff: bool, sign_sum: bool, beta: f64, gamma: f64) -> f64 {
    // sign_diff: β − γ > 0; sign_sum: β + γ − π > 0
    let (m, other) = match (sign_diff, sign_sum) {
        // −cos γ sin γ + γ
        (true, false) => (gamma, beta),
        // π + cos γ sin γ − γ
        (false, true) => (PI - gamma, beta),
        // −cos β sin β + β
        (false, false) => (beta, gamma),
        // π + cos β sin β − β
        (true, true) => (PI - beta, gamma),
    };
    let so = other.sin();
    excess_ratio(m) / (2.0 * PI * so * so)
}

fn beta_gamma_raw(beta: f64, gamma: f64) -> f64 {
    let d = beta - gamma;
    let s = beta + gamma - PI;
    let diffs: &[bool] = if d > 0.0 {
        &[true]
    } else if d < 0.0 {
        &[false]
    } else {
        &[true, false]
    };
    let sums: &[bool] = if s > 0.0 {
        &[true]
    } else if s < 0.0 {
        &[false]
    } else {
        &[true, false]
    };
    let mut total = 0.0;
    let mut count = 0.0;
    for &dd in diffs {
        for &ss in sums {
            total += beta_gamma_branch(dd, ss, beta, gamma);
            count += 1.0;
        }
    }
    total / count
}

/// Unconditional density of two angles `(β, γ)`; four branches keyed on the
/// signs of `β − γ` and `β + γ − π`, averaged on the branch boundaries.
pub fn joint_density_beta_gamma(beta: f64, gamma: f64) -> Result<f64, DensityError> {
    let id = DensityId::BetaGamma;
    let p = [beta, gamma];
    check_support(id, &p)?;
    let on_corner = |x: f64| x.sin() < SINGULAR_TOL;
    if on_corner(beta) && on_corner(gamma) {
        return Err(singular(id, &p));
    }
    let v = beta_gamma_raw(beta, gamma);
    if v.is_finite() {
        Ok(v)
    } else {
        Err(singular(id, &p))
    }
}

fn beta_given_gamma_half_raw(beta: f64) -> f64 {
    if beta <= FRAC_PI_2 {
        0.5 * excess_ratio(beta)
    } else {
        0.5 * excess_ratio(PI - beta)
    }
}

/// Conditional density of `β` given `γ = π/2`:
/// `½(−cot β + β csc²β)` below π/2, `½(cot β + (π−β) csc²β)` above, π/4 at π/2.
pub fn cond_density_beta_given_gamma_half(beta: f64) -> Result<f64, DensityError> {
    check_support(DensityId::BetaGivenGammaHalf, &[beta])?;
    Ok(beta_given_gamma_half_raw(beta))
}

/// Which law of cosines produced the product of cosines.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ProductVariant {
    /// `cos a · cos b` with independent uniform cosines: `−½ ln|w|`.
    Sides,
    /// `−cos α cos β` given `c = π/2`: `−(1/π) ln|w| / (1 − w²)^{3/2}`.
    Angles,
}

fn product_cosine_raw(w: f64, variant: ProductVariant) -> f64 {
    let l = w.abs().ln();
    match variant {
        ProductVariant::Sides => -0.5 * l,
        ProductVariant::Angles => {
            let base = (1.0 - w) * (1.0 + w);
            -l / (PI * base * base.sqrt())
        }
    }
}

pub fn product_cosine_density(w: f64, variant: ProductVariant) -> Result<f64, DensityError> {
    let id = match variant {
        ProductVariant::Sides => DensityId::ProductCosineSides,
        ProductVariant::Angles => DensityId::ProductCosineAngles,
    };
    check_support(id, &[w])?;
    if w.abs() <= SINGULAR_TOL {
        return Err(singular(id, &[w]));
    }
    if variant == ProductVariant::Angles && 1.0 - w.abs() <= SINGULAR_TOL {
        return Err(singular(id, &[w]));
    }
    Ok(product_cosine_raw(w, variant))
}

fn c_given_gamma_half_raw(c: f64) -> f64 {
    -0.5 * c.sin() * ln_abs_cos(c)
}

/// Conditional density of side `c` given `γ = π/2`: `−½ sin c ln|cos c|`.
pub fn cond_density_c_given_gamma_half(c: f64) -> Result<f64, DensityError> {
    let id = DensityId::CGivenGammaHalf;
    check_support(id, &[c])?;
    if (c - FRAC_PI_2).abs() <= SINGULAR_TOL {
        return Err(singular(id, &[c]));
    }
    Ok(c_given_gamma_half_raw(c))
}

fn gamma_given_c_half_raw(gamma: f64) -> f64 {
    let y = gamma.min(PI - gamma);
    let h = (0.5 * y).sin();
    let x = 2.0 * h * h;
    // −ln(1 − x)/x, then divide by sin²γ/x = 2(1 − h²)
    let ratio = if x < 1e-8 {
        1.0 + 0.5 * x + x * x / 3.0
    } else {
        -(-x).ln_1p() / x
    };
    ratio / (2.0 * (1.0 - h * h)) / PI
}

/// Conditional density of angle `γ` given `c = π/2`: `−(1/π) ln|cos γ| / sin²γ`,
/// with limit `1/(2π)` at both ends.
pub fn cond_density_gamma_given_c_half(gamma: f64) -> Result<f64, DensityError> {
    let id = DensityId::GammaGivenCHalf;
    check_support(id, &[gamma])?;
    if (gamma - FRAC_PI_2).abs() <= SINGULAR_TOL {
        return Err(singular(id, &[gamma]));
    }
    Ok(gamma_given_c_half_raw(gamma))
}

/// Every density this module implements.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum DensityId {
    Side,
    ABetaGamma,
    BetaGammaGivenAHalf,
    AGammaGivenBetaHalf,
    BetaGamma,
    BetaGivenGammaHalf,
    ProductCosineSides,
    ProductCosineAngles,
    CGivenGammaHalf,
    GammaGivenCHalf,
}

impl DensityId {
    pub const ALL: [DensityId; 10] = [
        DensityId::Side,
        DensityId::ABetaGamma,
        DensityId::BetaGammaGivenAHalf,
        DensityId::AGammaGivenBetaHalf,
        DensityId::BetaGamma,
        DensityId::BetaGivenGammaHalf,
        DensityId::ProductCosineSides,
        DensityId::ProductCosineAngles,
        DensityId::CGivenGammaHalf,
        DensityId::GammaGivenCHalf,
    ];

    pub fn name(self) -> &'static str {
        match self {
            DensityId::Side => "side",
            DensityId::ABetaGamma => "a_beta_gamma",
            DensityId::BetaGammaGivenAHalf => "beta_gamma_given_a_half",
            DensityId::AGammaGivenBetaHalf => "a_gamma_given_beta_half",
            DensityId::BetaGamma => "beta_gamma",
            DensityId::BetaGivenGammaHalf => "beta_given_gamma_half",
            DensityId::ProductCosineSides => "product_cosine_sides",
            DensityId::ProductCosineAngles => "product_cosine_angles",
            DensityId::CGivenGammaHalf => "c_given_gamma_half",
            DensityId::GammaGivenCHalf => "gamma_given_c_half",
        }
    }

    /// Names of the coordinates, in argument order.
    pub fn variables(self) -> &'static [&'static str] {
        match self {
            DensityId::Side => &["a"],
            DensityId::ABetaGamma => &["a", "beta", "gamma"],
            DensityId::BetaGammaGivenAHalf | DensityId::BetaGamma => &["beta", "gamma"],
            DensityId::AGammaGivenBetaHalf => &["a", "gamma"],
            DensityId::BetaGivenGammaHalf => &["beta"],
            DensityId::ProductCosineSides | DensityId::ProductCosineAngles => &["w"],
            DensityId::CGivenGammaHalf => &["c"],
            DensityId::GammaGivenCHalf => &["gamma"],
        }
    }

    pub fn dimension(self) -> usize {
        match self {
            DensityId::ABetaGamma => 3,
            DensityId::BetaGammaGivenAHalf | DensityId::AGammaGivenBetaHalf | DensityId::BetaGamma => 2,
            _ => 1,
        }
    }

    /// Closed support, one interval per coordinate.
    pub fn support(self) -> Vec<(f64, f64)> {
        match self {
            DensityId::ProductCosineSides | DensityId::ProductCosineAngles => vec![(-1.0, 1.0)],
            other => vec![(0.0, PI); other.dimension()],
        }
    }

    /// Interior abscissae of 1-D densities where the integrand is singular
    /// or changes branch.
    pub fn breakpoints(self) -> Vec<f64> {
        match self {
            DensityId::CGivenGammaHalf | DensityId::GammaGivenCHalf | DensityId::BetaGivenGammaHalf => {
                vec![FRAC_PI_2]
            }
            DensityId::ProductCosineSides | DensityId::ProductCosineAngles => vec![0.0],
            _ => Vec::new(),
        }
    }

    /// Evaluates the density at `point` (length must equal [`Self::dimension`]).
    pub fn evaluate(self, point: &[f64]) -> Result<f64, DensityError> {
        if point.len() != self.dimension() {
            return Err(DensityError::Arity {
                density: self,
                expected: self.dimension(),
                got: point.len(),
            });
        }
        match self {
            DensityId::Side => side_density(point[0]),
            DensityId::ABetaGamma => joint_density_a_beta_gamma(point[0], point[1], point[2]),
            DensityId::BetaGammaGivenAHalf => cond_density_beta_gamma_given_a_half(point[0], point[1]),
            DensityId::AGammaGivenBetaHalf => cond_density_a_gamma_given_beta_half(point[0], point[1]),
            DensityId::BetaGamma => joint_density_beta_gamma(point[0], point[1]),
            DensityId::BetaGivenGammaHalf => cond_density_beta_given_gamma_half(point[0]),
            DensityId::ProductCosineSides => product_cosine_density(point[0], ProductVariant::Sides),
            DensityId::ProductCosineAngles => product_cosine_density(point[0], ProductVariant::Angles),
            DensityId::CGivenGammaHalf => cond_density_c_given_gamma_half(point[0]),
            DensityId::GammaGivenCHalf => cond_density_gamma_given_c_half(point[0]),
        }
    }

    fn raw_1d(self) -> Option<fn(f64) -> f64> {
        Some(match self {
            DensityId::Side => |a: f64| 0.5 * a.sin(),
            DensityId::BetaGivenGammaHalf => beta_given_gamma_half_raw,
            DensityId::ProductCosineSides => |w| product_cosine_raw(w, ProductVariant::Sides),
            DensityId::ProductCosineAngles => |w| product_cosine_raw(w, ProductVariant::Angles),
            DensityId::CGivenGammaHalf => c_given_gamma_half_raw,
            DensityId::GammaGivenCHalf => gamma_given_c_half_raw,
            _ => return None,
        })
    }

    fn substitution_1d(self) -> Substitution {
        match self {
            // inverse square-root growth at w = ±1
            DensityId::ProductCosineAngles => Substitution::SqrtEndpoint,
            _ => Substitution::None,
        }
    }

    /// `∫ x^k f(x) dx` over the support of a 1-D density.
    pub fn moment(self, k: i32, tol: f64) -> Result<QuadratureResult, DensityError> {
        let f = self.raw_1d().ok_or(DensityError::Arity {
            density: self,
            expected: self.dimension(),
            got: 1,
        })?;
        let (lo, hi) = self.support()[0];
        Ok(IntegrandSpec::new(move |x: f64| x.powi(k) * f(x), lo, hi)
            .singular_at(&self.breakpoints())
            .substitution(self.substitution_1d())
            .integrate(tol)?)
    }

    /// Total mass over the support.
    pub fn normalization(self, tol: f64) -> Result<QuadratureResult, DensityError> {
        match self.dimension() {
            1 => self.moment(0, tol),
            2 => {
                let f: fn(f64, f64) -> f64 = match self {
                    DensityId::BetaGammaGivenAHalf => beta_gamma_given_a_half_raw,
                    DensityId::AGammaGivenBetaHalf => a_gamma_given_beta_half_raw,
                    _ => beta_gamma_raw,
                };
                Ok(integrate_2d(
                    f,
                    (0.0, PI),
                    &[FRAC_PI_2],
                    |x| InnerDomain::new(0.0, PI).singular_at(&[x, PI - x, FRAC_PI_2]),
                    tol,
                )?)
            }
            _ => {
                let r = IntegrandSpec::new(
                    |a: f64| marginal_side_from_joint(a, tol / 10.0).map_or(f64::NAN, |r| r.value),
                    0.0,
                    PI,
                )
                .singular_at(&[FRAC_PI_2])
                .integrate(tol)?;
                Ok(r)
            }
        }
    }
}

/// `∫∫ f(a, β, γ) dβ dγ`, which should reproduce `½ sin a`.
pub fn marginal_side_from_joint(a: f64, tol: f64) -> Result<QuadratureResult, DensityError> {
    Ok(integrate_2d(
        |b, g| joint_raw(a, b, g),
        (0.0, PI),
        &[FRAC_PI_2],
        |b| InnerDomain::new(0.0, PI).singular_at(&[b, PI - b]),
        tol,
    )?)
}

impl fmt::Display for DensityId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for DensityId {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        DensityId::ALL
            .into_iter()
            .find(|d| d.name() == s)
            .ok_or_else(|| format!("unknown density '{s}'"))
    }
}
