//! The constants engine: every registered constant evaluated along each of
//! its routes and compared with a reference.

use std::f64::consts::{FRAC_PI_2, LN_2, PI};
use std::fmt::Write as _;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::densities::DensityId;
use crate::moments::{
    exp_alpha_a_given_b_half, exp_alpha_a_given_beta_half, exp_alpha_a_unconditional, miles_alpha_a, miles_vs,
    QuadrantalRoute, RightAngleRoute, RouteValue, UnconditionalRoute,
};
use crate::quadrature::{integrate_2d, InnerDomain};
use crate::sampling::{collect, correlation, estimate, MonteCarloEstimate, RngStream, SideName, TriangleSampler};
use crate::special::{
    catalan, catalan_ramanujan, f43_at_one, f43_dilog_integral, f43_from_trilog, li3_one_plus_i,
    re_li3_one_plus_i_closed_form, zeta3,
};
use crate::sphere::TriangleMetrics;
use crate::tessellation::{cell_statistics, CellScheme, CellStatistics};

/// `E(αa | b = π/2)` to 25 digits.
pub const QUADRANTAL_REFERENCE: &str = "3.0538319164380270202505577";

/// `E(αa | β = π/2)` to 25 digits.
pub const RIGHT_ANGLE_REFERENCE: &str = "2.8708787614233542583742340";

/// Double precision cannot reproduce 25-digit references; no check is
/// pinned tighter than this.
pub const PRECISION_CAP: f64 = 1e-12;

/// Number of standard errors a Monte Carlo route may deviate.
pub const MC_SIGMAS: f64 = 4.0;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum VerificationError {
    #[error("unknown constant `{0}`")]
    UnknownConstant(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SuiteConfig {
    /// Tolerance for checks between exact expressions.
    pub tol: f64,
    pub mc_samples: usize,
    pub seed: u64,
    pub tessellation_trials: usize,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        Self { tol: 1e-9, mc_samples: 1_000_000, seed: 0, tessellation_trials: 100_000 }
    }
}

/// How a route's result is judged.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum RouteKind {
    /// Closed-form arithmetic; tolerance `min(pinned, config.tol)`.
    Exact,
    /// Quadrature or series; tolerance `pinned`.
    Numerical,
    /// Sampled; tolerance `4·stderr`.
    MonteCarlo,
}

type Eval = fn(&SuiteConfig, RngStream) -> Result<RouteValue, String>;

pub struct Route {
    pub name: &'static str,
    pub kind: RouteKind,
    pub pinned: f64,
    eval: Eval,
}

pub struct Constant {
    pub name: &'static str,
    pub description: &'static str,
    /// Verbatim decimal reference, when the reference is a published decimal.
    pub reference_string: Option<&'static str>,
    reference: fn() -> Result<f64, String>,
    pub routes: Vec<Route>,
}

impl Constant {
    pub fn reference(&self) -> Result<f64, String> {
        (self.reference)()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConstantCheck {
    pub name: String,
    pub route: String,
    pub value: f64,
    pub reference: f64,
    pub abs_error: f64,
    pub tolerance: f64,
    pub pass: bool,
    pub n_samples: Option<usize>,
    pub stderr: Option<f64>,
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub config: SuiteConfig,
    pub checks: Vec<ConstantCheck>,
    pub pass: bool,
}

fn route(name: &'static str, kind: RouteKind, pinned: f64, eval: Eval) -> Route {
    Route { name, kind, pinned, eval }
}

fn err(e: impl ToString) -> String {
    e.to_string()
}

fn mc(e: MonteCarloEstimate) -> RouteValue {
    RouteValue { value: e.mean, stderr: Some(e.stderr), n_samples: Some(e.n) }
}

fn triangle_mc(
    sampler: TriangleSampler,
    f: fn(&TriangleMetrics) -> f64,
    c: &SuiteConfig,
    s: RngStream,
) -> Result<RouteValue, String> {
    estimate(sampler, f, c.mc_samples, s).map(mc).map_err(err)
}

fn tess(k: usize, scheme: CellScheme, c: &SuiteConfig, s: RngStream) -> Result<CellStatistics, String> {
    cell_statistics(k, scheme, c.tessellation_trials, s).map_err(err)
}

fn moment(d: DensityId, k: i32) -> Result<RouteValue, String> {
    d.moment(k, 1e-12).map(|r| RouteValue::exact(r.value)).map_err(err)
}

fn catalan_value() -> Result<f64, String> {
    catalan(1e-14).map(|s| s.value).map_err(err)
}

fn zeta3_value() -> Result<f64, String> {
    zeta3(1e-14).map(|s| s.value).map_err(err)
}

fn parse_reference(s: &str) -> Result<f64, String> {
    s.parse().map_err(err)
}

/// Every registered constant with its routes, in report order.
pub fn registry() -> Vec<Constant> {
    use RouteKind::*;
    let mut out = vec![
        Constant {
            name: "side_mean",
            description: "E(a)",
            reference_string: None,
            reference: || Ok(FRAC_PI_2),
            routes: vec![
                route("quadrature", Numerical, 1e-9, |_, _| moment(DensityId::Side, 1)),
                route("monte_carlo", MonteCarlo, 0.0, |c, s| triangle_mc(TriangleSampler::Uniform, |m| m.a, c, s)),
            ],
        },
        Constant {
            name: "side_sq",
            description: "E(a²)",
            reference_string: None,
            reference: || Ok(PI * PI / 2.0 - 2.0),
            routes: vec![
                route("quadrature", Numerical, 1e-9, |_, _| moment(DensityId::Side, 2)),
                route("monte_carlo", MonteCarlo, 0.0, |c, s| triangle_mc(TriangleSampler::Uniform, |m| m.a * m.a, c, s)),
            ],
        },
        Constant {
            name: "angle_sq",
            description: "E(α²)",
            reference_string: None,
            reference: || Ok(PI * PI / 3.0),
            routes: vec![
                route("marginal_quadrature", Numerical, 1e-6, |_, _| {
                    integrate_2d(
                        |b, g| b * b * DensityId::BetaGamma.evaluate(&[b, g]).unwrap_or(0.0),
                        (0.0, PI),
                        &[FRAC_PI_2],
                        |b| InnerDomain::new(0.0, PI).singular_at(&[b.min(PI - b), b.max(PI - b)]),
                        1e-8,
                    )
                    .map(|r| RouteValue::exact(r.value))
                    .map_err(err)
                }),
                route("monte_carlo", MonteCarlo, 0.0, |c, s| {
                    triangle_mc(TriangleSampler::Uniform, |m| m.alpha * m.alpha, c, s)
                }),
            ],
        },
        Constant {
            name: "alpha_b",
            description: "E(αb)",
            reference_string: None,
            reference: || Ok(PI * PI / 4.0),
            routes: vec![route("monte_carlo", MonteCarlo, 0.0, |c, s| {
                triangle_mc(TriangleSampler::Uniform, |m| m.alpha * m.b, c, s)
            })],
        },
        Constant {
            name: "corr_a_b",
            description: "corr(a, b)",
            reference_string: None,
            reference: || Ok(0.0),
            routes: vec![route("monte_carlo", MonteCarlo, 0.0, |c, s| {
                let t = collect(TriangleSampler::Uniform, c.mc_samples, s).map_err(err)?;
                let a: Vec<f64> = t.iter().map(|m| m.a).collect();
                let b: Vec<f64> = t.iter().map(|m| m.b).collect();
                correlation(&a, &b).map(mc).map_err(err)
            })],
        },
        Constant {
            name: "beta_given_gamma_half_mean",
            description: "E(β | γ = π/2)",
            reference_string: None,
            reference: || Ok(FRAC_PI_2),
            routes: vec![
                route("quadrature", Numerical, 1e-9, |_, _| moment(DensityId::BetaGivenGammaHalf, 1)),
                route("monte_carlo", MonteCarlo, 0.0, |c, s| triangle_mc(TriangleSampler::RightAngle, |m| m.gamma, c, s)),
            ],
        },
        Constant {
            name: "beta_sq_given_gamma_half",
            description: "E(β² | γ = π/2) = π²/2 − 7ζ(3)/4",
            reference_string: None,
            reference: || Ok(PI * PI / 2.0 - 1.75 * zeta3_value()?),
            routes: vec![
                route("quadrature", Numerical, 1e-8, |_, _| moment(DensityId::BetaGivenGammaHalf, 2)),
                route("monte_carlo", MonteCarlo, 0.0, |c, s| {
                    triangle_mc(TriangleSampler::RightAngle, |m| m.gamma * m.gamma, c, s)
                }),
            ],
        },
        Constant {
            name: "c_given_gamma_half_mean",
            description: "E(c | γ = π/2)",
            reference_string: None,
            reference: || Ok(FRAC_PI_2),
            routes: vec![route("quadrature", Numerical, 1e-9, |_, _| moment(DensityId::CGivenGammaHalf, 1))],
        },
        Constant {
            name: "c_sq_given_gamma_half",
            description: "E(c² | γ = π/2) = π²/2 − 6 + 4G",
            reference_string: None,
            reference: || Ok(PI * PI / 2.0 - 6.0 + 4.0 * catalan_value()?),
            routes: vec![
                route("quadrature", Numerical, 1e-8, |_, _| moment(DensityId::CGivenGammaHalf, 2)),
                route("monte_carlo", MonteCarlo, 0.0, |c, s| triangle_mc(TriangleSampler::RightAngle, |m| m.b * m.b, c, s)),
            ],
        },
        Constant {
            name: "gamma_given_c_half_mean",
            description: "E(γ | c = π/2)",
            reference_string: None,
            reference: || Ok(FRAC_PI_2),
            routes: vec![route("quadrature", Numerical, 1e-9, |_, _| moment(DensityId::GammaGivenCHalf, 1))],
        },
        Constant {
            name: "gamma_sq_given_c_half",
            description: "E(γ² | c = π/2) = π²/4 + ln²2",
            reference_string: None,
            reference: || Ok(PI * PI / 4.0 + LN_2 * LN_2),
            routes: vec![
                route("quadrature", Numerical, 1e-8, |_, _| moment(DensityId::GammaGivenCHalf, 2)),
                route("monte_carlo", MonteCarlo, 0.0, |c, s| {
                    triangle_mc(TriangleSampler::FixedSide(SideName::C, FRAC_PI_2), |m| m.gamma * m.gamma, c, s)
                }),
            ],
        },
        Constant {
            name: "alpha_a_given_b_half",
            description: "E(αa | b = π/2)",
            reference_string: Some(QUADRANTAL_REFERENCE),
            reference: || parse_reference(QUADRANTAL_REFERENCE),
            routes: vec![
                route("agm", Numerical, 1e-10, |_, _| quadrantal(QuadrantalRoute::Agm, 1e-12)),
                route("single_integral", Numerical, 1e-7, |_, _| quadrantal(QuadrantalRoute::SingleIntegral, 1e-10)),
                route("glasser", Numerical, 1e-8, |_, _| quadrantal(QuadrantalRoute::Glasser, 1e-14)),
                route("double_integral", Numerical, 1e-6, |_, _| quadrantal(QuadrantalRoute::DoubleIntegral, 1e-9)),
                route("monte_carlo", MonteCarlo, 0.0, |c, s| {
                    triangle_mc(TriangleSampler::FixedSide(SideName::B, FRAC_PI_2), |m| m.alpha * m.a, c, s)
                }),
            ],
        },
        Constant {
            name: "alpha_a_given_beta_half",
            description: "E(αa | β = π/2)",
            reference_string: Some(RIGHT_ANGLE_REFERENCE),
            reference: || parse_reference(RIGHT_ANGLE_REFERENCE),
            routes: vec![
                route("closed_form", Exact, PRECISION_CAP, |_, _| right_angle(RightAngleRoute::ClosedForm, 1e-15)),
                route("double_integral", Numerical, 1e-7, |_, _| right_angle(RightAngleRoute::DoubleIntegral, 1e-10)),
                route("single_integral", Numerical, 1e-8, |_, _| right_angle(RightAngleRoute::SingleIntegral, 1e-12)),
                route("monte_carlo", MonteCarlo, 0.0, |c, s| {
                    triangle_mc(TriangleSampler::RightAngle, |m| m.alpha * m.a, c, s)
                }),
            ],
        },
        Constant {
            name: "alpha_a",
            description: "E(αa) = π²/2 − 2",
            reference_string: None,
            reference: || Ok(PI * PI / 2.0 - 2.0),
            routes: vec![
                route("miles_identity", Exact, PRECISION_CAP, |_, _| {
                    exp_alpha_a_unconditional(UnconditionalRoute::MilesIdentity).map_err(err)
                }),
                route("monte_carlo", MonteCarlo, 0.0, |c, s| {
                    exp_alpha_a_unconditional(UnconditionalRoute::MonteCarlo { n: c.mc_samples, stream: s }).map_err(err)
                }),
            ],
        },
        Constant {
            name: "vs_product",
            description: "E(VS) = 3π²/2 − 6",
            reference_string: None,
            reference: || Ok(miles_vs()),
            routes: vec![
                route("miles_arithmetic", Exact, PRECISION_CAP, |_, _| {
                    Ok(RouteValue::exact(3.0 * miles_alpha_a() + 6.0 * PI * PI / 4.0 - 3.0 * PI * FRAC_PI_2))
                }),
                route("monte_carlo", MonteCarlo, 0.0, |c, s| {
                    triangle_mc(TriangleSampler::Uniform, |m| m.excess * m.perimeter, c, s)
                }),
            ],
        },
        Constant {
            name: "tess_k3_area",
            description: "E₃(V) = π/2",
            reference_string: None,
            reference: || Ok(FRAC_PI_2),
            routes: vec![route("tessellation_mc", MonteCarlo, 0.0, |c, s| {
                Ok(mc(tess(3, CellScheme::Uniform, c, s)?.area))
            })],
        },
        Constant {
            name: "tess_k3_perimeter",
            description: "E₃(S) = 3π/2",
            reference_string: None,
            reference: || Ok(1.5 * PI),
            routes: vec![route("tessellation_mc", MonteCarlo, 0.0, |c, s| {
                Ok(mc(tess(3, CellScheme::Uniform, c, s)?.perimeter))
            })],
        },
        Constant {
            name: "tess_k3_vs",
            description: "E₃(VS) = 3π²/2 − 6",
            reference_string: None,
            reference: || Ok(miles_vs()),
            routes: vec![route("tessellation_mc", MonteCarlo, 0.0, |c, s| {
                Ok(mc(tess(3, CellScheme::Uniform, c, s)?.area_perimeter))
            })],
        },
        Constant {
            name: "tess_k4_n3",
            description: "P(N = 3) for k = 4",
            reference_string: None,
            reference: || Ok(4.0 / 7.0),
            routes: vec![route("tessellation_mc", MonteCarlo, 0.0, |c, s| {
                Ok(mc(tess(4, CellScheme::Uniform, c, s)?.frequency(3)))
            })],
        },
        Constant {
            name: "tess_k4_n4",
            description: "P(N = 4) for k = 4",
            reference_string: None,
            reference: || Ok(3.0 / 7.0),
            routes: vec![route("tessellation_mc", MonteCarlo, 0.0, |c, s| {
                Ok(mc(tess(4, CellScheme::Uniform, c, s)?.frequency(4)))
            })],
        },
        Constant {
            name: "tess_k2_area_weighted",
            description: "area-weighted k = 2 mean V = 2(π²−4)/π",
            reference_string: None,
            reference: || Ok(2.0 * (PI * PI - 4.0) / PI),
            routes: vec![route("tessellation_mc", MonteCarlo, 0.0, |c, s| {
                Ok(mc(tess(2, CellScheme::Area, c, s)?.area))
            })],
        },
        Constant {
            name: "tess_k3_perimeter_weighted",
            description: "perimeter-weighted k = 3 mean V = π − 4/π",
            reference_string: None,
            reference: || Ok(PI - 4.0 / PI),
            routes: vec![route("tessellation_mc", MonteCarlo, 0.0, |c, s| {
                Ok(mc(tess(3, CellScheme::Perimeter, c, s)?.area))
            })],
        },
        Constant {
            name: "tess_k2_split",
            description: "split-scheme k = 2 mean V = π/2",
            reference_string: None,
            reference: || Ok(FRAC_PI_2),
            routes: vec![route("tessellation_mc", MonteCarlo, 0.0, |c, s| {
                Ok(mc(tess(2, CellScheme::Split, c, s)?.area))
            })],
        },
        Constant {
            name: "tess_k2_vertex",
            description: "vertex-scheme k = 2 mean V = (π²−4)/(2π)",
            reference_string: None,
            reference: || Ok((PI * PI - 4.0) / (2.0 * PI)),
            routes: vec![route("tessellation_mc", MonteCarlo, 0.0, |c, s| {
                Ok(mc(tess(2, CellScheme::Vertex, c, s)?.area))
            })],
        },
        Constant {
            name: "f43_one",
            description: "₄F₃(½,½,1,1; 3/2,3/2,3/2; 1), reference by series",
            reference_string: None,
            reference: || f43_at_one(1e-15).map(|s| s.value).map_err(err),
            routes: vec![
                route("glasser_backsolve", Numerical, 1e-7, |_, _| {
                    let e = exp_alpha_a_given_b_half(QuadrantalRoute::Agm, 1e-12).map_err(err)?;
                    let g = catalan_value()?;
                    Ok(RouteValue::exact(FRAC_PI_2 * (PI * PI / 2.0 - 4.0 * g / PI - e)))
                }),
                route("borwein_integral", Numerical, 1e-7, |_, _| {
                    f43_dilog_integral(1e-12).map(RouteValue::exact).map_err(err)
                }),
                route("reshetnikov", Numerical, 1e-7, |_, _| f43_from_trilog(1e-13).map(RouteValue::exact).map_err(err)),
            ],
        },
        Constant {
            name: "re_li3_one_plus_i",
            description: "Re Li₃(1+i) = π² ln2/32 + 35ζ(3)/64",
            reference_string: None,
            reference: || Ok(re_li3_one_plus_i_closed_form()),
            routes: vec![route("series", Numerical, 1e-9, |_, _| {
                li3_one_plus_i(1e-13).map(|z| RouteValue::exact(z.re)).map_err(err)
            })],
        },
        Constant {
            name: "catalan",
            description: "Catalan's constant G, reference by accelerated alternating series",
            reference_string: None,
            reference: catalan_value,
            routes: vec![route("ramanujan_series", Numerical, PRECISION_CAP, |_, _| {
                catalan_ramanujan(1e-14).map(|s| RouteValue::exact(s.value)).map_err(err)
            })],
        },
    ];
    for d in DensityId::ALL.into_iter().filter(|d| d.dimension() <= 2) {
        out.push(Constant {
            name: normalization_name(d),
            description: "total mass of a density",
            reference_string: None,
            reference: || Ok(1.0),
            routes: vec![route(
                "quadrature",
                Numerical,
                if d.dimension() == 1 { 1e-9 } else { 1e-6 },
                normalization_eval(d),
            )],
        });
    }
    out
}

fn quadrantal(r: QuadrantalRoute, tol: f64) -> Result<RouteValue, String> {
    exp_alpha_a_given_b_half(r, tol).map(RouteValue::exact).map_err(err)
}

fn right_angle(r: RightAngleRoute, tol: f64) -> Result<RouteValue, String> {
    exp_alpha_a_given_beta_half(r, tol).map(RouteValue::exact).map_err(err)
}

fn normalization_name(d: DensityId) -> &'static str {
    match d {
        DensityId::Side => "norm_side",
        DensityId::ABetaGamma => "norm_a_beta_gamma",
        DensityId::BetaGammaGivenAHalf => "norm_beta_gamma_given_a_half",
        DensityId::AGammaGivenBetaHalf => "norm_a_gamma_given_beta_half",
        DensityId::BetaGamma => "norm_beta_gamma",
        DensityId::BetaGivenGammaHalf => "norm_beta_given_gamma_half",
        DensityId::ProductCosineSides => "norm_product_cosine_sides",
        DensityId::ProductCosineAngles => "norm_product_cosine_angles",
        DensityId::CGivenGammaHalf => "norm_c_given_gamma_half",
        DensityId::GammaGivenCHalf => "norm_gamma_given_c_half",
    }
}

fn normalization_eval(d: DensityId) -> Eval {
    fn run(d: DensityId) -> Result<RouteValue, String> {
        let tol = if d.dimension() == 1 { 1e-12 } else { 1e-8 };
        d.normalization(tol).map(|r| RouteValue::exact(r.value)).map_err(err)
    }
    match d {
        DensityId::Side => |_, _| run(DensityId::Side),
        DensityId::ABetaGamma => |_, _| run(DensityId::ABetaGamma),
        DensityId::BetaGammaGivenAHalf => |_, _| run(DensityId::BetaGammaGivenAHalf),
        DensityId::AGammaGivenBetaHalf => |_, _| run(DensityId::AGammaGivenBetaHalf),
        DensityId::BetaGamma => |_, _| run(DensityId::BetaGamma),
        DensityId::BetaGivenGammaHalf => |_, _| run(DensityId::BetaGivenGammaHalf),
        DensityId::ProductCosineSides => |_, _| run(DensityId::ProductCosineSides),
        DensityId::ProductCosineAngles => |_, _| run(DensityId::ProductCosineAngles),
        DensityId::CGivenGammaHalf => |_, _| run(DensityId::CGivenGammaHalf),
        DensityId::GammaGivenCHalf => |_, _| run(DensityId::GammaGivenCHalf),
    }
}

struct Job<'a> {
    constant: &'a Constant,
    route: &'a Route,
    stream: RngStream,
}

fn judge(job: &Job<'_>, config: &SuiteConfig) -> ConstantCheck {
    let reference = job.constant.reference();
    let value = (job.route.eval)(config, job.stream);
    let mc = job.route.kind == RouteKind::MonteCarlo;
    let mut check = ConstantCheck {
        name: job.constant.name.to_string(),
        route: job.route.name.to_string(),
        value: f64::NAN,
        reference: f64::NAN,
        abs_error: f64::NAN,
        tolerance: f64::NAN,
        pass: false,
        n_samples: None,
        stderr: None,
        seed: mc.then_some(config.seed),
        error: None,
    };
    match (value, reference) {
        (Ok(v), Ok(r)) => {
            check.value = v.value;
            check.reference = r;
            check.abs_error = (v.value - r).abs();
            check.n_samples = v.n_samples;
            check.stderr = v.stderr;
            check.tolerance = match job.route.kind {
                RouteKind::Exact => job.route.pinned.min(config.tol),
                RouteKind::Numerical => job.route.pinned,
                RouteKind::MonteCarlo => MC_SIGMAS * v.stderr.unwrap_or(f64::NAN),
            };
            check.pass = check.abs_error <= check.tolerance;
        }
        (Err(e), _) | (_, Err(e)) => check.error = Some(e),
    }
    check
}

fn jobs(constants: &[Constant], seed: u64) -> Vec<Job<'_>> {
    let mut out = Vec::new();
    let mut stream_index = 0;
    for c in constants {
        for r in &c.routes {
            let stream = RngStream::new(seed, stream_index);
            if r.kind == RouteKind::MonteCarlo {
                stream_index += 1;
            }
            out.push(Job { constant: c, route: r, stream });
        }
    }
    out
}

/// Runs every registered check. Failures are reported, never raised.
pub fn run_suite(config: &SuiteConfig) -> SuiteReport {
    let constants = registry();
    let checks: Vec<ConstantCheck> = jobs(&constants, config.seed).par_iter().map(|j| judge(j, config)).collect();
    let pass = checks.iter().all(|c| c.pass);
    SuiteReport { config: *config, checks, pass }
}

/// The checks of one constant. Monte Carlo routes are skipped unless
/// `include_mc` is set.
pub fn run_constant(name: &str, config: &SuiteConfig, include_mc: bool) -> Result<Vec<ConstantCheck>, VerificationError> {
    let constants = registry();
    if !constants.iter().any(|c| c.name == name) {
        return Err(VerificationError::UnknownConstant(name.to_string()));
    }
    Ok(jobs(&constants, config.seed)
        .par_iter()
        .filter(|j| j.constant.name == name && (include_mc || j.route.kind != RouteKind::MonteCarlo))
        .map(|j| judge(j, config))
        .collect())
}

/// `x` with 15 significant digits.
pub fn format_sig(x: f64) -> String {
    if !x.is_finite() {
        return format!("{x}");
    }
    if x == 0.0 {
        return "0".to_string();
    }
    let mag = x.abs().log10().floor() as i32;
    if (-4..15).contains(&mag) {
        format!("{:.*}", (14 - mag) as usize, x)
    } else {
        format!("{x:.14e}")
    }
}

fn short(x: Option<f64>) -> String {
    x.map_or_else(|| "-".to_string(), |v| format!("{v:.3e}"))
}

impl SuiteReport {
    /// Fixed-width table with a closing note on attainable precision.
    pub fn human(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(
            s,
            "{:<30} {:<20} {:>20} {:>20} {:>10} {:>10} {:>10}  result",
            "constant", "route", "value", "reference", "abs_error", "tolerance", "stderr"
        );
        for c in &self.checks {
            let _ = writeln!(
                s,
                "{:<30} {:<20} {:>20} {:>20} {:>10} {:>10} {:>10}  {}",
                c.name,
                c.route,
                format_sig(c.value),
                format_sig(c.reference),
                short(Some(c.abs_error)),
                short(Some(c.tolerance)),
                short(c.stderr),
                if c.pass { "pass" } else { "FAIL" }
            );
            if let Some(e) = &c.error {
                let _ = writeln!(s, "    error: {e}");
            }
        }
        let passed = self.checks.iter().filter(|c| c.pass).count();
        let _ = writeln!(s, "\n{passed}/{} checks passed", self.checks.len());
        let _ = writeln!(
            s,
            "note: 25-digit references are compared in double precision; no check is pinned below {PRECISION_CAP:e}."
        );
        let _ = writeln!(
            s,
            "seed {}, {} samples per Monte Carlo route, {} tessellation trials, {MC_SIGMAS} standard errors allowed",
            self.config.seed, self.config.mc_samples, self.config.tessellation_trials
        );
        s
    }
}
