//! Acceptance criteria 1–9, one summary line each.

use std::f64::consts::{FRAC_PI_2, LN_2, PI};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use sphtri::densities::{
    cond_density_a_gamma_given_beta_half, cond_density_beta_gamma_given_a_half, cond_density_beta_given_gamma_half,
    cond_density_c_given_gamma_half, cond_density_gamma_given_c_half, DensityId,
};
use sphtri::moments::*;
use sphtri::sampling::*;
use sphtri::special::{f43_at_one, f43_dilog_integral, f43_from_trilog, li3_one_plus_i};
use sphtri::sphere::{triangle_metrics, SphericalTriangle, TriangleMetrics};
use sphtri::stats::*;
use sphtri::tessellation::*;

const RIGHT_ANGLE: &str = "2.8708787614233542583742340";
const QUADRANTAL: &str = "3.0538319164380270202505577";
// independent 40-digit decimals
const CATALAN: f64 = 0.915_965_594_177_219_015_054_603_514_932_384_110_774;
const ZETA3: f64 = 1.202_056_903_159_594_285_399_738_161_511_449_990_765;

const N: usize = 1_000_000;
const TRIALS: usize = 100_000;

#[derive(Default)]
struct Report {
    lines: Vec<(bool, String)>,
}

impl Report {
    fn check(&mut self, ok: bool, what: impl Into<String>) {
        self.lines.push((ok, what.into()));
    }

    fn close(&mut self, what: &str, value: f64, target: f64, tol: f64) {
        let err = (value - target).abs();
        self.check(err <= tol, format!("{what}: {value:.16} vs {target:.16} (|Δ| = {err:.2e}, tol {tol:.0e})"));
    }

    fn mc(&mut self, what: &str, e: MonteCarloEstimate, target: f64) {
        let z = (e.mean - target) / e.stderr;
        self.check(z.abs() <= 4.0, format!("{what}: {:.6} ± {:.6} vs {target:.6} (z = {z:.2})", e.mean, e.stderr));
    }

    fn chi(&mut self, what: &str, t: ChiSquareTest) {
        self.check(t.p_value > 0.001, format!("{what}: χ² = {:.1}, dof {}, p = {:.4}", t.statistic, t.dof, t.p_value));
    }

    fn passed(&self) -> bool {
        self.lines.iter().all(|(ok, _)| *ok)
    }
}

fn parse(s: &str) -> f64 {
    s.parse().unwrap()
}

fn criterion_1(r: &mut Report) {
    let reference = parse(RIGHT_ANGLE);
    let closed = exp_alpha_a_given_beta_half(RightAngleRoute::ClosedForm, 1e-15).unwrap();
    let explicit = PI / 4.0 * (2.0 + (1.0 + LN_2) * PI - 4.0 * CATALAN);
    r.close("closed form vs published decimal", closed, reference, 1e-12);
    r.close("closed form vs independent evaluation", closed, explicit, 1e-12);
    let double = exp_alpha_a_given_beta_half(RightAngleRoute::DoubleIntegral, 1e-10).unwrap();
    r.close("double integral vs closed form", double, closed, 1e-7);
    let single = exp_alpha_a_given_beta_half(RightAngleRoute::SingleIntegral, 1e-12).unwrap();
    r.close("single integral vs closed form", single, closed, 1e-8);
}

fn criterion_2(r: &mut Report) {
    let reference = parse(QUADRANTAL);
    let routes = [
        ("agm", QuadrantalRoute::Agm, 1e-12, 1e-10),
        ("single integral", QuadrantalRoute::SingleIntegral, 1e-10, 1e-7),
        ("glasser", QuadrantalRoute::Glasser, 1e-14, 1e-8),
        ("double integral", QuadrantalRoute::DoubleIntegral, 1e-9, 1e-6),
    ];
    let mut values = Vec::new();
    for (name, route, work, tol) in routes {
        let v = exp_alpha_a_given_b_half(route, work).unwrap();
        r.close(name, v, reference, tol);
        values.push((v, tol));
    }
    let pairwise = values.iter().all(|&(x, tx)| values.iter().all(|&(y, ty)| (x - y).abs() <= tx.max(ty) * 2.0));
    r.check(pairwise, "four routes pairwise consistent");
}

fn criterion_3(r: &mut Report) {
    let series = f43_at_one(1e-15).unwrap().value;
    let agm = exp_alpha_a_given_b_half(QuadrantalRoute::Agm, 1e-12).unwrap();
    let glasser = FRAC_PI_2 * (PI * PI / 2.0 - 4.0 * CATALAN / PI - agm);
    r.close("₄F₃ series vs Glasser back-solve", series, glasser, 1e-7);
    r.close("₄F₃ series vs Borwein integral", series, f43_dilog_integral(1e-12).unwrap(), 1e-7);
    r.close("₄F₃ series vs Reshetnikov form", series, f43_from_trilog(1e-13).unwrap(), 1e-7);
    let re = li3_one_plus_i(1e-13).unwrap().re;
    r.close("Re Li₃(1+i) vs closed form", re, PI * PI * LN_2 / 32.0 + 35.0 * ZETA3 / 64.0, 1e-9);
}

fn criterion_4(r: &mut Report) {
    let m = |id: DensityId, k| id.moment(k, 1e-12).unwrap().value;
    r.close("E(β² | γ=π/2)", m(DensityId::BetaGivenGammaHalf, 2), PI * PI / 2.0 - 1.75 * ZETA3, 1e-8);
    r.close("E(c² | γ=π/2)", m(DensityId::CGivenGammaHalf, 2), PI * PI / 2.0 - 6.0 + 4.0 * CATALAN, 1e-8);
    r.close("E(γ² | c=π/2)", m(DensityId::GammaGivenCHalf, 2), PI * PI / 4.0 + LN_2 * LN_2, 1e-8);
    for id in [DensityId::BetaGivenGammaHalf, DensityId::CGivenGammaHalf, DensityId::GammaGivenCHalf] {
        r.close(&format!("first moment of {id}"), m(id, 1), FRAC_PI_2, 1e-9);
    }
}

fn criterion_5(r: &mut Report) {
    for id in DensityId::ALL {
        let (work, tol) = match id.dimension() {
            1 => (1e-12, 1e-9),
            2 => (1e-8, 1e-6),
            _ => (1e-5, 1e-4),
        };
        let total = id.normalization(work).unwrap().value;
        r.close(&format!("mass of {id}"), total, 1.0, tol);
    }
}

fn criterion_6(r: &mut Report) {
    let s = |i| RngStream::new(606, i);
    let uniform = collect(TriangleSampler::Uniform, N, s(0)).unwrap();
    let col = |f: fn(&TriangleMetrics) -> f64| -> Vec<f64> { uniform.iter().map(f).collect() };
    let mean = |v: &[f64]| MonteCarloEstimate::from_samples(v).unwrap();
    r.mc("E(αa)", mean(&col(|m| m.alpha * m.a)), PI * PI / 2.0 - 2.0);
    r.mc("E(a²)", mean(&col(|m| m.a * m.a)), PI * PI / 2.0 - 2.0);
    r.mc("E(α²)", mean(&col(|m| m.alpha * m.alpha)), PI * PI / 3.0);
    r.mc("E(αb)", mean(&col(|m| m.alpha * m.b)), PI * PI / 4.0);
    r.mc("E(VS)", mean(&col(|m| m.excess * m.perimeter)), 1.5 * PI * PI - 6.0);
    r.mc("corr(a, b)", correlation(&col(|m| m.a), &col(|m| m.b)).unwrap(), 0.0);
    let table = histogram_2d(uniform.iter().map(|m| (m.beta, m.gamma)), 0.0, PI, 20);
    let indep = chi_square_independence(&table);
    r.check(indep.p_value < 1e-6, format!("(β, γ) independence rejected: p = {:.2e}", indep.p_value));
    let fixed = estimate(TriangleSampler::FixedSide(SideName::B, FRAC_PI_2), |m| m.alpha * m.a, N, s(1)).unwrap();
    r.mc("E(αa | b=π/2) by fixed-side sampling", fixed, parse(QUADRANTAL));
    let right = estimate(TriangleSampler::RightAngle, |m| m.alpha * m.a, N, s(2)).unwrap();
    r.mc("E(αa | β=π/2) by rejection sampling", right, parse(RIGHT_ANGLE));
}

fn criterion_7(r: &mut Report) {
    let mut rng = ChaCha8Rng::seed_from_u64(707);
    let mut ok = [true; 5];
    for k in 2..=6 {
        for _ in 0..100 {
            let (arr, _) = random_arrangement(k, &mut rng).unwrap();
            ok[0] &= arr.cells.len() == k * k - k + 2;
            ok[1] &= (arr.total_area() - 4.0 * PI).abs() <= 1e-9;
            ok[2] &= (arr.total_perimeter() - 4.0 * PI * k as f64).abs() <= 1e-9;
            ok[3] &= arr.cells.iter().map(|c| c.vertex_count).sum::<usize>() == 4 * k * (k - 1);
            if k == 3 {
                for c in &arr.cells {
                    let v = arr.cell_vertices(c.id);
                    let m = triangle_metrics(&SphericalTriangle::new(v[0], v[1], v[2]).unwrap()).unwrap();
                    ok[4] &= (m.excess - c.area).abs() <= 1e-9 && (cell_area(&v) - c.area).abs() <= 1e-9;
                }
            }
        }
    }
    r.check(ok[0], "cell count k² − k + 2, k = 2..6, 100 arrangements each");
    r.check(ok[1], "ΣV = 4π within 1e-9");
    r.check(ok[2], "ΣS = 4πk within 1e-9");
    r.check(ok[3], "ΣN = 4k(k − 1)");
    r.check(ok[4], "k = 3 cell areas equal angle excess within 1e-9");
}

fn criterion_8(r: &mut Report) {
    let s = |i| RngStream::new(808, i);
    let k3 = cell_statistics(3, CellScheme::Uniform, TRIALS, s(0)).unwrap();
    r.mc("E₃(V)", k3.area, FRAC_PI_2);
    r.mc("E₃(S)", k3.perimeter, 1.5 * PI);
    r.mc("E₃(VS)", k3.area_perimeter, 1.5 * PI * PI - 6.0);
    let k4 = vertex_count_distribution(4, TRIALS, s(1)).unwrap();
    r.mc("P(N = 3), k = 4", k4.frequency(3), 4.0 / 7.0);
    r.mc("P(N = 4), k = 4", k4.frequency(4), 3.0 / 7.0);
    let area = cell_statistics(2, CellScheme::Area, TRIALS, s(2)).unwrap();
    r.mc("area-weighted k = 2 mean V", area.area, 2.0 * (PI * PI - 4.0) / PI);
    r.mc("vertex scheme k = 2 mean V", vertex_relation_check(2, TRIALS, s(3)).unwrap(), (PI * PI - 4.0) / (2.0 * PI));
    r.mc("split scheme k = 2 mean V", split_relation_check(2, TRIALS, s(4)).unwrap(), FRAC_PI_2);
    let draws = draw_cells(2, CellScheme::Uniform, TRIALS, s(5)).unwrap();
    let probs = bin_probabilities(|v| 0.25 * (v / 2.0).sin(), 0.0, 2.0 * PI, 40, &[], 1e-12).unwrap();
    r.chi("f₂ shape", chi_square_gof(&histogram(draws.iter().map(|d| d.area), 0.0, 2.0 * PI, 40), &probs));
}

fn criterion_9(r: &mut Report) {
    let s = |i| RngStream::new(909, i);
    let sin_half = bin_probabilities(|x| 0.5 * x.sin(), 0.0, PI, 50, &[], 1e-12).unwrap();
    let one_d = |f: fn(f64) -> f64, singular: &[f64]| bin_probabilities(f, 0.0, PI, 50, singular, 1e-10).unwrap();

    let uniform = collect(TriangleSampler::Uniform, N, s(0)).unwrap();
    r.chi("side a ~ ½ sin a", chi_square_gof(&histogram(uniform.iter().map(|m| m.a), 0.0, PI, 50), &sin_half));

    let a_half = collect(TriangleSampler::FixedSide(SideName::A, FRAC_PI_2), N, s(1)).unwrap();
    let probs = bin_probabilities_2d(
        |b, g| cond_density_beta_gamma_given_a_half(b, g).unwrap_or(0.0),
        0.0,
        PI,
        20,
        |b| vec![b, PI - b, FRAC_PI_2],
        1e-9,
    )
    .unwrap();
    let counts: Vec<u64> = histogram_2d(a_half.iter().map(|m| (m.beta, m.gamma)), 0.0, PI, 20).concat();
    r.chi("(β, γ) | a = π/2", chi_square_gof(&counts, &probs));

    let b_half = collect(TriangleSampler::FixedSide(SideName::B, FRAC_PI_2), N, s(2)).unwrap();
    r.chi("α | b = π/2 uniform", chi_square_gof(&histogram(b_half.iter().map(|m| m.alpha), 0.0, PI, 50), &[1.0; 50]));
    r.chi("c | b = π/2 ~ ½ sin c", chi_square_gof(&histogram(b_half.iter().map(|m| m.c), 0.0, PI, 50), &sin_half));

    let c_half = collect(TriangleSampler::FixedSide(SideName::C, FRAC_PI_2), N, s(3)).unwrap();
    let probs = one_d(|g| cond_density_gamma_given_c_half(g).unwrap_or(0.0), &[FRAC_PI_2]);
    r.chi("γ | c = π/2", chi_square_gof(&histogram(c_half.iter().map(|m| m.gamma), 0.0, PI, 50), &probs));

    let right = collect(TriangleSampler::RightAngle, N, s(4)).unwrap();
    let probs = bin_probabilities_2d(
        |a, g| cond_density_a_gamma_given_beta_half(a, g).unwrap_or(0.0),
        0.0,
        PI,
        20,
        |_| vec![FRAC_PI_2],
        1e-9,
    )
    .unwrap();
    let counts: Vec<u64> = histogram_2d(right.iter().map(|m| (m.a, m.gamma)), 0.0, PI, 20).concat();
    r.chi("(a, γ) | β = π/2", chi_square_gof(&counts, &probs));
    // relabelling the right angle: the other angle and the opposite side
    let probs = one_d(|x| cond_density_beta_given_gamma_half(x).unwrap_or(0.0), &[FRAC_PI_2]);
    r.chi("γ | β = π/2", chi_square_gof(&histogram(right.iter().map(|m| m.gamma), 0.0, PI, 50), &probs));
    let probs = one_d(|x| cond_density_c_given_gamma_half(x).unwrap_or(0.0), &[FRAC_PI_2]);
    r.chi("b | β = π/2", chi_square_gof(&histogram(right.iter().map(|m| m.b), 0.0, PI, 50), &probs));

    let run = || collect(TriangleSampler::RightAngle, 200_000, s(5)).unwrap();
    let one = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap().install(run);
    let many = rayon::ThreadPoolBuilder::new().num_threads(4).build().unwrap().install(run);
    let same = one.iter().zip(&many).all(|(x, y)| x.a.to_bits() == y.a.to_bits() && x.gamma.to_bits() == y.gamma.to_bits());
    r.check(same && one.len() == many.len(), "bit-identical draws for 1 and 4 worker threads");
}

#[test]
fn acceptance() {
    let criteria: [(&str, fn(&mut Report)); 9] = [
        ("E(αa | β=π/2) routes", criterion_1),
        ("E(αa | b=π/2) routes", criterion_2),
        ("₄F₃ and trilogarithm identities", criterion_3),
        ("conditional moments by quadrature", criterion_4),
        ("density normalization", criterion_5),
        ("Monte Carlo moments at n = 10⁶", criterion_6),
        ("tessellation exactness", criterion_7),
        ("tessellation statistics", criterion_8),
        ("samplers against densities", criterion_9),
    ];
    let reports: Vec<Report> = std::thread::scope(|scope| {
        let handles: Vec<_> = criteria
            .iter()
            .map(|&(_, f)| {
                scope.spawn(move || {
                    let mut r = Report::default();
                    f(&mut r);
                    r
                })
            })
            .collect();
        handles.into_iter().map(|h| h.join().unwrap()).collect()
    });
    let mut all = true;
    for (i, ((name, _), r)) in criteria.iter().zip(&reports).enumerate() {
        for (ok, line) in &r.lines {
            println!("    [{}] {line}", if *ok { "ok" } else { "FAIL" });
        }
        println!("criterion {}: {} - {name}", i + 1, if r.passed() { "PASS" } else { "FAIL" });
        all &= r.passed();
    }
    assert!(all, "at least one acceptance criterion failed");
}
