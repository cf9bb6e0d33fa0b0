//! Goodness-of-fit statistics used to compare samplers with densities.

use statrs::distribution::{ChiSquared, ContinuousCDF};

use crate::quadrature::{integrate_2d, InnerDomain, IntegrandSpec, QuadratureError};

/// Bins with expected count below this are pooled with a neighbour.
pub const MIN_EXPECTED: f64 = 5.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChiSquareTest {
    pub statistic: f64,
    pub dof: usize,
    pub p_value: f64,
}

fn chi_square_sf(statistic: f64, dof: usize) -> f64 {
    ChiSquared::new(dof as f64)
        .map(|d| d.sf(statistic))
        .unwrap_or(f64::NAN)
}

/// Pearson goodness of fit. `probabilities` are bin masses (rescaled to the
/// observed total); adjacent sparse bins are pooled before testing.
pub fn chi_square_gof(observed: &[u64], probabilities: &[f64]) -> ChiSquareTest {
    assert_eq!(observed.len(), probabilities.len());
    let total: u64 = observed.iter().sum();
    let mass: f64 = probabilities.iter().sum();
    let scale = total as f64 / mass;

    let mut pooled: Vec<(f64, f64)> = Vec::new();
    let (mut o_acc, mut e_acc) = (0.0, 0.0);
    for (&o, &p) in observed.iter().zip(probabilities) {
        o_acc += o as f64;
        e_acc += p * scale;
        if e_acc >= MIN_EXPECTED {
            pooled.push((o_acc, e_acc));
            o_acc = 0.0;
            e_acc = 0.0;
        }
    }
    if e_acc > 0.0 || o_acc > 0.0 {
        match pooled.last_mut() {
            Some(last) => {
                last.0 += o_acc;
                last.1 += e_acc;
            }
            None => pooled.push((o_acc, e_acc)),
        }
    }
    let statistic: f64 = pooled.iter().map(|&(o, e)| (o - e) * (o - e) / e).sum();
    let dof = pooled.len().saturating_sub(1).max(1);
    ChiSquareTest {
        statistic,
        dof,
        p_value: chi_square_sf(statistic, dof),
    }
}

/// Pearson test of independence on a contingency table.
pub fn chi_square_independence(table: &[Vec<u64>]) -> ChiSquareTest {
    let rows: Vec<f64> = table.iter().map(|r| r.iter().sum::<u64>() as f64).collect();
    let ncols = table.first().map_or(0, Vec::len);
    let cols: Vec<f64> = (0..ncols)
        .map(|j| table.iter().map(|r| r[j]).sum::<u64>() as f64)
        .collect();
    let total: f64 = rows.iter().sum();
    let mut statistic = 0.0;
    for (i, r) in table.iter().enumerate() {
        for (j, &o) in r.iter().enumerate() {
            let e = rows[i] * cols[j] / total;
            if e > 0.0 {
                statistic += (o as f64 - e).powi(2) / e;
            }
        }
    }
    let used = |v: &[f64]| v.iter().filter(|&&x| x > 0.0).count();
    let dof = (used(&rows).saturating_sub(1) * used(&cols).saturating_sub(1)).max(1);
    ChiSquareTest {
        statistic,
        dof,
        p_value: chi_square_sf(statistic, dof),
    }
}

/// Counts of `samples` in `bins` equal-width bins over `[lo, hi]`; values
/// outside are dropped, `hi` itself goes to the last bin.
pub fn histogram(samples: impl IntoIterator<Item = f64>, lo: f64, hi: f64, bins: usize) -> Vec<u64> {
    let mut counts = vec![0u64; bins];
    let width = (hi - lo) / bins as f64;
    for x in samples {
        if !(lo..=hi).contains(&x) {
            continue;
        }
        let i = (((x - lo) / width) as usize).min(bins - 1);
        counts[i] += 1;
    }
    counts
}

/// Row-major `bins × bins` histogram over `[lo, hi]²`.
pub fn histogram_2d(
    samples: impl IntoIterator<Item = (f64, f64)>,
    lo: f64,
    hi: f64,
    bins: usize,
) -> Vec<Vec<u64>> {
    let mut counts = vec![vec![0u64; bins]; bins];
    let width = (hi - lo) / bins as f64;
    for (x, y) in samples {
        if !(lo..=hi).contains(&x) || !(lo..=hi).contains(&y) {
            continue;
        }
        let i = (((x - lo) / width) as usize).min(bins - 1);
        let j = (((y - lo) / width) as usize).min(bins - 1);
        counts[i][j] += 1;
    }
    counts
}

/// Mass of each of `bins` equal-width bins under the density `f`, by
/// quadrature. `singular` abscissae are passed on as breakpoints.
pub fn bin_probabilities<F: Fn(f64) -> f64>(
    f: F,
    lo: f64,
    hi: f64,
    bins: usize,
    singular: &[f64],
    tol: f64,
) -> Result<Vec<f64>, QuadratureError> {
    let width = (hi - lo) / bins as f64;
    (0..bins)
        .map(|i| {
            let a = lo + i as f64 * width;
            let b = if i + 1 == bins { hi } else { a + width };
            let inside: Vec<f64> = singular.iter().copied().filter(|&s| s > a && s < b).collect();
            IntegrandSpec::new(&f, a, b)
                .singular_at(&inside)
                .integrate(tol)
                .map(|r| r.value)
        })
        .collect()
}

/// Row-major cell masses of a bivariate density on a `bins × bins` grid.
/// `kinks(x)` lists inner abscissae where `f(x, ·)` is not smooth.
pub fn bin_probabilities_2d<F, K>(
    f: F,
    lo: f64,
    hi: f64,
    bins: usize,
    kinks: K,
    tol: f64,
) -> Result<Vec<f64>, QuadratureError>
where
    F: Fn(f64, f64) -> f64,
    K: Fn(f64) -> Vec<f64>,
{
    let width = (hi - lo) / bins as f64;
    let mut out = Vec::with_capacity(bins * bins);
    for i in 0..bins {
        let (x0, x1) = (lo + i as f64 * width, lo + (i + 1) as f64 * width);
        for j in 0..bins {
            let (y0, y1) = (lo + j as f64 * width, lo + (j + 1) as f64 * width);
            let r = integrate_2d(
                &f,
                (x0, x1),
                &[],
                |x| {
                    let inside: Vec<f64> = kinks(x).into_iter().filter(|&s| s > y0 && s < y1).collect();
                    InnerDomain::new(y0, y1).singular_at(&inside)
                },
                tol,
            )?;
            out.push(r.value);
        }
    }
    Ok(out)
}

/// Two-sided Kolmogorov–Smirnov statistic of `samples` against `cdf`.
pub fn ks_statistic<F: Fn(f64) -> f64>(samples: &[f64], cdf: F) -> f64 {
    let mut xs = samples.to_vec();
    xs.sort_by(f64::total_cmp);
    let n = xs.len() as f64;
    xs.iter()
        .enumerate()
        .map(|(i, &x)| {
            let c = cdf(x);
            (c - i as f64 / n).max((i + 1) as f64 / n - c)
        })
        .fold(0.0, f64::max)
}

/// Asymptotic critical value of the K–S statistic at level `alpha`.
pub fn ks_critical(n: usize, alpha: f64) -> f64 {
    (-0.5 * (alpha / 2.0).ln()).sqrt() / (n as f64).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn perfect_fit_has_zero_statistic() {
        let t = chi_square_gof(&[100, 200, 300], &[1.0, 2.0, 3.0]);
        assert_eq!(t.statistic, 0.0);
        assert_eq!(t.dof, 2);
        assert!((t.p_value - 1.0).abs() < 1e-12);
    }

    #[test]
    fn sparse_bins_are_pooled() {
        let t = chi_square_gof(&[0, 1, 50, 49], &[0.001, 0.01, 0.5, 0.489]);
        assert_eq!(t.dof, 1);
    }

    #[test]
    fn chi_square_tail_matches_known_quantile() {
        // 95th percentile of χ²(10) is 18.307
        assert!((chi_square_sf(18.307, 10) - 0.05).abs() < 1e-4);
    }

    #[test]
    fn independence_of_a_product_table() {
        let t = chi_square_independence(&[vec![10, 20], vec![30, 60]]);
        assert!(t.statistic.abs() < 1e-12);
        let t = chi_square_independence(&[vec![100, 0], vec![0, 100]]);
        assert!(t.p_value < 1e-20);
    }

    #[test]
    fn ks_critical_value() {
        // c(0.001) ≈ 1.9495
        assert!((ks_critical(1, 0.001) - 1.94947).abs() < 1e-4);
        let xs: Vec<f64> = (0..1000).map(|i| (i as f64 + 0.5) / 1000.0).collect();
        assert!(ks_statistic(&xs, |x| x) <= 0.0005 + 1e-12);
    }

    #[test]
    fn histogram_edges() {
        let h = histogram([0.0, 0.5, 1.0, 1.5, -0.1], 0.0, 1.0, 2);
        assert_eq!(h, vec![1, 2]);
    }
}
