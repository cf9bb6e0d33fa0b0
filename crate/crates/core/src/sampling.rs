//! Seeded samplers for uniform points, great circles and random triangles,
//! including triangles conditioned on a side or on a right angle, plus a
//! deterministic parallel Monte Carlo estimator.

use std::f64::consts::{FRAC_PI_2, PI};
use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::densities::cond_density_a_gamma_given_beta_half;
use crate::sphere::{triangle_metrics, GreatCircle, SphericalTriangle, TriangleMetrics, UnitVector};

/// Samples per deterministic batch; each batch owns one substream.
pub const BATCH_SIZE: usize = 1 << 16;

/// Width of the acceptance-monitoring window of the rejection sampler.
pub const REJECTION_WINDOW: u64 = 100_000;

/// Minimum acceptance rate over a full window before the sampler gives up.
pub const MIN_ACCEPTANCE: f64 = 0.01;

/// Envelope of the `(a, γ | β = π/2)` density on `(0, π)²`.
pub const RIGHT_ANGLE_ENVELOPE: f64 = 0.25;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SamplingError {
    #[error("rejection sampler stalled: {accepted} of {proposed} proposals accepted")]
    RejectionStall { accepted: u64, proposed: u64 },
    #[error("side length {0} outside (0, π)")]
    InvalidLength(f64),
    #[error("at least two samples are required, got {0}")]
    TooFewSamples(usize),
}

/// A reproducible random stream: `(seed, stream_index)` selects a ChaCha8
/// keystream; distinct indices give independent sequences.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RngStream {
    pub seed: u64,
    pub stream_index: u64,
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

impl RngStream {
    pub fn new(seed: u64, stream_index: u64) -> Self {
        Self { seed, stream_index }
    }

    pub fn rng(&self) -> ChaCha8Rng {
        let mut r = ChaCha8Rng::seed_from_u64(self.seed);
        r.set_stream(self.stream_index);
        r
    }

    /// Child stream for batch `batch`, keyed on both parent coordinates.
    pub fn substream(&self, batch: u64) -> RngStream {
        RngStream {
            seed: splitmix64(self.seed ^ splitmix64(self.stream_index)),
            stream_index: batch,
        }
    }
}

/// Sample mean with its standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MonteCarloEstimate {
    pub mean: f64,
    pub stderr: f64,
    pub n: usize,
}

impl MonteCarloEstimate {
    pub fn from_samples(xs: &[f64]) -> Result<Self, SamplingError> {
        let mut acc = Moments::default();
        xs.iter().for_each(|&x| acc.push(x));
        acc.estimate()
    }

    /// `|mean − target| / stderr`.
    pub fn z_score(&self, target: f64) -> f64 {
        (self.mean - target).abs() / self.stderr
    }

    /// Whether `target` lies within `k` standard errors.
    pub fn within(&self, target: f64, k: f64) -> bool {
        (self.mean - target).abs() <= k * self.stderr
    }
}

/// Running count, mean and centred second moment.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Moments {
    pub n: usize,
    pub mean: f64,
    pub m2: f64,
}

impl Moments {
    pub fn push(&mut self, x: f64) {
        self.n += 1;
        let d = x - self.mean;
        self.mean += d / self.n as f64;
        self.m2 += d * (x - self.mean);
    }

    /// Combines two partial results (order matters for bit-exactness only).
    pub fn merge(self, other: Moments) -> Moments {
        if self.n == 0 {
            return other;
        }
        if other.n == 0 {
            return self;
        }
        let n = self.n + other.n;
        let d = other.mean - self.mean;
        let w = other.n as f64 / n as f64;
        Moments {
            n,
            mean: self.mean + d * w,
            m2: self.m2 + other.m2 + d * d * self.n as f64 * w,
        }
    }

    pub fn estimate(&self) -> Result<MonteCarloEstimate, SamplingError> {
        if self.n < 2 {
            return Err(SamplingError::TooFewSamples(self.n));
        }
        let var = self.m2 / (self.n - 1) as f64;
        Ok(MonteCarloEstimate {
            mean: self.mean,
            stderr: (var / self.n as f64).sqrt(),
            n: self.n,
        })
    }
}

/// Uniform point on the sphere from three normalised standard normals.
pub fn uniform_sphere_point<R: Rng + ?Sized>(rng: &mut R) -> UnitVector {
    loop {
        let x: f64 = rng.sample(StandardNormal);
        let y: f64 = rng.sample(StandardNormal);
        let z: f64 = rng.sample(StandardNormal);
        if let Ok(u) = UnitVector::new(x, y, z) {
            return u;
        }
    }
}

/// Great circle with a uniform pole.
pub fn uniform_great_circle<R: Rng + ?Sized>(rng: &mut R) -> GreatCircle {
    GreatCircle::new(uniform_sphere_point(rng))
}

/// Triangle with three independent uniform vertices; degenerate draws are redrawn.
pub fn random_triangle<R: Rng + ?Sized>(rng: &mut R) -> SphericalTriangle {
    loop {
        let (a, b, c) = (
            uniform_sphere_point(rng),
            uniform_sphere_point(rng),
            uniform_sphere_point(rng),
        );
        if let Ok(t) = SphericalTriangle::new(a, b, c) {
            return t;
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SideName {
    A,
    B,
    C,
}

impl FromStr for SideName {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "a" => Ok(SideName::A),
            "b" => Ok(SideName::B),
            "c" => Ok(SideName::C),
            _ => Err(format!("unknown side '{s}'")),
        }
    }
}

impl fmt::Display for SideName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SideName::A => "a",
            SideName::B => "b",
            SideName::C => "c",
        })
    }
}

/// Triangle whose named side has the given length: the side's endpoints sit
/// at the north pole and at polar angle `length` on the xz-meridian, and
/// the opposite vertex is uniform.
pub fn triangle_fixed_side<R: Rng + ?Sized>(
    rng: &mut R,
    side: SideName,
    length: f64,
) -> Result<SphericalTriangle, SamplingError> {
    if !(length > 0.0 && length < PI) {
        return Err(SamplingError::InvalidLength(length));
    }
    let p = UnitVector::north_pole();
    let q = UnitVector::from_spherical(length, 0.0);
    loop {
        let r = uniform_sphere_point(rng);
        let t = match side {
            SideName::A => SphericalTriangle::new(r, p, q),
            SideName::B => SphericalTriangle::new(q, r, p),
            SideName::C => SphericalTriangle::new(p, q, r),
        };
        if let Ok(t) = t {
            return Ok(t);
        }
    }
}

/// Acceptance bookkeeping over consecutive windows of proposals.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct RejectionMonitor {
    proposed: u64,
    accepted: u64,
}

impl RejectionMonitor {
    /// Records one proposal; fails once a full window shows acceptance below
    /// [`MIN_ACCEPTANCE`].
    pub fn record(&mut self, accepted: bool) -> Result<(), SamplingError> {
        self.proposed += 1;
        self.accepted += accepted as u64;
        if self.proposed == REJECTION_WINDOW {
            let rate = self.accepted as f64 / self.proposed as f64;
            let (accepted, proposed) = (self.accepted, self.proposed);
            *self = Self::default();
            if rate < MIN_ACCEPTANCE {
                return Err(SamplingError::RejectionStall { accepted, proposed });
            }
        }
        Ok(())
    }
}

/// Completes a triangle with `β = π/2` from side `a` and angle `γ`.
pub fn complete_right_triangle(a: f64, gamma: f64) -> TriangleMetrics {
    let (sa, ca) = a.sin_cos();
    let (sg, cg) = gamma.sin_cos();
    // cos α = sin γ cos a
    let sin_alpha = (cg * cg + sg * sg * sa * sa).sqrt();
    let alpha = sin_alpha.atan2(sg * ca);
    // cos γ = sin α cos c, sin c = sin γ sin a / sin α
    let c = (sg * sa).atan2(cg);
    // cos b = cos a cos c, sin b = sin a / sin α
    let b = (sa / sin_alpha).atan2(ca * c.cos());
    TriangleMetrics::from_elements([a, b, c], [alpha, FRAC_PI_2, gamma])
}

/// Rejection sampler for triangles conditioned on `β = π/2`.
#[derive(Debug, Clone, Copy, Default)]
pub struct RightAngleSampler {
    monitor: RejectionMonitor,
}

impl RightAngleSampler {
    pub fn new() -> Self {
        Self::default()
    }

    /// Draws `(a, γ)` from the conditional density under the constant
    /// envelope and completes the triangle.
    pub fn sample<R: Rng + ?Sized>(&mut self, rng: &mut R) -> Result<TriangleMetrics, SamplingError> {
        loop {
            let a = PI * rng.random::<f64>();
            let gamma = PI * rng.random::<f64>();
            let u: f64 = rng.random();
            let accept = match cond_density_a_gamma_given_beta_half(a, gamma) {
                Ok(f) => u * RIGHT_ANGLE_ENVELOPE < f,
                Err(_) => false,
            };
            self.monitor.record(accept)?;
            if accept {
                return Ok(complete_right_triangle(a, gamma));
            }
        }
    }
}

/// One draw from the `β = π/2` conditional law.
pub fn triangle_fixed_angle_right<R: Rng + ?Sized>(rng: &mut R) -> Result<TriangleMetrics, SamplingError> {
    RightAngleSampler::new().sample(rng)
}

/// The samplers available to [`estimate`] and [`collect`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum TriangleSampler {
    Uniform,
    FixedSide(SideName, f64),
    RightAngle,
}

impl TriangleSampler {
    pub fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<TriangleMetrics, SamplingError> {
        match *self {
            TriangleSampler::Uniform => Ok(metrics_of(&random_triangle(rng))),
            TriangleSampler::FixedSide(side, len) => {
                let t = triangle_fixed_side(rng, side, len)?;
                let mut m = metrics_of(&t);
                match side {
                    SideName::A => m.a = len,
                    SideName::B => m.b = len,
                    SideName::C => m.c = len,
                }
                m.perimeter = m.a + m.b + m.c;
                Ok(m)
            }
            TriangleSampler::RightAngle => triangle_fixed_angle_right(rng),
        }
    }
}

fn metrics_of(t: &SphericalTriangle) -> TriangleMetrics {
    // samplers only return checked triangles
    triangle_metrics(t).expect("sampled triangle is non-degenerate")
}

fn batch_bounds(n: usize) -> impl IndexedParallelIterator<Item = (u64, usize)> {
    let batches = n.div_ceil(BATCH_SIZE);
    (0..batches)
        .into_par_iter()
        .map(move |i| (i as u64, BATCH_SIZE.min(n - i * BATCH_SIZE)))
}

/// Monte Carlo mean of `f` over `n` draws of `sampler`.
///
/// Draws are split into fixed batches of [`BATCH_SIZE`], each seeded from
/// `stream.substream(batch)`; partial moments are merged in batch order,
/// so the result is bit-identical for any thread count.
pub fn estimate<F>(
    sampler: TriangleSampler,
    f: F,
    n: usize,
    stream: RngStream,
) -> Result<MonteCarloEstimate, SamplingError>
where
    F: Fn(&TriangleMetrics) -> f64 + Sync,
{
    estimate_with(|rng| sampler.draw(rng).map(|m| f(&m)), n, stream)
}

/// [`estimate`] for an arbitrary scalar draw.
pub fn estimate_with<G>(draw: G, n: usize, stream: RngStream) -> Result<MonteCarloEstimate, SamplingError>
where
    G: Fn(&mut ChaCha8Rng) -> Result<f64, SamplingError> + Sync,
{
    if n < 2 {
        return Err(SamplingError::TooFewSamples(n));
    }
    let parts: Vec<Result<Moments, SamplingError>> = batch_bounds(n)
        .map(|(i, len)| {
            let mut rng = stream.substream(i).rng();
            let mut m = Moments::default();
            for _ in 0..len {
                m.push(draw(&mut rng)?);
            }
            Ok(m)
        })
        .collect();
    let mut total = Moments::default();
    for p in parts {
        total = total.merge(p?);
    }
    total.estimate()
}

/// `n` draws, in the same deterministic batch order as [`estimate`].
pub fn collect_with<T, G>(draw: G, n: usize, stream: RngStream) -> Result<Vec<T>, SamplingError>
where
    T: Send,
    G: Fn(&mut ChaCha8Rng) -> Result<T, SamplingError> + Sync,
{
    let parts: Vec<Result<Vec<T>, SamplingError>> = batch_bounds(n)
        .map(|(i, len)| {
            let mut rng = stream.substream(i).rng();
            (0..len).map(|_| draw(&mut rng)).collect()
        })
        .collect();
    let mut out = Vec::with_capacity(n);
    for p in parts {
        out.extend(p?);
    }
    Ok(out)
}

/// `n` triangles from `sampler`.
pub fn collect(sampler: TriangleSampler, n: usize, stream: RngStream) -> Result<Vec<TriangleMetrics>, SamplingError> {
    collect_with(|rng| sampler.draw(rng), n, stream)
}

/// Sample correlation with the normal-theory standard error `(1 − r²)/√(n − 1)`.
pub fn correlation(xs: &[f64], ys: &[f64]) -> Result<MonteCarloEstimate, SamplingError> {
    let n = xs.len().min(ys.len());
    if n < 3 {
        return Err(SamplingError::TooFewSamples(n));
    }
    let (mx, my) = (
        xs[..n].iter().sum::<f64>() / n as f64,
        ys[..n].iter().sum::<f64>() / n as f64,
    );
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (x, y) in xs.iter().zip(ys) {
        let (dx, dy) = (x - mx, y - my);
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    let r = sxy / (sxx * syy).sqrt();
    Ok(MonteCarloEstimate {
        mean: r,
        stderr: (1.0 - r * r) / ((n - 1) as f64).sqrt(),
        n,
    })
}
