//! Arrangements of great circles: the cell complex cut out by `k` circles,
//! per-cell area, perimeter and vertex count, the three cell-sampling schemes,
//! and Monte Carlo checks of the cell moment relations.

use std::collections::{BTreeMap, HashMap};
use std::f64::consts::{PI, TAU};
use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::sampling::{collect_with, uniform_great_circle, uniform_sphere_point, MonteCarloEstimate, RngStream, SamplingError};
use crate::sphere::{add, cross, dot, norm, scale, GreatCircle, UnitVector, Vec3};

/// General-position tolerance for parallel poles, concurrent triples and
/// probe circles passing through a vertex.
pub const GENERAL_POSITION_TOL: f64 = 1e-9;

/// Upper limit on circles, set by the 64-bit signature.
pub const MAX_CIRCLES: usize = 64;

/// Attempts at drawing a generic configuration before giving up.
const MAX_RESAMPLES: u64 = 1000;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TessellationError {
    #[error("at least {min} circles are required, got {got}")]
    TooFewCircles { min: usize, got: usize },
    #[error("at most {MAX_CIRCLES} circles are supported, got {0}")]
    TooManyCircles(usize),
    #[error("degenerate configuration: {0}")]
    DegenerateConfiguration(String),
    #[error(transparent)]
    Sampling(#[from] SamplingError),
}

/// Intersection point of two circles.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Vertex {
    pub point: UnitVector,
    pub circles: (usize, usize),
}

/// Piece of a circle between consecutive vertices, running counterclockwise
/// about the circle's pole. `left` is the cell on the pole's side.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Arc {
    pub circle: usize,
    pub from: usize,
    pub to: usize,
    pub length: f64,
    pub left: usize,
    pub right: usize,
    start: f64,
}

/// Direction in which a cell's boundary runs along an arc.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Orientation {
    Forward,
    Backward,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Cell {
    pub id: usize,
    /// Boundary arcs in counterclockwise order seen from outside the sphere.
    pub boundary: Vec<(usize, Orientation)>,
    /// Area by Gauss–Bonnet.
    pub area: f64,
    pub perimeter: f64,
    pub vertex_count: usize,
    /// Bit `i` is set when the cell lies on the pole side of circle `i`.
    pub signature: u64,
}

impl Cell {
    /// Whether the cell lies on the pole side of circle `i`.
    pub fn side(&self, i: usize) -> bool {
        self.signature >> i & 1 == 1
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Arrangement {
    pub circles: Vec<GreatCircle>,
    pub vertices: Vec<Vertex>,
    pub arcs: Vec<Arc>,
    pub cells: Vec<Cell>,
    // outgoing half-edges at each vertex, counterclockwise
    outgoing: Vec<Vec<usize>>,
    by_signature: HashMap<u64, usize>,
}

fn normalize(v: Vec3) -> Vec3 {
    scale(v, 1.0 / norm(v))
}

fn unit(v: Vec3) -> UnitVector {
    UnitVector::new(v[0], v[1], v[2]).expect("normalized vector")
}

/// Angle of tangent `d` at `z`, counterclockwise seen from outside.
fn tangent_angle(z: UnitVector, d: Vec3) -> f64 {
    let (t1, t2) = GreatCircle::new(z).basis();
    dot(d, t2).atan2(dot(d, t1))
}

fn wrap(x: f64) -> f64 {
    x.rem_euclid(TAU)
}

fn signature_of(circles: &[GreatCircle], p: Vec3) -> u64 {
    circles
        .iter()
        .enumerate()
        .filter(|(_, c)| dot(p, c.pole.to_array()) > 0.0)
        .fold(0, |s, (i, _)| s | 1 << i)
}

impl Arrangement {
    /// Builds the cell complex of `circles`.
    pub fn build(circles: &[GreatCircle]) -> Result<Self, TessellationError> {
        let k = circles.len();
        if k < 2 {
            return Err(TessellationError::TooFewCircles { min: 2, got: k });
        }
        if k > MAX_CIRCLES {
            return Err(TessellationError::TooManyCircles(k));
        }
        let poles: Vec<Vec3> = circles.iter().map(|c| c.pole.to_array()).collect();

        let mut vertices = Vec::with_capacity(k * (k - 1));
        for i in 0..k {
            for j in i + 1..k {
                let d = cross(poles[i], poles[j]);
                if norm(d) < GENERAL_POSITION_TOL {
                    return Err(TessellationError::DegenerateConfiguration(format!("circles {i} and {j} coincide")));
                }
                let d = normalize(d);
                for l in (0..k).filter(|&l| l != i && l != j) {
                    if dot(d, poles[l]).abs() < GENERAL_POSITION_TOL {
                        return Err(TessellationError::DegenerateConfiguration(format!(
                            "circles {i}, {j} and {l} are concurrent"
                        )));
                    }
                }
                vertices.push(Vertex { point: unit(d), circles: (i, j) });
                vertices.push(Vertex { point: unit(scale(d, -1.0)), circles: (i, j) });
            }
        }

        // arcs: consecutive vertices on each circle
        let mut arcs = Vec::with_capacity(2 * k * (k - 1));
        for (ci, circle) in circles.iter().enumerate() {
            let (e1, e2) = circle.basis();
            let mut on: Vec<(f64, usize)> = vertices
                .iter()
                .enumerate()
                .filter(|(_, v)| v.circles.0 == ci || v.circles.1 == ci)
                .map(|(vi, v)| {
                    let p = v.point.to_array();
                    (wrap(dot(p, e2).atan2(dot(p, e1))), vi)
                })
                .collect();
            on.sort_by(|x, y| x.0.total_cmp(&y.0));
            let m = on.len();
            for a in 0..m {
                let (t0, from) = on[a];
                let (t1, to) = on[(a + 1) % m];
                let length = if a + 1 == m { t1 + TAU - t0 } else { t1 - t0 };
                if length < GENERAL_POSITION_TOL {
                    return Err(TessellationError::DegenerateConfiguration(format!(
                        "vertices {from} and {to} coincide on circle {ci}"
                    )));
                }
                arcs.push(Arc { circle: ci, from, to, length, left: usize::MAX, right: usize::MAX, start: t0 });
            }
        }

        // half-edge h = 2·arc + (0 forward, 1 backward)
        let origin = |h: usize| if h % 2 == 0 { arcs[h / 2].from } else { arcs[h / 2].to };
        let dest = |h: usize| if h % 2 == 0 { arcs[h / 2].to } else { arcs[h / 2].from };
        let direction = |h: usize| {
            let z = vertices[origin(h)].point;
            let t = cross(poles[arcs[h / 2].circle], z.to_array());
            let t = if h % 2 == 0 { t } else { scale(t, -1.0) };
            tangent_angle(z, t)
        };
        let n_half = 2 * arcs.len();
        let mut outgoing: Vec<Vec<(f64, usize)>> = vec![Vec::new(); vertices.len()];
        for h in 0..n_half {
            outgoing[origin(h)].push((direction(h), h));
        }
        for out in &mut outgoing {
            out.sort_by(|x, y| x.0.total_cmp(&y.0));
        }
        // next(h): at dest(h), the outgoing half-edge clockwise from twin(h)
        let mut next = vec![0usize; n_half];
        let mut turn = vec![0f64; n_half];
        for h in 0..n_half {
            let out = &outgoing[dest(h)];
            let twin = h ^ 1;
            let pos = out.iter().position(|&(_, e)| e == twin).expect("twin leaves the destination");
            let (a_next, e_next) = out[(pos + out.len() - 1) % out.len()];
            next[h] = e_next;
            turn[h] = wrap(out[pos].0 - a_next);
        }

        let mut face_of = vec![usize::MAX; n_half];
        let mut cells = Vec::with_capacity(k * k - k + 2);
        for h0 in 0..n_half {
            if face_of[h0] != usize::MAX {
                continue;
            }
            let id = cells.len();
            let mut boundary = Vec::new();
            let mut angles = 0.0;
            let mut perimeter = 0.0;
            let mut signature_bound = 0u64;
            let mut bounding = 0u64;
            let mut interior = [0.0; 3];
            let mut h = h0;
            loop {
                face_of[h] = id;
                let arc = &arcs[h / 2];
                let forward = h % 2 == 0;
                boundary.push((h / 2, if forward { Orientation::Forward } else { Orientation::Backward }));
                angles += turn[h];
                perimeter += arc.length;
                bounding |= 1 << arc.circle;
                if forward {
                    signature_bound |= 1 << arc.circle;
                }
                let (e1, e2) = circles[arc.circle].basis();
                let (s, c) = (arc.start + 0.5 * arc.length).sin_cos();
                interior = add(interior, add(scale(e1, c), scale(e2, s)));
                h = next[h];
                if h == h0 {
                    break;
                }
            }
            let n = boundary.len();
            let area = angles - (n as f64 - 2.0) * PI;
            let signature = signature_bound | (signature_of(circles, interior) & !bounding);
            cells.push(Cell { id, boundary, area, perimeter, vertex_count: n, signature });
        }
        for (a, arc) in arcs.iter_mut().enumerate() {
            arc.left = face_of[2 * a];
            arc.right = face_of[2 * a + 1];
        }
        let mut by_signature = HashMap::with_capacity(cells.len());
        for c in &cells {
            if by_signature.insert(c.signature, c.id).is_some() {
                return Err(TessellationError::DegenerateConfiguration("repeated cell signature".into()));
            }
        }
        let outgoing = outgoing.into_iter().map(|o| o.into_iter().map(|(_, h)| h).collect()).collect();
        Ok(Self { circles: circles.to_vec(), vertices, arcs, cells, outgoing, by_signature })
    }

    pub fn k(&self) -> usize {
        self.circles.len()
    }

    /// Signature of a point with respect to every circle.
    pub fn signature(&self, p: UnitVector) -> u64 {
        signature_of(&self.circles, p.to_array())
    }

    /// The cell containing `p`, if `p` lies off every circle.
    pub fn locate(&self, p: UnitVector) -> Option<&Cell> {
        self.by_signature.get(&self.signature(p)).map(|&i| &self.cells[i])
    }

    /// Cells around vertex `v`, counterclockwise.
    pub fn cells_at_vertex(&self, v: usize) -> Vec<usize> {
        self.outgoing[v]
            .iter()
            .map(|&h| if h % 2 == 0 { self.arcs[h / 2].left } else { self.arcs[h / 2].right })
            .collect()
    }

    /// Cells crossed by the probe circle, in order along it.
    pub fn hit_cells(&self, probe: &GreatCircle) -> Result<Vec<usize>, TessellationError> {
        let q = probe.pole.to_array();
        let (e1, e2) = probe.basis();
        let mut ts = Vec::with_capacity(2 * self.k());
        for c in &self.circles {
            let d = cross(q, c.pole.to_array());
            if norm(d) < GENERAL_POSITION_TOL {
                return Err(TessellationError::DegenerateConfiguration("probe coincides with a circle".into()));
            }
            let t = dot(d, e2).atan2(dot(d, e1));
            ts.push(wrap(t));
            ts.push(wrap(t + PI));
        }
        ts.sort_by(f64::total_cmp);
        let m = ts.len();
        let mut hits = Vec::with_capacity(m);
        for i in 0..m {
            let gap = if i + 1 == m { ts[0] + TAU - ts[i] } else { ts[i + 1] - ts[i] };
            if gap < GENERAL_POSITION_TOL {
                return Err(TessellationError::DegenerateConfiguration("probe passes through a vertex".into()));
            }
            let (s, c) = (ts[i] + 0.5 * gap).sin_cos();
            let p = add(scale(e1, c), scale(e2, s));
            let cell = self
                .by_signature
                .get(&signature_of(&self.circles, p))
                .ok_or_else(|| TessellationError::DegenerateConfiguration("probe point not located".into()))?;
            hits.push(*cell);
        }
        Ok(hits)
    }

    pub fn total_area(&self) -> f64 {
        self.cells.iter().map(|c| c.area).sum()
    }

    pub fn total_perimeter(&self) -> f64 {
        self.cells.iter().map(|c| c.perimeter).sum()
    }

    /// Vertices of a cell in boundary order.
    pub fn cell_vertices(&self, cell: usize) -> Vec<UnitVector> {
        self.cells[cell]
            .boundary
            .iter()
            .map(|&(a, o)| {
                let arc = &self.arcs[a];
                self.vertices[if o == Orientation::Forward { arc.from } else { arc.to }].point
            })
            .collect()
    }
}

/// Builds the arrangement of `circles`.
pub fn build_arrangement(circles: &[GreatCircle]) -> Result<Arrangement, TessellationError> {
    Arrangement::build(circles)
}

/// Area of the convex geodesic polygon with the given vertices, by
/// Gauss–Bonnet. Either orientation is accepted.
pub fn cell_area(vertices: &[UnitVector]) -> f64 {
    let n = vertices.len();
    let mut angles = 0.0;
    for i in 0..n {
        let z = vertices[i];
        let zp = z.to_array();
        let toward = |q: UnitVector| {
            let q = q.to_array();
            add(q, scale(zp, -dot(q, zp)))
        };
        let to_next = tangent_angle(z, toward(vertices[(i + 1) % n]));
        let to_prev = tangent_angle(z, toward(vertices[(i + n - 1) % n]));
        angles += wrap(to_prev - to_next);
    }
    let area = angles - (n as f64 - 2.0) * PI;
    if area > 2.0 * PI {
        4.0 * PI - area
    } else {
        area
    }
}

/// `k` independent uniform great circles in general position; degenerate
/// draws are discarded. Returns the arrangement and the number discarded.
pub fn random_arrangement<R: Rng + ?Sized>(k: usize, rng: &mut R) -> Result<(Arrangement, u64), TessellationError> {
    if k < 2 {
        return Err(TessellationError::TooFewCircles { min: 2, got: k });
    }
    let mut discarded = 0;
    loop {
        let circles: Vec<GreatCircle> = (0..k).map(|_| uniform_great_circle(rng)).collect();
        match Arrangement::build(&circles) {
            Ok(a) => return Ok((a, discarded)),
            Err(TessellationError::DegenerateConfiguration(why)) => {
                discarded += 1;
                if discarded >= MAX_RESAMPLES {
                    return Err(TessellationError::DegenerateConfiguration(why));
                }
            }
            Err(e) => return Err(e),
        }
    }
}

/// A cell chosen with equal weight.
pub fn sample_cell_uniform<'a, R: Rng + ?Sized>(arr: &'a Arrangement, rng: &mut R) -> &'a Cell {
    &arr.cells[rng.random_range(0..arr.cells.len())]
}

/// The cell containing a uniform point, so chosen proportionally to area.
pub fn sample_cell_area_weighted<'a, R: Rng + ?Sized>(arr: &'a Arrangement, rng: &mut R) -> &'a Cell {
    loop {
        if let Some(c) = arr.locate(uniform_sphere_point(rng)) {
            return c;
        }
    }
}

/// One of the cells hit by a uniform probe circle, so chosen proportionally
/// to perimeter.
pub fn sample_cell_perimeter_weighted<'a, R: Rng + ?Sized>(
    arr: &'a Arrangement,
    rng: &mut R,
) -> Result<&'a Cell, TessellationError> {
    let hits = arr.hit_cells(&uniform_great_circle(rng))?;
    Ok(&arr.cells[hits[rng.random_range(0..hits.len())]])
}

/// How a cell is chosen in a tessellation trial.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CellScheme {
    Uniform,
    Area,
    Perimeter,
    /// A uniform side of a uniform arc of one extra circle.
    Split,
    /// A uniform one of the four cells at the vertex of two extra circles.
    Vertex,
}

impl CellScheme {
    pub const ALL: [CellScheme; 5] =
        [CellScheme::Uniform, CellScheme::Area, CellScheme::Perimeter, CellScheme::Split, CellScheme::Vertex];

    pub fn name(self) -> &'static str {
        match self {
            CellScheme::Uniform => "uniform",
            CellScheme::Area => "area",
            CellScheme::Perimeter => "perimeter",
            CellScheme::Split => "split",
            CellScheme::Vertex => "vertex",
        }
    }
}

impl fmt::Display for CellScheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for CellScheme {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::ALL
            .into_iter()
            .find(|x| x.name() == s)
            .ok_or_else(|| format!("unknown scheme `{s}`; expected one of uniform, area, perimeter, split, vertex"))
    }
}

/// Area, perimeter and vertex count of one sampled cell.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CellDraw {
    pub area: f64,
    pub perimeter: f64,
    pub vertex_count: usize,
    /// Degenerate configurations discarded before this draw.
    pub resampled: u64,
}

impl CellDraw {
    fn of(c: &Cell, resampled: u64) -> Self {
        Self { area: c.area, perimeter: c.perimeter, vertex_count: c.vertex_count, resampled }
    }
}

/// One trial of `scheme` over `k` base circles.
pub fn draw_cell<R: Rng + ?Sized>(k: usize, scheme: CellScheme, rng: &mut R) -> Result<CellDraw, TessellationError> {
    let mut resampled = 0;
    loop {
        let extra = match scheme {
            CellScheme::Split => 1,
            CellScheme::Vertex => 2,
            _ => 0,
        };
        let (arr, discarded) = random_arrangement(k + extra, rng)?;
        resampled += discarded;
        let cell = match scheme {
            CellScheme::Uniform => sample_cell_uniform(&arr, rng),
            CellScheme::Area => sample_cell_area_weighted(&arr, rng),
            CellScheme::Perimeter => match sample_cell_perimeter_weighted(&arr, rng) {
                Ok(c) => c,
                Err(TessellationError::DegenerateConfiguration(_)) if resampled < MAX_RESAMPLES => {
                    resampled += 1;
                    continue;
                }
                Err(e) => return Err(e),
            },
            CellScheme::Split => {
                let arcs: Vec<&Arc> = arr.arcs.iter().filter(|a| a.circle == k).collect();
                let arc = arcs[rng.random_range(0..arcs.len())];
                &arr.cells[if rng.random_bool(0.5) { arc.left } else { arc.right }]
            }
            CellScheme::Vertex => {
                let pair = (k, k + 1);
                let ends: Vec<usize> = (0..arr.vertices.len()).filter(|&v| arr.vertices[v].circles == pair).collect();
                let v = ends[rng.random_range(0..ends.len())];
                let around = arr.cells_at_vertex(v);
                &arr.cells[around[rng.random_range(0..around.len())]]
            }
        };
        return Ok(CellDraw::of(cell, resampled));
    }
}

/// Sample statistics of `trials` independent draws of a scheme.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellStatistics {
    pub k: usize,
    pub scheme: CellScheme,
    pub trials: usize,
    pub area: MonteCarloEstimate,
    pub perimeter: MonteCarloEstimate,
    pub area_perimeter: MonteCarloEstimate,
    pub vertex_count: MonteCarloEstimate,
    pub vertex_counts: BTreeMap<usize, u64>,
    pub resampled: u64,
}

impl CellStatistics {
    /// Relative frequency of vertex count `n` with its binomial standard error.
    pub fn frequency(&self, n: usize) -> MonteCarloEstimate {
        let p = self.vertex_counts.get(&n).copied().unwrap_or(0) as f64 / self.trials as f64;
        MonteCarloEstimate { mean: p, stderr: (p * (1.0 - p) / self.trials as f64).sqrt(), n: self.trials }
    }
}

/// Per-trial draws of `scheme`, deterministic for a given stream.
pub fn draw_cells(k: usize, scheme: CellScheme, trials: usize, stream: RngStream) -> Result<Vec<CellDraw>, TessellationError> {
    if k < 2 {
        return Err(TessellationError::TooFewCircles { min: 2, got: k });
    }
    if k + 2 > MAX_CIRCLES {
        return Err(TessellationError::TooManyCircles(k));
    }
    let draws = collect_with(|rng: &mut ChaCha8Rng| Ok(draw_cell(k, scheme, rng)), trials, stream)?;
    draws.into_iter().collect()
}

pub fn cell_statistics(
    k: usize,
    scheme: CellScheme,
    trials: usize,
    stream: RngStream,
) -> Result<CellStatistics, TessellationError> {
    let draws = draw_cells(k, scheme, trials, stream)?;
    let col = |f: &dyn Fn(&CellDraw) -> f64| -> Result<MonteCarloEstimate, TessellationError> {
        let xs: Vec<f64> = draws.iter().map(f).collect();
        Ok(MonteCarloEstimate::from_samples(&xs)?)
    };
    let mut vertex_counts = BTreeMap::new();
    for d in &draws {
        *vertex_counts.entry(d.vertex_count).or_insert(0) += 1;
    }
    Ok(CellStatistics {
        k,
        scheme,
        trials,
        area: col(&|d| d.area)?,
        perimeter: col(&|d| d.perimeter)?,
        area_perimeter: col(&|d| d.area * d.perimeter)?,
        vertex_count: col(&|d| d.vertex_count as f64)?,
        vertex_counts,
        resampled: draws.iter().map(|d| d.resampled).sum(),
    })
}

/// Mean area of a uniform side of a uniform arc of one new circle added to
/// `k` circles. Targets `½ E_k(VS)/E_k(S)`.
pub fn split_relation_check(k: usize, trials: usize, stream: RngStream) -> Result<MonteCarloEstimate, TessellationError> {
    Ok(cell_statistics(k, CellScheme::Split, trials, stream)?.area)
}

/// Mean area of a uniform one of the four cells at the crossing of two new
/// circles added to `k` circles. Targets `¼ E_k(V²)/E_k(V)`.
pub fn vertex_relation_check(k: usize, trials: usize, stream: RngStream) -> Result<MonteCarloEstimate, TessellationError> {
    Ok(cell_statistics(k, CellScheme::Vertex, trials, stream)?.area)
}

/// Counts of the vertex number `N` of a uniformly chosen cell.
pub fn vertex_count_distribution(
    k: usize,
    trials: usize,
    stream: RngStream,
) -> Result<CellStatistics, TessellationError> {
    cell_statistics(k, CellScheme::Uniform, trials, stream)
}
