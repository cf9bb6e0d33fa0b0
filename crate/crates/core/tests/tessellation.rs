use std::f64::consts::{FRAC_PI_2, PI};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use sphtri::sampling::{uniform_great_circle, uniform_sphere_point, MonteCarloEstimate, RngStream};
use sphtri::sphere::{triangle_metrics, GreatCircle, SphericalTriangle, UnitVector};
use sphtri::stats::{bin_probabilities, chi_square_gof, histogram};
use sphtri::tessellation::*;

const TRIALS: usize = 100_000;

fn axis(x: f64, y: f64, z: f64) -> GreatCircle {
    GreatCircle::new(UnitVector::new(x, y, z).unwrap())
}

fn assert_within(e: MonteCarloEstimate, target: f64, what: &str) {
    assert!(e.within(target, 4.0), "{what}: {} ± {} vs {target}", e.mean, e.stderr);
}

#[test]
fn orthogonal_pair_gives_four_lunes() {
    let arr = build_arrangement(&[axis(0.0, 0.0, 1.0), axis(1.0, 0.0, 0.0)]).unwrap();
    assert_eq!(arr.vertices.len(), 2);
    assert_eq!(arr.arcs.len(), 4);
    assert_eq!(arr.cells.len(), 4);
    for c in &arr.cells {
        assert_eq!(c.vertex_count, 2);
        assert!((c.area - PI).abs() < 1e-12);
        assert!((c.perimeter - 2.0 * PI).abs() < 1e-12);
    }
}

#[test]
fn orthogonal_triple_gives_octants() {
    let arr = build_arrangement(&[axis(0.0, 0.0, 1.0), axis(1.0, 0.0, 0.0), axis(0.0, 1.0, 0.0)]).unwrap();
    assert_eq!(arr.cells.len(), 8);
    for c in &arr.cells {
        assert_eq!(c.vertex_count, 3);
        assert!((c.area - FRAC_PI_2).abs() < 1e-12);
        assert!((c.perimeter - 1.5 * PI).abs() < 1e-12);
    }
    let mut sigs: Vec<u64> = arr.cells.iter().map(|c| c.signature).collect();
    sigs.sort();
    assert_eq!(sigs, (0..8).collect::<Vec<u64>>());
}

#[test]
fn degenerate_configurations_are_rejected() {
    let twice = build_arrangement(&[axis(0.0, 0.0, 1.0), axis(0.0, 0.0, -1.0)]);
    assert!(matches!(twice, Err(TessellationError::DegenerateConfiguration(_))));
    let s = 0.5f64.sqrt();
    let concurrent = build_arrangement(&[axis(1.0, 0.0, 0.0), axis(0.0, 1.0, 0.0), axis(s, s, 0.0)]);
    assert!(matches!(concurrent, Err(TessellationError::DegenerateConfiguration(_))));
    assert!(matches!(
        build_arrangement(&[axis(1.0, 0.0, 0.0)]),
        Err(TessellationError::TooFewCircles { .. })
    ));
}

#[test]
fn exact_combinatorics_and_measure_closure() {
    let mut rng = ChaCha8Rng::seed_from_u64(41);
    for k in 2..=6 {
        for _ in 0..100 {
            let (arr, _) = random_arrangement(k, &mut rng).unwrap();
            let (v, e, f) = (arr.vertices.len(), arr.arcs.len(), arr.cells.len());
            assert_eq!(v, k * (k - 1));
            assert_eq!(e, 2 * k * (k - 1));
            assert_eq!(f, k * k - k + 2);
            assert_eq!(v as i64 - e as i64 + f as i64, 2);
            assert!((arr.total_area() - 4.0 * PI).abs() < 1e-9);
            assert!((arr.total_perimeter() - 4.0 * PI * k as f64).abs() < 1e-9);
            assert_eq!(arr.cells.iter().map(|c| c.vertex_count).sum::<usize>(), 4 * k * (k - 1));
            for c in &arr.cells {
                assert!(c.area > 0.0 && c.perimeter > 0.0);
                assert!(c.vertex_count >= if k == 2 { 2 } else { 3 });
            }
            for a in &arr.arcs {
                assert_ne!(a.left, a.right);
                assert!(arr.cells[a.left].side(a.circle));
                assert!(!arr.cells[a.right].side(a.circle));
            }
            let mut sigs: Vec<u64> = arr.cells.iter().map(|c| c.signature).collect();
            sigs.sort();
            sigs.dedup();
            assert_eq!(sigs.len(), f);
        }
    }
}

#[test]
fn three_circle_cells_match_triangle_excess() {
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    for _ in 0..100 {
        let (arr, _) = random_arrangement(3, &mut rng).unwrap();
        for c in &arr.cells {
            let v = arr.cell_vertices(c.id);
            assert_eq!(v.len(), 3);
            let m = triangle_metrics(&SphericalTriangle::new(v[0], v[1], v[2]).unwrap()).unwrap();
            assert!((m.excess - c.area).abs() < 1e-9, "{} vs {}", m.excess, c.area);
            assert!((m.perimeter - c.perimeter).abs() < 1e-9);
            assert!((cell_area(&v) - c.area).abs() < 1e-9);
        }
    }
}

#[test]
fn cell_area_matches_excess_for_random_triangles() {
    let mut rng = ChaCha8Rng::seed_from_u64(43);
    for _ in 0..10_000 {
        let v = [uniform_sphere_point(&mut rng), uniform_sphere_point(&mut rng), uniform_sphere_point(&mut rng)];
        let m = triangle_metrics(&SphericalTriangle::new(v[0], v[1], v[2]).unwrap()).unwrap();
        assert!((cell_area(&v) - m.excess).abs() < 1e-9);
        let reversed = [v[2], v[1], v[0]];
        assert!((cell_area(&reversed) - m.excess).abs() < 1e-9);
    }
}

#[test]
fn two_circle_law() {
    let draws = draw_cells(2, CellScheme::Uniform, TRIALS, RngStream::new(44, 0)).unwrap();
    assert!(draws.iter().all(|d| (d.perimeter - 2.0 * PI).abs() < 1e-9 && d.vertex_count == 2));
    let probs = bin_probabilities(|v| 0.25 * (v / 2.0).sin(), 0.0, 2.0 * PI, 40, &[], 1e-12).unwrap();
    let chi = chi_square_gof(&histogram(draws.iter().map(|d| d.area), 0.0, 2.0 * PI, 40), &probs);
    assert!(chi.p_value > 0.001, "{chi:?}");
}

#[test]
fn area_weighted_two_circles() {
    let draws = draw_cells(2, CellScheme::Area, TRIALS, RngStream::new(45, 0)).unwrap();
    let v: Vec<f64> = draws.iter().map(|d| d.area).collect();
    assert_within(MonteCarloEstimate::from_samples(&v).unwrap(), 2.0 * (PI * PI - 4.0) / PI, "area-weighted V");
    let probs = bin_probabilities(|v| v * 0.25 * (v / 2.0).sin() / PI, 0.0, 2.0 * PI, 40, &[], 1e-12).unwrap();
    let chi = chi_square_gof(&histogram(v.into_iter(), 0.0, 2.0 * PI, 40), &probs);
    assert!(chi.p_value > 0.001, "{chi:?}");
}

#[test]
fn located_cell_agrees_with_point_test() {
    let mut rng = ChaCha8Rng::seed_from_u64(46);
    for k in 2..=6 {
        let (arr, _) = random_arrangement(k, &mut rng).unwrap();
        for _ in 0..1000 {
            let p = uniform_sphere_point(&mut rng);
            let cell = arr.locate(p).unwrap();
            for (i, c) in arr.circles.iter().enumerate() {
                assert_eq!(cell.side(i), c.side(p) > 0.0);
            }
        }
    }
}

#[test]
fn probes_hit_two_k_distinct_cells() {
    let mut rng = ChaCha8Rng::seed_from_u64(47);
    for i in 0..10_000 {
        let k = 2 + i % 5;
        let (arr, _) = random_arrangement(k, &mut rng).unwrap();
        let mut hits = arr.hit_cells(&uniform_great_circle(&mut rng)).unwrap();
        assert_eq!(hits.len(), 2 * k);
        hits.sort();
        hits.dedup();
        assert_eq!(hits.len(), 2 * k);
    }
}

#[test]
fn perimeter_weighted_means() {
    let two = cell_statistics(2, CellScheme::Perimeter, TRIALS, RngStream::new(48, 0)).unwrap();
    assert_within(two.area, PI, "k=2");
    let three = cell_statistics(3, CellScheme::Perimeter, TRIALS, RngStream::new(48, 1)).unwrap();
    assert_within(three.area, PI - 4.0 / PI, "k=3");
}

#[test]
fn three_circle_moments() {
    let s = cell_statistics(3, CellScheme::Uniform, TRIALS, RngStream::new(49, 0)).unwrap();
    assert_within(s.area, FRAC_PI_2, "E₃(V)");
    assert_within(s.perimeter, 1.5 * PI, "E₃(S)");
    assert_within(s.area_perimeter, 1.5 * PI * PI - 6.0, "E₃(VS)");
    assert_eq!(s.vertex_counts.get(&3).copied(), Some(TRIALS as u64));
}

#[test]
fn four_circle_vertex_counts() {
    let s = vertex_count_distribution(4, TRIALS, RngStream::new(50, 0)).unwrap();
    assert_within(s.frequency(3), 4.0 / 7.0, "P(N=3)");
    assert_within(s.frequency(4), 3.0 / 7.0, "P(N=4)");
    assert_eq!(s.vertex_counts.keys().copied().collect::<Vec<_>>(), vec![3, 4]);
    assert_within(s.vertex_count, 24.0 / 7.0, "E N");
}

#[test]
fn split_relation() {
    assert_within(split_relation_check(2, TRIALS, RngStream::new(51, 0)).unwrap(), FRAC_PI_2, "k=2");
    let target = 0.5 * (PI - 4.0 / PI);
    assert_within(split_relation_check(3, TRIALS, RngStream::new(51, 1)).unwrap(), target, "k=3");
}

#[test]
fn vertex_relation() {
    let e = vertex_relation_check(2, TRIALS, RngStream::new(52, 0)).unwrap();
    assert_within(e, (PI * PI - 4.0) / (2.0 * PI), "k=2");
}

#[test]
fn uniform_cell_reading_of_vertex_relation_differs() {
    // with uniform cells on the left the relation would give (π²−4)/(2π), not 4π/14
    let uniform_four = 4.0 * PI / 14.0;
    let mut rng = ChaCha8Rng::seed_from_u64(53);
    for _ in 0..100 {
        let (arr, _) = random_arrangement(4, &mut rng).unwrap();
        assert!((arr.total_area() / arr.cells.len() as f64 - uniform_four).abs() < 1e-12);
    }
    assert!(((PI * PI - 4.0) / (2.0 * PI) - uniform_four).abs() > 0.03);
}

#[test]
fn cells_at_new_vertex_differ_only_in_new_circles() {
    let mut rng = ChaCha8Rng::seed_from_u64(54);
    for k in 2..=5 {
        for _ in 0..200 {
            let (arr, _) = random_arrangement(k + 2, &mut rng).unwrap();
            let v = arr.vertices.iter().position(|v| v.circles == (k, k + 1)).unwrap();
            let around = arr.cells_at_vertex(v);
            assert_eq!(around.len(), 4);
            let base = arr.cells[around[0]].signature & !(0b11 << k);
            let mut new_bits: Vec<u64> = around
                .iter()
                .map(|&c| {
                    let s = arr.cells[c].signature;
                    assert_eq!(s & !(0b11 << k), base);
                    s >> k & 0b11
                })
                .collect();
            new_bits.sort();
            assert_eq!(new_bits, vec![0, 1, 2, 3]);
        }
    }
}

#[test]
fn statistics_are_reproducible() {
    let a = cell_statistics(3, CellScheme::Area, 2000, RngStream::new(55, 0)).unwrap();
    let b = cell_statistics(3, CellScheme::Area, 2000, RngStream::new(55, 0)).unwrap();
    assert_eq!(a, b);
    assert!("vertex".parse::<CellScheme>().is_ok() && "bogus".parse::<CellScheme>().is_err());
}
