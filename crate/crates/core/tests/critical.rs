use knotfield::critical::*;
use knotfield::curve::{discretize, make_curve, ChargeDiscretization, CurveKind, CurveParams};

fn knot(kind: CurveKind, gamma: f64, n: usize) -> ChargeDiscretization<f64> {
    discretize(&make_curve(kind, CurveParams::with_gamma(gamma)).unwrap(), n).unwrap()
}

fn balance(points: &[CriticalPoint<f64>]) -> i64 {
    let h = index_histogram(points);
    assert_eq!(h[0] + h[3] + h[4], 0, "only saddles expected: {h:?}");
    h[1] as i64 - h[2] as i64
}

#[test]
fn trefoil_morse_code() {
    let set = find_critical_set(&knot(CurveKind::Trefoil, 1.0, 2048), &SeedingConfig::with_grid(30)).unwrap();
    assert_eq!(set.points.len(), 7);
    let code = morse_code(&set.points);
    let expect = [(12.79, 1, 3), (15.42, 1, 1), (15.82, 2, 3)];
    assert_eq!(code.len(), 3);
    for (e, (v, i, m)) in code.iter().zip(expect) {
        assert!((e.value - v).abs() < 0.01, "{e:?}");
        assert_eq!(e.index, MorseIndex::Index(i));
        assert_eq!(e.multiplicity, m);
    }
    for p in &set.points {
        assert!(p.residual < 1e-9 * set.field_scale);
    }
}

#[test]
fn dense_seeder_finds_the_same_trefoil_zeros() {
    let c = knot(CurveKind::Trefoil, 1.0, 2048);
    let mc = find_critical_set(&c, &SeedingConfig::with_grid(30)).unwrap();
    let dense = find_critical_set(&c, &SeedingConfig { seeder: Seeder::Dense, ..SeedingConfig::with_grid(16) }).unwrap();
    assert_eq!(mc.points.len(), dense.points.len());
    for (a, b) in mc.points.iter().zip(&dense.points) {
        assert!((a.position - b.position).norm() < 1e-8);
    }
}

#[test]
fn figure_eight_has_nineteen_zeros_at_two_resolutions() {
    let c = knot(CurveKind::FigureEight, 1.0, 2048);
    for grid in [30, 60] {
        let set = find_critical_set(&c, &SeedingConfig::with_grid(grid)).unwrap();
        assert_eq!(set.points.len(), 19, "grid {grid}");
        assert_eq!(balance(&set.points), 1);
    }
}

#[test]
fn saddle_counts_balance_for_catalog_knots() {
    for kind in [CurveKind::Trefoil, CurveKind::TrefoilTableI, CurveKind::FigureEight, CurveKind::Cinquefoil, CurveKind::ThreeTwist] {
        let set = find_critical_set(&knot(kind, 1.0, 2048), &SeedingConfig::with_grid(30)).unwrap();
        assert_eq!(balance(&set.points), 1, "{kind}: {} zeros", set.points.len());
        assert_eq!(set.points.len() % 2, 1);
    }
}

#[test]
fn results_are_ordered_and_distinct() {
    let set = find_critical_set(&knot(CurveKind::Cinquefoil, 1.0, 2048), &SeedingConfig::with_grid(30)).unwrap();
    assert!(set.points.windows(2).all(|w| w[0].critical_value <= w[1].critical_value));
    for (i, a) in set.points.iter().enumerate() {
        for b in &set.points[i + 1..] {
            assert!((a.position - b.position).norm() > 1e-6);
        }
    }
}

#[test]
fn invalid_configs_are_rejected() {
    let c = knot(CurveKind::Trefoil, 1.0, 64);
    assert!(matches!(find_critical_set(&c, &SeedingConfig::with_grid(4)), Err(CriticalError::InvalidConfig(_))));
}

#[test]
fn json_fields_use_documented_names() {
    let set = find_critical_set(&knot(CurveKind::Trefoil, 1.0, 1024), &SeedingConfig::with_grid(30)).unwrap();
    let v = serde_json::to_value(set.points[0]).unwrap();
    for key in ["position", "value", "index", "eigenvalues", "residual"] {
        assert!(v.get(key).is_some(), "missing {key}");
    }
    assert_eq!(v["index"], 1);
}
