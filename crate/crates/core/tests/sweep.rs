use knotfield::curve::CurveKind;
use knotfield::sweep::*;

#[test]
fn trefoil_keeps_seven_zeros_while_flattening() {
    let r = flatten_sweep(CurveKind::Trefoil, 1.0, 0.05, 5, &SweepConfig::default()).unwrap();
    assert_eq!(r.records.len(), 5);
    for rec in &r.records {
        assert_eq!(rec.zero_count, 7, "gamma {}", rec.gamma);
        assert_eq!(rec.zero_count, rec.index_histogram.iter().sum::<usize>());
        assert!(rec.flags.is_empty());
    }
    assert_eq!(r.min_zero_count, 7);
    let b = r.bound_check.unwrap();
    assert_eq!((b.lower, b.upper), (3, 7));
    assert!(b.lower_ok && b.upper_ok);
    assert!(r.odd_jumps.is_empty());
}

#[test]
fn inserting_gammas_keeps_existing_counts() {
    let cfg = SweepConfig::default();
    let coarse = flatten_sweep(CurveKind::FigureEight, 1.0, 0.5, 2, &cfg).unwrap();
    let fine = flatten_sweep(CurveKind::FigureEight, 1.0, 0.5, 3, &cfg).unwrap();
    assert_eq!(coarse.records[0].zero_count, fine.records[0].zero_count);
    assert_eq!(coarse.records[1].zero_count, fine.records[2].zero_count);
    assert_eq!(fine.records[0].zero_count, 19);
}

#[test]
fn records_respect_the_lower_bound() {
    let cfg = SweepConfig::default();
    for kind in [CurveKind::FigureEight, CurveKind::Cinquefoil] {
        let rec = sweep_record(kind, 0.3, &cfg).unwrap();
        assert!(rec.zero_count >= 3, "{kind}");
        assert_eq!(rec.index_balance(), 1, "{kind}");
    }
}

#[test]
fn planar_curves_are_not_table_knots() {
    let r = flatten_sweep(CurveKind::Ellipse, 1.0, 0.5, 2, &SweepConfig::default()).unwrap();
    assert!(r.bound_check.is_none());
}
