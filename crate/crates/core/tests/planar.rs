use knotfield::curve::{discretize, make_curve, CurveKind, CurveParams};
use knotfield::field::{hessian, potential};
use knotfield::linalg::Vec3;
use knotfield::planar::*;

fn charges(kind: CurveKind, a: f64, n: usize) -> knotfield::curve::ChargeDiscretization<f64> {
    discretize(&make_curve(kind, CurveParams::with_aspect(a)).unwrap(), n).unwrap()
}

fn kind_of(shape: PlanarShape) -> CurveKind {
    match shape {
        PlanarShape::Rectangle => CurveKind::Rectangle,
        PlanarShape::Stadium => CurveKind::Stadium,
        PlanarShape::Ellipse => CurveKind::Ellipse,
    }
}

#[test]
fn rectangle_threshold_agrees_with_cubic() {
    let r = rectangle_threshold::<f64>().unwrap();
    let root = r.polynomial_root.unwrap();
    assert!((root - 2.20557).abs() < 1e-5, "{root}");
    assert!((r.threshold - root).abs() < 1e-4);
    assert!(rectangle_threshold_polynomial(r.threshold).abs() < 1e-3);
    let (lo, hi) = r.bracket;
    let c = |a| d2phi_origin(PlanarShape::Rectangle, a).unwrap();
    assert!(c(lo) * c(hi) < 0.0);
    assert!(c(1.1) > 0.0 && c(2.5) < 0.0);
}

#[test]
fn stadium_threshold_value() {
    let r = stadium_threshold::<f64>().unwrap();
    assert!((r.threshold - 1.1313).abs() < 1e-3, "{}", r.threshold);
    assert!((r.aspect_ratio - 2.13).abs() < 2e-3);
    assert!(r.polynomial_root.is_none());
    let c = |a| d2phi_origin(PlanarShape::Stadium, a).unwrap();
    assert!(c(r.bracket.0) * c(r.bracket.1) < 0.0);
}

#[test]
fn critical_point_counts() {
    let count = |s, a| planar_critical_points::<f64>(s, a).unwrap().len();
    assert_eq!(count(PlanarShape::Rectangle, 1.1), 1);
    assert_eq!(count(PlanarShape::Rectangle, 2.5), 3);
    assert_eq!(count(PlanarShape::Stadium, 1.0), 1);
    assert_eq!(count(PlanarShape::Stadium, 2.0), 3);
    for k in 0..=18 {
        let a = 1.0 + 0.5 * k as f64;
        assert_eq!(count(PlanarShape::Ellipse, a), 1, "ellipse a={a}");
    }
}

#[test]
fn off_center_pair_is_symmetric_minima() {
    let pts = planar_critical_points::<f64>(PlanarShape::Rectangle, 2.5).unwrap();
    assert_eq!(pts[0].x, -pts[2].x);
    assert_eq!(pts[1].x, 0.0);
    assert_eq!(pts[1].kind, AxisCriticalKind::Maximum);
    assert_eq!(pts[0].kind, AxisCriticalKind::Minimum);
    assert_eq!(pts[2].kind, AxisCriticalKind::Minimum);
}

// Computed here; pinned to catch regressions, not taken from elsewhere.
#[test]
fn off_center_positions_regression() {
    for (shape, a, x) in [(PlanarShape::Rectangle, 2.5, 0.895111451303), (PlanarShape::Stadium, 2.0, 1.649084210949)] {
        let pts = planar_critical_points::<f64>(shape, a).unwrap();
        assert_eq!(pts.len(), 3);
        assert!((pts[2].x - x).abs() < 1e-9, "{shape}: {}", pts[2].x);
    }
}

#[test]
fn pitchfork_pair_collapses_toward_threshold() {
    let t = rectangle_threshold::<f64>().unwrap().threshold;
    let mut last = f64::INFINITY;
    for eps in [0.3, 0.1, 0.03, 0.01, 0.003] {
        let pts = planar_critical_points::<f64>(PlanarShape::Rectangle, t + eps).unwrap();
        assert_eq!(pts.len(), 3, "eps={eps}");
        let x = pts[2].x;
        assert!(x < last, "eps={eps}: {x} !< {last}");
        last = x;
    }
    assert!(last < 0.1);
    assert_eq!(planar_critical_points::<f64>(PlanarShape::Rectangle, t - 0.003).unwrap().len(), 1);
}

#[test]
fn ellipse_curvature_positive_and_decreasing() {
    let mut prev = f64::INFINITY;
    for k in 0..=90 {
        let a = 1.0 + 0.1 * k as f64;
        let c = ellipse_d2phi_origin(a);
        assert!(c > 0.0, "a={a}");
        assert!(c < prev, "a={a}");
        prev = c;
    }
}

#[test]
fn closed_forms_match_discretized_kernel() {
    let n = 16384;
    for (shape, a) in [
        (PlanarShape::Rectangle, 1.0),
        (PlanarShape::Rectangle, 2.5),
        (PlanarShape::Stadium, 1.0),
        (PlanarShape::Stadium, 2.0),
        (PlanarShape::Ellipse, 1.7),
    ] {
        let c = charges(kind_of(shape), a, n);
        let half = shape.half_width(a);
        for x in [0.0, 0.3 * half, -0.6 * half, 1.5 * half] {
            let want = potential(&c, Vec3::new(x, 0.0, 0.0)).unwrap();
            let got = axis_derivatives(shape, x, a).unwrap().phi;
            assert!((got - want).abs() < 1e-6 * want, "{shape} a={a} x={x}: {got} vs {want}");
        }
        for (x, y) in [(0.2 * half, 0.5), (-0.5 * half, -0.3), (0.1, 1.4)] {
            let want = potential(&c, Vec3::new(x, y, 0.0)).unwrap();
            let got = planar_potential(shape, x, y, a).unwrap();
            assert!((got - want).abs() < 1e-6 * want, "{shape} a={a} ({x},{y}): {got} vs {want}");
        }
    }
}

#[test]
fn center_curvature_matches_kernel_hessian() {
    for (shape, a) in [(PlanarShape::Rectangle, 1.5), (PlanarShape::Stadium, 1.2), (PlanarShape::Ellipse, 3.0)] {
        let c = charges(kind_of(shape), a, 16384);
        let want = hessian(&c, Vec3::zero()).unwrap().xx;
        let got = d2phi_origin(shape, a).unwrap();
        assert!((got - want).abs() < 1e-6 * want.abs().max(1e-3), "{shape}: {got} vs {want}");
    }
}

#[test]
fn axis_slope_and_curvature_match_finite_differences() {
    let h = 1e-5;
    for (shape, a, x) in [
        (PlanarShape::Rectangle, 2.0, 0.7),
        (PlanarShape::Stadium, 1.5, -1.9),
        (PlanarShape::Ellipse, 2.5, 1.1),
    ] {
        let f = |x: f64| axis_derivatives(shape, x, a).unwrap();
        let d = f(x);
        let fd1 = (f(x + h).phi - f(x - h).phi) / (2.0 * h);
        let fd2 = (f(x + h).slope - f(x - h).slope) / (2.0 * h);
        assert!((d.slope - fd1).abs() < 1e-6 * (1.0 + d.slope.abs()), "{shape} slope");
        assert!((d.curvature - fd2).abs() < 1e-6 * (1.0 + d.curvature.abs()), "{shape} curvature");
    }
}

#[test]
fn contour_grid_marks_curve_points() {
    let g = contour_grid::<f64>(PlanarShape::Rectangle, 1.5, 5).unwrap();
    assert_eq!(g.len(), 25);
    assert!(g.iter().all(|&(_, _, p)| p.is_nan() || p > 0.0));
}

#[test]
fn f32_threshold_is_close() {
    let r = rectangle_threshold::<f32>().unwrap();
    assert!((r.threshold - 2.20557).abs() < 1e-3);
}
