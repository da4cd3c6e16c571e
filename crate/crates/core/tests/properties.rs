use knotfield::critical::{find_critical_set, SeedingConfig};
use knotfield::curve::{discretize, make_curve, ChargeDiscretization, CurveKind, CurveParams};
use knotfield::field::{evaluate, far_field_check, field, hessian, potential};
use knotfield::linalg::Vec3;
use knotfield::planar::{axis_derivatives, planar_potential, PlanarShape};
use proptest::prelude::*;

fn charges(kind: CurveKind, n: usize) -> ChargeDiscretization<f64> {
    let params = if kind.uses_aspect() { CurveParams::with_aspect(1.7) } else { CurveParams::default() };
    discretize(&make_curve(kind, params).unwrap(), n).unwrap()
}

fn catalog() -> impl Strategy<Value = CurveKind> {
    proptest::sample::select(CurveKind::CATALOG.to_vec())
}

/// A point in the inflated bounding box at least `gap` from every charge.
fn off_curve(c: &ChargeDiscretization<f64>, u: [f64; 3], gap: f64) -> Option<Vec3<f64>> {
    let (lo, hi) = c.bounds();
    let lo = lo - Vec3::splat(0.5);
    let hi = hi + Vec3::splat(0.5);
    let p = Vec3::new(lo.x + u[0] * (hi.x - lo.x), lo.y + u[1] * (hi.y - lo.y), lo.z + u[2] * (hi.z - lo.z));
    (c.nearest_distance(p) > gap).then_some(p)
}

fn unit() -> impl Strategy<Value = [f64; 3]> {
    [0.0..1.0f64, 0.0..1.0f64, 0.0..1.0f64]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn hessian_is_traceless(kind in catalog(), u in unit()) {
        let c = charges(kind, 512);
        if let Some(p) = off_curve(&c, u, 0.05) {
            let h = hessian(&c, p).unwrap();
            prop_assert!(h.trace().abs() < 1e-10 * h.norm(), "{kind} {p:?}: trace {}", h.trace());
        }
    }

    #[test]
    fn field_is_minus_gradient(kind in catalog(), u in unit()) {
        let c = charges(kind, 512);
        if let Some(p) = off_curve(&c, u, 0.2) {
            let step = 1e-4;
            let e = field(&c, p).unwrap();
            let h = hessian(&c, p).unwrap();
            let axes = [Vec3::new(step, 0.0, 0.0), Vec3::new(0.0, step, 0.0), Vec3::new(0.0, 0.0, step)];
            for (i, d) in axes.iter().enumerate() {
                let fd = -(potential(&c, p + *d).unwrap() - potential(&c, p - *d).unwrap()) / (2.0 * step);
                prop_assert!((fd - e[i]).abs() <= 1e-5 * e.norm().max(1e-3), "{kind} E[{i}]: {fd} vs {}", e[i]);
                let de = (field(&c, p + *d).unwrap() - field(&c, p - *d).unwrap()).scale(-0.5 / step);
                for j in 0..3 {
                    prop_assert!((de[j] - h.get(i, j)).abs() <= 1e-5 * h.norm(), "{kind} H[{i}{j}]");
                }
            }
        }
    }

    #[test]
    fn planar_closed_forms_match_kernel(shape_ix in 0usize..3, a in 1.0..4.0f64, fx in -1.4..1.4f64, y in -1.5..1.5f64) {
        let shape = [PlanarShape::Rectangle, PlanarShape::Stadium, PlanarShape::Ellipse][shape_ix];
        let kind = [CurveKind::Rectangle, CurveKind::Stadium, CurveKind::Ellipse][shape_ix];
        let c = discretize(&make_curve(kind, CurveParams::with_aspect(a)).unwrap(), 16384).unwrap();
        let p = Vec3::new(fx * shape.half_width(a), y, 0.0);
        prop_assume!(c.nearest_distance(p) > 0.1);
        let want = potential(&c, p).unwrap();
        let got = planar_potential(shape, p.x, p.y, a).unwrap();
        prop_assert!((got - want).abs() < 1e-6 * want, "{shape} a={a} {p:?}: {got} vs {want}");
        if y.abs() < 1e-12 {
            let axis = axis_derivatives(shape, p.x, a).unwrap().phi;
            prop_assert!((axis - want).abs() < 1e-6 * want);
        }
    }
}

/// `φ·r − Q` is the quadrupole term, at most `Q⟨ρ²⟩/r²` about the centre
/// of charge, and falls off as `r⁻²`.
#[test]
fn far_field_approaches_point_charge() {
    for kind in CurveKind::CATALOG {
        let c = charges(kind, 1024);
        let q = c.total_charge;
        let centre = c.points.iter().zip(&c.weights).fold(Vec3::zero(), |acc, (&p, &w)| acc + p.scale(w / q));
        let centred = c.map_points(|p| p - centre);
        let spread: f64 = centred.points.iter().zip(&centred.weights).map(|(p, w)| w * p.norm_squared()).sum::<f64>() / q;
        let near = far_field_check(&centred, 100.0).unwrap();
        let far = far_field_check(&centred, 1000.0).unwrap();
        assert!(near < spread / 1e4, "{kind}: {near} vs bound {}", spread / 1e4);
        assert!((near / far - 100.0).abs() < 2.0, "{kind}: decay ratio {}", near / far);
    }
    let unit = charges(CurveKind::Unknot, 1024);
    assert!(far_field_check(&unit, 100.0).unwrap() < 1e-4);
}

#[test]
fn unknot_has_one_zero_at_two_pi() {
    for n in [64, 256, 1024] {
        let c = charges(CurveKind::Unknot, n);
        let set = find_critical_set(&c, &SeedingConfig::default()).unwrap();
        assert_eq!(set.points.len(), 1, "n={n}");
        let p = set.points[0];
        assert!((p.critical_value - std::f64::consts::TAU).abs() < 1e-8);
        assert!(p.position.norm() < 1e-8);
    }
}

fn trefoil() -> ChargeDiscretization<f64> {
    charges(CurveKind::Trefoil, 2048)
}

#[test]
fn trefoil_orbits_share_values() {
    let set = find_critical_set(&trefoil(), &SeedingConfig::default()).unwrap();
    let rot = |p: Vec3<f64>| p.rotate_z(std::f64::consts::TAU / 3.0);
    for p in &set.points {
        if p.position.x.hypot(p.position.y) < 1e-6 {
            continue;
        }
        let image = rot(p.position);
        let partner = set
            .points
            .iter()
            .min_by(|a, b| (a.position - image).norm().partial_cmp(&(b.position - image).norm()).unwrap())
            .unwrap();
        assert!((partner.position - image).norm() < 1e-6, "{:?} has no rotated partner", p.position);
        assert!((partner.critical_value - p.critical_value).abs() < 1e-8 * p.critical_value);
        assert_eq!(partner.morse_index, p.morse_index);
    }
}

#[test]
fn critical_sets_follow_rigid_motions() {
    let c = trefoil();
    let base = find_critical_set(&c, &SeedingConfig::default()).unwrap();
    let shift = Vec3::new(0.37, -1.2, 0.55);
    let motion = |p: Vec3<f64>| p.rotate_z(0.7) + shift;
    let moved = find_critical_set(&c.map_points(motion), &SeedingConfig::default()).unwrap();
    assert_eq!(base.points.len(), moved.points.len());
    for p in &base.points {
        let image = motion(p.position);
        let q = moved
            .points
            .iter()
            .min_by(|a, b| (a.position - image).norm().partial_cmp(&(b.position - image).norm()).unwrap())
            .unwrap();
        assert!((q.position - image).norm() < 1e-8, "{:?}", p.position);
        assert!((q.critical_value - p.critical_value).abs() < 1e-8 * p.critical_value);
        assert_eq!(q.morse_index, p.morse_index);
    }
}

#[test]
fn evaluate_agrees_with_parts() {
    let c = charges(CurveKind::FigureEight, 300);
    let p = Vec3::new(0.3, -0.4, 0.9);
    let e = evaluate(&c, p).unwrap();
    assert!((e.phi - potential(&c, p).unwrap()).abs() < 1e-13 * e.phi);
    assert!((e.e - field(&c, p).unwrap()).norm() < 1e-13 * e.e.norm());
    assert!((e.h - hessian(&c, p).unwrap()).norm() < 1e-13 * e.h.norm());
}
