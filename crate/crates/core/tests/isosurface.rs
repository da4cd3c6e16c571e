use std::f64::consts::TAU;

use knotfield::critical::{find_critical_set, SearchBox, SeedingConfig};
use knotfield::curve::{discretize, make_curve, ChargeDiscretization, CurveKind, CurveParams};
use knotfield::field::potential;
use knotfield::isosurface::*;
use knotfield::linalg::Vec3;

fn unknot(n: usize) -> ChargeDiscretization<f64> {
    discretize(&make_curve(CurveKind::Unknot, CurveParams::default()).unwrap(), n).unwrap()
}

#[test]
fn point_charge_gives_unit_sphere() {
    let c = ChargeDiscretization::from_charges(vec![Vec3::zero()], vec![TAU]);
    let cfg = IsosurfaceConfig { bounding_box: Some(SearchBox { lo: Vec3::splat(-2.0), hi: Vec3::splat(2.0) }), ..IsosurfaceConfig::with_grid(40) };
    let (mesh, report) = extract_with_topology(&c, TAU, &cfg, None).unwrap();
    assert_eq!((report.component_count, report.total_genus), (1, 0));
    assert_eq!(report.components[0].euler_characteristic, 2);
    for p in &mesh.vertices {
        assert!((p.norm() - 1.0).abs() < mesh.cell_size);
    }
}

#[test]
fn unknot_is_a_torus_near_the_wire_and_a_sphere_far_away() {
    let c = unknot(256);
    let cfg = IsosurfaceConfig::with_grid(60);
    let (mesh, near) = extract_with_topology(&c, 8.0, &cfg, None).unwrap();
    assert_eq!((near.component_count, near.total_genus), (1, 1));
    for p in &mesh.vertices {
        assert!((potential(&c, *p).unwrap() - 8.0).abs() < 0.01 * 8.0);
    }
    let (_, far) = extract_with_topology(&c, 1.0, &cfg, None).unwrap();
    assert_eq!((far.component_count, far.total_genus), (1, 0));
}

#[test]
fn box_grows_to_enclose_low_levels() {
    let c = unknot(128);
    let cfg = IsosurfaceConfig { bounding_box: Some(SearchBox { lo: Vec3::splat(-1.2), hi: Vec3::splat(1.2) }), ..IsosurfaceConfig::with_grid(40) };
    let (mesh, r) = extract_with_topology(&c, 0.5, &cfg, None).unwrap();
    assert_eq!(r.total_genus, 0);
    assert!(mesh.vertices.iter().any(|p| p.norm() > 5.0));
}

#[test]
fn levels_at_critical_values_are_rejected() {
    let c = unknot(128);
    let set = find_critical_set(&c, &SeedingConfig::default()).unwrap();
    let err = extract_isosurface(&c, TAU * (1.0 + 1e-6), &IsosurfaceConfig::with_grid(20), Some(&set.points)).unwrap_err();
    match err {
        IsosurfaceError::NonRegularValue { critical_value, .. } => assert!((critical_value - TAU).abs() < 1e-8),
        e => panic!("unexpected {e}"),
    }
    assert!(matches!(extract_isosurface(&c, -1.0, &IsosurfaceConfig::with_grid(20), None), Err(IsosurfaceError::InvalidLevel(_))));
}

#[test]
fn unknot_gallery_goes_from_torus_to_sphere() {
    let c = unknot(256);
    let set = find_critical_set(&c, &SeedingConfig::default()).unwrap();
    let gallery = morse_transition_gallery(&c, &set.points, &IsosurfaceConfig::with_grid(60)).unwrap();
    let genus: Vec<i64> = gallery.iter().map(|g| g.topology.total_genus).collect();
    assert_eq!(genus, vec![1, 0]);
    assert!(gallery[0].level > gallery[1].level);
}

#[test]
fn refining_the_grid_keeps_topology() {
    let c = unknot(256);
    for level in [7.0, 5.0] {
        let coarse = extract_with_topology(&c, level, &IsosurfaceConfig::with_grid(48), None).unwrap().1;
        let fine = extract_with_topology(&c, level, &IsosurfaceConfig::with_grid(96), None).unwrap().1;
        assert_eq!(coarse.component_count, fine.component_count);
        assert_eq!(coarse.total_genus, fine.total_genus);
    }
}

#[test]
fn obj_export_is_consistent_with_the_mesh() {
    let c = unknot(128);
    let (mesh, report) = extract_with_topology(&c, 8.0, &IsosurfaceConfig::with_grid(40), None).unwrap();
    let mut buf = Vec::new();
    mesh.write_obj(&mut buf).unwrap();
    let text = String::from_utf8(buf).unwrap();
    assert_eq!(text.lines().filter(|l| l.starts_with("o ")).count(), report.component_count);
    assert_eq!(text.lines().filter(|l| l.starts_with("v ")).count(), mesh.vertices.len());
    assert_eq!(text.lines().filter(|l| l.starts_with("f ")).count(), mesh.triangles.len());
    let max_index = text
        .lines()
        .filter(|l| l.starts_with("f "))
        .flat_map(|l| l[2..].split(' ').map(|s| s.parse::<usize>().unwrap()).collect::<Vec<_>>())
        .max()
        .unwrap();
    assert_eq!(max_index, mesh.vertices.len());
}
