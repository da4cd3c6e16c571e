//! Equipotential surfaces `φ = v`, their connected components and genus.
//!
//! The level set is extracted by marching tetrahedra: every grid cube is
//! split into the six Kuhn tetrahedra sharing its main diagonal, so adjacent
//! cubes agree on face diagonals and the output is a closed 2-manifold
//! whenever the sampled box keeps the surface inside. Vertices live on grid
//! edges and are shared through an edge-keyed table, so no positional
//! welding is needed before computing topology.

use std::collections::HashMap;
use std::io::{self, Write};

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::critical::{morse_code, CriticalPoint, SearchBox};
use crate::curve::ChargeDiscretization;
use crate::field::{potential, FieldError};
use crate::linalg::Vec3;
use crate::scalar::Real;

pub const DEFAULT_GRID: usize = 120;
/// A level closer than this (relative) to a critical value is rejected.
pub const REGULAR_TOLERANCE: f64 = 1e-4;
/// Relative tolerance used by [`weld`] in units of the box diagonal.
pub const WELD_TOLERANCE: f64 = 1e-9;
const BOX_GROWTH: f64 = 1.25;
const MAX_BOX_GROWTH: usize = 24;
const EDGE_SOLVE_STEPS: usize = 40;
const EDGE_SOLVE_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Error)]
pub enum IsosurfaceError {
    #[error("level {0} must be positive and finite")]
    InvalidLevel(f64),
    #[error("level {level} is within tolerance of critical value {critical_value}; pick a nearby regular value")]
    NonRegularValue { level: f64, critical_value: f64 },
    #[error("mesh defect ({reason}) on {} edge(s), first {:?}", edges.len(), edges.first())]
    MeshDefect { reason: String, edges: Vec<(usize, usize)> },
    #[error("box did not enclose level {level} after {steps} growth steps")]
    Unbounded { level: f64, steps: usize },
    #[error("grid resolution {0} must be at least 2")]
    InvalidGrid(usize),
    #[error("empty critical set")]
    EmptyCriticalSet,
    #[error(transparent)]
    Field(#[from] FieldError),
}

/// Triangle mesh of one level set.
#[derive(Debug, Clone, Serialize)]
#[serde(bound(serialize = "T: Real + Serialize"))]
pub struct TriMesh<T> {
    pub vertices: Vec<Vec3<T>>,
    pub triangles: Vec<[usize; 3]>,
    pub level: T,
    /// Longest cell edge of the sampling lattice (zero for meshes built by hand).
    pub cell_size: T,
}

impl<T: Real> TriMesh<T> {
    pub fn new(vertices: Vec<Vec3<T>>, triangles: Vec<[usize; 3]>, level: T) -> Self {
        Self { vertices, triangles, level, cell_size: T::zero() }
    }

    pub fn is_empty(&self) -> bool {
        self.triangles.is_empty()
    }

    /// Writes Wavefront OBJ, one `o component_N` object per component.
    pub fn write_obj<W: Write>(&self, mut out: W) -> io::Result<()> {
        let labels = component_labels(self);
        let count = labels.iter().map(|&l| l + 1).max().unwrap_or(0);
        let mut remap = vec![usize::MAX; self.vertices.len()];
        let mut next = 1;
        for c in 0..count {
            writeln!(out, "o component_{c}")?;
            let tris: Vec<&[usize; 3]> =
                self.triangles.iter().zip(&labels).filter(|(_, &l)| l == c).map(|(t, _)| t).collect();
            for t in &tris {
                for &v in t.iter() {
                    if remap[v] == usize::MAX {
                        remap[v] = next;
                        next += 1;
                        let p = self.vertices[v];
                        writeln!(out, "v {} {} {}", p.x, p.y, p.z)?;
                    }
                }
            }
            for t in tris {
                writeln!(out, "f {} {} {}", remap[t[0]], remap[t[1]], remap[t[2]])?;
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ComponentTopology {
    pub vertices: usize,
    pub edges: usize,
    pub faces: usize,
    pub euler_characteristic: i64,
    pub genus: i64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TopologyReport {
    pub component_count: usize,
    pub components: Vec<ComponentTopology>,
    pub total_genus: i64,
}

/// Parameters for [`extract_isosurface`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(bound(serialize = "T: Real + Serialize"))]
pub struct IsosurfaceConfig<T> {
    pub grid_resolution: usize,
    /// Initial half-extent multiplier over the charge bounds.
    pub inflation: T,
    /// Fixed sampling box; grown automatically if it cuts the surface.
    pub bounding_box: Option<SearchBox<T>>,
    /// Double the grid once when the mesh is defective.
    pub retry_on_defect: bool,
}

impl<T: Real> Default for IsosurfaceConfig<T> {
    fn default() -> Self {
        Self { grid_resolution: DEFAULT_GRID, inflation: T::lit(1.5), bounding_box: None, retry_on_defect: true }
    }
}

impl<T: Real> IsosurfaceConfig<T> {
    pub fn with_grid(grid_resolution: usize) -> Self {
        Self { grid_resolution, ..Self::default() }
    }
}

/// Rejects `level` if it lies within `1e-4·level` of any critical value.
pub fn check_regular<T: Real>(level: T, critical: &[CriticalPoint<T>]) -> Result<(), IsosurfaceError> {
    let tol = T::lit(REGULAR_TOLERANCE) * level;
    match critical.iter().find(|p| (p.critical_value - level).abs() < tol) {
        Some(p) => Err(IsosurfaceError::NonRegularValue {
            level: level.to_f64_lossy(),
            critical_value: p.critical_value.to_f64_lossy(),
        }),
        None => Ok(()),
    }
}

fn potential_nudged<T: Real>(charges: &ChargeDiscretization<T>, p: Vec3<T>, nudge: Vec3<T>) -> Result<T, FieldError> {
    match potential(charges, p) {
        Err(FieldError::Singular { .. }) => potential(charges, p + nudge),
        r => r,
    }
}

/// Initial box: charge bounds inflated per axis, every half-extent at least
/// a tenth of the largest so planar curves get a slab.
pub fn initial_box<T: Real>(charges: &ChargeDiscretization<T>, inflation: T) -> SearchBox<T> {
    let (lo, hi) = charges.bounds();
    let center = (lo + hi).scale(T::lit(0.5));
    let half = (hi - lo).scale(T::lit(0.5));
    let floor = T::lit(0.1) * half.max_abs().max(T::lit(1e-3));
    let half = half.map(|h| h.max(floor) * inflation);
    SearchBox { lo: center - half, hi: center + half }
}

fn grow<T: Real>(b: &SearchBox<T>) -> SearchBox<T> {
    let c = b.center();
    let half = (b.hi - b.lo).scale(T::lit(0.5 * BOX_GROWTH));
    SearchBox { lo: c - half, hi: c + half }
}

/// Cheap probe of the six faces on a 17×17 lattice.
fn faces_below<T: Real>(charges: &ChargeDiscretization<T>, b: &SearchBox<T>, level: T) -> Result<bool, FieldError> {
    let m = 16;
    let mut pts = Vec::new();
    for a in 0..=m {
        for c in 0..=m {
            for (i, j, k) in [(0, a, c), (m, a, c), (a, 0, c), (a, m, c), (a, c, 0), (a, c, m)] {
                pts.push(b.corner(m, i, j, k));
            }
        }
    }
    let nudge = Vec3::splat(b.cell_diagonal(m) * T::lit(1e-4));
    let vals: Vec<T> = pts.par_iter().map(|&p| potential_nudged(charges, p, nudge)).collect::<Result<_, _>>()?;
    Ok(vals.iter().all(|&v| v < level))
}

/// Grows `start` until the probed boundary potential is below `level`.
pub fn enclosing_box<T: Real>(
    charges: &ChargeDiscretization<T>,
    start: SearchBox<T>,
    level: T,
) -> Result<SearchBox<T>, IsosurfaceError> {
    let mut b = start;
    for _ in 0..MAX_BOX_GROWTH {
        if faces_below(charges, &b, level)? {
            return Ok(b);
        }
        b = grow(&b);
    }
    Err(IsosurfaceError::Unbounded { level: level.to_f64_lossy(), steps: MAX_BOX_GROWTH })
}

/// Potential sampled on the corners of an `r³`-cell lattice, x fastest.
#[derive(Debug, Clone)]
pub struct ScalarGrid<T> {
    pub bbox: SearchBox<T>,
    pub resolution: usize,
    pub values: Vec<T>,
    nudge: Vec3<T>,
}

impl<T: Real> ScalarGrid<T> {
    pub fn sample(charges: &ChargeDiscretization<T>, bbox: SearchBox<T>, resolution: usize) -> Result<Self, IsosurfaceError> {
        if resolution < 2 {
            return Err(IsosurfaceError::InvalidGrid(resolution));
        }
        let m = resolution + 1;
        // singular corners are read slightly off the charge; the value is huge either way
        let nudge = Vec3::splat(bbox.cell_diagonal(resolution) * T::lit(1e-4));
        let values = (0..m * m * m)
            .into_par_iter()
            .map(|idx| potential_nudged(charges, bbox.corner(resolution, idx % m, (idx / m) % m, idx / (m * m)), nudge))
            .collect::<Result<Vec<T>, _>>()?;
        Ok(Self { bbox, resolution, values, nudge })
    }

    fn corner_index(&self, i: usize, j: usize, k: usize) -> usize {
        let m = self.resolution + 1;
        i + m * (j + m * k)
    }

    fn position(&self, idx: usize) -> Vec3<T> {
        let m = self.resolution + 1;
        self.bbox.corner(self.resolution, idx % m, (idx / m) % m, idx / (m * m))
    }

    /// Largest sampled value on the outer faces.
    pub fn boundary_max(&self) -> T {
        let r = self.resolution;
        let mut best = T::neg_infinity();
        for k in 0..=r {
            for j in 0..=r {
                for i in 0..=r {
                    if i == 0 || j == 0 || k == 0 || i == r || j == r || k == r {
                        best = best.max(self.values[self.corner_index(i, j, k)]);
                    }
                }
            }
        }
        best
    }

    /// Marching tetrahedra at `level`. Corners with `φ ≥ level` are inside.
    /// Edge crossings start from linear interpolation and are then tightened
    /// along the edge with Illinois regula falsi steps on the exact potential.
    pub fn extract(&self, charges: &ChargeDiscretization<T>, level: T) -> Result<TriMesh<T>, IsosurfaceError> {
        let r = self.resolution;
        let mut edges: HashMap<(usize, usize), usize> = HashMap::new();
        let mut crossings: Vec<(usize, usize)> = Vec::new();
        let mut triangles = Vec::new();
        for k in 0..r {
            for j in 0..r {
                for i in 0..r {
                    let ids: [usize; 8] =
                        std::array::from_fn(|c| self.corner_index(i + (c & 1), j + ((c >> 1) & 1), k + (c >> 2)));
                    let inside = ids.map(|id| self.values[id] >= level);
                    if inside.iter().all(|&b| b) || inside.iter().all(|&b| !b) {
                        continue;
                    }
                    for tet in KUHN {
                        let corners = tet.map(|c| ids[c]);
                        let flags = tet.map(|c| inside[c]);
                        polygonize(&corners, &flags, |a, b| self.position_mid(a, b), &mut |a, b| {
                            let key = if a < b { (a, b) } else { (b, a) };
                            *edges.entry(key).or_insert_with(|| {
                                crossings.push(key);
                                crossings.len() - 1
                            })
                        }, &mut triangles);
                    }
                }
            }
        }
        let vertices = crossings
            .par_iter()
            .map(|&(a, b)| self.solve_edge(charges, a, b, level))
            .collect::<Result<Vec<_>, _>>()?;
        let cell_size = (self.bbox.hi - self.bbox.lo).max_abs() / T::from_usize_lossy(r);
        Ok(TriMesh { vertices, triangles, level, cell_size })
    }

    fn position_mid(&self, a: usize, b: usize) -> Vec3<T> {
        (self.position(a) + self.position(b)).scale(T::lit(0.5))
    }

    fn solve_edge(&self, charges: &ChargeDiscretization<T>, a: usize, b: usize, level: T) -> Result<Vec3<T>, FieldError> {
        let (pa, pb) = (self.position(a), self.position(b));
        let (mut lo, mut hi) = (T::zero(), T::one());
        let (mut flo, mut fhi) = (self.values[a] - level, self.values[b] - level);
        let at = |t: T| pa + (pb - pa).scale(t);
        let mut t = lo + (hi - lo) * flo / (flo - fhi);
        for _ in 0..EDGE_SOLVE_STEPS {
            let f = potential_nudged(charges, at(t), self.nudge)? - level;
            if f.abs() <= T::lit(EDGE_SOLVE_TOLERANCE) * level {
                break;
            }
            if (f >= T::zero()) == (flo >= T::zero()) {
                lo = t;
                flo = f;
                fhi = fhi * T::lit(0.5);
            } else {
                hi = t;
                fhi = f;
                flo = flo * T::lit(0.5);
            }
            t = lo + (hi - lo) * flo / (flo - fhi);
        }
        Ok(at(t))
    }
}

/// Six tetrahedra of the cube along the 0–7 diagonal (one per axis order).
const KUHN: [[usize; 4]; 6] =
    [[0, 1, 3, 7], [0, 1, 5, 7], [0, 2, 3, 7], [0, 2, 6, 7], [0, 4, 5, 7], [0, 4, 6, 7]];

/// Emits the level-set triangles of one tetrahedron, oriented toward the
/// outside corners (decreasing φ). Orientation is decided on edge midpoints,
/// which never degenerate.
fn polygonize<T: Real>(
    corners: &[usize; 4],
    inside: &[bool; 4],
    mid: impl Fn(usize, usize) -> Vec3<T>,
    vertex: &mut impl FnMut(usize, usize) -> usize,
    out: &mut Vec<[usize; 3]>,
) {
    let ins: Vec<usize> = (0..4).filter(|&c| inside[c]).map(|c| corners[c]).collect();
    let outs: Vec<usize> = (0..4).filter(|&c| !inside[c]).map(|c| corners[c]).collect();
    let ring: Vec<(usize, usize)> = match (ins.len(), outs.len()) {
        (1, 3) => outs.iter().map(|&o| (ins[0], o)).collect(),
        (3, 1) => ins.iter().map(|&i| (i, outs[0])).collect(),
        (2, 2) => vec![(ins[0], outs[0]), (ins[0], outs[1]), (ins[1], outs[1]), (ins[1], outs[0])],
        _ => return,
    };
    let centroid = |s: &[usize]| {
        let sum = s.iter().fold(Vec3::zero(), |acc, &c| acc + mid(c, c));
        sum.scale(T::one() / T::from_usize_lossy(s.len()))
    };
    let outward = centroid(&outs) - centroid(&ins);
    let pos: Vec<Vec3<T>> = ring.iter().map(|&(a, b)| mid(a, b)).collect();
    let flip = (pos[1] - pos[0]).cross(pos[2] - pos[0]).dot(outward) < T::zero();
    let ids: Vec<usize> = ring.iter().map(|&(a, b)| vertex(a, b)).collect();
    let mut emit = |a: usize, b: usize, c: usize| out.push(if flip { [ids[a], ids[c], ids[b]] } else { [ids[a], ids[b], ids[c]] });
    emit(0, 1, 2);
    if ids.len() == 4 {
        emit(0, 2, 3);
    }
}

/// Samples φ in a box that encloses the level and extracts the mesh.
/// The box starts at `config.bounding_box` (or the inflated charge bounds)
/// and grows until every sampled boundary value is below `level`.
pub fn extract_isosurface<T: Real>(
    charges: &ChargeDiscretization<T>,
    level: T,
    config: &IsosurfaceConfig<T>,
    critical: Option<&[CriticalPoint<T>]>,
) -> Result<TriMesh<T>, IsosurfaceError> {
    if !(level > T::zero() && level.is_finite()) {
        return Err(IsosurfaceError::InvalidLevel(level.to_f64_lossy()));
    }
    if let Some(c) = critical {
        check_regular(level, c)?;
    }
    let start = config.bounding_box.unwrap_or_else(|| initial_box(charges, config.inflation));
    let mut bbox = enclosing_box(charges, start, level)?;
    for _ in 0..MAX_BOX_GROWTH {
        let grid = ScalarGrid::sample(charges, bbox, config.grid_resolution)?;
        if grid.boundary_max() < level {
            return grid.extract(charges, level);
        }
        bbox = grow(&bbox);
    }
    Err(IsosurfaceError::Unbounded { level: level.to_f64_lossy(), steps: MAX_BOX_GROWTH })
}

/// Smallest distance from the wire to the level set, probed along four
/// normal directions at `probes` points of the curve. Tubes thinner than a
/// grid cell come out of the lattice as a string of beads, which no
/// manifold check can notice. Returns `None` when the level set does not
/// surround the wire at any probe.
pub fn min_tube_radius<T: Real>(
    charges: &ChargeDiscretization<T>,
    level: T,
    probes: usize,
) -> Result<Option<T>, FieldError> {
    let n = charges.len();
    if n < 3 || probes == 0 {
        return Ok(None);
    }
    let r0 = charges.max_spacing();
    let reach = charges.bounding_radius().max(T::one()) * T::lit(4.0);
    let step = (n / probes).max(1);
    let starts: Vec<usize> = (0..n).step_by(step).collect();
    let radii = starts
        .par_iter()
        .map(|&j| {
            let p = charges.points[j];
            let t = charges.points[(j + 1) % n] - charges.points[(j + n - 1) % n];
            let t = t.scale(T::one() / t.norm());
            let axis = [Vec3::new(T::one(), T::zero(), T::zero()), Vec3::new(T::zero(), T::one(), T::zero()), Vec3::new(T::zero(), T::zero(), T::one())]
                .into_iter()
                .min_by(|a, b| a.dot(t).abs().partial_cmp(&b.dot(t).abs()).unwrap_or(std::cmp::Ordering::Equal))
                .expect("three axes");
            let u = t.cross(axis);
            let u = u.scale(T::one() / u.norm());
            let w = t.cross(u);
            let mut best: Option<T> = None;
            for d in [u, -u, w, -w] {
                let f = |r: T| potential(charges, p + d.scale(r)).map(|phi| phi - level);
                if f(r0)? < T::zero() {
                    best = Some(best.map_or(r0, |b: T| b.min(r0)));
                    continue;
                }
                let (mut lo, mut hi) = (r0, r0 * T::lit(2.0));
                while f(hi)? >= T::zero() {
                    lo = hi;
                    hi = hi * T::lit(2.0);
                    if hi > reach {
                        break;
                    }
                }
                if hi > reach {
                    continue;
                }
                for _ in 0..40 {
                    let mid = (lo + hi) * T::lit(0.5);
                    if f(mid)? >= T::zero() {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                }
                best = Some(best.map_or(hi, |b: T| b.min(hi)));
            }
            Ok(best)
        })
        .collect::<Result<Vec<Option<T>>, FieldError>>()?;
    Ok(radii.into_iter().flatten().reduce(T::min))
}

const TUBE_PROBES: usize = 256;

/// [`extract_isosurface`] followed by [`topology`]. When `retry_on_defect`
/// is set the grid is doubled once if the mesh is defective or the thinnest
/// tube around the wire is narrower than a grid cell.
pub fn extract_with_topology<T: Real>(
    charges: &ChargeDiscretization<T>,
    level: T,
    config: &IsosurfaceConfig<T>,
    critical: Option<&[CriticalPoint<T>]>,
) -> Result<(TriMesh<T>, TopologyReport), IsosurfaceError> {
    let mesh = extract_isosurface(charges, level, config, critical)?;
    let report = topology(&mesh);
    if !config.retry_on_defect {
        return report.map(|r| (mesh, r));
    }
    let thin = || -> Result<bool, FieldError> {
        Ok(min_tube_radius(charges, level, TUBE_PROBES)?.is_some_and(|r| r < mesh.cell_size))
    };
    let retry = match &report {
        Err(IsosurfaceError::MeshDefect { .. }) => true,
        Err(_) => false,
        Ok(_) => thin()?,
    };
    if !retry {
        return report.map(|r| (mesh, r));
    }
    let finer = IsosurfaceConfig { grid_resolution: 2 * config.grid_resolution, retry_on_defect: false, ..*config };
    let mesh = extract_isosurface(charges, level, &finer, critical)?;
    let report = topology(&mesh)?;
    Ok((mesh, report))
}

struct UnionFind(Vec<usize>);

impl UnionFind {
    fn new(n: usize) -> Self {
        Self((0..n).collect())
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.0[x] != x {
            self.0[x] = self.0[self.0[x]];
            x = self.0[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.0[ra.max(rb)] = ra.min(rb);
        }
    }
}

/// Component label of every triangle, numbered in order of first triangle.
pub fn component_labels<T>(mesh: &TriMesh<T>) -> Vec<usize> {
    let mut uf = UnionFind::new(mesh.vertices.len());
    for t in &mesh.triangles {
        uf.union(t[0], t[1]);
        uf.union(t[1], t[2]);
    }
    let mut label = HashMap::new();
    mesh.triangles
        .iter()
        .map(|t| {
            let root = uf.find(t[0]);
            let n = label.len();
            *label.entry(root).or_insert(n)
        })
        .collect()
}

/// Components, Euler characteristics and genera of a closed oriented mesh.
pub fn topology<T>(mesh: &TriMesh<T>) -> Result<TopologyReport, IsosurfaceError> {
    let mut directed: HashMap<(usize, usize), usize> = HashMap::new();
    for t in &mesh.triangles {
        for e in 0..3 {
            *directed.entry((t[e], t[(e + 1) % 3])).or_default() += 1;
        }
    }
    let mut bad: Vec<(usize, usize)> = Vec::new();
    let mut misoriented: Vec<(usize, usize)> = Vec::new();
    for (&(a, b), &n) in &directed {
        if a > b && directed.contains_key(&(b, a)) {
            continue;
        }
        let back = directed.get(&(b, a)).copied().unwrap_or(0);
        if n + back != 2 {
            bad.push((a.min(b), a.max(b)));
        } else if n != 1 {
            misoriented.push((a.min(b), a.max(b)));
        }
    }
    if !bad.is_empty() {
        bad.sort_unstable();
        return Err(IsosurfaceError::MeshDefect { reason: "edge not shared by exactly two triangles".into(), edges: bad });
    }
    if !misoriented.is_empty() {
        misoriented.sort_unstable();
        return Err(IsosurfaceError::MeshDefect { reason: "inconsistent orientation".into(), edges: misoriented });
    }

    let labels = component_labels(mesh);
    let count = labels.iter().map(|&l| l + 1).max().unwrap_or(0);
    let mut faces = vec![0usize; count];
    let mut verts: Vec<Vec<usize>> = vec![Vec::new(); count];
    for (t, &l) in mesh.triangles.iter().zip(&labels) {
        faces[l] += 1;
        verts[l].extend_from_slice(t);
    }
    let mut components = Vec::with_capacity(count);
    for c in 0..count {
        verts[c].sort_unstable();
        verts[c].dedup();
        let (v, f) = (verts[c].len(), faces[c]);
        let e = 3 * f / 2;
        let chi = v as i64 - e as i64 + f as i64;
        if chi % 2 != 0 || chi > 2 {
            return Err(IsosurfaceError::MeshDefect {
                reason: format!("component {c} has Euler characteristic {chi}"),
                edges: Vec::new(),
            });
        }
        components.push(ComponentTopology { vertices: v, edges: e, faces: f, euler_characteristic: chi, genus: (2 - chi) / 2 });
    }
    let total_genus = components.iter().map(|c| c.genus).sum();
    Ok(TopologyReport { component_count: count, components, total_genus })
}

/// Merges vertices closer than `tolerance` and drops triangles that collapse.
pub fn weld<T: Real>(mesh: &TriMesh<T>, tolerance: T) -> TriMesh<T> {
    let key = |p: Vec3<T>| {
        let q = |x: T| (x / tolerance).floor().to_i64().unwrap_or(i64::MAX);
        (q(p.x), q(p.y), q(p.z))
    };
    let mut buckets: HashMap<(i64, i64, i64), Vec<usize>> = HashMap::new();
    let mut vertices: Vec<Vec3<T>> = Vec::new();
    let mut remap = Vec::with_capacity(mesh.vertices.len());
    for &p in &mesh.vertices {
        let (x, y, z) = key(p);
        let mut found = None;
        'search: for dx in -1..=1 {
            for dy in -1..=1 {
                for dz in -1..=1 {
                    if let Some(ids) = buckets.get(&(x + dx, y + dy, z + dz)) {
                        if let Some(&id) = ids.iter().find(|&&id| (vertices[id] - p).norm() <= tolerance) {
                            found = Some(id);
                            break 'search;
                        }
                    }
                }
            }
        }
        let id = found.unwrap_or_else(|| {
            vertices.push(p);
            buckets.entry((x, y, z)).or_default().push(vertices.len() - 1);
            vertices.len() - 1
        });
        remap.push(id);
    }
    let triangles = mesh
        .triangles
        .iter()
        .map(|t| t.map(|v| remap[v]))
        .filter(|t| t[0] != t[1] && t[1] != t[2] && t[0] != t[2])
        .collect();
    TriMesh { vertices, triangles, level: mesh.level, cell_size: mesh.cell_size }
}

/// One regular level between consecutive critical values.
#[derive(Debug, Clone, Serialize)]
#[serde(bound(serialize = "T: Real + Serialize"))]
pub struct GalleryEntry<T> {
    pub level: T,
    #[serde(skip)]
    pub mesh: TriMesh<T>,
    pub topology: TopologyReport,
}

/// Regular levels for a critical set, highest first: `1.05×` the largest
/// critical value, midpoints between consecutive distinct values, and
/// `0.95×` the smallest.
pub fn gallery_levels<T: Real>(critical: &[CriticalPoint<T>]) -> Vec<T> {
    let mut values: Vec<T> = morse_code(critical).iter().map(|e| e.value).collect();
    values.dedup_by(|a, b| (*a - *b).abs() <= T::lit(crate::critical::MORSE_CODE_TOLERANCE) * b.abs());
    let Some(&max) = values.last() else { return Vec::new() };
    let mut levels = vec![max * T::lit(1.05)];
    levels.extend(values.windows(2).rev().map(|w| (w[0] + w[1]) * T::lit(0.5)));
    levels.push(values[0] * T::lit(0.95));
    levels
}

/// Extracts and reports the surface at every [`gallery_levels`] level.
pub fn morse_transition_gallery<T: Real>(
    charges: &ChargeDiscretization<T>,
    critical: &[CriticalPoint<T>],
    config: &IsosurfaceConfig<T>,
) -> Result<Vec<GalleryEntry<T>>, IsosurfaceError> {
    if critical.is_empty() {
        return Err(IsosurfaceError::EmptyCriticalSet);
    }
    gallery_levels(critical)
        .into_iter()
        .map(|level| {
            let (mesh, topology) = extract_with_topology(charges, level, config, Some(critical))?;
            Ok(GalleryEntry { level, mesh, topology })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn octahedron() -> TriMesh<f64> {
        let v = [[1.0, 0.0, 0.0], [-1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, -1.0, 0.0], [0.0, 0.0, 1.0], [0.0, 0.0, -1.0]];
        let t = vec![[0, 2, 4], [2, 1, 4], [1, 3, 4], [3, 0, 4], [2, 0, 5], [1, 2, 5], [3, 1, 5], [0, 3, 5]];
        TriMesh::new(v.iter().map(|&p| Vec3::from(p)).collect(), t, 1.0)
    }

    fn torus(n: usize, m: usize) -> TriMesh<f64> {
        let mut v = Vec::new();
        for i in 0..n {
            for j in 0..m {
                let (u, w) = (std::f64::consts::TAU * i as f64 / n as f64, std::f64::consts::TAU * j as f64 / m as f64);
                v.push(Vec3::new((2.0 + w.cos()) * u.cos(), (2.0 + w.cos()) * u.sin(), w.sin()));
            }
        }
        let id = |i: usize, j: usize| (i % n) * m + j % m;
        let mut t = Vec::new();
        for i in 0..n {
            for j in 0..m {
                t.push([id(i, j), id(i + 1, j), id(i + 1, j + 1)]);
                t.push([id(i, j), id(i + 1, j + 1), id(i, j + 1)]);
            }
        }
        TriMesh::new(v, t, 1.0)
    }

    #[test]
    fn octahedron_is_a_sphere() {
        let r = topology(&octahedron()).unwrap();
        assert_eq!(r.component_count, 1);
        assert_eq!(r.components[0].euler_characteristic, 2);
        assert_eq!(r.total_genus, 0);
    }

    #[test]
    fn torus_has_genus_one() {
        let r = topology(&torus(12, 8)).unwrap();
        assert_eq!(r.components[0].euler_characteristic, 0);
        assert_eq!(r.total_genus, 1);
    }

    #[test]
    fn open_mesh_is_a_defect() {
        let mut m = octahedron();
        m.triangles.pop();
        assert!(matches!(topology(&m), Err(IsosurfaceError::MeshDefect { .. })));
    }

    #[test]
    fn flipped_face_is_a_defect() {
        let mut m = octahedron();
        m.triangles[0].swap(1, 2);
        assert!(matches!(topology(&m), Err(IsosurfaceError::MeshDefect { .. })));
    }

    #[test]
    fn weld_merges_duplicates() {
        let m = octahedron();
        let mut split = m.clone();
        split.vertices.push(m.vertices[0] + Vec3::splat(1e-12));
        split.triangles[0][0] = 6;
        assert!(topology(&split).is_err());
        let w = weld(&split, 1e-9);
        assert_eq!(w.vertices.len(), 6);
        assert_eq!(topology(&w).unwrap().total_genus, 0);
    }

    #[test]
    fn obj_lists_components() {
        let mut m = octahedron();
        let shift = m.vertices.len();
        m.vertices.extend(octahedron().vertices.iter().map(|&p| p + Vec3::new(5.0, 0.0, 0.0)));
        m.triangles.extend(octahedron().triangles.iter().map(|t| t.map(|v| v + shift)));
        let mut buf = Vec::new();
        m.write_obj(&mut buf).unwrap();
        let s = String::from_utf8(buf).unwrap();
        assert_eq!(s.matches("o component_").count(), 2);
        assert_eq!(s.lines().filter(|l| l.starts_with("v ")).count(), 12);
        assert!(s.lines().any(|l| l == "f 7 8 9"));
    }

    #[test]
    fn point_charge_sphere() {
        let c = ChargeDiscretization::from_charges(vec![Vec3::zero()], vec![std::f64::consts::TAU]);
        let cfg = IsosurfaceConfig { bounding_box: Some(SearchBox { lo: Vec3::splat(-1.5), hi: Vec3::splat(1.5) }), ..IsosurfaceConfig::with_grid(24) };
        let (mesh, r) = extract_with_topology(&c, std::f64::consts::TAU, &cfg, None).unwrap();
        assert_eq!((r.component_count, r.total_genus), (1, 0));
        for p in &mesh.vertices {
            assert!((p.norm() - 1.0).abs() < 1e-6, "{}", p.norm());
        }
        // outward normals point away from the charge
        let volume: f64 = mesh
            .triangles
            .iter()
            .map(|t| mesh.vertices[t[0]].dot(mesh.vertices[t[1]].cross(mesh.vertices[t[2]])) / 6.0)
            .sum();
        assert!((volume - 4.0 / 3.0 * std::f64::consts::PI).abs() < 0.05, "{volume}");
    }

    #[test]
    fn regular_value_check() {
        use crate::critical::MorseIndex;
        let p = CriticalPoint {
            position: Vec3::zero(),
            critical_value: 10.0,
            morse_index: MorseIndex::Index(1),
            hessian_eigenvalues: [0.0; 3],
            residual: 0.0,
        };
        assert!(matches!(check_regular(10.0005, &[p]), Err(IsosurfaceError::NonRegularValue { .. })));
        assert!(check_regular(10.01, &[p]).is_ok());
        assert_eq!(gallery_levels(&[p]), vec![10.5, 9.5]);
    }
}
