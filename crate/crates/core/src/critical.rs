//! Zeros of the field of a discretized loop: grid seeding, Newton refinement,
//! deduplication and Morse classification.

use std::cmp::Ordering;
use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize, Serializer};
use thiserror::Error;

use crate::curve::ChargeDiscretization;
use crate::field::{evaluate, field, FieldError};
use crate::linalg::Vec3;
use crate::scalar::Real;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CriticalError {
    #[error("invalid seeding config: {0}")]
    InvalidConfig(String),
    #[error("no critical points found (seeds: {seeds}); enlarge the box or refine the grid")]
    EmptyCriticalSet { seeds: usize },
    #[error(transparent)]
    Field(#[from] FieldError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Seeder {
    /// Cells whose corners bracket zero in all three field components.
    #[serde(rename = "mc")]
    MarchingCubes,
    /// Every grid corner.
    Dense,
}

impl std::str::FromStr for Seeder {
    type Err = CriticalError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "mc" | "marching-cubes" => Ok(Seeder::MarchingCubes),
            "dense" => Ok(Seeder::Dense),
            _ => Err(CriticalError::InvalidConfig(format!("unknown seeder `{s}` (expected mc or dense)"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound(serialize = "T: Real + Serialize", deserialize = "T: Real + Deserialize<'de>"))]
pub struct SeedingConfig<T> {
    /// Cells per axis.
    pub grid_resolution: usize,
    /// Box half-extent = charge bounding-box half-extent × inflation.
    pub inflation: T,
    /// Separate inflation for z; defaults to `inflation`.
    pub z_inflation: Option<T>,
    pub newton_max_iter: usize,
    /// Divergence radius in box diagonals.
    pub divergence_factor: T,
    /// Dedup distance in box diagonals.
    pub dedup_factor: T,
    /// Newton acceptance: `|E| <` this × max grid `|E|`.
    pub tolerance_factor: T,
    pub seeder: Seeder,
    /// Octree levels by which bracketing cells are subdivided before
    /// seeding; 0 seeds the cell centers directly.
    #[serde(default)]
    pub refine_depth: usize,
}

impl<T: Real> Default for SeedingConfig<T> {
    fn default() -> Self {
        Self {
            grid_resolution: 30,
            inflation: T::lit(1.5),
            z_inflation: None,
            newton_max_iter: 50,
            divergence_factor: T::lit(10.0),
            dedup_factor: T::lit(1e-6),
            tolerance_factor: T::lit(1e-9),
            seeder: Seeder::MarchingCubes,
            refine_depth: 0,
        }
    }
}

impl<T: Real> SeedingConfig<T> {
    pub fn with_grid(grid_resolution: usize) -> Self {
        Self { grid_resolution, ..Self::default() }
    }

    pub fn validate(&self) -> Result<(), CriticalError> {
        let bad = |m: String| Err(CriticalError::InvalidConfig(m));
        if self.grid_resolution < 8 {
            return bad(format!("grid_resolution {} < 8", self.grid_resolution));
        }
        let min_inflation = T::lit(1.2);
        if !(self.inflation >= min_inflation) || self.z_inflation.is_some_and(|z| !(z >= min_inflation)) {
            return bad("inflation must be >= 1.2".into());
        }
        if self.newton_max_iter == 0 {
            return bad("newton_max_iter must be positive".into());
        }
        if !(self.divergence_factor > T::zero() && self.dedup_factor > T::zero() && self.tolerance_factor > T::zero()) {
            return bad("divergence, dedup and tolerance factors must be positive".into());
        }
        Ok(())
    }
}

/// Minimum z half-extent of the search box, as a fraction of the larger
/// in-plane half-extent. Keeps the box from collapsing for planar and
/// nearly planar curves.
const Z_FLOOR: f64 = 0.1;
/// Zeros closer to a charge than `max(NEAR_CURVE, spacing)` are rejected.
/// Between two neighbouring point charges the discrete field always has a
/// spurious zero about half a spacing off the wire.
const NEAR_CURVE: f64 = 1e-3;
const MAX_CONDITION: f64 = 1e12;
const DEGENERATE_EIGENVALUE: f64 = 1e-6;
const POLISH_STEPS: usize = 3;
/// Accepted points must also have a Newton step below this × box diagonal.
/// Max grid `|E|` is dominated by corners near the wire, so the residual
/// test alone lets the weak far field through.
const STEP_TOLERANCE: f64 = 1e-9;

/// Axis-aligned search box around the charges.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(bound(serialize = "T: Real + Serialize"))]
pub struct SearchBox<T> {
    pub lo: Vec3<T>,
    pub hi: Vec3<T>,
}

impl<T: Real> SearchBox<T> {
    pub fn around(charges: &ChargeDiscretization<T>, config: &SeedingConfig<T>) -> Self {
        let (lo, hi) = charges.bounds();
        let center = (lo + hi).scale(T::lit(0.5));
        let half = (hi - lo).scale(T::lit(0.5));
        let z_half = half.z.max(T::lit(Z_FLOOR) * half.x.max(half.y));
        let zi = config.z_inflation.unwrap_or(config.inflation);
        let half = Vec3::new(half.x * config.inflation, half.y * config.inflation, z_half * zi);
        Self { lo: center - half, hi: center + half }
    }

    pub fn center(&self) -> Vec3<T> {
        (self.lo + self.hi).scale(T::lit(0.5))
    }

    pub fn diagonal(&self) -> T {
        (self.hi - self.lo).norm()
    }

    /// Grid corner `(i, j, k)` of an `r`-cell-per-axis lattice.
    pub fn corner(&self, r: usize, i: usize, j: usize, k: usize) -> Vec3<T> {
        let rf = T::from_usize_lossy(r);
        let f = |lo: T, hi: T, n: usize| lo + (hi - lo) * T::from_usize_lossy(n) / rf;
        Vec3::new(f(self.lo.x, self.hi.x, i), f(self.lo.y, self.hi.y, j), f(self.lo.z, self.hi.z, k))
    }

    pub fn cell_diagonal(&self, r: usize) -> T {
        self.diagonal() / T::from_usize_lossy(r)
    }
}

/// Field sampled on the corners of the seeding lattice.
#[derive(Debug, Clone)]
pub struct FieldGrid<T> {
    pub bbox: SearchBox<T>,
    pub resolution: usize,
    /// Sample points, x fastest. Corners on a charge are nudged.
    pub points: Vec<Vec3<T>>,
    pub field: Vec<Vec3<T>>,
    /// max `|E|` over the grid; the scale for Newton acceptance.
    pub field_scale: T,
}

impl<T: Real> FieldGrid<T> {
    pub fn sample(charges: &ChargeDiscretization<T>, config: &SeedingConfig<T>) -> Result<Self, CriticalError> {
        config.validate()?;
        let bbox = SearchBox::around(charges, config);
        let r = config.grid_resolution;
        let m = r + 1;
        let nudge = Vec3::splat(bbox.cell_diagonal(r) * T::lit(0.5e-3) / T::lit(3.0).sqrt());
        let points: Vec<Vec3<T>> = (0..m * m * m)
            .map(|idx| bbox.corner(r, idx % m, (idx / m) % m, idx / (m * m)))
            .collect();
        let sampled: Vec<(Vec3<T>, Vec3<T>)> = points
            .par_iter()
            .map(|&p| match field(charges, p) {
                Ok(e) => Ok((p, e)),
                Err(FieldError::Singular { .. }) => {
                    let q = p + nudge;
                    field(charges, q).map(|e| (q, e))
                }
                Err(e) => Err(e),
            })
            .collect::<Result<_, _>>()?;
        let (points, field): (Vec<_>, Vec<_>) = sampled.into_iter().unzip();
        let field_scale = field.iter().map(|e| e.norm()).fold(T::zero(), T::max);
        Ok(Self { bbox, resolution: r, points, field, field_scale })
    }

    fn index(&self, i: usize, j: usize, k: usize) -> usize {
        let m = self.resolution + 1;
        i + m * (j + m * k)
    }

    /// Cells whose eight corner values bracket zero in every component.
    pub fn bracketing_cells(&self) -> Vec<Cell<T>> {
        let r = self.resolution;
        let mut cells = Vec::new();
        for k in 0..r {
            for j in 0..r {
                for i in 0..r {
                    let field = std::array::from_fn(|c| self.field[self.index(i + (c & 1), j + ((c >> 1) & 1), k + (c >> 2))]);
                    if brackets(&field) {
                        let lo = self.bbox.corner(r, i, j, k);
                        let hi = self.bbox.corner(r, i + 1, j + 1, k + 1);
                        cells.push(Cell { lo, hi, field });
                    }
                }
            }
        }
        cells
    }

    /// Centers of the bracketing cells.
    pub fn marching_cubes_seeds(&self) -> Vec<Vec3<T>> {
        self.bracketing_cells().iter().map(Cell::center).collect()
    }

    pub fn dense_seeds(&self) -> Vec<Vec3<T>> {
        self.points.clone()
    }
}

/// Grid cell with the field at its corners (corner `c` at offset
/// `(c & 1, c >> 1 & 1, c >> 2)`).
#[derive(Debug, Clone, Copy)]
pub struct Cell<T> {
    pub lo: Vec3<T>,
    pub hi: Vec3<T>,
    pub field: [Vec3<T>; 8],
}

impl<T: Real> Cell<T> {
    pub fn center(&self) -> Vec3<T> {
        (self.lo + self.hi).scale(T::lit(0.5))
    }
}

fn brackets<T: Real>(field: &[Vec3<T>; 8]) -> bool {
    let mut lo = Vec3::splat(T::infinity());
    let mut hi = Vec3::splat(T::neg_infinity());
    for &e in field {
        lo = lo.component_min(e);
        hi = hi.component_max(e);
    }
    let z = T::zero();
    lo.x <= z && hi.x >= z && lo.y <= z && hi.y >= z && lo.z <= z && hi.z >= z
}

/// Field at `p`, nudged off a charge if it lands on one.
fn field_nudged<T: Real>(charges: &ChargeDiscretization<T>, p: Vec3<T>, nudge: T) -> Result<Vec3<T>, FieldError> {
    match field(charges, p) {
        Err(FieldError::Singular { .. }) => field(charges, p + Vec3::splat(nudge)),
        r => r,
    }
}

/// Subdivides a cell into octants `depth` times, keeping the octants that
/// still bracket zero, and returns the centers of the surviving leaves.
pub fn refine_cell<T: Real>(charges: &ChargeDiscretization<T>, cell: &Cell<T>, depth: usize) -> Result<Vec<Vec3<T>>, FieldError> {
    if depth == 0 {
        return Ok(vec![cell.center()]);
    }
    let half = T::lit(0.5);
    let at = |a: usize, b: usize, c: usize| {
        let t = |lo: T, hi: T, n: usize| lo + (hi - lo) * T::from_usize_lossy(n) * half;
        Vec3::new(t(cell.lo.x, cell.hi.x, a), t(cell.lo.y, cell.hi.y, b), t(cell.lo.z, cell.hi.z, c))
    };
    let nudge = (cell.hi - cell.lo).norm() * T::lit(1e-4);
    let mut lattice = [Vec3::zero(); 27];
    for idx in 0..27 {
        let (a, b, c) = (idx % 3, (idx / 3) % 3, idx / 9);
        lattice[idx] = if a != 1 && b != 1 && c != 1 {
            cell.field[a / 2 + 2 * (b / 2) + 4 * (c / 2)]
        } else {
            field_nudged(charges, at(a, b, c), nudge)?
        };
    }
    let mut out = Vec::new();
    for oct in 0..8 {
        let (oa, ob, oc) = (oct & 1, (oct >> 1) & 1, oct >> 2);
        let field = std::array::from_fn(|c| lattice[(oa + (c & 1)) + 3 * (ob + ((c >> 1) & 1)) + 9 * (oc + (c >> 2))]);
        if brackets(&field) {
            let sub = Cell { lo: at(oa, ob, oc), hi: at(oa + 1, ob + 1, oc + 1), field };
            out.extend(refine_cell(charges, &sub, depth - 1)?);
        }
    }
    Ok(out)
}

pub fn seed_marching_cubes<T: Real>(
    charges: &ChargeDiscretization<T>,
    config: &SeedingConfig<T>,
) -> Result<Vec<Vec3<T>>, CriticalError> {
    let grid = FieldGrid::sample(charges, config)?;
    marching_cubes_seeds_refined(charges, &grid, config.refine_depth)
}

fn marching_cubes_seeds_refined<T: Real>(
    charges: &ChargeDiscretization<T>,
    grid: &FieldGrid<T>,
    depth: usize,
) -> Result<Vec<Vec3<T>>, CriticalError> {
    if depth == 0 {
        return Ok(grid.marching_cubes_seeds());
    }
    let per_cell: Vec<Vec<Vec3<T>>> = grid
        .bracketing_cells()
        .par_iter()
        .map(|c| refine_cell(charges, c, depth))
        .collect::<Result<_, _>>()?;
    Ok(per_cell.into_iter().flatten().collect())
}

pub fn seed_dense_grid<T: Real>(
    charges: &ChargeDiscretization<T>,
    config: &SeedingConfig<T>,
) -> Result<Vec<Vec3<T>>, CriticalError> {
    Ok(FieldGrid::sample(charges, config)?.dense_seeds())
}

/// Number of negative Hessian eigenvalues, or degenerate when the smallest
/// eigenvalue is negligible against `‖H‖`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum MorseIndex {
    Index(u8),
    Degenerate,
}

impl MorseIndex {
    pub fn from_eigenvalues<T: Real>(ev: [T; 3], norm: T) -> Self {
        let tiny = T::lit(DEGENERATE_EIGENVALUE) * norm;
        if ev.iter().any(|e| e.abs() < tiny) {
            MorseIndex::Degenerate
        } else {
            MorseIndex::Index(ev.iter().filter(|e| **e < T::zero()).count() as u8)
        }
    }

    pub fn value(self) -> Option<u8> {
        match self {
            MorseIndex::Index(k) => Some(k),
            MorseIndex::Degenerate => None,
        }
    }

    pub fn is_degenerate(self) -> bool {
        self == MorseIndex::Degenerate
    }
}

impl fmt::Display for MorseIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MorseIndex::Index(k) => write!(f, "{k}"),
            MorseIndex::Degenerate => f.write_str("degenerate"),
        }
    }
}

impl Serialize for MorseIndex {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            MorseIndex::Index(k) => s.serialize_u8(*k),
            MorseIndex::Degenerate => s.serialize_str("degenerate"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(bound(serialize = "T: Real + Serialize"))]
pub struct CriticalPoint<T> {
    pub position: Vec3<T>,
    #[serde(rename = "value")]
    pub critical_value: T,
    #[serde(rename = "index")]
    pub morse_index: MorseIndex,
    #[serde(rename = "eigenvalues")]
    pub hessian_eigenvalues: [T; 3],
    pub residual: T,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Rejection {
    Diverged,
    MaxIter,
    SingularHessian,
    NearCurve,
}

impl fmt::Display for Rejection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

/// Geometry and tolerances Newton needs besides the seed.
#[derive(Debug, Clone, Copy)]
pub struct NewtonContext<T> {
    pub center: Vec3<T>,
    pub divergence_radius: T,
    pub max_step: T,
    pub tolerance: T,
    pub max_iter: usize,
    pub near_curve: T,
    pub step_tolerance: T,
}

impl<T: Real> NewtonContext<T> {
    pub fn new(charges: &ChargeDiscretization<T>, bbox: &SearchBox<T>, field_scale: T, config: &SeedingConfig<T>) -> Self {
        let diag = bbox.diagonal();
        Self {
            center: bbox.center(),
            divergence_radius: diag * config.divergence_factor,
            max_step: diag * T::lit(0.5),
            tolerance: field_scale * config.tolerance_factor,
            max_iter: config.newton_max_iter,
            near_curve: charges.max_spacing().max(T::lit(NEAR_CURVE)),
            step_tolerance: diag * T::lit(STEP_TOLERANCE),
        }
    }
}

fn classify<T: Real>(charges: &ChargeDiscretization<T>, x: Vec3<T>) -> Result<CriticalPoint<T>, Rejection> {
    let ev = evaluate(charges, x).map_err(|_| Rejection::NearCurve)?;
    let eig = ev.h.eigenvalues();
    Ok(CriticalPoint {
        position: x,
        critical_value: ev.phi,
        morse_index: MorseIndex::from_eigenvalues(eig, ev.h.norm()),
        hessian_eigenvalues: eig,
        residual: ev.e.norm(),
    })
}

/// Undamped Newton on `E = 0` (step `H⁻¹E`, length capped at half the box
/// diagonal). Once `|E|` drops below tolerance a few more steps polish the
/// point, keeping the smallest residual.
pub fn newton_refine<T: Real>(
    charges: &ChargeDiscretization<T>,
    seed: Vec3<T>,
    ctx: &NewtonContext<T>,
) -> Result<CriticalPoint<T>, Rejection> {
    let mut x = seed;
    for _ in 0..ctx.max_iter {
        if (x - ctx.center).norm() > ctx.divergence_radius || !x.is_finite() {
            return Err(Rejection::Diverged);
        }
        let ev = match evaluate(charges, x) {
            Ok(ev) => ev,
            Err(_) => return Err(Rejection::NearCurve),
        };
        if ev.h.condition() > T::lit(MAX_CONDITION) {
            return Err(Rejection::SingularHessian);
        }
        let mut step = ev.h.solve(ev.e).ok_or(Rejection::SingularHessian)?;
        let len = step.norm();
        if ev.e.norm() < ctx.tolerance && len < ctx.step_tolerance {
            return polish(charges, x, ev.e.norm(), ctx.near_curve);
        }
        if len > ctx.max_step {
            step = step.scale(ctx.max_step / len);
        }
        x += step;
    }
    Err(Rejection::MaxIter)
}

fn polish<T: Real>(charges: &ChargeDiscretization<T>, x0: Vec3<T>, r0: T, near_curve: T) -> Result<CriticalPoint<T>, Rejection> {
    let (mut best, mut best_r) = (x0, r0);
    let mut x = x0;
    for _ in 0..POLISH_STEPS {
        let Ok(ev) = evaluate(charges, x) else { break };
        let Some(step) = ev.h.solve(ev.e) else { break };
        x += step;
        match field(charges, x) {
            Ok(e) if e.norm() < best_r => {
                best = x;
                best_r = e.norm();
            }
            _ => break,
        }
    }
    if charges.nearest_distance(best) < near_curve {
        return Err(Rejection::NearCurve);
    }
    classify(charges, best)
}

/// Diagnostics from one run of [`find_critical_set`].
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct FinderStats {
    pub seeds: usize,
    pub converged: usize,
    pub diverged: usize,
    pub max_iter: usize,
    pub singular_hessian: usize,
    pub near_curve: usize,
}

#[derive(Debug, Clone, Serialize)]
#[serde(bound(serialize = "T: Real + Serialize"))]
pub struct CriticalSet<T> {
    pub points: Vec<CriticalPoint<T>>,
    pub bbox: SearchBox<T>,
    pub field_scale: T,
    pub stats: FinderStats,
}

/// Seeds, refines every seed in parallel, drops rejections, merges
/// duplicates (keeping the smallest residual) and sorts by critical value.
pub fn find_critical_set<T: Real>(
    charges: &ChargeDiscretization<T>,
    config: &SeedingConfig<T>,
) -> Result<CriticalSet<T>, CriticalError> {
    let grid = FieldGrid::sample(charges, config)?;
    let seeds = match config.seeder {
        Seeder::MarchingCubes => marching_cubes_seeds_refined(charges, &grid, config.refine_depth)?,
        Seeder::Dense => grid.dense_seeds(),
    };
    let ctx = NewtonContext::new(charges, &grid.bbox, grid.field_scale, config);
    let results: Vec<_> = seeds.par_iter().map(|&s| newton_refine(charges, s, &ctx)).collect();

    let mut stats = FinderStats { seeds: seeds.len(), ..Default::default() };
    let mut found = Vec::new();
    for r in results {
        match r {
            Ok(p) => {
                stats.converged += 1;
                found.push(p);
            }
            Err(Rejection::Diverged) => stats.diverged += 1,
            Err(Rejection::MaxIter) => stats.max_iter += 1,
            Err(Rejection::SingularHessian) => stats.singular_hessian += 1,
            Err(Rejection::NearCurve) => stats.near_curve += 1,
        }
    }
    let points = deduplicate(found, grid.bbox.diagonal() * config.dedup_factor);
    if points.is_empty() {
        return Err(CriticalError::EmptyCriticalSet { seeds: stats.seeds });
    }
    Ok(CriticalSet { points, bbox: grid.bbox, field_scale: grid.field_scale, stats })
}

fn lexicographic<T: Real>(a: Vec3<T>, b: Vec3<T>) -> Ordering {
    a.x.partial_cmp(&b.x)
        .unwrap_or(Ordering::Equal)
        .then(a.y.partial_cmp(&b.y).unwrap_or(Ordering::Equal))
        .then(a.z.partial_cmp(&b.z).unwrap_or(Ordering::Equal))
}

/// Greedy merge within `radius`, best residual first; the result is sorted
/// by critical value (ties by position).
pub fn deduplicate<T: Real>(mut found: Vec<CriticalPoint<T>>, radius: T) -> Vec<CriticalPoint<T>> {
    found.sort_by(|a, b| {
        a.residual
            .partial_cmp(&b.residual)
            .unwrap_or(Ordering::Equal)
            .then(lexicographic(a.position, b.position))
    });
    let mut kept: Vec<CriticalPoint<T>> = Vec::new();
    for p in found {
        if kept.iter().all(|q| (q.position - p.position).norm() > radius) {
            kept.push(p);
        }
    }
    kept.sort_by(|a, b| {
        a.critical_value
            .partial_cmp(&b.critical_value)
            .unwrap_or(Ordering::Equal)
            .then(lexicographic(a.position, b.position))
    });
    kept
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MorseCodeEntry<T> {
    pub value: T,
    pub index: MorseIndex,
    pub multiplicity: usize,
}

/// Relative tolerance for grouping critical values.
pub const MORSE_CODE_TOLERANCE: f64 = 1e-6;

/// Groups points with the same index and critical values equal to within a
/// relative `1e-6`, in ascending order of value. Each entry carries the mean
/// value of its group.
pub fn morse_code<T: Real>(points: &[CriticalPoint<T>]) -> Vec<MorseCodeEntry<T>> {
    let mut sorted: Vec<_> = points.to_vec();
    sorted.sort_by(|a, b| a.critical_value.partial_cmp(&b.critical_value).unwrap_or(Ordering::Equal));
    let tol = T::lit(MORSE_CODE_TOLERANCE);
    let mut groups: Vec<(T, T, MorseIndex, usize)> = Vec::new(); // (first, sum, index, count)
    for p in sorted {
        let v = p.critical_value;
        let joined = groups.iter_mut().rev().take_while(|g| (v - g.0).abs() <= tol * g.0.abs()).find(|g| g.2 == p.morse_index);
        match joined {
            Some(g) => {
                g.1 += v;
                g.3 += 1;
            }
            None => groups.push((v, v, p.morse_index, 1)),
        }
    }
    groups
        .into_iter()
        .map(|(_, sum, index, n)| MorseCodeEntry { value: sum / T::from_usize_lossy(n), index, multiplicity: n })
        .collect()
}

/// Index histogram `[index 0, 1, 2, 3, degenerate]`.
pub fn index_histogram<T>(points: &[CriticalPoint<T>]) -> [usize; 5] {
    let mut h = [0; 5];
    for p in points {
        match p.morse_index {
            MorseIndex::Index(k) => h[(k as usize).min(3)] += 1,
            MorseIndex::Degenerate => h[4] += 1,
        }
    }
    h
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curve::{discretize, make_curve, CurveKind, CurveParams};

    fn unknot(n: usize) -> ChargeDiscretization<f64> {
        discretize(&make_curve(CurveKind::Unknot, CurveParams::default()).unwrap(), n).unwrap()
    }

    #[test]
    fn config_validation() {
        assert!(SeedingConfig::<f64>::with_grid(7).validate().is_err());
        let c = SeedingConfig::<f64> { inflation: 1.1, ..Default::default() };
        assert!(c.validate().is_err());
        assert!(SeedingConfig::<f64>::default().validate().is_ok());
    }

    #[test]
    fn planar_box_has_thickness() {
        let b = SearchBox::around(&unknot(64), &SeedingConfig::default());
        assert!(b.hi.z - b.lo.z > 0.2);
        assert!((b.hi.x - b.lo.x - 3.0).abs() < 1e-2);
    }

    #[test]
    fn dense_seed_count() {
        let s = seed_dense_grid(&unknot(64), &SeedingConfig::with_grid(8)).unwrap();
        assert_eq!(s.len(), 9 * 9 * 9);
    }

    #[test]
    fn unknot_center_seed_and_zero() {
        let c = unknot(128);
        let cfg = SeedingConfig::with_grid(30);
        let seeds = seed_marching_cubes(&c, &cfg).unwrap();
        assert!(seeds.iter().any(|s| s.norm() < 0.1));
        let set = find_critical_set(&c, &cfg).unwrap();
        assert_eq!(set.points.len(), 1);
        let p = set.points[0];
        assert!(p.position.norm() < 1e-10);
        assert!((p.critical_value - std::f64::consts::TAU).abs() < 1e-10);
        assert_eq!(p.morse_index, MorseIndex::Index(1));
    }

    #[test]
    fn far_seed_diverges() {
        let c = unknot(64);
        let grid = FieldGrid::sample(&c, &SeedingConfig::with_grid(8)).unwrap();
        let ctx = NewtonContext::new(&c, &grid.bbox, grid.field_scale, &SeedingConfig::default());
        assert_eq!(newton_refine(&c, Vec3::new(100.0, 100.0, 100.0), &ctx), Err(Rejection::Diverged));
    }

    #[test]
    fn morse_code_groups_by_value_and_index() {
        let p = |v: f64, i| CriticalPoint {
            position: Vec3::zero(),
            critical_value: v,
            morse_index: MorseIndex::Index(i),
            hessian_eigenvalues: [0.0; 3],
            residual: 0.0,
        };
        let pts = [p(2.0, 1), p(1.0, 1), p(2.0 + 1e-9, 1), p(1.0, 2), p(3.0, 2)];
        let code = morse_code(&pts);
        assert_eq!(code.len(), 4);
        assert_eq!(code.iter().map(|e| e.multiplicity).sum::<usize>(), 5);
        assert_eq!(code[2].multiplicity, 2);
    }
}
