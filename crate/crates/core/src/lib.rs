//! Electrostatics of uniformly charged loops and knots.
//!
//! A closed curve carrying unit line charge is replaced by point charges
//! (trapezoidal weights for smooth parametrizations, midpoint weights for
//! piecewise shapes). On that discrete model the crate finds the zeros of
//! the electric field and their Morse indices, extracts equipotential
//! surfaces with their genus, locates the pitchfork thresholds of planar
//! rectangles and stadiums, and runs flattening sweeps over knots.
//!
//! Everything is generic over [`Real`] (`f32` or `f64`); the aliases at the
//! crate root fix `f64`.

pub mod critical;
pub mod curve;
pub mod field;
pub mod isosurface;
pub mod linalg;
pub mod planar;
pub mod quadrature;
pub mod scalar;
pub mod sweep;

pub use critical::{
    find_critical_set, index_histogram, morse_code, CriticalError, MorseIndex, Seeder,
};
pub use curve::{discretize, make_curve, make_named_curve, knot_info, CurveError, CurveKind, KnotInfo};
pub use field::{evaluate, field, hessian, potential, FieldError};
pub use isosurface::{
    extract_isosurface, extract_with_topology, morse_transition_gallery, topology, IsosurfaceError,
    TopologyReport,
};
pub use planar::{
    bifurcation_threshold, d2phi_origin, ellipse_d2phi_origin, planar_critical_points, PlanarError, PlanarShape,
};
pub use scalar::Real;
pub use sweep::{conjecture_table, flatten_sweep, Schedule, SweepError};

pub type Vec3 = linalg::Vec3<f64>;
pub type Sym3 = linalg::Sym3<f64>;
pub type CurveParams = curve::CurveParams<f64>;
pub type ParamCurve = curve::ParamCurve<f64>;
pub type ChargeDiscretization = curve::ChargeDiscretization<f64>;
pub type FieldEval = field::FieldEval<f64>;
pub type SeedingConfig = critical::SeedingConfig<f64>;
pub type CriticalPoint = critical::CriticalPoint<f64>;
pub type CriticalSet = critical::CriticalSet<f64>;
pub type MorseCodeEntry = critical::MorseCodeEntry<f64>;
pub type TriMesh = isosurface::TriMesh<f64>;
pub type IsosurfaceConfig = isosurface::IsosurfaceConfig<f64>;
pub type GalleryEntry = isosurface::GalleryEntry<f64>;
pub type AxisCriticalPoint = planar::AxisCriticalPoint<f64>;
pub type BifurcationResult = planar::BifurcationResult<f64>;
pub type SweepConfig = sweep::SweepConfig<f64>;
pub type SweepRecord = sweep::SweepRecord<f64>;
pub type SweepResult = sweep::SweepResult<f64>;
pub type TableRow = sweep::TableRow<f64>;
