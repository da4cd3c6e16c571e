use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use knotfield::critical::Seeder;
use knotfield::curve::CurveKind;
use knotfield::planar::PlanarShape;
use knotfield::sweep::Schedule;
use serde::Serialize;

/// Electrostatics of charged loops and knots: potentials, field zeros,
/// Morse codes, equipotential surfaces and flattening sweeps.
#[derive(Debug, Parser, Serialize)]
#[command(name = "knotfield", version)]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args, Serialize)]
pub struct GlobalArgs {
    /// Cap on worker threads (default: all cores).
    #[arg(long, global = true, env = "KNOTFIELD_THREADS", value_parser = at_least::<1>)]
    pub threads: Option<usize>,
    /// Seed for randomly drawn evaluation points (`eval --random`); every
    /// other computation is deterministic and ignores it.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed_rng: u64,
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    /// Potential, field and Hessian at a point.
    Eval(EvalArgs),
    /// Axis profile and zeros of a planar rectangle, stadium or ellipse.
    Planar(PlanarArgs),
    /// Pitchfork threshold of the rectangle or stadium.
    Bifurcation(BifurcationArgs),
    /// All zeros of the field with their Morse indices.
    Critical(CriticalArgs),
    /// Critical values grouped by index and multiplicity.
    MorseCode(CriticalArgs),
    /// Equipotential surface as OBJ, with its topology.
    Isosurface(IsosurfaceArgs),
    /// One surface per regular regime between consecutive critical values.
    Gallery(GalleryArgs),
    /// Zero count of a knot while its height γ shrinks.
    Sweep(SweepArgs),
    /// Observed minimum zero counts of the catalog knots against the bounds.
    Table(TableArgs),
}

fn parse_point(s: &str) -> Result<[f64; 3], String> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    if parts.len() != 3 {
        return Err(format!("expected x,y,z but got `{s}`"));
    }
    let mut p = [0.0f64; 3];
    for (dst, src) in p.iter_mut().zip(parts) {
        *dst = src.parse().map_err(|_| format!("`{src}` is not a number"))?;
        if !dst.is_finite() {
            return Err(format!("`{src}` is not finite"));
        }
    }
    Ok(p)
}

fn at_least<const M: usize>(s: &str) -> Result<usize, String> {
    let v: usize = s.parse().map_err(|_| format!("`{s}` is not a non-negative integer"))?;
    if v < M {
        return Err(format!("must be at least {M}, got {v}"));
    }
    Ok(v)
}

fn parse_curve(s: &str) -> Result<CurveKind, String> {
    s.parse().map_err(|e: knotfield::CurveError| e.to_string())
}

fn parse_shape(s: &str) -> Result<PlanarShape, String> {
    s.parse().map_err(|e: knotfield::PlanarError| e.to_string())
}

fn parse_seeder(s: &str) -> Result<Seeder, String> {
    s.parse().map_err(|e: knotfield::CriticalError| e.to_string())
}

fn parse_schedule(s: &str) -> Result<Schedule, String> {
    s.parse().map_err(|e: knotfield::SweepError| e.to_string())
}

#[derive(Debug, Args, Serialize)]
pub struct CurveArgs {
    /// Catalog curve: unknot, trefoil, trefoil-tableI, figure-eight,
    /// cinquefoil, three-twist, rectangle, stadium, ellipse.
    #[arg(long, default_value = "unknot", value_parser = parse_curve)]
    pub curve: CurveKind,
    /// CSV of `t,x,y,z` rows sampled uniformly in t; replaces --curve.
    #[arg(long)]
    pub curve_file: Option<PathBuf>,
    /// Knot height γ.
    #[arg(long, default_value_t = 1.0)]
    pub gamma: f64,
    /// Aspect parameter of planar shapes.
    #[arg(long, default_value_t = 1.0)]
    pub aspect: f64,
    /// Discretization: N + 1 point charges.
    #[arg(long, default_value_t = 2048, value_parser = at_least::<3>)]
    pub n: usize,
}

#[derive(Debug, Args, Serialize)]
pub struct FinderArgs {
    /// Seeding lattice cells per axis.
    #[arg(long, default_value_t = 30, value_parser = at_least::<8>)]
    pub grid: usize,
    /// Seeder: mc (bracketing cells) or dense (every lattice corner).
    #[arg(long, default_value = "mc", value_parser = parse_seeder)]
    pub seeder: Seeder,
    /// Search box half-extent over the charge bounds.
    #[arg(long, default_value_t = 1.5)]
    pub inflation: f64,
    /// Separate inflation along z (default: --inflation).
    #[arg(long)]
    pub z_inflation: Option<f64>,
    /// Octree levels used to subdivide bracketing cells before seeding.
    #[arg(long, default_value_t = 0)]
    pub refine_depth: usize,
    /// Newton acceptance: |E| below this times the largest sampled |E|.
    #[arg(long, default_value_t = 1e-9)]
    pub tolerance: f64,
    /// Newton iteration cap per seed.
    #[arg(long, default_value_t = 50)]
    pub max_iter: usize,
}

#[derive(Debug, Args, Serialize)]
pub struct EvalArgs {
    #[command(flatten)]
    pub curve: CurveArgs,
    /// Evaluation point `x,y,z`.
    #[arg(long, value_parser = parse_point, required_unless_present = "random", conflicts_with = "random")]
    pub point: Option<[f64; 3]>,
    /// Evaluate at this many random points in the curve's bounding box
    /// (drawn with --seed-rng) instead of --point.
    #[arg(long)]
    pub random: Option<usize>,
}

#[derive(Debug, Args, Serialize)]
pub struct PlanarArgs {
    /// rectangle, stadium or ellipse.
    #[arg(long, value_parser = parse_shape)]
    pub shape: PlanarShape,
    /// Aspect: half-width a of the rectangle or ellipse (a ≥ 1), straight
    /// half-length of the stadium (a > 0).
    #[arg(long)]
    pub aspect: f64,
    /// Write the axis profile `x,phi` to this CSV.
    #[arg(long)]
    pub profile: Option<PathBuf>,
    /// Samples in the axis profile.
    #[arg(long, default_value_t = 201, value_parser = at_least::<2>)]
    pub samples: usize,
    /// Write the in-plane potential `x,y,phi` to this CSV.
    #[arg(long)]
    pub contour: Option<PathBuf>,
    /// Contour lattice points per axis.
    #[arg(long, default_value_t = 101, value_parser = at_least::<2>)]
    pub grid: usize,
}

#[derive(Debug, Args, Serialize)]
pub struct BifurcationArgs {
    /// rectangle or stadium (the ellipse has no threshold).
    #[arg(long, value_parser = parse_shape)]
    pub shape: PlanarShape,
}

#[derive(Debug, Args, Serialize)]
pub struct CriticalArgs {
    #[command(flatten)]
    pub curve: CurveArgs,
    #[command(flatten)]
    pub finder: FinderArgs,
    /// Output JSON file (default: stdout).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct IsosurfaceArgs {
    #[command(flatten)]
    pub curve: CurveArgs,
    /// Potential level v.
    #[arg(long)]
    pub level: f64,
    /// Marching lattice cells per axis (doubled once on a mesh defect).
    #[arg(long, default_value_t = 120, value_parser = at_least::<2>)]
    pub grid: usize,
    /// Initial box half-extent over the charge bounds; grown as needed.
    #[arg(long, default_value_t = 1.5)]
    pub inflation: f64,
    /// Reject levels within 1e-4·v of a critical value (runs the finder).
    #[arg(long)]
    pub check_regular: bool,
    /// Seeding lattice for --check-regular.
    #[arg(long, default_value_t = 30)]
    pub finder_grid: usize,
    /// OBJ output.
    #[arg(long)]
    pub out: PathBuf,
    /// Topology JSON output (default: stdout).
    #[arg(long)]
    pub report: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct GalleryArgs {
    #[command(flatten)]
    pub curve: CurveArgs,
    #[command(flatten)]
    pub finder: FinderArgs,
    /// Marching lattice cells per axis.
    #[arg(long, default_value_t = 120, value_parser = at_least::<2>)]
    pub iso_grid: usize,
    /// Directory for `level_NN.obj` files and `gallery.json`.
    #[arg(long)]
    pub out_dir: PathBuf,
}

#[derive(Debug, Args, Serialize)]
pub struct SweepArgs {
    /// Knot to flatten.
    #[arg(long, value_parser = parse_curve)]
    pub curve: CurveKind,
    #[arg(long, default_value_t = 1.0)]
    pub gamma_start: f64,
    #[arg(long, default_value_t = 0.01)]
    pub gamma_end: f64,
    #[arg(long, default_value_t = 100, value_parser = at_least::<2>)]
    pub steps: usize,
    /// linear or geometric spacing in γ.
    #[arg(long, default_value = "linear", value_parser = parse_schedule)]
    pub schedule: Schedule,
    /// Seeding lattice cells per axis.
    #[arg(long, default_value_t = 30, value_parser = at_least::<8>)]
    pub grid: usize,
    /// Smallest N used at any γ.
    #[arg(long, default_value_t = 2048)]
    pub min_samples: usize,
    /// Largest N used at any γ.
    #[arg(long, default_value_t = 32768)]
    pub max_samples: usize,
    /// Deepest octree refinement of seeding cells.
    #[arg(long, default_value_t = 7)]
    pub max_refine_depth: usize,
    /// CSV output `gamma,zero_count,index1_count,index2_count,flags`.
    #[arg(long)]
    pub out: PathBuf,
    /// Full records (critical sets included) as JSON.
    #[arg(long)]
    pub records: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct TableArgs {
    #[arg(long, default_value_t = 0.01)]
    pub gamma_end: f64,
    #[arg(long, default_value_t = 100, value_parser = at_least::<2>)]
    pub steps: usize,
    #[arg(long, default_value = "linear", value_parser = parse_schedule)]
    pub schedule: Schedule,
    #[arg(long, default_value_t = 30, value_parser = at_least::<8>)]
    pub grid: usize,
    /// JSON output; the aligned text table goes to stdout.
    #[arg(long, default_value = "table.json")]
    pub out: PathBuf,
}
