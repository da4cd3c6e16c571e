//! Flattening sweeps: the zero count of a knot as its height `γ` shrinks,
//! and the table of observed minima against the knot-theoretic bounds.
//!
//! As `γ → 0` strands pass within `~γ` of each other at the crossings, and
//! the zeros there sit in gaps of that size. Each record therefore picks
//! its own resolution: enough charges that their spacing stays a fraction
//! of the curve's half-height, and enough octree refinement of the seeding
//! cells to reach leaves of about that size.
//!
//! Every nondegenerate critical set of a loop satisfies
//! `#index-1 − #index-2 = 1` (the level sets go from a torus to a sphere).
//! A record that breaks this has missed zeros; it is recomputed with
//! deeper seeding and flagged if the balance still fails.

use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::critical::{find_critical_set, index_histogram, CriticalError, CriticalPoint, SearchBox, SeedingConfig};
use crate::curve::{discretize, knot_info, make_curve, CurveError, CurveKind, CurveParams, KnotInfo};
use crate::scalar::Real;

#[derive(Debug, Error)]
pub enum SweepError {
    #[error("invalid sweep: {0}")]
    InvalidSweep(String),
    #[error("{0} is not a catalog knot")]
    NotAKnot(CurveKind),
    #[error(transparent)]
    Curve(#[from] CurveError),
    #[error("at gamma = {gamma}: {source}")]
    Finder { gamma: f64, source: CriticalError },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Schedule {
    Linear,
    Geometric,
}

impl std::str::FromStr for Schedule {
    type Err = SweepError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "linear" => Ok(Schedule::Linear),
            "geometric" => Ok(Schedule::Geometric),
            _ => Err(SweepError::InvalidSweep(format!("unknown schedule `{s}` (expected linear or geometric)"))),
        }
    }
}

/// `steps` values from `start` down to `end`, both included.
pub fn gamma_schedule<T: Real>(schedule: Schedule, start: T, end: T, steps: usize) -> Vec<T> {
    let last = T::from_usize_lossy(steps - 1);
    (0..steps)
        .map(|i| {
            let u = T::from_usize_lossy(i) / last;
            match schedule {
                Schedule::Linear => start + (end - start) * u,
                Schedule::Geometric => start * (end / start).powf(u),
            }
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound(serialize = "T: Real + Serialize", deserialize = "T: Real + Deserialize<'de>"))]
pub struct SweepConfig<T> {
    /// Base finder settings; `refine_depth` is raised per record as needed.
    pub finder: SeedingConfig<T>,
    pub schedule: Schedule,
    /// Minimum number of samples `N`.
    pub min_samples: usize,
    /// `N ≥ samples_per_height · arclength / z-half-extent`.
    pub samples_per_height: T,
    pub max_samples: usize,
    /// Target seeding leaf size in units of the z-half-extent.
    pub leaf_per_height: T,
    pub max_refine_depth: usize,
    /// Extra refinement levels tried when the index balance fails.
    pub balance_retries: usize,
}

impl<T: Real> Default for SweepConfig<T> {
    fn default() -> Self {
        Self {
            finder: SeedingConfig { z_inflation: Some(T::lit(2.0)), ..SeedingConfig::default() },
            schedule: Schedule::Linear,
            min_samples: 2048,
            samples_per_height: T::lit(3.0),
            max_samples: 32768,
            leaf_per_height: T::one(),
            max_refine_depth: 7,
            balance_retries: 2,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum RecordFlag {
    /// Some critical point has a degenerate Hessian.
    NearBifurcation,
    /// `#index-1 − #index-2 ≠ 1` even after deeper seeding.
    IndexImbalance,
    /// Inserted halfway between two records whose counts differ by an odd
    /// number.
    Refinement,
}

impl fmt::Display for RecordFlag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            RecordFlag::NearBifurcation => "near-bifurcation",
            RecordFlag::IndexImbalance => "index-imbalance",
            RecordFlag::Refinement => "refinement",
        })
    }
}

#[derive(Debug, Clone, Serialize)]
#[serde(bound(serialize = "T: Real + Serialize"))]
pub struct SweepRecord<T> {
    pub gamma: T,
    pub zero_count: usize,
    pub critical_set: Vec<CriticalPoint<T>>,
    /// Counts of index 0, 1, 2, 3 and degenerate points.
    pub index_histogram: [usize; 5],
    pub samples: usize,
    pub refine_depth: usize,
    pub flags: Vec<RecordFlag>,
}

impl<T> SweepRecord<T> {
    pub fn is_flagged(&self) -> bool {
        self.flags.iter().any(|f| *f != RecordFlag::Refinement)
    }

    pub fn index_balance(&self) -> i64 {
        self.index_histogram[1] as i64 - self.index_histogram[2] as i64
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct BoundCheck {
    pub lower: usize,
    pub observed: usize,
    pub upper: usize,
    pub lower_ok: bool,
    pub upper_ok: bool,
}

#[derive(Debug, Clone, Serialize)]
#[serde(bound(serialize = "T: Real + Serialize"))]
pub struct SweepResult<T> {
    pub knot: CurveKind,
    /// Ordered by decreasing `γ`.
    pub records: Vec<SweepRecord<T>>,
    /// Minimum over unflagged records.
    pub min_zero_count: usize,
    /// `(largest, smallest)` `γ` among unflagged records at the minimum.
    pub argmin_gamma_range: (T, T),
    pub bound_check: Option<BoundCheck>,
    /// Adjacent unflagged records whose counts still differ by an odd number.
    pub odd_jumps: Vec<(T, T)>,
}

fn z_half_extent<T: Real>(kind: CurveKind, gamma: T) -> Result<(T, T), SweepError> {
    let probe = discretize(&make_curve(kind, CurveParams::with_gamma(gamma))?, 4096)?;
    let (lo, hi) = probe.bounds();
    Ok(((hi.z - lo.z) * T::lit(0.5), probe.total_charge))
}

/// Finds the critical set at one `γ`, choosing `N` and the refinement depth
/// from the curve's height and retrying deeper seeding on index imbalance.
pub fn sweep_record<T: Real>(kind: CurveKind, gamma: T, config: &SweepConfig<T>) -> Result<SweepRecord<T>, SweepError> {
    let curve = make_curve(kind, CurveParams::with_gamma(gamma))?;
    let (z_half, length) = z_half_extent(kind, gamma)?;
    let samples = if z_half > T::zero() {
        let want = (config.samples_per_height * length / z_half).ceil().to_usize().unwrap_or(usize::MAX);
        want.clamp(config.min_samples, config.max_samples.max(config.min_samples))
    } else {
        config.min_samples
    };
    let charges = discretize(&curve, samples)?;
    let bbox = SearchBox::around(&charges, &config.finder);
    let r = T::from_usize_lossy(config.finder.grid_resolution);
    let cell = (bbox.hi.x - bbox.lo.x).max(bbox.hi.y - bbox.lo.y) / r;
    let base_depth = if z_half > T::zero() {
        let ratio = cell / (config.leaf_per_height * z_half);
        ratio.log2().ceil().max(T::zero()).to_usize().unwrap_or(0)
    } else {
        0
    };
    let base_depth = base_depth.max(config.finder.refine_depth).min(config.max_refine_depth);

    let mut best: Option<(usize, Vec<CriticalPoint<T>>)> = None;
    for extra in 0..=config.balance_retries {
        let depth = (base_depth + extra).min(config.max_refine_depth);
        let finder = SeedingConfig { refine_depth: depth, ..config.finder };
        let set = find_critical_set(&charges, &finder)
            .map_err(|source| SweepError::Finder { gamma: gamma.to_f64_lossy(), source })?;
        let h = index_histogram(&set.points);
        let balanced = h[4] == 0 && h[1] as i64 - h[2] as i64 == 1;
        let done = balanced || h[4] > 0 || depth == config.max_refine_depth;
        best = Some((depth, set.points));
        if done {
            break;
        }
    }
    let (refine_depth, critical_set) = best.expect("at least one attempt");
    let index_histogram = index_histogram(&critical_set);
    let mut flags = Vec::new();
    if index_histogram[4] > 0 {
        flags.push(RecordFlag::NearBifurcation);
    } else if index_histogram[1] as i64 - index_histogram[2] as i64 != 1 {
        flags.push(RecordFlag::IndexImbalance);
    }
    Ok(SweepRecord {
        gamma,
        zero_count: critical_set.len(),
        critical_set,
        index_histogram,
        samples,
        refine_depth,
        flags,
    })
}

fn odd_jumps<T: Real>(records: &[SweepRecord<T>]) -> Vec<(usize, usize)> {
    records
        .windows(2)
        .enumerate()
        .filter(|(_, w)| !w[0].is_flagged() && !w[1].is_flagged() && (w[0].zero_count + w[1].zero_count) % 2 == 1)
        .map(|(i, _)| (i, i + 1))
        .collect()
}

/// Runs the finder at each `γ` of the schedule from `gamma_start` down to
/// `gamma_end`. Odd jumps between unflagged neighbours get one midpoint
/// record each before the summary is computed.
pub fn flatten_sweep<T: Real>(
    kind: CurveKind,
    gamma_start: T,
    gamma_end: T,
    steps: usize,
    config: &SweepConfig<T>,
) -> Result<SweepResult<T>, SweepError> {
    if !(gamma_start > gamma_end && gamma_end > T::zero()) {
        return Err(SweepError::InvalidSweep(format!(
            "need gamma_start > gamma_end > 0, got {gamma_start} and {gamma_end}"
        )));
    }
    if steps < 2 {
        return Err(SweepError::InvalidSweep(format!("need at least 2 steps, got {steps}")));
    }
    config.finder.validate().map_err(|source| SweepError::Finder { gamma: f64::NAN, source })?;
    let gammas = gamma_schedule(config.schedule, gamma_start, gamma_end, steps);
    let mut records: Vec<SweepRecord<T>> =
        gammas.par_iter().map(|&g| sweep_record(kind, g, config)).collect::<Result<_, _>>()?;

    let jumps = odd_jumps(&records);
    if !jumps.is_empty() {
        let mids: Vec<SweepRecord<T>> = jumps
            .par_iter()
            .map(|&(i, j)| {
                let g = (records[i].gamma + records[j].gamma) * T::lit(0.5);
                sweep_record(kind, g, config).map(|mut r| {
                    r.flags.push(RecordFlag::Refinement);
                    r
                })
            })
            .collect::<Result<_, _>>()?;
        records.extend(mids);
        records.sort_by(|a, b| b.gamma.partial_cmp(&a.gamma).unwrap());
    }
    let odd_jumps = odd_jumps(&records).into_iter().map(|(i, j)| (records[i].gamma, records[j].gamma)).collect();

    let clean = || records.iter().filter(|r| !r.is_flagged());
    let min_zero_count = clean()
        .map(|r| r.zero_count)
        .min()
        .unwrap_or_else(|| records.iter().map(|r| r.zero_count).min().unwrap_or(0));
    let at_min: Vec<T> = clean().filter(|r| r.zero_count == min_zero_count).map(|r| r.gamma).collect();
    let argmin_gamma_range = (
        at_min.iter().copied().fold(T::neg_infinity(), T::max),
        at_min.iter().copied().fold(T::infinity(), T::min),
    );
    let bound_check = knot_info(kind).map(|info| bound_check(&info, min_zero_count));
    Ok(SweepResult { knot: kind, records, min_zero_count, argmin_gamma_range, bound_check, odd_jumps })
}

pub fn bound_check(info: &KnotInfo, observed: usize) -> BoundCheck {
    let lower = info.lower_bound() as usize;
    let upper = info.upper_bound() as usize;
    BoundCheck { lower, observed, upper, lower_ok: lower <= observed, upper_ok: observed <= upper }
}

#[derive(Debug, Clone, Serialize)]
#[serde(bound(serialize = "T: Real + Serialize"))]
pub struct TableRow<T> {
    pub knot: CurveKind,
    pub lower_bound: usize,
    pub observed_min: usize,
    pub conjectured: usize,
    pub upper_bound: usize,
    pub pass: bool,
    /// `γ` range at which the minimum was seen.
    pub argmin_gamma_range: (T, T),
    pub flagged_records: usize,
}

/// Knots of the conjecture table, in table order.
pub const TABLE_KNOTS: [CurveKind; 5] = [
    CurveKind::Unknot,
    CurveKind::Trefoil,
    CurveKind::FigureEight,
    CurveKind::Cinquefoil,
    CurveKind::ThreeTwist,
];

/// Sweeps every table knot from `γ = 1` to `gamma_end` and compares the
/// observed minimum with the conjectured one and the bounds.
pub fn conjecture_table<T: Real>(
    gamma_end: T,
    steps: usize,
    config: &SweepConfig<T>,
) -> Result<Vec<TableRow<T>>, SweepError> {
    TABLE_KNOTS
        .iter()
        .map(|&kind| {
            let info = knot_info(kind).ok_or(SweepError::NotAKnot(kind))?;
            let sweep = flatten_sweep(kind, T::one(), gamma_end, steps, config)?;
            let b = bound_check(&info, sweep.min_zero_count);
            Ok(TableRow {
                knot: kind,
                lower_bound: b.lower,
                observed_min: sweep.min_zero_count,
                conjectured: info.conjectured_zeros as usize,
                upper_bound: b.upper,
                pass: b.lower_ok && b.upper_ok && sweep.min_zero_count == info.conjectured_zeros as usize,
                argmin_gamma_range: sweep.argmin_gamma_range,
                flagged_records: sweep.records.iter().filter(|r| r.is_flagged()).count(),
            })
        })
        .collect()
}
