//! Catalog of charged loops and their discretization into weighted point
//! charges.
//!
//! Smooth curves are sampled on the uniform grid `t_j = 2πj/(N+1)` with
//! weights `(2π/(N+1))·|r'(t_j)|`. The rectangle and stadium are only
//! piecewise smooth, so they are sampled piece by piece at midpoints and no
//! sample ever lands on a corner or a straight/arc junction.

use std::fmt;
use std::io::Read;
use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::linalg::Vec3;
use crate::scalar::Real;

#[derive(Debug, Error)]
pub enum CurveError {
    #[error("unknown curve `{0}` (known: unknot, trefoil, trefoil-tableI, figure-eight, cinquefoil, three-twist, rectangle, stadium, ellipse)")]
    UnknownCurve(String),
    #[error("invalid parameter {name} = {value}: {reason}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },
    #[error("discretization needs N >= {min}, got {got}")]
    TooFewSamples { got: usize, min: usize },
    #[error("curve CSV: {0}")]
    Csv(String),
    #[error("curve CSV samples must be uniformly spaced in t (row {row} deviates by {deviation:e})")]
    NonUniformSampling { row: usize, deviation: f64 },
}

/// Smallest `N` accepted by [`discretize`] (giving `N + 1 = 4` samples).
pub const MIN_SAMPLES: usize = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CurveKind {
    Unknot,
    Trefoil,
    /// Trefoil with `y = cos t − 2 sin 2t`, the variant printed in the knot table.
    #[serde(rename = "trefoil-tableI")]
    TrefoilTableI,
    FigureEight,
    Cinquefoil,
    ThreeTwist,
    Rectangle,
    Stadium,
    Ellipse,
    /// Curve loaded from uniformly spaced samples.
    Sampled,
}

impl CurveKind {
    pub const CATALOG: [CurveKind; 9] = [
        CurveKind::Unknot,
        CurveKind::Trefoil,
        CurveKind::TrefoilTableI,
        CurveKind::FigureEight,
        CurveKind::Cinquefoil,
        CurveKind::ThreeTwist,
        CurveKind::Rectangle,
        CurveKind::Stadium,
        CurveKind::Ellipse,
    ];

    pub fn name(self) -> &'static str {
        match self {
            CurveKind::Unknot => "unknot",
            CurveKind::Trefoil => "trefoil",
            CurveKind::TrefoilTableI => "trefoil-tableI",
            CurveKind::FigureEight => "figure-eight",
            CurveKind::Cinquefoil => "cinquefoil",
            CurveKind::ThreeTwist => "three-twist",
            CurveKind::Rectangle => "rectangle",
            CurveKind::Stadium => "stadium",
            CurveKind::Ellipse => "ellipse",
            CurveKind::Sampled => "sampled",
        }
    }

    /// Curves whose height is controlled by `γ`.
    pub fn uses_gamma(self) -> bool {
        matches!(
            self,
            CurveKind::Trefoil
                | CurveKind::TrefoilTableI
                | CurveKind::FigureEight
                | CurveKind::Cinquefoil
                | CurveKind::ThreeTwist
        )
    }

    pub fn uses_aspect(self) -> bool {
        matches!(self, CurveKind::Rectangle | CurveKind::Stadium | CurveKind::Ellipse)
    }

    pub fn is_planar_shape(self) -> bool {
        matches!(
            self,
            CurveKind::Unknot | CurveKind::Rectangle | CurveKind::Stadium | CurveKind::Ellipse
        )
    }
}

impl fmt::Display for CurveKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for CurveKind {
    type Err = CurveError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let lower = s.to_ascii_lowercase();
        let kind = match lower.as_str() {
            "unknot" | "circle" => CurveKind::Unknot,
            "trefoil" => CurveKind::Trefoil,
            "trefoil-tablei" | "trefoil-table" => CurveKind::TrefoilTableI,
            "figure-eight" | "figure8" | "figure-8" => CurveKind::FigureEight,
            "cinquefoil" => CurveKind::Cinquefoil,
            "three-twist" | "threetwist" => CurveKind::ThreeTwist,
            "rectangle" => CurveKind::Rectangle,
            "stadium" => CurveKind::Stadium,
            "ellipse" => CurveKind::Ellipse,
            _ => return Err(CurveError::UnknownCurve(s.to_string())),
        };
        Ok(kind)
    }
}

/// Shape parameters: aspect `a` for planar shapes, height `γ` for knots.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CurveParams<T> {
    pub aspect: T,
    pub gamma: T,
}

impl<T: Real> Default for CurveParams<T> {
    fn default() -> Self {
        Self { aspect: T::one(), gamma: T::one() }
    }
}

impl<T: Real> CurveParams<T> {
    pub fn with_gamma(gamma: T) -> Self {
        Self { gamma, ..Self::default() }
    }

    pub fn with_aspect(aspect: T) -> Self {
        Self { aspect, ..Self::default() }
    }
}

/// Smooth piece of a piecewise curve, parametrized by arclength.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Piece<T> {
    Segment { start: Vec3<T>, end: Vec3<T> },
    /// Counter-clockwise arc in the xy plane.
    Arc { center: Vec3<T>, radius: T, start_angle: T, sweep: T },
}

impl<T: Real> Piece<T> {
    pub fn length(&self) -> T {
        match *self {
            Piece::Segment { start, end } => (end - start).norm(),
            Piece::Arc { radius, sweep, .. } => radius * sweep,
        }
    }

    pub fn point_at(&self, s: T) -> Vec3<T> {
        match *self {
            Piece::Segment { start, end } => {
                let len = (end - start).norm();
                start + (end - start).scale(s / len)
            }
            Piece::Arc { center, radius, start_angle, .. } => {
                let th = start_angle + s / radius;
                center + Vec3::new(radius * th.cos(), radius * th.sin(), T::zero())
            }
        }
    }

    pub fn unit_tangent_at(&self, s: T) -> Vec3<T> {
        match *self {
            Piece::Segment { start, end } => (end - start).scale(T::one() / (end - start).norm()),
            Piece::Arc { radius, start_angle, .. } => {
                let th = start_angle + s / radius;
                Vec3::new(-th.sin(), th.cos(), T::zero())
            }
        }
    }
}

/// Trigonometric interpolant through uniformly spaced samples.
#[derive(Debug, Clone)]
struct TrigInterpolant<T> {
    t0: T,
    mean: Vec3<T>,
    cos: Vec<Vec3<T>>,
    sin: Vec<Vec3<T>>,
    /// Coefficient of `cos(n/2·t)` when the sample count `n` is even.
    nyquist: Option<Vec3<T>>,
}

impl<T: Real> TrigInterpolant<T> {
    fn fit(t0: T, samples: &[Vec3<T>]) -> Self {
        let n = samples.len();
        let nf = T::from_usize_lossy(n);
        let two = T::lit(2.0);
        let mean = samples.iter().fold(Vec3::zero(), |a, &p| a + p).scale(T::one() / nf);
        let kmax = (n - 1) / 2;
        let mut cos = Vec::with_capacity(kmax);
        let mut sin = Vec::with_capacity(kmax);
        for k in 1..=kmax {
            let mut c = Vec3::zero();
            let mut s = Vec3::zero();
            for (j, &p) in samples.iter().enumerate() {
                let ang = T::two_pi() * T::from_usize_lossy((k * j) % n) / nf;
                let (sn, cs) = ang.sin_cos();
                c += p.scale(cs);
                s += p.scale(sn);
            }
            cos.push(c.scale(two / nf));
            sin.push(s.scale(two / nf));
        }
        let nyquist = (n % 2 == 0).then(|| {
            samples
                .iter()
                .enumerate()
                .fold(Vec3::zero(), |a, (j, &p)| if j % 2 == 0 { a + p } else { a - p })
                .scale(T::one() / nf)
        });
        Self { t0, mean, cos, sin, nyquist }
    }

    fn position(&self, t: T) -> Vec3<T> {
        let u = t - self.t0;
        let mut acc = self.mean;
        for (k, (c, s)) in self.cos.iter().zip(&self.sin).enumerate() {
            let (sn, cs) = (T::from_usize_lossy(k + 1) * u).sin_cos();
            acc += c.scale(cs) + s.scale(sn);
        }
        if let Some(ny) = self.nyquist {
            let half = T::from_usize_lossy(self.cos.len() + 1);
            acc += ny.scale((half * u).cos());
        }
        acc
    }

    fn derivative(&self, t: T) -> Vec3<T> {
        let u = t - self.t0;
        let mut acc = Vec3::zero();
        for (k, (c, s)) in self.cos.iter().zip(&self.sin).enumerate() {
            let kf = T::from_usize_lossy(k + 1);
            let (sn, cs) = (kf * u).sin_cos();
            acc += s.scale(kf * cs) - c.scale(kf * sn);
        }
        if let Some(ny) = self.nyquist {
            let half = T::from_usize_lossy(self.cos.len() + 1);
            acc -= ny.scale(half * (half * u).sin());
        }
        acc
    }
}

#[derive(Debug, Clone)]
enum Geometry<T> {
    Analytic,
    Piecewise { pieces: Vec<Piece<T>>, length: T },
    Sampled(Arc<TrigInterpolant<T>>),
}

/// Closed curve `r(t)`, `t ∈ [0, 2π]`, with analytic derivative.
#[derive(Debug, Clone)]
pub struct ParamCurve<T> {
    kind: CurveKind,
    params: CurveParams<T>,
    geometry: Geometry<T>,
}

/// Builds a catalog curve, validating its parameters.
pub fn make_curve<T: Real>(kind: CurveKind, params: CurveParams<T>) -> Result<ParamCurve<T>, CurveError> {
    if !(params.gamma >= T::zero()) || !params.gamma.is_finite() {
        return Err(CurveError::InvalidParameter {
            name: "gamma",
            value: params.gamma.to_f64_lossy(),
            reason: "height must be finite and >= 0",
        });
    }
    let a = params.aspect;
    match kind {
        CurveKind::Rectangle | CurveKind::Ellipse if !(a >= T::one()) || !a.is_finite() => {
            return Err(CurveError::InvalidParameter {
                name: "aspect",
                value: a.to_f64_lossy(),
                reason: "aspect ratio must be finite and >= 1",
            })
        }
        CurveKind::Stadium if !(a > T::zero()) || !a.is_finite() => {
            return Err(CurveError::InvalidParameter {
                name: "aspect",
                value: a.to_f64_lossy(),
                reason: "stadium half-length must be finite and > 0",
            })
        }
        CurveKind::Sampled => return Err(CurveError::UnknownCurve("sampled".into())),
        _ => {}
    }
    let geometry = match kind {
        CurveKind::Rectangle => piecewise(rectangle_pieces(a)),
        CurveKind::Stadium => piecewise(stadium_pieces(a)),
        _ => Geometry::Analytic,
    };
    Ok(ParamCurve { kind, params, geometry })
}

/// Parses a catalog name and builds the curve.
pub fn make_named_curve<T: Real>(name: &str, params: CurveParams<T>) -> Result<ParamCurve<T>, CurveError> {
    make_curve(name.parse()?, params)
}

fn piecewise<T: Real>(pieces: Vec<Piece<T>>) -> Geometry<T> {
    let length = pieces.iter().map(Piece::length).sum();
    Geometry::Piecewise { pieces, length }
}

/// Rectangle with corners `(±a, ±1)`, counter-clockwise from `(a, −1)`.
fn rectangle_pieces<T: Real>(a: T) -> Vec<Piece<T>> {
    let o = T::one();
    let z = T::zero();
    let c = [
        Vec3::new(a, -o, z),
        Vec3::new(a, o, z),
        Vec3::new(-a, o, z),
        Vec3::new(-a, -o, z),
    ];
    (0..4)
        .map(|i| Piece::Segment { start: c[i], end: c[(i + 1) % 4] })
        .collect()
}

/// Straights `y = ±1` over `x ∈ [−a, a]` and unit semicircular caps,
/// counter-clockwise from `(a, −1)`.
fn stadium_pieces<T: Real>(a: T) -> Vec<Piece<T>> {
    let o = T::one();
    let z = T::zero();
    let pi = T::PI();
    let half_pi = T::FRAC_PI_2();
    vec![
        Piece::Arc { center: Vec3::new(a, z, z), radius: o, start_angle: -half_pi, sweep: pi },
        Piece::Segment { start: Vec3::new(a, o, z), end: Vec3::new(-a, o, z) },
        Piece::Arc { center: Vec3::new(-a, z, z), radius: o, start_angle: half_pi, sweep: pi },
        Piece::Segment { start: Vec3::new(-a, -o, z), end: Vec3::new(a, -o, z) },
    ]
}

impl<T: Real> ParamCurve<T> {
    pub fn kind(&self) -> CurveKind {
        self.kind
    }

    pub fn name(&self) -> &'static str {
        self.kind.name()
    }

    pub fn params(&self) -> CurveParams<T> {
        self.params
    }

    /// Smooth pieces for piecewise curves; `None` for smooth curves.
    pub fn pieces(&self) -> Option<&[Piece<T>]> {
        match &self.geometry {
            Geometry::Piecewise { pieces, .. } => Some(pieces),
            _ => None,
        }
    }

    /// True when every point of the curve has `z = 0`.
    pub fn is_planar(&self) -> bool {
        match &self.geometry {
            Geometry::Sampled(interp) => {
                interp.mean.z == T::zero()
                    && interp.cos.iter().chain(&interp.sin).all(|c| c.z == T::zero())
                    && interp.nyquist.map_or(true, |n| n.z == T::zero())
            }
            _ => self.kind.is_planar_shape() || self.params.gamma == T::zero(),
        }
    }

    /// Maps `t` to (piece index, arclength within the piece).
    fn locate(&self, pieces: &[Piece<T>], length: T, t: T) -> (usize, T) {
        let mut s = (t / T::two_pi()).fract() * length;
        if s < T::zero() {
            s += length;
        }
        for (i, p) in pieces.iter().enumerate() {
            let len = p.length();
            if s < len || i + 1 == pieces.len() {
                return (i, s.min(len));
            }
            s -= len;
        }
        unreachable!("piecewise curve has at least one piece")
    }

    pub fn position(&self, t: T) -> Vec3<T> {
        let g = self.params.gamma;
        let a = self.params.aspect;
        let lit = T::lit;
        match &self.geometry {
            Geometry::Sampled(interp) => return interp.position(t),
            Geometry::Piecewise { pieces, length } => {
                let (i, s) = self.locate(pieces, *length, t);
                return pieces[i].point_at(s);
            }
            Geometry::Analytic => {}
        }
        match self.kind {
            CurveKind::Unknot => Vec3::new(t.cos(), t.sin(), T::zero()),
            CurveKind::Trefoil => Vec3::new(
                t.sin() + lit(2.0) * (lit(2.0) * t).sin(),
                t.cos() - lit(2.0) * (lit(2.0) * t).cos(),
                -g * (lit(3.0) * t).sin(),
            ),
            CurveKind::TrefoilTableI => Vec3::new(
                t.sin() + lit(2.0) * (lit(2.0) * t).sin(),
                t.cos() - lit(2.0) * (lit(2.0) * t).sin(),
                -g * (lit(3.0) * t).sin(),
            ),
            CurveKind::FigureEight => {
                let rho = lit(2.0) + (lit(2.0) * t).cos();
                Vec3::new(
                    rho * (lit(3.0) * t).cos(),
                    rho * (lit(3.0) * t).sin(),
                    g * (lit(4.0) * t).sin(),
                )
            }
            CurveKind::Cinquefoil => {
                let c5 = (lit(5.0) * t).cos();
                Vec3::new(
                    (lit(2.0) * t).cos() * (lit(3.0) + c5) / lit(2.0),
                    (lit(2.0) * t).sin() * (lit(2.0) + c5) / lit(2.0),
                    g * (lit(5.0) * t).sin() / lit(2.0),
                )
            }
            CurveKind::ThreeTwist => Vec3::new(
                lit(2.0) * (lit(2.0) * t + lit(0.2)).cos(),
                lit(2.0) * (lit(3.0) * t + lit(0.7)).cos(),
                g * (lit(7.0) * t).cos(),
            ),
            CurveKind::Ellipse => Vec3::new(a * t.cos(), t.sin(), T::zero()),
            CurveKind::Rectangle | CurveKind::Stadium | CurveKind::Sampled => {
                unreachable!("non-analytic kinds carry their own geometry")
            }
        }
    }

    /// `dr/dt`. At corners of piecewise curves this is the outgoing tangent.
    pub fn derivative(&self, t: T) -> Vec3<T> {
        let g = self.params.gamma;
        let a = self.params.aspect;
        let lit = T::lit;
        match &self.geometry {
            Geometry::Sampled(interp) => return interp.derivative(t),
            Geometry::Piecewise { pieces, length } => {
                let (i, s) = self.locate(pieces, *length, t);
                return pieces[i].unit_tangent_at(s).scale(*length / T::two_pi());
            }
            Geometry::Analytic => {}
        }
        match self.kind {
            CurveKind::Unknot => Vec3::new(-t.sin(), t.cos(), T::zero()),
            CurveKind::Trefoil => Vec3::new(
                t.cos() + lit(4.0) * (lit(2.0) * t).cos(),
                -t.sin() + lit(4.0) * (lit(2.0) * t).sin(),
                -lit(3.0) * g * (lit(3.0) * t).cos(),
            ),
            CurveKind::TrefoilTableI => Vec3::new(
                t.cos() + lit(4.0) * (lit(2.0) * t).cos(),
                -t.sin() - lit(4.0) * (lit(2.0) * t).cos(),
                -lit(3.0) * g * (lit(3.0) * t).cos(),
            ),
            CurveKind::FigureEight => {
                let rho = lit(2.0) + (lit(2.0) * t).cos();
                let drho = -lit(2.0) * (lit(2.0) * t).sin();
                let (s3, c3) = (lit(3.0) * t).sin_cos();
                Vec3::new(
                    drho * c3 - lit(3.0) * rho * s3,
                    drho * s3 + lit(3.0) * rho * c3,
                    lit(4.0) * g * (lit(4.0) * t).cos(),
                )
            }
            CurveKind::Cinquefoil => {
                let (s5, c5) = (lit(5.0) * t).sin_cos();
                let (s2, c2) = (lit(2.0) * t).sin_cos();
                Vec3::new(
                    (-lit(2.0) * s2 * (lit(3.0) + c5) - lit(5.0) * c2 * s5) / lit(2.0),
                    (lit(2.0) * c2 * (lit(2.0) + c5) - lit(5.0) * s2 * s5) / lit(2.0),
                    lit(5.0) * g * c5 / lit(2.0),
                )
            }
            CurveKind::ThreeTwist => Vec3::new(
                -lit(4.0) * (lit(2.0) * t + lit(0.2)).sin(),
                -lit(6.0) * (lit(3.0) * t + lit(0.7)).sin(),
                -lit(7.0) * g * (lit(7.0) * t).sin(),
            ),
            CurveKind::Ellipse => Vec3::new(-a * t.sin(), t.cos(), T::zero()),
            CurveKind::Rectangle | CurveKind::Stadium | CurveKind::Sampled => {
                unreachable!("non-analytic kinds carry their own geometry")
            }
        }
    }

    /// Loads a curve from CSV rows `t,x,y,z` with `t` uniformly spaced in
    /// `[0, 2π)`; the last row joins back to the first. The derivative comes
    /// from the trigonometric interpolant through the samples.
    pub fn from_csv_reader<R: Read>(reader: R) -> Result<Self, CurveError> {
        #[derive(Deserialize)]
        struct Row {
            t: f64,
            x: f64,
            y: f64,
            z: f64,
        }
        let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
        let headers = rdr.headers().map_err(|e| CurveError::Csv(e.to_string()))?.clone();
        if headers.iter().collect::<Vec<_>>() != ["t", "x", "y", "z"] {
            return Err(CurveError::Csv(format!("expected header `t,x,y,z`, got `{}`", headers.iter().collect::<Vec<_>>().join(","))));
        }
        let mut rows = Vec::new();
        for rec in rdr.deserialize::<Row>() {
            rows.push(rec.map_err(|e| CurveError::Csv(e.to_string()))?);
        }
        if rows.len() < 4 {
            return Err(CurveError::Csv(format!("need at least 4 samples, got {}", rows.len())));
        }
        let tau = std::f64::consts::TAU;
        let n = rows.len();
        let step = tau / n as f64;
        let t0 = rows[0].t;
        if !(0.0..tau).contains(&t0) {
            return Err(CurveError::Csv(format!("t must lie in [0, 2π), got {t0}")));
        }
        for (i, w) in rows.windows(2).enumerate() {
            if !(w[1].t > w[0].t) || w[1].t >= tau {
                return Err(CurveError::Csv(format!(
                    "t must be strictly increasing in [0, 2π) (row {})",
                    i + 2
                )));
            }
        }
        for (j, r) in rows.iter().enumerate() {
            let dev = (r.t - t0 - j as f64 * step).abs();
            if dev > 1e-9 * tau {
                return Err(CurveError::NonUniformSampling { row: j + 1, deviation: dev });
            }
        }
        let samples: Vec<Vec3<T>> = rows
            .iter()
            .map(|r| Vec3::new(T::lit(r.x), T::lit(r.y), T::lit(r.z)))
            .collect();
        let interp = TrigInterpolant::fit(T::lit(t0), &samples);
        Ok(Self {
            kind: CurveKind::Sampled,
            params: CurveParams { aspect: T::one(), gamma: T::one() },
            geometry: Geometry::Sampled(Arc::new(interp)),
        })
    }
}

/// Tunnel and crossing numbers of a catalog knot with its conjectured
/// minimum zero count.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct KnotInfo {
    pub knot: CurveKind,
    pub tunnel_number: u32,
    pub crossing_number: u32,
    pub conjectured_zeros: u32,
}

impl KnotInfo {
    pub fn lower_bound(&self) -> u32 {
        2 * self.tunnel_number + 1
    }

    pub fn upper_bound(&self) -> u32 {
        2 * self.crossing_number + 1
    }
}

pub const KNOT_TABLE: [KnotInfo; 5] = [
    KnotInfo { knot: CurveKind::Unknot, tunnel_number: 0, crossing_number: 0, conjectured_zeros: 1 },
    KnotInfo { knot: CurveKind::Trefoil, tunnel_number: 1, crossing_number: 3, conjectured_zeros: 7 },
    KnotInfo { knot: CurveKind::FigureEight, tunnel_number: 1, crossing_number: 4, conjectured_zeros: 5 },
    KnotInfo { knot: CurveKind::Cinquefoil, tunnel_number: 1, crossing_number: 5, conjectured_zeros: 11 },
    KnotInfo { knot: CurveKind::ThreeTwist, tunnel_number: 1, crossing_number: 5, conjectured_zeros: 11 },
];

pub fn knot_info(kind: CurveKind) -> Option<KnotInfo> {
    let kind = if kind == CurveKind::TrefoilTableI { CurveKind::Trefoil } else { kind };
    KNOT_TABLE.iter().copied().find(|k| k.knot == kind)
}

/// `N + 1` point charges standing in for the continuous loop.
#[derive(Debug, Clone)]
pub struct ChargeDiscretization<T> {
    pub sample_parameters: Vec<T>,
    pub points: Vec<Vec3<T>>,
    pub weights: Vec<T>,
    pub total_charge: T,
}

impl<T: Real> ChargeDiscretization<T> {
    /// Builds a discretization from explicit charges.
    pub fn from_charges(points: Vec<Vec3<T>>, weights: Vec<T>) -> Self {
        assert_eq!(points.len(), weights.len(), "one weight per charge");
        let total_charge = weights.iter().copied().sum();
        let sample_parameters = (0..points.len()).map(T::from_usize_lossy).collect();
        Self { sample_parameters, points, weights, total_charge }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Axis-aligned bounds `(min, max)` of the charge positions.
    pub fn bounds(&self) -> (Vec3<T>, Vec3<T>) {
        let init = (Vec3::splat(T::infinity()), Vec3::splat(T::neg_infinity()));
        self.points
            .iter()
            .fold(init, |(lo, hi), &p| (lo.component_min(p), hi.component_max(p)))
    }

    /// Largest distance of a charge from the origin.
    pub fn bounding_radius(&self) -> T {
        self.points.iter().map(|p| p.norm()).fold(T::zero(), T::max)
    }

    /// Distance from `x` to the nearest charge sample.
    pub fn nearest_distance(&self, x: Vec3<T>) -> T {
        self.points
            .iter()
            .map(|&p| (x - p).norm_squared())
            .fold(T::infinity(), T::min)
            .sqrt()
    }

    /// Largest distance between cyclically consecutive charges.
    pub fn max_spacing(&self) -> T {
        let n = self.points.len();
        (0..n)
            .map(|j| (self.points[(j + 1) % n] - self.points[j]).norm())
            .fold(T::zero(), T::max)
    }

    /// Applies a rigid motion (or any point map) to every charge.
    pub fn map_points(&self, f: impl Fn(Vec3<T>) -> Vec3<T>) -> Self {
        Self {
            points: self.points.iter().map(|&p| f(p)).collect(),
            ..self.clone()
        }
    }
}

/// Samples `curve` with `n + 1` weighted point charges.
pub fn discretize<T: Real>(curve: &ParamCurve<T>, n: usize) -> Result<ChargeDiscretization<T>, CurveError> {
    if n < MIN_SAMPLES {
        return Err(CurveError::TooFewSamples { got: n, min: MIN_SAMPLES });
    }
    let count = n + 1;
    if let Geometry::Piecewise { pieces, length } = &curve.geometry {
        return Ok(discretize_piecewise(pieces, *length, count));
    }
    let h = T::two_pi() / T::from_usize_lossy(count);
    let mut sample_parameters = Vec::with_capacity(count);
    let mut points = Vec::with_capacity(count);
    let mut weights = Vec::with_capacity(count);
    for j in 0..count {
        let t = h * T::from_usize_lossy(j);
        sample_parameters.push(t);
        points.push(curve.position(t));
        weights.push(h * curve.derivative(t).norm());
    }
    let total_charge = weights.iter().copied().sum();
    Ok(ChargeDiscretization { sample_parameters, points, weights, total_charge })
}

/// Midpoint samples on each smooth piece, counts proportional to length
/// (largest-remainder apportionment, at least one per piece).
fn discretize_piecewise<T: Real>(pieces: &[Piece<T>], length: T, count: usize) -> ChargeDiscretization<T> {
    let lens: Vec<f64> = pieces.iter().map(|p| p.length().to_f64_lossy()).collect();
    let total: f64 = lens.iter().sum();
    let quotas: Vec<f64> = lens.iter().map(|l| l / total * count as f64).collect();
    let mut alloc: Vec<usize> = quotas.iter().map(|q| (q.floor() as usize).max(1)).collect();
    let mut order: Vec<usize> = (0..pieces.len()).collect();
    order.sort_by(|&i, &j| {
        let ri = quotas[i] - quotas[i].floor();
        let rj = quotas[j] - quotas[j].floor();
        rj.partial_cmp(&ri).unwrap().then(i.cmp(&j))
    });
    let mut assigned: usize = alloc.iter().sum();
    let mut k = 0;
    while assigned < count {
        alloc[order[k % order.len()]] += 1;
        assigned += 1;
        k += 1;
    }
    while assigned > count {
        let i = (0..alloc.len()).filter(|&i| alloc[i] > 1).max_by_key(|&i| alloc[i]).unwrap();
        alloc[i] -= 1;
        assigned -= 1;
    }

    let mut sample_parameters = Vec::with_capacity(count);
    let mut points = Vec::with_capacity(count);
    let mut weights = Vec::with_capacity(count);
    let mut offset = T::zero();
    let half = T::lit(0.5);
    for (piece, &m) in pieces.iter().zip(&alloc) {
        let len = piece.length();
        let ds = len / T::from_usize_lossy(m);
        for k in 0..m {
            let s = ds * (T::from_usize_lossy(k) + half);
            sample_parameters.push((offset + s) / length * T::two_pi());
            points.push(piece.point_at(s));
            weights.push(ds);
        }
        offset += len;
    }
    let total_charge = weights.iter().copied().sum();
    ChargeDiscretization { sample_parameters, points, weights, total_charge }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_2, PI, TAU};

    fn curve(kind: CurveKind, aspect: f64, gamma: f64) -> ParamCurve<f64> {
        make_curve(kind, CurveParams { aspect, gamma }).unwrap()
    }

    fn close(a: Vec3<f64>, b: Vec3<f64>, tol: f64) -> bool {
        (a - b).norm() < tol
    }

    #[test]
    fn catalog_point_values() {
        let unknot = curve(CurveKind::Unknot, 1.0, 0.0);
        assert!(close(unknot.position(FRAC_PI_2), Vec3::new(0.0, 1.0, 0.0), 1e-15));
        let trefoil = curve(CurveKind::Trefoil, 1.0, 1.0);
        assert!(close(trefoil.position(0.0), Vec3::new(0.0, -1.0, 0.0), 1e-15));
        let fig8 = curve(CurveKind::FigureEight, 1.0, 0.5);
        assert!(close(fig8.position(FRAC_PI_2), Vec3::new(0.0, -1.0, 0.0), 1e-15));
    }

    #[test]
    fn all_catalog_curves_close_up() {
        for kind in CurveKind::CATALOG {
            let c = curve(kind, 2.0, 0.7);
            let gap = (c.position(0.0) - c.position(TAU)).norm();
            assert!(gap < 1e-12, "{kind}: gap {gap}");
        }
    }

    /// Parameter values of corners and junctions of a piecewise curve.
    fn breakpoints(c: &ParamCurve<f64>) -> Vec<f64> {
        let Some(pieces) = c.pieces() else { return Vec::new() };
        let total: f64 = pieces.iter().map(Piece::length).sum();
        let mut acc = 0.0;
        let mut out = vec![0.0, TAU];
        for p in pieces {
            acc += p.length();
            out.push(acc / total * TAU);
        }
        out
    }

    #[test]
    fn derivatives_match_central_differences() {
        let h = 1e-6;
        for kind in CurveKind::CATALOG {
            let c = curve(kind, 1.7, 0.8);
            let breaks = breakpoints(&c);
            for i in 0..100 {
                let t = (i as f64 + 0.37) * TAU / 100.0;
                if breaks.iter().any(|b| (b - t).abs() < 10.0 * h) {
                    continue;
                }
                let fd = (c.position(t + h) - c.position(t - h)).scale(0.5 / h);
                let d = c.derivative(t);
                let rel = (fd - d).norm() / d.norm();
                assert!(rel < 1e-6, "{kind} t={t}: rel err {rel}");
            }
        }
    }

    #[test]
    fn planar_shapes_have_zero_height() {
        for kind in [CurveKind::Unknot, CurveKind::Rectangle, CurveKind::Stadium, CurveKind::Ellipse] {
            let c = curve(kind, 2.5, 1.0);
            assert!(c.is_planar());
            for i in 0..50 {
                assert_eq!(c.position(i as f64 * 0.13).z, 0.0);
            }
        }
        assert!(curve(CurveKind::Trefoil, 1.0, 0.0).is_planar());
        assert!(!curve(CurveKind::Trefoil, 1.0, 0.1).is_planar());
    }

    #[test]
    fn unknot_four_samples() {
        let d = discretize(&curve(CurveKind::Unknot, 1.0, 0.0), 3).unwrap();
        assert_eq!(d.len(), 4);
        let expected = [0.0, FRAC_PI_2, PI, 3.0 * FRAC_PI_2];
        for ((t, w), e) in d.sample_parameters.iter().zip(&d.weights).zip(expected) {
            assert!((t - e).abs() < 1e-15);
            assert!((w - FRAC_PI_2).abs() < 1e-15);
        }
        assert!((d.total_charge - TAU).abs() < 1e-14);
    }

    #[test]
    fn unknot_total_charge_is_two_pi_for_all_n() {
        let c = curve(CurveKind::Unknot, 1.0, 0.0);
        for n in [3, 8, 17, 100, 1023] {
            let d = discretize(&c, n).unwrap();
            assert!((d.total_charge - TAU).abs() < 1e-12, "n={n}");
        }
    }

    #[test]
    fn piecewise_samples_avoid_corners() {
        let rect = curve(CurveKind::Rectangle, 2.0, 0.0);
        let d = discretize(&rect, 99).unwrap();
        assert_eq!(d.len(), 100);
        assert!((d.total_charge - 12.0).abs() < 1e-12);
        for p in &d.points {
            assert!(!((p.x.abs() - 2.0).abs() < 1e-12 && (p.y.abs() - 1.0).abs() < 1e-12));
            assert_eq!(p.z, 0.0);
        }
        let stadium = curve(CurveKind::Stadium, 1.0, 0.0);
        let d = discretize(&stadium, 200).unwrap();
        assert!((d.total_charge - (4.0 + TAU)).abs() < 1e-12);
        assert!(d.weights.iter().all(|&w| w > 0.0));
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(matches!(
            make_curve(CurveKind::Rectangle, CurveParams { aspect: 0.5, gamma: 0.0 }),
            Err(CurveError::InvalidParameter { name: "aspect", .. })
        ));
        assert!(matches!(
            make_curve(CurveKind::Trefoil, CurveParams { aspect: 1.0, gamma: -0.1 }),
            Err(CurveError::InvalidParameter { name: "gamma", .. })
        ));
        assert!(matches!("hopf".parse::<CurveKind>(), Err(CurveError::UnknownCurve(_))));
        assert!(matches!(
            discretize(&curve(CurveKind::Unknot, 1.0, 0.0), 2),
            Err(CurveError::TooFewSamples { .. })
        ));
    }

    #[test]
    fn knot_table_respects_bounds() {
        for k in KNOT_TABLE {
            assert!(k.lower_bound() <= k.conjectured_zeros && k.conjectured_zeros <= k.upper_bound());
        }
        assert_eq!(knot_info(CurveKind::TrefoilTableI).unwrap().conjectured_zeros, 7);
        assert!(knot_info(CurveKind::Rectangle).is_none());
    }

    #[test]
    fn csv_roundtrip_reproduces_trefoil() {
        let tref = curve(CurveKind::Trefoil, 1.0, 1.0);
        let n = 64;
        let mut text = String::from("t,x,y,z\n");
        for j in 0..n {
            let t = TAU * j as f64 / n as f64;
            let p = tref.position(t);
            text.push_str(&format!("{t},{},{},{}\n", p.x, p.y, p.z));
        }
        let loaded = ParamCurve::<f64>::from_csv_reader(text.as_bytes()).unwrap();
        assert_eq!(loaded.kind(), CurveKind::Sampled);
        for i in 0..20 {
            let t = 0.31 * i as f64;
            assert!((loaded.position(t) - tref.position(t)).norm() < 1e-10);
            assert!((loaded.derivative(t) - tref.derivative(t)).norm() < 1e-9);
        }
    }

    #[test]
    fn csv_rejects_bad_input() {
        let bad_header = "s,x,y,z\n0,1,0,0\n";
        assert!(matches!(
            ParamCurve::<f64>::from_csv_reader(bad_header.as_bytes()),
            Err(CurveError::Csv(_))
        ));
        let nonuniform = "t,x,y,z\n0,1,0,0\n1,0,1,0\n2,-1,0,0\n5,0,-1,0\n";
        assert!(matches!(
            ParamCurve::<f64>::from_csv_reader(nonuniform.as_bytes()),
            Err(CurveError::NonUniformSampling { .. })
        ));
    }
}
