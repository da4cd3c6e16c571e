//! Potentials of the planar loops (rectangle, stadium, ellipse) in their own
//! plane, axis profiles, and the pitchfork thresholds at which the center
//! of an elongating loop turns from a minimum into a maximum along `x`.
//!
//! Straight sides use the closed form
//! `∫ ds / √(s² + h²) = asinh(s₁/h) − asinh(s₀/h)`; curved pieces are
//! integrated with Gauss–Legendre panels graded toward the nearest point of
//! the curve.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::quadrature::{integrate_graded, periodic_trapezoid, GaussLegendre};
use crate::scalar::Real;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PlanarError {
    #[error("point ({x}, {y}) lies on the {shape} boundary")]
    Singular { shape: PlanarShape, x: f64, y: f64 },
    #[error("invalid aspect {aspect} for {shape}: {reason}")]
    InvalidAspect { shape: PlanarShape, aspect: f64, reason: &'static str },
    #[error("unknown planar shape `{0}` (expected rectangle, stadium or ellipse)")]
    UnknownShape(String),
    #[error("{shape} has no pitchfork threshold")]
    NoThreshold { shape: PlanarShape },
    #[error("no sign change of the center curvature on [{lo}, {hi}]")]
    NoSignChange { lo: f64, hi: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PlanarShape {
    Rectangle,
    Stadium,
    Ellipse,
}

impl PlanarShape {
    pub fn name(self) -> &'static str {
        match self {
            PlanarShape::Rectangle => "rectangle",
            PlanarShape::Stadium => "stadium",
            PlanarShape::Ellipse => "ellipse",
        }
    }

    /// Half-width of the shape along the x axis.
    pub fn half_width<T: Real>(self, a: T) -> T {
        match self {
            PlanarShape::Stadium => a + T::one(),
            _ => a,
        }
    }

    pub fn validate<T: Real>(self, a: T) -> Result<(), PlanarError> {
        let bad = |reason| PlanarError::InvalidAspect { shape: self, aspect: a.to_f64_lossy(), reason };
        if !a.is_finite() {
            return Err(bad("aspect must be finite"));
        }
        match self {
            PlanarShape::Stadium if !(a > T::zero()) => Err(bad("stadium half-length must be > 0")),
            PlanarShape::Rectangle | PlanarShape::Ellipse if !(a >= T::one()) => {
                Err(bad("aspect ratio must be >= 1"))
            }
            _ => Ok(()),
        }
    }
}

impl fmt::Display for PlanarShape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for PlanarShape {
    type Err = PlanarError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "rectangle" => Ok(PlanarShape::Rectangle),
            "stadium" => Ok(PlanarShape::Stadium),
            "ellipse" => Ok(PlanarShape::Ellipse),
            _ => Err(PlanarError::UnknownShape(s.to_string())),
        }
    }
}

/// Potential and its first two x-derivatives at a point of the x axis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AxisDerivatives<T> {
    pub phi: T,
    pub slope: T,
    pub curvature: T,
}

impl<T: Real> AxisDerivatives<T> {
    fn add(self, o: Self) -> Self {
        Self {
            phi: self.phi + o.phi,
            slope: self.slope + o.slope,
            curvature: self.curvature + o.curvature,
        }
    }
}

const SINGULAR: f64 = 1e-12;
const GL_ORDER: usize = 20;

/// `∫_{s0}^{s1} ds / √(s² + h²)` for a straight segment, `h ≥ 0` being the
/// perpendicular distance and `s` measured from the foot of the
/// perpendicular. `None` when the point lies on the segment.
pub fn segment_potential<T: Real>(s0: T, s1: T, h: T) -> Option<T> {
    let h = h.abs();
    if h > T::lit(SINGULAR) {
        return Some((s1 / h).asinh() - (s0 / h).asinh());
    }
    if s0 <= T::zero() && s1 >= T::zero() {
        return None;
    }
    // collinear but off the segment
    Some(if s0 > T::zero() { (s1 / s0).ln() } else { (s0 / s1).ln() })
}

// ---------------------------------------------------------------- rectangle

/// Potential at `(x, y)` of the rectangle with corners `(±a, ±1)`.
pub fn rectangle_potential<T: Real>(x: T, y: T, a: T) -> Result<T, PlanarError> {
    PlanarShape::Rectangle.validate(a)?;
    let one = T::one();
    let sides = [
        segment_potential(-a - x, a - x, one - y), // top
        segment_potential(-a - x, a - x, one + y), // bottom
        segment_potential(-one - y, one - y, a - x), // right
        segment_potential(-one - y, one - y, a + x), // left
    ];
    let mut total = T::zero();
    for s in sides {
        total += s.ok_or(PlanarError::Singular {
            shape: PlanarShape::Rectangle,
            x: x.to_f64_lossy(),
            y: y.to_f64_lossy(),
        })?;
    }
    Ok(total)
}

/// Two horizontal segments `y = ±h`, `x ∈ [−a, a]`, seen from `(x, 0)`.
fn horizontal_pair<T: Real>(x: T, a: T, h: T) -> AxisDerivatives<T> {
    let two = T::lit(2.0);
    let (p, m) = (a + x, a - x);
    let h2 = h * h;
    let rp = (h2 + p * p).sqrt();
    let rm = (h2 + m * m).sqrt();
    AxisDerivatives {
        phi: two * ((m / h).asinh() + (p / h).asinh()),
        slope: two * (T::one() / rp - T::one() / rm),
        curvature: -two * (m / (rm * rm * rm) + p / (rp * rp * rp)),
    }
}

/// Vertical side `x' = c`, `y' ∈ [−1, 1]`, seen from `(x, 0)`.
fn vertical_side<T: Real>(x: T, c: T) -> AxisDerivatives<T> {
    let two = T::lit(2.0);
    let u = (x - c).abs();
    let sign = (x - c).signum();
    let u2 = u * u;
    let q = (u2 + T::one()).sqrt();
    AxisDerivatives {
        phi: two * (T::one() / u).asinh(),
        slope: -two * sign / (u * q),
        curvature: two * (two * u2 + T::one()) / (u2 * q * q * q),
    }
}

/// Potential, slope and curvature of the rectangle potential along the x
/// axis, from the differentiated inverse-sinh closed form.
pub fn rectangle_axis<T: Real>(x: T, a: T) -> Result<AxisDerivatives<T>, PlanarError> {
    PlanarShape::Rectangle.validate(a)?;
    if (x.abs() - a).abs() < T::lit(SINGULAR) {
        return Err(PlanarError::Singular { shape: PlanarShape::Rectangle, x: x.to_f64_lossy(), y: 0.0 });
    }
    Ok(horizontal_pair(x, a, T::one())
        .add(vertical_side(x, a))
        .add(vertical_side(x, -a)))
}

/// The cubic whose positive root is the rectangle threshold:
/// `4 + 8a² − 4a³`. It equals `a²(1 + a²)^{3/2}` times the center
/// curvature of the rectangle potential.
pub fn rectangle_threshold_polynomial<T: Real>(a: T) -> T {
    T::lit(4.0) + T::lit(8.0) * a * a - T::lit(4.0) * a * a * a
}

/// Unique positive root of [`rectangle_threshold_polynomial`] by Newton's
/// method started to the right of the root, where the cubic is convex and
/// decreasing.
pub fn rectangle_polynomial_root<T: Real>() -> T {
    let mut a = T::lit(3.0);
    for _ in 0..100 {
        let f = rectangle_threshold_polynomial(a);
        let df = T::lit(16.0) * a - T::lit(12.0) * a * a;
        let step = f / df;
        a -= step;
        if step.abs() <= T::epsilon() * a {
            break;
        }
    }
    a
}

// ------------------------------------------------------------------ stadium

/// On-axis stadium potential with a flag for points outside the loop.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StadiumAxisValue<T> {
    pub phi: T,
    pub exterior: bool,
}

/// Integral over one unit semicircular cap centered at `(cx, 0)`. The cap
/// spans angles `[start, start + π]`; `focus`/`scale` steer the grading.
fn cap_axis<T: Real>(rule: &GaussLegendre<T>, x: T, cx: T, start: T, focus: T, scale: T) -> AxisDerivatives<T> {
    let three = T::lit(3.0);
    let end = start + T::PI();
    let kernel = |th: T, which: u8| {
        let (s, c) = th.sin_cos();
        let dx = x - cx - c;
        let dy = -s;
        let r2 = dx * dx + dy * dy;
        let r = r2.sqrt();
        match which {
            0 => T::one() / r,
            1 => -dx / (r2 * r),
            _ => (three * dx * dx - r2) / (r2 * r2 * r),
        }
    };
    AxisDerivatives {
        phi: integrate_graded(rule, start, end, focus, scale, |t| kernel(t, 0)),
        slope: integrate_graded(rule, start, end, focus, scale, |t| kernel(t, 1)),
        curvature: integrate_graded(rule, start, end, focus, scale, |t| kernel(t, 2)),
    }
}

/// Potential and derivatives along the x axis for the stadium with straight
/// half-length `a`: closed form for the straights, graded quadrature for the
/// caps.
pub fn stadium_axis<T: Real>(x: T, a: T) -> Result<AxisDerivatives<T>, PlanarError> {
    PlanarShape::Stadium.validate(a)?;
    let tip = a + T::one();
    if (x.abs() - tip).abs() < T::lit(SINGULAR) {
        return Err(PlanarError::Singular { shape: PlanarShape::Stadium, x: x.to_f64_lossy(), y: 0.0 });
    }
    let rule = GaussLegendre::new(GL_ORDER);
    let half_pi = T::FRAC_PI_2();
    let right_scale = (tip - x).abs().min(T::one());
    let left_scale = (tip + x).abs().min(T::one());
    let right = cap_axis(&rule, x, a, -half_pi, T::zero(), right_scale);
    let left = cap_axis(&rule, x, -a, half_pi, T::PI(), left_scale);
    Ok(horizontal_pair(x, a, T::one()).add(right).add(left))
}

pub fn stadium_potential_on_axis<T: Real>(x: T, a: T) -> Result<StadiumAxisValue<T>, PlanarError> {
    let d = stadium_axis(x, a)?;
    Ok(StadiumAxisValue { phi: d.phi, exterior: x.abs() >= a + T::one() })
}

/// Stadium potential at an arbitrary in-plane point `(x, y)`.
pub fn stadium_potential<T: Real>(x: T, y: T, a: T) -> Result<T, PlanarError> {
    PlanarShape::Stadium.validate(a)?;
    let one = T::one();
    let singular = || PlanarError::Singular { shape: PlanarShape::Stadium, x: x.to_f64_lossy(), y: y.to_f64_lossy() };
    let top = segment_potential(-a - x, a - x, one - y).ok_or_else(singular)?;
    let bottom = segment_potential(-a - x, a - x, one + y).ok_or_else(singular)?;
    let rule = GaussLegendre::new(GL_ORDER);
    let half_pi = T::FRAC_PI_2();
    let mut total = top + bottom;
    for (cx, start) in [(a, -half_pi), (-a, half_pi)] {
        let (dx, dy) = (x - cx, y);
        let rho = (dx * dx + dy * dy).sqrt();
        let mut focus = dy.atan2(dx);
        if focus < start {
            focus += T::two_pi();
        }
        let end = start + T::PI();
        let scale = if focus <= end {
            (rho - one).abs()
        } else {
            T::one()
        };
        if scale < T::lit(SINGULAR) {
            return Err(singular());
        }
        total += integrate_graded(&rule, start, end, focus, scale.min(one), |th| {
            let (s, c) = th.sin_cos();
            let ex = dx - c;
            let ey = dy - s;
            T::one() / (ex * ex + ey * ey).sqrt()
        });
    }
    Ok(total)
}

// ------------------------------------------------------------------ ellipse

/// Curvature `d²φ/dx²` at the center of the ellipse `(a cos t, sin t)`,
/// from the differentiated kernel `(3r_x² − |r|²)/|r|⁵ · |r'|` integrated by
/// the periodic trapezoid rule.
pub fn ellipse_d2phi_origin<T: Real>(a: T) -> T {
    let three = T::lit(3.0);
    periodic_trapezoid(4096, |t: T| {
        let (s, c) = t.sin_cos();
        let rx = a * c;
        let ry = s;
        let r2 = rx * rx + ry * ry;
        let speed = (a * a * s * s + c * c).sqrt();
        (three * rx * rx - r2) / (r2 * r2 * r2.sqrt()) * speed
    })
}

fn ellipse_kernel_integral<T: Real>(a: T, x: T, y: T, which: u8) -> T {
    let three = T::lit(3.0);
    let rule = GaussLegendre::new(GL_ORDER);
    // nearest point on the curve, by coarse search
    let mut best = (T::infinity(), T::zero());
    let m = 512;
    for j in 0..m {
        let t = T::two_pi() * T::from_usize_lossy(j) / T::from_usize_lossy(m);
        let (s, c) = t.sin_cos();
        let d2 = (x - a * c).powi(2) + (y - s).powi(2);
        if d2 < best.0 {
            best = (d2, t);
        }
    }
    let focus = best.1;
    let scale = best.0.sqrt().min(T::one());
    integrate_graded(&rule, focus - T::PI(), focus + T::PI(), focus, scale, |t| {
        let (s, c) = t.sin_cos();
        let dx = x - a * c;
        let dy = y - s;
        let r2 = dx * dx + dy * dy;
        let r = r2.sqrt();
        let speed = (a * a * s * s + c * c).sqrt();
        speed
            * match which {
                0 => T::one() / r,
                1 => -dx / (r2 * r),
                _ => (three * dx * dx - r2) / (r2 * r2 * r),
            }
    })
}

pub fn ellipse_axis<T: Real>(x: T, a: T) -> Result<AxisDerivatives<T>, PlanarError> {
    PlanarShape::Ellipse.validate(a)?;
    if (x.abs() - a).abs() < T::lit(SINGULAR) {
        return Err(PlanarError::Singular { shape: PlanarShape::Ellipse, x: x.to_f64_lossy(), y: 0.0 });
    }
    Ok(AxisDerivatives {
        phi: ellipse_kernel_integral(a, x, T::zero(), 0),
        slope: ellipse_kernel_integral(a, x, T::zero(), 1),
        curvature: ellipse_kernel_integral(a, x, T::zero(), 2),
    })
}

pub fn ellipse_potential<T: Real>(x: T, y: T, a: T) -> Result<T, PlanarError> {
    PlanarShape::Ellipse.validate(a)?;
    let u = x / a;
    if ((u * u + y * y).sqrt() - T::one()).abs() < T::lit(SINGULAR) {
        return Err(PlanarError::Singular { shape: PlanarShape::Ellipse, x: x.to_f64_lossy(), y: y.to_f64_lossy() });
    }
    Ok(ellipse_kernel_integral(a, x, y, 0))
}

// ---------------------------------------------------------------- dispatch

pub fn axis_derivatives<T: Real>(shape: PlanarShape, x: T, a: T) -> Result<AxisDerivatives<T>, PlanarError> {
    match shape {
        PlanarShape::Rectangle => rectangle_axis(x, a),
        PlanarShape::Stadium => stadium_axis(x, a),
        PlanarShape::Ellipse => ellipse_axis(x, a),
    }
}

pub fn planar_potential<T: Real>(shape: PlanarShape, x: T, y: T, a: T) -> Result<T, PlanarError> {
    match shape {
        PlanarShape::Rectangle => rectangle_potential(x, y, a),
        PlanarShape::Stadium => stadium_potential(x, y, a),
        PlanarShape::Ellipse => ellipse_potential(x, y, a),
    }
}

/// `d²φ/dx²` at the center.
pub fn d2phi_origin<T: Real>(shape: PlanarShape, a: T) -> Result<T, PlanarError> {
    match shape {
        PlanarShape::Ellipse => {
            shape.validate(a)?;
            Ok(ellipse_d2phi_origin(a))
        }
        _ => axis_derivatives(shape, T::zero(), a).map(|d| d.curvature),
    }
}

/// Potential sampled along the x axis inside the loop.
#[derive(Debug, Clone, Serialize)]
pub struct AxisProfile<T> {
    pub shape: PlanarShape,
    pub aspect: T,
    pub abscissae: Vec<T>,
    pub phi_values: Vec<T>,
    pub d2phi_origin: T,
}

/// `samples` points spanning 98% of the interior half-width on each side,
/// placed symmetrically about the center.
pub fn axis_profile<T: Real>(shape: PlanarShape, a: T, samples: usize) -> Result<AxisProfile<T>, PlanarError> {
    shape.validate(a)?;
    let samples = samples.max(3);
    let reach = shape.half_width(a) * T::lit(0.98);
    let denom = T::from_usize_lossy(samples - 1);
    let mut abscissae = vec![T::zero(); samples];
    for k in 0..samples / 2 {
        let x = -reach + T::lit(2.0) * reach * T::from_usize_lossy(k) / denom;
        abscissae[k] = x;
        abscissae[samples - 1 - k] = -x;
    }
    let phi_values = abscissae
        .iter()
        .map(|&x| axis_derivatives(shape, x, a).map(|d| d.phi))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(AxisProfile { shape, aspect: a, abscissae, phi_values, d2phi_origin: d2phi_origin(shape, a)? })
}

// -------------------------------------------------------------- thresholds

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BifurcationResult<T> {
    pub shape: PlanarShape,
    /// Aspect parameter at which the center curvature changes sign.
    pub threshold: T,
    /// Final bisection bracket, curvature of opposite signs at the ends.
    pub bracket: (T, T),
    /// Root of the closed-form cubic (rectangle only).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub polynomial_root: Option<T>,
    /// Aspect ratio of the loop at the threshold (`a` for the rectangle,
    /// `a + 1` for the stadium).
    pub aspect_ratio: T,
}

/// Bracket width at which threshold bisection stops.
pub const THRESHOLD_TOLERANCE: f64 = 1e-6;

/// Bisection on `f` over `[lo, hi]` until the bracket is narrower than `tol`.
pub fn bisect<T: Real>(
    mut f: impl FnMut(T) -> Result<T, PlanarError>,
    mut lo: T,
    mut hi: T,
    tol: T,
) -> Result<(T, T), PlanarError> {
    let mut flo = f(lo)?;
    let fhi = f(hi)?;
    if flo == T::zero() {
        return Ok((lo, lo));
    }
    if fhi == T::zero() {
        return Ok((hi, hi));
    }
    if flo.signum() == fhi.signum() {
        return Err(PlanarError::NoSignChange { lo: lo.to_f64_lossy(), hi: hi.to_f64_lossy() });
    }
    while hi - lo > tol {
        let mid = lo + (hi - lo) / T::lit(2.0);
        let fm = f(mid)?;
        if fm == T::zero() {
            return Ok((mid, mid));
        }
        if fm.signum() == flo.signum() {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    Ok((lo, hi))
}

pub fn rectangle_threshold<T: Real>() -> Result<BifurcationResult<T>, PlanarError> {
    let (lo, hi) = bisect(
        |a| rectangle_axis(T::zero(), a).map(|d| d.curvature),
        T::one(),
        T::lit(4.0),
        T::lit(THRESHOLD_TOLERANCE),
    )?;
    let threshold = (lo + hi) / T::lit(2.0);
    Ok(BifurcationResult {
        shape: PlanarShape::Rectangle,
        threshold,
        bracket: (lo, hi),
        polynomial_root: Some(rectangle_polynomial_root()),
        aspect_ratio: threshold,
    })
}

pub fn stadium_threshold<T: Real>() -> Result<BifurcationResult<T>, PlanarError> {
    let (lo, hi) = bisect(
        |a| stadium_axis(T::zero(), a).map(|d| d.curvature),
        T::lit(0.25),
        T::lit(4.0),
        T::lit(THRESHOLD_TOLERANCE),
    )?;
    let threshold = (lo + hi) / T::lit(2.0);
    Ok(BifurcationResult {
        shape: PlanarShape::Stadium,
        threshold,
        bracket: (lo, hi),
        polynomial_root: None,
        aspect_ratio: threshold + T::one(),
    })
}

pub fn bifurcation_threshold<T: Real>(shape: PlanarShape) -> Result<BifurcationResult<T>, PlanarError> {
    match shape {
        PlanarShape::Rectangle => rectangle_threshold(),
        PlanarShape::Stadium => stadium_threshold(),
        PlanarShape::Ellipse => Err(PlanarError::NoThreshold { shape }),
    }
}

// --------------------------------------------------------- critical points

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum AxisCriticalKind {
    Minimum,
    Maximum,
    Degenerate,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AxisCriticalPoint<T> {
    pub x: T,
    pub kind: AxisCriticalKind,
    pub curvature: T,
}

/// Bisection tolerance in `x` for axis critical points.
pub const CRITICAL_X_TOLERANCE: f64 = 1e-10;
const SCAN_POINTS: usize = 400;

fn classify<T: Real>(curvature: T, scale: T) -> AxisCriticalKind {
    if curvature.abs() <= T::lit(1e-12) * scale {
        AxisCriticalKind::Degenerate
    } else if curvature > T::zero() {
        AxisCriticalKind::Minimum
    } else {
        AxisCriticalKind::Maximum
    }
}

/// Critical points of the axis profile inside the loop, sorted by `x`.
///
/// The center is critical by symmetry. Off-center points are found as sign
/// changes of the slope on a grid over `(0, L)` (with `L` the interior
/// half-width), refined by bisection, and mirrored to `x < 0`. Scanning from
/// just right of the center keeps the symmetric pair visible however close
/// it sits to the center near the threshold.
pub fn planar_critical_points<T: Real>(shape: PlanarShape, a: T) -> Result<Vec<AxisCriticalPoint<T>>, PlanarError> {
    shape.validate(a)?;
    let half = shape.half_width(a);
    let center = d2phi_origin(shape, a)?;
    let scale = axis_derivatives(shape, half * T::lit(0.5), a)?.curvature.abs().max(center.abs());
    let mut out = vec![AxisCriticalPoint { x: T::zero(), kind: classify(center, scale), curvature: center }];

    let start = half * T::lit(1e-7);
    let stop = half * (T::one() - T::lit(1e-4));
    let slope = |x: T| axis_derivatives(shape, x, a).map(|d| d.slope);
    let mut xs = Vec::with_capacity(SCAN_POINTS + 1);
    for k in 0..=SCAN_POINTS {
        // quadratic spacing resolves the neighbourhood of the center
        let u = T::from_usize_lossy(k) / T::from_usize_lossy(SCAN_POINTS);
        xs.push(start + (stop - start) * u * u);
    }
    let mut prev_x = xs[0];
    let mut prev = slope(prev_x)?;
    let mut positive = Vec::new();
    for &x in &xs[1..] {
        let s = slope(x)?;
        if s == T::zero() || s.signum() != prev.signum() {
            let (lo, hi) = bisect(slope, prev_x, x, T::lit(CRITICAL_X_TOLERANCE))?;
            let root = (lo + hi) / T::lit(2.0);
            let curv = axis_derivatives(shape, root, a)?.curvature;
            positive.push(AxisCriticalPoint { x: root, kind: classify(curv, scale), curvature: curv });
        }
        prev_x = x;
        prev = s;
    }
    for p in &positive {
        out.push(AxisCriticalPoint { x: -p.x, ..*p });
        out.push(*p);
    }
    out.sort_by(|p, q| p.x.partial_cmp(&q.x).unwrap());
    Ok(out)
}

/// Potential on an `m × m` grid covering the loop with a margin; points on
/// the curve come back as NaN.
pub fn contour_grid<T: Real>(shape: PlanarShape, a: T, m: usize) -> Result<Vec<(T, T, T)>, PlanarError> {
    shape.validate(a)?;
    let m = m.max(2);
    let margin = T::lit(0.5);
    let xr = shape.half_width(a) + margin;
    let yr = T::one() + margin;
    let denom = T::from_usize_lossy(m - 1);
    let mut out = Vec::with_capacity(m * m);
    for j in 0..m {
        let y = -yr + T::lit(2.0) * yr * T::from_usize_lossy(j) / denom;
        for i in 0..m {
            let x = -xr + T::lit(2.0) * xr * T::from_usize_lossy(i) / denom;
            let phi = match planar_potential(shape, x, y, a) {
                Ok(v) => v,
                Err(PlanarError::Singular { .. }) => T::nan(),
                Err(e) => return Err(e),
            };
            out.push((x, y, phi));
        }
    }
    Ok(out)
}
