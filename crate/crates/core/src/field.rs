//! Direct-summation potential, field and Hessian of a point-charge loop.
//!
//! With `d_j = x − p_j` and weights `w_j`:
//!
//! ```text
//! φ(x) = Σ w_j / |d_j|
//! E(x) = −∇φ = Σ w_j d_j / |d_j|³
//! H(x) = ∇∇φ = Σ w_j (3 d_j d_jᵀ − |d_j|² I) / |d_j|⁵
//! ```
//!
//! These are the exact derivatives of the discrete sum, so Newton's method on
//! `E = 0` converges quadratically on the discrete model. Every sum runs over
//! the charges in index order, which keeps grid results independent of how
//! the points are split across threads.

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::curve::ChargeDiscretization;
use crate::linalg::{Sym3, Vec3};
use crate::scalar::Real;

/// Points closer than this to a charge are treated as singular.
pub const SINGULAR_DISTANCE: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FieldError {
    #[error("evaluation point lies on charge sample {index} (distance {distance:e})")]
    Singular { index: usize, distance: f64 },
    #[error("far-field radius {radius} must exceed 10x the bounding radius {bounding}")]
    RadiusTooSmall { radius: f64, bounding: f64 },
}

/// Potential, field and Hessian at one point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(bound(serialize = "T: Real + Serialize"))]
pub struct FieldEval<T> {
    pub point: Vec3<T>,
    pub phi: T,
    #[serde(rename = "E")]
    pub e: Vec3<T>,
    #[serde(rename = "H")]
    pub h: Sym3<T>,
}

#[inline]
fn singular<T: Real>(index: usize, r2: T) -> FieldError {
    FieldError::Singular { index, distance: r2.sqrt().to_f64_lossy() }
}

#[inline]
fn threshold<T: Real>() -> T {
    T::lit(SINGULAR_DISTANCE * SINGULAR_DISTANCE)
}

/// `Σ w_j / |x − p_j|`.
pub fn potential<T: Real>(charges: &ChargeDiscretization<T>, x: Vec3<T>) -> Result<T, FieldError> {
    let eps2 = threshold::<T>();
    let mut phi = T::zero();
    for (j, (&p, &w)) in charges.points.iter().zip(&charges.weights).enumerate() {
        let d = x - p;
        let r2 = d.norm_squared();
        if r2 < eps2 {
            return Err(singular(j, r2));
        }
        phi += w / r2.sqrt();
    }
    Ok(phi)
}

/// `E = Σ w_j d_j / |d_j|³`.
pub fn field<T: Real>(charges: &ChargeDiscretization<T>, x: Vec3<T>) -> Result<Vec3<T>, FieldError> {
    potential_and_field(charges, x).map(|(_, e)| e)
}

pub fn potential_and_field<T: Real>(
    charges: &ChargeDiscretization<T>,
    x: Vec3<T>,
) -> Result<(T, Vec3<T>), FieldError> {
    let eps2 = threshold::<T>();
    let mut phi = T::zero();
    let mut e = Vec3::zero();
    for (j, (&p, &w)) in charges.points.iter().zip(&charges.weights).enumerate() {
        let d = x - p;
        let r2 = d.norm_squared();
        if r2 < eps2 {
            return Err(singular(j, r2));
        }
        let inv_r = T::one() / r2.sqrt();
        let wr = w * inv_r;
        phi += wr;
        e += d.scale(wr * inv_r * inv_r);
    }
    Ok((phi, e))
}

/// Hessian of `φ`: `Σ w_j (3 d dᵀ − |d|² I) / |d|⁵`.
pub fn hessian<T: Real>(charges: &ChargeDiscretization<T>, x: Vec3<T>) -> Result<Sym3<T>, FieldError> {
    evaluate(charges, x).map(|ev| ev.h)
}

/// Potential, field and Hessian in a single pass over the charges.
pub fn evaluate<T: Real>(charges: &ChargeDiscretization<T>, x: Vec3<T>) -> Result<FieldEval<T>, FieldError> {
    let eps2 = threshold::<T>();
    let three = T::lit(3.0);
    let mut phi = T::zero();
    let mut e = Vec3::zero();
    let mut h = Sym3::zero();
    for (j, (&p, &w)) in charges.points.iter().zip(&charges.weights).enumerate() {
        let d = x - p;
        let r2 = d.norm_squared();
        if r2 < eps2 {
            return Err(singular(j, r2));
        }
        let inv_r = T::one() / r2.sqrt();
        let inv_r2 = inv_r * inv_r;
        let wr = w * inv_r;
        let wr3 = wr * inv_r2;
        let wr5 = wr3 * inv_r2;
        phi += wr;
        e += d.scale(wr3);
        let t = three * wr5;
        h.xx += t * d.x * d.x - wr3;
        h.yy += t * d.y * d.y - wr3;
        h.zz += t * d.z * d.z - wr3;
        h.xy += t * d.x * d.y;
        h.xz += t * d.x * d.z;
        h.yz += t * d.y * d.z;
    }
    Ok(FieldEval { point: x, phi, e, h })
}

/// Potential at every point, evaluated in parallel.
pub fn potential_batch<T: Real>(
    charges: &ChargeDiscretization<T>,
    points: &[Vec3<T>],
) -> Result<Vec<T>, FieldError> {
    points.par_iter().map(|&x| potential(charges, x)).collect()
}

/// Field at every point, evaluated in parallel.
pub fn field_batch<T: Real>(
    charges: &ChargeDiscretization<T>,
    points: &[Vec3<T>],
) -> Result<Vec<Vec3<T>>, FieldError> {
    points.par_iter().map(|&x| field(charges, x)).collect()
}

/// Full evaluation at every point, in parallel.
pub fn evaluate_batch<T: Real>(
    charges: &ChargeDiscretization<T>,
    points: &[Vec3<T>],
) -> Result<Vec<FieldEval<T>>, FieldError> {
    points.par_iter().map(|&x| evaluate(charges, x)).collect()
}

/// Unit vectors spread over the sphere (Fibonacci lattice).
pub fn sphere_directions<T: Real>(count: usize) -> Vec<Vec3<T>> {
    let golden = std::f64::consts::PI * (3.0 - 5f64.sqrt());
    (0..count)
        .map(|i| {
            let z = 1.0 - 2.0 * (i as f64 + 0.5) / count as f64;
            let rho = (1.0 - z * z).sqrt();
            let th = golden * i as f64;
            Vec3::new(T::lit(rho * th.cos()), T::lit(rho * th.sin()), T::lit(z))
        })
        .collect()
}

/// Worst relative deviation of `φ(R û)·R` from the total charge over
/// sampled directions `û`: how far the loop is from looking like a point
/// charge at distance `R`.
pub fn far_field_check<T: Real>(charges: &ChargeDiscretization<T>, radius: T) -> Result<T, FieldError> {
    let bounding = charges.bounding_radius();
    if !(radius > T::lit(10.0) * bounding) {
        return Err(FieldError::RadiusTooSmall {
            radius: radius.to_f64_lossy(),
            bounding: bounding.to_f64_lossy(),
        });
    }
    let q = charges.total_charge;
    let mut worst = T::zero();
    for u in sphere_directions::<T>(256) {
        let phi = potential(charges, u.scale(radius))?;
        worst = worst.max((phi * radius - q).abs() / q);
    }
    Ok(worst)
}
