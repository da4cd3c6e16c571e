//! Three-dimensional vectors and symmetric 3×3 matrices.

use std::ops::{Add, AddAssign, Index, Mul, Neg, Sub, SubAssign};

use serde::{Deserialize, Serialize};

use crate::scalar::Real;

/// Point or displacement in 3-space.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(from = "[T; 3]", into = "[T; 3]")]
#[serde(bound(serialize = "T: Serialize + Copy", deserialize = "T: Deserialize<'de>"))]
pub struct Vec3<T> {
    pub x: T,
    pub y: T,
    pub z: T,
}

impl<T> From<[T; 3]> for Vec3<T> {
    fn from([x, y, z]: [T; 3]) -> Self {
        Self { x, y, z }
    }
}

impl<T> From<Vec3<T>> for [T; 3] {
    fn from(v: Vec3<T>) -> Self {
        [v.x, v.y, v.z]
    }
}

impl<T: Real> Vec3<T> {
    pub const fn new(x: T, y: T, z: T) -> Self {
        Self { x, y, z }
    }

    pub fn zero() -> Self {
        Self::new(T::zero(), T::zero(), T::zero())
    }

    pub fn splat(v: T) -> Self {
        Self::new(v, v, v)
    }

    pub fn dot(self, o: Self) -> T {
        self.x * o.x + self.y * o.y + self.z * o.z
    }

    pub fn cross(self, o: Self) -> Self {
        Self::new(
            self.y * o.z - self.z * o.y,
            self.z * o.x - self.x * o.z,
            self.x * o.y - self.y * o.x,
        )
    }

    pub fn norm_squared(self) -> T {
        self.dot(self)
    }

    pub fn norm(self) -> T {
        self.norm_squared().sqrt()
    }

    pub fn scale(self, s: T) -> Self {
        Self::new(self.x * s, self.y * s, self.z * s)
    }

    pub fn component_min(self, o: Self) -> Self {
        Self::new(self.x.min(o.x), self.y.min(o.y), self.z.min(o.z))
    }

    pub fn component_max(self, o: Self) -> Self {
        Self::new(self.x.max(o.x), self.y.max(o.y), self.z.max(o.z))
    }

    pub fn max_abs(self) -> T {
        self.x.abs().max(self.y.abs()).max(self.z.abs())
    }

    pub fn to_array(self) -> [T; 3] {
        [self.x, self.y, self.z]
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite() && self.z.is_finite()
    }

    pub fn map(self, f: impl Fn(T) -> T) -> Self {
        Self::new(f(self.x), f(self.y), f(self.z))
    }

    /// Rotation about the z axis by `angle` radians.
    pub fn rotate_z(self, angle: T) -> Self {
        let (s, c) = angle.sin_cos();
        Self::new(c * self.x - s * self.y, s * self.x + c * self.y, self.z)
    }
}

impl<T> Index<usize> for Vec3<T> {
    type Output = T;
    fn index(&self, i: usize) -> &T {
        match i {
            0 => &self.x,
            1 => &self.y,
            2 => &self.z,
            _ => panic!("Vec3 index {i} out of range"),
        }
    }
}

impl<T: Real> Add for Vec3<T> {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Self::new(self.x + o.x, self.y + o.y, self.z + o.z)
    }
}

impl<T: Real> AddAssign for Vec3<T> {
    fn add_assign(&mut self, o: Self) {
        self.x += o.x;
        self.y += o.y;
        self.z += o.z;
    }
}

impl<T: Real> Sub for Vec3<T> {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Self::new(self.x - o.x, self.y - o.y, self.z - o.z)
    }
}

impl<T: Real> SubAssign for Vec3<T> {
    fn sub_assign(&mut self, o: Self) {
        self.x -= o.x;
        self.y -= o.y;
        self.z -= o.z;
    }
}

impl<T: Real> Neg for Vec3<T> {
    type Output = Self;
    fn neg(self) -> Self {
        Self::new(-self.x, -self.y, -self.z)
    }
}

impl<T: Real> Mul<T> for Vec3<T> {
    type Output = Self;
    fn mul(self, s: T) -> Self {
        self.scale(s)
    }
}

/// Symmetric 3×3 matrix stored as its upper triangle.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Sym3<T> {
    pub xx: T,
    pub xy: T,
    pub xz: T,
    pub yy: T,
    pub yz: T,
    pub zz: T,
}

impl<T: Real> Sym3<T> {
    pub fn zero() -> Self {
        let z = T::zero();
        Self { xx: z, xy: z, xz: z, yy: z, yz: z, zz: z }
    }

    pub fn identity() -> Self {
        let (o, z) = (T::one(), T::zero());
        Self { xx: o, xy: z, xz: z, yy: o, yz: z, zz: o }
    }

    pub fn diagonal(a: T, b: T, c: T) -> Self {
        let z = T::zero();
        Self { xx: a, xy: z, xz: z, yy: b, yz: z, zz: c }
    }

    pub fn get(&self, i: usize, j: usize) -> T {
        match (i.min(j), i.max(j)) {
            (0, 0) => self.xx,
            (0, 1) => self.xy,
            (0, 2) => self.xz,
            (1, 1) => self.yy,
            (1, 2) => self.yz,
            (2, 2) => self.zz,
            _ => panic!("Sym3 index ({i}, {j}) out of range"),
        }
    }

    pub fn to_rows(&self) -> [[T; 3]; 3] {
        [
            [self.xx, self.xy, self.xz],
            [self.xy, self.yy, self.yz],
            [self.xz, self.yz, self.zz],
        ]
    }

    pub fn trace(&self) -> T {
        self.xx + self.yy + self.zz
    }

    /// Frobenius norm.
    pub fn norm(&self) -> T {
        let two = T::lit(2.0);
        (self.xx * self.xx
            + self.yy * self.yy
            + self.zz * self.zz
            + two * (self.xy * self.xy + self.xz * self.xz + self.yz * self.yz))
            .sqrt()
    }

    pub fn mul_vec(&self, v: Vec3<T>) -> Vec3<T> {
        Vec3::new(
            self.xx * v.x + self.xy * v.y + self.xz * v.z,
            self.xy * v.x + self.yy * v.y + self.yz * v.z,
            self.xz * v.x + self.yz * v.y + self.zz * v.z,
        )
    }

    pub fn scale(&self, s: T) -> Self {
        Self {
            xx: self.xx * s,
            xy: self.xy * s,
            xz: self.xz * s,
            yy: self.yy * s,
            yz: self.yz * s,
            zz: self.zz * s,
        }
    }

    /// `a·aᵀ` for a column vector `a`.
    pub fn outer(a: Vec3<T>) -> Self {
        Self {
            xx: a.x * a.x,
            xy: a.x * a.y,
            xz: a.x * a.z,
            yy: a.y * a.y,
            yz: a.y * a.z,
            zz: a.z * a.z,
        }
    }

    /// Solves `self · x = b` by Gaussian elimination with partial pivoting.
    /// Returns `None` when a pivot vanishes.
    pub fn solve(&self, b: Vec3<T>) -> Option<Vec3<T>> {
        let mut m = self.to_rows();
        let mut rhs = b.to_array();
        for col in 0..3 {
            let pivot = (col..3)
                .max_by(|&i, &j| m[i][col].abs().partial_cmp(&m[j][col].abs()).unwrap())
                .unwrap();
            if m[pivot][col] == T::zero() || !m[pivot][col].is_finite() {
                return None;
            }
            m.swap(col, pivot);
            rhs.swap(col, pivot);
            for row in col + 1..3 {
                let f = m[row][col] / m[col][col];
                for k in col..3 {
                    let v = m[col][k];
                    m[row][k] -= f * v;
                }
                let r = rhs[col];
                rhs[row] -= f * r;
            }
        }
        let mut x = [T::zero(); 3];
        for row in (0..3).rev() {
            let mut acc = rhs[row];
            for k in row + 1..3 {
                acc -= m[row][k] * x[k];
            }
            x[row] = acc / m[row][row];
        }
        let out = Vec3::from(x);
        out.is_finite().then_some(out)
    }

    /// Eigenvalues sorted ascending, by cyclic Jacobi rotations.
    pub fn eigenvalues(&self) -> [T; 3] {
        let mut a = self.to_rows();
        let scale = self.norm();
        if scale == T::zero() {
            return [T::zero(); 3];
        }
        let eps = T::epsilon() * scale;
        for _sweep in 0..64 {
            let off = (a[0][1] * a[0][1] + a[0][2] * a[0][2] + a[1][2] * a[1][2]).sqrt();
            if off <= eps {
                break;
            }
            for (p, q) in [(0usize, 1usize), (0, 2), (1, 2)] {
                if a[p][q] == T::zero() {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (T::lit(2.0) * a[p][q]);
                let t = theta.signum() / (theta.abs() + (theta * theta + T::one()).sqrt());
                let c = T::one() / (t * t + T::one()).sqrt();
                let s = t * c;
                for k in 0..3 {
                    let akp = a[k][p];
                    let akq = a[k][q];
                    a[k][p] = c * akp - s * akq;
                    a[k][q] = s * akp + c * akq;
                }
                for k in 0..3 {
                    let apk = a[p][k];
                    let aqk = a[q][k];
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
            }
        }
        let mut ev = [a[0][0], a[1][1], a[2][2]];
        ev.sort_by(|x, y| x.partial_cmp(y).unwrap_or(std::cmp::Ordering::Equal));
        ev
    }

    /// 2-norm condition number `max|λ| / min|λ|`; infinite when singular.
    pub fn condition(&self) -> T {
        let ev = self.eigenvalues();
        let mut lo = T::infinity();
        let mut hi = T::zero();
        for e in ev {
            lo = lo.min(e.abs());
            hi = hi.max(e.abs());
        }
        if lo == T::zero() {
            T::infinity()
        } else {
            hi / lo
        }
    }
}

impl<T: Real + Serialize> Serialize for Sym3<T> {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        self.to_rows().serialize(serializer)
    }
}

impl<T: Real> Add for Sym3<T> {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Self {
            xx: self.xx + o.xx,
            xy: self.xy + o.xy,
            xz: self.xz + o.xz,
            yy: self.yy + o.yy,
            yz: self.yz + o.yz,
            zz: self.zz + o.zz,
        }
    }
}

impl<T: Real> AddAssign for Sym3<T> {
    fn add_assign(&mut self, o: Self) {
        *self = *self + o;
    }
}

impl<T: Real> Sub for Sym3<T> {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        self + o.scale(-T::one())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn solve_recovers_known_solution() {
        let m = Sym3 { xx: 4.0, xy: 1.0, xz: -2.0, yy: 3.0, yz: 0.5, zz: 5.0 };
        let x = Vec3::new(1.0, -2.0, 0.25);
        let b = m.mul_vec(x);
        let got = m.solve(b).unwrap();
        assert!((got - x).norm() < 1e-14);
    }

    #[test]
    fn solve_reports_singular() {
        let m = Sym3 { xx: 1.0, xy: 1.0, xz: 0.0, yy: 1.0, yz: 0.0, zz: 0.0 };
        assert!(m.solve(Vec3::new(1.0, 1.0, 1.0)).is_none());
    }

    #[test]
    fn eigenvalues_of_diagonal_and_rotated() {
        let d = Sym3::diagonal(3.0, -1.0, 2.0);
        assert_eq!(d.eigenvalues(), [-1.0, 2.0, 3.0]);

        // [[2,1,0],[1,2,0],[0,0,5]] has eigenvalues 1, 3, 5.
        let m: Sym3<f64> = Sym3 { xx: 2.0, xy: 1.0, xz: 0.0, yy: 2.0, yz: 0.0, zz: 5.0 };
        let ev = m.eigenvalues();
        for (a, b) in ev.iter().zip([1.0, 3.0, 5.0]) {
            assert!((a - b).abs() < 1e-13, "{ev:?}");
        }
    }

    #[test]
    fn eigenvalues_match_trace_and_determinant() {
        let m = Sym3 { xx: 1.5, xy: -0.3, xz: 0.7, yy: -2.0, yz: 1.1, zz: 0.4 };
        let ev = m.eigenvalues();
        let r = m.to_rows();
        let det = r[0][0] * (r[1][1] * r[2][2] - r[1][2] * r[2][1])
            - r[0][1] * (r[1][0] * r[2][2] - r[1][2] * r[2][0])
            + r[0][2] * (r[1][0] * r[2][1] - r[1][1] * r[2][0]);
        assert!((ev.iter().sum::<f64>() - m.trace()).abs() < 1e-13);
        assert!((ev.iter().product::<f64>() - det).abs() < 1e-13);
    }

    #[test]
    fn works_in_single_precision() {
        let m: Sym3<f32> = Sym3::diagonal(1.0, 2.0, 4.0);
        assert_eq!(m.condition(), 4.0);
    }
}
