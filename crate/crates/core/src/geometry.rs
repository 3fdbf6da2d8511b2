//! Signed inner product, constraint manifold and planar maps.
//!
//! Points live in ℝ⁴. For `σ = +1` the manifold is the unit sphere
//! `x₁² + x₂² + x₃² + x₄² = 1`; for `σ = −1` it is the upper sheet of the
//! hyperboloid `x₁² + x₂² + x₃² − x₄² = −1, x₄ > 0`.

use core::ops::{Add, AddAssign, Index, IndexMut, Mul, Neg, Sub};
#[allow(unused_imports)] // shadowed by inherent methods when std is linked
use num_traits::Float;

use crate::error::{Error, Result};

/// Sign of the curvature. Only `+1` and `−1` exist.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(try_from = "i32", into = "i32"))]
pub enum CurvatureSign {
    /// Unit 3-sphere.
    Positive,
    /// Upper sheet of the unit 3-hyperboloid.
    Negative,
}

impl CurvatureSign {
    #[inline]
    pub fn value(self) -> f64 {
        match self {
            CurvatureSign::Positive => 1.0,
            CurvatureSign::Negative => -1.0,
        }
    }

    pub fn from_int(sigma: i32) -> Result<Self> {
        match sigma {
            1 => Ok(CurvatureSign::Positive),
            -1 => Ok(CurvatureSign::Negative),
            _ => Err(Error::InvalidInput(alloc::format!(
                "curvature sign must be +1 or -1, got {sigma}"
            ))),
        }
    }
}

impl TryFrom<i32> for CurvatureSign {
    type Error = Error;

    fn try_from(sigma: i32) -> Result<Self> {
        Self::from_int(sigma)
    }
}

impl From<CurvatureSign> for i32 {
    fn from(s: CurvatureSign) -> i32 {
        match s {
            CurvatureSign::Positive => 1,
            CurvatureSign::Negative => -1,
        }
    }
}

/// A point or tangent vector of ℝ⁴.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Vec4(pub [f64; 4]);

impl Vec4 {
    pub const ZERO: Vec4 = Vec4([0.0; 4]);

    #[inline]
    pub const fn new(x1: f64, x2: f64, x3: f64, x4: f64) -> Self {
        Vec4([x1, x2, x3, x4])
    }

    #[inline]
    pub fn dot_sigma(&self, other: &Vec4, sigma: CurvatureSign) -> f64 {
        dot_sigma(self, other, sigma)
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|x| x.is_finite())
    }

    /// Largest absolute componentwise difference.
    pub fn max_abs_diff(&self, other: &Vec4) -> f64 {
        self.0
            .iter()
            .zip(other.0.iter())
            .fold(0.0, |m, (a, b)| m.max((a - b).abs()))
    }
}

impl Index<usize> for Vec4 {
    type Output = f64;
    #[inline]
    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

impl IndexMut<usize> for Vec4 {
    #[inline]
    fn index_mut(&mut self, i: usize) -> &mut f64 {
        &mut self.0[i]
    }
}

impl Add for Vec4 {
    type Output = Vec4;
    #[inline]
    fn add(self, o: Vec4) -> Vec4 {
        Vec4([self[0] + o[0], self[1] + o[1], self[2] + o[2], self[3] + o[3]])
    }
}

impl AddAssign for Vec4 {
    #[inline]
    fn add_assign(&mut self, o: Vec4) {
        *self = *self + o;
    }
}

impl Sub for Vec4 {
    type Output = Vec4;
    #[inline]
    fn sub(self, o: Vec4) -> Vec4 {
        Vec4([self[0] - o[0], self[1] - o[1], self[2] - o[2], self[3] - o[3]])
    }
}

impl Mul<f64> for Vec4 {
    type Output = Vec4;
    #[inline]
    fn mul(self, s: f64) -> Vec4 {
        Vec4([self[0] * s, self[1] * s, self[2] * s, self[3] * s])
    }
}

impl Neg for Vec4 {
    type Output = Vec4;
    #[inline]
    fn neg(self) -> Vec4 {
        self * -1.0
    }
}

/// `x₁y₁ + x₂y₂ + x₃y₃ + σx₄y₄`.
#[inline]
pub fn dot_sigma(x: &Vec4, y: &Vec4, sigma: CurvatureSign) -> f64 {
    x[0] * y[0] + x[1] * y[1] + x[2] * y[2] + sigma.value() * x[3] * y[3]
}

/// Row-major 2×2 real matrix.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Mat2(pub [[f64; 2]; 2]);

impl Mat2 {
    pub const IDENTITY: Mat2 = Mat2([[1.0, 0.0], [0.0, 1.0]]);

    pub fn det(&self) -> f64 {
        let m = &self.0;
        m[0][0] * m[1][1] - m[0][1] * m[1][0]
    }

    pub fn apply(&self, v: [f64; 2]) -> [f64; 2] {
        let m = &self.0;
        [m[0][0] * v[0] + m[0][1] * v[1], m[1][0] * v[0] + m[1][1] * v[1]]
    }

    pub fn max_abs_diff(&self, other: &Mat2) -> f64 {
        let mut d: f64 = 0.0;
        for r in 0..2 {
            for c in 0..2 {
                d = d.max((self.0[r][c] - other.0[r][c]).abs());
            }
        }
        d
    }
}

impl Mul for Mat2 {
    type Output = Mat2;
    fn mul(self, o: Mat2) -> Mat2 {
        let (a, b) = (&self.0, &o.0);
        Mat2([
            [
                a[0][0] * b[0][0] + a[0][1] * b[1][0],
                a[0][0] * b[0][1] + a[0][1] * b[1][1],
            ],
            [
                a[1][0] * b[0][0] + a[1][1] * b[1][0],
                a[1][0] * b[0][1] + a[1][1] * b[1][1],
            ],
        ])
    }
}

/// Planar rotation by `x`.
pub fn rot_t(x: f64) -> Mat2 {
    let (s, c) = x.sin_cos();
    Mat2([[c, -s], [s, c]])
}

/// Hyperbolic rotation (boost) by `x`.
pub fn boost_s(x: f64) -> Mat2 {
    let (s, c) = (x.sinh(), x.cosh());
    Mat2([[c, s], [s, c]])
}

/// Rescales `q` onto the manifold along its ray through the origin.
///
/// For `σ = −1` the point must be timelike (`q·q < 0`) and on the upper
/// sheet (`q₄ > 0`).
pub fn project_position(q: &Vec4, sigma: CurvatureSign) -> Result<Vec4> {
    let n2 = dot_sigma(q, q, sigma);
    match sigma {
        CurvatureSign::Positive => {
            if !(n2 > 0.0) {
                return Err(Error::NotProjectable("zero vector on the sphere"));
            }
            Ok(*q * n2.sqrt().recip())
        }
        CurvatureSign::Negative => {
            if !(n2 < 0.0) {
                return Err(Error::NotProjectable("vector is not timelike"));
            }
            if !(q[3] > 0.0) {
                return Err(Error::NotProjectable("vector is not on the upper sheet"));
            }
            Ok(*q * (-n2).sqrt().recip())
        }
    }
}

/// Removes the normal component of `v` at `q`.
pub fn project_velocity(q: &Vec4, v: &Vec4, sigma: CurvatureSign) -> Vec4 {
    let s = sigma.value();
    *v - *q * (s * dot_sigma(q, v, sigma))
}

/// Element of Λ²ℝ⁴ with components ordered (12, 13, 14, 23, 24, 34).
#[derive(Clone, Copy, Debug, Default, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Bivector(pub [f64; 6]);

impl Bivector {
    /// Zero-based coordinate pairs in storage order.
    pub const PAIRS: [(usize, usize); 6] = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)];

    pub const ZERO: Bivector = Bivector([0.0; 6]);

    /// `a ∧ b`.
    pub fn wedge(a: &Vec4, b: &Vec4) -> Bivector {
        let mut out = [0.0; 6];
        for (k, &(i, j)) in Self::PAIRS.iter().enumerate() {
            out[k] = a[i] * b[j] - a[j] * b[i];
        }
        Bivector(out)
    }

    /// Component on `e_a ∧ e_b` for zero-based `a`, `b`.
    pub fn get(&self, a: usize, b: usize) -> f64 {
        if a == b {
            return 0.0;
        }
        let (lo, hi, sign) = if a < b { (a, b, 1.0) } else { (b, a, -1.0) };
        let k = Self::PAIRS
            .iter()
            .position(|&p| p == (lo, hi))
            .expect("indices below 4");
        sign * self.0[k]
    }

    pub fn max_abs(&self) -> f64 {
        self.0.iter().fold(0.0, |m: f64, x| m.max(x.abs()))
    }
}

impl Add for Bivector {
    type Output = Bivector;
    fn add(mut self, o: Bivector) -> Bivector {
        for (a, b) in self.0.iter_mut().zip(o.0) {
            *a += b;
        }
        self
    }
}

impl Mul<f64> for Bivector {
    type Output = Bivector;
    fn mul(mut self, s: f64) -> Bivector {
        for a in self.0.iter_mut() {
            *a *= s;
        }
        self
    }
}

/// `Σᵢ mᵢ qᵢ ∧ vᵢ`.
pub fn wedge_bivector(positions: &[Vec4], velocities: &[Vec4], masses: &[f64]) -> Result<Bivector> {
    let n = positions.len();
    for got in [velocities.len(), masses.len()] {
        if got != n {
            return Err(Error::LengthMismatch { expected: n, got });
        }
    }
    Ok(positions
        .iter()
        .zip(velocities)
        .zip(masses)
        .fold(Bivector::ZERO, |acc, ((q, v), &m)| acc + Bivector::wedge(q, v) * m))
}
