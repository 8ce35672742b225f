use std::ops::{Deref, DerefMut};

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{invalid, Error, Result};
use crate::MAX_DIM;

/// A point (or vector) in `R^d`, `1 <= d <= MAX_DIM`, stored inline.
#[derive(Clone, Copy)]
pub struct Point {
    dim: u8,
    c: [f64; MAX_DIM],
}

impl Point {
    /// Checked constructor: coordinates must be finite and `1 <= d <= MAX_DIM`.
    pub fn new(coords: &[f64]) -> Result<Self> {
        let d = coords.len();
        if !(1..=MAX_DIM).contains(&d) {
            return Err(Error::UnsupportedDimension(d));
        }
        if coords.iter().any(|x| !x.is_finite()) {
            return Err(invalid("point coordinates must be finite"));
        }
        let mut c = [0.0; MAX_DIM];
        c[..d].copy_from_slice(coords);
        Ok(Point { dim: d as u8, c })
    }

    pub fn zeros(d: usize) -> Self {
        assert!((1..=MAX_DIM).contains(&d), "dimension {d} out of range");
        Point {
            dim: d as u8,
            c: [0.0; MAX_DIM],
        }
    }

    /// The `i`-th standard basis vector of `R^d`.
    pub fn axis(d: usize, i: usize) -> Self {
        let mut p = Self::zeros(d);
        p.c[i] = 1.0;
        p
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim as usize
    }

    #[inline]
    pub fn coords(&self) -> &[f64] {
        &self.c[..self.dim as usize]
    }

    #[inline]
    pub fn dot(&self, other: &Point) -> f64 {
        debug_assert_eq!(self.dim, other.dim);
        let mut s = 0.0;
        for i in 0..self.dim() {
            s += self.c[i] * other.c[i];
        }
        s
    }

    #[inline]
    pub fn norm_sq(&self) -> f64 {
        self.dot(self)
    }

    #[inline]
    pub fn norm(&self) -> f64 {
        self.norm_sq().sqrt()
    }

    #[inline]
    pub fn add(&self, other: &Point) -> Point {
        let mut p = *self;
        for i in 0..self.dim() {
            p.c[i] += other.c[i];
        }
        p
    }

    #[inline]
    pub fn sub(&self, other: &Point) -> Point {
        let mut p = *self;
        for i in 0..self.dim() {
            p.c[i] -= other.c[i];
        }
        p
    }

    #[inline]
    pub fn scale(&self, s: f64) -> Point {
        let mut p = *self;
        for i in 0..self.dim() {
            p.c[i] *= s;
        }
        p
    }

    /// `self + s * other`
    #[inline]
    pub fn axpy(&self, s: f64, other: &Point) -> Point {
        let mut p = *self;
        for i in 0..self.dim() {
            p.c[i] += s * other.c[i];
        }
        p
    }

    pub fn distance(&self, other: &Point) -> f64 {
        self.sub(other).norm()
    }

    pub fn midpoint(&self, other: &Point) -> Point {
        self.add(other).scale(0.5)
    }

    pub(crate) fn check_dim(&self, expected: usize) -> Result<()> {
        if self.dim() == expected {
            Ok(())
        } else {
            Err(Error::DimensionMismatch {
                expected,
                got: self.dim(),
            })
        }
    }
}

impl Deref for Point {
    type Target = [f64];

    #[inline]
    fn deref(&self) -> &[f64] {
        &self.c[..self.dim as usize]
    }
}

impl DerefMut for Point {
    #[inline]
    fn deref_mut(&mut self) -> &mut [f64] {
        &mut self.c[..self.dim as usize]
    }
}

impl PartialEq for Point {
    fn eq(&self, other: &Self) -> bool {
        self.coords() == other.coords()
    }
}

impl std::fmt::Debug for Point {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_list().entries(self.coords()).finish()
    }
}

impl Serialize for Point {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.coords().serialize(s)
    }
}

impl<'de> Deserialize<'de> for Point {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let v = Vec::<f64>::deserialize(d)?;
        Point::new(&v).map_err(serde::de::Error::custom)
    }
}

/// Closed halfspace `{x : <normal, x> >= offset}` with unit normal.
///
/// Cuts of the form `<w, x> <= s` are expressed by negating both sides.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Halfspace {
    normal: Point,
    offset: f64,
}

impl Halfspace {
    /// `{x : <w, x> >= s}`; `w` is normalized (and `s` rescaled with it).
    pub fn new(w: Point, s: f64) -> Result<Self> {
        let n = w.norm();
        if !(n > 1e-12) || !s.is_finite() {
            return Err(invalid(
                "halfspace normal must be non-zero and offset finite",
            ));
        }
        if (n - 1.0).abs() <= 1e-12 {
            return Ok(Halfspace {
                normal: w,
                offset: s,
            });
        }
        Ok(Halfspace {
            normal: w.scale(1.0 / n),
            offset: s / n,
        })
    }

    /// Halfspace whose boundary passes through `point`, normal pointing inward.
    pub fn through(point: &Point, inward: Point) -> Result<Self> {
        let h = Self::new(inward, 0.0)?;
        let offset = h.normal.dot(point);
        Ok(Halfspace {
            normal: h.normal,
            offset,
        })
    }

    #[inline]
    pub fn normal(&self) -> &Point {
        &self.normal
    }

    #[inline]
    pub fn offset(&self) -> f64 {
        self.offset
    }

    pub fn dim(&self) -> usize {
        self.normal.dim()
    }

    /// `<v, p> - t`; non-negative inside.
    #[inline]
    pub fn value(&self, p: &Point) -> f64 {
        self.normal.dot(p) - self.offset
    }

    #[inline]
    pub fn contains(&self, p: &Point) -> bool {
        self.value(p) >= 0.0
    }

    /// The complementary closed halfspace.
    pub fn flipped(&self) -> Self {
        Halfspace {
            normal: self.normal.scale(-1.0),
            offset: -self.offset,
        }
    }

    /// Image of this halfspace under `x -> M x + b`, given `M^{-1}`.
    pub fn mapped(&self, inverse: &crate::linalg::Matrix, shift: &Point) -> Result<Self> {
        // <v, M^{-1}(y - b)> >= t  <=>  <M^{-T} v, y> >= t + <M^{-T} v, b>
        let w = inverse.transpose().mul_vec(&self.normal);
        Self::new(w, self.offset + w.dot(shift))
    }
}

/// Axis-aligned box `[lo, hi]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundingBox {
    pub lo: Point,
    pub hi: Point,
}

impl BoundingBox {
    pub fn new(lo: Point, hi: Point) -> Result<Self> {
        if lo.dim() != hi.dim() {
            return Err(Error::DimensionMismatch {
                expected: lo.dim(),
                got: hi.dim(),
            });
        }
        if lo.iter().zip(hi.iter()).any(|(l, h)| l > h) {
            return Err(invalid("bounding box requires lo <= hi componentwise"));
        }
        Ok(BoundingBox { lo, hi })
    }

    pub fn dim(&self) -> usize {
        self.lo.dim()
    }

    pub fn center(&self) -> Point {
        self.lo.midpoint(&self.hi)
    }

    pub fn half_diagonal(&self) -> f64 {
        self.hi.sub(&self.lo).norm() / 2.0
    }

    pub fn volume(&self) -> f64 {
        self.lo
            .iter()
            .zip(self.hi.iter())
            .map(|(l, h)| h - l)
            .product()
    }

    pub fn contains(&self, p: &Point) -> bool {
        (0..self.dim()).all(|i| self.lo[i] <= p[i] && p[i] <= self.hi[i])
    }

    /// All `2^d` corners.
    pub fn corners(&self) -> impl Iterator<Item = Point> + '_ {
        let d = self.dim();
        (0..(1usize << d)).map(move |mask| {
            let mut p = self.lo;
            for i in 0..d {
                if mask & (1 << i) != 0 {
                    p[i] = self.hi[i];
                }
            }
            p
        })
    }

    pub(crate) fn from_points<'a>(points: impl IntoIterator<Item = &'a Point>) -> Self {
        let mut it = points.into_iter();
        let first = *it.next().expect("at least one point");
        let (mut lo, mut hi) = (first, first);
        for p in it {
            for i in 0..p.dim() {
                lo[i] = lo[i].min(p[i]);
                hi[i] = hi[i].max(p[i]);
            }
        }
        BoundingBox { lo, hi }
    }
}
