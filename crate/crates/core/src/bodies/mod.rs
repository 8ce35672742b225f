//! Convex bodies: balls, H-polytopes, the half-ball/cone family, halfspace
//! cuts, affine images and planar polygons.
//!
//! All bodies are immutable values; every query takes `&self`.

mod json;
mod point;
mod polygon;
mod shapes;

pub use json::{BodySpec, HalfspaceSpec};
pub use point::{BoundingBox, Halfspace, Point};
pub use polygon::{Polygon2D, VERTEX_TOL};
pub use shapes::{regular_simplex_vertices, AffineImage, Ball, Cut, HPolytope, HalfBallCone};

use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::sampling::{sample_body, SampleStream, Seed};
use crate::MAX_DIM;

/// A `d`-dimensional convex body with non-empty interior.
#[derive(Clone, Debug, PartialEq)]
pub enum ConvexBody {
    Ball(Ball),
    HPolytope(HPolytope),
    HalfBallCone(HalfBallCone),
    Cut(Box<Cut>),
    AffineImage(Box<AffineImage>),
    Polygon2D(Polygon2D),
}

fn check_dim(d: usize) -> Result<()> {
    if (1..=MAX_DIM).contains(&d) {
        Ok(())
    } else {
        Err(Error::UnsupportedDimension(d))
    }
}

impl ConvexBody {
    pub fn ball(center: Point, radius: f64) -> Result<Self> {
        Ok(ConvexBody::Ball(Ball::new(center, radius)?))
    }

    pub fn unit_ball(d: usize) -> Result<Self> {
        check_dim(d)?;
        Self::ball(Point::zeros(d), 1.0)
    }

    /// `{x : |x| <= 1, x_1 >= 0}`.
    pub fn half_ball(d: usize) -> Result<Self> {
        check_dim(d)?;
        Self::unit_ball(d)?.intersect_halfspace(&Halfspace::new(Point::axis(d, 0), 0.0)?)
    }

    pub fn half_ball_cone(d: usize, eps: f64, delta: f64) -> Result<Self> {
        Ok(ConvexBody::HalfBallCone(HalfBallCone::new(d, eps, delta)?))
    }

    /// The unit cube `[0, 1]^d`.
    pub fn cube(d: usize) -> Result<Self> {
        check_dim(d)?;
        let mut hi = Point::zeros(d);
        hi.iter_mut().for_each(|x| *x = 1.0);
        Self::axis_box(Point::zeros(d), hi)
    }

    pub fn axis_box(lo: Point, hi: Point) -> Result<Self> {
        Ok(ConvexBody::HPolytope(HPolytope::axis_box(lo, hi)?))
    }

    /// Regular simplex with centroid 0 and circumradius 1.
    pub fn regular_simplex(d: usize) -> Result<Self> {
        Ok(ConvexBody::HPolytope(HPolytope::regular_simplex(d)?))
    }

    pub fn simplex(vertices: &[Point]) -> Result<Self> {
        Ok(ConvexBody::HPolytope(HPolytope::simplex(vertices)?))
    }

    pub fn polygon(vertices: &[Point]) -> Result<Self> {
        Ok(ConvexBody::Polygon2D(Polygon2D::new(vertices)?))
    }

    pub fn hpolytope(halfspaces: Vec<Halfspace>, bound: BoundingBox) -> Result<Self> {
        Ok(ConvexBody::HPolytope(HPolytope::new(halfspaces, bound)?))
    }

    pub fn dim(&self) -> usize {
        match self {
            ConvexBody::Ball(b) => b.center.dim(),
            ConvexBody::HPolytope(p) => p.bound.dim(),
            ConvexBody::HalfBallCone(c) => c.d,
            ConvexBody::Cut(c) => c.base.dim(),
            ConvexBody::AffineImage(a) => a.base.dim(),
            ConvexBody::Polygon2D(_) => 2,
        }
    }

    /// Membership test.
    pub fn contains(&self, p: &Point) -> Result<bool> {
        p.check_dim(self.dim())?;
        Ok(self.contains_within(p, 0.0))
    }

    /// Membership with every constraint relaxed by `tol`. No dimension check.
    #[inline]
    pub fn contains_within(&self, p: &Point, tol: f64) -> bool {
        match self {
            ConvexBody::Ball(b) => p.sub(&b.center).norm() <= b.radius + tol,
            ConvexBody::HPolytope(poly) => poly.contains_within(p, tol),
            ConvexBody::HalfBallCone(c) => c.contains_within(p, tol),
            ConvexBody::Cut(c) => c.h.value(p) >= -tol && c.base.contains_within(p, tol),
            ConvexBody::AffineImage(a) => a.base.contains_within(&a.pull_back(p), tol),
            ConvexBody::Polygon2D(poly) => poly.contains_within(p, tol),
        }
    }

    /// Exact volume when a closed form is available.
    pub fn exact_volume(&self) -> Option<f64> {
        match self {
            ConvexBody::Ball(b) => Some(b.volume()),
            ConvexBody::HPolytope(p) => p.volume,
            ConvexBody::HalfBallCone(c) => Some(c.volume()),
            ConvexBody::Cut(c) => c.as_half_ball().map(|b| b.volume() / 2.0),
            ConvexBody::AffineImage(a) => a.base.exact_volume().map(|v| v * a.det.abs()),
            ConvexBody::Polygon2D(p) => Some(p.area()),
        }
    }

    /// `sup <w, x>` over the body when it has a closed form.
    pub fn support(&self, w: &Point) -> Option<f64> {
        match self {
            ConvexBody::Ball(b) => Some(w.dot(&b.center) + b.radius * w.norm()),
            ConvexBody::HPolytope(p) => p.vertices.as_ref().map(|vs| {
                vs.iter()
                    .map(|v| v.dot(w))
                    .fold(f64::NEG_INFINITY, f64::max)
            }),
            ConvexBody::HalfBallCone(c) => Some(c.support(w)),
            ConvexBody::Cut(c) => match &c.base {
                ConvexBody::Ball(b) => b.cut_support(&c.h, w),
                _ => None,
            },
            ConvexBody::AffineImage(a) => {
                let pulled = a.matrix.transpose().mul_vec(w);
                a.base.support(&pulled).map(|s| s + w.dot(&a.shift))
            }
            ConvexBody::Polygon2D(p) => Some(p.support(w)),
        }
    }

    /// `[inf <v, x>, sup <v, x>]` when both ends have closed forms.
    pub fn width_interval(&self, v: &Point) -> Option<(f64, f64)> {
        Some((-self.support(&v.scale(-1.0))?, self.support(v)?))
    }

    /// A box containing the body.
    pub fn bounding_box(&self) -> BoundingBox {
        let d = self.dim();
        if !matches!(self, ConvexBody::HPolytope(_) | ConvexBody::Ball(_)) {
            if let Some(b) = self.support_box() {
                return b;
            }
        }
        match self {
            ConvexBody::Ball(b) => {
                let r = Point::zeros(d).axpy(b.radius, &Point::zeros(d).add(&ones(d)));
                BoundingBox {
                    lo: b.center.sub(&r),
                    hi: b.center.add(&r),
                }
            }
            ConvexBody::HPolytope(p) => match &p.vertices {
                Some(vs) => BoundingBox::from_points(vs),
                None => p.bound,
            },
            ConvexBody::HalfBallCone(c) => {
                let mut lo = ones(d).scale(-1.0);
                lo[0] = -c.eps + c.delta;
                BoundingBox { lo, hi: ones(d) }
            }
            ConvexBody::Cut(c) => {
                let mut b = c.base.bounding_box();
                shapes::tighten_box(&mut b, &c.h);
                b
            }
            ConvexBody::AffineImage(a) => {
                let base = a.base.bounding_box();
                let mapped: Vec<Point> = base.corners().map(|p| a.apply(&p)).collect();
                BoundingBox::from_points(&mapped)
            }
            ConvexBody::Polygon2D(p) => p.bounding_box(),
        }
    }

    fn support_box(&self) -> Option<BoundingBox> {
        let d = self.dim();
        let mut lo = Point::zeros(d);
        let mut hi = Point::zeros(d);
        for i in 0..d {
            let e = Point::axis(d, i);
            hi[i] = self.support(&e)?;
            lo[i] = -self.support(&e.scale(-1.0))?;
        }
        Some(BoundingBox { lo, hi })
    }

    /// `self ∩ h`.
    ///
    /// Cuts of H-polytopes fold into the halfspace list, cuts of affine images
    /// are pulled back into the base, other bodies are wrapped. A cut that
    /// keeps the whole body returns the body unchanged; one whose result has
    /// no interior is an error.
    pub fn intersect_halfspace(&self, h: &Halfspace) -> Result<ConvexBody> {
        h.normal().check_dim(self.dim())?;
        if let ConvexBody::AffineImage(img) = self {
            // <v, M x + b> >= t  <=>  <M^T v, x> >= t - <v, b>
            let w = img.matrix.transpose().mul_vec(h.normal());
            let pulled = Halfspace::new(w, h.offset() - h.normal().dot(&img.shift))?;
            return img
                .base
                .intersect_halfspace(&pulled)?
                .affine_image(&img.matrix, &img.shift);
        }
        let v = h.normal();
        if let Some((lo, hi)) = self.width_interval(v) {
            let scale = 1e-12 * (1.0 + lo.abs().max(hi.abs()));
            if hi <= h.offset() + scale {
                return Err(Error::EmptyInterior(
                    "halfspace misses the body interior".into(),
                ));
            }
            if lo >= h.offset() {
                return Ok(self.clone());
            }
        } else if !matches!(self, ConvexBody::HPolytope(_)) {
            let mut stream = SampleStream::new(Seed::new(0xC0FFEE));
            let mut any_inside = false;
            for _ in 0..10_000 {
                if h.value(&sample_body(self, &mut stream)?) > 0.0 {
                    any_inside = true;
                    break;
                }
            }
            if !any_inside {
                return Err(Error::EmptyInterior(
                    "no sampled point of the body lies in the halfspace".into(),
                ));
            }
        }
        match self {
            ConvexBody::HPolytope(p) => Ok(ConvexBody::HPolytope(p.cut(*h)?)),
            // Parallel cuts of a cut: the tighter halfspace wins.
            ConvexBody::Cut(c) if c.h.normal().sub(h.normal()).norm() <= 1e-12 => {
                let h = if h.offset() >= c.h.offset() { *h } else { c.h };
                Ok(ConvexBody::Cut(Box::new(Cut::new(c.base.clone(), h))))
            }
            _ => Ok(ConvexBody::Cut(Box::new(Cut::new(self.clone(), *h)))),
        }
    }

    /// `{M x + b : x in self}`; nested images are composed.
    pub fn affine_image(&self, matrix: &Matrix, shift: &Point) -> Result<ConvexBody> {
        let d = self.dim();
        if matrix.order() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                got: matrix.order(),
            });
        }
        shift.check_dim(d)?;
        let det = matrix.det();
        if !(det.abs() > 1e-12) {
            return Err(Error::SingularMatrix(det));
        }
        if let ConvexBody::AffineImage(inner) = self {
            let m = matrix.mul(&inner.matrix);
            let b = matrix.mul_vec(&inner.shift).add(shift);
            return inner.base.affine_image(&m, &b);
        }
        let inverse = matrix.inverse()?;
        Ok(ConvexBody::AffineImage(Box::new(AffineImage {
            base: self.clone(),
            matrix: *matrix,
            inverse,
            shift: *shift,
            det,
        })))
    }

    pub fn translate(&self, by: &Point) -> Result<ConvexBody> {
        self.affine_image(&Matrix::identity(self.dim()), by)
    }

    pub fn as_polygon(&self) -> Option<&Polygon2D> {
        match self {
            ConvexBody::Polygon2D(p) => Some(p),
            _ => None,
        }
    }
}

fn ones(d: usize) -> Point {
    let mut p = Point::zeros(d);
    p.iter_mut().for_each(|x| *x = 1.0);
    p
}

impl From<Polygon2D> for ConvexBody {
    fn from(p: Polygon2D) -> Self {
        ConvexBody::Polygon2D(p)
    }
}

/// The nested pair `(K, L)`: `L` is the half-ball with the cone of height
/// `eps` attached, `K` is `L` with the cone tip truncated at depth `delta`.
pub fn make_counterexample_pair(
    d: usize,
    eps: f64,
    delta: f64,
) -> Result<(ConvexBody, ConvexBody)> {
    if d < 2 {
        return Err(crate::error::invalid("counterexample pair needs d >= 2"));
    }
    if !(delta > 0.0 && delta < eps) {
        return Err(crate::error::invalid(
            "counterexample pair needs 0 < delta < eps",
        ));
    }
    let l = ConvexBody::half_ball_cone(d, eps, 0.0)?;
    let k = ConvexBody::half_ball_cone(d, eps, delta)?;
    Ok((k, l))
}
