//! Steiner symmetrization and Blaschke shaking of convex polygons, and the
//! pipeline that pushes the pinned ratio `E vol conv(x, X_1, X_2) / area`
//! down to its half-disk minimum.
//!
//! Both operators act on vertical chords: the polygon is rotated by `-angle`
//! so that the chords to be moved are vertical, each chord `[alpha(u),
//! alpha(u) + length(u)]` is moved, and the result is rotated back.

use std::f64::consts::PI;

use serde::Serialize;

use crate::bodies::{ConvexBody, Point, Polygon2D, VERTEX_TOL};
use crate::error::{invalid, Error, Result};
use crate::estimators::{pinned_moment_estimate, MomentEstimate};
use crate::sampling::{SampleStream, Seed};

/// Largest distance from the boundary accepted for a pinned point.
pub const BOUNDARY_TOL: f64 = 1e-9;

/// `8 / (9 pi^2)`, the half-disk value of the pinned ratio.
pub fn plane_bound() -> f64 {
    8.0 / (9.0 * PI * PI)
}

/// Vertical chords of a polygon, sampled at every vertex abscissa. Between
/// breakpoints both functions are linear.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ChordProfile {
    pub u_min: f64,
    pub u_max: f64,
    pub breakpoints: Vec<f64>,
    /// Bottom of the chord at each breakpoint.
    pub alpha: Vec<f64>,
    pub length: Vec<f64>,
}

impl ChordProfile {
    fn interpolate(&self, values: &[f64], u: f64) -> Option<f64> {
        if !(self.u_min..=self.u_max).contains(&u) {
            return None;
        }
        let i = self.breakpoints.partition_point(|&b| b < u);
        if i == 0 || self.breakpoints[i] == u {
            return Some(values[i]);
        }
        let (u0, u1) = (self.breakpoints[i - 1], self.breakpoints[i]);
        let s = (u - u0) / (u1 - u0);
        Some(values[i - 1] + s * (values[i] - values[i - 1]))
    }

    /// `alpha(u)`, or `None` outside `[u_min, u_max]`.
    pub fn alpha_at(&self, u: f64) -> Option<f64> {
        self.interpolate(&self.alpha, u)
    }

    pub fn length_at(&self, u: f64) -> Option<f64> {
        self.interpolate(&self.length, u)
    }

    /// The polygon with chord `[bottom(u), bottom(u) + length(u)]` over each
    /// breakpoint.
    fn rebuild(&self, bottom: impl Fn(usize) -> f64) -> Result<Polygon2D> {
        let mut pts = Vec::with_capacity(2 * self.breakpoints.len());
        for (i, &u) in self.breakpoints.iter().enumerate() {
            let lo = bottom(i);
            pts.push(Point::new(&[u, lo])?);
            pts.push(Point::new(&[u, lo + self.length[i]])?);
        }
        Polygon2D::new(&pts)
    }
}

/// Lowest and highest point on the vertical line at `u` of the polygon with
/// vertices `vs`.
fn chord_at(vs: &[[f64; 2]], u: f64) -> (f64, f64) {
    let m = vs.len();
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for i in 0..m {
        let (a, b) = (vs[i], vs[(i + 1) % m]);
        if a[0] == u {
            lo = lo.min(a[1]);
            hi = hi.max(a[1]);
        }
        let (x0, x1) = (a[0].min(b[0]), a[0].max(b[0]));
        if x0 < u && u < x1 {
            let y = a[1] + (u - a[0]) / (b[0] - a[0]) * (b[1] - a[1]);
            lo = lo.min(y);
            hi = hi.max(y);
        }
    }
    (lo, hi)
}

/// Chords of `poly` in the direction obtained by rotating the `y` axis by
/// `angle`.
///
/// Abscissae within `1e-12` of the polygon's extent of each other are merged
/// so that rotation rounding cannot split a vertical edge.
pub fn chord_profile(poly: &Polygon2D, angle: f64) -> Result<ChordProfile> {
    let (sn, cs) = (-angle).sin_cos();
    let mut vs: Vec<[f64; 2]> = poly
        .vertices()
        .iter()
        .map(|p| {
            if angle == 0.0 {
                [p[0], p[1]]
            } else {
                [cs * p[0] - sn * p[1], sn * p[0] + cs * p[1]]
            }
        })
        .collect();
    let mut order: Vec<usize> = (0..vs.len()).collect();
    order.sort_by(|&i, &j| vs[i][0].total_cmp(&vs[j][0]));
    let (first, last) = (vs[order[0]][0], vs[*order.last().unwrap()][0]);
    let tol = 1e-12 * (last - first).abs().max(first.abs()).max(last.abs());
    let mut breakpoints: Vec<f64> = Vec::with_capacity(vs.len());
    for &i in &order {
        match breakpoints.last() {
            Some(&b) if vs[i][0] - b <= tol => vs[i][0] = b,
            _ => breakpoints.push(vs[i][0]),
        }
    }
    if breakpoints.len() < 2 {
        return Err(Error::DegeneratePolygon("polygon has zero width".into()));
    }
    let (mut alpha, mut length) = (Vec::new(), Vec::new());
    for &u in &breakpoints {
        let (lo, hi) = chord_at(&vs, u);
        alpha.push(lo);
        length.push((hi - lo).max(0.0));
    }
    Ok(ChordProfile {
        u_min: breakpoints[0],
        u_max: *breakpoints.last().unwrap(),
        breakpoints,
        alpha,
        length,
    })
}

/// Re-centres every chord on the line through the origin perpendicular to
/// the chord direction (`angle` as in [`chord_profile`]).
pub fn steiner_symmetrize(poly: &Polygon2D, angle: f64) -> Result<Polygon2D> {
    let prof = chord_profile(poly, angle)?;
    let out = prof.rebuild(|i| -prof.length[i] / 2.0)?;
    Ok(if angle == 0.0 {
        out
    } else {
        out.rotated(angle)
    })
}

/// Slides every vertical chord down onto the line `y = line_y`.
///
/// The polygon must already lie in `y >= line_y`; a polygon below the line
/// is rejected rather than translated.
pub fn blaschke_shake(poly: &Polygon2D, line_y: f64) -> Result<Polygon2D> {
    let lowest = poly
        .vertices()
        .iter()
        .map(|v| v[1])
        .fold(f64::INFINITY, f64::min);
    if lowest < line_y - VERTEX_TOL {
        return Err(invalid(format!(
            "polygon reaches y = {lowest}, below the line y = {line_y}"
        )));
    }
    chord_profile(poly, 0.0)?.rebuild(|_| line_y)
}

/// `E vol conv(x, X_1, X_2) / area(poly)`.
pub fn pinned_ratio(poly: &Polygon2D, x: &Point, n: u64, seed: Seed) -> Result<MomentEstimate> {
    let area = poly.area();
    let e = pinned_moment_estimate(&ConvexBody::Polygon2D(poly.clone()), x, 1, n, seed)?;
    Ok(MomentEstimate {
        mean: e.mean / area,
        stderr: e.stderr / area,
        ..e
    })
}

/// Pinned ratios along the symmetrization pipeline.
#[derive(Clone, Debug, Serialize)]
pub struct PlaneReport {
    /// The input, moved so that `x` is the origin and its edge lies on the
    /// `x` axis with the polygon above.
    pub normalized: Polygon2D,
    pub symmetrized: Polygon2D,
    pub shaken: Polygon2D,
    pub r0: MomentEstimate,
    pub r1: MomentEstimate,
    pub r2: MomentEstimate,
    pub bound: f64,
}

impl PlaneReport {
    /// `r0 >= r1 - 4s >= r2 - 8s >= bound - 12s`, `s` being the largest of
    /// the three standard errors.
    pub fn contract_holds(&self) -> bool {
        let s = self.r0.stderr.max(self.r1.stderr).max(self.r2.stderr);
        self.r0.mean >= self.r1.mean - 4.0 * s
            && self.r1.mean - 4.0 * s >= self.r2.mean - 8.0 * s
            && self.r2.mean - 8.0 * s >= self.bound - 12.0 * s
    }
}

/// Rigid motion taking `x` to the origin and its edge onto the `x` axis,
/// polygon above.
fn normalize_at(poly: &Polygon2D, x: &Point) -> Result<Polygon2D> {
    x.check_dim(2)?;
    let (dist, edge) = poly.boundary_distance(x);
    if dist > BOUNDARY_TOL {
        return Err(Error::NotOnBoundary(dist));
    }
    let inward = poly.edges()[edge].normal();
    // Rotate the inward normal onto +y.
    let angle = PI / 2.0 - inward[1].atan2(inward[0]);
    let moved = poly.translated(&x.scale(-1.0)).rotated(angle);
    // Snap the edge to y = 0 exactly.
    let pts: Vec<Point> = moved
        .vertices()
        .iter()
        .map(|v| {
            Point::new(&[
                v[0],
                if v[1].abs() <= BOUNDARY_TOL {
                    0.0
                } else {
                    v[1]
                },
            ])
        })
        .collect::<Result<_>>()?;
    Polygon2D::new(&pts)
}

/// Pinned ratio at `x` on the boundary of `poly` before symmetrization (`r0`),
/// after Steiner symmetrization about the normal line at `x` (`r1`) and after
/// shaking onto the supporting line at `x` (`r2`). All three estimates share
/// one seed.
pub fn plane_bound_pipeline(
    poly: &Polygon2D,
    x: &Point,
    n: u64,
    seed: Seed,
) -> Result<PlaneReport> {
    let normalized = normalize_at(poly, x)?;
    let origin = Point::zeros(2);
    let symmetrized = steiner_symmetrize(&normalized, PI / 2.0)?;
    let lowest = symmetrized
        .vertices()
        .iter()
        .map(|v| v[1])
        .fold(f64::INFINITY, f64::min);
    // Rotation rounding may leave the bottom a hair below zero.
    let symmetrized = if lowest < 0.0 && lowest > -BOUNDARY_TOL {
        symmetrized.translated(&Point::new(&[0.0, -lowest])?)
    } else {
        symmetrized
    };
    let shaken = blaschke_shake(&symmetrized, 0.0)?;
    Ok(PlaneReport {
        r0: pinned_ratio(&normalized, &origin, n, seed)?,
        r1: pinned_ratio(&symmetrized, &origin, n, seed)?,
        r2: pinned_ratio(&shaken, &origin, n, seed)?,
        normalized,
        symmetrized,
        shaken,
        bound: plane_bound(),
    })
}

/// Regular `m`-gon approximation of the upper half of the unit disk, with
/// vertices at angles `k pi / (m - 1)`.
pub fn half_disk(m: usize) -> Result<Polygon2D> {
    if m < 3 {
        return Err(invalid("half-disk approximation needs at least 3 vertices"));
    }
    let pts: Vec<Point> = (0..m)
        .map(|k| {
            let th = k as f64 * PI / (m - 1) as f64;
            Point::new(&[th.cos(), if k == 0 || k == m - 1 { 0.0 } else { th.sin() }])
        })
        .collect::<Result<_>>()?;
    Polygon2D::new(&pts)
}

/// Regular `m`-gon inscribed in the unit circle.
pub fn regular_polygon(m: usize) -> Result<Polygon2D> {
    let pts: Vec<Point> = (0..m)
        .map(|k| {
            let th = 2.0 * PI * k as f64 / m as f64;
            Point::new(&[th.cos(), th.sin()])
        })
        .collect::<Result<_>>()?;
    Polygon2D::new(&pts)
}

/// Random polygon with `m` vertices on a randomly rotated ellipse with axes
/// in `[0.5, 2]`, and a uniform point on one of its edges.
pub fn random_polygon(m: usize, seed: Seed) -> Result<(Polygon2D, Point)> {
    let mut st = SampleStream::new(seed);
    let (a, b) = (st.uniform(0.5, 2.0), st.uniform(0.5, 2.0));
    let rot = st.uniform(0.0, PI);
    let (sr, cr) = rot.sin_cos();
    let mut angles: Vec<f64> = (0..m).map(|_| st.uniform(0.0, 2.0 * PI)).collect();
    angles.sort_by(f64::total_cmp);
    let pts: Vec<Point> = angles
        .iter()
        .map(|th| {
            let (x, y) = (a * th.cos(), b * th.sin());
            Point::new(&[cr * x - sr * y, sr * x + cr * y])
        })
        .collect::<Result<_>>()?;
    let poly = Polygon2D::new(&pts)?;
    let vs = poly.vertices();
    let i = ((st.uniform01() * vs.len() as f64) as usize).min(vs.len() - 1);
    let s = st.uniform01();
    let x = vs[i].scale(1.0 - s).add(&vs[(i + 1) % vs.len()].scale(s));
    Ok((poly, x))
}

/// Random polygon symmetric about the `y` axis, resting on the origin: its
/// lowest point on the axis is `(0, 0)` and it lies in `y >= 0`.
///
/// Vertices are `2 * half` mirrored points on a random ellipse.
pub fn random_symmetric_polygon(half: usize, seed: Seed) -> Result<Polygon2D> {
    let mut st = SampleStream::new(seed);
    let (a, b) = (st.uniform(0.5, 2.0), st.uniform(0.5, 2.0));
    let mut pts = Vec::with_capacity(2 * half);
    for _ in 0..half {
        let th = st.uniform(-PI / 2.0, PI / 2.0);
        let (x, y) = (a * th.cos(), b * th.sin());
        pts.push(Point::new(&[x, y])?);
        pts.push(Point::new(&[-x, y])?);
    }
    let poly = Polygon2D::new(&pts)?;
    let bottom = chord_profile(&poly, 0.0)?
        .alpha_at(0.0)
        .ok_or_else(|| invalid("axis misses the polygon"))?;
    Ok(poly.translated(&Point::new(&[0.0, -bottom])?))
}
