use super::{BoundingBox, ConvexBody, Halfspace, Point};
use crate::error::{invalid, Error, Result};
use crate::exact::kappa;
use crate::linalg::{orthogonal_complement, Matrix};
use crate::sampling::{SampleStream, Seed};
use crate::MAX_DIM;

/// Euclidean ball.
#[derive(Clone, Debug, PartialEq)]
pub struct Ball {
    pub(crate) center: Point,
    pub(crate) radius: f64,
}

impl Ball {
    pub fn new(center: Point, radius: f64) -> Result<Self> {
        if !(radius > 0.0) || !radius.is_finite() {
            return Err(invalid("ball radius must be positive and finite"));
        }
        Ok(Ball { center, radius })
    }

    pub fn center(&self) -> &Point {
        &self.center
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn volume(&self) -> f64 {
        kappa(self.center.dim() as u64).value() * self.radius.powi(self.center.dim() as i32)
    }

    /// `sup <w, x>` over the ball intersected with `h`, `None` if that set is empty.
    pub(crate) fn cut_support(&self, h: &Halfspace, w: &Point) -> Option<f64> {
        let c = &self.center;
        let r = self.radius;
        let wn = w.norm();
        if wn == 0.0 {
            return Some(0.0);
        }
        let top = c.axpy(r / wn, w);
        if h.contains(&top) {
            return Some(w.dot(c) + r * wn);
        }
        let u = h.normal();
        let s = h.offset() - u.dot(c);
        if s > r {
            return None;
        }
        let slice_center = c.axpy(s, u);
        let slice_radius = (r * r - s * s).max(0.0).sqrt();
        let w_perp = w.axpy(-w.dot(u), u);
        Some(w.dot(&slice_center) + slice_radius * w_perp.norm())
    }
}

/// Polytope given by halfspaces, with a box known to contain it.
///
/// When built from vertices the vertex list and exact volume are retained so
/// support queries and volumes stay exact.
#[derive(Clone, Debug, PartialEq)]
pub struct HPolytope {
    pub(crate) halfspaces: Vec<Halfspace>,
    pub(crate) bound: BoundingBox,
    pub(crate) vertices: Option<Vec<Point>>,
    pub(crate) volume: Option<f64>,
}

impl HPolytope {
    /// Interior non-emptiness is checked by probing random points of `bound`.
    pub fn new(halfspaces: Vec<Halfspace>, bound: BoundingBox) -> Result<Self> {
        let d = bound.dim();
        for h in &halfspaces {
            h.normal().check_dim(d)?;
        }
        let p = HPolytope {
            halfspaces,
            bound,
            vertices: None,
            volume: None,
        };
        p.check_interior()?;
        Ok(p)
    }

    fn check_interior(&self) -> Result<()> {
        let mut stream = SampleStream::new(Seed::new(0x1D_5EED));
        for _ in 0..20_000 {
            let p = stream.uniform_in_box(&self.bound);
            if self.halfspaces.iter().all(|h| h.value(&p) > 0.0) {
                return Ok(());
            }
        }
        Err(Error::EmptyInterior(
            "no interior point found in the bounding box".into(),
        ))
    }

    /// Axis-aligned box `[lo, hi]`.
    pub fn axis_box(lo: Point, hi: Point) -> Result<Self> {
        let bound = BoundingBox::new(lo, hi)?;
        let d = lo.dim();
        let mut halfspaces = Vec::with_capacity(2 * d);
        for i in 0..d {
            if hi[i] <= lo[i] {
                return Err(Error::EmptyInterior("box has zero width".into()));
            }
            halfspaces.push(Halfspace::new(Point::axis(d, i), lo[i])?);
            halfspaces.push(Halfspace::new(Point::axis(d, i).scale(-1.0), -hi[i])?);
        }
        let vertices = bound.corners().collect();
        Ok(HPolytope {
            halfspaces,
            bound,
            vertices: Some(vertices),
            volume: Some(bound.volume()),
        })
    }

    /// Simplex with the given `d + 1` vertices.
    pub fn simplex(vertices: &[Point]) -> Result<Self> {
        let d = vertices
            .first()
            .map(|p| p.dim())
            .ok_or_else(|| invalid("no vertices"))?;
        if vertices.len() != d + 1 {
            return Err(invalid(format!("a {d}-simplex needs {} vertices", d + 1)));
        }
        let volume = crate::estimators::simplex_volume(vertices)?;
        if volume <= 1e-12 {
            return Err(Error::EmptyInterior(
                "simplex vertices are affinely dependent".into(),
            ));
        }
        let centroid = vertices
            .iter()
            .fold(Point::zeros(d), |acc, v| acc.add(v))
            .scale(1.0 / (d + 1) as f64);
        let mut halfspaces = Vec::with_capacity(d + 1);
        for skip in 0..=d {
            let facet: Vec<Point> = (0..=d)
                .filter(|&i| i != skip)
                .map(|i| vertices[i])
                .collect();
            halfspaces.push(facet_halfspace(&facet, &centroid)?);
        }
        Ok(HPolytope {
            halfspaces,
            bound: BoundingBox::from_points(vertices),
            vertices: Some(vertices.to_vec()),
            volume: Some(volume),
        })
    }

    /// Regular simplex centered at the origin with circumradius 1.
    pub fn regular_simplex(d: usize) -> Result<Self> {
        if !(1..=MAX_DIM).contains(&d) {
            return Err(Error::UnsupportedDimension(d));
        }
        Self::simplex(&regular_simplex_vertices(d))
    }

    /// `conv(simplex, apex)` where `apex` lies beyond exactly the facet
    /// opposite vertex `opposite` of the simplex: the simplex with a pyramid
    /// glued onto that facet.
    pub fn capped_simplex(vertices: &[Point], opposite: usize, apex: Point) -> Result<Self> {
        let base = Self::simplex(vertices)?;
        let d = apex.dim();
        let beyond: Vec<usize> = (0..=d)
            .filter(|&i| !base.halfspaces[i].contains(&apex))
            .collect();
        if beyond != [opposite] {
            return Err(invalid("apex must lie beyond exactly the chosen facet"));
        }
        let interior = vertices
            .iter()
            .fold(Point::zeros(d), |acc, v| acc.add(v))
            .scale(1.0 / (d + 1) as f64);
        let facet: Vec<usize> = (0..=d).filter(|&i| i != opposite).collect();
        let mut halfspaces: Vec<Halfspace> = (0..=d)
            .filter(|&i| i != opposite)
            .map(|i| base.halfspaces[i])
            .collect();
        for &drop in &facet {
            let mut pts: Vec<Point> = facet
                .iter()
                .filter(|&&i| i != drop)
                .map(|&i| vertices[i])
                .collect();
            pts.push(apex);
            halfspaces.push(facet_halfspace(&pts, &interior)?);
        }
        let mut pyramid: Vec<Point> = facet.iter().map(|&i| vertices[i]).collect();
        pyramid.push(apex);
        let volume = base.volume.unwrap() + crate::estimators::simplex_volume(&pyramid)?;
        let mut all = vertices.to_vec();
        all.push(apex);
        Ok(HPolytope {
            halfspaces,
            bound: BoundingBox::from_points(&all),
            vertices: Some(all),
            volume: Some(volume),
        })
    }

    pub fn halfspaces(&self) -> &[Halfspace] {
        &self.halfspaces
    }

    pub fn bound(&self) -> &BoundingBox {
        &self.bound
    }

    pub fn vertices(&self) -> Option<&[Point]> {
        self.vertices.as_deref()
    }

    pub fn known_volume(&self) -> Option<f64> {
        self.volume
    }

    #[inline]
    pub(crate) fn contains_within(&self, p: &Point, tol: f64) -> bool {
        self.halfspaces.iter().all(|h| h.value(p) >= -tol)
    }

    /// Fold one more halfspace into the description. The vertex list and the
    /// exact volume are dropped unless the cut is redundant.
    pub(crate) fn cut(&self, h: Halfspace) -> Result<Self> {
        if let Some(vs) = &self.vertices {
            if vs.iter().all(|v| h.value(v) >= 0.0) {
                return Ok(self.clone());
            }
        }
        let mut halfspaces = self.halfspaces.clone();
        halfspaces.push(h);
        let mut bound = self.bound;
        tighten_box(&mut bound, &h);
        HPolytope::new(halfspaces, bound)
    }
}

fn facet_halfspace(facet: &[Point], interior: &Point) -> Result<Halfspace> {
    let d = interior.dim();
    let diffs: Vec<Point> = facet[1..].iter().map(|p| p.sub(&facet[0])).collect();
    let n = orthogonal_complement(&diffs, d)?;
    let h = Halfspace::through(&facet[0], n)?;
    Ok(if h.value(interior) < 0.0 {
        h.flipped()
    } else {
        h
    })
}

/// Shrinks `bound` when `h` is an axis-aligned cut.
pub(crate) fn tighten_box(bound: &mut BoundingBox, h: &Halfspace) {
    let v = h.normal();
    for i in 0..v.dim() {
        if (v[i] - 1.0).abs() <= 1e-12 {
            bound.lo[i] = bound.lo[i].max(h.offset()).min(bound.hi[i]);
        } else if (v[i] + 1.0).abs() <= 1e-12 {
            bound.hi[i] = bound.hi[i].min(-h.offset()).max(bound.lo[i]);
        }
    }
}

/// Vertices of the regular simplex with centroid 0 and circumradius 1.
pub fn regular_simplex_vertices(d: usize) -> Vec<Point> {
    // e_i - (1/(d+1)) 1 in R^{d+1}, expressed in an orthonormal basis of the
    // hyperplane sum(x) = 0.
    let big = d + 1;
    let mut basis: Vec<Vec<f64>> = Vec::with_capacity(d);
    for k in 0..d {
        // Helmert basis: (1,...,1,-k-1,0,...)/norm with k+1 ones.
        let mut v = vec![0.0; big];
        for x in v.iter_mut().take(k + 1) {
            *x = 1.0;
        }
        v[k + 1] = -((k + 1) as f64);
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        basis.push(v.into_iter().map(|x| x / norm).collect());
    }
    let mean = 1.0 / big as f64;
    let raw: Vec<Vec<f64>> = (0..big)
        .map(|i| {
            basis
                .iter()
                .map(|b| {
                    (0..big)
                        .map(|j| b[j] * (if i == j { 1.0 } else { 0.0 } - mean))
                        .sum()
                })
                .collect()
        })
        .collect();
    let r = raw[0].iter().map(|x| x * x).sum::<f64>().sqrt();
    raw.iter()
        .map(|c| Point::new(&c.iter().map(|x| x / r).collect::<Vec<_>>()).unwrap())
        .collect()
}

/// Union of the half-ball `{x_1 >= 0, |x| <= 1}` and the cone with apex
/// `(-eps, 0, ..., 0)` over the flat face, with the tip cut off at
/// `x_1 >= -eps + delta`. `delta = 0` keeps the full cone.
#[derive(Clone, Debug, PartialEq)]
pub struct HalfBallCone {
    pub(crate) d: usize,
    pub(crate) eps: f64,
    pub(crate) delta: f64,
    pub(crate) half_volume: f64,
    pub(crate) frustum_volume: f64,
    /// `(delta / eps)^d`: lower end of the inverse CDF of `s^d`.
    pub(crate) s0_pow_d: f64,
}

impl HalfBallCone {
    pub fn new(d: usize, eps: f64, delta: f64) -> Result<Self> {
        if !(2..=MAX_DIM).contains(&d) {
            return Err(Error::UnsupportedDimension(d));
        }
        if !(eps > 0.0) || !eps.is_finite() {
            return Err(invalid("eps must be positive"));
        }
        if !(0.0..eps).contains(&delta) {
            return Err(invalid("delta must lie in [0, eps)"));
        }
        let half_volume = kappa(d as u64).value() / 2.0;
        let s0_pow_d = (delta / eps).powi(d as i32);
        // Cone over the unit (d-1)-disk with height eps, minus the tip of
        // height delta.
        let frustum_volume = kappa(d as u64 - 1).value() * eps / d as f64 * (1.0 - s0_pow_d);
        Ok(HalfBallCone {
            d,
            eps,
            delta,
            half_volume,
            frustum_volume,
            s0_pow_d,
        })
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn eps(&self) -> f64 {
        self.eps
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn apex(&self) -> Point {
        let mut p = Point::zeros(self.d);
        p[0] = -self.eps;
        p
    }

    pub fn volume(&self) -> f64 {
        self.half_volume + self.frustum_volume
    }

    /// Probability that a uniform point falls in the cone part.
    pub fn cone_fraction(&self) -> f64 {
        self.frustum_volume / self.volume()
    }

    #[inline]
    pub(crate) fn contains_within(&self, p: &Point, tol: f64) -> bool {
        let x1 = p[0];
        let rest: f64 = p[1..].iter().map(|x| x * x).sum();
        if x1 >= -tol && (x1 * x1 + rest).sqrt() <= 1.0 + tol {
            return true;
        }
        x1 >= -self.eps + self.delta - tol
            && x1 <= tol
            && rest.sqrt() <= (x1 + self.eps) / self.eps + tol
    }

    pub(crate) fn support(&self, w: &Point) -> f64 {
        let ball = Ball {
            center: Point::zeros(self.d),
            radius: 1.0,
        };
        let face = Halfspace::new(Point::axis(self.d, 0), 0.0).unwrap();
        let half = ball.cut_support(&face, w).unwrap();
        let rest = w[1..].iter().map(|x| x * x).sum::<f64>().sqrt();
        let tip = w[0] * (-self.eps + self.delta) + (self.delta / self.eps) * rest;
        half.max(tip)
    }
}

/// `base ∩ h`.
#[derive(Clone, Debug, PartialEq)]
pub struct Cut {
    pub(crate) base: ConvexBody,
    pub(crate) h: Halfspace,
    /// Box for rejection sampling, kept when it is smaller than the base.
    pub(crate) proposal: Option<BoundingBox>,
}

impl Cut {
    pub(crate) fn new(base: ConvexBody, h: Halfspace) -> Self {
        let mut cut = Cut {
            base,
            h,
            proposal: None,
        };
        let bb = ConvexBody::Cut(Box::new(cut.clone())).bounding_box();
        if cut.base.exact_volume().is_some_and(|v| bb.volume() < v) {
            cut.proposal = Some(bb);
        }
        cut
    }

    pub fn base(&self) -> &ConvexBody {
        &self.base
    }

    pub fn halfspace(&self) -> &Halfspace {
        &self.h
    }

    /// The ball when this is a ball cut through its center.
    pub(crate) fn as_half_ball(&self) -> Option<&Ball> {
        match &self.base {
            ConvexBody::Ball(b) if (self.h.value(&b.center)).abs() <= 1e-12 * b.radius.max(1.0) => {
                Some(b)
            }
            _ => None,
        }
    }
}

/// `{M x + b : x in base}`.
#[derive(Clone, Debug, PartialEq)]
pub struct AffineImage {
    pub(crate) base: ConvexBody,
    pub(crate) matrix: Matrix,
    pub(crate) inverse: Matrix,
    pub(crate) shift: Point,
    pub(crate) det: f64,
}

impl AffineImage {
    pub fn base(&self) -> &ConvexBody {
        &self.base
    }

    pub fn matrix(&self) -> &Matrix {
        &self.matrix
    }

    pub fn inverse(&self) -> &Matrix {
        &self.inverse
    }

    pub fn shift(&self) -> &Point {
        &self.shift
    }

    pub fn det(&self) -> f64 {
        self.det
    }

    #[inline]
    pub fn apply(&self, x: &Point) -> Point {
        self.matrix.mul_vec(x).add(&self.shift)
    }

    #[inline]
    pub fn pull_back(&self, y: &Point) -> Point {
        self.inverse.mul_vec(&y.sub(&self.shift))
    }
}
