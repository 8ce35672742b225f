use super::{BoundingBox, Halfspace, Point};
use crate::error::{Error, Result};

/// Vertices closer than this are merged.
pub const VERTEX_TOL: f64 = 1e-9;

/// Strictly convex polygon with counter-clockwise vertices.
///
/// Construction canonicalizes the input: near-duplicate vertices are merged,
/// the rest are sorted counter-clockwise about their average, collinear
/// vertices are dropped and the sequence starts at the lowest (then leftmost)
/// vertex.
#[derive(Clone, Debug, PartialEq)]
pub struct Polygon2D {
    vertices: Vec<Point>,
    edges: Vec<Halfspace>,
}

fn cross(o: &Point, a: &Point, b: &Point) -> f64 {
    (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])
}

impl Polygon2D {
    pub fn new(vertices: &[Point]) -> Result<Self> {
        for v in vertices {
            v.check_dim(2)?;
        }
        let mut pts: Vec<Point> = Vec::with_capacity(vertices.len());
        for v in vertices {
            if !pts.iter().any(|q| q.distance(v) <= VERTEX_TOL) {
                pts.push(*v);
            }
        }
        if pts.len() < 3 {
            return Err(Error::DegeneratePolygon(format!(
                "{} distinct vertices",
                pts.len()
            )));
        }
        let n = pts.len() as f64;
        let (cx, cy) = pts
            .iter()
            .fold((0.0, 0.0), |(x, y), p| (x + p[0] / n, y + p[1] / n));
        pts.sort_by(|a, b| {
            let ta = (a[1] - cy).atan2(a[0] - cx);
            let tb = (b[1] - cy).atan2(b[0] - cx);
            ta.total_cmp(&tb)
        });

        let scale = pts
            .iter()
            .map(|p| (p[0] - cx).abs().max((p[1] - cy).abs()))
            .fold(0.0, f64::max)
            .max(f64::MIN_POSITIVE);
        let tol = 1e-12 * scale * scale;
        // Drop collinear vertices until a fixpoint; reject reflex ones.
        loop {
            let m = pts.len();
            if m < 3 {
                return Err(Error::DegeneratePolygon("all vertices collinear".into()));
            }
            let mut drop = None;
            for i in 0..m {
                let c = cross(&pts[(i + m - 1) % m], &pts[i], &pts[(i + 1) % m]);
                if c < -tol {
                    return Err(Error::DegeneratePolygon(
                        "vertices are not in convex position".into(),
                    ));
                }
                if c <= tol {
                    drop = Some(i);
                    break;
                }
            }
            match drop {
                Some(i) => {
                    pts.remove(i);
                }
                None => break,
            }
        }

        let start = (0..pts.len())
            .min_by(|&i, &j| {
                pts[i][1]
                    .total_cmp(&pts[j][1])
                    .then(pts[i][0].total_cmp(&pts[j][0]))
            })
            .unwrap();
        pts.rotate_left(start);

        let m = pts.len();
        let mut edges = Vec::with_capacity(m);
        for i in 0..m {
            let a = pts[i];
            let b = pts[(i + 1) % m];
            let left = Point::new(&[-(b[1] - a[1]), b[0] - a[0]])?;
            edges.push(Halfspace::through(&a, left)?);
        }
        Ok(Polygon2D {
            vertices: pts,
            edges,
        })
    }

    pub fn from_coords(coords: &[[f64; 2]]) -> Result<Self> {
        let pts = coords
            .iter()
            .map(|c| Point::new(c))
            .collect::<Result<Vec<_>>>()?;
        Self::new(&pts)
    }

    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    /// Inward edge halfspaces, edge `i` running from vertex `i` to `i + 1`.
    pub fn edges(&self) -> &[Halfspace] {
        &self.edges
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    /// Shoelace area.
    pub fn area(&self) -> f64 {
        let m = self.vertices.len();
        let mut s = 0.0;
        for i in 0..m {
            let a = &self.vertices[i];
            let b = &self.vertices[(i + 1) % m];
            s += a[0] * b[1] - a[1] * b[0];
        }
        s / 2.0
    }

    pub fn centroid(&self) -> Point {
        let m = self.vertices.len();
        let (mut cx, mut cy, mut a2) = (0.0, 0.0, 0.0);
        for i in 0..m {
            let a = &self.vertices[i];
            let b = &self.vertices[(i + 1) % m];
            let w = a[0] * b[1] - a[1] * b[0];
            a2 += w;
            cx += (a[0] + b[0]) * w;
            cy += (a[1] + b[1]) * w;
        }
        Point::new(&[cx / (3.0 * a2), cy / (3.0 * a2)]).unwrap()
    }

    #[inline]
    pub fn contains(&self, p: &Point) -> bool {
        self.edges.iter().all(|e| e.contains(p))
    }

    pub(crate) fn contains_within(&self, p: &Point, tol: f64) -> bool {
        self.edges.iter().all(|e| e.value(p) >= -tol)
    }

    pub fn bounding_box(&self) -> BoundingBox {
        BoundingBox::from_points(&self.vertices)
    }

    pub fn support(&self, v: &Point) -> f64 {
        self.vertices
            .iter()
            .map(|p| p.dot(v))
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// Distance from `x` to the boundary, with the index of the nearest edge.
    pub fn boundary_distance(&self, x: &Point) -> (f64, usize) {
        let m = self.vertices.len();
        (0..m)
            .map(|i| {
                let a = &self.vertices[i];
                let b = &self.vertices[(i + 1) % m];
                let ab = b.sub(a);
                let s = (x.sub(a).dot(&ab) / ab.norm_sq()).clamp(0.0, 1.0);
                (a.axpy(s, &ab).distance(x), i)
            })
            .min_by(|p, q| p.0.total_cmp(&q.0))
            .unwrap()
    }

    /// Exact intersection with a halfplane (Sutherland-Hodgman on one edge).
    pub fn clip(&self, h: &Halfspace) -> Result<Polygon2D> {
        h.normal().check_dim(2)?;
        let m = self.vertices.len();
        let mut out = Vec::with_capacity(m + 1);
        for i in 0..m {
            let a = self.vertices[i];
            let b = self.vertices[(i + 1) % m];
            let (va, vb) = (h.value(&a), h.value(&b));
            if va >= 0.0 {
                out.push(a);
            }
            if (va >= 0.0) != (vb >= 0.0) {
                let s = va / (va - vb);
                out.push(a.axpy(s, &b.sub(&a)));
            }
        }
        Polygon2D::new(&out)
            .map_err(|_| Error::EmptyInterior("halfplane misses the polygon interior".into()))
    }

    /// Rigid rotation about the origin by `angle` radians.
    pub fn rotated(&self, angle: f64) -> Polygon2D {
        let (s, c) = angle.sin_cos();
        let pts: Vec<Point> = self
            .vertices
            .iter()
            .map(|p| Point::new(&[c * p[0] - s * p[1], s * p[0] + c * p[1]]).unwrap())
            .collect();
        Polygon2D::new(&pts).expect("rotation preserves convexity")
    }

    pub fn translated(&self, by: &Point) -> Polygon2D {
        let pts: Vec<Point> = self.vertices.iter().map(|p| p.add(by)).collect();
        Polygon2D::new(&pts).expect("translation preserves convexity")
    }

    /// True when every vertex of `other` lies within `tol` of a vertex of
    /// `self` and the counts agree.
    pub fn same_vertices(&self, other: &Polygon2D, tol: f64) -> bool {
        self.len() == other.len()
            && other
                .vertices
                .iter()
                .all(|q| self.vertices.iter().any(|p| p.distance(q) <= tol))
    }
}

/// Serialized as the list of `[x, y]` vertices.
impl serde::Serialize for Polygon2D {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let coords: Vec<[f64; 2]> = self.vertices().iter().map(|v| [v[0], v[1]]).collect();
        serde::Serialize::serialize(&coords, s)
    }
}
