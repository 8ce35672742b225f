//! JSON descriptions of bodies, tagged by `"type"`.
//!
//! ```json
//! {"type": "polygon", "vertices": [[0, 0], [1, 0], [0, 1]]}
//! {"type": "halfballcone", "d": 4, "eps": 0.1, "delta": 0.01}
//! ```

use serde::{Deserialize, Serialize};

use super::{BoundingBox, ConvexBody, Halfspace, Point};
use crate::error::{Error, Result};
use crate::linalg::Matrix;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HalfspaceSpec {
    pub normal: Point,
    pub offset: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase", deny_unknown_fields)]
pub enum BodySpec {
    Ball {
        center: Point,
        radius: f64,
    },
    /// Unit half-ball `{|x| <= 1, x_1 >= 0}`.
    HalfBall {
        d: usize,
    },
    HalfBallCone {
        d: usize,
        eps: f64,
        #[serde(default)]
        delta: f64,
    },
    /// Unit cube `[0, 1]^d`.
    Cube {
        d: usize,
    },
    /// Regular simplex, centroid 0, circumradius 1.
    Simplex {
        d: usize,
    },
    Polygon {
        vertices: Vec<Point>,
    },
    HPoly {
        halfspaces: Vec<HalfspaceSpec>,
        bound: BoundingBox,
    },
    Cut {
        base: Box<BodySpec>,
        halfspace: HalfspaceSpec,
    },
    Affine {
        base: Box<BodySpec>,
        matrix: Vec<Vec<f64>>,
        shift: Point,
    },
}

impl HalfspaceSpec {
    fn build(&self) -> Result<Halfspace> {
        Halfspace::new(self.normal, self.offset)
    }

    fn from_halfspace(h: &Halfspace) -> Self {
        HalfspaceSpec {
            normal: *h.normal(),
            offset: h.offset(),
        }
    }
}

impl BodySpec {
    pub fn build(&self) -> Result<ConvexBody> {
        match self {
            BodySpec::Ball { center, radius } => ConvexBody::ball(*center, *radius),
            BodySpec::HalfBall { d } => ConvexBody::half_ball(*d),
            BodySpec::HalfBallCone { d, eps, delta } => {
                ConvexBody::half_ball_cone(*d, *eps, *delta)
            }
            BodySpec::Cube { d } => ConvexBody::cube(*d),
            BodySpec::Simplex { d } => ConvexBody::regular_simplex(*d),
            BodySpec::Polygon { vertices } => ConvexBody::polygon(vertices),
            BodySpec::HPoly { halfspaces, bound } => {
                let hs = halfspaces
                    .iter()
                    .map(HalfspaceSpec::build)
                    .collect::<Result<Vec<_>>>()?;
                ConvexBody::hpolytope(hs, *bound)
            }
            BodySpec::Cut { base, halfspace } => {
                base.build()?.intersect_halfspace(&halfspace.build()?)
            }
            BodySpec::Affine {
                base,
                matrix,
                shift,
            } => base
                .build()?
                .affine_image(&Matrix::from_rows(matrix)?, shift),
        }
    }

    /// Description of an existing body. Bodies built from vertices are
    /// emitted in H-form, which loses the retained vertex list.
    pub fn describe(body: &ConvexBody) -> BodySpec {
        match body {
            ConvexBody::Ball(b) => BodySpec::Ball {
                center: b.center,
                radius: b.radius,
            },
            ConvexBody::HPolytope(p) => BodySpec::HPoly {
                halfspaces: p
                    .halfspaces
                    .iter()
                    .map(HalfspaceSpec::from_halfspace)
                    .collect(),
                bound: p.bound,
            },
            ConvexBody::HalfBallCone(c) => BodySpec::HalfBallCone {
                d: c.d,
                eps: c.eps,
                delta: c.delta,
            },
            ConvexBody::Cut(c) => BodySpec::Cut {
                base: Box::new(Self::describe(&c.base)),
                halfspace: HalfspaceSpec::from_halfspace(&c.h),
            },
            ConvexBody::AffineImage(a) => BodySpec::Affine {
                base: Box::new(Self::describe(&a.base)),
                matrix: a.matrix.rows(),
                shift: a.shift,
            },
            ConvexBody::Polygon2D(p) => BodySpec::Polygon {
                vertices: p.vertices().to_vec(),
            },
        }
    }
}

impl ConvexBody {
    pub fn from_json(text: &str) -> Result<ConvexBody> {
        let spec: BodySpec = serde_json::from_str(text).map_err(Error::Json)?;
        spec.build()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&BodySpec::describe(self))
            .expect("body descriptions always serialize")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_variant_parses() {
        let docs = [
            r#"{"type":"ball","center":[0,0,0],"radius":2}"#,
            r#"{"type":"halfball","d":3}"#,
            r#"{"type":"halfballcone","d":4,"eps":0.1,"delta":0.01}"#,
            r#"{"type":"halfballcone","d":2,"eps":0.5}"#,
            r#"{"type":"cube","d":2}"#,
            r#"{"type":"simplex","d":3}"#,
            r#"{"type":"polygon","vertices":[[0,0],[1,0],[0,1]]}"#,
            r#"{"type":"hpoly","halfspaces":[{"normal":[1,1],"offset":0}],"bound":{"lo":[-1,-1],"hi":[1,1]}}"#,
            r#"{"type":"cut","base":{"type":"ball","center":[0,0],"radius":1},"halfspace":{"normal":[0,1],"offset":0.5}}"#,
            r#"{"type":"affine","base":{"type":"cube","d":2},"matrix":[[2,0],[0,1]],"shift":[1,1]}"#,
        ];
        for doc in docs {
            let body = ConvexBody::from_json(doc).unwrap_or_else(|e| panic!("{doc}: {e}"));
            let again = ConvexBody::from_json(&body.to_json()).unwrap();
            assert_eq!(again.dim(), body.dim());
        }
    }

    #[test]
    fn round_trip_preserves_membership() {
        let body = ConvexBody::from_json(r#"{"type":"halfballcone","d":3,"eps":0.2,"delta":0.05}"#)
            .unwrap();
        let again = ConvexBody::from_json(&body.to_json()).unwrap();
        assert_eq!(body, again);
        let poly =
            ConvexBody::from_json(r#"{"type":"polygon","vertices":[[1,1],[0,0],[1,0],[0,1]]}"#)
                .unwrap();
        assert_eq!(ConvexBody::from_json(&poly.to_json()).unwrap(), poly);
    }

    #[test]
    fn malformed_inputs_are_errors() {
        for doc in [
            "not json",
            r#"{"type":"sphere","d":3}"#,
            r#"{"type":"ball","center":[0,0],"radius":-1}"#,
            r#"{"type":"polygon","vertices":[[0,0],[1,0]]}"#,
            r#"{"type":"cube","d":9}"#,
            r#"{"type":"affine","base":{"type":"cube","d":2},"matrix":[[1,1],[1,1]],"shift":[0,0]}"#,
        ] {
            assert!(ConvexBody::from_json(doc).is_err(), "{doc}");
        }
    }
}
