//! Counter-based random streams and uniform samplers for bodies and slices.
//!
//! Draw `k` of a stream is `fmix64(seed + GAMMA * (k + 1))`, the SplitMix64
//! output function applied to a Weyl sequence, so every draw is a pure
//! function of `(seed, k)`. Substream `i` of a seed is the seed
//! `fmix64(value + GAMMA * (i + 1))`; `fmix64` is a bijection and `GAMMA` is
//! odd, so substreams are distinct for all `i < 2^64`.
//!
//! Gaussian draws use the ziggurat method of `rand_distr::StandardNormal`.

use rand_core::RngCore;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::bodies::{BoundingBox, ConvexBody, Point};
use crate::error::{invalid, Error, Result};
use crate::estimators::{batch, MomentEstimate};

/// Weyl increment (2^64 / golden ratio, odd).
pub const GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;
/// First multiplier of the finalizer.
pub const MIX1: u64 = 0xBF58_476D_1CE4_E5B9;
/// Second multiplier of the finalizer.
pub const MIX2: u64 = 0x94D0_49BB_1331_11EB;

/// Consecutive rejections after which a sampler reports a degenerate body.
pub const REJECTION_LIMIT: u64 = 1_000_000;

/// SplitMix64 finalizer; a bijection on `u64`.
#[inline]
pub fn fmix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(MIX1);
    z = (z ^ (z >> 27)).wrapping_mul(MIX2);
    z ^ (z >> 31)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Seed {
    value: u64,
}

impl Seed {
    pub const fn new(value: u64) -> Self {
        Seed { value }
    }

    pub fn value(&self) -> u64 {
        self.value
    }

    /// Seed of substream `i`.
    #[inline]
    pub fn substream(&self, i: u64) -> Seed {
        Seed {
            value: fmix64(
                self.value
                    .wrapping_add(GAMMA.wrapping_mul(i.wrapping_add(1))),
            ),
        }
    }
}

impl From<u64> for Seed {
    fn from(value: u64) -> Self {
        Seed::new(value)
    }
}

/// A stream of draws indexed by a counter.
#[derive(Clone, Debug)]
pub struct SampleStream {
    seed: Seed,
    counter: u64,
}

impl SampleStream {
    pub fn new(seed: Seed) -> Self {
        SampleStream { seed, counter: 0 }
    }

    pub fn seed(&self) -> Seed {
        self.seed
    }

    /// Number of 64-bit draws consumed so far.
    pub fn counter(&self) -> u64 {
        self.counter
    }

    /// The `k`-th draw, independent of the current position.
    #[inline]
    pub fn draw_at(seed: Seed, k: u64) -> u64 {
        fmix64(
            seed.value
                .wrapping_add(GAMMA.wrapping_mul(k.wrapping_add(1))),
        )
    }

    /// Uniform on `[0, 1)` with 53 random bits.
    #[inline]
    pub fn uniform01(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    #[inline]
    pub fn uniform(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.uniform01()
    }

    #[inline]
    pub fn standard_normal(&mut self) -> f64 {
        StandardNormal.sample(self)
    }

    pub fn uniform_in_box(&mut self, b: &BoundingBox) -> Point {
        let mut p = b.lo;
        for i in 0..p.dim() {
            p[i] = self.uniform(b.lo[i], b.hi[i]);
        }
        p
    }
}

impl RngCore for SampleStream {
    #[inline]
    fn next_u32(&mut self) -> u32 {
        (self.next_u64() >> 32) as u32
    }

    #[inline]
    fn next_u64(&mut self) -> u64 {
        let z = Self::draw_at(self.seed, self.counter);
        self.counter += 1;
        z
    }

    fn fill_bytes(&mut self, dst: &mut [u8]) {
        rand_core::impls::fill_bytes_via_next(self, dst)
    }
}

/// Uniform point in the unit ball `B_d`: a normalized Gaussian vector scaled
/// by `U^(1/d)`.
#[inline]
pub fn sample_ball(d: usize, stream: &mut SampleStream) -> Point {
    let mut p = Point::zeros(d);
    let mut r2 = 0.0;
    while r2 == 0.0 {
        for x in p.iter_mut() {
            *x = stream.standard_normal();
        }
        r2 = p.norm_sq();
    }
    // 1 - U lies in (0, 1], so the radius is never exactly zero-biased.
    let radius = (1.0 - stream.uniform01()).powf(1.0 / d as f64);
    p.scale(radius / r2.sqrt())
}

/// Uniform point in `body`.
///
/// Balls, half-balls and the half-ball/cone family are sampled directly,
/// affine images by mapping samples of the base, cuts by rejection from the
/// base sampler (or from their bounding box when it is smaller than the base)
/// and everything else by rejection from the bounding box.
pub fn sample_body(body: &ConvexBody, stream: &mut SampleStream) -> Result<Point> {
    match body {
        ConvexBody::Ball(b) => Ok(b
            .center()
            .axpy(b.radius(), &sample_ball(b.center().dim(), stream))),
        ConvexBody::HalfBallCone(c) => {
            let d = c.dim();
            if stream.uniform01() < c.cone_fraction() {
                let s = (c.s0_pow_d + stream.uniform01() * (1.0 - c.s0_pow_d)).powf(1.0 / d as f64);
                let disk = sample_ball(d - 1, stream);
                let mut p = Point::zeros(d);
                p[0] = -c.eps() * (1.0 - s);
                p[1..].copy_from_slice(&disk.scale(s));
                Ok(p)
            } else {
                let mut p = sample_ball(d, stream);
                p[0] = p[0].abs();
                Ok(p)
            }
        }
        ConvexBody::Cut(cut) => {
            let h = cut.halfspace();
            if cut.as_half_ball().is_some() {
                let p = sample_body(cut.base(), stream)?;
                let s = h.value(&p);
                return Ok(if s < 0.0 {
                    p.axpy(-2.0 * s, h.normal())
                } else {
                    p
                });
            }
            if let Some(bb) = &cut.proposal {
                for _ in 0..REJECTION_LIMIT {
                    let p = stream.uniform_in_box(bb);
                    if body.contains_within(&p, 0.0) {
                        return Ok(p);
                    }
                }
                return Err(Error::RejectionLimit(REJECTION_LIMIT));
            }
            for _ in 0..REJECTION_LIMIT {
                let p = sample_body(cut.base(), stream)?;
                if h.contains(&p) {
                    return Ok(p);
                }
            }
            Err(Error::RejectionLimit(REJECTION_LIMIT))
        }
        ConvexBody::AffineImage(a) => Ok(a.apply(&sample_body(a.base(), stream)?)),
        ConvexBody::HPolytope(_) | ConvexBody::Polygon2D(_) => {
            let bb = match body {
                ConvexBody::HPolytope(p) => *p.bound(),
                ConvexBody::Polygon2D(p) => p.bounding_box(),
                _ => unreachable!(),
            };
            for _ in 0..REJECTION_LIMIT {
                let p = stream.uniform_in_box(&bb);
                if body.contains_within(&p, 0.0) {
                    return Ok(p);
                }
            }
            Err(Error::RejectionLimit(REJECTION_LIMIT))
        }
    }
}

/// Proposal for uniform sampling on the slice `body ∩ {<v, x> = t}`.
///
/// The hyperplane gets the orthonormal basis obtained by Gram-Schmidt from
/// `v` followed by the coordinate axes in ascending order of `|v_i|` (ties
/// by lower index). Proposals are uniform in the `(d-1)`-box centered at the
/// projection of the bounding-box center, with half-width
/// `sqrt(R^2 - delta^2)` where `R` is the bounding-box half-diagonal and
/// `delta` the distance from the center to the hyperplane.
#[derive(Clone, Debug)]
pub struct SliceProposal {
    v: Point,
    t: f64,
    origin: Point,
    basis: Vec<Point>,
    half_width: f64,
}

/// Membership tolerance for slice points, which are projected onto the
/// hyperplane and may sit on a face of the body.
pub const SLICE_TOL: f64 = 1e-12;

impl SliceProposal {
    pub fn new(body: &ConvexBody, v: &Point, t: f64) -> Result<Self> {
        let d = body.dim();
        v.check_dim(d)?;
        if d < 2 {
            return Err(invalid("slices need d >= 2"));
        }
        let norm = v.norm();
        if (norm - 1.0).abs() > 1e-9 {
            return Err(invalid("slice direction must be a unit vector"));
        }
        let v = v.scale(1.0 / norm);
        let bb = body.bounding_box();
        let c = bb.center();
        let delta = t - v.dot(&c);
        let r = bb.half_diagonal();
        if delta.abs() >= r {
            return Err(Error::DegenerateSlice(format!(
                "hyperplane at t = {t} misses the bounding box"
            )));
        }
        let origin = c.axpy(delta, &v);
        let mut axes: Vec<usize> = (0..d).collect();
        axes.sort_by(|&i, &j| v[i].abs().total_cmp(&v[j].abs()).then(i.cmp(&j)));
        let mut candidates = vec![v];
        candidates.extend(axes.iter().map(|&i| Point::axis(d, i)));
        let mut basis = crate::linalg::orthonormalize(&candidates, 1e-9)?;
        basis.truncate(d);
        basis.remove(0);
        Ok(SliceProposal {
            v,
            t,
            origin,
            basis,
            half_width: (r * r - delta * delta).sqrt(),
        })
    }

    /// `(d-1)`-volume of the proposal box.
    pub fn box_measure(&self) -> f64 {
        (2.0 * self.half_width).powi(self.basis.len() as i32)
    }

    pub fn basis(&self) -> &[Point] {
        &self.basis
    }

    /// One proposal, projected exactly onto the hyperplane.
    #[inline]
    pub fn propose(&self, stream: &mut SampleStream) -> Point {
        let mut p = self.origin;
        for b in &self.basis {
            p = p.axpy(stream.uniform(-self.half_width, self.half_width), b);
        }
        p.axpy(self.t - self.v.dot(&p), &self.v)
    }

    /// Uniform point of the slice by rejection.
    #[inline]
    pub fn sample(&self, body: &ConvexBody, stream: &mut SampleStream) -> Result<Point> {
        for _ in 0..REJECTION_LIMIT {
            let p = self.propose(stream);
            if body.contains_within(&p, SLICE_TOL) {
                return Ok(p);
            }
        }
        Err(Error::RejectionLimit(REJECTION_LIMIT))
    }
}

/// Uniform point on `body ∩ {<v, x> = t}`.
pub fn sample_slice(
    body: &ConvexBody,
    v: &Point,
    t: f64,
    stream: &mut SampleStream,
) -> Result<Point> {
    SliceProposal::new(body, v, t)?.sample(body, stream)
}

/// `(d-1)`-volume of `body ∩ {<v, x> = t}`: acceptance rate of `n` slice
/// proposals times the proposal-box measure.
pub fn slice_measure(
    body: &ConvexBody,
    v: &Point,
    t: f64,
    n: u64,
    seed: Seed,
) -> Result<MomentEstimate> {
    let proposal = SliceProposal::new(body, v, t)?;
    let scale = proposal.box_measure();
    let sums = batch::run(n, seed, |acc: &mut f64, stream| {
        if body.contains_within(&proposal.propose(stream), SLICE_TOL) {
            *acc += 1.0;
        }
        Ok(())
    })?;
    let hits: f64 = sums.iter().map(|(s, _)| s).sum();
    let p = hits / n as f64;
    let stderr = (p * (1.0 - p) / n as f64).sqrt() * scale;
    Ok(MomentEstimate {
        mean: p * scale,
        stderr,
        n,
        k: None,
        seed,
    })
}
