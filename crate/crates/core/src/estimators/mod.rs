//! Monte Carlo estimators: simplex-volume moments, pinned moments, centroid,
//! covariance, `det A(K)`, isotropic position and the isotropic constant.
//!
//! Errors are batch means over [`batch::BATCHES`] batches; determinants use a
//! leave-one-batch-out jackknife.

pub(crate) mod batch;

use serde::Serialize;

pub use batch::{BATCHES, MIN_SAMPLES};

use crate::bodies::{ConvexBody, Point};
use crate::error::{invalid, Error, Result};
use crate::linalg::{lu_det, Matrix};
use crate::sampling::{sample_body, SampleStream, Seed};
use crate::MAX_DIM;

/// A Monte Carlo estimate with its batch-means standard error.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct MomentEstimate {
    pub mean: f64,
    pub stderr: f64,
    pub n: u64,
    /// Moment order, when the estimate is a moment.
    pub k: Option<u32>,
    pub seed: Seed,
}

impl MomentEstimate {
    /// A known value, carried with zero error.
    pub fn exact(value: f64, seed: Seed) -> Self {
        MomentEstimate {
            mean: value,
            stderr: 0.0,
            n: 0,
            k: None,
            seed,
        }
    }

    pub fn z_score(&self) -> f64 {
        self.mean / self.stderr
    }

    /// `self - other` for independent estimates.
    pub fn minus(&self, other: &MomentEstimate) -> MomentEstimate {
        MomentEstimate {
            mean: self.mean - other.mean,
            stderr: self.stderr.hypot(other.stderr),
            n: self.n.max(other.n),
            k: if self.k == other.k { self.k } else { None },
            seed: self.seed,
        }
    }

    /// `|mean - target| <= sigmas * stderr`.
    pub fn agrees_with(&self, target: f64, sigmas: f64) -> bool {
        (self.mean - target).abs() <= sigmas * self.stderr
    }
}

/// Sample centroid and population covariance.
#[derive(Clone, Debug, PartialEq)]
pub struct CovarianceEstimate {
    pub centroid: Point,
    pub matrix: Matrix,
    pub n: u64,
    /// Largest batch-means standard error over the matrix entries.
    pub stderr_scale: f64,
    /// Largest batch-means standard error over the centroid coordinates.
    pub centroid_stderr: f64,
}

/// `|det(X_1 - X_0, ..., X_d - X_0)| / d!` without input checks.
#[inline]
pub(crate) fn simplex_volume_raw(points: &[Point]) -> f64 {
    let d = points.len() - 1;
    let mut a = [[0.0; MAX_DIM]; MAX_DIM];
    let p0 = &points[0];
    for (j, p) in points[1..].iter().enumerate() {
        for (i, row) in a.iter_mut().enumerate().take(d) {
            row[j] = p[i] - p0[i];
        }
    }
    lu_det(&mut a, d).abs() / FACTORIALS[d]
}

/// `|det(x_1 - x, ..., x_d - x)| / d!`.
#[inline]
pub(crate) fn pinned_volume_raw(x: &Point, points: &[Point]) -> f64 {
    let d = points.len();
    let mut a = [[0.0; MAX_DIM]; MAX_DIM];
    for (j, p) in points.iter().enumerate() {
        for (i, row) in a.iter_mut().enumerate().take(d) {
            row[j] = p[i] - x[i];
        }
    }
    lu_det(&mut a, d).abs() / FACTORIALS[d]
}

const FACTORIALS: [f64; MAX_DIM + 1] = [1.0, 1.0, 2.0, 6.0, 24.0, 120.0, 720.0, 5040.0, 40320.0];

/// Volume of the simplex with the given `d + 1` vertices in `R^d`.
pub fn simplex_volume(points: &[Point]) -> Result<f64> {
    let d = points
        .first()
        .map(|p| p.dim())
        .ok_or_else(|| invalid("no points"))?;
    if points.len() != d + 1 {
        return Err(invalid(format!(
            "a {d}-simplex needs {} points, got {}",
            d + 1,
            points.len()
        )));
    }
    for p in points {
        p.check_dim(d)?;
    }
    Ok(simplex_volume_raw(points))
}

/// `E g(X_1, ..., X_q)` for `q` independent uniform points of `body`.
pub fn expectation<G>(
    body: &ConvexBody,
    q: usize,
    n: u64,
    seed: Seed,
    g: G,
) -> Result<MomentEstimate>
where
    G: Fn(&[Point]) -> f64 + Sync,
{
    batch::check_n(n)?;
    if q == 0 || q > 2 * MAX_DIM {
        return Err(invalid("arity must lie in 1..=16"));
    }
    let d = body.dim();
    let sums = batch::run(n, seed, |acc: &mut f64, st| {
        let mut pts = [Point::zeros(d); 2 * MAX_DIM];
        for p in pts.iter_mut().take(q) {
            *p = sample_body(body, st)?;
        }
        *acc += g(&pts[..q]);
        Ok(())
    })?;
    let (mean, stderr) = batch::mean_stderr(&sums);
    Ok(MomentEstimate {
        mean,
        stderr,
        n,
        k: None,
        seed,
    })
}

/// `E(V^k)` for the volume `V` of the simplex spanned by `d + 1` uniform
/// points of `body`.
pub fn moment_estimate(body: &ConvexBody, k: u32, n: u64, seed: Seed) -> Result<MomentEstimate> {
    check_k(k)?;
    let d = body.dim();
    let mut est = expectation(body, d + 1, n, seed, |pts| {
        simplex_volume_raw(pts).powi(k as i32)
    })?;
    est.k = Some(k);
    Ok(est)
}

/// `E((vol conv(x, X_1, ..., X_d))^k)` for `d` uniform points of `body`.
/// `x` need not lie in the body.
pub fn pinned_moment_estimate(
    body: &ConvexBody,
    x: &Point,
    k: u32,
    n: u64,
    seed: Seed,
) -> Result<MomentEstimate> {
    check_k(k)?;
    let d = body.dim();
    x.check_dim(d)?;
    let mut est = expectation(body, d, n, seed, |pts| {
        pinned_volume_raw(x, pts).powi(k as i32)
    })?;
    est.k = Some(k);
    Ok(est)
}

fn check_k(k: u32) -> Result<()> {
    if k == 0 || k > 64 {
        return Err(invalid("moment order must lie in 1..=64"));
    }
    Ok(())
}

/// First and second moments about a fixed reference point.
#[derive(Clone)]
struct SecondMoments {
    s1: [f64; MAX_DIM],
    s2: [[f64; MAX_DIM]; MAX_DIM],
    count: u64,
}

impl Default for SecondMoments {
    fn default() -> Self {
        SecondMoments {
            s1: [0.0; MAX_DIM],
            s2: [[0.0; MAX_DIM]; MAX_DIM],
            count: 0,
        }
    }
}

impl SecondMoments {
    #[inline]
    fn push(&mut self, y: &Point) {
        let d = y.dim();
        for i in 0..d {
            self.s1[i] += y[i];
            for j in i..d {
                self.s2[i][j] += y[i] * y[j];
            }
        }
        self.count += 1;
    }

    fn add(&mut self, other: &SecondMoments, sign: f64) {
        for i in 0..MAX_DIM {
            self.s1[i] += sign * other.s1[i];
            for j in 0..MAX_DIM {
                self.s2[i][j] += sign * other.s2[i][j];
            }
        }
        if sign > 0.0 {
            self.count += other.count;
        } else {
            self.count -= other.count;
        }
    }

    /// Mean offset from the reference and population covariance.
    fn covariance(&self, d: usize) -> ([f64; MAX_DIM], Matrix) {
        let n = self.count as f64;
        let mut mean = [0.0; MAX_DIM];
        for i in 0..d {
            mean[i] = self.s1[i] / n;
        }
        let mut m = Matrix::zeros(d);
        for i in 0..d {
            for j in i..d {
                let c = self.s2[i][j] / n - mean[i] * mean[j];
                m.set(i, j, c);
                m.set(j, i, c);
            }
        }
        (mean, m)
    }
}

fn reference_point(body: &ConvexBody) -> Point {
    body.bounding_box().center()
}

fn second_moment_batches(
    body: &ConvexBody,
    n: u64,
    seed: Seed,
) -> Result<(Point, Vec<SecondMoments>)> {
    batch::check_n(n)?;
    let r = reference_point(body);
    let batches = batch::run(n, seed, |acc: &mut SecondMoments, st| {
        acc.push(&sample_body(body, st)?.sub(&r));
        Ok(())
    })?;
    Ok((r, batches.into_iter().map(|b| b.0).collect()))
}

fn total(batches: &[SecondMoments]) -> SecondMoments {
    let mut t = SecondMoments::default();
    for b in batches {
        t.add(b, 1.0);
    }
    t
}

/// Sample centroid `mu(K)` and covariance `A(K)` with `1/n` normalization.
pub fn covariance_estimate(body: &ConvexBody, n: u64, seed: Seed) -> Result<CovarianceEstimate> {
    let d = body.dim();
    let (r, batches) = second_moment_batches(body, n, seed)?;
    let (mean, matrix) = total(&batches).covariance(d);
    let per: Vec<([f64; MAX_DIM], Matrix)> = batches.iter().map(|b| b.covariance(d)).collect();
    let k = per.len() as f64;
    let mut stderr_scale: f64 = 0.0;
    let mut centroid_stderr: f64 = 0.0;
    for i in 0..d {
        let ss: f64 = per.iter().map(|(m, _)| (m[i] - mean[i]).powi(2)).sum();
        centroid_stderr = centroid_stderr.max((ss / (k * (k - 1.0))).sqrt());
        for j in i..d {
            let avg = per.iter().map(|(_, c)| c.get(i, j)).sum::<f64>() / k;
            let ss: f64 = per.iter().map(|(_, c)| (c.get(i, j) - avg).powi(2)).sum();
            stderr_scale = stderr_scale.max((ss / (k * (k - 1.0))).sqrt());
        }
    }
    let mut centroid = r;
    for i in 0..d {
        centroid[i] += mean[i];
    }
    Ok(CovarianceEstimate {
        centroid,
        matrix,
        n,
        stderr_scale,
        centroid_stderr,
    })
}

fn jackknife_det(batches: &[SecondMoments], d: usize) -> (f64, f64) {
    let all = total(batches);
    let full = all.covariance(d).1.det();
    let reps: Vec<f64> = batches
        .iter()
        .map(|b| {
            let mut loo = all.clone();
            loo.add(b, -1.0);
            loo.covariance(d).1.det()
        })
        .collect();
    (full, batch::jackknife_stderr(&reps))
}

/// `det A(K)` with a jackknife standard error over batches.
pub fn det_cov_estimate(body: &ConvexBody, n: u64, seed: Seed) -> Result<MomentEstimate> {
    let (_, batches) = second_moment_batches(body, n, seed)?;
    let (mean, stderr) = jackknife_det(&batches, body.dim());
    Ok(MomentEstimate {
        mean,
        stderr,
        n,
        k: None,
        seed,
    })
}

/// Determinants of a nested pair estimated from one sample of the outer
/// body, the inner body seeing the sample points that fall inside it.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct NestedDetEstimate {
    pub inner: f64,
    pub outer: f64,
    /// `det A(inner) - det A(outer)` with a paired jackknife error.
    pub difference: MomentEstimate,
    /// Fraction of outer samples that fell in the inner body.
    pub inner_fraction: f64,
}

/// `det A(K) - det A(L)` for `K ⊆ L`, paired through a common sample of `L`.
/// Containment is the caller's responsibility.
pub fn nested_det_difference(
    inner: &ConvexBody,
    outer: &ConvexBody,
    n: u64,
    seed: Seed,
) -> Result<NestedDetEstimate> {
    batch::check_n(n)?;
    let d = outer.dim();
    if inner.dim() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            got: inner.dim(),
        });
    }
    let r = reference_point(outer);
    let batches = batch::run(n, seed, |acc: &mut (SecondMoments, SecondMoments), st| {
        let x = sample_body(outer, st)?;
        let y = x.sub(&r);
        acc.1.push(&y);
        if inner.contains_within(&x, 0.0) {
            acc.0.push(&y);
        }
        Ok(())
    })?;
    let ins: Vec<SecondMoments> = batches.iter().map(|b| b.0 .0.clone()).collect();
    let outs: Vec<SecondMoments> = batches.iter().map(|b| b.0 .1.clone()).collect();
    let (ti, to) = (total(&ins), total(&outs));
    if (ti.count as usize) < 10 * (d + 1) {
        return Err(Error::EmptyInterior(
            "too few samples fell in the inner body".into(),
        ));
    }
    let det_i = ti.covariance(d).1.det();
    let det_o = to.covariance(d).1.det();
    let reps: Vec<f64> = ins
        .iter()
        .zip(&outs)
        .map(|(bi, bo)| {
            let mut li = ti.clone();
            li.add(bi, -1.0);
            let mut lo = to.clone();
            lo.add(bo, -1.0);
            li.covariance(d).1.det() - lo.covariance(d).1.det()
        })
        .collect();
    Ok(NestedDetEstimate {
        inner: det_i,
        outer: det_o,
        difference: MomentEstimate {
            mean: det_i - det_o,
            stderr: batch::jackknife_stderr(&reps),
            n,
            k: None,
            seed,
        },
        inner_fraction: ti.count as f64 / n as f64,
    })
}

/// Smallest covariance eigenvalue accepted by [`isotropic_transform`].
pub const MIN_EIGENVALUE: f64 = 1e-9;

/// `(M, b)` with `M = A^(-1/2)` and `b = -M mu` from estimated `mu` and `A`,
/// so that `x -> M x + b` puts the body in isotropic position.
pub fn isotropic_map(body: &ConvexBody, n: u64, seed: Seed) -> Result<(Matrix, Point)> {
    let cov = covariance_estimate(body, n, seed)?;
    let (vals, _) = cov.matrix.symmetric_eigen();
    if !(vals[0] > MIN_EIGENVALUE) {
        return Err(Error::SingularMatrix(vals[0]));
    }
    let m = cov.matrix.symmetric_function(|x| 1.0 / x.sqrt());
    let shift = m.mul_vec(&cov.centroid).scale(-1.0);
    Ok((m, shift))
}

/// The body moved to isotropic position by [`isotropic_map`].
pub fn isotropic_transform(body: &ConvexBody, n: u64, seed: Seed) -> Result<ConvexBody> {
    let (m, shift) = isotropic_map(body, n, seed)?;
    body.affine_image(&m, &shift)
}

/// Largest deviation from isotropic position: `max |A - I|` and `max |mu|`.
pub fn isotropy_deviation(cov: &CovarianceEstimate) -> f64 {
    let d = cov.matrix.order();
    let dev_a = cov.matrix.max_abs_diff(&Matrix::identity(d));
    let dev_mu = cov.centroid.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    dev_a.max(dev_mu)
}

/// `vol K`: exact when a closed form exists, otherwise hit rate in the
/// bounding box times the box volume, with a binomial error.
pub fn volume_estimate(body: &ConvexBody, n: u64, seed: Seed) -> Result<MomentEstimate> {
    if let Some(v) = body.exact_volume() {
        return Ok(MomentEstimate::exact(v, seed));
    }
    rejection_volume(body, n, seed)
}

/// Hit-or-miss volume in the bounding box, ignoring any closed form.
pub fn rejection_volume(body: &ConvexBody, n: u64, seed: Seed) -> Result<MomentEstimate> {
    batch::check_n(n)?;
    let bb = body.bounding_box();
    let sums = batch::run(n, seed, |acc: &mut f64, st: &mut SampleStream| {
        if body.contains_within(&st.uniform_in_box(&bb), 0.0) {
            *acc += 1.0;
        }
        Ok(())
    })?;
    let p = sums.iter().map(|s| s.0).sum::<f64>() / n as f64;
    let vb = bb.volume();
    Ok(MomentEstimate {
        mean: p * vb,
        stderr: (p * (1.0 - p) / n as f64).sqrt() * vb,
        n,
        k: None,
        seed,
    })
}

/// `L_K = (det A(K) / vol(K)^2)^(1/2d)`, errors combined by the delta method.
pub fn isotropic_constant_estimate(
    body: &ConvexBody,
    n: u64,
    seed: Seed,
) -> Result<MomentEstimate> {
    let d = body.dim() as f64;
    let det = det_cov_estimate(body, n, seed.substream(0))?;
    let vol = volume_estimate(body, n, seed.substream(1))?;
    if !(det.mean > 0.0) {
        return Err(Error::SingularMatrix(det.mean));
    }
    let l = (det.mean / (vol.mean * vol.mean)).powf(1.0 / (2.0 * d));
    let rel = (det.stderr / det.mean).hypot(2.0 * vol.stderr / vol.mean) / (2.0 * d);
    Ok(MomentEstimate {
        mean: l,
        stderr: l * rel,
        n,
        k: None,
        seed,
    })
}
