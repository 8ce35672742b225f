//! Derivatives of `det A(K_t)` and of symmetric-function expectations as a
//! body is cut by the moving halfspace `H_t = {<v, x> >= t}`, with
//! finite-difference checks.
//!
//! Both formulas hold at the left end `t = a` of a family. Interior `t` is
//! handled by re-basing: `K_t` is itself a body whose infimum of `<v, x>` is
//! `t`. Since `K_t` shrinks as `t` grows, volume-like statistics have
//! negative derivatives.

use std::fmt;
use std::sync::Arc;

use serde::Serialize;

use crate::bodies::{ConvexBody, Halfspace, Point};
use crate::error::{invalid, Error, Result};
use crate::estimators::{
    self, batch, covariance_estimate, det_cov_estimate, isotropic_map, isotropy_deviation,
    moment_estimate, volume_estimate, MomentEstimate,
};
use crate::sampling::{sample_body, slice_measure, SampleStream, Seed, SliceProposal};
use crate::MAX_DIM;

/// Maximum deviation from isotropy accepted by [`detcov_derivative_rhs`].
pub const ISOTROPY_TOL: f64 = 0.05;

/// Bodies `K_t = K ∩ {<v, x> >= t}` for `t` in `[a, b)`.
#[derive(Clone, Debug)]
pub struct CutFamily {
    body: ConvexBody,
    v: Point,
    a: f64,
    b: f64,
}

impl CutFamily {
    /// `a` and `b` come from the support function when it has a closed form,
    /// otherwise from the extremes of `10^5` sampled points.
    pub fn new(body: ConvexBody, v: Point) -> Result<Self> {
        v.check_dim(body.dim())?;
        let norm = v.norm();
        if (norm - 1.0).abs() > 1e-9 {
            return Err(invalid("cut direction must be a unit vector"));
        }
        let v = v.scale(1.0 / norm);
        let (a, b) = match body.width_interval(&v) {
            Some(ab) => ab,
            None => sampled_extent(&body, &v)?,
        };
        Self::with_range(body, v, a, b)
    }

    pub fn with_range(body: ConvexBody, v: Point, a: f64, b: f64) -> Result<Self> {
        if !(a < b) {
            return Err(invalid("cut family needs a < b"));
        }
        Ok(CutFamily { body, v, a, b })
    }

    pub fn body(&self) -> &ConvexBody {
        &self.body
    }

    pub fn v(&self) -> &Point {
        &self.v
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn halfspace(&self, t: f64) -> Result<Halfspace> {
        Halfspace::new(self.v, t)
    }

    /// `K_t`; `t <= a` gives the body itself.
    pub fn body_at(&self, t: f64) -> Result<ConvexBody> {
        if t >= self.b {
            return Err(Error::EmptyInterior(format!(
                "t = {t} is not below b = {}",
                self.b
            )));
        }
        if t <= self.a {
            return Ok(self.body.clone());
        }
        self.body.intersect_halfspace(&self.halfspace(t)?)
    }

    /// The family starting at `K_t`, mapped to isotropic position by an
    /// estimated affine map. Returns the new family and its left end, which
    /// is the image of the hyperplane `<v, x> = t`.
    pub fn rebase_isotropic(&self, t: f64, n: u64, seed: Seed) -> Result<CutFamily> {
        let kt = self.body_at(t)?;
        let (m, shift) = isotropic_map(&kt, n, seed)?;
        let image = kt.affine_image(&m, &shift)?;
        let h = self
            .halfspace(t.max(self.a))?
            .mapped(&m.inverse()?, &shift)?;
        let v = *h.normal();
        let (lo, hi) = match image.width_interval(&v) {
            Some(ab) => ab,
            None => sampled_extent(&image, &v)?,
        };
        let a = if t > self.a { h.offset() } else { lo };
        Self::with_range(image, v, a, hi)
    }
}

fn sampled_extent(body: &ConvexBody, v: &Point) -> Result<(f64, f64)> {
    let mut st = SampleStream::new(Seed::new(0x00E8_7E17));
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for _ in 0..100_000 {
        let s = v.dot(&sample_body(body, &mut st)?);
        lo = lo.min(s);
        hi = hi.max(s);
    }
    Ok((lo, hi))
}

type SymFn = dyn Fn(&[Point]) -> f64 + Send + Sync;

/// A symmetric function of `arity` points.
#[derive(Clone)]
pub struct SymmetricFunction {
    name: String,
    arity: usize,
    f: Arc<SymFn>,
}

impl fmt::Debug for SymmetricFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "SymmetricFunction({}, q = {})", self.name, self.arity)
    }
}

impl SymmetricFunction {
    /// Symmetry is the caller's promise; see [`SymmetricFunction::symmetry_defect`].
    pub fn new(
        name: impl Into<String>,
        arity: usize,
        f: impl Fn(&[Point]) -> f64 + Send + Sync + 'static,
    ) -> Self {
        assert!((1..=2 * MAX_DIM).contains(&arity), "arity out of range");
        SymmetricFunction {
            name: name.into(),
            arity,
            f: Arc::new(f),
        }
    }

    pub fn one(q: usize) -> Self {
        Self::new("one", q, |_| 1.0)
    }

    /// Sum of all coordinates of all `q` points.
    pub fn coordsum(q: usize) -> Self {
        Self::new("coordsum", q, |pts| {
            pts.iter().map(|p| p.iter().sum::<f64>()).sum()
        })
    }

    /// `vol(conv(x_0, ..., x_d))^k`, arity `d + 1`.
    pub fn simplex_volume(d: usize, k: u32) -> Self {
        Self::new("simplexvol", d + 1, move |pts| {
            estimators::simplex_volume_raw(pts).powi(k as i32)
        })
    }

    /// The `j`-th coordinate of a single point.
    pub fn coordinate(j: usize) -> Self {
        Self::new(format!("x{}", j + 1), 1, move |pts| pts[0][j])
    }

    /// `one`, `coordsum` (arity `d + 1`) or `simplexvol` (first moment).
    pub fn by_name(name: &str, d: usize) -> Result<Self> {
        match name {
            "one" => Ok(Self::one(d + 1)),
            "coordsum" => Ok(Self::coordsum(d + 1)),
            "simplexvol" => Ok(Self::simplex_volume(d, 1)),
            other => Err(invalid(format!(
                "unknown function {other:?}; expected one, coordsum or simplexvol"
            ))),
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    #[inline]
    pub fn eval(&self, points: &[Point]) -> f64 {
        (self.f)(points)
    }

    /// Largest `|f(x) - f(pi x)|` over `trials` random argument lists in
    /// `[-1, 1]^d` and random permutations.
    pub fn symmetry_defect(&self, d: usize, trials: usize, seed: Seed) -> f64 {
        let mut st = SampleStream::new(seed);
        let mut worst: f64 = 0.0;
        for _ in 0..trials {
            let pts: Vec<Point> = (0..self.arity)
                .map(|_| {
                    let mut p = Point::zeros(d);
                    p.iter_mut().for_each(|x| *x = st.uniform(-1.0, 1.0));
                    p
                })
                .collect();
            let mut perm = pts.clone();
            for i in (1..perm.len()).rev() {
                let j = (st.uniform01() * (i + 1) as f64) as usize;
                perm.swap(i, j.min(i));
            }
            worst = worst.max((self.eval(&pts) - self.eval(&perm)).abs());
        }
        worst
    }
}

/// `E f(X_1, ..., X_q)` over `body`.
pub fn symmetric_expectation(
    body: &ConvexBody,
    f: &SymmetricFunction,
    n: u64,
    seed: Seed,
) -> Result<MomentEstimate> {
    estimators::expectation(body, f.arity, n, seed, |pts| f.eval(pts))
}

/// `x * y / z` with independent errors combined to first order.
fn product_ratio(
    x: &MomentEstimate,
    y: &MomentEstimate,
    z: &MomentEstimate,
    n: u64,
    seed: Seed,
) -> MomentEstimate {
    let mean = x.mean * y.mean / z.mean;
    let var = (y.mean / z.mean * x.stderr).powi(2)
        + (x.mean / z.mean * y.stderr).powi(2)
        + (mean / z.mean * z.stderr).powi(2);
    MomentEstimate {
        mean,
        stderr: var.sqrt(),
        n,
        k: None,
        seed,
    }
}

/// `(d - E_{S_t} |X|^2) vol_{d-1}(S_t) / vol(K_t)`: the derivative of
/// `det A(K_s)` at `s = t` when `K_t` is isotropic.
///
/// Isotropy of `K_t` is checked first (deviation at most [`ISOTROPY_TOL`]).
/// A slice of measure zero gives exactly zero.
pub fn detcov_derivative_rhs(
    fam: &CutFamily,
    t: f64,
    n: u64,
    seed: Seed,
) -> Result<MomentEstimate> {
    let kt = fam.body_at(t)?;
    let d = kt.dim() as f64;
    let cov = covariance_estimate(&kt, n, seed.substream(3))?;
    let dev = isotropy_deviation(&cov);
    if dev > ISOTROPY_TOL {
        return Err(Error::NotIsotropic(dev));
    }
    let measure = slice_measure(&kt, fam.v(), t, n, seed.substream(1))?;
    if measure.mean == 0.0 {
        return Ok(MomentEstimate {
            mean: 0.0,
            stderr: 0.0,
            n,
            k: None,
            seed,
        });
    }
    let proposal = SliceProposal::new(&kt, fam.v(), t)?;
    batch::check_n(n)?;
    let sums = batch::run(n, seed.substream(0), |acc: &mut f64, st| {
        *acc += proposal.sample(&kt, st)?.norm_sq();
        Ok(())
    })?;
    let (m, s) = batch::mean_stderr(&sums);
    let factor = MomentEstimate {
        mean: d - m,
        stderr: s,
        n,
        k: None,
        seed,
    };
    let vol = volume_estimate(&kt, n, seed.substream(2))?;
    Ok(product_ratio(&factor, &measure, &vol, n, seed))
}

/// `d/ds det A(K_s)` at `s = t` in the family's own coordinates, for any
/// body.
///
/// `K_t` is moved to isotropic position by `y = M x + b`, the formula is
/// evaluated there and the result is carried back: with `c = |M^{-T} v|`
/// the cut offset scales by `1/c` and `det A` by `det(M)^2`, so
/// `d/dt det A(K_t) = det A(K_t) * rhs' / c`. The error of the estimated
/// `det A(K_t)` is folded in.
pub fn detcov_derivative(fam: &CutFamily, t: f64, n: u64, seed: Seed) -> Result<MomentEstimate> {
    let kt = fam.body_at(t)?;
    let (m, shift) = isotropic_map(&kt, n, seed.substream(10))?;
    let image = kt.affine_image(&m, &shift)?;
    let w = m.inverse()?.transpose().mul_vec(fam.v());
    let c = w.norm();
    let t_iso = (t.max(fam.a()) + w.dot(&shift)) / c;
    let (_, hi) = image
        .width_interval(&w.scale(1.0 / c))
        .unwrap_or((t_iso, f64::INFINITY));
    let iso = CutFamily::with_range(image, w.scale(1.0 / c), t_iso, hi)?;
    let rhs = detcov_derivative_rhs(&iso, t_iso, n, seed.substream(11))?;
    let det = det_cov_estimate(&kt, n, seed.substream(12))?;
    Ok(product_ratio(
        &rhs,
        &det,
        &MomentEstimate::exact(c, seed),
        n,
        seed,
    ))
}

/// `q (E f - E[f | X_1 in S_t]) vol_{d-1}(S_t) / vol(K_t)`: the derivative
/// of `E f` over `K_s` at `s = t`.
///
/// The two expectations share `X_2..X_q`: each sample contributes
/// `f(X_1, X_2..) - f(Y_1, X_2..)` with `Y_1` uniform on the slice, so
/// `f = 1` gives exactly zero.
pub fn crofton_derivative_rhs(
    fam: &CutFamily,
    t: f64,
    f: &SymmetricFunction,
    n: u64,
    seed: Seed,
) -> Result<MomentEstimate> {
    batch::check_n(n)?;
    let kt = fam.body_at(t)?;
    let measure = slice_measure(&kt, fam.v(), t, n, seed.substream(1))?;
    if measure.mean == 0.0 {
        return Err(Error::DegenerateSlice(format!(
            "slice at t = {t} has no sampled area"
        )));
    }
    let proposal = SliceProposal::new(&kt, fam.v(), t)?;
    let d = kt.dim();
    let q = f.arity();
    let sums = batch::run(n, seed.substream(0), |acc: &mut f64, st| {
        let mut pts = [Point::zeros(d); 2 * MAX_DIM];
        for p in pts.iter_mut().take(q) {
            *p = sample_body(&kt, st)?;
        }
        let free = f.eval(&pts[..q]);
        pts[0] = proposal.sample(&kt, st)?;
        *acc += free - f.eval(&pts[..q]);
        Ok(())
    })?;
    let (m, s) = batch::mean_stderr(&sums);
    let diff = MomentEstimate {
        mean: q as f64 * m,
        stderr: q as f64 * s,
        n,
        k: None,
        seed,
    };
    let vol = volume_estimate(&kt, n, seed.substream(2))?;
    Ok(product_ratio(&diff, &measure, &vol, n, seed))
}

/// A statistic of a body, for finite differences.
#[derive(Clone, Debug)]
pub enum Statistic {
    Volume,
    DetCov,
    Moment(u32),
    Expectation(SymmetricFunction),
    Constant(f64),
}

impl Statistic {
    pub fn evaluate(&self, body: &ConvexBody, n: u64, seed: Seed) -> Result<MomentEstimate> {
        match self {
            Statistic::Volume => estimators::volume_estimate(body, n, seed),
            Statistic::DetCov => det_cov_estimate(body, n, seed),
            Statistic::Moment(k) => moment_estimate(body, *k, n, seed),
            Statistic::Expectation(f) => symmetric_expectation(body, f, n, seed),
            Statistic::Constant(c) => Ok(MomentEstimate::exact(*c, seed)),
        }
    }
}

/// `(stat(K_{t+h}) - stat(K_t)) / h` from independent substreams.
pub fn finite_difference(
    fam: &CutFamily,
    t: f64,
    h: f64,
    statistic: &Statistic,
    n: u64,
    seed: Seed,
) -> Result<MomentEstimate> {
    if !(h > 0.0) || t + h > fam.b() {
        return Err(invalid("finite difference needs h > 0 and t + h <= b"));
    }
    let lo = statistic.evaluate(&fam.body_at(t)?, n, seed.substream(0))?;
    let hi = statistic.evaluate(&fam.body_at(t + h)?, n, seed.substream(1))?;
    let diff = hi.minus(&lo);
    Ok(MomentEstimate {
        mean: diff.mean / h,
        stderr: diff.stderr / h,
        n,
        k: None,
        seed,
    })
}

/// Default finite-difference step, `0.02 (b - a)`.
pub fn default_step(fam: &CutFamily) -> f64 {
    0.02 * (fam.b() - fam.a())
}

/// Finite differences at steps `h`, `h/2`, `h/4`.
pub fn h_refinement(
    fam: &CutFamily,
    t: f64,
    h: f64,
    statistic: &Statistic,
    n: u64,
    seed: Seed,
) -> Result<Vec<(f64, MomentEstimate)>> {
    (0..3)
        .map(|j| {
            let hj = h / f64::from(1 << j);
            finite_difference(fam, t, hj, statistic, n, seed.substream(j as u64)).map(|e| (hj, e))
        })
        .collect()
}

/// True when `|err(h/2^j)| <= |err(h/2^(j-1))| + sigmas * stderr` for each
/// refinement step, `err` being the distance to `target`.
pub fn refinement_is_monotone(
    steps: &[(f64, MomentEstimate)],
    target: &MomentEstimate,
    sigmas: f64,
) -> bool {
    steps.windows(2).all(|w| {
        let prev = (w[0].1.mean - target.mean).abs();
        let next = (w[1].1.mean - target.mean).abs();
        let sigma = w[0].1.stderr.hypot(w[1].1.stderr).hypot(target.stderr);
        next <= prev + sigmas * sigma
    })
}

/// Outcome of comparing `E V_L` with the pinned moment at the cone apex.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct CounterexampleReport {
    pub d: usize,
    pub eps: f64,
    pub moment: MomentEstimate,
    pub pinned_at_apex: MomentEstimate,
    /// `E V_L - E vol conv(apex, X_1..X_d)`; positive means monotonicity fails.
    pub delta: MomentEstimate,
    pub z: f64,
}

/// `Delta = E V_L - E vol conv(apex, X_1..X_d)` for `L` the half-ball with
/// a cone of height `eps`. The slice at the apex is a point, so the
/// conditional expectation in the derivative formula becomes the pinned
/// moment, and `Delta > 0` means cutting off the tip increases `E V`.
pub fn counterexample_derivative_test(
    d: usize,
    eps: f64,
    n: u64,
    seed: Seed,
) -> Result<CounterexampleReport> {
    if d < 2 {
        return Err(invalid("counterexample test needs d >= 2"));
    }
    let body = ConvexBody::half_ball_cone(d, eps, 0.0)?;
    let apex = match &body {
        ConvexBody::HalfBallCone(c) => c.apex(),
        _ => unreachable!(),
    };
    let moment = moment_estimate(&body, 1, n, seed.substream(0))?;
    let pinned = estimators::pinned_moment_estimate(&body, &apex, 1, n, seed.substream(1))?;
    let delta = moment.minus(&pinned);
    Ok(CounterexampleReport {
        d,
        eps,
        moment,
        pinned_at_apex: pinned,
        delta,
        z: delta.z_score(),
    })
}
