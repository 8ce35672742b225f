//! Experiment drivers with machine-readable reports.
//!
//! Every driver is deterministic in its seed. One-sided claims need `z >= 3`;
//! agreement checks use `4 sigma` windows.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::time::Instant;

use serde::Serialize;
use serde_json::Value;

use crate::bodies::{regular_simplex_vertices, ConvexBody, HPolytope, Halfspace, Point, Polygon2D};
use crate::derivatives::{
    counterexample_derivative_test, crofton_derivative_rhs, default_step, detcov_derivative,
    detcov_derivative_rhs, finite_difference, h_refinement, refinement_is_monotone, CutFamily,
    Statistic, SymmetricFunction,
};
use crate::error::{invalid, Result};
use crate::estimators::{
    isotropic_map, moment_estimate, nested_det_difference, pinned_moment_estimate, MomentEstimate,
};
use crate::exact;
use crate::sampling::{SampleStream, Seed};
use crate::symmetry2d::{plane_bound_pipeline, random_polygon};

/// Threshold for one-sided claims.
pub const Z_ONE_SIDED: f64 = 3.0;
/// Half-width, in standard errors, of equality windows.
pub const Z_WINDOW: f64 = 4.0;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
    Inconclusive,
}

impl Verdict {
    /// `Pass` for `z >= 3`, `Fail` for `z <= -3`, otherwise `Inconclusive`.
    pub fn one_sided(z: f64) -> Self {
        if z >= Z_ONE_SIDED {
            Verdict::Pass
        } else if z <= -Z_ONE_SIDED {
            Verdict::Fail
        } else {
            Verdict::Inconclusive
        }
    }

    pub fn from_bool(ok: bool) -> Self {
        if ok {
            Verdict::Pass
        } else {
            Verdict::Fail
        }
    }
}

/// Rounds to 12 significant digits.
pub fn sig12(x: f64) -> f64 {
    if x.is_finite() && x != 0.0 {
        format!("{x:.11e}").parse().unwrap_or(x)
    } else {
        x
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ExperimentReport {
    pub name: String,
    pub params: BTreeMap<String, Value>,
    /// Values are stored rounded to 12 significant digits.
    pub metrics: BTreeMap<String, f64>,
    pub verdict: Verdict,
    pub seed: u64,
    pub n: u64,
    pub wall_time_s: f64,
    #[serde(skip)]
    started: Option<Instant>,
}

impl ExperimentReport {
    pub fn new(name: &str, seed: Seed, n: u64) -> Self {
        ExperimentReport {
            name: name.to_string(),
            params: BTreeMap::new(),
            metrics: BTreeMap::new(),
            verdict: Verdict::Inconclusive,
            seed: seed.value(),
            n,
            wall_time_s: 0.0,
            started: Some(Instant::now()),
        }
    }

    pub fn param(mut self, key: &str, value: impl Serialize) -> Self {
        self.params.insert(
            key.to_string(),
            serde_json::to_value(value).unwrap_or(Value::Null),
        );
        self
    }

    pub fn metric(&mut self, key: &str, value: f64) {
        self.metrics.insert(key.to_string(), sig12(value));
    }

    /// `key` and `key_stderr`.
    pub fn estimate(&mut self, key: &str, e: &MomentEstimate) {
        self.metric(key, e.mean);
        self.metric(&format!("{key}_stderr"), e.stderr);
    }

    pub fn get(&self, key: &str) -> Option<f64> {
        self.metrics.get(key).copied()
    }

    pub fn finish(mut self, verdict: Verdict) -> Self {
        self.verdict = verdict;
        if let Some(t) = self.started.take() {
            self.wall_time_s = sig12(t.elapsed().as_secs_f64());
        }
        self
    }

    /// One JSON line.
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("report serializes")
    }
}

/// One row of the exact table. Undefined entries are `None`.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct ExactRow {
    pub d: u64,
    pub k: u64,
    pub ball_moment: f64,
    pub pinned_moment: f64,
    pub ratio_bound: Option<f64>,
    pub chain_bound: Option<f64>,
}

pub fn exact_rows(ds: &[u64], ks: &[u64]) -> Result<Vec<ExactRow>> {
    let mut rows = Vec::new();
    for &d in ds {
        for &k in ks {
            rows.push(ExactRow {
                d,
                k,
                ball_moment: exact::ball_simplex_moment(d, k)?.value(),
                pinned_moment: exact::ball_pinned_moment(d, k)?.value(),
                ratio_bound: exact::moment_ratio_bound(d, k).ok().map(|v| v.value()),
                chain_bound: exact::chain_bound(d, k).ok(),
            });
        }
    }
    Ok(rows)
}

/// Exact table; always passes once computed.
pub fn exact_table(ds: &[u64], ks: &[u64]) -> Result<(Vec<ExactRow>, ExperimentReport)> {
    let mut rep = ExperimentReport::new("exact-table", Seed::new(0), 0)
        .param("d", ds)
        .param("k", ks);
    let rows = exact_rows(ds, ks)?;
    for r in &rows {
        let tag = format!("[d={},k={}]", r.d, r.k);
        rep.metric(&format!("ball_moment{tag}"), r.ball_moment);
        rep.metric(&format!("pinned_moment{tag}"), r.pinned_moment);
        if let Some(v) = r.ratio_bound {
            rep.metric(&format!("ratio_bound{tag}"), v);
        }
        if let Some(v) = r.chain_bound {
            rep.metric(&format!("chain_bound{tag}"), v);
        }
    }
    Ok((rows, rep.finish(Verdict::Pass)))
}

/// `E V^k` of a body, compared with the closed form for balls.
pub fn estimate(body: &ConvexBody, k: u32, n: u64, seed: Seed) -> Result<ExperimentReport> {
    let mut rep = ExperimentReport::new("estimate", seed, n)
        .param("k", k)
        .param("dim", body.dim());
    let e = moment_estimate(body, k, n, seed)?;
    rep.estimate("moment", &e);
    let mut verdict = Verdict::Pass;
    if let ConvexBody::Ball(b) = body {
        let d = body.dim();
        let target = exact::ball_simplex_moment(d as u64, k as u64)?.value()
            * b.radius().powi((d as u32 * k) as i32);
        rep.metric("exact", target);
        rep.metric("z", (e.mean - target) / e.stderr);
        verdict = Verdict::from_bool(e.agrees_with(target, Z_WINDOW));
    }
    Ok(rep.finish(verdict))
}

/// Which derivative [`derivative_check`] tests.
#[derive(Clone, Debug)]
pub enum DerivativeTarget {
    DetCov,
    Crofton(SymmetricFunction),
}

/// Analytic derivative at `t` against finite differences.
///
/// The comparison difference is centred on `t` (forward at the left end of
/// the family). Agreement means within 5% relative or 3 combined standard
/// errors; the forward-difference sequence at `h`, `h/2`, `h/4` must also
/// approach the analytic value.
pub fn derivative_check(
    body: &ConvexBody,
    v: &Point,
    t: f64,
    target: &DerivativeTarget,
    h: Option<f64>,
    n: u64,
    seed: Seed,
) -> Result<ExperimentReport> {
    let fam = CutFamily::new(body.clone(), *v)?;
    let h = h.unwrap_or_else(|| default_step(&fam));
    let (name, stat) = match target {
        DerivativeTarget::DetCov => ("detcov".to_string(), Statistic::DetCov),
        DerivativeTarget::Crofton(f) => (f.name().to_string(), Statistic::Expectation(f.clone())),
    };
    let mut rep = ExperimentReport::new("derivative-check", seed, n)
        .param("f", &name)
        .param("t", t)
        .param("h", h)
        .param("v", v.coords());
    let rhs = match target {
        DerivativeTarget::DetCov => detcov_derivative(&fam, t, n, seed.substream(0))?,
        DerivativeTarget::Crofton(f) => crofton_derivative_rhs(&fam, t, f, n, seed.substream(0))?,
    };
    let start = if t - h / 2.0 >= fam.a() {
        t - h / 2.0
    } else {
        t
    };
    let fd = finite_difference(&fam, start, h, &stat, n, seed.substream(1))?;
    let steps = h_refinement(&fam, t, h, &stat, n, seed.substream(2))?;
    let agree = agreement(&rhs, &fd);
    let monotone = refinement_is_monotone(&steps, &rhs, Z_ONE_SIDED);
    rep.estimate("rhs", &rhs);
    rep.estimate("fd", &fd);
    for (j, (hj, e)) in steps.iter().enumerate() {
        rep.metric(&format!("refine_h{j}"), *hj);
        rep.estimate(&format!("refine_fd{j}"), e);
    }
    rep.metric(
        "relative_error",
        (rhs.mean - fd.mean).abs() / rhs.mean.abs(),
    );
    rep.metric("agree", f64::from(u8::from(agree)));
    rep.metric("monotone", f64::from(u8::from(monotone)));
    Ok(rep.finish(Verdict::from_bool(agree && monotone)))
}

/// `|a - b| <= max(0.05 |a|, 3 sigma)`.
pub fn agreement(analytic: &MomentEstimate, fd: &MomentEstimate) -> bool {
    let diff = (analytic.mean - fd.mean).abs();
    diff <= (0.05 * analytic.mean.abs()).max(Z_ONE_SIDED * analytic.stderr.hypot(fd.stderr))
}

/// `E V` of the half-ball minus the pinned moment at the centre of its flat
/// face, both estimated independently.
pub fn half_ball_gap(
    d: usize,
    n: u64,
    seed: Seed,
) -> Result<(MomentEstimate, MomentEstimate, MomentEstimate)> {
    let hb = ConvexBody::half_ball(d)?;
    let ev = moment_estimate(&hb, 1, n, seed.substream(0))?;
    let pinned = pinned_moment_estimate(&hb, &Point::zeros(d), 1, n, seed.substream(1))?;
    Ok((ev, pinned, ev.minus(&pinned)))
}

/// `Delta = E V_L - pinned(apex)` for the half-ball with a cone of height
/// `eps`, or for the plain half-ball (pinned at the face centre) when `eps`
/// is zero. A positive `Delta` means cutting the tip increases `E V`.
pub fn counterexample(d: usize, eps: f64, n: u64, seed: Seed) -> Result<ExperimentReport> {
    let mut rep = ExperimentReport::new("counterexample", seed, n)
        .param("d", d)
        .param("eps", eps);
    let (ev, pinned, delta) = if eps == 0.0 {
        half_ball_gap(d, n, seed)?
    } else {
        let r = counterexample_derivative_test(d, eps, n, seed)?;
        (r.moment, r.pinned_at_apex, r.delta)
    };
    rep.estimate("moment", &ev);
    rep.estimate("pinned_at_apex", &pinned);
    rep.estimate("delta", &delta);
    let z = delta.z_score();
    rep.metric("z", z);
    let lower = exact::ball_pinned_moment(d as u64, 1)?.value();
    let upper = exact::ball_simplex_moment(d as u64, 1)?.value() / 2.0;
    rep.metric("exact_pinned_ball", lower);
    rep.metric("exact_half_ball_moment", upper);
    Ok(rep.finish(Verdict::one_sided(z)))
}

/// The open case `d = 3, k = 1`: the half-ball gap is reported with its
/// error and the verdict is always inconclusive.
pub fn d3_probe(n: u64, seed: Seed) -> Result<ExperimentReport> {
    let mut rep = ExperimentReport::new("d3-probe", seed, n).param("d", 3);
    let (ev, pinned, delta) = half_ball_gap(3, n, seed)?;
    rep.estimate("moment", &ev);
    rep.estimate("pinned_at_centre", &pinned);
    rep.estimate("delta", &delta);
    rep.metric("z", delta.z_score());
    rep.metric(
        "exact_pinned_ball",
        exact::ball_pinned_moment(3, 1)?.value(),
    );
    Ok(rep.finish(Verdict::Inconclusive))
}

/// Smallest `k` with `moment_ratio_bound(d, k) < 1` for each `d`.
pub fn k0_scan(ds: &[u64], k_max: u64) -> Result<ExperimentReport> {
    let mut rep = ExperimentReport::new("k0-scan", Seed::new(0), 0)
        .param("d", ds)
        .param("k_max", k_max);
    let mut all = true;
    for &d in ds {
        match exact::find_k0(d, k_max)? {
            Some(k0) => {
                rep.metric(&format!("k0[d={d}]"), k0 as f64);
                rep.metric(
                    &format!("ratio_bound[d={d},k={k0}]"),
                    exact::moment_ratio_bound(d, k0)?.value(),
                );
                if k0 > 1 {
                    let prev = exact::moment_ratio_bound(d, k0 - 1)?.value();
                    rep.metric(&format!("ratio_bound[d={d},k={}]", k0 - 1), prev);
                }
            }
            None => all = false,
        }
    }
    Ok(rep.finish(if all {
        Verdict::Pass
    } else {
        Verdict::Inconclusive
    }))
}

/// Bodies for [`detcov_counterexample`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DetcovCase {
    Simplex,
    Ball,
    Square,
}

impl std::str::FromStr for DetcovCase {
    type Err = crate::Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "simplex" => Ok(DetcovCase::Simplex),
            "ball" => Ok(DetcovCase::Ball),
            "square" => Ok(DetcovCase::Square),
            other => Err(invalid(format!(
                "unknown body {other:?}; expected simplex, ball or square"
            ))),
        }
    }
}

/// Regular simplex in exact isotropic position: vertices at radius
/// `sqrt(d (d + 2))`.
pub fn isotropic_simplex_vertices(d: usize) -> Vec<Point> {
    let s = ((d * (d + 2)) as f64).sqrt();
    regular_simplex_vertices(d)
        .iter()
        .map(|p| p.scale(s))
        .collect()
}

/// Centroid of the facet opposite vertex `i`.
fn facet_center(vertices: &[Point], i: usize) -> Point {
    let d = vertices[0].dim();
    let mut c = Point::zeros(d);
    for (j, v) in vertices.iter().enumerate() {
        if j != i {
            c = c.axpy(1.0 / d as f64, v);
        }
    }
    c
}

/// Apex height of the capped simplex, as a multiple of the facet-centre
/// norm.
pub const CAP_HEIGHT: f64 = 1.3;
/// Cut depths inside the cap, as fractions of its height, for the
/// derivative and the nested pair.
pub const CAP_RHS_DEPTH: f64 = 0.3;
pub const CAP_PAIR_DEPTH: f64 = 0.5;

/// The isotropic simplex with a pyramid of height `CAP_HEIGHT` on the facet
/// opposite vertex 0, and the family cutting that pyramid from its apex.
/// Returns the family and the offset of the original facet.
pub fn capped_simplex_family(d: usize) -> Result<(CutFamily, f64)> {
    let verts = isotropic_simplex_vertices(d);
    let c = facet_center(&verts, 0);
    let norm = c.norm();
    let body = ConvexBody::HPolytope(HPolytope::capped_simplex(&verts, 0, c.scale(CAP_HEIGHT))?);
    let fam = CutFamily::new(body, c.scale(-1.0 / norm))?;
    Ok((fam, -norm))
}

/// Reversal of `det A` under inclusion.
///
/// `simplex` (`d = 3`) isotropizes a regular simplex by estimated moments and
/// records its smallest facet-centre norm against `sqrt(5/3)` and `sqrt(d)`.
/// The derivative for cuts parallel to a facet is recorded as well; it is
/// negative because the facet's mean squared norm is 5. The witness is the
/// simplex with a low pyramid on one facet, whose sides come within
/// `sqrt(d)` of the centroid: cutting into the pyramid raises `det A`, shown
/// by the derivative (`z >= 3`) and by a paired nested estimate (`z >= 3`).
///
/// `ball` (`d = 3`) is inconclusive by design: the isotropic ball has radius
/// `sqrt(5) > sqrt(3)`. `square` (`d = 2`) passes when the derivative at
/// each edge is at most `3 sigma` above zero.
pub fn detcov_counterexample(case: DetcovCase, n: u64, seed: Seed) -> Result<ExperimentReport> {
    match case {
        DetcovCase::Simplex => detcov_simplex(3, n, seed),
        DetcovCase::Ball => detcov_ball(3, n, seed),
        DetcovCase::Square => detcov_square(n, seed),
    }
}

fn detcov_simplex(d: usize, n: u64, seed: Seed) -> Result<ExperimentReport> {
    let mut rep = ExperimentReport::new("detcov-counterexample", seed, n)
        .param("body", "simplex")
        .param("d", d);
    let df = d as f64;
    // Isotropize by estimated moments and measure the facet centres.
    let raw = regular_simplex_vertices(d);
    let (m, shift) = isotropic_map(&ConvexBody::simplex(&raw)?, n, seed.substream(0))?;
    let mapped: Vec<Point> = raw.iter().map(|p| m.mul_vec(p).add(&shift)).collect();
    let min_norm = (0..=d)
        .map(|i| facet_center(&mapped, i).norm())
        .fold(f64::INFINITY, f64::min);
    let expected = ((df + 2.0) / df).sqrt();
    rep.metric("facet_center_norm", min_norm);
    rep.metric("facet_center_norm_expected", expected);
    rep.metric("sqrt_d", df.sqrt());
    let norm_ok = (min_norm - expected).abs() <= 0.01 && min_norm < df.sqrt();

    // Cuts parallel to a facet of the exact isotropic simplex.
    let verts = isotropic_simplex_vertices(d);
    let c = facet_center(&verts, 0);
    let fam = CutFamily::new(ConvexBody::simplex(&verts)?, c.scale(-1.0 / c.norm()))?;
    let facet_rhs = detcov_derivative_rhs(&fam, fam.a(), n, seed.substream(1))?;
    rep.estimate("facet_rhs", &facet_rhs);
    rep.metric("facet_rhs_z", facet_rhs.z_score());

    // The capped simplex witness.
    let (cap, facet_t) = capped_simplex_family(d)?;
    let depth = facet_t - cap.a();
    let t_rhs = cap.a() + CAP_RHS_DEPTH * depth;
    let rhs = detcov_derivative(&cap, t_rhs, n, seed.substream(2))?;
    let t_pair = cap.a() + CAP_PAIR_DEPTH * depth;
    let pair = nested_det_difference(&cap.body_at(t_pair)?, cap.body(), n, seed.substream(3))?;
    rep.metric("cap_height", CAP_HEIGHT);
    rep.metric("cap_rhs_t", t_rhs);
    rep.estimate("cap_rhs", &rhs);
    rep.metric("cap_rhs_z", rhs.z_score());
    rep.metric("cap_pair_t", t_pair);
    rep.metric("det_outer", pair.outer);
    rep.metric("det_inner", pair.inner);
    rep.estimate("det_increase", &pair.difference);
    rep.metric("det_increase_z", pair.difference.z_score());
    let ok = norm_ok && rhs.z_score() >= Z_ONE_SIDED && pair.difference.z_score() >= Z_ONE_SIDED;
    Ok(rep.finish(Verdict::from_bool(ok)))
}

fn detcov_ball(d: usize, n: u64, seed: Seed) -> Result<ExperimentReport> {
    let mut rep = ExperimentReport::new("detcov-counterexample", seed, n)
        .param("body", "ball")
        .param("d", d);
    let r = (d as f64 + 2.0).sqrt();
    let ball = ConvexBody::ball(Point::zeros(d), r)?;
    let fam = CutFamily::new(ball, Point::axis(d, 0))?;
    rep.metric("isotropic_radius", r);
    rep.metric("sqrt_d", (d as f64).sqrt());
    let rhs = detcov_derivative_rhs(&fam, fam.a(), n, seed.substream(0))?;
    rep.estimate("tangent_rhs", &rhs);
    let shallow = detcov_derivative(
        &fam,
        fam.a() + 0.05 * (fam.b() - fam.a()),
        n,
        seed.substream(1),
    )?;
    rep.estimate("shallow_rhs", &shallow);
    Ok(rep.finish(Verdict::Inconclusive))
}

fn detcov_square(n: u64, seed: Seed) -> Result<ExperimentReport> {
    let mut rep = ExperimentReport::new("detcov-counterexample", seed, n)
        .param("body", "square")
        .param("d", 2);
    // Side sqrt(12) gives unit variance in each coordinate.
    let h = 3f64.sqrt();
    let sq = ConvexBody::axis_box(Point::new(&[-h, -h])?, Point::new(&[h, h])?)?;
    let mut ok = true;
    for (i, (x, y)) in [(1.0, 0.0), (0.0, 1.0), (-1.0, 0.0), (0.0, -1.0)]
        .into_iter()
        .enumerate()
    {
        let fam = CutFamily::new(sq.clone(), Point::new(&[x, y])?)?;
        let rhs = detcov_derivative_rhs(&fam, fam.a(), n, seed.substream(i as u64))?;
        rep.estimate(&format!("edge{i}_rhs"), &rhs);
        ok &= rhs.mean <= Z_ONE_SIDED * rhs.stderr;
    }
    Ok(rep.finish(Verdict::from_bool(ok)))
}

/// A random polygon `L` and `K = L` cut by a random line crossing it between
/// 20% and 80% of its width in a random direction.
pub fn random_nested_pair(seed: Seed) -> Result<(Polygon2D, Polygon2D)> {
    let (outer, _) = random_polygon(10, seed.substream(0))?;
    let mut st = SampleStream::new(seed.substream(1));
    let th = st.uniform(0.0, 2.0 * PI);
    let v = Point::new(&[th.cos(), th.sin()])?;
    let lo = -outer.support(&v.scale(-1.0));
    let hi = outer.support(&v);
    let t = lo + st.uniform(0.2, 0.8) * (hi - lo);
    let inner = outer.clip(&Halfspace::new(v, t)?)?;
    Ok((inner, outer))
}

/// Nested polygon pairs `K ⊆ L`: checks `det A(K) <= det A(L) + 4 sigma`
/// (paired) and `E V_K <= E V_L + 4 sigma` (independent).
pub fn monotonicity_2d(pairs: usize, n: u64, seed: Seed) -> Result<ExperimentReport> {
    let mut rep = ExperimentReport::new("monotonicity-2d", seed, n).param("pairs", pairs);
    let (mut det_bad, mut ev_bad) = (0u32, 0u32);
    let (mut det_z, mut ev_z) = (f64::NEG_INFINITY, f64::NEG_INFINITY);
    for i in 0..pairs {
        let s = seed.substream(i as u64);
        let (inner, outer) = random_nested_pair(s)?;
        let (k, l) = (ConvexBody::from(inner), ConvexBody::from(outer));
        let det = nested_det_difference(&k, &l, n, s.substream(2))?.difference;
        let ev = moment_estimate(&k, 1, n, s.substream(3))?.minus(&moment_estimate(
            &l,
            1,
            n,
            s.substream(4),
        )?);
        det_z = det_z.max(det.z_score());
        ev_z = ev_z.max(ev.z_score());
        det_bad += u32::from(det.mean > Z_WINDOW * det.stderr);
        ev_bad += u32::from(ev.mean > Z_WINDOW * ev.stderr);
    }
    rep.metric("det_violations", f64::from(det_bad));
    rep.metric("ev_violations", f64::from(ev_bad));
    rep.metric("max_det_z", det_z);
    rep.metric("max_ev_z", ev_z);
    Ok(rep.finish(Verdict::from_bool(det_bad == 0 && ev_bad == 0)))
}

/// Pinned-ratio pipeline at a boundary point, as a report.
pub fn plane_check(poly: &Polygon2D, x: &Point, n: u64, seed: Seed) -> Result<ExperimentReport> {
    let mut rep = ExperimentReport::new("plane-check", seed, n).param("x", x.coords());
    let r = plane_bound_pipeline(poly, x, n, seed)?;
    rep.estimate("r0", &r.r0);
    rep.estimate("r1", &r.r1);
    rep.estimate("r2", &r.r2);
    rep.metric("bound", r.bound);
    rep.metric("area", poly.area());
    Ok(rep.finish(Verdict::from_bool(r.contract_holds())))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sig12_rounds() {
        assert_eq!(sig12(0.1234567890123456), 0.123456789012);
        assert_eq!(sig12(0.0), 0.0);
        assert!(sig12(f64::NAN).is_nan());
    }

    #[test]
    fn verdict_serializes_lowercase() {
        let r = ExperimentReport::new("x", Seed::new(1), 5).finish(Verdict::Inconclusive);
        let v: Value = serde_json::from_str(&r.to_json()).unwrap();
        assert_eq!(v["verdict"], "inconclusive");
        assert_eq!(v["seed"], 1);
    }

    #[test]
    fn exact_table_contains_flat_ratio() {
        let (rows, rep) = exact_table(&[2, 3, 4], &[1, 2, 3]).unwrap();
        assert_eq!(rows.len(), 9);
        assert!((rep.get("ratio_bound[d=3,k=2]").unwrap() - 1.0).abs() < 1e-12);
        assert!(rows
            .iter()
            .filter(|r| r.d < 4)
            .all(|r| r.chain_bound.is_none()));
    }

    #[test]
    fn k0_scan_matches_thresholds() {
        let rep = k0_scan(&[2, 3, 4], exact::K_MAX_DEFAULT).unwrap();
        assert_eq!(rep.get("k0[d=2]"), Some(8.0));
        assert_eq!(rep.get("k0[d=3]"), Some(3.0));
        assert_eq!(rep.get("k0[d=4]"), Some(1.0));
        assert_eq!(rep.verdict, Verdict::Pass);
    }

    #[test]
    fn nested_pair_is_nested() {
        let (k, l) = random_nested_pair(Seed::new(5)).unwrap();
        assert!(k.area() < l.area());
        assert!(k.vertices().iter().all(|p| l.contains_within(p, 1e-9)));
    }

    #[test]
    fn isotropic_simplex_has_unit_covariance() {
        let v = isotropic_simplex_vertices(3);
        // Vertex covariance of a centred simplex is R^2 / (d (d + 2)) I.
        assert!((v[0].norm_sq() - 15.0).abs() < 1e-12);
        assert!((facet_center(&v, 0).norm() - (5.0f64 / 3.0).sqrt()).abs() < 1e-12);
    }
}
