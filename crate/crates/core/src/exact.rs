//! Closed-form ball constants and random-simplex moments, evaluated in log
//! space with `libm::lgamma`.

use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{invalid, Result};

/// `sign * exp(log_magnitude)`, with exponentiation deferred.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ExactValue {
    pub sign: i8,
    pub log_magnitude: f64,
}

impl ExactValue {
    pub const ZERO: ExactValue = ExactValue {
        sign: 0,
        log_magnitude: f64::NEG_INFINITY,
    };
    pub const ONE: ExactValue = ExactValue {
        sign: 1,
        log_magnitude: 0.0,
    };

    pub fn from_log(log_magnitude: f64) -> Self {
        ExactValue {
            sign: 1,
            log_magnitude,
        }
    }

    pub fn from_f64(x: f64) -> Self {
        if x == 0.0 {
            Self::ZERO
        } else {
            ExactValue {
                sign: if x > 0.0 { 1 } else { -1 },
                log_magnitude: x.abs().ln(),
            }
        }
    }

    pub fn value(&self) -> f64 {
        self.sign as f64 * self.log_magnitude.exp()
    }

    pub fn ln(&self) -> f64 {
        self.log_magnitude
    }

    pub fn is_finite(&self) -> bool {
        self.sign == 0 || self.log_magnitude.is_finite()
    }

    pub fn mul(&self, other: &ExactValue) -> ExactValue {
        if self.sign == 0 || other.sign == 0 {
            return Self::ZERO;
        }
        ExactValue {
            sign: self.sign * other.sign,
            log_magnitude: self.log_magnitude + other.log_magnitude,
        }
    }

    /// Panics on division by zero.
    pub fn div(&self, other: &ExactValue) -> ExactValue {
        assert!(other.sign != 0, "division by an exact zero");
        if self.sign == 0 {
            return Self::ZERO;
        }
        ExactValue {
            sign: self.sign * other.sign,
            log_magnitude: self.log_magnitude - other.log_magnitude,
        }
    }

    pub fn powi(&self, k: i64) -> ExactValue {
        if k == 0 {
            return Self::ONE;
        }
        let sign = if self.sign < 0 && k % 2 != 0 {
            -1
        } else {
            self.sign.abs()
        };
        ExactValue {
            sign,
            log_magnitude: self.log_magnitude * k as f64,
        }
    }

    /// Sum, by log-sum-exp for equal signs.
    pub fn add(&self, other: &ExactValue) -> ExactValue {
        if self.sign == 0 {
            return *other;
        }
        if other.sign == 0 {
            return *self;
        }
        let (big, small) = if self.log_magnitude >= other.log_magnitude {
            (self, other)
        } else {
            (other, self)
        };
        let r = (small.log_magnitude - big.log_magnitude).exp();
        if big.sign == small.sign {
            ExactValue {
                sign: big.sign,
                log_magnitude: big.log_magnitude + r.ln_1p(),
            }
        } else if r == 1.0 {
            Self::ZERO
        } else {
            ExactValue {
                sign: big.sign,
                log_magnitude: big.log_magnitude + (-r).ln_1p(),
            }
        }
    }
}

fn ln_kappa(d: u64) -> f64 {
    let h = d as f64 / 2.0;
    h * PI.ln() - libm::lgamma(1.0 + h)
}

/// Volume of the unit `d`-ball, `pi^(d/2) / Gamma(1 + d/2)`.
pub fn kappa(d: u64) -> ExactValue {
    ExactValue::from_log(ln_kappa(d))
}

/// Surface measure of the unit sphere in `R^d`, `d * kappa_d`.
pub fn omega(d: u64) -> ExactValue {
    assert!(d >= 1, "omega needs d >= 1");
    ExactValue::from_log((d as f64).ln() + ln_kappa(d))
}

fn ln_factorial(n: u64) -> f64 {
    libm::lgamma(n as f64 + 1.0)
}

/// `ln(omega_1 ... omega_k / (omega_{d+1} ... omega_{d+k}))`.
fn ln_omega_ratio(d: u64, k: u64) -> f64 {
    (1..=k).map(|i| omega(i).ln() - omega(d + i).ln()).sum()
}

fn check(d: u64, k: u64) -> Result<()> {
    if d == 0 || k == 0 {
        return Err(invalid("dimension and moment order must be positive"));
    }
    Ok(())
}

/// `E(V^k)` for the volume `V` of a simplex with `d + 1` uniform vertices in
/// the unit ball `B_d`.
pub fn ball_simplex_moment(d: u64, k: u64) -> Result<ExactValue> {
    check(d, k)?;
    let ln = -(k as f64) * ln_factorial(d)
        + (d + 1) as f64 * (ln_kappa(d + k) - ln_kappa(d))
        + ln_kappa(d * (d + k + 1))
        - ln_kappa((d + 1) * (d + k))
        + ln_omega_ratio(d, k);
    Ok(ExactValue::from_log(ln))
}

/// `E((vol conv(0, X_1..X_d))^k)` for `d` uniform points in `B_d`.
pub fn ball_pinned_moment(d: u64, k: u64) -> Result<ExactValue> {
    check(d, k)?;
    let ln = -(k as f64) * ln_factorial(d)
        + d as f64 * (ln_kappa(d + k) - ln_kappa(d))
        + ln_omega_ratio(d, k);
    Ok(ExactValue::from_log(ln))
}

/// Minimum over bodies `K` containing the origin of
/// `E(vol conv(0, X_1..X_d)) / vol K`, attained by centered ellipsoids.
pub fn busemann_min_ratio(d: u64) -> Result<ExactValue> {
    check(d, 1)?;
    let ln = -ln_factorial(d) + d as f64 * ln_kappa(d + 1) - (d + 1) as f64 * ln_kappa(d)
        + 2f64.ln()
        - omega(d + 1).ln();
    Ok(ExactValue::from_log(ln))
}

/// `(sqrt(d / 2pi), kappa_{d-1} / kappa_d, sqrt((d+1) / 2pi))`.
pub fn kappa_ratio_bounds(d: u64) -> Result<(f64, f64, f64)> {
    check(d, 1)?;
    let value = (ln_kappa(d - 1) - ln_kappa(d)).exp();
    Ok((
        (d as f64 / (2.0 * PI)).sqrt(),
        value,
        ((d + 1) as f64 / (2.0 * PI)).sqrt(),
    ))
}

/// Upper bound on pinned moment over half-ball moment:
/// `2^k (kappa_d / kappa_{d+k}) (kappa_{(d+1)(d+k)} / kappa_{d(d+k+1)})`.
pub fn moment_ratio_bound(d: u64, k: u64) -> Result<ExactValue> {
    check(d, k)?;
    if d < 2 {
        return Err(invalid("moment ratio bound needs d >= 2"));
    }
    let ln = k as f64 * 2f64.ln() + ln_kappa(d) - ln_kappa(d + k) + ln_kappa((d + 1) * (d + k))
        - ln_kappa(d * (d + k + 1));
    Ok(ExactValue::from_log(ln))
}

/// `2^k ((d+k+1) / (d(d+k+1) + k))^(k/2)`, defined for `d >= 4`.
pub fn chain_bound(d: u64, k: u64) -> Result<f64> {
    check(d, k)?;
    if d < 4 {
        return Err(invalid("chain bound is only defined for d >= 4"));
    }
    let (df, kf) = (d as f64, k as f64);
    let base = (df + kf + 1.0) / (df * (df + kf + 1.0) + kf);
    Ok((kf * 2f64.ln() + kf / 2.0 * base.ln()).exp())
}

/// Default scan limit for [`find_k0`].
pub const K_MAX_DEFAULT: u64 = 200;

/// Smallest `k <= k_max` with `moment_ratio_bound(d, k) < 1 - 1e-12`.
pub fn find_k0(d: u64, k_max: u64) -> Result<Option<u64>> {
    for k in 1..=k_max {
        if moment_ratio_bound(d, k)?.value() < 1.0 - 1e-12 {
            return Ok(Some(k));
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    #[test]
    fn kappa_and_omega_small_cases() {
        assert_eq!(kappa(0).value(), 1.0);
        assert!(rel(kappa(2).value(), PI) < 1e-15);
        assert!(rel(kappa(9).value(), 32.0 * PI.powi(4) / 945.0) < 1e-14);
        assert!(rel(omega(1).value(), 2.0) < 1e-15);
        assert!(rel(omega(3).value(), 4.0 * PI) < 1e-15);
    }

    #[test]
    fn exact_value_arithmetic() {
        let a = ExactValue::from_f64(3.0);
        let b = ExactValue::from_f64(-5.0);
        assert!((a.add(&b).value() + 2.0).abs() < 1e-14);
        assert!((a.mul(&b).value() + 15.0).abs() < 1e-13);
        assert!((b.div(&a).value() + 5.0 / 3.0).abs() < 1e-14);
        assert!((b.powi(3).value() + 125.0).abs() < 1e-11);
        assert_eq!(a.add(&ExactValue::from_f64(-3.0)), ExactValue::ZERO);
        assert_eq!(ExactValue::ZERO.add(&a), a);
    }

    #[test]
    fn moments_against_frozen_oracle() {
        // Reference values computed with 50-digit mpmath.
        let cases = [
            (ball_simplex_moment(1, 1), 2.0 / 3.0),
            (ball_simplex_moment(2, 1), 35.0 / (48.0 * PI)),
            (ball_simplex_moment(3, 1), 0.052726030549758768),
            (ball_simplex_moment(2, 2), 0.09375),
            (ball_simplex_moment(4, 1), 0.0088087797927446482),
            (ball_simplex_moment(4, 2), 0.00016075102880658436),
            (ball_pinned_moment(2, 1), 4.0 / (9.0 * PI)),
            (ball_pinned_moment(3, 1), 0.027611654181941542),
            (ball_pinned_moment(4, 1), 0.0040988796859162026),
        ];
        for (got, want) in cases {
            assert!(rel(got.unwrap().value(), want) < 1e-12, "{want}");
        }
        assert!(rel(ball_simplex_moment(3, 2).unwrap().value(), 0.016 / 3.0) < 1e-12);
    }

    #[test]
    fn busemann_values() {
        assert!(rel(busemann_min_ratio(1).unwrap().value(), 0.25) < 1e-14);
        assert!(rel(busemann_min_ratio(2).unwrap().value(), 0.045031637174372343) < 1e-12);
        assert!(rel(busemann_min_ratio(3).unwrap().value(), 0.006591796875) < 1e-12);
        assert!(
            rel(
                busemann_min_ratio(4).unwrap().value(),
                0.00083060668276912666
            ) < 1e-12
        );
    }

    #[test]
    fn ratio_bounds_and_chain() {
        assert!(
            rel(
                moment_ratio_bound(4, 1).unwrap().value(),
                0.93063506691182018
            ) < 1e-12
        );
        assert!(rel(moment_ratio_bound(3, 1).unwrap().value(), 1.04736328125) < 1e-12);
        assert!(moment_ratio_bound(3, 2).unwrap().ln().abs() <= 1e-12);
        assert!(rel(chain_bound(4, 1).unwrap(), 0.97979589711327124) < 1e-14);
        assert!(rel(chain_bound(10, 1).unwrap(), 0.62983665729777356) < 1e-14);
        assert!(rel(chain_bound(4, 5).unwrap(), 0.74493553902780315) < 1e-13);
        assert!(chain_bound(3, 1).is_err());
        assert!(moment_ratio_bound(1, 1).is_err());
    }

    #[test]
    fn k0_values() {
        assert_eq!(find_k0(2, K_MAX_DEFAULT).unwrap(), Some(8));
        assert_eq!(find_k0(3, K_MAX_DEFAULT).unwrap(), Some(3));
        assert_eq!(find_k0(4, K_MAX_DEFAULT).unwrap(), Some(1));
        assert_eq!(find_k0(2, 7).unwrap(), None);
    }

    #[test]
    fn kappa_ratio_reference() {
        let (lo, v, hi) = kappa_ratio_bounds(16).unwrap();
        assert!(
            (lo - 1.5957691).abs() < 1e-7
                && (v - 1.6208824).abs() < 1e-7
                && (hi - 1.6448812).abs() < 1e-7
        );
        let (lo, v, hi) = kappa_ratio_bounds(1).unwrap();
        assert!(lo <= v && v <= hi && (v - 0.5).abs() < 1e-15);
    }
}
