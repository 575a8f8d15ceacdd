//! Tunneling-time estimators built on a [`ProbabilityCurve`].

use crate::error::{LzError, Result};
use crate::model::{Basis, LzParams};
use crate::probability::ProbabilityCurve;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Diagnostics {
    /// Number of half-maximum crossings found for `t <= t_at_max_neg`.
    pub crossing_count: usize,
    /// `S2 < 0`: the probability winds back after the crossing.
    pub s2_negative: bool,
    /// Location of the maximum of `P` over `t <= 0`.
    pub t_at_max_neg: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TunnelingTimeReport {
    pub basis: Basis,
    pub params: LzParams,
    pub t_prime: f64,
    pub p_max_neg: f64,
    pub s1: f64,
    pub s2: f64,
    pub p_infinity: f64,
    pub tau: f64,
    /// `None` when `dP/dt(0)` vanishes.
    pub tau_vitanov: Option<f64>,
    pub tau_empirical: f64,
    pub diagnostics: Diagnostics,
}

/// Latest `t' < t_at_max_neg` with `P(t') = P_max/2`, and the number of such
/// crossings on the scan grid.
pub fn half_width_time(curve: &ProbabilityCurve<'_>) -> Result<(f64, usize)> {
    let half = 0.5 * curve.p_max_neg();
    let t_max = curve.t_at_max_neg();
    if !(half > 0.0) {
        return Err(LzError::NoCrossing { t_max });
    }
    let above = |p: f64| p >= half;

    let grid = curve.grid();
    let values = curve.grid_values();
    let end = grid.partition_point(|&t| t < t_max);
    let mut points: Vec<(f64, f64)> = grid[..end].iter().copied().zip(values[..end].iter().copied()).collect();
    points.push((t_max, curve.p_max_neg()));

    let mut count = 0;
    let mut bracket = None;
    for w in points.windows(2) {
        if above(w[0].1) != above(w[1].1) {
            count += 1;
            bracket = Some((w[0].0, w[1].0, above(w[0].1)));
        }
    }
    let (mut lo, mut hi, lo_above) = bracket.ok_or(LzError::NoCrossing { t_max })?;

    // bisect down to adjacent floats, well below 1e-10 |t_start|
    loop {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if above(curve.p(mid)?) == lo_above {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok((0.5 * (lo + hi), count))
}

/// `S1 = P(0)` and `S2 = P(∞) - P(0)`.
pub fn areas(curve: &ProbabilityCurve<'_>) -> Result<(f64, f64)> {
    let s1 = curve.p0();
    if !(s1 > 1e-300) {
        return Err(LzError::DegenerateS1 { s1 });
    }
    Ok((s1, curve.p_infinity() - s1))
}

/// `P(∞) / P'(0)`.
pub fn vitanov_time(curve: &ProbabilityCurve<'_>) -> Result<f64> {
    let slope = curve.dp_dt(0.0)?;
    if !(slope.abs() > 1e-300) {
        return Err(LzError::ZeroSlope { slope });
    }
    Ok(curve.p_infinity() / slope)
}

/// `sqrt(Δ²/α² + 2ħ/α)`.
pub fn empirical_time(params: &LzParams) -> f64 {
    let a = params.adiabatic_time();
    (a * a + 2.0 * params.hbar() / params.alpha()).sqrt()
}

/// `τ = |t'| (1 + |S2/S1|)` together with the comparison times.
pub fn tunneling_time(curve: &ProbabilityCurve<'_>) -> Result<TunnelingTimeReport> {
    let (t_prime, crossing_count) = half_width_time(curve)?;
    let (s1, s2) = areas(curve)?;
    let tau = t_prime.abs() * (1.0 + (s2 / s1).abs());
    let tau_vitanov = match vitanov_time(curve) {
        Ok(v) => Some(v),
        Err(LzError::ZeroSlope { .. }) => None,
        Err(e) => return Err(e),
    };
    Ok(TunnelingTimeReport {
        basis: curve.basis(),
        params: *curve.params(),
        t_prime,
        p_max_neg: curve.p_max_neg(),
        s1,
        s2,
        p_infinity: curve.p_infinity(),
        tau,
        tau_vitanov,
        tau_empirical: empirical_time(curve.params()),
        diagnostics: Diagnostics {
            crossing_count,
            s2_negative: s2 < 0.0,
            t_at_max_neg: curve.t_at_max_neg(),
        },
    })
}
