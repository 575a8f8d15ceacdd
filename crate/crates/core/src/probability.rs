//! Probability curves `P(t)` in the diabatic or adiabatic basis.

use crate::error::{LzError, Result};
use crate::model::{lz_asymptote, upper_eigenstate, Basis, LzParams};
use crate::propagator::Trajectory;

type CurveFn<'a> = Box<dyn Fn(f64) -> (f64, f64) + Send + Sync + 'a>;

enum Source<'a> {
    Numeric(&'a Trajectory),
    Analytic(CurveFn<'a>),
}

/// `P(t)` with its exact derivative, asymptote and the extremal data used by
/// the tunneling-time estimators.
pub struct ProbabilityCurve<'a> {
    basis: Basis,
    params: LzParams,
    source: Source<'a>,
    t_start: f64,
    t_end: f64,
    grid: Vec<f64>,
    values: Vec<f64>,
    zero_index: usize,
    p_infinity: f64,
    p_max_neg: f64,
    t_at_max_neg: f64,
}

impl std::fmt::Debug for ProbabilityCurve<'_> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ProbabilityCurve")
            .field("basis", &self.basis)
            .field("params", &self.params)
            .field("t_start", &self.t_start)
            .field("t_end", &self.t_end)
            .field("grid_len", &self.grid.len())
            .field("p_infinity", &self.p_infinity)
            .field("p0", &self.p0())
            .field("p_max_neg", &self.p_max_neg)
            .field("t_at_max_neg", &self.t_at_max_neg)
            .finish()
    }
}

/// `P_d(t) = |b(t)|²`.
pub fn diabatic_curve(traj: &Trajectory) -> ProbabilityCurve<'_> {
    ProbabilityCurve::numeric(Basis::Diabatic, traj)
}

/// `P_a(t) = |<upper(t)|ψ(t)>|²`.
pub fn adiabatic_curve(traj: &Trajectory) -> ProbabilityCurve<'_> {
    ProbabilityCurve::numeric(Basis::Adiabatic, traj)
}

fn numeric_point(basis: Basis, traj: &Trajectory, t: f64) -> Result<(f64, f64)> {
    let params = traj.params();
    let psi = traj.state(t)?;
    Ok(match basis {
        Basis::Diabatic => {
            let p = psi.b.norm_sqr();
            let dp = params.delta() / params.hbar() * (psi.b.conj() * psi.a).im;
            (p, dp)
        }
        Basis::Adiabatic => {
            let v = upper_eigenstate(params, t);
            let (c1, c2) = (v.a.re, v.b.re);
            let amp = psi.a * c1 + psi.b * c2;
            let e = params.gamma(t).hypot(params.delta());
            if e == 0.0 {
                return Ok((amp.norm_sqr(), 0.0));
            }
            let theta_dot = -params.alpha() * params.delta() / (e * e);
            let dp = theta_dot * (amp.conj() * (psi.b * c1 - psi.a * c2)).re;
            (amp.norm_sqr(), dp)
        }
    })
}

/// Uniform spacing added to the trajectory samples so that sparse stretches of
/// the step sequence are still scanned finely.
fn scan_spacing(params: &LzParams) -> f64 {
    let a = params.adiabatic_time();
    let s = params.sudden_time();
    let base = if a > 0.0 { a.min(s) } else { s };
    base / 16.0
}

fn uniform(t_start: f64, t_end: f64, spacing: f64) -> Vec<f64> {
    let n = ((t_end - t_start) / spacing).ceil().max(1.0) as usize;
    (0..=n)
        .map(|i| if i == n { t_end } else { t_start + (t_end - t_start) * i as f64 / n as f64 })
        .collect()
}

fn merge(mut grid: Vec<f64>) -> Vec<f64> {
    grid.push(0.0);
    grid.sort_by(f64::total_cmp);
    grid.dedup();
    grid
}

const GOLDEN: f64 = 0.618_033_988_749_894_9;

fn golden_max(f: &dyn Fn(f64) -> f64, mut lo: f64, mut hi: f64, resolution: f64) -> (f64, f64) {
    let mut x1 = hi - GOLDEN * (hi - lo);
    let mut x2 = lo + GOLDEN * (hi - lo);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    while hi - lo > resolution {
        if f1 < f2 {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + GOLDEN * (hi - lo);
            f2 = f(x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - GOLDEN * (hi - lo);
            f1 = f(x1);
        }
    }
    if f1 >= f2 {
        (x1, f1)
    } else {
        (x2, f2)
    }
}

impl<'a> ProbabilityCurve<'a> {
    fn numeric(basis: Basis, traj: &'a Trajectory) -> Self {
        let params = *traj.params();
        let (t_start, t_end) = (traj.t_start(), traj.t_end());
        let mut grid: Vec<f64> = traj.sample_times().collect();
        grid.extend(uniform(t_start, t_end, scan_spacing(&params)));
        let grid = merge(grid);
        Self::build(basis, params, Source::Numeric(traj), t_start, t_end, grid, lz_asymptote(&params, basis))
    }

    /// Curve given by a closed form `t -> (P(t), dP/dt(t))` on `[t_start, t_end]`,
    /// scanned on a uniform grid of the given spacing.
    pub fn from_fn<F>(
        basis: Basis,
        params: LzParams,
        window: (f64, f64),
        spacing: f64,
        p_infinity: f64,
        f: F,
    ) -> Result<Self>
    where
        F: Fn(f64) -> (f64, f64) + Send + Sync + 'a,
    {
        let (t_start, t_end) = window;
        if !(t_start < 0.0 && t_end > 0.0 && t_start.is_finite() && t_end.is_finite()) {
            return Err(LzError::InvalidConfig(format!(
                "curve window [{t_start}, {t_end}] must contain t = 0 in its interior"
            )));
        }
        if !(spacing > 0.0 && spacing.is_finite()) {
            return Err(LzError::InvalidConfig(format!("grid spacing {spacing} must be positive")));
        }
        let grid = merge(uniform(t_start, t_end, spacing));
        Ok(Self::build(basis, params, Source::Analytic(Box::new(f)), t_start, t_end, grid, p_infinity))
    }

    fn build(
        basis: Basis,
        params: LzParams,
        source: Source<'a>,
        t_start: f64,
        t_end: f64,
        grid: Vec<f64>,
        p_infinity: f64,
    ) -> Self {
        let mut curve = ProbabilityCurve {
            basis,
            params,
            source,
            t_start,
            t_end,
            values: Vec::new(),
            zero_index: grid.partition_point(|&t| t < 0.0),
            grid,
            p_infinity,
            p_max_neg: 0.0,
            t_at_max_neg: 0.0,
        };
        curve.values = curve.grid.iter().map(|&t| curve.eval(t).0).collect();
        curve.locate_max_neg();
        curve
    }

    fn eval(&self, t: f64) -> (f64, f64) {
        match &self.source {
            Source::Numeric(traj) => numeric_point(self.basis, traj, t)
                .expect("grid and refinement points lie inside the trajectory window"),
            Source::Analytic(f) => f(t),
        }
    }

    fn locate_max_neg(&mut self) {
        let neg = &self.values[..=self.zero_index];
        let (i, &best) = neg
            .iter()
            .enumerate()
            .fold((0, &f64::NEG_INFINITY), |acc, (i, v)| if *v > *acc.1 { (i, v) } else { acc });
        let lo = self.grid[i.saturating_sub(1)];
        let hi = self.grid[(i + 1).min(self.zero_index)];
        let resolution = 1e-10 * (self.t_end - self.t_start);
        let (t, p) = if hi - lo > resolution {
            golden_max(&|t| self.eval(t).0, lo, hi, resolution)
        } else {
            (self.grid[i], best)
        };
        if p > best {
            self.p_max_neg = p;
            self.t_at_max_neg = t;
        } else {
            self.p_max_neg = best;
            self.t_at_max_neg = self.grid[i];
        }
    }

    fn check(&self, t: f64) -> Result<()> {
        let slack = 1e-12 * (self.t_end - self.t_start);
        if t >= self.t_start - slack && t <= self.t_end + slack {
            Ok(())
        } else {
            Err(LzError::OutOfWindow { t, t_start: self.t_start, t_end: self.t_end })
        }
    }

    /// `P(t)`.
    pub fn p(&self, t: f64) -> Result<f64> {
        self.check(t)?;
        Ok(self.eval(t).0)
    }

    /// `dP/dt` from the equations of motion.
    pub fn dp_dt(&self, t: f64) -> Result<f64> {
        self.check(t)?;
        Ok(self.eval(t).1)
    }

    pub fn basis(&self) -> Basis {
        self.basis
    }

    pub fn params(&self) -> &LzParams {
        &self.params
    }

    pub fn t_start(&self) -> f64 {
        self.t_start
    }

    pub fn t_end(&self) -> f64 {
        self.t_end
    }

    /// Closed-form `P(+∞)`.
    pub fn p_infinity(&self) -> f64 {
        self.p_infinity
    }

    /// `P(0)`.
    pub fn p0(&self) -> f64 {
        self.values[self.zero_index]
    }

    /// Maximum of `P` over `t <= 0`.
    pub fn p_max_neg(&self) -> f64 {
        self.p_max_neg
    }

    pub fn t_at_max_neg(&self) -> f64 {
        self.t_at_max_neg
    }

    /// Scan grid: trajectory samples merged with a uniform grid, always containing `t = 0`.
    pub fn grid(&self) -> &[f64] {
        &self.grid
    }

    /// `P` at the points of [`grid`](Self::grid).
    pub fn grid_values(&self) -> &[f64] {
        &self.values
    }

    pub fn zero_index(&self) -> usize {
        self.zero_index
    }
}

const TAIL_PANELS: usize = 256;

fn segment_mean(curve: &ProbabilityCurve<'_>, lo: f64, hi: f64) -> f64 {
    // composite Simpson
    let n = 2 * TAIL_PANELS;
    let h = (hi - lo) / n as f64;
    let mut sum = 0.0;
    for i in 0..=n {
        let t = if i == n { hi } else { lo + i as f64 * h };
        let w = if i == 0 || i == n {
            1.0
        } else if i % 2 == 1 {
            4.0
        } else {
            2.0
        };
        sum += w * curve.eval(t).0;
    }
    sum / (3.0 * n as f64)
}

/// Accumulated relative phase `∫ E dt / ħ` of the two instantaneous eigenstates.
fn dynamic_phase(params: &LzParams, t: f64) -> f64 {
    let g = params.gamma(t);
    let d = params.delta();
    let area = if d > 0.0 { g * g.hypot(d) + d * d * (g / d).asinh() } else { g * g.abs() };
    area / (2.0 * params.alpha() * params.hbar())
}

/// Earlier time at which the relative phase was two full turns behind `t`.
fn two_turns_before(params: &LzParams, t: f64) -> f64 {
    let target = dynamic_phase(params, t) - 4.0 * std::f64::consts::PI;
    let rate = |s: f64| params.gamma(s).hypot(params.delta()) / params.hbar();
    let mut s = t - 4.0 * std::f64::consts::PI / rate(t);
    for _ in 0..100 {
        let step = (dynamic_phase(params, s) - target) / rate(s);
        s -= step;
        if step.abs() <= 1e-15 * t.abs() {
            break;
        }
    }
    s
}

/// Mean of `P` over the final two oscillations of the relative phase, a span
/// of `4πħ/(α t_end)` to leading order. Segments are cut at exact phase turns
/// so the chirp of the oscillation does not bias the mean. Fails with
/// [`LzError::TailNotSettled`] when the mean differs from that of the
/// preceding two oscillations by more than `1e-4`.
pub fn numeric_tail_asymptote(curve: &ProbabilityCurve<'_>) -> Result<f64> {
    let params = curve.params();
    let t_end = curve.t_end();
    let mid = two_turns_before(params, t_end);
    let early = two_turns_before(params, mid);
    if !(early > curve.t_start() && early > 0.0) {
        return Err(LzError::InvalidConfig(format!(
            "window end {t_end} leaves no room for two oscillations after the crossing"
        )));
    }
    let last = segment_mean(curve, mid, t_end);
    let previous = segment_mean(curve, early, mid);
    let difference = (last - previous).abs();
    if difference > 1e-4 {
        return Err(LzError::TailNotSettled { difference });
    }
    Ok(last)
}
