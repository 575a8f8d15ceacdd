use lz_tunneling::asymptotics::{limit_tau, sudden_half_width_root, vitanov_zeta_adiabatic, LimitKind};
use lz_tunneling::model::{Basis, LzParams};
use lz_tunneling::probability::{adiabatic_curve, diabatic_curve, ProbabilityCurve};
use lz_tunneling::propagator::{propagate, IntegrationConfig, Trajectory};
use lz_tunneling::tunneling_time::{empirical_time, tunneling_time, TunnelingTimeReport};
use lz_tunneling::LzError;
use serde::Serialize;

/// One tunneling-time evaluation. `alpha` is the sweep rate in units of
/// `Δ²/(2ħ)`, i.e. equal to `eta`; times are in the units of the run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunRecord {
    pub eta: f64,
    pub alpha: f64,
    pub basis: String,
    pub t_prime: f64,
    pub tau: f64,
    /// `null` when `dP/dt(0)` vanishes.
    pub tau_vitanov: Option<f64>,
    pub tau_empirical: f64,
    pub tau_analytic_adiabatic: f64,
    pub tau_analytic_sudden: f64,
    pub s1: f64,
    pub s2: f64,
    pub p_infinity: f64,
    pub crossing_count: usize,
    pub s2_negative: bool,
}

impl RunRecord {
    pub fn from_report(report: &TunnelingTimeReport) -> Self {
        let params = &report.params;
        RunRecord {
            eta: params.eta(),
            alpha: params.eta(),
            basis: report.basis.as_str().to_string(),
            t_prime: report.t_prime,
            tau: report.tau,
            tau_vitanov: report.tau_vitanov,
            tau_empirical: report.tau_empirical,
            tau_analytic_adiabatic: limit_tau(report.basis, LimitKind::AdiabaticLimit, params),
            tau_analytic_sudden: limit_tau(report.basis, LimitKind::SuddenLimit, params),
            s1: report.s1,
            s2: report.s2,
            p_infinity: report.p_infinity,
            crossing_count: report.diagnostics.crossing_count,
            s2_negative: report.diagnostics.s2_negative,
        }
    }
}

/// Closed-form times for one parameter set.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LimitsRecord {
    pub eta: f64,
    pub alpha: f64,
    pub basis: String,
    pub tau_adiabatic_limit: f64,
    pub tau_sudden_limit: f64,
    pub zeta_a_a: f64,
    pub tau_empirical: f64,
    pub sudden_half_width_root: f64,
}

pub fn limits(params: &LzParams, basis: Basis) -> LimitsRecord {
    LimitsRecord {
        eta: params.eta(),
        alpha: params.eta(),
        basis: basis.as_str().to_string(),
        tau_adiabatic_limit: limit_tau(basis, LimitKind::AdiabaticLimit, params),
        tau_sudden_limit: limit_tau(basis, LimitKind::SuddenLimit, params),
        zeta_a_a: vitanov_zeta_adiabatic(params),
        tau_empirical: empirical_time(params),
        sudden_half_width_root: sudden_half_width_root(),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ErrorRecord {
    pub kind: String,
    pub message: String,
}

impl From<&LzError> for ErrorRecord {
    fn from(e: &LzError) -> Self {
        ErrorRecord { kind: e.kind().to_string(), message: e.to_string() }
    }
}

pub fn curve_for(basis: Basis, traj: &Trajectory) -> ProbabilityCurve<'_> {
    match basis {
        Basis::Diabatic => diabatic_curve(traj),
        Basis::Adiabatic => adiabatic_curve(traj),
    }
}

/// A run record together with integration statistics that are not part of
/// the record schema.
#[derive(Debug, Clone, PartialEq)]
pub struct Evaluation {
    pub record: RunRecord,
    pub report: TunnelingTimeReport,
    pub norm_drift: f64,
}

pub fn evaluate(params: &LzParams, basis: Basis, config: &IntegrationConfig) -> Result<Evaluation, LzError> {
    let traj = propagate(params, config)?;
    let report = tunneling_time(&curve_for(basis, &traj))?;
    Ok(Evaluation { record: RunRecord::from_report(&report), report, norm_drift: traj.norm_drift() })
}
