//! Deterministic text output.
//!
//! Floats are written as the shortest decimal string that parses back to the
//! same `f64` (exponent notation outside `1e-5..1e16`). JSON goes through
//! `serde_json`, which uses the same shortest round-trip rule.

use std::io::{self, Write};

use lz_tunneling::LzError;
use serde::Serialize;

use crate::record::{ErrorRecord, RunRecord};
use crate::sweep::SweepRow;

pub const SCHEMA_LINE: &str = "# schema=1";

pub const SWEEP_HEADER: [&str; 15] = [
    "eta",
    "alpha",
    "basis",
    "t_prime",
    "tau",
    "tau_vitanov",
    "tau_empirical",
    "tau_analytic_adiabatic",
    "tau_analytic_sudden",
    "s1",
    "s2",
    "p_infinity",
    "crossing_count",
    "s2_negative",
    "error",
];

pub fn float(x: f64) -> String {
    format!("{x:?}")
}

pub fn json<T: Serialize>(value: &T) -> String {
    serde_json::to_string(value).expect("records contain only plain data")
}

#[derive(Serialize)]
struct ErrorEnvelope<'a> {
    error: &'a ErrorRecord,
}

pub fn error_json(e: &LzError) -> String {
    json(&ErrorEnvelope { error: &ErrorRecord::from(e) })
}

/// `t,p,dp_dt` rows after the schema line.
pub fn write_curve_csv<W: Write>(mut out: W, rows: &[(f64, f64, f64)]) -> io::Result<()> {
    writeln!(out, "{SCHEMA_LINE}")?;
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["t", "p", "dp_dt"])?;
    for &(t, p, dp) in rows {
        w.write_record([float(t), float(p), float(dp)])?;
    }
    w.flush()
}

fn record_fields(r: &RunRecord) -> Vec<String> {
    vec![
        float(r.eta),
        float(r.alpha),
        r.basis.clone(),
        float(r.t_prime),
        float(r.tau),
        r.tau_vitanov.map(float).unwrap_or_default(),
        float(r.tau_empirical),
        float(r.tau_analytic_adiabatic),
        float(r.tau_analytic_sudden),
        float(r.s1),
        float(r.s2),
        float(r.p_infinity),
        r.crossing_count.to_string(),
        r.s2_negative.to_string(),
        String::new(),
    ]
}

/// Sweep table: one row per grid point; failed rows keep `eta`, `alpha` and
/// `basis` and carry `kind: message` in the `error` column.
pub fn write_sweep_csv<W: Write>(mut out: W, rows: &[SweepRow]) -> io::Result<()> {
    writeln!(out, "{SCHEMA_LINE}")?;
    let mut w = csv::Writer::from_writer(out);
    w.write_record(SWEEP_HEADER)?;
    for row in rows {
        let fields = match &row.result {
            Ok(eval) => record_fields(&eval.record),
            Err(e) => {
                let mut f = vec![String::new(); SWEEP_HEADER.len()];
                f[0] = float(row.eta);
                f[1] = float(row.eta);
                f[2] = row.basis.as_str().to_string();
                f[SWEEP_HEADER.len() - 1] = format!("{}: {}", e.kind(), e);
                f
            }
        };
        w.write_record(&fields)?;
    }
    w.flush()
}
