//! CSV emitters. Every file opens with `#` comment lines carrying the
//! configuration and master seed, followed by a column header.

use std::fmt::Write as _;

use super::config::ExperimentConfig;
use super::curve::FidelityCurve;
use super::fit::TfRecord;
use super::sweep::{RateRecord, RegimeRecord};

fn preamble(kind: &str, config: Option<&ExperimentConfig>, extra: &[(String, String)]) -> String {
    let mut out = format!("# sawtooth {kind}\n");
    for (k, v) in extra {
        let _ = writeln!(out, "# {k}={v}");
    }
    if let Some(cfg) = config {
        out.push_str(&cfg.header());
    }
    out
}

fn num(x: f64) -> String {
    format!("{x:.12e}")
}

/// `t,f_mean,f_stderr` table.
pub fn curve_csv(curve: &FidelityCurve, extra: &[(String, String)]) -> String {
    let mut out = preamble("fidelity", curve.config.as_ref(), extra);
    out.push_str("t,f_mean,f_stderr\n");
    for i in 0..curve.len() {
        let _ = writeln!(
            out,
            "{},{},{}",
            curve.t[i],
            num(curve.f[i]),
            num(curve.f_err[i])
        );
    }
    out
}

pub fn tf_csv(records: &[TfRecord], base: &ExperimentConfig, extra: &[(String, String)]) -> String {
    let mut out = preamble("tf-scan", Some(base), extra);
    out.push_str("nq,epsilon,t_f,collapse\n");
    for r in records {
        let _ = writeln!(
            out,
            "{},{},{},{}",
            r.n_qubits.map(|n| n.to_string()).unwrap_or_default(),
            r.epsilon.map(|e| e.to_string()).unwrap_or_default(),
            num(r.t_f),
            r.collapse().map(num).unwrap_or_default()
        );
    }
    out
}

pub fn rate_csv(
    records: &[RateRecord],
    base: &ExperimentConfig,
    extra: &[(String, String)],
) -> String {
    let mut out = preamble("rate-vs-k", Some(base), extra);
    out.push_str("K,initial,lyapunov,rate,r2,model\n");
    for r in records {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{}",
            r.big_k,
            r.initial,
            num(r.lyapunov),
            num(r.fit.rate),
            num(r.fit.r_squared),
            r.fit.model
        );
    }
    out
}

pub fn regime_csv(
    records: &[RegimeRecord],
    base: &ExperimentConfig,
    extra: &[(String, String)],
) -> String {
    let mut out = preamble("classical-regimes", Some(base), extra);
    out.push_str("deltaK,delta_k,lyapunov,rate,r2,model,regime\n");
    for r in records {
        let (rate, r2, model) = match &r.fit {
            Some(f) => (num(f.rate), num(f.r_squared), f.model.to_string()),
            None => (String::new(), String::new(), String::new()),
        };
        let _ = writeln!(
            out,
            "{},{},{},{rate},{r2},{model},{}",
            r.delta_big_k,
            num(r.delta_k),
            num(r.lyapunov),
            r.regime.as_str()
        );
    }
    out
}
