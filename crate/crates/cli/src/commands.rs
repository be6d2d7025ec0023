use std::fmt::Write as _;

use serde_json::{json, Map, Value};

use sawtooth_core::circuit::{build_sawtooth_circuit, run_step_noisy, GateCounts, NoiseModel};
use sawtooth_core::classical::{
    default_section_seeds, lyapunov_exponent, lyapunov_numerical, poincare_section,
    ClassicalParams, PhasePoint,
};
use sawtooth_core::lab::{
    curve_csv, estimate_tf, fidelity_curve, fit_decay, member_fidelities, rate_csv,
    scattering_fidelity, sweep_rate_vs_k, sweep_tf, tf_csv, DecayFit, DecayModel, ErrorChannel,
    ExperimentConfig, ScatteringMode,
};
use sawtooth_core::propagator::step_exact;
use sawtooth_core::{random_state, LatticeParams};

use crate::emit::{header_pairs, jnum, json_doc, num, preamble, Sink};
use crate::failure::{Failure, Outcome};
use crate::settings::{Format, ModelChoice, RunConfig};

/// Largest amplitude deviation accepted by `circuit-check`.
pub const ORACLE_TOLERANCE: f64 = 1e-10;
/// Largest circuit-versus-overlap difference accepted by `scattering`.
pub const SCATTERING_TOLERANCE: f64 = 1e-12;

pub fn run(rc: &RunConfig) -> Outcome<()> {
    let sink = Sink::open(rc.out.as_deref())?;
    match rc.command.as_str() {
        "poincare" => poincare(rc, sink),
        "lyapunov" => lyapunov(rc, sink),
        "fidelity" => fidelity(rc, sink),
        "tf-scan" => tf_scan(rc, sink),
        "rate-vs-k" => rate_vs_k(rc, sink),
        "circuit-check" => circuit_check(rc, sink),
        "scattering" => scattering(rc, sink),
        other => Err(Failure::config(format!("unknown command {other}"))),
    }
}

fn poincare(rc: &RunConfig, sink: Sink) -> Outcome<()> {
    let params = ClassicalParams::new(rc.big_k)?;
    let seeds: Vec<PhasePoint> = match &rc.seeds {
        Some(s) => s.iter().map(|p| p.0).collect(),
        None => default_section_seeds(),
    };
    let orbits = poincare_section(&seeds, params, rc.steps);
    let pairs = header_pairs(rc);
    let text = match rc.format {
        Format::Csv => {
            let mut out = preamble("poincare", &pairs);
            out.push_str("seed,step,theta,p\n");
            for (i, orbit) in orbits.iter().enumerate() {
                for (t, x) in orbit.iter().enumerate() {
                    let _ = writeln!(out, "{i},{t},{},{}", num(x.theta), num(x.p));
                }
            }
            out
        }
        Format::Json => {
            let orbits: Vec<Value> = orbits
                .iter()
                .map(|o| {
                    json!({
                        "theta": o.iter().map(|x| jnum(x.theta)).collect::<Vec<_>>(),
                        "p": o.iter().map(|x| jnum(x.p)).collect::<Vec<_>>(),
                    })
                })
                .collect();
            let mut body = Map::new();
            body.insert("orbits".into(), Value::Array(orbits));
            json_doc(&pairs, body)
        }
    };
    sink.write(&text)
}

fn lyapunov(rc: &RunConfig, sink: Sink) -> Outcome<()> {
    let params = ClassicalParams::new(rc.big_k)?;
    if rc.steps == 0 {
        return Err(Failure::config("steps must be at least 1"));
    }
    let closed = lyapunov_exponent(params);
    let numerical = lyapunov_numerical(PhasePoint::new(rc.theta0, rc.p0), params, rc.steps, 1e-9);
    let regime = format!("{:?}", params.regime()).to_lowercase();
    let pairs = header_pairs(rc);
    let text = match rc.format {
        Format::Csv => {
            let mut out = preamble("lyapunov", &pairs);
            out.push_str("K,closed_form,numerical,regime\n");
            let _ = writeln!(
                out,
                "{},{},{},{regime}",
                rc.big_k,
                num(closed),
                num(numerical)
            );
            out
        }
        Format::Json => {
            let mut body = Map::new();
            body.insert("closed_form".into(), jnum(closed));
            body.insert("numerical".into(), jnum(numerical));
            body.insert("regime".into(), Value::String(regime));
            json_doc(&pairs, body)
        }
    };
    sink.write(&text)
}

fn fit_json(fit: &Result<DecayFit, sawtooth_core::Error>) -> Value {
    match fit {
        Ok(f) => json!({
            "rate": jnum(f.rate),
            "r2": jnum(f.r_squared),
            "points": f.points,
        }),
        Err(e) => json!({ "error": e.to_string() }),
    }
}

/// JSON summary of a fidelity run: fits of both models, the selected one,
/// gate count, Lyapunov exponent and `t_f`.
fn fidelity_summary(
    rc: &RunConfig,
    cfg: &ExperimentConfig,
    curve: &sawtooth_core::lab::FidelityCurve,
) -> Outcome<Map<String, Value>> {
    let mut s = Map::new();
    let lambda = lyapunov_exponent(ClassicalParams::new(rc.big_k)?);
    s.insert("lyapunov".into(), jnum(lambda));
    let n_g = match cfg.channel {
        ErrorChannel::Quantum { .. } => {
            let c = GateCounts::expected(rc.nq as usize);
            Value::from(c.total())
        }
        ErrorChannel::Classical { .. } => Value::Null,
    };
    s.insert("n_g".into(), n_g.clone());
    s.insert(
        "t_f".into(),
        estimate_tf(curve, rc.threshold)
            .map(|r| jnum(r.t_f))
            .unwrap_or(Value::Null),
    );
    if cfg.channel.is_null() {
        s.insert("status".into(), Value::String("no decay".into()));
        s.insert("model".into(), Value::Null);
        return Ok(s);
    }
    let exp = fit_decay(curve, DecayModel::Exponential);
    let gauss = fit_decay(curve, DecayModel::Gaussian);
    let chosen = match rc.model {
        ModelChoice::Exponential => &exp,
        ModelChoice::Gaussian => &gauss,
        ModelChoice::Auto => match (&exp, &gauss) {
            (Ok(e), Ok(g)) if g.r_squared > e.r_squared => &gauss,
            (Err(_), Ok(_)) => &gauss,
            _ => &exp,
        },
    };
    s.insert("status".into(), Value::String("decay".into()));
    s.insert(
        "fits".into(),
        json!({ "exponential": fit_json(&exp), "gaussian": fit_json(&gauss) }),
    );
    match chosen {
        Ok(f) => {
            s.insert("model".into(), Value::String(f.model.to_string()));
            s.insert("rate".into(), jnum(f.rate));
            s.insert("r2".into(), jnum(f.r_squared));
            if let (ErrorChannel::Quantum { epsilon, .. }, DecayModel::Exponential) =
                (cfg.channel, f.model)
            {
                let ng = n_g.as_f64().unwrap_or(f64::NAN);
                s.insert("C".into(), jnum(f.rate / (epsilon * epsilon * ng)));
            }
        }
        Err(e) => {
            s.insert("model".into(), Value::Null);
            s.insert("fit_error".into(), Value::String(e.to_string()));
        }
    }
    Ok(s)
}

fn fidelity(rc: &RunConfig, sink: Sink) -> Outcome<()> {
    let cfg = rc.experiment()?;
    let curve = fidelity_curve(&cfg)?;
    let summary = fidelity_summary(rc, &cfg, &curve)?;
    let pairs = header_pairs(rc);
    match rc.format {
        Format::Csv => {
            let mut body = experiment_json(&cfg);
            body.insert("summary".into(), Value::Object(summary));
            let summary_doc = json_doc(&pairs, body);
            match sink.path() {
                Some(p) => {
                    let path = format!("{}.summary.json", p.display());
                    std::fs::write(&path, &summary_doc)
                        .map_err(|e| Failure::runtime(format!("cannot write {path}: {e}")))?;
                }
                None => eprint!("{summary_doc}"),
            }
            sink.write(&curve_csv(&curve, &pairs))
        }
        Format::Json => {
            let mut body = experiment_json(&cfg);
            body.insert(
                "curve".into(),
                json!({
                    "t": curve.t,
                    "f_mean": curve.f.iter().map(|&x| jnum(x)).collect::<Vec<_>>(),
                    "f_stderr": curve.f_err.iter().map(|&x| jnum(x)).collect::<Vec<_>>(),
                }),
            );
            body.insert("summary".into(), Value::Object(summary));
            sink.write(&json_doc(&pairs, body))
        }
    }
}

fn experiment_json(cfg: &ExperimentConfig) -> Map<String, Value> {
    let experiment: Map<String, Value> = cfg
        .describe()
        .into_iter()
        .map(|(k, v)| (k.to_string(), Value::String(v)))
        .collect();
    let mut body = Map::new();
    body.insert("experiment".into(), Value::Object(experiment));
    body
}

fn tf_scan(rc: &RunConfig, sink: Sink) -> Outcome<()> {
    let mut base = rc.experiment()?;
    if let ErrorChannel::Classical { .. } = base.channel {
        return Err(Failure::config("tf-scan needs the quantum channel"));
    }
    base.channel = base
        .channel
        .with_strength(rc.epsilons.first().copied().unwrap_or(0.0));
    let records = sweep_tf(&base, &rc.nqs, &rc.epsilons, rc.threshold)?;
    let pairs = header_pairs(rc);
    let text = match rc.format {
        Format::Csv => tf_csv(&records, &base, &pairs),
        Format::Json => {
            let mut body = experiment_json(&base);
            body.insert(
                "records".into(),
                serde_json::to_value(&records).expect("json"),
            );
            json_doc(&pairs, body)
        }
    };
    sink.write(&text)
}

fn rate_vs_k(rc: &RunConfig, sink: Sink) -> Outcome<()> {
    let base = rc.experiment()?;
    let initials: Vec<_> = rc
        .initials
        .iter()
        .map(|&k| rc.initial_condition(k))
        .collect();
    let records = sweep_rate_vs_k(&base, &rc.ks, &initials)?;
    let pairs = header_pairs(rc);
    let text = match rc.format {
        Format::Csv => rate_csv(&records, &base, &pairs),
        Format::Json => {
            let mut body = experiment_json(&base);
            body.insert(
                "records".into(),
                serde_json::to_value(&records).expect("json"),
            );
            json_doc(&pairs, body)
        }
    };
    sink.write(&text)
}

fn circuit_check(rc: &RunConfig, sink: Sink) -> Outcome<()> {
    let lattice = LatticeParams::new(rc.nq, rc.big_k)?;
    let program = build_sawtooth_circuit(&lattice);
    let counts = program.counts();
    let expected = GateCounts::expected(rc.nq as usize);
    let noiseless = NoiseModel::noiseless();
    let mut worst = 0.0f64;
    for i in 0..rc.states {
        let psi = random_state(&lattice, sawtooth_core::lab::point_seed(rc.seed, i));
        let exact = step_exact(&psi, &lattice, 0.0)?;
        let mut s = psi;
        run_step_noisy(&mut s, &program, &noiseless, &mut noiseless.step_rng(0))?;
        let dev = s
            .amplitudes()
            .iter()
            .zip(exact.amplitudes())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max);
        worst = worst.max(dev);
    }
    let counts_ok = counts == expected;
    let oracle_ok = worst < ORACLE_TOLERANCE;
    let pass = counts_ok && oracle_ok;
    let pairs = header_pairs(rc);
    let text = match rc.format {
        Format::Csv => {
            let mut out = preamble("circuit-check", &pairs);
            out.push_str("nq,hadamard,cphase,total,expected_hadamard,expected_cphase,max_deviation,tolerance,status\n");
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{},{:e},{}",
                rc.nq,
                counts.hadamard,
                counts.cphase,
                counts.total(),
                expected.hadamard,
                expected.cphase,
                num(worst),
                ORACLE_TOLERANCE,
                if pass { "pass" } else { "fail" }
            );
            out
        }
        Format::Json => {
            let mut body = Map::new();
            body.insert(
                "counts".into(),
                json!({ "hadamard": counts.hadamard, "cphase": counts.cphase, "total": counts.total() }),
            );
            body.insert(
                "expected".into(),
                json!({ "hadamard": expected.hadamard, "cphase": expected.cphase, "total": expected.total() }),
            );
            body.insert("max_deviation".into(), jnum(worst));
            body.insert("pass".into(), Value::Bool(pass));
            json_doc(&pairs, body)
        }
    };
    sink.write(&text)?;
    if !counts_ok {
        return Err(Failure::runtime(format!(
            "gate counts {counts:?} differ from {expected:?}"
        )));
    }
    if !oracle_ok {
        return Err(Failure::runtime(format!(
            "noiseless circuit deviates from the exact step by {worst:.3e}"
        )));
    }
    Ok(())
}

fn scattering(rc: &RunConfig, sink: Sink) -> Outcome<()> {
    let mut cfg = rc.experiment()?;
    cfg.t_max = cfg.t_max.max(rc.t);
    if rc.member >= cfg.ensembles.members() {
        return Err(Failure::config(format!(
            "member {} outside ensemble of {}",
            rc.member,
            cfg.ensembles.members()
        )));
    }
    let mode = match rc.shots {
        Some(0) => return Err(Failure::config("shots must be positive")),
        Some(shots) => ScatteringMode::Sampled { shots },
        None => ScatteringMode::Analytic,
    };
    let direct = member_fidelities(&cfg)?;
    let direct = &direct[rc.member];
    let mut rows = Vec::with_capacity(rc.t + 1);
    let mut worst = 0.0f64;
    for (t, &d) in direct.iter().enumerate().take(rc.t + 1) {
        let o = scattering_fidelity(&cfg, rc.member, t, mode)?;
        if mode == ScatteringMode::Analytic {
            worst = worst.max((o.fidelity - d).abs());
        }
        rows.push((t, o, d));
    }
    let pairs = header_pairs(rc);
    let text = match rc.format {
        Format::Csv => {
            let mut out = preamble("scattering", &pairs);
            out.push_str(&cfg.header());
            out.push_str("t,sigma_z,sigma_y,f_circuit,f_direct,std_error\n");
            for (t, o, d) in &rows {
                let _ = writeln!(
                    out,
                    "{t},{},{},{},{},{}",
                    num(o.sigma_z),
                    num(o.sigma_y),
                    num(o.fidelity),
                    num(*d),
                    o.std_error.map(num).unwrap_or_default()
                );
            }
            out
        }
        Format::Json => {
            let mut body = experiment_json(&cfg);
            let rows: Vec<Value> = rows
                .iter()
                .map(|(t, o, d)| {
                    json!({
                        "t": t,
                        "sigma_z": jnum(o.sigma_z),
                        "sigma_y": jnum(o.sigma_y),
                        "f_circuit": jnum(o.fidelity),
                        "f_direct": jnum(*d),
                        "std_error": o.std_error.map(jnum),
                    })
                })
                .collect();
            body.insert("rows".into(), Value::Array(rows));
            json_doc(&pairs, body)
        }
    };
    sink.write(&text)?;
    if worst >= SCATTERING_TOLERANCE {
        return Err(Failure::runtime(format!(
            "scattering circuit differs from the direct overlap by {worst:.3e}"
        )));
    }
    Ok(())
}
