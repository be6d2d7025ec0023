use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::config::ErrorChannel;
use super::curve::FidelityCurve;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DecayModel {
    /// `f = exp(-rate t)`.
    Exponential,
    /// `f = exp(-(t/tau)^2)`, `rate = 1/tau^2`.
    Gaussian,
}

impl fmt::Display for DecayModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            DecayModel::Exponential => "exponential",
            DecayModel::Gaussian => "gaussian",
        })
    }
}

impl FromStr for DecayModel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exponential" => Ok(DecayModel::Exponential),
            "gaussian" => Ok(DecayModel::Gaussian),
            other => Err(Error::InvalidParameter(format!(
                "unknown decay model {other:?}"
            ))),
        }
    }
}

/// Straight-line form fitted to `-ln f`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FitForm {
    /// `-ln f = rate x`, the model exactly (`f = 1` at `t = 0`).
    #[default]
    Proportional,
    /// `-ln f = rate x + offset`, absorbing a short-time transient.
    Affine,
}

/// Range of `f` values used by a fit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FitWindow {
    pub f_min: f64,
    pub f_max: f64,
}

impl Default for FitWindow {
    fn default() -> Self {
        Self {
            f_min: 0.1,
            f_max: 0.9,
        }
    }
}

pub const MIN_FIT_POINTS: usize = 5;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DecayFit {
    pub model: DecayModel,
    /// `Gamma` for the exponential model, `1/tau^2` for the gaussian one.
    pub rate: f64,
    pub form: FitForm,
    /// Intercept of the fit of `-ln f` (zero for the proportional form).
    pub offset: f64,
    pub window: FitWindow,
    pub r_squared: f64,
    pub points: usize,
}

/// Least-squares fit of `-ln f = rate x` with `x = t` (exponential) or
/// `x = t^2` (gaussian) over the default window.
pub fn fit_decay(curve: &FidelityCurve, model: DecayModel) -> Result<DecayFit> {
    fit_decay_with(curve, model, FitWindow::default(), FitForm::Proportional)
}

/// Like [`fit_decay`] with an explicit window and form. Points are taken from
/// the start of the curve up to its first drop below `f_min`, keeping those
/// with `f <= f_max`. `r_squared` is `1 - SS_res / SS_tot` about the mean.
pub fn fit_decay_with(
    curve: &FidelityCurve,
    model: DecayModel,
    window: FitWindow,
    form: FitForm,
) -> Result<DecayFit> {
    if !(window.f_min > 0.0 && window.f_min < window.f_max && window.f_max <= 1.0) {
        return Err(Error::InvalidParameter(format!(
            "fit window must satisfy 0 < f_min < f_max <= 1, got [{}, {}]",
            window.f_min, window.f_max
        )));
    }
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for (&t, &f) in curve.t.iter().zip(&curve.f) {
        if f < window.f_min {
            break;
        }
        if f <= window.f_max {
            let t = t as f64;
            xs.push(match model {
                DecayModel::Exponential => t,
                DecayModel::Gaussian => t * t,
            });
            ys.push(-f.ln());
        }
    }
    if xs.len() < MIN_FIT_POINTS {
        return Err(Error::InsufficientPoints {
            needed: MIN_FIT_POINTS,
            found: xs.len(),
        });
    }
    let (slope, offset, r_squared) = match form {
        FitForm::Proportional => proportional_fit(&xs, &ys),
        FitForm::Affine => linear_fit(&xs, &ys),
    };
    Ok(DecayFit {
        model,
        rate: slope,
        form,
        offset,
        window,
        r_squared,
        points: xs.len(),
    })
}

/// Ordinary least squares `y = a x + b`; returns `(a, b, r^2)`.
pub fn linear_fit(xs: &[f64], ys: &[f64]) -> (f64, f64, f64) {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let syy: f64 = ys.iter().map(|y| (y - my).powi(2)).sum();
    let slope = sxy / sxx;
    let offset = my - slope * mx;
    let r2 = if syy == 0.0 {
        1.0
    } else {
        sxy * sxy / (sxx * syy)
    };
    (slope, offset, r2)
}

/// Least squares `y = a x`; returns `(a, 0, r^2)`.
pub fn proportional_fit(xs: &[f64], ys: &[f64]) -> (f64, f64, f64) {
    let sxx: f64 = xs.iter().map(|x| x * x).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| x * y).sum();
    let slope = sxy / sxx;
    let my = ys.iter().sum::<f64>() / ys.len() as f64;
    let ss_res: f64 = xs
        .iter()
        .zip(ys)
        .map(|(x, y)| (y - slope * x).powi(2))
        .sum();
    let ss_tot: f64 = ys.iter().map(|y| (y - my).powi(2)).sum();
    let r2 = if ss_tot == 0.0 {
        1.0
    } else {
        1.0 - ss_res / ss_tot
    };
    (slope, 0.0, r2)
}

/// Fit of the ensemble mean plus the jackknife standard error of its rate
/// (leave-one-member-out).
pub fn fit_with_jackknife(
    members: &[Vec<f64>],
    model: DecayModel,
    window: FitWindow,
    form: FitForm,
) -> Result<(DecayFit, f64)> {
    let full = fit_decay_with(
        &FidelityCurve::from_members(members, None),
        model,
        window,
        form,
    )?;
    let m = members.len();
    if m < 2 {
        return Ok((full, 0.0));
    }
    let mut rates = Vec::with_capacity(m);
    let mut rest: Vec<Vec<f64>> = members[1..].to_vec();
    for i in 0..m {
        if i > 0 {
            rest[i - 1] = members[i - 1].clone();
        }
        let curve = FidelityCurve::from_members(&rest, None);
        rates.push(fit_decay_with(&curve, model, window, form)?.rate);
    }
    let mean = rates.iter().sum::<f64>() / m as f64;
    let var = rates.iter().map(|r| (r - mean).powi(2)).sum::<f64>() * (m - 1) as f64 / m as f64;
    Ok((full, var.sqrt()))
}

/// Time scale `t_f` at which the fidelity first reaches `A`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TfRecord {
    pub n_qubits: Option<u32>,
    pub epsilon: Option<f64>,
    pub threshold: f64,
    pub t_f: f64,
}

impl TfRecord {
    /// `t_f epsilon^2 n_q^2`, when the curve's configuration is known.
    pub fn collapse(&self) -> Option<f64> {
        match (self.n_qubits, self.epsilon) {
            (Some(n), Some(e)) => Some(self.t_f * e * e * (n * n) as f64),
            _ => None,
        }
    }
}

/// First crossing of `f = threshold`, interpolated linearly in `f` between
/// neighbouring steps.
pub fn estimate_tf(curve: &FidelityCurve, threshold: f64) -> Result<TfRecord> {
    if !(threshold > 0.0 && threshold < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "threshold must lie in (0, 1), got {threshold}"
        )));
    }
    let idx = curve
        .f
        .iter()
        .position(|&f| f <= threshold)
        .ok_or(Error::NoCrossing {
            threshold,
            t_max: curve.t.last().copied().unwrap_or(0),
        })?;
    if idx == 0 {
        return Err(Error::InvalidParameter(
            "curve starts below the threshold".into(),
        ));
    }
    let (t0, t1) = (curve.t[idx - 1] as f64, curve.t[idx] as f64);
    let (f0, f1) = (curve.f[idx - 1], curve.f[idx]);
    let t_f = if f0 == f1 {
        t1
    } else {
        t0 + (f0 - threshold) / (f0 - f1) * (t1 - t0)
    };
    let (n_qubits, epsilon) = match curve.config {
        Some(cfg) => (
            Some(cfg.lattice.n_qubits()),
            match cfg.channel {
                ErrorChannel::Quantum { epsilon, .. } => Some(epsilon),
                ErrorChannel::Classical { .. } => None,
            },
        ),
        None => (None, None),
    };
    Ok(TfRecord {
        n_qubits,
        epsilon,
        threshold,
        t_f,
    })
}
