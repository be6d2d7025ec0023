//! Classical sawtooth map on the torus.
//!
//! In rescaled variables `p = T n` the map reads
//!
//! ```text
//! p' = p + K (theta - pi)
//! theta' = theta + p'
//! ```
//!
//! with `theta` reduced into `[0, 2pi)` and `p` into `[-pi, pi)` after every
//! step. The motion is stable for `-4 <= K <= 0` and chaotic otherwise.

use std::f64::consts::{PI, TAU};

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::{stream, StreamDomain};

/// Reduces an angle into `[0, 2pi)`.
#[inline]
pub fn wrap_angle(theta: f64) -> f64 {
    let r = theta.rem_euclid(TAU);
    // rem_euclid can round up to exactly TAU for tiny negative inputs
    if r >= TAU {
        0.0
    } else {
        r
    }
}

/// Reduces a rescaled momentum into `[-pi, pi)`.
#[inline]
pub fn wrap_momentum(p: f64) -> f64 {
    wrap_angle(p + PI) - PI
}

/// Shortest signed displacement on a circle of circumference `2pi`.
#[inline]
pub fn circle_delta(a: f64, b: f64) -> f64 {
    wrap_angle(b - a + PI) - PI
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhasePoint {
    pub theta: f64,
    pub p: f64,
}

impl PhasePoint {
    pub fn new(theta: f64, p: f64) -> Self {
        Self {
            theta: wrap_angle(theta),
            p: wrap_momentum(p),
        }
    }

    /// Torus distance: shortest wrap-around displacement in both coordinates.
    pub fn torus_distance(&self, other: &PhasePoint) -> f64 {
        let dt = circle_delta(self.theta, other.theta);
        let dp = circle_delta(self.p, other.p);
        dt.hypot(dp)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClassicalParams {
    /// Dimensionless kick parameter `K = k T`.
    pub big_k: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Regime {
    Stable,
    Chaotic,
}

impl ClassicalParams {
    pub fn new(big_k: f64) -> Result<Self> {
        if !big_k.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "K must be finite, got {big_k}"
            )));
        }
        Ok(Self { big_k })
    }

    pub fn regime(&self) -> Regime {
        if (-4.0..=0.0).contains(&self.big_k) {
            Regime::Stable
        } else {
            Regime::Chaotic
        }
    }
}

/// One iteration of the map with kick parameter `big_k`.
#[inline]
pub fn step_with(point: PhasePoint, big_k: f64) -> PhasePoint {
    let p = point.p + big_k * (point.theta - PI);
    let theta = point.theta + p;
    PhasePoint::new(theta, p)
}

pub fn step_classical(point: PhasePoint, params: ClassicalParams) -> PhasePoint {
    step_with(point, params.big_k)
}

/// Closed-form maximal Lyapunov exponent of the sawtooth map.
pub fn lyapunov_exponent(params: ClassicalParams) -> f64 {
    let k = params.big_k;
    if k > 0.0 {
        ((2.0 + k + (k * k + 4.0 * k).sqrt()) / 2.0).ln()
    } else if k < -4.0 {
        ((2.0 + k - (k * k + 4.0 * k).sqrt()) / 2.0).abs().ln()
    } else {
        0.0
    }
}

/// Frequency `sqrt(-K) / 2pi` of the harmonic motion in the central island.
pub fn island_frequency(params: ClassicalParams) -> Result<f64> {
    let k = params.big_k;
    if !(-4.0..0.0).contains(&k) {
        return Err(Error::InvalidParameter(format!(
            "island frequency needs -4 <= K < 0, got {k}"
        )));
    }
    Ok((-k).sqrt() / TAU)
}

/// First-order change of the island frequency when `K -> K + delta_k`.
pub fn frequency_shift(params: ClassicalParams, delta_k: f64) -> Result<f64> {
    let k = params.big_k;
    if !(k > -4.0 && k < 0.0) {
        return Err(Error::InvalidParameter(format!(
            "frequency shift needs -4 < K < 0, got {k}"
        )));
    }
    Ok(delta_k / (4.0 * PI * (-k).sqrt()))
}

/// Random kick-parameter fluctuations `dK(t)` uniform in `[-max, max]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KickNoiseSchedule {
    pub delta_k_max: f64,
    pub seed: u64,
}

impl KickNoiseSchedule {
    pub fn new(delta_k_max: f64, seed: u64) -> Result<Self> {
        if !(delta_k_max.is_finite() && delta_k_max >= 0.0) {
            return Err(Error::InvalidParameter(format!(
                "kick noise amplitude must be finite and >= 0, got {delta_k_max}"
            )));
        }
        Ok(Self { delta_k_max, seed })
    }

    pub fn none() -> Self {
        Self {
            delta_k_max: 0.0,
            seed: 0,
        }
    }

    /// Iterator over the per-step draws.
    pub fn draws(&self) -> KickDraws {
        KickDraws {
            amplitude: self.delta_k_max,
            rng: stream(self.seed, StreamDomain::Trajectory, 0),
        }
    }
}

pub struct KickDraws {
    amplitude: f64,
    rng: ChaCha8Rng,
}

impl Iterator for KickDraws {
    type Item = f64;

    fn next(&mut self) -> Option<f64> {
        if self.amplitude == 0.0 {
            return Some(0.0);
        }
        Some(self.rng.random_range(-self.amplitude..=self.amplitude))
    }
}

/// Iterates every seed for `steps` map steps. Each returned orbit starts with
/// the (reduced) seed itself, so it holds `steps + 1` points.
pub fn poincare_section(
    seeds: &[PhasePoint],
    params: ClassicalParams,
    steps: usize,
) -> Vec<Vec<PhasePoint>> {
    seeds
        .iter()
        .map(|&seed| {
            let mut orbit = Vec::with_capacity(steps + 1);
            let mut x = PhasePoint::new(seed.theta, seed.p);
            orbit.push(x);
            for _ in 0..steps {
                x = step_classical(x, params);
                orbit.push(x);
            }
            orbit
        })
        .collect()
}

/// Orbit where step `t` uses `K + dK(t)`.
pub fn trajectory_perturbed(
    point: PhasePoint,
    params: ClassicalParams,
    noise: &KickNoiseSchedule,
    steps: usize,
) -> Vec<PhasePoint> {
    let mut orbit = Vec::with_capacity(steps + 1);
    let mut x = PhasePoint::new(point.theta, point.p);
    orbit.push(x);
    for dk in noise.draws().take(steps) {
        x = step_with(x, params.big_k + dk);
        orbit.push(x);
    }
    orbit
}

/// Benettin-style estimate: follows a companion orbit at distance `d0`,
/// renormalising the separation after each step.
pub fn lyapunov_numerical(
    start: PhasePoint,
    params: ClassicalParams,
    steps: usize,
    d0: f64,
) -> f64 {
    let mut x = start;
    let mut y = PhasePoint::new(x.theta + d0, x.p);
    let mut sum = 0.0;
    for _ in 0..steps {
        x = step_classical(x, params);
        y = step_classical(y, params);
        let dt = circle_delta(x.theta, y.theta);
        let dp = circle_delta(x.p, y.p);
        let d = dt.hypot(dp);
        sum += (d / d0).ln();
        let s = d0 / d;
        y = PhasePoint::new(x.theta + dt * s, x.p + dp * s);
    }
    sum / steps as f64
}

/// Seed set for the stable-regime section: seven orbits inside the central
/// island and one in the surrounding chaotic layer.
pub fn default_section_seeds() -> Vec<PhasePoint> {
    let mut seeds: Vec<PhasePoint> = [0.3, 0.6, 1.0, 1.4, 1.8, 2.2, 2.6]
        .iter()
        .map(|r| PhasePoint::new(PI + r, 0.0))
        .collect();
    seeds.push(PhasePoint::new(0.02, 0.0));
    seeds
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(k: f64) -> ClassicalParams {
        ClassicalParams::new(k).unwrap()
    }

    #[test]
    fn centre_is_a_fixed_point() {
        for k in [-3.0, -0.5, 0.1, 5.0] {
            let x = step_classical(PhasePoint::new(PI, 0.0), params(k));
            assert_eq!(x, PhasePoint::new(PI, 0.0));
        }
    }

    #[test]
    fn direct_evaluation() {
        let x = step_classical(PhasePoint::new(PI + 0.1, 0.0), params(1.0));
        assert!((x.p - 0.1).abs() < 1e-14);
        assert!((x.theta - (PI + 0.2)).abs() < 1e-14);
    }

    #[test]
    fn wrapping_ranges() {
        for v in [-10.0, -PI, -1e-18, 0.0, PI, TAU, 7.5, 1e6] {
            let t = wrap_angle(v);
            assert!((0.0..TAU).contains(&t), "{v} -> {t}");
            let p = wrap_momentum(v);
            assert!((-PI..PI).contains(&p), "{v} -> {p}");
        }
    }

    #[test]
    fn lyapunov_branches() {
        assert!((lyapunov_exponent(params(0.1)) - 0.315).abs() < 1e-3);
        assert_eq!(lyapunov_exponent(params(-2.0)), 0.0);
        let expect = ((3.0 + 5f64.sqrt()) / 2.0).ln();
        assert!((lyapunov_exponent(params(-5.0)) - expect).abs() < 1e-12);
        assert!((expect - 0.9624).abs() < 1e-4);
        assert!(lyapunov_exponent(params(1e-6)) < 2e-3);
        assert!(lyapunov_exponent(params(-4.0 - 1e-6)) < 2e-3);
    }

    #[test]
    fn island_frequency_domain() {
        let nu = island_frequency(params(-0.5)).unwrap();
        assert!((nu - 0.5f64.sqrt() / TAU).abs() < 1e-15);
        assert!((nu - 0.11254).abs() < 1e-5);
        assert!((island_frequency(params(-4.0)).unwrap() - 1.0 / PI).abs() < 1e-15);
        assert!(island_frequency(params(-PI * PI)).is_err());
        assert!(island_frequency(params(0.0)).is_err());
    }

    #[test]
    fn frequency_shift_values() {
        let d = frequency_shift(params(-0.5), 4e-3).unwrap();
        assert!((d - 4.50e-4).abs() < 1e-6, "{d}");
        assert_eq!(frequency_shift(params(-0.5), 0.0).unwrap(), 0.0);
        let d = frequency_shift(params(-1.0), 1e-2).unwrap();
        assert!((d - 7.96e-4).abs() < 1e-6, "{d}");
        assert!(frequency_shift(params(0.5), 1e-3).is_err());
        assert!(frequency_shift(params(-4.0), 1e-3).is_err());
    }

    #[test]
    fn rejects_nan() {
        assert!(ClassicalParams::new(f64::NAN).is_err());
        assert!(KickNoiseSchedule::new(-1.0, 0).is_err());
    }

    #[test]
    fn zero_noise_matches_unperturbed() {
        let p = params(0.3);
        let start = PhasePoint::new(1.0, 0.4);
        let a = trajectory_perturbed(start, p, &KickNoiseSchedule::none(), 200);
        let b = &poincare_section(&[start], p, 200)[0];
        assert_eq!(&a, b);
    }

    #[test]
    fn kick_draws_bounded_and_reproducible() {
        let s = KickNoiseSchedule::new(1e-3, 42).unwrap();
        let a: Vec<f64> = s.draws().take(1000).collect();
        let b: Vec<f64> = s.draws().take(1000).collect();
        assert_eq!(a, b);
        assert!(a.iter().all(|d| d.abs() <= 1e-3));
    }

    #[test]
    fn section_echoes_seed_for_zero_steps() {
        let seeds = default_section_seeds();
        let sec = poincare_section(&seeds, params(-0.5), 0);
        assert_eq!(sec.len(), 8);
        assert!(sec
            .iter()
            .zip(&seeds)
            .all(|(o, s)| o.len() == 1 && o[0] == *s));
    }

    #[test]
    fn tangent_estimate_matches_closed_form() {
        for k in [0.1, 0.5, 2.0] {
            let num = lyapunov_numerical(PhasePoint::new(1.3, 0.4), params(k), 4000, 1e-9);
            let exact = lyapunov_exponent(params(k));
            assert!((num / exact - 1.0).abs() < 0.05, "K={k}: {num} vs {exact}");
        }
    }

    #[test]
    fn chaotic_orbit_fills_the_torus() {
        let orbit = &poincare_section(&[PhasePoint::new(1.0, 0.3)], params(0.5), 100_000)[0];
        let cells = 10;
        let mut hist = vec![0usize; cells * cells];
        for x in orbit {
            let i = ((x.theta / TAU) * cells as f64) as usize;
            let j = (((x.p + PI) / TAU) * cells as f64) as usize;
            hist[i.min(cells - 1) * cells + j.min(cells - 1)] += 1;
        }
        let mean = orbit.len() as f64 / hist.len() as f64;
        for (c, &h) in hist.iter().enumerate() {
            assert!((h as f64 / mean - 1.0).abs() < 0.2, "cell {c}: {h}");
        }
    }

    fn separations(k: f64, start: PhasePoint, dk: f64, steps: usize) -> Vec<f64> {
        let p = params(k);
        let noise = KickNoiseSchedule::new(dk, 5).unwrap();
        let a = trajectory_perturbed(start, p, &KickNoiseSchedule::none(), steps);
        let b = trajectory_perturbed(start, p, &noise, steps);
        a.iter().zip(&b).map(|(x, y)| x.torus_distance(y)).collect()
    }

    #[test]
    fn perturbed_separation_grows_at_lyapunov_rate() {
        let d = separations(0.1, PhasePoint::new(1.3, 0.4), 1e-6, 60);
        let (xs, ys): (Vec<f64>, Vec<f64>) = d
            .iter()
            .enumerate()
            .filter(|(_, &s)| (1e-5..1e-2).contains(&s))
            .map(|(t, s)| (t as f64, s.ln()))
            .unzip();
        assert!(xs.len() >= 10);
        let n = xs.len() as f64;
        let (mx, my) = (xs.iter().sum::<f64>() / n, ys.iter().sum::<f64>() / n);
        let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
        let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
        let slope = sxy / sxx;
        assert!((slope / 0.315 - 1.0).abs() < 0.15, "slope {slope}");
    }

    #[test]
    fn island_separation_stays_polynomial() {
        let d = separations(-0.5, PhasePoint::new(1.0, 0.0), 1e-6, 1000);
        for (t, s) in d.iter().enumerate() {
            assert!(*s <= 1e-6 * (1.0 + t as f64).powi(2), "t={t} sep={s}");
        }
    }

    proptest::proptest! {
        #[test]
        fn map_preserves_area(
            k in -6.0f64..6.0,
            theta in 0.05f64..(TAU - 0.05),
            p in -3.0f64..3.0,
        ) {
            let h = 1e-4;
            let x = PhasePoint::new(theta, p);
            let f = |q: PhasePoint| step_with(q, k);
            let y0 = f(x);
            let ya = f(PhasePoint::new(theta + h, p));
            let yb = f(PhasePoint::new(theta, p + h));
            let (a1, a2) = (circle_delta(ya.theta, y0.theta), circle_delta(ya.p, y0.p));
            let (b1, b2) = (circle_delta(yb.theta, y0.theta), circle_delta(yb.p, y0.p));
            let ratio = (a1 * b2 - a2 * b1) / (h * h);
            proptest::prop_assert!((ratio - 1.0).abs() < 1e-9, "ratio {}", ratio);
        }
    }
}
