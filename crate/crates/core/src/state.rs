//! State vectors on the discretised torus.

use std::f64::consts::{PI, TAU};
use std::fmt::Write as _;
use std::io::{BufRead, Write};

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fourier::FourierPlan;
use crate::lattice::LatticeParams;
use crate::rng::{stream, StreamDomain};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Basis {
    Momentum,
    Angle,
}

impl Basis {
    pub fn as_str(&self) -> &'static str {
        match self {
            Basis::Momentum => "momentum",
            Basis::Angle => "angle",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct QuantumState {
    amps: Vec<Complex64>,
    basis: Basis,
    lattice: LatticeParams,
}

/// Centre and width of a coherent packet.
///
/// When `sigma` is unset the momentum width follows `sigma^2 = N/(2pi L)` with
/// `L = cells` (default 1), which gives equal widths in `theta` and `p`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WavePacketSpec {
    pub theta0: f64,
    pub p0: f64,
    pub sigma: Option<f64>,
    pub cells: f64,
}

impl WavePacketSpec {
    pub fn new(theta0: f64, p0: f64) -> Self {
        Self {
            theta0,
            p0,
            sigma: None,
            cells: 1.0,
        }
    }

    pub fn with_sigma(mut self, sigma: f64) -> Self {
        self.sigma = Some(sigma);
        self
    }

    pub fn with_cells(mut self, cells: f64) -> Self {
        self.cells = cells;
        self
    }

    pub fn sigma_for(&self, lattice: &LatticeParams) -> f64 {
        self.sigma
            .unwrap_or_else(|| (lattice.dim() as f64 / (TAU * self.cells)).sqrt())
    }
}

impl QuantumState {
    pub fn from_amplitudes(
        amps: Vec<Complex64>,
        basis: Basis,
        lattice: LatticeParams,
    ) -> Result<Self> {
        if amps.len() != lattice.dim() {
            return Err(Error::DimensionMismatch {
                left: amps.len(),
                right: lattice.dim(),
            });
        }
        Ok(Self {
            amps,
            basis,
            lattice,
        })
    }

    /// Momentum eigenstate `|n>` (with `n = index - N/2`).
    pub fn basis_state(lattice: LatticeParams, index: usize, basis: Basis) -> Result<Self> {
        if index >= lattice.dim() {
            return Err(Error::InvalidParameter(format!(
                "basis index {index} out of range for dimension {}",
                lattice.dim()
            )));
        }
        let mut amps = vec![Complex64::new(0.0, 0.0); lattice.dim()];
        amps[index] = Complex64::new(1.0, 0.0);
        Ok(Self {
            amps,
            basis,
            lattice,
        })
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn amplitudes_mut(&mut self) -> &mut [Complex64] {
        &mut self.amps
    }

    pub fn into_amplitudes(self) -> Vec<Complex64> {
        self.amps
    }

    pub fn basis(&self) -> Basis {
        self.basis
    }

    pub fn lattice(&self) -> &LatticeParams {
        &self.lattice
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn normalize(&mut self) {
        let s = 1.0 / self.norm_sqr().sqrt();
        self.amps.iter_mut().for_each(|a| *a *= s);
    }

    pub fn probabilities(&self) -> Vec<f64> {
        self.amps.iter().map(|a| a.norm_sqr()).collect()
    }

    fn expect_basis(&self, expected: Basis) -> Result<()> {
        if self.basis != expected {
            return Err(Error::WrongBasis {
                expected,
                found: self.basis,
            });
        }
        Ok(())
    }

    pub fn to_angle(&self) -> Result<QuantumState> {
        self.to_angle_with(&FourierPlan::new(self.dim()))
    }

    pub fn to_momentum(&self) -> Result<QuantumState> {
        self.to_momentum_with(&FourierPlan::new(self.dim()))
    }

    pub fn to_angle_with(&self, plan: &FourierPlan) -> Result<QuantumState> {
        let mut out = self.clone();
        out.transform_to(Basis::Angle, plan)?;
        Ok(out)
    }

    pub fn to_momentum_with(&self, plan: &FourierPlan) -> Result<QuantumState> {
        let mut out = self.clone();
        out.transform_to(Basis::Momentum, plan)?;
        Ok(out)
    }

    /// In-place basis change. Errors if already in `target`.
    pub fn transform_to(&mut self, target: Basis, plan: &FourierPlan) -> Result<()> {
        match target {
            Basis::Angle => {
                self.expect_basis(Basis::Momentum)?;
                plan.momentum_to_angle(&mut self.amps);
            }
            Basis::Momentum => {
                self.expect_basis(Basis::Angle)?;
                plan.angle_to_momentum(&mut self.amps);
            }
        }
        self.basis = target;
        Ok(())
    }

    /// `<self|other>`.
    pub fn inner(&self, other: &QuantumState) -> Result<Complex64> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch {
                left: self.dim(),
                right: other.dim(),
            });
        }
        if self.basis != other.basis {
            return Err(Error::WrongBasis {
                expected: self.basis,
                found: other.basis,
            });
        }
        Ok(inner(&self.amps, &other.amps))
    }

    /// Mean momentum quantum number `<n>` (linear moment).
    pub fn mean_momentum_number(&self) -> Result<f64> {
        self.expect_basis(Basis::Momentum)?;
        Ok(self
            .amps
            .iter()
            .enumerate()
            .map(|(i, a)| a.norm_sqr() * self.lattice.momentum_of(i) as f64)
            .sum())
    }

    /// Standard deviation of `n` (linear moments).
    pub fn momentum_number_spread(&self) -> Result<f64> {
        let mean = self.mean_momentum_number()?;
        Ok(self
            .amps
            .iter()
            .enumerate()
            .map(|(i, a)| a.norm_sqr() * (self.lattice.momentum_of(i) as f64 - mean).powi(2))
            .sum::<f64>()
            .sqrt())
    }

    /// Circular statistics of the rescaled momentum `p = T n` (momentum basis).
    pub fn momentum_circular(&self) -> Result<CircularMoments> {
        self.expect_basis(Basis::Momentum)?;
        let t = self.lattice.hbar_eff();
        Ok(circular_moments(self.amps.iter().enumerate().map(
            |(i, a)| (a.norm_sqr(), t * self.lattice.momentum_of(i) as f64),
        )))
    }

    /// Circular statistics of `theta` (angle basis).
    pub fn angle_circular(&self) -> Result<CircularMoments> {
        self.expect_basis(Basis::Angle)?;
        Ok(circular_moments(
            self.amps
                .iter()
                .enumerate()
                .map(|(l, a)| (a.norm_sqr(), self.lattice.angle_of(l))),
        ))
    }

    /// Writes a CSV snapshot: two `#` header lines, then `index,re,im` rows.
    pub fn write_snapshot<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        let l = &self.lattice;
        writeln!(out, "# sawtooth-state v1")?;
        writeln!(
            out,
            "# n_qubits={},basis={},K={:.17e},hbar_eff={:.17e},kick={:.17e}",
            l.n_qubits(),
            self.basis.as_str(),
            l.big_k(),
            l.hbar_eff(),
            l.kick()
        )?;
        writeln!(out, "index,re,im")?;
        let mut line = String::new();
        for (i, a) in self.amps.iter().enumerate() {
            line.clear();
            let _ = write!(line, "{i},{:.17e},{:.17e}", a.re, a.im);
            writeln!(out, "{line}")?;
        }
        Ok(())
    }

    pub fn read_snapshot<R: BufRead>(input: R) -> Result<QuantumState> {
        let bad = |m: &str| Error::InvalidParameter(format!("snapshot: {m}"));
        let mut n_qubits = None;
        let mut basis = None;
        let mut big_k = None;
        let mut amps = Vec::new();
        for line in input.lines() {
            let line = line.map_err(|e| bad(&e.to_string()))?;
            let line = line.trim();
            if line.is_empty() || line.starts_with("index") || line == "# sawtooth-state v1" {
                continue;
            }
            if let Some(meta) = line.strip_prefix('#') {
                for kv in meta.trim().split(',') {
                    let (k, v) = kv.split_once('=').ok_or_else(|| bad("malformed header"))?;
                    match k.trim() {
                        "n_qubits" => n_qubits = v.trim().parse::<u32>().ok(),
                        "basis" => {
                            basis = match v.trim() {
                                "momentum" => Some(Basis::Momentum),
                                "angle" => Some(Basis::Angle),
                                _ => None,
                            }
                        }
                        "K" => big_k = v.trim().parse::<f64>().ok(),
                        _ => {}
                    }
                }
                continue;
            }
            let mut it = line.split(',');
            let _idx = it.next();
            let re: f64 = it
                .next()
                .and_then(|s| s.trim().parse().ok())
                .ok_or_else(|| bad("bad row"))?;
            let im: f64 = it
                .next()
                .and_then(|s| s.trim().parse().ok())
                .ok_or_else(|| bad("bad row"))?;
            amps.push(Complex64::new(re, im));
        }
        let lattice = LatticeParams::new(
            n_qubits.ok_or_else(|| bad("missing n_qubits"))?,
            big_k.ok_or_else(|| bad("missing K"))?,
        )?;
        QuantumState::from_amplitudes(amps, basis.ok_or_else(|| bad("missing basis"))?, lattice)
    }
}

/// Mean direction and spread of a periodic variable.
///
/// `width` is the Gaussian width parameter `w` of `|psi|^2 ~ exp(-(x-x0)^2/w^2)`,
/// i.e. `sqrt(2)` times the circular standard deviation. A coherent packet
/// with `sigma^2 = N/2pi` has `w_theta = w_p = sqrt(T)` and `w_theta * w_p = T`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CircularMoments {
    pub mean: f64,
    pub resultant: f64,
    pub std_dev: f64,
    pub width: f64,
}

fn circular_moments(weights: impl Iterator<Item = (f64, f64)>) -> CircularMoments {
    let z: Complex64 = weights.map(|(w, x)| Complex64::from_polar(w, x)).sum();
    let resultant = z.norm().min(1.0);
    let std_dev = (-2.0 * resultant.ln()).max(0.0).sqrt();
    CircularMoments {
        mean: z.arg(),
        resultant,
        std_dev,
        width: std::f64::consts::SQRT_2 * std_dev,
    }
}

#[inline]
pub(crate) fn inner(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

/// `|<a|b>|^2`.
pub fn fidelity(a: &QuantumState, b: &QuantumState) -> Result<f64> {
    Ok(a.inner(b)?.norm_sqr())
}

/// Coherent Gaussian packet in the momentum basis:
/// `psi_n ~ exp(-(n - n0)^2 / 2 sigma^2 - i (n - n0/2) theta0)` with `n0 = p0/T`
/// and `n - n0` measured as the wrapped distance on the momentum circle.
///
/// The phase sign follows from `<theta|n> ~ exp(i n theta)`: it is the choice
/// that puts the packet at `<theta> = theta0`.
pub fn gaussian_packet(spec: &WavePacketSpec, lattice: &LatticeParams) -> Result<QuantumState> {
    let dim = lattice.dim();
    let sigma = spec.sigma_for(lattice);
    let limit = dim as f64 / 6.0;
    if !(spec.theta0.is_finite() && spec.p0.is_finite()) {
        return Err(Error::InvalidParameter(
            "packet centre must be finite".into(),
        ));
    }
    if !(sigma.is_finite() && sigma > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "packet width must be > 0, got {sigma}"
        )));
    }
    if sigma > limit {
        return Err(Error::PacketTooWide { sigma, dim, limit });
    }
    let theta0 = crate::classical::wrap_angle(spec.theta0);
    let p0 = crate::classical::wrap_momentum(spec.p0);
    let n0 = p0 / lattice.hbar_eff();
    let period = dim as f64;
    let half = period / 2.0;
    let amps: Vec<Complex64> = (0..dim)
        .map(|i| {
            let n = lattice.momentum_of(i) as f64;
            let d = (n - n0 + half).rem_euclid(period) - half;
            Complex64::from_polar(
                (-d * d / (2.0 * sigma * sigma)).exp(),
                -(n - n0 / 2.0) * theta0,
            )
        })
        .collect();
    let mut state = QuantumState {
        amps,
        basis: Basis::Momentum,
        lattice: *lattice,
    };
    state.normalize();
    Ok(state)
}

/// Momentum-basis state with moduli exactly `1/sqrt(N)` and i.i.d. uniform phases.
pub fn random_state(lattice: &LatticeParams, seed: u64) -> QuantumState {
    let mut rng = stream(seed, StreamDomain::InitialState, 0);
    let m = 1.0 / (lattice.dim() as f64).sqrt();
    let amps = (0..lattice.dim())
        .map(|_| Complex64::from_polar(m, rng.random_range(0.0..TAU)))
        .collect();
    QuantumState {
        amps,
        basis: Basis::Momentum,
        lattice: *lattice,
    }
}

/// Uniformly random packet centre on the torus.
pub fn random_packet_centre<R: Rng>(rng: &mut R) -> (f64, f64) {
    (rng.random_range(0.0..TAU), rng.random_range(-PI..PI))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lattice(nq: u32) -> LatticeParams {
        LatticeParams::new(nq, 0.5).unwrap()
    }

    #[test]
    fn packet_widths_match_hbar() {
        let l = lattice(12);
        let psi = gaussian_packet(&WavePacketSpec::new(1.0, 0.0), &l).unwrap();
        assert!((psi.norm_sqr() - 1.0).abs() < 1e-12);
        assert!(psi.mean_momentum_number().unwrap().abs() < 1e-6);
        let wp = psi.momentum_circular().unwrap().width;
        let ang = psi.to_angle().unwrap().angle_circular().unwrap();
        let expect = (TAU / 4096.0).sqrt();
        assert!((expect - 0.0392).abs() < 1e-4);
        assert!((wp / expect - 1.0).abs() < 0.02, "{wp}");
        assert!((ang.width / expect - 1.0).abs() < 0.02, "{}", ang.width);
        assert!((ang.mean - 1.0).abs() < 1e-6, "mean {}", ang.mean);
        // momentum spread in units of n equals sigma up to sqrt(2)
        let sigma = WavePacketSpec::new(1.0, 0.0).sigma_for(&l);
        let dn = psi.momentum_number_spread().unwrap() * std::f64::consts::SQRT_2;
        assert!((dn / sigma - 1.0).abs() < 1e-3);
    }

    #[test]
    fn minimum_uncertainty_product() {
        for nq in 8..=14 {
            let l = lattice(nq);
            let psi = gaussian_packet(&WavePacketSpec::new(2.0, 0.7), &l).unwrap();
            let wp = psi.momentum_circular().unwrap().width;
            let wt = psi.to_angle().unwrap().angle_circular().unwrap().width;
            let ratio = wp * wt / l.hbar_eff();
            assert!((ratio - 1.0).abs() < 0.05, "nq={nq} ratio={ratio}");
        }
    }

    #[test]
    fn narrow_packet_and_wide_rejection() {
        let l = lattice(8);
        let psi = gaussian_packet(&WavePacketSpec::new(1.0, 0.3).with_sigma(1.0), &l).unwrap();
        assert!((psi.norm_sqr() - 1.0).abs() < 1e-12);
        let big: f64 = psi.probabilities().iter().filter(|&&p| p > 1e-3).count() as f64;
        assert!(big <= 7.0);
        let err = gaussian_packet(&WavePacketSpec::new(1.0, 0.0).with_sigma(50.0), &l);
        assert!(matches!(err, Err(Error::PacketTooWide { .. })));
    }

    #[test]
    fn random_state_moduli() {
        let l = lattice(1);
        let psi = random_state(&l, 3);
        for a in psi.amplitudes() {
            assert!((a.norm() - 0.5f64.sqrt()).abs() < 1e-15);
        }
        let l = lattice(10);
        let psi = random_state(&l, 3);
        assert!((psi.norm_sqr() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn random_overlaps_average_one_over_n() {
        let l = lattice(6);
        let n = l.dim() as f64;
        let samples: Vec<f64> = (0..400)
            .map(|s| fidelity(&random_state(&l, 2 * s), &random_state(&l, 2 * s + 1)).unwrap())
            .collect();
        let m = samples.iter().sum::<f64>() / samples.len() as f64;
        let var = samples.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (samples.len() - 1) as f64;
        let se = (var / samples.len() as f64).sqrt();
        assert!((m - 1.0 / n).abs() < 3.0 * se, "mean {m} vs {}", 1.0 / n);
    }

    #[test]
    fn delta_in_momentum_is_flat_in_angle() {
        let l = lattice(7);
        let psi = QuantumState::basis_state(l, 64, Basis::Momentum).unwrap();
        let ang = psi.to_angle().unwrap();
        for p in ang.probabilities() {
            assert!((p - 1.0 / 128.0).abs() < 1e-14);
        }
    }

    #[test]
    fn transforms_check_basis_and_round_trip() {
        let l = lattice(9);
        let psi = random_state(&l, 11);
        assert!(psi.to_momentum().is_err());
        let back = psi.to_angle().unwrap().to_momentum().unwrap();
        let dev = psi
            .amplitudes()
            .iter()
            .zip(back.amplitudes())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max);
        assert!(dev < 1e-12);
        assert!(psi.to_angle().unwrap().to_angle().is_err());
    }

    #[test]
    fn fidelity_properties() {
        let l = lattice(5);
        let a = random_state(&l, 1);
        let b = random_state(&l, 2);
        assert!((fidelity(&a, &a).unwrap() - 1.0).abs() < 1e-12);
        assert_eq!(fidelity(&a, &b).unwrap(), fidelity(&b, &a).unwrap());
        let mut c = a.clone();
        let ph = Complex64::from_polar(1.0, 0.83);
        c.amplitudes_mut().iter_mut().for_each(|x| *x *= ph);
        assert!((fidelity(&a, &c).unwrap() - 1.0).abs() < 1e-12);
        let e0 = QuantumState::basis_state(l, 0, Basis::Momentum).unwrap();
        let e1 = QuantumState::basis_state(l, 1, Basis::Momentum).unwrap();
        assert_eq!(fidelity(&e0, &e1).unwrap(), 0.0);
        let other = random_state(&lattice(4), 1);
        assert!(matches!(
            fidelity(&a, &other),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn snapshot_round_trip() {
        let l = lattice(4);
        let psi = random_state(&l, 9);
        let mut buf = Vec::new();
        psi.write_snapshot(&mut buf).unwrap();
        let back = QuantumState::read_snapshot(&buf[..]).unwrap();
        assert_eq!(back.basis(), Basis::Momentum);
        assert_eq!(back.lattice().n_qubits(), 4);
        for (a, b) in psi.amplitudes().iter().zip(back.amplitudes()) {
            assert!((a - b).norm() < 1e-15);
        }
    }

    proptest::proptest! {
        #![proptest_config(proptest::prelude::ProptestConfig::with_cases(64))]

        #[test]
        fn packets_are_normalised(nq in 4u32..11, theta0 in 0.0f64..TAU, p0 in -3.1f64..3.1) {
            let l = lattice(nq);
            let psi = gaussian_packet(&WavePacketSpec::new(theta0, p0), &l).unwrap();
            proptest::prop_assert!((psi.norm_sqr() - 1.0).abs() < 1e-12);
            proptest::prop_assert!((psi.to_angle().unwrap().norm_sqr() - 1.0).abs() < 1e-12);
        }

        #[test]
        fn basis_change_keeps_inner_products(nq in 1u32..11, s1 in 0u64..1000, s2 in 0u64..1000) {
            let l = lattice(nq);
            let a = random_state(&l, s1);
            let b = random_state(&l, s2);
            let before = a.inner(&b).unwrap();
            let after = a.to_angle().unwrap().inner(&b.to_angle().unwrap()).unwrap();
            proptest::prop_assert!((before - after).norm() < 1e-12);
        }

        #[test]
        fn fidelity_is_symmetric(nq in 1u32..9, s1 in 0u64..1000, s2 in 0u64..1000) {
            let l = lattice(nq);
            let a = random_state(&l, s1);
            let b = random_state(&l, s2);
            proptest::prop_assert_eq!(fidelity(&a, &b).unwrap(), fidelity(&b, &a).unwrap());
        }
    }
}
