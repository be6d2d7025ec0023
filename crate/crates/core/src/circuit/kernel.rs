//! Bit-indexed statevector kernels. Qubit `q` is bit `q` of the basis index.

use num_complex::Complex64;

use super::gate::Gate;

pub type Matrix2 = [[Complex64; 2]; 2];

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

pub fn hadamard_matrix() -> Matrix2 {
    let h = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    [[h, h], [h, -h]]
}

/// `u . sigma` for the axis `u = (sin a cos b, sin a sin b, cos a)` with
/// `a = pi/4 + nu1`, `b = nu2`. At `nu1 = nu2 = 0` this is the Hadamard gate.
/// The pi-rotation about `u` is `-i u.sigma`; the global `-i` is dropped.
pub fn tilted_hadamard(nu1: f64, nu2: f64) -> Matrix2 {
    let a = std::f64::consts::FRAC_PI_4 + nu1;
    let (s, c) = a.sin_cos();
    [
        [Complex64::new(c, 0.0), Complex64::from_polar(s, -nu2)],
        [Complex64::from_polar(s, nu2), Complex64::new(-c, 0.0)],
    ]
}

/// Applies a 2x2 matrix to qubit `target`.
pub fn apply_single_qubit(amps: &mut [Complex64], target: usize, m: &Matrix2) {
    let stride = 1usize << target;
    for block in amps.chunks_exact_mut(stride << 1) {
        let (lo, hi) = block.split_at_mut(stride);
        for (a, b) in lo.iter_mut().zip(hi.iter_mut()) {
            let x = *a;
            let y = *b;
            *a = m[0][0] * x + m[0][1] * y;
            *b = m[1][0] * x + m[1][1] * y;
        }
    }
}

/// Multiplies amplitude `x` by `exp(i phases[2 b_c + b_t])`.
pub fn apply_pair_phases(amps: &mut [Complex64], control: usize, target: usize, phases: &[f64; 4]) {
    let u = phases.map(Complex64::cis);
    for (x, a) in amps.iter_mut().enumerate() {
        let idx = (((x >> control) & 1) << 1) | ((x >> target) & 1);
        *a *= u[idx];
    }
}

/// Multiplies amplitude `x` by `exp(i phases[b_t])`.
pub fn apply_single_phases(amps: &mut [Complex64], target: usize, phases: &[f64; 2]) {
    let u = phases.map(Complex64::cis);
    for (x, a) in amps.iter_mut().enumerate() {
        *a *= u[(x >> target) & 1];
    }
}

/// Ideal gate action.
pub fn apply_gate_raw(amps: &mut [Complex64], gate: &Gate) {
    match *gate {
        Gate::Hadamard { target } => apply_single_qubit(amps, target, &hadamard_matrix()),
        Gate::ControlledPhase {
            control,
            target,
            angle,
        } => {
            let u = Complex64::cis(angle);
            let mask = (1usize << control) | (1usize << target);
            for (x, a) in amps.iter_mut().enumerate() {
                if x & mask == mask {
                    *a *= u;
                }
            }
        }
        Gate::Phase { target, angle } => {
            let u = Complex64::cis(angle);
            let mask = 1usize << target;
            for (x, a) in amps.iter_mut().enumerate() {
                if x & mask != 0 {
                    *a *= u;
                }
            }
        }
    }
}

/// Accumulated diagonal phase `C + sum_q L_q b_q + sum_{q<r} Q_qr b_q b_r`.
///
/// Any product of diagonal one- and two-qubit gates has this form, so a run
/// of diagonal gates collapses into one pass over the state.
#[derive(Debug, Clone)]
pub struct DiagonalAccumulator {
    n_qubits: usize,
    constant: f64,
    linear: Vec<f64>,
    // row-major, only q < r used
    quadratic: Vec<f64>,
}

impl DiagonalAccumulator {
    pub fn new(n_qubits: usize) -> Self {
        Self {
            n_qubits,
            constant: 0.0,
            linear: vec![0.0; n_qubits],
            quadratic: vec![0.0; n_qubits * n_qubits],
        }
    }

    pub fn clear(&mut self) {
        self.constant = 0.0;
        self.linear.iter_mut().for_each(|v| *v = 0.0);
        self.quadratic.iter_mut().for_each(|v| *v = 0.0);
    }

    /// Adds `phases[2 b_c + b_t]`.
    pub fn add_pair(&mut self, control: usize, target: usize, phases: &[f64; 4]) {
        let [t00, t01, t10, t11] = *phases;
        self.constant += t00;
        self.linear[control] += t10 - t00;
        self.linear[target] += t01 - t00;
        let (a, b) = if control < target {
            (control, target)
        } else {
            (target, control)
        };
        self.quadratic[a * self.n_qubits + b] += t11 - t10 - t01 + t00;
    }

    /// Adds `phases[b_t]`.
    pub fn add_single(&mut self, target: usize, phases: &[f64; 2]) {
        self.constant += phases[0];
        self.linear[target] += phases[1] - phases[0];
    }

    /// Builds the full phase-factor table by doubling over the bits, then
    /// multiplies it into `amps`. `table` and `scratch` are work buffers.
    pub fn apply(
        &self,
        amps: &mut [Complex64],
        table: &mut Vec<Complex64>,
        scratch: &mut Vec<Complex64>,
    ) {
        let n = self.n_qubits;
        let dim = 1usize << n;
        debug_assert_eq!(amps.len(), dim);
        table.clear();
        table.resize(dim, ZERO);
        scratch.clear();
        scratch.resize(dim / 2, ZERO);
        table[0] = Complex64::cis(self.constant);
        for j in 0..n {
            let half = 1usize << j;
            scratch[0] = Complex64::cis(self.linear[j]);
            for m in 0..j {
                let f = Complex64::cis(self.quadratic[m * n + j]);
                let span = 1usize << m;
                for x in 0..span {
                    scratch[x + span] = scratch[x] * f;
                }
            }
            let (lo, hi) = table.split_at_mut(half);
            for ((dst, src), g) in hi[..half].iter_mut().zip(lo.iter()).zip(scratch.iter()) {
                *dst = src * g;
            }
        }
        amps.iter_mut().zip(table.iter()).for_each(|(a, u)| *a *= u);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn random_amps(dim: usize, seed: u64) -> Vec<Complex64> {
        let mut s = seed;
        (0..dim)
            .map(|_| {
                s = crate::rng::splitmix64(s);
                let a = (s >> 11) as f64 / (1u64 << 53) as f64;
                s = crate::rng::splitmix64(s);
                let b = (s >> 11) as f64 / (1u64 << 53) as f64;
                Complex64::new(a - 0.5, b - 0.5)
            })
            .collect()
    }

    fn max_dev(a: &[Complex64], b: &[Complex64]) -> f64 {
        a.iter()
            .zip(b)
            .map(|(x, y)| (x - y).norm())
            .fold(0.0, f64::max)
    }

    #[test]
    fn hadamard_squares_to_identity() {
        let v = random_amps(32, 1);
        let mut w = v.clone();
        for q in 0..5 {
            apply_gate_raw(&mut w, &Gate::Hadamard { target: q });
            apply_gate_raw(&mut w, &Gate::Hadamard { target: q });
        }
        assert!(max_dev(&v, &w) < 1e-14);
    }

    #[test]
    fn controlled_phase_basics() {
        let v = random_amps(4, 2);
        let mut w = v.clone();
        apply_gate_raw(
            &mut w,
            &Gate::ControlledPhase {
                control: 0,
                target: 1,
                angle: 0.0,
            },
        );
        assert_eq!(v, w);
        apply_gate_raw(
            &mut w,
            &Gate::ControlledPhase {
                control: 1,
                target: 0,
                angle: std::f64::consts::PI,
            },
        );
        for x in 0..3 {
            assert_eq!(w[x], v[x]);
        }
        assert!((w[3] + v[3]).norm() < 1e-15);
    }

    #[test]
    fn untilted_hadamard_is_hadamard() {
        let t = tilted_hadamard(0.0, 0.0);
        let h = hadamard_matrix();
        for r in 0..2 {
            for c in 0..2 {
                assert!((t[r][c] - h[r][c]).norm() < 1e-15);
            }
        }
    }

    #[test]
    fn tilted_hadamard_is_unitary() {
        for (a, b) in [(0.01, -0.02), (0.3, 0.7), (-0.1, 0.05)] {
            let m = tilted_hadamard(a, b);
            for r in 0..2 {
                for c in 0..2 {
                    let dot: Complex64 = (0..2).map(|k| m[k][r].conj() * m[k][c]).sum();
                    let expect = if r == c { 1.0 } else { 0.0 };
                    assert!((dot - expect).norm() < 1e-14);
                }
            }
        }
    }

    #[test]
    fn accumulator_matches_gate_by_gate() {
        let n = 6;
        let v = random_amps(1 << n, 3);
        let mut direct = v.clone();
        let mut acc = DiagonalAccumulator::new(n);
        let mut s = 11u64;
        let mut next = || {
            s = crate::rng::splitmix64(s);
            (s >> 11) as f64 / (1u64 << 53) as f64 * 6.0 - 3.0
        };
        for c in 0..n {
            for t in 0..n {
                if c == t {
                    let ph = [next(), next()];
                    apply_single_phases(&mut direct, t, &ph);
                    acc.add_single(t, &ph);
                } else {
                    let ph = [next(), next(), next(), next()];
                    apply_pair_phases(&mut direct, c, t, &ph);
                    acc.add_pair(c, t, &ph);
                }
            }
        }
        let mut fused = v.clone();
        acc.apply(&mut fused, &mut Vec::new(), &mut Vec::new());
        assert!(max_dev(&direct, &fused) < 1e-12);
    }
}
