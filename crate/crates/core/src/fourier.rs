//! Momentum <-> angle transform on the torus grid.
//!
//! Momentum index `i` carries `n = i - N/2`, angle index `l` carries
//! `theta_l = 2pi l/N`. The transform is
//!
//! ```text
//! psi(theta_l) = N^-1/2 sum_i psi_i exp(i n theta_l)
//!              = (-1)^l N^-1/2 sum_i psi_i exp(2pi i i l / N)
//! ```
//!
//! i.e. an unnormalised inverse FFT followed by the `(-1)^l` twiddle and a
//! `1/sqrt(N)` scale. The way back applies the twiddle first and uses the
//! forward FFT.

use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

#[derive(Clone)]
pub struct FourierPlan {
    dim: usize,
    scale: f64,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl std::fmt::Debug for FourierPlan {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("FourierPlan")
            .field("dim", &self.dim)
            .finish()
    }
}

impl FourierPlan {
    pub fn new(dim: usize) -> Self {
        let mut planner = FftPlanner::new();
        Self {
            dim,
            scale: 1.0 / (dim as f64).sqrt(),
            forward: planner.plan_fft_forward(dim),
            inverse: planner.plan_fft_inverse(dim),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn momentum_to_angle(&self, amps: &mut [Complex64]) {
        debug_assert_eq!(amps.len(), self.dim);
        self.inverse.process(amps);
        for (l, a) in amps.iter_mut().enumerate() {
            let s = if l & 1 == 0 { self.scale } else { -self.scale };
            *a *= s;
        }
    }

    pub fn angle_to_momentum(&self, amps: &mut [Complex64]) {
        debug_assert_eq!(amps.len(), self.dim);
        for (l, a) in amps.iter_mut().enumerate() {
            let s = if l & 1 == 0 { self.scale } else { -self.scale };
            *a *= s;
        }
        self.forward.process(amps);
    }
}
