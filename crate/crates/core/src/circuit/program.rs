//! Gate-level realisation of one sawtooth map step.
//!
//! With the register in the momentum basis, one step is
//!
//! ```text
//! U = D_rot  QFT^-1  D_kick  QFT
//! ```
//!
//! where `QFT` is the textbook Hadamard/controlled-phase ladder without the
//! final swaps, so its output is bit-reversed; `D_kick` therefore reads the
//! angle index `l` with reversed qubit weights and `QFT^-1` takes reversed
//! input. The `(-1)^l` twiddles of the torus transform cancel between the two
//! transforms. Both diagonal blocks are quadratic forms `c (m - N/2)^2` of the
//! register index `m` and are expanded over all ordered qubit pairs: one
//! controlled-phase per ordered pair `(a, b)`, `a != b`, with angle
//! `c w_a w_b`, and one single-qubit phase per qubit with angle
//! `c (w_a^2 - N w_a)`. The constant `c N^2/4` of both blocks is kept as the
//! program's global phase.

use std::f64::consts::{PI, TAU};
use std::fmt::Write as _;

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::gate::Gate;
use super::kernel::{apply_gate_raw, apply_single_qubit, tilted_hadamard, DiagonalAccumulator};
use super::noise::{apply_with_draw, pair_table, single_table, NoiseModel, NoisyGateDraw};
use crate::error::{Error, Result};
use crate::lattice::LatticeParams;
use crate::state::{Basis, QuantumState};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct GateCounts {
    pub hadamard: usize,
    pub cphase: usize,
}

impl GateCounts {
    pub fn total(&self) -> usize {
        self.hadamard + self.cphase
    }

    /// `2 n_q` Hadamards and `3 n_q^2 - n_q` controlled-phases.
    pub fn expected(n_qubits: usize) -> Self {
        Self {
            hadamard: 2 * n_qubits,
            cphase: 3 * n_qubits * n_qubits - n_qubits,
        }
    }
}

/// Contiguous piece of a program: one Hadamard or a run of diagonal gates.
#[derive(Debug, Clone, PartialEq)]
enum Segment {
    Single(usize),
    Diagonal(std::ops::Range<usize>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct CircuitProgram {
    n_qubits: usize,
    gates: Vec<Gate>,
    global_phase: f64,
    segments: Vec<Segment>,
}

fn reduce(angle: f64) -> f64 {
    let r = angle.rem_euclid(TAU);
    if r >= TAU {
        0.0
    } else {
        r
    }
}

impl CircuitProgram {
    pub fn new(n_qubits: usize, gates: Vec<Gate>, global_phase: f64) -> Result<Self> {
        for g in &gates {
            g.validate(n_qubits)?;
        }
        let mut segments = Vec::new();
        let mut i = 0;
        while i < gates.len() {
            if gates[i].is_diagonal() {
                let start = i;
                while i < gates.len() && gates[i].is_diagonal() {
                    i += 1;
                }
                segments.push(Segment::Diagonal(start..i));
            } else {
                segments.push(Segment::Single(i));
                i += 1;
            }
        }
        Ok(Self {
            n_qubits,
            gates,
            global_phase: reduce(global_phase),
            segments,
        })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    /// Phase `exp(i phi)` by which the gate product differs from the map step.
    pub fn global_phase(&self) -> f64 {
        self.global_phase
    }

    pub fn counts(&self) -> GateCounts {
        let hadamard = self
            .gates
            .iter()
            .filter(|g| matches!(g, Gate::Hadamard { .. }))
            .count();
        GateCounts {
            hadamard,
            cphase: self.gates.len() - hadamard,
        }
    }

    /// Text listing, one `position,kind,qubits,angle` row per gate.
    pub fn dump(&self) -> String {
        let mut out = String::from("position,kind,qubits,angle\n");
        for (i, g) in self.gates.iter().enumerate() {
            let qubits = match *g {
                Gate::Hadamard { target } | Gate::Phase { target, .. } => target.to_string(),
                Gate::ControlledPhase {
                    control, target, ..
                } => format!("{control}:{target}"),
            };
            let angle = g.angle().map(|a| format!("{a:.17e}")).unwrap_or_default();
            let _ = writeln!(out, "{i},{},{qubits},{angle}", g.kind());
        }
        out
    }
}

/// Textbook QFT ladder `|x> -> N^-1/2 sum_y e^{2 pi i x y/N} |rev(y)>`.
pub fn qft_gates(n_qubits: usize) -> Vec<Gate> {
    let mut gates = Vec::with_capacity(n_qubits * (n_qubits + 1) / 2);
    for j in (0..n_qubits).rev() {
        gates.push(Gate::Hadamard { target: j });
        for m in (0..j).rev() {
            gates.push(Gate::ControlledPhase {
                control: m,
                target: j,
                angle: PI / (1u64 << (j - m)) as f64,
            });
        }
    }
    gates
}

/// Inverse of [`qft_gates`]: reversed order, negated angles.
pub fn inverse_qft_gates(n_qubits: usize) -> Vec<Gate> {
    qft_gates(n_qubits)
        .into_iter()
        .rev()
        .map(|g| match g {
            Gate::ControlledPhase {
                control,
                target,
                angle,
            } => Gate::ControlledPhase {
                control,
                target,
                angle: reduce(-angle),
            },
            other => other,
        })
        .collect()
}

/// Gates for `exp(i c (m - N/2)^2)` where qubit `q` carries weight `weights[q]`.
/// Returns the gates and the dropped constant `c N^2 / 4`.
fn quadratic_block(c: f64, weights: &[f64]) -> (Vec<Gate>, f64) {
    let n = weights.len();
    let dim = (1u64 << n) as f64;
    let mut gates = Vec::with_capacity(n * n);
    for a in 0..n {
        for b in 0..n {
            if a == b {
                let w = weights[a];
                gates.push(Gate::Phase {
                    target: a,
                    angle: reduce(c * (w * w - dim * w)),
                });
            } else {
                gates.push(Gate::ControlledPhase {
                    control: a,
                    target: b,
                    angle: reduce(c * weights[a] * weights[b]),
                });
            }
        }
    }
    (gates, c * dim * dim / 4.0)
}

/// Builds the gate program realising one map step on `lattice`.
pub fn build_sawtooth_circuit(lattice: &LatticeParams) -> CircuitProgram {
    let n = lattice.n_qubits() as usize;
    let t = lattice.hbar_eff();
    // kick phase k (theta_l - pi)^2 / 2 = (k T^2 / 2) (l - N/2)^2
    let c_kick = 0.5 * lattice.kick() * t * t;
    // rotation phase -T n^2 / 2, n = m - N/2
    let c_rot = -0.5 * t;
    let reversed: Vec<f64> = (0..n).map(|q| (1u64 << (n - 1 - q)) as f64).collect();
    let natural: Vec<f64> = (0..n).map(|q| (1u64 << q) as f64).collect();

    let (kick, kick_const) = quadratic_block(c_kick, &reversed);
    let (rot, rot_const) = quadratic_block(c_rot, &natural);
    let mut gates = qft_gates(n);
    gates.extend(kick);
    gates.extend(inverse_qft_gates(n));
    gates.extend(rot);
    CircuitProgram::new(n, gates, kick_const + rot_const).expect("generated gates are valid")
}

fn check_register(state: &QuantumState, n_qubits: usize) -> Result<()> {
    if state.dim() != 1usize << n_qubits {
        return Err(Error::DimensionMismatch {
            left: state.dim(),
            right: 1usize << n_qubits,
        });
    }
    if state.basis() != Basis::Momentum {
        return Err(Error::WrongBasis {
            expected: Basis::Momentum,
            found: state.basis(),
        });
    }
    Ok(())
}

/// Applies one ideal gate to a momentum-basis register.
pub fn apply_gate(state: &mut QuantumState, gate: &Gate) -> Result<()> {
    let n = state.lattice().n_qubits() as usize;
    gate.validate(n)?;
    check_register(state, n)?;
    apply_gate_raw(state.amplitudes_mut(), gate);
    Ok(())
}

/// Applies one noisy gate, drawing its error parameters from `rng`.
pub fn apply_noisy_gate<R: Rng + ?Sized>(
    state: &mut QuantumState,
    gate: &Gate,
    noise: &NoiseModel,
    rng: &mut R,
) -> Result<Option<NoisyGateDraw>> {
    let n = state.lattice().n_qubits() as usize;
    gate.validate(n)?;
    check_register(state, n)?;
    let draw = noise.draw(gate, rng);
    apply_with_draw(state.amplitudes_mut(), gate, draw.as_ref());
    Ok(draw)
}

/// One logged noisy application.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DrawRecord {
    pub step: u64,
    pub gate_position: usize,
    pub draw: NoisyGateDraw,
}

pub fn draw_log_csv(log: &[DrawRecord]) -> String {
    let mut out = String::from("step,gate_position,params\n");
    for r in log {
        let params: Vec<String> = r
            .draw
            .params()
            .iter()
            .map(|p| format!("{p:.17e}"))
            .collect();
        let _ = writeln!(out, "{},{},{}", r.step, r.gate_position, params.join(";"));
    }
    out
}

/// Executes programs on raw amplitude buffers; owns the work buffers of the
/// fused diagonal kernel. Runs of diagonal gates are folded into a single
/// pass, with noise drawn gate by gate in program order.
#[derive(Debug, Clone)]
pub struct CircuitRunner {
    acc: DiagonalAccumulator,
    table: Vec<Complex64>,
    scratch: Vec<Complex64>,
}

impl CircuitRunner {
    pub fn new(n_qubits: usize) -> Self {
        Self {
            acc: DiagonalAccumulator::new(n_qubits),
            table: Vec::new(),
            scratch: Vec::new(),
        }
    }

    /// Runs every gate of `program` with noise drawn from `rng`; draws are
    /// appended to `log` (tagged with `step`) when given. The program's
    /// global phase is applied so a noiseless run equals the map step.
    pub fn run<R: Rng + ?Sized>(
        &mut self,
        amps: &mut [Complex64],
        program: &CircuitProgram,
        noise: &NoiseModel,
        rng: &mut R,
        step: u64,
        mut log: Option<&mut Vec<DrawRecord>>,
    ) {
        debug_assert_eq!(amps.len(), 1usize << program.n_qubits);
        for seg in &program.segments {
            match seg {
                Segment::Single(pos) => {
                    let gate = &program.gates[*pos];
                    let draw = noise.draw(gate, rng);
                    if let Gate::Hadamard { target } = *gate {
                        let (nu1, nu2) = match draw {
                            Some(NoisyGateDraw::Tilt { nu1, nu2 }) => (nu1, nu2),
                            _ => (0.0, 0.0),
                        };
                        apply_single_qubit(amps, target, &tilted_hadamard(nu1, nu2));
                    }
                    if let (Some(log), Some(draw)) = (log.as_deref_mut(), draw) {
                        log.push(DrawRecord {
                            step,
                            gate_position: *pos,
                            draw,
                        });
                    }
                }
                Segment::Diagonal(range) => {
                    self.acc.clear();
                    for pos in range.clone() {
                        let gate = &program.gates[pos];
                        let draw = noise.draw(gate, rng);
                        match *gate {
                            Gate::ControlledPhase {
                                control,
                                target,
                                angle,
                            } => self.acc.add_pair(
                                control,
                                target,
                                &pair_table(angle, draw.as_ref()),
                            ),
                            Gate::Phase { target, angle } => self
                                .acc
                                .add_single(target, &single_table(angle, draw.as_ref())),
                            Gate::Hadamard { .. } => unreachable!("diagonal segment"),
                        }
                        if let (Some(log), Some(draw)) = (log.as_deref_mut(), draw) {
                            log.push(DrawRecord {
                                step,
                                gate_position: pos,
                                draw,
                            });
                        }
                    }
                    self.acc.apply(amps, &mut self.table, &mut self.scratch);
                }
            }
        }
        if program.global_phase != 0.0 {
            let g = Complex64::cis(program.global_phase);
            amps.iter_mut().for_each(|a| *a *= g);
        }
    }
}

/// One noisy map step through the gate program.
pub fn run_step_noisy<R: Rng + ?Sized>(
    state: &mut QuantumState,
    program: &CircuitProgram,
    noise: &NoiseModel,
    rng: &mut R,
) -> Result<()> {
    check_register(state, program.n_qubits)?;
    CircuitRunner::new(program.n_qubits).run(state.amplitudes_mut(), program, noise, rng, 0, None);
    Ok(())
}

/// Noisy evolution over `steps` map steps; step `t` draws from
/// `noise.step_rng(t)`.
pub fn evolve_noisy(
    state: &QuantumState,
    program: &CircuitProgram,
    noise: &NoiseModel,
    steps: usize,
) -> Result<QuantumState> {
    check_register(state, program.n_qubits)?;
    let mut out = state.clone();
    let mut runner = CircuitRunner::new(program.n_qubits);
    for t in 0..steps {
        let mut rng = noise.step_rng(t as u64);
        runner.run(
            out.amplitudes_mut(),
            program,
            noise,
            &mut rng,
            t as u64,
            None,
        );
    }
    Ok(out)
}
