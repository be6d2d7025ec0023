//! Gate-level sawtooth circuit and the unitary gate-noise channel.

mod gate;
mod kernel;
mod noise;
mod program;

pub use gate::Gate;
pub use kernel::{
    apply_gate_raw, apply_single_qubit, hadamard_matrix, tilted_hadamard, DiagonalAccumulator,
    Matrix2,
};
pub use noise::{apply_with_draw, NoiseModel, NoiseRegime, NoisyGateDraw};
pub use program::{
    apply_gate, apply_noisy_gate, build_sawtooth_circuit, draw_log_csv, evolve_noisy,
    inverse_qft_gates, qft_gates, run_step_noisy, CircuitProgram, CircuitRunner, DrawRecord,
    GateCounts,
};
