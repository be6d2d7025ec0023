use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use sawtooth_core::circuit::NoiseRegime;
use sawtooth_core::exec::Execution;
use sawtooth_core::lab::{
    fidelity_curve, Ensembles, ErrorChannel, ExperimentConfig, InitialCondition,
};
use sawtooth_core::LatticeParams;

fn config(channel: ErrorChannel) -> ExperimentConfig {
    ExperimentConfig::new(
        LatticeParams::new(8, 0.5).unwrap(),
        channel,
        InitialCondition::Random,
        40,
        Ensembles::new(8, 1),
        3,
    )
    .unwrap()
}

fn ensemble(c: &mut Criterion) {
    let mut group = c.benchmark_group("fidelity_curve");
    group.sample_size(10);
    let channels = [
        (
            "quantum",
            ErrorChannel::Quantum {
                epsilon: 0.02,
                regime: NoiseRegime::Memoryless,
            },
        ),
        ("classical", ErrorChannel::Classical { delta_big_k: 0.01 }),
    ];
    for (name, channel) in channels {
        for (mode, execution) in [
            ("sequential", Execution::Sequential),
            ("parallel", Execution::Parallel),
        ] {
            let cfg = config(channel).with_execution(execution);
            group.bench_with_input(BenchmarkId::new(name, mode), &cfg, |b, cfg| {
                b.iter(|| fidelity_curve(cfg).unwrap())
            });
        }
    }
    group.finish();
}

criterion_group!(benches, ensemble);
criterion_main!(benches);
