use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use ditkit_bench::layered;
use ditkit_core::compiler::{compile, decompose_entangling_qr, decompose_local_qr, prepare_state, PassName};
use ditkit_core::device::Device;
use ditkit_core::sim::simulate;
use ditkit_core::{gate_matrix, GateKind};
use std::hint::black_box;

fn local(c: &mut Criterion) {
    let mut group = c.benchmark_group("local_qr");
    for d in [3, 5, 7, 10] {
        let u = gate_matrix(&GateKind::H, &[d]).unwrap();
        group.bench_with_input(BenchmarkId::from_parameter(d), &u, |b, u| b.iter(|| decompose_local_qr(black_box(u)).unwrap()));
    }
    group.finish();
}

fn entangling(c: &mut Criterion) {
    let mut group = c.benchmark_group("entangling_qr");
    for (d1, d2) in [(2, 3), (3, 3), (4, 5)] {
        let u = gate_matrix(&GateKind::Ms { theta: 0.7 }, &[d1, d2]).unwrap();
        group.bench_with_input(BenchmarkId::new("ms", format!("{d1}x{d2}")), &u, |b, u| {
            b.iter(|| decompose_entangling_qr(black_box(u), (d1, d2)).unwrap())
        });
    }
    group.finish();
}

fn physical(c: &mut Criterion) {
    let device = Device::bundled("faketraps2six").unwrap();
    let circuit = layered(&[6, 6, 6], 2);
    let passes = [PassName::PhyLocQRPass, PassName::PhyEntQRPass];
    c.bench_function("compile_faketraps2six", |b| b.iter(|| compile(black_box(&circuit), Some(&device), &passes).unwrap()));
}

fn state_prep(c: &mut Criterion) {
    let target = simulate(&layered(&[3, 4, 3], 3)).unwrap();
    for eps in [0.0, 0.01] {
        c.bench_function(&format!("prepare_state_eps_{eps}"), |b| b.iter(|| prepare_state(black_box(&target), eps).unwrap()));
    }
}

criterion_group!(benches, local, entangling, physical, state_prep);
criterion_main!(benches);
