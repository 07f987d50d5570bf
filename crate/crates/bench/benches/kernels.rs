// Copyright 2026 The emech Authors
// SPDX-License-Identifier: Apache-2.0

use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use emech::analysis::{cat_state, grid, wigner, Parity};
use emech::dynamics::{steady_state, LindbladGenerator};
use emech::hilbert::thermal_state;
use emech::C64;
use emech_bench::cooling_system;

fn lindblad_rhs(c: &mut Criterion) {
    let mut g = c.benchmark_group("lindblad_rhs");
    for mech in [10, 30] {
        let (_, layout, h, cs) = cooling_system(mech);
        let gen = LindbladGenerator::new(&h, &cs).unwrap();
        let n = gen.dim();
        let mut rho = vec![C64::new(0.0, 0.0); n * n];
        let th = thermal_state(mech, 5.0).unwrap().density_matrix();
        // Thermal mechanics with transmon and cavity in vacuum.
        for i in 0..mech {
            rho[i * n + i] = th[(i, i)];
        }
        let mut out = vec![C64::new(0.0, 0.0); n * n];
        let mut scratch = vec![C64::new(0.0, 0.0); n * n];
        g.bench_with_input(BenchmarkId::from_parameter(layout.total()), &n, |b, _| {
            b.iter(|| gen.apply_hermitian(black_box(&rho), &mut out, &mut scratch))
        });
    }
    g.finish();
}

fn steady(c: &mut Criterion) {
    let mut g = c.benchmark_group("steady_state");
    g.sample_size(10);
    for mech in [10, 20] {
        let (_, layout, h, cs) = cooling_system(mech);
        g.bench_with_input(BenchmarkId::from_parameter(layout.total()), &mech, |b, _| {
            b.iter(|| steady_state(black_box(&h), &cs).unwrap())
        });
    }
    g.finish();
}

fn wigner_map(c: &mut Criterion) {
    let cat = cat_state(30, C64::new(2.0, 0.0), Parity::Odd).unwrap();
    let axis = grid(-4.0, 4.0, 81);
    c.bench_function("wigner_81x81_dim30", |b| b.iter(|| wigner(black_box(&cat), &axis, &axis).unwrap()));
}

criterion_group!(benches, lindblad_rhs, steady, wigner_map);
criterion_main!(benches);
