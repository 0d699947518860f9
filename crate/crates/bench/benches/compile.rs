use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use strobe_core::compiler::{compile_grid, compile_plaquette};
use strobe_core::decoupling::{symmetrize_local, symmetrize_protecting};
use strobe_core::lattice::{build_code_terms, Boundary, Connectivity, GridLayout};
use strobe_core::magnus::effective_hamiltonian;
use strobe_core::verifier::simulate_dense;
use strobe_core::Pauli;

const SITE: [usize; 4] = [0, 1, 3, 2];

fn compile(c: &mut Criterion) {
    let g = GridLayout::new(2, 2, Connectivity::Diagonal).unwrap();
    c.bench_function("compile plaquette", |b| b.iter(|| compile_plaquette(black_box(&g), &SITE).unwrap()));
    let g4 = GridLayout::new(4, 4, Connectivity::Diagonal).unwrap();
    let code = build_code_terms(&g4, Boundary::Open, &[]).unwrap();
    c.bench_function("compile grid 4x4", |b| b.iter(|| compile_grid(black_box(&code)).unwrap()));
}

fn verify(c: &mut Criterion) {
    let g = GridLayout::new(2, 2, Connectivity::Diagonal).unwrap();
    let s = compile_plaquette(&g, &SITE).unwrap().schedule;
    c.bench_function("magnus plaquette", |b| b.iter(|| effective_hamiltonian(black_box(&s), 2).unwrap()));
    c.bench_function("dense plaquette", |b| b.iter(|| simulate_dense(black_box(&s), None, 1e-2, 0.0).unwrap()));
}

fn decouple(c: &mut Criterion) {
    let gens: Vec<Pauli> = ["X1X2", "X2X3", "X3X4"].iter().map(|g| Pauli::parse(g).unwrap()).collect();
    c.bench_function("normalizer sequence n=4", |b| b.iter(|| symmetrize_protecting(4, black_box(&gens)).unwrap()));
    c.bench_function("local sequence l=2 on 6", |b| b.iter(|| symmetrize_local(2, black_box(&[6]), None).unwrap()));
}

criterion_group!(benches, compile, verify, decouple);
criterion_main!(benches);
