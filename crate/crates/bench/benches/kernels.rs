use criterion::{black_box, criterion_group, criterion_main, Criterion};

use rbfmol::lattice::DEFAULT_TOL;
use rbfmol::multiplier::{heat_multiplier, scheme_multiplier};
use rbfmol::spectral::interp_error_norm;
use rbfmol::{
    generator_stencil, make_symbol, BasisFunction, CardinalSymbol, QuadratureGrid, SpectralDensity, SymbolSpec,
};

fn cardinal_symbol(c: &mut Criterion) {
    for phi in [
        BasisFunction::polyharmonic(1, 3.0).unwrap(),
        BasisFunction::multiquadric(1, 1.0).unwrap(),
        BasisFunction::multiquadric(2, 1.0).unwrap(),
    ] {
        let sym = CardinalSymbol::new(&phi, DEFAULT_TOL).unwrap();
        let eta: Vec<f64> = vec![1.3; phi.n];
        c.bench_function(&format!("cardinal_symbol/{:?}{}", phi.family, phi.n), |b| {
            b.iter(|| sym.value(black_box(&eta)))
        });
    }
}

fn multiplier(c: &mut Criterion) {
    let phi = BasisFunction::multiquadric(1, 1.0).unwrap();
    let heat = make_symbol(&SymbolSpec::Heat, 1).unwrap();
    c.bench_function("heat_multiplier", |b| b.iter(|| heat_multiplier(&phi, black_box(&[2.1])).unwrap()));
    c.bench_function("scheme_multiplier", |b| {
        b.iter(|| scheme_multiplier(&phi, &heat, black_box(&[7.5]), 0.125).unwrap())
    });
}

fn stencil(c: &mut Criterion) {
    let phi = BasisFunction::polyharmonic(1, 3.0).unwrap();
    let heat = make_symbol(&SymbolSpec::Heat, 1).unwrap();
    c.bench_function("generator_stencil/64", |b| {
        b.iter(|| generator_stencil(&phi, &heat, 0.25, black_box(64), 1e-10).unwrap())
    });
}

fn error_norm(c: &mut Criterion) {
    let phi = BasisFunction::polyharmonic(1, 3.0).unwrap();
    let f = SpectralDensity::gaussian(1, 1.0).unwrap();
    let grid = QuadratureGrid::default();
    let mut group = c.benchmark_group("interp_error_norm");
    group.sample_size(10);
    group.bench_function("h=1/16", |b| b.iter(|| interp_error_norm(&f, &phi, black_box(0.0625), &grid).unwrap()));
    group.finish();
}

criterion_group!(benches, cardinal_symbol, multiplier, stencil, error_norm);
criterion_main!(benches);
