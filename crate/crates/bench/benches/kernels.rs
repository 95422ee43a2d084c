use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use tvs_core::galerkin::{assemble_rhs, GalerkinBasis, LowModeData};
use tvs_core::projection::{PoissonMethod, Projector};
use tvs_core::scenario::InitPreset;
use tvs_core::{Boundary, Grid, MaterialModel, Solver, SolverConfig};

fn step(c: &mut Criterion) {
    let grid = Grid::new(64, Boundary::Periodic).unwrap();
    for model in [MaterialModel::p1(), MaterialModel::p3()] {
        let mut solver = Solver::new(model.clone(), SolverConfig::default(), grid).unwrap();
        let mut s = InitPreset::RandomSmooth {
            seed: 1,
            amplitude: 0.3,
        }
        .build(grid)
        .unwrap();
        solver.prepare(&mut s).unwrap();
        c.bench_function(&format!("step_n64_{}", model.regime), |b| {
            b.iter(|| solver.step_dt(black_box(&s), 1e-5).unwrap())
        });
    }
}

fn projection(c: &mut Criterion) {
    for (bc, method, name) in [
        (
            Boundary::Periodic,
            PoissonMethod::Spectral,
            "project_n64_spectral",
        ),
        (
            Boundary::Walls,
            PoissonMethod::ConjugateGradient,
            "project_n64_walls_cg",
        ),
    ] {
        let grid = Grid::new(64, bc).unwrap();
        let v = grid.vector_fn(|x, y| [(6.0 * x).sin() * y, (5.0 * y).cos() * x]);
        let mut p = Projector::new(grid, method).unwrap();
        c.bench_function(name, |b| {
            b.iter(|| p.project(black_box(&v), 1e-10).unwrap())
        });
    }
}

fn galerkin(c: &mut Criterion) {
    let model = MaterialModel::p1();
    let basis = GalerkinBasis::new(8, 8).unwrap();
    let c0 = LowModeData::default().coefficients(&basis);
    c.bench_function("galerkin_rhs_k8", |b| {
        b.iter(|| assemble_rhs(&model, &basis, 1e-3, black_box(&c0)).unwrap())
    });
}

criterion_group!(benches, step, projection, galerkin);
criterion_main!(benches);
