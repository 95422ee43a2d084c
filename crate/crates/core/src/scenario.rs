//! Initial-data presets.

use crate::error::{Error, Result};
use crate::grid::{grad, Grid, ScalarField, TensorField, VectorField};
use crate::solver::State;
use crate::tensor2::Mat2;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;

#[derive(Debug, Clone, PartialEq)]
pub enum InitPreset {
    /// `v = 0`, `F = I`, `theta = 1`.
    Stationary,
    /// `v = 0`, `F = I`, `theta = 1 + amplitude sin(2 pi x)`.
    PureDiffusion { amplitude: f64 },
    /// `v = (amplitude sin(2 pi y), 0)`, `F = I`, `theta = 1`.
    Shear { amplitude: f64 },
    /// Low-mode random stream function, temperature and deformation.
    RandomSmooth { seed: u64, amplitude: f64 },
    /// `v = 0`, uniform `F = diag(sqrt(b0), 1)`, `theta = 1`.
    Relaxation { b0: f64 },
    /// Random smooth velocity with a rough temperature spanning `[lo, hi]`.
    RoughTemperature {
        seed: u64,
        amplitude: f64,
        lo: f64,
        hi: f64,
    },
}

impl InitPreset {
    pub fn name(&self) -> &'static str {
        match self {
            InitPreset::Stationary => "stationary",
            InitPreset::PureDiffusion { .. } => "pure_diffusion",
            InitPreset::Shear { .. } => "shear",
            InitPreset::RandomSmooth { .. } => "random_smooth",
            InitPreset::Relaxation { .. } => "relaxation",
            InitPreset::RoughTemperature { .. } => "rough_temperature",
        }
    }

    /// Builds the initial state. The velocity is divergence-free by
    /// construction (discrete curl of a stream function) where nonzero.
    pub fn build(&self, grid: Grid) -> Result<State> {
        let mut s = State::stationary(grid, 1.0);
        match *self {
            InitPreset::Stationary => {}
            InitPreset::PureDiffusion { amplitude } => {
                check_amp("init.amplitude", amplitude, 1.0)?;
                s.theta = grid.scalar_fn(|x, _| 1.0 + amplitude * (2.0 * PI * x).sin());
            }
            InitPreset::Shear { amplitude } => {
                s.v = grid.vector_fn(|_, y| [amplitude * (2.0 * PI * y).sin(), 0.0]);
            }
            InitPreset::RandomSmooth { seed, amplitude } => {
                check_amp("init.amplitude", amplitude, 0.5)?;
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                let psi = random_trig(&mut rng, 2, 1.0);
                let psi = grid.scalar_fn(|x, y| eval_trig(&psi, x, y) / (2.0 * PI));
                s.v = curl(&psi);
                for c in s.v.c.iter_mut() {
                    c.iter_mut().for_each(|x| *x *= amplitude);
                }
                let th = random_trig(&mut rng, 2, 1.0);
                let norm = trig_bound(&th);
                s.theta = grid.scalar_fn(|x, y| 1.0 + amplitude * eval_trig(&th, x, y) / norm);
                let comps: Vec<_> = (0..4).map(|_| random_trig(&mut rng, 2, 1.0)).collect();
                let bounds: Vec<f64> = comps.iter().map(trig_bound).collect();
                // Each entry perturbed by at most amplitude/2, keeping det F >= 1 - 2 amplitude.
                s.f = grid.tensor_fn(|x, y| {
                    let e: Vec<f64> = (0..4)
                        .map(|a| 0.5 * amplitude * eval_trig(&comps[a], x, y) / bounds[a])
                        .collect();
                    Mat2::new(1.0 + e[0], e[1], e[2], 1.0 + e[3])
                });
            }
            InitPreset::Relaxation { b0 } => {
                if !(b0 > 0.0) {
                    return Err(Error::InvalidParameter {
                        key: "init.b0".into(),
                        reason: format!("must be positive, got {b0}"),
                    });
                }
                s.f = TensorField::uniform(grid, Mat2::diag(b0.sqrt(), 1.0));
            }
            InitPreset::RoughTemperature {
                seed,
                amplitude,
                lo,
                hi,
            } => {
                if !(lo > 0.0 && hi > lo) {
                    return Err(Error::InvalidParameter {
                        key: "init.theta_range".into(),
                        reason: format!("need 0 < lo < hi, got [{lo}, {hi}]"),
                    });
                }
                let mut base = InitPreset::RandomSmooth { seed, amplitude }.build(grid)?;
                let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x9e37_79b9_7f4a_7c15);
                let (llo, lhi) = (lo.ln(), hi.ln());
                let mut data: Vec<f64> = (0..grid.len())
                    .map(|_| rng.gen_range(llo..lhi).exp())
                    .collect();
                data[0] = lo;
                data[grid.len() - 1] = hi;
                base.theta = ScalarField { grid, data };
                base.f = TensorField::identity(grid);
                s = base;
            }
        }
        Ok(s)
    }
}

fn check_amp(key: &str, a: f64, max: f64) -> Result<()> {
    if !(a.abs() < max) {
        return Err(Error::InvalidParameter {
            key: key.into(),
            reason: format!("|amplitude| must be below {max}, got {a}"),
        });
    }
    Ok(())
}

/// `(kx, ky, cos coefficient, sin coefficient)` terms.
type Trig = Vec<(f64, f64, f64, f64)>;

fn random_trig(rng: &mut ChaCha8Rng, kmax: i32, scale: f64) -> Trig {
    let mut out = Vec::new();
    for kx in 0..=kmax {
        for ky in -kmax..=kmax {
            if (kx == 0 && ky <= 0) || kx * kx + ky * ky > kmax * kmax {
                continue;
            }
            let w = scale / ((kx * kx + ky * ky) as f64);
            out.push((
                kx as f64,
                ky as f64,
                w * rng.gen_range(-1.0..1.0),
                w * rng.gen_range(-1.0..1.0),
            ));
        }
    }
    out
}

fn eval_trig(t: &Trig, x: f64, y: f64) -> f64 {
    t.iter()
        .map(|&(kx, ky, a, b)| {
            let ph = 2.0 * PI * (kx * x + ky * y);
            a * ph.cos() + b * ph.sin()
        })
        .sum()
}

fn trig_bound(t: &Trig) -> f64 {
    t.iter()
        .map(|&(_, _, a, b)| a.abs() + b.abs())
        .sum::<f64>()
        .max(1e-300)
}

/// Discrete curl `(d_y psi, -d_x psi)` with the solver's wide stencil, so the
/// result is exactly divergence-free on periodic grids.
pub fn curl(psi: &ScalarField) -> VectorField {
    let gp = grad(psi);
    VectorField {
        grid: psi.grid,
        c: [gp.c[1].clone(), gp.c[0].iter().map(|v| -v).collect()],
    }
}

/// Exact solution of `b' = -b (b - 1)`, the uniform relaxation of `B = diag(b, 1)`
/// with `delta = 1`.
pub fn relaxation_exact(b0: f64, t: f64) -> f64 {
    1.0 / (1.0 + (1.0 / b0 - 1.0) * (-t).exp())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{div, Boundary};

    #[test]
    fn random_smooth_is_valid() {
        let g = Grid::new(32, Boundary::Periodic).unwrap();
        let s = InitPreset::RandomSmooth {
            seed: 7,
            amplitude: 0.3,
        }
        .build(g)
        .unwrap();
        assert!(div(&s.v).max_abs() < 1e-12);
        assert!(s.first_positivity_violation().is_none());
        assert!(s.theta.min() >= 0.7 - 1e-12);
        let s2 = InitPreset::RandomSmooth {
            seed: 7,
            amplitude: 0.3,
        }
        .build(g)
        .unwrap();
        assert_eq!(s, s2);
    }

    #[test]
    fn relaxation_oracle() {
        assert!((relaxation_exact(2.0, 1.0) - 1.225_399_7).abs() < 1e-6);
        assert_eq!(relaxation_exact(1.0, 3.0), 1.0);
    }

    #[test]
    fn rough_temperature_spans_range() {
        let g = Grid::new(16, Boundary::Periodic).unwrap();
        let s = InitPreset::RoughTemperature {
            seed: 1,
            amplitude: 0.2,
            lo: 0.05,
            hi: 30.0,
        }
        .build(g)
        .unwrap();
        assert_eq!(s.theta.min(), 0.05);
        assert_eq!(s.theta.max(), 30.0);
    }
}
