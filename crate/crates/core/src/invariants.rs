//! Built-in self checks: Clifford relations, rotor identities, the
//! diagonalizing frame, analytic exponentials against dense ones and
//! Fourier loop identities.

use std::time::{Duration, Instant};

use num_complex::Complex;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use crate::classical::diagonalization_check;
use crate::clifford::{
    alphas, gamma, gammas, lorentz_rotor, metric, minkowski_norm2, rotor_inverse,
    rotor_membership_residue, transform_vector, Matrix4, RotorParams,
};
use crate::error::Result;
use crate::phase_grid::{make_grid, FourierChain, MatrixPhaseField, PhaseGrid, Representation};
use crate::propagator::{kinetic_exponential_with_mass_term, potential_exponential, PlaneOp};

#[derive(Clone, Debug, PartialEq)]
pub struct CheckOutcome {
    pub name: &'static str,
    pub samples: usize,
    /// Worst residue over all samples.
    pub residue: f64,
    pub tolerance: f64,
    pub elapsed: Duration,
}

impl CheckOutcome {
    pub fn passed(&self) -> bool {
        self.residue.is_finite() && self.residue <= self.tolerance
    }
}

fn timed(
    name: &'static str,
    samples: usize,
    tolerance: f64,
    f: impl FnOnce() -> Result<f64>,
) -> Result<CheckOutcome> {
    let start = Instant::now();
    let residue = f()?;
    Ok(CheckOutcome { name, samples, residue, tolerance, elapsed: start.elapsed() })
}

/// `{γ^μ, γ^ν} = 2 g^{μν}`, hermiticity of `γ⁰` and anti-hermiticity of
/// `γ^k`, all in integer arithmetic. The residue counts failed relations.
pub fn clifford_relations() -> Result<CheckOutcome> {
    timed("clifford relations", 16, 0.0, || {
        let g = gammas::<i64>();
        let mut failures = 0;
        for mu in 0..4 {
            for nu in 0..4 {
                let want = Matrix4::<i64>::identity().scale_re(2 * metric::<i64>(mu, nu));
                if g[mu].anticommutator(&g[nu]) != want {
                    failures += 1;
                }
            }
            let herm = if mu == 0 { g[0] } else { -g[mu] };
            if g[mu].adjoint() != herm {
                failures += 1;
            }
        }
        Ok(failures as f64)
    })
}

/// Membership, inverse and Minkowski-norm identities for random rotors.
pub fn rotor_identities(samples: usize, seed: u64) -> Result<CheckOutcome> {
    timed("rotor identities", samples, 1e-10, || {
        let mut rng = StdRng::seed_from_u64(seed);
        let mut worst = 0.0f64;
        for _ in 0..samples {
            let params = RotorParams {
                eta: std::array::from_fn(|_| rng.gen_range(-1.5..1.5)),
                theta_rot: std::array::from_fn(|_| rng.gen_range(-3.2..3.2)),
            };
            let l = lorentz_rotor(&params)?;
            worst = worst.max(rotor_membership_residue(&l));
            let inv = rotor_inverse(&l)?;
            let scale = 1.0f64.max(l.max_abs() * inv.max_abs());
            worst = worst.max((l * inv).max_abs_diff(&Matrix4::identity()) / scale);

            let u: [f64; 4] = std::array::from_fn(|_| rng.gen_range(-2.0..2.0));
            let v = transform_vector(&l, &u)?;
            let n = minkowski_norm2(&u);
            let size = 1.0f64.max(v.iter().map(|c| c * c).sum::<f64>());
            worst = worst.max((minkowski_norm2(&v) - n).abs() / size);
        }
        Ok(worst)
    })
}

/// `U D U†` against `diag(p0-E₊, p0-E₊, p0-E₋, p0-E₋)` for random
/// momenta, potentials and masses.
pub fn diagonalization(samples: usize, seed: u64) -> Result<CheckOutcome> {
    timed("diagonalizing frame", samples, 1e-10, || {
        let mut rng = StdRng::seed_from_u64(seed);
        let mut worst = 0.0f64;
        for _ in 0..samples {
            let p: [f64; 3] = std::array::from_fn(|_| rng.gen_range(-10.0..10.0));
            let a: [f64; 3] = std::array::from_fn(|_| rng.gen_range(-5.0..5.0));
            let a0 = rng.gen_range(-10.0..10.0);
            let p0 = rng.gen_range(-10.0..10.0);
            let m = rng.gen_range(0.1..3.0);
            worst = worst.max(diagonalization_check(p, a, a0, p0, m)?.max());
        }
        Ok(worst)
    })
}

/// Analytic kinetic and potential exponentials (dense and planar forms)
/// against scaling-and-squaring of the generator.
pub fn exponential_oracle(samples: usize, seed: u64) -> Result<CheckOutcome> {
    timed("exponential oracle", samples, 1e-12, || {
        let mut rng = StdRng::seed_from_u64(seed);
        let al = alphas::<f64>();
        let beta = gamma::<f64>(0)?;
        let mut worst = 0.0f64;
        for _ in 0..samples {
            let dt = rng.gen_range(0.0..0.1);
            let sign = if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
            let mu = rng.gen_range(0.0..3.0);
            let step = Complex::new(0.0, -sign * dt);

            let (p1, p2) = (rng.gen_range(-20.0..20.0), rng.gen_range(-20.0..20.0));
            let k = al[0].scale_re(p1) + al[1].scale_re(p2) + beta.scale_re(mu);
            let dense = k.scale(step).expm();
            worst = worst.max(kinetic_exponential_with_mass_term(p1, p2, mu, dt, sign).max_abs_diff(&dense));
            let planar = (al[0].scale_re(p1) + beta.scale_re(mu)).scale(step).expm();
            worst = worst.max(PlaneOp::kinetic(p1, mu, dt, sign).to_matrix().max_abs_diff(&planar));

            let a0 = rng.gen_range(-20.0..20.0);
            let a: [f64; 3] = std::array::from_fn(|_| rng.gen_range(-5.0..5.0));
            let mut v = Matrix4::identity().scale_re(a0) + beta.scale_re(mu);
            for i in 0..3 {
                v = v - al[i].scale_re(a[i]);
            }
            let dense = v.scale(step).expm();
            worst = worst.max(potential_exponential(a0, a, mu, dt, sign).max_abs_diff(&dense));
            let planar = (Matrix4::identity().scale_re(a0) - al[0].scale_re(a[0]) + beta.scale_re(mu))
                .scale(step)
                .expm();
            worst = worst.max(PlaneOp::potential(a0, a[0], mu, dt, sign).to_matrix().max_abs_diff(&planar));
        }
        Ok(worst)
    })
}

fn random_field(grid: PhaseGrid<f64>, repr: Representation, rng: &mut StdRng) -> MatrixPhaseField<f64> {
    let data = (0..grid.len())
        .map(|_| Matrix4::from_fn(|_, _| Complex::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))))
        .collect();
    MatrixPhaseField::from_data(grid, repr, data).expect("length matches grid")
}

/// Every closed loop of the four-corner Fourier diagram on random fields,
/// as relative max-norm residue.
pub fn fourier_loops(n: usize, seed: u64) -> Result<CheckOutcome> {
    timed("fourier loops", 16, 1e-12, || {
        let grid = make_grid(n, n, -7.0, 9.0, -5.0, 6.0)?;
        let chain = FourierChain::new(&grid);
        let mut rng = StdRng::seed_from_u64(seed);
        let mut worst = 0.0f64;
        for start in Representation::ALL {
            let f0 = random_field(grid, start, &mut rng);
            // out and back along each axis, then around the square
            let flip_p = Representation::ALL
                .into_iter()
                .find(|r| r.has_x() == start.has_x() && r.has_p() != start.has_p())
                .expect("neighbour exists");
            let flip_x = Representation::ALL
                .into_iter()
                .find(|r| r.has_x() != start.has_x() && r.has_p() == start.has_p())
                .expect("neighbour exists");
            let opposite = Representation::ALL
                .into_iter()
                .find(|r| r.has_x() != start.has_x() && r.has_p() != start.has_p())
                .expect("opposite exists");
            for path in [
                vec![flip_p, start],
                vec![flip_x, start],
                vec![flip_p, opposite, flip_x, start],
                vec![flip_x, opposite, flip_p, start],
            ] {
                let mut f = f0.clone();
                for target in path {
                    chain.to_repr(&mut f, target)?;
                }
                worst = worst.max(f.relative_diff(&f0));
            }
        }
        Ok(worst)
    })
}

/// The whole suite with fixed seeds.
pub fn run_all() -> Result<Vec<CheckOutcome>> {
    Ok(vec![
        clifford_relations()?,
        rotor_identities(100, 1)?,
        diagonalization(100, 2)?,
        exponential_oracle(1000, 3)?,
        fourier_loops(64, 4)?,
    ])
}
