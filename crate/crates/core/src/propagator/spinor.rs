//! One-sided split-operator solver for a pure spinor field, used to cross
//! check the phase-space propagator.

use std::sync::Arc;

use num_complex::Complex;
use rustfft::{Fft, FftPlanner};

use super::exponentials::{apply_plane, PlaneOp};
use super::{MassSplit, PropagatorConfig, Splitting};
use crate::error::{Error, Result};
use crate::potential::Potential;
use crate::scalar::Real;
use crate::states::SpinorField;

pub struct SpinorPropagator<T: Real> {
    config: PropagatorConfig<T>,
    kinetic: Vec<PlaneOp<T>>,
    potential: Vec<PlaneOp<T>>,
    fwd: Arc<dyn Fft<T>>,
    inv: Arc<dyn Fft<T>>,
}

impl<T: Real> SpinorPropagator<T> {
    /// Static planar potentials without dephasing only.
    pub fn new(
        x_min: T,
        x_max: T,
        n: usize,
        config: PropagatorConfig<T>,
        potential: &Potential<T>,
    ) -> Result<Self> {
        config.validate(potential.baseline_mass)?;
        if config.dephasing != T::zero() {
            return Err(Error::InvalidConfig("a pure state cannot carry dephasing".into()));
        }
        if !potential.is_static() || !potential.is_planar() {
            return Err(Error::InvalidConfig(
                "spinor solver needs a static potential with only A¹".into(),
            ));
        }
        let mu_k = match config.mass_split {
            MassSplit::Half => potential.baseline_mass * T::lit(0.5),
            MassSplit::Kinetic => potential.baseline_mass,
        };
        let dt = config.dt;
        let dt_k = match config.splitting {
            Splitting::FirstOrder => dt,
            Splitting::Strang => dt * T::lit(0.5),
        };
        let l = x_max - x_min;
        let dx = l / T::from_usize_lossy(n);
        let kinetic = (0..n)
            .map(|m| {
                let signed = if m <= n / 2 { m as f64 } else { m as f64 - n as f64 };
                let k = T::lit(signed) * T::TAU() / l;
                PlaneOp::kinetic(k, mu_k, dt_k, T::one())
            })
            .collect();
        let potential = (0..n)
            .map(|i| {
                let x = x_min + T::from_usize_lossy(i) * dx;
                let a0 = potential.a0(T::zero(), x);
                let a1 = potential.a_vec[0].eval(T::zero(), x);
                let mu = potential.mass(T::zero(), x) - mu_k;
                PlaneOp::potential(a0, a1, mu, dt, T::one())
            })
            .collect();
        let mut planner = FftPlanner::new();
        Ok(Self {
            config,
            kinetic,
            potential,
            fwd: planner.plan_fft_forward(n),
            inv: planner.plan_fft_inverse(n),
        })
    }

    fn kinetic_step(&self, psi: &mut SpinorField<T>) {
        let n = psi.len();
        let inv_n = T::one() / T::from_usize_lossy(n);
        let mut lines: Vec<Vec<Complex<T>>> = (0..4)
            .map(|c| psi.values().iter().map(|v| v[c]).collect())
            .collect();
        for line in &mut lines {
            self.fwd.process(line);
        }
        for (m, op) in self.kinetic.iter().enumerate() {
            let mut v = [lines[0][m], lines[1][m], lines[2][m], lines[3][m]];
            apply_plane(op, &mut v);
            for c in 0..4 {
                lines[c][m] = v[c] * inv_n;
            }
        }
        for line in &mut lines {
            self.inv.process(line);
        }
        for (i, v) in psi.values_mut().iter_mut().enumerate() {
            for c in 0..4 {
                v[c] = lines[c][i];
            }
        }
    }

    fn potential_step(&self, psi: &mut SpinorField<T>) {
        for (v, op) in psi.values_mut().iter_mut().zip(&self.potential) {
            apply_plane(op, v);
        }
    }

    pub fn step(&self, psi: &mut SpinorField<T>) -> Result<()> {
        if psi.len() != self.kinetic.len() {
            return Err(Error::GridMismatch("spinor length differs from solver grid".into()));
        }
        match self.config.splitting {
            Splitting::FirstOrder => {
                self.kinetic_step(psi);
                self.potential_step(psi);
            }
            Splitting::Strang => {
                self.kinetic_step(psi);
                self.potential_step(psi);
                self.kinetic_step(psi);
            }
        }
        Ok(())
    }

    pub fn evolve(&self, psi: &mut SpinorField<T>, steps: usize) -> Result<()> {
        for _ in 0..steps {
            self.step(psi)?;
        }
        Ok(())
    }
}
