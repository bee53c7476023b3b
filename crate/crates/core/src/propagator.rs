//! Split-operator evolution of `Q` with position dephasing.
//!
//! The kinetic factor is diagonal in `(λ, p)`:
//! `Q ← e^{-i dt K(p+λ/2)} Q e^{i dt K(p-λ/2)}`; the potential factor and
//! the dissipator are diagonal in `(x, θ)`:
//! `Q ← e^{-D dt θ²} e^{-i dt V(x-θ/2)} Q e^{i dt V(x+θ/2)}`.

mod exponentials;
mod spinor;

pub use exponentials::{
    apply_plane, kinetic_exponential, kinetic_exponential_with_mass_term, potential_exponential,
    sandwich_plane, BlockMask, PlaneOp,
};
use exponentials::PAIRS;
pub use spinor::SpinorPropagator;

use rayon::prelude::*;

use crate::clifford::Matrix4;
use crate::error::{Error, Result};
use crate::observables::edge_weights;
use crate::phase_grid::{FourierChain, MatrixPhaseField, PhaseGrid, Representation};
use crate::potential::Potential;
use crate::scalar::Real;

/// Safety factor in the causality condition `D < safety / (4m)`.
pub const CAUSALITY_SAFETY: f64 = 0.1;

/// Width of the boundary band, in grid cells, watched for wrap-around.
pub const BOUNDARY_CELLS: usize = 5;

/// Fraction of `∫|w0|` inside the boundary band that triggers a warning.
pub const BOUNDARY_WEIGHT_TOLERANCE: f64 = 1e-4;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Splitting {
    /// Kinetic then potential, `O(dt²)` local error.
    #[default]
    FirstOrder,
    /// Half kinetic, potential, half kinetic, `O(dt³)` local error.
    Strang,
}

/// How the constant baseline mass is shared between the two factors.
/// Any x-dependent part of the mass always sits in the potential factor.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum MassSplit {
    /// `m/2` in each factor.
    #[default]
    Half,
    /// All of `m` in the kinetic factor, which then is the exact free
    /// propagator.
    Kinetic,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PropagatorConfig<T> {
    pub dt: T,
    /// Dephasing coefficient `D`.
    pub dephasing: T,
    pub splitting: Splitting,
    pub causality_check: bool,
    pub mass_split: MassSplit,
}

impl<T: Real> Default for PropagatorConfig<T> {
    fn default() -> Self {
        Self {
            dt: T::lit(0.01),
            dephasing: T::zero(),
            splitting: Splitting::FirstOrder,
            causality_check: true,
            mass_split: MassSplit::Half,
        }
    }
}

impl<T: Real> PropagatorConfig<T> {
    pub fn validate(&self, mass: T) -> Result<()> {
        if !(self.dt.is_finite() && self.dt > T::zero()) {
            return Err(Error::InvalidConfig(format!("dt = {} must be positive", self.dt)));
        }
        if !(self.dephasing.is_finite() && self.dephasing >= T::zero()) {
            return Err(Error::InvalidConfig(format!(
                "D = {} must be non-negative",
                self.dephasing
            )));
        }
        if self.causality_check && mass > T::zero() {
            let bound = T::lit(CAUSALITY_SAFETY) / (T::lit(4.0) * mass);
            if self.dephasing >= bound {
                return Err(Error::InvalidConfig(format!(
                    "D = {} violates the causality bound D < {}/(4m) = {}",
                    self.dephasing, CAUSALITY_SAFETY, bound
                )));
            }
        }
        Ok(())
    }
}

enum OpCache<T> {
    Plane { left: Vec<PlaneOp<T>>, right: Vec<PlaneOp<T>> },
    Dense { left: Vec<Matrix4<T>>, right: Vec<Matrix4<T>> },
}

impl<T: Real> OpCache<T> {
    fn apply(&self, q: &mut MatrixPhaseField<T>) {
        let n_p = q.grid().n_p();
        match self {
            OpCache::Plane { left, right } => {
                let mask = BlockMask::from_components(q.active_components().0);
                for rp in 0..2 {
                    for sp in 0..2 {
                        if mask.0 & (1 << (2 * rp + sp)) == 0 {
                            continue;
                        }
                        let [i0, i1] = PAIRS[rp];
                        let [j0, j1] = PAIRS[sp];
                        let ids = [4 * i0 + j0, 4 * i0 + j1, 4 * i1 + j0, 4 * i1 + j1];
                        for c in ids {
                            q.component_mut(c / 4, c % 4);
                        }
                        let planes = q.planes_mut();
                        let [Some(p00), Some(p01), Some(p10), Some(p11)] =
                            planes.get_disjoint_mut(ids).expect("distinct components")
                        else {
                            unreachable!("planes allocated above")
                        };
                        (
                            p00.par_chunks_mut(n_p),
                            p01.par_chunks_mut(n_p),
                            p10.par_chunks_mut(n_p),
                            p11.par_chunks_mut(n_p),
                            left.par_chunks(n_p),
                            right.par_chunks(n_p),
                        )
                            .into_par_iter()
                            .for_each(|(r00, r01, r10, r11, ls, rs)| {
                                for k in 0..n_p {
                                    let (l, r) = (&ls[k], &rs[k]);
                                    let (m00, m01, m10, m11) = (r00[k], r01[k], r10[k], r11[k]);
                                    let t00 = l.a * m00 + l.b * m10;
                                    let t01 = l.a * m01 + l.b * m11;
                                    let t10 = l.c * m00 + l.d * m10;
                                    let t11 = l.c * m01 + l.d * m11;
                                    r00[k] = t00 * r.a + t01 * r.c;
                                    r01[k] = t00 * r.b + t01 * r.d;
                                    r10[k] = t10 * r.a + t11 * r.c;
                                    r11[k] = t10 * r.b + t11 * r.d;
                                }
                            });
                    }
                }
            }
            OpCache::Dense { left, right } => {
                let out: Vec<Matrix4<T>> = q
                    .to_matrices()
                    .par_iter()
                    .zip(left.par_iter().zip(right.par_iter()))
                    .map(|(m, (l, r))| *l * *m * *r)
                    .collect();
                *q = MatrixPhaseField::from_data(*q.grid(), q.repr(), out).expect("same grid");
            }
        }
    }
}

struct Cached<T> {
    dt: T,
    time: T,
    ops: OpCache<T>,
}

/// A state observed during [`Propagator::evolve`], always in X_P.
pub struct Observation<'a, T> {
    pub step: usize,
    pub time: T,
    pub state: &'a MatrixPhaseField<T>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Axis {
    X,
    P,
}

/// Probability weight close to a periodic boundary.
#[derive(Clone, Debug, PartialEq)]
pub struct BoundaryWarning {
    pub step: usize,
    pub time: f64,
    pub axis: Axis,
    /// Fraction of `∫|w0|` within [`BOUNDARY_CELLS`] cells of the edge.
    pub edge_weight: f64,
}

#[derive(Clone, Debug, Default)]
pub struct EvolveReport {
    pub steps: usize,
    pub final_time: f64,
    pub warnings: Vec<BoundaryWarning>,
}

/// Time stepper with cached per-point exponentials for one grid,
/// configuration and potential.
pub struct Propagator<T: Real> {
    grid: PhaseGrid<T>,
    chain: FourierChain<T>,
    config: PropagatorConfig<T>,
    potential: Potential<T>,
    kinetic: Cached<T>,
    potential_ops: Option<Cached<T>>,
}

impl<T: Real> Propagator<T> {
    pub fn new(grid: PhaseGrid<T>, config: PropagatorConfig<T>, potential: Potential<T>) -> Result<Self> {
        config.validate(potential.baseline_mass)?;
        let mut p = Self {
            chain: FourierChain::new(&grid),
            kinetic: Cached { dt: T::zero(), time: T::zero(), ops: OpCache::Plane { left: vec![], right: vec![] } },
            potential_ops: None,
            grid,
            config,
            potential,
        };
        p.kinetic = p.build_kinetic(p.kinetic_dt());
        if p.potential.is_static() {
            p.potential_ops = Some(p.build_potential(T::zero(), config.dt));
        }
        Ok(p)
    }

    pub fn grid(&self) -> &PhaseGrid<T> {
        &self.grid
    }
    pub fn config(&self) -> &PropagatorConfig<T> {
        &self.config
    }
    pub fn potential(&self) -> &Potential<T> {
        &self.potential
    }
    pub fn chain(&self) -> &FourierChain<T> {
        &self.chain
    }

    fn kinetic_dt(&self) -> T {
        match self.config.splitting {
            Splitting::FirstOrder => self.config.dt,
            Splitting::Strang => self.config.dt * T::lit(0.5),
        }
    }

    /// Mass term carried by the kinetic factor.
    pub fn kinetic_mass_term(&self) -> T {
        match self.config.mass_split {
            MassSplit::Half => self.potential.baseline_mass * T::lit(0.5),
            MassSplit::Kinetic => self.potential.baseline_mass,
        }
    }

    /// Mass term carried by the potential factor at `(t, x)`.
    pub fn potential_mass_term(&self, t: T, x: T) -> T {
        self.potential.mass(t, x) - self.kinetic_mass_term()
    }

    fn build_kinetic(&self, dt: T) -> Cached<T> {
        let g = &self.grid;
        let (lam, p) = (g.lambda_axis(), g.p_axis());
        let mu = self.kinetic_mass_term();
        let half = T::lit(0.5);
        let n = g.len();
        let n_p = g.n_p();
        let mut left = vec![PlaneOp::identity(); n];
        let mut right = vec![PlaneOp::identity(); n];
        left.par_chunks_mut(n_p)
            .zip(right.par_chunks_mut(n_p))
            .enumerate()
            .for_each(|(i, (l, r))| {
                for j in 0..n_p {
                    l[j] = PlaneOp::kinetic(p[j] + lam[i] * half, mu, dt, T::one());
                    r[j] = PlaneOp::kinetic(p[j] - lam[i] * half, mu, dt, -T::one());
                }
            });
        Cached { dt, time: T::zero(), ops: OpCache::Plane { left, right } }
    }

    fn build_potential(&self, t: T, dt: T) -> Cached<T> {
        let g = &self.grid;
        let (x, th) = (g.x_axis(), g.theta_axis());
        let n_p = g.n_p();
        let half = T::lit(0.5);
        let d = self.config.dephasing;
        let damp: Vec<T> = th.iter().map(|&v| (-d * dt * v * v).exp()).collect();
        let pot = &self.potential;
        let mu0 = self.kinetic_mass_term();

        if pot.is_planar() {
            let at = |xv: T, sign: T| {
                PlaneOp::potential(pot.a0(t, xv), pot.a_vec[0].eval(t, xv), pot.mass(t, xv) - mu0, dt, sign)
            };
            let mut left = vec![PlaneOp::identity(); g.len()];
            let mut right = vec![PlaneOp::identity(); g.len()];
            left.par_chunks_mut(n_p)
                .zip(right.par_chunks_mut(n_p))
                .enumerate()
                .for_each(|(i, (l, r))| {
                    for j in 0..n_p {
                        l[j] = at(x[i] - th[j] * half, T::one()).scale(damp[j]);
                        r[j] = at(x[i] + th[j] * half, -T::one());
                    }
                });
            Cached { dt, time: t, ops: OpCache::Plane { left, right } }
        } else {
            let at = |xv: T, sign: T| {
                potential_exponential(pot.a0(t, xv), pot.a_vec(t, xv), pot.mass(t, xv) - mu0, dt, sign)
            };
            let mut left = vec![Matrix4::zero(); g.len()];
            let mut right = vec![Matrix4::zero(); g.len()];
            left.par_chunks_mut(n_p)
                .zip(right.par_chunks_mut(n_p))
                .enumerate()
                .for_each(|(i, (l, r))| {
                    for j in 0..n_p {
                        l[j] = at(x[i] - th[j] * half, T::one()).scale_re(damp[j]);
                        r[j] = at(x[i] + th[j] * half, -T::one());
                    }
                });
            Cached { dt, time: t, ops: OpCache::Dense { left, right } }
        }
    }

    fn check(&self, q: &MatrixPhaseField<T>, allowed: &'static [Representation]) -> Result<()> {
        q.expect_repr(allowed)?;
        if *q.grid() != self.grid {
            return Err(Error::GridMismatch("state grid differs from propagator grid".into()));
        }
        Ok(())
    }

    /// Kinetic factor over `dt` on a LAMBDA_P state.
    pub fn kinetic_step(&self, q: &mut MatrixPhaseField<T>, dt: T) -> Result<()> {
        self.check(q, &[Representation::LambdaP])?;
        if dt == self.kinetic.dt {
            self.kinetic.ops.apply(q);
        } else {
            self.build_kinetic(dt).ops.apply(q);
        }
        Ok(())
    }

    /// Potential and dephasing factor over `dt` at time `t` on an X_THETA
    /// state.
    pub fn potential_step(&self, q: &mut MatrixPhaseField<T>, t: T, dt: T) -> Result<()> {
        self.check(q, &[Representation::XTheta])?;
        match &self.potential_ops {
            Some(c) if c.dt == dt && (self.potential.is_static() || c.time == t) => c.ops.apply(q),
            _ => self.build_potential(t, dt).ops.apply(q),
        }
        Ok(())
    }

    /// One full step from `t` on a LAMBDA_P state.
    pub fn step(&self, q: &mut MatrixPhaseField<T>, t: T) -> Result<()> {
        self.step_with(q, t, self.config.dt)
    }

    fn step_with(&self, q: &mut MatrixPhaseField<T>, t: T, dt: T) -> Result<()> {
        self.check(q, &[Representation::LambdaP])?;
        match self.config.splitting {
            Splitting::FirstOrder => {
                self.kinetic_step(q, dt)?;
                self.chain.to_repr(q, Representation::XTheta)?;
                self.potential_step(q, t, dt)?;
                self.chain.to_repr(q, Representation::LambdaP)?;
            }
            Splitting::Strang => {
                let h = dt * T::lit(0.5);
                self.kinetic_step(q, h)?;
                self.chain.to_repr(q, Representation::XTheta)?;
                self.potential_step(q, t + h, dt)?;
                self.chain.to_repr(q, Representation::LambdaP)?;
                self.kinetic_step(q, h)?;
            }
        }
        Ok(())
    }

    /// Evolves `q` from `t0` to `t1`, calling `observer` on an X_P copy at
    /// `t0`, every `observe_every` steps and at `t1`. The state is returned
    /// in the representation it came in.
    ///
    /// `t1 - t0` is covered by whole steps of `dt` plus, if needed, one
    /// shorter final step.
    pub fn evolve<F>(
        &self,
        q: &mut MatrixPhaseField<T>,
        t0: T,
        t1: T,
        observe_every: usize,
        mut observer: F,
    ) -> Result<EvolveReport>
    where
        F: FnMut(&Observation<'_, T>) -> Result<()>,
    {
        if !(t1 >= t0) {
            return Err(Error::InvalidConfig(format!("t1 = {t1} precedes t0 = {t0}")));
        }
        if *q.grid() != self.grid {
            return Err(Error::GridMismatch("state grid differs from propagator grid".into()));
        }
        let every = observe_every.max(1);
        let original = q.repr();
        let dt = self.config.dt;
        let span = t1 - t0;
        let mut n_full = (span / dt).floor().to_f64_lossy() as usize;
        let mut rem = span - T::from_usize_lossy(n_full) * dt;
        let tol = T::lit(1e-9) * dt;
        if rem > dt - tol {
            n_full += 1;
            rem = T::zero();
        }
        let partial = rem > tol;
        let total = n_full + usize::from(partial);

        let mut report = EvolveReport::default();
        let mut observe = |q: &MatrixPhaseField<T>, step: usize, time: T, report: &mut EvolveReport| -> Result<()> {
            let mut xp = q.clone();
            self.chain.to_repr(&mut xp, Representation::XP)?;
            let (wx, wp) = edge_weights(&xp, BOUNDARY_CELLS);
            for (axis, w) in [(Axis::X, wx), (Axis::P, wp)] {
                let w = w.to_f64_lossy();
                if w > BOUNDARY_WEIGHT_TOLERANCE {
                    log::warn!("step {step}: {:.3e} of |w0| within {BOUNDARY_CELLS} cells of the {axis:?} boundary", w);
                    report.warnings.push(BoundaryWarning { step, time: time.to_f64_lossy(), axis, edge_weight: w });
                }
            }
            observer(&Observation { step, time, state: &xp })
        };

        self.chain.to_repr(q, Representation::LambdaP)?;
        observe(q, 0, t0, &mut report)?;
        let mut t = t0;
        for step in 1..=total {
            let h = if step > n_full { rem } else { dt };
            self.step_with(q, t, h)?;
            t = if step == total { t1 } else { t0 + T::from_usize_lossy(step) * dt };
            if !q.is_finite() {
                return Err(Error::NumericalAbort {
                    step,
                    time: t.to_f64_lossy(),
                    max_magnitude: q.max_abs().to_f64_lossy(),
                    reason: "non-finite value in state".into(),
                });
            }
            if step % every == 0 || step == total {
                observe(q, step, t, &mut report)?;
            }
        }
        self.chain.to_repr(q, original)?;
        report.steps = total;
        report.final_time = t.to_f64_lossy();
        Ok(report)
    }
}

/// `max ‖Q - Q†‖` over an X_P state, relative to `max ‖Q‖`.
pub fn hermiticity_residue<T: Real>(q: &MatrixPhaseField<T>) -> Result<T> {
    q.expect_repr(&[Representation::XP])?;
    let mut r = T::zero();
    for a in 0..4 {
        for b in a..4 {
            let d = match (q.component(a, b), q.component(b, a)) {
                (Some(u), Some(v)) => u.iter().zip(v).fold(T::zero(), |m, (x, y)| m.max((*x - y.conj()).norm())),
                (Some(u), None) | (None, Some(u)) => u.iter().fold(T::zero(), |m, x| m.max(x.norm())),
                (None, None) => T::zero(),
            };
            r = r.max(d);
        }
    }
    let s = q.max_abs();
    Ok(if s > T::zero() { r / s } else { r })
}

/// Identity helper for callers without an observer.
pub fn no_observer<T>(_: &Observation<'_, T>) -> Result<()> {
    Ok(())
}
