//! Classical limit: the unitary `U` that block-diagonalizes the Dirac
//! generator, the pair of classical Hamiltonians `E± = A⁰ ± √((p-A)² + m²)`
//! and an RK4 integrator for their trajectories.

use crate::clifford::{alphas, gamma, Matrix4};
use crate::error::{Error, Result};
use crate::potential::Potential;
use crate::scalar::Real;

/// `U = √((E+m)/(2E)) (1 + β α·k/(E+m))` with kinetic momentum `k = p - A`
/// and `E = √(k² + m²)`. It maps `α·k + βm` to `βE`.
pub fn foldy_unitary<T: Real>(p: [T; 3], a: [T; 3], m: T) -> Result<Matrix4<T>> {
    let k: [T; 3] = std::array::from_fn(|i| p[i] - a[i]);
    if !(k.iter().all(|v| v.is_finite()) && m.is_finite()) {
        return Err(Error::NonFinite("classical frame input"));
    }
    let e = (k[0] * k[0] + k[1] * k[1] + k[2] * k[2] + m * m).sqrt();
    let em = e + m;
    if em <= T::epsilon() * T::lit(16.0) {
        return Err(Error::SingularFrame(em.to_f64_lossy()));
    }
    let beta = gamma::<T>(0).expect("valid index");
    let al = alphas::<T>();
    let mut ak = Matrix4::zero();
    for i in 0..3 {
        ak += al[i].scale_re(k[i]);
    }
    let u = Matrix4::identity() + (beta * ak).scale_re(T::one() / em);
    Ok(u.scale_re((em / (e + e)).sqrt()))
}

/// `(E₊, E₋)` at `(x, p)` for the static fields of `potential` and mass `m`.
pub fn classical_hamiltonians<T: Real>(x: T, p: T, potential: &Potential<T>, m: T) -> (T, T) {
    let a0 = potential.a0(T::zero(), x);
    let k = p - potential.a_vec[0].eval(T::zero(), x);
    let root = (k * k + m * m).sqrt();
    (a0 + root, a0 - root)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DiagonalizationResidue<T> {
    /// Largest off-diagonal modulus of `U D U†`.
    pub off_diagonal: T,
    /// Largest deviation of the diagonal from `(p0-E₊, p0-E₊, p0-E₋, p0-E₋)`.
    pub diagonal: T,
}

impl<T: Real> DiagonalizationResidue<T> {
    pub fn max(&self) -> T {
        self.off_diagonal.max(self.diagonal)
    }
}

/// Builds `D = γ⁰γ^μ(p_μ - A_μ) - γ⁰m = (p0 - a0) - α·(p - A) - βm` and
/// measures how far `U D U†` is from `diag(p0-E₊, p0-E₊, p0-E₋, p0-E₋)`.
pub fn diagonalization_check<T: Real>(
    p: [T; 3],
    a: [T; 3],
    a0: T,
    p0: T,
    m: T,
) -> Result<DiagonalizationResidue<T>> {
    let u = foldy_unitary(p, a, m)?;
    let g = [0, 1, 2, 3].map(|mu| gamma::<T>(mu).expect("valid index"));
    // covariant components p_μ - A_μ
    let pi = [p0 - a0, a[0] - p[0], a[1] - p[1], a[2] - p[2]];
    let mut d = g[0].scale_re(-m);
    for mu in 0..4 {
        d += (g[0] * g[mu]).scale_re(pi[mu]);
    }
    let r = u * d * u.adjoint();

    let k2 = (0..3).fold(m * m, |s, i| s + (p[i] - a[i]) * (p[i] - a[i]));
    let e = k2.sqrt();
    let expected = [p0 - a0 - e, p0 - a0 - e, p0 - a0 + e, p0 - a0 + e];
    let mut off = T::zero();
    let mut diag = T::zero();
    for i in 0..4 {
        for j in 0..4 {
            if i == j {
                diag = diag.max((r.0[i][i] - num_complex::Complex::from(expected[i])).norm());
            } else {
                off = off.max(r.0[i][j].norm());
            }
        }
    }
    Ok(DiagonalizationResidue { off_diagonal: off, diagonal: diag })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ClassicalPoint<T> {
    pub x: T,
    pub p: T,
    /// `+1` for `E₊`, `-1` for `E₋`.
    pub sign: T,
}

#[derive(Clone, Debug)]
pub struct Trajectory<T> {
    pub times: Vec<T>,
    pub points: Vec<ClassicalPoint<T>>,
    /// `max |E(t) - E(0)|` along the computed points.
    pub energy_drift: T,
    /// First step index at which `x` left the requested domain, if any.
    pub left_domain_at: Option<usize>,
}

impl<T: Real> Trajectory<T> {
    /// Linear interpolation of `x` at time `t`.
    pub fn x_at(&self, t: T) -> Option<T> {
        let k = self.times.iter().position(|&s| s >= t)?;
        if k == 0 {
            return Some(self.points[0].x);
        }
        let (t0, t1) = (self.times[k - 1], self.times[k]);
        let w = (t - t0) / (t1 - t0);
        Some(self.points[k - 1].x * (T::one() - w) + self.points[k].x * w)
    }
}

fn energy<T: Real>(pt: &ClassicalPoint<T>, pot: &Potential<T>, m: T) -> T {
    let (ep, em) = classical_hamiltonians(pt.x, pt.p, pot, m);
    if pt.sign > T::zero() {
        ep
    } else {
        em
    }
}

/// Hamilton's equations `ẋ = ∂E/∂p`, `ṗ = -∂E/∂x` for `E = E_sign`.
fn rhs<T: Real>(x: T, p: T, sign: T, pot: &Potential<T>, m: T) -> (T, T) {
    let t = T::zero();
    let k = p - pot.a_vec[0].eval(t, x);
    let root = (k * k + m * m).sqrt();
    let v = if root > T::zero() { sign * k / root } else { T::zero() };
    let force = -pot.a0.dx(t, x) + v * pot.a_vec[0].dx(t, x);
    (v, force)
}

/// Classical RK4 on `E_sign(x, p)` in the static fields of `potential`.
/// Leaving `domain` is recorded, not fatal.
pub fn integrate_trajectory<T: Real>(
    start: ClassicalPoint<T>,
    potential: &Potential<T>,
    m: T,
    dt: T,
    n_steps: usize,
    domain: Option<(T, T)>,
) -> Result<Trajectory<T>> {
    if !(dt > T::zero() && dt.is_finite()) {
        return Err(Error::InvalidConfig(format!("trajectory dt = {dt} must be positive")));
    }
    if !(start.x.is_finite() && start.p.is_finite()) {
        return Err(Error::NonFinite("trajectory start"));
    }
    let s = if start.sign >= T::zero() { T::one() } else { -T::one() };
    let half = T::lit(0.5);
    let sixth = T::one() / T::lit(6.0);
    let e0 = energy(&start, potential, m);

    let mut times = Vec::with_capacity(n_steps + 1);
    let mut points = Vec::with_capacity(n_steps + 1);
    times.push(T::zero());
    points.push(ClassicalPoint { sign: s, ..start });
    let mut drift = T::zero();
    let mut left = None;
    let (mut x, mut p) = (start.x, start.p);
    for n in 1..=n_steps {
        let (k1x, k1p) = rhs(x, p, s, potential, m);
        let (k2x, k2p) = rhs(x + half * dt * k1x, p + half * dt * k1p, s, potential, m);
        let (k3x, k3p) = rhs(x + half * dt * k2x, p + half * dt * k2p, s, potential, m);
        let (k4x, k4p) = rhs(x + dt * k3x, p + dt * k3p, s, potential, m);
        x += dt * sixth * (k1x + (k2x + k3x) * T::lit(2.0) + k4x);
        p += dt * sixth * (k1p + (k2p + k3p) * T::lit(2.0) + k4p);
        let pt = ClassicalPoint { x, p, sign: s };
        drift = drift.max((energy(&pt, potential, m) - e0).abs());
        if let Some((lo, hi)) = domain {
            if left.is_none() && !(x >= lo && x <= hi) {
                log::warn!("classical trajectory left [{lo}, {hi}] at step {n}");
                left = Some(n);
            }
        }
        times.push(T::from_usize_lossy(n) * dt);
        points.push(pt);
    }
    Ok(Trajectory { times, points, energy_drift: drift, left_domain_at: left })
}
