//! Phase-space grids and the four-corner Fourier chain
//!
//! ```text
//!          x→λ
//!   B(x,θ) ───── 𝒜(λ,θ)
//!     │θ→p         │θ→p
//!   W(x,p) ───── Z(λ,p)
//!          x→λ
//! ```
//!
//! Conventions (ħ = 1): `W = (1/2π) ∫ B e^{ipθ} dθ`, `𝒜 = ∫ B e^{-ixλ} dx`,
//! `Z = ∫ W e^{-ixλ} dx`. Discretely every transform is a Riemann sum over
//! the source axis, so `x→λ` carries the factor `dx` and `θ→p` carries
//! `dθ/2π`; the inverses carry `dλ/2π` and `dp`. Parseval then reads
//! `Σ|W|² dx dp = (1/2π) Σ|B|² dx dθ`.

use std::fmt;
use std::sync::{Arc, Mutex};

use num_complex::Complex;
use num_traits::Zero;
use rayon::prelude::*;
use rustfft::{Fft, FftDirection, FftPlanner};

use crate::clifford::Matrix4;
use crate::error::{Error, Result};
use crate::scalar::{cis, Real};

/// Uniform x and p grids together with their conjugate λ and θ grids.
///
/// `x_i = x_min + i dx` with `dx = (x_max - x_min)/n_x` (the right end is
/// the periodic image of the left one); `λ_i = (i - n_x/2) dλ` with
/// `dλ = 2π/(n_x dx)`. Likewise for p and θ.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PhaseGrid<T> {
    n_x: usize,
    n_p: usize,
    x_min: T,
    x_max: T,
    p_min: T,
    p_max: T,
}

pub fn make_grid<T: Real>(
    n_x: usize,
    n_p: usize,
    x_min: T,
    x_max: T,
    p_min: T,
    p_max: T,
) -> Result<PhaseGrid<T>> {
    for (name, n) in [("n_x", n_x), ("n_p", n_p)] {
        if n < 8 || !n.is_power_of_two() {
            return Err(Error::InvalidGrid(format!(
                "{name} = {n} must be a power of two and at least 8"
            )));
        }
    }
    for (name, lo, hi) in [("x", x_min, x_max), ("p", p_min, p_max)] {
        if !(lo.is_finite() && hi.is_finite()) {
            return Err(Error::InvalidGrid(format!("{name} range is not finite")));
        }
        if hi <= lo {
            return Err(Error::InvalidGrid(format!(
                "{name} range [{lo}, {hi}] is empty"
            )));
        }
    }
    Ok(PhaseGrid { n_x, n_p, x_min, x_max, p_min, p_max })
}

impl<T: Real> PhaseGrid<T> {
    pub fn n_x(&self) -> usize {
        self.n_x
    }
    pub fn n_p(&self) -> usize {
        self.n_p
    }
    pub fn x_min(&self) -> T {
        self.x_min
    }
    pub fn x_max(&self) -> T {
        self.x_max
    }
    pub fn p_min(&self) -> T {
        self.p_min
    }
    pub fn p_max(&self) -> T {
        self.p_max
    }
    pub fn len(&self) -> usize {
        self.n_x * self.n_p
    }
    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn dx(&self) -> T {
        (self.x_max - self.x_min) / T::from_usize_lossy(self.n_x)
    }
    pub fn dp(&self) -> T {
        (self.p_max - self.p_min) / T::from_usize_lossy(self.n_p)
    }
    pub fn dlambda(&self) -> T {
        T::TAU() / (self.x_max - self.x_min)
    }
    pub fn dtheta(&self) -> T {
        T::TAU() / (self.p_max - self.p_min)
    }

    pub fn x(&self, i: usize) -> T {
        self.x_min + T::from_usize_lossy(i) * self.dx()
    }
    pub fn p(&self, j: usize) -> T {
        self.p_min + T::from_usize_lossy(j) * self.dp()
    }
    pub fn lambda(&self, i: usize) -> T {
        centered::<T>(i, self.n_x) * self.dlambda()
    }
    pub fn theta(&self, j: usize) -> T {
        centered::<T>(j, self.n_p) * self.dtheta()
    }

    pub fn x_axis(&self) -> Vec<T> {
        (0..self.n_x).map(|i| self.x(i)).collect()
    }
    pub fn p_axis(&self) -> Vec<T> {
        (0..self.n_p).map(|j| self.p(j)).collect()
    }
    pub fn lambda_axis(&self) -> Vec<T> {
        (0..self.n_x).map(|i| self.lambda(i)).collect()
    }
    pub fn theta_axis(&self) -> Vec<T> {
        (0..self.n_p).map(|j| self.theta(j)).collect()
    }

    /// Values along the outer (`x` or `λ`) axis of a representation.
    pub fn outer_axis(&self, repr: Representation) -> Vec<T> {
        if repr.has_x() {
            self.x_axis()
        } else {
            self.lambda_axis()
        }
    }

    /// Values along the inner (`p` or `θ`) axis of a representation.
    pub fn inner_axis(&self, repr: Representation) -> Vec<T> {
        if repr.has_p() {
            self.p_axis()
        } else {
            self.theta_axis()
        }
    }

    /// Index of the grid x nearest to `x`, or `None` outside `[x_min, x_max)`.
    pub fn x_index(&self, x: T) -> Option<usize> {
        if !(x >= self.x_min && x < self.x_max) {
            return None;
        }
        let i = ((x - self.x_min) / self.dx()).floor().to_f64_lossy() as usize;
        Some(i.min(self.n_x - 1))
    }

    /// Same grid in another scalar type.
    pub fn cast<U: Real>(&self) -> PhaseGrid<U> {
        let c = |v: T| U::lit(v.to_f64_lossy());
        PhaseGrid {
            n_x: self.n_x,
            n_p: self.n_p,
            x_min: c(self.x_min),
            x_max: c(self.x_max),
            p_min: c(self.p_min),
            p_max: c(self.p_max),
        }
    }
}

fn centered<T: Real>(i: usize, n: usize) -> T {
    T::lit(i as f64 - (n / 2) as f64)
}

/// Which pair of variables a [`MatrixPhaseField`] is sampled on.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Representation {
    /// Blokhintsev function `B(x,θ)`.
    XTheta,
    /// Wigner function `W(x,p)`.
    XP,
    /// `Z(λ,p)`.
    LambdaP,
    /// Ambiguity function `𝒜(λ,θ)`.
    LambdaTheta,
}

impl Representation {
    pub const ALL: [Representation; 4] = [
        Representation::XTheta,
        Representation::XP,
        Representation::LambdaP,
        Representation::LambdaTheta,
    ];

    pub fn has_x(self) -> bool {
        matches!(self, Self::XTheta | Self::XP)
    }
    pub fn has_p(self) -> bool {
        matches!(self, Self::XP | Self::LambdaP)
    }

    fn from_axes(has_x: bool, has_p: bool) -> Self {
        match (has_x, has_p) {
            (true, true) => Self::XP,
            (true, false) => Self::XTheta,
            (false, true) => Self::LambdaP,
            (false, false) => Self::LambdaTheta,
        }
    }
}

impl fmt::Display for Representation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::XTheta => "X_THETA",
            Self::XP => "X_P",
            Self::LambdaP => "LAMBDA_P",
            Self::LambdaTheta => "LAMBDA_THETA",
        })
    }
}

/// One plane per matrix component (row-major index `4a + b`); each plane is
/// row major over (outer axis, inner axis), so `(i, j)` lives at
/// `i * n_p + j`. A missing plane is identically zero and costs nothing in
/// transforms or propagation.
#[derive(Clone, Debug)]
pub struct MatrixPhaseField<T> {
    grid: PhaseGrid<T>,
    repr: Representation,
    planes: [Option<Vec<Complex<T>>>; 16],
}

impl<T: Real> PartialEq for MatrixPhaseField<T> {
    fn eq(&self, other: &Self) -> bool {
        self.grid == other.grid && self.repr == other.repr && self.max_abs_diff(other) == T::zero()
    }
}

impl<T: Real> MatrixPhaseField<T> {
    pub fn zeros(grid: PhaseGrid<T>, repr: Representation) -> Self {
        Self { grid, repr, planes: Default::default() }
    }

    /// Field from one matrix per point, row major. Components that vanish
    /// everywhere are not stored.
    pub fn from_data(
        grid: PhaseGrid<T>,
        repr: Representation,
        data: Vec<Matrix4<T>>,
    ) -> Result<Self> {
        if data.len() != grid.len() {
            return Err(Error::GridMismatch(format!(
                "{} matrices for a {}x{} grid",
                data.len(),
                grid.n_x(),
                grid.n_p()
            )));
        }
        let mut f = Self::zeros(grid, repr);
        for c in 0..16 {
            let (a, b) = (c / 4, c % 4);
            if data.iter().any(|m| !m.0[a][b].is_zero()) {
                f.planes[c] = Some(data.iter().map(|m| m.0[a][b]).collect());
            }
        }
        Ok(f)
    }

    /// Field with `f(outer value, inner value)` at every point.
    pub fn from_fn(
        grid: PhaseGrid<T>,
        repr: Representation,
        f: impl Fn(T, T) -> Matrix4<T> + Sync,
    ) -> Self {
        let outer = grid.outer_axis(repr);
        let inner = grid.inner_axis(repr);
        let data: Vec<Matrix4<T>> = outer
            .par_iter()
            .flat_map_iter(|&a| inner.iter().map(move |&b| (a, b)))
            .map(|(a, b)| f(a, b))
            .collect();
        Self::from_data(grid, repr, data).expect("length matches grid")
    }

    pub fn grid(&self) -> &PhaseGrid<T> {
        &self.grid
    }
    pub fn repr(&self) -> Representation {
        self.repr
    }

    /// Plane of component `(a, b)`, `None` when it is identically zero.
    pub fn component(&self, a: usize, b: usize) -> Option<&[Complex<T>]> {
        self.planes[4 * a + b].as_deref()
    }

    /// Plane of component `(a, b)`, allocated as zeros if absent.
    pub fn component_mut(&mut self, a: usize, b: usize) -> &mut [Complex<T>] {
        let n = self.grid.len();
        self.planes[4 * a + b].get_or_insert_with(|| vec![Complex::zero(); n])
    }

    /// Drops the plane of component `(a, b)`, making it identically zero.
    pub fn clear_component(&mut self, a: usize, b: usize) {
        self.planes[4 * a + b] = None;
    }

    pub(crate) fn planes_mut(&mut self) -> &mut [Option<Vec<Complex<T>>>; 16] {
        &mut self.planes
    }

    pub fn get(&self, i: usize, j: usize) -> Matrix4<T> {
        let k = i * self.grid.n_p() + j;
        Matrix4::from_fn(|a, b| self.planes[4 * a + b].as_ref().map_or(Complex::zero(), |p| p[k]))
    }

    pub fn set(&mut self, i: usize, j: usize, m: &Matrix4<T>) {
        let k = i * self.grid.n_p() + j;
        for (c, z) in m.iter().enumerate() {
            match &mut self.planes[c] {
                Some(p) => p[k] = *z,
                None if z.is_zero() => {}
                None => self.component_mut(c / 4, c % 4)[k] = *z,
            }
        }
    }

    /// One matrix per point, row major.
    pub fn to_matrices(&self) -> Vec<Matrix4<T>> {
        let mut out = vec![Matrix4::zero(); self.grid.len()];
        for (c, p) in self.planes.iter().enumerate() {
            if let Some(p) = p {
                for (m, z) in out.iter_mut().zip(p) {
                    m.0[c / 4][c % 4] = *z;
                }
            }
        }
        out
    }

    /// `Tr Q` at every point, row major.
    pub fn trace(&self) -> Vec<Complex<T>> {
        let mut out = vec![Complex::zero(); self.grid.len()];
        for a in 0..4 {
            if let Some(p) = self.component(a, a) {
                out.par_iter_mut().zip(p.par_iter()).for_each(|(o, z)| *o += *z);
            }
        }
        out
    }

    /// Relabels the representation without touching the data.
    pub fn set_repr(&mut self, repr: Representation) {
        self.repr = repr;
    }

    pub fn expect_repr(&self, allowed: &'static [Representation]) -> Result<()> {
        if allowed.contains(&self.repr) {
            Ok(())
        } else {
            Err(Error::WrongRepresentation { expected: allowed, found: self.repr })
        }
    }

    fn active(&self) -> impl Iterator<Item = &Vec<Complex<T>>> {
        self.planes.iter().flatten()
    }

    pub fn max_abs(&self) -> T {
        self.active()
            .map(|p| p.par_iter().map(|z| z.norm()).reduce(T::zero, T::max))
            .fold(T::zero(), T::max)
    }

    pub fn is_finite(&self) -> bool {
        self.active().all(|p| p.par_iter().all(|z| z.re.is_finite() && z.im.is_finite()))
    }

    pub fn max_abs_diff(&self, other: &Self) -> T {
        let mut d = T::zero();
        for (p, q) in self.planes.iter().zip(other.planes.iter()) {
            let m = match (p, q) {
                (Some(p), Some(q)) => p
                    .par_iter()
                    .zip(q.par_iter())
                    .map(|(a, b)| (*a - *b).norm())
                    .reduce(T::zero, T::max),
                (Some(p), None) | (None, Some(p)) => {
                    p.par_iter().map(|z| z.norm()).reduce(T::zero, T::max)
                }
                (None, None) => T::zero(),
            };
            d = d.max(m);
        }
        d
    }

    /// `max |a - b| / max |b|` with `other` as reference.
    pub fn relative_diff(&self, other: &Self) -> T {
        let scale = other.max_abs();
        let d = self.max_abs_diff(other);
        if scale > T::zero() {
            d / scale
        } else {
            d
        }
    }

    /// `Σ |entries|²` over all points, without any measure.
    pub fn sum_abs2(&self) -> T {
        let n_p = self.grid.n_p();
        self.active()
            .map(|p| {
                let rows: Vec<T> = p
                    .par_chunks(n_p)
                    .map(|r| r.iter().map(|z| z.norm_sqr()).sum())
                    .collect();
                rows.into_iter().sum::<T>()
            })
            .sum()
    }

    /// `self ← a·self + b·other`
    pub fn axpby(&mut self, a: Complex<T>, b: Complex<T>, other: &Self) -> Result<()> {
        if self.grid != other.grid || self.repr != other.repr {
            return Err(Error::GridMismatch("axpby operands differ".into()));
        }
        for c in 0..16 {
            match (&mut self.planes[c], &other.planes[c]) {
                (Some(p), Some(q)) => p
                    .par_iter_mut()
                    .zip(q.par_iter())
                    .for_each(|(u, v)| *u = *u * a + *v * b),
                (Some(p), None) => p.par_iter_mut().for_each(|u| *u = *u * a),
                (None, Some(q)) => self.planes[c] = Some(q.par_iter().map(|v| *v * b).collect()),
                (None, None) => {}
            }
        }
        Ok(())
    }

    /// Which of the 16 matrix components are stored.
    pub fn active_components(&self) -> ComponentMask {
        let mut bits = 0u16;
        for (c, p) in self.planes.iter().enumerate() {
            if p.is_some() {
                bits |= 1 << c;
            }
        }
        ComponentMask(bits)
    }
}

/// Bit set over the 16 row-major matrix components.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ComponentMask(pub u16);

impl ComponentMask {
    pub const ALL: ComponentMask = ComponentMask(u16::MAX);

    pub fn indices(self) -> Vec<usize> {
        (0..16).filter(|c| self.0 & (1 << c) != 0).collect()
    }
}

/// Lines processed per parallel task.
const LINES_PER_TASK: usize = 16;

/// One discrete Fourier map `out_j = c Σ_k in_k e^{s i u_k v_j}` between
/// grids with `du dv = 2π/n`, factored as `post_j · FFT_s(pre_k · in_k)`.
struct AxisTransform<T> {
    fft: Arc<dyn Fft<T>>,
    pre: Vec<Complex<T>>,
    post: Vec<Complex<T>>,
}

impl<T: Real> AxisTransform<T> {
    fn new(planner: &mut FftPlanner<T>, u: &[T], v: &[T], sign: f64, scale: T) -> Self {
        let n = u.len();
        let fft = if sign < 0.0 {
            planner.plan_fft(n, FftDirection::Forward)
        } else {
            planner.plan_fft(n, FftDirection::Inverse)
        };
        let u0 = u[0].to_f64_lossy();
        let v0 = v[0].to_f64_lossy();
        let du = u[1].to_f64_lossy() - u0;
        let dv = v[1].to_f64_lossy() - v0;
        let phase = |a: f64| cis(T::lit(a.rem_euclid(std::f64::consts::TAU)));
        let pre = (0..n)
            .map(|k| phase(sign * (u0 + k as f64 * du) * v0))
            .collect();
        let post = (0..n)
            .map(|j| phase(sign * u0 * j as f64 * dv) * scale)
            .collect();
        Self { fft, pre, post }
    }

    fn len(&self) -> usize {
        self.pre.len()
    }

    /// Transforms every consecutive length-n line of `buf`.
    fn apply(&self, buf: &mut [Complex<T>], scratch: &mut [Complex<T>]) {
        for line in buf.chunks_exact_mut(self.len()) {
            for (z, w) in line.iter_mut().zip(self.pre.iter()) {
                *z = *z * *w;
            }
        }
        self.fft.process_with_scratch(buf, scratch);
        for line in buf.chunks_exact_mut(self.len()) {
            for (z, w) in line.iter_mut().zip(self.post.iter()) {
                *z = *z * *w;
            }
        }
    }

    /// Transforms every line of `buf` in parallel batches.
    fn apply_lines(&self, buf: &mut [Complex<T>]) {
        let scratch_len = self.fft.get_inplace_scratch_len();
        buf.par_chunks_mut(self.len() * LINES_PER_TASK).for_each_init(
            || vec![Complex::zero(); scratch_len],
            |scratch, lines| self.apply(lines, scratch),
        );
    }
}

/// Cached FFT plans and phase factors for every edge of the diagram.
pub struct FourierChain<T: Real> {
    grid: PhaseGrid<T>,
    x_to_lambda: AxisTransform<T>,
    lambda_to_x: AxisTransform<T>,
    p_to_theta: AxisTransform<T>,
    theta_to_p: AxisTransform<T>,
    workspace: Mutex<Vec<Complex<T>>>,
}

impl<T: Real> FourierChain<T> {
    pub fn new(grid: &PhaseGrid<T>) -> Self {
        let mut planner = FftPlanner::new();
        let (x, lam) = (grid.x_axis(), grid.lambda_axis());
        let (p, th) = (grid.p_axis(), grid.theta_axis());
        let two_pi = T::TAU();
        Self {
            grid: *grid,
            x_to_lambda: AxisTransform::new(&mut planner, &x, &lam, -1.0, grid.dx()),
            lambda_to_x: AxisTransform::new(&mut planner, &lam, &x, 1.0, grid.dlambda() / two_pi),
            p_to_theta: AxisTransform::new(&mut planner, &p, &th, -1.0, grid.dp()),
            theta_to_p: AxisTransform::new(&mut planner, &th, &p, 1.0, grid.dtheta() / two_pi),
            workspace: Mutex::new(Vec::new()),
        }
    }

    pub fn grid(&self) -> &PhaseGrid<T> {
        &self.grid
    }

    fn check_grid(&self, field: &MatrixPhaseField<T>) -> Result<()> {
        if field.grid != self.grid {
            return Err(Error::GridMismatch("field grid differs from transform grid".into()));
        }
        Ok(())
    }

    pub fn theta_to_p(&self, field: &mut MatrixPhaseField<T>) -> Result<()> {
        field.expect_repr(&[Representation::XTheta, Representation::LambdaTheta])?;
        self.check_grid(field)?;
        self.inner(field, &self.theta_to_p);
        field.repr = Representation::from_axes(field.repr.has_x(), true);
        Ok(())
    }

    pub fn p_to_theta(&self, field: &mut MatrixPhaseField<T>) -> Result<()> {
        field.expect_repr(&[Representation::XP, Representation::LambdaP])?;
        self.check_grid(field)?;
        self.inner(field, &self.p_to_theta);
        field.repr = Representation::from_axes(field.repr.has_x(), false);
        Ok(())
    }

    pub fn x_to_lambda(&self, field: &mut MatrixPhaseField<T>) -> Result<()> {
        field.expect_repr(&[Representation::XP, Representation::XTheta])?;
        self.check_grid(field)?;
        self.outer(field, &self.x_to_lambda);
        field.repr = Representation::from_axes(false, field.repr.has_p());
        Ok(())
    }

    pub fn lambda_to_x(&self, field: &mut MatrixPhaseField<T>) -> Result<()> {
        field.expect_repr(&[Representation::LambdaP, Representation::LambdaTheta])?;
        self.check_grid(field)?;
        self.outer(field, &self.lambda_to_x);
        field.repr = Representation::from_axes(true, field.repr.has_p());
        Ok(())
    }

    /// Moves `field` to `target` along the shortest path of the diagram.
    pub fn to_repr(&self, field: &mut MatrixPhaseField<T>, target: Representation) -> Result<()> {
        let from = field.repr;
        if from.has_p() != target.has_p() {
            if target.has_p() {
                self.theta_to_p(field)?;
            } else {
                self.p_to_theta(field)?;
            }
        }
        if from.has_x() != target.has_x() {
            if target.has_x() {
                self.lambda_to_x(field)?;
            } else {
                self.x_to_lambda(field)?;
            }
        }
        Ok(())
    }

    /// Transform along the contiguous inner axis of every stored plane.
    fn inner(&self, field: &mut MatrixPhaseField<T>, t: &AxisTransform<T>) {
        for p in field.planes.iter_mut().flatten() {
            t.apply_lines(p);
        }
    }

    /// Transform along the strided outer axis: transpose, transform the
    /// now contiguous lines, transpose back.
    fn outer(&self, field: &mut MatrixPhaseField<T>, t: &AxisTransform<T>) {
        let (n_x, n_p) = (self.grid.n_x(), self.grid.n_p());
        let mut ws = self.workspace.lock().unwrap_or_else(|e| e.into_inner());
        ws.resize(n_x * n_p, Complex::zero());
        for p in field.planes.iter_mut().flatten() {
            transpose::transpose(p, &mut ws, n_p, n_x);
            t.apply_lines(&mut ws);
            transpose::transpose(&ws, p, n_x, n_p);
        }
    }
}

/// `W(x,p) = (1/2π) Σ_θ B(x,θ) e^{ipθ} dθ`, also `𝒜 → Z`.
pub fn ft_theta_to_p<T: Real>(mut field: MatrixPhaseField<T>) -> Result<MatrixPhaseField<T>> {
    FourierChain::new(field.grid()).theta_to_p(&mut field)?;
    Ok(field)
}

/// `B(x,θ) = Σ_p W(x,p) e^{-ipθ} dp`, also `Z → 𝒜`.
pub fn ft_p_to_theta<T: Real>(mut field: MatrixPhaseField<T>) -> Result<MatrixPhaseField<T>> {
    FourierChain::new(field.grid()).p_to_theta(&mut field)?;
    Ok(field)
}

/// `Z(λ,p) = Σ_x W(x,p) e^{-ixλ} dx`, also `B → 𝒜`.
pub fn ft_x_to_lambda<T: Real>(mut field: MatrixPhaseField<T>) -> Result<MatrixPhaseField<T>> {
    FourierChain::new(field.grid()).x_to_lambda(&mut field)?;
    Ok(field)
}

/// `W(x,p) = (1/2π) Σ_λ Z(λ,p) e^{ixλ} dλ`, also `𝒜 → B`.
pub fn ft_lambda_to_x<T: Real>(mut field: MatrixPhaseField<T>) -> Result<MatrixPhaseField<T>> {
    FourierChain::new(field.grid()).lambda_to_x(&mut field)?;
    Ok(field)
}
