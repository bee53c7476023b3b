//! Spinor wavepackets, Majorana and cat superpositions, and their lift to
//! the matrix-valued phase-space state.

use num_complex::Complex;
use num_traits::Zero;
use rayon::prelude::*;
use rustfft::FftPlanner;

use crate::clifford::Matrix4;
use crate::error::{Error, Result};
use crate::phase_grid::{FourierChain, MatrixPhaseField, PhaseGrid, Representation};
use crate::scalar::{cis, Real};

pub type Spinor<T> = [Complex<T>; 4];

/// Four complex components at every point of a periodic x grid.
#[derive(Clone, Debug, PartialEq)]
pub struct SpinorField<T> {
    x_min: T,
    x_max: T,
    values: Vec<Spinor<T>>,
}

impl<T: Real> SpinorField<T> {
    pub fn new(x_min: T, x_max: T, values: Vec<Spinor<T>>) -> Result<Self> {
        if values.is_empty() || !(x_max > x_min) {
            return Err(Error::InvalidGrid("empty spinor axis".into()));
        }
        Ok(Self { x_min, x_max, values })
    }

    /// Samples `f(x)` on the x axis of `grid`.
    pub fn on_grid(grid: &PhaseGrid<T>, f: impl Fn(T) -> Spinor<T>) -> Self {
        Self {
            x_min: grid.x_min(),
            x_max: grid.x_max(),
            values: grid.x_axis().into_iter().map(f).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }
    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
    pub fn x_min(&self) -> T {
        self.x_min
    }
    pub fn x_max(&self) -> T {
        self.x_max
    }
    pub fn dx(&self) -> T {
        (self.x_max - self.x_min) / T::from_usize_lossy(self.len())
    }
    pub fn x(&self, i: usize) -> T {
        self.x_min + T::from_usize_lossy(i) * self.dx()
    }
    pub fn values(&self) -> &[Spinor<T>] {
        &self.values
    }
    pub fn values_mut(&mut self) -> &mut [Spinor<T>] {
        &mut self.values
    }

    /// `ψ†ψ` at every x.
    pub fn density(&self) -> Vec<T> {
        self.values.iter().map(|s| s.iter().map(|z| z.norm_sqr()).sum()).collect()
    }

    /// `Σ ψ†ψ dx`
    pub fn norm2(&self) -> T {
        self.density().into_iter().sum::<T>() * self.dx()
    }

    pub fn scale(&mut self, s: T) {
        for v in &mut self.values {
            for z in v.iter_mut() {
                *z = *z * s;
            }
        }
    }

    fn same_axis(&self, grid: &PhaseGrid<T>) -> bool {
        self.len() == grid.n_x() && self.x_min == grid.x_min() && self.x_max == grid.x_max()
    }
}

/// Rescales to `Σ ψ†ψ dx = 1`.
pub fn normalize<T: Real>(mut psi: SpinorField<T>) -> Result<SpinorField<T>> {
    let n2 = psi.norm2();
    if !n2.is_finite() {
        return Err(Error::NonFinite("spinor field"));
    }
    if n2 <= T::zero() {
        return Err(Error::ZeroNorm);
    }
    psi.scale(T::one() / n2.sqrt());
    Ok(psi)
}

/// Gaussian packet parameters.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WavepacketSpec<T> {
    pub p_tilde: T,
    pub mass: T,
    pub x0: T,
    pub width: T,
}

impl<T: Real> Default for WavepacketSpec<T> {
    fn default() -> Self {
        Self { p_tilde: T::lit(5.0), mass: T::one(), x0: T::zero(), width: T::one() }
    }
}

impl<T: Real> WavepacketSpec<T> {
    pub fn validate(&self) -> Result<()> {
        let all_finite = [self.p_tilde, self.mass, self.x0, self.width]
            .iter()
            .all(|v| v.is_finite());
        if !all_finite {
            return Err(Error::InvalidWavepacket("non-finite parameter".into()));
        }
        if self.width <= T::zero() {
            return Err(Error::InvalidWavepacket(format!("width {} must be positive", self.width)));
        }
        if self.mass < T::zero() {
            return Err(Error::InvalidWavepacket(format!("mass {} must be non-negative", self.mass)));
        }
        Ok(())
    }

    /// `p̃⁰ = √(p̃² + m²)`
    pub fn energy(&self) -> T {
        self.p_tilde.hypot(self.mass)
    }

    fn envelope(&self, x: T) -> T {
        let u = (x - self.x0) / self.width;
        (-(u * u) * T::lit(0.5)).exp()
    }
}

/// Positive-energy free eigenspinor `(p⁰+m, 0, 0, p)` at momentum `p`.
pub fn positive_energy_spinor<T: Real>(p: T, m: T) -> Spinor<T> {
    let z = Complex::zero();
    [Complex::from(p.hypot(m) + m), z, z, Complex::from(p)]
}

/// `ψ(x) = exp(-(x-x0)²/(2w²) + i x p̃) (p̃⁰+m, 0, 0, p̃)`, normalized.
pub fn gaussian_wavepacket<T: Real>(
    spec: &WavepacketSpec<T>,
    grid: &PhaseGrid<T>,
) -> Result<SpinorField<T>> {
    spec.validate()?;
    let u = positive_energy_spinor(spec.p_tilde, spec.mass);
    let psi = SpinorField::on_grid(grid, |x| {
        let g = cis(x * spec.p_tilde) * spec.envelope(x);
        u.map(|c| c * g)
    });
    normalize(psi)
}

/// Charge-conjugation-like map `(ψ₁,ψ₂,ψ₃,ψ₄) ↦ (-ψ₄*, ψ₃*, ψ₂*, -ψ₁*)`.
pub fn majorana_conjugate<T: Real>(s: &Spinor<T>) -> Spinor<T> {
    [-s[3].conj(), s[2].conj(), s[1].conj(), -s[0].conj()]
}

/// `ψ ± C(ψ)`, each normalized.
pub fn majorana_pair<T: Real>(psi: &SpinorField<T>) -> Result<(SpinorField<T>, SpinorField<T>)> {
    let combine = |sign: T| {
        let mut out = psi.clone();
        for v in out.values_mut() {
            let c = majorana_conjugate(v);
            for k in 0..4 {
                v[k] = v[k] + c[k] * sign;
            }
        }
        out
    };
    let plus = normalize(combine(T::one())).map_err(|e| match e {
        Error::ZeroNorm => Error::DegenerateMajorana("plus"),
        e => e,
    })?;
    let minus = normalize(combine(-T::one())).map_err(|e| match e {
        Error::ZeroNorm => Error::DegenerateMajorana("minus"),
        e => e,
    })?;
    Ok((plus, minus))
}

/// Two counter-propagating particle packets,
/// `g(x)[e^{ixp̃} u(p̃) + e^{-ixp̃} u(-p̃)]`, normalized. Each branch carries
/// its own positive-energy spinor so both halves are particles.
pub fn cat_state<T: Real>(spec: &WavepacketSpec<T>, grid: &PhaseGrid<T>) -> Result<SpinorField<T>> {
    spec.validate()?;
    let up = positive_energy_spinor(spec.p_tilde, spec.mass);
    let um = positive_energy_spinor(-spec.p_tilde, spec.mass);
    let psi = SpinorField::on_grid(grid, |x| {
        let g = spec.envelope(x);
        let a = cis(x * spec.p_tilde) * g;
        let b = cis(-x * spec.p_tilde) * g;
        std::array::from_fn(|k| up[k] * a + um[k] * b)
    });
    normalize(psi)
}

/// Pure-state Wigner function `Q(x,p)` in the X_P representation.
///
/// Builds `B(x,θ) = ψ(x-θ/2) ψ†(x+θ/2)` with spectrally exact half shifts,
/// transforms θ→p and scales so that `w0 = Tr[Q]/4` integrates to one.
pub fn wigner_from_spinor<T: Real>(
    psi: &SpinorField<T>,
    grid: &PhaseGrid<T>,
) -> Result<MatrixPhaseField<T>> {
    let chain = FourierChain::new(grid);
    let mut b = blokhintsev_from_spinor(psi, grid)?;
    chain.theta_to_p(&mut b)?;
    Ok(b)
}

/// The X_THETA state `B(x,θ)` of a pure spinor field, same scaling as
/// [`wigner_from_spinor`].
pub fn blokhintsev_from_spinor<T: Real>(
    psi: &SpinorField<T>,
    grid: &PhaseGrid<T>,
) -> Result<MatrixPhaseField<T>> {
    if !psi.same_axis(grid) {
        return Err(Error::GridMismatch("spinor axis differs from grid x axis".into()));
    }
    let x_extent = grid.x_max() - grid.x_min();
    let theta_extent = T::from_usize_lossy(grid.n_p()) * grid.dtheta();
    if theta_extent > x_extent * T::lit(2.0) * (T::one() + T::epsilon() * T::lit(16.0)) {
        return Err(Error::ShiftOutOfDomain {
            theta_extent: theta_extent.to_f64_lossy(),
            x_extent: x_extent.to_f64_lossy(),
        });
    }
    let n2 = psi.norm2();
    if !(n2 > T::zero()) {
        return Err(Error::ZeroNorm);
    }

    let shifter = SpectralShift::new(psi);
    let (n_x, n_p) = (grid.n_x(), grid.n_p());
    let scale = T::lit(4.0) / n2;
    let half = T::lit(0.5);

    // columns[j][i] = Q(x_i, θ_j)
    let columns: Vec<Vec<Matrix4<T>>> = (0..n_p)
        .into_par_iter()
        .map(|j| {
            let a = grid.theta(j) * half;
            let left = shifter.shifted(a);
            let right = shifter.shifted(-a);
            left.iter()
                .zip(right.iter())
                .map(|(l, r)| Matrix4::from_fn(|p, q| l[p] * r[q].conj() * scale))
                .collect()
        })
        .collect();

    let mut data = vec![Matrix4::zero(); n_x * n_p];
    data.par_chunks_mut(n_p).enumerate().for_each(|(i, row)| {
        for (j, m) in row.iter_mut().enumerate() {
            *m = columns[j][i];
        }
    });
    MatrixPhaseField::from_data(*grid, Representation::XTheta, data)
}

/// Band-limited translation `ψ(x) ↦ ψ(x - a)` on the periodic x grid.
pub struct SpectralShift<T: Real> {
    spectrum: [Vec<Complex<T>>; 4],
    wavenumbers: Vec<T>,
    nyquist: Option<usize>,
    inverse: std::sync::Arc<dyn rustfft::Fft<T>>,
}

impl<T: Real> SpectralShift<T> {
    pub fn new(psi: &SpinorField<T>) -> Self {
        let n = psi.len();
        let mut planner = FftPlanner::new();
        let fwd = planner.plan_fft_forward(n);
        let inverse = planner.plan_fft_inverse(n);
        let inv_n = T::one() / T::from_usize_lossy(n);
        let spectrum = std::array::from_fn(|c| {
            let mut line: Vec<Complex<T>> = psi.values().iter().map(|v| v[c]).collect();
            fwd.process(&mut line);
            for z in &mut line {
                *z = *z * inv_n;
            }
            line
        });
        let dk = T::TAU() / (psi.x_max() - psi.x_min());
        let wavenumbers = (0..n)
            .map(|m| {
                let signed = if m <= n / 2 { m as f64 } else { m as f64 - n as f64 };
                T::lit(signed) * dk
            })
            .collect();
        let nyquist = (n % 2 == 0).then_some(n / 2);
        Self { spectrum, wavenumbers, nyquist, inverse }
    }

    /// Samples of `ψ(x_i - a)`.
    pub fn shifted(&self, a: T) -> Vec<Spinor<T>> {
        let n = self.wavenumbers.len();
        let mut phase: Vec<Complex<T>> = self.wavenumbers.iter().map(|&k| cis(-k * a)).collect();
        if let Some(m) = self.nyquist {
            // the Nyquist mode is real; shift the cosine that represents it
            phase[m] = Complex::from((self.wavenumbers[m] * a).cos());
        }
        let mut out = vec![[Complex::zero(); 4]; n];
        let mut line = vec![Complex::zero(); n];
        for c in 0..4 {
            for ((z, s), ph) in line.iter_mut().zip(self.spectrum[c].iter()).zip(phase.iter()) {
                *z = *s * *ph;
            }
            self.inverse.process(&mut line);
            for (o, z) in out.iter_mut().zip(line.iter()) {
                o[c] = *z;
            }
        }
        out
    }
}
