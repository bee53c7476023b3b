//! Diagnostics on an X_P state: `w0 = Tr[Q]/4`, marginals, negativity,
//! transmission, antiparticle fraction, moments and the free energy.
//!
//! Every reduction sums each x row in order and then combines the row sums
//! in order, so results do not depend on the number of worker threads.

use num_complex::Complex;
use num_traits::Zero;
use rayon::prelude::*;
use rustfft::FftPlanner;

use crate::classical::foldy_unitary;
use crate::clifford::Matrix4;
use crate::error::{Error, Result};
use crate::phase_grid::{MatrixPhaseField, Representation};
use crate::scalar::Real;

const XP: &[Representation] = &[Representation::XP];

fn quarter<T: Real>() -> T {
    T::lit(0.25)
}

/// `Σ_x Σ_p f(x, p, Q(x,p))`, deterministic order.
fn reduce<T: Real>(q: &MatrixPhaseField<T>, f: impl Fn(usize, usize, &Matrix4<T>) -> T + Sync) -> T {
    let n_p = q.grid().n_p();
    let rows: Vec<T> = (0..q.grid().n_x())
        .into_par_iter()
        .map(|i| (0..n_p).map(|j| f(i, j, &q.get(i, j))).sum::<T>())
        .collect();
    rows.into_iter().sum()
}

/// `Σ_x Σ_p f(x, p, v(x,p))` over a row-major scalar field.
fn reduce_values<T: Real>(v: &[T], n_p: usize, f: impl Fn(usize, usize, T) -> T + Sync) -> T {
    let rows: Vec<T> = v
        .par_chunks(n_p)
        .enumerate()
        .map(|(i, row)| row.iter().enumerate().map(|(j, &w)| f(i, j, w)).sum::<T>())
        .collect();
    rows.into_iter().sum()
}

/// `Re Tr[Q]` at every point.
fn trace_re<T: Real>(q: &MatrixPhaseField<T>) -> Vec<T> {
    q.trace().into_iter().map(|z| z.re).collect()
}

/// `w0` values, row major, together with the largest `|Im Tr[Q]/4|`.
#[derive(Clone, Debug)]
pub struct W0Field<T> {
    pub values: Vec<T>,
    pub max_imag: T,
}

pub fn w0<T: Real>(q: &MatrixPhaseField<T>) -> Result<W0Field<T>> {
    q.expect_repr(XP)?;
    let tr = q.trace();
    let values = tr.iter().map(|z| z.re * quarter()).collect();
    let max_imag = tr.iter().fold(T::zero(), |a, z| a.max((z.im * quarter::<T>()).abs()));
    Ok(W0Field { values, max_imag })
}

/// `∫ w0 dx dp`
pub fn norm<T: Real>(q: &MatrixPhaseField<T>) -> Result<T> {
    q.expect_repr(XP)?;
    let g = q.grid();
    Ok(reduce_values(&trace_re(q), g.n_p(), |_, _, v| v) * quarter::<T>() * g.dx() * g.dp())
}

/// `∫ w0 dp` at every grid x.
pub fn marginal_x<T: Real>(q: &MatrixPhaseField<T>) -> Result<Vec<T>> {
    q.expect_repr(XP)?;
    let dp = q.grid().dp();
    Ok(trace_re(q)
        .chunks(q.grid().n_p())
        .map(|row| row.iter().copied().sum::<T>() * quarter::<T>() * dp)
        .collect())
}

/// `∫ w0 dx` at every grid p.
pub fn marginal_p<T: Real>(q: &MatrixPhaseField<T>) -> Result<Vec<T>> {
    q.expect_repr(XP)?;
    let dx = q.grid().dx();
    let mut out = vec![T::zero(); q.grid().n_p()];
    for row in trace_re(q).chunks(q.grid().n_p()) {
        for (o, v) in out.iter_mut().zip(row) {
            *o += *v;
        }
    }
    for o in &mut out {
        *o = *o * quarter::<T>() * dx;
    }
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Negativity<T> {
    /// `∫_{w0<0} w0 dx dp`, never positive.
    pub integral: T,
    /// Most negative single value of `w0` (zero if none is negative).
    pub min_value: T,
}

/// Refinement factor per axis for the negativity integral.
pub const NEGATIVITY_REFINEMENT: usize = 4;

/// Negativity of the band-limited `w0`, evaluated on a grid
/// [`NEGATIVITY_REFINEMENT`] times finer along both axes. Fringes only a
/// few cells wide are otherwise integrated with an error that depends on
/// where they sit relative to the grid.
pub fn negativity<T: Real>(q: &MatrixPhaseField<T>) -> Result<Negativity<T>> {
    q.expect_repr(XP)?;
    let g = q.grid();
    let f = NEGATIVITY_REFINEMENT;
    let fine = upsample(&trace_re(q), g.n_x(), g.n_p(), f);
    let cell = g.dx() * g.dp() / T::from_usize_lossy(f * f);
    let integral = reduce_values(&fine, f * g.n_p(), |_, _, v| v.min(T::zero())) * quarter::<T>() * cell;
    let min_value = fine.iter().fold(T::zero(), |a, &v| a.min(v * quarter::<T>()));
    Ok(Negativity { integral, min_value })
}

/// Trigonometric interpolation of a periodic, row-major `n_x × n_p` field
/// onto the grid `factor` times finer along both axes. The Nyquist bins
/// are split evenly so real input stays real.
pub fn upsample<T: Real>(v: &[T], n_x: usize, n_p: usize, factor: usize) -> Vec<T> {
    assert_eq!(v.len(), n_x * n_p, "field size");
    let (m_x, m_p) = (factor * n_x, factor * n_p);
    let mut planner = FftPlanner::new();

    let mut a: Vec<Complex<T>> = v.iter().map(|&r| Complex::new(r, T::zero())).collect();
    planner.plan_fft_forward(n_p).process(&mut a);
    let mut spec = vec![Complex::zero(); n_x * n_p];
    transpose::transpose(&a, &mut spec, n_p, n_x);
    planner.plan_fft_forward(n_x).process(&mut spec);

    // spec is [kp][kx]; scatter into the padded [kp'][kx'] spectrum
    let half = T::lit(0.5);
    let targets = |k: usize, n: usize, m: usize| -> Vec<(usize, T)> {
        match k.cmp(&(n / 2)) {
            std::cmp::Ordering::Less => vec![(k, T::one())],
            std::cmp::Ordering::Greater => vec![(k + m - n, T::one())],
            std::cmp::Ordering::Equal if m == n => vec![(k, T::one())],
            std::cmp::Ordering::Equal => vec![(k, half), (m - k, half)],
        }
    };
    let mut padded = vec![Complex::zero(); m_x * m_p];
    for kp in 0..n_p {
        for (tp, wp) in targets(kp, n_p, m_p) {
            for kx in 0..n_x {
                for (tx, wx) in targets(kx, n_x, m_x) {
                    padded[tp * m_x + tx] += spec[kp * n_x + kx] * (wp * wx);
                }
            }
        }
    }
    planner.plan_fft_inverse(m_x).process(&mut padded);
    let mut out = vec![Complex::zero(); m_x * m_p];
    transpose::transpose(&padded, &mut out, m_x, m_p);
    planner.plan_fft_inverse(m_p).process(&mut out);
    let scale = T::one() / T::from_usize_lossy(n_x * n_p);
    out.into_iter().map(|z| z.re * scale).collect()
}

/// `∫_{x > threshold} w0 / ∫ w0`
pub fn transmission<T: Real>(q: &MatrixPhaseField<T>, threshold: T) -> Result<T> {
    q.expect_repr(XP)?;
    let g = *q.grid();
    if !(threshold >= g.x_min() && threshold <= g.x_max()) {
        return Err(Error::ThresholdOutsideGrid(threshold.to_f64_lossy()));
    }
    let tr = trace_re(q);
    let right = reduce_values(&tr, g.n_p(), |i, _, v| if g.x(i) > threshold { v } else { T::zero() });
    let total = reduce_values(&tr, g.n_p(), |_, _, v| v);
    Ok(right / total)
}

/// Free energy-sign projectors `Λ±(p) = U† P± U` with the diagonalizing
/// frame `U` at `A = 0` and `P₊ = diag(1,1,0,0)`, `P₋ = diag(0,0,1,1)`.
/// At `p = m = 0`, where the frame is undefined, both are `1/2`.
pub fn energy_projectors<T: Real>(p: T, m: T) -> (Matrix4<T>, Matrix4<T>) {
    let o = Complex::new(T::one(), T::zero());
    let z = Complex::new(T::zero(), T::zero());
    match foldy_unitary([p, T::zero(), T::zero()], [T::zero(); 3], m) {
        Ok(u) => {
            let plus = u.adjoint() * Matrix4::diagonal([o, o, z, z]) * u;
            let minus = u.adjoint() * Matrix4::diagonal([z, z, o, o]) * u;
            (plus, minus)
        }
        Err(_) => {
            let h = Matrix4::identity().scale_re(T::lit(0.5));
            (h, h)
        }
    }
}

/// `Σ_ij a_ij b_ji`
#[inline]
fn trace_product<T: Real>(a: &Matrix4<T>, b: &Matrix4<T>) -> Complex<T> {
    let mut s = Complex::new(T::zero(), T::zero());
    for i in 0..4 {
        for j in 0..4 {
            s = s + a.0[i][j] * b.0[j][i];
        }
    }
    s
}

/// `∫ Tr[Λ₋(p) Q] / ∫ Tr[Q]` with free projectors of mass `m`.
pub fn antiparticle_fraction<T: Real>(q: &MatrixPhaseField<T>, m: T) -> Result<T> {
    q.expect_repr(XP)?;
    let lm: Vec<Matrix4<T>> = q.grid().p_axis().into_iter().map(|p| energy_projectors(p, m).1).collect();
    let minus = reduce(q, |_, j, mat| trace_product(&lm[j], mat).re);
    let total = reduce_values(&trace_re(q), q.grid().n_p(), |_, _, v| v);
    Ok(minus / total)
}

/// `⟨α¹p + βm⟩ = ∫ Tr[(α¹p + βm) Q] / ∫ Tr[Q]`
pub fn energy_free<T: Real>(q: &MatrixPhaseField<T>, m: T) -> Result<T> {
    q.expect_repr(XP)?;
    let p = q.grid().p_axis();
    let e = reduce(q, |_, j, mat| {
        // Tr[α¹Q] and Tr[βQ] in the Dirac representation
        let tr_a = mat.0[3][0] + mat.0[2][1] + mat.0[1][2] + mat.0[0][3];
        let tr_b = mat.0[0][0] + mat.0[1][1] - mat.0[2][2] - mat.0[3][3];
        (tr_a * p[j] + tr_b * m).re
    });
    let total = reduce_values(&trace_re(q), q.grid().n_p(), |_, _, v| v);
    Ok(e / total)
}

/// `(⟨p⟩, ⟨p²⟩)` from `w0`.
pub fn momentum_moments<T: Real>(q: &MatrixPhaseField<T>) -> Result<(T, T)> {
    q.expect_repr(XP)?;
    let p = q.grid().p_axis();
    let (tr, n_p) = (trace_re(q), q.grid().n_p());
    let total = reduce_values(&tr, n_p, |_, _, v| v);
    let m1 = reduce_values(&tr, n_p, |_, j, v| v * p[j]);
    let m2 = reduce_values(&tr, n_p, |_, j, v| v * p[j] * p[j]);
    Ok((m1 / total, m2 / total))
}

/// `⟨x⟩` from `w0`.
pub fn x_mean<T: Real>(q: &MatrixPhaseField<T>) -> Result<T> {
    q.expect_repr(XP)?;
    let g = *q.grid();
    let tr = trace_re(q);
    let total = reduce_values(&tr, g.n_p(), |_, _, v| v);
    let m1 = reduce_values(&tr, g.n_p(), |i, _, v| v * g.x(i));
    Ok(m1 / total)
}

/// `2π ∫ Tr[Q²] dx dp / (∫ Tr[Q] dx dp)²`, one for pure states.
pub fn purity<T: Real>(q: &MatrixPhaseField<T>) -> Result<T> {
    q.expect_repr(XP)?;
    let g = q.grid();
    let cell = g.dx() * g.dp();
    let tr2 = reduce(q, |_, _, m| trace_product(m, m).re) * cell;
    let tr = reduce_values(&trace_re(q), g.n_p(), |_, _, v| v) * cell;
    Ok(T::TAU() * tr2 / (tr * tr))
}

/// Fractions of `∫|w0|` lying within `cells` grid cells of the x edges and
/// of the p edges.
pub fn edge_weights<T: Real>(q: &MatrixPhaseField<T>, cells: usize) -> (T, T) {
    let g = *q.grid();
    let (n_x, n_p) = (g.n_x(), g.n_p());
    let near = |k: usize, n: usize| k < cells || k + cells >= n;
    let tr: Vec<T> = trace_re(q).into_iter().map(|v| v.abs()).collect();
    let total = reduce_values(&tr, n_p, |_, _, v| v);
    if total <= T::zero() {
        return (T::zero(), T::zero());
    }
    let wx = reduce_values(&tr, n_p, |i, _, v| if near(i, n_x) { v } else { T::zero() });
    let wp = reduce_values(&tr, n_p, |_, j, v| if near(j, n_p) { v } else { T::zero() });
    (wx / total, wp / total)
}

/// One time-stamped set of diagnostics.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ObservableRecord<T> {
    pub t: T,
    pub norm: T,
    pub negativity: T,
    pub negativity_min: T,
    pub transmission: T,
    pub antiparticle_fraction: T,
    pub energy: T,
    pub p_mean: T,
    pub p2_mean: T,
    pub x_mean: T,
}

impl<T: Real> ObservableRecord<T> {
    /// All diagnostics of an X_P state; `mass` selects the free projectors
    /// and energy.
    pub fn measure(q: &MatrixPhaseField<T>, t: T, threshold: T, mass: T) -> Result<Self> {
        let neg = negativity(q)?;
        let (p_mean, p2_mean) = momentum_moments(q)?;
        Ok(Self {
            t,
            norm: norm(q)?,
            negativity: neg.integral,
            negativity_min: neg.min_value,
            transmission: transmission(q, threshold)?,
            antiparticle_fraction: antiparticle_fraction(q, mass)?,
            energy: energy_free(q, mass)?,
            p_mean,
            p2_mean,
            x_mean: x_mean(q)?,
        })
    }
}

/// Records with strictly increasing times.
#[derive(Clone, Debug, Default)]
pub struct ObservableSeries<T> {
    records: Vec<ObservableRecord<T>>,
}

impl<T: Real> ObservableSeries<T> {
    pub fn new() -> Self {
        Self { records: Vec::new() }
    }

    pub fn push(&mut self, r: ObservableRecord<T>) -> Result<()> {
        if let Some(last) = self.records.last() {
            if !(r.t > last.t) {
                return Err(Error::InvalidConfig(format!(
                    "record time {} does not follow {}",
                    r.t, last.t
                )));
            }
        }
        self.records.push(r);
        Ok(())
    }

    pub fn records(&self) -> &[ObservableRecord<T>] {
        &self.records
    }

    pub fn times(&self) -> Vec<T> {
        self.records.iter().map(|r| r.t).collect()
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn last(&self) -> Option<&ObservableRecord<T>> {
        self.records.last()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::clifford::gamma;
    use crate::phase_grid::make_grid;
    use crate::states::{gaussian_wavepacket, majorana_pair, wigner_from_spinor, WavepacketSpec};

    fn lifted(spec: WavepacketSpec<f64>) -> MatrixPhaseField<f64> {
        let g = make_grid::<f64>(128, 128, -16.0, 16.0, -16.0, 16.0).unwrap();
        let psi = gaussian_wavepacket(&spec, &g).unwrap();
        wigner_from_spinor(&psi, &g).unwrap()
    }

    #[test]
    fn projectors_are_complete_and_idempotent() {
        for &p in &[-7.3, -1.0, 0.0, 0.4, 5.0, 19.9] {
            let (lp, lm) = energy_projectors(p, 1.0);
            assert!((lp + lm).max_abs_diff(&Matrix4::identity()) < 1e-12);
            assert!((lp * lp).max_abs_diff(&lp) < 1e-12);
            assert!((lm * lm).max_abs_diff(&lm) < 1e-12);
            // equal to (1 - H/E)/2
            let h = crate::clifford::alpha::<f64>(1).unwrap().scale_re(p) + gamma::<f64>(0).unwrap();
            let e = (p * p + 1.0f64).sqrt();
            let want = (Matrix4::identity() - h.scale_re(1.0 / e)).scale_re(0.5);
            assert!(lm.max_abs_diff(&want) < 1e-12);
        }
    }

    #[test]
    fn gaussian_packet_diagnostics() {
        let q = lifted(WavepacketSpec::default());
        assert!((norm(&q).unwrap() - 1.0).abs() < 1e-10);
        let w = w0(&q).unwrap();
        assert!(w.max_imag < 1e-10);
        assert!(w.values.iter().all(|&v| v > -1e-10));
        assert!(negativity(&q).unwrap().integral.abs() < 1e-6);
        assert!((purity(&q).unwrap() - 1.0).abs() < 1e-6);
        assert!(antiparticle_fraction(&q, 1.0).unwrap() < 0.01);
    }

    #[test]
    fn rest_packet_has_zero_mean_momentum() {
        let q = lifted(WavepacketSpec { p_tilde: 0.0, ..Default::default() });
        let (p1, p2) = momentum_moments(&q).unwrap();
        assert!(p1.abs() < 1e-10);
        assert!((p2 - 0.5).abs() < 1e-8);
        // only the upper component is occupied, so <α¹p> = 0 and <β> = 1
        assert!((energy_free(&q, 1.0).unwrap() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn transmission_bounds() {
        let q = lifted(WavepacketSpec { x0: -10.0, ..Default::default() });
        assert!(transmission(&q, 0.0).unwrap() < 1e-6);
        assert!((transmission(&q, -15.9).unwrap() - 1.0).abs() < 1e-6);
        assert!(matches!(transmission(&q, 40.0), Err(Error::ThresholdOutsideGrid(_))));
    }

    #[test]
    fn majorana_is_half_antiparticle_with_fringes() {
        let g = make_grid::<f64>(128, 128, -16.0, 16.0, -16.0, 16.0).unwrap();
        let psi = gaussian_wavepacket(&WavepacketSpec::default(), &g).unwrap();
        let (plus, _) = majorana_pair(&psi).unwrap();
        let q = wigner_from_spinor(&plus, &g).unwrap();
        assert!((antiparticle_fraction(&q, 1.0).unwrap() - 0.5).abs() < 0.02);
        let n = negativity(&q).unwrap();
        assert!(n.integral < -0.05 && n.min_value < 0.0);
    }

    #[test]
    fn upsampling_reproduces_band_limited_functions() {
        let (n_x, n_p, f) = (16, 8, 3);
        let (lx, lp) = (16.0f64, 8.0f64);
        let tau = std::f64::consts::TAU;
        // modes 3 and -2 in x, 1 in p, plus the x Nyquist mode
        let u = |x: f64, p: f64| {
            (tau * 3.0 * x / lx).cos() + (tau * 2.0 * x / lx).sin() * (tau * p / lp).cos()
                + 0.5 * (tau * 8.0 * x / lx).cos()
        };
        let coarse: Vec<f64> = (0..n_x)
            .flat_map(|i| (0..n_p).map(move |j| u(i as f64 * lx / 16.0, j as f64 * lp / 8.0)))
            .collect();
        let fine = upsample(&coarse, n_x, n_p, f);
        for i in 0..f * n_x {
            for j in 0..f * n_p {
                let (x, p) = (i as f64 * lx / 48.0, j as f64 * lp / 24.0);
                assert!((fine[i * f * n_p + j] - u(x, p)).abs() < 1e-12, "({i},{j})");
            }
        }
        // factor one is the identity
        let same = upsample(&coarse, n_x, n_p, 1);
        assert!(same.iter().zip(&coarse).all(|(a, b)| (a - b).abs() < 1e-13));
    }

    #[test]
    fn series_requires_increasing_times() {
        let q = lifted(WavepacketSpec::default());
        let mut s = ObservableSeries::new();
        s.push(ObservableRecord::measure(&q, 0.0, 0.0, 1.0).unwrap()).unwrap();
        assert!(s.push(ObservableRecord::measure(&q, 0.0, 0.0, 1.0).unwrap()).is_err());
        assert_eq!(s.len(), 1);
    }

    #[test]
    fn wrong_representation() {
        let g = make_grid(8, 8, 0.0, 8.0, 0.0, 8.0).unwrap();
        let q = MatrixPhaseField::<f64>::zeros(g, Representation::LambdaP);
        assert!(w0(&q).is_err());
        assert!(marginal_x(&q).is_err());
    }
}
