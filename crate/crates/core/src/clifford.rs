//! Dirac gamma matrices, the alpha matrices of the Dirac Hamiltonian and
//! Lorentz rotors in the standard Dirac representation.
//!
//! `Matrix4` is generic over any numeric scalar so the algebraic identities
//! can be checked exactly (integers, rationals); the matrix exponential and
//! everything built on it need a floating point [`Real`].

use std::ops::{Add, AddAssign, Index, IndexMut, Mul, Neg, Sub};

use num_complex::Complex;
use num_traits::{Num, One, Zero};

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Dense 4×4 complex matrix, row major.
#[derive(Clone, Copy, PartialEq, Debug)]
#[repr(C)]
pub struct Matrix4<T>(pub [[Complex<T>; 4]; 4]);

impl<T: Copy + Num> Matrix4<T> {
    pub fn zero() -> Self {
        Self([[Complex::zero(); 4]; 4])
    }

    pub fn identity() -> Self {
        Self::diagonal([Complex::one(); 4])
    }

    pub fn diagonal(d: [Complex<T>; 4]) -> Self {
        let mut m = Self::zero();
        for (i, v) in d.into_iter().enumerate() {
            m.0[i][i] = v;
        }
        m
    }

    pub fn from_fn(mut f: impl FnMut(usize, usize) -> Complex<T>) -> Self {
        let mut m = Self::zero();
        for i in 0..4 {
            for j in 0..4 {
                m.0[i][j] = f(i, j);
            }
        }
        m
    }

    pub fn trace(&self) -> Complex<T> {
        self.0[0][0] + self.0[1][1] + self.0[2][2] + self.0[3][3]
    }

    pub fn scale(&self, s: Complex<T>) -> Self {
        Self::from_fn(|i, j| self.0[i][j] * s)
    }

    pub fn scale_re(&self, s: T) -> Self {
        Self::from_fn(|i, j| self.0[i][j] * s)
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(|i, j| self.0[j][i])
    }

    /// `A B + B A`
    pub fn anticommutator(&self, other: &Self) -> Self {
        *self * *other + *other * *self
    }

    pub fn commutator(&self, other: &Self) -> Self {
        *self * *other - *other * *self
    }

    pub fn iter(&self) -> impl Iterator<Item = &Complex<T>> {
        self.0.iter().flatten()
    }
}

impl<T: Copy + Num + Neg<Output = T>> Matrix4<T> {
    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        Self::from_fn(|i, j| self.0[j][i].conj())
    }
}

impl<T: Real> Matrix4<T> {
    /// Largest entry modulus.
    pub fn max_abs(&self) -> T {
        self.iter().fold(T::zero(), |acc, z| acc.max(z.norm()))
    }

    /// Induced 1-norm (maximum absolute column sum).
    pub fn norm1(&self) -> T {
        (0..4)
            .map(|j| (0..4).map(|i| self.0[i][j].norm()).sum::<T>())
            .fold(T::zero(), T::max)
    }

    pub fn is_finite(&self) -> bool {
        self.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    /// `max |a_ij - b_ij|`
    pub fn max_abs_diff(&self, other: &Self) -> T {
        (*self - *other).max_abs()
    }

    /// Dense matrix exponential by scaling and squaring of a Taylor series.
    pub fn expm(&self) -> Self {
        let half = T::lit(0.5);
        let norm = self.norm1();
        let mut squarings = 0u32;
        let mut scaled_norm = norm;
        while scaled_norm > half {
            scaled_norm = scaled_norm * half;
            squarings += 1;
        }
        let a = self.scale_re(T::lit(0.5).powi(squarings as i32));

        let mut sum = Self::identity();
        let mut term = Self::identity();
        for k in 1..=40 {
            term = (term * a).scale_re(T::one() / T::from_usize_lossy(k));
            sum += term;
            if term.max_abs() <= T::epsilon() * sum.max_abs() * T::lit(1e-2) {
                break;
            }
        }
        for _ in 0..squarings {
            sum = sum * sum;
        }
        sum
    }
}

impl<T: Copy + Num> Add for Matrix4<T> {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        Self::from_fn(|i, j| self.0[i][j] + rhs.0[i][j])
    }
}

impl<T: Copy + Num> AddAssign for Matrix4<T> {
    fn add_assign(&mut self, rhs: Self) {
        *self = *self + rhs;
    }
}

impl<T: Copy + Num> Sub for Matrix4<T> {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        Self::from_fn(|i, j| self.0[i][j] - rhs.0[i][j])
    }
}

impl<T: Copy + Num + Neg<Output = T>> Neg for Matrix4<T> {
    type Output = Self;
    fn neg(self) -> Self {
        Self::from_fn(|i, j| -self.0[i][j])
    }
}

impl<T: Copy + Num> Mul for Matrix4<T> {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        let mut out = Self::zero();
        for i in 0..4 {
            for k in 0..4 {
                let a = self.0[i][k];
                for j in 0..4 {
                    out.0[i][j] = out.0[i][j] + a * rhs.0[k][j];
                }
            }
        }
        out
    }
}

impl<T: Copy + Num> Mul<[Complex<T>; 4]> for Matrix4<T> {
    type Output = [Complex<T>; 4];
    fn mul(self, v: [Complex<T>; 4]) -> [Complex<T>; 4] {
        let mut out = [Complex::zero(); 4];
        for (i, o) in out.iter_mut().enumerate() {
            for (j, vj) in v.iter().enumerate() {
                *o = *o + self.0[i][j] * *vj;
            }
        }
        out
    }
}

impl<T> Index<(usize, usize)> for Matrix4<T> {
    type Output = Complex<T>;
    fn index(&self, (i, j): (usize, usize)) -> &Complex<T> {
        &self.0[i][j]
    }
}

impl<T> IndexMut<(usize, usize)> for Matrix4<T> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex<T> {
        &mut self.0[i][j]
    }
}

fn c<T: Num>(re: T, im: T) -> Complex<T> {
    Complex::new(re, im)
}

/// Minkowski metric `g_{mu nu} = diag(1, -1, -1, -1)`.
pub fn metric<T: Num + Neg<Output = T>>(mu: usize, nu: usize) -> T {
    match (mu, nu) {
        (0, 0) => T::one(),
        (a, b) if a == b => -T::one(),
        _ => T::zero(),
    }
}

/// Contravariant gamma matrix `γ^mu` in the Dirac representation.
pub fn gamma<T: Copy + Num + Neg<Output = T>>(mu: usize) -> Result<Matrix4<T>> {
    let o = T::zero();
    let l = T::one();
    let z = Complex::zero();
    let m = match mu {
        0 => Matrix4::diagonal([c(l, o), c(l, o), c(-l, o), c(-l, o)]),
        1 => Matrix4([
            [z, z, z, c(l, o)],
            [z, z, c(l, o), z],
            [z, c(-l, o), z, z],
            [c(-l, o), z, z, z],
        ]),
        2 => Matrix4([
            [z, z, z, c(o, -l)],
            [z, z, c(o, l), z],
            [z, c(o, l), z, z],
            [c(o, -l), z, z, z],
        ]),
        3 => Matrix4([
            [z, z, c(l, o), z],
            [z, z, z, c(-l, o)],
            [c(-l, o), z, z, z],
            [z, c(l, o), z, z],
        ]),
        _ => return Err(Error::IndexOutOfRange { what: "gamma index mu", index: mu }),
    };
    Ok(m)
}

/// Covariant gamma matrix `γ_mu = g_{mu nu} γ^nu`.
pub fn gamma_lower<T: Copy + Num + Neg<Output = T>>(mu: usize) -> Result<Matrix4<T>> {
    let g = gamma::<T>(mu)?;
    Ok(if mu == 0 { g } else { -g })
}

/// `α^k = γ^0 γ^k`, k in 1..=3.
pub fn alpha<T: Copy + Num + Neg<Output = T>>(k: usize) -> Result<Matrix4<T>> {
    if !(1..=3).contains(&k) {
        return Err(Error::IndexOutOfRange { what: "alpha index k", index: k });
    }
    Ok(gamma::<T>(0)? * gamma::<T>(k)?)
}

/// The four contravariant gammas, for kernels that cannot fail.
pub fn gammas<T: Copy + Num + Neg<Output = T>>() -> [Matrix4<T>; 4] {
    [0, 1, 2, 3].map(|mu| gamma(mu).expect("valid index"))
}

pub fn alphas<T: Copy + Num + Neg<Output = T>>() -> [Matrix4<T>; 3] {
    [1, 2, 3].map(|k| alpha(k).expect("valid index"))
}

/// Six parameters of a proper orthochronous Lorentz transformation.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct RotorParams<T> {
    /// Boost rapidities along x, y, z.
    pub eta: [T; 3],
    /// Rotation angles (radians) about x, y, z.
    pub theta_rot: [T; 3],
}

impl<T: Real> RotorParams<T> {
    pub fn boost(axis: usize, rapidity: T) -> Self {
        let mut eta = [T::zero(); 3];
        eta[axis] = rapidity;
        Self { eta, theta_rot: [T::zero(); 3] }
    }

    pub fn rotation(axis: usize, angle: T) -> Self {
        let mut theta_rot = [T::zero(); 3];
        theta_rot[axis] = angle;
        Self { eta: [T::zero(); 3], theta_rot }
    }

    fn is_finite(&self) -> bool {
        self.eta.iter().chain(self.theta_rot.iter()).all(|v| v.is_finite())
    }
}

/// `L = exp(½ η_k γ^0 γ^k) · exp(¼ ε_{jkl} θ^j γ^k γ^l)`.
pub fn lorentz_rotor<T: Real>(params: &RotorParams<T>) -> Result<Matrix4<T>> {
    if !params.is_finite() {
        return Err(Error::NonFinite("rotor parameters"));
    }
    let g = gammas::<T>();
    let half = T::lit(0.5);

    let mut boost = Matrix4::zero();
    for k in 0..3 {
        boost += (g[0] * g[k + 1]).scale_re(half * params.eta[k]);
    }

    // ¼ ε_{jkl} θ^j γ^k γ^l  =  ½ θ^j γ^k γ^l over cyclic (j, k, l)
    let mut rot = Matrix4::zero();
    for (j, k, l) in [(0, 1, 2), (1, 2, 0), (2, 0, 1)] {
        rot += (g[k + 1] * g[l + 1]).scale_re(half * params.theta_rot[j]);
    }

    Ok(boost.expm() * rot.expm())
}

/// `‖L γ^0 L† γ^0 − 1‖∞`, relative to `max(1, ‖L‖²)`.
pub fn rotor_membership_residue<T: Real>(l: &Matrix4<T>) -> T {
    let g0 = gamma::<T>(0).expect("valid index");
    let r = (*l * g0 * l.adjoint() * g0).max_abs_diff(&Matrix4::identity());
    let scale = T::one().max(l.max_abs() * l.max_abs());
    r / scale
}

/// `L⁻¹ = γ^0 L† γ^0`, valid for members of Spin+(1,3).
pub fn rotor_inverse<T: Real>(l: &Matrix4<T>) -> Result<Matrix4<T>> {
    if !l.is_finite() {
        return Err(Error::NonFinite("rotor"));
    }
    let residue = rotor_membership_residue(l);
    if residue > T::identity_tolerance() {
        return Err(Error::InvalidRotor { residue: residue.to_f64_lossy() });
    }
    let g0 = gamma::<T>(0).expect("valid index");
    Ok(g0 * l.adjoint() * g0)
}

/// `u^mu γ_mu` for contravariant components `u`.
pub fn slash<T: Real>(u: &[T; 4]) -> Matrix4<T> {
    let mut m = Matrix4::zero();
    for (mu, &um) in u.iter().enumerate() {
        m += gamma_lower::<T>(mu).expect("valid index").scale_re(um);
    }
    m
}

/// `u·u = (u^0)² − |u|²`
pub fn minkowski_norm2<T: Real>(u: &[T; 4]) -> T {
    u[0] * u[0] - u[1] * u[1] - u[2] * u[2] - u[3] * u[3]
}

/// Active Lorentz transformation `u' γ = L (u γ) L⁻¹` of a four-vector.
pub fn transform_vector<T: Real>(l: &Matrix4<T>, u: &[T; 4]) -> Result<[T; 4]> {
    let inv = rotor_inverse(l)?;
    let m = *l * slash(u) * inv;
    let g = gammas::<T>();
    let quarter = T::lit(0.25);
    let out: [T; 4] = std::array::from_fn(|nu| (m * g[nu]).trace().re * quarter);

    let scale = T::one().max(m.max_abs());
    let residue = m.max_abs_diff(&slash(&out)) / scale;
    if residue > T::identity_tolerance() {
        return Err(Error::NotAVector { residue: residue.to_f64_lossy() });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::Ratio;

    type M = Matrix4<f64>;

    #[test]
    fn clifford_relations_hold_exactly_over_integers() {
        for mu in 0..4 {
            for nu in 0..4 {
                let a = gamma_lower::<i64>(mu).unwrap();
                let b = gamma_lower::<i64>(nu).unwrap();
                let expected = Matrix4::<i64>::identity()
                    .scale_re(2 * metric::<i64>(mu, nu));
                assert_eq!(a.anticommutator(&b), expected, "mu={mu} nu={nu}");
            }
        }
    }

    #[test]
    fn clifford_relations_hold_over_rationals() {
        let g0 = gamma::<Ratio<i64>>(0).unwrap();
        let g2 = gamma::<Ratio<i64>>(2).unwrap();
        let half = Complex::new(Ratio::new(1, 2), Ratio::new(0, 1));
        // (½γ^0)(½γ^0) = ¼·1
        let q = g0.scale(half) * g0.scale(half);
        assert_eq!(q, Matrix4::identity().scale_re(Ratio::new(1, 4)));
        assert_eq!(g2 * g2, -Matrix4::identity());
    }

    #[test]
    fn gamma_examples() {
        let g = gammas::<i32>();
        assert_eq!(g[0] * g[0], Matrix4::identity());
        assert_eq!(g[1] * g[2] + g[2] * g[1], Matrix4::zero());
        assert_eq!(g[1] * g[1], -Matrix4::identity());
        assert!(gamma::<f64>(4).is_err());
    }

    #[test]
    fn alpha_examples() {
        let a = alphas::<i32>();
        assert_eq!(a[0] * a[0], Matrix4::identity());
        assert_eq!(a[0] * a[1] + a[1] * a[0], Matrix4::zero());
        for ak in &a {
            assert_eq!(ak.adjoint(), *ak);
        }
        assert!(alpha::<f64>(0).is_err());
        assert!(alpha::<f64>(4).is_err());
    }

    #[test]
    fn expm_of_diagonal_and_nilpotent() {
        let d = M::diagonal([
            Complex::new(1.0, 0.0),
            Complex::new(0.0, 2.0),
            Complex::new(-3.0, 0.0),
            Complex::new(0.5, -0.5),
        ]);
        let e = d.expm();
        for i in 0..4 {
            assert!((e.0[i][i] - d.0[i][i].exp()).norm() < 1e-13 * e.0[i][i].norm().max(1.0));
        }
        let mut n = M::zero();
        n.0[0][1] = Complex::new(2.0, 0.0);
        let e = n.expm();
        assert!((e.0[0][1] - Complex::new(2.0, 0.0)).norm() < 1e-15);
        assert!((e.0[0][0] - Complex::new(1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn rotor_zero_params_is_identity() {
        let l = lorentz_rotor(&RotorParams::<f64>::default()).unwrap();
        assert!(l.max_abs_diff(&M::identity()) < 1e-15);
        let inv = rotor_inverse(&M::identity()).unwrap();
        assert!(inv.max_abs_diff(&M::identity()) < 1e-15);
    }

    #[test]
    fn pure_boost_is_a_member() {
        let l = lorentz_rotor(&RotorParams::boost(0, 0.3)).unwrap();
        assert!(rotor_membership_residue(&l) < 1e-12);
        let inv = rotor_inverse(&l).unwrap();
        assert!((l * inv).max_abs_diff(&M::identity()) < 1e-12);
    }

    #[test]
    fn boost_inverse_is_opposite_boost() {
        let l = lorentz_rotor(&RotorParams::boost(0, 0.5)).unwrap();
        let lm = lorentz_rotor(&RotorParams::boost(0, -0.5)).unwrap();
        assert!(rotor_inverse(&l).unwrap().max_abs_diff(&lm) < 1e-12);
    }

    #[test]
    fn quarter_turn_rotation() {
        let l = lorentz_rotor(&RotorParams::rotation(2, std::f64::consts::FRAC_PI_2)).unwrap();
        let inv = rotor_inverse(&l).unwrap();
        assert!((l * inv).max_abs_diff(&M::identity()) < 1e-12);
        assert!((inv * l).max_abs_diff(&M::identity()) < 1e-12);
        // rotates x into y
        let u = transform_vector(&l, &[0.0, 1.0, 0.0, 0.0]).unwrap();
        assert!((u[1]).abs() < 1e-12 && (u[2].abs() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn non_rotor_is_rejected() {
        let m = M::identity().scale_re(2.0);
        assert!(matches!(rotor_inverse(&m), Err(Error::InvalidRotor { .. })));
    }

    #[test]
    fn boost_of_rest_vector() {
        let eta = 0.7f64;
        let l = lorentz_rotor(&RotorParams::boost(0, eta)).unwrap();
        let u = transform_vector(&l, &[1.0, 0.0, 0.0, 0.0]).unwrap();
        let expected = [eta.cosh(), eta.sinh(), 0.0, 0.0];
        for k in 0..4 {
            assert!((u[k] - expected[k]).abs() < 1e-12, "{u:?}");
        }
        // u = L L† γ^0 for the rest frame vector
        let g0 = gamma::<f64>(0).unwrap();
        assert!((l * l.adjoint() * g0).max_abs_diff(&slash(&u)) < 1e-12);
    }

    #[test]
    fn identity_rotor_leaves_vectors() {
        let u = [0.3, -1.2, 2.0, 0.1];
        let v = transform_vector(&M::identity(), &u).unwrap();
        for k in 0..4 {
            assert!((u[k] - v[k]).abs() < 1e-15);
        }
    }

    #[test]
    fn single_precision_rotor() {
        let l = lorentz_rotor(&RotorParams::<f32>::boost(1, 0.4)).unwrap();
        assert!(rotor_membership_residue(&l) < 1e-5);
    }
}
