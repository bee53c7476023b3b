//! Closed-form 4×4 exponentials of the kinetic and potential generators.
//!
//! `K = α¹p₁ + α²p₂ + μβ` squares to `F² = p₁² + p₂² + μ²`, so
//! `exp(-i s dt K) = cos(dt F) - i s sin(dt F)/F · K`. In the Dirac
//! representation the nonzero entries are
//!
//! ```text
//! K₁₁ = K₂₂ = cos - i s μ sin/F        K₃₃ = K₄₄ = cos + i s μ sin/F
//! K₁₄ = K₃₂ = -i s sin/F (p₁ - i p₂)   K₂₃ = K₄₁ = -i s sin/F (p₁ + i p₂)
//! ```
//!
//! (one-based indices). The potential generator `V = A⁰ - α·A + μβ`
//! factors the same way with `G = √(|A|² + μ²)` and an overall phase.

use num_complex::Complex;

use crate::clifford::{alphas, gamma, Matrix4};
use crate::scalar::{cis, Real};

/// `(cos(dt F), sin(dt F)/F)` with the `F → 0` limit handled.
fn cos_sinc<T: Real>(dt: T, f: T) -> (T, T) {
    let u = dt * f;
    let sinc = if u.abs() < T::lit(1e-4) {
        dt * (T::one() - u * u / T::lit(6.0))
    } else {
        u.sin() / f
    };
    (u.cos(), sinc)
}

/// `exp(-i sign dt K)` with `K = α¹p₁ + α²p₂ + μβ` for an explicit mass
/// term `mu`.
pub fn kinetic_exponential_with_mass_term<T: Real>(
    p1: T,
    p2: T,
    mu: T,
    dt: T,
    sign: T,
) -> Matrix4<T> {
    let f = (p1 * p1 + p2 * p2 + mu * mu).sqrt();
    let (c, sinc) = cos_sinc(dt, f);
    let g = Complex::new(T::zero(), -sign * sinc);
    let q = Complex::new(p1, -p2);
    let z = Complex::new(T::zero(), T::zero());
    let d_up = Complex::from(c) + g * mu;
    let d_dn = Complex::from(c) - g * mu;
    Matrix4([
        [d_up, z, z, g * q],
        [z, d_up, g * q.conj(), z],
        [z, g * q, d_dn, z],
        [g * q.conj(), z, z, d_dn],
    ])
}

/// `exp(-i sign dt K)` with `K = α¹p₁ + α²p₂ + (m/2)β`: the kinetic half
/// of the mass term.
pub fn kinetic_exponential<T: Real>(p1: T, p2: T, m: T, dt: T, sign: T) -> Matrix4<T> {
    kinetic_exponential_with_mass_term(p1, p2, m * T::lit(0.5), dt, sign)
}

/// `exp(-i sign dt V)` with `V = a0 - α·A + mu β`.
pub fn potential_exponential<T: Real>(
    a0: T,
    a_vec: [T; 3],
    mu: T,
    dt: T,
    sign: T,
) -> Matrix4<T> {
    let g2 = a_vec.iter().fold(mu * mu, |acc, &a| acc + a * a);
    let (c, sinc) = cos_sinc(dt, g2.sqrt());
    let al = alphas::<T>();
    let beta = gamma::<T>(0).expect("valid index");
    let mut w = beta.scale_re(mu);
    for k in 0..3 {
        w = w - al[k].scale_re(a_vec[k]);
    }
    let rot = Matrix4::identity().scale_re(c) + w.scale(Complex::new(T::zero(), -sign * sinc));
    rot.scale(cis(-sign * a0 * dt))
}

/// An element of the algebra spanned by `1, β, α¹, βα¹`: the same 2×2
/// block `[[a, b], [c, d]]` acting on the component pairs (0, 3) and (1, 2).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PlaneOp<T> {
    pub a: Complex<T>,
    pub b: Complex<T>,
    pub c: Complex<T>,
    pub d: Complex<T>,
}

/// Row/column index pairs the plane blocks act on.
pub(crate) const PAIRS: [[usize; 2]; 2] = [[0, 3], [1, 2]];

impl<T: Real> PlaneOp<T> {
    pub fn identity() -> Self {
        let o = Complex::new(T::one(), T::zero());
        let z = Complex::new(T::zero(), T::zero());
        Self { a: o, b: z, c: z, d: o }
    }

    /// `exp(-i sign dt (h0 + [[mu, q], [q, -mu]]))` with real `q`.
    pub fn exponential(h0: T, q: T, mu: T, dt: T, sign: T) -> Self {
        let (c, sinc) = cos_sinc(dt, q.hypot(mu));
        let phase = cis(-sign * h0 * dt);
        let g = Complex::new(T::zero(), -sign * sinc);
        let cc = Complex::from(c);
        Self {
            a: (cc + g * mu) * phase,
            b: g * q * phase,
            c: g * q * phase,
            d: (cc - g * mu) * phase,
        }
    }

    /// Kinetic exponential at momentum `p` (one dimension).
    pub fn kinetic(p: T, mu: T, dt: T, sign: T) -> Self {
        Self::exponential(T::zero(), p, mu, dt, sign)
    }

    /// Potential exponential with `A = (a1, 0, 0)`.
    pub fn potential(a0: T, a1: T, mu: T, dt: T, sign: T) -> Self {
        Self::exponential(a0, -a1, mu, dt, sign)
    }

    pub fn scale(self, s: T) -> Self {
        Self { a: self.a * s, b: self.b * s, c: self.c * s, d: self.d * s }
    }

    pub fn to_matrix(&self) -> Matrix4<T> {
        let mut m = Matrix4::zero();
        for pair in PAIRS {
            m.0[pair[0]][pair[0]] = self.a;
            m.0[pair[0]][pair[1]] = self.b;
            m.0[pair[1]][pair[0]] = self.c;
            m.0[pair[1]][pair[1]] = self.d;
        }
        m
    }
}

/// The four 2×2 blocks of a matrix under the plane pairs, as a bit set
/// `1 << (2 r + s)` for row pair `r`, column pair `s`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BlockMask(pub u8);

impl BlockMask {
    pub const ALL: BlockMask = BlockMask(0b1111);

    pub fn from_components(bits: u16) -> Self {
        let mut out = 0u8;
        for r in 0..2 {
            for s in 0..2 {
                let hit = PAIRS[r]
                    .iter()
                    .any(|&i| PAIRS[s].iter().any(|&j| bits & (1 << (4 * i + j)) != 0));
                if hit {
                    out |= 1 << (2 * r + s);
                }
            }
        }
        BlockMask(out)
    }
}

/// `m ← l · m · r` restricted to the active blocks; blocks outside the
/// mask must be zero and stay zero.
#[inline]
pub fn sandwich_plane<T: Real>(l: &PlaneOp<T>, m: &mut Matrix4<T>, r: &PlaneOp<T>, mask: BlockMask) {
    for rp in 0..2 {
        for sp in 0..2 {
            if mask.0 & (1 << (2 * rp + sp)) == 0 {
                continue;
            }
            let [i0, i1] = PAIRS[rp];
            let [j0, j1] = PAIRS[sp];
            let (m00, m01, m10, m11) = (m.0[i0][j0], m.0[i0][j1], m.0[i1][j0], m.0[i1][j1]);
            // l · block
            let t00 = l.a * m00 + l.b * m10;
            let t01 = l.a * m01 + l.b * m11;
            let t10 = l.c * m00 + l.d * m10;
            let t11 = l.c * m01 + l.d * m11;
            // · r
            m.0[i0][j0] = t00 * r.a + t01 * r.c;
            m.0[i0][j1] = t00 * r.b + t01 * r.d;
            m.0[i1][j0] = t10 * r.a + t11 * r.c;
            m.0[i1][j1] = t10 * r.b + t11 * r.d;
        }
    }
}

/// `ψ ← op ψ` for a single spinor.
#[inline]
pub fn apply_plane<T: Real>(op: &PlaneOp<T>, v: &mut [Complex<T>; 4]) {
    for [i, j] in PAIRS {
        let (x, y) = (v[i], v[j]);
        v[i] = op.a * x + op.b * y;
        v[j] = op.c * x + op.d * y;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    fn dense_kinetic(p1: f64, p2: f64, mu: f64, dt: f64, sign: f64) -> Matrix4<f64> {
        let al = alphas::<f64>();
        let k = al[0].scale_re(p1) + al[1].scale_re(p2) + gamma::<f64>(0).unwrap().scale_re(mu);
        k.scale(Complex::new(0.0, -sign * dt)).expm()
    }

    #[test]
    fn rest_frame_kinetic_example() {
        let e = kinetic_exponential(0.0, 0.0, 1.0, 0.01, 1.0);
        let want = Matrix4::diagonal([
            cis(-0.005),
            cis(-0.005),
            cis(0.005),
            cis(0.005),
        ]);
        assert!(e.max_abs_diff(&want) < 1e-15);
        let id = kinetic_exponential(1.3, -0.4, 1.0, 0.0, 1.0);
        assert!(id.max_abs_diff(&Matrix4::identity()) < 1e-15);
    }

    #[test]
    fn kinetic_matches_dense_oracle() {
        let e = kinetic_exponential(1.3, -0.4, 1.0, 0.01, 1.0);
        assert!(e.max_abs_diff(&dense_kinetic(1.3, -0.4, 0.5, 0.01, 1.0)) < 1e-12);
        let mut rng = StdRng::seed_from_u64(7);
        for _ in 0..200 {
            let (p1, p2, mu) = (rng.gen_range(-20.0..20.0), rng.gen_range(-5.0..5.0), rng.gen_range(0.0..3.0));
            let dt = rng.gen_range(0.0..0.1);
            let s = if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
            let a = kinetic_exponential_with_mass_term(p1, p2, mu, dt, s);
            assert!(a.max_abs_diff(&dense_kinetic(p1, p2, mu, dt, s)) < 1e-12);
            assert!((a * a.adjoint()).max_abs_diff(&Matrix4::identity()) < 1e-13);
        }
    }

    #[test]
    fn potential_examples() {
        let a = potential_exponential(0.0, [0.0; 3], 0.5, 0.01, 1.0);
        assert!(a.max_abs_diff(&kinetic_exponential(0.0, 0.0, 1.0, 0.01, 1.0)) < 1e-15);
        let b = potential_exponential(10.0, [0.0; 3], 0.5, 0.01, 1.0);
        assert!(b.max_abs_diff(&a.scale(cis(-0.1))) < 1e-15);
    }

    #[test]
    fn plane_ops_match_dense() {
        let mut rng = StdRng::seed_from_u64(11);
        for _ in 0..100 {
            let (p, mu, dt) = (rng.gen_range(-20.0..20.0), rng.gen_range(0.0..2.0), 0.01);
            let k = PlaneOp::kinetic(p, mu, dt, -1.0).to_matrix();
            assert!(k.max_abs_diff(&kinetic_exponential_with_mass_term(p, 0.0, mu, dt, -1.0)) < 1e-14);
            let (a0, a1) = (rng.gen_range(-10.0..10.0), rng.gen_range(-3.0..3.0));
            let v = PlaneOp::potential(a0, a1, mu, dt, 1.0).to_matrix();
            assert!(v.max_abs_diff(&potential_exponential(a0, [a1, 0.0, 0.0], mu, dt, 1.0)) < 1e-14);
        }
    }

    #[test]
    fn sandwich_matches_dense_products() {
        let mut rng = StdRng::seed_from_u64(3);
        let l = PlaneOp::potential(1.0, 0.3, 0.5, 0.1, 1.0).scale(0.9);
        let r = PlaneOp::kinetic(2.0, 0.5, 0.1, -1.0);
        let m0 = Matrix4::from_fn(|_, _| Complex::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
        let mut m = m0;
        sandwich_plane(&l, &mut m, &r, BlockMask::ALL);
        let want = l.to_matrix() * m0 * r.to_matrix();
        assert!(m.max_abs_diff(&want) < 1e-14);

        // a single active block stays isolated
        let mut only = Matrix4::zero();
        for i in [0, 3] {
            for j in [0, 3] {
                only.0[i][j] = m0.0[i][j];
            }
        }
        let mask = BlockMask::from_components(0b1001_0000_0000_1001);
        assert_eq!(mask, BlockMask(1));
        let mut a = only;
        sandwich_plane(&l, &mut a, &r, mask);
        assert!(a.max_abs_diff(&(l.to_matrix() * only * r.to_matrix())) < 1e-14);
    }
}
