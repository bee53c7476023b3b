//! External fields: scalar potential `A⁰(t,x)`, vector potential `A^k(t,x)`
//! and the mass profile `m(x)`, with the charge absorbed.

use std::fmt;
use std::sync::Arc;

use crate::scalar::Real;

pub type FieldFn<T> = Arc<dyn Fn(T, T) -> T + Send + Sync>;

/// A scalar function of `(t, x)`.
#[derive(Clone)]
pub enum Profile<T> {
    Zero,
    Constant(T),
    /// `height (1 + tanh[steepness (x - center)]) / 2`
    TanhStep { height: T, center: T, steepness: T },
    /// `height/2 (tanh[steepness (x + half_width)] + tanh[steepness (half_width - x)])`
    TanhBarrier { height: T, half_width: T, steepness: T },
    /// `base + curvature x²`
    Quadratic { base: T, curvature: T },
    /// Arbitrary `f(t, x)`; derivatives by central differences.
    Custom { f: FieldFn<T>, time_dependent: bool },
}

impl<T: Real> Profile<T> {
    pub fn custom(f: impl Fn(T, T) -> T + Send + Sync + 'static, time_dependent: bool) -> Self {
        Profile::Custom { f: Arc::new(f), time_dependent }
    }

    pub fn eval(&self, t: T, x: T) -> T {
        let half = T::lit(0.5);
        match self {
            Profile::Zero => T::zero(),
            Profile::Constant(c) => *c,
            Profile::TanhStep { height, center, steepness } => {
                *height * (T::one() + (*steepness * (x - *center)).tanh()) * half
            }
            Profile::TanhBarrier { height, half_width, steepness } => {
                *height
                    * half
                    * ((*steepness * (x + *half_width)).tanh()
                        + (*steepness * (*half_width - x)).tanh())
            }
            Profile::Quadratic { base, curvature } => *base + *curvature * x * x,
            Profile::Custom { f, .. } => f(t, x),
        }
    }

    /// `∂f/∂x`
    pub fn dx(&self, t: T, x: T) -> T {
        let half = T::lit(0.5);
        let sech2 = |u: T| {
            let c = u.cosh();
            T::one() / (c * c)
        };
        match self {
            Profile::Zero | Profile::Constant(_) => T::zero(),
            Profile::TanhStep { height, center, steepness } => {
                *height * *steepness * sech2(*steepness * (x - *center)) * half
            }
            Profile::TanhBarrier { height, half_width, steepness } => {
                *height
                    * half
                    * *steepness
                    * (sech2(*steepness * (x + *half_width)) - sech2(*steepness * (*half_width - x)))
            }
            Profile::Quadratic { curvature, .. } => T::lit(2.0) * *curvature * x,
            Profile::Custom { f, .. } => {
                let h = T::epsilon().cbrt() * T::one().max(x.abs());
                (f(t, x + h) - f(t, x - h)) / (h + h)
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, Profile::Zero)
    }

    pub fn is_time_dependent(&self) -> bool {
        matches!(self, Profile::Custom { time_dependent: true, .. })
    }
}

impl<T: fmt::Debug> fmt::Debug for Profile<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Profile::Zero => write!(f, "Zero"),
            Profile::Constant(c) => write!(f, "Constant({c:?})"),
            Profile::TanhStep { height, center, steepness } => write!(
                f,
                "TanhStep {{ height: {height:?}, center: {center:?}, steepness: {steepness:?} }}"
            ),
            Profile::TanhBarrier { height, half_width, steepness } => write!(
                f,
                "TanhBarrier {{ height: {height:?}, half_width: {half_width:?}, steepness: {steepness:?} }}"
            ),
            Profile::Quadratic { base, curvature } => {
                write!(f, "Quadratic {{ base: {base:?}, curvature: {curvature:?} }}")
            }
            Profile::Custom { time_dependent, .. } => {
                write!(f, "Custom {{ time_dependent: {time_dependent} }}")
            }
        }
    }
}

/// Electromagnetic potentials and mass profile.
///
/// `baseline_mass` is the constant part of the mass; only it may enter the
/// kinetic exponential, the remainder `m(x) - baseline` always goes to the
/// potential step.
#[derive(Clone, Debug)]
pub struct Potential<T> {
    pub a0: Profile<T>,
    pub a_vec: [Profile<T>; 3],
    pub mass: Profile<T>,
    pub baseline_mass: T,
}

impl<T: Real> Potential<T> {
    pub fn free(m: T) -> Self {
        Self {
            a0: Profile::Zero,
            a_vec: [Profile::Zero, Profile::Zero, Profile::Zero],
            mass: Profile::Constant(m),
            baseline_mass: m,
        }
    }

    /// `A⁰ = height (1 + tanh[4(x - center)]) / 2`
    pub fn klein_step(m: T, height: T, center: T) -> Self {
        Self {
            a0: Profile::TanhStep { height, center, steepness: T::lit(4.0) },
            ..Self::free(m)
        }
    }

    /// `A⁰ = height/2 (tanh[4(x + w)] + tanh[4(w - x)])`
    pub fn klein_barrier(m: T, height: T, half_width: T) -> Self {
        Self {
            a0: Profile::TanhBarrier { height, half_width, steepness: T::lit(4.0) },
            ..Self::free(m)
        }
    }

    /// `m(x) = m + curvature x²`
    pub fn mass_modulated(m: T, curvature: T) -> Self {
        Self { mass: Profile::Quadratic { base: m, curvature }, ..Self::free(m) }
    }

    pub fn a0(&self, t: T, x: T) -> T {
        self.a0.eval(t, x)
    }

    pub fn a_vec(&self, t: T, x: T) -> [T; 3] {
        [
            self.a_vec[0].eval(t, x),
            self.a_vec[1].eval(t, x),
            self.a_vec[2].eval(t, x),
        ]
    }

    pub fn mass(&self, t: T, x: T) -> T {
        self.mass.eval(t, x)
    }

    pub fn is_static(&self) -> bool {
        !(self.a0.is_time_dependent()
            || self.a_vec.iter().any(Profile::is_time_dependent)
            || self.mass.is_time_dependent())
    }

    /// True when only `A¹` can be nonzero, so every exponential stays in
    /// the algebra spanned by `1, β, α¹, βα¹`.
    pub fn is_planar(&self) -> bool {
        self.a_vec[1].is_zero() && self.a_vec[2].is_zero()
    }
}
