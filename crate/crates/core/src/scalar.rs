//! Real scalar abstraction shared by every module.
//!
//! All numerics are written against [`Real`], so the same code runs in `f64`
//! (the default, used for every tolerance quoted in the docs) or `f32`.

use nalgebra::{Complex, RealField};
use num_traits::ToPrimitive;

/// A real floating-point scalar usable as the field of the complex matrices.
pub trait Real: RealField + Copy + ToPrimitive {
    /// Unit roundoff of the type.
    fn machine_epsilon() -> Self;

    /// Converts an `f64` literal into the scalar type.
    fn lit(x: f64) -> Self;

    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    /// A tolerance of `target`, raised to a small multiple of the machine
    /// epsilon when the type cannot resolve `target`.
    fn tol(target: f64) -> Self {
        let floor = Self::machine_epsilon() * Self::lit(64.0);
        let t = Self::lit(target);
        if t > floor {
            t
        } else {
            floor
        }
    }
}

impl Real for f64 {
    fn machine_epsilon() -> Self {
        f64::EPSILON
    }

    fn lit(x: f64) -> Self {
        x
    }
}

impl Real for f32 {
    fn machine_epsilon() -> Self {
        f32::EPSILON
    }

    fn lit(x: f64) -> Self {
        x as f32
    }
}

/// `e^{i theta}`.
pub fn cis<T: Real>(theta: T) -> Complex<T> {
    Complex::new(theta.cos(), theta.sin())
}

pub fn real<T: Real>(x: T) -> Complex<T> {
    Complex::new(x, T::zero())
}

pub fn modulus<T: Real>(z: Complex<T>) -> T {
    z.norm_sqr().sqrt()
}
