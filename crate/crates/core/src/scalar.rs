//! Floating-point scalar abstraction.
//!
//! All device and front-end math is generic over [`Real`] so the same
//! model runs in `f32` or `f64`; the crate root exports `f64` aliases.

use rand::Rng;
use rand_distr::{Exp1, StandardNormal};

/// Scalar type the simulation runs on: `f32` or `f64`.
pub trait Real:
    num_traits::Float
    + num_traits::FromPrimitive
    + num_traits::ToPrimitive
    + core::ops::AddAssign
    + core::ops::SubAssign
    + core::ops::MulAssign
    + core::iter::Sum
    + core::fmt::Debug
    + core::fmt::Display
    + Send
    + Sync
    + 'static
{
    /// Conversion for literals and configuration values.
    fn of(v: f64) -> Self;

    fn as_f64(self) -> f64;

    /// One draw from N(0, 1).
    fn standard_normal<R: Rng + ?Sized>(rng: &mut R) -> Self;

    /// One draw from Exp(1).
    fn standard_exp<R: Rng + ?Sized>(rng: &mut R) -> Self;

    /// Uniform draw in `[0, 1)`.
    fn unit_uniform<R: Rng + ?Sized>(rng: &mut R) -> Self;
}

impl Real for f64 {
    fn of(v: f64) -> Self {
        v
    }

    fn as_f64(self) -> f64 {
        self
    }

    fn standard_normal<R: Rng + ?Sized>(rng: &mut R) -> Self {
        rng.sample(StandardNormal)
    }

    fn standard_exp<R: Rng + ?Sized>(rng: &mut R) -> Self {
        rng.sample(Exp1)
    }

    fn unit_uniform<R: Rng + ?Sized>(rng: &mut R) -> Self {
        rng.gen()
    }
}

impl Real for f32 {
    fn of(v: f64) -> Self {
        v as f32
    }

    fn as_f64(self) -> f64 {
        self as f64
    }

    fn standard_normal<R: Rng + ?Sized>(rng: &mut R) -> Self {
        rng.sample(StandardNormal)
    }

    fn standard_exp<R: Rng + ?Sized>(rng: &mut R) -> Self {
        rng.sample(Exp1)
    }

    fn unit_uniform<R: Rng + ?Sized>(rng: &mut R) -> Self {
        rng.gen()
    }
}
