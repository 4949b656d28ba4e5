//! Scalar abstraction.
//!
//! Every numerical routine in the crate is written against [`Real`], with
//! implementations for `f32` and `f64`. Tolerances are part of the scalar
//! type: single precision cannot resolve the `1e-12` identities that hold in
//! double precision, so each scalar carries its own tolerance ladder.

use nalgebra::RealField;
use num_traits::{FromPrimitive, ToPrimitive};
use serde::{de::DeserializeOwned, Serialize};
use std::fmt::{Debug, Display, LowerExp};

pub trait Real:
    RealField
    + Copy
    + FromPrimitive
    + ToPrimitive
    + Default
    + Display
    + Debug
    + LowerExp
    + Serialize
    + DeserializeOwned
    + 'static
{
    /// Tolerance for exact algebraic identities (traces, hermiticity, Choi equality).
    const ALGEBRA_TOL: f64;
    /// Tolerance for equalities obtained through an eigen/singular-value decomposition.
    const DECOMPOSITION_TOL: f64;
    /// Tolerance for trace preservation of Kraus families and unitarity checks.
    const CHANNEL_TOL: f64;
    /// Eigenvalues within this distance of zero are treated as zero.
    const TIE_TOL: f64;

    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal representable in scalar type")
    }

    fn from_count(n: usize) -> Self {
        Self::from_usize(n).expect("count representable in scalar type")
    }

    fn as_f64(self) -> f64 {
        self.to_f64().expect("scalar converts to f64")
    }

    fn algebra_tol() -> Self {
        Self::lit(Self::ALGEBRA_TOL)
    }

    fn decomposition_tol() -> Self {
        Self::lit(Self::DECOMPOSITION_TOL)
    }

    fn channel_tol() -> Self {
        Self::lit(Self::CHANNEL_TOL)
    }

    fn tie_tol() -> Self {
        Self::lit(Self::TIE_TOL)
    }
}

impl Real for f64 {
    const ALGEBRA_TOL: f64 = 1e-12;
    const DECOMPOSITION_TOL: f64 = 1e-9;
    const CHANNEL_TOL: f64 = 1e-10;
    const TIE_TOL: f64 = 1e-10;
}

impl Real for f32 {
    const ALGEBRA_TOL: f64 = 2e-5;
    const DECOMPOSITION_TOL: f64 = 1e-4;
    const CHANNEL_TOL: f64 = 5e-5;
    const TIE_TOL: f64 = 5e-5;
}
