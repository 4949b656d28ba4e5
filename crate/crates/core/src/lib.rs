//! Witnesses of non-classicality for a system coupled to an environment.
//!
//! A [`Scenario`] fixes the initial system state, the environment state, the
//! joint unitaries before and after the interruption time, a final effect and
//! a preferred basis. Interrupting it four ways gives the probabilities
//! `P1..P4`, whose differences are the witnesses `W^a`, `W^b` and `W^c`.
//!
//! All numerics are generic over [`Real`] (`f32` or `f64`). The aliases at
//! the crate root fix the scalar to `f64`.

pub mod channel;
pub mod error;
pub mod linalg;
pub mod optimize;
pub mod real;
pub mod scenarios;
pub mod state;
pub mod verify;
pub mod witness;

pub use channel::{Interruption, InterruptionKind, KrausChannel};
pub use error::{Error, Result};
pub use linalg::{BipartiteLayout, ComplexMatrix, Subsystem};
pub use optimize::{Optimum, SearchConfig};
pub use real::Real;
pub use scenarios::{NamedScenario, PartialSummationTrace};
pub use state::{DensityMatrix, Effect, PreferredBasis};
pub use witness::{Scenario, WitnessReport};

pub type Matrix64 = ComplexMatrix<f64>;
pub type State64 = DensityMatrix<f64>;
pub type Effect64 = Effect<f64>;
pub type Channel64 = KrausChannel<f64>;
pub type Scenario64 = Scenario<f64>;
pub type Report64 = WitnessReport<f64>;
pub type Named64 = NamedScenario<f64>;

pub type Matrix32 = ComplexMatrix<f32>;
pub type State32 = DensityMatrix<f32>;
pub type Scenario32 = Scenario<f32>;
