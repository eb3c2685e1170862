//! Mod p reduction of two-dimensional crystalline representations of
//! `Gal(Q̄_p/Q_p)`, computed through the compact induction model of the mod p
//! Langlands correspondence and exact elimination over `R/p^N`.

pub mod engine;
pub mod error;
pub mod linalg;
pub mod padic;
pub mod symm;
pub mod tree;

pub use engine::{compute_reduction, constancy, ConstancyReport, GaloisRep, JhSet, Limits, Mode, Reduction, SmoothRepFactor, StepOutcome, StepReport};
pub use error::{Error, Result};

pub type Rational = num_rational::Ratio<i64>;
