//! Exact reduction of sums-of-cubes Diophantine equations to elliptic curves,
//! and back to verified integer identities.
//!
//! The usual flow is [`Problem`] -> [`Pipeline`] -> curve point ->
//! [`RationalSolution`] -> [`IntegerSolution`]. All arithmetic is exact.

pub mod corpus;
pub mod error;
mod factor;
pub mod integerize;
pub mod pipeline;
pub mod quartic;
pub mod rational;
pub mod reduction;
pub mod weierstrass;

pub use error::{Error, Result};
pub use integerize::{minimal_scale, scale_to_integers, verify, CanonicalForm, Identity, IntTerm, IntegerSolution};
pub use pipeline::{MultipleOutcome, Pipeline, Problem, QuarticRoute};
pub use quartic::{Quartic, QuarticPoint, QuarticToCubic};
pub use rational::{p_adic_valuation, rational_sqrt, Rational};
pub use reduction::{CubesFifthsParams, DeProblem, RationalSolution, Term};
pub use weierstrass::{CompletedSquare, CurvePoint, LongWeierstrass};
