//! Exact-arithmetic toolkit for extremal momentum profiles on fibre bundles.
//!
//! The crate is organized bottom-up:
//!
//! - [`rat`] / [`poly`]: exact rational scalars, intervals, and dense
//!   polynomials;
//! - [`roots`]: Sturm chains, square-free decomposition, certified root
//!   isolation, and sign analysis on an interval;
//! - [`quad`]: deterministic composite Gauss-Legendre quadrature;
//! - [`admissible`]: admissible classes, their moments, and the extremal
//!   polynomial `F` solving the fourth-order fibre ODE;
//! - [`classify`]: the existence trichotomy, properness constants, and
//!   singularity labelling of the momentum profile;
//! - [`energy`]: the Mabuchi-type energy, linear functional, Calabi energy,
//!   and the explicit degeneration sequences;
//! - [`tf`]: the one-factor (ruled-surface) case study in closed form.

// Error variants carry exact rational context (arbitrary-precision payloads);
// boxing them would complicate every fallible signature for a cold path.
#![allow(clippy::result_large_err)]

pub mod admissible;
pub mod classify;
pub mod energy;
pub mod poly;
pub mod quad;
pub mod rat;
pub mod roots;
pub mod tf;

pub use poly::{PolyError, RatPoly};
pub use rat::{rat, Rat, RatInterval};
