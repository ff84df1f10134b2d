//! Metric projections onto balls, coordinate cylinders, coordinate subspaces
//! and positive cones in weighted ℓ_p spaces, with closed-form Fréchet
//! derivatives and Fréchet coderivatives, and sampling oracles that check
//! every closed form independently.

pub mod coderivative;
pub mod coverage;
pub mod decomposition;
pub mod error;
pub mod harness;
pub mod oracle;
pub mod projections;
pub mod smooth;
pub mod space;

pub use error::{Error, Result};
pub use space::{Dual, LpSpace, Primal};
