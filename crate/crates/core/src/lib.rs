pub mod basis;
pub mod cli;
pub mod coeff;
pub mod derivation;
pub mod error;
pub mod expr;
pub mod freudenburg;
pub mod frob;
pub mod jac;
mod linalg;
pub mod mpoly;
pub mod oracle;

pub use coeff::{CoeffK, KKind, Prime};
pub use error::{Error, Result};
pub use mpoly::{MPoly, Monomial, Ring};
