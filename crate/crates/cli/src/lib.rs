//! Table, figure and verification commands behind the `copula-risk` binary.

pub mod format;
pub mod portfolio;
pub mod tables;
pub mod verify;

pub use portfolio::{Dist, PortfolioSpec};
