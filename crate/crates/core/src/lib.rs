//! Bi-criteria asymmetric TSP: exact Pareto sets, an NSGA-II approximation
//! and Pareto set reduction from information on relative criterion
//! importance.

pub mod dominance;
pub mod error;
pub mod exact;
pub mod instance;
pub mod metrics;
pub mod moga;
pub mod reduction;

pub use dominance::{dominates, pareto_filter, Front, FrontEntry};
pub use error::{Error, Result};
pub use instance::{Criterion, Instance, ObjectiveVector, Tour};
