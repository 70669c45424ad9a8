//! Exact arithmetic for multivariate Hahn polynomials on polyhedral lattice
//! domains, their limiting families, and the commuting difference operators
//! diagonalized by them.

pub mod domains;
pub mod error;
pub mod exact;
pub mod families;
pub mod limits;
pub mod operators;
pub mod poly;
pub mod sparse;
pub mod spectra;
pub mod verify;

pub use domains::{check_admissible, enumerate_h, enumerate_v, DomainSpec, IndexSet, LatticeDomain};
pub use error::{Error, Result};
pub use exact::{parse_rational, MultiIndex, Rational};
