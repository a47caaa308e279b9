//! Exact symbolic toolkit for ordinal-built scattered spaces.
//!
//! * [`ordinal`]: Cantor normal form arithmetic below ε_ω.
//! * [`strata`]: definable subsets of an ordinal interval and their
//!   Cantor-Bendixson derivatives, in closed form.
//! * [`region`]: subsets of a product of two ordinal intervals, with an exact
//!   finite-stage derivative oracle.
//! * [`duality`]: finite posets, final-segment lattices, prime filters and free
//!   Boolean algebras.
//! * [`spaceterm`]: symbolic terms for spaces with rank and unitarity rules.
//! * [`construct`]: partial-sum clubs, the X(C) spaces and rank spectra.
//! * [`classify`]: closed sublattices of a square of ordinal intervals.
//! * [`suite`]: the property suites behind `plank suite all`.

pub mod classify;
pub mod construct;
pub mod duality;
pub mod error;
pub mod ordinal;
pub mod region;
pub mod spaceterm;
pub mod strata;
pub mod suite;

mod parse;

pub use error::{Error, Result};
pub use ordinal::{ord, Ordinal};
pub use region::{Piece, Region, Rel};
pub use spaceterm::SpaceTerm;
pub use strata::{Bound, StrataSet};

