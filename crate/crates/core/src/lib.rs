//! Dependently-typed higher-order logic with Hilbert's choice operator.
//!
//! The crate type-checks DHOL theories under the strong or weak choice rule,
//! reifying every undecidable step as a HOL [`kernel::Obligation`]; translates
//! DHOL to HOL via the strong and weak erasures; prints TPTP THF; and checks
//! HOL statements against small finite models.

pub mod bridge;
pub mod cli;
pub mod corpus;
pub mod erasure;
pub mod kernel;
pub mod oracle;
pub mod syntax;
