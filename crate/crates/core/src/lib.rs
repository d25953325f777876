//! Recovery and identity testing of hidden monic polynomials over prime
//! fields, given only an oracle for `f(x)^e`.
//!
//! ```
//! use hidden_power::interp::{randomized_interpolate, InterpConfig};
//! use hidden_power::{FieldCtx, LocalOracle, MonicPoly};
//!
//! let ctx = FieldCtx::new(13, 3).unwrap();
//! let oracle = LocalOracle::new(ctx, MonicPoly::parse(&ctx, "[1]").unwrap()).unwrap();
//! let res = randomized_interpolate(&oracle, &InterpConfig::new(1, 0.01, 7)).unwrap();
//! assert_eq!(res.candidate.coeff_values(), [1]);
//! ```
//!
//! The guide in `book/` walks through each module; its code blocks are
//! compiled and run as doctests of this crate.

pub mod error;
pub mod ff;
pub mod group;
pub mod idtest;
pub mod interp;
pub mod oracle;
pub mod poly;
pub mod ratio;
pub mod report;
pub mod stats;

pub use error::{Error, Result};
pub use ff::{Felt, FieldCtx};
pub use group::SubgroupCtx;
pub use oracle::{LocalOracle, PowerOracle, RemoteOracle};
pub use poly::MonicPoly;
pub use ratio::Ratio;

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/fields.md")]
    mod fields {}
    #[doc = include_str!("../../../book/src/polynomials.md")]
    mod polynomials {}
    #[doc = include_str!("../../../book/src/roots.md")]
    mod roots {}
    #[doc = include_str!("../../../book/src/oracles.md")]
    mod oracles {}
    #[doc = include_str!("../../../book/src/identity.md")]
    mod identity {}
    #[doc = include_str!("../../../book/src/interpolation.md")]
    mod interpolation {}
    #[doc = include_str!("../../../book/src/experiments.md")]
    mod experiments {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
