//! Temporal constraint satisfaction and the promise templates built from it.
//!
//! Finite relational structures ([`relcore`]), orbit-level temporal relations
//! ([`temporal`]), exact linear algebra ([`exactlin`]), consistency engines
//! ([`consistency`]), linear relaxations ([`relax`]), the uniform temporal solver
//! ([`tempsolve`]), power constructions ([`powfun`]) and minor conditions
//! ([`minorcond`]). [`formats`] holds the JSON file formats and [`repro`] the
//! reproduction suite shared by the acceptance tests and the command line.

pub mod caps;
pub mod consistency;
pub mod csp;
pub mod error;
pub mod exactlin;
pub mod formats;
pub mod gen;
pub mod minorcond;
pub mod par;
pub mod powfun;
pub mod relax;
pub mod relcore;
pub mod repro;
pub mod tempsolve;
pub mod temporal;

pub use error::{Error, Result};
