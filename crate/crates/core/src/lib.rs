//! Deformed two-matrix integrals through Schur-function expansions.
//!
//! The crate evaluates
//!
//! ```text
//! Z_N(t, n, m, t̄) = ∫ Π_i dμ(x_i, y_i | t, n, m, t̄) Δ_N(x) Δ_N(y)
//! ```
//!
//! five independent ways (tensor quadrature, permutation expansion, the
//! bimoment determinant, double and quadruple Schur series) and checks the
//! fermionic vacuum-expectation identities behind the series exactly, with a
//! finite Fock-space model.
//!
//! | module | contents |
//! |---|---|
//! | [`partitions`] | partitions, Frobenius coordinates, shifted labels |
//! | [`schur`] | Schur functions, Littlewood–Richardson, Cauchy kernel |
//! | [`fermion`] | Maya-diagram Fock space and vacuum expectation values |
//! | [`measures`] | measure specs, quadrature, deformed bimoments |
//! | [`engines`] | the `Z_N` evaluators and coefficient determinants |
//! | [`cli`] | job configs and the commands behind the `twomm` binary |
//!
//! Runnable tours live in `examples/`:
//!
//! ```text
//! cargo run --example partitions_tour
//! cargo run --example schur_identities
//! cargo run --example fermion_oracle
//! cargo run --example gaussian_engines
//! cargo run --example circle_series
//! cargo run --example character_coupling
//! cargo run --example radial_normal
//! cargo run --example tau_function
//! ```

pub mod cli;
pub mod engines;
pub mod error;
pub mod fermion;
pub mod measures;
pub mod partitions;
pub mod poly;
pub mod report;
pub mod scalar;
pub mod schur;

pub use error::{Error, Result};
pub use partitions::Partition;
pub use poly::{Poly, Var};
pub use schur::TimeSequence;
