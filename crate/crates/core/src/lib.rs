//! Level-set geometry of capacitary potentials in convex rings.
//!
//! The crate solves p-Laplace and minimal-surface Dirichlet problems on
//! convex rings in support-function coordinates ([`solver`]), builds height
//! profiles of level-set curvature functionals from the solutions
//! ([`profile`]), cross-checks them against closed forms ([`oracle`]), and
//! verifies the pointwise algebra behind the curvature estimates on random
//! jets ([`jet`]).

// NaN-rejecting checks are written as `!(x > y)` on purpose.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod blocktri;
pub mod cli;
pub mod config;
pub mod error;
pub mod io;
pub mod jet;
pub mod oracle;
pub mod profile;
pub mod solver;
pub mod stencil;
pub mod support;

pub use error::{Error, Result};
