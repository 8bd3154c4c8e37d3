//! Complex m-Hessian equations on grids.
//!
//! The crate is organized bottom-up:
//!
//! - [`cone`]: elementary symmetric functions, Gårding cones, Hermitian forms
//!   and Hessian densities;
//! - [`grid`]: uniform grids over balls, cubes and flat tori, grid functions
//!   and the discrete complex Hessian;
//! - [`viscosity`]: sup/inf-convolutions, sub/supersolution verification and
//!   Hölder estimates;
//! - [`dirichlet`]: barriers and the monotone Perron solver on balls;
//! - [`torus`]: the periodic problem `σ_m(I + A(φ)) = F(x, φ)`;
//! - [`oracle`]: brute-force references for testing;
//! - [`io`], [`config`], [`cli`]: file formats and the command line front end.

pub mod cli;
pub mod cone;
pub mod config;
pub mod dirichlet;
pub mod error;
pub mod grid;
pub mod io;
pub mod oracle;
pub mod rng;
mod scheme;
pub mod suite;
pub mod torus;
pub mod viscosity;

pub use error::{Error, Result};
