//! A 1D laboratory for the segregated two-species cross-diffusion system.
//!
//! Three independent routes to the same dynamics:
//!
//! * [`scheme`]: a δ-regularized Eulerian P1 finite-element solver with
//!   semi-implicit Euler time stepping and a Picard inner loop,
//! * [`fronttrack`]: a Lagrangian tracker that transports mass-carrying
//!   nodes on each side of the contact point and moves the interface by the
//!   modified Darcy law,
//! * [`oracle`]: closed-form references built from the Barenblatt profile.
//!
//! [`diagnostics`] measures masses, segregation, the contact point and the
//! jump of `∂x(u1 + u2)`; [`config`] and [`output`] drive runs from text
//! configuration files and write CSV snapshots.

pub mod config;
pub mod diagnostics;
pub mod driver;
pub mod error;
pub mod fronttrack;
pub mod linsolve;
pub mod mesh;
pub mod model;
pub mod oracle;
pub mod output;
pub mod scheme;

pub use error::{Error, Result};
pub use mesh::{FeField, Mesh1D};
pub use model::{LotkaVolterra, ModelParams, Species, Transport};
