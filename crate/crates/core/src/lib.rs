//! Green's functions, Poisson kernels and Dirichlet solvers for the gauge
//! annulus `{R < N(ξ) < 1}` and the strip `{0 < t < 1}` of the Heisenberg
//! group `H_n`, built from repeated Kelvin reflections of the averaged
//! fundamental solution of the sub-Laplacian.
//!
//! ```
//! use heisenberg_green::annulus::{green_annulus, AnnulusDomain};
//! use heisenberg_green::{Dimension, GroupPoint};
//!
//! let n = Dimension::new(1)?;
//! let dom = AnnulusDomain::new(0.5, n)?;
//! let eta = GroupPoint::new(vec![(0.6, 0.0)], 0.1)?;
//!
//! let g = green_annulus(&eta, &GroupPoint::new(vec![(0.8, 0.0)], 0.0)?, &dom, 1e-10)?;
//! assert!(g.value > 0.0);
//!
//! // on the outer sphere the series vanishes up to its tail bound
//! let b = green_annulus(&eta, &GroupPoint::new(vec![(1.0, 0.0)], 0.0)?, &dom, 1e-10)?;
//! assert!(b.value.abs() <= b.tail_bound && b.tail_bound <= 1e-10);
//! # Ok::<(), heisenberg_green::Error>(())
//! ```

// `!(x < b)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod annulus;
pub mod bvp;
pub mod config;
pub mod error;
pub mod func;
pub mod fundamental;
pub mod group;
pub mod hyp2f1;
pub mod kelvin;
pub mod quadrature;
pub mod strip;
pub mod subelliptic;
pub mod sum;

pub use config::QuadratureConfig;
pub use error::{Error, Result};
pub use func::CircularFunction;
pub use group::{Dimension, GroupPoint};
pub use hyp2f1::{hyp2f1, hyp2f1_tail_bound, HypParams};

/// Version of this crate, recorded in run manifests.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
