//! Green's functions of n-th order linear two-point boundary value problems
//! with a spectral-type parameter attached to one derivative order.
//!
//! The library builds the kernel of
//!
//! ```text
//! u^(n) + a_1(t) u^(n-1) + ... + a_n(t) u + M u^(k) = sigma(t),   t in [a, b],
//! B_i(u) = sum_j ( alpha[i][j] u^(j)(a) + beta[i][j] u^(j)(b) ) = 0,
//! ```
//!
//! from an adaptively integrated fundamental system, and provides the
//! machinery around it:
//!
//! * [`green`] -- kernel assembly, solvability certificates, evaluation of
//!   t-derivatives up to order n, and solution of inhomogeneous problems by
//!   quadrature against the kernel;
//! * [`linking`] -- the parameter-linking integral identities between two
//!   kernels of the same problem, their cross forms, and the pointwise
//!   comparison trichotomy they imply;
//! * [`recurrence`] -- the coefficient recurrence producing the n-th order
//!   operator that annihilates each t-derivative of the kernel off the
//!   diagonal;
//! * [`analysis`] -- eigenvalue scans of the characteristic determinant,
//!   constant-sign parameter windows with refined endpoints, strong-sign
//!   envelope witnesses, monotone parameter dependence, and zero counting;
//! * [`oracles`] -- closed-form reference kernels used by the test suites.
//!
//! # Runnable examples
//!
//! Each major capability has one example under `examples/`:
//!
//! ```text
//! cargo run --example build_kernel        # assemble and probe one kernel
//! cargo run --example solve_bvp           # solve an inhomogeneous problem
//! cargo run --example verify_identities   # linking identity residuals
//! cargo run --example eigenvalues         # characteristic determinant roots
//! cargo run --example parameter_sweep     # sign windows over the parameter
//! cargo run --example compare_kernels     # pointwise comparison trichotomy
//! cargo run --example operator_recurrence # annihilating operator coefficients
//! cargo run --example sign_witness        # strong-sign envelope witness
//! ```
//!
//! A batch CLI (`greenfn build | verify | sweep | eig | h-op`) drives the
//! same machinery from JSON configuration files; see the README.

pub mod analysis;
pub mod bvp;
pub mod cli;
pub mod coeff;
pub mod config;
pub mod error;
pub mod green;
pub mod grid;
pub mod linking;
pub mod ode;
pub mod oracles;
pub mod quad;
pub mod recurrence;
pub mod report;
pub mod svg;

pub use bvp::BvpSpec;
pub use coeff::Coefficient;
pub use error::{Error, Result};
pub use green::{GreenFunction, Side, SolvabilityCertificate};
pub use grid::TsGrid;
pub use ode::FundamentalSystem;
pub use quad::QuadratureRule;
