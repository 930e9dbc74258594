//! Complex Gamma-calculus, complex Hermite chaos and Stein machinery for
//! quantitative fourth-moment bounds on the Wasserstein distance to complex
//! Gaussian laws.
//!
//! The crate is organised bottom-up:
//!
//! - [`wirtinger`]: forward-mode Wirtinger jets (value, `d/dz`, `d/dzbar`, all
//!   four Hessian blocks) and the [`wirtinger::ScalarField`] abstraction.
//! - [`cpoly`]: exact polynomials in `z_1..z_n, zbar_1..zbar_n` with rational
//!   complex coefficients, and exact standard complex Gaussian moments.
//! - [`hermite`]: complex Hermite polynomials `H_{p,q}` and the orthonormal
//!   product basis of the complex Ornstein-Uhlenbeck eigenspaces.
//! - [`ou`]: the complex OU generator, carre du champ, pseudo-inverse,
//!   eigenspace projections and the spectral inequalities.
//! - [`cgauss`]: the circularly symmetric complex normal law, sampling and
//!   Monte Carlo integration-by-parts checks.
//! - [`stein`]: numerical solution of the complex Stein equation.
//! - [`fourth_moment`]: exact and Monte Carlo fourth-moment bounds.
//! - [`transport`]: empirical Wasserstein-1 distances.
//! - [`identities`]: the randomized exact-identity suite.

pub mod cgauss;
pub mod cpoly;
pub mod error;
pub mod fourth_moment;
pub mod hermite;
pub mod identities;
pub mod linalg;
pub mod ou;
pub mod par;
pub mod rational;
pub mod stein;
pub mod transport;
pub mod wirtinger;

pub use error::{Error, Result};
pub use num_complex::Complex64 as C64;
