//! Similarity-coordinate toolkit for the radial focusing energy-critical wave
//! equation near its ODE blowup profile: special functions, the spectral ODE,
//! Green functions, spectral collocation, time evolution and blowup-time fitting.

pub mod blowup;
pub mod discretization;
pub mod evolution;
pub mod expm;
pub mod green;
pub mod model;
pub mod quadrature;
pub mod rk;
pub mod special_fn;
pub mod spectral_ode;

pub use num_complex::Complex64 as C64;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");
