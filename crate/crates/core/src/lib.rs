//! Numerical inverse scattering for the sine-Gordon equation
//! `f_tt − f_xx + sin f = 0`.
//!
//! The crate is organised along the transform pipeline:
//!
//! * [`field`] holds sampled states and the closed-form kinks, breathers and
//!   wobbling kinks, plus energy and momentum.
//! * [`scattering`] computes Jost solutions, the scattering matrix, the
//!   reflection coefficient, eigenvalues and norming constants.
//! * [`inverse`] evolves scattering data and reconstructs the field, either
//!   from pure discrete data or with radiation through a discretised
//!   Beals–Coifman equation.
//! * [`asymptotics`] evaluates the explicit long-time formulas.
//! * [`pde`] is a leapfrog finite-difference solver used as an independent oracle.
//! * [`diagnostics`] has weighted norms, comparison metrics and decay fits.
//!
//! ```
//! use sg_ist::field::{Field, KinkParams};
//!
//! let kink = KinkParams::new(0.0, 0.0, 1).unwrap();
//! assert!((kink.eval(0.0, 0.0).f - std::f64::consts::PI).abs() < 1e-15);
//! ```

pub mod asymptotics;
pub mod config;
pub mod diagnostics;
pub mod error;
pub mod field;
pub mod inverse;
pub mod io;
pub mod numerics;
pub mod pde;
pub mod scattering;

pub use error::{Error, Result};
pub use num_complex::Complex64;

/// 2×2 complex matrix used for Jost solutions and RHP values.
pub type Mat2C = nalgebra::Matrix2<Complex64>;

// The guide's code listings run as doctests.
#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/exact_solutions.md")]
    mod exact_solutions {}
    #[doc = include_str!("../../../book/src/direct_scattering.md")]
    mod direct_scattering {}
    #[doc = include_str!("../../../book/src/inverse_transform.md")]
    mod inverse_transform {}
    #[doc = include_str!("../../../book/src/asymptotics.md")]
    mod asymptotics {}
    #[doc = include_str!("../../../book/src/pde_reference.md")]
    mod pde_reference {}
    #[doc = include_str!("../../../book/src/diagnostics.md")]
    mod diagnostics {}
}
