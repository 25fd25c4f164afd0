//! Time evolution of scattering data and reconstruction of the field.
//!
//! Both solvers work with the residue unknowns scaled by the pole weights
//! w = c e^{2iθ(p)}, kept in log form, so solitons far from the evaluation
//! point saturate instead of overflowing.

mod full;
mod gmres;
mod reflectionless;
mod theta;

pub use full::{reconstruct_full, FullConfig, FullOutput};
pub use gmres::{gmres, GmresResult};
pub use reflectionless::{reconstruct_reflectionless, reflectionless_matrix, reflectionless_point, ReflectionlessOutput};
pub use theta::{re_i_theta, stationary_point, theta, theta_tilde};

use crate::error::Result;
use crate::field::FieldState;
use crate::numerics::unwrap_from;
use crate::scattering::ScatteringData;
use crate::{Complex64, Mat2C};
use std::f64::consts::PI;

/// Evolve scattering data to time `t` (measured from the data's own time).
///
/// r(z) and every norming constant pick up the factor e^{(i/2)(z + 1/z)t}.
pub fn evolve_scattering(data: &ScatteringData, t: f64) -> ScatteringData {
    let phase = |z: Complex64| (Complex64::i() * 0.5 * (z + 1.0 / z) * t).exp();
    let mut out = data.clone();
    for (r, &z) in out.r.iter_mut().zip(&data.grid) {
        *r *= Complex64::from_polar(1.0, 0.5 * (z + 1.0 / z) * t);
    }
    for k in &mut out.kinks {
        // real for z = iζ
        k.c *= phase(k.z()).re;
    }
    for b in &mut out.breathers {
        b.c *= phase(b.z);
    }
    out.meta.t = data.meta.t + t;
    out
}

/// Reconstruction at one (x, t): the value of M at z = 0, its derivative
/// there, and the 1/z coefficient at infinity.
#[derive(Clone, Copy, Debug)]
pub struct PointValues {
    pub m0: Mat2C,
    pub dm0: Mat2C,
    pub m1: Mat2C,
}

impl PointValues {
    pub fn sin_f(&self) -> f64 {
        (2.0 * self.m0[(1, 0)] * self.m0[(1, 1)]).re
    }

    pub fn cos_f(&self) -> f64 {
        (1.0 + 2.0 * self.m0[(0, 1)] * self.m0[(1, 0)]).re
    }

    /// f_x + f_t = −2i m⁽¹⁾₁₂.
    pub fn g(&self) -> f64 {
        (-2.0 * Complex64::i() * self.m1[(0, 1)]).re
    }

    /// f_x − f_t = −2i (m₀⁻¹ M′(0))₁₂.
    pub fn h(&self) -> f64 {
        let inv = self.m0.try_inverse().unwrap_or_else(Mat2C::identity);
        (-2.0 * Complex64::i() * (inv * self.dm0)[(0, 1)]).re
    }
}

/// Assemble f from (sin f, cos f) by atan2 and unwrapping from 2πℓ₋, and
/// f_t from (g − h)/2.
pub(crate) fn assemble(
    xs: &[f64],
    t: f64,
    l_minus: i64,
    pts: &[PointValues],
) -> Result<(FieldState, Vec<f64>, Vec<f64>)> {
    let sin: Vec<f64> = pts.iter().map(|p| p.sin_f()).collect();
    let cos: Vec<f64> = pts.iter().map(|p| p.cos_f()).collect();
    let ang: Vec<f64> = sin.iter().zip(&cos).map(|(s, c)| s.atan2(*c)).collect();
    let f = unwrap_from(&ang, 2.0 * PI * l_minus as f64);
    let ft = pts.iter().map(|p| 0.5 * (p.g() - p.h())).collect();
    Ok((FieldState::new(xs.to_vec(), f, ft, t)?, sin, cos))
}

/// Poles in ℂ⁺ with log-weights log(c) (time phase applied separately).
pub(crate) struct Poles {
    pub p: Vec<Complex64>,
    pub log_c: Vec<Complex64>,
}

impl Poles {
    pub fn from_data(data: &ScatteringData) -> Self {
        let (p, c): (Vec<_>, Vec<_>) = data.poles().into_iter().unzip();
        Self { p, log_c: c.iter().map(|c| c.ln()).collect() }
    }

    pub fn len(&self) -> usize {
        self.p.len()
    }

    /// log w_k = log c_k + 2iθ(p_k; x, t).
    pub fn log_w(&self, x: f64, t: f64) -> Vec<Complex64> {
        self.p
            .iter()
            .zip(&self.log_c)
            .map(|(p, lc)| lc + 2.0 * Complex64::i() * theta(*p, x, t))
            .collect()
    }
}

/// Row scaling for a pole equation: with |w| ≤ 1 the row is multiplied by w
/// (the unknown enters with coefficient 1), otherwise the unknown enters
/// with coefficient 1/w. Returns (unknown coefficient, coupling factor).
pub(crate) fn row_scale(log_w: Complex64) -> (Complex64, Complex64) {
    if log_w.re <= 0.0 {
        (Complex64::new(1.0, 0.0), log_w.exp())
    } else {
        ((-log_w).exp(), Complex64::new(1.0, 0.0))
    }
}
