//! Jost solutions by a Lawson Dormand–Prince 5(4) integrator.
//!
//! Column k of m solves w' = (D + P(x, z)) w with D diagonal. Within each step
//! the diagonal part is removed exactly by the integrating factor e^{Ds},
//! restarted at the start of the step, so only the potential is integrated
//! numerically.

use crate::error::{Error, Result};
use crate::field::FieldState;
use crate::numerics::{diff6, lagrange6};
use crate::{Complex64, Mat2C};
use std::f64::consts::PI;

type C = Complex64;
type Col = [C; 2];

const I: C = C::new(0.0, 1.0);
const ZERO: C = C::new(0.0, 0.0);
const ONE: C = C::new(1.0, 0.0);

/// Which infinity a Jost solution is normalised at.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    Minus,
    Plus,
}

/// Which form of the spectral problem to integrate.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum System {
    /// Original system for |z| ≥ 1, gauge-transformed system for |z| < 1.
    Auto,
    Original,
    Gauge,
}

#[derive(Clone, Debug)]
pub struct JostConfig {
    pub rtol: f64,
    pub atol: f64,
    pub max_step: f64,
    pub max_steps: usize,
    /// Largest allowed |f − 2πℓ|, |f_x|, |f_t| at the grid ends.
    pub decay_tol: f64,
    /// |ă| below this on ℝ is reported as a spectral singularity.
    pub singular_abar: f64,
    pub system: System,
}

impl Default for JostConfig {
    fn default() -> Self {
        Self {
            rtol: 1e-10,
            atol: 1e-10,
            max_step: 1.0,
            max_steps: 2_000_000,
            decay_tol: 1e-6,
            singular_abar: 1e-8,
            system: System::Auto,
        }
    }
}

/// Potential samples: cos f − 1, sin f, f_x + f_t, f_x − f_t and f on a
/// uniform grid, interpolated by six-point Lagrange and zero off the grid.
#[derive(Clone, Debug)]
pub struct Potential {
    x0: f64,
    h: f64,
    vals: Vec<[f64; 4]>,
    f: Vec<f64>,
    pub l_minus: i64,
    pub l_plus: i64,
}

impl Potential {
    pub fn new(state: &FieldState, decay_tol: f64) -> Result<Self> {
        let h = state.h();
        let fx = diff6(&state.f, h);
        let vals: Vec<[f64; 4]> = state
            .f
            .iter()
            .zip(&state.ft)
            .zip(&fx)
            .map(|((f, ft), fx)| [-2.0 * (0.5 * f).sin().powi(2), f.sin(), fx + ft, fx - ft])
            .collect();
        let n = vals.len();
        let edge = [0, n - 1]
            .iter()
            .map(|&i| vals[i].iter().map(|v| v.abs()).fold(0.0, f64::max))
            .fold(0.0, f64::max);
        let edge = edge.max(state.boundary_defect());
        if edge > decay_tol {
            return Err(Error::UndecayedPotential(edge));
        }
        Ok(Self {
            x0: state.xs[0],
            h,
            vals,
            f: state.f.clone(),
            l_minus: state.l_minus,
            l_plus: state.l_plus,
        })
    }

    pub fn x_min(&self) -> f64 {
        self.x0
    }

    pub fn x_max(&self) -> f64 {
        self.x0 + (self.vals.len() - 1) as f64 * self.h
    }

    fn at(&self, x: f64) -> [f64; 4] {
        match lagrange6(x, self.x0, self.h, self.vals.len()) {
            None => [0.0; 4],
            Some((b, w)) => {
                let mut out = [0.0; 4];
                for (k, wk) in w.iter().enumerate() {
                    let v = &self.vals[b + k];
                    for (o, vi) in out.iter_mut().zip(v) {
                        *o += wk * vi;
                    }
                }
                out
            }
        }
    }

    fn f_at(&self, x: f64) -> f64 {
        if x <= self.x0 {
            return 2.0 * PI * self.l_minus as f64;
        }
        if x >= self.x_max() {
            return 2.0 * PI * self.l_plus as f64;
        }
        let (b, w) = lagrange6(x, self.x0, self.h, self.f.len()).expect("inside grid");
        w.iter().enumerate().map(|(k, wk)| wk * self.f[b + k]).sum()
    }

    /// Entries (P11, P12, P21, P22) of the potential matrix at x.
    fn matrix(&self, x: f64, z: C, gauge: bool) -> [C; 4] {
        let [cm, sn, g, hm] = self.at(x);
        if gauge {
            let a = I * z * 0.25;
            [-a * cm, a * sn + 0.25 * hm, a * sn - 0.25 * hm, a * cm]
        } else {
            let a = I / (4.0 * z);
            [a * cm, a * sn - 0.25 * g, a * sn + 0.25 * g, -a * cm]
        }
    }
}

fn use_gauge(z: C, cfg: &JostConfig) -> bool {
    match cfg.system {
        System::Auto => z.norm() < 1.0,
        System::Original => false,
        System::Gauge => true,
    }
}

fn jfun(z: C) -> C {
    0.25 * (z - 1.0 / z)
}

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

fn axpy(v: &Col, terms: &[(f64, &Col)], h: f64) -> Col {
    let mut out = *v;
    for (c, k) in terms {
        out[0] += h * c * k[0];
        out[1] += h * c * k[1];
    }
    out
}

/// Integrate w' = (diag(d) + P) w from `x_start` to `x_end`.
fn integrate(
    pot: &Potential,
    z: C,
    gauge: bool,
    d: [C; 2],
    w0: Col,
    x_start: f64,
    x_end: f64,
    cfg: &JostConfig,
) -> Result<Col> {
    let span = x_end - x_start;
    if span == 0.0 {
        return Ok(w0);
    }
    let dir = span.signum();
    let delta = d[1] - d[0];
    // keep |e^{±δ s}| ≤ e² inside a step
    let hcap = if delta.re.abs() > 0.0 { (2.0 / delta.re.abs()).min(cfg.max_step) } else { cfg.max_step };
    let rhs = |x0: f64, s: f64, v: &Col| -> Col {
        let p = pot.matrix(x0 + s, z, gauge);
        let e = (delta * s).exp();
        [p[0] * v[0] + p[1] * e * v[1], p[2] / e * v[0] + p[3] * v[1]]
    };
    let mut x = x_start;
    let mut w = w0;
    let mut hmag = (0.05f64).min(hcap).min(span.abs());
    let mut k1 = rhs(x, 0.0, &w);
    let mut steps = 0usize;
    loop {
        let remaining = (x_end - x) * dir;
        if remaining <= 1e-14 * span.abs().max(1.0) {
            break;
        }
        steps += 1;
        if steps > cfg.max_steps {
            return Err(Error::Integrator { z, reason: format!("more than {} steps", cfg.max_steps) });
        }
        let last = hmag >= remaining;
        let hs = if last { remaining } else { hmag } * dir;
        let k2 = rhs(x, C2 * hs, &axpy(&w, &[(A21, &k1)], hs));
        let k3 = rhs(x, C3 * hs, &axpy(&w, &[(A31, &k1), (A32, &k2)], hs));
        let k4 = rhs(x, C4 * hs, &axpy(&w, &[(A41, &k1), (A42, &k2), (A43, &k3)], hs));
        let k5 = rhs(x, C5 * hs, &axpy(&w, &[(A51, &k1), (A52, &k2), (A53, &k3), (A54, &k4)], hs));
        let k6 = rhs(
            x,
            hs,
            &axpy(&w, &[(A61, &k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)], hs),
        );
        let v5 = axpy(&w, &[(B1, &k1), (B3, &k3), (B4, &k4), (B5, &k5), (B6, &k6)], hs);
        let k7 = rhs(x, hs, &v5);
        let err = axpy(
            &[ZERO, ZERO],
            &[(E1, &k1), (E3, &k3), (E4, &k4), (E5, &k5), (E6, &k6), (E7, &k7)],
            hs,
        );
        let f0 = (d[0] * hs).exp();
        let f1 = (d[1] * hs).exp();
        let wn = [v5[0] * f0, v5[1] * f1];
        let scale = cfg.atol + cfg.rtol * (w[0].norm().max(w[1].norm())).max(wn[0].norm().max(wn[1].norm()));
        let en = (err[0] * f0).norm().max((err[1] * f1).norm()) / scale;
        if !en.is_finite() {
            return Err(Error::Integrator { z, reason: "non-finite error estimate".into() });
        }
        if en <= 1.0 {
            x = if last { x_end } else { x + hs };
            w = wn;
            // first stage of the next step, moved into the new frame
            k1 = [k7[0] * f0, k7[1] * f1];
        }
        let fac = if en == 0.0 { 5.0 } else { (0.9 * en.powf(-0.2)).clamp(0.2, 5.0) };
        hmag = (hmag * fac).min(hcap);
        if hmag < 1e-12 {
            return Err(Error::Integrator { z, reason: "step size underflow".into() });
        }
    }
    Ok(w)
}

/// Rotation by angle a: [[cos a, −sin a], [sin a, cos a]].
fn rotate(a: f64, w: Col) -> Col {
    let (s, c) = a.sin_cos();
    [w[0] * c - w[1] * s, w[0] * s + w[1] * c]
}

fn sign(l: i64) -> f64 {
    if l.rem_euclid(2) == 0 {
        1.0
    } else {
        -1.0
    }
}

/// One column of a Jost solution at `x_end`, in the original frame.
fn column(pot: &Potential, z: C, k: usize, side: Side, x_end: f64, cfg: &JostConfig) -> Result<Col> {
    if z == ZERO || !z.re.is_finite() || !z.im.is_finite() {
        return Err(Error::InvalidParameter("Jost solutions need finite z ≠ 0".into()));
    }
    let gauge = use_gauge(z, cfg);
    let dj = 2.0 * I * jfun(z);
    let (d, w0) = if k == 0 { ([ZERO, dj], [ONE, ZERO]) } else { ([-dj, ZERO], [ZERO, ONE]) };
    let (x_start, l) = match side {
        Side::Minus => (pot.x_min(), pot.l_minus),
        Side::Plus => (pot.x_max(), pot.l_plus),
    };
    // Beyond the grid the potential vanishes and m is the identity.
    let x_start = match side {
        Side::Minus => x_start.min(x_end),
        Side::Plus => x_start.max(x_end),
    };
    let w = integrate(pot, z, gauge, d, w0, x_start, x_end, cfg)?;
    if gauge {
        // m = R(f/2) m_gauge (−1)^ℓ
        let s = sign(l);
        let w = rotate(0.5 * pot.f_at(x_end), w);
        Ok([w[0] * s, w[1] * s])
    } else {
        Ok(w)
    }
}

pub(crate) fn column_from_left(pot: &Potential, z: C, x_end: f64, cfg: &JostConfig) -> Result<Col> {
    column(pot, z, 0, Side::Minus, x_end, cfg)
}

pub(crate) fn column2_from_right(pot: &Potential, z: C, x_end: f64, cfg: &JostConfig) -> Result<Col> {
    column(pot, z, 1, Side::Plus, x_end, cfg)
}

/// m±(x0, z), both columns integrated from the chosen infinity.
///
/// Off the real axis one column of each Jost solution grows in the direction
/// of integration; callers that need accurate values should use the stable
/// columns m⁻₁ and m⁺₂ for Im z > 0.
pub fn jost_solve(state: &FieldState, z: C, side: Side, x0: f64, cfg: &JostConfig) -> Result<Mat2C> {
    let pot = Potential::new(state, cfg.decay_tol)?;
    jost_matrix(&pot, z, side, x0, cfg)
}

pub(crate) fn jost_matrix(pot: &Potential, z: C, side: Side, x0: f64, cfg: &JostConfig) -> Result<Mat2C> {
    let c0 = column(pot, z, 0, side, x0, cfg)?;
    let c1 = column(pot, z, 1, side, x0, cfg)?;
    Ok(Mat2C::new(c0[0], c1[0], c0[1], c1[1]))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{uniform_grid, FieldState};

    #[test]
    fn zero_potential_gives_identity() {
        let xs = uniform_grid(-10.0, 10.0, 0.1).unwrap();
        let s = FieldState::zeros(xs, 0.0).unwrap();
        let cfg = JostConfig::default();
        for z in [C::new(2.0, 0.0), C::new(0.3, 0.4), C::new(0.0, 2.0)] {
            let m = jost_solve(&s, z, Side::Minus, 1.5, &cfg).unwrap();
            assert!((m - Mat2C::identity()).norm() < 1e-14);
        }
    }
}
