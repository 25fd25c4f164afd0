//! Sampled fields and closed-form exact solutions.
//!
//! Exact solutions implement [`Field`], an analytic functor `(x, t) ↦ (f, f_x, f_t)`.
//! Derivatives are always analytic; finite differences are reserved for the
//! oracles in the test suites.

use crate::error::{Error, Result};
use crate::numerics::{diff4, simpson};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Field samples at one instant on a uniform grid.
#[derive(Clone, Debug, PartialEq)]
pub struct FieldState {
    pub xs: Vec<f64>,
    pub f: Vec<f64>,
    pub ft: Vec<f64>,
    pub t: f64,
    /// Winding at the left end: f(-∞) = 2π·l_minus.
    pub l_minus: i64,
    /// Winding at the right end: f(+∞) = 2π·l_plus.
    pub l_plus: i64,
}

impl FieldState {
    /// Build a state, checking lengths and grid uniformity. The boundary
    /// windings are read off the end samples by rounding f/2π.
    pub fn new(xs: Vec<f64>, f: Vec<f64>, ft: Vec<f64>, t: f64) -> Result<Self> {
        let l_minus = (f.first().copied().unwrap_or(0.0) / (2.0 * PI)).round() as i64;
        let l_plus = (f.last().copied().unwrap_or(0.0) / (2.0 * PI)).round() as i64;
        Self::with_windings(xs, f, ft, t, l_minus, l_plus)
    }

    pub fn with_windings(
        xs: Vec<f64>,
        f: Vec<f64>,
        ft: Vec<f64>,
        t: f64,
        l_minus: i64,
        l_plus: i64,
    ) -> Result<Self> {
        let n = xs.len();
        if n < 3 {
            return Err(Error::InvalidGrid(format!("need at least 3 samples, got {n}")));
        }
        if f.len() != n || ft.len() != n {
            return Err(Error::InvalidGrid(format!(
                "length mismatch: xs {n}, f {}, ft {}",
                f.len(),
                ft.len()
            )));
        }
        check_uniform(&xs)?;
        if f.iter().chain(&ft).any(|v| !v.is_finite()) || !t.is_finite() {
            return Err(Error::InvalidGrid("non-finite sample".into()));
        }
        Ok(Self { xs, f, ft, t, l_minus, l_plus })
    }

    /// The zero field on `xs`.
    pub fn zeros(xs: Vec<f64>, t: f64) -> Result<Self> {
        let n = xs.len();
        Self::new(xs, vec![0.0; n], vec![0.0; n], t)
    }

    pub fn len(&self) -> usize {
        self.xs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.xs.is_empty()
    }

    /// Grid spacing.
    pub fn h(&self) -> f64 {
        (self.xs[self.len() - 1] - self.xs[0]) / (self.len() - 1) as f64
    }

    /// f_x by fourth-order central differences.
    pub fn fx(&self) -> Vec<f64> {
        diff4(&self.f, self.h())
    }

    /// Distance of the end samples from the recorded multiples of 2π.
    pub fn boundary_defect(&self) -> f64 {
        let a = (self.f[0] - 2.0 * PI * self.l_minus as f64).abs();
        let b = (self.f[self.len() - 1] - 2.0 * PI * self.l_plus as f64).abs();
        a.max(b)
    }
}

fn check_uniform(xs: &[f64]) -> Result<()> {
    let n = xs.len();
    let h = (xs[n - 1] - xs[0]) / (n - 1) as f64;
    if h.is_nan() || h <= 0.0 {
        return Err(Error::InvalidGrid("grid must be strictly increasing".into()));
    }
    // rounding in x0 + i h grows with |x|, so scale the tolerance with the extent
    let scale = xs[0].abs().max(xs[n - 1].abs()).max(h);
    for (i, x) in xs.iter().enumerate() {
        let expect = xs[0] + i as f64 * h;
        if (x - expect).abs() > 1e-12 * scale + 1e-12 * h {
            return Err(Error::InvalidGrid(format!(
                "grid not uniform at index {i}: {x} vs {expect}"
            )));
        }
    }
    Ok(())
}

/// Uniform grid `lo, lo + h, ..., hi` (the last point snapped to `hi`).
pub fn uniform_grid(lo: f64, hi: f64, h: f64) -> Result<Vec<f64>> {
    if !(hi > lo) || !(h > 0.0) {
        return Err(Error::InvalidGrid(format!("bad grid {lo}:{hi}:{h}")));
    }
    let n = ((hi - lo) / h).round() as usize + 1;
    let step = (hi - lo) / (n - 1) as f64;
    Ok((0..n).map(|i| lo + i as f64 * step).collect())
}

/// Point value of an analytic field.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct FieldPoint {
    pub f: f64,
    pub fx: f64,
    pub ft: f64,
}

/// An analytic field `(x, t) ↦ (f, f_x, f_t)`.
pub trait Field: Sync {
    fn eval(&self, x: f64, t: f64) -> FieldPoint;

    /// Sample onto a grid.
    fn sample(&self, xs: &[f64], t: f64) -> Result<FieldState> {
        let pts: Vec<FieldPoint> = xs.iter().map(|&x| self.eval(x, t)).collect();
        FieldState::new(
            xs.to_vec(),
            pts.iter().map(|p| p.f).collect(),
            pts.iter().map(|p| p.ft).collect(),
            t,
        )
    }
}

impl<F: Fn(f64, f64) -> FieldPoint + Sync> Field for F {
    fn eval(&self, x: f64, t: f64) -> FieldPoint {
        self(x, t)
    }
}

fn gamma_of(beta: f64) -> Result<f64> {
    if !(beta.abs() < 1.0) {
        return Err(Error::InvalidParameter(format!("velocity |{beta}| must be < 1")));
    }
    Ok(1.0 / (1.0 - beta * beta).sqrt())
}

/// Traveling kink `sign · 4 arctan exp(γ(x − βt + x0))`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct KinkParams {
    pub beta: f64,
    pub x0: f64,
    /// +1 for a kink, -1 for an antikink.
    pub sign: i8,
}

impl KinkParams {
    pub fn new(beta: f64, x0: f64, sign: i8) -> Result<Self> {
        gamma_of(beta)?;
        if sign != 1 && sign != -1 {
            return Err(Error::InvalidParameter(format!("sign must be ±1, got {sign}")));
        }
        Ok(Self { beta, x0, sign })
    }

    pub fn gamma(&self) -> f64 {
        1.0 / (1.0 - self.beta * self.beta).sqrt()
    }
}

impl Field for KinkParams {
    fn eval(&self, x: f64, t: f64) -> FieldPoint {
        let g = self.gamma();
        let s = g * (x - self.beta * t + self.x0);
        let sg = self.sign as f64;
        // d/ds 4 arctan e^s = 2 sech s
        let sech = 1.0 / s.cosh();
        FieldPoint {
            f: sg * 4.0 * s.exp().atan(),
            fx: sg * 2.0 * g * sech,
            ft: -sg * 2.0 * g * self.beta * sech,
        }
    }
}

/// Evaluate a kink on a grid.
pub fn eval_kink(p: &KinkParams, xs: &[f64], t: f64) -> Result<FieldState> {
    KinkParams::new(p.beta, p.x0, p.sign)?.sample(xs, t)
}

/// Moving breather `4 arctan((β/α) cos(α y1) / cosh(β y2))` with
/// `y1 = t − v x + x1`, `y2 = x − v t + x2` and `α² + β² = γ²`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BreatherParams {
    pub beta: f64,
    pub v: f64,
    pub x1: f64,
    pub x2: f64,
}

impl BreatherParams {
    pub fn new(beta: f64, v: f64, x1: f64, x2: f64) -> Result<Self> {
        let g = gamma_of(v)?;
        if !(beta > 0.0 && beta < g) {
            return Err(Error::InvalidParameter(format!(
                "breather needs 0 < beta < gamma = {g}, got {beta}"
            )));
        }
        Ok(Self { beta, v, x1, x2 })
    }

    pub fn gamma(&self) -> f64 {
        1.0 / (1.0 - self.v * self.v).sqrt()
    }

    pub fn alpha(&self) -> f64 {
        let g = self.gamma();
        (g * g - self.beta * self.beta).sqrt()
    }

    /// Temporal period 2π/α when v = 0.
    pub fn period(&self) -> f64 {
        2.0 * PI / self.alpha()
    }
}

impl Field for BreatherParams {
    fn eval(&self, x: f64, t: f64) -> FieldPoint {
        let (b, v) = (self.beta, self.v);
        let a = self.alpha();
        let y1 = t - v * x + self.x1;
        let y2 = x - v * t + self.x2;
        let (sn, cs) = (a * y1).sin_cos();
        let sech = 1.0 / (b * y2).cosh();
        let th = (b * y2).tanh();
        let k = b / a;
        let g = k * cs * sech;
        // chain rule through y1 and y2
        let g_y1 = -k * a * sn * sech;
        let g_y2 = -k * cs * b * th * sech;
        let w = 4.0 / (1.0 + g * g);
        FieldPoint {
            f: 4.0 * g.atan(),
            fx: w * (-v * g_y1 + g_y2),
            ft: w * (g_y1 - v * g_y2),
        }
    }
}

/// Evaluate a breather on a grid.
pub fn eval_breather(p: &BreatherParams, xs: &[f64], t: f64) -> Result<FieldState> {
    BreatherParams::new(p.beta, p.v, p.x1, p.x2)?.sample(xs, t)
}

/// Wobbling kink `4 arctan(V/U)`.
///
/// `alpha` is kept independent of `beta`; it is an exact solution only when
/// `alpha = sqrt(1 − beta²)`, see [`WobblerParams::exact`].
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct WobblerParams {
    pub beta: f64,
    pub alpha: f64,
}

impl WobblerParams {
    pub fn new(beta: f64, alpha: f64) -> Result<Self> {
        if !(beta > 0.0 && beta < 1.0) {
            return Err(Error::InvalidParameter(format!("wobbler beta must lie in (0,1), got {beta}")));
        }
        if !(alpha > 0.0) {
            return Err(Error::InvalidParameter(format!("wobbler alpha must be positive, got {alpha}")));
        }
        Ok(Self { beta, alpha })
    }

    /// The exact-solution branch α = √(1 − β²).
    pub fn exact(beta: f64) -> Result<Self> {
        Self::new(beta, (1.0 - beta * beta).sqrt())
    }
}

impl Field for WobblerParams {
    fn eval(&self, x: f64, t: f64) -> FieldPoint {
        let (b, a) = (self.beta, self.alpha);
        let p = (1.0 + b) / (1.0 - b);
        let q = 2.0 * b / (1.0 - b);
        let (sn, cs) = (a * t).sin_cos();
        // Rescale by exp(-m x) so nothing overflows; f and its derivatives
        // only depend on the ratio V/U.
        let m = if x > 0.0 { 1.0 + 2.0 * b } else { 0.0 };
        let e = |k: f64| ((k - m) * x).exp();
        let u = e(0.0) + p * e(2.0 * b) - q * e(1.0 + b) * cs;
        let v = p * e(1.0) + e(1.0 + 2.0 * b) - q * e(b) * cs;
        let ux = p * 2.0 * b * e(2.0 * b) - q * (1.0 + b) * e(1.0 + b) * cs;
        let vx = p * e(1.0) + (1.0 + 2.0 * b) * e(1.0 + 2.0 * b) - q * b * e(b) * cs;
        let ut = q * a * e(1.0 + b) * sn;
        let vt = q * a * e(b) * sn;
        let d = u * u + v * v;
        FieldPoint {
            f: 4.0 * v.atan2(u),
            fx: 4.0 * (u * vx - v * ux) / d,
            ft: 4.0 * (u * vt - v * ut) / d,
        }
    }
}

/// Evaluate a wobbling kink on a grid.
pub fn eval_wobbler(p: &WobblerParams, xs: &[f64], t: f64) -> Result<FieldState> {
    WobblerParams::new(p.beta, p.alpha)?.sample(xs, t)
}

/// Lorentz-boosted field `(x, t) ↦ F(γ(x − βt), γ(t − βx))`.
#[derive(Clone, Debug)]
pub struct Boosted<F> {
    inner: F,
    beta: f64,
    gamma: f64,
}

/// Boost an analytic field by velocity `beta`.
pub fn lorentz_boost<F: Field>(inner: F, beta: f64) -> Result<Boosted<F>> {
    let gamma = gamma_of(beta)?;
    Ok(Boosted { inner, beta, gamma })
}

impl<F: Field> Field for Boosted<F> {
    fn eval(&self, x: f64, t: f64) -> FieldPoint {
        let (g, b) = (self.gamma, self.beta);
        let p = self.inner.eval(g * (x - b * t), g * (t - b * x));
        FieldPoint {
            f: p.f,
            fx: g * (p.fx - b * p.ft),
            ft: g * (p.ft - b * p.fx),
        }
    }
}

/// Pointwise sum of fields; superposition is only exact for the linearized
/// equation, but it is the standard way to build well-separated initial data.
pub struct Superposition(pub Vec<Box<dyn Field + Send>>);

impl Field for Superposition {
    fn eval(&self, x: f64, t: f64) -> FieldPoint {
        self.0.iter().fold(FieldPoint::default(), |acc, g| {
            let p = g.eval(x, t);
            FieldPoint { f: acc.f + p.f, fx: acc.fx + p.fx, ft: acc.ft + p.ft }
        })
    }
}

/// Quadrature result with the size of the integrand at the grid ends.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Quadrature {
    pub value: f64,
    pub boundary_integrand: f64,
    /// Set when the integrand at either end exceeds 1e-14.
    pub truncated: bool,
}

fn quad_checked(y: &[f64], h: f64) -> Quadrature {
    let b = y[0].abs().max(y[y.len() - 1].abs());
    Quadrature { value: simpson(y, h), boundary_integrand: b, truncated: b > 1e-14 }
}

/// Energy density ½(f_t² + f_x²) + (1 − cos f), with 1 − cos f = 2 sin²(f/2).
pub fn energy_density(state: &FieldState) -> Vec<f64> {
    let fx = state.fx();
    state
        .f
        .iter()
        .zip(&state.ft)
        .zip(&fx)
        .map(|((f, ft), fx)| 0.5 * (ft * ft + fx * fx) + 2.0 * (0.5 * f).sin().powi(2))
        .collect()
}

/// Energy with truncation metadata.
pub fn energy_checked(state: &FieldState) -> Quadrature {
    quad_checked(&energy_density(state), state.h())
}

/// Energy ½∫(f_t² + f_x²) + ∫(1 − cos f).
pub fn energy(state: &FieldState) -> f64 {
    energy_checked(state).value
}

/// Momentum ½∫ f_t f_x with truncation metadata.
pub fn momentum_checked(state: &FieldState) -> Quadrature {
    let fx = state.fx();
    let y: Vec<f64> = state.ft.iter().zip(&fx).map(|(a, b)| 0.5 * a * b).collect();
    quad_checked(&y, state.h())
}

/// Momentum ½∫ f_t f_x.
pub fn momentum(state: &FieldState) -> f64 {
    momentum_checked(state).value
}
