//! Beals–Coifman solver with radiation.
//!
//! The real line is mapped to the unit circle by s = −cot(φ/2), so that the
//! upper half plane becomes the disk and both ends of the line meet at φ = 0.
//! On N midpoint nodes in φ the Cauchy projectors are exact Fourier
//! multipliers: C⁺ keeps the non-negative modes (minus their value at s = ∞)
//! and C⁻ = C⁺ − I. Pole unknowns are appended with exact rational kernels.

use super::gmres::gmres;
use super::reflectionless::{point_values, Continuum};
use super::{assemble, row_scale, PointValues, Poles};
use crate::error::{Error, Result};
use crate::field::FieldState;
use crate::scattering::ScatteringData;
use crate::{Complex64, Mat2C};
use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use rustfft::{Fft, FftPlanner};
use std::f64::consts::PI;
use std::sync::Arc;

type C = Complex64;

const ZERO: C = C::new(0.0, 0.0);

#[derive(Clone, Debug, PartialEq)]
pub struct FullConfig {
    /// Nodes on the circle (even).
    pub nodes: usize,
    pub tol: f64,
    pub max_iter: usize,
    pub restart: usize,
    /// Fall back to a dense LU solve when GMRES stalls and nodes ≤ this.
    pub dense_max: usize,
    /// Largest accepted disagreement between the two g reconstructions,
    /// relative to 1 + max|g|.
    pub dual_tol: f64,
}

impl Default for FullConfig {
    fn default() -> Self {
        Self { nodes: 8192, tol: 1e-10, max_iter: 200, restart: 40, dense_max: 2048, dual_tol: 1e-7 }
    }
}

#[derive(Clone, Debug)]
pub struct FullOutput {
    pub state: FieldState,
    pub sin_f: Vec<f64>,
    pub cos_f: Vec<f64>,
    /// f_x assembled as (g + h)/2.
    pub fx: Vec<f64>,
    /// max over x of |g from row 1 − g from row 2|.
    pub dual_residual: f64,
    /// Largest GMRES iteration count over all points and rows.
    pub iterations: usize,
    /// sup |r|; values ≥ 1 are outside the comfortable regime.
    pub sup_r: f64,
}

/// Circle discretisation shared by every (x, t).
struct Circle {
    s: Vec<f64>,
    /// ds/(2πi) weights for the trapezoid rule.
    w: Vec<C>,
    r: Vec<C>,
    fft: Arc<dyn Fft<f64>>,
    ifft: Arc<dyn Fft<f64>>,
}

impl Circle {
    fn new(data: &ScatteringData, n: usize) -> Self {
        let mut planner = FftPlanner::new();
        let dphi = 2.0 * PI / n as f64;
        let s: Vec<f64> = (0..n).map(|k| -1.0 / (0.5 * dphi * (k as f64 + 0.5)).tan()).collect();
        let w = s.iter().map(|s| C::new(0.0, -(1.0 + s * s) * 0.5 * dphi / (2.0 * PI))).collect();
        let r = s.iter().map(|&s| data.r_at(s)).collect();
        Self { fft: planner.plan_fft_forward(n), ifft: planner.plan_fft_inverse(n), s, w, r }
    }

    fn n(&self) -> usize {
        self.s.len()
    }

    /// Boundary value from the upper half plane.
    fn c_plus(&self, g: &[C]) -> Vec<C> {
        let n = self.n();
        let mut buf = g.to_vec();
        self.fft.process(&mut buf);
        let scale = 1.0 / n as f64;
        // value at s = ∞ (φ = 0), with the half-node shift put back
        let mut at_inf = ZERO;
        for (k, b) in buf.iter_mut().enumerate() {
            if k < n / 2 {
                *b *= scale;
                at_inf += *b * C::from_polar(1.0, -PI * k as f64 / n as f64);
            } else {
                *b = ZERO;
            }
        }
        self.ifft.process(&mut buf);
        buf.iter_mut().for_each(|b| *b -= at_inf);
        buf
    }

    /// Boundary value from the lower half plane.
    fn c_minus(&self, g: &[C]) -> Vec<C> {
        self.c_plus(g).into_iter().zip(g).map(|(p, g)| p - g).collect()
    }

    /// (1/2πi) ∫ g(s) k(s) ds.
    fn integrate(&self, g: &[C], k: impl Fn(f64) -> C) -> C {
        g.iter().zip(&self.s).zip(&self.w).map(|((g, &s), w)| g * k(s) * w).sum()
    }
}

/// Sign of the continuum term in the second column, fixed by the round-trip
/// check against direct scattering.
const SIGMA: f64 = 1.0;

/// The linear operator for one row of μ at one (x, t).
struct Operator<'a> {
    circle: &'a Circle,
    p: &'a [C],
    /// ρ = r e^{2iθ} at the nodes.
    rho: Vec<C>,
    /// (unknown coefficient, coupling) per pole.
    scale: Vec<(C, C)>,
}

impl Operator<'_> {
    fn layout(&self) -> (usize, usize) {
        (self.circle.n(), self.p.len())
    }

    /// Unknowns [μ₁, μ₂, Ã, B̃].
    fn apply(&self, u: &[C]) -> Vec<C> {
        let (n, np) = self.layout();
        let (mu1, rest) = u.split_at(n);
        let (mu2, rest) = rest.split_at(n);
        let (at, bt) = rest.split_at(np);
        let g1: Vec<C> = self.rho.iter().zip(mu2).map(|(r, m)| r * m).collect();
        let g2: Vec<C> = self.rho.iter().zip(mu1).map(|(r, m)| r.conj() * m).collect();
        let cm = self.circle.c_minus(&g1);
        let cp = self.circle.c_plus(&g2);
        let mut out = vec![ZERO; u.len()];
        for k in 0..n {
            let s = self.circle.s[k];
            let mut pa = ZERO;
            let mut pb = ZERO;
            for i in 0..np {
                pa += at[i] / (s - self.p[i]);
                pb += bt[i] / (s - self.p[i].conj());
            }
            out[k] = mu1[k] - cm[k] - pa;
            out[n + k] = mu2[k] - SIGMA * cp[k] + pb;
        }
        for k in 0..np {
            let pk = self.p[k];
            let (diag, coup) = self.scale[k];
            let cg2 = self.circle.integrate(&g2, |s| 1.0 / (s - pk));
            let cg1 = self.circle.integrate(&g1, |s| 1.0 / (s - pk.conj()));
            let mut sb = ZERO;
            let mut sa = ZERO;
            for i in 0..np {
                sb += bt[i] / (pk - self.p[i].conj());
                sa += at[i] / (pk.conj() - self.p[i]);
            }
            out[2 * n + k] = diag * at[k] - coup * (SIGMA * cg2 - sb);
            out[2 * n + np + k] = diag.conj() * bt[k] - coup.conj() * (cg1 + sa);
        }
        out
    }

    fn rhs(&self, row: usize) -> Vec<C> {
        let (n, np) = self.layout();
        let mut b = vec![ZERO; 2 * n + 2 * np];
        let one = C::new(1.0, 0.0);
        if row == 0 {
            b[..n].iter_mut().for_each(|v| *v = one);
            for k in 0..np {
                b[2 * n + np + k] = self.scale[k].1.conj();
            }
        } else {
            b[n..2 * n].iter_mut().for_each(|v| *v = one);
            for k in 0..np {
                b[2 * n + k] = self.scale[k].1;
            }
        }
        b
    }

    fn dense_solve(&self, b: &[C], x: f64, t: f64) -> Result<Vec<C>> {
        let m = b.len();
        let mut a = DMatrix::<C>::zeros(m, m);
        let mut e = vec![ZERO; m];
        for j in 0..m {
            e[j] = C::new(1.0, 0.0);
            let col = self.apply(&e);
            a.set_column(j, &DVector::from_vec(col));
            e[j] = ZERO;
        }
        let sol = a.lu().solve(&DVector::from_column_slice(b)).ok_or(Error::SingularSystem { x, t })?;
        Ok(sol.as_slice().to_vec())
    }
}

struct RowSolution {
    u: Vec<C>,
    iterations: usize,
}

fn solve_row(op: &Operator, row: usize, cfg: &FullConfig, x: f64, t: f64) -> Result<RowSolution> {
    let b = op.rhs(row);
    let res = gmres(|u| op.apply(u), &b, cfg.tol, cfg.max_iter, cfg.restart);
    if res.converged {
        return Ok(RowSolution { u: res.x, iterations: res.iterations });
    }
    if op.circle.n() <= cfg.dense_max {
        let u = op.dense_solve(&b, x, t)?;
        return Ok(RowSolution { u, iterations: res.iterations });
    }
    Err(Error::NoConvergence { residual: res.residual, iters: res.iterations })
}

struct Point {
    values: PointValues,
    g_row2: f64,
    iterations: usize,
}

fn solve_point(circle: &Circle, poles: &Poles, cfg: &FullConfig, x: f64, t: f64) -> Result<Point> {
    if circle.r.iter().all(|r| *r == ZERO) {
        // the continuum decouples and μ is fixed by the residue system alone
        let values = super::reflectionless::solve_point(poles, x, t)?;
        let g_row2 = (-2.0 * C::i() * values.m1[(1, 0)]).re;
        return Ok(Point { values, g_row2, iterations: 0 });
    }
    let n = circle.n();
    let np = poles.len();
    let rho = circle
        .s
        .iter()
        .zip(&circle.r)
        .map(|(&s, r)| r * C::from_polar(1.0, 0.5 * ((s - 1.0 / s) * x + (s + 1.0 / s) * t)))
        .collect();
    let scale = poles.log_w(x, t).into_iter().map(row_scale).collect();
    let op = Operator { circle, p: &poles.p, rho, scale };
    let mut sol = DMatrix::<C>::zeros(2 * np, 2);
    let mut cont = Continuum { m0: Mat2C::zeros(), dm0: Mat2C::zeros(), m1: Mat2C::zeros() };
    let mut iterations = 0;
    for row in 0..2 {
        let rs = solve_row(&op, row, cfg, x, t)?;
        iterations = iterations.max(rs.iterations);
        let (mu1, rest) = rs.u.split_at(n);
        let (mu2, tail) = rest.split_at(n);
        for k in 0..2 * np {
            sol[(k, row)] = tail[k];
        }
        let g1: Vec<C> = op.rho.iter().zip(mu2).map(|(r, m)| r * m).collect();
        let g2: Vec<C> = op.rho.iter().zip(mu1).map(|(r, m)| SIGMA * r.conj() * m).collect();
        cont.m0[(row, 0)] = circle.integrate(&g1, |s| C::new(1.0 / s, 0.0));
        cont.m0[(row, 1)] = circle.integrate(&g2, |s| C::new(1.0 / s, 0.0));
        cont.dm0[(row, 0)] = circle.integrate(&g1, |s| C::new(1.0 / (s * s), 0.0));
        cont.dm0[(row, 1)] = circle.integrate(&g2, |s| C::new(1.0 / (s * s), 0.0));
        cont.m1[(row, 0)] = -circle.integrate(&g1, |_| C::new(1.0, 0.0));
        cont.m1[(row, 1)] = -circle.integrate(&g2, |_| C::new(1.0, 0.0));
    }
    let values = point_values(&poles.p, &sol, Some(cont));
    let g_row2 = (-2.0 * C::i() * values.m1[(1, 0)]).re;
    Ok(Point { values, g_row2, iterations })
}

/// Reconstruct f on `xs` at time `t` from data with radiation.
pub fn reconstruct_full(data: &ScatteringData, xs: &[f64], t: f64, cfg: &FullConfig) -> Result<FullOutput> {
    if cfg.nodes < 8 || cfg.nodes % 2 != 0 {
        return Err(Error::InvalidParameter(format!("node count {} must be even and ≥ 8", cfg.nodes)));
    }
    let circle = Circle::new(data, cfg.nodes);
    let poles = Poles::from_data(data);
    let dt = t - data.meta.t;
    let pts: Vec<Point> = xs.par_iter().map(|&x| solve_point(&circle, &poles, cfg, x, dt)).collect::<Result<_>>()?;
    let mut dual = 0.0f64;
    for (i, p) in pts.iter().enumerate() {
        let d = (p.values.g() - p.g_row2).abs();
        if !d.is_finite() {
            return Err(Error::NotFinite(i));
        }
        dual = dual.max(d);
    }
    let scale = 1.0 + pts.iter().map(|p| p.values.g().abs()).fold(0.0, f64::max);
    if dual > cfg.dual_tol * scale {
        return Err(Error::DualMismatch(dual));
    }
    let values: Vec<PointValues> = pts.iter().map(|p| p.values).collect();
    let (state, sin_f, cos_f) = assemble(xs, t, data.meta.l_minus, &values)?;
    let fx = values.iter().map(|p| 0.5 * (p.g() + p.h())).collect();
    Ok(FullOutput {
        state,
        sin_f,
        cos_f,
        fx,
        dual_residual: dual,
        iterations: pts.iter().map(|p| p.iterations).max().unwrap_or(0),
        sup_r: data.sup_r(),
    })
}
