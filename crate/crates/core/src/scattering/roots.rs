//! Zeros of ă in the upper half plane: argument-principle counting on a
//! rectangle subdivision, Newton refinement and norming constants.

use super::jost::{column2_from_right, column_from_left, JostConfig, Potential, System};
use super::abar;
use crate::error::{Error, Result};
use crate::field::FieldState;
use crate::Complex64;
use rayon::prelude::*;
use std::f64::consts::PI;

type C = Complex64;

/// Search rectangle in ℂ⁺ plus root-finding controls.
#[derive(Clone, Debug, PartialEq)]
pub struct SearchBox {
    pub re_min: f64,
    pub re_max: f64,
    pub im_min: f64,
    pub im_max: f64,
    /// Boundary samples per edge of the outer box.
    pub edge_samples: usize,
    pub newton_tol: f64,
    pub max_depth: usize,
    /// Real parts below this classify a root as kink type.
    pub kink_tol: f64,
}

impl Default for SearchBox {
    fn default() -> Self {
        Self {
            re_min: -4.0,
            re_max: 4.0,
            im_min: 0.02,
            im_max: 4.0,
            edge_samples: 64,
            newton_tol: 1e-10,
            max_depth: 12,
            kink_tol: 1e-6,
        }
    }
}

/// A simple zero of ă.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Eigenvalue {
    pub z: C,
    /// ă′(z).
    pub dabar: C,
    /// |ă(z)| after refinement.
    pub residual: f64,
    pub kink: bool,
}

impl Eigenvalue {
    pub fn is_kink(&self) -> bool {
        self.kink
    }
}

#[derive(Clone, Copy, Debug)]
struct Rect {
    re0: f64,
    re1: f64,
    im0: f64,
    im1: f64,
}

impl Rect {
    fn contains(&self, z: C, slack: f64) -> bool {
        z.re >= self.re0 - slack && z.re <= self.re1 + slack && z.im >= self.im0 - slack && z.im <= self.im1 + slack
    }

    fn corners(&self) -> [C; 4] {
        [
            C::new(self.re0, self.im0),
            C::new(self.re1, self.im0),
            C::new(self.re1, self.im1),
            C::new(self.re0, self.im1),
        ]
    }

    fn size(&self) -> f64 {
        (self.re1 - self.re0).max(self.im1 - self.im0)
    }

    /// Split slightly off centre so symmetric roots (kinks on iℝ) do not
    /// land on an inner edge.
    fn quarter(&self) -> [Rect; 4] {
        let rm = self.re0 + 0.4937 * (self.re1 - self.re0);
        let im = self.im0 + 0.5123 * (self.im1 - self.im0);
        [
            Rect { re0: self.re0, re1: rm, im0: self.im0, im1: im },
            Rect { re0: rm, re1: self.re1, im0: self.im0, im1: im },
            Rect { re0: self.re0, re1: rm, im0: im, im1: self.im1 },
            Rect { re0: rm, re1: self.re1, im0: im, im1: self.im1 },
        ]
    }
}

struct Ctx<'a> {
    pot: &'a Potential,
    cfg: &'a JostConfig,
}

impl Ctx<'_> {
    fn abar(&self, z: C) -> Result<C> {
        abar(self.pot, z, 0.0, self.cfg)
    }

    /// Winding number of ă around the rectangle, by summing phase increments
    /// between boundary samples and bisecting any increment above π/4.
    fn winding(&self, r: &Rect, per_edge: usize) -> Result<i64> {
        let c = r.corners();
        let pts: Vec<C> = (0..4)
            .flat_map(|e| {
                let (a, b) = (c[e], c[(e + 1) % 4]);
                (0..per_edge).map(move |k| a + (b - a) * (k as f64 / per_edge as f64))
            })
            .collect();
        let vals: Vec<C> = pts.par_iter().map(|&z| self.abar(z)).collect::<Result<_>>()?;
        let n = pts.len();
        let mut total = 0.0;
        for k in 0..n {
            let k1 = (k + 1) % n;
            total += self.increment(pts[k], vals[k], pts[k1], vals[k1], 0)?;
        }
        Ok((total / (2.0 * PI)).round() as i64)
    }

    fn increment(&self, za: C, va: C, zb: C, vb: C, depth: usize) -> Result<f64> {
        let d = (vb / va).arg();
        if d.abs() <= PI / 4.0 || depth >= 12 {
            return Ok(d);
        }
        let zm = 0.5 * (za + zb);
        let vm = self.abar(zm)?;
        Ok(self.increment(za, va, zm, vm, depth + 1)? + self.increment(zm, vm, zb, vb, depth + 1)?)
    }

    /// ă′ by the trapezoid rule on a small circle (spectrally accurate for
    /// analytic functions).
    fn derivative(&self, z: C, radius: f64) -> Result<C> {
        const K: usize = 8;
        let mut acc = C::new(0.0, 0.0);
        for k in 0..K {
            let e = C::from_polar(1.0, 2.0 * PI * k as f64 / K as f64);
            acc += self.abar(z + radius * e)? / e;
        }
        Ok(acc / (K as f64 * radius))
    }

    fn radius(z: C) -> f64 {
        (0.02f64).min(0.25 * z.im).min(0.25 * z.norm())
    }

    /// Newton on ă, stopped when |ă| < tol or the update drops below tol.
    /// The second test matters in practice: interpolating the sampled
    /// potential leaves ă with an error floor of order h⁶, which can sit
    /// above tol.
    ///
    /// Near |z| = 1 the two forms of the spectral problem give slightly
    /// different discretisation errors, so once the iteration has settled the
    /// system is frozen to avoid cycling across the switch.
    fn newton(&self, mut z: C, tol: f64) -> Result<Option<(C, C, f64)>> {
        let mut frozen = self.cfg.clone();
        let mut ctx = Ctx { pot: self.pot, cfg: self.cfg };
        for _ in 0..60 {
            let v = ctx.abar(z)?;
            let d = ctx.derivative(z, Self::radius(z))?;
            if v.norm() < tol {
                return Ok(Some((z, d, v.norm())));
            }
            if d.norm() == 0.0 {
                return Ok(None);
            }
            let step = v / d;
            z -= step;
            if z.im <= 0.0 || !z.re.is_finite() || z.norm() > 1e3 {
                return Ok(None);
            }
            if step.norm() < 1e-6 && frozen.system == System::Auto {
                frozen.system = if z.norm() < 1.0 { System::Gauge } else { System::Original };
                ctx = Ctx { pot: self.pot, cfg: &frozen };
            }
            if step.norm() < tol * z.norm().max(1.0) {
                let v = ctx.abar(z)?;
                let d = ctx.derivative(z, Self::radius(z))?;
                // a converged step must also sit on a genuine zero
                return Ok((v.norm() < 1e-6).then_some((z, d, v.norm())));
            }
        }
        Ok(None)
    }

    fn search(&self, r: Rect, depth: usize, max_depth: usize, tol: f64, out: &mut Vec<(C, C, f64)>) -> Result<()> {
        let w = self.winding(&r, 16)?;
        if w <= 0 {
            return Ok(());
        }
        if w == 1 {
            let z0 = C::new(0.5 * (r.re0 + r.re1), 0.5 * (r.im0 + r.im1));
            if let Some(root) = self.newton(z0, tol)? {
                if r.contains(root.0, 1e-9) {
                    out.push(root);
                    return Ok(());
                }
            }
        }
        if depth >= max_depth || r.size() < 1e-6 {
            if w > 1 {
                return Err(Error::NonGeneric(format!(
                    "{w} zeros within {:.1e} of {}; multiple eigenvalue",
                    r.size(),
                    C::new(r.re0, r.im0)
                )));
            }
            return Err(Error::RootCount { winding: w, found: 0 });
        }
        for q in r.quarter() {
            self.search(q, depth + 1, max_depth, tol, out)?;
        }
        Ok(())
    }
}

/// All zeros of ă inside the search box.
pub fn find_eigenvalues(state: &FieldState, sb: &SearchBox, cfg: &JostConfig) -> Result<Vec<Eigenvalue>> {
    if !(sb.im_min > 0.0 && sb.im_max > sb.im_min && sb.re_max > sb.re_min) {
        return Err(Error::InvalidParameter("search box must lie in the open upper half plane".into()));
    }
    let pot = Potential::new(state, cfg.decay_tol)?;
    let ctx = Ctx { pot: &pot, cfg };
    let outer = Rect { re0: sb.re_min, re1: sb.re_max, im0: sb.im_min, im1: sb.im_max };
    let total = ctx.winding(&outer, sb.edge_samples)?;
    let mut roots = Vec::new();
    if total > 0 {
        ctx.search(outer, 0, sb.max_depth, sb.newton_tol, &mut roots)?;
    }
    // newton from neighbouring cells can land on the same root
    let mut uniq: Vec<(C, C, f64)> = Vec::new();
    for r in roots {
        if !uniq.iter().any(|u| (u.0 - r.0).norm() < 1e-7) {
            uniq.push(r);
        }
    }
    if uniq.len() as i64 != total {
        return Err(Error::RootCount { winding: total, found: uniq.len() });
    }
    let mut out: Vec<Eigenvalue> = uniq
        .into_iter()
        .map(|(z, d, res)| {
            if d.norm() < 1e-8 {
                return Err(Error::NonGeneric(format!("|ă′| = {:.2e} at z = {z}", d.norm())));
            }
            let kink = z.re.abs() < sb.kink_tol;
            let z = if kink { C::new(0.0, z.im) } else { z };
            Ok(Eigenvalue { z, dabar: d, residual: res, kink })
        })
        .collect::<Result<_>>()?;
    out.sort_by(|a, b| a.z.im.total_cmp(&b.z.im).then(a.z.re.total_cmp(&b.z.re)));
    check_distinct_moduli(&out)?;
    Ok(out)
}

fn check_distinct_moduli(eigs: &[Eigenvalue]) -> Result<()> {
    // breather pairs z, −z̄ share a modulus by symmetry; only compare classes
    let mut mods: Vec<f64> = eigs.iter().filter(|e| e.kink || e.z.re > 0.0).map(|e| e.z.norm()).collect();
    mods.sort_by(f64::total_cmp);
    for w in mods.windows(2) {
        if (w[1] - w[0]).abs() < 1e-8 {
            return Err(Error::NonGeneric(format!("two eigenvalues share modulus {}", w[0])));
        }
    }
    Ok(())
}

/// c_i = b_i/ă′(z_i) with b_i from m⁻₁(x) = b_i e^{2ijx} m⁺₂(x), fitted by
/// least squares at x ∈ {−1, −½, 0, ½, 1}.
pub fn norming_constants(state: &FieldState, eigs: &[Eigenvalue], cfg: &JostConfig) -> Result<Vec<C>> {
    let pot = Potential::new(state, cfg.decay_tol)?;
    eigs.iter()
        .map(|e| {
            let j = 0.25 * (e.z - 1.0 / e.z);
            let bs: Vec<C> = [-1.0, -0.5, 0.0, 0.5, 1.0]
                .iter()
                .map(|&x| {
                    let m1 = column_from_left(&pot, e.z, x, cfg)?;
                    let m2 = column2_from_right(&pot, e.z, x, cfg)?;
                    let ex = (2.0 * C::i() * j * x).exp();
                    let u = [m2[0] * ex, m2[1] * ex];
                    let num = u[0].conj() * m1[0] + u[1].conj() * m1[1];
                    Ok(num / (u[0].norm_sqr() + u[1].norm_sqr()))
                })
                .collect::<Result<_>>()?;
            let mean = bs.iter().sum::<C>() / bs.len() as f64;
            let spread = bs.iter().map(|b| (b - mean).norm()).fold(0.0, f64::max) / mean.norm();
            if !(spread <= 1e-4) {
                return Err(Error::NormingSpread { z: e.z, spread });
            }
            Ok(mean / e.dabar)
        })
        .collect()
}
