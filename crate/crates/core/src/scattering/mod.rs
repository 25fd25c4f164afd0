//! Direct scattering: Jost solutions, the scattering matrix, the reflection
//! coefficient, eigenvalues and norming constants.

mod grid;
mod jost;
mod roots;

pub use grid::SpectralGrid;
pub use jost::{jost_solve, JostConfig, Potential, Side, System};
pub use roots::{find_eigenvalues, norming_constants, Eigenvalue, SearchBox};

use crate::error::{Error, Result};
use crate::field::FieldState;
use crate::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// Entries of S(z) = (a, b̆; b, ă) at a real z.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ScatteringMatrixSample {
    pub z: f64,
    pub a: Complex64,
    pub abar: Complex64,
    pub b: Complex64,
    pub bbar: Complex64,
}

impl ScatteringMatrixSample {
    /// a·ă − b·b̆, which equals 1 for exact data.
    pub fn det(&self) -> Complex64 {
        self.a * self.abar - self.b * self.bbar
    }

    pub fn r(&self) -> Complex64 {
        -self.b / self.abar
    }
}

/// A kink-type eigenvalue z = iζ with its norming constant.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct KinkEig {
    pub zeta: f64,
    pub c: Complex64,
}

impl KinkEig {
    pub fn z(&self) -> Complex64 {
        Complex64::new(0.0, self.zeta)
    }

    /// Velocity (1 − ζ²)/(1 + ζ²).
    pub fn velocity(&self) -> f64 {
        (1.0 - self.zeta * self.zeta) / (1.0 + self.zeta * self.zeta)
    }
}

/// A breather quadruple {±z, ±z̄}, stored by its first-quadrant member.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BreatherEig {
    pub z: Complex64,
    pub c: Complex64,
}

impl BreatherEig {
    /// Velocity (1 − ρ²)/(1 + ρ²) with ρ = |z|.
    pub fn velocity(&self) -> f64 {
        let r2 = self.z.norm_sqr();
        (1.0 - r2) / (1.0 + r2)
    }
}

/// Tolerances recorded alongside computed data.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    pub ode_rtol: f64,
    pub ode_atol: f64,
    pub newton: f64,
    pub singular_abar: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self { ode_rtol: 1e-10, ode_atol: 1e-10, newton: 1e-10, singular_abar: 1e-8 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Meta {
    pub tolerances: Tolerances,
    pub generic: bool,
    /// Time the data refers to.
    #[serde(default)]
    pub t: f64,
    /// Left boundary winding of the field the data came from.
    #[serde(default)]
    pub l_minus: i64,
}

impl Default for Meta {
    fn default() -> Self {
        Self { tolerances: Tolerances::default(), generic: true, t: 0.0, l_minus: 0 }
    }
}

/// Reflection coefficient on a spectral grid plus the discrete spectrum.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScatteringData {
    pub grid: Vec<f64>,
    pub r: Vec<Complex64>,
    pub kinks: Vec<KinkEig>,
    pub breathers: Vec<BreatherEig>,
    pub meta: Meta,
}

impl ScatteringData {
    /// Pure discrete data (r ≡ 0, empty grid).
    pub fn reflectionless(kinks: Vec<KinkEig>, breathers: Vec<BreatherEig>) -> Self {
        Self { grid: vec![], r: vec![], kinks, breathers, meta: Meta::default() }
    }

    pub fn is_reflectionless(&self) -> bool {
        self.r.iter().all(|r| *r == Complex64::new(0.0, 0.0))
    }

    pub fn sup_r(&self) -> f64 {
        self.r.iter().map(|r| r.norm()).fold(0.0, f64::max)
    }

    /// Net winding ℓ₊ − ℓ₋ carried by the kink eigenvalues. A kink has
    /// Im c > 0 and an antikink Im c < 0.
    pub fn net_winding(&self) -> i64 {
        self.kinks.iter().map(|k| if k.c.im > 0.0 { 1 } else { -1 }).sum()
    }

    /// Pole locations in ℂ⁺: i ζ_k for kinks, z_j and −z̄_j for breathers.
    pub fn poles(&self) -> Vec<(Complex64, Complex64)> {
        let mut out: Vec<(Complex64, Complex64)> = self.kinks.iter().map(|k| (k.z(), k.c)).collect();
        for b in &self.breathers {
            out.push((b.z, b.c));
            // symmetry c(−z̄) = −c̄
            out.push((-b.z.conj(), -b.c.conj()));
        }
        out
    }

    /// r at an arbitrary real z, interpolated in λ = z − 1/z on the positive
    /// branch by a six-point Lagrange stencil and extended by r(−z) = r̄(z).
    /// Outside the sampled λ range r is taken to be zero.
    pub fn r_at(&self, z: f64) -> Complex64 {
        if z < 0.0 {
            return self.r_at(-z).conj();
        }
        if self.grid.is_empty() || z == 0.0 {
            return Complex64::new(0.0, 0.0);
        }
        let start = self.grid.partition_point(|&g| g <= 0.0);
        let zs = &self.grid[start..];
        let rs = &self.r[start..];
        let n = zs.len();
        if n == 0 {
            return Complex64::new(0.0, 0.0);
        }
        let lam = z - 1.0 / z;
        let lk = |k: usize| zs[k] - 1.0 / zs[k];
        if lam < lk(0) || lam > lk(n - 1) {
            return Complex64::new(0.0, 0.0);
        }
        if n < 6 {
            let i = zs.partition_point(|&g| g - 1.0 / g < lam).min(n - 1);
            return rs[i];
        }
        let i = zs.partition_point(|&g| g - 1.0 / g < lam);
        let base = i.saturating_sub(3).min(n - 6);
        let mut acc = Complex64::new(0.0, 0.0);
        for k in 0..6 {
            let mut w = 1.0;
            for m in 0..6 {
                if m != k {
                    w *= (lam - lk(base + m)) / (lk(base + k) - lk(base + m));
                }
            }
            acc += rs[base + k] * w;
        }
        acc
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let d: Self = serde_json::from_str(s)?;
        if d.grid.len() != d.r.len() {
            return Err(Error::Format(format!(
                "grid has {} points but r has {}",
                d.grid.len(),
                d.r.len()
            )));
        }
        Ok(d)
    }
}

/// S(z) at a real z.
///
/// For real z all columns are oscillatory, so it suffices to carry m⁻₁ from
/// the left end to the right end of the grid, where m⁺ = I:
/// m⁻₁(R) = (ă, −b e^{2ijR}).
pub fn scattering_matrix(state: &FieldState, z: f64, cfg: &JostConfig) -> Result<ScatteringMatrixSample> {
    let pot = Potential::new(state, cfg.decay_tol)?;
    scattering_matrix_with(&pot, z, cfg)
}

pub fn scattering_matrix_with(pot: &Potential, z: f64, cfg: &JostConfig) -> Result<ScatteringMatrixSample> {
    if z == 0.0 || !z.is_finite() {
        return Err(Error::InvalidParameter("scattering matrix needs real z ≠ 0".into()));
    }
    let zc = Complex64::new(z, 0.0);
    let right = pot.x_max();
    let col = jost::column_from_left(pot, zc, right, cfg)?;
    let j = 0.25 * (z - 1.0 / z);
    let abar = col[0];
    let b = -col[1] * Complex64::from_polar(1.0, -2.0 * j * right);
    Ok(ScatteringMatrixSample { z, a: abar.conj(), abar, b, bbar: -b.conj() })
}

/// ă(z) = det(m⁻₁, m⁺₂) at `x0`, for any z ≠ 0 in the closed upper half plane.
pub fn abar(pot: &Potential, z: Complex64, x0: f64, cfg: &JostConfig) -> Result<Complex64> {
    let c1 = jost::column_from_left(pot, z, x0, cfg)?;
    let c2 = jost::column2_from_right(pot, z, x0, cfg)?;
    Ok(c1[0] * c2[1] - c1[1] * c2[0])
}

/// Reflection coefficient on the grid. Only z > 0 is integrated; the
/// negative half follows from r(−z) = r̄(z).
pub fn reflection_coefficient(
    state: &FieldState,
    grid: &SpectralGrid,
    cfg: &JostConfig,
) -> Result<Vec<Complex64>> {
    let pot = Potential::new(state, cfg.decay_tol)?;
    let pos = grid.positive();
    let samples: Vec<ScatteringMatrixSample> = pos
        .par_iter()
        .map(|&z| scattering_matrix_with(&pot, z, cfg))
        .collect::<Result<_>>()?;
    for s in &samples {
        if s.abar.norm() < cfg.singular_abar {
            return Err(Error::SpectralSingularity { z: s.z, modulus: s.abar.norm() });
        }
    }
    let rp: Vec<Complex64> = samples.iter().map(|s| s.r()).collect();
    // grid order: negatives (mirror of positives, reversed), then positives
    let mut r: Vec<Complex64> = rp.iter().rev().map(|v| v.conj()).collect();
    r.extend(rp);
    Ok(r)
}

/// Options for the full direct transform.
#[derive(Clone, Debug)]
pub struct ScatterOptions {
    pub jost: JostConfig,
    pub grid: SpectralGrid,
    pub search: SearchBox,
}

impl Default for ScatterOptions {
    fn default() -> Self {
        Self { jost: JostConfig::default(), grid: SpectralGrid::default(), search: SearchBox::default() }
    }
}

/// Full direct transform: r on the grid, eigenvalues and norming constants.
pub fn scatter(state: &FieldState, opts: &ScatterOptions) -> Result<ScatteringData> {
    let r = reflection_coefficient(state, &opts.grid, &opts.jost)?;
    let eigs = find_eigenvalues(state, &opts.search, &opts.jost)?;
    let cs = norming_constants(state, &eigs, &opts.jost)?;
    let mut kinks = Vec::new();
    let mut breathers = Vec::new();
    for (e, c) in eigs.iter().zip(cs) {
        if e.is_kink() {
            kinks.push(KinkEig { zeta: e.z.im, c: Complex64::new(0.0, c.im) });
        } else if e.z.re > 0.0 {
            breathers.push(BreatherEig { z: e.z, c });
        }
    }
    let tol = Tolerances {
        ode_rtol: opts.jost.rtol,
        ode_atol: opts.jost.atol,
        newton: opts.search.newton_tol,
        singular_abar: opts.jost.singular_abar,
    };
    Ok(ScatteringData {
        grid: opts.grid.zs.clone(),
        r,
        kinks,
        breathers,
        meta: Meta { tolerances: tol, generic: true, t: state.t, l_minus: state.l_minus },
    })
}
