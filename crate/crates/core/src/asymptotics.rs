//! Long-time asymptotics from the scattering data.
//!
//! Inside the light cone the stationary points ±z₀ of θ carry the radiation
//! and the only solitons that survive in the frame x = vt are those moving
//! at speed v. Solitons slower than the frame (|z| < z₀) enter through the
//! scalar function δ, faster ones drop out. The leading term in a soliton
//! frame is the one-soliton solution with norming constant c δ(z_ℓ)⁻²; the
//! τ^{−1/2} correction comes from the two parabolic-cylinder parametrices.

use crate::error::{Error, Result};
use crate::inverse::{reflectionless_matrix, reflectionless_point, stationary_point, theta};
use crate::numerics::{gauss_legendre, ln_gamma};
use crate::scattering::{BreatherEig, KinkEig, ScatteringData};
use crate::{Complex64, Mat2C};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::fmt;

type C = Complex64;

/// Sign in front of the discrete-spectrum sum in φ(z₀).
///
/// `Derived` (+4) follows from expanding δ⁰_B. `Alternative` (−4) is kept so
/// the two can be compared against the full inverse transform.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum DiscreteSumSign {
    Derived,
    Alternative,
}

#[derive(Clone, Debug, PartialEq)]
pub struct AsymptoticsConfig {
    /// Gauss–Legendre nodes for the χ integrals.
    pub quad_nodes: usize,
    /// A soliton frame is chosen when |v − v_ℓ| < frame_tol/√τ.
    pub frame_tol: f64,
    /// Exponent p ∈ (1, 2) of the exterior bounds.
    pub p: f64,
    pub sum_sign: DiscreteSumSign,
}

impl Default for AsymptoticsConfig {
    fn default() -> Self {
        Self { quad_nodes: 256, frame_tol: 0.5, p: 1.9, sum_sign: DiscreteSumSign::Derived }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FrameKind {
    /// Index into `ScatteringData::kinks`.
    Kink(usize),
    /// Index into `ScatteringData::breathers`.
    Breather(usize),
    Solitonless,
    Exterior,
}

impl fmt::Display for FrameKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FrameKind::Kink(l) => write!(f, "kink:{l}"),
            FrameKind::Breather(l) => write!(f, "breather:{l}"),
            FrameKind::Solitonless => write!(f, "solitonless"),
            FrameKind::Exterior => write!(f, "exterior"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AsymptoticFrame {
    pub v: f64,
    /// Stationary point, `None` outside the light cone.
    pub z0: Option<f64>,
    /// τ = t z₀/(1 + z₀²); zero outside the light cone.
    pub tau: f64,
    pub kind: FrameKind,
}

/// Classify the ray x = vt. `t` is measured from the data's own time.
pub fn frame(data: &ScatteringData, x: f64, t: f64, cfg: &AsymptoticsConfig) -> Result<AsymptoticFrame> {
    if !(t > 0.0) || !x.is_finite() {
        return Err(Error::InvalidParameter(format!("asymptotics need t > 0, got t = {t}")));
    }
    let v = x / t;
    let Some(z0) = stationary_point(x, t) else {
        return Ok(AsymptoticFrame { v, z0: None, tau: 0.0, kind: FrameKind::Exterior });
    };
    let tau = t * z0 / (1.0 + z0 * z0);
    let tol = cfg.frame_tol / tau.sqrt();
    let mut best: Option<(f64, FrameKind)> = None;
    let mut consider = |vl: f64, kind: FrameKind| {
        let d = (v - vl).abs();
        if d < tol && best.is_none_or(|(b, _)| d < b) {
            best = Some((d, kind));
        }
    };
    for (l, k) in data.kinks.iter().enumerate() {
        consider(k.velocity(), FrameKind::Kink(l));
    }
    for (l, b) in data.breathers.iter().enumerate() {
        consider(b.velocity(), FrameKind::Breather(l));
    }
    let kind = best.map_or(FrameKind::Solitonless, |(_, k)| k);
    Ok(AsymptoticFrame { v, z0: Some(z0), tau, kind })
}

/// κ = −(1/2π) log(1 + |r(z₀)|²).
pub fn kappa(r_z0: C) -> f64 {
    -(r_z0.norm_sqr()).ln_1p() / (2.0 * PI)
}

/// Eigenvalues slower than the frame, which dress the problem through δ.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct BSet {
    pub kinks: Vec<KinkEig>,
    pub breathers: Vec<BreatherEig>,
}

impl BSet {
    /// Everything with modulus strictly below `bound`.
    pub fn below(data: &ScatteringData, bound: f64) -> Self {
        Self {
            kinks: data.kinks.iter().copied().filter(|k| k.zeta < bound).collect(),
            breathers: data.breathers.iter().copied().filter(|b| b.z.norm() < bound).collect(),
        }
    }

    /// The set for a frame: moduli below z₀, or below the frame soliton's.
    pub fn for_frame(data: &ScatteringData, fr: &AsymptoticFrame) -> Self {
        let bound = match fr.kind {
            FrameKind::Kink(l) => data.kinks[l].zeta,
            FrameKind::Breather(l) => data.breathers[l].z.norm(),
            _ => fr.z0.unwrap_or(0.0),
        };
        Self::below(data, bound)
    }

    /// The Blaschke-type product of δ (η₀ when evaluated at ±z₀).
    pub fn product(&self, z: C) -> Result<C> {
        let mut p = C::new(1.0, 0.0);
        for k in &self.kinks {
            let zk = k.z();
            p *= (z - zk.conj()) / (z - zk);
        }
        for b in &self.breathers {
            let zj = b.z;
            p *= (z - zj.conj()) / (z - zj) * (z + zj) / (z + zj.conj());
        }
        if !p.is_finite() || p.norm() == 0.0 {
            return Err(Error::InvalidParameter(format!("δ evaluated on an eigenvalue at z = {z}")));
        }
        Ok(p)
    }

    /// Number of kink factors; δ(0) = (−1)^l.
    pub fn kink_count(&self) -> usize {
        self.kinks.len()
    }

    /// Σ arg(z₀ − z_k) + Σ arg(z₀ − z_j) + Σ arg(z₀ + z̄_j).
    pub fn arg_sum(&self, z0: f64) -> f64 {
        let z0 = C::new(z0, 0.0);
        let mut s = 0.0;
        for k in &self.kinks {
            s += (z0 - k.z()).arg();
        }
        for b in &self.breathers {
            s += (z0 - b.z).arg() + (z0 + b.z.conj()).arg();
        }
        s
    }
}

/// The integrals χ and χ̆ over [−z₀, z₀].
#[derive(Clone, Debug)]
pub struct Chi {
    pub z0: f64,
    pub kappa: f64,
    nodes: Vec<f64>,
    weights: Vec<f64>,
    /// log(1 + |r(s)|²) at the nodes.
    log_full: Vec<f64>,
    /// log((1 + |r(s)|²)/(1 + |r(z₀)|²)) at the nodes.
    log_rel: Vec<f64>,
    log_z0: f64,
    data_r: ScatteringData,
}

impl Chi {
    pub fn new(data: &ScatteringData, z0: f64, nodes: usize) -> Result<Self> {
        if !(z0 > 0.0) {
            return Err(Error::InvalidParameter(format!("χ needs z₀ > 0, got {z0}")));
        }
        if !data.grid.is_empty() {
            let zmax = data.grid.iter().fold(0.0f64, |m, z| m.max(z.abs()));
            if zmax < z0 {
                return Err(Error::InvalidParameter(format!(
                    "r sampled up to |z| = {zmax} does not cover [−z₀, z₀] with z₀ = {z0}"
                )));
            }
        }
        let (x, w) = gauss_legendre(nodes.max(8));
        let s: Vec<f64> = x.iter().map(|x| x * z0).collect();
        let weights = w.iter().map(|w| w * z0).collect();
        let log_z0 = data.r_at(z0).norm_sqr().ln_1p();
        let log_full: Vec<f64> = s.iter().map(|&s| data.r_at(s).norm_sqr().ln_1p()).collect();
        let log_rel = log_full.iter().map(|l| l - log_z0).collect();
        let data_r = ScatteringData { kinks: vec![], breathers: vec![], ..data.clone() };
        Ok(Self { z0, kappa: -log_z0 / (2.0 * PI), nodes: s, weights, log_full, log_rel, log_z0, data_r })
    }

    fn cauchy(&self, vals: &[f64], z: C) -> C {
        let mut acc = C::new(0.0, 0.0);
        for ((s, w), v) in self.nodes.iter().zip(&self.weights).zip(vals) {
            acc += w * v / (s - z);
        }
        acc / (2.0 * PI * C::i())
    }

    /// χ(z) by direct quadrature; accurate away from the segment.
    pub fn chi(&self, z: C) -> C {
        self.cauchy(&self.log_full, z)
    }

    /// χ̆(z); the integrand vanishes at ±z₀ so ±z₀ themselves are fine.
    pub fn chi_breve(&self, z: C) -> C {
        self.cauchy(&self.log_rel, z)
    }

    /// ((z − z₀)/(z + z₀))^{iκ} on the principal branch.
    pub fn endpoint_factor(&self, z: C) -> C {
        let z0 = C::new(self.z0, 0.0);
        (C::i() * self.kappa * ((z - z0).ln() - (z + z0).ln())).exp()
    }

    /// e^{χ(z)} assembled as the endpoint factor times e^{χ̆}.
    pub fn exp_chi(&self, z: C) -> C {
        self.endpoint_factor(z) * self.chi_breve(z).exp()
    }

    /// Boundary value of e^{χ} at s ∈ (−z₀, z₀) from above (`upper`) or
    /// below, with the principal value taken by subtraction.
    pub fn exp_chi_boundary(&self, s: f64, upper: bool) -> C {
        let l_s = self.data_r.r_at(s).norm_sqr().ln_1p() - self.log_z0;
        let mut pv = 0.0;
        for ((u, w), v) in self.nodes.iter().zip(&self.weights).zip(&self.log_rel) {
            pv += w * (v - l_s) / (u - s);
        }
        pv += l_s * ((self.z0 - s) / (self.z0 + s)).ln();
        let half = if upper { 0.5 } else { -0.5 };
        let chi_b = C::new(half * l_s, 0.0) + C::new(pv, 0.0) / (2.0 * PI * C::i());
        // (z − z₀) has argument ±π on the segment
        let arg = if upper { PI } else { -PI };
        let ratio = ((self.z0 - s) / (self.z0 + s)).ln();
        let end = (C::i() * self.kappa * C::new(ratio, arg)).exp();
        end * chi_b.exp()
    }
}

/// δ(z) for a frame: the product over the B set times e^{χ}.
#[derive(Clone, Debug)]
pub struct Delta {
    pub chi: Option<Chi>,
    pub bset: BSet,
}

impl Delta {
    pub fn new(data: &ScatteringData, fr: &AsymptoticFrame, cfg: &AsymptoticsConfig) -> Result<Self> {
        let chi = match fr.z0 {
            Some(z0) if !data.is_reflectionless() => Some(Chi::new(data, z0, cfg.quad_nodes)?),
            _ => None,
        };
        Ok(Self { chi, bset: BSet::for_frame(data, fr) })
    }

    pub fn eval(&self, z: C) -> Result<C> {
        let e = self.chi.as_ref().map_or(C::new(1.0, 0.0), |c| c.exp_chi(z));
        Ok(self.bset.product(z)? * e)
    }

    pub fn boundary(&self, s: f64, upper: bool) -> Result<C> {
        let e = self.chi.as_ref().map_or(C::new(1.0, 0.0), |c| c.exp_chi_boundary(s, upper));
        Ok(self.bset.product(C::new(s, 0.0))? * e)
    }
}

/// Constants of the two parabolic-cylinder parametrices at ±z₀.
#[derive(Clone, Debug, PartialEq)]
pub struct SteepestConstants {
    pub kappa: f64,
    pub r_z0: C,
    pub chi_z0: C,
    pub chibar_z0: C,
    pub eta0_plus: C,
    pub eta0_minus: C,
    pub delta0_a: C,
    pub delta0_b: C,
    pub beta12: C,
    pub beta21: C,
    /// The same constants built from the data at −z₀.
    pub beta12_a: C,
    pub beta21_a: C,
    pub phi_z0: f64,
    pub tau: f64,
    /// True when r(z₀) = 0 and every radiation term vanishes.
    pub degenerate: bool,
}

fn pc_betas(r: C, kappa: f64) -> (C, C) {
    if r.norm() == 0.0 {
        return (C::new(0.0, 0.0), C::new(0.0, 0.0));
    }
    let amp = (2.0 * PI).sqrt() * (-PI * kappa / 2.0).exp();
    let g_minus = ln_gamma(C::new(0.0, -kappa)).exp();
    let g_plus = ln_gamma(C::new(0.0, kappa)).exp();
    let b12 = amp * C::from_polar(1.0, PI / 4.0) / (r * g_minus);
    let b21 = -amp * C::from_polar(1.0, -PI / 4.0) / (r.conj() * g_plus);
    (b12, b21)
}

/// Steepest-descent constants for an interior frame.
pub fn pc_constants(data: &ScatteringData, fr: &AsymptoticFrame, cfg: &AsymptoticsConfig) -> Result<SteepestConstants> {
    let z0 = fr.z0.ok_or_else(|| Error::Frame("parabolic-cylinder constants need |x/t| < 1".into()))?;
    let tau = fr.tau;
    let bset = BSet::for_frame(data, fr);
    let r_z0 = data.r_at(z0);
    let k = kappa(r_z0);
    let (chi_z0, chibar_z0, chibar_mz0) = if data.is_reflectionless() {
        (C::new(0.0, 0.0), C::new(0.0, 0.0), C::new(0.0, 0.0))
    } else {
        let chi = Chi::new(data, z0, cfg.quad_nodes)?;
        (chi.chi(C::new(z0, 0.0)), chi.chi_breve(C::new(z0, 0.0)), chi.chi_breve(C::new(-z0, 0.0)))
    };
    let eta0_plus = bset.product(C::new(z0, 0.0))?;
    let eta0_minus = bset.product(C::new(-z0, 0.0))?;
    let scale = (8.0 * tau).ln();
    let delta0_b = C::from_polar(1.0, -k * scale / 2.0 - tau) * chibar_z0.exp() * eta0_plus;
    let delta0_a = C::from_polar(1.0, k * scale / 2.0 + tau) * chibar_mz0.exp() * eta0_minus;
    let (beta12, beta21) = pc_betas(r_z0, k);
    // the A side sees r(−z₀); by r(−z) = r̄(z) its constants are conjugated
    let (b12a, b21a) = pc_betas(data.r_at(-z0).conj(), k);
    let sign = match cfg.sum_sign {
        DiscreteSumSign::Derived => 4.0,
        DiscreteSumSign::Alternative => -4.0,
    };
    let phi_z0 = if r_z0.norm() == 0.0 {
        0.0
    } else {
        -ln_gamma(C::new(0.0, k)).im + PI / 4.0 - r_z0.conj().arg() + (-2.0 * chibar_z0).im
            + sign * bset.arg_sum(z0)
    };
    Ok(SteepestConstants {
        kappa: k,
        r_z0,
        chi_z0,
        chibar_z0,
        eta0_plus,
        eta0_minus,
        delta0_a,
        delta0_b,
        beta12,
        beta21,
        beta12_a: b12a,
        beta21_a: b21a,
        phi_z0,
        tau,
        degenerate: r_z0.norm() == 0.0,
    })
}

impl SteepestConstants {
    /// Residue at infinity of the model problem at +z₀.
    pub fn m_b0_1(&self) -> Mat2C {
        let i = C::i();
        Mat2C::new(C::new(0.0, 0.0), -i * self.beta12, i * self.beta21, C::new(0.0, 0.0))
    }

    /// Residue at infinity of the model problem at −z₀, from the A-side
    /// constants.
    pub fn m_a0_1(&self) -> Mat2C {
        let i = C::i();
        Mat2C::new(C::new(0.0, 0.0), i * self.beta12_a.conj(), -i * self.beta21_a.conj(), C::new(0.0, 0.0))
    }

    /// The local coefficient at +z₀ after undoing the Δ⁰_B scaling.
    fn x_b(&self) -> Mat2C {
        let i = C::i();
        let d2 = self.delta0_b * self.delta0_b;
        Mat2C::new(C::new(0.0, 0.0), -i * d2 * self.beta12, i * self.beta21 / d2, C::new(0.0, 0.0))
    }

    fn x_a(&self) -> Mat2C {
        let i = C::i();
        let d2 = self.delta0_a * self.delta0_a;
        Mat2C::new(C::new(0.0, 0.0), i * d2 * self.beta12_a.conj(), -i * self.beta21_a.conj() / d2, C::new(0.0, 0.0))
    }

    /// E(0) − I for the radiation parametrices dressed by the soliton
    /// solution at ±z₀. Both local variables equal −√(2τ) at z = 0.
    pub fn correction(&self, m_plus: &Mat2C, m_minus: &Mat2C) -> Result<Mat2C> {
        let ad = |m: &Mat2C, x: Mat2C| -> Result<Mat2C> {
            let inv = m.try_inverse().ok_or_else(|| Error::NotFinite(0))?;
            Ok(m * x * inv)
        };
        let s = -1.0 / (2.0 * self.tau).sqrt();
        Ok((ad(m_plus, self.x_b())? + ad(m_minus, self.x_a())?) * C::new(s, 0.0))
    }
}

/// cos f and sin f with their leading term and τ^{−1/2} correction.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AsymptoticSample {
    pub x: f64,
    pub t: f64,
    pub frame: FrameKind,
    pub cos_lead: f64,
    pub sin_lead: f64,
    pub r_cos: f64,
    pub r_sin: f64,
    pub cos_total: f64,
    pub sin_total: f64,
}

/// Leading radiation in a soliton-free interior frame.
pub fn radiation_solitonless(data: &ScatteringData, x: f64, t: f64, cfg: &AsymptoticsConfig) -> Result<(f64, f64)> {
    let t_rel = t - data.meta.t;
    let fr = frame(data, x, t_rel, cfg)?;
    if fr.kind != FrameKind::Solitonless {
        return Err(Error::Frame(format!("ray x/t = {} is a {} frame", fr.v, fr.kind)));
    }
    let c = pc_constants(data, &fr, cfg)?;
    Ok(solitonless_from(&c))
}

fn solitonless_from(c: &SteepestConstants) -> (f64, f64) {
    if c.degenerate {
        return (1.0, 0.0);
    }
    let tau = c.tau;
    let phase = 2.0 * tau + c.kappa * (8.0 * tau).ln() + c.phi_z0;
    let k = c.kappa.abs();
    (1.0 - 4.0 * k / tau * phase.cos().powi(2), (8.0 * k / tau).sqrt() * phase.cos())
}

fn cos_sin(m: &Mat2C) -> (f64, f64) {
    ((1.0 + 2.0 * m[(0, 1)] * m[(1, 0)]).re, (2.0 * m[(1, 0)] * m[(1, 1)]).re)
}

/// First-order change of (cos f, sin f) when m(0) → (I + ε) m(0).
fn linearised(eps: &Mat2C, m: &Mat2C) -> (f64, f64) {
    let d = eps * m;
    let dc = 2.0 * (d[(0, 1)] * m[(1, 0)] + m[(0, 1)] * d[(1, 0)]);
    let ds = 2.0 * (d[(1, 0)] * m[(1, 1)] + m[(1, 0)] * d[(1, 1)]);
    (dc.re, ds.re)
}

/// Leading one-soliton data for a frame, with c replaced by c δ(z_ℓ)⁻².
fn dressed_data(data: &ScatteringData, fr: &AsymptoticFrame, delta: &Delta) -> Result<ScatteringData> {
    let mut out = ScatteringData::reflectionless(vec![], vec![]);
    out.meta = data.meta.clone();
    match fr.kind {
        FrameKind::Kink(l) => {
            let k = data.kinks[l];
            let d = delta.eval(k.z())?;
            // δ(iζ) is real, so the constant stays on iℝ
            out.kinks.push(KinkEig { zeta: k.zeta, c: C::new(0.0, (k.c / (d * d)).im) });
        }
        FrameKind::Breather(l) => {
            let b = data.breathers[l];
            let d = delta.eval(b.z)?;
            out.breathers.push(BreatherEig { z: b.z, c: b.c / (d * d) });
        }
        _ => return Err(Error::Frame(format!("{} is not a soliton frame", fr.kind))),
    }
    Ok(out)
}

fn dressed(data: &ScatteringData, x: f64, t: f64, fr: &AsymptoticFrame, cfg: &AsymptoticsConfig) -> Result<AsymptoticSample> {
    let t_rel = t - data.meta.t;
    let delta = Delta::new(data, fr, cfg)?;
    let sol = dressed_data(data, fr, &delta)?;
    let m0 = reflectionless_point(&sol, x, t_rel)?.m0;
    let (cos_lead, sin_lead) = cos_sin(&m0);
    let c = pc_constants(data, fr, cfg)?;
    let (r_cos, r_sin) = if c.degenerate {
        (0.0, 0.0)
    } else {
        let z0 = fr.z0.unwrap_or(1.0);
        let mp = reflectionless_matrix(&sol, C::new(z0, 0.0), x, t_rel)?;
        let mm = reflectionless_matrix(&sol, C::new(-z0, 0.0), x, t_rel)?;
        let eps = c.correction(&mp, &mm)?;
        let (dc, ds) = linearised(&eps, &m0);
        (dc * fr.tau.sqrt(), ds * fr.tau.sqrt())
    };
    let s = fr.tau.sqrt();
    Ok(AsymptoticSample {
        x,
        t,
        frame: fr.kind,
        cos_lead,
        sin_lead,
        r_cos,
        r_sin,
        cos_total: cos_lead + r_cos / s,
        sin_total: sin_lead + r_sin / s,
    })
}

/// Dressed kink ℓ with its τ^{−1/2} correction.
pub fn dressed_kink(data: &ScatteringData, l: usize, x: f64, t: f64, cfg: &AsymptoticsConfig) -> Result<AsymptoticSample> {
    let fr = frame(data, x, t - data.meta.t, cfg)?;
    if fr.kind != FrameKind::Kink(l) {
        return Err(Error::Frame(format!("ray x/t = {} is a {} frame, not kink:{l}", fr.v, fr.kind)));
    }
    dressed(data, x, t, &fr, cfg)
}

/// Dressed breather ℓ with its τ^{−1/2} correction.
pub fn dressed_breather(data: &ScatteringData, l: usize, x: f64, t: f64, cfg: &AsymptoticsConfig) -> Result<AsymptoticSample> {
    let fr = frame(data, x, t - data.meta.t, cfg)?;
    if fr.kind != FrameKind::Breather(l) {
        return Err(Error::Frame(format!("ray x/t = {} is a {} frame, not breather:{l}", fr.v, fr.kind)));
    }
    dressed(data, x, t, &fr, cfg)
}

/// Decay exponents (cos f − 1, sin f) outside the light cone.
pub fn exterior_bound(x: f64, t: f64, p: f64) -> Result<(f64, f64)> {
    if !(t > 0.0) || x.abs() <= t {
        return Err(Error::Frame(format!("exterior bounds need |x/t| > 1, got x = {x}, t = {t}")));
    }
    if !(p > 1.0 && p < 2.0) {
        return Err(Error::InvalidParameter(format!("p = {p} must lie in (1, 2)")));
    }
    let s = -1.5 + 1.0 / p;
    Ok((2.0 * s, s))
}

/// Dispatch on the frame of (x, t).
pub fn asymptote(data: &ScatteringData, x: f64, t: f64, cfg: &AsymptoticsConfig) -> Result<AsymptoticSample> {
    let fr = frame(data, x, t - data.meta.t, cfg)?;
    match fr.kind {
        FrameKind::Kink(_) | FrameKind::Breather(_) => dressed(data, x, t, &fr, cfg),
        FrameKind::Solitonless => {
            let c = pc_constants(data, &fr, cfg)?;
            let (cos_as, sin_as) = solitonless_from(&c);
            let s = fr.tau.sqrt();
            Ok(AsymptoticSample {
                x,
                t,
                frame: fr.kind,
                cos_lead: 1.0,
                sin_lead: 0.0,
                r_cos: (cos_as - 1.0) * s,
                r_sin: sin_as * s,
                cos_total: cos_as,
                sin_total: sin_as,
            })
        }
        FrameKind::Exterior => Ok(AsymptoticSample {
            x,
            t,
            frame: fr.kind,
            cos_lead: 1.0,
            sin_lead: 0.0,
            r_cos: 0.0,
            r_sin: 0.0,
            cos_total: 1.0,
            sin_total: 0.0,
        }),
    }
}

/// Closed-form kink m(0) with effective constant c = ib (already dressed).
/// Returns (cos f, sin f).
pub fn kink_closed_form(zeta: f64, b: f64, x: f64, t: f64) -> (f64, f64) {
    let w = (2.0 * C::i() * theta(C::new(0.0, zeta), x, t)).re;
    let q = b * w.exp() / (2.0 * zeta);
    let d = 1.0 + q * q;
    (1.0 - 8.0 * q * q / (d * d), -4.0 * q * (1.0 - q * q) / (d * d))
}

/// Closed-form one-breather m(0) for pole z with effective constant c.
pub fn breather_m0_closed_form(z: C, c: C, x: f64, t: f64) -> Mat2C {
    let w = c * (2.0 * C::i() * theta(z, x, t)).exp();
    let d1 = 1.0 - w.norm_sqr() / (4.0 * z.norm_sqr()) - w.norm_sqr() / ((z - z.conj()) * (z - z.conj())).re;
    let n = (w / (2.0 * z) + w.conj() / (2.0 * z.conj())).re;
    let den = d1 * d1 + n * n;
    let m11 = (d1 * d1 - n * n) / den;
    let m21 = -2.0 * n * d1 / den;
    Mat2C::new(C::new(m11, 0.0), C::new(-m21, 0.0), C::new(m21, 0.0), C::new(m11, 0.0))
}

/// The breather profile in sech/cos form: returns (cos u, sin u).
pub fn breather_closed_form(z: C, c: C, x: f64, t: f64) -> (f64, f64) {
    let (xi, eta) = (z.re, z.im);
    let rho2 = z.norm_sqr();
    let two_tr = -0.5 * eta * ((1.0 + 1.0 / rho2) * x + (1.0 - 1.0 / rho2) * t);
    let two_ti = 0.5 * xi * ((1.0 - 1.0 / rho2) * x + (1.0 + 1.0 / rho2) * t);
    let h = (xi * c.norm() / (2.0 * eta * rho2.sqrt())).ln();
    let alpha = c.arg() - (eta / xi).atan();
    let s = eta / xi / (two_tr + h).cosh() * (two_ti + alpha).cos();
    let d = 1.0 + s * s;
    (1.0 - 8.0 * s * s / (d * d), -4.0 * s * (1.0 - s * s) / (d * d))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gaussian_r(amp: f64) -> ScatteringData {
        let grid: Vec<f64> = (1..=400).map(|k| 0.02 * k as f64).collect();
        let mut zs: Vec<f64> = grid.iter().rev().map(|z| -z).collect();
        zs.extend(&grid);
        let r = zs
            .iter()
            .map(|&z: &f64| {
                let lam = z - 1.0 / z;
                C::from_polar(amp * (-lam * lam / 8.0).exp(), 0.3 * lam)
            })
            .collect();
        let mut d = ScatteringData::reflectionless(vec![], vec![]);
        d.grid = zs;
        d.r = r;
        d
    }

    #[test]
    fn kappa_values() {
        assert_eq!(kappa(C::new(0.0, 0.0)), 0.0);
        let r = ((2.0 * PI).exp() - 1.0).sqrt();
        assert!((kappa(C::new(r, 0.0)) + 1.0).abs() < 1e-14);
        assert!((kappa(C::new(0.0, 0.3)) + 1.09f64.ln() / (2.0 * PI)).abs() < 1e-15);
    }

    #[test]
    fn chi_is_odd_and_vanishes_at_zero() {
        let d = gaussian_r(0.4);
        let chi = Chi::new(&d, 0.8, 256).unwrap();
        assert!(chi.chi(C::new(0.0, 0.0)).norm() < 1e-12);
        let z = C::new(0.3, 0.7);
        assert!((chi.chi(-z) + chi.chi(z)).norm() < 1e-12);
    }

    #[test]
    fn delta_jump_and_symmetry() {
        let d = gaussian_r(0.5);
        let fr = AsymptoticFrame { v: 0.2, z0: Some(0.8), tau: 10.0, kind: FrameKind::Solitonless };
        let delta = Delta::new(&d, &fr, &AsymptoticsConfig::default()).unwrap();
        let s = 0.4;
        let jump = delta.boundary(s, true).unwrap() / delta.boundary(s, false).unwrap();
        let expect = 1.0 + d.r_at(s).norm_sqr();
        assert!((jump.norm() - expect).abs() < 1e-6, "{jump} vs {expect}");
        let z = C::new(1.0, 1.0);
        let lhs = delta.eval(z).unwrap();
        let rhs = 1.0 / delta.eval(z.conj()).unwrap().conj();
        assert!((lhs - rhs).norm() < 1e-10);
    }

    #[test]
    fn delta_at_origin_counts_kinks() {
        let mut d = ScatteringData::reflectionless(
            vec![KinkEig { zeta: 0.3, c: C::new(0.0, 1.0) }, KinkEig { zeta: 0.5, c: C::new(0.0, -1.0) }],
            vec![BreatherEig { z: C::from_polar(0.4, 1.0), c: C::new(1.0, 0.5) }],
        );
        d.meta.t = 0.0;
        let fr = AsymptoticFrame { v: 0.0, z0: Some(1.0), tau: 5.0, kind: FrameKind::Solitonless };
        let delta = Delta::new(&d, &fr, &AsymptoticsConfig::default()).unwrap();
        let d0 = delta.eval(C::new(0.0, 1e-9)).unwrap();
        assert!((d0 - 1.0).norm() < 1e-6, "{d0}");
        assert_eq!(delta.bset.kink_count(), 2);
    }

    #[test]
    fn beta_modulus_is_kappa() {
        let d = gaussian_r(0.7);
        let fr = frame(&d, 10.0, 50.0, &AsymptoticsConfig::default()).unwrap();
        let c = pc_constants(&d, &fr, &AsymptoticsConfig::default()).unwrap();
        assert!((c.beta12.norm_sqr() - c.kappa.abs()).abs() < 1e-10);
        assert!((c.beta21 + c.beta12.conj()).norm() < 1e-12);
        assert!((c.delta0_a.norm() - 1.0).abs() < 1e-12 && (c.delta0_b.norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn solitonless_envelope() {
        let d = gaussian_r(0.3);
        let cfg = AsymptoticsConfig::default();
        let (c, s) = radiation_solitonless(&d, 20.0, 100.0, &cfg).unwrap();
        let fr = frame(&d, 20.0, 100.0, &cfg).unwrap();
        let k = pc_constants(&d, &fr, &cfg).unwrap().kappa.abs();
        assert!(s.abs() <= (8.0 * k / fr.tau).sqrt() + 1e-15);
        assert!(((1.0 - c) * 2.0 - s * s).abs() < 1e-15);
    }

    #[test]
    fn exterior_exponents() {
        let (c, s) = exterior_bound(20.0, 10.0, 1.9).unwrap();
        assert!((s + 0.973_684_210_526_315_8).abs() < 1e-12);
        assert_eq!(c, 2.0 * s);
        assert!(exterior_bound(5.0, 10.0, 1.9).is_err());
    }

    #[test]
    fn reflectionless_kink_frame_is_the_kink() {
        let d = ScatteringData::reflectionless(vec![KinkEig { zeta: 0.8, c: C::new(0.0, 2.0) }], vec![]);
        let cfg = AsymptoticsConfig::default();
        let v = d.kinks[0].velocity();
        let t = 40.0;
        let out = dressed_kink(&d, 0, v * t + 0.3, t, &cfg).unwrap();
        let (c, s) = kink_closed_form(0.8, 2.0, v * t + 0.3, t);
        assert!((out.cos_lead - c).abs() < 1e-12 && (out.sin_lead - s).abs() < 1e-12);
        assert_eq!((out.r_cos, out.r_sin), (0.0, 0.0));
    }

    #[test]
    fn breather_closed_forms_agree_with_the_solver() {
        let z = C::from_polar(0.9, 0.8);
        let c = C::new(0.4, -1.3);
        let d = ScatteringData::reflectionless(vec![], vec![BreatherEig { z, c }]);
        for (x, t) in [(0.0, 0.0), (0.7, 1.1), (-1.3, 2.0)] {
            let m = reflectionless_point(&d, x, t).unwrap().m0;
            let mc = breather_m0_closed_form(z, c, x, t);
            let (cs, sn) = cos_sin(&mc);
            let (cs2, sn2) = cos_sin(&m);
            assert!((cs - cs2).abs() < 1e-10 && (sn - sn2).abs() < 1e-10, "{x} {t}");
            assert!((mc[(0, 0)].re.powi(2) + mc[(1, 0)].re.powi(2) - 1.0).abs() < 1e-12);
            let (cb, sb) = breather_closed_form(z, c, x, t);
            assert!((cb - cs2).abs() < 1e-10 && (sb - sn2).abs() < 1e-10, "{x} {t}: {sb} vs {sn2}");
        }
    }
}
