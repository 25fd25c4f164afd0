//! Flat `key = value` run configuration.
//!
//! Every key has a documented default (see [`KEYS`] or `--print-config`).
//! Files may contain blank lines and `#` comments; unknown keys are errors so
//! that typos do not silently fall back to defaults. The environment variable
//! `SG_IST_THREADS` caps the worker count on top of the `threads` key.

use crate::asymptotics::{AsymptoticsConfig, DiscreteSumSign};
use crate::error::{Error, Result};
use crate::inverse::FullConfig;
use crate::pde::{Boundary, SolverConfig};
use crate::scattering::{ScatterOptions, SpectralGrid};
use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;
use std::str::FromStr;

pub const THREADS_ENV: &str = "SG_IST_THREADS";

pub struct ConfigKey {
    pub key: &'static str,
    pub default: &'static str,
    pub doc: &'static str,
}

macro_rules! keys {
    ($(($k:expr, $d:expr, $doc:expr)),* $(,)?) => {
        &[$(ConfigKey { key: $k, default: $d, doc: $doc }),*]
    };
}

pub const KEYS: &[ConfigKey] = keys![
    ("seed", "0", "seed for randomised test-data generation"),
    ("threads", "0", "worker threads, 0 = one per core"),
    ("scatter.rtol", "1e-10", "Jost ODE relative tolerance"),
    ("scatter.atol", "1e-10", "Jost ODE absolute tolerance"),
    ("scatter.decay_tol", "1e-6", "largest |f - 2πl|, |f_x|, |f_t| accepted at the grid ends"),
    ("scatter.singular_abar", "1e-8", "|abar| on the real line below this is a spectral singularity"),
    ("scatter.lambda_max", "60", "spectral grid covers λ = z - 1/z in [-lambda_max, lambda_max]"),
    ("scatter.grid_n", "1024", "spectral samples per half line"),
    ("scatter.re_max", "4", "eigenvalue search box |Re z| bound"),
    ("scatter.im_min", "0.02", "eigenvalue search box lower Im z"),
    ("scatter.im_max", "4", "eigenvalue search box upper Im z"),
    ("scatter.newton_tol", "1e-10", "Newton tolerance for eigenvalues"),
    ("inverse.nodes", "8192", "circle nodes of the Beals-Coifman solver"),
    ("inverse.tol", "1e-10", "GMRES relative tolerance"),
    ("inverse.max_iter", "200", "GMRES iteration cap"),
    ("inverse.restart", "40", "GMRES restart length"),
    ("inverse.dual_tol", "1e-7", "accepted gap between the two f_x + f_t reconstructions"),
    ("asym.quad_nodes", "256", "Gauss-Legendre nodes for χ"),
    ("asym.frame_tol", "0.5", "soliton frame when |v - v_l| < frame_tol/sqrt(τ)"),
    ("asym.p", "1.9", "exponent p in (1,2) of the exterior bounds"),
    ("asym.sum_sign", "derived", "discrete sum sign in φ(z0): derived (+4) or alternative (-4)"),
    ("pde.h", "0.05", "finite-difference grid spacing"),
    ("pde.dt", "0.025", "leapfrog time step"),
    ("pde.boundary", "periodic", "periodic (after kink subtraction) or sponge"),
    ("pde.sponge_width", "20", "sponge layer width"),
    ("pde.sponge_strength", "1", "sponge damping peak"),
    ("compare.v", "0.3", "frame velocity of the compare harness"),
    ("compare.times", "50,100,200", "comparison times"),
    ("compare.window", "10", "half-width of the comparison window around x = vt"),
    ("gate.interior_slope", "-0.6", "required fitted exponent of the interior discrepancy"),
    ("gate.exterior_slope", "-1.0", "required fitted exponent of |sin f| outside the light cone"),
    ("gate.kink_drift", "0.5", "largest kink-centre deviation from its straight path"),
    ("gate.envelope_rel", "0.1", "relative tolerance of the radiation envelope"),
];

#[derive(Clone, Debug, PartialEq)]
pub struct Config {
    values: BTreeMap<String, String>,
}

impl Default for Config {
    fn default() -> Self {
        Self { values: KEYS.iter().map(|k| (k.key.to_string(), k.default.to_string())).collect() }
    }
}

impl Config {
    /// Apply `key = value` lines on top of the defaults.
    pub fn parse(text: &str) -> Result<Self> {
        let mut cfg = Self::default();
        for (n, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            cfg.set(line).map_err(|e| Error::Format(format!("line {}: {e}", n + 1)))?;
        }
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    /// Apply one `key=value` override.
    pub fn set(&mut self, assignment: &str) -> Result<()> {
        let (k, v) = assignment
            .split_once('=')
            .ok_or_else(|| Error::Format(format!("expected key=value, got '{assignment}'")))?;
        let (k, v) = (k.trim(), v.trim());
        match self.values.get_mut(k) {
            Some(slot) => {
                *slot = v.to_string();
                Ok(())
            }
            None => Err(Error::Format(format!("unknown config key '{k}'"))),
        }
    }

    pub fn raw(&self, key: &str) -> Result<&str> {
        self.values.get(key).map(String::as_str).ok_or_else(|| Error::Format(format!("unknown config key '{key}'")))
    }

    pub fn get<T: FromStr>(&self, key: &str) -> Result<T> {
        let raw = self.raw(key)?;
        raw.parse().map_err(|_| Error::Format(format!("cannot parse {key} = '{raw}'")))
    }

    pub fn get_list(&self, key: &str) -> Result<Vec<f64>> {
        self.raw(key)?
            .split(',')
            .map(|s| s.trim().parse().map_err(|_| Error::Format(format!("cannot parse list {key}"))))
            .collect()
    }

    /// Every key with its current value and documentation.
    pub fn render(&self) -> String {
        let mut out = String::new();
        for k in KEYS {
            let _ = writeln!(out, "# {} (default {})", k.doc, k.default);
            let _ = writeln!(out, "{} = {}", k.key, self.values[k.key]);
        }
        out
    }

    /// Worker count: the `threads` key, capped by `SG_IST_THREADS`. `None`
    /// means no limit.
    pub fn threads(&self) -> Result<Option<usize>> {
        let own: usize = self.get("threads")?;
        let env = match std::env::var(THREADS_ENV) {
            Ok(s) => Some(
                s.trim()
                    .parse::<usize>()
                    .map_err(|_| Error::Format(format!("{THREADS_ENV} must be a positive integer, got '{s}'")))?,
            ),
            Err(_) => None,
        };
        Ok(match (own, env) {
            (0, None) | (0, Some(0)) => None,
            (0, Some(e)) => Some(e),
            (n, None) | (n, Some(0)) => Some(n),
            (n, Some(e)) => Some(n.min(e)),
        })
    }

    pub fn scatter_options(&self) -> Result<ScatterOptions> {
        let mut o = ScatterOptions::default();
        o.jost.rtol = self.get("scatter.rtol")?;
        o.jost.atol = self.get("scatter.atol")?;
        o.jost.decay_tol = self.get("scatter.decay_tol")?;
        o.jost.singular_abar = self.get("scatter.singular_abar")?;
        o.grid = SpectralGrid::lambda_uniform(self.get("scatter.lambda_max")?, self.get("scatter.grid_n")?)?;
        let re: f64 = self.get("scatter.re_max")?;
        o.search.re_min = -re;
        o.search.re_max = re;
        o.search.im_min = self.get("scatter.im_min")?;
        o.search.im_max = self.get("scatter.im_max")?;
        o.search.newton_tol = self.get("scatter.newton_tol")?;
        Ok(o)
    }

    pub fn full_config(&self) -> Result<FullConfig> {
        Ok(FullConfig {
            nodes: self.get("inverse.nodes")?,
            tol: self.get("inverse.tol")?,
            max_iter: self.get("inverse.max_iter")?,
            restart: self.get("inverse.restart")?,
            dual_tol: self.get("inverse.dual_tol")?,
            ..FullConfig::default()
        })
    }

    pub fn asymptotics_config(&self) -> Result<AsymptoticsConfig> {
        let sum_sign = match self.raw("asym.sum_sign")? {
            "derived" => DiscreteSumSign::Derived,
            "alternative" => DiscreteSumSign::Alternative,
            other => return Err(Error::Format(format!("asym.sum_sign must be derived or alternative, got '{other}'"))),
        };
        Ok(AsymptoticsConfig {
            quad_nodes: self.get("asym.quad_nodes")?,
            frame_tol: self.get("asym.frame_tol")?,
            p: self.get("asym.p")?,
            sum_sign,
        })
    }

    pub fn solver_config(&self, t_final: f64) -> Result<SolverConfig> {
        let boundary = match self.raw("pde.boundary")? {
            "periodic" => Boundary::PeriodicKinkSubtracted,
            "sponge" => Boundary::Sponge {
                width: self.get("pde.sponge_width")?,
                strength: self.get("pde.sponge_strength")?,
            },
            other => return Err(Error::Format(format!("pde.boundary must be periodic or sponge, got '{other}'"))),
        };
        SolverConfig::new(self.get("pde.h")?, self.get("pde.dt")?, t_final, boundary)
    }
}
