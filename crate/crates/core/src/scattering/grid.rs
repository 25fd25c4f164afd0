use crate::error::{Error, Result};

/// Real sample points for z, symmetric about 0 and never containing 0.
///
/// The default grid is uniform in λ = z − 1/z on the positive branch,
/// which crowds points geometrically toward z = 0 and thins them toward
/// z = ∞, and is then mirrored to z < 0.
#[derive(Clone, Debug, PartialEq)]
pub struct SpectralGrid {
    pub zs: Vec<f64>,
}

impl Default for SpectralGrid {
    fn default() -> Self {
        Self::lambda_uniform(60.0, 1024).expect("default grid is valid")
    }
}

impl SpectralGrid {
    /// `n` midpoints of a uniform partition of λ ∈ [−lmax, lmax], mapped to
    /// z = (λ + √(λ² + 4))/2 and mirrored: 2n points in total.
    pub fn lambda_uniform(lmax: f64, n: usize) -> Result<Self> {
        if !(lmax > 0.0) || n == 0 {
            return Err(Error::InvalidGrid(format!("need lmax > 0 and n > 0, got {lmax}, {n}")));
        }
        let d = 2.0 * lmax / n as f64;
        let pos: Vec<f64> = (0..n)
            .map(|k| {
                let l = -lmax + (k as f64 + 0.5) * d;
                0.5 * (l + (l * l + 4.0).sqrt())
            })
            .collect();
        Ok(Self::mirrored(&pos))
    }

    /// Build from positive samples, which must be strictly increasing.
    pub fn from_positive(pos: &[f64]) -> Result<Self> {
        if pos.is_empty() || pos[0] <= 0.0 || pos.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidGrid("positive samples must be increasing and > 0".into()));
        }
        Ok(Self::mirrored(pos))
    }

    /// Validate an arbitrary grid (as read from JSON).
    pub fn from_zs(zs: Vec<f64>) -> Result<Self> {
        let n = zs.len();
        if n % 2 == 1 || zs.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidGrid("grid must be sorted with an even count".into()));
        }
        for i in 0..n / 2 {
            if (zs[i] + zs[n - 1 - i]).abs() > 1e-12 * zs[i].abs().max(1.0) || zs[n - 1 - i] <= 0.0 {
                return Err(Error::InvalidGrid("grid must be symmetric and avoid 0".into()));
            }
        }
        Ok(Self { zs })
    }

    fn mirrored(pos: &[f64]) -> Self {
        let mut zs: Vec<f64> = pos.iter().rev().map(|z| -z).collect();
        zs.extend_from_slice(pos);
        Self { zs }
    }

    /// The z > 0 half, increasing.
    pub fn positive(&self) -> &[f64] {
        &self.zs[self.zs.len() / 2..]
    }

    pub fn len(&self) -> usize {
        self.zs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.zs.is_empty()
    }
}
