//! Small numerical kernels shared by the modules: quadrature, finite
//! differences, uniform-grid interpolation, phase unwrapping and the complex
//! Gamma function.

use num_complex::Complex64;
use std::f64::consts::PI;

/// Composite Simpson rule on uniformly spaced samples.
///
/// An even number of samples is handled by closing the last three intervals
/// with the 3/8 rule, so the result stays fourth order for any length ≥ 3.
pub fn simpson(y: &[f64], h: f64) -> f64 {
    let n = y.len();
    let odd = |y: &[f64]| {
        let m = y.len();
        let mut s = y[0] + y[m - 1];
        for (i, v) in y.iter().enumerate().take(m - 1).skip(1) {
            s += if i % 2 == 1 { 4.0 * v } else { 2.0 * v };
        }
        s * h / 3.0
    };
    let three_eighths = |y: &[f64]| 3.0 * h / 8.0 * (y[0] + 3.0 * y[1] + 3.0 * y[2] + y[3]);
    match n {
        0 | 1 => 0.0,
        2 => 0.5 * h * (y[0] + y[1]),
        4 => three_eighths(y),
        _ if n % 2 == 1 => odd(y),
        _ => odd(&y[..n - 3]) + three_eighths(&y[n - 4..]),
    }
}

/// Trapezoid rule on uniformly spaced samples.
pub fn trapezoid(y: &[f64], h: f64) -> f64 {
    if y.len() < 2 {
        return 0.0;
    }
    let inner: f64 = y[1..y.len() - 1].iter().sum();
    h * (inner + 0.5 * (y[0] + y[y.len() - 1]))
}

/// First derivative by fourth-order central differences, with fourth-order
/// one-sided stencils on the two outermost points at each end.
pub fn diff4(f: &[f64], h: f64) -> Vec<f64> {
    let n = f.len();
    let mut d = vec![0.0; n];
    if n < 5 {
        // too short for the wide stencil: plain second order
        for i in 0..n {
            d[i] = if i == 0 {
                (f[1] - f[0]) / h
            } else if i == n - 1 {
                (f[n - 1] - f[n - 2]) / h
            } else {
                (f[i + 1] - f[i - 1]) / (2.0 * h)
            };
        }
        return d;
    }
    for i in 2..n - 2 {
        d[i] = (f[i - 2] - 8.0 * f[i - 1] + 8.0 * f[i + 1] - f[i + 2]) / (12.0 * h);
    }
    let fwd = |i: usize| {
        (-25.0 * f[i] + 48.0 * f[i + 1] - 36.0 * f[i + 2] + 16.0 * f[i + 3] - 3.0 * f[i + 4])
            / (12.0 * h)
    };
    let bwd = |i: usize| {
        (25.0 * f[i] - 48.0 * f[i - 1] + 36.0 * f[i - 2] - 16.0 * f[i - 3] + 3.0 * f[i - 4])
            / (12.0 * h)
    };
    d[0] = fwd(0);
    d[1] = (-3.0 * f[0] - 10.0 * f[1] + 18.0 * f[2] - 6.0 * f[3] + f[4]) / (12.0 * h);
    d[n - 1] = bwd(n - 1);
    d[n - 2] = (3.0 * f[n - 1] + 10.0 * f[n - 2] - 18.0 * f[n - 3] + 6.0 * f[n - 4] - f[n - 5])
        / (12.0 * h);
    d
}

/// First derivative by sixth-order central differences; falls back to
/// [`diff4`] within three points of either end.
pub fn diff6(f: &[f64], h: f64) -> Vec<f64> {
    let n = f.len();
    let mut d = diff4(f, h);
    if n < 7 {
        return d;
    }
    for i in 3..n - 3 {
        d[i] = (-f[i - 3] + 9.0 * f[i - 2] - 45.0 * f[i - 1] + 45.0 * f[i + 1] - 9.0 * f[i + 2]
            + f[i + 3])
            / (60.0 * h);
    }
    d
}

/// Degree-5 Lagrange interpolation weights on a uniform grid.
///
/// Returns the first stencil index and the six weights, or `None` when `x`
/// lies outside `[x0, x0 + (n-1) h]`.
pub fn lagrange6(x: f64, x0: f64, h: f64, n: usize) -> Option<(usize, [f64; 6])> {
    let s = (x - x0) / h;
    let last = (n - 1) as f64;
    if !(s >= -1e-12 && s <= last + 1e-12) || n < 6 {
        return None;
    }
    let base = (s.floor() as isize - 2).clamp(0, n as isize - 6) as usize;
    let u = s - base as f64;
    let mut w = [0.0; 6];
    for (k, wk) in w.iter_mut().enumerate() {
        let mut p = 1.0;
        for m in 0..6 {
            if m != k {
                p *= (u - m as f64) / (k as f64 - m as f64);
            }
        }
        *wk = p;
    }
    Some((base, w))
}

/// Unwrap a sequence of angles so consecutive differences stay within π,
/// anchoring the first sample to the branch closest to `anchor`.
pub fn unwrap_from(angles: &[f64], anchor: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(angles.len());
    let mut prev = anchor;
    for &a in angles {
        let k = ((prev - a) / (2.0 * PI)).round();
        let v = a + 2.0 * PI * k;
        out.push(v);
        prev = v;
    }
    out
}

const LANCZOS_G: f64 = 7.0;
const LANCZOS_C: [f64; 9] = [
    0.999_999_999_999_809_9,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_572e-6,
    1.505_632_735_149_311_6e-7,
];

/// Principal branch of log Γ(z) for complex z (Lanczos, g = 7).
///
/// The imaginary part is continuous along rays away from the negative real
/// axis, which is what the phase formulas need for arg Γ(iκ) as κ → 0⁻.
pub fn ln_gamma(z: Complex64) -> Complex64 {
    if z.re < 0.5 {
        // reflection: Γ(z)Γ(1-z) = π / sin(πz)
        let s = (Complex64::new(PI, 0.0) * z).sin();
        return Complex64::new(PI.ln(), 0.0) - s.ln() - ln_gamma(Complex64::new(1.0, 0.0) - z);
    }
    let z = z - 1.0;
    let mut a = Complex64::new(LANCZOS_C[0], 0.0);
    let t = z + LANCZOS_G + 0.5;
    for (i, c) in LANCZOS_C.iter().enumerate().skip(1) {
        a += *c / (z + i as f64);
    }
    0.5 * (2.0 * PI).ln() + (z + 0.5) * t.ln() - t + a.ln()
}

/// Γ(z) for complex z.
pub fn gamma(z: Complex64) -> Complex64 {
    ln_gamma(z).exp()
}

/// Gauss–Legendre nodes and weights on [-1, 1].
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut r = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, r);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * r * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (r * p1 - p0) / (r * r - 1.0);
            let dr = p1 / dp;
            r -= dr;
            if dr.abs() < 1e-16 {
                break;
            }
        }
        x[i] = -r;
        x[n - 1 - i] = r;
        let wi = 2.0 / ((1.0 - r * r) * dp * dp);
        w[i] = wi;
        w[n - 1 - i] = wi;
    }
    (x, w)
}
