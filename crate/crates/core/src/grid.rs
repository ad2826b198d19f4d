//! Uniform periodic grid on `[0, 2*pi)` with spectral calculus.
//!
//! Everything downstream (diffeomorphism algebra, Euler-Lagrange residuals,
//! the PDE solvers) works with smooth 2*pi-periodic samples on power-of-two
//! grids, so differentiation, interpolation and quadrature all live here.
//! Quadrature and transforms use fixed summation orders; identical inputs
//! produce bit-identical outputs.

use crate::error::{Error, Result};
use crate::fft::FftPlan;
use std::f64::consts::TAU;

/// Points closer than this to a grid node are evaluated by table lookup, so
/// interpolation at the nodes reproduces the stored samples exactly.
const NODE_SNAP: f64 = 1e-12;

/// Smallest supported grid.
pub const MIN_GRID: usize = 16;

pub(crate) fn validate_grid_size(n: usize) -> Result<()> {
    if n >= MIN_GRID && n.is_power_of_two() {
        Ok(())
    } else {
        Err(Error::GridSize(n))
    }
}

/// Samples of a smooth 2*pi-periodic real function at `x_j = 2*pi*j/n`.
#[derive(Debug, Clone, PartialEq)]
pub struct PeriodicField {
    values: Vec<f64>,
}

impl PeriodicField {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        validate_grid_size(values.len())?;
        Ok(PeriodicField { values })
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(f64) -> f64) -> Result<Self> {
        validate_grid_size(n)?;
        let values = (0..n).map(|j| f(node(n, j))).collect();
        Ok(PeriodicField { values })
    }

    pub fn zeros(n: usize) -> Result<Self> {
        Self::constant(n, 0.0)
    }

    pub fn constant(n: usize, c: f64) -> Result<Self> {
        validate_grid_size(n)?;
        Ok(PeriodicField { values: vec![c; n] })
    }

    pub fn n(&self) -> usize {
        self.values.len()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    /// Fourier differentiation. Exact for band-limited input; the Nyquist
    /// mode is zeroed for odd orders (its derivative sign is ambiguous).
    pub fn derivative(&self, order: u32) -> Result<Self> {
        if !(1..=3).contains(&order) {
            return Err(Error::DerivativeOrder {
                order,
                allowed: "1, 2 or 3",
            });
        }
        let n = self.n();
        let plan = FftPlan::new(n);
        let (mut re, mut im) = plan.forward(&self.values);
        for k in 0..n {
            let m = signed_mode(n, k);
            if k == n / 2 && order % 2 == 1 {
                re[k] = 0.0;
                im[k] = 0.0;
                continue;
            }
            let (r, i) = (re[k], im[k]);
            let (nr, ni) = match order {
                1 => (-m * i, m * r),
                2 => (-m * m * r, -m * m * i),
                _ => (m * m * m * i, -m * m * m * r),
            };
            re[k] = nr;
            im[k] = ni;
        }
        Ok(PeriodicField {
            values: plan.inverse_real(&re, &im),
        })
    }

    /// Trigonometric interpolation at arbitrary points (reduced mod 2*pi).
    pub fn interpolate(&self, points: &[f64]) -> Vec<f64> {
        let ip = self.interpolant();
        points.iter().map(|&x| ip.eval(x)).collect()
    }

    /// Build the trigonometric interpolant once for repeated evaluation.
    pub fn interpolant(&self) -> Interpolant {
        let n = self.n();
        let plan = FftPlan::new(n);
        let (re, im) = plan.forward(&self.values);
        let half = n / 2;
        let inv_n = 1.0 / n as f64;
        let mut a = vec![0.0; half + 1];
        let mut b = vec![0.0; half + 1];
        a[0] = re[0] * inv_n;
        for k in 1..half {
            a[k] = 2.0 * re[k] * inv_n;
            b[k] = -2.0 * im[k] * inv_n;
        }
        a[half] = re[half] * inv_n;
        Interpolant {
            n,
            a,
            b,
            values: self.values.clone(),
        }
    }

    /// Trapezoid rule on the uniform periodic grid (spectrally accurate for
    /// smooth periodic integrands). Plain left-to-right summation.
    pub fn integrate(&self) -> f64 {
        let mut acc = 0.0;
        for &v in &self.values {
            acc += v;
        }
        acc * TAU / self.n() as f64
    }

    pub fn mean(&self) -> f64 {
        self.integrate() / TAU
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0f64, |m, &v| m.max(v.abs()))
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        PeriodicField {
            values: self.values.iter().map(|&v| f(v)).collect(),
        }
    }

    /// Pointwise combination of two fields on the same grid.
    ///
    /// Panics on a grid mismatch; fields from different grids never meet
    /// through the public constructors.
    pub fn zip_with(&self, other: &Self, f: impl Fn(f64, f64) -> f64) -> Self {
        assert_eq!(self.n(), other.n(), "periodic fields on different grids");
        PeriodicField {
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(&x, &y)| f(x, y))
                .collect(),
        }
    }

    pub fn scaled(&self, c: f64) -> Self {
        self.map(|v| c * v)
    }

    /// Solves `(alpha - beta d^2/dx^2) w = u` by Fourier-symbol division
    /// (`w_k = u_k / (alpha + beta k^2)`). With `alpha = 0` the zero mode of
    /// the symbol vanishes; the right-hand side must then be mean-free and
    /// the mean of `w` is pinned to zero.
    pub fn helmholtz_solve(&self, alpha: f64, beta: f64) -> Result<Self> {
        let n = self.n();
        let plan = FftPlan::new(n);
        let (mut re, mut im) = plan.forward(&self.values);
        for k in 0..n {
            let m = signed_mode(n, k);
            let symbol = alpha + beta * m * m;
            if symbol.abs() <= 1e-300 {
                if k == 0 {
                    re[0] = 0.0;
                    im[0] = 0.0;
                    continue;
                }
                return Err(Error::DerivativeOrder {
                    order: 0,
                    allowed: "nonzero Helmholtz symbol",
                });
            }
            re[k] /= symbol;
            im[k] /= symbol;
        }
        Ok(PeriodicField {
            values: plan.inverse_real(&re, &im),
        })
    }

    pub fn plus(&self, other: &Self) -> Self {
        self.zip_with(other, |x, y| x + y)
    }

    pub fn minus(&self, other: &Self) -> Self {
        self.zip_with(other, |x, y| x - y)
    }
}

/// Grid node `x_j = 2*pi*j/n`.
pub fn node(n: usize, j: usize) -> f64 {
    TAU * j as f64 / n as f64
}

pub fn nodes(n: usize) -> Vec<f64> {
    (0..n).map(|j| node(n, j)).collect()
}

fn signed_mode(n: usize, k: usize) -> f64 {
    if k <= n / 2 {
        k as f64
    } else {
        k as f64 - n as f64
    }
}

/// Evaluates the trigonometric interpolant
/// `p(x) = a_0 + sum_k (a_k cos kx + b_k sin kx) + a_{n/2} cos(n/2 x)`.
pub struct Interpolant {
    n: usize,
    a: Vec<f64>,
    b: Vec<f64>,
    values: Vec<f64>,
}

impl Interpolant {
    pub fn eval(&self, x: f64) -> f64 {
        let n = self.n;
        let x = x.rem_euclid(TAU);
        let h = TAU / n as f64;
        let jr = (x / h).round();
        if (x - jr * h).abs() <= NODE_SNAP {
            return self.values[(jr as usize) % n];
        }
        let half = n / 2;
        let (s1, c1) = x.sin_cos();
        let mut acc = self.a[0];
        let mut ck = 1.0;
        let mut sk = 0.0;
        for k in 1..half {
            if (k - 1) % 32 == 0 {
                let (s, c) = (k as f64 * x).sin_cos();
                ck = c;
                sk = s;
            } else {
                let nc = ck * c1 - sk * s1;
                let ns = sk * c1 + ck * s1;
                ck = nc;
                sk = ns;
            }
            acc += self.a[k] * ck + self.b[k] * sk;
        }
        acc += self.a[half] * (half as f64 * x).cos();
        acc
    }
}

/// Result of a least-squares fit of `log(residual)` against `log(eps)`.
#[derive(Debug, Clone, Copy)]
pub struct PowerLawFit {
    pub exponent: f64,
    pub coefficient: f64,
    pub r_squared: f64,
}

/// Fits `residual ~ coefficient * eps^exponent` for a convergence study.
///
/// `eps` must be strictly decreasing and positive; residuals must be strictly
/// positive (a nonpositive residual means the quantity already sits at the
/// floating-point floor and the fit would be meaningless).
pub fn fit_power_law(eps: &[f64], residuals: &[f64]) -> Result<PowerLawFit> {
    if eps.len() < 4 || eps.len() != residuals.len() {
        return Err(Error::FitTooFewSamples(eps.len().min(residuals.len())));
    }
    for w in eps.windows(2) {
        if !(w[1] > 0.0 && w[0] > w[1]) {
            return Err(Error::FitBadEps);
        }
    }
    if eps[0] <= 0.0 {
        return Err(Error::FitBadEps);
    }
    for &r in residuals {
        if !(r > 0.0) {
            return Err(Error::FitNonPositiveResidual(r));
        }
    }
    let xs: Vec<f64> = eps.iter().map(|&e| e.ln()).collect();
    let ys: Vec<f64> = residuals.iter().map(|&r| r.ln()).collect();
    let m = xs.len() as f64;
    let (mut sx, mut sy) = (0.0, 0.0);
    for (&x, &y) in xs.iter().zip(&ys) {
        sx += x;
        sy += y;
    }
    let (mx, my) = (sx / m, sy / m);
    let (mut sxx, mut sxy) = (0.0, 0.0);
    for (&x, &y) in xs.iter().zip(&ys) {
        sxx += (x - mx) * (x - mx);
        sxy += (x - mx) * (y - my);
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let mut ss_res = 0.0;
    let mut ss_tot = 0.0;
    for (&x, &y) in xs.iter().zip(&ys) {
        let p = intercept + slope * x;
        ss_res += (y - p) * (y - p);
        ss_tot += (y - my) * (y - my);
    }
    let r_squared = if ss_tot > 0.0 {
        1.0 - ss_res / ss_tot
    } else if ss_res == 0.0 {
        1.0
    } else {
        0.0
    };
    Ok(PowerLawFit {
        exponent: slope,
        coefficient: intercept.exp(),
        r_squared,
    })
}
