//! The Virasoro group: circle diffeomorphisms extended by a real central
//! coordinate, with the Bott cocycle twisting the product.

use crate::diffeo::CircleDiffeo;
use crate::error::{Error, Result};
use crate::grid::PeriodicField;

/// Group element `(f, F)`: a diffeomorphism plus the central coordinate.
#[derive(Debug, Clone, PartialEq)]
pub struct VirasoroElement {
    pub f: CircleDiffeo,
    pub center: f64,
}

impl VirasoroElement {
    pub fn new(f: CircleDiffeo, center: f64) -> Self {
        VirasoroElement { f, center }
    }

    pub fn identity(n: usize) -> Result<Self> {
        Ok(VirasoroElement {
            f: CircleDiffeo::identity(n)?,
            center: 0.0,
        })
    }

    pub fn n(&self) -> usize {
        self.f.n()
    }

    /// `(f, F) . (g, G) = (f . g, F + G + B(f, g))`.
    pub fn product(&self, other: &VirasoroElement) -> Result<VirasoroElement> {
        Ok(VirasoroElement {
            f: self.f.compose(&other.f)?,
            center: self.center + other.center + bott_cocycle(&self.f, &other.f)?,
        })
    }

    /// `(f, F)^{-1} = (f^{-1}, -F)`.
    pub fn inverse(&self) -> Result<VirasoroElement> {
        Ok(VirasoroElement {
            f: self.f.invert()?,
            center: -self.center,
        })
    }
}

/// The Bott cocycle
/// `B(f, g) = int_0^{2*pi} log((f.g)') d log g'`.
///
/// The integrand is expanded through the chain rule as
/// `log(f'(g(x)) g'(x)) * (log g'(x))' dx`: composing first and then
/// differentiating would lose spectral accuracy, while `f'` at the points
/// `g(x)` is plain trigonometric interpolation.
pub fn bott_cocycle(f: &CircleDiffeo, g: &CircleDiffeo) -> Result<f64> {
    if f.n() != g.n() {
        return Err(Error::GridMismatch(f.n(), g.n()));
    }
    let g_slope = g.derivative(1)?;
    let f_slope = f.derivative(1)?;
    let f_slope_at_g = f_slope.interpolant();
    let g_nodes = g.eval_nodes();

    let mut min_arg = f64::INFINITY;
    let mut integrand = Vec::with_capacity(f.n());
    for (j, &gp) in g_slope.values().iter().enumerate() {
        let fp = f_slope_at_g.eval(g_nodes[j]);
        let arg = fp * gp;
        min_arg = min_arg.min(arg.min(fp).min(gp));
        integrand.push(arg);
    }
    if !(min_arg > 0.0) {
        return Err(Error::CocycleDomain(min_arg));
    }
    let log_gp = g_slope.map(f64::ln);
    let dlog_gp = log_gp.derivative(1)?;
    let product = PeriodicField::new(
        integrand
            .iter()
            .zip(dlog_gp.values())
            .map(|(&a, &d)| a.ln() * d)
            .collect(),
    )?;
    Ok(product.integrate())
}
