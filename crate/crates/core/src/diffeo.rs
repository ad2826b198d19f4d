//! Orientation-preserving diffeomorphisms of the circle.
//!
//! An element is stored through its periodic displacement `u = f - id`, so
//! periodicity `f(x + 2*pi) = f(x) + 2*pi` is structural and off-grid
//! evaluation is legitimate trigonometric interpolation. The representative
//! is normalized so that `u(0)` lies in `[0, 2*pi)`; `f` and `f + 2*pi`
//! describe the same circle map, and all group operations renormalize.

use crate::error::{Error, Result};
use crate::grid::{node, PeriodicField};
use std::f64::consts::TAU;

/// Nodewise inversion target accuracy; `f(g(x_j))` returns to `x_j` at least
/// this closely or inversion reports a stall. The target sits at the
/// round-off floor: downstream residuals take two spectral derivatives of
/// inverted maps, which amplifies any nodewise slack by the cube of the
/// highest wavenumber.
const INVERT_TOL: f64 = 5e-15;
const INVERT_ACCEPT: f64 = 1e-12;
const INVERT_MAX_ITER: usize = 80;

#[derive(Debug, Clone, PartialEq)]
pub struct CircleDiffeo {
    disp: PeriodicField,
}

impl CircleDiffeo {
    /// Wraps a displacement field, checking `f' = 1 + u' > 0` at every node
    /// and normalizing the representative.
    pub fn from_displacement(disp: PeriodicField) -> Result<Self> {
        let slope = disp.derivative(1)?;
        let mut min_slope = f64::INFINITY;
        let mut min_node = 0;
        for (j, &s) in slope.values().iter().enumerate() {
            let f_prime = 1.0 + s;
            if f_prime < min_slope {
                min_slope = f_prime;
                min_node = j;
            }
        }
        if !(min_slope > 0.0) {
            return Err(Error::Monotonicity {
                min_slope,
                node: min_node,
            });
        }
        let mut values = disp.into_values();
        normalize_representative(&mut values);
        Ok(CircleDiffeo {
            disp: PeriodicField::new(values)?,
        })
    }

    pub fn identity(n: usize) -> Result<Self> {
        Ok(CircleDiffeo {
            disp: PeriodicField::zeros(n)?,
        })
    }

    /// The rigid rotation `x -> x + a`.
    pub fn rotation(n: usize, a: f64) -> Result<Self> {
        Self::from_displacement(PeriodicField::constant(n, a)?)
    }

    pub fn n(&self) -> usize {
        self.disp.n()
    }

    pub fn displacement(&self) -> &PeriodicField {
        &self.disp
    }

    /// `f(x_j) = x_j + u_j` at every node.
    pub fn eval_nodes(&self) -> Vec<f64> {
        self.disp
            .values()
            .iter()
            .enumerate()
            .map(|(j, &u)| node(self.n(), j) + u)
            .collect()
    }

    /// `f'` (order 1, equal to `1 + u'`) or `f''` (order 2, equal to `u''`).
    pub fn derivative(&self, order: u32) -> Result<PeriodicField> {
        match order {
            1 => Ok(self.disp.derivative(1)?.map(|s| 1.0 + s)),
            2 => self.disp.derivative(2),
            _ => Err(Error::DerivativeOrder {
                order,
                allowed: "1 or 2",
            }),
        }
    }

    /// Smallest nodewise slope `f'`; values near zero mean the element sits
    /// close to the boundary of the orientation-preserving maps.
    pub fn min_slope(&self) -> f64 {
        self.derivative(1)
            .map(|d| d.values().iter().fold(f64::INFINITY, |m, &v| m.min(v)))
            .unwrap_or(f64::NEG_INFINITY)
    }

    /// Composition `h = f . g`, i.e. `h(x) = f(g(x))`, using trigonometric
    /// interpolation for the outer displacement. Fails if the result is not
    /// monotone at some node (under-resolution).
    pub fn compose(&self, other: &CircleDiffeo) -> Result<CircleDiffeo> {
        if self.n() != other.n() {
            return Err(Error::GridMismatch(self.n(), other.n()));
        }
        let g_nodes = other.eval_nodes();
        let uf_at_g = self.disp.interpolate(&g_nodes);
        let values: Vec<f64> = uf_at_g
            .iter()
            .zip(other.disp.values())
            .map(|(&a, &b)| a + b)
            .collect();
        CircleDiffeo::from_displacement(PeriodicField::new(values)?)
    }

    /// The inverse diffeomorphism, solved nodewise on the lift with
    /// safeguarded Newton (bisection fallback on a monotone bracket).
    pub fn invert(&self) -> Result<CircleDiffeo> {
        let n = self.n();
        let interp = self.disp.interpolant();
        let slope = self.disp.derivative(1)?;
        let slope_interp = slope.interpolant();
        let (mut umin, mut umax) = (f64::INFINITY, f64::NEG_INFINITY);
        for &u in self.disp.values() {
            umin = umin.min(u);
            umax = umax.max(u);
        }
        let pad = 0.5 + 0.1 * (umax - umin);
        let mut out = Vec::with_capacity(n);
        for j in 0..n {
            let y = node(n, j);
            let mut lo = y - umax - pad;
            let mut hi = y - umin + pad;
            let mut z = y - interp.eval(y);
            z = z.clamp(lo, hi);
            let mut best = f64::INFINITY;
            let mut best_z = z;
            for _ in 0..INVERT_MAX_ITER {
                let fz = z + interp.eval(z) - y;
                if fz.abs() < best {
                    best = fz.abs();
                    best_z = z;
                }
                if fz.abs() <= INVERT_TOL {
                    break;
                }
                if fz > 0.0 {
                    hi = z;
                } else {
                    lo = z;
                }
                if hi - lo <= 8.0 * f64::EPSILON * (1.0 + z.abs()) {
                    // Bracket collapsed to machine width; `best` is as good
                    // as this grid can do.
                    break;
                }
                let fp = 1.0 + slope_interp.eval(z);
                let newton = z - fz / fp;
                z = if fp > 1e-3 && newton > lo && newton < hi {
                    newton
                } else {
                    0.5 * (lo + hi)
                };
            }
            if best > INVERT_ACCEPT {
                return Err(Error::InversionStalled {
                    node: j,
                    residual: best,
                });
            }
            out.push(best_z - y);
        }
        CircleDiffeo::from_displacement(PeriodicField::new(out)?)
    }

    /// Displacement distance after aligning the whole-rotation
    /// representatives (`f` and `f + 2*pi*k` are the same element).
    pub fn distance_to(&self, other: &CircleDiffeo) -> f64 {
        assert_eq!(self.n(), other.n(), "diffeos on different grids");
        let d0 = self.disp.values()[0] - other.disp.values()[0];
        let shift = (d0 / TAU).round() * TAU;
        self.disp
            .values()
            .iter()
            .zip(other.disp.values())
            .fold(0.0f64, |m, (&a, &b)| m.max((a - b - shift).abs()))
    }

    pub fn deviation_from_identity(&self) -> f64 {
        let shift = (self.disp.values()[0] / TAU).round() * TAU;
        self.disp
            .values()
            .iter()
            .fold(0.0f64, |m, &a| m.max((a - shift).abs()))
    }
}

fn normalize_representative(values: &mut [f64]) {
    let u0 = values[0];
    if (0.0..TAU).contains(&u0) {
        return;
    }
    let mut k = (u0 / TAU).floor();
    if u0 - k * TAU >= TAU {
        // u0 sits a hair below a period boundary and the subtraction rounds
        // onto exactly 2*pi; use the next representative instead.
        k += 1.0;
    }
    let shift = k * TAU;
    if shift != 0.0 {
        for v in values.iter_mut() {
            *v -= shift;
        }
    }
    if values[0] < 0.0 {
        // Tiny negative left over from the boundary case above (at most one
        // ulp of 2*pi); clamp the anchor node.
        values[0] = 0.0;
    }
}
