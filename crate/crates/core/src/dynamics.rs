//! Discrete dynamics on the Virasoro group: angular velocities, the two
//! Euler-Lagrange residuals, an independent action-gradient oracle, and the
//! implicit stepper that advances a trajectory.
//!
//! Velocities follow the convention
//! `(omega_k, Omega_k) = (f_{k-1}, F_{k-1}) . (f_k, F_k)^{-1}`,
//! and the stationarity conditions for the action `S = sum L(x_k, x_{k+1})`
//! split into the conservation law `Omega_{k+1} = Omega_k` and a second,
//! nodewise equation coupling consecutive velocities. The second equation is
//! written in terms of `omega_k` and `psi = omega_{k+1}^{-1}`; the stepper
//! therefore solves for `psi` directly and inverts once at the end.

use crate::diffeo::CircleDiffeo;
use crate::error::{Error, Result};
use crate::grid::PeriodicField;
use crate::lagrangian::eval_l;
use crate::linalg::solve_in_place;
use crate::potential::{PotentialV, UPotential};
use crate::virasoro::VirasoroElement;

/// Step used by the action-gradient oracle's central differences.
pub const GRADIENT_FD_STEP: f64 = 1e-6;

/// Discrete angular velocity `(omega, Omega)`.
#[derive(Debug, Clone)]
pub struct VelocityPair {
    pub omega: CircleDiffeo,
    pub central: f64,
}

impl VelocityPair {
    pub fn new(omega: CircleDiffeo, central: f64) -> Self {
        VelocityPair { omega, central }
    }
}

/// An ordered sequence of group elements sharing one grid.
#[derive(Debug, Clone)]
pub struct DiscretePath {
    elements: Vec<VirasoroElement>,
}

impl DiscretePath {
    pub fn new(elements: Vec<VirasoroElement>) -> Result<Self> {
        if elements.len() < 2 {
            return Err(Error::PathTooShort(elements.len()));
        }
        let n = elements[0].n();
        for e in &elements {
            if e.n() != n {
                return Err(Error::GridMismatch(n, e.n()));
            }
        }
        Ok(DiscretePath { elements })
    }

    pub fn elements(&self) -> &[VirasoroElement] {
        &self.elements
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn n(&self) -> usize {
        self.elements[0].n()
    }
}

/// Velocities of consecutive pairs: `k`-th entry is
/// `elements[k] . elements[k+1]^{-1}`.
pub fn velocities(path: &DiscretePath) -> Result<Vec<VelocityPair>> {
    let mut out = Vec::with_capacity(path.len() - 1);
    for pair in path.elements().windows(2) {
        let vel = pair[0].product(&pair[1].inverse()?)?;
        out.push(VelocityPair::new(vel.f, vel.center));
    }
    Ok(out)
}

/// First Euler-Lagrange residual: `Omega_{k+1} - Omega_k` for consecutive
/// velocity pairs. Zero along solutions; the central velocity is a conserved
/// quantity of the discrete system.
pub fn el1_residual(velocities: &[VelocityPair]) -> Vec<f64> {
    velocities
        .windows(2)
        .map(|w| w[1].central - w[0].central)
        .collect()
}

/// Second Euler-Lagrange residual, evaluated nodewise.
///
/// With `psi = omega_next^{-1}` the density reads
///
/// ```text
///   -2 Omega_k [log(omega_k')]''
///   - U_1(omega_k, omega_k', x) omega_k'
///   + U_12(omega_k, omega_k', x) (omega_k')^2
///   + U_22(omega_k, omega_k', x) omega_k'' omega_k'
///   + U_23(omega_k, omega_k', x) omega_k'
///   + 2 Omega_{k+1} [log(psi')]''
///   + U_1(x, 1/psi', psi) psi'
///   - U_12(x, 1/psi', psi)
///   + U_22(x, 1/psi', psi) psi'' / (psi')^2
///   - U_23(x, 1/psi', psi) psi'
/// ```
///
/// For a `V`-class potential pass `&pot.as_u()`; the synthesized partials
/// are exact identities.
pub fn el2_residual(
    omega_k: &CircleDiffeo,
    omega_next: &CircleDiffeo,
    central_k: f64,
    central_next: f64,
    pot: &dyn UPotential,
) -> Result<PeriodicField> {
    let psi = omega_next.invert()?;
    el2_residual_from_psi(omega_k, &psi, central_k, central_next, pot)
}

pub(crate) fn el2_residual_from_psi(
    omega_k: &CircleDiffeo,
    psi: &CircleDiffeo,
    central_k: f64,
    central_next: f64,
    pot: &dyn UPotential,
) -> Result<PeriodicField> {
    if omega_k.n() != psi.n() {
        return Err(Error::GridMismatch(omega_k.n(), psi.n()));
    }
    let n = omega_k.n();

    let w_nodes = omega_k.eval_nodes();
    let wp = omega_k.derivative(1)?;
    let wpp = omega_k.derivative(2)?;
    let log_wp_dd = wp.map(f64::ln).derivative(2)?;

    let psi_nodes = psi.eval_nodes();
    let pp = psi.derivative(1)?;
    let ppp = psi.derivative(2)?;
    let log_pp_dd = pp.map(f64::ln).derivative(2)?;

    let mut out = Vec::with_capacity(n);
    for j in 0..n {
        let x = crate::grid::node(n, j);
        let (w, wpj, wppj) = (w_nodes[j], wp.values()[j], wpp.values()[j]);
        let (ps, ppj, pppj) = (psi_nodes[j], pp.values()[j], ppp.values()[j]);
        let inv_pp = 1.0 / ppj;

        let r = -2.0 * central_k * log_wp_dd.values()[j]
            - pot.u1(w, wpj, x) * wpj
            + pot.u12(w, wpj, x) * wpj * wpj
            + pot.u22(w, wpj, x) * wppj * wpj
            + pot.u23(w, wpj, x) * wpj
            + 2.0 * central_next * log_pp_dd.values()[j]
            + pot.u1(x, inv_pp, ps) * ppj
            - pot.u12(x, inv_pp, ps)
            + pot.u22(x, inv_pp, ps) * pppj * inv_pp * inv_pp
            - pot.u23(x, inv_pp, ps) * ppj;
        out.push(r);
    }
    PeriodicField::new(out)
}

/// Brute-force gradient of the two-term action window
/// `Phi = L(prev, cur) + L(cur, next)` with respect to the displacement
/// samples of `cur.f` (central differences, one coordinate at a time) and
/// with respect to the central coordinate of `cur`.
///
/// This is the independent oracle for the Euler-Lagrange equations: it never
/// touches the residual code, only the Lagrangian itself, and it must vanish
/// exactly where the two residuals vanish.
pub fn action_gradient(
    prev: &VirasoroElement,
    cur: &VirasoroElement,
    next: &VirasoroElement,
    pot: &PotentialV,
) -> Result<(PeriodicField, f64)> {
    let n = cur.n();
    let h = GRADIENT_FD_STEP;
    let phi = |candidate: &VirasoroElement| -> Result<f64> {
        Ok(eval_l(prev, candidate, pot)? + eval_l(candidate, next, pot)?)
    };
    let base_disp = cur.f.displacement().values().to_vec();
    let mut grad = Vec::with_capacity(n);
    for j in 0..n {
        let mut up = base_disp.clone();
        up[j] += h;
        let mut dn = base_disp.clone();
        dn[j] -= h;
        let plus = phi(&VirasoroElement::new(
            CircleDiffeo::from_displacement(PeriodicField::new(up)?)?,
            cur.center,
        ))?;
        let minus = phi(&VirasoroElement::new(
            CircleDiffeo::from_displacement(PeriodicField::new(dn)?)?,
            cur.center,
        ))?;
        grad.push((plus - minus) / (2.0 * h));
    }
    let plus = phi(&VirasoroElement::new(cur.f.clone(), cur.center + h))?;
    let minus = phi(&VirasoroElement::new(cur.f.clone(), cur.center - h))?;
    let center_grad = (plus - minus) / (2.0 * h);
    Ok((PeriodicField::new(grad)?, center_grad))
}

/// Options for the implicit Newton solve in [`step`].
#[derive(Debug, Clone, Copy)]
pub struct SolverOptions {
    /// Max-norm residual target.
    pub tol: f64,
    pub max_iter: usize,
    /// Step for the finite-difference Jacobian columns.
    pub fd_step: f64,
    /// Steps that would push the minimum slope `f'` below this margin abort
    /// instead of silently producing a near-singular map.
    pub min_slope: f64,
    pub max_backtracks: u32,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions {
            tol: 1e-10,
            max_iter: 50,
            fd_step: 1e-6,
            min_slope: 0.05,
            max_backtracks: 30,
        }
    }
}

/// Solves the second Euler-Lagrange equation for the next velocity:
/// given `omega_k` and the conserved central velocity, finds `omega_next`
/// with `el2_residual(omega_k, omega_next, central, central, V) = 0`.
///
/// The unknown is the displacement of `psi = omega_next^{-1}` (the equation
/// is written in `psi`, so no inversion sits inside the residual); damped
/// Newton with a finite-difference Jacobian and backtracking on the residual
/// max-norm, initial guess `psi = omega_k^{-1}`.
pub fn step(
    omega_k: &CircleDiffeo,
    central: f64,
    pot: &PotentialV,
    opts: &SolverOptions,
) -> Result<CircleDiffeo> {
    let synth = pot.as_u();
    let n = omega_k.n();
    let mut psi_vals = omega_k.invert()?.displacement().values().to_vec();

    let residual_of = |vals: &[f64]| -> Result<Vec<f64>> {
        let psi = CircleDiffeo::from_displacement(PeriodicField::new(vals.to_vec())?)?;
        Ok(el2_residual_from_psi(omega_k, &psi, central, central, &synth)?.into_values())
    };

    // Solve below the requested tolerance: the caller-visible residual goes
    // through a fresh inversion of the returned map, which costs a little
    // accuracy.
    let inner_tol = 0.5 * opts.tol;
    let mut residual = residual_of(&psi_vals)?;
    let mut rnorm = max_abs(&residual);
    for iteration in 0..=opts.max_iter {
        if rnorm <= inner_tol {
            let psi = CircleDiffeo::from_displacement(PeriodicField::new(psi_vals)?)?;
            if psi.min_slope() < opts.min_slope {
                return Err(Error::Monotonicity {
                    min_slope: psi.min_slope(),
                    node: 0,
                });
            }
            let omega_next = psi.invert()?;
            if omega_next.min_slope() < opts.min_slope {
                return Err(Error::Monotonicity {
                    min_slope: omega_next.min_slope(),
                    node: 0,
                });
            }
            return Ok(omega_next);
        }
        if iteration == opts.max_iter {
            return Err(Error::NoConvergence {
                iterations: iteration,
                residual: rnorm,
            });
        }

        let h = opts.fd_step;
        let mut jacobian = vec![0.0; n * n];
        for col in 0..n {
            let mut up = psi_vals.clone();
            up[col] += h;
            let mut dn = psi_vals.clone();
            dn[col] -= h;
            let rp = residual_of(&up)?;
            let rm = residual_of(&dn)?;
            for row in 0..n {
                jacobian[row * n + col] = (rp[row] - rm[row]) / (2.0 * h);
            }
        }
        let mut direction: Vec<f64> = residual.iter().map(|&v| -v).collect();
        solve_in_place(&mut jacobian, n, &mut direction)?;

        let mut lambda = 1.0;
        let mut accepted = false;
        for _ in 0..=opts.max_backtracks {
            let trial: Vec<f64> = psi_vals
                .iter()
                .zip(&direction)
                .map(|(&v, &d)| v + lambda * d)
                .collect();
            // Trial points outside the diffeomorphism group just shrink the step.
            if let Ok(rt) = residual_of(&trial) {
                let nt = max_abs(&rt);
                if nt <= (1.0 - 1e-4 * lambda) * rnorm {
                    psi_vals = trial;
                    residual = rt;
                    rnorm = nt;
                    accepted = true;
                    break;
                }
            }
            lambda *= 0.5;
        }
        if !accepted {
            return Err(Error::NoConvergence {
                iterations: iteration,
                residual: rnorm,
            });
        }
    }
    unreachable!("loop returns or errors before falling through")
}

/// A stepper-generated path with its self-reported residual diagnostics.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub path: DiscretePath,
    /// Largest `|Omega_{k+1} - Omega_k|` over the reconstructed velocities.
    pub max_el1_residual: f64,
    /// Max-norm of the second residual for each solved velocity pair.
    pub el2_maxnorms: Vec<f64>,
    pub central_velocity: f64,
}

/// Iterates [`step`] from an initial element and first velocity, and
/// reconstructs the path through
/// `(f_k, F_k) = (omega_k, Omega)^{-1} . (f_{k-1}, F_{k-1})`.
pub fn trajectory(
    start: &VirasoroElement,
    first_velocity: &VelocityPair,
    nsteps: usize,
    pot: &PotentialV,
    opts: &SolverOptions,
) -> Result<Trajectory> {
    if nsteps == 0 {
        return Err(Error::PathTooShort(1));
    }
    if start.n() != first_velocity.omega.n() {
        return Err(Error::GridMismatch(start.n(), first_velocity.omega.n()));
    }
    let central = first_velocity.central;
    let synth = pot.as_u();
    let at_step = |index: usize, e: Error| Error::StepFailed {
        index,
        source: Box::new(e),
    };

    let mut elements = vec![start.clone()];
    let mut omega = first_velocity.omega.clone();
    let mut el2_maxnorms = Vec::new();
    let mut current = start.clone();
    for k in 1..=nsteps {
        let velocity_elem = VirasoroElement::new(omega.clone(), central);
        current = velocity_elem
            .inverse()
            .and_then(|inv| inv.product(&current))
            .map_err(|e| at_step(k, e))?;
        elements.push(current.clone());
        if k < nsteps {
            let next_omega = step(&omega, central, pot, opts).map_err(|e| at_step(k, e))?;
            let r = el2_residual(&omega, &next_omega, central, central, &synth)
                .map_err(|e| at_step(k, e))?;
            el2_maxnorms.push(r.max_abs());
            omega = next_omega;
        }
    }
    let path = DiscretePath::new(elements)?;
    let vels = velocities(&path)?;
    let max_el1 = el1_residual(&vels)
        .iter()
        .fold(0.0f64, |m, &v| m.max(v.abs()));
    Ok(Trajectory {
        path,
        max_el1_residual: max_el1,
        el2_maxnorms,
        central_velocity: central,
    })
}

fn max_abs(values: &[f64]) -> f64 {
    values.iter().fold(0.0f64, |m, &v| m.max(v.abs()))
}
