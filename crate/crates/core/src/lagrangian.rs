//! The functional `H` and the induced right-invariant two-point Lagrangian.
//!
//! `H((f, F)) = F^2 + int_0^{2*pi} V(f(x) - x, f'(x)) dx`, and the two-point
//! Lagrangian it generates is `L(X, Y) = H(X Y^{-1})`; right-invariance
//! `L(Xg, Yg) = L(X, Y)` is then automatic and is verified numerically in
//! the tests.

use crate::error::Result;
use crate::potential::PotentialV;
use crate::virasoro::VirasoroElement;

pub fn eval_h(x: &VirasoroElement, pot: &PotentialV) -> Result<f64> {
    let disp = x.f.displacement();
    let slope = x.f.derivative(1)?;
    let density = disp.zip_with(&slope, |u, s| pot.v(u, s));
    Ok(x.center * x.center + density.integrate())
}

pub fn eval_l(x: &VirasoroElement, y: &VirasoroElement, pot: &PotentialV) -> Result<f64> {
    eval_h(&x.product(&y.inverse()?)?, pot)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diffeo::CircleDiffeo;
    use crate::grid::PeriodicField;
    use crate::potential::PotentialV;
    use std::f64::consts::TAU;
    use std::sync::Arc;

    fn elem(n: usize, disp: impl Fn(f64) -> f64, center: f64) -> VirasoroElement {
        VirasoroElement::new(
            CircleDiffeo::from_displacement(PeriodicField::from_fn(n, disp).unwrap()).unwrap(),
            center,
        )
    }

    #[test]
    fn identity_diffeo_gives_center_squared() {
        let pot = PotentialV::builtin(1.0, 1.0, 0.0).unwrap();
        let x = elem(64, |_| 0.0, 1.5);
        assert!((eval_h(&x, &pot).unwrap() - 2.25).abs() <= 1e-14);
        let e = VirasoroElement::identity(64).unwrap();
        assert_eq!(eval_h(&e, &pot).unwrap(), 0.0);
    }

    /// For general admissible V the value at `(id, F)` is
    /// `F^2 + 2*pi*V(0, 1)`; only the built-in family has `V(0,1) = 0`.
    #[test]
    fn identity_value_for_general_potential() {
        // V = cos(x1) + x2^2, admissible since V_1(0,1) = 0.
        let pot = PotentialV::new(
            Arc::new(|a: f64, b: f64| a.cos() + b * b),
            Arc::new(|a: f64, _| -a.sin()),
            Arc::new(|_, b: f64| 2.0 * b),
            Arc::new(|a: f64, _| -a.cos()),
            Arc::new(|_, _| 0.0),
            Arc::new(|_, _| 2.0),
        )
        .unwrap();
        let x = elem(64, |_| 0.0, 0.5);
        let expected = 0.25 + TAU * 2.0;
        assert!((eval_h(&x, &pot).unwrap() - expected).abs() <= 1e-12);
    }

    /// Oracle: 8192-point quadrature of the closed-form integrand.
    #[test]
    fn h_matches_fine_grid_quadrature() {
        let pot = PotentialV::builtin(1.0, 1.0, 0.0).unwrap();
        let x = elem(256, |t| 0.2 * t.sin(), 1.0);
        let got = eval_h(&x, &pot).unwrap();

        let fine = 8192;
        let mut acc = 0.0;
        for j in 0..fine {
            let t = TAU * j as f64 / fine as f64;
            let u = 0.2 * t.sin();
            let s = 1.0 + 0.2 * t.cos();
            acc += (1.0 - u.cos()) + 0.5 * (s - 1.0) * (s - 1.0);
        }
        let oracle = 1.0 + acc * TAU / fine as f64;
        assert!((got - oracle).abs() <= 1e-9, "{got} vs {oracle}");
    }

    #[test]
    fn lagrangian_of_equal_arguments_vanishes() {
        let pot = PotentialV::builtin(1.0, 2.0, 0.1).unwrap();
        let x = elem(128, |t| 0.25 * t.sin() + 0.1 * (2.0 * t).cos(), 0.8);
        assert!(eval_l(&x, &x, &pot).unwrap().abs() <= 1e-9);
    }

    #[test]
    fn lagrangian_against_identity_reduces_to_h() {
        let pot = PotentialV::builtin(1.0, 1.0, 0.0).unwrap();
        let x = elem(128, |t| 0.2 * t.sin(), -0.4);
        let e = VirasoroElement::identity(128).unwrap();
        let l = eval_l(&x, &e, &pot).unwrap();
        let h = eval_h(&x, &pot).unwrap();
        assert!((l - h).abs() <= 1e-12);
    }

    #[test]
    fn right_invariance() {
        let pot = PotentialV::builtin(1.0, 1.0, 0.3).unwrap();
        let n = 256;
        let x = elem(n, |t| 0.25 * t.sin(), 0.7);
        let y = elem(n, |t| 0.2 * t.cos() + 0.05 * (2.0 * t).sin(), -0.3);
        let g = elem(n, |t| 0.15 * (3.0 * t).cos() + 0.1 * t.sin(), 1.1);
        let base = eval_l(&x, &y, &pot).unwrap();
        let xg = x.product(&g).unwrap();
        let yg = y.product(&g).unwrap();
        let translated = eval_l(&xg, &yg, &pot).unwrap();
        assert!(
            (base - translated).abs() <= 1e-8,
            "{base} vs {translated}"
        );
    }
}
