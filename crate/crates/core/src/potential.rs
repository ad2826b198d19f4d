//! Lagrangian densities.
//!
//! Two classes are supported: `V(x1, x2)` densities evaluated on
//! `(f(x) - x, f'(x))`: the class whose discrete dynamics has a clean
//! continuum limit: and general `U(x1, x2, x3)` densities evaluated on
//! `(f(x), f'(x), x)`. Partial derivatives are supplied analytically by the
//! potential object (up to third order for `U`), because the Euler-Lagrange
//! residual and the eps-expansion consume them at accuracies where nested
//! finite differences would drown the signal. A finite-difference
//! consistency check against the supplied closures runs at construction.

use std::sync::Arc;

use crate::config::{parse_float_list, RawConfig};
use crate::error::{Error, Result};
use crate::expr::{self, Expr};

pub type Fn2 = Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>;
pub type Fn3 = Arc<dyn Fn(f64, f64, f64) -> f64 + Send + Sync>;

/// Relative tolerance for the construction-time finite-difference check.
const FD_CONSISTENCY_RTOL: f64 = 1e-6;
/// Step for first-order central differences in the consistency check.
const FD_H1: f64 = 1e-5;
/// Step for second-order (cross/second) differences in the consistency check.
const FD_H2: f64 = 1e-4;
/// Step used to synthesize third-order partials of a `V`-backed `U`.
const SYNTH_H: f64 = 1e-5;

/// Density `V(x1, x2)`, 2*pi-periodic in `x1`, admissible in the sense
/// `V_1(0, 1) = 0`, together with its first and second partials.
#[derive(Clone)]
pub struct PotentialV {
    v: Fn2,
    v1: Fn2,
    v2: Fn2,
    v11: Fn2,
    v12: Fn2,
    v22: Fn2,
}

impl std::fmt::Debug for PotentialV {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("PotentialV")
            .field("alpha", &self.alpha())
            .field("beta", &self.beta())
            .finish()
    }
}

impl PotentialV {
    pub fn new(v: Fn2, v1: Fn2, v2: Fn2, v11: Fn2, v12: Fn2, v22: Fn2) -> Result<Self> {
        let pot = PotentialV {
            v,
            v1,
            v2,
            v11,
            v12,
            v22,
        };
        pot.validate()?;
        Ok(pot)
    }

    /// The built-in admissible family
    /// `V = p (1 - cos x1) + q/2 (x2 - 1)^2 + s (1 - cos x1)(x2 - 1)`,
    /// which realizes any pair `(alpha, beta) = (p, q)`.
    pub fn builtin(p: f64, q: f64, s: f64) -> Result<Self> {
        Self::new(
            Arc::new(move |a: f64, b: f64| {
                p * (1.0 - a.cos()) + 0.5 * q * (b - 1.0) * (b - 1.0)
                    + s * (1.0 - a.cos()) * (b - 1.0)
            }),
            Arc::new(move |a: f64, b: f64| p * a.sin() + s * a.sin() * (b - 1.0)),
            Arc::new(move |a: f64, b: f64| q * (b - 1.0) + s * (1.0 - a.cos())),
            Arc::new(move |a: f64, b: f64| p * a.cos() + s * a.cos() * (b - 1.0)),
            Arc::new(move |a: f64, _b: f64| s * a.sin()),
            Arc::new(move |_a: f64, _b: f64| q),
        )
    }

    pub fn from_exprs(
        v: Expr,
        v1: Expr,
        v2: Expr,
        v11: Expr,
        v12: Expr,
        v22: Expr,
    ) -> Result<Self> {
        let lift = |e: Expr| -> Fn2 { Arc::new(move |a, b| e.eval(&[a, b, 0.0])) };
        Self::new(lift(v), lift(v1), lift(v2), lift(v11), lift(v12), lift(v22))
    }

    pub fn v(&self, x1: f64, x2: f64) -> f64 {
        (self.v)(x1, x2)
    }
    pub fn v1(&self, x1: f64, x2: f64) -> f64 {
        (self.v1)(x1, x2)
    }
    pub fn v2(&self, x1: f64, x2: f64) -> f64 {
        (self.v2)(x1, x2)
    }
    pub fn v11(&self, x1: f64, x2: f64) -> f64 {
        (self.v11)(x1, x2)
    }
    pub fn v12(&self, x1: f64, x2: f64) -> f64 {
        (self.v12)(x1, x2)
    }
    pub fn v22(&self, x1: f64, x2: f64) -> f64 {
        (self.v22)(x1, x2)
    }

    /// `alpha = V_11(0, 1)`: the coefficient of the `v_t + 3 v v_x` group
    /// in the continuum limit.
    pub fn alpha(&self) -> f64 {
        self.v11(0.0, 1.0)
    }

    /// `beta = V_22(0, 1)`: the coefficient of the third-derivative group.
    pub fn beta(&self) -> f64 {
        self.v22(0.0, 1.0)
    }

    /// Views this density as the three-argument class through
    /// `U(x1, x2, x3) = V(x1 - x3, x2)`.
    pub fn as_u(&self) -> SynthesizedU<'_> {
        SynthesizedU { v: self }
    }

    fn validate(&self) -> Result<()> {
        let x1s: Vec<f64> = (0..10).map(|i| i as f64 * 0.628_318).collect();
        let x2s: Vec<f64> = (0..10).map(|i| 0.6 + 0.088 * i as f64).collect();
        let tau = std::f64::consts::TAU;
        for &a in &x1s {
            for &b in &x2s {
                let base = self.v(a, b);
                let shifted = self.v(a + tau, b);
                if (shifted - base).abs() > 1e-12 * (1.0 + base.abs()) {
                    return Err(Error::Potential(format!(
                        "V is not 2*pi-periodic in x1 at ({a:.3}, {b:.3}): {base} vs {shifted}"
                    )));
                }
            }
        }
        let adm = self.v1(0.0, 1.0);
        if adm.abs() > 1e-10 {
            return Err(Error::Potential(format!(
                "admissibility V_1(0,1) = 0 violated: got {adm:.3e}"
            )));
        }
        let h = FD_H1;
        for &a in &x1s {
            for &b in &x2s {
                let checks = [
                    ("V_1", self.v1(a, b), (self.v(a + h, b) - self.v(a - h, b)) / (2.0 * h)),
                    ("V_2", self.v2(a, b), (self.v(a, b + h) - self.v(a, b - h)) / (2.0 * h)),
                    ("V_11", self.v11(a, b), (self.v1(a + h, b) - self.v1(a - h, b)) / (2.0 * h)),
                    ("V_12", self.v12(a, b), (self.v1(a, b + h) - self.v1(a, b - h)) / (2.0 * h)),
                    ("V_22", self.v22(a, b), (self.v2(a, b + h) - self.v2(a, b - h)) / (2.0 * h)),
                ];
                for (name, analytic, fd) in checks {
                    if (analytic - fd).abs()
                        > FD_CONSISTENCY_RTOL * (1.0 + analytic.abs().max(fd.abs()))
                    {
                        return Err(Error::Potential(format!(
                            "{name} disagrees with finite differences at ({a:.3}, {b:.3}): \
                             {analytic} vs {fd}"
                        )));
                    }
                }
            }
        }
        Ok(())
    }
}

/// The evaluator set consumed by the Euler-Lagrange residual and the
/// eps-expansion: `U` and the nine partials that actually occur there.
pub trait UPotential {
    fn u(&self, x1: f64, x2: f64, x3: f64) -> f64;
    fn u1(&self, x1: f64, x2: f64, x3: f64) -> f64;
    fn u11(&self, x1: f64, x2: f64, x3: f64) -> f64;
    fn u12(&self, x1: f64, x2: f64, x3: f64) -> f64;
    fn u13(&self, x1: f64, x2: f64, x3: f64) -> f64;
    fn u22(&self, x1: f64, x2: f64, x3: f64) -> f64;
    fn u23(&self, x1: f64, x2: f64, x3: f64) -> f64;
    fn u112(&self, x1: f64, x2: f64, x3: f64) -> f64;
    fn u123(&self, x1: f64, x2: f64, x3: f64) -> f64;
    fn u233(&self, x1: f64, x2: f64, x3: f64) -> f64;
}

/// `U(x1, x2, x3) = V(x1 - x3, x2)`.
///
/// First and second partials reduce exactly to partials of `V`:
/// `U_1 = V_1`, `U_11 = V_11`, `U_12 = V_12`, `U_13 = -V_11`,
/// `U_22 = V_22`, `U_23 = -V_12`. The three third-order partials are all
/// `+/- V_112`; they share one finite-difference evaluation of `V_112`, so
/// combinations in which they cancel do so exactly.
pub struct SynthesizedU<'a> {
    v: &'a PotentialV,
}

impl SynthesizedU<'_> {
    fn v112(&self, w: f64, b: f64) -> f64 {
        (self.v.v11(w, b + SYNTH_H) - self.v.v11(w, b - SYNTH_H)) / (2.0 * SYNTH_H)
    }
}

impl UPotential for SynthesizedU<'_> {
    fn u(&self, x1: f64, x2: f64, x3: f64) -> f64 {
        self.v.v(x1 - x3, x2)
    }
    fn u1(&self, x1: f64, x2: f64, x3: f64) -> f64 {
        self.v.v1(x1 - x3, x2)
    }
    fn u11(&self, x1: f64, x2: f64, x3: f64) -> f64 {
        self.v.v11(x1 - x3, x2)
    }
    fn u12(&self, x1: f64, x2: f64, x3: f64) -> f64 {
        self.v.v12(x1 - x3, x2)
    }
    fn u13(&self, x1: f64, x2: f64, x3: f64) -> f64 {
        -self.v.v11(x1 - x3, x2)
    }
    fn u22(&self, x1: f64, x2: f64, x3: f64) -> f64 {
        self.v.v22(x1 - x3, x2)
    }
    fn u23(&self, x1: f64, x2: f64, x3: f64) -> f64 {
        -self.v.v12(x1 - x3, x2)
    }
    fn u112(&self, x1: f64, x2: f64, x3: f64) -> f64 {
        self.v112(x1 - x3, x2)
    }
    fn u123(&self, x1: f64, x2: f64, x3: f64) -> f64 {
        -self.v112(x1 - x3, x2)
    }
    fn u233(&self, x1: f64, x2: f64, x3: f64) -> f64 {
        self.v112(x1 - x3, x2)
    }
}

/// A general three-argument density with analytically supplied partials,
/// 2*pi-periodic in `x1`.
#[derive(Clone)]
pub struct GeneralPotentialU {
    u: Fn3,
    u1: Fn3,
    u11: Fn3,
    u12: Fn3,
    u13: Fn3,
    u22: Fn3,
    u23: Fn3,
    u112: Fn3,
    u123: Fn3,
    u233: Fn3,
}

impl std::fmt::Debug for GeneralPotentialU {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str("GeneralPotentialU")
    }
}

#[allow(clippy::too_many_arguments)]
impl GeneralPotentialU {
    pub fn new(
        u: Fn3,
        u1: Fn3,
        u11: Fn3,
        u12: Fn3,
        u13: Fn3,
        u22: Fn3,
        u23: Fn3,
        u112: Fn3,
        u123: Fn3,
        u233: Fn3,
    ) -> Result<Self> {
        let pot = GeneralPotentialU {
            u,
            u1,
            u11,
            u12,
            u13,
            u22,
            u23,
            u112,
            u123,
            u233,
        };
        pot.validate()?;
        Ok(pot)
    }

    pub fn from_exprs(exprs: [Expr; 10]) -> Result<Self> {
        let [u, u1, u11, u12, u13, u22, u23, u112, u123, u233] = exprs;
        let lift = |e: Expr| -> Fn3 { Arc::new(move |a, b, c| e.eval(&[a, b, c])) };
        Self::new(
            lift(u),
            lift(u1),
            lift(u11),
            lift(u12),
            lift(u13),
            lift(u22),
            lift(u23),
            lift(u112),
            lift(u123),
            lift(u233),
        )
    }

    fn validate(&self) -> Result<()> {
        let x1s: Vec<f64> = (0..5).map(|i| 0.3 + i as f64 * 1.17).collect();
        let x2s: Vec<f64> = (0..4).map(|i| 0.7 + 0.2 * i as f64).collect();
        let x3s: Vec<f64> = (0..5).map(|i| 0.1 + i as f64 * 1.23).collect();
        let tau = std::f64::consts::TAU;
        for &a in &x1s {
            for &b in &x2s {
                for &c in &x3s {
                    let base = self.u(a, b, c);
                    let shifted = self.u(a + tau, b, c);
                    if (shifted - base).abs() > 1e-12 * (1.0 + base.abs()) {
                        return Err(Error::Potential(format!(
                            "U is not 2*pi-periodic in x1 at ({a:.3}, {b:.3}, {c:.3})"
                        )));
                    }
                }
            }
        }
        let h1 = FD_H1;
        let h2 = FD_H2;
        let rcheck = |name: &str, analytic: f64, fd: f64, a: f64, b: f64, c: f64| -> Result<()> {
            if (analytic - fd).abs() > FD_CONSISTENCY_RTOL * (1.0 + analytic.abs().max(fd.abs())) {
                Err(Error::Potential(format!(
                    "{name} disagrees with finite differences at ({a:.3}, {b:.3}, {c:.3}): \
                     {analytic} vs {fd}"
                )))
            } else {
                Ok(())
            }
        };
        for &a in &x1s {
            for &b in &x2s {
                for &c in &x3s {
                    rcheck(
                        "U_1",
                        self.u1(a, b, c),
                        (self.u(a + h1, b, c) - self.u(a - h1, b, c)) / (2.0 * h1),
                        a,
                        b,
                        c,
                    )?;
                    rcheck(
                        "U_11",
                        self.u11(a, b, c),
                        (self.u1(a + h1, b, c) - self.u1(a - h1, b, c)) / (2.0 * h1),
                        a,
                        b,
                        c,
                    )?;
                    rcheck(
                        "U_12",
                        self.u12(a, b, c),
                        (self.u1(a, b + h1, c) - self.u1(a, b - h1, c)) / (2.0 * h1),
                        a,
                        b,
                        c,
                    )?;
                    rcheck(
                        "U_13",
                        self.u13(a, b, c),
                        (self.u1(a, b, c + h1) - self.u1(a, b, c - h1)) / (2.0 * h1),
                        a,
                        b,
                        c,
                    )?;
                    rcheck(
                        "U_22",
                        self.u22(a, b, c),
                        (self.u(a, b + h2, c) - 2.0 * self.u(a, b, c) + self.u(a, b - h2, c))
                            / (h2 * h2),
                        a,
                        b,
                        c,
                    )?;
                    rcheck(
                        "U_23",
                        self.u23(a, b, c),
                        (self.u(a, b + h2, c + h2) - self.u(a, b + h2, c - h2)
                            - self.u(a, b - h2, c + h2)
                            + self.u(a, b - h2, c - h2))
                            / (4.0 * h2 * h2),
                        a,
                        b,
                        c,
                    )?;
                    rcheck(
                        "U_112",
                        self.u112(a, b, c),
                        (self.u11(a, b + h1, c) - self.u11(a, b - h1, c)) / (2.0 * h1),
                        a,
                        b,
                        c,
                    )?;
                    rcheck(
                        "U_123",
                        self.u123(a, b, c),
                        (self.u12(a, b, c + h1) - self.u12(a, b, c - h1)) / (2.0 * h1),
                        a,
                        b,
                        c,
                    )?;
                    rcheck(
                        "U_233",
                        self.u233(a, b, c),
                        (self.u23(a, b, c + h1) - self.u23(a, b, c - h1)) / (2.0 * h1),
                        a,
                        b,
                        c,
                    )?;
                }
            }
        }
        Ok(())
    }
}

impl UPotential for GeneralPotentialU {
    fn u(&self, x1: f64, x2: f64, x3: f64) -> f64 {
        (self.u)(x1, x2, x3)
    }
    fn u1(&self, x1: f64, x2: f64, x3: f64) -> f64 {
        (self.u1)(x1, x2, x3)
    }
    fn u11(&self, x1: f64, x2: f64, x3: f64) -> f64 {
        (self.u11)(x1, x2, x3)
    }
    fn u12(&self, x1: f64, x2: f64, x3: f64) -> f64 {
        (self.u12)(x1, x2, x3)
    }
    fn u13(&self, x1: f64, x2: f64, x3: f64) -> f64 {
        (self.u13)(x1, x2, x3)
    }
    fn u22(&self, x1: f64, x2: f64, x3: f64) -> f64 {
        (self.u22)(x1, x2, x3)
    }
    fn u23(&self, x1: f64, x2: f64, x3: f64) -> f64 {
        (self.u23)(x1, x2, x3)
    }
    fn u112(&self, x1: f64, x2: f64, x3: f64) -> f64 {
        (self.u112)(x1, x2, x3)
    }
    fn u123(&self, x1: f64, x2: f64, x3: f64) -> f64 {
        (self.u123)(x1, x2, x3)
    }
    fn u233(&self, x1: f64, x2: f64, x3: f64) -> f64 {
        (self.u233)(x1, x2, x3)
    }
}

/// A potential loaded from a config file: either class.
pub enum LoadedPotential {
    V(PotentialV),
    U(GeneralPotentialU),
}

/// Reads a potential from the documented `[potential]` config schema.
///
/// `kind = builtin` takes `p, q, s`; `kind = v_expr` takes expressions for
/// `v, v1, v2, v11, v12, v22` in `x1, x2`; `kind = u_expr` takes the ten
/// `u*` expressions in `x1, x2, x3`.
pub fn load_potential_from_config(raw: &RawConfig) -> Result<LoadedPotential> {
    let section = "potential";
    let get = |key: &str| -> Result<&str> {
        raw.get(section, key)
            .ok_or_else(|| Error::Potential(format!("missing key {key:?} in [potential]")))
    };
    let kind = get("kind")?;
    match kind {
        "builtin" => {
            let nums = parse_float_list(get("pqs")?)
                .map_err(|d| Error::Potential(format!("bad pqs: {d}")))?;
            if nums.len() != 3 {
                return Err(Error::Potential("pqs needs three numbers".to_string()));
            }
            Ok(LoadedPotential::V(PotentialV::builtin(
                nums[0], nums[1], nums[2],
            )?))
        }
        "v_expr" => {
            let mut exprs = Vec::new();
            for key in ["v", "v1", "v2", "v11", "v12", "v22"] {
                exprs.push(expr::parse(get(key)?)?);
            }
            let mut it = exprs.into_iter();
            Ok(LoadedPotential::V(PotentialV::from_exprs(
                it.next().unwrap(),
                it.next().unwrap(),
                it.next().unwrap(),
                it.next().unwrap(),
                it.next().unwrap(),
                it.next().unwrap(),
            )?))
        }
        "u_expr" => {
            let keys = [
                "u", "u1", "u11", "u12", "u13", "u22", "u23", "u112", "u123", "u233",
            ];
            let mut exprs = Vec::with_capacity(10);
            for key in keys {
                exprs.push(expr::parse(get(key)?)?);
            }
            let arr: [Expr; 10] = exprs.try_into().expect("ten expressions collected");
            Ok(LoadedPotential::U(GeneralPotentialU::from_exprs(arr)?))
        }
        other => Err(Error::Potential(format!("unknown potential kind {other:?}"))),
    }
}
