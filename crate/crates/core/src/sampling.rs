//! Seeded generators for randomized experiments: smooth fields, diffeos,
//! group elements and admissible potentials. Deterministic for a fixed RNG
//! state, which the determinism contract of the CLI relies on.

use rand::Rng;

use crate::diffeo::CircleDiffeo;
use crate::error::Result;
use crate::grid::PeriodicField;
use crate::potential::PotentialV;
use crate::virasoro::VirasoroElement;

/// A random low-frequency field with geometrically decaying harmonics,
/// rescaled so that `max(|u|, |u'|)` equals `amplitude`.
pub fn random_field<R: Rng>(
    rng: &mut R,
    n: usize,
    modes: usize,
    amplitude: f64,
) -> Result<PeriodicField> {
    let mut coeffs = Vec::with_capacity(modes);
    for k in 1..=modes {
        let decay = 0.5f64.powi(k as i32 - 1);
        let a: f64 = rng.gen_range(-1.0..1.0);
        let b: f64 = rng.gen_range(-1.0..1.0);
        coeffs.push((k as f64, a * decay, b * decay));
    }
    let raw = PeriodicField::from_fn(n, |x| {
        coeffs
            .iter()
            .map(|&(k, a, b)| a * (k * x).sin() + b * (k * x).cos())
            .sum()
    })?;
    let scale_base = raw.max_abs().max(raw.derivative(1)?.max_abs());
    if scale_base == 0.0 {
        return PeriodicField::zeros(n);
    }
    Ok(raw.scaled(amplitude / scale_base))
}

/// A random diffeomorphism with displacement amplitude and slope bounded by
/// `amplitude` (so the slope margin is at least `1 - amplitude`).
pub fn random_diffeo<R: Rng>(rng: &mut R, n: usize, amplitude: f64) -> Result<CircleDiffeo> {
    CircleDiffeo::from_displacement(random_field(rng, n, 4, amplitude)?)
}

/// A random group element with the given displacement amplitude and a
/// central coordinate drawn from `[-central_span, central_span]`.
pub fn random_element<R: Rng>(
    rng: &mut R,
    n: usize,
    amplitude: f64,
    central_span: f64,
) -> Result<VirasoroElement> {
    let center = if central_span > 0.0 {
        rng.gen_range(-central_span..central_span)
    } else {
        0.0
    };
    Ok(VirasoroElement::new(random_diffeo(rng, n, amplitude)?, center))
}

/// A random admissible density
///
/// ```text
/// V = p (1 - cos x1) + q/2 (x2-1)^2 + s (1 - cos x1)(x2-1)
///   + c (1 - cos 2 x1) + d sin(x1) (x2-1)^2 + e (x2-1)^3
/// ```
///
/// `V_1(0,1) = 0` holds structurally for every draw, with
/// `alpha = p + 4c` and `beta = q`.
pub fn random_admissible_potential<R: Rng>(rng: &mut R) -> Result<PotentialV> {
    let p: f64 = rng.gen_range(0.5..2.0);
    let q: f64 = rng.gen_range(0.5..2.0);
    let s: f64 = rng.gen_range(-0.5..0.5);
    let c: f64 = rng.gen_range(-0.1..0.25);
    let d: f64 = rng.gen_range(-0.3..0.3);
    let e: f64 = rng.gen_range(-0.3..0.3);
    use std::sync::Arc;
    PotentialV::new(
        Arc::new(move |a: f64, b: f64| {
            p * (1.0 - a.cos())
                + 0.5 * q * (b - 1.0) * (b - 1.0)
                + s * (1.0 - a.cos()) * (b - 1.0)
                + c * (1.0 - (2.0 * a).cos())
                + d * a.sin() * (b - 1.0) * (b - 1.0)
                + e * (b - 1.0).powi(3)
        }),
        Arc::new(move |a: f64, b: f64| {
            p * a.sin()
                + s * a.sin() * (b - 1.0)
                + 2.0 * c * (2.0 * a).sin()
                + d * a.cos() * (b - 1.0) * (b - 1.0)
        }),
        Arc::new(move |a: f64, b: f64| {
            q * (b - 1.0)
                + s * (1.0 - a.cos())
                + 2.0 * d * a.sin() * (b - 1.0)
                + 3.0 * e * (b - 1.0) * (b - 1.0)
        }),
        Arc::new(move |a: f64, b: f64| {
            p * a.cos() + s * a.cos() * (b - 1.0) + 4.0 * c * (2.0 * a).cos()
                - d * a.sin() * (b - 1.0) * (b - 1.0)
        }),
        Arc::new(move |a: f64, b: f64| s * a.sin() + 2.0 * d * a.cos() * (b - 1.0)),
        Arc::new(move |a: f64, b: f64| q + 2.0 * d * a.sin() + 6.0 * e * (b - 1.0)),
    )
}
