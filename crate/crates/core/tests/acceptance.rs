//! Acceptance suite: one test per criterion, each printing a pass/fail line
//! (run with `cargo test --test acceptance -- --nocapture` to see them all).
//!
//! Criteria:
//!  1. group axioms at n = 256
//!  2. right-invariance of the two-point Lagrangian
//!  3. conservation of the central velocity along stepper trajectories
//!  4. equivalence of the printed residual and the action-gradient oracle
//!  5. first-order term: identical vanishing for the V-class, formula match
//!     for general densities
//!  6. continuum limit is the Camassa-Holm family (order two, coefficient
//!     field, b = -4A; solution fields are o(eps^2))
//!  7. PDE conservation over T = 1 across parameter regimes
//!  8. KdV soliton: derived closed form, static residual, propagation
//!  9. orbit classifier tags and the behavioral transform validation
//! 10. byte-identical reruns of the CLI

use std::time::Instant;

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use virasoro_dls::ch_family::{
    apply_symmetry, classify_orbit, energy, evolve, mean_momentum, soliton_profile, CHParams,
    OrbitTag, PDEState,
};
use virasoro_dls::cli::run_strs;
use virasoro_dls::continuum::{
    ch_family_operator, correlation, epsilon1_term, proportionality, scaling_study,
    second_order_term, TimeSampledField,
};
use virasoro_dls::diffeo::CircleDiffeo;
use virasoro_dls::dynamics::{
    action_gradient, el2_residual, step, trajectory, SolverOptions, VelocityPair,
};
use virasoro_dls::grid::PeriodicField;
use virasoro_dls::lagrangian::eval_l;
use virasoro_dls::potential::{GeneralPotentialU, PotentialV};
use virasoro_dls::sampling::{random_admissible_potential, random_diffeo, random_element, random_field};
use virasoro_dls::virasoro::VirasoroElement;

fn report(criterion: u32, pass: bool, detail: &str) {
    println!(
        "criterion {criterion:2}: {} ({detail})",
        if pass { "PASS" } else { "FAIL" }
    );
    assert!(pass, "criterion {criterion} failed: {detail}");
}

#[test]
fn criterion_01_group_axioms() {
    let started = Instant::now();
    let n = 256;
    let mut rng = StdRng::seed_from_u64(101);
    let mut worst_assoc = 0.0f64;
    let mut worst_identity = 0.0f64;
    let mut worst_inverse = 0.0f64;
    for _ in 0..20 {
        let amp = rng.gen_range(0.1..0.4);
        let x = random_element(&mut rng, n, amp, 1.5).unwrap();
        let y = random_element(&mut rng, n, amp, 1.5).unwrap();
        let z = random_element(&mut rng, n, amp, 1.5).unwrap();

        let left = x.product(&y).unwrap().product(&z).unwrap();
        let right = x.product(&y.product(&z).unwrap()).unwrap();
        worst_assoc = worst_assoc
            .max(left.f.distance_to(&right.f))
            .max((left.center - right.center).abs());

        let e = VirasoroElement::identity(n).unwrap();
        let xe = x.product(&e).unwrap();
        let ex = e.product(&x).unwrap();
        worst_identity = worst_identity
            .max(xe.f.distance_to(&x.f))
            .max((xe.center - x.center).abs())
            .max(ex.f.distance_to(&x.f))
            .max((ex.center - x.center).abs());

        let inv = x.inverse().unwrap();
        let li = inv.product(&x).unwrap();
        let ri = x.product(&inv).unwrap();
        worst_inverse = worst_inverse
            .max(li.f.deviation_from_identity())
            .max(li.center.abs())
            .max(ri.f.deviation_from_identity())
            .max(ri.center.abs());
    }
    let elapsed = started.elapsed().as_secs_f64();
    let pass = worst_assoc <= 1e-8
        && worst_identity <= 1e-8
        && worst_inverse <= 1e-8
        && elapsed <= 10.0;
    report(
        1,
        pass,
        &format!(
            "associativity {worst_assoc:.2e}, identity {worst_identity:.2e}, \
             inverse {worst_inverse:.2e} (limits 1e-8), {elapsed:.2} s (limit 10 s)"
        ),
    );
}

#[test]
fn criterion_02_right_invariance() {
    let n = 256;
    let mut rng = StdRng::seed_from_u64(202);
    let pot = PotentialV::builtin(1.3, 0.7, 0.2).unwrap();
    let mut worst = 0.0f64;
    for _ in 0..20 {
        let x = random_element(&mut rng, n, 0.25, 1.0).unwrap();
        let y = random_element(&mut rng, n, 0.25, 1.0).unwrap();
        let g = random_element(&mut rng, n, 0.25, 1.0).unwrap();
        let base = eval_l(&x, &y, &pot).unwrap();
        let translated = eval_l(
            &x.product(&g).unwrap(),
            &y.product(&g).unwrap(),
            &pot,
        )
        .unwrap();
        worst = worst.max((translated - base).abs());
    }
    report(
        2,
        worst <= 1e-8,
        &format!("max |L(Xg, Yg) - L(X, Y)| = {worst:.2e} over 20 draws (limit 1e-8)"),
    );
}

#[test]
fn criterion_03_central_velocity_conserved() {
    let pot = PotentialV::builtin(1.0, 1.0, 0.0).unwrap();
    let opts = SolverOptions::default();
    let mut worst = 0.0f64;
    for (n, amp, central) in [(64usize, 0.02, 0.05), (128, 0.05, 0.1)] {
        let start = VirasoroElement::identity(n).unwrap();
        let omega = CircleDiffeo::from_displacement(
            PeriodicField::from_fn(n, |t| amp * t.sin()).unwrap(),
        )
        .unwrap();
        let traj = trajectory(&start, &VelocityPair::new(omega, central), 20, &pot, &opts)
            .unwrap();
        worst = worst.max(traj.max_el1_residual);
    }
    report(
        3,
        worst <= 1e-12,
        &format!("max central-velocity drift over 20-step trajectories: {worst:.2e} (limit 1e-12)"),
    );
}

#[test]
fn criterion_04_oracle_equivalence() {
    let n = 64;
    let mut rng = StdRng::seed_from_u64(404);
    let pot = PotentialV::builtin(1.0, 1.0, 0.0).unwrap();
    let opts = SolverOptions {
        tol: 1e-11,
        ..SolverOptions::default()
    };
    let identity = VirasoroElement::identity(n).unwrap();
    let mut worst_el2 = 0.0f64;
    let mut worst_grad = 0.0f64;
    let mut forward_checked = 0;
    let mut reverse_checked = 0;
    for _ in 0..10 {
        let omega_k = random_diffeo(&mut rng, n, 0.05).unwrap();
        let central = rng.gen_range(0.02..0.15);
        let omega_next = step(&omega_k, central, &pot, &opts).unwrap();
        let el2 = el2_residual(&omega_k, &omega_next, central, central, &pot.as_u())
            .unwrap()
            .max_abs();
        let prev = VirasoroElement::new(omega_k, central);
        let next = VirasoroElement::new(omega_next, central).inverse().unwrap();
        let (grad, grad_center) = action_gradient(&prev, &identity, &next, &pot).unwrap();
        let grad_norm = grad.max_abs().max(grad_center.abs());

        // Forward direction: tightly solved configurations have a vanishing
        // action gradient.
        if el2 <= 1e-10 {
            forward_checked += 1;
            worst_grad = worst_grad.max(grad_norm);
        }
        // Reverse direction: configurations the oracle calls stationary
        // satisfy the printed equation.
        if grad_norm <= 1e-8 {
            reverse_checked += 1;
            worst_el2 = worst_el2.max(el2);
        }
    }
    let pass = forward_checked == 10
        && reverse_checked == 10
        && worst_grad <= 1e-7
        && worst_el2 <= 1e-6;
    report(
        4,
        pass,
        &format!(
            "10 solves: residual <= 1e-10 on {forward_checked}, gradient max {worst_grad:.2e} \
             (limit 1e-7); gradient <= 1e-8 on {reverse_checked}, residual max {worst_el2:.2e} \
             (limit 1e-6)"
        ),
    );
}

#[test]
fn criterion_05_first_order_term() {
    let n = 128;
    let mut rng = StdRng::seed_from_u64(505);

    // V-class: the first-order term cancels identically, nodewise.
    let mut worst_vclass = 0.0f64;
    for _ in 0..5 {
        let pot = random_admissible_potential(&mut rng).unwrap();
        for _ in 0..5 {
            let v = random_field(&mut rng, n, 5, 1.0).unwrap();
            worst_vclass = worst_vclass.max(epsilon1_term(&pot.as_u(), &v).unwrap().max_abs());
        }
    }

    // General densities: the measured first-order coefficient matches the
    // formula to 1% in max-norm.
    let v = PeriodicField::from_fn(n, |x| x.sin() + 0.3 * (2.0 * x).cos()).unwrap();
    let field = TimeSampledField::frozen(v.clone());
    let eps_list = [1e-2, 5e-3, 2.5e-3, 1.25e-3];
    let mut worst_generic: f64 = 0.0;
    for pot in generic_u_potentials() {
        let study = scaling_study(&pot, &field, 0.0, 0.0, &eps_list).unwrap();
        assert_eq!(study.leading_order, 1, "expected first-order leading term");
        let formula = epsilon1_term(&pot, &v).unwrap();
        let rel = study.coefficient_field.minus(&formula).max_abs() / formula.max_abs();
        worst_generic = worst_generic.max(rel);
    }
    let pass = worst_vclass <= 1e-12 && worst_generic <= 0.01;
    report(
        5,
        pass,
        &format!(
            "V-class first-order term max {worst_vclass:.2e} over 25 draws (limit 1e-12); \
             generic-density coefficient error {worst_generic:.4} (limit 0.01)"
        ),
    );
}

#[test]
fn criterion_06_continuum_limit_is_ch_family() {
    let started = Instant::now();
    let n = 128;
    let pot = PotentialV::builtin(1.0, 1.0, 0.0).unwrap();
    let eps_list = [1e-2, 7.5e-3, 5e-3, 2.5e-3, 1e-3];

    // Generic frozen field with a nonzero central velocity: order two, and
    // the coefficient field is the second-order formula including b = -4A.
    let central = 0.25;
    let v = PeriodicField::from_fn(n, |x| x.sin() + 0.3 * (2.0 * x).cos()).unwrap();
    let frozen = TimeSampledField::frozen(v.clone());
    let study = scaling_study(&pot.as_u(), &frozen, central, 0.0, &eps_list).unwrap();
    let zero = PeriodicField::zeros(n).unwrap();
    let formula = second_order_term(&v, &zero, &pot, central).unwrap();
    let corr = correlation(&study.coefficient_field, &formula);
    let constant = proportionality(&study.coefficient_field, &formula);
    let generic_ok = (study.exponent - 2.0).abs() <= 0.15 && corr >= 0.999;

    // A time-reversed solution of the matching family member satisfies the
    // second-order term identically, so the residual is o(eps^2).
    let params = CHParams::new(pot.alpha(), pot.beta(), 0.0);
    let v0 = PeriodicField::from_fn(n, |x| 0.3 * x.sin()).unwrap();
    let state0 = PDEState::new(v0, 0.0, params).unwrap();
    let pivot = eps_list[0] + 0.02;
    let dt = 1e-4;
    let solution_field = TimeSampledField::with_fd_time_derivative(
        move |t| Ok(evolve(&state0, pivot - t, dt)?.v),
        1e-3,
    );
    let solution_study =
        scaling_study(&pot.as_u(), &solution_field, 0.0, 0.0, &eps_list).unwrap();
    let solution_ok = solution_study.exponent >= 2.7;

    let elapsed = started.elapsed().as_secs_f64();
    let pass = generic_ok && solution_ok && elapsed <= 300.0;
    report(
        6,
        pass,
        &format!(
            "generic field: exponent {:.3} (2 +/- 0.15), correlation {corr:.6} (>= 0.999), \
             constant {constant:.4}; solution field: exponent {:.3} (>= 2.7); {elapsed:.1} s \
             (limit 300 s)",
            study.exponent, solution_study.exponent
        ),
    );
}

#[test]
fn criterion_07_pde_conservation() {
    let n = 256;
    let dt = 1e-4;
    let horizon = 1.0;
    type Profile = fn(f64) -> f64;
    let cases: [(CHParams, Profile); 4] = [
        (CHParams::new(1.0, 1.0, 0.0), |x| 0.2 + 0.1 * x.sin()),
        (CHParams::new(1.0, 0.0, 1.0), |x| 0.1 * x.sin()),
        (CHParams::new(0.0, 1.0, 0.0), |x| 0.1 * x.sin()),
        (CHParams::new(1.0, 1.0, 2.0), |x| {
            0.1 * x.sin() + 0.05 * (2.0 * x).cos()
        }),
    ];
    let mut detail = String::new();
    let mut pass = true;
    for (params, profile) in cases {
        let state = PDEState::new(PeriodicField::from_fn(n, profile).unwrap(), 0.0, params)
            .unwrap();
        let e0 = energy(&state).unwrap();
        let m0 = mean_momentum(&state);
        let out = evolve(&state, horizon, dt).unwrap();
        let e1 = energy(&out).unwrap();
        let m1 = mean_momentum(&out);
        let energy_drift = ((e1 - e0) / e0).abs();
        let mean_drift = (m1 - m0).abs();
        let ok = energy_drift <= 1e-8
            && (params.alpha.abs() <= 1e-12 || mean_drift <= 1e-10);
        pass &= ok;
        detail.push_str(&format!(
            "({},{},{}): dE/E {energy_drift:.1e}, dmean {mean_drift:.1e}; ",
            params.alpha, params.beta, params.b
        ));
    }
    report(
        7,
        pass,
        &format!("{detail}limits 1e-8 relative energy, 1e-10 mean when alpha != 0"),
    );
}

#[test]
fn criterion_08_kdv_soliton() {
    let n = 512;
    let kappa = 4.0;
    let x0 = std::f64::consts::PI;
    // v_t + 3 v v_x + v_xxx = 0 as a family member.
    let params = CHParams::new(1.0, 0.0, -1.0);
    let speed = 4.0 * kappa * kappa;
    let v0 = soliton_profile(n, kappa, x0).unwrap();

    // Static check of the derived closed form.
    let vt0 = v0.derivative(1).unwrap().scaled(-speed);
    let static_residual = ch_family_operator(&v0, &vt0, &params).unwrap().max_abs();

    // Propagation over t in [0, 0.05].
    let state = PDEState::new(v0, 0.0, params).unwrap();
    let mut shape_error = 0.0f64;
    let mut current = state;
    for checkpoint in [0.025f64, 0.05] {
        current = evolve(&current, checkpoint - current.t, 1e-5).unwrap();
        let expected = PeriodicField::from_fn(n, |x| {
            virasoro_dls::ch_family::soliton_value(kappa, x - x0 - speed * checkpoint)
        })
        .unwrap();
        shape_error = shape_error.max(current.v.minus(&expected).max_abs());
    }
    let pass = static_residual <= 1e-6 && shape_error <= 1e-3;
    report(
        8,
        pass,
        &format!(
            "static operator residual {static_residual:.2e} (limit 1e-6), \
             shape error {shape_error:.2e} over t in [0, 0.05] (limit 1e-3)"
        ),
    );
}

#[test]
fn criterion_09_orbit_classifier() {
    // Tags by vanishing pattern.
    let tag = |a: f64, be: f64, b: f64| classify_orbit(&CHParams::new(a, be, b)).unwrap().tag;
    let tags_ok = tag(1.0, 1.0, 0.0) == OrbitTag::CamassaHolm
        && tag(1.0, 0.0, 1.0) == OrbitTag::KdV
        && tag(0.0, 1.0, 5.0) == OrbitTag::HunterSaxton
        && tag(1.0, 0.0, 0.0) == OrbitTag::DispersionlessKdV
        && tag(0.0, 0.0, 2.0) == OrbitTag::ThirdDerivativeConstraint;

    // Behavioral validation of the generic normalization: transform an
    // evolved (2, 8, 4) solution and feed it to the canonical operator.
    let n = 256;
    let params = CHParams::new(2.0, 8.0, 4.0);
    let class = classify_orbit(&params).unwrap();
    assert_eq!(class.tag, OrbitTag::CamassaHolm);
    let v0 = PeriodicField::from_fn(n, |x| 0.2 * x.sin() + 0.1 * (2.0 * x).cos()).unwrap();
    let state0 = PDEState::new(v0, 0.0, params).unwrap();
    let dt = 1e-4;
    let sampler = TimeSampledField::with_fd_time_derivative(
        move |t| Ok(evolve(&state0, t, dt)?.v),
        1e-3,
    );
    let transformed = apply_symmetry(&sampler, &class.transform).unwrap();
    let t_check = 0.1;
    let w = transformed.sample(t_check).unwrap();
    let wt = transformed.sample_vt(t_check).unwrap();
    let residual = ch_family_operator(&w, &wt, &class.canonical)
        .unwrap()
        .max_abs();
    let pass = tags_ok && residual <= 1e-5;
    report(
        9,
        pass,
        &format!(
            "five tags match; transformed (2,8,4) solution satisfies the canonical \
             (1,1,0) operator to {residual:.2e} (limit 1e-5)"
        ),
    );
}

#[test]
fn criterion_10_determinism() {
    let base = std::env::temp_dir().join("vdls_determinism");
    let _ = std::fs::remove_dir_all(&base);
    std::fs::create_dir_all(&base).unwrap();
    let runs: Vec<(&str, Vec<String>)> = vec![
        (
            "simulate",
            vec![
                "simulate".into(),
                "--n".into(),
                "64".into(),
                "--set".into(),
                "simulate.nsteps=6".into(),
                "--seed".into(),
                "9".into(),
            ],
        ),
        (
            "continuum",
            vec![
                "continuum-check".into(),
                "--n".into(),
                "64".into(),
                "--profile".into(),
                "sine:1,1+cosine:0.3,2".into(),
            ],
        ),
        (
            "pde",
            vec![
                "pde".into(),
                "--n".into(),
                "64".into(),
                "--t-final".into(),
                "0.01".into(),
                "--dt".into(),
                "1e-3".into(),
                "--svg".into(),
            ],
        ),
        (
            "classify",
            vec![
                "classify".into(),
                "--alpha".into(),
                "2".into(),
                "--beta".into(),
                "8".into(),
                "--b".into(),
                "4".into(),
            ],
        ),
        (
            "oracle",
            vec![
                "el-oracle".into(),
                "--n".into(),
                "64".into(),
                "--seed".into(),
                "31".into(),
                "--set".into(),
                "oracle.count=4".into(),
            ],
        ),
    ];
    let mut compared = 0usize;
    for (name, args) in &runs {
        let mut outputs = Vec::new();
        for attempt in 0..2 {
            let dir = base.join(format!("{name}_{attempt}"));
            let mut full: Vec<String> = args.clone();
            full.push("--out".into());
            full.push(dir.to_str().unwrap().into());
            let refs: Vec<&str> = full.iter().map(|s| s.as_str()).collect();
            assert_eq!(run_strs(&refs), 0, "run {name} attempt {attempt}");
            let mut files: Vec<(String, Vec<u8>)> = std::fs::read_dir(&dir)
                .unwrap()
                .map(|e| {
                    let e = e.unwrap();
                    (
                        e.file_name().to_string_lossy().into_owned(),
                        std::fs::read(e.path()).unwrap(),
                    )
                })
                .collect();
            files.sort();
            outputs.push(files);
        }
        assert_eq!(outputs[0].len(), outputs[1].len(), "{name} file sets differ");
        assert!(!outputs[0].is_empty(), "{name} produced no outputs");
        for (a, b) in outputs[0].iter().zip(&outputs[1]) {
            assert_eq!(a.0, b.0, "{name}: file names differ");
            assert_eq!(a.1, b.1, "{name}: {} differs between reruns", a.0);
            compared += 1;
        }
    }
    let _ = std::fs::remove_dir_all(&base);
    report(
        10,
        true,
        &format!("{compared} output files byte-identical across reruns of 5 subcommands"),
    );
}

/// Three general densities, periodic in both circle-valued arguments, with
/// hand-derived partials (checked against finite differences at
/// construction).
fn generic_u_potentials() -> Vec<GeneralPotentialU> {
    use std::sync::Arc;
    let first = GeneralPotentialU::new(
        Arc::new(|a: f64, b: f64, c: f64| (1.0 - a.cos()) * b * (1.0 + 0.1 * c.sin())),
        Arc::new(|a: f64, b: f64, c: f64| a.sin() * b * (1.0 + 0.1 * c.sin())),
        Arc::new(|a: f64, b: f64, c: f64| a.cos() * b * (1.0 + 0.1 * c.sin())),
        Arc::new(|a: f64, _b: f64, c: f64| a.sin() * (1.0 + 0.1 * c.sin())),
        Arc::new(|a: f64, b: f64, c: f64| a.sin() * b * 0.1 * c.cos()),
        Arc::new(|_, _, _| 0.0),
        Arc::new(|a: f64, _b: f64, c: f64| (1.0 - a.cos()) * 0.1 * c.cos()),
        Arc::new(|a: f64, _b: f64, c: f64| a.cos() * (1.0 + 0.1 * c.sin())),
        Arc::new(|a: f64, _b: f64, c: f64| a.sin() * 0.1 * c.cos()),
        Arc::new(|a: f64, _b: f64, c: f64| -(1.0 - a.cos()) * 0.1 * c.sin()),
    )
    .unwrap();

    let second = GeneralPotentialU::new(
        Arc::new(|a: f64, b: f64, c: f64| {
            (1.0 - a.cos()) * (1.0 + 0.2 * c.cos())
                + 0.5 * (b - 1.0) * (b - 1.0) * (1.0 + 0.1 * c.sin())
                + 0.3 * a.sin() * (b - 1.0) * c.cos()
        }),
        Arc::new(|a: f64, b: f64, c: f64| {
            a.sin() * (1.0 + 0.2 * c.cos()) + 0.3 * a.cos() * (b - 1.0) * c.cos()
        }),
        Arc::new(|a: f64, b: f64, c: f64| {
            a.cos() * (1.0 + 0.2 * c.cos()) - 0.3 * a.sin() * (b - 1.0) * c.cos()
        }),
        Arc::new(|a: f64, _b: f64, c: f64| 0.3 * a.cos() * c.cos()),
        Arc::new(|a: f64, b: f64, c: f64| {
            -0.2 * a.sin() * c.sin() - 0.3 * a.cos() * (b - 1.0) * c.sin()
        }),
        Arc::new(|_a: f64, _b: f64, c: f64| 1.0 + 0.1 * c.sin()),
        Arc::new(|a: f64, b: f64, c: f64| {
            0.1 * (b - 1.0) * c.cos() - 0.3 * a.sin() * c.sin()
        }),
        Arc::new(|a: f64, _b: f64, c: f64| -0.3 * a.sin() * c.cos()),
        Arc::new(|a: f64, _b: f64, c: f64| -0.3 * a.cos() * c.sin()),
        Arc::new(|a: f64, b: f64, c: f64| {
            -0.1 * (b - 1.0) * c.sin() - 0.3 * a.sin() * c.cos()
        }),
    )
    .unwrap();

    let third = GeneralPotentialU::new(
        Arc::new(|a: f64, b: f64, c: f64| {
            (0.1 * a.cos()).exp() * b * (1.0 + 0.05 * (2.0 * c).cos())
        }),
        Arc::new(|a: f64, b: f64, c: f64| {
            -0.1 * a.sin() * (0.1 * a.cos()).exp() * b * (1.0 + 0.05 * (2.0 * c).cos())
        }),
        Arc::new(|a: f64, b: f64, c: f64| {
            (-0.1 * a.cos() + 0.01 * a.sin() * a.sin())
                * (0.1 * a.cos()).exp()
                * b
                * (1.0 + 0.05 * (2.0 * c).cos())
        }),
        Arc::new(|a: f64, _b: f64, c: f64| {
            -0.1 * a.sin() * (0.1 * a.cos()).exp() * (1.0 + 0.05 * (2.0 * c).cos())
        }),
        Arc::new(|a: f64, b: f64, c: f64| {
            0.01 * a.sin() * (2.0 * c).sin() * (0.1 * a.cos()).exp() * b
        }),
        Arc::new(|_, _, _| 0.0),
        Arc::new(|a: f64, _b: f64, c: f64| {
            (0.1 * a.cos()).exp() * (-0.1 * (2.0 * c).sin())
        }),
        Arc::new(|a: f64, _b: f64, c: f64| {
            (-0.1 * a.cos() + 0.01 * a.sin() * a.sin())
                * (0.1 * a.cos()).exp()
                * (1.0 + 0.05 * (2.0 * c).cos())
        }),
        Arc::new(|a: f64, _b: f64, c: f64| {
            0.01 * a.sin() * (2.0 * c).sin() * (0.1 * a.cos()).exp()
        }),
        Arc::new(|a: f64, _b: f64, c: f64| {
            (0.1 * a.cos()).exp() * (-0.2 * (2.0 * c).cos())
        }),
    )
    .unwrap();

    vec![first, second, third]
}
