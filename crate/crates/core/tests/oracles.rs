//! Solver kernels against dense linear algebra on meshes of at most 2x2x2
//! bricks.

#![allow(clippy::needless_range_loop)]

mod common;

use common::*;
use nalgebra::{DMatrix, DVector};
use natconv::fem::{apply_advection, apply_wave_operator, assemble_stiffness};
use natconv::stepper::{SplitState, Stepper, StepperConfig};

fn config(ra: f64, substeps: usize) -> StepperConfig {
    StepperConfig {
        ra,
        pr: 0.71,
        dt: 0.01,
        substeps,
        cg_tol: 1e-14,
        cg_max_iter: 10_000,
        pcg_tol: 1e-13,
        pcg_max_iter: 1000,
        mean_eps: 1e-8,
        theta_ref: 0.5,
    }
}

#[test]
fn lumped_mass_and_stiffness_match_dense_assembly() {
    let disc = small_disc();
    let m = mass(&disc.mesh);
    assert!(max_diff(&disc.fine_mass, &to_vec(&m)) < 1e-15);
    let k = stiffness(&disc.mesh);
    let ours = assemble_stiffness(&disc, 1.0).unwrap().to_dense();
    let scale = k.amax();
    for i in 0..disc.fine_nodes() {
        for j in 0..disc.fine_nodes() {
            assert!((ours[i][j] - k[(i, j)]).abs() <= 1e-12 * scale, "K[{i}][{j}]");
        }
    }
}

#[test]
fn cghs_matches_dense_cholesky() {
    assert!(cghs_error() <= 1e-10);
}

#[test]
fn mixed_integrals_match_dense_quadrature() {
    assert!(mixed_integral_error() < 1e-12);
}

#[test]
fn pressure_pcg_matches_dense_saddle_point_solve() {
    let e = pressure_error();
    assert!(e.velocity <= 1e-8 && e.schur_residual <= 1e-8, "{e:?}");
}

#[test]
fn advection_and_wave_operators_match_dense_matrices() {
    let disc = small_disc();
    let u = random_velocity(&disc, false);
    let f = field(disc.fine_nodes(), 1.1);
    let fv = DVector::from_vec(f.clone());
    let c = to_vec(&(advection_matrix(&disc.mesh, &u) * &fv));
    assert!(max_diff(&apply_advection(&disc, &u, &f), &c) <= 1e-13 * max_abs(&c));
    let w = to_vec(&(wave_matrix(&disc.mesh, &u) * &fv));
    assert!(max_diff(&apply_wave_operator(&disc, &u, &f), &w) <= 1e-13 * max_abs(&w));
}

fn state(stepper: &Stepper, interior_velocity: bool) -> SplitState {
    let disc = &stepper.disc;
    let mut s = stepper.initialize();
    s.u = random_velocity(disc, interior_velocity);
    s.theta = field(disc.fine_nodes(), 0.53);
    s
}

#[test]
fn transport_substeps_match_hand_oracle() {
    for q in [1usize, 2, 3] {
        let stepper = Stepper::new(small_disc(), config(100.0, q)).unwrap();
        let mesh = &stepper.disc.mesh;
        let mut s = state(&stepper, true);
        let tau = stepper.transport.tau;
        assert_eq!(tau, 0.01 / q as f64);
        let c = advection_matrix(mesh, &s.u);
        let w = wave_matrix(mesh, &s.u);
        let m = mass(mesh);
        let mask = stepper.isothermal_mask().to_vec();
        let wall = stepper.initialize().theta;

        let march = |f0: &[f64], theta: bool| -> Vec<f64> {
            let fix = |v: DVector<f64>| -> DVector<f64> {
                if theta {
                    DVector::from_fn(v.len(), |i, _| if mask[i] { wall[i] } else { v[i] })
                } else {
                    v
                }
            };
            let f0 = DVector::from_vec(f0.to_vec());
            let mut prev = f0.clone();
            let mut cur = fix(&f0 - (&c * &f0).component_div(&m) * tau);
            for _ in 1..q {
                let next = fix(&cur * 2.0 - &prev - (&w * &cur).component_div(&m) * (tau * tau));
                prev = cur;
                cur = next;
            }
            to_vec(&cur)
        };
        let expected_theta = march(&s.theta, true);
        let expected_u: Vec<Vec<f64>> = (0..3).map(|k| march(&s.u.0[k], false)).collect();
        stepper.transport_step(&mut s);
        assert!(max_diff(&s.theta, &expected_theta) < 1e-13, "theta, Q = {q}");
        for k in 0..3 {
            assert!(max_diff(&s.u.0[k], &expected_u[k]) < 1e-13, "u_{k}, Q = {q}");
        }
    }
}

#[test]
fn diffusion_step_matches_dense_solve() {
    let cfg = config(1000.0, 1);
    let stepper = Stepper::new(small_disc(), cfg).unwrap();
    let mesh = &stepper.disc.mesh;
    let mut s = state(&stepper, true);
    let n = stepper.disc.fine_nodes();
    let m = mass(mesh);
    let k = stiffness(mesh);
    let a_theta = &k + DMatrix::from_diagonal(&(&m / cfg.dt));
    let a_vel = &k * cfg.pr + DMatrix::from_diagonal(&(&m / cfg.dt));

    let theta_old = DVector::from_vec(s.theta.clone());
    let wall_theta = stepper.initialize().theta;
    let theta = dense_dirichlet_solve(
        &a_theta,
        &theta_old.component_mul(&m).unscale(cfg.dt),
        stepper.isothermal_mask(),
        &wall_theta,
    );
    let wall: Vec<bool> = stepper.disc.interior.iter().map(|&i| !i).collect();
    let zero = vec![0.0; n];
    let expected_u: Vec<DVector<f64>> = (0..3)
        .map(|c| {
            let mut b = DVector::from_vec(s.u.0[c].clone()).component_mul(&m).unscale(cfg.dt);
            if c == 1 {
                b += theta.add_scalar(-cfg.theta_ref).component_mul(&m) * (cfg.ra * cfg.pr);
            }
            dense_dirichlet_solve(&a_vel, &b, &wall, &zero)
        })
        .collect();

    stepper.diffusion_step(&mut s).unwrap();
    assert!(max_diff(&s.theta, &to_vec(&theta)) <= 1e-10 * max_abs(&to_vec(&theta)));
    for c in 0..3 {
        let e = to_vec(&expected_u[c]);
        assert!(max_diff(&s.u.0[c], &e) <= 1e-10 * max_abs(&e), "component {c}");
    }
}
