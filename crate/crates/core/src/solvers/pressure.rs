//! Pressure projection: find `p` such that `u = u* + dt M^{-1} G p` is
//! weakly divergence free, with `G p = \int p div w` on interior velocity
//! nodes and `M` the lumped velocity mass.

use crate::exec;
use crate::fem::{
    assemble_coarse_stiffness, divergence_residual, pressure_gradient_rhs, Discretization, MixedOperator, VectorField,
};

use super::{conjugate_gradient, CgReport, NeumannSolver, SolverError, StopRule};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PressureReport {
    pub cg: CgReport,
    /// `||D u||_2` of the returned velocity.
    pub divergence: f64,
}

/// `S p = dt D M^{-1} G p` from the element loops; the reference the sparse
/// operator is checked against.
pub fn pressure_operator(disc: &Discretization, dt: f64, p: &[f64]) -> Vec<f64> {
    let mut g = pressure_gradient_rhs(disc, p);
    for comp in &mut g.0 {
        for (n, v) in comp.iter_mut().enumerate() {
            *v = if disc.interior[n] {
                dt * *v / disc.fine_mass[n]
            } else {
                0.0
            };
        }
    }
    divergence_residual(disc, &g)
}

/// Operators of the pressure problem, built once per mesh.
#[derive(Debug, Clone)]
pub struct PressureSolver {
    mixed: MixedOperator,
    neumann: NeumannSolver,
    /// `1 / M_m` at interior fine nodes, zero on the boundary.
    inv_mass: Vec<f64>,
}

impl PressureSolver {
    pub fn new(disc: &Discretization, mean_eps: f64) -> Result<Self, SolverError> {
        let neumann = NeumannSolver::new(&assemble_coarse_stiffness(disc), disc.coarse_mass.clone(), mean_eps)?;
        let inv_mass = disc
            .fine_mass
            .iter()
            .zip(&disc.interior)
            .map(|(m, &i)| if i { 1.0 / m } else { 0.0 })
            .collect();
        Ok(Self {
            mixed: MixedOperator::new(disc),
            neumann,
            inv_mass,
        })
    }

    pub fn neumann(&self) -> &NeumannSolver {
        &self.neumann
    }

    /// `dt M^{-1} G p`, zero on the boundary.
    fn correction(&self, dt: f64, p: &[f64], out: &mut VectorField) {
        self.mixed.gradient(p, out);
        for comp in &mut out.0 {
            exec::for_each_mut(comp, |n, v| *v *= dt * self.inv_mass[n]);
        }
    }

    /// `out = S p`.
    pub fn apply_schur(&self, dt: f64, p: &[f64], out: &mut [f64]) {
        let mut w = VectorField::zeros(self.inv_mass.len());
        self.correction(dt, p, &mut w);
        self.mixed.divergence(&w, out);
    }

    /// `||D u||_2`.
    pub fn divergence_norm(&self, u: &VectorField) -> f64 {
        let mut r = vec![0.0; self.neumann.dim()];
        self.mixed.divergence(u, &mut r);
        exec::norm2(&r)
    }

    /// Solves `S p = -D u*` by conjugate gradients preconditioned with the
    /// coarse Neumann Laplacian, warm-started from `p`, and returns the
    /// projected velocity. The stopping test is `||D u||_2 <= tol`.
    pub fn solve(
        &self,
        dt: f64,
        u_star: &VectorField,
        p: &mut [f64],
        tol: f64,
        max_iter: usize,
    ) -> (VectorField, PressureReport) {
        self.neumann.remove_mean(p);
        let mut b = vec![0.0; p.len()];
        self.mixed.divergence(u_star, &mut b);
        b.iter_mut().for_each(|v| *v = -*v);
        let mut w = VectorField::zeros(self.inv_mass.len());
        let cg = conjugate_gradient(
            |v, out| {
                self.correction(dt, v, &mut w);
                self.mixed.divergence(&w, out);
            },
            |r, z| {
                let mut r = r.to_vec();
                self.neumann.make_compatible(&mut r);
                let phi = self.neumann.solve(&r).expect("residual made compatible");
                z.iter_mut().zip(phi).for_each(|(z, f)| *z = f / dt);
            },
            &b,
            p,
            StopRule::Absolute(tol),
            max_iter,
        );
        let mut u = VectorField::zeros(self.inv_mass.len());
        self.correction(dt, p, &mut u);
        for (c, uc) in u.0.iter_mut().enumerate() {
            let us = &u_star.0[c];
            let inv = &self.inv_mass;
            exec::for_each_mut(uc, |n, v| *v = if inv[n] > 0.0 { us[n] + *v } else { 0.0 });
        }
        let divergence = self.divergence_norm(&u);
        (u, PressureReport { cg, divergence })
    }
}

/// One-shot projection building the operators on the fly.
pub fn pressure_pcg(
    disc: &Discretization,
    dt: f64,
    u_star: &VectorField,
    p: &mut [f64],
    tol: f64,
    max_iter: usize,
) -> Result<(VectorField, PressureReport), SolverError> {
    Ok(PressureSolver::new(disc, 1e-8)?.solve(dt, u_star, p, tol, max_iter))
}
