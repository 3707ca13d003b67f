//! First-order operator splitting in time.
//!
//! One step from `t^n` to `t^{n+1}` runs three stages in order:
//!
//! 1. pressure: project `u^n` onto weakly divergence-free fields,
//! 2. transport: advect `theta` and `u` with the frozen projected velocity,
//!    using `Q` explicit substeps of the wave form,
//! 3. diffusion: implicit heat equation for `theta`, then implicit viscous
//!    step for `u` with the buoyancy source `Ra Pr theta^{n+1} e_y`.

mod checkpoint;

pub use checkpoint::{read_checkpoint, write_checkpoint, CHECKPOINT_MAGIC, CHECKPOINT_VERSION};

use thiserror::Error;

use crate::exec;
use crate::fem::{
    apply_advection_into, apply_dirichlet_rhs, apply_dirichlet_symmetric, assemble_stiffness, Discretization, FemError,
    SymBandedMatrix, VectorField, WaveCoefficients,
};
use crate::mesh::BoundaryTag;
use crate::solvers::{cghs_scaled, symmetric_scale, CgReport, PressureReport, PressureSolver, SolverError};

#[derive(Debug, Error)]
pub enum StepError {
    #[error(transparent)]
    Fem(#[from] FemError),
    #[error(transparent)]
    Solver(#[from] SolverError),
    #[error("{stage} solve did not converge in {iterations} iterations (residual {residual:e})")]
    NotConverged {
        stage: &'static str,
        iterations: usize,
        residual: f64,
    },
    #[error("invalid stepper configuration: {0}")]
    Config(String),
    #[error("checkpoint: {0}")]
    Checkpoint(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Local substepping of the transport stage.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransportConfig {
    pub substeps: usize,
    pub tau: f64,
}

impl TransportConfig {
    pub fn new(dt: f64, substeps: usize) -> Result<Self, StepError> {
        if substeps == 0 {
            return Err(StepError::Config("transport needs at least one substep".into()));
        }
        Ok(Self {
            substeps,
            tau: dt / substeps as f64,
        })
    }
}

/// Numerical settings of the time loop.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepperConfig {
    pub ra: f64,
    pub pr: f64,
    pub dt: f64,
    pub substeps: usize,
    /// Relative tolerance of the scaled diffusion systems.
    pub cg_tol: f64,
    pub cg_max_iter: usize,
    /// Absolute tolerance on the weak divergence `||D u||_2`.
    pub pcg_tol: f64,
    pub pcg_max_iter: usize,
    /// Relative compatibility tolerance of the Neumann preconditioner.
    pub mean_eps: f64,
    /// Temperature at which the buoyancy force vanishes; the source is
    /// `Ra Pr (theta - theta_ref) e_y`.
    pub theta_ref: f64,
}

impl StepperConfig {
    pub fn validate(&self) -> Result<(), StepError> {
        let bad = |m: &str| Err(StepError::Config(m.into()));
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return bad("dt must be positive");
        }
        if !self.theta_ref.is_finite() {
            return bad("theta_ref must be finite");
        }
        if !(self.ra >= 0.0) || !(self.pr > 0.0) {
            return bad("need ra >= 0 and pr > 0");
        }
        if !(self.cg_tol > 0.0) || !(self.pcg_tol > 0.0) || !(self.mean_eps > 0.0) {
            return bad("solver tolerances must be positive");
        }
        if self.substeps == 0 || self.cg_max_iter == 0 || self.pcg_max_iter == 0 {
            return bad("iteration counts must be at least 1");
        }
        Ok(())
    }
}

/// Fields at the end of a step.
#[derive(Debug, Clone, PartialEq)]
pub struct SplitState {
    pub u: VectorField,
    pub theta: Vec<f64>,
    /// Coarse pressure of the last projection, zero mean.
    pub p: Vec<f64>,
    pub t: f64,
    pub step: u64,
}

/// Per-step record.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepDiagnostics {
    pub step: u64,
    pub t: f64,
    pub cfl: f64,
    pub pcg_iterations: usize,
    /// `||D u^{n+1/3}||_2` after projection.
    pub divergence: f64,
    /// Diffusion iterations for `theta, u_x, u_y, u_z`.
    pub cg_iterations: [usize; 4],
    /// Relative step changes of `u_x, u_y, u_z, theta`.
    pub change: [f64; 4],
    pub kinetic_energy: f64,
    pub theta_min: f64,
    pub theta_max: f64,
    /// `|sum m_k p_k| / |Omega|`.
    pub pressure_mean: f64,
}

impl StepDiagnostics {
    /// The steady-state test: every velocity component and the temperature
    /// changed by at most `eps` relative to its new norm.
    pub fn is_steady(&self, eps: f64) -> bool {
        self.change.iter().all(|&c| c <= eps)
    }
}

/// Result of [`Stepper::run_to_steady`].
#[derive(Debug, Clone, PartialEq)]
pub struct RunOutcome {
    pub steps: u64,
    pub steady: bool,
    pub history: Vec<StepDiagnostics>,
}

/// `||new - old|| / ||new||`, zero for two zero fields.
pub fn relative_change(new: &[f64], old: &[f64]) -> f64 {
    let d = exec::sum_by(new.len(), |i| {
        let e = new[i] - old[i];
        e * e
    })
    .sqrt();
    let n = exec::norm2(new);
    if d == 0.0 {
        0.0
    } else if n == 0.0 {
        f64::INFINITY
    } else {
        d / n
    }
}

struct ScaledSystem {
    /// Matrix before Dirichlet elimination, used for lifting.
    original: SymBandedMatrix,
    scaled: SymBandedMatrix,
    scale: Vec<f64>,
}

impl ScaledSystem {
    fn new(original: SymBandedMatrix, mask: &[bool]) -> Self {
        let mut modified = original.clone();
        let n = original.dim();
        apply_dirichlet_symmetric(&mut modified, &mut vec![0.0; n], &vec![0.0; n], mask);
        let (scaled, scale) = symmetric_scale(&modified);
        Self {
            original,
            scaled,
            scale,
        }
    }
}

/// Precomputed operators for one mesh and configuration.
pub struct Stepper {
    pub disc: Discretization,
    pub config: StepperConfig,
    pub transport: TransportConfig,
    pressure: PressureSolver,
    theta_system: ScaledSystem,
    velocity_system: ScaledSystem,
    /// Isothermal nodes.
    theta_mask: Vec<bool>,
    /// Wall temperature at isothermal nodes, zero elsewhere.
    theta_wall: Vec<f64>,
    wall: Vec<bool>,
    h_min: f64,
}

impl Stepper {
    pub fn new(disc: Discretization, config: StepperConfig) -> Result<Self, StepError> {
        config.validate()?;
        let transport = TransportConfig::new(config.dt, config.substeps)?;
        let pressure = PressureSolver::new(&disc, config.mean_eps)?;
        let tags = &disc.mesh.fine_tags;
        let theta_mask: Vec<bool> = tags.iter().map(|t| t.is_isothermal()).collect();
        let theta_wall = tags
            .iter()
            .map(|t| if *t == BoundaryTag::Left { 1.0 } else { 0.0 })
            .collect();
        let wall: Vec<bool> = tags.iter().map(|t| t.is_boundary()).collect();

        let mut a_theta = assemble_stiffness(&disc, 1.0)?;
        let mut a_vel = assemble_stiffness(&disc, config.pr)?;
        a_theta.add_diagonal(1.0 / config.dt, &disc.fine_mass);
        a_vel.add_diagonal(1.0 / config.dt, &disc.fine_mass);
        let h_min = disc.mesh.fine.min_spacing();
        Ok(Self {
            theta_system: ScaledSystem::new(a_theta, &theta_mask),
            velocity_system: ScaledSystem::new(a_vel, &wall),
            disc,
            config,
            transport,
            pressure,
            theta_mask,
            theta_wall,
            wall,
            h_min,
        })
    }

    /// Fluid at rest, `theta = 0` except on the hot wall.
    pub fn initialize(&self) -> SplitState {
        let n = self.disc.fine_nodes();
        SplitState {
            u: VectorField::zeros(n),
            theta: self.theta_wall.clone(),
            p: vec![0.0; self.disc.coarse_nodes()],
            t: 0.0,
            step: 0,
        }
    }

    pub fn isothermal_mask(&self) -> &[bool] {
        &self.theta_mask
    }

    fn impose_theta(&self, theta: &mut [f64]) {
        for ((v, &m), &g) in theta.iter_mut().zip(&self.theta_mask).zip(&self.theta_wall) {
            if m {
                *v = g;
            }
        }
    }

    /// Replaces `u` by its projection and updates `p`.
    pub fn pressure_step(&self, state: &mut SplitState) -> Result<PressureReport, StepError> {
        let c = &self.config;
        let (u, rep) = self
            .pressure
            .solve(c.dt, &state.u, &mut state.p, c.pcg_tol, c.pcg_max_iter);
        if !rep.cg.converged {
            return Err(StepError::NotConverged {
                stage: "pressure",
                iterations: rep.cg.iterations,
                residual: rep.cg.residual,
            });
        }
        state.u = u;
        Ok(rep)
    }

    /// Advects `theta` and all velocity components with the current `u`
    /// frozen; returns the CFL number `tau max|u| / h_min`.
    pub fn transport_step(&self, state: &mut SplitState) -> f64 {
        let adv = state.u.clone();
        let cfl = self.transport.tau * adv.max_norm() / self.h_min;
        if adv.0.iter().all(|c| c.iter().all(|&v| v == 0.0)) {
            return 0.0;
        }
        if cfl > 1.0 {
            log::warn!("step {}: transport CFL number {cfl:.3} exceeds 1", state.step + 1);
        }
        let wave = WaveCoefficients::new(&self.disc, &adv);
        let mut scratch = Vec::new();
        self.transport_field(&adv, &wave, &mut state.theta, true, &mut scratch);
        for c in 0..3 {
            self.transport_field(&adv, &wave, &mut state.u.0[c], false, &mut scratch);
        }
        cfl
    }

    fn transport_field(
        &self,
        adv: &VectorField,
        wave: &WaveCoefficients,
        f: &mut Vec<f64>,
        is_theta: bool,
        scratch: &mut Vec<[f64; 4]>,
    ) {
        let tau = self.transport.tau;
        let m = &self.disc.fine_mass;
        let mut op = vec![0.0; f.len()];
        apply_advection_into(&self.disc, adv, f, scratch, &mut op);
        let mut prev = f.clone();
        exec::for_each_mut(f, |i, v| *v -= tau * op[i] / m[i]);
        if is_theta {
            self.impose_theta(f);
        }
        for _ in 1..self.transport.substeps {
            wave.apply(&self.disc, f, scratch, &mut op);
            // prev <- 2 f - prev - tau^2 M^{-1} W f, then swap
            exec::for_each_mut(&mut prev, |i, p| *p = 2.0 * f[i] - *p - tau * tau * op[i] / m[i]);
            std::mem::swap(f, &mut prev);
            if is_theta {
                self.impose_theta(f);
            }
        }
    }

    /// Implicit diffusion; returns the iteration counts for
    /// `theta, u_x, u_y, u_z`.
    pub fn diffusion_step(&self, state: &mut SplitState) -> Result<[usize; 4], StepError> {
        let c = &self.config;
        let m = &self.disc.fine_mass;
        let inv_dt = 1.0 / c.dt;

        let mut b: Vec<f64> = exec::map_range(m.len(), |i| m[i] * state.theta[i] * inv_dt);
        let sys = &self.theta_system;
        apply_dirichlet_rhs(&sys.original, &mut b, &self.theta_wall, &self.theta_mask);
        self.impose_theta(&mut state.theta);
        let rep = cghs_scaled(&sys.scaled, &sys.scale, &b, &mut state.theta, c.cg_tol, c.cg_max_iter);
        check("temperature", rep)?;
        let theta_iters = rep.iterations;

        let buoyancy = c.ra * c.pr;
        let theta = &state.theta;
        let wall = &self.wall;
        let vel = &self.velocity_system;
        let solve = |comp: usize, u: &mut Vec<f64>| -> CgReport {
            let b: Vec<f64> = exec::map_range(m.len(), |i| {
                if wall[i] {
                    0.0
                } else {
                    let src = if comp == 1 {
                        buoyancy * m[i] * (theta[i] - c.theta_ref)
                    } else {
                        0.0
                    };
                    m[i] * u[i] * inv_dt + src
                }
            });
            for (v, &w) in u.iter_mut().zip(wall) {
                if w {
                    *v = 0.0;
                }
            }
            cghs_scaled(&vel.scaled, &vel.scale, &b, u, c.cg_tol, c.cg_max_iter)
        };
        let [ux, uy, uz] = &mut state.u.0;
        let (rx, (ry, rz)) = exec::join(|| solve(0, ux), || exec::join(|| solve(1, uy), || solve(2, uz)));
        for r in [rx, ry, rz] {
            check("velocity", r)?;
        }
        Ok([theta_iters, rx.iterations, ry.iterations, rz.iterations])
    }

    /// One full step.
    pub fn advance(&self, state: &mut SplitState) -> Result<StepDiagnostics, StepError> {
        let old_u = state.u.clone();
        let old_theta = state.theta.clone();
        let pressure = self.pressure_step(state)?;
        let cfl = self.transport_step(state);
        let cg_iterations = self.diffusion_step(state)?;
        state.step += 1;
        state.t = state.step as f64 * self.config.dt;

        let change = [
            relative_change(&state.u.0[0], &old_u.0[0]),
            relative_change(&state.u.0[1], &old_u.0[1]),
            relative_change(&state.u.0[2], &old_u.0[2]),
            relative_change(&state.theta, &old_theta),
        ];
        let m = &self.disc.fine_mass;
        let u = &state.u;
        let kinetic_energy = 0.5
            * exec::sum_by(m.len(), |i| {
                let v = u.at(i);
                m[i] * (v[0] * v[0] + v[1] * v[1] + v[2] * v[2])
            });
        let (theta_min, theta_max) = state
            .theta
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| {
                (lo.min(v), hi.max(v))
            });
        Ok(StepDiagnostics {
            step: state.step,
            t: state.t,
            cfl,
            pcg_iterations: pressure.cg.iterations,
            divergence: pressure.divergence,
            cg_iterations,
            change,
            kinetic_energy,
            theta_min,
            theta_max,
            pressure_mean: self.disc.coarse_mean(&state.p).abs(),
        })
    }

    /// Advances until [`StepDiagnostics::is_steady`] holds or `max_steps`
    /// steps have been taken in total. `on_step` sees every new state.
    pub fn run_to_steady<E, F>(
        &self,
        state: &mut SplitState,
        eps: f64,
        max_steps: u64,
        mut on_step: F,
    ) -> Result<RunOutcome, E>
    where
        E: From<StepError>,
        F: FnMut(&SplitState, &StepDiagnostics) -> Result<(), E>,
    {
        let mut history = Vec::new();
        let mut steady = false;
        while state.step < max_steps {
            let d = self.advance(state)?;
            on_step(state, &d)?;
            history.push(d);
            if d.is_steady(eps) {
                steady = true;
                break;
            }
        }
        Ok(RunOutcome {
            steps: state.step,
            steady,
            history,
        })
    }
}

fn check(stage: &'static str, r: CgReport) -> Result<(), StepError> {
    if r.converged {
        Ok(())
    } else {
        Err(StepError::NotConverged {
            stage,
            iterations: r.iterations,
            residual: r.residual,
        })
    }
}
