//! A complete run: mesh, time loop, post-processing and output files.
//!
//! Files written to the output directory, each carrying the config hash:
//!
//! - `diagnostics.csv`: one row per step (see [`DIAGNOSTICS_HEADER`]),
//!   starting after the restart step when restarted;
//! - `nusselt.csv`: `z,nu_av`;
//! - `uy_max.csv`: `z,uy_max,x,y` with the maximising node;
//! - `summary.txt`: `key = value` lines, see [`RunSummary`];
//! - `final.mesh` and `snapshot_<step>.mesh`: mesh files with fields;
//! - `checkpoint_<step>.bin`: binary checkpoints.
//!
//! Velocity-derived quantities (peaks, symmetry defects) are evaluated on
//! the projection of the final velocity, the weakly divergence-free field
//! the next step would transport with. The end-of-step velocity still holds
//! the last, unprojected buoyancy increment.

use std::fmt::Write as _;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::config::{ConfigError, RunConfig};
use crate::fem::{Discretization, FemError};
use crate::mesh::{write_mesh_with_fields, MeshError, MeshFields, TwoLevelMesh};
use crate::postprocess::{
    centro_mirror, nusselt, reflection_defect, symmetry_defects, uy_max_profile, NusseltReport, PeakReport,
    PostprocessError, SymmetryDefect,
};
use crate::stepper::{read_checkpoint, write_checkpoint, RunOutcome, SplitState, StepDiagnostics, StepError, Stepper};

#[derive(Debug, Error)]
pub enum RunError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("mesh: {0}")]
    Mesh(#[from] MeshError),
    #[error(transparent)]
    Fem(#[from] FemError),
    #[error(transparent)]
    Step(StepError),
    #[error("post-processing: {0}")]
    Postprocess(#[from] PostprocessError),
    #[error("restart file {path}: {msg}")]
    Restart { path: PathBuf, msg: String },
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
}

impl From<StepError> for RunError {
    fn from(e: StepError) -> Self {
        RunError::Step(e)
    }
}

/// Process exit codes.
pub mod exit_code {
    /// Steady state reached.
    pub const STEADY: i32 = 0;
    /// Internal error.
    pub const INTERNAL: i32 = 1;
    /// Step limit reached before the steady-state test held.
    pub const NOT_STEADY: i32 = 2;
    /// A linear solver failed to converge.
    pub const SOLVER: i32 = 3;
    /// Invalid configuration, mesh parameters or restart file.
    pub const CONFIG: i32 = 4;
    /// Reading or writing a file failed.
    pub const IO: i32 = 5;
}

impl RunError {
    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::Config(_) | RunError::Mesh(MeshError::Partition(_) | MeshError::DegenerateBrick(_)) => {
                exit_code::CONFIG
            }
            RunError::Restart { .. } => exit_code::CONFIG,
            RunError::Step(StepError::NotConverged { .. } | StepError::Solver(_)) => exit_code::SOLVER,
            RunError::Step(StepError::Config(_)) => exit_code::CONFIG,
            RunError::Step(StepError::Io(_)) | RunError::Io { .. } | RunError::Mesh(MeshError::Io(_)) => exit_code::IO,
            _ => exit_code::INTERNAL,
        }
    }
}

pub const DIAGNOSTICS_HEADER: &str = "step,t,cfl,pcg_iterations,divergence,cg_theta,cg_ux,cg_uy,cg_uz,\
change_ux,change_uy,change_uz,change_theta,kinetic_energy,theta_min,theta_max,pressure_mean";

fn diagnostics_row(d: &StepDiagnostics) -> String {
    format!(
        "{},{:?},{:?},{},{:?},{},{},{},{},{:?},{:?},{:?},{:?},{:?},{:?},{:?},{:?}",
        d.step,
        d.t,
        d.cfl,
        d.pcg_iterations,
        d.divergence,
        d.cg_iterations[0],
        d.cg_iterations[1],
        d.cg_iterations[2],
        d.cg_iterations[3],
        d.change[0],
        d.change[1],
        d.change[2],
        d.change[3],
        d.kinetic_energy,
        d.theta_min,
        d.theta_max,
        d.pressure_mean
    )
}

/// Ordered `key = value` record of a finished run. Values are exact
/// shortest round-trip decimal forms, so equal runs give equal text.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct RunSummary {
    pub entries: Vec<(String, String)>,
}

impl RunSummary {
    fn push(&mut self, k: &str, v: impl Into<String>) {
        self.entries.push((k.into(), v.into()));
    }

    fn num(&mut self, k: &str, v: f64) {
        self.push(k, format!("{v:?}"));
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }

    pub fn get_f64(&self, key: &str) -> Option<f64> {
        self.get(key)?.parse().ok()
    }

    pub fn to_text(&self) -> String {
        self.entries.iter().map(|(k, v)| format!("{k} = {v}\n")).collect()
    }

    pub fn parse(text: &str) -> Self {
        let entries = text
            .lines()
            .filter_map(|l| l.split_once(" = "))
            .map(|(k, v)| (k.to_string(), v.to_string()))
            .collect();
        Self { entries }
    }
}

/// Everything a finished run produced.
#[derive(Debug, Clone)]
pub struct RunResult {
    pub summary: RunSummary,
    pub outcome: RunOutcome,
    pub state: SplitState,
    pub nusselt: NusseltReport,
    pub peaks: PeakReport,
    pub defects: Vec<SymmetryDefect>,
}

impl RunResult {
    pub fn exit_code(&self) -> i32 {
        if self.outcome.steady {
            exit_code::STEADY
        } else {
            exit_code::NOT_STEADY
        }
    }
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> RunError + '_ {
    move |source| RunError::Io {
        path: path.to_path_buf(),
        source,
    }
}

fn create(path: &Path) -> Result<BufWriter<File>, RunError> {
    File::create(path).map(BufWriter::new).map_err(io_err(path))
}

fn write_snapshot(path: &Path, mesh: &TwoLevelMesh, hash: &str, state: &SplitState) -> Result<(), RunError> {
    let mut w = create(path)?;
    let fields = MeshFields {
        u: [&state.u.0[0], &state.u.0[1], &state.u.0[2]],
        p: &state.p,
        theta: &state.theta,
    };
    write_mesh_with_fields(&mut w, mesh, Some(hash), fields).map_err(|e| match e {
        MeshError::Io(source) => RunError::Io {
            path: path.to_path_buf(),
            source,
        },
        e => e.into(),
    })?;
    w.flush().map_err(io_err(path))
}

/// Builds the mesh and the stepper of a configuration.
pub fn build_stepper(cfg: &RunConfig) -> Result<Stepper, RunError> {
    cfg.validate()?;
    let mesh = TwoLevelMesh::build(&cfg.partitions)?;
    let disc = Discretization::new(mesh)?;
    Ok(Stepper::new(disc, cfg.stepper_config())?)
}

fn restore(cfg: &RunConfig, stepper: &Stepper, path: &Path) -> Result<SplitState, RunError> {
    let (hash, state) = read_checkpoint(path).map_err(|e| match e {
        StepError::Io(source) => RunError::Io {
            path: path.to_path_buf(),
            source,
        },
        e => RunError::Restart {
            path: path.to_path_buf(),
            msg: e.to_string(),
        },
    })?;
    let bad = |msg: String| RunError::Restart {
        path: path.to_path_buf(),
        msg,
    };
    if hash != cfg.hash() {
        return Err(bad(format!(
            "written by configuration {hash}, this one is {}",
            cfg.hash()
        )));
    }
    if state.theta.len() != stepper.disc.fine_nodes() || state.p.len() != stepper.disc.coarse_nodes() {
        return Err(bad("field sizes do not match the mesh".into()));
    }
    Ok(state)
}

/// Runs a configuration to completion and writes every artifact.
pub fn execute(cfg: &RunConfig) -> Result<RunResult, RunError> {
    let stepper = build_stepper(cfg)?;
    let hash = cfg.hash();
    let mut state = match &cfg.restart {
        Some(path) => restore(cfg, &stepper, path)?,
        None => stepper.initialize(),
    };
    let out = &cfg.output_dir;
    std::fs::create_dir_all(out).map_err(io_err(out))?;
    let mesh = &stepper.disc.mesh;
    log::info!(
        "mesh {}x{}x{} fine nodes, {} fine elements; starting at step {}",
        mesh.fine.xs.len(),
        mesh.fine.ys.len(),
        mesh.fine.zs.len(),
        mesh.fine_tets.len(),
        state.step
    );

    let diag_path = out.join("diagnostics.csv");
    let mut diag = create(&diag_path)?;
    writeln!(diag, "# config_hash = {hash}\n{DIAGNOSTICS_HEADER}").map_err(io_err(&diag_path))?;
    let outcome = stepper.run_to_steady::<RunError, _>(&mut state, cfg.steady_eps, cfg.max_steps, |st, d| {
        writeln!(diag, "{}", diagnostics_row(d)).map_err(io_err(&diag_path))?;
        if d.step % 100 == 0 {
            log::info!(
                "step {} t={:.4} pcg={} change={:.2e} cfl={:.3}",
                d.step,
                d.t,
                d.pcg_iterations,
                d.change.iter().fold(0.0f64, |a, &b| a.max(b)),
                d.cfl
            );
        }
        if cfg.snapshot_every > 0 && d.step % cfg.snapshot_every == 0 {
            write_snapshot(&out.join(format!("snapshot_{:08}.mesh", d.step)), mesh, &hash, st)?;
        }
        if cfg.checkpoint_every > 0 && d.step % cfg.checkpoint_every == 0 {
            let p = out.join(format!("checkpoint_{:08}.bin", d.step));
            write_checkpoint(&p, &hash, st).map_err(|e| match e {
                StepError::Io(source) => RunError::Io {
                    path: p.clone(),
                    source,
                },
                e => e.into(),
            })?;
        }
        Ok(())
    })?;
    diag.flush().map_err(io_err(&diag_path))?;

    // the divergence-free velocity of the final state
    let mut projected = state.clone();
    stepper.pressure_step(&mut projected)?;

    let nu = nusselt(&mesh.fine, &state.theta)?;
    let peaks = uy_max_profile(&mesh.fine, &projected.u, cfg.profile_line)?;
    let hydrostatic = cfg.ra * cfg.pr * (0.5 - cfg.theta_ref);
    let (defects, p_raw) = match symmetry_defects(
        &mesh.fine,
        &mesh.coarse,
        &projected.u,
        &state.theta,
        &projected.p,
        hydrostatic,
    ) {
        Ok(d) => {
            let perm = centro_mirror(&mesh.coarse)?;
            (d, Some(reflection_defect(&projected.p, &perm, 1.0, 0.0)))
        }
        Err(PostprocessError::AsymmetricLattice(what)) => {
            log::warn!("symmetry defects skipped: lattice is not symmetric under {what}");
            (Vec::new(), None)
        }
        Err(e) => return Err(e.into()),
    };

    let nu_path = out.join("nusselt.csv");
    let mut w = create(&nu_path)?;
    let mut text = format!("# config_hash = {hash}\nz,nu_av\n");
    for (z, v) in nu.z.iter().zip(&nu.profile) {
        writeln!(text, "{z:?},{v:?}").unwrap();
    }
    w.write_all(text.as_bytes())
        .and_then(|_| w.flush())
        .map_err(io_err(&nu_path))?;

    let uy_path = out.join("uy_max.csv");
    let mut w = create(&uy_path)?;
    let mut text = format!("# config_hash = {hash}\nz,uy_max,x,y\n");
    for ((z, v), at) in peaks.z.iter().zip(&peaks.uy_max).zip(&peaks.argmax) {
        writeln!(text, "{z:?},{v:?},{:?},{:?}", at[0], at[1]).unwrap();
    }
    w.write_all(text.as_bytes())
        .and_then(|_| w.flush())
        .map_err(io_err(&uy_path))?;

    write_snapshot(&out.join("final.mesh"), mesh, &hash, &state)?;

    let summary = summarize(cfg, &stepper, &state, &outcome, &nu, &peaks, &defects, p_raw);
    let sum_path = out.join("summary.txt");
    let mut w = create(&sum_path)?;
    w.write_all(summary.to_text().as_bytes())
        .and_then(|_| w.flush())
        .map_err(io_err(&sum_path))?;

    Ok(RunResult {
        summary,
        outcome,
        state,
        nusselt: nu,
        peaks,
        defects,
    })
}

#[allow(clippy::too_many_arguments)]
fn summarize(
    cfg: &RunConfig,
    stepper: &Stepper,
    state: &SplitState,
    outcome: &RunOutcome,
    nu: &NusseltReport,
    peaks: &PeakReport,
    defects: &[SymmetryDefect],
    p_raw: Option<f64>,
) -> RunSummary {
    let mesh = &stepper.disc.mesh;
    let dims = |l: &crate::mesh::Lattice| {
        let [a, b, c] = l.dims();
        format!("{a}x{b}x{c}")
    };
    let mut s = RunSummary::default();
    s.push("config_hash", cfg.hash());
    s.num("ra", cfg.ra);
    s.num("pr", cfg.pr);
    s.push("fine_nodes", dims(&mesh.fine));
    s.push("coarse_nodes", dims(&mesh.coarse));
    s.push("fine_elements", mesh.fine_tets.len().to_string());
    s.num("dt", cfg.dt);
    s.push("substeps", cfg.substeps.to_string());
    s.num("steady_eps", cfg.steady_eps);
    s.push("steps", state.step.to_string());
    s.num("t", state.t);
    s.push("steady", outcome.steady.to_string());
    if let Some(d) = outcome.history.last() {
        s.num("change_ux", d.change[0]);
        s.num("change_uy", d.change[1]);
        s.num("change_uz", d.change[2]);
        s.num("change_theta", d.change[3]);
        s.num("divergence", d.divergence);
        s.push("pcg_iterations", d.pcg_iterations.to_string());
        s.num("cfl", d.cfl);
        s.num("kinetic_energy", d.kinetic_energy);
        s.num("theta_min", d.theta_min);
        s.num("theta_max", d.theta_max);
    }
    s.num("nu_overall", nu.overall);
    s.num("nu_av_mid", nu.mid);
    s.push("uy_profile_line", peaks.section.as_str());
    s.num("uy_line_coordinate", peaks.line_coordinate);
    s.num("uy_peak", peaks.peak);
    s.num("uy_peak_x", peaks.peak_at[0]);
    s.num("uy_peak_y", peaks.peak_at[1]);
    s.num("uy_peak_z", peaks.peak_at[2]);
    let maxima: Vec<String> = peaks
        .local_maxima()
        .iter()
        .map(|&k| format!("{:?}", peaks.z[k]))
        .collect();
    s.push(
        "uy_local_maxima_z",
        if maxima.is_empty() {
            "-".into()
        } else {
            maxima.join(" ")
        },
    );
    for d in defects {
        s.num(
            &format!("defect_{}_{}", d.relation.replace('-', "_"), d.field),
            d.defect,
        );
    }
    if let Some(v) = p_raw {
        s.num("defect_centro_p_raw", v);
    }
    s
}
