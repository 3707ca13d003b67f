//! Acceptance runs. Prints one `PASS`, `FAIL` or `SKIP` line per criterion
//! and exits non-zero if any criterion fails.
//!
//! `NATCONV_EXTENDED=1` enables the hours-long full-resolution run.
//! `NATCONV_ONLY=2,8` restricts the run to the listed criteria.

#![allow(clippy::needless_range_loop)]

#[path = "../../core/tests/common/mod.rs"]
mod common;

use std::path::Path;
use std::time::{Duration, Instant};

use natconv::config::{preset, RunConfig};
use natconv::mesh::{validate_mesh, AxisPartition, GenericShape, TwoLevelMesh};
use natconv::run::{execute, RunResult};

enum Verdict {
    Pass(String),
    Fail(String),
    Skip(String),
}

fn verdict(ok: bool, detail: String) -> Verdict {
    if ok {
        Verdict::Pass(detail)
    } else {
        Verdict::Fail(detail)
    }
}

fn within(value: f64, target: f64, rel: f64) -> bool {
    (value - target).abs() <= rel * target.abs()
}

fn run_in(cfg: RunConfig, dir: &Path) -> RunResult {
    let cfg = RunConfig {
        output_dir: dir.to_path_buf(),
        ..cfg
    };
    execute(&cfg).unwrap_or_else(|e| panic!("run failed: {e}"))
}

fn conduction() -> Verdict {
    let dir = tempfile::tempdir().unwrap();
    let start = Instant::now();
    let cfg = preset("conduction").unwrap();
    let r = run_in(cfg.clone(), dir.path());
    let elapsed = start.elapsed();
    let fine = TwoLevelMesh::build(&cfg.partitions).unwrap().fine;
    let err = (0..fine.len())
        .map(|n| (r.state.theta[n] - (1.0 - fine.coord(n)[0])).abs())
        .fold(0.0, f64::max);
    let nu = r.nusselt.overall;
    let dims = fine.dims();
    verdict(
        r.outcome.steady
            && dims == [21, 21, 21]
            && (nu - 1.0).abs() <= 1e-3
            && err <= 1e-6
            && elapsed <= Duration::from_secs(120),
        format!(
            "{}x{}x{} fine nodes, steady after {} steps, Nu = {nu:.9}, max |theta - (1 - x)| = {err:.2e}, {:.1} s",
            dims[0],
            dims[1],
            dims[2],
            r.outcome.steps,
            elapsed.as_secs_f64()
        ),
    )
}

/// The steady Ra = 10^3 desk run shared by criteria 2, 7 and 8.
struct DeskRun {
    result: RunResult,
    elapsed: Duration,
}

fn desk_run() -> DeskRun {
    let dir = tempfile::tempdir().unwrap();
    let start = Instant::now();
    let result = run_in(preset("ra1e3-desk").unwrap(), dir.path());
    DeskRun {
        result,
        elapsed: start.elapsed(),
    }
}

fn table_two_desk(d: &DeskRun) -> Verdict {
    let r = &d.result;
    let (nu, mid) = (r.nusselt.overall, r.nusselt.mid);
    let (nu_target, mid_target) = (1.2466, 1.2563);
    verdict(
        r.outcome.steady
            && within(nu, nu_target, 0.08)
            && within(mid, mid_target, 0.08)
            && d.elapsed <= Duration::from_secs(900),
        format!(
            "Ra = 1e3, 21^3, dt = 1/1000: steady = {} after {} steps, Nu = {nu:.4} (target {nu_target} +-8%, {:+.1}%), \
             Nu_av(0.5) = {mid:.4} (target {mid_target} +-8%, {:+.1}%), {:.0} s",
            r.outcome.steady,
            r.outcome.steps,
            100.0 * (nu / nu_target - 1.0),
            100.0 * (mid / mid_target - 1.0),
            d.elapsed.as_secs_f64()
        ),
    )
}

fn ra1e4_full_resolution() -> Verdict {
    if std::env::var("NATCONV_EXTENDED").as_deref() != Ok("1") {
        return Verdict::Skip("Ra = 1e4 on 41^3 takes hours; set NATCONV_EXTENDED=1".into());
    }
    let dir = tempfile::tempdir().unwrap();
    let start = Instant::now();
    let r = run_in(preset("paper-ra1e4").unwrap(), dir.path());
    let nu = r.nusselt.overall;
    verdict(
        r.outcome.steady && within(nu, 1.9737, 0.03),
        format!(
            "Ra = 1e4, 41^3, dt = 1/4000: steady = {} after {} steps, Nu = {nu:.4} (target 1.9737 +-3%), {:.0} s",
            r.outcome.steady,
            r.outcome.steps,
            start.elapsed().as_secs_f64()
        ),
    )
}

fn high_rayleigh_profiles() -> Verdict {
    let dir = tempfile::tempdir().unwrap();
    let start = Instant::now();
    let cfg = preset("ra1e5-desk").unwrap();
    let r = run_in(
        RunConfig {
            steady_eps: 1e-300,
            max_steps: 2000,
            ..cfg
        },
        dir.path(),
    );
    let peaks = &r.peaks;
    let maxima: Vec<f64> = peaks.local_maxima().iter().map(|&k| peaks.z[k]).collect();
    let two_peaks = maxima.len() == 2 && maxima[0] < 0.25 && maxima[1] > 0.75;
    let nu = &r.nusselt;
    let (first, last) = (nu.profile[0], *nu.profile.last().unwrap());
    let ends_higher = first > nu.mid && last > nu.mid;
    verdict(
        r.outcome.steps == 2000 && two_peaks && ends_higher,
        format!(
            "Ra = 1e5, 23^3 graded, {} steps: (u_y)_max local maxima at z = {maxima:?}, \
             Nu_av(z) ends {first:.3} / {last:.3} vs mid {:.3}, {:.0} s",
            r.outcome.steps,
            nu.mid,
            start.elapsed().as_secs_f64()
        ),
    )
}

fn mesh_suite() -> Verdict {
    let start = Instant::now();
    let graded = AxisPartition::boundary_layer_graded();
    let aniso = [
        AxisPartition::new(vec![0.0, 0.2, 1.3], vec![2, 3]).unwrap(),
        AxisPartition::uniform(0.7, 4).unwrap(),
        AxisPartition::new(vec![0.0, 1.0, 1.1, 2.0], vec![2, 1, 2]).unwrap(),
    ];
    let cases: Vec<(&str, TwoLevelMesh)> = vec![
        ("one brick", TwoLevelMesh::unit_cube(1).unwrap()),
        ("10^3 bricks", TwoLevelMesh::unit_cube(10).unwrap()),
        (
            "graded 22^3 bricks",
            TwoLevelMesh::build(&[graded.clone(), graded.clone(), graded]).unwrap(),
        ),
        ("anisotropic box", TwoLevelMesh::build(&aniso).unwrap()),
    ];
    let mut problems = Vec::new();
    let mut elements = 0;
    for (name, mesh) in &cases {
        let report = validate_mesh(mesh);
        elements += mesh.fine_tets.len();
        if !report.is_valid() {
            problems.push(format!(
                "{name}: {} failures, first {:?}",
                report.failures.len(),
                report.failures[0]
            ));
        }
        let ext = mesh.fine.extents();
        let vol = ext[0] * ext[1] * ext[2];
        if (report.total_volume - vol).abs() > 1e-12 * vol {
            problems.push(format!("{name}: volume {} vs {vol}", report.total_volume));
        }
        // every brick holds 6 equal coarse elements and 8 fine elements of each shape
        let [cx, cy, cz] = mesh.coarse.dims().map(|d| d - 1);
        let mut count = vec![0usize; cx * cy * cz];
        let mut census = vec![[0usize; 6]; cx * cy * cz];
        for t in 0..mesh.coarse_tets.len() {
            let v = mesh.coarse_vertices(t);
            let axes = [&mesh.coarse.xs, &mesh.coarse.ys, &mesh.coarse.zs];
            let ijk: [usize; 3] = std::array::from_fn(|a| {
                let c = v.iter().map(|p| p[a]).sum::<f64>() / 4.0;
                axes[a].iter().rposition(|&x| x < c).unwrap()
            });
            let b = ijk[0] + cx * (ijk[1] + cy * ijk[2]);
            let bv: f64 = (0..3).map(|a| axes[a][ijk[a] + 1] - axes[a][ijk[a]]).product();
            if (common::volume(&v) - bv / 6.0).abs() > 1e-14 * bv {
                problems.push(format!("{name}: coarse element {t} is not a sixth of its brick"));
            }
            count[b] += 1;
            for &c in &mesh.children[t] {
                census[b][GenericShape::ALL
                    .iter()
                    .position(|&s| s == mesh.fine_tets[c].shape)
                    .unwrap()] += 1;
            }
        }
        if count.iter().any(|&c| c != 6) || census.iter().any(|c| *c != [8; 6]) {
            problems.push(format!(
                "{name}: brick census differs from 6 coarse and 8 fine per shape"
            ));
        }
    }
    let elapsed = start.elapsed();
    let ok = problems.is_empty() && elapsed <= Duration::from_secs(60);
    verdict(
        ok,
        if problems.is_empty() {
            format!(
                "{} meshes, {elements} fine elements: valid, volumes exact, 6 + 8x6 census per brick, {:.1} s",
                cases.len(),
                elapsed.as_secs_f64()
            )
        } else {
            problems.join("; ")
        },
    )
}

fn oracle_suite() -> Verdict {
    let start = Instant::now();
    let cg = common::cghs_error();
    let p = common::pressure_error();
    let mixed = common::mixed_integral_error();
    let elapsed = start.elapsed();
    verdict(
        cg <= 1e-10 && p.velocity <= 1e-8 && p.schur_residual <= 1e-8 && mixed <= 1e-12 && elapsed.as_secs() < 60,
        format!(
            "2x2x2 bricks: CGHS vs Cholesky {cg:.1e}, PCG velocity vs dense saddle point {:.1e} \
             (Schur residual {:.1e}, kernel dimension {}), mixed integrals {mixed:.1e}, {:.2} s",
            p.velocity,
            p.schur_residual,
            p.kernel,
            elapsed.as_secs_f64()
        ),
    )
}

fn projection_quality(d: &DeskRun) -> Verdict {
    let h = &d.result.outcome.history;
    let worst = h.iter().map(|s| s.divergence).fold(0.0, f64::max);
    let last = h.last().unwrap();
    let change = last.change.iter().copied().fold(0.0, f64::max);
    verdict(
        worst <= 1e-8 && d.result.outcome.steady && change <= 1e-5,
        format!(
            "{} pressure steps, max weak divergence {worst:.2e}; final relative change {change:.2e} (eps 1e-5)",
            h.len()
        ),
    )
}

fn symmetry(d: &DeskRun) -> Verdict {
    let s = &d.result.summary;
    let reported = s.get("defect_z_mirror_theta").is_some() && s.get("defect_centro_theta").is_some();
    let defects = &d.result.defects;
    let worst = defects
        .iter()
        .fold(None::<&natconv::postprocess::SymmetryDefect>, |w, x| match w {
            Some(w) if w.defect >= x.defect => Some(w),
            _ => Some(x),
        });
    let list: Vec<String> = defects
        .iter()
        .map(|x| format!("{} {} {:.4}", x.relation, x.field, x.defect))
        .collect();
    let ok = reported && !defects.is_empty() && defects.iter().all(|x| x.defect <= 0.02);
    verdict(
        ok,
        format!(
            "worst {} (limit 0.02); all: {}",
            worst.map_or("-".into(), |w| format!("{} {} {:.4}", w.relation, w.field, w.defect)),
            list.join(", ")
        ),
    )
}

fn determinism() -> Verdict {
    let base = RunConfig {
        max_steps: 60,
        checkpoint_every: 30,
        ..preset("ra1e3-desk").unwrap()
    };
    let dirs: Vec<_> = (0..4).map(|_| tempfile::tempdir().unwrap()).collect();
    let read = |d: &tempfile::TempDir, f: &str| std::fs::read(d.path().join(f)).unwrap();
    run_in(base.clone(), dirs[0].path());
    run_in(base.clone(), dirs[1].path());
    let pool = rayon::ThreadPoolBuilder::new().num_threads(3).build().unwrap();
    pool.install(|| run_in(base.clone(), dirs[2].path()));
    let restart = RunConfig {
        restart: Some(dirs[0].path().join("checkpoint_00000030.bin")),
        ..base
    };
    run_in(restart, dirs[3].path());

    let mut problems = Vec::new();
    for f in ["summary.txt", "final.mesh", "nusselt.csv", "uy_max.csv"] {
        let a = read(&dirs[0], f);
        for (k, label) in [(1, "repeat"), (2, "3 threads"), (3, "restart at step 30")] {
            if read(&dirs[k], f) != a {
                problems.push(format!("{f} differs for {label}"));
            }
        }
    }
    // the restarted diagnostics are the tail of the uninterrupted ones
    let full = String::from_utf8(read(&dirs[0], "diagnostics.csv")).unwrap();
    let tail = String::from_utf8(read(&dirs[3], "diagnostics.csv")).unwrap();
    let rows = |t: &str| {
        t.lines()
            .filter(|l| !l.starts_with('#') && !l.starts_with("step"))
            .map(String::from)
            .collect::<Vec<_>>()
    };
    if rows(&full)[30..] != rows(&tail)[..] {
        problems.push("restarted diagnostics differ".into());
    }
    verdict(
        problems.is_empty(),
        if problems.is_empty() {
            "60-step desk run: summary, fields and curves bitwise identical on repeat, on 3 threads and after restart at step 30".into()
        } else {
            problems.join("; ")
        },
    )
}

fn main() {
    let only: Option<Vec<u32>> = std::env::var("NATCONV_ONLY")
        .ok()
        .map(|v| v.split(',').filter_map(|s| s.trim().parse().ok()).collect());
    let wanted = |c: u32| only.as_ref().is_none_or(|o| o.contains(&c));
    let titles = [
        "conduction limit",
        "Ra = 1e3 Nusselt numbers at desk scale",
        "Ra = 1e4 Nusselt number at full resolution",
        "Ra = 1e5 peak and Nusselt profiles",
        "mesh invariants",
        "dense oracle equivalence",
        "projection quality and steady state",
        "symmetry defects",
        "determinism",
    ];
    let desk = if [2, 7, 8].iter().any(|&c| wanted(c)) {
        Some(desk_run())
    } else {
        None
    };
    let mut failed = 0;
    for (i, title) in titles.iter().enumerate() {
        let c = i as u32 + 1;
        if !wanted(c) {
            continue;
        }
        let v = match c {
            1 => conduction(),
            2 => table_two_desk(desk.as_ref().unwrap()),
            3 => ra1e4_full_resolution(),
            4 => high_rayleigh_profiles(),
            5 => mesh_suite(),
            6 => oracle_suite(),
            7 => projection_quality(desk.as_ref().unwrap()),
            8 => symmetry(desk.as_ref().unwrap()),
            _ => determinism(),
        };
        let (tag, detail) = match v {
            Verdict::Pass(d) => ("PASS", d),
            Verdict::Fail(d) => {
                failed += 1;
                ("FAIL", d)
            }
            Verdict::Skip(d) => ("SKIP", d),
        };
        println!("{tag} criterion {c} ({title}): {detail}");
    }
    if failed > 0 {
        println!("{failed} criterion(s) failed");
        std::process::exit(1);
    }
}
