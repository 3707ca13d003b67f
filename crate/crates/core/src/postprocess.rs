//! Derived quantities: Nusselt numbers, vertical-velocity peak profiles and
//! the approximate symmetries of the steady flow.

use thiserror::Error;

use crate::fem::VectorField;
use crate::mesh::Lattice;

#[derive(Debug, Error, PartialEq)]
pub enum PostprocessError {
    #[error("need at least three gridlines in x for the wall flux, got {0}")]
    TooFewGridlines(usize),
    #[error("lattice is not symmetric under {0}")]
    AsymmetricLattice(&'static str),
    #[error("field has {got} values, lattice has {expected} nodes")]
    Length { got: usize, expected: usize },
}

/// One-sided second-order derivative at `x0` from three collinear samples
/// with spacings `h1 = x1 - x0`, `h2 = x2 - x1`.
pub fn forward_derivative(h1: f64, h2: f64, f: [f64; 3]) -> f64 {
    -(2.0 * h1 + h2) / (h1 * (h1 + h2)) * f[0] + (h1 + h2) / (h1 * h2) * f[1] - h1 / (h2 * (h1 + h2)) * f[2]
}

/// `d theta / dx` at `x = 0` on every wall gridline, indexed `j + ny * k`.
pub fn wall_heat_flux(lat: &Lattice, theta: &[f64]) -> Result<Vec<f64>, PostprocessError> {
    check_len(lat, theta)?;
    if lat.xs.len() < 3 {
        return Err(PostprocessError::TooFewGridlines(lat.xs.len()));
    }
    let (h1, h2) = (lat.xs[1] - lat.xs[0], lat.xs[2] - lat.xs[1]);
    let [_, ny, nz] = lat.dims();
    Ok((0..ny * nz)
        .map(|jk| {
            let (j, k) = (jk % ny, jk / ny);
            let f = [0, 1, 2].map(|i| theta[lat.index(i, j, k)]);
            forward_derivative(h1, h2, f)
        })
        .collect())
}

/// Trapezoidal rule on an arbitrary grid.
pub fn trapezoid(x: &[f64], f: &[f64]) -> f64 {
    x.windows(2)
        .zip(f.windows(2))
        .map(|(x, f)| 0.5 * (x[1] - x[0]) * (f[0] + f[1]))
        .sum()
}

/// Linear interpolation of a sampled curve.
pub fn sample_at(x: &[f64], f: &[f64], at: f64) -> f64 {
    match x.iter().position(|&v| v >= at) {
        Some(0) => f[0],
        Some(i) => {
            let w = (at - x[i - 1]) / (x[i] - x[i - 1]);
            (1.0 - w) * f[i - 1] + w * f[i]
        }
        None => *f.last().unwrap(),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct NusseltReport {
    /// Overall Nusselt number on the hot wall.
    pub overall: f64,
    /// The `z` gridlines of the `y`-averaged curve.
    pub z: Vec<f64>,
    /// `Nu_av(z) = -\int d theta/dx dy` at `x = 0`.
    pub profile: Vec<f64>,
    /// `Nu_av` at mid-depth.
    pub mid: f64,
}

pub fn nusselt(lat: &Lattice, theta: &[f64]) -> Result<NusseltReport, PostprocessError> {
    let flux = wall_heat_flux(lat, theta)?;
    let ny = lat.ys.len();
    let profile: Vec<f64> = flux.chunks(ny).map(|col| -trapezoid(&lat.ys, col)).collect();
    let overall = trapezoid(&lat.zs, &profile);
    let mid = sample_at(&lat.zs, &profile, 0.5 * lat.extents()[2]);
    Ok(NusseltReport {
        overall,
        z: lat.zs.clone(),
        profile,
        mid,
    })
}

/// Which line or plane `(u_y)_max(z)` maximises over.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ProfileSection {
    /// Over `x` along the mid-height line `y = A_y / 2` of each `z` plane.
    #[default]
    MidHeightLine,
    /// Over `y` along the mid-width line `x = A_x / 2` of each `z` plane.
    MidWidthLine,
}

impl ProfileSection {
    pub fn as_str(self) -> &'static str {
        match self {
            ProfileSection::MidHeightLine => "y-mid",
            ProfileSection::MidWidthLine => "x-mid",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "y-mid" => Some(ProfileSection::MidHeightLine),
            "x-mid" => Some(ProfileSection::MidWidthLine),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PeakReport {
    pub section: ProfileSection,
    /// Coordinate of the fixed line, snapped to the nearest gridline.
    pub line_coordinate: f64,
    /// True when the requested mid-line is not a gridline.
    pub snapped: bool,
    pub z: Vec<f64>,
    pub uy_max: Vec<f64>,
    /// Location of the maximising node in every `z` plane.
    pub argmax: Vec<[f64; 3]>,
    /// Global maximum and its node.
    pub peak: f64,
    pub peak_at: [f64; 3],
}

impl PeakReport {
    /// Indices of strict interior local maxima of the profile.
    pub fn local_maxima(&self) -> Vec<usize> {
        let f = &self.uy_max;
        (1..f.len().saturating_sub(1))
            .filter(|&k| f[k] > f[k - 1] && f[k] > f[k + 1])
            .collect()
    }
}

fn nearest(c: &[f64], at: f64) -> usize {
    (0..c.len())
        .min_by(|&a, &b| (c[a] - at).abs().total_cmp(&(c[b] - at).abs()))
        .unwrap()
}

pub fn uy_max_profile(lat: &Lattice, u: &VectorField, section: ProfileSection) -> Result<PeakReport, PostprocessError> {
    check_len(lat, &u.0[1])?;
    let [nx, ny, nz] = lat.dims();
    let ext = lat.extents();
    let (axis, fixed) = match section {
        ProfileSection::MidHeightLine => (&lat.ys, 0.5 * ext[1]),
        ProfileSection::MidWidthLine => (&lat.xs, 0.5 * ext[0]),
    };
    let line = nearest(axis, fixed);
    let snapped = (axis[line] - fixed).abs() > 1e-12 * ext[0].max(ext[1]);
    if snapped {
        log::warn!("mid line {fixed} is not a gridline; using {}", axis[line]);
    }
    let along = match section {
        ProfileSection::MidHeightLine => nx,
        ProfileSection::MidWidthLine => ny,
    };
    let node = |s: usize, k: usize| match section {
        ProfileSection::MidHeightLine => lat.index(s, line, k),
        ProfileSection::MidWidthLine => lat.index(line, s, k),
    };
    let mut uy_max = Vec::with_capacity(nz);
    let mut argmax = Vec::with_capacity(nz);
    for k in 0..nz {
        let best = (0..along)
            .map(|s| node(s, k))
            .max_by(|&a, &b| u.0[1][a].total_cmp(&u.0[1][b]))
            .unwrap();
        uy_max.push(u.0[1][best]);
        argmax.push(lat.coord(best));
    }
    let g = (0..nz).max_by(|&a, &b| uy_max[a].total_cmp(&uy_max[b])).unwrap();
    Ok(PeakReport {
        section,
        line_coordinate: axis[line],
        snapped,
        z: lat.zs.clone(),
        peak: uy_max[g],
        peak_at: argmax[g],
        uy_max,
        argmax,
    })
}

/// Node permutation of the reflection `z -> A_z - z`.
pub fn z_mirror(lat: &Lattice) -> Result<Vec<usize>, PostprocessError> {
    if !mirrored(&lat.zs) {
        return Err(PostprocessError::AsymmetricLattice("z reflection"));
    }
    let nz = lat.zs.len();
    Ok((0..lat.len())
        .map(|n| {
            let [i, j, k] = lat.ijk(n);
            lat.index(i, j, nz - 1 - k)
        })
        .collect())
}

/// Node permutation of the half turn `(x, y) -> (A_x - x, A_y - y)`.
pub fn centro_mirror(lat: &Lattice) -> Result<Vec<usize>, PostprocessError> {
    if !mirrored(&lat.xs) || !mirrored(&lat.ys) {
        return Err(PostprocessError::AsymmetricLattice("half turn about the centre line"));
    }
    let [nx, ny, _] = lat.dims();
    Ok((0..lat.len())
        .map(|n| {
            let [i, j, k] = lat.ijk(n);
            lat.index(nx - 1 - i, ny - 1 - j, k)
        })
        .collect())
}

fn mirrored(c: &[f64]) -> bool {
    let a = *c.last().unwrap();
    c.iter()
        .zip(c.iter().rev())
        .all(|(x, y)| (x - (a - y)).abs() <= 1e-12 * a)
}

/// `||f - (offset + sign * f o S)|| / ||f||`, absolute when `||f||` is
/// negligible.
pub fn reflection_defect(f: &[f64], perm: &[usize], sign: f64, offset: f64) -> f64 {
    let mut d2 = 0.0;
    let mut n2 = 0.0;
    for (i, &j) in perm.iter().enumerate() {
        let e = f[i] - (offset + sign * f[j]);
        d2 += e * e;
        n2 += f[i] * f[i];
    }
    let (d, n) = (d2.sqrt(), n2.sqrt());
    if n > 1e-12 {
        d / n
    } else {
        d
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SymmetryDefect {
    /// `"z-mirror"` or `"centro"`.
    pub relation: &'static str,
    pub field: &'static str,
    pub defect: f64,
}

/// Defects of the approximate symmetries of the steady flow.
///
/// The z-mirror keeps `u_x, u_y, theta, p` and flips `u_z`; the half turn
/// about the vertical centre line flips `u_x, u_y`, keeps `u_z, p` and maps
/// `theta` to `1 - theta`. The pressure is compared after removing the
/// ramp `hydrostatic * (y - A_y/2)`, which the half turn would otherwise
/// reverse. With buoyancy `Ra Pr (theta - theta_ref)` the mean temperature
/// `1/2` gives `hydrostatic = Ra Pr (1/2 - theta_ref)`.
pub fn symmetry_defects(
    fine: &Lattice,
    coarse: &Lattice,
    u: &VectorField,
    theta: &[f64],
    p: &[f64],
    hydrostatic: f64,
) -> Result<Vec<SymmetryDefect>, PostprocessError> {
    check_len(fine, theta)?;
    check_len(coarse, p)?;
    let zf = z_mirror(fine)?;
    let zc = z_mirror(coarse)?;
    let cf = centro_mirror(fine)?;
    let cc = centro_mirror(coarse)?;
    let ay = coarse.extents()[1];
    let p_dyn: Vec<f64> = (0..coarse.len())
        .map(|n| p[n] - hydrostatic * (coarse.coord(n)[1] - 0.5 * ay))
        .collect();
    let d = |relation, field, f: &[f64], perm: &[usize], sign, offset| SymmetryDefect {
        relation,
        field,
        defect: reflection_defect(f, perm, sign, offset),
    };
    Ok(vec![
        d("z-mirror", "ux", &u.0[0], &zf, 1.0, 0.0),
        d("z-mirror", "uy", &u.0[1], &zf, 1.0, 0.0),
        d("z-mirror", "uz", &u.0[2], &zf, -1.0, 0.0),
        d("z-mirror", "theta", theta, &zf, 1.0, 0.0),
        d("z-mirror", "p", &p_dyn, &zc, 1.0, 0.0),
        d("centro", "ux", &u.0[0], &cf, -1.0, 0.0),
        d("centro", "uy", &u.0[1], &cf, -1.0, 0.0),
        d("centro", "uz", &u.0[2], &cf, 1.0, 0.0),
        d("centro", "theta", theta, &cf, -1.0, 1.0),
        d("centro", "p", &p_dyn, &cc, 1.0, 0.0),
    ])
}

fn check_len(lat: &Lattice, f: &[f64]) -> Result<(), PostprocessError> {
    if f.len() != lat.len() {
        return Err(PostprocessError::Length {
            got: f.len(),
            expected: lat.len(),
        });
    }
    Ok(())
}
