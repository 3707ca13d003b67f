//! Dense reference implementations built independently of the solver's
//! element kernels.

#![allow(dead_code)]

use nalgebra::{DMatrix, DVector, Matrix4, Vector4};
use natconv::fem::{Discretization, VectorField};
use natconv::mesh::{AxisPartition, TwoLevelMesh};

/// A 2x2x2-brick mesh with unequal spacings along every axis.
pub fn small_mesh() -> TwoLevelMesh {
    let px = AxisPartition::new(vec![0.0, 0.3, 1.0], vec![1, 1]).unwrap();
    let py = AxisPartition::uniform(1.5, 2).unwrap();
    let pz = AxisPartition::new(vec![0.0, 0.6, 1.0], vec![1, 1]).unwrap();
    TwoLevelMesh::build(&[px, py, pz]).unwrap()
}

pub fn small_disc() -> Discretization {
    Discretization::new(small_mesh()).unwrap()
}

/// Columns are `(1, x, y, z)` of each vertex; the inverse maps a point to
/// its barycentric coordinates.
fn barycentric_map(v: &[[f64; 3]; 4]) -> Matrix4<f64> {
    let m = Matrix4::from_fn(|r, c| if r == 0 { 1.0 } else { v[c][r - 1] });
    m.try_inverse().expect("non-degenerate element")
}

pub fn volume(v: &[[f64; 3]; 4]) -> f64 {
    let m = Matrix4::from_fn(|r, c| if r == 0 { 1.0 } else { v[c][r - 1] });
    m.determinant().abs() / 6.0
}

/// Gradients of the four barycentric functions.
pub fn gradients(v: &[[f64; 3]; 4]) -> [[f64; 3]; 4] {
    let inv = barycentric_map(v);
    std::array::from_fn(|a| [inv[(a, 1)], inv[(a, 2)], inv[(a, 3)]])
}

pub fn barycentric(v: &[[f64; 3]; 4], x: [f64; 3]) -> [f64; 4] {
    let l = barycentric_map(v) * Vector4::new(1.0, x[0], x[1], x[2]);
    [l[0], l[1], l[2], l[3]]
}

fn dot(a: [f64; 3], b: [f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

/// Vertex-quadrature mass of every fine node.
pub fn mass(mesh: &TwoLevelMesh) -> DVector<f64> {
    let mut m = DVector::zeros(mesh.fine.len());
    for t in 0..mesh.fine_tets.len() {
        let v = mesh.fine_vertices(t);
        for &n in &mesh.fine_tets[t].nodes {
            m[n] += volume(&v) / 4.0;
        }
    }
    m
}

/// `K_ij = \int grad w_i . grad w_j`.
pub fn stiffness(mesh: &TwoLevelMesh) -> DMatrix<f64> {
    let n = mesh.fine.len();
    let mut k = DMatrix::zeros(n, n);
    for t in 0..mesh.fine_tets.len() {
        let v = mesh.fine_vertices(t);
        let (vol, g) = (volume(&v), gradients(&v));
        let nodes = mesh.fine_tets[t].nodes;
        for a in 0..4 {
            for b in 0..4 {
                k[(nodes[a], nodes[b])] += vol * dot(g[a], g[b]);
            }
        }
    }
    k
}

/// `G_c[(m, k)] = \int q_k \partial_c w_m`, evaluating the coarse basis at
/// the fine centroid through its coarse parent.
pub fn gradient_matrices(mesh: &TwoLevelMesh) -> [DMatrix<f64>; 3] {
    let (nf, nc) = (mesh.fine.len(), mesh.coarse.len());
    let mut g: [DMatrix<f64>; 3] = std::array::from_fn(|_| DMatrix::zeros(nf, nc));
    for t in 0..mesh.fine_tets.len() {
        let v = mesh.fine_vertices(t);
        let (vol, grads) = (volume(&v), gradients(&v));
        let centroid: [f64; 3] = std::array::from_fn(|c| v.iter().map(|p| p[c]).sum::<f64>() / 4.0);
        let parent = mesh.fine_tets[t].parent.unwrap();
        let q = barycentric(&mesh.coarse_vertices(parent), centroid);
        for (a, &m) in mesh.fine_tets[t].nodes.iter().enumerate() {
            for (b, &k) in mesh.coarse_tets[parent].nodes.iter().enumerate() {
                for c in 0..3 {
                    g[c][(m, k)] += vol * q[b] * grads[a][c];
                }
            }
        }
    }
    g
}

/// `C_mj = \sum_T V/4 u(x_m) . grad w_j`.
pub fn advection_matrix(mesh: &TwoLevelMesh, u: &VectorField) -> DMatrix<f64> {
    let n = mesh.fine.len();
    let mut c = DMatrix::zeros(n, n);
    for t in 0..mesh.fine_tets.len() {
        let v = mesh.fine_vertices(t);
        let (vol, g) = (volume(&v), gradients(&v));
        let nodes = mesh.fine_tets[t].nodes;
        for a in 0..4 {
            for b in 0..4 {
                c[(nodes[a], nodes[b])] += vol / 4.0 * dot(u.at(nodes[a]), g[b]);
            }
        }
    }
    c
}

/// `W_mj = \sum_T grad w_m . (V/4 \sum_q u_q u_q^T) grad w_j`.
pub fn wave_matrix(mesh: &TwoLevelMesh, u: &VectorField) -> DMatrix<f64> {
    let n = mesh.fine.len();
    let mut w = DMatrix::zeros(n, n);
    for t in 0..mesh.fine_tets.len() {
        let v = mesh.fine_vertices(t);
        let (vol, g) = (volume(&v), gradients(&v));
        let nodes = mesh.fine_tets[t].nodes;
        let mut k = nalgebra::Matrix3::zeros();
        for &q in &nodes {
            let uq = nalgebra::Vector3::from(u.at(q));
            k += uq * uq.transpose() * (vol / 4.0);
        }
        for a in 0..4 {
            for b in 0..4 {
                let ga = nalgebra::Vector3::from(g[a]);
                let gb = nalgebra::Vector3::from(g[b]);
                w[(nodes[a], nodes[b])] += ga.dot(&(k * gb));
            }
        }
    }
    w
}

/// Solves `a x = b` with rows and columns of `mask` replaced by `x = g`.
pub fn dense_dirichlet_solve(a: &DMatrix<f64>, b: &DVector<f64>, mask: &[bool], g: &[f64]) -> DVector<f64> {
    let free: Vec<usize> = (0..mask.len()).filter(|&i| !mask[i]).collect();
    let mut x = DVector::from_fn(mask.len(), |i, _| if mask[i] { g[i] } else { 0.0 });
    let lift = a * &x;
    let af = DMatrix::from_fn(free.len(), free.len(), |r, c| a[(free[r], free[c])]);
    let bf = DVector::from_fn(free.len(), |r, _| b[free[r]] - lift[free[r]]);
    let sol = af.cholesky().expect("SPD").solve(&bf);
    for (r, &i) in free.iter().enumerate() {
        x[i] = sol[r];
    }
    x
}

pub fn field(n: usize, seed: f64) -> Vec<f64> {
    (0..n).map(|i| ((i as f64 + 1.0) * seed).sin()).collect()
}

pub fn to_vec(v: &DVector<f64>) -> Vec<f64> {
    v.iter().copied().collect()
}

pub fn max_diff(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len());
    a.iter().zip(b).fold(0.0, |m, (x, y)| m.max((x - y).abs()))
}

pub fn max_abs(a: &[f64]) -> f64 {
    a.iter().fold(0.0, |m, x| m.max(x.abs()))
}

pub fn random_velocity(disc: &Discretization, interior_only: bool) -> VectorField {
    let mut u = VectorField::zeros(disc.fine_nodes());
    for (c, comp) in u.0.iter_mut().enumerate() {
        *comp = field(disc.fine_nodes(), 0.37 + 0.21 * c as f64);
        if interior_only {
            comp.iter_mut()
                .zip(&disc.interior)
                .for_each(|(v, &i)| *v *= f64::from(u8::from(i)));
        }
    }
    u
}

/// Relative max-norm difference between CGHS and a dense Cholesky solve of
/// a Dirichlet-constrained diffusion system.
pub fn cghs_error() -> f64 {
    use natconv::fem::{apply_dirichlet_symmetric, assemble_stiffness};
    let disc = small_disc();
    let n = disc.fine_nodes();
    let dt = 0.01;
    let mut a = assemble_stiffness(&disc, 0.71).unwrap();
    a.add_diagonal(1.0 / dt, &disc.fine_mass);
    let dense = stiffness(&disc.mesh) * 0.71 + DMatrix::from_diagonal(&(mass(&disc.mesh) / dt));
    let mask: Vec<bool> = disc.interior.iter().map(|&i| !i).collect();
    let g = field(n, 0.9);
    let b = field(n, 1.3);
    let expected = to_vec(&dense_dirichlet_solve(&dense, &DVector::from_vec(b.clone()), &mask, &g));

    let mut rhs = b;
    apply_dirichlet_symmetric(&mut a, &mut rhs, &g, &mask);
    let mut x = vec![0.0; n];
    let rep = natconv::solvers::cghs_solve(&a, &rhs, &mut x, 1e-14, 10_000);
    assert!(rep.converged);
    max_diff(&x, &expected) / max_abs(&expected)
}

/// Largest absolute difference of the sparse and element-loop mixed
/// operators from dense quadrature, over both products.
pub fn mixed_integral_error() -> f64 {
    use natconv::fem::{divergence_residual, pressure_gradient_rhs, MixedOperator};
    let disc = small_disc();
    let g = gradient_matrices(&disc.mesh);
    let p = field(disc.coarse_nodes(), 0.77);
    let pv = DVector::from_vec(p.clone());
    let op = MixedOperator::new(&disc);
    let mut sparse = VectorField::zeros(disc.fine_nodes());
    op.gradient(&p, &mut sparse);
    let element = pressure_gradient_rhs(&disc, &p);
    let mut err: f64 = 0.0;
    for c in 0..3 {
        let expected = to_vec(&(&g[c] * &pv));
        err = err
            .max(max_diff(&sparse.0[c], &expected))
            .max(max_diff(&element.0[c], &expected));
    }
    let u = random_velocity(&disc, false);
    let mut expected = DVector::zeros(disc.coarse_nodes());
    for c in 0..3 {
        expected += g[c].transpose() * DVector::from_vec(u.0[c].clone());
    }
    let expected = to_vec(&expected);
    let mut div = vec![0.0; disc.coarse_nodes()];
    op.divergence(&u, &mut div);
    err.max(max_diff(&div, &expected))
        .max(max_diff(&divergence_residual(&disc, &u), &expected))
}

#[derive(Debug, Clone, Copy)]
pub struct PressureError {
    /// Relative max-norm difference of the projected velocity.
    pub velocity: f64,
    /// Relative residual of the dense Schur system at the computed pressure.
    pub schur_residual: f64,
    /// Dimension of the dense Schur complement's kernel.
    pub kernel: usize,
}

/// Uzawa PCG against the dense Schur complement of the saddle-point system.
/// The projected velocity is unique even where the Schur complement has more
/// than the constants in its kernel, so the velocity is compared directly and
/// the pressure through the dense residual.
pub fn pressure_error() -> PressureError {
    let disc = small_disc();
    let (nf, nc) = (disc.fine_nodes(), disc.coarse_nodes());
    let dt = 0.01;
    let g = gradient_matrices(&disc.mesh);
    let m = mass(&disc.mesh);
    let inv_m = DMatrix::from_fn(nf, nf, |i, j| if i == j && disc.interior[i] { 1.0 / m[i] } else { 0.0 });
    let mut schur = DMatrix::zeros(nc, nc);
    for gc in &g {
        schur += gc.transpose() * &inv_m * gc * dt;
    }
    let u_star = random_velocity(&disc, true);
    let mut rhs = DVector::zeros(nc);
    for c in 0..3 {
        rhs -= g[c].transpose() * DVector::from_vec(u_star.0[c].clone());
    }
    let svd = schur.clone().svd(true, true);
    let cut = 1e-12 * svd.singular_values.max();
    let kernel = svd.singular_values.iter().filter(|&&s| s <= cut).count();
    let p_ref = svd.pseudo_inverse(cut).unwrap() * &rhs;

    let solver = natconv::solvers::PressureSolver::new(&disc, 1e-8).unwrap();
    let mut p = vec![0.0; nc];
    let (u, rep) = solver.solve(dt, &u_star, &mut p, 1e-13, 1000);
    assert!(rep.cg.converged, "{rep:?}");
    let sp = to_vec(&(&schur * DVector::from_vec(p)));
    let rhs = to_vec(&rhs);
    let mut velocity: f64 = 0.0;
    for c in 0..3 {
        let u_ref = DVector::from_vec(u_star.0[c].clone()) + &inv_m * (&g[c] * &p_ref) * dt;
        velocity = velocity.max(max_diff(&u.0[c], &to_vec(&u_ref)) / max_abs(&u_star.0[c]));
    }
    PressureError {
        velocity,
        schur_residual: max_diff(&sp, &rhs) / max_abs(&rhs),
        kernel,
    }
}
