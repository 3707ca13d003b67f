use crate::exec;
use crate::fem::SymBandedMatrix;

/// When an iteration counts as converged.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum StopRule {
    /// `||r|| <= tol * ||b||`.
    Relative(f64),
    /// `||r|| <= tol`.
    Absolute(f64),
}

impl StopRule {
    fn threshold(self, b_norm: f64) -> f64 {
        match self {
            StopRule::Relative(t) => t * b_norm,
            StopRule::Absolute(t) => t,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CgReport {
    pub iterations: usize,
    /// Final residual norm, in the units of the stopping rule.
    pub residual: f64,
    pub converged: bool,
}

/// Preconditioned conjugate gradients for `A x = b`, starting from `x`.
///
/// `apply(v, out)` computes `A v`; `precond(r, out)` computes `P r` for a
/// symmetric positive definite `P`.
pub fn conjugate_gradient<A, P>(
    mut apply: A,
    mut precond: P,
    b: &[f64],
    x: &mut [f64],
    stop: StopRule,
    max_iter: usize,
) -> CgReport
where
    A: FnMut(&[f64], &mut [f64]),
    P: FnMut(&[f64], &mut [f64]),
{
    let n = b.len();
    let b_norm = exec::norm2(b);
    let scale = match stop {
        StopRule::Relative(_) if b_norm > 0.0 => b_norm,
        _ => 1.0,
    };
    let mut r = vec![0.0; n];
    apply(x, &mut r);
    exec::for_each_mut(&mut r, |i, ri| *ri = b[i] - *ri);
    let threshold = stop.threshold(b_norm);
    let mut r_norm = exec::norm2(&r);
    if r_norm <= threshold {
        return CgReport {
            iterations: 0,
            residual: r_norm / scale,
            converged: true,
        };
    }
    let mut z = vec![0.0; n];
    precond(&r, &mut z);
    let mut d = z.clone();
    let mut q = vec![0.0; n];
    let mut rz = exec::dot(&r, &z);
    for it in 1..=max_iter {
        apply(&d, &mut q);
        let dq = exec::dot(&d, &q);
        if !(dq > 0.0) || !(rz > 0.0) {
            return CgReport {
                iterations: it,
                residual: r_norm / scale,
                converged: false,
            };
        }
        let alpha = rz / dq;
        exec::axpy(alpha, &d, x);
        exec::axpy(-alpha, &q, &mut r);
        r_norm = exec::norm2(&r);
        if r_norm <= threshold {
            return CgReport {
                iterations: it,
                residual: r_norm / scale,
                converged: true,
            };
        }
        precond(&r, &mut z);
        let rz_new = exec::dot(&r, &z);
        let beta = rz_new / rz;
        rz = rz_new;
        exec::for_each_mut(&mut d, |i, di| *di = z[i] + beta * *di);
    }
    CgReport {
        iterations: max_iter,
        residual: r_norm / scale,
        converged: false,
    }
}

/// `D A D` with `D = diag(a_ii)^{-1/2}`, returned with `D`.
pub fn symmetric_scale(a: &SymBandedMatrix) -> (SymBandedMatrix, Vec<f64>) {
    let d: Vec<f64> = a.diagonal().iter().map(|v| 1.0 / v.sqrt()).collect();
    let mut s = a.clone();
    let n = a.dim();
    for (k, &o) in a.offsets().to_vec().iter().enumerate() {
        let band = s.band_mut(k);
        for i in 0..n.saturating_sub(o) {
            band[i] *= d[i] * d[i + o];
        }
    }
    (s, d)
}

/// Hestenes-Stiefel conjugate gradients on the symmetrically scaled system.
///
/// `x` holds the initial guess on entry and the solution on exit. The
/// relative rule is measured on the scaled system.
pub fn cghs_solve(a: &SymBandedMatrix, b: &[f64], x: &mut [f64], tol: f64, max_iter: usize) -> CgReport {
    let (s, d) = symmetric_scale(a);
    cghs_scaled(&s, &d, b, x, tol, max_iter)
}

/// As [`cghs_solve`] with the scaling precomputed by [`symmetric_scale`].
pub fn cghs_scaled(s: &SymBandedMatrix, d: &[f64], b: &[f64], x: &mut [f64], tol: f64, max_iter: usize) -> CgReport {
    let bs: Vec<f64> = b.iter().zip(d).map(|(b, d)| b * d).collect();
    let mut y: Vec<f64> = x.iter().zip(d).map(|(x, d)| x / d).collect();
    let report = conjugate_gradient(
        |v, out| s.matvec(v, out),
        |r, z| z.copy_from_slice(r),
        &bs,
        &mut y,
        StopRule::Relative(tol),
        max_iter,
    );
    x.iter_mut().zip(y.iter().zip(d)).for_each(|(x, (y, d))| *x = y * d);
    report
}
