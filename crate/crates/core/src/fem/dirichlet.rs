//! Symmetric elimination of Dirichlet nodes.
//!
//! A constrained node `j` with value `g_j` gets a unit row and column; its
//! old column times `g_j` moves to the right-hand side of the free rows.
//! The modified matrix stays symmetric and keeps its band.

use super::SymBandedMatrix;

/// Right-hand side part only, given the unmodified matrix `a`: free rows
/// lose `sum_{j constrained} a_ij g_j`, constrained rows become `g_j`.
pub fn apply_dirichlet_rhs(a: &SymBandedMatrix, rhs: &mut [f64], values: &[f64], mask: &[bool]) {
    let lifted: Vec<f64> = values
        .iter()
        .zip(mask)
        .map(|(&g, &m)| if m { g } else { 0.0 })
        .collect();
    let coupling = a.mul(&lifted);
    for i in 0..rhs.len() {
        rhs[i] = if mask[i] { values[i] } else { rhs[i] - coupling[i] };
    }
}

/// Modifies `a` and `rhs` in place.
pub fn apply_dirichlet_symmetric(a: &mut SymBandedMatrix, rhs: &mut [f64], values: &[f64], mask: &[bool]) {
    apply_dirichlet_rhs(a, rhs, values, mask);
    let n = a.dim();
    let offsets = a.offsets().to_vec();
    for (d, &o) in offsets.iter().enumerate().skip(1) {
        let band = a.band_mut(d);
        for r in 0..n.saturating_sub(o) {
            if mask[r] || mask[r + o] {
                band[r] = 0.0;
            }
        }
    }
    let diag = a.band_mut(0);
    for (v, &m) in diag.iter_mut().zip(mask) {
        if m {
            *v = 1.0;
        }
    }
}
