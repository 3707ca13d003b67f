use std::collections::HashMap;

use super::{signed_volume, Lattice, Level, Tetra, TwoLevelMesh};

#[derive(Debug, Clone, PartialEq)]
pub enum MeshFailure {
    NoElements,
    NonPositiveVolume {
        level: Level,
        tet: usize,
        volume: f64,
    },
    /// A face shared by more than two elements.
    OverSharedFace {
        level: Level,
        face: [usize; 3],
        count: usize,
    },
    /// A face used once that is not on the box boundary.
    OpenInteriorFace {
        level: Level,
        face: [usize; 3],
    },
    OrphanNode {
        level: Level,
        node: usize,
    },
    VolumeMismatch {
        level: Level,
        total: f64,
        expected: f64,
    },
    ChildCount {
        parent: usize,
        count: usize,
    },
    ChildVolume {
        parent: usize,
        parent_volume: f64,
        children_volume: f64,
    },
    ChildOutsideParent {
        parent: usize,
        child: usize,
    },
    /// A fine element listed under zero or several parents.
    ChildClaims {
        child: usize,
        claims: usize,
    },
}

#[derive(Debug, Clone)]
pub struct MeshReport {
    pub total_volume: f64,
    pub expected_volume: f64,
    pub min_volume: f64,
    pub max_volume: f64,
    pub failures: Vec<MeshFailure>,
}

impl MeshReport {
    pub fn is_valid(&self) -> bool {
        self.failures.is_empty()
    }

    pub fn conformity_violations(&self) -> usize {
        self.failures
            .iter()
            .filter(|f| {
                matches!(
                    f,
                    MeshFailure::OverSharedFace { .. } | MeshFailure::OpenInteriorFace { .. }
                )
            })
            .count()
    }

    pub fn orphan_nodes(&self) -> usize {
        self.failures
            .iter()
            .filter(|f| matches!(f, MeshFailure::OrphanNode { .. }))
            .count()
    }
}

const VOLUME_RTOL: f64 = 1e-12;

/// Checks volumes, face conformity, node usage and the parent/child
/// structure. Problems are collected, never raised.
pub fn validate_mesh(mesh: &TwoLevelMesh) -> MeshReport {
    let mut failures = Vec::new();
    let expected = if mesh.fine.is_empty() { 0.0 } else { mesh.box_volume() };
    if mesh.fine_tets.is_empty() || mesh.coarse_tets.is_empty() {
        failures.push(MeshFailure::NoElements);
        return MeshReport {
            total_volume: 0.0,
            expected_volume: expected,
            min_volume: 0.0,
            max_volume: 0.0,
            failures,
        };
    }

    let fine_vol = check_level(&mesh.fine, &mesh.fine_tets, Level::Fine, &mut failures);
    let coarse_vol = check_level(&mesh.coarse, &mesh.coarse_tets, Level::Coarse, &mut failures);
    let total: f64 = fine_vol.iter().sum();
    let coarse_total: f64 = coarse_vol.iter().sum();
    for (level, t) in [(Level::Fine, total), (Level::Coarse, coarse_total)] {
        if (t - expected).abs() > VOLUME_RTOL * expected {
            failures.push(MeshFailure::VolumeMismatch {
                level,
                total: t,
                expected,
            });
        }
    }

    for parent in mesh.children.len()..mesh.coarse_tets.len() {
        failures.push(MeshFailure::ChildCount { parent, count: 0 });
    }
    let mut claimed = vec![0usize; mesh.fine_tets.len()];
    for (parent, kids) in mesh.children.iter().enumerate().take(mesh.coarse_tets.len()) {
        let mut sum = 0.0;
        let pv = mesh.coarse_vertices(parent);
        for &c in kids {
            claimed[c] += 1;
            sum += fine_vol[c];
            let inside = mesh.fine_tets[c]
                .nodes
                .iter()
                .all(|&n| barycentric(&pv, mesh.fine.coord(n)).iter().all(|&b| b >= -1e-12));
            if !inside || mesh.fine_tets[c].parent != Some(parent) {
                failures.push(MeshFailure::ChildOutsideParent { parent, child: c });
            }
        }
        if (sum - coarse_vol[parent]).abs() > VOLUME_RTOL * coarse_vol[parent].abs() {
            failures.push(MeshFailure::ChildVolume {
                parent,
                parent_volume: coarse_vol[parent],
                children_volume: sum,
            });
        }
    }
    for (child, &claims) in claimed.iter().enumerate() {
        if claims != 1 {
            failures.push(MeshFailure::ChildClaims { child, claims });
        }
    }

    let (min_volume, max_volume) = fine_vol
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| {
            (lo.min(v), hi.max(v))
        });
    MeshReport {
        total_volume: total,
        expected_volume: expected,
        min_volume,
        max_volume,
        failures,
    }
}

fn check_level(lat: &Lattice, tets: &[Tetra], level: Level, failures: &mut Vec<MeshFailure>) -> Vec<f64> {
    let ext = lat.extents();
    let mut used = vec![false; lat.len()];
    let mut faces: HashMap<[usize; 3], usize> = HashMap::with_capacity(2 * tets.len());
    let vols: Vec<f64> = tets
        .iter()
        .enumerate()
        .map(|(t, tet)| {
            for &n in &tet.nodes {
                used[n] = true;
            }
            for skip in 0..4 {
                let mut f = [0usize; 3];
                let mut k = 0;
                for (i, &n) in tet.nodes.iter().enumerate() {
                    if i != skip {
                        f[k] = n;
                        k += 1;
                    }
                }
                f.sort_unstable();
                *faces.entry(f).or_insert(0) += 1;
            }
            let v = signed_volume(&tet.nodes.map(|n| lat.coord(n)));
            if !(v > 0.0) {
                failures.push(MeshFailure::NonPositiveVolume {
                    level,
                    tet: t,
                    volume: v,
                });
            }
            v
        })
        .collect();

    let mut bad: Vec<_> = faces.into_iter().filter(|&(_, c)| c != 2).collect();
    bad.sort_unstable();
    for (face, count) in bad {
        if count > 2 {
            failures.push(MeshFailure::OverSharedFace { level, face, count });
        } else if !on_common_wall(lat, &face, ext) {
            failures.push(MeshFailure::OpenInteriorFace { level, face });
        }
    }
    for (node, u) in used.iter().enumerate() {
        if !u {
            failures.push(MeshFailure::OrphanNode { level, node });
        }
    }
    vols
}

fn on_common_wall(lat: &Lattice, face: &[usize; 3], ext: [f64; 3]) -> bool {
    let pts = face.map(|n| lat.coord(n));
    (0..3).any(|a| {
        [0.0, ext[a]]
            .iter()
            .any(|&w| pts.iter().all(|p| (p[a] - w).abs() <= 1e-12 * ext[a]))
    })
}

/// Barycentric coordinates of `p` in the tetrahedron `v`.
pub(crate) fn barycentric(v: &[[f64; 3]; 4], p: [f64; 3]) -> [f64; 4] {
    let total = signed_volume(v);
    let mut out = [0.0; 4];
    for i in 0..4 {
        let mut w = *v;
        w[i] = p;
        out[i] = signed_volume(&w) / total;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::AxisPartition;

    #[test]
    fn uniform_mesh_is_valid() {
        let m = TwoLevelMesh::unit_cube(10).unwrap();
        let r = validate_mesh(&m);
        assert!(r.is_valid(), "{:?}", &r.failures[..r.failures.len().min(5)]);
        assert!((r.total_volume - 1.0).abs() < 1e-12);
        assert!((r.min_volume - r.max_volume).abs() < 1e-18);
    }

    #[test]
    fn graded_mesh_is_valid() {
        let p = AxisPartition::boundary_layer_graded();
        let m = TwoLevelMesh::build(&[p.clone(), AxisPartition::uniform(0.5, 3).unwrap(), p]).unwrap();
        let r = validate_mesh(&m);
        assert!(r.is_valid());
        assert!((r.total_volume - 0.5).abs() < 0.5e-12);
    }

    #[test]
    fn rewired_vertex_breaks_conformity() {
        let mut m = TwoLevelMesh::unit_cube(2).unwrap();
        // move one vertex of an interior element to a neighbouring node
        let t = m
            .fine_tets
            .iter()
            .position(|t| t.nodes.iter().all(|&n| !m.fine_tags[n].is_boundary()))
            .unwrap();
        let old = m.fine_tets[t].nodes[0];
        m.fine_tets[t].nodes[0] = old + 1;
        let r = validate_mesh(&m);
        assert!(r.conformity_violations() >= 1);
    }

    #[test]
    fn empty_mesh_reports_no_elements() {
        let mut m = TwoLevelMesh::unit_cube(1).unwrap();
        m.fine_tets.clear();
        m.coarse_tets.clear();
        let r = validate_mesh(&m);
        assert_eq!(r.failures, vec![MeshFailure::NoElements]);
    }
}
