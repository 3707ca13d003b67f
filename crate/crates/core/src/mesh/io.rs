//! ASCII mesh and snapshot files.
//!
//! ```text
//! natconv-mesh 1
//! config_hash <hex or ->
//! counts <nodes> <coarse_nodes> <coarse_tets> <fine_tets>
//! fields none                      (or: fields ux uy uz p theta)
//! nodes
//! <id> <x> <y> <z> <tag> [<ux> <uy> <uz> <p> <theta>]
//! tets
//! <id> <level> <shape> <n0> <n1> <n2> <n3> <parent>
//! ```
//!
//! Node ids are fine-lattice ids; coarse nodes are the fine nodes with all
//! lattice indices even. Tags are `left`, `right`, `wall`, `interior`.
//! Element ids run over the coarse elements first, then the fine ones; all
//! vertex ids are node ids. `level` is `coarse` or `fine`, `shape` is the
//! roman numeral of the generic tetrahedron, `parent` the id of the
//! enclosing coarse element or `-1`. In snapshots `p` is written as `-` at
//! nodes that are not pressure nodes. Reals use Rust's `{:e}` formatting,
//! which round-trips exactly.

use std::io::{BufRead, Write};

use super::{BoundaryTag, GenericShape, Level, MeshError, TwoLevelMesh};

/// Nodal values written alongside the mesh.
#[derive(Debug, Clone, Copy)]
pub struct MeshFields<'a> {
    pub u: [&'a [f64]; 3],
    /// Coarse pressure, indexed by coarse node.
    pub p: &'a [f64],
    pub theta: &'a [f64],
}

pub fn write_mesh<W: Write>(w: &mut W, mesh: &TwoLevelMesh, config_hash: Option<&str>) -> Result<(), MeshError> {
    write_impl(w, mesh, config_hash, None)
}

pub fn write_mesh_with_fields<W: Write>(
    w: &mut W,
    mesh: &TwoLevelMesh,
    config_hash: Option<&str>,
    fields: MeshFields<'_>,
) -> Result<(), MeshError> {
    write_impl(w, mesh, config_hash, Some(fields))
}

fn write_impl<W: Write>(
    w: &mut W,
    mesh: &TwoLevelMesh,
    config_hash: Option<&str>,
    fields: Option<MeshFields<'_>>,
) -> Result<(), MeshError> {
    let n = mesh.fine.len();
    writeln!(w, "natconv-mesh 1")?;
    writeln!(w, "config_hash {}", config_hash.unwrap_or("-"))?;
    writeln!(
        w,
        "counts {} {} {} {}",
        n,
        mesh.coarse.len(),
        mesh.coarse_tets.len(),
        mesh.fine_tets.len()
    )?;
    writeln!(
        w,
        "fields {}",
        if fields.is_some() { "ux uy uz p theta" } else { "none" }
    )?;

    let mut coarse_of = vec![None; n];
    for (c, &f) in mesh.coarse_to_fine.iter().enumerate() {
        coarse_of[f] = Some(c);
    }
    writeln!(w, "nodes")?;
    for id in 0..n {
        let [x, y, z] = mesh.fine.coord(id);
        write!(w, "{id} {x:e} {y:e} {z:e} {}", mesh.fine_tags[id])?;
        if let Some(f) = &fields {
            write!(w, " {:e} {:e} {:e}", f.u[0][id], f.u[1][id], f.u[2][id])?;
            match coarse_of[id] {
                Some(c) => write!(w, " {:e}", f.p[c])?,
                None => write!(w, " -")?,
            }
            write!(w, " {:e}", f.theta[id])?;
        }
        writeln!(w)?;
    }
    writeln!(w, "tets")?;
    let nc = mesh.coarse_tets.len();
    for (t, tet) in mesh.coarse_tets.iter().enumerate() {
        let v = tet.nodes.map(|c| mesh.coarse_to_fine[c]);
        writeln!(w, "{t} coarse {} {} {} {} {} -1", tet.shape, v[0], v[1], v[2], v[3])?;
    }
    for (t, tet) in mesh.fine_tets.iter().enumerate() {
        let v = tet.nodes;
        let parent = tet.parent.map_or(-1, |p| p as i64);
        writeln!(
            w,
            "{} fine {} {} {} {} {} {}",
            nc + t,
            tet.shape,
            v[0],
            v[1],
            v[2],
            v[3],
            parent
        )?;
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq)]
pub struct NodeRecord {
    pub coord: [f64; 3],
    pub tag: BoundaryTag,
    /// `ux uy uz p theta`, `p` is `None` away from pressure nodes.
    pub values: Option<([f64; 3], Option<f64>, f64)>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TetRecord {
    pub level: Level,
    pub shape: GenericShape,
    pub nodes: [usize; 4],
    pub parent: Option<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MeshFile {
    pub config_hash: Option<String>,
    pub coarse_nodes: usize,
    pub nodes: Vec<NodeRecord>,
    pub tets: Vec<TetRecord>,
}

/// Parses a file written by [`write_mesh`] or [`write_mesh_with_fields`].
pub fn read_mesh<R: BufRead>(r: R) -> Result<MeshFile, MeshError> {
    let bad = |m: &str| MeshError::Format(m.to_string());
    let mut lines = r.lines();
    let mut next = || -> Result<String, MeshError> {
        lines
            .next()
            .ok_or_else(|| bad("unexpected end of file"))?
            .map_err(MeshError::from)
    };
    if next()?.trim() != "natconv-mesh 1" {
        return Err(bad("missing `natconv-mesh 1` header"));
    }
    let hash_line = next()?;
    let hash = hash_line
        .strip_prefix("config_hash ")
        .ok_or_else(|| bad("missing config_hash"))?
        .trim();
    let config_hash = (hash != "-").then(|| hash.to_string());
    let counts: Vec<usize> = next()?
        .strip_prefix("counts ")
        .ok_or_else(|| bad("missing counts"))?
        .split_whitespace()
        .map(|s| s.parse().map_err(|_| bad("bad count")))
        .collect::<Result<_, _>>()?;
    if counts.len() != 4 {
        return Err(bad("counts needs four values"));
    }
    let with_fields = match next()?.trim() {
        "fields none" => false,
        "fields ux uy uz p theta" => true,
        _ => return Err(bad("unknown fields line")),
    };
    if next()?.trim() != "nodes" {
        return Err(bad("missing nodes section"));
    }
    let real = |s: &str| s.parse::<f64>().map_err(|_| bad(&format!("bad real `{s}`")));
    let mut nodes = Vec::with_capacity(counts[0]);
    for id in 0..counts[0] {
        let line = next()?;
        let f: Vec<&str> = line.split_whitespace().collect();
        let want = if with_fields { 10 } else { 5 };
        if f.len() != want || f[0].parse::<usize>().ok() != Some(id) {
            return Err(bad(&format!("bad node line {id}")));
        }
        let tag = BoundaryTag::parse(f[4]).ok_or_else(|| bad("bad tag"))?;
        let values = if with_fields {
            let p = if f[8] == "-" { None } else { Some(real(f[8])?) };
            Some(([real(f[5])?, real(f[6])?, real(f[7])?], p, real(f[9])?))
        } else {
            None
        };
        nodes.push(NodeRecord {
            coord: [real(f[1])?, real(f[2])?, real(f[3])?],
            tag,
            values,
        });
    }
    if next()?.trim() != "tets" {
        return Err(bad("missing tets section"));
    }
    let mut tets = Vec::with_capacity(counts[2] + counts[3]);
    for id in 0..counts[2] + counts[3] {
        let line = next()?;
        let f: Vec<&str> = line.split_whitespace().collect();
        if f.len() != 8 || f[0].parse::<usize>().ok() != Some(id) {
            return Err(bad(&format!("bad tet line {id}")));
        }
        let level = match f[1] {
            "coarse" => Level::Coarse,
            "fine" => Level::Fine,
            _ => return Err(bad("bad level")),
        };
        let shape = GenericShape::from_roman(f[2]).ok_or_else(|| bad("bad shape"))?;
        let mut v = [0usize; 4];
        for (k, slot) in v.iter_mut().enumerate() {
            *slot = f[3 + k].parse().map_err(|_| bad("bad vertex"))?;
        }
        let parent = match f[7].parse::<i64>().map_err(|_| bad("bad parent"))? {
            -1 => None,
            p if p >= 0 => Some(p as usize),
            _ => return Err(bad("bad parent")),
        };
        tets.push(TetRecord {
            level,
            shape,
            nodes: v,
            parent,
        });
    }
    Ok(MeshFile {
        config_hash,
        coarse_nodes: counts[1],
        nodes,
        tets,
    })
}
