//! 1D grids and 2D unstructured meshes for the cell-centered FVM.
//!
//! Meshes are built from node coordinates plus element connectivity; the
//! builder derives cells (centroid, measure), faces (measure, unit normal
//! oriented from owner to neighbor, outward on the boundary), and checks
//! the polyhedral closure of every cell. 1D faces are points with unit
//! measure.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::physics::UnitNormal;

#[derive(Debug, Error)]
pub enum MeshError {
    #[error("invalid mesh: {0}")]
    Invalid(String),
    #[error("{path}:{line}: {message}")]
    Malformed { path: String, line: usize, message: String },
    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BoundaryTag {
    Left,
    Right,
    Bottom,
    Top,
    Outer,
}

impl BoundaryTag {
    pub fn name(&self) -> &'static str {
        match self {
            BoundaryTag::Left => "left",
            BoundaryTag::Right => "right",
            BoundaryTag::Bottom => "bottom",
            BoundaryTag::Top => "top",
            BoundaryTag::Outer => "outer",
        }
    }

    fn parse(s: &str) -> Option<Self> {
        match s {
            "left" => Some(BoundaryTag::Left),
            "right" => Some(BoundaryTag::Right),
            "bottom" => Some(BoundaryTag::Bottom),
            "top" => Some(BoundaryTag::Top),
            "outer" => Some(BoundaryTag::Outer),
            _ => None,
        }
    }
}

#[derive(Clone, Copy, Debug)]
pub struct Cell {
    pub centroid: [f64; 2],
    /// Length in 1D, area in 2D.
    pub measure: f64,
}

#[derive(Clone, Debug)]
pub struct Face {
    /// 1.0 in 1D, edge length in 2D.
    pub measure: f64,
    /// Oriented from owner to neighbor; outward at the boundary.
    pub normal: UnitNormal,
    pub centroid: [f64; 2],
    pub owner: usize,
    pub neighbor: Option<usize>,
    pub boundary: Option<BoundaryTag>,
    /// Node indices (one in 1D, two in 2D); used by the writer and by
    /// periodic pairing.
    pub nodes: Vec<usize>,
}

impl Face {
    pub fn is_boundary(&self) -> bool {
        self.neighbor.is_none()
    }
}

#[derive(Clone, Debug)]
pub struct Mesh {
    pub dim: usize,
    pub nodes: Vec<[f64; 2]>,
    pub elements: Vec<Vec<usize>>,
    pub cells: Vec<Cell>,
    pub faces: Vec<Face>,
}

impl Mesh {
    pub fn n_cells(&self) -> usize {
        self.cells.len()
    }

    pub fn total_measure(&self) -> f64 {
        self.cells.iter().map(|c| c.measure).sum()
    }

    /// Characteristic cell size |K| / max_j |dK_j| used by the CFL bound.
    pub fn cell_size(&self, cell: usize) -> f64 {
        let mut max_face = 0.0f64;
        for f in &self.faces {
            if f.owner == cell || f.neighbor == Some(cell) {
                max_face = max_face.max(f.measure);
            }
        }
        self.cells[cell].measure / max_face
    }

    /// Max over cells of |sum_j |dK_j| N_j| (vanishes for closed cells).
    pub fn max_closure_defect(&self) -> f64 {
        let mut sums = vec![[0.0f64; 2]; self.cells.len()];
        for f in &self.faces {
            sums[f.owner][0] += f.measure * f.normal.x();
            sums[f.owner][1] += f.measure * f.normal.y();
            if let Some(nb) = f.neighbor {
                sums[nb][0] -= f.measure * f.normal.x();
                sums[nb][1] -= f.measure * f.normal.y();
            }
        }
        sums.iter()
            .map(|s| (s[0] * s[0] + s[1] * s[1]).sqrt())
            .fold(0.0, f64::max)
    }
}

fn polygon_area_centroid(nodes: &[[f64; 2]], verts: &[usize]) -> (f64, [f64; 2]) {
    let n = verts.len();
    let mut twice_area = 0.0;
    let mut cx = 0.0;
    let mut cy = 0.0;
    for i in 0..n {
        let p = nodes[verts[i]];
        let q = nodes[verts[(i + 1) % n]];
        let cross = p[0] * q[1] - q[0] * p[1];
        twice_area += cross;
        cx += (p[0] + q[0]) * cross;
        cy += (p[1] + q[1]) * cross;
    }
    let area = 0.5 * twice_area;
    (area, [cx / (6.0 * area), cy / (6.0 * area)])
}

/// Build a mesh from connectivity. 2D elements are polygons (re-oriented
/// counter-clockwise if needed); every boundary face must appear in
/// `boundary_faces` as (node list, tag).
pub fn from_connectivity(
    dim: usize,
    nodes: Vec<[f64; 2]>,
    mut elements: Vec<Vec<usize>>,
    boundary_faces: &[(Vec<usize>, BoundaryTag)],
) -> Result<Mesh, MeshError> {
    if dim != 1 && dim != 2 {
        return Err(MeshError::Invalid(format!("dimension {dim}")));
    }
    if elements.is_empty() {
        return Err(MeshError::Invalid("no elements".into()));
    }

    let mut cells = Vec::with_capacity(elements.len());
    match dim {
        1 => {
            for (i, e) in elements.iter().enumerate() {
                if e.len() != 2 {
                    return Err(MeshError::Invalid(format!("1D element {i} needs 2 nodes")));
                }
                let (a, b) = (nodes[e[0]][0], nodes[e[1]][0]);
                let measure = (b - a).abs();
                if measure <= 0.0 {
                    return Err(MeshError::Invalid(format!("element {i} has zero length")));
                }
                cells.push(Cell { centroid: [0.5 * (a + b), 0.0], measure });
            }
        }
        _ => {
            for (i, e) in elements.iter_mut().enumerate() {
                if e.len() < 3 {
                    return Err(MeshError::Invalid(format!("2D element {i} needs >= 3 nodes")));
                }
                let (area, centroid) = polygon_area_centroid(&nodes, e);
                if area == 0.0 {
                    return Err(MeshError::Invalid(format!("element {i} is degenerate")));
                }
                if area < 0.0 {
                    e.reverse();
                }
                cells.push(Cell { centroid, measure: area.abs() });
            }
        }
    }

    // tag lookup keyed by sorted node ids
    let mut tag_of: HashMap<Vec<usize>, BoundaryTag> = HashMap::new();
    for (verts, tag) in boundary_faces {
        let mut key = verts.clone();
        key.sort_unstable();
        tag_of.insert(key, *tag);
    }

    let mut faces: Vec<Face> = Vec::new();
    let mut face_of: HashMap<Vec<usize>, usize> = HashMap::new();
    for (ci, e) in elements.iter().enumerate() {
        let sides: Vec<Vec<usize>> = match dim {
            1 => vec![vec![e[0]], vec![e[1]]],
            _ => (0..e.len()).map(|k| vec![e[k], e[(k + 1) % e.len()]]).collect(),
        };
        for side in sides {
            let mut key = side.clone();
            key.sort_unstable();
            match face_of.get(&key) {
                Some(&fi) => {
                    if faces[fi].neighbor.is_some() {
                        return Err(MeshError::Invalid(format!(
                            "face {key:?} is shared by more than two cells"
                        )));
                    }
                    faces[fi].neighbor = Some(ci);
                }
                None => {
                    let (measure, normal, centroid) = match dim {
                        1 => {
                            let x = nodes[side[0]][0];
                            // outward: +x at the element's right node
                            let sign = if x >= cells[ci].centroid[0] { 1.0 } else { -1.0 };
                            (1.0, UnitNormal::from_direction(sign, 0.0), [x, 0.0])
                        }
                        _ => {
                            let p = nodes[side[0]];
                            let q = nodes[side[1]];
                            let d = [q[0] - p[0], q[1] - p[1]];
                            let len = (d[0] * d[0] + d[1] * d[1]).sqrt();
                            if len <= 0.0 {
                                return Err(MeshError::Invalid(format!(
                                    "zero-length edge {side:?}"
                                )));
                            }
                            // CCW traversal puts the outward normal at
                            // (dy, -dx)
                            (
                                len,
                                UnitNormal::from_direction(d[1], -d[0]),
                                [0.5 * (p[0] + q[0]), 0.5 * (p[1] + q[1])],
                            )
                        }
                    };
                    face_of.insert(key, faces.len());
                    faces.push(Face {
                        measure,
                        normal,
                        centroid,
                        owner: ci,
                        neighbor: None,
                        boundary: None,
                        nodes: side,
                    });
                }
            }
        }
    }

    for f in &mut faces {
        if f.neighbor.is_none() {
            let mut key = f.nodes.clone();
            key.sort_unstable();
            match tag_of.get(&key) {
                Some(tag) => f.boundary = Some(*tag),
                None => {
                    return Err(MeshError::Invalid(format!(
                        "boundary face {key:?} has no tag"
                    )))
                }
            }
        }
    }

    let mesh = Mesh { dim, nodes, elements, cells, faces };
    let defect = mesh.max_closure_defect();
    let scale = mesh.faces.iter().map(|f| f.measure).fold(0.0, f64::max);
    if defect > 1e-10 * scale.max(1.0) {
        return Err(MeshError::Invalid(format!("cells are not closed (defect {defect:e})")));
    }
    Ok(mesh)
}

/// Uniform 1D grid on (x_lo, x_hi) with boundary tags left/right.
pub fn make_uniform_grid_1d(x_lo: f64, x_hi: f64, n_cells: usize) -> Mesh {
    assert!(n_cells >= 2, "need at least two cells");
    assert!(x_hi > x_lo);
    let dx = (x_hi - x_lo) / n_cells as f64;
    let nodes: Vec<[f64; 2]> = (0..=n_cells).map(|i| [x_lo + i as f64 * dx, 0.0]).collect();
    let elements: Vec<Vec<usize>> = (0..n_cells).map(|i| vec![i, i + 1]).collect();
    let boundary = vec![
        (vec![0], BoundaryTag::Left),
        (vec![n_cells], BoundaryTag::Right),
    ];
    from_connectivity(1, nodes, elements, &boundary).expect("uniform grid is valid")
}

/// Structured quadrilateral mesh of a rectangle, boundary tagged by side.
pub fn make_quad_mesh_rect(
    x_lo: f64,
    x_hi: f64,
    y_lo: f64,
    y_hi: f64,
    nx: usize,
    ny: usize,
) -> Mesh {
    assert!(nx >= 1 && ny >= 1);
    assert!(x_hi > x_lo && y_hi > y_lo);
    let dx = (x_hi - x_lo) / nx as f64;
    let dy = (y_hi - y_lo) / ny as f64;
    let node_id = |i: usize, j: usize| j * (nx + 1) + i;
    let mut nodes = Vec::with_capacity((nx + 1) * (ny + 1));
    for j in 0..=ny {
        for i in 0..=nx {
            nodes.push([x_lo + i as f64 * dx, y_lo + j as f64 * dy]);
        }
    }
    let mut elements = Vec::with_capacity(nx * ny);
    for j in 0..ny {
        for i in 0..nx {
            elements.push(vec![
                node_id(i, j),
                node_id(i + 1, j),
                node_id(i + 1, j + 1),
                node_id(i, j + 1),
            ]);
        }
    }
    let mut boundary = Vec::new();
    for i in 0..nx {
        boundary.push((vec![node_id(i, 0), node_id(i + 1, 0)], BoundaryTag::Bottom));
        boundary.push((vec![node_id(i, ny), node_id(i + 1, ny)], BoundaryTag::Top));
    }
    for j in 0..ny {
        boundary.push((vec![node_id(0, j), node_id(0, j + 1)], BoundaryTag::Left));
        boundary.push((vec![node_id(nx, j), node_id(nx, j + 1)], BoundaryTag::Right));
    }
    from_connectivity(2, nodes, elements, &boundary).expect("rectangular mesh is valid")
}

/// Regular pentagon centered at the origin, triangulated by concentric
/// similar pentagons: ring k sits at radius k R / n with 5k boundary
/// points, giving 5 n^2 positively oriented triangles.
pub fn make_pentagon_tri_mesh(circumradius: f64, n_rings: usize) -> Mesh {
    assert!(n_rings >= 1);
    assert!(circumradius > 0.0);
    let n = n_rings;
    let corner = |k: usize, j: usize| -> [f64; 2] {
        let r = circumradius * k as f64 / n as f64;
        let theta = std::f64::consts::TAU * j as f64 / 5.0 + std::f64::consts::FRAC_PI_2;
        [r * theta.cos(), r * theta.sin()]
    };

    let mut nodes: Vec<[f64; 2]> = vec![[0.0, 0.0]];
    // 1 center node plus 5j nodes on each finished ring j < k
    let ring_start = |k: usize| -> usize { 1 + 5 * (k * (k - 1)) / 2 };
    for k in 1..=n {
        for j in 0..5 {
            let a = corner(k, j);
            let b = corner(k, (j + 1) % 5);
            for i in 0..k {
                let t = i as f64 / k as f64;
                nodes.push([a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1])]);
            }
        }
    }

    let ring_node = |k: usize, p: usize| -> usize {
        if k == 0 {
            0
        } else {
            ring_start(k) + p % (5 * k)
        }
    };

    let mut elements = Vec::with_capacity(5 * n * n);
    for p in 0..5 {
        elements.push(vec![0, ring_node(1, p), ring_node(1, p + 1)]);
    }
    for k in 2..=n {
        for j in 0..5 {
            let outer = |i: usize| ring_node(k, j * k + i);
            let inner = |i: usize| ring_node(k - 1, j * (k - 1) + i);
            for i in 0..k {
                elements.push(vec![outer(i), outer(i + 1), inner(i)]);
            }
            for i in 0..k - 1 {
                elements.push(vec![inner(i), outer(i + 1), inner(i + 1)]);
            }
        }
    }

    let mut boundary = Vec::new();
    for p in 0..5 * n {
        boundary.push((vec![ring_node(n, p), ring_node(n, p + 1)], BoundaryTag::Outer));
    }
    from_connectivity(2, nodes, elements, &boundary).expect("pentagon mesh is valid")
}

/// Pair two periodic boundary sides; faces are matched in centroid order
/// along the seam and must have equal measures.
pub fn pair_boundary_faces(
    mesh: &Mesh,
    tag_a: BoundaryTag,
    tag_b: BoundaryTag,
) -> Result<Vec<(usize, usize)>, MeshError> {
    let collect = |tag: BoundaryTag| -> Vec<usize> {
        let mut v: Vec<usize> = mesh
            .faces
            .iter()
            .enumerate()
            .filter(|(_, f)| f.boundary == Some(tag))
            .map(|(i, _)| i)
            .collect();
        v.sort_by(|&a, &b| {
            let (ca, cb) = (mesh.faces[a].centroid, mesh.faces[b].centroid);
            (ca[1], ca[0]).partial_cmp(&(cb[1], cb[0])).unwrap()
        });
        v
    };
    let a = collect(tag_a);
    let b = collect(tag_b);
    if a.is_empty() || a.len() != b.len() {
        return Err(MeshError::Invalid(format!(
            "periodic sides {}/{} have {} and {} faces",
            tag_a.name(),
            tag_b.name(),
            a.len(),
            b.len()
        )));
    }
    for (&fa, &fb) in a.iter().zip(&b) {
        let (ma, mb) = (mesh.faces[fa].measure, mesh.faces[fb].measure);
        if (ma - mb).abs() > 1e-10 * ma.max(mb) {
            return Err(MeshError::Invalid(format!(
                "periodic faces {fa}/{fb} have measures {ma} and {mb}"
            )));
        }
    }
    Ok(a.into_iter().zip(b).collect())
}

/// ASCII mesh document: node coordinates, element connectivity, boundary
/// face tags.
pub fn write_mesh(path: impl AsRef<Path>, mesh: &Mesh) -> Result<(), MeshError> {
    let path = path.as_ref();
    let mut text = String::from("nnflux-mesh-v1\n");
    let _ = writeln!(text, "dim {}", mesh.dim);
    let _ = writeln!(text, "nodes {}", mesh.nodes.len());
    for p in &mesh.nodes {
        let _ = writeln!(text, "{} {}", p[0], p[1]);
    }
    let _ = writeln!(text, "elements {}", mesh.elements.len());
    for e in &mesh.elements {
        let ids: Vec<String> = e.iter().map(|v| v.to_string()).collect();
        let _ = writeln!(text, "{} {}", e.len(), ids.join(" "));
    }
    let bfaces: Vec<&Face> = mesh.faces.iter().filter(|f| f.is_boundary()).collect();
    let _ = writeln!(text, "boundary_faces {}", bfaces.len());
    for f in bfaces {
        let ids: Vec<String> = f.nodes.iter().map(|v| v.to_string()).collect();
        let _ = writeln!(text, "{} {}", f.boundary.unwrap().name(), ids.join(" "));
    }
    fs::write(path, text).map_err(|source| MeshError::Io {
        path: path.display().to_string(),
        source,
    })
}

pub fn read_mesh(path: impl AsRef<Path>) -> Result<Mesh, MeshError> {
    let path = path.as_ref();
    let display = path.display().to_string();
    let text = fs::read_to_string(path).map_err(|source| MeshError::Io {
        path: display.clone(),
        source,
    })?;
    let malformed = |line: usize, message: String| MeshError::Malformed {
        path: display.clone(),
        line,
        message,
    };

    let mut lines = text.lines().enumerate();
    let mut next = |expect: &str| -> Result<(usize, &str), MeshError> {
        lines
            .next()
            .map(|(i, l)| (i + 1, l.trim()))
            .ok_or_else(|| MeshError::Malformed {
                path: display.clone(),
                line: 0,
                message: format!("unexpected end of file, wanted {expect}"),
            })
    };

    let (ln, magic) = next("header")?;
    if magic != "nnflux-mesh-v1" {
        return Err(malformed(ln, format!("bad header {magic:?}")));
    }
    let (ln, dim_line) = next("dim")?;
    let dim: usize = dim_line
        .strip_prefix("dim ")
        .and_then(|s| s.trim().parse().ok())
        .ok_or_else(|| malformed(ln, format!("bad dim line {dim_line:?}")))?;

    let parse_count = |ln: usize, line: &str, key: &str| -> Result<usize, MeshError> {
        line.strip_prefix(key)
            .and_then(|s| s.trim().parse().ok())
            .ok_or_else(|| malformed(ln, format!("expected `{key} <count>`, got {line:?}")))
    };

    let (ln, l) = next("nodes")?;
    let n_nodes = parse_count(ln, l, "nodes")?;
    let mut nodes = Vec::with_capacity(n_nodes);
    for _ in 0..n_nodes {
        let (ln, l) = next("node coordinates")?;
        let mut it = l.split_whitespace();
        let x: f64 = it
            .next()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| malformed(ln, "bad node line".into()))?;
        let y: f64 = match it.next() {
            Some(s) => s.parse().map_err(|_| malformed(ln, "bad node line".into()))?,
            None => 0.0,
        };
        nodes.push([x, y]);
    }

    let (ln, l) = next("elements")?;
    let n_elems = parse_count(ln, l, "elements")?;
    let mut elements = Vec::with_capacity(n_elems);
    for _ in 0..n_elems {
        let (ln, l) = next("element connectivity")?;
        let ids: Result<Vec<usize>, _> = l.split_whitespace().map(|s| s.parse()).collect();
        let ids = ids.map_err(|_| malformed(ln, format!("bad element line {l:?}")))?;
        if ids.is_empty() || ids[0] != ids.len() - 1 {
            return Err(malformed(ln, format!("element count prefix mismatch in {l:?}")));
        }
        if ids[1..].iter().any(|&v| v >= nodes.len()) {
            return Err(malformed(ln, format!("node id out of range in {l:?}")));
        }
        elements.push(ids[1..].to_vec());
    }

    let (ln, l) = next("boundary_faces")?;
    let n_bfaces = parse_count(ln, l, "boundary_faces")?;
    let mut boundary = Vec::with_capacity(n_bfaces);
    for _ in 0..n_bfaces {
        let (ln, l) = next("boundary face")?;
        let mut it = l.split_whitespace();
        let tag = it
            .next()
            .and_then(BoundaryTag::parse)
            .ok_or_else(|| malformed(ln, format!("bad boundary tag in {l:?}")))?;
        let ids: Result<Vec<usize>, _> = it.map(|s| s.parse()).collect();
        let ids = ids.map_err(|_| malformed(ln, format!("bad boundary nodes in {l:?}")))?;
        boundary.push((ids, tag));
    }

    from_connectivity(dim, nodes, elements, &boundary)
}
