//! Triangulated oriented surfaces in C² and their invariants.
//!
//! A [`DiscreteCurve`] is an immutable list of points of C² together with
//! counterclockwise triangles. Every edge is shared by one or two faces and
//! adjacent faces induce opposite directions on their common edge, so the
//! mesh is an oriented surface with boundary. Vertices where several face
//! fans meet (pinched vertices) are counted once per fan when computing the
//! Euler characteristic, which keeps `V - E + F = 2 - 2g - b` exact on each
//! component.

use std::fs;
use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::cut::{self, SquaredRadius};
use crate::error::{Error, Result};
use crate::unionfind::UnionFind;

/// A point of C², written `(z, w)`. The projection used throughout the
/// pipeline is `(z, w) ↦ z` in frame coordinates.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Point {
    pub z: Complex64,
    pub w: Complex64,
}

impl Point {
    pub const fn new(z: Complex64, w: Complex64) -> Self {
        Point { z, w }
    }

    pub fn from_reals(r: [f64; 4]) -> Self {
        Point {
            z: Complex64::new(r[0], r[1]),
            w: Complex64::new(r[2], r[3]),
        }
    }

    pub fn to_reals(self) -> [f64; 4] {
        [self.z.re, self.z.im, self.w.re, self.w.im]
    }

    pub fn norm_sqr(&self) -> f64 {
        self.z.norm_sqr() + self.w.norm_sqr()
    }

    pub fn sub(&self, o: &Point) -> Point {
        Point::new(self.z - o.z, self.w - o.w)
    }

    pub fn lerp(a: &Point, b: &Point, t: f64) -> Point {
        Point::new(a.z + (b.z - a.z) * t, a.w + (b.w - a.w) * t)
    }

    pub fn scale(&self, s: f64) -> Point {
        Point::new(self.z * s, self.w * s)
    }

    pub fn dist(&self, o: &Point) -> f64 {
        self.sub(o).norm_sqr().sqrt()
    }
}

fn real_dot(a: &Point, b: &Point) -> f64 {
    (a.z.conj() * b.z + a.w.conj() * b.w).re
}

/// Euclidean area of the triangle in C² ≅ R⁴.
pub fn triangle_area(a: &Point, b: &Point, c: &Point) -> f64 {
    let e1 = b.sub(a);
    let e2 = c.sub(a);
    let g11 = e1.norm_sqr();
    let g22 = e2.norm_sqr();
    let g12 = real_dot(&e1, &e2);
    0.5 * (g11 * g22 - g12 * g12).max(0.0).sqrt()
}

/// The Kähler form `ω(e1, e2) = Im⟨e1, e2⟩` of the two edge vectors.
/// By Wirtinger's inequality `|ω| ≤ 2·area`, with equality exactly for
/// complex lines.
pub fn kahler_pairing(a: &Point, b: &Point, c: &Point) -> f64 {
    let e1 = b.sub(a);
    let e2 = c.sub(a);
    (e1.z.conj() * e2.z + e1.w.conj() * e2.w).im
}

/// Signed area of the projection of the triangle to the z-line.
pub fn projected_signed_area(a: &Point, b: &Point, c: &Point) -> f64 {
    let e1 = b.z - a.z;
    let e2 = c.z - a.z;
    0.5 * (e1.re * e2.im - e1.im * e2.re)
}

/// Deviation of the face plane from a complex line, in `[0, 1]`.
pub fn holomorphy_defect(a: &Point, b: &Point, c: &Point) -> f64 {
    let area2 = 2.0 * triangle_area(a, b, c);
    if area2 == 0.0 {
        return 1.0;
    }
    (1.0 - kahler_pairing(a, b, c).abs() / area2).clamp(0.0, 1.0)
}

#[derive(Clone, Debug, PartialEq)]
pub struct DiscreteCurve {
    pub name: Option<String>,
    pub vertices: Vec<Point>,
    pub faces: Vec<[u32; 3]>,
}

/// One undirected edge with the faces using it (`NO_FACE` when absent).
#[derive(Clone, Copy, Debug)]
pub struct EdgeRec {
    pub v: [u32; 2],
    pub faces: [u32; 2],
}

pub const NO_FACE: u32 = u32::MAX;

impl EdgeRec {
    pub fn is_boundary(&self) -> bool {
        self.faces[1] == NO_FACE
    }

    pub fn other_face(&self, f: u32) -> u32 {
        if self.faces[0] == f {
            self.faces[1]
        } else {
            self.faces[0]
        }
    }
}

/// Sorted edge list with per-face edge indices.
#[derive(Clone, Debug)]
pub struct EdgeTable {
    pub edges: Vec<EdgeRec>,
    pub face_edges: Vec<[u32; 3]>,
}

impl EdgeTable {
    pub fn build(faces: &[[u32; 3]]) -> Result<EdgeTable> {
        // (lo, hi, face, local slot, directed lo→hi)
        let mut half: Vec<(u32, u32, u32, u8, bool)> = Vec::with_capacity(faces.len() * 3);
        for (fi, f) in faces.iter().enumerate() {
            for s in 0..3 {
                let a = f[s];
                let b = f[(s + 1) % 3];
                half.push((a.min(b), a.max(b), fi as u32, s as u8, a < b));
            }
        }
        half.sort_unstable_by_key(|h| (h.0, h.1, h.2));

        let mut edges = Vec::with_capacity(half.len() / 2 + 1);
        let mut face_edges = vec![[0u32; 3]; faces.len()];
        let mut i = 0;
        while i < half.len() {
            let mut j = i + 1;
            while j < half.len() && half[j].0 == half[i].0 && half[j].1 == half[i].1 {
                j += 1;
            }
            let (lo, hi) = (half[i].0, half[i].1);
            if j - i > 2 {
                return Err(Error::NonManifoldEdge(lo, hi, j - i));
            }
            if j - i == 2 && half[i].4 == half[i + 1].4 {
                return Err(Error::InconsistentOrientation(lo, hi));
            }
            let idx = edges.len() as u32;
            let mut rec = EdgeRec {
                v: [lo, hi],
                faces: [NO_FACE, NO_FACE],
            };
            for (n, h) in half[i..j].iter().enumerate() {
                rec.faces[n] = h.2;
                face_edges[h.2 as usize][h.3 as usize] = idx;
            }
            edges.push(rec);
            i = j;
        }
        Ok(EdgeTable { edges, face_edges })
    }

    pub fn find(&self, a: u32, b: u32) -> Option<usize> {
        let key = [a.min(b), a.max(b)];
        self.edges.binary_search_by(|e| e.v.cmp(&key)).ok()
    }
}

/// A closed cycle of boundary edges, listed as vertices in traversal order.
#[derive(Clone, Debug)]
pub struct BoundaryLoop {
    pub vertices: Vec<u32>,
    pub component: usize,
}

#[derive(Clone, Debug)]
pub struct ComponentTopology {
    pub vertices: usize,
    pub edges: usize,
    pub faces: usize,
    pub boundary_loops: usize,
    pub euler: i64,
    pub genus: i64,
}

#[derive(Clone, Debug)]
pub struct Topology {
    pub component_of_face: Vec<u32>,
    pub components: Vec<ComponentTopology>,
    pub boundary_loops: Vec<BoundaryLoop>,
}

/// Aggregate invariants of a curve.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CurveStats {
    pub area: f64,
    pub genus: i64,
    pub boundary_count: usize,
    pub boundary_length: f64,
    pub euler_characteristic: i64,
    pub holomorphy_residual: f64,
    pub components: usize,
}

impl CurveStats {
    /// `(L + G + B) / A`, the bounded-geometry ratio.
    pub fn geometry_ratio(&self) -> f64 {
        if self.area == 0.0 {
            return f64::INFINITY;
        }
        (self.boundary_length + self.genus as f64 + self.boundary_count as f64) / self.area
    }
}

#[derive(Serialize, Deserialize)]
struct MeshFileIn {
    #[serde(default)]
    name: Option<String>,
    vertices: Vec<[f64; 4]>,
    faces: Vec<Vec<i64>>,
}

#[derive(Serialize)]
struct MeshFileOut<'a> {
    #[serde(skip_serializing_if = "Option::is_none")]
    name: Option<&'a str>,
    vertices: Vec<[f64; 4]>,
    faces: &'a [[u32; 3]],
}

impl DiscreteCurve {
    /// Builds and validates a curve: indices in range, no repeated corner,
    /// manifold edges, consistent orientation.
    pub fn new(name: Option<String>, vertices: Vec<Point>, faces: Vec<[u32; 3]>) -> Result<Self> {
        let n = vertices.len() as u32;
        for (fi, f) in faces.iter().enumerate() {
            if f.iter().any(|&v| v >= n) {
                return Err(Error::MeshFormat(format!("face {fi} references a missing vertex")));
            }
            if f[0] == f[1] || f[1] == f[2] || f[0] == f[2] {
                return Err(Error::DegenerateFace(fi));
            }
        }
        EdgeTable::build(&faces)?;
        Ok(DiscreteCurve {
            name,
            vertices,
            faces,
        })
    }

    /// Skips validation. Used for meshes derived from a validated curve by
    /// cutting, which preserves the surface conditions.
    pub(crate) fn from_parts(name: Option<String>, vertices: Vec<Point>, faces: Vec<[u32; 3]>) -> Self {
        DiscreteCurve {
            name,
            vertices,
            faces,
        }
    }

    pub fn empty() -> Self {
        DiscreteCurve {
            name: None,
            vertices: Vec::new(),
            faces: Vec::new(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.faces.is_empty()
    }

    pub fn corners(&self, f: usize) -> [&Point; 3] {
        let t = self.faces[f];
        [
            &self.vertices[t[0] as usize],
            &self.vertices[t[1] as usize],
            &self.vertices[t[2] as usize],
        ]
    }

    pub fn face_area(&self, f: usize) -> f64 {
        let [a, b, c] = self.corners(f);
        triangle_area(a, b, c)
    }

    pub fn face_projected_signed_area(&self, f: usize) -> f64 {
        let [a, b, c] = self.corners(f);
        projected_signed_area(a, b, c)
    }

    pub fn face_centroid(&self, f: usize) -> Point {
        let [a, b, c] = self.corners(f);
        Point::new((a.z + b.z + c.z) / 3.0, (a.w + b.w + c.w) / 3.0)
    }

    pub fn area(&self) -> f64 {
        (0..self.faces.len()).map(|f| self.face_area(f)).sum()
    }

    /// `∫ π*ω` with multiplicity: the unsigned projected area of every face.
    pub fn projected_area(&self) -> f64 {
        (0..self.faces.len())
            .map(|f| self.face_projected_signed_area(f).abs())
            .sum()
    }

    pub fn edges(&self) -> EdgeTable {
        EdgeTable::build(&self.faces).expect("curve edges validated at construction")
    }

    pub fn topology(&self) -> Topology {
        topology_of(&self.faces, &self.edges())
    }

    pub fn stats(&self) -> CurveStats {
        compute_stats(self)
    }

    /// Applies `f` to every vertex.
    pub fn map_points(&self, f: impl Fn(&Point) -> Point) -> DiscreteCurve {
        DiscreteCurve {
            name: self.name.clone(),
            vertices: self.vertices.iter().map(f).collect(),
            faces: self.faces.clone(),
        }
    }

    /// The sub-surface made of the selected faces, with unused vertices
    /// dropped. Returns the new curve and, per kept face, its index here.
    pub fn subset(&self, keep: impl Fn(usize) -> bool) -> (DiscreteCurve, Vec<u32>) {
        let mut remap = vec![u32::MAX; self.vertices.len()];
        let mut vertices = Vec::new();
        let mut faces = Vec::new();
        let mut kept = Vec::new();
        for (fi, f) in self.faces.iter().enumerate() {
            if !keep(fi) {
                continue;
            }
            let mut nf = [0u32; 3];
            for (s, &v) in f.iter().enumerate() {
                if remap[v as usize] == u32::MAX {
                    remap[v as usize] = vertices.len() as u32;
                    vertices.push(self.vertices[v as usize]);
                }
                nf[s] = remap[v as usize];
            }
            faces.push(nf);
            kept.push(fi as u32);
        }
        (DiscreteCurve::from_parts(self.name.clone(), vertices, faces), kept)
    }

    /// Disjoint union of two curves.
    pub fn union(&self, other: &DiscreteCurve) -> DiscreteCurve {
        let off = self.vertices.len() as u32;
        let mut vertices = self.vertices.clone();
        vertices.extend_from_slice(&other.vertices);
        let mut faces = self.faces.clone();
        faces.extend(other.faces.iter().map(|f| [f[0] + off, f[1] + off, f[2] + off]));
        DiscreteCurve::from_parts(self.name.clone(), vertices, faces)
    }

    pub fn to_json(&self) -> String {
        let out = MeshFileOut {
            name: self.name.as_deref(),
            vertices: self.vertices.iter().map(|p| p.to_reals()).collect(),
            faces: &self.faces,
        };
        serde_json::to_string(&out).expect("mesh serialization cannot fail")
    }

    /// Parses the JSON mesh format. Quads are split along their first
    /// diagonal; zero-area triangles are rejected.
    pub fn from_json(text: &str) -> Result<Self> {
        let file: MeshFileIn =
            serde_json::from_str(text).map_err(|e| Error::MeshFormat(e.to_string()))?;
        let n = file.vertices.len() as i64;
        let mut faces = Vec::with_capacity(file.faces.len());
        for (fi, f) in file.faces.iter().enumerate() {
            if f.iter().any(|&i| i < 0 || i >= n) {
                return Err(Error::MeshFormat(format!("face {fi} has an out-of-range index")));
            }
            let f: Vec<u32> = f.iter().map(|&i| i as u32).collect();
            match f.len() {
                3 => faces.push([f[0], f[1], f[2]]),
                4 => {
                    faces.push([f[0], f[1], f[2]]);
                    faces.push([f[0], f[2], f[3]]);
                }
                m => {
                    return Err(Error::MeshFormat(format!("face {fi} has {m} corners")));
                }
            }
        }
        let vertices = file.vertices.into_iter().map(Point::from_reals).collect();
        let curve = DiscreteCurve::new(file.name, vertices, faces)?;
        for f in 0..curve.faces.len() {
            if curve.face_area(f) == 0.0 {
                return Err(Error::DegenerateFace(f));
            }
        }
        Ok(curve)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        fs::write(path, self.to_json()).map_err(|e| Error::io(path, e))
    }
}

/// Reads and validates a mesh file.
pub fn load_curve(path: &Path) -> Result<DiscreteCurve> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    DiscreteCurve::from_json(&text)
}

/// Euler characteristic `V - E + F` of a face subset, counting only the
/// vertices and edges the subset uses. Vertices are counted once each,
/// matching the combinatorial count on the cut mesh.
pub fn euler_of_faces(faces: &[[u32; 3]], subset: impl Iterator<Item = u32>, edges: &EdgeTable) -> i64 {
    let mut verts: Vec<u32> = Vec::new();
    let mut es: Vec<u32> = Vec::new();
    let mut nf = 0i64;
    for f in subset {
        nf += 1;
        verts.extend_from_slice(&faces[f as usize]);
        es.extend_from_slice(&edges.face_edges[f as usize]);
    }
    verts.sort_unstable();
    verts.dedup();
    es.sort_unstable();
    es.dedup();
    verts.len() as i64 - es.len() as i64 + nf
}

/// Euler characteristic of each labelled sub-surface, all at once. Faces
/// labelled `u32::MAX` are ignored. Vertices are counted as fans of
/// corners connected through edges inside the sub-surface, so surfaces
/// that only touch at a vertex are counted as separate there.
pub fn euler_by_label(faces: &[[u32; 3]], edges: &EdgeTable, label: &[u32], n_labels: usize) -> Vec<i64> {
    let nf = faces.len();
    let mut corners = UnionFind::new(3 * nf);
    let slot = |f: u32, v: u32| -> usize {
        let s = faces[f as usize].iter().position(|&x| x == v).expect("vertex on face");
        3 * f as usize + s
    };
    let mut chi = vec![0i64; n_labels];
    for e in &edges.edges {
        let l0 = label[e.faces[0] as usize];
        if e.is_boundary() {
            if l0 != u32::MAX {
                chi[l0 as usize] -= 1;
            }
            continue;
        }
        let l1 = label[e.faces[1] as usize];
        if l0 == l1 {
            if l0 != u32::MAX {
                chi[l0 as usize] -= 1;
                for &v in &e.v {
                    corners.union(slot(e.faces[0], v), slot(e.faces[1], v));
                }
            }
        } else {
            for l in [l0, l1] {
                if l != u32::MAX {
                    chi[l as usize] -= 1;
                }
            }
        }
    }
    for (f, &l) in label.iter().enumerate() {
        if l == u32::MAX {
            continue;
        }
        chi[l as usize] += 1;
        for s in 0..3 {
            if corners.find(3 * f + s) == 3 * f + s {
                chi[l as usize] += 1;
            }
        }
    }
    chi
}

pub(crate) fn topology_of(faces: &[[u32; 3]], edges: &EdgeTable) -> Topology {
    let nf = faces.len();
    let mut uf = UnionFind::new(nf);
    // Corner classes: corner (f, s) is index 3f + s.
    let mut corners = UnionFind::new(3 * nf);
    let slot = |f: u32, v: u32| -> usize {
        let t = faces[f as usize];
        let s = t.iter().position(|&x| x == v).expect("vertex on face");
        3 * f as usize + s
    };
    for e in &edges.edges {
        if e.is_boundary() {
            continue;
        }
        let (f, g) = (e.faces[0], e.faces[1]);
        uf.union(f as usize, g as usize);
        for &v in &e.v {
            corners.union(slot(f, v), slot(g, v));
        }
    }

    let mut comp_id = vec![u32::MAX; nf];
    let mut roots: Vec<usize> = Vec::new();
    let mut root_to_comp = std::collections::HashMap::new();
    for f in 0..nf {
        let r = uf.find(f);
        let id = *root_to_comp.entry(r).or_insert_with(|| {
            roots.push(r);
            roots.len() - 1
        });
        comp_id[f] = id as u32;
    }
    let nc = roots.len();
    let mut comps: Vec<ComponentTopology> = (0..nc)
        .map(|_| ComponentTopology {
            vertices: 0,
            edges: 0,
            faces: 0,
            boundary_loops: 0,
            euler: 0,
            genus: 0,
        })
        .collect();
    for f in 0..nf {
        comps[comp_id[f] as usize].faces += 1;
    }
    for e in &edges.edges {
        comps[comp_id[e.faces[0] as usize] as usize].edges += 1;
    }
    for c in 0..3 * nf {
        if corners.find(c) == c {
            comps[comp_id[c / 3] as usize].vertices += 1;
        }
    }

    let loops = trace_boundary_loops(faces, edges, &comp_id);
    for l in &loops {
        comps[l.component].boundary_loops += 1;
    }
    for c in comps.iter_mut() {
        c.euler = c.vertices as i64 - c.edges as i64 + c.faces as i64;
        let twice_genus = 2 - c.boundary_loops as i64 - c.euler;
        debug_assert!(twice_genus >= 0 && twice_genus % 2 == 0, "non-orientable or corrupt component");
        c.genus = twice_genus / 2;
    }
    Topology {
        component_of_face: comp_id,
        components: comps,
        boundary_loops: loops,
    }
}

fn third(face: &[u32; 3], a: u32, b: u32) -> u32 {
    *face.iter().find(|&&x| x != a && x != b).expect("triangle")
}

/// Directed successor of `a` in the face's counterclockwise order.
fn next_in_face(face: &[u32; 3], a: u32) -> u32 {
    let s = face.iter().position(|&x| x == a).expect("vertex on face");
    face[(s + 1) % 3]
}

fn trace_boundary_loops(faces: &[[u32; 3]], edges: &EdgeTable, comp_id: &[u32]) -> Vec<BoundaryLoop> {
    // Directed boundary half-edges keyed by edge index.
    let mut used = vec![false; edges.edges.len()];
    let mut loops = Vec::new();
    for (ei, e) in edges.edges.iter().enumerate() {
        if !e.is_boundary() || used[ei] {
            continue;
        }
        let f0 = e.faces[0];
        let (a0, b0) = if next_in_face(&faces[f0 as usize], e.v[0]) == e.v[1] {
            (e.v[0], e.v[1])
        } else {
            (e.v[1], e.v[0])
        };
        let mut verts = vec![a0];
        let (mut f, mut a, mut b) = (f0, a0, b0);
        let mut cur = ei;
        loop {
            used[cur] = true;
            // Rotate around b until the next boundary half-edge b→x.
            let mut g = f;
            let mut c = third(&faces[g as usize], a, b);
            loop {
                let idx = edges.find(b, c).expect("edge exists");
                let rec = edges.edges[idx];
                if rec.is_boundary() {
                    cur = idx;
                    break;
                }
                let h = rec.other_face(g);
                // In h the edge runs c→b, followed by b→d.
                let d = next_in_face(&faces[h as usize], b);
                g = h;
                c = d;
            }
            f = g;
            a = b;
            b = c;
            if cur == ei {
                break;
            }
            if used[cur] {
                // Pinched boundary vertex already consumed; close the loop here.
                break;
            }
            verts.push(a);
        }
        loops.push(BoundaryLoop {
            vertices: verts,
            component: comp_id[f0 as usize] as usize,
        });
    }
    loops
}

pub fn compute_stats(curve: &DiscreteCurve) -> CurveStats {
    let edges = curve.edges();
    let topo = topology_of(&curve.faces, &edges);
    let boundary_length = edges
        .edges
        .iter()
        .filter(|e| e.is_boundary())
        .map(|e| curve.vertices[e.v[0] as usize].dist(&curve.vertices[e.v[1] as usize]))
        .sum();
    let holomorphy_residual = (0..curve.faces.len())
        .map(|f| {
            let [a, b, c] = curve.corners(f);
            holomorphy_defect(a, b, c)
        })
        .fold(0.0, f64::max);
    CurveStats {
        area: curve.area(),
        genus: topo.components.iter().map(|c| c.genus).sum(),
        boundary_count: topo.boundary_loops.len(),
        boundary_length,
        euler_characteristic: topo.components.iter().map(|c| c.euler).sum(),
        holomorphy_residual,
        components: topo.components.len(),
    }
}

/// Result of cutting a curve along a sphere `|z|² + |w|² = r²`.
#[derive(Clone, Debug)]
pub struct SphereSlice {
    pub inside: DiscreteCurve,
    pub outside: DiscreteCurve,
    /// Radius actually used, after any nudge off mesh vertices.
    pub radius: f64,
    /// True when the sphere misses the curve's interior part entirely.
    pub empty: bool,
}

/// Cuts the curve along the sphere of the given radius and returns the
/// parts inside and outside. If a vertex lies on the sphere the radius is
/// nudged outward by a few ulps-scaled steps until none does.
pub fn split_by_sphere(curve: &DiscreteCurve, radius: f64) -> Result<SphereSlice> {
    if !(radius > 0.0) {
        return Err(Error::InvalidSpec(format!("slice radius must be positive, got {radius}")));
    }
    let mut r = radius;
    let tol = 1e-12 * radius.max(1.0);
    for step in 1..=64 {
        if !curve.vertices.iter().any(|p| (p.norm_sqr().sqrt() - r).abs() <= tol) {
            break;
        }
        r = radius * (1.0 + 1e-9 * step as f64);
    }
    let level = r * r;
    let parent: Vec<u32> = (0..curve.faces.len() as u32).collect();
    let cm = cut::cut_by_levels(&curve.vertices, &curve.faces, &parent, &SquaredRadius, &[level]);
    let cutc = DiscreteCurve::from_parts(curve.name.clone(), cm.vertices, cm.faces);
    let inside_flag: Vec<bool> = (0..cutc.faces.len())
        .map(|f| cutc.corners(f).iter().map(|p| p.norm_sqr()).sum::<f64>() < 3.0 * level)
        .collect();
    let (inside, _) = cutc.subset(|f| inside_flag[f]);
    let (outside, _) = cutc.subset(|f| !inside_flag[f]);
    let empty = inside.is_empty();
    Ok(SphereSlice {
        inside,
        outside,
        radius: r,
        empty,
    })
}

/// The part of the curve inside the ball of the given radius.
pub fn slice_by_sphere(curve: &DiscreteCurve, radius: f64) -> Result<SphereSlice> {
    split_by_sphere(curve, radius)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(x: f64, y: f64) -> Point {
        Point::from_reals([x, y, 0.0, 0.0])
    }

    fn octahedron() -> DiscreteCurve {
        let v = vec![
            Point::from_reals([1.0, 0.0, 0.0, 0.0]),
            Point::from_reals([-1.0, 0.0, 0.0, 0.0]),
            Point::from_reals([0.0, 1.0, 0.0, 0.0]),
            Point::from_reals([0.0, -1.0, 0.0, 0.0]),
            Point::from_reals([0.0, 0.0, 1.0, 0.0]),
            Point::from_reals([0.0, 0.0, -1.0, 0.0]),
        ];
        // Outward orientation in the (x, y, u) 3-space of the first three reals.
        let f = vec![
            [0, 2, 4],
            [2, 1, 4],
            [1, 3, 4],
            [3, 0, 4],
            [2, 0, 5],
            [1, 2, 5],
            [3, 1, 5],
            [0, 3, 5],
        ];
        DiscreteCurve::new(None, v, f).unwrap()
    }

    /// Torus as an n×m grid with wrap-around identifications.
    pub(crate) fn torus(n: u32, m: u32) -> DiscreteCurve {
        let mut v = Vec::new();
        for i in 0..n {
            for j in 0..m {
                let a = i as f64 / n as f64 * std::f64::consts::TAU;
                let b = j as f64 / m as f64 * std::f64::consts::TAU;
                v.push(Point::from_reals([a.cos(), a.sin(), b.cos(), b.sin()]));
            }
        }
        let id = |i: u32, j: u32| (i % n) * m + (j % m);
        let mut f = Vec::new();
        for i in 0..n {
            for j in 0..m {
                f.push([id(i, j), id(i + 1, j), id(i + 1, j + 1)]);
                f.push([id(i, j), id(i + 1, j + 1), id(i, j + 1)]);
            }
        }
        DiscreteCurve::new(None, v, f).unwrap()
    }

    #[test]
    fn single_triangle_is_a_disk() {
        let c = DiscreteCurve::new(None, vec![p(0.0, 0.0), p(1.0, 0.0), p(0.0, 1.0)], vec![[0, 1, 2]]).unwrap();
        let e = c.edges();
        assert_eq!(e.edges.len(), 3);
        let t = c.topology();
        assert_eq!(t.boundary_loops.len(), 1);
        assert_eq!(t.boundary_loops[0].vertices.len(), 3);
        let s = c.stats();
        assert_eq!((s.euler_characteristic, s.genus, s.boundary_count), (1, 0, 1));
        assert!((s.area - 0.5).abs() < 1e-15);
        assert!((s.boundary_length - (2.0 + 2f64.sqrt())).abs() < 1e-12);
    }

    #[test]
    fn octahedron_is_a_sphere() {
        let s = octahedron().stats();
        assert_eq!((s.euler_characteristic, s.genus, s.boundary_count), (2, 0, 0));
    }

    #[test]
    fn torus_has_genus_one() {
        let s = torus(6, 5).stats();
        assert_eq!((s.euler_characteristic, s.genus, s.boundary_count), (0, 1, 0));
    }

    #[test]
    fn three_faces_on_an_edge_is_rejected() {
        let v = vec![p(0.0, 0.0), p(1.0, 0.0), p(0.0, 1.0), p(0.0, -1.0), Point::from_reals([0.0, 0.0, 1.0, 0.0])];
        let r = DiscreteCurve::new(None, v, vec![[0, 1, 2], [1, 0, 3], [0, 1, 4]]);
        assert!(matches!(r, Err(Error::NonManifoldEdge(0, 1, 3))));
    }

    #[test]
    fn flipped_neighbour_is_rejected() {
        let v = vec![p(0.0, 0.0), p(1.0, 0.0), p(0.0, 1.0), p(1.0, 1.0)];
        let r = DiscreteCurve::new(None, v, vec![[0, 1, 2], [1, 2, 3]]);
        assert!(matches!(r, Err(Error::InconsistentOrientation(1, 2))));
    }

    #[test]
    fn zero_area_face_rejected_at_load() {
        let json = r#"{"vertices":[[0,0,0,0],[1,0,0,0],[2,0,0,0]],"faces":[[0,1,2]]}"#;
        assert!(matches!(DiscreteCurve::from_json(json), Err(Error::DegenerateFace(0))));
    }

    #[test]
    fn quads_are_split() {
        let json = r#"{"name":"q","vertices":[[0,0,0,0],[1,0,0,0],[1,1,0,0],[0,1,0,0]],"faces":[[0,1,2,3]]}"#;
        let c = DiscreteCurve::from_json(json).unwrap();
        assert_eq!(c.faces.len(), 2);
        assert!((c.area() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn writer_round_trips_bit_identically() {
        let c = torus(4, 3);
        let s = c.to_json();
        let back = DiscreteCurve::from_json(&s).unwrap();
        assert_eq!(back, c);
        assert_eq!(back.to_json(), s);
    }

    #[test]
    fn complex_line_has_zero_residual() {
        let i = Complex64::new(0.0, 1.0);
        let a = Point::new(0.0.into(), 0.0.into());
        let b = Point::new(1.0.into(), (2.0 * i).into());
        let c = Point::new(i, (-2.0).into());
        assert!(holomorphy_defect(&a, &b, &c) < 1e-15);
        // A totally real plane.
        let c2 = Point::from_reals([0.0, 0.0, 1.0, 0.0]);
        let b2 = Point::from_reals([1.0, 0.0, 0.0, 0.0]);
        assert!((holomorphy_defect(&a, &b2, &c2) - 1.0).abs() < 1e-15);
    }
}
