//! Connected pieces of a paved curve over crosses and cells.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::mesh::{self, EdgeRec};
use crate::paving::{GridSpec, Paving, PavedCurve, Region};
use crate::unionfind::UnionFind;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Classification {
    LongBoundary,
    Covering,
    Small,
    Island,
    RamifiedIsland,
    /// A cell component that is not a disk with boundary over the cell
    /// boundary.
    NonIsland,
    Other,
}

impl Classification {
    pub fn as_str(self) -> &'static str {
        match self {
            Classification::LongBoundary => "LONG_BOUNDARY",
            Classification::Covering => "COVERING",
            Classification::Small => "SMALL",
            Classification::Island => "ISLAND",
            Classification::RamifiedIsland => "RAMIFIED_ISLAND",
            Classification::NonIsland => "NON_ISLAND",
            Classification::Other => "OTHER",
        }
    }
}

/// Boundary arcs of a cross component over one α-side.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AlphaTrace {
    pub side: u32,
    pub arcs: usize,
    /// Projected length of the component boundary over the side.
    pub length: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FiberComponent {
    pub region: Region,
    /// Cell `(i, j)` for cell components.
    pub cell: Option<(usize, usize)>,
    pub faces: Vec<u32>,
    pub rel_boundary_length: f64,
    pub projected_area: f64,
    pub signed_projected_area: f64,
    pub euler: i64,
    pub classification: Classification,
    /// Projection has a fold or a branch point in the interior.
    pub critical_point: bool,
    pub alpha_arcs: Vec<AlphaTrace>,
}

impl FiberComponent {
    /// Projected area over region area: the number of sheets.
    pub fn degree(&self, region_area: f64) -> f64 {
        self.projected_area / region_area
    }
}

#[derive(Clone, Debug)]
pub struct Thresholds {
    /// Edges within `boundary_tol / k` of a region side lie on it.
    pub boundary_tol: f64,
    pub ramification_degree: f64,
    /// Faces below this fraction of a sub-cell area are slivers.
    pub sliver_fraction: f64,
}

impl Default for Thresholds {
    fn default() -> Self {
        Thresholds {
            boundary_tol: 1e-7,
            ramification_degree: 1.5,
            sliver_fraction: 1e-12,
        }
    }
}

/// Components of the alive faces grouped by a per-face label.
pub struct Extraction {
    pub components: Vec<FiberComponent>,
    /// Component of each face, `u32::MAX` for dead faces.
    pub component_of_face: Vec<u32>,
    pub slivers: usize,
}

/// The sub-cell side (as an offset to the neighbor) an edge of `face` lies on.
pub(crate) fn on_side(e: &EdgeRec, paved: &PavedCurve, face: usize, grid: &GridSpec, tol: f64) -> Option<(isize, isize)> {
    let (a, b) = paved.subcell[face];
    let (a, b) = (a as usize, b as usize);
    let p = &paved.mesh.vertices[e.v[0] as usize].z;
    let q = &paved.mesh.vertices[e.v[1] as usize].z;
    let near = |x: f64, y: f64, line: f64| (x - line).abs() <= tol && (y - line).abs() <= tol;
    if near(p.re, q.re, grid.x_line(a)) {
        return Some((-1, 0));
    }
    if near(p.re, q.re, grid.x_line(a + 1)) {
        return Some((1, 0));
    }
    if near(p.im, q.im, grid.y_line(b)) {
        return Some((0, -1));
    }
    if near(p.im, q.im, grid.y_line(b + 1)) {
        return Some((0, 1));
    }
    None
}

/// Groups alive faces with equal sub-cell labels into edge-connected
/// components and measures them. A component boundary edge is relative
/// boundary unless it lies over a side between sub-cells of different
/// labels, or on the boundary of `C`.
pub fn extract(
    paved: &PavedCurve,
    paving: &Paving,
    subcell_label: impl Fn(usize, usize) -> u32,
    label_region: impl Fn(u32) -> Region,
    label_cell: impl Fn(u32) -> Option<(usize, usize)>,
    alive: &[bool],
    th: &Thresholds,
) -> Extraction {
    let grid = &paving.grid;
    let nf = paved.mesh.faces.len();
    let labels: Vec<u32> = paved.subcell.iter().map(|&(a, b)| subcell_label(a as usize, b as usize)).collect();
    let tol = th.boundary_tol / grid.k as f64;
    let mut uf = UnionFind::new(nf);
    for e in paved.edges.edges.iter().filter(|e| !e.is_boundary()) {
        let (f, g) = (e.faces[0] as usize, e.faces[1] as usize);
        if alive[f] && alive[g] && labels[f] == labels[g] {
            uf.union(f, g);
        }
    }
    let mut comp_of_root = HashMap::new();
    let mut component_of_face = vec![u32::MAX; nf];
    let mut components: Vec<FiberComponent> = Vec::new();
    for f in 0..nf {
        if !alive[f] {
            continue;
        }
        let r = uf.find(f);
        let id = *comp_of_root.entry(r).or_insert_with(|| {
            components.push(FiberComponent {
                region: label_region(labels[f]),
                cell: label_cell(labels[f]),
                faces: Vec::new(),
                rel_boundary_length: 0.0,
                projected_area: 0.0,
                signed_projected_area: 0.0,
                euler: 0,
                classification: Classification::Other,
                critical_point: false,
                alpha_arcs: Vec::new(),
            });
            (components.len() - 1) as u32
        });
        component_of_face[f] = id;
        let c = &mut components[id as usize];
        c.faces.push(f as u32);
        let s = paved.mesh.face_projected_signed_area(f);
        c.signed_projected_area += s;
        c.projected_area += s.abs();
    }
    let sub_area = 0.25 * grid.cell_area();
    let slivers = (0..nf)
        .filter(|&f| alive[f] && paved.mesh.face_area(f) < th.sliver_fraction * sub_area)
        .count();
    if slivers > 0 {
        log::debug!("{slivers} sliver faces after clipping at k={}", grid.k);
    }

    // Relative boundary: component boundary edges that do not lie over a
    // side separating the region from another region or from outside C.
    let ns = grid.subcells_per_side() as isize;
    for e in &paved.edges.edges {
        let sides: Vec<usize> = e
            .faces
            .iter()
            .filter(|&&f| f != mesh::NO_FACE && alive[f as usize])
            .map(|&f| f as usize)
            .collect();
        let interior = sides.len() == 2 && component_of_face[sides[0]] == component_of_face[sides[1]];
        if interior || sides.is_empty() {
            continue;
        }
        for &f in &sides {
            let on_label_side = on_side(e, paved, f, grid, tol).is_some_and(|(da, db)| {
                let (a, b) = paved.subcell[f];
                let (na, nb) = (a as isize + da, b as isize + db);
                na < 0 || nb < 0 || na >= ns || nb >= ns || subcell_label(na as usize, nb as usize) != labels[f]
            });
            if !on_label_side {
                let p = paved.mesh.vertices[e.v[0] as usize].z;
                let q = paved.mesh.vertices[e.v[1] as usize].z;
                components[component_of_face[f] as usize].rel_boundary_length += (p - q).norm();
            }
        }
    }

    let n = components.len();
    let chi = mesh::euler_by_label(&paved.mesh.faces, &paved.edges, &component_of_face, n);
    for (c, x) in components.iter_mut().zip(chi) {
        c.euler = x;
    }
    mark_critical_points(paved, &component_of_face, &mut components);
    Extraction {
        components,
        component_of_face,
        slivers,
    }
}

/// Flags components whose projection folds (a face of negative
/// orientation) or winds more than once around an interior vertex.
fn mark_critical_points(paved: &PavedCurve, comp: &[u32], components: &mut [FiberComponent]) {
    let mesh = &paved.mesh;
    let nv = mesh.vertices.len();
    let mut angle = vec![0.0f64; nv];
    let mut on_boundary = vec![false; nv];
    let mut owner = vec![u32::MAX; nv];
    let mut mixed = vec![false; nv];
    for e in &paved.edges.edges {
        let c0 = comp[e.faces[0] as usize];
        let c1 = if e.is_boundary() { u32::MAX } else { comp[e.faces[1] as usize] };
        if c0 != c1 {
            on_boundary[e.v[0] as usize] = true;
            on_boundary[e.v[1] as usize] = true;
        }
    }
    for (f, t) in mesh.faces.iter().enumerate() {
        let c = comp[f];
        if c == u32::MAX {
            continue;
        }
        if mesh.face_projected_signed_area(f) < 0.0 {
            components[c as usize].critical_point = true;
        }
        for s in 0..3 {
            let v = t[s] as usize;
            let p = mesh.vertices[v].z;
            let a = mesh.vertices[t[(s + 1) % 3] as usize].z - p;
            let b = mesh.vertices[t[(s + 2) % 3] as usize].z - p;
            angle[v] += (a.re * b.im - a.im * b.re).atan2(a.re * b.re + a.im * b.im);
            if owner[v] == u32::MAX {
                owner[v] = c;
            } else if owner[v] != c {
                mixed[v] = true;
            }
        }
    }
    for v in 0..nv {
        if owner[v] == u32::MAX || on_boundary[v] || mixed[v] {
            continue;
        }
        if (angle[v] - std::f64::consts::TAU).abs() > std::f64::consts::PI {
            components[owner[v] as usize].critical_point = true;
        }
    }
}

/// Classification of a cross component.
pub fn classify_cross(c: &FiberComponent, region_area: f64, grid: &GridSpec) -> Classification {
    let k = grid.k as f64;
    let l = c.rel_boundary_length;
    let a = c.projected_area;
    if l >= grid.epsilon_k / k {
        Classification::LongBoundary
    } else if a <= 4.0 * l * l {
        Classification::Small
    } else if a >= (1.0 - grid.epsilon_k) * region_area {
        Classification::Covering
    } else {
        Classification::Other
    }
}

/// Classification of a cell component.
pub fn classify_cell(c: &FiberComponent, cell_area: f64, grid: &GridSpec, th: &Thresholds) -> Classification {
    let tol = th.boundary_tol / grid.k as f64;
    if c.euler != 1 || c.rel_boundary_length > tol {
        Classification::NonIsland
    } else if c.degree(cell_area) > th.ramification_degree || c.critical_point {
        Classification::RamifiedIsland
    } else {
        Classification::Island
    }
}

/// Components over the crosses and the `Q` cells.
pub struct RegionComponents {
    pub extraction: Extraction,
}

pub fn region_components(paved: &PavedCurve, paving: &Paving, alive: &[bool], th: &Thresholds) -> RegionComponents {
    let nc = paving.crosses.len() as u32;
    let label = |a: usize, b: usize| match paving.region_of_subcell(a, b) {
        Region::Cross(c) => c,
        Region::Q(q) => nc + q,
    };
    let region = |l: u32| if l < nc { Region::Cross(l) } else { Region::Q(l - nc) };
    let cell = |l: u32| (l >= nc).then(|| paving.q_cells[(l - nc) as usize]);
    let mut extraction = extract(paved, paving, label, region, cell, alive, th);
    let grid = &paving.grid;
    for c in &mut extraction.components {
        c.classification = match c.region {
            Region::Cross(_) => classify_cross(c, paving.region_area(c.region), grid),
            Region::Q(_) => classify_cell(c, grid.cell_area(), grid, th),
        };
    }
    trace_alpha_arcs(paved, paving, &mut extraction);
    RegionComponents { extraction }
}

/// Components over every one of the `4k²` cells, classified as islands or
/// not.
pub fn cell_components(paved: &PavedCurve, paving: &Paving, alive: &[bool], th: &Thresholds) -> Extraction {
    let n = paving.grid.cells_per_side();
    let label = |a: usize, b: usize| ((a / 2) * n + b / 2) as u32;
    let cell = |l: u32| Some((l as usize / n, l as usize % n));
    // The region of a cell component is reported as the region holding
    // the cell's first sub-cell; only `cell` is used downstream.
    let region = |l: u32| {
        let (i, j) = (l as usize / n, l as usize % n);
        paving.region_of_subcell(2 * i, 2 * j)
    };
    let mut ex = extract(paved, paving, label, region, cell, alive, th);
    let grid = &paving.grid;
    for c in &mut ex.components {
        c.classification = classify_cell(c, grid.cell_area(), grid, th);
    }
    ex
}

/// Boundary arcs of cross components over α-sides: maximal connected
/// chains of edges between two alive faces lying in two different crosses.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Arc {
    pub side: u32,
    /// The two components, in the order of the side's crosses.
    pub components: [u32; 2],
    pub edges: Vec<u32>,
    pub length: f64,
    /// `V − E` of the arc: 1 for a path, 0 for a closed loop.
    pub euler: i64,
}

pub fn alpha_arcs(paved: &PavedCurve, paving: &Paving, ex: &Extraction) -> Vec<Arc> {
    let mut groups: HashMap<(u32, u32, u32), Vec<u32>> = HashMap::new();
    for (ei, e) in paved.edges.edges.iter().enumerate() {
        if e.is_boundary() {
            continue;
        }
        let (f, g) = (e.faces[0] as usize, e.faces[1] as usize);
        let (cf, cg) = (ex.component_of_face[f], ex.component_of_face[g]);
        if cf == u32::MAX || cg == u32::MAX {
            continue;
        }
        let (Region::Cross(rf), Region::Cross(rg)) = (paving.region_of_face(paved, f), paving.region_of_face(paved, g)) else {
            continue;
        };
        if rf == rg {
            continue;
        }
        let side = paving.side_between(rf, rg).expect("neighboring crosses share a side");
        let (c0, c1) = if paving.alpha_sides[side as usize].crosses[0] == rf { (cf, cg) } else { (cg, cf) };
        groups.entry((side, c0, c1)).or_default().push(ei as u32);
    }
    let mut keys: Vec<_> = groups.keys().copied().collect();
    keys.sort_unstable();
    let mut arcs = Vec::new();
    for key in keys {
        let edges = &groups[&key];
        let mut index: HashMap<u32, usize> = HashMap::new();
        for &ei in edges {
            for v in paved.edges.edges[ei as usize].v {
                let n = index.len();
                index.entry(v).or_insert(n);
            }
        }
        let mut uf = UnionFind::new(index.len());
        for &ei in edges {
            let [a, b] = paved.edges.edges[ei as usize].v;
            uf.union(index[&a], index[&b]);
        }
        let mut by_root: HashMap<usize, Vec<u32>> = HashMap::new();
        for &ei in edges {
            let r = uf.find(index[&paved.edges.edges[ei as usize].v[0]]);
            by_root.entry(r).or_default().push(ei);
        }
        let mut parts: Vec<Vec<u32>> = by_root.into_values().collect();
        parts.sort_unstable();
        for part in parts {
            let mut vs: Vec<u32> = part.iter().flat_map(|&ei| paved.edges.edges[ei as usize].v).collect();
            vs.sort_unstable();
            vs.dedup();
            let length = part
                .iter()
                .map(|&ei| {
                    let [a, b] = paved.edges.edges[ei as usize].v;
                    (paved.mesh.vertices[a as usize].z - paved.mesh.vertices[b as usize].z).norm()
                })
                .sum();
            arcs.push(Arc {
                side: key.0,
                components: [key.1, key.2],
                euler: vs.len() as i64 - part.len() as i64,
                edges: part,
                length,
            });
        }
    }
    arcs
}

fn trace_alpha_arcs(paved: &PavedCurve, paving: &Paving, ex: &mut Extraction) {
    let arcs = alpha_arcs(paved, paving, ex);
    let mut per: HashMap<(u32, u32), (usize, f64)> = HashMap::new();
    for a in &arcs {
        for &c in &a.components {
            let e = per.entry((c, a.side)).or_insert((0, 0.0));
            e.0 += 1;
            e.1 += a.length;
        }
    }
    let mut keys: Vec<_> = per.keys().copied().collect();
    keys.sort_unstable();
    for (c, side) in keys {
        let (arcs, length) = per[&(c, side)];
        ex.components[c as usize].alpha_arcs.push(AlphaTrace { side, arcs, length });
    }
}

/// Outcome of removing the `SMALL` cross components.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PruneReport {
    pub removed_components: usize,
    /// Projected area with multiplicity of the removed components.
    pub removed_mass: f64,
    /// `(4/k)·L_n`.
    pub bound: f64,
    pub within_bound: bool,
}

/// Marks the faces of every `SMALL` cross component dead. Cell components
/// are never touched.
pub fn prune_small(rc: &RegionComponents, alive: &mut [bool], k: usize, boundary_length: f64) -> PruneReport {
    let mut removed = 0;
    let mut mass = 0.0;
    for c in &rc.extraction.components {
        if matches!(c.region, Region::Cross(_)) && c.classification == Classification::Small {
            removed += 1;
            mass += c.projected_area;
            for &f in &c.faces {
                alive[f as usize] = false;
            }
        }
    }
    let bound = 4.0 / k as f64 * boundary_length;
    PruneReport {
        removed_components: removed,
        removed_mass: mass,
        bound,
        within_bound: mass <= bound,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::forge::{self, FamilySpec};
    use crate::mesh::{DiscreteCurve, Point};
    use crate::paving::default_epsilon;
    use num_complex::Complex64;

    const JITTER: (f64, f64) = (0.013, -0.007);

    fn setup(curve: &DiscreteCurve, k: usize, q: usize) -> (PavedCurve, Paving) {
        let mut g = GridSpec::new(k, JITTER, default_epsilon(k)).unwrap();
        g.q_family = q;
        let pc = PavedCurve::new(curve, &g).unwrap();
        (pc, Paving::build(&g))
    }

    fn disk(center: Complex64, w: Complex64, r: f64, n: usize) -> DiscreteCurve {
        let mut v = vec![Point::new(center, w)];
        for i in 0..n {
            let t = std::f64::consts::TAU * i as f64 / n as f64;
            v.push(Point::new(center + Complex64::from_polar(r, t), w));
        }
        let f = (0..n as u32).map(|i| [0, 1 + i, 1 + (i + 1) % n as u32]).collect();
        DiscreteCurve::new(None, v, f).unwrap()
    }

    #[test]
    fn flat_sheet_gives_covering_crosses_and_good_islands() {
        let c = forge::generate(&FamilySpec::flat_sheets(1).with_resolution(0.1)).unwrap();
        for k in [1usize, 2, 4] {
            let (pc, pv) = setup(&c, k, 0);
            let alive = vec![true; pc.mesh.faces.len()];
            let rc = region_components(&pc, &pv, &alive, &Thresholds::default());
            let comps = &rc.extraction.components;
            assert_eq!(comps.len(), 2 * k * k);
            for cp in comps {
                let area = pv.region_area(cp.region);
                assert!(cp.rel_boundary_length == 0.0);
                assert!((cp.projected_area - area).abs() < 1e-12);
                match cp.region {
                    Region::Cross(x) => {
                        assert_eq!(cp.classification, Classification::Covering);
                        if !pv.crosses[x as usize].clipped {
                            assert!((cp.projected_area - 3.0 / (k * k) as f64).abs() < 1e-12);
                        }
                    }
                    Region::Q(_) => assert_eq!(cp.classification, Classification::Island),
                }
                assert_eq!(cp.euler, 1);
            }
        }
    }

    #[test]
    fn branched_cover_matches_the_sheet_oracle() {
        // Branch value inside Q cell (0, 0) for k = 2, off the half-grid lines.
        let k = 2;
        let branch = Complex64::new(-0.71 + JITTER.0, -0.78 + JITTER.1);
        let mut spec = FamilySpec::branched_cover(2).with_resolution(0.03);
        spec.branch = branch;
        let c = forge::generate(&spec).unwrap();
        let (pc, pv) = setup(&c, k, 0);
        let alive = vec![true; pc.mesh.faces.len()];
        let th = Thresholds::default();
        let rc = region_components(&pc, &pv, &alive, &th);
        let total: f64 = rc.extraction.components.iter().map(|c| c.projected_area).sum();
        assert!((total - pc.mesh.projected_area()).abs() < 1e-9 * total);
        for (x, cross) in pv.crosses.iter().enumerate() {
            let (i, j) = cross.center_cell;
            // A cross is simply connected and free of branch values, so
            // its preimage has one component per point of the fiber.
            let sheets = forge::sheet_oracle(&spec, pv.grid.cell_center(i, j)).unwrap().len();
            let mine: Vec<_> = rc
                .extraction
                .components
                .iter()
                .filter(|c| c.region == Region::Cross(x as u32))
                .collect();
            assert_eq!(mine.len(), sheets);
            for cp in mine {
                assert!((cp.projected_area - cross.area).abs() < 1e-9, "{} vs {} at {:?}", cp.projected_area, cross.area, cross.center_cell);
                assert_eq!(cp.classification, Classification::Covering);
            }
        }
        let cells = cell_components(&pc, &pv, &alive, &th);
        let ca = pv.grid.cell_area();
        for (q, &(i, j)) in pv.q_cells.iter().enumerate() {
            let mine: Vec<_> = rc
                .extraction
                .components
                .iter()
                .filter(|c| c.region == Region::Q(q as u32))
                .collect();
            if (i, j) == (0, 0) {
                assert_eq!(mine.len(), 1);
                assert_eq!(mine[0].classification, Classification::RamifiedIsland);
                assert!((mine[0].degree(ca) - 2.0).abs() < 1e-9);
            } else {
                assert_eq!(mine.len(), 2);
                for cp in mine {
                    assert_eq!(cp.classification, Classification::Island);
                    assert!((cp.degree(ca) - 1.0).abs() < 1e-9);
                }
            }
        }
        let ramified = cells
            .components
            .iter()
            .filter(|c| c.classification == Classification::RamifiedIsland)
            .count();
        assert_eq!(ramified, 1);
        assert_eq!(cells.components.len(), 2 * 16 - 1);
    }

    #[test]
    fn region_without_curve_has_no_components() {
        let spec = FamilySpec::flat_sheets(1)
            .with_resolution(0.1)
            .with_domain(forge::Domain::Rect { x0: -1.05, x1: -0.2, y0: -1.05, y1: 1.05 });
        let c = forge::generate(&spec).unwrap();
        let (pc, pv) = setup(&c, 2, 0);
        let alive = vec![true; pc.mesh.faces.len()];
        let rc = region_components(&pc, &pv, &alive, &Thresholds::default());
        let right = pv.crosses.iter().position(|x| x.center_cell.0 == 3).unwrap() as u32;
        assert!(rc.extraction.components.iter().all(|c| c.region != Region::Cross(right)));
        // Components reaching x = -0.2 have relative boundary there.
        assert!(rc.extraction.components.iter().any(|c| c.rel_boundary_length > 0.1));
    }

    #[test]
    fn classification_thresholds() {
        let g = GridSpec::new(4, (0.0, 0.0), default_epsilon(4)).unwrap();
        let k = 4.0;
        let eps = g.epsilon_k;
        let mk = |l: f64, a: f64| FiberComponent {
            region: Region::Cross(0),
            cell: None,
            faces: vec![],
            rel_boundary_length: l,
            projected_area: a,
            signed_projected_area: a,
            euler: 1,
            classification: Classification::Other,
            critical_point: false,
            alpha_arcs: vec![],
        };
        let area = 3.0 / (k * k);
        assert_eq!(classify_cross(&mk(0.0, area), area, &g), Classification::Covering);
        assert_eq!(classify_cross(&mk(2.0 * eps / k, 0.0), area, &g), Classification::LongBoundary);
        assert_eq!(classify_cross(&mk(2.0 * eps / k, area), area, &g), Classification::LongBoundary);
        let l = eps / (2.0 * k);
        assert_eq!(classify_cross(&mk(l, l * l), area, &g), Classification::Small);
        assert_eq!(classify_cross(&mk(l, 0.3 * area), area, &g), Classification::Other);
    }

    #[test]
    fn small_bubbles_are_pruned_over_crosses_only() {
        let k = 2;
        let sheet = forge::generate(&FamilySpec::flat_sheets(1).with_resolution(0.1)).unwrap();
        let g = GridSpec::new(k, JITTER, default_epsilon(k)).unwrap();
        // Cell (1, 1) is a cross center and cell (0, 0) a Q cell for q = 0.
        let over_cross = disk(g.cell_center(1, 1), Complex64::new(0.5, 0.0), 0.01, 16);
        let over_q = disk(g.cell_center(0, 0), Complex64::new(0.5, 0.0), 0.01, 16);
        let bubble_len = over_cross.stats().boundary_length;
        let c = sheet.union(&over_cross).union(&over_q);
        let (pc, pv) = setup(&c, k, 0);
        let mut alive = vec![true; pc.mesh.faces.len()];
        let rc = region_components(&pc, &pv, &alive, &Thresholds::default());
        let l_n = c.stats().boundary_length;
        let rep = prune_small(&rc, &mut alive, k, l_n);
        assert_eq!(rep.removed_components, 1);
        assert!((rep.removed_mass - over_cross.projected_area()).abs() < 1e-12);
        assert!(rep.removed_mass < 4.0 / k as f64 * bubble_len);
        assert!(rep.within_bound);
        let after = region_components(&pc, &pv, &alive, &Thresholds::default());
        let q_bubbles = after
            .extraction
            .components
            .iter()
            .filter(|c| matches!(c.region, Region::Q(_)) && c.classification == Classification::NonIsland)
            .count();
        assert_eq!(q_bubbles, 1);
        let none = prune_small(&after, &mut alive, k, l_n);
        assert_eq!(none.removed_components, 0);
    }

    #[test]
    fn alpha_arcs_of_a_flat_sheet() {
        let c = forge::generate(&FamilySpec::flat_sheets(1).with_resolution(0.1)).unwrap();
        let k = 3;
        let (pc, pv) = setup(&c, k, 1);
        let alive = vec![true; pc.mesh.faces.len()];
        let rc = region_components(&pc, &pv, &alive, &Thresholds::default());
        let arcs = alpha_arcs(&pc, &pv, &rc.extraction);
        assert_eq!(arcs.len(), pv.alpha_sides.len());
        for a in &arcs {
            assert_eq!(a.euler, 1);
            assert!((a.length - 1.0 / k as f64).abs() < 1e-12);
        }
        for cp in rc.extraction.components.iter().filter(|c| matches!(c.region, Region::Cross(_))) {
            let Region::Cross(x) = cp.region else { unreachable!() };
            assert_eq!(cp.alpha_arcs.len(), pv.crosses[x as usize].alpha_sides.len());
        }
    }
}
