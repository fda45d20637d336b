//! The counting graph over crosses, covering statistics, and the chain of
//! inequalities bounding the number of islands from below.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fibers::{self, Arc, Classification, Extraction, FiberComponent};
use crate::mesh;
use crate::paving::{Paving, PavedCurve, Region};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GraphEdge {
    pub side: u32,
    /// Graph vertices (indices into `CountingGraph::vertices`).
    pub ends: [u32; 2],
    pub length: f64,
    /// False when the arc is a closed loop.
    pub open: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CountingGraph {
    /// Component index (in the region extraction) of each vertex.
    pub vertices: Vec<u32>,
    pub vertex_cross: Vec<u32>,
    pub vertex_euler: Vec<i64>,
    pub edges: Vec<GraphEdge>,
    pub valences: Vec<usize>,
    /// `s`.
    pub vertex_count: usize,
    /// `a`.
    pub edge_count: usize,
    /// `Σ χ(Σ) − Σ χ(arc)`; equals `Σ χ(Σ) − a` when no arc is closed.
    pub euler_outside_q: i64,
    /// `χ` of the cross part of the curve, counted on the mesh.
    pub euler_outside_q_mesh: i64,
    pub closed_arcs: usize,
}

impl CountingGraph {
    pub fn handshake_holds(&self) -> bool {
        self.valences.iter().sum::<usize>() == 2 * self.edge_count
    }

    pub fn euler_agrees(&self) -> bool {
        self.euler_outside_q == self.euler_outside_q_mesh
    }
}

/// One vertex per alive cross component, one edge per boundary arc over
/// an α-side. Fails if an arc does not lie on its side.
pub fn build_graph(paved: &PavedCurve, paving: &Paving, ex: &Extraction, arcs: &[Arc]) -> Result<CountingGraph> {
    let mut vertex_of = vec![u32::MAX; ex.components.len()];
    let mut vertices = Vec::new();
    let mut vertex_cross = Vec::new();
    let mut vertex_euler = Vec::new();
    for (i, c) in ex.components.iter().enumerate() {
        if let Region::Cross(x) = c.region {
            vertex_of[i] = vertices.len() as u32;
            vertices.push(i as u32);
            vertex_cross.push(x);
            vertex_euler.push(c.euler);
        }
    }
    let tol = 1e-7 / paving.grid.k as f64;
    let mut edges = Vec::with_capacity(arcs.len());
    let mut valences = vec![0usize; vertices.len()];
    let mut closed = 0;
    let mut arc_euler = 0i64;
    for arc in arcs {
        let side = &paving.alpha_sides[arc.side as usize];
        for &ei in &arc.edges {
            for v in paved.edges.edges[ei as usize].v {
                let z = paved.mesh.vertices[v as usize].z;
                let (across, along) = if side.vertical { (z.re, z.im) } else { (z.im, z.re) };
                if (across - side.coord).abs() > tol || along < side.span.0 - tol || along > side.span.1 + tol {
                    return Err(Error::UnmatchedArc(side.crosses[0] as usize, side.crosses[1] as usize));
                }
            }
        }
        let ends = arc.components.map(|c| vertex_of[c as usize]);
        if ends.contains(&u32::MAX) {
            return Err(Error::UnmatchedArc(side.crosses[0] as usize, side.crosses[1] as usize));
        }
        valences[ends[0] as usize] += 1;
        valences[ends[1] as usize] += 1;
        if arc.euler == 0 {
            closed += 1;
        }
        arc_euler += arc.euler;
        edges.push(GraphEdge {
            side: arc.side,
            ends,
            length: arc.length,
            open: arc.euler != 0,
        });
    }
    let label: Vec<u32> = ex
        .component_of_face
        .iter()
        .map(|&c| if c != u32::MAX && vertex_of[c as usize] != u32::MAX { 0 } else { u32::MAX })
        .collect();
    let mesh_chi = mesh::euler_by_label(&paved.mesh.faces, &paved.edges, &label, 1)[0];
    let n = vertices.len();
    let m = edges.len();
    Ok(CountingGraph {
        euler_outside_q: vertex_euler.iter().sum::<i64>() - arc_euler,
        vertices,
        vertex_cross,
        vertex_euler,
        edges,
        valences,
        vertex_count: n,
        edge_count: m,
        euler_outside_q_mesh: mesh_chi,
        closed_arcs: closed,
    })
}

/// Covering statistics of a cross component for `f = kπ`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoveringStats {
    pub component: u32,
    pub cross: u32,
    /// `S = a(Σ) / area(cross)`.
    pub mean_sheets: f64,
    /// `L = k·l(Σ)`.
    pub rel_boundary: f64,
    /// `S(α_i)`: projected length of `Σ` over each α-side divided by `1/k`.
    pub arc_sheets: Vec<(u32, f64)>,
    /// Number of boundary arcs of `Σ` over each α-side.
    pub arc_counts: Vec<(u32, usize)>,
    /// `max_i |S − S(α_i)|`.
    pub max_deviation: f64,
}

/// Statistics for every alive component over an unclipped cross.
pub fn ahlfors_stats(paved: &PavedCurve, paving: &Paving, ex: &Extraction) -> Vec<CoveringStats> {
    let grid = &paving.grid;
    let k = grid.k as f64;
    let tol = 1e-7 / k;
    let ns = grid.subcells_per_side() as isize;
    let mut over_side: Vec<std::collections::HashMap<u32, f64>> = vec![Default::default(); ex.components.len()];
    for (f, &c) in ex.component_of_face.iter().enumerate() {
        if c == u32::MAX {
            continue;
        }
        let Region::Cross(x) = paving.region_of_face(paved, f) else {
            continue;
        };
        for &ei in &paved.edges.face_edges[f] {
            let e = &paved.edges.edges[ei as usize];
            let Some((da, db)) = fibers::on_side(e, paved, f, grid, tol) else {
                continue;
            };
            let (a, b) = paved.subcell[f];
            let (na, nb) = (a as isize + da, b as isize + db);
            if na < 0 || nb < 0 || na >= ns || nb >= ns {
                continue;
            }
            let Region::Cross(y) = paving.region_of_subcell(na as usize, nb as usize) else {
                continue;
            };
            if y == x {
                continue;
            }
            if let Some(side) = paving.side_between(x, y) {
                let [p, q] = e.v.map(|v| paved.mesh.vertices[v as usize].z);
                *over_side[c as usize].entry(side).or_insert(0.0) += (p - q).norm();
            }
        }
    }
    let mut out = Vec::new();
    for (i, comp) in ex.components.iter().enumerate() {
        let Region::Cross(x) = comp.region else {
            continue;
        };
        let cross = &paving.crosses[x as usize];
        if cross.clipped {
            continue;
        }
        let s = comp.projected_area / cross.area;
        let arc_sheets: Vec<(u32, f64)> = cross
            .alpha_sides
            .iter()
            .map(|&side| (side, over_side[i].get(&side).copied().unwrap_or(0.0) * k))
            .collect();
        let arc_counts = cross
            .alpha_sides
            .iter()
            .map(|&side| {
                let n = comp.alpha_arcs.iter().find(|t| t.side == side).map_or(0, |t| t.arcs);
                (side, n)
            })
            .collect();
        let max_deviation = arc_sheets.iter().map(|&(_, v)| (s - v).abs()).fold(0.0, f64::max);
        out.push(CoveringStats {
            component: i as u32,
            cross: x,
            mean_sheets: s,
            rel_boundary: k * comp.rel_boundary_length,
            arc_sheets,
            arc_counts,
            max_deviation,
        });
    }
    out
}

/// Ratio `|S − S(α_i)| / L` over components with `L > floor`, times 1.5;
/// `default` when no component has enough boundary.
pub fn calibrate_h(corpus: &[CoveringStats], floor: f64, default: f64) -> f64 {
    let worst = corpus
        .iter()
        .filter(|c| c.rel_boundary > floor)
        .map(|c| c.max_deviation / c.rel_boundary)
        .fold(None, |m: Option<f64>, r| Some(m.map_or(r, |m| m.max(r))));
    worst.map_or(default, |w| 1.5 * w)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub chi_curve: i64,
    pub chi_outside_q: i64,
    pub islands: usize,
    pub vertex_count: usize,
    pub edge_count: usize,
    /// `χ(C_n − π⁻¹Q) − (χ(C_n) − #islands)`.
    pub slack_islands: i64,
    /// `(s − a) − χ(C_n − π⁻¹Q)`.
    pub slack_graph: i64,
    /// `#islands − (χ(C_n) + a − s)`.
    pub slack_bound: i64,
    pub holds: bool,
}

/// The three inequalities of the counting chain on measured quantities.
pub fn island_lower_bound(graph: &CountingGraph, chi_curve: i64, islands: usize) -> BoundReport {
    let s = graph.vertex_count as i64;
    let a = graph.edge_count as i64;
    let chi_x = graph.euler_outside_q_mesh;
    let i = islands as i64;
    let slack_islands = chi_x - (chi_curve - i);
    let slack_graph = (s - a) - chi_x;
    let slack_bound = i - (chi_curve + a - s);
    BoundReport {
        chi_curve,
        chi_outside_q: chi_x,
        islands,
        vertex_count: graph.vertex_count,
        edge_count: graph.edge_count,
        slack_islands,
        slack_graph,
        slack_bound,
        holds: slack_islands >= 0 && slack_graph >= 0 && slack_bound >= 0,
    }
}

/// `χ` of all alive faces, and the number of islands over `Q`.
pub fn curve_euler_and_islands(paved: &PavedCurve, ex: &Extraction) -> (i64, usize) {
    let label: Vec<u32> = ex
        .component_of_face
        .iter()
        .map(|&c| if c == u32::MAX { u32::MAX } else { 0 })
        .collect();
    let chi = mesh::euler_by_label(&paved.mesh.faces, &paved.edges, &label, 1)[0];
    let islands = ex
        .components
        .iter()
        .filter(|c| {
            matches!(c.region, Region::Q(_))
                && matches!(c.classification, Classification::Island | Classification::RamifiedIsland)
        })
        .count();
    (chi, islands)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ValenceViolation {
    pub valence: usize,
    pub stats: CoveringStats,
    pub component: FiberComponent,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ValenceReport {
    pub h: f64,
    pub checked_vertices: usize,
    pub excluded_clipped_vertices: usize,
    pub violations: Vec<ValenceViolation>,
    /// Whether `|S − S(α_i)| ≤ h·L` held for every checked component.
    pub ahlfors_holds: bool,
    /// `Σ ν` over unclipped vertices.
    pub valence_sum: usize,
    /// `4·Σ S − 4hk·L_n` over unclipped vertices.
    pub aggregate_rhs: f64,
    pub aggregate_holds: bool,
    /// Mean sheet number over the unclipped crosses.
    pub sheet_number_outside_q: f64,
    /// Mean sheet number over all of `C − Q`.
    pub sheet_number_outside_q_all: f64,
    pub vertex_bound: f64,
    pub vertex_bound_holds: bool,
}

pub fn valence_bound_check(
    graph: &CountingGraph,
    stats: &[CoveringStats],
    ex: &Extraction,
    paving: &Paving,
    h: f64,
    boundary_length: f64,
) -> ValenceReport {
    let grid = &paving.grid;
    let k = grid.k as f64;
    let eps = grid.epsilon_k;
    let mut vertex_of = std::collections::HashMap::new();
    for (v, &c) in graph.vertices.iter().enumerate() {
        vertex_of.insert(c, v);
    }
    let mut violations = Vec::new();
    let mut ahlfors_holds = true;
    let mut valence_sum = 0;
    let mut s_sum = 0.0;
    for st in stats {
        let Some(&v) = vertex_of.get(&st.component) else {
            continue;
        };
        let nu = graph.valences[v];
        valence_sum += nu;
        s_sum += st.mean_sheets;
        if st.max_deviation > h * st.rel_boundary + 1e-9 {
            ahlfors_holds = false;
        }
        let l = st.rel_boundary / k;
        if (nu as f64) < 4.0 * st.mean_sheets - 4.0 * h * k * l - 1e-9 {
            violations.push(ValenceViolation {
                valence: nu,
                stats: st.clone(),
                component: ex.components[st.component as usize].clone(),
            });
        }
    }
    let checked = stats.iter().filter(|s| vertex_of.contains_key(&s.component)).count();
    let aggregate_rhs = 4.0 * s_sum - 4.0 * h * k * boundary_length;
    let unclipped_area: f64 = paving.crosses.iter().filter(|c| !c.clipped).map(|c| c.area).sum();
    let unclipped_mass: f64 = stats.iter().map(|s| s.mean_sheets * paving.crosses[s.cross as usize].area).sum();
    let all_mass: f64 = ex
        .components
        .iter()
        .filter(|c| matches!(c.region, Region::Cross(_)))
        .map(|c| c.projected_area)
        .sum();
    let outside_q_area: f64 = paving.crosses.iter().map(|c| c.area).sum();
    let sn = if unclipped_area > 0.0 { unclipped_mass / unclipped_area } else { 0.0 };
    let sn_all = all_mass / outside_q_area;
    let vertex_bound = sn_all * k * k * (1.0 + eps) + k / eps * boundary_length;
    ValenceReport {
        h,
        checked_vertices: checked,
        excluded_clipped_vertices: graph.vertex_count - checked,
        violations,
        ahlfors_holds,
        valence_sum,
        aggregate_rhs,
        aggregate_holds: valence_sum as f64 >= aggregate_rhs - 1e-9,
        sheet_number_outside_q: sn,
        sheet_number_outside_q_all: sn_all,
        vertex_bound,
        vertex_bound_holds: graph.vertex_count as f64 <= vertex_bound + 1e-9,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fibers::{alpha_arcs, region_components, Thresholds};
    use crate::forge::{self, FamilySpec};
    use crate::mesh::DiscreteCurve;
    use crate::paving::{default_epsilon, GridSpec};
    use proptest::prelude::*;

    const JITTER: (f64, f64) = (0.013, -0.007);

    struct Run {
        graph: CountingGraph,
        stats: Vec<CoveringStats>,
        bound: BoundReport,
        valence: ValenceReport,
    }

    fn run(curve: &DiscreteCurve, k: usize, q: usize, h: f64) -> Run {
        let mut g = GridSpec::new(k, JITTER, default_epsilon(k)).unwrap();
        g.q_family = q;
        let pc = PavedCurve::new(curve, &g).unwrap();
        let pv = Paving::build(&g);
        let alive = vec![true; pc.mesh.faces.len()];
        let rc = region_components(&pc, &pv, &alive, &Thresholds::default());
        let ex = &rc.extraction;
        let arcs = alpha_arcs(&pc, &pv, ex);
        let graph = build_graph(&pc, &pv, ex, &arcs).unwrap();
        let stats = ahlfors_stats(&pc, &pv, ex);
        let (chi, islands) = curve_euler_and_islands(&pc, ex);
        let bound = island_lower_bound(&graph, chi, islands);
        let valence = valence_bound_check(&graph, &stats, ex, &pv, h, curve.stats().boundary_length);
        Run { graph, stats, bound, valence }
    }

    /// Cross lattice of a full sheet: `c` centers per side in a grid, so
    /// `s = c²` and `a = 2c(c − 1)`.
    fn lattice_oracle(k: usize) -> (usize, usize) {
        let c = k;
        (c * c, 2 * c * (c - 1))
    }

    #[test]
    fn flat_sheet_graph_is_the_cross_lattice() {
        let c = forge::generate(&FamilySpec::flat_sheets(1).with_resolution(0.1)).unwrap();
        let r = run(&c, 4, 0, 1.0);
        assert_eq!(r.graph.vertex_count, 16);
        assert_eq!(r.graph.edge_count, 24);
        assert_eq!(r.graph.euler_outside_q, -8);
        assert!(r.graph.euler_agrees());
        assert!(r.graph.handshake_holds());
        assert_eq!(r.bound.islands, 16);
        assert_eq!(r.bound.chi_curve, 1);
        assert!(r.bound.holds);
        assert_eq!(r.bound.slack_graph, 0);
    }

    #[test]
    fn flat_sheets_scale_with_sheet_count() {
        for m in 1..=3 {
            let c = forge::generate(&FamilySpec::flat_sheets(m).with_resolution(0.12)).unwrap();
            for k in [2usize, 3] {
                let r = run(&c, k, 0, 1.0);
                let (s, a) = lattice_oracle(k);
                assert_eq!(r.graph.vertex_count, m * s);
                assert_eq!(r.graph.edge_count, m * a);
                assert!(r.graph.euler_agrees());
                assert!(r.bound.holds);
                assert!(r.valence.violations.is_empty());
                assert!(r.valence.aggregate_holds);
            }
        }
    }

    #[test]
    fn unclipped_components_of_a_sheet_are_exact_covers() {
        let c = forge::generate(&FamilySpec::flat_sheets(2).with_resolution(0.1)).unwrap();
        let r = run(&c, 3, 1, 1.0);
        assert!(!r.stats.is_empty());
        for st in &r.stats {
            assert!((st.mean_sheets - 1.0).abs() < 1e-9);
            assert_eq!(st.rel_boundary, 0.0);
            for &(_, v) in &st.arc_sheets {
                assert!((v - 1.0).abs() < 1e-9, "{v}");
            }
            for &(_, n) in &st.arc_counts {
                assert_eq!(n, 1);
            }
        }
        assert!(r.valence.ahlfors_holds);
    }

    #[test]
    fn branched_cover_satisfies_the_chain() {
        let spec = FamilySpec::branched_cover(2).with_resolution(0.03);
        let c = forge::generate(&spec).unwrap();
        for (k, q) in [(2usize, 0usize), (3, 2)] {
            let r = run(&c, k, q, 1.0);
            assert!(r.graph.handshake_holds());
            assert!(r.graph.euler_agrees());
            assert!(r.bound.holds, "{:?}", r.bound);
            // A cover of degree S with no relative boundary has one arc per
            // sheet over each of its four sides.
            for st in r.stats.iter().filter(|s| s.rel_boundary == 0.0) {
                let v = r.graph.vertices.iter().position(|&c| c == st.component).unwrap();
                assert_eq!(r.graph.valences[v] as f64, 4.0 * st.mean_sheets.round());
                assert!((st.mean_sheets - st.mean_sheets.round()).abs() < 1e-6);
            }
            assert!(r.valence.violations.is_empty());
        }
    }

    #[test]
    fn half_sheet_deviation_is_controlled_by_boundary() {
        // A sheet over x < cut: components over crosses meeting the cut are
        // partial covers with boundary on the cut.
        let mut spec = FamilySpec::flat_sheets(1).with_resolution(0.05);
        spec.domain = forge::Domain::Rect { x0: -1.05, x1: 0.1, y0: -1.05, y1: 1.05 };
        let c = forge::generate(&spec).unwrap();
        let r = run(&c, 2, 0, 1.0);
        let partial: Vec<_> = r.stats.iter().filter(|s| s.rel_boundary > 0.0).collect();
        for st in &partial {
            assert!(st.mean_sheets < 1.0);
            // Deviation from any side is at most one sheet, and each partial
            // component has boundary of relative length at least the cut span.
            assert!(st.max_deviation <= 1.0 + 1e-9);
        }
        let h = calibrate_h(&r.stats, 1e-6, 1.0);
        for st in &partial {
            assert!(st.max_deviation <= h * st.rel_boundary + 1e-12);
        }
        assert!(r.bound.holds);
    }

    #[test]
    fn calibrate_defaults_without_boundary() {
        let c = forge::generate(&FamilySpec::flat_sheets(1).with_resolution(0.1)).unwrap();
        let r = run(&c, 2, 0, 1.0);
        assert_eq!(calibrate_h(&r.stats, 1e-6, 1.0), 1.0);
        assert_eq!(calibrate_h(&[], 1e-6, 0.7), 0.7);
    }

    fn stat(dev: f64, l: f64) -> CoveringStats {
        CoveringStats {
            component: 0,
            cross: 0,
            mean_sheets: 1.0,
            rel_boundary: l,
            arc_sheets: vec![],
            arc_counts: vec![],
            max_deviation: dev,
        }
    }

    proptest! {
        #[test]
        fn calibrated_h_is_monotone(
            base in prop::collection::vec((0.0f64..2.0, 1e-3f64..5.0), 1..8),
            extra in prop::collection::vec((0.0f64..2.0, 1e-3f64..5.0), 0..8),
        ) {
            let a: Vec<_> = base.iter().map(|&(d, l)| stat(d, l)).collect();
            let mut b = a.clone();
            b.extend(extra.iter().map(|&(d, l)| stat(d, l)));
            let ha = calibrate_h(&a, 1e-6, 1.0);
            let hb = calibrate_h(&b, 1e-6, 1.0);
            prop_assert!(hb >= ha);
            for s in &a {
                prop_assert!(s.max_deviation <= ha * s.rel_boundary);
            }
        }
    }
}
