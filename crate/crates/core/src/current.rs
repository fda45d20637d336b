//! The laminated current assembled from good islands, its pairing with
//! pulled-back test functions, and the laminarity defect.

use std::collections::HashMap;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fibers::{Classification, Extraction};
use crate::paving::{GridSpec, PavedCurve};

/// Relative tolerance on the degree of a good island.
const DEGREE_TOL: f64 = 1e-6;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Patch {
    pub cell: (usize, usize),
    pub family: usize,
    /// Faces of the paved curve.
    pub faces: Vec<u32>,
    pub projected_area: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CurrentApprox {
    pub k: usize,
    pub grid: GridSpec,
    /// `1 / A_n`.
    pub weight: f64,
    pub patches: Vec<Patch>,
    pub ramified_count: usize,
    /// Mass of `T_{k,n}` against `π*ω`.
    pub mass_pi_omega: f64,
    /// Mass of `T_n` against `π*ω`, over `C`.
    pub mass_curve: f64,
    pub defect: f64,
    /// Sampled base points with the transverse mass of their fiber.
    pub transverse_counts: Vec<(Complex64, f64)>,
}

impl CurrentApprox {
    pub fn good_island_count(&self) -> usize {
        self.patches.len()
    }

    /// `mass(T_{k,n}) / mass(T_n)`, 0 for an empty curve.
    pub fn mass_fraction(&self) -> f64 {
        if self.mass_curve > 0.0 {
            self.mass_pi_omega / self.mass_curve
        } else {
            0.0
        }
    }
}

/// Builds `T_{k,n}` from the good islands among the cell components.
/// `curve_area` is `A_n`.
pub fn assemble(paved: &PavedCurve, grid: &GridSpec, cells: &Extraction, curve_area: f64) -> Result<CurrentApprox> {
    if !(curve_area > 0.0) {
        return Err(Error::EmptyCurve);
    }
    let weight = 1.0 / curve_area;
    let cell_area = grid.cell_area();
    let mut patches = Vec::new();
    let mut ramified = 0;
    for c in &cells.components {
        match c.classification {
            Classification::Island => {}
            Classification::RamifiedIsland => {
                ramified += 1;
                continue;
            }
            _ => continue,
        }
        let cell = c.cell.expect("cell component");
        let deg = c.degree(cell_area);
        if (deg - 1.0).abs() > DEGREE_TOL || c.critical_point {
            return Err(Error::NonGraphPatch(cell.0, cell.1, deg));
        }
        patches.push(Patch {
            cell,
            family: GridSpec::family_of(cell.0, cell.1),
            faces: c.faces.clone(),
            projected_area: c.projected_area,
        });
    }
    let mass_pi_omega = weight * patches.iter().map(|p| p.projected_area).sum::<f64>();
    let mass_curve = evaluate_curve(paved, weight, |_| 1.0);
    Ok(CurrentApprox {
        k: grid.k,
        grid: grid.clone(),
        weight,
        patches,
        ramified_count: ramified,
        mass_pi_omega,
        mass_curve,
        defect: mass_curve - mass_pi_omega,
        transverse_counts: Vec::new(),
    })
}

fn face_term(paved: &PavedCurve, f: usize, form: &impl Fn(Complex64) -> f64) -> f64 {
    form(paved.mesh.face_centroid(f).z) * paved.mesh.face_projected_signed_area(f).abs()
}

/// `∫ T_n ∧ π*(φ ω)` over `C`.
pub fn evaluate_curve(paved: &PavedCurve, weight: f64, form: impl Fn(Complex64) -> f64) -> f64 {
    weight * (0..paved.mesh.faces.len()).map(|f| face_term(paved, f, &form)).sum::<f64>()
}

/// `∫ T_{k,n} ∧ π*(φ ω)`.
pub fn evaluate(current: &CurrentApprox, paved: &PavedCurve, form: impl Fn(Complex64) -> f64) -> f64 {
    let s: f64 = current
        .patches
        .iter()
        .flat_map(|p| p.faces.iter())
        .map(|&f| face_term(paved, f as usize, &form))
        .sum();
    current.weight * s
}

/// Weight times the number of patches over `z`.
pub fn transversal_measure(current: &CurrentApprox, z: Complex64) -> Result<f64> {
    let g = &current.grid;
    let side = g.cell_side();
    let tol = 1e-9 * side;
    let x = (z.re - g.x_line(0)) / side;
    let y = (z.im - g.y_line(0)) / side;
    let n = g.cells_per_side() as f64;
    let near_line = |t: f64| (t - t.round()).abs() * side <= tol;
    if x < 0.0 || y < 0.0 || x > n || y > n || near_line(x) || near_line(y) {
        return Err(Error::BaseOnCellBoundary(format!("({}, {})", z.re, z.im)));
    }
    let cell = (x as usize, y as usize);
    let count = current.patches.iter().filter(|p| p.cell == cell).count();
    Ok(count as f64 * current.weight)
}

/// Fills `transverse_counts` at `samples` random interior points.
pub fn sample_transverse(current: &mut CurrentApprox, samples: usize, seed: u64) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let g = current.grid.clone();
    let (x0, y0) = (g.x_line(0), g.y_line(0));
    let span = 2.0;
    let mut out = Vec::with_capacity(samples);
    while out.len() < samples {
        let z = Complex64::new(x0 + span * rng.gen::<f64>(), y0 + span * rng.gen::<f64>());
        if let Ok(m) = transversal_measure(current, z) {
            out.push((z, m));
        }
    }
    current.transverse_counts = out;
}

/// Patches over the same cell share no face.
pub fn patches_disjoint(current: &CurrentApprox) -> bool {
    let mut seen = std::collections::HashSet::new();
    for p in &current.patches {
        for &f in &p.faces {
            if !seen.insert(f) {
                return false;
            }
        }
    }
    true
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RefinementReport {
    pub coarse_k: usize,
    pub fine_k: usize,
    /// Fine patches lying in some coarse patch.
    pub nested: usize,
    /// Fine patches meeting no coarse patch.
    pub free: usize,
}

/// Checks that every patch at the finer scale that meets a patch at the
/// coarser scale lies inside it. Faces are matched through their parent
/// face in the uncut curve and the coarse sub-cell under their centroid.
pub fn check_refinement(
    coarse: &CurrentApprox,
    coarse_paved: &PavedCurve,
    fine: &CurrentApprox,
    fine_paved: &PavedCurve,
) -> Result<RefinementReport> {
    let g = &coarse.grid;
    let mut patch_of: HashMap<(u32, (u16, u16)), usize> = HashMap::new();
    for (i, p) in coarse.patches.iter().enumerate() {
        for &f in &p.faces {
            patch_of.insert((coarse_paved.parent[f as usize], coarse_paved.subcell[f as usize]), i);
        }
    }
    let mut report = RefinementReport {
        coarse_k: coarse.k,
        fine_k: fine.k,
        nested: 0,
        free: 0,
    };
    for p in &fine.patches {
        let mut hit: Option<Option<usize>> = None;
        for &f in &p.faces {
            let z = fine_paved.mesh.face_centroid(f as usize).z;
            let sub = g
                .subcell_of(z)
                .map(|(a, b)| (a as u16, b as u16))
                .ok_or(Error::IncompatiblePatch(p.cell.0, p.cell.1, fine.k))?;
            let found = patch_of.get(&(fine_paved.parent[f as usize], sub)).copied();
            match hit {
                None => hit = Some(found),
                Some(prev) if prev != found => {
                    return Err(Error::IncompatiblePatch(p.cell.0, p.cell.1, fine.k))
                }
                _ => {}
            }
        }
        match hit.flatten() {
            Some(_) => report.nested += 1,
            None => report.free += 1,
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fibers::{cell_components, Thresholds};
    use crate::forge::{self, FamilySpec};
    use crate::mesh::{DiscreteCurve, Point};
    use crate::paving::{default_epsilon, Paving};
    use proptest::prelude::*;

    const JITTER: (f64, f64) = (0.013, -0.007);

    fn current_at(curve: &DiscreteCurve, k: usize) -> (PavedCurve, CurrentApprox) {
        let g = GridSpec::new(k, JITTER, default_epsilon(k)).unwrap();
        let pc = PavedCurve::new(curve, &g).unwrap();
        let pv = Paving::build(&g);
        let alive = vec![true; pc.mesh.faces.len()];
        let cells = cell_components(&pc, &pv, &alive, &Thresholds::default());
        let cur = assemble(&pc, &g, &cells, curve.area()).unwrap();
        (pc, cur)
    }

    fn interior_point(g: &GridSpec, i: usize, j: usize) -> Complex64 {
        g.cell_center(i, j) + Complex64::new(0.17, 0.29) * g.cell_side()
    }

    #[test]
    fn flat_sheets_have_no_defect() {
        for m in [1usize, 3] {
            let c = forge::generate(&FamilySpec::flat_sheets(m).with_resolution(0.1)).unwrap();
            for k in [2usize, 4] {
                let (pc, cur) = current_at(&c, k);
                assert_eq!(cur.good_island_count(), 4 * k * k * m);
                assert!(cur.defect.abs() <= 1e-9 * cur.mass_curve);
                assert!(patches_disjoint(&cur));
                // Mass against 1 is m·area(C)/A_n with A_n = m·2.1².
                let oracle = 4.0 / (2.1 * 2.1);
                assert!((cur.mass_pi_omega - oracle).abs() < 1e-9);
                assert!((evaluate(&cur, &pc, |_| 1.0) - cur.mass_pi_omega).abs() < 1e-12);
                assert_eq!(evaluate(&cur, &pc, |_| 0.0), 0.0);
                let g = &cur.grid;
                let z = interior_point(g, 1, 2);
                assert!((transversal_measure(&cur, z).unwrap() - m as f64 * cur.weight).abs() < 1e-15);
                // Indicator of one cell: m patches of area 1/k² each.
                let ind = |w: Complex64| if g.cell_of(w) == Some((1, 2)) { 1.0 } else { 0.0 };
                let want = m as f64 * g.cell_area() * cur.weight;
                assert!((evaluate(&cur, &pc, ind) - want).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn branched_cover_loses_only_the_branch_cell() {
        let c = forge::generate(&FamilySpec::branched_cover(2).with_resolution(0.03)).unwrap();
        let k = 8;
        let (_, cur) = current_at(&c, k);
        let g = &cur.grid;
        let branch_cell = g.cell_of(Complex64::new(0.0, 0.0)).unwrap();
        let n = g.cells_per_side();
        assert_eq!(cur.good_island_count(), 2 * (n * n - 1));
        assert_eq!(cur.ramified_count, 1);
        let oracle = cur.weight * 2.0 * g.cell_area();
        assert!((cur.defect - oracle).abs() < 1e-6 * oracle, "{} vs {oracle}", cur.defect);
        for (i, j) in [(0, 0), (3, 11), (15, 15)] {
            assert_ne!((i, j), branch_cell);
            let m = transversal_measure(&cur, interior_point(g, i, j)).unwrap();
            assert!((m - 2.0 * cur.weight).abs() < 1e-15);
        }
        let m = transversal_measure(&cur, interior_point(g, branch_cell.0, branch_cell.1)).unwrap();
        assert_eq!(m, 0.0);
    }

    #[test]
    fn no_islands_means_zero_current() {
        // A small disk inside one cell: its boundary is relative boundary.
        let z0 = Complex64::new(0.3, 0.3);
        let mut v = vec![Point::new(z0, Complex64::new(0.0, 0.0))];
        for i in 0..12 {
            let t = std::f64::consts::TAU * i as f64 / 12.0;
            v.push(Point::new(z0 + Complex64::from_polar(0.05, t), Complex64::new(0.0, 0.0)));
        }
        let f = (0..12u32).map(|i| [0, 1 + i, 1 + (i + 1) % 12]).collect();
        let c = DiscreteCurve::new(None, v, f).unwrap();
        let (_, cur) = current_at(&c, 2);
        assert_eq!(cur.good_island_count(), 0);
        assert_eq!(cur.mass_pi_omega, 0.0);
        assert!((cur.defect - cur.mass_curve).abs() < 1e-15);
        assert!(cur.mass_curve > 0.0);
    }

    #[test]
    fn base_points_on_cell_sides_are_rejected() {
        let c = forge::generate(&FamilySpec::flat_sheets(1).with_resolution(0.2)).unwrap();
        let (_, cur) = current_at(&c, 2);
        let g = &cur.grid;
        let on_side = Complex64::new(g.x_line(2), g.cell_center(0, 0).im);
        assert!(matches!(transversal_measure(&cur, on_side), Err(Error::BaseOnCellBoundary(_))));
        assert!(transversal_measure(&cur, Complex64::new(5.0, 0.0)).is_err());
    }

    #[test]
    fn doubling_sweep_is_nested() {
        let mut spec = FamilySpec::branched_cover(3).with_resolution(0.04);
        spec.branch = Complex64::new(-0.31, 0.22);
        let c = forge::generate(&spec).unwrap();
        let runs: Vec<_> = [2usize, 4, 8].iter().map(|&k| current_at(&c, k)).collect();
        for w in runs.windows(2) {
            let r = check_refinement(&w[0].1, &w[0].0, &w[1].1, &w[1].0).unwrap();
            assert_eq!(r.nested + r.free, w[1].1.good_island_count());
            // Four fine cells per coarse island cell, three sheets each.
            assert!(r.nested >= 4 * w[0].1.good_island_count());
            assert!(w[1].1.defect <= w[0].1.defect + 1e-12);
        }
    }

    #[test]
    fn mixing_unrelated_scales_is_detected() {
        // A patch set from a different curve breaks nesting.
        let a = forge::generate(&FamilySpec::flat_sheets(1).with_resolution(0.1)).unwrap();
        let b = forge::generate(&FamilySpec::flat_sheets(1).with_resolution(0.07)).unwrap();
        let (pa, ca) = current_at(&a, 2);
        let (pb, cb) = current_at(&b, 4);
        assert!(check_refinement(&ca, &pa, &cb, &pb).is_err());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]
        #[test]
        fn current_is_dominated_by_the_curve(a in 0.0f64..2.0, b in -1.0f64..1.0, c in -1.0f64..1.0) {
            let curve = forge::generate(&FamilySpec::branched_cover(2).with_resolution(0.08)).unwrap();
            let (pc, cur) = current_at(&curve, 2);
            let form = |z: Complex64| (a + b * z.re + c * z.im * z.im).max(0.0);
            let t = evaluate(&cur, &pc, form);
            let tn = evaluate_curve(&pc, cur.weight, form);
            prop_assert!(t >= 0.0);
            prop_assert!(t <= tn + 1e-12);
            let d = evaluate_curve(&pc, cur.weight, |_| 1.0) - evaluate(&cur, &pc, |_| 1.0);
            prop_assert!((d - cur.defect).abs() < 1e-12);
        }
    }
}
