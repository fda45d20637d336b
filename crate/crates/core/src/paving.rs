//! Projection frame, square grid over `C`, parity families and the cross
//! paving of `C − Q`.
//!
//! Everything here works on the half-grid of `4k × 4k` sub-cells of side
//! `1/(2k)`: a grid cell is a 2×2 block of sub-cells and every cross is a
//! union of sub-cells, so a curve cut along the half-grid lines can be
//! labelled face by face.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cut::{self, CoordX, CoordY};
use crate::error::{Error, Result};
use crate::mesh::{DiscreteCurve, EdgeTable, Point};

/// A unitary change of coordinates after which the chosen direction is
/// the first axis, so the projection is `(z, w) ↦ z`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProjectionFrame {
    pub direction: [Complex64; 2],
    pub unitary: [[Complex64; 2]; 2],
    pub omega_mass: f64,
}

impl ProjectionFrame {
    pub fn from_direction(d: [Complex64; 2]) -> Self {
        let n = (d[0].norm_sqr() + d[1].norm_sqr()).sqrt();
        let (a, b) = (d[0] / n, d[1] / n);
        ProjectionFrame {
            direction: [a, b],
            unitary: [[a.conj(), b.conj()], [-b, a]],
            omega_mass: 0.0,
        }
    }

    pub fn identity() -> Self {
        Self::from_direction([Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)])
    }

    pub fn apply(&self, p: &Point) -> Point {
        let u = &self.unitary;
        Point::new(u[0][0] * p.z + u[0][1] * p.w, u[1][0] * p.z + u[1][1] * p.w)
    }

    pub fn apply_curve(&self, c: &DiscreteCurve) -> DiscreteCurve {
        c.map_points(|p| self.apply(p))
    }
}

/// Mass of the normalized current against `π*ω` for projection along `d`:
/// projected area with multiplicity over the Riemannian area.
pub fn omega_mass(curve: &DiscreteCurve, d: [Complex64; 2]) -> f64 {
    let area = curve.area();
    if area == 0.0 {
        return 0.0;
    }
    let frame = ProjectionFrame::from_direction(d);
    frame.apply_curve(curve).projected_area() / area
}

/// Tries the first axis, then `samples - 1` random directions, and keeps
/// the frame of largest mass (first one on ties).
pub fn choose_direction(curve: &DiscreteCurve, samples: usize, seed: u64) -> Result<ProjectionFrame> {
    if samples == 0 {
        return Err(Error::InvalidSpec("direction samples must be at least 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut dirs = vec![[Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)]];
    while dirs.len() < samples {
        let g: [f64; 4] = std::array::from_fn(|_| StandardNormal.sample(&mut rng));
        dirs.push([Complex64::new(g[0], g[1]), Complex64::new(g[2], g[3])]);
    }
    let masses: Vec<f64> = dirs.par_iter().map(|&d| omega_mass(curve, d)).collect();
    let mut best = 0;
    for (i, &m) in masses.iter().enumerate() {
        if m > masses[best] {
            best = i;
        }
    }
    if !(masses[best] > 0.0) {
        return Err(Error::EmptyCurve);
    }
    let mut frame = ProjectionFrame::from_direction(dirs[best]);
    frame.omega_mass = masses[best];
    Ok(frame)
}

/// Default `ε_k = 1 / ln(k + 3)`.
pub fn default_epsilon(k: usize) -> f64 {
    1.0 / ((k as f64) + 3.0).ln()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub k: usize,
    /// Offset of the grid (and of `C`) from `[-1, 1]²`.
    pub jitter: (f64, f64),
    pub epsilon_k: f64,
    pub q_family: usize,
    /// Mean sheet number over each family.
    pub family_sheet_numbers: [f64; 4],
    /// Mean sheet number over all of `C`.
    pub mean_sheet_number: f64,
}

impl GridSpec {
    pub fn new(k: usize, jitter: (f64, f64), epsilon_k: f64) -> Result<Self> {
        if k == 0 {
            return Err(Error::InvalidSpec("k must be at least 1".into()));
        }
        if !(epsilon_k > 0.0 && epsilon_k < 1.0) {
            return Err(Error::InvalidSpec(format!("epsilon_k = {epsilon_k} is not in (0, 1)")));
        }
        Ok(GridSpec {
            k,
            jitter,
            epsilon_k,
            q_family: 0,
            family_sheet_numbers: [0.0; 4],
            mean_sheet_number: 0.0,
        })
    }

    /// Number of cells along each axis.
    pub fn cells_per_side(&self) -> usize {
        2 * self.k
    }

    pub fn cell_side(&self) -> f64 {
        1.0 / self.k as f64
    }

    pub fn cell_area(&self) -> f64 {
        1.0 / (self.k * self.k) as f64
    }

    pub fn subcells_per_side(&self) -> usize {
        4 * self.k
    }

    /// Abscissa of the vertical half-grid line `a` (`0 ≤ a ≤ 4k`).
    pub fn x_line(&self, a: usize) -> f64 {
        -1.0 + self.jitter.0 + a as f64 / (2 * self.k) as f64
    }

    pub fn y_line(&self, b: usize) -> f64 {
        -1.0 + self.jitter.1 + b as f64 / (2 * self.k) as f64
    }

    /// The sub-cell containing `z`, if `z` lies in `C`.
    pub fn subcell_of(&self, z: Complex64) -> Option<(usize, usize)> {
        let n = self.subcells_per_side() as f64;
        let a = ((z.re - self.x_line(0)) * 2.0 * self.k as f64).floor();
        let b = ((z.im - self.y_line(0)) * 2.0 * self.k as f64).floor();
        (a >= 0.0 && b >= 0.0 && a < n && b < n).then(|| (a as usize, b as usize))
    }

    pub fn cell_of(&self, z: Complex64) -> Option<(usize, usize)> {
        self.subcell_of(z).map(|(a, b)| (a / 2, b / 2))
    }

    /// Family index of a cell: `2·(i mod 2) + (j mod 2)`.
    pub fn family_of(i: usize, j: usize) -> usize {
        2 * (i % 2) + (j % 2)
    }

    pub fn family_area(&self) -> f64 {
        1.0
    }

    /// Center of cell `(i, j)`.
    pub fn cell_center(&self, i: usize, j: usize) -> Complex64 {
        Complex64::new(self.x_line(2 * i + 1), self.y_line(2 * j + 1))
    }
}

/// Distance from `x` to the nearest of the lines `x0 + m·spacing`.
fn line_distance(x: f64, x0: f64, spacing: f64) -> f64 {
    let t = (x - x0) / spacing;
    (t - t.round()).abs() * spacing
}

/// Picks a grid offset, uniform in a small box, such that no point of
/// `points` lies within `tol` of a half-grid line of level `k_max`. The
/// half-grids of every `k` dividing `k_max` are sub-arrangements, so a
/// doubling sweep can share one offset.
pub fn choose_jitter(
    points: &[Complex64],
    k_max: usize,
    amplitude: f64,
    tol: f64,
    seed: u64,
    attempts: usize,
) -> Result<(f64, f64)> {
    let spacing = 1.0 / (2 * k_max) as f64;
    let amp = amplitude.min(0.5 * spacing);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut closest_seen: f64 = 0.0;
    for _ in 0..attempts.max(1) {
        let j = if amp > 0.0 {
            (rng.gen_range(-amp..amp), rng.gen_range(-amp..amp))
        } else {
            (0.0, 0.0)
        };
        let (x0, y0) = (-1.0 + j.0, -1.0 + j.1);
        let closest = points
            .par_iter()
            .map(|z| line_distance(z.re, x0, spacing).min(line_distance(z.im, y0, spacing)))
            .reduce(|| f64::INFINITY, f64::min);
        if closest > tol {
            return Ok(j);
        }
        closest_seen = closest_seen.max(closest);
    }
    Err(Error::JitterExhausted {
        attempts,
        closest: closest_seen,
    })
}

/// A curve (in frame coordinates) cut along the half-grid lines and
/// restricted to `π⁻¹(C)`. Every face lies over a single sub-cell.
#[derive(Clone, Debug)]
pub struct PavedCurve {
    pub mesh: DiscreteCurve,
    /// Face of the uncut curve each face comes from.
    pub parent: Vec<u32>,
    /// Sub-cell `(a, b)` under each face.
    pub subcell: Vec<(u16, u16)>,
    pub edges: EdgeTable,
}

impl PavedCurve {
    pub fn new(curve: &DiscreteCurve, grid: &GridSpec) -> Result<Self> {
        let n = grid.subcells_per_side();
        let xs: Vec<f64> = (0..=n).map(|a| grid.x_line(a)).collect();
        let ys: Vec<f64> = (0..=n).map(|b| grid.y_line(b)).collect();
        let parent: Vec<u32> = (0..curve.faces.len() as u32).collect();
        let m1 = cut::cut_by_levels(&curve.vertices, &curve.faces, &parent, &CoordX, &xs);
        let m2 = cut::cut_by_levels(&m1.vertices, &m1.faces, &m1.parent, &CoordY, &ys);
        let cutc = DiscreteCurve::from_parts(curve.name.clone(), m2.vertices, m2.faces);
        let cells: Vec<Option<(usize, usize)>> = (0..cutc.faces.len())
            .map(|f| grid.subcell_of(cutc.face_centroid(f).z))
            .collect();
        let (mesh, kept) = cutc.subset(|f| cells[f].is_some());
        let subcell = kept
            .iter()
            .map(|&f| {
                let (a, b) = cells[f as usize].expect("kept");
                (a as u16, b as u16)
            })
            .collect();
        let parent = kept.iter().map(|&f| m2.parent[f as usize]).collect();
        let edges = EdgeTable::build(&mesh.faces)?;
        Ok(PavedCurve {
            mesh,
            parent,
            subcell,
            edges,
        })
    }

    pub fn cell(&self, f: usize) -> (usize, usize) {
        let (a, b) = self.subcell[f];
        (a as usize / 2, b as usize / 2)
    }

    /// Projected area with multiplicity over each of the four families.
    pub fn family_projected_areas(&self) -> [f64; 4] {
        let mut out = [0.0; 4];
        for f in 0..self.mesh.faces.len() {
            let (i, j) = self.cell(f);
            out[GridSpec::family_of(i, j)] += self.mesh.face_projected_signed_area(f).abs();
        }
        out
    }
}

/// Relative gap below which two family sheet numbers count as equal.
const TIE: f64 = 1e-9;

/// Mean sheet numbers of the families; `Q` is the least covered one
/// (lowest index on ties).
pub fn select_q(paved: &PavedCurve, grid: &GridSpec) -> GridSpec {
    let areas = paved.family_projected_areas();
    let mut g = grid.clone();
    for (s, a) in g.family_sheet_numbers.iter_mut().zip(areas) {
        *s = a / grid.family_area();
    }
    g.mean_sheet_number = areas.iter().sum::<f64>() / (4.0 * grid.family_area());
    let mut q = 0;
    for f in 1..4 {
        let cur = g.family_sheet_numbers[q];
        if g.family_sheet_numbers[f] < cur - TIE * cur.max(1.0) {
            q = f;
        }
    }
    g.q_family = q;
    g
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Region {
    Cross(u32),
    Q(u32),
}

/// A side of length `1/k` shared by two crosses: the mid-line of the arm
/// cell between their centers.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AlphaSide {
    /// True for a segment of a vertical line `x = coord`.
    pub vertical: bool,
    pub coord: f64,
    /// Extent along the other axis.
    pub span: (f64, f64),
    pub crosses: [u32; 2],
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Cross {
    pub center_cell: (usize, usize),
    pub area: f64,
    pub clipped: bool,
    /// Indices into `Paving::alpha_sides`.
    pub alpha_sides: Vec<u32>,
    /// Arms lost to `∂C` (4 minus the number of α-sides).
    pub missing_sides: usize,
}

#[derive(Clone, Debug)]
pub struct Paving {
    pub grid: GridSpec,
    pub crosses: Vec<Cross>,
    pub alpha_sides: Vec<AlphaSide>,
    pub q_cells: Vec<(usize, usize)>,
    /// Region of each sub-cell, indexed by `a·4k + b`.
    regions: Vec<Region>,
}

impl Paving {
    /// Crosses around the cells whose parities both differ from `Q`'s.
    /// A cell sharing one parity with `Q` is an arm, split between the two
    /// crosses it separates; when one of them is missing (at `∂C`) the
    /// whole cell goes to the other.
    pub fn build(grid: &GridSpec) -> Paving {
        let n = grid.cells_per_side();
        let (qi, qj) = (grid.q_family / 2, grid.q_family % 2);
        let is_center = |i: usize, j: usize| i % 2 != qi && j % 2 != qj;
        let mut cross_id = vec![u32::MAX; n * n];
        let mut crosses = Vec::new();
        let mut q_cells = Vec::new();
        let mut q_id = vec![u32::MAX; n * n];
        for i in 0..n {
            for j in 0..n {
                if is_center(i, j) {
                    cross_id[i * n + j] = crosses.len() as u32;
                    crosses.push(Cross {
                        center_cell: (i, j),
                        area: 0.0,
                        clipped: false,
                        alpha_sides: Vec::new(),
                        missing_sides: 0,
                    });
                } else if i % 2 == qi && j % 2 == qj {
                    q_id[i * n + j] = q_cells.len() as u32;
                    q_cells.push((i, j));
                }
            }
        }
        let center = |i: isize, j: isize| -> Option<u32> {
            (i >= 0 && j >= 0 && (i as usize) < n && (j as usize) < n).then(|| cross_id[i as usize * n + j as usize])
        };
        // Region of each sub-cell.
        let ns = grid.subcells_per_side();
        let mut regions = vec![Region::Q(0); ns * ns];
        for a in 0..ns {
            for b in 0..ns {
                let (i, j) = (a / 2, b / 2);
                let (hx, hy) = (a % 2, b % 2);
                let (ii, jj) = (i as isize, j as isize);
                let r = if i % 2 == qi && j % 2 == qj {
                    Region::Q(q_id[i * n + j])
                } else if is_center(i, j) {
                    Region::Cross(cross_id[i * n + j])
                } else if i % 2 == qi {
                    // Between the centers left and right of the cell.
                    let (near, far) = if hx == 0 { (ii - 1, ii + 1) } else { (ii + 1, ii - 1) };
                    Region::Cross(center(near, jj).or(center(far, jj)).expect("arm has a center"))
                } else {
                    let (near, far) = if hy == 0 { (jj - 1, jj + 1) } else { (jj + 1, jj - 1) };
                    Region::Cross(center(ii, near).or(center(ii, far)).expect("arm has a center"))
                };
                regions[a * ns + b] = r;
            }
        }
        let sub_area = 1.0 / (4 * grid.k * grid.k) as f64;
        for a in 0..ns {
            for b in 0..ns {
                if let Region::Cross(c) = regions[a * ns + b] {
                    let cr = &mut crosses[c as usize];
                    cr.area += sub_area;
                    if a == 0 || b == 0 || a + 1 == ns || b + 1 == ns {
                        cr.clipped = true;
                    }
                }
            }
        }
        // α-sides: arm cells whose two flanking centers both exist.
        let mut alpha_sides = Vec::new();
        let cs = grid.cell_side();
        for i in 0..n {
            for j in 0..n {
                let (ii, jj) = (i as isize, j as isize);
                let pair = if i % 2 == qi && j % 2 != qj {
                    center(ii - 1, jj).zip(center(ii + 1, jj)).map(|p| (true, p))
                } else if i % 2 != qi && j % 2 == qj {
                    center(ii, jj - 1).zip(center(ii, jj + 1)).map(|p| (false, p))
                } else {
                    None
                };
                if let Some((vertical, (c0, c1))) = pair {
                    let id = alpha_sides.len() as u32;
                    let side = if vertical {
                        let y = grid.y_line(2 * j);
                        AlphaSide {
                            vertical,
                            coord: grid.x_line(2 * i + 1),
                            span: (y, y + cs),
                            crosses: [c0, c1],
                        }
                    } else {
                        let x = grid.x_line(2 * i);
                        AlphaSide {
                            vertical,
                            coord: grid.y_line(2 * j + 1),
                            span: (x, x + cs),
                            crosses: [c0, c1],
                        }
                    };
                    alpha_sides.push(side);
                    crosses[c0 as usize].alpha_sides.push(id);
                    crosses[c1 as usize].alpha_sides.push(id);
                }
            }
        }
        for c in &mut crosses {
            c.missing_sides = 4 - c.alpha_sides.len();
        }
        Paving {
            grid: grid.clone(),
            crosses,
            alpha_sides,
            q_cells,
            regions,
        }
    }

    pub fn region_of_subcell(&self, a: usize, b: usize) -> Region {
        self.regions[a * self.grid.subcells_per_side() + b]
    }

    pub fn region_of_face(&self, paved: &PavedCurve, f: usize) -> Region {
        let (a, b) = paved.subcell[f];
        self.region_of_subcell(a as usize, b as usize)
    }

    /// The α-side separating two crosses, if they are neighbors.
    pub fn side_between(&self, c0: u32, c1: u32) -> Option<u32> {
        self.crosses[c0 as usize]
            .alpha_sides
            .iter()
            .copied()
            .find(|&s| self.alpha_sides[s as usize].crosses.contains(&c1))
    }

    pub fn region_area(&self, r: Region) -> f64 {
        match r {
            Region::Cross(c) => self.crosses[c as usize].area,
            Region::Q(_) => self.grid.cell_area(),
        }
    }

    pub fn q_area(&self) -> f64 {
        self.q_cells.len() as f64 * self.grid.cell_area()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::forge::{self, FamilySpec};
    use proptest::prelude::*;

    fn grid(k: usize, q: usize) -> GridSpec {
        let mut g = GridSpec::new(k, (0.0, 0.0), default_epsilon(k)).unwrap();
        g.q_family = q;
        g
    }

    #[test]
    fn frame_maps_direction_to_first_axis() {
        let d = [Complex64::new(0.3, -0.4), Complex64::new(0.5, 0.7)];
        let f = ProjectionFrame::from_direction(d);
        let n = (d[0].norm_sqr() + d[1].norm_sqr()).sqrt();
        let img = f.apply(&Point::new(d[0] / n, d[1] / n));
        assert!((img.z - 1.0).norm() < 1e-12 && img.w.norm() < 1e-12);
        let u = f.unitary;
        for r in 0..2 {
            for c in 0..2 {
                let dot: Complex64 = (0..2).map(|m| u[r][m] * u[c][m].conj()).sum();
                let want = if r == c { 1.0 } else { 0.0 };
                assert!((dot - want).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn flat_graph_prefers_the_graph_axis() {
        let c = forge::generate(&FamilySpec::flat_sheets(2).with_resolution(0.2)).unwrap();
        let f = choose_direction(&c, 16, 1).unwrap();
        assert_eq!(f.direction[0], Complex64::new(1.0, 0.0));
        assert!((f.omega_mass - 1.0).abs() < 1e-12);
    }

    #[test]
    fn a_fiber_has_zero_mass_along_it() {
        let c = forge::generate(&FamilySpec::flat_sheets(1).with_resolution(0.5)).unwrap();
        let fiber = c.map_points(|p| Point::new(p.w, p.z));
        let axis = [Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)];
        assert!(omega_mass(&fiber, axis).abs() < 1e-15);
        let f = choose_direction(&fiber, 8, 3).unwrap();
        assert!(f.omega_mass > 0.0 && f.direction[0] != Complex64::new(1.0, 0.0));
    }

    #[test]
    fn grid_counts() {
        for (k, cells) in [(1usize, 4usize), (2, 16), (8, 256)] {
            let g = grid(k, 0);
            let n = g.cells_per_side();
            assert_eq!(n * n, cells);
            let mut fam = [0usize; 4];
            for i in 0..n {
                for j in 0..n {
                    fam[GridSpec::family_of(i, j)] += 1;
                }
            }
            assert_eq!(fam, [k * k; 4]);
            assert!((k * k) as f64 * g.cell_area() - g.family_area() < 1e-15);
        }
    }

    #[test]
    fn epsilon_decreases() {
        assert!((1..200).all(|k| default_epsilon(k + 1) < default_epsilon(k) && default_epsilon(k) < 1.0));
    }

    #[test]
    fn single_cross_at_k1() {
        let p = Paving::build(&grid(1, 0));
        assert_eq!(p.crosses.len(), 1);
        assert!(p.crosses[0].clipped);
        assert_eq!(p.crosses[0].missing_sides, 4);
        assert!((p.crosses[0].area - 3.0).abs() < 1e-12);
    }

    proptest! {
        #[test]
        fn paving_invariants(k in 1usize..9, q in 0usize..4) {
            let p = Paving::build(&grid(k, q));
            prop_assert_eq!(p.crosses.len(), k * k);
            prop_assert_eq!(p.q_cells.len(), k * k);
            let total: f64 = p.crosses.iter().map(|c| c.area).sum();
            prop_assert!((total + p.q_area() - 4.0).abs() < 1e-12);
            for c in p.crosses.iter().filter(|c| !c.clipped) {
                prop_assert!((c.area - 3.0 * p.grid.cell_area()).abs() < 1e-12);
                prop_assert_eq!(c.alpha_sides.len(), 4);
            }
            for (c, cross) in p.crosses.iter().enumerate() {
                let mut nb: Vec<u32> = cross.alpha_sides.iter().map(|&s| {
                    let s = &p.alpha_sides[s as usize];
                    assert!(s.crosses.contains(&(c as u32)));
                    assert!((s.span.1 - s.span.0 - p.grid.cell_side()).abs() < 1e-12);
                    if s.crosses[0] == c as u32 { s.crosses[1] } else { s.crosses[0] }
                }).collect();
                let len = nb.len();
                nb.sort();
                nb.dedup();
                prop_assert_eq!(nb.len(), len);
                for &o in &nb {
                    prop_assert!(p.side_between(o, c as u32).is_some());
                }
            }
            // α-sides stay off Q: both sub-cells beside each side are cross cells.
            for s in &p.alpha_sides {
                let mid = Complex64::new(
                    if s.vertical { s.coord } else { 0.5 * (s.span.0 + s.span.1) },
                    if s.vertical { 0.5 * (s.span.0 + s.span.1) } else { s.coord },
                );
                let h = 0.25 / (2 * k) as f64;
                for d in [-h, h] {
                    let z = if s.vertical { mid + d } else { mid + Complex64::new(0.0, d) };
                    let (a, b) = p.grid.subcell_of(z).unwrap();
                    prop_assert!(matches!(p.region_of_subcell(a, b), Region::Cross(_)));
                }
            }
        }
    }

    #[test]
    fn cross_areas_at_k2() {
        let p = Paving::build(&grid(2, 0));
        assert_eq!(p.crosses.len(), 4);
        let total: f64 = p.crosses.iter().map(|c| c.area).sum();
        assert!((total - 3.0).abs() < 1e-12);
    }

    #[test]
    fn jitter_avoids_vertices() {
        let pts: Vec<Complex64> = (0..2000)
            .map(|i| Complex64::new(-1.0 + 0.001 * i as f64, 0.37 - 0.0007 * i as f64))
            .collect();
        let j = choose_jitter(&pts, 16, 0.025, 1e-7, 5, 100).unwrap();
        let sp = 1.0 / 32.0;
        for z in &pts {
            assert!(line_distance(z.re, -1.0 + j.0, sp) > 1e-7);
            assert!(line_distance(z.im, -1.0 + j.1, sp) > 1e-7);
        }
        // A point on every candidate line cannot be avoided.
        let dense: Vec<Complex64> = (0..=20000).map(|i| Complex64::new(-1.1 + 1e-5 * i as f64, 0.0)).collect();
        assert!(matches!(
            choose_jitter(&dense, 16, 0.025, 1e-5, 5, 10),
            Err(Error::JitterExhausted { .. })
        ));
    }

    #[test]
    fn paved_curve_labels_and_clips() {
        let c = forge::generate(&FamilySpec::flat_sheets(1).with_resolution(0.1)).unwrap();
        let g = GridSpec::new(3, (0.013, -0.007), default_epsilon(3)).unwrap();
        let pc = PavedCurve::new(&c, &g).unwrap();
        assert!((pc.mesh.area() - 4.0).abs() < 1e-12);
        for f in 0..pc.mesh.faces.len() {
            let (a, b) = pc.subcell[f];
            for p in pc.mesh.corners(f) {
                assert!(p.z.re >= g.x_line(a as usize) - 1e-15 && p.z.re <= g.x_line(a as usize + 1) + 1e-15);
                assert!(p.z.im >= g.y_line(b as usize) - 1e-15 && p.z.im <= g.y_line(b as usize + 1) + 1e-15);
            }
        }
        let g = select_q(&pc, &g);
        assert_eq!(g.q_family, 0);
        assert!(g.family_sheet_numbers.iter().all(|s| (s - 1.0).abs() < 1e-12));
    }

    #[test]
    fn branched_families_away_from_branch_cell() {
        // w² = z: the branch point is interior to one cell of one family.
        let c = forge::generate(&FamilySpec::branched_cover(2).with_resolution(0.04)).unwrap();
        let g = GridSpec::new(2, (0.0, 0.0), default_epsilon(2)).unwrap();
        let s = select_q(&PavedCurve::new(&c, &g).unwrap(), &g).family_sheet_numbers;
        // The branch point sits on grid corners at jitter 0, so all families
        // are double covers.
        for v in s {
            assert!((v - 2.0).abs() < 1e-9, "{s:?}");
        }
        assert!(s.iter().cloned().fold(f64::INFINITY, f64::min) <= s.iter().sum::<f64>() / 4.0);
    }
}
