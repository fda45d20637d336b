//! Test-curve families.
//!
//! `flat_sheets`, `branched_cover` and `poly_graph` are piecewise-linear
//! interpolations of holomorphic curves whose vertices lie exactly on the
//! analytic curve. `handle_body` is a genus-heavy negative control: two
//! holomorphic sheets joined by many thin tubes. The tubes are topological
//! handles, not holomorphic, which is enough to stress the counting chain
//! since that chain only uses areas, lengths and Euler characteristics.

use std::collections::HashSet;
use std::f64::consts::{PI, TAU};
use std::path::PathBuf;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::cut::{self, CoordX, CoordY};
use crate::error::{Error, Result};
use crate::mesh::{self, DiscreteCurve, Point};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    FlatSheets,
    BranchedCover,
    PolyGraph,
    HandleBody,
    FromFile,
}

impl std::str::FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "flat_sheets" => Family::FlatSheets,
            "branched_cover" => Family::BranchedCover,
            "poly_graph" => Family::PolyGraph,
            "handle_body" => Family::HandleBody,
            "from_file" => Family::FromFile,
            other => return Err(Error::InvalidSpec(format!("unknown family `{other}`"))),
        })
    }
}

/// Region of the z-line over which a graph-like family is built.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Domain {
    /// `[-s, s]²` with `s = 1 + margin`.
    Square,
    /// The curve cut by the sphere of radius `1 + margin`.
    Ball,
    /// An explicit rectangle `[x0, x1] × [y0, y1]`.
    Rect { x0: f64, x1: f64, y0: f64, y1: f64 },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FamilySpec {
    pub family: Family,
    pub domain: Domain,
    /// Target edge length in the projection plane.
    pub resolution: f64,
    /// How far beyond the unit square or ball the curve extends.
    pub margin: f64,
    /// flat_sheets: sheet count m. handle_body: number of sheets joined.
    pub sheets: usize,
    /// flat_sheets: the constant values `w = c_j`; defaults to `0.25·j`.
    pub sheet_values: Vec<Complex64>,
    /// branched_cover: `w^d = z - branch`.
    pub degree: usize,
    pub branch: Complex64,
    /// poly_graph: `w = Σ c_j z^j`.
    pub coefficients: Vec<Complex64>,
    /// handle_body: number of handles (the genus).
    pub tubes: usize,
    /// handle_body: vertical distance between consecutive sheets.
    pub tube_height: f64,
    pub path: Option<PathBuf>,
    pub seed: u64,
}

impl Default for FamilySpec {
    fn default() -> Self {
        FamilySpec {
            family: Family::FlatSheets,
            domain: Domain::Square,
            resolution: 0.04,
            margin: 0.05,
            sheets: 1,
            sheet_values: Vec::new(),
            degree: 2,
            branch: Complex64::new(0.0, 0.0),
            coefficients: vec![
                Complex64::new(0.0, 0.0),
                Complex64::new(0.2, 0.1),
                Complex64::new(0.3, -0.2),
                Complex64::new(0.1, 0.0),
            ],
            tubes: 0,
            tube_height: 0.3,
            path: None,
            seed: 0,
        }
    }
}

impl FamilySpec {
    pub fn flat_sheets(m: usize) -> Self {
        FamilySpec {
            family: Family::FlatSheets,
            sheets: m,
            ..Default::default()
        }
    }

    pub fn branched_cover(d: usize) -> Self {
        FamilySpec {
            family: Family::BranchedCover,
            degree: d,
            ..Default::default()
        }
    }

    pub fn poly_graph(coefficients: Vec<Complex64>) -> Self {
        FamilySpec {
            family: Family::PolyGraph,
            coefficients,
            ..Default::default()
        }
    }

    pub fn handle_body(sheets: usize, tubes: usize) -> Self {
        FamilySpec {
            family: Family::HandleBody,
            sheets,
            tubes,
            resolution: 0.015,
            tube_height: 0.1,
            ..Default::default()
        }
    }

    pub fn with_resolution(mut self, h: f64) -> Self {
        self.resolution = h;
        self
    }

    pub fn with_domain(mut self, d: Domain) -> Self {
        self.domain = d;
        self
    }

    /// Whether the generated surface is (a discretization of) a
    /// holomorphic curve. `from_file` curves are judged by their residual.
    pub fn is_holomorphic(&self) -> Option<bool> {
        match self.family {
            Family::FlatSheets | Family::BranchedCover | Family::PolyGraph => Some(true),
            Family::HandleBody => Some(false),
            Family::FromFile => None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.resolution > 0.0) {
            return Err(Error::InvalidSpec("resolution must be positive".into()));
        }
        if self.margin < 0.0 {
            return Err(Error::InvalidSpec("margin must be nonnegative".into()));
        }
        match self.family {
            Family::FlatSheets if self.sheets == 0 => Err(Error::InvalidSpec("sheet count must be at least 1".into())),
            Family::FlatSheets if !self.sheet_values.is_empty() && self.sheet_values.len() != self.sheets => {
                Err(Error::InvalidSpec("sheet_values must list one value per sheet".into()))
            }
            Family::BranchedCover if self.degree == 0 => Err(Error::InvalidSpec("degree must be at least 1".into())),
            Family::HandleBody if self.sheets < 2 => Err(Error::InvalidSpec("handle_body needs at least 2 sheets".into())),
            Family::FromFile if self.path.is_none() => Err(Error::InvalidSpec("from_file needs a path".into())),
            _ => Ok(()),
        }
    }

    fn half_side(&self) -> f64 {
        1.0 + self.margin
    }

    fn rect(&self) -> (f64, f64, f64, f64) {
        match self.domain {
            Domain::Rect { x0, x1, y0, y1 } => (x0, x1, y0, y1),
            _ => {
                let s = self.half_side();
                (-s, s, -s, s)
            }
        }
    }

    fn sheet_value(&self, j: usize) -> Complex64 {
        self.sheet_values
            .get(j)
            .copied()
            .unwrap_or_else(|| Complex64::new(0.25 * j as f64, 0.0))
    }

    fn poly(&self, z: Complex64) -> Complex64 {
        self.coefficients.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, &c| acc * z + c)
    }
}

/// Builds the curve described by `spec`.
pub fn generate(spec: &FamilySpec) -> Result<DiscreteCurve> {
    spec.validate()?;
    let curve = match spec.family {
        Family::FlatSheets => {
            let mut c = DiscreteCurve::empty();
            for j in 0..spec.sheets {
                let v = spec.sheet_value(j);
                let sheet = graph_mesh(spec.rect(), spec.resolution, |_| v, &HashSet::new());
                c = if j == 0 { sheet } else { c.union(&sheet) };
            }
            c
        }
        Family::PolyGraph => graph_mesh(spec.rect(), spec.resolution, |z| spec.poly(z), &HashSet::new()),
        Family::BranchedCover => branched_mesh(spec)?,
        Family::HandleBody => handle_body_mesh(spec)?,
        Family::FromFile => {
            let path = spec.path.as_ref().expect("validated");
            return mesh::load_curve(path);
        }
    };
    let mut curve = match spec.domain {
        Domain::Ball => mesh::slice_by_sphere(&curve, spec.half_side())?.inside,
        _ => curve,
    };
    curve.name = Some(format!("{:?}", spec.family).to_lowercase());
    Ok(curve)
}

/// Exact fiber of the projection `(z, w) ↦ z` over `z`, one point per sheet.
pub fn sheet_oracle(spec: &FamilySpec, z: Complex64) -> Result<Vec<Point>> {
    match spec.family {
        Family::FlatSheets => Ok((0..spec.sheets).map(|j| Point::new(z, spec.sheet_value(j))).collect()),
        Family::PolyGraph => Ok(vec![Point::new(z, spec.poly(z))]),
        Family::BranchedCover => {
            let u = z - spec.branch;
            if u.norm() < 1e-12 {
                return Err(Error::BranchValue(format!("{z}")));
            }
            let d = spec.degree as f64;
            let r = u.norm().powf(1.0 / d);
            let a = u.arg();
            Ok((0..spec.degree)
                .map(|j| Point::new(z, Complex64::from_polar(r, (a + TAU * j as f64) / d)))
                .collect())
        }
        _ => Err(Error::InvalidSpec(format!("no analytic fiber for {:?}", spec.family))),
    }
}

/// Regular triangulation of the graph of `f` over a rectangle, skipping
/// the grid squares listed in `holes`.
fn graph_mesh(
    (x0, x1, y0, y1): (f64, f64, f64, f64),
    h: f64,
    f: impl Fn(Complex64) -> Complex64,
    holes: &HashSet<(usize, usize)>,
) -> DiscreteCurve {
    let (nx, ny) = grid_counts((x0, x1, y0, y1), h);
    let mut v = Vec::with_capacity((nx + 1) * (ny + 1));
    for j in 0..=ny {
        for i in 0..=nx {
            let z = Complex64::new(
                x0 + (x1 - x0) * i as f64 / nx as f64,
                y0 + (y1 - y0) * j as f64 / ny as f64,
            );
            v.push(Point::new(z, f(z)));
        }
    }
    let id = |i: usize, j: usize| (j * (nx + 1) + i) as u32;
    let mut faces = Vec::with_capacity(2 * nx * ny);
    for j in 0..ny {
        for i in 0..nx {
            if holes.contains(&(i, j)) {
                continue;
            }
            faces.push([id(i, j), id(i + 1, j), id(i + 1, j + 1)]);
            faces.push([id(i, j), id(i + 1, j + 1), id(i, j + 1)]);
        }
    }
    DiscreteCurve::from_parts(None, v, faces)
}

fn grid_counts((x0, x1, y0, y1): (f64, f64, f64, f64), h: f64) -> (usize, usize) {
    (((x1 - x0) / h).ceil().max(1.0) as usize, ((y1 - y0) / h).ceil().max(1.0) as usize)
}

/// `w^d = z - b` over the square, meshed in the uniformizing parameter
/// `t` (so `z = b + t^d`, `w = t`) with rings around the branch point,
/// then clipped to the square. Within distance 0.3 of the branch point the
/// edge length shrinks linearly, down to a quarter of the resolution.
fn branched_mesh(spec: &FamilySpec) -> Result<DiscreteCurve> {
    let s = spec.half_side();
    let b = spec.branch;
    let d = spec.degree;
    let h = spec.resolution;
    let clearance = (s - b.re.abs()).min(s - b.im.abs());
    if clearance < 3.0 * h {
        return Err(Error::BranchTooCoarse {
            clearance,
            needed: 3.0 * h,
        });
    }
    let far = [(s, s), (-s, s), (-s, -s), (s, -s)]
        .iter()
        .map(|&(x, y)| (Complex64::new(x, y) - b).norm())
        .fold(0.0, f64::max);
    let fine = h / 4.0;
    let df = d as f64;
    // Circular rings in z up to the farthest corner; steps keep the z- and
    // t-spacing below the local edge length, which grows with the distance
    // to the branch point.
    let local_at = |rho: f64| h * (rho / 0.3).clamp(0.25, 1.0);
    let mut radii: Vec<(f64, f64)> = vec![(fine.powf(df), fine)];
    loop {
        let (rho, _) = *radii.last().expect("nonempty");
        if rho >= far {
            break;
        }
        let local = local_at(rho);
        let step = local.min(df * rho.powf((df - 1.0) / df) * local);
        radii.push((rho + step, local));
    }
    let mut vertices = vec![Point::new(b, Complex64::new(0.0, 0.0))];
    let mut ring_ids: Vec<Vec<u32>> = Vec::new();
    let mut ring_angles: Vec<Vec<f64>> = Vec::new();
    for &(rho, local) in &radii {
        let tau = rho.powf(1.0 / df);
        let n = ((TAU * (df * rho).max(tau) / local).ceil() as usize).max(3 * d);
        let mut ids = Vec::with_capacity(n);
        let mut angles = Vec::with_capacity(n);
        for j in 0..n {
            let theta = TAU * j as f64 / n as f64;
            let t = Complex64::from_polar(tau, theta);
            ids.push(vertices.len() as u32);
            angles.push(theta);
            vertices.push(Point::new(b + t.powu(d as u32), t));
        }
        ring_ids.push(ids);
        ring_angles.push(angles);
    }
    let mut faces = Vec::new();
    let first = &ring_ids[0];
    for j in 0..first.len() {
        faces.push([0, first[j], first[(j + 1) % first.len()]]);
    }
    for r in 1..ring_ids.len() {
        zipper(&vertices, &ring_ids[r - 1], &ring_angles[r - 1], &ring_ids[r], &ring_angles[r], &mut faces);
    }
    // Clip the disk to the square.
    let parent: Vec<u32> = (0..faces.len() as u32).collect();
    let m = cut::cut_by_levels(&vertices, &faces, &parent, &CoordX, &[-s, s]);
    let m = cut::cut_by_levels(&m.vertices, &m.faces, &m.parent, &CoordY, &[-s, s]);
    let disk = DiscreteCurve::from_parts(None, m.vertices, m.faces);
    let (square, _) = disk.subset(|f| {
        let z = disk.face_centroid(f).z;
        z.re.abs() < s && z.im.abs() < s
    });
    Ok(square)
}

/// Triangulates the annulus between an inner and an outer ring of
/// vertices, both listed counterclockwise starting at angle 0. Advances
/// by angle, except where that would fold a triangle over the z-line.
fn zipper(
    vertices: &[Point],
    inner: &[u32],
    ia: &[f64],
    outer: &[u32],
    oa: &[f64],
    faces: &mut Vec<[u32; 3]>,
) {
    let (ni, no) = (inner.len(), outer.len());
    let (mut i, mut o) = (0usize, 0usize);
    let angle = |a: &[f64], k: usize| if k < a.len() { a[k] } else { TAU + a[k - a.len()] };
    let positive = |f: [u32; 3]| {
        let [p, q, r] = f.map(|v| &vertices[v as usize]);
        mesh::projected_signed_area(p, q, r) > 0.0
    };
    while i < ni || o < no {
        let by_inner = [inner[i % ni], outer[o % no], inner[(i + 1) % ni]];
        let by_outer = [inner[i % ni], outer[o % no], outer[(o + 1) % no]];
        let advance_inner = if i == ni {
            false
        } else if o == no {
            true
        } else {
            let preferred = angle(ia, i + 1) <= angle(oa, o + 1);
            let (pf, other) = if preferred { (by_inner, by_outer) } else { (by_outer, by_inner) };
            if !positive(pf) && positive(other) {
                !preferred
            } else {
                preferred
            }
        };
        if advance_inner {
            faces.push(by_inner);
            i += 1;
        } else {
            faces.push(by_outer);
            o += 1;
        }
    }
}

/// `sheets` parallel graphs `w = j·tube_height` joined by `tubes` handles
/// and `sheets - 1` connecting tubes, so the result is connected with
/// genus exactly `tubes` and one boundary loop per sheet.
///
/// Each tube removes one grid square from two sheets and joins the two
/// square holes by a four-sided cylinder. Along the cylinder the square
/// is rotated through the `Im w` direction so that it arrives mirrored,
/// which lets both sheets keep their complex orientation.
fn handle_body_mesh(spec: &FamilySpec) -> Result<DiscreteCurve> {
    let rect = spec.rect();
    let h = spec.resolution;
    let (nx, ny) = grid_counts(rect, h);
    let (x0, x1, y0, y1) = rect;
    let dx = (x1 - x0) / nx as f64;
    let dy = (y1 - y0) / ny as f64;

    let sites = tube_sites(spec)?;

    let mut curve = DiscreteCurve::empty();
    let per_sheet = (nx + 1) * (ny + 1);
    for s in 0..spec.sheets {
        let wv = Complex64::new(spec.tube_height * s as f64, 0.0);
        let sheet_holes: HashSet<(usize, usize)> = sites
            .iter()
            .enumerate()
            .filter(|(t, _)| tube_sheets(*t, spec.sheets, spec.tubes).contains(&s))
            .map(|(_, &c)| c)
            .collect();
        let sheet = graph_mesh(rect, h, |_| wv, &sheet_holes);
        curve = if s == 0 { sheet } else { curve.union(&sheet) };
    }

    let mut vertices = curve.vertices;
    let mut faces = curve.faces;
    let id = |s: usize, i: usize, j: usize| (s * per_sheet + j * (nx + 1) + i) as u32;
    let levels = 4usize;
    for (t, &(i, j)) in sites.iter().enumerate() {
        let [sa, sb] = tube_sheets(t, spec.sheets, spec.tubes);
        let corners = [(i, j), (i + 1, j), (i + 1, j + 1), (i, j + 1)];
        let mirror = [3usize, 2, 1, 0];
        let center = Complex64::new(x0 + dx * (i as f64 + 0.5), y0 + dy * (j as f64 + 0.5));
        let wa = spec.tube_height * sa as f64;
        let wb = spec.tube_height * sb as f64;
        let mut rings: Vec<[u32; 4]> = Vec::with_capacity(levels + 1);
        rings.push([id(sa, i, j), id(sa, i + 1, j), id(sa, i + 1, j + 1), id(sa, i, j + 1)]);
        for l in 1..levels {
            let f = l as f64 / levels as f64;
            let mut ring = [0u32; 4];
            for (c, &(ci, cj)) in corners.iter().enumerate() {
                let off = Complex64::new(x0 + dx * ci as f64, y0 + dy * cj as f64) - center;
                let z = center + Complex64::new(off.re, off.im * (PI * f).cos());
                let w = Complex64::new(wa + (wb - wa) * f, off.im * (PI * f).sin());
                ring[c] = vertices.len() as u32;
                vertices.push(Point::new(z, w));
            }
            rings.push(ring);
        }
        let mut top = [0u32; 4];
        for c in 0..4 {
            let (ci, cj) = corners[mirror[c]];
            top[c] = id(sb, ci, cj);
        }
        rings.push(top);
        for l in 0..levels {
            let (r0, r1) = (rings[l], rings[l + 1]);
            for c in 0..4 {
                let n = (c + 1) % 4;
                faces.push([r0[c], r0[n], r1[n]]);
                faces.push([r0[c], r1[n], r1[c]]);
            }
        }
    }
    DiscreteCurve::new(None, vertices, faces)
}

/// Grid squares removed for the tubes of a `handle_body`, in tube order:
/// one per lattice site over `[-1, 1]²`, slightly jittered.
fn tube_sites(spec: &FamilySpec) -> Result<Vec<(usize, usize)>> {
    let rect = spec.rect();
    let h = spec.resolution;
    let (nx, ny) = grid_counts(rect, h);
    let (x0, x1, y0, y1) = rect;
    let dx = (x1 - x0) / nx as f64;
    let dy = (y1 - y0) / ny as f64;
    let total = spec.tubes + spec.sheets - 1;
    let side = (total as f64).sqrt().ceil().max(1.0) as usize;
    let spacing = 2.0 / side as f64;
    if spacing < 3.0 * h.max(dx).max(dy) {
        return Err(Error::InvalidSpec(format!(
            "{total} tubes need spacing {spacing:.4}, below three mesh cells; refine the resolution"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut sites: Vec<(usize, usize)> = Vec::with_capacity(total);
    let mut taken = HashSet::new();
    'outer: for a in 0..side {
        for bb in 0..side {
            if sites.len() == total {
                break 'outer;
            }
            let jx: f64 = rng.gen_range(-0.1..0.1);
            let jy: f64 = rng.gen_range(-0.1..0.1);
            let cx = -1.0 + spacing * (a as f64 + 0.5 + jx);
            let cy = -1.0 + spacing * (bb as f64 + 0.5 + jy);
            let i = (((cx - x0) / dx).floor() as usize).min(nx - 1);
            let j = (((cy - y0) / dy).floor() as usize).min(ny - 1);
            if !taken.insert((i, j)) {
                return Err(Error::InvalidSpec("tube sites collide".into()));
            }
            sites.push((i, j));
        }
    }
    Ok(sites)
}

/// Projected centers of the tubes of a `handle_body`, in tube order. The
/// first `sheets - 1` tubes connect consecutive sheets.
pub fn tube_centers(spec: &FamilySpec) -> Result<Vec<Complex64>> {
    let (x0, x1, y0, y1) = spec.rect();
    let (nx, ny) = grid_counts(spec.rect(), spec.resolution);
    let dx = (x1 - x0) / nx as f64;
    let dy = (y1 - y0) / ny as f64;
    Ok(tube_sites(spec)?
        .into_iter()
        .map(|(i, j)| Complex64::new(x0 + dx * (i as f64 + 0.5), y0 + dy * (j as f64 + 0.5)))
        .collect())
}

/// The pair of sheets joined by tube `t`: the first `sheets - 1` tubes
/// connect consecutive sheets, the remaining handles join sheets 0 and 1.
fn tube_sheets(t: usize, sheets: usize, _handles: usize) -> [usize; 2] {
    if t < sheets - 1 {
        [t, t + 1]
    } else {
        [0, 1]
    }
}

/// The holomorphic generator suite used for calibration and the
/// theorem-level checks.
pub fn holomorphic_suite(resolution: f64) -> Vec<(String, FamilySpec)> {
    let mut off_center = FamilySpec::branched_cover(3).with_resolution(resolution);
    off_center.branch = Complex64::new(-0.31, 0.22);
    vec![
        ("flat_m1".into(), FamilySpec::flat_sheets(1).with_resolution(resolution)),
        ("flat_m3".into(), FamilySpec::flat_sheets(3).with_resolution(resolution)),
        ("branched_d2".into(), FamilySpec::branched_cover(2).with_resolution(resolution)),
        ("branched_d3".into(), off_center),
        (
            "poly".into(),
            FamilySpec::poly_graph(FamilySpec::default().coefficients).with_resolution(resolution),
        ),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flat_sheet_is_a_disk_of_area_four() {
        let spec = FamilySpec {
            margin: 0.0,
            resolution: 0.25,
            ..FamilySpec::flat_sheets(1)
        };
        let c = generate(&spec).unwrap();
        let s = c.stats();
        assert_eq!((s.genus, s.boundary_count), (0, 1));
        assert!((s.area - 4.0).abs() < 1e-12);
        assert_eq!(s.holomorphy_residual, 0.0);
    }

    #[test]
    fn three_sheets_have_three_boundaries() {
        let c = generate(&FamilySpec::flat_sheets(3).with_resolution(0.2)).unwrap();
        let s = c.stats();
        assert_eq!((s.genus, s.boundary_count, s.components), (0, 3, 3));
    }

    #[test]
    fn branched_cover_is_a_connected_disk() {
        for d in 1..=3 {
            let c = generate(&FamilySpec::branched_cover(d).with_resolution(0.1)).unwrap();
            DiscreteCurve::new(None, c.vertices.clone(), c.faces.clone()).unwrap();
            let s = c.stats();
            assert_eq!((s.genus, s.boundary_count, s.components), (0, 1, 1), "d = {d}");
        }
    }

    #[test]
    fn branched_projected_area_is_degree_times_domain() {
        let spec = FamilySpec::branched_cover(2).with_resolution(0.04);
        let c = generate(&spec).unwrap();
        let side = 2.0 * (1.0 + spec.margin);
        let rel = c.projected_area() / (2.0 * side * side);
        assert!((rel - 1.0).abs() < 0.01, "relative projected area {rel}");
        // All faces are positively oriented over the z-line.
        assert!((0..c.faces.len()).all(|f| c.face_projected_signed_area(f) > 0.0));
    }

    #[test]
    fn branch_too_close_to_the_edge_is_rejected() {
        let mut spec = FamilySpec::branched_cover(2).with_resolution(0.1);
        spec.branch = Complex64::new(0.9, 0.0);
        assert!(matches!(generate(&spec), Err(Error::BranchTooCoarse { .. })));
    }

    #[test]
    fn handle_body_genus_equals_tube_count() {
        for n in [1usize, 5, 12] {
            let spec = FamilySpec::handle_body(2, n).with_resolution(0.05);
            let c = generate(&spec).unwrap();
            let s = c.stats();
            assert_eq!((s.genus, s.boundary_count, s.components), (n as i64, 2, 1), "tubes = {n}");
        }
        let spec = FamilySpec::handle_body(3, 4).with_resolution(0.05);
        let s = generate(&spec).unwrap().stats();
        assert_eq!((s.genus, s.boundary_count), (4, 3));
    }

    #[test]
    fn oracle_fibers() {
        assert_eq!(sheet_oracle(&FamilySpec::flat_sheets(3), Complex64::new(0.3, 0.1)).unwrap().len(), 3);
        let bc = FamilySpec::branched_cover(2);
        let mut ws: Vec<f64> = sheet_oracle(&bc, Complex64::new(1.0, 0.0))
            .unwrap()
            .iter()
            .map(|p| p.w.re)
            .collect();
        ws.sort_by(|a, b| a.partial_cmp(b).unwrap());
        assert!((ws[0] + 1.0).abs() < 1e-15 && (ws[1] - 1.0).abs() < 1e-15);
        let q: Vec<Point> = sheet_oracle(&bc, Complex64::new(0.25, 0.0)).unwrap();
        assert!(q.iter().all(|p| (p.w.norm() - 0.5).abs() < 1e-15 && p.w.im.abs() < 1e-15));
        assert!(matches!(sheet_oracle(&bc, Complex64::new(0.0, 0.0)), Err(Error::BranchValue(_))));
    }

    #[test]
    fn ball_domain_stays_in_the_ball() {
        let spec = FamilySpec::poly_graph(FamilySpec::default().coefficients)
            .with_resolution(0.05)
            .with_domain(Domain::Ball);
        let c = generate(&spec).unwrap();
        let r = 1.0 + spec.margin;
        assert!(c.vertices.iter().all(|p| p.norm_sqr().sqrt() <= r * (1.0 + 1e-6)));
        assert_eq!(c.stats().genus, 0);
    }

    #[test]
    fn holomorphy_residual_shrinks_under_refinement() {
        for spec in [
            FamilySpec::poly_graph(FamilySpec::default().coefficients),
            FamilySpec::branched_cover(2),
        ] {
            let coarse = generate(&spec.clone().with_resolution(0.1)).unwrap().stats().holomorphy_residual;
            let fine = generate(&spec.clone().with_resolution(0.05)).unwrap().stats().holomorphy_residual;
            assert!(fine * 2.0 <= coarse, "{:?}: {coarse} -> {fine}", spec.family);
        }
    }
}
