//! Conforming cuts of a triangle mesh along level sets of a scalar field.
//!
//! Each triangle is split successively by every level strictly inside its
//! value range. New vertices are created on mesh edges and cached by
//! `(edge, level)`, so the two faces sharing an edge receive the same cut
//! vertex and the result is again a conforming surface with the same
//! orientation.

use std::collections::HashMap;

use crate::mesh::Point;

pub trait ScalarField {
    fn value(&self, p: &Point) -> f64;

    /// The point of segment `[a, b]` where the field equals `level`.
    fn crossing(&self, a: &Point, b: &Point, level: f64) -> Point;
}

/// `Re z`; crossings are snapped exactly onto the level.
pub struct CoordX;

/// `Im z`; crossings are snapped exactly onto the level.
pub struct CoordY;

/// `|z|² + |w|²`; crossings solve the quadratic along the edge.
pub struct SquaredRadius;

impl ScalarField for CoordX {
    fn value(&self, p: &Point) -> f64 {
        p.z.re
    }

    fn crossing(&self, a: &Point, b: &Point, level: f64) -> Point {
        let t = (level - a.z.re) / (b.z.re - a.z.re);
        let mut p = Point::lerp(a, b, t);
        p.z.re = level;
        p
    }
}

impl ScalarField for CoordY {
    fn value(&self, p: &Point) -> f64 {
        p.z.im
    }

    fn crossing(&self, a: &Point, b: &Point, level: f64) -> Point {
        let t = (level - a.z.im) / (b.z.im - a.z.im);
        let mut p = Point::lerp(a, b, t);
        p.z.im = level;
        p
    }
}

impl ScalarField for SquaredRadius {
    fn value(&self, p: &Point) -> f64 {
        p.norm_sqr()
    }

    fn crossing(&self, a: &Point, b: &Point, level: f64) -> Point {
        let d = b.sub(a);
        let qa = d.norm_sqr();
        let qb = 2.0 * (a.z.conj() * d.z + a.w.conj() * d.w).re;
        let qc = a.norm_sqr() - level;
        let disc = (qb * qb - 4.0 * qa * qc).max(0.0).sqrt();
        // Numerically stable pair of roots; keep the one in [0, 1].
        let q = -0.5 * (qb + qb.signum() * disc);
        let mut roots = [q / qa, if q != 0.0 { qc / q } else { f64::NAN }];
        roots.sort_by(|x, y| x.partial_cmp(y).unwrap_or(std::cmp::Ordering::Equal));
        let t = roots
            .iter()
            .copied()
            .filter(|t| t.is_finite())
            .min_by(|x, y| dist01(*x).partial_cmp(&dist01(*y)).unwrap())
            .unwrap_or(0.5)
            .clamp(0.0, 1.0);
        Point::lerp(a, b, t)
    }
}

fn dist01(t: f64) -> f64 {
    if t < 0.0 {
        -t
    } else if t > 1.0 {
        t - 1.0
    } else {
        0.0
    }
}

pub struct CutMesh {
    pub vertices: Vec<Point>,
    pub faces: Vec<[u32; 3]>,
    /// Index of the input face each output face came from.
    pub parent: Vec<u32>,
}

#[derive(Clone, Copy)]
struct PVert {
    id: u32,
    phi: f64,
    // Input-mesh edges this vertex lies on (two for an input vertex's
    // incident edges is not needed: input vertices are matched by id).
    on_edge: Option<(u32, u32)>,
}

fn common_edge(p: &PVert, q: &PVert) -> (u32, u32) {
    match (p.on_edge, q.on_edge) {
        (None, None) => (p.id.min(q.id), p.id.max(q.id)),
        (Some(e), None) | (None, Some(e)) => e,
        (Some(e1), Some(e2)) => {
            debug_assert_eq!(e1, e2, "crossing edge must lie on one input edge");
            e1
        }
    }
}

/// Cuts every face along each value in `levels` (sorted ascending).
/// `parent` maps input faces to the caller's face ids and is propagated.
pub fn cut_by_levels<F: ScalarField>(
    vertices: &[Point],
    faces: &[[u32; 3]],
    parent: &[u32],
    field: &F,
    levels: &[f64],
) -> CutMesh {
    debug_assert!(levels.windows(2).all(|w| w[0] < w[1]));
    let phi: Vec<f64> = vertices.iter().map(|p| field.value(p)).collect();
    let mut out_v = vertices.to_vec();
    let mut out_f = Vec::with_capacity(faces.len());
    let mut out_p = Vec::with_capacity(faces.len());
    let mut cache: HashMap<(u32, u32, u32), u32> = HashMap::new();

    for (fi, f) in faces.iter().enumerate() {
        let vals = [phi[f[0] as usize], phi[f[1] as usize], phi[f[2] as usize]];
        let lo = vals.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = vals.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let first = levels.partition_point(|&l| l <= lo);
        let last = levels.partition_point(|&l| l < hi);
        if first >= last {
            out_f.push(*f);
            out_p.push(parent[fi]);
            continue;
        }
        let mut poly: Vec<PVert> = (0..3)
            .map(|s| PVert {
                id: f[s],
                phi: vals[s],
                on_edge: None,
            })
            .collect();
        for li in first..last {
            let level = levels[li];
            let mut below = Vec::with_capacity(poly.len() + 1);
            let mut above = Vec::with_capacity(poly.len() + 1);
            let n = poly.len();
            for i in 0..n {
                let p = poly[i];
                let q = poly[(i + 1) % n];
                let dp = p.phi - level;
                let dq = q.phi - level;
                if dp <= 0.0 {
                    below.push(p);
                }
                if dp >= 0.0 {
                    above.push(p);
                }
                if (dp < 0.0 && dq > 0.0) || (dp > 0.0 && dq < 0.0) {
                    let (u, v) = common_edge(&p, &q);
                    let id = *cache.entry((u, v, li as u32)).or_insert_with(|| {
                        let pt = field.crossing(&out_v[u as usize], &out_v[v as usize], level);
                        out_v.push(pt);
                        (out_v.len() - 1) as u32
                    });
                    let x = PVert {
                        id,
                        phi: level,
                        on_edge: Some((u, v)),
                    };
                    below.push(x);
                    above.push(x);
                }
            }
            emit(&below, parent[fi], &mut out_f, &mut out_p);
            poly = above;
            if poly.len() < 3 {
                break;
            }
        }
        emit(&poly, parent[fi], &mut out_f, &mut out_p);
    }
    CutMesh {
        vertices: out_v,
        faces: out_f,
        parent: out_p,
    }
}

fn emit(poly: &[PVert], parent: u32, faces: &mut Vec<[u32; 3]>, parents: &mut Vec<u32>) {
    if poly.len() < 3 {
        return;
    }
    for i in 1..poly.len() - 1 {
        faces.push([poly[0].id, poly[i].id, poly[i + 1].id]);
        parents.push(parent);
    }
}
