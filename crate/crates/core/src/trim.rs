//! Trimming a curve to three concentric balls.
//!
//! The curve is cut along the spheres of radius `rho` and `rho'`. What
//! remains is the part inside `rho·B` together with the components of the
//! shell `rho'·B − rho·B` that touch the inner sphere. Among the candidate
//! outer radii the one giving the shortest boundary is kept.

use serde::{Deserialize, Serialize};

use crate::cut::{self, SquaredRadius};
use crate::error::{Error, Result};
use crate::mesh::{DiscreteCurve, EdgeTable};
use crate::unionfind::UnionFind;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrimParams {
    pub rho: f64,
    pub rho_prime_candidates: Vec<f64>,
    /// Admissible `(L + G + B) / A`.
    pub budget: f64,
}

impl Default for TrimParams {
    fn default() -> Self {
        TrimParams {
            rho: 0.7,
            rho_prime_candidates: vec![0.8, 0.85, 0.9],
            budget: 8.0,
        }
    }
}

impl TrimParams {
    pub fn validate(&self) -> Result<()> {
        let lo = self.rho_prime_candidates.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = self.rho_prime_candidates.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        if !(self.rho > 0.0 && self.rho < lo && hi < 1.0) {
            return Err(Error::InvalidSpec(format!(
                "trim radii must satisfy 0 < rho < rho' < 1 (rho = {}, rho' in [{lo}, {hi}])",
                self.rho
            )));
        }
        if !(self.budget > 0.0) {
            return Err(Error::InvalidSpec("trim budget must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrimReport {
    pub rho: f64,
    /// `None` when the curve already lay inside `rho·B`.
    pub rho_prime_selected: Option<f64>,
    #[serde(rename = "L")]
    pub boundary_length: f64,
    #[serde(rename = "G")]
    pub genus: i64,
    #[serde(rename = "B")]
    pub boundary_count: usize,
    #[serde(rename = "A")]
    pub area: f64,
    pub ratio: f64,
    /// False when every candidate exceeded the budget.
    pub within_budget: bool,
    pub genus_before: i64,
    /// Shell components kept because they touch the inner sphere.
    pub glued_components: usize,
    pub dropped_components: usize,
    /// Boundary loops not lying on the outer sphere (should be 0 when the
    /// input curve has no boundary inside the outer ball).
    pub stray_boundary_loops: usize,
}

struct Candidate {
    rho_prime: f64,
    curve: DiscreteCurve,
    glued: usize,
    dropped: usize,
}

/// Moves `r` off any vertex radius, so no vertex lies on the sphere.
fn nudge(curve: &DiscreteCurve, r: f64) -> f64 {
    let tol = 1e-12 * r.max(1.0);
    let mut out = r;
    for step in 1..=64 {
        if !curve.vertices.iter().any(|p| (p.norm_sqr().sqrt() - out).abs() <= tol) {
            break;
        }
        out = r * (1.0 + 1e-9 * step as f64);
    }
    out
}

fn trim_at(curve: &DiscreteCurve, rho: f64, rho_prime: f64) -> Result<Candidate> {
    let r0 = nudge(curve, rho);
    let r1 = nudge(curve, rho_prime);
    let levels = [r0 * r0, r1 * r1];
    let parent: Vec<u32> = (0..curve.faces.len() as u32).collect();
    let cm = cut::cut_by_levels(&curve.vertices, &curve.faces, &parent, &SquaredRadius, &levels);
    let cutc = DiscreteCurve::from_parts(curve.name.clone(), cm.vertices, cm.faces);
    // 0: inner ball, 1: shell, 2: outside.
    let band: Vec<u8> = (0..cutc.faces.len())
        .map(|f| {
            let mean = cutc.corners(f).iter().map(|p| p.norm_sqr()).sum::<f64>() / 3.0;
            if mean < levels[0] {
                0
            } else if mean < levels[1] {
                1
            } else {
                2
            }
        })
        .collect();
    let edges = EdgeTable::build(&cutc.faces)?;
    let mut uf = UnionFind::new(cutc.faces.len());
    let mut touches = vec![false; cutc.faces.len()];
    for e in edges.edges.iter().filter(|e| !e.is_boundary()) {
        let (a, b) = (e.faces[0] as usize, e.faces[1] as usize);
        match (band[a], band[b]) {
            (1, 1) => {
                uf.union(a, b);
            }
            (1, 0) => touches[a] = true,
            (0, 1) => touches[b] = true,
            _ => {}
        }
    }
    let mut root_touches = vec![false; cutc.faces.len()];
    let mut roots = vec![false; cutc.faces.len()];
    for f in (0..cutc.faces.len()).filter(|&f| band[f] == 1) {
        let r = uf.find(f);
        roots[r] = true;
        root_touches[r] |= touches[f];
    }
    let glued = (0..roots.len()).filter(|&r| roots[r] && root_touches[r]).count();
    let dropped = (0..roots.len()).filter(|&r| roots[r] && !root_touches[r]).count();
    let keep: Vec<bool> = (0..cutc.faces.len())
        .map(|f| band[f] == 0 || (band[f] == 1 && root_touches[uf.find(f)]))
        .collect();
    let (curve, _) = cutc.subset(|f| keep[f]);
    Ok(Candidate {
        rho_prime: r1,
        curve,
        glued,
        dropped,
    })
}

/// Trims `curve` to `rho·B` plus the shell components glued to it.
pub fn trim(curve: &DiscreteCurve, params: &TrimParams) -> Result<(DiscreteCurve, TrimReport)> {
    params.validate()?;
    let before = curve.stats();
    let max_r = curve.vertices.iter().map(|p| p.norm_sqr()).fold(0.0, f64::max).sqrt();
    if max_r < params.rho {
        let ratio = ratio_of(&before);
        return Ok((
            curve.clone(),
            TrimReport {
                rho: params.rho,
                rho_prime_selected: None,
                boundary_length: before.boundary_length,
                genus: before.genus,
                boundary_count: before.boundary_count,
                area: before.area,
                ratio,
                within_budget: ratio <= params.budget,
                genus_before: before.genus,
                glued_components: 0,
                dropped_components: 0,
                stray_boundary_loops: 0,
            },
        ));
    }
    let mut candidates = params.rho_prime_candidates.clone();
    candidates.sort_by(f64::total_cmp);
    candidates.dedup();
    let mut evaluated = Vec::with_capacity(candidates.len());
    for &rp in &candidates {
        let c = trim_at(curve, params.rho, rp)?;
        let stats = c.curve.stats();
        evaluated.push((c, stats));
    }
    let within_budget = evaluated.iter().any(|(_, s)| ratio_of(s) <= params.budget);
    // Shortest boundary among the admissible candidates; ties go to the
    // smallest radius since the list is sorted and the comparison strict.
    let mut best: Option<usize> = None;
    for (i, (_, s)) in evaluated.iter().enumerate() {
        if within_budget && ratio_of(s) > params.budget {
            continue;
        }
        match best {
            Some(b) if evaluated[b].1.boundary_length <= s.boundary_length => {}
            _ => best = Some(i),
        }
    }
    let (chosen, stats) = evaluated.swap_remove(best.expect("at least one candidate"));
    let stray = stray_loops(&chosen.curve, chosen.rho_prime);
    let report = TrimReport {
        rho: params.rho,
        rho_prime_selected: Some(chosen.rho_prime),
        boundary_length: stats.boundary_length,
        genus: stats.genus,
        boundary_count: stats.boundary_count,
        area: stats.area,
        ratio: ratio_of(&stats),
        within_budget,
        genus_before: before.genus,
        glued_components: chosen.glued,
        dropped_components: chosen.dropped,
        stray_boundary_loops: stray,
    };
    Ok((chosen.curve, report))
}

fn ratio_of(s: &crate::mesh::CurveStats) -> f64 {
    if s.area > 0.0 {
        (s.boundary_length + s.genus as f64 + s.boundary_count as f64) / s.area
    } else {
        f64::INFINITY
    }
}

fn stray_loops(curve: &DiscreteCurve, rho_prime: f64) -> usize {
    let tol = 1e-9 * rho_prime.max(1.0);
    curve
        .topology()
        .boundary_loops
        .iter()
        .filter(|l| {
            l.vertices
                .iter()
                .any(|&v| (curve.vertices[v as usize].norm_sqr().sqrt() - rho_prime).abs() > tol)
        })
        .count()
}

/// Scales the curve by `1 / rho`, so the inner ball becomes the unit ball.
pub fn rescale(curve: &DiscreteCurve, rho: f64) -> DiscreteCurve {
    curve.map_points(|p| p.scale(1.0 / rho))
}
