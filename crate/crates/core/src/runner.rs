//! End-to-end pipeline: generation, trimming, projection, per-`k` counting
//! and current assembly, and the report files.

use std::fs;
use std::path::Path;

use log::{info, warn};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::RunConfig;
use crate::counting::{self, BoundReport, CountingGraph, CoveringStats, ValenceReport};
use crate::current::{self, CurrentApprox, RefinementReport};
use crate::error::{Error, Result};
use crate::fibers::{self, Classification, Extraction, FiberComponent, PruneReport};
use crate::forge::{self, FamilySpec};
use crate::mesh::{CurveStats, DiscreteCurve};
use crate::paving::{self, GridSpec, PavedCurve, Paving, ProjectionFrame, Region};
use crate::trim::{self, TrimReport};

/// A pass/fail line in a report.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    fn new(name: &str, passed: bool, detail: impl Into<String>) -> Self {
        Check {
            name: name.into(),
            passed,
            detail: detail.into(),
        }
    }
}

/// The curve after trimming and projection, shared by every `k`.
pub struct Prepared {
    pub name: String,
    pub holomorphic: Option<bool>,
    pub curve: DiscreteCurve,
    pub stats: CurveStats,
    pub input_stats: CurveStats,
    pub raw_euler: i64,
    pub trim: Option<TrimReport>,
    pub frame: ProjectionFrame,
    pub jitter: (f64, f64),
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// `V − E + F` counting every referenced vertex once.
fn raw_euler(c: &DiscreteCurve) -> i64 {
    let mut used = vec![false; c.vertices.len()];
    for f in &c.faces {
        for &v in f {
            used[v as usize] = true;
        }
    }
    let v = used.iter().filter(|&&u| u).count() as i64;
    v - c.edges().edges.len() as i64 + c.faces.len() as i64
}

pub fn prepare(config: &RunConfig, spec: &FamilySpec) -> Result<Prepared> {
    let input = forge::generate(spec).map_err(|e| e.in_stage("generate"))?;
    let input_stats = input.stats();
    let raw = raw_euler(&input);
    let (curve, trim_report) = if config.trim_enabled {
        let (c, r) = trim::trim(&input, &config.trim).map_err(|e| e.in_stage("trim"))?;
        (c, Some(r))
    } else {
        (input, None)
    };
    if curve.is_empty() {
        return Err(Error::EmptyCurve.in_stage("trim"));
    }
    let frame = paving::choose_direction(&curve, config.direction_samples, config.seed)
        .map_err(|e| e.in_stage("choose_direction"))?;
    let curve = frame.apply_curve(&curve);
    let stats = curve.stats();
    let k_all = config.k_list.iter().fold(1, |l, &k| l / gcd(l, k) * k);
    let zs: Vec<Complex64> = curve.vertices.iter().map(|p| p.z).collect();
    let jitter = paving::choose_jitter(
        &zs,
        k_all,
        config.jitter_amplitude,
        config.jitter_tol,
        config.seed,
        config.jitter_attempts,
    )
    .map_err(|e| e.in_stage("build_grid"))?;
    Ok(Prepared {
        name: curve.name.clone().unwrap_or_else(|| "curve".into()),
        holomorphic: spec.is_holomorphic(),
        curve,
        stats,
        input_stats,
        raw_euler: raw,
        trim: trim_report,
        frame,
        jitter,
    })
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ClassCounts {
    pub long_boundary: usize,
    pub covering: usize,
    pub small: usize,
    pub other: usize,
    pub island: usize,
    pub ramified_island: usize,
    pub non_island: usize,
}

impl ClassCounts {
    fn of<'a>(it: impl Iterator<Item = &'a FiberComponent>) -> Self {
        let mut c = ClassCounts::default();
        for x in it {
            match x.classification {
                Classification::LongBoundary => c.long_boundary += 1,
                Classification::Covering => c.covering += 1,
                Classification::Small => c.small += 1,
                Classification::Other => c.other += 1,
                Classification::Island => c.island += 1,
                Classification::RamifiedIsland => c.ramified_island += 1,
                Classification::NonIsland => c.non_island += 1,
            }
        }
        c
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KReport {
    pub k: usize,
    pub epsilon_k: f64,
    pub q_family: usize,
    pub family_sheet_numbers: [f64; 4],
    pub mean_sheet_number: f64,
    pub paved_faces: usize,
    pub slivers: usize,
    pub crosses: usize,
    pub clipped_crosses: usize,
    pub cross_classes: ClassCounts,
    pub q_classes: ClassCounts,
    pub cell_classes: ClassCounts,
    pub prune: PruneReport,
    pub vertex_count: usize,
    pub edge_count: usize,
    pub closed_arcs: usize,
    pub euler_outside_q_graph: i64,
    pub euler_outside_q_mesh: i64,
    pub bound: BoundReport,
    pub h: f64,
    pub max_ahlfors_ratio: f64,
    pub valence_violations: usize,
    pub valence: ValenceReport,
    pub good_islands: usize,
    pub ramified: usize,
    /// Good islands over `4k²·S_n` cells.
    pub good_island_fraction: f64,
    pub mass_tn: f64,
    pub mass_tkn: f64,
    pub defect: f64,
    pub mass_fraction: f64,
    pub transverse_mean: f64,
    pub theorem_checks: Vec<Check>,
    pub hypothesis_checks: Vec<Check>,
}

/// Everything computed at one `k`.
pub struct KOutcome {
    pub report: KReport,
    pub paved: PavedCurve,
    pub paving: Paving,
    pub regions: Vec<FiberComponent>,
    pub cells: Vec<FiberComponent>,
    pub graph: CountingGraph,
    pub stats: Vec<CoveringStats>,
    pub current: CurrentApprox,
}

pub fn analyze_k(p: &Prepared, config: &RunConfig, k: usize, h: f64) -> Result<KOutcome> {
    let th = config.thresholds();
    let eps = config.epsilon.unwrap_or_else(|| paving::default_epsilon(k));
    let grid = GridSpec::new(k, p.jitter, eps).map_err(|e| e.in_stage("build_grid"))?;
    let paved = PavedCurve::new(&p.curve, &grid).map_err(|e| e.in_stage("build_grid"))?;
    let grid = paving::select_q(&paved, &grid);
    let paving = Paving::build(&grid);
    let l_n = p.stats.boundary_length;

    let mut alive = vec![true; paved.mesh.faces.len()];
    let first = fibers::region_components(&paved, &paving, &alive, &th);
    let prune = fibers::prune_small(&first, &mut alive, k, l_n);
    let rc = fibers::region_components(&paved, &paving, &alive, &th);
    let ex = &rc.extraction;

    let arcs = fibers::alpha_arcs(&paved, &paving, ex);
    let graph = counting::build_graph(&paved, &paving, ex, &arcs).map_err(|e| e.in_stage("build_graph"))?;
    let stats = counting::ahlfors_stats(&paved, &paving, ex);
    let (chi, islands) = counting::curve_euler_and_islands(&paved, ex);
    let bound = counting::island_lower_bound(&graph, chi, islands);
    let valence = counting::valence_bound_check(&graph, &stats, ex, &paving, h, l_n);

    let cells = fibers::cell_components(&paved, &paving, &alive, &th);
    let mut cur = current::assemble(&paved, &grid, &cells, p.stats.area).map_err(|e| e.in_stage("assemble"))?;
    current::sample_transverse(&mut cur, config.transverse_samples, config.seed);

    let is_cross = |c: &&FiberComponent| matches!(c.region, Region::Cross(_));
    let cross_classes = ClassCounts::of(ex.components.iter().filter(is_cross));
    let q_classes = ClassCounts::of(ex.components.iter().filter(|c| !is_cross(c)));
    let cell_classes = ClassCounts::of(cells.components.iter());
    let max_ahlfors_ratio = stats
        .iter()
        .filter(|s| s.rel_boundary > config.h_floor)
        .map(|s| s.max_deviation / s.rel_boundary)
        .fold(0.0, f64::max);
    let n_cells = (grid.cells_per_side() * grid.cells_per_side()) as f64;
    let good_island_fraction = if grid.mean_sheet_number > 0.0 {
        cur.good_island_count() as f64 / (n_cells * grid.mean_sheet_number)
    } else {
        0.0
    };
    let transverse_mean = if cur.transverse_counts.is_empty() {
        0.0
    } else {
        cur.transverse_counts.iter().map(|t| t.1).sum::<f64>() / cur.transverse_counts.len() as f64
    };

    let mut theorem = vec![
        Check::new(
            "handshake",
            graph.handshake_holds(),
            format!("sum of valences {} vs 2a = {}", graph.valences.iter().sum::<usize>(), 2 * graph.edge_count),
        ),
        Check::new(
            "euler_agreement",
            graph.euler_agrees(),
            format!("graph {} vs mesh {}", graph.euler_outside_q, graph.euler_outside_q_mesh),
        ),
        Check::new(
            "island_chain",
            bound.holds,
            format!(
                "islands {} >= chi {} + a {} - s {} (slacks {}, {}, {})",
                bound.islands, chi, graph.edge_count, graph.vertex_count, bound.slack_islands, bound.slack_graph, bound.slack_bound
            ),
        ),
        Check::new(
            "prune_bound",
            prune.within_bound,
            format!("pruned mass {:.3e} <= {:.3e}", prune.removed_mass, prune.bound),
        ),
        Check::new("patch_disjointness", current::patches_disjoint(&cur), ""),
    ];
    let other = cross_classes.other + q_classes.other;
    let other_check = Check::new("no_other_components", other == 0, format!("{other} OTHER components"));
    let mut hypothesis = vec![
        Check::new(
            "ahlfors",
            valence.ahlfors_holds,
            format!("max |S - S(alpha)|/L = {max_ahlfors_ratio:.4} with h = {h:.4}"),
        ),
        Check::new(
            "valence",
            valence.violations.is_empty(),
            format!("{} of {} vertices violate", valence.violations.len(), valence.checked_vertices),
        ),
        Check::new(
            "aggregate_valence",
            valence.aggregate_holds,
            format!("{} >= {:.3}", valence.valence_sum, valence.aggregate_rhs),
        ),
        Check::new(
            "vertex_bound",
            valence.vertex_bound_holds,
            format!("s = {} <= {:.3}", graph.vertex_count, valence.vertex_bound),
        ),
        Check::new(
            "defect",
            cur.defect <= eps * cur.mass_curve,
            format!("defect {:.4e} vs eps*mass {:.4e}", cur.defect, eps * cur.mass_curve),
        ),
    ];
    if p.holomorphic == Some(true) {
        theorem.push(other_check);
    } else {
        hypothesis.push(other_check);
    }

    let report = KReport {
        k,
        epsilon_k: eps,
        q_family: grid.q_family,
        family_sheet_numbers: grid.family_sheet_numbers,
        mean_sheet_number: grid.mean_sheet_number,
        paved_faces: paved.mesh.faces.len(),
        slivers: ex.slivers,
        crosses: paving.crosses.len(),
        clipped_crosses: paving.crosses.iter().filter(|c| c.clipped).count(),
        cross_classes,
        q_classes,
        cell_classes,
        prune,
        vertex_count: graph.vertex_count,
        edge_count: graph.edge_count,
        closed_arcs: graph.closed_arcs,
        euler_outside_q_graph: graph.euler_outside_q,
        euler_outside_q_mesh: graph.euler_outside_q_mesh,
        bound,
        h,
        max_ahlfors_ratio,
        valence_violations: valence.violations.len(),
        valence: ValenceReport {
            violations: Vec::new(),
            ..valence
        },
        good_islands: cur.good_island_count(),
        ramified: cur.ramified_count,
        good_island_fraction,
        mass_tn: cur.mass_curve,
        mass_tkn: cur.mass_pi_omega,
        defect: cur.defect,
        mass_fraction: cur.mass_fraction(),
        transverse_mean,
        theorem_checks: theorem,
        hypothesis_checks: hypothesis,
    };
    let Extraction { components, .. } = rc.extraction;
    Ok(KOutcome {
        report,
        paved,
        paving,
        regions: components,
        cells: cells.components,
        graph,
        stats,
        current: cur,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CalibrationReport {
    pub h: f64,
    pub default_used: bool,
    pub corpus: Vec<String>,
    pub k_list: Vec<usize>,
    pub components: usize,
    pub components_with_boundary: usize,
    pub floor: f64,
}

/// Calibrates `h` over the holomorphic generator suite at the configured
/// scales.
pub fn calibrate(config: &RunConfig) -> Result<CalibrationReport> {
    let suite = forge::holomorphic_suite(config.calibration_resolution);
    calibrate_on(config, &suite)
}

pub fn calibrate_on(config: &RunConfig, corpus: &[(String, FamilySpec)]) -> Result<CalibrationReport> {
    let results: Vec<Result<Vec<CoveringStats>>> = in_pool(config, || {
        corpus
            .par_iter()
            .map(|(_, spec)| {
                let p = prepare(config, spec)?;
                let mut all = Vec::new();
                for &k in &config.k_list {
                    all.extend(analyze_k(&p, config, k, config.h_default)?.stats);
                }
                Ok(all)
            })
            .collect()
    });
    let mut stats = Vec::new();
    for r in results {
        stats.extend(r?);
    }
    let with_boundary = stats.iter().filter(|s| s.rel_boundary > config.h_floor).count();
    if with_boundary == 0 {
        warn!("calibration corpus has no component with boundary; using h = {}", config.h_default);
    }
    Ok(CalibrationReport {
        h: counting::calibrate_h(&stats, config.h_floor, config.h_default),
        default_used: with_boundary == 0,
        corpus: corpus.iter().map(|c| c.0.clone()).collect(),
        k_list: config.k_list.clone(),
        components: stats.len(),
        components_with_boundary: with_boundary,
        floor: config.h_floor,
    })
}

fn in_pool<T: Send>(config: &RunConfig, f: impl FnOnce() -> T + Send) -> T {
    if config.threads == 0 {
        return f();
    }
    match rayon::ThreadPoolBuilder::new().num_threads(config.threads).build() {
        Ok(pool) => pool.install(f),
        Err(_) => f(),
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub curve: String,
    pub holomorphic: Option<bool>,
    pub seed: u64,
    pub input_stats: CurveStats,
    pub stats: CurveStats,
    pub trim: Option<TrimReport>,
    pub direction: [Complex64; 2],
    pub omega_mass: f64,
    pub jitter: (f64, f64),
    pub h: f64,
    pub h_source: String,
    pub per_k: Vec<KReport>,
    pub refinement: Vec<RefinementReport>,
    pub theorem_checks: Vec<Check>,
    pub hypothesis_checks: Vec<Check>,
    pub theorem_ok: bool,
}

fn resolve_h(config: &RunConfig) -> Result<(f64, String)> {
    if let Some(h) = config.h {
        return Ok((h, "config".into()));
    }
    if let Some(path) = &config.calibration {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let cal: CalibrationReport =
            serde_json::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        return Ok((cal.h, path.display().to_string()));
    }
    Ok((config.h_default, "default".into()))
}

/// Runs the pipeline at every `k` and checks nesting across consecutive
/// doubled scales.
pub fn run(config: &RunConfig) -> Result<(RunReport, Vec<KOutcome>)> {
    let (h, h_source) = resolve_h(config)?;
    let p = prepare(config, &config.family)?;
    info!(
        "{}: {} faces, area {:.4}, genus {}",
        p.name,
        p.curve.faces.len(),
        p.stats.area,
        p.stats.genus
    );
    let outcomes: Vec<Result<KOutcome>> =
        in_pool(config, || config.k_list.par_iter().map(|&k| analyze_k(&p, config, k, h)).collect());
    let outcomes = outcomes.into_iter().collect::<Result<Vec<_>>>()?;

    let mut refinement = Vec::new();
    let mut refinement_ok = true;
    let mut refinement_detail = String::new();
    for w in outcomes.windows(2) {
        if w[1].report.k != 2 * w[0].report.k {
            continue;
        }
        match current::check_refinement(&w[0].current, &w[0].paved, &w[1].current, &w[1].paved) {
            Ok(r) => refinement.push(r),
            Err(e) => {
                refinement_ok = false;
                refinement_detail = e.to_string();
            }
        }
    }
    let vef = p.raw_euler;
    let mut theorem = vec![
        Check::new(
            "topology",
            vef == p.input_stats.euler_characteristic,
            format!("V - E + F = {vef}, sum(2 - 2g - b) = {}", p.input_stats.euler_characteristic),
        ),
        Check::new("refinement", refinement_ok, refinement_detail),
    ];
    let mut hypothesis = Vec::new();
    if let Some(t) = &p.trim {
        hypothesis.push(Check::new(
            "trim_budget",
            t.within_budget,
            format!("(L+G+B)/A = {:.3} vs budget {}", t.ratio, config.trim.budget),
        ));
    }
    for o in &outcomes {
        let tag = |c: &Check| Check::new(&format!("{}@k={}", c.name, o.report.k), c.passed, c.detail.clone());
        theorem.extend(o.report.theorem_checks.iter().map(tag));
        hypothesis.extend(o.report.hypothesis_checks.iter().map(tag));
    }
    let theorem_ok = theorem.iter().all(|c| c.passed);
    let report = RunReport {
        curve: p.name.clone(),
        holomorphic: p.holomorphic,
        seed: config.seed,
        input_stats: p.input_stats.clone(),
        stats: p.stats.clone(),
        trim: p.trim.clone(),
        direction: p.frame.direction,
        omega_mass: p.frame.omega_mass,
        jitter: p.jitter,
        h,
        h_source,
        per_k: outcomes.iter().map(|o| o.report.clone()).collect(),
        refinement,
        theorem_checks: theorem,
        hypothesis_checks: hypothesis,
        theorem_ok,
    };
    Ok((report, outcomes))
}

#[derive(Serialize)]
struct IslandRow {
    k: usize,
    i: usize,
    j: usize,
    family: usize,
    in_q: bool,
    classification: &'static str,
    degree: f64,
    projected_area: f64,
    faces: usize,
}

#[derive(Serialize)]
struct ComponentRow {
    k: usize,
    region: &'static str,
    region_id: u32,
    clipped: bool,
    classification: &'static str,
    euler: i64,
    projected_area: f64,
    signed_projected_area: f64,
    rel_boundary_length: f64,
    degree: f64,
    critical_point: bool,
    faces: usize,
}

#[derive(Serialize)]
pub struct DefectRow {
    pub k: usize,
    pub epsilon_k: f64,
    pub mass_tn: f64,
    pub mass_tkn: f64,
    pub defect: f64,
    pub good_island_count: usize,
    pub ramified_count: usize,
}

fn csv_writer(path: &Path) -> Result<csv::Writer<fs::File>> {
    csv::Writer::from_path(path).map_err(|e| Error::io(path, std::io::Error::other(e)))
}

fn write_rows<T: Serialize>(path: &Path, rows: impl Iterator<Item = T>) -> Result<()> {
    let mut w = csv_writer(path)?;
    for r in rows {
        w.serialize(r).map_err(|e| Error::io(path, std::io::Error::other(e)))?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let text = serde_json::to_string_pretty(value).map_err(|e| Error::io(path, std::io::Error::other(e)))?;
    fs::write(path, text + "\n").map_err(|e| Error::io(path, e))
}

fn mkdir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))
}

/// Writes `run_report.json`, `islands.csv`, `components.csv` and
/// `defect_vs_k.csv`.
pub fn write_outputs(dir: &Path, report: &RunReport, outcomes: &[KOutcome]) -> Result<()> {
    mkdir(dir)?;
    write_json(&dir.join("run_report.json"), report)?;
    let q_of = |o: &KOutcome, i: usize, j: usize| {
        GridSpec::family_of(i, j) == o.paving.grid.q_family
    };
    write_rows(
        &dir.join("islands.csv"),
        outcomes.iter().flat_map(|o| {
            let area = o.paving.grid.cell_area();
            o.cells
                .iter()
                .filter(|c| matches!(c.classification, Classification::Island | Classification::RamifiedIsland))
                .map(move |c| {
                    let (i, j) = c.cell.unwrap_or_default();
                    IslandRow {
                        k: o.report.k,
                        i,
                        j,
                        family: GridSpec::family_of(i, j),
                        in_q: q_of(o, i, j),
                        classification: c.classification.as_str(),
                        degree: c.degree(area),
                        projected_area: c.projected_area,
                        faces: c.faces.len(),
                    }
                })
        }),
    )?;
    write_rows(
        &dir.join("components.csv"),
        outcomes.iter().flat_map(|o| {
            o.regions.iter().map(move |c| {
                let (region, id, clipped) = match c.region {
                    Region::Cross(x) => ("cross", x, o.paving.crosses[x as usize].clipped),
                    Region::Q(q) => ("q", q, false),
                };
                ComponentRow {
                    k: o.report.k,
                    region,
                    region_id: id,
                    clipped,
                    classification: c.classification.as_str(),
                    euler: c.euler,
                    projected_area: c.projected_area,
                    signed_projected_area: c.signed_projected_area,
                    rel_boundary_length: c.rel_boundary_length,
                    degree: c.degree(o.paving.region_area(c.region)),
                    critical_point: c.critical_point,
                    faces: c.faces.len(),
                }
            })
        }),
    )?;
    write_rows(&dir.join("defect_vs_k.csv"), defect_rows(report))
}

pub fn defect_rows(report: &RunReport) -> impl Iterator<Item = DefectRow> + '_ {
    report.per_k.iter().map(|r| DefectRow {
        k: r.k,
        epsilon_k: r.epsilon_k,
        mass_tn: r.mass_tn,
        mass_tkn: r.mass_tkn,
        defect: r.defect,
        good_island_count: r.good_islands,
        ramified_count: r.ramified,
    })
}

/// Generates the configured curve and writes it with its statistics.
pub fn generate_to(config: &RunConfig, dir: &Path) -> Result<CurveStats> {
    let curve = forge::generate(&config.family)?;
    mkdir(dir)?;
    curve.save(&dir.join("curve.json"))?;
    let stats = curve.stats();
    write_json(&dir.join("curve_stats.json"), &stats)?;
    Ok(stats)
}

pub fn write_calibration(dir: &Path, cal: &CalibrationReport) -> Result<()> {
    mkdir(dir)?;
    write_json(&dir.join("calibration.json"), cal)
}
