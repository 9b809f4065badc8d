//! Translation of detections into a linear 0-1 program.

mod program;

pub use program::{soften, BinaryProgram, Family, LinearConstraint, Relation, VarKind, VarRef, Variable};

use std::collections::BTreeMap;

use log::warn;

use crate::error::Result;
use crate::geom::{
    angular_distance, bin_center, bin_direction, direction_deg, fit_line_segment, outward_normal, rasterize_segment,
    segment_hits_ray, segments_properly_intersect, segments_touch, trace_boundary, BitMask, Point2, Ray, Segment2,
    NUM_BINS,
};
use crate::model::{edge_candidates, CornerDetection, DetectionSet, EdgeCandidate, FeatureConfig, RegionDetection};

/// Edge term offset when corner confidences multiply the edge score.
pub const EDGE_OFFSET_WITH_CORNERS: f64 = 0.125;
/// Edge term offset for edge-only programs.
pub const EDGE_OFFSET: f64 = 0.5;
pub const DIR_WEIGHT: f64 = 0.1;
pub const DIR_OFFSET: f64 = 0.25;
pub const REGION_WEIGHT: f64 = 1.0;

#[derive(Debug, Clone, PartialEq)]
pub struct BuildParams {
    pub lambda_region_region: f64,
    pub lambda_ce: f64,
    pub lambda_region_enclose: f64,
    pub lambda_region_noncross: f64,
    pub slack_cap: f64,
    /// Empty rays only constrain a region when at least this fraction of its
    /// rays hit nothing.
    pub empty_ray_fraction: f64,
    pub ray_step: usize,
    pub ray_length: f64,
    pub ray_width: f64,
    pub beta_length: f64,
    pub ce_window_deg: f64,
    pub ce_bin_threshold: f64,
    /// Regions are eroded by this much before the non-crossing test.
    pub interior_erosion_px: usize,
}

impl Default for BuildParams {
    fn default() -> Self {
        Self {
            lambda_region_region: 1.0,
            lambda_ce: 1.0,
            lambda_region_enclose: 0.5,
            lambda_region_noncross: 0.5,
            slack_cap: 1.0,
            empty_ray_fraction: 0.2,
            ray_step: 2,
            ray_length: 100.0,
            ray_width: 2.0,
            beta_length: 16.0,
            ce_window_deg: 5.0,
            ce_bin_threshold: 0.2,
            interior_erosion_px: 2,
        }
    }
}

impl BuildParams {
    pub fn lambda(&self, family: Family) -> f64 {
        match family {
            Family::RegionRegion => self.lambda_region_region,
            Family::CeBin | Family::CePrune => self.lambda_ce,
            Family::RegionEnclose => self.lambda_region_enclose,
            Family::RegionNoncross => self.lambda_region_noncross,
            _ => f64::INFINITY,
        }
    }
}

/// The program together with what it was built from.
#[derive(Debug, Clone)]
pub struct Assembly {
    pub program: BinaryProgram,
    pub candidates: Vec<EdgeCandidate>,
    pub warnings: Vec<String>,
}

fn edge_var(e: &EdgeCandidate) -> VarRef {
    VarRef::edge(e.corner_a, e.corner_b)
}

/// `x_a * x_b = 0` over binaries, written as `x_a + x_b <= 1`.
pub fn exclusion(a: VarRef, b: VarRef, family: Family) -> LinearConstraint {
    LinearConstraint::new(vec![(1.0, a), (1.0, b)], Relation::Le, 1.0, family)
}

/// Objective coefficients in declaration order.
pub fn build_objective(
    d: &DetectionSet,
    candidates: &[EdgeCandidate],
    cfg: &FeatureConfig,
    params: &BuildParams,
) -> Vec<(VarRef, f64)> {
    let conf = |id: u32| d.corner(id).map_or(0.0, |c| c.confidence);
    let mut out = Vec::new();
    for e in candidates {
        let coef = if cfg.use_corners {
            e.confidence * conf(e.corner_a) * conf(e.corner_b) - EDGE_OFFSET_WITH_CORNERS
        } else {
            e.confidence - EDGE_OFFSET
        };
        out.push((edge_var(e), coef));
    }
    if cfg.use_regions {
        for r in sorted_regions(d) {
            out.push((VarRef::Region(r.id), REGION_WEIGHT));
        }
    }
    if cfg.use_ce_relations {
        for c in sorted_corners(d) {
            for b in active_bins(c, params) {
                let coef = DIR_WEIGHT * (c.direction_bins[b] * c.confidence - DIR_OFFSET);
                out.push((VarRef::Dir { corner: c.id, bin: b as u8 }, coef));
            }
        }
    }
    out
}

fn sorted_corners(d: &DetectionSet) -> Vec<&CornerDetection> {
    let mut v: Vec<&CornerDetection> = d.corners.iter().collect();
    v.sort_by_key(|c| c.id);
    v
}

fn sorted_regions(d: &DetectionSet) -> Vec<&RegionDetection> {
    let mut v: Vec<&RegionDetection> = d.regions.iter().collect();
    v.sort_by_key(|r| r.id);
    v
}

fn active_bins<'a>(c: &'a CornerDetection, params: &'a BuildParams) -> impl Iterator<Item = usize> + 'a {
    (0..NUM_BINS).filter(move |&b| c.direction_bins[b] >= params.ce_bin_threshold)
}

/// Endpoint activation, minimum degree and planarity constraints.
pub fn build_topology_constraints(candidates: &[EdgeCandidate], corners: &[CornerDetection]) -> Vec<LinearConstraint> {
    let mut out = Vec::new();
    for e in candidates {
        for c in [e.corner_a, e.corner_b] {
            out.push(LinearConstraint::new(
                vec![(1.0, edge_var(e)), (-1.0, VarRef::Corner(c))],
                Relation::Le,
                0.0,
                Family::TopologyEndpoint,
            ));
        }
    }
    let mut ids: Vec<u32> = corners.iter().map(|c| c.id).collect();
    ids.sort_unstable();
    for c in ids {
        let mut terms: Vec<(f64, VarRef)> =
            candidates.iter().filter(|e| e.corner_a == c || e.corner_b == c).map(|e| (1.0, edge_var(e))).collect();
        terms.push((-2.0, VarRef::Corner(c)));
        out.push(LinearConstraint::new(terms, Relation::Ge, 0.0, Family::TopologyDegree));
    }
    // Corners too close to be distinct vertices of one graph.
    let mut sorted: Vec<&CornerDetection> = corners.iter().collect();
    sorted.sort_by_key(|c| c.id);
    for (i, a) in sorted.iter().enumerate() {
        for b in &sorted[i + 1..] {
            if a.position.dist(b.position) < 1.0 {
                out.push(exclusion(VarRef::Corner(a.id), VarRef::Corner(b.id), Family::TopologyPlanarity));
            }
        }
    }
    for (k, ek) in candidates.iter().enumerate() {
        for el in &candidates[k + 1..] {
            if segments_properly_intersect(&ek.segment, &el.segment) {
                out.push(exclusion(edge_var(ek), edge_var(el), Family::TopologyPlanarity));
            }
        }
    }
    out
}

/// Rays cast outward from every `ray_step`-th boundary pixel of `mask`.
pub fn enclosure_rays(mask: &BitMask, params: &BuildParams) -> Vec<Ray> {
    let Ok(boundary) = trace_boundary(mask) else {
        return Vec::new();
    };
    let step = params.ray_step.max(1);
    (0..boundary.len())
        .step_by(step)
        .filter_map(|i| {
            let n = outward_normal(&boundary, i, mask).ok()?;
            Some(Ray::new(boundary[i], n, params.ray_length, params.ray_width))
        })
        .collect()
}

/// The probe perpendicular to a boundary mask through its fitted midpoint.
pub fn beta_probe(mask: &BitMask, length: f64) -> Result<Segment2> {
    let pts: Vec<Point2> = mask.ones().map(|(x, y)| Point2::new(x as f64, y as f64)).collect();
    let fit = fit_line_segment(&pts)?;
    let dir = fit.b - fit.a;
    let len = dir.norm();
    let perp = if len > 0.0 { Point2::new(-dir.y / len, dir.x / len) } else { Point2::new(0.0, 1.0) };
    let mid = fit.midpoint();
    Ok(Segment2::new(mid - perp * (length / 2.0), mid + perp * (length / 2.0)))
}

/// Non-crossing and enclosure constraints, region by region.
pub fn build_region_constraints(
    d: &DetectionSet,
    candidates: &[EdgeCandidate],
    params: &BuildParams,
) -> Vec<LinearConstraint> {
    let strips: Vec<Vec<(usize, usize)>> =
        candidates.iter().map(|e| rasterize_segment(&e.segment, params.ray_width, d.canvas)).collect();
    let mut out = Vec::new();
    for r in sorted_regions(d) {
        let rv = VarRef::Region(r.id);
        let interior = r.mask.erode(params.interior_erosion_px);
        for (e, strip) in candidates.iter().zip(&strips) {
            if strip.iter().any(|&(x, y)| interior.get(x, y)) {
                out.push(exclusion(edge_var(e), rv, Family::RegionNoncross));
            }
        }
        let rays = enclosure_rays(&r.mask, params);
        let mut empty = 0;
        for ray in &rays {
            let hits: Vec<(f64, VarRef)> =
                candidates.iter().filter(|e| segment_hits_ray(&e.segment, ray)).map(|e| (1.0, edge_var(e))).collect();
            if hits.is_empty() {
                empty += 1;
                continue;
            }
            let mut terms = hits;
            terms.push((-1.0, rv));
            out.push(LinearConstraint::new(terms, Relation::Ge, 0.0, Family::RegionEnclose));
        }
        if !rays.is_empty() && empty as f64 >= params.empty_ray_fraction * rays.len() as f64 {
            for _ in 0..empty {
                out.push(LinearConstraint::new(vec![(-1.0, rv)], Relation::Ge, 0.0, Family::RegionEnclose));
            }
        }
    }
    out
}

/// One exactly-one constraint per predicted shared boundary. Boundaries that
/// cannot be fitted or that no candidate crosses are skipped with a warning.
pub fn build_region_region_constraints(
    d: &DetectionSet,
    candidates: &[EdgeCandidate],
    params: &BuildParams,
) -> (Vec<LinearConstraint>, Vec<String>) {
    let mut out = Vec::new();
    let mut warnings = Vec::new();
    for b in &d.region_pair_boundaries {
        for (i, mask) in b.segments.iter().enumerate() {
            let beta = match beta_probe(mask, params.beta_length) {
                Ok(s) => s,
                Err(e) => {
                    warnings.push(format!("boundary {i} of regions ({}, {}): {e}", b.region_a, b.region_b));
                    continue;
                }
            };
            let terms: Vec<(f64, VarRef)> =
                candidates.iter().filter(|e| segments_touch(&e.segment, &beta)).map(|e| (1.0, edge_var(e))).collect();
            if terms.is_empty() {
                warnings
                    .push(format!("boundary {i} of regions ({}, {}): no candidate crosses it", b.region_a, b.region_b));
                continue;
            }
            out.push(LinearConstraint::new(terms, Relation::Eq, 1.0, Family::RegionRegion));
        }
    }
    for w in &warnings {
        warn!("{w}");
    }
    (out, warnings)
}

/// Direction-bin agreement and pruning constraints, corner by corner.
pub fn build_ce_constraints(
    d: &DetectionSet,
    candidates: &[EdgeCandidate],
    params: &BuildParams,
) -> Vec<LinearConstraint> {
    let mut out = Vec::new();
    for c in sorted_corners(d) {
        let incident: Vec<(VarRef, f64)> = candidates
            .iter()
            .filter_map(|e| {
                let other = if e.corner_a == c.id {
                    e.segment.b
                } else if e.corner_b == c.id {
                    e.segment.a
                } else {
                    return None;
                };
                Some((edge_var(e), direction_deg(c.position, other)))
            })
            .collect();
        for b in active_bins(c, params) {
            let mut terms: Vec<(f64, VarRef)> = incident
                .iter()
                .filter(|(_, th)| angular_distance(*th, bin_center(b)) <= params.ce_window_deg)
                .map(|(v, _)| (1.0, *v))
                .collect();
            terms.push((-1.0, VarRef::Dir { corner: c.id, bin: b as u8 }));
            out.push(LinearConstraint::new(terms, Relation::Eq, 0.0, Family::CeBin));
        }
        let pruned: Vec<(f64, VarRef)> = incident
            .iter()
            .filter(|(_, th)| c.direction_bins[bin_direction(*th)] < params.ce_bin_threshold)
            .map(|(v, _)| (1.0, *v))
            .collect();
        if !pruned.is_empty() {
            out.push(LinearConstraint::new(pruned, Relation::Eq, 0.0, Family::CePrune));
        }
    }
    out
}

/// Builds the full program for `d` under `cfg`.
///
/// Topology constraints are always present and hard, including for
/// edge-only configurations, so every solution is a valid planar graph.
pub fn build(d: &DetectionSet, cfg: &FeatureConfig, params: &BuildParams) -> Result<Assembly> {
    cfg.validate()?;
    d.validate()?;
    let candidates = edge_candidates(d);
    let mut p = BinaryProgram::new();
    for c in sorted_corners(d) {
        p.declare_binary(VarRef::Corner(c.id));
    }
    for (var, coef) in build_objective(d, &candidates, cfg, params) {
        p.declare_binary(var);
        p.set_objective(&var, coef)?;
    }

    for c in build_topology_constraints(&candidates, &d.corners) {
        p.add_constraint(c)?;
    }
    let mut soft = Vec::new();
    if cfg.use_regions {
        soft.extend(build_region_constraints(d, &candidates, params));
    }
    let mut warnings = Vec::new();
    if cfg.use_rr_relations {
        let (cons, w) = build_region_region_constraints(d, &candidates, params);
        soft.extend(cons);
        warnings = w;
    }
    if cfg.use_ce_relations {
        soft.extend(build_ce_constraints(d, &candidates, params));
    }
    for c in soft {
        let lambda = params.lambda(c.family);
        p.add_soft(c, lambda, params.slack_cap)?;
    }
    Ok(Assembly { program: p, candidates, warnings })
}

/// Counts constraints per family, for logging.
pub fn family_counts(p: &BinaryProgram) -> BTreeMap<Family, usize> {
    let mut m = BTreeMap::new();
    for c in &p.constraints {
        *m.entry(c.family).or_insert(0) += 1;
    }
    m
}
