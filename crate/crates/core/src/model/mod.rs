//! Detection and planar-graph data model.

mod faces;
mod graph;

pub use faces::{enumerate_faces, Face};
pub use graph::{merge_colinear_corners, PlanarGraph, Vertex, COLINEAR_TOLERANCE_DEG};

use crate::error::{Error, Result};
use crate::geom::{rasterize_segment, BitMask, Canvas, Point2, Segment2, NUM_BINS};

/// Corner detections below this confidence are discarded.
pub const CORNER_THRESHOLD: f64 = 0.2;
/// Region detections below this confidence are discarded.
pub const REGION_THRESHOLD: f64 = 0.5;
/// At most this many regions are kept per building.
pub const MAX_REGIONS: usize = 100;
/// Strip width used when reading edge confidence along a candidate.
pub const EDGE_STRIP_WIDTH: f64 = 2.0;

#[derive(Debug, Clone, PartialEq)]
pub struct CornerDetection {
    pub id: u32,
    pub position: Point2,
    pub confidence: f64,
    /// Edge-presence confidence for each of the 15 direction bins.
    pub direction_bins: [f64; NUM_BINS],
}

/// Per-pixel edge confidence, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct EdgeConfidenceMap {
    pub width: usize,
    pub height: usize,
    pub values: Vec<f64>,
}

impl EdgeConfidenceMap {
    pub fn filled(width: usize, height: usize, v: f64) -> Self {
        Self { width, height, values: vec![v; width * height] }
    }

    pub fn get(&self, x: usize, y: usize) -> f64 {
        self.values[y * self.width + x]
    }

    pub fn set(&mut self, x: usize, y: usize, v: f64) {
        self.values[y * self.width + x] = v;
    }
}

/// Candidate edge between two corners, with corner ids ordered `a < b`.
#[derive(Debug, Clone, PartialEq)]
pub struct EdgeCandidate {
    pub id: usize,
    pub corner_a: u32,
    pub corner_b: u32,
    pub confidence: f64,
    pub segment: Segment2,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RegionDetection {
    pub id: u32,
    pub mask: BitMask,
    pub confidence: f64,
}

/// Shared-boundary instances predicted for a pair of regions.
#[derive(Debug, Clone, PartialEq)]
pub struct RegionPairBoundary {
    pub region_a: u32,
    pub region_b: u32,
    pub segments: Vec<BitMask>,
}

/// Everything the detectors report for one building.
#[derive(Debug, Clone, PartialEq)]
pub struct DetectionSet {
    pub canvas: Canvas,
    pub corners: Vec<CornerDetection>,
    pub edge_map: EdgeConfidenceMap,
    pub regions: Vec<RegionDetection>,
    pub region_pair_boundaries: Vec<RegionPairBoundary>,
}

impl DetectionSet {
    pub fn empty(canvas: Canvas) -> Self {
        Self {
            canvas,
            corners: Vec::new(),
            edge_map: EdgeConfidenceMap::filled(canvas.width, canvas.height, 0.0),
            regions: Vec::new(),
            region_pair_boundaries: Vec::new(),
        }
    }

    pub fn corner(&self, id: u32) -> Option<&CornerDetection> {
        self.corners.iter().find(|c| c.id == id)
    }

    /// Applies the detector thresholds: weak corners and regions are dropped,
    /// only the 100 most confident regions survive, and boundaries that lose a
    /// region go with it.
    pub fn thresholded(mut self) -> Self {
        self.corners.retain(|c| c.confidence >= CORNER_THRESHOLD);
        self.regions.retain(|r| r.confidence >= REGION_THRESHOLD);
        if self.regions.len() > MAX_REGIONS {
            let mut order: Vec<usize> = (0..self.regions.len()).collect();
            order.sort_by(|&i, &j| self.regions[j].confidence.total_cmp(&self.regions[i].confidence).then(i.cmp(&j)));
            let mut keep = vec![false; self.regions.len()];
            for &i in &order[..MAX_REGIONS] {
                keep[i] = true;
            }
            let mut k = 0;
            self.regions.retain(|_| {
                k += 1;
                keep[k - 1]
            });
        }
        let ids: Vec<u32> = self.regions.iter().map(|r| r.id).collect();
        self.region_pair_boundaries.retain(|b| ids.contains(&b.region_a) && ids.contains(&b.region_b));
        self
    }

    /// Checks every structural invariant of a thresholded detection set.
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidDetections(m));
        let c = self.canvas;
        if self.edge_map.width != c.width || self.edge_map.height != c.height {
            return bad("edge map dimensions differ from the canvas".into());
        }
        if self.edge_map.values.len() != c.width * c.height {
            return bad("edge map has the wrong number of values".into());
        }
        if self.edge_map.values.iter().any(|v| !(0.0..=1.0).contains(v)) {
            return bad("edge map value outside [0, 1]".into());
        }
        let mut seen = std::collections::BTreeSet::new();
        for k in &self.corners {
            if !seen.insert(k.id) {
                return bad(format!("duplicate corner id {}", k.id));
            }
            if !k.position.is_finite() || !c.contains(k.position) {
                return bad(format!("corner {} lies off the canvas", k.id));
            }
            if !(CORNER_THRESHOLD..=1.0).contains(&k.confidence) {
                return bad(format!("corner {} confidence {} out of range", k.id, k.confidence));
            }
            if k.direction_bins.iter().any(|v| !(0.0..=1.0).contains(v)) {
                return bad(format!("corner {} has a bin confidence outside [0, 1]", k.id));
            }
        }
        if self.regions.len() > MAX_REGIONS {
            return bad(format!("{} regions exceed the cap of {MAX_REGIONS}", self.regions.len()));
        }
        let mut seen = std::collections::BTreeSet::new();
        for r in &self.regions {
            if !seen.insert(r.id) {
                return bad(format!("duplicate region id {}", r.id));
            }
            if !(REGION_THRESHOLD..=1.0).contains(&r.confidence) {
                return bad(format!("region {} confidence {} out of range", r.id, r.confidence));
            }
            if r.mask.width() != c.width || r.mask.height() != c.height {
                return bad(format!("region {} mask size differs from the canvas", r.id));
            }
            if r.mask.is_empty() {
                return bad(format!("region {} has an empty mask", r.id));
            }
        }
        for b in &self.region_pair_boundaries {
            if b.region_a == b.region_b {
                return bad(format!("boundary pairs region {} with itself", b.region_a));
            }
            if !seen.contains(&b.region_a) || !seen.contains(&b.region_b) {
                return bad(format!("boundary references unknown region ({}, {})", b.region_a, b.region_b));
            }
            for m in &b.segments {
                if m.is_empty() || m.width() != c.width || m.height() != c.height {
                    return bad(format!("boundary ({}, {}) has an invalid mask", b.region_a, b.region_b));
                }
            }
        }
        Ok(())
    }
}

/// Which detections and relationships feed the program. Edges always do.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct FeatureConfig {
    pub use_corners: bool,
    pub use_ce_relations: bool,
    pub use_regions: bool,
    pub use_rr_relations: bool,
}

impl FeatureConfig {
    pub const fn edges_only() -> Self {
        Self { use_corners: false, use_ce_relations: false, use_regions: false, use_rr_relations: false }
    }

    pub const fn full() -> Self {
        Self { use_corners: true, use_ce_relations: true, use_regions: true, use_rr_relations: true }
    }

    /// The five cumulative configurations of the ablation study, in order.
    pub fn ablation_ladder() -> [FeatureConfig; 5] {
        let e = Self::edges_only();
        let c = FeatureConfig { use_corners: true, ..e };
        let ce = FeatureConfig { use_ce_relations: true, ..c };
        let r = FeatureConfig { use_regions: true, ..ce };
        [e, c, ce, r, Self::full()]
    }

    pub fn validate(&self) -> Result<()> {
        if self.use_ce_relations && !self.use_corners {
            return Err(Error::Parse("corner-to-edge relations require corners".into()));
        }
        if self.use_rr_relations && !self.use_regions {
            return Err(Error::Parse("region-to-region relations require regions".into()));
        }
        Ok(())
    }

    /// Parses a comma-separated feature list: `edges`, `corners`, `ce`,
    /// `regions`, `rr`, or `all`.
    pub fn parse(list: &str) -> Result<Self> {
        let mut cfg = Self::edges_only();
        for tok in list.split(',').map(str::trim).filter(|t| !t.is_empty()) {
            match tok {
                "edges" | "pe" => {}
                "corners" | "pc" => cfg.use_corners = true,
                "ce" | "rce" => cfg.use_ce_relations = true,
                "regions" | "pr" => cfg.use_regions = true,
                "rr" | "rrr" => cfg.use_rr_relations = true,
                "all" | "full" => cfg = Self::full(),
                other => return Err(Error::Parse(format!("unknown feature '{other}'"))),
            }
        }
        cfg.validate()?;
        Ok(cfg)
    }

    /// Short label in the ablation-table style, e.g. `PE+PC+RCE`.
    pub fn label(&self) -> String {
        let mut s = String::from("PE");
        if self.use_corners {
            s.push_str("+PC");
        }
        if self.use_ce_relations {
            s.push_str("+RCE");
        }
        if self.use_regions {
            s.push_str("+PR");
        }
        if self.use_rr_relations {
            s.push_str("+RRR");
        }
        s
    }
}

impl Default for FeatureConfig {
    fn default() -> Self {
        Self::full()
    }
}

/// Mean edge-map value over the width-2 strip around `s`.
pub fn extract_edge_confidence(map: &EdgeConfidenceMap, s: &Segment2) -> Result<f64> {
    let px = rasterize_segment(s, EDGE_STRIP_WIDTH, Canvas::new(map.width, map.height));
    if px.is_empty() {
        return Err(Error::OffCanvas);
    }
    let sum: f64 = px.iter().map(|&(x, y)| map.get(x, y)).sum();
    Ok(sum / px.len() as f64)
}

/// Every corner pair at least 1 px apart becomes a candidate, ordered by
/// `(min id, max id)`, scored against the edge map.
pub fn edge_candidates(d: &DetectionSet) -> Vec<EdgeCandidate> {
    let mut corners: Vec<&CornerDetection> = d.corners.iter().collect();
    corners.sort_by_key(|c| c.id);
    let mut out = Vec::new();
    for i in 0..corners.len() {
        for j in i + 1..corners.len() {
            let (a, b) = (corners[i], corners[j]);
            let seg = Segment2::new(a.position, b.position);
            if seg.length() < 1.0 {
                continue;
            }
            let Ok(conf) = extract_edge_confidence(&d.edge_map, &seg) else {
                continue;
            };
            out.push(EdgeCandidate { id: out.len(), corner_a: a.id, corner_b: b.id, confidence: conf, segment: seg });
        }
    }
    out
}
