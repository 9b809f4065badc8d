//! Synthetic detections from a ground-truth graph.
//!
//! Stands in for the corner, edge and region networks and the two
//! relationship classifiers: ground-truth primitives are perturbed by
//! configurable noise so the assembly program can be exercised without trained
//! models. All randomness is drawn from ChaCha streams keyed by
//! `(seed, stream, entity id)`, so adding entities never reshuffles draws made
//! for existing ones.

mod buildings;

pub use buildings::{random_building, BuildingParams};

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal, Poisson};

use crate::error::{Error, Result};
use crate::geom::{bin_direction, direction_deg, rasterize_segment, BitMask, Canvas, Point2, NUM_BINS};
use crate::model::{
    enumerate_faces, CornerDetection, DetectionSet, EdgeConfidenceMap, PlanarGraph, RegionDetection,
    RegionPairBoundary, EDGE_STRIP_WIDTH,
};

/// Corners are kept at least this far inside the canvas.
const CANVAS_INSET: f64 = 2.0;
/// Spurious corners are resampled when closer than this to another corner.
const SPURIOUS_MIN_GAP: f64 = 3.0;

#[derive(Debug, Clone, PartialEq)]
pub struct NoiseConfig {
    pub seed: u64,
    pub corner_jitter_sigma: f64,
    pub corner_drop_rate: f64,
    /// Expected number of spurious corners (Poisson mean).
    pub spurious_corner_rate: f64,
    pub true_corner_conf_range: (f64, f64),
    pub false_corner_conf_range: (f64, f64),
    pub edge_map_fg: f64,
    pub edge_map_bg: f64,
    pub edge_map_noise_sigma: f64,
    pub dir_bin_true_conf: f64,
    pub dir_bin_false_conf: f64,
    pub region_erode_px: usize,
    pub rr_boundary_drop_rate: f64,
}

impl Default for NoiseConfig {
    fn default() -> Self {
        Self {
            seed: 0,
            corner_jitter_sigma: 1.0,
            corner_drop_rate: 0.0,
            spurious_corner_rate: 0.0,
            true_corner_conf_range: (0.8, 1.0),
            false_corner_conf_range: (0.2, 0.5),
            edge_map_fg: 0.9,
            edge_map_bg: 0.05,
            edge_map_noise_sigma: 0.05,
            dir_bin_true_conf: 0.9,
            dir_bin_false_conf: 0.05,
            region_erode_px: 0,
            rr_boundary_drop_rate: 0.0,
        }
    }
}

impl NoiseConfig {
    /// Noise-free detections: exact corners with confidence 1, a binary edge
    /// map and binary direction bins.
    pub fn zero(seed: u64) -> Self {
        Self {
            seed,
            corner_jitter_sigma: 0.0,
            corner_drop_rate: 0.0,
            spurious_corner_rate: 0.0,
            true_corner_conf_range: (1.0, 1.0),
            false_corner_conf_range: (1.0, 1.0),
            edge_map_fg: 1.0,
            edge_map_bg: 0.0,
            edge_map_noise_sigma: 0.0,
            dir_bin_true_conf: 1.0,
            dir_bin_false_conf: 0.0,
            region_erode_px: 0,
            rr_boundary_drop_rate: 0.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let unit = |v: f64| (0.0..=1.0).contains(&v);
        let range = |(lo, hi): (f64, f64)| unit(lo) && unit(hi) && lo <= hi;
        let ok = self.corner_jitter_sigma >= 0.0
            && self.edge_map_noise_sigma >= 0.0
            && self.spurious_corner_rate >= 0.0
            && unit(self.corner_drop_rate)
            && unit(self.rr_boundary_drop_rate)
            && unit(self.edge_map_fg)
            && unit(self.edge_map_bg)
            && unit(self.dir_bin_true_conf)
            && unit(self.dir_bin_false_conf)
            && range(self.true_corner_conf_range)
            && range(self.false_corner_conf_range)
            && self.true_corner_conf_range.0 >= 0.2
            && self.false_corner_conf_range.0 >= 0.2;
        if ok {
            Ok(())
        } else {
            Err(Error::Parse("noise parameters out of range".into()))
        }
    }
}

mod stream {
    pub const JITTER: u64 = 1;
    pub const DROP: u64 = 2;
    pub const CONF: u64 = 3;
    pub const SPURIOUS_COUNT: u64 = 4;
    pub const SPURIOUS: u64 = 5;
    pub const EDGE_NOISE: u64 = 6;
    pub const RR_DROP: u64 = 7;
}

fn rng_for(seed: u64, stream: u64, id: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream((stream << 40) ^ id);
    rng
}

fn sample_range(rng: &mut ChaCha8Rng, (lo, hi): (f64, f64)) -> f64 {
    if hi > lo {
        rng.random_range(lo..=hi)
    } else {
        lo
    }
}

/// Generates detections for `gt` on `canvas` under `cfg`.
pub fn simulate(gt: &PlanarGraph, cfg: &NoiseConfig, canvas: Canvas) -> Result<DetectionSet> {
    cfg.validate()?;
    gt.validate()?;
    if gt.vertices.iter().any(|v| !canvas.contains(v.pos)) {
        return Err(Error::GraphOffCanvas);
    }
    let seed = cfg.seed;
    let (lo_x, hi_x) = (CANVAS_INSET, canvas.width as f64 - CANVAS_INSET);
    let (lo_y, hi_y) = (CANVAS_INSET, canvas.height as f64 - CANVAS_INSET);

    // Jittered positions for every ground-truth vertex, dropped or not.
    let jitter = Normal::new(0.0, cfg.corner_jitter_sigma.max(0.0)).expect("finite sigma");
    let jittered: BTreeMap<u32, Point2> = gt
        .vertices
        .iter()
        .map(|v| {
            let mut rng = rng_for(seed, stream::JITTER, v.id as u64);
            let (dx, dy) = if cfg.corner_jitter_sigma > 0.0 {
                (jitter.sample(&mut rng), jitter.sample(&mut rng))
            } else {
                (0.0, 0.0)
            };
            (v.id, Point2::new((v.pos.x + dx).clamp(lo_x, hi_x), (v.pos.y + dy).clamp(lo_y, hi_y)))
        })
        .collect();

    let mut verts = gt.vertices.clone();
    verts.sort_by_key(|v| v.id);
    let mut corners = Vec::new();
    for v in &verts {
        let dropped = cfg.corner_drop_rate > 0.0
            && rng_for(seed, stream::DROP, v.id as u64).random_bool(cfg.corner_drop_rate.clamp(0.0, 1.0));
        if dropped {
            continue;
        }
        let pos = jittered[&v.id];
        let mut bins = [cfg.dir_bin_false_conf; NUM_BINS];
        for w in gt.neighbors(v.id) {
            bins[bin_direction(direction_deg(pos, jittered[&w]))] = cfg.dir_bin_true_conf;
        }
        let confidence = sample_range(&mut rng_for(seed, stream::CONF, v.id as u64), cfg.true_corner_conf_range);
        corners.push(CornerDetection { id: v.id, position: pos, confidence, direction_bins: bins });
    }

    // Spurious corners get ids above every ground-truth id.
    let base = verts.last().map_or(0, |v| v.id + 1);
    let n_spurious = if cfg.spurious_corner_rate > 0.0 {
        let mut rng = rng_for(seed, stream::SPURIOUS_COUNT, 0);
        Poisson::new(cfg.spurious_corner_rate).expect("positive rate").sample(&mut rng) as u32
    } else {
        0
    };
    for k in 0..n_spurious {
        let id = base + k;
        let mut rng = rng_for(seed, stream::SPURIOUS, id as u64);
        let mut pos = Point2::new(rng.random_range(lo_x..hi_x), rng.random_range(lo_y..hi_y));
        for _ in 0..64 {
            if corners.iter().all(|c: &CornerDetection| c.position.dist(pos) >= SPURIOUS_MIN_GAP) {
                break;
            }
            pos = Point2::new(rng.random_range(lo_x..hi_x), rng.random_range(lo_y..hi_y));
        }
        let confidence = sample_range(&mut rng, cfg.false_corner_conf_range);
        corners.push(CornerDetection {
            id,
            position: pos,
            confidence,
            direction_bins: [cfg.dir_bin_false_conf; NUM_BINS],
        });
    }

    let mut edge_map = EdgeConfidenceMap::filled(canvas.width, canvas.height, cfg.edge_map_bg);
    for &e in &gt.edges {
        let seg = gt.segment(e).expect("validated graph");
        for (x, y) in rasterize_segment(&seg, EDGE_STRIP_WIDTH, canvas) {
            edge_map.set(x, y, cfg.edge_map_fg);
        }
    }
    if cfg.edge_map_noise_sigma > 0.0 {
        let noise = Normal::new(0.0, cfg.edge_map_noise_sigma).expect("finite sigma");
        for y in 0..canvas.height {
            let mut rng = rng_for(seed, stream::EDGE_NOISE, y as u64);
            for x in 0..canvas.width {
                let v = edge_map.get(x, y) + noise.sample(&mut rng);
                edge_map.set(x, y, v.clamp(0.0, 1.0));
            }
        }
    }

    let faces = enumerate_faces(gt, canvas)?;
    let mut regions = Vec::new();
    for (i, f) in faces.iter().enumerate() {
        let mask = f.mask.erode(cfg.region_erode_px);
        if !mask.is_empty() {
            regions.push(RegionDetection { id: i as u32, mask, confidence: 1.0 });
        }
    }

    // Faces on either side of each ground-truth edge.
    let mut sides: BTreeMap<usize, Vec<u32>> = BTreeMap::new();
    for (i, f) in faces.iter().enumerate() {
        for &e in &f.edges {
            sides.entry(e).or_default().push(i as u32);
        }
    }
    let mut pairs: BTreeMap<(u32, u32), Vec<BitMask>> = BTreeMap::new();
    for (&e, fs) in &sides {
        if fs.len() != 2 || fs[0] == fs[1] {
            continue;
        }
        let key = (fs[0].min(fs[1]), fs[0].max(fs[1]));
        if !regions.iter().any(|r| r.id == key.0) || !regions.iter().any(|r| r.id == key.1) {
            continue;
        }
        let dropped = cfg.rr_boundary_drop_rate > 0.0
            && rng_for(seed, stream::RR_DROP, e as u64).random_bool(cfg.rr_boundary_drop_rate.clamp(0.0, 1.0));
        if dropped {
            continue;
        }
        let seg = gt.segment(gt.edges[e]).expect("validated graph");
        let px = rasterize_segment(&seg, EDGE_STRIP_WIDTH, canvas);
        if px.is_empty() {
            continue;
        }
        pairs.entry(key).or_default().push(BitMask::from_pixels(canvas.width, canvas.height, &px));
    }
    let region_pair_boundaries =
        pairs.into_iter().map(|((a, b), segments)| RegionPairBoundary { region_a: a, region_b: b, segments }).collect();

    Ok(DetectionSet { canvas, corners, edge_map, regions, region_pair_boundaries })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::extract_edge_confidence;

    fn two_squares() -> PlanarGraph {
        PlanarGraph::from_points(
            &[(40., 40.), (100., 40.), (160., 40.), (160., 100.), (100., 100.), (40., 100.)],
            &[(0, 1), (1, 2), (2, 3), (3, 4), (4, 5), (5, 0), (1, 4)],
        )
    }

    #[test]
    fn zero_noise_is_identity() {
        let gt = two_squares();
        let d = simulate(&gt, &NoiseConfig::zero(3), Canvas::default()).unwrap();
        assert_eq!(d.corners.len(), 6);
        for c in &d.corners {
            assert_eq!(c.position, gt.position(c.id).unwrap());
            assert_eq!(c.confidence, 1.0);
        }
        let mut expected = EdgeConfidenceMap::filled(256, 256, 0.0);
        for &e in &gt.edges {
            for (x, y) in rasterize_segment(&gt.segment(e).unwrap(), 2.0, Canvas::default()) {
                expected.set(x, y, 1.0);
            }
        }
        assert_eq!(d.edge_map, expected);
        assert_eq!(d.regions.len(), 2);
        // One boundary, equal to the shared edge's strip.
        assert_eq!(d.region_pair_boundaries.len(), 1);
        let b = &d.region_pair_boundaries[0];
        assert_eq!(b.segments.len(), 1);
        let shared = rasterize_segment(&gt.segment((1, 4)).unwrap(), 2.0, Canvas::default());
        assert_eq!(b.segments[0], BitMask::from_pixels(256, 256, &shared));
        // Bins: corner 1 has edges west, east and south.
        let c1 = d.corner(1).unwrap();
        let on: Vec<usize> = (0..NUM_BINS).filter(|&b| c1.direction_bins[b] == 1.0).collect();
        assert_eq!(on, vec![bin_direction(0.0), bin_direction(180.0), bin_direction(270.0)]);
    }

    #[test]
    fn full_drop_leaves_only_spurious() {
        let cfg = NoiseConfig { corner_drop_rate: 1.0, spurious_corner_rate: 4.0, seed: 11, ..NoiseConfig::default() };
        let d = simulate(&two_squares(), &cfg, Canvas::default()).unwrap();
        assert!(d.corners.iter().all(|c| c.id >= 6));
        assert!(d.corners.iter().all(|c| c.direction_bins.iter().all(|&b| b == cfg.dir_bin_false_conf)));
    }

    #[test]
    fn deterministic_given_seed() {
        let cfg = NoiseConfig { spurious_corner_rate: 3.0, seed: 99, ..NoiseConfig::default() };
        let a = simulate(&two_squares(), &cfg, Canvas::default()).unwrap();
        let b = simulate(&two_squares(), &cfg, Canvas::default()).unwrap();
        assert_eq!(a, b);
        let c = simulate(&two_squares(), &NoiseConfig { seed: 100, ..cfg }, Canvas::default()).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn zero_noise_edge_scores_separate() {
        let gt = two_squares();
        let d = simulate(&gt, &NoiseConfig::zero(0), Canvas::default()).unwrap();
        for &e in &gt.edges {
            assert!(extract_edge_confidence(&d.edge_map, &gt.segment(e).unwrap()).unwrap() >= 1.0 - 0.02);
        }
        // Diagonals of each square leave the ground-truth strips quickly.
        for (a, b) in [(0, 4), (1, 5), (1, 3), (2, 4)] {
            let s = crate::geom::Segment2::new(gt.position(a).unwrap(), gt.position(b).unwrap());
            assert!(extract_edge_confidence(&d.edge_map, &s).unwrap() <= 0.15);
        }
    }

    #[test]
    fn rejects_bad_inputs() {
        let off = PlanarGraph::from_points(&[(10., 10.), (300., 10.), (300., 50.)], &[(0, 1), (1, 2), (2, 0)]);
        assert_eq!(simulate(&off, &NoiseConfig::zero(0), Canvas::default()), Err(Error::GraphOffCanvas));
        let cfg = NoiseConfig { corner_drop_rate: 1.5, ..NoiseConfig::default() };
        assert!(simulate(&two_squares(), &cfg, Canvas::default()).is_err());
    }
}
