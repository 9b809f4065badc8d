//! Benchmark fixtures: simulated detections of random buildings.

use roofgraph::geom::Canvas;
use roofgraph::model::{DetectionSet, PlanarGraph};
use roofgraph::simdet::{random_building, simulate, BuildingParams, NoiseConfig};

/// A ground-truth building and noisy detections of it.
pub struct Fixture {
    pub seed: u64,
    pub gt: PlanarGraph,
    pub detections: DetectionSet,
}

/// Buildings with seeds `0..n` under the default noise plus `spurious`
/// expected false corners.
pub fn fixtures(n: u64, spurious: f64) -> Vec<Fixture> {
    let canvas = Canvas::default();
    (0..n)
        .map(|seed| {
            let gt = random_building(seed, &BuildingParams::default(), canvas);
            let cfg = NoiseConfig { seed, spurious_corner_rate: spurious, ..NoiseConfig::default() };
            let detections = simulate(&gt, &cfg, canvas).expect("generated buildings simulate");
            Fixture { seed, gt, detections }
        })
        .collect()
}

/// The fixture with the most vertices among the first `n` seeds.
pub fn largest(n: u64, spurious: f64) -> Fixture {
    fixtures(n, spurious).into_iter().max_by_key(|f| (f.gt.vertices.len(), std::cmp::Reverse(f.seed))).expect("n > 0")
}
