mod common;

use proptest::prelude::*;
use roofgraph::geom::Canvas;
use roofgraph::io::{detections_from_json, detections_to_json, graph_from_json, graph_to_json, parse_lp, write_lp};
use roofgraph::simdet::{simulate, NoiseConfig};

use common::{random_graph, random_program};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn detections_round_trip(seed in 0u64..10_000, spurious in 0.0..5.0f64, noise in 0.0..0.2f64) {
        let cfg = NoiseConfig { seed, spurious_corner_rate: spurious, edge_map_noise_sigma: noise, region_erode_px: 1, rr_boundary_drop_rate: 0.2, ..NoiseConfig::default() };
        let d = simulate(&random_graph(seed), &cfg, Canvas::default()).unwrap();
        let text = detections_to_json(&d);
        let back = detections_from_json(&text).unwrap();
        prop_assert_eq!(detections_to_json(&back), text);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn graphs_round_trip(seed in 0u64..10_000) {
        let g = random_graph(seed);
        let text = graph_to_json(&g);
        prop_assert_eq!(graph_from_json(&text).unwrap(), g);
    }

    #[test]
    fn programs_round_trip(seed in any::<u64>()) {
        let p = random_program(seed, 14);
        let text = write_lp(&p);
        let back = parse_lp(&text).unwrap();
        prop_assert_eq!(write_lp(&back), text);
        prop_assert_eq!(back, p);
    }
}
