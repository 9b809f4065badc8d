//! File formats: detection and graph JSON, LP text, SVG.

mod detections;
mod graph;
mod lp;
mod svg;

pub use detections::{detections_from_json, detections_to_json, MaskJson, EDGE_MAP_SCALE};
pub use graph::{graph_from_json, graph_to_json};
pub use lp::{format_number, parse_lp, write_lp};
pub use svg::{render_detections, render_graph};
