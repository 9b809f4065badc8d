//! Detection set JSON.
//!
//! Masks are row run-lengths alternating background and foreground, starting
//! with a background run. The edge map uses the same runs with zero as the
//! background; non-zero pixels are integer codes divided by `scale`. A map
//! whose non-zero pixels are all 1 omits `values`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geom::{BitMask, Canvas, Point2, NUM_BINS};
use crate::model::{CornerDetection, DetectionSet, EdgeConfidenceMap, RegionDetection, RegionPairBoundary};

/// Edge-map value codes per unit.
pub const EDGE_MAP_SCALE: f64 = 1e6;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MaskJson {
    pub width: usize,
    pub height: usize,
    pub rows: Vec<Vec<u32>>,
}

impl MaskJson {
    pub fn encode(m: &BitMask) -> Self {
        Self { width: m.width(), height: m.height(), rows: m.to_rle() }
    }

    pub fn decode(&self) -> Result<BitMask> {
        BitMask::from_rle(self.width, self.height, &self.rows)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct CornerJson {
    id: u32,
    x: f64,
    y: f64,
    conf: f64,
    bins: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct EdgeMapJson {
    width: usize,
    height: usize,
    encoding: String,
    scale: f64,
    rows: Vec<Vec<u32>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    values: Option<Vec<Vec<u32>>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct RegionJson {
    id: u32,
    conf: f64,
    mask: MaskJson,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct BoundaryJson {
    a: u32,
    b: u32,
    masks: Vec<MaskJson>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct DetectionFile {
    canvas: [usize; 2],
    corners: Vec<CornerJson>,
    edge_map: EdgeMapJson,
    regions: Vec<RegionJson>,
    rr_boundaries: Vec<BoundaryJson>,
}

fn encode_edge_map(m: &EdgeConfidenceMap) -> EdgeMapJson {
    let codes: Vec<u32> = m.values.iter().map(|v| (v * EDGE_MAP_SCALE).round().max(0.0) as u32).collect();
    let binary = codes.iter().all(|&c| c == 0 || c as f64 == EDGE_MAP_SCALE);
    let mut rows = Vec::with_capacity(m.height);
    let mut values = Vec::with_capacity(m.height);
    for y in 0..m.height {
        let row = &codes[y * m.width..(y + 1) * m.width];
        let mut runs = Vec::new();
        let mut cur = false;
        let mut len = 0u32;
        for &c in row {
            if (c > 0) == cur {
                len += 1;
            } else {
                runs.push(len);
                cur = c > 0;
                len = 1;
            }
        }
        runs.push(len);
        rows.push(runs);
        values.push(row.iter().copied().filter(|&c| c > 0).collect::<Vec<u32>>());
    }
    let values = if binary { None } else { Some(values) };
    EdgeMapJson { width: m.width, height: m.height, encoding: "rle-rows".into(), scale: EDGE_MAP_SCALE, rows, values }
}

fn decode_edge_map(j: &EdgeMapJson) -> Result<EdgeConfidenceMap> {
    if j.encoding != "rle-rows" {
        return Err(Error::Parse(format!("unknown edge map encoding '{}'", j.encoding)));
    }
    if !(j.scale >= 1.0 && j.scale.is_finite()) {
        return Err(Error::Parse(format!("edge map scale {} must be at least 1", j.scale)));
    }
    if j.rows.len() != j.height {
        return Err(Error::Parse(format!("edge map has {} rows, expected {}", j.rows.len(), j.height)));
    }
    if let Some(v) = &j.values {
        if v.len() != j.height {
            return Err(Error::Parse("edge map values do not match its rows".into()));
        }
    }
    let mut m = EdgeConfidenceMap::filled(j.width, j.height, 0.0);
    for (y, runs) in j.rows.iter().enumerate() {
        let mut x = 0usize;
        let mut k = 0usize;
        for (i, &run) in runs.iter().enumerate() {
            let end = x + run as usize;
            if end > j.width {
                return Err(Error::Parse(format!("edge map row {y} exceeds the width")));
            }
            if i % 2 == 1 {
                for xx in x..end {
                    let v = match &j.values {
                        None => 1.0,
                        Some(vals) => {
                            let code = *vals[y]
                                .get(k)
                                .ok_or_else(|| Error::Parse(format!("edge map row {y} is missing values")))?;
                            k += 1;
                            code as f64 / j.scale
                        }
                    };
                    m.set(xx, y, v);
                }
            }
            x = end;
        }
        if x != j.width {
            return Err(Error::Parse(format!("edge map row {y} decodes to {x} pixels")));
        }
        if let Some(vals) = &j.values {
            if k != vals[y].len() {
                return Err(Error::Parse(format!("edge map row {y} has surplus values")));
            }
        }
    }
    Ok(m)
}

/// Serializes a detection set as one line of JSON.
pub fn detections_to_json(d: &DetectionSet) -> String {
    let file = DetectionFile {
        canvas: [d.canvas.width, d.canvas.height],
        corners: d
            .corners
            .iter()
            .map(|c| CornerJson {
                id: c.id,
                x: c.position.x,
                y: c.position.y,
                conf: c.confidence,
                bins: c.direction_bins.to_vec(),
            })
            .collect(),
        edge_map: encode_edge_map(&d.edge_map),
        regions: d
            .regions
            .iter()
            .map(|r| RegionJson { id: r.id, conf: r.confidence, mask: MaskJson::encode(&r.mask) })
            .collect(),
        rr_boundaries: d
            .region_pair_boundaries
            .iter()
            .map(|b| BoundaryJson {
                a: b.region_a,
                b: b.region_b,
                masks: b.segments.iter().map(MaskJson::encode).collect(),
            })
            .collect(),
    };
    let mut s = serde_json::to_string(&file).expect("detection set serializes");
    s.push('\n');
    s
}

/// Parses a detection set, applies the detector thresholds and checks every
/// invariant.
pub fn detections_from_json(s: &str) -> Result<DetectionSet> {
    let f: DetectionFile = serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))?;
    let canvas = Canvas::new(f.canvas[0], f.canvas[1]);
    let mut corners = Vec::with_capacity(f.corners.len());
    for c in f.corners {
        let bins: [f64; NUM_BINS] = c.bins.try_into().map_err(|b: Vec<f64>| {
            Error::Parse(format!("corner {} has {} bins, expected {NUM_BINS}", c.id, b.len()))
        })?;
        corners.push(CornerDetection {
            id: c.id,
            position: Point2::new(c.x, c.y),
            confidence: c.conf,
            direction_bins: bins,
        });
    }
    let regions = f
        .regions
        .iter()
        .map(|r| Ok(RegionDetection { id: r.id, mask: r.mask.decode()?, confidence: r.conf }))
        .collect::<Result<Vec<_>>>()?;
    let region_pair_boundaries = f
        .rr_boundaries
        .iter()
        .map(|b| {
            Ok(RegionPairBoundary {
                region_a: b.a,
                region_b: b.b,
                segments: b.masks.iter().map(MaskJson::decode).collect::<Result<Vec<_>>>()?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let d = DetectionSet { canvas, corners, edge_map: decode_edge_map(&f.edge_map)?, regions, region_pair_boundaries }
        .thresholded();
    d.validate()?;
    Ok(d)
}
