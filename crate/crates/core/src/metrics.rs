//! Corner, edge and region precision / recall / F1.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geom::Canvas;
use crate::model::{enumerate_faces, PlanarGraph};

/// Predicted and ground-truth corners this close are matched (inclusive).
pub const CORNER_TOLERANCE_PX: f64 = 8.0;
/// A region match needs an IOU strictly above this.
pub const REGION_IOU_THRESHOLD: f64 = 0.7;

/// Counts and scores at one level. Scores are fractions in `[0, 1]`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct LevelScore {
    pub true_positives: usize,
    pub predicted: usize,
    pub ground_truth: usize,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

impl LevelScore {
    pub fn from_counts(tp: usize, predicted: usize, ground_truth: usize) -> Self {
        let ratio = |a: usize, b: usize| if b == 0 { 0.0 } else { a as f64 / b as f64 };
        let precision = ratio(tp, predicted);
        let recall = ratio(tp, ground_truth);
        let f1 = if precision + recall == 0.0 { 0.0 } else { 2.0 * precision * recall / (precision + recall) };
        Self { true_positives: tp, predicted, ground_truth, precision, recall, f1 }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Counts {
    pub tp: usize,
    pub predicted: usize,
    pub ground_truth: usize,
}

impl std::ops::AddAssign for Counts {
    fn add_assign(&mut self, o: Counts) {
        self.tp += o.tp;
        self.predicted += o.predicted;
        self.ground_truth += o.ground_truth;
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    pub corner: LevelScore,
    pub edge: LevelScore,
    pub region: LevelScore,
}

impl MetricsReport {
    /// The nine scores as percentages rounded to one decimal, in the order
    /// corner P/R/F1, edge P/R/F1, region P/R/F1.
    pub fn percentages(&self) -> [f64; 9] {
        let r = |v: f64| (v * 1000.0).round() / 10.0;
        let mut out = [0.0; 9];
        for (k, l) in [self.corner, self.edge, self.region].iter().enumerate() {
            out[3 * k] = r(l.precision);
            out[3 * k + 1] = r(l.recall);
            out[3 * k + 2] = r(l.f1);
        }
        out
    }

    pub fn to_json(&self) -> serde_json::Value {
        let p = self.percentages();
        let level = |l: &LevelScore, o: usize| {
            serde_json::json!({
                "tp": l.true_positives,
                "pred": l.predicted,
                "gt": l.ground_truth,
                "precision": p[o],
                "recall": p[o + 1],
                "f1": p[o + 2],
            })
        };
        serde_json::json!({
            "corner": level(&self.corner, 0),
            "edge": level(&self.edge, 3),
            "region": level(&self.region, 6),
        })
    }
}

/// Greedy one-to-one matching in ascending distance, ties by
/// `(pred id, gt id)`. Returns `pred id -> gt id`.
pub fn match_corners(pred: &PlanarGraph, gt: &PlanarGraph) -> BTreeMap<u32, u32> {
    let mut pairs = Vec::new();
    for p in &pred.vertices {
        for g in &gt.vertices {
            let d = p.pos.dist(g.pos);
            if d <= CORNER_TOLERANCE_PX {
                pairs.push((d, p.id, g.id));
            }
        }
    }
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2)));
    let mut out = BTreeMap::new();
    let mut used_gt = BTreeSet::new();
    for (_, p, g) in pairs {
        if !out.contains_key(&p) && !used_gt.contains(&g) {
            out.insert(p, g);
            used_gt.insert(g);
        }
    }
    out
}

/// Predicted edges whose matched endpoints span a ground-truth edge. Each
/// ground-truth edge is credited once.
pub fn score_edges(pred: &PlanarGraph, gt: &PlanarGraph, matching: &BTreeMap<u32, u32>) -> usize {
    let gt_edges: BTreeSet<(u32, u32)> = gt.edges.iter().map(|&(a, b)| (a.min(b), a.max(b))).collect();
    let mut credited = BTreeSet::new();
    for &(a, b) in &pred.edges {
        let (Some(&ga), Some(&gb)) = (matching.get(&a), matching.get(&b)) else {
            continue;
        };
        let key = (ga.min(gb), ga.max(gb));
        if gt_edges.contains(&key) {
            credited.insert(key);
        }
    }
    credited.len()
}

fn face_masks(g: &PlanarGraph, canvas: Canvas) -> Result<Vec<crate::geom::BitMask>> {
    Ok(enumerate_faces(g, canvas)?.into_iter().map(|f| f.mask).collect())
}

/// Region true positives, plus the predicted and ground-truth face counts.
///
/// Faces are matched greedily by descending IOU; a pair counts only with IOU
/// strictly above the threshold.
pub fn score_regions(pred: &PlanarGraph, gt: &PlanarGraph, canvas: Canvas) -> Result<Counts> {
    let pm = face_masks(pred, canvas)?;
    let gm = face_masks(gt, canvas)?;
    let mut pairs = Vec::new();
    for (i, p) in pm.iter().enumerate() {
        for (j, g) in gm.iter().enumerate() {
            let iou = p.iou(g);
            if iou > REGION_IOU_THRESHOLD {
                pairs.push((iou, i, j));
            }
        }
    }
    pairs.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2)));
    let (mut up, mut ug) = (BTreeSet::new(), BTreeSet::new());
    let mut tp = 0;
    for (_, i, j) in pairs {
        if !up.contains(&i) && !ug.contains(&j) {
            up.insert(i);
            ug.insert(j);
            tp += 1;
        }
    }
    Ok(Counts { tp, predicted: pm.len(), ground_truth: gm.len() })
}

/// Raw counts for one building at all three levels.
pub fn building_counts(pred: &PlanarGraph, gt: &PlanarGraph, canvas: Canvas) -> Result<[Counts; 3]> {
    let m = match_corners(pred, gt);
    let corner = Counts { tp: m.len(), predicted: pred.vertices.len(), ground_truth: gt.vertices.len() };
    let edge = Counts { tp: score_edges(pred, gt, &m), predicted: pred.edges.len(), ground_truth: gt.edges.len() };
    let region = score_regions(pred, gt, canvas)?;
    Ok([corner, edge, region])
}

/// Micro-averaged scores over aligned prediction and ground-truth lists.
pub fn evaluate(preds: &[PlanarGraph], gts: &[PlanarGraph], canvas: Canvas) -> Result<MetricsReport> {
    if preds.len() != gts.len() {
        return Err(Error::LengthMismatch(preds.len(), gts.len()));
    }
    let mut total = [Counts::default(); 3];
    for (p, g) in preds.iter().zip(gts) {
        for (t, c) in total.iter_mut().zip(building_counts(p, g, canvas)?) {
            *t += c;
        }
    }
    let s = |c: Counts| LevelScore::from_counts(c.tp, c.predicted, c.ground_truth);
    Ok(MetricsReport { corner: s(total[0]), edge: s(total[1]), region: s(total[2]) })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn square(x0: f64, y0: f64, s: f64) -> PlanarGraph {
        PlanarGraph::from_points(
            &[(x0, y0), (x0 + s, y0), (x0 + s, y0 + s), (x0, y0 + s)],
            &[(0, 1), (1, 2), (2, 3), (0, 3)],
        )
    }

    fn single(x: f64, y: f64) -> PlanarGraph {
        PlanarGraph::from_points(&[(x, y)], &[])
    }

    #[test]
    fn corner_tolerance_boundaries() {
        assert_eq!(match_corners(&single(10., 10.), &single(17., 10.)).len(), 1);
        assert_eq!(match_corners(&single(10., 10.), &single(18., 10.)).len(), 1);
        assert_eq!(match_corners(&single(10., 10.), &single(19., 10.)).len(), 0);
    }

    #[test]
    fn greedy_matching_is_one_to_one() {
        let pred = PlanarGraph::from_points(&[(10., 10.), (12., 10.)], &[]);
        let gt = PlanarGraph::from_points(&[(11., 10.)], &[]);
        let m = match_corners(&pred, &gt);
        assert_eq!(m.len(), 1);
        // Equal distances: the lower pred id wins.
        assert_eq!(m.get(&0), Some(&0));
    }

    #[test]
    fn identical_graphs_score_perfectly() {
        let g = square(20., 20., 50.);
        let r = evaluate(std::slice::from_ref(&g), std::slice::from_ref(&g), Canvas::default()).unwrap();
        assert_eq!(r.percentages(), [100.0; 9]);
        assert_eq!(r.edge.true_positives, 4);
    }

    #[test]
    fn edge_needs_gt_adjacency_and_credits_once() {
        let gt = square(20., 20., 50.);
        let m = match_corners(&gt, &gt);
        let diag = PlanarGraph::new(gt.vertices.clone(), vec![(0, 2)]);
        assert_eq!(score_edges(&diag, &gt, &m), 0);

        // Two predicted corners near GT corner 0 give two parallel edges
        // towards GT corner 1; only one is credited.
        let pred = PlanarGraph::from_points(&[(20., 20.), (70., 20.), (20., 23.), (70., 23.)], &[(0, 1), (2, 3)]);
        let gt2 = PlanarGraph::from_points(&[(20., 20.), (70., 20.), (20., 24.), (70., 24.)], &[(0, 1)]);
        let m = match_corners(&pred, &gt2);
        assert_eq!(m.len(), 4);
        let mut both = pred.clone();
        both.edges = vec![(0, 1), (2, 1)];
        assert_eq!(score_edges(&both, &gt2, &match_corners(&both, &gt2)), 1);
    }

    #[test]
    fn half_face_has_iou_one_half() {
        let gt = PlanarGraph::from_points(
            &[(20., 20.), (100., 20.), (100., 60.), (20., 60.)],
            &[(0, 1), (1, 2), (2, 3), (0, 3)],
        );
        let pred = PlanarGraph::from_points(
            &[(20., 20.), (60., 20.), (60., 60.), (20., 60.)],
            &[(0, 1), (1, 2), (2, 3), (0, 3)],
        );
        let masks = (face_masks(&pred, Canvas::default()).unwrap(), face_masks(&gt, Canvas::default()).unwrap());
        assert_eq!(masks.0[0].iou(&masks.1[0]), 0.5);
        let c = score_regions(&pred, &gt, Canvas::default()).unwrap();
        assert_eq!(c, Counts { tp: 0, predicted: 1, ground_truth: 1 });
    }

    #[test]
    fn disjoint_faces_do_not_match() {
        let c = score_regions(&square(10., 10., 30.), &square(100., 100., 30.), Canvas::default()).unwrap();
        assert_eq!(c.tp, 0);
    }

    #[test]
    fn aggregation_is_micro() {
        let g = square(20., 20., 50.);
        let r = evaluate(&[g.clone(), PlanarGraph::default()], &[g.clone(), g], Canvas::default()).unwrap();
        assert_eq!(r.percentages()[1], 50.0);
        assert_eq!(r.percentages()[0], 100.0);
        let empty = evaluate(&[PlanarGraph::default()], &[square(20., 20., 50.)], Canvas::default()).unwrap();
        assert_eq!(empty.percentages(), [0.0; 9]);
        assert_eq!(evaluate(&[], &[square(1., 1., 5.)], Canvas::default()), Err(Error::LengthMismatch(0, 1)));
    }
}
