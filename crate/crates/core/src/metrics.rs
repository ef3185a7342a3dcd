//! Identity metrics: IDF1 under an optimal one-to-one ID assignment, and
//! ID switch counting.

use std::collections::{BTreeMap, HashMap};

use pathfinding::prelude::{kuhn_munkres, Matrix};

use crate::geometry::iou;
use crate::types::{BBox, TrackSet};

pub const DEFAULT_IOU_THRESHOLD: f64 = 0.5;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IdentityCounts {
    pub idtp: usize,
    pub idfp: usize,
    pub idfn: usize,
}

impl IdentityCounts {
    pub fn idf1(&self) -> f64 {
        let denom = 2 * self.idtp + self.idfp + self.idfn;
        if denom == 0 {
            1.0
        } else {
            2.0 * self.idtp as f64 / denom as f64
        }
    }
}

/// Frames in which each `(gt_id, pred_id)` pair has IoU at or above the threshold.
pub fn pair_overlap_counts(gt: &TrackSet, pred: &TrackSet, iou_threshold: f64) -> BTreeMap<(u32, u32), usize> {
    let pred_frames = pred.by_frame();
    let mut counts = BTreeMap::new();
    for (frame, gt_boxes) in gt.by_frame() {
        let Some(pred_boxes) = pred_frames.get(&frame) else {
            continue;
        };
        for (gid, gb) in &gt_boxes {
            for (pid, pb) in pred_boxes {
                if iou(gb, pb) >= iou_threshold {
                    *counts.entry((*gid, *pid)).or_insert(0) += 1;
                }
            }
        }
    }
    counts
}

pub fn identity_counts(gt: &TrackSet, pred: &TrackSet, iou_threshold: f64) -> IdentityCounts {
    let counts = pair_overlap_counts(gt, pred, iou_threshold);
    let gt_ids: Vec<u32> = gt.tracks().keys().copied().collect();
    let pred_ids: Vec<u32> = pred.tracks().keys().copied().collect();
    let idtp = if counts.is_empty() {
        0
    } else {
        // square matrix padded with zero-weight dummies
        let size = gt_ids.len().max(pred_ids.len());
        let mut weights = Matrix::new(size, size, 0i64);
        let gt_index: HashMap<u32, usize> = gt_ids.iter().enumerate().map(|(i, &g)| (g, i)).collect();
        let pred_index: HashMap<u32, usize> = pred_ids.iter().enumerate().map(|(i, &p)| (p, i)).collect();
        for (&(g, p), &c) in &counts {
            weights[(gt_index[&g], pred_index[&p])] = c as i64;
        }
        let (total, _) = kuhn_munkres(&weights);
        total as usize
    };
    IdentityCounts {
        idtp,
        idfp: pred.num_boxes() - idtp,
        idfn: gt.num_boxes() - idtp,
    }
}

/// `2 IDTP / (2 IDTP + IDFP + IDFN)`; 1.0 when both sets are empty.
pub fn idf1(gt: &TrackSet, pred: &TrackSet, iou_threshold: f64) -> f64 {
    identity_counts(gt, pred, iou_threshold).idf1()
}

/// Greedy per-frame matching by descending IoU, ties to the lower predicted
/// ID, then the lower GT ID.
fn match_frame(gt_boxes: &[(u32, BBox)], pred_boxes: &[(u32, BBox)], iou_threshold: f64) -> Vec<(u32, u32)> {
    let mut candidates = Vec::new();
    for (gid, gb) in gt_boxes {
        for (pid, pb) in pred_boxes {
            let v = iou(gb, pb);
            if v >= iou_threshold {
                candidates.push((v, *pid, *gid));
            }
        }
    }
    candidates.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2)));
    let mut used_gt = Vec::new();
    let mut used_pred = Vec::new();
    let mut pairs = Vec::new();
    for (_, pid, gid) in candidates {
        if used_gt.contains(&gid) || used_pred.contains(&pid) {
            continue;
        }
        used_gt.push(gid);
        used_pred.push(pid);
        pairs.push((gid, pid));
    }
    pairs
}

/// Number of times a GT identity's matched predicted ID differs from its
/// previous match.
pub fn id_switches(gt: &TrackSet, pred: &TrackSet, iou_threshold: f64) -> usize {
    let pred_frames = pred.by_frame();
    let mut last: HashMap<u32, u32> = HashMap::new();
    let mut switches = 0;
    for (frame, gt_boxes) in gt.by_frame() {
        let Some(pred_boxes) = pred_frames.get(&frame) else {
            continue;
        };
        for (gid, pid) in match_frame(&gt_boxes, pred_boxes, iou_threshold) {
            if let Some(prev) = last.insert(gid, pid) {
                if prev != pid {
                    switches += 1;
                }
            }
        }
    }
    switches
}
