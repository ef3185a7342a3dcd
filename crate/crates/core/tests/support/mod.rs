//! Independent reference implementations used by the integration tests.

#![allow(dead_code)]

use std::collections::{BTreeMap, HashSet};

use fcg::geometry::iou;
use fcg::TrackSet;

/// Constrained average linkage by brute force: every step recomputes each
/// admissible cluster pair's distance as the plain mean over item pairs of
/// `dist`, merges the closest pair (ties: smallest `(id_a, id_b)`), and
/// stops once the closest admissible pair is above `threshold`.
pub fn brute_force_upgma(
    dist: &[Vec<f64>],
    cannot_link: &HashSet<(usize, usize)>,
    threshold: f64,
) -> Vec<Vec<usize>> {
    let n = dist.len();
    let mut clusters: Vec<(usize, Vec<usize>)> = (0..n).map(|i| (i, vec![i])).collect();
    let mut next_id = n;
    let blocked = |a: &[usize], b: &[usize]| {
        a.iter()
            .any(|&i| b.iter().any(|&j| cannot_link.contains(&(i.min(j), i.max(j)))))
    };
    loop {
        let mut best: Option<(f64, usize, usize, usize, usize)> = None;
        for x in 0..clusters.len() {
            for y in 0..clusters.len() {
                if x == y {
                    continue;
                }
                let (ida, ma) = &clusters[x];
                let (idb, mb) = &clusters[y];
                if ida > idb || blocked(ma, mb) {
                    continue;
                }
                let mut sum = 0.0;
                for &i in ma {
                    for &j in mb {
                        sum += dist[i][j];
                    }
                }
                let d = sum / (ma.len() * mb.len()) as f64;
                let key = (d, *ida, *idb);
                let better = match best {
                    None => true,
                    Some((bd, ba, bb, _, _)) => key < (bd, ba, bb),
                };
                if better {
                    best = Some((d, *ida, *idb, x, y));
                }
            }
        }
        let Some((d, _, _, x, y)) = best else { break };
        if d > threshold {
            break;
        }
        let (hi, lo) = if x > y { (x, y) } else { (y, x) };
        let (_, mut a) = clusters.remove(hi);
        let (_, b) = clusters.remove(lo);
        a.extend(b);
        a.sort_unstable();
        clusters.push((next_id, a));
        next_id += 1;
    }
    let mut out: Vec<Vec<usize>> = clusters.into_iter().map(|(_, m)| m).collect();
    out.sort_by_key(|c| c[0]);
    out
}

/// IDTP by trying every one-to-one mapping between GT and predicted IDs.
pub fn brute_force_idtp(gt: &TrackSet, pred: &TrackSet, iou_threshold: f64) -> usize {
    let gt_ids: Vec<u32> = gt.tracks().keys().copied().collect();
    let pred_ids: Vec<u32> = pred.tracks().keys().copied().collect();
    let mut overlap: BTreeMap<(u32, u32), usize> = BTreeMap::new();
    for (&g, gpts) in gt.tracks() {
        for (&p, ppts) in pred.tracks() {
            let c = gpts
                .iter()
                .filter(|gp| {
                    ppts.iter()
                        .any(|pp| pp.frame == gp.frame && iou(&gp.bbox, &pp.bbox) >= iou_threshold)
                })
                .count();
            overlap.insert((g, p), c);
        }
    }
    fn search(
        i: usize,
        gt_ids: &[u32],
        pred_ids: &[u32],
        used: &mut Vec<bool>,
        overlap: &BTreeMap<(u32, u32), usize>,
    ) -> usize {
        if i == gt_ids.len() {
            return 0;
        }
        // leave this GT identity unmatched
        let mut best = search(i + 1, gt_ids, pred_ids, used, overlap);
        for (k, &p) in pred_ids.iter().enumerate() {
            if !used[k] {
                used[k] = true;
                let v = overlap[&(gt_ids[i], p)] + search(i + 1, gt_ids, pred_ids, used, overlap);
                used[k] = false;
                best = best.max(v);
            }
        }
        best
    }
    let mut used = vec![false; pred_ids.len()];
    search(0, &gt_ids, &pred_ids, &mut used, &overlap)
}
