//! The two-stage tracker.
//!
//! Stage one clusters detections inside non-overlapping windows of
//! `cfg.window` frames into tracklets, one lifted frame per window. Stage two
//! repeatedly fuses lifted frames by clustering the union of their tracklets
//! under the weighted distance until a single lifted frame spans the whole
//! sequence. Its tracklets are the output tracks.

use rayon::prelude::*;

use crate::appearance::cosine_distance;
use crate::clustering::{cluster_with_dendrogram, ConstraintSet, Dendrogram};
use crate::config::FcgConfig;
use crate::error::{FcgError, Result};
use crate::types::{Detection, LiftedFrame, TrackPoint, TrackSet, Tracklet};
use crate::weighting::weighted_distance;

/// Window index (0-based) of a 1-based frame.
fn window_of(frame: u32, window: usize) -> usize {
    (frame as usize - 1) / window
}

/// Stage one: one level-1 lifted frame per window, windows `0..N` where `N`
/// covers the last frame present. Windows without detections are kept
/// (empty) so spans stay contiguous.
pub fn generate_tracklets(detections: &[Detection], cfg: &FcgConfig) -> Result<Vec<LiftedFrame>> {
    Ok(stage_one(detections, cfg)?.into_iter().map(|(lf, _)| lf).collect())
}

type Traced<T> = (T, Vec<(String, Dendrogram)>);

fn stage_one(detections: &[Detection], cfg: &FcgConfig) -> Result<Vec<Traced<LiftedFrame>>> {
    cfg.validate()?;
    let Some(last) = detections.iter().map(Detection::frame).max() else {
        return Ok(Vec::new());
    };
    let num_windows = window_of(last, cfg.window) + 1;
    let mut buckets: Vec<Vec<Detection>> = vec![Vec::new(); num_windows];
    for det in detections {
        if det.feature().len() != cfg.feature_dim {
            return Err(FcgError::DimensionMismatch {
                expected: cfg.feature_dim,
                found: det.feature().len(),
            });
        }
        buckets[window_of(det.frame(), cfg.window)].push(det.clone());
    }

    buckets
        .into_par_iter()
        .enumerate()
        .map(|(n, mut dets)| {
            dets.sort_by_key(|d| (d.frame(), d.source_row()));
            let (tracklets, dendrogram) = cluster_window(&dets, cfg)?;
            let lf = LiftedFrame {
                level: 1,
                span_start: n,
                span_end: n + 1,
                tracklets,
            };
            Ok((lf, vec![(format!("window {n}"), dendrogram)]))
        })
        .collect()
}

fn cluster_window(dets: &[Detection], cfg: &FcgConfig) -> Result<(Vec<Tracklet>, Dendrogram)> {
    let mut constraints = ConstraintSet::new();
    for (i, a) in dets.iter().enumerate() {
        for (j, b) in dets.iter().enumerate().skip(i + 1) {
            if a.frame() == b.frame() {
                constraints.add(i, j);
            }
        }
    }
    let (partition, dendrogram) = cluster_with_dendrogram(
        dets,
        |a, b| {
            cosine_distance(a.feature(), b.feature()).map_err(|e| e.at_row(a.source_row()))
        },
        &constraints,
        cfg.tracklet_threshold,
    )?;
    let tracklets = partition
        .into_iter()
        .map(|members| Tracklet::new(members.into_iter().map(|i| dets[i].clone()).collect()))
        .collect::<Result<_>>()?;
    Ok((tracklets, dendrogram))
}

/// Clusters the union of the tracklets of `a` and `b` under the weighted
/// distance and merges each cluster into one tracklet.
pub fn fuse_lifted_frames(a: &LiftedFrame, b: &LiftedFrame, cfg: &FcgConfig) -> Result<LiftedFrame> {
    if cfg.consecutive && a.span_end > b.span_start {
        return Err(FcgError::Invariant(format!(
            "lifted frames [{}, {}] and [{}, {}] are not in temporal order",
            a.span_start, a.span_end, b.span_start, b.span_end
        )));
    }
    let items: Vec<&Tracklet> = a.tracklets.iter().chain(&b.tracklets).collect();
    let (tracklets, _) = cluster_tracklets(&items, cfg)?;
    Ok(fused_frame(a, b, tracklets))
}

fn fused_frame(a: &LiftedFrame, b: &LiftedFrame, tracklets: Vec<Tracklet>) -> LiftedFrame {
    LiftedFrame {
        level: a.level.max(b.level) + 1,
        span_start: a.span_start.min(b.span_start),
        span_end: a.span_end.max(b.span_end),
        tracklets,
    }
}

fn cluster_tracklets(items: &[&Tracklet], cfg: &FcgConfig) -> Result<(Vec<Tracklet>, Dendrogram)> {
    let mut constraints = ConstraintSet::new();
    for (i, a) in items.iter().enumerate() {
        for (j, b) in items.iter().enumerate().skip(i + 1) {
            if a.spans_overlap(b) {
                constraints.add(i, j);
            }
        }
    }
    let (partition, dendrogram) = cluster_with_dendrogram(
        items,
        |x, y| weighted_distance(x, y, cfg),
        &constraints,
        cfg.track_threshold,
    )?;
    let tracklets = partition
        .into_iter()
        .map(|members| Tracklet::merge(members.into_iter().map(|i| items[i].clone())))
        .collect::<Result<_>>()?;
    Ok((tracklets, dendrogram))
}

/// Result of a full run, with the hierarchy depth for inspection.
#[derive(Debug, Clone)]
pub struct RunOutput {
    pub tracks: TrackSet,
    pub final_frame: Option<LiftedFrame>,
    /// Number of levels in the hierarchy, counting the tracklet level.
    pub levels: u32,
    /// `(label, dump)` per clustering run, filled by [`run_with_dendrograms`].
    pub dendrograms: Vec<(String, String)>,
}

pub fn run(detections: &[Detection], cfg: &FcgConfig) -> Result<TrackSet> {
    run_detailed(detections, cfg).map(|out| out.tracks)
}

pub fn run_detailed(detections: &[Detection], cfg: &FcgConfig) -> Result<RunOutput> {
    run_inner(detections, cfg, false)
}

/// Like [`run_detailed`], also keeping a text dump of every dendrogram.
pub fn run_with_dendrograms(detections: &[Detection], cfg: &FcgConfig) -> Result<RunOutput> {
    run_inner(detections, cfg, true)
}

fn run_inner(detections: &[Detection], cfg: &FcgConfig, keep_dendrograms: bool) -> Result<RunOutput> {
    cfg.validate()?;
    let mut dumps = Vec::new();
    let mut record = |trace: Vec<(String, Dendrogram)>| {
        if keep_dendrograms {
            dumps.extend(trace.into_iter().map(|(label, d)| (label, d.dump())));
        }
    };

    let mut frames = Vec::new();
    for (lf, trace) in stage_one(detections, cfg)? {
        lf.validate(cfg.window)?;
        frames.push(lf);
        record(trace);
    }
    if frames.is_empty() {
        return Ok(RunOutput {
            tracks: TrackSet::new(),
            final_frame: None,
            levels: 0,
            dendrograms: dumps,
        });
    }

    let final_frame = if cfg.consecutive {
        while frames.len() > 1 {
            let level = reduce_level(frames, cfg)?;
            frames = Vec::with_capacity(level.len());
            for (lf, trace) in level {
                frames.push(lf);
                record(trace);
            }
        }
        frames.pop().expect("one lifted frame remains")
    } else if frames.len() == 1 {
        frames.pop().expect("one lifted frame")
    } else {
        // one global clustering of every tracklet, priors off
        let global_cfg = cfg.without_priors();
        let span_end = frames.last().map_or(0, |f| f.span_end);
        let items: Vec<&Tracklet> = frames.iter().flat_map(|f| &f.tracklets).collect();
        let (tracklets, dendrogram) = cluster_tracklets(&items, &global_cfg)?;
        record(vec![(format!("global [0, {span_end}]"), dendrogram)]);
        LiftedFrame {
            level: 2,
            span_start: 0,
            span_end,
            tracklets,
        }
    };
    final_frame.validate(cfg.window)?;
    Ok(RunOutput {
        tracks: assign_ids(&final_frame.tracklets),
        levels: final_frame.level,
        final_frame: Some(final_frame),
        dendrograms: dumps,
    })
}

/// Fuses adjacent pairs (1st with 2nd, 3rd with 4th, ...); an odd trailing
/// frame moves up unchanged.
fn reduce_level(frames: Vec<LiftedFrame>, cfg: &FcgConfig) -> Result<Vec<Traced<LiftedFrame>>> {
    frames
        .par_chunks(2)
        .map(|pair| match pair {
            [a, b] => {
                if cfg.consecutive && a.span_end > b.span_start {
                    return Err(FcgError::Invariant("lifted frames out of order".into()));
                }
                let items: Vec<&Tracklet> = a.tracklets.iter().chain(&b.tracklets).collect();
                let (tracklets, dendrogram) = cluster_tracklets(&items, cfg)?;
                let fused = fused_frame(a, b, tracklets);
                let label = format!("level {} [{}, {}]", fused.level, fused.span_start, fused.span_end);
                Ok((fused, vec![(label, dendrogram)]))
            }
            [single] => Ok((single.clone(), Vec::new())),
            _ => unreachable!("chunks of two"),
        })
        .collect()
}

/// Numbers tracks from 1 by first frame, then by the source row of the
/// first detection.
pub fn assign_ids(tracklets: &[Tracklet]) -> TrackSet {
    let mut order: Vec<&Tracklet> = tracklets.iter().collect();
    order.sort_by_key(|t| (t.first_frame(), t.first().source_row()));
    let points = order.iter().enumerate().flat_map(|(k, t)| {
        let id = k as u32 + 1;
        t.detections().iter().map(move |d| {
            (
                id,
                TrackPoint {
                    frame: d.frame(),
                    bbox: d.bbox(),
                    score: d.score(),
                },
            )
        })
    });
    TrackSet::from_points(points).expect("tracklets are frame-disjoint")
}
