//! Temporal and spatial priors that scale the appearance distance between
//! two tracklets.

use crate::appearance::tracklet_distance;
use crate::clustering::SENTINEL;
use crate::config::FcgConfig;
use crate::error::Result;
use crate::geometry::{box_displacement, extrapolate_scaled, iou_distance};
use crate::types::{BBox, Tracklet};

/// Endpoint geometry of an ordered tracklet pair: the last box of the earlier
/// tracklet, the first box of the later one and the frame gap between them.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairContext {
    pub last_box_k: BBox,
    pub first_box_q: BBox,
    pub delta_t: u32,
}

impl PairContext {
    /// Orders the pair in time. Returns `None` when the frame spans overlap.
    pub fn between(t1: &Tracklet, t2: &Tracklet, cfg: &FcgConfig) -> Option<Self> {
        let (earlier, later) = if t1.last_frame() < t2.first_frame() {
            (t1, t2)
        } else if t2.last_frame() < t1.first_frame() {
            (t2, t1)
        } else {
            return None;
        };
        let delta_t = later.first_frame() - earlier.last_frame();
        let mut last_box_k = earlier.last().bbox();
        if cfg.use_motion && earlier.len() >= 2 {
            let dets = earlier.detections();
            let prev = &dets[dets.len() - 2];
            let curr = &dets[dets.len() - 1];
            let gap = f64::from(curr.frame() - prev.frame());
            let steps = delta_t.min(cfg.motion_steps_cap());
            last_box_k = extrapolate_scaled(&prev.bbox(), &curr.bbox(), gap, steps);
        }
        Some(PairContext {
            last_box_k,
            first_box_q: later.first().bbox(),
            delta_t,
        })
    }
}

/// 1 when the gap is at most `k_t` frames, `c_t` otherwise.
pub fn temporal_weight(delta_t: u32, cfg: &FcgConfig) -> f64 {
    if delta_t <= cfg.k_t {
        1.0
    } else {
        cfg.c_t
    }
}

/// `(lambda_c, lambda_f)`: the closeness factor `min(1, d_iou + off)` and the
/// far factor, `c_f` when the normalized displacement exceeds `k_f`.
pub fn spatial_weights(ctx: &PairContext, cfg: &FcgConfig) -> (f64, f64) {
    let lambda_c = (iou_distance(&ctx.last_box_k, &ctx.first_box_q) + cfg.off).min(1.0);
    let lambda_f = if box_displacement(&ctx.last_box_k, &ctx.first_box_q) <= cfg.k_f {
        1.0
    } else {
        cfg.c_f
    };
    (lambda_c, lambda_f)
}

/// Product of the raw factors. Disabled factors are exactly 1.
pub fn combine(base: f64, lambda_t: f64, lambda_c: f64, lambda_f: f64) -> f64 {
    base * lambda_t * lambda_c * lambda_f
}

/// Appearance distance scaled by the enabled priors, or [`SENTINEL`] when
/// the two tracklets overlap in time.
pub fn weighted_distance(t1: &Tracklet, t2: &Tracklet, cfg: &FcgConfig) -> Result<f64> {
    let Some(ctx) = PairContext::between(t1, t2, cfg) else {
        return Ok(SENTINEL);
    };
    let base = tracklet_distance(t1, t2)?;
    let lambda_t = if cfg.use_temporal {
        temporal_weight(ctx.delta_t, cfg)
    } else {
        1.0
    };
    let (lambda_c, lambda_f) = if cfg.use_spatial {
        spatial_weights(&ctx, cfg)
    } else {
        (1.0, 1.0)
    };
    Ok(combine(base, lambda_t, lambda_c, lambda_f))
}
