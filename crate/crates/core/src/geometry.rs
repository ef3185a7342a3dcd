//! Box-to-box distances and constant-velocity extrapolation.

use crate::types::BBox;

/// `1 - IoU`. Disjoint boxes give exactly 1, identical boxes exactly 0.
pub fn iou_distance(a: &BBox, b: &BBox) -> f64 {
    1.0 - iou(a, b)
}

pub fn iou(a: &BBox, b: &BBox) -> f64 {
    let iw = a.right().min(b.right()) - a.left().max(b.left());
    let ih = a.bottom().min(b.bottom()) - a.top().max(b.top());
    if iw <= 0.0 || ih <= 0.0 {
        return 0.0;
    }
    if a == b {
        return 1.0;
    }
    let inter = iw * ih;
    let union = a.area() + b.area() - inter;
    (inter / union).clamp(0.0, 1.0)
}

/// Mean of the normalized top-left and bottom-right corner distances.
///
/// x differences are divided by the mean width of the two boxes, y
/// differences by the mean height.
pub fn box_displacement(a: &BBox, b: &BBox) -> f64 {
    let mean_w = (a.w + b.w) / 2.0;
    let mean_h = (a.h + b.h) / 2.0;
    let d1 = ((a.left() - b.left()) / mean_w).hypot((a.top() - b.top()) / mean_h);
    let d2 = ((a.right() - b.right()) / mean_w).hypot((a.bottom() - b.bottom()) / mean_h);
    (d1 + d2) / 2.0
}

/// Moves `curr` forward by `steps` frames at the per-frame velocity
/// `curr - prev`. Size changes are extrapolated too; a size that would drop
/// below one pixel is held at `min(current, 1)`.
pub fn extrapolate(prev: &BBox, curr: &BBox, steps: u32) -> BBox {
    extrapolate_scaled(prev, curr, 1.0, steps)
}

/// Like [`extrapolate`], but `prev` lies `frame_gap` frames before `curr`,
/// so the per-frame velocity is `(curr - prev) / frame_gap`.
pub fn extrapolate_scaled(prev: &BBox, curr: &BBox, frame_gap: f64, steps: u32) -> BBox {
    let k = f64::from(steps) / frame_gap;
    let size = |c: f64, p: f64| {
        let v = c + k * (c - p);
        if v < 1.0 && v < c {
            c.min(1.0)
        } else {
            v
        }
    };
    BBox {
        x: curr.x + k * (curr.x - prev.x),
        y: curr.y + k * (curr.y - prev.y),
        w: size(curr.w, prev.w),
        h: size(curr.h, prev.h),
    }
}
