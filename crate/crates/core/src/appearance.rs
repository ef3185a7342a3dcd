//! Appearance distances between detections and between tracklets.

use crate::error::{FcgError, Result};
use crate::types::Tracklet;

/// `1 - cos(a, b)`, in `[0, 2]`.
pub fn cosine_distance<A, B>(a: &[A], b: &[B]) -> Result<f64>
where
    A: Copy + Into<f64>,
    B: Copy + Into<f64>,
{
    if a.len() != b.len() {
        return Err(FcgError::DimensionMismatch {
            expected: a.len(),
            found: b.len(),
        });
    }
    let (mut dot, mut na, mut nb) = (0.0f64, 0.0f64, 0.0f64);
    for (&x, &y) in a.iter().zip(b) {
        let (x, y) = (x.into(), y.into());
        dot += x * y;
        na += x * x;
        nb += y * y;
    }
    let denom = (na * nb).sqrt();
    if !(denom.is_finite() && denom > 0.0) {
        return Err(FcgError::DegenerateFeature { source_row: None });
    }
    Ok((1.0 - dot / denom).clamp(0.0, 2.0))
}

/// Cosine distance between the cached median features of two tracklets.
pub fn tracklet_distance(t1: &Tracklet, t2: &Tracklet) -> Result<f64> {
    cosine_distance(t1.median_feature(), t2.median_feature()).map_err(|e| {
        // report whichever tracklet has the degenerate median
        let bad = if is_degenerate(t1.median_feature()) { t1 } else { t2 };
        e.at_row(bad.first().source_row())
    })
}

fn is_degenerate(v: &[f64]) -> bool {
    let n: f64 = v.iter().map(|x| x * x).sum();
    !(n.is_finite() && n > 0.0)
}
