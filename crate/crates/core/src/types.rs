//! Domain types shared across the tracker: boxes, detections, tracklets,
//! lifted frames and final track sets.

use std::collections::BTreeMap;
use std::sync::Arc;

use crate::error::{FcgError, Result};

/// Axis-aligned box in pixels, top-left corner plus size.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BBox {
    pub x: f64,
    pub y: f64,
    pub w: f64,
    pub h: f64,
}

impl BBox {
    /// Builds a box, rejecting non-finite coordinates and non-positive sizes.
    pub fn new(x: f64, y: f64, w: f64, h: f64) -> Option<Self> {
        let finite = x.is_finite() && y.is_finite() && w.is_finite() && h.is_finite();
        (finite && w > 0.0 && h > 0.0).then_some(BBox { x, y, w, h })
    }

    pub fn left(&self) -> f64 {
        self.x
    }

    pub fn top(&self) -> f64 {
        self.y
    }

    pub fn right(&self) -> f64 {
        self.x + self.w
    }

    pub fn bottom(&self) -> f64 {
        self.y + self.h
    }

    pub fn area(&self) -> f64 {
        self.w * self.h
    }
}

/// One object instance in one frame.
///
/// The feature is reference counted so detections can be moved between
/// tracklets without copying the embedding.
#[derive(Debug, Clone, PartialEq)]
pub struct Detection {
    frame: u32,
    bbox: BBox,
    score: f64,
    feature: Arc<[f32]>,
    source_row: usize,
}

impl Detection {
    pub fn new(
        frame: u32,
        bbox: BBox,
        score: f64,
        feature: impl Into<Arc<[f32]>>,
        source_row: usize,
    ) -> Result<Self> {
        let feature = feature.into();
        if frame == 0 {
            return Err(FcgError::InvalidDetection {
                row: source_row,
                reason: "frame indices are 1-based".into(),
            });
        }
        if !(0.0..=1.0).contains(&score) {
            return Err(FcgError::InvalidDetection {
                row: source_row,
                reason: format!("score {score} outside [0, 1]"),
            });
        }
        let norm_sq: f64 = feature.iter().map(|&v| f64::from(v) * f64::from(v)).sum();
        if feature.is_empty() || !norm_sq.is_finite() || norm_sq <= 0.0 {
            return Err(FcgError::DegenerateFeature {
                source_row: Some(source_row),
            });
        }
        Ok(Detection {
            frame,
            bbox,
            score,
            feature,
            source_row,
        })
    }

    pub fn frame(&self) -> u32 {
        self.frame
    }

    pub fn bbox(&self) -> BBox {
        self.bbox
    }

    pub fn score(&self) -> f64 {
        self.score
    }

    pub fn feature(&self) -> &[f32] {
        &self.feature
    }

    pub fn source_row(&self) -> usize {
        self.source_row
    }

    /// Same detection moved to another frame index (used by subsampling).
    pub fn with_frame(&self, frame: u32) -> Self {
        Detection {
            frame,
            ..self.clone()
        }
    }

    pub(crate) fn with_source_row(&self, source_row: usize) -> Self {
        Detection {
            source_row,
            ..self.clone()
        }
    }
}

/// Element-wise median of a set of equal-length vectors. An even count
/// takes the mean of the two middle values.
pub fn elementwise_median<'a, I>(features: I) -> Result<Vec<f64>>
where
    I: IntoIterator<Item = &'a [f32]>,
{
    let rows: Vec<&[f32]> = features.into_iter().collect();
    let first = rows.first().ok_or(FcgError::EmptyInput)?;
    let dim = first.len();
    if let Some(bad) = rows.iter().find(|r| r.len() != dim) {
        return Err(FcgError::DimensionMismatch {
            expected: dim,
            found: bad.len(),
        });
    }
    let n = rows.len();
    let mut column = vec![0.0f64; n];
    let mut median = Vec::with_capacity(dim);
    for d in 0..dim {
        for (slot, row) in column.iter_mut().zip(&rows) {
            *slot = f64::from(row[d]);
        }
        let mid = n / 2;
        let (lower, upper, _) = column.select_nth_unstable_by(mid, f64::total_cmp);
        let upper = *upper;
        if n % 2 == 1 {
            median.push(upper);
        } else {
            let below = lower.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            median.push((below + upper) / 2.0);
        }
    }
    Ok(median)
}

/// Frame-disjoint group of detections believed to be one object, with a
/// cached element-wise median feature.
#[derive(Debug, Clone, PartialEq)]
pub struct Tracklet {
    detections: Vec<Detection>,
    median_feature: Vec<f64>,
}

impl Tracklet {
    pub fn new(mut detections: Vec<Detection>) -> Result<Self> {
        if detections.is_empty() {
            return Err(FcgError::EmptyInput);
        }
        detections.sort_by_key(|d| d.frame);
        if let Some(pair) = detections.windows(2).find(|p| p[0].frame == p[1].frame) {
            return Err(FcgError::DuplicateFrame {
                frame: pair[0].frame,
            });
        }
        let median_feature = elementwise_median(detections.iter().map(Detection::feature))?;
        Ok(Tracklet {
            detections,
            median_feature,
        })
    }

    /// Concatenates the detections of several tracklets and recomputes the median.
    pub fn merge(parts: impl IntoIterator<Item = Tracklet>) -> Result<Self> {
        let detections = parts.into_iter().flat_map(|t| t.detections).collect();
        Tracklet::new(detections)
    }

    pub fn detections(&self) -> &[Detection] {
        &self.detections
    }

    pub fn median_feature(&self) -> &[f64] {
        &self.median_feature
    }

    pub fn len(&self) -> usize {
        self.detections.len()
    }

    pub fn is_empty(&self) -> bool {
        self.detections.is_empty()
    }

    pub fn frames(&self) -> impl Iterator<Item = u32> + '_ {
        self.detections.iter().map(|d| d.frame)
    }

    pub fn first(&self) -> &Detection {
        &self.detections[0]
    }

    pub fn last(&self) -> &Detection {
        &self.detections[self.detections.len() - 1]
    }

    pub fn first_frame(&self) -> u32 {
        self.first().frame
    }

    pub fn last_frame(&self) -> u32 {
        self.last().frame
    }

    /// True when the frame spans `[first, last]` of the two tracklets intersect.
    pub fn spans_overlap(&self, other: &Tracklet) -> bool {
        self.first_frame() <= other.last_frame() && other.first_frame() <= self.last_frame()
    }
}

/// Tracklets covering window indices `[span_start, span_end)` at one level
/// of the fusion hierarchy.
#[derive(Debug, Clone, PartialEq)]
pub struct LiftedFrame {
    pub level: u32,
    pub span_start: usize,
    pub span_end: usize,
    pub tracklets: Vec<Tracklet>,
}

impl LiftedFrame {
    /// First and last 1-based frame covered for a window size.
    pub fn frame_range(&self, window: usize) -> (u64, u64) {
        (
            (self.span_start * window) as u64 + 1,
            (self.span_end * window) as u64,
        )
    }

    pub fn num_detections(&self) -> usize {
        self.tracklets.iter().map(Tracklet::len).sum()
    }

    /// Checks span ordering, that every detection lies inside the span and
    /// that no detection (by source row) appears twice.
    pub fn validate(&self, window: usize) -> Result<()> {
        if self.span_end <= self.span_start {
            return Err(FcgError::Invariant(format!(
                "lifted frame span [{}, {}] is empty",
                self.span_start, self.span_end
            )));
        }
        let (lo, hi) = self.frame_range(window);
        let mut rows = Vec::with_capacity(self.num_detections());
        for det in self.tracklets.iter().flat_map(|t| t.detections()) {
            let f = u64::from(det.frame());
            if f < lo || f > hi {
                return Err(FcgError::Invariant(format!(
                    "frame {f} outside lifted frame range [{lo}, {hi}]"
                )));
            }
            rows.push(det.source_row());
        }
        rows.sort_unstable();
        if rows.windows(2).any(|w| w[0] == w[1]) {
            return Err(FcgError::Invariant(
                "detection assigned to two tracklets".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrackPoint {
    pub frame: u32,
    pub bbox: BBox,
    pub score: f64,
}

/// Final labelled tracks, keyed by positive ID. Points within a track are
/// strictly increasing in frame.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct TrackSet {
    tracks: BTreeMap<u32, Vec<TrackPoint>>,
}

impl TrackSet {
    pub fn new() -> Self {
        Self::default()
    }

    /// Groups `(id, point)` pairs into tracks, sorting by frame and rejecting
    /// a repeated `(frame, id)`.
    pub fn from_points(points: impl IntoIterator<Item = (u32, TrackPoint)>) -> Result<Self> {
        let mut tracks: BTreeMap<u32, Vec<TrackPoint>> = BTreeMap::new();
        for (id, p) in points {
            tracks.entry(id).or_default().push(p);
        }
        for (&id, pts) in tracks.iter_mut() {
            pts.sort_by_key(|p| p.frame);
            if let Some(w) = pts.windows(2).find(|w| w[0].frame == w[1].frame) {
                return Err(FcgError::DuplicateTrackEntry {
                    frame: w[0].frame,
                    id,
                });
            }
        }
        Ok(TrackSet { tracks })
    }

    pub fn tracks(&self) -> &BTreeMap<u32, Vec<TrackPoint>> {
        &self.tracks
    }

    pub fn get(&self, id: u32) -> Option<&[TrackPoint]> {
        self.tracks.get(&id).map(Vec::as_slice)
    }

    pub fn len(&self) -> usize {
        self.tracks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tracks.is_empty()
    }

    pub fn num_boxes(&self) -> usize {
        self.tracks.values().map(Vec::len).sum()
    }

    /// Iterates over every `(id, point)` pair, ordered by id then frame.
    pub fn points(&self) -> impl Iterator<Item = (u32, &TrackPoint)> {
        self.tracks
            .iter()
            .flat_map(|(&id, pts)| pts.iter().map(move |p| (id, p)))
    }

    /// Points grouped per frame; each frame's entries are sorted by id.
    pub fn by_frame(&self) -> BTreeMap<u32, Vec<(u32, BBox)>> {
        let mut frames: BTreeMap<u32, Vec<(u32, BBox)>> = BTreeMap::new();
        for (id, p) in self.points() {
            frames.entry(p.frame).or_default().push((id, p.bbox));
        }
        frames
    }
}
