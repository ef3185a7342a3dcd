//! MOTChallenge text formats, the binary feature sidecar, and frame-rate
//! subsampling.
//!
//! Feature sidecar layout (little endian):
//!
//! ```text
//! "FCGF" | version: u32 = 1 | rows: u32 | dim: u32 | rows * dim f32, row-major
//! ```
//!
//! Row `i` holds the feature of the `i`-th non-blank line of the matching
//! `det.txt`.

use std::fmt::Write as _;

use crate::config::FcgConfig;
use crate::error::{FcgError, Result};
use crate::types::{BBox, Detection, TrackPoint, TrackSet};

pub const FEATURE_MAGIC: &[u8; 4] = b"FCGF";
pub const FEATURE_VERSION: u32 = 1;
const HEADER_LEN: usize = 16;

/// Score-filtered detections of one sequence, sorted by `(frame, source_row)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SequenceInput {
    pub name: String,
    pub detections: Vec<Detection>,
    pub fps_ratio_applied: u32,
}

impl SequenceInput {
    pub fn new(name: impl Into<String>, mut detections: Vec<Detection>) -> Self {
        detections.sort_by_key(|d| (d.frame(), d.source_row()));
        SequenceInput {
            name: name.into(),
            detections,
            fps_ratio_applied: 1,
        }
    }
}

/// Decoded feature sidecar.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureTable {
    pub rows: usize,
    pub dim: usize,
    pub values: Vec<f32>,
}

impl FeatureTable {
    pub fn row(&self, i: usize) -> &[f32] {
        &self.values[i * self.dim..(i + 1) * self.dim]
    }
}

pub fn read_features(blob: &[u8]) -> Result<FeatureTable> {
    if blob.len() < HEADER_LEN {
        return Err(FcgError::BadFeatureFile("truncated header".into()));
    }
    if &blob[..4] != FEATURE_MAGIC {
        return Err(FcgError::BadFeatureFile("bad magic".into()));
    }
    let word = |k: usize| u32::from_le_bytes(blob[4 + 4 * k..8 + 4 * k].try_into().unwrap());
    let version = word(0);
    if version != FEATURE_VERSION {
        return Err(FcgError::BadFeatureFile(format!("unsupported version {version}")));
    }
    let rows = word(1) as usize;
    let dim = word(2) as usize;
    if dim == 0 {
        return Err(FcgError::BadFeatureFile("dimension is zero".into()));
    }
    let expected = rows
        .checked_mul(dim)
        .and_then(|c| c.checked_mul(4))
        .ok_or_else(|| FcgError::BadFeatureFile("size overflow".into()))?;
    let body = &blob[HEADER_LEN..];
    if body.len() != expected {
        return Err(FcgError::BadFeatureFile(format!(
            "expected {expected} payload bytes for {rows}x{dim}, found {}",
            body.len()
        )));
    }
    let values = body
        .chunks_exact(4)
        .map(|c| f32::from_le_bytes(c.try_into().unwrap()))
        .collect();
    Ok(FeatureTable { rows, dim, values })
}

pub fn write_features(dim: usize, rows: &[&[f32]]) -> Vec<u8> {
    let n = rows.len();
    let mut out = Vec::with_capacity(HEADER_LEN + n * dim * 4);
    out.extend_from_slice(FEATURE_MAGIC);
    out.extend_from_slice(&FEATURE_VERSION.to_le_bytes());
    out.extend_from_slice(&(n as u32).to_le_bytes());
    out.extend_from_slice(&(dim as u32).to_le_bytes());
    for row in rows {
        assert_eq!(row.len(), dim, "feature row of wrong dimension");
        for v in row.iter() {
            out.extend_from_slice(&v.to_le_bytes());
        }
    }
    out
}

fn data_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty())
}

fn fields(line_no: usize, line: &str, min: usize) -> Result<Vec<f64>> {
    let vals = line
        .split(',')
        .map(|f| {
            f.trim().parse::<f64>().map_err(|_| FcgError::Parse {
                line: line_no,
                message: format!("not a number: {:?}", f.trim()),
            })
        })
        .collect::<Result<Vec<f64>>>()?;
    if vals.len() < min {
        return Err(FcgError::Parse {
            line: line_no,
            message: format!("expected at least {min} fields, found {}", vals.len()),
        });
    }
    Ok(vals)
}

fn positive_int(line_no: usize, v: f64, what: &str) -> Result<u32> {
    if v.fract() == 0.0 && v >= 1.0 && v <= f64::from(u32::MAX) {
        Ok(v as u32)
    } else {
        Err(FcgError::Parse {
            line: line_no,
            message: format!("{what} must be a positive integer, found {v}"),
        })
    }
}

/// Parses `det.txt` and its feature sidecar, keeping rows with
/// `conf >= cfg.score_threshold`.
pub fn parse_detections(det_text: &str, feature_blob: &[u8], cfg: &FcgConfig) -> Result<SequenceInput> {
    let table = read_features(feature_blob)?;
    let lines: Vec<(usize, &str)> = data_lines(det_text).collect();
    if lines.len() != table.rows {
        return Err(FcgError::RowCountMismatch {
            csv_rows: lines.len(),
            blob_rows: table.rows,
        });
    }
    if table.dim != cfg.feature_dim {
        return Err(FcgError::BadFeatureFile(format!(
            "feature dimension {} does not match configured {}",
            table.dim, cfg.feature_dim
        )));
    }
    let mut detections = Vec::new();
    for (row, (line_no, line)) in lines.into_iter().enumerate() {
        let v = fields(line_no, line, 7)?;
        let frame = positive_int(line_no, v[0], "frame")?;
        let score = v[6];
        if !(score >= cfg.score_threshold) {
            continue;
        }
        let bbox = BBox::new(v[2], v[3], v[4], v[5]).ok_or_else(|| FcgError::InvalidBox {
            row,
            reason: format!("line {line_no}: width and height must be positive"),
        })?;
        detections.push(Detection::new(frame, bbox, score, table.row(row), row)?);
    }
    Ok(SequenceInput::new("", detections))
}

/// Writes `det.txt` and the sidecar for a sequence, in sequence order, with
/// values printed so they parse back bit-exactly.
pub fn write_detections(seq: &SequenceInput, dim: usize) -> (String, Vec<u8>) {
    let mut text = String::new();
    for d in &seq.detections {
        let b = d.bbox();
        let _ = writeln!(text, "{},-1,{},{},{},{},{},-1,-1,-1", d.frame(), b.x, b.y, b.w, b.h, d.score());
    }
    let rows: Vec<&[f32]> = seq.detections.iter().map(Detection::feature).collect();
    let blob = write_features(dim, &rows);
    (text, blob)
}

/// Result file lines `frame,id,x,y,w,h,score,-1,-1,-1` sorted by frame then id.
pub fn write_tracks(tracks: &TrackSet) -> String {
    let mut rows: Vec<(u32, u32, &TrackPoint)> = tracks.points().map(|(id, p)| (p.frame, id, p)).collect();
    rows.sort_by_key(|&(f, id, _)| (f, id));
    let mut out = String::new();
    for (frame, id, p) in rows {
        let b = p.bbox;
        let _ = writeln!(
            out,
            "{frame},{id},{:.2},{:.2},{:.2},{:.2},{:.4},-1,-1,-1",
            b.x, b.y, b.w, b.h, p.score
        );
    }
    out
}

fn parse_track_lines(text: &str, honor_flag: bool) -> Result<TrackSet> {
    let mut points = Vec::new();
    for (line_no, line) in data_lines(text) {
        let v = fields(line_no, line, 6)?;
        let frame = positive_int(line_no, v[0], "frame")?;
        let id = positive_int(line_no, v[1], "id")?;
        if honor_flag && v.get(6).is_some_and(|&flag| flag == 0.0) {
            continue;
        }
        let bbox = BBox::new(v[2], v[3], v[4], v[5]).ok_or_else(|| FcgError::Parse {
            line: line_no,
            message: "width and height must be positive".into(),
        })?;
        let score = if honor_flag { 1.0 } else { v.get(6).copied().unwrap_or(1.0) };
        points.push((id, TrackPoint { frame, bbox, score }));
    }
    TrackSet::from_points(points)
}

/// Parses `gt.txt` (`frame,id,x,y,w,h,flag,class,visibility`), skipping
/// rows whose flag is 0. IDs are kept as written.
pub fn parse_ground_truth(gt_text: &str) -> Result<TrackSet> {
    parse_track_lines(gt_text, true)
}

/// Parses a tracker result file; the seventh column is read as the score.
pub fn parse_results(text: &str) -> Result<TrackSet> {
    parse_track_lines(text, false)
}

/// Writes ground truth lines `frame,id,x,y,w,h,1,1,1` with exact values.
pub fn write_ground_truth(tracks: &TrackSet) -> String {
    let mut rows: Vec<(u32, u32, BBox)> = tracks.points().map(|(id, p)| (p.frame, id, p.bbox)).collect();
    rows.sort_by(|a, b| (a.0, a.1).cmp(&(b.0, b.1)));
    let mut out = String::new();
    for (frame, id, b) in rows {
        let _ = writeln!(out, "{frame},{id},{},{},{},{},1,1,1", b.x, b.y, b.w, b.h);
    }
    out
}

fn keep_frame(frame: u32, ratio: u32) -> Option<u32> {
    ((frame - 1) % ratio == 0).then(|| (frame - 1) / ratio + 1)
}

/// Keeps frames `f` with `(f - 1) % ratio == 0` and renumbers them
/// `(f - 1) / ratio + 1`, so kept frames become 1, 2, 3, ...
pub fn subsample(seq: &SequenceInput, ratio: u32) -> SequenceInput {
    assert!(ratio >= 1, "subsampling ratio must be positive");
    let detections = seq
        .detections
        .iter()
        .filter_map(|d| keep_frame(d.frame(), ratio).map(|f| d.with_frame(f)))
        .collect();
    SequenceInput {
        name: seq.name.clone(),
        detections,
        fps_ratio_applied: seq.fps_ratio_applied * ratio,
    }
}

/// Same frame rule as [`subsample`], applied to a track set (e.g. ground truth).
pub fn subsample_tracks(tracks: &TrackSet, ratio: u32) -> TrackSet {
    assert!(ratio >= 1, "subsampling ratio must be positive");
    let points = tracks.points().filter_map(|(id, p)| {
        keep_frame(p.frame, ratio).map(|frame| (id, TrackPoint { frame, ..*p }))
    });
    TrackSet::from_points(points).expect("subsampling keeps frames unique per id")
}

/// Renumbers source rows to the positions in the sequence, as they would be
/// after writing and re-reading the sequence.
pub fn reindex_rows(seq: &SequenceInput) -> SequenceInput {
    SequenceInput {
        name: seq.name.clone(),
        detections: seq.detections.iter().enumerate().map(|(i, d)| d.with_source_row(i)).collect(),
        fps_ratio_applied: seq.fps_ratio_applied,
    }
}
