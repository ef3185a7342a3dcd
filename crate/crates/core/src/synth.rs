//! Deterministic synthetic sequences with ground truth.
//!
//! Identity `k` (0-based) has the prototype feature `e_k`. Every emitted
//! detection perturbs it with Gaussian noise and renormalizes. Random values
//! come from a generator keyed by `(seed, identity, frame)`, so output does
//! not depend on generation order.

use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::error::{FcgError, Result};
use crate::mot::SequenceInput;
use crate::types::{BBox, Detection, TrackPoint, TrackSet};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MotionModel {
    Linear,
    Sinusoidal,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SynthConfig {
    pub num_identities: usize,
    pub num_frames: u32,
    pub feature_dim: usize,
    pub feature_noise_sigma: f64,
    pub motion_model: MotionModel,
    /// `(identity, start_frame, end_frame)`, inclusive, identity 0-based.
    pub occlusions: Vec<(usize, u32, u32)>,
    /// `(identity, exit_frame)`: nothing is emitted after `exit_frame`.
    pub exits: Vec<(usize, u32)>,
    pub arena: (f64, f64),
    pub box_size: (f64, f64),
    /// Per-frame speed range for linear motion, in pixels.
    pub max_speed: f64,
    pub seed: u64,
}

impl Default for SynthConfig {
    fn default() -> Self {
        SynthConfig {
            num_identities: 5,
            num_frames: 120,
            feature_dim: 16,
            feature_noise_sigma: 0.05,
            motion_model: MotionModel::Linear,
            occlusions: Vec::new(),
            exits: Vec::new(),
            arena: (1920.0, 1080.0),
            box_size: (50.0, 100.0),
            max_speed: 3.0,
            seed: 0,
        }
    }
}

impl SynthConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(FcgError::InvalidConfig(m));
        if self.num_identities == 0 || self.num_frames == 0 {
            return bad("need at least one identity and one frame".into());
        }
        if self.num_identities > self.feature_dim {
            return bad(format!(
                "{} identities need feature dimension >= {}",
                self.num_identities, self.num_identities
            ));
        }
        if !(self.feature_noise_sigma >= 0.0 && self.feature_noise_sigma.is_finite()) {
            return bad("noise sigma must be finite and >= 0".into());
        }
        let (bw, bh) = self.box_size;
        if !(bw > 0.0 && bh > 0.0 && self.arena.0 > bw && self.arena.1 > bh) {
            return bad("arena must be larger than the box".into());
        }
        if !(self.max_speed >= 0.0 && self.max_speed.is_finite()) {
            return bad("max speed must be finite and >= 0".into());
        }
        let frame_ok = |f: u32| (1..=self.num_frames).contains(&f);
        for &(id, s, e) in &self.occlusions {
            if id >= self.num_identities || !frame_ok(s) || !frame_ok(e) || s > e {
                return bad(format!("invalid occlusion ({id}, {s}, {e})"));
            }
        }
        for &(id, f) in &self.exits {
            if id >= self.num_identities || !frame_ok(f) {
                return bad(format!("invalid exit ({id}, {f})"));
            }
        }
        Ok(())
    }

    fn visible(&self, identity: usize, frame: u32) -> bool {
        let occluded = self
            .occlusions
            .iter()
            .any(|&(id, s, e)| id == identity && (s..=e).contains(&frame));
        let exited = self.exits.iter().any(|&(id, f)| id == identity && frame > f);
        !occluded && !exited
    }
}

fn splitmix(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    x = (x ^ (x >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    x ^ (x >> 31)
}

/// Generator for one `(seed, identity, frame)` cell. Frame 0 holds the
/// identity's motion parameters.
fn cell_rng(seed: u64, identity: usize, frame: u32) -> ChaCha8Rng {
    let key = splitmix(splitmix(splitmix(seed) ^ identity as u64) ^ u64::from(frame));
    ChaCha8Rng::seed_from_u64(key)
}

/// Folds `v` into `[0, hi]` by reflecting at both walls.
fn reflect(v: f64, hi: f64) -> f64 {
    if hi <= 0.0 {
        return 0.0;
    }
    let period = 2.0 * hi;
    let m = v.rem_euclid(period);
    if m <= hi {
        m
    } else {
        period - m
    }
}

fn round2(v: f64) -> f64 {
    (v * 100.0).round() / 100.0
}

struct Trajectory {
    start: (f64, f64),
    velocity: (f64, f64),
    amplitude: (f64, f64),
    period: (f64, f64),
    phase: (f64, f64),
}

impl Trajectory {
    fn sample(cfg: &SynthConfig, identity: usize) -> Self {
        let mut rng = cell_rng(cfg.seed, identity, 0);
        let xmax = cfg.arena.0 - cfg.box_size.0;
        let ymax = cfg.arena.1 - cfg.box_size.1;
        let mut speed = || {
            if cfg.max_speed > 0.0 {
                rng.random_range(-cfg.max_speed..=cfg.max_speed)
            } else {
                0.0
            }
        };
        let velocity = (speed(), speed());
        Trajectory {
            start: (rng.random_range(0.0..=xmax), rng.random_range(0.0..=ymax)),
            velocity,
            amplitude: (rng.random_range(20.0..=120.0), rng.random_range(10.0..=60.0)),
            period: (rng.random_range(60.0..=240.0), rng.random_range(60.0..=240.0)),
            phase: (
                rng.random_range(0.0..std::f64::consts::TAU),
                rng.random_range(0.0..std::f64::consts::TAU),
            ),
        }
    }

    fn position(&self, cfg: &SynthConfig, frame: u32) -> (f64, f64) {
        let t = f64::from(frame - 1);
        let (x, y) = match cfg.motion_model {
            MotionModel::Linear => (self.start.0 + self.velocity.0 * t, self.start.1 + self.velocity.1 * t),
            MotionModel::Sinusoidal => {
                let tau = std::f64::consts::TAU;
                (
                    self.start.0 + self.amplitude.0 * (tau * t / self.period.0 + self.phase.0).sin(),
                    self.start.1 + self.amplitude.1 * (tau * t / self.period.1 + self.phase.1).sin(),
                )
            }
        };
        (
            reflect(x, cfg.arena.0 - cfg.box_size.0),
            reflect(y, cfg.arena.1 - cfg.box_size.1),
        )
    }
}

fn feature(cfg: &SynthConfig, identity: usize, frame: u32) -> Vec<f32> {
    let mut v = vec![0.0f64; cfg.feature_dim];
    v[identity] = 1.0;
    if cfg.feature_noise_sigma > 0.0 {
        let normal = Normal::new(0.0, cfg.feature_noise_sigma).expect("valid sigma");
        let mut rng = cell_rng(cfg.seed, identity, frame);
        for x in v.iter_mut() {
            *x += normal.sample(&mut rng);
        }
    }
    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    v.iter().map(|x| (x / norm) as f32).collect()
}

/// Produces the detections (scores 1.0, ordered by frame then identity) and
/// the matching ground truth with IDs `identity + 1`.
pub fn generate(cfg: &SynthConfig) -> Result<(SequenceInput, TrackSet)> {
    cfg.validate()?;
    let trajectories: Vec<Trajectory> = (0..cfg.num_identities)
        .map(|k| Trajectory::sample(cfg, k))
        .collect();
    let (bw, bh) = cfg.box_size;
    let mut detections = Vec::new();
    let mut truth = Vec::new();
    for frame in 1..=cfg.num_frames {
        for (k, traj) in trajectories.iter().enumerate() {
            if !cfg.visible(k, frame) {
                continue;
            }
            let (x, y) = traj.position(cfg, frame);
            let bbox = BBox::new(round2(x), round2(y), bw, bh).expect("positive box size");
            let row = detections.len();
            detections.push(Detection::new(frame, bbox, 1.0, feature(cfg, k, frame), row)?);
            truth.push((k as u32 + 1, TrackPoint { frame, bbox, score: 1.0 }));
        }
    }
    let mut seq = SequenceInput::new("synth", detections);
    seq.name = format!("synth-{}", cfg.seed);
    Ok((seq, TrackSet::from_points(truth)?))
}
