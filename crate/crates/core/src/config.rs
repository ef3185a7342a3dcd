use crate::error::{FcgError, Result};

/// Every tunable of the tracker. Defaults reproduce the pedestrian setup:
/// window of 6 frames, fusion threshold 0.055, temporal, spatial and motion
/// priors on, consecutive fusion.
#[derive(Debug, Clone, PartialEq)]
pub struct FcgConfig {
    /// Temporal window size in frames for tracklet generation.
    pub window: usize,
    /// Cut height for clustering detections into tracklets.
    pub tracklet_threshold: f64,
    /// Cut height for fusing tracklets across lifted frames.
    pub track_threshold: f64,
    /// Frame gap above which the temporal penalty applies.
    pub k_t: u32,
    /// Temporal penalty factor.
    pub c_t: f64,
    /// Offset added to the IoU distance for the closeness factor.
    pub off: f64,
    /// Normalized box displacement above which the far penalty applies.
    pub k_f: f64,
    /// Far penalty factor.
    pub c_f: f64,
    /// Detections below this confidence are dropped on ingestion.
    pub score_threshold: f64,
    pub use_temporal: bool,
    pub use_spatial: bool,
    pub use_motion: bool,
    /// Fuse only adjacent lifted frames (otherwise one global clustering).
    pub consecutive: bool,
    pub feature_dim: usize,
    /// Cap on constant-velocity extrapolation steps; `None` uses `window`.
    pub motion_horizon: Option<u32>,
}

impl Default for FcgConfig {
    fn default() -> Self {
        FcgConfig {
            window: 6,
            tracklet_threshold: 0.055,
            track_threshold: 0.055,
            k_t: 40,
            c_t: 4.0,
            off: 0.15,
            k_f: 2.0,
            c_f: 2.0,
            score_threshold: 0.7,
            use_temporal: true,
            use_spatial: true,
            use_motion: true,
            consecutive: true,
            feature_dim: 2048,
            motion_horizon: None,
        }
    }
}

impl FcgConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: &str| Err(FcgError::InvalidConfig(msg.to_string()));
        if self.window < 1 {
            return bad("window must be >= 1");
        }
        if !(self.tracklet_threshold > 0.0 && self.track_threshold > 0.0) {
            return bad("thresholds must be > 0");
        }
        if !(self.c_t >= 1.0) {
            return bad("c_t must be >= 1");
        }
        if !(self.c_f >= 1.0) {
            return bad("c_f must be >= 1");
        }
        if !(self.off > 0.0 && self.off <= 1.0) {
            return bad("off must lie in (0, 1]");
        }
        if !(self.k_f >= 0.0) {
            return bad("k_f must be >= 0");
        }
        if !(0.0..=1.0).contains(&self.score_threshold) {
            return bad("score threshold must lie in [0, 1]");
        }
        if self.feature_dim == 0 {
            return bad("feature dimension must be positive");
        }
        if self.motion_horizon == Some(0) {
            return bad("motion horizon must be >= 1");
        }
        Ok(())
    }

    /// Maximum number of frames a box is extrapolated across a gap.
    pub fn motion_steps_cap(&self) -> u32 {
        self.motion_horizon
            .unwrap_or_else(|| u32::try_from(self.window).unwrap_or(u32::MAX))
    }

    /// Copy with all spatio-temporal priors disabled.
    pub fn without_priors(&self) -> Self {
        FcgConfig {
            use_temporal: false,
            use_spatial: false,
            use_motion: false,
            ..self.clone()
        }
    }
}
