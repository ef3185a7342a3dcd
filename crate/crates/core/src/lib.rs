//! Multi-object tracking by clustering appearance features.
//!
//! Detections are first grouped into short tracklets inside fixed temporal
//! windows, then tracklets are fused hierarchically across windows using
//! average-linkage clustering on median appearance features, scaled by
//! temporal and spatial priors.
//!
//! ```
//! use fcg::{pipeline, synth, FcgConfig};
//!
//! let scene = synth::SynthConfig { num_identities: 3, num_frames: 60, feature_noise_sigma: 0.02, seed: 1, ..Default::default() };
//! let (seq, truth) = synth::generate(&scene).unwrap();
//! let cfg = FcgConfig { feature_dim: scene.feature_dim, ..FcgConfig::default() };
//! let tracks = pipeline::run(&seq.detections, &cfg).unwrap();
//! assert_eq!(tracks.len(), truth.len());
//! ```

pub mod appearance;
pub mod clustering;
pub mod config;
pub mod error;
pub mod geometry;
pub mod metrics;
pub mod mot;
pub mod pipeline;
pub mod synth;
pub mod types;
pub mod weighting;

pub use config::FcgConfig;
pub use error::{FcgError, Result};
pub use types::{BBox, Detection, LiftedFrame, TrackPoint, TrackSet, Tracklet};
