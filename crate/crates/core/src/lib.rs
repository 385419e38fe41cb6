//! Detection-driven multi-object tracking with bi-directional motion vectors.
//!
//! Detections carry a backward motion vector (where the object was one frame
//! ago) and a forward motion vector (where it will be one frame from now).
//! The tracker matches detections to live tracks greedily on the backward
//! prediction, parks unmatched tracks in a stranded area where they keep
//! moving along their frozen forward vector, and gives unmatched detections a
//! second chance against that area before issuing fresh identities.
//!
//! Around the tracker sit the pieces needed to exercise it end to end:
//! CLEAR-MOT / identity metrics, a seeded scenario and occlusion simulator,
//! Gaussian heatmap label utilities, and MOTChallenge file I/O.

pub mod assignment;
pub mod distance;
pub mod error;
pub mod experiment;
pub mod heatmap;
pub mod io;
pub mod metrics;
pub mod simulator;
pub mod tracker;
pub mod types;

pub use error::{Error, Result};
pub use types::{
    BoundingBox, Detection, EntryStatus, ForwardFallback, FrameInput, FrameOutput, MatchMode,
    OutputEntry, StrandedEntry, Track, TrackId, TrackerConfig, Vec2,
};
