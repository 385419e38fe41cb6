//! Domain values shared by the tracker, the metrics and the simulator.

use std::fmt;
use std::ops::{Add, AddAssign, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A 2-D vector in pixels (positions) or pixels per frame (motion).
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Vec2 {
    pub x: f64,
    pub y: f64,
}

impl Vec2 {
    pub const ZERO: Vec2 = Vec2 { x: 0.0, y: 0.0 };

    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn norm_sq(self) -> f64 {
        self.x * self.x + self.y * self.y
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }
}

impl Add for Vec2 {
    type Output = Vec2;
    fn add(self, rhs: Vec2) -> Vec2 {
        Vec2::new(self.x + rhs.x, self.y + rhs.y)
    }
}

impl AddAssign for Vec2 {
    fn add_assign(&mut self, rhs: Vec2) {
        self.x += rhs.x;
        self.y += rhs.y;
    }
}

impl Sub for Vec2 {
    type Output = Vec2;
    fn sub(self, rhs: Vec2) -> Vec2 {
        Vec2::new(self.x - rhs.x, self.y - rhs.y)
    }
}

impl Neg for Vec2 {
    type Output = Vec2;
    fn neg(self) -> Vec2 {
        Vec2::new(-self.x, -self.y)
    }
}

/// Axis-aligned box stored as center and size. Corner form only appears at
/// the file boundary.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundingBox {
    pub cx: f64,
    pub cy: f64,
    pub w: f64,
    pub h: f64,
}

impl BoundingBox {
    pub fn new(cx: f64, cy: f64, w: f64, h: f64) -> Result<Self> {
        if !(w > 0.0 && h > 0.0 && w.is_finite() && h.is_finite()) {
            return Err(Error::InvalidBox { w, h });
        }
        if !(cx.is_finite() && cy.is_finite()) {
            return Err(Error::InvalidConfig(format!(
                "box center ({cx}, {cy}) is not finite"
            )));
        }
        Ok(Self { cx, cy, w, h })
    }

    /// Builds a box from MOTChallenge corner form (`bb_left`, `bb_top`, width, height).
    pub fn from_corner(left: f64, top: f64, w: f64, h: f64) -> Result<Self> {
        Self::new(left + w / 2.0, top + h / 2.0, w, h)
    }

    pub fn center(&self) -> Vec2 {
        Vec2::new(self.cx, self.cy)
    }

    pub fn area(&self) -> f64 {
        self.w * self.h
    }

    pub fn left(&self) -> f64 {
        self.cx - self.w / 2.0
    }

    pub fn top(&self) -> f64 {
        self.cy - self.h / 2.0
    }

    pub fn right(&self) -> f64 {
        self.cx + self.w / 2.0
    }

    pub fn bottom(&self) -> f64 {
        self.cy + self.h / 2.0
    }

    pub fn translated(&self, by: Vec2) -> Self {
        Self {
            cx: self.cx + by.x,
            cy: self.cy + by.y,
            ..*self
        }
    }
}

/// One observed object in one frame.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Detection {
    pub bbox: BoundingBox,
    pub confidence: f64,
    /// Displacement from the current center to the object's center in the previous frame.
    pub backward_motion: Vec2,
    /// Displacement to the object's center in the next frame. `None` when the
    /// source has no forward estimate; the tracker then applies
    /// [`ForwardFallback`].
    pub forward_motion: Option<Vec2>,
}

impl Detection {
    pub fn new(
        bbox: BoundingBox,
        confidence: f64,
        backward_motion: Vec2,
        forward_motion: Option<Vec2>,
    ) -> Result<Self> {
        if !(0.0..=1.0).contains(&confidence) {
            return Err(Error::InvalidConfig(format!(
                "detection confidence {confidence} outside [0, 1]"
            )));
        }
        if !backward_motion.is_finite() || !forward_motion.is_none_or(Vec2::is_finite) {
            return Err(Error::InvalidConfig(
                "detection motion vectors must be finite".into(),
            ));
        }
        Ok(Self {
            bbox,
            confidence,
            backward_motion,
            forward_motion,
        })
    }

    /// Detection with no motion information at all.
    pub fn still(bbox: BoundingBox, confidence: f64) -> Self {
        Self {
            bbox,
            confidence,
            backward_motion: Vec2::ZERO,
            forward_motion: None,
        }
    }

    /// Forward vector, falling back to the configured policy when absent.
    pub fn resolved_forward(&self, fallback: ForwardFallback) -> Vec2 {
        self.forward_motion.unwrap_or(match fallback {
            ForwardFallback::NegatedBackward => -self.backward_motion,
            ForwardFallback::Zero => Vec2::ZERO,
        })
    }
}

/// Positive, tracker-issued identity.
#[derive(
    Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize,
)]
pub struct TrackId(pub u64);

impl fmt::Display for TrackId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// A live identity and where it was at its last matched frame.
#[derive(Debug, Clone, PartialEq)]
pub struct Track {
    pub id: TrackId,
    pub bbox: BoundingBox,
    pub last_matched_frame: u64,
    pub confidence: f64,
    /// Forward vector of the last matched detection; frozen into the
    /// stranded entry if this track goes unmatched.
    pub forward_motion: Vec2,
}

/// An occluded identity waiting for a second match.
#[derive(Debug, Clone, PartialEq)]
pub struct StrandedEntry {
    pub id: TrackId,
    /// Position estimate for the most recently processed frame.
    pub center: Vec2,
    /// Width and height frozen at strand time.
    pub size: (f64, f64),
    pub forward_motion: Vec2,
    /// Frames remaining before the entry is discarded.
    pub life: u32,
}

impl StrandedEntry {
    pub fn area(&self) -> f64 {
        self.size.0 * self.size.1
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct FrameInput {
    pub frame: u64,
    pub detections: Vec<Detection>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EntryStatus {
    /// Continued from the previous frame's live tracks.
    Active,
    /// Recovered from the stranded area.
    Reactivated,
    /// Fresh identity.
    New,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OutputEntry {
    pub id: TrackId,
    pub bbox: BoundingBox,
    pub confidence: f64,
    pub status: EntryStatus,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct FrameOutput {
    pub frame: u64,
    /// Sorted by id.
    pub entries: Vec<OutputEntry>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MatchMode {
    /// First match on live tracks, second match on the stranded area.
    #[default]
    Bidirectional,
    /// Baseline: unmatched tracks are dropped, no second match.
    SingleDirection,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ForwardFallback {
    /// Use the negated backward vector (constant-velocity symmetry).
    #[default]
    NegatedBackward,
    /// Freeze the position.
    Zero,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrackerConfig {
    /// Detections strictly below this confidence are discarded before matching.
    pub conf_threshold: f64,
    /// Initial life value of a stranded entry.
    pub life_max: u32,
    pub mode: MatchMode,
    pub forward_fallback: ForwardFallback,
}

impl Default for TrackerConfig {
    fn default() -> Self {
        Self {
            conf_threshold: 0.4,
            life_max: 20,
            mode: MatchMode::Bidirectional,
            forward_fallback: ForwardFallback::NegatedBackward,
        }
    }
}

impl TrackerConfig {
    pub fn validate(&self) -> Result<()> {
        if self.life_max == 0 {
            return Err(Error::InvalidConfig("life_max must be at least 1".into()));
        }
        if !(0.0..=1.0).contains(&self.conf_threshold) {
            return Err(Error::InvalidConfig(format!(
                "conf_threshold {} outside [0, 1]",
                self.conf_threshold
            )));
        }
        Ok(())
    }
}
