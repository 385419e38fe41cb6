//! Two-stage greedy tracker with a stranded area.
//!
//! Per frame: detections below the confidence threshold are dropped and the
//! rest sorted by confidence. The first match pairs them with live tracks on
//! backward-predicted centers. In bidirectional mode, leftovers get a second
//! match against the stranded area; the stranded area then ages by one frame,
//! newly unmatched tracks join it at full life, and every stranded center
//! moves one step along its frozen forward vector. Whatever is still
//! unmatched becomes a new identity.

use crate::assignment::greedy_assign;
use crate::distance::{distance_matrix, Anchor};
use crate::error::{Error, Result};
use crate::types::{
    Detection, EntryStatus, FrameInput, FrameOutput, MatchMode, OutputEntry, StrandedEntry,
    Track, TrackId, TrackerConfig,
};

/// Outcome of one greedy matching stage. Detection indices refer to the
/// slice passed in; anchor indices refer to the tracks or stranded entries.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct StageMatch {
    /// `(detection, anchor)` pairs in detection order.
    pub matches: Vec<(usize, usize)>,
    pub unmatched_anchors: Vec<usize>,
    pub unmatched_detections: Vec<usize>,
}

fn greedy_stage<A: Anchor>(anchors: &[A], detections: &[&Detection]) -> StageMatch {
    let costs = distance_matrix(anchors, detections);
    let order: Vec<usize> = (0..detections.len()).collect();
    let assignment = greedy_assign(&costs, &order);

    let mut det_used = vec![false; detections.len()];
    let mut anchor_used = vec![false; anchors.len()];
    for &(d, a) in &assignment.pairs {
        det_used[d] = true;
        anchor_used[a] = true;
    }
    StageMatch {
        matches: assignment.pairs,
        unmatched_anchors: (0..anchors.len()).filter(|&a| !anchor_used[a]).collect(),
        unmatched_detections: (0..detections.len()).filter(|&d| !det_used[d]).collect(),
    }
}

/// First stage: confidence-sorted detections against live tracks. Each
/// detection, in order, takes the nearest free track inside the gate.
pub fn first_match(tracks: &[Track], sorted_detections: &[&Detection]) -> StageMatch {
    greedy_stage(tracks, sorted_detections)
}

/// Second stage: first-stage leftovers against the stranded area, same rule.
/// `unmatched_anchors` lists the stranded entries that stay behind.
pub fn second_match(detections: &[&Detection], stranded: &[StrandedEntry]) -> StageMatch {
    if stranded.is_empty() {
        return StageMatch {
            unmatched_detections: (0..detections.len()).collect(),
            ..Default::default()
        };
    }
    greedy_stage(stranded, detections)
}

/// State of one tracker instance, one per video sequence.
#[derive(Debug, Clone)]
pub struct Tracker {
    config: TrackerConfig,
    live: Vec<Track>,
    stranded: Vec<StrandedEntry>,
    next_id: u64,
    current_frame: u64,
}

impl Tracker {
    pub fn new(config: TrackerConfig) -> Result<Self> {
        config.validate()?;
        Ok(Self {
            config,
            live: Vec::new(),
            stranded: Vec::new(),
            next_id: 1,
            current_frame: 0,
        })
    }

    pub fn config(&self) -> &TrackerConfig {
        &self.config
    }

    pub fn live_tracks(&self) -> &[Track] {
        &self.live
    }

    pub fn stranded(&self) -> &[StrandedEntry] {
        &self.stranded
    }

    /// The id the next new object will receive.
    pub fn next_id(&self) -> TrackId {
        TrackId(self.next_id)
    }

    /// Last processed frame, 0 before the first step.
    pub fn current_frame(&self) -> u64 {
        self.current_frame
    }

    /// Processes one frame using the configured [`MatchMode`].
    pub fn step(&mut self, input: &FrameInput) -> Result<FrameOutput> {
        match self.config.mode {
            MatchMode::Bidirectional => self.step_bidirectional(input),
            MatchMode::SingleDirection => self.step_single_direction(input),
        }
    }

    pub fn step_bidirectional(&mut self, input: &FrameInput) -> Result<FrameOutput> {
        self.advance(input, true)
    }

    /// Baseline without a stranded area: unmatched tracks are dropped and
    /// every unmatched detection starts a new identity.
    pub fn step_single_direction(&mut self, input: &FrameInput) -> Result<FrameOutput> {
        self.advance(input, false)
    }

    fn advance(&mut self, input: &FrameInput, use_stranded: bool) -> Result<FrameOutput> {
        let expected = self.current_frame + 1;
        if input.frame != expected {
            return Err(Error::FrameOutOfOrder {
                expected,
                got: input.frame,
            });
        }
        let frame = input.frame;
        let fallback = self.config.forward_fallback;

        let mut dets: Vec<&Detection> = input
            .detections
            .iter()
            .filter(|d| d.confidence >= self.config.conf_threshold)
            .collect();
        // Stable: equal confidences keep input order.
        dets.sort_by(|a, b| b.confidence.total_cmp(&a.confidence));

        let continued = |id: TrackId, det: &Detection| Track {
            id,
            bbox: det.bbox,
            last_matched_frame: frame,
            confidence: det.confidence,
            forward_motion: det.resolved_forward(fallback),
        };

        let mut next_live = Vec::with_capacity(dets.len());
        let mut entries = Vec::with_capacity(dets.len());

        let first = first_match(&self.live, &dets);
        for &(d, t) in &first.matches {
            next_live.push(continued(self.live[t].id, dets[d]));
            entries.push((self.live[t].id, dets[d], EntryStatus::Active));
        }
        let mut leftover = first.unmatched_detections;

        if use_stranded {
            if !leftover.is_empty() && !self.stranded.is_empty() {
                let pending: Vec<&Detection> = leftover.iter().map(|&i| dets[i]).collect();
                let second = second_match(&pending, &self.stranded);
                for &(d, s) in &second.matches {
                    let id = self.stranded[s].id;
                    next_live.push(continued(id, pending[d]));
                    entries.push((id, pending[d], EntryStatus::Reactivated));
                }
                let mut keep = vec![false; self.stranded.len()];
                for &s in &second.unmatched_anchors {
                    keep[s] = true;
                }
                let mut k = keep.into_iter();
                self.stranded.retain(|_| k.next().unwrap_or(false));
                leftover = second
                    .unmatched_detections
                    .iter()
                    .map(|&d| leftover[d])
                    .collect();
            }

            for entry in &mut self.stranded {
                entry.life -= 1;
            }
            self.stranded.retain(|e| e.life > 0);

            let life = self.config.life_max;
            self.stranded
                .extend(first.unmatched_anchors.iter().map(|&t| {
                    let track = &self.live[t];
                    StrandedEntry {
                        id: track.id,
                        center: track.bbox.center(),
                        size: (track.bbox.w, track.bbox.h),
                        forward_motion: track.forward_motion,
                        life,
                    }
                }));

            for entry in &mut self.stranded {
                entry.center += entry.forward_motion;
            }
        }

        for &d in &leftover {
            let id = TrackId(self.next_id);
            self.next_id += 1;
            next_live.push(continued(id, dets[d]));
            entries.push((id, dets[d], EntryStatus::New));
        }

        self.live = next_live;
        self.current_frame = frame;

        let mut entries: Vec<OutputEntry> = entries
            .into_iter()
            .map(|(id, det, status)| OutputEntry {
                id,
                bbox: det.bbox,
                confidence: det.confidence,
                status,
            })
            .collect();
        entries.sort_by_key(|e| e.id);
        Ok(FrameOutput { frame, entries })
    }
}

/// Runs a whole sequence through a fresh tracker.
pub fn track_sequence(config: &TrackerConfig, frames: &[FrameInput]) -> Result<Vec<FrameOutput>> {
    let mut tracker = Tracker::new(config.clone())?;
    frames.iter().map(|f| tracker.step(f)).collect()
}
