//! CLEAR-MOT counting, MOTA, identity F1 and mostly-tracked/lost ratios.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::assignment::{hungarian, CostMatrix};
use crate::error::{Error, Result};
use crate::types::{BoundingBox, FrameOutput};

/// Default IoU needed for a ground-truth box and a hypothesis to correspond.
pub const DEFAULT_IOU_THRESHOLD: f64 = 0.5;

/// Per-identity time series of boxes, either ground truth or tracker output.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Trajectory {
    pub id: u64,
    pub boxes: BTreeMap<u64, BoundingBox>,
}

impl Trajectory {
    pub fn new(id: u64) -> Self {
        Self {
            id,
            boxes: BTreeMap::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.boxes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.boxes.is_empty()
    }
}

/// Groups tracker output into one trajectory per id, sorted by id.
pub fn trajectories_from_outputs(outputs: &[FrameOutput]) -> Vec<Trajectory> {
    let mut by_id: BTreeMap<u64, Trajectory> = BTreeMap::new();
    for out in outputs {
        for e in &out.entries {
            by_id
                .entry(e.id.0)
                .or_insert_with(|| Trajectory::new(e.id.0))
                .boxes
                .insert(out.frame, e.bbox);
        }
    }
    by_id.into_values().collect()
}

pub fn iou(a: &BoundingBox, b: &BoundingBox) -> f64 {
    let iw = (a.right().min(b.right()) - a.left().max(b.left())).max(0.0);
    let ih = (a.bottom().min(b.bottom()) - a.top().max(b.top())).max(0.0);
    let inter = iw * ih;
    if inter <= 0.0 {
        return 0.0;
    }
    let union = a.area() + b.area() - inter;
    (inter / union).clamp(0.0, 1.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct FrameCounts {
    pub frame: u64,
    pub gt: usize,
    pub fp: usize,
    #[serde(rename = "fn")]
    pub fn_: usize,
    pub ids: usize,
}

/// CLEAR-MOT event counts for one sequence.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ClearCounts {
    pub frames: Vec<FrameCounts>,
    /// Number of matched → unmatched → matched transitions over all GT objects.
    pub fragmentations: usize,
    /// Matched frames per ground-truth id.
    pub matched_frames: BTreeMap<u64, usize>,
}

impl ClearCounts {
    pub fn total_gt(&self) -> usize {
        self.frames.iter().map(|f| f.gt).sum()
    }

    pub fn total_fp(&self) -> usize {
        self.frames.iter().map(|f| f.fp).sum()
    }

    pub fn total_fn(&self) -> usize {
        self.frames.iter().map(|f| f.fn_).sum()
    }

    pub fn total_ids(&self) -> usize {
        self.frames.iter().map(|f| f.ids).sum()
    }
}

type FrameIndex<'a> = BTreeMap<u64, Vec<(u64, &'a BoundingBox)>>;

fn index_by_frame(trajs: &[Trajectory]) -> FrameIndex<'_> {
    let mut out: FrameIndex<'_> = BTreeMap::new();
    for t in trajs {
        for (&f, b) in &t.boxes {
            out.entry(f).or_default().push((t.id, b));
        }
    }
    out
}

/// Per-frame CLEAR-MOT correspondence.
///
/// Each frame first keeps last frame's pairs whose IoU still passes the
/// threshold, then matches the rest by minimum total `1 - IoU`. A GT object
/// whose hypothesis differs from its most recent one is an identity switch;
/// regaining a match after a miss is a fragmentation.
pub fn clear_match(gt: &[Trajectory], pred: &[Trajectory], iou_threshold: f64) -> ClearCounts {
    let gt_frames = index_by_frame(gt);
    let pred_frames = index_by_frame(pred);
    let all_frames: BTreeSet<u64> = gt_frames.keys().chain(pred_frames.keys()).copied().collect();

    let mut counts = ClearCounts {
        matched_frames: gt.iter().map(|t| (t.id, 0)).collect(),
        ..Default::default()
    };
    let mut prev_frame_pairs: BTreeMap<u64, u64> = BTreeMap::new();
    let mut last_hyp: BTreeMap<u64, u64> = BTreeMap::new();
    // GT ids that have been matched before and missed since.
    let mut in_gap: BTreeSet<u64> = BTreeSet::new();

    let empty = Vec::new();
    for f in all_frames {
        let gts = gt_frames.get(&f).unwrap_or(&empty);
        let hyps = pred_frames.get(&f).unwrap_or(&empty);

        let mut pairs: Vec<(usize, usize)> = Vec::new();
        let mut gt_taken = vec![false; gts.len()];
        let mut hyp_taken = vec![false; hyps.len()];

        for (gi, &(gid, gb)) in gts.iter().enumerate() {
            let Some(&hid) = prev_frame_pairs.get(&gid) else {
                continue;
            };
            if let Some(hi) = hyps.iter().position(|&(id, _)| id == hid) {
                if !hyp_taken[hi] && iou(gb, hyps[hi].1) >= iou_threshold {
                    gt_taken[gi] = true;
                    hyp_taken[hi] = true;
                    pairs.push((gi, hi));
                }
            }
        }

        let free_g: Vec<usize> = (0..gts.len()).filter(|&i| !gt_taken[i]).collect();
        let free_h: Vec<usize> = (0..hyps.len()).filter(|&i| !hyp_taken[i]).collect();
        if !free_g.is_empty() && !free_h.is_empty() {
            let costs = CostMatrix::from_fn(free_g.len(), free_h.len(), |r, c| {
                let v = iou(gts[free_g[r]].1, hyps[free_h[c]].1);
                (v >= iou_threshold).then_some(1.0 - v)
            });
            for (r, c) in hungarian(&costs).pairs {
                pairs.push((free_g[r], free_h[c]));
            }
        }

        let mut fc = FrameCounts {
            frame: f,
            gt: gts.len(),
            fp: hyps.len() - pairs.len(),
            fn_: gts.len() - pairs.len(),
            ids: 0,
        };
        let mut matched_now = BTreeSet::new();
        prev_frame_pairs.clear();
        for &(gi, hi) in &pairs {
            let gid = gts[gi].0;
            let hid = hyps[hi].0;
            matched_now.insert(gid);
            prev_frame_pairs.insert(gid, hid);
            if let Some(prev) = last_hyp.insert(gid, hid) {
                if prev != hid {
                    fc.ids += 1;
                }
            }
            if in_gap.remove(&gid) {
                counts.fragmentations += 1;
            }
            *counts.matched_frames.entry(gid).or_default() += 1;
        }
        for &(gid, _) in gts {
            if !matched_now.contains(&gid) && last_hyp.contains_key(&gid) {
                in_gap.insert(gid);
            }
        }
        counts.frames.push(fc);
    }
    counts
}

/// `1 - (FN + FP + IDS) / GT`, summed over frames.
pub fn mota(counts: &ClearCounts) -> Result<f64> {
    let gt = counts.total_gt();
    if gt == 0 {
        return Err(Error::EmptyGroundTruth);
    }
    let errors = counts.total_fn() + counts.total_fp() + counts.total_ids();
    Ok(1.0 - errors as f64 / gt as f64)
}

/// Identity-level true/false positive and false negative box counts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct IdCounts {
    pub idtp: usize,
    pub idfp: usize,
    pub idfn: usize,
}

impl IdCounts {
    pub fn f1(&self) -> f64 {
        let denom = 2 * self.idtp + self.idfp + self.idfn;
        if denom == 0 {
            // Nothing to find and nothing reported.
            return 1.0;
        }
        2.0 * self.idtp as f64 / denom as f64
    }
}

/// Frames in which each (GT, hypothesis) trajectory pair overlaps enough.
/// Keys are indices into `gt` and `pred`.
pub fn overlap_counts(
    gt: &[Trajectory],
    pred: &[Trajectory],
    iou_threshold: f64,
) -> BTreeMap<(usize, usize), usize> {
    let mut pred_frames: BTreeMap<u64, Vec<(usize, &BoundingBox)>> = BTreeMap::new();
    for (pi, t) in pred.iter().enumerate() {
        for (&f, b) in &t.boxes {
            pred_frames.entry(f).or_default().push((pi, b));
        }
    }
    let mut out = BTreeMap::new();
    for (gi, t) in gt.iter().enumerate() {
        for (f, gb) in &t.boxes {
            let Some(hyps) = pred_frames.get(f) else {
                continue;
            };
            for &(pi, pb) in hyps {
                if iou(gb, pb) >= iou_threshold {
                    *out.entry((gi, pi)).or_insert(0) += 1;
                }
            }
        }
    }
    out
}

/// Globally optimal one-to-one trajectory pairing maximizing identity true
/// positives.
pub fn id_counts(gt: &[Trajectory], pred: &[Trajectory], iou_threshold: f64) -> IdCounts {
    let gt_boxes: usize = gt.iter().map(Trajectory::len).sum();
    let pred_boxes: usize = pred.iter().map(Trajectory::len).sum();
    let overlaps = overlap_counts(gt, pred, iou_threshold);
    let idtp = if overlaps.is_empty() {
        0
    } else {
        let mut costs = CostMatrix::forbidden(gt.len(), pred.len());
        for (&(g, p), &n) in &overlaps {
            costs.set(g, p, Some(-(n as f64)));
        }
        hungarian(&costs)
            .pairs
            .iter()
            .map(|pair| overlaps[pair])
            .sum()
    };
    IdCounts {
        idtp,
        idfp: pred_boxes - idtp,
        idfn: gt_boxes - idtp,
    }
}

/// Identity F1. Both sides empty counts as perfect; exactly one side empty
/// as zero.
pub fn idf1(gt: &[Trajectory], pred: &[Trajectory], iou_threshold: f64) -> f64 {
    id_counts(gt, pred, iou_threshold).f1()
}

/// Number of GT trajectories tracked for at least 80% of their length, and
/// for less than 20%.
pub fn mostly_tracked_lost_counts(gt: &[Trajectory], counts: &ClearCounts) -> (usize, usize) {
    let mut mt = 0;
    let mut ml = 0;
    for t in gt.iter().filter(|t| !t.is_empty()) {
        let matched = counts.matched_frames.get(&t.id).copied().unwrap_or(0);
        let len = t.len();
        // Integer comparisons keep the 80% / 20% boundaries exact.
        if matched * 5 >= len * 4 {
            mt += 1;
        }
        if matched * 5 < len {
            ml += 1;
        }
    }
    (mt, ml)
}

/// Mostly-tracked and mostly-lost fractions of the GT trajectories.
pub fn mt_ml(gt: &[Trajectory], counts: &ClearCounts) -> (f64, f64) {
    let n = gt.iter().filter(|t| !t.is_empty()).count();
    if n == 0 {
        return (0.0, 0.0);
    }
    let (mt, ml) = mostly_tracked_lost_counts(gt, counts);
    (mt as f64 / n as f64, ml as f64 / n as f64)
}

/// The full metric suite. Ratios are derived from the raw counts, so reports
/// from several sequences can be combined with [`EvalReport::combine`].
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct EvalReport {
    pub mota: f64,
    pub idf1: f64,
    /// Identity switches per GT box.
    pub ids_ratio: f64,
    /// Fragmentations per GT box.
    pub fm_ratio: f64,
    pub mt: f64,
    pub ml: f64,
    pub fp: usize,
    #[serde(rename = "fn")]
    pub fn_: usize,
    pub ids: usize,
    pub fm: usize,
    pub idtp: usize,
    pub idfp: usize,
    pub idfn: usize,
    pub gt_boxes: usize,
    pub pred_boxes: usize,
    pub gt_trajectories: usize,
    pub mostly_tracked: usize,
    pub mostly_lost: usize,
}

impl EvalReport {
    fn with_ratios(mut self) -> Result<Self> {
        if self.gt_boxes == 0 {
            return Err(Error::EmptyGroundTruth);
        }
        let gt = self.gt_boxes as f64;
        self.mota = 1.0 - (self.fn_ + self.fp + self.ids) as f64 / gt;
        self.idf1 = IdCounts {
            idtp: self.idtp,
            idfp: self.idfp,
            idfn: self.idfn,
        }
        .f1();
        self.ids_ratio = self.ids as f64 / gt;
        self.fm_ratio = self.fm as f64 / gt;
        let n = self.gt_trajectories.max(1) as f64;
        self.mt = self.mostly_tracked as f64 / n;
        self.ml = self.mostly_lost as f64 / n;
        Ok(self)
    }

    /// Sums raw counts over sequences and recomputes every ratio.
    pub fn combine(reports: &[EvalReport]) -> Result<Self> {
        let mut acc = EvalReport::default();
        for r in reports {
            acc.fp += r.fp;
            acc.fn_ += r.fn_;
            acc.ids += r.ids;
            acc.fm += r.fm;
            acc.idtp += r.idtp;
            acc.idfp += r.idfp;
            acc.idfn += r.idfn;
            acc.gt_boxes += r.gt_boxes;
            acc.pred_boxes += r.pred_boxes;
            acc.gt_trajectories += r.gt_trajectories;
            acc.mostly_tracked += r.mostly_tracked;
            acc.mostly_lost += r.mostly_lost;
        }
        acc.with_ratios()
    }
}

pub fn evaluate(gt: &[Trajectory], pred: &[Trajectory], iou_threshold: f64) -> Result<EvalReport> {
    let counts = clear_match(gt, pred, iou_threshold);
    let ids = id_counts(gt, pred, iou_threshold);
    let (mostly_tracked, mostly_lost) = mostly_tracked_lost_counts(gt, &counts);
    EvalReport {
        fp: counts.total_fp(),
        fn_: counts.total_fn(),
        ids: counts.total_ids(),
        fm: counts.fragmentations,
        idtp: ids.idtp,
        idfp: ids.idfp,
        idfn: ids.idfn,
        gt_boxes: counts.total_gt(),
        pred_boxes: pred.iter().map(Trajectory::len).sum(),
        gt_trajectories: gt.iter().filter(|t| !t.is_empty()).count(),
        mostly_tracked,
        mostly_lost,
        ..Default::default()
    }
    .with_ratios()
}
