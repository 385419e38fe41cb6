//! Backward-motion prediction and the gated squared-distance matrix.

use crate::assignment::CostMatrix;
use crate::types::{Detection, StrandedEntry, Track, Vec2};

/// Rows are detections, columns are tracks (or stranded entries). Forbidden
/// cells hold no value.
pub type DistanceMatrix = CostMatrix;

/// Anything that can play the track role in a distance computation: it has a
/// center for the reference frame and an area for gating.
pub trait Anchor {
    fn anchor_center(&self) -> Vec2;
    fn anchor_area(&self) -> f64;
}

impl Anchor for Track {
    fn anchor_center(&self) -> Vec2 {
        self.bbox.center()
    }

    fn anchor_area(&self) -> f64 {
        self.bbox.area()
    }
}

impl Anchor for StrandedEntry {
    fn anchor_center(&self) -> Vec2 {
        self.center
    }

    fn anchor_area(&self) -> f64 {
        self.area()
    }
}

impl<T: Anchor + ?Sized> Anchor for &T {
    fn anchor_center(&self) -> Vec2 {
        (**self).anchor_center()
    }

    fn anchor_area(&self) -> f64 {
        (**self).anchor_area()
    }
}

/// Where the detected object was one frame ago.
pub fn predict_previous_center(det: &Detection) -> Vec2 {
    det.bbox.center() + det.backward_motion
}

/// Squared distance between each detection's predicted previous center and
/// each anchor center. A cell is forbidden when the distance is strictly
/// greater than the smaller of the two box areas.
pub fn distance_matrix<A: Anchor, D: std::borrow::Borrow<Detection>>(
    anchors: &[A],
    detections: &[D],
) -> DistanceMatrix {
    let anchors: Vec<(Vec2, f64)> = anchors
        .iter()
        .map(|a| (a.anchor_center(), a.anchor_area()))
        .collect();
    let mut out = DistanceMatrix::forbidden(detections.len(), anchors.len());
    for (i, det) in detections.iter().enumerate() {
        let det = det.borrow();
        let predicted = predict_previous_center(det);
        let det_area = det.bbox.area();
        for (j, &(center, area)) in anchors.iter().enumerate() {
            let d = (predicted - center).norm_sq();
            if d <= area.min(det_area) {
                out.set(i, j, Some(d));
            }
        }
    }
    out
}
