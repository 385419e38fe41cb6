//! Seeded synthetic scenes for exercising the tracker.
//!
//! [`generate`] moves boxes at constant speed inside an arena (reflecting off
//! the walls) and emits one exact detection per object per frame. [`perturb`]
//! adds detector-like noise and [`apply_occlusion`] deletes detections in
//! contiguous per-object events, calibrated to hit a target masked fraction.

use std::collections::BTreeSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::assignment::{hungarian, CostMatrix};
use crate::error::{Error, Result};
use crate::metrics::{iou, Trajectory, DEFAULT_IOU_THRESHOLD};
use crate::types::{BoundingBox, Detection, FrameInput, Vec2};

/// Highest occlusion rate the calibration accepts.
pub const MAX_OCCLUSION_RATE: f64 = 0.95;

/// Realized masking rate accepted from the analytic calibration before
/// refining against the sampled events themselves.
const CALIBRATION_SLACK: f64 = 0.005;

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioConfig {
    /// Width and height in pixels.
    pub arena: (f64, f64),
    /// Objects present at frame 1.
    pub n_objects: usize,
    pub n_frames: u64,
    /// Speed in px/frame; direction is uniform.
    pub speed_range: (f64, f64),
    /// Box width and height are each drawn from this range.
    pub box_size_range: (f64, f64),
    /// Probability of one new object appearing per frame.
    pub spawn_prob: f64,
    /// Per-object probability of leaving the scene per frame.
    pub despawn_prob: f64,
    pub seed: u64,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        Self {
            arena: (1920.0, 1080.0),
            n_objects: 20,
            n_frames: 500,
            speed_range: (1.0, 4.0),
            box_size_range: (30.0, 80.0),
            spawn_prob: 0.0,
            despawn_prob: 0.0,
            seed: 0,
        }
    }
}

fn check_range(name: &str, (lo, hi): (f64, f64)) -> Result<()> {
    if !(lo.is_finite() && hi.is_finite() && lo <= hi) {
        return Err(Error::InvalidConfig(format!("{name} range ({lo}, {hi}) is empty")));
    }
    Ok(())
}

fn check_prob(name: &str, p: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidConfig(format!("{name} {p} outside [0, 1]")));
    }
    Ok(())
}

impl ScenarioConfig {
    pub fn validate(&self) -> Result<()> {
        check_range("speed", self.speed_range)?;
        check_range("box size", self.box_size_range)?;
        check_prob("spawn_prob", self.spawn_prob)?;
        check_prob("despawn_prob", self.despawn_prob)?;
        if self.speed_range.0 < 0.0 {
            return Err(Error::InvalidConfig("speeds must be non-negative".into()));
        }
        if self.box_size_range.0 <= 0.0 {
            return Err(Error::InvalidConfig("box sizes must be positive".into()));
        }
        let (aw, ah) = self.arena;
        if !(self.box_size_range.1 < aw && self.box_size_range.1 < ah) {
            return Err(Error::InvalidConfig(
                "arena must be larger than the largest box".into(),
            ));
        }
        if self.n_frames == 0 {
            return Err(Error::InvalidConfig("n_frames must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct NoiseConfig {
    /// Standard deviation of the Gaussian offset added to each center, px.
    pub center_jitter_sigma: f64,
    /// Standard deviation of the noise added to each motion component, px/frame.
    pub motion_noise_sigma: f64,
    /// Confidences are drawn uniformly from this range.
    pub confidence_range: (f64, f64),
    /// Expected false detections per frame.
    pub false_positive_rate: f64,
}

impl Default for NoiseConfig {
    fn default() -> Self {
        Self {
            center_jitter_sigma: 0.0,
            motion_noise_sigma: 0.0,
            confidence_range: (1.0, 1.0),
            false_positive_rate: 0.0,
        }
    }
}

impl NoiseConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.center_jitter_sigma >= 0.0 && self.motion_noise_sigma >= 0.0) {
            return Err(Error::InvalidConfig("noise sigmas must be non-negative".into()));
        }
        check_range("confidence", self.confidence_range)?;
        let (lo, hi) = self.confidence_range;
        if lo < 0.0 || hi > 1.0 {
            return Err(Error::InvalidConfig("confidence range must lie in [0, 1]".into()));
        }
        if !(self.false_positive_rate >= 0.0 && self.false_positive_rate.is_finite()) {
            return Err(Error::InvalidConfig(
                "false_positive_rate must be non-negative".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OcclusionConfig {
    /// Fraction of ground-truth box-frames whose detection is removed.
    pub target_rate: f64,
    /// Inclusive range of event lengths in frames.
    pub duration_range: (u32, u32),
    pub seed: u64,
}

impl Default for OcclusionConfig {
    fn default() -> Self {
        Self {
            target_rate: 0.0,
            duration_range: (1, 30),
            seed: 0,
        }
    }
}

impl OcclusionConfig {
    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.target_rate) {
            return Err(Error::InvalidConfig(format!(
                "occlusion rate {} outside [0, 1]",
                self.target_rate
            )));
        }
        let (lo, hi) = self.duration_range;
        if lo == 0 || lo > hi {
            return Err(Error::InvalidConfig(format!(
                "occlusion durations ({lo}, {hi}) must satisfy 1 <= min <= max"
            )));
        }
        Ok(())
    }
}

/// Ground truth plus the matching detection stream.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub gt: Vec<Trajectory>,
    pub stream: Vec<FrameInput>,
}

struct ObjectPath {
    first_frame: u64,
    w: f64,
    h: f64,
    start_velocity: Vec2,
    velocity: Vec2,
    position: Vec2,
    centers: Vec<Vec2>,
    alive: bool,
}

fn reflect(mut p: f64, mut v: f64, lo: f64, hi: f64) -> (f64, f64) {
    loop {
        if p < lo {
            p = 2.0 * lo - p;
            v = -v;
        } else if p > hi {
            p = 2.0 * hi - p;
            v = -v;
        } else {
            return (p, v);
        }
    }
}

fn spawn(rng: &mut ChaCha8Rng, cfg: &ScenarioConfig, frame: u64) -> ObjectPath {
    let (bmin, bmax) = cfg.box_size_range;
    let (smin, smax) = cfg.speed_range;
    let w = rng.random_range(bmin..=bmax);
    let h = rng.random_range(bmin..=bmax);
    let x = rng.random_range(w / 2.0..=cfg.arena.0 - w / 2.0);
    let y = rng.random_range(h / 2.0..=cfg.arena.1 - h / 2.0);
    let speed = rng.random_range(smin..=smax);
    let angle = rng.random_range(0.0..std::f64::consts::TAU);
    let velocity = Vec2::new(speed * angle.cos(), speed * angle.sin());
    let position = Vec2::new(x, y);
    ObjectPath {
        first_frame: frame,
        w,
        h,
        start_velocity: velocity,
        velocity,
        position,
        centers: vec![position],
        alive: true,
    }
}

/// Deterministic scene for `cfg.seed`. Ground-truth ids are 1-based in spawn
/// order; detections within a frame follow the same order and carry the exact
/// displacement to the previous and next positions.
pub fn generate(cfg: &ScenarioConfig) -> Result<Scenario> {
    cfg.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut objects: Vec<ObjectPath> = (0..cfg.n_objects).map(|_| spawn(&mut rng, cfg, 1)).collect();

    for frame in 2..=cfg.n_frames {
        for obj in objects.iter_mut().filter(|o| o.alive) {
            if rng.random_bool(cfg.despawn_prob) {
                obj.alive = false;
                continue;
            }
            let (x, vx) = reflect(
                obj.position.x + obj.velocity.x,
                obj.velocity.x,
                obj.w / 2.0,
                cfg.arena.0 - obj.w / 2.0,
            );
            let (y, vy) = reflect(
                obj.position.y + obj.velocity.y,
                obj.velocity.y,
                obj.h / 2.0,
                cfg.arena.1 - obj.h / 2.0,
            );
            obj.position = Vec2::new(x, y);
            obj.velocity = Vec2::new(vx, vy);
            obj.centers.push(obj.position);
        }
        if rng.random_bool(cfg.spawn_prob) {
            objects.push(spawn(&mut rng, cfg, frame));
        }
    }

    let mut gt = Vec::with_capacity(objects.len());
    let mut stream: Vec<FrameInput> = (1..=cfg.n_frames)
        .map(|frame| FrameInput {
            frame,
            detections: Vec::new(),
        })
        .collect();
    for (i, obj) in objects.iter().enumerate() {
        let mut traj = Trajectory::new(i as u64 + 1);
        for (k, &c) in obj.centers.iter().enumerate() {
            let frame = obj.first_frame + k as u64;
            let bbox = BoundingBox::new(c.x, c.y, obj.w, obj.h)?;
            let backward = if k == 0 {
                -obj.start_velocity
            } else {
                obj.centers[k - 1] - c
            };
            let forward = match obj.centers.get(k + 1) {
                Some(&next) => next - c,
                None => obj.velocity,
            };
            traj.boxes.insert(frame, bbox);
            stream[(frame - 1) as usize].detections.push(Detection {
                bbox,
                confidence: 1.0,
                backward_motion: backward,
                forward_motion: Some(forward),
            });
        }
        gt.push(traj);
    }
    Ok(Scenario { gt, stream })
}

/// Adds detector-like noise. Jitter moves the whole box; motion noise is
/// applied per component; each frame gets `floor(rate)` false positives plus
/// one more with probability `fract(rate)`, drawn inside the extent covered by
/// the stream's own boxes, with zero backward motion and no forward vector.
pub fn perturb(stream: &[FrameInput], cfg: &NoiseConfig, seed: u64) -> Result<Vec<FrameInput>> {
    cfg.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let jitter = Normal::new(0.0, cfg.center_jitter_sigma)
        .map_err(|e| Error::InvalidConfig(e.to_string()))?;
    let motion = Normal::new(0.0, cfg.motion_noise_sigma)
        .map_err(|e| Error::InvalidConfig(e.to_string()))?;
    let (cmin, cmax) = cfg.confidence_range;

    let extent = stream
        .iter()
        .flat_map(|f| &f.detections)
        .fold(None, |acc: Option<[f64; 6]>, d| {
            let b = &d.bbox;
            Some(match acc {
                None => [b.cx, b.cx, b.cy, b.cy, b.w.min(b.h), b.w.max(b.h)],
                Some(e) => [
                    e[0].min(b.cx),
                    e[1].max(b.cx),
                    e[2].min(b.cy),
                    e[3].max(b.cy),
                    e[4].min(b.w.min(b.h)),
                    e[5].max(b.w.max(b.h)),
                ],
            })
        });

    let mut out = Vec::with_capacity(stream.len());
    for f in stream {
        let mut dets = Vec::with_capacity(f.detections.len());
        for d in &f.detections {
            let mut d = d.clone();
            if cfg.center_jitter_sigma > 0.0 {
                let off = Vec2::new(jitter.sample(&mut rng), jitter.sample(&mut rng));
                d.bbox = d.bbox.translated(off);
            }
            if cfg.motion_noise_sigma > 0.0 {
                d.backward_motion += Vec2::new(motion.sample(&mut rng), motion.sample(&mut rng));
                if let Some(fw) = d.forward_motion.as_mut() {
                    *fw += Vec2::new(motion.sample(&mut rng), motion.sample(&mut rng));
                }
            }
            d.confidence = if cmin == cmax {
                cmin
            } else {
                rng.random_range(cmin..=cmax)
            };
            dets.push(d);
        }

        if let Some([x0, x1, y0, y1, s0, s1]) = extent {
            let whole = cfg.false_positive_rate.floor() as usize;
            let extra = usize::from(rng.random_bool(cfg.false_positive_rate.fract()));
            for _ in 0..whole + extra {
                let w = rng.random_range(s0..=s1);
                let h = rng.random_range(s0..=s1);
                let cx = rng.random_range(x0..=x1);
                let cy = rng.random_range(y0..=y1);
                let conf = if cmin == cmax {
                    cmin
                } else {
                    rng.random_range(cmin..=cmax)
                };
                dets.push(Detection::still(BoundingBox::new(cx, cy, w, h)?, conf));
            }
        }
        out.push(FrameInput {
            frame: f.frame,
            detections: dets,
        });
    }
    Ok(out)
}

/// Result of [`apply_occlusion`].
#[derive(Debug, Clone, PartialEq)]
pub struct Occlusion {
    pub stream: Vec<FrameInput>,
    /// Masked `(gt id, frame)` pairs.
    pub masked: BTreeSet<(u64, u64)>,
    pub total_gt_frames: usize,
    /// Per-frame probability of starting an event, as calibrated.
    pub start_prob: f64,
}

impl Occlusion {
    pub fn realized_rate(&self) -> f64 {
        if self.total_gt_frames == 0 {
            0.0
        } else {
            self.masked.len() as f64 / self.total_gt_frames as f64
        }
    }
}

/// Pre-drawn randomness for one trajectory: a uniform start draw and an event
/// length for every position.
struct EventDraws {
    id: u64,
    frames: Vec<u64>,
    starts: Vec<f64>,
    durations: Vec<u32>,
}

/// Walks a trajectory: at each visible position an event starts with
/// probability `p` and hides the next `d` positions; the position right after
/// an event is always visible, so consecutive events never merge.
fn realize(draws: &EventDraws, p: f64, mut visit: impl FnMut(usize)) {
    let n = draws.frames.len();
    let mut i = 0;
    while i < n {
        if draws.starts[i] < p {
            let d = (draws.durations[i] as usize).min(n - i);
            (i..i + d).for_each(&mut visit);
            i += d + 1;
        } else {
            i += 1;
        }
    }
}

fn realized_count(draws: &[EventDraws], p: f64) -> usize {
    let mut n = 0;
    for d in draws {
        realize(d, p, |_| n += 1);
    }
    n
}

/// Expected masked fraction over trajectories of the given lengths, for
/// start probability `p` and uniform durations in `duration_range`.
pub fn expected_mask_fraction(lengths: &[usize], duration_range: (u32, u32), p: f64) -> f64 {
    let total: usize = lengths.iter().sum();
    let Some(&max_len) = lengths.iter().max() else {
        return 0.0;
    };
    if total == 0 {
        return 0.0;
    }
    let (dmin, dmax) = (duration_range.0 as usize, duration_range.1 as usize);
    let weight = 1.0 / (dmax - dmin + 1) as f64;
    // expected[k]: expected masked positions among k remaining, no event active.
    let mut expected = vec![0.0f64; max_len + 1];
    for k in 1..=max_len {
        let mut started = 0.0;
        for d in dmin..=dmax {
            started += if d >= k {
                k as f64
            } else {
                d as f64 + expected[k - d - 1]
            };
        }
        expected[k] = (1.0 - p) * expected[k - 1] + p * weight * started;
    }
    lengths.iter().map(|&n| expected[n]).sum::<f64>() / total as f64
}

fn bisect(mut f: impl FnMut(f64) -> f64, target: f64) -> (f64, f64) {
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if f(mid) < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    (lo, hi)
}

/// Removes the detections that belong to masked ground-truth boxes.
/// Detections are tied to GT boxes per frame by an IoU assignment at the
/// standard threshold; everything else is kept in its original order.
pub fn mask_detections(
    stream: &[FrameInput],
    gt: &[Trajectory],
    masked: &BTreeSet<(u64, u64)>,
) -> Vec<FrameInput> {
    stream
        .iter()
        .map(|f| {
            let gts: Vec<(u64, &BoundingBox)> = gt
                .iter()
                .filter_map(|t| t.boxes.get(&f.frame).map(|b| (t.id, b)))
                .collect();
            if !gts.iter().any(|(id, _)| masked.contains(&(*id, f.frame))) {
                return f.clone();
            }
            let costs = CostMatrix::from_fn(gts.len(), f.detections.len(), |g, d| {
                let v = iou(gts[g].1, &f.detections[d].bbox);
                (v >= DEFAULT_IOU_THRESHOLD).then_some(1.0 - v)
            });
            let mut drop = vec![false; f.detections.len()];
            for (g, d) in hungarian(&costs).pairs {
                if masked.contains(&(gts[g].0, f.frame)) {
                    drop[d] = true;
                }
            }
            FrameInput {
                frame: f.frame,
                detections: f
                    .detections
                    .iter()
                    .zip(&drop)
                    .filter(|(_, &x)| !x)
                    .map(|(d, _)| d.clone())
                    .collect(),
            }
        })
        .collect()
}

/// Masks contiguous per-object occlusion events so that the fraction of
/// ground-truth box-frames hidden is close to `cfg.target_rate`.
///
/// The event start probability is first solved by bisection on the analytic
/// expected fraction; if the sampled events miss the target by more than half
/// a percent, it is refined by bisection on the sampled fraction itself using
/// the same draws. Ground truth is never modified.
pub fn apply_occlusion(
    stream: &[FrameInput],
    gt: &[Trajectory],
    cfg: &OcclusionConfig,
) -> Result<Occlusion> {
    cfg.validate()?;
    if cfg.target_rate > MAX_OCCLUSION_RATE {
        return Err(Error::OcclusionUnreachable(cfg.target_rate));
    }
    let total: usize = gt.iter().map(Trajectory::len).sum();
    if cfg.target_rate == 0.0 || total == 0 {
        return Ok(Occlusion {
            stream: stream.to_vec(),
            masked: BTreeSet::new(),
            total_gt_frames: total,
            start_prob: 0.0,
        });
    }

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let (dmin, dmax) = cfg.duration_range;
    let mut ordered: Vec<&Trajectory> = gt.iter().collect();
    ordered.sort_by_key(|t| t.id);
    let draws: Vec<EventDraws> = ordered
        .iter()
        .map(|t| {
            let n = t.len();
            EventDraws {
                id: t.id,
                frames: t.boxes.keys().copied().collect(),
                starts: (0..n).map(|_| rng.random::<f64>()).collect(),
                durations: (0..n).map(|_| rng.random_range(dmin..=dmax)).collect(),
            }
        })
        .collect();

    let lengths: Vec<usize> = draws.iter().map(|d| d.frames.len()).collect();
    let target = cfg.target_rate;
    if expected_mask_fraction(&lengths, cfg.duration_range, 1.0) < target {
        return Err(Error::OcclusionUnreachable(target));
    }
    let (_, analytic) = bisect(|p| expected_mask_fraction(&lengths, cfg.duration_range, p), target);

    let realized = |p: f64| realized_count(&draws, p) as f64 / total as f64;
    let mut start_prob = analytic;
    if (realized(analytic) - target).abs() > CALIBRATION_SLACK {
        let (lo, hi) = bisect(realized, target);
        start_prob = if (realized(lo) - target).abs() <= (realized(hi) - target).abs() {
            lo
        } else {
            hi
        };
    }

    let mut masked = BTreeSet::new();
    for d in &draws {
        realize(d, start_prob, |i| {
            masked.insert((d.id, d.frames[i]));
        });
    }
    Ok(Occlusion {
        stream: mask_detections(stream, gt, &masked),
        masked,
        total_gt_frames: total,
        start_prob,
    })
}
