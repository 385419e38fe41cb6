//! MOTChallenge CSV, the motion sidecar, and the flat scenario config file.
//!
//! MOT lines are `frame,id,bb_left,bb_top,bb_width,bb_height,conf,x,y,z`.
//! Only the first seven columns are read; extra columns are ignored. The
//! motion sidecar carries `frame,det_index,bvx,bvy,fvx,fvy`, where
//! `det_index` is the 0-based position in that frame's detection list as read
//! from the detection file.

use std::collections::BTreeMap;
use std::io::{BufRead, Write};

use serde::Deserialize;

use crate::error::{Error, Result};
use crate::metrics::{EvalReport, Trajectory};
use crate::simulator::{NoiseConfig, OcclusionConfig, ScenarioConfig};
use crate::types::{BoundingBox, Detection, ForwardFallback, FrameInput, FrameOutput, Vec2};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MotLine {
    pub frame: u64,
    /// `-1` in detection files.
    pub id: i64,
    pub bb_left: f64,
    pub bb_top: f64,
    pub bb_width: f64,
    pub bb_height: f64,
    pub conf: f64,
}

impl MotLine {
    pub fn bbox(&self) -> Result<BoundingBox> {
        BoundingBox::from_corner(self.bb_left, self.bb_top, self.bb_width, self.bb_height)
    }
}

fn parse_err(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse {
        line,
        msg: msg.into(),
    }
}

fn field<T: std::str::FromStr>(cols: &[&str], i: usize, name: &str, line: usize) -> Result<T> {
    let raw = cols
        .get(i)
        .ok_or_else(|| parse_err(line, format!("missing column `{name}`")))?;
    raw.trim()
        .parse()
        .map_err(|_| parse_err(line, format!("bad `{name}` value {raw:?}")))
}

/// Parses every non-blank line. Line numbers in errors are 1-based.
pub fn parse_mot_lines(reader: impl BufRead) -> Result<Vec<(usize, MotLine)>> {
    let mut out = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let n = i + 1;
        let line = line?;
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let cols: Vec<&str> = line.split(',').collect();
        if cols.len() < 7 {
            return Err(parse_err(n, format!("expected at least 7 columns, found {}", cols.len())));
        }
        let frame: u64 = field(&cols, 0, "frame", n)?;
        if frame == 0 {
            return Err(parse_err(n, "frame numbers start at 1"));
        }
        let parsed = MotLine {
            frame,
            id: field::<f64>(&cols, 1, "id", n)? as i64,
            bb_left: field(&cols, 2, "bb_left", n)?,
            bb_top: field(&cols, 3, "bb_top", n)?,
            bb_width: field(&cols, 4, "bb_width", n)?,
            bb_height: field(&cols, 5, "bb_height", n)?,
            conf: field(&cols, 6, "conf", n)?,
        };
        out.push((n, parsed));
    }
    Ok(out)
}

/// Ground-truth file → trajectories sorted by id.
pub fn parse_mot_gt(reader: impl BufRead) -> Result<Vec<Trajectory>> {
    let mut by_id: BTreeMap<u64, Trajectory> = BTreeMap::new();
    for (n, l) in parse_mot_lines(reader)? {
        if l.id < 1 {
            return Err(parse_err(n, format!("ground-truth id must be positive, got {}", l.id)));
        }
        let bbox = l.bbox().map_err(|e| parse_err(n, e.to_string()))?;
        let id = l.id as u64;
        let traj = by_id.entry(id).or_insert_with(|| Trajectory::new(id));
        if traj.boxes.insert(l.frame, bbox).is_some() {
            return Err(parse_err(n, format!("duplicate box for id {id} in frame {}", l.frame)));
        }
    }
    Ok(by_id.into_values().collect())
}

/// Detection file → one [`FrameInput`] per frame from 1 to the last frame
/// present, with empty frames filled in. Lines are grouped by frame keeping
/// file order within a frame. Backward motion is zero and forward motion is
/// absent until a sidecar is attached.
pub fn parse_mot_detections(reader: impl BufRead) -> Result<Vec<FrameInput>> {
    let lines = parse_mot_lines(reader)?;
    let last = lines.iter().map(|(_, l)| l.frame).max().unwrap_or(0);
    let mut stream: Vec<FrameInput> = (1..=last)
        .map(|frame| FrameInput {
            frame,
            detections: Vec::new(),
        })
        .collect();
    for (n, l) in lines {
        let bbox = l.bbox().map_err(|e| parse_err(n, e.to_string()))?;
        let det = Detection::new(bbox, l.conf, Vec2::ZERO, None)
            .map_err(|e| parse_err(n, e.to_string()))?;
        stream[(l.frame - 1) as usize].detections.push(det);
    }
    Ok(stream)
}

/// `(frame, det_index)` → `(backward, forward)`.
pub type MotionTable = BTreeMap<(u64, usize), (Vec2, Vec2)>;

pub fn parse_motion_sidecar(reader: impl BufRead) -> Result<MotionTable> {
    let mut table = MotionTable::new();
    for (i, line) in reader.lines().enumerate() {
        let n = i + 1;
        let line = line?;
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let cols: Vec<&str> = line.split(',').collect();
        if cols.len() != 6 {
            return Err(parse_err(n, format!("expected 6 columns, found {}", cols.len())));
        }
        let frame: u64 = field(&cols, 0, "frame", n)?;
        let index: usize = field(&cols, 1, "det_index", n)?;
        let v: Vec<f64> = (2..6)
            .map(|c| field::<f64>(&cols, c, "motion", n))
            .collect::<Result<_>>()?;
        if v.iter().any(|x| !x.is_finite()) {
            return Err(parse_err(n, "motion components must be finite"));
        }
        let entry = (Vec2::new(v[0], v[1]), Vec2::new(v[2], v[3]));
        if table.insert((frame, index), entry).is_some() {
            return Err(Error::DuplicateMotion {
                line: n,
                frame,
                index,
            });
        }
    }
    Ok(table)
}

/// Sets backward and forward vectors on the referenced detections.
pub fn attach_motion(stream: &mut [FrameInput], table: &MotionTable) -> Result<()> {
    for (&(frame, index), &(backward, forward)) in table {
        let det = stream
            .iter_mut()
            .find(|f| f.frame == frame)
            .and_then(|f| f.detections.get_mut(index))
            .ok_or(Error::MissingDetection { frame, index })?;
        det.backward_motion = backward;
        det.forward_motion = Some(forward);
    }
    Ok(())
}

fn corner_fields(b: &BoundingBox) -> String {
    format!("{:.1},{:.1},{:.1},{:.1}", b.left(), b.top(), b.w, b.h)
}

/// Tracker results, frames ascending and ids ascending within a frame.
pub fn write_results(outputs: &[FrameOutput], mut w: impl Write) -> Result<()> {
    let mut rows: Vec<(u64, u64, String)> = Vec::new();
    for out in outputs {
        for e in &out.entries {
            rows.push((
                out.frame,
                e.id.0,
                format!(
                    "{},{},{},{:.1},-1,-1,-1",
                    out.frame,
                    e.id.0,
                    corner_fields(&e.bbox),
                    e.confidence
                ),
            ));
        }
    }
    rows.sort_by_key(|r| (r.0, r.1));
    for (_, _, line) in rows {
        writeln!(w, "{line}")?;
    }
    w.flush()?;
    Ok(())
}

/// Ground truth in MOT form, frames ascending then ids ascending.
pub fn write_gt(gt: &[Trajectory], mut w: impl Write) -> Result<()> {
    let mut rows: Vec<(u64, u64, &BoundingBox)> = gt
        .iter()
        .flat_map(|t| t.boxes.iter().map(move |(&f, b)| (f, t.id, b)))
        .collect();
    rows.sort_by_key(|r| (r.0, r.1));
    for (f, id, b) in rows {
        writeln!(w, "{f},{id},{},1,-1,-1,-1", corner_fields(b))?;
    }
    w.flush()?;
    Ok(())
}

/// Detection stream in MOT form with `id = -1` and three-decimal confidences.
pub fn write_detections(stream: &[FrameInput], mut w: impl Write) -> Result<()> {
    for f in stream {
        for d in &f.detections {
            writeln!(
                w,
                "{},-1,{},{:.3},-1,-1,-1",
                f.frame,
                corner_fields(&d.bbox),
                d.confidence
            )?;
        }
    }
    w.flush()?;
    Ok(())
}

/// Motion sidecar for every detection. A missing forward vector is written
/// as the negated backward vector.
pub fn write_motion_sidecar(stream: &[FrameInput], mut w: impl Write) -> Result<()> {
    for f in stream {
        for (i, d) in f.detections.iter().enumerate() {
            let fw = d.resolved_forward(ForwardFallback::NegatedBackward);
            writeln!(
                w,
                "{},{},{:.3},{:.3},{:.3},{:.3}",
                f.frame, i, d.backward_motion.x, d.backward_motion.y, fw.x, fw.y
            )?;
        }
    }
    w.flush()?;
    Ok(())
}

pub fn report_to_json(report: &EvalReport) -> String {
    serde_json::to_string_pretty(report).expect("report is plain data")
}

/// `key=value` lines, keys sorted.
pub fn report_to_text(report: &EvalReport) -> String {
    let value = serde_json::to_value(report).expect("report is plain data");
    let mut out = String::new();
    if let serde_json::Value::Object(map) = value {
        let sorted: BTreeMap<_, _> = map.into_iter().collect();
        for (k, v) in sorted {
            match v.as_f64() {
                Some(x) if v.is_f64() => out.push_str(&format!("{k}={x:.6}\n")),
                _ => out.push_str(&format!("{k}={v}\n")),
            }
        }
    }
    out
}

/// Flat `key = value` scenario file. Every key is optional and falls back to
/// the defaults of [`ScenarioConfig`], [`NoiseConfig`] and [`OcclusionConfig`].
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SimConfigFile {
    pub arena_width: f64,
    pub arena_height: f64,
    pub n_objects: usize,
    pub n_frames: u64,
    pub speed_min: f64,
    pub speed_max: f64,
    pub box_min: f64,
    pub box_max: f64,
    pub spawn_prob: f64,
    pub despawn_prob: f64,
    pub seed: u64,
    pub center_jitter_sigma: f64,
    pub motion_noise_sigma: f64,
    pub confidence_min: f64,
    pub confidence_max: f64,
    pub false_positive_rate: f64,
    pub occlusion_rate: f64,
    pub duration_min: u32,
    pub duration_max: u32,
}

impl Default for SimConfigFile {
    fn default() -> Self {
        let s = ScenarioConfig::default();
        let n = NoiseConfig::default();
        let o = OcclusionConfig::default();
        Self {
            arena_width: s.arena.0,
            arena_height: s.arena.1,
            n_objects: s.n_objects,
            n_frames: s.n_frames,
            speed_min: s.speed_range.0,
            speed_max: s.speed_range.1,
            box_min: s.box_size_range.0,
            box_max: s.box_size_range.1,
            spawn_prob: s.spawn_prob,
            despawn_prob: s.despawn_prob,
            seed: s.seed,
            center_jitter_sigma: n.center_jitter_sigma,
            motion_noise_sigma: n.motion_noise_sigma,
            confidence_min: n.confidence_range.0,
            confidence_max: n.confidence_range.1,
            false_positive_rate: n.false_positive_rate,
            occlusion_rate: o.target_rate,
            duration_min: o.duration_range.0,
            duration_max: o.duration_range.1,
        }
    }
}

impl SimConfigFile {
    pub fn parse(text: &str) -> Result<Self> {
        let cfg: Self = toml::from_str(text).map_err(|e| Error::InvalidConfig(e.to_string()))?;
        cfg.scenario().validate()?;
        cfg.noise().validate()?;
        cfg.occlusion().validate()?;
        Ok(cfg)
    }

    pub fn scenario(&self) -> ScenarioConfig {
        ScenarioConfig {
            arena: (self.arena_width, self.arena_height),
            n_objects: self.n_objects,
            n_frames: self.n_frames,
            speed_range: (self.speed_min, self.speed_max),
            box_size_range: (self.box_min, self.box_max),
            spawn_prob: self.spawn_prob,
            despawn_prob: self.despawn_prob,
            seed: self.seed,
        }
    }

    pub fn noise(&self) -> NoiseConfig {
        NoiseConfig {
            center_jitter_sigma: self.center_jitter_sigma,
            motion_noise_sigma: self.motion_noise_sigma,
            confidence_range: (self.confidence_min, self.confidence_max),
            false_positive_rate: self.false_positive_rate,
        }
    }

    pub fn occlusion(&self) -> OcclusionConfig {
        OcclusionConfig {
            target_rate: self.occlusion_rate,
            duration_range: (self.duration_min, self.duration_max),
            seed: self.seed,
        }
    }
}
