//! Center-point heatmap labels: Gaussian radius from box size, Gaussian
//! splatting, and max-filter peak decoding.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::types::{BoundingBox, Vec2};

/// Default overlap rate used when sizing label Gaussians.
pub const DEFAULT_RATE: f64 = 0.7;

/// Radii below this many cells are clamped when rendering, so the density
/// stays finite when the rate leaves no room for shrinkage.
pub const MIN_RENDER_RADIUS: f64 = 0.5;

const MAGIC: &[u8; 4] = b"HMAP";

/// Largest radius `r` such that shrinking a `w x h` box along its diagonal
/// directions by `r` keeps `rate` of its area:
///
/// `w*h*rate = (w - h*r/d) * (h - w*r/d)`, `d = sqrt(w² + h²)`.
///
/// Expanding gives `(wh/d²) r² - d r + wh(1 - rate) = 0`; the smaller root is
/// the meaningful one (the larger one shrinks the box past zero).
pub fn gaussian_radius(w: f64, h: f64, rate: f64) -> Result<f64> {
    if !(rate > 0.0 && rate <= 1.0) {
        return Err(Error::InvalidConfig(format!("rate {rate} outside (0, 1]")));
    }
    if !(w > 0.0 && h > 0.0 && w.is_finite() && h.is_finite()) {
        return Err(Error::InvalidBox { w, h });
    }
    let d = w.hypot(h);
    let a = w * h / (d * d);
    let c = w * h * (1.0 - rate);
    // Discriminant is d² - 4ac ≥ d²·rate > 0 because wh ≤ d²/2.
    let disc = (d * d - 4.0 * a * c).max(0.0);
    // Cancellation-free form of (d - sqrt(disc)) / 2a.
    Ok(2.0 * c / (d + disc.sqrt()))
}

/// Both sides of the radius equation, for residual checks.
pub fn radius_equation_sides(w: f64, h: f64, rate: f64, r: f64) -> (f64, f64) {
    let d = w.hypot(h);
    (w * h * rate, (w - h * r / d) * (h - w * r / d))
}

/// Heatmap grid geometry.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub width: usize,
    pub height: usize,
    /// Pixels per cell.
    pub stride: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Heatmap {
    pub width: usize,
    pub height: usize,
    pub stride: f64,
    /// Row-major, `height * width` values.
    pub values: Vec<f64>,
}

impl Heatmap {
    pub fn zeros(grid: GridSpec) -> Self {
        Self {
            width: grid.width,
            height: grid.height,
            stride: grid.stride,
            values: vec![0.0; grid.width * grid.height],
        }
    }

    pub fn get(&self, x: usize, y: usize) -> f64 {
        self.values[y * self.width + x]
    }

    /// Cell containing a pixel position, if inside the grid.
    pub fn cell_of(&self, p: Vec2) -> Option<(usize, usize)> {
        let x = (p.x / self.stride).floor();
        let y = (p.y / self.stride).floor();
        if x < 0.0 || y < 0.0 || x >= self.width as f64 || y >= self.height as f64 {
            return None;
        }
        Some((x as usize, y as usize))
    }

    /// Pixel position of a cell's center.
    pub fn cell_center(&self, x: usize, y: usize) -> Vec2 {
        Vec2::new((x as f64 + 0.5) * self.stride, (y as f64 + 0.5) * self.stride)
    }

    /// Little-endian `HMAP` magic, `u32` width, `u32` height, `f64` stride, then
    /// `f64` values row-major.
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(20 + 8 * self.values.len());
        out.extend_from_slice(MAGIC);
        out.extend_from_slice(&(self.width as u32).to_le_bytes());
        out.extend_from_slice(&(self.height as u32).to_le_bytes());
        out.extend_from_slice(&self.stride.to_le_bytes());
        for v in &self.values {
            out.extend_from_slice(&v.to_le_bytes());
        }
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        let bad = |m: &str| Error::Heatmap(m.to_string());
        if bytes.len() < 20 || &bytes[..4] != MAGIC {
            return Err(bad("missing header"));
        }
        let width = u32::from_le_bytes(bytes[4..8].try_into().unwrap()) as usize;
        let height = u32::from_le_bytes(bytes[8..12].try_into().unwrap()) as usize;
        let stride = f64::from_le_bytes(bytes[12..20].try_into().unwrap());
        let body = &bytes[20..];
        if body.len() != width * height * 8 {
            return Err(bad("body length does not match dimensions"));
        }
        if !(stride > 0.0 && stride.is_finite()) {
            return Err(bad("stride must be positive"));
        }
        let values: Vec<f64> = body
            .chunks_exact(8)
            .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
            .collect();
        if values.iter().any(|v| !v.is_finite() || *v < 0.0) {
            return Err(bad("values must be finite and non-negative"));
        }
        Ok(Self {
            width,
            height,
            stride,
            values,
        })
    }
}

/// Splats one Gaussian label per box at its center cell.
///
/// The radius is computed from the box size in cell units. Each Gaussian is
/// `exp(-(x² + y²) / 2r²) / (2πr²)`, or with `normalize` its peak is scaled
/// to one. Overlaps keep the elementwise maximum. Boxes whose center is off the
/// grid are skipped.
pub fn render(objects: &[BoundingBox], grid: GridSpec, rate: f64, normalize: bool) -> Result<Heatmap> {
    let mut hm = Heatmap::zeros(grid);
    for obj in objects {
        let r = gaussian_radius(obj.w / grid.stride, obj.h / grid.stride, rate)?
            .max(MIN_RENDER_RADIUS);
        let Some((cx, cy)) = hm.cell_of(obj.center()) else {
            continue;
        };
        let two_r2 = 2.0 * r * r;
        let scale = if normalize { 1.0 } else { 1.0 / (PI * two_r2) };
        let reach = (3.0 * r).ceil() as isize;
        for dy in -reach..=reach {
            let y = cy as isize + dy;
            if y < 0 || y >= grid.height as isize {
                continue;
            }
            for dx in -reach..=reach {
                let x = cx as isize + dx;
                if x < 0 || x >= grid.width as isize {
                    continue;
                }
                let v = scale * (-((dx * dx + dy * dy) as f64) / two_r2).exp();
                let cell = &mut hm.values[y as usize * grid.width + x as usize];
                *cell = cell.max(v);
            }
        }
    }
    Ok(hm)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Peak {
    /// Cell center in pixels.
    pub center: Vec2,
    pub cell: (usize, usize),
    pub score: f64,
}

/// Cells equal to the maximum of their `window x window` neighborhood and
/// strictly above `threshold`, sorted by score descending (row-major order on
/// ties). Every cell of a plateau that attains the maximum is reported.
pub fn decode_peaks(hm: &Heatmap, threshold: f64, window: usize) -> Result<Vec<Peak>> {
    if window == 0 || window.is_multiple_of(2) {
        return Err(Error::InvalidConfig(format!(
            "peak window must be a positive odd number, got {window}"
        )));
    }
    let half = window / 2;
    let mut peaks = Vec::new();
    for y in 0..hm.height {
        for x in 0..hm.width {
            let v = hm.get(x, y);
            if v <= threshold {
                continue;
            }
            let y0 = y.saturating_sub(half);
            let y1 = (y + half).min(hm.height - 1);
            let x0 = x.saturating_sub(half);
            let x1 = (x + half).min(hm.width - 1);
            let is_max = (y0..=y1).all(|yy| (x0..=x1).all(|xx| hm.get(xx, yy) <= v));
            if is_max {
                peaks.push(Peak {
                    center: hm.cell_center(x, y),
                    cell: (x, y),
                    score: v,
                });
            }
        }
    }
    peaks.sort_by(|a, b| b.score.total_cmp(&a.score));
    Ok(peaks)
}
