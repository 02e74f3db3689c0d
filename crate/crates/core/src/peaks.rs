//! Extrema and widths of sampled line shapes.
//!
//! Extrema are located by a three-point test and refined by the vertex of
//! the parabola through the extremum and its neighbours. Widths are measured
//! at half prominence: the reference level of a maximum is the higher of the
//! two lowest points reached on either side before the signal climbs above
//! the maximum again (and the mirror image for a minimum).

use serde::Serialize;

use crate::error::{Error, Result};
use crate::scan::SpectrumScan;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Orientation {
    Maximum,
    Minimum,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Peak {
    pub position: f64,
    /// Signal value at the refined extremum.
    pub height: f64,
    /// Distance from the extremum to its local reference level.
    pub prominence: f64,
    pub fwhm: f64,
    pub orientation: Orientation,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PeakReport {
    pub peaks: Vec<Peak>,
    /// Mean of the two outermost samples on each side.
    pub baseline: f64,
}

impl PeakReport {
    pub fn maxima(&self) -> impl Iterator<Item = &Peak> {
        self.peaks.iter().filter(|p| p.orientation == Orientation::Maximum)
    }

    pub fn minima(&self) -> impl Iterator<Item = &Peak> {
        self.peaks.iter().filter(|p| p.orientation == Orientation::Minimum)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PeakOptions {
    /// Extrema with prominence below this fraction of the signal range are dropped.
    pub min_relative_prominence: f64,
}

impl Default for PeakOptions {
    fn default() -> Self {
        PeakOptions { min_relative_prominence: 1e-6 }
    }
}

/// Vertex of the parabola through three points, clamped to their span.
fn parabola_vertex(x: [f64; 3], y: [f64; 3]) -> (f64, f64) {
    let (h1, h2) = (x[1] - x[0], x[2] - x[1]);
    let s1 = (y[1] - y[0]) / h1;
    let s2 = (y[2] - y[1]) / h2;
    let curvature = (s2 - s1) / (x[2] - x[0]);
    if curvature == 0.0 {
        return (x[1], y[1]);
    }
    // y = y1 + b (t − x1) + curvature (t − x1)², b = slope at x1
    let b = s1 + curvature * h1;
    let t = (x[1] - b / (2.0 * curvature)).clamp(x[0], x[2]);
    let dt = t - x[1];
    (t, y[1] + b * dt + curvature * dt * dt)
}

/// Crossing of `level` walking from `i` in direction `step`, by linear
/// interpolation between samples.
fn crossing(x: &[f64], y: &[f64], i: usize, level: f64, step: isize) -> Option<f64> {
    let above = y[i] > level;
    let mut j = i as isize;
    loop {
        let k = j + step;
        if k < 0 || k >= y.len() as isize {
            return None;
        }
        let (a, b) = (j as usize, k as usize);
        if (y[b] > level) != above || y[b] == level {
            let frac = (level - y[a]) / (y[b] - y[a]);
            return Some(x[a] + frac * (x[b] - x[a]));
        }
        j = k;
    }
}

/// Full width at `level`, crossing on both sides of sample `i`. A crossing
/// missing on one side is mirrored from the other.
pub fn width_at(x: &[f64], y: &[f64], i: usize, level: f64) -> Option<f64> {
    let left = crossing(x, y, i, level, -1);
    let right = crossing(x, y, i, level, 1);
    match (left, right) {
        (Some(l), Some(r)) => Some(r - l),
        (Some(l), None) => Some(2.0 * (x[i] - l)),
        (None, Some(r)) => Some(2.0 * (r - x[i])),
        (None, None) => None,
    }
}

/// Prominence reference of the maximum at `i` of `y`.
fn reference_level(y: &[f64], i: usize) -> f64 {
    let peak = y[i];
    let left = y[..i].iter().rev().take_while(|&&v| v <= peak).fold(peak, |m, &v| m.min(v));
    let right = y[i + 1..].iter().take_while(|&&v| v <= peak).fold(peak, |m, &v| m.min(v));
    left.max(right)
}

pub fn find_extrema(x: &[f64], y: &[f64], opts: &PeakOptions) -> Result<PeakReport> {
    if x.len() != y.len() || x.len() < 5 {
        return Err(Error::InvalidGrid(format!("peak search needs >= 5 samples, got {}", x.len())));
    }
    let n = y.len();
    let baseline = (y[0] + y[1] + y[n - 2] + y[n - 1]) / 4.0;
    let range = y.iter().fold(f64::NEG_INFINITY, |m, &v| m.max(v)) - y.iter().fold(f64::INFINITY, |m, &v| m.min(v));
    let negated: Vec<f64> = y.iter().map(|v| -v).collect();

    let mut peaks = Vec::new();
    for i in 1..n - 1 {
        let orientation = if y[i] > y[i - 1] && y[i] > y[i + 1] {
            Orientation::Maximum
        } else if y[i] < y[i - 1] && y[i] < y[i + 1] {
            Orientation::Minimum
        } else {
            continue;
        };
        // work on a signal in which the extremum is a maximum
        let s: &[f64] = match orientation {
            Orientation::Maximum => y,
            Orientation::Minimum => &negated,
        };
        let prominence = s[i] - reference_level(s, i);
        if !(prominence > opts.min_relative_prominence * range) {
            continue;
        }
        let Some(fwhm) = width_at(x, s, i, s[i] - prominence / 2.0) else { continue };
        if !(fwhm > 0.0) {
            continue;
        }
        let (position, height) = parabola_vertex([x[i - 1], x[i], x[i + 1]], [y[i - 1], y[i], y[i + 1]]);
        peaks.push(Peak { position, height, prominence, fwhm, orientation });
    }
    if peaks.is_empty() {
        return Err(Error::NoPeaks);
    }
    Ok(PeakReport { peaks, baseline })
}

/// Extrema of ρ₁₁ over a scan.
pub fn find_peaks(s: &SpectrumScan) -> Result<PeakReport> {
    find_extrema(&s.grid, &s.rho11(), &PeakOptions::default())
}
