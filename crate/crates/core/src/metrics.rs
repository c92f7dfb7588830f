//! Keypoint-level optical flow.
//!
//! The flow of a transition `t-1 -> t` is the confidence-weighted mean
//! Euclidean displacement of the included keypoints, counting only keypoints
//! present in both frames. Keypoint weight is the smaller of the two
//! confidences. Translating a whole sequence leaves the series unchanged;
//! scaling it by `s` scales every value by `|s|`.

use std::fmt::Write as _;
use std::ops::Range;

use crate::error::{Error, Result};
use crate::pose::{distance, PoseSequence};

#[derive(Debug, Clone, PartialEq)]
pub struct FlowSeries {
    pub values: Vec<f64>,
    pub component_mask: Vec<String>,
    /// Transitions where no keypoint was present in both frames.
    pub flagged: Vec<usize>,
}

impl FlowSeries {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// `frame,flow` CSV; each row is labelled with the frame the transition
    /// lands on.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("frame,flow\n");
        for (i, v) in self.values.iter().enumerate() {
            let _ = writeln!(out, "{},{}", i + 1, v);
        }
        out
    }
}

/// Flow over the named components; an empty list means every component.
pub fn flow_series(seq: &PoseSequence, components: &[&str]) -> Result<FlowSeries> {
    if seq.frames() < 2 {
        return Err(Error::TooFewFrames(seq.frames()));
    }
    let header = seq.header();
    let names: Vec<String> = if components.is_empty() {
        header.components.iter().map(|c| c.name.clone()).collect()
    } else {
        components.iter().map(|c| c.to_string()).collect()
    };
    let mut keypoints: Vec<usize> = Vec::new();
    for name in &names {
        let range = header.component_range(name).ok_or_else(|| Error::UnknownComponent(name.clone()))?;
        keypoints.extend(range);
    }
    let mut values = Vec::with_capacity(seq.frames() - 1);
    let mut flagged = Vec::new();
    for t in 1..seq.frames() {
        let (mut sum, mut weight) = (0.0f64, 0.0f64);
        for &k in &keypoints {
            let w = seq.conf(t - 1, 0, k).min(seq.conf(t, 0, k)) as f64;
            if w > 0.0 {
                sum += w * distance(seq.point(t, 0, k), seq.point(t - 1, 0, k));
                weight += w;
            }
        }
        if weight > 0.0 {
            values.push(sum / weight);
        } else {
            values.push(0.0);
            flagged.push(t - 1);
        }
    }
    Ok(FlowSeries { values, component_mask: names, flagged })
}

/// Area under the series with unit frame spacing.
pub fn flow_auc(series: &FlowSeries) -> f64 {
    series.values.iter().sum()
}

#[derive(Debug, Clone, PartialEq)]
pub struct ZoneStats {
    pub zone: Range<usize>,
    pub peak_a: f64,
    pub peak_b: f64,
    pub auc_a: f64,
    pub auc_b: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ZoneReport {
    pub zones: Vec<ZoneStats>,
    /// Largest |a - b| over transitions outside every zone.
    pub outside_max_abs_diff: f64,
}

impl ZoneReport {
    pub fn to_text(&self, label_a: &str, label_b: &str) -> String {
        let mut out = format!("zone          peak({label_a})  peak({label_b})  auc({label_a})  auc({label_b})\n");
        for z in &self.zones {
            let _ = writeln!(
                out,
                "{:>5}..{:<5}  {:>10.5}  {:>10.5}  {:>10.5}  {:>10.5}",
                z.zone.start, z.zone.end, z.peak_a, z.peak_b, z.auc_a, z.auc_b
            );
        }
        let _ = writeln!(out, "max |difference| outside zones: {:.3e}", self.outside_max_abs_diff);
        out
    }
}

/// Compares two flow series of equal length over the given transition ranges.
pub fn stitch_zone_report(a: &FlowSeries, b: &FlowSeries, zones: &[Range<usize>]) -> Result<ZoneReport> {
    if a.len() != b.len() {
        return Err(Error::LengthMismatch(a.len(), b.len()));
    }
    let len = a.len();
    let mut inside = vec![false; len];
    let mut stats = Vec::with_capacity(zones.len());
    for z in zones {
        if z.start >= z.end || z.end > len {
            return Err(Error::ZoneOutOfRange { start: z.start, end: z.end, len });
        }
        inside[z.clone()].iter_mut().for_each(|x| *x = true);
        let peak = |s: &FlowSeries| s.values[z.clone()].iter().copied().fold(0.0, f64::max);
        let auc = |s: &FlowSeries| s.values[z.clone()].iter().sum::<f64>();
        stats.push(ZoneStats { zone: z.clone(), peak_a: peak(a), peak_b: peak(b), auc_a: auc(a), auc_b: auc(b) });
    }
    let outside_max_abs_diff =
        (0..len).filter(|&i| !inside[i]).map(|i| (a.values[i] - b.values[i]).abs()).fold(0.0, f64::max);
    Ok(ZoneReport { zones: stats, outside_max_abs_diff })
}
