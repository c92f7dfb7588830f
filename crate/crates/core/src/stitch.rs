//! Sentence stitching from per-sign clips.
//!
//! Each clip loses its leading and trailing neutral frames, is optionally
//! transferred to one shared appearance, and consecutive clips are joined by
//! linearly interpolated transition frames.

use std::ops::Range;

use crate::appearance::{extract_appearance, transfer_appearance, TransferPolicy};
use crate::error::{Error, Result};
use crate::metrics::flow_series;
use crate::pose::{AppearanceFrame, PoseSequence, LEFT_SHOULDER, LEFT_WRIST, RIGHT_SHOULDER, RIGHT_WRIST};

#[derive(Debug, Clone)]
pub struct StitchConfig {
    pub transition_frames: usize,
    /// Flow below this (normalized units per frame) counts as resting.
    pub rest_threshold: f64,
    pub crop_neutral: bool,
    pub unify_appearance: bool,
    /// Shared appearance; `None` uses the first clip's own appearance.
    pub target_appearance: Option<AppearanceFrame>,
    pub policy: TransferPolicy,
}

impl Default for StitchConfig {
    fn default() -> Self {
        Self {
            transition_frames: 8,
            rest_threshold: 0.02,
            crop_neutral: true,
            unify_appearance: true,
            target_appearance: None,
            policy: TransferPolicy::default(),
        }
    }
}

impl StitchConfig {
    pub fn validate(&self) -> Result<()> {
        if self.rest_threshold.is_nan() || self.rest_threshold < 0.0 {
            return Err(Error::Config(format!("rest threshold must be >= 0, got {}", self.rest_threshold)));
        }
        Ok(())
    }
}

/// Both wrists at or below the shoulder line (y grows downwards). A missing
/// wrist counts as lowered; missing shoulders mean the frame is not at rest.
fn wrists_lowered(seq: &PoseSequence, t: usize) -> bool {
    let h = seq.header();
    let (Some(ls), Some(rs)) = (h.body_point(LEFT_SHOULDER), h.body_point(RIGHT_SHOULDER)) else {
        return true;
    };
    if seq.conf(t, 0, ls) <= 0.0 || seq.conf(t, 0, rs) <= 0.0 {
        return false;
    }
    let line = (seq.point(t, 0, ls)[1] + seq.point(t, 0, rs)[1]) / 2.0;
    [LEFT_WRIST, RIGHT_WRIST].iter().all(|w| {
        let w = h.body_point(w).expect("BODY carries both wrists");
        seq.conf(t, 0, w) <= 0.0 || seq.point(t, 0, w)[1] > line
    })
}

/// Frame range kept after dropping neutral frames at both ends.
pub fn neutral_crop_range(seq: &PoseSequence, rest_threshold: f64) -> Range<usize> {
    let n = seq.frames();
    if n < 2 {
        return 0..n;
    }
    let flow = flow_series(seq, &[]).expect("at least two frames").values;
    let mut start = 0;
    while start < n - 1 && flow[start] < rest_threshold && wrists_lowered(seq, start) {
        start += 1;
    }
    if start == n - 1 {
        // nothing but rest
        return n / 2..n / 2 + 1;
    }
    let mut end = n - 1;
    while end > start && flow[end - 1] < rest_threshold && wrists_lowered(seq, end) {
        end -= 1;
    }
    start..end + 1
}

pub fn crop_neutral(seq: &PoseSequence, config: &StitchConfig) -> PoseSequence {
    seq.slice_frames(neutral_crop_range(seq, config.rest_threshold))
}

#[derive(Debug, Clone)]
pub struct Stitched {
    pub pose: PoseSequence,
    /// Frame ranges holding interpolated transition frames.
    pub transitions: Vec<Range<usize>>,
}

impl Stitched {
    /// Flow-transition ranges touched by each stitch: from the last frame
    /// of one clip to the first frame of the next.
    pub fn flow_zones(&self) -> Vec<Range<usize>> {
        self.transitions.iter().map(|r| r.start - 1..r.end).collect()
    }
}

fn interpolate(a: (&[f32], &[f32]), b: (&[f32], &[f32]), alpha: f64, points: &mut Vec<f32>, conf: &mut Vec<f32>) {
    points.extend(a.0.iter().zip(b.0).map(|(x, y)| (*x as f64 + (*y as f64 - *x as f64) * alpha) as f32));
    conf.extend(a.1.iter().zip(b.1).map(|(x, y)| x.min(*y)));
}

pub fn stitch(clips: &[PoseSequence], config: &StitchConfig) -> Result<Stitched> {
    config.validate()?;
    let first = clips.first().ok_or(Error::EmptyClipList)?;
    for (i, c) in clips.iter().enumerate().skip(1) {
        if c.header().components != first.header().components {
            return Err(Error::IncompatibleHeaders(format!("clip {i} has a different skeleton than clip 0")));
        }
        if c.persons() != first.persons() {
            return Err(Error::IncompatibleHeaders(format!(
                "clip {i} has {} persons, clip 0 has {}",
                c.persons(),
                first.persons()
            )));
        }
    }
    let cropped: Vec<PoseSequence> =
        clips.iter().map(|c| if config.crop_neutral { crop_neutral(c, config) } else { c.clone() }).collect();
    let prepared = if config.unify_appearance {
        let target = match &config.target_appearance {
            Some(t) => t.clone(),
            None => extract_appearance(&cropped[0], &config.policy)?,
        };
        cropped.iter().map(|c| transfer_appearance(c, &target, &config.policy)).collect::<Result<Vec<_>>>()?
    } else {
        cropped
    };

    let header = first.header().clone();
    let persons = first.persons();
    let transitions_n = config.transition_frames;
    let total: usize = prepared.iter().map(PoseSequence::frames).sum::<usize>() + transitions_n * (prepared.len() - 1);
    let mut data = Vec::with_capacity(total * persons * header.total_points() * header.dims());
    let mut conf = Vec::with_capacity(total * persons * header.total_points());
    let mut transitions = Vec::new();
    let mut frames = 0;
    for (i, clip) in prepared.iter().enumerate() {
        if i > 0 {
            let prev = &prepared[i - 1];
            let start = frames;
            for j in 1..=transitions_n {
                let alpha = j as f64 / (transitions_n + 1) as f64;
                for p in 0..persons {
                    interpolate(prev.frame(prev.frames() - 1, p), clip.frame(0, p), alpha, &mut data, &mut conf);
                }
            }
            frames += transitions_n;
            transitions.push(start..frames);
        }
        let (_, _, _, d, c) = clip.clone().into_parts();
        data.extend(d);
        conf.extend(c);
        frames += clip.frames();
    }
    debug_assert_eq!(frames, total);
    Ok(Stitched { pose: PoseSequence::from_raw(header, frames, persons, data, conf), transitions })
}
