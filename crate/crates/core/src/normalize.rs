//! Shoulder-width normalization.
//!
//! `x -> x * scale + offset`, uniform over all dimensions, so ratios of
//! distances are preserved. After normalization the mean shoulder width is 1
//! and the mid-shoulder point of the reference frame sits at the origin.

use crate::error::{Error, Result};
use crate::pose::{distance, AppearanceFrame, PoseSequence, LEFT_SHOULDER, RIGHT_SHOULDER};

/// Deviation from unit shoulder width tolerated by operations that require
/// normalized input.
pub const NORMALIZED_TOLERANCE: f64 = 0.1;

#[derive(Debug, Clone, PartialEq)]
pub struct NormalizationParams {
    pub scale: f64,
    pub offset: Vec<f64>,
}

impl NormalizationParams {
    pub fn identity(dims: usize) -> Self {
        Self { scale: 1.0, offset: vec![0.0; dims] }
    }

    pub fn new(scale: f64, offset: Vec<f64>) -> Result<Self> {
        if !(scale.is_finite() && scale > 0.0) {
            return Err(Error::Config(format!("normalization scale must be finite and > 0, got {scale}")));
        }
        Ok(Self { scale, offset })
    }
}

/// Which frames feed the scale statistic.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ScaleStatistic {
    /// Confidence-weighted mean over every frame with both shoulders present.
    #[default]
    AllFrames,
    /// Only the first frame with both shoulders present.
    FirstFrame,
}

struct ShoulderStats {
    mean_width: f64,
    first_frame: usize,
}

fn shoulder_stats(seq: &PoseSequence, statistic: ScaleStatistic) -> Result<ShoulderStats> {
    let header = seq.header();
    let l = header.require_body_point(LEFT_SHOULDER)?;
    let r = header.require_body_point(RIGHT_SHOULDER)?;
    let mut first = None;
    let (mut sum, mut weight) = (0.0f64, 0.0f64);
    for t in 0..seq.frames() {
        let (cl, cr) = (seq.conf(t, 0, l), seq.conf(t, 0, r));
        if cl > 0.0 && cr > 0.0 {
            first.get_or_insert(t);
            let w = cl as f64 * cr as f64;
            sum += w * distance(seq.point(t, 0, l), seq.point(t, 0, r));
            weight += w;
            if statistic == ScaleStatistic::FirstFrame {
                break;
            }
        }
    }
    let first_frame = first.ok_or(Error::NoConfidentShoulders)?;
    Ok(ShoulderStats { mean_width: sum / weight, first_frame })
}

/// Confidence-weighted mean shoulder width of person 0.
pub fn mean_shoulder_width(seq: &PoseSequence) -> Result<f64> {
    Ok(shoulder_stats(seq, ScaleStatistic::AllFrames)?.mean_width)
}

pub fn compute_normalization(seq: &PoseSequence) -> Result<NormalizationParams> {
    compute_normalization_with(seq, ScaleStatistic::AllFrames)
}

pub fn compute_normalization_with(seq: &PoseSequence, statistic: ScaleStatistic) -> Result<NormalizationParams> {
    let stats = shoulder_stats(seq, statistic)?;
    if stats.mean_width.is_nan() || stats.mean_width < 1e-9 {
        return Err(Error::DegeneratePose(stats.mean_width));
    }
    let scale = 1.0 / stats.mean_width;
    let header = seq.header();
    let l = seq.point(stats.first_frame, 0, header.require_body_point(LEFT_SHOULDER)?);
    let r = seq.point(stats.first_frame, 0, header.require_body_point(RIGHT_SHOULDER)?);
    let offset = l.iter().zip(r).map(|(a, b)| -(*a as f64 + *b as f64) / 2.0 * scale).collect();
    Ok(NormalizationParams { scale, offset })
}

pub fn apply_normalization(seq: &PoseSequence, params: &NormalizationParams) -> PoseSequence {
    seq.map_coords(|d, v| (v as f64 * params.scale + params.offset[d]) as f32)
}

pub fn invert_normalization(params: &NormalizationParams) -> NormalizationParams {
    NormalizationParams { scale: 1.0 / params.scale, offset: params.offset.iter().map(|o| -o / params.scale).collect() }
}

/// Normalizes with parameters computed from the sequence itself.
pub fn normalize(seq: &PoseSequence) -> Result<(PoseSequence, NormalizationParams)> {
    let params = compute_normalization(seq)?;
    Ok((apply_normalization(seq, &params), params))
}

pub(crate) fn check_sequence_normalized(seq: &PoseSequence, what: &'static str) -> Result<()> {
    check_width(mean_shoulder_width(seq)?, what)
}

pub(crate) fn check_frame_normalized(frame: &AppearanceFrame, what: &'static str) -> Result<()> {
    frame.header().require_body_point(LEFT_SHOULDER)?;
    frame.header().require_body_point(RIGHT_SHOULDER)?;
    check_width(frame.shoulder_width().ok_or(Error::NoConfidentShoulders)?, what)
}

fn check_width(width: f64, what: &'static str) -> Result<()> {
    let deviation = (width - 1.0).abs();
    if deviation > NORMALIZED_TOLERANCE || !deviation.is_finite() {
        return Err(Error::Unnormalized { what, width, deviation });
    }
    Ok(())
}
