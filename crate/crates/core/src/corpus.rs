//! Mean appearance frame over a corpus.
//!
//! Sums are kept in 2^-60 fixed point inside `i128`, so addition is exact:
//! any file order and any merge tree give bit-identical results, and the
//! memory footprint is one sum per coordinate regardless of corpus size.
//! Each product `confidence * coordinate` is exact in `f64` before
//! quantization, so the only rounding is a single 2^-61 step per term.

use std::path::{Path, PathBuf};

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::normalize::check_sequence_normalized;
use crate::pose::{AppearanceFrame, PoseHeader, PoseSequence, LEFT_SHOULDER, RIGHT_SHOULDER};

const FRAC_BITS: i32 = 60;
// |term| must stay below 2^40 so that 2^27 frames still fit in i128
const TERM_LIMIT: f64 = (1u64 << 40) as f64;

fn quantize(x: f64) -> Option<i128> {
    if !x.is_finite() || x.abs() >= TERM_LIMIT {
        return None;
    }
    Some((x * 2f64.powi(FRAC_BITS)).round() as i128)
}

fn dequantize(x: i128) -> f64 {
    x as f64 * 2f64.powi(-FRAC_BITS)
}

#[derive(Debug, Clone, PartialEq)]
pub struct MeanAccumulator {
    header: PoseHeader,
    sums: Vec<i128>,
    weights: Vec<i128>,
    frames_seen: u64,
}

impl MeanAccumulator {
    pub fn empty(header: &PoseHeader) -> Self {
        Self {
            sums: vec![0; header.total_points() * header.dims()],
            weights: vec![0; header.total_points()],
            frames_seen: 0,
            header: header.clone(),
        }
    }

    pub fn header(&self) -> &PoseHeader {
        &self.header
    }

    pub fn frames_seen(&self) -> u64 {
        self.frames_seen
    }

    pub fn weighted_sum(&self, keypoint: usize, dim: usize) -> f64 {
        dequantize(self.sums[keypoint * self.header.dims() + dim])
    }

    pub fn weight(&self, keypoint: usize) -> f64 {
        dequantize(self.weights[keypoint])
    }

    fn same_layout(&self, header: &PoseHeader) -> bool {
        self.header.components == header.components
    }

    /// Adds one frame of person 0 without any normalization check.
    pub fn accumulate_frame(&mut self, points: &[f32], confidence: &[f32]) -> Result<()> {
        let dims = self.header.dims();
        if confidence.len() != self.weights.len() || points.len() != self.sums.len() {
            return Err(Error::LayoutMismatch);
        }
        for (k, &c) in confidence.iter().enumerate() {
            if c <= 0.0 {
                continue;
            }
            let w = quantize(c as f64).ok_or(Error::AccumulatorOverflow(k))?;
            self.weights[k] = self.weights[k].checked_add(w).ok_or(Error::AccumulatorOverflow(k))?;
            for d in 0..dims {
                let i = k * dims + d;
                let term = quantize(c as f64 * points[i] as f64).ok_or(Error::AccumulatorOverflow(k))?;
                self.sums[i] = self.sums[i].checked_add(term).ok_or(Error::AccumulatorOverflow(k))?;
            }
        }
        self.frames_seen += 1;
        Ok(())
    }

    /// Adds every frame of a normalized sequence.
    pub fn accumulate(mut self, seq: &PoseSequence) -> Result<Self> {
        if !self.same_layout(seq.header()) {
            return Err(Error::LayoutMismatch);
        }
        check_sequence_normalized(seq, "corpus sequence")?;
        for t in 0..seq.frames() {
            let (points, conf) = seq.frame(t, 0);
            self.accumulate_frame(points, conf)?;
        }
        Ok(self)
    }

    pub fn merge(mut self, other: &MeanAccumulator) -> Result<Self> {
        if !self.same_layout(&other.header) {
            return Err(Error::LayoutMismatch);
        }
        for (k, (a, b)) in self.weights.iter_mut().zip(&other.weights).enumerate() {
            *a = a.checked_add(*b).ok_or(Error::AccumulatorOverflow(k))?;
        }
        let dims = self.header.dims();
        for (i, (a, b)) in self.sums.iter_mut().zip(&other.sums).enumerate() {
            *a = a.checked_add(*b).ok_or(Error::AccumulatorOverflow(i / dims))?;
        }
        self.frames_seen += other.frames_seen;
        Ok(self)
    }

    /// Per-keypoint weighted mean, re-normalized to unit shoulder width with
    /// the mid-shoulder point at the origin.
    pub fn finalize(&self) -> Result<AppearanceFrame> {
        if self.weights.iter().all(|&w| w <= 0) {
            return Err(Error::EmptyAccumulator);
        }
        let dims = self.header.dims();
        let mean: Vec<f64> = self
            .sums
            .iter()
            .enumerate()
            .map(|(i, &s)| {
                let w = self.weights[i / dims];
                if w > 0 {
                    s as f64 / w as f64
                } else {
                    0.0
                }
            })
            .collect();
        let l = self.header.require_body_point(LEFT_SHOULDER)?;
        let r = self.header.require_body_point(RIGHT_SHOULDER)?;
        if self.weights[l] <= 0 || self.weights[r] <= 0 {
            return Err(Error::NoConfidentShoulders);
        }
        let lp = &mean[l * dims..(l + 1) * dims];
        let rp = &mean[r * dims..(r + 1) * dims];
        let width = lp.iter().zip(rp).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt();
        if width.is_nan() || width < 1e-9 {
            return Err(Error::DegeneratePose(width));
        }
        let mid: Vec<f64> = lp.iter().zip(rp).map(|(a, b)| (a + b) / 2.0).collect();
        let points = mean
            .iter()
            .enumerate()
            .map(|(i, &v)| if self.weights[i / dims] > 0 { ((v - mid[i % dims]) / width) as f32 } else { 0.0 })
            .collect();
        let confidence = self.weights.iter().map(|&w| if w > 0 { 1.0 } else { 0.0 }).collect();
        AppearanceFrame::new(self.header.clone(), points, confidence)
    }
}

fn merge_opt(a: Option<MeanAccumulator>, b: Option<MeanAccumulator>) -> Result<Option<MeanAccumulator>> {
    match (a, b) {
        (Some(a), Some(b)) => Ok(Some(a.merge(&b)?)),
        (a, b) => Ok(a.or(b)),
    }
}

/// Accumulates `items` on `workers` threads. `load` must return a
/// normalized sequence. The result does not depend on `workers`.
pub fn accumulate_parallel<T, F>(items: &[T], workers: usize, load: F) -> Result<Option<MeanAccumulator>>
where
    T: Sync,
    F: Fn(&T) -> Result<PoseSequence> + Sync,
{
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| Error::Config(format!("thread pool: {e}")))?;
    pool.install(|| {
        items
            .par_iter()
            .try_fold(
                || None,
                |acc: Option<MeanAccumulator>, item| {
                    let seq = load(item)?;
                    let acc = acc.unwrap_or_else(|| MeanAccumulator::empty(seq.header()));
                    Ok(Some(acc.accumulate(&seq)?))
                },
            )
            .try_reduce(|| None, merge_opt)
    })
}

/// Pose file paths listed in a manifest: one per line, `#` starts a comment
/// line, blank lines are skipped. Relative paths resolve against `base`.
pub fn parse_manifest(text: &str, base: &Path) -> Vec<PathBuf> {
    text.lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(|l| {
            let p = Path::new(l);
            if p.is_absolute() {
                p.to_path_buf()
            } else {
                base.join(p)
            }
        })
        .collect()
}
