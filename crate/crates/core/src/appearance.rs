//! Appearance extraction, transfer and removal.
//!
//! For every transferred keypoint `k` and frame `t`:
//!
//! ```text
//! out[t][k] = source[t][k] - source_appearance[k] + target_appearance[k]
//! ```
//!
//! Each keypoint receives a constant offset, so frame-to-frame motion is
//! untouched. Hands never receive the per-keypoint offset; under
//! [`HandAnchor::RigidFollowWrist`] each hand is translated as a whole by the
//! offset its body wrist received, which keeps hand shape intact while the
//! hand stays attached to the arm.

use crate::error::{Error, Result};
use crate::normalize::{check_frame_normalized, check_sequence_normalized};
use crate::pose::{hand_wrist, is_hand, AppearanceFrame, PoseHeader, PoseSequence, BODY, FACE};

/// Fraction of body keypoints that must be confident for
/// [`AppearanceSelector::FirstConfidentFrame`] to accept a frame.
pub const CONFIDENT_FRAME_FRACTION: f64 = 0.9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum HandAnchor {
    /// Translate each hand by its wrist's displacement.
    #[default]
    RigidFollowWrist,
    /// Leave hand coordinates exactly as in the source.
    PassThrough,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum AppearanceSelector {
    #[default]
    FirstFrame,
    /// First frame in which at least 90% of the body keypoints are confident.
    FirstConfidentFrame,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TransferPolicy {
    transferred_components: Vec<String>,
    pub hand_anchor: HandAnchor,
    pub selector: AppearanceSelector,
}

impl Default for TransferPolicy {
    fn default() -> Self {
        Self {
            transferred_components: vec![BODY.to_string(), FACE.to_string()],
            hand_anchor: HandAnchor::default(),
            selector: AppearanceSelector::default(),
        }
    }
}

impl TransferPolicy {
    pub fn new(components: &[&str], hand_anchor: HandAnchor, selector: AppearanceSelector) -> Result<Self> {
        if let Some(hand) = components.iter().find(|c| is_hand(c)) {
            return Err(Error::HandInPolicy(hand.to_string()));
        }
        Ok(Self { transferred_components: components.iter().map(|c| c.to_string()).collect(), hand_anchor, selector })
    }

    pub fn with_hand_anchor(mut self, anchor: HandAnchor) -> Self {
        self.hand_anchor = anchor;
        self
    }

    pub fn with_selector(mut self, selector: AppearanceSelector) -> Self {
        self.selector = selector;
        self
    }

    pub fn transferred_components(&self) -> &[String] {
        &self.transferred_components
    }

    pub fn transfers(&self, component: &str) -> bool {
        self.transferred_components.iter().any(|c| c == component)
    }
}

/// Index of the frame that carries the signer's appearance.
pub fn appearance_frame_index(seq: &PoseSequence, selector: AppearanceSelector) -> Result<usize> {
    match selector {
        AppearanceSelector::FirstFrame => Ok(0),
        AppearanceSelector::FirstConfidentFrame => {
            let body = seq.header().component_range(BODY).ok_or_else(|| Error::UnknownComponent(BODY.to_string()))?;
            let needed = (body.len() as f64 * CONFIDENT_FRAME_FRACTION).ceil() as usize;
            (0..seq.frames())
                .find(|&t| {
                    let conf = seq.frame(t, 0).1;
                    conf[body.clone()].iter().filter(|&&c| c > 0.0).count() >= needed.max(1)
                })
                .ok_or(Error::NoConfidentFrame)
        }
    }
}

/// The signer's appearance: person 0 of the selected frame.
pub fn extract_appearance(seq: &PoseSequence, policy: &TransferPolicy) -> Result<AppearanceFrame> {
    let frame = appearance_frame_index(seq, policy.selector)?;
    Ok(AppearanceFrame::from_sequence_frame(seq, frame))
}

/// For every source keypoint, the matching keypoint index in `target` when
/// the keypoint belongs to a transferred component.
fn transferred_mapping(
    source: &PoseHeader,
    target: &PoseHeader,
    policy: &TransferPolicy,
) -> Result<Vec<Option<usize>>> {
    if source.dims() != target.dims() {
        return Err(Error::IncompatibleHeaders(format!(
            "source has {} dims, appearance has {}",
            source.dims(),
            target.dims()
        )));
    }
    let mut mapping = vec![None; source.total_points()];
    for name in policy.transferred_components() {
        // a component neither side has is simply not part of this layout
        if source.component(name).is_none() && target.component(name).is_none() {
            continue;
        }
        let Some(src) = source.component(name) else {
            return Err(Error::IncompatibleHeaders(format!("source lacks component {name}")));
        };
        let Some(tgt) = target.component(name) else {
            return Err(Error::IncompatibleHeaders(format!("appearance lacks component {name}")));
        };
        if src.point_names != tgt.point_names {
            return Err(Error::IncompatibleHeaders(format!("component {name} has different landmarks")));
        }
        let s = source.component_range(name).expect("present");
        let t = target.component_range(name).expect("present");
        for (i, slot) in mapping[s].iter_mut().enumerate() {
            *slot = Some(t.start + i);
        }
    }
    Ok(mapping)
}

/// Replaces the source signer's appearance with `target`.
///
/// Both inputs must be shoulder-width normalized. Keypoints missing from
/// either appearance frame come out with confidence 0 in every frame.
pub fn transfer_appearance(
    source: &PoseSequence,
    target: &AppearanceFrame,
    policy: &TransferPolicy,
) -> Result<PoseSequence> {
    let mapping = transferred_mapping(source.header(), target.header(), policy)?;
    check_sequence_normalized(source, "source sequence")?;
    check_frame_normalized(target, "target appearance")?;
    let own = extract_appearance(source, policy)?;
    let header = source.header();
    let dims = source.dims();

    // offset[k] = target[k] - own[k], None where either side is missing
    let mut offsets: Vec<Option<Vec<f64>>> = vec![None; mapping.len()];
    for (k, m) in mapping.iter().enumerate() {
        if let Some(tk) = *m {
            if own.confidence()[k] > 0.0 && target.confidence()[tk] > 0.0 {
                offsets[k] =
                    Some(own.point(k).iter().zip(target.point(tk)).map(|(a, b)| *b as f64 - *a as f64).collect());
            }
        }
    }
    // min(own, target) confidence per transferred keypoint
    let appearance_conf: Vec<f32> = mapping
        .iter()
        .enumerate()
        .map(|(k, m)| m.map_or(1.0, |tk| own.confidence()[k].min(target.confidence()[tk])))
        .collect();

    let mut hand_shift: Vec<(std::ops::Range<usize>, Vec<f64>)> = Vec::new();
    if policy.hand_anchor == HandAnchor::RigidFollowWrist {
        for c in &header.components {
            let Some(wrist) = hand_wrist(&c.name) else { continue };
            let Some(w) = header.body_point(wrist) else { continue };
            // wrist missing from an appearance frame: the hand stays where it was
            if let Some(shift) = &offsets[w] {
                hand_shift.push((header.component_range(&c.name).expect("present"), shift.clone()));
            }
        }
    }

    let mut out = source.clone();
    for t in 0..source.frames() {
        let (src_points, src_conf) = source.frame(t, 0);
        let (points, conf) = out.frame_mut(t, 0);
        for k in 0..mapping.len() {
            if mapping[k].is_none() {
                continue;
            }
            let p = k * dims..(k + 1) * dims;
            match &offsets[k] {
                Some(off) => {
                    for ((o, s), d) in points[p.clone()].iter_mut().zip(&src_points[p]).zip(off) {
                        *o = (*s as f64 + d) as f32;
                    }
                    conf[k] = src_conf[k].min(appearance_conf[k]);
                }
                None => conf[k] = 0.0,
            }
        }
        for (range, shift) in &hand_shift {
            for k in range.clone() {
                let p = k * dims..(k + 1) * dims;
                for ((o, s), d) in points[p.clone()].iter_mut().zip(&src_points[p]).zip(shift) {
                    *o = (*s as f64 + d) as f32;
                }
            }
        }
    }
    Ok(out)
}

/// Anonymizes `seq` by transferring it to a mean appearance.
pub fn remove_appearance(seq: &PoseSequence, mean: &AppearanceFrame, policy: &TransferPolicy) -> Result<PoseSequence> {
    transfer_appearance(seq, mean, policy)
}
