//! Appearance transfer for skeletal sign language poses.
//!
//! A pose sequence is split into a static *appearance* (the signer's body
//! proportions and resting face, taken from a reference frame) and the
//! *sign content* (everything that moves). Replacing the appearance is a
//! per-keypoint constant offset:
//!
//! ```text
//! out[t][k] = source[t][k] - source_appearance[k] + target_appearance[k]
//! ```
//!
//! applied in a shoulder-width normalized coordinate frame, with the hands
//! excluded from the offset and re-attached at the wrists. Transferring to a
//! corpus-wide mean frame anonymizes a sequence; transferring every clip of a
//! sentence to one appearance makes stitched sequences smoother.
//!
//! Modules:
//! - [`pose`]: the data model and its invariants.
//! - [`io`]: the binary `.pose` container, JSON export and landmark remapping.
//! - [`normalize`]: shoulder-width scale and mid-shoulder translation.
//! - [`appearance`]: extraction, transfer and removal of appearance.
//! - [`corpus`]: streaming, parallel mean-frame computation.
//! - [`stitch`]: neutral-posture cropping and clip concatenation.
//! - [`metrics`]: keypoint-level optical flow and stitch-zone reports.
//! - [`eval`]: synthetic privacy/utility harness with centroid classifiers.
//! - [`cli`]: the `pose-appearance` command line tool.

pub mod appearance;
pub mod cli;
pub mod corpus;
mod error;
pub mod eval;
pub mod io;
pub mod metrics;
pub mod normalize;
pub mod pose;
pub mod skeleton;
pub mod stitch;

pub use appearance::{
    extract_appearance, remove_appearance, transfer_appearance, AppearanceSelector, HandAnchor, TransferPolicy,
};
pub use corpus::MeanAccumulator;
pub use error::{Error, Result};
pub use metrics::{flow_auc, flow_series, stitch_zone_report, FlowSeries};
pub use normalize::{apply_normalization, compute_normalization, invert_normalization, NormalizationParams};
pub use pose::{
    select_components, validate, AppearanceFrame, ComponentDescriptor, PoseHeader, PoseSequence, Violation,
};
