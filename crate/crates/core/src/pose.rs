//! Pose data model.
//!
//! Coordinates live in one flat `f32` buffer laid out as
//! `[frames][persons][keypoints][dims]` (C order) with a parallel confidence
//! buffer `[frames][persons][keypoints]`. A keypoint with confidence 0 is
//! missing: its coordinates carry no meaning and are ignored by every
//! statistic and by equality.

use std::collections::HashSet;
use std::fmt;
use std::ops::Range;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const BODY: &str = "BODY";
pub const FACE: &str = "FACE";
pub const LEFT_HAND: &str = "LEFT_HAND";
pub const RIGHT_HAND: &str = "RIGHT_HAND";

pub const LEFT_SHOULDER: &str = "LEFT_SHOULDER";
pub const RIGHT_SHOULDER: &str = "RIGHT_SHOULDER";
pub const LEFT_WRIST: &str = "LEFT_WRIST";
pub const RIGHT_WRIST: &str = "RIGHT_WRIST";

/// Landmarks every `BODY` component must carry.
pub const REQUIRED_BODY_LANDMARKS: [&str; 4] = [LEFT_SHOULDER, RIGHT_SHOULDER, LEFT_WRIST, RIGHT_WRIST];

pub fn is_hand(component: &str) -> bool {
    component == LEFT_HAND || component == RIGHT_HAND
}

/// Body landmark a hand component hangs from.
pub fn hand_wrist(component: &str) -> Option<&'static str> {
    match component {
        LEFT_HAND => Some(LEFT_WRIST),
        RIGHT_HAND => Some(RIGHT_WRIST),
        _ => None,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComponentDescriptor {
    pub name: String,
    pub point_names: Vec<String>,
    pub dims: u16,
}

impl ComponentDescriptor {
    pub fn new<S: Into<String>>(name: &str, point_names: impl IntoIterator<Item = S>, dims: u16) -> Self {
        Self { name: name.to_string(), point_names: point_names.into_iter().map(Into::into).collect(), dims }
    }

    pub fn point_index(&self, point: &str) -> Option<usize> {
        self.point_names.iter().position(|p| p == point)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PoseHeader {
    pub version: u16,
    pub fps: f32,
    pub components: Vec<ComponentDescriptor>,
}

impl PoseHeader {
    pub fn new(fps: f32, components: Vec<ComponentDescriptor>) -> Self {
        Self { version: 1, fps, components }
    }

    pub fn total_points(&self) -> usize {
        self.components.iter().map(|c| c.point_names.len()).sum()
    }

    /// Shared dimensionality; 0 for an empty header.
    pub fn dims(&self) -> usize {
        self.components.first().map_or(0, |c| c.dims as usize)
    }

    pub fn component(&self, name: &str) -> Option<&ComponentDescriptor> {
        self.components.iter().find(|c| c.name == name)
    }

    /// Global keypoint range covered by the named component.
    pub fn component_range(&self, name: &str) -> Option<Range<usize>> {
        let mut start = 0;
        for c in &self.components {
            let end = start + c.point_names.len();
            if c.name == name {
                return Some(start..end);
            }
            start = end;
        }
        None
    }

    /// Global keypoint index of `point` inside `component`.
    pub fn point_index(&self, component: &str, point: &str) -> Option<usize> {
        let range = self.component_range(component)?;
        let local = self.component(component)?.point_index(point)?;
        Some(range.start + local)
    }

    pub fn body_point(&self, point: &str) -> Option<usize> {
        self.point_index(BODY, point)
    }

    pub(crate) fn require_body_point(&self, point: &str) -> Result<usize> {
        self.body_point(point)
            .ok_or_else(|| Error::MissingLandmark { component: BODY.to_string(), landmark: point.to_string() })
    }

    /// Header-level invariant violations.
    pub fn violations(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        if !(self.fps.is_finite() && self.fps > 0.0) {
            out.push(Violation::header("fps", format!("must be finite and > 0, got {}", self.fps)));
        }
        if self.components.is_empty() {
            out.push(Violation::header("components", "empty component list"));
            return out;
        }
        let mut names = HashSet::new();
        let dims = self.components[0].dims;
        for c in &self.components {
            if c.name.is_empty() {
                out.push(Violation::header("components", "empty component name"));
            } else if !names.insert(c.name.as_str()) {
                out.push(Violation::header("components", format!("duplicate component {:?}", c.name)));
            }
            if c.dims != 2 && c.dims != 3 {
                out.push(Violation::header("dims", format!("{:?} has dims {}, expected 2 or 3", c.name, c.dims)));
            } else if c.dims != dims {
                out.push(Violation::header("dims", format!("{:?} has dims {}, others {}", c.name, c.dims, dims)));
            }
            let mut points = HashSet::new();
            for p in &c.point_names {
                if !points.insert(p.as_str()) {
                    out.push(Violation::header("point_names", format!("duplicate point {p:?} in {:?}", c.name)));
                }
            }
            if c.name == BODY {
                for required in REQUIRED_BODY_LANDMARKS {
                    if c.point_index(required).is_none() {
                        out.push(Violation::header("point_names", format!("BODY lacks {required}")));
                    }
                }
            }
        }
        if self.total_points() == 0 {
            out.push(Violation::header("components", "total keypoint count is 0"));
        }
        out
    }
}

/// One broken invariant, naming the offending field and frame.
#[derive(Debug, Clone, PartialEq)]
pub struct Violation {
    pub field: String,
    pub frame: Option<usize>,
    pub message: String,
}

impl Violation {
    fn header(field: &str, message: impl Into<String>) -> Self {
        Self { field: field.to_string(), frame: None, message: message.into() }
    }

    fn at(field: &str, frame: usize, message: impl Into<String>) -> Self {
        Self { field: field.to_string(), frame: Some(frame), message: message.into() }
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.frame {
            Some(frame) => write!(f, "{} at frame {}: {}", self.field, frame, self.message),
            None => write!(f, "{}: {}", self.field, self.message),
        }
    }
}

#[derive(Debug, Clone)]
pub struct PoseSequence {
    header: PoseHeader,
    frames: usize,
    persons: usize,
    data: Vec<f32>,
    confidence: Vec<f32>,
}

impl PoseSequence {
    /// Builds a sequence and checks every invariant.
    pub fn new(
        header: PoseHeader,
        frames: usize,
        persons: usize,
        data: Vec<f32>,
        confidence: Vec<f32>,
    ) -> Result<Self> {
        let seq = Self::from_raw(header, frames, persons, data, confidence);
        let violations = validate(&seq);
        if violations.is_empty() {
            Ok(seq)
        } else {
            Err(Error::Invalid(violations))
        }
    }

    /// Builds a sequence without checking it. Run [`validate`] before use.
    pub fn from_raw(header: PoseHeader, frames: usize, persons: usize, data: Vec<f32>, confidence: Vec<f32>) -> Self {
        Self { header, frames, persons, data, confidence }
    }

    /// All-zero, fully confident sequence.
    pub fn zeros(header: PoseHeader, frames: usize, persons: usize) -> Self {
        let kp = header.total_points();
        let dims = header.dims();
        Self {
            data: vec![0.0; frames * persons * kp * dims],
            confidence: vec![1.0; frames * persons * kp],
            header,
            frames,
            persons,
        }
    }

    pub fn header(&self) -> &PoseHeader {
        &self.header
    }

    pub fn frames(&self) -> usize {
        self.frames
    }

    pub fn persons(&self) -> usize {
        self.persons
    }

    pub fn keypoints(&self) -> usize {
        self.header.total_points()
    }

    pub fn dims(&self) -> usize {
        self.header.dims()
    }

    pub fn data(&self) -> &[f32] {
        &self.data
    }

    pub fn confidence(&self) -> &[f32] {
        &self.confidence
    }

    fn conf_index(&self, frame: usize, person: usize, keypoint: usize) -> usize {
        (frame * self.persons + person) * self.keypoints() + keypoint
    }

    pub fn point(&self, frame: usize, person: usize, keypoint: usize) -> &[f32] {
        let dims = self.dims();
        let start = self.conf_index(frame, person, keypoint) * dims;
        &self.data[start..start + dims]
    }

    pub fn conf(&self, frame: usize, person: usize, keypoint: usize) -> f32 {
        self.confidence[self.conf_index(frame, person, keypoint)]
    }

    /// Coordinates and confidences of one person in one frame.
    pub fn frame(&self, frame: usize, person: usize) -> (&[f32], &[f32]) {
        let kp = self.keypoints();
        let c = self.conf_index(frame, person, 0);
        (&self.data[c * self.dims()..(c + kp) * self.dims()], &self.confidence[c..c + kp])
    }

    pub(crate) fn frame_mut(&mut self, frame: usize, person: usize) -> (&mut [f32], &mut [f32]) {
        let kp = self.keypoints();
        let dims = self.dims();
        let c = self.conf_index(frame, person, 0);
        (&mut self.data[c * dims..(c + kp) * dims], &mut self.confidence[c..c + kp])
    }

    pub(crate) fn into_parts(self) -> (PoseHeader, usize, usize, Vec<f32>, Vec<f32>) {
        (self.header, self.frames, self.persons, self.data, self.confidence)
    }

    /// Copy of the frames in `range`.
    pub fn slice_frames(&self, range: Range<usize>) -> PoseSequence {
        let per_frame = self.persons * self.keypoints();
        let dims = self.dims();
        Self {
            header: self.header.clone(),
            frames: range.len(),
            persons: self.persons,
            data: self.data[range.start * per_frame * dims..range.end * per_frame * dims].to_vec(),
            confidence: self.confidence[range.start * per_frame..range.end * per_frame].to_vec(),
        }
    }

    /// Same sequence with coordinates of zero-confidence keypoints set to 0.0.
    pub fn canonicalized(&self) -> PoseSequence {
        let mut out = self.clone();
        let dims = out.dims();
        for (i, &c) in self.confidence.iter().enumerate() {
            if c == 0.0 {
                out.data[i * dims..(i + 1) * dims].fill(0.0);
            }
        }
        out
    }

    /// Maps every confident coordinate through `f`.
    pub fn map_coords(&self, mut f: impl FnMut(usize, f32) -> f32) -> PoseSequence {
        let dims = self.dims();
        let mut out = self.clone();
        for (i, v) in out.data.iter_mut().enumerate() {
            *v = f(i % dims, *v);
        }
        out
    }
}

/// Bitwise equality on confidences and on coordinates of confident keypoints;
/// coordinates of missing keypoints are ignored.
impl PartialEq for PoseSequence {
    fn eq(&self, other: &Self) -> bool {
        if self.header != other.header
            || self.frames != other.frames
            || self.persons != other.persons
            || self.data.len() != other.data.len()
            || self.confidence.len() != other.confidence.len()
        {
            return false;
        }
        let dims = self.dims();
        self.confidence.iter().zip(&other.confidence).enumerate().all(|(i, (a, b))| {
            a.to_bits() == b.to_bits()
                && (*a == 0.0
                    || self.data[i * dims..(i + 1) * dims]
                        .iter()
                        .zip(&other.data[i * dims..(i + 1) * dims])
                        .all(|(x, y)| x.to_bits() == y.to_bits()))
        })
    }
}

/// Lists every broken invariant of `seq`; empty iff the sequence is valid.
pub fn validate(seq: &PoseSequence) -> Vec<Violation> {
    let mut out = seq.header.violations();
    if seq.frames == 0 {
        out.push(Violation::header("frames", "sequence has no frames"));
    }
    if seq.persons == 0 {
        out.push(Violation::header("persons", "sequence has no persons"));
    }
    let kp = seq.header.total_points();
    let dims = seq.header.dims();
    let expected_conf = seq.frames * seq.persons * kp;
    let mut shapes_ok = true;
    if seq.data.len() != expected_conf * dims {
        out.push(Violation::header(
            "data",
            format!(
                "shape mismatch: header implies {} values ({} keypoints x {} dims x {} frames x {} persons), data has {}",
                expected_conf * dims,
                kp,
                dims,
                seq.frames,
                seq.persons,
                seq.data.len()
            ),
        ));
        shapes_ok = false;
    }
    if seq.confidence.len() != expected_conf {
        out.push(Violation::header(
            "confidence",
            format!("shape mismatch: header implies {expected_conf} values, confidence has {}", seq.confidence.len()),
        ));
        shapes_ok = false;
    }
    if !shapes_ok || kp == 0 || dims == 0 {
        return out;
    }
    let per_frame = seq.persons * kp;
    for (i, &c) in seq.confidence.iter().enumerate() {
        let frame = i / per_frame;
        let keypoint = i % kp;
        if !(0.0..=1.0).contains(&c) {
            out.push(Violation::at(
                "confidence",
                frame,
                format!("keypoint {keypoint} has confidence {c} outside [0, 1]"),
            ));
        } else if c > 0.0 && seq.data[i * dims..(i + 1) * dims].iter().any(|v| !v.is_finite()) {
            out.push(Violation::at(
                "data",
                frame,
                format!("keypoint {keypoint} is confident but has a non-finite coordinate"),
            ));
        }
    }
    out
}

/// Copy of `seq` restricted to the named components, kept in header order.
pub fn select_components(seq: &PoseSequence, names: &[&str]) -> Result<PoseSequence> {
    for name in names {
        if seq.header.component(name).is_none() {
            return Err(Error::UnknownComponent(name.to_string()));
        }
    }
    let mut ranges = Vec::new();
    let mut components = Vec::new();
    for c in &seq.header.components {
        if names.contains(&c.name.as_str()) {
            ranges.push(seq.header.component_range(&c.name).expect("component exists"));
            components.push(c.clone());
        }
    }
    let header = PoseHeader { version: seq.header.version, fps: seq.header.fps, components };
    let dims = seq.dims();
    let mut data = Vec::with_capacity(seq.frames * seq.persons * header.total_points() * dims);
    let mut confidence = Vec::with_capacity(seq.frames * seq.persons * header.total_points());
    for f in 0..seq.frames {
        for p in 0..seq.persons {
            let (points, conf) = seq.frame(f, p);
            for r in &ranges {
                data.extend_from_slice(&points[r.start * dims..r.end * dims]);
                confidence.extend_from_slice(&conf[r.clone()]);
            }
        }
    }
    Ok(PoseSequence::from_raw(header, seq.frames, seq.persons, data, confidence))
}

/// A single reference frame of one signer: the appearance.
#[derive(Debug, Clone, PartialEq)]
pub struct AppearanceFrame {
    header: PoseHeader,
    points: Vec<f32>,
    confidence: Vec<f32>,
}

impl AppearanceFrame {
    pub fn new(header: PoseHeader, points: Vec<f32>, confidence: Vec<f32>) -> Result<Self> {
        let seq = PoseSequence::new(header, 1, 1, points, confidence)?;
        Ok(Self::from_sequence_frame(&seq, 0))
    }

    /// Person 0 of `frame`. Panics if `frame` is out of range.
    pub fn from_sequence_frame(seq: &PoseSequence, frame: usize) -> Self {
        let (points, conf) = seq.frame(frame, 0);
        Self { header: seq.header.clone(), points: points.to_vec(), confidence: conf.to_vec() }
    }

    pub fn header(&self) -> &PoseHeader {
        &self.header
    }

    pub fn points(&self) -> &[f32] {
        &self.points
    }

    pub fn confidence(&self) -> &[f32] {
        &self.confidence
    }

    pub fn point(&self, keypoint: usize) -> &[f32] {
        let dims = self.header.dims();
        &self.points[keypoint * dims..(keypoint + 1) * dims]
    }

    /// One-frame, one-person sequence holding this frame.
    pub fn to_sequence(&self) -> PoseSequence {
        PoseSequence::from_raw(self.header.clone(), 1, 1, self.points.clone(), self.confidence.clone())
    }

    /// Distance between the shoulders, if both are confident.
    pub fn shoulder_width(&self) -> Option<f64> {
        let l = self.header.body_point(LEFT_SHOULDER)?;
        let r = self.header.body_point(RIGHT_SHOULDER)?;
        if self.confidence[l] > 0.0 && self.confidence[r] > 0.0 {
            Some(distance(self.point(l), self.point(r)))
        } else {
            None
        }
    }
}

pub(crate) fn distance(a: &[f32], b: &[f32]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| {
            let d = *x as f64 - *y as f64;
            d * d
        })
        .sum::<f64>()
        .sqrt()
}
