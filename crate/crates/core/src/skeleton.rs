//! Canonical Holistic-style landmark layouts and a neutral rest posture.
//!
//! Coordinates follow the image convention: x grows to the viewer's right
//! (the signer's left), y grows downwards. The rest posture is already in
//! normalized units: shoulders at (+-0.5, 0), so the shoulder width is 1 and
//! the mid-shoulder point is the origin.

use crate::pose::{AppearanceFrame, ComponentDescriptor, PoseHeader, BODY, FACE, LEFT_HAND, RIGHT_HAND};

pub const BODY_POINTS: [&str; 33] = [
    "NOSE",
    "LEFT_EYE_INNER",
    "LEFT_EYE",
    "LEFT_EYE_OUTER",
    "RIGHT_EYE_INNER",
    "RIGHT_EYE",
    "RIGHT_EYE_OUTER",
    "LEFT_EAR",
    "RIGHT_EAR",
    "MOUTH_LEFT",
    "MOUTH_RIGHT",
    "LEFT_SHOULDER",
    "RIGHT_SHOULDER",
    "LEFT_ELBOW",
    "RIGHT_ELBOW",
    "LEFT_WRIST",
    "RIGHT_WRIST",
    "LEFT_PINKY",
    "RIGHT_PINKY",
    "LEFT_INDEX",
    "RIGHT_INDEX",
    "LEFT_THUMB",
    "RIGHT_THUMB",
    "LEFT_HIP",
    "RIGHT_HIP",
    "LEFT_KNEE",
    "RIGHT_KNEE",
    "LEFT_ANKLE",
    "RIGHT_ANKLE",
    "LEFT_HEEL",
    "RIGHT_HEEL",
    "LEFT_FOOT_INDEX",
    "RIGHT_FOOT_INDEX",
];

pub const FACE_POINTS: [&str; 15] = [
    "FOREHEAD",
    "CHIN",
    "LEFT_BROW",
    "RIGHT_BROW",
    "LEFT_EYE_INNER",
    "LEFT_EYE_OUTER",
    "RIGHT_EYE_INNER",
    "RIGHT_EYE_OUTER",
    "NOSE_TIP",
    "UPPER_LIP",
    "LOWER_LIP",
    "MOUTH_LEFT",
    "MOUTH_RIGHT",
    "LEFT_CHEEK",
    "RIGHT_CHEEK",
];

pub const HAND_POINTS: [&str; 21] = [
    "WRIST",
    "THUMB_CMC",
    "THUMB_MCP",
    "THUMB_IP",
    "THUMB_TIP",
    "INDEX_FINGER_MCP",
    "INDEX_FINGER_PIP",
    "INDEX_FINGER_DIP",
    "INDEX_FINGER_TIP",
    "MIDDLE_FINGER_MCP",
    "MIDDLE_FINGER_PIP",
    "MIDDLE_FINGER_DIP",
    "MIDDLE_FINGER_TIP",
    "RING_FINGER_MCP",
    "RING_FINGER_PIP",
    "RING_FINGER_DIP",
    "RING_FINGER_TIP",
    "PINKY_MCP",
    "PINKY_PIP",
    "PINKY_DIP",
    "PINKY_TIP",
];

const COMPACT_BODY: [&str; 9] = [
    "NOSE",
    "LEFT_SHOULDER",
    "RIGHT_SHOULDER",
    "LEFT_ELBOW",
    "RIGHT_ELBOW",
    "LEFT_WRIST",
    "RIGHT_WRIST",
    "LEFT_HIP",
    "RIGHT_HIP",
];
const COMPACT_FACE: [&str; 5] = ["FOREHEAD", "CHIN", "LEFT_EYE_OUTER", "RIGHT_EYE_OUTER", "NOSE_TIP"];
const COMPACT_HAND: [&str; 5] = ["WRIST", "THUMB_TIP", "INDEX_FINGER_TIP", "MIDDLE_FINGER_TIP", "PINKY_TIP"];

pub const DEFAULT_FPS: f32 = 25.0;

/// Body, face and both hands: 33 + 15 + 21 + 21 keypoints.
pub fn holistic(dims: u16) -> PoseHeader {
    PoseHeader::new(
        DEFAULT_FPS,
        vec![
            ComponentDescriptor::new(BODY, BODY_POINTS, dims),
            ComponentDescriptor::new(FACE, FACE_POINTS, dims),
            ComponentDescriptor::new(LEFT_HAND, HAND_POINTS, dims),
            ComponentDescriptor::new(RIGHT_HAND, HAND_POINTS, dims),
        ],
    )
}

/// Body and hands only: 75 keypoints.
pub fn holistic_no_face(dims: u16) -> PoseHeader {
    PoseHeader::new(
        DEFAULT_FPS,
        vec![
            ComponentDescriptor::new(BODY, BODY_POINTS, dims),
            ComponentDescriptor::new(LEFT_HAND, HAND_POINTS, dims),
            ComponentDescriptor::new(RIGHT_HAND, HAND_POINTS, dims),
        ],
    )
}

/// Small four-component layout (9 + 5 + 5 + 5 keypoints) for tests and quick experiments.
pub fn compact(dims: u16) -> PoseHeader {
    PoseHeader::new(
        DEFAULT_FPS,
        vec![
            ComponentDescriptor::new(BODY, COMPACT_BODY, dims),
            ComponentDescriptor::new(FACE, COMPACT_FACE, dims),
            ComponentDescriptor::new(LEFT_HAND, COMPACT_HAND, dims),
            ComponentDescriptor::new(RIGHT_HAND, COMPACT_HAND, dims),
        ],
    )
}

/// Left-side rest position of a body landmark; right-side names are mirrored.
fn body_rest(point: &str) -> Option<[f32; 2]> {
    let (mirror, base) = if let Some(rest) = point.strip_prefix("RIGHT_") {
        (true, format!("LEFT_{rest}"))
    } else if let Some(rest) = point.strip_suffix("_RIGHT") {
        (true, format!("{rest}_LEFT"))
    } else {
        (false, point.to_string())
    };
    let p = match base.as_str() {
        "NOSE" => [0.0, -0.75],
        "LEFT_EYE_INNER" => [0.04, -0.85],
        "LEFT_EYE" => [0.07, -0.86],
        "LEFT_EYE_OUTER" => [0.10, -0.86],
        "LEFT_EAR" => [0.17, -0.80],
        "MOUTH_LEFT" => [0.05, -0.66],
        "LEFT_SHOULDER" => [0.5, 0.0],
        "LEFT_ELBOW" => [0.6, 0.6],
        "LEFT_WRIST" => [0.35, 1.1],
        "LEFT_PINKY" => [0.33, 1.22],
        "LEFT_INDEX" => [0.30, 1.23],
        "LEFT_THUMB" => [0.28, 1.18],
        "LEFT_HIP" => [0.35, 1.3],
        "LEFT_KNEE" => [0.35, 2.1],
        "LEFT_ANKLE" => [0.35, 2.9],
        "LEFT_HEEL" => [0.35, 3.0],
        "LEFT_FOOT_INDEX" => [0.38, 3.05],
        _ => return None,
    };
    Some(if mirror { [-p[0], p[1]] } else { p })
}

fn face_rest(point: &str) -> Option<[f32; 2]> {
    let p = match point {
        "FOREHEAD" => [0.0, -1.05],
        "CHIN" => [0.0, -0.5],
        "LEFT_BROW" => [0.08, -0.93],
        "RIGHT_BROW" => [-0.08, -0.93],
        "LEFT_EYE_INNER" => [0.04, -0.85],
        "LEFT_EYE_OUTER" => [0.11, -0.86],
        "RIGHT_EYE_INNER" => [-0.04, -0.85],
        "RIGHT_EYE_OUTER" => [-0.11, -0.86],
        "NOSE_TIP" => [0.0, -0.74],
        "UPPER_LIP" => [0.0, -0.66],
        "LOWER_LIP" => [0.0, -0.61],
        "MOUTH_LEFT" => [0.05, -0.64],
        "MOUTH_RIGHT" => [-0.05, -0.64],
        "LEFT_CHEEK" => [0.13, -0.7],
        "RIGHT_CHEEK" => [-0.13, -0.7],
        _ => return None,
    };
    Some(p)
}

/// Open-hand landmark offset from the wrist, for the left hand.
pub fn hand_offset(point: &str) -> Option<[f32; 2]> {
    let (finger_x, ys): (f32, [f32; 4]) = match point {
        "WRIST" => return Some([0.0, 0.0]),
        p if p.starts_with("THUMB_") => (-0.06, [0.03, 0.06, 0.09, 0.12]),
        p if p.starts_with("INDEX_") => (-0.03, [0.10, 0.14, 0.17, 0.20]),
        p if p.starts_with("MIDDLE_") => (0.0, [0.105, 0.15, 0.18, 0.21]),
        p if p.starts_with("RING_") => (0.025, [0.10, 0.14, 0.165, 0.19]),
        p if p.starts_with("PINKY_") => (0.045, [0.09, 0.12, 0.14, 0.16]),
        _ => return None,
    };
    let thumb = point.starts_with("THUMB_");
    let joint = match (thumb, point.rsplit('_').next()?) {
        (true, "CMC") | (false, "MCP") => 0,
        (true, "MCP") | (false, "PIP") => 1,
        (true, "IP") | (false, "DIP") => 2,
        (_, "TIP") => 3,
        _ => return None,
    };
    let spread = if thumb { finger_x * (joint as f32 + 1.0) / 4.0 } else { finger_x };
    Some([spread, ys[joint]])
}

/// Rest position of `point` in `component` in normalized units.
pub fn rest_position(component: &str, point: &str) -> Option<[f32; 2]> {
    match component {
        BODY => body_rest(point),
        FACE => face_rest(point),
        LEFT_HAND | RIGHT_HAND => {
            let wrist = body_rest(if component == LEFT_HAND { "LEFT_WRIST" } else { "RIGHT_WRIST" })?;
            let off = hand_offset(point)?;
            let sign = if component == LEFT_HAND { 1.0 } else { -1.0 };
            Some([wrist[0] + sign * off[0], wrist[1] + off[1]])
        }
        _ => None,
    }
}

/// Neutral posture for `header`; landmarks without a known position are
/// marked missing. A third dimension, if present, is 0.
pub fn rest_frame(header: &PoseHeader) -> AppearanceFrame {
    let dims = header.dims();
    let mut points = Vec::with_capacity(header.total_points() * dims);
    let mut confidence = Vec::with_capacity(header.total_points());
    for c in &header.components {
        for p in &c.point_names {
            match rest_position(&c.name, p) {
                Some([x, y]) => {
                    points.extend_from_slice(&[x, y]);
                    confidence.push(1.0);
                }
                None => {
                    points.extend_from_slice(&[0.0, 0.0]);
                    confidence.push(0.0);
                }
            }
            points.extend(std::iter::repeat_n(0.0, dims - 2));
        }
    }
    AppearanceFrame::new(header.clone(), points, confidence).expect("canonical layouts are valid")
}
