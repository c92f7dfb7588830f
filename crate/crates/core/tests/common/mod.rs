#![allow(dead_code)]

use pose_appearance::pose::{ComponentDescriptor, PoseHeader, LEFT_SHOULDER, RIGHT_SHOULDER};
use pose_appearance::skeleton;
use pose_appearance::{normalize::normalize, AppearanceFrame, PoseSequence};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn layouts() -> Vec<PoseHeader> {
    vec![
        skeleton::compact(2),
        skeleton::compact(3),
        skeleton::holistic(2),
        skeleton::holistic(3),
        skeleton::holistic_no_face(2),
    ]
}

/// Rest pose with a random per-signer offset on every keypoint, random
/// per-frame motion, then a random scale and shift; finally normalized.
pub fn random_sequence(rng: &mut ChaCha8Rng, header: &PoseHeader, frames: usize) -> PoseSequence {
    let rest = skeleton::rest_frame(header);
    let dims = header.dims();
    let l = header.body_point(LEFT_SHOULDER).unwrap();
    let r = header.body_point(RIGHT_SHOULDER).unwrap();
    let signer: Vec<f32> = rest.points().iter().map(|v| v + rng.random_range(-0.1..0.1)).collect();
    let scale = rng.random_range(50.0..400.0f32);
    let shift: Vec<f32> = (0..dims).map(|_| rng.random_range(-300.0..300.0)).collect();
    let mut data = Vec::with_capacity(frames * signer.len());
    let mut current = signer.clone();
    for _ in 0..frames {
        for (i, v) in current.iter_mut().enumerate() {
            let k = i / dims;
            if k != l && k != r {
                *v += rng.random_range(-0.05..0.05);
            }
        }
        data.extend(current.iter().enumerate().map(|(i, v)| v * scale + shift[i % dims]));
    }
    let conf = vec![1.0; frames * header.total_points()];
    let raw = PoseSequence::new(header.clone(), frames, 1, data, conf).unwrap();
    normalize(&raw).unwrap().0
}

pub fn random_appearance(rng: &mut ChaCha8Rng, header: &PoseHeader) -> AppearanceFrame {
    AppearanceFrame::from_sequence_frame(&random_sequence(rng, header, 1), 0)
}

/// Valid header with random component names, point counts and dims.
pub fn random_header(rng: &mut ChaCha8Rng) -> PoseHeader {
    let dims = if rng.random_bool(0.5) { 2 } else { 3 };
    let mut body: Vec<String> = pose_appearance::pose::REQUIRED_BODY_LANDMARKS.iter().map(|s| s.to_string()).collect();
    for i in 0..rng.random_range(0..6) {
        body.push(format!("EXTRA_{i}"));
    }
    body.shuffle(rng);
    let mut components = vec![ComponentDescriptor::new("BODY", body, dims)];
    for c in 0..rng.random_range(0..3) {
        let n = rng.random_range(1..8);
        components.push(ComponentDescriptor::new(&format!("PART_{c}_ü"), (0..n).map(|i| format!("P{i}")), dims));
    }
    components.shuffle(rng);
    PoseHeader::new(rng.random_range(1.0..120.0), components)
}

/// Arbitrary valid sequence: random values, some missing keypoints
/// (possibly with NaN coordinates), several persons.
pub fn random_any_sequence(rng: &mut ChaCha8Rng) -> PoseSequence {
    let header = random_header(rng);
    let frames = rng.random_range(1..6);
    let persons = rng.random_range(1..3);
    let n = frames * persons * header.total_points();
    let conf: Vec<f32> = (0..n)
        .map(|_| match rng.random_range(0..4) {
            0 => 0.0,
            1 => 1.0,
            _ => rng.random_range(0.0..1.0),
        })
        .collect();
    let dims = header.dims();
    let data: Vec<f32> = (0..n * dims)
        .map(|i| if conf[i / dims] == 0.0 && rng.random_bool(0.3) { f32::NAN } else { rng.random_range(-1e3..1e3) })
        .collect();
    PoseSequence::new(header, frames, persons, data, conf).unwrap()
}

/// Within-hand pairwise distances, frame by frame.
pub fn hand_distances(seq: &PoseSequence) -> Vec<f64> {
    let mut out = Vec::new();
    for hand in ["LEFT_HAND", "RIGHT_HAND"] {
        let Some(r) = seq.header().component_range(hand) else { continue };
        for t in 0..seq.frames() {
            for i in r.clone() {
                for j in i + 1..r.end {
                    let (a, b) = (seq.point(t, 0, i), seq.point(t, 0, j));
                    out.push(a.iter().zip(b).map(|(x, y)| (*x as f64 - *y as f64).powi(2)).sum::<f64>().sqrt());
                }
            }
        }
    }
    out
}

pub fn max_abs_diff(a: &[f32], b: &[f32]) -> f64 {
    assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| (*x as f64 - *y as f64).abs()).fold(0.0, f64::max)
}
