//! Privacy/utility harness on a synthetic multi-signer corpus.
//!
//! Samples combine a class-specific hand trajectory and hand shape with a
//! signer-specific constant body/face offset (the appearance) and an
//! optional per-signer tempo. Two nearest-centroid classifiers read fixed
//! features:
//!
//! - sign: within-hand pairwise distances and wrist displacement from the
//!   first frame. Both are unchanged by appearance transfer, so transfer
//!   cannot move sign accuracy here. Neural recognizers do not have this
//!   invariance, which is why transfer costs them accuracy.
//! - signer: first-frame body and face relative to the mid-shoulder point
//!   (pure appearance) plus one motion-timing statistic. Anonymization
//!   collapses the appearance part to a single point; whatever identity
//!   remains comes from tempo.
//!
//! The matrix crosses four training conditions with three test conditions.
//! The transferred test condition classifies each sample under several held
//! out appearances and takes a majority vote.

use std::fmt::Write as _;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use rayon::prelude::*;

use crate::appearance::{remove_appearance, transfer_appearance, TransferPolicy};
use crate::corpus::MeanAccumulator;
use crate::error::{Error, Result};
use crate::pose::{
    distance, AppearanceFrame, PoseSequence, BODY, FACE, LEFT_HAND, LEFT_SHOULDER, LEFT_WRIST, RIGHT_HAND,
    RIGHT_SHOULDER, RIGHT_WRIST,
};
use crate::skeleton;

#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticCorpusSpec {
    pub num_signers: usize,
    pub num_sign_classes: usize,
    pub samples_per_cell: usize,
    /// Standard deviation of per-signer body/face landmark offsets.
    pub signer_appearance_scale: f64,
    /// Standard deviation of per-frame coordinate noise.
    pub motion_noise: f64,
    /// Signers sign at a speed drawn from `[1 - tempo_jitter, 1]`.
    pub tempo_jitter: f64,
    pub frames: usize,
    /// Extra signers whose appearances serve as transfer targets.
    pub held_out_signers: usize,
    pub seed: u64,
}

impl Default for SyntheticCorpusSpec {
    fn default() -> Self {
        Self {
            num_signers: 31,
            num_sign_classes: 20,
            samples_per_cell: 4,
            signer_appearance_scale: 0.05,
            motion_noise: 0.005,
            tempo_jitter: 0.4,
            frames: 24,
            held_out_signers: 20,
            seed: 0,
        }
    }
}

impl SyntheticCorpusSpec {
    pub fn validate(&self) -> Result<()> {
        let counts = [
            ("num_signers", self.num_signers),
            ("num_sign_classes", self.num_sign_classes),
            ("samples_per_cell", self.samples_per_cell),
            ("frames", self.frames),
            ("held_out_signers", self.held_out_signers),
        ];
        for (name, n) in counts {
            if n < 2 {
                return Err(Error::Config(format!("{name} must be >= 2, got {n}")));
            }
        }
        for (name, v) in
            [("signer_appearance_scale", self.signer_appearance_scale), ("motion_noise", self.motion_noise)]
        {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(Error::Config(format!("{name} must be finite and >= 0, got {v}")));
            }
        }
        if !(0.0..1.0).contains(&self.tempo_jitter) {
            return Err(Error::Config(format!("tempo_jitter must be in [0, 1), got {}", self.tempo_jitter)));
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct Sample {
    pub pose: PoseSequence,
    pub signer: usize,
    pub class: usize,
}

#[derive(Debug, Clone)]
pub struct Corpus {
    pub spec: SyntheticCorpusSpec,
    pub train: Vec<Sample>,
    pub test: Vec<Sample>,
    /// Rest appearances of signers outside the train/test population.
    pub held_out: Vec<AppearanceFrame>,
}

impl Corpus {
    /// Mean frame of the training split.
    pub fn mean_frame(&self) -> Result<AppearanceFrame> {
        let first = self.train.first().ok_or(Error::EmptyAccumulator)?;
        self.train
            .iter()
            .try_fold(MeanAccumulator::empty(first.pose.header()), |acc, s| acc.accumulate(&s.pose))?
            .finalize()
    }
}

struct SignTemplate {
    /// Per moving hand: peak displacement and perpendicular bend.
    moves: [Option<([f64; 2], f64)>; 2],
    /// Per hand, landmark offsets from the wrist.
    shapes: [Vec<[f64; 2]>; 2],
}

struct Signer {
    rest: Vec<[f64; 2]>,
    tempo: f64,
}

fn displacement(progress: f64, peak: [f64; 2], bend: f64) -> [f64; 2] {
    use std::f64::consts::PI;
    let norm = (peak[0] * peak[0] + peak[1] * peak[1]).sqrt().max(1e-9);
    let perp = [-peak[1] / norm * bend, peak[0] / norm * bend];
    let (a, b) = ((PI * progress).sin(), (2.0 * PI * progress).sin());
    [a * peak[0] + b * perp[0], a * peak[1] + b * perp[1]]
}

fn new_signer(rng: &mut ChaCha8Rng, spec: &SyntheticCorpusSpec, rest: &AppearanceFrame) -> Signer {
    let header = rest.header();
    let appearance = Normal::new(0.0, spec.signer_appearance_scale.max(f64::MIN_POSITIVE)).expect("finite");
    let shoulders = [header.body_point(LEFT_SHOULDER), header.body_point(RIGHT_SHOULDER)];
    let hands = [header.component_range(LEFT_HAND).unwrap(), header.component_range(RIGHT_HAND).unwrap()];
    let rest_points: Vec<[f64; 2]> = (0..header.total_points())
        .map(|k| {
            let p = rest.point(k);
            let base = [p[0] as f64, p[1] as f64];
            if shoulders.contains(&Some(k))
                || hands.iter().any(|h| h.contains(&k))
                || spec.signer_appearance_scale == 0.0
            {
                base
            } else {
                [base[0] + appearance.sample(rng), base[1] + appearance.sample(rng)]
            }
        })
        .collect();
    let tempo = 1.0 - spec.tempo_jitter * rng.random::<f64>();
    Signer { rest: rest_points, tempo }
}

fn new_template(rng: &mut ChaCha8Rng) -> SignTemplate {
    let moving = |rng: &mut ChaCha8Rng, side: f64| {
        let peak = [side * rng.random_range(-0.45..0.1), rng.random_range(-1.6..-0.7)];
        (peak, rng.random_range(-0.3..0.3))
    };
    let left = moving(rng, -1.0);
    let right = if rng.random_bool(0.5) { Some(moving(rng, 1.0)) } else { None };
    let shape = |rng: &mut ChaCha8Rng| -> Vec<[f64; 2]> {
        skeleton::HAND_POINTS
            .iter()
            .map(|p| {
                let o = skeleton::hand_offset(p).unwrap();
                if *p == "WRIST" {
                    [0.0, 0.0]
                } else {
                    [o[0] as f64 + rng.random_range(-0.04..0.04), o[1] as f64 * rng.random_range(0.4..1.2)]
                }
            })
            .collect()
    };
    let shapes = [shape(rng), shape(rng)];
    SignTemplate { moves: [Some(left), right], shapes }
}

fn render(
    rng: &mut ChaCha8Rng,
    spec: &SyntheticCorpusSpec,
    rest: &AppearanceFrame,
    signer: &Signer,
    template: &SignTemplate,
) -> PoseSequence {
    let header = rest.header();
    let noise = Normal::new(0.0, spec.motion_noise.max(f64::MIN_POSITIVE)).expect("finite");
    let hands = [LEFT_HAND, RIGHT_HAND].map(|h| header.component_range(h).unwrap());
    let wrists = [LEFT_WRIST, RIGHT_WRIST].map(|w| header.body_point(w).unwrap());
    let shoulders = [LEFT_SHOULDER, RIGHT_SHOULDER].map(|s| header.body_point(s).unwrap());
    // body landmarks dragged along with each wrist, with their weight
    let followers: [Vec<(usize, f64)>; 2] = ["LEFT", "RIGHT"].map(|side| {
        [("ELBOW", 0.5), ("PINKY", 1.0), ("INDEX", 1.0), ("THUMB", 1.0)]
            .iter()
            .filter_map(|(p, w)| header.body_point(&format!("{side}_{p}")).map(|k| (k, *w)))
            .collect()
    });
    let mirror = [1.0, -1.0];
    let kp = header.total_points();
    let mut data = Vec::with_capacity(spec.frames * kp * 2);
    for t in 0..spec.frames {
        let progress = (t as f64 / ((spec.frames - 1) as f64 * signer.tempo)).min(1.0);
        let mut frame = signer.rest.clone();
        for side in 0..2 {
            let disp = template.moves[side].map_or([0.0, 0.0], |(peak, bend)| displacement(progress, peak, bend));
            let w = wrists[side];
            frame[w] = [frame[w][0] + disp[0], frame[w][1] + disp[1]];
            for &(k, weight) in &followers[side] {
                frame[k] = [frame[k][0] + weight * disp[0], frame[k][1] + weight * disp[1]];
            }
            for (i, k) in hands[side].clone().enumerate() {
                let o = template.shapes[side][i];
                frame[k] = [frame[w][0] + mirror[side] * o[0], frame[w][1] + o[1]];
            }
        }
        for (k, p) in frame.iter().enumerate() {
            if spec.motion_noise > 0.0 && !shoulders.contains(&k) {
                data.push((p[0] + noise.sample(rng)) as f32);
                data.push((p[1] + noise.sample(rng)) as f32);
            } else {
                data.push(p[0] as f32);
                data.push(p[1] as f32);
            }
        }
    }
    PoseSequence::new(header.clone(), spec.frames, 1, data, vec![1.0; spec.frames * kp])
        .expect("generated poses are valid")
}

/// Deterministic balanced corpus. In every (signer, class) cell the last
/// quarter of the samples (at least one) goes to the test split.
pub fn generate_corpus(spec: &SyntheticCorpusSpec) -> Result<Corpus> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let header = skeleton::holistic(2);
    let rest = skeleton::rest_frame(&header);
    let signers: Vec<Signer> = (0..spec.num_signers).map(|_| new_signer(&mut rng, spec, &rest)).collect();
    let templates: Vec<SignTemplate> = (0..spec.num_sign_classes).map(|_| new_template(&mut rng)).collect();
    let held_out: Vec<AppearanceFrame> = (0..spec.held_out_signers)
        .map(|_| {
            let s = new_signer(&mut rng, spec, &rest);
            let points = s.rest.iter().flat_map(|p| [p[0] as f32, p[1] as f32]).collect();
            AppearanceFrame::new(header.clone(), points, vec![1.0; header.total_points()]).expect("valid")
        })
        .collect();
    let test_count = (spec.samples_per_cell / 4).max(1);
    let mut train = Vec::new();
    let mut test = Vec::new();
    for (signer_id, signer) in signers.iter().enumerate() {
        for (class, template) in templates.iter().enumerate() {
            for i in 0..spec.samples_per_cell {
                let pose = render(&mut rng, spec, &rest, signer, template);
                let sample = Sample { pose, signer: signer_id, class };
                if i >= spec.samples_per_cell - test_count {
                    test.push(sample);
                } else {
                    train.push(sample);
                }
            }
        }
    }
    Ok(Corpus { spec: spec.clone(), train, test, held_out })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Task {
    Sign,
    Signer,
}

impl Task {
    pub fn name(self) -> &'static str {
        match self {
            Task::Sign => "sign",
            Task::Signer => "signer",
        }
    }
}

/// Landmarks whose pairwise distances describe the hand shape; hands
/// lacking them fall back to every landmark of the component.
const HAND_SHAPE_POINTS: [&str; 6] =
    ["WRIST", "THUMB_TIP", "INDEX_FINGER_TIP", "MIDDLE_FINGER_TIP", "RING_FINGER_TIP", "PINKY_TIP"];

fn hand_features(seq: &PoseSequence, out: &mut Vec<f64>) {
    let header = seq.header();
    for hand in [LEFT_HAND, RIGHT_HAND] {
        let Some(r) = header.component_range(hand) else { continue };
        let mut points: Vec<usize> = HAND_SHAPE_POINTS.iter().filter_map(|p| header.point_index(hand, p)).collect();
        if points.len() < 2 {
            points = r.collect();
        }
        let n = points.len();
        let mut acc = vec![0.0; n * (n - 1) / 2];
        for t in 0..seq.frames() {
            let mut idx = 0;
            for (a, &i) in points.iter().enumerate() {
                for &j in &points[a + 1..] {
                    acc[idx] += distance(seq.point(t, 0, i), seq.point(t, 0, j));
                    idx += 1;
                }
            }
        }
        out.extend(acc.iter().map(|v| v / seq.frames() as f64));
    }
}

fn wrist_trajectory(seq: &PoseSequence, out: &mut Vec<f64>) {
    for w in [LEFT_WRIST, RIGHT_WRIST] {
        let Some(k) = seq.header().body_point(w) else { continue };
        let origin = seq.point(0, 0, k);
        for t in 1..seq.frames() {
            for (p, o) in seq.point(t, 0, k).iter().zip(origin) {
                out.push(*p as f64 - *o as f64);
            }
        }
    }
}

/// Normalized temporal centroid of wrist speed: early for fast signers.
fn motion_timing(seq: &PoseSequence) -> f64 {
    let header = seq.header();
    let wrists: Vec<usize> = [LEFT_WRIST, RIGHT_WRIST].iter().filter_map(|w| header.body_point(w)).collect();
    let (mut weighted, mut total) = (0.0, 0.0);
    for t in 1..seq.frames() {
        let speed: f64 = wrists.iter().map(|&w| distance(seq.point(t, 0, w), seq.point(t - 1, 0, w))).sum();
        weighted += t as f64 * speed;
        total += speed;
    }
    if total > 0.0 {
        weighted / total / (seq.frames() - 1).max(1) as f64
    } else {
        0.5
    }
}

fn appearance_features(seq: &PoseSequence, out: &mut Vec<f64>) {
    let header = seq.header();
    let (Some(l), Some(r)) = (header.body_point(LEFT_SHOULDER), header.body_point(RIGHT_SHOULDER)) else {
        return;
    };
    let (ls, rs) = (seq.point(0, 0, l), seq.point(0, 0, r));
    let mid: Vec<f64> = ls.iter().zip(rs).map(|(a, b)| (*a as f64 + *b as f64) / 2.0).collect();
    for name in [BODY, FACE] {
        let Some(range) = header.component_range(name) else { continue };
        for k in range {
            for (p, m) in seq.point(0, 0, k).iter().zip(&mid) {
                out.push(*p as f64 - m);
            }
        }
    }
}

/// Fixed feature vector of `seq` for `task`.
pub fn features(seq: &PoseSequence, task: Task) -> Vec<f64> {
    let mut out = Vec::new();
    match task {
        Task::Sign => {
            hand_features(seq, &mut out);
            wrist_trajectory(seq, &mut out);
        }
        Task::Signer => {
            appearance_features(seq, &mut out);
            out.push(motion_timing(seq));
        }
    }
    out
}

/// Nearest centroid over standardized features. Dimensions that are
/// constant in training carry no weight. Ties go to the lowest label.
#[derive(Debug, Clone)]
pub struct NearestCentroid {
    centroids: Vec<Vec<f64>>,
    weights: Vec<f64>,
}

impl NearestCentroid {
    pub fn fit(features: &[Vec<f64>], labels: &[usize], num_labels: usize) -> Result<Self> {
        let dims = features.first().map_or(0, Vec::len);
        let n = features.len() as f64;
        let mut mean = vec![0.0; dims];
        for f in features {
            mean.iter_mut().zip(f).for_each(|(m, v)| *m += v / n);
        }
        let mut var = vec![0.0; dims];
        for f in features {
            var.iter_mut().zip(f).zip(&mean).for_each(|((s, v), m)| *s += (v - m) * (v - m) / n);
        }
        let weights: Vec<f64> = var.iter().map(|v| if v.sqrt() > 1e-9 { 1.0 / v.sqrt() } else { 0.0 }).collect();
        let mut sums = vec![vec![0.0; dims]; num_labels];
        let mut counts = vec![0usize; num_labels];
        for (f, &l) in features.iter().zip(labels) {
            counts[l] += 1;
            sums[l].iter_mut().zip(f).for_each(|(s, v)| *s += v);
        }
        if let Some(empty) = counts.iter().position(|&c| c == 0) {
            return Err(Error::EmptyClass(empty));
        }
        let centroids =
            sums.into_iter().zip(&counts).map(|(s, &c)| s.into_iter().map(|v| v / c as f64).collect()).collect();
        Ok(Self { centroids, weights })
    }

    pub fn predict(&self, x: &[f64]) -> usize {
        let mut best = (f64::INFINITY, 0);
        for (label, c) in self.centroids.iter().enumerate() {
            let d: f64 = c
                .iter()
                .zip(x)
                .zip(&self.weights)
                .map(|((c, x), w)| {
                    let z = (x - c) * w;
                    z * z
                })
                .sum();
            if d < best.0 {
                best = (d, label);
            }
        }
        best.1
    }
}

/// Fits a classifier for `task` on raw sequences.
pub fn train_classifier(samples: &[PoseSequence], labels: &[usize], task: Task) -> Result<NearestCentroid> {
    let num_labels = labels.iter().max().map_or(0, |m| m + 1);
    let feats: Vec<Vec<f64>> = samples.par_iter().map(|s| features(s, task)).collect();
    NearestCentroid::fit(&feats, labels, num_labels)
}

/// Most frequent prediction; ties go to the lowest label.
pub fn majority_vote(predictions: &[usize]) -> Option<usize> {
    let max = *predictions.iter().max()?;
    let mut counts = vec![0usize; max + 1];
    for &p in predictions {
        counts[p] += 1;
    }
    let top = *counts.iter().max()?;
    counts.iter().position(|&c| c == top)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Condition {
    Original,
    Anonymized,
    Transferred,
    Combined,
}

impl Condition {
    pub const TRAIN: [Condition; 4] =
        [Condition::Original, Condition::Anonymized, Condition::Transferred, Condition::Combined];
    pub const TEST: [Condition; 3] = [Condition::Original, Condition::Anonymized, Condition::Transferred];

    pub fn name(self) -> &'static str {
        match self {
            Condition::Original => "original",
            Condition::Anonymized => "anonymized",
            Condition::Transferred => "transferred",
            Condition::Combined => "combined",
        }
    }
}

/// Share of original, anonymized and transferred samples in the combined
/// training condition.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mix {
    pub original: f64,
    pub anonymized: f64,
    pub transferred: f64,
}

impl Default for Mix {
    fn default() -> Self {
        Self { original: 0.10, anonymized: 0.10, transferred: 0.80 }
    }
}

/// Largest-remainder apportionment of `total` items by `shares`. Remainder
/// ties go to the earlier share.
pub fn apportion(total: usize, shares: &[f64]) -> Result<Vec<usize>> {
    let sum: f64 = shares.iter().sum();
    if (sum - 1.0).abs() > 1e-9 || shares.iter().any(|s| *s < 0.0) {
        return Err(Error::MixProportions(sum));
    }
    let quotas: Vec<f64> = shares.iter().map(|s| s * total as f64).collect();
    let mut counts: Vec<usize> = quotas.iter().map(|q| q.floor() as usize).collect();
    let mut order: Vec<usize> = (0..shares.len()).collect();
    order.sort_by(|&a, &b| {
        let (ra, rb) = (quotas[a] - quotas[a].floor(), quotas[b] - quotas[b].floor());
        rb.partial_cmp(&ra).unwrap().then(a.cmp(&b))
    });
    let left = total - counts.iter().sum::<usize>();
    for &i in order.iter().take(left) {
        counts[i] += 1;
    }
    Ok(counts)
}

/// Which source condition each of `n` training samples is drawn from,
/// shuffled deterministically by `seed`.
pub fn mix_training_set(n: usize, mix: Mix, seed: u64) -> Result<Vec<Condition>> {
    let counts = apportion(n, &[mix.original, mix.anonymized, mix.transferred])?;
    let mut out: Vec<Condition> = [Condition::Original, Condition::Anonymized, Condition::Transferred]
        .iter()
        .zip(&counts)
        .flat_map(|(c, &k)| std::iter::repeat_n(*c, k))
        .collect();
    if counts[0] != n {
        out.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq)]
pub struct EnsembleConfig {
    pub num_appearances: usize,
    /// Appearances each training sample is transferred to in the
    /// transferred training condition.
    pub transfers_per_sample: usize,
}

impl Default for EnsembleConfig {
    fn default() -> Self {
        Self { num_appearances: 10, transfers_per_sample: 3 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AccuracyRow {
    pub train: Condition,
    pub test: Condition,
    pub task: Task,
    pub accuracy: f64,
    pub chance: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MatrixResult {
    pub rows: Vec<AccuracyRow>,
    pub test_samples: usize,
}

impl MatrixResult {
    pub fn accuracy(&self, task: Task, train: Condition, test: Condition) -> Option<f64> {
        self.rows.iter().find(|r| r.task == task && r.train == train && r.test == test).map(|r| r.accuracy)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("train,test,task,accuracy,chance\n");
        for r in &self.rows {
            let _ = writeln!(
                out,
                "{},{},{},{:.6},{:.6}",
                r.train.name(),
                r.test.name(),
                r.task.name(),
                r.accuracy,
                r.chance
            );
        }
        out
    }

    pub fn to_table(&self) -> String {
        let mut out = String::from("Sign recognition accuracy (rows: train, columns: test)\n");
        let _ = writeln!(out, "{:<12} {:>10} {:>11} {:>12}", "train", "original", "anonymized", "transferred");
        for train in Condition::TRAIN {
            let _ = write!(out, "{:<12}", train.name());
            for (test, width) in Condition::TEST.iter().zip([11, 12, 13]) {
                let acc = self.accuracy(Task::Sign, train, *test).unwrap_or(f64::NAN);
                let _ = write!(out, "{:>width$}", format!("{:.2}%", acc * 100.0));
            }
            out.push('\n');
        }
        if let Some(r) = self.rows.iter().find(|r| r.task == Task::Sign) {
            let _ = writeln!(out, "chance: {:.2}%", r.chance * 100.0);
        }
        out.push_str("\nSigner identification accuracy (train = test condition)\n");
        for r in self.rows.iter().filter(|r| r.task == Task::Signer) {
            let _ = writeln!(out, "{:<12} {:>8.2}%", r.train.name(), r.accuracy * 100.0);
        }
        if let Some(r) = self.rows.iter().find(|r| r.task == Task::Signer) {
            let _ = writeln!(out, "chance: {:.2}%", r.chance * 100.0);
        }
        out
    }
}

fn derive_seed(master: u64, salt: u64) -> u64 {
    let mut rng = ChaCha8Rng::seed_from_u64(master ^ salt.wrapping_mul(0x9E37_79B9_7F4A_7C15));
    rng.random()
}

type Variants = Vec<Vec<f64>>;

/// Per-sample feature vectors of one condition; transferred test samples
/// carry one vector per ensemble appearance.
struct ConditionFeatures {
    sign: Vec<Variants>,
    signer: Vec<Variants>,
}

fn featurize(seqs: impl IntoParallelIterator<Item = Result<Vec<PoseSequence>>>) -> Result<ConditionFeatures> {
    let per_sample: Vec<(Variants, Variants)> = seqs
        .into_par_iter()
        .map(|variants| {
            let variants = variants?;
            Ok((
                variants.iter().map(|s| features(s, Task::Sign)).collect(),
                variants.iter().map(|s| features(s, Task::Signer)).collect(),
            ))
        })
        .collect::<Result<_>>()?;
    let (sign, signer) = per_sample.into_iter().unzip();
    Ok(ConditionFeatures { sign, signer })
}

/// Runs the full train x test matrix. Sign accuracy is reported for every
/// cell, signer accuracy on the diagonal (original, anonymized, transferred).
pub fn run_matrix(corpus: &Corpus, mix: Mix, ensemble: &EnsembleConfig) -> Result<MatrixResult> {
    if ensemble.num_appearances == 0 || ensemble.num_appearances > corpus.held_out.len() {
        return Err(Error::Config(format!(
            "num_appearances must be in 1..={}, got {}",
            corpus.held_out.len(),
            ensemble.num_appearances
        )));
    }
    let policy = TransferPolicy::default();
    let master = corpus.spec.seed;

    let mean = corpus.mean_frame()?;

    let mut pick = ChaCha8Rng::seed_from_u64(derive_seed(master, 1));
    let mut pool: Vec<usize> = (0..corpus.held_out.len()).collect();
    pool.shuffle(&mut pick);
    let ensemble_targets: Vec<&AppearanceFrame> =
        pool[..ensemble.num_appearances].iter().map(|&i| &corpus.held_out[i]).collect();

    // training sets
    let n_train = corpus.train.len();
    let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(master, 2));
    let transfer_choice: Vec<Vec<usize>> = (0..n_train)
        .map(|_| {
            let mut idx: Vec<usize> = (0..corpus.held_out.len()).collect();
            idx.shuffle(&mut rng);
            idx.truncate(ensemble.transfers_per_sample.max(1));
            idx
        })
        .collect();
    let mix_plan = mix_training_set(n_train, mix, derive_seed(master, 3))?;

    let train_features = |condition: Condition| -> Result<ConditionFeatures> {
        featurize((0..n_train).into_par_iter().map(|i| {
            let s = &corpus.train[i].pose;
            let source = if condition == Condition::Combined { mix_plan[i] } else { condition };
            Ok(match source {
                Condition::Original => vec![s.clone()],
                Condition::Anonymized => vec![remove_appearance(s, &mean, &policy)?],
                _ => {
                    let take = if condition == Condition::Combined { 1 } else { transfer_choice[i].len() };
                    transfer_choice[i][..take]
                        .iter()
                        .map(|&h| transfer_appearance(s, &corpus.held_out[h], &policy))
                        .collect::<Result<_>>()?
                }
            })
        }))
    };
    let test_features = |condition: Condition| -> Result<ConditionFeatures> {
        featurize(corpus.test.par_iter().map(|sample| {
            let s = &sample.pose;
            Ok(match condition {
                Condition::Original => vec![s.clone()],
                Condition::Anonymized => vec![remove_appearance(s, &mean, &policy)?],
                _ => ensemble_targets.iter().map(|t| transfer_appearance(s, t, &policy)).collect::<Result<_>>()?,
            })
        }))
    };

    let tests: Vec<ConditionFeatures> = Condition::TEST.iter().map(|&c| test_features(c)).collect::<Result<_>>()?;
    let num_classes = corpus.spec.num_sign_classes;
    let num_signers = corpus.spec.num_signers;
    let mut rows = Vec::new();
    for train in Condition::TRAIN {
        let tf = train_features(train)?;
        let expand = |feats: &[Vec<Vec<f64>>], label: &dyn Fn(&Sample) -> usize| -> (Vec<Vec<f64>>, Vec<usize>) {
            let mut xs = Vec::new();
            let mut ys = Vec::new();
            for (variants, sample) in feats.iter().zip(&corpus.train) {
                for v in variants {
                    xs.push(v.clone());
                    ys.push(label(sample));
                }
            }
            (xs, ys)
        };
        let (xs, ys) = expand(&tf.sign, &|s| s.class);
        let sign_model = NearestCentroid::fit(&xs, &ys, num_classes)?;
        let (xs, ys) = expand(&tf.signer, &|s| s.signer);
        let signer_model = NearestCentroid::fit(&xs, &ys, num_signers)?;

        for (test, tfeat) in Condition::TEST.iter().zip(&tests) {
            let score = |model: &NearestCentroid, feats: &[Vec<Vec<f64>>], label: &dyn Fn(&Sample) -> usize| -> f64 {
                let correct = feats
                    .iter()
                    .zip(&corpus.test)
                    .filter(|(variants, sample)| {
                        let preds: Vec<usize> = variants.iter().map(|v| model.predict(v)).collect();
                        majority_vote(&preds) == Some(label(sample))
                    })
                    .count();
                correct as f64 / corpus.test.len() as f64
            };
            rows.push(AccuracyRow {
                train,
                test: *test,
                task: Task::Sign,
                accuracy: score(&sign_model, &tfeat.sign, &|s| s.class),
                chance: 1.0 / num_classes as f64,
            });
            if train == *test {
                rows.push(AccuracyRow {
                    train,
                    test: *test,
                    task: Task::Signer,
                    accuracy: score(&signer_model, &tfeat.signer, &|s| s.signer),
                    chance: 1.0 / num_signers as f64,
                });
            }
        }
    }
    rows.sort_by_key(|r| {
        (
            r.task == Task::Signer,
            Condition::TRAIN.iter().position(|c| *c == r.train),
            Condition::TEST.iter().position(|c| *c == r.test),
        )
    });
    Ok(MatrixResult { rows, test_samples: corpus.test.len() })
}
