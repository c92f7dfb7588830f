use crate::pose::Violation;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(thiserror::Error, Debug)]
pub enum Error {
    #[error("not a pose file")]
    NotAPoseFile,
    #[error("unsupported pose file version {0} (supported: 1)")]
    UnsupportedVersion(u16),
    #[error("truncated pose file: expected {expected} bytes, got {actual} ({} missing)", expected - actual)]
    Truncated { expected: usize, actual: usize },
    #[error("pose file has {0} trailing bytes after the confidence block")]
    TrailingBytes(usize),
    #[error("invalid UTF-8 in {0}")]
    InvalidUtf8(&'static str),
    #[error("invalid pose: {}", format_violations(.0))]
    Invalid(Vec<Violation>),
    #[error("unknown component {0:?}")]
    UnknownComponent(String),
    #[error("component {component:?} is missing landmark {landmark:?}")]
    MissingLandmark { component: String, landmark: String },
    #[error("no frame with both shoulders confident")]
    NoConfidentShoulders,
    #[error("degenerate pose: mean shoulder width {0:e} is below 1e-9")]
    DegeneratePose(f64),
    #[error("incompatible skeletons: {0}")]
    IncompatibleHeaders(String),
    #[error("{what} is not normalized: shoulder width {width:.4} deviates from 1 by {deviation:.4}")]
    Unnormalized { what: &'static str, width: f64, deviation: f64 },
    #[error("no frame with at least 90% of body keypoints confident")]
    NoConfidentFrame,
    #[error("frame {frame} out of range for a {frames}-frame sequence")]
    FrameOutOfRange { frame: usize, frames: usize },
    #[error("transfer policy may not transfer hand component {0:?}")]
    HandInPolicy(String),
    #[error("accumulator layouts differ")]
    LayoutMismatch,
    #[error("accumulator has no keypoint with positive weight")]
    EmptyAccumulator,
    #[error("accumulated value out of range at keypoint {0}")]
    AccumulatorOverflow(usize),
    #[error("nothing to stitch: empty clip list")]
    EmptyClipList,
    #[error("sequence needs at least 2 frames, got {0}")]
    TooFewFrames(usize),
    #[error("flow series lengths differ: {0} vs {1}")]
    LengthMismatch(usize, usize),
    #[error("zone {start}..{end} out of range for {len} transitions")]
    ZoneOutOfRange { start: usize, end: usize, len: usize },
    #[error("mix proportions sum to {0}, expected 1")]
    MixProportions(f64),
    #[error("class {0} has no training samples")]
    EmptyClass(usize),
    #[error("remap table line {line}: {message}")]
    Remap { line: usize, message: String },
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
    #[error("{0}")]
    Config(String),
    #[error("{}: {source}", path.display())]
    Io { path: std::path::PathBuf, source: std::io::Error },
}

fn format_violations(violations: &[Violation]) -> String {
    let shown: Vec<String> = violations.iter().take(5).map(ToString::to_string).collect();
    let mut text = shown.join("; ");
    if violations.len() > 5 {
        text.push_str(&format!("; and {} more", violations.len() - 5));
    }
    text
}
