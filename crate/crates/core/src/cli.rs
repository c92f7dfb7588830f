//! Command-line front end.
//!
//! Exit codes: 0 on success, 1 for usage and domain errors (including a
//! missing input file), 2 for other I/O failures. Outputs are written to a
//! temporary file in the destination directory and renamed into place, so a
//! failed run never leaves a partial file behind.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::appearance::{extract_appearance, remove_appearance, transfer_appearance, HandAnchor, TransferPolicy};
use crate::corpus::{accumulate_parallel, parse_manifest};
use crate::error::{Error, Result};
use crate::eval::{generate_corpus, run_matrix, EnsembleConfig, Mix, SyntheticCorpusSpec};
use crate::io::{export_json, import_json, read_pose, read_pose_with_remap, write_pose, RemapTable, MAGIC};
use crate::metrics::{flow_series, stitch_zone_report};
use crate::normalize::{apply_normalization, compute_normalization, invert_normalization, NormalizationParams};
use crate::pose::{AppearanceFrame, PoseSequence};
use crate::stitch::{stitch, StitchConfig};

const DEFAULT_MEAN_FRAME: &[u8] = include_bytes!("../data/mean_frame.pose");

/// Parameters within this distance of the identity are treated as already
/// normalized and the input is used bit-for-bit.
const IDENTITY_EPSILON: f64 = 1e-6;

#[derive(Parser, Debug)]
#[command(name = "pose-appearance", version, about = "Appearance transfer and anonymization for sign language poses")]
pub struct Cli {
    /// Suppress reports on stdout. Warnings still go to stderr.
    #[arg(long, global = true)]
    pub quiet: bool,
    /// Seed for every randomized step.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Write pose outputs as JSON instead of the binary format.
    #[arg(long, global = true)]
    pub json: bool,
    /// Landmark renaming table (`name=canonical` per line) applied when
    /// reading binary pose files.
    #[arg(long, global = true, value_name = "FILE")]
    pub remap: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Replace the signer's appearance with a mean appearance.
    Anonymize(AnonymizeArgs),
    /// Replace the signer's appearance with another person's.
    Transfer(TransferArgs),
    /// Compute the mean frame of the pose files listed in a manifest.
    Mean(MeanArgs),
    /// Join sign clips into one sequence.
    Stitch(StitchArgs),
    /// Write the keypoint flow series of a pose file as CSV.
    Flow(FlowArgs),
    /// Run the privacy/utility matrix on a synthetic corpus.
    Eval(EvalArgs),
}

#[derive(ValueEnum, Clone, Copy, Debug, Default)]
pub enum Hands {
    /// Move each hand with its wrist.
    #[default]
    Rigid,
    /// Leave hand coordinates untouched.
    Passthrough,
}

impl From<Hands> for HandAnchor {
    fn from(h: Hands) -> Self {
        match h {
            Hands::Rigid => HandAnchor::RigidFollowWrist,
            Hands::Passthrough => HandAnchor::PassThrough,
        }
    }
}

#[derive(Args, Debug)]
pub struct AnonymizeArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long)]
    pub output: PathBuf,
    /// Mean frame file; frame 0 is used. Defaults to the bundled mean frame.
    #[arg(long)]
    pub mean: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Hands::Rigid)]
    pub hands: Hands,
    /// Map the result back to the input's original scale and position.
    #[arg(long)]
    pub keep_scale: bool,
}

#[derive(Args, Debug)]
pub struct TransferArgs {
    #[arg(long)]
    pub input: PathBuf,
    /// Pose file of the target person; its first frame is the appearance.
    #[arg(long)]
    pub appearance: PathBuf,
    #[arg(long)]
    pub output: PathBuf,
    #[arg(long, value_enum, default_value_t = Hands::Rigid)]
    pub hands: Hands,
    #[arg(long)]
    pub keep_scale: bool,
}

#[derive(Args, Debug)]
pub struct MeanArgs {
    /// One pose file path per line; relative paths resolve against the
    /// manifest's directory.
    #[arg(long)]
    pub manifest: PathBuf,
    #[arg(long)]
    pub output: PathBuf,
    #[arg(long, default_value_t = 1)]
    pub workers: usize,
}

#[derive(Args, Debug)]
pub struct StitchArgs {
    #[arg(long, num_args = 1.., required = true)]
    pub inputs: Vec<PathBuf>,
    #[arg(long)]
    pub output: PathBuf,
    /// Interpolated frames between consecutive clips.
    #[arg(long, default_value_t = 8)]
    pub transition: usize,
    /// Keep every clip's own appearance.
    #[arg(long)]
    pub no_unify: bool,
    /// Shared appearance; defaults to the first clip's.
    #[arg(long)]
    pub appearance: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Hands::Rigid)]
    pub hands: Hands,
}

#[derive(Args, Debug)]
pub struct FlowArgs {
    #[arg(long)]
    pub input: PathBuf,
    /// Comma-separated component names; all components when omitted.
    #[arg(long, value_delimiter = ',')]
    pub components: Vec<String>,
    #[arg(long)]
    pub csv: PathBuf,
}

#[derive(Args, Debug)]
pub struct EvalArgs {
    #[arg(long, default_value_t = 31)]
    pub signers: usize,
    #[arg(long, default_value_t = 20)]
    pub classes: usize,
    /// Samples per (signer, class) cell; a quarter of them are held out.
    #[arg(long, default_value_t = 4)]
    pub samples: usize,
    /// Per-signer tempo spread; 0 removes all identity from motion.
    #[arg(long, default_value_t = 0.4)]
    pub tempo_jitter: f64,
    /// Appearances in the transferred-test ensemble.
    #[arg(long, default_value_t = 10)]
    pub appearances: usize,
    #[arg(long)]
    pub csv: PathBuf,
}

/// Exit status for a failed command.
pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::Io { .. } => 2,
        _ => 1,
    }
}

/// The bundled mean frame: mean of the training split of the default
/// synthetic corpus.
pub fn default_mean_frame() -> Result<AppearanceFrame> {
    Ok(AppearanceFrame::from_sequence_frame(&read_pose(DEFAULT_MEAN_FRAME)?, 0))
}

struct Reader {
    remap: Option<RemapTable>,
}

fn read_bytes(path: &Path) -> Result<Vec<u8>> {
    std::fs::read(path).map_err(|source| {
        if source.kind() == std::io::ErrorKind::NotFound {
            Error::Config(format!("input file {} does not exist", path.display()))
        } else {
            Error::Io { path: path.to_path_buf(), source }
        }
    })
}

fn with_path(path: &Path, err: Error) -> Error {
    match err {
        Error::Io { .. } | Error::Config(_) => err,
        other => Error::Config(format!("{}: {other}", path.display())),
    }
}

/// Normalizes `seq` unless it already is.
fn ensure_normalized(seq: PoseSequence) -> Result<(PoseSequence, Option<NormalizationParams>)> {
    let params = compute_normalization(&seq)?;
    if (params.scale - 1.0).abs() <= IDENTITY_EPSILON && params.offset.iter().all(|o| o.abs() <= IDENTITY_EPSILON) {
        return Ok((seq, None));
    }
    Ok((apply_normalization(&seq, &params), Some(params)))
}

impl Reader {
    /// Binary pose files are recognized by their magic, JSON files by a
    /// leading `{`. The remap table applies to binary files only.
    fn sequence(&self, path: &Path) -> Result<PoseSequence> {
        let bytes = read_bytes(path)?;
        let parsed = if bytes.starts_with(MAGIC) {
            read_pose_with_remap(&bytes, self.remap.as_ref())
        } else if bytes.first() == Some(&b'{') {
            std::str::from_utf8(&bytes).map_err(|_| Error::InvalidUtf8("JSON pose file")).and_then(import_json)
        } else {
            Err(Error::NotAPoseFile)
        };
        parsed.map_err(|e| with_path(path, e))
    }

    fn normalized(&self, path: &Path) -> Result<(PoseSequence, Option<NormalizationParams>)> {
        ensure_normalized(self.sequence(path)?).map_err(|e| with_path(path, e))
    }
}

struct Ctx<'a> {
    quiet: bool,
    json: bool,
    reader: Reader,
    out: &'a mut dyn Write,
    err: &'a mut dyn Write,
}

impl Ctx<'_> {
    fn report(&mut self, text: &str) {
        if !self.quiet {
            let _ = self.out.write_all(text.as_bytes());
        }
    }

    fn warn(&mut self, text: &str) {
        let _ = writeln!(self.err, "warning: {text}");
    }

    fn write_pose(&self, path: &Path, seq: &PoseSequence) -> Result<()> {
        let bytes = if self.json { export_json(seq)?.into_bytes() } else { write_pose(seq)? };
        write_atomic(path, &bytes)
    }

    fn mean_frame(&mut self, path: Option<&Path>) -> Result<AppearanceFrame> {
        let Some(path) = path else { return default_mean_frame() };
        let seq = self.reader.sequence(path)?;
        if seq.frames() > 1 {
            self.warn(&format!("{} has {} frames; using frame 0", path.display(), seq.frames()));
        }
        let (first, _) = ensure_normalized(seq.slice_frames(0..1)).map_err(|e| with_path(path, e))?;
        Ok(AppearanceFrame::from_sequence_frame(&first, 0))
    }

    fn appearance(&self, path: &Path, policy: &TransferPolicy) -> Result<AppearanceFrame> {
        let (seq, _) = self.reader.normalized(path)?;
        extract_appearance(&seq, policy).map_err(|e| with_path(path, e))
    }
}

/// Writes `bytes` next to `path` and renames the file into place.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let io = |source| Error::Io { path: path.to_path_buf(), source };
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(io)?;
    tmp.write_all(bytes).map_err(io)?;
    tmp.as_file().sync_all().map_err(io)?;
    tmp.persist(path).map_err(|e| io(e.error))?;
    Ok(())
}

fn restore_scale(seq: PoseSequence, params: Option<NormalizationParams>, keep_scale: bool) -> PoseSequence {
    match params {
        Some(p) if keep_scale => apply_normalization(&seq, &invert_normalization(&p)),
        _ => seq,
    }
}

fn anonymize(ctx: &mut Ctx, a: &AnonymizeArgs) -> Result<()> {
    let (seq, params) = ctx.reader.normalized(&a.input)?;
    let mean = ctx.mean_frame(a.mean.as_deref())?;
    let policy = TransferPolicy::default().with_hand_anchor(a.hands.into());
    let out = remove_appearance(&seq, &mean, &policy)?;
    ctx.write_pose(&a.output, &restore_scale(out, params, a.keep_scale))
}

fn transfer(ctx: &mut Ctx, a: &TransferArgs) -> Result<()> {
    let (seq, params) = ctx.reader.normalized(&a.input)?;
    let policy = TransferPolicy::default().with_hand_anchor(a.hands.into());
    let target = ctx.appearance(&a.appearance, &policy)?;
    let out = transfer_appearance(&seq, &target, &policy)?;
    ctx.write_pose(&a.output, &restore_scale(out, params, a.keep_scale))
}

fn mean(ctx: &mut Ctx, a: &MeanArgs) -> Result<()> {
    let text = String::from_utf8(read_bytes(&a.manifest)?).map_err(|_| Error::InvalidUtf8("manifest"))?;
    let base = a.manifest.parent().unwrap_or(Path::new("."));
    let paths = parse_manifest(&text, base);
    if paths.is_empty() {
        return Err(Error::Config(format!("manifest {} lists no pose files", a.manifest.display())));
    }
    let reader = &ctx.reader;
    let acc = accumulate_parallel(&paths, a.workers, |p| {
        let (seq, _) = reader.normalized(p)?;
        Ok(seq)
    })?
    .ok_or(Error::EmptyAccumulator)?;
    let frame = acc.finalize()?;
    ctx.write_pose(&a.output, &frame.to_sequence())?;
    ctx.report(&format!("frames_seen: {}\n", acc.frames_seen()));
    Ok(())
}

fn stitch_cmd(ctx: &mut Ctx, a: &StitchArgs) -> Result<()> {
    let clips = a.inputs.iter().map(|p| ctx.reader.normalized(p).map(|(seq, _)| seq)).collect::<Result<Vec<_>>>()?;
    let policy = TransferPolicy::default().with_hand_anchor(a.hands.into());
    let target = a.appearance.as_deref().map(|p| ctx.appearance(p, &policy)).transpose()?;
    let config = StitchConfig {
        transition_frames: a.transition,
        unify_appearance: !a.no_unify,
        target_appearance: target,
        policy,
        ..StitchConfig::default()
    };
    let out = stitch(&clips, &config)?;
    ctx.write_pose(&a.output, &out.pose)?;

    if out.transitions.is_empty() || ctx.quiet {
        return Ok(());
    }
    let other = stitch(&clips, &StitchConfig { unify_appearance: a.no_unify, ..config })?;
    let (unified, raw) = if a.no_unify { (&other, &out) } else { (&out, &other) };
    let report =
        stitch_zone_report(&flow_series(&unified.pose, &[])?, &flow_series(&raw.pose, &[])?, &out.flow_zones())?;
    ctx.report(&report.to_text("unified", "raw"));
    Ok(())
}

fn flow(ctx: &mut Ctx, a: &FlowArgs) -> Result<()> {
    let seq = ctx.reader.sequence(&a.input)?;
    let names: Vec<&str> = a.components.iter().map(String::as_str).collect();
    let series = flow_series(&seq, &names)?;
    write_atomic(&a.csv, series.to_csv().as_bytes())?;
    if !series.flagged.is_empty() {
        ctx.warn(&format!("{} transitions had no keypoint present in both frames", series.flagged.len()));
    }
    Ok(())
}

fn eval(ctx: &mut Ctx, a: &EvalArgs, seed: u64) -> Result<()> {
    let spec = SyntheticCorpusSpec {
        num_signers: a.signers,
        num_sign_classes: a.classes,
        samples_per_cell: a.samples,
        tempo_jitter: a.tempo_jitter,
        seed,
        ..SyntheticCorpusSpec::default()
    };
    let corpus = generate_corpus(&spec)?;
    let ensemble = EnsembleConfig { num_appearances: a.appearances, ..EnsembleConfig::default() };
    let result = run_matrix(&corpus, Mix::default(), &ensemble)?;
    write_atomic(&a.csv, result.to_csv().as_bytes())?;
    ctx.report(&result.to_table());
    Ok(())
}

/// Parses `args` (program name first) and runs the command. Returns the
/// process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = write!(out, "{e}");
                return 0;
            }
            let _ = write!(err, "{e}");
            return 1;
        }
    };
    let remap = match &cli.remap {
        None => Ok(None),
        Some(p) => read_bytes(p)
            .and_then(|b| String::from_utf8(b).map_err(|_| Error::InvalidUtf8("remap table")))
            .and_then(|t| RemapTable::parse(&t))
            .map(Some),
    };
    let result = remap.and_then(|remap| {
        let mut ctx = Ctx { quiet: cli.quiet, json: cli.json, reader: Reader { remap }, out, err };
        match &cli.command {
            Command::Anonymize(a) => anonymize(&mut ctx, a),
            Command::Transfer(a) => transfer(&mut ctx, a),
            Command::Mean(a) => mean(&mut ctx, a),
            Command::Stitch(a) => stitch_cmd(&mut ctx, a),
            Command::Flow(a) => flow(&mut ctx, a),
            Command::Eval(a) => eval(&mut ctx, a, cli.seed),
        }
    });
    match result {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            exit_code(&e)
        }
    }
}
