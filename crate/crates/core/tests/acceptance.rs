//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit if any
//! criterion fails.

mod common;

use std::alloc::{GlobalAlloc, Layout, System};
use std::panic::{self, AssertUnwindSafe};
use std::path::PathBuf;
use std::process::Command;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::time::{Duration, Instant};

use common::*;
use pose_appearance::corpus::accumulate_parallel;
use pose_appearance::eval::{generate_corpus, run_matrix, Condition, EnsembleConfig, Mix, SyntheticCorpusSpec, Task};
use pose_appearance::io::{read_pose, write_pose};
use pose_appearance::pose::{BODY, FACE, LEFT_SHOULDER, RIGHT_SHOULDER};
use pose_appearance::skeleton;
use pose_appearance::stitch::{stitch, StitchConfig};
use pose_appearance::{
    extract_appearance, flow_series, normalize::normalize, remove_appearance, stitch_zone_report, transfer_appearance,
    HandAnchor, MeanAccumulator, PoseSequence, TransferPolicy,
};
use rand::Rng;

struct Counting;

static CURRENT: AtomicUsize = AtomicUsize::new(0);
static PEAK: AtomicUsize = AtomicUsize::new(0);

unsafe impl GlobalAlloc for Counting {
    unsafe fn alloc(&self, layout: Layout) -> *mut u8 {
        let p = unsafe { System.alloc(layout) };
        if !p.is_null() {
            let now = CURRENT.fetch_add(layout.size(), Ordering::Relaxed) + layout.size();
            PEAK.fetch_max(now, Ordering::Relaxed);
        }
        p
    }

    unsafe fn dealloc(&self, ptr: *mut u8, layout: Layout) {
        unsafe { System.dealloc(ptr, layout) };
        CURRENT.fetch_sub(layout.size(), Ordering::Relaxed);
    }

    unsafe fn realloc(&self, ptr: *mut u8, layout: Layout, new_size: usize) -> *mut u8 {
        let p = unsafe { System.realloc(ptr, layout, new_size) };
        if !p.is_null() {
            if new_size >= layout.size() {
                let now = CURRENT.fetch_add(new_size - layout.size(), Ordering::Relaxed) + new_size - layout.size();
                PEAK.fetch_max(now, Ordering::Relaxed);
            } else {
                CURRENT.fetch_sub(layout.size() - new_size, Ordering::Relaxed);
            }
        }
        p
    }
}

#[global_allocator]
static GLOBAL: Counting = Counting;

type Check = Result<String, String>;
type Criterion = fn() -> Check;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(elapsed: Duration, limit: Duration) -> Result<(), String> {
    ensure(elapsed < limit, || format!("took {elapsed:.2?}, limit {limit:?}"))
}

fn body_face(seq: &PoseSequence) -> Vec<usize> {
    let h = seq.header();
    [BODY, FACE].iter().filter_map(|c| h.component_range(c)).flatten().collect()
}

fn identity() -> Check {
    let start = Instant::now();
    let mut worst = 0.0f64;
    let mut r = rng(1);
    let mut cases = 0;
    for header in layouts() {
        for frames in [1, 2, 17] {
            let seq = random_sequence(&mut r, &header, frames);
            for policy in
                [TransferPolicy::default(), TransferPolicy::default().with_hand_anchor(HandAnchor::PassThrough)]
            {
                let own = extract_appearance(&seq, &policy).map_err(|e| e.to_string())?;
                let out = transfer_appearance(&seq, &own, &policy).map_err(|e| e.to_string())?;
                worst = worst.max(max_abs_diff(out.data(), seq.data()));
                cases += 1;
            }
        }
    }
    ensure(worst <= 1e-6, || format!("max |out - in| = {worst:e}"))?;
    within(start.elapsed(), Duration::from_secs(1))?;
    Ok(format!("{cases} fixtures, max |out - in| = {worst:e}"))
}

fn motion_preservation() -> Check {
    let start = Instant::now();
    let mut r = rng(2);
    let (mut delta, mut flow) = (0.0f64, 0.0f64);
    let all = layouts();
    for i in 0..100 {
        let header = &all[i % all.len()];
        let frames = r.random_range(2..40);
        let seq = random_sequence(&mut r, header, frames);
        let target = random_appearance(&mut r, header);
        let out = transfer_appearance(&seq, &target, &TransferPolicy::default()).map_err(|e| e.to_string())?;
        for k in body_face(&seq) {
            for t in 1..frames {
                for d in 0..seq.dims() {
                    let a = out.point(t, 0, k)[d] as f64 - out.point(t - 1, 0, k)[d] as f64;
                    let b = seq.point(t, 0, k)[d] as f64 - seq.point(t - 1, 0, k)[d] as f64;
                    delta = delta.max((a - b).abs());
                }
            }
        }
        let (fa, fb) = (flow_series(&out, &[]).unwrap(), flow_series(&seq, &[]).unwrap());
        for (a, b) in fa.values.iter().zip(&fb.values) {
            flow = flow.max((a - b).abs());
        }
    }
    ensure(delta <= 1e-6, || format!("max frame-delta difference {delta:e}"))?;
    ensure(flow <= 1e-5, || format!("max flow difference {flow:e}"))?;
    within(start.elapsed(), Duration::from_secs(10))?;
    Ok(format!("100 sequences, max delta diff {delta:e}, max flow diff {flow:e}"))
}

fn hand_preservation() -> Check {
    let mut r = rng(3);
    let mut worst = 0.0f64;
    let all = layouts();
    for i in 0..100 {
        let header = &all[i % all.len()];
        let seq = random_sequence(&mut r, header, 8);
        let target = random_appearance(&mut r, header);
        let anchor = if i % 2 == 0 { HandAnchor::RigidFollowWrist } else { HandAnchor::PassThrough };
        let out = transfer_appearance(&seq, &target, &TransferPolicy::default().with_hand_anchor(anchor))
            .map_err(|e| e.to_string())?;
        for (a, b) in hand_distances(&out).iter().zip(hand_distances(&seq)) {
            worst = worst.max((a - b).abs());
        }
    }
    ensure(worst <= 1e-6, || format!("max within-hand distance change {worst:e}"))?;
    Ok(format!("100 transfers, max within-hand distance change {worst:e}"))
}

fn idempotence() -> Check {
    let mut r = rng(4);
    let mut worst = 0.0f64;
    for header in layouts() {
        let corpus: Vec<PoseSequence> = (0..5).map(|_| random_sequence(&mut r, &header, 6)).collect();
        let mean = corpus
            .iter()
            .try_fold(MeanAccumulator::empty(&header), |a, s| a.accumulate(s))
            .and_then(|a| a.finalize())
            .map_err(|e| e.to_string())?;
        for _ in 0..10 {
            let seq = random_sequence(&mut r, &header, 9);
            let policy = TransferPolicy::default();
            let once = remove_appearance(&seq, &mean, &policy).map_err(|e| e.to_string())?;
            let twice = remove_appearance(&once, &mean, &policy).map_err(|e| e.to_string())?;
            worst = worst.max(max_abs_diff(once.data(), twice.data()));
            for k in body_face(&seq) {
                ensure(once.point(0, 0, k) == mean.point(k), || format!("frame 0 keypoint {k} differs from the mean"))?;
            }
        }
    }
    ensure(worst <= 1e-6, || format!("max |twice - once| = {worst:e}"))?;
    Ok(format!("50 sequences, max |twice - once| = {worst:e}, frame 0 equals mean exactly"))
}

fn mutate(r: &mut impl Rng, bytes: &[u8]) -> Vec<u8> {
    let mut b = bytes.to_vec();
    match r.random_range(0..6) {
        0 => {
            for _ in 0..r.random_range(1..4) {
                let i = r.random_range(0..b.len());
                b[i] ^= 1 << r.random_range(0..8);
            }
        }
        1 => b.truncate(r.random_range(0..b.len())),
        2 => {
            let i = r.random_range(0..=b.len());
            let extra: Vec<u8> = (0..r.random_range(1..16)).map(|_| r.random()).collect();
            b.splice(i..i, extra);
        }
        3 => {
            // overwrite a possible length or count field
            let i = r.random_range(0..b.len().saturating_sub(4).max(1));
            let v: u32 = if r.random_bool(0.5) { r.random() } else { r.random_range(0..300) };
            for (j, x) in v.to_le_bytes().iter().enumerate() {
                if let Some(slot) = b.get_mut(i + j) {
                    *slot = *x;
                }
            }
        }
        4 => {
            let i = r.random_range(0..b.len());
            b[i] = r.random();
        }
        _ => {
            let i = r.random_range(0..b.len());
            let n = r.random_range(1..8).min(b.len() - i);
            b.drain(i..i + n);
        }
    }
    b
}

fn format_round_trip() -> Check {
    let mut r = rng(5);
    let mut corpus = Vec::new();
    for _ in 0..1000 {
        let seq = random_any_sequence(&mut r);
        let bytes = write_pose(&seq).map_err(|e| e.to_string())?;
        let back = read_pose(&bytes).map_err(|e| e.to_string())?;
        ensure(back == seq, || "read(write(seq)) != seq".into())?;
        let again = write_pose(&back).map_err(|e| e.to_string())?;
        ensure(again == bytes, || "write(read(bytes)) != bytes".into())?;
        corpus.push(bytes);
    }
    let (mut crashes, mut rejected) = (0, 0);
    for i in 0..10_000 {
        let mutated = mutate(&mut r, &corpus[i % corpus.len()]);
        let outcome = panic::catch_unwind(|| match read_pose(&mutated) {
            Ok(seq) => {
                let _ = write_pose(&seq);
                false
            }
            Err(_) => true,
        });
        match outcome {
            Ok(true) => rejected += 1,
            Ok(false) => {}
            Err(_) => crashes += 1,
        }
    }
    ensure(crashes == 0, || format!("{crashes} crashes in 10000 mutated files"))?;
    Ok(format!("1000 exact round trips, 10000 mutations: 0 crashes, {rejected} rejected"))
}

/// Normalized sequence with random confidences; shoulders stay confident.
fn weighted_sequence(r: &mut impl Rng, header: &pose_appearance::PoseHeader, frames: usize, seed: u64) -> PoseSequence {
    let seq = random_sequence(&mut rng(seed), header, frames);
    let shoulders = [header.body_point(LEFT_SHOULDER).unwrap(), header.body_point(RIGHT_SHOULDER).unwrap()];
    let kp = header.total_points();
    let conf: Vec<f32> = (0..frames * kp)
        .map(|i| {
            if shoulders.contains(&(i % kp)) {
                r.random_range(0.5..1.0)
            } else if r.random_bool(0.1) {
                0.0
            } else {
                r.random_range(0.05..1.0)
            }
        })
        .collect();
    PoseSequence::new(header.clone(), frames, 1, seq.data().to_vec(), conf).unwrap()
}

/// In-memory weighted mean followed by shoulder normalization, in f64.
fn brute_force_mean(seqs: &[PoseSequence]) -> Vec<f64> {
    let header = seqs[0].header();
    let (kp, dims) = (header.total_points(), header.dims());
    let mut sum = vec![0.0f64; kp * dims];
    let mut weight = vec![0.0f64; kp];
    for s in seqs {
        for t in 0..s.frames() {
            for k in 0..kp {
                let c = s.conf(t, 0, k) as f64;
                weight[k] += c;
                for d in 0..dims {
                    sum[k * dims + d] += c * s.point(t, 0, k)[d] as f64;
                }
            }
        }
    }
    let mean: Vec<f64> =
        (0..kp * dims).map(|i| if weight[i / dims] > 0.0 { sum[i] / weight[i / dims] } else { 0.0 }).collect();
    let (l, rr) = (header.body_point(LEFT_SHOULDER).unwrap(), header.body_point(RIGHT_SHOULDER).unwrap());
    let width = (0..dims).map(|d| (mean[l * dims + d] - mean[rr * dims + d]).powi(2)).sum::<f64>().sqrt();
    (0..kp * dims)
        .map(|i| {
            let d = i % dims;
            let mid = (mean[l * dims + d] + mean[rr * dims + d]) / 2.0;
            if weight[i / dims] > 0.0 {
                (mean[i] - mid) / width
            } else {
                0.0
            }
        })
        .collect()
}

fn synthetic_chunk(header: &pose_appearance::PoseHeader, index: usize, frames: usize) -> PoseSequence {
    let rest = skeleton::rest_frame(header);
    let dims = header.dims();
    let shoulders = [header.body_point(LEFT_SHOULDER).unwrap(), header.body_point(RIGHT_SHOULDER).unwrap()];
    let mut data = Vec::with_capacity(frames * rest.points().len());
    for t in 0..frames {
        let phase = ((index * frames + t) as f32 * 0.01).sin() * 0.1;
        data.extend(
            rest.points().iter().enumerate().map(|(i, v)| if shoulders.contains(&(i / dims)) { *v } else { v + phase }),
        );
    }
    PoseSequence::new(header.clone(), frames, 1, data, vec![1.0; frames * header.total_points()]).unwrap()
}

fn mean_oracle() -> Check {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let header = skeleton::holistic(2);
    let mut r = rng(6);
    let mut paths: Vec<PathBuf> = Vec::new();
    let mut seqs = Vec::new();
    for i in 0..200 {
        let frames = r.random_range(1..30);
        // stored un-normalized, as a recording would be
        let seq = weighted_sequence(&mut r, &header, frames, 1000 + i).map_coords(|d, v| v * 180.0 + [320.0, 240.0][d]);
        let path = dir.path().join(format!("{i:03}.pose"));
        std::fs::write(&path, write_pose(&seq).unwrap()).map_err(|e| e.to_string())?;
        seqs.push(normalize(&seq).unwrap().0);
        paths.push(path);
    }
    let load = |p: &PathBuf| -> pose_appearance::Result<PoseSequence> {
        let bytes = std::fs::read(p).map_err(|source| pose_appearance::Error::Io { path: p.clone(), source })?;
        Ok(normalize(&read_pose(&bytes)?)?.0)
    };
    let mut outputs = Vec::new();
    for workers in [1, 2, 3, 8] {
        let acc = accumulate_parallel(&paths, workers, load).map_err(|e| e.to_string())?.ok_or("empty")?;
        outputs.push(acc.finalize().map_err(|e| e.to_string())?);
    }
    let oracle = brute_force_mean(&seqs);
    let worst = outputs[0].points().iter().zip(&oracle).map(|(a, b)| (*a as f64 - b).abs()).fold(0.0, f64::max);
    ensure(worst <= 1e-6, || format!("streaming vs brute force: {worst:e}"))?;
    let bytes: Vec<Vec<u8>> = outputs.iter().map(|o| write_pose(&o.to_sequence()).unwrap()).collect();
    ensure(bytes.windows(2).all(|w| w[0] == w[1]), || "outputs differ across worker counts".into())?;

    // one million frames in chunks of 1000
    let start = Instant::now();
    let chunks: Vec<usize> = (0..1000).collect();
    let baseline = CURRENT.load(Ordering::Relaxed);
    PEAK.store(baseline, Ordering::Relaxed);
    let acc = accumulate_parallel(&chunks, 4, |&i| Ok(synthetic_chunk(&header, i, 1000)))
        .map_err(|e| e.to_string())?
        .ok_or("empty")?;
    let peak = PEAK.load(Ordering::Relaxed) - baseline;
    let elapsed = start.elapsed();
    ensure(acc.frames_seen() == 1_000_000, || format!("frames_seen = {}", acc.frames_seen()))?;
    // four workers each holding one 1000-frame chunk plus their accumulators
    let budget = 16 << 20;
    ensure(peak <= budget, || format!("peak allocation {peak} bytes exceeds {budget}"))?;
    within(elapsed, Duration::from_secs(60))?;
    Ok(format!(
        "200 files: max diff {worst:e}, identical for 1/2/3/8 workers; 1M frames in {elapsed:.2?}, peak {:.2} MiB",
        peak as f64 / (1 << 20) as f64
    ))
}

fn stitching_smoothness() -> Check {
    let spec = SyntheticCorpusSpec {
        num_signers: 10,
        num_sign_classes: 8,
        samples_per_cell: 2,
        ..SyntheticCorpusSpec::default()
    };
    let corpus = generate_corpus(&spec).map_err(|e| e.to_string())?;
    let clip = |signer: usize, class: usize| {
        corpus.train.iter().find(|s| s.signer == signer && s.class == class).map(|s| s.pose.clone()).unwrap()
    };
    let (mut zones, mut outside) = (0, 0.0f64);
    let mut margin = f64::INFINITY;
    for pair in 0..5 {
        let (a, b) = (2 * pair, 2 * pair + 1);
        let clips = vec![clip(a, 0), clip(b, 1), clip(a, 2), clip(b, 3)];
        let unified = stitch(&clips, &StitchConfig::default()).map_err(|e| e.to_string())?;
        let raw = stitch(&clips, &StitchConfig { unify_appearance: false, ..StitchConfig::default() })
            .map_err(|e| e.to_string())?;
        let report = stitch_zone_report(
            &flow_series(&unified.pose, &[]).unwrap(),
            &flow_series(&raw.pose, &[]).unwrap(),
            &unified.flow_zones(),
        )
        .map_err(|e| e.to_string())?;
        for z in &report.zones {
            ensure(z.peak_a < z.peak_b, || {
                format!("signers {a}/{b} zone {:?}: peak {} vs {}", z.zone, z.peak_a, z.peak_b)
            })?;
            margin = margin.min(z.peak_b - z.peak_a);
            zones += 1;
        }
        outside = outside.max(report.outside_max_abs_diff);
    }
    ensure(outside <= 1e-6, || format!("flow outside zones differs by {outside:e}"))?;
    Ok(format!("{zones} zones all lower when unified (min margin {margin:.4}); outside-zone diff {outside:e}"))
}

fn binomial_band(p: f64, n: usize) -> f64 {
    3.0 * (p * (1.0 - p) / n as f64).sqrt()
}

fn privacy_utility() -> Check {
    let start = Instant::now();
    let ensemble = EnsembleConfig::default();
    let still = generate_corpus(&SyntheticCorpusSpec { tempo_jitter: 0.0, seed: 11, ..SyntheticCorpusSpec::default() })
        .map_err(|e| e.to_string())?;
    let no_motion_id = run_matrix(&still, Mix::default(), &ensemble).map_err(|e| e.to_string())?;
    let jitter =
        generate_corpus(&SyntheticCorpusSpec { tempo_jitter: 0.4, seed: 11, ..SyntheticCorpusSpec::default() })
            .map_err(|e| e.to_string())?;
    let with_motion_id = run_matrix(&jitter, Mix::default(), &ensemble).map_err(|e| e.to_string())?;

    let chance = 1.0 / 31.0;
    let n = no_motion_id.test_samples;
    let signer = |m: &pose_appearance::eval::MatrixResult, c: Condition| m.accuracy(Task::Signer, c, c).unwrap();
    let orig = signer(&no_motion_id, Condition::Original);
    let anon = signer(&no_motion_id, Condition::Anonymized);
    ensure(orig >= 0.9, || format!("original/original signer accuracy {orig:.4} < 0.9"))?;
    let band = binomial_band(chance, n);
    ensure((anon - chance).abs() <= band, || format!("anonymized {anon:.4} outside chance {chance:.4} +- {band:.4}"))?;

    let (o, a, t) = (
        signer(&with_motion_id, Condition::Original),
        signer(&with_motion_id, Condition::Anonymized),
        signer(&with_motion_id, Condition::Transferred),
    );
    ensure(o > a && a > t && t > chance, || format!("ordering violated: {o:.4} > {a:.4} > {t:.4} > {chance:.4}"))?;

    for m in [&no_motion_id, &with_motion_id] {
        for train in Condition::TRAIN {
            let before = m.accuracy(Task::Sign, train, Condition::Original).unwrap();
            for test in [Condition::Anonymized, Condition::Transferred] {
                let after = m.accuracy(Task::Sign, train, test).unwrap();
                ensure(before == after, || format!("sign accuracy {} -> {} ({:?}/{:?})", before, after, train, test))?;
            }
        }
    }
    within(start.elapsed(), Duration::from_secs(120))?;
    Ok(format!(
        "no tempo signal: orig {:.2}%, anon {:.2}% (chance {:.2}% +- {:.2}); tempo jitter: {:.2}% > {:.2}% > {:.2}% > {:.2}%; sign accuracy unchanged",
        orig * 100.0,
        anon * 100.0,
        chance * 100.0,
        band * 100.0,
        o * 100.0,
        a * 100.0,
        t * 100.0,
        chance * 100.0
    ))
}

fn run_cli(args: &[&str]) -> Result<Vec<u8>, String> {
    let out = Command::new(env!("CARGO_BIN_EXE_pose-appearance")).args(args).output().map_err(|e| e.to_string())?;
    ensure(out.status.success(), || format!("{args:?} failed: {}", String::from_utf8_lossy(&out.stderr)))?;
    Ok(out.stdout)
}

fn cli_determinism() -> Check {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let d = dir.path();
    let p = |name: &str| d.join(name).to_str().unwrap().to_string();
    let header = skeleton::holistic(2);
    let mut r = rng(9);
    let mut manifest = String::new();
    for i in 0..6 {
        let seq = random_sequence(&mut r, &header, 10).map_coords(|_, v| v * 150.0 + 400.0);
        std::fs::write(d.join(format!("in{i}.pose")), write_pose(&seq).unwrap()).map_err(|e| e.to_string())?;
        manifest.push_str(&format!("in{i}.pose\n"));
    }
    std::fs::write(d.join("manifest.txt"), manifest).map_err(|e| e.to_string())?;

    let commands: Vec<(Vec<String>, &str)> = vec![
        (vec!["anonymize".into(), "--input".into(), p("in0.pose"), "--output".into(), p("OUT")], "anonymize"),
        (
            vec![
                "anonymize".into(),
                "--input".into(),
                p("in0.pose"),
                "--output".into(),
                p("OUT"),
                "--keep-scale".into(),
                "--json".into(),
            ],
            "anonymize --json",
        ),
        (
            vec![
                "transfer".into(),
                "--input".into(),
                p("in1.pose"),
                "--appearance".into(),
                p("in2.pose"),
                "--output".into(),
                p("OUT"),
            ],
            "transfer",
        ),
        (
            vec![
                "mean".into(),
                "--manifest".into(),
                p("manifest.txt"),
                "--output".into(),
                p("OUT"),
                "--workers".into(),
                "4".into(),
            ],
            "mean",
        ),
        (
            vec![
                "stitch".into(),
                "--inputs".into(),
                p("in0.pose"),
                p("in3.pose"),
                p("in4.pose"),
                "--output".into(),
                p("OUT"),
            ],
            "stitch",
        ),
        (vec!["flow".into(), "--input".into(), p("in5.pose"), "--csv".into(), p("OUT")], "flow"),
        (vec!["eval".into(), "--seed".into(), "3".into(), "--csv".into(), p("OUT")], "eval"),
    ];
    let mut names = Vec::new();
    for (args, name) in &commands {
        let mut runs = Vec::new();
        for run in 0..2 {
            let out = p(&format!("out-{}-{run}", names.len()));
            let args: Vec<&str> =
                args.iter().map(|a| if a.ends_with("OUT") { out.as_str() } else { a.as_str() }).collect();
            let stdout = run_cli(&args)?;
            runs.push((stdout, std::fs::read(&out).map_err(|e| e.to_string())?));
        }
        ensure(runs[0] == runs[1], || format!("{name}: outputs differ between runs"))?;
        names.push(*name);
    }
    Ok(format!("byte-identical twice: {}", names.join(", ")))
}

fn main() {
    let criteria: [(&str, Criterion); 9] = [
        ("identity", identity),
        ("motion preservation", motion_preservation),
        ("hand preservation", hand_preservation),
        ("anonymization idempotence", idempotence),
        ("format round trip and fuzz", format_round_trip),
        ("mean frame oracle", mean_oracle),
        ("stitching smoothness", stitching_smoothness),
        ("privacy/utility tradeoff", privacy_utility),
        ("CLI determinism", cli_determinism),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = panic::catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|_| Err("panicked".into()));
        let elapsed = start.elapsed();
        match outcome {
            Ok(detail) => println!("criterion {} PASS {name}: {detail} [{elapsed:.2?}]", i + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {} FAIL {name}: {detail} [{elapsed:.2?}]", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
