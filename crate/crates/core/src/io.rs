//! `.pose` container reader/writer, JSON export and landmark remapping.
//!
//! Binary layout, all little-endian:
//!
//! ```text
//! magic "POSE" | version u16 (= 1) | fps f32 | component count u16
//! per component: name (u16 len + UTF-8) | point count u16 | dims u16
//!                | per point: name (u16 len + UTF-8)
//! frames u32 | persons u16
//! coordinates f32[frames][persons][points][dims]
//! confidence  f32[frames][persons][points]
//! ```
//!
//! Writing canonicalizes coordinates of zero-confidence keypoints to 0.0, so
//! the bytes of a written file depend only on the meaningful content.

use std::collections::{HashMap, HashSet};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pose::{validate, ComponentDescriptor, PoseHeader, PoseSequence};

pub const MAGIC: &[u8; 4] = b"POSE";
pub const FORMAT_VERSION: u16 = 1;

struct Reader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8]> {
        let end = self.pos.checked_add(n).ok_or(Error::Truncated { expected: usize::MAX, actual: self.bytes.len() })?;
        if end > self.bytes.len() {
            return Err(Error::Truncated { expected: end, actual: self.bytes.len() });
        }
        let out = &self.bytes[self.pos..end];
        self.pos = end;
        Ok(out)
    }

    fn u16(&mut self) -> Result<u16> {
        Ok(u16::from_le_bytes(self.take(2)?.try_into().unwrap()))
    }

    fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }

    fn f32(&mut self) -> Result<f32> {
        Ok(f32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }

    fn string(&mut self, what: &'static str) -> Result<String> {
        let len = self.u16()? as usize;
        let raw = self.take(len)?;
        String::from_utf8(raw.to_vec()).map_err(|_| Error::InvalidUtf8(what))
    }

    fn f32_block(&mut self, count: usize) -> Result<Vec<f32>> {
        let raw = self
            .take(count.checked_mul(4).ok_or(Error::Truncated { expected: usize::MAX, actual: self.bytes.len() })?)?;
        Ok(raw.chunks_exact(4).map(|c| f32::from_le_bytes(c.try_into().unwrap())).collect())
    }
}

/// Parses a `.pose` file and validates the result.
pub fn read_pose(bytes: &[u8]) -> Result<PoseSequence> {
    read_pose_with_remap(bytes, None)
}

/// Parses a `.pose` file, renaming components and landmarks through `remap`
/// before validation.
pub fn read_pose_with_remap(bytes: &[u8], remap: Option<&RemapTable>) -> Result<PoseSequence> {
    if bytes.len() < MAGIC.len() || &bytes[..4] != MAGIC {
        return Err(Error::NotAPoseFile);
    }
    let mut r = Reader { bytes, pos: 4 };
    let version = r.u16()?;
    if version != FORMAT_VERSION {
        return Err(Error::UnsupportedVersion(version));
    }
    let fps = r.f32()?;
    let count = r.u16()? as usize;
    let mut components = Vec::with_capacity(count);
    for _ in 0..count {
        let name = r.string("component name")?;
        let points = r.u16()? as usize;
        let dims = r.u16()?;
        let mut point_names = Vec::with_capacity(points);
        for _ in 0..points {
            point_names.push(r.string("point name")?);
        }
        components.push(ComponentDescriptor { name, point_names, dims });
    }
    let mut header = PoseHeader { version, fps, components };
    if let Some(table) = remap {
        table.apply(&mut header);
    }
    let header_violations = header.violations();
    if !header_violations.is_empty() {
        return Err(Error::Invalid(header_violations));
    }
    let frames = r.u32()? as usize;
    let persons = r.u16()? as usize;
    let slots = frames
        .checked_mul(persons)
        .and_then(|n| n.checked_mul(header.total_points()))
        .ok_or(Error::Truncated { expected: usize::MAX, actual: bytes.len() })?;
    let payload = slots
        .checked_mul(header.dims() + 1)
        .and_then(|n| n.checked_mul(4))
        .ok_or(Error::Truncated { expected: usize::MAX, actual: bytes.len() })?;
    let expected = r.pos.saturating_add(payload);
    if expected > bytes.len() {
        return Err(Error::Truncated { expected, actual: bytes.len() });
    }
    if expected < bytes.len() {
        return Err(Error::TrailingBytes(bytes.len() - expected));
    }
    let data = r.f32_block(slots * header.dims())?;
    let confidence = r.f32_block(slots)?;
    PoseSequence::new(header, frames, persons, data, confidence)
}

fn put_str(out: &mut Vec<u8>, s: &str) -> Result<()> {
    let len = u16::try_from(s.len()).map_err(|_| Error::Config(format!("name longer than 65535 bytes: {s:.32}...")))?;
    out.extend_from_slice(&len.to_le_bytes());
    out.extend_from_slice(s.as_bytes());
    Ok(())
}

fn to_u16(n: usize, what: &str) -> Result<u16> {
    u16::try_from(n).map_err(|_| Error::Config(format!("{what} {n} does not fit the file format")))
}

/// Canonical serialization of a valid sequence.
pub fn write_pose(seq: &PoseSequence) -> Result<Vec<u8>> {
    let violations = validate(seq);
    if !violations.is_empty() {
        return Err(Error::Invalid(violations));
    }
    let header = seq.header();
    let dims = seq.dims();
    let mut out = Vec::with_capacity(64 + seq.data().len() * 4 + seq.confidence().len() * 4);
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&header.version.to_le_bytes());
    out.extend_from_slice(&header.fps.to_le_bytes());
    out.extend_from_slice(&to_u16(header.components.len(), "component count")?.to_le_bytes());
    for c in &header.components {
        put_str(&mut out, &c.name)?;
        out.extend_from_slice(&to_u16(c.point_names.len(), "point count")?.to_le_bytes());
        out.extend_from_slice(&c.dims.to_le_bytes());
        for p in &c.point_names {
            put_str(&mut out, p)?;
        }
    }
    let frames = u32::try_from(seq.frames()).map_err(|_| Error::Config("too many frames".into()))?;
    out.extend_from_slice(&frames.to_le_bytes());
    out.extend_from_slice(&to_u16(seq.persons(), "person count")?.to_le_bytes());
    for (i, &c) in seq.confidence().iter().enumerate() {
        for &v in &seq.data()[i * dims..(i + 1) * dims] {
            let v = if c == 0.0 { 0.0f32 } else { v };
            out.extend_from_slice(&v.to_le_bytes());
        }
    }
    for &c in seq.confidence() {
        out.extend_from_slice(&c.to_le_bytes());
    }
    Ok(out)
}

#[derive(Serialize, Deserialize)]
struct JsonPose {
    header: PoseHeader,
    /// `[frame][person][keypoint][dim]`
    frames: Vec<Vec<Vec<Vec<f32>>>>,
    /// `[frame][person][keypoint]`
    confidence: Vec<Vec<Vec<f32>>>,
}

/// Human-readable dump of a valid sequence. Missing keypoints are written
/// with canonical 0.0 coordinates.
pub fn export_json(seq: &PoseSequence) -> Result<String> {
    let violations = validate(seq);
    if !violations.is_empty() {
        return Err(Error::Invalid(violations));
    }
    let seq = seq.canonicalized();
    let dims = seq.dims();
    let mut frames = Vec::with_capacity(seq.frames());
    let mut confidence = Vec::with_capacity(seq.frames());
    for f in 0..seq.frames() {
        let mut fp = Vec::with_capacity(seq.persons());
        let mut fc = Vec::with_capacity(seq.persons());
        for p in 0..seq.persons() {
            let (points, conf) = seq.frame(f, p);
            fp.push(points.chunks(dims).map(<[f32]>::to_vec).collect());
            fc.push(conf.to_vec());
        }
        frames.push(fp);
        confidence.push(fc);
    }
    let doc = JsonPose { header: seq.header().clone(), frames, confidence };
    Ok(serde_json::to_string_pretty(&doc)?)
}

/// Inverse of [`export_json`].
pub fn import_json(text: &str) -> Result<PoseSequence> {
    let doc: JsonPose = serde_json::from_str(text)?;
    let frames = doc.frames.len();
    let persons = doc.frames.first().map_or(0, Vec::len);
    let data: Vec<f32> = doc.frames.into_iter().flatten().flatten().flatten().collect();
    let confidence: Vec<f32> = doc.confidence.into_iter().flatten().flatten().collect();
    PoseSequence::new(doc.header, frames, persons, data, confidence)
}

/// Foreign-to-canonical name table, one `name=canonical` pair per line.
/// Blank lines and lines starting with `#` are ignored. Entries apply to
/// component names and landmark names alike.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct RemapTable {
    entries: HashMap<String, String>,
}

impl RemapTable {
    pub fn parse(text: &str) -> Result<Self> {
        let mut entries = HashMap::new();
        let mut seen = HashSet::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let Some((from, to)) = line.split_once('=') else {
                return Err(Error::Remap { line: i + 1, message: format!("expected name=canonical, got {line:?}") });
            };
            let (from, to) = (from.trim(), to.trim());
            if from.is_empty() || to.is_empty() {
                return Err(Error::Remap { line: i + 1, message: "empty name".into() });
            }
            if !seen.insert(from.to_string()) {
                return Err(Error::Remap { line: i + 1, message: format!("duplicate entry for {from:?}") });
            }
            entries.insert(from.to_string(), to.to_string());
        }
        Ok(Self { entries })
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn map<'a>(&'a self, name: &'a str) -> &'a str {
        self.entries.get(name).map_or(name, String::as_str)
    }

    pub fn apply(&self, header: &mut PoseHeader) {
        for c in &mut header.components {
            c.name = self.map(&c.name).to_string();
            for p in &mut c.point_names {
                *p = self.map(p).to_string();
            }
        }
    }
}
