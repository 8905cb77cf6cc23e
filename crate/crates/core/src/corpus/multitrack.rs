use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use walkdir::WalkDir;

use super::wav::read_wav;
use crate::error::{invalid, Error, Result};
use crate::filterbanks::AudioSignal;

/// Source category of a stem.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SourceLabel {
    Bass,
    Drums,
    Other,
    Vocals,
}

impl SourceLabel {
    pub const ALL: [SourceLabel; 4] = [
        SourceLabel::Bass,
        SourceLabel::Drums,
        SourceLabel::Other,
        SourceLabel::Vocals,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            SourceLabel::Bass => "bass",
            SourceLabel::Drums => "drums",
            SourceLabel::Other => "other",
            SourceLabel::Vocals => "vocals",
        }
    }
}

impl fmt::Display for SourceLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for SourceLabel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        SourceLabel::ALL
            .into_iter()
            .find(|l| l.as_str() == s)
            .ok_or_else(|| invalid(format!("unknown source label `{s}`")))
    }
}

/// One recorded stem, either mono or as a left/right pair.
#[derive(Debug, Clone, PartialEq)]
pub enum Stem {
    Mono(AudioSignal),
    Stereo(AudioSignal, AudioSignal),
}

impl Stem {
    pub fn len(&self) -> usize {
        match self {
            Stem::Mono(s) | Stem::Stereo(s, _) => s.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn sample_rate(&self) -> u32 {
        match self {
            Stem::Mono(s) | Stem::Stereo(s, _) => s.sample_rate(),
        }
    }

    /// The stem itself, or the average of its two channels.
    pub fn mono(&self) -> Result<AudioSignal> {
        match self {
            Stem::Mono(s) => Ok(s.clone()),
            Stem::Stereo(l, r) => downmix_mono(l, r),
        }
    }

    fn truncated(self, max_len: usize) -> Self {
        match self {
            Stem::Mono(s) => Stem::Mono(s.truncated(max_len)),
            Stem::Stereo(l, r) => Stem::Stereo(l.truncated(max_len), r.truncated(max_len)),
        }
    }
}

/// `(left + right) / 2`.
pub fn downmix_mono(left: &AudioSignal, right: &AudioSignal) -> Result<AudioSignal> {
    if left.len() != right.len() {
        return Err(invalid(format!(
            "channel lengths differ: {} vs {}",
            left.len(),
            right.len()
        )));
    }
    if left.sample_rate() != right.sample_rate() {
        return Err(invalid("channel sample rates differ"));
    }
    let samples = left
        .samples()
        .iter()
        .zip(right.samples())
        .map(|(l, r)| (l + r) / 2.0)
        .collect();
    AudioSignal::new(samples, left.sample_rate())
}

/// A track made of the four stems bass, drums, other and vocals.
#[derive(Debug, Clone, PartialEq)]
pub struct MultiTrack {
    track_id: String,
    sources: BTreeMap<SourceLabel, Stem>,
    sample_rate: u32,
}

impl MultiTrack {
    pub fn new(track_id: impl Into<String>, sources: BTreeMap<SourceLabel, Stem>) -> Result<Self> {
        let track_id = track_id.into();
        for label in SourceLabel::ALL {
            if !sources.contains_key(&label) {
                return Err(invalid(format!("track `{track_id}` has no `{label}` source")));
            }
        }
        let first = &sources[&SourceLabel::Bass];
        let (len, rate) = (first.len(), first.sample_rate());
        for (label, stem) in &sources {
            if stem.len() != len || stem.sample_rate() != rate {
                return Err(invalid(format!(
                    "track `{track_id}`: `{label}` has {} samples at {} Hz, expected {len} at {rate} Hz",
                    stem.len(),
                    stem.sample_rate()
                )));
            }
            if let Stem::Stereo(l, r) = stem {
                if l.len() != r.len() {
                    return Err(invalid(format!("track `{track_id}`: `{label}` channels differ in length")));
                }
            }
        }
        Ok(Self {
            track_id,
            sources,
            sample_rate: rate,
        })
    }

    pub fn track_id(&self) -> &str {
        &self.track_id
    }

    pub fn sample_rate(&self) -> u32 {
        self.sample_rate
    }

    pub fn len(&self) -> usize {
        self.sources[&SourceLabel::Bass].len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn source(&self, label: SourceLabel) -> &Stem {
        &self.sources[&label]
    }

    pub fn sources(&self) -> &BTreeMap<SourceLabel, Stem> {
        &self.sources
    }

    /// Keeps at most the first `seconds` of every stem.
    pub fn truncated(self, seconds: f64) -> Self {
        let max_len = (seconds * self.sample_rate as f64).round().max(0.0) as usize;
        Self {
            sources: self
                .sources
                .into_iter()
                .map(|(l, s)| (l, s.truncated(max_len)))
                .collect(),
            ..self
        }
    }
}

/// The two mixtures built for one target source.
#[derive(Debug, Clone, PartialEq)]
pub struct Mixtures {
    /// Sum of all four mono sources.
    pub full_mix: AudioSignal,
    /// Sum of the three non-target mono sources.
    pub interference_mix: AudioSignal,
    pub target_mono: AudioSignal,
}

/// Downmixes every stem to mono.
pub fn mono_sources(track: &MultiTrack) -> Result<BTreeMap<SourceLabel, AudioSignal>> {
    track
        .sources
        .iter()
        .map(|(&l, s)| Ok((l, s.mono()?)))
        .collect()
}

pub fn make_mixtures(track: &MultiTrack, target: SourceLabel) -> Result<Mixtures> {
    mixtures_from_mono(&mono_sources(track)?, target)
}

pub(crate) fn mixtures_from_mono(
    mono: &BTreeMap<SourceLabel, AudioSignal>,
    target: SourceLabel,
) -> Result<Mixtures> {
    let target_mono = mono
        .get(&target)
        .ok_or_else(|| invalid(format!("no `{target}` source")))?
        .clone();
    let len = target_mono.len();
    let rate = target_mono.sample_rate();
    let mut interference = vec![0.0; len];
    for (label, signal) in mono {
        if *label != target {
            for (acc, s) in interference.iter_mut().zip(signal.samples()) {
                *acc += s;
            }
        }
    }
    let full: Vec<f64> = interference
        .iter()
        .zip(target_mono.samples())
        .map(|(u, s)| u + s)
        .collect();
    Ok(Mixtures {
        full_mix: AudioSignal::new(full, rate)?,
        interference_mix: AudioSignal::new(interference, rate)?,
        target_mono,
    })
}

fn stem_path(dir: &Path, label: SourceLabel) -> Option<PathBuf> {
    std::fs::read_dir(dir).ok()?.flatten().map(|e| e.path()).find(|p| {
        p.is_file()
            && p.file_stem().and_then(|s| s.to_str()) == Some(label.as_str())
            && p
                .extension()
                .and_then(|e| e.to_str())
                .is_some_and(|e| e.eq_ignore_ascii_case("wav"))
    })
}

/// Loads `<dir>/{bass,drums,other,vocals}.wav`; the track id is the
/// directory name.
pub fn load_multitrack(dir: &Path) -> Result<MultiTrack> {
    let id = dir
        .file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_else(|| dir.display().to_string());
    load_multitrack_as(dir, id)
}

pub fn load_multitrack_as(dir: &Path, track_id: impl Into<String>) -> Result<MultiTrack> {
    let mut sources = BTreeMap::new();
    for label in SourceLabel::ALL {
        let path = stem_path(dir, label).ok_or_else(|| Error::MissingSource {
            label: label.to_string(),
            dir: dir.to_path_buf(),
        })?;
        let mut channels = read_wav(&path)?;
        let stem = match channels.len() {
            1 => Stem::Mono(channels.remove(0)),
            2 => {
                let r = channels.pop().unwrap_or_else(|| unreachable!());
                let l = channels.pop().unwrap_or_else(|| unreachable!());
                Stem::Stereo(l, r)
            }
            n => {
                return Err(Error::Load {
                    path,
                    reason: format!("expected mono or stereo, found {n} channels"),
                })
            }
        };
        sources.insert(label, stem);
    }
    MultiTrack::new(track_id, sources).map_err(|e| Error::Load {
        path: dir.to_path_buf(),
        reason: e.to_string(),
    })
}

/// Finds track directories below `root`: every directory holding at least
/// one stem file. Works for both `Sources/<Subset>/<Track>/` trees and flat
/// per-track layouts. Ids are paths relative to `root` joined with `/`,
/// sorted.
pub fn discover_tracks(root: &Path) -> Result<Vec<(String, PathBuf)>> {
    if !root.is_dir() {
        return Err(Error::Load {
            path: root.to_path_buf(),
            reason: "not a directory".into(),
        });
    }
    let mut found = Vec::new();
    for entry in WalkDir::new(root).follow_links(true).sort_by_file_name() {
        let entry = entry.map_err(|e| Error::Load {
            path: root.to_path_buf(),
            reason: e.to_string(),
        })?;
        if !entry.file_type().is_dir() {
            continue;
        }
        let dir = entry.path();
        if SourceLabel::ALL.iter().any(|&l| stem_path(dir, l).is_some()) {
            let rel = dir.strip_prefix(root).unwrap_or(dir);
            let id = if rel.as_os_str().is_empty() {
                dir.file_name()
                    .map(|n| n.to_string_lossy().into_owned())
                    .unwrap_or_else(|| ".".into())
            } else {
                rel.components()
                    .map(|c| c.as_os_str().to_string_lossy())
                    .collect::<Vec<_>>()
                    .join("/")
            };
            found.push((id, dir.to_path_buf()));
        }
    }
    found.sort();
    Ok(found)
}
