//! Song and reference-annotation loading.
//!
//! Two song formats are accepted: JSON objects
//! `{"id": ..., "beats": [labels], "frontiers": [beats]}` and CSV with one
//! chord label per line (the line number is the 1-based beat index; a second
//! column is ignored). Labels run through the chord grammar and silence
//! replacement at load time.

use std::fs;
use std::path::Path;

use anyhow::{bail, Context, Result};
use polyseg::{parse_chord_label, preprocess_sequence, BeatSequence, ChordToken};
use serde::Deserialize;

pub struct SongFile {
    pub id: String,
    pub sequence: BeatSequence,
    pub frontiers: Option<Vec<usize>>,
    /// Silence tokens replaced during preprocessing (one-way).
    pub silences_replaced: usize,
}

#[derive(Deserialize)]
struct SongJson {
    id: Option<String>,
    beats: Vec<String>,
    #[serde(default)]
    frontiers: Option<Vec<usize>>,
}

pub fn load_song(path: &Path) -> Result<SongFile> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let stem = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| path.display().to_string());
    let is_json = path.extension().is_some_and(|e| e == "json")
        || text.trim_start().starts_with('{');
    let (id, labels, frontiers) = if is_json {
        let song: SongJson = serde_json::from_str(&text)
            .with_context(|| format!("parsing {} as JSON", path.display()))?;
        (song.id.unwrap_or(stem), song.beats, song.frontiers)
    } else {
        let mut lines: Vec<&str> = text.lines().collect();
        while lines.last().is_some_and(|l| l.trim().is_empty()) {
            lines.pop();
        }
        let labels = lines
            .iter()
            .map(|line| {
                line.split(',')
                    .next()
                    .unwrap_or_default()
                    .trim()
                    .to_string()
            })
            .collect();
        (stem, labels, None)
    };
    build_song(path, id, &labels, frontiers)
}

fn build_song(
    path: &Path,
    id: String,
    labels: &[String],
    frontiers: Option<Vec<usize>>,
) -> Result<SongFile> {
    if labels.is_empty() {
        bail!("{}: no beats", path.display());
    }
    let mut tokens = Vec::with_capacity(labels.len());
    for (i, label) in labels.iter().enumerate() {
        let token = parse_chord_label(label)
            .with_context(|| format!("{}: beat {}", path.display(), i + 1))?;
        tokens.push(token);
    }
    let silences_replaced = tokens
        .iter()
        .filter(|t| matches!(t, ChordToken::Silence))
        .count();
    let sequence = preprocess_sequence(&tokens)
        .with_context(|| format!("{}: preprocessing", path.display()))?;
    if let Some(frontiers) = &frontiers {
        validate_frontiers(frontiers, sequence.len())
            .with_context(|| format!("{}: frontiers", path.display()))?;
    }
    Ok(SongFile {
        id,
        sequence,
        frontiers,
        silences_replaced,
    })
}

pub fn validate_frontiers(frontiers: &[usize], beats: usize) -> Result<()> {
    for pair in frontiers.windows(2) {
        if pair[0] >= pair[1] {
            bail!("frontier list must be strictly increasing");
        }
    }
    for &f in frontiers {
        if f <= 1 || f > beats {
            bail!("frontier {f} outside (1, {beats}]");
        }
    }
    Ok(())
}

/// All song files (`.json` or `.csv`) of a directory, sorted by file name.
pub fn collect_song_paths(dir: &Path) -> Result<Vec<std::path::PathBuf>> {
    let mut paths: Vec<_> = fs::read_dir(dir)
        .with_context(|| format!("reading directory {}", dir.display()))?
        .filter_map(|entry| entry.ok().map(|e| e.path()))
        .filter(|p| {
            p.extension()
                .is_some_and(|e| e == "json" || e == "csv")
        })
        .collect();
    paths.sort();
    if paths.is_empty() {
        bail!("no .json or .csv songs under {}", dir.display());
    }
    Ok(paths)
}

/// Reference frontiers for one song: either a bare JSON array, a song JSON
/// object with a `frontiers` field, or a text file with one beat per line.
pub fn load_reference(dir: &Path, stem: &str, beats: usize) -> Result<Vec<usize>> {
    for ext in ["json", "txt", "csv"] {
        let candidate = dir.join(format!("{stem}.{ext}"));
        if !candidate.exists() {
            continue;
        }
        let text = fs::read_to_string(&candidate)
            .with_context(|| format!("reading {}", candidate.display()))?;
        let frontiers: Vec<usize> = if ext == "json" {
            if text.trim_start().starts_with('[') {
                serde_json::from_str(&text)
                    .with_context(|| format!("parsing {}", candidate.display()))?
            } else {
                let song: SongJson = serde_json::from_str(&text)
                    .with_context(|| format!("parsing {}", candidate.display()))?;
                song.frontiers
                    .with_context(|| format!("{}: no frontiers field", candidate.display()))?
            }
        } else {
            text.lines()
                .map(str::trim)
                .filter(|l| !l.is_empty())
                .map(|l| l.parse::<usize>().with_context(|| format!("{}: {l:?}", candidate.display())))
                .collect::<Result<_>>()?
        };
        validate_frontiers(&frontiers, beats)
            .with_context(|| format!("{}", candidate.display()))?;
        return Ok(frontiers);
    }
    bail!("no reference for {stem:?} under {}", dir.display());
}
