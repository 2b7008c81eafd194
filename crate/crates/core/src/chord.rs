//! The 24-triad chord alphabet and label parsing.
//!
//! Every musical element is one of the 24 major/minor perfect triads. Labels
//! use a root letter `A`-`G`, an optional single `#`/`b` accidental
//! (enharmonics merged, `Db == C#`) and a mode suffix. `N` marks a silence,
//! which never survives preprocessing.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::Error;

/// Triad quality.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Major,
    Minor,
}

/// One of the 24 major/minor perfect triads.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Chord {
    pitch_class: u8,
    mode: Mode,
}

const PITCH_NAMES: [&str; 12] = [
    "C", "C#", "D", "D#", "E", "F", "F#", "G", "G#", "A", "A#", "B",
];

impl Chord {
    pub fn new(pitch_class: u8, mode: Mode) -> Self {
        Chord {
            pitch_class: pitch_class % 12,
            mode,
        }
    }

    pub fn pitch_class(self) -> u8 {
        self.pitch_class
    }

    pub fn mode(self) -> Mode {
        self.mode
    }

    /// Bijective index onto 0..24: pitch class plus 12 for minor triads.
    pub fn index(self) -> u8 {
        self.pitch_class + 12 * (self.mode == Mode::Minor) as u8
    }

    pub fn from_index(index: u8) -> Self {
        debug_assert!(index < 24);
        Chord {
            pitch_class: index % 12,
            mode: if index < 12 { Mode::Major } else { Mode::Minor },
        }
    }

    /// Canonical label, sharp spelling: `"C#"`, `"Am"`.
    pub fn render(self) -> String {
        let name = PITCH_NAMES[self.pitch_class as usize];
        match self.mode {
            Mode::Major => name.to_string(),
            Mode::Minor => format!("{name}m"),
        }
    }

    pub fn all() -> impl Iterator<Item = Chord> {
        (0..24).map(Chord::from_index)
    }
}

impl fmt::Display for Chord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

impl fmt::Debug for Chord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Chord({})", self.render())
    }
}

impl Serialize for Chord {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.render())
    }
}

impl<'de> Deserialize<'de> for Chord {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let text = String::deserialize(deserializer)?;
        match parse_chord_label(&text) {
            Ok(ChordToken::Chord(chord)) => Ok(chord),
            _ => Err(serde::de::Error::custom(format!(
                "not a chord label: {text:?}"
            ))),
        }
    }
}

/// Outcome of parsing one annotation token: a triad or a silence marker.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ChordToken {
    Chord(Chord),
    Silence,
}

/// Parse a single chord label.
///
/// Roots are `A`-`G` with an optional `#` or `b`; suffixes `""`, `"maj"`,
/// `":maj"` map to major and `"m"`, `"min"`, `":min"` to minor. `"N"`
/// (any case) is a silence marker. Anything else is an error carrying the
/// offending text and the offset of the first bad character.
pub fn parse_chord_label(text: &str) -> Result<ChordToken, Error> {
    let trimmed = text.trim();
    if trimmed.eq_ignore_ascii_case("n") {
        return Ok(ChordToken::Silence);
    }
    let err = |position: usize| Error::ChordParse {
        text: text.to_string(),
        position,
    };
    let mut chars = trimmed.char_indices();
    let (_, root) = chars.next().ok_or_else(|| err(0))?;
    let mut pitch: i16 = match root {
        'C' => 0,
        'D' => 2,
        'E' => 4,
        'F' => 5,
        'G' => 7,
        'A' => 9,
        'B' => 11,
        _ => return Err(err(0)),
    };
    let mut rest = chars.as_str();
    let mut offset = 1;
    match rest.as_bytes().first() {
        Some(b'#') => {
            pitch += 1;
            rest = &rest[1..];
            offset += 1;
        }
        Some(b'b') => {
            pitch -= 1;
            rest = &rest[1..];
            offset += 1;
        }
        _ => {}
    }
    let mode = match rest {
        "" | "maj" | ":maj" => Mode::Major,
        "m" | "min" | ":min" => Mode::Minor,
        _ => return Err(err(offset)),
    };
    Ok(ChordToken::Chord(Chord::new(
        pitch.rem_euclid(12) as u8,
        mode,
    )))
}

/// A beat-synchronous chord sequence: one triad per beat, silences resolved.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BeatSequence {
    chords: Vec<Chord>,
}

impl BeatSequence {
    pub fn new(chords: Vec<Chord>) -> Result<Self, Error> {
        if chords.is_empty() {
            return Err(Error::EmptyContent);
        }
        Ok(BeatSequence { chords })
    }

    pub fn chords(&self) -> &[Chord] {
        &self.chords
    }

    /// Beat count T.
    pub fn len(&self) -> usize {
        self.chords.len()
    }

    pub fn is_empty(&self) -> bool {
        self.chords.is_empty()
    }
}

/// Resolve silence markers: each silence takes the nearest preceding chord,
/// and opening silences take the first chord of the song.
pub fn preprocess_sequence(tokens: &[ChordToken]) -> Result<BeatSequence, Error> {
    let first = tokens
        .iter()
        .find_map(|t| match t {
            ChordToken::Chord(c) => Some(*c),
            ChordToken::Silence => None,
        })
        .ok_or(Error::EmptyContent)?;
    let mut previous = first;
    let chords = tokens
        .iter()
        .map(|t| match t {
            ChordToken::Chord(c) => {
                previous = *c;
                *c
            }
            ChordToken::Silence => previous,
        })
        .collect();
    BeatSequence::new(chords)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn chord(label: &str) -> Chord {
        match parse_chord_label(label) {
            Ok(ChordToken::Chord(c)) => c,
            other => panic!("expected chord for {label:?}, got {other:?}"),
        }
    }

    #[test]
    fn parses_reference_labels() {
        assert_eq!(chord("C"), Chord::new(0, Mode::Major));
        assert_eq!(chord("Am"), Chord::new(9, Mode::Minor));
        assert_eq!(chord("Db"), Chord::new(1, Mode::Major));
        assert_eq!(chord("C#"), Chord::new(1, Mode::Major));
        assert_eq!(chord("Gmin"), Chord::new(7, Mode::Minor));
        assert_eq!(chord("F:min"), Chord::new(5, Mode::Minor));
        assert_eq!(chord("Bb:maj"), Chord::new(10, Mode::Major));
        assert_eq!(chord("Cb"), Chord::new(11, Mode::Major));
    }

    #[test]
    fn silence_is_case_insensitive() {
        assert_eq!(parse_chord_label("N"), Ok(ChordToken::Silence));
        assert_eq!(parse_chord_label("n"), Ok(ChordToken::Silence));
    }

    #[test]
    fn rejects_unknown_labels() {
        for bad in ["H7", "C7", "Cdim", "", "c", "A##", "Gsus4"] {
            assert!(
                matches!(parse_chord_label(bad), Err(Error::ChordParse { .. })),
                "{bad:?} should not parse"
            );
        }
        match parse_chord_label("H7") {
            Err(Error::ChordParse { text, position }) => {
                assert_eq!(text, "H7");
                assert_eq!(position, 0);
            }
            other => panic!("unexpected: {other:?}"),
        }
    }

    #[test]
    fn index_round_trips_all_24() {
        for i in 0..24 {
            let c = Chord::from_index(i);
            assert_eq!(c.index(), i);
            assert_eq!(chord(&c.render()), c);
        }
    }

    #[test]
    fn preprocess_replaces_silences() {
        let tokens = [
            ChordToken::Chord(chord("C")),
            ChordToken::Silence,
            ChordToken::Chord(chord("G")),
        ];
        let seq = preprocess_sequence(&tokens).unwrap();
        assert_eq!(seq.chords(), &[chord("C"), chord("C"), chord("G")]);
    }

    #[test]
    fn preprocess_fills_opening_silences_with_first_chord() {
        let tokens = [
            ChordToken::Silence,
            ChordToken::Silence,
            ChordToken::Chord(chord("F")),
        ];
        let seq = preprocess_sequence(&tokens).unwrap();
        assert_eq!(seq.chords(), &[chord("F"), chord("F"), chord("F")]);
    }

    #[test]
    fn preprocess_is_identity_without_silences() {
        let tokens = [
            ChordToken::Chord(chord("C")),
            ChordToken::Chord(chord("G")),
        ];
        let seq = preprocess_sequence(&tokens).unwrap();
        assert_eq!(seq.chords(), &[chord("C"), chord("G")]);
        assert_eq!(seq.len(), tokens.len());
    }

    #[test]
    fn preprocess_rejects_all_silence_input() {
        assert_eq!(
            preprocess_sequence(&[ChordToken::Silence; 3]),
            Err(Error::EmptyContent)
        );
    }
}
