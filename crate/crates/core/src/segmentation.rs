//! Optimal segmentation of a song by dynamic programming.
//!
//! `best[t]` is the cheapest cost of the first `t` beats; each step extends a
//! prefix by one segment whose size lies within the configured bounds. Ties
//! prefer fewer segments, then the earlier final boundary, so results are
//! fully deterministic.

use rayon::prelude::*;
use serde::Serialize;

use crate::chord::BeatSequence;
use crate::cost::{CostConfig, Engine};
use crate::error::Error;
use crate::shapes::PolytopeShape;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SegmentationConfig {
    pub cost: CostConfig,
    /// Smallest admissible segment size in beats.
    pub min_segment: usize,
    /// Largest admissible segment size in beats.
    pub max_segment: usize,
}

impl SegmentationConfig {
    pub fn new(cost: CostConfig) -> Self {
        SegmentationConfig {
            cost,
            min_segment: 2,
            max_segment: 40,
        }
    }

    pub fn validate(&self) -> Result<(), Error> {
        self.cost.validate()?;
        if self.min_segment < 1 || self.min_segment > self.max_segment {
            return Err(Error::InvalidConfig(format!(
                "segment bounds [{}, {}] must satisfy 1 <= min <= max",
                self.min_segment, self.max_segment
            )));
        }
        if self.max_segment > 80 {
            return Err(Error::InvalidConfig(format!(
                "max segment size {} exceeds the largest polytope (80 vertices)",
                self.max_segment
            )));
        }
        Ok(())
    }
}

impl Default for SegmentationConfig {
    fn default() -> Self {
        SegmentationConfig::new(CostConfig::default())
    }
}

/// One segment of the optimal partition, 1-based inclusive beat indices.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Segment {
    pub start: usize,
    pub end: usize,
    /// Penalized cost (raw + f_a + f_r) of this segment.
    pub cost: f64,
    /// Winning shape; absent when the size admits no polytope.
    pub shape: Option<PolytopeShape>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SegmentationResult {
    /// Beat indices starting segments 2..N; beat 1 is excluded.
    pub frontiers: Vec<usize>,
    pub segments: Vec<Segment>,
    pub total_cost: f64,
}

#[derive(Clone, Copy)]
struct State {
    cost: f64,
    segments: u32,
    prev: usize,
}

impl State {
    const UNREACHED: State = State {
        cost: f64::INFINITY,
        segments: u32::MAX,
        prev: usize::MAX,
    };

    fn better_than(&self, other: &State) -> bool {
        if self.cost != other.cost {
            return self.cost < other.cost;
        }
        if self.segments != other.segments {
            return self.segments < other.segments;
        }
        self.prev < other.prev
    }
}

/// Globally optimal partition of the sequence under the configured bounds.
pub fn segment_song(
    sequence: &BeatSequence,
    config: &SegmentationConfig,
) -> Result<SegmentationResult, Error> {
    config.validate()?;
    let engine = Engine::new(config.cost.clone(), config.max_segment)?;
    segment_with_engine(sequence, config, &engine)
}

pub(crate) fn segment_with_engine(
    sequence: &BeatSequence,
    config: &SegmentationConfig,
    engine: &Engine,
) -> Result<SegmentationResult, Error> {
    let chords = sequence.chords();
    let total = chords.len();
    let mut best = vec![State::UNREACHED; total + 1];
    best[0] = State {
        cost: 0.0,
        segments: 0,
        prev: 0,
    };
    for t in 1..=total {
        for size in config.min_segment..=config.max_segment.min(t) {
            let prev = t - size;
            if best[prev].cost.is_finite() {
                let candidate = State {
                    cost: best[prev].cost + engine.segment_cost(&chords[prev..t]),
                    segments: best[prev].segments + 1,
                    prev,
                };
                if candidate.better_than(&best[t]) {
                    best[t] = candidate;
                }
            }
        }
    }
    if !best[total].cost.is_finite() {
        return Err(Error::InfeasiblePartition {
            length: total,
            min: config.min_segment,
            max: config.max_segment,
        });
    }

    let mut bounds = Vec::new();
    let mut t = total;
    while t > 0 {
        bounds.push(t);
        t = best[t].prev;
    }
    bounds.reverse();

    let mut segments = Vec::with_capacity(bounds.len());
    let mut start = 0usize;
    for &end in &bounds {
        let passage = engine.passage_cost(&chords[start..end]);
        let off_target = (end - start).abs_diff(engine.config().target_size);
        segments.push(Segment {
            start: start + 1,
            end,
            cost: passage.cost + engine.config().regularity_penalty * off_target as f64,
            shape: passage.breakdown.map(|b| b.shape),
        });
        start = end;
    }
    let frontiers = segments.iter().skip(1).map(|s| s.start).collect();
    Ok(SegmentationResult {
        frontiers,
        segments,
        total_cost: best[total].cost,
    })
}

/// Segment each song independently; results come back in input order and are
/// identical for any level of parallelism. Per-song failures do not abort the
/// batch.
pub fn corpus_run(
    songs: &[BeatSequence],
    config: &SegmentationConfig,
    parallelism: usize,
) -> Result<Vec<Result<SegmentationResult, Error>>, Error> {
    config.validate()?;
    let engine = Engine::new(config.cost.clone(), config.max_segment)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(parallelism.max(1))
        .build()
        .map_err(|e| Error::InvalidConfig(format!("thread pool: {e}")))?;
    Ok(pool.install(|| {
        songs
            .par_iter()
            .map(|song| segment_with_engine(song, config, &engine))
            .collect()
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chord::{parse_chord_label, Chord, ChordToken};
    use crate::relations::SystemKind;
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    fn seq(labels: &[&str]) -> BeatSequence {
        let chords = labels
            .iter()
            .map(|l| match parse_chord_label(l).unwrap() {
                ChordToken::Chord(c) => c,
                ChordToken::Silence => panic!("silence"),
            })
            .collect();
        BeatSequence::new(chords).unwrap()
    }

    fn config(pa: f64, pr: f64) -> SegmentationConfig {
        SegmentationConfig::new(CostConfig::new(SystemKind::TriadCircle, pa, pr))
    }

    /// Enumerate every admissible partition and fold its segment costs left
    /// to right, mirroring the DP's accumulation order exactly.
    fn exhaustive_best(sequence: &BeatSequence, cfg: &SegmentationConfig) -> f64 {
        let engine = Engine::new(cfg.cost.clone(), cfg.max_segment).unwrap();
        let chords = sequence.chords();
        let mut memo = vec![vec![]; chords.len() + 1];
        for start in 0..chords.len() {
            for size in cfg.min_segment..=cfg.max_segment.min(chords.len() - start) {
                memo[start].push(engine.segment_cost(&chords[start..start + size]));
            }
        }
        fn recurse(
            pos: usize,
            acc: f64,
            total: usize,
            cfg: &SegmentationConfig,
            memo: &[Vec<f64>],
            best: &mut f64,
        ) {
            if pos == total {
                if acc < *best {
                    *best = acc;
                }
                return;
            }
            for size in cfg.min_segment..=cfg.max_segment.min(total - pos) {
                let cost = memo[pos][size - cfg.min_segment];
                recurse(pos + size, acc + cost, total, cfg, memo, best);
            }
        }
        let mut best = f64::INFINITY;
        recurse(0, 0.0, chords.len(), cfg, &memo, &mut best);
        best
    }

    #[test]
    fn merges_two_constant_halves_when_the_penalty_rewards_it() {
        let sequence = seq(&["C", "C", "C", "C", "F", "F", "F", "F"]);
        let result = segment_song(&sequence, &config(0.0, 0.1)).unwrap();
        assert_eq!(result.frontiers, Vec::<usize>::new());
        assert_eq!(result.segments.len(), 1);
        assert_eq!(result.segments[0].start, 1);
        assert_eq!(result.segments[0].end, 8);
        assert_eq!(result.total_cost, 2.0 + 0.1 * 24.0);
    }

    #[test]
    fn single_short_segment_under_defaults() {
        let result = segment_song(&seq(&["C", "C", "C", "C"]), &SegmentationConfig::default())
            .unwrap();
        assert!(result.frontiers.is_empty());
        assert_eq!(result.segments.len(), 1);
        assert_eq!(result.segments[0].shape, Some(PolytopeShape::regular(2)));
    }

    #[test]
    fn dp_matches_exhaustive_enumeration() {
        let mut rng = StdRng::seed_from_u64(41);
        for instance in 0..12 {
            let len = rng.gen_range(8..=16);
            let chords: Vec<Chord> = (0..len)
                .map(|_| Chord::from_index(rng.gen_range(0..24)))
                .collect();
            let sequence = BeatSequence::new(chords).unwrap();
            for cfg in [config(0.0, 0.0), config(3.0, 0.1)] {
                let dp = segment_song(&sequence, &cfg).unwrap();
                let brute = exhaustive_best(&sequence, &cfg);
                assert_eq!(dp.total_cost, brute, "instance {instance}");
            }
        }
    }

    #[test]
    fn total_cost_equals_the_sum_of_segment_costs() {
        let mut rng = StdRng::seed_from_u64(43);
        let chords: Vec<Chord> = (0..20)
            .map(|_| Chord::from_index(rng.gen_range(0..8)))
            .collect();
        let result =
            segment_song(&BeatSequence::new(chords).unwrap(), &config(3.0, 0.1)).unwrap();
        let sum = result.segments.iter().fold(0.0, |acc, s| acc + s.cost);
        assert_eq!(result.total_cost, sum);
        // segments partition 1..=T
        assert_eq!(result.segments[0].start, 1);
        assert_eq!(result.segments.last().unwrap().end, 20);
        for pair in result.segments.windows(2) {
            assert_eq!(pair[0].end + 1, pair[1].start);
        }
        for f in &result.frontiers {
            assert!(*f > 1 && *f <= 20);
        }
    }

    #[test]
    fn infeasible_partitions_are_reported() {
        let sequence = seq(&["C"]);
        match segment_song(&sequence, &config(0.0, 0.0)) {
            Err(Error::InfeasiblePartition { length, min, max }) => {
                assert_eq!((length, min, max), (1, 2, 40));
            }
            other => panic!("unexpected: {other:?}"),
        }
        let mut tight = config(0.0, 0.0);
        tight.max_segment = 2;
        let three = seq(&["C", "C", "C"]);
        assert!(matches!(
            segment_song(&three, &tight),
            Err(Error::InfeasiblePartition { length: 3, .. })
        ));
        let mut unit = config(0.0, 0.0);
        unit.min_segment = 1;
        unit.max_segment = 2;
        assert!(segment_song(&three, &unit).is_ok());
    }

    #[test]
    fn ties_prefer_fewer_segments_then_the_earlier_final_boundary() {
        // six constant beats, max size 5: {2,4}, {3,3} and {4,2} all cost 2
        // with two segments, so the earliest final boundary must win
        let mut cfg = config(0.0, 0.0);
        cfg.max_segment = 5;
        let result = segment_song(&seq(&["C"; 6]), &cfg).unwrap();
        assert_eq!(result.total_cost, 2.0);
        assert_eq!(result.frontiers, vec![3]);
    }

    #[test]
    fn config_bounds_are_validated() {
        let mut cfg = config(0.0, 0.0);
        cfg.min_segment = 0;
        assert!(matches!(
            segment_song(&seq(&["C", "C"]), &cfg),
            Err(Error::InvalidConfig(_))
        ));
        cfg.min_segment = 5;
        cfg.max_segment = 4;
        assert!(segment_song(&seq(&["C", "C"]), &cfg).is_err());
        cfg.min_segment = 2;
        cfg.max_segment = 81;
        assert!(segment_song(&seq(&["C", "C"]), &cfg).is_err());
    }

    #[test]
    fn appending_a_constant_segment_adds_at_most_one_unit() {
        // with both penalties at zero a constant block is a cost-1 segment,
        // so the optimum can grow by at most that much
        let mut rng = StdRng::seed_from_u64(47);
        for _ in 0..6 {
            let len = rng.gen_range(8..=14);
            let mut chords: Vec<Chord> = (0..len)
                .map(|_| Chord::from_index(rng.gen_range(0..24)))
                .collect();
            let cfg = config(0.0, 0.0);
            let before = segment_song(&BeatSequence::new(chords.clone()).unwrap(), &cfg)
                .unwrap()
                .total_cost;
            chords.extend(std::iter::repeat_n(Chord::from_index(3), 8));
            let after = segment_song(&BeatSequence::new(chords).unwrap(), &cfg)
                .unwrap()
                .total_cost;
            assert!(after <= before + 1.0 + 1e-9, "{after} vs {before}");
        }
    }

    #[test]
    fn corpus_runs_are_deterministic_and_order_preserving() {
        let songs: Vec<BeatSequence> = vec![
            seq(&["C", "C", "C", "C", "G", "G", "G", "G"]),
            seq(&["Am", "Am", "F", "F"]),
            seq(&["D", "D", "D", "D", "D", "D"]),
        ];
        let cfg = config(3.0, 0.1);
        let serial = corpus_run(&songs, &cfg, 1).unwrap();
        let parallel = corpus_run(&songs, &cfg, 8).unwrap();
        assert_eq!(serial.len(), 3);
        for (a, b) in serial.iter().zip(&parallel) {
            assert_eq!(a.as_ref().unwrap(), b.as_ref().unwrap());
        }
        assert!(corpus_run(&[], &cfg, 4).unwrap().is_empty());
    }

    #[test]
    fn corpus_runs_collect_per_song_errors() {
        let songs = vec![seq(&["C"]), seq(&["C", "C", "C", "C"])];
        let results = corpus_run(&songs, &config(0.0, 0.0), 2).unwrap();
        assert!(matches!(
            results[0],
            Err(Error::InfeasiblePartition { length: 1, .. })
        ));
        assert!(results[1].is_ok());
    }
}
