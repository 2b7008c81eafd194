//! Command-line interface: segment songs, score corpora, inspect passage
//! costs and list polytope shapes.

mod io;
mod report;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use polyseg::{
    corpus_run, enumerate_shapes_bounded, evaluate_corpus, polytope_cost, segment_song,
    BeatSequence, Chord, ChordToken, CostBreakdown, CostConfig, Engine, PolytopeShape,
    RelationSystem, SegmentationConfig, SegmentationResult, SystemKind, DIM_LIMIT,
};
use serde::Serialize;

#[derive(Parser)]
#[command(
    name = "polyseg",
    version,
    about = "Structural segmentation of beat-synchronous chord sequences"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Segment one song and emit the result as JSON
    Segment {
        /// Song file (.json or .csv)
        song: PathBuf,
        #[command(flatten)]
        params: CostArgs,
        /// Write the JSON result here instead of stdout
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Segment every song of a directory and score it against references
    EvaluateCorpus {
        /// Directory of song files
        dir: PathBuf,
        /// Reference frontiers: a directory of per-song files, or "inline"
        /// to read them from the song files themselves
        #[arg(long)]
        refs: String,
        /// Tolerance windows in beats
        #[arg(long, value_delimiter = ',', default_values_t = [0usize, 3])]
        tolerance: Vec<usize>,
        /// Worker threads
        #[arg(long, default_value_t = default_jobs())]
        jobs: usize,
        #[command(flatten)]
        params: CostArgs,
        /// Write the JSON report here in addition to the table
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print the cost breakdown of a passage
    Cost {
        /// Song file, or an inline chord list such as "C,G,Am,Em"
        input: String,
        /// Evaluate on this exact polytope (nested-list text) instead of
        /// searching all shapes of the passage size
        #[arg(long)]
        shape: Option<String>,
        #[command(flatten)]
        params: CostArgs,
    },
    /// List every polytope shape with the given vertex count
    EnumerateShapes {
        size: usize,
        /// Largest base-hypercube dimension to consider
        #[arg(long, default_value_t = DIM_LIMIT)]
        dim_limit: u8,
    },
}

#[derive(Args)]
struct CostArgs {
    /// Relation system
    #[arg(long, value_enum, default_value_t = Relations::Triad)]
    relations: Relations,
    /// Alteration penalty p_a
    #[arg(long, default_value_t = 3.0)]
    pa: f64,
    /// Size-regularity penalty p_r
    #[arg(long, default_value_t = 0.1)]
    pr: f64,
    /// Smallest segment size in beats
    #[arg(long, default_value_t = 2)]
    min_size: usize,
    /// Largest segment size in beats
    #[arg(long, default_value_t = 40)]
    max_size: usize,
}

#[derive(Clone, Copy, ValueEnum)]
enum Relations {
    Triad,
    Tonnetz,
}

impl CostArgs {
    fn system(&self) -> SystemKind {
        match self.relations {
            Relations::Triad => SystemKind::TriadCircle,
            Relations::Tonnetz => SystemKind::Tonnetz,
        }
    }

    fn cost_config(&self) -> CostConfig {
        CostConfig::new(self.system(), self.pa, self.pr)
    }

    fn segmentation_config(&self) -> SegmentationConfig {
        let mut config = SegmentationConfig::new(self.cost_config());
        config.min_segment = self.min_size;
        config.max_segment = self.max_size;
        config
    }
}

fn default_jobs() -> usize {
    std::thread::available_parallelism().map_or(1, |n| n.get())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            let causes: Vec<String> = err.chain().skip(1).map(|c| c.to_string()).collect();
            let payload = serde_json::json!({
                "error": err.to_string(),
                "causes": causes,
            });
            eprintln!("{payload}");
            ExitCode::FAILURE
        }
    }
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Segment { song, params, out } => cmd_segment(&song, &params, out.as_deref()),
        Command::EvaluateCorpus {
            dir,
            refs,
            tolerance,
            jobs,
            params,
            out,
        } => cmd_evaluate_corpus(&dir, &refs, &tolerance, jobs, &params, out.as_deref()),
        Command::Cost {
            input,
            shape,
            params,
        } => cmd_cost(&input, shape.as_deref(), &params),
        Command::EnumerateShapes { size, dim_limit } => {
            for shape in enumerate_shapes_bounded(size, dim_limit) {
                println!("{shape}");
            }
            Ok(())
        }
    }
}

#[derive(Serialize)]
struct SegmentOutput<'a> {
    id: &'a str,
    relations: SystemKind,
    alteration_penalty: f64,
    regularity_penalty: f64,
    min_size: usize,
    max_size: usize,
    beats: usize,
    silences_replaced: usize,
    total_cost: f64,
    frontiers: &'a [usize],
    segments: &'a [polyseg::Segment],
}

fn cmd_segment(song_path: &Path, params: &CostArgs, out: Option<&Path>) -> Result<()> {
    let song = io::load_song(song_path)?;
    let config = params.segmentation_config();
    let result: SegmentationResult = segment_song(&song.sequence, &config)?;
    let output = SegmentOutput {
        id: &song.id,
        relations: params.system(),
        alteration_penalty: params.pa,
        regularity_penalty: params.pr,
        min_size: params.min_size,
        max_size: params.max_size,
        beats: song.sequence.len(),
        silences_replaced: song.silences_replaced,
        total_cost: result.total_cost,
        frontiers: &result.frontiers,
        segments: &result.segments,
    };
    let json = serde_json::to_string_pretty(&output)?;
    match out {
        Some(path) => std::fs::write(path, format!("{json}\n"))
            .with_context(|| format!("writing {}", path.display()))?,
        None => println!("{json}"),
    }
    Ok(())
}

fn cmd_evaluate_corpus(
    dir: &Path,
    refs: &str,
    tolerances: &[usize],
    jobs: usize,
    params: &CostArgs,
    out: Option<&Path>,
) -> Result<()> {
    let paths = io::collect_song_paths(dir)?;
    let songs: Vec<io::SongFile> = paths
        .iter()
        .map(|p| io::load_song(p))
        .collect::<Result<_>>()?;

    let references: Vec<Vec<usize>> = if refs == "inline" {
        songs
            .iter()
            .map(|s| {
                s.frontiers
                    .clone()
                    .with_context(|| format!("song {} carries no inline frontiers", s.id))
            })
            .collect::<Result<_>>()?
    } else {
        let ref_dir = Path::new(refs);
        songs
            .iter()
            .map(|s| io::load_reference(ref_dir, &s.id, s.sequence.len()))
            .collect::<Result<_>>()?
    };

    let sequences: Vec<BeatSequence> = songs.iter().map(|s| s.sequence.clone()).collect();
    let config = params.segmentation_config();
    let results = corpus_run(&sequences, &config, jobs)?;
    let mut estimated = Vec::with_capacity(results.len());
    for (song, result) in songs.iter().zip(results) {
        let result = result.with_context(|| format!("segmenting {}", song.id))?;
        estimated.push(result.frontiers);
    }

    let report = evaluate_corpus(&estimated, &references, tolerances)?;
    let ids: Vec<String> = songs.iter().map(|s| s.id.clone()).collect();
    print!("{}", report::render_table(&report, &ids));
    if let Some(path) = out {
        let json = serde_json::to_string_pretty(&report)?;
        std::fs::write(path, format!("{json}\n"))
            .with_context(|| format!("writing {}", path.display()))?;
    }
    Ok(())
}

fn cmd_cost(input: &str, shape: Option<&str>, params: &CostArgs) -> Result<()> {
    let path = Path::new(input);
    let chords: Vec<Chord> = if path.exists() {
        io::load_song(path)?.sequence.chords().to_vec()
    } else {
        parse_inline_chords(input)?
    };
    let system = RelationSystem::new(params.system());
    match shape {
        Some(text) => {
            let shape = PolytopeShape::parse_nested(text)?;
            let graph = polyseg::build_vertex_graph(&shape);
            let breakdown = polytope_cost(&chords, &graph, &system)?;
            print_breakdown(&chords, &breakdown, &breakdown.raw_cost().to_string());
        }
        None => {
            let engine = Engine::new(params.cost_config(), chords.len())?;
            let passage = engine.passage_cost(&chords);
            match passage.breakdown {
                Some(breakdown) => {
                    print_breakdown(&chords, &breakdown, &format!("{}", passage.cost))
                }
                None => println!("no polytope carries {} vertices; cost = inf", chords.len()),
            }
        }
    }
    Ok(())
}

fn parse_inline_chords(input: &str) -> Result<Vec<Chord>> {
    let mut chords = Vec::new();
    for part in input.split([',', ' ']).filter(|p| !p.trim().is_empty()) {
        match polyseg::parse_chord_label(part.trim())? {
            ChordToken::Chord(c) => chords.push(c),
            ChordToken::Silence => bail!("silence marker in an inline chord list"),
        }
    }
    if chords.is_empty() {
        bail!("empty chord list");
    }
    Ok(chords)
}

fn print_breakdown(chords: &[Chord], breakdown: &CostBreakdown, total: &str) {
    println!("shape: {}", breakdown.shape);
    println!("{:>4}  {:<5} {:>4}  contrast", "beat", "chord", "cost");
    for (i, chord) in chords.iter().enumerate() {
        println!(
            "{:>4}  {:<5} {:>4}  {}",
            i + 1,
            chord.render(),
            breakdown.per_vertex[i],
            if breakdown.contrastive[i] { "*" } else { "" }
        );
    }
    println!("raw cost: {}", breakdown.raw_cost());
    println!("alteration penalty: {}", breakdown.alteration_penalty);
    println!("total: {total}");
}
