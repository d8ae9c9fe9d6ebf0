use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use valueprobe::probes::ProbeKind;
use valueprobe::structure::{CorrelationKind, DissimilarityKind};

#[derive(Debug, Parser)]
#[command(name = "valueprobe", version, about = "Audit generated text for value bias against a circumplex value lexicon")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Send probes to a chat-completions endpoint and record a JSONL corpus.
    Generate(GenerateArgs),
    /// Score a corpus with a dictionary into fine and aggregated count matrices.
    Score(ScoreArgs),
    /// Hits, validities, signal-to-noise ratios, profile matches and an optional regression.
    Metrics(MetricsArgs),
    /// Ordinal MDS of the value columns, fitted to the theoretical circle.
    Structure(StructureArgs),
    /// Dictionary analysis of the instrument items themselves.
    BaselineInstrument(BaselineInstrumentArgs),
    /// English word frequencies of dictionary terms, per value.
    BaselineWordfreq(BaselineWordfreqArgs),
    /// SVG charts and a text summary from metrics and structure JSON.
    Report(ReportArgs),
    /// Run the bundled mock chat-completions server.
    ServeMock(ServeMockArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum KindArg {
    #[value(alias = "items")]
    Item,
    #[value(alias = "definitions")]
    Definition,
    #[value(alias = "names")]
    Name,
}

impl From<KindArg> for ProbeKind {
    fn from(k: KindArg) -> Self {
        match k {
            KindArg::Item => ProbeKind::Item,
            KindArg::Definition => ProbeKind::Definition,
            KindArg::Name => ProbeKind::Name,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum CorrelationArg {
    Spearman,
    Pearson,
}

impl From<CorrelationArg> for CorrelationKind {
    fn from(c: CorrelationArg) -> Self {
        match c {
            CorrelationArg::Spearman => CorrelationKind::Spearman,
            CorrelationArg::Pearson => CorrelationKind::Pearson,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum DissimilarityArg {
    Sqrt2,
    Oneminus,
}

impl From<DissimilarityArg> for DissimilarityKind {
    fn from(d: DissimilarityArg) -> Self {
        match d {
            DissimilarityArg::Sqrt2 => DissimilarityKind::Sqrt2,
            DissimilarityArg::Oneminus => DissimilarityKind::OneMinus,
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct GenerateArgs {
    #[arg(long, value_enum)]
    pub kind: KindArg,
    /// ValueSpec JSON file.
    #[arg(long)]
    pub spec: PathBuf,
    /// Generation config JSON; command-line flags override its fields.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub runs: Option<u32>,
    #[arg(long)]
    pub model: Option<String>,
    #[arg(long)]
    pub max_tokens: Option<u32>,
    #[arg(long)]
    pub temperature: Option<f64>,
    #[arg(long)]
    pub top_p: Option<f64>,
    #[arg(long)]
    pub base_url: Option<String>,
    #[arg(long)]
    pub max_in_flight: Option<usize>,
    /// Corpus file to write (JSON Lines).
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Args)]
pub struct ScoreArgs {
    #[arg(long)]
    pub corpus: PathBuf,
    #[arg(long)]
    pub dict: PathBuf,
    #[arg(long)]
    pub spec: PathBuf,
    /// Output directory.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Args)]
pub struct MetricsArgs {
    /// Count matrix CSV (fine or aggregated).
    #[arg(long)]
    pub counts: PathBuf,
    /// ValueSpec JSON, for row parents and circle order.
    #[arg(long)]
    pub spec: Option<PathBuf>,
    /// CSV with a `value` column and one column per predictor of category totals.
    #[arg(long)]
    pub predictors: Option<PathBuf>,
    /// Name used in reports; defaults to the counts file stem.
    #[arg(long)]
    pub label: Option<String>,
    /// Output directory.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Args)]
pub struct StructureArgs {
    #[arg(long)]
    pub counts: PathBuf,
    #[arg(long)]
    pub spec: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "spearman")]
    pub correlation: CorrelationArg,
    #[arg(long, value_enum, default_value = "sqrt2")]
    pub dissimilarity: DissimilarityArg,
    /// Additional seeded random starts for the MDS; the lowest stress wins.
    #[arg(long, default_value_t = 0)]
    pub random_starts: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Output directory.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Args)]
pub struct BaselineInstrumentArgs {
    #[arg(long)]
    pub spec: PathBuf,
    #[arg(long)]
    pub dict: PathBuf,
    /// Output directory.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Args)]
pub struct BaselineWordfreqArgs {
    #[arg(long)]
    pub dict: PathBuf,
    /// Two-column `word,count` table.
    #[arg(long)]
    pub unigrams: PathBuf,
    /// Output directory.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Args)]
pub struct ReportArgs {
    /// Metrics JSON written by `metrics`; repeat for several probe kinds.
    #[arg(long = "metrics")]
    pub metrics: Vec<PathBuf>,
    /// Structure JSON written by `structure`.
    #[arg(long)]
    pub structure: Option<PathBuf>,
    /// Output directory.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Args)]
pub struct ServeMockArgs {
    #[arg(long, default_value_t = 8089)]
    pub port: u16,
    /// Require this bearer token.
    #[arg(long)]
    pub api_key: Option<String>,
}
