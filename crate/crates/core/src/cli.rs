//! The `qsem` command line.
//!
//! `build` scans a corpus once and records it in a store directory
//! (default `.qsem`); later commands reuse that record and the cached
//! archives unless they are given `--corpus` themselves. Archives are cached
//! under a hash of the tokenized corpus and the window parameters.
//!
//! Exit status: 0 on success, 1 on usage errors, 2 on data errors.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::collapse::{
    association_delta, collapse_with_operator, collapse_with_projector, context_projector, prototype_state,
};
use crate::ingest::{builtin_stopwords, load_corpus, load_stopwords, CorpusFormat, Document, TokenizerConfig};
use crate::space::{
    build_hal, global_space, symmetrize, top_associates, word_space, word_vector, Corpus, SemanticSpace, StateVector,
};
use crate::spectral::{eigendecompose, eigenstate_report, EigenOptions, EigenSystem};
use crate::store::{archive_info, load_eigen, load_space, save_eigen, save_space, ArchiveKind};
use crate::Error;

pub const STOPWORDS_ENV: &str = "QSEM_STOPWORDS";
pub const STORE_ENV: &str = "QSEM_STORE";
const MANIFEST: &str = "manifest.json";

#[derive(Debug, Parser)]
#[command(
    name = "qsem",
    version,
    about = "HAL semantic spaces, eigenstates and context collapse"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Scan a corpus and save its global space
    Build(CommonArgs),
    /// Build and save the space centered on a word
    Space {
        #[arg(long)]
        word: String,
        /// Also write the archive here
        #[arg(long)]
        out: Option<PathBuf>,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Strongest associates of a word in the global space
    Vector {
        #[arg(long)]
        word: String,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Leading eigenstates of the space centered on a word
    Eigen {
        #[arg(long)]
        word: String,
        #[arg(long, default_value_t = 4)]
        states: usize,
        #[arg(long, default_value_t = 10)]
        components: usize,
        #[command(flatten)]
        eigen: EigenArgs,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// State of a word after collapse in a context
    Collapse {
        #[command(flatten)]
        query: CollapseArgs,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Association gains and losses caused by a context
    Compare {
        #[command(flatten)]
        query: CollapseArgs,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Describe an archive (default: the global space of the last build)
    Info {
        #[arg(long)]
        archive: Option<PathBuf>,
        #[command(flatten)]
        common: CommonArgs,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
enum FormatArg {
    Plain,
    Blocks,
    Reuters,
}

impl From<FormatArg> for CorpusFormat {
    fn from(f: FormatArg) -> Self {
        match f {
            FormatArg::Plain => CorpusFormat::Plain,
            FormatArg::Blocks => CorpusFormat::PlainBlocks,
            FormatArg::Reuters => CorpusFormat::ReutersSgml,
        }
    }
}

/// What `build` stores as the corpus-wide space.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
enum SpaceArg {
    /// Symmetrized HAL matrix of the whole corpus
    #[default]
    Hal,
    /// Sum of the word-centered spaces of every vocabulary word
    Mixture,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum OutputMode {
    Human,
    Tsv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum CollapseMode {
    /// The context word's whole space acts on the prototypical state
    Operator,
    /// Projector onto the leading eigenstates of the context space
    Projector,
    /// Column of the context space (unnormalized)
    Column,
}

#[derive(Debug, Clone, Args)]
struct CommonArgs {
    /// Corpus file or directory
    #[arg(long)]
    corpus: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<FormatArg>,
    /// Window length
    #[arg(long = "l")]
    window: Option<usize>,
    /// Tokens on each side of a centered window (default: window length)
    #[arg(long)]
    radius: Option<usize>,
    /// Stopword file, `builtin`, or `none`
    #[arg(long, env = STOPWORDS_ENV)]
    stopwords: Option<String>,
    #[arg(long)]
    keep_case: bool,
    /// Corpus-wide space kept by `build`
    #[arg(long, value_enum)]
    space: Option<SpaceArg>,
    #[arg(long)]
    min_len: Option<usize>,
    #[arg(long, env = STORE_ENV, default_value = ".qsem")]
    store: PathBuf,
    #[arg(long, value_enum, default_value_t = OutputMode::Human)]
    output: OutputMode,
    /// Number of listed words
    #[arg(long, default_value_t = 20)]
    k: usize,
}

#[derive(Debug, Clone, Args)]
struct EigenArgs {
    /// Largest active dimension decomposed densely
    #[arg(long, default_value_t = 2000)]
    dense_cap: usize,
    /// Eigenpairs computed iteratively above the dense cap
    #[arg(long, default_value_t = 50)]
    top_k: usize,
}

impl EigenArgs {
    fn options(&self) -> EigenOptions {
        EigenOptions {
            dense_cap: self.dense_cap,
            top_k: self.top_k,
            ..EigenOptions::default()
        }
    }
}

#[derive(Debug, Clone, Args)]
struct CollapseArgs {
    #[arg(long)]
    word: String,
    /// Context word; repeat or separate with commas for several
    #[arg(long, required = true, value_delimiter = ',')]
    context: Vec<String>,
    #[arg(long, value_enum, default_value_t = CollapseMode::Operator)]
    mode: CollapseMode,
    /// Eigenstates spanning the context in projector mode
    #[arg(long, default_value_t = 10)]
    rank: usize,
    #[command(flatten)]
    eigen: EigenArgs,
}

/// Corpus settings recorded by `build`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
struct Manifest {
    corpus: PathBuf,
    format: FormatArg,
    window: usize,
    radius: usize,
    stopwords: String,
    lowercase: bool,
    min_len: usize,
    #[serde(default)]
    space: SpaceArg,
}

enum Failure {
    Usage(String),
    Data(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Data(e)
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Data(Error::io("<output>", e))
    }
}

type Outcome = std::result::Result<(), Failure>;

/// Runs the CLI on `args` (including the program name).
pub fn run(args: &[String], out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                let _ = write!(err, "{text}");
                1
            } else {
                let _ = write!(out, "{text}");
                0
            };
        }
    };
    match dispatch(cli.command, out) {
        Ok(()) => 0,
        Err(Failure::Usage(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            1
        }
        Err(Failure::Data(e)) => {
            let _ = writeln!(err, "error: {e}");
            2
        }
    }
}

fn dispatch(command: Command, out: &mut dyn Write) -> Outcome {
    match command {
        Command::Build(common) => {
            let session = Session::open(&common, true)?;
            let global = session.global_space()?;
            let path = session.cache_path("global");
            match common.output {
                OutputMode::Human => {
                    writeln!(out, "documents: {}", session.corpus.len())?;
                    writeln!(out, "tokens: {}", session.corpus.token_count())?;
                    writeln!(out, "vocabulary: {}", global.dim())?;
                    writeln!(out, "stored entries: {}", stored_entries(&global))?;
                    writeln!(out, "archive: {}", path.display())?;
                }
                OutputMode::Tsv => {
                    writeln!(
                        out,
                        "{}\t{}\t{}\t{}\t{}",
                        session.corpus.len(),
                        session.corpus.token_count(),
                        global.dim(),
                        stored_entries(&global),
                        path.display()
                    )?;
                }
            }
            Ok(())
        }
        Command::Space {
            word,
            out: dest,
            common,
        } => {
            let session = Session::open(&common, false)?;
            let space = session.word_space(&word)?;
            if let Some(dest) = dest {
                save_space(&space, &dest)?;
            }
            let path = session.cache_path(&format!("word-{word}"));
            match common.output {
                OutputMode::Human => {
                    writeln!(out, "center: {word} (occurrences: {})", session.corpus.frequency(&word))?;
                    writeln!(out, "active words: {}", space.active_indices().len())?;
                    writeln!(out, "stored entries: {}", stored_entries(&space))?;
                    writeln!(out, "archive: {}", path.display())?;
                }
                OutputMode::Tsv => writeln!(
                    out,
                    "{word}\t{}\t{}\t{}\t{}",
                    session.corpus.frequency(&word),
                    space.active_indices().len(),
                    stored_entries(&space),
                    path.display()
                )?,
            }
            Ok(())
        }
        Command::Vector { word, common } => {
            let global = global_for_query(&common)?;
            let v = word_vector(&global, &word)?;
            write_listing(out, &top_associates(&v, common.k), common.output)
        }
        Command::Eigen {
            word,
            states,
            components,
            eigen,
            common,
        } => {
            let session = Session::open(&common, false)?;
            let es = session.word_eigen(&word, &eigen.options())?;
            let report = eigenstate_report(&es, states, components)?;
            match common.output {
                OutputMode::Human => write!(out, "{report}")?,
                OutputMode::Tsv => write!(out, "{}", report.to_tsv())?,
            }
            Ok(())
        }
        Command::Collapse { query, common } => {
            let session = Session::open(&common, false)?;
            let (_, after, note) = session.collapse(&query)?;
            if common.output == OutputMode::Human {
                writeln!(
                    out,
                    "# {} in the context of {} ({note})",
                    query.word,
                    query.context.join(",")
                )?;
            }
            write_listing(out, &top_associates(&after, common.k), common.output)
        }
        Command::Compare { query, common } => {
            let session = Session::open(&common, false)?;
            let (before, after, _) = session.collapse(&query)?;
            let delta = association_delta(&before, &after, common.k)?;
            match common.output {
                OutputMode::Human => write!(out, "{delta}")?,
                OutputMode::Tsv => write!(out, "{}", delta.to_tsv())?,
            }
            Ok(())
        }
        Command::Info { archive, common } => {
            let path = match archive {
                Some(p) => p,
                None => Session::open(&common, false)?.cache_path("global"),
            };
            let info = archive_info(&path)?;
            let kind = match info.kind {
                ArchiveKind::Space => "space",
                ArchiveKind::Eigen => "eigen",
            };
            let records = match info.kind {
                ArchiveKind::Space => "entries",
                ArchiveKind::Eigen => "eigenpairs",
            };
            match common.output {
                OutputMode::Human => {
                    writeln!(out, "kind: {kind}")?;
                    writeln!(out, "vocabulary: {}", info.vocabulary_size)?;
                    writeln!(out, "provenance: {}", info.provenance)?;
                    writeln!(out, "{records}: {}", info.records)?;
                }
                OutputMode::Tsv => writeln!(
                    out,
                    "{kind}\t{}\t{}\t{}",
                    info.vocabulary_size, info.provenance, info.records
                )?,
            }
            Ok(())
        }
    }
}

fn stored_entries(space: &SemanticSpace) -> usize {
    space.matrix().iter().filter(|&(r, c, _)| r <= c).count()
}

/// `vector` only needs the global archive, so it skips re-reading the
/// corpus when the recorded build applies unchanged.
fn global_for_query(common: &CommonArgs) -> std::result::Result<SemanticSpace, Failure> {
    let untouched = common.corpus.is_none()
        && common.format.is_none()
        && common.window.is_none()
        && common.radius.is_none()
        && !common.keep_case
        && common.min_len.is_none()
        && common.space.is_none();
    if untouched {
        if let (Some(manifest), Some(key)) = (read_manifest(&common.store)?, read_key(&common.store)) {
            let same_stopwords = common.stopwords.as_ref().is_none_or(|s| *s == manifest.stopwords);
            let name = match manifest.space {
                SpaceArg::Hal => "global",
                SpaceArg::Mixture => "mixture",
            };
            let path = common.store.join(format!("{name}-{key}.qsem"));
            if same_stopwords && path.exists() {
                return Ok(load_space(&path)?);
            }
        }
    }
    Session::open(common, false)?.global_space()
}

fn read_manifest(store: &Path) -> std::result::Result<Option<Manifest>, Failure> {
    let path = store.join(MANIFEST);
    if !path.exists() {
        return Ok(None);
    }
    let text = fs::read_to_string(&path).map_err(|e| Error::io(&path, e))?;
    serde_json::from_str(&text)
        .map(Some)
        .map_err(|e| Failure::Data(Error::param(format!("{}: {e}", path.display()))))
}

fn read_key(store: &Path) -> Option<String> {
    fs::read_to_string(store.join("key")).ok().map(|s| s.trim().to_string())
}

struct Session {
    store: PathBuf,
    corpus: Corpus,
    manifest: Manifest,
    key: String,
}

impl Session {
    /// Resolves corpus settings from the flags, falling back to the last
    /// build's manifest when no `--corpus` is given.
    fn open(common: &CommonArgs, record: bool) -> std::result::Result<Self, Failure> {
        let base = match &common.corpus {
            Some(path) => Manifest {
                corpus: fs::canonicalize(path).map_err(|e| Error::io(path, e))?,
                format: FormatArg::Plain,
                window: 5,
                radius: 0,
                stopwords: "none".into(),
                lowercase: true,
                min_len: 1,
                space: SpaceArg::Hal,
            },
            None => read_manifest(&common.store)?.ok_or_else(|| {
                Failure::Usage(format!(
                    "no --corpus given and no build recorded in {}",
                    common.store.display()
                ))
            })?,
        };
        let window = common.window.unwrap_or(base.window);
        let explicit_corpus = common.corpus.is_some();
        let manifest = Manifest {
            format: common.format.unwrap_or(base.format),
            window,
            radius: common.radius.unwrap_or(if explicit_corpus || common.window.is_some() {
                window
            } else {
                base.radius
            }),
            stopwords: common.stopwords.clone().unwrap_or(base.stopwords),
            lowercase: if common.keep_case { false } else { base.lowercase },
            min_len: common.min_len.unwrap_or(base.min_len),
            space: common.space.unwrap_or(base.space),
            corpus: base.corpus,
        };
        if manifest.window == 0 || manifest.radius == 0 {
            return Err(Failure::Usage("window length and radius must be at least 1".into()));
        }

        let stopwords = match manifest.stopwords.as_str() {
            "none" => Vec::new(),
            "builtin" => builtin_stopwords(),
            path => load_stopwords(Path::new(path))?,
        };
        let cfg = TokenizerConfig::new(manifest.lowercase, stopwords, manifest.min_len);
        let documents = load_corpus(&manifest.corpus, manifest.format.into(), &cfg)?;
        let key = corpus_key(&documents, manifest.window, manifest.radius);
        let corpus = Corpus::new(&documents);

        fs::create_dir_all(&common.store).map_err(|e| Error::io(&common.store, e))?;
        if record {
            let json = serde_json::to_string_pretty(&manifest).expect("manifest serializes");
            let path = common.store.join(MANIFEST);
            fs::write(&path, json + "\n").map_err(|e| Error::io(&path, e))?;
            let path = common.store.join("key");
            fs::write(&path, format!("{key}\n")).map_err(|e| Error::io(&path, e))?;
        }
        Ok(Self {
            store: common.store.clone(),
            corpus,
            manifest,
            key,
        })
    }

    fn cache_path(&self, name: &str) -> PathBuf {
        let name = match (name, self.manifest.space) {
            ("global", SpaceArg::Mixture) => "mixture",
            _ => name,
        };
        self.store.join(format!("{name}-{}.qsem", self.key))
    }

    fn global_space(&self) -> std::result::Result<SemanticSpace, Failure> {
        let path = self.cache_path("global");
        if path.exists() {
            return Ok(load_space(&path)?);
        }
        let space = match self.manifest.space {
            SpaceArg::Hal => symmetrize(&build_hal(&self.corpus, self.manifest.window)?),
            SpaceArg::Mixture => global_space(&self.corpus, self.manifest.radius, self.manifest.window)?,
        };
        save_space(&space, &path)?;
        Ok(space)
    }

    fn word_space(&self, word: &str) -> std::result::Result<SemanticSpace, Failure> {
        if self.corpus.frequency(word) == 0 {
            return Err(Error::UnknownWord(word.to_string()).into());
        }
        let path = self.cache_path(&format!("word-{word}"));
        if path.exists() {
            return Ok(load_space(&path)?);
        }
        let space = word_space(&self.corpus, word, self.manifest.radius, self.manifest.window)?.space;
        save_space(&space, &path)?;
        Ok(space)
    }

    fn context_space(&self, words: &[String]) -> std::result::Result<SemanticSpace, Failure> {
        let mut total: Option<SemanticSpace> = None;
        for u in words {
            let s = self.word_space(u)?;
            total = Some(match total {
                None => s,
                Some(t) => t.add(&s)?,
            });
        }
        total.ok_or_else(|| Failure::Usage("--context needs at least one word".into()))
    }

    fn word_eigen(&self, word: &str, opts: &EigenOptions) -> std::result::Result<EigenSystem, Failure> {
        let path = self.cache_path(&format!("eigen-{word}-{}-{}", opts.dense_cap, opts.top_k));
        if path.exists() {
            return Ok(load_eigen(&path)?);
        }
        let es = eigendecompose(&self.word_space(word)?, opts)?;
        save_eigen(&es, &path)?;
        Ok(es)
    }

    /// Returns the prototypical state, the state after context, and a note
    /// describing the collapse.
    fn collapse(&self, q: &CollapseArgs) -> std::result::Result<(StateVector, StateVector, String), Failure> {
        let global = self.global_space()?;
        let before = prototype_state(&global, &self.corpus, &q.word)?;
        let context = self.context_space(&q.context)?;
        match q.mode {
            CollapseMode::Operator => {
                let r = collapse_with_operator(&before, &context)?;
                Ok((before, r.state, format!("operator, <v|M|v> = {:.6e}", r.normalizer)))
            }
            CollapseMode::Projector => {
                let es = eigendecompose(&context, &q.eigen.options())?;
                let p = context_projector(&es, q.rank.min(es.len()).max(1))?;
                let rank = p.rank();
                let r = collapse_with_projector(&before, &p)?;
                Ok((
                    before,
                    r.state,
                    format!("projector of rank {rank}, <v|P|v> = {:.6e}", r.normalizer),
                ))
            }
            CollapseMode::Column => {
                let state = word_vector(&context, &q.word)?;
                Ok((before, state, "column of the context space".into()))
            }
        }
    }
}

/// Cache key: SHA-256 of the tokenized corpus and the window parameters.
fn corpus_key(documents: &[Document], window: usize, radius: usize) -> String {
    let mut h = Sha256::new();
    h.update(format!("qsem-cache 1 l={window} r={radius}\n").as_bytes());
    for d in documents {
        h.update(d.id.as_bytes());
        h.update(b"\x00");
        for t in &d.tokens {
            h.update(t.as_bytes());
            h.update(b" ");
        }
        h.update(b"\n");
    }
    h.finalize()[..12].iter().map(|b| format!("{b:02x}")).collect()
}

fn format_weight(x: f64) -> String {
    if x.fract() == 0.0 && x.abs() < 1e15 {
        format!("{x:.0}")
    } else {
        format!("{x:.4}")
    }
}

fn write_listing(out: &mut dyn Write, items: &[(String, f64)], mode: OutputMode) -> Outcome {
    for (w, x) in items {
        match mode {
            OutputMode::Human => writeln!(out, "{w} ({})", format_weight(*x))?,
            OutputMode::Tsv => writeln!(out, "{w}\t{x}")?,
        }
    }
    Ok(())
}
