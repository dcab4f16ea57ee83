//! Text ingestion: tokenization, stopword lists and corpus loading.

mod reuters;

use std::collections::HashSet;
use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;

use crate::{Error, Result};

pub use reuters::{parse_reuters, ReutersArticle};

const BUILTIN_STOPWORDS: &str = include_str!("../../data/stopwords.txt");

/// Tokenizer settings shared by every document of a corpus.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TokenizerConfig {
    lowercase: bool,
    stopwords: HashSet<String>,
    min_token_length: usize,
}

impl Default for TokenizerConfig {
    fn default() -> Self {
        Self {
            lowercase: true,
            stopwords: HashSet::new(),
            min_token_length: 1,
        }
    }
}

impl TokenizerConfig {
    /// Stopwords are lowercased when `lowercase` is set so that matching
    /// happens against the lowercased token stream.
    pub fn new<I, S>(lowercase: bool, stopwords: I, min_token_length: usize) -> Self
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let stopwords = stopwords
            .into_iter()
            .map(|w| {
                let w = w.as_ref().trim();
                if lowercase {
                    w.to_lowercase()
                } else {
                    w.to_string()
                }
            })
            .filter(|w| !w.is_empty())
            .collect();
        Self {
            lowercase,
            stopwords,
            min_token_length: min_token_length.max(1),
        }
    }

    pub fn with_stopwords<I, S>(self, stopwords: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        Self::new(self.lowercase, stopwords, self.min_token_length)
    }

    pub fn lowercase(&self) -> bool {
        self.lowercase
    }

    pub fn stopwords(&self) -> &HashSet<String> {
        &self.stopwords
    }

    pub fn min_token_length(&self) -> usize {
        self.min_token_length
    }

    pub fn is_stopword(&self, token: &str) -> bool {
        self.stopwords.contains(token)
    }
}

/// A tokenized document. Windows never cross document boundaries.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Document {
    pub id: String,
    pub tokens: Vec<String>,
}

impl Document {
    pub fn new(id: impl Into<String>, tokens: Vec<String>) -> Self {
        Self { id: id.into(), tokens }
    }

    /// Tokenizes `text` with `cfg`.
    pub fn from_text(id: impl Into<String>, text: &str, cfg: &TokenizerConfig) -> Self {
        Self::new(id, tokenize(text, cfg))
    }
}

/// Splits `raw` on maximal runs of non-alphanumeric characters, then
/// applies case folding, the stoplist and the minimum length filter.
pub fn tokenize(raw: &str, cfg: &TokenizerConfig) -> Vec<String> {
    raw.split(|c: char| !c.is_alphanumeric())
        .filter(|t| !t.is_empty())
        .map(|t| if cfg.lowercase { t.to_lowercase() } else { t.to_string() })
        .filter(|t| t.chars().count() >= cfg.min_token_length && !cfg.is_stopword(t))
        .collect()
}

/// Parses a stopword list: one word per line, `#` starts a comment.
pub fn parse_stopwords(text: &str) -> Vec<String> {
    text.lines()
        .map(|line| match line.find('#') {
            Some(i) => &line[..i],
            None => line,
        })
        .map(str::trim)
        .filter(|w| !w.is_empty())
        .map(str::to_string)
        .collect()
}

pub fn load_stopwords(path: &Path) -> Result<Vec<String>> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    Ok(parse_stopwords(&text))
}

/// The English stoplist bundled with the crate.
pub fn builtin_stopwords() -> Vec<String> {
    parse_stopwords(BUILTIN_STOPWORDS)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CorpusFormat {
    /// One document per file (a directory) or one document for a single file.
    Plain,
    /// Like `Plain`, but every blank-line-separated block is its own document.
    PlainBlocks,
    /// Reuters-21578 SGML: one document per `REUTERS` element.
    ReutersSgml,
}

/// Loads and tokenizes a corpus. Directories are read in file-name order.
pub fn load_corpus(path: &Path, format: CorpusFormat, cfg: &TokenizerConfig) -> Result<Vec<Document>> {
    let files = corpus_files(path, format)?;
    let mut raw: Vec<(String, String)> = Vec::new();
    for file in &files {
        let name = file
            .file_name()
            .map(|n| n.to_string_lossy().into_owned())
            .unwrap_or_else(|| file.display().to_string());
        match format {
            CorpusFormat::Plain => {
                let text = fs::read_to_string(file).map_err(|e| Error::io(file, e))?;
                raw.push((name, text));
            }
            CorpusFormat::PlainBlocks => {
                let text = fs::read_to_string(file).map_err(|e| Error::io(file, e))?;
                for (k, block) in split_blocks(&text).into_iter().enumerate() {
                    raw.push((format!("{name}#{}", k + 1), block));
                }
            }
            CorpusFormat::ReutersSgml => {
                let bytes = fs::read(file).map_err(|e| Error::io(file, e))?;
                for article in parse_reuters(&bytes, file)? {
                    raw.push((article.id, article.text));
                }
            }
        }
    }
    Ok(raw
        .into_par_iter()
        .map(|(id, text)| Document::from_text(id, &text, cfg))
        .collect())
}

fn corpus_files(path: &Path, format: CorpusFormat) -> Result<Vec<PathBuf>> {
    let meta = fs::metadata(path).map_err(|e| Error::io(path, e))?;
    if !meta.is_dir() {
        return Ok(vec![path.to_path_buf()]);
    }
    let mut files = Vec::new();
    for entry in fs::read_dir(path).map_err(|e| Error::io(path, e))? {
        let entry = entry.map_err(|e| Error::io(path, e))?;
        let p = entry.path();
        if !p.is_file() {
            continue;
        }
        let hidden = p
            .file_name()
            .map(|n| n.to_string_lossy().starts_with('.'))
            .unwrap_or(true);
        if hidden {
            continue;
        }
        if format == CorpusFormat::ReutersSgml && p.extension().is_none_or(|e| e != "sgm") {
            continue;
        }
        files.push(p);
    }
    files.sort();
    Ok(files)
}

fn split_blocks(text: &str) -> Vec<String> {
    let mut blocks = Vec::new();
    let mut current = String::new();
    for line in text.lines() {
        if line.trim().is_empty() {
            if !current.is_empty() {
                blocks.push(std::mem::take(&mut current));
            }
        } else {
            current.push_str(line);
            current.push('\n');
        }
    }
    if !current.is_empty() {
        blocks.push(current);
    }
    blocks
}
