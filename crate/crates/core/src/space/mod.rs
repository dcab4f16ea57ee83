//! Vocabularies, HAL co-occurrence matrices and symmetric semantic spaces.

mod hal;
mod sparse;
mod state;

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::sync::Arc;

use crate::ingest::Document;
use crate::{Error, Result};

pub use hal::{build_hal, global_space, symmetrize, word_space, CenteredSpace};
pub use sparse::SparseMatrix;
pub use state::{top_associates, word_vector, StateVector};

/// Bijection between words and dense indices `0..n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Vocabulary {
    words: Vec<String>,
    index: HashMap<String, usize>,
}

impl Vocabulary {
    /// Words keep the given order; duplicates and empty words are rejected.
    pub fn from_words<I, S>(words: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let words: Vec<String> = words.into_iter().map(Into::into).collect();
        let mut index = HashMap::with_capacity(words.len());
        for (i, w) in words.iter().enumerate() {
            if w.is_empty() || w.chars().any(char::is_whitespace) {
                return Err(Error::param(format!("invalid vocabulary word {w:?}")));
            }
            if index.insert(w.clone(), i).is_some() {
                return Err(Error::param(format!("duplicate vocabulary word {w:?}")));
            }
        }
        Ok(Self { words, index })
    }

    /// Distinct tokens of all documents, sorted.
    pub fn from_documents(docs: &[Document]) -> Self {
        let distinct: BTreeSet<&str> = docs.iter().flat_map(|d| d.tokens.iter().map(String::as_str)).collect();
        Self::from_words(distinct.into_iter().map(str::to_string)).expect("tokens are distinct non-empty words")
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn index_of(&self, word: &str) -> Option<usize> {
        self.index.get(word).copied()
    }

    /// Like [`index_of`](Self::index_of) but unknown words are an error.
    pub fn lookup(&self, word: &str) -> Result<usize> {
        self.index_of(word).ok_or_else(|| Error::UnknownWord(word.to_string()))
    }

    pub fn word(&self, index: usize) -> &str {
        &self.words[index]
    }

    pub fn words(&self) -> &[String] {
        &self.words
    }
}

/// A tokenized corpus encoded against its own vocabulary.
#[derive(Debug, Clone)]
pub struct Corpus {
    ids: Vec<String>,
    docs: Vec<Vec<u32>>,
    vocab: Arc<Vocabulary>,
    frequencies: Vec<u64>,
}

impl Corpus {
    pub fn new(documents: &[Document]) -> Self {
        let vocab = Vocabulary::from_documents(documents);
        let mut frequencies = vec![0u64; vocab.len()];
        let docs = documents
            .iter()
            .map(|d| {
                d.tokens
                    .iter()
                    .map(|t| {
                        let i = vocab.index_of(t).expect("vocabulary covers every token");
                        frequencies[i] += 1;
                        i as u32
                    })
                    .collect()
            })
            .collect();
        Self {
            ids: documents.iter().map(|d| d.id.clone()).collect(),
            docs,
            vocab: Arc::new(vocab),
            frequencies,
        }
    }

    pub fn vocabulary(&self) -> &Arc<Vocabulary> {
        &self.vocab
    }

    pub fn document_ids(&self) -> &[String] {
        &self.ids
    }

    /// Token index sequences, one per document.
    pub fn documents(&self) -> &[Vec<u32>] {
        &self.docs
    }

    pub fn len(&self) -> usize {
        self.docs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.docs.is_empty()
    }

    pub fn token_count(&self) -> usize {
        self.docs.iter().map(Vec::len).sum()
    }

    /// Number of occurrences of `word`; zero for unknown words.
    pub fn frequency(&self, word: &str) -> u64 {
        self.vocab.index_of(word).map_or(0, |i| self.frequencies[i])
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Provenance {
    Global,
    Centered { word: String, radius: usize },
}

impl fmt::Display for Provenance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Provenance::Global => write!(f, "global"),
            Provenance::Centered { word, radius } => write!(f, "centered {word} {radius}"),
        }
    }
}

/// Directional HAL matrix: entry `(i, j)` accumulates how strongly word `j`
/// preceded word `i` inside the sliding window.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CooccurrenceMatrix {
    pub(crate) matrix: SparseMatrix,
    pub(crate) vocab: Arc<Vocabulary>,
    pub(crate) window: usize,
    pub(crate) provenance: Provenance,
}

impl CooccurrenceMatrix {
    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    pub fn window_length(&self) -> usize {
        self.window
    }

    pub fn vocabulary(&self) -> &Arc<Vocabulary> {
        &self.vocab
    }

    pub fn provenance(&self) -> &Provenance {
        &self.provenance
    }

    pub fn matrix(&self) -> &SparseMatrix {
        &self.matrix
    }

    pub fn get(&self, row: usize, col: usize) -> u64 {
        self.matrix.get(row, col)
    }

    /// Weight of `(row_word, col_word)`; unknown words read as zero.
    pub fn weight(&self, row_word: &str, col_word: &str) -> u64 {
        match (self.vocab.index_of(row_word), self.vocab.index_of(col_word)) {
            (Some(r), Some(c)) => self.matrix.get(r, c),
            _ => 0,
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.vocab != other.vocab {
            return Err(Error::VocabularyMismatch);
        }
        if self.window != other.window {
            return Err(Error::param("cannot add HAL matrices built with different windows"));
        }
        Ok(Self {
            matrix: self.matrix.add(&other.matrix)?,
            vocab: Arc::clone(&self.vocab),
            window: self.window,
            provenance: self.provenance.clone(),
        })
    }
}

/// Symmetric, nonnegative word-by-word association matrix.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SemanticSpace {
    matrix: SparseMatrix,
    vocab: Arc<Vocabulary>,
    provenance: Provenance,
}

impl SemanticSpace {
    pub fn new(vocab: Arc<Vocabulary>, matrix: SparseMatrix, provenance: Provenance) -> Result<Self> {
        if matrix.dim() != vocab.len() {
            return Err(Error::DimensionMismatch {
                expected: vocab.len(),
                found: matrix.dim(),
            });
        }
        if !matrix.is_symmetric() {
            return Err(Error::param("semantic space matrix is not symmetric"));
        }
        Ok(Self {
            matrix,
            vocab,
            provenance,
        })
    }

    pub fn zero(vocab: Arc<Vocabulary>, provenance: Provenance) -> Self {
        Self {
            matrix: SparseMatrix::zeros(vocab.len()),
            vocab,
            provenance,
        }
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    pub fn vocabulary(&self) -> &Arc<Vocabulary> {
        &self.vocab
    }

    pub fn provenance(&self) -> &Provenance {
        &self.provenance
    }

    pub fn matrix(&self) -> &SparseMatrix {
        &self.matrix
    }

    pub fn is_zero(&self) -> bool {
        self.matrix.is_zero()
    }

    pub fn get(&self, row: usize, col: usize) -> u64 {
        self.matrix.get(row, col)
    }

    pub fn weight(&self, a: &str, b: &str) -> u64 {
        match (self.vocab.index_of(a), self.vocab.index_of(b)) {
            (Some(r), Some(c)) => self.matrix.get(r, c),
            _ => 0,
        }
    }

    /// Indices of rows (equivalently columns) holding any nonzero entry.
    pub fn active_indices(&self) -> Vec<usize> {
        (0..self.dim()).filter(|&i| !self.matrix.row_is_empty(i)).collect()
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        self.matrix.mul_vec(x)
    }

    /// Elementwise sum. The provenance is kept when both agree and becomes
    /// `Global` otherwise: a sum over several centers is a mixture.
    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.vocab != other.vocab {
            return Err(Error::VocabularyMismatch);
        }
        let provenance = if self.provenance == other.provenance {
            self.provenance.clone()
        } else {
            Provenance::Global
        };
        Ok(Self {
            matrix: self.matrix.add(&other.matrix)?,
            vocab: Arc::clone(&self.vocab),
            provenance,
        })
    }
}
