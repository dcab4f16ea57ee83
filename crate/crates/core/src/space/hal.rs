use std::sync::Arc;

use rayon::prelude::*;

use super::sparse::{Accumulator, SparseMatrix};
use super::{CooccurrenceMatrix, Corpus, Provenance, SemanticSpace};
use crate::{Error, Result};

/// Adds the HAL weights of one token run: every token at position `i`
/// receives `l + 1 - (i - j)` from each of the `l` tokens preceding it.
fn accumulate(tokens: &[u32], l: usize, acc: &mut Accumulator) {
    for i in 0..tokens.len() {
        for j in i.saturating_sub(l)..i {
            *acc.entry((tokens[i], tokens[j])).or_insert(0) += (l + 1 - (i - j)) as u64;
        }
    }
}

fn merge(a: Accumulator, b: Accumulator) -> Accumulator {
    let (mut big, small) = if a.len() >= b.len() { (a, b) } else { (b, a) };
    for (k, w) in small {
        *big.entry(k).or_insert(0) += w;
    }
    big
}

fn check_window(l: usize) -> Result<()> {
    if l == 0 {
        return Err(Error::param("window length must be at least 1"));
    }
    Ok(())
}

fn check_radius(radius: usize) -> Result<()> {
    if radius == 0 {
        return Err(Error::param("radius must be at least 1"));
    }
    Ok(())
}

/// HAL matrix of a corpus with window length `l`. Windows never span documents.
pub fn build_hal(corpus: &Corpus, l: usize) -> Result<CooccurrenceMatrix> {
    check_window(l)?;
    let acc = corpus
        .documents()
        .par_iter()
        .fold(Accumulator::new, |mut acc, doc| {
            accumulate(doc, l, &mut acc);
            acc
        })
        .reduce(Accumulator::new, merge);
    Ok(CooccurrenceMatrix {
        matrix: SparseMatrix::from_accumulator(corpus.vocabulary().len(), acc),
        vocab: Arc::clone(corpus.vocabulary()),
        window: l,
        provenance: Provenance::Global,
    })
}

/// `S = H + Hᵀ`.
pub fn symmetrize(hal: &CooccurrenceMatrix) -> SemanticSpace {
    let triplets = hal
        .matrix
        .iter()
        .flat_map(|(r, c, w)| [(r as u32, c as u32, w), (c as u32, r as u32, w)])
        .collect();
    let matrix = SparseMatrix::from_triplets(hal.dim(), triplets).expect("indices already in range");
    SemanticSpace::new(Arc::clone(&hal.vocab), matrix, hal.provenance.clone()).expect("H + Hᵀ is symmetric")
}

/// The space centered on a word, plus how often the word occurred.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CenteredSpace {
    pub space: SemanticSpace,
    pub occurrences: usize,
}

impl CenteredSpace {
    /// True when the center word never occurs; the space is then zero.
    pub fn is_absent(&self) -> bool {
        self.occurrences == 0
    }
}

/// Sum of the spaces of all windows centered on `word`.
///
/// Each occurrence at position `p` contributes the symmetrized HAL matrix
/// of the token slice `[p - radius, p + radius]`, clipped to its document.
/// Overlapping slices are summed as they are, without deduplication.
pub fn word_space(corpus: &Corpus, word: &str, radius: usize, l: usize) -> Result<CenteredSpace> {
    check_radius(radius)?;
    check_window(l)?;
    let provenance = Provenance::Centered {
        word: word.to_string(),
        radius,
    };
    let vocab = Arc::clone(corpus.vocabulary());
    let Some(center) = vocab.index_of(word) else {
        return Ok(CenteredSpace {
            space: SemanticSpace::zero(vocab, provenance),
            occurrences: 0,
        });
    };
    let center = center as u32;

    let (acc, occurrences) = corpus
        .documents()
        .par_iter()
        .fold(
            || (Accumulator::new(), 0usize),
            |(mut acc, mut count), doc| {
                for (p, _) in doc.iter().enumerate().filter(|(_, &t)| t == center) {
                    let start = p.saturating_sub(radius);
                    let end = (p + radius).min(doc.len() - 1);
                    accumulate(&doc[start..=end], l, &mut acc);
                    count += 1;
                }
                (acc, count)
            },
        )
        .reduce(|| (Accumulator::new(), 0), |(a, n), (b, m)| (merge(a, b), n + m));

    let hal = CooccurrenceMatrix {
        matrix: SparseMatrix::from_accumulator(vocab.len(), acc),
        vocab,
        window: l,
        provenance,
    };
    Ok(CenteredSpace {
        space: symmetrize(&hal),
        occurrences,
    })
}

/// The global space: the sum of [`word_space`] over every vocabulary word.
///
/// Every token position is the center of exactly one slice, so a pair of
/// positions `(i, j)` with `0 < i - j <= l` is counted once per center `p`
/// with `i - radius <= p <= j + radius` inside the document. That count is
/// applied directly instead of materializing the slices.
pub fn global_space(corpus: &Corpus, radius: usize, l: usize) -> Result<SemanticSpace> {
    check_radius(radius)?;
    check_window(l)?;
    let acc = corpus
        .documents()
        .par_iter()
        .fold(Accumulator::new, |mut acc, doc| {
            let last = doc.len() as i64 - 1;
            let r = radius as i64;
            for i in 0..doc.len() {
                for j in i.saturating_sub(l)..i {
                    let centers = (j as i64 + r).min(last) - (i as i64 - r).max(0) + 1;
                    if centers > 0 {
                        let w = (l + 1 - (i - j)) as u64 * centers as u64;
                        *acc.entry((doc[i], doc[j])).or_insert(0) += w;
                    }
                }
            }
            acc
        })
        .reduce(Accumulator::new, merge);
    let hal = CooccurrenceMatrix {
        matrix: SparseMatrix::from_accumulator(corpus.vocabulary().len(), acc),
        vocab: Arc::clone(corpus.vocabulary()),
        window: l,
        provenance: Provenance::Global,
    };
    Ok(symmetrize(&hal))
}
