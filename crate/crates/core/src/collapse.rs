//! Context effects on word states.
//!
//! A word state `|v>` seen in the context of `u` collapses to
//! `M_u|v> / sqrt(<v|M_u|v>)`. The context operator may be a whole
//! semantic space, a projector onto some of its eigenstates (a "piece of
//! context"), or the state may simply be read off the context word's
//! centered space.

use std::fmt;
use std::sync::Arc;

use nalgebra::DMatrix;

use crate::space::{word_space, word_vector, Corpus, Provenance, SemanticSpace, StateVector, Vocabulary};
use crate::spectral::{DensityMatrix, EigenSystem};
use crate::{Error, Result};

/// Collapses whose normalizer (or projected norm) falls at or below this
/// value are rejected instead of producing huge or non-finite states.
pub const DEGENERACY_TOLERANCE: f64 = 1e-12;

/// A real symmetric operator acting on ambient word coordinates.
pub trait SymmetricOperator {
    fn dim(&self) -> usize;

    fn apply(&self, x: &[f64]) -> Vec<f64>;

    fn vocabulary(&self) -> Option<&Arc<Vocabulary>> {
        None
    }

    /// Name of the context this operator stands for.
    fn context_label(&self) -> String {
        "operator".to_string()
    }
}

impl SymmetricOperator for SemanticSpace {
    fn dim(&self) -> usize {
        SemanticSpace::dim(self)
    }

    fn apply(&self, x: &[f64]) -> Vec<f64> {
        self.mul_vec(x)
    }

    fn vocabulary(&self) -> Option<&Arc<Vocabulary>> {
        Some(SemanticSpace::vocabulary(self))
    }

    fn context_label(&self) -> String {
        match self.provenance() {
            Provenance::Global => "global".to_string(),
            Provenance::Centered { word, .. } => word.clone(),
        }
    }
}

impl SymmetricOperator for DMatrix<f64> {
    fn dim(&self) -> usize {
        self.nrows()
    }

    fn apply(&self, x: &[f64]) -> Vec<f64> {
        (0..self.nrows())
            .map(|i| self.row(i).iter().zip(x).map(|(a, b)| a * b).sum())
            .collect()
    }
}

impl SymmetricOperator for DensityMatrix {
    fn dim(&self) -> usize {
        DensityMatrix::dim(self)
    }

    fn apply(&self, x: &[f64]) -> Vec<f64> {
        DensityMatrix::apply(self, x)
    }

    fn vocabulary(&self) -> Option<&Arc<Vocabulary>> {
        DensityMatrix::vocabulary(self)
    }

    fn context_label(&self) -> String {
        "density".to_string()
    }
}

/// Orthogonal projector onto the span of an orthonormal basis.
#[derive(Debug, Clone, PartialEq)]
pub struct Projector {
    dim: usize,
    basis: Vec<Vec<f64>>,
    vocab: Option<Arc<Vocabulary>>,
    label: String,
}

impl Projector {
    /// Projector onto `vectors`, which must already be orthonormal (1e-10).
    pub fn from_orthonormal(vectors: &[StateVector]) -> Result<Self> {
        let first = vectors
            .first()
            .ok_or_else(|| Error::param("projector needs at least one vector"))?;
        for v in vectors {
            first.check_compatible(v)?;
        }
        for (i, a) in vectors.iter().enumerate() {
            for b in &vectors[..=i] {
                let target = if std::ptr::eq(a, b) { 1.0 } else { 0.0 };
                let d = a.dot(b)?;
                if (d - target).abs() > 1e-10 {
                    return Err(Error::param(format!("basis is not orthonormal (inner product {d})")));
                }
            }
        }
        Ok(Self {
            dim: first.len(),
            basis: vectors.iter().map(|v| v.components().to_vec()).collect(),
            vocab: first.vocabulary().cloned(),
            label: "projector".to_string(),
        })
    }

    /// Projector onto the span of arbitrary vectors (Gram-Schmidt;
    /// linearly dependent vectors are dropped).
    pub fn span(vectors: &[StateVector]) -> Result<Self> {
        let first = vectors
            .first()
            .ok_or_else(|| Error::param("projector needs at least one vector"))?;
        let mut basis: Vec<Vec<f64>> = Vec::new();
        for v in vectors {
            first.check_compatible(v)?;
            let norm0 = v.norm();
            let mut w = v.components().to_vec();
            for _ in 0..2 {
                for q in &basis {
                    let c: f64 = q.iter().zip(&w).map(|(a, b)| a * b).sum();
                    w.iter_mut().zip(q).for_each(|(x, qi)| *x -= c * qi);
                }
            }
            let n: f64 = w.iter().map(|x| x * x).sum::<f64>().sqrt();
            if n > 1e-10 * norm0 && n > 0.0 {
                basis.push(w.into_iter().map(|x| x / n).collect());
            }
        }
        if basis.is_empty() {
            return Err(Error::ZeroVector);
        }
        Ok(Self {
            dim: first.len(),
            basis,
            vocab: first.vocabulary().cloned(),
            label: "projector".to_string(),
        })
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub fn rank(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[Vec<f64>] {
        &self.basis
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        DMatrix::from_fn(self.dim, self.dim, |i, j| self.basis.iter().map(|b| b[i] * b[j]).sum())
    }
}

impl SymmetricOperator for Projector {
    fn dim(&self) -> usize {
        self.dim
    }

    fn apply(&self, x: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.dim];
        for b in &self.basis {
            let c: f64 = b.iter().zip(x).map(|(p, q)| p * q).sum();
            out.iter_mut().zip(b).for_each(|(o, bi)| *o += c * bi);
        }
        out
    }

    fn vocabulary(&self) -> Option<&Arc<Vocabulary>> {
        self.vocab.as_ref()
    }

    fn context_label(&self) -> String {
        self.label.clone()
    }
}

/// Rank-one projector `|e_j><e_j|` onto eigenstate `j` (1-based).
pub fn piece_of_context(es: &EigenSystem, j: usize) -> Result<Projector> {
    if j == 0 || j > es.len() {
        return Err(Error::param(format!("eigenstate {j} out of range 1..={}", es.len())));
    }
    Ok(Projector::from_orthonormal(&[es.eigenvector(j - 1)])?.with_label(format!("{}#{j}", context_name(es))))
}

/// Projector onto the span of the `k` leading eigenstates of a context
/// space. Experimental: one possible reading of a multi-word context
/// projector.
pub fn context_projector(es: &EigenSystem, k: usize) -> Result<Projector> {
    if k == 0 || k > es.len() {
        return Err(Error::param(format!(
            "projector rank {k} out of range 1..={}",
            es.len()
        )));
    }
    let vectors: Vec<StateVector> = (0..k).map(|i| es.eigenvector(i)).collect();
    Ok(Projector::from_orthonormal(&vectors)?.with_label(format!("{}[1..{k}]", context_name(es))))
}

fn context_name(es: &EigenSystem) -> String {
    match es.provenance() {
        Provenance::Global => "global".to_string(),
        Provenance::Centered { word, .. } => word.clone(),
    }
}

/// A collapsed state together with `<v|M|v>`.
#[derive(Debug, Clone, PartialEq)]
pub struct CollapseResult {
    pub state: StateVector,
    pub normalizer: f64,
    pub context: String,
}

fn check_operand<M: SymmetricOperator + ?Sized>(v: &StateVector, m: &M) -> Result<()> {
    if v.len() != m.dim() {
        return Err(Error::DimensionMismatch {
            expected: m.dim(),
            found: v.len(),
        });
    }
    if let (Some(a), Some(b)) = (v.vocabulary(), m.vocabulary()) {
        if a != b {
            return Err(Error::VocabularyMismatch);
        }
    }
    if v.is_zero() {
        return Err(Error::ZeroVector);
    }
    Ok(())
}

/// `M|v> / sqrt(<v|M|v>)`. For a general symmetric `M` the result need not
/// have unit length; the normalizer is reported alongside.
pub fn collapse_with_operator<M: SymmetricOperator + ?Sized>(v: &StateVector, m: &M) -> Result<CollapseResult> {
    check_operand(v, m)?;
    let mv = m.apply(v.components());
    let normalizer: f64 = v.components().iter().zip(&mv).map(|(a, b)| a * b).sum();
    if normalizer.is_nan() || normalizer <= DEGENERACY_TOLERANCE {
        return Err(Error::DegenerateCollapse { normalizer });
    }
    let root = normalizer.sqrt();
    let state = v.with_components(mv.into_iter().map(|x| x / root).collect())?;
    Ok(CollapseResult {
        state,
        normalizer,
        context: m.context_label(),
    })
}

/// `P|v> / |P|v>|`, a unit state inside the context subspace.
pub fn collapse_with_projector(v: &StateVector, p: &Projector) -> Result<CollapseResult> {
    check_operand(v, p)?;
    let pv = p.apply(v.components());
    let norm = pv.iter().map(|x| x * x).sum::<f64>().sqrt();
    if norm.is_nan() || norm <= DEGENERACY_TOLERANCE {
        return Err(Error::OrthogonalContext { norm });
    }
    let state = v.with_components(pv.into_iter().map(|x| x / norm).collect())?;
    Ok(CollapseResult {
        state,
        normalizer: norm * norm,
        context: p.context_label(),
    })
}

/// `S_X = Σ_{u∈X} S_u`. Every context word must occur in the corpus.
pub fn context_space(corpus: &Corpus, words: &[&str], radius: usize, l: usize) -> Result<SemanticSpace> {
    let (first, rest) = words
        .split_first()
        .ok_or_else(|| Error::param("context needs at least one word"))?;
    let centered = |u: &str| -> Result<SemanticSpace> {
        let cs = word_space(corpus, u, radius, l)?;
        if cs.is_absent() {
            return Err(Error::UnknownWord(u.to_string()));
        }
        Ok(cs.space)
    };
    let mut total = centered(first)?;
    for u in rest {
        total = total.add(&centered(u)?)?;
    }
    Ok(total)
}

/// Unnormalized state of `v` read from the space centered on `u`.
pub fn context_vector(corpus: &Corpus, v: &str, u: &str, radius: usize, l: usize) -> Result<StateVector> {
    let space = context_space(corpus, &[u], radius, l)?;
    word_vector(&space, v)
}

/// Global column of `word` divided by its corpus frequency, then
/// unit-normalized.
pub fn prototype_state(global: &SemanticSpace, corpus: &Corpus, word: &str) -> Result<StateVector> {
    let freq = corpus.frequency(word);
    if freq == 0 {
        return Err(Error::UnknownWord(word.to_string()));
    }
    word_vector(global, word)?.scaled(1.0 / freq as f64)?.normalized()
}

#[derive(Debug, Clone, PartialEq)]
pub struct DeltaEntry {
    pub word: String,
    pub before: f64,
    pub after: f64,
}

impl DeltaEntry {
    pub fn change(&self) -> f64 {
        self.after - self.before
    }
}

/// Largest gains and losses of component weight between two unit states.
#[derive(Debug, Clone, PartialEq)]
pub struct AssociationDelta {
    /// Sorted by gain, largest first.
    pub gains: Vec<DeltaEntry>,
    /// Sorted by change ascending, largest loss first.
    pub losses: Vec<DeltaEntry>,
}

pub fn association_delta(before: &StateVector, after: &StateVector, k: usize) -> Result<AssociationDelta> {
    before.check_compatible(after)?;
    let b = before.normalized()?;
    let a = after.normalized()?;
    let entries: Vec<DeltaEntry> = (0..b.len())
        .map(|i| DeltaEntry {
            word: b.name(i),
            before: b.components()[i],
            after: a.components()[i],
        })
        .collect();
    let mut gains: Vec<&DeltaEntry> = entries.iter().filter(|e| e.change() > 0.0).collect();
    gains.sort_by(|x, y| y.change().total_cmp(&x.change()));
    let mut losses: Vec<&DeltaEntry> = entries.iter().filter(|e| e.change() < 0.0).collect();
    losses.sort_by(|x, y| x.change().total_cmp(&y.change()));
    Ok(AssociationDelta {
        gains: gains.into_iter().take(k).cloned().collect(),
        losses: losses.into_iter().take(k).cloned().collect(),
    })
}

impl AssociationDelta {
    /// `gain|loss <tab> word <tab> before <tab> after` per line.
    pub fn to_tsv(&self) -> String {
        let mut out = String::new();
        for (kind, list) in [("gain", &self.gains), ("loss", &self.losses)] {
            for e in list {
                out.push_str(&format!("{kind}\t{}\t{}\t{}\n", e.word, e.before, e.after));
            }
        }
        out
    }
}

impl fmt::Display for AssociationDelta {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (title, list) in [("gains", &self.gains), ("losses", &self.losses)] {
            writeln!(f, "{title}:")?;
            for e in list {
                writeln!(
                    f,
                    "  {} ({:.4} -> {:.4}, {:+.4})",
                    e.word,
                    e.before,
                    e.after,
                    e.change()
                )?;
            }
        }
        Ok(())
    }
}
