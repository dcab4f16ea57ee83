use std::sync::Arc;

use super::{SemanticSpace, Vocabulary};
use crate::{Error, Result};

/// A word state (ket): one real component per vocabulary word.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    components: Vec<f64>,
    vocab: Option<Arc<Vocabulary>>,
    label: Option<String>,
}

impl StateVector {
    /// A state without vocabulary; components are addressed by index.
    pub fn from_components(components: Vec<f64>) -> Result<Self> {
        if let Some(i) = components.iter().position(|x| !x.is_finite()) {
            return Err(Error::param(format!("component {i} is not finite")));
        }
        Ok(Self {
            components,
            vocab: None,
            label: None,
        })
    }

    pub fn over(vocab: Arc<Vocabulary>, components: Vec<f64>) -> Result<Self> {
        if components.len() != vocab.len() {
            return Err(Error::DimensionMismatch {
                expected: vocab.len(),
                found: components.len(),
            });
        }
        let mut v = Self::from_components(components)?;
        v.vocab = Some(vocab);
        Ok(v)
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = Some(label.into());
        self
    }

    /// Same vocabulary and label, new components of the same length.
    pub(crate) fn with_components(&self, components: Vec<f64>) -> Result<Self> {
        debug_assert_eq!(components.len(), self.len());
        let mut v = Self::from_components(components)?;
        v.vocab = self.vocab.clone();
        v.label = self.label.clone();
        Ok(v)
    }

    pub fn components(&self) -> &[f64] {
        &self.components
    }

    pub fn len(&self) -> usize {
        self.components.len()
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }

    pub fn vocabulary(&self) -> Option<&Arc<Vocabulary>> {
        self.vocab.as_ref()
    }

    pub fn label(&self) -> Option<&str> {
        self.label.as_deref()
    }

    /// Display name of component `i`: the vocabulary word, or `#i`.
    pub fn name(&self, i: usize) -> String {
        match &self.vocab {
            Some(v) => v.word(i).to_string(),
            None => format!("#{i}"),
        }
    }

    pub fn weight(&self, word: &str) -> Option<f64> {
        let i = self.vocab.as_ref()?.index_of(word)?;
        Some(self.components[i])
    }

    /// Errors unless both states live in the same coordinates.
    pub fn check_compatible(&self, other: &Self) -> Result<()> {
        if self.len() != other.len() {
            return Err(Error::DimensionMismatch {
                expected: self.len(),
                found: other.len(),
            });
        }
        match (&self.vocab, &other.vocab) {
            (Some(a), Some(b)) if a != b => Err(Error::VocabularyMismatch),
            _ => Ok(()),
        }
    }

    /// Scalar product `<self|other>`.
    pub fn dot(&self, other: &Self) -> Result<f64> {
        self.check_compatible(other)?;
        Ok(dot(&self.components, &other.components))
    }

    pub fn norm(&self) -> f64 {
        dot(&self.components, &self.components).sqrt()
    }

    pub fn is_zero(&self) -> bool {
        self.components.iter().all(|&x| x == 0.0)
    }

    pub fn scaled(&self, factor: f64) -> Result<Self> {
        self.with_components(self.components.iter().map(|x| x * factor).collect())
    }

    /// Unit-length copy; the zero vector has no direction.
    pub fn normalized(&self) -> Result<Self> {
        let norm = self.norm();
        if norm == 0.0 {
            return Err(Error::ZeroVector);
        }
        self.scaled(1.0 / norm)
    }
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Column `word` of `space`: its association strengths with every word.
pub fn word_vector(space: &SemanticSpace, word: &str) -> Result<StateVector> {
    let w = space.vocabulary().lookup(word)?;
    let mut components = vec![0.0; space.dim()];
    // Symmetric storage: row w equals column w.
    for (u, weight) in space.matrix().row(w) {
        components[u] = weight as f64;
    }
    Ok(StateVector::over(Arc::clone(space.vocabulary()), components)?.with_label(word))
}

/// The `k` largest nonzero components, descending; ties keep vocabulary order.
pub fn top_associates(v: &StateVector, k: usize) -> Vec<(String, f64)> {
    let mut idx: Vec<usize> = (0..v.len()).filter(|&i| v.components[i] != 0.0).collect();
    idx.sort_by(|&a, &b| v.components[b].total_cmp(&v.components[a]).then(a.cmp(&b)));
    idx.truncate(k);
    idx.into_iter().map(|i| (v.name(i), v.components[i])).collect()
}
