use std::sync::Arc;

use nalgebra::DMatrix;

use super::{eigendecompose, eigendecompose_matrix, EigenOptions, EigenSystem};
use crate::space::{Provenance, SemanticSpace, StateVector, Vocabulary};
use crate::{Error, Result};

/// Symmetric positive-semidefinite operator of unit trace, held in
/// spectral form `Σ a_i |e_i><e_i|` with `a_i > 0` and `Σ a_i = 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    spectrum: EigenSystem,
}

impl DensityMatrix {
    /// Clips negative eigenvalues of `es` and rescales the rest to sum to one.
    ///
    /// HAL spaces have a zero diagonal and are indefinite, so trace scaling
    /// alone would not give a positive operator.
    pub fn from_eigensystem(es: &EigenSystem) -> Result<Self> {
        let keep: Vec<usize> = (0..es.len()).filter(|&i| es.values[i] > 0.0).collect();
        if keep.is_empty() {
            return Err(Error::DegenerateSpace);
        }
        let total: f64 = keep.iter().map(|&i| es.values[i]).sum();
        let mut vectors = DMatrix::<f64>::zeros(es.support.len(), keep.len());
        for (col, &i) in keep.iter().enumerate() {
            vectors.set_column(col, &es.vectors.column(i));
        }
        let weights = keep.iter().map(|&i| es.values[i] / total).collect();
        Ok(Self {
            spectrum: EigenSystem {
                dim: es.dim,
                support: es.support.clone(),
                values: weights,
                vectors,
                vocab: es.vocab.clone(),
                provenance: es.provenance.clone(),
            },
        })
    }

    /// Normalizes an arbitrary symmetric matrix the same way as a space.
    pub fn from_matrix(matrix: &DMatrix<f64>) -> Result<Self> {
        Self::from_eigensystem(&eigendecompose_matrix(matrix)?)
    }

    /// The pure state `|v̂><v̂|`.
    pub fn pure(state: &StateVector) -> Result<Self> {
        let unit = state.normalized()?;
        let support: Vec<usize> = (0..unit.len()).filter(|&i| unit.components()[i] != 0.0).collect();
        let column: Vec<f64> = support.iter().map(|&i| unit.components()[i]).collect();
        let es = EigenSystem::assemble(
            unit.len(),
            support,
            vec![1.0],
            DMatrix::from_column_slice(column.len(), 1, &column),
            unit.vocabulary().cloned(),
            Provenance::Global,
        );
        Ok(Self { spectrum: es })
    }

    pub fn dim(&self) -> usize {
        self.spectrum.dim
    }

    pub fn vocabulary(&self) -> Option<&Arc<Vocabulary>> {
        self.spectrum.vocab.as_ref()
    }

    /// Mixture weights `a_i`, largest first.
    pub fn weights(&self) -> &[f64] {
        &self.spectrum.values
    }

    /// The retained eigenpairs with the mixture weights as eigenvalues.
    pub fn spectral_form(&self) -> &EigenSystem {
        &self.spectrum
    }

    pub fn trace(&self) -> f64 {
        self.weights().iter().sum()
    }

    pub fn purity(&self) -> f64 {
        self.weights().iter().map(|a| a * a).sum()
    }

    /// Dense ambient matrix.
    pub fn to_dense(&self) -> DMatrix<f64> {
        let es = &self.spectrum;
        let mut local = DMatrix::<f64>::zeros(es.support.len(), es.support.len());
        for (i, &a) in es.values.iter().enumerate() {
            let e = es.vectors.column(i);
            local += a * e * e.transpose();
        }
        let mut out = DMatrix::<f64>::zeros(es.dim, es.dim);
        for (s, &r) in es.support.iter().enumerate() {
            for (t, &c) in es.support.iter().enumerate() {
                out[(r, c)] = local[(s, t)];
            }
        }
        out
    }

    /// `ρ x` without materializing `ρ`.
    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        let es = &self.spectrum;
        let mut out = vec![0.0; es.dim];
        for (i, &a) in es.values.iter().enumerate() {
            let e = es.vectors.column(i);
            let c: f64 = es.support.iter().enumerate().map(|(s, &r)| e[s] * x[r]).sum();
            for (s, &r) in es.support.iter().enumerate() {
                out[r] += a * c * e[s];
            }
        }
        out
    }

    /// The ket of `word` drawn from this density: column `word` of `ρ`.
    pub fn word_state(&self, word: &str) -> Result<StateVector> {
        let vocab = self
            .vocabulary()
            .ok_or_else(|| Error::param("density has no vocabulary"))?;
        let w = vocab.lookup(word)?;
        let mut unit = vec![0.0; self.dim()];
        unit[w] = 1.0;
        Ok(StateVector::over(Arc::clone(vocab), self.apply(&unit))?.with_label(word))
    }

    /// Decomposes the materialized operator again on its support. The
    /// result is complete on the support and independent of the stored form.
    pub fn eigensystem(&self) -> Result<EigenSystem> {
        let es = &self.spectrum;
        let dense = self.to_dense();
        let block = DMatrix::from_fn(es.support.len(), es.support.len(), |s, t| {
            dense[(es.support[s], es.support[t])]
        });
        let local = eigendecompose_matrix(&block)?;
        Ok(EigenSystem::assemble(
            es.dim,
            es.support.clone(),
            local.values,
            local.vectors,
            es.vocab.clone(),
            es.provenance.clone(),
        ))
    }
}

/// Density of a semantic space: decompose, clip negative eigenvalues,
/// renormalize the rest.
pub fn density_from_space(space: &SemanticSpace, opts: &EigenOptions) -> Result<DensityMatrix> {
    if space.is_zero() {
        return Err(Error::DegenerateSpace);
    }
    DensityMatrix::from_eigensystem(&eigendecompose(space, opts)?)
}

/// `trace(ρ²)`: one for pure states, smaller for mixtures.
pub fn purity(rho: &DensityMatrix) -> f64 {
    rho.purity()
}
