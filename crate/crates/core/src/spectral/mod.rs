//! Eigenstates, truncated reconstruction and density operators.
//!
//! Spaces are decomposed on their active sub-vocabulary (the rows with any
//! nonzero entry); zero rows only add zero eigenpairs. Eigenpairs are kept
//! in descending algebraic order and every eigenvector is signed so that its
//! largest-magnitude component is positive.

mod density;
mod lanczos;
mod report;

use std::sync::Arc;

use nalgebra::{DMatrix, SymmetricEigen};

use crate::space::{Provenance, SemanticSpace, StateVector, Vocabulary};
use crate::{Error, Result};

pub use density::{density_from_space, purity, DensityMatrix};
pub use report::{eigenstate_report, EigenstateReport, ReportedState};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EigenOptions {
    /// Active dimensions up to this size get a full dense decomposition.
    pub dense_cap: usize,
    /// Eigenpairs computed iteratively above the cap (largest magnitude).
    pub top_k: usize,
    /// Upper bound on the Lanczos basis size.
    pub max_krylov: usize,
}

impl Default for EigenOptions {
    fn default() -> Self {
        Self {
            dense_cap: 2000,
            top_k: 50,
            max_krylov: 1000,
        }
    }
}

/// Eigenpairs of a symmetric operator.
///
/// Eigenvectors live on `support`, a sorted subset of the ambient
/// coordinates; they are zero elsewhere.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenSystem {
    pub(crate) dim: usize,
    pub(crate) support: Vec<usize>,
    pub(crate) values: Vec<f64>,
    pub(crate) vectors: DMatrix<f64>,
    pub(crate) vocab: Option<Arc<Vocabulary>>,
    pub(crate) provenance: Provenance,
}

impl EigenSystem {
    /// Sorts pairs by descending eigenvalue and applies the sign convention.
    pub(crate) fn assemble(
        dim: usize,
        support: Vec<usize>,
        values: Vec<f64>,
        vectors: DMatrix<f64>,
        vocab: Option<Arc<Vocabulary>>,
        provenance: Provenance,
    ) -> Self {
        let mut order: Vec<usize> = (0..values.len()).collect();
        order.sort_by(|&a, &b| values[b].total_cmp(&values[a]).then(a.cmp(&b)));
        let mut sorted = DMatrix::<f64>::zeros(support.len(), order.len());
        for (col, &i) in order.iter().enumerate() {
            let mut v = vectors.column(i).into_owned();
            if sign_flip(v.as_slice()) {
                v.neg_mut();
            }
            sorted.set_column(col, &v);
        }
        Self {
            dim,
            support,
            values: order.iter().map(|&i| values[i]).collect(),
            vectors: sorted,
            vocab,
            provenance,
        }
    }

    /// Ambient dimension (vocabulary size).
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Number of eigenpairs held.
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// True when the eigenvectors form a basis of the whole ambient space.
    pub fn is_complete(&self) -> bool {
        self.values.len() == self.dim
    }

    /// Eigenvalues, largest first.
    pub fn eigenvalues(&self) -> &[f64] {
        &self.values
    }

    pub fn support(&self) -> &[usize] {
        &self.support
    }

    /// Eigenvectors restricted to the support, one per column.
    pub fn support_vectors(&self) -> &DMatrix<f64> {
        &self.vectors
    }

    pub fn vocabulary(&self) -> Option<&Arc<Vocabulary>> {
        self.vocab.as_ref()
    }

    pub fn provenance(&self) -> &Provenance {
        &self.provenance
    }

    /// Eigenvector `i` (0-based, descending order) in ambient coordinates.
    pub fn eigenvector(&self, i: usize) -> StateVector {
        let mut components = vec![0.0; self.dim];
        for (s, &a) in self.support.iter().enumerate() {
            components[a] = self.vectors[(s, i)];
        }
        let v = match &self.vocab {
            Some(vocab) => StateVector::over(Arc::clone(vocab), components),
            None => StateVector::from_components(components),
        };
        v.expect("eigenvectors are finite and sized to the ambient space")
    }

    /// Pair indices ordered by descending eigenvalue magnitude.
    pub fn magnitude_order(&self) -> Vec<usize> {
        let mut order: Vec<usize> = (0..self.len()).collect();
        order.sort_by(|&a, &b| self.values[b].abs().total_cmp(&self.values[a].abs()).then(a.cmp(&b)));
        order
    }

    /// Component name for ambient index `a`.
    pub(crate) fn name(&self, a: usize) -> String {
        match &self.vocab {
            Some(v) => v.word(a).to_string(),
            None => format!("#{a}"),
        }
    }
}

/// True when the first component of largest magnitude is negative.
fn sign_flip(v: &[f64]) -> bool {
    let max = v.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    if max == 0.0 {
        return false;
    }
    // Near-equal magnitudes count as ties so the choice survives rounding.
    let lead = v.iter().find(|x| x.abs() >= max * (1.0 - 1e-9)).unwrap();
    *lead < 0.0
}

fn dense_eigen(matrix: DMatrix<f64>) -> (Vec<f64>, DMatrix<f64>) {
    let eig = SymmetricEigen::new(matrix);
    (eig.eigenvalues.as_slice().to_vec(), eig.eigenvectors)
}

/// Full decomposition of a dense symmetric matrix.
pub fn eigendecompose_matrix(matrix: &DMatrix<f64>) -> Result<EigenSystem> {
    let n = matrix.nrows();
    if n != matrix.ncols() {
        return Err(Error::param(format!("matrix is {}x{}, not square", n, matrix.ncols())));
    }
    if n == 0 {
        return Err(Error::param("cannot decompose a 0-dimensional matrix"));
    }
    let scale = matrix.amax().max(1.0);
    for i in 0..n {
        for j in 0..i {
            if (matrix[(i, j)] - matrix[(j, i)]).abs() > 1e-12 * scale {
                return Err(Error::param(format!("matrix is not symmetric at ({i}, {j})")));
            }
        }
    }
    if matrix.iter().any(|x| !x.is_finite()) {
        return Err(Error::param("matrix has non-finite entries"));
    }
    let (values, vectors) = dense_eigen(matrix.clone());
    Ok(EigenSystem::assemble(
        n,
        (0..n).collect(),
        values,
        vectors,
        None,
        Provenance::Global,
    ))
}

/// Decomposes a semantic space restricted to its active sub-vocabulary.
///
/// Up to `opts.dense_cap` active words the decomposition is complete on the
/// support; above it only the `opts.top_k` largest-magnitude pairs are found.
pub fn eigendecompose(space: &SemanticSpace, opts: &EigenOptions) -> Result<EigenSystem> {
    let n = space.dim();
    if n == 0 {
        return Err(Error::param("cannot decompose a 0-dimensional space"));
    }
    let support = space.active_indices();
    let m = support.len();
    let mut local = vec![usize::MAX; n];
    for (s, &a) in support.iter().enumerate() {
        local[a] = s;
    }
    let vocab = Some(Arc::clone(space.vocabulary()));
    let provenance = space.provenance().clone();

    let (values, vectors) = if m <= opts.dense_cap {
        let mut dense = DMatrix::<f64>::zeros(m, m);
        for (s, &a) in support.iter().enumerate() {
            for (c, w) in space.matrix().row(a) {
                dense[(s, local[c])] = w as f64;
            }
        }
        if m == 0 {
            (Vec::new(), dense)
        } else {
            dense_eigen(dense)
        }
    } else {
        let rows: Vec<Vec<(usize, f64)>> = support
            .iter()
            .map(|&a| space.matrix().row(a).map(|(c, w)| (local[c], w as f64)).collect())
            .collect();
        let apply = |x: &[f64]| -> Vec<f64> {
            rows.iter()
                .map(|row| row.iter().map(|&(c, w)| w * x[c]).sum())
                .collect()
        };
        let pairs = lanczos::largest_magnitude(apply, m, opts.top_k, opts.max_krylov)?;
        (pairs.values, pairs.vectors)
    };
    Ok(EigenSystem::assemble(n, support, values, vectors, vocab, provenance))
}

/// `Σ d_i |e_i><e_i|` over the `k` largest-magnitude eigenpairs, as a dense
/// ambient matrix.
pub fn spectral_reconstruct(es: &EigenSystem, k: usize) -> Result<DMatrix<f64>> {
    if k > es.dim() {
        return Err(Error::param(format!("k = {k} exceeds dimension {}", es.dim())));
    }
    if k > es.len() {
        return Err(Error::param(format!(
            "k = {k} exceeds the {} available eigenpairs",
            es.len()
        )));
    }
    let m = es.support.len();
    let mut local = DMatrix::<f64>::zeros(m, m);
    for &i in es.magnitude_order().iter().take(k) {
        let e = es.vectors.column(i);
        local += es.values[i] * e * e.transpose();
    }
    let mut out = DMatrix::<f64>::zeros(es.dim, es.dim);
    for (s, &a) in es.support.iter().enumerate() {
        for (t, &b) in es.support.iter().enumerate() {
            out[(a, b)] = local[(s, t)];
        }
    }
    Ok(out)
}

/// Coefficients `α_i = <e_i|v̂>` of the unit-normalized state in the eigenbasis.
pub fn express_in_eigenbasis(v: &StateVector, es: &EigenSystem) -> Result<Vec<f64>> {
    if v.len() != es.dim() {
        return Err(Error::DimensionMismatch {
            expected: es.dim(),
            found: v.len(),
        });
    }
    if let (Some(a), Some(b)) = (v.vocabulary(), es.vocabulary()) {
        if a != b {
            return Err(Error::VocabularyMismatch);
        }
    }
    let unit = v.normalized()?;
    let x = unit.components();
    Ok((0..es.len())
        .map(|i| {
            es.support
                .iter()
                .enumerate()
                .map(|(s, &a)| es.vectors[(s, i)] * x[a])
                .sum()
        })
        .collect())
}
