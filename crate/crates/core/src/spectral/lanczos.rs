//! Lanczos iteration with full reorthogonalization for the largest-magnitude
//! eigenpairs of a symmetric operator.

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use crate::{Error, Result};

const RESIDUAL_TOL: f64 = 1e-9;

pub(crate) struct Eigenpairs {
    pub values: Vec<f64>,
    /// Columns are unit eigenvectors.
    pub vectors: DMatrix<f64>,
}

/// Deterministic, non-degenerate start vector number `seed`.
fn start_vector(m: usize, seed: usize) -> Vec<f64> {
    let phase = 0.618_033_988_749_895 * (seed as f64 + 1.0);
    (0..m)
        .map(|i| 1.0 + 0.5 * ((i as f64 + 1.0) * phase * 1.7).sin())
        .collect()
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

fn orthogonalize(w: &mut [f64], basis: &[Vec<f64>]) {
    // Two passes of classical Gram-Schmidt keep the basis orthogonal to
    // working precision.
    for _ in 0..2 {
        for q in basis {
            let c = dot(q, w);
            axpy(-c, q, w);
        }
    }
}

/// Largest-magnitude `k` eigenpairs of the `m`-dimensional operator `apply`.
pub(crate) fn largest_magnitude<F>(apply: F, m: usize, k: usize, max_krylov: usize) -> Result<Eigenpairs>
where
    F: Fn(&[f64]) -> Vec<f64>,
{
    let k = k.min(m);
    if k == 0 {
        return Ok(Eigenpairs {
            values: Vec::new(),
            vectors: DMatrix::zeros(m, 0),
        });
    }
    let limit = max_krylov.max(k).min(m);
    let mut p = (2 * k + 20).max(40).min(limit);
    loop {
        let (values, vectors, worst) = run(&apply, m, k, p);
        if worst <= RESIDUAL_TOL {
            return Ok(Eigenpairs { values, vectors });
        }
        if p == limit {
            return Err(Error::NotConverged(format!(
                "{k} eigenpairs of a {m}-dimensional operator with {p} Krylov vectors (relative residual {worst:e})"
            )));
        }
        p = (2 * p).min(limit);
    }
}

/// One Lanczos run with `p` basis vectors. Returns the Ritz pairs and the
/// worst relative residual among them.
fn run<F>(apply: &F, m: usize, k: usize, p: usize) -> (Vec<f64>, DMatrix<f64>, f64)
where
    F: Fn(&[f64]) -> Vec<f64>,
{
    let mut basis: Vec<Vec<f64>> = Vec::with_capacity(p);
    let mut alpha = Vec::with_capacity(p);
    let mut beta: Vec<f64> = Vec::with_capacity(p);
    let mut scale = 0.0f64;
    let mut seed = 0;

    let mut q = start_vector(m, seed);
    let n0 = dot(&q, &q).sqrt();
    q.iter_mut().for_each(|x| *x /= n0);

    while basis.len() < p {
        let mut w = apply(&q);
        let a = dot(&q, &w);
        axpy(-a, &q, &mut w);
        if let (Some(prev), Some(&b)) = (basis.last(), beta.last()) {
            axpy(-b, prev, &mut w);
        }
        basis.push(q);
        alpha.push(a);
        orthogonalize(&mut w, &basis);
        let b = dot(&w, &w).sqrt();
        scale = scale.max(a.abs()).max(b);
        if basis.len() == p {
            break;
        }
        if b > 1e-12 * scale.max(f64::MIN_POSITIVE) {
            beta.push(b);
            q = w.into_iter().map(|x| x / b).collect();
            continue;
        }
        // Invariant subspace found: continue with a fresh direction, which
        // decouples the tridiagonal matrix.
        let mut fresh = None;
        while fresh.is_none() && seed < 8 {
            seed += 1;
            let mut v = start_vector(m, seed);
            orthogonalize(&mut v, &basis);
            let nv = dot(&v, &v).sqrt();
            if nv > 1e-8 {
                fresh = Some(v.into_iter().map(|x| x / nv).collect());
            }
        }
        match fresh {
            Some(v) => {
                beta.push(0.0);
                q = v;
            }
            None => break,
        }
    }

    let s = basis.len();
    let mut t = DMatrix::<f64>::zeros(s, s);
    for i in 0..s {
        t[(i, i)] = alpha[i];
        if i + 1 < s {
            t[(i, i + 1)] = beta[i];
            t[(i + 1, i)] = beta[i];
        }
    }
    let eig = SymmetricEigen::new(t);
    let mut order: Vec<usize> = (0..s).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].abs().total_cmp(&eig.eigenvalues[a].abs()));
    order.truncate(k.min(s));

    let mut values = Vec::with_capacity(order.len());
    let mut vectors = DMatrix::<f64>::zeros(m, order.len());
    let mut worst = 0.0f64;
    for (col, &i) in order.iter().enumerate() {
        let theta = eig.eigenvalues[i];
        let y: DVector<f64> = eig.eigenvectors.column(i).into_owned();
        let mut x = vec![0.0; m];
        for (j, qj) in basis.iter().enumerate() {
            axpy(y[j], qj, &mut x);
        }
        let nx = dot(&x, &x).sqrt();
        x.iter_mut().for_each(|v| *v /= nx);
        let ax = apply(&x);
        let r: f64 = ax
            .iter()
            .zip(&x)
            .map(|(a, b)| (a - theta * b).powi(2))
            .sum::<f64>()
            .sqrt();
        worst = worst.max(r / theta.abs().max(1.0));
        values.push(theta);
        vectors.set_column(col, &DVector::from_vec(x));
    }
    if order.len() < k {
        worst = f64::INFINITY;
    }
    (values, vectors, worst)
}
