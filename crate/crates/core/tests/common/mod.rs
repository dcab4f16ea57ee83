//! Independent reference implementations used as test oracles.
#![allow(dead_code, clippy::needless_range_loop)]

use std::collections::{BTreeMap, HashMap};

use qsem::ingest::Document;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

pub const EXAMPLE_SENTENCE: &str = "President Reagan ignorant of the arms scandal";

/// Word-keyed weights, so comparisons never depend on vocabulary indexing.
pub type WordMatrix = BTreeMap<(String, String), u64>;

pub fn docs(texts: &[&str]) -> Vec<Document> {
    texts
        .iter()
        .enumerate()
        .map(|(i, t)| Document::new(format!("d{i}"), t.split_whitespace().map(str::to_lowercase).collect()))
        .collect()
}

/// Every ordered pair within distance `l`, weighted `l + 1 - distance`,
/// keyed (later word, earlier word).
pub fn naive_hal(tokens: &[String], l: usize) -> WordMatrix {
    let mut m = WordMatrix::new();
    for i in 0..tokens.len() {
        for j in 0..tokens.len() {
            if j < i && i - j <= l {
                *m.entry((tokens[i].clone(), tokens[j].clone())).or_default() += (l + 1 - (i - j)) as u64;
            }
        }
    }
    m
}

pub fn naive_symmetric(h: &WordMatrix) -> WordMatrix {
    let mut s = WordMatrix::new();
    for ((a, b), &w) in h {
        *s.entry((a.clone(), b.clone())).or_default() += w;
        *s.entry((b.clone(), a.clone())).or_default() += w;
    }
    s
}

pub fn accumulate(into: &mut WordMatrix, from: &WordMatrix) {
    for (k, &w) in from {
        *into.entry(k.clone()).or_default() += w;
    }
}

/// Enumerates every occurrence window of `word` explicitly.
pub fn naive_word_space(documents: &[Document], word: &str, radius: usize, l: usize) -> WordMatrix {
    let mut total = WordMatrix::new();
    for d in documents {
        let t = &d.tokens;
        for p in 0..t.len() {
            if t[p] != word {
                continue;
            }
            let lo = p.saturating_sub(radius);
            let hi = (p + radius).min(t.len() - 1);
            accumulate(&mut total, &naive_symmetric(&naive_hal(&t[lo..=hi], l)));
        }
    }
    total
}

pub fn naive_global_space(documents: &[Document], radius: usize, l: usize) -> WordMatrix {
    let mut words: Vec<&String> = documents.iter().flat_map(|d| d.tokens.iter()).collect();
    words.sort();
    words.dedup();
    let mut total = WordMatrix::new();
    for w in words {
        accumulate(&mut total, &naive_word_space(documents, w, radius, l));
    }
    total
}

/// Nonzero entries of a library matrix, keyed by words.
pub fn word_keyed(vocab: &qsem::space::Vocabulary, m: &qsem::space::SparseMatrix) -> WordMatrix {
    m.iter()
        .map(|(r, c, w)| ((vocab.word(r).to_string(), vocab.word(c).to_string()), w))
        .collect()
}

pub fn random_document(rng: &mut StdRng, max_len: usize, alphabet: usize) -> Vec<String> {
    let len = rng.random_range(0..=max_len);
    (0..len)
        .map(|_| format!("w{}", rng.random_range(0..alphabet)))
        .collect()
}

pub fn rng(seed: u64) -> StdRng {
    StdRng::seed_from_u64(seed)
}

/// Random symmetric matrix with entries in [-1, 1], row-major.
pub fn random_symmetric(rng: &mut StdRng, n: usize) -> Vec<Vec<f64>> {
    let mut a = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in 0..=i {
            let x = rng.random_range(-1.0..=1.0);
            a[i][j] = x;
            a[j][i] = x;
        }
    }
    a
}

/// Cyclic Jacobi rotations; returns eigenvalues in descending order.
pub fn jacobi_eigenvalues(a: &[Vec<f64>]) -> Vec<f64> {
    let n = a.len();
    let mut a: Vec<Vec<f64>> = a.to_vec();
    for _sweep in 0..100 {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[i][j] * a[i][j])
            .sum();
        let scale: f64 = a.iter().flatten().map(|x| x * x).sum::<f64>().max(f64::MIN_POSITIVE);
        if off <= 1e-30 * scale {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                if a[p][q] == 0.0 {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a[k][p];
                    let akq = a[k][q];
                    a[k][p] = c * akp - s * akq;
                    a[k][q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[p][k];
                    let aqk = a[q][k];
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
            }
        }
    }
    let mut d: Vec<f64> = (0..n).map(|i| a[i][i]).collect();
    d.sort_by(|x, y| y.total_cmp(x));
    d
}

pub fn to_dmatrix(a: &[Vec<f64>]) -> nalgebra::DMatrix<f64> {
    let n = a.len();
    nalgebra::DMatrix::from_fn(n, n, |i, j| a[i][j])
}

pub fn frobenius(m: &nalgebra::DMatrix<f64>) -> f64 {
    m.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Tokens with their counts, for frequency checks.
pub fn counts(documents: &[Document]) -> HashMap<String, u64> {
    let mut c = HashMap::new();
    for d in documents {
        for t in &d.tokens {
            *c.entry(t.clone()).or_default() += 1;
        }
    }
    c
}
