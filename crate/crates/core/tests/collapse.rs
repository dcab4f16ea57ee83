mod common;

use common::*;
use nalgebra::DMatrix;
use proptest::prelude::*;
use qsem::collapse::{
    association_delta, collapse_with_operator, collapse_with_projector, context_projector, context_space,
    context_vector, piece_of_context, prototype_state, Projector,
};
use qsem::space::{build_hal, global_space, symmetrize, word_space, word_vector, Corpus, StateVector};
use qsem::spectral::{eigendecompose, eigendecompose_matrix, DensityMatrix, EigenOptions};
use qsem::Error;

fn sv(x: &[f64]) -> StateVector {
    StateVector::from_components(x.to_vec()).unwrap()
}

fn close(a: &[f64], b: &[f64], tol: f64) -> bool {
    a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).abs() <= tol)
}

/// Power iteration on a shifted matrix, independent of the library solver.
fn dominant_eigenvector(a: &[Vec<f64>]) -> Vec<f64> {
    let n = a.len();
    let shift: f64 = a
        .iter()
        .map(|r| r.iter().map(|x| x.abs()).sum::<f64>())
        .fold(0.0, f64::max);
    let mut x = vec![1.0; n];
    for _ in 0..20_000 {
        let mut y: Vec<f64> = (0..n)
            .map(|i| (0..n).map(|j| a[i][j] * x[j]).sum::<f64>() + shift * x[i])
            .collect();
        let norm = y.iter().map(|v| v * v).sum::<f64>().sqrt();
        y.iter_mut().for_each(|v| *v /= norm);
        x = y;
    }
    x
}

#[test]
fn operator_examples() {
    let r = collapse_with_operator(&sv(&[3.0, 4.0]), &DMatrix::<f64>::identity(2, 2)).unwrap();
    assert!(close(r.state.components(), &[0.6, 0.8], 1e-15));
    assert!((r.normalizer - 25.0).abs() < 1e-12);

    let p = DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, 0.0]);
    let r = collapse_with_operator(&sv(&[3.0, 4.0]), &p).unwrap();
    assert!(close(r.state.components(), &[1.0, 0.0], 1e-15));
    assert!((r.normalizer - 9.0).abs() < 1e-12);
}

#[test]
fn degenerate_operator_collapse_is_an_error() {
    let swap = DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 1.0, 0.0]);
    match collapse_with_operator(&sv(&[1.0, -1.0]), &swap) {
        Err(Error::DegenerateCollapse { normalizer }) => assert!(normalizer.is_finite()),
        other => panic!("{other:?}"),
    }
    assert!(matches!(
        collapse_with_operator(&sv(&[0.0, 0.0]), &swap),
        Err(Error::ZeroVector)
    ));
    assert!(matches!(
        collapse_with_operator(&sv(&[1.0, 0.0, 0.0]), &swap),
        Err(Error::DimensionMismatch { .. })
    ));
}

#[test]
fn projector_examples() {
    let p = Projector::from_orthonormal(&[sv(&[1.0, 0.0])]).unwrap();
    let r = collapse_with_projector(&sv(&[3.0, 4.0]), &p).unwrap();
    assert!(close(r.state.components(), &[1.0, 0.0], 1e-15));

    let inside = collapse_with_projector(&sv(&[5.0, 0.0]), &p).unwrap();
    assert!(close(inside.state.components(), &[1.0, 0.0], 1e-15));
}

#[test]
fn state_outside_context_subspace_is_rejected() {
    let s3 = 3f64.sqrt();
    let s2 = 2f64.sqrt();
    let s6 = 6f64.sqrt();
    let triple = [
        [1.0 / s3, 1.0 / s3, 1.0 / s3],
        [1.0 / s2, 0.0, -1.0 / s2],
        [1.0 / s6, -2.0 / s6, 1.0 / s6],
    ];
    let mut a = DMatrix::<f64>::zeros(3, 3);
    for (d, e) in [3.0, 2.0, 1.0].iter().zip(&triple) {
        let v = nalgebra::DVector::from_column_slice(e);
        a += *d * &v * v.transpose();
    }
    let es = eigendecompose_matrix(&a).unwrap();
    let p = context_projector(&es, 2).unwrap();
    assert!(matches!(
        collapse_with_projector(&sv(&triple[2]), &p),
        Err(Error::OrthogonalContext { .. })
    ));
}

#[test]
fn piece_of_context_matches_dominant_direction() {
    let space = symmetrize(&build_hal(&Corpus::new(&docs(&[EXAMPLE_SENTENCE])), 5).unwrap());
    let es = eigendecompose(&space, &EigenOptions::default()).unwrap();
    let p = piece_of_context(&es, 1).unwrap();
    let n = space.dim();
    let dense: Vec<Vec<f64>> = (0..n)
        .map(|i| (0..n).map(|j| space.get(i, j) as f64).collect())
        .collect();
    let e = dominant_eigenvector(&dense);
    let mut rng = rng(21);
    for _ in 0..5 {
        let x: Vec<f64> = (0..n).map(|_| rand::Rng::random_range(&mut rng, -1.0..1.0)).collect();
        let px = p.to_dense() * nalgebra::DVector::from_vec(x);
        let along: f64 = px.iter().zip(&e).map(|(a, b)| a * b).sum();
        let residual: f64 = px
            .iter()
            .zip(&e)
            .map(|(a, b)| (a - along * b).powi(2))
            .sum::<f64>()
            .sqrt();
        assert!(residual < 1e-8, "residual {residual}");
    }
    let d = p.to_dense();
    assert!(frobenius(&(&d * &d - &d)) < 1e-10);
    assert!(matches!(piece_of_context(&es, 0), Err(Error::Parameter(_))));
    assert!(matches!(piece_of_context(&es, es.len() + 1), Err(Error::Parameter(_))));
}

#[test]
fn projector_span_drops_dependent_vectors() {
    let p = Projector::span(&[sv(&[1.0, 1.0, 0.0]), sv(&[2.0, 2.0, 0.0]), sv(&[0.0, 0.0, 3.0])]).unwrap();
    assert_eq!(p.rank(), 2);
    let d = p.to_dense();
    assert!(frobenius(&(&d * &d - &d)) < 1e-12);
    assert!(frobenius(&(&d - d.transpose())) < 1e-15);
    assert!(Projector::from_orthonormal(&[sv(&[1.0, 1.0])]).is_err());
}

#[test]
fn density_acts_as_operator() {
    let rho = DensityMatrix::from_matrix(&DMatrix::from_row_slice(2, 2, &[2.0, 0.0, 0.0, 3.0])).unwrap();
    let r = collapse_with_operator(&sv(&[1.0, 1.0]), &rho).unwrap();
    let n = (0.4f64.powi(2) + 0.6f64.powi(2)).sqrt();
    assert!(close(
        r.state.components(),
        &[0.4 / n * r.state.norm(), 0.6 / n * r.state.norm()],
        1e-12
    ));
}

#[test]
fn context_vectors_on_toy_corpus() {
    let corpus = Corpus::new(&docs(&[
        "reagan said iran arms deal",
        "iran gulf war oil",
        "reagan veto bill",
    ]));
    let v = context_vector(&corpus, "reagan", "iran", 3, 3).unwrap();
    let s_iran = word_space(&corpus, "iran", 3, 3).unwrap().space;
    assert_eq!(v, word_vector(&s_iran, "reagan").unwrap());
    let selfctx = context_vector(&corpus, "iran", "iran", 3, 3).unwrap();
    assert_eq!(selfctx, word_vector(&s_iran, "iran").unwrap());
    let outside = context_vector(&corpus, "veto", "iran", 3, 3).unwrap();
    assert!(outside.is_zero());
    assert!(matches!(
        context_vector(&corpus, "reagan", "contra", 3, 3),
        Err(Error::UnknownWord(w)) if w == "contra"
    ));
    let both = context_space(&corpus, &["iran", "veto"], 3, 3).unwrap();
    let sum = s_iran.add(&word_space(&corpus, "veto", 3, 3).unwrap().space).unwrap();
    assert_eq!(both.matrix(), sum.matrix());
}

#[test]
fn prototype_divides_by_frequency_then_normalizes() {
    let documents = docs(&["a b a c", "b a"]);
    let corpus = Corpus::new(&documents);
    let g = global_space(&corpus, 2, 2).unwrap();
    let p = prototype_state(&g, &corpus, "a").unwrap();
    let col = word_vector(&g, "a").unwrap();
    let norm = col.norm();
    assert!(close(
        p.components(),
        &col.components().iter().map(|x| x / norm).collect::<Vec<_>>(),
        1e-15
    ));
    assert!(matches!(prototype_state(&g, &corpus, "z"), Err(Error::UnknownWord(_))));
}

#[test]
fn delta_examples() {
    let vocab = std::sync::Arc::new(qsem::space::Vocabulary::from_words(["first", "second"]).unwrap());
    let before = StateVector::over(vocab.clone(), vec![1.0, 0.0]).unwrap();
    let after = StateVector::over(vocab, vec![0.0, 1.0]).unwrap();
    let d = association_delta(&before, &after, 1).unwrap();
    assert_eq!(d.gains.len(), 1);
    assert_eq!(
        (d.gains[0].word.as_str(), d.gains[0].before, d.gains[0].after),
        ("second", 0.0, 1.0)
    );
    assert_eq!(
        (d.losses[0].word.as_str(), d.losses[0].before, d.losses[0].after),
        ("first", 1.0, 0.0)
    );

    let same = association_delta(&before, &before, 5).unwrap();
    assert!(same.gains.is_empty() && same.losses.is_empty());
    assert!(matches!(
        association_delta(&before, &before.scaled(0.0).unwrap(), 1),
        Err(Error::ZeroVector)
    ));
}

fn vec_strategy(n: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-5.0f64..5.0, n)
}

proptest! {
    #[test]
    fn operator_direction_ignores_positive_scale(x in vec_strategy(4), c in 0.01f64..100.0, seed in any::<u64>()) {
        let mut r = rng(seed);
        let m = to_dmatrix(&random_symmetric(&mut r, 4));
        let v = sv(&x);
        let scaled = v.scaled(c).unwrap();
        match (collapse_with_operator(&v, &m), collapse_with_operator(&scaled, &m)) {
            (Ok(a), Ok(b)) => {
                let ua = a.state.normalized().unwrap();
                let ub = b.state.normalized().unwrap();
                prop_assert!(close(ua.components(), ub.components(), 1e-9));
                prop_assert!((b.normalizer - c * c * a.normalizer).abs() <= 1e-9 * b.normalizer.abs().max(1.0));
            }
            (Err(_), _) | (_, Err(_)) => {}
        }
    }

    #[test]
    fn projector_collapse_is_unit_and_idempotent(x in vec_strategy(5), seed in any::<u64>(), k in 1usize..5) {
        let mut r = rng(seed);
        let es = eigendecompose_matrix(&to_dmatrix(&random_symmetric(&mut r, 5))).unwrap();
        let p = context_projector(&es, k).unwrap();
        let v = sv(&x);
        match collapse_with_projector(&v, &p) {
            Ok(once) => {
                prop_assert!((once.state.norm() - 1.0).abs() <= 1e-12);
                let twice = collapse_with_projector(&once.state, &p).unwrap();
                prop_assert!(close(once.state.components(), twice.state.components(), 1e-12));
            }
            Err(e) => {
                let expected = matches!(e, Error::OrthogonalContext { .. } | Error::ZeroVector);
                prop_assert!(expected, "unexpected error {:?}", e);
            }
        }
    }

    #[test]
    fn collapse_never_yields_non_finite(x in vec_strategy(3), m in prop::collection::vec(-1e3f64..1e3, 9)) {
        let a = DMatrix::from_fn(3, 3, |i, j| m[i.min(j) * 3 + i.max(j)]);
        if let Ok(r) = collapse_with_operator(&sv(&x), &a) {
            prop_assert!(r.state.components().iter().all(|c| c.is_finite()));
            prop_assert!(r.normalizer > 0.0);
        }
    }
}
