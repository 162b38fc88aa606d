use std::path::Path;

use nalgebra::{DMatrix, SymmetricEigen};
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use statrs::distribution::{ContinuousCDF, Normal};
use svf_core::stats::{
    fit_logistic, fit_pca, parse_pca, pca_to_string, project_scores, standardize,
    stepwise_backward, varimax_rotate,
};
use svf_core::FeatureMatrix;

fn gaussian(rng: &mut ChaCha8Rng) -> f64 {
    // Box-Muller
    let u1: f64 = rng.gen_range(f64::EPSILON..1.0);
    let u2: f64 = rng.gen();
    (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
}

fn random_matrix(rng: &mut ChaCha8Rng, n: usize, p: usize) -> FeatureMatrix {
    let rows: Vec<Vec<f64>> = (0..n)
        .map(|_| (0..p).map(|_| gaussian(rng)).collect())
        .collect();
    from_rows(&rows)
}

fn from_rows(rows: &[Vec<f64>]) -> FeatureMatrix {
    let p = rows.first().map_or(0, Vec::len);
    FeatureMatrix::from_rows(
        (0..rows.len()).map(|i| format!("r{i}")).collect(),
        (0..p).map(|j| format!("x{j}")).collect(),
        rows,
    )
    .unwrap()
}

fn max_abs(m: &DMatrix<f64>) -> f64 {
    m.iter().fold(0.0, |a, x| a.max(x.abs()))
}

/// Correlated columns: a few latent factors plus noise.
fn factor_matrix(rng: &mut ChaCha8Rng, n: usize, p: usize) -> FeatureMatrix {
    let rows: Vec<Vec<f64>> = (0..n)
        .map(|_| {
            let f = [gaussian(rng), gaussian(rng)];
            (0..p)
                .map(|j| f[j % 2] * (1.0 + j as f64 * 0.1) + 0.6 * gaussian(rng))
                .collect()
        })
        .collect();
    from_rows(&rows)
}

#[test]
fn pca_matches_dense_eigensolver_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..50 {
        let z = standardize(&random_matrix(&mut rng, 20, 5)).unwrap().matrix;
        let model = fit_pca(&z).unwrap();
        let corr = (z.values.transpose() * &z.values) / 19.0;
        let oracle = SymmetricEigen::new(corr);
        let mut order: Vec<usize> = (0..5).collect();
        order.sort_by(|&a, &b| oracle.eigenvalues[b].total_cmp(&oracle.eigenvalues[a]));
        assert_eq!(model.retained(), 5);
        for (j, &o) in order.iter().enumerate() {
            assert!((model.eigenvalues[j] - oracle.eigenvalues[o]).abs() < 1e-8);
            let ours = model.loadings.column(j);
            let theirs = oracle.eigenvectors.column(o);
            let same = (ours - theirs).amax();
            let flipped = (ours + theirs).amax();
            assert!(
                same.min(flipped) < 1e-8,
                "component {j}: {same} / {flipped}"
            );
        }
    }
}

#[test]
fn independent_columns_have_unit_eigenvalues() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let z = standardize(&random_matrix(&mut rng, 10_000, 6))
        .unwrap()
        .matrix;
    let model = fit_pca(&z).unwrap();
    assert!(
        model.eigenvalues.iter().all(|l| (l - 1.0).abs() < 0.1),
        "{:?}",
        model.eigenvalues
    );
}

#[test]
fn unrotated_invariants() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let z = standardize(&factor_matrix(&mut rng, 200, 6))
        .unwrap()
        .matrix;
    let model = fit_pca(&z).unwrap();
    // orthonormal loadings
    let gram = model.loadings.transpose() * &model.loadings;
    assert!(max_abs(&(gram - DMatrix::identity(6, 6))) < 1e-8);
    // trace preservation
    assert!((model.eigenvalues.iter().sum::<f64>() - 6.0).abs() < 1e-6);
    // score covariance is diag(eigenvalues)
    let s = project_scores(&z, &model).unwrap();
    let cov = (s.values.transpose() * &s.values) / 199.0;
    let diag = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(model.eigenvalues.clone()));
    assert!(max_abs(&(cov - diag)) < 1e-6);
    // reconstruction
    let back = &s.values * model.loadings.transpose();
    assert!(max_abs(&(back - &z.values)) < 1e-6);
    // sign convention and labels
    for j in 0..model.retained() {
        let col = model.loadings.column(j);
        let imax = col.iamax();
        assert!(col[imax] > 0.0);
        assert_eq!(model.component_labels[j], z.column_names[imax]);
    }
}

#[test]
fn varimax_invariants() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let z = standardize(&factor_matrix(&mut rng, 300, 8))
        .unwrap()
        .matrix;
    let unrotated = fit_pca(&z).unwrap();
    for normalize in [true, false] {
        let rotated = varimax_rotate(&unrotated, normalize).unwrap();
        assert!(rotated.rotated);
        assert_eq!(rotated.component_names[0], "RC1");
        let before = unrotated.communalities();
        let after = rotated.communalities();
        for (a, b) in before.iter().zip(&after) {
            assert!((a - b).abs() < 1e-8);
        }
        let total_before: f64 = unrotated.explained_variance().iter().sum();
        let total_after: f64 = rotated.explained_variance().iter().sum();
        assert!((total_before - total_after).abs() < 1e-8);
        let k = rotated.retained();
        let rtr = rotated.rotation.transpose() * &rotated.rotation;
        assert!(max_abs(&(rtr - DMatrix::identity(k, k))) < 1e-8);
        assert!(
            rotated
                .varimax_trace
                .windows(2)
                .all(|w| w[1] >= w[0] - 1e-12),
            "{:?}",
            rotated.varimax_trace
        );
        // regression-method scores are uncorrelated with unit variance
        let s = project_scores(&z, &rotated).unwrap();
        let cov = (s.values.transpose() * &s.values) / 299.0;
        assert!(max_abs(&(cov - DMatrix::identity(k, k))) < 1e-6);
        let back = &s.values * rotated.loadings.transpose();
        assert!(max_abs(&(back - &z.values)) < 1e-6);
        // explained variance is in descending order
        let ev = rotated.explained_variance();
        assert!(ev.windows(2).all(|w| w[0] >= w[1] - 1e-12));
    }
}

#[test]
fn textbook_two_factor_rotation_converges_monotonically() {
    // two clean clusters of variables
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    let rows: Vec<Vec<f64>> = (0..500)
        .map(|_| {
            let (a, b) = (gaussian(&mut rng), gaussian(&mut rng));
            vec![
                a + 0.3 * gaussian(&mut rng),
                a + 0.3 * gaussian(&mut rng),
                a + 0.3 * gaussian(&mut rng),
                b + 0.3 * gaussian(&mut rng),
                b + 0.3 * gaussian(&mut rng),
                b + 0.3 * gaussian(&mut rng),
            ]
        })
        .collect();
    let z = standardize(&from_rows(&rows)).unwrap().matrix;
    let mut model = fit_pca(&z).unwrap();
    // keep the two factor components only
    model.eigenvalues.truncate(2);
    model.loadings = model.loadings.columns(0, 2).into_owned();
    model.score_weights = model.score_weights.columns(0, 2).into_owned();
    model.rotation = DMatrix::identity(2, 2);
    model.component_names.truncate(2);
    model.component_labels.truncate(2);
    let rotated = varimax_rotate(&model, true).unwrap();
    assert!(rotated.varimax_trace.len() >= 2);
    assert!(rotated
        .varimax_trace
        .windows(2)
        .all(|w| w[1] >= w[0] - 1e-12));
    // simple structure: each variable loads on one component
    for i in 0..6 {
        let (a, b) = (
            rotated.loadings[(i, 0)].abs(),
            rotated.loadings[(i, 1)].abs(),
        );
        assert!(a.max(b) > 0.85 && a.min(b) < 0.2, "row {i}: {a} {b}");
    }
}

#[test]
fn pca_file_round_trip() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let z = standardize(&factor_matrix(&mut rng, 50, 4)).unwrap().matrix;
    let model = varimax_rotate(&fit_pca(&z).unwrap(), true).unwrap();
    let text = pca_to_string(&model);
    let back = parse_pca(&text, Path::new("pca.tsv")).unwrap();
    assert_eq!(back, model);
}

#[test]
fn unstandardized_input_uses_model_parameters() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let raw = factor_matrix(&mut rng, 40, 4);
    let z = standardize(&raw).unwrap().matrix;
    let model = fit_pca(&z).unwrap();
    let a = project_scores(&raw, &model).unwrap();
    let b = project_scores(&z, &model).unwrap();
    assert!(max_abs(&(a.values - b.values)) < 1e-12);
}

fn log_lik(x: &[f64], y: &[u8], b0: f64, b1: f64) -> f64 {
    x.iter()
        .zip(y)
        .map(|(xi, yi)| {
            let eta = b0 + b1 * xi;
            let p = 1.0 / (1.0 + (-eta).exp());
            if *yi == 1 {
                p.ln()
            } else {
                (1.0 - p).ln()
            }
        })
        .sum()
}

/// Zooming grid search over (β0, β1); the log-likelihood is concave.
fn grid_oracle(x: &[f64], y: &[u8]) -> (f64, f64) {
    let (mut c0, mut c1, mut half) = (0.0, 0.0, 8.0);
    while half > 1e-8 {
        let mut best = (f64::NEG_INFINITY, c0, c1);
        for i in -40..=40 {
            for j in -40..=40 {
                let b0 = c0 + half * i as f64 / 40.0;
                let b1 = c1 + half * j as f64 / 40.0;
                let ll = log_lik(x, y, b0, b1);
                if ll > best.0 {
                    best = (ll, b0, b1);
                }
            }
        }
        c0 = best.1;
        c1 = best.2;
        half /= 8.0;
    }
    (c0, c1)
}

#[test]
fn six_point_fit_matches_grid_search() {
    let x = [-2.0, -1.0, 0.0, 0.5, 1.0, 2.0];
    let y = [0u8, 1, 0, 1, 0, 1];
    let m = from_rows(&x.iter().map(|v| vec![*v]).collect::<Vec<_>>());
    let fit = fit_logistic(&m, &y).unwrap();
    assert!(fit.converged);
    assert!(fit.gradient_norm < 1e-8);
    let (b0, b1) = grid_oracle(&x, &y);
    assert!(
        (fit.intercept.estimate - b0).abs() < 1e-4,
        "{} vs {b0}",
        fit.intercept.estimate
    );
    assert!(
        (fit.coefficients[0].estimate - b1).abs() < 1e-4,
        "{} vs {b1}",
        fit.coefficients[0].estimate
    );
}

#[test]
fn intercept_only_is_log_odds() {
    let y: Vec<u8> = (0..486).map(|i| u8::from(i < 203)).collect();
    let empty = FeatureMatrix::new(
        (0..486).map(|i| i.to_string()).collect(),
        vec![],
        DMatrix::zeros(486, 0),
    )
    .unwrap();
    let fit = fit_logistic(&empty, &y).unwrap();
    assert!(fit.converged);
    assert!((fit.intercept.estimate - (203.0f64 / 283.0).ln()).abs() < 1e-10);
    assert!((fit.intercept.estimate + 0.332).abs() < 1e-3);
}

/// A predictor with the same standard-normal stratified design in both
/// classes: every class gets one draw from each of its m quantile strata.
fn balanced_noise(rng: &mut ChaCha8Rng, y: &[u8]) -> Vec<f64> {
    let normal = Normal::new(0.0, 1.0).unwrap();
    let mut out = vec![0.0; y.len()];
    for class in [0u8, 1] {
        let mut idx: Vec<usize> = (0..y.len()).filter(|&i| y[i] == class).collect();
        idx.shuffle(rng);
        let m = idx.len() as f64;
        for (s, &i) in idx.iter().enumerate() {
            let u: f64 = rng.gen_range(0.001..0.999);
            out[i] = normal.inverse_cdf((s as f64 + u) / m);
        }
    }
    out
}

#[test]
fn useless_predictor_is_not_significant_on_average() {
    let mut total = 0.0;
    for seed in 0..100 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let y: Vec<u8> = (0..200).map(|i| u8::from(i % 2 == 0)).collect();
        let x = balanced_noise(&mut rng, &y);
        let m = from_rows(&x.iter().map(|v| vec![*v]).collect::<Vec<_>>());
        let fit = fit_logistic(&m, &y).unwrap();
        assert!(fit.converged);
        total += fit.coefficients[0].p_value;
    }
    assert!(total / 100.0 > 0.5, "mean p = {}", total / 100.0);
}

#[test]
fn noise_column_is_removed_first() {
    let mut removed_first = 0;
    for seed in 0..100 {
        let mut rng = ChaCha8Rng::seed_from_u64(1000 + seed);
        let strong: Vec<f64> = (0..200).map(|_| gaussian(&mut rng)).collect();
        let y: Vec<u8> = strong
            .iter()
            .map(|s| u8::from(rng.gen::<f64>() < 1.0 / (1.0 + (-1.5 * s).exp())))
            .collect();
        let noise = balanced_noise(&mut rng, &y);
        let rows: Vec<Vec<f64>> = strong
            .iter()
            .zip(&noise)
            .map(|(a, b)| vec![*a, *b])
            .collect();
        let m = from_rows(&rows);
        let result = stepwise_backward(&m, &y, 0.05).unwrap();
        if result.removals.first().map(|r| r.name.as_str()) == Some("x1") {
            removed_first += 1;
        }
        assert!(result.survivors.contains(&"x0".to_string()));
    }
    assert!(removed_first >= 95, "{removed_first}");
}

#[test]
fn all_significant_means_no_removals() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let rows: Vec<Vec<f64>> = (0..400)
        .map(|_| vec![gaussian(&mut rng), gaussian(&mut rng)])
        .collect();
    let y: Vec<u8> = rows
        .iter()
        .map(|r| u8::from(rng.gen::<f64>() < 1.0 / (1.0 + (-(1.2 * r[0] - 1.0 * r[1])).exp())))
        .collect();
    let result = stepwise_backward(&from_rows(&rows), &y, 0.05).unwrap();
    assert!(result.removals.is_empty());
    assert_eq!(result.survivors, vec!["x0".to_string(), "x1".to_string()]);
}

fn regression_case() -> impl Strategy<Value = (Vec<Vec<f64>>, Vec<u8>)> {
    (30usize..120, 1usize..5, any::<u64>()).prop_map(|(n, p, seed)| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let rows: Vec<Vec<f64>> = (0..n)
            .map(|_| (0..p).map(|_| gaussian(&mut rng)).collect())
            .collect();
        let mut y: Vec<u8> = rows
            .iter()
            .map(|r| u8::from(rng.gen::<f64>() < 1.0 / (1.0 + (-0.7 * r[0]).exp())))
            .collect();
        y[0] = 0;
        y[1] = 1;
        (rows, y)
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn wald_identities((rows, y) in regression_case()) {
        let fit = fit_logistic(&from_rows(&rows), &y).unwrap();
        for c in std::iter::once(&fit.intercept).chain(&fit.coefficients) {
            prop_assert!((c.z - c.estimate / c.std_error).abs() <= 1e-10 * (1.0 + c.z.abs()));
            prop_assert!((0.0..=1.0).contains(&c.p_value));
            prop_assert_eq!(c.p_value, svf_core::stats::normal_two_sided_p(-c.z));
            if fit.converged {
                prop_assert!(c.std_error > 0.0);
            }
        }
        if fit.converged {
            prop_assert!(fit.gradient_norm < 1e-8);
        }
    }

    #[test]
    fn stepwise_loop_invariants((rows, y) in regression_case()) {
        let m = from_rows(&rows);
        if let Ok(result) = stepwise_backward(&m, &y, 0.05) {
            for r in &result.removals {
                prop_assert!(r.p_value > 0.05);
            }
            if result.survivors.len() > 1 {
                for c in &result.fit.coefficients {
                    prop_assert!(c.p_value <= 0.05);
                }
            }
            let again = stepwise_backward(&m, &y, 0.05).unwrap();
            prop_assert_eq!(again, result);
        }
    }
}
