use std::collections::HashMap;
use std::path::Path;

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use svf_core::classify::{
    compare_methods, cross_validate_mnb, cross_validate_svm, evaluate, make_folds, paired_ttest,
    paired_ttest_values, parse_predictions, predictions_to_string, train_mnb_tokens, train_svm,
    EvalReport, FeatureSet, Prediction, SplitPlan, SvmParams,
};
use svf_core::corpus::{Article, Label};
use svf_core::stats::{column_mean_sd, AnalysisOptions};
use svf_core::FeatureMatrix;

fn articles(fake: usize, satire: usize) -> Vec<Article> {
    (0..fake + satire)
        .map(|i| Article {
            id: format!("a{i:03}"),
            label: if i < fake { Label::Fake } else { Label::Satire },
            headline: String::new(),
            body: "x".into(),
            source: None,
        })
        .collect()
}

fn class_counts(plan: &SplitPlan, arts: &[Article]) -> Vec<[usize; 2]> {
    let mut counts = vec![[0usize; 2]; plan.k];
    for a in arts {
        counts[plan.fold_of(&a.id).unwrap()][a.label.index()] += 1;
    }
    counts
}

#[test]
fn folds_for_published_class_sizes() {
    let arts = articles(283, 203);
    let plan = make_folds(&arts, 10, 42).unwrap();
    for c in class_counts(&plan, &arts) {
        assert!((28..=29).contains(&c[0]), "{c:?}");
        assert!((20..=21).contains(&c[1]), "{c:?}");
    }
    assert_eq!(plan.fold_sizes().iter().sum::<usize>(), 486);
    assert_eq!(make_folds(&arts, 10, 42).unwrap(), plan);
    assert_ne!(make_folds(&arts, 10, 43).unwrap(), plan);
}

proptest! {
    #[test]
    fn stratification_bound(fake in 10usize..120, satire in 10usize..120, k in 2usize..11, seed in any::<u64>()) {
        let arts = articles(fake, satire);
        let plan = make_folds(&arts, k, seed).unwrap();
        prop_assert_eq!(plan.len(), fake + satire);
        for c in class_counts(&plan, &arts) {
            prop_assert!((c[0] as f64 - fake as f64 / k as f64).abs() < 1.0);
            prop_assert!((c[1] as f64 - satire as f64 / k as f64).abs() < 1.0);
        }
    }
}

fn toks(s: &str) -> Vec<String> {
    s.split_whitespace().map(String::from).collect()
}

#[test]
fn mnb_four_document_hand_posteriors() {
    let docs = vec![
        (Label::Fake, toks("a a b")),
        (Label::Fake, toks("a c")),
        (Label::Satire, toks("b b")),
        (Label::Satire, toks("c b d")),
    ];
    let m = train_mnb_tokens(&docs).unwrap();
    // Fake counts a3 b1 c1 d0 (5 tokens), Satire a0 b3 c1 d1 (5 tokens), V = 4
    let fake = [4.0 / 9.0, 2.0 / 9.0, 2.0 / 9.0, 1.0 / 9.0f64];
    let satire = [1.0 / 9.0, 4.0 / 9.0, 2.0 / 9.0, 2.0 / 9.0f64];
    for (j, w) in ["a", "b", "c", "d"].iter().enumerate() {
        let idx = m.vocabulary[*w];
        assert!((m.log_likelihoods[0][idx] - fake[j].ln()).abs() < 1e-12);
        assert!((m.log_likelihoods[1][idx] - satire[j].ln()).abs() < 1e-12);
    }
    for class in 0..2 {
        let total: f64 = m.log_likelihoods[class].iter().map(|l| l.exp()).sum();
        assert!((total - 1.0).abs() < 1e-9);
    }
    // "a b e": Fake ∝ 1/2·4/9·2/9 = 8/162, Satire ∝ 1/2·1/9·4/9 = 4/162
    let lp = m.log_posteriors(&toks("a b e"));
    assert!((lp[0] - (2.0f64 / 3.0).ln()).abs() < 1e-12);
    assert!((lp[1] - (1.0f64 / 3.0).ln()).abs() < 1e-12);
    assert!((lp[0].exp() + lp[1].exp() - 1.0).abs() < 1e-12);
    let (label, score) = m.predict_tokens(&toks("a b e"));
    assert_eq!(label, Label::Fake);
    assert!((score - 1.0 / 3.0).abs() < 1e-12);
}

#[test]
fn mnb_unseen_words_fall_back_to_prior() {
    let docs = vec![
        (Label::Fake, toks("a")),
        (Label::Fake, toks("b")),
        (Label::Satire, toks("c c c c")),
    ];
    let m = train_mnb_tokens(&docs).unwrap();
    let (label, score) = m.predict_tokens(&toks("zzz yyy"));
    assert_eq!(label, Label::Fake);
    assert!((score - 1.0 / 3.0).abs() < 1e-12);
}

fn matrix(rows: &[Vec<f64>]) -> FeatureMatrix {
    FeatureMatrix::from_rows(
        (0..rows.len()).map(|i| format!("r{i}")).collect(),
        (0..rows[0].len()).map(|j| format!("f{j}")).collect(),
        rows,
    )
    .unwrap()
}

fn separable() -> (FeatureMatrix, Vec<Label>) {
    let rows = vec![
        vec![2.0, 1.0],
        vec![3.0, 2.5],
        vec![2.5, -0.5],
        vec![4.0, 0.0],
        vec![-1.0, 1.0],
        vec![-2.0, 0.5],
        vec![-1.5, -1.0],
        vec![-3.0, 2.0],
    ];
    let y = [Label::Satire; 4]
        .into_iter()
        .chain([Label::Fake; 4])
        .collect();
    (matrix(&rows), y)
}

#[test]
fn svm_separates_toy_set_with_monotone_objective() {
    let (x, y) = separable();
    let model = train_svm(&x, &y, &SvmParams::default()).unwrap();
    let preds = model.predict_matrix(&x).unwrap();
    assert!(preds.iter().zip(&y).all(|((p, _), t)| p == t));
    assert_eq!(model.weights.len(), 2);
    assert_eq!(model.objective_trace.len(), 200);
    assert!(model.objective_trace.windows(2).all(|w| w[1] <= w[0]));
}

#[test]
fn svm_label_flip_negates_weights() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let rows: Vec<Vec<f64>> = (0..60)
        .map(|_| (0..3).map(|_| rng.gen_range(-2.0..2.0)).collect())
        .collect();
    let y: Vec<Label> = rows
        .iter()
        .map(|r| {
            if r[0] + 0.5 * r[1] + rng.gen_range(-0.5..0.5) > 0.0 {
                Label::Satire
            } else {
                Label::Fake
            }
        })
        .collect();
    let flipped: Vec<Label> = y.iter().map(|l| l.other()).collect();
    let x = matrix(&rows);
    let a = train_svm(&x, &y, &SvmParams::default()).unwrap();
    let b = train_svm(&x, &flipped, &SvmParams::default()).unwrap();
    for (wa, wb) in a.weights.iter().zip(&b.weights) {
        assert!((wa + wb).abs() < 1e-3);
    }
    assert!((a.bias + b.bias).abs() < 1e-3);
}

#[test]
fn svm_rejects_non_finite_with_location() {
    let (mut x, y) = separable();
    x.values[(3, 1)] = f64::NAN;
    let err = train_svm(&x, &y, &SvmParams::default())
        .unwrap_err()
        .to_string();
    assert!(err.contains("row 3") && err.contains("f1"), "{err}");
}

fn pred(id: &str, fold: usize, t: Label, p: Label) -> Prediction {
    Prediction {
        article_id: id.into(),
        fold,
        true_label: t,
        predicted_label: p,
        score: if p == Label::Satire { 1.0 } else { -1.0 },
        method: "m".into(),
    }
}

#[test]
fn evaluate_hand_confusion_and_perfect_predictions() {
    use Label::*;
    let plan =
        SplitPlan::from_assignment(2, 0, (0..12).map(|i| (format!("x{i}"), i / 6)).collect())
            .unwrap();
    // fold 0: TP 2, FP 1, FN 2, TN 1 with Fake positive
    let mut preds = vec![
        pred("x0", 0, Fake, Fake),
        pred("x1", 0, Fake, Fake),
        pred("x2", 0, Satire, Fake),
        pred("x3", 0, Fake, Satire),
        pred("x4", 0, Fake, Satire),
        pred("x5", 0, Satire, Satire),
    ];
    preds.extend((6..12).map(|i| pred(&format!("x{i}"), 1, Fake, Fake)));
    let r = evaluate(&preds, &plan, Fake).unwrap();
    let f0 = r.folds[0].metrics;
    assert!((f0.precision - 2.0 / 3.0).abs() < 1e-12);
    assert!((f0.recall - 0.5).abs() < 1e-12);
    assert!((f0.f1 - 4.0 / 7.0).abs() < 1e-12);
    assert_eq!(r.folds[1].metrics.f1, 1.0);
    for f in &r.folds {
        let m = f.metrics;
        if m.precision + m.recall > 0.0 {
            assert!((m.f1 - 2.0 * m.precision * m.recall / (m.precision + m.recall)).abs() < 1e-12);
        }
    }
    // duplicates and gaps are fatal
    let mut dup = preds.clone();
    dup[1] = dup[0].clone();
    assert!(evaluate(&dup, &plan, Fake).is_err());
    assert!(evaluate(&preds[1..], &plan, Fake).is_err());
}

/// Closed-form Student t CDF for odd degrees of freedom.
fn t_cdf_odd(t: f64, df: usize) -> f64 {
    assert!(df % 2 == 1);
    let theta = (t / (df as f64).sqrt()).atan();
    let c = theta.cos();
    let mut series = 0.0;
    if df > 1 {
        let mut term = c;
        series = term;
        let mut k = 1;
        while 2 * k + 1 < df {
            term *= (2 * k) as f64 / (2 * k + 1) as f64 * c * c;
            series += term;
            k += 1;
        }
    }
    let a = 2.0 / std::f64::consts::PI * (theta + theta.sin() * series);
    0.5 + 0.5 * a
}

/// Composite Simpson integration of the t density from 0 to |t|.
fn t_two_sided_quadrature(t: f64, df: usize) -> f64 {
    let v = df as f64;
    let ln_c =
        libm_lgamma((v + 1.0) / 2.0) - libm_lgamma(v / 2.0) - 0.5 * (v * std::f64::consts::PI).ln();
    let pdf = |x: f64| (ln_c - (v + 1.0) / 2.0 * (1.0 + x * x / v).ln()).exp();
    let n = 200_000;
    let h = t.abs() / n as f64;
    let mut s = pdf(0.0) + pdf(t.abs());
    for i in 1..n {
        s += pdf(i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 };
    }
    1.0 - 2.0 * s * h / 3.0
}

/// log Γ for half-integers and integers by recurrence.
fn libm_lgamma(x: f64) -> f64 {
    let mut x = x;
    let mut acc = 0.0;
    while x > 1.0 {
        x -= 1.0;
        acc += x.ln();
    }
    if (x - 0.5).abs() < 1e-12 {
        acc + std::f64::consts::PI.sqrt().ln()
    } else {
        acc
    }
}

const F1_A: [f64; 10] = [0.74, 0.71, 0.78, 0.69, 0.75, 0.80, 0.72, 0.77, 0.70, 0.76];
const F1_B: [f64; 10] = [0.66, 0.70, 0.68, 0.64, 0.69, 0.71, 0.63, 0.70, 0.67, 0.65];

#[test]
fn paired_t_matches_manual_computation() {
    let d: Vec<f64> = F1_A.iter().zip(F1_B).map(|(a, b)| a - b).collect();
    let mean = d.iter().sum::<f64>() / 10.0;
    let sd = (d.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / 9.0).sqrt();
    let t = mean / (sd / 10f64.sqrt());
    let p_closed = 2.0 * (1.0 - t_cdf_odd(t.abs(), 9));
    let p_quad = t_two_sided_quadrature(t, 9);
    assert!((p_closed - p_quad).abs() < 1e-9, "{p_closed} vs {p_quad}");
    let r = paired_ttest_values(&F1_A, &F1_B).unwrap();
    assert_eq!(r.df, 9);
    assert!((r.t - t).abs() < 1e-9);
    assert!(
        (r.p_value - p_closed).abs() < 1e-9,
        "{} vs {p_closed}",
        r.p_value
    );
    let swapped = paired_ttest_values(&F1_B, &F1_A).unwrap();
    assert!((swapped.t + r.t).abs() < 1e-12);
    assert_eq!(swapped.p_value, r.p_value);
    let same = paired_ttest_values(&F1_A, &F1_A).unwrap();
    assert_eq!((same.t, same.p_value), (0.0, 1.0));
}

/// A report whose per-fold F1 equals `f1` exactly: each fold has one
/// positive predicted correctly and some false positives/negatives.
fn synthetic_report(method: &str, plan: &SplitPlan, hits: &[usize]) -> EvalReport {
    let mut preds = Vec::new();
    for (id, fold) in plan.assignment() {
        let n: usize = id[1..].parse().unwrap();
        let within = n % 10;
        let truth = if within < 5 {
            Label::Fake
        } else {
            Label::Satire
        };
        let correct = within < hits[fold] || (5..5 + hits[fold]).contains(&within);
        let predicted = if correct { truth } else { truth.other() };
        preds.push(Prediction {
            article_id: id.to_string(),
            fold,
            true_label: truth,
            predicted_label: predicted,
            score: if predicted == Label::Satire { 1.0 } else { 0.0 },
            method: method.into(),
        });
    }
    evaluate(&preds, plan, Label::Fake).unwrap()
}

#[test]
fn comparison_table_layout() {
    let plan =
        SplitPlan::from_assignment(10, 0, (0..100).map(|i| (format!("x{i}"), i / 10)).collect())
            .unwrap();
    let base = synthetic_report("baseline", &plan, &[3, 4, 3, 3, 4, 3, 4, 3, 3, 4]);
    let coh = synthetic_report("coh-metrix", &plan, &[4, 4, 4, 5, 4, 4, 5, 4, 4, 4]);
    let bert = synthetic_report("bert", &plan, &[5, 4, 5, 5, 5, 4, 5, 5, 5, 5]);
    let table = compare_methods(&[base.clone(), coh, bert], "baseline").unwrap();
    assert_eq!(table.rows.len(), 3);
    assert!(!table.row("baseline").unwrap().significant);
    assert!(table.row("coh-metrix").unwrap().significant);
    assert!(table.row("bert").unwrap().best);
    let text = table.to_text();
    let bert_line = text.lines().find(|l| l.starts_with("bert")).unwrap();
    assert!(
        bert_line.contains("**") && bert_line.ends_with("***"),
        "{text}"
    );

    let same = compare_methods(
        &[
            base.clone(),
            EvalReport {
                method: "copy".into(),
                ..base.clone()
            },
        ],
        "baseline",
    )
    .unwrap();
    assert!(!same.row("copy").unwrap().significant);

    let mut misaligned = base.clone();
    misaligned.method = "short".into();
    misaligned.folds.pop();
    assert!(paired_ttest(&misaligned, &base).is_err());
    assert!(compare_methods(&[base, misaligned], "baseline").is_err());
}

fn toy_corpus(seed: u64) -> Vec<Article> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let fake_words = [
        "officials",
        "report",
        "confirmed",
        "agency",
        "secret",
        "shocking",
    ];
    let satire_words = ["i", "my", "me", "local", "man", "area", "reportedly"];
    (0..60)
        .map(|i| {
            let label = if i % 2 == 0 {
                Label::Fake
            } else {
                Label::Satire
            };
            let words = if label == Label::Fake {
                &fake_words[..]
            } else {
                &satire_words[..]
            };
            let body = (0..30)
                .map(|_| {
                    if rng.gen::<f64>() < 0.7 {
                        words[rng.gen_range(0..words.len())]
                    } else {
                        "the"
                    }
                })
                .collect::<Vec<_>>()
                .join(" ");
            Article {
                id: format!("t{i:02}"),
                label,
                headline: "Headline".into(),
                body: format!("{body}."),
                source: None,
            }
        })
        .collect()
}

#[test]
fn mnb_cross_validation_round_trips_through_file_format() {
    let arts = toy_corpus(1);
    let plan = make_folds(&arts, 5, 3).unwrap();
    let preds = cross_validate_mnb(&arts, &plan).unwrap();
    assert_eq!(preds.len(), arts.len());
    let text = predictions_to_string(&preds).unwrap();
    let back = parse_predictions(&text, Path::new("mnb.jsonl")).unwrap();
    assert_eq!(back, preds);
    let r1 = evaluate(&preds, &plan, Label::Fake).unwrap();
    let r2 = evaluate(&back, &plan, Label::Fake).unwrap();
    assert_eq!(r1, r2);
    assert!(r1.mean.f1 > 0.9);
    assert_eq!(cross_validate_mnb(&arts, &plan).unwrap(), preds);
}

#[test]
fn svm_cross_validation_uses_training_fold_statistics_only() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let n = 120;
    let arts = articles(60, 60);
    let labels: HashMap<String, Label> = arts.iter().map(|a| (a.id.clone(), a.label)).collect();
    let rows: Vec<Vec<f64>> = arts
        .iter()
        .map(|a| {
            let shift = if a.label == Label::Satire { 1.0 } else { -1.0 };
            vec![
                shift + rng.gen_range(-2.0..2.0),
                rng.gen_range(-1.0..1.0) * 5.0,
                shift * 0.5 + rng.gen_range(-2.0..2.0),
            ]
        })
        .collect();
    let x = FeatureMatrix::from_rows(
        arts.iter().map(|a| a.id.clone()).collect(),
        vec![
            "first_person_singular".into(),
            "noise".into(),
            "concreteness".into(),
        ],
        &rows,
    )
    .unwrap();
    let plan = make_folds(&arts, 10, 5).unwrap();
    let opts = AnalysisOptions::default();
    for set in [FeatureSet::Raw, FeatureSet::Survivors, FeatureSet::Pca] {
        let run =
            cross_validate_svm(&x, &labels, &plan, &SvmParams::default(), set, &opts).unwrap();
        assert_eq!(run.predictions.len(), n);
        assert_eq!(
            run,
            cross_validate_svm(&x, &labels, &plan, &SvmParams::default(), set, &opts).unwrap()
        );
        let report = evaluate(&run.predictions, &plan, Label::Fake).unwrap();
        assert!(report.mean.f1 > 0.7, "{set:?}: {}", report.summary());
        if set == FeatureSet::Raw {
            for info in &run.folds {
                let train: Vec<usize> = (0..n)
                    .filter(|&i| plan.fold_of(&arts[i].id) != Some(info.fold))
                    .collect();
                for (j, name) in info.columns.iter().enumerate() {
                    let col: Vec<f64> = train
                        .iter()
                        .map(|&i| x.values[(i, x.column_index(name).unwrap())])
                        .collect();
                    let (m, sd) = column_mean_sd(&col);
                    assert!((info.standardization.means[j] - m).abs() < 1e-12);
                    assert!((info.standardization.sds[j] - sd).abs() < 1e-12);
                }
            }
        }
        if set == FeatureSet::Survivors {
            assert!(run
                .folds
                .iter()
                .all(|f| !f.columns.contains(&"noise".to_string()) || f.columns.len() > 1));
        }
    }
}
