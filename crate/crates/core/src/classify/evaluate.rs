use std::fmt::Write as _;

use serde::Serialize;
use statrs::distribution::{ContinuousCDF, StudentsT};

use super::folds::SplitPlan;
use super::predictions::{validate_predictions, Prediction};
use crate::corpus::Label;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct Confusion {
    pub tp: usize,
    pub fp: usize,
    pub fn_: usize,
    pub tn: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Prf {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    /// Set when a zero denominator forced a metric to 0.
    pub undefined: bool,
}

impl Confusion {
    pub fn prf(&self) -> Prf {
        let ratio = |num: usize, den: usize| {
            if den == 0 {
                None
            } else {
                Some(num as f64 / den as f64)
            }
        };
        let p = ratio(self.tp, self.tp + self.fp);
        let r = ratio(self.tp, self.tp + self.fn_);
        let (precision, recall) = (p.unwrap_or(0.0), r.unwrap_or(0.0));
        let f1 = if precision + recall > 0.0 {
            2.0 * precision * recall / (precision + recall)
        } else {
            0.0
        };
        Prf {
            precision,
            recall,
            f1,
            undefined: p.is_none() || r.is_none() || precision + recall == 0.0,
        }
    }

    /// The same counts seen from the other class.
    pub fn flipped(&self) -> Confusion {
        Confusion {
            tp: self.tn,
            fp: self.fn_,
            fn_: self.fp,
            tn: self.tp,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FoldMetrics {
    pub fold: usize,
    pub confusion: Confusion,
    pub metrics: Prf,
    /// Unweighted mean over both classes.
    pub macro_avg: Prf,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EvalReport {
    pub method: String,
    pub positive_class: Label,
    pub folds: Vec<FoldMetrics>,
    pub mean: Prf,
    pub macro_mean: Prf,
}

fn average(items: impl Iterator<Item = Prf> + Clone) -> Prf {
    let n = items.clone().count().max(1) as f64;
    let (mut p, mut r, mut f, mut u) = (0.0, 0.0, 0.0, false);
    for m in items {
        p += m.precision;
        r += m.recall;
        f += m.f1;
        u |= m.undefined;
    }
    Prf {
        precision: p / n,
        recall: r / n,
        f1: f / n,
        undefined: u,
    }
}

/// Per-fold precision, recall and F1 on `positive`, plus fold means.
/// Predictions must cover the plan exactly once, in the planned folds.
pub fn evaluate(
    predictions: &[Prediction],
    plan: &SplitPlan,
    positive: Label,
) -> Result<EvalReport> {
    let problems = validate_predictions(predictions, plan, None);
    let structural = super::predictions::PredictionProblems {
        threshold_inconsistent: false,
        label_mismatch: vec![],
        ..problems.clone()
    };
    if !structural.is_empty() {
        return Err(Error::Validation(format!(
            "cannot evaluate: {}",
            structural.describe()
        )));
    }
    let mut confusion = vec![Confusion::default(); plan.k];
    for p in predictions {
        let c = &mut confusion[p.fold];
        match (p.true_label == positive, p.predicted_label == positive) {
            (true, true) => c.tp += 1,
            (false, true) => c.fp += 1,
            (true, false) => c.fn_ += 1,
            (false, false) => c.tn += 1,
        }
    }
    let folds: Vec<FoldMetrics> = confusion
        .into_iter()
        .enumerate()
        .map(|(fold, c)| {
            let m = c.prf();
            let o = c.flipped().prf();
            FoldMetrics {
                fold,
                confusion: c,
                metrics: m,
                macro_avg: average([m, o].into_iter()),
            }
        })
        .collect();
    Ok(EvalReport {
        method: predictions[0].method.clone(),
        positive_class: positive,
        mean: average(folds.iter().map(|f| f.metrics)),
        macro_mean: average(folds.iter().map(|f| f.macro_avg)),
        folds,
    })
}

impl EvalReport {
    pub fn fold_f1(&self) -> Vec<f64> {
        self.folds.iter().map(|f| f.metrics.f1).collect()
    }

    pub fn to_tsv(&self) -> String {
        let mut out = String::from("fold\ttp\tfp\tfn\ttn\tprecision\trecall\tf1\tundefined\tmacro_precision\tmacro_recall\tmacro_f1\n");
        let mut row = |name: String, c: Option<&Confusion>, m: &Prf, a: &Prf| {
            let counts = c.map_or_else(
                || "\t\t\t".to_string(),
                |c| format!("{}\t{}\t{}\t{}", c.tp, c.fp, c.fn_, c.tn),
            );
            let _ = writeln!(
                out,
                "{name}\t{counts}\t{}\t{}\t{}\t{}\t{}\t{}\t{}",
                m.precision, m.recall, m.f1, m.undefined, a.precision, a.recall, a.f1
            );
        };
        for f in &self.folds {
            row(
                f.fold.to_string(),
                Some(&f.confusion),
                &f.metrics,
                &f.macro_avg,
            );
        }
        row("mean".into(), None, &self.mean, &self.macro_mean);
        out
    }

    pub fn summary(&self) -> String {
        format!(
            "{}: positive class {}, mean P {:.3} R {:.3} F1 {:.3} (macro F1 {:.3}){}",
            self.method,
            self.positive_class,
            self.mean.precision,
            self.mean.recall,
            self.mean.f1,
            self.macro_mean.f1,
            if self.mean.undefined {
                "; some folds had zero denominators"
            } else {
                ""
            }
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TTest {
    pub t: f64,
    pub p_value: f64,
    pub df: usize,
    /// Differences have zero variance but a nonzero mean.
    pub degenerate_variance: bool,
}

/// Two-sided paired t-test on per-fold F1 (`a − b`).
pub fn paired_ttest(a: &EvalReport, b: &EvalReport) -> Result<TTest> {
    let fa: Vec<usize> = a.folds.iter().map(|f| f.fold).collect();
    let fb: Vec<usize> = b.folds.iter().map(|f| f.fold).collect();
    if fa != fb {
        return Err(Error::Validation(format!(
            "reports `{}` and `{}` are not fold-aligned",
            a.method, b.method
        )));
    }
    paired_ttest_values(&a.fold_f1(), &b.fold_f1())
}

pub fn paired_ttest_values(a: &[f64], b: &[f64]) -> Result<TTest> {
    if a.len() != b.len() || a.len() < 2 {
        return Err(Error::Validation(format!(
            "paired t-test needs two equal samples of size ≥ 2, got {} and {}",
            a.len(),
            b.len()
        )));
    }
    let n = a.len() as f64;
    let d: Vec<f64> = a.iter().zip(b).map(|(x, y)| x - y).collect();
    let mean = d.iter().sum::<f64>() / n;
    let var = d.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    let df = a.len() - 1;
    if d.iter().all(|x| *x == 0.0) {
        return Ok(TTest {
            t: 0.0,
            p_value: 1.0,
            df,
            degenerate_variance: false,
        });
    }
    if var == 0.0 {
        return Ok(TTest {
            t: mean.signum() * f64::INFINITY,
            p_value: 0.0,
            df,
            degenerate_variance: true,
        });
    }
    let t = mean / (var / n).sqrt();
    let dist = StudentsT::new(0.0, 1.0, df as f64).map_err(|e| Error::Validation(e.to_string()))?;
    let p_value = (2.0 * dist.sf(t.abs())).clamp(0.0, 1.0);
    Ok(TTest {
        t,
        p_value,
        df,
        degenerate_variance: false,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComparisonRow {
    pub method: String,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    /// Test against the baseline; `None` on the baseline row.
    pub test: Option<TTest>,
    pub significant: bool,
    pub best: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComparisonTable {
    pub baseline: String,
    pub positive_class: Label,
    pub rows: Vec<ComparisonRow>,
}

pub const COMPARISON_ALPHA: f64 = 0.05;

/// Mean P/R/F1 per method; methods differing from the baseline at
/// p < 0.05 are starred and the best mean F1 is marked.
pub fn compare_methods(reports: &[EvalReport], baseline: &str) -> Result<ComparisonTable> {
    if reports.len() < 2 {
        return Err(Error::Validation(
            "comparison needs at least two reports".into(),
        ));
    }
    let base = reports
        .iter()
        .find(|r| r.method == baseline)
        .ok_or_else(|| {
            Error::Validation(format!("baseline `{baseline}` is not among the reports"))
        })?;
    if let Some(r) = reports
        .iter()
        .find(|r| r.positive_class != base.positive_class)
    {
        return Err(Error::Validation(format!(
            "report `{}` uses a different positive class",
            r.method
        )));
    }
    let best_f1 = reports
        .iter()
        .map(|r| r.mean.f1)
        .fold(f64::NEG_INFINITY, f64::max);
    let mut rows = Vec::new();
    for r in reports {
        let test = if r.method == baseline {
            None
        } else {
            Some(paired_ttest(r, base)?)
        };
        rows.push(ComparisonRow {
            method: r.method.clone(),
            precision: r.mean.precision,
            recall: r.mean.recall,
            f1: r.mean.f1,
            significant: test.is_some_and(|t| t.p_value < COMPARISON_ALPHA),
            test,
            best: r.mean.f1 == best_f1,
        });
    }
    Ok(ComparisonTable {
        baseline: baseline.to_string(),
        positive_class: base.positive_class,
        rows,
    })
}

impl ComparisonTable {
    pub fn row(&self, method: &str) -> Option<&ComparisonRow> {
        self.rows.iter().find(|r| r.method == method)
    }

    /// Aligned text; `*` marks significance against the baseline and
    /// the best F1 is wrapped in `**`.
    pub fn to_text(&self) -> String {
        let mut out = format!(
            "{:<16} {:>9} {:>9} {:>10}   (positive class: {})\n",
            "method", "precision", "recall", "F1", self.positive_class
        );
        for r in &self.rows {
            let f1 = format!("{:.2}{}", r.f1, if r.significant { "*" } else { "" });
            let f1 = if r.best { format!("**{f1}**") } else { f1 };
            let _ = writeln!(
                out,
                "{:<16} {:>9.2} {:>9.2} {:>10}",
                r.method, r.precision, r.recall, f1
            );
        }
        let _ = writeln!(
            out,
            "\n* p < {COMPARISON_ALPHA} in a two-tailed paired t-test against `{}`; ** best F1",
            self.baseline
        );
        out
    }

    pub fn to_tsv(&self) -> String {
        let mut out =
            String::from("method\tprecision\trecall\tf1\tt\tp_value\tsignificant\tbest\n");
        for r in &self.rows {
            let (t, p) = r.test.map_or((String::new(), String::new()), |t| {
                (t.t.to_string(), t.p_value.to_string())
            });
            let _ = writeln!(
                out,
                "{}\t{}\t{}\t{}\t{t}\t{p}\t{}\t{}",
                r.method, r.precision, r.recall, r.f1, r.significant, r.best
            );
        }
        out
    }
}
