//! Correlation-matrix PCA, varimax rotation and component scores.
//!
//! Conventions:
//! - unrotated `loadings` are the orthonormal eigenvectors; scores are
//!   `Z V` (score variances equal the eigenvalues);
//! - rotation acts on the structure loadings `A = V Λ^½`; rotated
//!   `loadings` are `A R` and scores use the regression method
//!   `Z V Λ^-½ R` (unit variance, uncorrelated);
//! - each component is signed so that its largest-|loading| entry is
//!   positive, and labelled with that entry's column name.

use nalgebra::{DMatrix, DVector};

use super::eigen::symmetric_eigen;
use crate::error::{Error, Result};
use crate::matrix::{FeatureMatrix, Standardization};

/// Eigenvalues at or below this are treated as numerically zero.
pub const EIGENVALUE_FLOOR: f64 = 1e-8;
pub const VARIMAX_MAX_SWEEPS: usize = 1000;
pub const VARIMAX_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct PcaModel {
    /// Input (standardized) column names, in loading-row order.
    pub columns: Vec<String>,
    pub standardization: Option<Standardization>,
    /// Retained eigenvalues of the correlation matrix, descending.
    pub eigenvalues: Vec<f64>,
    /// Sum of all eigenvalues, retained or not.
    pub total_variance: f64,
    /// p × k; see module docs for the rotated/unrotated meaning.
    pub loadings: DMatrix<f64>,
    /// p × k matrix `W` with scores = `Z W`.
    pub score_weights: DMatrix<f64>,
    /// k × k orthogonal matrix applied to the structure loadings.
    pub rotation: DMatrix<f64>,
    pub rotated: bool,
    /// `PC1..` or `RC1..`.
    pub component_names: Vec<String>,
    /// Column with the largest |loading| in each component.
    pub component_labels: Vec<String>,
    /// Varimax criterion after each sweep (empty when unrotated).
    pub varimax_trace: Vec<f64>,
}

impl PcaModel {
    pub fn retained(&self) -> usize {
        self.eigenvalues.len()
    }

    /// Loadings scaled to correlations between variables and components.
    pub fn structure_loadings(&self) -> DMatrix<f64> {
        if self.rotated {
            self.loadings.clone()
        } else {
            let mut a = self.loadings.clone();
            for (j, &l) in self.eigenvalues.iter().enumerate() {
                a.column_mut(j).scale_mut(l.sqrt());
            }
            a
        }
    }

    /// Per-variable sums of squared structure loadings.
    pub fn communalities(&self) -> Vec<f64> {
        let a = self.structure_loadings();
        (0..a.nrows())
            .map(|i| a.row(i).iter().map(|x| x * x).sum())
            .collect()
    }

    /// Sums of squared structure loadings per component.
    pub fn explained_variance(&self) -> Vec<f64> {
        let a = self.structure_loadings();
        (0..a.ncols())
            .map(|j| a.column(j).iter().map(|x| x * x).sum())
            .collect()
    }
}

fn sign_and_label(
    loadings: &mut DMatrix<f64>,
    extra: &mut [&mut DMatrix<f64>],
    columns: &[String],
) -> Vec<String> {
    let mut labels = Vec::new();
    for j in 0..loadings.ncols() {
        let col = loadings.column(j);
        let (imax, _) = col.iter().enumerate().fold((0, -1.0), |best, (i, v)| {
            if v.abs() > best.1 {
                (i, v.abs())
            } else {
                best
            }
        });
        if loadings[(imax, j)] < 0.0 {
            loadings.column_mut(j).neg_mut();
            for m in extra.iter_mut() {
                m.column_mut(j).neg_mut();
            }
        }
        labels.push(columns[imax].clone());
    }
    labels
}

/// PCA of the correlation matrix of a standardized matrix, keeping every
/// component with eigenvalue above [`EIGENVALUE_FLOOR`].
pub fn fit_pca(standardized: &FeatureMatrix) -> Result<PcaModel> {
    let n = standardized.nrows();
    let p = standardized.ncols();
    if n < 2 || p == 0 {
        return Err(Error::Validation(format!(
            "PCA needs at least 2 rows and 1 column, got {n}x{p}"
        )));
    }
    let z = &standardized.values;
    let corr = (z.transpose() * z) / (n as f64 - 1.0);
    let corr = (&corr + corr.transpose()) * 0.5;
    let (values, vectors) = symmetric_eigen(&corr)?;
    let total_variance = values.iter().sum();
    let k = values.iter().filter(|&&v| v > EIGENVALUE_FLOOR).count();
    if k == 0 {
        return Err(Error::Validation(
            "correlation matrix has no positive eigenvalue".into(),
        ));
    }
    let mut loadings = vectors.columns(0, k).into_owned();
    let labels = sign_and_label(&mut loadings, &mut [], &standardized.column_names);
    Ok(PcaModel {
        columns: standardized.column_names.clone(),
        standardization: standardized.standardization.clone(),
        eigenvalues: values.iter().take(k).copied().collect(),
        total_variance,
        score_weights: loadings.clone(),
        loadings,
        rotation: DMatrix::identity(k, k),
        rotated: false,
        component_names: (1..=k).map(|i| format!("PC{i}")).collect(),
        component_labels: labels,
        varimax_trace: Vec::new(),
    })
}

/// Varimax criterion: sum over components of the variance of squared loadings.
pub fn varimax_criterion(a: &DMatrix<f64>) -> f64 {
    let p = a.nrows() as f64;
    (0..a.ncols())
        .map(|j| {
            let sq: Vec<f64> = a.column(j).iter().map(|x| x * x).collect();
            let m = sq.iter().sum::<f64>() / p;
            sq.iter().map(|s| (s - m).powi(2)).sum::<f64>() / p
        })
        .sum()
}

/// Pairwise (Kaiser) varimax rotation of the structure loadings. With
/// `kaiser_normalize`, rows are scaled to unit communality while rotating.
/// A one-component model is returned unchanged.
pub fn varimax_rotate(model: &PcaModel, kaiser_normalize: bool) -> Result<PcaModel> {
    if model.rotated {
        return Err(Error::Validation("model is already rotated".into()));
    }
    let k = model.retained();
    if k < 2 {
        return Ok(model.clone());
    }
    let structure = model.structure_loadings();
    let p = structure.nrows();
    let h: Vec<f64> = (0..p)
        .map(|i| {
            let c: f64 = structure.row(i).iter().map(|x| x * x).sum::<f64>().sqrt();
            if kaiser_normalize && c > 0.0 {
                c
            } else {
                1.0
            }
        })
        .collect();
    let mut b = DMatrix::from_fn(p, k, |i, j| structure[(i, j)] / h[i]);
    let mut r = DMatrix::<f64>::identity(k, k);
    let mut trace = vec![varimax_criterion(&b)];
    let pf = p as f64;
    let mut converged = false;
    for _ in 0..VARIMAX_MAX_SWEEPS {
        let mut max_angle: f64 = 0.0;
        for a in 0..k {
            for c in a + 1..k {
                let (mut sa, mut sb, mut sc, mut sd) = (0.0, 0.0, 0.0, 0.0);
                for i in 0..p {
                    let (x, y) = (b[(i, a)], b[(i, c)]);
                    let u = x * x - y * y;
                    let v = 2.0 * x * y;
                    sa += u;
                    sb += v;
                    sc += u * u - v * v;
                    sd += 2.0 * u * v;
                }
                let num = sd - 2.0 * sa * sb / pf;
                let den = sc - (sa * sa - sb * sb) / pf;
                let phi = 0.25 * num.atan2(den);
                if phi.abs() < 1e-15 {
                    continue;
                }
                max_angle = max_angle.max(phi.abs());
                let (s, co) = phi.sin_cos();
                for i in 0..p {
                    let (x, y) = (b[(i, a)], b[(i, c)]);
                    b[(i, a)] = co * x + s * y;
                    b[(i, c)] = -s * x + co * y;
                }
                for i in 0..k {
                    let (x, y) = (r[(i, a)], r[(i, c)]);
                    r[(i, a)] = co * x + s * y;
                    r[(i, c)] = -s * x + co * y;
                }
            }
        }
        let crit = varimax_criterion(&b);
        let prev = *trace.last().expect("non-empty");
        trace.push(crit);
        if max_angle < 1e-10 || (crit - prev).abs() <= VARIMAX_TOLERANCE * crit.abs().max(1.0) {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::NonConvergence {
            what: "varimax rotation".into(),
            iterations: VARIMAX_MAX_SWEEPS,
            residual: (trace[trace.len() - 1] - trace[trace.len() - 2]).abs(),
        });
    }

    // order components by explained variance, then fix signs
    let mut rotated = &structure * &r;
    let ss: Vec<f64> = (0..k)
        .map(|j| rotated.column(j).iter().map(|x| x * x).sum())
        .collect();
    let mut order: Vec<usize> = (0..k).collect();
    order.sort_by(|&i, &j| ss[j].total_cmp(&ss[i]).then(i.cmp(&j)));
    let mut perm = DMatrix::zeros(k, k);
    for (dst, &src) in order.iter().enumerate() {
        perm[(src, dst)] = 1.0;
    }
    r = &r * &perm;
    rotated = &structure * &r;
    let mut r_signed = r.clone();
    let labels = sign_and_label(&mut rotated, &mut [&mut r_signed], &model.columns);
    let r = r_signed;

    let inv_sqrt = DMatrix::from_diagonal(&DVector::from_iterator(
        k,
        model.eigenvalues.iter().map(|l| 1.0 / l.sqrt()),
    ));
    let score_weights = &model.loadings * inv_sqrt * &r;
    Ok(PcaModel {
        columns: model.columns.clone(),
        standardization: model.standardization.clone(),
        eigenvalues: model.eigenvalues.clone(),
        total_variance: model.total_variance,
        loadings: rotated,
        score_weights,
        rotation: r,
        rotated: true,
        component_names: (1..=k).map(|i| format!("RC{i}")).collect(),
        component_labels: labels,
        varimax_trace: trace,
    })
}

/// Component scores. The model's columns are selected by name; a matrix
/// without standardization parameters is first z-scored with the model's.
pub fn project_scores(matrix: &FeatureMatrix, model: &PcaModel) -> Result<FeatureMatrix> {
    let z = match (&matrix.standardization, &model.standardization) {
        (None, Some(params)) => super::apply_standardization(matrix, params)?,
        _ => matrix.select_columns(&model.columns)?,
    };
    let scores = &z.values * &model.score_weights;
    FeatureMatrix::new(z.row_ids.clone(), model.component_names.clone(), scores)
}
