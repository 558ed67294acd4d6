//! Confusion-matrix metrics, the two-sample t-test with p-values, pairwise
//! comparison matrices, and the bundled five-fold reference tables.
//!
//! Conventions:
//! - positive class = disease (melanoma-style labeling), threshold ties
//!   predict positive;
//! - metrics with a zero denominator return 0.0 with a `degenerate` flag —
//!   never a crash;
//! - the t statistic uses the unpooled denominator `√(s1²/n1 + s2²/n2)` with
//!   sample (n−1) variances; degrees of freedom default to the pooled
//!   `n1+n2−2` (the convention the bundled reference matrices follow), with
//!   Welch–Satterthwaite df available behind a flag;
//! - p-values are two-sided.

pub mod fixtures;
pub mod special;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
pub use special::{ln_gamma, regularized_incomplete_beta, student_t_cdf, student_t_p_two_sided};

/// Tallied prediction outcomes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfusionCounts {
    pub tp: u64,
    pub tn: u64,
    pub fp: u64,
    #[serde(rename = "fn")]
    pub fn_: u64,
}

impl ConfusionCounts {
    pub fn total(&self) -> u64 {
        self.tp + self.tn + self.fp + self.fn_
    }
}

/// A metric value with its zero-denominator flag.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MetricValue {
    pub value: f64,
    /// True when the defining denominator was zero and 0.0 was substituted.
    pub degenerate: bool,
}

impl MetricValue {
    fn ratio(numerator: f64, denominator: f64) -> Self {
        if denominator == 0.0 {
            MetricValue {
                value: 0.0,
                degenerate: true,
            }
        } else {
            MetricValue {
                value: numerator / denominator,
                degenerate: false,
            }
        }
    }
}

/// Tally predictions against binary labels. `prob ≥ threshold` predicts the
/// positive class (ties positive).
pub fn confusion(probs: &[f64], labels: &[u8], threshold: f64) -> Result<ConfusionCounts> {
    if probs.is_empty() {
        return Err(Error::config("confusion requires at least one sample"));
    }
    if probs.len() != labels.len() {
        return Err(Error::shape(format!(
            "{} probabilities but {} labels",
            probs.len(),
            labels.len()
        )));
    }
    let mut c = ConfusionCounts {
        tp: 0,
        tn: 0,
        fp: 0,
        fn_: 0,
    };
    for (i, (&p, &y)) in probs.iter().zip(labels).enumerate() {
        if !p.is_finite() {
            return Err(Error::data(format!(
                "probability at index {i} is not finite: {p}"
            )));
        }
        if y > 1 {
            return Err(Error::data(format!(
                "label at index {i} must be 0 or 1, got {y}"
            )));
        }
        let predicted_positive = p >= threshold;
        match (predicted_positive, y) {
            (true, 1) => c.tp += 1,
            (true, 0) => c.fp += 1,
            (false, 1) => c.fn_ += 1,
            (false, 0) => c.tn += 1,
            _ => unreachable!(),
        }
    }
    Ok(c)
}

/// (tp + tn) / total.
pub fn accuracy(c: &ConfusionCounts) -> MetricValue {
    MetricValue::ratio((c.tp + c.tn) as f64, c.total() as f64)
}

/// tp / (tp + fp).
pub fn precision(c: &ConfusionCounts) -> MetricValue {
    MetricValue::ratio(c.tp as f64, (c.tp + c.fp) as f64)
}

/// tp / (tp + fn).
pub fn recall(c: &ConfusionCounts) -> MetricValue {
    MetricValue::ratio(c.tp as f64, (c.tp + c.fn_) as f64)
}

/// Harmonic mean of precision and recall: 2PR / (P + R).
pub fn f_measure(c: &ConfusionCounts) -> MetricValue {
    let p = precision(c).value;
    let r = recall(c).value;
    MetricValue::ratio(2.0 * p * r, p + r)
}

/// Degrees-of-freedom convention for [`ttest_with`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum DfMode {
    /// df = n1 + n2 − 2 (the bundled reference matrices follow this).
    Pooled,
    /// Welch–Satterthwaite df from the sample variances.
    Welch,
}

/// Two-sample t-test outcome.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TTestResult {
    pub statistic: f64,
    pub p_value: f64,
    pub df: f64,
}

fn sample_mean_var(sample: &[f64]) -> (f64, f64) {
    let n = sample.len() as f64;
    let mean = sample.iter().sum::<f64>() / n;
    let var = sample.iter().map(|&x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1.0);
    (mean, var)
}

/// Two-sample t-test with the default pooled degrees of freedom.
pub fn ttest(sample1: &[f64], sample2: &[f64]) -> Result<TTestResult> {
    ttest_with(sample1, sample2, DfMode::Pooled)
}

/// Two-sample t-test: statistic `(mean1 − mean2) / √(s1²/n1 + s2²/n2)` with
/// sample variances, two-sided p-value, df per `mode`.
///
/// Degenerate variance handling: when both variances are zero, equal means
/// give `(statistic 0, p 1)`, unequal means give `(±∞, p 0)`.
pub fn ttest_with(sample1: &[f64], sample2: &[f64], mode: DfMode) -> Result<TTestResult> {
    if sample1.len() < 2 || sample2.len() < 2 {
        return Err(Error::config(format!(
            "ttest requires at least 2 elements per sample, got {} and {}",
            sample1.len(),
            sample2.len()
        )));
    }
    let (n1, n2) = (sample1.len() as f64, sample2.len() as f64);
    let (m1, v1) = sample_mean_var(sample1);
    let (m2, v2) = sample_mean_var(sample2);
    let pooled_df = n1 + n2 - 2.0;

    let se1 = v1 / n1;
    let se2 = v2 / n2;
    let denom_sq = se1 + se2;
    if denom_sq == 0.0 {
        return Ok(if m1 == m2 {
            TTestResult {
                statistic: 0.0,
                p_value: 1.0,
                df: pooled_df,
            }
        } else {
            TTestResult {
                statistic: if m1 > m2 {
                    f64::INFINITY
                } else {
                    f64::NEG_INFINITY
                },
                p_value: 0.0,
                df: pooled_df,
            }
        });
    }

    let statistic = (m1 - m2) / denom_sq.sqrt();
    let df = match mode {
        DfMode::Pooled => pooled_df,
        DfMode::Welch => {
            denom_sq * denom_sq / (se1 * se1 / (n1 - 1.0) + se2 * se2 / (n2 - 1.0))
        }
    };
    let p_value = special::student_t_p_two_sided(statistic, df)?;
    Ok(TTestResult {
        statistic,
        p_value,
        df,
    })
}

/// Per-model fold accuracies.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FoldTable {
    models: Vec<String>,
    folds: Vec<Vec<f64>>,
}

impl FoldTable {
    pub fn new(models: Vec<String>, folds: Vec<Vec<f64>>) -> Result<Self> {
        if models.is_empty() || models.len() != folds.len() {
            return Err(Error::shape(format!(
                "{} model names but {} fold rows",
                models.len(),
                folds.len()
            )));
        }
        let k = folds[0].len();
        if k < 2 {
            return Err(Error::config(format!(
                "fold tables need at least 2 folds per model, got {k}"
            )));
        }
        for (name, row) in models.iter().zip(&folds) {
            if row.len() != k {
                return Err(Error::shape(format!(
                    "model '{name}' has {} folds but expected {k}",
                    row.len()
                )));
            }
            for &acc in row {
                if !(0.0..=1.0).contains(&acc) {
                    return Err(Error::data(format!(
                        "model '{name}' has accuracy {acc} outside [0,1]"
                    )));
                }
            }
        }
        Ok(FoldTable { models, folds })
    }

    /// Parse a `model,fold1..foldK` CSV.
    pub fn from_csv_str(content: &str) -> Result<Self> {
        let mut reader = csv::ReaderBuilder::new()
            .has_headers(true)
            .from_reader(content.as_bytes());
        let mut models = Vec::new();
        let mut folds = Vec::new();
        for (i, record) in reader.records().enumerate() {
            let record =
                record.map_err(|e| Error::data(format!("fold CSV row {}: {e}", i + 1)))?;
            let mut fields = record.iter();
            let Some(model) = fields.next() else {
                return Err(Error::data(format!("fold CSV row {} is empty", i + 1)));
            };
            let row: Vec<f64> = fields
                .map(|f| {
                    f.trim().parse::<f64>().map_err(|_| {
                        Error::data(format!(
                            "fold CSV row {}: '{f}' is not a number",
                            i + 1
                        ))
                    })
                })
                .collect::<Result<_>>()?;
            models.push(model.to_string());
            folds.push(row);
        }
        FoldTable::new(models, folds)
    }

    pub fn from_csv_path(path: &std::path::Path) -> Result<Self> {
        let content = std::fs::read_to_string(path)
            .map_err(|e| Error::io(path.display().to_string(), e))?;
        FoldTable::from_csv_str(&content)
    }

    pub fn models(&self) -> &[String] {
        &self.models
    }

    pub fn fold_count(&self) -> usize {
        self.folds[0].len()
    }

    pub fn row(&self, model: &str) -> Option<&[f64]> {
        self.models
            .iter()
            .position(|m| m == model)
            .map(|i| self.folds[i].as_slice())
    }

    pub fn rows(&self) -> impl Iterator<Item = (&str, &[f64])> {
        self.models
            .iter()
            .map(String::as_str)
            .zip(self.folds.iter().map(Vec::as_slice))
    }

    /// The sub-table of models whose names start with `prefix`, in order.
    pub fn select_prefix(&self, prefix: &str) -> Result<FoldTable> {
        let mut models = Vec::new();
        let mut folds = Vec::new();
        for (m, f) in self.models.iter().zip(&self.folds) {
            if m.starts_with(prefix) {
                models.push(m.clone());
                folds.push(f.clone());
            }
        }
        FoldTable::new(models, folds)
    }
}

/// All-pairs t-test matrix: entry (i, j) compares model i's folds against
/// model j's. Statistics are exactly antisymmetric and p-values exactly
/// symmetric by construction.
pub fn comparison_matrix(table: &FoldTable) -> Result<Vec<Vec<TTestResult>>> {
    let n = table.models.len();
    if n < 2 {
        return Err(Error::config(
            "comparison matrix needs at least 2 models".to_string(),
        ));
    }
    let mut matrix = Vec::with_capacity(n);
    for i in 0..n {
        let mut row = Vec::with_capacity(n);
        for j in 0..n {
            row.push(ttest(&table.folds[i], &table.folds[j])?);
        }
        matrix.push(row);
    }
    Ok(matrix)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn confusion_direct_tallies() {
        let c = confusion(&[0.9, 0.1], &[1, 0], 0.5).unwrap();
        assert_eq!(
            c,
            ConfusionCounts {
                tp: 1,
                tn: 1,
                fp: 0,
                fn_: 0
            }
        );
        let c = confusion(&[0.9], &[0], 0.5).unwrap();
        assert_eq!(c.fp, 1);
        // Tie rule: exactly the threshold predicts positive.
        let c = confusion(&[0.5], &[1], 0.5).unwrap();
        assert_eq!(c.tp, 1);
    }

    #[test]
    fn confusion_validates_input() {
        assert!(confusion(&[], &[], 0.5).is_err());
        assert!(confusion(&[0.5], &[1, 0], 0.5).is_err());
        assert!(confusion(&[0.5], &[2], 0.5).is_err());
        assert!(confusion(&[f64::NAN], &[0], 0.5).is_err());
    }

    #[test]
    fn metric_direct_substitution() {
        let c = ConfusionCounts {
            tp: 50,
            tn: 40,
            fp: 5,
            fn_: 5,
        };
        assert_abs_diff_eq!(accuracy(&c).value, 0.9, epsilon = 1e-15);
        assert_abs_diff_eq!(precision(&c).value, 10.0 / 11.0, epsilon = 1e-15);
        assert_abs_diff_eq!(recall(&c).value, 10.0 / 11.0, epsilon = 1e-15);
        assert_abs_diff_eq!(f_measure(&c).value, 10.0 / 11.0, epsilon = 1e-12);
        for m in [accuracy(&c), precision(&c), recall(&c), f_measure(&c)] {
            assert!(!m.degenerate);
        }
    }

    #[test]
    fn metric_perfect_single_positive() {
        let c = ConfusionCounts {
            tp: 1,
            tn: 0,
            fp: 0,
            fn_: 0,
        };
        assert_eq!(accuracy(&c).value, 1.0);
        assert_eq!(precision(&c).value, 1.0);
        assert_eq!(recall(&c).value, 1.0);
        assert_eq!(f_measure(&c).value, 1.0);
    }

    #[test]
    fn metric_zero_denominators_flagged() {
        let c = ConfusionCounts {
            tp: 0,
            tn: 3,
            fp: 0,
            fn_: 2,
        };
        let p = precision(&c);
        assert_eq!(p.value, 0.0);
        assert!(p.degenerate);
        let r = recall(&c);
        assert_eq!(r.value, 0.0);
        assert!(!r.degenerate); // fn > 0 keeps the denominator alive
        let f = f_measure(&c);
        assert_eq!(f.value, 0.0);
        assert!(f.degenerate);
    }

    #[test]
    fn f_measure_properties() {
        let c = ConfusionCounts {
            tp: 30,
            tn: 10,
            fp: 12,
            fn_: 4,
        };
        let (p, r, f) = (precision(&c).value, recall(&c).value, f_measure(&c).value);
        assert!(f <= p.max(r) + 1e-15);
        // Equal precision and recall ⇒ F equals both.
        let c = ConfusionCounts {
            tp: 9,
            tn: 5,
            fp: 3,
            fn_: 3,
        };
        assert_abs_diff_eq!(
            f_measure(&c).value,
            precision(&c).value,
            epsilon = 1e-12
        );
    }

    #[test]
    fn ttest_identical_samples() {
        let s = [0.9, 0.91, 0.92, 0.93, 0.94];
        let r = ttest(&s, &s).unwrap();
        assert_eq!(r.statistic, 0.0);
        assert_eq!(r.p_value, 1.0);
        assert_eq!(r.df, 8.0);
    }

    #[test]
    fn ttest_zero_variance_cases() {
        let r = ttest(&[1.0, 1.0], &[1.0, 1.0]).unwrap();
        assert_eq!((r.statistic, r.p_value), (0.0, 1.0));
        let r = ttest(&[2.0, 2.0], &[1.0, 1.0]).unwrap();
        assert_eq!(r.statistic, f64::INFINITY);
        assert_eq!(r.p_value, 0.0);
        let r = ttest(&[1.0, 1.0], &[2.0, 2.0]).unwrap();
        assert_eq!(r.statistic, f64::NEG_INFINITY);
    }

    #[test]
    fn ttest_requires_two_elements() {
        assert!(ttest(&[1.0], &[1.0, 2.0]).is_err());
        assert!(ttest(&[1.0, 2.0], &[]).is_err());
    }

    #[test]
    fn ttest_statistic_sign_follows_mean_difference() {
        let lo = [0.1, 0.2, 0.15, 0.12];
        let hi = [0.8, 0.9, 0.85, 0.88];
        assert!(ttest(&lo, &hi).unwrap().statistic < 0.0);
        assert!(ttest(&hi, &lo).unwrap().statistic > 0.0);
    }

    #[test]
    fn ttest_scale_invariance() {
        let a = [0.95, 0.91, 0.88, 0.97, 0.93];
        let b = [0.90, 0.89, 0.92, 0.91, 0.90];
        let base = ttest(&a, &b).unwrap();
        let scale = 7.25;
        let a2: Vec<f64> = a.iter().map(|x| x * scale).collect();
        let b2: Vec<f64> = b.iter().map(|x| x * scale).collect();
        let scaled = ttest(&a2, &b2).unwrap();
        assert_abs_diff_eq!(base.statistic, scaled.statistic, epsilon = 1e-12);
        assert_abs_diff_eq!(base.p_value, scaled.p_value, epsilon = 1e-12);
    }

    #[test]
    fn welch_mode_changes_df_not_statistic() {
        let a = [0.1, 0.9, 0.5, 0.3, 0.7]; // high variance
        let b = [0.50, 0.51, 0.52, 0.49, 0.50]; // low variance
        let pooled = ttest_with(&a, &b, DfMode::Pooled).unwrap();
        let welch = ttest_with(&a, &b, DfMode::Welch).unwrap();
        assert_eq!(pooled.statistic, welch.statistic);
        assert_eq!(pooled.df, 8.0);
        assert!(welch.df < pooled.df, "welch df {} not reduced", welch.df);
        assert_ne!(pooled.p_value, welch.p_value);
    }

    #[test]
    fn fold_table_validation() {
        assert!(FoldTable::new(vec!["a".into()], vec![vec![0.5, 1.5]]).is_err());
        assert!(FoldTable::new(vec!["a".into()], vec![vec![0.5]]).is_err());
        assert!(FoldTable::new(
            vec!["a".into(), "b".into()],
            vec![vec![0.5, 0.6], vec![0.5]]
        )
        .is_err());
        assert!(FoldTable::new(vec![], vec![]).is_err());
    }

    #[test]
    fn fold_table_csv_round_trip() {
        let csv = "model,fold1,fold2,fold3\nalpha,0.9,0.91,0.92\nbeta,0.8,0.81,0.82\n";
        let table = FoldTable::from_csv_str(csv).unwrap();
        assert_eq!(table.models(), &["alpha".to_string(), "beta".to_string()]);
        assert_eq!(table.fold_count(), 3);
        assert_eq!(table.row("beta").unwrap(), &[0.8, 0.81, 0.82]);
        assert!(table.row("gamma").is_none());
        assert!(FoldTable::from_csv_str("model,f1,f2\nx,0.5,oops\n").is_err());
    }

    #[test]
    fn comparison_matrix_structure() {
        let table = fixtures::isic2016_folds();
        let matrix = comparison_matrix(&table).unwrap();
        let n = table.models().len();
        assert_eq!(n, 20);
        for i in 0..n {
            assert_eq!((matrix[i][i].statistic, matrix[i][i].p_value), (0.0, 1.0));
            for j in 0..n {
                assert_eq!(matrix[i][j].statistic, -matrix[j][i].statistic);
                assert_eq!(matrix[i][j].p_value, matrix[j][i].p_value);
            }
        }
    }

    /// The four bundled reference pairs quoted in the acceptance checklist.
    #[test]
    fn reference_pairs_reproduce() {
        let table = fixtures::isic2016_folds();
        let check = |a: &str, b: &str, t: f64, p: f64| {
            let r = ttest(table.row(a).unwrap(), table.row(b).unwrap()).unwrap();
            assert!(
                (r.statistic - t).abs() <= 1e-3,
                "{a} vs {b}: statistic {} vs reference {t}",
                r.statistic
            );
            assert!(
                (r.p_value - p).abs() <= 5e-4,
                "{a} vs {b}: p {} vs reference {p}",
                r.p_value
            );
        };
        check("Xception", "Xception+Wavelet", -4.1328, 0.0032);
        check("Inception", "Inception+Wavelet", -1.9801, 0.0830);
        check("DenseNet", "DenseNet+Wavelet", -0.0705, 0.9454);
        check("MobileNet", "MobileNet+Wavelet", -0.2828, 0.7844);
    }

    /// Families whose bundled matrices are fully self-consistent reproduce
    /// cell for cell.
    #[test]
    fn consistent_families_reproduce_all_cells() {
        let folds = fixtures::isic2016_folds();
        let reference = fixtures::isic2016_reference();
        for family in ["Xception", "MobileNet"] {
            for cell in reference.iter().filter(|c| {
                c.model_a.starts_with(family)
            }) {
                let r = ttest(
                    folds.row(&cell.model_a).unwrap(),
                    folds.row(&cell.model_b).unwrap(),
                )
                .unwrap();
                assert!(
                    (r.statistic - cell.statistic).abs() <= 1e-3,
                    "{} vs {}: statistic {} vs reference {}",
                    cell.model_a,
                    cell.model_b,
                    r.statistic,
                    cell.statistic
                );
                assert!(
                    (r.p_value - cell.p_value).abs() <= 5e-4,
                    "{} vs {}: p {} vs reference {}",
                    cell.model_a,
                    cell.model_b,
                    r.p_value,
                    cell.p_value
                );
            }
        }
    }

    #[test]
    fn select_prefix_extracts_family_block() {
        let folds = fixtures::isic2016_folds();
        let block = folds.select_prefix("DenseNet").unwrap();
        assert_eq!(block.models().len(), 5);
        assert!(block.models().iter().all(|m| m.starts_with("DenseNet")));
    }
}
