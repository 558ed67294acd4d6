//! Bundled five-fold accuracy tables (20 transfer-learning model variants on
//! two dermoscopy benchmarks) and the published pairwise t-test matrix they
//! are checked against.
//!
//! The tables are embedded at compile time; the loaders panic only if the
//! bundled data itself were corrupted, which the test suite would catch.

use super::FoldTable;

const ISIC2016_FOLDS_CSV: &str = include_str!("../../fixtures/isic2016_folds.csv");
const ISIC2017_FOLDS_CSV: &str = include_str!("../../fixtures/isic2017_folds.csv");
const ISIC2016_REFERENCE_CSV: &str =
    include_str!("../../fixtures/isic2016_reference_ttests.csv");

/// One published t-test cell: model pair, statistic, two-sided p-value.
#[derive(Clone, Debug, PartialEq)]
pub struct ReferenceCell {
    pub model_a: String,
    pub model_b: String,
    pub statistic: f64,
    pub p_value: f64,
}

/// Five-fold accuracies for all 20 model variants on the 2016 benchmark.
pub fn isic2016_folds() -> FoldTable {
    FoldTable::from_csv_str(ISIC2016_FOLDS_CSV).expect("bundled 2016 fold table is valid")
}

/// Five-fold accuracies for all 20 model variants on the 2017 benchmark.
pub fn isic2017_folds() -> FoldTable {
    FoldTable::from_csv_str(ISIC2017_FOLDS_CSV).expect("bundled 2017 fold table is valid")
}

/// The 40 published upper-triangle t-test cells (4 families × 10 pairs) for
/// the 2016 benchmark.
pub fn isic2016_reference() -> Vec<ReferenceCell> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_reader(ISIC2016_REFERENCE_CSV.as_bytes());
    reader
        .records()
        .map(|record| {
            let record = record.expect("bundled reference table is valid");
            ReferenceCell {
                model_a: record[0].to_string(),
                model_b: record[1].to_string(),
                statistic: record[2].parse().expect("bundled statistic parses"),
                p_value: record[3].parse().expect("bundled p-value parses"),
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bundled_tables_load() {
        let t16 = isic2016_folds();
        let t17 = isic2017_folds();
        assert_eq!(t16.models().len(), 20);
        assert_eq!(t17.models().len(), 20);
        assert_eq!(t16.fold_count(), 5);
        assert_eq!(t17.fold_count(), 5);
        assert_eq!(t16.models(), t17.models());
    }

    #[test]
    fn reference_table_covers_four_families() {
        let cells = isic2016_reference();
        assert_eq!(cells.len(), 40);
        for family in ["Xception", "Inception", "DenseNet", "MobileNet"] {
            let count = cells
                .iter()
                .filter(|c| {
                    c.model_a.starts_with(family) && c.model_b.starts_with(family)
                })
                .count();
            assert_eq!(count, 10, "family {family}");
        }
        for cell in &cells {
            assert!(cell.statistic.is_finite());
            assert!((0.0..=1.0).contains(&cell.p_value));
        }
    }
}
