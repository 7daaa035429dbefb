//! Stratified k-fold cross-validation, confusion matrices and the
//! prospective-sector ranking.

use std::collections::BTreeMap;
use std::fmt;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::features::{ClassLabel, DiscretizedRow};
use crate::prune::{prune_tree, PruneConfig};
use crate::rules::{extract_rules, Rule};
use crate::tree::{build_tree, classify, ClassCounts, Dataset, DecisionNode, TreeConfig, TreeError};

#[derive(Debug, Error, PartialEq)]
pub enum EvalError {
    #[error("need at least {k} rows for {k} folds, got {rows}")]
    TooFewRows { rows: usize, k: usize },
    #[error("fold count must be at least 2, got {0}")]
    InvalidFolds(usize),
    #[error("empty dataset")]
    EmptyDataset,
    #[error(transparent)]
    Tree(#[from] TreeError),
}

/// 5x5 counts indexed by (actual, predicted) in [`ClassLabel::ALL`] order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct ConfusionMatrix(pub [[u32; 5]; 5]);

impl ConfusionMatrix {
    pub fn add(&mut self, actual: ClassLabel, predicted: ClassLabel) {
        self.0[actual.index()][predicted.index()] += 1;
    }

    pub fn merge(&mut self, other: &ConfusionMatrix) {
        for (row, other_row) in self.0.iter_mut().zip(&other.0) {
            for (cell, o) in row.iter_mut().zip(other_row) {
                *cell += o;
            }
        }
    }

    pub fn total(&self) -> u32 {
        self.0.iter().flatten().sum()
    }

    pub fn correct(&self) -> u32 {
        (0..5).map(|i| self.0[i][i]).sum()
    }

    pub fn accuracy(&self) -> f64 {
        let total = self.total();
        if total == 0 {
            0.0
        } else {
            f64::from(self.correct()) / f64::from(total)
        }
    }
}

impl fmt::Display for ConfusionMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:<18}", "actual \\ predicted")?;
        for label in ClassLabel::ALL {
            write!(f, "{:>11}", label.to_string())?;
        }
        writeln!(f)?;
        for actual in ClassLabel::ALL {
            write!(f, "{:<18}", actual.to_string())?;
            for predicted in ClassLabel::ALL {
                write!(f, "{:>11}", self.0[actual.index()][predicted.index()])?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

/// One cross-validation split: row indices for training and held-out rows.
pub type FoldSplit = (Vec<usize>, Vec<usize>);

/// Deterministic stratified folds: per-class row counts across folds differ
/// by at most one, as do total fold sizes. Returns (train, test) index
/// pairs; test folds are disjoint and cover the dataset.
pub fn stratified_kfold(data: &Dataset, k: usize, seed: u64) -> Result<Vec<FoldSplit>, EvalError> {
    if k < 2 {
        return Err(EvalError::InvalidFolds(k));
    }
    if data.len() < k {
        return Err(EvalError::TooFewRows { rows: data.len(), k });
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut by_class: Vec<Vec<usize>> = vec![Vec::new(); ClassLabel::ALL.len()];
    for i in 0..data.len() {
        by_class[data.label(i).index()].push(i);
    }

    // continuous round-robin deal across the shuffled class groups keeps
    // both the per-class and the total fold sizes within one of each other
    let mut test_folds: Vec<Vec<usize>> = vec![Vec::new(); k];
    let mut cursor = 0usize;
    for group in &mut by_class {
        group.shuffle(&mut rng);
        for &row in group.iter() {
            test_folds[cursor].push(row);
            cursor = (cursor + 1) % k;
        }
    }

    Ok(test_folds
        .into_iter()
        .map(|mut test| {
            test.sort_unstable();
            let train: Vec<usize> = (0..data.len()).filter(|i| !test.contains(i)).collect();
            (train, test)
        })
        .collect())
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvaluationReport {
    pub folds: usize,
    pub seed: u64,
    pub fold_accuracies: Vec<f64>,
    pub mean_accuracy: f64,
    pub pooled: ConfusionMatrix,
    pub leaf_count: usize,
    pub tree_depth: usize,
    pub rules_count: usize,
}

impl EvaluationReport {
    /// Key/value rows for the delimited metrics table.
    pub fn metrics_rows(&self) -> Vec<(String, String)> {
        let mut rows = vec![
            ("folds".to_string(), self.folds.to_string()),
            ("seed".to_string(), self.seed.to_string()),
            ("mean_accuracy".to_string(), format!("{:.6}", self.mean_accuracy)),
            (
                "pooled_accuracy".to_string(),
                format!("{:.6}", self.pooled.accuracy()),
            ),
            ("rows".to_string(), self.pooled.total().to_string()),
            ("leaf_count".to_string(), self.leaf_count.to_string()),
            ("tree_depth".to_string(), self.tree_depth.to_string()),
            ("rules_count".to_string(), self.rules_count.to_string()),
        ];
        for (i, acc) in self.fold_accuracies.iter().enumerate() {
            rows.push((format!("fold_{}_accuracy", i + 1), format!("{acc:.6}")));
        }
        rows
    }
}

/// Cross-validation outcome: the report plus the final model induced on the
/// full dataset.
#[derive(Debug, Clone, PartialEq)]
pub struct CrossValidation {
    pub report: EvaluationReport,
    pub final_tree: DecisionNode,
    pub final_rules: Vec<Rule>,
}

/// Builds and prunes a tree per fold, classifies the held-out rows, and
/// aggregates fold accuracies plus the pooled confusion matrix.
pub fn cross_validate(
    data: &Dataset,
    k: usize,
    seed: u64,
    tree_config: &TreeConfig,
    prune_config: &PruneConfig,
) -> Result<CrossValidation, EvalError> {
    let folds = stratified_kfold(data, k, seed)?;
    let mut pooled = ConfusionMatrix::default();
    let mut fold_accuracies = Vec::with_capacity(k);
    for (train, test) in &folds {
        let train_data = data.subset(train);
        let tree = prune_tree(&build_tree(&train_data, tree_config)?, prune_config);
        let mut correct = 0u32;
        for &row in test {
            let actual = data.label(row);
            let predicted = classify(&tree, data.row_view(row), tree_config.unseen_value_policy)?;
            pooled.add(actual, predicted.label);
            if predicted.label == actual {
                correct += 1;
            }
        }
        fold_accuracies.push(f64::from(correct) / test.len() as f64);
    }
    let mean_accuracy = fold_accuracies.iter().sum::<f64>() / fold_accuracies.len() as f64;

    let final_tree = prune_tree(&build_tree(data, tree_config)?, prune_config);
    let final_rules = extract_rules(&final_tree);
    Ok(CrossValidation {
        report: EvaluationReport {
            folds: k,
            seed,
            fold_accuracies,
            mean_accuracy,
            pooled,
            leaf_count: final_tree.leaf_count(),
            tree_depth: final_tree.depth(),
            rules_count: final_rules.len(),
        },
        final_tree,
        final_rules,
    })
}

/// One sector's aggregated class distribution and ordinal score.
#[derive(Debug, Clone, PartialEq)]
pub struct SectorScore {
    pub rank: usize,
    pub sector: String,
    pub rows: u32,
    pub counts: ClassCounts,
    /// Mean of the label ranks (Excellent = 5 down to Bad = 1).
    pub mean_label_rank: f64,
}

/// Orders sectors by mean label rank, best first. Ties break on the share
/// of Excellent rows, then alphabetically.
pub fn rank_sectors(rows: &[DiscretizedRow]) -> Result<Vec<SectorScore>, EvalError> {
    rank_sector_labels(rows.iter().map(|r| (r.sector.as_str(), r.class_label)))
}

/// [`rank_sectors`] over bare (sector, label) pairs.
pub fn rank_sector_labels<'a, I>(items: I) -> Result<Vec<SectorScore>, EvalError>
where
    I: IntoIterator<Item = (&'a str, ClassLabel)>,
{
    let mut by_sector: BTreeMap<&str, ClassCounts> = BTreeMap::new();
    for (sector, label) in items {
        by_sector.entry(sector).or_default().add(label);
    }
    if by_sector.is_empty() {
        return Err(EvalError::EmptyDataset);
    }
    let mut scores: Vec<SectorScore> = by_sector
        .into_iter()
        .map(|(sector, counts)| {
            let total = counts.total();
            let rank_sum: u32 = ClassLabel::ALL
                .iter()
                .map(|&l| counts.count(l) * l.rank())
                .sum();
            SectorScore {
                rank: 0,
                sector: sector.to_string(),
                rows: total,
                counts,
                mean_label_rank: f64::from(rank_sum) / f64::from(total),
            }
        })
        .collect();
    scores.sort_by(|a, b| {
        b.mean_label_rank
            .total_cmp(&a.mean_label_rank)
            .then_with(|| {
                let ex_a = f64::from(a.counts.count(ClassLabel::Excellent)) / f64::from(a.rows);
                let ex_b = f64::from(b.counts.count(ClassLabel::Excellent)) / f64::from(b.rows);
                ex_b.total_cmp(&ex_a)
            })
            .then_with(|| a.sector.cmp(&b.sector))
    });
    for (i, score) in scores.iter_mut().enumerate() {
        score.rank = i + 1;
    }
    Ok(scores)
}

/// Sector-ranking rows for the delimited table.
pub fn sector_ranking_rows(scores: &[SectorScore]) -> (Vec<String>, Vec<Vec<String>>) {
    let headers = vec![
        "rank".to_string(),
        "sector".to_string(),
        "rows".to_string(),
        "mean_label_rank".to_string(),
        "excellent".to_string(),
        "very_good".to_string(),
        "good".to_string(),
        "marginal".to_string(),
        "bad".to_string(),
    ];
    let rows = scores
        .iter()
        .map(|s| {
            let mut row = vec![
                s.rank.to_string(),
                s.sector.clone(),
                s.rows.to_string(),
                format!("{:.4}", s.mean_label_rank),
            ];
            row.extend(ClassLabel::ALL.iter().map(|&l| s.counts.count(l).to_string()));
            row
        })
        .collect();
    (headers, rows)
}

/// Plain-text evaluation report: the final tree in its rendered form, the
/// per-fold accuracy block and the pooled confusion matrix.
pub fn render_report(cv: &CrossValidation) -> String {
    let mut out = String::new();
    out.push_str("=== Pruned decision tree (all rows) ===\n\n");
    out.push_str(&crate::tree::render_tree(&cv.final_tree));
    out.push_str(&format!("Size of the tree : {}\n", tree_size(&cv.final_tree)));
    out.push_str(&format!(
        "\n=== Stratified cross-validation (folds={}, seed={}) ===\n\n",
        cv.report.folds, cv.report.seed
    ));
    for (i, acc) in cv.report.fold_accuracies.iter().enumerate() {
        out.push_str(&format!("fold {:>2}: accuracy {:.6}\n", i + 1, acc));
    }
    out.push_str(&format!("mean accuracy: {:.6}\n", cv.report.mean_accuracy));
    out.push_str(&format!(
        "pooled accuracy: {:.6} ({} of {} rows)\n",
        cv.report.pooled.accuracy(),
        cv.report.pooled.correct(),
        cv.report.pooled.total()
    ));
    out.push_str("\n=== Pooled confusion matrix ===\n\n");
    out.push_str(&cv.report.pooled.to_string());
    out
}

fn tree_size(node: &DecisionNode) -> usize {
    match &node.kind {
        crate::tree::NodeKind::Leaf { .. } => 1,
        crate::tree::NodeKind::Internal { children, .. } => {
            1 + children.iter().map(tree_size).sum::<usize>()
        }
    }
}
