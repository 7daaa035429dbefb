//! Decision-tree induction over categorical attributes with gain-ratio
//! attribute selection.
//!
//! Induction is the classic top-down divide-and-conquer recursion carrying
//! the incoming arc label as a parameter (null at the root). A node becomes
//! a majority-vote leaf when its rows share one class, no candidate
//! attribute remains or is usable, or the chosen split would create a
//! non-empty child smaller than `min_leaf_count`. Declared-but-absent
//! attribute values become empty leaves labelled with the parent majority.

use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::features::ClassLabel;

#[derive(Debug, Error, PartialEq)]
pub enum TreeError {
    #[error("empty dataset")]
    EmptyDataset,
    #[error("empty class distribution")]
    EmptyDistribution,
    #[error("unknown attribute {0:?}")]
    UnknownAttribute(String),
    #[error("value {value:?} not declared for attribute {attribute:?}")]
    UnknownValue { attribute: String, value: String },
    #[error("row has {got} values, dataset has {expected} attributes")]
    RowShape { expected: usize, got: usize },
    #[error("row is missing a value for attribute {0:?}")]
    MissingAttributeValue(String),
    #[error("no arc for value {value:?} of attribute {attribute:?}")]
    UnseenValue { attribute: String, value: String },
}

/// Absolute tolerance for treating two selection scores as tied; ties are
/// broken by candidate list order.
pub const TIE_EPS: f64 = 1e-12;

/// Categorical attribute with its declared, ordered value set.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Attribute {
    pub name: String,
    pub values: Vec<String>,
}

impl Attribute {
    pub fn new(name: impl Into<String>, values: Vec<String>) -> Attribute {
        Attribute {
            name: name.into(),
            values,
        }
    }
}

/// Class counts in [`ClassLabel::ALL`] order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct ClassCounts(pub [u32; 5]);

impl ClassCounts {
    pub fn add(&mut self, label: ClassLabel) {
        self.0[label.index()] += 1;
    }

    pub fn total(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn count(&self, label: ClassLabel) -> u32 {
        self.0[label.index()]
    }

    /// Label with the largest count; ties go to the better label.
    pub fn majority(&self) -> ClassLabel {
        let mut best = ClassLabel::ALL[0];
        for label in ClassLabel::ALL {
            if self.count(label) > self.count(best) {
                best = label;
            }
        }
        best
    }
}

impl FromIterator<(ClassLabel, u32)> for ClassCounts {
    fn from_iter<I: IntoIterator<Item = (ClassLabel, u32)>>(iter: I) -> Self {
        let mut counts = ClassCounts::default();
        for (label, n) in iter {
            counts.0[label.index()] += n;
        }
        counts
    }
}

/// Shannon entropy of a class distribution, in bits.
pub fn entropy(class_counts: &ClassCounts) -> Result<f64, TreeError> {
    let total = class_counts.total();
    if total == 0 {
        return Err(TreeError::EmptyDistribution);
    }
    let total = f64::from(total);
    let mut h = 0.0;
    for &n in &class_counts.0 {
        if n > 0 {
            let p = f64::from(n) / total;
            h -= p * p.log2();
        }
    }
    Ok(h)
}

#[derive(Debug, Clone)]
struct DataRow {
    values: Vec<usize>,
    label: ClassLabel,
}

/// A training set: attribute metadata plus labelled rows. Every row value
/// belongs to its attribute's declared value set.
#[derive(Debug, Clone)]
pub struct Dataset {
    attributes: Vec<Attribute>,
    rows: Vec<DataRow>,
}

impl Dataset {
    /// Builds a dataset against explicitly declared value sets.
    pub fn new(
        attributes: Vec<Attribute>,
        rows: Vec<(Vec<String>, ClassLabel)>,
    ) -> Result<Dataset, TreeError> {
        if attributes.is_empty() {
            return Err(TreeError::EmptyDataset);
        }
        let mut data_rows = Vec::with_capacity(rows.len());
        for (values, label) in rows {
            if values.len() != attributes.len() {
                return Err(TreeError::RowShape {
                    expected: attributes.len(),
                    got: values.len(),
                });
            }
            let mut indices = Vec::with_capacity(values.len());
            for (attr, value) in attributes.iter().zip(&values) {
                let idx = attr.values.iter().position(|v| v == value).ok_or_else(|| {
                    TreeError::UnknownValue {
                        attribute: attr.name.clone(),
                        value: value.clone(),
                    }
                })?;
                indices.push(idx);
            }
            data_rows.push(DataRow {
                values: indices,
                label,
            });
        }
        Ok(Dataset {
            attributes,
            rows: data_rows,
        })
    }

    /// Builds a dataset where each attribute's value set is the order of
    /// first appearance in the rows.
    pub fn from_named_rows(
        attribute_names: &[String],
        rows: &[(Vec<String>, ClassLabel)],
    ) -> Result<Dataset, TreeError> {
        if attribute_names.is_empty() {
            return Err(TreeError::EmptyDataset);
        }
        let mut attributes: Vec<Attribute> = attribute_names
            .iter()
            .map(|n| Attribute::new(n.clone(), Vec::new()))
            .collect();
        for (values, _) in rows {
            if values.len() != attributes.len() {
                return Err(TreeError::RowShape {
                    expected: attributes.len(),
                    got: values.len(),
                });
            }
            for (attr, value) in attributes.iter_mut().zip(values) {
                if !attr.values.iter().any(|v| v == value) {
                    attr.values.push(value.clone());
                }
            }
        }
        Dataset::new(attributes, rows.to_vec())
    }

    pub fn attributes(&self) -> &[Attribute] {
        &self.attributes
    }

    pub fn attribute_index(&self, name: &str) -> Option<usize> {
        self.attributes.iter().position(|a| a.name == name)
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn label(&self, row: usize) -> ClassLabel {
        self.rows[row].label
    }

    pub fn value(&self, row: usize, attribute: usize) -> &str {
        &self.attributes[attribute].values[self.rows[row].values[attribute]]
    }

    /// Keeps the metadata, restricts the rows. Indices must be in range.
    pub fn subset(&self, row_indices: &[usize]) -> Dataset {
        Dataset {
            attributes: self.attributes.clone(),
            rows: row_indices.iter().map(|&i| self.rows[i].clone()).collect(),
        }
    }

    pub fn class_counts(&self) -> ClassCounts {
        let mut counts = ClassCounts::default();
        for row in &self.rows {
            counts.add(row.label);
        }
        counts
    }

    fn counts_for(&self, rows: &[usize]) -> ClassCounts {
        let mut counts = ClassCounts::default();
        for &i in rows {
            counts.add(self.rows[i].label);
        }
        counts
    }

    /// Lookup view over one row for classification.
    pub fn row_view(&self, row: usize) -> BTreeMap<String, String> {
        self.attributes
            .iter()
            .enumerate()
            .map(|(i, a)| (a.name.clone(), self.value(row, i).to_string()))
            .collect()
    }
}

/// Selection statistics for one candidate attribute. `gain_ratio` is `None`
/// when the split information is zero (single present value), which makes
/// the attribute unusable for splitting.
#[derive(Debug, Clone, PartialEq)]
pub struct SplitStats {
    pub attribute: String,
    pub info_gain: f64,
    pub split_info: f64,
    pub gain_ratio: Option<f64>,
}

impl SplitStats {
    pub fn usable(&self) -> bool {
        self.gain_ratio.is_some()
    }
}

fn stats_for(data: &Dataset, rows: &[usize], attribute: usize) -> SplitStats {
    let parent_counts = data.counts_for(rows);
    let parent_entropy = entropy(&parent_counts).unwrap_or(0.0);
    let total = rows.len() as f64;

    let n_values = data.attributes[attribute].values.len();
    let mut partition_counts: Vec<ClassCounts> = vec![ClassCounts::default(); n_values];
    for &i in rows {
        partition_counts[data.rows[i].values[attribute]].add(data.rows[i].label);
    }

    let mut weighted_entropy = 0.0;
    let mut split_info = 0.0;
    let mut present = 0;
    for counts in &partition_counts {
        let size = counts.total();
        if size == 0 {
            continue;
        }
        present += 1;
        let weight = f64::from(size) / total;
        weighted_entropy += weight * entropy(counts).unwrap_or(0.0);
        split_info -= weight * weight.log2();
    }

    let info_gain = (parent_entropy - weighted_entropy).max(0.0);
    let gain_ratio = if present >= 2 && split_info > 0.0 {
        Some(info_gain / split_info)
    } else {
        None
    };
    SplitStats {
        attribute: data.attributes[attribute].name.clone(),
        info_gain,
        split_info: if present >= 2 { split_info } else { 0.0 },
        gain_ratio,
    }
}

/// Gain-ratio statistics of `attribute` over the whole dataset.
pub fn gain_ratio(data: &Dataset, attribute: &str) -> Result<SplitStats, TreeError> {
    let idx = data
        .attribute_index(attribute)
        .ok_or_else(|| TreeError::UnknownAttribute(attribute.to_string()))?;
    let rows: Vec<usize> = (0..data.len()).collect();
    Ok(stats_for(data, &rows, idx))
}

/// Attribute-selection criterion.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SplitCriterion {
    GainRatio,
    InfoGain,
}

/// What classification does at an internal node that has no arc for the
/// row's value (only possible for values outside the declared sets).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum UnseenValuePolicy {
    SubtreeMajority,
    Error,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TreeConfig {
    pub criterion: SplitCriterion,
    pub min_leaf_count: u32,
    /// Gain-ratio safeguard: only candidates whose information gain reaches
    /// the mean gain of the usable candidates compete on ratio.
    pub mean_gain_prefilter: bool,
    pub unseen_value_policy: UnseenValuePolicy,
}

impl Default for TreeConfig {
    fn default() -> Self {
        TreeConfig {
            criterion: SplitCriterion::GainRatio,
            min_leaf_count: 2,
            mean_gain_prefilter: true,
            unseen_value_policy: UnseenValuePolicy::SubtreeMajority,
        }
    }
}

fn select_attribute(
    data: &Dataset,
    rows: &[usize],
    candidates: &[usize],
    config: &TreeConfig,
) -> Option<usize> {
    let stats: Vec<(usize, SplitStats)> = candidates
        .iter()
        .map(|&c| (c, stats_for(data, rows, c)))
        .filter(|(_, s)| s.usable())
        .collect();
    if stats.is_empty() {
        return None;
    }
    match config.criterion {
        SplitCriterion::InfoGain => {
            let mut best: Option<(usize, f64)> = None;
            for (idx, s) in &stats {
                if best.is_none_or(|(_, g)| s.info_gain > g + TIE_EPS) {
                    best = Some((*idx, s.info_gain));
                }
            }
            best.map(|(idx, _)| idx)
        }
        SplitCriterion::GainRatio => {
            let mean_gain: f64 =
                stats.iter().map(|(_, s)| s.info_gain).sum::<f64>() / stats.len() as f64;
            let mut best: Option<(usize, f64)> = None;
            for (idx, s) in &stats {
                if config.mean_gain_prefilter && s.info_gain < mean_gain - TIE_EPS {
                    continue;
                }
                let ratio = s.gain_ratio.expect("usable");
                if best.is_none_or(|(_, r)| ratio > r + TIE_EPS) {
                    best = Some((*idx, ratio));
                }
            }
            best.map(|(idx, _)| idx)
        }
    }
}

/// Picks the splitting attribute among `candidates` over the whole dataset,
/// or `None` when no candidate is usable. Ties go to the earlier candidate.
pub fn choose_attribute(
    data: &Dataset,
    candidates: &[String],
    config: &TreeConfig,
) -> Result<Option<String>, TreeError> {
    let candidate_indices: Vec<usize> = candidates
        .iter()
        .map(|name| {
            data.attribute_index(name)
                .ok_or_else(|| TreeError::UnknownAttribute(name.clone()))
        })
        .collect::<Result<_, _>>()?;
    let rows: Vec<usize> = (0..data.len()).collect();
    Ok(select_attribute(data, &rows, &candidate_indices, config)
        .map(|idx| data.attributes[idx].name.clone()))
}

/// A decision-tree node with its incoming arc label (`None` at the root).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecisionNode {
    pub arc: Option<String>,
    pub kind: NodeKind,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum NodeKind {
    Internal {
        attribute: String,
        children: Vec<DecisionNode>,
    },
    Leaf {
        class: ClassLabel,
        coverage: u32,
        misclassified: u32,
    },
}

impl DecisionNode {
    pub fn is_leaf(&self) -> bool {
        matches!(self.kind, NodeKind::Leaf { .. })
    }

    pub fn leaf_count(&self) -> usize {
        match &self.kind {
            NodeKind::Leaf { .. } => 1,
            NodeKind::Internal { children, .. } => children.iter().map(|c| c.leaf_count()).sum(),
        }
    }

    pub fn depth(&self) -> usize {
        match &self.kind {
            NodeKind::Leaf { .. } => 0,
            NodeKind::Internal { children, .. } => {
                1 + children.iter().map(|c| c.depth()).max().unwrap_or(0)
            }
        }
    }

    /// Training rows under this node.
    pub fn coverage_total(&self) -> u32 {
        match &self.kind {
            NodeKind::Leaf { coverage, .. } => *coverage,
            NodeKind::Internal { children, .. } => {
                children.iter().map(|c| c.coverage_total()).sum()
            }
        }
    }

    /// Per-class correct-prediction mass under this node: each leaf votes
    /// `coverage - misclassified` for its own class.
    pub fn vote_counts(&self) -> ClassCounts {
        match &self.kind {
            NodeKind::Leaf {
                class,
                coverage,
                misclassified,
            } => ClassCounts::from_iter([(*class, coverage - misclassified)]),
            NodeKind::Internal { children, .. } => {
                let mut counts = ClassCounts::default();
                for child in children {
                    let child_counts = child.vote_counts();
                    for (i, n) in child_counts.0.iter().enumerate() {
                        counts.0[i] += n;
                    }
                }
                counts
            }
        }
    }

    /// The class a replacement leaf for this subtree would predict.
    pub fn subtree_majority(&self) -> ClassLabel {
        self.vote_counts().majority()
    }
}

/// Induces a tree from the dataset. Candidate attributes are taken in
/// dataset order; an attribute is used at most once per path.
pub fn build_tree(data: &Dataset, config: &TreeConfig) -> Result<DecisionNode, TreeError> {
    if data.is_empty() || data.attributes.is_empty() {
        return Err(TreeError::EmptyDataset);
    }
    let rows: Vec<usize> = (0..data.len()).collect();
    let candidates: Vec<usize> = (0..data.attributes.len()).collect();
    Ok(generate(data, rows, candidates, None, config))
}

fn majority_leaf(counts: &ClassCounts, arc: Option<String>) -> DecisionNode {
    let class = counts.majority();
    DecisionNode {
        arc,
        kind: NodeKind::Leaf {
            class,
            coverage: counts.total(),
            misclassified: counts.total() - counts.count(class),
        },
    }
}

fn generate(
    data: &Dataset,
    rows: Vec<usize>,
    candidates: Vec<usize>,
    arc: Option<String>,
    config: &TreeConfig,
) -> DecisionNode {
    let counts = data.counts_for(&rows);

    // pure node, or nothing left to split on
    if counts.count(counts.majority()) == counts.total() || candidates.is_empty() {
        return majority_leaf(&counts, arc);
    }
    let Some(attribute) = select_attribute(data, &rows, &candidates, config) else {
        return majority_leaf(&counts, arc);
    };

    let n_values = data.attributes[attribute].values.len();
    let mut partitions: Vec<Vec<usize>> = vec![Vec::new(); n_values];
    for &i in &rows {
        partitions[data.rows[i].values[attribute]].push(i);
    }
    if partitions
        .iter()
        .any(|p| !p.is_empty() && (p.len() as u32) < config.min_leaf_count)
    {
        return majority_leaf(&counts, arc);
    }

    let remaining: Vec<usize> = candidates.into_iter().filter(|&c| c != attribute).collect();
    let children = partitions
        .into_iter()
        .enumerate()
        .map(|(value_idx, partition)| {
            let value = data.attributes[attribute].values[value_idx].clone();
            if partition.is_empty() {
                // declared value absent here: empty leaf with parent majority
                DecisionNode {
                    arc: Some(value),
                    kind: NodeKind::Leaf {
                        class: counts.majority(),
                        coverage: 0,
                        misclassified: 0,
                    },
                }
            } else {
                generate(data, partition, remaining.clone(), Some(value), config)
            }
        })
        .collect();

    DecisionNode {
        arc,
        kind: NodeKind::Internal {
            attribute: data.attributes[attribute].name.clone(),
            children,
        },
    }
}

/// Read access to one row's attribute values during classification.
pub trait RowView {
    fn value_of(&self, attribute: &str) -> Option<&str>;
}

impl RowView for BTreeMap<String, String> {
    fn value_of(&self, attribute: &str) -> Option<&str> {
        self.get(attribute).map(String::as_str)
    }
}

impl RowView for HashMap<String, String> {
    fn value_of(&self, attribute: &str) -> Option<&str> {
        self.get(attribute).map(String::as_str)
    }
}

impl<T: RowView + ?Sized> RowView for &T {
    fn value_of(&self, attribute: &str) -> Option<&str> {
        (**self).value_of(attribute)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Classification {
    pub label: ClassLabel,
    /// Arcs taken from the root, as (attribute, value) pairs.
    pub path: Vec<(String, String)>,
    /// True when an unseen value forced a subtree-majority fallback.
    pub fell_back: bool,
}

/// Follows arcs by the row's values down to a leaf. A value without an arc
/// either yields the subtree-majority class or an error, per the policy.
pub fn classify<R: RowView>(
    tree: &DecisionNode,
    row: R,
    policy: UnseenValuePolicy,
) -> Result<Classification, TreeError> {
    let mut node = tree;
    let mut path = Vec::new();
    loop {
        match &node.kind {
            NodeKind::Leaf { class, .. } => {
                return Ok(Classification {
                    label: *class,
                    path,
                    fell_back: false,
                })
            }
            NodeKind::Internal {
                attribute,
                children,
            } => {
                let value = row
                    .value_of(attribute)
                    .ok_or_else(|| TreeError::MissingAttributeValue(attribute.clone()))?;
                match children.iter().find(|c| c.arc.as_deref() == Some(value)) {
                    Some(child) => {
                        path.push((attribute.clone(), value.to_string()));
                        node = child;
                    }
                    None => {
                        return match policy {
                            UnseenValuePolicy::SubtreeMajority => Ok(Classification {
                                label: node.subtree_majority(),
                                path,
                                fell_back: true,
                            }),
                            UnseenValuePolicy::Error => Err(TreeError::UnseenValue {
                                attribute: attribute.clone(),
                                value: value.to_string(),
                            }),
                        }
                    }
                }
            }
        }
    }
}

fn format_counts(coverage: u32, misclassified: u32) -> String {
    if misclassified == 0 {
        format!("({:.1})", f64::from(coverage))
    } else {
        format!(
            "({:.1}/{:.1})",
            f64::from(coverage),
            f64::from(misclassified)
        )
    }
}

/// Renders the tree as indented text, one line per arc, with a leaf-count
/// footer.
pub fn render_tree(tree: &DecisionNode) -> String {
    let mut out = String::new();
    match &tree.kind {
        NodeKind::Leaf {
            class,
            coverage,
            misclassified,
        } => {
            let _ = writeln!(out, ": {} {}", class, format_counts(*coverage, *misclassified));
        }
        NodeKind::Internal { .. } => render_node(tree, 0, &mut out),
    }
    let _ = write!(out, "\nNumber of Leaves : {}\n", tree.leaf_count());
    out
}

fn render_node(node: &DecisionNode, depth: usize, out: &mut String) {
    let NodeKind::Internal {
        attribute,
        children,
    } = &node.kind
    else {
        return;
    };
    for child in children {
        let arc = child.arc.as_deref().unwrap_or("?");
        for _ in 0..depth {
            out.push_str("| ");
        }
        match &child.kind {
            NodeKind::Leaf {
                class,
                coverage,
                misclassified,
            } => {
                let _ = writeln!(
                    out,
                    "{attribute} = {arc}: {class} {}",
                    format_counts(*coverage, *misclassified)
                );
            }
            NodeKind::Internal { .. } => {
                let _ = writeln!(out, "{attribute} = {arc}");
                render_node(child, depth + 1, out);
            }
        }
    }
}

/// Lossless model container: the tree plus the attribute metadata needed to
/// validate and classify new rows.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TreeModel {
    pub attributes: Vec<Attribute>,
    pub tree: DecisionNode,
    pub config: TreeConfig,
}

impl TreeModel {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("model serializes")
    }

    pub fn from_json(json: &str) -> Result<TreeModel, serde_json::Error> {
        serde_json::from_str(json)
    }
}
