//! IF-THEN rule extraction: one rule per root-to-leaf path, antecedents
//! ANDed in path order, leaf class as the consequent.

use std::fmt::Write as _;

use thiserror::Error;

use crate::features::ClassLabel;
use crate::tree::{ClassCounts, DecisionNode, NodeKind, RowView, TreeError};

#[derive(Debug, Error, PartialEq)]
pub enum RuleError {
    #[error("no rule matches the row and fallback is disabled")]
    NoMatch,
    #[error(transparent)]
    Tree(#[from] TreeError),
}

/// A conjunction of equality tests with a class consequent and the source
/// leaf's training statistics.
#[derive(Debug, Clone, PartialEq)]
pub struct Rule {
    pub antecedents: Vec<(String, String)>,
    pub consequent: ClassLabel,
    pub coverage: u32,
    pub misclassified: u32,
}

impl Rule {
    pub fn matches<R: RowView>(&self, row: &R) -> Result<bool, TreeError> {
        for (attribute, value) in &self.antecedents {
            let actual = row
                .value_of(attribute)
                .ok_or_else(|| TreeError::MissingAttributeValue(attribute.clone()))?;
            if actual != value {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

/// Extracts exactly one rule per leaf, in left-to-right leaf order.
pub fn extract_rules(tree: &DecisionNode) -> Vec<Rule> {
    let mut rules = Vec::new();
    let mut path = Vec::new();
    walk(tree, &mut path, &mut rules);
    rules
}

fn walk(node: &DecisionNode, path: &mut Vec<(String, String)>, rules: &mut Vec<Rule>) {
    match &node.kind {
        NodeKind::Leaf {
            class,
            coverage,
            misclassified,
        } => rules.push(Rule {
            antecedents: path.clone(),
            consequent: *class,
            coverage: *coverage,
            misclassified: *misclassified,
        }),
        NodeKind::Internal {
            attribute,
            children,
        } => {
            for child in children {
                let arc = child.arc.clone().unwrap_or_default();
                path.push((attribute.clone(), arc));
                walk(child, path, rules);
                path.pop();
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RuleMatch {
    pub label: ClassLabel,
    /// Index of the matched rule, `None` when the fallback fired.
    pub rule_index: Option<usize>,
    pub fell_back: bool,
}

/// Majority consequent over the rule set, weighted by each rule's correctly
/// covered rows; ties go to the better label.
fn majority_consequent(rules: &[Rule]) -> ClassLabel {
    let counts: ClassCounts = rules
        .iter()
        .map(|r| (r.consequent, r.coverage - r.misclassified))
        .collect();
    counts.majority()
}

/// Returns the consequent of the first (for tree rules: the unique)
/// matching rule. Rows outside the declared value space match no rule and
/// either fall back to the majority consequent or raise `NoMatch`.
pub fn classify_with_rules<R: RowView>(
    rules: &[Rule],
    row: &R,
    fallback: bool,
) -> Result<RuleMatch, RuleError> {
    for (i, rule) in rules.iter().enumerate() {
        if rule.matches(row)? {
            return Ok(RuleMatch {
                label: rule.consequent,
                rule_index: Some(i),
                fell_back: false,
            });
        }
    }
    if fallback && !rules.is_empty() {
        Ok(RuleMatch {
            label: majority_consequent(rules),
            rule_index: None,
            fell_back: true,
        })
    } else {
        Err(RuleError::NoMatch)
    }
}

/// One line per rule:
/// `IF a = x AND b = y THEN Class_Label = C (coverage/misclassified)`.
pub fn render_rules(rules: &[Rule]) -> String {
    let mut out = String::new();
    for rule in rules {
        out.push_str("IF ");
        if rule.antecedents.is_empty() {
            out.push_str("true");
        } else {
            for (i, (attribute, value)) in rule.antecedents.iter().enumerate() {
                if i > 0 {
                    out.push_str(" AND ");
                }
                let _ = write!(out, "{attribute} = {value}");
            }
        }
        let _ = writeln!(
            out,
            " THEN Class_Label = {} ({}/{})",
            rule.consequent, rule.coverage, rule.misclassified
        );
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::BTreeMap;

    fn leaf(arc: Option<&str>, class: ClassLabel, coverage: u32, misclassified: u32) -> DecisionNode {
        DecisionNode {
            arc: arc.map(str::to_string),
            kind: NodeKind::Leaf {
                class,
                coverage,
                misclassified,
            },
        }
    }

    fn sample_tree() -> DecisionNode {
        DecisionNode {
            arc: None,
            kind: NodeKind::Internal {
                attribute: "maxCrAmount".to_string(),
                children: vec![
                    DecisionNode {
                        arc: Some("Above75".to_string()),
                        kind: NodeKind::Internal {
                            attribute: "Sector".to_string(),
                            children: vec![
                                leaf(Some("RetailTraders"), ClassLabel::VeryGood, 1, 0),
                                leaf(Some("Other"), ClassLabel::Bad, 3, 2),
                            ],
                        },
                    },
                    leaf(Some("LessEqual75"), ClassLabel::Excellent, 7, 2),
                ],
            },
        }
    }

    fn row(pairs: &[(&str, &str)]) -> BTreeMap<String, String> {
        pairs
            .iter()
            .map(|(k, v)| (k.to_string(), v.to_string()))
            .collect()
    }

    #[test]
    fn one_rule_per_leaf_in_arc_order() {
        let rules = extract_rules(&sample_tree());
        assert_eq!(rules.len(), 3);
        assert_eq!(
            rules[0].antecedents,
            vec![
                ("maxCrAmount".to_string(), "Above75".to_string()),
                ("Sector".to_string(), "RetailTraders".to_string()),
            ]
        );
        assert_eq!(rules[0].consequent, ClassLabel::VeryGood);
        assert_eq!(rules[2].antecedents.len(), 1);
        assert_eq!(rules[2].consequent, ClassLabel::Excellent);
        assert_eq!((rules[2].coverage, rules[2].misclassified), (7, 2));
    }

    #[test]
    fn single_leaf_gives_empty_antecedent_rule() {
        let tree = leaf(None, ClassLabel::Good, 4, 0);
        let rules = extract_rules(&tree);
        assert_eq!(rules.len(), 1);
        assert!(rules[0].antecedents.is_empty());
        assert_eq!(
            render_rules(&rules),
            "IF true THEN Class_Label = Good (4/0)\n"
        );
    }

    #[test]
    fn classification_matches_unique_rule() {
        let rules = extract_rules(&sample_tree());
        let m = classify_with_rules(
            &rules,
            &row(&[("maxCrAmount", "Above75"), ("Sector", "RetailTraders")]),
            true,
        )
        .unwrap();
        assert_eq!(m.label, ClassLabel::VeryGood);
        assert_eq!(m.rule_index, Some(0));
        assert!(!m.fell_back);
    }

    #[test]
    fn any_row_matches_a_single_rule_list() {
        let rules = extract_rules(&leaf(None, ClassLabel::Marginal, 2, 0));
        let m = classify_with_rules(&rules, &row(&[]), false).unwrap();
        assert_eq!(m.label, ClassLabel::Marginal);
    }

    #[test]
    fn undeclared_value_without_fallback_is_no_match() {
        let rules = extract_rules(&sample_tree());
        let unseen = row(&[("maxCrAmount", "SomethingElse"), ("Sector", "Other")]);
        assert_eq!(
            classify_with_rules(&rules, &unseen, false).unwrap_err(),
            RuleError::NoMatch
        );
        let fallback = classify_with_rules(&rules, &unseen, true).unwrap();
        assert!(fallback.fell_back);
        assert_eq!(fallback.rule_index, None);
        // votes: VeryGood 1, Bad 1, Excellent 5
        assert_eq!(fallback.label, ClassLabel::Excellent);
    }

    #[test]
    fn rendering_matches_grammar() {
        let rules = extract_rules(&sample_tree());
        let text = render_rules(&rules);
        assert_eq!(
            text.lines().next().unwrap(),
            "IF maxCrAmount = Above75 AND Sector = RetailTraders THEN Class_Label = Very Good (1/0)"
        );
        assert_eq!(text.lines().count(), 3);
        assert_eq!(render_rules(&[]), "");
    }

    #[test]
    fn rule_count_equals_leaf_count() {
        let tree = sample_tree();
        assert_eq!(extract_rules(&tree).len(), tree.leaf_count());
    }
}
