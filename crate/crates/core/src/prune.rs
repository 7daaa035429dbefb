//! Pessimistic post-pruning with subtree replacement.
//!
//! Children are pruned first; a subtree is then replaced by its
//! majority-class leaf whenever the leaf's pessimistic error estimate does
//! not exceed the children's summed estimates plus a small slack. The
//! estimate inflates the observed leaf error to the upper confidence bound
//! of the binomial error rate.

use thiserror::Error;

use crate::tree::{ClassCounts, DecisionNode, NodeKind};

#[derive(Debug, Error, PartialEq)]
pub enum PruneError {
    #[error("invalid counts: coverage {coverage}, misclassified {misclassified}")]
    InvalidCounts { coverage: u32, misclassified: u32 },
    #[error("confidence must be in (0, 0.5], got {0}")]
    InvalidConfidence(f64),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PruneConfig {
    /// Confidence for the binomial upper bound, in (0, 0.5].
    pub confidence: f64,
    pub enabled: bool,
    /// Additive slack on the replacement comparison.
    pub slack: f64,
}

impl Default for PruneConfig {
    fn default() -> Self {
        PruneConfig {
            confidence: 0.25,
            enabled: true,
            slack: 0.1,
        }
    }
}

impl PruneConfig {
    pub fn validate(&self) -> Result<(), PruneError> {
        if !(self.confidence > 0.0 && self.confidence <= 0.5) {
            return Err(PruneError::InvalidConfidence(self.confidence));
        }
        Ok(())
    }
}

/// Inverse standard normal CDF (Acklam's rational approximation, relative
/// error below 1.2e-9 over (0, 1)).
#[allow(clippy::excessive_precision)]
fn normal_quantile(p: f64) -> f64 {
    debug_assert!(p > 0.0 && p < 1.0);
    const A: [f64; 6] = [
        -3.969683028665376e+01,
        2.209460984245205e+02,
        -2.759285104469687e+02,
        1.383577518672690e+02,
        -3.066479806614716e+01,
        2.506628277459239e+00,
    ];
    const B: [f64; 5] = [
        -5.447609879822406e+01,
        1.615858368580409e+02,
        -1.556989798598866e+02,
        6.680131188771972e+01,
        -1.328068155288572e+01,
    ];
    const C: [f64; 6] = [
        -7.784894002430293e-03,
        -3.223964580411365e-01,
        -2.400758277161838e+00,
        -2.549732539343734e+00,
        4.374664141464968e+00,
        2.938163982698783e+00,
    ];
    const D: [f64; 4] = [
        7.784695709041462e-03,
        3.224671290700398e-01,
        2.445134137142996e+00,
        3.754408661907416e+00,
    ];
    const P_LOW: f64 = 0.02425;

    if p < P_LOW {
        let q = (-2.0 * p.ln()).sqrt();
        (((((C[0] * q + C[1]) * q + C[2]) * q + C[3]) * q + C[4]) * q + C[5])
            / ((((D[0] * q + D[1]) * q + D[2]) * q + D[3]) * q + 1.0)
    } else if p <= 1.0 - P_LOW {
        let q = p - 0.5;
        let r = q * q;
        (((((A[0] * r + A[1]) * r + A[2]) * r + A[3]) * r + A[4]) * r + A[5]) * q
            / (((((B[0] * r + B[1]) * r + B[2]) * r + B[3]) * r + B[4]) * r + 1.0)
    } else {
        let q = (-2.0 * (1.0 - p).ln()).sqrt();
        -(((((C[0] * q + C[1]) * q + C[2]) * q + C[3]) * q + C[4]) * q + C[5])
            / ((((D[0] * q + D[1]) * q + D[2]) * q + D[3]) * q + 1.0)
    }
}

/// Upper confidence bound on the expected error count of a leaf that covers
/// `coverage` rows and misclassifies `misclassified` of them.
///
/// A clean leaf uses the exact closed form `n * (1 - confidence^(1/n))`;
/// otherwise the bound inverts the normal approximation of the binomial at
/// the observed rate `f = m/n`, with the result clamped into
/// `[misclassified, coverage]`.
pub fn pessimistic_error(
    coverage: u32,
    misclassified: u32,
    confidence: f64,
) -> Result<f64, PruneError> {
    if coverage < 1 || misclassified > coverage {
        return Err(PruneError::InvalidCounts {
            coverage,
            misclassified,
        });
    }
    if !(confidence > 0.0 && confidence <= 0.5) {
        return Err(PruneError::InvalidConfidence(confidence));
    }
    let n = f64::from(coverage);
    if misclassified == 0 {
        return Ok(n * (1.0 - confidence.powf(1.0 / n)));
    }
    let m = f64::from(misclassified);
    let f = m / n;
    let z = normal_quantile(1.0 - confidence);
    let z2 = z * z;
    let bound = (f + z2 / (2.0 * n) + z * (f / n - f * f / n + z2 / (4.0 * n * n)).sqrt())
        / (1.0 + z2 / n);
    Ok((n * bound).clamp(m, n))
}

/// One replacement decision, for the audit log.
#[derive(Debug, Clone, PartialEq)]
pub struct PruneDecision {
    pub attribute: String,
    pub coverage: u32,
    pub leaf_error: f64,
    pub subtree_error: f64,
    pub replaced: bool,
}

/// Pessimistic error mass of an already-pruned subtree: the sum over its
/// leaves, empty leaves contributing nothing.
fn subtree_error(node: &DecisionNode, confidence: f64) -> f64 {
    match &node.kind {
        NodeKind::Leaf {
            coverage,
            misclassified,
            ..
        } => {
            if *coverage == 0 {
                0.0
            } else {
                pessimistic_error(*coverage, *misclassified, confidence)
                    .expect("valid leaf counts")
            }
        }
        NodeKind::Internal { children, .. } => {
            children.iter().map(|c| subtree_error(c, confidence)).sum()
        }
    }
}

fn prune_node(
    node: &DecisionNode,
    config: &PruneConfig,
    log: &mut Vec<PruneDecision>,
) -> DecisionNode {
    let NodeKind::Internal {
        attribute,
        children,
    } = &node.kind
    else {
        return node.clone();
    };

    let pruned_children: Vec<DecisionNode> =
        children.iter().map(|c| prune_node(c, config, log)).collect();
    let candidate = DecisionNode {
        arc: node.arc.clone(),
        kind: NodeKind::Internal {
            attribute: attribute.clone(),
            children: pruned_children,
        },
    };

    let votes: ClassCounts = candidate.vote_counts();
    let coverage = candidate.coverage_total();
    if coverage == 0 {
        return candidate;
    }
    let majority = votes.majority();
    let replacement_misclassified = coverage - votes.count(majority);
    let leaf_error = pessimistic_error(coverage, replacement_misclassified, config.confidence)
        .expect("valid aggregated counts");
    let children_error = subtree_error(&candidate, config.confidence);
    let replaced = leaf_error <= children_error + config.slack;
    log.push(PruneDecision {
        attribute: attribute.clone(),
        coverage,
        leaf_error,
        subtree_error: children_error,
        replaced,
    });
    if replaced {
        DecisionNode {
            arc: node.arc.clone(),
            kind: NodeKind::Leaf {
                class: majority,
                coverage,
                misclassified: replacement_misclassified,
            },
        }
    } else {
        candidate
    }
}

/// Bottom-up subtree replacement. The input tree is untouched; the returned
/// tree aggregates training counts at every replaced leaf.
pub fn prune_tree(tree: &DecisionNode, config: &PruneConfig) -> DecisionNode {
    prune_tree_with_report(tree, config).0
}

/// Like [`prune_tree`], also returning one decision record per internal
/// node visited.
pub fn prune_tree_with_report(
    tree: &DecisionNode,
    config: &PruneConfig,
) -> (DecisionNode, Vec<PruneDecision>) {
    config.validate().expect("valid prune config");
    if !config.enabled {
        return (tree.clone(), Vec::new());
    }
    let mut log = Vec::new();
    let pruned = prune_node(tree, config, &mut log);
    (pruned, log)
}
