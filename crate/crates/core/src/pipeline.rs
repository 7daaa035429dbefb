//! End-to-end featurization: the staged file pipeline and in-process calls
//! share this path, so composing stages through files cannot drift from a
//! direct invocation.

use crate::config::PipelineConfig;
use crate::features::{
    aggregate_all, assign_class_label, component_scores, compute_score, discretize_row,
    statistical_filter, DiscretizedRow, FeatureError, FilterReport, RawFeatureRow,
};
use crate::ingest::{
    apply_narrative_blocklist, filter_transactions, select_active_window, AccountProfile,
    TransactionRecord, WindowSpec,
};

#[derive(Debug)]
pub struct FeaturizeOutcome {
    pub rows: Vec<DiscretizedRow>,
    pub raw_rows: Vec<RawFeatureRow>,
    /// Retained columns plus the filter report; `None` when no account
    /// survived the status and window filters.
    pub filter: Option<(Vec<String>, FilterReport)>,
}

/// Applies the ingest filters, aggregates each surviving account over its
/// own observation window, scores it, and discretizes the result. Rows come
/// back ordered by account number.
pub fn featurize_rows(
    accounts: &[AccountProfile],
    transactions: &[TransactionRecord],
    config: &PipelineConfig,
) -> Result<FeaturizeOutcome, FeatureError> {
    let active = select_active_window(accounts, config.disburse_window);
    let in_window = filter_transactions(transactions, &config.allowed_codes, config.tx_window);
    let customer_txs = apply_narrative_blocklist(&in_window, &config.narrative_blocklist);

    // each account only sees its own observation window
    let mut scoped: Vec<TransactionRecord> = Vec::new();
    for account in &active {
        let window = WindowSpec::observation(account.disburse_date, config.window_months);
        scoped.extend(
            customer_txs
                .iter()
                .filter(|t| t.account_no == account.account_no && window.contains(t.tx_date))
                .cloned(),
        );
    }

    let raw_rows = aggregate_all(&scoped, &active, config.window_months)?;

    let mut rows = Vec::with_capacity(raw_rows.len());
    for raw in &raw_rows {
        let account = active
            .iter()
            .find(|a| a.account_no == raw.account_no)
            .expect("aggregated row has a profile");
        let score = match account.expert_score {
            Some(score) => score,
            None => {
                let components = component_scores(raw, account.sanction_limit)?;
                compute_score(&components, &config.score_weights)?
            }
        };
        let label = assign_class_label(score)?;
        rows.push(discretize_row(
            raw,
            account.sanction_limit,
            &config.schemes,
            label,
        )?);
    }

    let filter = if raw_rows.is_empty() {
        None
    } else {
        Some(statistical_filter(&raw_rows, config.null_fraction_threshold)?)
    };
    Ok(FeaturizeOutcome {
        rows,
        raw_rows,
        filter,
    })
}
