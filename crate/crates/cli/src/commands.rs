//! Command implementations: configuration loading, pipeline wiring and
//! atomic file output.

use std::collections::BTreeMap;
use std::fmt;
use std::fs;
use std::path::Path;

use prospect_core::config::PipelineConfig;
use prospect_core::eval::{cross_validate, rank_sector_labels, render_report, sector_ranking_rows};
use prospect_core::features::{ClassLabel, FeatureError};
use prospect_core::ingest::{parse_accounts, parse_transactions, TxSide};
use prospect_core::pipeline::featurize_rows;
use prospect_core::prune::prune_tree_with_report;
use prospect_core::rules::{classify_with_rules, extract_rules, render_rules, RuleError};
use prospect_core::synth;
use prospect_core::table::{dataset_from_table, read_table, write_table, Table};
use prospect_core::tree::{build_tree, render_tree, SplitCriterion, TreeModel, UnseenValuePolicy};

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Data(String),
    Internal(String),
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) | CliError::Data(m) | CliError::Internal(m) => f.write_str(m),
        }
    }
}

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

fn data(msg: impl Into<String>) -> CliError {
    CliError::Data(msg.into())
}

fn internal(msg: impl Into<String>) -> CliError {
    CliError::Internal(msg.into())
}

/// Command-line overrides applied on top of the configuration file.
#[derive(Debug, Default, Clone)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub folds: Option<usize>,
    pub confidence: Option<f64>,
    pub min_leaf: Option<u32>,
    pub criterion: Option<String>,
}

fn load_config(path: Option<&Path>, overrides: &Overrides) -> Result<PipelineConfig, CliError> {
    let mut config = match path {
        Some(p) => {
            let text = fs::read_to_string(p)
                .map_err(|e| usage(format!("cannot read config {}: {e}", p.display())))?;
            PipelineConfig::from_text(&text)
                .map_err(|e| usage(format!("config {}: {e}", p.display())))?
        }
        None => PipelineConfig::default(),
    };
    if let Some(seed) = overrides.seed {
        config.seed = seed;
    }
    if let Some(folds) = overrides.folds {
        if folds < 2 {
            return Err(usage("--folds must be at least 2"));
        }
        config.folds = folds;
    }
    if let Some(confidence) = overrides.confidence {
        config.prune.confidence = confidence;
        config
            .prune
            .validate()
            .map_err(|e| usage(format!("--confidence: {e}")))?;
    }
    if let Some(min_leaf) = overrides.min_leaf {
        if min_leaf == 0 {
            return Err(usage("--min-leaf must be at least 1"));
        }
        config.tree.min_leaf_count = min_leaf;
    }
    if let Some(criterion) = &overrides.criterion {
        config.tree.criterion = match criterion.as_str() {
            "gain-ratio" => SplitCriterion::GainRatio,
            "info-gain" => SplitCriterion::InfoGain,
            other => return Err(usage(format!("unknown criterion {other:?}"))),
        };
    }
    Ok(config)
}

fn ensure_out_dir(out_dir: &Path) -> Result<(), CliError> {
    fs::create_dir_all(out_dir)
        .map_err(|e| internal(format!("cannot create {}: {e}", out_dir.display())))
}

/// Writes via a temp file in the same directory, then renames into place.
fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    let tmp = path.with_extension("tmp");
    fs::write(&tmp, bytes).map_err(|e| internal(format!("cannot write {}: {e}", tmp.display())))?;
    fs::rename(&tmp, path)
        .map_err(|e| internal(format!("cannot move {} into place: {e}", path.display())))
}

fn write_table_atomic(
    path: &Path,
    headers: &[String],
    rows: &[Vec<String>],
    delimiter: u8,
) -> Result<(), CliError> {
    let mut buf = Vec::new();
    write_table(&mut buf, headers, rows, delimiter)
        .map_err(|e| internal(format!("cannot serialize {}: {e}", path.display())))?;
    write_atomic(path, &buf)
}

fn open_input(path: &Path) -> Result<fs::File, CliError> {
    fs::File::open(path).map_err(|e| data(format!("cannot open {}: {e}", path.display())))
}

fn format_amount(v: f64) -> String {
    if v.fract() == 0.0 {
        format!("{v:.0}")
    } else {
        format!("{v}")
    }
}

pub fn synth(
    config_path: Option<&Path>,
    overrides: &Overrides,
    out_dir: &Path,
    accounts: usize,
) -> Result<(), CliError> {
    let config = load_config(config_path, overrides)?;
    let (profiles, transactions) = synth::generate(&config.synth, config.seed, accounts)
        .map_err(|e| usage(e.to_string()))?;
    ensure_out_dir(out_dir)?;

    let account_headers: Vec<String> = [
        "account_no",
        "title",
        "sector",
        "sanction_authority",
        "sanction_limit",
        "disburse_date",
        "status",
    ]
    .iter()
    .map(|s| s.to_string())
    .collect();
    let account_rows: Vec<Vec<String>> = profiles
        .iter()
        .map(|a| {
            vec![
                a.account_no.clone(),
                a.title.clone(),
                a.sector.clone(),
                a.sanction_authority.clone(),
                format_amount(a.sanction_limit),
                a.disburse_date.to_string(),
                a.status.clone(),
            ]
        })
        .collect();
    write_table_atomic(
        &out_dir.join("accounts.csv"),
        &account_headers,
        &account_rows,
        config.delimiter,
    )?;

    let tx_headers: Vec<String> = [
        "account_no",
        "tx_date",
        "tx_type_code",
        "side",
        "amount",
        "system_generated",
        "narrative",
    ]
    .iter()
    .map(|s| s.to_string())
    .collect();
    let tx_rows: Vec<Vec<String>> = transactions
        .iter()
        .map(|t| {
            vec![
                t.account_no.clone(),
                t.tx_date.to_string(),
                t.tx_type_code.to_string(),
                match t.side {
                    TxSide::Debit => "debit".to_string(),
                    TxSide::Credit => "credit".to_string(),
                },
                format_amount(t.amount),
                t.system_generated.to_string(),
                t.narrative.clone().unwrap_or_default(),
            ]
        })
        .collect();
    write_table_atomic(
        &out_dir.join("transactions.csv"),
        &tx_headers,
        &tx_rows,
        config.delimiter,
    )?;

    println!(
        "wrote {} accounts and {} transactions to {}",
        profiles.len(),
        transactions.len(),
        out_dir.display()
    );
    Ok(())
}

pub fn featurize(
    config_path: Option<&Path>,
    overrides: &Overrides,
    out_dir: &Path,
    accounts_path: &Path,
    transactions_path: &Path,
) -> Result<(), CliError> {
    let config = load_config(config_path, overrides)?;
    let accounts = parse_accounts(open_input(accounts_path)?, config.delimiter)
        .map_err(|e| data(format!("{}: {e}", accounts_path.display())))?;
    let transactions = parse_transactions(open_input(transactions_path)?, config.delimiter)
        .map_err(|e| data(format!("{}: {e}", transactions_path.display())))?;

    let outcome = featurize_rows(&accounts, &transactions, &config).map_err(|e| match e {
        FeatureError::InvalidWeights(_) => usage(e.to_string()),
        other => data(other.to_string()),
    })?;
    match &outcome.filter {
        Some((_, report)) => print!("{report}"),
        None => eprintln!("warning: no accounts left after the status and window filters"),
    }

    let table = prospect_core::table::discretized_to_table(&outcome.rows);
    ensure_out_dir(out_dir)?;
    write_table_atomic(
        &out_dir.join("discretized.csv"),
        &table.headers,
        &table.rows,
        config.delimiter,
    )?;
    println!(
        "wrote {} discretized rows to {}",
        outcome.rows.len(),
        out_dir.join("discretized.csv").display()
    );
    Ok(())
}

struct LoadedTable {
    table: Table,
    dataset: prospect_core::tree::Dataset,
}

fn load_dataset(path: &Path, delimiter: u8) -> Result<LoadedTable, CliError> {
    let table = read_table(open_input(path)?, delimiter)
        .map_err(|e| data(format!("{}: {e}", path.display())))?;
    let (dataset, _) =
        dataset_from_table(&table).map_err(|e| data(format!("{}: {e}", path.display())))?;
    Ok(LoadedTable { table, dataset })
}

pub fn train(
    config_path: Option<&Path>,
    overrides: &Overrides,
    out_dir: &Path,
    input: &Path,
) -> Result<(), CliError> {
    let config = load_config(config_path, overrides)?;
    let LoadedTable { dataset, .. } = load_dataset(input, config.delimiter)?;
    let unpruned = build_tree(&dataset, &config.tree).map_err(|e| data(e.to_string()))?;
    let (tree, prune_log) = prune_tree_with_report(&unpruned, &config.prune);
    let rules = extract_rules(&tree);
    let model = TreeModel {
        attributes: dataset.attributes().to_vec(),
        tree: tree.clone(),
        config: config.tree.clone(),
    };

    ensure_out_dir(out_dir)?;
    write_atomic(&out_dir.join("model.json"), model.to_json().as_bytes())?;
    write_atomic(&out_dir.join("tree.txt"), render_tree(&tree).as_bytes())?;
    write_atomic(&out_dir.join("rules.txt"), render_rules(&rules).as_bytes())?;
    let audit: String = prune_log
        .iter()
        .map(|d| {
            format!(
                "{} node on {} (coverage {}): leaf estimate {:.4} vs subtree {:.4}\n",
                if d.replaced { "replaced" } else { "kept" },
                d.attribute,
                d.coverage,
                d.leaf_error,
                d.subtree_error
            )
        })
        .collect();
    write_atomic(&out_dir.join("prune_log.txt"), audit.as_bytes())?;
    println!("Number of Leaves : {}", tree.leaf_count());
    Ok(())
}

pub fn predict(
    config_path: Option<&Path>,
    overrides: &Overrides,
    out_dir: &Path,
    model_path: &Path,
    input: &Path,
) -> Result<(), CliError> {
    let config = load_config(config_path, overrides)?;
    let model_text = fs::read_to_string(model_path)
        .map_err(|e| data(format!("cannot read {}: {e}", model_path.display())))?;
    let model = TreeModel::from_json(&model_text)
        .map_err(|e| data(format!("{}: {e}", model_path.display())))?;
    let table = read_table(open_input(input)?, config.delimiter)
        .map_err(|e| data(format!("{}: {e}", input.display())))?;

    let missing: Vec<&str> = model
        .attributes
        .iter()
        .map(|a| a.name.as_str())
        .filter(|name| table.column(name).is_none())
        .collect();
    if !missing.is_empty() {
        return Err(data(format!(
            "{}: missing model attribute columns: {}",
            input.display(),
            missing.join(", ")
        )));
    }

    let rules = extract_rules(&model.tree);
    let fallback = model.config.unseen_value_policy == UnseenValuePolicy::SubtreeMajority;
    let account_idx = table.column("AccountNo");
    let headers: Vec<String> = ["AccountNo", "Class_Label", "rule_index", "fallback"]
        .iter()
        .map(|s| s.to_string())
        .collect();
    let mut out_rows = Vec::with_capacity(table.rows.len());
    for (row_no, row) in table.rows.iter().enumerate() {
        let values: BTreeMap<String, String> = table
            .headers
            .iter()
            .cloned()
            .zip(row.iter().cloned())
            .collect();
        let matched = classify_with_rules(&rules, &values, fallback).map_err(|e| match e {
            RuleError::NoMatch => data(format!(
                "{}: row {} matches no rule and fallback is disabled",
                input.display(),
                row_no + 2
            )),
            RuleError::Tree(t) => data(format!("{}: row {}: {t}", input.display(), row_no + 2)),
        })?;
        out_rows.push(vec![
            account_idx
                .map(|i| row[i].clone())
                .unwrap_or_else(|| (row_no + 1).to_string()),
            matched.label.to_string(),
            matched
                .rule_index
                .map(|i| (i + 1).to_string())
                .unwrap_or_default(),
            matched.fell_back.to_string(),
        ]);
    }

    ensure_out_dir(out_dir)?;
    write_table_atomic(
        &out_dir.join("predictions.csv"),
        &headers,
        &out_rows,
        config.delimiter,
    )?;
    println!("wrote {} predictions to {}", out_rows.len(), out_dir.join("predictions.csv").display());
    Ok(())
}

pub fn evaluate(
    config_path: Option<&Path>,
    overrides: &Overrides,
    out_dir: &Path,
    input: &Path,
) -> Result<(), CliError> {
    let config = load_config(config_path, overrides)?;
    let LoadedTable { table, dataset } = load_dataset(input, config.delimiter)?;
    let cv = cross_validate(&dataset, config.folds, config.seed, &config.tree, &config.prune)
        .map_err(|e| data(e.to_string()))?;

    ensure_out_dir(out_dir)?;
    write_atomic(&out_dir.join("report.txt"), render_report(&cv).as_bytes())?;

    let metrics = cv.report.metrics_rows();
    let metric_headers = vec!["metric".to_string(), "value".to_string()];
    let metric_rows: Vec<Vec<String>> = metrics
        .into_iter()
        .map(|(k, v)| vec![k, v])
        .collect();
    write_table_atomic(
        &out_dir.join("metrics.csv"),
        &metric_headers,
        &metric_rows,
        config.delimiter,
    )?;

    match (table.column("Sector"), table.column("Class_Label")) {
        (Some(sector_idx), Some(label_idx)) => {
            let pairs: Vec<(String, ClassLabel)> = table
                .rows
                .iter()
                .map(|row| {
                    row[label_idx]
                        .parse::<ClassLabel>()
                        .map(|label| (row[sector_idx].clone(), label))
                })
                .collect::<Result<_, _>>()
                .map_err(|e| data(format!("{}: {e}", input.display())))?;
            let scores = rank_sector_labels(pairs.iter().map(|(s, l)| (s.as_str(), *l)))
                .map_err(|e| data(e.to_string()))?;
            let (headers, rows) = sector_ranking_rows(&scores);
            write_table_atomic(
                &out_dir.join("sector_ranking.csv"),
                &headers,
                &rows,
                config.delimiter,
            )?;
        }
        _ => eprintln!("warning: no Sector column, skipping sector ranking"),
    }

    println!(
        "mean accuracy {:.6} over {} folds; reports in {}",
        cv.report.mean_accuracy,
        cv.report.folds,
        out_dir.display()
    );
    Ok(())
}
