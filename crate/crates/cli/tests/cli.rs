//! Command-level tests: exit codes, diagnostics, file round-trips, and the
//! staged-vs-in-process pipeline equivalence.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use prospect_core::config::PipelineConfig;
use prospect_core::ingest::{parse_accounts, parse_transactions};
use prospect_core::pipeline::featurize_rows;
use prospect_core::prune::prune_tree;
use prospect_core::table::{dataset_from_table, discretized_to_table};
use prospect_core::tree::{build_tree, TreeModel};

fn prospect(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_prospect"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn assert_code(out: &Output, code: i32, context: &str) {
    assert_eq!(
        out.status.code(),
        Some(code),
        "{context}: stdout={} stderr={}",
        String::from_utf8_lossy(&out.stdout),
        String::from_utf8_lossy(&out.stderr)
    );
}

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/data").join(name)
}

fn synth_inputs(dir: &Path, seed: &str, n: &str) -> (String, String) {
    let out = prospect(&[
        "synth",
        "--out-dir",
        dir.to_str().unwrap(),
        "--seed",
        seed,
        "--accounts",
        n,
    ]);
    assert_code(&out, 0, "synth");
    (
        dir.join("accounts.csv").to_str().unwrap().to_string(),
        dir.join("transactions.csv").to_str().unwrap().to_string(),
    )
}

#[test]
fn full_pipeline_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let (accounts, transactions) = synth_inputs(dir.path(), "3", "80");

    let out_dir = dir.path().to_str().unwrap();
    let out = prospect(&[
        "featurize",
        "--accounts",
        &accounts,
        "--transactions",
        &transactions,
        "--out-dir",
        out_dir,
    ]);
    assert_code(&out, 0, "featurize");
    let discretized = dir.path().join("discretized.csv");
    let header = fs::read_to_string(&discretized).unwrap();
    assert!(header.starts_with(
        "AccountNo,Sector,SanctionAuthor,minDrAmount,maxDrAmount,totalDrAmount,drVoucherNo,\
         minCrAmount,maxCrAmount,totalCrAmount,crVoucherNo,PrincipalAmount,adjustNo,Class_Label"
    ));

    let out = prospect(&[
        "train",
        "--input",
        discretized.to_str().unwrap(),
        "--out-dir",
        out_dir,
    ]);
    assert_code(&out, 0, "train");
    assert!(String::from_utf8_lossy(&out.stdout).contains("Number of Leaves :"));
    for file in ["model.json", "tree.txt", "rules.txt"] {
        assert!(dir.path().join(file).exists(), "missing {file}");
    }

    // trained model classifies its own training table
    let out = prospect(&[
        "predict",
        "--model",
        dir.path().join("model.json").to_str().unwrap(),
        "--input",
        discretized.to_str().unwrap(),
        "--out-dir",
        out_dir,
    ]);
    assert_code(&out, 0, "predict");
    let predictions = fs::read_to_string(dir.path().join("predictions.csv")).unwrap();
    let rows = fs::read_to_string(&discretized).unwrap().lines().count() - 1;
    assert_eq!(predictions.lines().count() - 1, rows);

    let out = prospect(&[
        "evaluate",
        "--input",
        discretized.to_str().unwrap(),
        "--out-dir",
        out_dir,
        "--folds",
        "5",
    ]);
    assert_code(&out, 0, "evaluate");
    for file in ["report.txt", "metrics.csv", "sector_ranking.csv"] {
        assert!(dir.path().join(file).exists(), "missing {file}");
    }
}

#[test]
fn staged_pipeline_matches_in_process_featurization() {
    let dir = tempfile::tempdir().unwrap();
    let (accounts_path, transactions_path) = synth_inputs(dir.path(), "17", "60");
    let out = prospect(&[
        "featurize",
        "--accounts",
        &accounts_path,
        "--transactions",
        &transactions_path,
        "--out-dir",
        dir.path().to_str().unwrap(),
    ]);
    assert_code(&out, 0, "featurize");
    let staged = fs::read_to_string(dir.path().join("discretized.csv")).unwrap();

    // same result straight through the library, no intermediate files
    let config = PipelineConfig::default();
    let accounts = parse_accounts(fs::File::open(&accounts_path).unwrap(), b',').unwrap();
    let transactions =
        parse_transactions(fs::File::open(&transactions_path).unwrap(), b',').unwrap();
    let outcome = featurize_rows(&accounts, &transactions, &config).unwrap();
    let table = discretized_to_table(&outcome.rows);
    let mut buf = Vec::new();
    prospect_core::table::write_table(&mut buf, &table.headers, &table.rows, b',').unwrap();
    assert_eq!(staged, String::from_utf8(buf).unwrap());

    // ...and an identical model whether trained via files or in process
    let out = prospect(&[
        "train",
        "--input",
        dir.path().join("discretized.csv").to_str().unwrap(),
        "--out-dir",
        dir.path().to_str().unwrap(),
    ]);
    assert_code(&out, 0, "train staged");
    let staged_model =
        TreeModel::from_json(&fs::read_to_string(dir.path().join("model.json")).unwrap()).unwrap();

    let (dataset, _) = dataset_from_table(&table).unwrap();
    let in_process = TreeModel {
        attributes: dataset.attributes().to_vec(),
        tree: prune_tree(&build_tree(&dataset, &config.tree).unwrap(), &config.prune),
        config: config.tree.clone(),
    };
    assert_eq!(staged_model, in_process);
}

#[test]
fn missing_transactions_file_is_a_data_error() {
    let dir = tempfile::tempdir().unwrap();
    let (accounts, _) = synth_inputs(dir.path(), "5", "10");
    let missing = dir.path().join("nope.csv");
    let out = prospect(&[
        "featurize",
        "--accounts",
        &accounts,
        "--transactions",
        missing.to_str().unwrap(),
        "--out-dir",
        dir.path().to_str().unwrap(),
    ]);
    assert_code(&out, 2, "missing transactions");
    assert!(String::from_utf8_lossy(&out.stderr).contains("nope.csv"));
}

#[test]
fn zero_surviving_accounts_writes_header_only_table() {
    let dir = tempfile::tempdir().unwrap();
    let accounts = dir.path().join("accounts.csv");
    fs::write(
        &accounts,
        "account_no,title,sector,sanction_authority,sanction_limit,disburse_date,status\n\
         A1,,Other,RO,100000,2013-05-01,Closed\n",
    )
    .unwrap();
    let transactions = dir.path().join("transactions.csv");
    fs::write(
        &transactions,
        "account_no,tx_date,tx_type_code,side,amount,system_generated\n",
    )
    .unwrap();
    let out = prospect(&[
        "featurize",
        "--accounts",
        accounts.to_str().unwrap(),
        "--transactions",
        transactions.to_str().unwrap(),
        "--out-dir",
        dir.path().to_str().unwrap(),
    ]);
    assert_code(&out, 0, "zero accounts");
    assert!(String::from_utf8_lossy(&out.stderr).contains("warning"));
    let table = fs::read_to_string(dir.path().join("discretized.csv")).unwrap();
    assert_eq!(table.lines().count(), 1, "expected header only, got:\n{table}");
}

#[test]
fn train_on_reference_fixture_prints_fifteen_leaves() {
    let dir = tempfile::tempdir().unwrap();
    let out = prospect(&[
        "train",
        "--input",
        fixture("reference_tree.csv").to_str().unwrap(),
        "--out-dir",
        dir.path().to_str().unwrap(),
    ]);
    assert_code(&out, 0, "train fixture");
    assert!(String::from_utf8_lossy(&out.stdout).contains("Number of Leaves : 15"));
    let rules = fs::read_to_string(dir.path().join("rules.txt")).unwrap();
    assert_eq!(rules.lines().count(), 15);
    let golden = fs::read_to_string(fixture("reference_tree_golden.txt")).unwrap();
    let tree = fs::read_to_string(dir.path().join("tree.txt")).unwrap();
    assert_eq!(tree, golden);
}

#[test]
fn predictions_follow_reference_model_paths() {
    let dir = tempfile::tempdir().unwrap();
    let out = prospect(&[
        "train",
        "--input",
        fixture("reference_tree.csv").to_str().unwrap(),
        "--out-dir",
        dir.path().to_str().unwrap(),
    ]);
    assert_code(&out, 0, "train fixture");

    // two known paths plus one row with an undeclared sector value
    let input = dir.path().join("rows.csv");
    let constant = "RO,LessEqual25,LessEqual25,LessEqual100,LessEqual3,LessEqual25";
    fs::write(
        &input,
        format!(
            "AccountNo,Sector,SanctionAuthor,minDrAmount,maxDrAmount,totalDrAmount,drVoucherNo,\
             minCrAmount,maxCrAmount,totalCrAmount,crVoucherNo,PrincipalAmount,adjustNo\n\
             R1,Other,{constant},LessEqual75,LessEqual200,LessEqual3,LessEqual50,NoAdjusted\n\
             R2,BusinessmanIndustrialist,{constant},Above75,LessEqual200,LessEqual3,LessEqual50,NoAdjusted\n\
             R3,SomethingNew,{constant},Above75,LessEqual200,LessEqual3,LessEqual50,NoAdjusted\n"
        ),
    )
    .unwrap();
    let out = prospect(&[
        "predict",
        "--model",
        dir.path().join("model.json").to_str().unwrap(),
        "--input",
        input.to_str().unwrap(),
        "--out-dir",
        dir.path().to_str().unwrap(),
    ]);
    assert_code(&out, 0, "predict");
    let predictions = fs::read_to_string(dir.path().join("predictions.csv")).unwrap();
    let lines: Vec<&str> = predictions.lines().collect();
    assert_eq!(lines[0], "AccountNo,Class_Label,rule_index,fallback");
    assert_eq!(lines[1], "R1,Excellent,6,false");
    assert_eq!(lines[2], "R2,Good,5,false");
    // undeclared sector: majority-consequent fallback, flagged
    let r3: Vec<&str> = lines[3].split(',').collect();
    assert_eq!(r3[0], "R3");
    assert_eq!(r3[2], "");
    assert_eq!(r3[3], "true");
}

#[test]
fn predict_empty_input_writes_header_only() {
    let dir = tempfile::tempdir().unwrap();
    let out = prospect(&[
        "train",
        "--input",
        fixture("reference_tree.csv").to_str().unwrap(),
        "--out-dir",
        dir.path().to_str().unwrap(),
    ]);
    assert_code(&out, 0, "train fixture");
    let input = dir.path().join("empty.csv");
    let header = fs::read_to_string(fixture("reference_tree.csv"))
        .unwrap()
        .lines()
        .next()
        .unwrap()
        .to_string();
    fs::write(&input, format!("{header}\n")).unwrap();
    let out = prospect(&[
        "predict",
        "--model",
        dir.path().join("model.json").to_str().unwrap(),
        "--input",
        input.to_str().unwrap(),
        "--out-dir",
        dir.path().to_str().unwrap(),
    ]);
    assert_code(&out, 0, "predict empty");
    let predictions = fs::read_to_string(dir.path().join("predictions.csv")).unwrap();
    assert_eq!(predictions.lines().count(), 1);
}

#[test]
fn predict_schema_mismatch_is_a_data_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = prospect(&[
        "train",
        "--input",
        fixture("reference_tree.csv").to_str().unwrap(),
        "--out-dir",
        dir.path().to_str().unwrap(),
    ]);
    assert_code(&out, 0, "train fixture");
    let input = dir.path().join("short.csv");
    fs::write(&input, "AccountNo,Sector\nR1,Other\n").unwrap();
    let out = prospect(&[
        "predict",
        "--model",
        dir.path().join("model.json").to_str().unwrap(),
        "--input",
        input.to_str().unwrap(),
        "--out-dir",
        dir.path().to_str().unwrap(),
    ]);
    assert_code(&out, 2, "schema mismatch");
    assert!(String::from_utf8_lossy(&out.stderr).contains("maxCrAmount"));
}

#[test]
fn train_single_class_table_gives_one_leaf() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("pure.csv");
    fs::write(
        &input,
        "AccountNo,Sector,Class_Label\nA1,Other,Good\nA2,Retail,Good\nA3,Other,Good\n",
    )
    .unwrap();
    let out = prospect(&[
        "train",
        "--input",
        input.to_str().unwrap(),
        "--out-dir",
        dir.path().to_str().unwrap(),
    ]);
    assert_code(&out, 0, "train pure");
    assert!(String::from_utf8_lossy(&out.stdout).contains("Number of Leaves : 1"));
}

#[test]
fn train_without_class_label_is_a_data_error() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("nolabel.csv");
    fs::write(&input, "AccountNo,Sector\nA1,Other\n").unwrap();
    let out = prospect(&[
        "train",
        "--input",
        input.to_str().unwrap(),
        "--out-dir",
        dir.path().to_str().unwrap(),
    ]);
    assert_code(&out, 2, "train without label");
    assert!(String::from_utf8_lossy(&out.stderr).contains("Class_Label"));
}

#[test]
fn evaluate_with_too_many_folds_is_a_data_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = prospect(&[
        "evaluate",
        "--input",
        fixture("reference_tree.csv").to_str().unwrap(),
        "--out-dir",
        dir.path().to_str().unwrap(),
        "--folds",
        "50",
    ]);
    assert_code(&out, 2, "folds > rows");
    assert!(String::from_utf8_lossy(&out.stderr).contains("50"));
}

#[test]
fn unknown_flag_is_a_usage_error() {
    let out = prospect(&["train", "--bogus", "x"]);
    assert_code(&out, 1, "unknown flag");
}

#[test]
fn bad_config_file_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("bad.conf");
    fs::write(&config, "tree.depth = 3\n").unwrap();
    let out = prospect(&[
        "train",
        "--input",
        fixture("reference_tree.csv").to_str().unwrap(),
        "--out-dir",
        dir.path().to_str().unwrap(),
        "--config",
        config.to_str().unwrap(),
    ]);
    assert_code(&out, 1, "bad config");
    assert!(String::from_utf8_lossy(&out.stderr).contains("tree.depth"));
}

#[test]
fn disabling_the_mean_gain_prefilter_changes_the_root() {
    // raw gain-ratio argmax falls for the low-split-info attribute; the
    // default prefilter keeps the stronger split at the root
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("nofilter.conf");
    fs::write(&config, "tree.mean_gain_prefilter = false\n").unwrap();
    let out = prospect(&[
        "train",
        "--input",
        fixture("reference_tree.csv").to_str().unwrap(),
        "--out-dir",
        dir.path().to_str().unwrap(),
        "--config",
        config.to_str().unwrap(),
    ]);
    assert_code(&out, 0, "train without prefilter");
    let tree = fs::read_to_string(dir.path().join("tree.txt")).unwrap();
    assert!(
        tree.starts_with("PrincipalAmount = "),
        "expected PrincipalAmount root, got:\n{tree}"
    );
}

#[test]
fn criterion_flag_switches_selection() {
    let dir = tempfile::tempdir().unwrap();
    for criterion in ["gain-ratio", "info-gain"] {
        let out = prospect(&[
            "train",
            "--input",
            fixture("reference_tree.csv").to_str().unwrap(),
            "--out-dir",
            dir.path().to_str().unwrap(),
            "--criterion",
            criterion,
        ]);
        assert_code(&out, 0, criterion);
    }
}

#[test]
fn synth_same_seed_writes_identical_files() {
    let dir_a = tempfile::tempdir().unwrap();
    let dir_b = tempfile::tempdir().unwrap();
    synth_inputs(dir_a.path(), "21", "40");
    synth_inputs(dir_b.path(), "21", "40");
    for file in ["accounts.csv", "transactions.csv"] {
        let a = fs::read(dir_a.path().join(file)).unwrap();
        let b = fs::read(dir_b.path().join(file)).unwrap();
        assert_eq!(a, b, "{file} differs");
    }
}
