//! Acceptance suite: one test per shipping criterion, each printing a PASS
//! line (visible with `cargo test --test acceptance -- --nocapture`).

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use prospect_core::eval::{cross_validate, rank_sectors};
use prospect_core::features::{
    assign_class_label, discretize, turnover, BinScheme, ClassLabel, DiscretizedRow,
};
use prospect_core::prune::{pessimistic_error, prune_tree, PruneConfig};
use prospect_core::rules::{classify_with_rules, extract_rules};
use prospect_core::table::{dataset_from_table, read_table};
use prospect_core::tree::{
    build_tree, choose_attribute, classify, render_tree, Attribute, Dataset, TreeConfig,
    UnseenValuePolicy,
};

fn pass(criterion: u32, name: &str, started: Instant) {
    println!(
        "acceptance criterion {criterion:2} ({name}): PASS in {:.2?}",
        started.elapsed()
    );
}

fn data_path(file: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/data").join(file)
}

// --- criterion 1: turnover normalization + inclusive-<= binning over every
// --- boundary of all five schemes -----------------------------------------

enum Probe {
    /// (value, sanction) run through turnover, then the scheme.
    Turnover(f64, f64, &'static str),
    /// Raw value (monthly voucher average) straight into the scheme.
    Raw(f64, &'static str),
    /// Loan adjustment flag.
    Adjust(bool),
}

#[test]
fn criterion_01_turnover_and_binning_table() {
    let started = Instant::now();
    use Probe::*;
    let table: [(Probe, &str); 30] = [
        // amount4: boundaries 25, 50, 75
        (Turnover(25.0, 100.0, "amount4"), "LessEqual25"),
        (Turnover(2_501.0, 10_000.0, "amount4"), "LessEqual50"),
        (Turnover(50.0, 100.0, "amount4"), "LessEqual50"),
        (Turnover(5_001.0, 10_000.0, "amount4"), "LessEqual75"),
        (Turnover(75.0, 100.0, "amount4"), "LessEqual75"),
        (Turnover(7_501.0, 10_000.0, "amount4"), "Above75"),
        (Turnover(150_000.0, 300_000.0, "amount4"), "LessEqual50"),
        // total6: boundaries 100, 200, 300, 400, 500
        (Turnover(100.0, 100.0, "total6"), "LessEqual100"),
        (Turnover(10_050.0, 10_000.0, "total6"), "LessEqual200"),
        (Turnover(200.0, 100.0, "total6"), "LessEqual200"),
        (Turnover(20_001.0, 10_000.0, "total6"), "LessEqual300"),
        (Turnover(300.0, 100.0, "total6"), "LessEqual300"),
        (Turnover(400.0, 100.0, "total6"), "LessEqual400"),
        (Turnover(40_001.0, 10_000.0, "total6"), "LessEqual500"),
        (Turnover(500.0, 100.0, "total6"), "LessEqual500"),
        (Turnover(50_001.0, 10_000.0, "total6"), "Above500"),
        (Turnover(875_000.0, 3_500_000.0, "total6"), "LessEqual100"),
        // principal3: boundaries 50, 100
        (Turnover(50.0, 100.0, "principal3"), "LessEqual50"),
        (Turnover(5_001.0, 10_000.0, "principal3"), "Above50"),
        (Turnover(100.0, 100.0, "principal3"), "Above50"),
        (Turnover(10_001.0, 10_000.0, "principal3"), "ExceedLimit"),
        (Turnover(0.0, 100.0, "principal3"), "LessEqual50"),
        // voucher4: boundaries 3, 6, 10 on raw monthly averages
        (Raw(3.0, "voucher4"), "LessEqual3"),
        (Raw(3.5, "voucher4"), "LessEqual6"),
        (Raw(6.0, "voucher4"), "LessEqual6"),
        (Raw(7.0, "voucher4"), "LessEqual10"),
        (Raw(10.0, "voucher4"), "LessEqual10"),
        (Raw(10.1, "voucher4"), "Above10"),
        // adjust2
        (Adjust(true), "Adjusted"),
        (Adjust(false), "NoAdjusted"),
    ];

    let scheme_by_name = |name: &str| -> BinScheme {
        match name {
            "amount4" => BinScheme::amount4(),
            "total6" => BinScheme::total6(),
            "principal3" => BinScheme::principal3(),
            "voucher4" => BinScheme::voucher4(),
            other => panic!("unknown scheme {other}"),
        }
    };
    for (i, (probe, expected)) in table.iter().enumerate() {
        let got = match probe {
            Probe::Turnover(value, sanction, scheme) => {
                let pct = turnover(*value, *sanction).expect("positive sanction");
                discretize(pct, &scheme_by_name(scheme)).unwrap().to_string()
            }
            Probe::Raw(value, scheme) => {
                discretize(*value, &scheme_by_name(scheme)).unwrap().to_string()
            }
            Probe::Adjust(flag) => {
                discretize(if *flag { 1.0 } else { 0.0 }, &BinScheme::adjust2())
                    .unwrap()
                    .to_string()
            }
        };
        assert_eq!(&got, expected, "probe {i} mapped to {got}, expected {expected}");
    }
    assert!(started.elapsed().as_secs() < 1);
    pass(1, "turnover and bin boundaries", started);
}

// --- criterion 2: class-label thresholds ----------------------------------

#[test]
fn criterion_02_class_label_thresholds() {
    let started = Instant::now();
    let cases = [
        (0.0, ClassLabel::Bad),
        (59.999, ClassLabel::Bad),
        (60.0, ClassLabel::Marginal),
        (69.999, ClassLabel::Marginal),
        (70.0, ClassLabel::Good),
        (79.999, ClassLabel::Good),
        (80.0, ClassLabel::VeryGood),
        (89.999, ClassLabel::VeryGood),
        (90.0, ClassLabel::Excellent),
        (100.0, ClassLabel::Excellent),
    ];
    for (score, expected) in cases {
        assert_eq!(assign_class_label(score).unwrap(), expected, "score {score}");
    }
    pass(2, "class-label thresholds", started);
}

// --- random dataset machinery shared by criteria 3-6 ----------------------

struct RawData {
    n_attrs: usize,
    n_values: Vec<usize>,
    rows: Vec<Vec<usize>>,
    labels: Vec<usize>,
}

fn random_raw(rng: &mut ChaCha8Rng, max_attrs: usize, max_values: usize, max_rows: usize) -> RawData {
    let n_attrs = rng.gen_range(1..=max_attrs);
    let n_values: Vec<usize> = (0..n_attrs).map(|_| rng.gen_range(2..=max_values)).collect();
    let n_rows = rng.gen_range(2..=max_rows);
    let rows: Vec<Vec<usize>> = (0..n_rows)
        .map(|_| n_values.iter().map(|&v| rng.gen_range(0..v)).collect())
        .collect();
    let labels: Vec<usize> = (0..n_rows).map(|_| rng.gen_range(0..5)).collect();
    RawData {
        n_attrs,
        n_values,
        rows,
        labels,
    }
}

fn to_dataset(raw: &RawData) -> Dataset {
    let attributes: Vec<Attribute> = (0..raw.n_attrs)
        .map(|a| {
            Attribute::new(
                format!("attr{a}"),
                (0..raw.n_values[a]).map(|v| format!("v{v}")).collect(),
            )
        })
        .collect();
    let rows: Vec<(Vec<String>, ClassLabel)> = raw
        .rows
        .iter()
        .zip(&raw.labels)
        .map(|(values, &label)| {
            (
                values.iter().map(|&v| format!("v{v}")).collect(),
                ClassLabel::ALL[label],
            )
        })
        .collect();
    Dataset::new(attributes, rows).expect("generated rows are declared")
}

// --- criterion 3: split selection against a brute-force oracle ------------

/// Independent recomputation of the documented selection rule: gain ratio
/// over usable candidates (split info > 0), mean-gain prefilter, ties to
/// the earlier candidate within 1e-12.
fn oracle_choose(raw: &RawData) -> Option<usize> {
    fn entropy_of(counts: &[u32; 5], total: f64) -> f64 {
        let mut h = 0.0;
        for &c in counts {
            if c > 0 {
                let p = f64::from(c) / total;
                h -= p * p.log2();
            }
        }
        h
    }
    let n = raw.rows.len() as f64;
    let mut parent = [0u32; 5];
    for &l in &raw.labels {
        parent[l] += 1;
    }
    let parent_entropy = entropy_of(&parent, n);

    let mut stats: Vec<(usize, f64, f64)> = Vec::new(); // (attr, gain, ratio)
    for attr in 0..raw.n_attrs {
        let mut partitions: Vec<[u32; 5]> = vec![[0u32; 5]; raw.n_values[attr]];
        let mut sizes = vec![0u32; raw.n_values[attr]];
        for (row, &label) in raw.rows.iter().zip(&raw.labels) {
            partitions[row[attr]][label] += 1;
            sizes[row[attr]] += 1;
        }
        let present = sizes.iter().filter(|&&s| s > 0).count();
        if present < 2 {
            continue;
        }
        let mut weighted = 0.0;
        let mut split_info = 0.0;
        for (counts, &size) in partitions.iter().zip(&sizes) {
            if size == 0 {
                continue;
            }
            let w = f64::from(size) / n;
            weighted += w * entropy_of(counts, f64::from(size));
            split_info -= w * w.log2();
        }
        let gain = (parent_entropy - weighted).max(0.0);
        stats.push((attr, gain, gain / split_info));
    }
    if stats.is_empty() {
        return None;
    }
    let mean = stats.iter().map(|(_, g, _)| g).sum::<f64>() / stats.len() as f64;
    let mut best: Option<(usize, f64)> = None;
    for &(attr, gain, ratio) in &stats {
        if gain < mean - 1e-12 {
            continue;
        }
        if best.is_none_or(|(_, r)| ratio > r + 1e-12) {
            best = Some((attr, ratio));
        }
    }
    best.map(|(attr, _)| attr)
}

#[test]
fn criterion_03_split_selection_matches_oracle() {
    let started = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(0xC0FFEE);
    let config = TreeConfig::default();
    for case in 0..10_000 {
        let raw = random_raw(&mut rng, 4, 3, 12);
        let dataset = to_dataset(&raw);
        let candidates: Vec<String> = (0..raw.n_attrs).map(|a| format!("attr{a}")).collect();
        let chosen = choose_attribute(&dataset, &candidates, &config).unwrap();
        let expected = oracle_choose(&raw).map(|a| format!("attr{a}"));
        assert_eq!(chosen, expected, "case {case}: rows {:?}", raw.rows);
    }
    assert!(started.elapsed().as_secs() < 60);
    pass(3, "split selection vs brute-force oracle, 10000 cases", started);
}

// --- criterion 4: unpruned training accuracy on conflict-free data --------

#[test]
fn criterion_04_training_consistency() {
    let started = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(0xBEEF);
    let config = TreeConfig {
        min_leaf_count: 1,
        ..TreeConfig::default()
    };
    for case in 0..1_000 {
        let mut raw = random_raw(&mut rng, 4, 3, 12);
        // deterministic function of the value vector: duplicates agree, so
        // the dataset is conflict-free by construction
        raw.labels = raw
            .rows
            .iter()
            .map(|row| row.iter().enumerate().map(|(i, &v)| (i + 2) * 7 * v + v).sum::<usize>() % 5)
            .collect();
        let dataset = to_dataset(&raw);
        let tree = build_tree(&dataset, &config).unwrap();
        for i in 0..dataset.len() {
            let got = classify(&tree, dataset.row_view(i), UnseenValuePolicy::Error).unwrap();
            assert_eq!(
                got.label,
                dataset.label(i),
                "case {case}, row {i}: training row misclassified"
            );
        }
    }
    assert!(started.elapsed().as_secs() < 60);
    pass(4, "100% training accuracy on 1000 conflict-free datasets", started);
}

// --- criterion 5: tree/rule classification equivalence --------------------

fn value_space(dataset: &Dataset, cap: usize) -> Vec<BTreeMap<String, String>> {
    let attrs = dataset.attributes();
    let mut rows: Vec<BTreeMap<String, String>> = vec![BTreeMap::new()];
    for attr in attrs {
        let mut next = Vec::with_capacity(rows.len() * attr.values.len());
        'outer: for base in &rows {
            for value in &attr.values {
                let mut row = base.clone();
                row.insert(attr.name.clone(), value.clone());
                next.push(row);
                if next.len() >= cap {
                    break 'outer;
                }
            }
        }
        rows = next;
    }
    rows
}

#[test]
fn criterion_05_tree_rule_equivalence() {
    let started = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(0xDECAF);
    for case in 0..1_000 {
        let raw = random_raw(&mut rng, 5, 3, 40);
        let dataset = to_dataset(&raw);
        let config = TreeConfig {
            min_leaf_count: if case % 2 == 0 { 1 } else { 2 },
            ..TreeConfig::default()
        };
        let mut tree = build_tree(&dataset, &config).unwrap();
        if case % 3 == 0 {
            tree = prune_tree(&tree, &PruneConfig::default());
        }
        let rules = extract_rules(&tree);
        assert_eq!(rules.len(), tree.leaf_count(), "case {case}: rule count");
        for row in value_space(&dataset, 10_000) {
            let via_tree = classify(&tree, &row, UnseenValuePolicy::Error).unwrap();
            let via_rules = classify_with_rules(&rules, &row, false).unwrap();
            assert_eq!(
                via_tree.label, via_rules.label,
                "case {case}: tree and rules disagree on {row:?}"
            );
            // paths partition the declared space: exactly one rule matches
            let matches = rules.iter().filter(|r| r.matches(&row).unwrap()).count();
            assert_eq!(matches, 1, "case {case}: {matches} rules match {row:?}");
        }
    }

    // one tree whose declared value space exceeds the enumeration cap
    let mut rng = ChaCha8Rng::seed_from_u64(0xFACE);
    let raw = random_raw(&mut rng, 7, 4, 60);
    let raw = RawData {
        n_attrs: 7,
        n_values: vec![4; 7],
        rows: (0..60)
            .map(|_| (0..7).map(|_| rng.gen_range(0..4)).collect())
            .collect(),
        labels: raw.labels.iter().cycle().take(60).copied().collect(),
    };
    let dataset = to_dataset(&raw);
    let tree = build_tree(&dataset, &TreeConfig::default()).unwrap();
    let rules = extract_rules(&tree);
    let rows = value_space(&dataset, 10_000);
    assert_eq!(rows.len(), 10_000);
    for row in rows {
        let via_tree = classify(&tree, &row, UnseenValuePolicy::Error).unwrap();
        let via_rules = classify_with_rules(&rules, &row, false).unwrap();
        assert_eq!(via_tree.label, via_rules.label);
    }

    assert!(started.elapsed().as_secs() < 120);
    pass(5, "tree/rule equivalence over declared value spaces", started);
}

// --- criterion 6: pruning properties --------------------------------------

#[test]
fn criterion_06_pruning_properties() {
    let started = Instant::now();

    // closed form for clean leaves, pinned to 1e-9
    assert!((pessimistic_error(1, 0, 0.25).unwrap() - 0.75).abs() < 1e-9);
    let rate6 = 1.0 - 0.25f64.powf(1.0 / 6.0); // 0.2063...
    assert!((pessimistic_error(6, 0, 0.25).unwrap() - 6.0 * rate6).abs() < 1e-9);
    for n in 1..=200u32 {
        let expected = f64::from(n) * (1.0 - 0.25f64.powf(1.0 / f64::from(n)));
        assert!((pessimistic_error(n, 0, 0.25).unwrap() - expected).abs() < 1e-9);
    }

    let mut rng = ChaCha8Rng::seed_from_u64(0xABBA);
    let config = PruneConfig::default();
    for case in 0..1_000 {
        let raw = random_raw(&mut rng, 5, 3, 40);
        let dataset = to_dataset(&raw);
        let tree_config = TreeConfig {
            min_leaf_count: if case % 2 == 0 { 1 } else { 2 },
            ..TreeConfig::default()
        };
        let tree = build_tree(&dataset, &tree_config).unwrap();
        let pruned = prune_tree(&tree, &config);
        assert!(
            pruned.leaf_count() <= tree.leaf_count(),
            "case {case}: pruning grew the tree"
        );
        assert_eq!(
            pruned.coverage_total(),
            tree.coverage_total(),
            "case {case}: coverage mass changed"
        );
        let twice = prune_tree(&pruned, &config);
        assert_eq!(pruned, twice, "case {case}: pruning is not idempotent");
    }
    assert!(started.elapsed().as_secs() < 60);
    pass(6, "pruning properties over 1000 random trees", started);
}

// --- criterion 7: reference tree structure reproduction --------------------

#[test]
fn criterion_07_reference_tree_reproduction() {
    let started = Instant::now();
    let table = read_table(
        std::fs::File::open(data_path("reference_tree.csv")).unwrap(),
        b',',
    )
    .unwrap();
    assert_eq!(table.rows.len(), 40);
    let (dataset, _) = dataset_from_table(&table).unwrap();

    // gain ratio, min_leaf_count 2, pruning confidence 0.25
    let tree = build_tree(&dataset, &TreeConfig::default()).unwrap();
    let pruned = prune_tree(&tree, &PruneConfig::default());
    let rendered = render_tree(&pruned);

    assert!(
        rendered.starts_with("maxCrAmount = Above75"),
        "root attribute/arc mismatch:\n{rendered}"
    );
    let root_arcs: Vec<&str> = rendered
        .lines()
        .filter(|l| l.starts_with("maxCrAmount = "))
        .map(|l| {
            l.trim_start_matches("maxCrAmount = ")
                .split(':')
                .next()
                .unwrap()
        })
        .collect();
    assert_eq!(
        root_arcs,
        vec!["Above75", "LessEqual75", "LessEqual25", "LessEqual50"],
        "root arc labels differ"
    );
    assert!(
        rendered.contains("maxCrAmount = LessEqual75: Excellent (7.0/2.0)"),
        "pinned leaf missing:\n{rendered}"
    );
    assert!(rendered.contains("Number of Leaves : 15"));

    let golden = std::fs::read_to_string(data_path("reference_tree_golden.txt")).unwrap();
    assert_eq!(rendered, golden, "rendered tree drifted from the golden file");
    assert!(started.elapsed().as_secs() < 5);
    pass(7, "reference 15-leaf tree reproduced byte-exact", started);
}

// --- criterion 8: cross-validation sanity ----------------------------------

#[test]
fn criterion_08_cross_validation_sanity() {
    let started = Instant::now();

    // fully separable: one attribute determines the class
    let rows: Vec<(Vec<String>, ClassLabel)> = (0..200)
        .map(|i| {
            (
                vec![format!("g{}", i % 5), format!("n{}", i % 7)],
                ClassLabel::ALL[i % 5],
            )
        })
        .collect();
    let separable =
        Dataset::from_named_rows(&["grade".to_string(), "noise".to_string()], &rows).unwrap();
    let cv = cross_validate(
        &separable,
        10,
        42,
        &TreeConfig::default(),
        &PruneConfig::default(),
    )
    .unwrap();
    assert_eq!(cv.report.mean_accuracy, 1.0, "separable dataset must score 1.0");

    // labels shuffled uniformly over five classes: random-guessing regime
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let rows: Vec<(Vec<String>, ClassLabel)> = (0..2_000)
        .map(|_| {
            (
                (0..3).map(|_| format!("v{}", rng.gen_range(0..3))).collect(),
                ClassLabel::ALL[rng.gen_range(0..5)],
            )
        })
        .collect();
    let noise = Dataset::from_named_rows(
        &["a".to_string(), "b".to_string(), "c".to_string()],
        &rows,
    )
    .unwrap();
    let cv = cross_validate(
        &noise,
        10,
        7,
        &TreeConfig::default(),
        &PruneConfig::default(),
    )
    .unwrap();
    assert!(
        (0.15..=0.25).contains(&cv.report.mean_accuracy),
        "random labels scored {}, expected ~0.2",
        cv.report.mean_accuracy
    );
    assert!(started.elapsed().as_secs() < 60);
    pass(8, "cross-validation sanity (separable=1.0, noise~0.2)", started);
}

// --- criterion 9: sector ranking -------------------------------------------

fn sector_rows(sector: &str, labels: &[(ClassLabel, usize)]) -> Vec<DiscretizedRow> {
    labels
        .iter()
        .flat_map(|(label, n)| {
            std::iter::repeat_with(move || DiscretizedRow {
                account_no: "A".to_string(),
                sector: sector.to_string(),
                sanction_authority: "RO".to_string(),
                min_dr_amount: "LessEqual25".to_string(),
                max_dr_amount: "LessEqual25".to_string(),
                total_dr_amount: "LessEqual100".to_string(),
                dr_voucher_no: "LessEqual3".to_string(),
                min_cr_amount: "LessEqual25".to_string(),
                max_cr_amount: "LessEqual25".to_string(),
                total_cr_amount: "LessEqual100".to_string(),
                cr_voucher_no: "LessEqual3".to_string(),
                principal_amount: "LessEqual50".to_string(),
                adjust_no: "NoAdjusted".to_string(),
                class_label: *label,
            })
            .take(*n)
        })
        .collect()
}

#[test]
fn criterion_09_sector_ranking() {
    let started = Instant::now();
    let mut rows = Vec::new();
    rows.extend(sector_rows(
        "RiceandFlowerMills",
        &[(ClassLabel::Excellent, 8), (ClassLabel::VeryGood, 3), (ClassLabel::Good, 1)],
    ));
    rows.extend(sector_rows(
        "WholeSeller",
        &[(ClassLabel::Excellent, 4), (ClassLabel::VeryGood, 5), (ClassLabel::Good, 3)],
    ));
    rows.extend(sector_rows(
        "RetailTraders",
        &[(ClassLabel::VeryGood, 4), (ClassLabel::Good, 5), (ClassLabel::Marginal, 3)],
    ));
    rows.extend(sector_rows(
        "BusinessmanIndustrialist",
        &[(ClassLabel::Good, 3), (ClassLabel::Marginal, 5), (ClassLabel::Bad, 4)],
    ));
    rows.extend(sector_rows(
        "Other",
        &[(ClassLabel::Marginal, 4), (ClassLabel::Bad, 8)],
    ));

    let scores = rank_sectors(&rows).unwrap();
    assert_eq!(scores[0].sector, "RiceandFlowerMills", "best sector");
    assert_eq!(scores[0].rank, 1);
    assert_eq!(scores[1].sector, "WholeSeller");
    assert_eq!(scores[2].sector, "RetailTraders");
    assert!(started.elapsed().as_secs() < 5);
    pass(9, "sector ranking puts RiceandFlowerMills first", started);
}

// --- criterion 10: bit-identical evaluate reruns ----------------------------

fn run_prospect(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_prospect"))
        .args(args)
        .output()
        .expect("prospect binary runs")
}

#[test]
fn criterion_10_evaluate_determinism() {
    let started = Instant::now();
    let dir = tempfile::tempdir().unwrap();
    let base = dir.path().to_str().unwrap().to_string();
    let synth_dir = format!("{base}/synth");
    let run = |args: &[&str]| {
        let out = run_prospect(args);
        assert!(
            out.status.success(),
            "command {args:?} failed: {}",
            String::from_utf8_lossy(&out.stderr)
        );
    };
    run(&["synth", "--out-dir", &synth_dir, "--seed", "9", "--accounts", "120"]);
    let accounts = format!("{synth_dir}/accounts.csv");
    let transactions = format!("{synth_dir}/transactions.csv");
    run(&[
        "featurize",
        "--accounts",
        &accounts,
        "--transactions",
        &transactions,
        "--out-dir",
        &synth_dir,
    ]);
    let discretized = format!("{synth_dir}/discretized.csv");

    let eval_a = format!("{base}/eval_a");
    let eval_b = format!("{base}/eval_b");
    run(&["evaluate", "--input", &discretized, "--out-dir", &eval_a, "--seed", "11"]);
    run(&["evaluate", "--input", &discretized, "--out-dir", &eval_b, "--seed", "11"]);

    for file in ["report.txt", "metrics.csv", "sector_ranking.csv"] {
        let a = std::fs::read(format!("{eval_a}/{file}")).unwrap();
        let b = std::fs::read(format!("{eval_b}/{file}")).unwrap();
        assert_eq!(a, b, "{file} differs between identical runs");
        assert!(!a.is_empty(), "{file} is empty");
    }
    assert!(started.elapsed().as_secs() < 30);
    pass(10, "byte-identical evaluate reruns", started);
}
