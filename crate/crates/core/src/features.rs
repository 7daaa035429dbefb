//! Per-account feature aggregation, turnover normalization, discretization
//! and class-label assignment.
//!
//! Numeric account behaviour is normalized as a percentage of the sanction
//! limit (`turnover`) instead of min-max or z-score scaling, then clustered
//! into named bins. The five-level target label is derived from a weighted
//! composite score; the weights are configuration because the underlying
//! expert rubric is not public.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ingest::{AccountProfile, TransactionRecord, TxSide};

#[derive(Debug, Error, PartialEq)]
pub enum FeatureError {
    #[error("empty dataset")]
    EmptyDataset,
    #[error("sanction amount must be positive, got {0}")]
    NonPositiveSanction(f64),
    #[error("cannot discretize non-finite value {0}")]
    NonFiniteValue(f64),
    #[error("invalid score weights: {0}")]
    InvalidWeights(String),
    #[error("score {0} outside [0, 100]")]
    OutOfRange(f64),
    #[error("transaction references unknown account {0}")]
    UnknownAccount(String),
    #[error("invalid bin scheme {name}: {reason}")]
    InvalidScheme { name: String, reason: String },
}

/// Five-level lending quality label, ordered `Bad < Marginal < Good <
/// VeryGood < Excellent`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum ClassLabel {
    Bad,
    Marginal,
    Good,
    VeryGood,
    Excellent,
}

impl ClassLabel {
    /// All labels, best first. Used for display order and deterministic
    /// tie-breaking (ties prefer the earlier, i.e. better, label).
    pub const ALL: [ClassLabel; 5] = [
        ClassLabel::Excellent,
        ClassLabel::VeryGood,
        ClassLabel::Good,
        ClassLabel::Marginal,
        ClassLabel::Bad,
    ];

    /// Ordinal rank: Excellent = 5 down to Bad = 1.
    pub fn rank(self) -> u32 {
        match self {
            ClassLabel::Excellent => 5,
            ClassLabel::VeryGood => 4,
            ClassLabel::Good => 3,
            ClassLabel::Marginal => 2,
            ClassLabel::Bad => 1,
        }
    }

    /// Dense index for count arrays; follows the `ALL` order.
    pub fn index(self) -> usize {
        match self {
            ClassLabel::Excellent => 0,
            ClassLabel::VeryGood => 1,
            ClassLabel::Good => 2,
            ClassLabel::Marginal => 3,
            ClassLabel::Bad => 4,
        }
    }
}

impl fmt::Display for ClassLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            ClassLabel::Excellent => "Excellent",
            ClassLabel::VeryGood => "Very Good",
            ClassLabel::Good => "Good",
            ClassLabel::Marginal => "Marginal",
            ClassLabel::Bad => "Bad",
        };
        f.write_str(s)
    }
}

impl FromStr for ClassLabel {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "Excellent" => Ok(ClassLabel::Excellent),
            "Very Good" | "VeryGood" => Ok(ClassLabel::VeryGood),
            "Good" => Ok(ClassLabel::Good),
            "Marginal" => Ok(ClassLabel::Marginal),
            "Bad" => Ok(ClassLabel::Bad),
            other => Err(format!("unknown class label {other:?}")),
        }
    }
}

/// An ordered list of bins; a value selects the first bin whose upper bound
/// is `>=` the value ("LessEqual" semantics). The last bound is +infinity.
#[derive(Debug, Clone, PartialEq)]
pub struct BinScheme {
    name: String,
    bins: Vec<(f64, String)>,
}

impl BinScheme {
    pub fn new(
        name: impl Into<String>,
        bins: Vec<(f64, String)>,
    ) -> Result<BinScheme, FeatureError> {
        let name = name.into();
        let invalid = |reason: &str| FeatureError::InvalidScheme {
            name: name.clone(),
            reason: reason.to_string(),
        };
        if bins.is_empty() {
            return Err(invalid("no bins"));
        }
        if bins.last().map(|(b, _)| *b) != Some(f64::INFINITY) {
            return Err(invalid("last upper bound must be +inf"));
        }
        for pair in bins.windows(2) {
            if pair[0].0 >= pair[1].0 {
                return Err(invalid("upper bounds must be strictly increasing"));
            }
        }
        for (i, (_, label)) in bins.iter().enumerate() {
            if bins[..i].iter().any(|(_, l)| l == label) {
                return Err(invalid(&format!("duplicate label {label:?}")));
            }
        }
        Ok(BinScheme { name, bins })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn labels(&self) -> impl Iterator<Item = &str> {
        self.bins.iter().map(|(_, l)| l.as_str())
    }

    /// Position of a label within the scheme, if declared.
    pub fn label_position(&self, label: &str) -> Option<usize> {
        self.bins.iter().position(|(_, l)| l == label)
    }

    /// Four turnover groups for single-transaction minima/maxima.
    pub fn amount4() -> BinScheme {
        BinScheme::new(
            "amount4",
            vec![
                (25.0, "LessEqual25".into()),
                (50.0, "LessEqual50".into()),
                (75.0, "LessEqual75".into()),
                (f64::INFINITY, "Above75".into()),
            ],
        )
        .expect("built-in scheme")
    }

    /// Six turnover groups for per-side totals.
    pub fn total6() -> BinScheme {
        BinScheme::new(
            "total6",
            vec![
                (100.0, "LessEqual100".into()),
                (200.0, "LessEqual200".into()),
                (300.0, "LessEqual300".into()),
                (400.0, "LessEqual400".into()),
                (500.0, "LessEqual500".into()),
                (f64::INFINITY, "Above500".into()),
            ],
        )
        .expect("built-in scheme")
    }

    /// Principal turnover: within half the limit, above half, or over the
    /// limit entirely.
    pub fn principal3() -> BinScheme {
        BinScheme::new(
            "principal3",
            vec![
                (50.0, "LessEqual50".into()),
                (100.0, "Above50".into()),
                (f64::INFINITY, "ExceedLimit".into()),
            ],
        )
        .expect("built-in scheme")
    }

    /// Four groups for monthly average voucher counts.
    pub fn voucher4() -> BinScheme {
        BinScheme::new(
            "voucher4",
            vec![
                (3.0, "LessEqual3".into()),
                (6.0, "LessEqual6".into()),
                (10.0, "LessEqual10".into()),
                (f64::INFINITY, "Above10".into()),
            ],
        )
        .expect("built-in scheme")
    }

    /// Loan adjustment as a two-bin scheme over 0/1.
    pub fn adjust2() -> BinScheme {
        BinScheme::new(
            "adjust2",
            vec![
                (0.0, "NoAdjusted".into()),
                (f64::INFINITY, "Adjusted".into()),
            ],
        )
        .expect("built-in scheme")
    }
}

/// Returns the label of the first bin whose upper bound is >= `value`.
pub fn discretize(value: f64, scheme: &BinScheme) -> Result<&str, FeatureError> {
    if !value.is_finite() {
        return Err(FeatureError::NonFiniteValue(value));
    }
    let (_, label) = scheme
        .bins
        .iter()
        .find(|(upper, _)| value <= *upper)
        .expect("last bound is +inf");
    Ok(label)
}

/// The five schemes used to produce a discretized row.
#[derive(Debug, Clone, PartialEq)]
pub struct SchemeSet {
    pub amount: BinScheme,
    pub total: BinScheme,
    pub principal: BinScheme,
    pub voucher: BinScheme,
    pub adjust: BinScheme,
}

impl Default for SchemeSet {
    fn default() -> Self {
        SchemeSet {
            amount: BinScheme::amount4(),
            total: BinScheme::total6(),
            principal: BinScheme::principal3(),
            voucher: BinScheme::voucher4(),
            adjust: BinScheme::adjust2(),
        }
    }
}

/// Per-account aggregates in raw numeric form.
#[derive(Debug, Clone, PartialEq)]
pub struct RawFeatureRow {
    pub account_no: String,
    pub sector: String,
    pub sanction_authority: String,
    pub min_dr: f64,
    pub max_dr: f64,
    pub total_dr: f64,
    pub dr_voucher_monthly_avg: f64,
    pub min_cr: f64,
    pub max_cr: f64,
    pub total_cr: f64,
    pub cr_voucher_monthly_avg: f64,
    pub principal_amount: f64,
    pub adjusted: bool,
}

/// Aggregates one account's filtered transactions into a raw feature row.
///
/// Outstanding principal is the drawn (debit) total net of repayments, and a
/// loan counts as adjusted when repayment credits cover the drawn total.
pub fn aggregate_features(
    transactions: &[TransactionRecord],
    profile: &AccountProfile,
    window_months: u32,
) -> RawFeatureRow {
    assert!(window_months >= 1, "window_months must be >= 1");
    let months = f64::from(window_months);

    let side_stats = |side: TxSide| -> (f64, f64, f64, f64) {
        let mut min = f64::INFINITY;
        let mut max = 0.0_f64;
        let mut total = 0.0_f64;
        let mut count = 0_u32;
        for tx in transactions.iter().filter(|t| t.side == side) {
            min = min.min(tx.amount);
            max = max.max(tx.amount);
            total += tx.amount;
            count += 1;
        }
        if count == 0 {
            (0.0, 0.0, 0.0, 0.0)
        } else {
            (min, max, total, f64::from(count) / months)
        }
    };

    let (min_dr, max_dr, total_dr, dr_avg) = side_stats(TxSide::Debit);
    let (min_cr, max_cr, total_cr, cr_avg) = side_stats(TxSide::Credit);

    RawFeatureRow {
        account_no: profile.account_no.clone(),
        sector: profile.sector.clone(),
        sanction_authority: profile.sanction_authority.clone(),
        min_dr,
        max_dr,
        total_dr,
        dr_voucher_monthly_avg: dr_avg,
        min_cr,
        max_cr,
        total_cr,
        cr_voucher_monthly_avg: cr_avg,
        principal_amount: (total_dr - total_cr).max(0.0),
        adjusted: total_dr > 0.0 && total_cr >= total_dr,
    }
}

/// Groups transactions by account and aggregates each profile, ordered by
/// account number. Transactions naming an unknown account are an error.
pub fn aggregate_all(
    transactions: &[TransactionRecord],
    profiles: &[AccountProfile],
    window_months: u32,
) -> Result<Vec<RawFeatureRow>, FeatureError> {
    let mut by_account: BTreeMap<&str, Vec<&TransactionRecord>> = BTreeMap::new();
    for tx in transactions {
        by_account.entry(tx.account_no.as_str()).or_default().push(tx);
    }
    for account_no in by_account.keys() {
        if !profiles.iter().any(|p| p.account_no == *account_no) {
            return Err(FeatureError::UnknownAccount(account_no.to_string()));
        }
    }
    let mut sorted: Vec<&AccountProfile> = profiles.iter().collect();
    sorted.sort_by(|a, b| a.account_no.cmp(&b.account_no));
    Ok(sorted
        .into_iter()
        .map(|profile| {
            let txs: Vec<TransactionRecord> = by_account
                .get(profile.account_no.as_str())
                .map(|v| v.iter().map(|t| (*t).clone()).collect())
                .unwrap_or_default();
            aggregate_features(&txs, profile, window_months)
        })
        .collect())
}

/// Why a feature column was dropped by the statistical filter.
#[derive(Debug, Clone, PartialEq)]
pub enum DropReason {
    SingleValued,
    NullFraction(f64),
}

impl fmt::Display for DropReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DropReason::SingleValued => write!(f, "single-valued"),
            DropReason::NullFraction(frac) => write!(f, "missing fraction {frac:.3}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FilterReport {
    pub dropped: Vec<(String, DropReason)>,
    pub degenerate_single_row: bool,
}

impl fmt::Display for FilterReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.degenerate_single_row {
            writeln!(f, "warning: single-row dataset, every column is trivially constant")?;
        }
        if self.dropped.is_empty() {
            writeln!(f, "statistical filter: all columns retained")?;
        }
        for (name, reason) in &self.dropped {
            writeln!(f, "statistical filter: dropped {name} ({reason})")?;
        }
        Ok(())
    }
}

/// Feature columns examined by [`statistical_filter`], in table order.
pub const FILTERABLE_COLUMNS: [&str; 12] = [
    "Sector",
    "SanctionAuthor",
    "minDrAmount",
    "maxDrAmount",
    "totalDrAmount",
    "drVoucherNo",
    "minCrAmount",
    "maxCrAmount",
    "totalCrAmount",
    "crVoucherNo",
    "PrincipalAmount",
    "adjustNo",
];

fn raw_cell(row: &RawFeatureRow, column: &str) -> String {
    match column {
        "Sector" => row.sector.clone(),
        "SanctionAuthor" => row.sanction_authority.clone(),
        "minDrAmount" => row.min_dr.to_string(),
        "maxDrAmount" => row.max_dr.to_string(),
        "totalDrAmount" => row.total_dr.to_string(),
        "drVoucherNo" => row.dr_voucher_monthly_avg.to_string(),
        "minCrAmount" => row.min_cr.to_string(),
        "maxCrAmount" => row.max_cr.to_string(),
        "totalCrAmount" => row.total_cr.to_string(),
        "crVoucherNo" => row.cr_voucher_monthly_avg.to_string(),
        "PrincipalAmount" => row.principal_amount.to_string(),
        "adjustNo" => row.adjusted.to_string(),
        other => panic!("unknown feature column {other}"),
    }
}

/// Drops degenerate feature columns: any column that holds a single value
/// across all rows, and any column whose missing-value fraction reaches the
/// threshold. Categorical cells are missing when empty; numeric cells are
/// never missing (nulls were normalized to zero at parse time).
pub fn statistical_filter(
    rows: &[RawFeatureRow],
    null_fraction_threshold: f64,
) -> Result<(Vec<String>, FilterReport), FeatureError> {
    if rows.is_empty() {
        return Err(FeatureError::EmptyDataset);
    }
    let mut retained = Vec::new();
    let mut dropped = Vec::new();
    for column in FILTERABLE_COLUMNS {
        let values: Vec<String> = rows.iter().map(|r| raw_cell(r, column)).collect();
        let missing = values.iter().filter(|v| v.trim().is_empty()).count();
        let null_fraction = missing as f64 / values.len() as f64;
        if null_fraction >= null_fraction_threshold {
            dropped.push((column.to_string(), DropReason::NullFraction(null_fraction)));
        } else if values.iter().all(|v| *v == values[0]) {
            dropped.push((column.to_string(), DropReason::SingleValued));
        } else {
            retained.push(column.to_string());
        }
    }
    let report = FilterReport {
        dropped,
        degenerate_single_row: rows.len() == 1,
    };
    Ok((retained, report))
}

/// Attribute value as a percentage of the sanction amount.
pub fn turnover(attribute_value: f64, sanction_amount: f64) -> Result<f64, FeatureError> {
    if sanction_amount <= 0.0 || !sanction_amount.is_finite() {
        return Err(FeatureError::NonPositiveSanction(sanction_amount));
    }
    Ok(attribute_value / sanction_amount * 100.0)
}

/// Named component weights for the composite score. Weights must be
/// non-negative and sum to one.
#[derive(Debug, Clone, PartialEq)]
pub struct ScoreWeights(pub BTreeMap<String, f64>);

impl Default for ScoreWeights {
    fn default() -> Self {
        ScoreWeights(
            [
                ("repayment", 0.35),
                ("peak_credit", 0.15),
                ("activity", 0.15),
                ("principal_headroom", 0.20),
                ("adjustment", 0.15),
            ]
            .into_iter()
            .map(|(k, v)| (k.to_string(), v))
            .collect(),
        )
    }
}

const WEIGHT_SUM_TOLERANCE: f64 = 1e-9;

/// Weighted composite of component scores, clamped to [0, 100].
pub fn compute_score(
    components: &BTreeMap<String, f64>,
    weights: &ScoreWeights,
) -> Result<f64, FeatureError> {
    if weights.0.is_empty() {
        return Err(FeatureError::InvalidWeights("no weights configured".into()));
    }
    let sum: f64 = weights.0.values().sum();
    if (sum - 1.0).abs() > WEIGHT_SUM_TOLERANCE {
        return Err(FeatureError::InvalidWeights(format!(
            "weights sum to {sum}, expected 1"
        )));
    }
    if let Some((name, w)) = weights.0.iter().find(|(_, w)| **w < 0.0) {
        return Err(FeatureError::InvalidWeights(format!(
            "negative weight {w} for {name}"
        )));
    }
    let mut score = 0.0;
    for (name, weight) in &weights.0 {
        let component = components.get(name).ok_or_else(|| {
            FeatureError::InvalidWeights(format!("no component score for weight {name}"))
        })?;
        score += weight * component;
    }
    Ok(score.clamp(0.0, 100.0))
}

/// Default component scores derived from one raw row, each in [0, 100].
///
/// These stand in for the expert scoring rubric the label thresholds assume;
/// the rubric itself is not recoverable, so the components are documented,
/// illustrative behaviour measures: repayment and peak-credit turnover,
/// credit activity, remaining principal headroom and settlement.
pub fn component_scores(
    row: &RawFeatureRow,
    sanction_limit: f64,
) -> Result<BTreeMap<String, f64>, FeatureError> {
    let repayment = turnover(row.total_cr, sanction_limit)?.min(100.0);
    let peak_credit = turnover(row.max_cr, sanction_limit)?.min(100.0);
    let activity = (row.cr_voucher_monthly_avg * 10.0).min(100.0);
    let principal_headroom = 100.0 - turnover(row.principal_amount, sanction_limit)?.min(100.0);
    let adjustment = if row.adjusted { 100.0 } else { 0.0 };
    Ok([
        ("repayment", repayment),
        ("peak_credit", peak_credit),
        ("activity", activity),
        ("principal_headroom", principal_headroom),
        ("adjustment", adjustment),
    ]
    .into_iter()
    .map(|(k, v)| (k.to_string(), v))
    .collect())
}

/// Maps a score in [0, 100] to the five-level label:
/// >= 90 Excellent, >= 80 Very Good, >= 70 Good, >= 60 Marginal, else Bad.
pub fn assign_class_label(score: f64) -> Result<ClassLabel, FeatureError> {
    if !(0.0..=100.0).contains(&score) {
        return Err(FeatureError::OutOfRange(score));
    }
    Ok(if score >= 90.0 {
        ClassLabel::Excellent
    } else if score >= 80.0 {
        ClassLabel::VeryGood
    } else if score >= 70.0 {
        ClassLabel::Good
    } else if score >= 60.0 {
        ClassLabel::Marginal
    } else {
        ClassLabel::Bad
    })
}

/// One account's discretized feature row, column for column the shape of the
/// output table.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscretizedRow {
    pub account_no: String,
    pub sector: String,
    pub sanction_authority: String,
    pub min_dr_amount: String,
    pub max_dr_amount: String,
    pub total_dr_amount: String,
    pub dr_voucher_no: String,
    pub min_cr_amount: String,
    pub max_cr_amount: String,
    pub total_cr_amount: String,
    pub cr_voucher_no: String,
    pub principal_amount: String,
    pub adjust_no: String,
    pub class_label: ClassLabel,
}

/// Output table header, in order.
pub const DISCRETIZED_COLUMNS: [&str; 14] = [
    "AccountNo",
    "Sector",
    "SanctionAuthor",
    "minDrAmount",
    "maxDrAmount",
    "totalDrAmount",
    "drVoucherNo",
    "minCrAmount",
    "maxCrAmount",
    "totalCrAmount",
    "crVoucherNo",
    "PrincipalAmount",
    "adjustNo",
    "Class_Label",
];

impl DiscretizedRow {
    pub fn to_record(&self) -> Vec<String> {
        vec![
            self.account_no.clone(),
            self.sector.clone(),
            self.sanction_authority.clone(),
            self.min_dr_amount.clone(),
            self.max_dr_amount.clone(),
            self.total_dr_amount.clone(),
            self.dr_voucher_no.clone(),
            self.min_cr_amount.clone(),
            self.max_cr_amount.clone(),
            self.total_cr_amount.clone(),
            self.cr_voucher_no.clone(),
            self.principal_amount.clone(),
            self.adjust_no.clone(),
            self.class_label.to_string(),
        ]
    }
}

/// Discretizes one raw row: turnover bins for amounts and principal, count
/// bins for the voucher averages, the two-way adjustment bin, plus the label.
pub fn discretize_row(
    row: &RawFeatureRow,
    sanction_limit: f64,
    schemes: &SchemeSet,
    class_label: ClassLabel,
) -> Result<DiscretizedRow, FeatureError> {
    let turn = |v: f64| turnover(v, sanction_limit);
    Ok(DiscretizedRow {
        account_no: row.account_no.clone(),
        sector: row.sector.clone(),
        sanction_authority: row.sanction_authority.clone(),
        min_dr_amount: discretize(turn(row.min_dr)?, &schemes.amount)?.to_string(),
        max_dr_amount: discretize(turn(row.max_dr)?, &schemes.amount)?.to_string(),
        total_dr_amount: discretize(turn(row.total_dr)?, &schemes.total)?.to_string(),
        dr_voucher_no: discretize(row.dr_voucher_monthly_avg, &schemes.voucher)?.to_string(),
        min_cr_amount: discretize(turn(row.min_cr)?, &schemes.amount)?.to_string(),
        max_cr_amount: discretize(turn(row.max_cr)?, &schemes.amount)?.to_string(),
        total_cr_amount: discretize(turn(row.total_cr)?, &schemes.total)?.to_string(),
        cr_voucher_no: discretize(row.cr_voucher_monthly_avg, &schemes.voucher)?.to_string(),
        principal_amount: discretize(turn(row.principal_amount)?, &schemes.principal)?.to_string(),
        adjust_no: discretize(if row.adjusted { 1.0 } else { 0.0 }, &schemes.adjust)?.to_string(),
        class_label,
    })
}

/// Full per-row scoring path: component scores, weighted composite, label.
pub fn label_row(
    row: &RawFeatureRow,
    sanction_limit: f64,
    weights: &ScoreWeights,
) -> Result<ClassLabel, FeatureError> {
    let components = component_scores(row, sanction_limit)?;
    let score = compute_score(&components, weights)?;
    assign_class_label(score)
}
