//! Plain-text key=value pipeline configuration.
//!
//! Lines are `key = value`; blank lines and `#` comments are ignored. Every
//! key has a documented default, so an empty configuration runs the
//! reference setup: six-month observation windows inside the 2013-01-01 to
//! 2014-06-30 transaction period, the built-in bin schemes, gain-ratio
//! selection with a minimum leaf of 2, and pruning at confidence 0.25.

use std::collections::{BTreeMap, BTreeSet};
use std::str::FromStr;

use chrono::NaiveDate;
use thiserror::Error;

use crate::features::{BinScheme, SchemeSet, ScoreWeights};
use crate::ingest::{default_allowed_codes, WindowSpec, DEFAULT_NARRATIVE_BLOCKLIST};
use crate::prune::PruneConfig;
use crate::synth::SynthProfile;
use crate::tree::{SplitCriterion, TreeConfig, UnseenValuePolicy};

#[derive(Debug, Error, PartialEq)]
pub enum ConfigError {
    #[error("line {line}: expected key=value, got {content:?}")]
    BadLine { line: usize, content: String },
    #[error("unknown configuration key {0:?}")]
    UnknownKey(String),
    #[error("bad value for {key}: {reason}")]
    BadValue { key: String, reason: String },
}

/// Parses the key=value text into an ordered map. Later occurrences of a
/// key override earlier ones.
pub fn parse_key_values(text: &str) -> Result<BTreeMap<String, String>, ConfigError> {
    let mut map = BTreeMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(ConfigError::BadLine {
                line: i + 1,
                content: raw.to_string(),
            });
        };
        map.insert(key.trim().to_string(), value.trim().to_string());
    }
    Ok(map)
}

#[derive(Debug, Clone, PartialEq)]
pub struct PipelineConfig {
    pub delimiter: u8,
    /// Transaction selection period.
    pub tx_window: WindowSpec,
    /// Admissible loan disburse dates.
    pub disburse_window: WindowSpec,
    /// Per-account observation window length in calendar months.
    pub window_months: u32,
    pub allowed_codes: BTreeSet<u32>,
    pub narrative_blocklist: Vec<String>,
    pub null_fraction_threshold: f64,
    pub schemes: SchemeSet,
    pub score_weights: ScoreWeights,
    pub tree: TreeConfig,
    pub prune: PruneConfig,
    pub folds: usize,
    pub seed: u64,
    pub synth: SynthProfile,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        let date = |y, m, d| NaiveDate::from_ymd_opt(y, m, d).unwrap();
        PipelineConfig {
            delimiter: b',',
            tx_window: WindowSpec::new(date(2013, 1, 1), date(2014, 6, 30)).unwrap(),
            disburse_window: WindowSpec::new(date(2013, 1, 1), date(2013, 12, 31)).unwrap(),
            window_months: 6,
            allowed_codes: default_allowed_codes(),
            narrative_blocklist: DEFAULT_NARRATIVE_BLOCKLIST
                .iter()
                .map(|s| s.to_string())
                .collect(),
            null_fraction_threshold: 0.09,
            schemes: SchemeSet::default(),
            score_weights: ScoreWeights::default(),
            tree: TreeConfig::default(),
            prune: PruneConfig::default(),
            folds: 10,
            seed: 42,
            synth: SynthProfile::default(),
        }
    }
}

fn bad(key: &str, reason: impl Into<String>) -> ConfigError {
    ConfigError::BadValue {
        key: key.to_string(),
        reason: reason.into(),
    }
}

fn parse_number<T: FromStr>(key: &str, value: &str) -> Result<T, ConfigError> {
    value
        .parse()
        .map_err(|_| bad(key, format!("cannot parse {value:?}")))
}

fn parse_date_value(key: &str, value: &str) -> Result<NaiveDate, ConfigError> {
    NaiveDate::parse_from_str(value, "%Y-%m-%d")
        .map_err(|_| bad(key, format!("expected YYYY-MM-DD, got {value:?}")))
}

fn parse_bool(key: &str, value: &str) -> Result<bool, ConfigError> {
    match value.to_ascii_lowercase().as_str() {
        "true" | "yes" | "1" | "on" => Ok(true),
        "false" | "no" | "0" | "off" => Ok(false),
        other => Err(bad(key, format!("expected true/false, got {other:?}"))),
    }
}

/// Bin scheme syntax: `bound:Label,...,inf:LastLabel`.
fn parse_scheme(key: &str, name: &str, value: &str) -> Result<BinScheme, ConfigError> {
    let mut bins = Vec::new();
    for part in value.split(',') {
        let (bound, label) = part
            .split_once(':')
            .ok_or_else(|| bad(key, format!("expected bound:label, got {part:?}")))?;
        let bound = bound.trim();
        let upper = if bound.eq_ignore_ascii_case("inf") {
            f64::INFINITY
        } else {
            bound
                .parse()
                .map_err(|_| bad(key, format!("bad bound {bound:?}")))?
        };
        bins.push((upper, label.trim().to_string()));
    }
    BinScheme::new(name, bins).map_err(|e| bad(key, e.to_string()))
}

impl PipelineConfig {
    pub fn from_key_values(map: &BTreeMap<String, String>) -> Result<PipelineConfig, ConfigError> {
        let mut config = PipelineConfig::default();
        let mut tx_from = config.tx_window.from_date;
        let mut tx_to = config.tx_window.to_date;
        let mut disburse_from = config.disburse_window.from_date;
        let mut disburse_to = config.disburse_window.to_date;
        let mut weights: Option<BTreeMap<String, f64>> = None;

        for (key, value) in map {
            match key.as_str() {
                "delimiter" => {
                    let bytes = value.as_bytes();
                    if bytes.len() != 1 {
                        return Err(bad(key, "delimiter must be one byte"));
                    }
                    config.delimiter = bytes[0];
                }
                "window.from" => tx_from = parse_date_value(key, value)?,
                "window.to" => tx_to = parse_date_value(key, value)?,
                "disburse.from" => disburse_from = parse_date_value(key, value)?,
                "disburse.to" => disburse_to = parse_date_value(key, value)?,
                "window.months" => {
                    config.window_months = parse_number(key, value)?;
                    if config.window_months == 0 {
                        return Err(bad(key, "must be at least 1"));
                    }
                }
                "codes.allowed" => {
                    let mut codes = BTreeSet::new();
                    for part in value.split(',').filter(|p| !p.trim().is_empty()) {
                        codes.insert(parse_number(key, part.trim())?);
                    }
                    if codes.is_empty() {
                        return Err(bad(key, "need at least one code"));
                    }
                    config.allowed_codes = codes;
                }
                "narrative.blocklist" => {
                    config.narrative_blocklist = value
                        .split(',')
                        .map(str::trim)
                        .filter(|s| !s.is_empty())
                        .map(str::to_string)
                        .collect();
                }
                "filter.null_threshold" => {
                    config.null_fraction_threshold = parse_number(key, value)?;
                }
                "bins.amount4" => config.schemes.amount = parse_scheme(key, "amount4", value)?,
                "bins.total6" => config.schemes.total = parse_scheme(key, "total6", value)?,
                "bins.principal3" => {
                    config.schemes.principal = parse_scheme(key, "principal3", value)?
                }
                "bins.voucher4" => config.schemes.voucher = parse_scheme(key, "voucher4", value)?,
                "bins.adjust2" => config.schemes.adjust = parse_scheme(key, "adjust2", value)?,
                "tree.criterion" => {
                    config.tree.criterion = match value.as_str() {
                        "gain-ratio" => SplitCriterion::GainRatio,
                        "info-gain" => SplitCriterion::InfoGain,
                        other => {
                            return Err(bad(key, format!(
                                "expected gain-ratio or info-gain, got {other:?}"
                            )))
                        }
                    };
                }
                "tree.min_leaf" => {
                    config.tree.min_leaf_count = parse_number(key, value)?;
                    if config.tree.min_leaf_count == 0 {
                        return Err(bad(key, "must be at least 1"));
                    }
                }
                "tree.mean_gain_prefilter" => {
                    config.tree.mean_gain_prefilter = parse_bool(key, value)?;
                }
                "tree.fallback" => {
                    config.tree.unseen_value_policy = match value.as_str() {
                        "majority" => UnseenValuePolicy::SubtreeMajority,
                        "error" => UnseenValuePolicy::Error,
                        other => {
                            return Err(bad(key, format!(
                                "expected majority or error, got {other:?}"
                            )))
                        }
                    };
                }
                "prune.enabled" => config.prune.enabled = parse_bool(key, value)?,
                "prune.confidence" => {
                    config.prune.confidence = parse_number(key, value)?;
                    config
                        .prune
                        .validate()
                        .map_err(|e| bad(key, e.to_string()))?;
                }
                "prune.slack" => config.prune.slack = parse_number(key, value)?,
                "eval.folds" => {
                    config.folds = parse_number(key, value)?;
                    if config.folds < 2 {
                        return Err(bad(key, "need at least 2 folds"));
                    }
                }
                "seed" => config.seed = parse_number(key, value)?,
                "synth.inactive_fraction" => {
                    config.synth.inactive_fraction = parse_number(key, value)?;
                }
                "synth.sectors" => {
                    let mut mix: Vec<(String, f64)> = Vec::new();
                    for part in value.split(',').filter(|p| !p.trim().is_empty()) {
                        let (name, weight) = part
                            .split_once(':')
                            .ok_or_else(|| bad(key, format!("expected name:weight, got {part:?}")))?;
                        mix.push((name.trim().to_string(), parse_number(key, weight.trim())?));
                    }
                    for sector in &mut config.synth.sectors {
                        sector.weight = 0.0;
                    }
                    for (name, weight) in mix {
                        let sector = config
                            .synth
                            .sectors
                            .iter_mut()
                            .find(|s| s.name == name)
                            .ok_or_else(|| bad(key, format!("unknown sector {name:?}")))?;
                        sector.weight = weight;
                    }
                    config.synth.validate().map_err(|e| bad(key, e.to_string()))?;
                }
                _ if key.starts_with("score.weight.") => {
                    let component = key.trim_start_matches("score.weight.").to_string();
                    weights
                        .get_or_insert_with(BTreeMap::new)
                        .insert(component, parse_number(key, value)?);
                }
                _ => return Err(ConfigError::UnknownKey(key.clone())),
            }
        }

        config.tx_window = WindowSpec::new(tx_from, tx_to)
            .map_err(|e| bad("window.from", e.to_string()))?;
        config.disburse_window = WindowSpec::new(disburse_from, disburse_to)
            .map_err(|e| bad("disburse.from", e.to_string()))?;
        // any score.weight.* key replaces the default weight set entirely
        if let Some(weights) = weights {
            config.score_weights = ScoreWeights(weights);
        }
        Ok(config)
    }

    pub fn from_text(text: &str) -> Result<PipelineConfig, ConfigError> {
        PipelineConfig::from_key_values(&parse_key_values(text)?)
    }
}
