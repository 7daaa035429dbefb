//! Parsing and filtering of account and transaction tables.
//!
//! Input files are delimited UTF-8 text with a mandatory header row; columns
//! are matched by name, not position. Dates are ISO 8601 (YYYY-MM-DD).
//! Missing amounts become zero at parse time so no record ever carries a
//! null amount downstream.

use std::collections::BTreeSet;
use std::io;

use chrono::{Months, NaiveDate};
use csv::Trim;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum IngestError {
    #[error("duplicate account {0}")]
    DuplicateAccount(String),
    #[error("malformed row at line {line}: {reason}")]
    MalformedRow { line: u64, reason: String },
    #[error("missing required column {0:?}")]
    MissingColumn(String),
    #[error("invalid window: from {from} is after to {to}")]
    InvalidWindow { from: NaiveDate, to: NaiveDate },
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

/// Static per-account facts.
#[derive(Debug, Clone, PartialEq)]
pub struct AccountProfile {
    pub account_no: String,
    pub title: String,
    pub sector: String,
    pub sanction_authority: String,
    pub sanction_limit: f64,
    pub disburse_date: NaiveDate,
    pub status: String,
    /// Optional precomputed expert score from an extra `score` column,
    /// overriding the configured composite when present.
    pub expert_score: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TxSide {
    Debit,
    Credit,
}

/// One dated debit/credit movement on an account.
#[derive(Debug, Clone, PartialEq)]
pub struct TransactionRecord {
    pub account_no: String,
    pub tx_date: NaiveDate,
    pub tx_type_code: u32,
    pub side: TxSide,
    pub amount: f64,
    pub system_generated: bool,
    /// Free-text description, when the table carries a `narrative` column.
    pub narrative: Option<String>,
}

/// Closed date interval, `from <= to`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct WindowSpec {
    pub from_date: NaiveDate,
    pub to_date: NaiveDate,
}

impl WindowSpec {
    pub fn new(from_date: NaiveDate, to_date: NaiveDate) -> Result<WindowSpec, IngestError> {
        if from_date > to_date {
            return Err(IngestError::InvalidWindow {
                from: from_date,
                to: to_date,
            });
        }
        Ok(WindowSpec { from_date, to_date })
    }

    pub fn contains(&self, date: NaiveDate) -> bool {
        self.from_date <= date && date <= self.to_date
    }

    /// Per-account observation window: calendar months from the disburse
    /// date, end date inclusive.
    pub fn observation(disburse_date: NaiveDate, months: u32) -> WindowSpec {
        let to = disburse_date
            .checked_add_months(Months::new(months))
            .unwrap_or(NaiveDate::MAX);
        WindowSpec {
            from_date: disburse_date,
            to_date: to,
        }
    }
}

/// Transaction type codes retained by default.
pub const DEFAULT_ALLOWED_CODES: [u32; 17] =
    [1, 2, 3, 4, 11, 12, 13, 18, 21, 22, 23, 24, 25, 26, 27, 29, 30];

pub fn default_allowed_codes() -> BTreeSet<u32> {
    DEFAULT_ALLOWED_CODES.into_iter().collect()
}

/// Narratives of bank-side postings excluded in addition to the explicit
/// `system_generated` flag.
pub const DEFAULT_NARRATIVE_BLOCKLIST: [&str; 13] = [
    "Incidental Charges",
    "Closing Charges",
    "Service Charges",
    "Interest",
    "Source Taxes on Interest",
    "Postage",
    "Inspection Charges",
    "Other Charges",
    "Value Added Tax",
    "Commission",
    "Insurance premium",
    "Error Correction",
    "Miscellaneous Adjustment",
];

struct Header {
    index: Vec<(String, usize)>,
}

impl Header {
    fn new(headers: &csv::StringRecord) -> Header {
        Header {
            index: headers
                .iter()
                .enumerate()
                .map(|(i, h)| (h.trim().to_string(), i))
                .collect(),
        }
    }

    fn required(&self, name: &str) -> Result<usize, IngestError> {
        self.optional(name)
            .ok_or_else(|| IngestError::MissingColumn(name.to_string()))
    }

    fn optional(&self, name: &str) -> Option<usize> {
        self.index
            .iter()
            .find(|(h, _)| h.eq_ignore_ascii_case(name))
            .map(|(_, i)| *i)
    }
}

fn field(record: &csv::StringRecord, idx: usize, line: u64) -> Result<&str, IngestError> {
    record.get(idx).ok_or_else(|| IngestError::MalformedRow {
        line,
        reason: format!("missing field {idx}"),
    })
}

fn parse_date(s: &str, line: u64) -> Result<NaiveDate, IngestError> {
    NaiveDate::parse_from_str(s, "%Y-%m-%d").map_err(|_| IngestError::MalformedRow {
        line,
        reason: format!("invalid date {s:?}, expected YYYY-MM-DD"),
    })
}

fn record_line(record: &csv::StringRecord) -> u64 {
    record.position().map(|p| p.line()).unwrap_or(0)
}

fn table_reader<R: io::Read>(source: R, delimiter: u8) -> csv::Reader<R> {
    csv::ReaderBuilder::new()
        .delimiter(delimiter)
        .trim(Trim::All)
        .flexible(false)
        .from_reader(source)
}

/// Parses the accounts table. Columns: account_no, title, sector,
/// sanction_authority, sanction_limit, disburse_date, status, plus an
/// optional score column.
pub fn parse_accounts<R: io::Read>(
    source: R,
    delimiter: u8,
) -> Result<Vec<AccountProfile>, IngestError> {
    let mut reader = table_reader(source, delimiter);
    let header = Header::new(reader.headers()?);
    let account_no = header.required("account_no")?;
    let title = header.required("title")?;
    let sector = header.required("sector")?;
    let authority = header.required("sanction_authority")?;
    let limit = header.required("sanction_limit")?;
    let disburse = header.required("disburse_date")?;
    let status = header.required("status")?;
    let score = header.optional("score");

    let mut accounts: Vec<AccountProfile> = Vec::new();
    let mut seen: BTreeSet<String> = BTreeSet::new();
    for record in reader.records() {
        let record = record?;
        let line = record_line(&record);
        let account = field(&record, account_no, line)?.to_string();
        if account.is_empty() {
            return Err(IngestError::MalformedRow {
                line,
                reason: "empty account_no".to_string(),
            });
        }
        if !seen.insert(account.clone()) {
            return Err(IngestError::DuplicateAccount(account));
        }
        let limit_raw = field(&record, limit, line)?;
        let sanction_limit: f64 = limit_raw.parse().map_err(|_| IngestError::MalformedRow {
            line,
            reason: format!("invalid sanction_limit {limit_raw:?}"),
        })?;
        if sanction_limit <= 0.0 || !sanction_limit.is_finite() {
            return Err(IngestError::MalformedRow {
                line,
                reason: format!("sanction_limit must be positive, got {sanction_limit}"),
            });
        }
        let expert_score = match score {
            Some(idx) => {
                let raw = field(&record, idx, line)?;
                if raw.is_empty() {
                    None
                } else {
                    Some(raw.parse().map_err(|_| IngestError::MalformedRow {
                        line,
                        reason: format!("invalid score {raw:?}"),
                    })?)
                }
            }
            None => None,
        };
        accounts.push(AccountProfile {
            account_no: account,
            title: field(&record, title, line)?.to_string(),
            sector: field(&record, sector, line)?.to_string(),
            sanction_authority: field(&record, authority, line)?.to_string(),
            sanction_limit,
            disburse_date: parse_date(field(&record, disburse, line)?, line)?,
            status: field(&record, status, line)?.to_string(),
            expert_score,
        });
    }
    Ok(accounts)
}

/// Parses the transactions table. Columns: account_no, tx_date,
/// tx_type_code, side, amount, system_generated, plus an optional narrative
/// column. Empty amounts become zero; original row order is kept.
pub fn parse_transactions<R: io::Read>(
    source: R,
    delimiter: u8,
) -> Result<Vec<TransactionRecord>, IngestError> {
    let mut reader = table_reader(source, delimiter);
    let header = Header::new(reader.headers()?);
    let account_no = header.required("account_no")?;
    let tx_date = header.required("tx_date")?;
    let tx_type_code = header.required("tx_type_code")?;
    let side = header.required("side")?;
    let amount = header.required("amount")?;
    let system_generated = header.required("system_generated")?;
    let narrative = header.optional("narrative");

    let mut records: Vec<TransactionRecord> = Vec::new();
    for record in reader.records() {
        let record = record?;
        let line = record_line(&record);
        let code_raw = field(&record, tx_type_code, line)?;
        let code: u32 = code_raw.parse().map_err(|_| IngestError::MalformedRow {
            line,
            reason: format!("invalid tx_type_code {code_raw:?}"),
        })?;
        let side_raw = field(&record, side, line)?;
        let side = match side_raw.to_ascii_lowercase().as_str() {
            "debit" | "dr" => TxSide::Debit,
            "credit" | "cr" => TxSide::Credit,
            other => {
                return Err(IngestError::MalformedRow {
                    line,
                    reason: format!("invalid side {other:?}, expected debit or credit"),
                })
            }
        };
        let amount_raw = field(&record, amount, line)?;
        let amount: f64 = if amount_raw.is_empty() {
            0.0
        } else {
            amount_raw.parse().map_err(|_| IngestError::MalformedRow {
                line,
                reason: format!("invalid amount {amount_raw:?}"),
            })?
        };
        if amount < 0.0 || !amount.is_finite() {
            return Err(IngestError::MalformedRow {
                line,
                reason: format!("amount must be non-negative, got {amount}"),
            });
        }
        let sysgen_raw = field(&record, system_generated, line)?;
        let system_generated = match sysgen_raw.to_ascii_lowercase().as_str() {
            "true" | "1" | "yes" => true,
            "false" | "0" | "no" | "" => false,
            other => {
                return Err(IngestError::MalformedRow {
                    line,
                    reason: format!("invalid system_generated flag {other:?}"),
                })
            }
        };
        records.push(TransactionRecord {
            account_no: field(&record, account_no, line)?.to_string(),
            tx_date: parse_date(field(&record, tx_date, line)?, line)?,
            tx_type_code: code,
            side,
            amount,
            system_generated,
            narrative: narrative
                .map(|idx| field(&record, idx, line).map(str::to_string))
                .transpose()?
                .filter(|n| !n.is_empty()),
        });
    }
    Ok(records)
}

/// Keeps Active accounts disbursed inside the window, order preserved.
pub fn select_active_window(accounts: &[AccountProfile], window: WindowSpec) -> Vec<AccountProfile> {
    accounts
        .iter()
        .filter(|a| a.status.eq_ignore_ascii_case("active") && window.contains(a.disburse_date))
        .cloned()
        .collect()
}

/// Keeps customer-driven records with an allowed type code inside the
/// window, order preserved.
pub fn filter_transactions(
    records: &[TransactionRecord],
    allowed_codes: &BTreeSet<u32>,
    window: WindowSpec,
) -> Vec<TransactionRecord> {
    records
        .iter()
        .filter(|r| {
            !r.system_generated
                && allowed_codes.contains(&r.tx_type_code)
                && window.contains(r.tx_date)
        })
        .cloned()
        .collect()
}

/// Drops records whose narrative matches a blocklist entry
/// (case-insensitive, trimmed). Records without a narrative pass through.
pub fn apply_narrative_blocklist(
    records: &[TransactionRecord],
    blocklist: &[String],
) -> Vec<TransactionRecord> {
    records
        .iter()
        .filter(|r| match &r.narrative {
            Some(n) => !blocklist
                .iter()
                .any(|b| b.trim().eq_ignore_ascii_case(n.trim())),
            None => true,
        })
        .cloned()
        .collect()
}
