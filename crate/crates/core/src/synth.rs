//! Deterministic synthetic account and transaction generator.
//!
//! Stands in for the confidential source data. Sector behaviour profiles
//! are illustrative, tuned so the default mix produces the expected quality
//! ordering (rice and flour mills strongest, wholesale and retail trade
//! next); they are not claims about real banking behaviour.

use chrono::{Duration, NaiveDate};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::ingest::{AccountProfile, TransactionRecord, TxSide};

#[derive(Debug, Error, PartialEq)]
pub enum SynthError {
    #[error("invalid profile: {0}")]
    InvalidProfile(String),
}

/// Behaviour profile for one business sector.
#[derive(Debug, Clone, PartialEq)]
pub struct SectorProfile {
    pub name: String,
    /// Share of accounts drawn from this sector.
    pub weight: f64,
    pub limit_range: (f64, f64),
    /// Credit vouchers per month, inclusive range.
    pub monthly_credits: (u32, u32),
    /// Total credits over the window as a multiple of the sanction limit.
    pub cycle_range: (f64, f64),
    /// Re-drawn debits as a fraction of the credited total.
    pub redraw_range: (f64, f64),
    /// Chance of one large lump-sum credit (0.3 to 0.9 of the limit).
    pub bulk_credit_prob: f64,
    /// Chance the balance is driven past the sanction limit.
    pub overdraw_prob: f64,
}

impl SectorProfile {
    #[allow(clippy::too_many_arguments)]
    fn new(
        name: &str,
        weight: f64,
        limit_range: (f64, f64),
        monthly_credits: (u32, u32),
        cycle_range: (f64, f64),
        redraw_range: (f64, f64),
        bulk_credit_prob: f64,
        overdraw_prob: f64,
    ) -> SectorProfile {
        SectorProfile {
            name: name.to_string(),
            weight,
            limit_range,
            monthly_credits,
            cycle_range,
            redraw_range,
            bulk_credit_prob,
            overdraw_prob,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SynthProfile {
    pub sectors: Vec<SectorProfile>,
    pub disburse_from: NaiveDate,
    pub disburse_to: NaiveDate,
    /// Share of accounts generated with a non-Active status.
    pub inactive_fraction: f64,
    pub window_months: u32,
}

impl Default for SynthProfile {
    fn default() -> Self {
        SynthProfile {
            sectors: vec![
                SectorProfile::new(
                    "Other",
                    0.20,
                    (100_000.0, 800_000.0),
                    (0, 3),
                    (0.05, 1.2),
                    (0.0, 0.4),
                    0.10,
                    0.40,
                ),
                SectorProfile::new(
                    "RiceandFlowerMills",
                    0.20,
                    (500_000.0, 4_000_000.0),
                    (6, 12),
                    (1.5, 6.0),
                    (0.4, 0.9),
                    0.70,
                    0.02,
                ),
                SectorProfile::new(
                    "RetailTraders",
                    0.20,
                    (100_000.0, 1_200_000.0),
                    (3, 8),
                    (0.5, 3.0),
                    (0.3, 0.8),
                    0.35,
                    0.15,
                ),
                SectorProfile::new(
                    "WholeSeller",
                    0.20,
                    (400_000.0, 2_500_000.0),
                    (4, 10),
                    (1.0, 4.5),
                    (0.4, 0.85),
                    0.55,
                    0.05,
                ),
                SectorProfile::new(
                    "BusinessmanIndustrialist",
                    0.20,
                    (300_000.0, 2_000_000.0),
                    (1, 5),
                    (0.3, 2.0),
                    (0.2, 0.7),
                    0.25,
                    0.25,
                ),
            ],
            disburse_from: NaiveDate::from_ymd_opt(2013, 1, 1).unwrap(),
            disburse_to: NaiveDate::from_ymd_opt(2013, 12, 31).unwrap(),
            inactive_fraction: 0.05,
            window_months: 6,
        }
    }
}

impl SynthProfile {
    pub fn validate(&self) -> Result<(), SynthError> {
        if self.sectors.is_empty() {
            return Err(SynthError::InvalidProfile("no sectors".to_string()));
        }
        let sum: f64 = self.sectors.iter().map(|s| s.weight).sum();
        if (sum - 1.0).abs() > 1e-6 {
            return Err(SynthError::InvalidProfile(format!(
                "sector weights sum to {sum}, expected 1"
            )));
        }
        for s in &self.sectors {
            if s.weight < 0.0 {
                return Err(SynthError::InvalidProfile(format!(
                    "negative weight for {}",
                    s.name
                )));
            }
            if s.limit_range.0 <= 0.0 || s.limit_range.0 > s.limit_range.1 {
                return Err(SynthError::InvalidProfile(format!(
                    "bad limit range for {}",
                    s.name
                )));
            }
            if s.monthly_credits.0 > s.monthly_credits.1 {
                return Err(SynthError::InvalidProfile(format!(
                    "bad credit count range for {}",
                    s.name
                )));
            }
            if s.cycle_range.0 < 0.0 || s.cycle_range.0 > s.cycle_range.1 {
                return Err(SynthError::InvalidProfile(format!(
                    "bad cycle range for {}",
                    s.name
                )));
            }
            if s.redraw_range.0 < 0.0 || s.redraw_range.1 > 1.0 || s.redraw_range.0 > s.redraw_range.1
            {
                return Err(SynthError::InvalidProfile(format!(
                    "bad redraw range for {}",
                    s.name
                )));
            }
            if !(0.0..=1.0).contains(&s.bulk_credit_prob) || !(0.0..=1.0).contains(&s.overdraw_prob)
            {
                return Err(SynthError::InvalidProfile(format!(
                    "probabilities out of range for {}",
                    s.name
                )));
            }
        }
        if !(0.0..1.0).contains(&self.inactive_fraction) {
            return Err(SynthError::InvalidProfile(
                "inactive fraction must be in [0, 1)".to_string(),
            ));
        }
        if self.disburse_from > self.disburse_to {
            return Err(SynthError::InvalidProfile(
                "disburse window is reversed".to_string(),
            ));
        }
        if self.window_months == 0 {
            return Err(SynthError::InvalidProfile(
                "window months must be at least 1".to_string(),
            ));
        }
        Ok(())
    }
}

fn pick_sector<'p>(profile: &'p SynthProfile, rng: &mut ChaCha8Rng) -> &'p SectorProfile {
    let draw: f64 = rng.gen();
    let mut acc = 0.0;
    for sector in &profile.sectors {
        acc += sector.weight;
        if draw < acc {
            return sector;
        }
    }
    profile.sectors.last().expect("validated non-empty")
}

/// Generates `n` accounts with their transaction histories, reproducible
/// per seed.
pub fn generate(
    profile: &SynthProfile,
    seed: u64,
    n: usize,
) -> Result<(Vec<AccountProfile>, Vec<TransactionRecord>), SynthError> {
    if n < 1 {
        return Err(SynthError::InvalidProfile(
            "need at least one account".to_string(),
        ));
    }
    profile.validate()?;

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut accounts = Vec::with_capacity(n);
    let mut transactions = Vec::new();
    let disburse_span = (profile.disburse_to - profile.disburse_from).num_days();

    for i in 0..n {
        let sector = pick_sector(profile, &mut rng).clone();
        let account_no = format!("{}", 2_011_000_000u64 + i as u64);
        let limit_raw = rng.gen_range(sector.limit_range.0..=sector.limit_range.1);
        let sanction_limit = (limit_raw / 1000.0).round().max(1.0) * 1000.0;
        let disburse_date =
            profile.disburse_from + Duration::days(rng.gen_range(0..=disburse_span));
        let status = if rng.gen::<f64>() < profile.inactive_fraction {
            "Closed"
        } else {
            "Active"
        };
        accounts.push(AccountProfile {
            account_no: account_no.clone(),
            title: format!("{} trading A/C {}", sector.name, i + 1),
            sector: sector.name.clone(),
            sanction_authority: if rng.gen_bool(0.7) { "RO" } else { "DO" }.to_string(),
            sanction_limit,
            disburse_date,
            status: status.to_string(),
            expert_score: None,
        });

        // drawdown in one to three debit tranches over the first weeks
        let drawn = sanction_limit * rng.gen_range(0.6..=1.0);
        let tranches = rng.gen_range(1..=3u32);
        for t in 0..tranches {
            transactions.push(TransactionRecord {
                account_no: account_no.clone(),
                tx_date: disburse_date + Duration::days(i64::from(t) * 14),
                tx_type_code: if t == 0 { 30 } else { 1 },
                side: TxSide::Debit,
                amount: (drawn / f64::from(tranches)).round(),
                system_generated: false,
                narrative: None,
            });
        }

        // deposit credits cycling through the account, occasionally one
        // lump sum; total volume is a sector-dependent multiple of the limit
        let mut credit_target =
            sanction_limit * rng.gen_range(sector.cycle_range.0..=sector.cycle_range.1);
        let mut credits: Vec<(NaiveDate, f64)> = Vec::new();
        if rng.gen_bool(sector.bulk_credit_prob) {
            let bulk = sanction_limit * rng.gen_range(0.3..=0.9);
            if bulk < credit_target {
                let day = rng.gen_range(30..=150i64);
                credits.push((disburse_date + Duration::days(day), bulk));
                credit_target -= bulk;
            }
        }
        let mut small_credit_dates = Vec::new();
        for month in 0..profile.window_months {
            let count = rng.gen_range(sector.monthly_credits.0..=sector.monthly_credits.1);
            for _ in 0..count {
                let day = rng.gen_range(1..=27i64);
                small_credit_dates.push(disburse_date + Duration::days(i64::from(month) * 30 + day));
            }
        }
        if !small_credit_dates.is_empty() {
            let weights: Vec<f64> =
                small_credit_dates.iter().map(|_| rng.gen_range(0.5..1.5)).collect();
            let weight_sum: f64 = weights.iter().sum();
            for (date, weight) in small_credit_dates.into_iter().zip(weights) {
                credits.push((date, credit_target * weight / weight_sum));
            }
        }
        let credited: f64 = credits.iter().map(|(_, a)| a.round().max(0.0)).sum();
        for (date, amount) in credits {
            let code = *[1u32, 2, 11, 29].get(rng.gen_range(0..4)).unwrap();
            transactions.push(TransactionRecord {
                account_no: account_no.clone(),
                tx_date: date,
                tx_type_code: code,
                side: TxSide::Credit,
                amount: amount.round().max(0.0),
                system_generated: false,
                narrative: None,
            });
        }

        // redrawn debits against the credited volume, sometimes pushing the
        // balance past the limit
        let mut redraw = credited * rng.gen_range(sector.redraw_range.0..=sector.redraw_range.1);
        if rng.gen_bool(sector.overdraw_prob) {
            redraw += sanction_limit * rng.gen_range(0.1..=0.5) + (credited - redraw).max(0.0);
        }
        if redraw >= 1.0 {
            let n_debits = rng.gen_range(1..=profile.window_months.max(1) * 2);
            for _ in 0..n_debits {
                let day = rng.gen_range(5..=i64::from(profile.window_months) * 30 - 1);
                transactions.push(TransactionRecord {
                    account_no: account_no.clone(),
                    tx_date: disburse_date + Duration::days(day.max(5)),
                    tx_type_code: *[1u32, 3, 30].get(rng.gen_range(0..3)).unwrap(),
                    side: TxSide::Debit,
                    amount: (redraw / f64::from(n_debits)).round(),
                    system_generated: false,
                    narrative: None,
                });
            }
        }

        // bank-side noise the ingest filters must remove
        if rng.gen_bool(0.5) {
            transactions.push(TransactionRecord {
                account_no: account_no.clone(),
                tx_date: disburse_date + Duration::days(45),
                tx_type_code: 1,
                side: TxSide::Debit,
                amount: (sanction_limit * 0.001).round(),
                system_generated: true,
                narrative: Some("Interest".to_string()),
            });
        }
        if rng.gen_bool(0.3) {
            transactions.push(TransactionRecord {
                account_no: account_no.clone(),
                tx_date: disburse_date + Duration::days(20),
                tx_type_code: 99,
                side: TxSide::Credit,
                amount: 500.0,
                system_generated: false,
                narrative: None,
            });
        }
    }
    Ok((accounts, transactions))
}
