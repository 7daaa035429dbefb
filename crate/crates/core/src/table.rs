//! Delimited-table helpers shared by the pipeline stages: generic
//! read/write plus the mapping between discretized tables and training
//! datasets.

use std::io;
use std::str::FromStr;

use csv::Trim;
use thiserror::Error;

use crate::features::{ClassLabel, DiscretizedRow, DISCRETIZED_COLUMNS};
use crate::tree::{Attribute, Dataset, TreeError};

#[derive(Debug, Error)]
pub enum TableError {
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error("missing required column {0:?}")]
    MissingColumn(String),
    #[error("line {line}: {reason}")]
    BadCell { line: u64, reason: String },
    #[error("table has no attribute columns")]
    NoAttributes,
    #[error(transparent)]
    Tree(#[from] TreeError),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub headers: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn column(&self, name: &str) -> Option<usize> {
        self.headers.iter().position(|h| h == name)
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }
}

pub fn read_table<R: io::Read>(source: R, delimiter: u8) -> Result<Table, TableError> {
    let mut reader = csv::ReaderBuilder::new()
        .delimiter(delimiter)
        .trim(Trim::All)
        .flexible(false)
        .from_reader(source);
    let headers = reader
        .headers()?
        .iter()
        .map(|h| h.trim().to_string())
        .collect();
    let mut rows = Vec::new();
    for record in reader.records() {
        let record = record?;
        rows.push(record.iter().map(|c| c.to_string()).collect());
    }
    Ok(Table { headers, rows })
}

pub fn write_table<W: io::Write>(
    out: W,
    headers: &[String],
    rows: &[Vec<String>],
    delimiter: u8,
) -> Result<(), TableError> {
    let mut writer = csv::WriterBuilder::new().delimiter(delimiter).from_writer(out);
    writer.write_record(headers)?;
    for row in rows {
        writer.write_record(row)?;
    }
    writer.flush().map_err(csv::Error::from)?;
    Ok(())
}

/// Builds a training dataset from a discretized table: `Class_Label` is the
/// target, `AccountNo` (when present) is kept aside as the row identifier,
/// every other column is a categorical attribute with its value set in
/// first-appearance order. Returns the dataset and the aligned identifiers.
pub fn dataset_from_table(table: &Table) -> Result<(Dataset, Vec<String>), TableError> {
    let class_idx = table
        .column("Class_Label")
        .ok_or_else(|| TableError::MissingColumn("Class_Label".to_string()))?;
    let account_idx = table.column("AccountNo");
    let attribute_indices: Vec<usize> = (0..table.headers.len())
        .filter(|&i| i != class_idx && Some(i) != account_idx)
        .collect();
    if attribute_indices.is_empty() {
        return Err(TableError::NoAttributes);
    }

    let mut attributes: Vec<Attribute> = attribute_indices
        .iter()
        .map(|&i| Attribute::new(table.headers[i].clone(), Vec::new()))
        .collect();
    let mut rows: Vec<(Vec<String>, ClassLabel)> = Vec::with_capacity(table.rows.len());
    let mut ids = Vec::with_capacity(table.rows.len());
    for (row_no, row) in table.rows.iter().enumerate() {
        let line = row_no as u64 + 2;
        let label = ClassLabel::from_str(&row[class_idx])
            .map_err(|reason| TableError::BadCell { line, reason })?;
        let values: Vec<String> = attribute_indices.iter().map(|&i| row[i].clone()).collect();
        for (attr, value) in attributes.iter_mut().zip(&values) {
            if !attr.values.iter().any(|v| v == value) {
                attr.values.push(value.clone());
            }
        }
        rows.push((values, label));
        ids.push(match account_idx {
            Some(i) => row[i].clone(),
            None => (row_no + 1).to_string(),
        });
    }
    Ok((Dataset::new(attributes, rows)?, ids))
}

/// Serializes discretized rows into the output table shape.
pub fn discretized_to_table(rows: &[DiscretizedRow]) -> Table {
    Table {
        headers: DISCRETIZED_COLUMNS.iter().map(|s| s.to_string()).collect(),
        rows: rows.iter().map(DiscretizedRow::to_record).collect(),
    }
}
