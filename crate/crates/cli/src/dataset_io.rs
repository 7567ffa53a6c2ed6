//! The on-disk dataset format.
//!
//! Comma-separated text with a mandatory header `lot_id,is_prime,<feature
//! names...>` and one row per choice. Rows of one lot are consecutive and
//! share the lot_id; at most one row per lot carries is_prime=1. Feature
//! cells are decimals printed with enough digits to reload bit-exactly.
//!
//! Malformed input is rejected with the offending line number; a partial
//! dataset is never returned.

use std::collections::HashSet;
use std::path::Path;

use optchoice::{Choice, Dataset, Lot};

use crate::error::{CliError, CliResult};

/// An in-memory dataset plus the lot identifiers of its file form.
#[derive(Debug, Clone, PartialEq)]
pub struct DatasetFile {
    pub dataset: Dataset,
    pub lot_ids: Vec<String>,
}

impl DatasetFile {
    /// Wraps a dataset with synthesized identifiers lot001, lot002, ...
    pub fn with_default_ids(dataset: Dataset) -> Self {
        let width = dataset.num_lots().to_string().len().max(3);
        let lot_ids = (1..=dataset.num_lots())
            .map(|i| format!("lot{i:0width$}"))
            .collect();
        Self { dataset, lot_ids }
    }
}

pub fn load(path: &Path) -> CliResult<DatasetFile> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true) // column counts are checked per row for better errors
        .from_path(path)
        .map_err(|e| CliError::data(format!("{}: {e}", path.display())))?;

    let headers = reader
        .headers()
        .map_err(|e| CliError::data(format!("{}: {e}", path.display())))?
        .clone();
    if headers.len() < 3 || &headers[0] != "lot_id" || &headers[1] != "is_prime" {
        return Err(CliError::data(format!(
            "{}: line 1: header must start with lot_id,is_prime and name at least one feature",
            path.display()
        )));
    }
    let feature_names: Vec<String> = headers.iter().skip(2).map(str::to_string).collect();

    let mut lots: Vec<Lot> = Vec::new();
    let mut lot_ids: Vec<String> = Vec::new();
    let mut closed_ids: HashSet<String> = HashSet::new();

    // The lot currently being accumulated.
    let mut current_id: Option<String> = None;
    let mut current_choices: Vec<Choice> = Vec::new();
    let mut current_prime: Option<usize> = None;
    let mut current_first_line = 0u64;

    let flush = |id: Option<String>,
                     choices: &mut Vec<Choice>,
                     prime: &mut Option<usize>,
                     first_line: u64,
                     lots: &mut Vec<Lot>,
                     lot_ids: &mut Vec<String>,
                     closed: &mut HashSet<String>|
     -> CliResult<()> {
        if let Some(id) = id {
            let lot = Lot::new(std::mem::take(choices), prime.take()).map_err(|e| {
                CliError::data(format!("line {first_line}: lot {id}: {e}"))
            })?;
            lots.push(lot);
            closed.insert(id.clone());
            lot_ids.push(id);
        }
        Ok(())
    };

    for record in reader.records() {
        let record = record.map_err(|e| CliError::data(format!("{}: {e}", path.display())))?;
        let line = record
            .position()
            .map(|p| p.line())
            .unwrap_or_default();
        if record.len() != headers.len() {
            return Err(CliError::data(format!(
                "line {line}: expected {} columns, found {}",
                headers.len(),
                record.len()
            )));
        }
        let lot_id = record[0].to_string();
        if lot_id.is_empty() {
            return Err(CliError::data(format!("line {line}: empty lot_id")));
        }
        let is_prime = match &record[1] {
            "0" => false,
            "1" => true,
            other => {
                return Err(CliError::data(format!(
                    "line {line}: is_prime must be 0 or 1, found {other}"
                )))
            }
        };
        let mut features = Vec::with_capacity(feature_names.len());
        for (name, cell) in feature_names.iter().zip(record.iter().skip(2)) {
            let value: f64 = cell.parse().map_err(|_| {
                CliError::data(format!("line {line}: feature {name}: bad decimal `{cell}`"))
            })?;
            if !value.is_finite() {
                return Err(CliError::data(format!(
                    "line {line}: feature {name}: non-finite value `{cell}`"
                )));
            }
            features.push(value);
        }

        if current_id.as_deref() != Some(lot_id.as_str()) {
            flush(
                current_id.take(),
                &mut current_choices,
                &mut current_prime,
                current_first_line,
                &mut lots,
                &mut lot_ids,
                &mut closed_ids,
            )?;
            if closed_ids.contains(&lot_id) {
                return Err(CliError::data(format!(
                    "line {line}: rows of lot {lot_id} are not consecutive"
                )));
            }
            current_id = Some(lot_id);
            current_first_line = line;
        }
        if is_prime {
            if current_prime.is_some() {
                return Err(CliError::data(format!(
                    "line {line}: lot {} has two primes",
                    current_id.as_deref().unwrap_or("?")
                )));
            }
            current_prime = Some(current_choices.len());
        }
        let choice = Choice::new(features)
            .map_err(|e| CliError::data(format!("line {line}: {e}")))?;
        current_choices.push(choice);
    }
    flush(
        current_id.take(),
        &mut current_choices,
        &mut current_prime,
        current_first_line,
        &mut lots,
        &mut lot_ids,
        &mut closed_ids,
    )?;

    if lots.is_empty() {
        return Err(CliError::data(format!(
            "{}: no data rows",
            path.display()
        )));
    }
    let dataset = Dataset::new(feature_names, lots)
        .map_err(|e| CliError::data(format!("{}: {e}", path.display())))?;
    Ok(DatasetFile { dataset, lot_ids })
}

/// The canonical CSV bytes of a dataset.
pub fn to_csv_string(file: &DatasetFile) -> CliResult<String> {
    if file.lot_ids.len() != file.dataset.num_lots() {
        return Err(CliError::runtime("one lot_id per lot is required"));
    }
    let mut writer = csv::Writer::from_writer(Vec::new());
    let mut header = vec!["lot_id".to_string(), "is_prime".to_string()];
    header.extend(file.dataset.feature_names().iter().cloned());
    writer
        .write_record(&header)
        .map_err(|e| CliError::runtime(e.to_string()))?;
    for (id, lot) in file.lot_ids.iter().zip(file.dataset.lots()) {
        for (i, choice) in lot.choices().iter().enumerate() {
            let mut row = vec![
                id.clone(),
                if lot.prime_index() == Some(i) { "1" } else { "0" }.to_string(),
            ];
            row.extend(choice.features().iter().map(|v| v.to_string()));
            writer
                .write_record(&row)
                .map_err(|e| CliError::runtime(e.to_string()))?;
        }
    }
    let bytes = writer
        .into_inner()
        .map_err(|e| CliError::runtime(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| CliError::runtime(e.to_string()))
}

pub fn save(path: &Path, file: &DatasetFile) -> CliResult<()> {
    let contents = to_csv_string(file)?;
    std::fs::write(path, contents)
        .map_err(|e| CliError::runtime(format!("{}: {e}", path.display())))
}
