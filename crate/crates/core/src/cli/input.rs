use std::collections::BTreeMap;
use std::path::Path;

use super::CliError;
use crate::purity::DiscreteConditional;
use crate::samples::GroupedSamples;

fn reader(path: &Path, headers: bool) -> Result<csv::Reader<std::fs::File>, CliError> {
    csv::ReaderBuilder::new()
        .has_headers(headers)
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

fn csv_error(path: &Path, e: csv::Error) -> CliError {
    match e.position() {
        Some(pos) => CliError::Input(format!("{}: line {}: {e}", path.display(), pos.line())),
        None => CliError::Input(format!("{}: {e}", path.display())),
    }
}

/// Reads a CSV with header `x,y`; `x` is an opaque label, `y` a finite real.
pub fn read_grouped_csv(path: &Path) -> Result<GroupedSamples, CliError> {
    let mut rdr = reader(path, true)?;
    let header = rdr.headers().map_err(|e| csv_error(path, e))?.clone();
    if header.len() != 2 || &header[0] != "x" || &header[1] != "y" {
        return Err(CliError::Input(format!(
            "{}: line 1: expected header `x,y`, found `{}`",
            path.display(),
            header.iter().collect::<Vec<_>>().join(",")
        )));
    }
    let mut groups: BTreeMap<String, Vec<f64>> = BTreeMap::new();
    for record in rdr.records() {
        let record = record.map_err(|e| csv_error(path, e))?;
        let line = record.position().map_or(0, |p| p.line());
        let y: f64 = record[1].parse().map_err(|_| {
            CliError::Input(format!("{}: line {line}: y value `{}` is not a number", path.display(), &record[1]))
        })?;
        if !y.is_finite() {
            return Err(CliError::Input(format!(
                "{}: line {line}: y value `{}` is not finite",
                path.display(),
                &record[1]
            )));
        }
        groups.entry(record[0].to_string()).or_default().push(y);
    }
    Ok(GroupedSamples::new(groups)?)
}

/// Reads a headerless numeric matrix, one conditional `P(Y|x)` per row.
pub fn read_matrix_csv(path: &Path) -> Result<DiscreteConditional, CliError> {
    let mut rdr = reader(path, false)?;
    let mut rows = Vec::new();
    for record in rdr.records() {
        let record = record.map_err(|e| csv_error(path, e))?;
        let line = record.position().map_or(0, |p| p.line());
        let row = record
            .iter()
            .map(|v| {
                v.parse::<f64>()
                    .map_err(|_| CliError::Input(format!("{}: line {line}: `{v}` is not a number", path.display())))
            })
            .collect::<Result<Vec<f64>, CliError>>()?;
        rows.push(row);
    }
    Ok(DiscreteConditional::new(rows)?)
}
