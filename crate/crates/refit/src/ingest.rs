//! Dataset ingestion from CSV.
//!
//! Strict format: UTF-8, comma separated, `.` decimals, one header row, no
//! quoting. Every column except the chosen response column becomes a
//! predictor, in file order.

use std::path::Path;

use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::linalg::Matrix;

pub fn ingest_csv(path: &Path, response_column: &str) -> Result<Dataset> {
    let text = std::fs::read_to_string(path)?;
    parse_dataset_csv(&text, response_column)
}

pub fn parse_dataset_csv(text: &str, response_column: &str) -> Result<Dataset> {
    let mut lines = text.lines().enumerate();
    let (_, header) = lines.next().ok_or_else(|| Error::ParseError {
        row: 1,
        column: "-".into(),
        message: "empty file".into(),
    })?;
    let columns: Vec<&str> = header.split(',').map(str::trim).collect();
    let response_idx = columns
        .iter()
        .position(|c| *c == response_column)
        .ok_or_else(|| Error::MissingColumn(response_column.to_string()))?;

    let mut rows: Vec<Vec<f64>> = Vec::new();
    let mut responses: Vec<f64> = Vec::new();
    for (line_no, line) in lines {
        if line.trim().is_empty() {
            continue;
        }
        let row_no = line_no + 1; // 1-based, header is row 1
        let cells: Vec<&str> = line.split(',').map(str::trim).collect();
        if cells.len() != columns.len() {
            return Err(Error::ParseError {
                row: row_no,
                column: "-".into(),
                message: format!("expected {} cells, found {}", columns.len(), cells.len()),
            });
        }
        let mut predictors = Vec::with_capacity(columns.len() - 1);
        for (j, cell) in cells.iter().enumerate() {
            let value: f64 = cell.parse().map_err(|_| Error::ParseError {
                row: row_no,
                column: columns[j].to_string(),
                message: format!("`{cell}` is not a number"),
            })?;
            if j == response_idx {
                responses.push(value);
            } else {
                predictors.push(value);
            }
        }
        rows.push(predictors);
    }
    Dataset::new(Matrix::from_rows(&rows), responses)
}

/// Write a dataset as CSV with predictor columns `x1..xd` and the response
/// in a final column named `y`.
pub fn dataset_to_csv(data: &Dataset) -> String {
    let mut out = String::new();
    let header: Vec<String> = (1..=data.dim())
        .map(|j| format!("x{j}"))
        .chain(std::iter::once("y".to_string()))
        .collect();
    out.push_str(&header.join(","));
    out.push('\n');
    for i in 0..data.n() {
        let mut cells: Vec<String> = data
            .predictors()
            .row(i)
            .iter()
            .map(|v| v.to_string())
            .collect();
        cells.push(data.responses()[i].to_string());
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}
