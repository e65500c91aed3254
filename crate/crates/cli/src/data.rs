//! Univariate data files: one value per line, or comma/whitespace-separated values,
//! with an optional header line.

use std::path::Path;

use crate::CliError;

#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub values: Vec<f64>,
    pub source_path: String,
    /// Blank or non-numeric lines skipped (the header is not counted).
    pub n_dropped: usize,
    /// 1-based line numbers of the dropped lines.
    pub dropped_lines: Vec<usize>,
    pub header: Option<String>,
}

fn parse_line(line: &str) -> Option<Vec<f64>> {
    let fields: Vec<&str> = line
        .split(|c: char| c == ',' || c.is_whitespace())
        .filter(|f| !f.is_empty())
        .collect();
    if fields.is_empty() {
        return None;
    }
    fields
        .iter()
        .map(|f| f.parse::<f64>().ok().filter(|v| v.is_finite()))
        .collect()
}

/// Parses file contents. A non-numeric first non-blank line is taken as a header.
pub fn parse(text: &str, source_path: &str) -> Dataset {
    let mut values = Vec::new();
    let mut dropped_lines = Vec::new();
    let mut header = None;
    let mut seen_content = false;
    for (i, line) in text.lines().enumerate() {
        let trimmed = line.trim();
        match parse_line(trimmed) {
            Some(v) => values.extend(v),
            None if !seen_content && !trimmed.is_empty() => header = Some(trimmed.to_string()),
            None => dropped_lines.push(i + 1),
        }
        seen_content |= !trimmed.is_empty();
    }
    Dataset {
        values,
        source_path: source_path.to_string(),
        n_dropped: dropped_lines.len(),
        dropped_lines,
        header,
    }
}

impl Dataset {
    pub fn read(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Io(format!("cannot read {}: {e}", path.display())))?;
        Ok(parse(&text, &path.display().to_string()))
    }

    /// Natural-log transform; every value must be positive.
    pub fn log_transform(mut self) -> Result<Self, CliError> {
        if let Some(v) = self.values.iter().find(|v| **v <= 0.0) {
            return Err(CliError::Io(format!(
                "{}: cannot log-transform non-positive value {v}",
                self.source_path
            )));
        }
        self.values.iter_mut().for_each(|v| *v = v.ln());
        Ok(self)
    }

    /// Warning listing skipped lines (at most the first 20), if any.
    pub fn warning(&self) -> Option<String> {
        if self.n_dropped == 0 {
            return None;
        }
        let shown: Vec<String> = self
            .dropped_lines
            .iter()
            .take(20)
            .map(|l| l.to_string())
            .collect();
        let more = if self.n_dropped > 20 { ", ..." } else { "" };
        Some(format!(
            "warning: {}: skipped {} blank or non-numeric line(s): {}{more}",
            self.source_path,
            self.n_dropped,
            shown.join(", ")
        ))
    }
}
