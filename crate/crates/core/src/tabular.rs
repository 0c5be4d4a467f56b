//! Typed, immutable tabular data loaded from CSV.
//!
//! A [`Dataset`] holds one numeric response plus any number of numeric or factor
//! columns. Factor levels are always the sorted distinct labels, so level order
//! (and hence the reference level of treatment coding) is deterministic.

use std::collections::BTreeSet;
use std::path::Path;

use thiserror::Error;

/// Substring reserved for the latent group placeholder in formulas.
pub const RESERVED: &str = "group";

#[derive(Debug, Error)]
pub enum TabularError {
    #[error("column '{0}' not found")]
    NamedColumnAbsent(String),
    #[error("column name '{0}' is reserved or already taken (names may not contain \"group\")")]
    ReservedNameCollision(String),
    #[error("column '{column}', row {row}: cannot parse '{value}' as a finite number")]
    ParseFailure { column: String, row: usize, value: String },
    #[error("column '{column}', row {row}: missing value")]
    MissingValue { column: String, row: usize },
    #[error("column '{column}' must be {expected}")]
    KindMismatch { column: String, expected: &'static str },
    #[error("column '{column}' has {found} entries, expected {expected}")]
    LengthMismatch { column: String, found: usize, expected: usize },
    #[error("dataset has no rows")]
    Empty,
    #[error("failed to read CSV: {0}")]
    Csv(#[from] csv::Error),
}

/// Factor column storage: level labels plus one level code per row.
#[derive(Debug, Clone, PartialEq)]
pub struct Factor {
    levels: Vec<String>,
    codes: Vec<usize>,
}

impl Factor {
    /// Builds a factor from raw labels; levels are the sorted distinct labels.
    pub fn from_labels<S: AsRef<str>>(labels: &[S]) -> Self {
        let levels: Vec<String> =
            labels.iter().map(|s| s.as_ref().to_string()).collect::<BTreeSet<_>>().into_iter().collect();
        let codes = labels.iter().map(|s| levels.binary_search_by(|l| l.as_str().cmp(s.as_ref())).unwrap()).collect();
        Factor { levels, codes }
    }

    pub fn levels(&self) -> &[String] {
        &self.levels
    }

    pub fn codes(&self) -> &[usize] {
        &self.codes
    }

    pub fn n_levels(&self) -> usize {
        self.levels.len()
    }

    pub fn label(&self, row: usize) -> &str {
        &self.levels[self.codes[row]]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ColumnKind {
    Numeric,
    Factor,
}

#[derive(Debug, Clone, PartialEq)]
pub enum ColumnData {
    Numeric(Vec<f64>),
    Factor(Factor),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Column {
    name: String,
    data: ColumnData,
}

impl Column {
    pub fn numeric(name: impl Into<String>, values: Vec<f64>) -> Self {
        Column { name: name.into(), data: ColumnData::Numeric(values) }
    }

    pub fn factor<S: AsRef<str>>(name: impl Into<String>, labels: &[S]) -> Self {
        Column { name: name.into(), data: ColumnData::Factor(Factor::from_labels(labels)) }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn data(&self) -> &ColumnData {
        &self.data
    }

    pub fn kind(&self) -> ColumnKind {
        match self.data {
            ColumnData::Numeric(_) => ColumnKind::Numeric,
            ColumnData::Factor(_) => ColumnKind::Factor,
        }
    }

    pub fn len(&self) -> usize {
        match &self.data {
            ColumnData::Numeric(v) => v.len(),
            ColumnData::Factor(f) => f.codes.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn as_numeric(&self) -> Option<&[f64]> {
        match &self.data {
            ColumnData::Numeric(v) => Some(v),
            ColumnData::Factor(_) => None,
        }
    }

    pub fn as_factor(&self) -> Option<&Factor> {
        match &self.data {
            ColumnData::Factor(f) => Some(f),
            ColumnData::Numeric(_) => None,
        }
    }
}

/// Immutable table with a designated numeric response column.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    n_rows: usize,
    columns: Vec<Column>,
    response: String,
}

impl Dataset {
    /// Validates and assembles a dataset from already-typed columns.
    pub fn new(columns: Vec<Column>, response: &str) -> Result<Self, TabularError> {
        let n_rows = columns.first().map(Column::len).unwrap_or(0);
        if n_rows == 0 {
            return Err(TabularError::Empty);
        }
        let mut seen = BTreeSet::new();
        for col in &columns {
            if col.name.contains(RESERVED) || !seen.insert(col.name.as_str()) {
                return Err(TabularError::ReservedNameCollision(col.name.clone()));
            }
            if col.len() != n_rows {
                return Err(TabularError::LengthMismatch {
                    column: col.name.clone(),
                    found: col.len(),
                    expected: n_rows,
                });
            }
            if let ColumnData::Numeric(values) = &col.data {
                if let Some(row) = values.iter().position(|v| !v.is_finite()) {
                    return Err(TabularError::ParseFailure {
                        column: col.name.clone(),
                        row: row + 1,
                        value: values[row].to_string(),
                    });
                }
            }
        }
        let resp = columns
            .iter()
            .find(|c| c.name == response)
            .ok_or_else(|| TabularError::NamedColumnAbsent(response.to_string()))?;
        if resp.kind() != ColumnKind::Numeric {
            return Err(TabularError::KindMismatch { column: response.to_string(), expected: "numeric" });
        }
        Ok(Dataset { n_rows, columns, response: response.to_string() })
    }

    /// Loads a CSV file. Columns named in `factors` become factors; every other
    /// column must be entirely numeric.
    pub fn load_csv(path: impl AsRef<Path>, response: &str, factors: &[&str]) -> Result<Self, TabularError> {
        let reader = csv::ReaderBuilder::new().trim(csv::Trim::All).from_path(path)?;
        Self::from_csv_reader(reader, response, factors)
    }

    /// Same as [`Dataset::load_csv`] but reads from an in-memory string.
    pub fn from_csv_str(text: &str, response: &str, factors: &[&str]) -> Result<Self, TabularError> {
        let reader = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(text.as_bytes());
        Self::from_csv_reader(reader, response, factors)
    }

    fn from_csv_reader<R: std::io::Read>(
        mut reader: csv::Reader<R>,
        response: &str,
        factors: &[&str],
    ) -> Result<Self, TabularError> {
        let header: Vec<String> = reader.headers()?.iter().map(str::to_string).collect();
        if let Some(bad) = header.iter().find(|h| h.contains(RESERVED)) {
            return Err(TabularError::ReservedNameCollision(bad.clone()));
        }
        for name in factors.iter().chain(std::iter::once(&response)) {
            if !header.iter().any(|h| h == name) {
                return Err(TabularError::NamedColumnAbsent(name.to_string()));
            }
        }
        if factors.contains(&response) {
            return Err(TabularError::KindMismatch { column: response.to_string(), expected: "numeric" });
        }

        let mut cells: Vec<Vec<String>> = vec![Vec::new(); header.len()];
        for record in reader.records() {
            let record = record?;
            for (j, col) in cells.iter_mut().enumerate() {
                col.push(record.get(j).unwrap_or("").to_string());
            }
        }

        let mut columns = Vec::with_capacity(header.len());
        for (name, raw) in header.iter().zip(cells) {
            if let Some(row) = raw.iter().position(String::is_empty) {
                return Err(TabularError::MissingValue { column: name.clone(), row: row + 1 });
            }
            if factors.contains(&name.as_str()) {
                columns.push(Column::factor(name.as_str(), &raw));
                continue;
            }
            let mut values = Vec::with_capacity(raw.len());
            for (row, cell) in raw.iter().enumerate() {
                match cell.parse::<f64>() {
                    Ok(v) if v.is_finite() => values.push(v),
                    _ => {
                        return Err(TabularError::ParseFailure {
                            column: name.clone(),
                            row: row + 1,
                            value: cell.clone(),
                        })
                    }
                }
            }
            columns.push(Column::numeric(name.as_str(), values));
        }
        Self::new(columns, response)
    }

    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn response_name(&self) -> &str {
        &self.response
    }

    pub fn response(&self) -> &[f64] {
        self.column(&self.response).and_then(Column::as_numeric).expect("validated at construction")
    }

    pub fn columns(&self) -> &[Column] {
        &self.columns
    }

    pub fn column(&self, name: &str) -> Option<&Column> {
        self.columns.iter().find(|c| c.name == name)
    }

    pub fn require(&self, name: &str) -> Result<&Column, TabularError> {
        self.column(name).ok_or_else(|| TabularError::NamedColumnAbsent(name.to_string()))
    }

    pub fn factor(&self, name: &str) -> Result<&Factor, TabularError> {
        self.require(name)?
            .as_factor()
            .ok_or_else(|| TabularError::KindMismatch { column: name.to_string(), expected: "a factor" })
    }

    /// Returns a copy with a new factor whose labels are `f1` and `f2` labels
    /// joined by `sep`; the new column is named `f1 + sep + f2`.
    pub fn derive_interaction_factor(&self, f1: &str, f2: &str, sep: &str) -> Result<Dataset, TabularError> {
        let a = self.factor(f1)?;
        let b = self.factor(f2)?;
        let name = format!("{f1}{sep}{f2}");
        if name.contains(RESERVED) || self.column(&name).is_some() {
            return Err(TabularError::ReservedNameCollision(name));
        }
        let labels: Vec<String> = (0..self.n_rows).map(|i| format!("{}{sep}{}", a.label(i), b.label(i))).collect();
        let mut columns = self.columns.clone();
        columns.push(Column::factor(name, &labels));
        Ok(Dataset { n_rows: self.n_rows, columns, response: self.response.clone() })
    }
}
