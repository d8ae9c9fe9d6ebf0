//! Prompt-class × category count matrices.
//!
//! Rows are prompt classes (fine value types, or parent values after
//! aggregation); columns are dictionary categories. Each row names its parent
//! value, which must also be a column: that column is the row's congruent
//! category.

use std::collections::{BTreeSet, HashMap};
use std::io::Write;

use rayon::prelude::*;

use crate::lexicon::Lexicon;
use crate::probes::ValueSpec;

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum MatrixError {
    #[error("line {line}: {message}")]
    Csv { line: usize, message: String },
    #[error("row '{row}' has parent '{parent}', which is not a column")]
    NoCongruentColumn { row: String, parent: String },
    #[error("row '{0}' has the wrong number of cells")]
    Ragged(String),
    #[error("corpus references fine types missing from the spec: {}", .0.join(", "))]
    UnknownFineTypes(Vec<String>),
    #[error("dictionary lacks categories required by the circle order: {}", .0.join(", "))]
    UnknownCategories(Vec<String>),
    #[error("column order must be a permutation of the existing columns")]
    BadColumnOrder,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CountMatrix {
    row_labels: Vec<String>,
    row_parents: Vec<String>,
    col_labels: Vec<String>,
    cells: Vec<Vec<u64>>,
    congruent: Vec<usize>,
}

impl CountMatrix {
    pub fn new(
        row_labels: Vec<String>,
        row_parents: Vec<String>,
        col_labels: Vec<String>,
        cells: Vec<Vec<u64>>,
    ) -> Result<Self, MatrixError> {
        assert_eq!(row_labels.len(), row_parents.len());
        if cells.len() != row_labels.len() {
            return Err(MatrixError::Ragged("<matrix>".into()));
        }
        let mut congruent = Vec::with_capacity(row_labels.len());
        for ((label, parent), row) in row_labels.iter().zip(&row_parents).zip(&cells) {
            if row.len() != col_labels.len() {
                return Err(MatrixError::Ragged(label.clone()));
            }
            let col = col_labels.iter().position(|c| c == parent).ok_or_else(|| {
                MatrixError::NoCongruentColumn {
                    row: label.clone(),
                    parent: parent.clone(),
                }
            })?;
            congruent.push(col);
        }
        Ok(CountMatrix {
            row_labels,
            row_parents,
            col_labels,
            cells,
            congruent,
        })
    }

    pub fn zeros(row_labels: Vec<String>, row_parents: Vec<String>, col_labels: Vec<String>) -> Result<Self, MatrixError> {
        let cells = vec![vec![0; col_labels.len()]; row_labels.len()];
        Self::new(row_labels, row_parents, col_labels, cells)
    }

    pub fn n_rows(&self) -> usize {
        self.row_labels.len()
    }

    pub fn n_cols(&self) -> usize {
        self.col_labels.len()
    }

    pub fn row_labels(&self) -> &[String] {
        &self.row_labels
    }

    pub fn row_parents(&self) -> &[String] {
        &self.row_parents
    }

    pub fn col_labels(&self) -> &[String] {
        &self.col_labels
    }

    pub fn cells(&self) -> &[Vec<u64>] {
        &self.cells
    }

    pub fn get(&self, row: usize, col: usize) -> u64 {
        self.cells[row][col]
    }

    /// Column index of the row's congruent category.
    pub fn congruent_column(&self, row: usize) -> usize {
        self.congruent[row]
    }

    /// Rows whose congruent category is `col`.
    pub fn congruent_rows(&self, col: usize) -> Vec<usize> {
        (0..self.n_rows()).filter(|&r| self.congruent[r] == col).collect()
    }

    pub fn col_index(&self, label: &str) -> Option<usize> {
        self.col_labels.iter().position(|c| c == label)
    }

    pub fn row_index(&self, label: &str) -> Option<usize> {
        self.row_labels.iter().position(|c| c == label)
    }

    pub fn row_totals(&self) -> Vec<u64> {
        self.cells.iter().map(|r| r.iter().sum()).collect()
    }

    pub fn column_totals(&self) -> Vec<u64> {
        let mut totals = vec![0; self.n_cols()];
        for row in &self.cells {
            for (t, v) in totals.iter_mut().zip(row) {
                *t += v;
            }
        }
        totals
    }

    pub fn grand_total(&self) -> u64 {
        self.row_totals().iter().sum()
    }

    /// True when every row label equals its parent, i.e. the matrix is
    /// already at parent-value resolution.
    pub fn is_aggregated(&self) -> bool {
        self.row_labels.iter().zip(&self.row_parents).all(|(l, p)| l == p)
    }

    /// Reorders columns to `order`, which must be a permutation of the
    /// current column labels.
    pub fn with_column_order<S: AsRef<str>>(&self, order: &[S]) -> Result<Self, MatrixError> {
        if order.len() != self.n_cols() {
            return Err(MatrixError::BadColumnOrder);
        }
        let mut idx = Vec::with_capacity(order.len());
        for name in order {
            let i = self.col_index(name.as_ref()).ok_or(MatrixError::BadColumnOrder)?;
            if idx.contains(&i) {
                return Err(MatrixError::BadColumnOrder);
            }
            idx.push(i);
        }
        let cells = self
            .cells
            .iter()
            .map(|row| idx.iter().map(|&i| row[i]).collect())
            .collect();
        Self::new(
            self.row_labels.clone(),
            self.row_parents.clone(),
            idx.iter().map(|&i| self.col_labels[i].clone()).collect(),
            cells,
        )
    }

    /// Writes the matrix as CSV: a header of category names after a leading
    /// row-label column.
    pub fn write_csv<W: Write>(&self, out: W) -> csv::Result<()> {
        let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::CRLF).from_writer(out);
        let mut header = vec!["prompt".to_string()];
        header.extend(self.col_labels.iter().cloned());
        w.write_record(&header)?;
        for (label, row) in self.row_labels.iter().zip(&self.cells) {
            let mut rec = vec![label.clone()];
            rec.extend(row.iter().map(u64::to_string));
            w.write_record(&rec)?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn to_csv_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("csv output is utf-8")
    }

    /// Reads a matrix CSV. Row parents come from `parent_of`, which maps a
    /// row label to its parent value given the column labels.
    pub fn from_csv_with<F>(source: &str, mut parent_of: F) -> Result<Self, MatrixError>
    where
        F: FnMut(&str, &[String]) -> Option<String>,
    {
        let mut rdr = csv::ReaderBuilder::new()
            .has_headers(false)
            .flexible(true)
            .trim(csv::Trim::All)
            .from_reader(source.trim_start_matches('\u{feff}').as_bytes());
        let mut records = rdr.records();
        let header = match records.next() {
            Some(Ok(h)) => h,
            Some(Err(e)) => return Err(csv_error(&e, 1)),
            None => {
                return Err(MatrixError::Csv {
                    line: 1,
                    message: "empty matrix file".into(),
                })
            }
        };
        if header.len() < 2 {
            return Err(MatrixError::Csv {
                line: 1,
                message: "header needs a row-label column and at least one category".into(),
            });
        }
        let col_labels: Vec<String> = header.iter().skip(1).map(str::to_string).collect();
        let mut seen = BTreeSet::new();
        for c in &col_labels {
            if c.is_empty() || !seen.insert(c.as_str()) {
                return Err(MatrixError::Csv {
                    line: 1,
                    message: format!("empty or duplicate category name '{c}'"),
                });
            }
        }

        let mut row_labels = Vec::new();
        let mut row_parents = Vec::new();
        let mut cells = Vec::new();
        for rec in records {
            let rec = rec.map_err(|e| csv_error(&e, 0))?;
            let line = rec.position().map_or(0, |p| p.line() as usize);
            if rec.iter().all(str::is_empty) {
                continue;
            }
            if rec.len() != col_labels.len() + 1 {
                return Err(MatrixError::Csv {
                    line,
                    message: format!("expected {} fields, found {}", col_labels.len() + 1, rec.len()),
                });
            }
            let label = rec[0].to_string();
            let mut row = Vec::with_capacity(col_labels.len());
            for field in rec.iter().skip(1) {
                let v: u64 = field.parse().map_err(|_| MatrixError::Csv {
                    line,
                    message: format!("'{field}' is not a non-negative integer count"),
                })?;
                row.push(v);
            }
            let parent = parent_of(&label, &col_labels).ok_or_else(|| MatrixError::Csv {
                line,
                message: format!("cannot determine the parent value of row '{label}'"),
            })?;
            row_labels.push(label);
            row_parents.push(parent);
            cells.push(row);
        }
        Self::new(row_labels, row_parents, col_labels, cells)
    }

    /// Reads a matrix CSV, inferring row parents from their labels (see
    /// [`infer_parent`]).
    pub fn from_csv(source: &str) -> Result<Self, MatrixError> {
        Self::from_csv_with(source, |label, cols| infer_parent(label, cols))
    }

    /// Reads a matrix CSV, taking row parents from the spec's fine types and
    /// falling back to label inference.
    pub fn from_csv_with_spec(source: &str, spec: &ValueSpec) -> Result<Self, MatrixError> {
        Self::from_csv_with(source, |label, cols| {
            spec.fine_type(label)
                .filter(|f| f.is_mapped())
                .map(|f| f.parent.clone())
                .or_else(|| infer_parent(label, cols))
        })
    }
}

fn csv_error(e: &csv::Error, fallback_line: usize) -> MatrixError {
    MatrixError::Csv {
        line: e.position().map_or(fallback_line, |p| p.line() as usize),
        message: e.to_string(),
    }
}

/// Full value names, keyed to their category codes.
const VALUE_NAMES: [(&str, &str); 11] = [
    ("self-direction", "SD"),
    ("self direction", "SD"),
    ("stimulation", "ST"),
    ("hedonism", "HE"),
    ("achievement", "AC"),
    ("power", "PO"),
    ("security", "SE"),
    ("conformity", "CO"),
    ("tradition", "TR"),
    ("benevolence", "BE"),
    ("universalism", "UN"),
];

/// Guesses a row's parent value: the label itself when it is a column name,
/// otherwise the category whose full value name (or code) begins the label,
/// as in `Security—Personal` or `SE—Personal`.
pub fn infer_parent(label: &str, columns: &[String]) -> Option<String> {
    if columns.iter().any(|c| c == label) {
        return Some(label.to_string());
    }
    let lower = label.to_lowercase();
    let by_name = VALUE_NAMES
        .iter()
        .find(|(name, _)| lower.starts_with(name))
        .map(|(_, code)| code.to_string());
    let candidate = by_name.or_else(|| {
        let head: String = label.chars().take_while(|c| c.is_alphanumeric()).collect();
        columns.iter().find(|c| **c == head).cloned()
    })?;
    columns.iter().any(|c| *c == candidate).then_some(candidate)
}

/// Builds the fine-class × category matrix from `(fine_type_id, text)` documents.
///
/// Rows follow spec order, restricted to fine types with a mapped parent;
/// columns follow the spec's circle order. Documents of unmapped fine types
/// are scored nowhere.
pub fn build_count_matrix<'a, I>(documents: I, lexicon: &Lexicon, spec: &ValueSpec) -> Result<CountMatrix, MatrixError>
where
    I: IntoIterator<Item = (&'a str, &'a str)>,
{
    let missing: Vec<String> = spec
        .circle_order
        .iter()
        .filter(|c| lexicon.category_index(c).is_none())
        .cloned()
        .collect();
    if !missing.is_empty() {
        return Err(MatrixError::UnknownCategories(missing));
    }
    let mapped: Vec<_> = spec.fine_types.iter().filter(|f| f.is_mapped()).collect();
    let row_of: HashMap<&str, usize> = mapped.iter().enumerate().map(|(i, f)| (f.id.as_str(), i)).collect();

    let documents: Vec<(&str, &str)> = documents.into_iter().collect();
    let unknown: BTreeSet<String> = documents
        .iter()
        .filter(|(id, _)| spec.fine_type(id).is_none())
        .map(|(id, _)| id.to_string())
        .collect();
    if !unknown.is_empty() {
        return Err(MatrixError::UnknownFineTypes(unknown.into_iter().collect()));
    }

    let cols: Vec<usize> = spec
        .circle_order
        .iter()
        .map(|c| lexicon.category_index(c).expect("checked above"))
        .collect();
    let n_cols = cols.len();
    let cells = documents
        .par_iter()
        .filter_map(|(id, text)| row_of.get(id).map(|&row| (row, lexicon.score_text(text))))
        .fold(
            || vec![vec![0u64; n_cols]; mapped.len()],
            |mut acc, (row, counts)| {
                for (j, &cat) in cols.iter().enumerate() {
                    acc[row][j] += counts.get(&lexicon.categories()[cat].name);
                }
                acc
            },
        )
        .reduce(
            || vec![vec![0u64; n_cols]; mapped.len()],
            |mut a, b| {
                for (ra, rb) in a.iter_mut().zip(b) {
                    for (x, y) in ra.iter_mut().zip(rb) {
                        *x += y;
                    }
                }
                a
            },
        );

    CountMatrix::new(
        mapped.iter().map(|f| f.id.clone()).collect(),
        mapped.iter().map(|f| f.parent.clone()).collect(),
        spec.circle_order.clone(),
        cells,
    )
}

/// Sums rows sharing a parent. Aggregated rows are labelled by the parent and
/// follow the column order.
pub fn aggregate_matrix(m: &CountMatrix) -> CountMatrix {
    let mut labels = Vec::new();
    let mut cells = Vec::new();
    for (col, name) in m.col_labels().iter().enumerate() {
        let rows = m.congruent_rows(col);
        if rows.is_empty() {
            continue;
        }
        let mut sum = vec![0u64; m.n_cols()];
        for r in rows {
            for (s, v) in sum.iter_mut().zip(&m.cells()[r]) {
                *s += v;
            }
        }
        labels.push(name.clone());
        cells.push(sum);
    }
    CountMatrix::new(labels.clone(), labels, m.col_labels().to_vec(), cells)
        .expect("aggregated rows are congruent with their own column")
}

pub fn row_totals(m: &CountMatrix) -> Vec<u64> {
    m.row_totals()
}

pub fn column_totals(m: &CountMatrix) -> Vec<u64> {
    m.column_totals()
}
