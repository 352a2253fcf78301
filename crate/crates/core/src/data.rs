//! Tabular numeric data: ingestion, validation and z-score standardization.

use std::collections::HashSet;
use std::fs::File;
use std::io::Write;
use std::path::Path;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Minimum number of observations; rank statistics degenerate below this.
pub const MIN_ROWS: usize = 3;

/// Immutable predictor matrix plus response.
///
/// Predictors are stored column-major so that a single predictor is a
/// contiguous slice.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset<T: Scalar> {
    values: Vec<T>,
    response: Vec<T>,
    column_names: Vec<String>,
    response_name: String,
    n: usize,
    p: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ColumnSummary<T> {
    pub mean: T,
    pub stddev: T,
    pub min: T,
    pub max: T,
}

impl<T: Scalar> Dataset<T> {
    /// Build a dataset from predictor columns. Validates shape, finiteness and
    /// name uniqueness.
    pub fn from_columns(
        columns: Vec<Vec<T>>,
        response: Vec<T>,
        column_names: Vec<String>,
        response_name: impl Into<String>,
    ) -> Result<Self> {
        let response_name = response_name.into();
        let n = response.len();
        let p = columns.len();
        if p == 0 {
            return Err(Error::NoPredictors);
        }
        if n < MIN_ROWS {
            return Err(Error::TooFewRows {
                min: MIN_ROWS,
                found: n,
            });
        }
        if column_names.len() != p {
            return Err(Error::DimensionMismatch(format!(
                "{} column names for {} columns",
                column_names.len(),
                p
            )));
        }
        let mut seen = HashSet::with_capacity(p + 1);
        seen.insert(response_name.as_str());
        for name in &column_names {
            if !seen.insert(name.as_str()) {
                return Err(Error::DuplicateColumn(name.clone()));
            }
        }
        if let Some(row) = response.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite {
                row: row + 1,
                column: response_name,
            });
        }
        let mut values = Vec::with_capacity(n * p);
        for (j, col) in columns.into_iter().enumerate() {
            if col.len() != n {
                return Err(Error::DimensionMismatch(format!(
                    "column {:?} has {} rows, response has {}",
                    column_names[j],
                    col.len(),
                    n
                )));
            }
            if let Some(row) = col.iter().position(|v| !v.is_finite()) {
                return Err(Error::NonFinite {
                    row: row + 1,
                    column: column_names[j].clone(),
                });
            }
            values.extend(col);
        }
        Ok(Self {
            values,
            response,
            column_names,
            response_name,
            n,
            p,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn column(&self, j: usize) -> &[T] {
        &self.values[j * self.n..(j + 1) * self.n]
    }

    pub fn columns(&self) -> impl Iterator<Item = &[T]> + '_ {
        self.values.chunks_exact(self.n)
    }

    pub fn response(&self) -> &[T] {
        &self.response
    }

    pub fn column_names(&self) -> &[String] {
        &self.column_names
    }

    pub fn response_name(&self) -> &str {
        &self.response_name
    }

    pub fn column_index(&self, name: &str) -> Option<usize> {
        self.column_names.iter().position(|c| c == name)
    }

    pub fn column_summary(&self, j: usize) -> ColumnSummary<T> {
        let col = self.column(j);
        let (mean, stddev) = moments(col);
        let min = col.iter().copied().fold(T::infinity(), T::min);
        let max = col.iter().copied().fold(T::neg_infinity(), T::max);
        ColumnSummary {
            mean,
            stddev,
            min,
            max,
        }
    }

    /// New dataset made of the given rows, in the given order.
    pub fn select_rows(&self, rows: &[usize]) -> Result<Self> {
        let columns = self
            .columns()
            .map(|c| rows.iter().map(|&r| c[r]).collect())
            .collect();
        let response = rows.iter().map(|&r| self.response[r]).collect();
        Self::from_columns(
            columns,
            response,
            self.column_names.clone(),
            self.response_name.clone(),
        )
    }

    /// Convert to another scalar type.
    pub fn cast<U: Scalar>(&self) -> Dataset<U> {
        let conv = |v: &T| U::of(v.as_f64());
        Dataset {
            values: self.values.iter().map(conv).collect(),
            response: self.response.iter().map(conv).collect(),
            column_names: self.column_names.clone(),
            response_name: self.response_name.clone(),
            n: self.n,
            p: self.p,
        }
    }

    /// Write predictors followed by the response column as CSV.
    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let file = File::create(path).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        let mut w = csv::Writer::from_writer(std::io::BufWriter::new(file));
        let mut header: Vec<&str> = self.column_names.iter().map(String::as_str).collect();
        header.push(&self.response_name);
        w.write_record(&header)?;
        let mut record = Vec::with_capacity(self.p + 1);
        for i in 0..self.n {
            record.clear();
            record.extend((0..self.p).map(|j| self.values[j * self.n + i].to_string()));
            record.push(self.response[i].to_string());
            w.write_record(&record)?;
        }
        let mut inner = w.into_inner().map_err(|e| Error::Io {
            path: path.to_path_buf(),
            source: e.into_error(),
        })?;
        inner.flush().map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })
    }
}

/// Load a CSV with a header row. `response_column` becomes the response; the
/// remaining columns become predictors in file order.
pub fn load_csv<T: Scalar>(path: &Path, response_column: &str) -> Result<Dataset<T>> {
    let file = File::open(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .flexible(true)
        .from_reader(std::io::BufReader::new(file));

    let header: Vec<String> = reader.headers()?.iter().map(str::to_owned).collect();
    let mut response_idx = None;
    for (k, name) in header.iter().enumerate() {
        if name == response_column {
            if response_idx.is_some() {
                return Err(Error::DuplicateColumn(name.clone()));
            }
            response_idx = Some(k);
        }
    }
    let response_idx =
        response_idx.ok_or_else(|| Error::MissingResponse(response_column.to_owned()))?;

    let width = header.len();
    let mut columns: Vec<Vec<T>> = vec![Vec::new(); width];
    for (r, record) in reader.records().enumerate() {
        let record = record?;
        let row = r + 1;
        if record.len() != width {
            return Err(Error::RaggedRow {
                row,
                found: record.len(),
                expected: width,
            });
        }
        for (k, cell) in record.iter().enumerate() {
            let v: T = cell.parse().map_err(|_| Error::ParseCell {
                row,
                column: header[k].clone(),
                value: cell.to_owned(),
            })?;
            if !v.is_finite() {
                return Err(Error::NonFinite {
                    row,
                    column: header[k].clone(),
                });
            }
            columns[k].push(v);
        }
    }

    let response = columns.remove(response_idx);
    let mut names = header;
    let response_name = names.remove(response_idx);
    Dataset::from_columns(columns, response, names, response_name)
}

/// Z-scored copy of the predictors.
#[derive(Debug, Clone)]
pub struct StandardizedView<T: Scalar> {
    values: Vec<T>,
    means: Vec<T>,
    stddevs: Vec<T>,
    n: usize,
}

impl<T: Scalar> StandardizedView<T> {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn p(&self) -> usize {
        self.means.len()
    }

    pub fn column(&self, j: usize) -> &[T] {
        &self.values[j * self.n..(j + 1) * self.n]
    }

    pub fn means(&self) -> &[T] {
        &self.means
    }

    pub fn stddevs(&self) -> &[T] {
        &self.stddevs
    }
}

/// Mean and population standard deviation (divisor n).
pub fn moments<T: Scalar>(x: &[T]) -> (T, T) {
    let n = T::of(x.len() as f64);
    let mean = x.iter().copied().sum::<T>() / n;
    let var = x.iter().map(|&v| (v - mean) * (v - mean)).sum::<T>() / n;
    (mean, var.sqrt())
}

/// Per-column z-scores with the population convention. Constant columns map
/// to all zeros and record a standard deviation of 0.
pub fn standardize<T: Scalar>(d: &Dataset<T>) -> StandardizedView<T> {
    let n = d.n();
    let mut values = Vec::with_capacity(n * d.p());
    let mut means = Vec::with_capacity(d.p());
    let mut stddevs = Vec::with_capacity(d.p());
    for col in d.columns() {
        let first = col[0];
        let constant = col.iter().all(|&v| v == first);
        let (mean, sd) = moments(col);
        if constant || sd == T::zero() {
            means.push(mean);
            stddevs.push(T::zero());
            values.extend(std::iter::repeat_n(T::zero(), n));
        } else {
            means.push(mean);
            stddevs.push(sd);
            values.extend(col.iter().map(|&v| (v - mean) / sd));
        }
    }
    StandardizedView {
        values,
        means,
        stddevs,
        n,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn write_tmp(contents: &str) -> tempfile::NamedTempFile {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        f.write_all(contents.as_bytes()).unwrap();
        f
    }

    #[test]
    fn loads_small_csv() {
        let f = write_tmp("a,b,y\n1,2,3\n4,5,6\n7,8.5,9\n1e-3,-2E2,0\n");
        let d: Dataset<f64> = load_csv(f.path(), "y").unwrap();
        assert_eq!(d.n(), 4);
        assert_eq!(d.p(), 2);
        assert_eq!(d.column_names(), ["a", "b"]);
        assert_eq!(d.column(1), [2.0, 5.0, 8.5, -200.0]);
        assert_eq!(d.response(), [3.0, 6.0, 9.0, 0.0]);
    }

    #[test]
    fn response_in_the_middle_keeps_order() {
        let f = write_tmp("a,y,b,c\n1,0,2,3\n4,0,5,6\n7,1,8,9\n");
        let d: Dataset<f64> = load_csv(f.path(), "y").unwrap();
        assert_eq!(d.column_names(), ["a", "b", "c"]);
        assert_eq!(d.column(2), [3.0, 6.0, 9.0]);
    }

    #[test]
    fn non_numeric_cell_names_row_and_column() {
        let f = write_tmp("a,b,y\n1,2,3\n4,abc,6\n7,8,9\n");
        let err = load_csv::<f64>(f.path(), "y").unwrap_err();
        match err {
            Error::ParseCell { row, column, value } => {
                assert_eq!(row, 2);
                assert_eq!(column, "b");
                assert_eq!(value, "abc");
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn ingestion_errors() {
        assert!(matches!(
            load_csv::<f64>(Path::new("/nonexistent/x.csv"), "y"),
            Err(Error::Io { .. })
        ));
        let f = write_tmp("a,b\n1,2\n3,4\n5,6\n");
        assert!(matches!(
            load_csv::<f64>(f.path(), "y"),
            Err(Error::MissingResponse(_))
        ));
        let f = write_tmp("a,y,y\n1,2,3\n3,4,5\n5,6,7\n");
        assert!(matches!(
            load_csv::<f64>(f.path(), "y"),
            Err(Error::DuplicateColumn(_))
        ));
        let f = write_tmp("a,y\n1,2\n3,4\n");
        assert!(matches!(
            load_csv::<f64>(f.path(), "y"),
            Err(Error::TooFewRows { found: 2, .. })
        ));
        let f = write_tmp("a,y\n1,2\n3,\n5,6\n");
        assert!(matches!(
            load_csv::<f64>(f.path(), "y"),
            Err(Error::ParseCell { row: 2, .. })
        ));
        let f = write_tmp("a,y\n1,2\nNaN,3\n5,6\n");
        assert!(matches!(
            load_csv::<f64>(f.path(), "y"),
            Err(Error::NonFinite { row: 2, .. })
        ));
    }

    #[test]
    fn standardize_three_values() {
        let d = Dataset::from_columns(
            vec![vec![1.0, 2.0, 3.0]],
            vec![0.0; 3],
            vec!["a".into()],
            "y",
        )
        .unwrap();
        let v = standardize(&d);
        assert_eq!(v.means()[0], 2.0);
        assert!((v.stddevs()[0] - (2.0f64 / 3.0).sqrt()).abs() < 1e-15);
        assert!(v.column(0).iter().sum::<f64>().abs() < 1e-12);
    }

    #[test]
    fn constant_column_becomes_zeros() {
        let d = Dataset::from_columns(
            vec![vec![5.0, 5.0, 5.0, 5.0], vec![0.1, 0.1, 0.1, 0.1]],
            vec![0.0, 1.0, 2.0, 3.0],
            vec!["a".into(), "b".into()],
            "y",
        )
        .unwrap();
        let v = standardize(&d);
        for j in 0..2 {
            assert_eq!(v.stddevs()[j], 0.0);
            assert!(v.column(j).iter().all(|&x| x == 0.0));
        }
    }

    #[test]
    fn csv_round_trip() {
        let d = Dataset::from_columns(
            vec![vec![0.1, -2.5, 3e-7], vec![1.0, 2.0, 1e300]],
            vec![1.0 / 3.0, 2.0, 3.0],
            vec!["X1".into(), "X2".into()],
            "Y",
        )
        .unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("d.csv");
        d.write_csv(&path).unwrap();
        let back: Dataset<f64> = load_csv(&path, "Y").unwrap();
        assert_eq!(back, d);
    }

    #[test]
    fn rejects_duplicate_names_and_bad_shapes() {
        assert!(matches!(
            Dataset::from_columns(
                vec![vec![1.0; 3], vec![2.0; 3]],
                vec![0.0; 3],
                vec!["a".into(), "a".into()],
                "y"
            ),
            Err(Error::DuplicateColumn(_))
        ));
        assert!(matches!(
            Dataset::from_columns(vec![vec![1.0; 4]], vec![0.0; 3], vec!["a".into()], "y"),
            Err(Error::DimensionMismatch(_))
        ));
        assert!(matches!(
            Dataset::<f64>::from_columns(vec![], vec![0.0; 3], vec![], "y"),
            Err(Error::NoPredictors)
        ));
    }
}
