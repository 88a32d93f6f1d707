//! CSV input and output. Every file has a header row; numbers are written in
//! shortest round-trip form so reruns are byte-identical.

use std::collections::HashSet;
use std::fs;
use std::path::Path;

use tvp_core::{Matrix, TimeSeriesData};

use crate::error::{CliError, Result};

pub const INTERCEPT: &str = "Intercept";

/// Raw string cells with their header.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub headers: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn column_index(&self, name: &str) -> Option<usize> {
        self.headers.iter().position(|h| h == name)
    }

    fn require(&self, name: &str) -> Result<usize> {
        self.column_index(name)
            .ok_or_else(|| CliError::UnknownColumn(name.to_string()))
    }

    pub fn numeric_column(&self, name: &str, path: &Path) -> Result<Vec<f64>> {
        let j = self.require(name)?;
        self.rows
            .iter()
            .enumerate()
            .map(|(i, r)| {
                let cell = r[j].trim();
                cell.parse::<f64>()
                    .ok()
                    .filter(|v| v.is_finite())
                    .ok_or_else(|| CliError::BadData {
                        path: path.to_path_buf(),
                        msg: format!("row {}, column {name:?}: {cell:?} is not a finite number", i + 2),
                    })
            })
            .collect()
    }
}

pub fn read_table(path: &Path) -> Result<Table> {
    let file = std::fs::File::open(path).map_err(|e| CliError::io(path, e))?;
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(file);
    let headers: Vec<String> = rdr
        .headers()
        .map_err(|e| CliError::csv(path, e))?
        .iter()
        .map(str::to_string)
        .collect();
    let mut seen = HashSet::new();
    if let Some(dup) = headers.iter().find(|h| !seen.insert(h.as_str())) {
        return Err(CliError::BadData {
            path: path.to_path_buf(),
            msg: format!("duplicate column {dup:?}"),
        });
    }
    let mut rows = Vec::new();
    for rec in rdr.records() {
        let rec = rec.map_err(|e| CliError::csv(path, e))?;
        rows.push(rec.iter().map(str::to_string).collect());
    }
    Ok(Table { headers, rows })
}

/// Which columns of a CSV make up the regression.
#[derive(Debug, Clone, PartialEq)]
pub struct DataSelection {
    pub response: String,
    /// `None` takes every column other than the response and time column.
    pub covariates: Option<Vec<String>>,
    pub time_column: String,
    pub intercept: bool,
}

impl Default for DataSelection {
    fn default() -> Self {
        Self {
            response: "y".into(),
            covariates: None,
            time_column: "t".into(),
            intercept: true,
        }
    }
}

impl DataSelection {
    fn covariate_names(&self, table: &Table) -> Result<Vec<String>> {
        let names = match &self.covariates {
            Some(c) => c.clone(),
            None => table
                .headers
                .iter()
                .filter(|h| **h != self.response && **h != self.time_column)
                .cloned()
                .collect(),
        };
        for n in &names {
            table.require(n)?;
        }
        Ok(names)
    }
}

pub fn dataset_from_table(table: &Table, sel: &DataSelection, path: &Path) -> Result<TimeSeriesData> {
    let y = table.numeric_column(&sel.response, path)?;
    let mut names = Vec::new();
    let mut cols = Vec::new();
    if sel.intercept {
        names.push(INTERCEPT.to_string());
        cols.push(vec![1.0; y.len()]);
    }
    for n in sel.covariate_names(table)? {
        if sel.intercept && n == INTERCEPT {
            continue;
        }
        cols.push(table.numeric_column(&n, path)?);
        names.push(n);
    }
    if cols.is_empty() {
        return Err(CliError::InvalidArgument("no covariates selected and intercept disabled".into()));
    }
    let (n, d) = (y.len(), cols.len());
    let mut x = Matrix::zeros(n, d);
    for (j, c) in cols.iter().enumerate() {
        for (t, v) in c.iter().enumerate() {
            x[(t, j)] = *v;
        }
    }
    let mut data = TimeSeriesData::new(y, x, names)?;
    if let Some(j) = table.column_index(&sel.time_column) {
        data = data.with_time_index(table.rows.iter().map(|r| r[j].clone()).collect())?;
    }
    Ok(data)
}

pub fn load_dataset(path: &Path, sel: &DataSelection) -> Result<TimeSeriesData> {
    dataset_from_table(&read_table(path)?, sel, path)
}

/// Shortest round-trip representation, switching to exponent form for very
/// small or large magnitudes.
pub fn fmt(v: f64) -> String {
    format!("{v:?}")
}

pub fn write_csv<I>(path: &Path, header: &[String], rows: I) -> Result<()>
where
    I: IntoIterator<Item = Vec<String>>,
{
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent).map_err(|e| CliError::io(parent, e))?;
    }
    let mut w = csv::Writer::from_path(path).map_err(|e| CliError::csv(path, e))?;
    w.write_record(header).map_err(|e| CliError::csv(path, e))?;
    for r in rows {
        w.write_record(&r).map_err(|e| CliError::csv(path, e))?;
    }
    w.flush().map_err(|e| CliError::io(path, e))
}

/// Writes `t, y, <design columns>` exactly as used for fitting.
pub fn write_dataset(path: &Path, data: &TimeSeriesData) -> Result<()> {
    let mut header = vec!["t".to_string(), "y".to_string()];
    header.extend(data.column_names.iter().cloned());
    let rows = (0..data.len()).map(|t| {
        let mut r = vec![match &data.time_index {
            Some(ix) => ix[t].clone(),
            None => (t + 1).to_string(),
        }];
        r.push(fmt(data.y[t]));
        r.extend(data.x.row(t).iter().map(|&v| fmt(v)));
        r
    });
    write_csv(path, &header, rows)
}

/// Selection that reads back a file written by [`write_dataset`].
pub fn design_selection() -> DataSelection {
    DataSelection {
        intercept: false,
        ..DataSelection::default()
    }
}

/// Test rows for an existing fit: covariates by the fit's column names, with
/// a missing intercept column filled with ones.
pub fn test_rows(table: &Table, column_names: &[String], response: &str, path: &Path) -> Result<Vec<(Vec<f64>, f64)>> {
    let y = table.numeric_column(response, path)?;
    let mut cols = Vec::new();
    for name in column_names {
        if name == INTERCEPT && table.column_index(name).is_none() {
            cols.push(vec![1.0; y.len()]);
        } else {
            cols.push(table.numeric_column(name, path)?);
        }
    }
    Ok((0..y.len())
        .map(|t| (cols.iter().map(|c| c[t]).collect(), y[t]))
        .collect())
}
