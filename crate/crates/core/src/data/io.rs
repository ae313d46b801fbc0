//! Delimited-text ingestion and export.
//!
//! * View files: one sample per row, one feature per column.
//! * Label files: two columns, `sample-index` and `class-token`. The token
//!   `?` marks an unlabeled sample. Classes are numbered in order of first
//!   appearance in the file.
//!
//! Floats are written with Rust's shortest round-trip formatting, so a
//! save/load cycle reproduces every value bit for bit.

use std::fs::File;
use std::path::{Path, PathBuf};

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::dataset::{FeatureView, MultiFeatureDataset};
use crate::error::{GlccError, Result};

/// Label token for unlabeled samples.
pub const UNLABELED: &str = "?";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TextFormat {
    pub delimiter: char,
    pub has_header: bool,
}

impl Default for TextFormat {
    fn default() -> Self {
        TextFormat {
            delimiter: ',',
            has_header: false,
        }
    }
}

impl TextFormat {
    fn delimiter_byte(&self) -> Result<u8> {
        u8::try_from(self.delimiter)
            .ok()
            .filter(|b| b.is_ascii())
            .ok_or_else(|| GlccError::Param(format!("delimiter {:?} is not ASCII", self.delimiter)))
    }

    fn reader(&self, path: &Path) -> Result<csv::Reader<File>> {
        let file = File::open(path).map_err(|e| GlccError::io(path, e))?;
        Ok(csv::ReaderBuilder::new()
            .delimiter(self.delimiter_byte()?)
            .has_headers(self.has_header)
            .trim(csv::Trim::All)
            .flexible(true)
            .from_reader(file))
    }

    fn writer(&self, path: &Path) -> Result<csv::Writer<File>> {
        let file = File::create(path).map_err(|e| GlccError::io(path, e))?;
        Ok(csv::WriterBuilder::new()
            .delimiter(self.delimiter_byte()?)
            .from_writer(file))
    }
}

/// Reads a numeric matrix, one sample per row.
pub fn read_matrix(path: &Path, format: &TextFormat) -> Result<DMatrix<f64>> {
    let mut reader = format.reader(path)?;
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for (r, record) in reader.records().enumerate() {
        let record = record.map_err(|e| GlccError::format(path, e.to_string()))?;
        if record.iter().all(|c| c.is_empty()) {
            continue;
        }
        let row = record
            .iter()
            .enumerate()
            .map(|(c, cell)| {
                cell.parse::<f64>().map_err(|_| {
                    GlccError::Data(format!(
                        "{}: row {r}, column {c}: '{cell}' is not a number",
                        path.display()
                    ))
                })
            })
            .collect::<Result<Vec<f64>>>()?;
        if let Some(first) = rows.first() {
            if first.len() != row.len() {
                return Err(GlccError::Data(format!(
                    "{}: row {r} has {} columns, expected {}",
                    path.display(),
                    row.len(),
                    first.len()
                )));
            }
        }
        rows.push(row);
    }
    let d = rows.first().map(|r| r.len()).unwrap_or(0);
    Ok(DMatrix::from_fn(rows.len(), d, |i, j| rows[i][j]))
}

pub fn write_matrix(path: &Path, m: &DMatrix<f64>, format: &TextFormat) -> Result<()> {
    let mut w = format.writer(path)?;
    for i in 0..m.nrows() {
        w.write_record(m.row(i).iter().map(|v| v.to_string()))
            .map_err(|e| GlccError::format(path, e.to_string()))?;
    }
    w.flush().map_err(|e| GlccError::io(path, e))
}

/// Reads a label file into one token per sample (`None` for `?`).
///
/// Every index in `0..n` must appear exactly once.
pub fn read_label_tokens(
    path: &Path,
    n: usize,
    format: &TextFormat,
) -> Result<Vec<Option<String>>> {
    let mut tokens = vec![None; n];
    for (idx, tok) in read_label_rows(path, n, format)? {
        tokens[idx] = tok;
    }
    Ok(tokens)
}

/// Label rows as `(sample index, token)` in file order, checked to cover
/// every index in `0..n` exactly once.
pub fn read_label_rows(
    path: &Path,
    n: usize,
    format: &TextFormat,
) -> Result<Vec<(usize, Option<String>)>> {
    let mut reader = format.reader(path)?;
    let mut seen = vec![false; n];
    let mut rows = Vec::with_capacity(n);
    for (r, record) in reader.records().enumerate() {
        let record = record.map_err(|e| GlccError::format(path, e.to_string()))?;
        if record.iter().all(|c| c.is_empty()) {
            continue;
        }
        if record.len() != 2 {
            return Err(GlccError::Data(format!(
                "{}: row {r} has {} columns, expected 2 (index, class)",
                path.display(),
                record.len()
            )));
        }
        let idx: usize = record[0].parse().map_err(|_| {
            GlccError::Data(format!(
                "{}: row {r}: '{}' is not a sample index",
                path.display(),
                &record[0]
            ))
        })?;
        if idx >= n {
            return Err(GlccError::Data(format!(
                "{}: row {r}: sample index {idx} out of range for {n} samples",
                path.display()
            )));
        }
        if std::mem::replace(&mut seen[idx], true) {
            return Err(GlccError::Data(format!(
                "{}: sample index {idx} appears more than once",
                path.display()
            )));
        }
        let tok = &record[1];
        rows.push((idx, (tok != UNLABELED).then(|| tok.to_string())));
    }
    if let Some(i) = seen.iter().position(|s| !s) {
        return Err(GlccError::Data(format!(
            "{}: sample {i} has no label row",
            path.display()
        )));
    }
    Ok(rows)
}

/// Maps class tokens to indices.
///
/// With `known` given, tokens outside it are an error listing every
/// offender. Otherwise classes are numbered by first appearance.
pub fn encode_labels(
    tokens: &[Option<String>],
    known: Option<&[String]>,
) -> Result<(Vec<Option<usize>>, Vec<String>)> {
    let mut classes: Vec<String> = known.map(|k| k.to_vec()).unwrap_or_default();
    let mut unknown: Vec<String> = Vec::new();
    let mut labels = Vec::with_capacity(tokens.len());
    for t in tokens {
        let Some(t) = t else {
            labels.push(None);
            continue;
        };
        match classes.iter().position(|c| c == t) {
            Some(k) => labels.push(Some(k)),
            None if known.is_none() => {
                classes.push(t.clone());
                labels.push(Some(classes.len() - 1));
            }
            None => {
                if !unknown.contains(t) {
                    unknown.push(t.clone());
                }
                labels.push(None);
            }
        }
    }
    if !unknown.is_empty() {
        return Err(GlccError::Data(format!(
            "unknown classes: {}",
            unknown.join(", ")
        )));
    }
    Ok((labels, classes))
}

fn view_name(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| path.display().to_string())
}

/// Loads aligned view files and a label file.
///
/// View names are the file stems. Without `known_classes`, classes are
/// numbered by first appearance in the label file (file order, not sample
/// order).
pub fn load_dataset(
    view_paths: &[PathBuf],
    label_path: &Path,
    format: &TextFormat,
    known_classes: Option<&[String]>,
) -> Result<MultiFeatureDataset> {
    let views = load_views(view_paths, format)?;
    let n = views[0].n();
    let rows = read_label_rows(label_path, n, format)?;
    let in_file_order: Vec<Option<String>> = rows.iter().map(|(_, t)| t.clone()).collect();
    let (file_labels, classes) = encode_labels(&in_file_order, known_classes)
        .map_err(|e| e.context(label_path.display()))?;
    let mut labels = vec![None; n];
    for ((idx, _), label) in rows.iter().zip(file_labels) {
        labels[*idx] = label;
    }
    MultiFeatureDataset::new(views, &labels, classes)
}

/// Loads view files and checks that they agree on the sample count.
pub fn load_views(view_paths: &[PathBuf], format: &TextFormat) -> Result<Vec<FeatureView>> {
    if view_paths.is_empty() {
        return Err(GlccError::Data("no view files given".into()));
    }
    let mut views = Vec::with_capacity(view_paths.len());
    for p in view_paths {
        views.push(FeatureView::new(view_name(p), read_matrix(p, format)?));
    }
    let n0 = views[0].n();
    if let Some((p, v)) = view_paths.iter().zip(&views).find(|(_, v)| v.n() != n0) {
        return Err(GlccError::Data(format!(
            "row-count mismatch: {} has {} rows but {} has {}",
            view_paths[0].display(),
            n0,
            p.display(),
            v.n()
        )));
    }
    Ok(views)
}

/// Writes one label row per sample.
pub fn write_labels(
    path: &Path,
    labels: &[Option<usize>],
    class_names: &[String],
    format: &TextFormat,
) -> Result<()> {
    let mut w = format.writer(path)?;
    if format.has_header {
        w.write_record(["index", "class"])
            .map_err(|e| GlccError::format(path, e.to_string()))?;
    }
    for (i, l) in labels.iter().enumerate() {
        let tok = l.map(|k| class_names[k].as_str()).unwrap_or(UNLABELED);
        w.write_record([i.to_string().as_str(), tok])
            .map_err(|e| GlccError::format(path, e.to_string()))?;
    }
    w.flush().map_err(|e| GlccError::io(path, e))
}

/// Paths written by [`save_dataset`].
#[derive(Debug, Clone)]
pub struct SavedDataset {
    pub views: Vec<PathBuf>,
    pub labels: PathBuf,
}

/// Writes `<dir>/<view-name>.csv` per view and `<dir>/labels.csv`.
pub fn save_dataset(
    dataset: &MultiFeatureDataset,
    dir: &Path,
    format: &TextFormat,
) -> Result<SavedDataset> {
    std::fs::create_dir_all(dir).map_err(|e| GlccError::io(dir, e))?;
    let mut views = Vec::new();
    for v in dataset.views() {
        let p = dir.join(format!("{}.csv", v.name));
        if format.has_header {
            return Err(GlccError::Param(
                "view files are written without a header".into(),
            ));
        }
        write_matrix(&p, &v.data, format)?;
        views.push(p);
    }
    let labels = dir.join("labels.csv");
    write_labels(&labels, &dataset.labels(), dataset.class_names(), format)?;
    Ok(SavedDataset { views, labels })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn encode_first_appearance_order() {
        let toks: Vec<Option<String>> = ["b", "a", "?", "b"]
            .iter()
            .map(|t| (*t != "?").then(|| t.to_string()))
            .collect();
        let (labels, classes) = encode_labels(&toks, None).unwrap();
        assert_eq!(classes, vec!["b", "a"]);
        assert_eq!(labels, vec![Some(0), Some(1), None, Some(0)]);
    }

    #[test]
    fn unknown_classes_are_listed() {
        let toks = vec![
            Some("x".to_string()),
            Some("z".to_string()),
            Some("y".to_string()),
        ];
        let known = vec!["x".to_string()];
        let err = encode_labels(&toks, Some(&known)).unwrap_err().to_string();
        assert!(err.contains("z, y"), "{err}");
    }

    #[test]
    fn non_numeric_cell_is_located() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("v.csv");
        std::fs::write(&p, "1,2\n3,abc\n").unwrap();
        let err = read_matrix(&p, &TextFormat::default())
            .unwrap_err()
            .to_string();
        assert!(err.contains("row 1, column 1"), "{err}");
    }

    #[test]
    fn header_and_custom_delimiter() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("v.tsv");
        std::fs::write(&p, "f1\tf2\n1.5\t2\n-3\t4e-3\n").unwrap();
        let fmt = TextFormat {
            delimiter: '\t',
            has_header: true,
        };
        let m = read_matrix(&p, &fmt).unwrap();
        assert_eq!(m, DMatrix::from_row_slice(2, 2, &[1.5, 2.0, -3.0, 4e-3]));
    }
}
