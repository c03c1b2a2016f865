//! CSV and SQLite output.
//!
//! CSV files are UTF-8 with LF line endings and a header row; fields are
//! quoted only when they contain a delimiter, quote or line break. The
//! SQLite file mirrors the CSV tables one-to-one, with `repositories.repo_id`
//! as the parent key of every child table. Column layouts live in
//! [`tables`].

mod db;
mod import;
pub mod tables;

pub use db::{read_db_rows, write_db};
pub use import::import_csv;
pub use tables::{Cell, ColumnType, Table, TableSchema};

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::model::{CommitRecord, RepositoryRecord, UserProfile};
use crate::pipeline::DatasetManifest;

pub const MANIFEST_FILE: &str = "manifest.json";

#[derive(Debug, Error)]
pub enum ExportError {
    #[error("i/o error at {}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("csv error at {}: {source}", path.display())]
    Csv {
        path: PathBuf,
        #[source]
        source: csv::Error,
    },
    #[error("database error at {}: {source}", path.display())]
    Db {
        path: PathBuf,
        #[source]
        source: rusqlite::Error,
    },
    #[error("{} already exists ({detail}); pass overwrite to replace it", path.display())]
    SchemaConflict { path: PathBuf, detail: String },
    #[error("cannot import {}: {message}", path.display())]
    Import { path: PathBuf, message: String },
}

impl ExportError {
    pub(crate) fn io(path: &Path, source: std::io::Error) -> Self {
        ExportError::Io {
            path: path.to_path_buf(),
            source,
        }
    }

    pub(crate) fn csv(path: &Path, source: csv::Error) -> Self {
        ExportError::Csv {
            path: path.to_path_buf(),
            source,
        }
    }
}

/// What an export call wrote.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ExportBundle {
    pub out_dir: PathBuf,
    /// (table name, data row count), in write order.
    pub csv_files: Vec<(String, usize)>,
    pub db_file: Option<PathBuf>,
    pub manifest_file: Option<PathBuf>,
}

impl ExportBundle {
    fn merge(&mut self, other: ExportBundle) {
        self.csv_files.extend(other.csv_files);
        self.db_file = self.db_file.take().or(other.db_file);
        self.manifest_file = self.manifest_file.take().or(other.manifest_file);
    }
}

fn ensure_dir(dir: &Path) -> Result<(), ExportError> {
    fs::create_dir_all(dir).map_err(|e| ExportError::io(dir, e))
}

/// Writes one CSV file per table into `out_dir`.
pub fn write_csv_tables(tables: &[Table], out_dir: &Path) -> Result<ExportBundle, ExportError> {
    ensure_dir(out_dir)?;
    let mut bundle = ExportBundle {
        out_dir: out_dir.to_path_buf(),
        ..Default::default()
    };
    for table in tables {
        let path = out_dir.join(table.schema.file_name());
        let file = File::create(&path).map_err(|e| ExportError::io(&path, e))?;
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .quote_style(csv::QuoteStyle::Necessary)
            .from_writer(BufWriter::new(file));
        w.write_record(table.schema.header())
            .map_err(|e| ExportError::csv(&path, e))?;
        for row in &table.rows {
            w.write_record(row.iter().map(Cell::to_csv))
                .map_err(|e| ExportError::csv(&path, e))?;
        }
        w.flush().map_err(|e| ExportError::io(&path, e))?;
        bundle
            .csv_files
            .push((table.schema.name.to_string(), table.rows.len()));
    }
    Ok(bundle)
}

/// Writes `manifest.json` into `dir`.
pub fn write_manifest(manifest: &DatasetManifest, dir: &Path) -> Result<PathBuf, ExportError> {
    ensure_dir(dir)?;
    let path = dir.join(MANIFEST_FILE);
    let mut json = serde_json::to_string_pretty(manifest).expect("manifest serializes");
    json.push('\n');
    let mut f = File::create(&path).map_err(|e| ExportError::io(&path, e))?;
    f.write_all(json.as_bytes()).map_err(|e| ExportError::io(&path, e))?;
    Ok(path)
}

/// The eight dataset CSVs plus `manifest.json`.
pub fn export_csv(
    records: &[RepositoryRecord],
    manifest: &DatasetManifest,
    out_dir: &Path,
) -> Result<ExportBundle, ExportError> {
    let mut bundle = write_csv_tables(&tables::dataset_tables(records), out_dir)?;
    bundle.manifest_file = Some(write_manifest(manifest, out_dir)?);
    Ok(bundle)
}

/// The eight dataset tables in one SQLite file, plus `manifest.json` next
/// to it. An existing file is only replaced when `overwrite` is set.
pub fn export_db(
    records: &[RepositoryRecord],
    manifest: &DatasetManifest,
    db_path: &Path,
    overwrite: bool,
) -> Result<ExportBundle, ExportError> {
    let mut bundle = write_db(&tables::dataset_tables(records), db_path, overwrite)?;
    let dir = db_path.parent().unwrap_or(Path::new("."));
    bundle.manifest_file = Some(write_manifest(manifest, dir)?);
    Ok(bundle)
}

fn repo_tables(record: &RepositoryRecord, commits: &[CommitRecord]) -> Vec<Table> {
    let mut t = tables::dataset_tables(std::slice::from_ref(record));
    t.push(tables::commit_table(record.summary.repo_id, commits));
    t
}

/// Single-repository output: the eight dataset tables for one record plus
/// `commits.csv`.
pub fn export_repo_csv(
    record: &RepositoryRecord,
    commits: &[CommitRecord],
    out_dir: &Path,
) -> Result<ExportBundle, ExportError> {
    write_csv_tables(&repo_tables(record, commits), out_dir)
}

pub fn export_repo_db(
    record: &RepositoryRecord,
    commits: &[CommitRecord],
    db_path: &Path,
    overwrite: bool,
) -> Result<ExportBundle, ExportError> {
    write_db(&repo_tables(record, commits), db_path, overwrite)
}

/// `user.csv`, `user_repos.csv` and `user_languages.csv`.
pub fn export_user(profile: &UserProfile, out_dir: &Path) -> Result<ExportBundle, ExportError> {
    write_csv_tables(&tables::user_tables(profile), out_dir)
}

pub fn export_user_db(
    profile: &UserProfile,
    db_path: &Path,
    overwrite: bool,
) -> Result<ExportBundle, ExportError> {
    write_db(&tables::user_tables(profile), db_path, overwrite)
}

/// Output format selection shared by the exporters' callers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Format {
    Csv,
    Db,
    #[default]
    Both,
}

impl Format {
    pub fn csv(self) -> bool {
        matches!(self, Format::Csv | Format::Both)
    }

    pub fn db(self) -> bool {
        matches!(self, Format::Db | Format::Both)
    }
}

/// Runs the CSV and/or DB exporter for a dataset according to `format`.
pub fn export_dataset(
    records: &[RepositoryRecord],
    manifest: &DatasetManifest,
    out_dir: &Path,
    format: Format,
    db_name: &str,
) -> Result<ExportBundle, ExportError> {
    let mut bundle = ExportBundle {
        out_dir: out_dir.to_path_buf(),
        ..Default::default()
    };
    if format.csv() {
        bundle.merge(export_csv(records, manifest, out_dir)?);
    }
    if format.db() {
        ensure_dir(out_dir)?;
        bundle.merge(export_db(records, manifest, &out_dir.join(db_name), false)?);
    }
    Ok(bundle)
}
