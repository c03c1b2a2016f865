use std::fs;
use std::path::Path;

use rusqlite::types::{ToSqlOutput, Value as SqlValue, ValueRef};
use rusqlite::{params_from_iter, Connection, OpenFlags, ToSql};

use super::tables::{Cell, ColumnType, Table, TableSchema};
use super::{ExportBundle, ExportError};

impl ToSql for Cell {
    fn to_sql(&self) -> rusqlite::Result<ToSqlOutput<'_>> {
        Ok(match self {
            Cell::Int(i) => ToSqlOutput::Owned(SqlValue::Integer(*i)),
            Cell::Text(s) => ToSqlOutput::Borrowed(ValueRef::Text(s.as_bytes())),
            Cell::Bool(b) => ToSqlOutput::Owned(SqlValue::Integer(*b as i64)),
            Cell::Null => ToSqlOutput::Owned(SqlValue::Null),
        })
    }
}

fn db_err(path: &Path) -> impl Fn(rusqlite::Error) -> ExportError + '_ {
    move |source| ExportError::Db {
        path: path.to_path_buf(),
        source,
    }
}

fn quote_list(names: &[&str]) -> String {
    names
        .iter()
        .map(|n| format!("\"{n}\""))
        .collect::<Vec<_>>()
        .join(", ")
}

pub(crate) fn create_table_sql(schema: &TableSchema) -> String {
    let mut parts: Vec<String> = schema
        .columns
        .iter()
        .map(|c| {
            let ty = match c.ty {
                ColumnType::Integer | ColumnType::Bool => "INTEGER",
                ColumnType::Text => "TEXT",
            };
            let mut def = format!("\"{}\" {ty}", c.name);
            if !c.nullable {
                def.push_str(" NOT NULL");
            }
            if c.ty == ColumnType::Bool {
                def.push_str(&format!(" CHECK (\"{}\" IN (0, 1))", c.name));
            }
            def
        })
        .collect();
    parts.push(format!("PRIMARY KEY ({})", quote_list(schema.primary_key)));
    for fk in schema.foreign_keys {
        parts.push(format!(
            "FOREIGN KEY ({}) REFERENCES \"{}\" ({})",
            quote_list(fk.columns),
            fk.target,
            quote_list(fk.target_columns)
        ));
    }
    format!("CREATE TABLE \"{}\" (\n  {}\n)", schema.name, parts.join(",\n  "))
}

fn existing_tables(path: &Path) -> String {
    let listing = Connection::open_with_flags(path, OpenFlags::SQLITE_OPEN_READ_ONLY).and_then(|c| {
        let mut stmt = c.prepare("SELECT name FROM sqlite_master WHERE type = 'table' ORDER BY name")?;
        let names = stmt
            .query_map([], |row| row.get::<_, String>(0))?
            .collect::<Result<Vec<_>, _>>()?;
        Ok(names)
    });
    match listing {
        Ok(names) if names.is_empty() => "no tables".to_string(),
        Ok(names) => format!("tables: {}", names.join(", ")),
        Err(e) => format!("unreadable as SQLite: {e}"),
    }
}

/// Creates `db_path` holding `tables`, all inside one transaction. On any
/// failure the partially written file is removed.
pub fn write_db(tables: &[Table], db_path: &Path, overwrite: bool) -> Result<ExportBundle, ExportError> {
    if db_path.exists() {
        if !overwrite {
            return Err(ExportError::SchemaConflict {
                path: db_path.to_path_buf(),
                detail: existing_tables(db_path),
            });
        }
        fs::remove_file(db_path).map_err(|e| ExportError::io(db_path, e))?;
    }
    let result = fill(tables, db_path);
    if result.is_err() {
        let _ = fs::remove_file(db_path);
    }
    result?;
    Ok(ExportBundle {
        out_dir: db_path.parent().unwrap_or(Path::new(".")).to_path_buf(),
        csv_files: Vec::new(),
        db_file: Some(db_path.to_path_buf()),
        manifest_file: None,
    })
}

fn fill(tables: &[Table], db_path: &Path) -> Result<(), ExportError> {
    let err = db_err(db_path);
    let mut conn = Connection::open(db_path).map_err(&err)?;
    conn.pragma_update(None, "foreign_keys", true).map_err(&err)?;
    let tx = conn.transaction().map_err(&err)?;
    for table in tables {
        tx.execute(&create_table_sql(table.schema), []).map_err(&err)?;
        let placeholders = vec!["?"; table.schema.columns.len()].join(", ");
        let sql = format!(
            "INSERT INTO \"{}\" ({}) VALUES ({placeholders})",
            table.schema.name,
            quote_list(&table.schema.header())
        );
        let mut stmt = tx.prepare(&sql).map_err(&err)?;
        for row in &table.rows {
            stmt.execute(params_from_iter(row.iter())).map_err(&err)?;
        }
    }
    tx.commit().map_err(&err)
}

/// Reads a table back as CSV-rendered strings, in the same row order the
/// exporter uses (primary key order).
pub fn read_db_rows(db_path: &Path, schema: &TableSchema) -> Result<Vec<Vec<String>>, ExportError> {
    let err = db_err(db_path);
    let conn = Connection::open_with_flags(db_path, OpenFlags::SQLITE_OPEN_READ_ONLY).map_err(&err)?;
    let sql = format!(
        "SELECT {} FROM \"{}\" ORDER BY rowid",
        quote_list(&schema.header()),
        schema.name
    );
    let mut stmt = conn.prepare(&sql).map_err(&err)?;
    let rows = stmt
        .query_map([], |row| {
            schema
                .columns
                .iter()
                .enumerate()
                .map(|(i, col)| {
                    Ok(match row.get_ref(i)? {
                        ValueRef::Null => String::new(),
                        ValueRef::Integer(v) if col.ty == ColumnType::Bool => (v != 0).to_string(),
                        ValueRef::Integer(v) => v.to_string(),
                        ValueRef::Real(v) => v.to_string(),
                        ValueRef::Text(t) | ValueRef::Blob(t) => String::from_utf8_lossy(t).into_owned(),
                    })
                })
                .collect::<rusqlite::Result<Vec<String>>>()
        })
        .map_err(&err)?
        .collect::<rusqlite::Result<Vec<_>>>()
        .map_err(&err)?;
    Ok(rows)
}
