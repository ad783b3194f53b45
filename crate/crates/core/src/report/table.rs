use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ColumnType {
    String,
    Integer,
    Float,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Column {
    pub name: String,
    #[serde(rename = "type")]
    pub ty: ColumnType,
    /// Whether empty cells are allowed.
    pub nullable: bool,
}

/// Contents of a `.schema.json` sidecar.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Schema {
    pub table: String,
    pub columns: Vec<Column>,
}

/// One cell as written. Floats use the shortest representation that parses
/// back to the same value; missing values are empty.
#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Str(String),
    Int(i64),
    Float(f64),
    Missing,
}

impl Cell {
    fn render(&self) -> String {
        match self {
            Cell::Str(s) => s.clone(),
            Cell::Int(i) => i.to_string(),
            Cell::Float(x) => format!("{x:?}"),
            Cell::Missing => String::new(),
        }
    }
}

impl From<&str> for Cell {
    fn from(s: &str) -> Self {
        Cell::Str(s.to_owned())
    }
}

impl From<String> for Cell {
    fn from(s: String) -> Self {
        Cell::Str(s)
    }
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Float(x)
    }
}

impl From<Option<f64>> for Cell {
    fn from(x: Option<f64>) -> Self {
        x.map_or(Cell::Missing, Cell::Float)
    }
}

macro_rules! int_cell {
    ($($t:ty),*) => {$(
        impl From<$t> for Cell {
            fn from(i: $t) -> Self {
                Cell::Int(i as i64)
            }
        }
        impl From<Option<$t>> for Cell {
            fn from(i: Option<$t>) -> Self {
                i.map_or(Cell::Missing, |i| Cell::Int(i as i64))
            }
        }
    )*};
}
int_cell!(u8, i8, u32, i32, u64, usize, i64);

/// An in-memory comma-separated table with a typed schema.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    schema: Schema,
    rows: Vec<Vec<String>>,
}

impl Table {
    /// Columns are non-nullable unless the type is suffixed with `?` in
    /// the spec string, e.g. `"value:float?"`.
    pub fn new(name: &str, columns: &[&str]) -> Self {
        let columns = columns
            .iter()
            .map(|spec| {
                let (name, ty) = spec.split_once(':').unwrap_or((spec, "string"));
                let nullable = ty.ends_with('?');
                let ty = match ty.trim_end_matches('?') {
                    "int" => ColumnType::Integer,
                    "float" => ColumnType::Float,
                    "string" => ColumnType::String,
                    other => panic!("unknown column type {other}"),
                };
                Column {
                    name: name.to_owned(),
                    ty,
                    nullable,
                }
            })
            .collect();
        Table {
            schema: Schema {
                table: name.to_owned(),
                columns,
            },
            rows: Vec::new(),
        }
    }

    pub fn name(&self) -> &str {
        &self.schema.table
    }

    pub fn schema(&self) -> &Schema {
        &self.schema
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        assert_eq!(
            row.len(),
            self.schema.columns.len(),
            "row width for {}",
            self.name()
        );
        self.rows.push(row.iter().map(Cell::render).collect());
    }

    pub fn csv_path(dir: &Path, name: &str) -> PathBuf {
        dir.join(format!("{name}.csv"))
    }

    pub fn schema_path(dir: &Path, name: &str) -> PathBuf {
        dir.join(format!("{name}.schema.json"))
    }

    /// Writes `<name>.csv` and `<name>.schema.json` into `dir`.
    pub fn write(&self, dir: &Path) -> Result<()> {
        let path = Self::csv_path(dir, self.name());
        let mut w = csv::Writer::from_path(&path).map_err(|e| csv_error(&path, e))?;
        w.write_record(self.schema.columns.iter().map(|c| &c.name))
            .map_err(|e| csv_error(&path, e))?;
        for row in &self.rows {
            w.write_record(row).map_err(|e| csv_error(&path, e))?;
        }
        w.flush().map_err(|e| Error::io(&path, e))?;
        let spath = Self::schema_path(dir, self.name());
        let mut json = serde_json::to_string_pretty(&self.schema).expect("schema serializes");
        json.push('\n');
        fs::write(&spath, json).map_err(|e| Error::io(&spath, e))
    }

    /// Reads a table back, checking the header against its schema and every
    /// cell against its column type.
    pub fn read(dir: &Path, name: &str) -> Result<Table> {
        let path = Self::csv_path(dir, name);
        let spath = Self::schema_path(dir, name);
        if !path.exists() || !spath.exists() {
            return Err(Error::MissingTable(name.to_owned()));
        }
        let text = fs::read_to_string(&spath).map_err(|e| Error::io(&spath, e))?;
        let schema: Schema = serde_json::from_str(&text).map_err(|e| Error::MalformedRecord {
            path: spath.clone(),
            line: e.line(),
            message: e.to_string(),
        })?;
        let mut r = csv::Reader::from_path(&path).map_err(|e| csv_error(&path, e))?;
        let header: Vec<String> = r
            .headers()
            .map_err(|e| csv_error(&path, e))?
            .iter()
            .map(str::to_owned)
            .collect();
        let expected: Vec<&String> = schema.columns.iter().map(|c| &c.name).collect();
        if header.iter().collect::<Vec<_>>() != expected {
            return Err(malformed(&path, 1, "header does not match schema".into()));
        }
        let mut rows = Vec::new();
        for (i, rec) in r.records().enumerate() {
            let rec = rec.map_err(|e| csv_error(&path, e))?;
            let row: Vec<String> = rec.iter().map(str::to_owned).collect();
            for (cell, col) in row.iter().zip(&schema.columns) {
                let ok = match (cell.is_empty(), col.ty) {
                    (true, _) => col.nullable || col.ty == ColumnType::String,
                    (false, ColumnType::Integer) => cell.parse::<i64>().is_ok(),
                    (false, ColumnType::Float) => cell.parse::<f64>().is_ok(),
                    (false, ColumnType::String) => true,
                };
                if !ok {
                    return Err(malformed(
                        &path,
                        i + 2,
                        format!("bad value {cell:?} in {}", col.name),
                    ));
                }
            }
            rows.push(row);
        }
        Ok(Table { schema, rows })
    }

    pub fn column(&self, name: &str) -> Result<usize> {
        self.schema
            .columns
            .iter()
            .position(|c| c.name == name)
            .ok_or_else(|| Error::MissingTable(format!("{}.{name}", self.name())))
    }

    pub fn strings(&self, name: &str) -> Result<Vec<&str>> {
        let k = self.column(name)?;
        Ok(self.rows.iter().map(|r| r[k].as_str()).collect())
    }

    /// Float column, `None` for empty cells.
    pub fn floats(&self, name: &str) -> Result<Vec<Option<f64>>> {
        let k = self.column(name)?;
        Ok(self
            .rows
            .iter()
            .map(|r| (!r[k].is_empty()).then(|| r[k].parse().expect("validated on read")))
            .collect())
    }

    pub fn ints(&self, name: &str) -> Result<Vec<Option<i64>>> {
        let k = self.column(name)?;
        Ok(self
            .rows
            .iter()
            .map(|r| (!r[k].is_empty()).then(|| r[k].parse().expect("validated on read")))
            .collect())
    }
}

fn malformed(path: &Path, line: usize, message: String) -> Error {
    Error::MalformedRecord {
        path: path.to_owned(),
        line,
        message,
    }
}

fn csv_error(path: &Path, e: csv::Error) -> Error {
    let line = e.position().map_or(0, |p| p.line() as usize);
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::io(path, io),
        other => malformed(path, line, format!("{other:?}")),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_with_missing_and_quoting() {
        let dir = tempfile::tempdir().unwrap();
        let mut t = Table::new("demo", &["id", "n:int", "v:float?"]);
        t.push(vec!["a,b".into(), 3u32.into(), Some(0.1).into()]);
        t.push(vec!["c".into(), 4usize.into(), None::<f64>.into()]);
        t.write(dir.path()).unwrap();
        let back = Table::read(dir.path(), "demo").unwrap();
        assert_eq!(back, t);
        assert_eq!(back.strings("id").unwrap(), vec!["a,b", "c"]);
        assert_eq!(back.floats("v").unwrap(), vec![Some(0.1), None]);
        assert_eq!(back.ints("n").unwrap(), vec![Some(3), Some(4)]);
    }

    #[test]
    fn missing_and_mistyped_tables() {
        let dir = tempfile::tempdir().unwrap();
        assert!(matches!(
            Table::read(dir.path(), "nope"),
            Err(Error::MissingTable(_))
        ));
        let mut t = Table::new("t", &["n:int"]);
        t.push(vec![1u8.into()]);
        t.write(dir.path()).unwrap();
        fs::write(dir.path().join("t.csv"), "n\nx\n").unwrap();
        assert!(matches!(
            Table::read(dir.path(), "t"),
            Err(Error::MalformedRecord { line: 2, .. })
        ));
    }

    #[test]
    fn floats_round_trip_exactly() {
        for x in [0.1 + 0.2, 1e-300, -2.5e17, 1.0 / 3.0] {
            let s = Cell::Float(x).render();
            assert_eq!(s.parse::<f64>().unwrap(), x);
        }
    }
}
