use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::Context;
use serde::Serialize;
use serde_json::{Map, Value};

use crate::config::Settings;

/// Where a run writes its files, and the metadata stamped on every CSV.
pub struct Emitter {
    dir: PathBuf,
    meta: Vec<String>,
}

impl Emitter {
    pub fn new(command: &str, settings: &Settings) -> anyhow::Result<Emitter> {
        let dir = settings.out();
        std::fs::create_dir_all(&dir).with_context(|| format!("creating {}", dir.display()))?;
        let mut config = serde_json::to_value(settings)?;
        if let Value::Object(map) = &mut config {
            map.retain(|_, v| !v.is_null());
        }
        let meta = vec![
            format!("# staeckel {}", env!("CARGO_PKG_VERSION")),
            format!("# command: {command}"),
            format!("# config: {config}"),
        ];
        Ok(Emitter { dir, meta })
    }

    pub fn path(&self, name: &str) -> PathBuf {
        self.dir.join(name)
    }

    /// Metadata lines, then a header row and one row per record.
    pub fn csv<T: Serialize>(&self, name: &str, extra_meta: &[String], rows: &[T]) -> anyhow::Result<PathBuf> {
        let path = self.path(name);
        let mut file = BufWriter::new(create(&path)?);
        for line in self.meta.iter().chain(extra_meta) {
            writeln!(file, "{line}")?;
        }
        let mut w = csv::Writer::from_writer(file);
        for row in rows {
            w.serialize(row)?;
        }
        w.flush()?;
        Ok(path)
    }

    /// Metadata lines, then a numeric table under the given header.
    pub fn table(&self, name: &str, extra_meta: &[String], header: &[String], rows: &[Vec<f64>]) -> anyhow::Result<PathBuf> {
        let path = self.path(name);
        let mut file = BufWriter::new(create(&path)?);
        for line in self.meta.iter().chain(extra_meta) {
            writeln!(file, "{line}")?;
        }
        let mut w = csv::Writer::from_writer(file);
        w.write_record(header)?;
        for row in rows {
            w.serialize(row)?;
        }
        w.flush()?;
        Ok(path)
    }

    pub fn json(&self, name: &str, report: &Report) -> anyhow::Result<PathBuf> {
        let path = self.path(name);
        let mut file = BufWriter::new(create(&path)?);
        serde_json::to_writer_pretty(&mut file, &report.0)?;
        writeln!(file)?;
        Ok(path)
    }

    pub fn text(&self, name: &str, body: &str) -> anyhow::Result<PathBuf> {
        let path = self.path(name);
        std::fs::write(&path, body).with_context(|| format!("writing {}", path.display()))?;
        Ok(path)
    }
}

fn create(path: &Path) -> anyhow::Result<File> {
    File::create(path).with_context(|| format!("creating {}", path.display()))
}

/// Flat key-value JSON object; keys come out sorted.
#[derive(Debug, Default, Clone)]
pub struct Report(pub Map<String, Value>);

impl Report {
    pub fn set(&mut self, key: &str, value: impl Serialize) -> &mut Self {
        let v = serde_json::to_value(value).unwrap_or(Value::Null);
        self.0.insert(key.to_string(), v);
        self
    }

    pub fn get(&self, key: &str) -> Option<&Value> {
        self.0.get(key)
    }
}
