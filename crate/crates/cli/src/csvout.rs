//! Minimal RFC-4180-style CSV writing (header row, dot decimals, quoting
//! only where needed).

use std::io::Write;
use std::path::Path;

pub struct CsvWriter {
    out: std::io::BufWriter<std::fs::File>,
}

impl CsvWriter {
    pub fn create(path: &Path, header: &[&str]) -> anyhow::Result<Self> {
        let file = std::fs::File::create(path)?;
        let mut w = Self {
            out: std::io::BufWriter::new(file),
        };
        w.row(header)?;
        Ok(w)
    }

    pub fn row<S: AsRef<str>>(&mut self, fields: &[S]) -> anyhow::Result<()> {
        let line: Vec<String> = fields.iter().map(|f| escape(f.as_ref())).collect();
        writeln!(self.out, "{}", line.join(","))?;
        Ok(())
    }

    pub fn finish(mut self) -> anyhow::Result<()> {
        self.out.flush()?;
        Ok(())
    }
}

fn escape(field: &str) -> String {
    if field.contains(',') || field.contains('"') || field.contains('\n') {
        format!("\"{}\"", field.replace('"', "\"\""))
    } else {
        field.to_string()
    }
}

/// Write the resolved-configuration manifest rows.
pub fn write_config_manifest(
    path: &Path,
    entries: &[(String, String)],
    extra: &[(String, String)],
) -> anyhow::Result<()> {
    let mut w = CsvWriter::create(path, &["key", "value"])?;
    for (k, v) in entries.iter().chain(extra.iter()) {
        w.row(&[k.as_str(), v.as_str()])?;
    }
    w.finish()
}
