//! Output files: `#` metadata lines, then a table (CSV), or one JSON document.

use std::fmt::Write as _;
use std::fs::File;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use serde_json::{Map, Value};

use crate::failure::{Failure, Outcome};
use crate::settings::RunConfig;

/// Destination of a command's main output, opened before any work is done
/// so an unwritable path fails fast.
pub struct Sink {
    path: Option<PathBuf>,
    file: Option<File>,
}

impl Sink {
    pub fn open(path: Option<&Path>) -> Outcome<Self> {
        let file = path
            .map(|p| {
                File::create(p)
                    .map_err(|e| Failure::config(format!("cannot write {}: {e}", p.display())))
            })
            .transpose()?;
        Ok(Self {
            path: path.map(Path::to_path_buf),
            file,
        })
    }

    pub fn path(&self) -> Option<&Path> {
        self.path.as_deref()
    }

    pub fn write(self, text: &str) -> Outcome<()> {
        let res = match self.file {
            Some(mut f) => f.write_all(text.as_bytes()),
            None => std::io::stdout().write_all(text.as_bytes()),
        };
        res.map_err(|e| Failure::runtime(format!("write failed: {e}")))
    }
}

/// Metadata lines besides those of the experiment configuration.
pub fn header_pairs(rc: &RunConfig) -> Vec<(String, String)> {
    let mut out = rc.result_pairs();
    if !rc.no_timestamp {
        let secs = SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0);
        out.insert(1, ("created_unix".into(), secs.to_string()));
    }
    out
}

/// CSV preamble for outputs without an experiment configuration.
pub fn preamble(kind: &str, pairs: &[(String, String)]) -> String {
    let mut out = format!("# sawtooth {kind}\n");
    for (k, v) in pairs {
        let _ = writeln!(out, "# {k}={v}");
    }
    out
}

pub fn num(x: f64) -> String {
    format!("{x:.12e}")
}

/// JSON document `{ "metadata": {...}, <body> }`.
pub fn json_doc(pairs: &[(String, String)], body: Map<String, Value>) -> String {
    let meta: Map<String, Value> = pairs
        .iter()
        .map(|(k, v)| (k.clone(), Value::String(v.clone())))
        .collect();
    let mut doc = Map::new();
    doc.insert("metadata".into(), Value::Object(meta));
    doc.extend(body);
    let mut text = serde_json::to_string_pretty(&Value::Object(doc)).expect("json");
    text.push('\n');
    text
}

/// Finite numbers as JSON numbers, anything else as null.
pub fn jnum(x: f64) -> Value {
    serde_json::Number::from_f64(x)
        .map(Value::Number)
        .unwrap_or(Value::Null)
}
