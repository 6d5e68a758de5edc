//! Exit codes, failures and artifact writers with embedded provenance.

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};

use serde_json::{json, Value};

pub const EXIT_OK: u8 = 0;
pub const EXIT_VALIDATION: u8 = 1;
pub const EXIT_IO: u8 = 2;
pub const EXIT_NUMERIC: u8 = 3;

pub const TOOL: &str = concat!("usc ", env!("CARGO_PKG_VERSION"));

#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub message: String,
}

impl Failure {
    pub fn validation(message: impl Into<String>) -> Self {
        Self { code: EXIT_VALIDATION, message: message.into() }
    }

    pub fn io(message: impl Into<String>) -> Self {
        Self { code: EXIT_IO, message: message.into() }
    }

    /// Prefixes the message with the pipeline stage that failed.
    pub fn in_stage(self, stage: &str) -> Self {
        Self { message: format!("stage `{stage}`: {}", self.message), ..self }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl From<usc_core::Error> for Failure {
    fn from(e: usc_core::Error) -> Self {
        let code = if e.is_io() {
            EXIT_IO
        } else if e.is_numeric() {
            EXIT_NUMERIC
        } else {
            EXIT_VALIDATION
        };
        Self { code, message: e.to_string() }
    }
}

pub type CliResult<T> = Result<T, Failure>;

/// Output directory plus the provenance every artifact carries.
pub struct Sink {
    dir: PathBuf,
    command: String,
    config: BTreeMap<String, String>,
    pub written: Vec<PathBuf>,
}

impl Sink {
    pub fn new(dir: &Path, command: &str, config: BTreeMap<String, String>) -> CliResult<Self> {
        std::fs::create_dir_all(dir)
            .map_err(|e| Failure::io(format!("cannot create output directory `{}`: {e}", dir.display())))?;
        Ok(Self {
            dir: dir.to_path_buf(),
            command: command.to_string(),
            config,
            written: Vec::new(),
        })
    }

    fn header_lines(&self) -> String {
        let mut s = format!("# {TOOL} {}\n", self.command);
        for (k, v) in &self.config {
            s.push_str(&format!("# {k} = {v}\n"));
        }
        s
    }

    fn write(&mut self, name: &str, bytes: &[u8]) -> CliResult<PathBuf> {
        let path = self.dir.join(name);
        std::fs::write(&path, bytes).map_err(|e| Failure::io(format!("cannot write `{}`: {e}", path.display())))?;
        self.written.push(path.clone());
        Ok(path)
    }

    /// CSV artifact; `body` writes the data rows after the provenance comments.
    pub fn csv(
        &mut self,
        name: &str,
        body: impl FnOnce(&mut Vec<u8>) -> usc_core::Result<()>,
    ) -> CliResult<PathBuf> {
        let mut buf = self.header_lines().into_bytes();
        body(&mut buf)?;
        self.write(name, &buf)
    }

    /// The JSON envelope: tool, command, resolved configuration, result.
    pub fn envelope(&self, result: Value) -> Value {
        json!({
            "tool": TOOL,
            "command": self.command,
            "config": self.config,
            "result": result,
        })
    }

    pub fn json(&mut self, name: &str, result: Value) -> CliResult<PathBuf> {
        let text = pretty(&self.envelope(result));
        self.write(name, text.as_bytes())
    }

    /// SVG artifact; provenance goes into a leading comment.
    pub fn svg(&mut self, name: &str, svg: &str) -> CliResult<PathBuf> {
        let mut comment = format!("<!-- {TOOL} {}\n", self.command);
        for (k, v) in &self.config {
            comment.push_str(&format!("     {k} = {}\n", v.replace("--", "- -")));
        }
        comment.push_str("-->\n");
        let body = match svg.find('\n') {
            Some(i) => format!("{}{}{}", &svg[..=i], comment, &svg[i + 1..]),
            None => format!("{svg}\n{comment}"),
        };
        self.write(name, body.as_bytes())
    }
}

pub fn pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("JSON values serialize");
    s.push('\n');
    s
}

/// JSON number or `null` for non-finite values.
pub fn num(x: f64) -> Value {
    if x.is_finite() {
        json!(x)
    } else {
        Value::Null
    }
}
