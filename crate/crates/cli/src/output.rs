use std::any::type_name;
use std::fmt::Debug;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use serde::Serialize;

/// Process failure: exit code plus message.
#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub message: String,
}

impl Failure {
    pub fn usage(message: impl Into<String>) -> Self {
        Self { code: 2, message: message.into() }
    }
}

/// Domain errors exit with 1 and name the error type and variant,
/// e.g. `IsosurfaceError::NonRegularValue: ...`.
pub fn domain<E: std::error::Error + Debug>(e: E) -> Failure {
    let ty = type_name::<E>().rsplit("::").next().unwrap_or("Error");
    let dbg = format!("{e:?}");
    let variant = dbg.split(['(', ' ', '{']).next().unwrap_or("");
    Failure { code: 1, message: format!("{ty}::{variant}: {e}") }
}

pub fn io_failure(path: &Path, e: io::Error) -> Failure {
    Failure { code: 1, message: format!("io error on {}: {e}", path.display()) }
}

pub fn create(path: &Path) -> Result<BufWriter<File>, Failure> {
    File::create(path).map(BufWriter::new).map_err(|e| io_failure(path, e))
}

/// Pretty JSON with a trailing newline to `path`, or stdout.
pub fn write_json<S: Serialize>(path: Option<&Path>, value: &S) -> Result<(), Failure> {
    let text = serde_json::to_string_pretty(value).map_err(|e| Failure { code: 1, message: format!("serialization: {e}") })?;
    match path {
        Some(p) => {
            let mut w = create(p)?;
            writeln!(w, "{text}").and_then(|_| w.flush()).map_err(|e| io_failure(p, e))
        }
        None => {
            let mut out = io::stdout().lock();
            writeln!(out, "{text}").map_err(|e| io_failure(Path::new("<stdout>"), e))
        }
    }
}

/// Output document: the echoed configuration followed by the result fields.
#[derive(Serialize)]
pub struct Report<'a, C: Serialize, R: Serialize> {
    pub config: &'a C,
    #[serde(flatten)]
    pub result: R,
}
