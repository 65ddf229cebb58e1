use std::fs;
use std::io::{self, Write};
use std::path::Path;

use serde::Serialize;

use crate::commands::CliError;

/// Writes `bytes` to `path`, or to standard output.
pub fn emit(path: Option<&Path>, bytes: &[u8]) -> Result<(), CliError> {
    match path {
        Some(p) => fs::write(p, bytes).map_err(|e| CliError::Io(p.display().to_string(), e)),
        None => {
            let mut out = io::stdout().lock();
            out.write_all(bytes)
                .and_then(|_| out.flush())
                .map_err(|e| CliError::Io("<stdout>".into(), e))
        }
    }
}

pub fn json<T: Serialize>(value: &T) -> Vec<u8> {
    let mut s = serde_json::to_vec_pretty(value).expect("report types serialize");
    s.push(b'\n');
    s
}

/// Summary lines go to stdout unless stdout already carries the data.
pub fn note(data_on_stdout: bool, line: &str) {
    if data_on_stdout {
        eprintln!("{line}");
    } else {
        println!("{line}");
    }
}

pub fn num(x: f64) -> String {
    format!("{x:.16e}")
}
