//! Output plumbing: buffered writes to stdout or a file, and round-trip
//! safe float formatting.

use std::io::Write;
use std::path::PathBuf;

/// 17 significant digits: enough to round-trip any f64, so reruns diff
/// cleanly against stored outputs.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

pub struct OutputSink {
    buffer: String,
    target: Option<PathBuf>,
}

impl OutputSink {
    pub fn new(target: Option<PathBuf>) -> std::io::Result<Self> {
        Ok(Self { buffer: String::new(), target })
    }

    pub fn write(&mut self, text: &str) -> std::io::Result<()> {
        self.buffer.push_str(text);
        Ok(())
    }

    pub fn finish(self) -> std::io::Result<()> {
        match self.target {
            Some(path) => std::fs::write(path, self.buffer),
            None => std::io::stdout().write_all(self.buffer.as_bytes()),
        }
    }
}
