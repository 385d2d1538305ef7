use std::fmt::Write as _;
use std::path::Path;

use anyhow::Context;

use crate::usage;

/// A CSV cell. Floats use the shortest representation that round-trips
/// (full double precision, exponent form for very small or large values).
pub trait Field {
    fn render(&self, out: &mut String);
}

impl Field for f64 {
    fn render(&self, out: &mut String) {
        write!(out, "{self:?}").expect("writing to a String");
    }
}

macro_rules! display_field {
    ($($t:ty),*) => {$(
        impl Field for $t {
            fn render(&self, out: &mut String) {
                write!(out, "{self}").expect("writing to a String");
            }
        }
    )*};
}

display_field!(usize, u32, bool, str, String, ptsl::edge::Classification);

/// CSV text with LF line endings.
pub struct Csv {
    text: String,
}

impl Csv {
    pub fn new(header: &[&str]) -> Self {
        Self { text: format!("{}\n", header.join(",")) }
    }

    pub fn row(&mut self, fields: &[&dyn Field]) {
        for (i, f) in fields.iter().enumerate() {
            if i > 0 {
                self.text.push(',');
            }
            f.render(&mut self.text);
        }
        self.text.push('\n');
    }

    pub fn write(&self, path: &Path) -> anyhow::Result<()> {
        write_text(path, &self.text)
    }
}

pub fn write_text(path: &Path, text: &str) -> anyhow::Result<()> {
    std::fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

/// Inclusive `a:b`; `a > b` is an empty range.
pub fn parse_range(s: &str) -> Result<(u32, u32), String> {
    let (a, b) = s.split_once(':').ok_or_else(|| format!("expected a:b, got {s:?}"))?;
    let parse = |t: &str| t.trim().parse::<u32>().map_err(|e| format!("{t:?}: {e}"));
    Ok((parse(a)?, parse(b)?))
}

/// `t1:t2` with real endpoints.
pub fn parse_window(s: &str) -> Result<(f64, f64), String> {
    let (a, b) = s.split_once(':').ok_or_else(|| format!("expected t1:t2, got {s:?}"))?;
    let parse = |t: &str| t.trim().parse::<f64>().map_err(|e| format!("{t:?}: {e}"));
    Ok((parse(a)?, parse(b)?))
}

pub fn require(cond: bool, msg: impl FnOnce() -> String) -> anyhow::Result<()> {
    if cond {
        Ok(())
    } else {
        Err(usage(msg()))
    }
}
