//! Output rendering. Floating-point numbers are serialized with 17
//! significant digits so identical runs produce byte-identical output that
//! round-trips to the same f64.

use anyhow::Result;

/// 17 significant digits: one leading digit plus 16 after the point.
pub fn num(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn jstr(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    out.push('"');
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\r' => out.push_str("\\r"),
            '\t' => out.push_str("\\t"),
            c if (c as u32) < 0x20 => out.push_str(&format!("\\u{:04x}", c as u32)),
            c => out.push(c),
        }
    }
    out.push('"');
    out
}

pub fn jbool(b: bool) -> &'static str {
    if b {
        "true"
    } else {
        "false"
    }
}

pub fn jnum_array<I: IntoIterator<Item = f64>>(values: I) -> String {
    let parts: Vec<String> = values.into_iter().map(num).collect();
    format!("[{}]", parts.join(","))
}

pub fn jstr_array<'a, I: IntoIterator<Item = &'a str>>(values: I) -> String {
    let parts: Vec<String> = values.into_iter().map(jstr).collect();
    format!("[{}]", parts.join(","))
}

/// CSV assembly over an in-memory buffer (labels may contain commas or
/// quotes, so fields go through a real CSV writer).
pub struct Csv {
    writer: csv::Writer<Vec<u8>>,
}

impl Csv {
    pub fn new() -> Self {
        Self { writer: csv::Writer::from_writer(Vec::new()) }
    }

    pub fn row<'a, I: IntoIterator<Item = &'a str>>(&mut self, fields: I) -> Result<()> {
        self.writer.write_record(fields)?;
        Ok(())
    }

    pub fn finish(self) -> Result<String> {
        Ok(String::from_utf8(self.writer.into_inner()?)?)
    }
}
