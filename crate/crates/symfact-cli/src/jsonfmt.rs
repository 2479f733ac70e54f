//! JSON output with every float printed at 17 significant digits, so that
//! emitted numbers parse back to the identical f64.

use std::io;

use serde::Serialize;

struct Sig17;

impl serde_json::ser::Formatter for Sig17 {
    fn write_f64<W>(&mut self, writer: &mut W, value: f64) -> io::Result<()>
    where
        W: ?Sized + io::Write,
    {
        write!(writer, "{value:.16e}")
    }
}

/// Serializes to JSON text with 17-significant-digit floats.
pub fn to_json_17<T: Serialize>(value: &T) -> Result<String, serde_json::Error> {
    let mut out = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut out, Sig17);
    value.serialize(&mut ser)?;
    Ok(String::from_utf8(out).expect("serde_json emits UTF-8"))
}

/// Formats one float at 17 significant digits for demo lines.
pub fn f17(value: f64) -> String {
    format!("{value:.16e}")
}
