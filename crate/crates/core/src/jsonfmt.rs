//! JSON serialization with floats printed to 17 significant digits.
//!
//! 17 significant decimal digits round-trip every `f64` exactly, so encoding
//! and re-reading a value reproduces the original bits. All machine-readable
//! output in this crate and its CLI goes through [`to_json_17`].

use serde::Serialize;
use serde_json::ser::Formatter;
use std::io;

struct SigDigits17;

impl Formatter for SigDigits17 {
    fn write_f64<W>(&mut self, writer: &mut W, value: f64) -> io::Result<()>
    where
        W: ?Sized + io::Write,
    {
        write!(writer, "{value:.16e}")
    }
}

/// Serializes a value to a compact JSON string with 17-significant-digit
/// floats in scientific notation.
pub fn to_json_17<T: Serialize>(value: &T) -> String {
    let mut out = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut out, SigDigits17);
    value
        .serialize(&mut ser)
        .expect("serialization of in-memory value cannot fail");
    String::from_utf8(out).expect("serde_json emits UTF-8")
}

/// Formats one float exactly as [`to_json_17`] would, for CSV cells.
pub fn fmt_f64_17(value: f64) -> String {
    format!("{value:.16e}")
}
