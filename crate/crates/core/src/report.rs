//! Shared pieces of the CSV outputs.

use std::io::{self, Write};

/// Writes each line as a `# `-prefixed comment.
pub fn write_header<W: Write>(w: &mut W, comments: &[String]) -> io::Result<()> {
    for line in comments {
        for part in line.lines() {
            writeln!(w, "# {part}")?;
        }
    }
    Ok(())
}

/// Header line stamped on every generated stream.
pub const NOT_CRYPTOGRAPHIC: &str =
    "deterministic chaotic sequence; not cryptographically secure randomness";
