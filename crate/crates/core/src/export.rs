//! File formats shared by the CLI and the test suites.
//!
//! All floating-point output is printed with 17 significant digits
//! (`{:.16e}`), which round-trips f64 exactly, so re-reading an export
//! reproduces the in-memory values bit-for-bit.

use std::io::{self, Write};

use serde::Serialize;

use crate::optimizer::ScanGrid;
use crate::protocol::{RoundRecord, SiftMessage};

struct SigDigits17;

impl serde_json::ser::Formatter for SigDigits17 {
    fn write_f64<W>(&mut self, writer: &mut W, value: f64) -> io::Result<()>
    where
        W: ?Sized + Write,
    {
        write!(writer, "{value:.16e}")
    }

    fn write_f32<W>(&mut self, writer: &mut W, value: f32) -> io::Result<()>
    where
        W: ?Sized + Write,
    {
        write!(writer, "{value:.16e}")
    }
}

/// Compact JSON with every float at 17 significant digits.
pub fn to_json_17sig<T: Serialize>(value: &T) -> serde_json::Result<String> {
    let mut out = Vec::new();
    let mut serializer = serde_json::Serializer::with_formatter(&mut out, SigDigits17);
    value.serialize(&mut serializer)?;
    Ok(String::from_utf8(out).expect("serde_json emits UTF-8"))
}

/// Scan grid as CSV: header `phi_a,phi_b,value`, one row per node in
/// row-major order, radians at 17 significant digits.
pub fn write_scan_csv<W: Write>(grid: &ScanGrid, mut writer: W) -> io::Result<()> {
    writeln!(writer, "phi_a,phi_b,value")?;
    let n = grid.resolution();
    for i in 0..n {
        for j in 0..n {
            let (phi_a, phi_b) = grid.node(i, j);
            writeln!(
                writer,
                "{phi_a:.16e},{phi_b:.16e},{:.16e}",
                grid.value(i, j)
            )?;
        }
    }
    Ok(())
}

/// Session records as CSV: `round,a_setting,b_setting,outcome` with the
/// outcome in {PP, PM, MP, MM}.
pub fn write_records_csv<W: Write>(records: &[RoundRecord], mut writer: W) -> io::Result<()> {
    writeln!(writer, "round,a_setting,b_setting,outcome")?;
    for record in records {
        writeln!(
            writer,
            "{},{},{},{}",
            record.round,
            record.a_setting,
            record.b_setting,
            record.outcome.label()
        )?;
    }
    Ok(())
}

/// Sifting transcript as JSON lines, one message per line.
pub fn write_transcript_jsonl<W: Write>(messages: &[SiftMessage], mut writer: W) -> io::Result<()> {
    for message in messages {
        let line = serde_json::to_string(message).map_err(io::Error::other)?;
        writeln!(writer, "{line}")?;
    }
    Ok(())
}
