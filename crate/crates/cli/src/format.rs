use std::io::{self, Write};

use serde::Serialize;

/// Fixed-point rendering with 17 significant digits, enough to round-trip
/// any `f64`.
pub fn f17(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{x}");
    }
    let exponent = x.abs().log10().floor() as i32;
    let decimals = (16 - exponent).max(0) as usize;
    format!("{x:.decimals$}")
}

pub fn opt_f17(x: Option<f64>) -> String {
    x.map(f17).unwrap_or_default()
}

/// Rows that can be emitted as CSV with a fixed column order.
pub trait CsvRow {
    const HEADER: &'static [&'static str];
    fn fields(&self) -> Vec<String>;
}

pub fn write_csv<R: CsvRow>(out: &mut dyn Write, rows: &[R]) -> io::Result<()> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(out);
    w.write_record(R::HEADER)?;
    for row in rows {
        w.write_record(row.fields())?;
    }
    w.flush()
}

pub fn write_json<T: Serialize + ?Sized>(out: &mut dyn Write, value: &T) -> io::Result<()> {
    serde_json::to_writer_pretty(&mut *out, value)?;
    writeln!(out)
}
