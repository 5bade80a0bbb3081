//! CSV traces with pinned float formatting.

use std::io::Write;
use std::path::Path;

use gsdca::trace::Trace;

use crate::{Error, Result};

pub const CSV_HEADER: [&str; 6] = ["epoch", "objective", "gap", "A", "B", "C"];

/// Formats like C's `%.17g`: 17 significant digits, trailing zeros dropped,
/// scientific notation when the decimal exponent is below −4 or at least 17.
pub fn fmt_g17(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return if x.is_sign_negative() {
            "-0".into()
        } else {
            "0".into()
        };
    }
    let sci = format!("{x:.16e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if !(-4..17).contains(&exp) {
        let m = trim_fraction(mantissa);
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{m}e{sign}{:02}", exp.abs())
    } else {
        let decimals = (16 - exp) as usize;
        trim_fraction(&format!("{x:.decimals$}")).to_owned()
    }
}

fn trim_fraction(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

fn opt(x: Option<f64>) -> String {
    x.map(fmt_g17).unwrap_or_default()
}

/// Writes `epoch,objective,gap,A,B,C`; missing values are empty fields.
pub fn write_trace_csv<W: Write>(trace: &Trace<f64>, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CSV_HEADER)?;
    for r in trace.records() {
        let p = r.potentials;
        w.write_record([
            r.epoch.to_string(),
            fmt_g17(r.objective),
            opt(r.gap),
            opt(p.map(|p| p.a)),
            opt(p.map(|p| p.b)),
            opt(p.map(|p| p.c)),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_trace_file(trace: &Trace<f64>, path: &Path) -> Result<()> {
    let file = std::fs::File::create(path).map_err(|source| Error::File {
        path: path.to_path_buf(),
        source,
    })?;
    write_trace_csv(trace, std::io::BufWriter::new(file))
}

/// One parsed trace CSV.
#[derive(Clone, Debug, PartialEq)]
pub struct TraceTable {
    pub epochs: Vec<usize>,
    pub objective: Vec<f64>,
    pub gap: Vec<Option<f64>>,
}

pub fn read_trace_csv(path: &Path) -> Result<TraceTable> {
    let mut r = csv::Reader::from_path(path)?;
    let headers = r.headers()?.clone();
    if headers
        .iter()
        .take(3)
        .ne(CSV_HEADER.iter().take(3).copied())
    {
        return Err(Error::Plot(format!(
            "{}: unexpected header",
            path.display()
        )));
    }
    let mut t = TraceTable {
        epochs: Vec::new(),
        objective: Vec::new(),
        gap: Vec::new(),
    };
    for rec in r.records() {
        let rec = rec?;
        let field = |i: usize| rec.get(i).unwrap_or("");
        let num = |s: &str| -> Result<f64> {
            s.parse()
                .map_err(|_| Error::Plot(format!("{}: bad number `{s}`", path.display())))
        };
        t.epochs.push(
            field(0).parse().map_err(|_| {
                Error::Plot(format!("{}: bad epoch `{}`", path.display(), field(0)))
            })?,
        );
        t.objective.push(num(field(1))?);
        t.gap.push(if field(2).is_empty() {
            None
        } else {
            Some(num(field(2))?)
        });
    }
    Ok(t)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn g17_matches_printf() {
        assert_eq!(fmt_g17(0.1), "0.10000000000000001");
        assert_eq!(fmt_g17(1.0), "1");
        assert_eq!(fmt_g17(-2.5), "-2.5");
        assert_eq!(fmt_g17(1e-5), "1.0000000000000001e-05");
        assert_eq!(fmt_g17(1e17), "1e+17");
        assert_eq!(fmt_g17(123456.0), "123456");
        assert_eq!(fmt_g17(0.0001), "0.0001");
        assert_eq!(fmt_g17(1.0 / 3.0), "0.33333333333333331");
        assert_eq!(fmt_g17(1e16), "10000000000000000");
        assert_eq!(fmt_g17(f64::NAN), "nan");
    }

    #[test]
    fn g17_round_trips() {
        for &x in &[
            0.1,
            1.0 / 3.0,
            2.0f64.sqrt(),
            1e-300,
            6.02214076e23,
            -7.5e-9,
        ] {
            assert_eq!(fmt_g17(x).parse::<f64>().unwrap(), x);
        }
    }
}
