use std::io::Write;
use std::str::FromStr;

use super::SweepRow;
use crate::error::{Error, Result};

pub const CSV_HEADER: [&str; 11] = [
    "lambda_i_per_s",
    "engine",
    "p_outage",
    "n_tx",
    "p_c",
    "p_e",
    "lambda_t",
    "rho",
    "ci_low",
    "ci_high",
    "converged",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum OutputFormat {
    #[default]
    Csv,
    /// Whitespace-separated columns with a `#` header line; missing values
    /// are `NaN` and flags are `1`/`0`.
    PlotData,
}

impl FromStr for OutputFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(OutputFormat::Csv),
            "plot" | "plot-data" => Ok(OutputFormat::PlotData),
            other => Err(Error::InvalidConfig(format!("unknown output format `{other}`"))),
        }
    }
}

/// Nine significant digits, without trailing zeros. Plain notation for
/// magnitudes in `[1e-5, 1e15)`, scientific otherwise.
pub fn format_sig9(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return format!("{x}");
    }
    let sci = format!("{x:.8e}");
    let (mantissa, exp) = sci.split_once('e').expect("scientific format");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-5..15).contains(&exp) {
        let decimals = (8 - exp).max(0) as usize;
        trim_zeros(format!("{x:.decimals$}"))
    } else {
        format!("{}e{exp}", trim_zeros(mantissa.to_string()))
    }
}

fn trim_zeros(s: String) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}

fn fields(row: &SweepRow, missing: &str, flag: fn(bool) -> &'static str) -> [String; 11] {
    let opt = |v: Option<f64>| v.map_or_else(|| missing.to_string(), format_sig9);
    [
        format_sig9(row.lambda_i_per_s),
        row.engine.name().to_string(),
        format_sig9(row.p_outage),
        format_sig9(row.n_tx),
        format_sig9(row.p_c),
        format_sig9(row.p_e),
        format_sig9(row.lambda_t_per_s),
        format_sig9(row.rho),
        opt(row.ci_low),
        opt(row.ci_high),
        row.converged.map_or_else(|| missing.to_string(), |c| flag(c).to_string()),
    ]
}

pub fn write_csv<W: Write>(rows: &[SweepRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CSV_HEADER)?;
    for row in rows {
        w.write_record(fields(row, "null", |c| if c { "true" } else { "false" }))?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_plot_data<W: Write>(rows: &[SweepRow], mut out: W) -> Result<()> {
    writeln!(out, "# {}", CSV_HEADER.join(" "))?;
    for row in rows {
        writeln!(out, "{}", fields(row, "NaN", |c| if c { "1" } else { "0" }).join(" "))?;
    }
    out.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::Engine;

    fn row() -> SweepRow {
        SweepRow {
            lambda_i_per_s: 2250.0,
            engine: Engine::Model,
            p_outage: 0.123456789123,
            n_tx: 1.5,
            p_c: 0.0,
            p_e: 1.234e-14,
            lambda_t_per_s: 3375.0000001,
            rho: 2.0 / 3.0,
            ci_low: None,
            ci_high: None,
            converged: Some(true),
        }
    }

    #[test]
    fn nine_significant_digits() {
        assert_eq!(format_sig9(0.0), "0");
        assert_eq!(format_sig9(2250.0), "2250");
        assert_eq!(format_sig9(0.123456789123), "0.123456789");
        assert_eq!(format_sig9(2.0 / 3.0), "0.666666667");
        assert_eq!(format_sig9(1.234e-14), "1.234e-14");
        assert_eq!(format_sig9(999.9999999), "1000");
        assert_eq!(format_sig9(-0.5), "-0.5");
        assert_eq!(format_sig9(f64::NAN), "NaN");
    }

    #[test]
    fn csv_layout() {
        let mut buf = Vec::new();
        write_csv(&[row()], &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(
            lines.next().unwrap(),
            "lambda_i_per_s,engine,p_outage,n_tx,p_c,p_e,lambda_t,rho,ci_low,ci_high,converged"
        );
        assert_eq!(
            lines.next().unwrap(),
            "2250,model,0.123456789,1.5,0,1.234e-14,3375,0.666666667,null,null,true"
        );
        assert!(lines.next().is_none());
    }

    #[test]
    fn plot_data_layout() {
        let mut r = row();
        r.engine = Engine::Sim;
        r.converged = None;
        r.ci_low = Some(0.1);
        r.ci_high = Some(0.2);
        let mut buf = Vec::new();
        write_plot_data(&[r], &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let line = text.lines().nth(1).unwrap();
        assert_eq!(line, "2250 sim 0.123456789 1.5 0 1.234e-14 3375 0.666666667 0.1 0.2 NaN");
        assert!(text.starts_with("# lambda_i_per_s engine"));
    }

    #[test]
    fn format_names() {
        assert_eq!("csv".parse::<OutputFormat>().unwrap(), OutputFormat::Csv);
        assert_eq!("plot".parse::<OutputFormat>().unwrap(), OutputFormat::PlotData);
        assert!("json".parse::<OutputFormat>().is_err());
    }
}
