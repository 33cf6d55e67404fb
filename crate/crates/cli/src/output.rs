//! Report serialization: CSV with a fixed header and 17-significant-digit
//! floats, or pretty JSON. Identical inputs produce identical bytes.

use std::io::Write;

use qwidths::checks::CheckReport;

pub const CSV_HEADER: &str = "check,eps1,eps2,lhs,rhs,margin,pass,witness,seed";

/// Decimal rendering with 17 significant digits; falls back to scientific
/// notation far from unit scale.
pub fn fmt_f64(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    let exp = x.abs().log10().floor() as i32;
    let decimals = 16 - exp;
    if (0..=40).contains(&decimals) {
        format!("{:.*}", decimals as usize, x)
    } else {
        format!("{:.16e}", x)
    }
}

fn sanitize(field: &str) -> String {
    field.replace([',', '\n', '\r'], ";")
}

pub fn to_csv(reports: &[CheckReport]) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for r in reports {
        let eps1 = r.params.eps1.map(fmt_f64).unwrap_or_default();
        let eps2 = r.params.eps2.map(fmt_f64).unwrap_or_default();
        let seed = r.params.seed.map(|s| s.to_string()).unwrap_or_default();
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{}\n",
            sanitize(&r.name),
            eps1,
            eps2,
            fmt_f64(r.lhs),
            fmt_f64(r.rhs),
            fmt_f64(r.margin),
            r.pass,
            sanitize(&r.witness),
            seed,
        ));
    }
    out
}

pub fn to_json(reports: &[CheckReport]) -> String {
    let mut s = serde_json::to_string_pretty(reports).expect("reports serialize");
    s.push('\n');
    s
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

/// Render and write to the chosen destination (stdout when `out` is None).
pub fn emit(
    reports: &[CheckReport],
    format: Format,
    out: Option<&std::path::Path>,
) -> anyhow::Result<()> {
    let body = match format {
        Format::Csv => to_csv(reports),
        Format::Json => to_json(reports),
    };
    match out {
        Some(path) => std::fs::write(path, body)?,
        None => std::io::stdout().write_all(body.as_bytes())?,
    }
    Ok(())
}
