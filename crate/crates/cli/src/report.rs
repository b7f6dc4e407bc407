//! Tabular output. Every emitter is deterministic: identical inputs produce
//! byte-identical bytes, so repeated runs diff clean.

use std::io::{self, Write};

use clt_bounds::bounds::{registry_hash, BoundKind, BoundReport};
use clt_bounds::randomsums::VerificationReport;

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum OutputFormat {
    Csv,
    Markdown,
}

pub struct Table {
    pub columns: &'static [&'static str],
    pub rows: Vec<Vec<String>>,
}

/// Leading comment carried by every CSV artifact: tool version plus a hash
/// of the constants registry, so archived output identifies what wrote it.
fn version_comment() -> String {
    format!(
        "# clt-bounds {} constants-registry {:016x}",
        env!("CARGO_PKG_VERSION"),
        registry_hash()
    )
}

pub fn write_table(w: &mut dyn Write, format: OutputFormat, table: &Table) -> io::Result<()> {
    match format {
        OutputFormat::Csv => write_csv(w, table),
        OutputFormat::Markdown => write_markdown(w, table),
    }
}

fn write_csv(w: &mut dyn Write, table: &Table) -> io::Result<()> {
    writeln!(w, "{}", version_comment())?;
    let csv_err = |e: csv::Error| io::Error::new(io::ErrorKind::Other, e);
    let mut writer = csv::Writer::from_writer(w);
    writer.write_record(table.columns).map_err(csv_err)?;
    for row in &table.rows {
        writer.write_record(row).map_err(csv_err)?;
    }
    writer.flush()
}

fn write_markdown(w: &mut dyn Write, table: &Table) -> io::Result<()> {
    writeln!(w, "| {} |", table.columns.join(" | "))?;
    writeln!(w, "|{}|", vec!["---"; table.columns.len()].join("|"))?;
    for row in &table.rows {
        writeln!(w, "| {} |", row.join(" | "))?;
    }
    Ok(())
}

pub fn fmt_f64(x: f64) -> String {
    if x.is_infinite() {
        if x > 0.0 { "inf".to_string() } else { "-inf".to_string() }
    } else {
        format!("{x}")
    }
}

fn fmt_opt(x: Option<f64>) -> String {
    x.map(fmt_f64).unwrap_or_default()
}

pub fn kind_label(kind: &BoundKind) -> String {
    match kind {
        BoundKind::FixedN(v) => format!("fixed-n-{}", v.label()),
        BoundKind::FractionSum => "fraction-sum".to_string(),
        BoundKind::Growth => "growth".to_string(),
        BoundKind::PoissonBinomial => "poisson-binomial".to_string(),
        BoundKind::Binomial => "binomial".to_string(),
        BoundKind::Poisson => "poisson".to_string(),
        BoundKind::PoissonBinomialGrowth => "poisson-binomial-growth".to_string(),
        BoundKind::BinomialGrowth => "binomial-growth".to_string(),
        BoundKind::PoissonGrowth => "poisson-growth".to_string(),
        BoundKind::ThirdMomentPoisson => "third-moment-poisson".to_string(),
        BoundKind::MixedPoisson => "mixed-poisson".to_string(),
        BoundKind::Geometric => "geometric".to_string(),
        BoundKind::NegativeBinomial => "negative-binomial".to_string(),
        BoundKind::Sichel => "sichel".to_string(),
    }
}

pub const TABLE_COLUMNS: &[&str] = &["gamma", "computed_bound", "reference_bound", "match"];

/// Rows comparing a recomputed constant table against the published one,
/// plus whether every entry agreed at 4 decimals.
pub fn constant_table_rows(
    computed: &[clt_bounds::constants::ConstantTableEntry],
    reference: &[clt_bounds::constants::ConstantTableEntry],
) -> (Table, bool) {
    let mut all_match = true;
    let rows = computed
        .iter()
        .zip(reference)
        .map(|(c, r)| {
            let lhs = format!("{:.4}", c.bound);
            let rhs = format!("{:.4}", r.bound);
            let matched = lhs == rhs;
            all_match &= matched;
            vec![fmt_f64(c.gamma_threshold), lhs, rhs, matched.to_string()]
        })
        .collect();
    (Table { columns: TABLE_COLUMNS, rows }, all_match)
}

pub const BOUND_COLUMNS: &[&str] = &[
    "scenario_id",
    "kind",
    "bound_value",
    "constant_used",
    "gamma",
    "lindeberg",
    "lyapunov",
    "normalization",
    "limit_law",
];

pub fn bound_row(id: &str, report: &BoundReport) -> Vec<String> {
    vec![
        id.to_string(),
        kind_label(&report.kind),
        fmt_f64(report.bound_value),
        fmt_f64(report.constant_used),
        fmt_opt(report.gamma),
        fmt_opt(report.lindeberg),
        fmt_opt(report.lyapunov),
        fmt_f64(report.normalization),
        report.limit_law.label(),
    ]
}

pub const VERIFY_COLUMNS: &[&str] = &[
    "scenario_id",
    "method",
    "measured_delta",
    "dkw_margin",
    "bound",
    "constant_used",
    "pass",
];

pub fn verify_row(report: &VerificationReport) -> Vec<String> {
    vec![
        report.scenario.clone(),
        report.method.label(),
        fmt_f64(report.measured_delta),
        fmt_f64(report.dkw_margin),
        fmt_f64(report.bound.bound_value),
        fmt_f64(report.bound.constant_used),
        report.pass.to_string(),
    ]
}

pub const LAWS_COLUMNS: &[&str] = &["x", "cdf"];
