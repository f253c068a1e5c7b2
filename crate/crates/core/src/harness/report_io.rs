//! CSV / JSON-lines report files and their verification.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use super::suite::{SkipRecord, SkipStatus, SuiteOutcome, SuiteSummary};
use crate::checkers::{BoundReport, ReportContext};
use crate::error::{Error, Result};
use crate::schatten::SchattenIndex;

pub const REPORT_COLUMNS: [&str; 14] = [
    "bound_id",
    "m",
    "n",
    "k",
    "c",
    "p",
    "seed",
    "lhs",
    "rhs_lower",
    "rhs_upper",
    "slack",
    "tolerance",
    "holds",
    "context_json",
];

pub const SKIP_COLUMNS: [&str; 8] = ["bound_id", "m", "n", "k", "p", "seed", "status", "reason"];

pub const REPORTS_CSV: &str = "reports.csv";
pub const REPORTS_JSONL: &str = "reports.jsonl";
pub const SKIPPED_CSV: &str = "skipped.csv";
pub const SUMMARY_JSON: &str = "summary.json";

/// Prefix of the timestamp line heading `reports.csv`; excluded from
/// byte-for-byte comparisons.
pub const HEADER_PREFIX: &str = "# lrperturb reports";

fn fmt_f64(x: f64) -> String {
    format!("{x:?}")
}

fn fmt_opt<T: ToString>(x: Option<T>) -> String {
    x.map(|v| v.to_string()).unwrap_or_default()
}

fn csv_err(path: &Path) -> impl Fn(csv::Error) -> Error + '_ {
    move |e| Error::io(path, e)
}

pub fn report_row(r: &BoundReport) -> Vec<String> {
    vec![
        r.bound_id.clone(),
        r.m.to_string(),
        r.n.to_string(),
        fmt_opt(r.k),
        fmt_opt(r.c),
        fmt_opt(r.p),
        fmt_opt(r.seed),
        fmt_f64(r.lhs),
        r.rhs_lower.map(fmt_f64).unwrap_or_default(),
        r.rhs_upper.map(fmt_f64).unwrap_or_default(),
        fmt_f64(r.slack),
        fmt_f64(r.tolerance),
        r.holds.to_string(),
        serde_json::to_string(&r.context).expect("context serializes"),
    ]
}

/// Writes the report table, preceded by a `#` comment line carrying `unix_time`.
pub fn write_reports_csv(path: &Path, reports: &[BoundReport], unix_time: u64) -> Result<()> {
    let mut file = fs::File::create(path).map_err(|e| Error::io(path, e))?;
    writeln!(file, "{HEADER_PREFIX} generated_unix={unix_time}").map_err(|e| Error::io(path, e))?;
    let mut w = csv::Writer::from_writer(file);
    w.write_record(REPORT_COLUMNS).map_err(csv_err(path))?;
    for r in reports {
        w.write_record(report_row(r)).map_err(csv_err(path))?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

pub fn write_reports_jsonl(path: &Path, reports: &[BoundReport]) -> Result<()> {
    let mut out = String::new();
    for r in reports {
        out.push_str(&serde_json::to_string(r).expect("report serializes"));
        out.push('\n');
    }
    fs::write(path, out).map_err(|e| Error::io(path, e))
}

pub fn write_skips_csv(path: &Path, skips: &[SkipRecord]) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(csv_err(path))?;
    w.write_record(SKIP_COLUMNS).map_err(csv_err(path))?;
    for s in skips {
        w.write_record([
            s.bound_id.clone(),
            s.m.to_string(),
            s.n.to_string(),
            fmt_opt(s.k),
            fmt_opt(s.p),
            s.seed.to_string(),
            s.status.as_str().to_string(),
            s.reason.clone(),
        ])
        .map_err(csv_err(path))?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

pub fn write_summary(path: &Path, summary: &SuiteSummary) -> Result<()> {
    let mut text = serde_json::to_string_pretty(summary).expect("summary serializes");
    text.push('\n');
    fs::write(path, text).map_err(|e| Error::io(path, e))
}

pub fn write_outputs(dir: &Path, outcome: &SuiteOutcome, summary: &SuiteSummary) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let now = std::time::SystemTime::now()
        .duration_since(std::time::UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0);
    write_reports_csv(&dir.join(REPORTS_CSV), &outcome.reports, now)?;
    write_reports_jsonl(&dir.join(REPORTS_JSONL), &outcome.reports)?;
    write_skips_csv(&dir.join(SKIPPED_CSV), &outcome.skips)?;
    write_summary(&dir.join(SUMMARY_JSON), summary)
}

pub fn read_summary(path: &Path) -> Result<SuiteSummary> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    serde_json::from_str(&text).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))
}

fn parse<T: std::str::FromStr>(path: &Path, line: usize, column: &str, s: &str) -> Result<T> {
    s.trim()
        .parse()
        .map_err(|_| Error::Parse(format!("{}:{line}: column {column}: cannot parse {s:?}", path.display())))
}

fn parse_opt<T: std::str::FromStr>(path: &Path, line: usize, column: &str, s: &str) -> Result<Option<T>> {
    if s.trim().is_empty() {
        Ok(None)
    } else {
        parse(path, line, column, s).map(Some)
    }
}

/// Column name → position, or the list of missing columns.
fn column_index(headers: &csv::StringRecord, wanted: &[&str]) -> Result<Vec<usize>> {
    let mut idx = Vec::with_capacity(wanted.len());
    let mut missing = Vec::new();
    for col in wanted {
        match headers.iter().position(|h| h.trim() == *col) {
            Some(i) => idx.push(i),
            None => missing.push(col.to_string()),
        }
    }
    if missing.is_empty() {
        Ok(idx)
    } else {
        Err(Error::Schema { missing })
    }
}

fn csv_reader(path: &Path) -> Result<csv::Reader<fs::File>> {
    csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .from_path(path)
        .map_err(csv_err(path))
}

/// Reads the reports table written by [`write_reports_csv`].
pub fn read_reports_csv(path: &Path) -> Result<Vec<BoundReport>> {
    let mut rdr = csv_reader(path)?;
    let headers = rdr.headers().map_err(csv_err(path))?.clone();
    let ix = column_index(&headers, &REPORT_COLUMNS)?;
    let mut out = Vec::new();
    for (row, rec) in rdr.records().enumerate() {
        let rec = rec.map_err(csv_err(path))?;
        let line = row + 2;
        let f = |i: usize| rec.get(ix[i]).unwrap_or("");
        let context: ReportContext = serde_json::from_str(f(13))
            .map_err(|e| Error::Parse(format!("{}:{line}: context_json: {e}", path.display())))?;
        out.push(BoundReport {
            bound_id: f(0).to_string(),
            m: parse(path, line, "m", f(1))?,
            n: parse(path, line, "n", f(2))?,
            k: parse_opt(path, line, "k", f(3))?,
            c: parse_opt(path, line, "c", f(4))?,
            p: parse_opt::<SchattenIndex>(path, line, "p", f(5))?,
            seed: parse_opt(path, line, "seed", f(6))?,
            lhs: parse(path, line, "lhs", f(7))?,
            rhs_lower: parse_opt(path, line, "rhs_lower", f(8))?,
            rhs_upper: parse_opt(path, line, "rhs_upper", f(9))?,
            slack: parse(path, line, "slack", f(10))?,
            tolerance: parse(path, line, "tolerance", f(11))?,
            holds: parse(path, line, "holds", f(12))?,
            context,
        });
    }
    Ok(out)
}

pub fn read_reports_jsonl(path: &Path) -> Result<Vec<BoundReport>> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| {
            serde_json::from_str(l).map_err(|e| Error::Parse(format!("{}:{}: {e}", path.display(), i + 1)))
        })
        .collect()
}

pub fn read_skips_csv(path: &Path) -> Result<Vec<SkipRecord>> {
    let mut rdr = csv_reader(path)?;
    let headers = rdr.headers().map_err(csv_err(path))?.clone();
    let ix = column_index(&headers, &SKIP_COLUMNS)?;
    let mut out = Vec::new();
    for (row, rec) in rdr.records().enumerate() {
        let rec = rec.map_err(csv_err(path))?;
        let line = row + 2;
        let f = |i: usize| rec.get(ix[i]).unwrap_or("");
        let status = match f(6) {
            "skipped" => SkipStatus::Skipped,
            "error" => SkipStatus::Error,
            other => return Err(Error::Parse(format!("{}:{line}: unknown status {other:?}", path.display()))),
        };
        out.push(SkipRecord {
            bound_id: f(0).to_string(),
            m: parse(path, line, "m", f(1))?,
            n: parse(path, line, "n", f(2))?,
            k: parse_opt(path, line, "k", f(3))?,
            p: parse_opt(path, line, "p", f(4))?,
            seed: parse(path, line, "seed", f(5))?,
            status,
            reason: f(7).to_string(),
        });
    }
    Ok(out)
}

/// What is wrong with a stored row, if anything: the verdict and the slack
/// must match the ones recomputed from the numeric columns.
fn tamper_note(r: &BoundReport) -> Option<String> {
    let derived = r.derived_holds();
    let slack = crate::checkers::Inequality {
        name: r.bound_id.clone(),
        lhs: r.lhs,
        rhs_lower: r.rhs_lower,
        rhs_upper: r.rhs_upper,
        tolerance: r.tolerance,
        gated: true,
    }
    .slack();
    let slack_ok = slack == r.slack || (slack - r.slack).abs() <= 1e-12 * slack.abs().max(1.0);
    if derived != r.holds {
        Some(format!("stored holds={} but recomputed holds={derived}", r.holds))
    } else if !slack_ok {
        Some(format!("stored slack {:?} but recomputed slack {slack:?}", r.slack))
    } else {
        None
    }
}

fn sibling(path: &Path, name: &str) -> PathBuf {
    path.parent().map(|d| d.join(name)).unwrap_or_else(|| PathBuf::from(name))
}

/// Re-derives every verdict in a `reports.csv` or `reports.jsonl` file and
/// cross-checks it against the stored one. Rows whose stored verdict or slack
/// disagree with the recomputation count as failed. A `skipped.csv` next to
/// the report is folded in when present.
pub fn verify_report(path: &Path) -> Result<SuiteSummary> {
    let reports = if path.extension().is_some_and(|e| e == "jsonl") {
        read_reports_jsonl(path)?
    } else {
        read_reports_csv(path)?
    };
    let skips_path = sibling(path, SKIPPED_CSV);
    let skips = if skips_path.exists() { read_skips_csv(&skips_path)? } else { Vec::new() };
    let notes: Vec<Option<String>> = reports.iter().map(tamper_note).collect();
    Ok(SuiteSummary::build(reports.iter().zip(notes), &skips))
}

/// File contents without `#` comment lines, for byte comparisons that must
/// ignore the timestamp.
pub fn strip_comment_lines(text: &str) -> String {
    text.lines()
        .filter(|l| !l.starts_with('#'))
        .flat_map(|l| [l, "\n"])
        .collect()
}
