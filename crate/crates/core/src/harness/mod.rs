//! Seeded batch runs over many instances, report files and their
//! verification.

mod config;
mod demo;
mod report_io;
mod suite;

pub use config::{PerturbationTemplate, SpectrumTemplate, SuiteConfig, SCHEMA_VERSION, WORKERS_ENV};
pub use demo::demo;
pub use report_io::{
    read_reports_csv, read_reports_jsonl, read_skips_csv, read_summary, strip_comment_lines, verify_report,
    write_outputs, HEADER_PREFIX, REPORTS_CSV, REPORTS_JSONL, REPORT_COLUMNS, SKIPPED_CSV, SKIP_COLUMNS,
    SUMMARY_JSON,
};
pub use suite::{
    checker_kind, run_suite, run_suite_to_dir, FailedEntry, SkipRecord, SkipStatus, SkippedEntry, SuiteOutcome,
    SuiteSummary,
};
