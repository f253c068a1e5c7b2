//! One worked instance per checker, printed with its intermediates.

use std::fmt::Write;

use super::config::{PerturbationTemplate, SpectrumTemplate};
use super::suite::{checker_kind, run_job, Job, Record};
use crate::checkers::{BoundReport, ToleranceModel, CHECKER_IDS};
use crate::error::{Error, Result};
use crate::generate::PerturbationKind;
use crate::schatten::SchattenIndex;

const DEMO_SHAPE: (usize, usize, usize) = (8, 6, 2);

fn demo_perturbation(kind: PerturbationKind) -> PerturbationTemplate {
    let magnitude = match kind {
        PerturbationKind::BasisAdditive => 0.1,
        PerturbationKind::MatrixAdditive => 0.1,
        PerturbationKind::ColumnSample => 4.0,
    };
    PerturbationTemplate { kind, magnitude }
}

fn write_report(out: &mut String, r: &BoundReport) {
    let opt = |x: Option<f64>| x.map_or("-".to_string(), |v| format!("{v:.6e}"));
    let _ = writeln!(
        out,
        "  p = {}  c = {}",
        r.p.map_or("-".into(), |p| p.to_string()),
        r.c.map_or("-".into(), |c| c.to_string())
    );
    let _ = writeln!(out, "  lhs       = {:.6e}", r.lhs);
    let _ = writeln!(out, "  rhs_lower = {}", opt(r.rhs_lower));
    let _ = writeln!(out, "  rhs_upper = {}", opt(r.rhs_upper));
    let _ = writeln!(out, "  slack     = {:.6e}  (tolerance {:.3e})", r.slack, r.tolerance);
    let _ = writeln!(out, "  holds     = {}", r.holds);
    if !r.context.scalars.is_empty() {
        let _ = writeln!(out, "  intermediates:");
        for (k, v) in &r.context.scalars {
            let _ = writeln!(out, "    {k:<24} {v:.6e}");
        }
    }
    for (k, v) in &r.context.labels {
        let _ = writeln!(out, "    {k:<24} {v}");
    }
    if !r.context.sub_checks.is_empty() {
        let _ = writeln!(out, "  sub-checks:");
        for c in &r.context.sub_checks {
            let _ = writeln!(
                out,
                "    {:<24} lhs={:.4e} lower={} upper={} {}{}",
                c.name,
                c.lhs,
                opt(c.rhs_lower),
                opt(c.rhs_upper),
                if c.holds() { "ok" } else { "VIOLATED" },
                if c.gated { "" } else { " (informational)" }
            );
        }
    }
}

/// Runs `bound_id` on an 8×6 matrix with a gap after `k = 2` and renders
/// every report and skip as text.
pub fn demo(bound_id: &str, seed: u64) -> Result<String> {
    let checker = CHECKER_IDS
        .iter()
        .copied()
        .find(|id| *id == bound_id)
        .ok_or_else(|| Error::InvalidArgument(format!("unknown bound id {bound_id:?}; known: {}", CHECKER_IDS.join(", "))))?;
    let kind = checker_kind(checker).expect("every checker has a perturbation family");
    let (m, n, k) = DEMO_SHAPE;
    let job = Job {
        trial: 1,
        m,
        n,
        k,
        spectrum: SpectrumTemplate::Gapped { gap_ratio: 0.5 },
        perturbation: demo_perturbation(kind),
        checker,
    };
    let ps = [SchattenIndex::Finite(2), SchattenIndex::Inf];
    let mut out = String::new();
    let _ = writeln!(
        out,
        "{checker}: m = {m}, n = {n}, k = {k}, spectrum {}, perturbation {}, seed {}",
        job.spectrum.key(),
        job.perturbation.key(),
        job.seed(seed)
    );
    for rec in run_job(&job, seed, &ps, ToleranceModel::default()) {
        match rec {
            Record::Report(r) => write_report(&mut out, &r),
            Record::Skip(s) => {
                let _ = writeln!(
                    out,
                    "  p = {}: {} ({})",
                    s.p.map_or("-".into(), |p| p.to_string()),
                    s.status.as_str(),
                    s.reason
                );
            }
        }
    }
    Ok(out)
}
