use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::config::{PerturbationTemplate, SpectrumTemplate, SuiteConfig};
use super::report_io;
use crate::checkers::{self, AngleNorm, BoundReport, ToleranceModel};
use crate::dense::{svd, truncate, DenseMatrix, OrthonormalBasis};
use crate::error::{Error, Result};
use crate::generate::{
    column_sample, derive_seed, haar_basis, hash_str, matrix_with_spectrum, norm_controlled_noise, perturb_basis,
    PerturbationKind, SpectrumSpec,
};
use crate::schatten::SchattenIndex;
use crate::subspaces::Projector;

/// Which perturbation family feeds each checker.
pub fn checker_kind(bound_id: &str) -> Option<PerturbationKind> {
    Some(match bound_id {
        "thm1" | "cor1" | "thm_lau" | "thm_lal1" | "thm_lal2" | "thm6" => PerturbationKind::BasisAdditive,
        "thm2" | "cor2" => PerturbationKind::MatrixAdditive,
        "thm3/4/5" | "thm_lc" | "thm_lck" => PerturbationKind::ColumnSample,
        _ => return None,
    })
}

/// Checkers whose norm is fixed and therefore run once per instance.
fn fixed_norm(bound_id: &str) -> bool {
    matches!(bound_id, "cor2" | "thm_lal1" | "thm_lal2")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SkipStatus {
    /// A hypothesis of the bound does not hold on the instance.
    Skipped,
    /// Evaluation failed for a reason other than a hypothesis; counted as a
    /// failure.
    Error,
}

impl SkipStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::Skipped => "skipped",
            Self::Error => "error",
        }
    }
}

/// A combination that produced no report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SkipRecord {
    pub bound_id: String,
    pub m: usize,
    pub n: usize,
    pub k: Option<usize>,
    pub p: Option<SchattenIndex>,
    pub seed: u64,
    pub status: SkipStatus,
    pub reason: String,
}

impl SkipRecord {
    pub(crate) fn error_context(&self) -> serde_json::Value {
        serde_json::json!({
            "error": self.reason,
            "m": self.m,
            "n": self.n,
            "k": self.k,
            "p": self.p,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FailedEntry {
    pub bound_id: String,
    pub seed: Option<u64>,
    pub context: serde_json::Value,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SkippedEntry {
    pub bound_id: String,
    pub reason: String,
}

/// `total = passed + failed.len() + skipped.len()`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteSummary {
    pub total: usize,
    pub passed: usize,
    pub failed: Vec<FailedEntry>,
    pub skipped: Vec<SkippedEntry>,
    /// Largest amount by which a gated inequality exceeds its tolerance; 0
    /// when every bound holds.
    pub max_violation: f64,
}

impl SuiteSummary {
    pub fn from_records(reports: &[BoundReport], skips: &[SkipRecord]) -> Self {
        Self::build(reports.iter().map(|r| (r, None)), skips)
    }

    /// `notes` carries a per-report remark added to failed entries (used by
    /// verification to flag tampered rows, which fail regardless of verdict).
    pub(crate) fn build<'a>(
        reports: impl Iterator<Item = (&'a BoundReport, Option<String>)>,
        skips: &[SkipRecord],
    ) -> Self {
        let mut passed = 0;
        let mut failed = Vec::new();
        let mut max_violation: f64 = 0.0;
        let mut total = 0;
        for (r, note) in reports {
            total += 1;
            max_violation = max_violation.max(-r.worst_margin());
            if r.holds && note.is_none() {
                passed += 1;
                continue;
            }
            let mut context = serde_json::to_value(r).expect("report serializes");
            if let Some(note) = note {
                context["verify"] = serde_json::Value::String(note);
            }
            failed.push(FailedEntry {
                bound_id: r.bound_id.clone(),
                seed: r.seed,
                context,
            });
        }
        let mut skipped = Vec::new();
        for s in skips {
            total += 1;
            match s.status {
                SkipStatus::Skipped => skipped.push(SkippedEntry {
                    bound_id: s.bound_id.clone(),
                    reason: s.reason.clone(),
                }),
                SkipStatus::Error => failed.push(FailedEntry {
                    bound_id: s.bound_id.clone(),
                    seed: Some(s.seed),
                    context: s.error_context(),
                }),
            }
        }
        Self {
            total,
            passed,
            failed,
            skipped,
            max_violation,
        }
    }

    pub fn all_passed(&self) -> bool {
        self.failed.is_empty()
    }

    pub fn one_line(&self) -> String {
        format!(
            "total={} passed={} failed={} skipped={} max_violation={:e}",
            self.total,
            self.passed,
            self.failed.len(),
            self.skipped.len(),
            self.max_violation
        )
    }
}

/// Everything a run produced, sorted deterministically.
#[derive(Debug, Clone, PartialEq)]
pub struct SuiteOutcome {
    pub reports: Vec<BoundReport>,
    pub skips: Vec<SkipRecord>,
}

impl SuiteOutcome {
    pub fn summary(&self) -> SuiteSummary {
        SuiteSummary::from_records(&self.reports, &self.skips)
    }
}

#[derive(Debug, Clone)]
pub(super) struct Job {
    pub(super) trial: usize,
    pub(super) m: usize,
    pub(super) n: usize,
    pub(super) k: usize,
    pub(super) spectrum: SpectrumTemplate,
    pub(super) perturbation: PerturbationTemplate,
    pub(super) checker: &'static str,
}

impl Job {
    /// Depends only on the job's own coordinates, so adding checkers or
    /// templates leaves existing instances unchanged.
    pub(super) fn seed(&self, base: u64) -> u64 {
        derive_seed(&[
            base,
            self.trial as u64,
            hash_str(self.checker),
            self.m as u64,
            self.n as u64,
            self.k as u64,
            hash_str(&self.spectrum.key()),
            hash_str(&self.perturbation.key()),
        ])
    }

    /// Trials cycle the matrix amplitude through 0.1, 1 and 10.
    fn amplitude(&self) -> f64 {
        [0.1, 1.0, 10.0][self.trial % 3]
    }
}

fn jobs(cfg: &SuiteConfig) -> Vec<Job> {
    let checkers = cfg.selected_checkers();
    let mut out = Vec::new();
    for trial in 0..cfg.trials {
        for &(m, n) in &cfg.dims {
            for &k in &cfg.ks {
                for spectrum in &cfg.spectra {
                    for perturbation in &cfg.perturbations {
                        for &checker in &checkers {
                            if checker_kind(checker) == Some(perturbation.kind) {
                                out.push(Job {
                                    trial,
                                    m,
                                    n,
                                    k,
                                    spectrum: *spectrum,
                                    perturbation: *perturbation,
                                    checker,
                                });
                            }
                        }
                    }
                }
            }
        }
    }
    out
}

pub(super) enum Record {
    Report(BoundReport),
    Skip(SkipRecord),
}

struct JobRunner<'a> {
    job: &'a Job,
    seed: u64,
    tol: ToleranceModel,
    out: Vec<Record>,
}

impl JobRunner<'_> {
    fn record(&mut self, p: Option<SchattenIndex>, result: Result<BoundReport>) {
        let rec = match result {
            Ok(mut r) => {
                r.seed = Some(self.seed);
                r.k.get_or_insert(self.job.k);
                Record::Report(r)
            }
            Err(e) => {
                let (status, reason) = match e {
                    Error::Hypothesis { hypothesis, .. } => (SkipStatus::Skipped, hypothesis),
                    other => (SkipStatus::Error, other.to_string()),
                };
                Record::Skip(SkipRecord {
                    bound_id: self.job.checker.to_string(),
                    m: self.job.m,
                    n: self.job.n,
                    k: Some(self.job.k),
                    p,
                    seed: self.seed,
                    status,
                    reason,
                })
            }
        };
        self.out.push(rec);
    }

    fn skip_all(&mut self, ps: &[SchattenIndex], err: Error) {
        if fixed_norm(self.job.checker) {
            self.record(None, Err(err));
        } else {
            for &p in ps {
                self.record(Some(p), Err(err.clone()));
            }
        }
    }

    fn each_p(&mut self, ps: &[SchattenIndex], mut f: impl FnMut(SchattenIndex) -> Result<BoundReport>) {
        for &p in ps {
            let r = f(p);
            self.record(Some(p), r);
        }
    }
}

fn derive(seed: u64, tag: u64) -> u64 {
    derive_seed(&[seed, tag])
}

fn haar_projector(m: usize, k: usize, seed: u64) -> Result<Projector> {
    Ok(Projector::from_orthonormal(haar_basis(m, k, seed)?))
}

/// Perturbed projector near the `k+1` dominant left singular vectors; a rank
/// drop of the perturbed basis is a hypothesis failure.
fn near_dominant_projector(a: &DenseMatrix, k: usize, magnitude: f64, seed: u64) -> Result<Projector> {
    let l = (k + 1).min(a.rows());
    let z = OrthonormalBasis::new(svd(a)?.u().columns(0, l))?;
    let pb = perturb_basis(&z, magnitude, seed)?;
    if !pb.rank_preserved {
        return Err(Error::hypothesis("projector", format!("perturbed basis lost rank ({} < {l})", pb.rank)));
    }
    Projector::from_full_rank(&pb.z_hat)
}

pub(super) fn run_job(job: &Job, base_seed: u64, ps: &[SchattenIndex], tol: ToleranceModel) -> Vec<Record> {
    let seed = job.seed(base_seed);
    let mut runner = JobRunner {
        job,
        seed,
        tol,
        out: Vec::new(),
    };
    if job.k >= job.m.min(job.n) {
        let err = Error::hypothesis("suite", format!("k < min(m, n) required (k = {}, m = {}, n = {})", job.k, job.m, job.n));
        runner.skip_all(ps, err);
        return runner.out;
    }
    if let Err(e) = evaluate(&mut runner, ps) {
        runner.skip_all(ps, e);
    }
    runner.out
}

fn evaluate(run: &mut JobRunner<'_>, ps: &[SchattenIndex]) -> Result<()> {
    let job = run.job;
    let (m, n, k) = (job.m, job.n, job.k);
    let amp = job.amplitude();
    let sigmas = job.spectrum.sigmas(m, n, k).into_iter().map(|s| s * amp).collect();
    let a = matrix_with_spectrum(&SpectrumSpec::new(m, n, sigmas, derive(run.seed, 1))?)?;
    let pseed = derive(run.seed, 2);
    let aux = derive(run.seed, 3);
    let mag = job.perturbation.magnitude;
    let tol = run.tol;
    match job.checker {
        "thm1" => {
            let z = haar_basis(m, k, aux)?;
            let pb = perturb_basis(&z, mag, pseed)?;
            run.each_p(ps, |p| checkers::check_basis_perturbation(&a, &z, &pb.z_hat, p, &tol));
        }
        "cor1" => {
            let u_k = truncate(&svd(&a)?, k)?.basis().clone();
            let pb = perturb_basis(&u_k, mag, pseed)?;
            run.each_p(ps, |p| checkers::check_dominant_basis_perturbation(&a, k, &pb.z_hat, p, &tol));
        }
        "thm2" => {
            let e = norm_controlled_noise(m, n, mag, pseed)?;
            let proj = haar_projector(m, k, aux)?;
            run.each_p(ps, |p| checkers::check_matrix_additive(&a, &e, &proj, p, &tol));
        }
        "cor2" => {
            let e = norm_controlled_noise(m, n, mag, pseed)?;
            let r = checkers::check_additive_svd_transfer(&a, &e, k, &tol);
            run.record(None, r);
        }
        "thm3/4/5" => {
            let sketch = column_sample(&a, mag as usize, pseed)?;
            let proj = haar_projector(m, k, aux)?;
            run.each_p(ps, |p| checkers::check_dimension_change(&a, &sketch.matrix, &proj, p, &tol));
        }
        "thm_lc" => {
            let c = column_sample(&a, mag as usize, pseed)?.merge_duplicates();
            run.each_p(ps, |p| checkers::check_error_matrix(&a, &c, p, &tol));
        }
        "thm_lck" => {
            let c = column_sample(&a, mag as usize, pseed)?.merge_duplicates();
            run.each_p(ps, |p| checkers::check_error_matrix_rank_k(&a, &c, k, p, &tol));
        }
        "thm_lau" => {
            let proj = near_dominant_projector(&a, k, mag, pseed)?;
            run.each_p(ps, |p| checkers::check_angle_lower(&a, k, &proj, p, &tol));
        }
        "thm_lal1" | "thm_lal2" => {
            let proj = near_dominant_projector(&a, k, mag, pseed)?;
            let which = if job.checker == "thm_lal1" { AngleNorm::Two } else { AngleNorm::Fro };
            let r = checkers::check_angle_upper(&a, k, &proj, which, &tol);
            run.record(None, r);
        }
        "thm6" => {
            let proj = near_dominant_projector(&a, k, mag, pseed)?;
            run.each_p(ps, |p| checkers::check_combined_theorem6(&a, k, &proj, p, &tol));
        }
        other => return Err(Error::InvalidArgument(format!("unknown checker {other:?}"))),
    }
    Ok(())
}

fn report_key(r: &BoundReport) -> (String, u64, usize, usize, Option<usize>, Option<usize>, Option<SchattenIndex>) {
    (r.bound_id.clone(), r.seed.unwrap_or(0), r.m, r.n, r.k, r.c, r.p)
}

/// Runs every configured combination in memory on `workers` threads.
pub fn run_suite(cfg: &SuiteConfig, workers: usize) -> Result<SuiteOutcome> {
    cfg.validate()?;
    let tol = ToleranceModel::new(cfg.tolerance_kappa);
    let jobs = jobs(cfg);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| Error::InvalidArgument(format!("worker pool: {e}")))?;
    let records: Vec<Record> = pool.install(|| {
        jobs.par_iter()
            .flat_map_iter(|job| run_job(job, cfg.seed, &cfg.ps, tol))
            .collect()
    });
    let mut reports = Vec::new();
    let mut skips = Vec::new();
    for r in records {
        match r {
            Record::Report(r) => reports.push(r),
            Record::Skip(s) => skips.push(s),
        }
    }
    reports.sort_by(|a, b| report_key(a).cmp(&report_key(b)));
    skips.sort_by(|a, b| {
        (&a.bound_id, a.seed, a.m, a.n, a.k, a.p).cmp(&(&b.bound_id, b.seed, b.m, b.n, b.k, b.p))
    });
    Ok(SuiteOutcome { reports, skips })
}

/// Runs the suite and writes `reports.csv`, `reports.jsonl`, `skipped.csv`
/// and `summary.json` into `out_dir`.
pub fn run_suite_to_dir(cfg: &SuiteConfig, out_dir: &Path, workers: usize) -> Result<SuiteSummary> {
    let outcome = run_suite(cfg, workers)?;
    let summary = outcome.summary();
    report_io::write_outputs(out_dir, &outcome, &summary)?;
    Ok(summary)
}
