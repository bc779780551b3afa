//! End-to-end drivers: single-curve analysis, certificate validation and batch runs.

use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::Serialize;

use descent::certificate::{parse_certificate, verify_local_kernel, KernelCertificate, LocalKernelReport};
use descent::curve_model::{parse_curve_json, CurveModel};
use descent::splitting_field::{pair_orbits, SplittingField};
use descent::theta_dr::ker_theta_dr;
use descent::verdict::{bounds_report, BoundPath, BoundsReport, ReportInput, Verdict};
use descent::{DescentError, Result};

pub const MIN_PRECISION: u32 = 64;
pub const MAX_PRECISION: u32 = 4096;
pub const DEFAULT_PRECISION: u32 = 256;

#[derive(Clone, Copy, Debug)]
pub struct Options {
    pub precision: u32,
    pub path: BoundPath,
}

impl Default for Options {
    fn default() -> Self {
        Options { precision: DEFAULT_PRECISION, path: BoundPath::Refined }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct AnalysisReport {
    #[serde(flatten)]
    pub bounds: BoundsReport,
    /// Precision in bits of the run that succeeded.
    pub precision: Option<u32>,
    pub beta_shift: Option<i64>,
    pub component_degrees: Option<Vec<usize>>,
    pub kernel_basis: Option<Vec<String>>,
}

pub fn read_to_string(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| DescentError::Io(format!("{}: {e}", path.display())))
}

pub fn load_curve(path: &Path) -> Result<CurveModel> {
    parse_curve_json(&read_to_string(path)?)
}

pub fn load_certificate(path: &Path) -> Result<KernelCertificate> {
    parse_certificate(&read_to_string(path)?)
}

/// Runs `f` at `start` bits, doubling on precision failures up to the ceiling.
pub fn with_precision_retry<T>(start: u32, mut f: impl FnMut(u32) -> Result<T>) -> Result<(T, u32)> {
    let mut bits = start.clamp(MIN_PRECISION, MAX_PRECISION);
    loop {
        match f(bits) {
            Ok(v) => return Ok((v, bits)),
            Err(e) if e.is_precision_related() && bits < MAX_PRECISION => bits = (2 * bits).min(MAX_PRECISION),
            Err(e) if e.is_precision_related() => {
                return Err(DescentError::PrecisionExhausted { bits, context: e.to_string() })
            }
            Err(e) => return Err(e),
        }
    }
}

struct Refined {
    ker: usize,
    beta_shift: Option<i64>,
    degrees: Vec<usize>,
    kernel_basis: Vec<String>,
}

fn refined_at(curve: &CurveModel, cert: &KernelCertificate, bits: u32) -> Result<Refined> {
    let sf = SplittingField::build(curve, bits)?;
    let orbits = pair_orbits(&sf);
    let r = ker_theta_dr(cert, &orbits, &sf)?;
    Ok(Refined { ker: r.dim, beta_shift: sf.beta_shift, degrees: r.component_degrees, kernel_basis: r.kernel_basis })
}

pub fn analyze(curve: &CurveModel, cert: &KernelCertificate, opts: Options) -> Result<AnalysisReport> {
    cert.check_curve(curve)?;
    let meta = &cert.metadata;
    let mut input = ReportInput {
        label: curve.label.clone().or_else(|| cert.curve.label.clone()),
        genus: curve.genus,
        case: curve.case,
        dim_a: cert.dim(),
        ker_theta: None,
        rank_lower: meta.rank_lower,
        rank_upper: meta.rank_upper,
        ns_rank: meta.ns_rank,
    };
    if input.rank_upper.is_none() {
        return Err(DescentError::MissingRank);
    }
    let report = match opts.path {
        BoundPath::Crude => AnalysisReport {
            bounds: bounds_report(input)?,
            precision: None,
            beta_shift: None,
            component_degrees: None,
            kernel_basis: None,
        },
        BoundPath::Refined => {
            cert.check_nonvanishing()?;
            let (r, bits) = with_precision_retry(opts.precision, |bits| refined_at(curve, cert, bits))?;
            input.ker_theta = Some(r.ker);
            AnalysisReport {
                bounds: bounds_report(input)?,
                precision: Some(bits),
                beta_shift: r.beta_shift,
                component_degrees: Some(r.degrees),
                kernel_basis: Some(r.kernel_basis),
            }
        }
    };
    Ok(report)
}

/// Curve and certificate files inside a fixture directory.
pub fn fixture_paths(dir: &Path) -> (PathBuf, PathBuf) {
    (dir.join("curve.json"), dir.join("certificate.json"))
}

pub fn analyze_dir(dir: &Path, opts: Options) -> Result<AnalysisReport> {
    let (c, k) = fixture_paths(dir);
    analyze(&load_curve(&c)?, &load_certificate(&k)?, opts)
}

#[derive(Clone, Debug, Serialize)]
pub struct ValidationReport {
    pub label: Option<String>,
    pub dim: usize,
    pub precision: u32,
    pub all_pass: bool,
    #[serde(flatten)]
    pub local: LocalKernelReport,
    pub warnings: Vec<String>,
}

pub fn validate(curve: &CurveModel, cert: &KernelCertificate, opts: Options) -> Result<ValidationReport> {
    cert.check_curve(curve)?;
    let mut warnings = Vec::new();
    if cert.basis.is_empty() {
        warnings.push("certificate basis is empty".to_string());
    }
    let (local, bits) = with_precision_retry(opts.precision, |bits| {
        let sf = SplittingField::build(curve, bits)?;
        verify_local_kernel(cert, &sf)
    })?;
    Ok(ValidationReport {
        label: curve.label.clone(),
        dim: cert.dim(),
        precision: bits,
        all_pass: local.all_pass(),
        local,
        warnings,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct ErrorReport {
    pub error: &'static str,
    pub category: &'static str,
    pub exit_code: i32,
    pub message: String,
}

impl From<&DescentError> for ErrorReport {
    fn from(e: &DescentError) -> Self {
        let c = e.category();
        ErrorReport { error: e.kind(), category: c.as_str(), exit_code: c.exit_code(), message: e.to_string() }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct BatchEntry {
    pub name: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub report: Option<BoundsReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<ErrorReport>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct BatchSummary {
    #[serde(rename = "FINITE")]
    pub finite: usize,
    #[serde(rename = "INCONCLUSIVE")]
    pub inconclusive: usize,
    #[serde(rename = "ERROR")]
    pub error: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct BatchOutput {
    pub entries: Vec<BatchEntry>,
    pub summary: BatchSummary,
}

/// Subdirectories of `dir`, sorted by name.
pub fn fixture_dirs(dir: &Path) -> Result<Vec<PathBuf>> {
    let rd = std::fs::read_dir(dir).map_err(|e| DescentError::Io(format!("{}: {e}", dir.display())))?;
    let mut dirs: Vec<PathBuf> = rd.filter_map(|e| e.ok()).map(|e| e.path()).filter(|p| p.is_dir()).collect();
    dirs.sort();
    Ok(dirs)
}

pub fn batch(dir: &Path, jobs: usize, opts: Options) -> Result<BatchOutput> {
    let dirs = fixture_dirs(dir)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.max(1))
        .build()
        .map_err(|e| DescentError::Io(e.to_string()))?;
    let entries: Vec<BatchEntry> = pool.install(|| {
        dirs.par_iter()
            .map(|d| {
                let name = d.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
                match analyze_dir(d, opts) {
                    Ok(r) => BatchEntry { name, report: Some(r.bounds), error: None },
                    Err(e) => BatchEntry { name, report: None, error: Some(ErrorReport::from(&e)) },
                }
            })
            .collect()
    });
    let mut summary = BatchSummary::default();
    for e in &entries {
        match e.report.as_ref().map(|r| r.verdict) {
            Some(Verdict::Finite) => summary.finite += 1,
            Some(Verdict::Inconclusive) => summary.inconclusive += 1,
            None => summary.error += 1,
        }
    }
    Ok(BatchOutput { entries, summary })
}

impl BatchOutput {
    pub fn to_tsv(&self) -> String {
        let mut out = String::new();
        out.push_str(BoundsReport::TSV_HEADER);
        out.push('\n');
        for e in &self.entries {
            match &e.report {
                Some(r) => out.push_str(&r.tsv_row()),
                None => out.push_str(&format!("{}\t-\t-\t-\t-\tERROR", e.name)),
            }
            out.push('\n');
        }
        out.push_str(&format!(
            "# FINITE={} INCONCLUSIVE={} ERROR={}\n",
            self.summary.finite, self.summary.inconclusive, self.summary.error
        ));
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn retry_doubles_until_success() {
        let mut seen = Vec::new();
        let (v, bits) = with_precision_retry(64, |b| {
            seen.push(b);
            if b < 512 {
                Err(DescentError::PrecisionExhausted { bits: b, context: "test".into() })
            } else {
                Ok(b)
            }
        })
        .unwrap();
        assert_eq!((v, bits), (512, 512));
        assert_eq!(seen, vec![64, 128, 256, 512]);
    }

    #[test]
    fn retry_stops_at_ceiling() {
        let r: Result<((), u32)> =
            with_precision_retry(1024, |b| Err(DescentError::PrecisionExhausted { bits: b, context: "x".into() }));
        assert!(matches!(r, Err(DescentError::PrecisionExhausted { bits: 4096, .. })));
    }

    #[test]
    fn other_errors_are_not_retried() {
        let mut calls = 0;
        let r: Result<((), u32)> = with_precision_retry(64, |_| {
            calls += 1;
            Err(DescentError::MissingRank)
        });
        assert_eq!(r.unwrap_err(), DescentError::MissingRank);
        assert_eq!(calls, 1);
    }
}
