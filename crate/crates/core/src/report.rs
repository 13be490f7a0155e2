//! Verification campaigns and machine-readable reports.
//!
//! A campaign is a list of (check, input source) entries plus a global seed.
//! Replaying a campaign with the same seed reproduces every result
//! bit-for-bit at the JSON level; wall-clock data lives in a separate
//! metadata block so reports stay comparable.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::checks::{
    self, run_trial, CheckResult, CheckStatus, GenParams, CHECK_NAMES, TOL_GRID,
};
use crate::density::{read_density, Density};
use crate::error::{Error, Result};

pub const REPORT_SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "source", rename_all = "snake_case")]
pub enum InputSource {
    /// Load the check's (single) input distribution from a density file.
    File { path: PathBuf },
    /// Sample random inputs with the given generation parameters.
    Generator {
        #[serde(default)]
        params: GenParams,
        #[serde(default = "default_trials")]
        trials: usize,
    },
    /// A named deterministic example built into the tool.
    Builtin { name: String },
}

fn default_trials() -> usize {
    100
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CampaignEntry {
    pub check: String,
    #[serde(flatten)]
    pub input: InputSource,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Campaign {
    pub seed: u64,
    pub entries: Vec<CampaignEntry>,
    /// Optional global tolerance override applied to every result.
    #[serde(default)]
    pub tolerance: Option<f64>,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct Summary {
    pub pass: usize,
    pub fail: usize,
    pub skipped: usize,
    pub conjecture: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Report {
    pub version: u32,
    pub tool_version: String,
    pub seed: u64,
    pub results: Vec<CheckResult>,
    pub summary: Summary,
    /// Non-deterministic run data, excluded from reproducibility comparisons.
    pub metadata: RunMetadata,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunMetadata {
    pub unix_time_secs: u64,
    pub wall_clock_secs: f64,
}

pub fn tool_version() -> String {
    env!("CARGO_PKG_VERSION").to_string()
}

/// Run a campaign. For generator entries the reported row is the
/// minimum-slack trial, annotated with the ensemble tallies.
pub fn run_campaign(campaign: &Campaign) -> Result<Report> {
    let start = std::time::Instant::now();
    let mut results = Vec::new();
    for (idx, entry) in campaign.entries.iter().enumerate() {
        if !CHECK_NAMES.contains(&entry.check.as_str()) {
            return Err(Error::UnknownCheck(entry.check.clone()));
        }
        let mut result = run_entry(entry, campaign.seed, idx as u64)?;
        if let Some(tol) = campaign.tolerance {
            result.tolerance = tol;
            if result.status == CheckStatus::Theorem {
                result.pass = result.slack >= -tol;
            }
        }
        results.push(result);
    }
    let summary = summarize(&results);
    Ok(Report {
        version: REPORT_SCHEMA_VERSION,
        tool_version: tool_version(),
        seed: campaign.seed,
        results,
        summary,
        metadata: RunMetadata {
            unix_time_secs: std::time::SystemTime::now()
                .duration_since(std::time::UNIX_EPOCH)
                .map(|d| d.as_secs())
                .unwrap_or(0),
            wall_clock_secs: start.elapsed().as_secs_f64(),
        },
    })
}

pub fn summarize(results: &[CheckResult]) -> Summary {
    let mut s = Summary::default();
    for r in results {
        match r.status {
            CheckStatus::Skipped => s.skipped += 1,
            CheckStatus::Conjecture => s.conjecture += 1,
            _ => {
                if r.pass {
                    s.pass += 1;
                } else {
                    s.fail += 1;
                }
            }
        }
    }
    s
}

fn entry_seed(seed: u64, idx: u64) -> u64 {
    let mut z = seed.wrapping_add(idx.wrapping_mul(0x2545_f491_4f6c_dd1d));
    z = (z ^ (z >> 33)).wrapping_mul(0xff51_afd7_ed55_8ccd);
    z ^ (z >> 33)
}

fn run_entry(entry: &CampaignEntry, seed: u64, idx: u64) -> Result<CheckResult> {
    match &entry.input {
        InputSource::File { path } => run_on_file(&entry.check, path),
        InputSource::Generator { params, trials } => {
            run_generator(&entry.check, params, *trials, entry_seed(seed, idx))
        }
        InputSource::Builtin { name } => run_builtin(&entry.check, name, entry_seed(seed, idx)),
    }
}

/// Single-input checks can take their distribution from a file.
fn run_on_file(check: &str, path: &Path) -> Result<CheckResult> {
    let density = read_density(path)?;
    match (check, density) {
        ("discrete_sd_ratio", Density::Finite(p)) => checks::discrete_sd_ratio(&p),
        (
            "doubling_difference_ratio" | "epi_lower" | "gauss_distance" | "reverse_epi_iid"
            | "rogers_shephard_entropy" | "ruzsa_div_ub" | "conjecture_sd",
            Density::Grid(f),
        ) => match check {
            "doubling_difference_ratio" => checks::doubling_difference_ratio(&f),
            "epi_lower" => checks::epi_lower(&f),
            "gauss_distance" => checks::gauss_distance(&f),
            "reverse_epi_iid" => checks::reverse_epi_iid(&f),
            "rogers_shephard_entropy" => checks::rogers_shephard_entropy(&f),
            "ruzsa_div_ub" => checks::ruzsa_div_ub(&f),
            _ => checks::conjecture_sd(&f),
        },
        (
            "doubling_difference_ratio" | "epi_lower" | "gauss_distance" | "reverse_epi_iid"
            | "rogers_shephard_entropy" | "ruzsa_div_ub" | "conjecture_sd",
            Density::Parametric(d),
        ) => {
            let f = d.to_grid(4096)?;
            run_on_grid_check(check, &f)
        }
        _ => Err(Error::Precondition {
            check: "run_on_file",
            reason: format!(
                "check '{check}' cannot take its inputs from a single density file of this kind"
            ),
        }),
    }
}

fn run_on_grid_check(check: &str, f: &crate::density::GridDensity) -> Result<CheckResult> {
    match check {
        "doubling_difference_ratio" => checks::doubling_difference_ratio(f),
        "epi_lower" => checks::epi_lower(f),
        "gauss_distance" => checks::gauss_distance(f),
        "reverse_epi_iid" => checks::reverse_epi_iid(f),
        "rogers_shephard_entropy" => checks::rogers_shephard_entropy(f),
        "ruzsa_div_ub" => checks::ruzsa_div_ub(f),
        "conjecture_sd" => checks::conjecture_sd(f),
        _ => Err(Error::UnknownCheck(check.into())),
    }
}

/// Ensemble run reported as the minimum-slack trial with tallies attached.
fn run_generator(check: &str, params: &GenParams, trials: usize, seed: u64) -> Result<CheckResult> {
    let ens = checks::run_ensemble(check, params, trials, seed)?;
    // Re-derive the argmin trial to report its full row.
    let mut best: Option<CheckResult> = None;
    for trial in 0..trials {
        let mut rng = trial_rng_public(seed, trial as u64);
        let r = run_trial(check, params, &mut rng)?;
        if r.status == CheckStatus::Skipped {
            continue;
        }
        if best.as_ref().map_or(true, |b| r.slack < b.slack) {
            best = Some(r);
        }
    }
    let mut r = best.ok_or_else(|| Error::Precondition {
        check: "run_generator",
        reason: "all trials skipped".into(),
    })?;
    // Honor the ensemble's resolution-retry verdict: the tallies are the
    // authoritative pass signal for the aggregate row.
    if ens.violations == 0 && r.status == CheckStatus::Theorem {
        r.pass = true;
    }
    r.metadata.insert("trials".into(), trials.to_string());
    r.metadata
        .insert("violations".into(), ens.violations.to_string());
    r.metadata.insert("skipped".into(), ens.skipped.to_string());
    r.metadata
        .insert("min_slack".into(), format!("{:.12}", ens.min_slack));
    Ok(r)
}

// Mirror of the private per-trial stream derivation in `checks`.
fn trial_rng_public(seed: u64, trial: u64) -> rand_chacha::ChaCha8Rng {
    use rand::SeedableRng;
    let mut z = seed.wrapping_add(trial.wrapping_mul(0x9e37_79b9_7f4a_7c15));
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    rand_chacha::ChaCha8Rng::seed_from_u64(z ^ (z >> 31))
}

/// Deterministic named example inputs.
fn run_builtin(check: &str, name: &str, seed: u64) -> Result<CheckResult> {
    use crate::density::ParametricDensity;
    match (check, name) {
        ("reverse_epi_iid", "exponential") => {
            checks::reverse_epi_iid(&ParametricDensity::Exponential { rate: 1.0 }.to_grid(4096)?)
        }
        ("conjecture_sd", "exponential") => {
            checks::conjecture_sd(&ParametricDensity::Exponential { rate: 1.0 }.to_grid(4096)?)
        }
        ("gauss_distance", "gaussian") => {
            checks::gauss_distance(&ParametricDensity::std_gaussian(1).to_grid(4096)?)
        }
        ("det_sum", "identity2") => {
            let i2 = crate::pdmatrix::PdMatrix::identity(2);
            checks::det_sum(&i2, &[i2.clone(), i2.clone()])
        }
        (_, "seeded") => {
            let mut rng = trial_rng_public(seed, 0);
            run_trial(check, &gen_params_default(), &mut rng)
        }
        _ => Err(Error::Precondition {
            check: "run_builtin",
            reason: format!("no built-in example '{name}' for check '{check}'"),
        }),
    }
}

fn gen_params_default() -> GenParams {
    GenParams {
        m_min: 4,
        m_max: 64,
        markov_m_max: 16,
        concentration: 0.8,
        grid_cells: 256,
        matrix_dim: 3,
        circle_cells: 128,
    }
}

/// The built-in full verification campaign: every registered check from its
/// random generator.
pub fn paper_suite(seed: u64, trials: usize) -> Campaign {
    let entries = CHECK_NAMES
        .iter()
        .map(|&check| CampaignEntry {
            check: check.into(),
            input: InputSource::Generator {
                params: gen_params_default(),
                trials,
            },
        })
        .collect();
    Campaign {
        seed,
        entries,
        tolerance: None,
    }
}

pub fn read_campaign(path: &Path) -> Result<Campaign> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::MalformedFile {
        path: path.display().to_string(),
        reason: e.to_string(),
    })?;
    serde_json::from_str(&text).map_err(|e| Error::MalformedFile {
        path: path.display().to_string(),
        reason: e.to_string(),
    })
}

pub fn report_json(report: &Report) -> String {
    serde_json::to_string_pretty(report).expect("report serializes")
}

pub fn report_csv(report: &Report) -> String {
    let mut out =
        String::from("check,lhs,rhs,slack,pass,status,tolerance,inputs_digest,reference\n");
    for r in &report.results {
        let status = match r.status {
            CheckStatus::Theorem => "theorem",
            CheckStatus::Conjecture => "conjecture",
            CheckStatus::Observational => "observational",
            CheckStatus::Skipped => "skipped",
        };
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},\"{}\"\n",
            r.name, r.lhs, r.rhs, r.slack, r.pass, status, r.tolerance, r.inputs_digest,
            r.reference
        ));
    }
    out
}

/// Desk-reference rows for the closed-form anchors.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TableRow {
    pub distribution: String,
    pub sigma_minus: f64,
    pub sigma_plus: f64,
    pub d_self: f64,
    pub d_reflected: f64,
    pub provenance: String,
}

pub fn reference_table() -> Result<Vec<TableRow>> {
    use crate::density::ParametricDensity;
    use crate::ruzsa::sigma_pair_parametric;
    let families = [
        (
            "N(0,1)".to_string(),
            ParametricDensity::std_gaussian(1),
            "closed form",
        ),
        (
            "Exp(1)".to_string(),
            ParametricDensity::Exponential { rate: 1.0 },
            "closed form",
        ),
        (
            "Uniform[0,1]".to_string(),
            ParametricDensity::Uniform {
                lo: vec![0.0],
                hi: vec![1.0],
            },
            "closed form",
        ),
        (
            "Laplace(0,1)".to_string(),
            ParametricDensity::Laplace {
                location: 0.0,
                scale: 1.0,
            },
            "grid (4096 cells)",
        ),
    ];
    let mut rows = Vec::new();
    for (name, d, provenance) in families {
        let (sm, sp) = sigma_pair_parametric(&d)?;
        // sigma = (1/2) exp(2 d / n) in one dimension.
        let d_self = 0.5 * (2.0 * sm).ln();
        let d_reflected = 0.5 * (2.0 * sp).ln();
        rows.push(TableRow {
            distribution: name,
            sigma_minus: sm,
            sigma_plus: sp,
            d_self,
            d_reflected,
            provenance: provenance.into(),
        });
    }
    Ok(rows)
}

/// Whether the grid-scale tolerance should gate a ratio-style scan.
pub fn ratio_band_ok(ratio: f64, lo: f64, hi: f64) -> bool {
    ratio >= lo - TOL_GRID && ratio <= hi + TOL_GRID
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn paper_suite_covers_every_check() {
        let c = paper_suite(1, 4);
        assert_eq!(c.entries.len(), CHECK_NAMES.len());
    }

    #[test]
    fn campaign_reports_are_deterministic() {
        let mut c = paper_suite(99, 6);
        c.entries.truncate(6);
        let a = run_campaign(&c).unwrap();
        let b = run_campaign(&c).unwrap();
        let ja = serde_json::to_string(&a.results).unwrap();
        let jb = serde_json::to_string(&b.results).unwrap();
        assert_eq!(ja, jb);
        assert_eq!(a.summary.fail, 0);
    }

    #[test]
    fn empty_campaign_is_a_clean_pass() {
        let c = Campaign {
            seed: 0,
            entries: vec![],
            tolerance: None,
        };
        let r = run_campaign(&c).unwrap();
        assert!(r.results.is_empty());
        assert_eq!(r.summary.pass + r.summary.fail, 0);
    }

    #[test]
    fn malformed_campaign_file_names_the_file() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("bad.json");
        std::fs::write(&p, "{ not json").unwrap();
        match read_campaign(&p) {
            Err(Error::MalformedFile { path, .. }) => assert!(path.contains("bad.json")),
            other => panic!("expected MalformedFile, got {other:?}"),
        }
    }

    #[test]
    fn reference_table_has_anchor_rows() {
        let rows = reference_table().unwrap();
        let exp = rows.iter().find(|r| r.distribution == "Exp(1)").unwrap();
        assert!((exp.sigma_minus - 2.0).abs() < 1e-9);
        let gauss = rows.iter().find(|r| r.distribution == "N(0,1)").unwrap();
        assert!((gauss.sigma_minus - 1.0).abs() < 1e-9);
        let unif = rows.iter().find(|r| r.distribution == "Uniform[0,1]").unwrap();
        assert!((unif.sigma_minus - std::f64::consts::E / 2.0).abs() < 1e-9);
    }

    #[test]
    fn csv_report_has_header_and_rows() {
        let mut c = paper_suite(3, 3);
        c.entries.truncate(2);
        let r = run_campaign(&c).unwrap();
        let csv = report_csv(&r);
        assert!(csv.starts_with("check,lhs,rhs,slack,pass"));
        assert_eq!(csv.lines().count(), 3);
    }
}
