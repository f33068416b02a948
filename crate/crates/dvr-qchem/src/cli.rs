//! Config-driven pipeline: load a JSON run description, execute the
//! requested methods in dependency order, and emit a table / JSON / CSV
//! report. This is everything the `dvr-qchem` binary does.
//!
//! Units must be declared explicitly in the config (angstrom or bohr);
//! conversion to bohr happens once at load time and everything downstream is
//! atomic units. Reports are bit-reproducible: all solver seeds are fixed
//! and serialization is deterministic.

use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::active_space::build_active_hamiltonian;
use crate::detci::solve_casci;
use crate::dmrg::{chain_terms, dmrg_run, DmrgConfig};
use crate::dvr::{build_sinc_dvr, build_sine_dvr, kinetic_matrix, DvrBasis, BOHR_PER_ANGSTROM};
use crate::error::{Error, Result};
use crate::jwci::{build_jw_hamiltonian, lowest_in_number_sector, Penalty};
use crate::model::{build_integrals, ChainGeometry, IntegralSet};
use crate::numerics;
use crate::scf::{scf_solve, ScfOptions};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Units {
    Angstrom,
    Bohr,
}

impl Units {
    fn to_bohr(self, x: f64) -> f64 {
        match self {
            Units::Angstrom => x * BOHR_PER_ANGSTROM,
            Units::Bohr => x,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BasisKind {
    Sine,
    Sinc,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BasisConfig {
    pub kind: BasisKind,
    pub range_low: f64,
    pub range_high: f64,
    pub n: usize,
    pub units: Units,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeometryConfig {
    pub positions: Vec<f64>,
    pub charges: Vec<u32>,
    pub units: Units,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CasciConfig {
    pub n_active_orb: usize,
    pub n_active_elec: usize,
    pub roots: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DmrgSection {
    pub d_schedule: Vec<usize>,
    pub sweeps: usize,
    pub mu: f64,
    pub lanczos_tol: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Table,
    Json,
    Csv,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    pub format: OutputFormat,
    pub path: Option<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub basis: BasisConfig,
    pub geometry: GeometryConfig,
    pub electrons: usize,
    pub casci: CasciConfig,
    pub dmrg: DmrgSection,
    pub output: OutputConfig,
}

/// Loads and validates a config, converting all lengths to bohr.
pub fn load_config(path: impl AsRef<Path>) -> Result<RunConfig> {
    let text = std::fs::read_to_string(path.as_ref())?;
    let mut config: RunConfig =
        serde_json::from_str(&text).map_err(|e| Error::Config(e.to_string()))?;

    let bu = config.basis.units;
    config.basis.range_low = bu.to_bohr(config.basis.range_low);
    config.basis.range_high = bu.to_bohr(config.basis.range_high);
    config.basis.units = Units::Bohr;
    let gu = config.geometry.units;
    for p in &mut config.geometry.positions {
        *p = gu.to_bohr(*p);
    }
    config.geometry.units = Units::Bohr;

    validate(&config)?;
    Ok(config)
}

fn validate(config: &RunConfig) -> Result<()> {
    let bad = |key: &str, why: String| Error::Config(format!("{key}: {why}"));
    if config.basis.n == 0 {
        return Err(bad("basis.n", "must be positive".into()));
    }
    if config.basis.range_high <= config.basis.range_low {
        return Err(bad(
            "basis.range_high",
            "must exceed basis.range_low".into(),
        ));
    }
    if config.geometry.positions.len() != config.geometry.charges.len() {
        return Err(bad(
            "geometry.charges",
            format!(
                "{} charges for {} positions",
                config.geometry.charges.len(),
                config.geometry.positions.len()
            ),
        ));
    }
    if config.electrons == 0 || config.electrons % 2 != 0 {
        return Err(bad(
            "electrons",
            format!("restricted closed-shell scope needs a positive even count, got {}", config.electrons),
        ));
    }
    if config.casci.n_active_elec > config.electrons {
        return Err(bad(
            "casci.n_active_elec",
            format!("{} exceeds the {} electrons", config.casci.n_active_elec, config.electrons),
        ));
    }
    if (config.electrons - config.casci.n_active_elec) % 2 != 0 {
        return Err(bad(
            "casci.n_active_elec",
            "frozen electrons must come in pairs".into(),
        ));
    }
    if config.casci.n_active_orb == 0 || config.casci.roots == 0 {
        return Err(bad("casci", "n_active_orb and roots must be positive".into()));
    }
    if config.dmrg.d_schedule.is_empty() || config.dmrg.sweeps == 0 {
        return Err(bad("dmrg", "d_schedule and sweeps must be non-empty/positive".into()));
    }
    Ok(())
}

impl RunConfig {
    pub fn build_basis(&self) -> Result<DvrBasis> {
        match self.basis.kind {
            BasisKind::Sine => build_sine_dvr(self.basis.range_low, self.basis.range_high, self.basis.n),
            BasisKind::Sinc => {
                let n = self.basis.n;
                let dx = if n == 1 {
                    self.basis.range_high - self.basis.range_low
                } else {
                    (self.basis.range_high - self.basis.range_low) / (n as f64 - 1.0)
                };
                build_sinc_dvr(self.basis.range_low, dx, n)
            }
        }
    }

    pub fn build_geometry(&self) -> Result<ChainGeometry> {
        ChainGeometry::new(
            self.geometry.positions.clone(),
            self.geometry.charges.clone(),
            self.electrons,
        )
    }

    pub fn build_integrals(&self) -> Result<IntegralSet> {
        Ok(build_integrals(&self.build_basis()?, &self.build_geometry()?))
    }

    /// Stable hash of the resolved (bohr) config.
    pub fn digest(&self) -> String {
        let canonical = serde_json::to_string(self).expect("config serializes");
        format!("{:016x}", fnv1a(canonical.as_bytes()))
    }
}

fn fnv1a(bytes: &[u8]) -> u64 {
    let mut h = 0xcbf2_9ce4_8422_2325u64;
    for &b in bytes {
        h ^= b as u64;
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    h
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    Hf,
    Casci,
    Jwci,
    Dmrg,
}

impl Method {
    fn name(self) -> &'static str {
        match self {
            Method::Hf => "hf",
            Method::Casci => "casci",
            Method::Jwci => "jwci",
            Method::Dmrg => "dmrg",
        }
    }
}

/// Parses a method selection: a comma list of hf/casci/jwci/dmrg, "all", or
/// "none"/empty for a validation-only run.
pub fn parse_methods(selection: &str) -> Result<Vec<Method>> {
    let selection = selection.trim();
    if selection.is_empty() || selection == "none" {
        return Ok(Vec::new());
    }
    if selection == "all" {
        return Ok(vec![Method::Hf, Method::Casci, Method::Jwci, Method::Dmrg]);
    }
    let mut out = Vec::new();
    for part in selection.split(',') {
        let m = match part.trim() {
            "hf" => Method::Hf,
            "casci" => Method::Casci,
            "jwci" => Method::Jwci,
            "dmrg" => Method::Dmrg,
            other => {
                return Err(Error::Config(format!(
                    "unknown method '{other}' (expected hf, casci, jwci, dmrg, all, none)"
                )))
            }
        };
        if !out.contains(&m) {
            out.push(m);
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, Serialize)]
pub struct ReportRow {
    pub method: String,
    pub params: String,
    pub energy_hartree: f64,
    pub diagnostics: serde_json::Value,
}

#[derive(Debug, Clone, Serialize)]
pub struct RunReport {
    pub config_digest: String,
    pub rows: Vec<ReportRow>,
    pub versions: Versions,
}

#[derive(Debug, Clone, Serialize)]
pub struct Versions {
    pub crate_name: String,
    pub crate_version: String,
}

/// One failed pipeline stage; the report still carries whatever succeeded.
#[derive(Debug)]
pub struct StageError {
    pub method: &'static str,
    pub message: String,
}

/// Executes the requested methods in dependency order (HF before the CI
/// routes; DMRG works on the raw integrals directly). Stage failures are
/// collected, not fatal: partial results are still reported.
pub fn run(config: &RunConfig, methods: &[Method]) -> (RunReport, Vec<StageError>) {
    let mut rows = Vec::new();
    let mut errors = Vec::new();
    let report = |rows: Vec<ReportRow>| RunReport {
        config_digest: config.digest(),
        rows,
        versions: Versions {
            crate_name: env!("CARGO_PKG_NAME").into(),
            crate_version: env!("CARGO_PKG_VERSION").into(),
        },
    };

    let ints = match config.build_integrals() {
        Ok(i) => i,
        Err(e) => {
            errors.push(StageError {
                method: "integrals",
                message: e.to_string(),
            });
            return (report(rows), errors);
        }
    };

    let needs_scf = methods
        .iter()
        .any(|m| matches!(m, Method::Hf | Method::Casci | Method::Jwci));
    let scf = if needs_scf {
        // Tighter than the default stopping criterion so the reported state
        // satisfies the energy-expression identity to 1e-9.
        let opts = ScfOptions {
            comm_tol: 1e-11,
            ..Default::default()
        };
        match scf_solve(&ints, config.electrons, &opts) {
            Ok(res) => {
                if !res.converged {
                    errors.push(StageError {
                        method: "hf",
                        message: format!("scf not converged after {} iterations", res.iterations),
                    });
                }
                Some(res)
            }
            Err(e) => {
                errors.push(StageError {
                    method: "hf",
                    message: e.to_string(),
                });
                None
            }
        }
    } else {
        None
    };

    for &method in methods {
        match method {
            Method::Hf => {
                if let Some(scf) = &scf {
                    rows.push(ReportRow {
                        method: "HF".into(),
                        params: format!("N={}", ints.n()),
                        energy_hartree: scf.e_hf,
                        diagnostics: serde_json::json!({
                            "iterations": scf.iterations,
                            "converged": scf.converged,
                            "homo": scf.orbital_energies[scf.n_occ.saturating_sub(1)],
                            "lumo": scf.orbital_energies[scf.n_occ.min(ints.n() - 1)],
                        }),
                    });
                }
            }
            Method::Casci => {
                let Some(scf) = &scf else { continue };
                let stage = build_active_hamiltonian(scf, &ints, config.casci.n_active_orb, config.casci.n_active_elec)
                    .and_then(|ash| {
                        let ci = solve_casci(&ash, 0, config.casci.roots)?;
                        Ok((ash, ci))
                    });
                match stage {
                    Ok((ash, ci)) => rows.push(ReportRow {
                        method: "CASCI".into(),
                        params: format!("({},{})", ash.n_orb, ash.n_elec),
                        energy_hartree: ci.energies[0],
                        diagnostics: serde_json::json!({
                            "roots": ci.energies.as_slice(),
                            "e_core": ash.e_core,
                        }),
                    }),
                    Err(e) => errors.push(StageError {
                        method: "casci",
                        message: e.to_string(),
                    }),
                }
            }
            Method::Jwci => {
                let Some(scf) = &scf else { continue };
                let stage = build_active_hamiltonian(scf, &ints, config.casci.n_active_orb, config.casci.n_active_elec)
                    .and_then(|ash| {
                        let h = build_jw_hamiltonian(&ash, None)?;
                        let (res, idx) = lowest_in_number_sector(&h, config.casci.n_active_elec)?;
                        Ok((h.dim, res, idx))
                    });
                match stage {
                    Ok((dim, res, idx)) => rows.push(ReportRow {
                        method: "JWCI".into(),
                        params: format!("({},{})", config.casci.n_active_orb, config.casci.n_active_elec),
                        energy_hartree: res.energies[idx],
                        diagnostics: serde_json::json!({
                            "dim": dim,
                            "selected_root": idx,
                            "n_expect": res.n_expect[idx],
                            "sz_expect": res.sz_expect[idx],
                        }),
                    }),
                    Err(e) => errors.push(StageError {
                        method: "jwci",
                        message: e.to_string(),
                    }),
                }
            }
            Method::Dmrg => {
                let penalty = Penalty {
                    mu: config.dmrg.mu,
                    n_target: config.electrons as f64,
                };
                let terms = chain_terms(&ints, Some(penalty));
                let dmrg_config = DmrgConfig {
                    d_schedule: config.dmrg.d_schedule.clone(),
                    n_sweeps: config.dmrg.sweeps,
                    lanczos_tol: config.dmrg.lanczos_tol,
                    sweep_e_tol: 1e-9,
                };
                match dmrg_run(&terms, &dmrg_config) {
                    Ok(res) => {
                        if !res.number_on_target {
                            errors.push(StageError {
                                method: "dmrg",
                                message: format!(
                                    "<N> = {:.4} is off the target {} by more than 0.01 (penalty too weak?)",
                                    res.n_expectation, config.electrons
                                ),
                            });
                        }
                        let max_trunc = res
                            .truncation_errors
                            .iter()
                            .cloned()
                            .fold(0.0f64, f64::max);
                        rows.push(ReportRow {
                            method: "DMRG".into(),
                            params: format!("(D={})", res.d_used),
                            energy_hartree: res.energy,
                            diagnostics: serde_json::json!({
                                "sweep_energies": res.sweep_energies,
                                "max_truncation_error": max_trunc,
                                "n_expectation": res.n_expectation,
                                "n_variance": res.n_variance,
                                "mu": config.dmrg.mu,
                            }),
                        });
                    }
                    Err(e) => errors.push(StageError {
                        method: "dmrg",
                        message: e.to_string(),
                    }),
                }
            }
        }
    }

    (report(rows), errors)
}

/// Like [`run`], but executes DMRG on its own thread concurrently with the
/// SCF-based methods (they share nothing). Row order in the report matches
/// the requested method order either way, so the output is identical to the
/// sequential run.
pub fn run_parallel(config: &RunConfig, methods: &[Method]) -> (RunReport, Vec<StageError>) {
    if !methods.contains(&Method::Dmrg) || methods.len() == 1 {
        return run(config, methods);
    }
    let others: Vec<Method> = methods.iter().copied().filter(|&m| m != Method::Dmrg).collect();
    let (main, dmrg) = std::thread::scope(|scope| {
        let handle = scope.spawn(|| run(config, &[Method::Dmrg]));
        let main = run(config, &others);
        (main, handle.join().expect("dmrg thread panicked"))
    });
    let (mut main_report, mut errors) = main;
    let (dmrg_report, dmrg_errors) = dmrg;
    errors.extend(dmrg_errors);

    let mut rows = Vec::new();
    for &method in methods {
        let source = if method == Method::Dmrg {
            &dmrg_report.rows
        } else {
            &main_report.rows
        };
        rows.extend(
            source
                .iter()
                .filter(|r| r.method.eq_ignore_ascii_case(method.name()))
                .cloned(),
        );
    }
    main_report.rows = rows;
    (main_report, errors)
}

/// Renders a report in the requested format. Energies keep full precision in
/// JSON/CSV; the table view rounds to six decimals.
pub fn render(report: &RunReport, format: OutputFormat) -> String {
    match format {
        OutputFormat::Json => {
            serde_json::to_string_pretty(report).expect("report serializes") + "\n"
        }
        OutputFormat::Csv => {
            let mut out = String::from("method,params,energy_hartree\n");
            for row in &report.rows {
                writeln!(out, "{},\"{}\",{:.12}", row.method, row.params, row.energy_hartree)
                    .unwrap();
            }
            out
        }
        OutputFormat::Table => {
            let mut out = String::new();
            writeln!(out, "{:<8} {:<14} {:>14}", "method", "params", "energy (Ha)").unwrap();
            writeln!(out, "{}", "-".repeat(38)).unwrap();
            for row in &report.rows {
                writeln!(
                    out,
                    "{:<8} {:<14} {:>14.6}",
                    row.method, row.params, row.energy_hartree
                )
                .unwrap();
            }
            out
        }
    }
}

/// Small-instance oracle suite plus the kinetic-spectrum check; one line per
/// check. Returns false if anything disagrees.
pub fn selftest() -> bool {
    let mut ok = true;
    let mut check = |name: &str, pass: bool, detail: String| {
        println!("{} {name}: {detail}", if pass { "PASS" } else { "FAIL" });
        ok &= pass;
    };

    // Sine-DVR kinetic spectrum against the analytic box levels.
    {
        let basis = build_sine_dvr(0.0, std::f64::consts::PI, 64).unwrap();
        let eig = numerics::dense_sym_eig(&kinetic_matrix(&basis)).unwrap();
        let mut worst = 0.0f64;
        for k in 1..=5 {
            let want = (k * k) as f64 / 2.0;
            worst = worst.max(((eig.values[k - 1] - want) / want).abs());
        }
        check(
            "kinetic box spectrum",
            worst < 1e-6,
            format!("worst relative deviation {worst:.2e}"),
        );
    }

    // Determinant CI, spin-chain CI, and untruncated DMRG on random small
    // chains must agree pairwise.
    for seed in [1u64, 2, 3] {
        let mut rng = numerics::SplitMix64::new(seed);
        let n = 4;
        let x0 = -1.5 + 0.2 * (rng.next_f64() - 0.5);
        let dx = 0.9 + 0.2 * rng.next_f64();
        let basis = build_sinc_dvr(x0, dx, n).unwrap();
        let geom = ChainGeometry::new(vec![x0 + 0.7, x0 + 2.1], vec![1, 1], 2).unwrap();
        let ints = build_integrals(&basis, &geom);

        let scf = scf_solve(&ints, 2, &ScfOptions::default()).unwrap();
        let ash = build_active_hamiltonian(&scf, &ints, n, 2).unwrap();
        let e_det = solve_casci(&ash, 0, 1).unwrap().energies[0];

        let h = build_jw_hamiltonian(&ash, None).unwrap();
        let (jw, idx) = lowest_in_number_sector(&h, 2).unwrap();
        let e_jw = jw.energies[idx];

        let pen = Penalty { mu: 1.0, n_target: 2.0 };
        let terms = chain_terms(&ints, Some(pen));
        let dmrg_config = DmrgConfig {
            d_schedule: vec![256],
            n_sweeps: 3,
            lanczos_tol: 1e-10,
            sweep_e_tol: 1e-11,
        };
        let e_dmrg = dmrg_run(&terms, &dmrg_config).unwrap().energy;

        let worst = (e_det - e_jw).abs().max((e_det - e_dmrg).abs()).max((e_jw - e_dmrg).abs());
        check(
            &format!("cross-method oracle (seed {seed})"),
            worst < 1e-8,
            format!("detci {e_det:.10}, jwci {e_jw:.10}, dmrg {e_dmrg:.10}, spread {worst:.2e}"),
        );
    }

    ok
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn write_config(dir: &std::path::Path, name: &str, body: &str) -> std::path::PathBuf {
        let path = dir.join(name);
        std::fs::write(&path, body).unwrap();
        path
    }

    fn sample_config() -> String {
        serde_json::json!({
            "basis": {"kind": "sine", "range_low": -15.0, "range_high": 15.0, "n": 8, "units": "bohr"},
            "geometry": {"positions": [-5.0, -5.0/3.0, 5.0/3.0, 5.0], "charges": [1, 1, 1, 1], "units": "bohr"},
            "electrons": 4,
            "casci": {"n_active_orb": 4, "n_active_elec": 4, "roots": 1},
            "dmrg": {"d_schedule": [8], "sweeps": 2, "mu": 1.0, "lanczos_tol": 1e-8},
            "output": {"format": "table", "path": null}
        })
        .to_string()
    }

    #[test]
    fn load_converts_angstrom_to_bohr() {
        let dir = std::env::temp_dir().join("dvrq_cli_test_units");
        std::fs::create_dir_all(&dir).unwrap();
        let body = sample_config().replace("\"bohr\"", "\"angstrom\"");
        let path = write_config(&dir, "a.json", &body);
        let config = load_config(&path).unwrap();
        assert_eq!(config.basis.units, Units::Bohr);
        assert_abs_diff_eq!(config.basis.range_high, 15.0 * BOHR_PER_ANGSTROM, epsilon = 1e-12);
        assert_abs_diff_eq!(
            config.geometry.positions[3],
            5.0 * BOHR_PER_ANGSTROM,
            epsilon = 1e-12
        );
    }

    #[test]
    fn missing_units_is_a_hard_error() {
        let dir = std::env::temp_dir().join("dvrq_cli_test_missing");
        std::fs::create_dir_all(&dir).unwrap();
        let body = sample_config().replace("\"units\": \"bohr\", ", "").replacen(
            ",\"units\":\"bohr\"",
            "",
            1,
        );
        // Remove the geometry units key entirely.
        let mut v: serde_json::Value = serde_json::from_str(&sample_config()).unwrap();
        v["geometry"].as_object_mut().unwrap().remove("units");
        let path = write_config(&dir, "m.json", &v.to_string());
        let err = load_config(&path).unwrap_err();
        assert!(err.to_string().contains("units"), "{err}");
        let _ = body;
    }

    #[test]
    fn parity_mismatch_rejected_and_named() {
        let mut v: serde_json::Value = serde_json::from_str(&sample_config()).unwrap();
        v["casci"]["n_active_elec"] = 3.into();
        let dir = std::env::temp_dir().join("dvrq_cli_test_parity");
        std::fs::create_dir_all(&dir).unwrap();
        let path = write_config(&dir, "p.json", &v.to_string());
        let err = load_config(&path).unwrap_err();
        assert!(err.to_string().contains("n_active_elec"), "{err}");
    }

    #[test]
    fn method_parsing() {
        assert_eq!(parse_methods("all").unwrap().len(), 4);
        assert_eq!(parse_methods("").unwrap().len(), 0);
        assert_eq!(parse_methods("none").unwrap().len(), 0);
        let ms = parse_methods("hf,dmrg").unwrap();
        assert_eq!(ms, vec![Method::Hf, Method::Dmrg]);
        assert!(parse_methods("hf,bogus").is_err());
        assert_eq!(parse_methods("hf,hf").unwrap().len(), 1);
        assert_eq!(Method::Casci.name(), "casci");
    }

    #[test]
    fn digest_is_stable_and_unit_insensitive_after_resolution() {
        let dir = std::env::temp_dir().join("dvrq_cli_test_digest");
        std::fs::create_dir_all(&dir).unwrap();
        let p1 = write_config(&dir, "c1.json", &sample_config());
        let c1 = load_config(&p1).unwrap();
        let c2 = load_config(&p1).unwrap();
        assert_eq!(c1.digest(), c2.digest());
        let mut v: serde_json::Value = serde_json::from_str(&sample_config()).unwrap();
        v["electrons"] = 2.into();
        v["casci"]["n_active_elec"] = 2.into();
        let p2 = write_config(&dir, "c2.json", &v.to_string());
        assert_ne!(load_config(&p2).unwrap().digest(), c1.digest());
    }

    #[test]
    fn validation_only_run_and_report_formats() {
        let dir = std::env::temp_dir().join("dvrq_cli_test_run");
        std::fs::create_dir_all(&dir).unwrap();
        let path = write_config(&dir, "r.json", &sample_config());
        let config = load_config(&path).unwrap();
        let (report, errors) = run(&config, &[]);
        assert!(errors.is_empty());
        assert!(report.rows.is_empty());
        assert_eq!(report.config_digest, config.digest());

        let (report, errors) = run(&config, &parse_methods("hf").unwrap());
        assert!(errors.is_empty(), "{:?}", errors.first().map(|e| &e.message));
        assert_eq!(report.rows.len(), 1);
        assert_eq!(report.rows[0].method, "HF");

        let json = render(&report, OutputFormat::Json);
        assert!(json.contains("config_digest"));
        // Bit-identical reruns.
        let (again, _) = run(&config, &parse_methods("hf").unwrap());
        assert_eq!(json, render(&again, OutputFormat::Json));

        let csv = render(&report, OutputFormat::Csv);
        assert!(csv.starts_with("method,params,energy_hartree"));
        let table = render(&report, OutputFormat::Table);
        assert!(table.contains("HF"));
    }

    #[test]
    fn parallel_run_matches_sequential() {
        let dir = std::env::temp_dir().join("dvrq_cli_test_parallel");
        std::fs::create_dir_all(&dir).unwrap();
        let path = write_config(&dir, "p.json", &sample_config());
        let config = load_config(&path).unwrap();
        let methods = parse_methods("hf,casci,dmrg").unwrap();
        let (seq, seq_err) = run(&config, &methods);
        let (par, par_err) = run_parallel(&config, &methods);
        assert_eq!(seq_err.len(), par_err.len());
        assert_eq!(
            render(&seq, OutputFormat::Json),
            render(&par, OutputFormat::Json)
        );
    }

    #[test]
    fn bundled_table1_configs_load() {
        let root = std::path::Path::new(env!("CARGO_MANIFEST_DIR"));
        let ang = load_config(root.join("configs/table1_angstrom.json")).unwrap();
        let boh = load_config(root.join("configs/table1_bohr.json")).unwrap();
        assert_eq!(ang.basis.n, 32);
        assert_eq!(boh.basis.n, 32);
        // Same numerals, different units: after resolution the angstrom one
        // is wider by the conversion factor.
        assert_abs_diff_eq!(
            ang.basis.range_high / boh.basis.range_high,
            BOHR_PER_ANGSTROM,
            epsilon = 1e-12
        );
        assert_eq!(ang.electrons, 4);
        assert_eq!(ang.geometry.positions.len(), 4);
    }
}
