use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde_json::{json, Value};

use super::args::{AlgebraArgs, CheckArgs, ClockArg, Format, ModeArg, ParticlesArgs, SimulateArgs};
use super::CliError;
use crate::algebra::{
    build_dirac_set, build_eq9_set, onshell_trials, snyder_deformation, verify_clifford,
    CliffordRecord, OnshellSummary,
};
use crate::cosmology::{run_simulation, Clock, Mode, SimulationConfig, TimeSeries, TrendReport};
use crate::particles::{
    charge_fraction, potential_table_csv, quark_mass_estimate, weak_coupling_check, zpf_energy,
    PotentialParams,
};
use crate::quantities::ConstantsTable;
use crate::relations::{parse_relation_file, run_registry, run_relations, Report};

/// Rendered output plus whether every check in it passed.
pub struct Outcome {
    pub body: String,
    /// Extra lines for the error stream (kept out of CSV bodies).
    pub diagnostics: Vec<String>,
    pub ok: bool,
}

impl Outcome {
    fn new(body: String, ok: bool) -> Self {
        Self {
            body,
            diagnostics: Vec::new(),
            ok,
        }
    }
}

fn pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("json value serializes");
    s.push('\n');
    s
}

pub fn parse_overrides(items: &[String]) -> Result<BTreeMap<String, f64>, CliError> {
    let mut out = BTreeMap::new();
    for item in items.iter().filter(|s| !s.trim().is_empty()) {
        let (id, val) = item
            .split_once('=')
            .ok_or_else(|| CliError::Config(format!("expected ID=REAL, got `{item}`")))?;
        let tol: f64 = val
            .trim()
            .parse()
            .map_err(|_| CliError::Config(format!("invalid tolerance `{val}` for {id}")))?;
        out.insert(id.trim().to_string(), tol);
    }
    Ok(out)
}

/// Seconds, or a multiple of `tau` when suffixed with `tau`.
pub fn parse_time(s: &str, tau: f64) -> Result<f64, CliError> {
    let s = s.trim();
    let (num, unit) = match s.strip_suffix("tau") {
        Some(n) => (n.trim(), tau),
        None => (s, 1.0),
    };
    let x: f64 = num
        .parse()
        .map_err(|_| CliError::Config(format!("invalid time `{s}`")))?;
    Ok(x * unit)
}

pub fn parse_count(s: &str) -> Result<u64, CliError> {
    let x: f64 = s
        .trim()
        .parse()
        .map_err(|_| CliError::Config(format!("invalid count `{s}`")))?;
    if x < 1.0 || x.fract() != 0.0 || x > 1e15 {
        return Err(CliError::Config(format!(
            "count must be a positive integer, got `{s}`"
        )));
    }
    Ok(x as u64)
}

fn render_report(report: &Report, format: Format) -> String {
    match format {
        Format::Text => report.to_text(),
        Format::Csv => report.to_csv(),
        Format::Json => pretty(&report.to_json_value()),
    }
}

pub fn check(
    table: &ConstantsTable,
    args: &CheckArgs,
    format: Format,
) -> Result<Outcome, CliError> {
    let overrides = parse_overrides(&args.tol)?;
    let filter = (!args.rel.is_empty()).then_some(args.rel.as_slice());
    let report = match &args.relations {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
            let relations = parse_relation_file(&text)
                .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
            run_relations(&relations, table, filter, &overrides)
        }
        None => run_registry(table, filter, &overrides),
    }
    .map_err(|e| CliError::Config(e.to_string()))?;
    Ok(Outcome::new(
        render_report(&report, format),
        report.all_passed(),
    ))
}

pub fn simulation_config(
    table: &ConstantsTable,
    args: &SimulateArgs,
) -> Result<SimulationConfig, CliError> {
    let clock = match args.clock {
        ClockArg::Pion => Clock::Pion,
        ClockArg::Planck => Clock::Planck,
    };
    let tau = clock
        .tau(table)
        .map_err(|e| CliError::Config(e.to_string()))?;
    let dt = parse_time(&args.dt, tau)?;
    let t_end = match (&args.t_end, &args.steps) {
        (Some(t), _) => parse_time(t, tau)?,
        (None, Some(steps)) => parse_count(steps)? as f64 * dt,
        (None, None) => 1000.0 * dt,
    };
    let mode = match args.mode {
        ModeArg::Deterministic => Mode::Deterministic,
        ModeArg::Stochastic => Mode::Stochastic,
    };
    Ok(SimulationConfig {
        n0: args.n0,
        t_end,
        dt,
        mode,
        seed: args.seed,
        ensemble_size: args.ensemble,
        output_stride: args.stride,
        clock,
    })
}

fn trend_lines(trends: &Result<TrendReport, String>) -> Vec<String> {
    match trends {
        Ok(t) => vec![
            format!("slope of G against t (final decade): {:.4}", t.slope_g),
            format!("slope of rho against t (final decade): {:.4}", t.slope_rho),
            format!("max |Rdot - H R| / H R: {:.3e}", t.rdot_vs_hr_residual),
            format!(
                "max |G Ndot m/c^2 - H R| / H R: {:.3e}",
                t.leading_term_residual
            ),
            format!("max |R - c t/2| / (c t/2): {:.3e}", t.r_vs_half_ct_residual),
            format!("max |R - l sqrt(N)| / R: {:.3e}", t.r_identity_residual),
            format!("max |lambda| / H^2: {:.3e}", t.max_abs_lambda_over_h2),
        ],
        Err(e) => vec![format!("trend checks unavailable: {e}")],
    }
}

fn series_json(ts: &TimeSeries, trends: &Result<TrendReport, String>) -> Value {
    let mut v = ts.to_json_value();
    v["trends"] = match trends {
        Ok(t) => serde_json::to_value(t).expect("trend report serializes"),
        Err(e) => json!({ "error": e }),
    };
    v
}

fn series_text(ts: &TimeSeries, trends: &Result<TrendReport, String>) -> String {
    let mut out = String::new();
    let c = &ts.config;
    let _ = writeln!(
        out,
        "mode {:?}, N0 {}, dt {:e} s, t_end {:e} s, tau {:e} s, {} samples",
        c.mode,
        c.n0,
        c.dt,
        c.t_end,
        ts.tau,
        ts.states.len()
    );
    if let Some(seed) = c.seed {
        let _ = writeln!(out, "seed {seed}, ensemble {}", c.ensemble_size);
    }
    let _ = writeln!(out, "constants {}", ts.constants_fingerprint);
    let _ = writeln!(out, "config {}", ts.config_fingerprint);
    for line in trend_lines(trends) {
        let _ = writeln!(out, "{line}");
    }
    let _ = writeln!(out);
    for line in ts.to_csv().lines() {
        let cells: Vec<String> = line.split(',').map(|c| format!("{c:>12}")).collect();
        let _ = writeln!(out, "{}", cells.join(" "));
    }
    out
}

pub fn simulate(
    table: &ConstantsTable,
    args: &SimulateArgs,
    format: Format,
) -> Result<Outcome, CliError> {
    let cfg = simulation_config(table, args)?;
    let ts = run_simulation(&cfg, table).map_err(|e| CliError::Config(e.to_string()))?;
    let trends = ts.trends().map_err(|e| e.to_string());
    Ok(match format {
        Format::Text => Outcome::new(series_text(&ts, &trends), true),
        Format::Json => Outcome::new(pretty(&series_json(&ts, &trends)), true),
        Format::Csv => Outcome {
            body: ts.to_csv(),
            diagnostics: trend_lines(&trends),
            ok: true,
        },
    })
}

pub const SUITES: [&str; 3] = ["clifford", "onshell", "snyder"];

struct SnyderResult {
    compton_factor: f64,
    small_a_factor: f64,
}

impl SnyderResult {
    fn ok(&self) -> bool {
        self.compton_factor == 2.0 && (self.small_a_factor - 1.0).abs() < 1e-12
    }
}

#[derive(Default)]
struct AlgebraResults {
    clifford: Option<Vec<CliffordRecord>>,
    onshell: Option<OnshellSummary>,
    snyder: Option<SnyderResult>,
}

impl AlgebraResults {
    fn ok(&self) -> bool {
        self.clifford.iter().flatten().all(CliffordRecord::exact)
            && self
                .onshell
                .as_ref()
                .is_none_or(|s| s.passed(ONSHELL_TOLERANCE))
            && self.snyder.as_ref().is_none_or(SnyderResult::ok)
    }

    fn to_json(&self) -> Value {
        let mut v = json!({ "passed": self.ok() });
        if let Some(records) = &self.clifford {
            v["clifford"] = records
                .iter()
                .map(|r| {
                    json!({
                        "label": r.label,
                        "pairs": r.pairs,
                        "max_deviation": r.max_deviation,
                        "signature": r.signature_string(),
                    })
                })
                .collect();
        }
        if let Some(s) = &self.onshell {
            v["onshell"] = serde_json::to_value(s).expect("summary serializes");
            v["onshell"]["passed"] = s.passed(ONSHELL_TOLERANCE).into();
        }
        if let Some(s) = &self.snyder {
            v["snyder"] = json!({
                "compton_factor": s.compton_factor,
                "small_a_factor": s.small_a_factor,
                "passed": s.ok(),
            });
        }
        v
    }

    /// Rows of `suite,item,value,passed`.
    fn rows(&self) -> Vec<[String; 4]> {
        let mut rows = Vec::new();
        for r in self.clifford.iter().flatten() {
            for p in &r.pairs {
                rows.push([
                    "clifford".into(),
                    format!("{}:{}-{}", r.label, p.a, p.b),
                    p.deviation.to_string(),
                    (p.deviation == 0.0).to_string(),
                ]);
            }
            rows.push([
                "clifford".into(),
                format!("{}:signature", r.label),
                r.signature_string(),
                r.exact().to_string(),
            ]);
        }
        if let Some(s) = &self.onshell {
            let ok = s.passed(ONSHELL_TOLERANCE).to_string();
            rows.push([
                "onshell".into(),
                "trials".into(),
                s.trials.to_string(),
                ok.clone(),
            ]);
            rows.push([
                "onshell".into(),
                "max_relative_residual".into(),
                format!("{:e}", s.max_relative_residual),
                (s.max_relative_residual <= ONSHELL_TOLERANCE).to_string(),
            ]);
            rows.push([
                "onshell".into(),
                "onshell_nullspace_two".into(),
                s.onshell_nullspace_two.to_string(),
                (s.onshell_nullspace_two == s.trials).to_string(),
            ]);
            rows.push([
                "onshell".into(),
                "offshell_nullspace_zero".into(),
                s.offshell_nullspace_zero.to_string(),
                (s.offshell_nullspace_zero == s.trials).to_string(),
            ]);
        }
        if let Some(s) = &self.snyder {
            rows.push([
                "snyder".into(),
                "compton_factor".into(),
                s.compton_factor.to_string(),
                (s.compton_factor == 2.0).to_string(),
            ]);
            rows.push([
                "snyder".into(),
                "small_a_factor".into(),
                s.small_a_factor.to_string(),
                ((s.small_a_factor - 1.0).abs() < 1e-12).to_string(),
            ]);
        }
        rows
    }

    fn to_csv(&self) -> String {
        let mut out = String::from("suite,item,value,passed\n");
        for r in self.rows() {
            let _ = writeln!(out, "{}", r.join(","));
        }
        out
    }

    fn to_text(&self) -> String {
        let mut out = String::new();
        for r in self.clifford.iter().flatten() {
            let _ = writeln!(
                out,
                "clifford {:<10} max deviation {}  signature {}  {}",
                r.label,
                r.max_deviation,
                r.signature_string(),
                if r.exact() { "PASS" } else { "FAIL" }
            );
        }
        if let Some(s) = &self.onshell {
            let _ = writeln!(
                out,
                "onshell  {} trials (seed {}): max relative residual {:.3e}, nullspace 2 on-shell {}/{}, 0 off-shell {}/{}  {}",
                s.trials,
                s.seed,
                s.max_relative_residual,
                s.onshell_nullspace_two,
                s.trials,
                s.offshell_nullspace_zero,
                s.trials,
                if s.passed(ONSHELL_TOLERANCE) { "PASS" } else { "FAIL" }
            );
        }
        if let Some(s) = &self.snyder {
            let _ = writeln!(
                out,
                "snyder   factor at Compton parameters {}, as a -> 0 {}  {}",
                s.compton_factor,
                s.small_a_factor,
                if s.ok() { "PASS" } else { "FAIL" }
            );
        }
        out
    }
}

const ONSHELL_TOLERANCE: f64 = 1e-9;

fn run_algebra(
    table: &ConstantsTable,
    suites: &[String],
    trials: usize,
    seed: u64,
) -> Result<AlgebraResults, CliError> {
    if let Some(bad) = suites.iter().find(|s| !SUITES.contains(&s.as_str())) {
        return Err(CliError::Config(format!(
            "unknown suite `{bad}` (expected one of {})",
            SUITES.join(", ")
        )));
    }
    let get = |k: &str| {
        table
            .magnitude(k)
            .map_err(|e| CliError::Config(e.to_string()))
    };
    let mut out = AlgebraResults::default();
    for suite in suites {
        match suite.as_str() {
            "clifford" => {
                out.clifford = Some(vec![
                    verify_clifford(&build_dirac_set()),
                    verify_clifford(&build_eq9_set()),
                ])
            }
            "onshell" => out.onshell = Some(onshell_trials(trials, seed, get("m_pi")?, get("c")?)),
            _ => {
                let (m, c, hbar) = (get("m_pi")?, get("c")?, get("hbar")?);
                let p = m * c;
                let factor =
                    |a| snyder_deformation(p, a, hbar).map_err(|e| CliError::Config(e.to_string()));
                out.snyder = Some(SnyderResult {
                    compton_factor: factor(hbar / (m * c))?,
                    small_a_factor: factor(1e-30 * hbar / (m * c))?,
                })
            }
        }
    }
    Ok(out)
}

pub fn algebra(
    table: &ConstantsTable,
    args: &AlgebraArgs,
    format: Format,
) -> Result<Outcome, CliError> {
    let results = run_algebra(table, &args.suite, args.trials, args.seed)?;
    let body = match format {
        Format::Text => results.to_text(),
        Format::Csv => results.to_csv(),
        Format::Json => pretty(&results.to_json()),
    };
    Ok(Outcome::new(body, results.ok()))
}

pub fn constants(table: &ConstantsTable, format: Format) -> Outcome {
    let body = match format {
        Format::Text => format!(
            "# fingerprint {}\n{}",
            table.fingerprint(),
            table.serialize()
        ),
        Format::Csv => {
            let mut out = String::from("name,value,unit,provenance\n");
            for e in table.entries() {
                let _ = writeln!(
                    out,
                    "{},{:e},{},{}",
                    e.name,
                    e.value.magnitude(),
                    e.value.dim(),
                    e.provenance
                );
            }
            out
        }
        Format::Json => {
            let entries: Vec<Value> = table
                .entries()
                .iter()
                .map(|e| {
                    json!({
                        "name": e.name,
                        "value": e.value.magnitude(),
                        "unit": e.value.dim().to_string(),
                        "provenance": e.provenance.as_str(),
                        "note": e.note,
                    })
                })
                .collect();
            pretty(&json!({ "fingerprint": table.fingerprint(), "entries": entries }))
        }
    };
    Outcome::new(body, true)
}

/// The relation checks, every algebra suite, and a deterministic run of
/// 1e4 steps at τ/10 recorded every tenth step.
pub fn report(table: &ConstantsTable, format: Format) -> Result<Outcome, CliError> {
    let checks =
        run_registry(table, None, &BTreeMap::new()).map_err(|e| CliError::Config(e.to_string()))?;
    let suites: Vec<String> = SUITES.iter().map(|s| s.to_string()).collect();
    let algebra = run_algebra(table, &suites, 1000, 7)?;
    let tau = table
        .magnitude("tau_pi")
        .map_err(|e| CliError::Config(e.to_string()))?;
    let mut cfg = SimulationConfig::deterministic(1000.0 * tau, tau);
    cfg.output_stride = 10;
    let ts = run_simulation(&cfg, table).map_err(|e| CliError::Config(e.to_string()))?;
    let trends = ts.trends().map_err(|e| e.to_string());

    let ok = checks.all_passed() && algebra.ok();
    let body = match format {
        Format::Json => pretty(&json!({
            "passed": ok,
            "check": checks.to_json_value(),
            "algebra": algebra.to_json(),
            "simulate": series_json(&ts, &trends),
        })),
        Format::Csv => format!(
            "# check\n{}\n# algebra\n{}\n# simulate\n{}",
            checks.to_csv(),
            algebra.to_csv(),
            ts.to_csv()
        ),
        Format::Text => format!(
            "== relations ==\n{}\n== algebra ==\n{}\n== cosmology ==\n{}",
            checks.to_text(),
            algebra.to_text(),
            series_text(&ts, &trends)
        ),
    };
    Ok(Outcome::new(body, ok))
}

pub fn particles(
    table: &ConstantsTable,
    args: &ParticlesArgs,
    format: Format,
) -> Result<Outcome, CliError> {
    let cfg = |e: crate::particles::ParticleError| CliError::Config(e.to_string());
    let m = table
        .magnitude("m_pi")
        .map_err(|e| CliError::Config(e.to_string()))?;
    let c = table
        .magnitude("c")
        .map_err(|e| CliError::Config(e.to_string()))?;
    let params = PotentialParams::new(args.alpha, args.beta, m).map_err(cfg)?;
    let csv = potential_table_csv(&params, c, args.r_min, args.r_max, args.points).map_err(cfg)?;
    if format == Format::Csv {
        return Ok(Outcome::new(csv, true));
    }

    let charges: Vec<_> = (1..=3)
        .map(|d| charge_fraction(d).expect("in range"))
        .collect();
    let quark = quark_mass_estimate(table).map_err(cfg)?;
    let weak = weak_coupling_check(table).map_err(cfg)?;
    let l_pi = table
        .magnitude("l_pi")
        .map_err(|e| CliError::Config(e.to_string()))?;
    let l_planck = table
        .magnitude("l_planck")
        .map_err(|e| CliError::Config(e.to_string()))?;
    let zpf_pi = zpf_energy(l_pi, table).map_err(cfg)?;
    let zpf_planck = zpf_energy(l_planck, table).map_err(cfg)?;
    let crossover = crate::particles::crossover_radius(&params);

    let body = if format == Format::Json {
        let rows: Vec<Value> = csv
            .lines()
            .skip(1)
            .map(|l| {
                let v: Vec<f64> = l
                    .split(',')
                    .map(|x| x.parse().expect("own output"))
                    .collect();
                json!({ "r": v[0], "V_natural": v[1], "V_cgs": v[2] })
            })
            .collect();
        pretty(&json!({
            "potential": { "params": params, "crossover_radius": crossover, "table": rows },
            "charges": charges,
            "quark_mass": quark,
            "weak": {
                "fermi_coupling": weak.fermi_coupling,
                "g2_lw2": weak.g2_lw2,
                "results": weak.results.iter().map(|r| json!({
                    "id": r.id, "gap_decades": r.gap_decades, "tolerance": r.tolerance_decades,
                    "passed": r.passed, "notes": r.notes,
                })).collect::<Vec<_>>(),
            },
            "zpf_energy": { "l_pi": zpf_pi, "l_planck": zpf_planck },
        }))
    } else {
        let mut out = String::new();
        for ch in &charges {
            let _ = writeln!(out, "charge in {} dimension(s): {} e", ch.dims, ch.fraction);
        }
        let _ = writeln!(
            out,
            "quark mass estimate: {:.4e} g ({} m_e); alpha/9 = {:.4e}",
            quark.mass, quark.ratio_to_electron, quark.alpha_over_nine
        );
        let _ = writeln!(
            out,
            "Fermi coupling g2/m_w^2: {:.4e} g^-2",
            weak.fermi_coupling
        );
        let _ = writeln!(
            out,
            "g^2 l_w^2 from the neutrino balance: {:.4e}",
            weak.g2_lw2
        );
        for r in &weak.results {
            let _ = writeln!(
                out,
                "  {:<5} gap {}  tol {}  {}",
                r.id,
                r.gap_decades.map_or("-".into(), |g| format!("{g:.3}")),
                r.tolerance_decades,
                if r.passed { "PASS" } else { "FAIL" }
            );
        }
        let _ = writeln!(out, "fluctuation energy hbar c/l: {zpf_pi:.4e} erg at l_pi, {zpf_planck:.4e} erg at l_planck");
        let _ = writeln!(
            out,
            "crossover radius: {crossover} (units of the Compton wavelength)"
        );
        let _ = writeln!(out);
        out.push_str(&csv);
        out
    };
    Ok(Outcome::new(body, true))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn time_values() {
        assert_eq!(parse_time("0.1tau", 2.0).unwrap(), 0.2);
        assert_eq!(parse_time("3e-24", 2.0).unwrap(), 3e-24);
        assert_eq!(parse_time(" 2 tau", 1.5).unwrap(), 3.0);
        assert!(parse_time("fast", 1.0).is_err());
    }

    #[test]
    fn counts() {
        assert_eq!(parse_count("1e4").unwrap(), 10000);
        assert_eq!(parse_count("250").unwrap(), 250);
        assert!(parse_count("1.5").is_err());
        assert!(parse_count("0").is_err());
    }

    #[test]
    fn overrides() {
        let m = parse_overrides(&["E17=0.1".into(), "E1 = 2".into()]).unwrap();
        assert_eq!(m["E17"], 0.1);
        assert_eq!(m["E1"], 2.0);
        assert!(parse_overrides(&["E17".into()]).is_err());
        assert!(parse_overrides(&["E17=x".into()]).is_err());
    }
}
