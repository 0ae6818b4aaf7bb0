use std::path::Path;

use fano_core::fit::{self, FitResult, ProfileKind, ProfileSamples};
use fano_core::oracle::{self, OracleControls};
use fano_core::validation::{self, ValidationReport};
use fano_core::{effective, profiles, Execution, ModelParams};

use crate::config::{Axis, OracleMode, RunConfig, Sweep};
use crate::output::Table;
use crate::CliError;

pub fn default_profile_sweep(p: &ModelParams) -> Sweep {
    Sweep { axis: Axis::OmegaL, start: p.omega_e - 10.0, stop: p.omega_e + 10.0, count: 201 }
}

pub const DEFAULT_FIELD_SWEEP: Sweep = Sweep { axis: Axis::Omega, start: 0.0, stop: 2.0, count: 101 };
pub const DEFAULT_EIT_SWEEP: Sweep = Sweep { axis: Axis::Omega, start: 0.0, stop: 3.0, count: 121 };

/// Number of oracle samples fitted per field strength in `sweep`.
const FIT_POINTS: usize = 25;
/// Half-width of the fitted window in units of the closed-form width.
const FIT_HALF_WIDTH: f64 = 5.0;

fn oracle_population(p: &ModelParams, omega_l: f64, mode: OracleMode) -> fano_core::Result<Option<f64>> {
    match mode {
        OracleMode::Off => Ok(None),
        OracleMode::Controls(c) => oracle::population(p, omega_l, c).map(Some),
        OracleMode::Converge(tol) => oracle::converge(p, omega_l, tol).map(|c| Some(c.n_c)),
    }
}

/// Lineshape `n_c(ω_L)` from the closed form, the effective kernel and the oracle.
pub fn profile(cfg: &RunConfig, oracle_mode: OracleMode, exec: Execution) -> Result<Table, CliError> {
    let p = cfg.model;
    p.check()?;
    let sweep = cfg.sweep_for(Axis::OmegaL, default_profile_sweep(&p))?;
    let omegas = sweep.points();
    let closed = p.is_discrete_lossless().then(|| profiles::effective_params_population(&p)).transpose()?;
    let kernel = effective::solve_profile(&p, &omegas, exec)?;
    let mode = match oracle_mode {
        OracleMode::Controls(c) => OracleMode::Controls(c.resolve(&p, &omegas)),
        other => other,
    };
    let oracle = exec.try_map(&omegas, |&w| oracle_population(&p, w, mode))?;

    let mut t = Table::new(vec!["omega_L", "epsilon", "n_c_closed", "n_c_effective", "n_c_oracle"]);
    for ((&w, k), o) in omegas.iter().zip(&kernel).zip(oracle) {
        let c = closed.as_ref().map(|ef| profiles::generalized_profile(ef, w));
        t.push(vec![Some(w), Some(p.epsilon(w).value()), c, Some(k.n_c), o]);
    }
    Ok(t)
}

/// Closed-form effective parameters against field strength, with fitted
/// oracle values when the oracle is enabled.
pub fn sweep(cfg: &RunConfig, oracle_mode: OracleMode, exec: Execution) -> Result<Table, CliError> {
    let p = cfg.model;
    p.check()?;
    if !p.is_discrete_lossless() {
        return Err(fano_core::Error::UnsupportedClosedForm { gamma_e: p.gamma_e, gamma_eg: p.gamma_eg }.into());
    }
    let sweep = cfg.sweep_for(Axis::Omega, DEFAULT_FIELD_SWEEP)?;
    if sweep.start < 0.0 {
        return Err(CliError::Config(format!("Omega sweep must start at ≥ 0 (got {})", sweep.start)));
    }
    let fitted = !matches!(oracle_mode, OracleMode::Off);
    let mut columns = vec!["Omega", "gamma_eff", "q_eff_over_q", "omega_eff", "C"];
    if fitted {
        columns.extend(["gamma_eff_fit", "q_eff_over_q_fit", "omega_eff_fit", "C_fit"]);
    }
    let rows = exec.try_map(&sweep.points(), |&om| -> Result<Vec<Option<f64>>, CliError> {
        let pp = ModelParams { omega: om, ..p };
        let ef = profiles::effective_params_population(&pp)?;
        let ratio = pp.gamma_c / (2.0 * om * om + pp.gamma_c) / ef.gamma_eff;
        let mut row = vec![Some(om), Some(ef.gamma_eff), Some(ratio), Some(ef.omega_eff), Some(ef.c)];
        if fitted {
            if om == 0.0 {
                // no lineshape to fit without a field
                row.extend([None; 4]);
            } else {
                let r = fit_oracle_window(&pp, &ef, oracle_mode)?.params;
                let q_ratio = (p.q != 0.0).then(|| r.q_eff / p.q);
                row.extend([Some(r.gamma_eff), q_ratio, Some(r.omega_eff), Some(r.c)]);
            }
        }
        Ok(row)
    })?;
    let mut t = Table::new(columns);
    rows.into_iter().for_each(|r| t.push(r));
    Ok(t)
}

fn fit_oracle_window(p: &ModelParams, ef: &profiles::EffectiveFano, mode: OracleMode) -> Result<FitResult, CliError> {
    let n = FIT_POINTS;
    let omegas: Vec<f64> = (0..n)
        .map(|i| ef.omega_eff + ef.gamma_eff * FIT_HALF_WIDTH * (2.0 * i as f64 / (n - 1) as f64 - 1.0))
        .collect();
    let mode = match mode {
        OracleMode::Controls(c) => OracleMode::Controls(c.resolve(p, &omegas)),
        other => other,
    };
    let values = omegas
        .iter()
        .map(|&w| oracle_population(p, w, mode).map(|v| v.unwrap_or(0.0)))
        .collect::<fano_core::Result<Vec<f64>>>()?;
    let samples = ProfileSamples::new(omegas.into_iter().zip(values).collect(), ProfileKind::Population)?;
    Ok(fit::fit(&samples)?)
}

/// `n_c` against field strength at fixed detunings, with the predicted
/// transparency field in the last column.
pub fn eit(cfg: &RunConfig, oracle_mode: OracleMode, exec: Execution) -> Result<Table, CliError> {
    let p = cfg.model;
    p.check()?;
    let sweep = cfg.sweep_for(Axis::Omega, DEFAULT_EIT_SWEEP)?;
    if sweep.start < 0.0 {
        return Err(CliError::Config(format!("Omega sweep must start at ≥ 0 (got {})", sweep.start)));
    }
    if cfg.eit.epsilon.is_empty() || cfg.eit.gamma_e.is_empty() {
        return Err(CliError::Config("eit.epsilon and eit.Gamma_e need at least one value".into()));
    }
    let mut cases = Vec::new();
    for &eps in &cfg.eit.epsilon {
        for &ge in &cfg.eit.gamma_e {
            for om in sweep.points() {
                cases.push((eps, ge, om));
            }
        }
    }
    let values = exec.try_map(&cases, |&(eps, ge, om)| -> fano_core::Result<f64> {
        let pp = ModelParams { omega: om, gamma_e: ge, ..p };
        pp.check()?;
        let wl = pp.omega_e + eps;
        match oracle_population(&pp, wl, oracle_mode)? {
            Some(v) => Ok(v),
            None => effective::continuum_population(&pp, wl),
        }
    })?;
    let mut t = Table::new(vec!["Omega", "epsilon", "Gamma_e", "n_c", "Omega_eit"]);
    for (&(eps, ge, om), v) in cases.iter().zip(values) {
        let marker = profiles::eit_rabi(eps, p.q).ok().flatten();
        t.push(vec![Some(om), Some(eps), Some(ge), Some(v), marker]);
    }
    Ok(t)
}

pub fn validate(criteria: &[u8], exec: Execution) -> ValidationReport {
    if criteria.is_empty() {
        return validation::run_all(exec);
    }
    let criteria: Vec<_> = criteria.iter().map(|&id| validation::run(id, exec)).collect();
    ValidationReport { all_passed: criteria.iter().all(|c| c.passed), criteria }
}

/// Reads `omega_L,value` samples; errors carry the 1-based line number.
pub fn read_samples(path: &Path, kind: ProfileKind) -> Result<ProfileSamples, CliError> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    let headers = rdr.headers().map_err(|e| CliError::Input(format!("{}: line 1: {e}", path.display())))?.clone();
    if headers.len() != 2 || &headers[0] != "omega_L" || &headers[1] != "value" {
        return Err(CliError::Input(format!(
            "{}: line 1: expected header `omega_L,value`, found `{}`",
            path.display(),
            headers.iter().collect::<Vec<_>>().join(",")
        )));
    }
    let mut points = Vec::new();
    for rec in rdr.records() {
        let rec = rec.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line());
            CliError::Input(format!("{}: line {line}: {e}", path.display()))
        })?;
        let line = rec.position().map_or(0, |p| p.line());
        let field = |i: usize, name: &str| -> Result<f64, CliError> {
            let s = &rec[i];
            s.parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| CliError::Input(format!("{}: line {line}: {name} `{s}` is not a finite number", path.display())))
        };
        points.push((field(0, "omega_L")?, field(1, "value")?));
    }
    ProfileSamples::new(points, kind).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

pub fn fit_file(path: &Path, kind: ProfileKind) -> Result<FitResult, CliError> {
    Ok(fit::fit(&read_samples(path, kind)?)?)
}

pub fn oracle_default() -> OracleMode {
    OracleMode::Controls(OracleControls::Auto)
}
