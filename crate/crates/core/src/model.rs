//! Model parameters, unit conversion and validation.
//!
//! All downstream modules consume [`ModelParams`], which is expressed in units
//! of the radiative width `γ = nπV²/ħ`.

use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Parameters in physical units.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PhysicalParams {
    /// Ground to discrete transition dipole.
    pub mu_e: f64,
    /// Ground to continuum transition dipole (per √energy).
    pub mu_c: f64,
    /// Discrete to continuum coupling (energy per √energy), taken real.
    pub v: f64,
    /// Continuum density of states.
    pub n: f64,
    /// Field amplitude.
    pub f: f64,
    pub e_0: f64,
    pub e_e: f64,
    pub gamma_e_phys: f64,
    pub gamma_c_phys: f64,
    pub gamma_eg_phys: f64,
    pub gamma_kg_phys: f64,
    pub gamma_ke_phys: f64,
    pub hbar: f64,
}

/// Dimensionless model parameters (energies and rates in units of γ).
///
/// The serialized field names are the ones used in configuration files.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelParams {
    /// Fano asymmetry parameter.
    pub q: f64,
    /// Dimensionless Rabi frequency `μ_c F / 2V`.
    #[serde(rename = "Omega")]
    pub omega: f64,
    /// Continuum to ground relaxation rate.
    #[serde(rename = "Gamma_c")]
    pub gamma_c: f64,
    /// Discrete to ground relaxation rate.
    #[serde(rename = "Gamma_e")]
    pub gamma_e: f64,
    /// Pure dephasing of the g-e coherence.
    pub gamma_eg: f64,
    /// Discrete state energy.
    pub omega_e: f64,
    /// Pure dephasing of g-k coherences (oracle only).
    #[serde(default)]
    pub gamma_kg: f64,
    /// Pure dephasing of e-k coherences (oracle only).
    #[serde(default)]
    pub gamma_ke: f64,
}

impl Default for ModelParams {
    fn default() -> Self {
        Self {
            q: 5.0,
            omega: 0.1,
            gamma_c: 1.0,
            gamma_e: 0.0,
            gamma_eg: 0.0,
            omega_e: 10.0,
            gamma_kg: 0.0,
            gamma_ke: 0.0,
        }
    }
}

/// Dimensionless detuning `ε = (ω_L − ω_e)/γ`.
#[derive(Clone, Copy, Debug, PartialEq, PartialOrd, Serialize, Deserialize)]
pub struct Detuning(pub f64);

impl Detuning {
    pub fn value(self) -> f64 {
        self.0
    }
}

/// One broken invariant of [`ModelParams`].
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Violation {
    pub field: &'static str,
    pub value: f64,
    pub rule: &'static str,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {} (got {})", self.field, self.rule, self.value)
    }
}

impl Violation {
    /// Message without the offending value, e.g. `Gamma_c must be > 0`.
    pub fn message(&self) -> String {
        format!("{} {}", self.field, self.rule)
    }
}

pub fn dimensionless_from_physical(p: &PhysicalParams) -> Result<ModelParams> {
    let checks: [(&'static str, f64, bool, &str); 12] = [
        ("n", p.n, p.n > 0.0, "density of states must be > 0"),
        ("v", p.v, p.v != 0.0, "coupling V must be nonzero"),
        ("mu_c", p.mu_c, p.mu_c != 0.0, "continuum dipole must be nonzero"),
        ("hbar", p.hbar, p.hbar > 0.0, "must be > 0"),
        ("f", p.f, p.f >= 0.0, "field amplitude must be >= 0"),
        ("gamma_e_phys", p.gamma_e_phys, p.gamma_e_phys >= 0.0, "rate must be >= 0"),
        ("gamma_c_phys", p.gamma_c_phys, p.gamma_c_phys >= 0.0, "rate must be >= 0"),
        ("gamma_eg_phys", p.gamma_eg_phys, p.gamma_eg_phys >= 0.0, "rate must be >= 0"),
        ("gamma_kg_phys", p.gamma_kg_phys, p.gamma_kg_phys >= 0.0, "rate must be >= 0"),
        ("gamma_ke_phys", p.gamma_ke_phys, p.gamma_ke_phys >= 0.0, "rate must be >= 0"),
        ("mu_e", p.mu_e, p.mu_e.is_finite(), "must be finite"),
        ("e_e", p.e_e - p.e_0, (p.e_e - p.e_0).is_finite(), "energies must be finite"),
    ];
    for (field, value, ok, reason) in checks {
        if !ok || !value.is_finite() {
            return Err(Error::InvalidPhysical {
                field,
                reason: format!("{reason} (got {value})"),
            });
        }
    }

    let gamma = p.n * std::f64::consts::PI * p.v * p.v / p.hbar;
    Ok(ModelParams {
        q: p.mu_e / (p.n * std::f64::consts::PI * p.v * p.mu_c),
        omega: (p.mu_c * p.f / (2.0 * p.v)).abs(),
        gamma_c: p.gamma_c_phys / gamma,
        gamma_e: p.gamma_e_phys / gamma,
        gamma_eg: p.gamma_eg_phys / gamma,
        omega_e: (p.e_e - p.e_0) / (p.hbar * gamma),
        gamma_kg: p.gamma_kg_phys / gamma,
        gamma_ke: p.gamma_ke_phys / gamma,
    })
}

pub fn epsilon_of(params: &ModelParams, omega_l: f64) -> Detuning {
    Detuning(omega_l - params.omega_e)
}

impl ModelParams {
    /// All broken invariants; empty when the parameters are usable everywhere.
    pub fn validate(&self) -> Vec<Violation> {
        let mut out = self.validate_drive();
        if !(self.gamma_c > 0.0) {
            out.push(Violation {
                field: "Gamma_c",
                value: self.gamma_c,
                rule: "must be > 0",
            });
        }
        out
    }

    /// Invariants needed by quantities that do not depend on `Γc`
    /// (the effective Liouvillian and the photocurrent limit).
    pub fn validate_drive(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        let mut nonneg = |field: &'static str, value: f64| {
            if !(value >= 0.0) || !value.is_finite() {
                out.push(Violation { field, value, rule: "must be ≥ 0" });
            }
        };
        nonneg("Omega", self.omega);
        nonneg("Gamma_e", self.gamma_e);
        nonneg("gamma_eg", self.gamma_eg);
        nonneg("gamma_kg", self.gamma_kg);
        nonneg("gamma_ke", self.gamma_ke);
        if !self.gamma_c.is_finite() || self.gamma_c < 0.0 {
            out.push(Violation {
                field: "Gamma_c",
                value: self.gamma_c,
                rule: "must be ≥ 0",
            });
        }
        if !self.q.is_finite() {
            out.push(Violation { field: "q", value: self.q, rule: "must be finite" });
        }
        if !self.omega_e.is_finite() {
            out.push(Violation {
                field: "omega_e",
                value: self.omega_e,
                rule: "must be finite",
            });
        }
        out
    }

    pub fn check(&self) -> Result<()> {
        into_result(self.validate())
    }

    pub fn check_drive(&self) -> Result<()> {
        into_result(self.validate_drive())
    }

    pub fn epsilon(&self, omega_l: f64) -> Detuning {
        epsilon_of(self, omega_l)
    }

    /// Closed forms only exist without discrete-state relaxation and dephasing.
    pub fn is_discrete_lossless(&self) -> bool {
        self.gamma_e == 0.0 && self.gamma_eg == 0.0
    }

    pub fn from_json_str(s: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(s)
    }

    pub fn from_json_file(path: &Path) -> std::io::Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_json_str(&text)
            .map_err(|e| std::io::Error::new(std::io::ErrorKind::InvalidData, e))
    }

    /// Sets a field by its configuration name.
    pub fn set(&mut self, key: &str, value: f64) -> std::result::Result<(), String> {
        let slot = match key {
            "q" => &mut self.q,
            "Omega" => &mut self.omega,
            "Gamma_c" => &mut self.gamma_c,
            "Gamma_e" => &mut self.gamma_e,
            "gamma_eg" => &mut self.gamma_eg,
            "omega_e" => &mut self.omega_e,
            "gamma_kg" => &mut self.gamma_kg,
            "gamma_ke" => &mut self.gamma_ke,
            _ => return Err(format!("unknown model parameter `{key}`")),
        };
        *slot = value;
        Ok(())
    }
}

fn into_result(v: Vec<Violation>) -> Result<()> {
    if v.is_empty() {
        Ok(())
    } else {
        Err(Error::InvalidParams(v))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn unit_physical() -> PhysicalParams {
        PhysicalParams {
            mu_e: 5.0,
            mu_c: 1.0,
            v: 1.0,
            n: 1.0 / std::f64::consts::PI,
            f: 0.0,
            e_0: 0.0,
            e_e: 10.0,
            gamma_e_phys: 0.0,
            gamma_c_phys: 1.0,
            gamma_eg_phys: 0.0,
            gamma_kg_phys: 0.0,
            gamma_ke_phys: 0.0,
            hbar: 1.0,
        }
    }

    #[test]
    fn zero_field_unit_normalization() {
        let m = dimensionless_from_physical(&unit_physical()).unwrap();
        assert_relative_eq!(m.q, 5.0, max_relative = 1e-15);
        assert_eq!(m.omega, 0.0);
        assert_relative_eq!(m.gamma_c, 1.0, max_relative = 1e-15);
        assert_relative_eq!(m.omega_e, 10.0, max_relative = 1e-15);
    }

    #[test]
    fn unit_rabi_frequency() {
        let mut p = unit_physical();
        p.v = 0.7;
        p.f = 3.0;
        p.mu_c = 2.0 * p.v / p.f;
        let m = dimensionless_from_physical(&p).unwrap();
        assert_relative_eq!(m.omega, 1.0, max_relative = 1e-15);
    }

    #[test]
    fn doubling_field_doubles_rabi_only() {
        let mut p = unit_physical();
        p.f = 0.3;
        let a = dimensionless_from_physical(&p).unwrap();
        p.f = 0.6;
        let b = dimensionless_from_physical(&p).unwrap();
        assert_relative_eq!(b.omega, 2.0 * a.omega, max_relative = 1e-15);
        assert_eq!(a.q, b.q);
    }

    #[test]
    fn rejects_degenerate_physical_inputs() {
        for (field, edit) in [
            ("n", (|p: &mut PhysicalParams| p.n = 0.0) as fn(&mut PhysicalParams)),
            ("v", |p| p.v = 0.0),
            ("mu_c", |p| p.mu_c = 0.0),
        ] {
            let mut p = unit_physical();
            edit(&mut p);
            match dimensionless_from_physical(&p) {
                Err(Error::InvalidPhysical { field: f, .. }) => assert_eq!(f, field),
                other => panic!("expected rejection of {field}, got {other:?}"),
            }
        }
    }

    #[test]
    fn detuning_examples() {
        let p = ModelParams { omega_e: 10.0, ..Default::default() };
        assert_eq!(p.epsilon(10.0).value(), 0.0);
        assert_eq!(p.epsilon(11.0).value(), 1.0);
        let p = ModelParams { omega_e: 0.0, ..Default::default() };
        assert_eq!(p.epsilon(-3.0).value(), -3.0);
    }

    #[test]
    fn validation_messages() {
        let ok = ModelParams { gamma_c: 1.0, omega: 0.1, ..Default::default() };
        assert!(ok.validate().is_empty());

        let v = ModelParams { gamma_c: 0.0, ..Default::default() }.validate();
        assert_eq!(v.iter().map(Violation::message).collect::<Vec<_>>(), ["Gamma_c must be > 0"]);

        let v = ModelParams { omega: -1.0, ..Default::default() }.validate();
        assert_eq!(v.iter().map(Violation::message).collect::<Vec<_>>(), ["Omega must be ≥ 0"]);
    }

    #[test]
    fn drive_validation_allows_zero_gamma_c() {
        let p = ModelParams { gamma_c: 0.0, ..Default::default() };
        assert!(p.validate_drive().is_empty());
        assert!(p.check().is_err());
    }

    #[test]
    fn json_config_names_and_unknown_keys() {
        let p = ModelParams::from_json_str(
            r#"{"q": 15, "Omega": 1, "Gamma_c": 1, "Gamma_e": 0.1, "gamma_eg": 0, "omega_e": 10}"#,
        )
        .unwrap();
        assert_eq!(p.q, 15.0);
        assert_eq!(p.gamma_e, 0.1);
        assert_eq!(p.gamma_kg, 0.0);

        let err = ModelParams::from_json_str(
            r#"{"q": 1, "Omega": 1, "Gamma_c": 1, "Gamma_e": 0, "gamma_eg": 0, "omega_e": 0, "bogus": 1}"#,
        );
        assert!(err.is_err());
        let err = ModelParams::from_json_str(
            r#"{"q": "1", "Omega": 1, "Gamma_c": 1, "Gamma_e": 0, "gamma_eg": 0, "omega_e": 0}"#,
        );
        assert!(err.is_err());
    }

    proptest! {
        #[test]
        fn coupling_rescaling_is_invisible(s in 0.05f64..20.0, v in 0.1f64..3.0, f in 0.0f64..4.0) {
            let mut p = unit_physical();
            p.v = v;
            p.f = f;
            p.gamma_e_phys = 0.3;
            let a = dimensionless_from_physical(&p).unwrap();
            p.v *= s;
            p.n /= s * s;
            p.mu_c *= s;
            let b = dimensionless_from_physical(&p).unwrap();
            for (x, y) in [(a.q, b.q), (a.omega, b.omega), (a.gamma_c, b.gamma_c),
                           (a.gamma_e, b.gamma_e), (a.omega_e, b.omega_e)] {
                prop_assert!((x - y).abs() <= 1e-13 * x.abs().max(1e-300));
            }
        }

        #[test]
        fn detuning_is_unit_slope(we in -50.0f64..50.0, wl in -50.0f64..50.0, d in -5.0f64..5.0) {
            let p = ModelParams { omega_e: we, ..Default::default() };
            let a = p.epsilon(wl).value();
            let b = p.epsilon(wl + d).value();
            prop_assert!((b - a - d).abs() <= 1e-12);
        }
    }
}
