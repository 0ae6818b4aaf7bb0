//! Closed-form lineshapes and effective Fano parameters.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::ModelParams;

/// Parameters of the generalized profile
/// `C·[f(ε; q) + D/(ε²+1)]` with `ε = (ω − ω_eff)/γ_eff`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EffectiveFano {
    #[serde(rename = "C")]
    pub c: f64,
    #[serde(rename = "D")]
    pub d: f64,
    pub q_eff: f64,
    pub gamma_eff: f64,
    pub omega_eff: f64,
}

impl EffectiveFano {
    pub fn epsilon_eff(&self, omega_l: f64) -> f64 {
        (omega_l - self.omega_eff) / self.gamma_eff
    }

    pub fn is_valid(&self) -> bool {
        self.gamma_eff > 0.0
            && self.c >= 0.0
            && self.d >= 0.0
            && [self.c, self.d, self.q_eff, self.gamma_eff, self.omega_eff].iter().all(|x| x.is_finite())
    }

    /// Location and height of the profile maximum, if it is attained at a
    /// finite frequency.
    pub fn peak(&self) -> Option<(f64, f64)> {
        let q = self.q_eff;
        let b = q * q + self.d - 1.0;
        let e = if q != 0.0 {
            (-b + (b * b + 4.0 * q * q).sqrt()) / (2.0 * q)
        } else if b > 0.0 {
            0.0
        } else {
            return None;
        };
        let w = self.omega_eff + e * self.gamma_eff;
        Some((w, generalized_profile(self, w)))
    }

    /// Frequency of the exact zero (only present without a Lorentzian term).
    pub fn zero(&self) -> Option<f64> {
        (self.d == 0.0).then_some(self.omega_eff - self.q_eff * self.gamma_eff)
    }
}

/// Classic Fano profile `(q+ε)²/(ε²+1)`.
pub fn fano(eps: f64, q: f64) -> f64 {
    (q + eps).powi(2) / (eps * eps + 1.0)
}

pub fn generalized_profile(ef: &EffectiveFano, omega_l: f64) -> f64 {
    let e = ef.epsilon_eff(omega_l);
    ef.c * (fano(e, ef.q_eff) + ef.d / (e * e + 1.0))
}

/// Effective parameters of the continuum-population profile.
///
/// Only defined without discrete-state relaxation and dephasing; in the
/// general case fit an oracle profile instead.
pub fn effective_params_population(params: &ModelParams) -> Result<EffectiveFano> {
    params.check()?;
    if !params.is_discrete_lossless() {
        return Err(Error::UnsupportedClosedForm { gamma_e: params.gamma_e, gamma_eg: params.gamma_eg });
    }
    let (q, gc) = (params.q, params.gamma_c);
    let o2 = params.omega * params.omega;
    let den = 2.0 * o2 + gc;
    let inner = 1.0 + (q * q + 1.0) * o2 * (o2 * ((2.0 * o2 + 4.0) / gc + 1.0) + 2.0 / gc + 2.0);
    let gamma_eff = gc * inner.sqrt() / den;
    Ok(EffectiveFano {
        c: 2.0 * o2 / den,
        d: 0.0,
        q_eff: q * (gc / den) / gamma_eff,
        gamma_eff,
        omega_eff: params.omega_e + q * o2 * (1.0 - 2.0 / den),
    })
}

/// Photocurrent parameters with `Γe` and the asymmetry numerator passed
/// explicitly. `γ_eg` enters unchanged.
fn transport_params(params: &ModelParams, ge: f64, q_num: f64) -> EffectiveFano {
    let q2 = params.q * params.q;
    let geg = params.gamma_eg;
    let o2 = params.omega * params.omega;
    let o4 = o2 * o2;
    let a = 1.0 + ge;
    let s = ge + geg + 1.0;
    let width2 = (o4 * ge * (q2 + ge + 1.0) + o2 * a * (q2 + 2.0 * ge + 1.0) * s + a * a * s * s) / (a * a);
    let lorentz = (o4 * ge * (q2 + ge + 1.0) + o2 * a * (q2 + 2.0 * ge + 1.0) * (ge + geg)) / (a * a)
        + (ge.powi(3) + ge * ge + geg * (2.0 * ge * ge + ge * geg + q2 + 2.0 * ge + geg + 1.0)) / a;
    EffectiveFano {
        c: 2.0 * o2,
        d: lorentz / width2,
        q_eff: q_num / width2.sqrt(),
        gamma_eff: width2.sqrt(),
        omega_eff: params.omega_e + params.q * o2 / a,
    }
}

/// Transport parameters with `Γe` entering as given and `q_eff = 1/γ_eff`.
pub fn effective_params_photocurrent(params: &ModelParams) -> Result<EffectiveFano> {
    params.check_drive()?;
    Ok(transport_params(params, params.gamma_e, 1.0))
}

/// Transport parameters with `Γe → Γe/2` and `q_eff = q/γ_eff`. These
/// reproduce the kernel photocurrent exactly.
pub fn photocurrent_params(params: &ModelParams) -> Result<EffectiveFano> {
    params.check_drive()?;
    Ok(transport_params(params, 0.5 * params.gamma_e, params.q))
}

/// Photocurrent `I/(|e|γ)` at laser frequency `omega_l` in the Γc → 0 limit.
pub fn photocurrent(params: &ModelParams, omega_l: f64) -> Result<f64> {
    Ok(generalized_profile(&photocurrent_params(params)?, omega_l))
}

/// Rabi frequency at which the profile has its induced-transparency zero at
/// detuning `eps`: `Ω² = 1 + ε/q`.
pub fn eit_rabi(eps: f64, q: f64) -> Result<Option<f64>> {
    if q == 0.0 {
        return Err(Error::ZeroAsymmetry);
    }
    let r = 1.0 + eps / q;
    Ok((r >= 0.0).then(|| r.sqrt()))
}

/// Rabi frequency where the AC Stark shift changes sign, if any.
pub fn stark_null(gamma_c: f64) -> Option<f64> {
    (gamma_c < 2.0).then(|| ((2.0 - gamma_c) / 2.0).sqrt())
}
