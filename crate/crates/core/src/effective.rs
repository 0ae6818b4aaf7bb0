//! The effective Liouvillian on the discrete `{g, e}` block.
//!
//! Eliminating the continuum leaves a 4×4 generator acting on
//! `v = (ρ_gg, ρ_ge, ρ_eg, ρ_ee)`. Its kernel is the discrete part of the full
//! steady state; the continuum population follows from a linear readout of it.

use num_complex::Complex64 as C64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::linalg::{self, ComplexMatrix, DEFAULT_NULLSPACE_TOL};
use crate::model::{Detuning, ModelParams};

pub const GG: usize = 0;
pub const GE: usize = 1;
pub const EG: usize = 2;
pub const EE: usize = 3;

const PSD_TOL: f64 = 1e-12;

/// Discrete 2×2 block of the density matrix. `ρ_eg` is `conj(ρ_ge)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct DiscreteBlock {
    pub rho_gg: f64,
    pub rho_ee: f64,
    pub rho_ge: C64,
}

impl DiscreteBlock {
    pub fn rho_eg(&self) -> C64 {
        self.rho_ge.conj()
    }

    pub fn trace(&self) -> f64 {
        self.rho_gg + self.rho_ee
    }

    pub fn det(&self) -> f64 {
        self.rho_gg * self.rho_ee - self.rho_ge.norm_sqr()
    }

    pub fn is_psd(&self, tol: f64) -> bool {
        self.rho_gg >= -tol && self.rho_ee >= -tol && self.det() >= -tol
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self { rho_gg: s * self.rho_gg, rho_ee: s * self.rho_ee, rho_ge: s * self.rho_ge }
    }

    pub fn as_vec(&self) -> [C64; 4] {
        [C64::new(self.rho_gg, 0.0), self.rho_ge, self.rho_eg(), C64::new(self.rho_ee, 0.0)]
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SteadyState {
    pub block: DiscreteBlock,
    pub n_c: f64,
}

impl SteadyState {
    pub fn total(&self) -> f64 {
        self.block.trace() + self.n_c
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct LindbladCheck {
    pub c1: f64,
    pub c2: f64,
    pub c3: f64,
    #[serde(skip)]
    pub c_matrix: ComplexMatrix,
    /// Direct spectrum of `c_matrix`, ascending.
    pub eigenvalues: Vec<f64>,
    pub is_psd: bool,
    /// `2(Γe Ω² + (1+Γe) γ_eg)`, the product of the two nonzero eigenvalues.
    pub nonzero_product: f64,
    /// The closed-form pair `c±`; `None` where its radicand is negative.
    pub closed_form_eigenvalues: Option<(f64, f64)>,
}

/// Generator of `dv/dt` for `v = (ρ_gg, ρ_ge, ρ_eg, ρ_ee)` in the frame
/// rotating at the laser frequency.
pub fn build_effective_liouvillian(params: &ModelParams, eps: Detuning) -> ComplexMatrix {
    let q = params.q;
    let om = params.omega;
    let e = eps.value();
    let relax = 2.0 + params.gamma_e;
    let dephase = 0.5 * relax + params.gamma_eg + om * om;
    let i = C64::i();
    let z = C64::new(0.0, 0.0);
    let re = |x: f64| C64::new(x, 0.0);

    let pop_ge = i * q * om + om;
    let pop_eg = -i * q * om + om;
    let mut l = ComplexMatrix::zeros(4, 4);

    l[(GG, GE)] = pop_ge;
    l[(GG, EG)] = pop_eg;
    l[(GG, EE)] = re(relax);
    l[(EE, GE)] = -pop_ge;
    l[(EE, EG)] = -pop_eg;
    l[(EE, EE)] = re(-relax);

    l[(GE, GG)] = i * C64::new(q, 1.0) * om;
    l[(GE, GE)] = -i * e - dephase;
    l[(GE, EE)] = -i * C64::new(q, -1.0) * om;
    l[(EG, GG)] = l[(GE, GG)].conj();
    l[(EG, EG)] = l[(GE, GE)].conj();
    l[(EG, EE)] = l[(GE, EE)].conj();

    debug_assert!((0..4).all(|j| l[(GG, j)] + l[(EE, j)] == z));
    l
}

/// Kernel of the effective generator, normalized to unit discrete trace.
pub fn discrete_steady_state(l_eff: &ComplexMatrix) -> Result<DiscreteBlock> {
    if l_eff.rows() != 4 || l_eff.cols() != 4 {
        return Err(Error::Dimension(format!(
            "effective generator must be 4x4, got {}x{}",
            l_eff.rows(),
            l_eff.cols()
        )));
    }
    let ns = linalg::nullspace(l_eff, DEFAULT_NULLSPACE_TOL)?;
    if ns.dim() != 1 {
        return Err(Error::DegenerateSteadyState { kernel_dim: ns.dim() });
    }
    let v = &ns.basis[0];
    let tr = v[GG] + v[EE];
    if tr.norm() == 0.0 {
        return Err(Error::DegenerateSteadyState { kernel_dim: 1 });
    }
    let v: Vec<C64> = v.iter().map(|x| x / tr).collect();
    let block = DiscreteBlock {
        rho_gg: v[GG].re,
        rho_ee: v[EE].re,
        rho_ge: 0.5 * (v[GE] + v[EG].conj()),
    };
    if !block.is_psd(PSD_TOL) {
        return Err(Error::Decomposition(format!("kernel is not a positive block: {block:?}")));
    }
    Ok(block)
}

/// Stationary flux from the discrete block into the continuum,
/// `Φ = 2ρ_ee + 2Ω²ρ_gg + 4Ω Re ρ_eg`.
pub fn readout_flux(params: &ModelParams, block: &DiscreteBlock) -> Result<f64> {
    let om = params.omega;
    let terms = [2.0 * block.rho_ee, 2.0 * om * om * block.rho_gg, 4.0 * om * block.rho_eg().re];
    let phi: f64 = terms.iter().sum();
    let scale: f64 = terms.iter().map(|t| t.abs()).sum();
    if phi < -1e-10 * scale.max(f64::MIN_POSITIVE) {
        return Err(Error::NegativeReadout(phi));
    }
    Ok(phi.max(0.0))
}

/// Unnormalized continuum population `Φ/Γc`.
pub fn continuum_readout(params: &ModelParams, block: &DiscreteBlock) -> Result<f64> {
    if !(params.gamma_c > 0.0) {
        return Err(Error::InvalidParams(params.validate()));
    }
    Ok(readout_flux(params, block)? / params.gamma_c)
}

/// Rescales a unit-discrete-trace block so that `ρ_gg + ρ_ee + n_c = 1`.
pub fn normalize(block: &DiscreteBlock, n_c_unnormalized: f64) -> SteadyState {
    let s = 1.0 / (1.0 + n_c_unnormalized);
    SteadyState { block: block.scaled(s), n_c: n_c_unnormalized * s }
}

pub fn solve(params: &ModelParams, eps: Detuning) -> Result<SteadyState> {
    params.check()?;
    let block = discrete_steady_state(&build_effective_liouvillian(params, eps))?;
    let n = continuum_readout(params, &block)?;
    Ok(normalize(&block, n))
}

/// Normalized continuum population at laser frequency `omega_l`.
pub fn continuum_population(params: &ModelParams, omega_l: f64) -> Result<f64> {
    solve(params, params.epsilon(omega_l)).map(|s| s.n_c)
}

/// `I = Φ/ρ_gg`, the Γc → 0 photocurrent in units of `|e|γ`.
pub fn photocurrent_from_kernel(params: &ModelParams, eps: Detuning) -> Result<f64> {
    params.check_drive()?;
    let block = discrete_steady_state(&build_effective_liouvillian(params, eps))?;
    Ok(readout_flux(params, &block)? / block.rho_gg)
}

pub fn solve_profile(params: &ModelParams, omegas: &[f64], exec: Execution) -> Result<Vec<SteadyState>> {
    params.check()?;
    exec.try_map(omegas, |&w| solve(params, params.epsilon(w)))
}

/// Positivity check of the dissipator's coefficient matrix.
pub fn lindblad_check(params: &ModelParams) -> LindbladCheck {
    let om = params.omega;
    let c1 = om * om + params.gamma_eg;
    let c2 = om;
    let c3 = 1.0 + params.gamma_e;
    let i = C64::i();
    let re = |x: f64| C64::new(x, 0.0);
    let c_matrix = ComplexMatrix::new(
        3,
        3,
        vec![
            re(c3), i * c3, re(c2),
            -i * c3, re(c3), -i * c2,
            re(c2), i * c2, re(c1),
        ],
    )
    .expect("finite parameters give a finite matrix");
    let eigenvalues = linalg::hermitian_eigenvalues(&c_matrix).expect("matrix is Hermitian by construction");
    let is_psd = eigenvalues.first().is_none_or(|&l| l >= -PSD_TOL);

    let (ge, geg) = (params.gamma_e, params.gamma_eg);
    let rad = (om * om - 2.0 * ge + geg - 2.0).powi(2) - 8.0 * om * om;
    let mid = om * om + 2.0 * ge + geg + 2.0;
    let closed_form_eigenvalues = (rad >= 0.0).then(|| (0.5 * (mid + rad.sqrt()), 0.5 * (mid - rad.sqrt())));

    LindbladCheck {
        c1,
        c2,
        c3,
        c_matrix,
        eigenvalues,
        is_psd,
        nonzero_product: 2.0 * (ge * om * om + (1.0 + ge) * geg),
        closed_form_eigenvalues,
    }
}
