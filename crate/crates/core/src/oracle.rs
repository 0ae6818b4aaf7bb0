//! Brute-force reference: the continuum replaced by `N` discrete levels and
//! the full Lindblad steady state solved exactly.
//!
//! Two solvers are provided. [`build_full_liouvillian`] + [`steady_state`]
//! assemble the dense `(N+2)²` superoperator and are limited to small grids.
//! [`solve`] eliminates the continuum–continuum coherences exactly (their
//! equations are diagonal), which leaves a real linear system of size `2N`
//! and makes grids of a few thousand levels practical. Both produce the same
//! state to rounding.

use num_complex::Complex64 as C64;
use serde::Serialize;

use crate::effective::DiscreteBlock;
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::linalg::{self, ComplexMatrix};
use crate::model::ModelParams;

/// Largest grid accepted by [`solve`].
pub const MAX_STATES: usize = 4096;
/// Largest grid accepted by the dense superoperator path.
pub const MAX_DENSE_STATES: usize = 32;
/// Minimum band half-width, in units of γ.
pub const MIN_HALF_WIDTH: f64 = 10.0;
/// Minimum number of levels per unit γ.
pub const MIN_DENSITY: f64 = 5.0;
/// Edge population (relative to `n_c`) above which [`converge`] widens the band.
pub const EDGE_THRESHOLD: f64 = 1e-6;
pub const MAX_DOUBLINGS: usize = 6;

const G: usize = 0;
const E: usize = 1;

/// Continuum surrogate: `N` equally spaced levels with constant couplings.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DiscretizedModel {
    pub params: ModelParams,
    /// Level energies.
    pub energies: Vec<f64>,
    pub spacing: f64,
    /// Discrete–continuum coupling per level, `√(Δ/π)`.
    pub coupling: f64,
    /// Ground–continuum field coupling per level, `Ω√(Δ/π)`.
    pub field_coupling: f64,
    pub half_width: f64,
}

impl DiscretizedModel {
    pub fn n(&self) -> usize {
        self.energies.len()
    }

    /// Levels per unit γ.
    pub fn density(&self) -> f64 {
        self.n() as f64 / (2.0 * self.half_width)
    }

    /// The same grid displaced by half a spacing.
    pub fn shifted_half_step(&self) -> Self {
        let mut out = self.clone();
        for e in &mut out.energies {
            *e += 0.5 * self.spacing;
        }
        out
    }
}

/// Uniform grid over `[ω_e − W, ω_e + W]` obeying the resolution floor.
pub fn discretize(params: &ModelParams, n: usize, half_width: f64) -> Result<DiscretizedModel> {
    if n > MAX_STATES {
        return Err(Error::GridTooLarge { n, max: MAX_STATES });
    }
    if !(half_width >= MIN_HALF_WIDTH) {
        return Err(Error::ResolutionFloor(format!("half-width {half_width} < {MIN_HALF_WIDTH}")));
    }
    let density = n as f64 / (2.0 * half_width);
    if density < MIN_DENSITY {
        return Err(Error::ResolutionFloor(format!(
            "{n} levels over [-{half_width}, {half_width}] is {density:.3} per unit width, need {MIN_DENSITY}"
        )));
    }
    discretize_unchecked(params, n, half_width)
}

/// [`discretize`] without the resolution floor, for small hand-checkable
/// models. `n ≥ 2` and `half_width > 0` are still required.
pub fn discretize_unchecked(params: &ModelParams, n: usize, half_width: f64) -> Result<DiscretizedModel> {
    params.check()?;
    if n < 2 || !(half_width > 0.0) || !half_width.is_finite() {
        return Err(Error::ResolutionFloor(format!("need N ≥ 2 and W > 0, got N={n}, W={half_width}")));
    }
    let spacing = 2.0 * half_width / (n - 1) as f64;
    let energies = (0..n).map(|i| params.omega_e - half_width + i as f64 * spacing).collect();
    let coupling = (spacing / std::f64::consts::PI).sqrt();
    Ok(DiscretizedModel {
        params: *params,
        energies,
        spacing,
        coupling,
        field_coupling: params.omega * coupling,
        half_width,
    })
}

/// Hamiltonian in the frame rotating at `omega_l`; basis `(g, e, k_1..k_N)`.
fn rotating_hamiltonian(dm: &DiscretizedModel, omega_l: f64) -> ComplexMatrix {
    let d = dm.n() + 2;
    let p = &dm.params;
    let mut h = ComplexMatrix::zeros(d, d);
    let r = |x: f64| C64::new(x, 0.0);
    h[(E, E)] = r(p.omega_e - omega_l);
    h[(G, E)] = r(p.q * p.omega);
    h[(E, G)] = r(p.q * p.omega);
    for (i, &ek) in dm.energies.iter().enumerate() {
        let k = i + 2;
        h[(k, k)] = r(ek - omega_l);
        h[(E, k)] = r(dm.coupling);
        h[(k, E)] = r(dm.coupling);
        h[(G, k)] = r(dm.field_coupling);
        h[(k, G)] = r(dm.field_coupling);
    }
    h
}

/// Dense generator over row-major `vec(ρ)`, `(N+2)²` components.
pub fn build_full_liouvillian(dm: &DiscretizedModel, omega_l: f64) -> Result<ComplexMatrix> {
    if dm.n() > MAX_DENSE_STATES {
        return Err(Error::GridTooLarge { n: dm.n(), max: MAX_DENSE_STATES });
    }
    let d = dm.n() + 2;
    let p = &dm.params;
    let h = rotating_hamiltonian(dm, omega_l);
    let mut l = ComplexMatrix::zeros(d * d, d * d);
    let i = C64::i();
    let idx = |a: usize, b: usize| a * d + b;

    for a in 0..d {
        for b in 0..d {
            for k in 0..d {
                if h[(a, k)] != C64::new(0.0, 0.0) {
                    l[(idx(a, b), idx(k, b))] -= i * h[(a, k)];
                }
                if h[(k, b)] != C64::new(0.0, 0.0) {
                    l[(idx(a, b), idx(a, k))] += i * h[(k, b)];
                }
            }
        }
    }

    // jump |g⟩⟨s| at rate r
    let mut jump = |s: usize, r: f64| {
        if r == 0.0 {
            return;
        }
        l[(idx(G, G), idx(s, s))] += r;
        for b in 0..d {
            l[(idx(s, b), idx(s, b))] -= 0.5 * r;
            l[(idx(b, s), idx(b, s))] -= 0.5 * r;
        }
    };
    jump(E, p.gamma_e);
    for k in 2..d {
        jump(k, p.gamma_c);
    }

    let mut dephase = |a: usize, b: usize, r: f64| {
        l[(idx(a, b), idx(a, b))] -= r;
        l[(idx(b, a), idx(b, a))] -= r;
    };
    dephase(G, E, p.gamma_eg);
    for k in 2..d {
        dephase(G, k, p.gamma_kg);
        dephase(E, k, p.gamma_ke);
    }
    Ok(l)
}

#[derive(Clone, Debug)]
enum Coherences {
    Dense(ComplexMatrix),
    /// `ρ_kk'` is recomputed on demand from `c_k = w ρ_gk + V ρ_ek`.
    Reduced { energies: Vec<f64>, gamma_c: f64, c: Vec<C64> },
}

/// Exact steady state of the discretized model.
#[derive(Clone, Debug)]
pub struct FullSteadyState {
    /// Discrete block, normalized together with the continuum (`tr ρ = 1`).
    pub block: DiscreteBlock,
    pub n_c: f64,
    /// Continuum populations `ρ_kk`.
    pub populations: Vec<f64>,
    pub rho_gk: Vec<C64>,
    pub rho_ek: Vec<C64>,
    coherences: Coherences,
}

impl FullSteadyState {
    pub fn trace(&self) -> f64 {
        self.block.trace() + self.n_c
    }

    /// Discrete block renormalized to unit discrete trace.
    pub fn discrete_block(&self) -> DiscreteBlock {
        self.block.scaled(1.0 / self.block.trace())
    }

    /// Population of the two outermost levels.
    pub fn edge_population(&self) -> f64 {
        match self.populations.as_slice() {
            [] => 0.0,
            [x] => *x,
            [first, .., last] => first + last,
        }
    }

    /// Full `(N+2)×(N+2)` density matrix, basis `(g, e, k_1..k_N)`.
    pub fn density_matrix(&self) -> ComplexMatrix {
        if let Coherences::Dense(rho) = &self.coherences {
            return rho.clone();
        }
        let Coherences::Reduced { energies, gamma_c, c } = &self.coherences else { unreachable!() };
        let n = energies.len();
        let d = n + 2;
        let mut rho = ComplexMatrix::zeros(d, d);
        rho[(G, G)] = C64::new(self.block.rho_gg, 0.0);
        rho[(E, E)] = C64::new(self.block.rho_ee, 0.0);
        rho[(G, E)] = self.block.rho_ge;
        rho[(E, G)] = self.block.rho_eg();
        for k in 0..n {
            rho[(G, k + 2)] = self.rho_gk[k];
            rho[(k + 2, G)] = self.rho_gk[k].conj();
            rho[(E, k + 2)] = self.rho_ek[k];
            rho[(k + 2, E)] = self.rho_ek[k].conj();
            for kp in 0..n {
                let den = C64::new(*gamma_c, energies[k] - energies[kp]);
                rho[(k + 2, kp + 2)] = -C64::i() * (c[kp] - c[k].conj()) / den;
            }
        }
        rho
    }

    /// Checks unit trace, positivity of the discrete block and of the
    /// continuum populations.
    pub fn check_invariants(&self, tol: f64) -> std::result::Result<(), String> {
        if (self.trace() - 1.0).abs() > tol {
            return Err(format!("trace {} differs from 1", self.trace()));
        }
        if !(self.n_c >= -tol && self.n_c <= 1.0 + tol) {
            return Err(format!("n_c = {} outside [0, 1]", self.n_c));
        }
        if !self.block.is_psd(tol) {
            return Err(format!("discrete block not positive: {:?}", self.block));
        }
        if let Some(x) = self.populations.iter().find(|&&x| x < -tol) {
            return Err(format!("negative continuum population {x}"));
        }
        Ok(())
    }
}

/// Unit-trace kernel of a dense superoperator built by [`build_full_liouvillian`].
pub fn steady_state(superop: &ComplexMatrix) -> Result<FullSteadyState> {
    let dim = superop.rows();
    let d = (dim as f64).sqrt().round() as usize;
    if d * d != dim || d < 2 {
        return Err(Error::Dimension(format!("superoperator dimension {dim} is not a square ≥ 4")));
    }
    let diag: Vec<usize> = (0..d).map(|a| a * d + a).collect();
    let x = linalg::solve_with_trace_constraint(superop, &diag, 1.0)?;
    let rho = ComplexMatrix::from_fn(d, d, |a, b| {
        // average with the adjoint entry to remove rounding asymmetry
        0.5 * (x[a * d + b] + x[b * d + a].conj())
    });
    let n = d - 2;
    let populations: Vec<f64> = (0..n).map(|k| rho[(k + 2, k + 2)].re).collect();
    Ok(FullSteadyState {
        block: DiscreteBlock { rho_gg: rho[(G, G)].re, rho_ee: rho[(E, E)].re, rho_ge: rho[(G, E)] },
        n_c: populations.iter().sum(),
        rho_gk: (0..n).map(|k| rho[(G, k + 2)]).collect(),
        rho_ek: (0..n).map(|k| rho[(E, k + 2)]).collect(),
        populations,
        coherences: Coherences::Dense(rho),
    })
}

/// Dense reference solve, for small grids.
pub fn solve_dense(dm: &DiscretizedModel, omega_l: f64) -> Result<FullSteadyState> {
    steady_state(&build_full_liouvillian(dm, omega_l)?)
}

/// Steady state by exact elimination of the continuum–continuum block.
///
/// With `c_k = w ρ_gk + V ρ_ek` the stationary `ρ_kk'` are explicit in `c`.
/// Each `(ρ_gk, ρ_ek)` pair then obeys a 2×2 system driven by the discrete
/// block and by `Σ_k' ρ_k'k`, which closes into one real `2N` system for `c`
/// per discrete basis element. The four discrete unknowns are fixed last by
/// their own equations and the trace condition.
pub fn solve(dm: &DiscretizedModel, omega_l: f64) -> Result<FullSteadyState> {
    let n = dm.n();
    if n > MAX_STATES {
        return Err(Error::GridTooLarge { n, max: MAX_STATES });
    }
    let p = &dm.params;
    let (w, v) = (dm.field_coupling, dm.coupling);
    let pq = p.q * p.omega;
    let gc = p.gamma_c;
    let delta = p.omega_e - omega_l;
    let r_ge = 0.5 * p.gamma_e + p.gamma_eg;
    let r_gk = 0.5 * gc + p.gamma_kg;
    let r_ek = 0.5 * (p.gamma_e + gc) + p.gamma_ke;
    let i = C64::i();
    let zero = C64::new(0.0, 0.0);

    // K[k][k'] = 1/(i(E_k' − E_k) + Γc), Toeplitz on the uniform grid.
    let kern: Vec<C64> = (0..2 * n - 1)
        .map(|m| {
            let off = m as f64 - (n - 1) as f64;
            1.0 / C64::new(gc, off * dm.spacing)
        })
        .collect();
    let kk = |k: usize, kp: usize| kern[kp + n - 1 - k];
    let s: Vec<C64> = (0..n).map(|k| (0..n).map(|kp| kk(k, kp)).sum()).collect();
    let k_conj = |c: &[C64], k: usize| -> C64 { (0..n).map(|kp| kk(k, kp) * c[kp].conj()).sum() };

    // discrete basis (gg, ee, Re ρ_ge, Im ρ_ge) as (ρ_gg, ρ_ee, ρ_ge, ρ_eg)
    let basis: [[C64; 4]; 4] = [
        [C64::new(1.0, 0.0), zero, zero, zero],
        [zero, C64::new(1.0, 0.0), zero, zero],
        [zero, zero, C64::new(1.0, 0.0), C64::new(1.0, 0.0)],
        [zero, zero, i, -i],
    ];
    let drive = |j: usize| -> [C64; 2] {
        let [gg, ee, ge, eg] = basis[j];
        [w * gg + v * ge, w * eg + v * ee]
    };

    let minv: Vec<[[C64; 2]; 2]> = dm
        .energies
        .iter()
        .map(|&ek| {
            let x = ek - omega_l;
            let m = [[i * x - r_gk, -i * pq], [-i * pq, -i * (delta - x) - r_ek]];
            let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
            [[m[1][1] / det, -m[0][1] / det], [-m[1][0] / det, m[0][0] / det]]
        })
        .collect();
    let apply = |mi: &[[C64; 2]; 2], r: [C64; 2]| -> [C64; 2] {
        [mi[0][0] * r[0] + mi[0][1] * r[1], mi[1][0] * r[0] + mi[1][1] * r[1]]
    };
    let wv = |z: [C64; 2]| w * z[0] + v * z[1];

    let alpha: Vec<C64> = minv.iter().map(|mi| wv(apply(mi, [C64::new(w, 0.0), C64::new(v, 0.0)]))).collect();
    let mut rhs = vec![0.0; 2 * n * 4];
    for k in 0..n {
        for j in 0..4 {
            let beta = i * wv(apply(&minv[k], drive(j)));
            rhs[k * 4 + j] = -beta.re;
            rhs[(n + k) * 4 + j] = -beta.im;
        }
    }

    // (1 − α_k s_k) c_k + α_k (K c̄)_k = −β_k, split into real and imaginary parts.
    let diag: Vec<C64> = (0..n).map(|k| 1.0 - alpha[k] * s[k]).collect();
    let entry = |row: usize, col: usize| -> f64 {
        let (k, imag_row) = if row < n { (row, false) } else { (row - n, true) };
        let (kp, imag_col) = if col < n { (col, false) } else { (col - n, true) };
        let a1 = if k == kp { diag[k] } else { zero };
        let a2 = alpha[k] * kk(k, kp);
        let z = if imag_col { i * (a1 - a2) } else { a1 + a2 };
        if imag_row {
            z.im
        } else {
            z.re
        }
    };
    let sol = linalg::solve_real_with(2 * n, entry, &rhs, 4)?;
    let gmat: Vec<[C64; 4]> = (0..n)
        .map(|k| std::array::from_fn(|j| C64::new(sol[k * 4 + j], sol[(n + k) * 4 + j])))
        .collect();

    // per-basis continuum amplitudes
    let mut a = vec![[zero; 4]; n];
    let mut b = vec![[zero; 4]; n];
    let mut nc = [0.0; 4];
    for j in 0..4 {
        let cj: Vec<C64> = gmat.iter().map(|g| g[j]).collect();
        for k in 0..n {
            let u = -i * (cj[k] * s[k] - k_conj(&cj, k));
            let d = drive(j);
            let ab = apply(&minv[k], [i * u * w - i * d[0], i * u * v - i * d[1]]);
            a[k][j] = ab[0];
            b[k][j] = ab[1];
            nc[j] += 2.0 * cj[k].im / gc;
        }
    }

    let mut sys = [0.0; 16];
    for j in 0..4 {
        let [gg, ee, ge, eg] = basis[j];
        let sa: C64 = a.iter().map(|x| x[j]).sum();
        let sb: C64 = b.iter().map(|x| x[j]).sum();
        let dgg = -i * (pq * (eg - ge) + w * (sa.conj() - sa)) + p.gamma_e * ee + gc * nc[j];
        let dge = -i * (pq * ee - pq * gg - delta * ge + w * sb.conj() - v * sa) - r_ge * ge;
        sys[j] = dgg.re;
        sys[4 + j] = [1.0, 1.0, 0.0, 0.0][j] + nc[j];
        sys[8 + j] = dge.re;
        sys[12 + j] = dge.im;
    }
    let xd = linalg::solve_real(&sys, 4, &[0.0, 1.0, 0.0, 0.0], 1)?;

    let combine = |m: &[C64; 4]| -> C64 { (0..4).map(|j| m[j] * xd[j]).sum() };
    let c: Vec<C64> = gmat.iter().map(combine).collect();
    let rho_gk: Vec<C64> = a.iter().map(combine).collect();
    let rho_ek: Vec<C64> = b.iter().map(combine).collect();
    let populations: Vec<f64> = c.iter().map(|ck| 2.0 * ck.im / gc).collect();
    let state = FullSteadyState {
        block: DiscreteBlock { rho_gg: xd[0], rho_ee: xd[1], rho_ge: C64::new(xd[2], xd[3]) },
        n_c: (0..4).map(|j| nc[j] * xd[j]).sum(),
        populations,
        rho_gk,
        rho_ek,
        coherences: Coherences::Reduced { energies: dm.energies.clone(), gamma_c: gc, c },
    };
    if !state.n_c.is_finite() || !state.block.rho_gg.is_finite() {
        return Err(Error::Decomposition("non-finite oracle state".into()));
    }
    Ok(state)
}

/// One refinement level of [`converge`].
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConvergenceStep {
    pub n: usize,
    pub half_width: f64,
    pub n_c: f64,
    pub edge_population: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Converged {
    pub n_c: f64,
    pub n: usize,
    pub half_width: f64,
    pub trace: Vec<ConvergenceStep>,
}

/// Levels per unit γ needed to resolve continuum features of width `Γc`.
pub fn default_density(params: &ModelParams) -> f64 {
    MIN_DENSITY.max(4.5 / params.gamma_c)
}

/// Starting band half-width: wide enough for the field-induced spread of the
/// continuum response and for the laser detuning.
pub fn default_half_width(params: &ModelParams, max_abs_detuning: f64) -> f64 {
    20f64.max(params.omega * params.omega).max(2.0 * max_abs_detuning).max(2.0 * params.gamma_c)
}

fn grid_size(density: f64, half_width: f64) -> usize {
    (density * 2.0 * half_width).ceil() as usize + 1
}

/// Refines the grid until successive `n_c` differ by at most `rel_tol`.
///
/// Each step doubles `N`; the band is doubled as well while the outermost
/// levels hold more than [`EDGE_THRESHOLD`] of `n_c`.
pub fn converge(params: &ModelParams, omega_l: f64, rel_tol: f64) -> Result<Converged> {
    if !(rel_tol > 1e-8 && rel_tol < 0.1 + 1e-12) {
        return Err(Error::Dimension(format!("rel_tol {rel_tol} outside (1e-8, 0.1]")));
    }
    params.check()?;
    let mut w = default_half_width(params, (omega_l - params.omega_e).abs());
    let mut n = grid_size(default_density(params), w);
    let mut trace: Vec<ConvergenceStep> = Vec::new();
    for _ in 0..=MAX_DOUBLINGS {
        if n > MAX_STATES {
            break;
        }
        let st = solve(&discretize(params, n, w)?, omega_l)?;
        let step = ConvergenceStep { n, half_width: w, n_c: st.n_c, edge_population: st.edge_population() };
        let widen = step.edge_population > EDGE_THRESHOLD * st.n_c.abs();
        if let Some(prev) = trace.last() {
            if (step.n_c - prev.n_c).abs() <= rel_tol * step.n_c.abs() {
                trace.push(step);
                return Ok(Converged { n_c: st.n_c, n, half_width: w, trace });
            }
        }
        trace.push(step);
        n = 2 * n - 1;
        if widen {
            w *= 2.0;
        }
    }
    Err(Error::NonConvergence { trace })
}

/// How oracle profiles are discretized.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum OracleControls {
    /// A single grid.
    Fixed { n: usize, half_width: f64 },
    /// Two grids of equal density, half-widths `W` and `2W`, combined as
    /// `2 n_c(2W) − n_c(W)` to cancel the leading `1/W` band-truncation error.
    Extrapolated { density: f64, half_width: f64 },
    /// [`OracleControls::Extrapolated`] with density and width chosen from the
    /// parameters and the sweep range.
    Auto,
}

impl OracleControls {
    pub fn resolve(self, params: &ModelParams, omegas: &[f64]) -> Self {
        match self {
            OracleControls::Auto => {
                let far = omegas.iter().map(|w| (w - params.omega_e).abs()).fold(0.0, f64::max);
                OracleControls::Extrapolated {
                    density: default_density(params),
                    half_width: default_half_width(params, far),
                }
            }
            other => other,
        }
    }
}

/// Continuum population at one laser frequency.
pub fn population(params: &ModelParams, omega_l: f64, controls: OracleControls) -> Result<f64> {
    match controls.resolve(params, &[omega_l]) {
        OracleControls::Fixed { n, half_width } => Ok(solve(&discretize(params, n, half_width)?, omega_l)?.n_c),
        OracleControls::Extrapolated { density, half_width } => {
            let coarse = discretize(params, grid_size(density, half_width), half_width)?;
            let fine = discretize(params, grid_size(density, 2.0 * half_width), 2.0 * half_width)?;
            Ok(2.0 * solve(&fine, omega_l)?.n_c - solve(&coarse, omega_l)?.n_c)
        }
        OracleControls::Auto => unreachable!("resolved above"),
    }
}

/// Continuum population over a sweep of laser frequencies, in input order.
pub fn profile(params: &ModelParams, omegas: &[f64], controls: OracleControls, exec: Execution) -> Result<Vec<f64>> {
    let controls = controls.resolve(params, omegas);
    exec.try_map(omegas, |&w| population(params, w, controls))
}
