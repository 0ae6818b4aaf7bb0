//! Least-squares extraction of generalized Fano parameters from sampled
//! lineshapes.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg;
use crate::profiles::{generalized_profile, EffectiveFano};

pub const MIN_SAMPLES: usize = 7;
pub const MAX_ITERATIONS: usize = 500;
/// Above this `|q_eff|` the fit runs in `(Cq², 1/q, CD, ln γ, ω)`.
pub const LARGE_Q: f64 = 20.0;

const STEP_TOL: f64 = 1e-10;
const COST_TOL: f64 = 1e-12;
const RANK_TOL: f64 = 1e-13;
const NAMES: [&str; 5] = ["C", "D", "q_eff", "gamma_eff", "omega_eff"];

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ProfileKind {
    #[default]
    Population,
    Photocurrent,
}

/// Sampled lineshape with strictly increasing frequencies.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProfileSamples {
    points: Vec<(f64, f64)>,
    pub kind: ProfileKind,
}

impl ProfileSamples {
    pub fn new(points: Vec<(f64, f64)>, kind: ProfileKind) -> Result<Self> {
        if points.len() < MIN_SAMPLES {
            return Err(Error::InvalidSamples(format!("{} points, need at least {MIN_SAMPLES}", points.len())));
        }
        if let Some(i) = points.iter().position(|(x, y)| !x.is_finite() || !y.is_finite()) {
            return Err(Error::InvalidSamples(format!("non-finite sample at index {i}")));
        }
        if let Some(i) = points.windows(2).position(|w| w[1].0 <= w[0].0) {
            return Err(Error::InvalidSamples(format!("omega_L not strictly increasing at index {}", i + 1)));
        }
        let top = points.iter().map(|p| p.1.abs()).fold(0.0, f64::max);
        if let Some(i) = points.iter().position(|p| p.1 < -1e-9 * top) {
            return Err(Error::InvalidSamples(format!("negative value {} at index {i}", points[i].1)));
        }
        Ok(Self { points, kind })
    }

    pub fn from_fn(omegas: &[f64], kind: ProfileKind, f: impl Fn(f64) -> f64) -> Result<Self> {
        Self::new(omegas.iter().map(|&w| (w, f(w))).collect(), kind)
    }

    pub fn points(&self) -> &[(f64, f64)] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    fn xs(&self) -> impl Iterator<Item = f64> + '_ {
        self.points.iter().map(|p| p.0)
    }

    fn ys(&self) -> impl Iterator<Item = f64> + '_ {
        self.points.iter().map(|p| p.1)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FitResult {
    pub params: EffectiveFano,
    /// `√(Σ r² / Σ y²)`.
    pub rms_residual: f64,
    /// Variances of `(C, D, q_eff, gamma_eff, omega_eff)`.
    pub covariance_diag: [f64; 5],
    pub iterations: usize,
}

fn sse(samples: &ProfileSamples, ef: &EffectiveFano) -> f64 {
    samples.points.iter().map(|&(x, y)| (generalized_profile(ef, x) - y).powi(2)).sum()
}

fn relative_rms(samples: &ProfileSamples, ef: &EffectiveFano) -> f64 {
    let norm: f64 = samples.ys().map(|y| y * y).sum();
    if norm == 0.0 {
        return sse(samples, ef).sqrt();
    }
    (sse(samples, ef) / norm).sqrt()
}

fn argmax(v: &[f64]) -> usize {
    (0..v.len()).fold(0, |b, i| if v[i] > v[b] { i } else { b })
}

fn argmin(v: &[f64]) -> usize {
    (0..v.len()).fold(0, |b, i| if v[i] < v[b] { i } else { b })
}

/// Candidate starting points, best first.
fn candidates(samples: &ProfileSamples) -> Result<Vec<EffectiveFano>> {
    let xs: Vec<f64> = samples.xs().collect();
    let ys: Vec<f64> = samples.ys().collect();
    let (imax, imin) = (argmax(&ys), argmin(&ys));
    let (ymax, ymin) = (ys[imax], ys[imin].max(0.0));
    let (xmax, xmin) = (xs[imax], xs[imin]);
    let span = xs[xs.len() - 1] - xs[0];

    if ymax - ymin <= 1e-12 * ymax.abs().max(f64::MIN_POSITIVE) {
        return Err(Error::NoFeature);
    }
    let rising = ys.windows(2).all(|w| w[1] >= w[0]);
    let falling = ys.windows(2).all(|w| w[1] <= w[0]);
    if rising || falling {
        return Err(Error::NoFeature);
    }

    let mut out: Vec<EffectiveFano> = Vec::new();

    // Extremes: with the tail level C known, the maximum and minimum fix
    // q², D and the distance between them in units of γ.
    let scan = 240;
    for k in 1..scan {
        let t = 0.5 * (1.0 - (std::f64::consts::PI * k as f64 / scan as f64).cos());
        let c = ymin + (ymax - ymin) * t;
        let a = ymax / c - 1.0;
        let b = 1.0 - ymin / c;
        if !(a > 0.0 && b > 0.0) {
            continue;
        }
        let q = (a * b).sqrt();
        let s = (b / a).sqrt();
        let gamma = (xmax - xmin).abs() / (s + 1.0 / s);
        if !(gamma > 0.0) {
            continue;
        }
        let (q, omega) = if xmax > xmin { (q, xmax - gamma * s) } else { (-q, xmax + gamma * s) };
        out.push(EffectiveFano { c, d: ymax * ymin / (c * c), q_eff: q, gamma_eff: gamma, omega_eff: omega });
    }

    // Window: symmetric dip around the minimum.
    let half = 0.5 * (ymin + ymax);
    let left = (0..imin).rev().find(|&i| ys[i] >= half).map(|i| xs[i]);
    let right = (imin..ys.len()).find(|&i| ys[i] >= half).map(|i| xs[i]);
    let width = match (left, right) {
        (Some(l), Some(r)) => 0.5 * (r - l),
        (Some(l), None) => xmin - l,
        (None, Some(r)) => r - xmin,
        (None, None) => 0.25 * span,
    };
    if width > 0.0 {
        out.push(EffectiveFano { c: ymax, d: ymin / ymax, q_eff: 0.0, gamma_eff: width, omega_eff: xmin });
    }

    // Peak: near-Lorentzian line with its zero far outside the samples.
    let hm = (imax..ys.len()).find(|&i| ys[i] <= half).map(|i| xs[i] - xmax);
    let hm = hm.or_else(|| (0..imax).rev().find(|&i| ys[i] <= half).map(|i| xmax - xs[i]));
    if let Some(g) = hm.filter(|&g| g > 0.0) {
        let sign = if ys[0] <= ys[ys.len() - 1] { 1.0 } else { -1.0 };
        for q in [3.0, 10.0, 30.0] {
            let q = sign * q;
            out.push(EffectiveFano { c: ymax / (1.0 + q * q), d: 0.0, q_eff: q, gamma_eff: g, omega_eff: xmax - g / q });
        }
    }

    let mut scored: Vec<(f64, EffectiveFano)> =
        out.into_iter().filter(EffectiveFano::is_valid).map(|ef| (sse(samples, &ef), ef)).collect();
    scored.sort_by(|a, b| a.0.total_cmp(&b.0));
    if scored.is_empty() {
        return Err(Error::NoFeature);
    }
    Ok(scored.into_iter().map(|(_, ef)| ef).collect())
}

/// Heuristic starting point for [`fit_profile`].
pub fn initial_guess(samples: &ProfileSamples) -> Result<EffectiveFano> {
    Ok(candidates(samples)?[0])
}

#[derive(Clone, Copy, Debug, PartialEq)]
enum Coords {
    /// `(C, D, q, ln γ, ω)`
    Direct,
    /// `(A = Cq², u = 1/q, B = CD, ln γ, ω)`
    InverseQ,
}

impl Coords {
    fn pack(self, ef: &EffectiveFano) -> [f64; 5] {
        let lg = ef.gamma_eff.ln();
        match self {
            Coords::Direct => [ef.c, ef.d, ef.q_eff, lg, ef.omega_eff],
            Coords::InverseQ => [ef.c * ef.q_eff * ef.q_eff, 1.0 / ef.q_eff, ef.c * ef.d, lg, ef.omega_eff],
        }
    }

    fn unpack(self, t: &[f64; 5]) -> EffectiveFano {
        let gamma_eff = t[3].exp();
        match self {
            Coords::Direct => EffectiveFano { c: t[0], d: t[1], q_eff: t[2], gamma_eff, omega_eff: t[4] },
            Coords::InverseQ => {
                let q = 1.0 / t[1];
                let c = t[0] * t[1] * t[1];
                let d = if c > 0.0 { t[2] / c } else { 0.0 };
                EffectiveFano { c, d, q_eff: q, gamma_eff, omega_eff: t[4] }
            }
        }
    }

    /// Indices of the coordinates bounded below by zero.
    fn bounded(self) -> [usize; 2] {
        match self {
            Coords::Direct => [0, 1],
            Coords::InverseQ => [0, 2],
        }
    }

    /// Keeps amplitudes and the Lorentzian weight nonnegative.
    fn project(self, t: &mut [f64; 5]) {
        t[0] = t[0].max(0.0);
        match self {
            Coords::Direct => t[1] = t[1].max(0.0),
            Coords::InverseQ => t[2] = t[2].max(0.0),
        }
    }

    /// Model value and gradient with respect to the packed coordinates.
    fn eval(self, t: &[f64; 5], x: f64) -> (f64, [f64; 5]) {
        let gamma = t[3].exp();
        let e = (x - t[4]) / gamma;
        let l = 1.0 / (e * e + 1.0);
        let (y, dy_de, g012) = match self {
            Coords::Direct => {
                let (c, d, q) = (t[0], t[1], t[2]);
                let f = (q + e).powi(2) + d;
                let dy_de = c * (2.0 * (q + e) * (e * e + 1.0) - 2.0 * e * f) * l * l;
                (c * f * l, dy_de, [f * l, c * l, 2.0 * c * (q + e) * l])
            }
            Coords::InverseQ => {
                let (a, u, b) = (t[0], t[1], t[2]);
                let m = 1.0 + u * e;
                let f = a * m * m + b;
                let dy_de = (2.0 * a * u * m * (e * e + 1.0) - 2.0 * e * f) * l * l;
                (f * l, dy_de, [m * m * l, 2.0 * a * m * e * l, l])
            }
        };
        (y, [g012[0], g012[1], g012[2], -e * dy_de, -dy_de / gamma])
    }
}

struct Lm {
    coords: Coords,
    xs: Vec<f64>,
    ys: Vec<f64>,
}

impl Lm {
    fn cost(&self, t: &[f64; 5]) -> f64 {
        self.xs.iter().zip(&self.ys).map(|(&x, &y)| (self.coords.eval(t, x).0 - y).powi(2)).sum()
    }

    /// `JᵀJ` (row-major) and `Jᵀr`.
    fn normal(&self, t: &[f64; 5]) -> ([f64; 25], [f64; 5]) {
        let mut jtj = [0.0; 25];
        let mut jtr = [0.0; 5];
        for (&x, &y) in self.xs.iter().zip(&self.ys) {
            let (v, g) = self.coords.eval(t, x);
            let r = v - y;
            for a in 0..5 {
                jtr[a] += g[a] * r;
                for b in 0..5 {
                    jtj[a * 5 + b] += g[a] * g[b];
                }
            }
        }
        (jtj, jtr)
    }

    fn run(&self, mut t: [f64; 5]) -> Result<([f64; 5], usize)> {
        let mut cost = self.cost(&t);
        let mut lambda = 1e-3;
        for it in 1..=MAX_ITERATIONS {
            if cost == 0.0 {
                return Ok((t, it));
            }
            let (jtj, jtr) = self.normal(&t);
            // coordinates pinned at their bound by an outward gradient are frozen
            let frozen: Vec<usize> = self.coords.bounded().into_iter().filter(|&k| t[k] <= 0.0 && jtr[k] > 0.0).collect();
            let mut accepted = false;
            while lambda < 1e16 {
                let mut a = jtj;
                for k in 0..5 {
                    a[k * 6] += lambda * jtj[k * 6].max(1e-300);
                }
                let mut rhs: Vec<f64> = jtr.iter().map(|g| -g).collect();
                for &k in &frozen {
                    for j in 0..5 {
                        a[k * 5 + j] = 0.0;
                        a[j * 5 + k] = 0.0;
                    }
                    a[k * 6] = 1.0;
                    rhs[k] = 0.0;
                }
                let Ok(step) = linalg::solve_real(&a, 5, &rhs, 1) else {
                    lambda *= 10.0;
                    continue;
                };
                let mut trial = t;
                for k in 0..5 {
                    trial[k] += step[k];
                }
                self.coords.project(&mut trial);
                let trial_cost = self.cost(&trial);
                if trial_cost.is_finite() && trial_cost <= cost {
                    let moved: f64 = (0..5).map(|k| (trial[k] - t[k]).powi(2)).sum::<f64>().sqrt();
                    let size: f64 = t.iter().map(|v| v * v).sum::<f64>().sqrt();
                    let drop = (cost - trial_cost) / cost;
                    t = trial;
                    cost = trial_cost;
                    lambda = (lambda / 3.0).max(1e-12);
                    accepted = true;
                    if moved <= STEP_TOL * (size + STEP_TOL) || drop < COST_TOL {
                        return Ok((t, it));
                    }
                    break;
                }
                lambda *= 4.0;
            }
            if !accepted {
                // no downhill direction left: a minimum to working precision
                return Ok((t, it));
            }
        }
        Err(Error::FitDiverged { iterations: MAX_ITERATIONS })
    }
}

/// Damped least squares for the five generalized-profile parameters,
/// started from `guess`.
pub fn fit_profile(samples: &ProfileSamples, guess: &EffectiveFano) -> Result<FitResult> {
    if !guess.is_valid() {
        return Err(Error::InvalidSamples(format!("initial guess is not admissible: {guess:?}")));
    }
    let scale = samples.ys().map(f64::abs).fold(0.0, f64::max);
    let scale = if scale > 0.0 { scale } else { 1.0 };
    let xs: Vec<f64> = samples.xs().collect();
    let ys: Vec<f64> = samples.ys().map(|y| y / scale).collect();
    let coords = if guess.q_eff.abs() > LARGE_Q { Coords::InverseQ } else { Coords::Direct };
    let start = EffectiveFano { c: guess.c / scale, ..*guess };
    let lm = Lm { coords, xs, ys };
    let (t, iterations) = lm.run(coords.pack(&start))?;
    let mut ef = coords.unpack(&t);

    // leave the inverse coordinates if the fit wandered back to moderate q
    let mut iterations = iterations;
    if coords == Coords::InverseQ && ef.q_eff.abs() <= LARGE_Q && ef.q_eff.is_finite() {
        let lm = Lm { coords: Coords::Direct, ..lm };
        let (t, more) = lm.run(Coords::Direct.pack(&ef))?;
        ef = Coords::Direct.unpack(&t);
        iterations += more;
    }
    let fitted_scaled = ef;
    ef.c *= scale;
    if !ef.is_valid() {
        return Err(Error::FitDiverged { iterations });
    }

    let covariance_diag = covariance(samples, &fitted_scaled, scale)?;
    Ok(FitResult { params: ef, rms_residual: relative_rms(samples, &ef), covariance_diag, iterations })
}

/// Diagonal of `σ² (JᵀJ)⁻¹` in `(C, D, q_eff, γ_eff, ω_eff)`; fails if the
/// Jacobian is numerically rank deficient.
fn covariance(samples: &ProfileSamples, ef_scaled: &EffectiveFano, scale: f64) -> Result<[f64; 5]> {
    let t = Coords::Direct.pack(ef_scaled);
    let gamma = ef_scaled.gamma_eff;
    let mut jtj = [0.0; 25];
    let mut ss = 0.0;
    for &(x, y) in &samples.points {
        let (v, mut g) = Coords::Direct.eval(&t, x);
        g[3] /= gamma;
        ss += (v - y / scale).powi(2);
        for a in 0..5 {
            for b in 0..5 {
                jtj[a * 5 + b] += g[a] * g[b];
            }
        }
    }
    // correlation form, so the rank test is independent of parameter units
    if let Some(k) = (0..5).find(|&k| !(jtj[k * 6] > 0.0)) {
        return Err(Error::RankDeficient { direction: format!("+1.000*{}", NAMES[k]) });
    }
    let d: Vec<f64> = (0..5).map(|k| jtj[k * 6].sqrt()).collect();
    let corr: Vec<f64> = (0..25).map(|i| jtj[i] / (d[i / 5] * d[i % 5])).collect();
    let (vals, vecs) = linalg::symmetric_eigen(&corr, 5)?;
    if vals[0] <= RANK_TOL * vals[4] {
        let dir = vecs[0]
            .iter()
            .zip(NAMES)
            .filter(|(c, _)| c.abs() > 0.05)
            .map(|(c, n)| format!("{c:+.3}*{n}"))
            .collect::<Vec<_>>()
            .join(" ");
        return Err(Error::RankDeficient { direction: dir });
    }
    let dof = (samples.len() as f64 - 5.0).max(1.0);
    let sigma2 = ss / dof;
    let mut out = [0.0; 5];
    for k in 0..5 {
        let mut e = [0.0; 5];
        e[k] = 1.0;
        let col = linalg::solve_real(&corr, 5, &e, 1)?;
        out[k] = sigma2 * col[k] / (d[k] * d[k]);
    }
    out[0] *= scale * scale;
    Ok(out)
}

/// Fits from several heuristic starting points and keeps the best result.
/// When the samples contain no interior minimum, both signs of `q_eff` are
/// tried.
pub fn fit(samples: &ProfileSamples) -> Result<FitResult> {
    let starts = candidates(samples)?;
    let ys: Vec<f64> = samples.ys().collect();
    let imin = argmin(&ys);
    let interior_min = imin > 0 && imin + 1 < ys.len();

    let mut tries: Vec<EffectiveFano> = starts.iter().take(4).copied().collect();
    if !interior_min {
        let flipped: Vec<EffectiveFano> = tries
            .iter()
            .map(|ef| EffectiveFano { q_eff: -ef.q_eff, omega_eff: ef.omega_eff, ..*ef })
            .collect();
        tries.extend(flipped);
    }
    let mut best: Option<FitResult> = None;
    let mut first_err = None;
    for start in &tries {
        match fit_profile(samples, start) {
            Ok(r) => {
                if best.as_ref().is_none_or(|b| r.rms_residual < b.rms_residual) {
                    best = Some(r);
                }
            }
            Err(e) => {
                first_err.get_or_insert(e);
            }
        }
    }
    match (best, first_err) {
        (Some(b), _) => Ok(b),
        (None, Some(e)) => Err(e),
        (None, None) => Err(Error::NoFeature),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn synthetic(ef: &EffectiveFano, n: usize, widths: f64) -> ProfileSamples {
        let xs: Vec<f64> = (0..n)
            .map(|i| ef.omega_eff + ef.gamma_eff * widths * (2.0 * i as f64 / (n - 1) as f64 - 1.0))
            .collect();
        ProfileSamples::from_fn(&xs, ProfileKind::Population, |w| generalized_profile(ef, w)).unwrap()
    }

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs().max(1e-300)
    }

    const TRUTH: EffectiveFano = EffectiveFano { c: 0.5, d: 0.2, q_eff: 3.0, gamma_eff: 1.5, omega_eff: 10.0 };

    #[test]
    fn sample_validation() {
        assert!(ProfileSamples::new(vec![(0.0, 1.0); 6], ProfileKind::Population).is_err());
        let mut pts: Vec<(f64, f64)> = (0..8).map(|i| (i as f64, 1.0)).collect();
        pts[4].0 = 3.0;
        let err = ProfileSamples::new(pts, ProfileKind::Population).unwrap_err();
        assert!(err.to_string().contains("index 4"));
        let pts: Vec<(f64, f64)> = (0..8).map(|i| (i as f64, if i == 2 { -1.0 } else { 1.0 })).collect();
        assert!(ProfileSamples::new(pts, ProfileKind::Population).is_err());
    }

    #[test]
    fn guess_is_close_on_exact_data() {
        let truth = EffectiveFano { d: 0.0, ..TRUTH };
        let g = initial_guess(&synthetic(&truth, 200, 12.0)).unwrap();
        assert!(rel(g.c, truth.c) < 0.3, "{g:?}");
        assert!(g.d < 0.3);
        assert!(rel(g.q_eff, truth.q_eff) < 0.3, "{g:?}");
        assert!(rel(g.gamma_eff, truth.gamma_eff) < 0.3, "{g:?}");
        assert!((g.omega_eff - truth.omega_eff).abs() < 0.3 * truth.gamma_eff, "{g:?}");
    }

    #[test]
    fn symmetric_profile_gives_zero_asymmetry_guess() {
        let truth = EffectiveFano { c: 1.0, d: 0.0, q_eff: 0.0, gamma_eff: 1.0, omega_eff: 0.0 };
        let g = initial_guess(&synthetic(&truth, 101, 10.0)).unwrap();
        assert!(g.q_eff.abs() < 0.2, "{g:?}");
    }

    #[test]
    fn featureless_samples_are_rejected() {
        let xs: Vec<f64> = (0..20).map(|i| i as f64).collect();
        let flat = ProfileSamples::from_fn(&xs, ProfileKind::Population, |_| 0.3).unwrap();
        assert!(matches!(initial_guess(&flat), Err(Error::NoFeature)));
        let ramp = ProfileSamples::from_fn(&xs, ProfileKind::Population, |x| 0.1 * x).unwrap();
        assert!(matches!(initial_guess(&ramp), Err(Error::NoFeature)));
    }

    #[test]
    fn exact_round_trip() {
        let s = synthetic(&TRUTH, 200, 12.0);
        let r = fit(&s).unwrap();
        let p = r.params;
        for (a, b) in [(p.c, TRUTH.c), (p.d, TRUTH.d), (p.q_eff, TRUTH.q_eff), (p.gamma_eff, TRUTH.gamma_eff), (p.omega_eff, TRUTH.omega_eff)] {
            assert!(rel(a, b) < 1e-6, "{p:?}");
        }
        assert!(r.rms_residual <= 1e-10);
        assert!(r.covariance_diag.iter().all(|v| v.is_finite() && *v >= 0.0));
    }

    #[test]
    fn negative_and_large_asymmetry() {
        for truth in [
            EffectiveFano { q_eff: -2.0, d: 0.0, ..TRUTH },
            EffectiveFano { q_eff: 40.0, d: 0.0, c: 1e-3, ..TRUTH },
            EffectiveFano { q_eff: -0.4, d: 0.5, ..TRUTH },
        ] {
            let r = fit(&synthetic(&truth, 120, 10.0)).unwrap();
            assert!(rel(r.params.q_eff, truth.q_eff) < 1e-5, "{:?} vs {truth:?}", r.params);
            assert!(rel(r.params.gamma_eff, truth.gamma_eff) < 1e-5);
            assert!(r.rms_residual < 1e-9);
        }
    }

    #[test]
    fn refit_is_idempotent() {
        let s = synthetic(&EffectiveFano { d: 0.05, ..TRUTH }, 60, 8.0);
        let a = fit(&s).unwrap();
        let b = fit_profile(&s, &a.params).unwrap();
        for (x, y) in [(a.params.c, b.params.c), (a.params.q_eff, b.params.q_eff), (a.params.gamma_eff, b.params.gamma_eff), (a.params.omega_eff, b.params.omega_eff)] {
            assert!(rel(x, y) < 1e-10);
        }
        assert!((a.params.d - b.params.d).abs() < 1e-10);
    }

    #[test]
    fn rank_deficiency_is_reported() {
        // with zero amplitude the shape parameters are unidentifiable
        let xs: Vec<f64> = (0..30).map(|i| i as f64 - 15.0).collect();
        let s = ProfileSamples::from_fn(&xs, ProfileKind::Population, |_| 0.0).unwrap();
        let guess = EffectiveFano { c: 0.0, d: 1.0, q_eff: 0.5, gamma_eff: 1.0, omega_eff: 0.0 };
        match fit_profile(&s, &guess) {
            Err(Error::RankDeficient { direction }) => assert!(!direction.is_empty()),
            other => panic!("{other:?}"),
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn scale_equivariance(s in 1e-3f64..1e3) {
            let base = synthetic(&TRUTH, 80, 8.0);
            let scaled = ProfileSamples::new(base.points().iter().map(|&(x, y)| (x, s * y)).collect(), ProfileKind::Population).unwrap();
            let a = fit(&base).unwrap().params;
            let b = fit(&scaled).unwrap().params;
            prop_assert!(rel(b.c, s * a.c) < 1e-8);
            prop_assert!((a.d - b.d).abs() < 1e-8 && rel(a.q_eff, b.q_eff) < 1e-8);
            prop_assert!(rel(a.gamma_eff, b.gamma_eff) < 1e-8 && (a.omega_eff - b.omega_eff).abs() < 1e-8);
        }

        #[test]
        fn shift_equivariance(dw in -50.0f64..50.0) {
            let base = synthetic(&TRUTH, 80, 8.0);
            let moved = ProfileSamples::new(base.points().iter().map(|&(x, y)| (x + dw, y)).collect(), ProfileKind::Population).unwrap();
            let a = fit(&base).unwrap().params;
            let b = fit(&moved).unwrap().params;
            prop_assert!((b.omega_eff - a.omega_eff - dw).abs() < 1e-8);
            prop_assert!(rel(a.c, b.c) < 1e-8 && (a.d - b.d).abs() < 1e-8);
            prop_assert!(rel(a.q_eff, b.q_eff) < 1e-8 && rel(a.gamma_eff, b.gamma_eff) < 1e-8);
        }
    }
}
