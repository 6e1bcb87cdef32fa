//! Time stepping of the similarity-coordinate system and norm diagnostics.

use crate::discretization::{energy_norm, h1l2_norm, random_smooth_pair, SpectralDiscretization};
use crate::expm::expm;
use crate::model;
use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum EvolutionError {
    #[error("solution exceeded 1e8 in sup norm at tau = {tau}")]
    BlowupDetected { tau: f64 },
    #[error("invalid time step or horizon: {0}")]
    Horizon(String),
    #[error("matrix exponential failed")]
    Exponential,
    #[error("pair (p, q) = ({p}, {q}) not usable: {reason}")]
    Pair { p: f64, q: f64, reason: &'static str },
    #[error("state has length {got}, expected {want}")]
    Length { got: usize, want: usize },
    #[error(transparent)]
    Model(#[from] model::ModelError),
}

pub type Result<T> = std::result::Result<T, EvolutionError>;

pub const BLOWUP_THRESHOLD: f64 = 1e8;
pub const DEFAULT_DT: f64 = 0.01;
pub const DEFAULT_N: usize = 96;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    LinearFree,
    LinearPerturbed,
    Nonlinear,
}

impl Mode {
    pub fn name(self) -> &'static str {
        match self {
            Mode::LinearFree => "linear-free",
            Mode::LinearPerturbed => "linear-perturbed",
            Mode::Nonlinear => "nonlinear",
        }
    }
}

impl std::str::FromStr for Mode {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "linear-free" => Ok(Mode::LinearFree),
            "linear-perturbed" => Ok(Mode::LinearPerturbed),
            "nonlinear" => Ok(Mode::Nonlinear),
            other => Err(format!("unknown mode {other}")),
        }
    }
}

#[derive(Clone, Debug)]
pub struct EvolutionState {
    pub tau: f64,
    pub phi: DVector<f64>,
}

/// Precomputed exponentials e^{Δτ L}, e^{Δτ L/2} for one mode.
pub struct Propagator<'a> {
    pub disc: &'a SpectralDiscretization,
    pub mode: Mode,
    pub dt: f64,
    full: DMatrix<f64>,
    half: DMatrix<f64>,
}

impl<'a> Propagator<'a> {
    pub fn new(disc: &'a SpectralDiscretization, mode: Mode, dt: f64) -> Result<Self> {
        if !(dt > 0.0 && dt <= 0.5) {
            return Err(EvolutionError::Horizon(format!("dt = {dt} outside (0, 0.5]")));
        }
        if mode == Mode::Nonlinear {
            model::check_nonlinear_dimension(disc.d)?;
        }
        let op = match mode {
            Mode::LinearFree => &disc.l0_mat,
            Mode::LinearPerturbed | Mode::Nonlinear => &disc.l_mat,
        };
        let half = expm(&(op * (0.5 * dt))).ok_or(EvolutionError::Exponential)?;
        let full = &half * &half;
        Ok(Propagator { disc, mode, dt, full, half })
    }

    /// Compose both exponentials with I − P. P is the spectral projection of
    /// the discrete operator, so this leaves the flow on ker P unchanged and
    /// stops roundoff in the gauge direction from growing like e^τ.
    pub fn restricted_to_stable(mut self) -> Self {
        let q = DMatrix::identity(self.disc.dim(), self.disc.dim()) - &self.disc.p_mat;
        self.full = &q * &self.full;
        self.half = &q * &self.half;
        self
    }

    fn forcing(&self, phi: &DVector<f64>) -> DVector<f64> {
        let n = self.disc.len();
        let mut out = DVector::zeros(2 * n);
        for j in 0..n {
            out[n + j] = model::nonlinearity_n(self.disc.d, phi[j]);
        }
        out
    }

    /// One Lawson–RK4 step; the correction vanishes in the linear modes.
    pub fn step(&self, state: &EvolutionState) -> Result<EvolutionState> {
        let h = self.dt;
        let u = &state.phi;
        let next = match self.mode {
            Mode::LinearFree | Mode::LinearPerturbed => &self.full * u,
            Mode::Nonlinear => {
                let k1 = self.forcing(u);
                let hu = &self.half * u;
                let k2 = self.forcing(&(&self.half * (u + &k1 * (0.5 * h))));
                let k3 = self.forcing(&(&hu + &k2 * (0.5 * h)));
                let k4 = self.forcing(&(&self.full * u + &self.half * &k3 * h));
                &self.full * u + (&self.full * k1 + &self.half * (k2 + k3) * 2.0 + k4) * (h / 6.0)
            }
        };
        let tau = state.tau + h;
        if !next.iter().all(|v| v.is_finite()) || next.amax() > BLOWUP_THRESHOLD {
            return Err(EvolutionError::BlowupDetected { tau });
        }
        Ok(EvolutionState { tau, phi: next })
    }
}

/// Time-ordered states with per-snapshot diagnostics.
#[derive(Clone, Debug)]
pub struct EvolutionTrajectory {
    pub d: u32,
    pub mode: Mode,
    pub dt: f64,
    pub states: Vec<EvolutionState>,
    pub mode_coeffs: Vec<f64>,
    pub energy: Vec<f64>,
    pub q_list: Vec<f64>,
    /// norms[k][j]: L^{q_k} norm of the first component at snapshot j.
    pub norms: Vec<Vec<f64>>,
    /// Largest relative Chebyshev tail coefficient of the first component.
    pub highest_mode: f64,
    pub blowup_at: Option<f64>,
    weights: Vec<f64>,
}

impl EvolutionTrajectory {
    pub fn taus(&self) -> Vec<f64> {
        self.states.iter().map(|s| s.tau).collect()
    }

    pub fn last(&self) -> &EvolutionState {
        self.states.last().expect("trajectory holds the initial state")
    }

    pub fn first_component(&self, j: usize) -> &[f64] {
        let n = self.states[j].phi.len() / 2;
        &self.states[j].phi.as_slice()[..n]
    }

    /// L^q norm of the first component at every snapshot.
    pub fn lq_series(&self, q: f64) -> Vec<f64> {
        if let Some(k) = self.q_list.iter().position(|&v| v == q) {
            return self.norms[k].clone();
        }
        (0..self.states.len()).map(|j| weighted_lq(self.d, &self.weights, self.first_component(j), q)).collect()
    }
}

fn weighted_lq(d: u32, weights: &[f64], u1: &[f64], q: f64) -> f64 {
    let s: f64 = u1.iter().zip(weights).map(|(u, w)| w * u.abs().powf(q)).sum();
    (model::sphere_area(d) * s).powf(1.0 / q)
}

/// (|S^{d−1}| ∫₀¹ |u₁|^q ρ^{d−1} dρ)^{1/q} by the grid's interpolatory rule.
pub fn lq_norm(disc: &SpectralDiscretization, u1: &[f64], q: f64) -> f64 {
    weighted_lq(disc.d, &disc.radial_weights, u1, q)
}

/// Chebyshev coefficients of the even extension, relative tail |a_M|/max|a_k|.
pub fn highest_mode_ratio(disc: &SpectralDiscretization, u1: &[f64]) -> f64 {
    let n = disc.n;
    let m = 2 * n;
    let coeff = |k: usize| {
        let mut acc = 0.0;
        for (j, v) in u1.iter().enumerate() {
            // full-grid index n - j and its mirror carry the same value
            let kk = n - j;
            let theta = std::f64::consts::PI * kk as f64 / m as f64;
            let weight = if kk == n || kk == 0 { 1.0 } else { 2.0 };
            acc += weight * v * (k as f64 * theta).cos();
        }
        acc * if k == 0 || k == m { 1.0 / m as f64 } else { 2.0 / m as f64 }
    };
    let top = coeff(m).abs();
    let maxc = (0..=m).step_by(2).map(|k| coeff(k).abs()).fold(0.0, f64::max);
    if maxc == 0.0 {
        0.0
    } else {
        top / maxc
    }
}

/// Evolve Φ0 over [0, τ_max] with step Δτ; stops early (flagged) on blowup.
pub fn evolve(disc: &SpectralDiscretization, phi0: &DVector<f64>, tau_max: f64, dt: f64, mode: Mode, q_list: &[f64]) -> Result<EvolutionTrajectory> {
    let prop = Propagator::new(disc, mode, dt)?;
    evolve_with(&prop, phi0, tau_max, q_list)
}

pub fn evolve_with(prop: &Propagator, phi0: &DVector<f64>, tau_max: f64, q_list: &[f64]) -> Result<EvolutionTrajectory> {
    let disc = prop.disc;
    if phi0.len() != disc.dim() {
        return Err(EvolutionError::Length { got: phi0.len(), want: disc.dim() });
    }
    if !(tau_max > 0.0 && tau_max <= 50.0) {
        return Err(EvolutionError::Horizon(format!("tau_max = {tau_max} outside (0, 50]")));
    }
    let steps = (tau_max / prop.dt).round() as usize;
    if ((steps as f64) * prop.dt - tau_max).abs() > 1e-9 * tau_max {
        return Err(EvolutionError::Horizon(format!("tau_max = {tau_max} is not a multiple of dt = {}", prop.dt)));
    }
    let mut traj = EvolutionTrajectory {
        d: disc.d,
        mode: prop.mode,
        dt: prop.dt,
        states: Vec::with_capacity(steps + 1),
        mode_coeffs: Vec::with_capacity(steps + 1),
        energy: Vec::with_capacity(steps + 1),
        q_list: q_list.to_vec(),
        norms: vec![Vec::with_capacity(steps + 1); q_list.len()],
        highest_mode: 0.0,
        blowup_at: None,
        weights: disc.radial_weights.clone(),
    };
    let record = |traj: &mut EvolutionTrajectory, s: EvolutionState| {
        traj.mode_coeffs.push(disc.mode_coefficient(&s.phi));
        traj.energy.push(energy_norm(disc, &s.phi));
        let u1 = &s.phi.as_slice()[..disc.len()];
        for (k, &q) in q_list.iter().enumerate() {
            let v = weighted_lq(disc.d, &traj.weights, u1, q);
            traj.norms[k].push(v);
        }
        traj.highest_mode = traj.highest_mode.max(highest_mode_ratio(disc, u1));
        traj.states.push(s);
    };
    let mut state = EvolutionState { tau: 0.0, phi: phi0.clone() };
    record(&mut traj, state.clone());
    for k in 1..=steps {
        match prop.step(&state) {
            Ok(mut next) => {
                // keep τ on the exact grid
                next.tau = k as f64 * prop.dt;
                state = next;
                record(&mut traj, state.clone());
            }
            Err(EvolutionError::BlowupDetected { tau }) => {
                traj.blowup_at = Some(tau);
                break;
            }
            Err(e) => return Err(e),
        }
    }
    Ok(traj)
}

#[derive(Clone, Debug)]
pub struct StrichartzNorm {
    pub value: f64,
    /// Share of the p-th power integral from the last tenth of the horizon.
    pub tail_fraction: f64,
    pub not_converged: bool,
}

pub const TAIL_LIMIT: f64 = 0.05;

/// Composite trapezoid in τ of ‖u₁(τ)‖_q^p, or the snapshot maximum for p = ∞.
pub fn strichartz_norm(traj: &EvolutionTrajectory, p: f64, q: f64) -> Result<StrichartzNorm> {
    if p < 1.0 || q < 1.0 || q.is_infinite() {
        return Err(EvolutionError::Pair { p, q, reason: "need p >= 1 and finite q >= 1" });
    }
    let series = traj.lq_series(q);
    strichartz_from_series(&series, traj.dt, p)
}

pub fn strichartz_from_series(series: &[f64], dt: f64, p: f64) -> Result<StrichartzNorm> {
    if series.len() < 2 {
        return Ok(StrichartzNorm { value: series.first().copied().unwrap_or(0.0), tail_fraction: 0.0, not_converged: false });
    }
    if p.is_infinite() {
        let value = series.iter().cloned().fold(0.0, f64::max);
        let tail_start = series.len() - series.len() / 10 - 1;
        let tail = series[tail_start..].iter().cloned().fold(0.0, f64::max);
        let frac = if value > 0.0 { tail / value } else { 0.0 };
        return Ok(StrichartzNorm { value, tail_fraction: frac, not_converged: frac > TAIL_LIMIT });
    }
    let powered: Vec<f64> = series.iter().map(|v| v.powf(p)).collect();
    let trap = |s: &[f64]| -> f64 {
        if s.len() < 2 {
            return 0.0;
        }
        dt * (s.iter().sum::<f64>() - 0.5 * (s[0] + s[s.len() - 1]))
    };
    let total = trap(&powered);
    let tail_start = powered.len() - 1 - (powered.len() - 1) / 10;
    let tail = trap(&powered[tail_start..]);
    let frac = if total > 0.0 { tail / total } else { 0.0 };
    Ok(StrichartzNorm { value: total.powf(1.0 / p), tail_fraction: frac, not_converged: frac > TAIL_LIMIT })
}

#[derive(Clone, Debug)]
pub struct StrichartzReport {
    pub pairs: Vec<(f64, f64)>,
    pub norms: Vec<StrichartzNorm>,
    pub data_norm: f64,
    /// norms / ‖(I−P)f‖_{H¹×L²}; zero when the projected data vanish.
    pub ratios: Vec<f64>,
}

fn check_pair(d: u32, p: f64, q: f64) -> Result<()> {
    let df = d as f64;
    let x1 = (2.0, 2.0 * df / (df - 3.0));
    let x2 = ((df + 2.0) / (df - 2.0), (2.0 * df + 4.0) / (df - 2.0));
    let close = |a: (f64, f64)| (a.0 - p).abs() < 1e-12 && (a.1 - q).abs() < 1e-12;
    if model::admissible(d, p, q) || (d > 3 && close(x1)) || close(x2) {
        Ok(())
    } else {
        Err(EvolutionError::Pair { p, q, reason: "not admissible" })
    }
}

/// ‖(I−P)f‖_{H¹×L²}, snapped to zero when it is roundoff relative to f.
fn projected_norm(disc: &SpectralDiscretization, f: &DVector<f64>, phi0: &DVector<f64>) -> f64 {
    let v = h1l2_norm(disc, phi0);
    if v <= 1e-12 * h1l2_norm(disc, f) {
        0.0
    } else {
        v
    }
}

/// Linear-perturbed flow of (I−P)f measured in the given pairs.
pub fn strichartz_suite(disc: &SpectralDiscretization, f: &DVector<f64>, pairs: &[(f64, f64)], tau_max: f64, dt: f64) -> Result<StrichartzReport> {
    for &(p, q) in pairs {
        check_pair(disc.d, p, q)?;
    }
    let phi0 = disc.project_out(f);
    let data_norm = projected_norm(disc, f, &phi0);
    let qs: Vec<f64> = pairs.iter().map(|pq| pq.1).collect();
    let prop = Propagator::new(disc, Mode::LinearPerturbed, dt)?.restricted_to_stable();
    let traj = evolve_with(&prop, &phi0, tau_max, &qs)?;
    let norms = pairs.iter().map(|&(p, q)| strichartz_norm(&traj, p, q)).collect::<Result<Vec<_>>>()?;
    let ratios = norms.iter().map(|n| if data_norm > 0.0 { n.value / data_norm } else { 0.0 }).collect();
    Ok(StrichartzReport { pairs: pairs.to_vec(), norms, data_norm, ratios })
}

#[derive(Clone, Debug)]
pub struct StrichartzFamily {
    pub reports: Vec<StrichartzReport>,
    /// max/min of the ratios for each pair over the family.
    pub spread: Vec<f64>,
}

/// Suite over `count` random smooth data drawn from a seeded stream.
pub fn strichartz_family(disc: &SpectralDiscretization, pairs: &[(f64, f64)], tau_max: f64, dt: f64, count: usize, seed: u64) -> Result<StrichartzFamily> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let data: Vec<DVector<f64>> = (0..count).map(|_| random_smooth_pair(disc, &mut rng)).collect();
    let prop = Propagator::new(disc, Mode::LinearPerturbed, dt)?.restricted_to_stable();
    let qs: Vec<f64> = pairs.iter().map(|pq| pq.1).collect();
    let mut reports = Vec::with_capacity(count);
    for f in &data {
        for &(p, q) in pairs {
            check_pair(disc.d, p, q)?;
        }
        let phi0 = disc.project_out(f);
        let data_norm = projected_norm(disc, f, &phi0);
        let traj = evolve_with(&prop, &phi0, tau_max, &qs)?;
        let norms = pairs.iter().map(|&(p, q)| strichartz_norm(&traj, p, q)).collect::<Result<Vec<_>>>()?;
        let ratios = norms.iter().map(|n| if data_norm > 0.0 { n.value / data_norm } else { 0.0 }).collect();
        reports.push(StrichartzReport { pairs: pairs.to_vec(), norms, data_norm, ratios });
    }
    let spread = (0..pairs.len())
        .map(|k| {
            let vals: Vec<f64> = reports.iter().map(|r| r.ratios[k]).collect();
            let hi = vals.iter().cloned().fold(0.0, f64::max);
            let lo = vals.iter().cloned().fold(f64::INFINITY, f64::min);
            hi / lo
        })
        .collect();
    Ok(StrichartzFamily { reports, spread })
}

#[derive(Clone, Debug)]
pub struct LaplaceComparison {
    pub tau: f64,
    pub rho: Vec<f64>,
    pub laplace: Vec<f64>,
    pub stepped: Vec<f64>,
    /// Relative difference in L²(ρ^{d−1}dρ) over the sample points.
    pub rel_l2: f64,
    pub tail_estimate: f64,
}

/// First component of S(τ)(I−P)f by contour inversion and by time stepping.
pub fn laplace_comparison(disc: &SpectralDiscretization, f: &DVector<f64>, tau: f64, dt: f64, opts: &crate::green::LaplaceOptions) -> std::result::Result<LaplaceComparison, Box<dyn std::error::Error + Send + Sync>> {
    use crate::discretization::{GridSource, Parity};
    let phi0 = disc.project_out(f);
    let pair = disc.to_pair(&phi0);
    let src = GridSource::new(disc, &pair)?;
    let (rho, rw) = crate::quadrature::gauss_legendre_on(24, 0.0, 1.0);
    let inv = crate::green::semigroup_laplace(disc.d, tau, &src, &rho, opts)?;
    let traj = evolve(disc, &phi0, tau, dt, Mode::LinearPerturbed, &[])?;
    let u1 = traj.first_component(traj.states.len() - 1);
    let stepped: Vec<f64> = rho.iter().map(|&r| disc.interpolate(u1, Parity::Even, r)).collect();
    let laplace: Vec<f64> = inv.values.iter().map(|v| v.re).collect();
    let weight = |k: usize| rw[k] * rho[k].powi(disc.d as i32 - 1);
    let diff: f64 = (0..rho.len()).map(|k| weight(k) * (laplace[k] - stepped[k]).powi(2)).sum();
    let base: f64 = (0..rho.len()).map(|k| weight(k) * stepped[k].powi(2)).sum();
    Ok(LaplaceComparison { tau, rho, laplace, stepped, rel_l2: (diff / base).sqrt(), tail_estimate: inv.tail_estimate })
}
