//! Green function of the spectral ODE, resolvent application, the free/perturbed
//! kernel comparison and Laplace inversion of the semigroup.

use crate::model::{self, RadialPair, Variant};
use crate::quadrature;
use crate::rk::{self, Tolerance};
use crate::special_fn::{self, SpecialFnError};
use crate::spectral_ode::{self as sode, Branch, FundamentalSolution, SpectralError, SpectralOde};
use crate::C64;
use nalgebra::{DMatrix, DVector};
use std::f64::consts::PI;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GreenError {
    #[error("lambda = {0} is (numerically) an eigenvalue")]
    NearEigenvalue(C64),
    #[error("endpoint integral does not converge: {0}")]
    Quadrature(String),
    #[error("{0}")]
    Domain(String),
    #[error(transparent)]
    Spectral(#[from] SpectralError),
    #[error(transparent)]
    Special(#[from] SpecialFnError),
}

pub type Result<T> = std::result::Result<T, GreenError>;

const I2: C64 = C64 { re: 0.0, im: 2.0 };
const ZERO: C64 = C64 { re: 0.0, im: 0.0 };

/// f₁, f₁', f₂ at a point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SourceValue {
    pub f1: C64,
    pub df1: C64,
    pub f2: C64,
}

pub trait Source {
    fn eval(&self, rho: f64) -> SourceValue;
}

impl<F: Fn(f64) -> SourceValue> Source for F {
    fn eval(&self, rho: f64) -> SourceValue {
        self(rho)
    }
}

/// F_λ = f₂ + (λ + d/2) f₁ + ρ f₁'.
pub fn forcing(d: u32, lambda: C64, v: &SourceValue, rho: f64) -> C64 {
    v.f2 + (lambda + d as f64 / 2.0) * v.f1 + v.df1 * rho
}

/// s^{d-1}(1-s²)^{λ-1/2}.
fn green_weight(d: u32, lambda: C64, s: f64) -> C64 {
    s.powf(d as f64 - 1.0) * ((1.0 - s * s).ln() * (lambda - 0.5)).exp()
}

#[derive(Debug, Clone)]
pub struct GreenKernel {
    pub d: u32,
    pub lambda: C64,
    pub variant: Variant,
    /// Origin-regular solution (unnormalized seed; multiply by `normalization`).
    pub u0: FundamentalSolution,
    /// Solution analytic at ρ = 1, with u₁(1) = 1.
    pub u1: FundamentalSolution,
    /// Factor c with W(u₁, c·u₀)·ρ^{d-1}(1-ρ²)^{λ+1/2} = 2i.
    pub normalization: C64,
}

pub fn build_kernel(d: u32, lambda: C64, variant: Variant) -> Result<GreenKernel> {
    build_kernel_with(d, lambda, variant, sode::DEFAULT_TOL)
}

pub fn build_kernel_with(d: u32, lambda: C64, variant: Variant, tol: f64) -> Result<GreenKernel> {
    let ode = SpectralOde::new(d, lambda, variant)?;
    let order = sode::DEFAULT_ORDER;
    let u0 = sode::integrate(&sode::seed_origin(&ode, order), 1.0 - 1e-3, tol)?;
    let u1 = sode::integrate(&sode::seed_one(&ode, Branch::Analytic, order)?, 1e-3, tol)?;
    let mid = 0.5;
    let (a, da) = u1.eval(mid)?;
    let (b, db) = u0.eval(mid)?;
    let w = a * db - da * b;
    let scale = (a.norm() + da.norm()) * (b.norm() + db.norm());
    if w.norm() < 1e-6 * scale {
        return Err(GreenError::NearEigenvalue(lambda));
    }
    let normalization = I2 / (w * ode.abel_weight(mid));
    Ok(GreenKernel { d, lambda, variant, u0, u1, normalization })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    /// ρ ≤ s branch
    Below,
    /// ρ ≥ s branch
    Above,
}

impl GreenKernel {
    pub fn ode(&self) -> SpectralOde {
        self.u0.ode
    }

    /// (u₀, u₀') after normalization.
    pub fn origin_solution(&self, rho: f64) -> Result<(C64, C64)> {
        let (u, du) = self.u0.eval(rho)?;
        Ok((u * self.normalization, du * self.normalization))
    }

    pub fn one_solution(&self, rho: f64) -> Result<(C64, C64)> {
        Ok(self.u1.eval(rho)?)
    }

    /// W(u₁,u₀)(ρ)·ρ^{d-1}(1-ρ²)^{λ+1/2}; equals 2i by construction.
    pub fn normalized_wronskian(&self, rho: f64) -> Result<C64> {
        let (a, da) = self.one_solution(rho)?;
        let (b, db) = self.origin_solution(rho)?;
        Ok((a * db - da * b) * self.ode().abel_weight(rho))
    }

    /// One branch of G and its ρ-derivative.
    pub fn branch(&self, rho: f64, s: f64, side: Side) -> Result<(C64, C64)> {
        let w = green_weight(self.d, self.lambda, s) / I2;
        let (left, right) = match side {
            Side::Below => (self.origin_solution(rho)?, self.one_solution(s)?.0),
            Side::Above => (self.one_solution(rho)?, self.origin_solution(s)?.0),
        };
        Ok((w * left.0 * right, w * left.1 * right))
    }
}

/// G(ρ,s,λ) = s^{d-1}(1-s²)^{λ-1/2}/(2i) · {u₀(ρ)u₁(s), ρ ≤ s; u₁(ρ)u₀(s), ρ ≥ s}.
pub fn green_eval(k: &GreenKernel, rho: f64, s: f64) -> Result<C64> {
    if !(rho > 0.0 && rho < 1.0 && s > 0.0 && s < 1.0) {
        return Err(GreenError::Domain(format!("(rho, s) = ({rho}, {s})")));
    }
    let side = if rho <= s { Side::Below } else { Side::Above };
    Ok(k.branch(rho, s, side)?.0)
}

/// Solution of (λ - L)u = f on a set of points, with u₁ and its derivative.
#[derive(Debug, Clone)]
pub struct ResolventOutput {
    pub rho: Vec<f64>,
    pub u: Vec<C64>,
    pub du: Vec<C64>,
    /// (u₁, u₂) with u₂ = λu₁ + ρu₁' + (d-2)/2·u₁ - f₁.
    pub pair: RadialPair<C64>,
}

pub fn resolvent_apply(k: &GreenKernel, src: &dyn Source, rhos: &[f64]) -> Result<ResolventOutput> {
    resolve(k.d, k.lambda, k.variant, src, rhos, sode::DEFAULT_TOL)
}

/// Neville extrapolation of samples (xs, ys) to x = 0.
fn extrapolate_to_zero(xs: &[f64], ys: &[C64]) -> C64 {
    let mut p = ys.to_vec();
    let n = xs.len();
    for level in 1..n {
        for i in 0..n - level {
            let (xa, xb) = (xs[i], xs[i + level]);
            p[i] = (p[i] * xb - p[i + 1] * xa) / (xb - xa);
        }
    }
    p[0]
}

const EXTRAPOLATION_POINTS: usize = 7;

/// ∫₀^{x₀} x^α g(x) dx from a degree-7 fit of the smooth factor g.
fn power_moment_integral(g: &dyn Fn(f64) -> C64, x0: f64, alpha: C64) -> Result<C64> {
    if alpha.re <= -1.0 + 1e-9 {
        return Err(GreenError::Quadrature(format!("exponent {alpha} at rho = 1")));
    }
    let n = 8;
    let ts: Vec<f64> = (0..n).map(|j| 0.5 - 0.5 * ((2 * j + 1) as f64 * PI / (2 * n) as f64).cos()).collect();
    let v = DMatrix::<C64>::from_fn(n, n, |i, j| C64::new(ts[i].powi(j as i32), 0.0));
    let rhs = DVector::<C64>::from_fn(n, |i, _| g(x0 * ts[i]));
    let c = v.lu().solve(&rhs).ok_or_else(|| GreenError::Quadrature("singular fit".into()))?;
    let mut sum = ZERO;
    for (j, cj) in c.iter().enumerate() {
        sum += cj / (alpha + j as f64 + 1.0);
    }
    Ok(sum * x0 * (x0.ln() * alpha).exp())
}

/// Resolvent by two augmented integrations carrying the Green-function
/// integrals ∫₀^ρ u₀wF and ∫_ρ¹ u₁wF along with the solutions.
pub fn resolve(d: u32, lambda: C64, variant: Variant, src: &dyn Source, rhos: &[f64], tol: f64) -> Result<ResolventOutput> {
    let ode = SpectralOde::new(d, lambda, variant)?;
    if let Some(bad) = rhos.iter().find(|r| !(0.0..=1.0).contains(*r)) {
        return Err(GreenError::Domain(format!("rho = {bad}")));
    }
    let order = sode::DEFAULT_ORDER;
    let min_pos = rhos.iter().copied().filter(|&r| r > 0.0).fold(0.5f64, f64::min);
    let max_int = rhos.iter().copied().filter(|&r| r < 1.0).fold(0.5f64, f64::max);
    let off = sode::seed_offset(lambda);
    let rho_s = off.min(0.5 * min_pos).min(0.5 / EXTRAPOLATION_POINTS as f64);
    let x_s = off.min(0.5 * (1.0 - max_int)).min(0.5 / EXTRAPOLATION_POINTS as f64);
    let mid = 0.5;

    // every abscissa at which both passes must land
    let mut pts: Vec<f64> = rhos.iter().copied().filter(|&r| r > rho_s && r < 1.0 - x_s).collect();
    for k in 1..=EXTRAPOLATION_POINTS {
        pts.push(rho_s * k as f64);
        pts.push(1.0 - x_s * k as f64);
    }
    pts.push(mid);
    pts.sort_by(f64::total_cmp);
    pts.dedup_by(|a, b| (*a - *b).abs() < 1e-15);

    let force = |rho: f64| forcing(d, lambda, &src.eval(rho), rho);

    // outward: (u₀, u₀', ∫₀^ρ u₀ w F)
    let s0 = sode::seed_origin(&ode, order);
    let (a0, da0) = s0.eval(rho_s);
    let (gx, gw) = quadrature::gauss_legendre_on(16, 0.0, rho_s);
    let mut i0 = ZERO;
    for (x, w) in gx.iter().zip(&gw) {
        i0 += s0.eval(*x).0 * green_weight(d, lambda, *x) * force(*x) * *w;
    }
    let out_rhs = |rho: f64, y: &[C64; 3]| -> [C64; 3] {
        [y[1], ode.second_derivative(rho, y[0], y[1], ZERO), y[0] * green_weight(d, lambda, rho) * force(rho)]
    };
    let out_stops: Vec<f64> = pts.iter().copied().filter(|&r| r >= rho_s && r <= 1.0 - x_s).collect();
    let h0 = 0.25 * rho_s;
    let out = rk::integrate(&out_rhs, rho_s, [a0, da0, i0], 1.0 - x_s, &out_stops, h0, Tolerance::new(tol)).map_err(SpectralError::from)?;

    // inward: (u₁, u₁', ∫_ρ¹ u₁ w F)
    let s1 = sode::seed_one(&ode, Branch::Analytic, order)?;
    let (b0, db0) = s1.eval(1.0 - x_s);
    let alpha = lambda - 0.5;
    let df = d as f64;
    let smooth = |x: f64| {
        let rho = 1.0 - x;
        s1.eval(rho).0 * force(rho) * rho.powf(df - 1.0) * ((2.0 - x).ln() * alpha).exp()
    };
    let j1 = power_moment_integral(&smooth, x_s, alpha)?;
    let in_rhs = |rho: f64, y: &[C64; 3]| -> [C64; 3] {
        [y[1], ode.second_derivative(rho, y[0], y[1], ZERO), -(y[0] * green_weight(d, lambda, rho) * force(rho))]
    };
    let in_stops: Vec<f64> = out_stops.iter().rev().copied().collect();
    let inn = rk::integrate(&in_rhs, 1.0 - x_s, [b0, db0, j1], rho_s, &in_stops, 0.25 * x_s, Tolerance::new(tol)).map_err(SpectralError::from)?;

    let n = out_stops.len();
    let at_out = |j: usize| &out.nodes[out.stops[j]].y;
    let at_in = |j: usize| &inn.nodes[inn.stops[n - 1 - j]].y;
    let jm = out_stops.iter().position(|&r| r == mid).expect("midpoint is a stop");
    let (yo, yi) = (at_out(jm), at_in(jm));
    let w = yi[0] * yo[1] - yi[1] * yo[0];
    let scale = (yi[0].norm() + yi[1].norm()) * (yo[0].norm() + yo[1].norm());
    if w.norm() < 1e-12 * scale {
        return Err(GreenError::NearEigenvalue(lambda));
    }
    let c = I2 / (w * ode.abel_weight(mid));
    let value = |j: usize| {
        let (yo, yi) = (at_out(j), at_in(j));
        let u = (yo[0] * c * yi[2] + yi[0] * yo[2] * c) / I2;
        let du = (yo[1] * c * yi[2] + yi[1] * yo[2] * c) / I2;
        (u, du)
    };
    let find = |r: f64| out_stops.iter().position(|&p| (p - r).abs() < 1e-15);

    let mut u = Vec::with_capacity(rhos.len());
    let mut du = Vec::with_capacity(rhos.len());
    for &r in rhos {
        let (val, der) = if r == 0.0 {
            let zs: Vec<f64> = (1..=EXTRAPOLATION_POINTS).map(|k| (rho_s * k as f64).powi(2)).collect();
            let ys: Vec<C64> = (1..=EXTRAPOLATION_POINTS).map(|k| value(find(rho_s * k as f64).unwrap()).0).collect();
            (extrapolate_to_zero(&zs, &ys), ZERO)
        } else if r == 1.0 {
            let xs: Vec<f64> = (1..=EXTRAPOLATION_POINTS).map(|k| x_s * k as f64).collect();
            let vals: Vec<(C64, C64)> = (1..=EXTRAPOLATION_POINTS).map(|k| value(find(1.0 - x_s * k as f64).unwrap())).collect();
            let ys: Vec<C64> = vals.iter().map(|v| v.0).collect();
            let ds: Vec<C64> = vals.iter().map(|v| v.1).collect();
            (extrapolate_to_zero(&xs, &ys), extrapolate_to_zero(&xs, &ds))
        } else {
            match find(r) {
                Some(j) => value(j),
                None => return Err(GreenError::Domain(format!("rho = {r} too close to an endpoint"))),
            }
        };
        u.push(val);
        du.push(der);
    }
    let u2: Vec<C64> = rhos
        .iter()
        .zip(u.iter().zip(&du))
        .map(|(&r, (&a, &b))| lambda * a + b * r + (df - 2.0) / 2.0 * a - src.eval(r).f1)
        .collect();
    Ok(ResolventOutput { rho: rhos.to_vec(), pair: RadialPair::new(u.clone(), u2), u, du })
}

#[derive(Debug, Clone, PartialEq)]
pub struct DecayReport {
    pub omegas: Vec<f64>,
    pub values: Vec<f64>,
    /// Least-squares log-log slope of |G - G_f| against ω.
    pub slope: f64,
}

/// |G - G_f|(ρ, s, ε + iω) over ω.
pub fn kernel_decay_scan(d: u32, rho: f64, s: f64, epsilon: f64, omegas: &[f64]) -> Result<DecayReport> {
    if !(0.1..=0.9).contains(&rho) || !(0.1..=0.9).contains(&s) {
        return Err(GreenError::Domain(format!("(rho, s) = ({rho}, {s}) outside [0.1, 0.9]")));
    }
    let mut values = Vec::with_capacity(omegas.len());
    for &w in omegas {
        let lam = C64::new(epsilon, w);
        let g = green_eval(&build_kernel(d, lam, Variant::Perturbed)?, rho, s)?;
        let gf = green_eval(&build_kernel(d, lam, Variant::Free)?, rho, s)?;
        values.push((g - gf).norm());
    }
    let pairs: Vec<(f64, f64)> = omegas.iter().zip(&values).filter(|(w, v)| **w > 0.0 && **v > 0.0).map(|(w, v)| (w.ln(), v.ln())).collect();
    let slope = if pairs.len() >= 2 { log_slope(&pairs) } else { f64::NAN };
    Ok(DecayReport { omegas: omegas.to_vec(), values, slope })
}

/// Least-squares slope of (x, y) pairs.
pub fn log_slope(pairs: &[(f64, f64)]) -> f64 {
    let n = pairs.len() as f64;
    let mx = pairs.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pairs.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pairs.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pairs.iter().map(|p| (p.0 - mx).powi(2)).sum();
    sxy / sxx
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LaplaceOptions {
    pub epsilon: f64,
    pub omega_max: f64,
    pub d_omega: f64,
    pub tol: f64,
    /// Only ω ≥ 0 is evaluated; valid for real data.
    pub conjugate_symmetry: bool,
    /// Worker threads for the frequency sweep; the sum order is fixed.
    pub jobs: usize,
}

impl Default for LaplaceOptions {
    fn default() -> Self {
        LaplaceOptions { epsilon: 0.1, omega_max: 200.0, d_omega: 0.05, tol: 1e-6, conjugate_symmetry: true, jobs: 1 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LaplaceResult {
    pub rho: Vec<f64>,
    pub values: Vec<C64>,
    /// Sup-norm of the contribution from ω in the last octave [Ω/2, Ω].
    pub tail_estimate: f64,
    /// Set when the tail exceeds 5% of the result.
    pub truncation_warning: bool,
}

/// (1/2π)∫_{-Ω}^{Ω} e^{(ε+iω)τ} [R(ε+iω) f]₁ dω by the trapezoid rule.
pub fn semigroup_laplace(d: u32, tau: f64, src: &(dyn Source + Sync), rhos: &[f64], opts: &LaplaceOptions) -> Result<LaplaceResult> {
    if !(opts.epsilon > 0.0 && opts.epsilon < 0.5) || !(opts.omega_max > 0.0 && opts.omega_max <= 400.0) || opts.d_omega <= 0.0 {
        return Err(GreenError::Domain(format!("contour parameters {opts:?}")));
    }
    let n = (opts.omega_max / opts.d_omega).round() as i64;
    let lo = if opts.conjugate_symmetry { 0 } else { -n };
    let ks: Vec<i64> = (lo..=n).collect();
    let solve = |k: i64| -> Result<Vec<C64>> {
        let lam = C64::new(opts.epsilon, k as f64 * opts.d_omega);
        Ok(resolve(d, lam, Variant::Perturbed, src, rhos, opts.tol)?.u)
    };
    let solved: Vec<Vec<C64>> = if opts.jobs <= 1 {
        ks.iter().map(|&k| solve(k)).collect::<Result<_>>()?
    } else {
        // interleaved assignment balances the cost, which grows with |ω|
        let jobs = opts.jobs.min(ks.len());
        let parts = std::thread::scope(|scope| {
            let handles: Vec<_> = (0..jobs)
                .map(|t| {
                    let ks = &ks;
                    let solve = &solve;
                    scope.spawn(move || ks.iter().skip(t).step_by(jobs).map(|&k| solve(k)).collect::<Result<Vec<_>>>())
                })
                .collect();
            handles.into_iter().map(|h| h.join().expect("laplace worker panicked")).collect::<Vec<_>>()
        });
        let mut parts: Vec<_> = parts.into_iter().collect::<Result<Vec<_>>>()?.into_iter().map(|p| p.into_iter()).collect();
        (0..ks.len()).map(|i| parts[i % jobs].next().expect("worker output")).collect()
    };
    let mut acc = vec![ZERO; rhos.len()];
    let mut tail = vec![ZERO; rhos.len()];
    for (&k, u) in ks.iter().zip(&solved) {
        let w = k as f64 * opts.d_omega;
        let lam = C64::new(opts.epsilon, w);
        let mut weight = opts.d_omega / (2.0 * PI);
        if k == n || (k == lo && !opts.conjugate_symmetry) {
            weight *= 0.5;
        }
        let phase = (lam * tau).exp() * weight;
        for (j, v) in u.iter().enumerate() {
            let term = if opts.conjugate_symmetry {
                // ω and -ω together; the ω = 0 node is not doubled
                if k == 0 {
                    C64::new((phase * v).re, 0.0)
                } else {
                    C64::new(2.0 * (phase * v).re, 0.0)
                }
            } else {
                phase * v
            };
            acc[j] += term;
            if w.abs() >= 0.5 * opts.omega_max {
                tail[j] += term;
            }
        }
    }
    let tail_estimate = tail.iter().map(|t| t.norm()).fold(0.0, f64::max);
    let scale = acc.iter().map(|t| t.norm()).fold(0.0, f64::max);
    Ok(LaplaceResult { rho: rhos.to_vec(), values: acc, tail_estimate, truncation_warning: tail_estimate > 0.05 * scale })
}

#[derive(Debug, Clone, PartialEq)]
pub struct BesselCheckReport {
    pub rho: Vec<f64>,
    /// Relative residual of b₁ in the first-order-free Bessel form.
    pub residual: Vec<f64>,
    /// |v/(C b₁) - 1| with v the transformed origin-regular solution.
    pub ratio_deviation: Vec<f64>,
    pub ratio_slope: f64,
    pub wronskian_b1_b2: Vec<C64>,
}

/// b₁ = √((1-ρ²)φ)·J_ν(aφ) (or Y_ν for b₂) and its ρ-derivative.
fn bessel_solution(nu: f64, a: C64, rho: f64, second: bool) -> Result<(C64, C64)> {
    let phi = crate::model::varphi(rho).map_err(|e| GreenError::Domain(e.to_string()))?;
    let dphi = 1.0 / (1.0 - rho * rho);
    let ((j, y), (dj, dy)) = (special_fn::bessel_jy(nu, a * phi)?, special_fn::bessel_jy_deriv(nu, a * phi)?);
    let (f, df) = if second { (y, dy) } else { (j, dj) };
    let amp = ((1.0 - rho * rho) * phi).sqrt();
    // d/dρ √((1-ρ²)φ) = (1 - 2ρφ)/(2 amp)
    let damp = (1.0 - 2.0 * rho * phi) / (2.0 * amp);
    Ok((f * amp, f * damp + df * a * dphi * amp))
}

/// Checks of the small-ρ Bessel description of the perturbed origin solution.
pub fn perturbed_bessel_check(d: u32, lambda: C64, rho_grid: &[f64]) -> Result<BesselCheckReport> {
    if rho_grid.iter().any(|&r| !(r > 0.0 && r < 0.5)) {
        return Err(GreenError::Domain("grid must lie in (0, 0.5)".into()));
    }
    let ode = SpectralOde::new(d, lambda, Variant::Perturbed)?;
    let a = ode.a_of_lambda();
    let df = d as f64;
    let nu = (df - 2.0) / 2.0;
    let potential = |rho: f64| {
        let phi = crate::model::varphi(rho).expect("rho < 1");
        let s = 1.0 - rho * rho;
        let q = crate::model::liouville_green_q(rho).expect("rho < 1");
        -(0.5 - lambda) * (0.5 - lambda) / (s * s) + (4.0 * df - df * df - 3.0) / (4.0 * phi * phi * s * s) + q
    };
    let top = rho_grid.iter().copied().fold(0.0, f64::max);
    let sol = sode::integrate(&sode::seed_origin(&ode, sode::DEFAULT_ORDER), (top * 1.5).min(0.9), 1e-13)?;
    let limit = special_fn::gamma_r(nu + 1.0)? * ((2.0 / a).ln() * nu).exp();
    let mut residual = Vec::new();
    let mut deviation = Vec::new();
    let mut wr = Vec::new();
    for &rho in rho_grid {
        // second derivative by a sixth-order difference of b₁'
        let h = 0.02 * rho;
        let mut d2 = ZERO;
        for (k, w) in [(1.0, 45.0), (2.0, -9.0), (3.0, 1.0)] {
            d2 += (bessel_solution(nu, a, rho + k * h, false)?.1 - bessel_solution(nu, a, rho - k * h, false)?.1) * w;
        }
        d2 /= 60.0 * h;
        let (b1, db1) = bessel_solution(nu, a, rho, false)?;
        let q = potential(rho);
        residual.push((d2 + q * b1).norm() / (d2.norm() + (q * b1).norm()));
        let (b2, db2) = bessel_solution(nu, a, rho, true)?;
        wr.push(b1 * db2 - db1 * b2);
        let (u, _) = sol.eval(rho)?;
        let v = u * rho.powf((df - 1.0) / 2.0) * ((1.0 - rho * rho).ln() * (0.25 + lambda * 0.5)).exp();
        deviation.push((v / (b1 * limit) - 1.0).norm());
    }
    let pairs: Vec<(f64, f64)> = rho_grid.iter().zip(&deviation).filter(|(_, v)| **v > 0.0).map(|(r, v)| (r.ln(), v.ln())).collect();
    let ratio_slope = if pairs.len() >= 2 { log_slope(&pairs) } else { f64::NAN };
    Ok(BesselCheckReport { rho: rho_grid.to_vec(), residual, ratio_deviation: deviation, ratio_slope, wronskian_b1_b2: wr })
}

/// ODE residual and round-trip error of the resolvent at one λ.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResolventCheck {
    pub lambda: C64,
    pub variant: Variant,
    /// max |residual| / max |F_λ| of R(λ)f for a smooth f, second derivative
    /// from a sixth-order difference of the returned u₁'.
    pub ode_residual: f64,
    /// max error of R(λ)(λ − L)u against u for a polynomial pair u.
    pub round_trip: f64,
}

pub fn resolvent_check(d: u32, lambda: C64, variant: Variant, tol: f64) -> Result<ResolventCheck> {
    let src = |r: f64| SourceValue {
        f1: C64::new((2.0 * r * r).cos(), 0.0),
        df1: C64::new(-4.0 * r * (2.0 * r * r).sin(), 0.0),
        f2: C64::new(1.0 + r * r, 0.0),
    };
    let ode = SpectralOde::new(d, lambda, variant)?;
    let (mut worst, mut fmax) = (0.0f64, 0.0f64);
    for j in 1..=18 {
        let r = 0.05 * j as f64;
        let h = 0.01 * r.min(1.0 - r);
        let pts: Vec<f64> = (-3..=3).map(|k| r + k as f64 * h).collect();
        let out = resolve(d, lambda, variant, &src, &pts, tol)?;
        let du = &out.du;
        let d2 = ((du[4] - du[2]) * 45.0 - (du[5] - du[1]) * 9.0 + (du[6] - du[0])) / (60.0 * h);
        let f = forcing(d, lambda, &src(r), r);
        fmax = fmax.max(f.norm());
        worst = worst.max(ode.residual(r, out.u[3], du[3], d2, f).norm());
    }
    // u = (1 + 0.3ρ², 0.5 − ρ²) pushed through λ − L by hand
    let df = d as f64;
    let pot = match variant {
        Variant::Free => 0.0,
        Variant::Perturbed => model::potential_strength(d),
    };
    let u1 = |r: f64| (1.0 + 0.3 * r * r, 0.6 * r, 0.6);
    let u2 = |r: f64| (0.5 - r * r, -2.0 * r);
    let pushed = |r: f64| {
        let (a, da, d2a) = u1(r);
        let (b, db) = u2(r);
        let l1 = -r * da - (df - 2.0) / 2.0 * a + b;
        let lap = if r == 0.0 { df * d2a } else { d2a + (df - 1.0) / r * da };
        let l2 = lap - r * db - df / 2.0 * b + pot * a;
        let dl1 = -da - r * d2a - (df - 2.0) / 2.0 * da + db;
        SourceValue { f1: lambda * a - l1, df1: lambda * da - dl1, f2: lambda * b - l2 }
    };
    let rhos: Vec<f64> = (0..=20).map(|j| j as f64 / 20.0).collect();
    let out = resolve(d, lambda, variant, &pushed, &rhos, tol)?;
    let mut round_trip = 0.0f64;
    for (j, &r) in rhos.iter().enumerate() {
        round_trip = round_trip.max((out.pair.u1[j] - u1(r).0).norm() / u1(r).0.abs().max(1.0));
        round_trip = round_trip.max((out.pair.u2[j] - u2(r).0).norm() / u2(r).0.abs().max(1.0));
    }
    Ok(ResolventCheck { lambda, variant, ode_residual: worst / fmax, round_trip })
}
