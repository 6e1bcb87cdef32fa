//! The spectral ODE
//!
//!   (1-ρ²)u'' + ((d-1)/ρ - (2λ+d)ρ)u' - K(λ)u = -F
//!
//! with K = λ(λ+d-1) + d(d-2)/4 (free) or λ(λ+d-1) - d (perturbed),
//! Frobenius seeds at both singular endpoints, fundamental solutions and
//! eigenvalue location.

use crate::model::{self, Variant};
use crate::quadrature;
use crate::rk::{self, Path, Tolerance};
use crate::C64;
use std::f64::consts::PI;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SpectralError {
    #[error("Frobenius indices collide at lambda = {0}")]
    IndexCollision(C64),
    #[error("integration failed: {0}")]
    StepFailure(#[from] rk::RkError),
    #[error("{0}")]
    Domain(String),
    #[error("contour passes too close to a root near {0}")]
    ContourTooClose(C64),
    #[error(transparent)]
    Model(#[from] model::ModelError),
}

pub type Result<T> = std::result::Result<T, SpectralError>;

const ZERO: C64 = C64 { re: 0.0, im: 0.0 };
const ONE: C64 = C64 { re: 1.0, im: 0.0 };

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralOde {
    pub d: u32,
    pub lambda: C64,
    pub variant: Variant,
}

impl SpectralOde {
    pub fn new(d: u32, lambda: C64, variant: Variant) -> Result<Self> {
        model::check_dimension(d)?;
        Ok(SpectralOde { d, lambda, variant })
    }

    /// a(λ) = i(1/2 - λ).
    pub fn a_of_lambda(&self) -> C64 {
        C64::i() * (0.5 - self.lambda)
    }

    /// Zeroth-order coefficient K(λ).
    pub fn k_coeff(&self) -> C64 {
        let df = self.d as f64;
        let base = self.lambda * (self.lambda + df - 1.0);
        match self.variant {
            Variant::Free => base + df * (df - 2.0) / 4.0,
            Variant::Perturbed => base - df,
        }
    }

    /// First-order coefficient (d-1)/ρ - (2λ+d)ρ.
    pub fn p_coeff(&self, rho: f64) -> C64 {
        let df = self.d as f64;
        (df - 1.0) / rho - (self.lambda * 2.0 + df) * rho
    }

    /// u'' solved from the equation with right-hand side -F.
    pub fn second_derivative(&self, rho: f64, u: C64, du: C64, source: C64) -> C64 {
        (self.k_coeff() * u - self.p_coeff(rho) * du - source) / (1.0 - rho * rho)
    }

    /// (1-ρ²)u'' + p u' - K u + F.
    pub fn residual(&self, rho: f64, u: C64, du: C64, d2u: C64, source: C64) -> C64 {
        (1.0 - rho * rho) * d2u + self.p_coeff(rho) * du - self.k_coeff() * u + source
    }

    /// Weight ρ^{d-1}(1-ρ²)^{λ+1/2} with W·weight constant (Abel).
    pub fn abel_weight(&self, rho: f64) -> C64 {
        let df = self.d as f64;
        let base = 1.0 - rho * rho;
        rho.powf(df - 1.0) * (base.ln() * (self.lambda + 0.5)).exp()
    }

    fn system(&self) -> impl Fn(f64, &[C64; 2]) -> [C64; 2] + '_ {
        move |rho, y| [y[1], self.second_derivative(rho, y[0], y[1], ZERO)]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Endpoint {
    Origin,
    One,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Branch {
    Analytic,
    Singular,
}

/// Truncated Frobenius series. At the origin it is a series in ρ²; at one
/// it is x^index times a series in x = 1 - ρ.
#[derive(Debug, Clone, PartialEq)]
pub struct FrobeniusSeed {
    pub ode: SpectralOde,
    pub endpoint: Endpoint,
    pub index: C64,
    pub coefficients: Vec<C64>,
    pub order: usize,
}

pub const DEFAULT_ORDER: usize = 8;
pub const DEFAULT_TOL: f64 = 1e-10;

/// Distance from an endpoint at which series values hand over to the integrator.
pub fn seed_offset(lambda: C64) -> f64 {
    1e-3f64.min(0.1 / lambda.norm().max(1e-300))
}

pub fn seed_origin(ode: &SpectralOde, order: usize) -> FrobeniusSeed {
    let df = ode.d as f64;
    let k = ode.k_coeff();
    let shift = ode.lambda * 2.0 + df;
    let mut coeffs = vec![ONE];
    for m in 0..order {
        let mf = m as f64;
        let num = (2.0 * mf) * (2.0 * mf - 1.0) + shift * (2.0 * mf) + k;
        let den = (2.0 * mf + 2.0) * (2.0 * mf + df);
        coeffs.push(coeffs[m] * num / den);
    }
    FrobeniusSeed { ode: *ode, endpoint: Endpoint::Origin, index: ZERO, coefficients: coeffs, order }
}

pub fn seed_one(ode: &SpectralOde, branch: Branch, order: usize) -> Result<FrobeniusSeed> {
    let lam = ode.lambda;
    let sigma = match branch {
        Branch::Analytic => ZERO,
        Branch::Singular => {
            if (0.5 - lam).norm() < 1e-8 {
                return Err(SpectralError::IndexCollision(lam));
            }
            0.5 - lam
        }
    };
    let df = ode.d as f64;
    let k = ode.k_coeff();
    let shift = lam * 2.0 + df;
    let mut b = vec![ONE];
    for m in 1..=order {
        let ms = sigma + m as f64;
        let lead = ms * (ms * 2.0 + lam * 2.0 - 1.0);
        if lead.norm() < 1e-12 {
            return Err(SpectralError::IndexCollision(lam));
        }
        let n1 = ms - 1.0;
        let mut acc = b[m - 1] * (-(n1 * (n1 - 1.0)) * 3.0 - shift * n1 * 2.0 - k);
        if m >= 2 {
            let n2 = ms - 2.0;
            acc += b[m - 2] * (n2 * (n2 - 1.0) + shift * n2 + k);
        }
        b.push(-acc / lead);
    }
    Ok(FrobeniusSeed { ode: *ode, endpoint: Endpoint::One, index: sigma, coefficients: b, order })
}

impl FrobeniusSeed {
    /// (u, u', u'') in ρ.
    pub fn eval_full(&self, rho: f64) -> (C64, C64, C64) {
        match self.endpoint {
            Endpoint::Origin => {
                let z = rho * rho;
                let (mut u, mut du, mut d2u) = (ZERO, ZERO, ZERO);
                let mut zp = 1.0;
                for (m, c) in self.coefficients.iter().enumerate() {
                    let n = 2.0 * m as f64;
                    u += c * zp;
                    if m >= 1 {
                        du += c * (n * zp / rho);
                        d2u += c * (n * (n - 1.0) * zp / z);
                    }
                    zp *= z;
                }
                (u, du, d2u)
            }
            Endpoint::One => {
                let x = 1.0 - rho;
                let lx = x.ln();
                let (mut u, mut dx, mut dxx) = (ZERO, ZERO, ZERO);
                for (m, c) in self.coefficients.iter().enumerate() {
                    let e = self.index + m as f64;
                    let pw = (e * lx).exp();
                    u += c * pw;
                    dx += c * e * pw / x;
                    dxx += c * e * (e - 1.0) * pw / (x * x);
                }
                (u, -dx, dxx)
            }
        }
    }

    pub fn eval(&self, rho: f64) -> (C64, C64) {
        let (u, du, _) = self.eval_full(rho);
        (u, du)
    }

    /// ODE residual of the truncated series, relative to the largest term.
    pub fn relative_residual(&self, rho: f64) -> f64 {
        let (u, du, d2u) = self.eval_full(rho);
        let r = self.ode.residual(rho, u, du, d2u, ZERO);
        let scale = ((1.0 - rho * rho) * d2u).norm() + (self.ode.p_coeff(rho) * du).norm() + (self.ode.k_coeff() * u).norm();
        r.norm() / scale.max(1e-300)
    }

    /// Point where integration starts.
    pub fn start(&self) -> f64 {
        let off = seed_offset(self.ode.lambda);
        match self.endpoint {
            Endpoint::Origin => off,
            Endpoint::One => 1.0 - off,
        }
    }
}

/// A seeded solution with dense output on the span between its endpoint and
/// the integration target.
#[derive(Debug, Clone)]
pub struct FundamentalSolution {
    pub ode: SpectralOde,
    pub seed: FrobeniusSeed,
    pub path: Path<2>,
}

pub fn integrate(seed: &FrobeniusSeed, to: f64, tol: f64) -> Result<FundamentalSolution> {
    integrate_with_stops(seed, to, &[], tol)
}

/// Integration that lands exactly on `stops`.
pub fn integrate_with_stops(seed: &FrobeniusSeed, to: f64, stops: &[f64], tol: f64) -> Result<FundamentalSolution> {
    if !(to > 0.0 && to < 1.0) {
        return Err(SpectralError::Domain(format!("target {to} not in (0,1)")));
    }
    let start = seed.start();
    let bad = match seed.endpoint {
        Endpoint::Origin => to > 1.0 - 1e-3 + 1e-15,
        Endpoint::One => to < 1e-3 - 1e-15,
    };
    if bad {
        return Err(SpectralError::Domain(format!("target {to} too close to the opposite endpoint")));
    }
    let (u, du) = seed.eval(start);
    let ode = seed.ode;
    let f = ode.system();
    let toward = (to - start).abs();
    let path = if toward == 0.0 || (to - start) * direction(seed.endpoint) < 0.0 {
        Path { nodes: vec![rk::Node { x: start, y: [u, du] }], stops: vec![] }
    } else {
        let h0 = (0.25 * seed_offset(ode.lambda)).min(toward);
        rk::integrate(&f, start, [u, du], to, stops, h0, Tolerance::new(tol))?
    };
    Ok(FundamentalSolution { ode, seed: seed.clone(), path })
}

fn direction(e: Endpoint) -> f64 {
    match e {
        Endpoint::Origin => 1.0,
        Endpoint::One => -1.0,
    }
}

impl FundamentalSolution {
    /// Closed interval on which `eval` is available.
    pub fn domain(&self) -> (f64, f64) {
        let end = self.path.last().x;
        match self.seed.endpoint {
            Endpoint::Origin => (0.0, end),
            Endpoint::One => (end, 1.0),
        }
    }

    pub fn eval(&self, rho: f64) -> Result<(C64, C64)> {
        let (lo, hi) = self.domain();
        if rho < lo - 1e-14 || rho > hi + 1e-14 {
            return Err(SpectralError::Domain(format!("rho = {rho} outside [{lo}, {hi}]")));
        }
        let start = self.seed.start();
        let in_series = match self.seed.endpoint {
            Endpoint::Origin => rho <= start,
            Endpoint::One => rho >= start,
        };
        if in_series {
            return Ok(self.seed.eval(rho));
        }
        let f = self.ode.system();
        let y = rk::restep(&f, self.path.nearest(rho), rho);
        Ok((y[0], y[1]))
    }

    pub fn eval_full(&self, rho: f64) -> Result<(C64, C64, C64)> {
        let (u, du) = self.eval(rho)?;
        Ok((u, du, self.ode.second_derivative(rho, u, du, ZERO)))
    }

    /// Multiply by a constant (returns a rescaled copy).
    pub fn scaled(&self, c: C64) -> ScaledSolution<'_> {
        ScaledSolution { base: self, factor: c }
    }
}

/// A fundamental solution times a constant.
#[derive(Debug, Clone, Copy)]
pub struct ScaledSolution<'a> {
    pub base: &'a FundamentalSolution,
    pub factor: C64,
}

impl ScaledSolution<'_> {
    pub fn eval(&self, rho: f64) -> Result<(C64, C64)> {
        let (u, du) = self.base.eval(rho)?;
        Ok((u * self.factor, du * self.factor))
    }
}

/// u₁u₂' - u₁'u₂.
pub fn wronskian(s1: &FundamentalSolution, s2: &FundamentalSolution, rho: f64) -> Result<C64> {
    let (a, da) = s1.eval(rho)?;
    let (b, db) = s2.eval(rho)?;
    Ok(a * db - da * b)
}

/// Closed-form λ = 1 solutions: u₀, u₁ of the free equation and h₁ of the
/// perturbed one.
#[derive(Debug, Clone, Copy)]
pub struct Lambda1ClosedForms {
    pub d: u32,
}

pub fn explicit_lambda1(d: u32) -> Result<Lambda1ClosedForms> {
    model::check_dimension(d)?;
    Ok(Lambda1ClosedForms { d })
}

impl Lambda1ClosedForms {
    fn k(&self) -> f64 {
        self.d as f64 / 2.0 - 1.0
    }

    /// u₀ = 1/((1+s)^k s), s = √(1-ρ²), k = d/2 - 1; returns (u, u').
    pub fn u0(&self, rho: f64) -> (f64, f64) {
        let k = self.k();
        let s = (1.0 - rho * rho).sqrt();
        let u = 1.0 / ((1.0 + s).powf(k) * s);
        let du_ds = -u / s - k * u / (1.0 + s);
        (u, du_ds * (-rho / s))
    }

    /// u₁ = ((1-s)^k - (1+s)^k)/(ρ^{d-2} s); returns (u, u').
    pub fn u1(&self, rho: f64) -> (f64, f64) {
        let k = self.k();
        let df = self.d as f64;
        let s = (1.0 - rho * rho).sqrt();
        let one_minus_s = rho * rho / (1.0 + s);
        let n = one_minus_s.powf(k) - (1.0 + s).powf(k);
        let dn = -k * one_minus_s.powf(k - 1.0) - k * (1.0 + s).powf(k - 1.0);
        let rp = rho.powf(2.0 - df);
        let u = n * rp / s;
        let ds = -rho / s;
        let du = dn * ds * rp / s + n * (2.0 - df) * rho.powf(1.0 - df) / s - n * rp * ds / (s * s);
        (u, du)
    }

    /// W(u₀, u₁) = (d-2)/(ρ^{d-1}(1-ρ²)^{3/2}).
    pub fn wronskian_u0_u1(&self, rho: f64) -> f64 {
        let df = self.d as f64;
        (df - 2.0) / (rho.powf(df - 1.0) * (1.0 - rho * rho).powf(1.5))
    }

    /// h₁ = ∫_{1/2}^ρ s^{1-d}(1-s²)^{-3/2} ds; returns (h, h').
    pub fn h1(&self, rho: f64) -> (f64, f64) {
        let df = self.d as f64;
        let integrand = |s: f64| s.powf(1.0 - df) * (1.0 - s * s).powf(-1.5);
        if rho == 0.5 {
            return (0.0, integrand(rho));
        }
        let (lo, hi, sign) = if rho > 0.5 { (0.5, rho, 1.0) } else { (rho, 0.5, -1.0) };
        // grade toward whichever end carries the singular factor
        let mut total = 0.0;
        let panels = if rho > 0.5 {
            quadrature::graded_panels(lo, hi, 30)
        } else {
            quadrature::graded_panels(hi, lo, 30).into_iter().map(|(a, b)| (b.min(a), a.max(b))).collect()
        };
        for (a, b) in panels {
            if b > a {
                total += quadrature::composite(integrand, a, b, 1, 20);
            }
        }
        (sign * total, integrand(rho))
    }
}

/// Options for the shooting indicator.
#[derive(Debug, Clone, Copy)]
pub struct IndicatorOptions {
    pub tol: f64,
    pub order: usize,
    pub rho_mid: f64,
}

impl Default for IndicatorOptions {
    fn default() -> Self {
        IndicatorOptions { tol: DEFAULT_TOL, order: DEFAULT_ORDER, rho_mid: 0.5 }
    }
}

/// μ(λ) = W(u_origin, u_analytic-at-1)(ρ_mid), with both seeds normalized to
/// leading coefficient 1. Its zeros are the eigenvalues.
pub fn eigen_indicator(d: u32, lambda: C64, variant: Variant) -> Result<C64> {
    eigen_indicator_with(d, lambda, variant, IndicatorOptions::default())
}

pub fn eigen_indicator_with(d: u32, lambda: C64, variant: Variant, opts: IndicatorOptions) -> Result<C64> {
    if (0.5 - lambda).norm() < 1e-6 {
        return Err(SpectralError::IndexCollision(lambda));
    }
    let ode = SpectralOde::new(d, lambda, variant)?;
    let s0 = integrate(&seed_origin(&ode, opts.order), opts.rho_mid, opts.tol)?;
    let s1 = integrate(&seed_one(&ode, Branch::Analytic, opts.order)?, opts.rho_mid, opts.tol)?;
    wronskian(&s0, &s1, opts.rho_mid)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Root {
    pub lambda: C64,
    /// Winding number of the enclosing cell.
    pub multiplicity: i32,
    /// Whether Newton polishing converged.
    pub refined: bool,
}

/// Tiling of {Re λ in re_edges range, |Im λ| ≤ ω_max}.
#[derive(Debug, Clone)]
pub struct ScanOptions {
    pub re_edges: Vec<f64>,
    /// Number of tiles along the imaginary direction; forced odd so the real
    /// axis never lies on an edge.
    pub im_tiles: usize,
    pub indicator: IndicatorOptions,
}

impl ScanOptions {
    pub fn for_window(omega_max: f64) -> Self {
        let mut n = (2.0 * omega_max / 9.0).ceil() as usize;
        if n % 2 == 0 {
            n += 1;
        }
        ScanOptions { re_edges: vec![0.0, 0.75, 1.375, 2.0], im_tiles: n.max(1), indicator: IndicatorOptions::default() }
    }
}

struct Indicator {
    d: u32,
    variant: Variant,
    opts: IndicatorOptions,
}

impl Indicator {
    fn eval(&self, lambda: C64) -> Result<C64> {
        eigen_indicator_with(self.d, lambda, self.variant, self.opts)
    }

    /// Continuous change of arg μ along the segment a → b.
    fn arg_change(&self, a: C64, b: C64) -> Result<f64> {
        let pieces = ((b - a).norm() / 0.5).ceil().max(1.0) as usize;
        let mut total = 0.0;
        let mut za = a;
        let mut ma = self.eval(a)?;
        for j in 1..=pieces {
            let zb = a + (b - a) * (j as f64 / pieces as f64);
            let mb = self.eval(zb)?;
            total += self.refine_arg(za, ma, zb, mb, 0)?;
            za = zb;
            ma = mb;
        }
        Ok(total)
    }

    fn refine_arg(&self, a: C64, ma: C64, b: C64, mb: C64, depth: u32) -> Result<f64> {
        let zm = (a + b) * 0.5;
        let mm = self.eval(zm)?;
        let d1 = (mm / ma).arg();
        let d2 = (mb / mm).arg();
        let whole = (mb / ma).arg();
        let limit = PI / 3.0;
        if d1.abs() < limit && d2.abs() < limit && (d1 + d2 - whole).abs() < 1e-9 {
            return Ok(d1 + d2);
        }
        if depth > 40 || (b - a).norm() < 1e-9 {
            return Err(SpectralError::ContourTooClose(zm));
        }
        Ok(self.refine_arg(a, ma, zm, mm, depth + 1)? + self.refine_arg(zm, mm, b, mb, depth + 1)?)
    }

    /// Winding number of μ around the rectangle [x0,x1]×[y0,y1].
    fn winding(&self, x0: f64, x1: f64, y0: f64, y1: f64) -> Result<i32> {
        let c = |x: f64, y: f64| C64::new(x, y);
        let total = self.arg_change(c(x0, y0), c(x1, y0))?
            + self.arg_change(c(x1, y0), c(x1, y1))?
            + self.arg_change(c(x1, y1), c(x0, y1))?
            + self.arg_change(c(x0, y1), c(x0, y0))?;
        Ok((total / (2.0 * PI)).round() as i32)
    }

    fn newton(&self, start: C64) -> Result<Option<C64>> {
        let mut z = start;
        for _ in 0..60 {
            let h = 1e-5 * z.norm().max(1.0);
            let f = self.eval(z)?;
            let df = (self.eval(z + h)? - self.eval(z - h)?) / (2.0 * h);
            if df.norm() == 0.0 {
                return Ok(None);
            }
            let step = f / df;
            z -= step;
            if step.norm() < 1e-13 * z.norm().max(1.0) {
                return Ok(Some(z));
            }
        }
        Ok(None)
    }

    /// Locate the roots inside a rectangle with known winding number.
    fn locate(&self, x0: f64, x1: f64, y0: f64, y1: f64, count: i32, depth: u32, out: &mut Vec<Root>) -> Result<()> {
        if count <= 0 {
            return Ok(());
        }
        let inside = |z: C64| z.re >= x0 && z.re <= x1 && z.im >= y0 && z.im <= y1;
        if count == 1 {
            let center = C64::new(0.5 * (x0 + x1), 0.5 * (y0 + y1));
            if let Some(z) = self.newton(center)? {
                if inside(z) {
                    out.push(Root { lambda: z, multiplicity: 1, refined: true });
                    return Ok(());
                }
            }
        }
        if depth > 12 {
            out.push(Root { lambda: C64::new(0.5 * (x0 + x1), 0.5 * (y0 + y1)), multiplicity: count, refined: false });
            return Ok(());
        }
        // off-center split keeps the new edges away from symmetric roots
        let xm = x0 + 0.5137 * (x1 - x0);
        let ym = y0 + 0.4861 * (y1 - y0);
        for (a, b, c, d) in [(x0, xm, y0, ym), (xm, x1, y0, ym), (x0, xm, ym, y1), (xm, x1, ym, y1)] {
            let n = self.winding(a, b, c, d)?;
            self.locate(a, b, c, d, n, depth + 1, out)?;
        }
        Ok(())
    }
}

/// Argument-principle scan of μ over the tiled window, with Newton polishing.
pub fn scan_halfplane(d: u32, variant: Variant, omega_max: f64, opts: &ScanOptions) -> Result<Vec<Root>> {
    if !(omega_max > 0.0 && omega_max <= 60.0) {
        return Err(SpectralError::Domain(format!("omega_max = {omega_max} not in (0, 60]")));
    }
    let mut last_err = None;
    // retile with a small shift when an edge grazes a root
    for attempt in 0..3 {
        let shift = attempt as f64 * 0.0173;
        match scan_once(d, variant, omega_max + shift, opts, shift) {
            Ok(r) => return Ok(r),
            Err(SpectralError::ContourTooClose(z)) => last_err = Some(SpectralError::ContourTooClose(z)),
            Err(e) => return Err(e),
        }
    }
    Err(last_err.expect("at least one attempt"))
}

fn scan_once(d: u32, variant: Variant, omega_max: f64, opts: &ScanOptions, shift: f64) -> Result<Vec<Root>> {
    let ind = Indicator { d, variant, opts: opts.indicator };
    let nx = opts.re_edges.len();
    let ny = opts.im_tiles;
    let xs: Vec<f64> = opts.re_edges.iter().enumerate().map(|(i, &x)| if i > 0 && i + 1 < nx { x + shift } else { x }).collect();
    let ys: Vec<f64> = (0..=ny).map(|j| -omega_max + 2.0 * omega_max * j as f64 / ny as f64).collect();
    let c = |x: f64, y: f64| C64::new(x, y);
    // arg changes on every shared edge, computed once
    let mut horiz = vec![vec![0.0; nx - 1]; ny + 1];
    for (j, &y) in ys.iter().enumerate() {
        for i in 0..nx - 1 {
            horiz[j][i] = ind.arg_change(c(xs[i], y), c(xs[i + 1], y))?;
        }
    }
    let mut vert = vec![vec![0.0; ny]; nx];
    for (i, &x) in xs.iter().enumerate() {
        for j in 0..ny {
            vert[i][j] = ind.arg_change(c(x, ys[j]), c(x, ys[j + 1]))?;
        }
    }
    let mut roots = Vec::new();
    for j in 0..ny {
        for i in 0..nx - 1 {
            let total = horiz[j][i] + vert[i + 1][j] - horiz[j + 1][i] - vert[i][j];
            let count = (total / (2.0 * PI)).round() as i32;
            ind.locate(xs[i], xs[i + 1], ys[j], ys[j + 1], count, 0, &mut roots)?;
        }
    }
    roots.sort_by(|a, b| a.lambda.im.total_cmp(&b.lambda.im).then(a.lambda.re.total_cmp(&b.lambda.re)));
    Ok(roots)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GeneralizedEigenReport {
    pub d: u32,
    /// ∫₀¹ s^{d-1}(1-s²)^{1/2} ds by quadrature.
    pub integral: f64,
    /// B(d/2, 3/2)/2.
    pub beta_value: f64,
    pub positive: bool,
}

/// Obstruction to a Jordan block at λ = 1.
pub fn generalized_eigen_check(d: u32) -> Result<GeneralizedEigenReport> {
    model::check_dimension(d)?;
    let df = d as f64;
    // s = sin θ turns the integrand into sin^{d-1}θ cos²θ, smooth on [0, π/2]
    let integral = quadrature::composite(|t: f64| t.sin().powf(df - 1.0) * t.cos().powi(2), 0.0, PI / 2.0, 4, 32);
    let g = |x: f64| crate::special_fn::gamma_r(x).expect("positive argument");
    let beta_value = 0.5 * g(df / 2.0) * g(1.5) / g(df / 2.0 + 1.5);
    Ok(GeneralizedEigenReport { d, integral, beta_value, positive: integral > 0.0 })
}

/// Model pair near ρ = 1:
/// w₁ = (1+ρ)^{3/4-λ/2}(1-ρ)^{1/4+λ/2}/√a(λ), w₂ the same with λ ↦ 1-λ
/// in the exponents (normalization kept at √a(λ)).
#[derive(Debug, Clone, Copy)]
pub struct NearOneModel {
    pub lambda: C64,
}

pub fn near_one_model(lambda: C64) -> Result<NearOneModel> {
    if (lambda - 0.5).norm() < 1e-12 {
        return Err(SpectralError::IndexCollision(lambda));
    }
    Ok(NearOneModel { lambda })
}

impl NearOneModel {
    fn norm(&self) -> C64 {
        (C64::i() * (0.5 - self.lambda)).sqrt()
    }

    fn power_pair(&self, lam: C64, rho: f64) -> (C64, C64) {
        let alpha = 0.75 - lam * 0.5;
        let beta = 0.25 + lam * 0.5;
        let w = ((1.0 + rho).ln() * alpha).exp() * ((1.0 - rho).ln() * beta).exp() / self.norm();
        let dw = w * (alpha / (1.0 + rho) - beta / (1.0 - rho));
        (w, dw)
    }

    pub fn w1(&self, rho: f64) -> (C64, C64) {
        self.power_pair(self.lambda, rho)
    }

    pub fn w2(&self, rho: f64) -> (C64, C64) {
        self.power_pair(1.0 - self.lambda, rho)
    }

    pub fn wronskian(&self, rho: f64) -> C64 {
        let (a, da) = self.w1(rho);
        let (b, db) = self.w2(rho);
        a * db - da * b
    }

    /// Analytic-at-1 solution of the full equation in the first-order-free
    /// form, h = u·ρ^{(d-1)/2}(1-ρ²)^{1/4+λ/2}, scaled so that h/w₁ → 1.
    pub fn transformed_ratio(&self, sol: &FundamentalSolution, rho: f64) -> Result<C64> {
        let lam = self.lambda;
        let df = sol.ode.d as f64;
        let (u, _) = sol.eval(rho)?;
        let h = u * rho.powf((df - 1.0) / 2.0) * ((1.0 - rho * rho).ln() * (0.25 + lam * 0.5)).exp();
        let (w, _) = self.w1(rho);
        let limit = (2f64.ln() * (lam - 0.5)).exp() * self.norm();
        Ok(h / (w * limit))
    }
}
