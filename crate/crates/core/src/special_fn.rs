//! Complex Gamma, Gauss hypergeometric 2F1 on [0,1), Bessel J/Y of small
//! integer and half-integer order, and the connection coefficient c3.

use num_complex::Complex64 as C64;
use std::f64::consts::PI;
use thiserror::Error;

use crate::model::Variant;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SpecialFnError {
    #[error("pole of the Gamma function at z = {0}")]
    Pole(C64),
    #[error("argument outside the supported domain: {0}")]
    Domain(String),
    #[error("unsupported parameters: {0}")]
    Param(String),
}

pub type Result<T> = std::result::Result<T, SpecialFnError>;

const LANCZOS_G: f64 = 7.0;
const LANCZOS_P: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_59,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];

/// Distance test against {0, -1, -2, ...}.
fn near_nonpositive_integer(z: C64, tol: f64) -> bool {
    if z.im.abs() > tol || z.re > 0.5 {
        return false;
    }
    (z.re - z.re.round()).abs() <= tol
}

fn lanczos(z: C64) -> C64 {
    let z = z - 1.0;
    let mut acc = C64::new(LANCZOS_P[0], 0.0);
    for (i, &p) in LANCZOS_P.iter().enumerate().skip(1) {
        acc += p / (z + i as f64);
    }
    let t = z + LANCZOS_G + 0.5;
    ((z + 0.5) * t.ln() - t).exp() * acc * (2.0 * PI).sqrt()
}

pub fn gamma_c(z: C64) -> Result<C64> {
    if near_nonpositive_integer(z, 1e-14) {
        return Err(SpecialFnError::Pole(z));
    }
    if z.re < 0.5 {
        let s = (z * PI).sin();
        Ok(PI / (s * lanczos(1.0 - z)))
    } else {
        Ok(lanczos(z))
    }
}

/// 1/Gamma(z), exactly zero at the poles of Gamma.
pub fn rgamma_c(z: C64) -> C64 {
    if near_nonpositive_integer(z, 1e-14) {
        return C64::new(0.0, 0.0);
    }
    if z.re < 0.5 {
        (z * PI).sin() * lanczos(1.0 - z) / PI
    } else {
        1.0 / lanczos(z)
    }
}

pub fn gamma_r(x: f64) -> Result<f64> {
    gamma_c(C64::new(x, 0.0)).map(|g| g.re)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HypergeometricParams {
    pub a: C64,
    pub b: C64,
    pub c: C64,
}

impl HypergeometricParams {
    pub fn new(a: C64, b: C64, c: C64) -> Self {
        Self { a, b, c }
    }

    pub fn shifted(&self) -> Self {
        Self::new(self.a + 1.0, self.b + 1.0, self.c + 1.0)
    }

    fn validate(&self) -> Result<()> {
        if near_nonpositive_integer(self.c, 1e-14) {
            return Err(SpecialFnError::Param(format!(
                "c = {} is a nonpositive integer",
                self.c
            )));
        }
        Ok(())
    }
}

const SERIES_LIMIT: f64 = 0.5;
const MAX_TERMS: usize = 5000;
const CANCELLATION_LIMIT: f64 = 1e3;

/// Power series about 0, returning (F, F', largest term / |F|).
fn series_at_zero(p: &HypergeometricParams, z: f64) -> (C64, C64, f64) {
    let mut term = C64::new(1.0, 0.0);
    let mut sum = term;
    let mut dsum = C64::new(0.0, 0.0);
    let mut biggest: f64 = 1.0;
    let mut quiet = 0;
    for n in 0..MAX_TERMS {
        let nf = n as f64;
        let ratio = (p.a + nf) * (p.b + nf) / ((p.c + nf) * (nf + 1.0));
        // derivative term of z^{n+1} before multiplying by z
        let dterm = term * ratio * (nf + 1.0);
        term *= ratio * z;
        if term == C64::new(0.0, 0.0) && dterm == C64::new(0.0, 0.0) {
            break;
        }
        sum += term;
        dsum += dterm;
        biggest = biggest.max(term.norm());
        if term.norm() <= 1e-17 * sum.norm() && dterm.norm() <= 1e-17 * dsum.norm().max(1e-300)
        {
            quiet += 1;
            if quiet >= 2 && ratio.norm() * z < 1.0 {
                break;
            }
        } else {
            quiet = 0;
        }
    }
    (sum, dsum, biggest / sum.norm().max(1e-300))
}

/// One Taylor step of the hypergeometric ODE from z0 (value v, slope dv) to z0+h.
/// Works on the scaled coefficients t_n h^n to keep the recurrence in range.
fn taylor_step(p: &HypergeometricParams, z0: f64, v: C64, dv: C64, h: f64) -> (C64, C64, f64) {
    let p0 = z0 * (1.0 - z0);
    let p1 = 1.0 - 2.0 * z0;
    let p2 = -1.0;
    let abc = p.a + p.b + 1.0;
    let q0 = p.c - abc * z0;
    let q1 = -abc;
    let r = -p.a * p.b;
    let mut s_prev = v;
    let mut s_cur = dv * h;
    let mut val = s_prev + s_cur;
    let mut der = s_cur; // sum n s_n, divided by h at the end
    let mut biggest = s_prev.norm().max(s_cur.norm());
    let mut quiet = 0;
    for n in 0..MAX_TERMS {
        let nf = n as f64;
        let num = (p1 * nf * (nf + 1.0) + q0 * (nf + 1.0)) * s_cur * h
            + (p2 * nf * (nf - 1.0) + q1 * nf + r) * s_prev * (h * h);
        let s_next = -num / (p0 * (nf + 1.0) * (nf + 2.0));
        val += s_next;
        der += s_next * (nf + 2.0);
        biggest = biggest.max(s_next.norm());
        s_prev = s_cur;
        s_cur = s_next;
        if s_next.norm() * (nf + 2.0) <= 1e-17 * val.norm().min(der.norm()).max(1e-300) {
            quiet += 1;
            if quiet >= 3 {
                break;
            }
        } else {
            quiet = 0;
        }
    }
    (val, der / h, biggest / val.norm().max(1e-300))
}

fn hyp2f1_pair(p: &HypergeometricParams, z: f64) -> Result<(C64, C64)> {
    p.validate()?;
    if !(0.0..1.0).contains(&z) || !z.is_finite() {
        return Err(SpecialFnError::Domain(format!("z = {z} not in [0,1)")));
    }
    if p.a == C64::new(0.0, 0.0) || p.b == C64::new(0.0, 0.0) {
        return Ok((C64::new(1.0, 0.0), C64::new(0.0, 0.0)));
    }
    // The series is summed up to z_s; large parameters shrink z_s so that the
    // terms stay within CANCELLATION_LIMIT of the sum.
    let mut zs = z.min(SERIES_LIMIT);
    let (mut v, mut dv, mut growth) = series_at_zero(p, zs);
    while growth > CANCELLATION_LIMIT && zs > 1e-8 {
        zs *= 0.25;
        (v, dv, growth) = series_at_zero(p, zs);
    }
    let mut z0 = zs;
    let mut h_cap = 0.2f64;
    while z0 < z {
        let mut h = (z - z0).min(h_cap).min(0.5 * z0).min(0.5 * (1.0 - z0));
        let (nv, ndv) = loop {
            let (nv, ndv, g) = taylor_step(p, z0, v, dv, h);
            if g <= CANCELLATION_LIMIT || h < 1e-12 {
                break (nv, ndv);
            }
            h *= 0.5;
        };
        // let the next step grow again moderately
        h_cap = (2.0 * h).min(0.2);
        v = nv;
        dv = ndv;
        z0 = if z - z0 <= h { z } else { z0 + h };
    }
    Ok((v, dv))
}

pub fn hyp2f1(p: &HypergeometricParams, z: f64) -> Result<C64> {
    hyp2f1_pair(p, z).map(|(v, _)| v)
}

/// d/dz 2F1 through the contiguous identity (ab/c) 2F1(a+1,b+1;c+1;z).
pub fn hyp2f1_deriv(p: &HypergeometricParams, z: f64) -> Result<C64> {
    p.validate()?;
    if p.a == C64::new(0.0, 0.0) || p.b == C64::new(0.0, 0.0) {
        if !(0.0..1.0).contains(&z) {
            return Err(SpecialFnError::Domain(format!("z = {z} not in [0,1)")));
        }
        return Ok(C64::new(0.0, 0.0));
    }
    let f = hyp2f1(&p.shifted(), z)?;
    Ok(p.a * p.b / p.c * f)
}

/// Value and derivative of 2F1 from the same continuation pass.
pub fn hyp2f1_with_deriv(p: &HypergeometricParams, z: f64) -> Result<(C64, C64)> {
    hyp2f1_pair(p, z)
}

// ---------------------------------------------------------------------------
// Bessel functions

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Order {
    Integer(u32),
    /// n + 1/2 with n >= -1
    Half(i32),
}

fn classify_order(nu: f64) -> Result<Order> {
    let twice = 2.0 * nu;
    if (twice - twice.round()).abs() > 1e-12 || !(-1.0..=7.0).contains(&twice.round()) {
        return Err(SpecialFnError::Param(format!("Bessel order {nu} unsupported")));
    }
    let k = twice.round() as i32;
    if k % 2 == 0 {
        Ok(Order::Integer((k / 2) as u32))
    } else {
        Ok(Order::Half((k - 1) / 2))
    }
}

fn check_argument(z: C64) -> Result<()> {
    if z.norm() == 0.0 || !z.re.is_finite() || !z.im.is_finite() {
        return Err(SpecialFnError::Domain("Bessel argument must be nonzero".into()));
    }
    Ok(())
}

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;
const ASCENDING_LIMIT: f64 = 12.0;
const HALF_SERIES_LIMIT: f64 = 4.0;

fn factorial(n: u32) -> f64 {
    (1..=n).fold(1.0, |acc, k| acc * k as f64)
}

/// Ascending series sum_k (-z^2/4)^k / (k! Gamma(nu+k+1)) times (z/2)^nu.
fn j_ascending(nu: f64, z: C64) -> C64 {
    let q = -z * z / 4.0;
    let mut term = C64::new(1.0 / gamma_r(nu + 1.0).expect("positive argument"), 0.0);
    let mut sum = term;
    for k in 1..400 {
        let kf = k as f64;
        term *= q / (kf * (nu + kf));
        sum += term;
        if term.norm() <= 1e-17 * sum.norm() && kf > q.norm().sqrt() {
            break;
        }
    }
    (nu * (z / 2.0).ln()).exp() * sum
}

fn digamma_int(m: u32) -> f64 {
    // psi(m) for positive integer m
    -EULER_GAMMA + (1..m).map(|j| 1.0 / j as f64).sum::<f64>()
}

fn y_integer_ascending(n: u32, z: C64) -> C64 {
    let half = z / 2.0;
    let q = z * z / 4.0;
    let mut finite = C64::new(0.0, 0.0);
    if n > 0 {
        let mut qk = C64::new(1.0, 0.0);
        for k in 0..n {
            finite += qk * factorial(n - k - 1) / factorial(k);
            qk *= q;
        }
        finite *= half.powi(-(n as i32));
    }
    let jn = j_ascending(n as f64, z);
    let mut term = C64::new(1.0 / factorial(n), 0.0);
    let mut sum = term * (digamma_int(1) + digamma_int(n + 1));
    for k in 1..400u32 {
        term *= -q / (k as f64 * (n + k) as f64);
        let piece = term * (digamma_int(k + 1) + digamma_int(n + k + 1));
        sum += piece;
        if piece.norm() <= 1e-17 * sum.norm() && k as f64 > q.norm().sqrt() {
            break;
        }
    }
    -finite / PI + 2.0 / PI * half.ln() * jn - half.powi(n as i32) / PI * sum
}

/// Hankel asymptotic sums for Re w >= 0, returning (H1, H2).
fn hankel_pair(nu: f64, w: C64) -> (C64, C64) {
    let mu = 4.0 * nu * nu;
    let mut ak = C64::new(1.0, 0.0);
    let mut s1 = ak;
    let mut s2 = ak;
    let i = C64::new(0.0, 1.0);
    let mut prev = f64::INFINITY;
    for k in 1..80 {
        let kf = k as f64;
        let odd = 2.0 * kf - 1.0;
        ak *= (mu - odd * odd) / (kf * 8.0 * w);
        let mag = ak.norm();
        if mag == 0.0 {
            break;
        }
        if mag > prev {
            break;
        }
        let ik = i.powi(k);
        s1 += ik * ak;
        s2 += ak / ik;
        prev = mag;
        if mag < 1e-17 {
            break;
        }
    }
    let chi = w - nu * PI / 2.0 - PI / 4.0;
    let pref = (2.0 / (PI * w)).sqrt();
    (pref * (i * chi).exp() * s1, pref * (-i * chi).exp() * s2)
}

/// Spherical j_n, y_n by trigonometric closed forms and upward recurrence.
fn spherical_trig(n: i32, z: C64) -> (C64, C64) {
    let (s, c) = (z.sin(), z.cos());
    let j0 = s / z;
    let y0 = -c / z;
    if n == 0 {
        return (j0, y0);
    }
    let j1 = s / (z * z) - c / z;
    let y1 = -c / (z * z) - s / z;
    let (mut jp, mut jc, mut yp, mut yc) = (j0, j1, y0, y1);
    for k in 1..n {
        let f = (2 * k + 1) as f64 / z;
        let jn = f * jc - jp;
        let yn = f * yc - yp;
        jp = jc;
        jc = jn;
        yp = yc;
        yc = yn;
    }
    (jc, yc)
}

fn half_order_pair(n: i32, z: C64) -> (C64, C64) {
    let nu = n as f64 + 0.5;
    let pref = (2.0 * z / PI).sqrt();
    if n == -1 {
        // J_{-1/2} = sqrt(2/(pi z)) cos z, Y_{-1/2} = sqrt(2/(pi z)) sin z
        let r = (2.0 / (PI * z)).sqrt();
        return (r * z.cos(), r * z.sin());
    }
    let (jn, yn) = spherical_trig(n, z);
    let j = if z.norm() < HALF_SERIES_LIMIT {
        j_ascending(nu, z)
    } else {
        pref * jn
    };
    (j, pref * yn)
}

fn integer_order_pair(n: u32, z: C64) -> (C64, C64) {
    if z.norm() <= ASCENDING_LIMIT {
        return (j_ascending(n as f64, z), y_integer_ascending(n, z));
    }
    let nu = n as f64;
    if z.re >= 0.0 {
        let (h1, h2) = hankel_pair(nu, z);
        ((h1 + h2) / 2.0, (h1 - h2) / C64::new(0.0, 2.0))
    } else {
        let w = -z;
        let (h1, h2) = hankel_pair(nu, w);
        let jw = (h1 + h2) / 2.0;
        let yw = (h1 - h2) / C64::new(0.0, 2.0);
        let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
        (sign * jw, sign * (yw + C64::new(0.0, 2.0) * jw))
    }
}

/// (J_nu(z), Y_nu(z)) for the supported orders.
pub fn bessel_jy(nu: f64, z: C64) -> Result<(C64, C64)> {
    check_argument(z)?;
    Ok(match classify_order(nu)? {
        Order::Integer(n) => integer_order_pair(n, z),
        Order::Half(n) => half_order_pair(n, z),
    })
}

pub fn bessel_j(nu: f64, z: C64) -> Result<C64> {
    bessel_jy(nu, z).map(|p| p.0)
}

pub fn bessel_y(nu: f64, z: C64) -> Result<C64> {
    bessel_jy(nu, z).map(|p| p.1)
}

/// Derivatives from J'_nu = J_{nu-1} - (nu/z) J_nu (and likewise for Y).
pub fn bessel_jy_deriv(nu: f64, z: C64) -> Result<(C64, C64)> {
    if nu == 0.0 {
        let (j1, y1) = bessel_jy(1.0, z)?;
        return Ok((-j1, -y1));
    }
    let (j, y) = bessel_jy(nu, z)?;
    let (jm, ym) = bessel_jy(nu - 1.0, z)?;
    Ok((jm - nu / z * j, ym - nu / z * y))
}

/// Integer-order Bessel pair forced through one branch; used to validate the crossover.
pub fn bessel_jy_integer_branch(n: u32, z: C64, ascending: bool) -> (C64, C64) {
    if ascending {
        (j_ascending(n as f64, z), y_integer_ascending(n, z))
    } else {
        let (h1, h2) = hankel_pair(n as f64, z);
        ((h1 + h2) / 2.0, (h1 - h2) / C64::new(0.0, 2.0))
    }
}

// ---------------------------------------------------------------------------
// Connection coefficient

/// Hypergeometric parameters (a, b, c) of the spectral equation in z = rho^2.
pub fn spectral_params(d: u32, lambda: C64, variant: Variant) -> HypergeometricParams {
    let df = d as f64;
    match variant {
        Variant::Perturbed => HypergeometricParams::new(
            lambda / 2.0 + df / 2.0,
            lambda / 2.0 - 0.5,
            C64::new(df / 2.0, 0.0),
        ),
        Variant::Free => HypergeometricParams::new(
            (2.0 * lambda + df - 2.0) / 4.0,
            (2.0 * lambda + df) / 4.0,
            C64::new(df / 2.0, 0.0),
        ),
    }
}

/// c3 = Gamma(c) Gamma(a+b-c+1) / (Gamma(a) Gamma(b)).
pub fn c3_connection(d: u32, lambda: C64, variant: Variant) -> Result<C64> {
    if d < 3 {
        return Err(SpecialFnError::Param(format!("dimension {d} < 3")));
    }
    let p = spectral_params(d, lambda, variant);
    let num = gamma_c(p.c)? * gamma_c(p.a + p.b - p.c + 1.0)?;
    Ok(num * rgamma_c(p.a) * rgamma_c(p.b))
}

/// Poles of Gamma(a) and Gamma(b) in the window Re >= re_min, |Im| <= im_max:
/// the zeros of c3 predicted from the closed-form parameters.
pub fn c3_predicted_zeros(d: u32, variant: Variant, re_min: f64) -> Vec<f64> {
    let df = d as f64;
    // a = -n and b = -n solved for lambda; both are real and decreasing in n
    let (first_a, first_b) = match variant {
        Variant::Perturbed => (-df, 1.0),
        Variant::Free => (-(df - 2.0) / 2.0, -df / 2.0),
    };
    let mut out = Vec::new();
    for start in [first_a, first_b] {
        let mut lam = start;
        while lam >= re_min {
            out.push(lam);
            lam -= 2.0;
        }
    }
    out.sort_by(|x, y| x.partial_cmp(y).unwrap());
    out.dedup();
    out
}
