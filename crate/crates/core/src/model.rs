//! Dimension constants, the ODE blowup family, similarity coordinates,
//! the nonlinearity and Strichartz admissibility.

use std::f64::consts::PI;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ModelError {
    #[error("dimension {0} outside the supported range")]
    Dimension(u32),
    #[error("point outside the backward lightcone: {0}")]
    Domain(String),
}

pub type Result<T> = std::result::Result<T, ModelError>;

/// Sampled element of H¹×L² on the unit ball: two grid functions.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialPair<T> {
    pub u1: Vec<T>,
    pub u2: Vec<T>,
}

impl<T: Copy> RadialPair<T> {
    pub fn new(u1: Vec<T>, u2: Vec<T>) -> Self {
        assert_eq!(u1.len(), u2.len(), "components must share a grid");
        RadialPair { u1, u2 }
    }

    pub fn len(&self) -> usize {
        self.u1.len()
    }

    pub fn is_empty(&self) -> bool {
        self.u1.is_empty()
    }

    /// Stacked (u₁, u₂).
    pub fn stacked(&self) -> Vec<T> {
        let mut v = self.u1.clone();
        v.extend_from_slice(&self.u2);
        v
    }

    pub fn from_stacked(v: &[T]) -> Self {
        let n = v.len() / 2;
        RadialPair { u1: v[..n].to_vec(), u2: v[n..].to_vec() }
    }
}

/// Which zeroth-order coefficient the linear operator carries.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Variant {
    /// Free wave operator in similarity coordinates.
    Free,
    /// Linearization around the blowup profile.
    Perturbed,
}

impl Variant {
    pub fn name(self) -> &'static str {
        match self {
            Variant::Free => "free",
            Variant::Perturbed => "perturbed",
        }
    }
}

pub fn check_dimension(d: u32) -> Result<()> {
    if d < 3 {
        return Err(ModelError::Dimension(d));
    }
    Ok(())
}

/// Nonlinear features are restricted to 3 <= d <= 6.
pub fn check_nonlinear_dimension(d: u32) -> Result<()> {
    if !(3..=6).contains(&d) {
        return Err(ModelError::Dimension(d));
    }
    Ok(())
}

pub fn c_d(d: u32) -> f64 {
    let df = d as f64;
    (df * (df - 2.0) / 4.0).powf((df - 2.0) / 4.0)
}

/// Coefficient (2d + d^2)/4 of the linearized potential.
pub fn potential_strength(d: u32) -> f64 {
    let df = d as f64;
    (2.0 * df + df * df) / 4.0
}

/// |S^{d-1}| = 2 pi^{d/2} / Gamma(d/2).
pub fn sphere_area(d: u32) -> f64 {
    let half = d as f64 / 2.0;
    2.0 * PI.powf(half) / crate::special_fn::gamma_r(half).expect("positive argument")
}

/// u^T(t, r) = c_d (T - t)^{(2-d)/2}; independent of r.
pub fn ode_blowup(d: u32, big_t: f64, t: f64, _r: f64) -> Result<f64> {
    if t >= big_t {
        return Err(ModelError::Domain(format!("t = {t} >= T = {big_t}")));
    }
    let df = d as f64;
    Ok(c_d(d) * (big_t - t).powf((2.0 - df) / 2.0))
}

/// Time derivative of the blowup family.
pub fn ode_blowup_dt(d: u32, big_t: f64, t: f64) -> Result<f64> {
    if t >= big_t {
        return Err(ModelError::Domain(format!("t = {t} >= T = {big_t}")));
    }
    let df = d as f64;
    Ok(c_d(d) * (df - 2.0) / 2.0 * (big_t - t).powf(-df / 2.0))
}

fn in_cone(big_t: f64, t: f64, r: f64) -> bool {
    big_t > 0.0 && t >= 0.0 && t < big_t && r >= 0.0 && r <= (big_t - t) * (1.0 + 1e-14)
}

pub fn to_similarity(big_t: f64, t: f64, r: f64) -> Result<(f64, f64)> {
    if !in_cone(big_t, t, r) {
        return Err(ModelError::Domain(format!("(t, r) = ({t}, {r}) with T = {big_t}")));
    }
    let h = big_t - t;
    let tau = -h.ln() + big_t.ln();
    Ok((tau, (r / h).min(1.0)))
}

pub fn from_similarity(big_t: f64, tau: f64, rho: f64) -> Result<(f64, f64)> {
    if !(tau >= 0.0) || !(0.0..=1.0).contains(&rho) || big_t <= 0.0 {
        return Err(ModelError::Domain(format!("(tau, rho) = ({tau}, {rho})")));
    }
    let h = big_t * (-tau).exp();
    Ok((big_t - h, h * rho))
}

/// psi(tau, rho) = (T e^{-tau})^{(d-2)/2} u(T - T e^{-tau}, T e^{-tau} rho).
pub fn psi_from_u<F>(d: u32, big_t: f64, u: F, tau: f64, rho: f64) -> Result<f64>
where
    F: Fn(f64, f64) -> Result<f64>,
{
    let (t, r) = from_similarity(big_t, tau, rho)?;
    let h = big_t * (-tau).exp();
    Ok(h.powf((d as f64 - 2.0) / 2.0) * u(t, r)?)
}

/// Second similarity component (T e^{-tau})^{d/2} u_t.
pub fn psi2_from_ut<F>(d: u32, big_t: f64, ut: F, tau: f64, rho: f64) -> Result<f64>
where
    F: Fn(f64, f64) -> Result<f64>,
{
    let (t, r) = from_similarity(big_t, tau, rho)?;
    let h = big_t * (-tau).exp();
    Ok(h.powf(d as f64 / 2.0) * ut(t, r)?)
}

/// N(x) = |c_d + x|^{4/(d-2)}(c_d + x) - c_d^{(d+2)/(d-2)} - ((2d+d^2)/4) x.
pub fn nonlinearity_n(d: u32, x: f64) -> f64 {
    let df = d as f64;
    let c = c_d(d);
    let y = c + x;
    // same operation order in both powers so that N(0) = 0 exactly
    let e = 4.0 / (df - 2.0);
    y.abs().powf(e) * y - c.powf(e) * c - potential_strength(d) * x
}

/// Vector form (0, N(u1)) on grid values.
pub fn nonlinearity_vec(d: u32, u1: &[f64]) -> (Vec<f64>, Vec<f64>) {
    (vec![0.0; u1.len()], u1.iter().map(|&x| nonlinearity_n(d, x)).collect())
}

/// 1/p + d/q = d/2 - 1 and 2d/(d-2) <= q <= 2d/(d-3), to 1e-12.
pub fn admissible(d: u32, p: f64, q: f64) -> bool {
    let df = d as f64;
    if p < 2.0 || q <= 0.0 {
        return false;
    }
    let inv_p = if p.is_infinite() { 0.0 } else { 1.0 / p };
    let scaling = (inv_p + df / q - (df / 2.0 - 1.0)).abs() <= 1e-12;
    let q_lo = 2.0 * df / (df - 2.0);
    let q_hi = if d == 3 { f64::INFINITY } else { 2.0 * df / (df - 3.0) };
    scaling && q >= q_lo - 1e-12 && q <= q_hi + 1e-12
}

pub fn varphi(rho: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&rho) {
        return Err(ModelError::Domain(format!("rho = {rho} not in [0,1)")));
    }
    Ok(0.5 * ((1.0 + rho) / (1.0 - rho)).ln())
}

/// Derivatives phi', phi'', phi''' of the diffeomorphism.
pub fn varphi_derivatives(rho: f64) -> (f64, f64, f64) {
    let s = 1.0 - rho * rho;
    (1.0 / s, 2.0 * rho / (s * s), (2.0 + 6.0 * rho * rho) / (s * s * s))
}

/// Q = phi'''/(2 phi') - (3/4)(phi''/phi')^2, evaluated from the derivatives.
pub fn liouville_green_q(rho: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&rho) {
        return Err(ModelError::Domain(format!("rho = {rho} not in [0,1)")));
    }
    let (p1, p2, p3) = varphi_derivatives(rho);
    Ok(0.5 * p3 / p1 - 0.75 * (p2 / p1).powi(2))
}
