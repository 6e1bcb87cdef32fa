//! Dormand–Prince 5(4) for small complex systems, with forced landing on
//! requested abscissae and dense evaluation by re-stepping.

use crate::C64;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RkError {
    #[error("step size underflow at x = {0}")]
    StepFailure(f64),
    #[error("step budget exhausted at x = {0}")]
    TooManySteps(f64),
    #[error("non-finite state at x = {0}")]
    NonFinite(f64),
}

pub type Result<T> = std::result::Result<T, RkError>;

#[derive(Debug, Clone, Copy)]
pub struct Node<const M: usize> {
    pub x: f64,
    pub y: [C64; M],
}

/// Accepted nodes of one integration, ordered along the direction of travel.
#[derive(Debug, Clone)]
pub struct Path<const M: usize> {
    pub nodes: Vec<Node<M>>,
    /// Positions in `nodes` of the requested stop points, in the order given.
    pub stops: Vec<usize>,
}

#[derive(Debug, Clone, Copy)]
pub struct Tolerance {
    pub rtol: f64,
    /// Absolute floor relative to the largest magnitude seen per component.
    pub floor: f64,
    pub max_steps: usize,
}

impl Tolerance {
    pub fn new(rtol: f64) -> Self {
        Tolerance { rtol, floor: 1e-8, max_steps: 400_000 }
    }
}

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

fn axpy<const M: usize>(y: &[C64; M], h: f64, terms: &[(f64, &[C64; M])]) -> [C64; M] {
    let mut out = *y;
    for (c, k) in terms {
        for i in 0..M {
            out[i] += k[i] * (h * c);
        }
    }
    out
}

/// One step; returns (y_new, error estimate, f(x+h, y_new)).
fn dp_step<const M: usize, F>(f: &F, x: f64, y: &[C64; M], k1: &[C64; M], h: f64) -> ([C64; M], [C64; M], [C64; M])
where
    F: Fn(f64, &[C64; M]) -> [C64; M],
{
    let k2 = f(x + C2 * h, &axpy(y, h, &[(A21, k1)]));
    let k3 = f(x + C3 * h, &axpy(y, h, &[(A31, k1), (A32, &k2)]));
    let k4 = f(x + C4 * h, &axpy(y, h, &[(A41, k1), (A42, &k2), (A43, &k3)]));
    let k5 = f(x + C5 * h, &axpy(y, h, &[(A51, k1), (A52, &k2), (A53, &k3), (A54, &k4)]));
    let k6 = f(x + h, &axpy(y, h, &[(A61, k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)]));
    let y_new = axpy(y, h, &[(B1, k1), (B3, &k3), (B4, &k4), (B5, &k5), (B6, &k6)]);
    let k7 = f(x + h, &y_new);
    let mut err = [C64::new(0.0, 0.0); M];
    for i in 0..M {
        err[i] = (k1[i] * E1 + k3[i] * E3 + k4[i] * E4 + k5[i] * E5 + k6[i] * E6 + k7[i] * E7) * h;
    }
    (y_new, err, k7)
}

/// Integrate from (x0, y0) to x1, landing exactly on every point of `stops`
/// (which must lie between x0 and x1, ordered in the direction of travel).
pub fn integrate<const M: usize, F>(
    f: &F,
    x0: f64,
    y0: [C64; M],
    x1: f64,
    stops: &[f64],
    h_init: f64,
    tol: Tolerance,
) -> Result<Path<M>>
where
    F: Fn(f64, &[C64; M]) -> [C64; M],
{
    let dir = if x1 >= x0 { 1.0 } else { -1.0 };
    let mut nodes = vec![Node { x: x0, y: y0 }];
    let mut stop_idx = Vec::with_capacity(stops.len());
    let mut targets: Vec<f64> = stops.to_vec();
    targets.push(x1);
    let mut next_target = 0;
    // stops sitting on the start point
    while next_target < stops.len() && (targets[next_target] - x0) * dir <= 0.0 {
        stop_idx.push(0);
        next_target += 1;
    }
    let mut x = x0;
    let mut y = y0;
    let mut k1 = f(x, &y);
    let mut h = h_init.abs().max(1e-14) * dir;
    let mut ymax = [0.0f64; M];
    for i in 0..M {
        ymax[i] = y[i].norm();
    }
    let mut steps = 0usize;
    while next_target < targets.len() {
        let target = targets[next_target];
        let remaining = target - x;
        let landing = h.abs() >= remaining.abs();
        let h_try = if landing { remaining } else { h };
        let (y_new, err, k7) = dp_step(f, x, &y, &k1, h_try);
        let mut enorm = 0.0f64;
        for i in 0..M {
            let scale = tol.rtol * (y[i].norm().max(y_new[i].norm()) + tol.floor * ymax[i]);
            if scale > 0.0 {
                enorm = enorm.max(err[i].norm() / scale);
            }
        }
        if !enorm.is_finite() {
            enorm = 1e10;
        }
        steps += 1;
        if steps > tol.max_steps {
            return Err(RkError::TooManySteps(x));
        }
        if enorm <= 1.0 {
            x = if landing { target } else { x + h_try };
            y = y_new;
            k1 = k7;
            for i in 0..M {
                if !y[i].re.is_finite() || !y[i].im.is_finite() {
                    return Err(RkError::NonFinite(x));
                }
                ymax[i] = ymax[i].max(y[i].norm());
            }
            nodes.push(Node { x, y });
            if landing {
                if next_target < stops.len() {
                    stop_idx.push(nodes.len() - 1);
                }
                next_target += 1;
                // a landing step may be short; do not let it shrink h
                let grow = (0.9 * enorm.max(1e-10).powf(-0.2)).clamp(0.2, 5.0);
                h = h.abs().max(h_try.abs() * grow) * dir;
            } else {
                h = h_try * (0.9 * enorm.max(1e-10).powf(-0.2)).clamp(0.2, 5.0);
            }
        } else {
            h = h_try * (0.9 * enorm.powf(-0.2)).clamp(0.1, 0.9);
        }
        if h.abs() < 1e-15 * x.abs().max(1e-3) {
            return Err(RkError::StepFailure(x));
        }
    }
    Ok(Path { nodes, stops: stop_idx })
}

/// Single untested step from a stored node; used for dense evaluation
/// between nodes, where the distance never exceeds an accepted step.
pub fn restep<const M: usize, F>(f: &F, node: &Node<M>, x: f64) -> [C64; M]
where
    F: Fn(f64, &[C64; M]) -> [C64; M],
{
    let h = x - node.x;
    if h == 0.0 {
        return node.y;
    }
    let k1 = f(node.x, &node.y);
    dp_step(f, node.x, &node.y, &k1, h).0
}

impl<const M: usize> Path<M> {
    /// Node nearest to x (nodes are monotone in x).
    pub fn nearest(&self, x: f64) -> &Node<M> {
        let n = self.nodes.len();
        let increasing = self.nodes[n - 1].x >= self.nodes[0].x;
        let key = |node: &Node<M>| if increasing { node.x } else { -node.x };
        let xk = if increasing { x } else { -x };
        let pos = self.nodes.partition_point(|node| key(node) < xk);
        let mut best = pos.min(n - 1);
        if pos > 0 && (self.nodes[pos - 1].x - x).abs() <= (self.nodes[best].x - x).abs() {
            best = pos - 1;
        }
        &self.nodes[best]
    }

    pub fn first(&self) -> &Node<M> {
        &self.nodes[0]
    }

    pub fn last(&self) -> &Node<M> {
        &self.nodes[self.nodes.len() - 1]
    }

    pub fn covers(&self, x: f64) -> bool {
        let a = self.first().x;
        let b = self.last().x;
        x >= a.min(b) - 1e-15 && x <= a.max(b) + 1e-15
    }
}
