//! Chebyshev collocation of the linearized operator on the unit ball.
//!
//! Radial fields are even in ρ. The grid is the nonnegative half of the
//! Chebyshev–Lobatto points on [-1, 1]; every matrix acts on the even
//! extension, so the origin needs no boundary condition and ρ = 1 needs none
//! either (the principal coefficient degenerates there).

use crate::green::{Source, SourceValue};
use crate::model::{self, RadialPair};
use crate::quadrature::gauss_legendre_on;
use crate::C64;
use nalgebra::{DMatrix, DVector};
use rand::Rng;
use std::f64::consts::PI;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum DiscretizationError {
    #[error("grid size {0} outside [16, 512]")]
    GridSize(usize),
    #[error("eigensolver did not converge within the iteration cap")]
    EigensolverFailure,
    #[error("eigenvalue 1 is not simple: kernel dimension {0}")]
    DegenerateEigenvalue(usize),
    #[error("grid function has length {got}, expected {want}")]
    Length { got: usize, want: usize },
    #[error(transparent)]
    Model(#[from] model::ModelError),
}

pub type Result<T> = std::result::Result<T, DiscretizationError>;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Parity {
    Even,
    Odd,
}

/// Collocation grid, operator matrices and gauge projection at fixed (d, N).
#[derive(Clone, Debug)]
pub struct SpectralDiscretization {
    pub d: u32,
    pub n: usize,
    /// ρ_j = sin(πj/2N), j = 0..=N, ascending; ρ_0 = 0 and ρ_N = 1.
    pub nodes: Vec<f64>,
    /// First derivative of an even field (result is odd).
    pub d1: DMatrix<f64>,
    /// First derivative of an odd field (result is even).
    pub d1_odd: DMatrix<f64>,
    /// Second derivative of an even field.
    pub d2: DMatrix<f64>,
    /// Clenshaw–Curtis weights for ∫₀¹ h dρ with h even.
    pub quad_weights: Vec<f64>,
    /// Interpolatory weights for ∫₀¹ h ρ^{d−1} dρ with h even; exact for
    /// h of degree ≤ 2N (for even d the folded rule would see |ρ|^{d−1}).
    pub radial_weights: Vec<f64>,
    /// Gram matrix of the energy product on stacked (u₁, u₂).
    pub gram: DMatrix<f64>,
    pub l0_mat: DMatrix<f64>,
    pub lprime_mat: DMatrix<f64>,
    pub l_mat: DMatrix<f64>,
    pub p_mat: DMatrix<f64>,
    pub g_disc: RadialPair<f64>,
    /// Row functional u ↦ ⟨u, w⟩_E with w the adjoint eigenvector and ⟨g, w⟩_E = 1.
    pub mode_functional: DVector<f64>,
    h1_gram: DMatrix<f64>,
}

fn full_nodes(m: usize) -> Vec<f64> {
    (0..=m).map(|k| (PI * k as f64 / m as f64).cos()).collect()
}

/// Chebyshev–Lobatto differentiation on m+1 points, x_k = cos(πk/m).
fn cheb_matrix(m: usize) -> DMatrix<f64> {
    let mf = m as f64;
    let c = |k: usize| if k == 0 || k == m { 2.0 } else { 1.0 };
    let mut dm = DMatrix::zeros(m + 1, m + 1);
    for i in 0..=m {
        for j in 0..=m {
            if i == j {
                continue;
            }
            // x_i - x_j without cancellation
            let diff = 2.0 * (PI * (i + j) as f64 / (2.0 * mf)).sin() * (PI * (j as f64 - i as f64) / (2.0 * mf)).sin();
            let sign = if (i + j) % 2 == 0 { 1.0 } else { -1.0 };
            dm[(i, j)] = c(i) / c(j) * sign / diff;
        }
    }
    for i in 0..=m {
        let s: f64 = (0..=m).filter(|&j| j != i).map(|j| dm[(i, j)]).sum();
        dm[(i, i)] = -s;
    }
    dm
}

fn clenshaw_curtis(m: usize) -> Vec<f64> {
    let mf = m as f64;
    let mut w = vec![0.0; m + 1];
    w[0] = 1.0 / (mf * mf - 1.0);
    w[m] = w[0];
    for (k, wk) in w.iter_mut().enumerate().take(m).skip(1) {
        let theta = PI * k as f64 / mf;
        let mut v = 1.0;
        for j in 1..m / 2 {
            v -= 2.0 * (2.0 * j as f64 * theta).cos() / (4.0 * (j * j) as f64 - 1.0);
        }
        v -= (mf * theta).cos() / (mf * mf - 1.0);
        *wk = 2.0 * v / mf;
    }
    w
}

/// Fold a full-grid operator (columns indexed by k = 0..=2N) onto the half grid.
fn fold_columns(full: &DMatrix<f64>, rows: &[usize], n: usize, parity: Parity) -> DMatrix<f64> {
    let m = 2 * n;
    let mut out = DMatrix::zeros(rows.len(), n + 1);
    for (i, &r) in rows.iter().enumerate() {
        for j in 0..=n {
            let k = n - j;
            out[(i, j)] = if k == n {
                match parity {
                    Parity::Even => full[(r, k)],
                    Parity::Odd => 0.0,
                }
            } else {
                match parity {
                    Parity::Even => full[(r, k)] + full[(r, m - k)],
                    Parity::Odd => full[(r, k)] - full[(r, m - k)],
                }
            };
        }
    }
    out
}

/// Barycentric interpolation weights from the extended grid to `x`.
fn barycentric_row(nodes: &[f64], x: f64) -> Vec<f64> {
    let m = nodes.len() - 1;
    let mut row = vec![0.0; m + 1];
    if let Some(k) = nodes.iter().position(|&xk| (x - xk).abs() < 1e-15) {
        row[k] = 1.0;
        return row;
    }
    let mut total = 0.0;
    for (k, &xk) in nodes.iter().enumerate() {
        let mut w = if k % 2 == 0 { 1.0 } else { -1.0 };
        if k == 0 || k == m {
            w *= 0.5;
        }
        row[k] = w / (x - xk);
        total += row[k];
    }
    row.iter_mut().for_each(|v| *v /= total);
    row
}

impl SpectralDiscretization {
    pub fn build(d: u32, n: usize) -> Result<Self> {
        model::check_dimension(d)?;
        if !(16..=512).contains(&n) {
            return Err(DiscretizationError::GridSize(n));
        }
        let m = 2 * n;
        let full = full_nodes(m);
        let nodes: Vec<f64> = (0..=n).map(|j| (PI * j as f64 / m as f64).sin()).collect();
        let rows: Vec<usize> = (0..=n).map(|j| n - j).collect();

        let dfull = cheb_matrix(m);
        let d2full = &dfull * &dfull;
        let mut d1 = fold_columns(&dfull, &rows, n, Parity::Even);
        let d1_odd = fold_columns(&dfull, &rows, n, Parity::Odd);
        let mut d2 = fold_columns(&d2full, &rows, n, Parity::Even);
        // constants are annihilated exactly
        for mat in [&mut d1, &mut d2] {
            for i in 0..=n {
                let s: f64 = mat.row(i).sum();
                mat[(i, i)] -= s;
            }
        }

        let cc = clenshaw_curtis(m);
        let quad_weights: Vec<f64> = (0..=n).map(|j| if j == 0 { 0.5 * cc[n] } else { cc[n - j] }).collect();

        let df = d as f64;
        let np = n + 1;
        let mut l0 = DMatrix::zeros(2 * np, 2 * np);
        for i in 0..np {
            let r = nodes[i];
            for j in 0..np {
                l0[(i, j)] = -r * d1[(i, j)];
                l0[(np + i, np + j)] = -r * d1[(i, j)];
                l0[(np + i, j)] = if i == 0 { df * d2[(i, j)] } else { d2[(i, j)] + (df - 1.0) / r * d1[(i, j)] };
            }
            l0[(i, i)] -= (df - 2.0) / 2.0;
            l0[(i, np + i)] += 1.0;
            l0[(np + i, np + i)] -= df / 2.0;
        }
        let mut lprime = DMatrix::zeros(2 * np, 2 * np);
        let v = model::potential_strength(d);
        for i in 0..np {
            lprime[(np + i, i)] = v;
        }
        let l = &l0 + &lprime;

        // Gauss–Legendre rule exact for the energy integrands
        let (gx, gw) = gauss_legendre_on(2 * n + d as usize / 2 + 2, 0.0, 1.0);
        let mut even_interp = DMatrix::zeros(gx.len(), np);
        let mut odd_interp = DMatrix::zeros(gx.len(), np);
        for (a, &x) in gx.iter().enumerate() {
            let row = DMatrix::from_row_slice(1, m + 1, &barycentric_row(&full, x));
            even_interp.row_mut(a).copy_from(&fold_columns(&row, &[0], n, Parity::Even));
            odd_interp.row_mut(a).copy_from(&fold_columns(&row, &[0], n, Parity::Odd));
        }
        let weight = DMatrix::from_diagonal(&DVector::from_iterator(gx.len(), gx.iter().zip(&gw).map(|(x, w)| w * x.powi(d as i32 - 1))));
        let radial_weights: Vec<f64> = (0..np).map(|j| (0..gx.len()).map(|a| weight[(a, a)] * even_interp[(a, j)]).sum()).collect();
        let b1 = &odd_interp * &d1;
        let mass = even_interp.transpose() * &weight * &even_interp;
        let stiff = b1.transpose() * &weight * &b1;
        let mut gram = DMatrix::zeros(2 * np, 2 * np);
        gram.view_mut((0, 0), (np, np)).copy_from(&stiff);
        gram[(n, n)] += 1.0;
        gram.view_mut((np, np), (np, np)).copy_from(&mass);
        let sa = model::sphere_area(d);
        let mut h1_gram = DMatrix::zeros(2 * np, 2 * np);
        h1_gram.view_mut((0, 0), (np, np)).copy_from(&((&stiff + &mass) * sa));
        h1_gram.view_mut((np, np), (np, np)).copy_from(&(&mass * sa));

        let g_disc = RadialPair::new(vec![2.0; np], vec![df; np]);
        let mut disc = SpectralDiscretization {
            d,
            n,
            nodes,
            d1,
            d1_odd,
            d2,
            quad_weights,
            radial_weights,
            gram,
            l0_mat: l0,
            lprime_mat: lprime,
            l_mat: l,
            p_mat: DMatrix::zeros(2 * np, 2 * np),
            g_disc,
            mode_functional: DVector::zeros(2 * np),
            h1_gram,
        };
        let (p, functional) = spectral_projection(&disc)?;
        disc.p_mat = p;
        disc.mode_functional = functional;
        Ok(disc)
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn dim(&self) -> usize {
        2 * self.nodes.len()
    }

    pub fn sample<F: Fn(f64) -> f64>(&self, f: F) -> Vec<f64> {
        self.nodes.iter().map(|&r| f(r)).collect()
    }

    pub fn sample_pair<F: Fn(f64) -> f64, G: Fn(f64) -> f64>(&self, f1: F, f2: G) -> RadialPair<f64> {
        RadialPair::new(self.sample(f1), self.sample(f2))
    }

    pub fn to_vector(&self, u: &RadialPair<f64>) -> Result<DVector<f64>> {
        self.check_len(u.len())?;
        Ok(DVector::from_vec(u.stacked()))
    }

    pub fn to_pair(&self, v: &DVector<f64>) -> RadialPair<f64> {
        RadialPair::from_stacked(v.as_slice())
    }

    fn check_len(&self, got: usize) -> Result<()> {
        if got != self.len() {
            return Err(DiscretizationError::Length { got, want: self.len() });
        }
        Ok(())
    }

    /// Interpolate a grid field of the given parity at ρ ∈ [0, 1].
    pub fn interpolate(&self, values: &[f64], parity: Parity, rho: f64) -> f64 {
        let mut out = [0.0];
        self.interpolate_fields(&[(values, parity)], rho, &mut out);
        out[0]
    }

    /// Several fields at one point, sharing the barycentric weights.
    pub fn interpolate_fields(&self, fields: &[(&[f64], Parity)], rho: f64, out: &mut [f64]) {
        let n = self.n;
        if let Some(j) = self.nodes.iter().position(|&x| (rho - x).abs() < 1e-15) {
            for (o, (v, _)) in out.iter_mut().zip(fields) {
                *o = v[j];
            }
            return;
        }
        out.iter_mut().for_each(|o| *o = 0.0);
        // barycentric weights on the extended grid: (−1)^k, halved at ±1;
        // the mirror node −x has index 2N − k and the same sign
        let mut den = 0.0;
        for (j, &x) in self.nodes.iter().enumerate() {
            let k = n - j;
            let mut w = if k % 2 == 0 { 1.0 } else { -1.0 };
            if k == 0 {
                w *= 0.5;
            }
            let a = w / (rho - x);
            if k == n {
                den += a;
                for (o, (v, parity)) in out.iter_mut().zip(fields) {
                    if *parity == Parity::Even {
                        *o += a * v[j];
                    }
                }
            } else {
                let b = w / (rho + x);
                den += a + b;
                for (o, (v, parity)) in out.iter_mut().zip(fields) {
                    let c = if *parity == Parity::Even { a + b } else { a - b };
                    *o += c * v[j];
                }
            }
        }
        out.iter_mut().for_each(|o| *o /= den);
    }

    /// Mode coefficient ⟨u, w⟩_E, normalized so that g has coefficient 1.
    pub fn mode_coefficient(&self, u: &DVector<f64>) -> f64 {
        self.mode_functional.dot(u)
    }

    pub fn project_out(&self, u: &DVector<f64>) -> DVector<f64> {
        u - &self.p_mat * u
    }
}

/// Complex energy product (u|v)_E; linear in u, antilinear in v.
pub fn energy_product(disc: &SpectralDiscretization, u: &[C64], v: &[C64]) -> C64 {
    let n = disc.dim();
    let mut acc = C64::new(0.0, 0.0);
    for i in 0..n {
        let mut row = C64::new(0.0, 0.0);
        for j in 0..n {
            row += u[j] * disc.gram[(i, j)];
        }
        acc += row * v[i].conj();
    }
    acc
}

pub fn energy_product_real(disc: &SpectralDiscretization, u: &DVector<f64>, v: &DVector<f64>) -> f64 {
    v.dot(&(&disc.gram * u))
}

pub fn energy_norm(disc: &SpectralDiscretization, u: &DVector<f64>) -> f64 {
    energy_product_real(disc, u, u).max(0.0).sqrt()
}

/// H¹×L² norm on the ball, solid-angle factor included.
pub fn h1l2_norm(disc: &SpectralDiscretization, u: &DVector<f64>) -> f64 {
    u.dot(&(&disc.h1_gram * u)).max(0.0).sqrt()
}

/// Random even polynomial pair of degree ≤ 12 with coefficients in [-1, 1].
pub fn random_smooth_pair<R: Rng>(disc: &SpectralDiscretization, rng: &mut R) -> DVector<f64> {
    let c1: Vec<f64> = (0..7).map(|_| rng.random_range(-1.0..1.0)).collect();
    let c2: Vec<f64> = (0..7).map(|_| rng.random_range(-1.0..1.0)).collect();
    let poly = |c: &[f64], r: f64| c.iter().rev().fold(0.0, |acc, a| acc * r * r + a);
    DVector::from_vec(disc.sample_pair(|r| poly(&c1, r), |r| poly(&c2, r)).stacked())
}

/// Largest Re(L₀u|u)_E/‖u‖²_E over random smooth pairs.
pub fn dissipativity_check<R: Rng>(disc: &SpectralDiscretization, n_samples: usize, rng: &mut R) -> f64 {
    (0..n_samples.max(1))
        .map(|_| {
            let u = random_smooth_pair(disc, rng);
            rayleigh_quotient(disc, &disc.l0_mat, &u)
        })
        .fold(f64::NEG_INFINITY, f64::max)
}

pub fn rayleigh_quotient(disc: &SpectralDiscretization, op: &DMatrix<f64>, u: &DVector<f64>) -> f64 {
    energy_product_real(disc, &(op * u), u) / energy_product_real(disc, u, u)
}

/// Range of ‖u‖_E/‖u‖_{H¹×L²} over random smooth pairs.
pub fn norm_equivalence_check<R: Rng>(disc: &SpectralDiscretization, n_samples: usize, rng: &mut R) -> (f64, f64) {
    let mut lo = f64::INFINITY;
    let mut hi = 0.0f64;
    for _ in 0..n_samples.max(1) {
        let u = random_smooth_pair(disc, rng);
        let ratio = energy_norm(disc, &u) / h1l2_norm(disc, &u);
        lo = lo.min(ratio);
        hi = hi.max(ratio);
    }
    (lo, hi)
}

pub fn eigenvalues(mat: &DMatrix<f64>) -> Result<Vec<C64>> {
    let schur = nalgebra::Schur::try_new(mat.clone(), 1e-15, 100_000).ok_or(DiscretizationError::EigensolverFailure)?;
    let mut ev: Vec<C64> = schur.complex_eigenvalues().iter().copied().collect();
    ev.sort_by(|a, b| b.re.total_cmp(&a.re).then(a.im.total_cmp(&b.im)));
    Ok(ev)
}

#[derive(Clone, Debug)]
pub struct SpectrumEntry {
    pub lambda: C64,
    /// Distance to the nearest eigenvalue of the finer companion.
    pub drift: f64,
    pub physical: bool,
}

#[derive(Clone, Debug)]
pub struct SpectrumReport {
    pub entries: Vec<SpectrumEntry>,
    /// Physical eigenvalues with Re λ ≥ 0.05 and |Im λ| ≤ 50.
    pub unstable: Vec<C64>,
}

pub const DRIFT_TOL: f64 = 1e-4;

/// Eigenvalues of `op(coarse)` kept when they persist in `op(fine)`.
pub fn discrete_spectrum_of(coarse: &DMatrix<f64>, fine: &DMatrix<f64>) -> Result<SpectrumReport> {
    let ec = eigenvalues(coarse)?;
    let ef = eigenvalues(fine)?;
    let entries: Vec<SpectrumEntry> = ec
        .iter()
        .map(|&lambda| {
            let drift = ef.iter().map(|z| (z - lambda).norm()).fold(f64::INFINITY, f64::min);
            SpectrumEntry { lambda, drift, physical: drift <= DRIFT_TOL }
        })
        .collect();
    let unstable = entries.iter().filter(|e| e.physical && e.lambda.re >= 0.05 && e.lambda.im.abs() <= 50.0).map(|e| e.lambda).collect();
    Ok(SpectrumReport { entries, unstable })
}

pub fn discrete_spectrum(coarse: &SpectralDiscretization, fine: &SpectralDiscretization) -> Result<SpectrumReport> {
    discrete_spectrum_of(&coarse.l_mat, &fine.l_mat)
}

/// Singular values of `op − λ`, ascending.
pub fn shifted_singular_values(op: &DMatrix<f64>, lambda: f64) -> Vec<f64> {
    let shifted = op - DMatrix::identity(op.nrows(), op.ncols()) * lambda;
    let mut s: Vec<f64> = shifted.svd(false, false).singular_values.iter().copied().collect();
    s.sort_by(f64::total_cmp);
    s
}

/// dim ker(op − λ): singular values at or below `tol`. The threshold is
/// absolute; the lower singular values of the collocated operator shrink
/// like N⁻² (pseudomodes at the characteristic boundary), so a bound
/// relative to σ_max would miscount.
pub fn kernel_dimension(op: &DMatrix<f64>, lambda: f64, tol: f64) -> usize {
    shifted_singular_values(op, lambda).iter().filter(|&&v| v <= tol).count()
}

pub const KERNEL_TOL: f64 = 1e-8;

/// Rank-1 projection onto g along the range of L − 1, with the functional
/// u ↦ ⟨u, w⟩_E normalized to 1 on g.
pub fn spectral_projection(disc: &SpectralDiscretization) -> Result<(DMatrix<f64>, DVector<f64>)> {
    let n = disc.dim();
    let shifted = &disc.l_mat - DMatrix::<f64>::identity(n, n);
    let svd = shifted.svd(true, false);
    let s = &svd.singular_values;
    let small: Vec<usize> = (0..s.len()).filter(|&k| s[k] <= KERNEL_TOL).collect();
    if small.len() != 1 {
        return Err(DiscretizationError::DegenerateEigenvalue(small.len()));
    }
    let u = svd.u.as_ref().expect("left singular vectors requested");
    // y spans the left kernel: yᵀ(L − 1) = 0
    let y = u.column(small[0]).into_owned();
    let g = DVector::from_vec(disc.g_disc.stacked());
    let functional = &y / y.dot(&g);
    let p = &g * functional.transpose();
    Ok((p, functional))
}

/// Adjoint eigenvector w in the energy product: ⟨u, w⟩_E = functional·u.
pub fn adjoint_eigenvector(disc: &SpectralDiscretization) -> Option<DVector<f64>> {
    disc.gram.clone().lu().solve(&disc.mode_functional)
}

/// Grid pair presented as a pointwise source for the resolvent.
pub struct GridSource<'a> {
    disc: &'a SpectralDiscretization,
    f1: Vec<f64>,
    df1: Vec<f64>,
    f2: Vec<f64>,
}

impl<'a> GridSource<'a> {
    pub fn new(disc: &'a SpectralDiscretization, f: &RadialPair<f64>) -> Result<Self> {
        disc.check_len(f.len())?;
        let df1 = (&disc.d1 * DVector::from_column_slice(&f.u1)).as_slice().to_vec();
        Ok(GridSource { disc, f1: f.u1.clone(), df1, f2: f.u2.clone() })
    }
}

impl Source for GridSource<'_> {
    fn eval(&self, rho: f64) -> SourceValue {
        let mut out = [0.0; 3];
        let fields = [(&self.f1[..], Parity::Even), (&self.df1[..], Parity::Odd), (&self.f2[..], Parity::Even)];
        self.disc.interpolate_fields(&fields, rho, &mut out);
        SourceValue { f1: C64::new(out[0], 0.0), df1: C64::new(out[1], 0.0), f2: C64::new(out[2], 0.0) }
    }
}
