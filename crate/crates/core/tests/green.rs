mod common;

use common::rel_err;
use lightcone::green::*;
use lightcone::model::Variant;
use lightcone::special_fn::{hyp2f1, spectral_params};
use lightcone::C64;
use std::f64::consts::PI;

fn re(x: f64) -> C64 {
    C64::new(x, 0.0)
}

/// Even polynomial Σ c_k ρ^{2k} with derivatives.
#[derive(Clone)]
struct EvenPoly(Vec<f64>);

impl EvenPoly {
    fn eval(&self, r: f64) -> (f64, f64, f64) {
        let (mut v, mut d1, mut d2) = (0.0, 0.0, 0.0);
        for (k, c) in self.0.iter().enumerate() {
            let n = 2 * k as i32;
            v += c * r.powi(n);
            if n >= 1 {
                d1 += c * n as f64 * r.powi(n - 1);
            }
            if n >= 2 {
                d2 += c * (n * (n - 1)) as f64 * r.powi(n - 2);
            }
        }
        (v, d1, d2)
    }
}

/// (λ - L)u for a smooth pair, written straight from the first-order system.
fn apply_lambda_minus_l(d: u32, lambda: C64, v: Variant, p1: &EvenPoly, p2: &EvenPoly, r: f64) -> (C64, C64, C64) {
    let df = d as f64;
    let pot = match v {
        Variant::Free => 0.0,
        Variant::Perturbed => (2.0 * df + df * df) / 4.0,
    };
    let (u1, du1, d2u1) = p1.eval(r);
    let (u2, du2, _) = p2.eval(r);
    let l1 = -r * du1 - (df - 2.0) / 2.0 * u1 + u2;
    let lap = if r == 0.0 { df * d2u1 } else { d2u1 + (df - 1.0) / r * du1 };
    let l2 = lap - r * du2 - df / 2.0 * u2 + pot * u1;
    let f1 = lambda * u1 - l1;
    let f2 = lambda * u2 - l2;
    // derivative of f₁
    let dl1 = -du1 - r * d2u1 - (df - 2.0) / 2.0 * du1 + du2;
    let df1 = lambda * du1 - dl1;
    (f1, df1, f2)
}

fn grid(n: usize) -> Vec<f64> {
    (0..=n).map(|j| j as f64 / n as f64).collect()
}

#[test]
fn kernel_at_eigenvalue_is_rejected() {
    assert!(matches!(build_kernel(4, re(1.0), Variant::Perturbed), Err(GreenError::NearEigenvalue(_))));
}

#[test]
fn kernel_normalization_holds_across_the_interval() {
    let k = build_kernel(4, re(2.0), Variant::Perturbed).unwrap();
    for j in 1..10 {
        let w = k.normalized_wronskian(0.1 * j as f64).unwrap();
        assert!(rel_err(w, C64::new(0.0, 2.0)) < 1e-8);
    }
}

#[test]
fn free_and_perturbed_kernels_differ() {
    let lam = C64::new(0.1, 5.0);
    let kp = build_kernel(4, lam, Variant::Perturbed).unwrap();
    let kf = build_kernel(4, lam, Variant::Free).unwrap();
    for (r, s) in [(0.2, 0.7), (0.5, 0.4), (0.8, 0.3)] {
        let a = green_eval(&kp, r, s).unwrap();
        let b = green_eval(&kf, r, s).unwrap();
        assert!((a - b).norm() > 1e-6 * a.norm());
    }
}

#[test]
fn green_function_is_continuous_with_unit_jump() {
    for (d, lam) in [(3, C64::new(0.5, 3.0)), (4, re(2.0)), (5, C64::new(0.1, 10.0))] {
        let k = build_kernel(d, lam, Variant::Perturbed).unwrap();
        for s in [0.2, 0.5, 0.85] {
            let (below, dbelow) = k.branch(s, s, Side::Below).unwrap();
            let (above, dabove) = k.branch(s, s, Side::Above).unwrap();
            assert!((below - above).norm() <= 1e-8 * below.norm());
            let jump = (dabove - dbelow) * (1.0 - s * s);
            assert!((jump + 1.0).norm() < 1e-6, "d={d} lam={lam} s={s}: {jump}");
        }
    }
}

#[test]
fn green_value_is_tolerance_stable() {
    let a = green_eval(&build_kernel_with(4, re(2.0), Variant::Perturbed, 1e-10).unwrap(), 0.3, 0.6).unwrap();
    let b = green_eval(&build_kernel_with(4, re(2.0), Variant::Perturbed, 5e-11).unwrap(), 0.3, 0.6).unwrap();
    assert!(rel_err(a, b) < 1e-7);
    assert!(green_eval(&build_kernel(4, re(2.0), Variant::Perturbed).unwrap(), 0.0, 0.5).is_err());
}

#[test]
fn free_kernel_origin_solution_is_hypergeometric() {
    let lam = C64::new(0.2, 1.5);
    let k = build_kernel(4, lam, Variant::Free).unwrap();
    let p = spectral_params(4, lam, Variant::Free);
    let c = k.origin_solution(0.5).unwrap().0 / hyp2f1(&p, 0.25).unwrap();
    for j in 1..=9 {
        let r = 0.1 * j as f64;
        let f = hyp2f1(&p, r * r).unwrap() * c;
        assert!(rel_err(k.origin_solution(r).unwrap().0, f) < 1e-8);
    }
}

#[test]
fn resolvent_recovers_smooth_pairs() {
    let p1 = EvenPoly(vec![1.0, 0.3, -0.2]);
    let p2 = EvenPoly(vec![0.5, -1.0, 0.0, 0.1]);
    let rhos = grid(20);
    for d in [3u32, 4] {
        for lam in [re(2.0), C64::new(0.5, 3.0), C64::new(0.1, 10.0)] {
            for v in [Variant::Perturbed, Variant::Free] {
                let src = |r: f64| {
                    let (f1, df1, f2) = apply_lambda_minus_l(d, lam, v, &p1, &p2, r);
                    SourceValue { f1, df1, f2 }
                };
                let out = resolve(d, lam, v, &src, &rhos, 1e-11).unwrap();
                for (j, &r) in rhos.iter().enumerate() {
                    let want1 = p1.eval(r).0;
                    let want2 = p2.eval(r).0;
                    assert!((out.pair.u1[j] - want1).norm() < 1e-6 * want1.abs().max(1.0), "d={d} lam={lam} r={r}: {}", out.pair.u1[j]);
                    assert!((out.pair.u2[j] - want2).norm() < 1e-6 * want2.abs().max(1.0), "u2 d={d} lam={lam} r={r}");
                }
            }
        }
    }
}

#[test]
fn resolvent_of_zero_is_zero() {
    let k = build_kernel(4, re(2.0), Variant::Perturbed).unwrap();
    let zero = |_r: f64| SourceValue { f1: re(0.0), df1: re(0.0), f2: re(0.0) };
    let out = resolvent_apply(&k, &zero, &grid(8)).unwrap();
    assert!(out.u.iter().chain(&out.pair.u2).all(|v| v.norm() == 0.0));
}

/// Residual of the returned solution in the spectral ODE, by a sixth-order
/// difference of the returned derivative.
fn ode_residual(d: u32, lam: C64, v: Variant, src: &dyn Source, tol: f64) -> f64 {
    let ode = lightcone::spectral_ode::SpectralOde::new(d, lam, v).unwrap();
    let mut worst = 0.0f64;
    let mut fmax = 0.0f64;
    for j in 1..=18 {
        let r = 0.05 * j as f64;
        let h = 0.01 * r.min(1.0 - r);
        let pts: Vec<f64> = [-3.0, -2.0, -1.0, 0.0, 1.0, 2.0, 3.0].iter().map(|k| r + k * h).collect();
        let out = resolve(d, lam, v, src, &pts, tol).unwrap();
        let du = &out.du;
        let d2 = ((du[4] - du[2]) * 45.0 - (du[5] - du[1]) * 9.0 + (du[6] - du[0])) / (60.0 * h);
        let f = forcing(d, lam, &src.eval(r), r);
        fmax = fmax.max(f.norm());
        worst = worst.max(ode.residual(r, out.u[3], out.du[3], d2, f).norm());
    }
    worst / fmax
}

#[test]
fn resolvent_solves_the_inhomogeneous_equation() {
    let src = |r: f64| SourceValue { f1: re(1.0 - r * r), df1: re(-2.0 * r), f2: re(0.0) };
    assert!(ode_residual(4, re(2.0), Variant::Perturbed, &src, 1e-11) < 1e-6);
    let src2 = |r: f64| SourceValue { f1: re((3.0 * r).cos()), df1: re(-3.0 * (3.0 * r).sin()), f2: re(r * r) };
    for lam in [C64::new(0.5, 3.0), C64::new(0.1, 10.0)] {
        assert!(ode_residual(3, lam, Variant::Perturbed, &src2, 1e-11) < 1e-6);
    }
}

#[test]
fn resolvent_rejects_points_outside_the_ball() {
    let src = |r: f64| SourceValue { f1: re(r), df1: re(1.0), f2: re(0.0) };
    assert!(resolve(4, re(2.0), Variant::Perturbed, &src, &[0.5, 1.2], 1e-10).is_err());
}

#[test]
fn kernel_difference_decays_in_frequency() {
    let rep = kernel_decay_scan(4, 0.3, 0.6, 0.1, &[5.0, 10.0, 20.0, 40.0]).unwrap();
    assert!(rep.values.windows(2).all(|w| w[1] < w[0]), "{:?}", rep.values);
    assert!(rep.slope <= -0.7, "slope {}", rep.slope);
    let base = kernel_decay_scan(4, 0.3, 0.6, 0.1, &[0.0]).unwrap();
    assert!(base.values[0].is_finite() && base.values[0] > 0.0);
    assert!(kernel_decay_scan(4, 0.05, 0.6, 0.1, &[5.0]).is_err());
}

/// Residue of R(λ)f at λ = 1 by the trapezoid rule on a small circle; it is
/// c·(2, d) for the gauge mode, and the first component fixes c.
fn gauge_component(d: u32, src: &dyn Source) -> f64 {
    let n = 48;
    let mut acc = C64::new(0.0, 0.0);
    for k in 0..n {
        let t = 2.0 * PI * k as f64 / n as f64;
        let dz = C64::new(0.0, 0.3) * C64::new(0.0, t).exp();
        let lam = 1.0 + dz;
        let u = resolve(d, lam, Variant::Perturbed, src, &[0.5], 1e-11).unwrap().u[0];
        acc += u * dz / n as f64;
    }
    assert!(acc.im.abs() < 1e-8);
    acc.re / 2.0
}

#[test]
fn laplace_inversion_at_time_zero_gives_half_the_data() {
    let d = 4;
    let raw = |r: f64| SourceValue { f1: re(1.0 - r * r), df1: re(-2.0 * r), f2: re(0.5 * r * r) };
    let c = gauge_component(d, &raw);
    // remove the gauge mode (2, d)·c
    let src = move |r: f64| {
        let v = raw(r);
        SourceValue { f1: v.f1 - 2.0 * c, df1: v.df1, f2: v.f2 - d as f64 * c }
    };
    // the residue of the projected data vanishes
    assert!(gauge_component(d, &src).abs() < 1e-9);
    // a symmetric truncation of the Bromwich integral returns the midpoint
    // value (f + 0)/2 at the jump τ = 0
    let rhos = [0.0, 0.25, 0.5, 0.75, 1.0];
    let opts = LaplaceOptions { omega_max: 100.0, d_omega: 0.1, ..LaplaceOptions::default() };
    let out = semigroup_laplace(d, 0.0, &src, &rhos, &opts).unwrap();
    for (v, &r) in out.values.iter().zip(&rhos) {
        let f1 = src(r).f1.re;
        assert!((2.0 * v.re - f1).abs() <= 5e-2, "r={r}: {} vs {f1}", 2.0 * v.re);
    }
}

#[test]
fn laplace_inversion_is_linear_and_real() {
    let f = |r: f64| SourceValue { f1: re(1.0 - r * r), df1: re(-2.0 * r), f2: re(0.0) };
    let g = |r: f64| SourceValue { f1: re(r * r), df1: re(2.0 * r), f2: re(1.0) };
    let fg = |r: f64| {
        let (a, b) = (f(r), g(r));
        SourceValue { f1: a.f1 * 2.0 + b.f1, df1: a.df1 * 2.0 + b.df1, f2: a.f2 * 2.0 + b.f2 }
    };
    let rhos = [0.1, 0.6];
    let opts = LaplaceOptions { omega_max: 20.0, d_omega: 0.1, tol: 1e-10, conjugate_symmetry: false, ..LaplaceOptions::default() };
    let a = semigroup_laplace(4, 1.0, &f, &rhos, &opts).unwrap();
    let b = semigroup_laplace(4, 1.0, &g, &rhos, &opts).unwrap();
    let c = semigroup_laplace(4, 1.0, &fg, &rhos, &opts).unwrap();
    for j in 0..rhos.len() {
        let lin = a.values[j] * 2.0 + b.values[j];
        assert!((c.values[j] - lin).norm() < 1e-8 * lin.norm());
        assert!(a.values[j].im.abs() < 1e-7 * a.values[j].norm());
    }
    let sym = semigroup_laplace(4, 1.0, &f, &rhos, &LaplaceOptions { conjugate_symmetry: true, ..opts }).unwrap();
    for j in 0..rhos.len() {
        assert!((sym.values[j] - a.values[j]).norm() < 1e-7 * a.values[j].norm());
    }
    assert!(semigroup_laplace(4, 1.0, &f, &rhos, &LaplaceOptions { epsilon: 0.7, ..opts }).is_err());
}

#[test]
fn bessel_description_near_the_origin() {
    let rhos = [0.01, 0.02, 0.04, 0.08];
    for (d, lam) in [(3u32, C64::new(0.1, 3.0)), (4, C64::new(0.2, 1.0)), (6, C64::new(0.0, 2.0))] {
        let rep = perturbed_bessel_check(d, lam, &rhos).unwrap();
        for r in &rep.residual {
            assert!(*r <= 1e-7, "d={d}: residual {r}");
        }
        assert!((rep.ratio_slope - 2.0).abs() <= 0.3, "d={d}: slope {}", rep.ratio_slope);
        for w in &rep.wronskian_b1_b2 {
            assert!(rel_err(*w, re(2.0 / PI)) < 1e-8);
        }
    }
    assert!(perturbed_bessel_check(4, C64::new(0.1, 3.0), &[0.6]).is_err());
}
