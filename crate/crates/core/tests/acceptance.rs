//! One PASS/FAIL line per acceptance criterion, with wall time against budget.

use lightcone::blowup::{fit_blowup_time, stability_report, FitOptions, PerturbationData};
use lightcone::discretization::*;
use lightcone::evolution::*;
use lightcone::green::{forcing, kernel_decay_scan, resolve, LaplaceOptions, SourceValue};
use lightcone::model::Variant;
use lightcone::special_fn::*;
use lightcone::spectral_ode::*;
use lightcone::C64;
use nalgebra::DVector;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;
use std::time::{Duration, Instant};

type Outcome = std::result::Result<(bool, String), Box<dyn std::error::Error + Send + Sync>>;

fn re(x: f64) -> C64 {
    C64::new(x, 0.0)
}

fn disc(d: u32, n: usize) -> SpectralDiscretization {
    SpectralDiscretization::build(d, n).expect("grid")
}

fn gauge(s: &SpectralDiscretization) -> DVector<f64> {
    let d = s.d as f64;
    s.to_vector(&s.sample_pair(|_| 2.0, |_| d)).expect("length")
}

fn gauge_eigenpair() -> Outcome {
    let mut worst = 0.0f64;
    for d in 3..=6 {
        let s = disc(d, 64);
        let g = gauge(&s);
        let r = &s.l_mat * &g - &g;
        worst = worst.max(energy_norm(&s, &r) / energy_norm(&s, &g));
    }
    Ok((worst <= 1e-10, format!("max relative residual {worst:.2e}")))
}

fn spectral_gap() -> Outcome {
    let mut notes = Vec::new();
    let mut ok = true;
    let mut root_err = 0.0f64;
    for d in 3..=6 {
        let (a, b) = (disc(d, 64), disc(d, 128));
        let pert = discrete_spectrum(&a, &b)?;
        let free = discrete_spectrum_of(&a.l0_mat, &b.l0_mat)?;
        let one = pert.unstable.len() == 1 && (pert.unstable[0] - 1.0).norm() <= 1e-6;
        if let Some(l) = pert.unstable.first() {
            root_err = root_err.max((l - 1.0).norm());
        }
        ok &= one && free.unstable.is_empty();
        let c3p = c3_predicted_zeros(d, Variant::Perturbed, 0.05);
        let c3f = c3_predicted_zeros(d, Variant::Free, 0.05);
        ok &= c3p == vec![1.0] && c3f.is_empty();
        ok &= c3_connection(d, re(1.0), Variant::Perturbed)?.norm() == 0.0;
    }
    notes.push("discrete and c3 agree for d=3..6".to_string());
    let opts = ScanOptions::for_window(50.0);
    for d in [3u32, 4] {
        let pert = scan_halfplane(d, Variant::Perturbed, 50.0, &opts)?;
        let free = scan_halfplane(d, Variant::Free, 50.0, &opts)?;
        let in_window: Vec<_> = pert.iter().filter(|r| r.lambda.re >= 0.05).collect();
        ok &= in_window.len() == 1 && free.iter().all(|r| r.lambda.re < 0.05);
        if let Some(r) = in_window.first() {
            root_err = root_err.max((r.lambda - 1.0).norm());
            ok &= (r.lambda - 1.0).norm() <= 1e-6;
        }
    }
    notes.push(format!("shooting d=3,4; max |lambda*-1| = {root_err:.1e}"));
    Ok((ok, notes.join("; ")))
}

fn lambda_one_closed_forms() -> Outcome {
    let mut worst = 0.0f64;
    for d in 3..=6u32 {
        let o = SpectralOde::new(d, re(1.0), Variant::Free)?;
        let cf = explicit_lambda1(d)?;
        let s0 = integrate(&seed_origin(&o, DEFAULT_ORDER), 0.95, 1e-12)?;
        let s1 = integrate(&seed_one(&o, Branch::Analytic, DEFAULT_ORDER)?, 0.05, 1e-12)?;
        let n0 = cf.u0(0.0).0;
        let n1 = 2.0 - d as f64;
        for k in 0..=80 {
            let rho = 0.1 + 0.01 * k as f64;
            let (a, _) = s0.eval(rho)?;
            let (b, _) = s1.eval(rho)?;
            let u0 = cf.u0(rho).0;
            let u1 = cf.u1(rho).0;
            worst = worst.max((a * n0 - u0).norm() / u0.abs());
            worst = worst.max((b * n1 - u1).norm() / u1.abs());
            let w = wronskian(&s0, &s1, rho)? * n0 * n1;
            let want = (d as f64 - 2.0) * rho.powf(1.0 - d as f64) * (1.0 - rho * rho).powf(-1.5);
            worst = worst.max((w - want).norm() / want);
            worst = worst.max((cf.wronskian_u0_u1(rho) - want).abs() / want);
        }
    }
    Ok((worst <= 1e-8, format!("max relative error {worst:.2e}")))
}

fn resolvent_correctness() -> Outcome {
    let lambdas = [re(2.0), C64::new(0.5, 3.0), C64::new(0.1, 10.0)];
    let mut residual = 0.0f64;
    let mut round_trip = 0.0f64;
    for d in [3u32, 4] {
        for &lam in &lambdas {
            let v = Variant::Perturbed;
            // ODE residual of R(λ)f for a smooth f
            let src = |r: f64| SourceValue { f1: re((2.0 * r * r).cos()), df1: re(-4.0 * r * (2.0 * r * r).sin()), f2: re(1.0 + r * r) };
            let ode = SpectralOde::new(d, lam, v)?;
            let mut fmax = 0.0f64;
            let mut worst = 0.0f64;
            for j in 1..=18 {
                let r = 0.05 * j as f64;
                let h = 0.01 * r.min(1.0 - r);
                let pts: Vec<f64> = (-3..=3).map(|k| r + k as f64 * h).collect();
                let out = resolve(d, lam, v, &src, &pts, 1e-11)?;
                let du = &out.du;
                let d2 = ((du[4] - du[2]) * 45.0 - (du[5] - du[1]) * 9.0 + (du[6] - du[0])) / (60.0 * h);
                let f = forcing(d, lam, &src(r), r);
                fmax = fmax.max(f.norm());
                worst = worst.max(ode.residual(r, out.u[3], du[3], d2, f).norm());
            }
            residual = residual.max(worst / fmax);
            // f = (λ − L)u for a polynomial pair, then R(λ)f must return u
            let u1 = |r: f64| (1.0 + 0.3 * r * r, 0.6 * r, 0.6);
            let u2 = |r: f64| (0.5 - r * r, -2.0 * r, -2.0);
            let df = d as f64;
            let pot = (2.0 * df + df * df) / 4.0;
            let src = |r: f64| {
                let (a, da, d2a) = u1(r);
                let (b, db, _) = u2(r);
                let l1 = -r * da - (df - 2.0) / 2.0 * a + b;
                let lap = if r == 0.0 { df * d2a } else { d2a + (df - 1.0) / r * da };
                let l2 = lap - r * db - df / 2.0 * b + pot * a;
                let dl1 = -da - r * d2a - (df - 2.0) / 2.0 * da + db;
                SourceValue { f1: lam * a - l1, df1: lam * da - dl1, f2: lam * b - l2 }
            };
            let rhos: Vec<f64> = (0..=20).map(|j| j as f64 / 20.0).collect();
            let out = resolve(d, lam, v, &src, &rhos, 1e-11)?;
            for (j, &r) in rhos.iter().enumerate() {
                round_trip = round_trip.max((out.pair.u1[j] - u1(r).0).norm() / u1(r).0.abs().max(1.0));
                round_trip = round_trip.max((out.pair.u2[j] - u2(r).0).norm() / u2(r).0.abs().max(1.0));
            }
        }
    }
    let ok = residual <= 1e-6 && round_trip <= 1e-6;
    Ok((ok, format!("ODE residual {residual:.2e}, round trip {round_trip:.2e}")))
}

fn laplace_vs_stepping() -> Outcome {
    let s = disc(4, 48);
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let f = random_smooth_pair(&s, &mut rng);
    let opts = LaplaceOptions { epsilon: 0.1, omega_max: 200.0, d_omega: 0.05, ..Default::default() };
    let cmp = laplace_comparison(&s, &f, 1.0, 0.01, &opts)?;
    Ok((cmp.rel_l2 <= 1e-2, format!("relative L2 difference {:.2e}", cmp.rel_l2)))
}

fn semigroup_bounds() -> Outcome {
    let s = disc(4, 64);
    let g = gauge(&s);
    let traj = evolve(&s, &g, 3.0, 0.01, Mode::LinearPerturbed, &[])?;
    let want = &g * 3f64.exp();
    let gauge_err = (&traj.last().phi - &want).amax() / want.amax();
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut worst = 0.0f64;
    for _ in 0..5 {
        let phi0 = s.project_out(&random_smooth_pair(&s, &mut rng));
        let traj = evolve(&s, &phi0, 10.0, 0.01, Mode::LinearPerturbed, &[])?;
        let e0 = traj.energy[0];
        for (st, e) in traj.states.iter().zip(&traj.energy) {
            worst = worst.max(e / (e0 * (0.05 * st.tau).exp()));
        }
    }
    let ok = gauge_err <= 1e-5 && worst <= 10.0;
    Ok((ok, format!("gauge flow error {gauge_err:.2e}, max growth constant {worst:.3}")))
}

fn dissipativity() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut worst = f64::NEG_INFINITY;
    for d in 3..=6 {
        worst = worst.max(dissipativity_check(&disc(d, 48), 100, &mut rng));
    }
    Ok((worst <= 1e-8, format!("max Rayleigh quotient {worst:.3e}")))
}

fn strichartz_boundedness() -> Outcome {
    let s = disc(4, 48);
    let pairs = [(2.0, 8.0), (f64::INFINITY, 4.0)];
    let short = strichartz_family(&s, &pairs, 15.0, 0.01, 10, 0)?;
    let long = strichartz_family(&s, &pairs, 30.0, 0.01, 10, 0)?;
    let mut drift = 0.0f64;
    let mut finite = true;
    for (a, b) in short.reports.iter().zip(&long.reports) {
        for (x, y) in a.ratios.iter().zip(&b.ratios) {
            finite &= x.is_finite() && *x > 0.0;
            drift = drift.max((x - y).abs() / y);
        }
    }
    let spread = long.spread.iter().cloned().fold(0.0, f64::max);
    // the max/min of ten draws is itself random; report how often other streams stay within 3
    let mut within = 0;
    for seed in 1..=10 {
        let fam = strichartz_family(&s, &pairs, 15.0, 0.01, 10, seed)?;
        if fam.spread.iter().all(|&x| x <= 3.0) {
            within += 1;
        }
    }
    let ok = finite && drift <= 0.05 && spread <= 3.0;
    Ok((ok, format!("doubling drift {drift:.2e}, spread {spread:.3} (seed 0; seeds 1-10 within 3: {within}/10)")))
}

fn nonlinear_stability() -> Outcome {
    let s = disc(4, 96);
    let opts = FitOptions::default();
    let fit = fit_blowup_time(&s, &PerturbationData::bump(0.05, 0.1)?, &opts)?;
    let rep = stability_report(&s, &fit, 0.1)?;
    let fit_half = fit_blowup_time(&s, &PerturbationData::bump(0.025, 0.1)?, &opts)?;
    let rep_half = stability_report(&s, &fit_half, 0.1)?;
    let ratio = rep.s_phys / rep_half.s_phys;
    let ok = fit.t_star > 0.9
        && fit.t_star < 1.1
        && rep.sup_deviation_tau10 <= 1e-3
        && rep.identity_rel_err <= 1e-3
        && (3.0..=5.0).contains(&ratio);
    Ok((
        ok,
        format!(
            "T* = {:.8}, sup deviation {:.2e}, identity {:.2e}, halving ratio {ratio:.3}",
            fit.t_star, rep.sup_deviation_tau10, rep.identity_rel_err
        ),
    ))
}

fn kernel_decay() -> Outcome {
    let rep = kernel_decay_scan(4, 0.3, 0.6, 0.1, &[5.0, 10.0, 20.0, 40.0])?;
    Ok((rep.slope <= -0.7, format!("slope {:.3}", rep.slope)))
}

fn special_function_anchors() -> Outcome {
    let g = gamma_c(re(0.5))?;
    let e1 = (g - PI.sqrt()).norm() / PI.sqrt();
    let p = HypergeometricParams::new(re(1.0), re(1.0), re(2.0));
    let h = hyp2f1(&p, 0.5)?;
    let e2 = (h - 2.0 * 2f64.ln()).norm() / (2.0 * 2f64.ln());
    let zero_b = HypergeometricParams::new(C64::new(2.3, 0.7), re(0.0), re(1.5));
    let exact = [0.1, 0.5, 0.9].iter().all(|&z| hyp2f1(&zero_b, z).map(|v| v == re(1.0)).unwrap_or(false));
    let mut e4 = 0.0f64;
    for nu in [0.5, 1.0, 1.5, 2.0] {
        for z in [C64::new(0.7, 0.2), C64::new(5.0, -3.0), C64::new(30.0, 1.0)] {
            let (j, y) = bessel_jy(nu, z)?;
            let (dj, dy) = bessel_jy_deriv(nu, z)?;
            let want = 2.0 / (PI * z);
            e4 = e4.max((j * dy - dj * y - want).norm() / want.norm());
        }
    }
    let ok = e1 <= 1e-13 && e2 <= 1e-12 && exact && e4 <= 1e-8;
    Ok((ok, format!("gamma {e1:.1e}, 2F1 {e2:.1e}, exact one {exact}, Wronskian {e4:.1e}")))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome, u64); 11] = [
        ("gauge eigenpair", gauge_eigenpair, 5),
        ("spectral gap by three methods", spectral_gap, 120),
        ("lambda = 1 closed forms", lambda_one_closed_forms, 10),
        ("resolvent correctness", resolvent_correctness, 30),
        ("Laplace inversion vs time stepping", laplace_vs_stepping, 120),
        ("semigroup growth bounds", semigroup_bounds, 60),
        ("dissipativity", dissipativity, 10),
        ("Strichartz boundedness", strichartz_boundedness, 300),
        ("nonlinear stability experiment", nonlinear_stability, 600),
        ("kernel decay", kernel_decay, 60),
        ("special-function anchors", special_function_anchors, 1),
    ];
    let mut failures = 0;
    for (k, (name, run, budget)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = run();
        let elapsed = start.elapsed();
        let in_budget = elapsed <= Duration::from_secs(*budget);
        let (ok, detail) = match outcome {
            Ok((ok, detail)) => (ok && in_budget, detail),
            Err(e) => (false, format!("error: {e}")),
        };
        if !ok {
            failures += 1;
        }
        println!(
            "{} {:>2} {name}: {detail} [{:.1} s of {budget} s]",
            if ok { "PASS" } else { "FAIL" },
            k + 1,
            elapsed.as_secs_f64()
        );
    }
    println!("{} of {} criteria passed", criteria.len() - failures, criteria.len());
    if failures > 0 {
        std::process::exit(1);
    }
}
