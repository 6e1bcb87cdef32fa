use nalgebra::DVector;
use num_complex::Complex64 as C64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};
use thiserror::Error;

use lightcone::blowup::{self, FitOptions, PerturbationData};
use lightcone::discretization::{self as disc, SpectralDiscretization};
use lightcone::evolution::{self as evo, Mode};
use lightcone::green::{self, LaplaceOptions};
use lightcone::model::{self, Variant};
use lightcone::special_fn::{c3_connection, c3_predicted_zeros};
use lightcone::spectral_ode::{scan_halfplane, IndicatorOptions, ScanOptions};

use crate::config::{ConfigError, RunConfig};
use crate::output::{jnum, num, Csv, Outputs};

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("numerical failure: {0}")]
    Numeric(String),
    #[error("cannot write output: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 64,
            CliError::Numeric(_) => 65,
            CliError::Io(_) => 74,
        }
    }
}

fn numeric<E: std::fmt::Display>(e: E) -> CliError {
    CliError::Numeric(e.to_string())
}

/// How a finished command judged its own thresholds.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Pass,
    Disagreement,
    Fail,
}

impl Verdict {
    pub fn exit_code(self) -> i32 {
        match self {
            Verdict::Pass => 0,
            Verdict::Disagreement => 2,
            Verdict::Fail => 66,
        }
    }

    fn from_bool(ok: bool) -> Self {
        if ok {
            Verdict::Pass
        } else {
            Verdict::Fail
        }
    }
}

pub struct Run {
    pub verdict: Verdict,
    pub grid_n: usize,
}

fn build(cfg: &RunConfig, default_n: usize) -> Result<(SpectralDiscretization, usize), CliError> {
    let n = cfg.n.unwrap_or(default_n);
    Ok((SpectralDiscretization::build(cfg.d, n).map_err(numeric)?, n))
}

fn random_data(s: &SpectralDiscretization, seed: u64) -> DVector<f64> {
    disc::random_smooth_pair(s, &mut ChaCha8Rng::seed_from_u64(seed))
}

fn perturbation(cfg: &RunConfig, kind: &str) -> Result<PerturbationData, CliError> {
    match kind {
        "bump" => PerturbationData::bump(cfg.amplitude, cfg.delta),
        "gauge" => PerturbationData::gauge(cfg.d, cfg.amplitude, cfg.delta),
        "zero" => PerturbationData::zero(cfg.delta),
        other => return Err(ConfigError::Value { key: "data".into(), value: other.into(), reason: "not a perturbation profile".into() }.into()),
    }
    .map_err(numeric)
}

fn z(v: C64) -> Value {
    json!([jnum(v.re), jnum(v.im)])
}

pub fn spectrum(cfg: &RunConfig, out: &mut Outputs) -> Result<Run, CliError> {
    let (a, n) = build(cfg, 64)?;
    let b = SpectralDiscretization::build(cfg.d, 2 * n).map_err(numeric)?;
    let w = cfg.window;
    let in_window = |l: C64| l.re >= 0.05 && l.im.abs() <= w;
    let mut csv = Csv::new(&["operator", "method", "re", "im", "refined", "stable_under_refinement"]);
    let mut sets = serde_json::Map::new();
    let mut verdicts = Vec::new();
    for variant in [Variant::Perturbed, Variant::Free] {
        let op = variant.name();
        let report = match variant {
            Variant::Perturbed => disc::discrete_spectrum(&a, &b),
            Variant::Free => disc::discrete_spectrum_of(&a.l0_mat, &b.l0_mat),
        }
        .map_err(numeric)?;
        for e in report.entries.iter().filter(|e| e.physical && e.lambda.re >= -3.0 && e.lambda.im.abs() <= w) {
            csv.row(&[op.into(), "discrete".into(), num(e.lambda.re), num(e.lambda.im), "false".into(), e.physical.to_string()]);
        }
        let discrete: Vec<C64> = report.unstable.iter().copied().filter(|&l| in_window(l)).collect();

        let opts = ScanOptions::for_window(w);
        let roots = scan_halfplane(cfg.d, variant, w, &opts).map_err(numeric)?;
        let mut tight = ScanOptions::for_window(w);
        let loose = IndicatorOptions::default();
        tight.indicator = IndicatorOptions { tol: loose.tol / 2.0, order: 2 * loose.order, rho_mid: loose.rho_mid };
        let roots_tight = scan_halfplane(cfg.d, variant, w, &tight).map_err(numeric)?;
        for r in &roots {
            let stable = roots_tight.iter().any(|t| (t.lambda - r.lambda).norm() <= 1e-6);
            csv.row(&[op.into(), "shooting".into(), num(r.lambda.re), num(r.lambda.im), r.refined.to_string(), stable.to_string()]);
        }
        let shooting: Vec<C64> = roots.iter().map(|r| r.lambda).filter(|&l| in_window(l)).collect();

        let predicted = c3_predicted_zeros(cfg.d, variant, -3.0);
        for &l in &predicted {
            let vanishes = c3_connection(cfg.d, C64::new(l, 0.0), variant).map(|v| v.norm() <= 1e-12).unwrap_or(false);
            csv.row(&[op.into(), "c3".into(), num(l), num(0.0), vanishes.to_string(), "true".into()]);
        }
        let closed: Vec<C64> = predicted.iter().map(|&l| C64::new(l, 0.0)).filter(|&l| in_window(l)).collect();

        let want: Vec<C64> = match variant {
            Variant::Perturbed => vec![C64::new(1.0, 0.0)],
            Variant::Free => vec![],
        };
        let matches = |set: &[C64]| set.len() == want.len() && set.iter().zip(&want).all(|(x, y)| (x - y).norm() <= 1e-6);
        let agree = discrete.len() == shooting.len()
            && shooting.len() == closed.len()
            && discrete.iter().zip(&shooting).zip(&closed).all(|((x, y), c)| (x - y).norm() <= 1e-6 && (y - c).norm() <= 1e-6);
        verdicts.push(if !agree {
            Verdict::Disagreement
        } else {
            Verdict::from_bool(matches(&discrete))
        });
        sets.insert(
            op.into(),
            json!({
                "discrete": discrete.iter().map(|&l| z(l)).collect::<Vec<_>>(),
                "shooting": shooting.iter().map(|&l| z(l)).collect::<Vec<_>>(),
                "c3": closed.iter().map(|&l| z(l)).collect::<Vec<_>>(),
                "methods_agree": agree,
            }),
        );
    }
    let verdict = if verdicts.contains(&Verdict::Disagreement) {
        Verdict::Disagreement
    } else if verdicts.contains(&Verdict::Fail) {
        Verdict::Fail
    } else {
        Verdict::Pass
    };
    out.csv("spectrum.csv", &csv)?;
    out.json("spectrum.json", &json!({ "d": cfg.d, "N": n, "window": { "re_min": 0.05, "im_max": w }, "unstable": sets }))?;
    Ok(Run { verdict, grid_n: n })
}

pub fn green_check(cfg: &RunConfig, out: &mut Outputs) -> Result<Run, CliError> {
    let lambdas = [C64::new(2.0, 0.0), C64::new(0.5, 3.0), C64::new(0.1, 10.0)];
    let mut csv = Csv::new(&["variant", "lambda_re", "lambda_im", "ode_residual", "round_trip"]);
    let mut worst = 0.0f64;
    for variant in [Variant::Perturbed, Variant::Free] {
        for &lam in &lambdas {
            let c = green::resolvent_check(cfg.d, lam, variant, 1e-11).map_err(numeric)?;
            worst = worst.max(c.ode_residual).max(c.round_trip);
            csv.row(&[variant.name().into(), num(lam.re), num(lam.im), num(c.ode_residual), num(c.round_trip)]);
        }
    }
    let omegas = [5.0, 10.0, 20.0, 40.0];
    let decay = green::kernel_decay_scan(cfg.d, 0.3, 0.6, cfg.epsilon, &omegas).map_err(numeric)?;
    let mut dcsv = Csv::new(&["omega", "kernel_difference"]);
    for (w, v) in decay.omegas.iter().zip(&decay.values) {
        dcsv.row(&[num(*w), num(*v)]);
    }
    out.csv("green_check.csv", &csv)?;
    out.csv("kernel_decay.csv", &dcsv)?;
    out.json("green_check.json", &json!({ "d": cfg.d, "max_error": jnum(worst), "decay_slope": jnum(decay.slope) }))?;
    Ok(Run { verdict: Verdict::from_bool(worst <= 1e-6 && decay.slope <= -0.7), grid_n: 0 })
}

pub fn laplace_compare(cfg: &RunConfig, out: &mut Outputs) -> Result<Run, CliError> {
    let (s, n) = build(cfg, 48)?;
    let f = match cfg.data_or("random") {
        "zero" => DVector::zeros(s.dim()),
        _ => random_data(&s, cfg.seed),
    };
    let opts = LaplaceOptions { epsilon: cfg.epsilon, omega_max: cfg.omega_max, d_omega: cfg.d_omega, jobs: cfg.jobs, ..Default::default() };
    let cmp = evo::laplace_comparison(&s, &f, cfg.tau, cfg.dt, &opts).map_err(numeric)?;
    let mut csv = Csv::new(&["rho", "laplace", "stepped", "abs_diff"]);
    for k in 0..cmp.rho.len() {
        csv.row(&[num(cmp.rho[k]), num(cmp.laplace[k]), num(cmp.stepped[k]), num((cmp.laplace[k] - cmp.stepped[k]).abs())]);
    }
    out.csv("laplace_compare.csv", &csv)?;
    let rel = if cmp.rel_l2.is_nan() { 0.0 } else { cmp.rel_l2 };
    out.json("laplace_compare.json", &json!({ "tau": cmp.tau, "rel_l2": jnum(rel), "tail_estimate": jnum(cmp.tail_estimate) }))?;
    Ok(Run { verdict: Verdict::from_bool(rel <= 1e-2), grid_n: n })
}

pub fn evolve(cfg: &RunConfig, out: &mut Outputs) -> Result<Run, CliError> {
    let (s, n) = build(cfg, evo::DEFAULT_N)?;
    let mode: Mode = cfg.mode.parse().map_err(|_| ConfigError::Value {
        key: "mode".into(),
        value: cfg.mode.clone(),
        reason: "one of linear-free, linear-perturbed, nonlinear".into(),
    })?;
    let phi0 = match cfg.data_or("bump") {
        "random" => random_data(&s, cfg.seed),
        kind => blowup::initial_data(&s, 1.0, &perturbation(cfg, kind)?).map_err(numeric)?,
    };
    let qs: Vec<f64> = cfg.pairs.iter().map(|pq| pq.1).filter(|q| q.is_finite()).collect();
    let traj = evo::evolve(&s, &phi0, cfg.tau_max, cfg.dt, mode, &qs).map_err(numeric)?;
    let mut csv = Csv::new(&["tau", "rho_index", "phi1", "phi2"]);
    let np = s.len();
    let picked: Vec<usize> = (0..traj.states.len()).filter(|j| j % cfg.snapshot_every == 0 || *j == traj.states.len() - 1).collect();
    for &j in &picked {
        let st = &traj.states[j];
        for i in 0..np {
            csv.row(&[num(st.tau), i.to_string(), num(st.phi[i]), num(st.phi[np + i])]);
        }
    }
    out.csv("evolve.csv", &csv)?;
    let norms: serde_json::Map<String, Value> =
        qs.iter().map(|&q| (format!("L{q}"), json!(picked.iter().map(|&j| jnum(traj.lq_series(q)[j])).collect::<Vec<_>>()))).collect();
    out.json(
        "evolve.json",
        &json!({
            "d": cfg.d,
            "mode": mode.name(),
            "dt": cfg.dt,
            "tau": picked.iter().map(|&j| jnum(traj.states[j].tau)).collect::<Vec<_>>(),
            "energy": picked.iter().map(|&j| jnum(traj.energy[j])).collect::<Vec<_>>(),
            "mode_coefficient": picked.iter().map(|&j| jnum(traj.mode_coeffs[j])).collect::<Vec<_>>(),
            "lq_norms": norms,
            "highest_mode_ratio": jnum(traj.highest_mode),
            "blowup_at": traj.blowup_at,
        }),
    )?;
    Ok(Run { verdict: Verdict::from_bool(traj.highest_mode < 1e-6), grid_n: n })
}

pub fn strichartz(cfg: &RunConfig, out: &mut Outputs) -> Result<Run, CliError> {
    let (s, n) = build(cfg, 48)?;
    let mut csv = Csv::new(&["sample", "p", "q", "norm", "data_norm", "ratio", "tail_fraction", "not_converged"]);
    let emit = |csv: &mut Csv, k: usize, r: &evo::StrichartzReport| {
        for ((&(p, q), nm), ratio) in r.pairs.iter().zip(&r.norms).zip(&r.ratios) {
            csv.row(&[k.to_string(), num(p), num(q), num(nm.value), num(r.data_norm), num(*ratio), num(nm.tail_fraction), nm.not_converged.to_string()]);
        }
    };
    let verdict;
    let summary;
    match cfg.data_or("random") {
        "random" => {
            let fam = evo::strichartz_family(&s, &cfg.pairs, cfg.tau_max, cfg.dt, cfg.count, cfg.seed).map_err(numeric)?;
            for (k, r) in fam.reports.iter().enumerate() {
                emit(&mut csv, k, r);
            }
            let finite = fam.reports.iter().all(|r| r.ratios.iter().all(|v| v.is_finite()));
            // stability under doubling of the horizon when it fits
            let doubled = 2.0 * cfg.tau_max;
            let drift = if doubled <= 50.0 {
                let long = evo::strichartz_family(&s, &cfg.pairs, doubled, cfg.dt, cfg.count, cfg.seed).map_err(numeric)?;
                let mut worst = 0.0f64;
                for (a, b) in fam.reports.iter().zip(&long.reports) {
                    for (x, y) in a.ratios.iter().zip(&b.ratios) {
                        worst = worst.max((x - y).abs() / y.abs().max(f64::MIN_POSITIVE));
                    }
                }
                Some(worst)
            } else {
                None
            };
            let spread_ok = fam.spread.iter().all(|&v| v <= 3.0);
            verdict = Verdict::from_bool(finite && spread_ok && drift.is_none_or(|v| v <= 0.05));
            summary = json!({
                "spread": fam.spread.iter().map(|&v| jnum(v)).collect::<Vec<_>>(),
                "doubling_drift": drift.map(jnum),
            });
        }
        kind => {
            let f = match kind {
                "zero" => DVector::zeros(s.dim()),
                "gauge" => s.to_vector(&s.g_disc).map_err(numeric)? * cfg.amplitude,
                _ => blowup::initial_data(&s, 1.0, &perturbation(cfg, kind)?).map_err(numeric)?,
            };
            let r = evo::strichartz_suite(&s, &f, &cfg.pairs, cfg.tau_max, cfg.dt).map_err(numeric)?;
            emit(&mut csv, 0, &r);
            let finite = r.ratios.iter().all(|v| v.is_finite());
            verdict = Verdict::from_bool(finite);
            summary = json!({ "data_norm": jnum(r.data_norm) });
        }
    }
    out.csv("strichartz.csv", &csv)?;
    out.json("strichartz.json", &summary)?;
    Ok(Run { verdict, grid_n: n })
}

pub fn fit_blowup(cfg: &RunConfig, out: &mut Outputs) -> Result<Run, CliError> {
    let (s, n) = build(cfg, evo::DEFAULT_N)?;
    let v = perturbation(cfg, cfg.data_or("bump"))?;
    let opts = FitOptions { tau_max: cfg.tau_max, dt: cfg.dt, jobs: cfg.jobs, ..Default::default() };
    let fit = blowup::fit_blowup_time(&s, &v, &opts).map_err(numeric)?;
    let rep = blowup::stability_report(&s, &fit, cfg.delta).map_err(numeric)?;
    let demo = blowup::instability_demo(&s, cfg.tau_max.min(6.0), cfg.dt).map_err(numeric)?;

    let q = blowup::stability_exponent(cfg.d).map_err(numeric)?;
    let traj = &fit.trajectory;
    let cd = model::c_d(cfg.d);
    let lq = traj.lq_series(q);
    let mut csv = Csv::new(&["tau", "mode_coefficient", "sup_deviation", "lq_norm"]);
    for j in (0..traj.states.len()).filter(|j| j % cfg.snapshot_every == 0) {
        let sup = traj.first_component(j).iter().fold(0.0f64, |m, x| m.max(x.abs()));
        csv.row(&[num(traj.states[j].tau), num(traj.mode_coeffs[j]), num(sup), num(lq[j])]);
    }
    let mut scan = Csv::new(&["T", "late_mode_coefficient", "blowup_at"]);
    for m in &fit.scan {
        scan.row(&[num(m.big_t), num(m.coeff), m.blowup_at.map(num).unwrap_or_else(|| "none".into())]);
    }
    out.csv("fit_blowup.csv", &csv)?;
    out.csv("fit_blowup_scan.csv", &scan)?;
    let slopes: serde_json::Map<String, Value> = demo.runs.iter().map(|r| (format!("T={}", r.big_t), jnum(r.rate))).collect();
    let shift = if cfg.amplitude != 0.0 { (fit.t_star - 1.0).abs() / cfg.amplitude.abs() } else { 0.0 };
    out.json(
        "fit_blowup.json",
        &json!({
            "d": cfg.d,
            "delta": cfg.delta,
            "amplitude": cfg.amplitude,
            "c_d": cd,
            "T_star": fit.t_star,
            "bracket": [fit.bracket.0, fit.bracket.1],
            "iterations": fit.iterations,
            "residual": jnum(fit.residual_mode),
            "tolerance": jnum(fit.tolerance),
            "monotone": fit.monotone,
            "S_sim": jnum(rep.s_sim),
            "S_phys": jnum(rep.s_phys),
            "identity_rel_err": jnum(rep.identity_rel_err),
            "sup_deviation": jnum(rep.sup_deviation),
            "sup_deviation_tau10": jnum(rep.sup_deviation_tau10),
            "sup_decreasing": rep.sup_decreasing,
            "within_delta_sq": rep.within_delta_sq,
            "shift_constant": jnum(shift),
            "slopes": slopes,
            "undetuned_mode_max": jnum(demo.baseline),
        }),
    )?;
    let ok = fit.residual_mode <= fit.tolerance && rep.identity_rel_err <= 1e-3 && rep.sup_deviation_tau10 <= 1e-3;
    Ok(Run { verdict: Verdict::from_bool(ok), grid_n: n })
}
