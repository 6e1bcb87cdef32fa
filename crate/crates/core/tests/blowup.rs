use lightcone::blowup::*;
use lightcone::discretization::SpectralDiscretization;
use lightcone::model::c_d;
use std::sync::OnceLock;

fn disc(d: u32, n: usize) -> SpectralDiscretization {
    SpectralDiscretization::build(d, n).unwrap()
}

fn bump_fit(amplitude: f64) -> (FitResult, StabilityReport) {
    let s = disc(4, 64);
    let v = PerturbationData::bump(amplitude, 0.1).unwrap();
    let fit = fit_blowup_time(&s, &v, &FitOptions::default()).unwrap();
    let report = stability_report(&s, &fit, 0.1).unwrap();
    (fit, report)
}

fn reference_fit() -> &'static (FitResult, StabilityReport) {
    static FIT: OnceLock<(FitResult, StabilityReport)> = OnceLock::new();
    FIT.get_or_init(|| bump_fit(0.05))
}

#[test]
fn unperturbed_data_at_reference_time_vanish() {
    let s = disc(4, 32);
    let v = PerturbationData::zero(0.1).unwrap();
    let u = initial_data(&s, 1.0, &v).unwrap();
    assert_eq!(u.amax(), 0.0);
}

#[test]
fn blowup_time_derivative_is_gauge_direction() {
    let s = disc(4, 32);
    let v = PerturbationData::zero(0.1).unwrap();
    let h = 1e-5;
    let du = (initial_data(&s, 1.0 + h, &v).unwrap() - initial_data(&s, 1.0 - h, &v).unwrap()) / (2.0 * h);
    let n = s.len();
    let r2 = 2f64.sqrt();
    for j in 0..n {
        assert!((du[j] - r2).abs() < 1e-8);
        assert!((du[n + j] - 2.0 * r2).abs() < 1e-8);
    }
    // remainders: first slot is linear in T, second has ½·2√2·h²
    let u = initial_data(&s, 1.01, &v).unwrap();
    for j in 0..n {
        assert!((u[j] - 0.01 * r2).abs() < 1e-12);
        assert!((u[n + j] - 0.02 * r2 - r2 * 1e-4).abs() < 1e-12);
    }
}

#[test]
fn domain_is_enforced() {
    let s = disc(4, 32);
    let v = PerturbationData::zero(0.1).unwrap();
    assert!(matches!(initial_data(&s, 1.2, &v), Err(BlowupError::Domain { .. })));
    assert!(PerturbationData::zero(0.6).is_err());
    assert!(PerturbationData::bump(0.05, 0.0).is_err());
    assert!(stability_exponent(3).is_err());
    assert_eq!(stability_exponent(4).unwrap(), 8.0);
    let s3 = disc(3, 32);
    assert!(fit_blowup_time(&s3, &v, &FitOptions::default()).is_err());
}

#[test]
fn zero_perturbation_fits_exactly() {
    let s = disc(4, 32);
    let v = PerturbationData::zero(0.1).unwrap();
    let fit = fit_blowup_time(&s, &v, &FitOptions::default()).unwrap();
    assert_eq!(fit.t_star, 1.0);
    assert_eq!(fit.residual_mode, 0.0);
    let report = stability_report(&s, &fit, 0.1).unwrap();
    assert_eq!(report.s_phys, 0.0);
    assert_eq!(report.s_sim, 0.0);
}

#[test]
fn gauge_shift_matches_linear_response() {
    let d = 4;
    let s = disc(d, 48);
    let a = 0.002;
    let v = PerturbationData::gauge(d, a, 0.1).unwrap();
    let fit = fit_blowup_time(&s, &v, &FitOptions { bracket_width: 1e-11, ..Default::default() }).unwrap();
    let predicted = 1.0 - a / ((d as f64 - 2.0) * c_d(d) / 4.0);
    assert!((fit.t_star - predicted).abs() < 5e-5, "{} vs {predicted}", fit.t_star);
    assert!((fit.t_star - predicted).abs() > 0.0);
}

#[test]
fn bump_fit_brackets_and_converges() {
    let (fit, report) = reference_fit();
    assert!(fit.t_star > 0.9 && fit.t_star < 1.1);
    assert!(fit.residual_mode <= fit.tolerance, "{} > {}", fit.residual_mode, fit.tolerance);
    assert!(fit.bracket.1 - fit.bracket.0 <= 1e-10);
    assert!(fit.monotone);
    assert!(fit.trajectory.blowup_at.is_none());
    assert!(report.sup_deviation_tau10 <= 1e-3);
    assert!(report.sup_decreasing);
    assert!(report.within_delta_sq);
    assert!((fit.strichartz_sq - report.s_sim).abs() <= 1e-12 * report.s_sim);
}

#[test]
fn similarity_and_physical_functionals_agree() {
    let (_, report) = reference_fit();
    assert!(report.s_sim > 0.0);
    assert!(report.identity_rel_err <= 1e-3, "{}", report.identity_rel_err);
}

#[test]
fn functional_is_quadratic_in_amplitude() {
    let (_, full) = reference_fit();
    let (_, half) = bump_fit(0.025);
    let ratio = full.s_phys / half.s_phys;
    assert!((3.0..=5.0).contains(&ratio), "ratio {ratio}");
}

#[test]
fn detuning_grows_at_unit_rate() {
    let s = disc(4, 32);
    let rep = instability_demo(&s, 6.0, 0.01).unwrap();
    assert!(rep.baseline <= 1e-8);
    let late: Vec<f64> = rep.runs.iter().map(|r| *r.coeffs.last().unwrap()).collect();
    assert!(late[0].signum() != late[1].signum());
    for r in &rep.runs {
        assert!((r.rate - 1.0).abs() <= 0.05, "T = {}: rate {}", r.big_t, r.rate);
    }
    assert!(rep.runs[0].blowup_at.is_some());
}
