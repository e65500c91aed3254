use approx::assert_abs_diff_eq;
use tpsas_core::numerics::{std_normal_cdf, Integrator};
use tpsas_core::{Distribution, Parameterisation, SasParams, SsSasParams, TpSasParams};

const DELTAS: [f64; 5] = [0.25, 0.5, 1.0, 2.0, 4.0];

fn naive_normal_pdf(x: f64, mu: f64, sigma: f64) -> f64 {
    let z = (x - mu) / sigma;
    (-0.5 * z * z).exp() / (sigma * (2.0 * std::f64::consts::PI).sqrt())
}

fn total_mass(pdf: impl Fn(f64) -> f64, center: f64, scale: f64) -> f64 {
    Integrator::new(1e-10)
        .centered(center, scale)
        .integrate(pdf, f64::NEG_INFINITY, f64::INFINITY)
        .unwrap()
        .value
}

#[test]
fn sas_with_unit_delta_and_zero_epsilon_is_normal() {
    let (mu, sigma) = (1.3, 2.2);
    let sas = SasParams::normal(mu, sigma).unwrap();
    for k in 0..50 {
        let x = mu + sigma * (-6.0 + 12.0 * k as f64 / 49.0);
        assert_abs_diff_eq!(sas.pdf(x), naive_normal_pdf(x, mu, sigma), epsilon = 1e-12);
        assert_abs_diff_eq!(
            sas.cdf(x),
            std_normal_cdf((x - mu) / sigma),
            epsilon = 1e-12
        );
        let u = (k as f64 + 0.5) / 50.0;
        let q = Distribution::Normal { mu, sigma }.quantile(u).unwrap();
        assert_abs_diff_eq!(sas.quantile(u).unwrap(), q, epsilon = 1e-12);
    }
}

#[test]
fn ss_sas_with_unit_delta_is_skew_normal() {
    for lambda in [-4.0, -0.5, 0.0, 2.0, 10.0] {
        let ss = SsSasParams::new(0.5, 1.5, lambda, 1.0).unwrap();
        for k in 0..50 {
            let x = -6.0 + 12.0 * k as f64 / 49.0;
            let z = (x - 0.5) / 1.5;
            let skew_normal =
                2.0 / 1.5 * naive_normal_pdf(z, 0.0, 1.0) * std_normal_cdf(lambda * z);
            assert_abs_diff_eq!(ss.pdf(x), skew_normal, epsilon = 1e-14);
        }
    }
}

#[test]
fn every_family_integrates_to_one() {
    let mut checked = 0;
    for delta in DELTAS {
        for epsilon in [-2.0, 0.0, 1.5] {
            let p = SasParams::new(0.4, 1.7, epsilon, delta).unwrap();
            let mass = total_mass(|x| p.pdf(x), 0.4, 1.7);
            assert!(
                (mass - 1.0).abs() < 1e-7,
                "SAS eps={epsilon} delta={delta}: {mass}"
            );
            checked += 1;
        }
        for gamma in [-0.75, 0.0, 0.5] {
            let p = TpSasParams::epsilon_skew(-1.0, 0.6, gamma, delta).unwrap();
            let mass = total_mass(|x| p.pdf(x), -1.0, 0.6);
            assert!(
                (mass - 1.0).abs() < 1e-7,
                "TP SAS gamma={gamma} delta={delta}: {mass}"
            );
            checked += 1;
        }
        for gamma in [0.3, 2.0] {
            let p = TpSasParams::inverse_scale_factors(0.0, 1.0, gamma, delta).unwrap();
            let mass = total_mass(|x| p.pdf(x), 0.0, 1.0);
            assert!(
                (mass - 1.0).abs() < 1e-7,
                "TP SAS isf gamma={gamma}: {mass}"
            );
            checked += 1;
        }
        for lambda in [-5.0, 0.0, 3.0] {
            let p = SsSasParams::new(2.0, 0.9, lambda, delta).unwrap();
            let mass = total_mass(|x| p.pdf(x), 2.0, 0.9);
            assert!(
                (mass - 1.0).abs() < 1e-7,
                "SS SAS lambda={lambda} delta={delta}: {mass}"
            );
            checked += 1;
        }
    }
    assert!(checked >= 45);
}

#[test]
fn tp_sas_cdf_at_mode_is_exact() {
    for gamma in [-0.75, -0.25, 0.0, 0.5, 0.75] {
        let p = TpSasParams::epsilon_skew(3.0, 2.0, gamma, 0.8).unwrap();
        let (a, b) = (1.0 - gamma, 1.0 + gamma);
        assert_eq!(p.cdf(3.0), b / (a + b));
    }
    let p = TpSasParams::new(0.0, 1.0, 2.0, 1.5, Parameterisation::InverseScaleFactors).unwrap();
    assert_eq!(p.cdf(0.0), 2.0 / (0.5 + 2.0));
}

#[test]
fn tp_sas_cdf_matches_integrated_pdf() {
    let p = TpSasParams::epsilon_skew(0.0, 1.0, 0.4, 0.6).unwrap();
    for x in [-30.0, -2.0, -0.1, 0.0, 0.7, 5.0, 80.0] {
        let mass = Integrator::new(1e-11)
            .integrate(|t| p.pdf(t), f64::NEG_INFINITY, x)
            .unwrap()
            .value;
        assert_abs_diff_eq!(p.cdf(x), mass, epsilon = 1e-9);
    }
}

/// Two-sided Kolmogorov-Smirnov statistic of a sample against a cdf.
fn ks_statistic(mut sample: Vec<f64>, cdf: impl Fn(f64) -> f64) -> f64 {
    sample.sort_by(f64::total_cmp);
    let n = sample.len() as f64;
    sample
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = cdf(x);
            (f - i as f64 / n).max((i + 1) as f64 / n - f)
        })
        .fold(0.0, f64::max)
}

#[test]
fn samplers_pass_kolmogorov_smirnov() {
    let n = 100_000;
    let critical = 1.63 / (n as f64).sqrt();
    let sas = SasParams::new(1.0, 2.0, 0.8, 0.6).unwrap();
    assert!(ks_statistic(sas.sample(n, 1), |x| sas.cdf(x)) < critical);
    let tp = TpSasParams::epsilon_skew(0.0, 1.0, 0.5, 0.75).unwrap();
    assert!(ks_statistic(tp.sample(n, 2), |x| tp.cdf(x)) < critical);
    let ss = SsSasParams::new(0.0, 1.0, 3.0, 2.0).unwrap();
    assert!(ks_statistic(ss.sample(n, 3), |x| ss.cdf(x).unwrap()) < critical);
}

#[test]
fn tp_sas_mass_below_mode_in_large_sample() {
    let p = TpSasParams::epsilon_skew(0.0, 1.0, 0.25, 1.25).unwrap();
    let s = p.sample(100_000, 5);
    let below = s.iter().filter(|&&x| x < 0.0).count() as f64 / s.len() as f64;
    assert!((below - 1.25 / 2.0).abs() < 0.005, "{below}");
}

#[test]
fn tp_sas_odd_moments_follow_gamma() {
    // epsilon-skew: gamma > 0 stretches the left half, so the mean sits below the mode
    let p = TpSasParams::epsilon_skew(0.0, 1.0, 0.3, 1.0).unwrap();
    let mean = p.moment(1).unwrap();
    let naive = Integrator::new(1e-12)
        .integrate(|x| x * p.pdf(x), f64::NEG_INFINITY, f64::INFINITY)
        .unwrap()
        .value;
    assert_abs_diff_eq!(mean, naive, epsilon = 1e-8);
    assert!(mean < 0.0);
}
