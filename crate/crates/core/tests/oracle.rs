use trigbeta::corpus::default_corpus;
use trigbeta::integrand::{parse, TrigIntegrand};
use trigbeta::quad::{integrate, integrate_beta_def, QuadError, QuadOptions, MIN_LEVEL};
use trigbeta::rational::Rational;
use trigbeta::specfun::beta;

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1.0)
}

#[test]
fn endpoint_singularities_match_beta() {
    for (num, den) in [(-9, 10), (-1, 2), (-1, 10)] {
        let alpha = Rational::frac(num, den);
        let a = alpha.to_f64();
        let ti = TrigIntegrand::half_pi(alpha, Rational::ZERO);
        let q = integrate::<f64>(&ti, &QuadOptions::default()).unwrap();
        assert!(q.converged, "alpha = {alpha}");
        let exact = 0.5 * beta((a + 1.0) / 2.0, 0.5).unwrap();
        assert!(rel(q.value, exact) < 1e-9, "alpha = {alpha}: {} vs {exact}", q.value);

        // same singularity at the upper endpoint
        let ti = TrigIntegrand::half_pi(Rational::ZERO, alpha);
        let q = integrate::<f64>(&ti, &QuadOptions::default()).unwrap();
        assert!(rel(q.value, exact) < 1e-9, "beta = {alpha}");
    }
}

#[test]
fn quarter_pi_upper_singularity() {
    // u = 2x turns this into ½ ∫₀^{π/2} cos(u)^(-1/2) du = ¼ B(1/4, 1/2)
    let ti = parse("int[0,pi/4] cos(2x)^(-1/2) dx").unwrap();
    let q = integrate::<f64>(&ti, &QuadOptions::default()).unwrap();
    let exact = 0.25 * beta(0.25, 0.5).unwrap();
    assert!(rel(q.value, exact) < 1e-10, "{} vs {exact}", q.value);
}

#[test]
fn levels_settle_monotonically() {
    for e in default_corpus() {
        for inst in e.instances().unwrap() {
            let q = integrate::<f64>(&inst.integrand, &QuadOptions::default()).unwrap();
            assert!(q.converged, "{} {}", e.label(), inst.binding);
            let est = &q.level_estimates;
            let start = (MIN_LEVEL as usize).saturating_sub(1);
            for w in est[start.min(est.len())..].windows(2) {
                let (prev, next) = (w[0], w[1]);
                let floor = 1e-13 * q.value.abs().max(1.0);
                assert!(
                    next <= prev.max(floor) * 2.0 || next <= floor,
                    "{} {}: estimates {:?}",
                    e.label(),
                    inst.binding,
                    est
                );
            }
        }
    }
}

#[test]
fn single_precision_path() {
    let ti = parse("int[0,pi/2] sin(x)^4 dx").unwrap();
    let q = integrate::<f32>(&ti, &QuadOptions { abs_tol: 1e-6, rel_tol: 1e-6, max_level: 8 }).unwrap();
    assert!((q.value - 3.0 * std::f32::consts::PI / 16.0).abs() < 1e-5);
}

#[test]
fn beta_definition_agrees_with_kernel() {
    for (a, b) in [(0.25, 0.5), (1.5, 2.25), (0.1, 0.9), (3.0, 4.0)] {
        let q = integrate_beta_def::<f64>(a, b, 1e-12).unwrap();
        let k = beta(a, b).unwrap();
        assert!(rel(q.value, k) < 1e-10, "B({a}, {b}): {} vs {k}", q.value);
    }
    assert!(matches!(integrate_beta_def::<f64>(0.0, 1.0, 1e-12), Err(QuadError::InvalidArgument(_))));
}

#[test]
fn divergent_input_refused() {
    let ti = parse("int[0,pi/2] sin(x)^(-1) dx").unwrap();
    match integrate::<f64>(&ti, &QuadOptions::default()) {
        Err(QuadError::Divergent(v)) => assert!(!v.convergent),
        other => panic!("unexpected {other:?}"),
    }
    let bad = QuadOptions { max_level: 40, ..QuadOptions::default() };
    let ok = parse("int[0,pi/2] sin(x) dx").unwrap();
    assert!(matches!(integrate::<f64>(&ok, &bad), Err(QuadError::InvalidArgument(_))));
}
