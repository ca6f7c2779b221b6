use cfwave::canonical::CanonicalSolver;
use cfwave::grid::RadialGrid;
use cfwave::phaseshift::{
    angular_spread, extract_phase, normalization_factor, q_function, FarFieldOptions,
};
use cfwave::potentials::ChannelSpec;
use cfwave::special::riccati;
use proptest::prelude::*;

fn solver(h: f64) -> CanonicalSolver<f64> {
    CanonicalSolver::with_step(h).unwrap()
}

#[test]
fn reported_branch_matches_tangent() {
    let s = solver(0.006);
    for (k, l, spin) in [(0.1, 0, 1), (0.2, 0, 0), (0.5, 0, 0), (0.5, 1, 1), (1.0, 2, 0), (1.5, 0, 1)] {
        let p = s.solve(&ChannelSpec::new(k, l, spin).unwrap()).unwrap().phase;
        assert!(
            (p.delta.tan() - p.tan_delta).abs() <= 1e-10 * p.tan_delta.abs().max(1.0),
            "k={k} l={l} S={spin}"
        );
    }
}

#[test]
fn low_k_s_waves_sit_above_the_principal_branch() {
    let s = solver(0.006);
    let p = s.solve(&ChannelSpec::new(0.2, 0, 0).unwrap()).unwrap().phase;
    assert_eq!(p.branch_n, 1);
    assert!(p.delta > std::f64::consts::FRAC_PI_2);
    let p = s.solve(&ChannelSpec::new(0.1, 0, 1).unwrap()).unwrap().phase;
    assert_eq!(p.branch_n, 1);
    assert!(p.delta > 2.9 && p.delta < 3.0);
}

#[test]
fn branch_is_stable_under_step_change() {
    for (k, spin) in [(0.01, 0), (0.1, 1), (0.3, 0), (1.0, 1)] {
        let ch = ChannelSpec::new(k, 0, spin).unwrap();
        let n: Vec<i64> = [0.0048, 0.006, 0.0075]
            .iter()
            .map(|&h| solver(h).solve(&ch).unwrap().phase.branch_n)
            .collect();
        assert!(n.windows(2).all(|w| w[0] == w[1]), "k={k} S={spin}: {n:?}");
    }
}

#[test]
fn attractive_low_energy_phases_are_positive() {
    let s = solver(0.006);
    for spin in [0, 1] {
        for l in 0..=3 {
            let p = s.solve(&ChannelSpec::new(0.15, l, spin).unwrap()).unwrap().phase;
            assert!(p.delta > 0.0, "l={l} S={spin}: {}", p.delta);
        }
    }
}

#[test]
fn q_plateau_is_flat() {
    let s = solver(0.006);
    for (k, l, spin) in [(0.1, 0, 0), (0.4, 1, 1), (1.0, 3, 0)] {
        let p = s.solve(&ChannelSpec::new(k, l, spin).unwrap()).unwrap().phase;
        assert!(p.converged);
        let angles: Vec<f64> = p.q_trace.iter().map(|&(_, q)| q.atan()).collect();
        let step = angles.len() / 10;
        let ten: Vec<f64> = (0..10).map(|i| angles[i * step]).collect();
        assert!(angular_spread(&ten) < 1e-8, "k={k}: {}", angular_spread(&ten));
    }
}

#[test]
fn free_particle_has_zero_phase_and_unit_amplitude() {
    let k = 0.7;
    let grid = RadialGrid::standard(0.006).unwrap();
    for l in 0..=3 {
        let ch = ChannelSpec::new(k, l, 0).unwrap();
        let r: Vec<f64> = grid.points().to_vec();
        let pairs: Vec<_> = r.iter().map(|&x| riccati(l, k * x).unwrap()).collect();
        let f: Vec<f64> = pairs.iter().map(|p| p.s).collect();
        let fp: Vec<f64> = pairs.iter().map(|p| k * p.s_prime).collect();
        let lf = (l * (l + 1)) as f64;
        let v = |x: f64| k * k - lf / (x * x);
        let res = extract_phase(&r, &f, &fp, v, &ch, &FarFieldOptions::default()).unwrap();
        assert!(res.delta.abs() < 1e-9, "l={l}: {}", res.delta);
        assert_eq!(res.branch_n, 0);
        assert!((res.a_norm - (2.0 / std::f64::consts::PI).sqrt()).abs() < 1e-9);
    }
}

proptest! {
    #[test]
    fn q_recovers_any_shift(l in 0u32..6, k in 0.05f64..2.0, delta in -1.5f64..1.5, r in 20.0f64..200.0) {
        let ch = ChannelSpec::new(k, l, 0).unwrap();
        let p = riccati(l, k * r).unwrap();
        let (cd, sd) = (delta.cos(), delta.sin());
        let f = cd * p.s + sd * p.c;
        let fp = k * (cd * p.s_prime + sd * p.c_prime);
        let q = q_function(f, fp, r, &ch).unwrap();
        prop_assert!((q - delta.tan()).abs() <= 1e-9 * delta.tan().abs().max(1.0));
        let a = normalization_factor(f, fp, r, &ch, delta).unwrap();
        prop_assert!((a - (2.0 / std::f64::consts::PI).sqrt()).abs() < 1e-9);
    }
}
