use cfwave::baselines::{
    run_solver, solve_local_exchange, solve_mcdmm, steplength_sensitivity, BaselineOptions,
    SolverId,
};
use cfwave::canonical::{CanonicalOptions, CanonicalSolver};
use cfwave::grid::RadialGrid;
use cfwave::potentials::{ChannelSpec, ExchangeModel};
use cfwave::reference;

fn grid() -> RadialGrid<f64> {
    RadialGrid::standard(0.006).unwrap()
}

#[test]
fn mcdmm_p_wave_anchor() {
    let ch = ChannelSpec::new(1.0, 1, 1).unwrap();
    let r = solve_mcdmm(&ch, &grid(), &BaselineOptions::default()).unwrap();
    assert!(r.converged);
    assert!((r.delta - 0.503268).abs() < 1e-4, "{}", r.delta);
}

#[test]
fn mcdmm_without_exchange_matches_canonical() {
    let opts = BaselineOptions {
        exchange: false,
        ..BaselineOptions::default()
    };
    let canonical = CanonicalSolver::new(
        grid(),
        CanonicalOptions {
            exchange: false,
            ..CanonicalOptions::default()
        },
    );
    for l in 0..=2 {
        let ch = ChannelSpec::new(1.0, l, 0).unwrap();
        let m = solve_mcdmm(&ch, &grid(), &opts).unwrap().delta;
        let c = canonical.solve(&ch).unwrap().phase.delta;
        assert!((m - c).abs() < 1e-5, "l={l}: {m} vs {c}");
    }
}

#[test]
fn mcdmm_tracks_canonical_with_exchange() {
    let canonical = CanonicalSolver::new(grid(), CanonicalOptions::default());
    for (k, l, s) in [(0.3, 0, 1), (0.7, 1, 0), (1.0, 2, 1)] {
        let ch = ChannelSpec::new(k, l, s).unwrap();
        let m = solve_mcdmm(&ch, &grid(), &BaselineOptions::default()).unwrap().delta;
        let c = canonical.solve(&ch).unwrap().phase.delta;
        assert!((m - c).abs() < 1e-5, "k={k} l={l} S={s}: {m} vs {c}");
    }
}

#[test]
fn high_partial_waves_at_low_k_are_flagged_or_accurate() {
    for l in [4, 5] {
        for s in [0, 1] {
            let ch = ChannelSpec::new(0.1, l, s).unwrap();
            let want = reference::exact(l, s, 0.1).unwrap();
            match solve_mcdmm(&ch, &grid(), &BaselineOptions::default()) {
                Ok(r) if r.converged => assert!((r.delta - want).abs() < 5e-6, "l={l}: {}", r.delta),
                _ => {}
            }
        }
    }
}

#[test]
fn local_exchange_is_steplength_independent() {
    let steps = [0.004, 0.006, 0.008];
    for id in [SolverId::Fmcc, SolverId::Bn] {
        for (k, l, s) in [(0.1, 0, 0), (0.5, 1, 1), (1.0, 0, 1), (1.5, 2, 0)] {
            let ch = ChannelSpec::new(k, l, s).unwrap();
            let rep = steplength_sensitivity(
                &ch,
                id,
                &steps,
                40.8,
                &CanonicalOptions::default(),
                &BaselineOptions::default(),
            )
            .unwrap();
            let rounded: Vec<i64> = rep.deltas.iter().map(|d: &f64| (*d * 1e6_f64).round() as i64).collect();
            assert!(rounded.windows(2).all(|w| w[0] == w[1]), "{id} k={k}: {:?}", rep.deltas);
        }
    }
}

#[test]
fn single_step_has_zero_spread() {
    let ch = ChannelSpec::new(0.4, 0, 0).unwrap();
    for id in SolverId::ALL {
        let rep = steplength_sensitivity(
            &ch,
            id,
            &[0.006],
            40.8,
            &CanonicalOptions::default(),
            &BaselineOptions::default(),
        )
        .unwrap();
        assert_eq!(rep.spread, 0.0);
        assert_eq!(rep.deltas.len(), 1);
    }
}

#[test]
fn run_solver_dispatches() {
    let ch = ChannelSpec::new(0.8, 1, 0).unwrap();
    let g = grid();
    let direct = solve_local_exchange(&ch, Some(ExchangeModel::BransdenNoble), &g, &BaselineOptions::default())
        .unwrap()
        .delta;
    let via = run_solver(SolverId::Bn, &ch, &g, &CanonicalOptions::default(), &BaselineOptions::default())
        .unwrap()
        .delta;
    assert_eq!(direct, via);
}

#[test]
fn local_exchange_error_decreases_with_k_for_high_l() {
    let g = grid();
    let canonical = CanonicalSolver::new(g.clone(), CanonicalOptions::default());
    let ks = [0.3, 0.6, 0.9, 1.2, 1.5];
    let mut failures = Vec::new();
    for l in 2..=5 {
        for s in [0, 1] {
            for m in [ExchangeModel::FurnessMcCarthy, ExchangeModel::BransdenNoble] {
                let err: Vec<f64> = ks
                    .iter()
                    .map(|&k| {
                        let ch = ChannelSpec::new(k, l, s).unwrap();
                        let a = solve_local_exchange(&ch, Some(m), &g, &BaselineOptions::default())
                            .unwrap()
                            .delta;
                        (a - canonical.solve(&ch).unwrap().phase.delta).abs()
                    })
                    .collect();
                if !err.windows(2).all(|w| w[1] < w[0]) {
                    failures.push(format!("l={l} S={s} {m:?}: {err:?}"));
                }
            }
        }
    }
    assert!(failures.is_empty(), "not monotone:\n{}", failures.join("\n"));
}
