//! Acceptance criteria. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any fails.

use std::process::ExitCode;
use std::thread;
use std::time::Instant;

use cfwave::baselines::{solve_local_exchange, steplength_sensitivity, BaselineOptions, SolverId};
use cfwave::canonical::{CanonicalOptions, CanonicalSolver};
use cfwave::grid::RadialGrid;
use cfwave::ode::{integrate_pair_at, IntegratorOptions};
use cfwave::potentials::{ChannelSpec, Coefficients, ExchangeModel, FnSystem};
use cfwave::quadrature::simpson;
use cfwave::reference::{self, HIGHER_K, P_WAVE, S_WAVE};
use cfwave::special::riccati;

const H: f64 = 0.006;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

/// Runs `f` over `items` on all available cores, keeping order.
fn par_map<I: Sync, O: Send>(items: &[I], f: impl Fn(&I) -> O + Sync) -> Vec<O> {
    let workers = thread::available_parallelism().map_or(1, |n| n.get()).min(items.len().max(1));
    let chunk = items.len().div_ceil(workers).max(1);
    thread::scope(|s| {
        let handles: Vec<_> = items
            .chunks(chunk)
            .map(|part| s.spawn(|| part.iter().map(&f).collect::<Vec<O>>()))
            .collect();
        handles.into_iter().flat_map(|h| h.join().unwrap()).collect()
    })
}

fn canonical() -> CanonicalSolver<f64> {
    CanonicalSolver::with_step(H).unwrap()
}

fn kftee(k: f64, l: u32, s: u8) -> Result<f64, String> {
    let ch = ChannelSpec::new(k, l, s).map_err(|e| e.to_string())?;
    canonical()
        .solve(&ch)
        .map(|o| o.phase.delta)
        .map_err(|e| format!("k={k} l={l} S={s}: {e}"))
}

/// Compares KFTEE against tabulated values; returns (worst error, worst
/// channel, failures).
fn table_check(rows: &[(u32, u8, f64, f64)], tol: f64) -> Outcome {
    let got = par_map(rows, |&(l, s, k, _)| kftee(k, l, s));
    let mut worst = (0.0_f64, String::new());
    let mut bad = 0;
    for (&(l, s, k, want), g) in rows.iter().zip(&got) {
        let err = match g {
            Ok(d) => (d - want).abs(),
            Err(_) => f64::INFINITY,
        };
        if !(err < tol) {
            bad += 1;
        }
        if !(err <= worst.0) {
            worst = (err, format!("l={l} S={s} k={k}: {:?} vs {want}", g));
        }
    }
    outcome(
        bad == 0,
        format!("{bad}/{} outside {tol:e}; worst {:.3e} at {}", rows.len(), worst.0, worst.1),
    )
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let mut rows = Vec::new();
    for &(k, singlet, triplet) in &S_WAVE {
        rows.push((0, 0, k, singlet[3]));
        rows.push((0, 1, k, triplet[3]));
    }
    let mut o = table_check(&rows, 5e-3);
    let anchors = [(0.2, 0, 2.034071), (0.5, 0, 1.168257), (1.0, 1, 1.507213)];
    for (k, s, want) in anchors {
        match kftee(k, 0, s) {
            Ok(d) => {
                let ok = (d - want).abs() < 5e-3;
                o.pass &= ok;
                o.detail += &format!("; anchor k={k} S={s} {d:.6} vs {want}");
            }
            Err(e) => {
                o.pass = false;
                o.detail += &format!("; anchor error {e}");
            }
        }
    }
    let secs = start.elapsed().as_secs_f64();
    o.pass &= secs < 60.0;
    o.detail += &format!("; {secs:.1} s");
    o
}

fn criterion_2() -> Outcome {
    let mut rows = Vec::new();
    for &(k, singlet, triplet) in &P_WAVE {
        rows.push((1, 0, k, singlet[3]));
        rows.push((1, 1, k, triplet[3]));
    }
    let mut o = table_check(&rows, 2e-3);
    let d = kftee(0.5, 1, 1).unwrap_or(f64::NAN);
    o.pass &= (d - 0.311150).abs() < 2e-3;
    o.detail += &format!("; anchor k=0.5 S=1 {d:.6} vs 0.311150");
    o
}

fn criterion_3() -> Outcome {
    let mut rows = Vec::new();
    for l in 2..=5u32 {
        for s in [0u8, 1] {
            for &k in &HIGHER_K {
                rows.push((l, s, k, reference::exact(l, s, k).unwrap()));
            }
        }
    }
    let mut o = table_check(&rows, 2e-4);
    for (l, s, k, want) in [(3, 0, 0.5, 0.010806), (2, 1, 1.0, 0.127824)] {
        let d = kftee(k, l, s).unwrap_or(f64::NAN);
        o.pass &= (d - want).abs() < 2e-4;
        o.detail += &format!("; anchor l={l} S={s} k={k} {d:.6} vs {want}");
    }
    o
}

fn criterion_4() -> Outcome {
    let steps = [0.0048, 0.006, 0.0075];
    let mut pass = true;
    let mut detail = Vec::new();
    for s in [0u8, 1] {
        let ch = ChannelSpec::new(0.01, 0, s).unwrap();
        match steplength_sensitivity(
            &ch,
            SolverId::Kftee,
            &steps,
            40.8,
            &CanonicalOptions::default(),
            &BaselineOptions::default(),
        ) {
            Ok(r) => {
                pass &= r.stable_digits >= 4 && r.all_converged;
                detail.push(format!("S={s} spread {:.2e} ({} digits)", r.spread, r.stable_digits));
            }
            Err(e) => {
                pass = false;
                detail.push(format!("S={s} error {e}"));
            }
        }
    }
    outcome(pass, detail.join("; "))
}

fn criterion_5() -> Outcome {
    let mut channels = Vec::new();
    for k in [0.2, 0.6, 1.0] {
        for l in 0..=2u32 {
            for s in [0u8, 1] {
                channels.push((k, l, s));
            }
        }
    }
    let spreads = par_map(&channels, |&(k, l, s)| {
        let ch = ChannelSpec::new(k, l, s).unwrap();
        let d: Result<Vec<f64>, _> = [0.5, 1.0, 2.0, 5.0]
            .iter()
            .map(|&r0| {
                let opts = CanonicalOptions {
                    r0,
                    ..CanonicalOptions::default()
                };
                CanonicalSolver::new(RadialGrid::standard(H).unwrap(), opts)
                    .solve(&ch)
                    .map(|o| o.phase.delta)
            })
            .collect();
        d.map(|v| {
            let lo = v.iter().copied().fold(f64::INFINITY, f64::min);
            let hi = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            hi - lo
        })
        .unwrap_or(f64::INFINITY)
    });
    let worst = spreads.iter().copied().fold(0.0, f64::max);
    outcome(worst < 1e-6, format!("max spread over r0 {worst:.2e} on {} channels", channels.len()))
}

fn criterion_6() -> Outcome {
    let mut channels = Vec::new();
    for k in [0.1, 0.5, 1.0] {
        for l in 0..=2u32 {
            channels.push((k, l));
        }
    }
    let diffs = par_map(&channels, |&(k, l)| {
        let ch = ChannelSpec::new(k, l, 0).unwrap();
        let grid = RadialGrid::standard(H).unwrap();
        let opts = CanonicalOptions {
            exchange: false,
            ..CanonicalOptions::default()
        };
        let c = CanonicalSolver::new(grid.clone(), opts).solve(&ch).map(|o| o.phase.delta);
        let n = solve_local_exchange(&ch, None, &grid, &BaselineOptions::default()).map(|r| r.delta);
        match (c, n) {
            (Ok(a), Ok(b)) => (a - b).abs(),
            _ => f64::INFINITY,
        }
    });
    let worst = diffs.iter().copied().fold(0.0, f64::max);
    outcome(worst < 1e-6, format!("max |canonical − Numerov| {worst:.2e}"))
}

fn sensitivity(k: f64, l: u32, s: u8, id: SolverId) -> Result<Vec<f64>, String> {
    let ch = ChannelSpec::new(k, l, s).unwrap();
    steplength_sensitivity(
        &ch,
        id,
        &[0.004, 0.006, 0.008],
        40.8,
        &CanonicalOptions::default(),
        &BaselineOptions::default(),
    )
    .map(|r| r.deltas)
    .map_err(|e| e.to_string())
}

fn spread(v: &[f64]) -> f64 {
    let lo = v.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    hi - lo
}

fn criterion_7() -> Outcome {
    let low = sensitivity(0.1, 0, 0, SolverId::Mcdmm).map(|d| spread(&d));
    let high = sensitivity(1.0, 0, 0, SolverId::Mcdmm).map(|d| spread(&d));
    let (ratio_ok, ratio_text) = match (low, high) {
        (Ok(a), Ok(b)) => (
            a >= 10.0 * b,
            format!("McDMM spread k=0.1 {a:.2e}, k=1.0 {b:.2e}, ratio {:.2}", a / b),
        ),
        (a, b) => (false, format!("McDMM error {a:?} {b:?}")),
    };
    let mut cases = Vec::new();
    for id in [SolverId::Fmcc, SolverId::Bn] {
        for s in [0u8, 1] {
            for k in [0.1, 0.5, 1.0, 1.5] {
                cases.push((id, s, k));
            }
        }
    }
    let flat = par_map(&cases, |&(id, s, k)| match sensitivity(k, 0, s, id) {
        Ok(d) => {
            let r: Vec<i64> = d.iter().map(|x| (x * 1e6).round() as i64).collect();
            r.windows(2).all(|w| w[0] == w[1])
        }
        Err(_) => false,
    });
    let n_flat = flat.iter().filter(|&&b| b).count();
    outcome(
        ratio_ok && n_flat == cases.len(),
        format!("{ratio_text}; local exchange identical to 6 decimals in {n_flat}/{}", cases.len()),
    )
}

fn local(k: f64, l: u32, s: u8, m: ExchangeModel) -> f64 {
    let ch = ChannelSpec::new(k, l, s).unwrap();
    solve_local_exchange(&ch, Some(m), &RadialGrid::standard(H).unwrap(), &BaselineOptions::default())
        .map(|r| r.delta)
        .unwrap_or(f64::NAN)
}

fn criterion_8() -> Outcome {
    let ks: Vec<f64> = S_WAVE.iter().map(|r| r.0).filter(|&k| k <= 1.0 + 1e-9).collect();
    let fm_below = par_map(&ks, |&k| {
        local(k, 0, 0, ExchangeModel::FurnessMcCarthy) < kftee(k, 0, 0).unwrap_or(f64::NAN)
    });
    let a = fm_below.iter().all(|&b| b);

    let pk: Vec<f64> = P_WAVE.iter().map(|r| r.0).collect();
    let bn_above = par_map(&pk, |&k| {
        local(k, 1, 1, ExchangeModel::BransdenNoble) > kftee(k, 1, 1).unwrap_or(f64::NAN)
    });
    let first = bn_above.iter().position(|&b| b);
    let last = bn_above.iter().rposition(|&b| b);
    let b = match (first, last) {
        (Some(i), Some(j)) => bn_above[i..=j].iter().all(|&x| x),
        _ => false,
    };
    let window = match (first, last) {
        (Some(i), Some(j)) => format!("[{}, {}]", pk[i], pk[j]),
        _ => "none".into(),
    };

    let mut c = true;
    let mut gaps = Vec::new();
    for m in [ExchangeModel::FurnessMcCarthy, ExchangeModel::BransdenNoble] {
        let g3 = (local(0.3, 0, 0, m) - kftee(0.3, 0, 0).unwrap_or(f64::NAN)).abs();
        let g15 = (local(1.5, 0, 0, m) - kftee(1.5, 0, 0).unwrap_or(f64::NAN)).abs();
        c &= g15 < g3;
        gaps.push(format!("{m:?} {g3:.3} -> {g15:.3}"));
    }
    outcome(
        a && b && c,
        format!(
            "FM < KFTEE singlet s for k<=1: {a}; BN > KFTEE triplet p on {window}: {b}; gap shrinks 0.3->1.5: {c} ({})",
            gaps.join(", ")
        ),
    )
}

fn criterion_9() -> Outcome {
    let mut notes = Vec::new();

    let mut w_ok = true;
    for l in 0..=10u32 {
        for i in 0..=60 {
            let rho = 10f64.powf(-3.0 + 0.1 * i as f64);
            let p = riccati(l, rho).unwrap();
            let scale = (p.s * p.c_prime).abs().max((p.s_prime * p.c).abs()).max(1.0);
            w_ok &= (p.wronskian() + 1.0).abs() <= 1e-12 * scale;
        }
    }
    notes.push(format!("Wronskian {w_ok}"));

    let exact = |r: f64| {
        let e = (-r).exp();
        let (s, c) = r.sin_cos();
        [e * s, e * (c - s), e * c, -e * (s + c)]
    };
    let sys = FnSystem(|r: f64| {
        let v = [[1.0 + 1.0 / (1.0 + r), 0.5], [0.3 * (-r).exp(), 2.0]];
        let g = exact(r);
        let e = (-r).exp();
        Coefficients {
            v,
            w: [
                -2.0 * e * r.cos() + v[0][0] * g[0] + v[0][1] * g[2],
                2.0 * e * r.sin() + v[1][0] * g[0] + v[1][1] * g[2],
            ],
        }
    });
    let targets: Vec<f64> = (1..=50).map(|i| 0.1 * i as f64).collect();
    let err = |opts: &IntegratorOptions<f64>| {
        let sol = integrate_pair_at(&sys, true, exact(0.0), 0.0, &targets, opts).unwrap();
        sol.y
            .iter()
            .zip(&targets)
            .map(|(y, &r)| (0..4).map(|q| (y[q] - exact(r)[q]).abs()).fold(0.0, f64::max))
            .fold(0.0, f64::max)
    };
    let ratio = err(&IntegratorOptions::fixed(0.1)) / err(&IntegratorOptions::fixed(0.05));
    let recovered = err(&IntegratorOptions::default());
    let o_ok = ratio >= 2f64.powf(4.5) && recovered < 1e-9;
    notes.push(format!("order ratio {ratio:.1}, manufactured error {recovered:.1e}"));

    let mut a_ok = true;
    let mut t_ok = true;
    for (k, l, s) in [(0.1, 0, 0), (0.5, 0, 1), (1.2, 0, 0), (0.5, 1, 1), (0.9, 3, 0)] {
        let out = canonical().solve(&ChannelSpec::new(k, l, s).unwrap()).unwrap();
        let sol = &out.solution;
        if l == 0 {
            let n = sol.i_cut + 1;
            let y: Vec<f64> = (0..n)
                .map(|i| 2.0 * sol.r[i] * (-sol.r[i]).exp() * sol.y[i][0])
                .collect();
            let want = (k * k + 1.0) * simpson(&sol.r[..n], &y);
            a_ok &= (sol.a_k - want).abs() <= 1e-6 * want.abs();
        }
        let p = &out.phase;
        t_ok &= (p.delta.tan() - p.tan_delta).abs() <= 1e-10 * p.tan_delta.abs().max(1.0);
    }
    notes.push(format!("A(k) consistency {a_ok}, branch tan identity {t_ok}"));
    outcome(w_ok && o_ok && a_ok && t_ok, notes.join("; "))
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 9] = [
        ("1 s-wave table reproduction", criterion_1),
        ("2 p-wave table reproduction", criterion_2),
        ("3 l=2..5 table reproduction", criterion_3),
        ("4 low-k stability", criterion_4),
        ("5 r0 independence", criterion_5),
        ("6 exchange-off oracle", criterion_6),
        ("7 instability phenomenology", criterion_7),
        ("8 local-exchange trends", criterion_8),
        ("9 property suites", criterion_9),
    ];
    let mut failed = 0;
    for (name, run) in criteria {
        let o = run();
        let tag = if o.pass { "PASS" } else { "FAIL" };
        println!("{tag} criterion {name}: {}", o.detail);
        if !o.pass {
            failed += 1;
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
