//! Row computation and the worker pool.

use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use cfwave::baselines::run_solver;
use cfwave::{ChannelSpec, SolverId};

use crate::config::RunConfig;
use crate::error::Result;
use crate::output::{fmt_float, fmt_opt, Record};

/// One (channel, solver, step) combination.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Job {
    pub k: f64,
    pub l: u32,
    pub spin: u8,
    pub solver: SolverId,
    pub h: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultRow {
    pub k: f64,
    pub l: u32,
    #[serde(rename = "S")]
    pub spin: u8,
    pub solver: String,
    pub h: f64,
    /// `None` unless the run converged.
    pub delta: Option<f64>,
    pub tan_delta: Option<f64>,
    pub branch: Option<i64>,
    pub converged: bool,
    pub plateau_spread: Option<f64>,
    /// Seconds; absent in deterministic mode.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub wall_time: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

impl Record for ResultRow {
    fn header() -> &'static [&'static str] {
        &[
            "k",
            "l",
            "S",
            "solver",
            "h",
            "delta",
            "tan_delta",
            "branch",
            "converged",
            "plateau_spread",
        ]
    }

    fn fields(&self) -> Vec<String> {
        vec![
            fmt_float(self.k),
            self.l.to_string(),
            self.spin.to_string(),
            self.solver.clone(),
            fmt_float(self.h),
            fmt_opt(self.delta),
            fmt_opt(self.tan_delta),
            self.branch.map_or_else(|| "nan".into(), |b| b.to_string()),
            self.converged.to_string(),
            fmt_opt(self.plateau_spread),
        ]
    }

    fn converged(&self) -> bool {
        self.converged
    }
}

/// Cartesian product in output order `(k, l, S, solver, h)`.
pub fn jobs(cfg: &RunConfig) -> Vec<Job> {
    let mut out = Vec::new();
    for &k in &cfg.k {
        for &l in &cfg.l {
            for &spin in &cfg.spins {
                for &solver in &cfg.solvers {
                    for &h in &cfg.h {
                        out.push(Job { k, l, spin, solver, h });
                    }
                }
            }
        }
    }
    out
}

/// Runs one job. Solver failures become an unconverged row.
pub fn compute(cfg: &RunConfig, job: &Job) -> ResultRow {
    let started = Instant::now();
    let outcome = ChannelSpec::new(job.k, job.l, job.spin).and_then(|channel| {
        let grid = cfg.grid(job.h)?;
        run_solver(
            job.solver,
            &channel,
            &grid,
            &cfg.canonical_options(),
            &cfg.baseline_options(),
        )
    });
    let wall_time = (!cfg.deterministic).then(|| started.elapsed().as_secs_f64());
    let mut row = ResultRow {
        k: job.k,
        l: job.l,
        spin: job.spin,
        solver: job.solver.to_string(),
        h: job.h,
        delta: None,
        tan_delta: None,
        branch: None,
        converged: false,
        plateau_spread: None,
        wall_time,
        error: None,
    };
    match outcome {
        Ok(res) => {
            row.converged = res.converged && res.delta.is_finite();
            if row.converged {
                row.delta = Some(res.delta);
                row.tan_delta = Some(res.tan_delta);
            }
            row.branch = Some(res.branch_n);
            row.plateau_spread = Some(res.spread).filter(|s| s.is_finite());
        }
        Err(e) => row.error = Some(e.to_string()),
    }
    row
}

/// Maps `f` over `items` on a pool of `threads` workers (0 = default),
/// keeping input order.
pub fn par_map<I, O, F>(threads: usize, items: &[I], f: F) -> Result<Vec<O>>
where
    I: Sync,
    O: Send,
    F: Fn(&I) -> O + Sync,
{
    let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build()?;
    Ok(pool.install(|| items.par_iter().map(&f).collect()))
}

pub fn run_rows(cfg: &RunConfig) -> Result<Vec<ResultRow>> {
    par_map(cfg.jobs, &jobs(cfg), |j| compute(cfg, j))
}
