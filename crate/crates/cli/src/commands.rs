//! Aggregating commands: solver comparison, table and figure reproduction,
//! step-length sensitivity.

use serde::{Deserialize, Serialize};

use cfwave::baselines::stable_digits;
use cfwave::reference::{self, HigherTable, HIGHER_K, MCDMM_STEPS};
use cfwave::SolverId;

use crate::config::{parse_k_range, RunConfig};
use crate::error::Result;
use crate::output::{fmt_float, fmt_opt, Record};
use crate::run::{compute, par_map, Job, ResultRow};

fn delta_of(cfg: &RunConfig, k: f64, l: u32, spin: u8, solver: SolverId, h: f64) -> ResultRow {
    compute(cfg, &Job { k, l, spin, solver, h })
}

/// All four solvers side by side on one channel.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompareRow {
    pub k: f64,
    pub l: u32,
    #[serde(rename = "S")]
    pub spin: u8,
    pub h: f64,
    pub delta_kftee: Option<f64>,
    pub delta_mcdmm: Option<f64>,
    pub delta_fmcc: Option<f64>,
    pub delta_bn: Option<f64>,
    /// Largest `|δ − δ_kftee|` over the other solvers.
    pub max_abs_diff: Option<f64>,
}

impl Record for CompareRow {
    fn header() -> &'static [&'static str] {
        &["k", "l", "S", "h", "delta_kftee", "delta_mcdmm", "delta_fmcc", "delta_bn", "max_abs_diff"]
    }

    fn fields(&self) -> Vec<String> {
        vec![
            fmt_float(self.k),
            self.l.to_string(),
            self.spin.to_string(),
            fmt_float(self.h),
            fmt_opt(self.delta_kftee),
            fmt_opt(self.delta_mcdmm),
            fmt_opt(self.delta_fmcc),
            fmt_opt(self.delta_bn),
            fmt_opt(self.max_abs_diff),
        ]
    }

    fn converged(&self) -> bool {
        [self.delta_kftee, self.delta_mcdmm, self.delta_fmcc, self.delta_bn]
            .iter()
            .all(Option::is_some)
    }
}

pub fn compare(cfg: &RunConfig) -> Result<Vec<CompareRow>> {
    let mut keys = Vec::new();
    for &k in &cfg.k {
        for &l in &cfg.l {
            for &spin in &cfg.spins {
                for &h in &cfg.h {
                    keys.push((k, l, spin, h));
                }
            }
        }
    }
    par_map(cfg.jobs, &keys, |&(k, l, spin, h)| {
        let d = SolverId::ALL.map(|s| delta_of(cfg, k, l, spin, s, h).delta);
        let max_abs_diff = d[0].and_then(|base| {
            d[1..]
                .iter()
                .map(|x| x.map(|x| (x - base).abs()))
                .try_fold(0.0_f64, |m, x| x.map(|x| m.max(x)))
        });
        CompareRow {
            k,
            l,
            spin,
            h,
            delta_kftee: d[0],
            delta_mcdmm: d[1],
            delta_fmcc: d[2],
            delta_bn: d[3],
            max_abs_diff,
        }
    })
}

/// One cell group of a regenerated table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TableRow {
    pub k: f64,
    pub l: u32,
    #[serde(rename = "S")]
    pub spin: u8,
    /// McDMM at the three tabulated step lengths.
    pub mcdmm: [Option<f64>; 3],
    /// `max − min` of the McDMM column group.
    pub mcdmm_spread: Option<f64>,
    pub kftee: Option<f64>,
    pub kftee_ref: f64,
    pub kftee_deviation: Option<f64>,
}

impl Record for TableRow {
    fn header() -> &'static [&'static str] {
        &[
            "k",
            "l",
            "S",
            "mcdmm_h004",
            "mcdmm_h006",
            "mcdmm_h008",
            "mcdmm_spread",
            "kftee",
            "kftee_ref",
            "kftee_deviation",
        ]
    }

    fn fields(&self) -> Vec<String> {
        vec![
            fmt_float(self.k),
            self.l.to_string(),
            self.spin.to_string(),
            fmt_opt(self.mcdmm[0]),
            fmt_opt(self.mcdmm[1]),
            fmt_opt(self.mcdmm[2]),
            fmt_opt(self.mcdmm_spread),
            fmt_opt(self.kftee),
            fmt_float(self.kftee_ref),
            fmt_opt(self.kftee_deviation),
        ]
    }

    fn converged(&self) -> bool {
        self.kftee.is_some() && self.mcdmm.iter().all(Option::is_some)
    }
}

/// `(k, l, S, reference)` cells of table `id` (1 to 4).
pub fn table_cells(id: u8) -> Vec<(f64, u32, u8, f64)> {
    let mut out = Vec::new();
    match id {
        1 | 2 => {
            let (l, rows) = if id == 1 {
                (0, &reference::S_WAVE[..])
            } else {
                (1, &reference::P_WAVE[..])
            };
            for &(k, singlet, triplet) in rows {
                out.push((k, l, 0, singlet[3]));
                out.push((k, l, 1, triplet[3]));
            }
        }
        3 | 4 => {
            let (spin, table): (u8, &HigherTable) = if id == 3 {
                (0, &reference::HIGHER_SINGLET)
            } else {
                (1, &reference::HIGHER_TRIPLET)
            };
            for (i, &k) in HIGHER_K.iter().enumerate() {
                for (j, by_k) in table.iter().enumerate() {
                    out.push((k, j as u32 + 2, spin, by_k[i].1));
                }
            }
        }
        _ => {}
    }
    out
}

pub fn reproduce_table(cfg: &RunConfig, id: u8) -> Result<Vec<TableRow>> {
    par_map(cfg.jobs, &table_cells(id), |&(k, l, spin, kftee_ref)| {
        let h0 = cfg.h.first().copied().unwrap_or(0.006);
        let kftee = delta_of(cfg, k, l, spin, SolverId::Kftee, h0).delta;
        let mcdmm = MCDMM_STEPS.map(|h| delta_of(cfg, k, l, spin, SolverId::Mcdmm, h).delta);
        let mcdmm_spread = mcdmm.iter().try_fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), d| {
            d.map(|d| (lo.min(d), hi.max(d)))
        });
        TableRow {
            k,
            l,
            spin,
            mcdmm,
            mcdmm_spread: mcdmm_spread.map(|(lo, hi)| hi - lo),
            kftee,
            kftee_ref,
            kftee_deviation: kftee.map(|d| (d - kftee_ref).abs()),
        }
    })
}

/// Summary printed next to a regenerated table.
pub fn table_report(id: u8, rows: &[TableRow]) -> String {
    let worst = rows
        .iter()
        .filter_map(|r| r.kftee_deviation.map(|d| (d, r)))
        .max_by(|a, b| a.0.total_cmp(&b.0));
    let failed = rows.iter().filter(|r| r.kftee.is_none()).count();
    let mut spreads: Vec<f64> = rows.iter().filter_map(|r| r.mcdmm_spread).collect();
    spreads.sort_by(f64::total_cmp);
    let mut s = format!("table {id}: {} cells", rows.len());
    if let Some((d, r)) = worst {
        s += &format!(
            "; max |kftee - ref| {} at k={} l={} S={}",
            fmt_float(d),
            fmt_float(r.k),
            r.l,
            r.spin
        );
    }
    if failed > 0 {
        s += &format!("; {failed} kftee cells failed");
    }
    if let (Some(first), Some(last)) = (spreads.first(), spreads.last()) {
        s += &format!(
            "; mcdmm step spread min {} median {} max {}",
            fmt_float(*first),
            fmt_float(spreads[spreads.len() / 2]),
            fmt_float(*last)
        );
    }
    s
}

/// Plot-ready curves for one figure.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FigureRow {
    pub k: f64,
    pub delta_kftee: Option<f64>,
    pub delta_bnle: Option<f64>,
    pub delta_fmccle: Option<f64>,
}

impl Record for FigureRow {
    fn header() -> &'static [&'static str] {
        &["k", "delta_kftee", "delta_bnle", "delta_fmccle"]
    }

    fn fields(&self) -> Vec<String> {
        vec![
            fmt_float(self.k),
            fmt_opt(self.delta_kftee),
            fmt_opt(self.delta_bnle),
            fmt_opt(self.delta_fmccle),
        ]
    }

    fn converged(&self) -> bool {
        self.delta_kftee.is_some() && self.delta_bnle.is_some() && self.delta_fmccle.is_some()
    }
}

/// `(l, S)` of figure `id`.
pub fn figure_channel(id: u8) -> Option<(u32, u8)> {
    match id {
        1 => Some((0, 0)),
        2 => Some((0, 1)),
        3 => Some((1, 0)),
        4 => Some((1, 1)),
        _ => None,
    }
}

/// Default wavenumbers of the figure curves.
pub fn figure_ks() -> Vec<f64> {
    parse_k_range("0.05:1.5:0.05").expect("static range")
}

pub fn reproduce_figure(cfg: &RunConfig, id: u8) -> Result<Vec<FigureRow>> {
    let Some((l, spin)) = figure_channel(id) else {
        return Ok(Vec::new());
    };
    let ks = if cfg.k.is_empty() { figure_ks() } else { cfg.k.clone() };
    let h = cfg.h.first().copied().unwrap_or(0.006);
    par_map(cfg.jobs, &ks, |&k| FigureRow {
        k,
        delta_kftee: delta_of(cfg, k, l, spin, SolverId::Kftee, h).delta,
        delta_bnle: delta_of(cfg, k, l, spin, SolverId::Bn, h).delta,
        delta_fmccle: delta_of(cfg, k, l, spin, SolverId::Fmcc, h).delta,
    })
}

/// Step-length sensitivity of one solver on one channel.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SensitivityRow {
    pub k: f64,
    pub l: u32,
    #[serde(rename = "S")]
    pub spin: u8,
    pub solver: String,
    pub steps: Vec<f64>,
    pub deltas: Vec<Option<f64>>,
    /// `max δ − min δ`, absent if any run failed.
    pub spread: Option<f64>,
    pub stable_digits: Option<u32>,
}

impl Record for SensitivityRow {
    fn header() -> &'static [&'static str] {
        &["k", "l", "S", "solver", "h_min", "h_max", "runs", "delta_mean", "spread", "stable_digits"]
    }

    fn fields(&self) -> Vec<String> {
        let mean = self.mean();
        vec![
            fmt_float(self.k),
            self.l.to_string(),
            self.spin.to_string(),
            self.solver.clone(),
            fmt_float(self.steps.iter().copied().fold(f64::INFINITY, f64::min)),
            fmt_float(self.steps.iter().copied().fold(f64::NEG_INFINITY, f64::max)),
            self.steps.len().to_string(),
            fmt_opt(mean),
            fmt_opt(self.spread),
            self.stable_digits.map_or_else(|| "nan".into(), |d| d.to_string()),
        ]
    }

    fn converged(&self) -> bool {
        self.spread.is_some()
    }
}

impl SensitivityRow {
    pub fn mean(&self) -> Option<f64> {
        let all: Option<Vec<f64>> = self.deltas.iter().copied().collect();
        all.filter(|v| !v.is_empty())
            .map(|v| v.iter().sum::<f64>() / v.len() as f64)
    }
}

pub fn sensitivity(cfg: &RunConfig) -> Result<Vec<SensitivityRow>> {
    let mut keys = Vec::new();
    for &k in &cfg.k {
        for &l in &cfg.l {
            for &spin in &cfg.spins {
                for &solver in &cfg.solvers {
                    keys.push((k, l, spin, solver));
                }
            }
        }
    }
    par_map(cfg.jobs, &keys, |&(k, l, spin, solver)| {
        let deltas: Vec<Option<f64>> = cfg
            .h
            .iter()
            .map(|&h| delta_of(cfg, k, l, spin, solver, h).delta)
            .collect();
        let all: Option<Vec<f64>> = deltas.iter().copied().collect();
        let spread = all.as_ref().filter(|v| !v.is_empty()).map(|v| {
            let lo = v.iter().copied().fold(f64::INFINITY, f64::min);
            let hi = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            hi - lo
        });
        SensitivityRow {
            k,
            l,
            spin,
            solver: solver.to_string(),
            steps: cfg.h.clone(),
            stable_digits: all.zip(spread).map(|(v, s)| stable_digits(&v, s)),
            deltas,
            spread,
        }
    })
}
