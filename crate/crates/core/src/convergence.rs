//! Grid-refinement studies for 1D cases against an exact solution or the
//! finest run.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::config::{CaseConfig, Region, Thermo};
use crate::driver::Simulation;
use crate::error::{Error, Result};
use crate::grid::BoundaryKind;
use crate::riemann::{exact_riemann, sample_solution, RiemannSide, RiemannSolution};
use crate::state::PrimitiveState;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Reference {
    /// Exact solution: Riemann data or a periodic smooth wave.
    Oracle,
    /// The finest requested resolution, averaged onto coarser grids.
    Finest,
}

impl std::str::FromStr for Reference {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "oracle" | "exact" => Ok(Reference::Oracle),
            "finest" => Ok(Reference::Finest),
            other => Err(Error::Config(format!("unknown reference '{other}'"))),
        }
    }
}

pub const VARIABLES: [&str; 3] = ["rho", "u", "p"];

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ErrorNorms {
    pub l1: f64,
    pub l2: f64,
    pub linf: f64,
}

impl ErrorNorms {
    pub fn between(a: &[f64], b: &[f64], dx: f64) -> Self {
        let mut n = ErrorNorms::default();
        for (x, y) in a.iter().zip(b) {
            let e = (x - y).abs();
            n.l1 += e * dx;
            n.l2 += e * e * dx;
            n.linf = n.linf.max(e);
        }
        n.l2 = n.l2.sqrt();
        n
    }

    /// Observed orders between a coarse and a fine error with refinement `ratio`.
    pub fn orders(coarse: &Self, fine: &Self, ratio: f64) -> Self {
        let o = |a: f64, b: f64| if a > 0.0 && b > 0.0 { (a / b).ln() / ratio.ln() } else { f64::NAN };
        ErrorNorms {
            l1: o(coarse.l1, fine.l1),
            l2: o(coarse.l2, fine.l2),
            linf: o(coarse.linf, fine.linf),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceRow {
    pub cells: usize,
    pub variable: &'static str,
    pub errors: ErrorNorms,
    /// Orders relative to the previous (coarser) resolution.
    pub orders: Option<ErrorNorms>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceReport {
    pub case: String,
    pub reference: Reference,
    pub rows: Vec<ConvergenceRow>,
}

impl ConvergenceReport {
    pub fn row(&self, cells: usize, variable: &str) -> Option<&ConvergenceRow> {
        self.rows.iter().find(|r| r.cells == cells && r.variable == variable)
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("cells,variable,l1,l2,linf,order_l1,order_l2,order_linf\n");
        for r in &self.rows {
            let o = r.orders.unwrap_or(ErrorNorms {
                l1: f64::NAN,
                l2: f64::NAN,
                linf: f64::NAN,
            });
            let _ = writeln!(
                s,
                "{},{},{:.16e},{:.16e},{:.16e},{:.6},{:.6},{:.6}",
                r.cells, r.variable, r.errors.l1, r.errors.l2, r.errors.linf, o.l1, o.l2, o.linf
            );
        }
        s
    }

    pub fn summary(&self) -> String {
        let mut s = format!("convergence of '{}' against {:?}\n", self.case, self.reference);
        let _ = writeln!(s, "{:>8} {:>5} {:>12} {:>12} {:>12} {:>7}", "cells", "var", "L1", "L2", "Linf", "p(L1)");
        for r in &self.rows {
            let order = r.orders.map_or("-".to_string(), |o| format!("{:.2}", o.l1));
            let _ = writeln!(
                s,
                "{:>8} {:>5} {:>12.4e} {:>12.4e} {:>12.4e} {:>7}",
                r.cells, r.variable, r.errors.l1, r.errors.l2, r.errors.linf, order
            );
        }
        s
    }
}

/// Exact profile `(ρ, u, p)` as a function of position at the case end time.
pub enum ExactSolution {
    Riemann { solution: RiemannSolution, x0: f64, time: f64 },
    Wave {
        mean: f64,
        amplitude: f64,
        wavelength: f64,
        velocity: f64,
        pressure: f64,
        time: f64,
    },
}

impl ExactSolution {
    pub fn at(&self, x: f64) -> [f64; 3] {
        match self {
            ExactSolution::Riemann { solution, x0, time } => {
                let xi = if *time > 0.0 {
                    (x - x0) / time
                } else if x < *x0 {
                    f64::NEG_INFINITY
                } else {
                    f64::INFINITY
                };
                let s = sample_solution(solution, xi);
                [s.rho, s.u, s.p]
            }
            ExactSolution::Wave {
                mean,
                amplitude,
                wavelength,
                velocity,
                pressure,
                time,
            } => {
                let phase = 2.0 * std::f64::consts::PI * (x - velocity * time) / wavelength;
                [mean * (1.0 + amplitude * phase.sin()), *velocity, *pressure]
            }
        }
    }
}

fn dominant_phase(w: &PrimitiveState) -> usize {
    (0..w.nphase).fold(0, |best, k| if w.volume_fraction[k] > w.volume_fraction[best] { k } else { best })
}

/// Exact solution of a 1D case when one is available: a single periodic
/// sine wave, or two constant states separated by one jump.
pub fn exact_solution(cfg: &CaseConfig) -> Result<Option<ExactSolution>> {
    if cfg.dim() != 1 || cfg.physics.viscous || cfg.physics.conduct || cfg.physics.laser.is_some() {
        return Ok(None);
    }
    if let [Region {
        thermo:
            Thermo::SineDensity {
                mean,
                amplitude,
                wavelength,
                pressure,
            },
        velocity,
        ..
    }] = cfg.regions.as_slice()
    {
        if cfg.boundaries.x_lo == BoundaryKind::Periodic && cfg.nphase() == 1 {
            return Ok(Some(ExactSolution::Wave {
                mean: *mean,
                amplitude: *amplitude,
                wavelength: *wavelength,
                velocity: velocity[0],
                pressure: *pressure,
                time: cfg.end_time,
            }));
        }
        return Ok(None);
    }
    if cfg.physics.relax {
        return Ok(None);
    }
    let w = cfg.initial_primitives()?;
    let grid = cfg.grid();
    let jumps: Vec<usize> = (1..w.len()).filter(|&i| w[i] != w[i - 1]).collect();
    if jumps.len() != 1 {
        return Ok(None);
    }
    let j = jumps[0];
    let side = |c: &PrimitiveState| {
        let k = dominant_phase(c);
        RiemannSide::new(c.density[k], c.velocity[0], c.pressure, &cfg.materials[k])
    };
    let solution = exact_riemann(side(&w[0]), side(&w[w.len() - 1]))?;
    Ok(Some(ExactSolution::Riemann {
        solution,
        x0: grid.x0 + j as f64 * grid.dx,
        time: cfg.end_time,
    }))
}

fn profiles(w: &[PrimitiveState]) -> [Vec<f64>; 3] {
    [
        w.iter().map(|c| c.mixture_density()).collect(),
        w.iter().map(|c| c.velocity[0]).collect(),
        w.iter().map(|c| c.pressure).collect(),
    ]
}

/// Run `cfg` at `cells` and return the final primitive profile.
pub fn run_profile(cfg: &CaseConfig, cells: usize) -> Result<Vec<PrimitiveState>> {
    let mut sim = Simulation::new(cfg.clone().with_cells(cells))?;
    sim.run(|_| Ok(()))?;
    sim.primitives()
}

pub fn convergence_report(cfg: &CaseConfig, resolutions: &[usize], reference: Reference) -> Result<ConvergenceReport> {
    if cfg.dim() != 1 {
        return Err(Error::Config("convergence studies are only available for 1D cases".into()));
    }
    let mut res = resolutions.to_vec();
    res.sort_unstable();
    res.dedup();
    if res.is_empty() {
        return Err(Error::Config("at least one resolution is required".into()));
    }
    let width = cfg.domain.upper[0] - cfg.domain.lower[0];

    let mut errors: Vec<(usize, [ErrorNorms; 3])> = Vec::new();
    match reference {
        Reference::Oracle => {
            for &n in &res {
                let c = cfg.clone().with_cells(n);
                let exact = exact_solution(&c)?.ok_or_else(|| {
                    Error::Config(format!("case '{}' has no exact solution; use the finest reference", cfg.name))
                })?;
                let grid = c.grid();
                let got = profiles(&run_profile(cfg, n)?);
                let mut norms = [ErrorNorms::default(); 3];
                for (v, norm) in norms.iter_mut().enumerate() {
                    let want: Vec<f64> = (0..n).map(|i| exact.at(grid.cell_center(i, 0)[0])[v]).collect();
                    *norm = ErrorNorms::between(&got[v], &want, grid.dx);
                }
                errors.push((n, norms));
            }
        }
        Reference::Finest => {
            let finest = *res.last().unwrap();
            let fine = profiles(&run_profile(cfg, finest)?);
            for &n in &res {
                if finest % n != 0 {
                    return Err(Error::Config(format!("{finest} cells is not a multiple of {n}")));
                }
                let r = finest / n;
                let got = if n == finest { fine.clone() } else { profiles(&run_profile(cfg, n)?) };
                let mut norms = [ErrorNorms::default(); 3];
                for (v, norm) in norms.iter_mut().enumerate() {
                    let want: Vec<f64> = (0..n).map(|i| fine[v][i * r..(i + 1) * r].iter().sum::<f64>() / r as f64).collect();
                    *norm = ErrorNorms::between(&got[v], &want, width / n as f64);
                }
                errors.push((n, norms));
            }
        }
    }

    let mut rows = Vec::new();
    for (idx, (n, norms)) in errors.iter().enumerate() {
        for (v, name) in VARIABLES.iter().enumerate() {
            let orders = (idx > 0).then(|| {
                let (prev_n, prev) = &errors[idx - 1];
                ErrorNorms::orders(&prev[v], &norms[v], *n as f64 / *prev_n as f64)
            });
            rows.push(ConvergenceRow {
                cells: *n,
                variable: name,
                errors: norms[v],
                orders,
            });
        }
    }
    Ok(ConvergenceReport {
        case: cfg.name.clone(),
        reference,
        rows,
    })
}

/// Rightmost position where `values` crosses `level`, linearly interpolated
/// between cell centres.
pub fn rightmost_crossing(x: &[f64], values: &[f64], level: f64) -> Option<f64> {
    (0..values.len().saturating_sub(1)).rev().find_map(|i| {
        let (a, b) = (values[i] - level, values[i + 1] - level);
        (a * b <= 0.0 && a != b).then(|| x[i] + a / (a - b) * (x[i + 1] - x[i]))
    })
}
