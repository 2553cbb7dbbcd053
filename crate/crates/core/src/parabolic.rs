//! Solvers for `c ∂v/∂t = ∇·(k∇v) + s` on the structured grid: the
//! explicit Chebyshev locally-iterative method, backward Euler with
//! Jacobi-preconditioned conjugate gradients, and a Picard wrapper for
//! coefficients that depend on the solution.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{Boundaries, Grid};

/// Below this many cells the stencil sweeps run on one thread.
const PARALLEL_THRESHOLD: usize = 8192;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum ParabolicSolver {
    #[default]
    Lim,
    Implicit,
}

impl std::str::FromStr for ParabolicSolver {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "lim" => Ok(ParabolicSolver::Lim),
            "implicit" | "pcg" => Ok(ParabolicSolver::Implicit),
            other => Err(Error::Config(format!("unknown parabolic solver '{other}'"))),
        }
    }
}

/// Discrete `(1/c) ∇·(k∇·)` with face coefficients. Non-periodic boundary
/// faces carry `k = 0` (no flux); periodic boundaries share one face.
#[derive(Debug, Clone, PartialEq)]
pub struct DiffusionOperator {
    pub grid: Grid,
    pub periodic: [bool; 2],
    pub capacity: Vec<f64>,
    /// x faces, `(nx + 1) × ny`, face `f` is the left face of cell `f`.
    pub kx: Vec<f64>,
    /// y faces, `nx × (ny + 1)`.
    pub ky: Vec<f64>,
}

impl DiffusionOperator {
    /// Face coefficients from the arithmetic mean of cell values.
    pub fn from_cell_coefficients(grid: Grid, boundaries: &Boundaries, capacity: Vec<f64>, k: &[f64]) -> Self {
        let (kx, ky) = face_values(&grid, boundaries, |a, b| 0.5 * (k[a] + k[b]));
        Self::from_faces(grid, boundaries, capacity, kx, ky)
    }

    pub fn from_faces(grid: Grid, boundaries: &Boundaries, capacity: Vec<f64>, kx: Vec<f64>, ky: Vec<f64>) -> Self {
        let periodic = [boundaries.periodic(0), grid.dim() == 2 && boundaries.periodic(1)];
        Self {
            grid,
            periodic,
            capacity,
            kx,
            ky,
        }
    }

    #[inline]
    pub fn kx_at(&self, f: usize, j: usize) -> f64 {
        self.kx[j * (self.grid.nx + 1) + f]
    }

    #[inline]
    pub fn ky_at(&self, i: usize, f: usize) -> f64 {
        self.ky[f * self.grid.nx + i]
    }

    /// `∇·(k∇v)` at cell `(i, j)` without the capacity division.
    #[inline]
    pub fn divergence_at(&self, v: &[f64], i: usize, j: usize) -> f64 {
        let g = &self.grid;
        let (nx, ny) = (g.nx, g.ny);
        let c = v[g.index(i, j)];
        let left = if i > 0 { i - 1 } else { nx - 1 };
        let right = if i + 1 < nx { i + 1 } else { 0 };
        let mut out = (self.kx_at(i + 1, j) * (v[g.index(right, j)] - c) - self.kx_at(i, j) * (c - v[g.index(left, j)]))
            / (g.dx * g.dx);
        if g.dim() == 2 {
            let down = if j > 0 { j - 1 } else { ny - 1 };
            let up = if j + 1 < ny { j + 1 } else { 0 };
            out += (self.ky_at(i, j + 1) * (v[g.index(i, up)] - c) - self.ky_at(i, j) * (c - v[g.index(i, down)]))
                / (g.dy * g.dy);
        }
        out
    }

    /// Sum of face coefficients around a cell, weighted by `1/Δx_d²`.
    fn row_weight(&self, i: usize, j: usize) -> f64 {
        let g = &self.grid;
        let mut s = (self.kx_at(i, j) + self.kx_at(i + 1, j)) / (g.dx * g.dx);
        if g.dim() == 2 {
            s += (self.ky_at(i, j) + self.ky_at(i, j + 1)) / (g.dy * g.dy);
        }
        s
    }

    fn map_cells<F>(&self, out: &mut [f64], f: F)
    where
        F: Fn(usize, usize) -> f64 + Sync,
    {
        let nx = self.grid.nx;
        if out.len() < PARALLEL_THRESHOLD {
            for (idx, o) in out.iter_mut().enumerate() {
                *o = f(idx % nx, idx / nx);
            }
        } else {
            out.par_iter_mut().enumerate().for_each(|(idx, o)| *o = f(idx % nx, idx / nx));
        }
    }

    /// `L v = (1/c) ∇·(k∇v)`.
    pub fn apply(&self, v: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; v.len()];
        self.map_cells(&mut out, |i, j| self.divergence_at(v, i, j) / self.capacity[self.grid.index(i, j)]);
        out
    }
}

/// Face quantities `face(a, b)` from the interior indices of the two cells
/// sharing each face. Non-periodic boundary faces get zero. Returns the x
/// faces (`(nx + 1) × ny`) and y faces (`nx × (ny + 1)`, empty in 1D).
pub fn face_values<F>(grid: &Grid, boundaries: &Boundaries, face: F) -> (Vec<f64>, Vec<f64>)
where
    F: Fn(usize, usize) -> f64,
{
    let (nx, ny) = (grid.nx, grid.ny);
    let mut kx = vec![0.0; (nx + 1) * ny];
    for j in 0..ny {
        for f in 1..nx {
            kx[j * (nx + 1) + f] = face(grid.index(f - 1, j), grid.index(f, j));
        }
        if boundaries.periodic(0) {
            let kb = face(grid.index(nx - 1, j), grid.index(0, j));
            kx[j * (nx + 1)] = kb;
            kx[j * (nx + 1) + nx] = kb;
        }
    }
    let mut ky = vec![0.0; nx * (ny + 1)];
    if grid.dim() == 2 {
        for f in 1..ny {
            for i in 0..nx {
                ky[f * nx + i] = face(grid.index(i, f - 1), grid.index(i, f));
            }
        }
        if boundaries.periodic(1) {
            for i in 0..nx {
                let kb = face(grid.index(i, ny - 1), grid.index(i, 0));
                ky[i] = kb;
                ky[ny * nx + i] = kb;
            }
        }
    }
    (kx, ky)
}

/// Gershgorin bound on the spectrum of `−L`.
pub fn spectral_bound(op: &DiffusionOperator) -> f64 {
    let g = &op.grid;
    let mut bound: f64 = 0.0;
    for j in 0..g.ny {
        for i in 0..g.nx {
            bound = bound.max(2.0 * op.row_weight(i, j) / op.capacity[g.index(i, j)]);
        }
    }
    bound
}

#[derive(Debug, Clone, PartialEq)]
pub struct LimSchedule {
    pub stencils: usize,
    /// `2P − 1` iteration parameters.
    pub b: Vec<f64>,
    pub lambda_max: f64,
}

pub fn lim_schedule(dt: f64, lambda_max: f64) -> LimSchedule {
    let p = ((std::f64::consts::FRAC_PI_4 * (dt * lambda_max + 1.0).sqrt()).ceil() as usize).max(1);
    let beta = |m: usize| ((2 * m - 1) as f64 * std::f64::consts::PI / (2 * p) as f64).cos();
    let b1 = beta(1);
    let a = |m: usize| lambda_max * (b1 - beta(m)) / (1.0 + b1);
    let mut b = Vec::with_capacity(2 * p - 1);
    b.extend((2..=p).rev().map(a));
    b.extend((1..=p).rev().map(a));
    LimSchedule {
        stencils: p,
        b,
        lambda_max,
    }
}

/// Result of a parabolic solve: the iterate preceding the final one (used
/// for work fluxes) and the final solution.
#[derive(Debug, Clone, PartialEq)]
pub struct ParabolicSolution {
    pub predictor: Vec<f64>,
    pub value: Vec<f64>,
}

/// Explicit LIM step for `c ∂v/∂t = ∇·(k∇v) + s`.
pub fn lim_solve(v_n: &[f64], op: &DiffusionOperator, source: &[f64], dt: f64) -> Result<ParabolicSolution> {
    lim_solve_bounded(v_n, op, source, dt, spectral_bound(op))
}

/// LIM with a caller-supplied spectral bound, which must be at least
/// [`spectral_bound`] of `op`.
pub fn lim_solve_bounded(v_n: &[f64], op: &DiffusionOperator, source: &[f64], dt: f64, lambda_max: f64) -> Result<ParabolicSolution> {
    let schedule = lim_schedule(dt, lambda_max);
    let f: Vec<f64> = source.iter().zip(&op.capacity).map(|(s, c)| s / c).collect();
    let mut prev = v_n.to_vec();
    let mut next = vec![0.0; v_n.len()];
    let mut predictor = v_n.to_vec();
    let last = schedule.b.len() - 1;
    for (m, &bm) in schedule.b.iter().enumerate() {
        if m == last {
            predictor.copy_from_slice(&prev);
        }
        let g = op.grid;
        op.map_cells(&mut next, |i, j| {
            let idx = g.index(i, j);
            let lv = op.divergence_at(&prev, i, j) / op.capacity[idx];
            (v_n[idx] + dt * bm * prev[idx] + dt * lv + dt * f[idx]) / (1.0 + dt * bm)
        });
        std::mem::swap(&mut prev, &mut next);
    }
    if prev.iter().any(|v| !v.is_finite()) {
        return Err(Error::Divergence(format!("non-finite LIM iterate ({} stencils)", schedule.stencils)));
    }
    Ok(ParabolicSolution {
        predictor,
        value: prev,
    })
}

/// Backward Euler step solved by Jacobi-preconditioned conjugate gradients
/// on the symmetric system `(c/Δt) v − ∇·(k∇v) = (c/Δt) v_n + s`.
pub fn implicit_solve(v_n: &[f64], op: &DiffusionOperator, source: &[f64], dt: f64) -> Result<Vec<f64>> {
    let n = v_n.len();
    let g = op.grid;
    let matvec = |x: &[f64], out: &mut [f64]| {
        op.map_cells(out, |i, j| {
            let idx = g.index(i, j);
            op.capacity[idx] / dt * x[idx] - op.divergence_at(x, i, j)
        });
    };
    let diag: Vec<f64> = (0..n)
        .map(|idx| op.capacity[idx] / dt + op.row_weight(idx % g.nx, idx / g.nx))
        .collect();
    let rhs: Vec<f64> = (0..n).map(|idx| op.capacity[idx] / dt * v_n[idx] + source[idx]).collect();
    let rhs_norm = norm(&rhs);
    let mut x = v_n.to_vec();
    if rhs_norm == 0.0 {
        return Ok(vec![0.0; n]);
    }

    let mut ax = vec![0.0; n];
    matvec(&x, &mut ax);
    let mut r: Vec<f64> = rhs.iter().zip(&ax).map(|(b, a)| b - a).collect();
    let mut z: Vec<f64> = r.iter().zip(&diag).map(|(r, d)| r / d).collect();
    let mut p = z.clone();
    let mut rz = dot(&r, &z);
    let tol = 1e-10 * rhs_norm;
    let max_iter = (20 * n).max(1000);
    let mut history = Vec::new();
    let mut ap = vec![0.0; n];
    for _ in 0..max_iter {
        let res = norm(&r);
        history.push(res / rhs_norm);
        if res <= tol {
            return Ok(x);
        }
        matvec(&p, &mut ap);
        let alpha = rz / dot(&p, &ap);
        for i in 0..n {
            x[i] += alpha * p[i];
            r[i] -= alpha * ap[i];
            z[i] = r[i] / diag[i];
        }
        let rz_new = dot(&r, &z);
        let beta = rz_new / rz;
        rz = rz_new;
        for i in 0..n {
            p[i] = z[i] + beta * p[i];
        }
    }
    let residual = norm(&r) / rhs_norm;
    Err(Error::LinearSolver {
        iterations: max_iter,
        residual,
        history,
    })
}

// sequential reductions keep results reproducible
fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

pub fn solve(v_n: &[f64], op: &DiffusionOperator, source: &[f64], dt: f64, solver: ParabolicSolver) -> Result<ParabolicSolution> {
    match solver {
        ParabolicSolver::Lim => lim_solve(v_n, op, source, dt),
        ParabolicSolver::Implicit => {
            let v = implicit_solve(v_n, op, source, dt)?;
            Ok(ParabolicSolution {
                predictor: v.clone(),
                value: v,
            })
        }
    }
}

/// A parabolic problem whose coefficients may depend on the solution.
pub trait ParabolicProblem {
    /// Operator and source evaluated at the given iterate.
    fn assemble(&self, iterate: &[f64]) -> Result<(DiffusionOperator, Vec<f64>)>;

    /// Linear problems stop after one solve.
    fn is_linear(&self) -> bool {
        false
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PicardOptions {
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for PicardOptions {
    fn default() -> Self {
        Self { tol: 1e-8, max_iter: 20 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PicardResult {
    pub solution: ParabolicSolution,
    pub iterations: usize,
    pub last_change: f64,
}

/// Fixed-point iteration with coefficients lagged at the previous iterate.
pub fn picard_outer<P: ParabolicProblem>(
    v_n: &[f64],
    problem: &P,
    dt: f64,
    solver: ParabolicSolver,
    opts: PicardOptions,
) -> Result<PicardResult> {
    let mut iterate = v_n.to_vec();
    let mut last_change = f64::INFINITY;
    // The LIM result depends on its parameter schedule; a bound that only
    // grows keeps the schedule fixed once it settles so the iteration can
    // converge below the LIM truncation error.
    let mut bound: f64 = 0.0;
    for s in 1..=opts.max_iter {
        let (op, source) = problem.assemble(&iterate)?;
        let solution = match solver {
            ParabolicSolver::Lim => {
                bound = bound.max(spectral_bound(&op));
                lim_solve_bounded(v_n, &op, &source, dt, bound)?
            }
            ParabolicSolver::Implicit => solve(v_n, &op, &source, dt, solver)?,
        };
        let scale = solution.value.iter().fold(0.0f64, |m, v| m.max(v.abs())).max(f64::MIN_POSITIVE);
        last_change = solution
            .value
            .iter()
            .zip(&iterate)
            .fold(0.0f64, |m, (a, b)| m.max((a - b).abs()))
            / scale;
        log::trace!("picard {s}: change {last_change:e}");
        if problem.is_linear() || last_change <= opts.tol {
            return Ok(PicardResult {
                solution,
                iterations: s,
                last_change,
            });
        }
        iterate = solution.value;
    }
    Err(Error::Picard {
        iterations: opts.max_iter,
        last_change,
    })
}
