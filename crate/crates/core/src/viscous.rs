//! Viscous stage: momentum diffusion with the mixture viscosity, viscous
//! work distributed to the phases, and pressure re-closure.

use serde::{Deserialize, Serialize};

use crate::closures::UnitSystem;
use crate::eos;
use crate::error::{CellIndex, Error, Result};
use crate::grid::{Boundaries, Grid, GridField};
use crate::parabolic::{self, face_values, DiffusionOperator, ParabolicSolver, PicardOptions};
use crate::state::{MaterialParams, SplitCell, MAX_PHASES};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ViscousConfig {
    pub enabled: bool,
    pub bulk_viscosity: f64,
    pub picard: PicardOptions,
    pub solver: ParabolicSolver,
}

impl Default for ViscousConfig {
    fn default() -> Self {
        Self {
            enabled: true,
            bulk_viscosity: 0.0,
            picard: PicardOptions::default(),
            solver: ParabolicSolver::Lim,
        }
    }
}

/// `μ = Σ α_k μ_k`.
pub fn mixture_viscosity(alpha: &[f64], mu: &[f64]) -> f64 {
    alpha.iter().zip(mu).map(|(a, m)| a * m).sum()
}

/// Face coefficients of one phase in both directions.
struct PhaseFaces {
    shear_x: Vec<f64>,
    shear_y: Vec<f64>,
    bulk_x: Vec<f64>,
    bulk_y: Vec<f64>,
}

struct Gradients<'a> {
    grid: Grid,
    periodic: [bool; 2],
    entry: &'a GridField<[f64; 2]>,
}

impl Gradients<'_> {
    /// Neighbours of face `f` along `axis` as interior indices.
    fn face_cells(&self, axis: usize, f: usize, other: usize) -> (usize, usize) {
        let n = self.grid.n(axis);
        let a = if f == 0 { n - 1 } else { f - 1 };
        let b = if f == n { 0 } else { f };
        if axis == 0 {
            (self.grid.index(a, other), self.grid.index(b, other))
        } else {
            (self.grid.index(other, a), self.grid.index(other, b))
        }
    }

    /// Tangential derivative of entry-velocity component `comp` at face `f`
    /// normal to `axis`.
    fn tangential(&self, axis: usize, f: usize, other: usize, comp: usize) -> f64 {
        let (fi, o) = (f as isize, other as isize);
        let v = |i: isize, j: isize| self.entry.get(i, j)[comp];
        if axis == 0 {
            (v(fi - 1, o + 1) - v(fi - 1, o - 1) + v(fi, o + 1) - v(fi, o - 1)) / (4.0 * self.grid.dy)
        } else {
            (v(o + 1, fi - 1) - v(o - 1, fi - 1) + v(o + 1, fi) - v(o - 1, fi)) / (4.0 * self.grid.dx)
        }
    }

    fn face_index(&self, axis: usize, f: usize, other: usize) -> usize {
        if axis == 0 {
            other * (self.grid.nx + 1) + f
        } else {
            f * self.grid.nx + other
        }
    }

    fn is_active(&self, axis: usize, f: usize) -> bool {
        self.periodic[axis] || (f > 0 && f < self.grid.n(axis))
    }
}

/// Advance velocities and phase energies by the viscous terms, then re-close
/// pressure and volume fractions in every cell.
#[allow(clippy::too_many_arguments)]
pub fn viscous_step(
    cells: &mut [SplitCell],
    grid: &Grid,
    boundaries: &Boundaries,
    mats: &[MaterialParams],
    units: &UnitSystem,
    dt: f64,
    cfg: &ViscousConfig,
) -> Result<()> {
    if !cfg.enabled || dt == 0.0 {
        return Ok(());
    }
    if cfg.bulk_viscosity < 0.0 {
        return Err(Error::Config("bulk viscosity must be non-negative".into()));
    }
    let nphase = mats.len();
    let ncell = cells.len();
    let dim = grid.dim();

    // viscosities lagged at the stage-entry temperatures
    let mu: Vec<[f64; MAX_PHASES]> = cells
        .iter()
        .map(|c| {
            let mut m = [0.0; MAX_PHASES];
            for k in 0..nphase {
                m[k] = mats[k].viscosity_at(c.w.temperature[k], c.w.density[k], units);
            }
            m
        })
        .collect();
    if cfg.bulk_viscosity == 0.0 && mu.iter().all(|m| m[..nphase].iter().all(|v| *v == 0.0)) {
        return Ok(());
    }

    let phase_faces: Vec<PhaseFaces> = (0..nphase)
        .map(|k| {
            let alpha = |c: usize| cells[c].w.volume_fraction[k];
            let (shear_x, shear_y) = face_values(grid, boundaries, |a, b| 0.5 * (alpha(a) + alpha(b)) * 0.5 * (mu[a][k] + mu[b][k]));
            let (bulk_x, bulk_y) = face_values(grid, boundaries, |a, b| 0.5 * (alpha(a) + alpha(b)) * cfg.bulk_viscosity);
            PhaseFaces {
                shear_x,
                shear_y,
                bulk_x,
                bulk_y,
            }
        })
        .collect();
    let sum_faces = |pick: &dyn Fn(&PhaseFaces) -> &Vec<f64>| -> Vec<f64> {
        let mut out = vec![0.0; pick(&phase_faces[0]).len()];
        for pf in &phase_faces {
            for (o, v) in out.iter_mut().zip(pick(pf)) {
                *o += v;
            }
        }
        out
    };
    let shear_x = sum_faces(&|p| &p.shear_x);
    let shear_y = sum_faces(&|p| &p.shear_y);
    let bulk_x = sum_faces(&|p| &p.bulk_x);
    let bulk_y = sum_faces(&|p| &p.bulk_y);
    // normal-stress coefficient 4μ/3 + μ_b, cross coefficient μ_b − 2μ/3
    let normal = |s: &[f64], b: &[f64]| -> Vec<f64> { s.iter().zip(b).map(|(s, b)| 4.0 / 3.0 * s + b).collect() };
    let cross = |s: f64, b: f64| b - 2.0 / 3.0 * s;

    let entry: Vec<[f64; 2]> = cells.iter().map(|c| c.velocity).collect();
    let mut entry_field = GridField::from_interior(*grid, *boundaries, &entry);
    entry_field.fill_ghosts();
    let grads = Gradients {
        grid: *grid,
        periodic: [boundaries.periodic(0), dim == 2 && boundaries.periodic(1)],
        entry: &entry_field,
    };
    let capacity: Vec<f64> = cells.iter().map(|c| c.density()).collect();

    let mut predictor = [vec![0.0; ncell], vec![0.0; ncell]];
    let mut updated = [vec![0.0; ncell], vec![0.0; ncell]];
    for d in 0..2 {
        for c in 0..ncell {
            predictor[d][c] = entry[c][d];
            updated[d][c] = entry[c][d];
        }
    }
    for d in 0..dim {
        let (kx, ky) = if d == 0 {
            (normal(&shear_x, &bulk_x), shear_y.clone())
        } else {
            (shear_x.clone(), normal(&shear_y, &bulk_y))
        };
        let op = DiffusionOperator::from_faces(*grid, boundaries, capacity.clone(), kx, ky);
        let mut source = vec![0.0; ncell];
        if dim == 2 {
            // divergence of the explicit cross-derivative fluxes
            let other = 1 - d;
            let flux_along = |axis: usize, f: usize, o: usize| -> f64 {
                if !grads.is_active(axis, f) {
                    return 0.0;
                }
                let fi = grads.face_index(axis, f, o);
                let (s, b) = if axis == 0 { (shear_x[fi], bulk_x[fi]) } else { (shear_y[fi], bulk_y[fi]) };
                let coef = if axis == d { cross(s, b) } else { s };
                coef * grads.tangential(axis, f, o, other)
            };
            for j in 0..grid.ny {
                for i in 0..grid.nx {
                    source[grid.index(i, j)] = (flux_along(0, i + 1, j) - flux_along(0, i, j)) / grid.dx
                        + (flux_along(1, j + 1, i) - flux_along(1, j, i)) / grid.dy;
                }
            }
        }
        let v_n: Vec<f64> = entry.iter().map(|v| v[d]).collect();
        let sol = parabolic::solve(&v_n, &op, &source, dt, cfg.solver)?;
        predictor[d] = sol.predictor;
        updated[d] = sol.value;
    }

    // phase work fluxes (α_k τ_k · u) with the predictor velocity
    let mut work = vec![[0.0; MAX_PHASES]; ncell];
    for axis in 0..dim {
        let h = grid.spacing(axis);
        let nf = grid.n(axis) + 1;
        let nother = grid.n(1 - axis);
        for o in 0..nother {
            for f in 0..nf {
                if !grads.is_active(axis, f) {
                    continue;
                }
                let (a, b) = grads.face_cells(axis, f, o);
                let fi = grads.face_index(axis, f, o);
                let un = (predictor[axis][b] - predictor[axis][a]) / h;
                let mean = [0.5 * (predictor[0][a] + predictor[0][b]), 0.5 * (predictor[1][a] + predictor[1][b])];
                let (tn, tt) = if dim == 2 {
                    let t = 1 - axis;
                    let ut = (predictor[t][b] - predictor[t][a]) / h;
                    (grads.tangential(axis, f, o, t), ut + grads.tangential(axis, f, o, axis))
                } else {
                    (0.0, 0.0)
                };
                for (k, pf) in phase_faces.iter().enumerate() {
                    let (s, bk) = if axis == 0 { (pf.shear_x[fi], pf.bulk_x[fi]) } else { (pf.shear_y[fi], pf.bulk_y[fi]) };
                    let tau_nn = (4.0 / 3.0 * s + bk) * un + cross(s, bk) * tn;
                    let tau_nt = s * tt;
                    let mut flux = tau_nn * mean[axis];
                    if dim == 2 {
                        flux += tau_nt * mean[1 - axis];
                    }
                    let flux = dt * flux / h;
                    // cell a gains through its high face, cell b loses through its low face
                    work[a][k] += flux;
                    work[b][k] -= flux;
                }
            }
        }
    }

    for (idx, cell) in cells.iter_mut().enumerate() {
        cell.velocity = [updated[0][idx], updated[1][idx]];
        for k in 0..nphase {
            cell.phase_energy[k] += work[idx][k];
        }
        reclose(cell, mats).map_err(|e| e.at_cell(CellIndex::new(idx % grid.nx, idx / grid.nx)))?;
    }
    Ok(())
}

/// Pressure and volume fractions from the phase energies. When a phase
/// energy is no longer admissible the volume fractions are kept and the
/// mixture energy is redistributed at the single pressure.
pub fn reclose(cell: &mut SplitCell, mats: &[MaterialParams]) -> Result<()> {
    let n = cell.nphase();
    let e = cell.internal_energies();
    match eos::solve_pressure_volume_fractions(&cell.m[..n], &e[..n], mats, Some(cell.w.pressure)) {
        Ok((p, alpha)) if alpha[..n].iter().all(|a| *a > 0.0 && (n == 1 || *a < 1.0)) => {
            cell.set_closure(p, &alpha, mats);
            Ok(())
        }
        _ => {
            let alpha = cell.w.volume_fraction;
            let rho_e = cell.internal_energy_density();
            let p = eos::mixture_pressure_allaire(&cell.m[..n], rho_e, &alpha[..n], mats)?;
            log::debug!("phase re-closure fell back to the mixture pressure (p = {p:e})");
            cell.set_closure(p, &alpha, mats);
            Ok(())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mixture_viscosity_examples() {
        assert_eq!(mixture_viscosity(&[1.0], &[3e-5]), 3e-5);
        assert!((mixture_viscosity(&[0.5, 0.5], &[2e-5, 0.0]) - 1e-5).abs() < 1e-20);
        assert!((mixture_viscosity(&[0.2, 0.8], &[1e-3, 1e-3]) - 1e-3).abs() < 1e-18);
    }
}
