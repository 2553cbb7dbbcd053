//! Hydrodynamic stage: MUSCL–HLLC finite volumes with the non-conservative
//! volume-fraction source, advanced by SSP-RK3.

mod hllc;
mod reconstruct;

pub use hllc::{hllc_flux, HllcBreakdown};
pub use reconstruct::{minmod, muscl_reconstruct, overbee, Limiter};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::eos;
use crate::error::{CellIndex, Error, Result};
use crate::grid::{Grid, GridField};
use crate::state::{primitive_from_conserved, ConservedState, MaterialParams, PrimitiveState};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum TimeIntegrator {
    #[default]
    SspRk3,
    ForwardEuler,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
pub struct HydroOptions {
    #[serde(default)]
    pub limiter: Limiter,
    #[serde(default)]
    pub integrator: TimeIntegrator,
}

/// Convert every stored cell (ghosts included) to primitive form. Errors
/// carry the coordinates of the first failing interior cell.
pub fn primitives(u: &GridField<ConservedState>, mats: &[MaterialParams]) -> Result<GridField<PrimitiveState>> {
    match u.try_map(|c| primitive_from_conserved(c, mats)) {
        Ok(f) => Ok(f),
        Err(err) => {
            for j in 0..u.grid.ny {
                for i in 0..u.grid.nx {
                    if let Err(e) = primitive_from_conserved(u.at(i, j), mats) {
                        return Err(e.at_cell(CellIndex::new(i, j)));
                    }
                }
            }
            Err(err)
        }
    }
}

/// `Δt = cfl · min Δx_d / (|u_d| + a)` over interior cells with the Wood
/// mixture sound speed.
pub fn compute_dt_cfl(w: &[PrimitiveState], grid: &Grid, mats: &[MaterialParams], cfl: f64) -> Result<f64> {
    let dim = grid.dim();
    let inv = w
        .par_iter()
        .map(|c| {
            let a = eos::wood_sound_speed(c, mats);
            (0..dim)
                .map(|d| (c.velocity[d].abs() + a) / grid.spacing(d))
                .fold(0.0, f64::max)
        })
        .reduce(|| 0.0, f64::max);
    if !inv.is_finite() {
        return Err(Error::NonFinite("characteristic speed".into()));
    }
    if inv == 0.0 {
        return Ok(f64::INFINITY);
    }
    Ok(cfl / inv)
}

/// Semi-discrete right-hand side and the net rate at which each conserved
/// quantity leaves the domain through its boundary.
pub struct Rhs {
    pub rate: Vec<ConservedState>,
    pub boundary_outflow: ConservedState,
}

/// One line of cells along `axis`; `line` holds two ghosts on each side.
fn sweep_line(line: &[PrimitiveState], mats: &[MaterialParams], limiter: Limiter, axis: usize, h: f64) -> Result<(Vec<ConservedState>, ConservedState)> {
    let n = line.len() - 4;
    let nphase = line[0].nphase;
    // faces of padded cells 1..=n+2
    let mut faces = Vec::with_capacity(n + 2);
    for p in 1..=n + 2 {
        faces.push(muscl_reconstruct(&line[p - 1], &line[p], &line[p + 1], limiter, mats));
    }
    // interface f sits between cells f-1 and f (interior numbering), f = 0..=n
    let mut fluxes = Vec::with_capacity(n + 1);
    for f in 0..=n {
        let wl = &faces[f].1;
        let wr = &faces[f + 1].0;
        fluxes.push(hllc_flux(wl, wr, mats, axis).map_err(|e| e.at_cell(CellIndex::new(f, 0)))?);
    }
    let mut rate = Vec::with_capacity(n);
    for c in 0..n {
        let (fl, fr) = (&fluxes[c], &fluxes[c + 1]);
        let mut r = ConservedState::combine(-1.0 / h, &fr.flux, 1.0 / h, &fl.flux);
        let w = &line[c + 2];
        if nphase > 1 {
            let a_mix = eos::wood_modulus(w, mats);
            let div = (fr.s_star - fl.s_star) / h;
            for l in 0..nphase - 1 {
                let a_l = eos::phase_modulus(w.pressure, &mats[l]);
                r.volume_fraction[l] += a_mix / a_l * w.volume_fraction[l] * div;
            }
        }
        rate.push(r);
    }
    let outflow = ConservedState::combine(1.0, &fluxes[n].flux, -1.0, &fluxes[0].flux);
    Ok((rate, outflow))
}

pub fn hydro_rhs(u: &mut GridField<ConservedState>, mats: &[MaterialParams], opts: &HydroOptions) -> Result<Rhs> {
    u.fill_ghosts();
    let w = primitives(u, mats)?;
    let grid = u.grid;
    let nphase = mats.len();
    let (nx, ny) = (grid.nx, grid.ny);
    let mut rate = vec![ConservedState::zero(nphase); grid.ncells()];

    let rows: Vec<(Vec<ConservedState>, ConservedState)> = (0..ny)
        .into_par_iter()
        .map(|j| {
            let line: Vec<PrimitiveState> = (-2..nx as isize + 2).map(|i| *w.get(i, j as isize)).collect();
            sweep_line(&line, mats, opts.limiter, 0, grid.dx).map_err(|e| relocate(e, None, j))
        })
        .collect::<Result<_>>()?;
    let area_x = if grid.dim() == 2 { grid.dy } else { 1.0 };
    let mut outflow = ConservedState::zero(nphase);
    for (j, (r, out)) in rows.into_iter().enumerate() {
        rate[j * nx..(j + 1) * nx].copy_from_slice(&r);
        outflow.add_scaled(area_x, &out);
    }

    if grid.dim() == 2 {
        let cols: Vec<(Vec<ConservedState>, ConservedState)> = (0..nx)
            .into_par_iter()
            .map(|i| {
                let line: Vec<PrimitiveState> = (-2..ny as isize + 2).map(|j| *w.get(i as isize, j)).collect();
                sweep_line(&line, mats, opts.limiter, 1, grid.dy).map_err(|e| relocate(e, Some(i), 0))
            })
            .collect::<Result<_>>()?;
        for (i, (r, out)) in cols.into_iter().enumerate() {
            for (j, v) in r.iter().enumerate() {
                rate[j * nx + i].add_scaled(1.0, v);
            }
            outflow.add_scaled(grid.dx, &out);
        }
    }
    Ok(Rhs {
        rate,
        boundary_outflow: outflow,
    })
}

/// Fix up the cell index reported by a line sweep.
fn relocate(e: Error, column: Option<usize>, row: usize) -> Error {
    match e {
        Error::Closure {
            cell: Some(c),
            reason,
        } => {
            let cell = match column {
                None => CellIndex::new(c.i, row),
                Some(i) => CellIndex::new(i, c.i),
            };
            Error::Closure {
                cell: Some(cell),
                reason,
            }
        }
        other => other,
    }
}

/// Advance the conserved field by `dt`. Returns the time-integrated net
/// outflow of each conserved quantity through the domain boundary (per unit
/// length in 2D, per unit area in 1D).
pub fn hydro_step(u: &mut GridField<ConservedState>, mats: &[MaterialParams], dt: f64, opts: &HydroOptions) -> Result<ConservedState> {
    let u0 = u.interior();
    let nphase = mats.len();
    let mut total_out = ConservedState::zero(nphase);

    let l0 = hydro_rhs(u, mats, opts)?;
    let u1: Vec<ConservedState> = u0.iter().zip(&l0.rate).map(|(a, r)| ConservedState::combine(1.0, a, dt, r)).collect();
    if opts.integrator == TimeIntegrator::ForwardEuler {
        total_out.add_scaled(dt, &l0.boundary_outflow);
        u.set_interior(&u1);
        return Ok(total_out);
    }
    total_out.add_scaled(dt / 6.0, &l0.boundary_outflow);

    u.set_interior(&u1);
    let l1 = hydro_rhs(u, mats, opts)?;
    total_out.add_scaled(dt / 6.0, &l1.boundary_outflow);
    let u2: Vec<ConservedState> = u0
        .iter()
        .zip(&u1)
        .zip(&l1.rate)
        .map(|((a, b), r)| ConservedState::combine(0.75, a, 0.25, &ConservedState::combine(1.0, b, dt, r)))
        .collect();

    u.set_interior(&u2);
    let l2 = hydro_rhs(u, mats, opts)?;
    total_out.add_scaled(2.0 * dt / 3.0, &l2.boundary_outflow);
    let u3: Vec<ConservedState> = u0
        .iter()
        .zip(&u2)
        .zip(&l2.rate)
        .map(|((a, b), r)| ConservedState::combine(1.0 / 3.0, a, 2.0 / 3.0, &ConservedState::combine(1.0, b, dt, r)))
        .collect();
    if let Some(idx) = u3.iter().position(|c| !c.is_finite()) {
        return Err(Error::NonFinite(format!("hydro update at cell {}", idx)));
    }
    u.set_interior(&u3);
    Ok(total_out)
}
