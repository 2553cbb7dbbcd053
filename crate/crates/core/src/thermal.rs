//! Temperature relaxation and heat conduction at a common temperature,
//! both under the single-pressure saturation constraint.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::closures::UnitSystem;
use crate::eos;
use crate::error::{CellIndex, Error, Result};
use crate::grid::{Boundaries, Grid};
use crate::parabolic::{picard_outer, DiffusionOperator, ParabolicProblem, ParabolicSolver, PicardOptions};
use crate::roots::{expand_upper, newton_bisect, RootOptions};
use crate::state::{MaterialParams, PhaseArray, SplitCell, MAX_PHASES};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum RelaxMethod {
    /// Exact solution of the coupled temperature/pressure system.
    #[default]
    Exact,
    /// A single linearised step from the current pressure.
    Linearized,
}

/// Common temperature and pressure of a cell together with its volume
/// fractions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThermalEquilibrium {
    pub temperature: f64,
    pub pressure: f64,
    pub alpha: PhaseArray,
}

/// `T(p)` from saturation: `1/T = Σ m_k (γ_k − 1) C_v,k / (p + p∞,k)`.
fn saturation_temperature(m: &[f64], p: f64, mats: &[MaterialParams]) -> (f64, f64) {
    let mut s = 0.0;
    let mut ds = 0.0;
    for (k, mat) in mats.iter().enumerate() {
        let q = m[k] * (mat.gamma - 1.0) * mat.cv / (p + mat.p_inf);
        s += q;
        ds -= q / (p + mat.p_inf);
    }
    let t = 1.0 / s;
    (t, -ds * t * t)
}

fn equilibrium_from_pt(m: &[f64], t: f64, p: f64, mats: &[MaterialParams]) -> ThermalEquilibrium {
    let mut alpha = [0.0; MAX_PHASES];
    for (k, mat) in mats.iter().enumerate() {
        alpha[k] = m[k] / eos::sg_density_from_pt(p, t, mat);
    }
    ThermalEquilibrium {
        temperature: t,
        pressure: p,
        alpha,
    }
}

/// Residual of the energy constraint along the saturation curve and its
/// derivative with respect to `p`.
fn energy_residual(m: &[f64], e_int: f64, p: f64, mats: &[MaterialParams]) -> (f64, f64) {
    let (t, dt) = saturation_temperature(m, p, mats);
    let mut h = -e_int;
    let mut dh = 0.0;
    for (k, mat) in mats.iter().enumerate() {
        // m_k e_k = m_k C_v T + α_k p∞ + m_k w with α_k = m_k (γ−1) C_v T / (p + p∞)
        let alpha = m[k] * (mat.gamma - 1.0) * mat.cv * t / (p + mat.p_inf);
        let dalpha = alpha * (dt / t - 1.0 / (p + mat.p_inf));
        h += m[k] * mat.cv * t + alpha * mat.p_inf + m[k] * mat.w;
        dh += m[k] * mat.cv * dt + dalpha * mat.p_inf;
    }
    (h, dh)
}

/// Solve for the common `(T, p)` that conserves the internal energy density
/// `e_int = Σ m_k e_k` and satisfies saturation. `T` is eliminated in closed
/// form, leaving a safeguarded Newton iteration on `p`.
pub fn equilibrium_temperature_pressure(
    m: &[f64],
    e_int: f64,
    mats: &[MaterialParams],
    guess: Option<f64>,
) -> Result<ThermalEquilibrium> {
    let floor = mats.iter().map(|m| -m.p_inf).fold(f64::NEG_INFINITY, f64::max);
    let scale = mats.iter().map(|m| m.p_inf).fold(0.0, f64::max).max(e_int.abs()).max(f64::MIN_POSITIVE);
    let lo = floor + 1e-13 * scale;
    let f_lo = energy_residual(m, e_int, lo, mats).0;
    if !(f_lo < 0.0) {
        return Err(Error::closure(format!(
            "internal energy {e_int:e} below the admissible minimum of the temperature equilibrium"
        )));
    }
    let start = guess.filter(|g| *g > lo).unwrap_or(lo + scale);
    let hi = expand_upper(|p| energy_residual(m, e_int, p, mats).0, lo, start, -1.0)?;
    let opts = RootOptions {
        rel_tol: 1e-15,
        abs_tol: 1e-15 * scale,
        max_iter: 200,
    };
    let p = newton_bisect(|p| energy_residual(m, e_int, p, mats), lo, hi, start, opts)?;
    let t = saturation_temperature(m, p, mats).0;
    Ok(equilibrium_from_pt(m, t, p, mats))
}

/// Saturation pressure of a cell at temperature `t`.
pub fn pressure_at_temperature(m: &[f64], t: f64, mats: &[MaterialParams], guess: Option<f64>) -> Result<f64> {
    let n = mats.len();
    let mut c = [0.0; MAX_PHASES];
    let mut offset = [0.0; MAX_PHASES];
    for k in 0..n {
        c[k] = m[k] * (mats[k].gamma - 1.0) * mats[k].cv * t;
        offset[k] = mats[k].p_inf;
    }
    eos::saturation_root(&c[..n], &offset[..n], guess)
}

/// Internal energy density `Σ m_k e_k(T, p(T))` on the saturation curve.
pub fn energy_at_temperature(m: &[f64], t: f64, mats: &[MaterialParams], guess: Option<f64>) -> Result<(f64, f64)> {
    let p = pressure_at_temperature(m, t, mats, guess)?;
    let e = mats
        .iter()
        .enumerate()
        .map(|(k, mat)| m[k] * eos::sg_energy_from_pt(p, t, mat))
        .sum();
    Ok((e, p))
}

/// `d(Σ m_k e_k)/dT` along the saturation constraint at `(T, p)`.
pub fn effective_heat_capacity(m: &[f64], t: f64, p: f64, mats: &[MaterialParams]) -> f64 {
    let mut direct = 0.0;
    let mut num = 0.0;
    let mut den = 0.0;
    for (k, mat) in mats.iter().enumerate() {
        let q = p + mat.p_inf;
        let alpha = m[k] * (mat.gamma - 1.0) * mat.cv * t / q;
        direct += m[k] * mat.cv * (p + mat.gamma * mat.p_inf) / q;
        num += alpha * mat.p_inf / q;
        den += alpha / q;
    }
    direct - num / (t * den)
}

/// Equilibrate the phase temperatures of one cell at fixed `m_k`, velocity
/// and internal energy.
pub fn relax_temperatures(cell: &SplitCell, mats: &[MaterialParams], method: RelaxMethod) -> Result<SplitCell> {
    let n = cell.nphase();
    let mut out = *cell;
    let e_int = cell.internal_energy_density();
    let eq = match method {
        RelaxMethod::Exact => equilibrium_temperature_pressure(&cell.m[..n], e_int, mats, Some(cell.w.pressure))?,
        RelaxMethod::Linearized => {
            let p0 = cell.w.pressure;
            let (h, dh) = energy_residual(&cell.m[..n], e_int, p0, mats);
            let p = p0 - h / dh;
            let t = saturation_temperature(&cell.m[..n], p, mats).0;
            equilibrium_from_pt(&cell.m[..n], t, p, mats)
        }
    };
    out.set_closure(eq.pressure, &eq.alpha, mats);
    Ok(out)
}

pub fn relax_all(cells: &mut [SplitCell], grid: &Grid, mats: &[MaterialParams], method: RelaxMethod) -> Result<()> {
    let results: Vec<Result<SplitCell>> = cells.par_iter().map(|c| relax_temperatures(c, mats, method)).collect();
    for (idx, r) in results.into_iter().enumerate() {
        cells[idx] = r.map_err(|e| e.at_cell(CellIndex::new(idx % grid.nx, idx / grid.nx)))?;
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ConductionConfig {
    pub enabled: bool,
    pub solver: ParabolicSolver,
    pub picard: PicardOptions,
}

impl Default for ConductionConfig {
    fn default() -> Self {
        Self {
            enabled: true,
            solver: ParabolicSolver::Lim,
            picard: PicardOptions::default(),
        }
    }
}

/// `E(T) ∂T/∂t = ∇·(λ∇T) + I` with the capacity taken as the chord slope of
/// the cell energy between the old temperature and the current iterate.
struct ConductionProblem<'a> {
    cells: &'a [SplitCell],
    grid: Grid,
    boundaries: Boundaries,
    mats: &'a [MaterialParams],
    units: &'a UnitSystem,
    source: &'a [f64],
    t_old: Vec<f64>,
    e_old: Vec<f64>,
    capacity_old: Vec<f64>,
}

impl ParabolicProblem for ConductionProblem<'_> {
    fn assemble(&self, iterate: &[f64]) -> Result<(DiffusionOperator, Vec<f64>)> {
        let n = self.mats.len();
        let eval: Vec<Result<(f64, f64)>> = self
            .cells
            .par_iter()
            .enumerate()
            .map(|(idx, cell)| {
                let t = iterate[idx];
                if !(t > 0.0) {
                    return Err(Error::closure(format!("non-positive temperature iterate {t:e}")));
                }
                let m = &cell.m[..n];
                let (e, p) = energy_at_temperature(m, t, self.mats, Some(cell.w.pressure))?;
                let dt = t - self.t_old[idx];
                let capacity = if dt.abs() > 1e-9 * self.t_old[idx] {
                    (e - self.e_old[idx]) / dt
                } else {
                    self.capacity_old[idx]
                };
                let mut lambda = 0.0;
                for (k, mat) in self.mats.iter().enumerate() {
                    let rho = eos::sg_density_from_pt(p, t, mat);
                    let alpha = m[k] / rho;
                    lambda += alpha * mat.conductivity_at(t, rho, self.units);
                }
                Ok((capacity, lambda))
            })
            .collect();
        let mut capacity = Vec::with_capacity(eval.len());
        let mut lambda = Vec::with_capacity(eval.len());
        for (idx, r) in eval.into_iter().enumerate() {
            let (c, l) = r.map_err(|e| e.at_cell(CellIndex::new(idx % self.grid.nx, idx / self.grid.nx)))?;
            capacity.push(c);
            lambda.push(l);
        }
        let op = DiffusionOperator::from_cell_coefficients(self.grid, &self.boundaries, capacity, &lambda);
        Ok((op, self.source.to_vec()))
    }
}

/// Conduct heat at the common cell temperature with volumetric source
/// `source`, then rebuild pressure, volume fractions and phase energies from
/// the new temperature. Cells must already be temperature-relaxed.
#[allow(clippy::too_many_arguments)]
pub fn heat_conduction_step(
    cells: &mut [SplitCell],
    grid: &Grid,
    boundaries: &Boundaries,
    mats: &[MaterialParams],
    units: &UnitSystem,
    source: &[f64],
    dt: f64,
    cfg: &ConductionConfig,
) -> Result<usize> {
    if !cfg.enabled || dt == 0.0 {
        return Ok(0);
    }
    let n = mats.len();
    let t_old: Vec<f64> = cells.iter().map(|c| c.w.temperature[0]).collect();
    let e_old: Vec<f64> = cells.iter().map(|c| c.internal_energy_density()).collect();
    let capacity_old: Vec<f64> = cells
        .iter()
        .map(|c| effective_heat_capacity(&c.m[..n], c.w.temperature[0], c.w.pressure, mats))
        .collect();
    let problem = ConductionProblem {
        cells,
        grid: *grid,
        boundaries: *boundaries,
        mats,
        units,
        source,
        t_old: t_old.clone(),
        e_old,
        capacity_old,
    };
    let result = picard_outer(&t_old, &problem, dt, cfg.solver, cfg.picard)?;
    let t_new = result.solution.value;

    let updates: Vec<Result<(f64, PhaseArray)>> = cells
        .par_iter()
        .zip(&t_new)
        .map(|(cell, &t)| {
            if !(t > 0.0) {
                return Err(Error::closure(format!("non-positive temperature {t:e} after conduction")));
            }
            let p = pressure_at_temperature(&cell.m[..n], t, mats, Some(cell.w.pressure))?;
            Ok((p, equilibrium_from_pt(&cell.m[..n], t, p, mats).alpha))
        })
        .collect();
    for (idx, r) in updates.into_iter().enumerate() {
        let (p, alpha) = r.map_err(|e| e.at_cell(CellIndex::new(idx % grid.nx, idx / grid.nx)))?;
        cells[idx].set_closure(p, &alpha, mats);
    }
    Ok(result.iterations)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::state::{conserved_from_primitive, PrimitiveState};

    fn cell(rho: &[f64], p: f64, alpha: &[f64], mats: &[MaterialParams]) -> SplitCell {
        let w = PrimitiveState::from_rho_p(rho, [0.0, 0.0], p, alpha, mats);
        SplitCell::new(&conserved_from_primitive(&w, mats), &w)
    }

    #[test]
    fn ideal_gases_relax_to_capacity_weighted_mean() {
        let mats = [MaterialParams::ideal("a", 1.4, 1.0), MaterialParams::ideal("b", 1.4, 2.0)];
        // m = (1, 1) at T = (300, 600): saturation gives p = 600, α = (0.2, 0.8)
        let c = cell(&[5.0, 1.25], 600.0, &[0.2, 0.8], &mats);
        assert!((c.w.temperature[0] - 300.0).abs() < 1e-12 && (c.w.temperature[1] - 600.0).abs() < 1e-12);
        let out = relax_temperatures(&c, &mats, RelaxMethod::Exact).unwrap();
        for k in 0..2 {
            assert!((out.w.temperature[k] - 500.0).abs() < 1e-10, "{:?}", out.w.temperature);
        }
        let before = c.internal_energy_density();
        assert!((out.internal_energy_density() / before - 1.0).abs() < 1e-13);
        assert_eq!(out.m, c.m);
    }

    #[test]
    fn equilibrium_cell_is_fixed() {
        let mats = [MaterialParams::stiffened("liq", 4.4, 6e6, 58.82), MaterialParams::ideal("gas", 1.4, 125.0)];
        let w = PrimitiveState::from_p_t(1e5, 3000.0, [100.0, 0.0], &[0.3, 0.7], &mats);
        let c = SplitCell::new(&conserved_from_primitive(&w, &mats), &w);
        let out = relax_temperatures(&c, &mats, RelaxMethod::Exact).unwrap();
        assert!((out.w.pressure / 1e5 - 1.0).abs() < 1e-12);
        for k in 0..2 {
            assert!((out.w.temperature[k] / 3000.0 - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn linearized_agrees_for_small_disequilibrium() {
        let mats = [MaterialParams::stiffened("liq", 4.4, 6e6, 58.82), MaterialParams::ideal("gas", 1.4, 125.0)];
        let w = PrimitiveState::from_rho_p(&[10.0, 0.66], [0.0, 0.0], 1e5, &[0.5, 0.5], &mats);
        let c = SplitCell::new(&conserved_from_primitive(&w, &mats), &w);
        let exact = relax_temperatures(&c, &mats, RelaxMethod::Exact).unwrap();
        let lin = relax_temperatures(&c, &mats, RelaxMethod::Linearized).unwrap();
        let dt = (w.temperature[0] - w.temperature[1]).abs() / exact.w.temperature[0];
        assert!((lin.w.temperature[0] / exact.w.temperature[0] - 1.0).abs() < 10.0 * dt * dt);
    }

    #[test]
    fn heat_capacity_matches_finite_difference() {
        let mats = [MaterialParams::stiffened("liq", 4.4, 6e6, 1606.0), MaterialParams::ideal("gas", 1.4, 714.0)];
        let m = [600.0, 0.3];
        let t = 350.0;
        let (_, p) = energy_at_temperature(&m, t, &mats, None).unwrap();
        let a = effective_heat_capacity(&m, t, p, &mats);
        let h = 1e-6 * t;
        let (ep, _) = energy_at_temperature(&m, t + h, &mats, None).unwrap();
        let (em, _) = energy_at_temperature(&m, t - h, &mats, None).unwrap();
        let fd = (ep - em) / (2.0 * h);
        assert!((a / fd - 1.0).abs() < 1e-6, "{a} vs {fd}");
    }

    #[test]
    fn ideal_capacity_is_mass_weighted() {
        let mats = [MaterialParams::ideal("a", 1.4, 3.0), MaterialParams::ideal("b", 1.6, 5.0)];
        let m = [0.7, 0.2];
        let a = effective_heat_capacity(&m, 400.0, 1e5, &mats);
        assert!((a - (0.7 * 3.0 + 0.2 * 5.0)).abs() < 1e-12);
    }
}
