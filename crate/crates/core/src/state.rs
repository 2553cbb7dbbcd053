//! Material parameters and the per-cell state representations.
//!
//! A cell is stored in conservative form `(m_k, ρu, ρE, α_1..α_{N-1})`; the
//! last volume fraction is always recovered from saturation so that
//! `Σ α_k = 1` cannot drift. Phase arrays have a fixed capacity of
//! [`MAX_PHASES`] entries of which the first `nphase` are meaningful.

use serde::{Deserialize, Serialize};

use crate::closures::{ConductivityModel, UnitSystem, ViscosityModel};
use crate::eos;
use crate::error::{Error, Result};

pub const MAX_PHASES: usize = 4;

/// Lower clip applied to α only inside `ρ_k = m_k / α_k`.
pub const ALPHA_DIVISION_GUARD: f64 = 1e-12;

pub type PhaseArray = [f64; MAX_PHASES];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MaterialParams {
    #[serde(default)]
    pub name: String,
    pub gamma: f64,
    #[serde(default)]
    pub p_inf: f64,
    pub cv: f64,
    #[serde(default)]
    pub w: f64,
    #[serde(default)]
    pub viscosity: ViscosityModel,
    #[serde(default)]
    pub conductivity: ConductivityModel,
}

impl MaterialParams {
    pub fn stiffened(name: &str, gamma: f64, p_inf: f64, cv: f64) -> Self {
        Self {
            name: name.to_string(),
            gamma,
            p_inf,
            cv,
            w: 0.0,
            viscosity: ViscosityModel::default(),
            conductivity: ConductivityModel::default(),
        }
    }

    pub fn ideal(name: &str, gamma: f64, cv: f64) -> Self {
        Self::stiffened(name, gamma, 0.0, cv)
    }

    pub fn with_viscosity(mut self, model: ViscosityModel) -> Self {
        self.viscosity = model;
        self
    }

    pub fn with_conductivity(mut self, model: ConductivityModel) -> Self {
        self.conductivity = model;
        self
    }

    pub fn cp(&self) -> f64 {
        self.gamma * self.cv
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.gamma > 1.0) {
            return Err(Error::Config(format!("material '{}': gamma must exceed 1", self.name)));
        }
        if !(self.p_inf >= 0.0) {
            return Err(Error::Config(format!("material '{}': p_inf must be non-negative", self.name)));
        }
        if !(self.cv > 0.0) {
            return Err(Error::Config(format!("material '{}': cv must be positive", self.name)));
        }
        Ok(())
    }

    pub fn viscosity_at(&self, t: f64, rho: f64, units: &UnitSystem) -> f64 {
        self.viscosity.evaluate(t, rho, units)
    }

    pub fn conductivity_at(&self, t: f64, rho: f64, units: &UnitSystem) -> f64 {
        let mu = match self.conductivity {
            ConductivityModel::Prandtl { .. } => self.viscosity.evaluate(t, rho, units),
            _ => 0.0,
        };
        self.conductivity.evaluate(t, rho, mu, self.cp(), units)
    }
}

/// Conservative per-cell unknowns. Also used as a generic vector for fluxes
/// and right-hand sides, in which case `volume_fraction` holds α increments.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConservedState {
    pub nphase: usize,
    pub partial_density: PhaseArray,
    pub momentum: [f64; 2],
    pub total_energy: f64,
    /// First `nphase - 1` entries are stored; the rest stay zero.
    pub volume_fraction: PhaseArray,
}

impl ConservedState {
    pub fn zero(nphase: usize) -> Self {
        Self {
            nphase,
            partial_density: [0.0; MAX_PHASES],
            momentum: [0.0; 2],
            total_energy: 0.0,
            volume_fraction: [0.0; MAX_PHASES],
        }
    }

    pub fn density(&self) -> f64 {
        self.partial_density[..self.nphase].iter().sum()
    }

    /// All volume fractions including the one recovered by saturation.
    pub fn volume_fractions(&self) -> PhaseArray {
        let n = self.nphase;
        let mut alpha = [0.0; MAX_PHASES];
        let mut sum = 0.0;
        for k in 0..n - 1 {
            alpha[k] = self.volume_fraction[k];
            sum += alpha[k];
        }
        alpha[n - 1] = 1.0 - sum;
        alpha
    }

    /// `a * x + b * y`, component-wise.
    pub fn combine(a: f64, x: &Self, b: f64, y: &Self) -> Self {
        let mut out = *x;
        for k in 0..MAX_PHASES {
            out.partial_density[k] = a * x.partial_density[k] + b * y.partial_density[k];
            out.volume_fraction[k] = a * x.volume_fraction[k] + b * y.volume_fraction[k];
        }
        for d in 0..2 {
            out.momentum[d] = a * x.momentum[d] + b * y.momentum[d];
        }
        out.total_energy = a * x.total_energy + b * y.total_energy;
        out
    }

    pub fn add_scaled(&mut self, s: f64, other: &Self) {
        *self = Self::combine(1.0, self, s, other);
    }

    pub fn is_finite(&self) -> bool {
        self.partial_density.iter().all(|v| v.is_finite())
            && self.volume_fraction.iter().all(|v| v.is_finite())
            && self.momentum.iter().all(|v| v.is_finite())
            && self.total_energy.is_finite()
    }

    /// Mirror across a wall normal to `axis`.
    pub fn reflected(&self, axis: usize) -> Self {
        let mut out = *self;
        out.momentum[axis] = -out.momentum[axis];
        out
    }
}

/// Primitive view of a cell: phase densities, one velocity, one pressure.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PrimitiveState {
    pub nphase: usize,
    pub density: PhaseArray,
    pub velocity: [f64; 2],
    pub pressure: f64,
    pub volume_fraction: PhaseArray,
    pub temperature: PhaseArray,
    /// Specific internal energies e_k.
    pub energy: PhaseArray,
}

impl PrimitiveState {
    /// Build a state from phase densities, velocity, pressure and the full
    /// set of volume fractions; temperatures and energies follow from the EOS.
    pub fn from_rho_p(
        rho: &[f64],
        velocity: [f64; 2],
        pressure: f64,
        alpha: &[f64],
        mats: &[MaterialParams],
    ) -> Self {
        let n = mats.len();
        let mut w = Self {
            nphase: n,
            density: [0.0; MAX_PHASES],
            velocity,
            pressure,
            volume_fraction: [0.0; MAX_PHASES],
            temperature: [0.0; MAX_PHASES],
            energy: [0.0; MAX_PHASES],
        };
        for k in 0..n {
            w.density[k] = rho[k];
            w.volume_fraction[k] = alpha[k];
            w.temperature[k] = eos::sg_temperature(rho[k], pressure, &mats[k]);
            w.energy[k] = eos::sg_energy(rho[k], pressure, &mats[k]);
        }
        w
    }

    /// Pressure–temperature equilibrium state: ρ_k from the EOS at (p, T).
    pub fn from_p_t(
        pressure: f64,
        temperature: f64,
        velocity: [f64; 2],
        alpha: &[f64],
        mats: &[MaterialParams],
    ) -> Self {
        let rho: Vec<f64> = mats
            .iter()
            .map(|m| eos::sg_density_from_pt(pressure, temperature, m))
            .collect();
        Self::from_rho_p(&rho, velocity, pressure, alpha, mats)
    }

    pub fn mixture_density(&self) -> f64 {
        (0..self.nphase)
            .map(|k| self.volume_fraction[k] * self.density[k])
            .sum()
    }

    pub fn partial_density(&self, k: usize) -> f64 {
        self.volume_fraction[k] * self.density[k]
    }

    pub fn kinetic_energy_per_mass(&self) -> f64 {
        0.5 * (self.velocity[0] * self.velocity[0] + self.velocity[1] * self.velocity[1])
    }

    /// Heat-capacity weighted temperature; equals the common temperature
    /// whenever phases are in thermal equilibrium.
    pub fn mixture_temperature(&self, mats: &[MaterialParams]) -> f64 {
        let mut num = 0.0;
        let mut den = 0.0;
        for k in 0..self.nphase {
            let c = self.partial_density(k) * mats[k].cv;
            num += c * self.temperature[k];
            den += c;
        }
        num / den
    }

    pub fn validate(&self, mats: &[MaterialParams]) -> Result<()> {
        let mut sum = 0.0;
        for k in 0..self.nphase {
            let a = self.volume_fraction[k];
            if !(a > 0.0 && a < 1.0) && self.nphase > 1 {
                return Err(Error::closure(format!("volume fraction α_{k} = {a:e} outside (0, 1)")));
            }
            if !(self.density[k] > 0.0) {
                return Err(Error::closure(format!("phase density ρ_{k} = {:e}", self.density[k])));
            }
            if !(self.pressure + mats[k].p_inf > 0.0) {
                return Err(Error::closure(format!("p + p_inf,{k} = {:e}", self.pressure + mats[k].p_inf)));
            }
            if !(self.temperature[k] > 0.0) {
                return Err(Error::closure(format!("T_{k} = {:e}", self.temperature[k])));
            }
            sum += a;
        }
        if (sum - 1.0).abs() > 1e-12 {
            return Err(Error::closure(format!("Σα = {sum}")));
        }
        Ok(())
    }
}

/// Per-cell phase total energies α_kρ_kE_k (one entry per phase).
pub type PhaseEnergies = PhaseArray;

/// Phase total energies over a set of cells.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseEnergyField {
    pub nphase: usize,
    pub values: Vec<PhaseEnergies>,
}

impl PhaseEnergyField {
    pub fn from_primitives(cells: &[PrimitiveState]) -> Self {
        let nphase = cells.first().map_or(1, |w| w.nphase);
        Self {
            nphase,
            values: cells.iter().map(reconstruct_phase_energies).collect(),
        }
    }

    pub fn cell_total(&self, idx: usize) -> f64 {
        self.values[idx][..self.nphase].iter().sum()
    }
}

/// Conservative view → primitive view using the isobaric mixture closure.
pub fn primitive_from_conserved(u: &ConservedState, mats: &[MaterialParams]) -> Result<PrimitiveState> {
    let n = u.nphase;
    let alpha = u.volume_fractions();
    if n > 1 {
        for (k, a) in alpha.iter().take(n).enumerate() {
            if !(*a > 0.0) {
                return Err(Error::closure(format!("non-positive volume fraction α_{k} = {a:e}")));
            }
        }
    }
    let rho_mix = u.density();
    if !(rho_mix > 0.0) {
        return Err(Error::closure(format!("non-positive mixture density {rho_mix:e}")));
    }
    let velocity = [u.momentum[0] / rho_mix, u.momentum[1] / rho_mix];
    let kinetic = 0.5 * rho_mix * (velocity[0] * velocity[0] + velocity[1] * velocity[1]);
    let rho_e = u.total_energy - kinetic;
    let p = eos::mixture_pressure_allaire(&u.partial_density[..n], rho_e, &alpha[..n], mats)?;

    let mut w = PrimitiveState {
        nphase: n,
        density: [0.0; MAX_PHASES],
        velocity,
        pressure: p,
        volume_fraction: alpha,
        temperature: [0.0; MAX_PHASES],
        energy: [0.0; MAX_PHASES],
    };
    for k in 0..n {
        let a = alpha[k].clamp(ALPHA_DIVISION_GUARD, 1.0);
        let rho_k = u.partial_density[k] / a;
        if !(rho_k > 0.0) {
            return Err(Error::closure(format!("non-positive phase density ρ_{k} = {rho_k:e}")));
        }
        w.density[k] = rho_k;
        w.temperature[k] = eos::sg_temperature(rho_k, p, &mats[k]);
        w.energy[k] = eos::sg_energy(rho_k, p, &mats[k]);
    }
    Ok(w)
}

pub fn conserved_from_primitive(w: &PrimitiveState, mats: &[MaterialParams]) -> ConservedState {
    let n = w.nphase;
    let mut u = ConservedState::zero(n);
    let mut rho = 0.0;
    let mut rho_e = 0.0;
    for k in 0..n {
        let m = w.volume_fraction[k] * w.density[k];
        u.partial_density[k] = m;
        rho += m;
        rho_e += m * eos::sg_energy(w.density[k], w.pressure, &mats[k]);
    }
    u.momentum = [rho * w.velocity[0], rho * w.velocity[1]];
    u.total_energy = rho_e + rho * w.kinetic_energy_per_mass();
    for k in 0..n - 1 {
        u.volume_fraction[k] = w.volume_fraction[k];
    }
    u
}

/// α_kρ_kE_k with E_k = e_k(ρ_k, p) + |u|²/2.
pub fn reconstruct_phase_energies(w: &PrimitiveState) -> PhaseEnergies {
    let kin = w.kinetic_energy_per_mass();
    let mut out = [0.0; MAX_PHASES];
    for k in 0..w.nphase {
        out[k] = w.partial_density(k) * (w.energy[k] + kin);
    }
    out
}

/// Cell view shared by the diffusion stages: exact partial densities,
/// velocity and phase total energies `α_kρ_kE_k`, plus the current
/// single-pressure closure of those quantities.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SplitCell {
    pub m: PhaseArray,
    pub velocity: [f64; 2],
    pub phase_energy: PhaseEnergies,
    pub w: PrimitiveState,
}

impl SplitCell {
    pub fn new(u: &ConservedState, w: &PrimitiveState) -> Self {
        let kin = w.kinetic_energy_per_mass();
        let mut phase_energy = [0.0; MAX_PHASES];
        for k in 0..u.nphase {
            phase_energy[k] = u.partial_density[k] * (w.energy[k] + kin);
        }
        Self {
            m: u.partial_density,
            velocity: w.velocity,
            phase_energy,
            w: *w,
        }
    }

    pub fn nphase(&self) -> usize {
        self.w.nphase
    }

    pub fn density(&self) -> f64 {
        self.m[..self.nphase()].iter().sum()
    }

    pub fn kinetic_energy_per_mass(&self) -> f64 {
        0.5 * (self.velocity[0] * self.velocity[0] + self.velocity[1] * self.velocity[1])
    }

    /// Specific internal energies `E_k − |u|²/2`.
    pub fn internal_energies(&self) -> PhaseArray {
        let kin = self.kinetic_energy_per_mass();
        let mut e = [0.0; MAX_PHASES];
        for k in 0..self.nphase() {
            e[k] = self.phase_energy[k] / self.m[k] - kin;
        }
        e
    }

    pub fn internal_energy_density(&self) -> f64 {
        let e = self.internal_energies();
        (0..self.nphase()).map(|k| self.m[k] * e[k]).sum()
    }

    /// Replace the closure by the state at pressure `p` with volume
    /// fractions `alpha`, keeping `m_k` and the velocity, and reset the phase
    /// energies to match.
    pub fn set_closure(&mut self, p: f64, alpha: &PhaseArray, mats: &[MaterialParams]) {
        let n = self.nphase();
        let mut rho = [0.0; MAX_PHASES];
        for k in 0..n {
            rho[k] = self.m[k] / alpha[k].clamp(ALPHA_DIVISION_GUARD, 1.0);
        }
        self.w = PrimitiveState::from_rho_p(&rho[..n], self.velocity, p, &alpha[..n], mats);
        let kin = self.kinetic_energy_per_mass();
        for k in 0..n {
            self.phase_energy[k] = self.m[k] * (self.w.energy[k] + kin);
        }
    }

    pub fn to_conserved(&self) -> ConservedState {
        let n = self.nphase();
        let mut u = ConservedState::zero(n);
        u.partial_density = self.m;
        let rho = self.density();
        u.momentum = [rho * self.velocity[0], rho * self.velocity[1]];
        u.total_energy = self.phase_energy[..n].iter().sum();
        for k in 0..n - 1 {
            u.volume_fraction[k] = self.w.volume_fraction[k];
        }
        u
    }
}
