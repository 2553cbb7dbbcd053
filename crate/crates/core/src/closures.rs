//! Transport-property closures and the laser energy deposition profile.
//!
//! The solver itself is unit-agnostic: every case declares how its length,
//! mass, time and temperature units map onto SI through [`UnitSystem`]. The
//! plasma closures are evaluated in Gaussian CGS (temperatures in K or eV)
//! and converted back into case units here.

use serde::{Deserialize, Serialize};

/// Boltzmann constant [erg/K].
pub const K_BOLTZMANN_CGS: f64 = 1.380649e-16;
/// Elementary charge [statC].
pub const ELEMENTARY_CHARGE_CGS: f64 = 4.803_204_712_570_263e-10;
/// Electron mass [g].
pub const ELECTRON_MASS_CGS: f64 = 9.109_383_7015e-28;
/// Reduced Planck constant [erg s].
pub const HBAR_CGS: f64 = 1.054_571_817e-27;
/// Avogadro number [1/mol].
pub const AVOGADRO: f64 = 6.022_140_76e23;
/// Kelvin per electron-volt.
pub const KELVIN_PER_EV: f64 = 11_604.518_12;

/// SI size of one case unit of length, mass, time and temperature.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UnitSystem {
    pub length_m: f64,
    pub mass_kg: f64,
    pub time_s: f64,
    pub temperature_k: f64,
}

impl Default for UnitSystem {
    fn default() -> Self {
        Self::si()
    }
}

impl UnitSystem {
    pub fn si() -> Self {
        Self {
            length_m: 1.0,
            mass_kg: 1.0,
            time_s: 1.0,
            temperature_k: 1.0,
        }
    }

    /// g, cm, μs, MK: pressure unit is 1 Mbar, energy density unit 1e11 J/m³.
    pub fn laser_plasma() -> Self {
        Self {
            length_m: 1e-2,
            mass_kg: 1e-3,
            time_s: 1e-6,
            temperature_k: 1e6,
        }
    }

    pub fn density_si(&self) -> f64 {
        self.mass_kg / self.length_m.powi(3)
    }

    /// SI value of one case unit of dynamic viscosity [Pa s].
    pub fn viscosity_si(&self) -> f64 {
        self.mass_kg / (self.length_m * self.time_s)
    }

    /// SI value of one case unit of thermal conductivity [W/(m K)].
    pub fn conductivity_si(&self) -> f64 {
        self.mass_kg * self.length_m / (self.time_s.powi(3) * self.temperature_k)
    }

    /// SI value of one case unit of areal power [W/m²].
    pub fn intensity_si(&self) -> f64 {
        self.mass_kg / self.time_s.powi(3)
    }
}

/// Plasma composition used by the Spitzer–Härm and Braginskii closures.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PlasmaSpecies {
    /// Average atomic weight [amu].
    pub atomic_weight: f64,
    /// Effective ionisation state.
    pub charge: f64,
}

impl PlasmaSpecies {
    /// Polystyrene (C8H8).
    pub fn polystyrene() -> Self {
        Self {
            atomic_weight: 6.5,
            charge: 3.5,
        }
    }
}

/// Multiplicative overrides for the three lengths entering the Coulomb
/// logarithm. All default to 1 (plasma-formulary definitions).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CoulombLengths {
    pub debye_scale: f64,
    pub landau_scale: f64,
    pub de_broglie_scale: f64,
}

impl Default for CoulombLengths {
    fn default() -> Self {
        Self {
            debye_scale: 1.0,
            landau_scale: 1.0,
            de_broglie_scale: 1.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ViscosityModel {
    Constant {
        mu: f64,
    },
    /// `mu0 (t0 + w)/(T + w) (T/t0)^{3/2}` with all values in case units.
    Sutherland {
        mu0: f64,
        t0: f64,
        w: f64,
    },
    Braginskii {
        species: PlasmaSpecies,
        #[serde(default)]
        coulomb: CoulombLengths,
    },
}

impl Default for ViscosityModel {
    fn default() -> Self {
        ViscosityModel::Constant { mu: 0.0 }
    }
}

impl ViscosityModel {
    /// Dynamic viscosity in case units at temperature `t` and phase density `rho`.
    pub fn evaluate(&self, t: f64, rho: f64, units: &UnitSystem) -> f64 {
        match *self {
            ViscosityModel::Constant { mu } => mu,
            ViscosityModel::Sutherland { mu0, t0, w } => sutherland_viscosity(t, mu0, t0, w),
            ViscosityModel::Braginskii { species, coulomb } => {
                let t_k = t * units.temperature_k;
                let rho_cgs = rho * units.density_si() * 1e-3;
                let ln_lambda = coulomb_logarithm(t_k, rho_cgs, &species, &coulomb);
                // poise -> Pa s -> case units
                braginskii_viscosity(t_k, ln_lambda, &species) * 0.1 / units.viscosity_si()
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, ViscosityModel::Constant { mu } if *mu == 0.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ConductivityModel {
    Constant {
        lambda: f64,
    },
    SpitzerHarm {
        species: PlasmaSpecies,
        #[serde(default)]
        coulomb: CoulombLengths,
    },
    /// Polynomial fit for helium, T in K and λ in W/(m K) before unit conversion.
    HeliumFit,
    /// `λ = μ C_p / Pr` with `C_p = γ C_v` and μ from the phase viscosity model.
    Prandtl {
        prandtl: f64,
    },
}

impl Default for ConductivityModel {
    fn default() -> Self {
        ConductivityModel::Constant { lambda: 0.0 }
    }
}

impl ConductivityModel {
    /// Thermal conductivity in case units. `mu` and `cp` are only used by the
    /// Prandtl closure.
    pub fn evaluate(&self, t: f64, rho: f64, mu: f64, cp: f64, units: &UnitSystem) -> f64 {
        match *self {
            ConductivityModel::Constant { lambda } => lambda,
            ConductivityModel::SpitzerHarm { species, coulomb } => {
                let t_k = t * units.temperature_k;
                let rho_cgs = rho * units.density_si() * 1e-3;
                // erg/(s cm K) -> W/(m K) -> case units
                spitzer_harm_conductivity_with(t_k, rho_cgs, &species, &coulomb) * 1e-5
                    / units.conductivity_si()
            }
            ConductivityModel::HeliumFit => {
                helium_conductivity_fit(t * units.temperature_k) / units.conductivity_si()
            }
            ConductivityModel::Prandtl { prandtl } => prandtl_conductivity(mu, cp, prandtl),
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, ConductivityModel::Constant { lambda } if *lambda == 0.0)
    }
}

pub fn sutherland_viscosity(t: f64, mu0: f64, t0: f64, w: f64) -> f64 {
    mu0 * (t0 + w) / (t + w) * (t / t0).powf(1.5)
}

/// Coulomb logarithm for electron–ion collisions; `t_e` in K, `rho` in g/cm³.
pub fn coulomb_logarithm(t_e: f64, rho: f64, species: &PlasmaSpecies, lengths: &CoulombLengths) -> f64 {
    let e2 = ELEMENTARY_CHARGE_CGS * ELEMENTARY_CHARGE_CGS;
    let kt = K_BOLTZMANN_CGS * t_e;
    let n_i = AVOGADRO * rho / species.atomic_weight;
    let n_e = species.charge * n_i;
    let debye = lengths.debye_scale * (kt / (4.0 * std::f64::consts::PI * n_e * e2)).sqrt();
    let landau = lengths.landau_scale * species.charge * e2 / (3.0 * kt);
    let de_broglie = lengths.de_broglie_scale * HBAR_CGS / (3.0 * ELECTRON_MASS_CGS * kt).sqrt();
    let ratio = if landau >= de_broglie {
        debye / landau
    } else {
        debye / de_broglie
    };
    ratio.ln().max(1.0)
}

/// Spitzer–Härm electron conductivity [erg/(s cm K)]; `t_e` in K, `rho` in g/cm³.
pub fn spitzer_harm_conductivity(t_e: f64, rho: f64, species: &PlasmaSpecies) -> f64 {
    spitzer_harm_conductivity_with(t_e, rho, species, &CoulombLengths::default())
}

pub fn spitzer_harm_conductivity_with(
    t_e: f64,
    rho: f64,
    species: &PlasmaSpecies,
    lengths: &CoulombLengths,
) -> f64 {
    let ln_lambda = coulomb_logarithm(t_e, rho, species, lengths);
    let kt = K_BOLTZMANN_CGS * t_e;
    let n_i = AVOGADRO * rho / species.atomic_weight;
    let n_e = species.charge * n_i;
    let e4 = ELEMENTARY_CHARGE_CGS.powi(4);
    let z = species.charge;
    9.44 * (2.0 / std::f64::consts::PI).powf(1.5) * kt.powf(2.5) * K_BOLTZMANN_CGS * n_e
        / (ELECTRON_MASS_CGS.sqrt() * e4)
        / (n_i * z * (z + 4.0) * ln_lambda)
}

/// Braginskii ion viscosity [g/(cm s)] with `t_e` in K (the fit is in eV).
pub fn braginskii_viscosity(t_e: f64, ln_lambda: f64, species: &PlasmaSpecies) -> f64 {
    let t_ev = t_e / KELVIN_PER_EV;
    3.30e-5 * species.atomic_weight.sqrt() * t_ev.powf(2.5) / (ln_lambda * species.charge.powi(4))
}

/// Helium conductivity [W/(m K)], T in K. Fitted on roughly 100–1000 K.
pub fn helium_conductivity_fit(t: f64) -> f64 {
    ((1.29e-11 * t - 7.45e-8) * t + 3.896e-4) * t + 3.722e-2
}

pub fn prandtl_conductivity(mu: f64, cp: f64, prandtl: f64) -> f64 {
    mu * cp / prandtl
}

/// Laser beam absorbed in a band of fixed depth beyond the critical surface.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LaserSpec {
    /// Areal intensity in case units.
    pub intensity: f64,
    /// Absorption depth in case length units.
    pub depth: f64,
    /// Critical density in case units.
    pub critical_density: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Deposition {
    /// Volumetric power per cell.
    pub power: Vec<f64>,
    /// Critical-surface position, or `None` when no crossing exists.
    pub critical_position: Option<f64>,
}

/// Volumetric laser power on a uniform 1D grid with left edge `x0` and
/// spacing `dx`. The beam comes from the right; the band `[x_c, x_c + d]`
/// starts at the rightmost crossing of the critical density.
pub fn laser_deposition_profile(density: &[f64], x0: f64, dx: f64, laser: &LaserSpec) -> Deposition {
    let n = density.len();
    let x_right = x0 + n as f64 * dx;
    let rc = laser.critical_density;

    let mut crossing = None;
    for i in (0..n.saturating_sub(1)).rev() {
        let (a, b) = (density[i], density[i + 1]);
        let straddles = (a >= rc && b < rc) || (a <= rc && b > rc);
        if straddles {
            let xa = x0 + (i as f64 + 0.5) * dx;
            crossing = Some(xa + (a - rc) / (a - b) * dx);
            break;
        }
    }

    let start = match crossing {
        Some(xc) => xc.min(x_right - laser.depth).max(x0),
        None => {
            log::warn!("no critical-density crossing found; depositing in the rightmost band");
            (x_right - laser.depth).max(x0)
        }
    };
    let end = (start + laser.depth).min(x_right);
    let band = end - start;
    let q = if band > 0.0 { laser.intensity / band } else { 0.0 };

    let power = (0..n)
        .map(|i| {
            let xl = x0 + i as f64 * dx;
            let xr = xl + dx;
            let overlap = (xr.min(end) - xl.max(start)).max(0.0);
            q * overlap / dx
        })
        .collect();
    Deposition {
        power,
        critical_position: crossing,
    }
}
