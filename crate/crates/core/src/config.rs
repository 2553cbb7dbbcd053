//! Problem descriptions: domain, materials, initial regions, physics switches
//! and solver settings. Cases round-trip through TOML.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::closures::{LaserSpec, UnitSystem};
use crate::eos;
use crate::error::{Error, Result};
use crate::grid::{Boundaries, BoundaryKind, Grid, GridField};
use crate::hyperbolic::{HydroOptions, Limiter, TimeIntegrator};
use crate::parabolic::{ParabolicSolver, PicardOptions};
use crate::state::{conserved_from_primitive, ConservedState, MaterialParams, PrimitiveState, MAX_PHASES};
use crate::thermal::{ConductionConfig, RelaxMethod};
use crate::viscous::ViscousConfig;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Domain {
    /// Lower corner; one entry in 1D, two in 2D.
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
    pub cells: Vec<usize>,
}

impl Domain {
    pub fn dim(&self) -> usize {
        self.cells.len()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "shape", rename_all = "snake_case")]
pub enum Shape {
    All,
    /// Half-open box `[lower, upper)` on cell centres.
    Box { lower: Vec<f64>, upper: Vec<f64> },
    Circle { center: [f64; 2], radius: f64 },
}

impl Shape {
    pub fn contains(&self, x: [f64; 2], dim: usize) -> bool {
        match self {
            Shape::All => true,
            Shape::Box { lower, upper } => (0..dim).all(|d| x[d] >= lower[d] && x[d] < upper[d]),
            Shape::Circle { center, radius } => {
                let dx = x[0] - center[0];
                let dy = if dim == 2 { x[1] - center[1] } else { 0.0 };
                dx * dx + dy * dy <= radius * radius
            }
        }
    }
}

/// Volume fractions of a region.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum AlphaSpec {
    /// Phase `dominant` holds `1 − ε`, the rest share `ε` equally.
    Dominant { dominant: usize },
    Values(Vec<f64>),
}

impl AlphaSpec {
    pub fn resolve(&self, nphase: usize, epsilon: f64) -> Vec<f64> {
        match self {
            AlphaSpec::Values(v) => v.clone(),
            AlphaSpec::Dominant { dominant } => {
                if nphase == 1 {
                    return vec![1.0];
                }
                let rest = epsilon / (nphase - 1) as f64;
                (0..nphase).map(|k| if k == *dominant { 1.0 - epsilon } else { rest }).collect()
            }
        }
    }

    fn dominant(&self, nphase: usize, epsilon: f64) -> usize {
        let a = self.resolve(nphase, epsilon);
        (0..nphase).fold(0, |best, k| if a[k] > a[best] { k } else { best })
    }
}

/// Thermodynamic data of a region. Whenever only one density is given it
/// belongs to the dominant phase and the others share its (p, T).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Thermo {
    PressureTemperature { pressure: f64, temperature: f64 },
    PhaseDensities { pressure: f64, densities: Vec<f64> },
    DensityPressure { density: f64, pressure: f64 },
    DensityTemperature { density: f64, temperature: f64 },
    /// `ρ(x) = ρ̄ (1 + a sin(2πx/L))` for the dominant phase at fixed p.
    SineDensity {
        mean: f64,
        amplitude: f64,
        wavelength: f64,
        pressure: f64,
    },
    /// `ρ(x) = ρ_s (ρ_e/ρ_s)^((x − x_s)/(x_e − x_s))`, clamped outside.
    ExponentialRamp {
        x_start: f64,
        x_end: f64,
        rho_start: f64,
        rho_end: f64,
        temperature: f64,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Region {
    #[serde(flatten)]
    pub shape: Shape,
    pub alpha: AlphaSpec,
    #[serde(default)]
    pub velocity: [f64; 2],
    pub thermo: Thermo,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Physics {
    pub hydro: bool,
    pub viscous: bool,
    pub relax: bool,
    pub conduct: bool,
    pub laser: Option<LaserSpec>,
    pub relax_method: RelaxMethod,
    pub bulk_viscosity: f64,
}

impl Default for Physics {
    fn default() -> Self {
        Self {
            hydro: true,
            viscous: false,
            relax: false,
            conduct: false,
            laser: None,
            relax_method: RelaxMethod::Exact,
            bulk_viscosity: 0.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SolverSettings {
    pub cfl: f64,
    /// `overbee` sharpens volume fractions, everything else uses minmod.
    pub limiter: Limiter,
    pub integrator: TimeIntegrator,
    pub parabolic: ParabolicSolver,
    pub picard: PicardOptions,
    /// Largest relative temperature change the conduction stage may make in
    /// one step before the step is rejected and retried with a smaller Δt.
    pub max_temperature_change: f64,
    /// Retries of a failed or rejected step before giving up.
    pub max_rejections: usize,
}

impl Default for SolverSettings {
    fn default() -> Self {
        Self {
            cfl: 0.4,
            limiter: Limiter::Minmod,
            integrator: TimeIntegrator::SspRk3,
            parabolic: ParabolicSolver::Lim,
            picard: PicardOptions::default(),
            max_temperature_change: 0.5,
            max_rejections: 20,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(default)]
pub struct OutputPlan {
    /// Snapshot times in addition to the final time.
    pub snapshots: Vec<f64>,
    /// Diagnostics every this many steps (0 disables periodic records).
    pub diagnostics_every: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CaseConfig {
    pub name: String,
    #[serde(default)]
    pub description: String,
    pub domain: Domain,
    #[serde(default)]
    pub units: UnitSystem,
    pub materials: Vec<MaterialParams>,
    pub epsilon: f64,
    pub boundaries: Boundaries,
    pub regions: Vec<Region>,
    #[serde(default)]
    pub physics: Physics,
    #[serde(default)]
    pub solver: SolverSettings,
    pub end_time: f64,
    #[serde(default)]
    pub output: OutputPlan,
}

impl CaseConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let cfg: Self = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_toml_str(&text)
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string_pretty(self).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn nphase(&self) -> usize {
        self.materials.len()
    }

    pub fn dim(&self) -> usize {
        self.domain.dim()
    }

    pub fn grid(&self) -> Grid {
        let d = &self.domain;
        if d.dim() == 1 {
            Grid::new_1d(d.cells[0], d.lower[0], d.upper[0])
        } else {
            Grid::new_2d(d.cells[0], d.cells[1], [d.lower[0], d.lower[1]], [d.upper[0], d.upper[1]])
        }
    }

    pub fn hydro_options(&self) -> HydroOptions {
        HydroOptions {
            limiter: self.solver.limiter,
            integrator: self.solver.integrator,
        }
    }

    pub fn viscous_config(&self) -> ViscousConfig {
        ViscousConfig {
            enabled: self.physics.viscous,
            bulk_viscosity: self.physics.bulk_viscosity,
            picard: self.solver.picard,
            solver: self.solver.parabolic,
        }
    }

    pub fn conduction_config(&self) -> ConductionConfig {
        ConductionConfig {
            enabled: self.physics.conduct,
            solver: self.solver.parabolic,
            picard: self.solver.picard,
        }
    }

    /// Change the resolution keeping the aspect ratio of the cells.
    pub fn with_cells(mut self, nx: usize) -> Self {
        if self.dim() == 2 {
            let ratio = self.domain.cells[1] as f64 / self.domain.cells[0] as f64;
            self.domain.cells[1] = ((nx as f64 * ratio).round() as usize).max(1);
        }
        self.domain.cells[0] = nx;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let d = &self.domain;
        let dim = d.dim();
        if !(dim == 1 || dim == 2) || d.lower.len() != dim || d.upper.len() != dim {
            return Err(Error::Config("domain must be 1D or 2D with matching extents".into()));
        }
        if d.cells.iter().any(|n| *n == 0) {
            return Err(Error::Config("cell counts must be positive".into()));
        }
        if (0..dim).any(|k| !(d.upper[k] > d.lower[k])) {
            return Err(Error::Config("domain extents must be increasing".into()));
        }
        let n = self.nphase();
        if n == 0 || n > MAX_PHASES {
            return Err(Error::Config(format!("between 1 and {MAX_PHASES} materials are supported")));
        }
        for m in &self.materials {
            m.validate()?;
        }
        if n > 1 && !(self.epsilon > 0.0 && self.epsilon <= 1e-3) {
            return Err(Error::Config(format!("epsilon = {:e} outside (0, 1e-3]", self.epsilon)));
        }
        self.boundaries.validate()?;
        if dim == 1 && (self.boundaries.y_lo != BoundaryKind::Extrapolation || self.boundaries.y_hi != BoundaryKind::Extrapolation) {
            log::debug!("y boundaries ignored for a 1D domain");
        }
        if !(self.end_time >= 0.0) || !self.end_time.is_finite() {
            return Err(Error::Config("end time must be finite and non-negative".into()));
        }
        if !(self.solver.cfl > 0.0 && self.solver.cfl <= 1.0) {
            return Err(Error::Config("cfl must lie in (0, 1]".into()));
        }
        if !(self.solver.max_temperature_change > 0.0) {
            return Err(Error::Config("max_temperature_change must be positive".into()));
        }
        if self.physics.bulk_viscosity < 0.0 {
            return Err(Error::Config("bulk viscosity must be non-negative".into()));
        }
        if let Some(l) = &self.physics.laser {
            if dim != 1 {
                return Err(Error::Config("laser deposition is only available in 1D".into()));
            }
            if !(l.intensity > 0.0 && l.depth > 0.0 && l.critical_density > 0.0) {
                return Err(Error::Config("laser parameters must be positive".into()));
            }
        }
        if self.output.snapshots.iter().any(|t| !(*t >= 0.0 && *t <= self.end_time)) {
            return Err(Error::Config("snapshot times must lie within [0, end time]".into()));
        }
        if self.regions.is_empty() {
            return Err(Error::Config("at least one region is required".into()));
        }
        for (r, region) in self.regions.iter().enumerate() {
            let alpha = region.alpha.resolve(n, self.epsilon);
            if alpha.len() != n {
                return Err(Error::Config(format!("region {r}: expected {n} volume fractions")));
            }
            if let AlphaSpec::Dominant { dominant } = region.alpha {
                if dominant >= n {
                    return Err(Error::Config(format!("region {r}: dominant phase {dominant} out of range")));
                }
            }
            let sum: f64 = alpha.iter().sum();
            if (sum - 1.0).abs() > 1e-12 || alpha.iter().any(|a| !(*a > 0.0 && *a <= 1.0)) {
                return Err(Error::Config(format!("region {r}: volume fractions {alpha:?} are not admissible")));
            }
            if let Thermo::PhaseDensities { densities, .. } = &region.thermo {
                if densities.len() != n {
                    return Err(Error::Config(format!("region {r}: expected {n} phase densities")));
                }
            }
            if let Shape::Box { lower, upper } = &region.shape {
                if lower.len() != dim || upper.len() != dim {
                    return Err(Error::Config(format!("region {r}: box must have {dim} coordinates")));
                }
            }
        }
        Ok(())
    }

    /// Index of the last region containing the centre of every cell; later
    /// regions paint over earlier ones.
    pub fn region_map(&self) -> Result<Vec<usize>> {
        let grid = self.grid();
        let dim = self.dim();
        let mut map = Vec::with_capacity(grid.ncells());
        for j in 0..grid.ny {
            for i in 0..grid.nx {
                let x = grid.cell_center(i, j);
                let r = self
                    .regions
                    .iter()
                    .rposition(|r| r.shape.contains(x, dim))
                    .ok_or_else(|| Error::Config(format!("cell ({i}, {j}) at {x:?} is not covered by any region")))?;
                map.push(r);
            }
        }
        Ok(map)
    }

    pub fn initial_primitives(&self) -> Result<Vec<PrimitiveState>> {
        let grid = self.grid();
        let map = self.region_map()?;
        let n = self.nphase();
        let mats = &self.materials;
        let mut cells = Vec::with_capacity(map.len());
        for j in 0..grid.ny {
            for i in 0..grid.nx {
                let region = &self.regions[map[grid.index(i, j)]];
                let x = grid.cell_center(i, j);
                let alpha = region.alpha.resolve(n, self.epsilon);
                let dom = region.alpha.dominant(n, self.epsilon);
                let v = region.velocity;
                let w = match &region.thermo {
                    Thermo::PressureTemperature { pressure, temperature } => {
                        PrimitiveState::from_p_t(*pressure, *temperature, v, &alpha, mats)
                    }
                    Thermo::PhaseDensities { pressure, densities } => {
                        PrimitiveState::from_rho_p(densities, v, *pressure, &alpha, mats)
                    }
                    Thermo::DensityPressure { density, pressure } => {
                        let t = eos::sg_temperature(*density, *pressure, &mats[dom]);
                        PrimitiveState::from_p_t(*pressure, t, v, &alpha, mats)
                    }
                    Thermo::DensityTemperature { density, temperature } => {
                        let p = density_temperature_pressure(*density, *temperature, &mats[dom]);
                        PrimitiveState::from_p_t(p, *temperature, v, &alpha, mats)
                    }
                    Thermo::SineDensity {
                        mean,
                        amplitude,
                        wavelength,
                        pressure,
                    } => {
                        let rho = mean * (1.0 + amplitude * (2.0 * std::f64::consts::PI * x[0] / wavelength).sin());
                        let t = eos::sg_temperature(rho, *pressure, &mats[dom]);
                        PrimitiveState::from_p_t(*pressure, t, v, &alpha, mats)
                    }
                    Thermo::ExponentialRamp {
                        x_start,
                        x_end,
                        rho_start,
                        rho_end,
                        temperature,
                    } => {
                        let s = ((x[0] - x_start) / (x_end - x_start)).clamp(0.0, 1.0);
                        let rho = rho_start * (rho_end / rho_start).powf(s);
                        let p = density_temperature_pressure(rho, *temperature, &mats[dom]);
                        PrimitiveState::from_p_t(p, *temperature, v, &alpha, mats)
                    }
                };
                w.validate(mats).map_err(|e| e.at_cell(crate::error::CellIndex::new(i, j)))?;
                cells.push(w);
            }
        }
        Ok(cells)
    }

    pub fn initial_state(&self) -> Result<GridField<ConservedState>> {
        let w = self.initial_primitives()?;
        let u: Vec<ConservedState> = w.iter().map(|c| conserved_from_primitive(c, &self.materials)).collect();
        let mut field = GridField::from_interior(self.grid(), self.boundaries, &u);
        field.fill_ghosts();
        Ok(field)
    }
}

/// `p = (γ − 1) ρ C_v T − p∞`.
fn density_temperature_pressure(rho: f64, t: f64, mat: &MaterialParams) -> f64 {
    (mat.gamma - 1.0) * rho * mat.cv * t - mat.p_inf
}
