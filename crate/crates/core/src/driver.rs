//! Fractional-step time loop: hydrodynamics, viscosity, temperature
//! relaxation and heat conduction, in that order, every time step.

use std::time::Instant;

use rayon::prelude::*;

use crate::closures::laser_deposition_profile;
use crate::config::CaseConfig;
use crate::eos;
use crate::error::{Error, Result};
use crate::grid::{Grid, GridField};
use crate::hyperbolic::{compute_dt_cfl, hydro_step};
use crate::state::{primitive_from_conserved, ConservedState, MaterialParams, PhaseArray, PrimitiveState, SplitCell, MAX_PHASES};
use crate::thermal::{heat_conduction_step, relax_all};
use crate::viscous::viscous_step;

/// Temperatures below this fraction of the hottest cell do not tighten the
/// thermal time-step control.
const THERMAL_FLOOR_FRACTION: f64 = 0.1;

/// Largest step-to-step growth of the thermally limited Δt.
const MAX_DT_GROWTH: f64 = 1.5;

/// Wall-clock seconds spent in each stage during one step.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct StageTimings {
    pub hydro: f64,
    pub viscous: f64,
    pub relax: f64,
    pub conduct: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiagnosticsRecord {
    pub step: usize,
    pub time: f64,
    pub dt: f64,
    /// Domain integrals of the partial densities.
    pub mass: PhaseArray,
    pub momentum: [f64; 2],
    pub energy: f64,
    pub p_min: f64,
    pub p_max: f64,
    pub t_min: f64,
    pub t_max: f64,
    pub alpha_min: f64,
    pub alpha_max: f64,
    /// Largest `|Σ α_k − 1|` over cells.
    pub saturation_error: f64,
    pub entropy: f64,
    pub timings: StageTimings,
}

/// State of a running case.
pub struct Simulation {
    pub cfg: CaseConfig,
    pub grid: Grid,
    pub u: GridField<ConservedState>,
    pub time: f64,
    pub step: usize,
    /// Time-integrated amount of each conserved quantity that has left
    /// through the domain boundary.
    pub outflow: ConservedState,
    /// Energy deposited by external sources so far.
    pub deposited: f64,
    /// Extremes of α_k seen after any step.
    pub alpha_range: (f64, f64),
    pub max_saturation_error: f64,
    pub records: Vec<DiagnosticsRecord>,
    /// Steps retried with a smaller Δt so far.
    pub rejections: usize,
    last_timings: StageTimings,
    /// Δt suggested by the temperature change of the last accepted step.
    thermal_dt: Option<f64>,
}

/// Uncommitted result of one step.
struct Trial {
    u: GridField<ConservedState>,
    outflow: ConservedState,
    deposited: f64,
    timings: StageTimings,
    w: Vec<PrimitiveState>,
    temperature_change: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunSummary {
    pub steps: usize,
    pub time: f64,
    pub wall_seconds: f64,
}

impl Simulation {
    pub fn new(cfg: CaseConfig) -> Result<Self> {
        cfg.validate()?;
        if cfg.physics.conduct && !cfg.physics.relax {
            return Err(Error::Config("heat conduction requires temperature relaxation".into()));
        }
        if cfg.physics.laser.is_some() && !cfg.physics.conduct {
            return Err(Error::Config("laser deposition requires the heat-conduction stage".into()));
        }
        let u = cfg.initial_state()?;
        let nphase = cfg.nphase();
        let mut sim = Self {
            grid: cfg.grid(),
            u,
            time: 0.0,
            step: 0,
            outflow: ConservedState::zero(nphase),
            deposited: 0.0,
            alpha_range: (1.0, 0.0),
            max_saturation_error: 0.0,
            records: Vec::new(),
            rejections: 0,
            last_timings: StageTimings::default(),
            thermal_dt: None,
            cfg,
        };
        let w = sim.primitives()?;
        sim.track_alpha(&w);
        Ok(sim)
    }

    pub fn materials(&self) -> &[MaterialParams] {
        &self.cfg.materials
    }

    pub fn conserved(&self) -> Vec<ConservedState> {
        self.u.interior()
    }

    pub fn primitives(&self) -> Result<Vec<PrimitiveState>> {
        let mats = &self.cfg.materials;
        let nx = self.grid.nx;
        self.conserved()
            .par_iter()
            .enumerate()
            .map(|(idx, c)| primitive_from_conserved(c, mats).map_err(|e| e.at_cell(crate::error::CellIndex::new(idx % nx, idx / nx))))
            .collect()
    }

    /// Domain integral of every conserved component.
    pub fn totals(&self) -> ConservedState {
        let vol = self.grid.cell_volume();
        let mut sum = ConservedState::zero(self.cfg.nphase());
        for c in self.conserved() {
            sum.add_scaled(vol, &c);
        }
        sum
    }

    pub fn stable_dt(&self) -> Result<f64> {
        let w = self.primitives()?;
        compute_dt_cfl(&w, &self.grid, &self.cfg.materials, self.cfg.solver.cfl)
    }

    /// Advance by one step of at most `dt_max`. Steps whose diffusion
    /// stages fail, or whose conduction changes a cell temperature by more
    /// than the configured fraction, are retried with a smaller Δt. On
    /// failure the state is left as it was before the step.
    pub fn advance(&mut self, dt_max: f64) -> Result<f64> {
        let cfl = self.stable_dt().map_err(|e| self.stage_error("cfl", e))?;
        let mut dt = cfl.min(dt_max);
        if self.step == 0 && self.thermal_dt.is_none() {
            self.thermal_dt = self.heating_dt().map_err(|e| self.stage_error("cfl", e))?;
        }
        if let Some(limit) = self.thermal_dt {
            dt = dt.min(limit);
        }
        let target = self.cfg.solver.max_temperature_change;
        let mut attempt = 0;
        let trial = loop {
            if !(dt > 0.0) {
                return Err(Error::Divergence(format!("time step collapsed to {dt:e}")));
            }
            let (shrink, reason) = match self.try_step(dt) {
                Ok(t) if t.temperature_change <= target => break t,
                Ok(t) => (
                    (0.9 * target / t.temperature_change).clamp(0.05, 0.5),
                    self.stage_error(
                        "conduct",
                        Error::Divergence(format!("temperature change {:.3} above {target}", t.temperature_change)),
                    ),
                ),
                // a non-finite update or a hydro failure is not cured by a smaller step
                Err(e @ Error::Stage { stage: "update" | "hydro", .. }) => return Err(e),
                Err(e @ Error::Stage { .. }) => (0.25, e),
                Err(e) => return Err(e),
            };
            if attempt >= self.cfg.solver.max_rejections {
                return Err(reason);
            }
            log::debug!("step {} rejected at dt = {dt:e}: {reason}", self.step + 1);
            self.rejections += 1;
            attempt += 1;
            dt *= shrink;
        };

        // hold Δt for one step after a rejection, otherwise let it grow slowly
        let growth = if attempt > 0 { 1.0 } else { MAX_DT_GROWTH };
        self.thermal_dt = (trial.temperature_change > 0.0).then(|| dt * (0.9 * target / trial.temperature_change).min(growth));
        self.u = trial.u;
        self.time += dt;
        self.step += 1;
        self.outflow.add_scaled(1.0, &trial.outflow);
        self.deposited += trial.deposited;
        self.last_timings = trial.timings;
        self.track_alpha(&trial.w);
        log::debug!(
            "step {} t={:.6e} dt={:.3e} hydro {:.3}s viscous {:.3}s relax {:.3}s conduct {:.3}s",
            self.step, self.time, dt, trial.timings.hydro, trial.timings.viscous, trial.timings.relax, trial.timings.conduct
        );
        let every = self.cfg.output.diagnostics_every;
        if every > 0 && self.step % every == 0 {
            let rec = self.diagnostics_from(&trial.w, dt);
            self.records.push(rec);
        }
        Ok(dt)
    }

    /// One fractional step of size `dt` from the current state, without
    /// committing it.
    fn try_step(&self, dt: f64) -> Result<Trial> {
        let mut u = self.u.clone();
        let mut timings = StageTimings::default();
        let mats = &self.cfg.materials;
        let phys = self.cfg.physics;
        let nx = self.grid.nx;
        let locate = |e: Error, idx: usize| e.at_cell(crate::error::CellIndex::new(idx % nx, idx / nx));

        let mut outflow = ConservedState::zero(self.cfg.nphase());
        if phys.hydro {
            let clock = Instant::now();
            outflow = hydro_step(&mut u, mats, dt, &self.cfg.hydro_options()).map_err(|e| self.stage_error("hydro", e))?;
            timings.hydro = clock.elapsed().as_secs_f64();
        }

        let mut deposited = 0.0;
        let mut temperature_change: f64 = 0.0;
        if phys.viscous || phys.relax || phys.conduct {
            let mut cells: Vec<SplitCell> = u
                .interior()
                .par_iter()
                .enumerate()
                .map(|(idx, c)| primitive_from_conserved(c, mats).map(|w| SplitCell::new(c, &w)).map_err(|e| locate(e, idx)))
                .collect::<Result<_>>()
                .map_err(|e| self.stage_error("closure", e))?;
            let units = self.cfg.units;
            let boundaries = self.cfg.boundaries;

            if phys.viscous {
                let clock = Instant::now();
                viscous_step(&mut cells, &self.grid, &boundaries, mats, &units, dt, &self.cfg.viscous_config())
                    .map_err(|e| self.stage_error("viscous", e))?;
                timings.viscous = clock.elapsed().as_secs_f64();
            }
            if phys.relax {
                let clock = Instant::now();
                relax_all(&mut cells, &self.grid, mats, phys.relax_method).map_err(|e| self.stage_error("relax", e))?;
                timings.relax = clock.elapsed().as_secs_f64();
            }
            if phys.conduct {
                let clock = Instant::now();
                let source = match &phys.laser {
                    Some(laser) => {
                        let rho: Vec<f64> = cells.iter().map(|c| c.density()).collect();
                        let dep = laser_deposition_profile(&rho, self.grid.x0, self.grid.dx, laser);
                        deposited = dt * self.grid.dx * dep.power.iter().sum::<f64>();
                        dep.power
                    }
                    None => vec![0.0; cells.len()],
                };
                let before: Vec<f64> = cells.iter().map(|c| c.w.temperature[0]).collect();
                heat_conduction_step(&mut cells, &self.grid, &boundaries, mats, &units, &source, dt, &self.cfg.conduction_config())
                    .map_err(|e| self.stage_error("conduct", e))?;
                // cold cells ahead of a heat front are measured against a
                // fraction of the hottest temperature
                let floor = THERMAL_FLOOR_FRACTION * before.iter().cloned().fold(0.0, f64::max);
                temperature_change = cells
                    .iter()
                    .zip(&before)
                    .fold(0.0, |m, (c, t0)| m.max((c.w.temperature[0] - t0).abs() / t0.max(floor)));
                timings.conduct = clock.elapsed().as_secs_f64();
            }
            let rebuilt: Vec<ConservedState> = cells.iter().map(SplitCell::to_conserved).collect();
            u.set_interior(&rebuilt);
        }

        let interior = u.interior();
        if let Some(idx) = interior.iter().position(|c| !c.is_finite()) {
            return Err(self.stage_error("update", Error::NonFinite(format!("cell {idx}"))));
        }
        u.fill_ghosts();
        let w: Vec<PrimitiveState> = interior
            .par_iter()
            .enumerate()
            .map(|(idx, c)| primitive_from_conserved(c, mats).map_err(|e| locate(e, idx)))
            .collect::<Result<_>>()
            .map_err(|e| self.stage_error("closure", e))?;
        Ok(Trial {
            u,
            outflow,
            deposited,
            timings,
            w,
            temperature_change,
        })
    }

    /// Δt that lets the laser alone raise the coldest heated cell by the
    /// allowed temperature fraction.
    fn heating_dt(&self) -> Result<Option<f64>> {
        let Some(laser) = &self.cfg.physics.laser else {
            return Ok(None);
        };
        let w = self.primitives()?;
        let rho: Vec<f64> = w.iter().map(|c| c.mixture_density()).collect();
        let dep = laser_deposition_profile(&rho, self.grid.x0, self.grid.dx, laser);
        let mats = &self.cfg.materials;
        let limit = w
            .iter()
            .zip(&dep.power)
            .filter(|(_, q)| **q > 0.0)
            .map(|(c, q)| {
                let capacity: f64 = (0..c.nphase).map(|k| c.partial_density(k) * mats[k].cv).sum();
                self.cfg.solver.max_temperature_change * capacity * c.mixture_temperature(mats) / q
            })
            .fold(f64::INFINITY, f64::min);
        Ok(limit.is_finite().then_some(limit))
    }

    fn stage_error(&self, stage: &'static str, source: Error) -> Error {
        match source {
            Error::Config(_) => source,
            other => Error::Stage {
                stage,
                time: self.time,
                source: Box::new(other),
            },
        }
    }

    fn track_alpha(&mut self, w: &[PrimitiveState]) {
        let n = self.cfg.nphase();
        if n < 2 {
            return;
        }
        let (mut lo, mut hi) = self.alpha_range;
        let mut sat: f64 = self.max_saturation_error;
        for c in w {
            let mut sum = 0.0;
            for k in 0..n {
                lo = lo.min(c.volume_fraction[k]);
                hi = hi.max(c.volume_fraction[k]);
                sum += c.volume_fraction[k];
            }
            sat = sat.max((sum - 1.0).abs());
        }
        self.alpha_range = (lo, hi);
        self.max_saturation_error = sat;
    }

    pub fn diagnostics(&self, dt: f64) -> Result<DiagnosticsRecord> {
        let w = self.primitives()?;
        Ok(self.diagnostics_from(&w, dt))
    }

    fn diagnostics_from(&self, w: &[PrimitiveState], dt: f64) -> DiagnosticsRecord {
        let mats = &self.cfg.materials;
        let n = self.cfg.nphase();
        let totals = self.totals();
        let vol = self.grid.cell_volume();
        let mut rec = DiagnosticsRecord {
            step: self.step,
            time: self.time,
            dt,
            mass: [0.0; MAX_PHASES],
            momentum: totals.momentum,
            energy: totals.total_energy,
            p_min: f64::INFINITY,
            p_max: f64::NEG_INFINITY,
            t_min: f64::INFINITY,
            t_max: f64::NEG_INFINITY,
            alpha_min: 1.0,
            alpha_max: 0.0,
            saturation_error: 0.0,
            entropy: 0.0,
            timings: self.last_timings,
        };
        rec.mass[..n].copy_from_slice(&totals.partial_density[..n]);
        for c in w {
            rec.p_min = rec.p_min.min(c.pressure);
            rec.p_max = rec.p_max.max(c.pressure);
            let t = c.mixture_temperature(mats);
            rec.t_min = rec.t_min.min(t);
            rec.t_max = rec.t_max.max(t);
            let mut sum = 0.0;
            for k in 0..n {
                rec.alpha_min = rec.alpha_min.min(c.volume_fraction[k]);
                rec.alpha_max = rec.alpha_max.max(c.volume_fraction[k]);
                sum += c.volume_fraction[k];
            }
            rec.saturation_error = rec.saturation_error.max((sum - 1.0).abs());
            rec.entropy += vol * eos::mixture_entropy(c, mats);
        }
        rec
    }

    /// Run to `t_end`, landing exactly on every time in `stops` (which must
    /// be sorted). `on_stop` is called at the initial time and each stop.
    pub fn run_until<F>(&mut self, t_end: f64, stops: &[f64], mut on_stop: F) -> Result<RunSummary>
    where
        F: FnMut(&Simulation) -> Result<()>,
    {
        let clock = Instant::now();
        let start_step = self.step;
        let mut targets: Vec<f64> = stops.iter().copied().filter(|t| *t > self.time && *t < t_end).collect();
        targets.push(t_end);
        on_stop(self)?;
        for target in targets {
            if self.time >= target {
                continue;
            }
            while self.time < target {
                let remaining = target - self.time;
                let dt = self.advance(remaining)?;
                // absorb round-off so the stop is hit exactly
                if (target - self.time).abs() <= 1e-12 * target.abs().max(dt) {
                    self.time = target;
                }
            }
            on_stop(self)?;
        }
        Ok(RunSummary {
            steps: self.step - start_step,
            time: self.time,
            wall_seconds: clock.elapsed().as_secs_f64(),
        })
    }

    /// Run the case to its configured end time, stopping at its snapshots.
    pub fn run<F>(&mut self, on_stop: F) -> Result<RunSummary>
    where
        F: FnMut(&Simulation) -> Result<()>,
    {
        let mut stops = self.cfg.output.snapshots.clone();
        stops.sort_by(f64::total_cmp);
        self.run_until(self.cfg.end_time, &stops, on_stop)
    }
}
