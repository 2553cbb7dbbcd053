//! Acceptance gate. Prints one PASS/FAIL line per criterion.
//!
//! `cargo test --release --test acceptance -- 1 4` runs a subset. Set
//! `MPFLOW_ACCEPTANCE_STRICT=1` to turn failures into a non-zero exit.

use std::time::Instant;

use mpflow::cases::{self, TripleVariant};
use mpflow::config::CaseConfig;
use mpflow::convergence::{exact_solution, rightmost_crossing, run_profile, ErrorNorms, ExactSolution};
use mpflow::driver::Simulation;
use mpflow::eos;
use mpflow::grid::{Boundaries, BoundaryKind, Grid, GridField};
use mpflow::hyperbolic::{compute_dt_cfl, hydro_step, HydroOptions, Limiter, TimeIntegrator};
use mpflow::parabolic::{implicit_solve, lim_schedule, lim_solve, spectral_bound, DiffusionOperator, ParabolicSolver, PicardOptions};
use mpflow::closures::{ConductivityModel, UnitSystem};
use mpflow::state::{conserved_from_primitive, ConservedState, MaterialParams, PrimitiveState, SplitCell};
use mpflow::thermal::{heat_conduction_step, relax_temperatures, ConductionConfig, RelaxMethod};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Outcome {
    pass: bool,
    detail: String,
}

impl Outcome {
    fn new(pass: bool, detail: String) -> Self {
        Self { pass, detail }
    }
}

fn failed(e: impl std::fmt::Display) -> Outcome {
    Outcome::new(false, format!("run failed: {e}"))
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

// 1 -------------------------------------------------------------------------

const PVT_TOL: f64 = 1e-9;
const PVT_SECONDS: f64 = 10.0;

fn pvt_preservation() -> Outcome {
    let cfg = cases::pvt_advection();
    let all_on = cfg.physics.hydro && cfg.physics.viscous && cfg.physics.relax && cfg.physics.conduct;
    let clock = Instant::now();
    let mut sim = match Simulation::new(cfg) {
        Ok(s) => s,
        Err(e) => return failed(e),
    };
    let mut worst = [0.0f64; 3];
    // every step, not only the final one
    while sim.time < sim.cfg.end_time {
        let remaining = sim.cfg.end_time - sim.time;
        if let Err(e) = sim.advance(remaining) {
            return failed(e);
        }
        if (sim.cfg.end_time - sim.time).abs() <= 1e-12 * sim.cfg.end_time {
            sim.time = sim.cfg.end_time;
        }
        let w = match sim.primitives() {
            Ok(w) => w,
            Err(e) => return failed(e),
        };
        for c in &w {
            worst[0] = worst[0].max(rel(c.pressure, 1e5));
            worst[1] = worst[1].max(rel(c.velocity[0], 100.0));
            for k in 0..c.nphase {
                worst[2] = worst[2].max(rel(c.temperature[k], 3000.0));
            }
        }
    }
    let secs = clock.elapsed().as_secs_f64();
    let pass = all_on && sim.grid.nx == 200 && worst.iter().all(|d| *d <= PVT_TOL) && secs < PVT_SECONDS;
    Outcome::new(
        pass,
        format!(
            "{} cells, {} steps, max rel dev p {:.2e} u {:.2e} T {:.2e} (tol {PVT_TOL:.0e}), {secs:.2} s (limit {PVT_SECONDS} s)",
            sim.grid.nx, sim.step, worst[0], worst[1], worst[2]
        ),
    )
}

// 2 -------------------------------------------------------------------------

const L1_RATIO_MIN: f64 = 4.0;
const POSITION_CELLS: f64 = 2.0;
const SHOCK_TUBE_SECONDS: f64 = 60.0;

fn shock_tube_convergence() -> Outcome {
    let cfg = cases::shock_tube_hydro();
    let clock = Instant::now();
    let mut l1 = Vec::new();
    let mut fine = None;
    for n in [100, 1000] {
        let c = cfg.clone().with_cells(n);
        let exact = match exact_solution(&c) {
            Ok(Some(e)) => e,
            Ok(None) => return Outcome::new(false, "no exact solution for the shock tube".into()),
            Err(e) => return failed(e),
        };
        let w = match run_profile(&cfg, n) {
            Ok(w) => w,
            Err(e) => return failed(e),
        };
        let grid = c.grid();
        let x: Vec<f64> = (0..n).map(|i| grid.cell_center(i, 0)[0]).collect();
        let rho: Vec<f64> = w.iter().map(|c| c.mixture_density()).collect();
        let want: Vec<f64> = x.iter().map(|&xi| exact.at(xi)[0]).collect();
        l1.push(ErrorNorms::between(&rho, &want, grid.dx).l1);
        if n == 1000 {
            fine = Some((x, w, exact, grid.dx));
        }
    }
    let secs = clock.elapsed().as_secs_f64();
    let ratio = l1[0] / l1[1];

    let (x, w, exact, dx) = fine.unwrap();
    let ExactSolution::Riemann { solution, x0, time } = exact else {
        return Outcome::new(false, "unexpected exact solution".into());
    };
    let alpha: Vec<f64> = w.iter().map(|c| c.volume_fraction[0]).collect();
    let p: Vec<f64> = w.iter().map(|c| c.pressure).collect();
    let contact_exact = x0 + solution.u_star * time;
    let shock_exact = x0 + solution.right_speeds.0 * time;
    let contact = rightmost_crossing(&x, &alpha, 0.5);
    let shock = rightmost_crossing(&x, &p, 0.5 * (solution.p_star + solution.right.p));
    let (Some(contact), Some(shock)) = (contact, shock) else {
        return Outcome::new(false, "contact or shock not found".into());
    };
    let dc = (contact - contact_exact).abs() / dx;
    let ds = (shock - shock_exact).abs() / dx;
    let pass = ratio >= L1_RATIO_MIN && dc <= POSITION_CELLS && ds <= POSITION_CELLS && secs < SHOCK_TUBE_SECONDS;
    Outcome::new(
        pass,
        format!(
            "L1(rho) {:.3e} -> {:.3e}, ratio {ratio:.2} (min {L1_RATIO_MIN}); contact off by {dc:.2} cells, shock by {ds:.2} cells (max {POSITION_CELLS}); {secs:.1} s (limit {SHOCK_TUBE_SECONDS} s)",
            l1[0], l1[1]
        ),
    )
}

// 3 -------------------------------------------------------------------------

const LIM_IMPLICIT_TOL: f64 = 1e-3;

fn final_temperature(cfg: CaseConfig) -> mpflow::Result<Vec<f64>> {
    let mut sim = Simulation::new(cfg)?;
    sim.run(|_| Ok(()))?;
    let mats = sim.cfg.materials.clone();
    Ok(sim.primitives()?.iter().map(|c| c.mixture_temperature(&mats)).collect())
}

fn lim_implicit_agreement() -> Outcome {
    let mut cfg = cases::conducting_shock_tube().with_cells(100);
    cfg.solver.parabolic = ParabolicSolver::Lim;
    let lim = match final_temperature(cfg.clone()) {
        Ok(t) => t,
        Err(e) => return failed(e),
    };
    cfg.solver.parabolic = ParabolicSolver::Implicit;
    let imp = match final_temperature(cfg) {
        Ok(t) => t,
        Err(e) => return failed(e),
    };
    let (worst, at) = lim
        .iter()
        .zip(&imp)
        .enumerate()
        .map(|(i, (a, b))| (rel(*a, *b), i))
        .fold((0.0, 0), |m, v| if v.0 > m.0 { v } else { m });
    let tmax = imp.iter().cloned().fold(0.0, f64::max);
    let scaled = lim.iter().zip(&imp).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max) / tmax;
    let mean = lim.iter().zip(&imp).map(|(a, b)| rel(*a, *b)).sum::<f64>() / imp.len() as f64;
    Outcome::new(
        worst <= LIM_IMPLICIT_TOL,
        format!(
            "max rel T difference {worst:.3e} at cell {at} (tol {LIM_IMPLICIT_TOL:.0e}); mean {mean:.2e}; max |dT|/Tmax {scaled:.2e}"
        ),
    )
}

// 4 -------------------------------------------------------------------------

const HEAT_RATIO_MIN: f64 = 3.5;
const EULER_TOL: f64 = 1e-14;

/// Periodic heat kernel on [0, 1) with unit diffusivity, started from a
/// Gaussian of age `t0`.
fn heat_kernel(x: f64, t: f64) -> f64 {
    (-6..=6)
        .map(|image| {
            let d = x - 0.5 - image as f64;
            (-d * d / (4.0 * t)).exp() / (4.0 * std::f64::consts::PI * t).sqrt()
        })
        .sum::<f64>()
        + 1.0
}

fn heat_error(n: usize, solver: ParabolicSolver) -> mpflow::Result<f64> {
    let (t0, span) = (0.002, 0.004);
    let grid = Grid::new_1d(n, 0.0, 1.0);
    let op = DiffusionOperator::from_cell_coefficients(grid, &Boundaries::uniform(BoundaryKind::Periodic), vec![1.0; n], &vec![1.0; n]);
    // Δt ∝ Δx² keeps the first-order time error at the spatial order
    let steps = (span / (2.0 * grid.dx * grid.dx)).ceil() as usize;
    let dt = span / steps as f64;
    let x: Vec<f64> = (0..n).map(|i| grid.cell_center(i, 0)[0]).collect();
    let mut v: Vec<f64> = x.iter().map(|&xi| heat_kernel(xi, t0)).collect();
    let zero = vec![0.0; n];
    for _ in 0..steps {
        v = match solver {
            ParabolicSolver::Lim => lim_solve(&v, &op, &zero, dt)?.value,
            ParabolicSolver::Implicit => implicit_solve(&v, &op, &zero, dt)?,
        };
    }
    let want: Vec<f64> = x.iter().map(|&xi| heat_kernel(xi, t0 + span)).collect();
    Ok(ErrorNorms::between(&v, &want, grid.dx).l2)
}

fn parabolic_correctness() -> Outcome {
    let mut parts = Vec::new();
    let mut pass = true;
    for solver in [ParabolicSolver::Lim, ParabolicSolver::Implicit] {
        let (coarse, fine) = match (heat_error(64, solver), heat_error(128, solver)) {
            (Ok(a), Ok(b)) => (a, b),
            (Err(e), _) | (_, Err(e)) => return failed(e),
        };
        let ratio = coarse / fine;
        pass &= ratio >= HEAT_RATIO_MIN;
        parts.push(format!("{solver:?} L2 ratio {ratio:.2}"));
    }

    // one-stencil LIM is explicit Euler
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let n = 48;
    let grid = Grid::new_1d(n, 0.0, 1.0);
    let capacity: Vec<f64> = (0..n).map(|_| rng.gen_range(0.5..2.0)).collect();
    let k: Vec<f64> = (0..n).map(|_| rng.gen_range(0.1..1.0)).collect();
    let op = DiffusionOperator::from_cell_coefficients(grid, &Boundaries::uniform(BoundaryKind::Periodic), capacity.clone(), &k);
    let dt = 0.5 / spectral_bound(&op);
    let stencils = lim_schedule(dt, spectral_bound(&op)).stencils;
    let v: Vec<f64> = (0..n).map(|_| rng.gen_range(0.0..1.0)).collect();
    let f: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let lim = match lim_solve(&v, &op, &f, dt) {
        Ok(s) => s.value,
        Err(e) => return failed(e),
    };
    let lv = op.apply(&v);
    let euler_gap = (0..n)
        .map(|i| (lim[i] - (v[i] + dt * (lv[i] + f[i] / capacity[i]))).abs())
        .fold(0.0, f64::max);
    pass &= stencils == 1 && euler_gap <= EULER_TOL;
    parts.push(format!("P={stencils} LIM vs explicit Euler {euler_gap:.1e}"));
    Outcome::new(
        pass,
        format!("{} (min ratio {HEAT_RATIO_MIN}, Euler tol {EULER_TOL:.0e})", parts.join("; ")),
    )
}

// 5 -------------------------------------------------------------------------

const HYDRO_CONSERVATION_TOL: f64 = 1e-12;
const RELAX_ENERGY_TOL: f64 = 1e-10;
/// Conduction energy drift allowed relative to the Picard tolerance.
const CONDUCTION_PICARD_FACTOR: f64 = 10.0;

fn two_fluids() -> Vec<MaterialParams> {
    vec![
        MaterialParams::stiffened("liquid", 4.4, 6e6, 1606.0).with_conductivity(ConductivityModel::Constant { lambda: 0.6 }),
        MaterialParams::ideal("gas", 1.4, 714.0).with_conductivity(ConductivityModel::Constant { lambda: 0.03 }),
    ]
}

fn totals(u: &GridField<ConservedState>, grid: &Grid, n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut sum = vec![0.0; n + 3];
    let mut scale = vec![0.0; n + 3];
    for c in u.interior() {
        let mut add = |i: usize, v: f64| {
            sum[i] += v * grid.cell_volume();
            scale[i] += v.abs() * grid.cell_volume();
        };
        for k in 0..n {
            add(k, c.partial_density[k]);
        }
        add(n, c.momentum[0]);
        add(n + 1, c.momentum[1]);
        add(n + 2, c.total_energy);
    }
    (sum, scale)
}

fn hydro_drift(grid: Grid, rng: &mut ChaCha8Rng) -> mpflow::Result<f64> {
    let mats = two_fluids();
    let w: Vec<PrimitiveState> = (0..grid.ncells())
        .map(|_| {
            let a = rng.gen_range(1e-3..1.0 - 1e-3);
            PrimitiveState::from_p_t(
                rng.gen_range(5e4..2e5),
                rng.gen_range(300.0..600.0),
                [rng.gen_range(-50.0..50.0), rng.gen_range(-50.0..50.0)],
                &[a, 1.0 - a],
                &mats,
            )
        })
        .collect();
    let interior: Vec<ConservedState> = w.iter().map(|c| conserved_from_primitive(c, &mats)).collect();
    let mut u = GridField::from_interior(grid, Boundaries::uniform(BoundaryKind::Periodic), &interior);
    let opts = HydroOptions {
        limiter: Limiter::Minmod,
        integrator: TimeIntegrator::SspRk3,
    };
    let mut worst: f64 = 0.0;
    for _ in 0..5 {
        let (before, scale) = totals(&u, &grid, 2);
        let prim = u.interior().iter().map(|c| mpflow::state::primitive_from_conserved(c, &mats)).collect::<mpflow::Result<Vec<_>>>()?;
        let dt = compute_dt_cfl(&prim, &grid, &mats, 0.4)?;
        hydro_step(&mut u, &mats, dt, &opts)?;
        let (after, _) = totals(&u, &grid, 2);
        for i in 0..before.len() {
            if grid.dim() == 1 && i == 3 {
                continue;
            }
            worst = worst.max((after[i] - before[i]).abs() / scale[i]);
        }
    }
    Ok(worst)
}

fn random_cell(rng: &mut ChaCha8Rng, mats: &[MaterialParams]) -> SplitCell {
    let p = 10f64.powf(rng.gen_range(4.0..8.0));
    let rho: Vec<f64> = mats
        .iter()
        .map(|m| eos::sg_density_from_pt(p, 10f64.powf(rng.gen_range(1.5..3.7)), m))
        .collect();
    let mut alpha: Vec<f64> = mats.iter().map(|_| rng.gen_range(1e-6..1.0)).collect();
    let s: f64 = alpha.iter().sum();
    alpha.iter_mut().for_each(|a| *a /= s);
    let w = PrimitiveState::from_rho_p(&rho, [rng.gen_range(-10.0..10.0), 0.0], p, &alpha, mats);
    SplitCell::new(&conserved_from_primitive(&w, mats), &w)
}

fn three_fluids() -> Vec<MaterialParams> {
    vec![
        MaterialParams::stiffened("liquid", 4.4, 6e6, 1606.0),
        MaterialParams::ideal("gas", 1.4, 714.0),
        MaterialParams::stiffened("solid", 2.0, 1e5, 300.0),
    ]
}

fn relax_energy_drift(rng: &mut ChaCha8Rng, cells: usize) -> mpflow::Result<f64> {
    let mats = three_fluids();
    let mut worst: f64 = 0.0;
    for i in 0..cells {
        let m = &mats[..2 + i % 2];
        let cell = random_cell(rng, m);
        let out = relax_temperatures(&cell, m, RelaxMethod::Exact)?;
        worst = worst.max(rel(out.internal_energy_density(), cell.internal_energy_density()));
    }
    Ok(worst)
}

fn conduction_drift() -> mpflow::Result<(f64, f64)> {
    let mats = two_fluids();
    let n = 64;
    let grid = Grid::new_1d(n, 0.0, 0.01);
    let boundaries = Boundaries::uniform(BoundaryKind::Periodic);
    let mut cells: Vec<SplitCell> = (0..n)
        .map(|i| {
            let x = grid.cell_center(i, 0)[0] / 0.01;
            let t = 450.0 + 150.0 * (2.0 * std::f64::consts::PI * x).sin();
            let a = 0.5 + 0.45 * (2.0 * std::f64::consts::PI * x).cos();
            let w = PrimitiveState::from_p_t(1e5, t, [0.0; 2], &[a, 1.0 - a], &mats);
            SplitCell::new(&conserved_from_primitive(&w, &mats), &w)
        })
        .collect();
    let before: f64 = cells.iter().map(|c| c.internal_energy_density()).sum();
    let picard = PicardOptions::default();
    let cfg = ConductionConfig {
        enabled: true,
        solver: ParabolicSolver::Lim,
        picard,
    };
    for _ in 0..20 {
        heat_conduction_step(&mut cells, &grid, &boundaries, &mats, &UnitSystem::si(), &vec![0.0; n], 1e-3, &cfg)?;
    }
    let after: f64 = cells.iter().map(|c| c.internal_energy_density()).sum();
    Ok((rel(after, before), picard.tol))
}

fn conservation_suite() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let h1 = hydro_drift(Grid::new_1d(64, 0.0, 1.0), &mut rng);
    let h2 = hydro_drift(Grid::new_2d(24, 16, [0.0, 0.0], [1.5, 1.0]), &mut rng);
    let relax = relax_energy_drift(&mut rng, 1000);
    let conduct = conduction_drift();
    match (h1, h2, relax, conduct) {
        (Ok(h1), Ok(h2), Ok(r), Ok((c, tol))) => {
            let ctol = CONDUCTION_PICARD_FACTOR * tol;
            Outcome::new(
                h1.max(h2) <= HYDRO_CONSERVATION_TOL && r <= RELAX_ENERGY_TOL && c <= ctol,
                format!(
                    "hydro per-step drift 1D {h1:.1e} 2D {h2:.1e} (tol {HYDRO_CONSERVATION_TOL:.0e}); relax energy {r:.1e} (tol {RELAX_ENERGY_TOL:.0e}); conduction energy {c:.1e} (tol {ctol:.0e})"
                ),
            )
        }
        (Err(e), ..) | (_, Err(e), ..) | (_, _, Err(e), _) | (.., Err(e)) => failed(e),
    }
}

// 6 -------------------------------------------------------------------------

const ENTROPY_TOL: f64 = 1e-12;
const ENTROPY_CELLS: usize = 10_000;

fn entropy_inequality() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mats = three_fluids();
    let mut worst = f64::INFINITY;
    for i in 0..ENTROPY_CELLS {
        let m = &mats[..2 + i % 2];
        let cell = random_cell(&mut rng, m);
        let out = match relax_temperatures(&cell, m, RelaxMethod::Exact) {
            Ok(c) => c,
            Err(e) => return failed(e),
        };
        let s0 = eos::mixture_entropy(&cell.w, m);
        let s1 = eos::mixture_entropy(&out.w, m);
        // entropies carry an arbitrary reference, so scale by Σ m_k C_v,k too
        let scale = s0.abs() + (0..m.len()).map(|k| cell.m[k] * m[k].cv).sum::<f64>();
        worst = worst.min((s1 - s0) / scale);
    }
    Outcome::new(
        worst >= -ENTROPY_TOL,
        format!("{ENTROPY_CELLS} random cells, smallest relative entropy change {worst:.2e} (floor -{ENTROPY_TOL:.0e})"),
    )
}

// 7 -------------------------------------------------------------------------

const SATURATION_TOL: f64 = 1e-12;
const TRIPLE_POINT_SECONDS: f64 = 15.0 * 60.0;

fn volume_fraction_bounds() -> Outcome {
    let cfg = cases::triple_point(TripleVariant::H);
    let cells = cfg.domain.cells.clone();
    let clock = Instant::now();
    let mut sim = match Simulation::new(cfg) {
        Ok(s) => s,
        Err(e) => return failed(e),
    };
    if let Err(e) = sim.run(|_| Ok(())) {
        return failed(e);
    }
    let secs = clock.elapsed().as_secs_f64();
    let (lo, hi) = sim.alpha_range;
    let sat = sim.max_saturation_error;
    let pass = cells == [280, 120] && lo > 0.0 && hi < 1.0 && sat <= SATURATION_TOL && secs < TRIPLE_POINT_SECONDS;
    Outcome::new(
        pass,
        format!(
            "{}x{} to t={}, {} steps: alpha in [{lo:.3e}, 1 - {:.3e}], max |sum alpha - 1| {sat:.1e} (tol {SATURATION_TOL:.0e}), {secs:.0} s (limit {TRIPLE_POINT_SECONDS} s)",
            cells[0], cells[1], sim.time, sim.step, 1.0 - hi
        ),
    )
}

// 8 -------------------------------------------------------------------------

/// Pressure reversals smaller than this fraction of the peak are ignored.
const PEAK_TOL: f64 = 1e-3;

fn laser_ablation_robustness() -> Outcome {
    let mut cfg = cases::laser_ablation_1d();
    cfg.epsilon = 1e-6;
    let clock = Instant::now();
    let mut sim = match Simulation::new(cfg) {
        Ok(s) => s,
        Err(e) => return failed(e),
    };
    if let Err(e) = sim.run(|_| Ok(())) {
        return failed(e);
    }
    let secs = clock.elapsed().as_secs_f64();
    let w = match sim.primitives() {
        Ok(w) => w,
        Err(e) => return failed(e),
    };
    let rho_min = w.iter().flat_map(|c| (0..c.nphase).map(move |k| c.density[k])).fold(f64::INFINITY, f64::min);
    let p: Vec<f64> = w.iter().map(|c| c.pressure).collect();
    let peak = (0..p.len()).fold(0, |m, i| if p[i] > p[m] { i } else { m });
    let rise = (0..peak).map(|i| p[i] - p[i + 1]).fold(0.0, f64::max) / p[peak];
    let fall = (peak..p.len() - 1).map(|i| p[i + 1] - p[i]).fold(0.0, f64::max) / p[peak];
    let x_peak = sim.grid.cell_center(peak, 0)[0];
    let pass = sim.grid.nx == 720 && rho_min > 0.0 && rise <= PEAK_TOL && fall <= PEAK_TOL;
    Outcome::new(
        pass,
        format!(
            "eps 1e-6, {} cells to t={:.3e} us in {} steps ({} retried), min phase density {rho_min:.2e} g/cm3, peak {:.2} Mbar at {x_peak:.4} cm, largest reversal {:.1e} of peak (tol {PEAK_TOL:.0e}), {secs:.0} s",
            sim.grid.nx, sim.time, sim.step, sim.rejections, p[peak], rise.max(fall)
        ),
    )
}

// 9 -------------------------------------------------------------------------

const HELIUM_MASS_TOL: f64 = 1e-10;

fn shock_bubble() -> Outcome {
    let cfg = cases::shock_bubble();
    let helium = cfg.materials.iter().position(|m| m.name == "helium").unwrap_or(1);
    let clock = Instant::now();
    let mut sim = match Simulation::new(cfg) {
        Ok(s) => s,
        Err(e) => return failed(e),
    };
    let mass0 = sim.totals().partial_density[helium];
    let bubble_max_t = |s: &Simulation| -> mpflow::Result<f64> {
        let mats = s.materials();
        Ok(s.primitives()?
            .iter()
            .filter(|c| c.volume_fraction[helium] > 0.5)
            .map(|c| c.mixture_temperature(mats))
            .fold(0.0, f64::max))
    };
    let t_initial = match bubble_max_t(&sim) {
        Ok(t) => t,
        Err(e) => return failed(e),
    };
    let stops: Vec<f64> = (1..49).map(|i| i as f64 * 5e-6).collect();
    let mut t_peak: f64 = 0.0;
    let end = sim.cfg.end_time;
    let result = sim.run_until(end, &stops, |s| {
        t_peak = t_peak.max(bubble_max_t(s)?);
        Ok(())
    });
    if let Err(e) = result {
        return failed(e);
    }
    let secs = clock.elapsed().as_secs_f64();
    let mass1 = sim.totals().partial_density[helium];
    let drift = rel(mass1 + sim.outflow.partial_density[helium], mass0);
    let raw = rel(mass1, mass0);
    let pass = t_peak > t_initial && t_peak > 293.0 && drift <= HELIUM_MASS_TOL;
    Outcome::new(
        pass,
        format!(
            "{}x{} to {:.0} us: bubble max T {t_initial:.2} K -> peak {t_peak:.2} K; He mass drift {drift:.1e} with boundary flux (tol {HELIUM_MASS_TOL:.0e}), {raw:.1e} without; {secs:.0} s",
            sim.grid.nx,
            sim.grid.ny,
            sim.time * 1e6
        ),
    )
}

// ---------------------------------------------------------------------------

fn main() {
    let criteria: [(&str, fn() -> Outcome); 9] = [
        ("PVT preservation", pvt_preservation),
        ("shock-tube convergence", shock_tube_convergence),
        ("LIM/implicit agreement", lim_implicit_agreement),
        ("parabolic correctness", parabolic_correctness),
        ("conservation suite", conservation_suite),
        ("entropy inequality", entropy_inequality),
        ("volume-fraction bounds", volume_fraction_bounds),
        ("laser ablation robustness", laser_ablation_robustness),
        ("shock-bubble check", shock_bubble),
    ];
    let selected: Vec<usize> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let mut failures = 0;
    let mut ran = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let id = i + 1;
        if !selected.is_empty() && !selected.contains(&id) {
            continue;
        }
        ran += 1;
        let out = check();
        if !out.pass {
            failures += 1;
        }
        println!("{} {id} {name}: {}", if out.pass { "PASS" } else { "FAIL" }, out.detail);
    }
    println!("acceptance: {}/{ran} criteria passed", ran - failures);
    if failures > 0 && std::env::var_os("MPFLOW_ACCEPTANCE_STRICT").is_some() {
        std::process::exit(1);
    }
}
