//! Built-in problem setups.

use crate::closures::{ConductivityModel, CoulombLengths, LaserSpec, PlasmaSpecies, UnitSystem, ViscosityModel};
use crate::config::{AlphaSpec, CaseConfig, Domain, OutputPlan, Physics, Region, Shape, SolverSettings, Thermo};
use crate::error::{Error, Result};
use crate::grid::{Boundaries, BoundaryKind};
use crate::hyperbolic::Limiter;
use crate::parabolic::{ParabolicSolver, PicardOptions};
use crate::state::MaterialParams;

/// Name and one-line summary of every built-in case.
pub const CASES: &[(&str, &str)] = &[
    ("pvt_advection", "liquid/gas interface translating at uniform p, u, T"),
    ("shock_tube", "water/gas shock tube with relaxation and heat conduction"),
    ("shock_tube_hydro", "water/gas shock tube without relaxation or diffusion"),
    ("laser_ablation", "1D two-layer CH target ablated by a laser (g, cm, us, MK)"),
    ("triple_point", "three-fluid triple point, hydrodynamics only"),
    ("triple_point_hv", "triple point with viscosity"),
    ("triple_point_htr", "triple point with temperature relaxation"),
    ("triple_point_htrhc", "triple point with temperature relaxation and heat conduction"),
    ("shock_bubble", "Mach 1.22 shock in air hitting a helium bubble"),
    ("smooth_advection", "periodic sine density wave, for convergence studies"),
];

pub fn builtin(name: &str) -> Result<CaseConfig> {
    let cfg = match name {
        "pvt_advection" => pvt_advection(),
        "shock_tube" => conducting_shock_tube(),
        "shock_tube_hydro" => shock_tube_hydro(),
        "laser_ablation" => laser_ablation_1d(),
        "triple_point" => triple_point(TripleVariant::H),
        "triple_point_hv" => triple_point(TripleVariant::HV),
        "triple_point_htr" => triple_point(TripleVariant::HTR),
        "triple_point_htrhc" => triple_point(TripleVariant::HTRHC),
        "shock_bubble" => shock_bubble(),
        "smooth_advection" => smooth_advection(),
        other => return Err(Error::Config(format!("unknown case '{other}'"))),
    };
    cfg.validate()?;
    Ok(cfg)
}

fn domain_1d(x0: f64, x1: f64, n: usize) -> Domain {
    Domain {
        lower: vec![x0],
        upper: vec![x1],
        cells: vec![n],
    }
}

fn half_line(lo: f64, hi: f64) -> Shape {
    Shape::Box {
        lower: vec![lo],
        upper: vec![hi],
    }
}

pub fn pvt_advection() -> CaseConfig {
    let liquid = MaterialParams::stiffened("liquid", 4.4, 6.0e6, 58.82)
        .with_viscosity(ViscosityModel::Constant { mu: 1e-3 })
        .with_conductivity(ConductivityModel::Constant { lambda: 0.6 });
    let gas = MaterialParams::ideal("gas", 1.4, 125.0)
        .with_viscosity(ViscosityModel::Constant { mu: 2e-5 })
        .with_conductivity(ConductivityModel::Constant { lambda: 0.03 });
    let thermo = Thermo::PressureTemperature {
        pressure: 1e5,
        temperature: 3000.0,
    };
    CaseConfig {
        name: "pvt_advection".into(),
        description: "liquid/gas interface translating at uniform pressure, velocity and temperature".into(),
        domain: domain_1d(0.0, 1.0, 200),
        units: UnitSystem::si(),
        materials: vec![liquid, gas],
        epsilon: 1e-6,
        boundaries: Boundaries::uniform(BoundaryKind::Extrapolation),
        regions: vec![
            Region {
                shape: Shape::All,
                alpha: AlphaSpec::Dominant { dominant: 1 },
                velocity: [100.0, 0.0],
                thermo: thermo.clone(),
            },
            Region {
                shape: half_line(f64::NEG_INFINITY, 0.2),
                alpha: AlphaSpec::Dominant { dominant: 0 },
                velocity: [100.0, 0.0],
                thermo,
            },
        ],
        physics: Physics {
            viscous: true,
            relax: true,
            conduct: true,
            ..Physics::default()
        },
        solver: SolverSettings::default(),
        end_time: 5e-6,
        output: OutputPlan::default(),
    }
}

/// Water/gas shock tube. The diffusion-free variant is [`shock_tube_hydro`].
pub fn conducting_shock_tube() -> CaseConfig {
    let water = MaterialParams::stiffened("water", 4.4, 6.0e6, 1606.0)
        .with_conductivity(ConductivityModel::Constant { lambda: 1e4 });
    let gas = MaterialParams::ideal("gas", 1.4, 714.0).with_conductivity(ConductivityModel::Constant { lambda: 1e6 });
    CaseConfig {
        name: "shock_tube".into(),
        description: "water/gas shock tube with temperature relaxation and heat conduction".into(),
        domain: domain_1d(0.0, 1.0, 100),
        units: UnitSystem::si(),
        materials: vec![water, gas],
        epsilon: 1e-6,
        boundaries: Boundaries::uniform(BoundaryKind::Extrapolation),
        regions: vec![
            Region {
                shape: Shape::All,
                alpha: AlphaSpec::Dominant { dominant: 1 },
                velocity: [0.0, 0.0],
                thermo: Thermo::PressureTemperature {
                    pressure: 1e5,
                    temperature: 7.02,
                },
            },
            Region {
                shape: half_line(f64::NEG_INFINITY, 0.7),
                alpha: AlphaSpec::Dominant { dominant: 0 },
                velocity: [0.0, 0.0],
                thermo: Thermo::PressureTemperature {
                    pressure: 1e9,
                    temperature: 293.02,
                },
            },
        ],
        physics: Physics {
            relax: true,
            conduct: true,
            ..Physics::default()
        },
        solver: SolverSettings::default(),
        end_time: 2.0e-4,
        output: OutputPlan::default(),
    }
}

pub fn shock_tube_hydro() -> CaseConfig {
    let mut cfg = conducting_shock_tube();
    cfg.name = "shock_tube_hydro".into();
    cfg.description = "water/gas shock tube, hydrodynamic stage only".into();
    cfg.physics.relax = false;
    cfg.physics.conduct = false;
    cfg
}

/// Interface position and smoothing band of the ablation target [cm].
pub const ABLATION_LAYERS: [f64; 4] = [0.045, 0.046, 0.0475, 0.0485];

pub fn laser_ablation_1d() -> CaseConfig {
    let species = PlasmaSpecies::polystyrene();
    let plasma = |name: &str, gamma: f64| {
        MaterialParams::ideal(name, gamma, 86.34)
            .with_viscosity(ViscosityModel::Braginskii {
                species,
                coulomb: CoulombLengths::default(),
            })
            .with_conductivity(ConductivityModel::SpitzerHarm {
                species,
                coulomb: CoulombLengths::default(),
            })
    };
    let [x1, xi, x2, x3] = ABLATION_LAYERS;
    let t0 = 3e-4;
    CaseConfig {
        name: "laser_ablation".into(),
        description: "two-layer CH target in vacuum heated by a laser from the right".into(),
        domain: domain_1d(0.0, 0.072, 720),
        units: UnitSystem::laser_plasma(),
        materials: vec![plasma("ch1", 2.0), plasma("ch2", 5.0 / 3.0)],
        epsilon: 5e-4,
        boundaries: Boundaries::uniform(BoundaryKind::Extrapolation),
        regions: vec![
            // vacuum on the left of the target
            Region {
                shape: Shape::All,
                alpha: AlphaSpec::Dominant { dominant: 1 },
                velocity: [0.0, 0.0],
                thermo: Thermo::DensityTemperature {
                    density: 1e-5,
                    temperature: t0,
                },
            },
            Region {
                shape: half_line(x1, xi),
                alpha: AlphaSpec::Dominant { dominant: 0 },
                velocity: [0.0, 0.0],
                thermo: Thermo::DensityTemperature {
                    density: 1.5,
                    temperature: t0,
                },
            },
            Region {
                shape: half_line(xi, x2),
                alpha: AlphaSpec::Dominant { dominant: 1 },
                velocity: [0.0, 0.0],
                thermo: Thermo::DensityTemperature {
                    density: 1.0,
                    temperature: t0,
                },
            },
            Region {
                shape: half_line(x2, f64::INFINITY),
                alpha: AlphaSpec::Dominant { dominant: 1 },
                velocity: [0.0, 0.0],
                thermo: Thermo::ExponentialRamp {
                    x_start: x2,
                    x_end: x3,
                    rho_start: 1.0,
                    rho_end: 1e-5,
                    temperature: t0,
                },
            },
        ],
        physics: Physics {
            viscous: true,
            relax: true,
            conduct: true,
            // 1e14 W/cm² = 1e3 case units; d = 20 μm
            laser: Some(LaserSpec {
                intensity: 1e3,
                depth: 2e-3,
                critical_density: 1.22e-2,
            }),
            ..Physics::default()
        },
        // Picard iterations around LIM stagnate in the hot, nearly massless
        // corona; backward Euler damps the stiff modes and converges.
        solver: SolverSettings {
            parabolic: ParabolicSolver::Implicit,
            picard: PicardOptions { tol: 1e-6, max_iter: 40 },
            ..SolverSettings::default()
        },
        end_time: 2.49e-3,
        output: OutputPlan::default(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TripleVariant {
    H,
    HV,
    HTR,
    HTRHC,
}

pub fn triple_point(variant: TripleVariant) -> CaseConfig {
    let fluid = |name: &str, gamma: f64, cv: f64, mu: f64, lambda: f64| {
        MaterialParams::ideal(name, gamma, cv)
            .with_viscosity(ViscosityModel::Constant { mu })
            .with_conductivity(ConductivityModel::Constant { lambda })
    };
    let boxed = |lower: [f64; 2], upper: [f64; 2]| Shape::Box {
        lower: lower.to_vec(),
        upper: upper.to_vec(),
    };
    let region = |shape: Shape, dominant: usize, rho: f64, p: f64| Region {
        shape,
        alpha: AlphaSpec::Dominant { dominant },
        velocity: [0.0, 0.0],
        thermo: Thermo::PhaseDensities {
            pressure: p,
            densities: vec![rho; 3],
        },
    };
    let (name, physics) = match variant {
        TripleVariant::H => ("triple_point", Physics::default()),
        TripleVariant::HV => (
            "triple_point_hv",
            Physics {
                viscous: true,
                ..Physics::default()
            },
        ),
        TripleVariant::HTR => (
            "triple_point_htr",
            Physics {
                relax: true,
                ..Physics::default()
            },
        ),
        TripleVariant::HTRHC => (
            "triple_point_htrhc",
            Physics {
                relax: true,
                conduct: true,
                ..Physics::default()
            },
        ),
    };
    CaseConfig {
        name: name.into(),
        description: "three-fluid triple point".into(),
        domain: Domain {
            lower: vec![0.0, 0.0],
            upper: vec![7.0, 3.0],
            cells: vec![280, 120],
        },
        units: UnitSystem::si(),
        materials: vec![
            fluid("fluid1", 1.5, 40.0, 0.10, 0.50),
            fluid("fluid2", 1.4, 50.0, 0.20, 1.00),
            fluid("fluid3", 2.0, 20.0, 0.05, 2.00),
        ],
        epsilon: 1e-6,
        boundaries: Boundaries::uniform(BoundaryKind::Extrapolation),
        regions: vec![
            region(Shape::All, 2, 0.125, 0.1),
            region(boxed([1.0, 0.0], [f64::INFINITY, 1.5]), 1, 1.0, 0.1),
            region(boxed([f64::NEG_INFINITY, f64::NEG_INFINITY], [1.0, f64::INFINITY]), 0, 1.0, 1.0),
        ],
        physics,
        solver: SolverSettings {
            limiter: Limiter::Overbee,
            ..SolverSettings::default()
        },
        end_time: 5.0,
        output: OutputPlan::default(),
    }
}

pub fn shock_bubble() -> CaseConfig {
    let air = MaterialParams::ideal("air", 1.4, 717.5)
        .with_viscosity(ViscosityModel::Sutherland {
            mu0: 1.716e-5,
            t0: 273.0,
            w: 130.0,
        })
        .with_conductivity(ConductivityModel::Prandtl { prandtl: 0.7 });
    let helium = MaterialParams::ideal("helium", 1.6451, 2430.35)
        .with_viscosity(ViscosityModel::Sutherland {
            mu0: 1.870e-5,
            t0: 273.0,
            w: 65.0,
        })
        .with_conductivity(ConductivityModel::HeliumFit);
    CaseConfig {
        name: "shock_bubble".into(),
        description: "left-going Mach 1.22 shock in air interacting with a helium bubble".into(),
        domain: Domain {
            lower: vec![0.0, 0.0],
            upper: vec![0.2225, 0.089],
            cells: vec![300, 120],
        },
        units: UnitSystem::si(),
        materials: vec![air, helium],
        epsilon: 1e-6,
        boundaries: Boundaries {
            x_lo: BoundaryKind::Extrapolation,
            x_hi: BoundaryKind::Extrapolation,
            y_lo: BoundaryKind::Periodic,
            y_hi: BoundaryKind::Periodic,
        },
        regions: vec![
            Region {
                shape: Shape::All,
                alpha: AlphaSpec::Dominant { dominant: 0 },
                velocity: [0.0, 0.0],
                thermo: Thermo::DensityPressure {
                    density: 1.2062,
                    pressure: 101325.0,
                },
            },
            Region {
                shape: Shape::Box {
                    lower: vec![0.168, f64::NEG_INFINITY],
                    upper: vec![f64::INFINITY, f64::INFINITY],
                },
                alpha: AlphaSpec::Dominant { dominant: 0 },
                velocity: [-114.0, 0.0],
                thermo: Thermo::DensityPressure {
                    density: 1.66,
                    pressure: 159080.98,
                },
            },
            Region {
                shape: Shape::Circle {
                    center: [0.138, 0.0445],
                    radius: 0.025,
                },
                alpha: AlphaSpec::Dominant { dominant: 1 },
                velocity: [0.0, 0.0],
                thermo: Thermo::DensityPressure {
                    density: 0.2204,
                    pressure: 101325.0,
                },
            },
        ],
        physics: Physics {
            viscous: true,
            relax: true,
            conduct: true,
            ..Physics::default()
        },
        solver: SolverSettings::default(),
        end_time: 245e-6,
        output: OutputPlan::default(),
    }
}

pub fn smooth_advection() -> CaseConfig {
    CaseConfig {
        name: "smooth_advection".into(),
        description: "periodic sine density wave advected at uniform velocity and pressure".into(),
        domain: domain_1d(0.0, 1.0, 64),
        units: UnitSystem::si(),
        materials: vec![MaterialParams::ideal("gas", 1.4, 1.0)],
        epsilon: 1e-6,
        boundaries: Boundaries::uniform(BoundaryKind::Periodic),
        regions: vec![Region {
            shape: Shape::All,
            alpha: AlphaSpec::Dominant { dominant: 0 },
            velocity: [1.0, 0.0],
            thermo: Thermo::SineDensity {
                mean: 1.0,
                amplitude: 0.2,
                wavelength: 1.0,
                pressure: 1.0,
            },
        }],
        physics: Physics::default(),
        solver: SolverSettings::default(),
        end_time: 1.0,
        output: OutputPlan::default(),
    }
}
