use mpflow::cases::{self, builtin, TripleVariant, CASES};
use mpflow::eos::wood_sound_speed;

#[test]
fn all_cases_build_initial_states() {
    for (name, _) in CASES {
        let cfg = builtin(name).unwrap();
        let w = cfg.initial_primitives().unwrap();
        assert_eq!(w.len(), cfg.grid().ncells(), "{name}");
        for c in &w {
            c.validate(&cfg.materials).unwrap();
        }
    }
}

#[test]
fn triple_point_regions_tile_the_domain() {
    let cfg = cases::triple_point(TripleVariant::H);
    let w = cfg.initial_primitives().unwrap();
    let grid = cfg.grid();
    // every cell is dominated by exactly one phase and all three appear
    let mut seen = [0usize; 3];
    for c in &w {
        let dominant: Vec<usize> = (0..3).filter(|&k| c.volume_fraction[k] > 0.5).collect();
        assert_eq!(dominant.len(), 1);
        seen[dominant[0]] += 1;
    }
    assert!(seen.iter().all(|&n| n > 0));
    assert_eq!(seen.iter().sum::<usize>(), grid.ncells());
    assert!(w.iter().all(|c| c.velocity == [0.0, 0.0]));
}

#[test]
fn triple_point_region_states() {
    let cfg = cases::triple_point(TripleVariant::H);
    let w = cfg.initial_primitives().unwrap();
    let grid = cfg.grid();
    // (x, y) sample, dominant phase, density, pressure
    let samples = [([0.5, 1.5], 0, 1.0, 1.0), ([3.0, 0.5], 1, 1.0, 0.1), ([3.0, 2.5], 2, 0.125, 0.1)];
    for (x, k, rho, p) in samples {
        let c = &w[grid.index((x[0] / grid.dx) as usize, (x[1] / grid.dy) as usize)];
        assert!(c.volume_fraction[k] > 0.99);
        assert!((c.density[k] - rho).abs() < 1e-12);
        assert!((c.pressure - p).abs() < 1e-12);
    }
}

#[test]
fn shock_bubble_post_shock_state() {
    let cfg = cases::shock_bubble();
    let mats = cfg.materials.clone();
    let w = cfg.initial_primitives().unwrap();
    let grid = cfg.grid();
    let post = &w[grid.index(grid.nx - 1, 0)];
    let pre = &w[grid.index(0, 0)];
    let t_post = post.mixture_temperature(&mats);
    assert!((t_post / 334.44 - 1.0).abs() < 5e-3, "{t_post}");
    // Rankine-Hugoniot mass balance gives the shock speed
    let (r0, r1, u1) = (pre.mixture_density(), post.mixture_density(), post.velocity[0]);
    let s = r1 * u1 / (r1 - r0);
    let mach = s.abs() / wood_sound_speed(pre, &mats);
    assert!((mach - 1.22).abs() < 0.01, "{mach}");
}

#[test]
fn laser_ablation_layers_share_temperature() {
    let cfg = cases::laser_ablation_1d();
    let mats = cfg.materials.clone();
    let w = cfg.initial_primitives().unwrap();
    let t0 = w[0].mixture_temperature(&mats);
    for c in &w {
        assert!((c.mixture_temperature(&mats) / t0 - 1.0).abs() < 1e-10);
    }
    assert!(cfg.physics.laser.is_some());
}

#[test]
fn triple_point_variants_toggle_stages() {
    let h = cases::triple_point(TripleVariant::H).physics;
    assert!(!h.viscous && !h.relax && !h.conduct);
    assert!(cases::triple_point(TripleVariant::HV).physics.viscous);
    let htr = cases::triple_point(TripleVariant::HTR).physics;
    assert!(htr.relax && !htr.conduct);
    let all = cases::triple_point(TripleVariant::HTRHC).physics;
    assert!(all.relax && all.conduct);
}
