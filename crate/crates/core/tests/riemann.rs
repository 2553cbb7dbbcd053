use mpflow::cases;
use mpflow::convergence::{exact_solution, ExactSolution};
use mpflow::riemann::{exact_riemann, sample_solution, RiemannSide, Side, WaveKind};
use mpflow::state::MaterialParams;

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * b.abs().max(1e-300)
}

#[test]
fn sod_star_state() {
    let gas = MaterialParams::ideal("gas", 1.4, 1.0);
    let sol = exact_riemann(RiemannSide::new(1.0, 0.0, 1.0, &gas), RiemannSide::new(0.125, 0.0, 0.1, &gas)).unwrap();
    assert!(close(sol.p_star, 0.30313017805064682, 1e-12), "{}", sol.p_star);
    assert!(close(sol.u_star, 0.92745262004894995, 1e-12), "{}", sol.u_star);
    assert_eq!(sol.left_wave, WaveKind::Rarefaction);
    assert_eq!(sol.right_wave, WaveKind::Shock);
    // shock speed from the mass jump condition
    let s = sol.right_speeds.0;
    assert!(close(sol.rho_star_right * (sol.u_star - s), -0.125 * s, 1e-12));
}

#[test]
fn water_gas_star_state() {
    let cfg = cases::shock_tube_hydro();
    let Some(ExactSolution::Riemann { solution, x0, time }) = exact_solution(&cfg).unwrap() else {
        panic!("shock tube should have a Riemann solution");
    };
    assert!(close(x0, 0.7, 1e-12));
    assert_eq!(time, 2e-4);
    assert!(close(solution.left.rho, 628.7, 1e-3), "{}", solution.left.rho);
    assert!(close(solution.p_star, 61440502.88997, 1e-9), "{}", solution.p_star);
    assert!(close(solution.u_star, 1011.3887, 1e-6), "{}", solution.u_star);
    assert!((solution.right_speeds.0 - 1216.0).abs() < 1.0, "{}", solution.right_speeds.0);
}

#[test]
fn sampling_respects_wave_fan() {
    let gas = MaterialParams::ideal("gas", 1.4, 1.0);
    let sol = exact_riemann(RiemannSide::new(1.0, 0.0, 1.0, &gas), RiemannSide::new(0.125, 0.0, 0.1, &gas)).unwrap();
    let far_left = sample_solution(&sol, -10.0);
    assert_eq!((far_left.rho, far_left.p, far_left.side), (1.0, 1.0, Side::Left));
    let far_right = sample_solution(&sol, 10.0);
    assert_eq!((far_right.rho, far_right.p, far_right.side), (0.125, 0.1, Side::Right));
    let star = sample_solution(&sol, sol.u_star + 1e-6);
    assert_eq!(star.side, Side::Right);
    assert!(close(star.p, sol.p_star, 1e-12));
    // density decreases monotonically through the rarefaction
    let (head, tail) = sol.left_speeds;
    let mut prev = f64::INFINITY;
    for i in 0..=20 {
        let xi = head + (tail - head) * i as f64 / 20.0;
        let s = sample_solution(&sol, xi);
        assert!(s.rho <= prev + 1e-14);
        prev = s.rho;
    }
}

#[test]
fn mirror_symmetry() {
    let gas = MaterialParams::ideal("gas", 1.4, 1.0);
    let water = MaterialParams::stiffened("water", 4.4, 6e8, 1.0);
    let a = exact_riemann(RiemannSide::new(1000.0, 0.0, 1e9, &water), RiemannSide::new(1.0, 0.0, 1e5, &gas)).unwrap();
    let b = exact_riemann(RiemannSide::new(1.0, 0.0, 1e5, &gas), RiemannSide::new(1000.0, 0.0, 1e9, &water)).unwrap();
    assert!(close(a.p_star, b.p_star, 1e-10));
    assert!(close(a.u_star, -b.u_star, 1e-10));
}

#[test]
fn rejects_vacuum_input() {
    let gas = MaterialParams::ideal("gas", 1.4, 1.0);
    assert!(exact_riemann(RiemannSide::new(0.0, 0.0, 1.0, &gas), RiemannSide::new(1.0, 0.0, 1.0, &gas)).is_err());
}
