//! Exact Riemann solver for two pure stiffened-gas fluids separated by a
//! contact. Reference solution only, never used in the flux path.

use crate::error::{Error, Result};
use crate::roots::{newton_bisect, RootOptions};
use crate::state::MaterialParams;

/// Pure-fluid state on one side of the discontinuity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RiemannSide {
    pub rho: f64,
    pub u: f64,
    pub p: f64,
    pub gamma: f64,
    pub p_inf: f64,
}

impl RiemannSide {
    pub fn new(rho: f64, u: f64, p: f64, mat: &MaterialParams) -> Self {
        Self {
            rho,
            u,
            p,
            gamma: mat.gamma,
            p_inf: mat.p_inf,
        }
    }

    fn shifted(&self, p: f64) -> f64 {
        p + self.p_inf
    }

    fn sound_speed(&self) -> f64 {
        (self.gamma * self.shifted(self.p) / self.rho).sqrt()
    }

    fn mirrored(&self) -> Self {
        Self { u: -self.u, ..*self }
    }

    /// Velocity jump function across the wave and its derivative in `p`.
    fn wave_function(&self, p: f64) -> (f64, f64) {
        let g = self.gamma;
        let pk = self.shifted(self.p);
        let ps = self.shifted(p);
        if ps > pk {
            let a = 2.0 / ((g + 1.0) * self.rho);
            let b = (g - 1.0) / (g + 1.0) * pk;
            let q = (a / (ps + b)).sqrt();
            let f = (ps - pk) * q;
            (f, q * (1.0 - 0.5 * (ps - pk) / (ps + b)))
        } else {
            let c = self.sound_speed();
            let ex = (g - 1.0) / (2.0 * g);
            let r = ps / pk;
            let f = 2.0 * c / (g - 1.0) * (r.powf(ex) - 1.0);
            (f, r.powf(-(g + 1.0) / (2.0 * g)) / (self.rho * c))
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WaveKind {
    Shock,
    Rarefaction,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RiemannSolution {
    pub left: RiemannSide,
    pub right: RiemannSide,
    pub p_star: f64,
    pub u_star: f64,
    pub rho_star_left: f64,
    pub rho_star_right: f64,
    pub left_wave: WaveKind,
    pub right_wave: WaveKind,
    /// Head and tail speeds of the left wave (equal for a shock).
    pub left_speeds: (f64, f64),
    pub right_speeds: (f64, f64),
}

/// Which fluid a sampled point belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RiemannPoint {
    pub rho: f64,
    pub u: f64,
    pub p: f64,
    pub side: Side,
}

fn star_density(side: &RiemannSide, p_star: f64) -> f64 {
    let g = side.gamma;
    let r = side.shifted(p_star) / side.shifted(side.p);
    if r > 1.0 {
        let q = (g - 1.0) / (g + 1.0);
        side.rho * (r + q) / (q * r + 1.0)
    } else {
        side.rho * r.powf(1.0 / g)
    }
}

/// Speeds of a left-facing wave; the right wave uses the mirrored problem.
fn left_wave_speeds(side: &RiemannSide, p_star: f64, u_star: f64, rho_star: f64) -> (WaveKind, (f64, f64)) {
    let g = side.gamma;
    let c = side.sound_speed();
    let r = side.shifted(p_star) / side.shifted(side.p);
    if r > 1.0 {
        let s = side.u - c * ((g + 1.0) / (2.0 * g) * r + (g - 1.0) / (2.0 * g)).sqrt();
        (WaveKind::Shock, (s, s))
    } else {
        let c_star = (g * side.shifted(p_star) / rho_star).sqrt();
        (WaveKind::Rarefaction, (side.u - c, u_star - c_star))
    }
}

pub fn exact_riemann(left: RiemannSide, right: RiemannSide) -> Result<RiemannSolution> {
    for s in [&left, &right] {
        if !(s.rho > 0.0) || !(s.shifted(s.p) > 0.0) || !(s.gamma > 1.0) {
            return Err(Error::Thermodynamic(format!("inadmissible Riemann data {s:?}")));
        }
    }
    let du = right.u - left.u;
    let residual = |p: f64| {
        let (fl, dl) = left.wave_function(p);
        let (fr, dr) = right.wave_function(p);
        (fl + fr + du, dl + dr)
    };

    let floor = (-left.p_inf).max(-right.p_inf);
    let scale = left.shifted(left.p).max(right.shifted(right.p));
    let lo = floor + 1e-14 * scale;
    if residual(lo).0 >= 0.0 {
        return Err(Error::Vacuum(format!(
            "pressure function is positive at its lower bound (du = {du:e})"
        )));
    }

    // two-rarefaction guess in shifted pressures about the common offset
    let guess = {
        let (cl, cr) = (left.sound_speed(), right.sound_speed());
        let z = 0.5 * ((left.gamma - 1.0) / left.gamma + (right.gamma - 1.0) / right.gamma);
        let num = cl + cr - 0.5 * (left.gamma - 1.0).max(right.gamma - 1.0) * du;
        let den = cl / left.shifted(left.p).powf(z) + cr / right.shifted(right.p).powf(z);
        let g = (num / den).max(0.0).powf(1.0 / z) - left.p_inf.max(right.p_inf);
        if g.is_finite() && g > lo {
            g
        } else {
            0.5 * (left.p + right.p).max(lo)
        }
    };

    let mut hi = guess.max(left.p).max(right.p).max(lo + scale);
    let mut expansions = 0;
    while residual(hi).0 <= 0.0 {
        hi = floor + 2.0 * (hi - floor);
        expansions += 1;
        if expansions > 200 {
            return Err(Error::NoBracket("Riemann pressure function never changes sign".into()));
        }
    }
    let opts = RootOptions {
        rel_tol: 1e-14,
        abs_tol: 0.0,
        max_iter: 200,
    };
    let p_star = newton_bisect(residual, lo, hi, guess.clamp(lo, hi), opts)?;
    let (fl, _) = left.wave_function(p_star);
    let (fr, _) = right.wave_function(p_star);
    let u_star = 0.5 * (left.u + right.u) + 0.5 * (fr - fl);

    let rho_star_left = star_density(&left, p_star);
    let rho_star_right = star_density(&right, p_star);
    let (left_wave, left_speeds) = left_wave_speeds(&left, p_star, u_star, rho_star_left);
    let (right_wave, (h, t)) = left_wave_speeds(&right.mirrored(), p_star, -u_star, rho_star_right);

    Ok(RiemannSolution {
        left,
        right,
        p_star,
        u_star,
        rho_star_left,
        rho_star_right,
        left_wave,
        right_wave,
        left_speeds,
        right_speeds: (-h, -t),
    })
}

/// Sample the self-similar solution at `xi = x/t` (relative to the initial
/// discontinuity).
pub fn sample_solution(sol: &RiemannSolution, xi: f64) -> RiemannPoint {
    if xi <= sol.u_star {
        sample_left(&sol.left, sol.p_star, sol.u_star, sol.rho_star_left, sol.left_speeds, xi, Side::Left)
    } else {
        let right = sol.right.mirrored();
        let (h, t) = sol.right_speeds;
        let pt = sample_left(&right, sol.p_star, -sol.u_star, sol.rho_star_right, (-h, -t), -xi, Side::Right);
        RiemannPoint { u: -pt.u, ..pt }
    }
}

fn sample_left(side: &RiemannSide, p_star: f64, u_star: f64, rho_star: f64, speeds: (f64, f64), xi: f64, tag: Side) -> RiemannPoint {
    let (head, tail) = speeds;
    let outer = RiemannPoint {
        rho: side.rho,
        u: side.u,
        p: side.p,
        side: tag,
    };
    let star = RiemannPoint {
        rho: rho_star,
        u: u_star,
        p: p_star,
        side: tag,
    };
    if xi <= head {
        return outer;
    }
    if xi >= tail {
        return star;
    }
    // inside the fan
    let g = side.gamma;
    let c = side.sound_speed();
    let base = 2.0 / (g + 1.0) + (g - 1.0) / ((g + 1.0) * c) * (side.u - xi);
    RiemannPoint {
        rho: side.rho * base.powf(2.0 / (g - 1.0)),
        u: 2.0 / (g + 1.0) * (c + 0.5 * (g - 1.0) * side.u + xi),
        p: side.shifted(side.p) * base.powf(2.0 * g / (g - 1.0)) - side.p_inf,
        side: tag,
    }
}

/// Sample on cell centres at time `t` with the discontinuity at `x0`.
pub fn sample_profile(sol: &RiemannSolution, centers: &[f64], x0: f64, t: f64) -> Vec<RiemannPoint> {
    centers
        .iter()
        .map(|x| {
            if t > 0.0 {
                sample_solution(sol, (x - x0) / t)
            } else if *x <= x0 {
                sample_solution(sol, f64::NEG_INFINITY)
            } else {
                sample_solution(sol, f64::INFINITY)
            }
        })
        .collect()
}
