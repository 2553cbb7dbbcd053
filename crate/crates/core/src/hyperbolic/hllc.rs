//! HLLC flux for the single-velocity, single-pressure mixture system.

use crate::eos;
use crate::error::{Error, Result};
use crate::state::{ConservedState, MaterialParams, PhaseArray, PrimitiveState, MAX_PHASES};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HllcBreakdown {
    pub s_left: f64,
    pub s_star: f64,
    pub s_right: f64,
    pub star_left: ConservedState,
    pub star_right: ConservedState,
    /// Flux of (m_k, ρu, ρE); the volume-fraction entries hold `α_face S*`.
    pub flux: ConservedState,
    /// Upwinded face volume fractions.
    pub alpha_face: PhaseArray,
}

struct Side {
    rho: f64,
    un: f64,
    p: f64,
    a: f64,
    u: ConservedState,
}

fn side(w: &PrimitiveState, mats: &[MaterialParams], axis: usize) -> Side {
    let u = crate::state::conserved_from_primitive(w, mats);
    Side {
        rho: u.density(),
        un: w.velocity[axis],
        p: w.pressure,
        a: eos::wood_sound_speed(w, mats),
        u,
    }
}

fn physical_flux(s: &Side, axis: usize) -> ConservedState {
    let mut f = ConservedState::zero(s.u.nphase);
    for k in 0..s.u.nphase {
        f.partial_density[k] = s.u.partial_density[k] * s.un;
    }
    for d in 0..2 {
        f.momentum[d] = s.u.momentum[d] * s.un;
    }
    f.momentum[axis] += s.p;
    f.total_energy = (s.u.total_energy + s.p) * s.un;
    f
}

fn star_state(s: &Side, s_k: f64, s_star: f64, axis: usize) -> ConservedState {
    let chi = (s_k - s.un) / (s_k - s_star);
    let mut out = ConservedState::zero(s.u.nphase);
    for k in 0..s.u.nphase {
        out.partial_density[k] = chi * s.u.partial_density[k];
    }
    for d in 0..2 {
        out.momentum[d] = chi * s.u.momentum[d];
    }
    out.momentum[axis] = chi * s.rho * s_star;
    out.total_energy = chi * (s.u.total_energy + (s_star - s.un) * (s.rho * s_star + s.p / (s_k - s.un)));
    out
}

/// Face flux between `wl` and `wr` along `axis` (0 = x, 1 = y).
pub fn hllc_flux(wl: &PrimitiveState, wr: &PrimitiveState, mats: &[MaterialParams], axis: usize) -> Result<HllcBreakdown> {
    let n = wl.nphase;
    let l = side(wl, mats, axis);
    let r = side(wr, mats, axis);
    let s_left = (l.un - l.a).min(r.un - r.a);
    let s_right = (l.un + l.a).max(r.un + r.a);
    if !(s_left < s_right) {
        return Err(Error::DegenerateWaves(format!("S_L = {s_left:e} >= S_R = {s_right:e}")));
    }
    let ml = l.rho * (s_left - l.un);
    let mr = r.rho * (s_right - r.un);
    let den = ml - mr;
    if !(den.abs() > 0.0) || !den.is_finite() {
        return Err(Error::DegenerateWaves("zero HLLC contact denominator".into()));
    }
    let s_star = (r.p - l.p + ml * l.un - mr * r.un) / den;

    let star_left = star_state(&l, s_left, s_star, axis);
    let star_right = star_state(&r, s_right, s_star, axis);
    let fl = physical_flux(&l, axis);
    let fr = physical_flux(&r, axis);

    let mut flux = if s_left >= 0.0 {
        fl
    } else if s_right <= 0.0 {
        fr
    } else {
        let from_left = ConservedState::combine(1.0, &fl, s_left, &ConservedState::combine(1.0, &star_left, -1.0, &l.u));
        let from_right = ConservedState::combine(1.0, &fr, s_right, &ConservedState::combine(1.0, &star_right, -1.0, &r.u));
        if s_star > 0.0 {
            from_left
        } else if s_star < 0.0 {
            from_right
        } else {
            ConservedState::combine(0.5, &from_left, 0.5, &from_right)
        }
    };

    let mut alpha_face = [0.0; MAX_PHASES];
    for k in 0..n {
        alpha_face[k] = if s_star > 0.0 {
            wl.volume_fraction[k]
        } else if s_star < 0.0 {
            wr.volume_fraction[k]
        } else {
            0.5 * (wl.volume_fraction[k] + wr.volume_fraction[k])
        };
    }
    flux.volume_fraction = [0.0; MAX_PHASES];
    for k in 0..n.saturating_sub(1) {
        flux.volume_fraction[k] = alpha_face[k] * s_star;
    }
    if !flux.is_finite() {
        return Err(Error::NonFinite(format!("HLLC flux between p = {:e} and p = {:e}", wl.pressure, wr.pressure)));
    }
    Ok(HllcBreakdown {
        s_left,
        s_star,
        s_right,
        star_left,
        star_right,
        flux,
        alpha_face,
    })
}
