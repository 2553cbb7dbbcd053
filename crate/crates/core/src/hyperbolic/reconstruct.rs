//! Piecewise-linear reconstruction of primitive variables.

use serde::{Deserialize, Serialize};

use crate::state::{MaterialParams, PrimitiveState, MAX_PHASES};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Limiter {
    /// Piecewise-constant states.
    FirstOrder,
    #[default]
    Minmod,
    /// Minmod for everything except volume fractions, which use the
    /// compressive Overbee limiter `φ(r) = max(0, min(2r, 2))`.
    Overbee,
}

#[inline]
pub fn minmod(a: f64, b: f64) -> f64 {
    if a * b <= 0.0 {
        0.0
    } else if a > 0.0 {
        a.min(b)
    } else {
        a.max(b)
    }
}

/// Overbee slope: twice the minmod slope, so face values reach the
/// neighbouring cell averages.
#[inline]
pub fn overbee(a: f64, b: f64) -> f64 {
    2.0 * minmod(a, b)
}

/// Face states `(at i - 1/2, at i + 1/2)` of the middle cell of a
/// three-cell window.
pub fn muscl_reconstruct(
    wm: &PrimitiveState,
    w0: &PrimitiveState,
    wp: &PrimitiveState,
    limiter: Limiter,
    mats: &[MaterialParams],
) -> (PrimitiveState, PrimitiveState) {
    if limiter == Limiter::FirstOrder {
        return (*w0, *w0);
    }
    let n = w0.nphase;
    let mut lo = *w0;
    let mut hi = *w0;

    for k in 0..n {
        let s = minmod(w0.density[k] - wm.density[k], wp.density[k] - w0.density[k]);
        lo.density[k] -= 0.5 * s;
        hi.density[k] += 0.5 * s;
    }
    for d in 0..2 {
        let s = minmod(w0.velocity[d] - wm.velocity[d], wp.velocity[d] - w0.velocity[d]);
        lo.velocity[d] -= 0.5 * s;
        hi.velocity[d] += 0.5 * s;
    }
    let s = minmod(w0.pressure - wm.pressure, wp.pressure - w0.pressure);
    lo.pressure -= 0.5 * s;
    hi.pressure += 0.5 * s;

    if n > 1 {
        let alpha_slopes = limited_alpha_slopes(wm, w0, wp, limiter);
        for k in 0..n {
            lo.volume_fraction[k] = w0.volume_fraction[k] - 0.5 * alpha_slopes[k];
            hi.volume_fraction[k] = w0.volume_fraction[k] + 0.5 * alpha_slopes[k];
        }
        // the last fraction follows saturation exactly
        lo.volume_fraction[n - 1] = 1.0 - lo.volume_fraction[..n - 1].iter().sum::<f64>();
        hi.volume_fraction[n - 1] = 1.0 - hi.volume_fraction[..n - 1].iter().sum::<f64>();
    }

    let admissible = |w: &PrimitiveState| {
        (0..n).all(|k| {
            w.density[k] > 0.0
                && w.pressure + mats[k].p_inf > 0.0
                && (n == 1 || (w.volume_fraction[k] > 0.0 && w.volume_fraction[k] < 1.0))
        })
    };
    if !admissible(&lo) || !admissible(&hi) {
        return (*w0, *w0);
    }
    for w in [&mut lo, &mut hi] {
        for k in 0..n {
            w.temperature[k] = crate::eos::sg_temperature(w.density[k], w.pressure, &mats[k]);
            w.energy[k] = crate::eos::sg_energy(w.density[k], w.pressure, &mats[k]);
        }
    }
    (lo, hi)
}

/// Slopes for all N volume fractions. The first N−1 are limited
/// individually, the last one is minus their sum, and a common factor
/// scales the set back so that every face value stays within the range of
/// its three-cell stencil.
fn limited_alpha_slopes(wm: &PrimitiveState, w0: &PrimitiveState, wp: &PrimitiveState, limiter: Limiter) -> [f64; MAX_PHASES] {
    let n = w0.nphase;
    let mut s = [0.0; MAX_PHASES];
    for k in 0..n - 1 {
        let a = w0.volume_fraction[k] - wm.volume_fraction[k];
        let b = wp.volume_fraction[k] - w0.volume_fraction[k];
        s[k] = match limiter {
            Limiter::Overbee => overbee(a, b),
            _ => minmod(a, b),
        };
    }
    s[n - 1] = -s[..n - 1].iter().sum::<f64>();

    let mut theta: f64 = 1.0;
    for k in 0..n {
        let half = 0.5 * s[k].abs();
        if half == 0.0 {
            continue;
        }
        let a0 = w0.volume_fraction[k];
        let lo = wm.volume_fraction[k].min(a0).min(wp.volume_fraction[k]).max(0.0);
        let hi = wm.volume_fraction[k].max(a0).max(wp.volume_fraction[k]).min(1.0);
        let room = (hi - a0).min(a0 - lo).max(0.0);
        theta = theta.min(room / half);
    }
    for v in s.iter_mut().take(n) {
        *v *= theta;
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gas() -> MaterialParams {
        MaterialParams::ideal("g", 1.4, 1.0)
    }

    fn scalar_state(rho: f64) -> PrimitiveState {
        PrimitiveState::from_rho_p(&[rho], [0.0, 0.0], 1.0, &[1.0], &[gas()])
    }

    #[test]
    fn minmod_cases() {
        assert_eq!(minmod(1.0, 2.0), 1.0);
        assert_eq!(minmod(-1.0, -3.0), -1.0);
        assert_eq!(minmod(1.0, -1.0), 0.0);
        assert_eq!(overbee(1.0, 3.0), 2.0);
    }

    #[test]
    fn ramp_faces() {
        let (lo, hi) = muscl_reconstruct(&scalar_state(1.0), &scalar_state(2.0), &scalar_state(3.0), Limiter::Minmod, &[gas()]);
        assert_eq!(lo.density[0], 1.5);
        assert_eq!(hi.density[0], 2.5);
    }

    #[test]
    fn extremum_is_flat() {
        let (lo, hi) = muscl_reconstruct(&scalar_state(1.0), &scalar_state(2.0), &scalar_state(1.0), Limiter::Minmod, &[gas()]);
        assert_eq!(lo.density[0], 2.0);
        assert_eq!(hi.density[0], 2.0);
    }

    #[test]
    fn three_phase_faces_stay_bounded() {
        let mats = [gas(), gas(), gas()];
        let mk = |a: [f64; 3]| PrimitiveState::from_rho_p(&[1.0, 1.0, 1.0], [0.0, 0.0], 1.0, &a, &mats);
        let wm = mk([1e-6, 0.5, 0.5 - 1e-6]);
        let w0 = mk([0.5, 0.25, 0.25]);
        let wp = mk([1.0 - 2e-6, 1e-6, 1e-6]);
        for lim in [Limiter::Minmod, Limiter::Overbee] {
            let (lo, hi) = muscl_reconstruct(&wm, &w0, &wp, lim, &mats);
            for w in [lo, hi] {
                let sum: f64 = w.volume_fraction[..3].iter().sum();
                assert!((sum - 1.0).abs() < 1e-15);
                for k in 0..3 {
                    assert!(w.volume_fraction[k] > 0.0 && w.volume_fraction[k] < 1.0, "{lim:?} {:?}", w.volume_fraction);
                }
            }
        }
    }
}
