//! Stiffened-gas thermodynamics and the mixture closures built on it.
//!
//! Each phase obeys `ρe = (p + γ p∞)/(γ − 1) + ρ w = ρ C_v T + p∞ + ρ w`.

use crate::error::{Error, Result};
use crate::roots::{expand_upper, newton_bisect, RootOptions};
use crate::state::{MaterialParams, PhaseArray, PrimitiveState, MAX_PHASES};

/// Thermodynamic state of one phase.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SgState {
    pub rho: f64,
    pub p: f64,
    pub e: f64,
    pub t: f64,
    pub a: f64,
}

impl SgState {
    pub fn from_rho_p(rho: f64, p: f64, mat: &MaterialParams) -> Result<Self> {
        Ok(Self {
            rho,
            p,
            e: sg_energy(rho, p, mat),
            t: sg_temperature(rho, p, mat),
            a: sg_sound_speed(rho, p, mat)?,
        })
    }
}

pub fn sg_pressure(rho: f64, e: f64, mat: &MaterialParams) -> Result<f64> {
    let p = (mat.gamma - 1.0) * rho * (e - mat.w) - mat.gamma * mat.p_inf;
    if !(p + mat.p_inf > 0.0) {
        return Err(Error::Thermodynamic(format!(
            "p + p_inf = {:e} for rho = {rho:e}, e = {e:e}",
            p + mat.p_inf
        )));
    }
    Ok(p)
}

#[inline]
pub fn sg_energy(rho: f64, p: f64, mat: &MaterialParams) -> f64 {
    (p + mat.gamma * mat.p_inf) / ((mat.gamma - 1.0) * rho) + mat.w
}

#[inline]
pub fn sg_temperature(rho: f64, p: f64, mat: &MaterialParams) -> f64 {
    (p + mat.p_inf) / ((mat.gamma - 1.0) * rho * mat.cv)
}

#[inline]
pub fn sg_density_from_pt(p: f64, t: f64, mat: &MaterialParams) -> f64 {
    (p + mat.p_inf) / ((mat.gamma - 1.0) * mat.cv * t)
}

/// Specific internal energy as a function of temperature and pressure.
#[inline]
pub fn sg_energy_from_pt(p: f64, t: f64, mat: &MaterialParams) -> f64 {
    mat.cv * t * (p + mat.gamma * mat.p_inf) / (p + mat.p_inf) + mat.w
}

pub fn sg_sound_speed(rho: f64, p: f64, mat: &MaterialParams) -> Result<f64> {
    let a2 = mat.gamma * (p + mat.p_inf) / rho;
    if !(a2 > 0.0) || !a2.is_finite() {
        return Err(Error::Thermodynamic(format!("a² = {a2:e} (rho = {rho:e}, p = {p:e})")));
    }
    Ok(a2.sqrt())
}

/// `ρ a² = γ (p + p∞)`; independent of the phase density.
#[inline]
pub fn phase_modulus(p: f64, mat: &MaterialParams) -> f64 {
    mat.gamma * (p + mat.p_inf)
}

/// Phase entropy with the additive constant set to zero.
#[inline]
pub fn sg_entropy(rho: f64, p: f64, mat: &MaterialParams) -> f64 {
    mat.cv * ((p + mat.p_inf).ln() - mat.gamma * rho.ln())
}

/// Pressure of a cell in mechanical equilibrium given partial densities,
/// mixture internal energy density and volume fractions.
pub fn mixture_pressure_allaire(m: &[f64], rho_e: f64, alpha: &[f64], mats: &[MaterialParams]) -> Result<f64> {
    let mut num = rho_e;
    let mut den = 0.0;
    for k in 0..mats.len() {
        let g1 = mats[k].gamma - 1.0;
        num -= alpha[k] * mats[k].gamma * mats[k].p_inf / g1 + m[k] * mats[k].w;
        den += alpha[k] / g1;
    }
    if !(den > 0.0) {
        return Err(Error::closure(format!("non-positive mixture denominator {den:e}")));
    }
    let p = num / den;
    for (k, mat) in mats.iter().enumerate() {
        if !(p + mat.p_inf > 0.0) {
            return Err(Error::Closure {
                cell: None,
                reason: format!("mixture pressure {p:e} violates p + p_inf,{k} > 0"),
            });
        }
    }
    Ok(p)
}

/// Solve `p_k(m_k/α_k, e_k) = p` for all k together with `Σ α_k = 1`.
pub fn solve_pressure_volume_fractions(
    m: &[f64],
    e: &[f64],
    mats: &[MaterialParams],
    guess: Option<f64>,
) -> Result<(f64, PhaseArray)> {
    let n = mats.len();
    let mut alpha = [0.0; MAX_PHASES];
    if n == 1 {
        alpha[0] = 1.0;
        return Ok((sg_pressure(m[0], e[0], &mats[0])?, alpha));
    }
    // α_k(p) = c_k / (p + γ_k p∞_k) with c_k = (γ_k − 1) m_k (e_k − w_k)
    let mut c = [0.0; MAX_PHASES];
    let mut offset = [0.0; MAX_PHASES];
    for k in 0..n {
        c[k] = (mats[k].gamma - 1.0) * m[k] * (e[k] - mats[k].w);
        offset[k] = mats[k].gamma * mats[k].p_inf;
        if !(c[k] > 0.0) {
            return Err(Error::closure(format!(
                "phase {k} has non-positive thermal energy (e - w = {:e})",
                e[k] - mats[k].w
            )));
        }
    }
    let p = saturation_root(&c[..n], &offset[..n], guess)?;
    for k in 0..n {
        alpha[k] = c[k] / (p + offset[k]);
    }
    Ok((p, alpha))
}

/// Unique `p > max_k(−o_k)` with `Σ_k c_k / (p + o_k) = 1` for positive `c_k`.
pub fn saturation_root(c: &[f64], offset: &[f64], guess: Option<f64>) -> Result<f64> {
    let n = c.len();
    let residual = |p: f64| -> (f64, f64) {
        let mut g = -1.0;
        let mut dg = 0.0;
        for k in 0..n {
            let a = c[k] / (p + offset[k]);
            g += a;
            dg -= a / (p + offset[k]);
        }
        (g, dg)
    };
    let p_floor = offset.iter().map(|o| -o).fold(f64::NEG_INFINITY, f64::max);
    let scale = offset.iter().map(|o| o.abs()).fold(0.0, f64::max).max(c.iter().sum::<f64>());
    let lo = p_floor + 1e-14 * scale.max(1e-300);
    if residual(lo).0 <= 0.0 {
        return Err(Error::closure(format!("saturation residual non-positive at the admissible floor {lo:e}")));
    }
    let start = guess.filter(|g| *g > lo).unwrap_or(lo + scale);
    let hi = expand_upper(|p| residual(p).0, lo, start, 1.0)?;
    let opts = RootOptions {
        rel_tol: 1e-14,
        abs_tol: 1e-15 * scale,
        max_iter: 200,
    };
    let p = newton_bisect(residual, lo, hi, start, opts)?;
    let sum: f64 = (0..n).map(|k| c[k] / (p + offset[k])).sum();
    if (sum - 1.0).abs() > 1e-12 {
        return Err(Error::closure(format!("saturation residual {:e}", sum - 1.0)));
    }
    Ok(p)
}

/// Harmonic volume-fraction average `1/A = Σ α_k / A_k`.
pub fn mixture_wood_modulus(alpha: &[f64], moduli: &[f64]) -> f64 {
    let inv: f64 = alpha.iter().zip(moduli).map(|(a, m)| a / m).sum();
    1.0 / inv
}

/// Wood modulus of a primitive state.
pub fn wood_modulus(w: &PrimitiveState, mats: &[MaterialParams]) -> f64 {
    let mut inv = 0.0;
    for (k, mat) in mats.iter().enumerate().take(w.nphase) {
        inv += w.volume_fraction[k] / phase_modulus(w.pressure, mat);
    }
    1.0 / inv
}

/// Mixture (Wood) sound speed `sqrt(A/ρ)`.
pub fn wood_sound_speed(w: &PrimitiveState, mats: &[MaterialParams]) -> f64 {
    (wood_modulus(w, mats) / w.mixture_density()).sqrt()
}

/// Entropy per unit volume `ρ s = Σ m_k s_k`.
pub fn mixture_entropy(w: &PrimitiveState, mats: &[MaterialParams]) -> f64 {
    (0..w.nphase)
        .map(|k| w.partial_density(k) * sg_entropy(w.density[k], w.pressure, &mats[k]))
        .sum()
}
