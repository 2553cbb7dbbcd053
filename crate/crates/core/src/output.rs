//! Snapshot writers: CSV profiles for 1D runs and legacy VTK structured
//! points for 2D runs.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::error::Result;
use crate::grid::Grid;
use crate::state::{MaterialParams, PrimitiveState};

/// Strength of the Schlieren contrast.
pub const SCHLIEREN_CONTRAST: f64 = 10.0;

pub fn csv_header(nphase: usize) -> Vec<String> {
    let mut cols: Vec<String> = ["x", "rho", "u", "p", "T"].iter().map(|s| s.to_string()).collect();
    for prefix in ["rho", "alpha", "T"] {
        for k in 1..=nphase {
            cols.push(format!("{prefix}_{k}"));
        }
    }
    cols
}

/// CSV text of a 1D profile: `x, ρ, u, p, T` then `ρ_k`, `α_k`, `T_k`.
/// Values are written with 17 significant digits.
pub fn csv_1d(grid: &Grid, w: &[PrimitiveState], mats: &[MaterialParams]) -> String {
    let n = mats.len();
    let mut out = csv_header(n).join(",");
    out.push('\n');
    for (i, c) in w.iter().enumerate().take(grid.nx) {
        let mut row = vec![
            grid.cell_center(i, 0)[0],
            c.mixture_density(),
            c.velocity[0],
            c.pressure,
            c.mixture_temperature(mats),
        ];
        row.extend_from_slice(&c.density[..n]);
        row.extend_from_slice(&c.volume_fraction[..n]);
        row.extend_from_slice(&c.temperature[..n]);
        let line: Vec<String> = row.iter().map(|v| format!("{v:.16e}")).collect();
        out.push_str(&line.join(","));
        out.push('\n');
    }
    out
}

pub fn write_csv_1d(path: &Path, grid: &Grid, w: &[PrimitiveState], mats: &[MaterialParams]) -> Result<()> {
    fs::write(path, csv_1d(grid, w, mats))?;
    Ok(())
}

/// `exp(−c |∇ρ| / max |∇ρ|)` with central differences (one-sided at the
/// edges). Uniform density gives 1 everywhere.
pub fn schlieren(grid: &Grid, rho: &[f64]) -> Vec<f64> {
    let (nx, ny) = (grid.nx, grid.ny);
    let at = |i: usize, j: usize| rho[grid.index(i, j)];
    let diff = |lo: f64, hi: f64, span: f64| (hi - lo) / span;
    let mut grad = vec![0.0; rho.len()];
    for j in 0..ny {
        for i in 0..nx {
            let gx = if nx < 2 {
                0.0
            } else {
                let (a, b) = (i.saturating_sub(1), (i + 1).min(nx - 1));
                diff(at(a, j), at(b, j), (b - a) as f64 * grid.dx)
            };
            let gy = if ny < 2 {
                0.0
            } else {
                let (a, b) = (j.saturating_sub(1), (j + 1).min(ny - 1));
                diff(at(i, a), at(i, b), (b - a) as f64 * grid.dy)
            };
            grad[grid.index(i, j)] = gx.hypot(gy);
        }
    }
    let max = grad.iter().cloned().fold(0.0, f64::max);
    grad.iter()
        .map(|g| if max > 0.0 { (-SCHLIEREN_CONTRAST * g / max).exp() } else { 1.0 })
        .collect()
}

/// Legacy VTK structured points with cell data.
pub fn vtk_2d(grid: &Grid, w: &[PrimitiveState], mats: &[MaterialParams], title: &str) -> String {
    let n = mats.len();
    let ncell = grid.nx * grid.ny;
    let mut s = String::new();
    let _ = writeln!(s, "# vtk DataFile Version 3.0");
    let _ = writeln!(s, "{}", title.lines().next().unwrap_or("mpflow"));
    let _ = writeln!(s, "ASCII");
    let _ = writeln!(s, "DATASET STRUCTURED_POINTS");
    let _ = writeln!(s, "DIMENSIONS {} {} 1", grid.nx + 1, grid.ny + 1);
    let _ = writeln!(s, "ORIGIN {:e} {:e} 0", grid.x0, grid.y0);
    let _ = writeln!(s, "SPACING {:e} {:e} 1", grid.dx, grid.dy);
    let _ = writeln!(s, "CELL_DATA {ncell}");

    let rho: Vec<f64> = w.iter().map(|c| c.mixture_density()).collect();
    let mut scalars: Vec<(String, Vec<f64>)> = vec![
        ("rho".into(), rho.clone()),
        ("p".into(), w.iter().map(|c| c.pressure).collect()),
        ("T".into(), w.iter().map(|c| c.mixture_temperature(mats)).collect()),
        ("speed".into(), w.iter().map(|c| c.velocity[0].hypot(c.velocity[1])).collect()),
    ];
    for k in 0..n {
        scalars.push((format!("alpha_{}", k + 1), w.iter().map(|c| c.volume_fraction[k]).collect()));
    }
    scalars.push(("schlieren".into(), schlieren(grid, &rho)));

    for (name, values) in &scalars {
        let _ = writeln!(s, "SCALARS {name} double 1");
        let _ = writeln!(s, "LOOKUP_TABLE default");
        for v in values {
            let _ = writeln!(s, "{v:.16e}");
        }
    }
    let _ = writeln!(s, "VECTORS velocity double");
    for c in w {
        let _ = writeln!(s, "{:.16e} {:.16e} 0", c.velocity[0], c.velocity[1]);
    }
    s
}

pub fn write_vtk_2d(path: &Path, grid: &Grid, w: &[PrimitiveState], mats: &[MaterialParams], title: &str) -> Result<()> {
    fs::write(path, vtk_2d(grid, w, mats, title))?;
    Ok(())
}

/// One line per diagnostics record.
pub fn diagnostics_csv(records: &[crate::driver::DiagnosticsRecord], nphase: usize) -> String {
    let mut s = String::from("step,time,dt");
    for k in 1..=nphase {
        let _ = write!(s, ",mass_{k}");
    }
    s.push_str(",momentum_x,momentum_y,energy,p_min,p_max,T_min,T_max,alpha_min,alpha_max,saturation_error,entropy,t_hydro,t_viscous,t_relax,t_conduct\n");
    for r in records {
        let _ = write!(s, "{},{:.16e},{:.16e}", r.step, r.time, r.dt);
        for k in 0..nphase {
            let _ = write!(s, ",{:.16e}", r.mass[k]);
        }
        let vals = [
            r.momentum[0],
            r.momentum[1],
            r.energy,
            r.p_min,
            r.p_max,
            r.t_min,
            r.t_max,
            r.alpha_min,
            r.alpha_max,
            r.saturation_error,
            r.entropy,
            r.timings.hydro,
            r.timings.viscous,
            r.timings.relax,
            r.timings.conduct,
        ];
        for v in vals {
            let _ = write!(s, ",{v:.16e}");
        }
        s.push('\n');
    }
    s
}
