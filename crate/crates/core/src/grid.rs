//! Uniform Cartesian grids in one or two dimensions and cell fields with
//! ghost layers.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::state::{ConservedState, PrimitiveState};

/// Width of the ghost layer; covers the MUSCL stencil.
pub const GHOST: usize = 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundaryKind {
    Extrapolation,
    Periodic,
    Reflective,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Boundaries {
    pub x_lo: BoundaryKind,
    pub x_hi: BoundaryKind,
    #[serde(default = "default_extrapolation")]
    pub y_lo: BoundaryKind,
    #[serde(default = "default_extrapolation")]
    pub y_hi: BoundaryKind,
}

fn default_extrapolation() -> BoundaryKind {
    BoundaryKind::Extrapolation
}

impl Boundaries {
    pub fn uniform(kind: BoundaryKind) -> Self {
        Self {
            x_lo: kind,
            x_hi: kind,
            y_lo: kind,
            y_hi: kind,
        }
    }

    pub fn side(&self, axis: usize, high: bool) -> BoundaryKind {
        match (axis, high) {
            (0, false) => self.x_lo,
            (0, true) => self.x_hi,
            (_, false) => self.y_lo,
            (_, true) => self.y_hi,
        }
    }

    pub fn periodic(&self, axis: usize) -> bool {
        self.side(axis, false) == BoundaryKind::Periodic
    }

    pub fn validate(&self) -> Result<()> {
        let pairs = [(self.x_lo, self.x_hi), (self.y_lo, self.y_hi)];
        for (lo, hi) in pairs {
            if (lo == BoundaryKind::Periodic) != (hi == BoundaryKind::Periodic) {
                return Err(Error::Config("periodic boundaries must be paired".into()));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    pub nx: usize,
    /// 1 for one-dimensional grids.
    pub ny: usize,
    pub dx: f64,
    pub dy: f64,
    pub x0: f64,
    pub y0: f64,
}

impl Grid {
    pub fn new_1d(nx: usize, x0: f64, x1: f64) -> Self {
        Self {
            nx,
            ny: 1,
            dx: (x1 - x0) / nx as f64,
            dy: 1.0,
            x0,
            y0: 0.0,
        }
    }

    pub fn new_2d(nx: usize, ny: usize, lower: [f64; 2], upper: [f64; 2]) -> Self {
        Self {
            nx,
            ny,
            dx: (upper[0] - lower[0]) / nx as f64,
            dy: (upper[1] - lower[1]) / ny as f64,
            x0: lower[0],
            y0: lower[1],
        }
    }

    pub fn dim(&self) -> usize {
        if self.ny > 1 {
            2
        } else {
            1
        }
    }

    pub fn ncells(&self) -> usize {
        self.nx * self.ny
    }

    pub fn n(&self, axis: usize) -> usize {
        if axis == 0 {
            self.nx
        } else {
            self.ny
        }
    }

    pub fn spacing(&self, axis: usize) -> f64 {
        if axis == 0 {
            self.dx
        } else {
            self.dy
        }
    }

    pub fn cell_volume(&self) -> f64 {
        if self.dim() == 2 {
            self.dx * self.dy
        } else {
            self.dx
        }
    }

    pub fn cell_center(&self, i: usize, j: usize) -> [f64; 2] {
        let y = if self.dim() == 2 {
            self.y0 + (j as f64 + 0.5) * self.dy
        } else {
            0.0
        };
        [self.x0 + (i as f64 + 0.5) * self.dx, y]
    }

    /// Row-major interior index.
    #[inline]
    pub fn index(&self, i: usize, j: usize) -> usize {
        j * self.nx + i
    }

    pub fn validate(&self) -> Result<()> {
        if self.nx == 0 || self.ny == 0 {
            return Err(Error::Config("grid needs at least one cell per direction".into()));
        }
        if !(self.dx > 0.0) || !(self.dy > 0.0) {
            return Err(Error::Config("grid spacing must be positive".into()));
        }
        Ok(())
    }
}

/// Behaviour of a payload under mirroring across a wall normal to `axis`.
pub trait Reflect {
    fn reflect(&self, axis: usize) -> Self;
}

impl Reflect for f64 {
    fn reflect(&self, _axis: usize) -> Self {
        *self
    }
}

impl Reflect for [f64; 2] {
    fn reflect(&self, axis: usize) -> Self {
        let mut out = *self;
        out[axis] = -out[axis];
        out
    }
}

impl Reflect for ConservedState {
    fn reflect(&self, axis: usize) -> Self {
        self.reflected(axis)
    }
}

impl Reflect for PrimitiveState {
    fn reflect(&self, axis: usize) -> Self {
        let mut out = *self;
        out.velocity[axis] = -out.velocity[axis];
        out
    }
}

/// Cell payloads over the grid plus ghost layers. Ghost cells exist in y
/// only for two-dimensional grids.
#[derive(Debug, Clone, PartialEq)]
pub struct GridField<T> {
    pub grid: Grid,
    pub boundaries: Boundaries,
    gx: usize,
    gy: usize,
    stride: usize,
    data: Vec<T>,
}

impl<T: Copy> GridField<T> {
    pub fn new(grid: Grid, boundaries: Boundaries, fill: T) -> Self {
        let gx = GHOST;
        let gy = if grid.dim() == 2 { GHOST } else { 0 };
        let stride = grid.nx + 2 * gx;
        let rows = grid.ny + 2 * gy;
        Self {
            grid,
            boundaries,
            gx,
            gy,
            stride,
            data: vec![fill; stride * rows],
        }
    }

    pub fn from_interior(grid: Grid, boundaries: Boundaries, interior: &[T]) -> Self {
        assert_eq!(interior.len(), grid.ncells());
        let mut f = Self::new(grid, boundaries, interior[0]);
        for j in 0..grid.ny {
            for i in 0..grid.nx {
                *f.get_mut(i as isize, j as isize) = interior[grid.index(i, j)];
            }
        }
        f
    }

    #[inline]
    fn offset(&self, i: isize, j: isize) -> usize {
        let ii = (i + self.gx as isize) as usize;
        let jj = (j + self.gy as isize) as usize;
        jj * self.stride + ii
    }

    /// Cell `(i, j)` with ghost cells at negative or past-the-end indices.
    #[inline]
    pub fn get(&self, i: isize, j: isize) -> &T {
        &self.data[self.offset(i, j)]
    }

    #[inline]
    pub fn get_mut(&mut self, i: isize, j: isize) -> &mut T {
        let o = self.offset(i, j);
        &mut self.data[o]
    }

    #[inline]
    pub fn at(&self, i: usize, j: usize) -> &T {
        self.get(i as isize, j as isize)
    }

    /// Neighbour of `(i, j)` shifted by `s` along `axis`.
    #[inline]
    pub fn shifted(&self, i: usize, j: usize, axis: usize, s: isize) -> &T {
        if axis == 0 {
            self.get(i as isize + s, j as isize)
        } else {
            self.get(i as isize, j as isize + s)
        }
    }

    pub fn ghost_y(&self) -> usize {
        self.gy
    }

    pub fn interior(&self) -> Vec<T> {
        let mut out = Vec::with_capacity(self.grid.ncells());
        for j in 0..self.grid.ny {
            for i in 0..self.grid.nx {
                out.push(*self.at(i, j));
            }
        }
        out
    }

    pub fn set_interior(&mut self, values: &[T]) {
        assert_eq!(values.len(), self.grid.ncells());
        for j in 0..self.grid.ny {
            for i in 0..self.grid.nx {
                let v = values[self.grid.index(i, j)];
                *self.get_mut(i as isize, j as isize) = v;
            }
        }
    }

    /// Apply `f` to every stored cell, ghosts included.
    pub fn try_map<U: Copy, F>(&self, f: F) -> Result<GridField<U>>
    where
        F: Fn(&T) -> Result<U> + Sync,
        T: Sync,
        U: Send,
    {
        use rayon::prelude::*;
        let data = self.data.par_iter().map(&f).collect::<Result<Vec<U>>>()?;
        Ok(GridField {
            grid: self.grid,
            boundaries: self.boundaries,
            gx: self.gx,
            gy: self.gy,
            stride: self.stride,
            data,
        })
    }
}

impl<T: Copy + Reflect> GridField<T> {
    /// Populate ghost layers from interior values according to the
    /// boundary tags. x ghosts first, then y ghosts across the full padded
    /// width so that corners are defined.
    pub fn fill_ghosts(&mut self) {
        let (nx, ny) = (self.grid.nx as isize, self.grid.ny as isize);
        let g = GHOST as isize;
        for j in 0..ny {
            for s in 1..=g {
                let lo = match self.boundaries.x_lo {
                    BoundaryKind::Periodic => *self.get(nx - s, j),
                    BoundaryKind::Extrapolation => *self.get(0, j),
                    BoundaryKind::Reflective => self.get(s - 1, j).reflect(0),
                };
                let hi = match self.boundaries.x_hi {
                    BoundaryKind::Periodic => *self.get(s - 1, j),
                    BoundaryKind::Extrapolation => *self.get(nx - 1, j),
                    BoundaryKind::Reflective => self.get(nx - s, j).reflect(0),
                };
                *self.get_mut(-s, j) = lo;
                *self.get_mut(nx - 1 + s, j) = hi;
            }
        }
        if self.gy == 0 {
            return;
        }
        for i in -g..nx + g {
            for s in 1..=g {
                let lo = match self.boundaries.y_lo {
                    BoundaryKind::Periodic => *self.get(i, ny - s),
                    BoundaryKind::Extrapolation => *self.get(i, 0),
                    BoundaryKind::Reflective => self.get(i, s - 1).reflect(1),
                };
                let hi = match self.boundaries.y_hi {
                    BoundaryKind::Periodic => *self.get(i, s - 1),
                    BoundaryKind::Extrapolation => *self.get(i, ny - 1),
                    BoundaryKind::Reflective => self.get(i, ny - s).reflect(1),
                };
                *self.get_mut(i, -s) = lo;
                *self.get_mut(i, ny - 1 + s) = hi;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn periodic_ghosts_wrap() {
        let grid = Grid::new_1d(4, 0.0, 1.0);
        let mut f = GridField::from_interior(grid, Boundaries::uniform(BoundaryKind::Periodic), &[1.0, 2.0, 3.0, 4.0]);
        f.fill_ghosts();
        assert_eq!(*f.get(-1, 0), 4.0);
        assert_eq!(*f.get(-2, 0), 3.0);
        assert_eq!(*f.get(4, 0), 1.0);
        assert_eq!(*f.get(5, 0), 2.0);
    }

    #[test]
    fn extrapolation_copies_edge() {
        let grid = Grid::new_2d(3, 2, [0.0, 0.0], [3.0, 2.0]);
        let vals: Vec<f64> = (0..6).map(|v| v as f64).collect();
        let mut f = GridField::from_interior(grid, Boundaries::uniform(BoundaryKind::Extrapolation), &vals);
        f.fill_ghosts();
        assert_eq!(*f.get(-2, 1), 3.0);
        assert_eq!(*f.get(4, 0), 2.0);
        assert_eq!(*f.get(1, -2), 1.0);
        assert_eq!(*f.get(-1, 3), 3.0);
        assert_eq!(f.interior(), vals);
    }

    #[test]
    fn mixed_periodic_rejected() {
        let mut b = Boundaries::uniform(BoundaryKind::Extrapolation);
        b.x_lo = BoundaryKind::Periodic;
        assert!(b.validate().is_err());
    }

    #[test]
    fn spacing_and_centres() {
        let g = Grid::new_1d(10, 0.0, 1.0);
        assert!((g.dx - 0.1).abs() < 1e-15);
        assert_eq!(g.dim(), 1);
        assert!((g.cell_center(9, 0)[0] - 0.95).abs() < 1e-15);
    }
}
