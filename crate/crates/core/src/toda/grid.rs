use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::TodaError;

/// Periodic `N_x × N_y` grid on the flat torus `[0, L_x) × [0, L_y)`.
///
/// Cells are indexed row-major, `cell = iy * nx + ix`, and sampled at the
/// node `(ix · L_x / N_x, iy · L_y / N_y)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TorusGrid {
    pub nx: usize,
    pub ny: usize,
    pub lx: f64,
    pub ly: f64,
}

impl TorusGrid {
    pub fn new(nx: usize, ny: usize, lx: f64, ly: f64) -> Result<Self, TodaError> {
        let g = TorusGrid { nx, ny, lx, ly };
        g.validate()?;
        Ok(g)
    }

    pub fn square(n: usize) -> Self {
        TorusGrid { nx: n, ny: n, lx: 1.0, ly: 1.0 }
    }

    pub fn validate(&self) -> Result<(), TodaError> {
        if self.nx < 4 || self.ny < 4 {
            return Err(TodaError::GridTooSmall { nx: self.nx, ny: self.ny });
        }
        if !(self.lx.is_finite() && self.lx > 0.0 && self.ly.is_finite() && self.ly > 0.0) {
            return Err(TodaError::BadPeriod);
        }
        Ok(())
    }

    pub fn cells(&self) -> usize {
        self.nx * self.ny
    }

    pub fn hx(&self) -> f64 {
        self.lx / self.nx as f64
    }

    pub fn hy(&self) -> f64 {
        self.ly / self.ny as f64
    }

    pub fn cell_area(&self) -> f64 {
        self.hx() * self.hy()
    }

    pub fn area(&self) -> f64 {
        self.lx * self.ly
    }

    pub fn index(&self, ix: usize, iy: usize) -> usize {
        iy * self.nx + ix
    }

    pub fn coords(&self, cell: usize) -> (usize, usize) {
        (cell % self.nx, cell / self.nx)
    }

    pub fn point(&self, cell: usize) -> (f64, f64) {
        let (ix, iy) = self.coords(cell);
        (ix as f64 * self.hx(), iy as f64 * self.hy())
    }

    fn east(&self, cell: usize) -> usize {
        let (ix, iy) = self.coords(cell);
        self.index((ix + 1) % self.nx, iy)
    }

    fn west(&self, cell: usize) -> usize {
        let (ix, iy) = self.coords(cell);
        self.index((ix + self.nx - 1) % self.nx, iy)
    }

    fn north(&self, cell: usize) -> usize {
        let (ix, iy) = self.coords(cell);
        self.index(ix, (iy + 1) % self.ny)
    }

    fn south(&self, cell: usize) -> usize {
        let (ix, iy) = self.coords(cell);
        self.index(ix, (iy + self.ny - 1) % self.ny)
    }

    /// Geometric 5-point Laplacian of a field with `dim` components per cell:
    /// `(Δ_h v)(p) = Σ_neighbours (v(p) − v(q)) / h²`, nonnegative spectrum.
    pub fn laplacian(&self, v: &[f64], dim: usize) -> Vec<f64> {
        let (ix2, iy2) = (1.0 / (self.hx() * self.hx()), 1.0 / (self.hy() * self.hy()));
        let mut out = vec![0.0; v.len()];
        for cell in 0..self.cells() {
            let (e, w, n, s) = (self.east(cell), self.west(cell), self.north(cell), self.south(cell));
            for k in 0..dim {
                let c = v[cell * dim + k];
                out[cell * dim + k] = (2.0 * c - v[e * dim + k] - v[w * dim + k]) * ix2
                    + (2.0 * c - v[n * dim + k] - v[s * dim + k]) * iy2;
            }
        }
        out
    }

    /// Forward differences `((v(p+e_x) − v(p))/h_x, (v(p+e_y) − v(p))/h_y)`
    /// for component `k`.
    pub fn forward_diff(&self, v: &[f64], dim: usize, cell: usize, k: usize) -> (f64, f64) {
        let c = v[cell * dim + k];
        (
            (v[self.east(cell) * dim + k] - c) / self.hx(),
            (v[self.north(cell) * dim + k] - c) / self.hy(),
        )
    }

    /// Shifts a field by `(sx, sy)` cells: `out(p) = v(p − s)`.
    pub fn translate(&self, v: &[f64], dim: usize, sx: usize, sy: usize) -> Vec<f64> {
        let mut out = vec![0.0; v.len()];
        for cell in 0..self.cells() {
            let (ix, iy) = self.coords(cell);
            let to = self.index((ix + sx) % self.nx, (iy + sy) % self.ny);
            out[to * dim..(to + 1) * dim].copy_from_slice(&v[cell * dim..(cell + 1) * dim]);
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Preset {
    /// `sin²(2πx/L_x)`, vanishing on the lines `x = 0` and `x = L_x/2`.
    Sin2x,
    Sin2y,
    Cosx,
    Cosy,
    /// `cos(2πx/L_x) cos(2πy/L_y)`.
    Cosxy,
}

impl Preset {
    pub fn eval(self, grid: &TorusGrid, x: f64, y: f64) -> f64 {
        let (u, v) = (2.0 * PI * x / grid.lx, 2.0 * PI * y / grid.ly);
        match self {
            Preset::Sin2x => u.sin().powi(2),
            Preset::Sin2y => v.sin().powi(2),
            Preset::Cosx => u.cos(),
            Preset::Cosy => v.cos(),
            Preset::Cosxy => u.cos() * v.cos(),
        }
    }
}

/// Samples `amplitude · preset + offset` at every node.
pub fn sample_preset(grid: &TorusGrid, preset: Preset, amplitude: f64, offset: f64) -> Vec<f64> {
    (0..grid.cells())
        .map(|cell| {
            let (x, y) = grid.point(cell);
            amplitude * preset.eval(grid, x, y) + offset
        })
        .collect()
}
