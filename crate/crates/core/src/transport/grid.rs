use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::error::{invalid, Result};

/// A periodic `n × n` grid on `[-L/2, L/2)²`; `n` is a power of two.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Grid {
    pub n: usize,
    pub l: f64,
}

impl Grid {
    pub fn new(n: usize, l: f64) -> Result<Self> {
        if n < 4 || !n.is_power_of_two() {
            return Err(invalid(format!("grid size must be a power of two >= 4, got {n}")));
        }
        if !(l > 0.0 && l.is_finite()) {
            return Err(invalid(format!("box side must be positive, got {l}")));
        }
        Ok(Grid { n, l })
    }

    pub fn h(&self) -> f64 {
        self.l / self.n as f64
    }

    /// Coordinate of node `j` along either axis.
    pub fn coord(&self, j: usize) -> f64 {
        -0.5 * self.l + self.h() * j as f64
    }

    /// Angular wavenumber of FFT index `j`; the Nyquist index maps to `−πn/L`.
    pub fn wavenumber(&self, j: usize) -> f64 {
        let m = if j < self.n / 2 { j as f64 } else { j as f64 - self.n as f64 };
        2.0 * PI / self.l * m
    }

    /// Cell area `h²`.
    pub fn cell(&self) -> f64 {
        self.h() * self.h()
    }

    pub fn len(&self) -> usize {
        self.n * self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    /// Node coordinates `(x, y)` of flat index `k = iy·n + ix`.
    pub fn point(&self, k: usize) -> (f64, f64) {
        (self.coord(k % self.n), self.coord(k / self.n))
    }
}

/// Samples of a scalar on a [`Grid`], row-major with `y` as the row index.
#[derive(Clone, Debug, PartialEq)]
pub struct ScalarField2D {
    pub grid: Grid,
    pub values: Vec<f64>,
    /// Radius of a disk centred at the origin known to contain the support.
    pub support_radius: Option<f64>,
}

impl ScalarField2D {
    pub fn zeros(grid: Grid) -> Self {
        ScalarField2D { grid, values: vec![0.0; grid.len()], support_radius: None }
    }

    pub fn from_fn(grid: Grid, f: impl Fn(f64, f64) -> f64) -> Self {
        let values = (0..grid.len()).map(|k| {
            let (x, y) = grid.point(k);
            f(x, y)
        });
        ScalarField2D { grid, values: values.collect(), support_radius: None }
    }

    pub fn from_values(grid: Grid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(invalid(format!("expected {} samples, got {}", grid.len(), values.len())));
        }
        Ok(ScalarField2D { grid, values, support_radius: None })
    }

    pub fn at(&self, ix: usize, iy: usize) -> f64 {
        self.values[iy * self.grid.n + ix]
    }

    /// `∫ f` by the periodic trapezoid rule.
    pub fn integral(&self) -> f64 {
        self.values.iter().sum::<f64>() * self.grid.cell()
    }

    pub fn mean(&self) -> f64 {
        self.values.iter().sum::<f64>() / self.values.len() as f64
    }

    pub fn sup(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// `(∫ |f|²)^{1/2}`.
    pub fn l2(&self) -> f64 {
        (self.values.iter().map(|v| v * v).sum::<f64>() * self.grid.cell()).sqrt()
    }

    /// `L²` distance to another field on the same grid.
    pub fn l2_distance(&self, other: &ScalarField2D) -> Result<f64> {
        if self.grid != other.grid {
            return Err(invalid("fields live on different grids"));
        }
        Ok((self.values.iter().zip(&other.values).map(|(a, b)| (a - b).powi(2)).sum::<f64>() * self.grid.cell())
            .sqrt())
    }

    pub fn add(&self, other: &ScalarField2D) -> Result<ScalarField2D> {
        if self.grid != other.grid {
            return Err(invalid("fields live on different grids"));
        }
        let values = self.values.iter().zip(&other.values).map(|(a, b)| a + b).collect();
        Ok(ScalarField2D { grid: self.grid, values, support_radius: None })
    }
}

/// Time tag of a velocity sample.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum TimeTag {
    Steady,
    At(f64),
}

/// Two velocity components on a [`Grid`].
#[derive(Clone, Debug, PartialEq)]
pub struct VectorField2D {
    pub grid: Grid,
    pub ux: Vec<f64>,
    pub uy: Vec<f64>,
    pub time: TimeTag,
    /// Set when the field is divergence free by construction.
    pub div_free: bool,
}

impl VectorField2D {
    pub fn zeros(grid: Grid) -> Self {
        VectorField2D { grid, ux: vec![0.0; grid.len()], uy: vec![0.0; grid.len()], time: TimeTag::Steady, div_free: true }
    }

    pub fn from_fn(grid: Grid, f: impl Fn(f64, f64) -> [f64; 2]) -> Self {
        let (mut ux, mut uy) = (Vec::with_capacity(grid.len()), Vec::with_capacity(grid.len()));
        for k in 0..grid.len() {
            let (x, y) = grid.point(k);
            let u = f(x, y);
            ux.push(u[0]);
            uy.push(u[1]);
        }
        VectorField2D { grid, ux, uy, time: TimeTag::Steady, div_free: false }
    }

    /// `max |u|`.
    pub fn sup(&self) -> f64 {
        self.ux.iter().zip(&self.uy).map(|(a, b)| a.hypot(*b)).fold(0.0, f64::max)
    }
}

/// Row-then-column complex FFTs of size `n × n`.
pub struct Fft2 {
    n: usize,
    fwd: Arc<dyn Fft<f64>>,
    inv: Arc<dyn Fft<f64>>,
}

impl Fft2 {
    pub fn new(n: usize) -> Self {
        let mut p = FftPlanner::new();
        Fft2 { n, fwd: p.plan_fft_forward(n), inv: p.plan_fft_inverse(n) }
    }

    fn run(&self, data: &mut [Complex64], plan: &Arc<dyn Fft<f64>>) {
        let n = self.n;
        plan.process(data);
        let mut col = vec![Complex64::new(0.0, 0.0); n];
        for ix in 0..n {
            for iy in 0..n {
                col[iy] = data[iy * n + ix];
            }
            plan.process(&mut col);
            for iy in 0..n {
                data[iy * n + ix] = col[iy];
            }
        }
    }

    /// Unnormalized forward transform.
    pub fn forward(&self, real: &[f64]) -> Vec<Complex64> {
        let mut d: Vec<Complex64> = real.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        self.run(&mut d, &self.fwd);
        d
    }

    /// Inverse transform divided by `n²`, real part.
    pub fn inverse_real(&self, mut spec: Vec<Complex64>) -> Vec<f64> {
        self.run(&mut spec, &self.inv);
        let s = 1.0 / (self.n * self.n) as f64;
        spec.into_iter().map(|c| c.re * s).collect()
    }
}

/// Spectral partial derivatives `(∂x f, ∂y f)`; Nyquist modes are dropped.
pub fn spectral_gradient(f: &ScalarField2D) -> (Vec<f64>, Vec<f64>) {
    let g = f.grid;
    let fft = Fft2::new(g.n);
    let spec = fft.forward(&f.values);
    let mut dx = spec.clone();
    let mut dy = spec;
    for iy in 0..g.n {
        for ix in 0..g.n {
            let k = iy * g.n + ix;
            let kx = if ix == g.n / 2 { 0.0 } else { g.wavenumber(ix) };
            let ky = if iy == g.n / 2 { 0.0 } else { g.wavenumber(iy) };
            dx[k] *= Complex64::new(0.0, kx);
            dy[k] *= Complex64::new(0.0, ky);
        }
    }
    (fft.inverse_real(dx), fft.inverse_real(dy))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_validation() {
        assert!(Grid::new(100, 1.0).is_err());
        assert!(Grid::new(64, 0.0).is_err());
        let g = Grid::new(8, 2.0).unwrap();
        assert_eq!(g.coord(0), -1.0);
        assert_eq!(g.wavenumber(5), -3.0 * PI);
    }

    #[test]
    fn fft_roundtrip_and_derivative() {
        let g = Grid::new(32, 2.0 * PI).unwrap();
        let f = ScalarField2D::from_fn(g, |x, y| (2.0 * x).sin() * y.cos());
        let fft = Fft2::new(32);
        let back = fft.inverse_real(fft.forward(&f.values));
        assert!(back.iter().zip(&f.values).all(|(a, b)| (a - b).abs() < 1e-13));
        let (dx, dy) = spectral_gradient(&f);
        for k in 0..g.len() {
            let (x, y) = g.point(k);
            assert!((dx[k] - 2.0 * (2.0 * x).cos() * y.cos()).abs() < 1e-12);
            assert!((dy[k] + (2.0 * x).sin() * y.sin()).abs() < 1e-12);
        }
    }
}
