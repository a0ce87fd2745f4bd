//! Array geometry: VURA steering vectors and the sinc spatial-correlation
//! model over the same rectangular grid.
//!
//! Element `(iy, iz)` of a `K_y × K_z` array sits at flat index
//! `iy * K_z + iz`, matching the Kronecker ordering `a_y ⊗ a_z`.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use serde::{Deserialize, Serialize};

use super::{ChannelError, Complex64};

/// Rectangular element layout in the y-z plane.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ArrayGrid {
    pub k_y: usize,
    pub k_z: usize,
}

impl ArrayGrid {
    pub fn new(k_y: usize, k_z: usize) -> Self {
        Self { k_y, k_z }
    }

    /// Most-square factorization: `K_y` is the largest divisor of `n` not
    /// exceeding `√n`, `K_z = n / K_y`. `n = 0` gives an empty `1 × 0` grid.
    pub fn factorize(n: usize) -> Self {
        if n == 0 {
            return Self { k_y: 1, k_z: 0 };
        }
        let k_y = (1..=n.isqrt()).rev().find(|d| n.is_multiple_of(*d)).unwrap_or(1);
        Self { k_y, k_z: n / k_y }
    }

    pub fn len(&self) -> usize {
        self.k_y * self.k_z
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// `(y, z)` position of flat index `i`, in units of element spacing.
    pub fn position(&self, i: usize) -> (f64, f64) {
        ((i / self.k_z) as f64, (i % self.k_z) as f64)
    }
}

/// Normalized sinc, `sin(πx) / (πx)` with `sinc(0) = 1`.
pub fn sinc(x: f64) -> f64 {
    if x.abs() < 1e-12 {
        1.0
    } else {
        let px = PI * x;
        px.sin() / px
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SteeringSpec {
    pub k_y: usize,
    pub k_z: usize,
    /// Element spacing in wavelengths.
    pub lambda: f64,
    pub theta_deg: f64,
    pub omega_deg: f64,
}

impl SteeringSpec {
    pub fn on_grid(grid: ArrayGrid, lambda: f64, theta_deg: f64, omega_deg: f64) -> Self {
        Self { k_y: grid.k_y, k_z: grid.k_z, lambda, theta_deg, omega_deg }
    }

    pub fn grid(&self) -> ArrayGrid {
        ArrayGrid::new(self.k_y, self.k_z)
    }

    pub fn validate(&self) -> Result<(), ChannelError> {
        if self.k_y == 0 || self.k_z == 0 {
            return Err(ChannelError::InvalidParameter(format!(
                "steering grid must be at least 1x1, got {}x{}",
                self.k_y, self.k_z
            )));
        }
        if !(self.lambda > 0.0 && self.lambda.is_finite()) {
            return Err(ChannelError::InvalidParameter(format!(
                "element spacing must be positive, got {}",
                self.lambda
            )));
        }
        if !self.theta_deg.is_finite() || !self.omega_deg.is_finite() {
            return Err(ChannelError::InvalidParameter("steering angles must be finite".into()));
        }
        Ok(())
    }
}

/// VURA response `a = a_y ⊗ a_z` where `a_y` progresses by
/// `2πλ sinθ sinω` per element and `a_z` by `2πλ cosθ`.
pub fn steering_vector(spec: &SteeringSpec) -> Result<DVector<Complex64>, ChannelError> {
    spec.validate()?;
    let theta = spec.theta_deg.to_radians();
    let omega = spec.omega_deg.to_radians();
    let step_y = 2.0 * PI * spec.lambda * theta.sin() * omega.sin();
    let step_z = 2.0 * PI * spec.lambda * theta.cos();
    let grid = spec.grid();
    Ok(DVector::from_fn(grid.len(), |i, _| {
        let (y, z) = grid.position(i);
        Complex64::from_polar(1.0, step_y * y + step_z * z)
    }))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CorrelationSpec {
    pub grid: ArrayGrid,
    /// Element spacing in wavelengths.
    pub lambda: f64,
}

impl CorrelationSpec {
    pub fn new(grid: ArrayGrid, lambda: f64) -> Self {
        Self { grid, lambda }
    }

    /// Nearest-neighbour correlation `d_r = sinc(2λ)`.
    pub fn nearest_neighbour(&self) -> f64 {
        sinc(2.0 * self.lambda)
    }

    /// `R_ij = sinc(2λ·g_ij)` before any PSD repair.
    pub fn raw_matrix(&self) -> DMatrix<f64> {
        let n = self.grid.len();
        DMatrix::from_fn(n, n, |i, j| {
            if i == j {
                return 1.0;
            }
            let (yi, zi) = self.grid.position(i);
            let (yj, zj) = self.grid.position(j);
            let dist = ((yi - yj).powi(2) + (zi - zj).powi(2)).sqrt();
            sinc(2.0 * self.lambda * dist)
        })
    }
}

/// Sinc correlation matrix for an `n`-element array, with negative
/// eigenvalues floored at zero.
pub fn correlation_matrix(spec: &CorrelationSpec, n: usize) -> Result<DMatrix<f64>, ChannelError> {
    if spec.grid.len() != n {
        return Err(ChannelError::DimensionMismatch(format!(
            "correlation grid {}x{} has {} elements, expected {n}",
            spec.grid.k_y,
            spec.grid.k_z,
            spec.grid.len()
        )));
    }
    if !(spec.lambda > 0.0 && spec.lambda.is_finite()) {
        return Err(ChannelError::InvalidParameter(format!(
            "element spacing must be positive, got {}",
            spec.lambda
        )));
    }
    let raw = spec.raw_matrix();
    if n == 0 {
        return Ok(raw);
    }
    let eig = SymmetricEigen::new(raw);
    let floored = eig.eigenvalues.map(|v| v.max(0.0));
    let v = &eig.eigenvectors;
    Ok(v * DMatrix::from_diagonal(&floored) * v.transpose())
}

/// Symmetric square root `R^{1/2}` via eigendecomposition. Eigenvalues within
/// `1e-9 · max|λ|` below zero are treated as rounding noise.
pub fn psd_sqrt(r: &DMatrix<f64>) -> Result<DMatrix<f64>, ChannelError> {
    if r.nrows() != r.ncols() {
        return Err(ChannelError::DimensionMismatch(format!(
            "correlation matrix must be square, got {}x{}",
            r.nrows(),
            r.ncols()
        )));
    }
    if r.nrows() == 0 {
        return Ok(r.clone());
    }
    let eig = SymmetricEigen::new(r.clone());
    let scale = eig.eigenvalues.iter().fold(0.0f64, |m, v| m.max(v.abs())).max(1.0);
    if let Some(bad) = eig.eigenvalues.iter().find(|&&v| v < -1e-9 * scale) {
        return Err(ChannelError::NotPositiveSemidefinite(*bad));
    }
    let roots = eig.eigenvalues.map(|v| v.max(0.0).sqrt());
    let v = &eig.eigenvectors;
    Ok(v * DMatrix::from_diagonal(&roots) * v.transpose())
}
