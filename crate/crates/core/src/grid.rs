#[allow(unused_imports)] // shadowed by inherent methods when std is linked
use num_traits::Float;
use alloc::vec::Vec;

use serde::Serialize;

use crate::error::{Error, Result};

/// Uniform grid `x0 + j·h`, `j = 0..n`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GridSpec {
    pub x0: f64,
    pub h: f64,
    pub n: usize,
}

impl GridSpec {
    pub fn new(x0: f64, h: f64, n: usize) -> Result<Self> {
        if !(h > 0.0) || !h.is_finite() || !x0.is_finite() {
            return Err(Error::InvalidDensity("grid step must be positive and finite"));
        }
        if n < 3 {
            return Err(Error::InvalidDensity("grid needs at least 3 points"));
        }
        Ok(Self { x0, h, n })
    }

    /// Smallest grid with step `h` whose nodes span `[lo, hi]`, with `lo` as
    /// the first node.
    pub fn covering(lo: f64, hi: f64, h: f64) -> Result<Self> {
        let n = ((hi - lo) / h).ceil() as usize + 1;
        Self::new(lo, h, n.max(3))
    }

    /// Like [`GridSpec::covering`] but with nodes on the lattice `h·Z`, which
    /// keeps independently built grids of the same step aligned.
    pub fn covering_aligned(lo: f64, hi: f64, h: f64) -> Result<Self> {
        let j0 = (lo / h).floor();
        let j1 = (hi / h).ceil();
        Self::new(j0 * h, h, (j1 - j0) as usize + 1)
    }

    #[inline]
    pub fn x(&self, j: usize) -> f64 {
        self.x0 + j as f64 * self.h
    }

    pub fn x_end(&self) -> f64 {
        self.x(self.n - 1)
    }

    pub fn nodes(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.n).map(move |j| self.x(j))
    }
}

/// Trapezoid weight (in units of `h`) of node `j` on an `n`-point grid.
#[inline]
pub(crate) fn trap_weight(j: usize, n: usize) -> f64 {
    if j == 0 || j + 1 == n {
        0.5
    } else {
        1.0
    }
}

/// Trapezoidal integral of uniformly spaced samples, summed left to right.
pub(crate) fn trapezoid(values: &[f64], h: f64) -> f64 {
    let n = values.len();
    let mut s = 0.0;
    for (j, v) in values.iter().enumerate() {
        s += trap_weight(j, n) * v;
    }
    s * h
}

/// Density sampled on a uniform grid.
///
/// Values are non-negative and finite; integrals use the trapezoidal rule with
/// the first and last nodes as the endpoints of the numeric support.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GridDensity {
    x0: f64,
    h: f64,
    values: Vec<f64>,
}

impl GridDensity {
    pub fn new(x0: f64, h: f64, values: Vec<f64>) -> Result<Self> {
        GridSpec::new(x0, h, values.len())?;
        if values.iter().any(|v| !v.is_finite() || *v < 0.0) {
            return Err(Error::InvalidDensity("values must be finite and non-negative"));
        }
        Ok(Self { x0, h, values })
    }

    /// Samples `f` on `spec`.
    pub fn from_fn(spec: GridSpec, f: impl Fn(f64) -> f64) -> Result<Self> {
        Self::new(spec.x0, spec.h, spec.nodes().map(f).collect())
    }

    /// Builds a density from numerically computed samples, flushing round-off
    /// negatives to zero.
    pub(crate) fn from_computed(x0: f64, h: f64, mut values: Vec<f64>) -> Result<Self> {
        for v in values.iter_mut() {
            if *v < 0.0 {
                *v = 0.0;
            }
        }
        Self::new(x0, h, values)
    }

    pub fn x0(&self) -> f64 {
        self.x0
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    #[inline]
    pub fn x(&self, j: usize) -> f64 {
        self.x0 + j as f64 * self.h
    }

    pub fn x_end(&self) -> f64 {
        self.x(self.len() - 1)
    }

    pub fn spec(&self) -> GridSpec {
        GridSpec {
            x0: self.x0,
            h: self.h,
            n: self.len(),
        }
    }

    pub fn trapezoid(&self) -> f64 {
        trapezoid(&self.values, self.h)
    }

    /// Trapezoidal quadrature weights `h·w_j`.
    pub fn weights(&self) -> impl Iterator<Item = f64> + '_ {
        let n = self.len();
        (0..n).map(move |j| trap_weight(j, n) * self.h)
    }

    /// Integral of `g(x)·p(x)` by the trapezoidal rule.
    pub fn integrate(&self, mut g: impl FnMut(f64, f64) -> f64) -> f64 {
        let n = self.len();
        let mut s = 0.0;
        for (j, &p) in self.values.iter().enumerate() {
            s += trap_weight(j, n) * g(self.x(j), p);
        }
        s * self.h
    }

    /// Rescales to unit trapezoidal mass. Densities already within rounding
    /// of unit mass are returned unchanged, so normalizing is idempotent.
    pub fn normalize(&self) -> Result<Self> {
        let mass = self.trapezoid();
        if !(mass > 0.0) || !mass.is_finite() {
            return Err(Error::InvalidDensity("integral must be positive and finite"));
        }
        if (mass - 1.0).abs() <= 1e-14 {
            return Ok(self.clone());
        }
        Ok(Self {
            x0: self.x0,
            h: self.h,
            values: self.values.iter().map(|v| v / mass).collect(),
        })
    }

    pub fn is_normalized(&self, tol: f64) -> bool {
        (self.trapezoid() - 1.0).abs() <= tol
    }

    /// Mean and variance (about the mean) of the normalized density.
    pub fn mean_variance(&self) -> (f64, f64) {
        let mass = self.trapezoid();
        let mean = self.integrate(|x, p| x * p) / mass;
        let var = self.integrate(|x, p| (x - mean) * (x - mean) * p) / mass;
        (mean, var)
    }

    /// Cumulative trapezoid at the nodes, starting from 0 at `x0`.
    pub fn cumulative(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.len());
        let mut acc = 0.0;
        out.push(0.0);
        for w in self.values.windows(2) {
            acc += 0.5 * self.h * (w[0] + w[1]);
            out.push(acc);
        }
        out
    }

    /// Integral of the piecewise-linear interpolant from `x0` to `x`.
    pub fn cdf_at(&self, x: f64) -> f64 {
        if x <= self.x0 {
            return 0.0;
        }
        let n = self.len();
        let u = (x - self.x0) / self.h;
        let j = u.floor() as usize;
        if j + 1 >= n {
            return self.trapezoid();
        }
        let mut acc = 0.0;
        for w in self.values[..=j].windows(2) {
            acc += 0.5 * self.h * (w[0] + w[1]);
        }
        let frac = u - j as f64;
        let p0 = self.values[j];
        let p1 = self.values[j + 1];
        acc + self.h * frac * (p0 + 0.5 * frac * (p1 - p0))
    }

    /// Linear interpolation, zero outside the grid.
    pub fn value_at(&self, x: f64) -> f64 {
        let u = (x - self.x0) / self.h;
        if u < 0.0 || u > (self.len() - 1) as f64 {
            return 0.0;
        }
        let j = (u.floor() as usize).min(self.len() - 2);
        let frac = u - j as f64;
        self.values[j] * (1.0 - frac) + self.values[j + 1] * frac
    }

    /// True when both densities live on the same nodes.
    pub fn same_grid(&self, other: &Self) -> bool {
        self.len() == other.len()
            && ((self.h - other.h).abs() <= 1e-12 * self.h)
            && ((self.x0 - other.x0).abs() <= 1e-9 * self.h)
    }

    /// Law of `−X`.
    pub fn reflect(&self) -> Self {
        let mut values = self.values.clone();
        values.reverse();
        Self {
            x0: -self.x_end(),
            h: self.h,
            values,
        }
    }

    /// Law of `α + βX` (β ≠ 0).
    pub fn affine(&self, alpha: f64, beta: f64) -> Result<Self> {
        if beta == 0.0 || !beta.is_finite() || !alpha.is_finite() {
            return Err(Error::DomainError("affine map needs finite alpha and nonzero beta"));
        }
        let scale = 1.0 / beta.abs();
        let mut values: Vec<f64> = self.values.iter().map(|v| v * scale).collect();
        let x0 = if beta > 0.0 {
            alpha + beta * self.x0
        } else {
            values.reverse();
            alpha + beta * self.x_end()
        };
        Ok(Self {
            x0,
            h: self.h * beta.abs(),
            values,
        })
    }

    /// Restriction to nodes `j0..=j1`.
    pub(crate) fn slice(&self, j0: usize, j1: usize) -> Result<Self> {
        Self::new(self.x(j0), self.h, self.values[j0..=j1].to_vec())
    }
}
