//! Saddle-point (contour-shifted) inversion of `e^{−σ²t²/2} f(t)`.
//!
//! Moving the inversion contour to `Im t = y` gives
//!
//! ```text
//! p⁽ᵏ⁾(x) = e^{yx} e^{σ²y²/2} f(iy) · I_k(x, y),
//! I_k = (1/2π) ∫ (−i(t+iy))ᵏ R(t) dt,
//! R(t) = f(t+iy)/f(iy) · e^{−it(x+σ²y) − σ²t²/2},
//! ```
//!
//! and choosing `y` as the root of `d/dy log f(iy) + σ²y = −x` removes the
//! linear phase from `R`, so the integral has no cancellation to fight.

#[allow(unused_imports)] // shadowed by inherent methods when std is linked
use num_traits::Float;
use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;

use crate::charfn::CharFn;
use crate::error::{Error, Result};
use crate::grid::{GridDensity, GridSpec};

pub const MAX_ITERATIONS: usize = 200;
/// Allowed refinement disagreement of the contour integral, relative to the
/// integral of `|R|`.
pub const QUADRATURE_TOL: f64 = 1e-7;
/// Largest density value tolerated at the edge of an FFT window, times the
/// period length.
pub const ALIASING_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SaddleSolution {
    pub x: f64,
    pub y: f64,
    pub residual: f64,
    pub tilted_variance: f64,
    pub log_f: f64,
    pub iterations: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct InversionResult {
    pub x: f64,
    pub k: u32,
    pub value: f64,
    pub i_k: Complex64,
    /// `yx + σ²y²/2 + log f(iy)`
    pub log_prefactor: f64,
    pub quadrature_error: f64,
    /// Bound on the neglected `|t| > L` part of the integral, relative.
    pub tail_bound: f64,
    pub saddle: SaddleSolution,
}

fn residual_tol(x: f64) -> f64 {
    1e-10 * (1.0 + x.abs())
}

/// Root `y(x)` of `d/dy log f(iy) + σ²y + x = 0`.
///
/// Newton steps on the strictly increasing left side, guarded by a bracket
/// and falling back to bisection when a step leaves it.
pub fn solve_saddle(cf: &CharFn, sigma: f64, x: f64) -> Result<SaddleSolution> {
    if !(sigma >= 0.0) || !sigma.is_finite() || !x.is_finite() {
        return Err(Error::DomainError("sigma must be non-negative and x finite"));
    }
    let s2 = sigma * sigma;
    let g = |y: f64| {
        let l = cf.log_eval_imag(y);
        (l.dlog + s2 * y + x, l)
    };
    let done = |y: f64, r: f64, l: crate::charfn::LogImag, it: usize| SaddleSolution {
        x,
        y,
        residual: r,
        tilted_variance: l.d2log,
        log_f: l.log_f,
        iterations: it,
    };

    let (g0, l0) = g(0.0);
    if g0 == 0.0 {
        return Ok(done(0.0, 0.0, l0, 0));
    }
    let (dom_lo, dom_hi) = cf.tilt_domain();
    let mut width = if s2 > 0.0 { x.abs() / s2 + 1.0 } else { 1.0 + x.abs() };
    let (mut lo, mut hi) = if g0 > 0.0 { (-width, 0.0) } else { (0.0, width) };
    let mut expansions = 0;
    loop {
        if g0 > 0.0 {
            if lo <= dom_lo {
                lo = dom_lo + 1e-12 * (1.0 + dom_lo.abs());
                if g(lo).0 > 0.0 {
                    return Err(Error::DomainError("saddle equation has no root in the tilt domain"));
                }
                break;
            }
            if g(lo).0 <= 0.0 {
                break;
            }
            hi = lo;
        } else {
            if hi >= dom_hi {
                hi = dom_hi;
            }
            if g(hi).0 >= 0.0 {
                break;
            }
            lo = hi;
        }
        width *= 2.0;
        expansions += 1;
        if expansions > 2000 {
            return Err(Error::NoConvergence { iterations: expansions });
        }
        if g0 > 0.0 {
            lo = -width;
        } else {
            hi = width;
        }
    }

    let tol = residual_tol(x);
    let mut y = -x / (s2 + l0.d2log).max(1e-300);
    if !(y > lo && y < hi) {
        y = 0.5 * (lo + hi);
    }
    for it in 1..=MAX_ITERATIONS {
        let (gy, l) = g(y);
        if gy.abs() <= tol {
            return Ok(done(y, gy, l, it));
        }
        if gy < 0.0 {
            lo = y;
        } else {
            hi = y;
        }
        let slope = l.d2log + s2;
        let mut next = y - gy / slope;
        if !(next > lo && next < hi) || !next.is_finite() {
            next = 0.5 * (lo + hi);
        }
        if next == y {
            // bracket exhausted at double precision
            return if gy.abs() <= 1e3 * tol {
                Ok(done(y, gy, l, it))
            } else {
                Err(Error::NoConvergence { iterations: it })
            };
        }
        y = next;
    }
    Err(Error::NoConvergence {
        iterations: MAX_ITERATIONS,
    })
}

/// Width scales of the tilted law: `(spread, decay variance)`.
fn tilted_scales(cf: &CharFn, sol: &SaddleSolution) -> (f64, f64) {
    match cf {
        CharFn::Discrete(_) => {
            let (lo, hi) = cf.support().unwrap_or((0.0, 0.0));
            (hi - lo, 0.0)
        }
        CharFn::Gaussian(g) => (12.0 * g.b, g.b * g.b),
        CharFn::CubicPhase(_) => {
            let alpha = sol.tilted_variance;
            (12.0 * alpha.sqrt(), alpha)
        }
    }
}

/// `p⁽ᵏ⁾(x)` of `X + σZ` for `k ∈ {0, 1, 2}`, by the saddle-point contour.
pub fn density_via_saddle(cf: &CharFn, sigma: f64, x: f64, k: u32) -> Result<InversionResult> {
    if k > 2 {
        return Err(Error::DomainError("derivative order must be 0, 1 or 2"));
    }
    if !(sigma > 0.0) && matches!(cf, CharFn::Discrete(_)) {
        return Err(Error::DomainError("a discrete source needs sigma > 0"));
    }
    let sol = solve_saddle(cf, sigma, x)?;
    let y = sol.y;
    let s2 = sigma * sigma;
    let (spread, decay) = tilted_scales(cf, &sol);
    let eff2 = s2 + decay;
    if !(eff2 > 0.0) {
        return Err(Error::DomainError("integrand does not decay"));
    }
    let big_l = 12.0 / eff2.sqrt();
    let dt = PI / (spread + 12.0 * eff2.sqrt());
    let tilted = cf.tilted(y);
    let shift = x + s2 * y;
    let integrand = |t: f64| {
        let r = tilted.ratio(t) * Complex64::from_polar((-0.5 * s2 * t * t).exp(), -t * shift);
        let m = Complex64::new(y, -t);
        match k {
            0 => r,
            1 => m * r,
            _ => m * m * r,
        }
    };

    let m = (big_l / dt).ceil() as i64;
    let dt = big_l / m as f64;
    // trapezoid on nodes jΔ, then the midpoints for the Δ/2 refinement
    let mut coarse = Complex64::new(0.0, 0.0);
    let mut l1 = 0.0;
    for j in -m..=m {
        let w = if j == -m || j == m { 0.5 } else { 1.0 };
        let f = integrand(j as f64 * dt);
        coarse += f * w;
        l1 += f.norm() * w;
    }
    let mut mids = Complex64::new(0.0, 0.0);
    for j in -m..m {
        let f = integrand((j as f64 + 0.5) * dt);
        mids += f;
        l1 += f.norm();
    }
    let coarse_int = coarse * dt;
    let fine_int = (coarse + mids) * (0.5 * dt);
    let l1 = l1 * 0.5 * dt;
    let err = (fine_int - coarse_int).norm() / l1.max(f64::MIN_POSITIVE);
    if err > QUADRATURE_TOL {
        return Err(Error::QuadratureError { relative: err });
    }
    let i_k = fine_int / (2.0 * PI);
    let log_prefactor = y * x + 0.5 * s2 * y * y + sol.log_f;
    let value = log_prefactor.exp() * i_k.re;
    Ok(InversionResult {
        x,
        k,
        value,
        i_k,
        log_prefactor,
        quadrature_error: err,
        tail_bound: (-0.5 * eff2 * big_l * big_l).exp(),
        saddle: sol,
    })
}

/// Density of `X + σZ` on `grid` by discrete Fourier inversion along the real
/// axis. The FFT period is at least twice the window, and the t-range reaches
/// `12/σ`, which needs `h ≤ πσ/12`.
pub fn fft_invert(cf: &CharFn, sigma: f64, grid: GridSpec) -> Result<GridDensity> {
    if !(sigma > 0.0) {
        return Err(Error::DomainError("sigma must be positive"));
    }
    let limit = PI * sigma / 12.0;
    if grid.h > limit {
        return Err(Error::GridTooCoarse { h: grid.h, limit });
    }
    let n = grid.n;
    let m = crate::fft::next_pow2(2 * n);
    let dt = 2.0 * PI / (m as f64 * grid.h);
    let kmax = ((12.0 / sigma) / dt).ceil() as usize;
    let kmax = kmax.min(m / 2 - 1);
    let tilted = cf.tilted(0.0);
    let mut buf = alloc::vec![Complex64::new(0.0, 0.0); m];
    for k in 0..=kmax {
        let t = k as f64 * dt;
        let phi = tilted.ratio(t) * Complex64::from_polar((-0.5 * sigma * sigma * t * t).exp(), -t * grid.x0);
        buf[k] = phi;
        if k > 0 {
            buf[m - k] = phi.conj();
        }
    }
    crate::fft::forward(&mut buf);
    let scale = dt / (2.0 * PI);
    let values: Vec<f64> = buf.iter().map(|c| c.re * scale).collect();
    let period = m as f64 * grid.h;
    let boundary = values[0].abs().max(values[n - 1].abs()) * period;
    if boundary > ALIASING_TOL {
        return Err(Error::AliasingDetected { boundary_mass: boundary });
    }
    GridDensity::from_computed(grid.x0, grid.h, values[..n].to_vec())?.normalize()
}
