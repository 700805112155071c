//! The cubic-phase counterexample showing that the stability bounds in
//! Cramér's theorem are sharp.
//!
//! `f_σ(t) = exp{−s t²/2 + it³/T}` with `s = 1+σ²` is the characteristic
//! function of a real signed function `v_σ` that integrates to one, is
//! positive for `x ≤ s²T/16` and negligible beyond. `U` has density
//! `p = d₀ v₀ · 1{x ≤ T/16}` and `V` is an independent copy. Because
//! `f_σ(t) f_σ(−t) = e^{−s t²}` exactly, `U_σ − V_σ` is almost Gaussian while
//! `D(U_σ) ≍ 3/(s³T²)`.

#[allow(unused_imports)] // shadowed by inherent methods when std is linked
use num_traits::Float;
use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;

use crate::charfn::LogImag;
use crate::dist::{default_grid, regularize, MixedDistribution, Regularized};
use crate::error::{Error, Result};
use crate::grid::{trap_weight, GridDensity, GridSpec};
use crate::special::normal_pdf;

/// `|x y(x)|` beyond which the upper envelope `e^{−4|xy|/9}` drops below
/// `1e−22`.
pub const ENVELOPE_CUTOFF: f64 = 2.25 * 50.656_872_045_869_37;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CubicPhaseCF {
    pub sigma: f64,
    pub t: f64,
}

impl CubicPhaseCF {
    pub fn new(sigma: f64, t: f64) -> Result<Self> {
        if !(0.0..=2.0).contains(&sigma) {
            return Err(Error::DomainError("sigma must lie in [0, 2]"));
        }
        if !(t > 1.0) || !t.is_finite() {
            return Err(Error::DomainError("T must exceed 1"));
        }
        Ok(Self { sigma, t })
    }

    /// `s = 1 + σ²`
    pub fn scale(&self) -> f64 {
        1.0 + self.sigma * self.sigma
    }

    /// `log f_σ(z)` at complex `z`.
    pub fn log_eval(&self, z: Complex64) -> Complex64 {
        -0.5 * self.scale() * z * z + Complex64::i() * z * z * z / self.t
    }

    pub fn log_imag(&self, y: f64) -> LogImag {
        let s = self.scale();
        LogImag {
            log_f: 0.5 * s * y * y + y * y * y / self.t,
            dlog: s * y + 3.0 * y * y / self.t,
            d2log: s + 6.0 * y / self.t,
        }
    }

    /// `s²T/16`: right end of the positivity window.
    pub fn positivity_limit(&self) -> f64 {
        let s = self.scale();
        s * s * self.t / 16.0
    }

    /// Closed-form root of `d/dy log f_σ(iy) = −x`, on the branch through 0.
    pub fn saddle_y(&self, x: f64) -> Result<f64> {
        if x > self.positivity_limit() {
            return Err(Error::DomainError("x exceeds s²T/16"));
        }
        let s = self.scale();
        Ok(-2.0 * x / (s + (s * s - 12.0 * x / self.t).sqrt()))
    }

    /// Contour used beyond the positivity window.
    pub fn tail_contour(&self) -> f64 {
        -self.scale() * self.t / 16.0
    }

    /// `v_σ(x)` from the inversion integral taken along `Im t = y`.
    pub fn v_on_contour(&self, x: f64, y: f64) -> f64 {
        let l = self.log_imag(y);
        let alpha = l.d2log;
        let c = x + l.dlog;
        (y * x + l.log_f).exp() * contour_integral(alpha, c, self.t)
    }

    /// `v_σ(x)`: the saddle contour inside the positivity window, the fixed
    /// tail contour beyond it.
    pub fn v(&self, x: f64) -> f64 {
        match self.saddle_y(x) {
            Ok(y) => self.v_on_contour(x, y),
            Err(_) => self.v_on_contour(x, self.tail_contour()),
        }
    }

    /// Left point where the upper envelope falls below `1e−22`.
    pub fn envelope_left_end(&self) -> f64 {
        let xy = |x: f64| (x * self.saddle_y(x).unwrap_or(0.0)).abs();
        let (mut lo, mut hi) = (-1.0, 0.0);
        while xy(lo) < ENVELOPE_CUTOFF {
            hi = lo;
            lo *= 2.0;
        }
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if xy(mid) < ENVELOPE_CUTOFF {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        lo
    }

    /// Right point beyond which `|v_σ| ≤ e^{−sTx/32} < 1e−22`.
    pub fn envelope_right_end(&self) -> f64 {
        let tail = 32.0 * 50.656_872_045_869_37 / (self.scale() * self.t);
        tail.max(self.positivity_limit())
    }
}

/// `(1/π) ∫₀^∞ e^{−αt²/2} cos(t³/T − ct) dt` by trapezoid refinement; the
/// integrand is even and entire, so the rule converges geometrically.
fn contour_integral(alpha: f64, c: f64, big_t: f64) -> f64 {
    let big_l = (180.0 / alpha).sqrt();
    let f = |u: f64| (-0.5 * alpha * u * u).exp() * (u * u * u / big_t - c * u).cos();
    let mut n = 32usize;
    let mut dt = big_l / n as f64;
    let mut inner = 0.5 * f(0.0);
    for j in 1..n {
        inner += f(j as f64 * dt);
    }
    let mut s = inner * dt;
    let scale = (0.5 * PI / alpha).sqrt();
    while n < (1 << 22) {
        let mut mids = 0.0;
        for j in 0..n {
            mids += f((j as f64 + 0.5) * dt);
        }
        inner += mids;
        n *= 2;
        dt *= 0.5;
        let next = inner * dt;
        let done = (next - s).abs() <= 1e-15 * scale && n >= 256;
        s = next;
        if done {
            break;
        }
    }
    s / PI
}

/// Samples of the signed function `v_σ` on a grid, evaluated twice.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VSamples {
    pub grid: GridSpec,
    /// Contour (saddle-point) evaluation.
    pub values: Vec<f64>,
    /// Discrete Fourier inversion along the real axis.
    pub fft_values: Vec<f64>,
    pub max_path_gap: f64,
    pub imaginary_residue: f64,
}

pub const V_PATH_TOL: f64 = 1e-10;

/// `v_σ` on `grid` by the contour form and by FFT inversion of `f_σ`.
pub fn build_v(sigma: f64, t: f64, grid: GridSpec) -> Result<VSamples> {
    let cf = CubicPhaseCF::new(sigma, t)?;
    let values: Vec<f64> = grid.nodes().map(|x| cf.v(x)).collect();

    let s = cf.scale();
    let t_max = 10.0f64.max(10.0 / s.sqrt());
    if grid.h > PI / t_max {
        return Err(Error::GridTooCoarse {
            h: grid.h,
            limit: PI / t_max,
        });
    }
    let m = crate::fft::next_pow2(2 * grid.n);
    let dt = 2.0 * PI / (m as f64 * grid.h);
    let kmax = ((t_max / dt).ceil() as usize).min(m / 2 - 1);
    let mut buf = alloc::vec![Complex64::new(0.0, 0.0); m];
    for k in 0..=kmax {
        let tk = k as f64 * dt;
        let v = (cf.log_eval(Complex64::new(tk, 0.0)) - Complex64::i() * tk * grid.x0).exp();
        buf[k] = v;
        if k > 0 {
            buf[m - k] = v.conj();
        }
    }
    crate::fft::forward(&mut buf);
    let scale = dt / (2.0 * PI);
    let fft_values: Vec<f64> = buf[..grid.n].iter().map(|c| c.re * scale).collect();
    let imaginary_residue = buf[..grid.n].iter().map(|c| (c.im * scale).abs()).fold(0.0, f64::max);
    if imaginary_residue > V_PATH_TOL {
        return Err(Error::NumericalError("imaginary residue of the inversion"));
    }
    let max_path_gap = values
        .iter()
        .zip(&fft_values)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    if max_path_gap > V_PATH_TOL {
        return Err(Error::NumericalError("contour and FFT evaluations of v disagree"));
    }
    Ok(VSamples {
        grid,
        values,
        fft_values,
        max_path_gap,
        imaginary_residue,
    })
}

/// Closed-form saddle point of the cubic-phase CF.
pub fn saddle_y(sigma: f64, t: f64, x: f64) -> Result<f64> {
    CubicPhaseCF::new(sigma, t)?.saddle_y(x)
}

/// The law of `U`, sampled on a lattice with `T/16` as its last node.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CounterexampleLaw {
    pub t: f64,
    pub d0: f64,
    pub p: GridDensity,
    pub a0: f64,
    pub b0: f64,
}

/// Grid step used for the law and its regularization.
pub fn law_step(sigma_reg: f64) -> f64 {
    (sigma_reg / 8.0).min(0.01)
}

/// `p = d₀ v₀ 1{x ≤ T/16}`, sampled from the left envelope point to `T/16`.
pub fn build_law(sigma_reg: f64, t: f64) -> Result<CounterexampleLaw> {
    if !(t >= 20.0) {
        return Err(Error::DomainError("T must be at least 20"));
    }
    if !(sigma_reg > 0.0) {
        return Err(Error::DomainError("sigma must be positive"));
    }
    let cf = CubicPhaseCF::new(0.0, t)?;
    let h = law_step(sigma_reg);
    let right = t / 16.0;
    let n = ((right - cf.envelope_left_end()) / h).ceil() as usize;
    let x0 = right - n as f64 * h;
    let mut values = Vec::with_capacity(n + 1);
    for j in 0..=n {
        let v = cf.v(x0 + j as f64 * h);
        if !(v > 0.0) {
            return Err(Error::ConstructionError("v_0 is not positive inside the window"));
        }
        values.push(v);
    }
    let raw = GridDensity::new(x0, h, values)?;
    let mass = raw.trapezoid();
    let p = raw.normalize()?;
    let (a0, var) = p.mean_variance();
    Ok(CounterexampleLaw {
        t,
        d0: 1.0 / mass,
        p,
        a0,
        b0: var.sqrt(),
    })
}

impl CounterexampleLaw {
    pub fn distribution(&self) -> Result<MixedDistribution> {
        MixedDistribution::continuous(self.p.clone())
    }

    /// Law of `X = (U − a₀)/b₀`.
    pub fn standardized(&self) -> Result<MixedDistribution> {
        self.distribution()?.affine(-self.a0 / self.b0, 1.0 / self.b0)
    }

    /// `U_σ`.
    pub fn regularized(&self, sigma: f64) -> Result<Regularized> {
        let m = self.distribution()?;
        regularize(&m, sigma, default_grid(&m, sigma)?)
    }

    /// `X_σ`.
    pub fn standardized_regularized(&self, sigma: f64) -> Result<Regularized> {
        let m = self.standardized()?;
        regularize(&m, sigma, default_grid(&m, sigma)?)
    }

    /// Mass of `p` on `[lo, hi]`.
    pub fn mass_in(&self, lo: f64, hi: f64) -> f64 {
        self.p.cdf_at(hi) - self.p.cdf_at(lo)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AsymptoticsRow {
    pub t: f64,
    pub d0: f64,
    pub a0: f64,
    pub b0: f64,
    /// `D(U_σ)`
    pub d: f64,
    pub scaled_d: f64,
    /// `J_st(U_σ)`
    pub j_st: f64,
    pub scaled_j: f64,
    /// `D(U_σ − V_σ)`
    pub d_diff: Option<f64>,
    /// `J_st(U_σ − V_σ)`
    pub j_diff: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AsymptoticsReport {
    pub sigma: f64,
    /// `3/(1+σ²)³`
    pub target: f64,
    pub rows: Vec<AsymptoticsRow>,
    /// Limit of `T²D` from a line in `1/T` through the two largest `T`.
    pub extrapolated: Option<f64>,
    /// `|T²D − target|` decreases along the sweep.
    pub monotone_approach: bool,
    /// `D_diff(Tᵢ₊₁)/D_diff(Tᵢ)`
    pub decay_ratios: Vec<f64>,
    /// `ln D_diff(Tᵢ₊₁)/ln D_diff(Tᵢ)`; `None` once `D_diff` is below `1e−300`.
    pub log_ratios: Vec<Option<f64>>,
    /// `sup |v_σ ⋆ v̄_σ − φ_{0,√(2s)}|` at the smallest `T`.
    pub calibration_sup: Option<f64>,
}

fn asymptotics_row(sigma: f64, t: f64, with_diff: bool) -> Result<AsymptoticsRow> {
    let law = build_law(sigma, t)?;
    let u = law.regularized(sigma)?;
    let du = u.distances()?;
    let (d_diff, j_diff) = if with_diff {
        let diff = u.convolve(&u.reflect())?;
        let dd = diff.distances()?;
        (Some(dd.d), Some(dd.j_st))
    } else {
        (None, None)
    };
    Ok(AsymptoticsRow {
        t,
        d0: law.d0,
        a0: law.a0,
        b0: law.b0,
        d: du.d,
        scaled_d: t * t * du.d,
        j_st: du.j_st,
        scaled_j: t * t * du.j_st,
        d_diff,
        j_diff,
    })
}

fn check_ts(ts: &[f64]) -> Result<()> {
    if ts.is_empty() {
        return Err(Error::InvalidConfig("T list must not be empty"));
    }
    if ts.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(Error::InvalidConfig("T list must be strictly increasing"));
    }
    Ok(())
}

fn summarize(sigma: f64, rows: Vec<AsymptoticsRow>, calibration_sup: Option<f64>) -> AsymptoticsReport {
    let s = 1.0 + sigma * sigma;
    let target = 3.0 / (s * s * s);
    let extrapolated = if rows.len() >= 2 {
        let a = rows[rows.len() - 2];
        let b = rows[rows.len() - 1];
        Some((b.t * b.scaled_d - a.t * a.scaled_d) / (b.t - a.t))
    } else {
        None
    };
    let monotone_approach = rows
        .windows(2)
        .all(|w| (w[1].scaled_d - target).abs() < (w[0].scaled_d - target).abs());
    let mut decay_ratios = Vec::new();
    let mut log_ratios = Vec::new();
    for w in rows.windows(2) {
        if let (Some(a), Some(b)) = (w[0].d_diff, w[1].d_diff) {
            decay_ratios.push(b / a);
            log_ratios.push(if a > 1e-300 && b > 1e-300 && a < 1.0 {
                Some(b.ln() / a.ln())
            } else {
                None
            });
        }
    }
    AsymptoticsReport {
        sigma,
        target,
        rows,
        extrapolated,
        monotone_approach,
        decay_ratios,
        log_ratios,
        calibration_sup,
    }
}

/// `T²·D(U_σ)` along `ts` against `3/(1+σ²)³`.
pub fn scaled_entropy_sweep(sigma: f64, ts: &[f64]) -> Result<AsymptoticsReport> {
    check_ts(ts)?;
    let rows = ts.iter().map(|&t| asymptotics_row(sigma, t, false)).collect::<Result<Vec<_>>>()?;
    Ok(summarize(sigma, rows, None))
}

/// `D(U_σ − V_σ)` along `ts`, plus the `v_σ ⋆ v̄_σ` calibration at `ts[0]`.
pub fn difference_decay_check(sigma: f64, ts: &[f64]) -> Result<AsymptoticsReport> {
    check_ts(ts)?;
    let rows = ts.iter().map(|&t| asymptotics_row(sigma, t, true)).collect::<Result<Vec<_>>>()?;
    let cal = calibration_sup(sigma, ts[0], law_step(sigma.max(1e-3)))?;
    Ok(summarize(sigma, rows, Some(cal)))
}

/// Full sweep: the `T²D` trend and the difference decay from one set of builds.
pub fn asymptotics(sigma: f64, ts: &[f64]) -> Result<AsymptoticsReport> {
    difference_decay_check(sigma, ts)
}

/// `sup_x |(v_σ ⋆ v̄_σ)(x) − φ_{0,√(2s)}(x)|` on a step-`h` lattice.
pub fn calibration_sup(sigma: f64, t: f64, h: f64) -> Result<f64> {
    let cf = CubicPhaseCF::new(sigma, t)?;
    let grid = GridSpec::covering_aligned(cf.envelope_left_end(), cf.envelope_right_end(), h)?;
    let v: Vec<f64> = grid.nodes().map(|x| cf.v(x)).collect();
    let n = v.len();
    // (v ⋆ v̄)(z_k) = ∫ v(u) v(u − z_k) du with z_k = (k − (n−1))h
    let sd = (2.0 * cf.scale()).sqrt();
    let mut sup: f64 = 0.0;
    for k in 0..(2 * n - 1) {
        let z = (k as f64 - (n - 1) as f64) * h;
        let mut acc = 0.0;
        for i in 0..n {
            let j = i as i64 - (k as i64 - (n as i64 - 1));
            if j < 0 || j >= n as i64 {
                continue;
            }
            acc += trap_weight(i, n) * v[i] * v[j as usize];
        }
        sup = sup.max((acc * h - normal_pdf(z, 0.0, sd)).abs());
    }
    Ok(sup)
}

/// The two stability lower bounds evaluated on the counterexample at one `(σ, T)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SharpnessCertificate {
    pub sigma: f64,
    pub t: f64,
    /// `D(X_σ)`, equal to `D(Y_σ)`.
    pub d_x: f64,
    pub j_x: f64,
    /// `D(X_σ − Y_σ)`
    pub d_diff: f64,
    pub j_diff: f64,
    /// Largest `c` with `D(X_σ − Y_σ) ≤ 2e^{−c/D(X_σ)}`.
    pub c_d: f64,
    /// Largest `c` with `J_st(X_σ − Y_σ) ≤ 2e^{−c/J_st(X_σ)}`.
    pub c_j: f64,
    /// `LHS/RHS` at `c = c_min` for the two inequalities.
    pub ratio_d: f64,
    pub ratio_j: f64,
    /// `D(X_σ − Y_σ)` lies above [`DIFF_RESOLUTION`]; below it the fitted
    /// constants measure rounding, not the law.
    pub resolved: bool,
    pub pass: bool,
}

/// Smallest `D` the two quadrature paths resolve in double precision.
pub const DIFF_RESOLUTION: f64 = 1e-14;

/// Smallest fitted constant accepted as a certificate.
pub const CERTIFICATE_MIN_C: f64 = 1e-3;

/// `X = (U − a₀)/b₀`, `Y` an independent copy; fits the constants.
pub fn sharpness_certificate(sigma: f64, t: f64) -> Result<SharpnessCertificate> {
    let law = build_law(sigma, t)?;
    let x = law.standardized_regularized(sigma)?;
    let dx = x.distances()?;
    let diff = x.convolve(&x.reflect())?;
    let dd = diff.distances()?;
    let fit = |dist: f64, lhs: f64| {
        if lhs <= 0.0 {
            f64::INFINITY
        } else {
            dist * (2.0 / lhs).ln()
        }
    };
    let c_d = fit(dx.d, dd.d);
    let c_j = fit(dx.j_st, dd.j_st);
    let ratio = |dist: f64, lhs: f64| lhs / (2.0 * (-CERTIFICATE_MIN_C / dist).exp());
    Ok(SharpnessCertificate {
        sigma,
        t,
        d_x: dx.d,
        j_x: dx.j_st,
        d_diff: dd.d,
        j_diff: dd.j_st,
        c_d,
        c_j,
        ratio_d: ratio(dx.d, dd.d),
        ratio_j: ratio(dx.j_st, dd.j_st),
        resolved: dd.d > DIFF_RESOLUTION,
        pass: c_d >= CERTIFICATE_MIN_C && c_j >= CERTIFICATE_MIN_C,
    })
}

/// Fitted constants of the two-sided envelope of `v_σ` on the positivity
/// window: `C₁ e^{−κ|xy|} ≤ v_σ(x) ≤ C₂ e^{−4|xy|/9}`, for the two lower
/// exponents `κ = 2(5−√7)/4` and `κ = 2(5−√7)/9`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EnvelopeFit {
    pub sigma: f64,
    pub t: f64,
    pub c1_quarter: f64,
    pub c1_ninth: f64,
    pub c2: f64,
    pub min_v: f64,
}

pub fn envelope_fit(sigma: f64, t: f64, h: f64) -> Result<EnvelopeFit> {
    let cf = CubicPhaseCF::new(sigma, t)?;
    let k = 2.0 * (5.0 - 7f64.sqrt());
    let grid = GridSpec::covering(cf.envelope_left_end(), cf.positivity_limit(), h)?;
    let mut c1q = f64::INFINITY;
    let mut c1n = f64::INFINITY;
    let mut c2: f64 = 0.0;
    let mut min_v = f64::INFINITY;
    for x in grid.nodes() {
        let Ok(y) = cf.saddle_y(x) else { continue };
        let v = cf.v_on_contour(x, y);
        let xy = (x * y).abs();
        min_v = min_v.min(v);
        c1q = c1q.min(v / (-k / 4.0 * xy).exp());
        c1n = c1n.min(v / (-k / 9.0 * xy).exp());
        c2 = c2.max(v / (-4.0 / 9.0 * xy).exp());
    }
    Ok(EnvelopeFit {
        sigma,
        t,
        c1_quarter: c1q,
        c1_ninth: c1n,
        c2,
        min_v,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::charfn::CharFn;
    use crate::saddle::solve_saddle;

    #[test]
    fn saddle_closed_form() {
        assert_eq!(saddle_y(0.5, 50.0, 0.0).unwrap(), 0.0);
        let cf = CubicPhaseCF::new(0.5, 50.0).unwrap();
        let s = cf.scale();
        let y = cf.saddle_y(cf.positivity_limit()).unwrap();
        assert!((y + 50.0 * s / 12.0).abs() < 1e-12);
        assert!(matches!(cf.saddle_y(cf.positivity_limit() + 1e-6), Err(Error::DomainError(_))));
    }

    #[test]
    fn saddle_matches_generic_solver() {
        let cf = CubicPhaseCF::new(1.0, 64.0).unwrap();
        for x in [-3.0, 1.0, 10.0] {
            let closed = cf.saddle_y(x).unwrap();
            let generic = solve_saddle(&CharFn::CubicPhase(cf), 0.0, x).unwrap().y;
            assert!((closed - generic).abs() < 1e-10, "{x}: {closed} {generic}");
        }
    }

    #[test]
    fn v_near_standard_normal_at_origin() {
        let cf = CubicPhaseCF::new(0.0, 100.0).unwrap();
        let v = cf.v(0.0);
        assert!((v / normal_pdf(0.0, 0.0, 1.0) - 1.0).abs() < 2e-3);
    }

    #[test]
    fn v_paths_agree() {
        let grid = GridSpec::covering_aligned(-14.0, 14.0, 0.02).unwrap();
        let vs = build_v(0.0, 40.0, grid).unwrap();
        assert!(vs.max_path_gap < 1e-10);
        let cf = CubicPhaseCF::new(0.0, 40.0).unwrap();
        for (x, v) in grid.nodes().zip(&vs.values) {
            if x <= cf.positivity_limit() {
                assert!(*v > 0.0, "v({x}) = {v}");
            }
        }
    }

    #[test]
    fn v_tail_bound() {
        let cf = CubicPhaseCF::new(1.0, 40.0).unwrap();
        let s = cf.scale();
        let start = cf.positivity_limit();
        for j in 0..50 {
            let x = start + 0.05 + j as f64 * 0.4;
            assert!(cf.v(x).abs() <= (-s * cf.t * x / 32.0).exp());
        }
    }

    #[test]
    fn law_window_and_normalizer() {
        let a = build_law(1.0, 40.0).unwrap();
        assert!((a.p.x_end() - 2.5).abs() < 1e-12);
        assert!(a.mass_in(-12.0, 2.5) >= 1.0 - 1e-12);
        assert!(a.p.values().iter().all(|&v| v > 0.0));
        let b = build_law(1.0, 80.0).unwrap();
        assert!((1.0 - b.d0).abs() < (1.0 - a.d0).abs());
        assert!((1.0 - b.d0).abs() < 1e-6);
        assert!(matches!(build_law(1.0, 10.0), Err(Error::DomainError(_))));
    }

    #[test]
    fn calibration_identity() {
        assert!(calibration_sup(1.0, 40.0, 0.02).unwrap() < 1e-8);
    }

    #[test]
    fn envelope_constants_are_positive_and_stable() {
        let a = envelope_fit(1.0, 40.0, 0.02).unwrap();
        let b = envelope_fit(1.0, 80.0, 0.02).unwrap();
        for f in [a, b] {
            assert!(f.c1_quarter > 0.0 && f.c1_quarter.is_finite());
            assert!(f.c1_ninth > 0.0 && f.c2.is_finite());
            assert!(f.min_v > 0.0);
        }
        assert!((a.c2 / b.c2 - 1.0).abs() < 0.5);
    }
}
