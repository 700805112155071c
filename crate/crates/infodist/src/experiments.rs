//! Experiment runners behind the subcommands. Each returns a serializable
//! report and a verdict; the CLI only parses flags and writes files.

use anyhow::{bail, Result};
use infodist_core::charfn::sandwich_check;
use infodist_core::cramer::{asymptotics, sharpness_certificate, SharpnessCertificate};
use infodist_core::dist::{default_grid, regularize};
use infodist_core::harness::{run_pair, run_suite_case, SuiteReport, D_PATH_TOL, J_PATH_ABS, J_PATH_REL};
use infodist_core::saddle::{density_via_saddle, fft_invert};
use infodist_core::{
    AsymptoticsReport, CharFn, GridSpec, MixedDistribution, SandwichReport, StabilityReport, TruncationParams,
};
use rayon::prelude::*;
use serde::Serialize;

/// Runs `f` on a pool of `jobs` threads. Results keep input order, so the
/// output does not depend on `jobs`.
pub fn with_jobs<T: Send>(jobs: usize, f: impl FnOnce() -> T + Send) -> Result<T> {
    let pool = rayon::ThreadPoolBuilder::new().num_threads(jobs.max(1)).build()?;
    Ok(pool.install(f))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Paths {
    pub a: f64,
    pub b: f64,
}

/// One computed functional of `X_σ`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MetricReport {
    pub metric: &'static str,
    pub sigma: f64,
    pub value: f64,
    /// Two independent computations, where the metric has them.
    pub paths: Option<Paths>,
    pub clamped_mass: f64,
    pub grid: GridSpec,
    pub pass: bool,
}

/// `h`, `N`, `D` and `J_st` of `X_σ` for every σ. `D` compares the direct
/// and entropy-gap integrals, `J_st` the information and score forms.
pub fn distances(m: &MixedDistribution, sigmas: &[f64]) -> Result<Vec<MetricReport>> {
    let mut out = Vec::with_capacity(4 * sigmas.len());
    for &sigma in sigmas {
        let grid = default_grid(m, sigma)?;
        let r = regularize(m, sigma, grid)?;
        let e = r.entropy()?;
        let d = r.relative_entropy()?;
        let j = r.standardized_fisher()?;
        let row = |metric, value, paths, clamped_mass, pass| MetricReport {
            metric,
            sigma,
            value,
            paths,
            clamped_mass,
            grid,
            pass,
        };
        out.push(row("h", e.h, None, d.clamped_mass, true));
        out.push(row("N", e.entropy_power, None, d.clamped_mass, true));
        out.push(row(
            "D",
            d.value,
            Some(Paths {
                a: d.direct,
                b: d.entropy_gap,
            }),
            d.clamped_mass,
            d.paths_agree(D_PATH_TOL),
        ));
        out.push(row(
            "Jst",
            j.value,
            Some(Paths {
                a: j.from_information,
                b: j.from_score,
            }),
            j.clamped_mass,
            j.paths_agree(J_PATH_REL, J_PATH_ABS),
        ));
    }
    Ok(out)
}

pub fn pair(x: &MixedDistribution, y: &MixedDistribution, sigmas: &[f64], epsilon: Option<f64>) -> Result<Vec<StabilityReport>> {
    sigmas.iter().map(|&s| Ok(run_pair(x, y, s, epsilon)?)).collect()
}

pub fn pair_pass(reports: &[StabilityReport]) -> bool {
    reports.iter().all(|r| r.always_true_pass && r.invalid.is_none())
}

/// Random mixture pairs; cases run in parallel and are merged by index.
pub fn suite(seed: u64, cases: usize, jobs: usize) -> Result<SuiteReport> {
    if cases == 0 {
        bail!("cases must be at least 1");
    }
    let reports = with_jobs(jobs, || {
        (0..cases as u64)
            .into_par_iter()
            .map(|i| run_suite_case(seed, i))
            .collect::<Result<Vec<_>, _>>()
    })??;
    Ok(SuiteReport::from_reports(seed, reports))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CounterexampleReport {
    pub sigma: f64,
    pub asymptotics: AsymptoticsReport,
    pub certificates: Vec<SharpnessCertificate>,
    /// `T²D` approaches its limit monotonically and every resolved
    /// certificate holds.
    pub pass: bool,
}

pub fn counterexample(sigmas: &[f64], ts: &[f64], jobs: usize) -> Result<Vec<CounterexampleReport>> {
    with_jobs(jobs, || {
        sigmas
            .par_iter()
            .map(|&sigma| {
                let a = asymptotics(sigma, ts)?;
                let certificates = ts
                    .par_iter()
                    .map(|&t| sharpness_certificate(sigma, t))
                    .collect::<Result<Vec<_>, _>>()?;
                let pass = a.monotone_approach && certificates.iter().all(|c| c.pass || !c.resolved);
                Ok(CounterexampleReport {
                    sigma,
                    asymptotics: a,
                    certificates,
                    pass,
                })
            })
            .collect::<Result<Vec<_>>>()
    })?
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SandwichRun {
    pub sigma: f64,
    pub epsilon: f64,
    /// Truncation level `N(ε, σ)`.
    pub level: f64,
    pub report: SandwichReport,
}

/// `|f_{X*} f_{Y*}| / |e^{−t²/2}|` for `X`, `Y` truncated at `N(ε, σ)`.
pub fn sandwich(x: &MixedDistribution, y: &MixedDistribution, sigma: f64, epsilon: f64, samples: usize) -> Result<SandwichRun> {
    let tp = TruncationParams::new(epsilon, sigma)?;
    let cx = CharFn::from_distribution(&x.truncate(tp.level)?);
    let cy = CharFn::from_distribution(&y.truncate(tp.level)?);
    let report = sandwich_check(&cx, &cy, tp.radius, samples)?;
    Ok(SandwichRun {
        sigma,
        epsilon,
        level: tp.level,
        report,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct InvertRow {
    pub x: f64,
    pub saddle: f64,
    pub fft: f64,
    /// `|saddle − fft| / fft`
    pub rel_diff: f64,
    /// `p′(x)` from the contour with `k = 1`.
    pub derivative: f64,
    /// Five-point difference of the `k = 0` contour values.
    pub finite_difference: f64,
    /// `|derivative − finite_difference| / max_x |p′|`
    pub derivative_diff: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InvertReport {
    pub sigma: f64,
    pub grid: GridSpec,
    pub rows: Vec<InvertRow>,
    pub max_rel_diff: f64,
    pub max_derivative_diff: f64,
    /// Absolute rounding level of the FFT values, `FFT_FLOOR_ULPS·ε·max p`.
    pub fft_floor: f64,
    /// Every row has `|saddle − fft| ≤ INVERT_TOL·fft + fft_floor` and the
    /// derivative check holds.
    pub pass: bool,
}

/// Density agreement required between the contour and the FFT.
pub const INVERT_TOL: f64 = 1e-7;
/// Derivative agreement, relative to the largest `|p′|` in the table.
pub const DERIVATIVE_TOL: f64 = 1e-6;
/// Far in the tail the FFT values sit at a rounding floor proportional to the
/// peak density, so the relative comparison allows that much absolute slack.
pub const FFT_FLOOR_ULPS: f64 = 64.0;
const FD_STEP: f64 = 1e-3;

/// Saddle-point density and derivative against FFT inversion at `points`
/// FFT nodes spread over `mean ± 3 sd(X_σ)`.
pub fn invert(m: &MixedDistribution, sigma: f64, points: usize) -> Result<InvertReport> {
    if points < 2 {
        bail!("need at least two points");
    }
    let cf = CharFn::from_distribution(m);
    let (lo, hi) = m.support();
    let h = sigma / 16.0;
    let grid = GridSpec::covering_aligned(lo - 12.0 * sigma, hi + 12.0 * sigma, h)?;
    let fft = fft_invert(&cf, sigma, grid)?;
    let (mean, var) = m.moments();
    let sd = (var + sigma * sigma).sqrt();
    let saddle = |x: f64, k: u32| density_via_saddle(&cf, sigma, x, k).map(|r| r.value);

    let mut rows = Vec::with_capacity(points);
    for i in 0..points {
        let target = mean - 3.0 * sd + 6.0 * sd * i as f64 / (points - 1) as f64;
        let j = ((target - grid.x0) / h).round().clamp(0.0, (grid.n - 1) as f64) as usize;
        let x = grid.x(j);
        let p = saddle(x, 0)?;
        let q = fft.values()[j];
        let d = saddle(x, 1)?;
        let e = FD_STEP;
        let fd = (saddle(x - 2.0 * e, 0)? - 8.0 * saddle(x - e, 0)? + 8.0 * saddle(x + e, 0)? - saddle(x + 2.0 * e, 0)?)
            / (12.0 * e);
        rows.push(InvertRow {
            x,
            saddle: p,
            fft: q,
            rel_diff: (p - q).abs() / q.abs(),
            derivative: d,
            finite_difference: fd,
            derivative_diff: (d - fd).abs(),
        });
    }
    let scale = rows.iter().map(|r| r.derivative.abs()).fold(0.0, f64::max).max(f64::MIN_POSITIVE);
    for r in &mut rows {
        r.derivative_diff /= scale;
    }
    let max_rel_diff = rows.iter().map(|r| r.rel_diff).fold(0.0, f64::max);
    let max_derivative_diff = rows.iter().map(|r| r.derivative_diff).fold(0.0, f64::max);
    let peak = fft.values().iter().copied().fold(0.0, f64::max);
    let fft_floor = FFT_FLOOR_ULPS * f64::EPSILON * peak;
    let densities_agree = rows
        .iter()
        .all(|r| (r.saddle - r.fft).abs() <= INVERT_TOL * r.fft.abs() + fft_floor);
    Ok(InvertReport {
        sigma,
        grid,
        rows,
        max_rel_diff,
        max_derivative_diff,
        fft_floor,
        pass: densities_agree && max_derivative_diff <= DERIVATIVE_TOL,
    })
}
