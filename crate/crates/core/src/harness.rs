//! Experiment runner: the regularization pipeline applied to a pair of
//! independent laws, with every checkable inequality evaluated.

#[allow(unused_imports)] // shadowed by inherent methods when std is linked
use num_traits::Float;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::charfn::{sandwich_check, CharFn};
use crate::dist::{regularize, MixedDistribution, NormalParams, Regularized, TruncationParams};
use crate::error::{Error, Result};
use crate::grid::{GridDensity, GridSpec};
use crate::info::{kl_divergence, InequalityReport, SLACK_TOL};
use crate::special::normal_cdf;

/// Agreement required between the two evaluations of `D`.
pub const D_PATH_TOL: f64 = 1e-9;
/// Relative and absolute agreement required between the two evaluations of
/// `J_st`.
pub const J_PATH_REL: f64 = 1e-7;
pub const J_PATH_ABS: f64 = 1e-10;
/// Smallest value a computed distance may take.
pub const DISTANCE_FLOOR: f64 = -1e-10;
/// Distances at or below this are treated as zero when fitting constants.
pub const ZERO_DISTANCE: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LawSummary {
    pub mean: f64,
    pub variance: f64,
    pub atoms: usize,
    pub grid_points: usize,
    /// `(weight, mean, sd)` when the law is a Gaussian mixture.
    pub components: Option<Vec<(f64, f64, f64)>>,
}

impl LawSummary {
    pub fn of(m: &MixedDistribution) -> Self {
        let (mean, variance) = m.moments();
        Self {
            mean,
            variance,
            atoms: m.atoms().len(),
            grid_points: m.ac().map_or(0, |(_, d)| d.len()),
            components: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PairDistances {
    pub d_x: f64,
    pub d_y: f64,
    pub d_sum: f64,
    pub j_x: f64,
    pub j_y: f64,
    pub j_sum: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PairBounds {
    pub epi: InequalityReport,
    pub stam: InequalityReport,
    pub pinsker: InequalityReport,
    pub sum_entropy_upper: InequalityReport,
    pub sum_fisher_upper: InequalityReport,
    pub log_sobolev: Vec<InequalityReport>,
    pub noise_ceiling: Vec<InequalityReport>,
    pub noise_monotone: Vec<InequalityReport>,
}

impl PairBounds {
    fn all(&self) -> impl Iterator<Item = &InequalityReport> {
        [&self.epi, &self.stam, &self.pinsker, &self.sum_entropy_upper, &self.sum_fisher_upper]
            .into_iter()
            .chain(self.log_sobolev.iter())
            .chain(self.noise_ceiling.iter())
            .chain(self.noise_monotone.iter())
    }

    pub fn all_pass(&self) -> bool {
        self.all().all(|r| r.pass)
    }

    pub fn failures(&self) -> Vec<&'static str> {
        self.all().filter(|r| !r.pass).map(|r| r.name).collect()
    }
}

/// Tail comparison `P(|X|>M) ≤ 2P(|X_σ|>M) ≤ 4Φ_{√(1+2σ²)}(−(M−2)) + 4√ε`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TailCheck {
    pub law: char,
    pub m: f64,
    pub tail: f64,
    pub twice_regularized_tail: f64,
    pub bound: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SandwichSummary {
    pub level: f64,
    pub t_radius: f64,
    pub min_ratio: f64,
    pub max_ratio: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FitStatus {
    Fitted,
    /// Both summands are exactly normal: the right side vanishes for every
    /// `c > 0`.
    Vacuous,
    /// No constant makes the bound hold.
    Infeasible,
}

/// Smallest `c` for which a lower bound of the form
/// `LHS ≥ c₁(c)(e^{−c₂(c)/Dₓ} + e^{−c₂(c)/D_y})` holds at this instance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FittedConstant {
    pub status: FitStatus,
    pub lhs: f64,
    pub c: Option<f64>,
    /// Smallest `c₂` that works with `c₁ = 1`: `max Dᵢ·ln(2/LHS)`.
    pub c2_decoupled: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StabilityReport {
    pub inputs: [LawSummary; 2],
    /// Factor applied to both laws so that `Var X + Var Y = 1`.
    pub scale: f64,
    pub sigma: f64,
    pub epsilon: f64,
    pub grid_step: f64,
    pub distances: PairDistances,
    pub paths_agree: bool,
    pub bounds: PairBounds,
    pub hypothesis_holds: bool,
    pub tail_checks: Vec<TailCheck>,
    pub sandwich: Option<SandwichSummary>,
    pub entropy_lower_bound: FittedConstant,
    pub fisher_lower_bound: FittedConstant,
    pub always_true_pass: bool,
    pub invalid: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairOptions {
    pub sigma: f64,
    pub epsilon: Option<f64>,
    /// Output grid step; defaults to `σ/8`.
    pub step: Option<f64>,
    pub sandwich_samples: usize,
}

impl PairOptions {
    pub fn new(sigma: f64) -> Self {
        Self {
            sigma,
            epsilon: None,
            step: None,
            sandwich_samples: 256,
        }
    }
}

fn grid_for(m: &MixedDistribution, sigma: f64, h: f64) -> Result<GridSpec> {
    let (mean, var) = m.moments();
    let sd_out = (var + sigma * sigma).sqrt();
    let (slo, shi) = m.support();
    GridSpec::covering_aligned(
        (mean - 10.0 * sd_out).min(slo - 10.0 * sigma),
        (mean + 10.0 * sd_out).max(shi + 10.0 * sigma),
        h,
    )
}

/// `c₁(c) = exp{cσ⁻⁶ ln σ}`, `c₂(c) = cσ⁻⁶` for the entropy bound; the
/// Fisher bound uses `(ln σ)³` in `c₁`.
fn fit_lower_bound(lhs: f64, dx: f64, dy: f64, sigma: f64, log_power: i32) -> FittedConstant {
    // rounding-level distances of normal summands count as exact zeros
    let zero = |d: f64| if d <= ZERO_DISTANCE { 0.0 } else { d };
    let dx = zero(dx);
    let dy = zero(dy);
    if dx == 0.0 && dy == 0.0 {
        return FittedConstant {
            status: FitStatus::Vacuous,
            lhs,
            c: None,
            c2_decoupled: None,
        };
    }
    let s6 = sigma.powi(-6);
    let ln_s = sigma.ln().powi(log_power);
    let term = |c2: f64, d: f64| if d > 0.0 { (-c2 / d).exp() } else { 0.0 };
    let rhs = |c: f64| (c * s6 * ln_s).exp() * (term(c * s6, dx) + term(c * s6, dy));
    if !(lhs > 0.0) {
        return FittedConstant {
            status: FitStatus::Infeasible,
            lhs,
            c: None,
            c2_decoupled: None,
        };
    }
    let decoupled = dx.max(dy) * (2.0 / lhs).ln();
    let c2_decoupled = Some(decoupled.max(0.0));
    if rhs(0.0) <= lhs {
        return FittedConstant {
            status: FitStatus::Fitted,
            lhs,
            c: Some(0.0),
            c2_decoupled,
        };
    }
    let mut hi = 1e-6;
    while rhs(hi) > lhs {
        hi *= 2.0;
        if hi > 1e300 {
            return FittedConstant {
                status: FitStatus::Infeasible,
                lhs,
                c: None,
                c2_decoupled,
            };
        }
    }
    let mut lo = 0.0;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if rhs(mid) > lhs {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 1e-15 * hi {
            break;
        }
    }
    FittedConstant {
        status: FitStatus::Fitted,
        lhs,
        c: Some(hi),
        c2_decoupled,
    }
}

/// Tails of a law and its regularization at `m`.
fn tail_check(law: char, x: &MixedDistribution, xs: &GridDensity, m: f64, sigma: f64, eps: f64) -> TailCheck {
    let tail = (1.0 - x.cdf(m)) + x.cdf_left(-m);
    let reg = (1.0 - xs.cdf_at(m)).max(0.0) + xs.cdf_at(-m);
    let sd = (1.0 + 2.0 * sigma * sigma).sqrt();
    let bound = 4.0 * normal_cdf(-(m - 2.0), 0.0, sd) + 4.0 * eps.sqrt();
    TailCheck {
        law,
        m,
        tail,
        twice_regularized_tail: 2.0 * reg,
        bound,
        pass: tail <= 2.0 * reg + SLACK_TOL && 2.0 * reg <= bound + SLACK_TOL,
    }
}

/// `D(X_{σ₂}) ≤ D(X_{σ₁})` with `σ₂² = σ₁² + δ²`.
pub fn noise_monotonicity(m: &MixedDistribution, sigma: f64, delta: f64, h: f64) -> Result<InequalityReport> {
    let s2 = sigma.hypot(delta);
    let a = regularize(m, sigma, grid_for(m, s2, h)?)?;
    let b = regularize(m, s2, grid_for(m, s2, h)?)?;
    Ok(InequalityReport::at_most(
        "noise_monotone",
        b.relative_entropy()?.value,
        a.relative_entropy()?.value,
    ))
}

/// Runs the pipeline on `(X, Y)` with default options.
pub fn run_pair(x: &MixedDistribution, y: &MixedDistribution, sigma: f64, epsilon: Option<f64>) -> Result<StabilityReport> {
    let mut opts = PairOptions::new(sigma);
    opts.epsilon = epsilon;
    run_pair_with(x, y, &opts)
}

pub fn run_pair_with(x: &MixedDistribution, y: &MixedDistribution, opts: &PairOptions) -> Result<StabilityReport> {
    let sigma = opts.sigma;
    if !(sigma > 0.0 && sigma <= 1.0) {
        return Err(Error::DomainError("sigma must lie in (0, 1]"));
    }
    if let Some(e) = opts.epsilon {
        if !(e > 0.0) {
            return Err(Error::DomainError("epsilon must be positive"));
        }
    }
    let inputs = [LawSummary::of(x), LawSummary::of(y)];
    let total = inputs[0].variance + inputs[1].variance;
    if !(total > 0.0) {
        return Err(Error::DegenerateVariance);
    }
    let scale = 1.0 / total.sqrt();
    let xs = x.affine(-inputs[0].mean * scale, scale)?;
    let ys = y.affine(-inputs[1].mean * scale, scale)?;
    let h = opts.step.unwrap_or(sigma / 8.0);

    match evaluate(&xs, &ys, sigma, h, opts) {
        Ok(mut r) => {
            r.inputs = inputs;
            r.scale = scale;
            Ok(r)
        }
        Err(e) => Ok(invalid_report(inputs, scale, sigma, h, opts.epsilon.unwrap_or(f64::NAN), format!("{e}"))),
    }
}

fn nan_report(name: &'static str) -> InequalityReport {
    InequalityReport {
        name,
        lhs: f64::NAN,
        relation: "",
        rhs: f64::NAN,
        slack: f64::NAN,
        pass: false,
    }
}

fn invalid_report(inputs: [LawSummary; 2], scale: f64, sigma: f64, h: f64, epsilon: f64, why: String) -> StabilityReport {
    let unfit = FittedConstant {
        status: FitStatus::Infeasible,
        lhs: f64::NAN,
        c: None,
        c2_decoupled: None,
    };
    StabilityReport {
        inputs,
        scale,
        sigma,
        epsilon,
        grid_step: h,
        distances: PairDistances {
            d_x: f64::NAN,
            d_y: f64::NAN,
            d_sum: f64::NAN,
            j_x: f64::NAN,
            j_y: f64::NAN,
            j_sum: f64::NAN,
        },
        paths_agree: false,
        bounds: PairBounds {
            epi: nan_report("epi"),
            stam: nan_report("stam"),
            pinsker: nan_report("pinsker"),
            sum_entropy_upper: nan_report("entropy_sum_upper"),
            sum_fisher_upper: nan_report("fisher_sum_upper"),
            log_sobolev: Vec::new(),
            noise_ceiling: Vec::new(),
            noise_monotone: Vec::new(),
        },
        hypothesis_holds: false,
        tail_checks: Vec::new(),
        sandwich: None,
        entropy_lower_bound: unfit,
        fisher_lower_bound: unfit,
        always_true_pass: false,
        invalid: Some(why),
    }
}

struct Evaluated {
    d: crate::info::RelativeEntropy,
    j: crate::info::StandardizedFisher,
    h: f64,
}

fn evaluate_one(r: &Regularized) -> Result<Evaluated> {
    Ok(Evaluated {
        d: r.relative_entropy()?,
        j: r.standardized_fisher()?,
        h: r.entropy()?.h,
    })
}

fn evaluate(xs: &MixedDistribution, ys: &MixedDistribution, sigma: f64, h: f64, opts: &PairOptions) -> Result<StabilityReport> {
    let rx = regularize(xs, sigma, grid_for(xs, sigma, h)?)?;
    let ry = regularize(ys, sigma, grid_for(ys, sigma, h)?)?;
    let rs = rx.convolve(&ry)?;
    let ex = evaluate_one(&rx)?;
    let ey = evaluate_one(&ry)?;
    let es = evaluate_one(&rs)?;

    let distances = PairDistances {
        d_x: ex.d.value,
        d_y: ey.d.value,
        d_sum: es.d.value,
        j_x: ex.j.value,
        j_y: ey.j.value,
        j_sum: es.j.value,
    };
    let paths_agree = [&ex, &ey, &es]
        .iter()
        .all(|e| e.d.paths_agree(D_PATH_TOL) && e.j.paths_agree(J_PATH_REL, J_PATH_ABS));
    let mut invalid = None;
    if !paths_agree {
        invalid = Some(String::from("independent evaluation paths disagree"));
    }
    let floor_ok = [distances.d_x, distances.d_y, distances.d_sum, distances.j_x, distances.j_y, distances.j_sum]
        .iter()
        .all(|&v| v >= DISTANCE_FLOOR);
    if !floor_ok {
        invalid = Some(String::from("a distance fell below the quadrature floor"));
    }

    let vx = rx.variance();
    let vy = ry.variance();
    let ix = rx.fisher_information()?.value;
    let iy = ry.fisher_information()?.value;
    let is = rs.fisher_information()?.value;

    let normal = NormalParams::new(es.d.matching_normal.a, es.d.matching_normal.b)?;
    let sum_density = rs.density();
    let phi = GridDensity::from_fn(sum_density.spec(), |t| normal.pdf(t))?.normalize()?;
    let tv = crate::dist::tv_distance(sum_density, &phi)?;
    let kl = kl_divergence(sum_density, &phi)?;

    let lam = vx / (vx + vy);
    let log_sobolev = [(&ex, "log_sobolev_x"), (&ey, "log_sobolev_y"), (&es, "log_sobolev_sum")]
        .iter()
        .map(|(e, name)| InequalityReport::at_least(name, 0.5 * e.j.value, e.d.value))
        .collect();
    let ceiling = |e: &Evaluated, var: f64, s: f64, name| {
        InequalityReport::at_most(name, e.d.value, 0.5 * (core::f64::consts::E * var / (s * s)).ln())
    };
    let noise_ceiling = alloc::vec![
        ceiling(&ex, vx, sigma, "noise_ceiling_x"),
        ceiling(&ey, vy, sigma, "noise_ceiling_y"),
        ceiling(&es, rs.variance(), rs.sigma(), "noise_ceiling_sum"),
    ];
    let noise_monotone = alloc::vec![
        noise_monotonicity(xs, sigma, 0.5 * sigma, h)?,
        noise_monotonicity(ys, sigma, 0.5 * sigma, h)?,
    ];

    let bounds = PairBounds {
        epi: InequalityReport::at_least("epi", (2.0 * es.h).exp(), (2.0 * ex.h).exp() + (2.0 * ey.h).exp()),
        stam: InequalityReport::at_least("stam", 1.0 / is, 1.0 / ix + 1.0 / iy),
        pinsker: InequalityReport::at_most("pinsker", tv * tv, 2.0 * kl),
        sum_entropy_upper: InequalityReport::at_most(
            "entropy_sum_upper",
            es.d.value,
            lam * ex.d.value + (1.0 - lam) * ey.d.value,
        ),
        sum_fisher_upper: InequalityReport::at_most(
            "fisher_sum_upper",
            es.j.value,
            lam * ex.j.value + (1.0 - lam) * ey.j.value,
        ),
        log_sobolev,
        noise_ceiling,
        noise_monotone,
    };

    let epsilon = opts.epsilon.unwrap_or((2.0 * distances.d_sum).max(1e-6));
    let hypothesis_holds = distances.d_sum <= 2.0 * epsilon;
    let mut tail_checks = Vec::new();
    let mut sandwich = None;
    if hypothesis_holds && epsilon < 1.0 {
        let tp = TruncationParams::new(epsilon, sigma)?;
        for m in [0.5 * tp.level, tp.level] {
            tail_checks.push(tail_check('x', xs, rx.density(), m, sigma, epsilon));
            tail_checks.push(tail_check('y', ys, ry.density(), m, sigma, epsilon));
        }
        let cx = CharFn::from_distribution(&xs.truncate(tp.level)?);
        let cy = CharFn::from_distribution(&ys.truncate(tp.level)?);
        sandwich = match sandwich_check(&cx, &cy, tp.radius, opts.sandwich_samples.max(64)) {
            Ok(s) => Some(SandwichSummary {
                level: tp.level,
                t_radius: tp.radius,
                min_ratio: s.min_ratio,
                max_ratio: s.max_ratio,
                pass: s.pass,
            }),
            Err(_) => None,
        };
    }

    let always_true_pass = bounds.all_pass();
    Ok(StabilityReport {
        inputs: [LawSummary::of(xs), LawSummary::of(ys)],
        scale: 1.0,
        sigma,
        epsilon,
        grid_step: h,
        distances,
        paths_agree,
        bounds,
        hypothesis_holds,
        tail_checks,
        sandwich,
        entropy_lower_bound: fit_lower_bound(distances.d_sum, distances.d_x, distances.d_y, sigma, 1),
        fisher_lower_bound: fit_lower_bound(distances.j_sum, distances.j_x, distances.j_y, sigma, 3),
        always_true_pass,
        invalid,
    })
}

/// Components `(weight, mean, sd)` of the two mixtures of suite case `index`
/// and its noise level. Depends only on `(seed, index)`.
pub fn suite_case(seed: u64, index: u64) -> (Vec<(f64, f64, f64)>, Vec<(f64, f64, f64)>, f64) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    let mixture = |rng: &mut ChaCha8Rng| {
        let k = rng.random_range(2..=5usize);
        let raw: Vec<(f64, f64, f64)> = (0..k)
            .map(|_| {
                let e = -(1.0 - rng.random::<f64>()).ln();
                let m = rng.random_range(-2.0..=2.0);
                let s = rng.random_range(0.2..=1.0);
                (e, m, s)
            })
            .collect();
        let total: f64 = raw.iter().map(|c| c.0).sum();
        raw.into_iter().map(|(e, m, s)| (e / total, m, s)).collect::<Vec<_>>()
    };
    let a = mixture(&mut rng);
    let b = mixture(&mut rng);
    let sigma = rng.random_range(0.25..=1.0);
    (a, b, sigma)
}

/// Runs suite case `index`.
pub fn run_suite_case(seed: u64, index: u64) -> Result<StabilityReport> {
    let (a, b, sigma) = suite_case(seed, index);
    let x = MixedDistribution::gauss_mixture(&a, None)?;
    let y = MixedDistribution::gauss_mixture(&b, None)?;
    let mut r = run_pair(&x, &y, sigma, None)?;
    r.inputs[0].components = Some(a);
    r.inputs[1].components = Some(b);
    Ok(r)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteReport {
    pub seed: u64,
    pub cases: usize,
    pub passed: usize,
    /// Indices of cases violating an always-true inequality or marked
    /// invalid.
    pub failed: Vec<usize>,
    pub reports: Vec<StabilityReport>,
}

impl SuiteReport {
    pub fn from_reports(seed: u64, reports: Vec<StabilityReport>) -> Self {
        let failed: Vec<usize> = reports
            .iter()
            .enumerate()
            .filter(|(_, r)| !r.always_true_pass || r.invalid.is_some())
            .map(|(i, _)| i)
            .collect();
        Self {
            seed,
            cases: reports.len(),
            passed: reports.len() - failed.len(),
            failed,
            reports,
        }
    }

    pub fn all_pass(&self) -> bool {
        self.failed.is_empty()
    }
}

/// Random Gaussian-mixture pairs run through [`run_pair`], sequentially.
pub fn random_family_suite(seed: u64, cases: usize) -> Result<SuiteReport> {
    if cases == 0 {
        return Err(Error::InvalidConfig("cases must be at least 1"));
    }
    let reports = (0..cases as u64).map(|i| run_suite_case(seed, i)).collect::<Result<Vec<_>>>()?;
    Ok(SuiteReport::from_reports(seed, reports))
}
