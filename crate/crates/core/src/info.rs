//! Entropy, relative entropy to normality, Fisher information and the
//! standardized Fisher distance, plus the classical inequality checks.
//!
//! `D(X)` is evaluated twice: as the entropy gap `½ln(2πe b²) − h(X)` and as
//! the direct quadrature `∫ p log(p/φ_{a,b})`. `J_st(X)` likewise as
//! `b²I(X) − 1` and as `b²∫(p'/p − φ'/φ)² p`. Integrand cutoffs: samples below
//! [`ENTROPY_CUTOFF`] contribute nothing to entropy integrals and samples below
//! [`FISHER_CUTOFF`] are dropped from Fisher integrals; the dropped mass is
//! reported.

#[allow(unused_imports)] // shadowed by inherent methods when std is linked
use num_traits::Float;
use alloc::vec::Vec;
use core::f64::consts::{E, PI};

use serde::Serialize;

use crate::dist::{NormalParams, Regularized};
use crate::error::{Error, Result};
use crate::grid::{trap_weight, GridDensity};

pub const ENTROPY_CUTOFF: f64 = 1e-300;
pub const FISHER_CUTOFF: f64 = 1e-250;
/// Inputs to the entropy functionals must integrate to one within this.
pub const NORMALIZED_TOL: f64 = 1e-9;
/// Slack below which an always-true inequality counts as violated.
pub const SLACK_TOL: f64 = 1e-7;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EntropyResult {
    pub h: f64,
    pub entropy_power: f64,
    /// Estimate of the entropy contribution of the mass beyond the grid ends.
    pub tail_truncation_bound: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RelativeEntropy {
    pub value: f64,
    /// `∫ p log(p/φ_{a,b})`
    pub direct: f64,
    /// `½ln(2πe b²) − h`
    pub entropy_gap: f64,
    pub matching_normal: NormalParams,
    pub clamped_mass: f64,
}

impl RelativeEntropy {
    pub fn paths_agree(&self, tol: f64) -> bool {
        (self.direct - self.entropy_gap).abs() <= tol
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FisherResult {
    pub value: f64,
    pub clamped_mass: f64,
    /// True when an exact derivative was supplied.
    pub exact_derivative: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StandardizedFisher {
    pub value: f64,
    /// `b²I − 1`
    pub from_information: f64,
    /// `b²∫(p'/p − φ'/φ)² p`
    pub from_score: f64,
    pub information: f64,
    pub matching_normal: NormalParams,
    pub clamped_mass: f64,
}

impl StandardizedFisher {
    pub fn paths_agree(&self, rel: f64, abs: f64) -> bool {
        (self.from_information - self.from_score).abs() <= rel * self.from_score.abs() + abs
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DistanceResult {
    pub d: f64,
    pub j_st: f64,
    pub matching_normal: NormalParams,
}

/// One evaluated inequality. `slack >= 0` means it holds.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InequalityReport {
    pub name: &'static str,
    pub lhs: f64,
    pub relation: &'static str,
    pub rhs: f64,
    pub slack: f64,
    pub pass: bool,
}

impl InequalityReport {
    /// `lhs <= rhs`
    pub fn at_most(name: &'static str, lhs: f64, rhs: f64) -> Self {
        let slack = rhs - lhs;
        Self {
            name,
            lhs,
            relation: "<=",
            rhs,
            slack,
            pass: slack >= -SLACK_TOL,
        }
    }

    /// `lhs >= rhs`
    pub fn at_least(name: &'static str, lhs: f64, rhs: f64) -> Self {
        let slack = lhs - rhs;
        Self {
            name,
            lhs,
            relation: ">=",
            rhs,
            slack,
            pass: slack >= -SLACK_TOL,
        }
    }
}

fn require_normalized(d: &GridDensity) -> Result<()> {
    if !d.is_normalized(NORMALIZED_TOL) {
        return Err(Error::InvalidDensity("density must integrate to 1"));
    }
    Ok(())
}

#[inline]
fn p_log_p(p: f64) -> f64 {
    if p < ENTROPY_CUTOFF {
        0.0
    } else {
        p * p.ln()
    }
}

/// Tail contribution beyond one grid end, assuming `log p` keeps decaying at
/// the slope seen over the last cell.
fn tail_estimate(p_end: f64, p_inner: f64, h: f64) -> f64 {
    if p_end < ENTROPY_CUTOFF {
        return 0.0;
    }
    if !(p_inner > p_end) {
        return f64::INFINITY;
    }
    let slope = (p_inner.ln() - p_end.ln()) / h;
    let mass = p_end / slope;
    mass * (1.0 + p_end.ln().abs())
}

/// `h(X) = −∫ p log p` and the entropy power `exp(2h)`.
pub fn shannon_entropy(d: &GridDensity) -> Result<EntropyResult> {
    require_normalized(d)?;
    let h = -d.integrate(|_, p| p_log_p(p));
    let v = d.values();
    let n = v.len();
    let tail = tail_estimate(v[0], v[1], d.h()) + tail_estimate(v[n - 1], v[n - 2], d.h());
    Ok(EntropyResult {
        h,
        entropy_power: (2.0 * h).exp(),
        tail_truncation_bound: tail,
    })
}

fn matching_normal(d: &GridDensity) -> Result<NormalParams> {
    let (a, var) = d.mean_variance();
    if !(var > 0.0) {
        return Err(Error::DegenerateVariance);
    }
    NormalParams::new(a, var.sqrt())
}

/// `D(X)`, the Kullback–Leibler distance to `N(a, b²)` with the same moments.
pub fn relative_entropy_to_normal(d: &GridDensity) -> Result<RelativeEntropy> {
    require_normalized(d)?;
    let normal = matching_normal(d)?;
    let ent = shannon_entropy(d)?;
    let gap = 0.5 * (2.0 * PI * E * normal.b * normal.b).ln() - ent.h;

    // Bregman form p ln(p/φ) − p + φ: every term is non-negative.
    let mut clamped = 0.0;
    let mut bregman = 0.0;
    let mut phi_mass = 0.0;
    let n = d.len();
    for (j, &p) in d.values().iter().enumerate() {
        let w = trap_weight(j, n);
        let x = d.x(j);
        let ln_phi = normal.ln_pdf(x);
        let phi = ln_phi.exp();
        phi_mass += w * phi;
        let term = if p < ENTROPY_CUTOFF {
            clamped += w * p;
            phi
        } else {
            p * (p.ln() - ln_phi) - p + phi
        };
        bregman += w * term;
    }
    let h = d.h();
    let direct = h * bregman - (h * phi_mass - d.trapezoid());
    Ok(RelativeEntropy {
        value: direct,
        direct,
        entropy_gap: gap,
        matching_normal: normal,
        clamped_mass: clamped * h,
    })
}

/// `∫ p log(p/q)` on a common grid; requires `q > 0` wherever `p > 0`.
pub fn kl_divergence(p: &GridDensity, q: &GridDensity) -> Result<f64> {
    if !p.same_grid(q) {
        return Err(Error::GridMismatch);
    }
    require_normalized(p)?;
    require_normalized(q)?;
    let n = p.len();
    let mut s = 0.0;
    for (j, (&a, &b)) in p.values().iter().zip(q.values()).enumerate() {
        if a < ENTROPY_CUTOFF {
            s += trap_weight(j, n) * b;
            continue;
        }
        if b <= 0.0 {
            return Ok(f64::INFINITY);
        }
        s += trap_weight(j, n) * (a * (a / b).ln() - a + b);
    }
    Ok(s * p.h())
}

/// Five-point central differences with one Richardson step (`O(h⁶)` in the
/// interior); lower order within four nodes of the ends.
pub fn finite_difference_derivative(d: &GridDensity) -> Vec<f64> {
    let p = d.values();
    let n = p.len();
    let h = d.h();
    (0..n)
        .map(|j| {
            if j >= 4 && j + 4 < n {
                let d1 = (-p[j + 2] + 8.0 * p[j + 1] - 8.0 * p[j - 1] + p[j - 2]) / (12.0 * h);
                let d2 = (-p[j + 4] + 8.0 * p[j + 2] - 8.0 * p[j - 2] + p[j - 4]) / (24.0 * h);
                (16.0 * d1 - d2) / 15.0
            } else if j >= 1 && j + 1 < n {
                (p[j + 1] - p[j - 1]) / (2.0 * h)
            } else if j == 0 {
                (p[1] - p[0]) / h
            } else {
                (p[j] - p[j - 1]) / h
            }
        })
        .collect()
}

/// Rejects densities with a jump at the grid ends or an interior zero.
fn check_smooth(d: &GridDensity) -> Result<()> {
    let v = d.values();
    let max = v.iter().copied().fold(0.0, f64::max);
    let n = v.len();
    if v[0] > 1e-6 * max || v[n - 1] > 1e-6 * max {
        return Err(Error::NonsmoothDensity("density does not vanish at the grid ends"));
    }
    let first = v.iter().position(|&p| p >= FISHER_CUTOFF);
    let last = v.iter().rposition(|&p| p >= FISHER_CUTOFF);
    if let (Some(a), Some(b)) = (first, last) {
        if v[a..=b].iter().any(|&p| p < FISHER_CUTOFF) {
            return Err(Error::NonsmoothDensity("interior zero"));
        }
    }
    Ok(())
}

struct FisherSums {
    information: f64,
    score_gap: f64,
    clamped: f64,
}

fn fisher_sums(d: &GridDensity, dp: &[f64], normal: Option<NormalParams>) -> FisherSums {
    let n = d.len();
    let mut info = 0.0;
    let mut gap = 0.0;
    let mut clamped = 0.0;
    for (j, (&p, &q)) in d.values().iter().zip(dp).enumerate() {
        let w = trap_weight(j, n);
        if p < FISHER_CUTOFF {
            clamped += w * p;
            continue;
        }
        let score = q / p;
        info += w * score * q;
        if let Some(nm) = normal {
            let e = score - nm.score(d.x(j));
            gap += w * e * e * p;
        }
    }
    FisherSums {
        information: info * d.h(),
        score_gap: gap * d.h(),
        clamped: clamped * d.h(),
    }
}

/// `I(X) = ∫ p'²/p`. Without `derivative`, differences of the samples are
/// used; densities coming from regularization should pass their exact
/// derivative instead (see [`Regularized::fisher_information`]).
pub fn fisher_information(d: &GridDensity, derivative: Option<&[f64]>) -> Result<FisherResult> {
    require_normalized(d)?;
    check_smooth(d)?;
    let owned;
    let dp = match derivative {
        Some(dp) => {
            if dp.len() != d.len() {
                return Err(Error::GridMismatch);
            }
            dp
        }
        None => {
            owned = finite_difference_derivative(d);
            &owned
        }
    };
    let s = fisher_sums(d, dp, None);
    Ok(FisherResult {
        value: s.information,
        clamped_mass: s.clamped,
        exact_derivative: derivative.is_some(),
    })
}

/// `J_st(X) = b²(I(X) − 1/b²)`, by both routes.
pub fn standardized_fisher(d: &GridDensity, derivative: Option<&[f64]>) -> Result<StandardizedFisher> {
    require_normalized(d)?;
    check_smooth(d)?;
    let normal = matching_normal(d)?;
    let owned;
    let dp = match derivative {
        Some(dp) => {
            if dp.len() != d.len() {
                return Err(Error::GridMismatch);
            }
            dp
        }
        None => {
            owned = finite_difference_derivative(d);
            &owned
        }
    };
    let s = fisher_sums(d, dp, Some(normal));
    let b2 = normal.b * normal.b;
    let from_score = b2 * s.score_gap;
    Ok(StandardizedFisher {
        value: from_score,
        from_information: b2 * s.information - 1.0,
        from_score,
        information: s.information,
        matching_normal: normal,
        clamped_mass: s.clamped,
    })
}

impl Regularized {
    pub fn entropy(&self) -> Result<EntropyResult> {
        shannon_entropy(self.density())
    }

    pub fn relative_entropy(&self) -> Result<RelativeEntropy> {
        relative_entropy_to_normal(self.density())
    }

    /// Fisher information with the exact kernel derivative.
    pub fn fisher_information(&self) -> Result<FisherResult> {
        fisher_information(self.density(), Some(self.derivative()))
    }

    pub fn standardized_fisher(&self) -> Result<StandardizedFisher> {
        standardized_fisher(self.density(), Some(self.derivative()))
    }

    pub fn distances(&self) -> Result<DistanceResult> {
        let d = self.relative_entropy()?;
        let j = self.standardized_fisher()?;
        Ok(DistanceResult {
            d: d.value,
            j_st: j.value,
            matching_normal: d.matching_normal,
        })
    }

    pub fn variance(&self) -> f64 {
        self.density().mean_variance().1
    }
}

/// Entropy power inequality `N(X+Y) >= N(X) + N(Y)`.
pub fn check_epi(x: &GridDensity, y: &GridDensity) -> Result<InequalityReport> {
    let sum = crate::dist::convolve_direct(x, y)?;
    let nx = shannon_entropy(x)?.entropy_power;
    let ny = shannon_entropy(y)?.entropy_power;
    let ns = shannon_entropy(&sum)?.entropy_power;
    Ok(InequalityReport::at_least("epi", ns, nx + ny))
}

/// Stam's inequality `1/I(X+Y) >= 1/I(X) + 1/I(Y)`.
pub fn check_stam(x: &Regularized, y: &Regularized) -> Result<InequalityReport> {
    let sum = x.convolve(y)?;
    let ix = x.fisher_information()?.value;
    let iy = y.fisher_information()?.value;
    let is = sum.fisher_information()?.value;
    Ok(InequalityReport::at_least("stam", 1.0 / is, 1.0 / ix + 1.0 / iy))
}

/// Pinsker's inequality `‖P − Q‖²_TV <= 2 KL(P‖Q)`.
pub fn check_pinsker(d1: &GridDensity, d2: &GridDensity) -> Result<InequalityReport> {
    let tv = crate::dist::tv_distance(d1, d2)?;
    let kl = kl_divergence(d1, d2)?;
    Ok(InequalityReport::at_most("pinsker", tv * tv, 2.0 * kl))
}

/// The variance-weighted upper bounds for the sum,
/// `D(X+Y) <= λD(X) + (1−λ)D(Y)` and `J_st(X+Y) <= λJ_st(X) + (1−λ)J_st(Y)`
/// with `λ = Var X / (Var X + Var Y)`. Both distances are affine invariant, so
/// rescaling to `Var(X+Y) = 1` reduces to these weights.
pub fn check_upper_bounds(x: &Regularized, y: &Regularized) -> Result<(InequalityReport, InequalityReport)> {
    let sum = x.convolve(y)?;
    let dx = x.distances()?;
    let dy = y.distances()?;
    let ds = sum.distances()?;
    Ok(upper_bound_reports(x.variance(), y.variance(), &dx, &dy, &ds))
}

pub(crate) fn upper_bound_reports(
    var_x: f64,
    var_y: f64,
    dx: &DistanceResult,
    dy: &DistanceResult,
    ds: &DistanceResult,
) -> (InequalityReport, InequalityReport) {
    let lam = var_x / (var_x + var_y);
    (
        InequalityReport::at_most("entropy_sum_upper", ds.d, lam * dx.d + (1.0 - lam) * dy.d),
        InequalityReport::at_most("fisher_sum_upper", ds.j_st, lam * dx.j_st + (1.0 - lam) * dy.j_st),
    )
}

/// `½ J_st(X) >= D(X)`.
pub fn check_log_sobolev(r: &Regularized) -> Result<InequalityReport> {
    let d = r.distances()?;
    Ok(InequalityReport::at_least("log_sobolev", 0.5 * d.j_st, d.d))
}

/// `D(X_σ) <= ½ ln(e·Var(X_σ)/σ²)`, which follows from `p_σ <= 1/(σ√(2π))`.
pub fn check_noise_ceiling(r: &Regularized) -> Result<InequalityReport> {
    let d = r.relative_entropy()?.value;
    let s = r.sigma();
    Ok(InequalityReport::at_most("noise_ceiling", d, 0.5 * (E * r.variance() / (s * s)).ln()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dist::{default_grid, regularize, Atom, MixedDistribution};
    use crate::grid::GridSpec;
    use crate::special::normal_pdf;

    fn normal(mean: f64, sd: f64, h: f64) -> GridDensity {
        let spec = GridSpec::covering_aligned(mean - 12.0 * sd, mean + 12.0 * sd, h).unwrap();
        GridDensity::from_fn(spec, |x| normal_pdf(x, mean, sd)).unwrap().normalize().unwrap()
    }

    fn uniform(lo: f64, hi: f64, h: f64) -> GridDensity {
        let spec = GridSpec::covering(lo, hi, h).unwrap();
        GridDensity::from_fn(spec, |_| 1.0 / (hi - lo)).unwrap()
    }

    fn two_atoms_regularized(sigma: f64) -> Regularized {
        let m = MixedDistribution::discrete(alloc::vec![
            Atom::new(-1.0, 0.5).unwrap(),
            Atom::new(1.0, 0.5).unwrap()
        ])
        .unwrap();
        regularize(&m, sigma, default_grid(&m, sigma).unwrap()).unwrap()
    }

    #[test]
    fn entropy_closed_forms() {
        let u = uniform(0.0, 1.0, 1e-3);
        assert!(shannon_entropy(&u).unwrap().h.abs() < 1e-12);
        let u2 = uniform(0.0, 2.0, 1e-3);
        assert!((shannon_entropy(&u2).unwrap().h - 2f64.ln()).abs() < 1e-12);
        let g = normal(0.0, 1.0, 0.01);
        let e = shannon_entropy(&g).unwrap();
        assert!((e.h - 0.5 * (2.0 * PI * E).ln()).abs() < 1e-10);
        assert!((e.h - 1.418_938_533_204_672_7).abs() < 1e-10);
        assert_eq!(e.entropy_power, (2.0 * e.h).exp());
        assert!(e.tail_truncation_bound < 1e-25);
    }

    #[test]
    fn entropy_rejects_unnormalized() {
        let d = GridDensity::from_fn(GridSpec::covering(0.0, 1.0, 0.01).unwrap(), |_| 2.0).unwrap();
        assert!(matches!(shannon_entropy(&d), Err(Error::InvalidDensity(_))));
    }

    #[test]
    fn relative_entropy_of_normal_is_zero() {
        let g = normal(3.0, 2.0, 0.01);
        let r = relative_entropy_to_normal(&g).unwrap();
        assert!(r.value.abs() < 1e-9);
        assert!(r.paths_agree(1e-9));
        assert!((r.matching_normal.a - 3.0).abs() < 1e-10);
        assert!((r.matching_normal.b - 2.0).abs() < 1e-9);
    }

    #[test]
    fn relative_entropy_of_uniform() {
        let u = uniform(0.0, 1.0, 1e-4);
        let r = relative_entropy_to_normal(&u).unwrap();
        let expected = 0.5 * (PI * E / 6.0).ln();
        assert!((expected - 0.176_485_208_310_672_55).abs() < 1e-12);
        // the trapezoid variance of a sampled uniform is exact to O(h²)
        assert!((r.entropy_gap - expected).abs() < 1e-7);
        assert!(r.paths_agree(1e-9));
    }

    #[test]
    fn relative_entropy_needs_variance() {
        // all mass on the middle node
        let d = GridDensity::new(0.0, 1.0, alloc::vec![0.0, 1.0, 0.0]).unwrap();
        assert_eq!(relative_entropy_to_normal(&d), Err(Error::DegenerateVariance));
    }

    #[test]
    fn fisher_of_normal() {
        let g = normal(0.0, 2.0, 0.01);
        let i = fisher_information(&g, None).unwrap();
        assert!((i.value - 0.25).abs() < 1e-8, "{}", i.value);
        assert!(!i.exact_derivative);
        let j = standardized_fisher(&g, None).unwrap();
        assert!(j.value.abs() < 1e-8);
    }

    #[test]
    fn fisher_rejects_uniform() {
        let u = uniform(0.0, 1.0, 1e-3);
        assert!(matches!(fisher_information(&u, None), Err(Error::NonsmoothDensity(_))));
    }

    #[test]
    fn fisher_kernel_and_difference_paths_agree() {
        let r = two_atoms_regularized(1.0);
        let exact = r.fisher_information().unwrap().value;
        let fd = fisher_information(r.density(), None).unwrap().value;
        assert!((exact - fd).abs() <= 1e-6 * exact);
        // Cramér–Rao floor
        assert!(exact >= 1.0 / r.variance() - 1e-6);
    }

    #[test]
    fn standardized_fisher_paths_and_affine_invariance() {
        let r = two_atoms_regularized(1.0);
        let j = r.standardized_fisher().unwrap();
        assert!(j.paths_agree(1e-7, 1e-10));
        let moved = r.affine(3.0, 2.0).unwrap();
        let jm = moved.standardized_fisher().unwrap();
        assert!((jm.value - j.value).abs() <= 1e-7 * j.value);
        let d = r.relative_entropy().unwrap();
        assert!(0.5 * j.value >= d.value);
    }

    #[test]
    fn epi_equality_for_gaussians() {
        let s = core::f64::consts::FRAC_1_SQRT_2;
        let g = normal(0.0, s, 0.005);
        let rep = check_epi(&g, &g).unwrap();
        assert!(rep.slack.abs() < 1e-7, "{rep:?}");
        assert!(rep.pass);
    }

    #[test]
    fn upper_bound_for_two_atom_sum() {
        let r = two_atoms_regularized(1.0);
        let v = r.variance();
        let scaled = r.affine(0.0, (0.5 / v).sqrt()).unwrap();
        let (d_rep, j_rep) = check_upper_bounds(&scaled, &scaled).unwrap();
        assert!(d_rep.slack > 0.0, "{d_rep:?}");
        assert!(j_rep.slack > 0.0, "{j_rep:?}");
    }

    #[test]
    fn pinsker_on_shifted_normals() {
        let spec = GridSpec::covering_aligned(-12.0, 12.0, 0.005).unwrap();
        let p = GridDensity::from_fn(spec, |x| normal_pdf(x, 0.0, 1.0)).unwrap();
        let q = GridDensity::from_fn(spec, |x| normal_pdf(x, 0.2, 1.0)).unwrap();
        assert!((kl_divergence(&p, &q).unwrap() - 0.02).abs() < 1e-9);
        let rep = check_pinsker(&p, &q).unwrap();
        assert!(rep.pass && rep.slack > 0.0);
    }
}
