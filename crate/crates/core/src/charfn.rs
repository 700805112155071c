//! Characteristic functions continued to complex arguments.
//!
//! A sampled law is treated as the discrete measure that puts trapezoid
//! weight `w_ac·h·w_j·p_j` on every grid node plus its atoms. This is the
//! measure the grid quadratures integrate against, so the CF, the saddle-point
//! inversion and direct regularization all describe the same law.

#[allow(unused_imports)] // shadowed by inherent methods when std is linked
use num_traits::Float;
use alloc::vec::Vec;

use num_complex::Complex64;
use serde::Serialize;

use crate::cramer::CubicPhaseCF;
use crate::dist::{MixedDistribution, NormalParams};
use crate::error::{Error, Result};
use crate::grid::trap_weight;
use crate::special::log_sum_exp;

/// `|Im t|·radius` (or the real part of the exponent for closed forms) above
/// which direct evaluation may overflow.
pub const OVERFLOW_GUARD: f64 = 700.0;

#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteCf {
    /// `(location, weight)`; the first `n_ac` entries are grid nodes in order.
    points: Vec<(f64, f64)>,
    n_ac: usize,
    h: f64,
    total: f64,
    radius: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum CharFn {
    Discrete(DiscreteCf),
    Gaussian(NormalParams),
    CubicPhase(CubicPhaseCF),
}

/// `log f(iy)` and its first two derivatives in `y`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LogImag {
    pub log_f: f64,
    pub dlog: f64,
    pub d2log: f64,
}

/// Value with a refinement-based error estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CfValue {
    pub value: Complex64,
    pub error: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SandwichReport {
    pub t_radius: f64,
    /// Sampled points `(Re t, Im t)`.
    pub samples: Vec<(f64, f64)>,
    pub ratios: Vec<f64>,
    pub min_ratio: f64,
    pub max_ratio: f64,
    pub pass: bool,
}

/// `f(t + iy)/f(iy)` for real `t` at a fixed tilt `y`.
#[derive(Debug, Clone)]
pub enum Tilted<'a> {
    Discrete {
        points: &'a [(f64, f64)],
        /// Tilted probabilities `e^{−y x_k} w_k / f(iy)`.
        probs: Vec<f64>,
    },
    Gaussian { mean: f64, var: f64 },
    Cubic { s: f64, t: f64, y: f64 },
}

impl Tilted<'_> {
    pub fn ratio(&self, t: f64) -> Complex64 {
        match self {
            Tilted::Discrete { points, probs } => {
                let mut re = 0.0;
                let mut im = 0.0;
                for (&(x, _), &p) in points.iter().zip(probs) {
                    if p == 0.0 {
                        continue;
                    }
                    let (s, c) = (t * x).sin_cos();
                    re += p * c;
                    im += p * s;
                }
                Complex64::new(re, im)
            }
            Tilted::Gaussian { mean, var } => Complex64::from_polar((-0.5 * var * t * t).exp(), mean * t),
            Tilted::Cubic { s, t: big_t, y } => {
                let alpha = s + 6.0 * y / big_t;
                let phase = -s * t * y + (t * t * t - 3.0 * t * y * y) / big_t;
                Complex64::from_polar((-0.5 * alpha * t * t).exp(), phase)
            }
        }
    }
}

impl CharFn {
    /// CF of a mixed law; the grid part becomes its trapezoid-weighted nodes.
    pub fn from_distribution(m: &MixedDistribution) -> Self {
        let mut points = Vec::new();
        let mut n_ac = 0;
        let mut h = 0.0;
        if let Some((w, d)) = m.ac() {
            n_ac = d.len();
            h = d.h();
            points.extend(
                d.values()
                    .iter()
                    .enumerate()
                    .map(|(j, &p)| (d.x(j), w * trap_weight(j, n_ac) * h * p)),
            );
        }
        points.extend(m.atoms().iter().map(|a| (a.location, a.mass)));
        let total = points.iter().map(|p| p.1).sum();
        let radius = points.iter().filter(|p| p.1 > 0.0).map(|p| p.0.abs()).fold(0.0, f64::max);
        CharFn::Discrete(DiscreteCf {
            points,
            n_ac,
            h,
            total,
            radius,
        })
    }

    pub fn gaussian(a: f64, b: f64) -> Result<Self> {
        Ok(CharFn::Gaussian(NormalParams::new(a, b)?))
    }

    /// Radius of the support; infinite for the closed forms.
    pub fn support_radius(&self) -> f64 {
        match self {
            CharFn::Discrete(d) => d.radius,
            _ => f64::INFINITY,
        }
    }

    /// Smallest and largest `x` carrying mass, if compactly supported.
    pub fn support(&self) -> Option<(f64, f64)> {
        match self {
            CharFn::Discrete(d) => {
                let mut it = d.points.iter().filter(|p| p.1 > 0.0).map(|p| p.0);
                let first = it.next()?;
                Some(it.fold((first, first), |(lo, hi), x| (lo.min(x), hi.max(x))))
            }
            _ => None,
        }
    }

    pub fn eval(&self, t: Complex64) -> Result<Complex64> {
        Ok(self.eval_with_error(t)?.value)
    }

    /// `f(t)` with an error estimate from comparing the grid sum at steps `h`
    /// and `2h` (zero for closed forms and pure atoms).
    pub fn eval_with_error(&self, t: Complex64) -> Result<CfValue> {
        match self {
            CharFn::Discrete(d) => {
                if t.im.abs() * d.radius > OVERFLOW_GUARD {
                    return Err(Error::UseLogScale);
                }
                let term = |x: f64| {
                    let (s, c) = (t.re * x).sin_cos();
                    Complex64::new(c, s) * (-t.im * x).exp()
                };
                let mut sum = Complex64::new(0.0, 0.0);
                for &(x, w) in &d.points {
                    sum += term(x) * w;
                }
                let error = if d.n_ac >= 5 {
                    // coarse trapezoid on the even nodes, last odd cell kept fine
                    let n = d.n_ac;
                    let last_even = if (n - 1) % 2 == 0 { n - 1 } else { n - 2 };
                    let mut fine = Complex64::new(0.0, 0.0);
                    let mut coarse = Complex64::new(0.0, 0.0);
                    for j in 0..=last_even {
                        let (x, w) = d.points[j];
                        let p = w / (trap_weight(j, n) * d.h);
                        let wf = if j == 0 || j == last_even { 0.5 } else { 1.0 };
                        fine += term(x) * (wf * d.h * p);
                        if j % 2 == 0 {
                            coarse += term(x) * (wf * 2.0 * d.h * p);
                        }
                    }
                    (fine - coarse).norm() / 3.0 / d.total
                } else {
                    0.0
                };
                Ok(CfValue {
                    value: sum / d.total,
                    error,
                })
            }
            CharFn::Gaussian(g) => {
                let e = Complex64::i() * g.a * t - 0.5 * g.b * g.b * t * t;
                if e.re > OVERFLOW_GUARD {
                    return Err(Error::UseLogScale);
                }
                Ok(CfValue {
                    value: e.exp(),
                    error: 0.0,
                })
            }
            CharFn::CubicPhase(c) => {
                let e = c.log_eval(t);
                if e.re > OVERFLOW_GUARD {
                    return Err(Error::UseLogScale);
                }
                Ok(CfValue {
                    value: e.exp(),
                    error: 0.0,
                })
            }
        }
    }

    /// `log f(iy) = log ∫ e^{−yx} dF(x)` with its derivatives; the first is
    /// minus the tilted mean and the second the tilted variance.
    pub fn log_eval_imag(&self, y: f64) -> LogImag {
        match self {
            CharFn::Discrete(d) => {
                let (log_f, probs) = d.tilt(y);
                let mut mean = 0.0;
                for (&(x, _), &p) in d.points.iter().zip(&probs) {
                    mean += p * x;
                }
                let mut var = 0.0;
                for (&(x, _), &p) in d.points.iter().zip(&probs) {
                    var += p * (x - mean) * (x - mean);
                }
                LogImag {
                    log_f,
                    dlog: -mean,
                    d2log: var,
                }
            }
            CharFn::Gaussian(g) => LogImag {
                log_f: -g.a * y + 0.5 * g.b * g.b * y * y,
                dlog: -g.a + g.b * g.b * y,
                d2log: g.b * g.b,
            },
            CharFn::CubicPhase(c) => c.log_imag(y),
        }
    }

    /// The map `t ↦ f(t+iy)/f(iy)` on the real line.
    pub fn tilted(&self, y: f64) -> Tilted<'_> {
        match self {
            CharFn::Discrete(d) => Tilted::Discrete {
                points: &d.points,
                probs: d.tilt(y).1,
            },
            CharFn::Gaussian(g) => Tilted::Gaussian {
                mean: g.a - g.b * g.b * y,
                var: g.b * g.b,
            },
            CharFn::CubicPhase(c) => Tilted::Cubic {
                s: c.scale(),
                t: c.t,
                y,
            },
        }
    }

    /// Range of tilts on which `log f(iy)` is strictly convex.
    pub fn tilt_domain(&self) -> (f64, f64) {
        match self {
            CharFn::CubicPhase(c) => (-c.scale() * c.t / 6.0, f64::INFINITY),
            _ => (f64::NEG_INFINITY, f64::INFINITY),
        }
    }
}

impl DiscreteCf {
    /// `log f(iy)` and the tilted probabilities.
    fn tilt(&self, y: f64) -> (f64, Vec<f64>) {
        let logs: Vec<f64> = self
            .points
            .iter()
            .map(|&(x, w)| if w > 0.0 { w.ln() - y * x } else { f64::NEG_INFINITY })
            .collect();
        let lse = log_sum_exp(&logs);
        let probs = logs.iter().map(|&l| (l - lse).exp()).collect();
        (lse - self.total.ln(), probs)
    }
}

/// Samples `|f_X(t) f_Y(t)| / |e^{−t²/2}|` on the circles `|t| = T/4, T/2,
/// 3T/4, T`, `n_samples/4` equally spaced angles each.
pub fn sandwich_check(cf_x: &CharFn, cf_y: &CharFn, t_radius: f64, n_samples: usize) -> Result<SandwichReport> {
    if n_samples < 64 {
        return Err(Error::InvalidConfig("sandwich check needs at least 64 samples"));
    }
    if !(t_radius > 0.0) {
        return Err(Error::DomainError("T must be positive"));
    }
    let per = n_samples / 4;
    let mut samples = Vec::with_capacity(4 * per);
    let mut ratios = Vec::with_capacity(4 * per);
    for ring in 1..=4 {
        let r = t_radius * ring as f64 / 4.0;
        for k in 0..per {
            let theta = 2.0 * core::f64::consts::PI * (k as f64 + 0.5) / per as f64;
            let t = Complex64::from_polar(r, theta);
            let prod = cf_x.eval(t)? * cf_y.eval(t)?;
            let gauss = (-0.5 * (t * t).re).exp();
            samples.push((t.re, t.im));
            ratios.push(prod.norm() / gauss);
        }
    }
    let min_ratio = ratios.iter().copied().fold(f64::INFINITY, f64::min);
    let max_ratio = ratios.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    Ok(SandwichReport {
        t_radius,
        samples,
        ratios,
        min_ratio,
        max_ratio,
        pass: min_ratio >= 0.5 && max_ratio <= 1.5,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dist::{Atom, TruncationParams};
    use crate::grid::{GridDensity, GridSpec};
    use crate::special::normal_pdf;
    use proptest::prelude::*;

    fn uniform_sym(h: f64) -> MixedDistribution {
        let d = GridDensity::from_fn(GridSpec::covering(-1.0, 1.0, h).unwrap(), |_| 0.5).unwrap();
        MixedDistribution::continuous(d).unwrap()
    }

    fn truncated_normal(sd: f64, level: f64) -> MixedDistribution {
        let d = GridDensity::from_fn(GridSpec::covering_aligned(-12.0 * sd, 12.0 * sd, sd / 200.0).unwrap(), |x| {
            normal_pdf(x, 0.0, sd)
        })
        .unwrap();
        MixedDistribution::continuous(d).unwrap().truncate(level).unwrap()
    }

    #[test]
    fn point_mass_is_one() {
        let cf = CharFn::from_distribution(&MixedDistribution::point(0.0).unwrap());
        for t in [Complex64::new(0.3, 0.0), Complex64::new(-5.0, 2.0)] {
            assert_eq!(cf.eval(t).unwrap(), Complex64::new(1.0, 0.0));
        }
    }

    #[test]
    fn value_at_zero_is_exactly_one() {
        let cf = CharFn::from_distribution(&truncated_normal(1.0, 3.0));
        assert_eq!(cf.eval(Complex64::new(0.0, 0.0)).unwrap(), Complex64::new(1.0, 0.0));
    }

    #[test]
    fn truncated_normal_matches_gaussian_cf() {
        let cf = CharFn::from_distribution(&truncated_normal(1.0, 8.0));
        let v = cf.eval(Complex64::new(1.0, 0.0)).unwrap();
        assert!((v - Complex64::new((-0.5f64).exp(), 0.0)).norm() < 1e-6);
    }

    #[test]
    fn uniform_sinc_zero() {
        let cf = CharFn::from_distribution(&uniform_sym(1e-3));
        let v = cf.eval_with_error(Complex64::new(core::f64::consts::PI, 0.0)).unwrap();
        assert!(v.value.norm() < 1e-10, "{}", v.value);
        assert!(v.error < 1e-5);
    }

    #[test]
    fn overflow_guard() {
        let cf = CharFn::from_distribution(&uniform_sym(0.01));
        assert_eq!(cf.eval(Complex64::new(0.0, 701.0)), Err(Error::UseLogScale));
        assert!(cf.eval(Complex64::new(0.0, 699.0)).is_ok());
    }

    #[test]
    fn log_imag_closed_forms() {
        let g = CharFn::gaussian(0.0, 1.0).unwrap();
        let l = g.log_eval_imag(2.0);
        assert_eq!((l.log_f, l.dlog, l.d2log), (2.0, 2.0, 1.0));
        let p = CharFn::from_distribution(&MixedDistribution::point(3.0).unwrap());
        let l = p.log_eval_imag(1.0);
        assert!((l.log_f + 3.0).abs() < 1e-15);
        assert!((l.dlog + 3.0).abs() < 1e-15);
        assert!(l.d2log.abs() < 1e-15);
    }

    #[test]
    fn log_imag_uniform_matches_lattice_sum() {
        // trapezoid-weighted uniform lattice on [-1, 1] with n = 2m + 1 nodes
        let m = 64usize;
        let h = 1.0 / m as f64;
        let cf = CharFn::from_distribution(&uniform_sym(h));
        let y = 5.0f64;
        // Σ_j w_j e^{−y x_j}: the geometric series with half weights at the ends
        let q = (-y * h).exp();
        let n = 2 * m + 1;
        let geometric = (y).exp() * (1.0 - q.powi(n as i32)) / (1.0 - q);
        let ends = 0.5 * ((y).exp() + (-y).exp());
        let f = (geometric - ends) / (2.0 * m as f64);
        let got = cf.log_eval_imag(y);
        assert!((got.log_f - f.ln()).abs() < 1e-10 * f.ln().abs());
        // continuum value sinh(y)/y differs by O(h²) only
        assert!((got.log_f - (y.sinh() / y).ln()).abs() < 1e-2);
    }

    #[test]
    fn eval_agrees_with_log_path() {
        let cf = CharFn::from_distribution(&truncated_normal(0.8, 2.5));
        for y in [-40.0, -3.0, 0.5, 7.0, 60.0] {
            let direct = cf.eval(Complex64::new(0.0, y)).unwrap();
            let log = cf.log_eval_imag(y).log_f.exp();
            assert!((direct.re - log).abs() <= 1e-9 * log);
            assert!(direct.im.abs() <= 1e-12 * log);
        }
    }

    #[test]
    fn tilted_ratio_matches_direct_quotient() {
        let cf = CharFn::from_distribution(&truncated_normal(1.0, 2.0));
        let y = 0.7;
        let tilt = cf.tilted(y);
        let denom = cf.eval(Complex64::new(0.0, y)).unwrap();
        for t in [-2.0, 0.0, 1.3] {
            let direct = cf.eval(Complex64::new(t, y)).unwrap() / denom;
            assert!((tilt.ratio(t) - direct).norm() < 1e-12);
        }
        let g = CharFn::gaussian(0.4, 1.3).unwrap();
        let tg = g.tilted(y);
        let dg = g.eval(Complex64::new(0.0, y)).unwrap();
        let t = 0.9;
        assert!((tg.ratio(t) - g.eval(Complex64::new(t, y)).unwrap() / dg).norm() < 1e-13);
    }

    #[test]
    fn sandwich_for_gaussians_is_identity() {
        let g = CharFn::gaussian(0.0, core::f64::consts::FRAC_1_SQRT_2).unwrap();
        let rep = sandwich_check(&g, &g, 3.0, 64).unwrap();
        assert!((rep.min_ratio - 1.0).abs() < 1e-12 && (rep.max_ratio - 1.0).abs() < 1e-12);
        assert!(rep.pass);
        assert_eq!(rep.ratios.len(), 64);
    }

    #[test]
    fn sandwich_for_truncated_normals() {
        let tp = TruncationParams::new(1e-3, 1.0).unwrap();
        let cf = CharFn::from_distribution(&truncated_normal(core::f64::consts::FRAC_1_SQRT_2, tp.level));
        let rep = sandwich_check(&cf, &cf, tp.radius, 256).unwrap();
        assert!(rep.pass, "{} {}", rep.min_ratio, rep.max_ratio);
    }

    #[test]
    fn sandwich_needs_enough_samples() {
        let g = CharFn::gaussian(0.0, 1.0).unwrap();
        assert!(matches!(sandwich_check(&g, &g, 1.0, 10), Err(Error::InvalidConfig(_))));
    }

    fn random_law() -> impl Strategy<Value = MixedDistribution> {
        prop::collection::vec((-3.0f64..3.0, 0.05f64..1.0), 1..6).prop_map(|raw| {
            let total: f64 = raw.iter().map(|r| r.1).sum();
            let mut atoms: Vec<Atom> = Vec::new();
            for (loc, w) in raw {
                let loc = (loc * 1000.0).round() / 1000.0;
                if atoms.iter().all(|a| a.location != loc) {
                    atoms.push(Atom::new(loc, w / total).unwrap());
                }
            }
            let mass: f64 = atoms.iter().map(|a| a.mass).sum();
            let atoms = atoms.into_iter().map(|a| Atom::new(a.location, a.mass / mass).unwrap()).collect();
            MixedDistribution::discrete(atoms).unwrap()
        })
    }

    proptest! {
        #[test]
        fn log_f_is_convex(m in random_law(), y in -50.0f64..50.0) {
            let cf = CharFn::from_distribution(&m);
            prop_assert!(cf.log_eval_imag(y).d2log >= 0.0);
        }

        #[test]
        fn hermitian_on_real_axis(m in random_law(), t in -20.0f64..20.0) {
            let cf = CharFn::from_distribution(&m);
            let a = cf.eval(Complex64::new(t, 0.0)).unwrap();
            let b = cf.eval(Complex64::new(-t, 0.0)).unwrap();
            prop_assert!((a - b.conj()).norm() <= 1e-12);
        }

        #[test]
        fn imaginary_axis_is_real_positive(m in random_law(), y in -100.0f64..100.0) {
            let cf = CharFn::from_distribution(&m);
            let v = cf.eval(Complex64::new(0.0, y)).unwrap();
            let l = cf.log_eval_imag(y).log_f.exp();
            prop_assert!(v.re > 0.0 && v.im == 0.0);
            prop_assert!((v.re - l).abs() <= 1e-9 * l);
        }
    }
}
