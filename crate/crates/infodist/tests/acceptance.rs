//! Acceptance run: one test per criterion, each printing a single
//! `criterion N: PASS|FAIL ...` line.
//!
//! Run with `cargo test -p infodist --test acceptance -- --nocapture` to see
//! the lines.

use std::f64::consts::{FRAC_1_SQRT_2, PI};
use std::process::Command;
use std::time::Instant;

use infodist::experiments;
use infodist_core::cramer::{scaled_entropy_sweep, difference_decay_check, sharpness_certificate};
use infodist_core::dist::{default_grid, regularize};
use infodist_core::harness::random_family_suite;
use infodist_core::info::SLACK_TOL;
use infodist_core::saddle::density_via_saddle;
use infodist_core::{CharFn, MixedDistribution};

fn report(n: u32, pass: bool, detail: String) {
    println!("criterion {n}: {} {detail}", if pass { "PASS" } else { "FAIL" });
    assert!(pass, "criterion {n} failed: {detail}");
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

/// Normal density written out independently of the library.
fn phi(x: f64, sd: f64) -> f64 {
    (-0.5 * (x / sd).powi(2)).exp() / (sd * (2.0f64 * PI).sqrt())
}

#[test]
fn criterion_1_scaled_entropy_limit() {
    let start = Instant::now();
    let r = scaled_entropy_sweep(1.0, &[40.0, 80.0, 160.0]).unwrap();
    let secs = start.elapsed().as_secs_f64();
    let scaled: Vec<f64> = r.rows.iter().map(|row| row.scaled_d).collect();
    let last = rel(scaled[2], 0.375);
    let extrapolated = rel(r.extrapolated.unwrap(), 0.375);
    let pass = r.monotone_approach && last <= 0.10 && extrapolated <= 0.05 && secs < 60.0;
    report(
        1,
        pass,
        format!(
            "T^2 D = {scaled:?}, monotone {}, rel err at T=160 {last:.2e}, extrapolated {:.6} ({extrapolated:.2e}), {secs:.1} s",
            r.monotone_approach,
            r.extrapolated.unwrap()
        ),
    );
}

#[test]
fn criterion_2_difference_decay() {
    let start = Instant::now();
    let r = difference_decay_check(1.0, &[40.0, 80.0]).unwrap();
    let secs = start.elapsed().as_secs_f64();
    let (a, b) = (&r.rows[0], &r.rows[1]);
    let (da, db) = (a.d_diff.unwrap(), b.d_diff.unwrap());
    let factor = da / db;
    let cubes = [da < a.d.powi(3), db < b.d.powi(3)];
    let pass = factor >= 256.0 && cubes[0] && cubes[1] && secs < 60.0;
    report(
        2,
        pass,
        format!(
            "D_diff = [{da:.3e}, {db:.3e}], drop factor {factor:.3e} (need >= 256), D^3 = [{:.3e}, {:.3e}], \
             below D^3: {cubes:?}, {secs:.1} s",
            a.d.powi(3),
            b.d.powi(3)
        ),
    );
}

#[test]
fn criterion_3_calibration_identity() {
    let r = difference_decay_check(1.0, &[40.0]).unwrap();
    let sup = r.calibration_sup.unwrap();
    report(3, sup < 1e-8, format!("sup |v*v - phi| at T=40 = {sup:.3e}"));
}

#[test]
fn criterion_4_sharpness_certificate() {
    let certs: Vec<_> = [40.0, 80.0, 160.0]
        .iter()
        .map(|&t| sharpness_certificate(1.0, t).unwrap())
        .collect();
    let at80 = &certs[1];
    let j: Vec<f64> = certs.iter().map(|c| c.j_x).collect();
    let decreasing = j.windows(2).all(|w| w[1] < w[0]);
    let pass = at80.pass && at80.c_d >= 1e-3 && at80.c_j >= 1e-3 && decreasing;
    report(
        4,
        pass,
        format!(
            "T=80: c_D = {:.3e}, c_J = {:.3e}; J_st(X_sigma) = {j:?}, decreasing {decreasing}",
            at80.c_d, at80.c_j
        ),
    );
}

#[test]
fn criterion_5_gaussian_zeros() {
    let mut worst: f64 = 0.0;
    for &(m, s) in &[(0.0, 1.0), (2.0, 0.5), (-1.0, 3.0)] {
        let law = MixedDistribution::gauss_mixture(&[(1.0, m, s)], None).unwrap();
        for &sigma in &[0.5, 1.0, 2.0] {
            let r = regularize(&law, sigma, default_grid(&law, sigma).unwrap()).unwrap();
            let d = r.distances().unwrap();
            worst = worst.max(d.d.abs()).max(d.j_st.abs());
        }
    }
    let mut worst_rel: f64 = 0.0;
    for &sigma in &[0.3, 1.0, 2.0] {
        let cf = CharFn::gaussian(0.0, 1.0).unwrap();
        let sd = (1.0f64 + sigma * sigma).sqrt();
        for i in 0..=120 {
            let x = -6.0 * sd + 12.0 * sd * i as f64 / 120.0;
            let p = density_via_saddle(&cf, sigma, x, 0).unwrap().value;
            worst_rel = worst_rel.max(rel(p, phi(x, sd)));
        }
    }
    let pass = worst <= 1e-8 && worst_rel <= 1e-9;
    report(5, pass, format!("max |D|,|J_st| = {worst:.3e}; saddle vs normal max rel err {worst_rel:.3e}"));
}

/// `X + σZ` density of the trapezoid-weighted measure, summed directly.
/// Accurate relative to the value even where the FFT sits at its rounding
/// floor.
fn direct_density(m: &MixedDistribution, sigma: f64, x: f64) -> f64 {
    let mut s: f64 = m.atoms().iter().map(|a| a.mass * phi(x - a.location, sigma)).sum();
    if let Some((w, d)) = m.ac() {
        let n = d.len();
        for (j, &p) in d.values().iter().enumerate() {
            let tw = if j == 0 || j == n - 1 { 0.5 } else { 1.0 };
            s += w * tw * d.h() * p * phi(x - d.x(j), sigma);
        }
    }
    s
}

#[test]
fn criterion_6_saddle_matches_fft() {
    let laws = [
        (vec![(0.5, -1.0, 0.5), (0.5, 1.0, 0.5)], 2.0),
        (vec![(0.2, -1.5, 0.3), (0.5, 0.0, 0.8), (0.3, 2.0, 0.4)], 2.5),
        (vec![(1.0, 0.0, 1.0)], 1.5),
    ];
    let mut raw_gap: f64 = 0.0;
    let mut within_floor = true;
    let mut direct_gap: f64 = 0.0;
    let mut derivative_gap: f64 = 0.0;
    for (components, level) in &laws {
        let m = MixedDistribution::gauss_mixture(components, None).unwrap().truncate(*level).unwrap();
        assert!(!m.atoms().is_empty());
        for &sigma in &[0.3, 1.0] {
            let r = experiments::invert(&m, sigma, 11).unwrap();
            assert_eq!(r.rows.len(), 11);
            for row in &r.rows {
                within_floor &= (row.saddle - row.fft).abs() <= 1e-7 * row.fft + r.fft_floor;
                direct_gap = direct_gap.max(rel(row.saddle, direct_density(&m, sigma, row.x)));
            }
            raw_gap = raw_gap.max(r.max_rel_diff);
            derivative_gap = derivative_gap.max(r.max_derivative_diff);
        }
    }
    let pass = within_floor && direct_gap <= 1e-7 && derivative_gap <= 1e-6;
    report(
        6,
        pass,
        format!(
            "saddle vs FFT max rel gap {raw_gap:.3e} (within 1e-7 above the FFT rounding floor: {within_floor}), \
             saddle vs direct sum {direct_gap:.3e}, derivative gap {derivative_gap:.3e}"
        ),
    );
}

#[test]
fn criterion_7_always_true_suite() {
    let start = Instant::now();
    let suite = random_family_suite(42, 100).unwrap();
    let secs = start.elapsed().as_secs_f64();
    let mut worst: f64 = f64::INFINITY;
    let mut checked = 0;
    for r in &suite.reports {
        let b = &r.bounds;
        let all = [&b.epi, &b.stam, &b.pinsker, &b.sum_entropy_upper, &b.sum_fisher_upper]
            .into_iter()
            .chain(&b.log_sobolev)
            .chain(&b.noise_ceiling);
        for i in all {
            worst = worst.min(i.slack);
            checked += 1;
        }
    }
    let pass = suite.all_pass() && suite.cases == 100 && worst >= -SLACK_TOL && secs < 120.0;
    report(
        7,
        pass,
        format!(
            "{}/{} cases pass, {checked} inequalities, min slack {worst:.3e}, {secs:.1} s",
            suite.passed, suite.cases
        ),
    );
}

#[test]
fn criterion_8_sandwich() {
    let half = MixedDistribution::gauss_mixture(&[(1.0, 0.0, FRAC_1_SQRT_2)], None).unwrap();
    let run = experiments::sandwich(&half, &half, 1.0, 1e-3, 256).unwrap();
    let r = &run.report;
    let inside = r.samples.iter().all(|&(re, im)| re.hypot(im) <= r.t_radius * (1.0 + 1e-12));
    let pass = r.pass && r.ratios.len() >= 256 && inside && r.min_ratio >= 0.5 && r.max_ratio <= 1.5;
    report(
        8,
        pass,
        format!(
            "{} points with |t| <= {:.4}, ratio in [{:.6}, {:.6}]",
            r.ratios.len(),
            r.t_radius,
            r.min_ratio,
            r.max_ratio
        ),
    );
}

#[test]
fn criterion_9_deterministic_suite() {
    let dir = tempfile::tempdir().unwrap();
    let run = |name: &str, jobs: &str| {
        let path = dir.path().join(name);
        let status = Command::new(env!("CARGO_BIN_EXE_infodist"))
            .args(["suite", "--seed", "42", "--cases", "100", "--jobs", jobs, "--out"])
            .arg(&path)
            .status()
            .unwrap();
        (status.code(), std::fs::read(&path).unwrap())
    };
    let (c1, a) = run("a.json", "1");
    let (c2, b) = run("b.json", "1");
    let (c3, c) = run("c.json", "4");
    let pass = c1 == Some(0) && c2 == Some(0) && c3 == Some(0) && a == b && a == c;
    report(
        9,
        pass,
        format!("exit codes {c1:?} {c2:?} {c3:?}, {} bytes, identical {}", a.len(), a == b && a == c),
    );
}
